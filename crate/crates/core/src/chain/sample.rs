use rand::Rng;

use super::GradedChain;
use crate::mc::replicate_rng;

/// One trajectory `(Y_0, ..., Y_n)`; replicate 0 of `seed`.
pub fn sample_path<C: GradedChain>(chain: &C, n: usize, seed: u64) -> Vec<C::State> {
    sample_path_replicate(chain, n, seed, 0)
}

/// Trajectory drawn from the stream of replicate `replicate`.
pub fn sample_path_replicate<C: GradedChain>(chain: &C, n: usize, seed: u64, replicate: u64) -> Vec<C::State> {
    sample_path_with(chain, n, &mut replicate_rng(seed, replicate))
}

/// Trajectory drawn from a caller-supplied generator. The chain is queried
/// lazily, so `n` may exceed the enumeration budget.
pub fn sample_path_with<C: GradedChain, R: Rng + ?Sized>(chain: &C, n: usize, rng: &mut R) -> Vec<C::State> {
    let mut path = Vec::with_capacity(n + 1);
    let mut current = chain.root();
    path.push(current.clone());
    for _ in 0..n {
        let row = chain.transitions_f64(&current);
        let total: f64 = row.iter().map(|(_, p)| p).sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (y, p) in &row {
            if *p <= 0.0 {
                continue;
            }
            acc += p;
            chosen = Some(y);
            if u < acc {
                break;
            }
        }
        match chosen {
            Some(y) => current = y.clone(),
            None => break,
        }
        path.push(current.clone());
    }
    path
}
