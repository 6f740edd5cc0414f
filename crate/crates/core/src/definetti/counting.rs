use std::collections::BTreeMap;

use super::source::{source_cylinder_law, SequenceSource};
use crate::chain::{cylinder_law, markov_property_check, CylinderLaw, GradedChain, LevelLaws, TabulatedChain};
use crate::composition::{polya_cotransition, uniform_walk, Composition};
use crate::error::{Error, Result};
use crate::harmonic::{h_transform, is_harmonic, recover_h, HarmonicFn};
use crate::prob::ProbValue;
use crate::report::{Failure, VerificationReport};

/// `Y_k = (#{i ≤ k : X_i = s})_s` for `k = 0, ..., n`.
pub fn counting_chain_path(d: usize, seq: &[usize]) -> Result<Vec<Composition>> {
    let mut current = Composition::zero(d);
    let mut path = Vec::with_capacity(seq.len() + 1);
    path.push(current.clone());
    for &s in seq {
        if s >= d {
            return Err(Error::OutOfAlphabet { symbol: s, alphabet: d });
        }
        current = current.plus(s);
        path.push(current.clone());
    }
    Ok(path)
}

/// Law of `(Y_1, ..., Y_n)`, the push-forward of the source law through the counting map.
pub fn counting_chain_law<S: SequenceSource>(source: &S, n: usize) -> Result<CylinderLaw<Composition>> {
    let d = source.alphabet_size();
    let law = source_cylinder_law(source, n)?;
    let mut atoms: BTreeMap<Vec<Composition>, ProbValue> = BTreeMap::new();
    for (seq, p) in law.atoms {
        if p.is_zero() {
            continue;
        }
        let mut path = counting_chain_path(d, &seq)?;
        path.remove(0);
        let slot = atoms.entry(path).or_insert_with(ProbValue::zero);
        *slot = &*slot + &p;
    }
    CylinderLaw::new(n, atoms)
}

/// The counting process as a graded chain, with transitions read off its law at horizon `n`.
pub fn counting_chain<S: SequenceSource>(source: &S, n: usize) -> Result<TabulatedChain<Composition>> {
    let law = counting_chain_law(source, n)?;
    Ok(TabulatedChain::from_cylinder_law(Composition::zero(source.alphabet_size()), &law))
}

/// `P(Y_{k+1} = y + e_j | Y_k = y)` for one reachable state and direction.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionEntry {
    pub from: Composition,
    pub direction: usize,
    pub probability: ProbValue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountingMarkovReport {
    pub markov: VerificationReport,
    pub transitions: Vec<TransitionEntry>,
}

/// Markov-property check of the counting process, plus its forward transition table.
pub fn verify_counting_markov<S: SequenceSource>(source: &S, n: usize) -> Result<CountingMarkovReport> {
    let law = counting_chain_law(source, n)?;
    let markov = markov_property_check(&law)?;
    let chain = TabulatedChain::from_cylinder_law(Composition::zero(source.alphabet_size()), &law);
    let mut transitions = Vec::new();
    for k in 0..n {
        for y in chain.states_at(k) {
            for (z, p) in chain.transitions(&y) {
                let direction = y.step_to(&z).expect("counting steps are unit vectors");
                transitions.push(TransitionEntry { from: y.clone(), direction, probability: p });
            }
        }
    }
    Ok(CountingMarkovReport { markov, transitions })
}

/// Cotransitions of the counting process against `(y_j + 1) / (k + 1)`.
pub fn verify_counting_cotransitions<S: SequenceSource>(source: &S, n: usize) -> Result<VerificationReport> {
    let chain = counting_chain(source, n)?;
    let laws = LevelLaws::new(&chain, n)?;
    let mut report = VerificationReport::new("counting-cotransitions");
    for k in 1..=n {
        for y in laws.support(k) {
            for j in 0..y.d() {
                let Some(x) = y.minus(j) else { continue };
                let observed = laws.cotransition(y, &x)?;
                report.compare(|| format!("{y:?} -> {x:?}"), polya_cotransition(&x, j), observed);
            }
        }
    }
    Ok(report)
}

/// Recovers the harmonic function that turns the uniform walk into the counting
/// process, checks that it is harmonic and that its h-transform reproduces the
/// counting law at horizon `n`.
pub fn counting_h_recovery<S: SequenceSource>(source: &S, n: usize) -> Result<HarmonicFn<Composition>> {
    let d = source.alphabet_size();
    let base = uniform_walk(d).with_budget(n);
    let observed = counting_chain(source, n)?;
    let h = recover_h(&base, &observed, n)?;
    let report = is_harmonic(&base, &h, n);
    if let Some(Failure { subject, .. }) = report.failures.first() {
        let residual = report.failures[0].residual().to_string();
        return Err(Error::NotHarmonic { state: subject.clone(), residual });
    }
    let transformed = h_transform(base, h.clone())?;
    let rebuilt = cylinder_law(&transformed, n)?.without_null_atoms();
    let target = counting_chain_law(source, n)?.without_null_atoms();
    let mut keys: Vec<&Vec<Composition>> = rebuilt.atoms.keys().chain(target.atoms.keys()).collect();
    keys.sort();
    keys.dedup();
    let mismatches = keys.iter().filter(|path| !rebuilt.probability(path).matches(&target.probability(path))).count();
    if mismatches > 0 {
        return Err(Error::RecoveryMismatch { mismatches });
    }
    Ok(h)
}
