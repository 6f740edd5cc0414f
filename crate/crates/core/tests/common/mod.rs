//! Brute-force oracles built from raw step sequences, independent of the chain machinery.
#![allow(dead_code)]

use std::collections::BTreeMap;

use martinwalk::composition::{Composition, SimplexPoint};
use martinwalk::ProbValue;

/// Every word of length `n` over `{0, ..., d-1}`.
pub fn words(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..d).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

fn counts(d: usize, start: &[u32], word: &[usize]) -> Vec<u32> {
    let mut c = start.to_vec();
    c.resize(d, 0);
    for &s in word {
        c[s] += 1;
    }
    c
}

fn word_probability(alpha: &[ProbValue], word: &[usize]) -> ProbValue {
    word.iter().map(|&s| alpha[s].clone()).product()
}

/// `P(Y_n = ·)` for the walk with step law `alpha`, summing over all `d^n` step words.
pub fn marginal(alpha: &[ProbValue], n: usize) -> BTreeMap<Composition, ProbValue> {
    conditional(alpha, &Composition::zero(alpha.len()), n)
}

/// `P(Y_n = · | Y_m = x)` from the `d^{n-m}` continuations of `x`.
pub fn conditional(alpha: &[ProbValue], x: &Composition, n: usize) -> BTreeMap<Composition, ProbValue> {
    let d = alpha.len();
    let m: usize = x.parts().iter().map(|&v| v as usize).sum();
    let mut out: BTreeMap<Composition, ProbValue> = BTreeMap::new();
    for w in words(d, n - m) {
        let p = word_probability(alpha, &w);
        if p.is_zero() {
            continue;
        }
        let y = Composition::new(counts(d, x.parts(), &w));
        let slot = out.entry(y).or_insert_with(ProbValue::zero);
        *slot = &*slot + &p;
    }
    out
}

/// `K(x, y) = P(Y_n = y | Y_m = x) / P(Y_n = y)`.
pub fn kernel(alpha: &[ProbValue], x: &Composition, y: &Composition) -> ProbValue {
    let n: usize = y.parts().iter().map(|&v| v as usize).sum();
    let num = conditional(alpha, x, n).get(y).cloned().unwrap_or_else(ProbValue::zero);
    num / marginal(alpha, n)[y].clone()
}

/// `P(Y_n = x | Y_{n+1} = y)` from joint word counts.
pub fn cotransition(alpha: &[ProbValue], y: &Composition, x: &Composition) -> ProbValue {
    let d = alpha.len();
    let n1: usize = y.parts().iter().map(|&v| v as usize).sum();
    let mut joint = ProbValue::zero();
    let mut total = ProbValue::zero();
    for w in words(d, n1) {
        let p = word_probability(alpha, &w);
        if Composition::new(counts(d, &[], &w)) != *y {
            continue;
        }
        total = &total + &p;
        if Composition::new(counts(d, &[], &w[..n1 - 1])) == *x {
            joint = &joint + &p;
        }
    }
    joint / total
}

pub fn uniform(d: usize) -> Vec<ProbValue> {
    vec![ProbValue::ratio(1, d as i64); d]
}

pub fn simplex(coords: &[&str]) -> SimplexPoint {
    SimplexPoint::parse(coords).unwrap()
}

pub fn comp(parts: &[u32]) -> Composition {
    Composition::new(parts.to_vec())
}
