use std::collections::BTreeMap;

use super::{describe, GradedChain, LevelLaws, LevelledState};
use crate::error::Result;
use crate::prob::ProbValue;
use crate::report::{Failure, VerificationReport};

/// Exact Martin-kernel identities over every reachable pair up to a level.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelIdentities {
    /// Forward form `P(Y_n=y|Y_m=x)/P(Y_n=y)` against backward form `P(Y_m=x|Y_n=y)/P(Y_m=x)`.
    pub symmetry: VerificationReport,
    /// `K(x, y) ≤ 1 / P(Y_m = x)`.
    pub bound: VerificationReport,
    /// `Σ_y K(x, y) P(Y_n = y) = 1` for every level `n ≥ m`.
    pub expectation: VerificationReport,
    /// `K(x, y) = Σ_z P(Y_n = z | Y_{n+1} = y) K(x, z)`.
    pub martingale: VerificationReport,
}

impl KernelIdentities {
    pub fn reports(&self) -> [&VerificationReport; 4] {
        [&self.symmetry, &self.bound, &self.expectation, &self.martingale]
    }

    pub fn is_clean(&self) -> bool {
        self.reports().iter().all(|r| r.is_clean())
    }
}

pub fn kernel_identity_check<C: GradedChain>(chain: &C, max_level: usize) -> Result<KernelIdentities> {
    let laws = LevelLaws::new(chain, max_level)?;
    let mut rows: BTreeMap<C::State, BTreeMap<C::State, ProbValue>> = BTreeMap::new();
    for m in 0..=max_level {
        for x in laws.support(m) {
            rows.insert(x.clone(), laws.kernel_row(x, max_level)?);
        }
    }
    let kernel = |x: &C::State, y: &C::State| -> ProbValue {
        rows.get(x).and_then(|row| row.get(y)).cloned().unwrap_or_else(ProbValue::zero)
    };

    let mut symmetry = VerificationReport::new("kernel-symmetry");
    for n in 0..=max_level {
        for y in laws.support(n) {
            let back = laws.backward_laws(y, 0)?;
            for table in &back {
                for x in laws.support(table.level) {
                    let backward = table.get(x) / laws.probability(x);
                    symmetry.compare(|| describe(&(x, y)), kernel(x, y), backward);
                }
            }
        }
    }

    let mut bound = VerificationReport::new("kernel-bound");
    let mut expectation = VerificationReport::new("kernel-expectation");
    for (x, row) in &rows {
        let cap = ProbValue::one() / laws.probability(x);
        for (y, k) in row {
            if k > &cap && !k.matches(&cap) {
                bound.fail(Failure::new(describe(&(x, y)), cap.clone(), k.clone()));
            } else {
                bound.pass();
            }
        }
        for n in x.level()..=max_level {
            let total: ProbValue = laws.support(n).map(|y| kernel(x, y) * laws.probability(y)).sum();
            expectation.compare(|| format!("{} at level {n}", describe(x)), ProbValue::one(), total);
        }
    }

    let mut martingale = VerificationReport::new("backwards-martingale");
    for x in rows.keys() {
        for n in x.level()..max_level {
            for y in laws.support(n + 1) {
                let avg: ProbValue = laws.cotransitions(y).iter().map(|(z, q)| kernel(x, z) * q).sum();
                martingale.compare(|| describe(&(x, y)), kernel(x, y), avg);
            }
        }
    }

    Ok(KernelIdentities { symmetry, bound, expectation, martingale })
}
