use std::collections::BTreeMap;

use super::{check_budget, describe, validate_row, DistributionTable, GradedChain, LevelledState};
use crate::error::{Error, Result};
use crate::prob::ProbValue;
use crate::report::{Failure, VerificationReport};

/// Atom budget for brute-force path enumeration.
pub const DEFAULT_ATOM_BUDGET: u128 = 10_000_000;

/// Law of `(Y_1, ..., Y_n)` on root-anchored paths; the root itself is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderLaw<S: Ord> {
    pub horizon: usize,
    pub atoms: BTreeMap<Vec<S>, ProbValue>,
}

impl<S: LevelledState> CylinderLaw<S> {
    /// Validates path lengths, levels, non-negativity and total mass.
    pub fn new(horizon: usize, atoms: BTreeMap<Vec<S>, ProbValue>) -> Result<Self> {
        let mut total = ProbValue::zero();
        for (path, p) in &atoms {
            if path.len() != horizon {
                return Err(Error::MalformedLaw(format!("path of length {} at horizon {horizon}", path.len())));
            }
            if let Some((k, s)) = path.iter().enumerate().find(|(k, s)| s.level() != k + 1) {
                return Err(Error::MalformedLaw(format!("state {s:?} at position {}", k + 1)));
            }
            if p.is_negative() {
                return Err(Error::MalformedLaw(format!("negative mass {p}")));
            }
            total = total + p;
        }
        if !total.matches(&ProbValue::one()) {
            return Err(Error::MalformedLaw(format!("atoms sum to {total}")));
        }
        Ok(Self { horizon, atoms })
    }

    pub fn probability(&self, path: &[S]) -> ProbValue {
        self.atoms.get(path).cloned().unwrap_or_else(ProbValue::zero)
    }

    /// Law of the first `k` states.
    pub fn prefix_law(&self, k: usize) -> BTreeMap<Vec<S>, ProbValue> {
        let mut out: BTreeMap<Vec<S>, ProbValue> = BTreeMap::new();
        for (path, p) in &self.atoms {
            let slot = out.entry(path[..k].to_vec()).or_insert_with(ProbValue::zero);
            *slot = &*slot + p;
        }
        out
    }

    /// `P(Y_k = ·)`, `1 ≤ k ≤ horizon`.
    pub fn marginal(&self, k: usize) -> DistributionTable<S> {
        let mut entries: BTreeMap<S, ProbValue> = BTreeMap::new();
        for (path, p) in &self.atoms {
            let slot = entries.entry(path[k - 1].clone()).or_insert_with(ProbValue::zero);
            *slot = &*slot + p;
        }
        DistributionTable { level: k, entries }
    }

    /// `P(Y_k = x, Y_{k+1} = y)` keyed by `(x, y)`.
    pub fn pair_marginal(&self, k: usize) -> BTreeMap<(S, S), ProbValue> {
        let mut out: BTreeMap<(S, S), ProbValue> = BTreeMap::new();
        for (path, p) in &self.atoms {
            let key = (path[k - 1].clone(), path[k].clone());
            let slot = out.entry(key).or_insert_with(ProbValue::zero);
            *slot = &*slot + p;
        }
        out
    }

    /// Drops zero-mass atoms.
    pub fn without_null_atoms(mut self) -> Self {
        self.atoms.retain(|_, p| !p.is_zero());
        self
    }
}

/// Exact probability of every root-anchored path of length `n`.
pub fn cylinder_law<C: GradedChain>(chain: &C, n: usize) -> Result<CylinderLaw<C::State>> {
    cylinder_law_with_budget(chain, n, DEFAULT_ATOM_BUDGET)
}

pub fn cylinder_law_with_budget<C: GradedChain>(
    chain: &C,
    n: usize,
    atom_budget: u128,
) -> Result<CylinderLaw<C::State>> {
    check_budget(chain, n)?;
    let mut layer: Vec<(Vec<C::State>, C::State, ProbValue)> = vec![(Vec::new(), chain.root(), ProbValue::one())];
    for _ in 0..n {
        let mut next = Vec::new();
        for (path, last, p) in layer {
            let row = chain.transitions(&last);
            validate_row::<C>(&last, &row)?;
            for (y, q) in row {
                if q.is_zero() {
                    continue;
                }
                if next.len() as u128 >= atom_budget {
                    return Err(Error::AtomBudgetExceeded { needed: next.len() as u128 + 1, budget: atom_budget });
                }
                let mut extended = path.clone();
                extended.push(y.clone());
                next.push((extended, y, &p * &q));
            }
        }
        layer = next;
    }
    let mut atoms = BTreeMap::new();
    for (path, _, p) in layer {
        atoms.insert(path, p);
    }
    Ok(CylinderLaw { horizon: n, atoms })
}

/// Lists every `(history, x_k, x_{k+1})` whose conditional probability given the
/// full history differs from the one given `x_k` alone.
pub fn markov_property_check<S: LevelledState>(law: &CylinderLaw<S>) -> Result<VerificationReport> {
    let total: ProbValue = law.atoms.values().sum();
    if !total.matches(&ProbValue::one()) {
        return Err(Error::MalformedLaw(format!("atoms sum to {total}")));
    }
    let mut report = VerificationReport::new("markov-property");
    let prefixes: Vec<BTreeMap<Vec<S>, ProbValue>> = (0..=law.horizon).map(|k| law.prefix_law(k)).collect();
    // Histories of length 1 carry no information beyond the current state.
    for k in 2..law.horizon {
        let state_law = law.marginal(k);
        let mut successors: BTreeMap<S, Vec<(S, ProbValue)>> = BTreeMap::new();
        for ((from, to), p) in law.pair_marginal(k) {
            successors.entry(from).or_default().push((to, p));
        }
        for (prefix, p_prefix) in &prefixes[k] {
            if !p_prefix.is_positive() {
                continue;
            }
            let x = &prefix[k - 1];
            let px = state_law.get(x);
            for (to, p_pair) in successors.get(x).map(Vec::as_slice).unwrap_or(&[]) {
                let mut extended = prefix.clone();
                extended.push(to.clone());
                let p_ext = prefixes[k + 1].get(&extended).cloned().unwrap_or_else(ProbValue::zero);
                let given_history = p_ext / p_prefix;
                let given_state = p_pair / &px;
                if given_history.matches(&given_state) {
                    report.pass();
                } else {
                    let subject = format!("history {:?} -> {}", &prefix[..k - 1], describe(&(x, to)));
                    report.fail(Failure::new(subject, given_state, given_history));
                }
            }
        }
    }
    Ok(report)
}
