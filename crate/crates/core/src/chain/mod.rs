//! Level-graded Markov chains.
//!
//! A chain lives on a family `F = F_0 ∪ F_1 ∪ ...` of finite levels with a
//! single root in `F_0`, and moves from level `n` to level `n + 1` at every
//! step. Everything exact here is computed by level-by-level dynamic
//! programming over [`LevelLaws`]; [`cylinder_law`] enumerates whole paths and
//! serves as the brute-force oracle for the dynamic programs.

mod identities;
mod law;
mod sample;
mod tabulated;

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

pub use identities::{kernel_identity_check, KernelIdentities};
pub use law::{cylinder_law, cylinder_law_with_budget, markov_property_check, CylinderLaw, DEFAULT_ATOM_BUDGET};
pub use sample::{sample_path, sample_path_replicate, sample_path_with};
pub use tabulated::TabulatedChain;

use crate::error::{Error, Result};
use crate::prob::ProbValue;
use crate::report::VerificationReport;

/// A state that knows its own level.
pub trait LevelledState: Clone + Ord + Hash + Debug + Send + Sync {
    fn level(&self) -> usize;
}

/// A Markov chain graded by level, started at a unique root.
pub trait GradedChain: Sync {
    type State: LevelledState;

    fn root(&self) -> Self::State;

    /// Highest level for which exact enumeration is allowed.
    fn level_budget(&self) -> usize;

    /// All states of level `n`, in ascending order. No budget check.
    fn states_at(&self, n: usize) -> Vec<Self::State>;

    /// One-step transitions from `x` with positive probability.
    fn transitions(&self, x: &Self::State) -> Vec<(Self::State, ProbValue)>;

    /// Float transitions used by the samplers.
    fn transitions_f64(&self, x: &Self::State) -> Vec<(Self::State, f64)> {
        self.transitions(x).into_iter().map(|(y, p)| (y, p.to_f64())).collect()
    }
}

impl<C: GradedChain + ?Sized> GradedChain for &C {
    type State = C::State;

    fn root(&self) -> Self::State {
        (**self).root()
    }
    fn level_budget(&self) -> usize {
        (**self).level_budget()
    }
    fn states_at(&self, n: usize) -> Vec<Self::State> {
        (**self).states_at(n)
    }
    fn transitions(&self, x: &Self::State) -> Vec<(Self::State, ProbValue)> {
        (**self).transitions(x)
    }
    fn transitions_f64(&self, x: &Self::State) -> Vec<(Self::State, f64)> {
        (**self).transitions_f64(x)
    }
}

/// `step(x, y)`: zero unless `y` is a one-step successor of `x`.
pub fn step<C: GradedChain>(chain: &C, x: &C::State, y: &C::State) -> ProbValue {
    chain
        .transitions(x)
        .into_iter()
        .find(|(z, _)| z == y)
        .map(|(_, p)| p)
        .unwrap_or_else(ProbValue::zero)
}

fn check_budget<C: GradedChain>(chain: &C, n: usize) -> Result<()> {
    if n > chain.level_budget() {
        Err(Error::BudgetExceeded { level: n, budget: chain.level_budget() })
    } else {
        Ok(())
    }
}

/// Complete enumeration of `F_n` in lexicographic order.
pub fn enumerate_level<C: GradedChain>(chain: &C, n: usize) -> Result<Vec<C::State>> {
    check_budget(chain, n)?;
    Ok(chain.states_at(n))
}

/// A probability table on one level.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionTable<S: Ord> {
    pub level: usize,
    pub entries: BTreeMap<S, ProbValue>,
}

impl<S: LevelledState> DistributionTable<S> {
    pub fn point_mass(state: S) -> Self {
        let level = state.level();
        let mut entries = BTreeMap::new();
        entries.insert(state, ProbValue::one());
        Self { level, entries }
    }

    pub fn get(&self, state: &S) -> ProbValue {
        self.entries.get(state).cloned().unwrap_or_else(ProbValue::zero)
    }

    pub fn total(&self) -> ProbValue {
        self.entries.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&S, &ProbValue)> {
        self.entries.iter()
    }

    /// Adds explicit zero entries for every state of `universe` missing from the table.
    pub fn with_zeros(mut self, universe: impl IntoIterator<Item = S>) -> Self {
        for s in universe {
            self.entries.entry(s).or_insert_with(ProbValue::zero);
        }
        self
    }
}

fn describe<S: Debug>(s: &S) -> String {
    format!("{s:?}")
}

pub(crate) fn validate_row<C: GradedChain>(x: &C::State, row: &[(C::State, ProbValue)]) -> Result<()> {
    let target = x.level() + 1;
    let mut sum = ProbValue::zero();
    for (y, p) in row {
        if y.level() != target || p.is_negative() {
            return Err(Error::NonStochastic { state: describe(x), sum: format!("invalid entry {y:?} -> {p}") });
        }
        sum = sum + p;
    }
    if !sum.matches(&ProbValue::one()) {
        return Err(Error::NonStochastic { state: describe(x), sum: sum.to_string() });
    }
    Ok(())
}

/// Marginal laws `P(Y_k = ·)` for `k ≤ max_level`, with the transition rows of
/// every reachable state and the cotransition rows derived from them.
#[derive(Clone, Debug)]
pub struct LevelLaws<S: Ord> {
    marginals: Vec<DistributionTable<S>>,
    forward: BTreeMap<S, Vec<(S, ProbValue)>>,
    backward: BTreeMap<S, Vec<(S, ProbValue)>>,
}

impl<S: LevelledState> LevelLaws<S> {
    /// Runs the forward dynamic program from the root up to `max_level`.
    pub fn new<C: GradedChain<State = S>>(chain: &C, max_level: usize) -> Result<Self> {
        check_budget(chain, max_level)?;
        let mut marginals = vec![DistributionTable::point_mass(chain.root())];
        let mut forward = BTreeMap::new();
        let mut joint: BTreeMap<S, Vec<(S, ProbValue)>> = BTreeMap::new();
        for n in 0..max_level {
            let mut next: BTreeMap<S, ProbValue> = BTreeMap::new();
            for (x, px) in marginals[n].iter() {
                let row = chain.transitions(x);
                validate_row::<C>(x, &row)?;
                for (y, p) in &row {
                    if p.is_zero() {
                        continue;
                    }
                    let mass = px * p;
                    joint.entry(y.clone()).or_default().push((x.clone(), mass.clone()));
                    let slot = next.entry(y.clone()).or_insert_with(ProbValue::zero);
                    *slot = &*slot + &mass;
                }
                forward.insert(x.clone(), row.into_iter().filter(|(_, p)| !p.is_zero()).collect());
            }
            marginals.push(DistributionTable { level: n + 1, entries: next });
        }
        let mut backward = BTreeMap::new();
        for (y, preds) in joint {
            let py = marginals[y.level()].get(&y);
            let row = preds.into_iter().map(|(x, mass)| (x, mass / &py)).collect();
            backward.insert(y, row);
        }
        Ok(Self { marginals, forward, backward })
    }

    pub fn max_level(&self) -> usize {
        self.marginals.len() - 1
    }

    pub fn marginal(&self, n: usize) -> &DistributionTable<S> {
        &self.marginals[n]
    }

    /// `P(Y_n = x)` for the level of `x`; zero above `max_level`.
    pub fn probability(&self, x: &S) -> ProbValue {
        self.marginals.get(x.level()).map(|t| t.get(x)).unwrap_or_else(ProbValue::zero)
    }

    /// States of positive probability at level `n`.
    pub fn support(&self, n: usize) -> impl Iterator<Item = &S> {
        self.marginals[n].entries.iter().filter(|(_, p)| p.is_positive()).map(|(s, _)| s)
    }

    pub fn transitions(&self, x: &S) -> &[(S, ProbValue)] {
        self.forward.get(x).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `P(Y_{n-1} = x | Y_n = y)` for every predecessor `x` of positive weight.
    pub fn cotransitions(&self, y: &S) -> &[(S, ProbValue)] {
        self.backward.get(y).map(Vec::as_slice).unwrap_or(&[])
    }

    fn require_reachable(&self, x: &S, as_target: bool) -> Result<()> {
        if self.probability(x).is_positive() {
            Ok(())
        } else if as_target {
            Err(Error::UnreachableTarget { state: describe(x) })
        } else {
            Err(Error::UnreachableConditioning { state: describe(x) })
        }
    }

    /// `P(Y_k = · | Y_m = x)` for `k = m..=to_level`; entry `i` is level `m + i`.
    pub fn conditional_laws(&self, x: &S, to_level: usize) -> Result<Vec<DistributionTable<S>>> {
        self.require_reachable(x, false)?;
        let mut out = vec![DistributionTable::point_mass(x.clone())];
        for n in x.level()..to_level.min(self.max_level()) {
            let mut next: BTreeMap<S, ProbValue> = BTreeMap::new();
            for (z, pz) in out.last().expect("nonempty").iter() {
                for (y, p) in self.transitions(z) {
                    let slot = next.entry(y.clone()).or_insert_with(ProbValue::zero);
                    *slot = &*slot + &(pz * p);
                }
            }
            out.push(DistributionTable { level: n + 1, entries: next });
        }
        Ok(out)
    }

    /// `P(Y_k = · | Y_n = y)` for `k = n, n-1, ..., to_level`, chaining cotransitions backward.
    pub fn backward_laws(&self, y: &S, to_level: usize) -> Result<Vec<DistributionTable<S>>> {
        self.require_reachable(y, false)?;
        let mut out = vec![DistributionTable::point_mass(y.clone())];
        let mut n = y.level();
        while n > to_level {
            let mut prev: BTreeMap<S, ProbValue> = BTreeMap::new();
            for (z, pz) in out.last().expect("nonempty").iter() {
                for (x, q) in self.cotransitions(z) {
                    let slot = prev.entry(x.clone()).or_insert_with(ProbValue::zero);
                    *slot = &*slot + &(pz * q);
                }
            }
            n -= 1;
            out.push(DistributionTable { level: n, entries: prev });
        }
        Ok(out)
    }

    /// `P(Y_n = y | Y_m = x)`, zero when `m > n`.
    pub fn conditional_forward(&self, x: &S, y: &S) -> Result<ProbValue> {
        let (m, n) = (x.level(), y.level());
        if m > n {
            return Ok(ProbValue::zero());
        }
        let laws = self.conditional_laws(x, n)?;
        Ok(laws[n - m].get(y))
    }

    /// Martin kernel `K(x, y) = P(Y_n = y | Y_m = x) / P(Y_n = y)`, zero when `m > n`.
    pub fn martin_kernel(&self, x: &S, y: &S) -> Result<ProbValue> {
        if x.level() > y.level() {
            return Ok(ProbValue::zero());
        }
        self.require_reachable(x, false)?;
        self.require_reachable(y, true)?;
        Ok(self.conditional_forward(x, y)? / self.probability(y))
    }

    /// The same kernel in the form `P(Y_m = x | Y_n = y) / P(Y_m = x)`,
    /// computed from backward-chained cotransitions.
    pub fn martin_kernel_backward(&self, x: &S, y: &S) -> Result<ProbValue> {
        if x.level() > y.level() {
            return Ok(ProbValue::zero());
        }
        self.require_reachable(x, false)?;
        self.require_reachable(y, true)?;
        let laws = self.backward_laws(y, x.level())?;
        Ok(laws.last().expect("nonempty").get(x) / self.probability(x))
    }

    /// `K(x, ·)` on every reachable state of level `m..=to_level`, one dynamic program for all targets.
    pub fn kernel_row(&self, x: &S, to_level: usize) -> Result<BTreeMap<S, ProbValue>> {
        let laws = self.conditional_laws(x, to_level)?;
        let mut row = BTreeMap::new();
        for table in &laws {
            for y in self.support(table.level) {
                row.insert(y.clone(), table.get(y) / self.probability(y));
            }
        }
        Ok(row)
    }

    /// `P(Y_n = x | Y_{n+1} = y)`; zero unless `level(y) = level(x) + 1`.
    pub fn cotransition(&self, y: &S, x: &S) -> Result<ProbValue> {
        self.require_reachable(y, false)?;
        if y.level() != x.level() + 1 {
            return Ok(ProbValue::zero());
        }
        Ok(self
            .cotransitions(y)
            .iter()
            .find(|(z, _)| z == x)
            .map(|(_, q)| q.clone())
            .unwrap_or_else(ProbValue::zero))
    }
}

/// `P(Y_n = ·)` by forward dynamic programming from the root.
pub fn forward_law<C: GradedChain>(chain: &C, n: usize) -> Result<DistributionTable<C::State>> {
    let laws = LevelLaws::new(chain, n)?;
    Ok(laws.marginal(n).clone())
}

fn laws_for<C: GradedChain>(chain: &C, x: &C::State, y: &C::State) -> Result<LevelLaws<C::State>> {
    check_budget(chain, x.level())?;
    check_budget(chain, y.level())?;
    LevelLaws::new(chain, x.level().max(y.level()))
}

/// `P(Y_n = y | Y_m = x)`.
pub fn conditional_forward<C: GradedChain>(chain: &C, x: &C::State, y: &C::State) -> Result<ProbValue> {
    laws_for(chain, x, y)?.conditional_forward(x, y)
}

/// Martin kernel `K(x, y)`.
pub fn martin_kernel<C: GradedChain>(chain: &C, x: &C::State, y: &C::State) -> Result<ProbValue> {
    laws_for(chain, x, y)?.martin_kernel(x, y)
}

/// Cotransition `P(Y_n = x | Y_{n+1} = y)`.
pub fn cotransition<C: GradedChain>(chain: &C, y: &C::State, x: &C::State) -> Result<ProbValue> {
    laws_for(chain, x, y)?.cotransition(y, x)
}

/// Row sums of every enumerated state below `max_level`.
pub fn check_row_stochastic<C: GradedChain>(chain: &C, max_level: usize) -> Result<VerificationReport> {
    check_budget(chain, max_level)?;
    let mut report = VerificationReport::new("row-stochastic");
    for n in 0..max_level {
        for x in chain.states_at(n) {
            let sum: ProbValue = chain.transitions(&x).iter().map(|(_, p)| p).sum();
            report.compare(|| describe(&x), ProbValue::one(), sum);
        }
    }
    Ok(report)
}

/// Lists enumerated states with `P(Y_n = x) = 0` up to `max_level`.
pub fn check_weak_irreducibility<C: GradedChain>(chain: &C, max_level: usize) -> Result<VerificationReport> {
    let laws = LevelLaws::new(chain, max_level)?;
    let mut report = VerificationReport::new("weak-irreducibility");
    for n in 0..=max_level {
        for x in chain.states_at(n) {
            let p = laws.probability(&x);
            if p.is_positive() {
                report.pass();
            } else {
                report.fail(crate::report::Failure::new(describe(&x), ProbValue::one(), p));
            }
        }
    }
    Ok(report)
}
