use std::collections::BTreeMap;

use super::{CylinderLaw, GradedChain, LevelledState};
use crate::prob::ProbValue;

/// The chain whose transitions are read off a cylinder law:
/// `P(Y_{k+1} = y | Y_k = x) = P(Y_k = x, Y_{k+1} = y) / P(Y_k = x)`.
///
/// Only states of positive probability are enumerated; the level budget is the
/// horizon of the law.
#[derive(Clone, Debug)]
pub struct TabulatedChain<S: Ord> {
    root: S,
    horizon: usize,
    levels: Vec<Vec<S>>,
    rows: BTreeMap<S, Vec<(S, ProbValue)>>,
}

impl<S: LevelledState> TabulatedChain<S> {
    pub fn from_cylinder_law(root: S, law: &CylinderLaw<S>) -> Self {
        let mut levels = vec![vec![root.clone()]];
        let mut rows: BTreeMap<S, Vec<(S, ProbValue)>> = BTreeMap::new();
        if law.horizon > 0 {
            let first = law.marginal(1);
            rows.insert(
                root.clone(),
                first.entries.iter().filter(|(_, p)| p.is_positive()).map(|(s, p)| (s.clone(), p.clone())).collect(),
            );
        }
        for k in 1..=law.horizon {
            let marginal = law.marginal(k);
            levels.push(marginal.entries.iter().filter(|(_, p)| p.is_positive()).map(|(s, _)| s.clone()).collect());
            if k < law.horizon {
                for ((x, y), p) in law.pair_marginal(k) {
                    if p.is_positive() {
                        let q = p / marginal.get(&x);
                        rows.entry(x).or_default().push((y, q));
                    }
                }
            }
        }
        Self { root, horizon: law.horizon, levels, rows }
    }
}

impl<S: LevelledState> GradedChain for TabulatedChain<S> {
    type State = S;

    fn root(&self) -> S {
        self.root.clone()
    }

    fn level_budget(&self) -> usize {
        self.horizon
    }

    fn states_at(&self, n: usize) -> Vec<S> {
        self.levels.get(n).cloned().unwrap_or_default()
    }

    fn transitions(&self, x: &S) -> Vec<(S, ProbValue)> {
        self.rows.get(x).cloned().unwrap_or_default()
    }
}
