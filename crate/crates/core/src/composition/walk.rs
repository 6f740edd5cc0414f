use super::{Composition, SimplexPoint};
use crate::chain::GradedChain;
use crate::prob::ProbValue;

pub const DEFAULT_LEVEL_BUDGET: usize = 8;

/// Partial-sum walk on weak compositions: step `x -> x + e_j` with probability `steps_j`.
///
/// Directions with zero probability are pruned from the state space, so the
/// walk with `steps = (1, 0, ..., 0)` lives on the single path `(n, 0, ..., 0)`.
#[derive(Clone, Debug)]
pub struct CompositionWalk {
    steps: SimplexPoint,
    steps_f64: Vec<f64>,
    budget: usize,
}

impl CompositionWalk {
    pub fn new(steps: SimplexPoint) -> Self {
        let steps_f64 = steps.to_f64s();
        Self { steps, steps_f64, budget: DEFAULT_LEVEL_BUDGET }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn d(&self) -> usize {
        self.steps.d()
    }

    pub fn steps(&self) -> &SimplexPoint {
        &self.steps
    }

    fn allowed(&self, x: &Composition) -> bool {
        x.parts().iter().zip(self.steps.coords()).all(|(&v, p)| v == 0 || !p.is_zero())
    }
}

/// Walk with uniform steps on `{e_1, ..., e_d}`.
pub fn uniform_walk(d: usize) -> CompositionWalk {
    assert!(d >= 1, "uniform walk needs at least one part");
    CompositionWalk::new(SimplexPoint::uniform(d))
}

/// Walk with step distribution `α`.
pub fn alpha_walk(alpha: &SimplexPoint) -> CompositionWalk {
    CompositionWalk::new(alpha.clone())
}

impl GradedChain for CompositionWalk {
    type State = Composition;

    fn root(&self) -> Composition {
        Composition::zero(self.d())
    }

    fn level_budget(&self) -> usize {
        self.budget
    }

    fn states_at(&self, n: usize) -> Vec<Composition> {
        Composition::enumerate(self.d(), n).into_iter().filter(|x| self.allowed(x)).collect()
    }

    fn transitions(&self, x: &Composition) -> Vec<(Composition, ProbValue)> {
        self.steps
            .coords()
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| (x.plus(j), p.clone()))
            .collect()
    }

    fn transitions_f64(&self, x: &Composition) -> Vec<(Composition, f64)> {
        self.steps_f64.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(j, &p)| (x.plus(j), p)).collect()
    }
}
