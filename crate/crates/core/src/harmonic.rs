//! Harmonic functions and Doob h-transforms.
//!
//! `h` is harmonic for a graded chain when `h(x) = Σ_y p(x, y) h(y)` at every
//! state. A normalized non-negative harmonic `h` reweights the chain to
//! `p_h(x, y) = p(x, y) h(y) / h(x)` on its support `F_h`. The checks below
//! test the identities that tie `P_h` to `P`: path densities, the kernel
//! transform `K_h = K / h`, equality of cotransitions, recovery of `h` from
//! marginals and the finite-horizon representation `E_h K(x, Y_n) = h(x)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::chain::{cylinder_law, GradedChain, LevelLaws, LevelledState};
use crate::error::{Error, Result};
use crate::mc::McConfig;
use crate::prob::ProbValue;
use crate::report::{mean_and_std_error, Failure, StatisticalReport, VerificationReport};

type ExactEval<S> = Arc<dyn Fn(&S) -> ProbValue + Send + Sync>;
type FloatEval<S> = Arc<dyn Fn(&S) -> f64 + Send + Sync>;

/// A non-negative function on states, meant to be harmonic with `h(root) = 1`.
///
/// Besides the exact evaluator it may carry a float evaluator and a log-domain
/// evaluator; samplers use the log form so that long trajectories do not
/// overflow.
pub struct HarmonicFn<S> {
    exact: ExactEval<S>,
    float: Option<FloatEval<S>>,
    ln: Option<FloatEval<S>>,
    max_level: Option<usize>,
}

impl<S> Clone for HarmonicFn<S> {
    fn clone(&self) -> Self {
        Self { exact: self.exact.clone(), float: self.float.clone(), ln: self.ln.clone(), max_level: self.max_level }
    }
}

impl<S> fmt::Debug for HarmonicFn<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HarmonicFn").field("max_level", &self.max_level).finish_non_exhaustive()
    }
}

impl<S: LevelledState + 'static> HarmonicFn<S> {
    pub fn from_fn(f: impl Fn(&S) -> ProbValue + Send + Sync + 'static) -> Self {
        Self { exact: Arc::new(f), float: None, ln: None, max_level: None }
    }

    pub fn constant_one() -> Self {
        Self::from_fn(|_| ProbValue::one()).with_ln(|_| 0.0)
    }

    /// Values read from a table; states absent from the table get `0`. Defined up to `max_level`.
    pub fn tabulated(values: BTreeMap<S, ProbValue>, max_level: usize) -> Self {
        let table = Arc::new(values);
        let mut h = Self::from_fn(move |x| table.get(x).cloned().unwrap_or_else(ProbValue::zero));
        h.max_level = Some(max_level);
        h
    }

    pub fn with_float(mut self, f: impl Fn(&S) -> f64 + Send + Sync + 'static) -> Self {
        self.float = Some(Arc::new(f));
        self
    }

    /// Log-domain evaluator; must return `-inf` off the support.
    pub fn with_ln(mut self, f: impl Fn(&S) -> f64 + Send + Sync + 'static) -> Self {
        self.ln = Some(Arc::new(f));
        self
    }

    pub fn eval(&self, x: &S) -> ProbValue {
        (self.exact)(x)
    }

    pub fn eval_f64(&self, x: &S) -> f64 {
        match (&self.float, &self.ln) {
            (Some(f), _) => f(x),
            (None, Some(ln)) => ln(x).exp(),
            (None, None) => self.eval(x).to_f64(),
        }
    }

    pub fn ln_eval(&self, x: &S) -> f64 {
        match &self.ln {
            Some(ln) => ln(x),
            None => self.eval_f64(x).ln(),
        }
    }

    /// `x ∈ F_h`.
    pub fn in_support(&self, x: &S) -> bool {
        self.eval(x).is_positive()
    }

    /// Highest level on which the function is defined, if bounded.
    pub fn max_level(&self) -> Option<usize> {
        self.max_level
    }
}

fn describe<S: fmt::Debug>(x: &S) -> String {
    format!("{x:?}")
}

/// Checks `h(root) = 1`, `h ≥ 0` and the mean-value identity at every enumerated
/// state of level `< max_level`.
pub fn is_harmonic<C>(chain: &C, h: &HarmonicFn<C::State>, max_level: usize) -> VerificationReport
where
    C: GradedChain,
    C::State: 'static,
{
    let mut report = VerificationReport::new("harmonic");
    let root = chain.root();
    report.compare(|| format!("root {}", describe(&root)), ProbValue::one(), h.eval(&root));
    for n in 0..=max_level {
        for x in chain.states_at(n) {
            let hx = h.eval(&x);
            if hx.is_negative() {
                report.fail(Failure::new(format!("negative at {}", describe(&x)), ProbValue::zero(), hx.clone()));
            }
            if n < max_level {
                let mean: ProbValue = chain.transitions(&x).iter().map(|(y, p)| p * h.eval(y)).sum();
                report.compare(|| format!("mean value at {}", describe(&x)), hx, mean);
            }
        }
    }
    report
}

/// The h-transform of a chain, restricted to `F_h`.
#[derive(Clone, Debug)]
pub struct HTransformChain<C: GradedChain> {
    base: C,
    h: HarmonicFn<C::State>,
    budget: usize,
}

impl<C> HTransformChain<C>
where
    C: GradedChain,
    C::State: 'static,
{
    pub fn base(&self) -> &C {
        &self.base
    }

    pub fn h(&self) -> &HarmonicFn<C::State> {
        &self.h
    }
}

/// Builds `p_h(x, y) = p(x, y) h(y) / h(x)` on `F_h`.
///
/// Harmonicity is checked on construction for every level below the budget,
/// which is the base budget capped by the level range of `h`.
pub fn h_transform<C>(chain: C, h: HarmonicFn<C::State>) -> Result<HTransformChain<C>>
where
    C: GradedChain,
    C::State: 'static,
{
    let root_value = h.eval(&chain.root());
    if !root_value.matches(&ProbValue::one()) {
        return Err(Error::RootNotNormalized { value: root_value.to_string() });
    }
    let budget = h.max_level().map_or(chain.level_budget(), |m| m.min(chain.level_budget()));
    let report = is_harmonic(&chain, &h, budget);
    if let Some(failure) = report.failures.first() {
        return Err(Error::NotHarmonic { state: failure.subject.clone(), residual: failure.residual().to_string() });
    }
    Ok(HTransformChain { base: chain, h, budget })
}

impl<C> GradedChain for HTransformChain<C>
where
    C: GradedChain,
    C::State: 'static,
{
    type State = C::State;

    fn root(&self) -> C::State {
        self.base.root()
    }

    fn level_budget(&self) -> usize {
        self.budget
    }

    fn states_at(&self, n: usize) -> Vec<C::State> {
        self.base.states_at(n).into_iter().filter(|x| self.h.in_support(x)).collect()
    }

    fn transitions(&self, x: &C::State) -> Vec<(C::State, ProbValue)> {
        let hx = self.h.eval(x);
        if !hx.is_positive() {
            return Vec::new();
        }
        self.base
            .transitions(x)
            .into_iter()
            .filter_map(|(y, p)| {
                let hy = self.h.eval(&y);
                hy.is_positive().then(|| (y, p * hy / &hx))
            })
            .collect()
    }

    fn transitions_f64(&self, x: &C::State) -> Vec<(C::State, f64)> {
        let lx = self.h.ln_eval(x);
        self.base
            .transitions_f64(x)
            .into_iter()
            .filter_map(|(y, p)| {
                let ly = self.h.ln_eval(&y);
                (ly > f64::NEG_INFINITY).then(|| (y, p * (ly - lx).exp()))
            })
            .collect()
    }
}

/// For every positive-probability path of length `n`: `P_h(path) / P(path) = h(x_n)`.
pub fn density_ratio_check<C>(base: &C, transformed: &HTransformChain<C>, n: usize) -> Result<VerificationReport>
where
    C: GradedChain,
    C::State: 'static,
{
    let plain = cylinder_law(base, n)?;
    let reweighted = cylinder_law(transformed, n)?;
    let mut report = VerificationReport::new("density-ratio");
    for (path, p) in &plain.atoms {
        if !p.is_positive() {
            continue;
        }
        let last = path.last().cloned().unwrap_or_else(|| base.root());
        let ratio = reweighted.probability(path) / p;
        report.compare(|| describe(path), transformed.h.eval(&last), ratio);
    }
    Ok(report)
}

/// `K_h(x, y) = K(x, y) / h(x)` for all `x, y ∈ F_h` with `level(x) ≤ level(y) ≤ max_level`.
pub fn kernel_transform_check<C>(
    base: &C,
    transformed: &HTransformChain<C>,
    max_level: usize,
) -> Result<VerificationReport>
where
    C: GradedChain,
    C::State: 'static,
{
    let base_laws = LevelLaws::new(base, max_level)?;
    let h_laws = LevelLaws::new(transformed, max_level)?;
    let mut report = VerificationReport::new("kernel-transform");
    for m in 0..=max_level {
        for x in h_laws.support(m) {
            let hx = transformed.h.eval(x);
            let base_row = base_laws.kernel_row(x, max_level)?;
            let h_row = h_laws.kernel_row(x, max_level)?;
            for n in m..=max_level {
                for y in h_laws.support(n) {
                    let k = base_row.get(y).cloned().unwrap_or_else(ProbValue::zero);
                    let kh = h_row.get(y).cloned().unwrap_or_else(ProbValue::zero);
                    report.compare(|| describe(&(x, y)), k / &hx, kh);
                }
            }
        }
    }
    Ok(report)
}

/// Compares `P_a(Y_n = x | Y_{n+1} = y)` with `P_b(...)` wherever both chains reach `y`.
pub fn cotransition_equality_check<A, B>(a: &A, b: &B, max_level: usize) -> Result<VerificationReport>
where
    A: GradedChain,
    B: GradedChain<State = A::State>,
{
    let laws_a = LevelLaws::new(a, max_level)?;
    let laws_b = LevelLaws::new(b, max_level)?;
    Ok(compare_cotransitions(&laws_a, &laws_b, max_level))
}

pub(crate) fn compare_cotransitions<S: LevelledState>(
    laws_a: &LevelLaws<S>,
    laws_b: &LevelLaws<S>,
    max_level: usize,
) -> VerificationReport {
    let mut report = VerificationReport::new("cotransition-equality");
    for n in 1..=max_level {
        for y in laws_a.support(n) {
            if !laws_b.probability(y).is_positive() {
                continue;
            }
            let mut preds: BTreeMap<&S, (ProbValue, ProbValue)> = BTreeMap::new();
            for (x, q) in laws_a.cotransitions(y) {
                preds.entry(x).or_insert_with(|| (ProbValue::zero(), ProbValue::zero())).0 = q.clone();
            }
            for (x, q) in laws_b.cotransitions(y) {
                preds.entry(x).or_insert_with(|| (ProbValue::zero(), ProbValue::zero())).1 = q.clone();
            }
            for (x, (qa, qb)) in preds {
                report.compare(|| describe(&(y, x)), qa, qb);
            }
        }
    }
    report
}

/// Recovers `h(x) = P_observed(Y_n = x) / P_base(Y_n = x)` on all base states up to `max_level`.
///
/// Fails unless the two chains have the same cotransitions.
pub fn recover_h<A, B>(base: &A, observed: &B, max_level: usize) -> Result<HarmonicFn<A::State>>
where
    A: GradedChain,
    B: GradedChain<State = A::State>,
    A::State: 'static,
{
    let laws_base = LevelLaws::new(base, max_level)?;
    let laws_obs = LevelLaws::new(observed, max_level)?;
    let report = compare_cotransitions(&laws_base, &laws_obs, max_level);
    if !report.is_clean() {
        return Err(Error::CotransitionMismatch { mismatches: report.failures.len() });
    }
    let mut values = BTreeMap::new();
    for n in 0..=max_level {
        for x in base.states_at(n) {
            let p = laws_base.probability(&x);
            if !p.is_positive() {
                return Err(Error::ZeroBaseProbability { state: describe(&x) });
            }
            values.insert(x.clone(), laws_obs.probability(&x) / p);
        }
    }
    Ok(HarmonicFn::tabulated(values, max_level))
}

/// Exact finite-horizon representation: `Σ_y K(x, y) P_h(Y_n = y)` against `h(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationReport {
    pub expected: ProbValue,
    pub observed: ProbValue,
}

impl RepresentationReport {
    pub fn passed(&self) -> bool {
        self.expected.matches(&self.observed)
    }

    pub fn residual(&self) -> ProbValue {
        &self.observed - &self.expected
    }
}

pub fn representation_check_exact<C>(
    base: &C,
    h: &HarmonicFn<C::State>,
    x: &C::State,
    n: usize,
) -> Result<RepresentationReport>
where
    C: GradedChain + Clone,
    C::State: 'static,
{
    let hx = h.eval(x);
    if !hx.is_positive() {
        return Err(Error::OutsideSupport { state: describe(x) });
    }
    let transformed = h_transform(base.clone(), h.clone())?;
    let base_laws = LevelLaws::new(base, n)?;
    let h_law = LevelLaws::new(&transformed, n)?;
    let row = base_laws.kernel_row(x, n)?;
    let observed: ProbValue = h_law
        .marginal(n)
        .iter()
        .map(|(y, p)| row.get(y).cloned().unwrap_or_else(ProbValue::zero) * p)
        .sum();
    Ok(RepresentationReport { expected: hx, observed })
}

/// Monte Carlo form: mean of `kernel(x, Y_n)` over trajectories of `P_h`, within
/// three standard errors of `h(x)`. The h-transform is sampled lazily, so `n`
/// may exceed the exact budget.
pub fn representation_check_mc<C, K>(
    base: &C,
    h: &HarmonicFn<C::State>,
    x: &C::State,
    n: usize,
    mc: McConfig,
    kernel: K,
) -> Result<StatisticalReport>
where
    C: GradedChain + Clone,
    C::State: 'static,
    K: Fn(&C::State, &C::State) -> f64 + Sync + Send,
{
    if !h.in_support(x) {
        return Err(Error::OutsideSupport { state: describe(x) });
    }
    let transformed = h_transform(base.clone(), h.clone())?;
    let values = mc.run(|_, rng| {
        let path = crate::chain::sample_path_with(&transformed, n, rng);
        kernel(x, path.last().expect("path has a root"))
    });
    let (estimate, std_error) = mean_and_std_error(&values);
    Ok(StatisticalReport {
        name: "representation".into(),
        expected: h.eval_f64(x),
        estimate,
        std_error,
        replicates: values.len(),
        z_limit: 3.0,
    })
}
