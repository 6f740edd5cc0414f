//! Closed forms for the uniform composition walk.
//!
//! For `x` at level `m` and `y ≥ x` at level `n`,
//!
//! ```text
//! K(x, y) = multinomial(n - m; y - x) d^{-(n-m)} / (multinomial(n; y) d^{-n})
//!         = d^m · Π_i y_i (y_i - 1) ... (y_i - x_i + 1) / (n (n - 1) ... (n - m + 1)).
//! ```
//!
//! Along `y_n / n → α` this tends to `d^m Π_i α_i^{x_i}`, the boundary kernel.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use statrs::function::gamma::ln_gamma;

use super::{Composition, SimplexPoint};
use crate::chain::LevelledState;
use crate::harmonic::HarmonicFn;
use crate::prob::ProbValue;

/// Levels below this are evaluated as exact rationals.
pub const EXACT_KERNEL_LEVEL_LIMIT: usize = 64;

/// Falling factorials longer than this switch from a summed log series to log-gamma.
const LOG_SERIES_LIMIT: u32 = 4096;

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `n! / (k_1! ... k_d!)` with `n = Σ k_i`.
pub fn multinomial(parts: &[u32]) -> BigUint {
    let n: u64 = parts.iter().map(|&k| k as u64).sum();
    parts.iter().fold(factorial(n), |acc, &k| acc / factorial(k as u64))
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Terms of `ln(a (a - 1) ... (a - k + 1))`.
fn ln_falling_terms(a: u32, k: u32) -> Box<dyn Iterator<Item = f64>> {
    if k <= LOG_SERIES_LIMIT {
        Box::new((0..k).map(move |t| ((a - t) as f64).ln()))
    } else {
        let v = ln_gamma(a as f64 + 1.0) - ln_gamma((a - k) as f64 + 1.0);
        Box::new(std::iter::once(v))
    }
}

fn dominates(x: &Composition, y: &Composition) -> bool {
    x.level() <= y.level() && x.dominated_by(y)
}

/// Martin kernel of the uniform `d`-part walk in closed form.
///
/// Exact below level [`EXACT_KERNEL_LEVEL_LIMIT`], float with relative error
/// around `1e-12` above. Zero unless `x ≤ y` coordinatewise.
pub fn closed_form_kernel(d: usize, x: &Composition, y: &Composition) -> ProbValue {
    if !dominates(x, y) {
        return ProbValue::zero();
    }
    let (m, n) = (x.level(), y.level());
    if n < EXACT_KERNEL_LEVEL_LIMIT {
        let diff: Vec<u32> = x.parts().iter().zip(y.parts()).map(|(a, b)| b - a).collect();
        let num = BigRational::from_integer((multinomial(&diff) * BigUint::from(d).pow(m as u32)).into());
        let den = BigRational::from_integer(multinomial(y.parts()).into());
        ProbValue::Exact(num / den)
    } else {
        ProbValue::Float(closed_form_kernel_f64(d, x, y))
    }
}

/// Float evaluation of [`closed_form_kernel`] at any level.
pub fn closed_form_kernel_f64(d: usize, x: &Composition, y: &Composition) -> f64 {
    if !dominates(x, y) {
        return 0.0;
    }
    let (m, n) = (x.level() as u32, y.level() as u32);
    let numerator = x.parts().iter().zip(y.parts()).flat_map(|(&xi, &yi)| ln_falling_terms(yi, xi));
    let denominator = ln_falling_terms(n, m).map(|t| -t);
    let scale = std::iter::once(m as f64 * (d as f64).ln());
    compensated_sum(scale.chain(numerator).chain(denominator)).exp()
}

/// Boundary kernel `K(x, α) = d^m Π_i α_i^{x_i}` with `0^0 = 1`.
pub fn boundary_kernel(x: &Composition, alpha: &SimplexPoint) -> ProbValue {
    let d = alpha.d();
    ProbValue::integer(d as u64).pow(x.level() as u32) * unscaled_boundary_kernel(x, alpha)
}

/// `Π_i α_i^{x_i}` without the `d^m` factor. For `d > 1` this is not harmonic
/// for the uniform walk; kept for comparison.
pub fn unscaled_boundary_kernel(x: &Composition, alpha: &SimplexPoint) -> ProbValue {
    x.parts().iter().zip(alpha.coords()).map(|(&k, a)| a.pow(k)).product()
}

/// `ln K(x, α)`, `-inf` when some `x_i > 0` meets `α_i = 0`.
pub fn ln_boundary_kernel(x: &Composition, alpha: &[f64]) -> f64 {
    let scale = x.level() as f64 * (alpha.len() as f64).ln();
    let mut terms = vec![scale];
    for (&k, &a) in x.parts().iter().zip(alpha) {
        if k > 0 {
            if a <= 0.0 {
                return f64::NEG_INFINITY;
            }
            terms.push(k as f64 * a.ln());
        }
    }
    compensated_sum(terms.into_iter())
}

/// `K(·, α)` as a harmonic function of the uniform walk.
pub fn boundary_kernel_fn(alpha: &SimplexPoint) -> HarmonicFn<Composition> {
    let exact_alpha = alpha.clone();
    let ln_alpha = alpha.to_f64s();
    let float_alpha = ln_alpha.clone();
    HarmonicFn::from_fn(move |x| boundary_kernel(x, &exact_alpha))
        .with_ln(move |x| ln_boundary_kernel(x, &ln_alpha))
        .with_float(move |x| ln_boundary_kernel(x, &float_alpha).exp())
}

/// Backward step of the uniform walk: `P(Y_n = y | Y_{n+1} = y + e_j) = (y_j + 1) / (n + 1)`.
pub fn polya_cotransition(y: &Composition, j: usize) -> ProbValue {
    ProbValue::ratio(y.parts()[j] as i64 + 1, y.level() as i64 + 1)
}
