//! Weak compositions with `d` parts and the walks built on them.
//!
//! Level `n` holds every `x ∈ N_0^d` with `x_1 + ... + x_d = n`. The uniform
//! walk adds a uniformly chosen unit vector at each step; its Martin boundary
//! is the probability simplex, and conditioning on a boundary point `α` gives
//! the walk with step law `α`.

mod convergence;
mod kernel;
mod walk;

use std::fmt;

pub use convergence::{
    boundary_limit, boundary_limit_with_window, dm_convergence_check, kernel_limit_row, lattice_point, BoundaryEstimate,
    ConvergenceConfig, ConvergenceReport, KernelLimitRow, ProbeOscillation,
};
pub use kernel::{
    boundary_kernel, boundary_kernel_fn, closed_form_kernel, closed_form_kernel_f64, ln_boundary_kernel,
    multinomial, polya_cotransition, unscaled_boundary_kernel, EXACT_KERNEL_LEVEL_LIMIT,
};
pub use walk::{alpha_walk, uniform_walk, CompositionWalk, DEFAULT_LEVEL_BUDGET};

use crate::chain::LevelledState;
use crate::error::{Error, Result};
use crate::prob::ProbValue;

/// A weak composition `(x_1, ..., x_d)`; its level is the coordinate sum.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Self {
        Composition(parts)
    }

    pub fn zero(d: usize) -> Self {
        Composition(vec![0; d])
    }

    /// Unit vector `e_j` (0-based `j`).
    pub fn unit(d: usize, j: usize) -> Self {
        let mut parts = vec![0; d];
        parts[j] = 1;
        Composition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }

    /// `self + e_j`.
    pub fn plus(&self, j: usize) -> Self {
        let mut parts = self.0.clone();
        parts[j] += 1;
        Composition(parts)
    }

    /// `self - e_j`, if that stays non-negative.
    pub fn minus(&self, j: usize) -> Option<Self> {
        let mut parts = self.0.clone();
        parts[j] = parts[j].checked_sub(1)?;
        Some(Composition(parts))
    }

    /// Coordinatewise `self ≤ other`.
    pub fn dominated_by(&self, other: &Composition) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// The direction `j` with `other = self + e_j`, if any.
    pub fn step_to(&self, other: &Composition) -> Option<usize> {
        if other.level() != self.level() + 1 || !self.dominated_by(other) {
            return None;
        }
        self.0.iter().zip(&other.0).position(|(a, b)| a != b)
    }

    /// All weak compositions of `n` into `d` parts, ascending lexicographic order.
    pub fn enumerate(d: usize, n: usize) -> Vec<Composition> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(d);
        fill(d, n as u32, &mut current, &mut out);
        out
    }

    /// Number of weak compositions, `C(n + d - 1, d - 1)`.
    pub fn count(d: usize, n: usize) -> u128 {
        if d == 0 {
            return u128::from(n == 0);
        }
        let (top, k) = ((n + d - 1) as u128, (d - 1) as u128);
        (0..k).fold(1u128, |acc, i| acc * (top - i) / (i + 1))
    }
}

fn fill(d: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Composition>) {
    if current.len() + 1 == d {
        current.push(remaining);
        out.push(Composition(current.clone()));
        current.pop();
        return;
    }
    if d == 0 {
        if remaining == 0 {
            out.push(Composition(Vec::new()));
        }
        return;
    }
    for first in 0..=remaining {
        current.push(first);
        fill(d, remaining - first, current, out);
        current.pop();
    }
}

impl LevelledState for Composition {
    fn level(&self) -> usize {
        self.0.iter().map(|&v| v as usize).sum()
    }
}

impl fmt::Debug for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for Composition {
    fn from(parts: Vec<u32>) -> Self {
        Composition(parts)
    }
}

impl<const N: usize> From<[u32; N]> for Composition {
    fn from(parts: [u32; N]) -> Self {
        Composition(parts.to_vec())
    }
}

/// A point of the probability simplex `S(d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint {
    coords: Vec<ProbValue>,
}

impl SimplexPoint {
    pub fn new(coords: Vec<ProbValue>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidSimplex("no coordinates".into()));
        }
        if let Some(c) = coords.iter().find(|c| c.is_negative()) {
            return Err(Error::InvalidSimplex(format!("negative coordinate {c}")));
        }
        let total: ProbValue = coords.iter().sum();
        if !total.matches(&ProbValue::one()) {
            return Err(Error::InvalidSimplex(format!("coordinates sum to {total}")));
        }
        Ok(Self { coords })
    }

    /// Parses each coordinate as an exact rational (`"7/10"` or `"0.7"`).
    pub fn parse<S: AsRef<str>>(coords: &[S]) -> Result<Self> {
        let values = coords.iter().map(|c| ProbValue::parse_exact(c.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn from_f64s(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| ProbValue::float(c)).collect())
    }

    pub fn uniform(d: usize) -> Self {
        Self { coords: vec![ProbValue::ratio(1, d as i64); d] }
    }

    pub fn d(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[ProbValue] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &ProbValue {
        &self.coords[i]
    }

    pub fn is_exact(&self) -> bool {
        self.coords.iter().all(ProbValue::is_exact)
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.coords.iter().map(ProbValue::to_f64).collect()
    }

    /// Sup-norm distance between the float images of two points.
    pub fn distance(&self, other: &SimplexPoint) -> f64 {
        self.to_f64s().iter().zip(other.to_f64s()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
