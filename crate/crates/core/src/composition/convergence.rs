use super::{closed_form_kernel_f64, Composition, SimplexPoint};
use crate::chain::LevelledState;
use crate::error::{Error, Result};

/// `Y_n / n` at the end of a path, with the spread of `Y_k / k` over the trailing window.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryEstimate {
    pub point: SimplexPoint,
    /// Largest coordinate range of `Y_k / k` over the window.
    pub oscillation: f64,
    /// Number of states in the window.
    pub window: usize,
}

fn window_len(len: usize, fraction: f64) -> usize {
    ((len as f64 * fraction).ceil() as usize).clamp(1, len)
}

/// Boundary estimate with a trailing window of the last 20% of the path.
pub fn boundary_limit(path: &[Composition]) -> Result<BoundaryEstimate> {
    boundary_limit_with_window(path, 0.2)
}

pub fn boundary_limit_with_window(path: &[Composition], window_fraction: f64) -> Result<BoundaryEstimate> {
    let last = path.last().ok_or(Error::EmptyPath)?;
    let n = last.level();
    if n == 0 {
        return Err(Error::EmptyPath);
    }
    let coords: Vec<f64> = last.parts().iter().map(|&v| v as f64 / n as f64).collect();
    let point = SimplexPoint::from_f64s(&coords)?;
    let tail = &path[path.len() - window_len(path.len(), window_fraction)..];
    let d = last.d();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    let mut window = 0;
    for state in tail.iter().filter(|s| s.level() > 0) {
        window += 1;
        let level = state.level() as f64;
        for (i, &v) in state.parts().iter().enumerate() {
            let r = v as f64 / level;
            lo[i] = lo[i].min(r);
            hi[i] = hi[i].max(r);
        }
    }
    let oscillation = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
    Ok(BoundaryEstimate { point, oscillation, window })
}

/// Tolerance and trailing-window share for [`dm_convergence_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub tol: f64,
    pub window_fraction: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self { tol: 1e-3, window_fraction: 0.2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeOscillation {
    pub probe: Composition,
    /// Range of `K(probe, y_k)` over the trailing window.
    pub oscillation: f64,
    pub last_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub probes: Vec<ProbeOscillation>,
}

/// Doob-Martin convergence test: the sequence converges when `K(x, y_k)`
/// settles for every probe `x`. Settling is judged by the range of the kernel
/// over the trailing window.
pub fn dm_convergence_check(states: &[Composition], probes: &[Composition], config: ConvergenceConfig) -> ConvergenceReport {
    if states.is_empty() {
        return ConvergenceReport { converged: false, probes: Vec::new() };
    }
    let tail = &states[states.len() - window_len(states.len(), config.window_fraction)..];
    let probes: Vec<ProbeOscillation> = probes
        .iter()
        .map(|x| {
            let values: Vec<f64> = tail.iter().map(|y| closed_form_kernel_f64(x.d(), x, y)).collect();
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            ProbeOscillation { probe: x.clone(), oscillation: hi - lo, last_value: *values.last().expect("nonempty") }
        })
        .collect();
    let converged = probes.iter().all(|p| p.oscillation <= config.tol);
    ConvergenceReport { converged, probes }
}

/// The level-`n` composition nearest to `n α` (largest-remainder rounding).
pub fn lattice_point(alpha: &[f64], n: u32) -> Composition {
    let scaled: Vec<f64> = alpha.iter().map(|a| a * n as f64).collect();
    let mut parts: Vec<u32> = scaled.iter().map(|v| v.floor() as u32).collect();
    let assigned: u32 = parts.iter().sum();
    let mut order: Vec<usize> = (0..alpha.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned) as usize) {
        parts[i] += 1;
    }
    Composition::new(parts)
}

/// Distance `|K(x, round(nα)) - K(x, α)|` at a run of increasing levels.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelLimitRow {
    pub probe: Composition,
    pub limit: f64,
    /// `(n, error)` in the order the levels were given.
    pub errors: Vec<(u32, f64)>,
}

impl KernelLimitRow {
    pub fn final_error(&self) -> f64 {
        self.errors.last().map(|e| e.1).unwrap_or(f64::NAN)
    }

    /// Errors never grow; a tie counts only once both sides are below `1e-12`.
    pub fn decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1].1 < w[0].1 || (w[1].1 <= 1e-12 && w[0].1 <= 1e-12))
    }
}

pub fn kernel_limit_row(x: &Composition, alpha: &SimplexPoint, levels: &[u32]) -> KernelLimitRow {
    let a = alpha.to_f64s();
    let limit = super::ln_boundary_kernel(x, &a).exp();
    let errors = levels
        .iter()
        .map(|&n| (n, (closed_form_kernel_f64(x.d(), x, &lattice_point(&a, n)) - limit).abs()))
        .collect();
    KernelLimitRow { probe: x.clone(), limit, errors }
}
