use statrs::distribution::{Beta, ContinuousCDF};

use super::counting::counting_chain_path;
use super::source::{all_sequences, source_cylinder_law, ExchangeableSource, SequenceSource};
use crate::composition::{boundary_limit, Composition, SimplexPoint};
use crate::error::{Error, Result};
use crate::mc::McConfig;
use crate::prob::ProbValue;
use crate::report::{mean_and_std_error, StatisticalReport, VerificationReport};

/// Monte Carlo sample of the directing measure: `Y_n / n` for each replicate.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectingEstimate {
    pub samples: Vec<SimplexPoint>,
    pub horizon: usize,
    pub replicates: usize,
}

impl DirectingEstimate {
    /// Coordinate `j` of every sample.
    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.coord(j).to_f64()).collect()
    }

    pub fn d(&self) -> usize {
        self.samples.first().map_or(0, SimplexPoint::d)
    }
}

/// Samples `horizon` symbols per replicate and reads off the boundary limit of the counting path.
pub fn estimate_directing_measure<S: SequenceSource>(source: &S, horizon: usize, mc: McConfig) -> Result<DirectingEstimate> {
    if horizon == 0 {
        return Err(Error::EmptyPath);
    }
    let d = source.alphabet_size();
    let samples = mc.run(|_, rng| {
        let seq = source.sample_sequence(horizon, rng);
        let mut counts = vec![0u32; d];
        for &s in &seq {
            counts[s] += 1;
        }
        boundary_limit(&[Composition::new(counts)]).map(|e| e.point)
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(DirectingEstimate { samples, horizon, replicates: mc.replicates })
}

/// Empirical directing measure of one sampled sequence, via the full counting path.
pub fn path_boundary_limit(d: usize, seq: &[usize]) -> Result<SimplexPoint> {
    Ok(boundary_limit(&counting_chain_path(d, seq)?)?.point)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub atom: SimplexPoint,
    pub count: usize,
    pub weight: f64,
    /// Coordinatewise mean of the samples assigned to this atom.
    pub mean: Vec<f64>,
    /// Sup-norm distance from `mean` to the atom.
    pub mean_distance: f64,
    pub max_distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterSummary {
    pub clusters: Vec<Cluster>,
    /// Sup-norm distance from each sample to its nearest atom, in sample order.
    pub distances: Vec<f64>,
}

impl ClusterSummary {
    /// Share of samples within `tol` of their nearest atom.
    pub fn fraction_within(&self, tol: f64) -> f64 {
        if self.distances.is_empty() {
            return 0.0;
        }
        self.distances.iter().filter(|&&r| r <= tol).count() as f64 / self.distances.len() as f64
    }
}

/// Assigns each sample to its nearest atom (ties go to the lower index).
pub fn cluster_summary(estimate: &DirectingEstimate, atoms: &[SimplexPoint]) -> ClusterSummary {
    let mut clusters: Vec<Cluster> = atoms
        .iter()
        .map(|a| Cluster { atom: a.clone(), count: 0, weight: 0.0, mean: vec![0.0; a.d()], mean_distance: 0.0, max_distance: 0.0 })
        .collect();
    let mut distances = Vec::with_capacity(estimate.samples.len());
    for s in &estimate.samples {
        let Some((best, dist)) =
            atoms.iter().map(|a| s.distance(a)).enumerate().fold(None, |acc: Option<(usize, f64)>, (i, r)| match acc {
                Some((_, b)) if b <= r => acc,
                _ => Some((i, r)),
            })
        else {
            break;
        };
        let c = &mut clusters[best];
        c.count += 1;
        c.max_distance = c.max_distance.max(dist);
        for (m, v) in c.mean.iter_mut().zip(s.to_f64s()) {
            *m += v;
        }
        distances.push(dist);
    }
    let total = estimate.samples.len().max(1) as f64;
    for c in &mut clusters {
        if c.count > 0 {
            c.mean.iter_mut().for_each(|m| *m /= c.count as f64);
            let atom = c.atom.to_f64s();
            c.mean_distance = c.mean.iter().zip(&atom).map(|(m, a)| (m - a).abs()).fold(0.0, f64::max);
        } else {
            c.mean_distance = f64::INFINITY;
        }
        c.weight = c.count as f64 / total;
    }
    ClusterSummary { clusters, distances }
}

/// Kolmogorov-Smirnov distance `sup_t |F_n(t) - F(t)|` between the empirical CDF of `samples` and `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |acc, (i, &t)| {
        let f = cdf(t);
        acc.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// CDF of coordinate `j` of the Dirichlet directing measure of a Pólya urn, a Beta law.
pub fn polya_marginal_cdf(counts: &[u64], j: usize) -> Result<impl Fn(f64) -> f64> {
    let a = *counts.get(j).ok_or(Error::OutOfAlphabet { symbol: j, alphabet: counts.len() })? as f64;
    let total: u64 = counts.iter().sum();
    let b = (total as f64) - a;
    if b <= 0.0 {
        return Err(Error::InvalidSource("Pólya marginal needs at least two colours".into()));
    }
    let beta = Beta::new(a, b).map_err(|e| Error::InvalidSource(e.to_string()))?;
    Ok(move |t: f64| beta.cdf(t.clamp(0.0, 1.0)))
}

/// Sample means of the coordinates against the Dirichlet means `a_j / Σ a`.
pub fn polya_moment_check(estimate: &DirectingEstimate, counts: &[u64]) -> Vec<StatisticalReport> {
    let total: u64 = counts.iter().sum();
    (0..counts.len())
        .map(|j| {
            let (mean, se) = mean_and_std_error(&estimate.coordinate(j));
            StatisticalReport {
                name: format!("mean of coordinate {j}"),
                expected: counts[j] as f64 / total as f64,
                estimate: mean,
                std_error: se,
                replicates: estimate.replicates,
                z_limit: 3.0,
            }
        })
        .collect()
}

/// A directing law to test the mixture identity against.
#[derive(Clone, Debug, PartialEq)]
pub enum DirectingLaw {
    Atoms { atoms: Vec<SimplexPoint>, weights: Vec<ProbValue> },
    /// Dirichlet law with integer parameters.
    Dirichlet { alpha: Vec<u64> },
    Estimated(DirectingEstimate),
}

impl DirectingLaw {
    /// The known directing law of a source.
    pub fn of(source: &ExchangeableSource) -> Self {
        match source {
            ExchangeableSource::Mixture { atoms, weights } => {
                DirectingLaw::Atoms { atoms: atoms.clone(), weights: weights.clone() }
            }
            ExchangeableSource::Polya { counts } => DirectingLaw::Dirichlet { alpha: counts.clone() },
        }
    }

    /// `∫ Π_k μ(s_k) M(dμ)`, exact for atoms and Dirichlet laws.
    pub fn moment(&self, seq: &[usize]) -> Option<ProbValue> {
        match self {
            DirectingLaw::Atoms { atoms, weights } => Some(
                atoms
                    .iter()
                    .zip(weights)
                    .map(|(mu, w)| w * seq.iter().map(|&s| mu.coord(s)).product::<ProbValue>())
                    .sum(),
            ),
            DirectingLaw::Dirichlet { alpha } => {
                let mut c = vec![0u64; alpha.len()];
                for &s in seq {
                    c[s] += 1;
                }
                let rising = |a: u64, k: u64| (0..k).map(|t| ProbValue::integer(a + t)).product::<ProbValue>();
                let num: ProbValue = alpha.iter().zip(&c).map(|(&a, &k)| rising(a, k)).product();
                Some(num / rising(alpha.iter().sum(), seq.len() as u64))
            }
            DirectingLaw::Estimated(_) => None,
        }
    }
}

/// Outcome of [`definetti_identity_check`]: exact comparisons for known laws,
/// z-tests for estimated ones.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub exact: VerificationReport,
    pub statistical: Vec<StatisticalReport>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.exact.is_clean() && self.statistical.iter().all(StatisticalReport::passed)
    }
}

/// Compares every cylinder probability of length `k` with the mixture integral under `law`.
pub fn definetti_identity_check<S: SequenceSource>(source: &S, law: &DirectingLaw, k: usize) -> Result<IdentityReport> {
    let exact_law = source_cylinder_law(source, k)?;
    let mut exact = VerificationReport::new("definetti-identity");
    let mut statistical = Vec::new();
    match law {
        DirectingLaw::Estimated(est) => {
            for seq in all_sequences(source.alphabet_size(), k) {
                let values: Vec<f64> =
                    est.samples.iter().map(|mu| seq.iter().map(|&s| mu.coord(s).to_f64()).product()).collect();
                let (mean, se) = mean_and_std_error(&values);
                statistical.push(StatisticalReport {
                    name: format!("{seq:?}"),
                    expected: exact_law.probability(&seq).to_f64(),
                    estimate: mean,
                    std_error: se,
                    replicates: est.replicates,
                    z_limit: 3.0,
                });
            }
        }
        _ => {
            for (seq, p) in &exact_law.atoms {
                let integral = law.moment(seq).expect("known law");
                exact.compare(|| format!("{seq:?}"), p.clone(), integral);
            }
        }
    }
    Ok(IdentityReport { exact, statistical })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_atom() -> ExchangeableSource {
        ExchangeableSource::mixture(
            vec![SimplexPoint::parse(&["1/5", "4/5"]).unwrap(), SimplexPoint::parse(&["3/5", "2/5"]).unwrap()],
            vec![ProbValue::ratio(1, 2), ProbValue::ratio(1, 2)],
        )
        .unwrap()
    }

    #[test]
    fn ks_distance_examples() {
        assert_eq!(ks_distance(&[0.5], |t| t), 0.5);
        let grid: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_distance(&grid, |t| t) - 0.005).abs() < 1e-12);
    }

    #[test]
    fn beta_one_one_is_uniform() {
        let cdf = polya_marginal_cdf(&[1, 1], 0).unwrap();
        for t in [0.0, 0.1, 0.5, 0.93, 1.0] {
            assert!((cdf(t) - t).abs() < 1e-12);
        }
        let cdf = polya_marginal_cdf(&[2, 1], 0).unwrap();
        assert!((cdf(0.5) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn known_laws_satisfy_the_identity_exactly() {
        for source in [two_atom(), ExchangeableSource::polya(vec![1, 1]).unwrap(), ExchangeableSource::polya(vec![2, 1, 1]).unwrap()] {
            let report = definetti_identity_check(&source, &DirectingLaw::of(&source), 4).unwrap();
            assert!(report.passed(), "{:?}", report.exact);
        }
        let urn = DirectingLaw::Dirichlet { alpha: vec![1, 1] };
        assert_eq!(urn.moment(&[0, 0]), Some(ProbValue::ratio(1, 3)));
    }

    #[test]
    fn wrong_law_fails_the_identity() {
        let urn = ExchangeableSource::polya(vec![1, 1]).unwrap();
        let wrong = DirectingLaw::Atoms { atoms: vec![SimplexPoint::uniform(2)], weights: vec![ProbValue::one()] };
        assert!(!definetti_identity_check(&urn, &wrong, 2).unwrap().passed());
    }

    #[test]
    fn small_estimate_is_reproducible() {
        let mc = McConfig::new(50, 3);
        let a = estimate_directing_measure(&two_atom(), 500, mc).unwrap();
        let b = estimate_directing_measure(&two_atom(), 500, mc.with_workers(1)).unwrap();
        assert_eq!(a, b);
        let summary = cluster_summary(&a, &two_atom_atoms());
        assert_eq!(summary.clusters.iter().map(|c| c.count).sum::<usize>(), 50);
        assert!(summary.fraction_within(0.1) > 0.9);
    }

    fn two_atom_atoms() -> Vec<SimplexPoint> {
        vec![SimplexPoint::parse(&["1/5", "4/5"]).unwrap(), SimplexPoint::parse(&["3/5", "2/5"]).unwrap()]
    }

    #[test]
    fn path_limit_agrees_with_counts() {
        let p = path_boundary_limit(2, &[0, 1, 1, 1]).unwrap();
        assert_eq!(p.to_f64s(), vec![0.25, 0.75]);
    }
}
