use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::source::ExchangeableSource;
use crate::composition::SimplexPoint;
use crate::error::{Error, Result};
use crate::prob::ProbValue;
use crate::report::VerificationReport;

/// The first `K` binary digits `Ψ_1(x), ..., Ψ_K(x)` of a point of `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinaryDigits {
    digits: Vec<u8>,
}

impl BinaryDigits {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = digits.iter().find(|&&b| b > 1) {
            return Err(Error::Domain { value: format!("digit {bad}") });
        }
        Ok(Self { digits })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Position in `{0,1}^K` read big-endian, so the first digit is the most significant.
    pub fn index(&self) -> usize {
        self.digits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn from_index(index: usize, depth: usize) -> Self {
        Self { digits: (0..depth).rev().map(|i| ((index >> i) & 1) as u8).collect() }
    }
}

fn check_unit_interval(x: f64) -> Result<()> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain { value: x.to_string() })
    }
}

/// `Ψ_k(x) = ⌊2^k x⌋ - 2⌊2^{k-1} x⌋` for `k = 1, ..., K`. Dyadic points get their terminating expansion.
pub fn binary_digits(x: f64, k: usize) -> Result<BinaryDigits> {
    check_unit_interval(x)?;
    // Scaling by a power of two is exact, so each floor is exact as well.
    let digits = (1..=k as i32)
        .map(|i| ((2f64.powi(i) * x).floor() - 2.0 * (2f64.powi(i - 1) * x).floor()) as u8)
        .collect();
    Ok(BinaryDigits { digits })
}

/// Exact digits of a rational point of `[0, 1)`.
pub fn binary_digits_exact(x: &BigRational, k: usize) -> Result<BinaryDigits> {
    if x.is_negative() || *x >= BigRational::one() {
        return Err(Error::Domain { value: x.to_string() });
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let mut prev = BigInt::zero();
    let mut scaled = x.clone();
    let mut digits = Vec::with_capacity(k);
    for _ in 0..k {
        scaled = &scaled * &two;
        let floor = scaled.floor().to_integer();
        let digit: BigInt = &floor - &prev * 2;
        digits.push(if digit.is_zero() { 0 } else { 1 });
        prev = floor;
    }
    Ok(BinaryDigits { digits })
}

/// `Σ_k digits_k 2^{-k}`.
pub fn reconstruct_real(digits: &BinaryDigits) -> f64 {
    digits.digits.iter().enumerate().map(|(i, &b)| b as f64 * 0.5f64.powi(i as i32 + 1)).sum()
}

pub fn reconstruct_exact(digits: &BinaryDigits) -> ProbValue {
    digits
        .digits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(i, _)| ProbValue::Exact(BigRational::new(BigInt::one(), BigInt::one() << (i + 1))))
        .sum()
}

/// Replaces every `x_n` by its first `k` digits.
pub fn lift_sequence(xs: &[f64], k: usize) -> Result<Vec<BinaryDigits>> {
    xs.iter().map(|&x| binary_digits(x, k)).collect()
}

/// A probability vector over `{0,1}^depth`, indexed as in [`BinaryDigits::index`].
#[derive(Clone, Debug, PartialEq)]
pub struct CubeLaw {
    pub depth: usize,
    pub probs: Vec<ProbValue>,
}

impl CubeLaw {
    pub fn new(depth: usize, probs: Vec<ProbValue>) -> Result<Self> {
        if probs.len() != 1 << depth {
            return Err(Error::MalformedLaw(format!("{} entries for depth {depth}", probs.len())));
        }
        if probs.iter().any(ProbValue::is_negative) {
            return Err(Error::MalformedLaw("negative probability".into()));
        }
        let total: ProbValue = probs.iter().sum();
        if !total.matches(&ProbValue::one()) {
            return Err(Error::MalformedLaw(format!("total mass {total}")));
        }
        Ok(Self { depth, probs })
    }

    pub fn uniform(depth: usize) -> Self {
        let n = 1i64 << depth;
        Self { depth, probs: vec![ProbValue::ratio(1, n); n as usize] }
    }

    pub fn point_mass(digits: &BinaryDigits) -> Self {
        let mut probs = vec![ProbValue::zero(); 1 << digits.len()];
        probs[digits.index()] = ProbValue::one();
        Self { depth: digits.len(), probs }
    }

    pub fn probability(&self, digits: &BinaryDigits) -> ProbValue {
        self.probs[digits.index()].clone()
    }

    /// Push-forward under dropping the last digit.
    pub fn project(&self) -> Result<CubeLaw> {
        if self.depth == 0 {
            return Err(Error::MalformedLaw("cannot project depth 0".into()));
        }
        let probs = self.probs.chunks(2).map(|pair| &pair[0] + &pair[1]).collect();
        Ok(CubeLaw { depth: self.depth - 1, probs })
    }

    pub fn as_simplex_point(&self) -> Result<SimplexPoint> {
        SimplexPoint::new(self.probs.clone())
    }
}

/// Checks that `law_k` is the projection of `law_kplus1`.
pub fn projection_consistency_check(law_kplus1: &CubeLaw, law_k: &CubeLaw) -> Result<VerificationReport> {
    if law_kplus1.depth != law_k.depth + 1 {
        return Err(Error::MalformedLaw(format!("depths {} and {}", law_kplus1.depth, law_k.depth)));
    }
    let projected = law_kplus1.project()?;
    let mut report = VerificationReport::new("projection-consistency");
    for (i, (p, q)) in projected.probs.iter().zip(&law_k.probs).enumerate() {
        report.compare(|| format!("{:?}", BinaryDigits::from_index(i, law_k.depth).digits()), p.clone(), q.clone());
    }
    Ok(report)
}

/// A finitely supported probability measure on `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    pub points: Vec<ProbValue>,
    pub weights: Vec<ProbValue>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<ProbValue>, weights: Vec<ProbValue>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidSource("points and weights must be non-empty and of equal length".into()));
        }
        for p in &points {
            if p.is_negative() || *p >= ProbValue::one() {
                return Err(Error::Domain { value: p.to_string() });
            }
        }
        let total: ProbValue = weights.iter().sum();
        if weights.iter().any(ProbValue::is_negative) || !total.matches(&ProbValue::one()) {
            return Err(Error::InvalidSource(format!("weights must be non-negative and sum to 1, got {total}")));
        }
        Ok(Self { points, weights })
    }

    pub fn dirac(point: ProbValue) -> Result<Self> {
        Self::new(vec![point], vec![ProbValue::one()])
    }

    fn digits_of(point: &ProbValue, k: usize) -> Result<BinaryDigits> {
        match point {
            ProbValue::Exact(r) => binary_digits_exact(r, k),
            ProbValue::Float(x) => binary_digits(*x, k),
        }
    }

    /// Law of the first `k` digits of a point drawn from this measure.
    pub fn digit_law(&self, k: usize) -> Result<CubeLaw> {
        let mut probs = vec![ProbValue::zero(); 1 << k];
        for (p, w) in self.points.iter().zip(&self.weights) {
            let i = Self::digits_of(p, k)?.index();
            probs[i] = &probs[i] + w;
        }
        Ok(CubeLaw { depth: k, probs })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.points[pick(&self.weights, rng)].to_f64()
    }
}

fn pick<R: Rng + ?Sized>(weights: &[ProbValue], rng: &mut R) -> usize {
    let u = rng.random::<f64>();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.iter().enumerate() {
        let w = w.to_f64();
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// An exchangeable sequence on `[0, 1)`: pick measure `i` with probability `w_i`,
/// then draw i.i.d. from it.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMixtureSource {
    pub measures: Vec<DiscreteMeasure>,
    pub weights: Vec<ProbValue>,
}

impl RealMixtureSource {
    pub fn new(measures: Vec<DiscreteMeasure>, weights: Vec<ProbValue>) -> Result<Self> {
        let total: ProbValue = weights.iter().sum();
        if measures.is_empty() || measures.len() != weights.len() {
            return Err(Error::InvalidSource("measures and weights must be non-empty and of equal length".into()));
        }
        if weights.iter().any(ProbValue::is_negative) || !total.matches(&ProbValue::one()) {
            return Err(Error::InvalidSource(format!("weights must be non-negative and sum to 1, got {total}")));
        }
        Ok(Self { measures, weights })
    }

    /// The digit sequence at depth `k`, as a source over `2^k` symbols.
    pub fn lifted_source(&self, k: usize) -> Result<ExchangeableSource> {
        let atoms = self.measures.iter().map(|m| m.digit_law(k)?.as_simplex_point()).collect::<Result<Vec<_>>>()?;
        ExchangeableSource::mixture(atoms, self.weights.clone())
    }

    /// Directing measure of the lifted sequence at depth `k`, one cube law per mixture component.
    pub fn digit_laws(&self, k: usize) -> Result<Vec<CubeLaw>> {
        self.measures.iter().map(|m| m.digit_law(k)).collect()
    }

    pub fn sample_sequence<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let m = &self.measures[pick(&self.weights, rng)];
        (0..n).map(|_| m.sample(rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definetti::{exchangeability_check, source_cylinder_law};

    fn digits(v: &[u8]) -> BinaryDigits {
        BinaryDigits::new(v.to_vec()).unwrap()
    }

    #[test]
    fn digit_examples() {
        assert_eq!(binary_digits(0.0, 5).unwrap(), digits(&[0; 5]));
        assert_eq!(binary_digits(0.625, 4).unwrap(), digits(&[1, 0, 1, 0]));
        assert_eq!(binary_digits(1.0 / 3.0, 4).unwrap(), digits(&[0, 1, 0, 1]));
        assert_eq!(binary_digits(0.5, 3).unwrap(), digits(&[1, 0, 0]));
        assert!(binary_digits(1.0, 3).is_err());
        assert!(binary_digits(-0.1, 3).is_err());
        assert!(binary_digits(f64::NAN, 3).is_err());
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(binary_digits_exact(&third, 6).unwrap(), digits(&[0, 1, 0, 1, 0, 1]));
    }

    #[test]
    fn reconstruction() {
        assert_eq!(reconstruct_real(&digits(&[0, 0])), 0.0);
        assert_eq!(reconstruct_real(&digits(&[1, 0, 1])), 0.625);
        assert_eq!(reconstruct_exact(&digits(&[1, 0, 1])), ProbValue::ratio(5, 8));
    }

    #[test]
    fn lifting() {
        assert_eq!(lift_sequence(&[0.625, 0.3], 1).unwrap(), vec![digits(&[1]), digits(&[0])]);
        assert_eq!(lift_sequence(&[0.625], 2).unwrap(), vec![digits(&[1, 0])]);
        assert!(lift_sequence(&[0.2, 1.5], 2).is_err());
    }

    #[test]
    fn index_roundtrip() {
        for i in 0..16 {
            assert_eq!(BinaryDigits::from_index(i, 4).index(), i);
        }
        assert_eq!(digits(&[1, 0, 1]).index(), 5);
    }

    #[test]
    fn projections() {
        let u3 = CubeLaw::uniform(3);
        assert!(projection_consistency_check(&u3, &CubeLaw::uniform(2)).unwrap().is_clean());

        let delta = DiscreteMeasure::dirac(ProbValue::ratio(5, 8)).unwrap();
        let m3 = delta.digit_law(3).unwrap();
        let m2 = delta.digit_law(2).unwrap();
        assert_eq!(m3, CubeLaw::point_mass(&digits(&[1, 0, 1])));
        assert_eq!(m2, CubeLaw::point_mass(&digits(&[1, 0])));
        assert!(projection_consistency_check(&m3, &m2).unwrap().is_clean());

        let mut perturbed = CubeLaw::uniform(2);
        perturbed.probs[0] = ProbValue::ratio(1, 8);
        perturbed.probs[1] = ProbValue::ratio(3, 8);
        assert!(!projection_consistency_check(&u3, &perturbed).unwrap().is_clean());
        assert!(CubeLaw::new(1, vec![ProbValue::ratio(1, 2)]).is_err());
    }

    #[test]
    fn lifted_mixture_is_exchangeable() {
        let a = DiscreteMeasure::new(
            vec![ProbValue::ratio(1, 8), ProbValue::ratio(5, 8)],
            vec![ProbValue::ratio(1, 3), ProbValue::ratio(2, 3)],
        )
        .unwrap();
        let b = DiscreteMeasure::dirac(ProbValue::ratio(3, 4)).unwrap();
        let source = RealMixtureSource::new(vec![a, b], vec![ProbValue::ratio(1, 2), ProbValue::ratio(1, 2)]).unwrap();
        let lifted = source.lifted_source(2).unwrap();
        let law = source_cylinder_law(&lifted, 3).unwrap();
        assert!(exchangeability_check(&law).is_clean());
    }
}
