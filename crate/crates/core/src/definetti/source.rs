use std::collections::BTreeMap;

use rand::Rng;

use crate::chain::DEFAULT_ATOM_BUDGET;
use crate::composition::SimplexPoint;
use crate::error::{Error, Result};
use crate::prob::ProbValue;
use crate::report::VerificationReport;

/// A law of (finite prefixes of) an infinite sequence over `{0, ..., d-1}`.
pub trait SequenceSource: Sync {
    fn alphabet_size(&self) -> usize;

    /// `P(X_1 = s_1, ..., X_n = s_n)`.
    fn sequence_probability(&self, seq: &[usize]) -> ProbValue;

    fn sample_sequence<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize>;
}

fn categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
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

/// Exchangeable laws with exact cylinder probabilities and a known directing measure.
#[derive(Clone, Debug, PartialEq)]
pub enum ExchangeableSource {
    /// `Σ_i w_i μ_i^{⊗N}`: draw an atom with probability `w_i`, then i.i.d. from it.
    Mixture { atoms: Vec<SimplexPoint>, weights: Vec<ProbValue> },
    /// Pólya urn with the given initial counts; each draw returns the ball plus one more of its colour.
    Polya { counts: Vec<u64> },
}

impl ExchangeableSource {
    pub fn mixture(atoms: Vec<SimplexPoint>, weights: Vec<ProbValue>) -> Result<Self> {
        let d = atoms.first().map(SimplexPoint::d).ok_or_else(|| Error::InvalidSource("no atoms".into()))?;
        if atoms.len() != weights.len() {
            return Err(Error::InvalidSource(format!("{} atoms but {} weights", atoms.len(), weights.len())));
        }
        if atoms.iter().any(|a| a.d() != d) {
            return Err(Error::InvalidSource("atoms of different dimension".into()));
        }
        if weights.iter().any(ProbValue::is_negative) {
            return Err(Error::InvalidSource("negative weight".into()));
        }
        let total: ProbValue = weights.iter().sum();
        if !total.matches(&ProbValue::one()) {
            return Err(Error::InvalidSource(format!("weights sum to {total}")));
        }
        Ok(ExchangeableSource::Mixture { atoms, weights })
    }

    pub fn single_atom(mu: SimplexPoint) -> Self {
        ExchangeableSource::Mixture { atoms: vec![mu], weights: vec![ProbValue::one()] }
    }

    pub fn polya(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() || counts.contains(&0) {
            return Err(Error::InvalidSource("urn counts must be positive".into()));
        }
        Ok(ExchangeableSource::Polya { counts })
    }
}

impl SequenceSource for ExchangeableSource {
    fn alphabet_size(&self) -> usize {
        match self {
            ExchangeableSource::Mixture { atoms, .. } => atoms[0].d(),
            ExchangeableSource::Polya { counts } => counts.len(),
        }
    }

    fn sequence_probability(&self, seq: &[usize]) -> ProbValue {
        match self {
            ExchangeableSource::Mixture { atoms, weights } => atoms
                .iter()
                .zip(weights)
                .map(|(mu, w)| w * seq.iter().map(|&s| mu.coord(s)).product::<ProbValue>())
                .sum(),
            ExchangeableSource::Polya { counts } => {
                let mut urn = counts.clone();
                let mut total: u64 = counts.iter().sum();
                let mut p = ProbValue::one();
                for &s in seq {
                    p = p * ProbValue::ratio(urn[s] as i64, total as i64);
                    urn[s] += 1;
                    total += 1;
                }
                p
            }
        }
    }

    fn sample_sequence<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        match self {
            ExchangeableSource::Mixture { atoms, weights } => {
                let w: Vec<f64> = weights.iter().map(ProbValue::to_f64).collect();
                let mu = atoms[categorical(&w, rng)].to_f64s();
                (0..n).map(|_| categorical(&mu, rng)).collect()
            }
            ExchangeableSource::Polya { counts } => {
                let mut urn: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
                (0..n)
                    .map(|_| {
                        let s = categorical(&urn, rng);
                        urn[s] += 1.0;
                        s
                    })
                    .collect()
            }
        }
    }
}

/// A Markov chain on the alphabet. Exchangeable only in degenerate cases; it
/// serves as a negative control for the counting-chain checks.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovSource {
    pub initial: Vec<ProbValue>,
    pub rows: Vec<Vec<ProbValue>>,
}

impl MarkovSource {
    pub fn new(initial: Vec<ProbValue>, rows: Vec<Vec<ProbValue>>) -> Result<Self> {
        let d = initial.len();
        let stochastic = |v: &[ProbValue]| {
            v.len() == d && !v.iter().any(ProbValue::is_negative) && v.iter().sum::<ProbValue>().matches(&ProbValue::one())
        };
        if d == 0 || rows.len() != d || !stochastic(&initial) || !rows.iter().all(|r| stochastic(r)) {
            return Err(Error::InvalidSource("Markov source needs a stochastic initial law and matrix".into()));
        }
        Ok(Self { initial, rows })
    }

    /// Two-symbol chain that tends to repeat its last symbol.
    pub fn sticky_binary() -> Self {
        let half = ProbValue::ratio(1, 2);
        Self::new(
            vec![half.clone(), half],
            vec![
                vec![ProbValue::ratio(9, 10), ProbValue::ratio(1, 10)],
                vec![ProbValue::ratio(2, 5), ProbValue::ratio(3, 5)],
            ],
        )
        .expect("valid chain")
    }
}

impl SequenceSource for MarkovSource {
    fn alphabet_size(&self) -> usize {
        self.initial.len()
    }

    fn sequence_probability(&self, seq: &[usize]) -> ProbValue {
        let Some((&first, rest)) = seq.split_first() else {
            return ProbValue::one();
        };
        let mut p = self.initial[first].clone();
        let mut prev = first;
        for &s in rest {
            p = p * &self.rows[prev][s];
            prev = s;
        }
        p
    }

    fn sample_sequence<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        let init: Vec<f64> = self.initial.iter().map(ProbValue::to_f64).collect();
        let rows: Vec<Vec<f64>> = self.rows.iter().map(|r| r.iter().map(ProbValue::to_f64).collect()).collect();
        let mut out: Vec<usize> = Vec::with_capacity(n);
        for k in 0..n {
            let s = if k == 0 { categorical(&init, rng) } else { categorical(&rows[out[k - 1]], rng) };
            out.push(s);
        }
        out
    }
}

/// Exact joint law of `(X_1, ..., X_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceLaw {
    pub horizon: usize,
    pub alphabet: usize,
    pub atoms: BTreeMap<Vec<usize>, ProbValue>,
}

impl SequenceLaw {
    pub fn probability(&self, seq: &[usize]) -> ProbValue {
        self.atoms.get(seq).cloned().unwrap_or_else(ProbValue::zero)
    }
}

/// All sequences of length `n` over `{0, ..., d-1}` in lexicographic order.
pub fn all_sequences(d: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (d as u128).pow(n as u32);
    (0..total).map(move |mut code| {
        let mut seq = vec![0; n];
        for slot in seq.iter_mut().rev() {
            *slot = (code % d as u128) as usize;
            code /= d as u128;
        }
        seq
    })
}

/// Joint law of the first `n` symbols of a source.
pub fn source_cylinder_law<S: SequenceSource>(source: &S, n: usize) -> Result<SequenceLaw> {
    source_cylinder_law_with_budget(source, n, DEFAULT_ATOM_BUDGET)
}

pub fn source_cylinder_law_with_budget<S: SequenceSource>(source: &S, n: usize, atom_budget: u128) -> Result<SequenceLaw> {
    let d = source.alphabet_size();
    let needed = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > atom_budget {
        return Err(Error::AtomBudgetExceeded { needed, budget: atom_budget });
    }
    let atoms = all_sequences(d, n).map(|seq| {
        let p = source.sequence_probability(&seq);
        (seq, p)
    });
    Ok(SequenceLaw { horizon: n, alphabet: d, atoms: atoms.collect() })
}

/// Every sequence against its sorted rearrangement; a clean report means the
/// law is invariant under all permutations of positions.
pub fn exchangeability_check(law: &SequenceLaw) -> VerificationReport {
    let mut report = VerificationReport::new("exchangeability");
    for (seq, p) in &law.atoms {
        let mut sorted = seq.clone();
        sorted.sort_unstable();
        if &sorted == seq {
            continue;
        }
        report.compare(|| format!("{seq:?} vs {sorted:?}"), law.probability(&sorted), p.clone());
    }
    report
}

/// Symbols with `P(X_1 = s) = 0`; the counting chain never moves in those directions.
pub fn null_symbols<S: SequenceSource>(source: &S) -> Vec<usize> {
    (0..source.alphabet_size()).filter(|&s| source.sequence_probability(&[s]).is_zero()).collect()
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
    fn cylinder_examples() {
        let mu = SimplexPoint::parse(&["1/3", "2/3"]).unwrap();
        let single = ExchangeableSource::single_atom(mu);
        assert_eq!(single.sequence_probability(&[0, 1, 1]), ProbValue::ratio(4, 27));
        assert_eq!(two_atom().sequence_probability(&[0, 0]), ProbValue::ratio(1, 5));
        let urn = ExchangeableSource::polya(vec![1, 1]).unwrap();
        assert_eq!(urn.sequence_probability(&[0, 0]), ProbValue::ratio(1, 3));
    }

    #[test]
    fn laws_sum_to_one_and_are_exchangeable() {
        for source in [two_atom(), ExchangeableSource::polya(vec![2, 1, 3]).unwrap()] {
            for n in 0..=5 {
                let law = source_cylinder_law(&source, n).unwrap();
                assert_eq!(law.atoms.values().sum::<ProbValue>(), ProbValue::one());
                assert!(exchangeability_check(&law).is_clean());
            }
        }
        let control = source_cylinder_law(&MarkovSource::sticky_binary(), 3).unwrap();
        assert!(!exchangeability_check(&control).is_clean());
    }

    #[test]
    fn atom_budget_is_enforced() {
        let err = source_cylinder_law_with_budget(&two_atom(), 10, 1000).unwrap_err();
        assert!(matches!(err, Error::AtomBudgetExceeded { .. }));
    }

    #[test]
    fn invalid_sources_are_rejected() {
        assert!(ExchangeableSource::polya(vec![1, 0]).is_err());
        let mu = SimplexPoint::uniform(2);
        assert!(ExchangeableSource::mixture(vec![mu.clone()], vec![ProbValue::ratio(1, 2)]).is_err());
        assert!(ExchangeableSource::mixture(vec![mu, SimplexPoint::uniform(3)], vec![ProbValue::ratio(1, 2); 2]).is_err());
    }

    #[test]
    fn null_symbols_are_reported() {
        let corner = ExchangeableSource::single_atom(SimplexPoint::parse(&["1", "0"]).unwrap());
        assert_eq!(null_symbols(&corner), vec![1]);
        assert!(null_symbols(&two_atom()).is_empty());
    }
}
