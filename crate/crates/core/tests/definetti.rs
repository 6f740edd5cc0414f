mod common;

use common::{comp, simplex};
use martinwalk::chain::{cylinder_law, markov_property_check, GradedChain};
use martinwalk::composition::{boundary_kernel, uniform_walk, Composition, SimplexPoint};
use martinwalk::definetti::*;
use martinwalk::harmonic::h_transform;
use martinwalk::mc::McConfig;
use martinwalk::{Error, ProbValue};
use proptest::prelude::*;

fn two_atom() -> ExchangeableSource {
    mixture(&[(&["1/5", "4/5"], (1, 2)), (&["3/5", "2/5"], (1, 2))])
}

fn mixture(parts: &[(&[&str], (i64, i64))]) -> ExchangeableSource {
    let atoms = parts.iter().map(|(a, _)| simplex(a)).collect();
    let weights = parts.iter().map(|(_, (p, q))| ProbValue::ratio(*p, *q)).collect();
    ExchangeableSource::mixture(atoms, weights).unwrap()
}

/// All permutations of `0..n`.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn source_law_examples() {
    let mu = simplex(&["1/3", "2/3"]);
    let single = ExchangeableSource::single_atom(mu.clone());
    let law = source_cylinder_law(&single, 3).unwrap();
    for (seq, p) in &law.atoms {
        assert_eq!(p, &seq.iter().map(|&s| mu.coord(s).clone()).product::<ProbValue>());
    }
    // Symbols are 0-based: sequence [0, 0] is "first symbol twice".
    assert_eq!(source_cylinder_law(&two_atom(), 2).unwrap().probability(&[0, 0]), ProbValue::ratio(1, 5));
    let urn = ExchangeableSource::polya(vec![1, 1]).unwrap();
    assert_eq!(source_cylinder_law(&urn, 2).unwrap().probability(&[0, 0]), ProbValue::ratio(1, 3));
}

#[test]
fn every_permutation_preserves_cylinder_probabilities() {
    let sources = [two_atom(), ExchangeableSource::polya(vec![1, 2]).unwrap(), ExchangeableSource::polya(vec![1, 1, 1]).unwrap()];
    for source in &sources {
        for n in 1..=6 {
            if source.alphabet_size() == 3 && n > 5 {
                continue;
            }
            let law = source_cylinder_law(source, n).unwrap();
            let perms = permutations(n);
            for (seq, p) in &law.atoms {
                for perm in &perms {
                    let permuted: Vec<usize> = perm.iter().map(|&i| seq[i]).collect();
                    assert_eq!(&law.probability(&permuted), p);
                }
            }
        }
    }
}

#[test]
fn counting_path_examples() {
    assert_eq!(counting_chain_path(3, &[]).unwrap(), vec![comp(&[0, 0, 0])]);
    assert_eq!(
        counting_chain_path(2, &[0, 0, 1]).unwrap(),
        vec![comp(&[0, 0]), comp(&[1, 0]), comp(&[2, 0]), comp(&[2, 1])]
    );
    let path = counting_chain_path(3, &[1, 1, 1]).unwrap();
    assert_eq!(path[3], comp(&[0, 3, 0]));
    assert!(matches!(counting_chain_path(2, &[0, 3]), Err(Error::OutOfAlphabet { symbol: 3, alphabet: 2 })));
}

#[test]
fn counting_law_examples() {
    let corner = ExchangeableSource::single_atom(simplex(&["1", "0"]));
    let law = counting_chain_law(&corner, 4).unwrap();
    assert_eq!(law.probability(&[comp(&[1, 0]), comp(&[2, 0]), comp(&[3, 0]), comp(&[4, 0])]), ProbValue::one());
    let urn = ExchangeableSource::polya(vec![1, 1]).unwrap();
    assert_eq!(counting_chain_law(&urn, 2).unwrap().marginal(2).get(&comp(&[1, 1])), ProbValue::ratio(1, 3));
    let split = mixture(&[(&["1", "0"], (1, 2)), (&["0", "1"], (1, 2))]);
    assert_eq!(counting_chain_law(&split, 2).unwrap().marginal(2).get(&comp(&[2, 0])), ProbValue::ratio(1, 2));
}

#[test]
fn lemma_reports() {
    let mixture_report = verify_counting_markov(&two_atom(), 6).unwrap();
    assert!(mixture_report.markov.is_clean());
    assert!(mixture_report.markov.checked > 0);

    let urn = ExchangeableSource::polya(vec![1, 1]).unwrap();
    let urn_report = verify_counting_markov(&urn, 6).unwrap();
    assert!(urn_report.markov.is_clean());
    for t in &urn_report.transitions {
        let k = t.from.parts().iter().sum::<u32>() as i64;
        assert_eq!(t.probability, ProbValue::ratio(t.from.parts()[t.direction] as i64 + 1, k + 2));
    }
    assert!(!verify_counting_markov(&MarkovSource::sticky_binary(), 6).unwrap().markov.is_clean());

    assert!(verify_counting_cotransitions(&two_atom(), 6).unwrap().is_clean());
    assert!(verify_counting_cotransitions(&urn, 6).unwrap().is_clean());
    assert!(!verify_counting_cotransitions(&MarkovSource::sticky_binary(), 6).unwrap().is_clean());

    let chain = counting_chain(&urn, 2).unwrap();
    let laws = martinwalk::chain::LevelLaws::new(&chain, 2).unwrap();
    for y in chain.states_at(1) {
        assert_eq!(laws.cotransition(&y, &comp(&[0, 0])).unwrap(), ProbValue::one());
    }
    assert_eq!(laws.cotransition(&comp(&[1, 1]), &comp(&[1, 0])).unwrap(), ProbValue::ratio(1, 2));
}

#[test]
fn recovery_examples() {
    let mu = simplex(&["1/4", "3/4"]);
    let h = counting_h_recovery(&ExchangeableSource::single_atom(mu.clone()), 6).unwrap();
    for x in (0..=6).flat_map(|n| Composition::enumerate(2, n)) {
        assert_eq!(h.eval(&x), boundary_kernel(&x, &mu));
    }
    let h = counting_h_recovery(&ExchangeableSource::single_atom(SimplexPoint::uniform(3)), 4).unwrap();
    for x in (0..=4).flat_map(|n| Composition::enumerate(3, n)) {
        assert_eq!(h.eval(&x), ProbValue::one());
    }
    let atoms = [simplex(&["1/5", "4/5"]), simplex(&["3/5", "2/5"])];
    let h = counting_h_recovery(&two_atom(), 6).unwrap();
    for x in (0..=6).flat_map(|n| Composition::enumerate(2, n)) {
        let want = ProbValue::ratio(1, 2) * boundary_kernel(&x, &atoms[0]) + ProbValue::ratio(1, 2) * boundary_kernel(&x, &atoms[1]);
        assert_eq!(h.eval(&x), want);
    }
    assert!(matches!(counting_h_recovery(&MarkovSource::sticky_binary(), 4), Err(Error::CotransitionMismatch { .. })));
}

#[test]
fn recovered_transform_reproduces_the_counting_law() {
    let source = mixture(&[(&["1/2", "1/4", "1/4"], (1, 3)), (&["0", "1/3", "2/3"], (2, 3))]);
    let h = counting_h_recovery(&source, 4).unwrap();
    let transformed = h_transform(uniform_walk(3).with_budget(4), h).unwrap();
    assert_eq!(
        cylinder_law(&transformed, 4).unwrap().without_null_atoms(),
        counting_chain_law(&source, 4).unwrap().without_null_atoms()
    );
    assert_eq!(null_symbols(&ExchangeableSource::single_atom(simplex(&["0", "1", "0"]))), vec![0, 2]);
}

#[test]
fn single_atom_estimates_concentrate() {
    let source = ExchangeableSource::single_atom(simplex(&["7/10", "3/10"]));
    let est = estimate_directing_measure(&source, 10_000, McConfig::new(200, 5)).unwrap();
    let summary = cluster_summary(&est, &[simplex(&["7/10", "3/10"])]);
    assert!(summary.fraction_within(0.02) >= 0.99);
    assert_eq!(est.samples.len(), 200);
    assert_eq!(est.horizon, 10_000);
}

#[test]
fn directing_measure_examples() {
    let mc = McConfig::new(2000, 7);
    let est = estimate_directing_measure(&two_atom(), 10_000, mc).unwrap();
    let summary = cluster_summary(&est, &[simplex(&["1/5", "4/5"]), simplex(&["3/5", "2/5"])]);
    for c in &summary.clusters {
        assert!(c.mean_distance <= 0.02, "{c:?}");
        assert!((c.weight - 0.5).abs() <= 0.03, "{c:?}");
    }
    assert!(summary.fraction_within(0.02) >= 0.99);

    let urn = ExchangeableSource::polya(vec![1, 1]).unwrap();
    let est = estimate_directing_measure(&urn, 10_000, mc).unwrap();
    let ks = ks_distance(&est.coordinate(0), polya_marginal_cdf(&[1, 1], 0).unwrap());
    assert!(ks <= 0.04, "KS {ks}");
    assert!(polya_moment_check(&est, &[1, 1]).iter().all(|r| r.passed()));
}

#[test]
fn identity_examples() {
    let single = ExchangeableSource::single_atom(simplex(&["2/9", "7/9"]));
    assert!(definetti_identity_check(&single, &DirectingLaw::of(&single), 5).unwrap().passed());

    let urn = ExchangeableSource::polya(vec![1, 1]).unwrap();
    let report = definetti_identity_check(&urn, &DirectingLaw::of(&urn), 2).unwrap();
    assert!(report.passed());
    assert_eq!(DirectingLaw::of(&urn).moment(&[0, 0]), Some(ProbValue::ratio(1, 3)));

    let est = estimate_directing_measure(&two_atom(), 2000, McConfig::new(2000, 13)).unwrap();
    let report = definetti_identity_check(&two_atom(), &DirectingLaw::Estimated(est), 3).unwrap();
    assert_eq!(report.statistical.len(), 8);
    assert!(report.passed(), "{:?}", report.statistical);
}

#[test]
fn binary_lift_examples() {
    assert_eq!(binary_digits(0.0, 6).unwrap().digits(), &[0; 6]);
    assert_eq!(binary_digits(0.625, 4).unwrap().digits(), &[1, 0, 1, 0]);
    assert_eq!(binary_digits(1.0 / 3.0, 4).unwrap().digits(), &[0, 1, 0, 1]);
    assert!(matches!(binary_digits(1.0, 4), Err(Error::Domain { .. })));

    let lifted = lift_sequence(&[0.625, 0.3], 1).unwrap();
    assert_eq!(lifted.iter().map(|b| b.digits().to_vec()).collect::<Vec<_>>(), vec![vec![1], vec![0]]);
    let constant = lift_sequence(&[0.4; 5], 3).unwrap();
    assert!(constant.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(lift_sequence(&[0.625], 2).unwrap()[0].digits(), &[1, 0]);

    assert_eq!(reconstruct_real(&BinaryDigits::new(vec![0, 0, 0]).unwrap()), 0.0);
    assert_eq!(reconstruct_real(&BinaryDigits::new(vec![1, 0, 1]).unwrap()), 0.625);
    for i in 0..10_000 {
        let x = i as f64 / 10_000.0;
        let back = reconstruct_real(&binary_digits(x, 30).unwrap());
        assert!((x - back).abs() < 2f64.powi(-30) && back <= x, "{x}");
    }
}

#[test]
fn projection_examples() {
    assert!(projection_consistency_check(&CubeLaw::uniform(4), &CubeLaw::uniform(3)).unwrap().is_clean());
    let delta = DiscreteMeasure::dirac(ProbValue::ratio(5, 8)).unwrap();
    let m3 = delta.digit_law(3).unwrap();
    let m2 = delta.digit_law(2).unwrap();
    assert_eq!(m2.probability(&BinaryDigits::new(vec![1, 0]).unwrap()), ProbValue::one());
    assert_eq!(m3.probability(&BinaryDigits::new(vec![1, 0, 1]).unwrap()), ProbValue::one());
    assert!(projection_consistency_check(&m3, &m2).unwrap().is_clean());

    let mut bent = m2.clone();
    bent.probs.swap(0, 2);
    assert!(!projection_consistency_check(&m3, &bent).unwrap().is_clean());
    assert!(projection_consistency_check(&m3, &CubeLaw::uniform(1)).is_err());
}

fn dyadic_measure() -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((0i64..64, 1i64..5), 1..4).prop_map(|pts| {
        let total: i64 = pts.iter().map(|(_, w)| w).sum();
        DiscreteMeasure::new(
            pts.iter().map(|(p, _)| ProbValue::ratio(*p, 64)).collect(),
            pts.iter().map(|(_, w)| ProbValue::ratio(*w, total)).collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn digit_roundtrip(x in 0.0f64..1.0, k in 1usize..52) {
        let back = reconstruct_real(&binary_digits(x, k).unwrap());
        prop_assert!(x - back < 2f64.powi(-(k as i32)) && back <= x);
    }

    #[test]
    fn exact_and_float_digits_agree(num in 0i64..1 << 20, k in 1usize..24) {
        let x = ProbValue::ratio(num, 1 << 20);
        let exact = binary_digits_exact(x.as_rational().unwrap(), k).unwrap();
        prop_assert_eq!(&exact, &binary_digits(x.to_f64(), k).unwrap());
        let back = reconstruct_exact(&exact);
        prop_assert!(back <= x && (&x - &back) < ProbValue::Exact(num_rational_pow2(k)));
    }

    #[test]
    fn dyadic_digit_laws_are_consistent(m in dyadic_measure(), k in 1usize..7) {
        prop_assert!(projection_consistency_check(&m.digit_law(k + 1).unwrap(), &m.digit_law(k).unwrap()).unwrap().is_clean());
    }

    #[test]
    fn lifted_mixtures_are_exchangeable(a in dyadic_measure(), b in dyadic_measure(), w in 1i64..4) {
        let source = RealMixtureSource::new(vec![a, b], vec![ProbValue::ratio(w, 4), ProbValue::ratio(4 - w, 4)]).unwrap();
        let lifted = source.lifted_source(2).unwrap();
        let law = source_cylinder_law(&lifted, 3).unwrap();
        prop_assert!(exchangeability_check(&law).is_clean());
        prop_assert!(markov_property_check(&counting_chain_law(&lifted, 3).unwrap()).unwrap().is_clean());
    }

    #[test]
    fn counting_chain_lemma_for_random_mixtures(
        atoms in prop::collection::vec(prop::collection::vec(0u32..6, 3), 1..=3),
        weights in prop::collection::vec(1i64..4, 3),
        d in 2usize..=3,
    ) {
        let mut pts = Vec::new();
        for raw in &atoms {
            let w = &raw[..d];
            let total: u32 = w.iter().sum::<u32>().max(1);
            let mut coords: Vec<ProbValue> = w.iter().map(|&v| ProbValue::ratio(v as i64, total as i64)).collect();
            if w.iter().all(|&v| v == 0) {
                coords = SimplexPoint::uniform(d).coords().to_vec();
            }
            pts.push(SimplexPoint::new(coords).unwrap());
        }
        let total: i64 = weights[..pts.len()].iter().sum();
        let ws = weights[..pts.len()].iter().map(|&w| ProbValue::ratio(w, total)).collect();
        let source = ExchangeableSource::mixture(pts.clone(), ws).unwrap();
        let n = if d == 2 { 6 } else { 4 };
        prop_assert!(verify_counting_markov(&source, n).unwrap().markov.is_clean());
        prop_assert!(verify_counting_cotransitions(&source, n).unwrap().is_clean());
        prop_assert!(counting_h_recovery(&source, n).is_ok());
    }
}

fn num_rational_pow2(k: usize) -> num_rational::BigRational {
    num_rational::BigRational::new(1.into(), num_bigint::BigInt::from(1) << k)
}
