mod common;

use common::{comp, simplex};
use martinwalk::chain::{cylinder_law, forward_law, sample_path_replicate, step, GradedChain, LevelLaws};
use martinwalk::composition::{
    alpha_walk, boundary_kernel, boundary_kernel_fn, boundary_limit, closed_form_kernel, closed_form_kernel_f64,
    dm_convergence_check, lattice_point, polya_cotransition, uniform_walk, unscaled_boundary_kernel, Composition,
    ConvergenceConfig, SimplexPoint,
};
use martinwalk::harmonic::{h_transform, is_harmonic, HarmonicFn};
use martinwalk::ProbValue;
use proptest::prelude::*;

#[test]
fn uniform_walk_examples() {
    let one = uniform_walk(1);
    let path = sample_path_replicate(&one, 10, 0, 0);
    assert!(path.iter().enumerate().all(|(n, y)| *y == comp(&[n as u32])));
    assert_eq!(step(&uniform_walk(2), &comp(&[1, 1]), &comp(&[2, 1])), ProbValue::ratio(1, 2));
    let law = forward_law(&uniform_walk(3), 2).unwrap();
    assert_eq!(law.get(&comp(&[2, 0, 0])), ProbValue::ratio(1, 9));
    assert_eq!(law.get(&comp(&[1, 1, 0])), ProbValue::ratio(2, 9));
}

#[test]
fn closed_form_kernel_examples() {
    let y = comp(&[3, 2]);
    assert_eq!(closed_form_kernel(2, &comp(&[1, 0]), &y), ProbValue::ratio(6, 5));
    assert_eq!(closed_form_kernel(2, &comp(&[0, 0]), &y), ProbValue::one());
    assert_eq!(closed_form_kernel(2, &comp(&[1, 1]), &y), ProbValue::ratio(6, 5));
    assert_eq!(closed_form_kernel(2, &comp(&[1, 1]), &y), common::kernel(&common::uniform(2), &comp(&[1, 1]), &y));
    // d y_j / n along every level-5 state.
    for y in Composition::enumerate(3, 5) {
        for j in 0..3 {
            assert_eq!(
                closed_form_kernel(3, &Composition::unit(3, j), &y),
                ProbValue::ratio(3 * y.parts()[j] as i64, 5)
            );
        }
    }
}

#[test]
fn closed_form_agrees_with_dynamic_program() {
    for (d, max) in [(2, 8), (3, 7), (4, 5)] {
        let walk = uniform_walk(d);
        let laws = LevelLaws::new(&walk, max).unwrap();
        for m in 0..=max {
            for x in walk.states_at(m) {
                let row = laws.kernel_row(&x, max).unwrap();
                for (y, k) in &row {
                    assert_eq!(&closed_form_kernel(d, &x, y), k, "d={d} {x:?} {y:?}");
                }
            }
        }
    }
}

#[test]
fn boundary_kernel_examples() {
    for d in 1..=4 {
        for x in Composition::enumerate(d, 3) {
            assert_eq!(boundary_kernel(&x, &SimplexPoint::uniform(d)), ProbValue::one());
        }
    }
    let alpha = simplex(&["7/10", "3/10"]);
    assert_eq!(boundary_kernel(&comp(&[1, 0]), &alpha), ProbValue::ratio(7, 5));
    assert_eq!(boundary_kernel(&comp(&[2, 0]), &alpha), ProbValue::ratio(49, 25));
    let a = alpha.to_f64s();
    for x in [comp(&[1, 0]), comp(&[2, 0])] {
        let y = lattice_point(&a, 100_000);
        let limit = closed_form_kernel_f64(2, &x, &y);
        assert!((limit - boundary_kernel(&x, &alpha).to_f64()).abs() < 1e-3, "{x:?}: {limit}");
    }
}

#[test]
fn boundary_kernel_is_harmonic_and_the_unscaled_form_is_not() {
    let grid = [
        simplex(&["7/10", "3/10"]),
        simplex(&["1/2", "1/3", "1/6"]),
        simplex(&["1", "0"]),
        simplex(&["0", "2/5", "3/5"]),
    ];
    for alpha in grid {
        let d = alpha.d();
        let walk = uniform_walk(d);
        assert!(is_harmonic(&walk, &boundary_kernel_fn(&alpha), 8).is_clean(), "{alpha}");
        let raw = alpha.clone();
        let unscaled = HarmonicFn::from_fn(move |x: &Composition| unscaled_boundary_kernel(x, &raw));
        assert!(!is_harmonic(&walk, &unscaled, 3).is_clean(), "{alpha}");
    }
}

#[test]
fn alpha_walk_examples() {
    let uniform = alpha_walk(&SimplexPoint::uniform(3));
    for n in 0..=5 {
        assert_eq!(cylinder_law(&uniform, n).unwrap(), cylinder_law(&uniform_walk(3), n).unwrap());
    }
    let corner = alpha_walk(&simplex(&["1", "0", "0"]));
    for n in 0..=6 {
        assert_eq!(corner.states_at(n), vec![comp(&[n as u32, 0, 0])]);
    }
    let alpha = simplex(&["7/10", "3/10"]);
    let transformed = h_transform(uniform_walk(2), boundary_kernel_fn(&alpha)).unwrap();
    assert_eq!(cylinder_law(&transformed, 6).unwrap(), cylinder_law(&alpha_walk(&alpha), 6).unwrap());
}

#[test]
fn polya_cotransition_examples() {
    assert_eq!(polya_cotransition(&comp(&[0, 0, 0]), 2), ProbValue::one());
    assert_eq!(polya_cotransition(&comp(&[3, 1]), 0), ProbValue::ratio(4, 5));
    let laws = LevelLaws::new(&uniform_walk(2), 3).unwrap();
    assert_eq!(polya_cotransition(&comp(&[1, 1]), 1), ProbValue::ratio(2, 3));
    assert_eq!(laws.cotransition(&comp(&[1, 2]), &comp(&[1, 1])).unwrap(), ProbValue::ratio(2, 3));
    for alpha in [SimplexPoint::uniform(3), simplex(&["1/5", "1/5", "3/5"])] {
        let laws = LevelLaws::new(&alpha_walk(&alpha), 6).unwrap();
        for n in 0..6 {
            for y in Composition::enumerate(3, n) {
                for j in 0..3 {
                    assert_eq!(laws.cotransition(&y.plus(j), &y).unwrap(), polya_cotransition(&y, j));
                }
            }
        }
    }
}

#[test]
fn boundary_limit_examples() {
    let est = boundary_limit(&[comp(&[70, 30])]).unwrap();
    assert_eq!(est.point.to_f64s(), vec![0.7, 0.3]);

    let n = 10_000;
    for (alpha, target) in [(simplex(&["7/10", "3/10"]), [0.7, 0.3]), (SimplexPoint::uniform(2), [0.5, 0.5])] {
        let walk = alpha_walk(&alpha);
        let hits = (0..100)
            .filter(|&r| {
                let est = boundary_limit(&sample_path_replicate(&walk, n, 99, r)).unwrap();
                let p = est.point.to_f64s();
                (p[0] - target[0]).abs() <= 0.02 && (p[1] - target[1]).abs() <= 0.02
            })
            .count();
        assert!(hits >= 99, "{hits} of 100 within 0.02 of {alpha}");
    }
}

#[test]
fn sampled_paths_converge_in_the_martin_sense() {
    let walk = alpha_walk(&simplex(&["1/4", "3/4"]));
    let path = sample_path_replicate(&walk, 20_000, 4, 0);
    let probes = [comp(&[1, 0]), comp(&[0, 1]), comp(&[1, 1])];
    let config = ConvergenceConfig { tol: 0.05, window_fraction: 0.2 };
    let report = dm_convergence_check(&path[1..], &probes, config);
    assert!(report.converged, "{report:?}");
    let straight: Vec<_> = (1..=40).map(|n| comp(&[n, 0])).collect();
    assert!(dm_convergence_check(&straight, &[comp(&[1, 0])], ConvergenceConfig::default()).converged);
}

fn rational_alpha(d: usize) -> impl Strategy<Value = SimplexPoint> {
    prop::collection::vec(0u32..12, d).prop_filter_map("nonzero", |w| {
        let total: u32 = w.iter().sum();
        (total > 0).then(|| SimplexPoint::new(w.iter().map(|&v| ProbValue::ratio(v as i64, total as i64)).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boundary_kernels_are_normalised_harmonic_functions(alpha in (1usize..=3).prop_flat_map(rational_alpha)) {
        let h = boundary_kernel_fn(&alpha);
        let walk = uniform_walk(alpha.d());
        prop_assert_eq!(h.eval(&walk.root()), ProbValue::one());
        prop_assert!(is_harmonic(&walk, &h, 6).is_clean());
    }

    #[test]
    fn alpha_walk_is_the_h_transform(alpha in (2usize..=3).prop_flat_map(rational_alpha)) {
        let transformed = h_transform(uniform_walk(alpha.d()), boundary_kernel_fn(&alpha)).unwrap();
        let a = cylinder_law(&transformed, 4).unwrap();
        let b = cylinder_law(&alpha_walk(&alpha), 4).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn float_kernel_tracks_exact_kernel(parts in prop::collection::vec(0u32..30, 2..=3), probe in prop::collection::vec(0u32..3, 3)) {
        let d = parts.len();
        let y = Composition::new(parts);
        let x = Composition::new(probe[..d].to_vec());
        let exact = closed_form_kernel(d, &x, &y).to_f64();
        let float = closed_form_kernel_f64(d, &x, &y);
        prop_assert!((exact - float).abs() <= 1e-9 * exact.max(1.0), "{} vs {}", exact, float);
    }

    #[test]
    fn lattice_points_lie_on_their_level(w in prop::collection::vec(1u32..50, 2..=4), n in 1u32..5000) {
        let total: u32 = w.iter().sum();
        let alpha: Vec<f64> = w.iter().map(|&v| v as f64 / total as f64).collect();
        let y = lattice_point(&alpha, n);
        prop_assert_eq!(y.parts().iter().sum::<u32>(), n);
        for (yi, a) in y.parts().iter().zip(&alpha) {
            prop_assert!((*yi as f64 - a * n as f64).abs() < 1.0 + 1e-9);
        }
    }
}
