use martinwalk_web::{directing_samples, kernel_curve, simplex_path};

#[test]
fn corner_path_stays_on_a_vertex() {
    let path = simplex_path("1,0,0", 20, 1).unwrap();
    assert_eq!(path.len(), 60);
    for p in path.chunks(3) {
        assert_eq!(p, [1.0, 0.0, 0.0]);
    }
}

#[test]
fn paths_are_seeded_and_on_the_simplex() {
    let a = simplex_path("7/10,3/10", 500, 4).unwrap();
    assert_eq!(a, simplex_path("0.7, 0.3", 500, 4).unwrap());
    assert_ne!(a, simplex_path("7/10,3/10", 500, 5).unwrap());
    assert!(a.chunks(2).all(|p| (p[0] + p[1] - 1.0).abs() < 1e-12));
    assert!(simplex_path("7/10,2/5", 10, 0).is_err());
}

#[test]
fn kernel_curve_approaches_the_boundary_kernel() {
    let curve = kernel_curve("7/10,3/10", "2,0", &[10, 100, 10_000]).unwrap();
    let limit = *curve.last().unwrap();
    assert!((limit - 4.0 * 0.49).abs() < 1e-12);
    let errors: Vec<f64> = curve[..3].iter().map(|k| (k - limit).abs()).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(kernel_curve("1/2,1/2", "1,0,0", &[10]).is_err());
}

#[test]
fn directing_samples_cluster_at_the_atoms() {
    let flat = directing_samples("mixture", "1/5,4/5;3/5,2/5", 5_000, 200, 3).unwrap();
    assert_eq!(flat.len(), 400);
    for p in flat.chunks(2) {
        let near = (p[0] - 0.2).abs() < 0.05 || (p[0] - 0.6).abs() < 0.05;
        assert!(near, "{p:?}");
    }
    let polya = directing_samples("polya", "1,1", 1_000, 100, 3).unwrap();
    assert_eq!(polya.len(), 200);
    assert!(directing_samples("urn", "1,1", 10, 10, 0).is_err());
    assert!(directing_samples("mixture", "1/2,1/2|1/3", 10, 10, 0).is_err());
}
