use rootshell::geometry::{anker_upper_check, mc_intersection_ratio, ray_monotonicity, triangle_check, ShellSpec};

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

#[test]
fn intersection_is_deterministic_across_pools() {
    let spec = ShellSpec::extremal(3, 0, 0.1, 4.0).unwrap();
    let h = [0.4, 0.0, -0.4];
    let a = pool(1).install(|| mc_intersection_ratio(&spec, &h, 5000, 21).unwrap());
    let b = pool(3).install(|| mc_intersection_ratio(&spec, &h, 5000, 21).unwrap());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = mc_intersection_ratio(&spec, &h, 5000, 22).unwrap();
    assert_ne!(a.hits, c.hits);
}

#[test]
fn no_hits_beyond_the_support_polytope() {
    let spec = ShellSpec::extremal(3, 0, 0.1, 6.0).unwrap();
    for s in [7.2, 8.0, 10.0] {
        let rep = mc_intersection_ratio(&spec, &[s, 0.0, -s], 20_000, 5).unwrap();
        assert!(rep.norm_p > spec.t + 1.0);
        assert_eq!(rep.hits, 0);
    }
}

#[test]
fn ratio_decreases_along_rays() {
    let spec = ShellSpec::extremal(2, 0, 0.1, 6.0).unwrap();
    let rep = ray_monotonicity(&spec, &[0.5, -0.5], &[0.0, 0.5, 1.0, 2.0, 4.0], 20_000, 8).unwrap();
    assert!(rep.monotone, "{:?}", rep.ratios);
}

#[test]
fn anker_bound_sl2_and_sl3() {
    for t in [6.0, 8.0] {
        let spec = ShellSpec::extremal(2, 0, 0.1, t).unwrap();
        let grid: Vec<Vec<f64>> = [0.0, 0.5, 1.0].iter().map(|f| spec.center().iter().map(|c| c * f).collect()).collect();
        assert!(anker_upper_check(&spec, &grid, 20_000, 4).unwrap().pass);
    }
    let spec = ShellSpec::extremal(3, 0, 0.1, 6.0).unwrap();
    let grid: Vec<Vec<f64>> = [0.0, 0.1, 0.25].iter().map(|f| vec![6.0 * f, 0.0, -6.0 * f]).collect();
    let rep = anker_upper_check(&spec, &grid, 20_000, 4).unwrap();
    assert!(rep.pass);
    assert!(rep.points[1].ratio > 0.0);
}

#[test]
fn triangle_inequality_sl2() {
    assert_eq!(triangle_check(2, 2000, 3).unwrap().violations, 0);
}
