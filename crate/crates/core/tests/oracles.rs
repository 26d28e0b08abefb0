use lowdisc::approx::{bootstrap_sample, halving_class};
use lowdisc::geometry::grid_instance;
use lowdisc::presample::{
    grid_lowerbound_check, matching_presampled, presample_probability, relaxed_mwu, sample_pairs, LowerBoundCheck,
    PresampleConfig,
};
use lowdisc::testkit::{
    backtrack_min_crossing, brute_min_crossing_matching, brute_min_discrepancy, exact_expected_matching_discrepancy,
    min_weighted_crossing_edge,
};
use lowdisc::{
    approximate, build_matching, crossing_number, discrepancy, eps_error, larger_color_class, low_disc_color,
    AssumptionParams, Coloring, Edge, ExplicitSystem, Matching, Restricted, SetSystem,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_system(n: usize, m: usize, rng: &mut ChaCha8Rng) -> ExplicitSystem {
    let ranges = (0..m).map(|_| (0..n).filter(|_| rng.random()).collect()).collect();
    ExplicitSystem::new(n, ranges).unwrap()
}

fn params() -> AssumptionParams {
    AssumptionParams::new(2.0, 3.0, 0.5).unwrap()
}

/// `max_S | |S ∩ A|/|A| - |S|/n |` straight from the range lists.
fn direct_eps(subset: &[usize], sys: &ExplicitSystem) -> f64 {
    let n = sys.num_elements() as f64;
    sys.ranges()
        .iter()
        .map(|r| {
            let inside = subset.iter().filter(|x| r.contains(x)).count() as f64;
            (inside / subset.len() as f64 - r.len() as f64 / n).abs()
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn algorithms_never_beat_the_optimum(n in 2usize..=10, m in 1usize..8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(n, m, &mut rng);
        let (best_matching, kappa) = brute_min_crossing_matching(&sys).unwrap();
        prop_assert!(best_matching.is_perfect(n));
        prop_assert_eq!(crossing_number(&best_matching, &sys), kappa);
        let run = build_matching(&sys, &params(), &mut rng).unwrap();
        prop_assert!(crossing_number(&run.matching, &sys) >= kappa);

        let (best_coloring, delta) = brute_min_discrepancy(&sys).unwrap();
        prop_assert_eq!(discrepancy(&best_coloring, &sys), delta);
        let colored = low_disc_color(&sys, &params(), &mut rng).unwrap();
        prop_assert!(discrepancy(&colored.coloring, &sys) >= delta);
    }

    #[test]
    fn two_matching_oracles_agree(n in 1usize..=8, m in 0usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(n, m, &mut rng);
        let (_, kappa) = brute_min_crossing_matching(&sys).unwrap();
        prop_assert_eq!(backtrack_min_crossing(&sys).unwrap(), kappa);
    }

    #[test]
    fn halving_class_is_a_two_disc_over_n_approximation(n in 1usize..40, m in 1usize..8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ranges = random_system(n, m, &mut rng).ranges().to_vec();
        ranges.push((0..n).collect());
        let sys = ExplicitSystem::new(n, ranges).unwrap();
        let signs: Vec<i8> = (0..n).map(|_| if rng.random() { 1 } else { -1 }).collect();
        let chi = Coloring::new(signs).unwrap();
        let class = larger_color_class(&chi);
        prop_assert_eq!(class.len(), n.div_ceil(2));
        let disc = discrepancy(&chi, &sys) as f64;
        prop_assert!(direct_eps(&class, &sys) <= 2.0 * disc / n as f64 + 1e-12);
        let half = halving_class(&chi);
        prop_assert_eq!(half.len(), n.div_ceil(2));
        prop_assert!(half.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn brute_force_examples() {
    let line = grid_instance(4, 1).unwrap();
    let (m, kappa) = brute_min_crossing_matching(&line).unwrap();
    assert_eq!(kappa, 1);
    assert_eq!(crossing_number(&m, &line), 1);

    let whole = ExplicitSystem::new(6, vec![(0..6).collect()]).unwrap();
    assert_eq!(brute_min_discrepancy(&whole).unwrap().1, 0);
    let singletons = ExplicitSystem::new(5, (0..5).map(|x| vec![x]).collect()).unwrap();
    assert_eq!(brute_min_discrepancy(&singletons).unwrap().1, 1);

    let two = ExplicitSystem::new(2, vec![vec![0]]).unwrap();
    let (m, kappa) = brute_min_crossing_matching(&two).unwrap();
    assert_eq!(m.edges(), &[Edge::new(0, 1)]);
    assert_eq!(kappa, 1);

    let big = ExplicitSystem::new(13, vec![]).unwrap();
    assert!(brute_min_crossing_matching(&big).is_err());
    let bigger = ExplicitSystem::new(21, vec![]).unwrap();
    assert!(brute_min_discrepancy(&bigger).is_err());
}

#[test]
fn random_instance_discrepancy_is_at_least_optimum_every_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let sys = random_system(10, 34, &mut rng);
    let (_, delta) = brute_min_discrepancy(&sys).unwrap();
    for seed in 0..50 {
        let run = low_disc_color(&sys, &params(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert!(discrepancy(&run.coloring, &sys) >= delta);
    }
}

#[test]
fn expected_matching_discrepancy_examples() {
    let sys = ExplicitSystem::new(4, vec![vec![0, 1], vec![2, 3], vec![0, 1, 2, 3]]).unwrap();
    let uncrossed = Matching::new(vec![Edge::new(0, 1), Edge::new(2, 3)]);
    assert_eq!(exact_expected_matching_discrepancy(&uncrossed, &sys).unwrap(), 0.0);
    let crossed = Matching::new(vec![Edge::new(0, 2), Edge::new(1, 3)]);
    // Each of the first two ranges sees the sum of two independent signs.
    assert_eq!(exact_expected_matching_discrepancy(&crossed, &sys).unwrap(), 1.0);
    // Max over ranges: 2 when the two signs in {1, 2} agree, else 1.
    let one_each = ExplicitSystem::new(4, vec![vec![0], vec![1, 2]]).unwrap();
    let m = Matching::new(vec![Edge::new(0, 1), Edge::new(2, 3)]);
    assert_eq!(exact_expected_matching_discrepancy(&m, &one_each).unwrap(), 1.5);
}

#[test]
fn expected_matching_discrepancy_matches_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sys = random_system(13, 36, &mut rng);
    let run = build_matching(&sys, &params(), &mut rng).unwrap();
    let exact = exact_expected_matching_discrepancy(&run.matching, &sys).unwrap();
    let trials = 20_000;
    let mean = (0..trials)
        .map(|_| discrepancy(&lowdisc::color_from_matching(&run.matching, 13, &mut rng), &sys) as f64)
        .sum::<f64>()
        / trials as f64;
    assert!((mean - exact).abs() < 0.05, "sampled {mean} vs exact {exact}");
    let kappa = crossing_number(&run.matching, &sys) as f64;
    assert!(exact <= (3.0 * kappa * 36f64.ln()).sqrt());
}

#[test]
fn min_weighted_edge_on_a_line() {
    let line = grid_instance(8, 1).unwrap();
    let weights: Vec<f64> = (0..line.num_ranges()).map(|r| 1.0 + r as f64).collect();
    let (e, total) = min_weighted_crossing_edge(&(0..8).collect::<Vec<_>>(), &line, &weights);
    assert_eq!(e.v - e.u, 1);
    // The unit step between positions 1 and 2 is cut by the lightest threshold.
    assert_eq!(e, Edge::new(0, 1));
    assert_eq!(total, 1.0);

    let sys = ExplicitSystem::new(6, vec![vec![1, 3, 4]]).unwrap();
    let (e, total) = min_weighted_crossing_edge(&[1, 3, 4], &sys, &[1.0]);
    assert_eq!(total, 0.0);
    assert!(sys.contains(0, e.u) && sys.contains(0, e.v));
}

#[test]
fn min_weighted_edge_respects_pigeonhole() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let n = rng.random_range(2..=10);
        let m = rng.random_range(1..8);
        let sys = random_system(n, m, &mut rng);
        let subset: Vec<usize> = (0..n).collect();
        let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..4.0)).collect();
        let (e, total) = min_weighted_crossing_edge(&subset, &sys, &weights);
        let direct: f64 = (0..m).filter(|&r| e.crossed_by(&sys, r)).map(|r| weights[r]).sum();
        assert!((total - direct).abs() < 1e-12);
        let local = Restricted::new(&sys, subset.clone());
        let (_, kappa) = brute_min_crossing_matching(&local).unwrap();
        let w: f64 = weights.iter().sum();
        assert!(total <= 2.0 * w * kappa as f64 / n as f64 + 1e-12);
    }
}

#[test]
fn approximation_error_is_reported_faithfully() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let sys = random_system(2000, 2, &mut rng);
    let loose = AssumptionParams::new(0.05, 0.1, 0.5).unwrap();
    let result = approximate(&sys, &loose, 0.9, &mut rng).unwrap();
    assert!(!result.no_op);
    assert!(result.rounds >= 1);
    let mut size: usize = 2000;
    for _ in 0..result.rounds {
        size = size.div_ceil(2);
    }
    assert_eq!(result.subset.len(), size);
    assert!(result.subset.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(result.eps_measured, eps_error(&result.subset, &sys));
    assert!((result.eps_measured - direct_eps(&result.subset, &sys)).abs() < 1e-12);
}

#[test]
fn bootstrap_sample_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let s = bootstrap_sample(100_000, 0.1, 3.0, 0.5, &mut rng);
    assert_eq!(s.len(), 600);
    assert!(s.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(bootstrap_sample(50, 0.1, 3.0, 0.5, &mut rng).len(), 50);
}

#[test]
fn presampled_matchings_are_perfect() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for &(n, alpha) in &[(100, 0.5), (257, 0.25), (64, 1.0), (17, 0.1)] {
        let sys = random_system(n, 40, &mut rng);
        let cfg = PresampleConfig::new(4.0, 2.0, alpha).unwrap();
        let run = matching_presampled(&sys, &cfg, &mut rng).unwrap();
        assert!(run.matching.is_perfect(n), "n={n} alpha={alpha}");
    }
}

#[test]
fn relaxed_process_with_every_pair_runs_to_completion() {
    let grid = grid_instance(64, 2).unwrap();
    let n = grid.num_elements();
    let all = sample_pairs(n, 1.0, &mut ChaCha8Rng::seed_from_u64(0));
    assert_eq!(all.len(), n * (n - 1) / 2);
    let run = relaxed_mwu(&grid, 0.5, &all, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(run.halted_at, n / 2);
    let m = Matching::new(run.edges.clone());
    assert!(m.is_perfect(n));
    for r in 0..grid.num_ranges() {
        let crossed = m.edges().iter().filter(|e| e.crossed_by(&grid, r)).count() as u32;
        assert_eq!(run.doublings[r], crossed);
    }
    let empty = relaxed_mwu(&grid, 0.5, &[], &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(empty.halted_at, 0);
}

#[test]
fn lower_bound_check_applicability() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let high = presample_probability(256, 0.5, 0.1);
    assert!(matches!(
        grid_lowerbound_check(256, 2, 0.5, high, &mut rng).unwrap(),
        LowerBoundCheck::NotApplicable { .. }
    ));
    let low = 1.0 / 1024.0;
    match grid_lowerbound_check(256, 2, 0.5, low, &mut rng).unwrap() {
        LowerBoundCheck::Checked {
            n, k_p, limit, short_edges, holds, ..
        } => {
            assert_eq!(n, 256);
            assert!((k_p - 8.0).abs() < 1e-12);
            assert_eq!(limit, 32.0);
            assert_eq!(holds, short_edges <= 32);
        }
        other => panic!("unexpected {other:?}"),
    }
}
