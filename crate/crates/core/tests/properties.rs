use hiclust::continuation::{solve, ModelKind, Schedule, SolveOptions};
use hiclust::init::{median_point, rad, random_start, StartSpec};
use hiclust::matrix::{dist, dist_ball, project_ball};
use hiclust::model_one::ModelOne;
use hiclust::model_two::ModelTwo;
use hiclust::postprocess::{discrete_optimum, tree_cost, SnappedSolution};
use hiclust::smoothing::{smooth_norm, SmoothingParam};
use hiclust::Matrix;
use proptest::prelude::*;

fn points(max_m: usize, n: usize) -> impl Strategy<Value = Matrix> {
    (3..=max_m).prop_flat_map(move |m| {
        prop::collection::vec(-50.0..50.0f64, m * n).prop_map(move |v| Matrix::from_vec(m, n, v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sandwich(x in prop::collection::vec(-1e3..1e3f64, 1..5), shift in -1e3..1e3f64, mu in 1e-4..1e3f64) {
        let a: Vec<f64> = x.iter().map(|v| v + shift * 0.5).collect();
        let phi = smooth_norm(&x, &a, SmoothingParam::new(mu).unwrap()).unwrap();
        let d = dist(&x, &a);
        prop_assert!(phi <= d + 1e-12 * (1.0 + d));
        prop_assert!(d <= phi + mu / 2.0 + 1e-12 * (1.0 + d));
    }

    #[test]
    fn ball_projection(v in prop::collection::vec(-10.0..10.0f64, 1..6)) {
        let p = project_ball(&v);
        prop_assert!(p.iter().map(|c| c * c).sum::<f64>().sqrt() <= 1.0 + 1e-15);
        prop_assert!((dist(&v, &p) - dist_ball(&v)).abs() <= 1e-12);
    }

    #[test]
    fn objective_gap_bounds(a in points(12, 2), lambda in 0.0..5.0f64, mu in 0.01..10.0f64, seed in 0u64..1000) {
        let k = 2;
        let spec = StartSpec { gamma: Some(0.7), ..StartSpec::with_seed(seed) };
        let x1 = random_start(&a, k, &spec);
        let one = ModelOne::new(&a, k, lambda, mu).unwrap();
        let f = one.true_objective(&x1).unwrap().f_lambda;
        let s = one.smoothed_objective(&x1).unwrap();
        let bound = mu / 2.0 * ((1.0 + lambda) * a.rows() as f64 * k as f64 + k as f64);
        prop_assert!(s <= f + 1e-9 * (1.0 + f.abs()) + bound && f <= s + bound + 1e-9 * (1.0 + f.abs()));

        let x2 = random_start(&a, k + 1, &spec);
        let two = ModelTwo::new(&a, k, lambda, mu).unwrap();
        let f = two.true_objective(&x2).unwrap().f_lambda;
        let s = two.smoothed_objective(&x2).unwrap();
        let bound = mu / 2.0 * ((1.0 + lambda) * (a.rows() * k) as f64 + k as f64 + lambda * a.rows() as f64);
        prop_assert!((f - s).abs() <= bound + 1e-9 * (1.0 + f.abs()));
    }

    #[test]
    fn start_rows_sit_on_the_sphere(a in points(20, 3), gamma in 0.0..1.0f64, seed in 0u64..1000) {
        let spec = StartSpec { gamma: Some(gamma), ..StartSpec::with_seed(seed) };
        let x = random_start(&a, 4, &spec);
        let center = median_point(&a);
        let r = gamma * rad(&a);
        for row in x.iter_rows() {
            prop_assert!((dist(row, &center) - r).abs() <= 1e-12 * (1.0 + r));
        }
        prop_assert_eq!(x, random_start(&a, 4, &spec));
    }

    #[test]
    fn rad_is_translation_invariant(a in points(15, 2), t in prop::collection::vec(-100.0..100.0f64, 2)) {
        let mut shifted = a.clone();
        for i in 0..shifted.rows() {
            for (v, s) in shifted.row_mut(i).iter_mut().zip(&t) {
                *v += s;
            }
        }
        prop_assert!((rad(&a) - rad(&shifted)).abs() <= 1e-9 * (1.0 + rad(&a)));
    }

    #[test]
    fn schedule_is_monotone(l0 in 1e-8..1.0f64, s1 in 1.0..50.0f64, m0 in 0.1..1e3f64, s2 in 0.05..1.0f64, n in 1usize..40) {
        let s = Schedule::direct(l0, s1, m0, s2, n, 5).unwrap();
        let p = s.parameters();
        prop_assert_eq!(p.len(), n);
        for w in p.windows(2) {
            prop_assert!(w[1].0 >= w[0].0 && w[1].1 <= w[0].1);
        }
    }

    #[test]
    fn targets_round_trip(l0 in 1e-8..1.0f64, ratio in 1.0..1e6f64, m0 in 0.1..1e3f64, shrink in 1e-6..1.0f64, n in 1usize..40) {
        let s = Schedule::from_targets(l0, l0 * ratio, m0, m0 * shrink, n, 5).unwrap();
        let (mut l, mut m) = (l0, m0);
        for _ in 0..n {
            l *= s.sigma1;
            m *= s.sigma2;
        }
        prop_assert!((l - l0 * ratio).abs() <= 1e-9 * l0 * ratio);
        prop_assert!((m - m0 * shrink).abs() <= 1e-9 * m0 * shrink);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_never_beats_enumeration(a in points(9, 2), seed in 0u64..100, two in any::<bool>()) {
        let k = 2;
        let model = if two { ModelKind::Two } else { ModelKind::One };
        let schedule = Schedule::direct(1e-3, 2.0, 20.0, 0.5, 8, 15).unwrap();
        let spec = StartSpec::with_seed(seed);
        let x0 = random_start(&a, model.rows(k), &spec);
        let report = solve(&a, model, k, &schedule, &x0, &SolveOptions::default()).unwrap();
        let best = discrete_optimum(&a, k).unwrap();
        prop_assert!(report.snapped.cost >= best.cost - 1e-9 * (1.0 + best.cost));
        prop_assert!((tree_cost(&report.snapped, &a) - report.snapped.cost).abs() <= 1e-12 * (1.0 + best.cost));
        prop_assert!(report.worst_inner_increase() <= 1e-9 * (1.0 + report.inner_objectives.iter().map(|o| o[0].abs()).fold(0.0, f64::max)));
    }

    #[test]
    fn tree_cost_is_the_hub_formula(a in points(10, 2), c0 in 0usize..3, c1 in 3usize..6, t in 6usize..10) {
        prop_assume!(t < a.rows() && c1 < a.rows());
        let s = SnappedSolution::from_indices(vec![c0, c1], t, &a);
        let hubs = [c0, c1, t];
        let assign: f64 = (0..a.rows())
            .map(|i| hubs.iter().map(|&h| dist(a.row(i), a.row(h))).fold(f64::INFINITY, f64::min))
            .sum();
        let links = dist(a.row(c0), a.row(t)) + dist(a.row(c1), a.row(t));
        prop_assert!((s.cost - (assign + links)).abs() <= 1e-9);
    }
}
