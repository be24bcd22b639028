use proptest::prelude::*;
use switchplace::moo::{
    crowding_distance, dcd_trim, dominates, evolve, fast_non_dominated_sort, hypervolume,
    polynomial_mutation, sbx_children, sbx_crossover, GAParams, Problem,
};

/// Fronts by repeated peeling of the pairwise non-dominated set.
fn peel_fronts(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| j != i && dominates(&points[j], &points[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

/// Union volume of the boxes [p, reference] by inclusion-exclusion.
fn hv_inclusion_exclusion(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let n = points.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mut corner = vec![f64::NEG_INFINITY; reference.len()];
        for (i, p) in points.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for k in 0..reference.len() {
                    corner[k] = corner[k].max(p[k]);
                }
            }
        }
        let vol: f64 = corner.iter().zip(reference).map(|(c, r)| (r - c).max(0.0)).product();
        total += if mask.count_ones() % 2 == 1 { vol } else { -vol };
    }
    total
}

fn population(max_n: usize, max_r: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_r).prop_flat_map(move |r| {
        // Small integer grid so that ties and duplicates are common.
        prop::collection::vec(prop::collection::vec((0..6i32).prop_map(f64::from), r), 1..=max_n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sort_matches_peeling(points in population(60, 3)) {
        prop_assert_eq!(fast_non_dominated_sort(&points), peel_fronts(&points));
    }

    #[test]
    fn hypervolume_matches_inclusion_exclusion(
        points in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 3), 1..8)
    ) {
        let reference = [1.2, 1.1, 1.3];
        let a = hypervolume(&points, &reference);
        let b = hv_inclusion_exclusion(&points, &reference);
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn hypervolume_2d_matches_inclusion_exclusion(
        points in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 2), 1..10)
    ) {
        let reference = [1.0, 1.0];
        prop_assert!((hypervolume(&points, &reference) - hv_inclusion_exclusion(&points, &reference)).abs() < 1e-12);
    }

    #[test]
    fn sbx_keeps_the_midpoint(
        pair in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64, 0.0..1.0f64), 1..10),
        eta in 0.5..40.0f64,
    ) {
        let p1: Vec<f64> = pair.iter().map(|t| t.0).collect();
        let p2: Vec<f64> = pair.iter().map(|t| t.1).collect();
        let u: Vec<f64> = pair.iter().map(|t| t.2).collect();
        let (c1, c2) = sbx_children(&p1, &p2, eta, &u);
        for i in 0..p1.len() {
            prop_assert!((c1[i] + c2[i] - p1[i] - p2[i]).abs() <= 1e-12 * (1.0 + p1[i].abs() + p2[i].abs()));
        }
        let bounds = vec![(-5.0, 5.0); p1.len()];
        let (d1, d2) = sbx_crossover(&p1, &p2, eta, &u, &bounds);
        prop_assert!(d1.iter().chain(&d2).all(|v| (-5.0..=5.0).contains(v)));
    }

    #[test]
    fn half_draw_is_identity(x in prop::collection::vec(0.0..1.0f64, 1..10), eta in 0.5..40.0f64) {
        let y = x.iter().map(|v| 1.0 - v).collect::<Vec<_>>();
        let half = vec![0.5; x.len()];
        let (c1, c2) = sbx_children(&x, &y, eta, &half);
        prop_assert_eq!(&c1, &x);
        prop_assert_eq!(&c2, &y);
        let bounds = vec![(0.0, 1.0); x.len()];
        prop_assert_eq!(polynomial_mutation(&x, &bounds, eta, &half), x);
    }

    #[test]
    fn mutation_stays_in_bounds(
        genes in prop::collection::vec((0.0..1.0f64, 0.0..=1.0f64), 1..10),
        lo in -3.0..0.0f64,
        width in 0.0..4.0f64,
        eta in 0.5..40.0f64,
    ) {
        let bounds: Vec<(f64, f64)> = vec![(lo, lo + width); genes.len()];
        let x: Vec<f64> = genes.iter().map(|g| lo + g.0 * width).collect();
        let r: Vec<f64> = genes.iter().map(|g| g.1).collect();
        for (v, (a, b)) in polynomial_mutation(&x, &bounds, eta, &r).iter().zip(&bounds) {
            prop_assert!(*a <= *v && *v <= *b);
        }
    }

    #[test]
    fn trim_keeps_target_and_extremes(
        xs in prop::collection::btree_set(0u32..1000, 3..30),
        frac in 0.0..1.0f64,
    ) {
        // Points on a decreasing curve: a single non-dominated front.
        let front: Vec<[f64; 2]> = xs.iter().map(|&x| {
            let x = f64::from(x) / 1000.0;
            [x, 1.0 - x.sqrt()]
        }).collect();
        let target = 2 + ((front.len() - 2) as f64 * frac) as usize;
        let kept = dcd_trim(&front, target).unwrap();
        prop_assert_eq!(kept.len(), target);
        prop_assert!(kept.contains(&0));
        prop_assert!(kept.contains(&(front.len() - 1)));
        prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn crowding_gives_boundaries_infinity() {
    let cd = crowding_distance(&[[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]]);
    assert!(cd[0].is_infinite() && cd[2].is_infinite());
    assert!((cd[1] - 1.0).abs() < 1e-12);
}

struct Zdt1 {
    n: usize,
}

impl Problem for Zdt1 {
    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); self.n]
    }
    fn num_objectives(&self) -> usize {
        2
    }
    fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let g = 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (self.n - 1) as f64;
        vec![x[0], g * (1.0 - (x[0] / g).sqrt())]
    }
}

#[test]
fn zdt1_converges_to_the_known_front() {
    let params = GAParams {
        population_size: 60,
        generations: 150,
        eta_c: 5.0,
        eta_m: 5.0,
        seed: 11,
        ..Default::default()
    };
    let res = evolve(&Zdt1 { n: 8 }, &params).unwrap();
    let gap: f64 = res
        .population_front()
        .iter()
        .map(|ind| (ind.objectives[1] - (1.0 - ind.objectives[0].sqrt())).abs())
        .sum::<f64>()
        / res.population_front().len() as f64;
    assert!(gap < 0.05, "mean distance to front {gap}");
    let spread = res.front.iter().map(|i| i.objectives[0]).fold(0.0, f64::max)
        - res.front.iter().map(|i| i.objectives[0]).fold(1.0, f64::min);
    assert!(spread > 0.8, "front covers f1 range {spread}");
}

#[test]
fn hypervolume_history_never_decreases() {
    let params = GAParams { population_size: 20, generations: 40, seed: 5, ..Default::default() };
    let res = evolve(&Zdt1 { n: 5 }, &params).unwrap();
    assert!(res.history.windows(2).all(|w| w[1].hypervolume >= w[0].hypervolume));
    assert_eq!(res.history.len(), 41);
    // Archive members are mutually non-dominated and unique.
    for a in &res.front {
        for b in &res.front {
            assert!(!dominates(&a.objectives, &b.objectives));
        }
    }
}

#[test]
fn result_does_not_depend_on_thread_count() {
    let params = GAParams { population_size: 24, generations: 30, seed: 99, ..Default::default() };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| evolve(&Zdt1 { n: 6 }, &params).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(1));
}
