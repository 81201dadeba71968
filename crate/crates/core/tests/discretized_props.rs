use exproj::discretized::*;
use exproj::ratmath::{int, rat};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_separated(seed: u64, dim: usize, count: usize) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Distinct points of a 1/256 lattice, so delta = 1/256 separation holds.
    let mut pts: Vec<Vec<f64>> = Vec::new();
    while pts.len() < count {
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(0..256) as f64 / 256.0).collect();
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    PointSet::new(dim, pts, 1.0 / 256.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(200) })]

    #[test]
    fn extracted_sets_repass_frostman(seed in any::<u64>(), dim in 1usize..=2, count in 1usize..120, sq in 1i64..=4, c in 1u32..4) {
        let set = random_separated(seed, dim, count);
        let s = rat(sq * dim as i64, 4);
        let out = extract_delta_s_set(&set, &s, c as f64);
        prop_assert!(check_frostman(&out, &s, c as f64).pass);
        prop_assert!(!out.is_empty());
    }
}

fn cantor(seed: u64) -> (PointSet, BroadNarrowParams) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, keep, depth) = [(4, 2, 6), (4, 3, 6), (8, 4, 4), (16, 4, 3), (16, 8, 3)][rng.gen_range(0..5)];
    let set = random_cantor_set(k, keep, depth, &mut rng).unwrap();
    // tau = log keep / log K, rounded down to a rational with denominator 20.
    let tau = ((keep as f64).ln() / (k as f64).ln() * 20.0).floor() as i64;
    (set, BroadNarrowParams::new(rat(tau, 20), rat(1, 20), k))
}

#[test]
fn broad_narrow_thresholds_hold_on_synthetic_sets() {
    for seed in 0..100 {
        let (set, params) = cantor(seed);
        let rep = broad_narrow(&set, &params).unwrap();
        let found = rep.found.as_ref().unwrap_or_else(|| panic!("seed {seed}: {rep}"));
        assert!(found.verified, "seed {seed}");
        assert!(found.cells.len() >= rep.required);
        let threshold = params.threshold(found.r, set.delta(), 1);
        for (cell, n) in &found.cells {
            let recount = set.points().iter().filter(|x| cell.contains(x)).count();
            assert_eq!(recount, *n);
            assert!(recount as f64 >= threshold);
        }
    }
}

#[test]
fn top_cells_certificate_on_random_capped_sets() {
    let part: Vec<Cell> = (0..16).map(|i| Cell::new(4, 2, vec![i]).unwrap()).collect();
    for seed in 0..1000 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = random_cantor_set(4, 2, 6, &mut rng).unwrap();
        // J = floor(16^{1/2} / 2).
        let top = top_cells(&set, &part, 2).unwrap();
        assert!(top.holds(), "seed {seed}");
        assert!(top.certificate() >= rat(set.len() as i64, 2 * part.len() as i64), "seed {seed}");
    }
}

#[test]
fn grid_counts_on_the_slope_set() {
    for n in [16u64, 64, 256, 1024] {
        for (a, s) in [(int(1), rat(3, 4)), (int(1), rat(1, 2)), (rat(3, 2), rat(4, 5))] {
            let g = st_grid_example(n, &a, &s).unwrap();
            assert_eq!(g.slope_count(), 2 * g.slope_max as u64 + 1);
            let slopes: Vec<i64> = g.slopes().collect();
            for (k, c) in slopes.iter().zip(slope_counts(&g, &slopes)) {
                assert_eq!(c, g.closed_form_count(*k));
                assert!(c <= 4 * g.y_max as u64 + 1, "N={n} a={a} s={s} k={k}");
            }
        }
    }
}

#[test]
fn exceptional_count_grows_like_n_to_2s_minus_a() {
    let samples: Vec<(f64, f64)> = [256u64, 1024, 4096, 16384]
        .iter()
        .map(|&n| {
            let g = st_grid_example(n, &int(1), &rat(3, 4)).unwrap();
            let scan = exceptional_scan(&g, 5.0).unwrap();
            assert!(g.slopes().all(|k| scan.exceptional.contains(&k)));
            (n as f64, scan.count() as f64)
        })
        .collect();
    let slope = loglog_slope(&samples).unwrap();
    assert!((slope - 0.5).abs() <= 0.1, "fitted exponent {slope}");
}
