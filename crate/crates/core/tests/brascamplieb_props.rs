use exproj::brascamplieb::{bl_constant, lattice_closure, BLConfig, CandidateFamily, DEFAULT_CAP};
use exproj::grassmann::Subspace;
use exproj::ratmath::{int, rat, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_config(seed: u64) -> (BLConfig, CandidateFamily) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=4);
    let k = rng.gen_range(1..n);
    let j = rng.gen_range(1..=3);
    let ws: Vec<Subspace> = (0..j).map(|_| Subspace::random(n, k, 2, &mut rng)).collect();
    let fam = lattice_closure(n, &ws, DEFAULT_CAP).unwrap();
    (BLConfig::new(ws, int(1)).unwrap(), fam)
}

fn value(cfg: &BLConfig, p: Rational, fam: &CandidateFamily) -> Rational {
    bl_constant(&cfg.with_p(p).unwrap(), fam).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(60) })]

    /// A max of affine functions of `p`: midpoint convexity on 5 equally
    /// spaced exponents.
    #[test]
    fn convex_in_p(seed in any::<u64>()) {
        let (cfg, fam) = random_config(seed);
        let ps: Vec<Rational> = (0..5).map(|i| rat(2 + i, 2)).collect();
        let vs: Vec<Rational> = ps.iter().map(|p| value(&cfg, p.clone(), &fam)).collect();
        for w in vs.windows(3) {
            prop_assert!(&w[1] * int(2) <= &w[0] + &w[2]);
        }
        for w in vs.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn floor_from_trivial_candidates(seed in any::<u64>(), p in 2i64..12) {
        let (cfg, fam) = random_config(seed);
        let n = cfg.ambient_dim() as i64;
        let k = cfg.subspaces()[0].dim() as i64;
        let p = rat(p, 2);
        let floor = (int(n) - &p * int(k)).max(int(0));
        prop_assert!(value(&cfg, p, &fam) >= floor);
    }

    #[test]
    fn monotone_in_candidates(seed in any::<u64>(), extra in any::<u64>()) {
        let (cfg, fam) = random_config(seed);
        let n = cfg.ambient_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(extra);
        let more: Vec<Subspace> = fam
            .subspaces()
            .iter()
            .cloned()
            .chain((0..3).map(|_| { let d = rng.gen_range(0..=n); Subspace::random(n, d, 3, &mut rng) }))
            .collect();
        let bigger = CandidateFamily::from_subspaces(n, more).unwrap();
        for p in [int(1), rat(3, 2), int(2)] {
            prop_assert!(value(&cfg, p.clone(), &bigger) >= value(&cfg, p, &fam));
        }
    }
}
