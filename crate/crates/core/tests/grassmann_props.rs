use exproj::grassmann::{proj_dim, schubert_dim, AffinePlane, Metric, Subspace};
use exproj::ratmath::{int, rat, Rational};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pair(seed: u64, n: usize) -> (Subspace, Subspace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(0..=n);
    let m = rng.gen_range(0..=n);
    (Subspace::random(n, k, 3, &mut rng), Subspace::random(n, m, 3, &mut rng))
}

/// A random affine line in R^3 with a rational offset of norm at most 1/2.
fn random_affine_line(rng: &mut ChaCha8Rng) -> AffinePlane {
    let dir = Subspace::random(3, 1, 3, rng);
    let perp = dir.orthocomplement().projector();
    let raw: Vec<Rational> = (0..3).map(|_| int(rng.gen_range(-4..=4))).collect();
    let w: Vec<Rational> = perp.iter().map(|row| row.iter().zip(&raw).map(|(a, b)| a * b).sum()).collect();
    let norm2: Rational = w.iter().map(|x| x * x).sum();
    let scale = if norm2.is_zero() {
        int(0)
    } else {
        // 1 / (2 (floor(|w|) + 1)) keeps |scale w| <= 1/2.
        let root = norm2.to_f64().unwrap().sqrt().floor() as i64;
        rat(1, 2 * (root + 1))
    };
    AffinePlane::new(dir, w.iter().map(|x| x * &scale).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(1000) })]

    #[test]
    fn sum_intersection_dimension(seed in any::<u64>(), n in 1usize..=6) {
        let (u, w) = random_pair(seed, n);
        let s = u.sum(&w).unwrap();
        let i = u.intersect(&w).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), u.dim() + w.dim());
        prop_assert!(s.contains(&u).unwrap() && s.contains(&w).unwrap());
        prop_assert!(u.contains(&i).unwrap() && w.contains(&i).unwrap());
    }

    #[test]
    fn projection_dimension_is_symmetric(seed in any::<u64>(), n in 1usize..=6) {
        let (v, w) = random_pair(seed, n);
        prop_assert_eq!(proj_dim(&v, &w).unwrap(), proj_dim(&w, &v).unwrap());
    }

    #[test]
    fn rescale_round_trip(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = Subspace::random(n, rng.gen_range(0..=n), 4, &mut rng);
        let lambda: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(1..=9), rng.gen_range(1..=9))).collect();
        let inv: Vec<Rational> = lambda.iter().map(|x| x.recip()).collect();
        prop_assert_eq!(v.rescale_star(&lambda).unwrap().rescale_star(&inv).unwrap(), v);
    }
}

#[test]
fn metric_comparability() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for (n, k) in [(3, 1), (4, 2)] {
        for _ in 0..1000 {
            let v = Subspace::random(n, k, 5, &mut rng);
            let w = Subspace::random(n, k, 5, &mut rng);
            let d = v.metric_d(&w).unwrap();
            let rho = v.metric_rho(&w).unwrap();
            assert!(rho <= d + 1e-9, "G({k},{n}): rho {rho} > d {d}");
            assert!(d <= 10.0 * rho + 1e-9, "G({k},{n}): d {d} > 10 rho {rho}");
            if rho > 1e-9 {
                worst = worst.max(d / rho);
            }
        }
    }
    for _ in 0..1000 {
        let v = random_affine_line(&mut rng);
        let w = random_affine_line(&mut rng);
        let d = v.metric_d(&w).unwrap();
        let rho = v.metric_rho(&w).unwrap();
        assert!(rho <= d + 1e-9, "A(1,3): rho {rho} > d {d}");
        assert!(d <= 10.0 * rho + 1e-9, "A(1,3): d {d} > 10 rho {rho}");
        if rho > 1e-9 {
            worst = worst.max(d / rho);
        }
    }
    eprintln!("largest observed d/rho: {worst:.4}");
}

#[test]
fn line_distance_is_sine_of_angle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=5 {
        for _ in 0..200 {
            let v = Subspace::random(n, 1, 6, &mut rng);
            let w = Subspace::random(n, 1, 6, &mut rng);
            let a = &v.orthonormal_f64()[0];
            let b = &w.orthonormal_f64()[0];
            // |a ^ b| avoids the cancellation in 1 - cos^2.
            let mut wedge = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    wedge += (a[i] * b[j] - a[j] * b[i]).powi(2);
                }
            }
            let sin = f64::sqrt(wedge);
            let d = v.metric_d(&w).unwrap();
            assert!((d - sin).abs() < 1e-9, "{v} {w}: d={d} sin={sin}");
        }
    }
}

/// For a fixed random `W`, the locus `dim pi_W(V) <= l` is hit by random
/// `V` never when it is a proper Schubert variety, always when vacuous.
#[test]
fn monte_carlo_schubert() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let samples = 10_000;
    for n in 2..=4i64 {
        for k in 1..n {
            for m in 1..n {
                let w = Subspace::random(n as usize, m as usize, 1000, &mut rng);
                let dims: Vec<usize> = (0..samples)
                    .map(|_| proj_dim(&w, &Subspace::random(n as usize, k as usize, 1000, &mut rng)).unwrap())
                    .collect();
                for l in 0..=k.min(m) {
                    let Ok(dim) = schubert_dim(n, k, m, l) else { continue };
                    let hits = dims.iter().filter(|&&d| d as i64 <= l).count();
                    if dim < k * (n - k) {
                        assert_eq!(hits, 0, "n={n} k={k} m={m} l={l}");
                    }
                    if l >= k.min(m) {
                        assert_eq!(hits, samples, "n={n} k={k} m={m} l={l}");
                    }
                }
            }
        }
    }
}
