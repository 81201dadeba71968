//! Shared fixtures for the criterion benchmarks.

use exproj::brascamplieb::BLConfig;
use exproj::ratmath::rat;
use exproj::{Problem, Rational, Subspace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` random lines in R^n with integer entries in [-5, 5], exponent `p`.
pub fn random_lines(n: usize, count: usize, p: Rational, seed: u64) -> BLConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lines = (0..count).map(|_| Subspace::random(n, 1, 5, &mut rng)).collect();
    BLConfig::new(lines, p).expect("valid config")
}

/// Admissible (a, s) points of a problem on the 1/grid lattice.
pub fn admissible_grid(prob: &Problem, grid: i64) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    for i in 1..=prob.n() * grid {
        let a = rat(i, grid);
        for j in 1..=prob.n() * grid {
            let s = rat(j, grid);
            if prob.check_as(&a, &s).is_ok() {
                out.push((a.clone(), s));
            }
        }
    }
    out
}
