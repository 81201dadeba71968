use std::collections::BTreeSet;

use rayon::prelude::*;

use super::pointset::{dist, PointSet};
use crate::error::{Error, Result};
use crate::grassmann::{AffinePlane, Slab, Subspace};
use crate::ratmath::{rat, to_f64, Rational};

/// `delta^n * sum_x (sum_T 1_T(x))^p` over the nodes `x` of the lattice
/// `delta Z^n` lying in some ball `B(w, delta)`, `w in W`; each node is the
/// center of its `delta`-cell and counts once.
pub fn multilinear_tally(w: &PointSet, slab_families: &[Vec<Slab>], p: &Rational) -> Result<f64> {
    let n = w.dim();
    for slab in slab_families.iter().flatten() {
        let m = slab.plane().direction().ambient_dim();
        if m != n {
            return Err(Error::AmbientMismatch { left: n, right: m });
        }
    }
    let delta = w.delta();
    let nodes = lattice_nodes(w);
    let slabs: Vec<&Slab> = slab_families.iter().flatten().collect();
    let pf = to_f64(p);
    let sum: f64 = nodes
        .par_iter()
        .map(|node| {
            let x: Vec<f64> = node.iter().map(|&i| i as f64 * delta).collect();
            let hits = slabs.iter().filter(|s| s.contains(&x)).count();
            if hits == 0 {
                0.0
            } else {
                (hits as f64).powf(pf)
            }
        })
        .sum();
    Ok(sum * delta.powi(n as i32))
}

fn lattice_nodes(w: &PointSet) -> BTreeSet<Vec<i64>> {
    let delta = w.delta();
    let n = w.dim() as u32;
    let mut nodes = BTreeSet::new();
    for c in w.points() {
        let base: Vec<i64> = c.iter().map(|x| (x / delta).round() as i64).collect();
        // Offsets in {-2..2}^n reach every node within delta of `c`.
        for code in 0..5usize.pow(n) {
            let mut code = code;
            let node: Vec<i64> = base
                .iter()
                .map(|&b| {
                    let off = (code % 5) as i64 - 2;
                    code /= 5;
                    b + off
                })
                .collect();
            let x: Vec<f64> = node.iter().map(|&i| i as f64 * delta).collect();
            if dist(&x, c) <= delta * (1.0 + 1e-9) {
                nodes.insert(node);
            }
        }
    }
    nodes
}

/// Desk-scale planar configuration: `directions` rational unit vectors
/// `v_j = ((1 - t^2), 2t) / (1 + t^2)` with `t = j/8`, and for each `v_j`
/// `slabs_per_direction` slabs of radius `delta/2` around the lines
/// `{x : x . v_j = c_i}`, `c_i` evenly spaced in `(-1/2, 1/2)`.
/// `W` is the set of points of the `2 delta`-grid in the unit disk whose
/// `delta`-ball meets some slab.
pub fn planar_slab_configuration(
    delta: f64,
    directions: u32,
    slabs_per_direction: u32,
) -> Result<(PointSet, Vec<Vec<Slab>>)> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Domain(format!("delta = {delta} outside (0, 1/2)")));
    }
    let mut families = Vec::with_capacity(directions as usize);
    for j in 0..directions as i64 {
        // t = j/8: unit vector (64 - j^2, 16 j) / (64 + j^2).
        let den = 64 + j * j;
        let v = [rat(64 - j * j, den), rat(16 * j, den)];
        let normal_line = Subspace::span(2, vec![v.to_vec()])?;
        let direction = normal_line.orthocomplement();
        let mut family = Vec::with_capacity(slabs_per_direction as usize);
        for i in 0..slabs_per_direction as i64 {
            let c = rat(2 * i + 1, 2 * slabs_per_direction as i64) - rat(1, 2);
            let offset = v.iter().map(|x| x * &c).collect();
            family.push(Slab::new(AffinePlane::new(direction.clone(), offset)?, delta / 2.0)?);
        }
        families.push(family);
    }
    let steps = (1.0 / (2.0 * delta)).floor() as i64;
    let mut centers = Vec::new();
    for a in -steps..=steps {
        for b in -steps..=steps {
            let x = vec![a as f64 * 2.0 * delta, b as f64 * 2.0 * delta];
            if x[0].hypot(x[1]) > 1.0 {
                continue;
            }
            if families.iter().flatten().any(|s| s.distance(&x) <= s.radius() + delta) {
                centers.push(x);
            }
        }
    }
    Ok((PointSet::new(2, centers, delta)?, families))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmath::int;

    fn wide_slab() -> Slab {
        let x_axis = Subspace::coordinate(2, &[0]).unwrap();
        Slab::new(AffinePlane::linear(x_axis), 0.5).unwrap()
    }

    #[test]
    fn single_slab_single_ball() {
        let delta = 0.01;
        let w = PointSet::new(2, vec![vec![0.0, 0.0]], delta).unwrap();
        let one = multilinear_tally(&w, &[vec![wide_slab()]], &int(1)).unwrap();
        // Center plus its four lattice neighbours.
        assert!((one - 5.0 * delta * delta).abs() < 1e-15);
        let two = multilinear_tally(&w, &[vec![wide_slab()], vec![wide_slab()]], &int(2)).unwrap();
        let one_sq = multilinear_tally(&w, &[vec![wide_slab()]], &int(2)).unwrap();
        assert!((two - 4.0 * one_sq).abs() < 1e-15);
    }

    #[test]
    fn empty_families_give_zero() {
        let w = PointSet::new(2, vec![vec![0.0, 0.0]], 0.01).unwrap();
        assert_eq!(multilinear_tally(&w, &[], &int(1)).unwrap(), 0.0);
        let w3 = PointSet::new(3, vec![vec![0.0; 3]], 0.01).unwrap();
        assert!(multilinear_tally(&w3, &[vec![wide_slab()]], &int(1)).is_err());
    }

    #[test]
    fn planar_configuration_shape() {
        let (w, fam) = planar_slab_configuration(1.0 / 64.0, 4, 4).unwrap();
        assert_eq!(fam.len(), 4);
        assert!(fam.iter().all(|f| f.len() == 4));
        assert!(!w.is_empty());
        let tally = multilinear_tally(&w, &fam, &int(1)).unwrap();
        assert!(tally > 0.0);
    }

    #[test]
    fn planar_desk_scale_against_rhs() {
        use crate::bounds::{lambda_p, Problem};
        let delta = (-8f64).exp2();
        let (w, fam) = planar_slab_configuration(delta, 16, 16).unwrap();
        let lambda = to_f64(&lambda_p(&Problem::new(2, 1).unwrap(), 0, &int(2)).unwrap());
        let tally = multilinear_tally(&w, &fam, &int(2)).unwrap();
        let rhs = 10.0 * delta.powi(2) * delta.powf(-lambda) * delta.powi(-2);
        assert!(tally <= rhs, "tally {tally} > {rhs}");
        assert!(tally > 0.0);
    }
}
