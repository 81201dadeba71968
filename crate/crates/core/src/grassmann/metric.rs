//! Float metrics on `G(k,n)` and `A(k,n)`, and slabs `V_r`.

use num_traits::Zero;

use super::linalg::{self, operator_norm};
use super::subspace::Subspace;
use crate::error::{Error, Result};
use crate::ratmath::{rat, to_f64, Rational};

/// An affine `k`-plane `dir + offset` with `offset` orthogonal to `dir` and
/// `|offset| <= 1/2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffinePlane {
    direction: Subspace,
    offset: Vec<Rational>,
}

impl AffinePlane {
    pub fn new(direction: Subspace, offset: Vec<Rational>) -> Result<Self> {
        let n = direction.ambient_dim();
        if offset.len() != n {
            return Err(Error::AmbientMismatch { left: n, right: offset.len() });
        }
        if direction.basis().iter().any(|row| !linalg::dot(row, &offset).is_zero()) {
            return Err(Error::Domain("offset is not orthogonal to the direction".into()));
        }
        let norm2 = linalg::dot(&offset, &offset);
        if norm2 > rat(1, 4) {
            return Err(Error::Domain(format!("offset norm^2 = {norm2} exceeds 1/4")));
        }
        Ok(Self { direction, offset })
    }

    pub fn linear(direction: Subspace) -> Self {
        let n = direction.ambient_dim();
        Self { direction, offset: vec![Rational::zero(); n] }
    }

    pub fn direction(&self) -> &Subspace {
        &self.direction
    }

    pub fn offset(&self) -> &[Rational] {
        &self.offset
    }

    pub fn offset_f64(&self) -> Vec<f64> {
        self.offset.iter().map(to_f64).collect()
    }
}

/// `V_r = N_r(V) cap B^n(0,1)` for an affine plane `V`.
#[derive(Clone, Debug)]
pub struct Slab {
    plane: AffinePlane,
    radius: f64,
    complement: Vec<Vec<f64>>,
    offset: Vec<f64>,
}

impl Slab {
    pub fn new(plane: AffinePlane, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::Domain(format!("slab radius {radius} not in (0,1)")));
        }
        let n = plane.direction.ambient_dim();
        let p = plane.direction.projector();
        let complement = linalg::to_float(&linalg::mat_sub(&linalg::identity(n), &p));
        let offset = plane.offset_f64();
        Ok(Self { plane, radius, complement, offset })
    }

    pub fn plane(&self) -> &AffinePlane {
        &self.plane
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Euclidean distance from `x` to the affine plane.
    pub fn distance(&self, x: &[f64]) -> f64 {
        self.complement
            .iter()
            .zip(&self.offset)
            .map(|(row, o)| {
                let v: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - o;
                v * v
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.offset.len() && norm(x) <= 1.0 && self.distance(x) <= self.radius
    }
}

pub fn slab_membership(slab: &Slab, x: &[f64]) -> bool {
    slab.contains(x)
}

/// The two comparable metrics `d` and `rho`.
pub trait Metric {
    /// Operator-norm distance between projections (plus offset distance for
    /// affine planes).
    fn metric_d(&self, other: &Self) -> Result<f64>;
    /// Smallest `rho` with `B^n(0,1) cap self` inside `N_rho(other)`.
    fn metric_rho(&self, other: &Self) -> Result<f64>;
}

fn check_pair(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::AmbientMismatch { left: a.ambient_dim(), right: b.ambient_dim() });
    }
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(format!("dim {} vs dim {}", a.dim(), b.dim())));
    }
    Ok(())
}

impl Metric for Subspace {
    fn metric_d(&self, other: &Self) -> Result<f64> {
        check_pair(self, other)?;
        let diff = linalg::mat_sub(&self.projector(), &other.projector());
        Ok(operator_norm(&diff, self.ambient_dim()))
    }

    fn metric_rho(&self, other: &Self) -> Result<f64> {
        check_pair(self, other)?;
        let n = self.ambient_dim();
        let residual = linalg::mat_sub(&linalg::identity(n), &other.projector());
        Ok(operator_norm(&linalg::mat_mul(&residual, &self.projector()), n))
    }
}

impl Metric for AffinePlane {
    fn metric_d(&self, other: &Self) -> Result<f64> {
        let dir = self.direction.metric_d(&other.direction)?;
        let gap = self.offset.iter().zip(&other.offset).map(|(x, y)| to_f64(&(x - y)).powi(2)).sum::<f64>();
        Ok(dir + gap.sqrt())
    }

    /// Maximizes `|c + M y|` over `|y| <= R`, where a point of the unit-ball
    /// slice of `self` is `x_V + Q y`, `c = (I - P')(x_V - x_V')`,
    /// `M = (I - P') Q` and `R = sqrt(1 - |x_V|^2)`.
    fn metric_rho(&self, other: &Self) -> Result<f64> {
        check_pair(&self.direction, &other.direction)?;
        let n = self.direction.ambient_dim();
        let residual = linalg::to_float(&linalg::mat_sub(&linalg::identity(n), &other.direction.projector()));
        let xv = self.offset_f64();
        let diff: Vec<f64> = xv.iter().zip(other.offset_f64()).map(|(a, b)| a - b).collect();
        let c = mat_vec(&residual, &diff);
        let q = self.direction.orthonormal_f64();
        let radius = (1.0 - xv.iter().map(|x| x * x).sum::<f64>()).max(0.0).sqrt();
        if q.is_empty() {
            return Ok(norm(&c));
        }
        // Columns of M are (I - P') q_i.
        let m_cols: Vec<Vec<f64>> = q.iter().map(|qi| mat_vec(&residual, qi)).collect();
        let k = m_cols.len();
        let gram: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| dotf(&m_cols[i], &m_cols[j])).collect()).collect();
        let b: Vec<f64> = m_cols.iter().map(|col| dotf(col, &c)).collect();
        let value = |y: &[f64]| {
            let mut v = c.clone();
            for (col, yi) in m_cols.iter().zip(y) {
                for (vj, cj) in v.iter_mut().zip(col) {
                    *vj += yi * cj;
                }
            }
            norm(&v)
        };
        let (values, vectors) = linalg::symmetric_eigen(gram.clone(), 1e-14);
        let top = values
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, _)| vectors[i].clone())
            .unwrap_or_default();
        let mut starts = vec![top.clone(), top.iter().map(|x| -x).collect::<Vec<_>>()];
        if norm(&b) > 0.0 {
            starts.push(b.clone());
        }
        let mut best = value(&vec![0.0; k]);
        for start in starts {
            let scale = norm(&start);
            if scale == 0.0 {
                continue;
            }
            let mut y: Vec<f64> = start.iter().map(|x| radius * x / scale).collect();
            for _ in 0..500 {
                // Majorize-minimize step for a convex objective on a ball.
                let g: Vec<f64> = (0..k).map(|i| dotf(&gram[i], &y) + b[i]).collect();
                let gn = norm(&g);
                if gn == 0.0 {
                    break;
                }
                let next: Vec<f64> = g.iter().map(|x| radius * x / gn).collect();
                let step = next.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                y = next;
                if step < 1e-15 {
                    break;
                }
            }
            best = best.max(value(&y));
        }
        Ok(best)
    }
}

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dotf(a, a).sqrt()
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dotf(row, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmath::int;

    fn line(x: i64, y: i64) -> Subspace {
        Subspace::from_int_rows(2, &[&[x, y]]).unwrap()
    }

    #[test]
    fn metric_d_examples() {
        assert!((line(1, 0).metric_d(&line(0, 1)).unwrap() - 1.0).abs() < 1e-12);
        assert!(line(1, 3).metric_d(&line(1, 3)).unwrap().abs() < 1e-12);
        let got = line(1, 0).metric_d(&line(1, 1)).unwrap();
        assert!((got - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn metric_rho_examples() {
        assert!(line(2, 5).metric_rho(&line(2, 5)).unwrap().abs() < 1e-12);
        assert!((line(1, 0).metric_rho(&line(0, 1)).unwrap() - 1.0).abs() < 1e-12);
        let got = line(1, 0).metric_rho(&line(1, 1)).unwrap();
        assert!((got - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn metric_rejects_mismatch() {
        let plane = Subspace::full(2);
        assert!(matches!(line(1, 0).metric_d(&plane), Err(Error::DimMismatch(_))));
        assert!(matches!(line(1, 0).metric_d(&Subspace::coordinate(3, &[0]).unwrap()), Err(Error::AmbientMismatch { .. })));
    }

    #[test]
    fn affine_offsets() {
        let x_axis = line(1, 0);
        let shifted = AffinePlane::new(x_axis.clone(), vec![int(0), rat(1, 4)]).unwrap();
        let base = AffinePlane::linear(x_axis.clone());
        assert!((shifted.metric_d(&base).unwrap() - 0.25).abs() < 1e-12);
        assert!((shifted.metric_rho(&base).unwrap() - 0.25).abs() < 1e-12);
        assert!(AffinePlane::new(x_axis.clone(), vec![int(0), rat(3, 4)]).is_err());
        assert!(AffinePlane::new(x_axis, vec![rat(1, 4), int(0)]).is_err());
    }

    #[test]
    fn affine_rho_tilted_line() {
        // x-axis vs the line through (0,1/4) in direction (1,1)/sqrt 2: the
        // worst point of the unit-ball chord is an endpoint.
        let tilted = AffinePlane::new(line(1, 1), vec![rat(-1, 8), rat(1, 8)]).unwrap();
        let base = AffinePlane::linear(line(1, 0));
        let got = tilted.metric_rho(&base).unwrap();
        let r = (1.0f64 - 1.0 / 32.0).sqrt();
        let want = 0.125 + r / 2f64.sqrt();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn slab_membership_examples() {
        let slab = Slab::new(AffinePlane::linear(line(1, 0)), 0.1).unwrap();
        assert!(slab_membership(&slab, &[0.0, 0.0]));
        assert!(!slab_membership(&slab, &[2.0, 0.0]));
        assert!(slab_membership(&slab, &[0.5, 0.05]));
        assert!(!slab_membership(&slab, &[0.5, 0.2]));
        assert!(Slab::new(AffinePlane::linear(line(1, 0)), 1.0).is_err());
    }
}
