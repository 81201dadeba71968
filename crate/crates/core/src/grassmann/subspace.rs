use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::linalg::{self, RatMatrix};
use crate::error::{Error, Result};
use crate::ratmath::{int, parse_rational, Rational};

/// A linear subspace of `R^n` with an exact rational basis.
///
/// The basis is always stored in reduced row echelon form, so two values
/// compare equal exactly when they span the same subspace.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: RatMatrix,
}

impl Subspace {
    /// Span of arbitrary (possibly dependent) rows.
    pub fn span(ambient: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        if ambient == 0 {
            return Err(Error::Domain("ambient dimension must be positive".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != ambient) {
            return Err(Error::AmbientMismatch { left: ambient, right: bad.len() });
        }
        let mut basis = rows;
        linalg::rref(&mut basis, ambient);
        Ok(Self { ambient, basis })
    }

    /// Like [`Subspace::span`] but rejects linearly dependent rows.
    pub fn from_basis(ambient: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let given = rows.len();
        let space = Self::span(ambient, rows)?;
        if space.dim() != given {
            return Err(Error::Domain(format!(
                "basis rows are dependent: {given} rows span dimension {}",
                space.dim()
            )));
        }
        Ok(space)
    }

    pub fn from_int_rows(ambient: usize, rows: &[&[i64]]) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::span(ambient, rows)
    }

    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self { ambient, basis: linalg::identity(ambient) }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient: usize, axes: &[usize]) -> Result<Self> {
        let mut rows = Vec::with_capacity(axes.len());
        for &axis in axes {
            if axis >= ambient {
                return Err(Error::Range(format!("axis {axis} outside R^{ambient}")));
            }
            let mut row = vec![Rational::zero(); ambient];
            row[axis] = Rational::one();
            rows.push(row);
        }
        Self::span(ambient, rows)
    }

    /// All `2^n` coordinate subspaces, ordered by dimension then axis mask.
    pub fn all_coordinate(ambient: usize) -> Vec<Self> {
        let mut masks: Vec<u32> = (0..1u32 << ambient).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        masks
            .into_iter()
            .map(|mask| {
                let axes: Vec<usize> = (0..ambient).filter(|i| mask & (1 << i) != 0).collect();
                Self::coordinate(ambient, &axes).expect("axes in range")
            })
            .collect()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical (RREF) basis rows.
    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch { left: self.ambient, right: other.ambient });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let rows = self.basis.iter().chain(&other.basis).cloned().collect();
        Self::span(self.ambient, rows)
    }

    /// Exact intersection, computed as `(U^perp + W^perp)^perp`.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let duals = linalg::nullspace(&self.basis, self.ambient)
            .into_iter()
            .chain(linalg::nullspace(&other.basis, self.ambient))
            .collect::<Vec<_>>();
        Self::span(self.ambient, linalg::nullspace(&duals, self.ambient))
    }

    pub fn orthocomplement(&self) -> Self {
        Self::span(self.ambient, linalg::nullspace(&self.basis, self.ambient))
            .expect("nullspace rows have ambient length")
    }

    pub fn contains(&self, other: &Self) -> Result<bool> {
        Ok(self.sum(other)?.dim() == self.dim())
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        v.len() == self.ambient && linalg::rank(&[self.basis.clone(), vec![v.to_vec()]].concat(), self.ambient) == self.dim()
    }

    /// Exact orthogonal projection matrix `B^T (B B^T)^{-1} B`.
    pub fn projector(&self) -> RatMatrix {
        let n = self.ambient;
        if self.basis.is_empty() {
            return vec![vec![Rational::zero(); n]; n];
        }
        let bt = linalg::transpose(&self.basis, n);
        let gram = linalg::mat_mul(&self.basis, &bt);
        let inv = linalg::inverse(&gram).expect("basis rows are independent");
        linalg::mat_mul(&linalg::mat_mul(&bt, &inv), &self.basis)
    }

    /// Orthonormal basis (rows) in binary64, by Gram-Schmidt on the RREF rows.
    pub fn orthonormal_f64(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(self.dim());
        for row in linalg::to_float(&self.basis) {
            let mut v = row;
            for _ in 0..2 {
                for q in &out {
                    let c: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                    for (x, y) in v.iter_mut().zip(q) {
                        *x -= c * y;
                    }
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
        out
    }

    /// `(L(V^perp))^perp` for the diagonal dilation `L = diag(scale)`.
    pub fn rescale_star(&self, scale: &[Rational]) -> Result<Self> {
        if scale.len() != self.ambient {
            return Err(Error::AmbientMismatch { left: self.ambient, right: scale.len() });
        }
        if let Some(bad) = scale.iter().find(|x| !x.is_positive()) {
            return Err(Error::Domain(format!("scale entries must be positive, got {bad}")));
        }
        let dilated = self
            .orthocomplement()
            .basis
            .iter()
            .map(|row| row.iter().zip(scale).map(|(x, c)| x * c).collect())
            .collect();
        Ok(Self::span(self.ambient, dilated)?.orthocomplement())
    }

    /// Parses the plain-text subspace format: `n d` then `d` rows of `n`
    /// rationals. Rows are canonicalized on load.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        Self::parse_block(&mut lines)
    }

    pub(crate) fn parse_block<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<Self> {
        let (lineno, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_usize = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse { line: lineno, msg: format!("expected integer, got {s:?}") })
        };
        if fields.len() != 2 {
            return Err(Error::Parse { line: lineno, msg: "header must be \"n d\"".into() });
        }
        let n = parse_usize(fields[0])?;
        let d = parse_usize(fields[1])?;
        if d > n {
            return Err(Error::Parse { line: lineno, msg: format!("d = {d} exceeds n = {n}") });
        }
        let mut rows = Vec::with_capacity(d);
        for _ in 0..d {
            let (lineno, line) = lines.next().ok_or(Error::Parse { line: lineno, msg: "missing basis row".into() })?;
            let row = line
                .split_whitespace()
                .map(|tok| parse_rational(tok).map_err(|_| Error::Parse { line: lineno, msg: format!("bad rational {tok:?}") }))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(Error::Parse { line: lineno, msg: format!("expected {n} entries, got {}", row.len()) });
            }
            rows.push(row);
        }
        Self::from_basis(n, rows).map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })
    }

    /// Inverse of [`Subspace::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.ambient, self.dim());
        for row in &self.basis {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    /// Random subspace of dimension `dim` spanned by integer rows with entries
    /// in `[-range, range]`; redraws until the rows are independent.
    pub fn random<R: Rng + ?Sized>(ambient: usize, dim: usize, range: i64, rng: &mut R) -> Self {
        assert!(dim <= ambient);
        loop {
            let rows = (0..dim)
                .map(|_| (0..ambient).map(|_| int(rng.gen_range(-range..=range))).collect())
                .collect();
            if let Ok(space) = Self::from_basis(ambient, rows) {
                return space;
            }
        }
    }
}

/// Orders by ambient dimension, then dimension, then the canonical rows
/// lexicographically.
impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient
            .cmp(&other.ambient)
            .then(self.dim().cmp(&other.dim()))
            .then_with(|| self.basis.cmp(&other.basis))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim() == 0 {
            return write!(f, "{{0}}");
        }
        if self.dim() == self.ambient {
            return write!(f, "R^{}", self.ambient);
        }
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| format!("({})", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "span{{{}}}", rows.join(", "))
    }
}

/// `dim pi_V(W) = dim W - dim(W cap V^perp)`; symmetric in `V` and `W`.
pub fn proj_dim(v: &Subspace, w: &Subspace) -> Result<usize> {
    let kernel = w.intersect(&v.orthocomplement())?;
    Ok(w.dim() - kernel.dim())
}
