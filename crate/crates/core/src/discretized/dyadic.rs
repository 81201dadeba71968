use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};

use super::pointset::PointSet;
use crate::error::{Error, Result};
use crate::ratmath::{to_f64, Rational};

/// Finest level accepted; keeps `2^level` exact in `f64`.
pub const MAX_LEVEL: u32 = 52;

/// The dyadic cube `prod_i [index_i 2^-level, (index_i + 1) 2^-level)` in `[0,1]^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube {
    level: u32,
    index: Vec<u64>,
}

impl DyadicCube {
    pub fn new(level: u32, index: Vec<u64>) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::Domain(format!("dyadic level {level} exceeds {MAX_LEVEL}")));
        }
        if index.is_empty() {
            return Err(Error::Domain("dyadic cube needs at least one coordinate".into()));
        }
        let side = 1u64 << level;
        if let Some(bad) = index.iter().find(|&&i| i >= side) {
            return Err(Error::Domain(format!("index {bad} out of range at level {level}")));
        }
        Ok(Self { level, index })
    }

    pub fn unit(dim: usize) -> Self {
        Self { level: 0, index: vec![0; dim] }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> &[u64] {
        &self.index
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// The unique ancestor at a coarser level.
    pub fn ancestor(&self, level: u32) -> Self {
        assert!(level <= self.level);
        let shift = self.level - level;
        Self { level, index: self.index.iter().map(|i| i >> shift).collect() }
    }

    /// Half-open membership, except that the coordinate 1 belongs to the last cube.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && cube_of(x, self.level).is_some_and(|idx| idx == self.index)
    }
}

fn cube_of(x: &[f64], level: u32) -> Option<Vec<u64>> {
    let side = (1u64 << level) as f64;
    x.iter()
        .map(|&c| {
            if !(0.0..=1.0).contains(&c) {
                return None;
            }
            Some(((c * side).floor() as u64).min((1u64 << level) - 1))
        })
        .collect()
}

/// Itemized outcome of [`verify_dyadic_covering`].
#[derive(Clone, Debug, PartialEq)]
pub struct CoveringReport {
    /// Indices of target points not in any cube.
    pub uncovered: Vec<usize>,
    /// `sum 2^{-j s}` over the cover.
    pub weight: f64,
    pub weight_ok: bool,
    /// First `(D, k, count)` with `count > 2^{(k-l) s}`, `l` the level of `D`.
    pub dimension_violation: Option<(DyadicCube, u32, usize)>,
}

impl CoveringReport {
    pub fn coverage_ok(&self) -> bool {
        self.uncovered.is_empty()
    }

    pub fn dimension_ok(&self) -> bool {
        self.dimension_violation.is_none()
    }

    pub fn pass(&self) -> bool {
        self.coverage_ok() && self.weight_ok && self.dimension_ok()
    }
}

/// Checks a dyadic cover: (1) it covers `target`; (2) `sum r(D)^s <= eps`;
/// (3) each level class is `s`-dimensional: for every dyadic `D` at level
/// `l` and every finer level `k`, at most `2^{(k-l)s}` cover cubes of level
/// `k` lie in `D`. Repeated cubes count once.
pub fn verify_dyadic_covering(
    cover: &[DyadicCube],
    target: &PointSet,
    s: &Rational,
    eps: &Rational,
) -> Result<CoveringReport> {
    if s.is_negative() {
        return Err(Error::Domain(format!("s = {s} must be nonnegative")));
    }
    if let Some(c) = cover.iter().find(|c| c.dim() != target.dim()) {
        return Err(Error::AmbientMismatch { left: target.dim(), right: c.dim() });
    }
    let cover: BTreeSet<&DyadicCube> = cover.iter().collect();

    let uncovered = target
        .points()
        .iter()
        .enumerate()
        .filter(|(_, x)| !cover.iter().any(|c| c.contains(x)))
        .map(|(i, _)| i)
        .collect();

    let sf = to_f64(s);
    let weight: f64 = cover.iter().map(|c| (-(c.level as f64) * sf).exp2()).sum();
    let weight_ok = weight <= to_f64(eps) * (1.0 + 1e-12);

    let p = s.numer().to_u32().ok_or_else(|| Error::Range(format!("s = {s} too large")))?;
    let q = s.denom().to_u32().ok_or_else(|| Error::Range(format!("s = {s} too large")))?;
    let mut by_level: BTreeMap<u32, Vec<&DyadicCube>> = BTreeMap::new();
    for c in &cover {
        by_level.entry(c.level).or_default().push(c);
    }
    let mut dimension_violation = None;
    'outer: for (&k, cubes) in &by_level {
        for l in 0..=k {
            let mut counts: BTreeMap<DyadicCube, usize> = BTreeMap::new();
            for c in cubes {
                *counts.entry(c.ancestor(l)).or_default() += 1;
            }
            // count <= 2^{(k-l) p/q}  <=>  count^q <= 2^{(k-l) p}
            let cap = BigUint::from(1u32) << ((k - l) as u64 * p as u64);
            if let Some((d, &count)) = counts.iter().find(|(_, &n)| BigUint::from(n).pow(q) > cap) {
                dimension_violation = Some((d.clone(), k, count));
                break 'outer;
            }
        }
    }

    Ok(CoveringReport { uncovered, weight, weight_ok, dimension_violation })
}
