use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index::sample;
use rand::Rng;

use super::pointset::PointSet;
use crate::error::{Error, Result};
use crate::ratmath::{int, to_f64, Rational};

/// Largest `K^level` accepted, so cell indices stay exact in `f64`.
const MAX_CELLS_PER_AXIS: u64 = 1 << 40;

/// A `K^-level` cube `prod_i [index_i K^-level, (index_i + 1) K^-level)` of `[0,1]^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    base: u64,
    level: u32,
    index: Vec<u64>,
}

impl Cell {
    pub fn new(base: u64, level: u32, index: Vec<u64>) -> Result<Self> {
        let side = axis_cells(base, level)?;
        if let Some(bad) = index.iter().find(|&&i| i >= side) {
            return Err(Error::Domain(format!("cell index {bad} out of range at level {level}")));
        }
        Ok(Self { base, level, index })
    }

    pub fn root(base: u64, dim: usize) -> Self {
        Self { base, level: 0, index: vec![0; dim] }
    }

    /// The cell of `x` at `level`; the coordinate 1 belongs to the last cell.
    pub fn of_point(base: u64, level: u32, x: &[f64]) -> Result<Self> {
        let side = axis_cells(base, level)?;
        let index = x
            .iter()
            .map(|&c| {
                if !(0.0..=1.0).contains(&c) {
                    return Err(Error::Domain(format!("coordinate {c} outside [0,1]")));
                }
                Ok(((c * side as f64).floor() as u64).min(side - 1))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { base, level, index })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> &[u64] {
        &self.index
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.index.len() && Cell::of_point(self.base, self.level, x).is_ok_and(|c| c == *self)
    }

    pub fn children(&self) -> Vec<Cell> {
        let d = self.index.len() as u32;
        let k = self.base;
        (0..k.pow(d))
            .map(|mut code| {
                let index = self
                    .index
                    .iter()
                    .map(|&i| {
                        let off = code % k;
                        code /= k;
                        i * k + off
                    })
                    .collect();
                Cell { base: k, level: self.level + 1, index }
            })
            .collect()
    }

    fn parent(&self) -> Cell {
        Cell { base: self.base, level: self.level - 1, index: self.index.iter().map(|i| i / self.base).collect() }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.index.iter().map(u64::to_string).collect();
        write!(f, "L{}[{}]", self.level, idx.join(","))
    }
}

fn axis_cells(base: u64, level: u32) -> Result<u64> {
    if base < 2 {
        return Err(Error::Domain(format!("cell base K={base} must be at least 2")));
    }
    base.checked_pow(level)
        .filter(|&s| s <= MAX_CELLS_PER_AXIS)
        .ok_or_else(|| Error::Range(format!("K^level = {base}^{level} too fine")))
}

/// Point counts of the nested `K^-r` partitions, `r = 0..=levels`.
#[derive(Clone, Debug)]
pub struct CellTree {
    base: u64,
    dim: usize,
    counts: Vec<BTreeMap<Cell, usize>>,
}

impl CellTree {
    pub fn build(set: &PointSet, base: u64, levels: u32) -> Result<Self> {
        axis_cells(base, levels)?;
        let mut counts = vec![BTreeMap::new(); levels as usize + 1];
        for x in set.points() {
            let mut cell = Cell::of_point(base, levels, x)?;
            for r in (0..=levels).rev() {
                *counts[r as usize].entry(cell.clone()).or_insert(0) += 1;
                if r > 0 {
                    cell = cell.parent();
                }
            }
        }
        Ok(Self { base, dim: set.dim(), counts })
    }

    pub fn levels(&self) -> u32 {
        self.counts.len() as u32 - 1
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self, cell: &Cell) -> usize {
        self.counts.get(cell.level as usize).and_then(|m| m.get(cell)).copied().unwrap_or(0)
    }

    /// Nonempty cells of one level with their counts.
    pub fn level(&self, r: u32) -> &BTreeMap<Cell, usize> {
        &self.counts[r as usize]
    }

    /// All children of `cell` with their counts, in index order.
    pub fn children(&self, cell: &Cell) -> Vec<(Cell, usize)> {
        let mut out: Vec<(Cell, usize)> = cell.children().into_iter().map(|c| (c.clone(), self.count(&c))).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

/// Tunables of [`broad_narrow`].
#[derive(Clone, Debug, PartialEq)]
pub struct BroadNarrowParams {
    pub tau: Rational,
    pub eps: Rational,
    pub k: u64,
    /// Number of levels `M`; defaults to `ceil(log2 log2 1/delta)` clamped to
    /// `[1, ceil(log_K 1/delta)]`.
    pub levels: Option<u32>,
    /// Leading constant of the significance threshold; defaults to `K^{-d^4}`.
    pub c0: Option<f64>,
}

impl BroadNarrowParams {
    pub fn new(tau: Rational, eps: Rational, k: u64) -> Self {
        Self { tau, eps, k, levels: None, c0: None }
    }

    /// `d = floor(K^{tau - eps})`.
    pub fn required(&self) -> usize {
        (self.k as f64).powf(to_f64(&(&self.tau - &self.eps))).floor() as usize
    }

    pub fn default_levels(delta: f64, k: u64) -> u32 {
        let inv = 1.0 / delta;
        let loglog = inv.log2().max(1.0).log2().ceil().max(1.0);
        let cap = (inv.ln() / (k as f64).ln()).ceil().max(1.0);
        loglog.min(cap) as u32
    }

    pub fn default_c0(k: u64, dim: usize) -> f64 {
        (k as f64).powf(-((dim as f64).powi(4)))
    }

    /// Significance threshold at level `r >= 1`:
    /// `c0 |log delta|^-3 K^{eps (r-1)} 2^{-r+1} (K^{r-1} delta)^{-tau}`.
    pub fn threshold(&self, r: u32, delta: f64, dim: usize) -> f64 {
        let c0 = self.c0.unwrap_or_else(|| Self::default_c0(self.k, dim));
        let k = self.k as f64;
        let steps = (r - 1) as f64;
        c0 * delta.ln().abs().powi(-3)
            * k.powf(to_f64(&self.eps) * steps)
            * (-steps).exp2()
            * (k.powf(steps) * delta).powf(-to_f64(&self.tau))
    }
}

/// One level of the descent.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelTrace {
    pub r: u32,
    pub cell: Cell,
    pub threshold: f64,
    pub nonempty: usize,
    pub significant: usize,
    pub max_count: usize,
}

/// Cells returned at the first level with enough significant children.
#[derive(Clone, Debug, PartialEq)]
pub struct BroadCells {
    pub r: u32,
    pub parent: Cell,
    pub cells: Vec<(Cell, usize)>,
    pub threshold: f64,
    /// Recount from the raw points confirms every returned count and the
    /// number of cells.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BroadNarrowReport {
    pub levels: u32,
    pub required: usize,
    /// `#E >= |log delta|^-3 delta^-tau`.
    pub size_ok: bool,
    /// `K^{tau - eps} >= 2`, so a returned level is genuinely broad.
    pub k_large: bool,
    pub trace: Vec<LevelTrace>,
    pub found: Option<BroadCells>,
}

impl BroadNarrowReport {
    /// Per-level maximum child counts along the descent.
    pub fn max_counts(&self) -> Vec<usize> {
        self.trace.iter().map(|t| t.max_count).collect()
    }
}

impl fmt::Display for BroadNarrowReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "broad-narrow: M={} d={} size_ok={} k_large={}", self.levels, self.required, self.size_ok, self.k_large)?;
        for t in &self.trace {
            let pad = "  ".repeat(t.r as usize);
            writeln!(
                f,
                "{pad}r={} cell={} threshold={:.6} nonempty={} significant={} max={}",
                t.r, t.cell, t.threshold, t.nonempty, t.significant, t.max_count
            )?;
        }
        match &self.found {
            Some(b) => {
                writeln!(f, "found r={} parent={} verified={}", b.r, b.parent, b.verified)?;
                for (c, n) in &b.cells {
                    writeln!(f, "  {c} count={n}")?;
                }
            }
            None => writeln!(f, "failed: max counts per level {:?}", self.max_counts())?,
        }
        Ok(())
    }
}

/// Descends the `K`-adic tree of `E` in `[0,1]^d`: at level `r` the children
/// of the current cell with count at least the level threshold are
/// significant; stop when there are `d = floor(K^{tau-eps})` of them,
/// otherwise continue inside a child of maximal count.
pub fn broad_narrow(set: &PointSet, params: &BroadNarrowParams) -> Result<BroadNarrowReport> {
    let dim = set.dim() as i64;
    if params.tau <= int(0) || params.tau > int(dim) {
        return Err(Error::Domain(format!("tau = {} outside (0, {dim}]", params.tau)));
    }
    if params.eps <= int(0) || params.eps >= params.tau {
        return Err(Error::Domain(format!("eps = {} outside (0, tau)", params.eps)));
    }
    if let Some(c0) = params.c0 {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::Domain(format!("c0 = {c0} must be positive")));
        }
    }
    let delta = set.delta();
    if !(delta < 1.0) {
        return Err(Error::Domain(format!("delta = {delta} must be below 1")));
    }
    let levels = params.levels.unwrap_or_else(|| BroadNarrowParams::default_levels(delta, params.k));
    if levels == 0 {
        return Err(Error::Domain("at least one level is required".into()));
    }
    let tree = CellTree::build(set, params.k, levels)?;
    let required = params.required().max(1);
    let tau = to_f64(&params.tau);
    let size_ok = set.len() as f64 >= delta.ln().abs().powi(-3) * delta.powf(-tau);
    let k_large = (params.k as f64).powf(to_f64(&(&params.tau - &params.eps))) >= 2.0;

    let mut cell = Cell::root(params.k, set.dim());
    let mut trace = Vec::new();
    let mut found = None;
    for r in 1..=levels {
        let threshold = params.threshold(r, delta, set.dim());
        let children = tree.children(&cell);
        let significant: Vec<(Cell, usize)> =
            children.iter().filter(|(_, n)| *n as f64 >= threshold).cloned().collect();
        // First child of maximal count: the scan keeps the earliest on ties.
        let (best, max_count) = children
            .iter()
            .fold(None::<&(Cell, usize)>, |acc, c| match acc {
                Some(a) if a.1 >= c.1 => Some(a),
                _ => Some(c),
            })
            .map(|(c, n)| (c.clone(), *n))
            .expect("a cell has children");
        trace.push(LevelTrace {
            r,
            cell: cell.clone(),
            threshold,
            nonempty: children.iter().filter(|c| c.1 > 0).count(),
            significant: significant.len(),
            max_count,
        });
        if significant.len() >= required {
            let verified = significant.len() >= required
                && significant.iter().all(|(c, n)| {
                    let recount = set.points().iter().filter(|x| c.contains(x)).count();
                    recount == *n && recount as f64 >= threshold
                });
            found = Some(BroadCells { r, parent: cell, cells: significant, threshold, verified });
            break;
        }
        cell = best;
    }
    Ok(BroadNarrowReport { levels, required, size_ok, k_large, trace, found })
}

/// Result of [`top_cells`].
#[derive(Clone, Debug, PartialEq)]
pub struct TopCells {
    /// `(position in the partition, count)`, largest counts first.
    pub cells: Vec<(usize, usize)>,
    /// `sum_{j > J} #(Q_j cap E)`.
    pub tail: usize,
    pub partition_size: usize,
}

impl TopCells {
    /// `tail / #cells`.
    pub fn certificate(&self) -> Rational {
        Rational::new((self.tail as i64).into(), (self.partition_size as i64).into())
    }

    /// `#(Q_J cap E) >= tail / #cells`.
    pub fn holds(&self) -> bool {
        let last = self.cells.last().map_or(0, |c| c.1);
        (last as u128) * (self.partition_size as u128) >= self.tail as u128
    }
}

/// The `J` most populated cells of a partition, ties broken by position.
pub fn top_cells(set: &PointSet, partition: &[Cell], j: usize) -> Result<TopCells> {
    if j > partition.len() {
        return Err(Error::Range(format!("J={j} exceeds the {} cells", partition.len())));
    }
    let mut counts: Vec<(usize, usize)> = partition
        .iter()
        .enumerate()
        .map(|(i, c)| (i, set.points().iter().filter(|x| c.contains(x)).count()))
        .collect();
    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let tail = counts[j..].iter().map(|c| c.1).sum();
    counts.truncate(j);
    Ok(TopCells { cells: counts, tail, partition_size: partition.len() })
}

/// Random `K`-adic Cantor set in `[0,1]`: keep `keep` of the `K` children
/// at each of `depth` levels, one point at the left end of each surviving
/// cell. It is a `(K^-depth, log keep / log K)`-set with constant 1 on
/// `K`-adic cells.
pub fn random_cantor_set<R: Rng + ?Sized>(k: u64, keep: u64, depth: u32, rng: &mut R) -> Result<PointSet> {
    if keep == 0 || keep > k {
        return Err(Error::Domain(format!("keep={keep} outside [1, K={k}]")));
    }
    let side = axis_cells(k, depth)?;
    let mut cells = vec![0u64];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(cells.len() * keep as usize);
        for &c in &cells {
            let mut picked: Vec<u64> = sample(rng, k as usize, keep as usize).into_iter().map(|i| i as u64).collect();
            picked.sort_unstable();
            next.extend(picked.into_iter().map(|i| c * k + i));
        }
        cells = next;
    }
    let delta = 1.0 / side as f64;
    PointSet::new(1, cells.into_iter().map(|c| vec![c as f64 * delta]).collect(), delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmath::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const DELTA: f64 = 1.0 / 4096.0;

    fn params() -> BroadNarrowParams {
        BroadNarrowParams::new(int(1), rat(1, 10), 4)
    }

    #[test]
    fn uniform_net_is_broad_at_first_level() {
        let net = PointSet::uniform_line(4096, DELTA);
        let rep = broad_narrow(&net, &params()).unwrap();
        assert_eq!(rep.levels, 4);
        assert_eq!(rep.required, 3);
        assert!(rep.size_ok && rep.k_large);
        let found = rep.found.unwrap();
        assert_eq!(found.r, 1);
        assert_eq!(found.cells.len(), 4);
        assert!(found.verified);
    }

    #[test]
    fn one_fine_cell_fails() {
        let pts: Vec<Vec<f64>> = (0..16).map(|i| vec![0.5 + i as f64 * DELTA]).collect();
        let set = PointSet::new(1, pts, DELTA).unwrap();
        let rep = broad_narrow(&set, &params()).unwrap();
        assert!(rep.found.is_none());
        assert_eq!(rep.max_counts(), vec![16; 4]);
        assert!(rep.trace.iter().all(|t| t.nonempty == 1));
        assert!(rep.to_string().contains("failed"));
    }

    #[test]
    fn two_clusters_split_where_the_cell_does() {
        // Clusters fill [0, 1/16) and [1/2, 1/2 + 1/16).
        let mut pts = Vec::new();
        for start in [0.0, 0.5] {
            pts.extend((0..256).map(|i| vec![start + i as f64 * DELTA]));
        }
        let set = PointSet::new(1, pts, DELTA).unwrap();
        let mut p = params();
        p.levels = Some(3);
        let rep = broad_narrow(&set, &p).unwrap();
        // r=1: two significant quarters < 3; r=2: one nonempty sixteenth;
        // r=3: all four children of [0, 1/16) are populated.
        assert_eq!(rep.trace.iter().map(|t| t.significant).collect::<Vec<_>>(), vec![2, 1, 4]);
        let found = rep.found.unwrap();
        assert_eq!(found.r, 3);
        assert_eq!(found.parent, Cell::new(4, 2, vec![0]).unwrap());
        assert!(found.verified);
        assert!(found.cells.iter().all(|(_, n)| *n as f64 >= found.threshold));
    }

    #[test]
    fn threshold_and_defaults() {
        let p = params();
        let t1 = p.threshold(1, DELTA, 1);
        let expected = 0.25 * (4096f64).ln().powi(-3) * 4096.0;
        assert!((t1 - expected).abs() < 1e-9 * expected);
        assert_eq!(BroadNarrowParams::default_levels(DELTA, 4), 4);
        assert_eq!(BroadNarrowParams::default_levels(1.0 / 16.0, 4), 2);
        assert_eq!(BroadNarrowParams::default_levels(0.5, 4), 1);
        let bad = BroadNarrowParams::new(rat(1, 2), rat(1, 2), 4);
        assert!(broad_narrow(&PointSet::uniform_line(4, 0.25), &bad).is_err());
    }

    #[test]
    fn cell_tree_partitions_each_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let set = random_cantor_set(4, 2, 5, &mut rng).unwrap();
        assert_eq!(set.len(), 32);
        assert!(set.is_separated());
        let tree = CellTree::build(&set, 4, 5).unwrap();
        for r in 0..=5 {
            assert_eq!(tree.level(r).values().sum::<usize>(), 32);
            assert!(tree.level(r).values().all(|&n| n == 1 << (5 - r)));
        }
        let root = Cell::root(4, 1);
        assert_eq!(tree.children(&root).iter().map(|c| c.1).sum::<usize>(), 32);
    }

    #[test]
    fn top_cells_examples() {
        let part: Vec<Cell> = (0..10).map(|i| Cell::new(10, 1, vec![i]).unwrap()).collect();
        let uniform: Vec<Vec<f64>> = (0..10).flat_map(|i| (0..3).map(move |j| vec![i as f64 / 10.0 + j as f64 * 0.01])).collect();
        let set = PointSet::new(1, uniform, 0.01).unwrap();
        let top = top_cells(&set, &part, 3).unwrap();
        assert!(top.cells.iter().all(|c| c.1 == 3));
        assert!(top.holds());

        let part: Vec<Cell> = (0..5).map(|i| Cell::new(5, 1, vec![i]).unwrap()).collect();
        let mut pts = Vec::new();
        for (cell, count) in [(0, 1), (1, 2), (2, 5), (3, 4), (4, 3)] {
            pts.extend((0..count).map(|j| vec![cell as f64 / 5.0 + j as f64 * 0.01]));
        }
        let set = PointSet::new(1, pts, 0.01).unwrap();
        let top = top_cells(&set, &part, 2).unwrap();
        assert_eq!(top.cells, vec![(2, 5), (3, 4)]);
        assert_eq!(top.tail, 6);
        assert_eq!(top.certificate(), rat(6, 5));
        assert!(top_cells(&set, &part, 6).is_err());
    }

    #[test]
    fn top_cells_certificate_on_capped_sets() {
        // tau = 1/2 Cantor sets; level-2 cells of base 4 act as K = 16.
        let part: Vec<Cell> = (0..16).map(|i| Cell::new(4, 2, vec![i]).unwrap()).collect();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let set = random_cantor_set(4, 2, 6, &mut rng).unwrap();
            let top = top_cells(&set, &part, 2).unwrap();
            assert!(top.holds());
            assert!(top.certificate() >= rat(set.len() as i64, 32));
        }
    }
}
