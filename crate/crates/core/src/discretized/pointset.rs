use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grassmann::Subspace;
use crate::ratmath::{to_f64, Rational};

/// Relative slack on ball membership so that points placed exactly at
/// distance `r` on a lattice are not lost to rounding.
pub const BALL_SLACK: f64 = 1e-9;

/// A finite point cloud with a separation scale `delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
    delta: f64,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, delta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("point dimension must be positive".into()));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("delta must be positive, got {delta}")));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::AmbientMismatch { left: dim, right: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain("non-finite coordinate".into()));
            }
        }
        Ok(Self { dim, points, delta })
    }

    /// `{0, delta, 2 delta, ..., count * delta}` on the real line.
    pub fn uniform_line(count: usize, delta: f64) -> Self {
        let points = (0..=count).map(|i| vec![i as f64 * delta]).collect();
        Self::new(1, points, delta).expect("valid line net")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        Self { dim: self.dim, points, delta: self.delta }
    }

    /// All pairwise distances are at least `delta` (up to rounding).
    pub fn is_separated(&self) -> bool {
        let cut = self.delta * (1.0 - BALL_SLACK);
        (0..self.len()).all(|i| (i + 1..self.len()).all(|j| dist(&self.points[i], &self.points[j]) >= cut))
    }

    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                best = best.max(dist(&self.points[i], &self.points[j]));
            }
        }
        best
    }

    /// Parses `dim count delta` followed by `count` rows of floats.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (lineno, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty point set".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad = |line: usize, msg: String| Error::Parse { line, msg };
        if fields.len() != 3 {
            return Err(bad(lineno, "header must be \"dim count delta\"".into()));
        }
        let dim: usize = fields[0].parse().map_err(|_| bad(lineno, format!("bad dim {:?}", fields[0])))?;
        let count: usize = fields[1].parse().map_err(|_| bad(lineno, format!("bad count {:?}", fields[1])))?;
        let delta: f64 = fields[2].parse().map_err(|_| bad(lineno, format!("bad delta {:?}", fields[2])))?;
        let mut points = Vec::with_capacity(count);
        for _ in 0..count {
            let (lineno, line) = lines.next().ok_or(bad(lineno, format!("expected {count} rows")))?;
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad(lineno, format!("bad coordinate {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != dim {
                return Err(bad(lineno, format!("expected {dim} coordinates, got {}", row.len())));
            }
            points.push(row);
        }
        if let Some((extra, _)) = lines.next() {
            return Err(bad(extra, "more rows than count".into()));
        }
        Self::new(dim, points, delta).map_err(|e| bad(lineno, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.dim, self.len(), self.delta);
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[inline]
pub(crate) fn in_ball(d: f64, r: f64) -> bool {
    d <= r * (1.0 + BALL_SLACK)
}

/// Radii `delta * 2^j`, `j >= 0`, up to `max(diameter, delta)`.
pub fn dyadic_radii(delta: f64, diameter: f64) -> Vec<f64> {
    let mut out = vec![delta];
    let mut r = delta * 2.0;
    while r <= diameter {
        out.push(r);
        r *= 2.0;
    }
    out
}

/// Result of [`check_frostman`].
#[derive(Clone, Debug, PartialEq)]
pub struct FrostmanReport {
    pub pass: bool,
    /// Largest `#(P cap B_r(x)) / (C (r/delta)^s)` seen.
    pub worst_ratio: f64,
    /// Center index and radius of the worst ratio.
    pub worst_at: Option<(usize, f64)>,
    pub radii: Vec<f64>,
}

fn frostman_cap(c: f64, r: f64, delta: f64, s: f64) -> f64 {
    c * (r / delta).powf(s)
}

/// Checks `#(P cap B_r(x)) <= C (r/delta)^s` for all `x in P` and dyadic
/// radii `r = 2^j delta` up to the diameter.
pub fn check_frostman(set: &PointSet, s: &Rational, c: f64) -> FrostmanReport {
    let s = to_f64(s);
    let radii = dyadic_radii(set.delta, set.diameter());
    let mut worst_ratio = 0.0f64;
    let mut worst_at = None;
    for (i, x) in set.points.iter().enumerate() {
        let mut ds: Vec<f64> = set.points.iter().map(|y| dist(x, y)).collect();
        ds.sort_by(f64::total_cmp);
        for &r in &radii {
            let count = ds.partition_point(|&d| in_ball(d, r));
            let ratio = count as f64 / frostman_cap(c, r, set.delta, s);
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst_at = Some((i, r));
            }
        }
    }
    FrostmanReport { pass: worst_ratio <= 1.0, worst_ratio, worst_at, radii }
}

/// Greedy `(delta, s, C)`-subset: scans `P` in order and keeps a point when
/// the Frostman condition still holds at every kept center and every dyadic
/// radius up to the diameter of `P`.
pub fn extract_delta_s_set(set: &PointSet, s: &Rational, c: f64) -> PointSet {
    let s = to_f64(s);
    let radii = dyadic_radii(set.delta, set.diameter());
    let caps: Vec<f64> = radii.iter().map(|&r| frostman_cap(c, r, set.delta, s)).collect();
    let mut kept: Vec<usize> = Vec::new();
    // counts[q][j] = #kept points within radii[j] of kept[q].
    let mut counts: Vec<Vec<usize>> = Vec::new();
    for (i, x) in set.points.iter().enumerate() {
        let ds: Vec<f64> = kept.iter().map(|&q| dist(x, &set.points[q])).collect();
        let own_ok = radii
            .iter()
            .zip(&caps)
            .all(|(&r, &cap)| (1 + ds.iter().filter(|&&d| in_ball(d, r)).count()) as f64 <= cap);
        let others_ok = own_ok
            && ds.iter().zip(&counts).all(|(&d, row)| {
                radii.iter().zip(&caps).zip(row).all(|((&r, &cap), &cnt)| !in_ball(d, r) || (cnt + 1) as f64 <= cap)
            });
        if !others_ok {
            continue;
        }
        let own: Vec<usize> =
            radii.iter().map(|&r| 1 + ds.iter().filter(|&&d| in_ball(d, r)).count()).collect();
        for (row, &d) in counts.iter_mut().zip(&ds) {
            for (cnt, &r) in row.iter_mut().zip(&radii) {
                if in_ball(d, r) {
                    *cnt += 1;
                }
            }
        }
        kept.push(i);
        counts.push(own);
    }
    set.subset(&kept)
}

/// Greedy `delta`-separated subset of `pi_V(P)` in scan order; within a
/// factor `3^k` of the covering number of the projection.
pub fn projection_covering_number(set: &PointSet, v: &Subspace, delta: f64) -> Result<usize> {
    if v.ambient_dim() != set.dim {
        return Err(Error::AmbientMismatch { left: set.dim, right: v.ambient_dim() });
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let basis = v.orthonormal_f64();
    if basis.is_empty() {
        return Ok(usize::from(!set.is_empty()));
    }
    let cut = delta * (1.0 - BALL_SLACK);
    let mut grid: HashMap<Vec<i64>, Vec<Vec<f64>>> = HashMap::new();
    let mut kept = 0;
    for x in &set.points {
        let y: Vec<f64> = basis.iter().map(|b| b.iter().zip(x).map(|(p, q)| p * q).sum()).collect();
        let cell: Vec<i64> = y.iter().map(|c| (c / delta).floor() as i64).collect();
        if neighbours(&cell).any(|nb| grid.get(&nb).is_some_and(|pts| pts.iter().any(|p| dist(p, &y) < cut))) {
            continue;
        }
        grid.entry(cell).or_default().push(y);
        kept += 1;
    }
    Ok(kept)
}

fn neighbours(cell: &[i64]) -> impl Iterator<Item = Vec<i64>> + '_ {
    let k = cell.len() as u32;
    (0..3usize.pow(k)).map(move |mut code| {
        cell.iter()
            .map(|&c| {
                let off = (code % 3) as i64 - 1;
                code /= 3;
                c + off
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmath::int;

    fn clusters(per: usize, centers: &[f64], delta: f64) -> PointSet {
        let mut pts = Vec::new();
        for &c in centers {
            for i in 0..per {
                pts.push(vec![c + i as f64 * delta * 1e-3]);
            }
        }
        PointSet::new(1, pts, delta).unwrap()
    }

    #[test]
    fn frostman_examples() {
        let net = PointSet::uniform_line(100, 0.01);
        assert!(check_frostman(&net, &int(1), 3.0).pass);
        let single = PointSet::new(2, vec![vec![0.3, 0.3]], 0.01).unwrap();
        assert!(check_frostman(&single, &int(1), 1.0).pass);
        let bunch = clusters(5, &[0.0], 0.01);
        let rep = check_frostman(&bunch, &int(1), 1.0);
        assert!(!rep.pass);
        assert_eq!(rep.worst_at.map(|(_, r)| r), Some(0.01));
    }

    #[test]
    fn extract_examples() {
        let net = PointSet::uniform_line(100, 0.01);
        assert_eq!(extract_delta_s_set(&net, &int(1), 3.0), net);
        let bunch = clusters(5, &[0.0, 10.0, 20.0], 0.01);
        let got = extract_delta_s_set(&bunch, &int(1), 1.0);
        assert_eq!(got.points(), &[vec![0.0], vec![10.0], vec![20.0]]);
        assert!(check_frostman(&got, &int(1), 1.0).pass);
        let empty = PointSet::new(1, vec![], 0.1).unwrap();
        assert!(extract_delta_s_set(&empty, &int(1), 1.0).is_empty());
    }

    #[test]
    fn covering_examples() {
        let on_x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 0.05, 0.0]).collect();
        let set = PointSet::new(2, on_x, 0.05).unwrap();
        let y_axis = Subspace::coordinate(2, &[1]).unwrap();
        let x_axis = Subspace::coordinate(2, &[0]).unwrap();
        assert_eq!(projection_covering_number(&set, &y_axis, 0.05).unwrap(), 1);
        assert_eq!(projection_covering_number(&set, &x_axis, 0.05).unwrap(), 20);
        let circle: Vec<Vec<f64>> = (0..100)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 100.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let set = PointSet::new(2, circle, 0.06).unwrap();
        let got = projection_covering_number(&set, &x_axis, 0.1).unwrap();
        assert!((11..=63).contains(&got), "{got}");
        // Brute-force greedy in the same scan order.
        let mut kept: Vec<f64> = Vec::new();
        for p in set.points() {
            if kept.iter().all(|k| (k - p[0]).abs() >= 0.1 * (1.0 - BALL_SLACK)) {
                kept.push(p[0]);
            }
        }
        assert_eq!(got, kept.len());
    }

    #[test]
    fn file_roundtrip() {
        let set = PointSet::new(2, vec![vec![0.5, 0.25], vec![-1.0, 3.0]], 0.125).unwrap();
        assert_eq!(PointSet::parse(&set.to_text()).unwrap(), set);
        assert!(PointSet::parse("2 2 0.1\n0 0\n").is_err());
        assert!(PointSet::parse("2 1 0.1\n0 0 0\n").is_err());
        assert!(PointSet::parse("2 1 -1\n0 0\n").is_err());
    }

    #[test]
    fn separation() {
        assert!(PointSet::uniform_line(10, 0.1).is_separated());
        assert!(!clusters(2, &[0.0], 0.1).is_separated());
    }
}
