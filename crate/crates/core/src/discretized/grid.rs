use rayon::prelude::*;

use crate::error::{condition, Error, Result};
use crate::ratmath::{floor_scaled_power, int, Rational};

/// Integer grid `A = [-X, X] x [-Y, Y]`, slopes `|k| <= S` and lines
/// `y = kx + m` with `|m| <= M`, where `X = floor(N^{a-s})`,
/// `Y = floor(N^s)`, `S = floor(N^{2s-a})`, `M = floor(10 N^s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridExample {
    pub n: u64,
    pub a: Rational,
    pub s: Rational,
    pub x_max: i64,
    pub y_max: i64,
    pub slope_max: i64,
    pub intercept_max: i64,
}

fn to_i64(v: u64) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Range(format!("{v} overflows i64")))
}

pub fn st_grid_example(n: u64, a: &Rational, s: &Rational) -> Result<GridExample> {
    if n < 4 {
        return Err(condition(format!("N >= 4 fails: N={n}")));
    }
    if !(*a > int(0) && *a <= int(2)) {
        return Err(condition(format!("0 < a <= 2 fails: a={a}")));
    }
    let two_s = s * int(2);
    if two_s < *a {
        return Err(condition(format!("2s >= a fails: a={a}, s={s}")));
    }
    if *s > int(1) || s > a {
        return Err(condition(format!("s <= min(1, a) fails: a={a}, s={s}")));
    }
    Ok(GridExample {
        n,
        a: a.clone(),
        s: s.clone(),
        x_max: to_i64(floor_scaled_power(n, &(a - s), 1)?)?,
        y_max: to_i64(floor_scaled_power(n, s, 1)?)?,
        slope_max: to_i64(floor_scaled_power(n, &(two_s - a), 1)?)?,
        intercept_max: to_i64(floor_scaled_power(n, s, 10)?)?,
    })
}

impl GridExample {
    /// `#A = (2X+1)(2Y+1)`.
    pub fn point_count(&self) -> u64 {
        ((2 * self.x_max + 1) * (2 * self.y_max + 1)) as u64
    }

    /// `#E = 2S+1`.
    pub fn slope_count(&self) -> u64 {
        (2 * self.slope_max + 1) as u64
    }

    /// `#L = #E (2M+1)`.
    pub fn line_count(&self) -> u64 {
        self.slope_count() * (2 * self.intercept_max + 1) as u64
    }

    pub fn slopes(&self) -> std::ops::RangeInclusive<i64> {
        -self.slope_max..=self.slope_max
    }

    pub fn points(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (-self.x_max..=self.x_max).flat_map(move |x| (-self.y_max..=self.y_max).map(move |y| (x, y)))
    }

    /// `2(Y + |k|X) + 1` while the column images overlap, else `#A`.
    pub fn closed_form_count(&self, slope: i64) -> u64 {
        let k = slope.unsigned_abs() as i64;
        if k <= 2 * self.y_max + 1 {
            (2 * (self.y_max + k * self.x_max) + 1) as u64
        } else {
            self.point_count()
        }
    }

    fn value_span(&self, slope: i64) -> i64 {
        self.y_max + slope.unsigned_abs() as i64 * self.x_max
    }
}

/// Reusable marker buffer: a value is seen in the current pass when its
/// stamp equals the pass epoch, so the buffer is never cleared.
pub struct SlopeCounter {
    stamps: Vec<u32>,
    epoch: u32,
}

impl SlopeCounter {
    pub fn new() -> Self {
        Self { stamps: Vec::new(), epoch: 0 }
    }

    /// Number of distinct `y - kx` over `A`, by enumerating every point.
    pub fn count(&mut self, g: &GridExample, slope: i64) -> u64 {
        let span = g.value_span(slope);
        let width = (2 * span + 1) as usize;
        if self.stamps.len() < width {
            self.stamps.resize(width, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamps.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let mut distinct = 0;
        for (x, y) in g.points() {
            let slot = &mut self.stamps[(y - slope * x + span) as usize];
            if *slot != self.epoch {
                *slot = self.epoch;
                distinct += 1;
            }
        }
        distinct
    }
}

impl Default for SlopeCounter {
    fn default() -> Self {
        Self::new()
    }
}

pub fn slope_projection_count(g: &GridExample, slope: i64) -> u64 {
    SlopeCounter::new().count(g, slope)
}

/// Brute-force counts for every slope in `slopes`, in input order.
pub fn slope_counts(g: &GridExample, slopes: &[i64]) -> Vec<u64> {
    slopes.par_iter().map_init(SlopeCounter::new, |c, &k| c.count(g, k)).collect()
}

/// Result of [`exceptional_scan`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    /// `threshold_mult * floor(N^s)`.
    pub threshold: f64,
    /// `(slope, count)` for every swept slope `|k| <= N`.
    pub counts: Vec<(i64, u64)>,
    pub exceptional: Vec<i64>,
}

impl ScanResult {
    pub fn count(&self) -> usize {
        self.exceptional.len()
    }
}

/// Sweeps every integer slope `|k| <= N` and keeps those whose projection
/// has at most `threshold_mult * floor(N^s)` distinct values.
pub fn exceptional_scan(g: &GridExample, threshold_mult: f64) -> Result<ScanResult> {
    if !(threshold_mult >= 1.0) {
        return Err(condition(format!("threshold multiplier >= 1 fails: {threshold_mult}")));
    }
    let n = to_i64(g.n)?;
    let slopes: Vec<i64> = (-n..=n).collect();
    let threshold = threshold_mult * g.y_max as f64;
    let counts: Vec<(i64, u64)> = slopes.iter().copied().zip(slope_counts(g, &slopes)).collect();
    let exceptional = counts.iter().filter(|(_, c)| *c as f64 <= threshold).map(|(k, _)| *k).collect();
    Ok(ScanResult { threshold, counts, exceptional })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Domain("regression needs at least two samples".into()));
    }
    if samples.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Domain("regression samples must be positive".into()));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("regression needs distinct abscissae".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmath::rat;

    fn g16() -> GridExample {
        st_grid_example(16, &int(1), &rat(3, 4)).unwrap()
    }

    #[test]
    fn construction_examples() {
        let g = g16();
        assert_eq!((g.x_max, g.y_max, g.slope_max, g.intercept_max), (2, 8, 4, 80));
        assert_eq!(g.point_count(), 85);
        assert_eq!(g.slope_count(), 9);
        assert_eq!(g.line_count(), 9 * 161);
        assert_eq!(g.points().count(), 85);
        let g = st_grid_example(16, &int(1), &rat(1, 2)).unwrap();
        assert_eq!(g.slope_count(), 3);
        assert!(st_grid_example(16, &int(1), &rat(1, 4)).is_err());
        assert!(st_grid_example(3, &int(1), &rat(3, 4)).is_err());
        assert!(st_grid_example(16, &int(3), &int(1)).is_err());
    }

    #[test]
    fn count_examples() {
        let g = g16();
        assert_eq!(slope_projection_count(&g, 0), 17);
        assert_eq!(slope_projection_count(&g, 4), 33);
        assert_eq!(slope_projection_count(&g, 20), 85);
        assert_eq!(slope_projection_count(&g, -20), 85);
    }

    #[test]
    fn brute_force_matches_closed_form() {
        for n in [16u64, 64, 256] {
            let g = st_grid_example(n, &int(1), &rat(3, 4)).unwrap();
            let slopes: Vec<i64> = (-3 * n as i64..=3 * n as i64).collect();
            for (k, c) in slopes.iter().zip(slope_counts(&g, &slopes)) {
                assert_eq!(c, g.closed_form_count(*k), "N={n} k={k}");
            }
        }
    }

    #[test]
    fn scan_examples() {
        let g = g16();
        let scan = exceptional_scan(&g, 5.0).unwrap();
        assert!(g.slopes().all(|k| scan.exceptional.contains(&k)));
        assert!(exceptional_scan(&g, 1.0).unwrap().exceptional.is_empty());
        assert_eq!(exceptional_scan(&g, 100.0).unwrap().count(), 33);
        assert!(exceptional_scan(&g, 0.5).is_err());
    }

    #[test]
    fn regression() {
        let pts: Vec<(f64, f64)> = (1..5).map(|i| (2f64.powi(i), 3.0 * 2f64.powi(i).sqrt())).collect();
        assert!((loglog_slope(&pts).unwrap() - 0.5).abs() < 1e-12);
        assert!(loglog_slope(&pts[..1]).is_err());
    }
}
