//! Upper bounds for `T(a,s)`: `E(m,l) -> m(t,l) -> lambda_p -> s_star(a,t)`,
//! the classical estimates, and the exhaustive check of the
//! `k(n-k) - min{k, n-k}` bound.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{condition, range, Result};
use crate::grassmann::exceptional_locus_dim;
use crate::ratmath::{floor_half_diff, floor_i64, int, Rational};

/// The pair `1 <= k < n` fixing `G(k,n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Problem {
    n: i64,
    k: i64,
}

impl Problem {
    pub fn new(n: i64, k: i64) -> Result<Self> {
        if k < 1 || k >= n {
            return Err(range(format!("need 1 <= k < n, got n={n}, k={k}")));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    /// `dim G(k,n) = k(n-k)`.
    pub fn full(&self) -> i64 {
        self.k * (self.n - self.k)
    }

    /// All problems with `1 <= k < n <= nmax`.
    pub fn all_up_to(nmax: i64) -> Vec<Self> {
        (2..=nmax).flat_map(|n| (1..n).map(move |k| Self { n, k })).collect()
    }

    /// Checks `0 < a < n` and `0 < s < min{k, a}`.
    pub fn check_as(&self, a: &Rational, s: &Rational) -> Result<()> {
        if !a.is_positive() || *a >= int(self.n) {
            return Err(condition(format!("0 < a < n fails: a={a}, n={}", self.n)));
        }
        let cap = a.clone().min(int(self.k));
        if !s.is_positive() || *s >= cap {
            return Err(condition(format!("0 < s < min{{k,a}} fails: s={s}, min{{k,a}}={cap}")));
        }
        Ok(())
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, k={})", self.n, self.k)
    }
}

/// Which estimate or construction produced a bound.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    Trivial,
    KaufmanMattila,
    Falconer,
    He,
    Theorem1,
    MainThm { t: i64 },
    Type(u8),
    Plateau { w: i64, l: i64 },
    R3Table,
    RenWang,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Trivial => write!(f, "trivial"),
            Source::KaufmanMattila => write!(f, "kaufman_mattila"),
            Source::Falconer => write!(f, "falconer"),
            Source::He => write!(f, "he"),
            Source::Theorem1 => write!(f, "theorem1"),
            Source::MainThm { t } => write!(f, "mainthm(t={t})"),
            Source::Type(i) => write!(f, "type{i}"),
            Source::Plateau { w, l } => write!(f, "plateau(w={w},l={l})"),
            Source::R3Table => write!(f, "r3_table"),
            Source::RenWang => write!(f, "ren_wang"),
        }
    }
}

/// A bound on `T(a,s)` together with its provenance.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundValue {
    pub value: Rational,
    pub source: Source,
}

impl BoundValue {
    pub fn new(value: Rational, source: Source) -> Self {
        Self { value, source }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.value, self.source)
    }
}

/// `floor(t)` for a rational `t`; `m(t,l)` only depends on it.
pub fn floor_t(t: &Rational) -> i64 {
    floor_i64(t)
}

fn check_t(prob: &Problem, t_floor: i64) -> Result<()> {
    if t_floor < 0 || t_floor >= prob.full() {
        return Err(range(format!("t = {t_floor} outside [0, k(n-k)) = [0, {})", prob.full())));
    }
    Ok(())
}

fn check_l(prob: &Problem, l: i64) -> Result<()> {
    if l < 0 || l > prob.n {
        return Err(range(format!("l = {l} outside [0, {}]", prob.n)));
    }
    Ok(())
}

/// `m(t,l)`: the smallest `m >= 0` with `E(m,l) > t`, by linear scan.
pub fn m_of(prob: &Problem, t_floor: i64, l: i64) -> Result<i64> {
    check_t(prob, t_floor)?;
    check_l(prob, l)?;
    let mut m = 0;
    while exceptional_locus_dim(prob.n, prob.k, m, l)? <= t_floor {
        m += 1;
    }
    debug_assert!(m <= l.min(prob.k) + 1);
    Ok(m)
}

/// `[m(t,0), ..., m(t,n)]`.
pub fn m_table(prob: &Problem, t_floor: i64) -> Result<Vec<i64>> {
    (0..=prob.n).map(|l| m_of(prob, t_floor, l)).collect()
}

fn check_u(prob: &Problem, u: i64, l: i64) -> Result<()> {
    if u < 1 || u > prob.full() {
        return Err(range(format!("u = {u} outside [1, {}]", prob.full())));
    }
    check_l(prob, l)
}

/// `max{0, floor((k + l - sqrt((k-l)^2 + 4u)) / 2) + 1}`, the root formula for
/// `m(k(n-k) - u, l)` that ignores the vanishing range of `E`.
///
/// Agrees with [`m_of`] when `u = min{k, n-k}` but not on the whole range of
/// `u`; see [`m_closed_form`].
pub fn m_closed_form_unclamped(prob: &Problem, u: i64, l: i64) -> Result<i64> {
    check_u(prob, u, l)?;
    let k = prob.k;
    Ok((floor_half_diff(k + l, (k - l) * (k - l) + 4 * u)? + 1).max(0))
}

/// Closed form of `m(k(n-k) - u, l)`, exact for every `1 <= u <= k(n-k)`:
/// the root formula clamped below by `l + k - n`, where `E` vanishes.
pub fn m_closed_form(prob: &Problem, u: i64, l: i64) -> Result<i64> {
    let root = m_closed_form_unclamped(prob, u, l)?;
    Ok(root.max(l + prob.k - prob.n))
}

/// `lambda_p = max_l (l - p m(t,l))`.
pub fn lambda_p(prob: &Problem, t_floor: i64, p: &Rational) -> Result<Rational> {
    if *p < Rational::one() {
        return Err(range(format!("p = {p} must be >= 1")));
    }
    let table = m_table(prob, t_floor)?;
    Ok(table
        .iter()
        .enumerate()
        .map(|(l, &m)| int(l as i64) - p * int(m))
        .max()
        .expect("n >= 2"))
}

/// Candidate `q = 1/p` values where the lower envelope of the lines
/// `(a - l) q + m_l` can peak: the endpoints and all pairwise crossings in
/// `[0,1]`. Crossings do not depend on `a`.
pub fn s_star_candidates(table: &[i64]) -> Vec<Rational> {
    let mut qs = vec![Rational::zero(), Rational::one()];
    for l1 in 0..table.len() {
        for l2 in l1 + 1..table.len() {
            let q = Rational::new(
                (table[l2] - table[l1]).into(),
                ((l2 - l1) as i64).into(),
            );
            if !q.is_negative() && q <= Rational::one() {
                qs.push(q);
            }
        }
    }
    qs.sort();
    qs.dedup();
    qs
}

fn envelope(table: &[i64], a: &Rational, q: &Rational) -> Rational {
    table
        .iter()
        .enumerate()
        .map(|(l, &m)| (a - int(l as i64)) * q + int(m))
        .min()
        .expect("nonempty table")
}

/// `s_star(a,t)` with the maximizing `q` (smallest on ties).
pub fn s_star_detail(prob: &Problem, a: &Rational, t_floor: i64) -> Result<(Rational, Rational)> {
    if !a.is_positive() || *a >= int(prob.n) {
        return Err(range(format!("a = {a} outside (0, {})", prob.n)));
    }
    let table = m_table(prob, t_floor)?;
    let mut best: Option<(Rational, Rational)> = None;
    for q in s_star_candidates(&table) {
        let v = envelope(&table, a, &q);
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, q));
        }
    }
    Ok(best.expect("candidates include 0 and 1"))
}

/// `sup_{q in [0,1]} min_l ((a - l) q + m(t,l))`, exact.
pub fn s_star(prob: &Problem, a: &Rational, t_floor: i64) -> Result<Rational> {
    Ok(s_star_detail(prob, a, t_floor)?.0)
}

/// The same supremum computed as `sup_q (a - lambda_{1/q}) q`, with the
/// `q = 0` endpoint taken as `min_l m(t,l)`.
pub fn s_star_dual(prob: &Problem, a: &Rational, t_floor: i64) -> Result<Rational> {
    let table = m_table(prob, t_floor)?;
    let mut best = int(*table.iter().min().expect("nonempty"));
    for q in s_star_candidates(&table) {
        if q.is_zero() {
            continue;
        }
        let p = q.recip();
        let v = (a - lambda_p(prob, t_floor, &p)?) * &q;
        best = best.max(v);
    }
    Ok(best)
}

/// Smallest `j < k(n-k)` with `s_star(a,j) >= s`, or the trivial bound.
pub fn upper_bound_mainthm(prob: &Problem, a: &Rational, s: &Rational) -> Result<BoundValue> {
    prob.check_as(a, s)?;
    for j in 0..prob.full() {
        if s_star(prob, a, j)? >= *s {
            return Ok(BoundValue::new(int(j), Source::MainThm { t: j }));
        }
    }
    Ok(BoundValue::new(int(prob.full()), Source::Trivial))
}

/// Every classical estimate that applies at `(a,s)`.
pub fn upper_bound_classical(prob: &Problem, a: &Rational, s: &Rational) -> Result<Vec<BoundValue>> {
    prob.check_as(a, s)?;
    let (n, k) = (int(prob.n), int(prob.k));
    let full = int(prob.full());
    let mut out = vec![
        BoundValue::new(&full + s - &k, Source::KaufmanMattila),
        BoundValue::new((&full + s - a).max(Rational::zero()), Source::Falconer),
    ];
    if *s <= &k * a / &n {
        out.push(BoundValue::new(&full - int(1), Source::He));
        out.push(BoundValue::new(&full - int(prob.k.min(prob.n - prob.k)), Source::Theorem1));
    }
    if prob.n == 2 && prob.k == 1 {
        out.push(BoundValue::new((int(2) * s - a).max(Rational::zero()), Source::RenWang));
    }
    Ok(out)
}

/// Minimum over [`upper_bound_mainthm`] and [`upper_bound_classical`]; ties
/// keep the main-theorem tag.
pub fn best_upper(prob: &Problem, a: &Rational, s: &Rational) -> Result<BoundValue> {
    let mut best = upper_bound_mainthm(prob, a, s)?;
    for b in upper_bound_classical(prob, a, s)? {
        if b.value < best.value {
            best = b;
        }
    }
    Ok(best)
}

/// One row of [`verify_theorem1`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Row {
    pub l: i64,
    /// 1 when `l <= k` (`mu = k - l`), 2 when `l > k` (`mu = l - k`).
    pub case: u8,
    pub mu: i64,
    pub alpha: i64,
    /// `floor((k + l - sqrt((k-l)^2 + 4u)) / 2) + 1`.
    pub rhs: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Report {
    pub problem: Problem,
    pub u: i64,
    pub rows: Vec<Theorem1Row>,
}

impl Theorem1Report {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Checks `lk/n <= floor((k + l - sqrt((k-l)^2 + 4u))/2) + 1` for all `l`
/// with `u = min{k, n-k}`, together with the equivalent case inequality
/// `(k -+ mu) k <= n (k - alpha)`. Integer arithmetic only.
pub fn verify_theorem1(prob: &Problem) -> Theorem1Report {
    let (n, k) = (prob.n, prob.k);
    let u = k.min(n - k);
    let rows = (0..=n)
        .map(|l| {
            let d = (k - l) * (k - l) + 4 * u;
            let rhs = floor_half_diff(k + l, d).expect("d >= 0") + 1;
            let master = l * k <= n * rhs;
            let (case, mu) = if l <= k { (1, k - l) } else { (2, l - k) };
            let (shift, lhs) = if case == 1 { (-mu, (k - mu) * k) } else { (mu, (k + mu) * k) };
            let alpha = -floor_half_diff(shift, d).expect("d >= 0") - 1;
            let case_ok = lhs <= n * (k - alpha);
            debug_assert_eq!(k - alpha, rhs);
            Theorem1Row { l, case, mu, alpha, rhs, pass: master && case_ok }
        })
        .collect();
    Theorem1Report { problem: *prob, u, rows }
}

/// `(u, l, closed form, scan)` for every disagreement of [`m_closed_form`]
/// with [`m_of`] over `1 <= u <= k(n-k)`, `0 <= l <= n`.
pub fn closed_form_mismatches(prob: &Problem) -> Vec<(i64, i64, i64, i64)> {
    let mut out = Vec::new();
    for u in 1..=prob.full() {
        for l in 0..=prob.n {
            let closed = m_closed_form(prob, u, l).expect("in range");
            let scan = m_of(prob, prob.full() - u, l).expect("in range");
            if closed != scan {
                out.push((u, l, closed, scan));
            }
        }
    }
    out
}
