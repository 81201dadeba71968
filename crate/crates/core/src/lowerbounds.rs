//! Lower bounds for `T(a,s)` from explicit constructions: the four types, the
//! plateau family, the two tables in `R^3`, and detection of points where the
//! upper and lower bounds meet.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::bounds::{best_upper, BoundValue, Problem, Source};
use crate::error::{range, Result};
use crate::grassmann::exceptional_locus_dim;
use crate::ratmath::{ceil_i64, int, Rational};

/// `a = m + beta` with `m` an integer and `beta in (0,1]`.
pub fn decompose(a: &Rational) -> Result<(i64, Rational)> {
    if !a.is_positive() {
        return Err(range(format!("decompose needs a > 0, got {a}")));
    }
    let m = ceil_i64(a) - 1;
    Ok((m, a - int(m)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeKind {
    Type(u8),
    Plateau,
}

impl fmt::Display for TypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeKind::Type(i) => write!(f, "type{i}"),
            TypeKind::Plateau => write!(f, "plateau"),
        }
    }
}

/// One construction evaluated at `(a,s)`.
///
/// For the four types `p1, p2` are `(m, l)` from `a = m + beta`,
/// `s = l + gamma`; for the plateau family they are `(w, l)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeBound {
    pub kind: TypeKind,
    pub p1: i64,
    pub p2: i64,
    pub conditions_met: bool,
    /// The first printed condition that failed, if any.
    pub failed: Option<String>,
    pub value: Rational,
}

impl TypeBound {
    pub fn source(&self) -> Source {
        match self.kind {
            TypeKind::Type(i) => Source::Type(i),
            TypeKind::Plateau => Source::Plateau { w: self.p1, l: self.p2 },
        }
    }

    pub fn to_bound(&self) -> Option<BoundValue> {
        self.conditions_met.then(|| BoundValue::new(self.value.clone(), self.source()))
    }
}

fn check_lower_domain(prob: &Problem, a: &Rational, s: &Rational) -> Result<()> {
    if !a.is_positive() || *a >= int(prob.n()) {
        return Err(range(format!("0 < a < n fails: a={a}, n={}", prob.n())));
    }
    let cap = a.clone().min(int(prob.k()));
    if !s.is_positive() || *s > cap {
        return Err(range(format!("0 < s <= min{{k,a}} fails: s={s}, min{{k,a}}={cap}")));
    }
    Ok(())
}

/// Evaluates Types 1-4 at the canonical decompositions of `a` and `s`.
pub fn type_bounds(prob: &Problem, a: &Rational, s: &Rational) -> Result<Vec<TypeBound>> {
    check_lower_domain(prob, a, s)?;
    let (n, k) = (prob.n(), prob.k());
    let (m, beta) = decompose(a)?;
    let (l, gamma) = decompose(s)?;
    let full = int(prob.full());
    let two = int(2);
    let one = Rational::one();

    let mut out = Vec::with_capacity(4);
    let mut push = |id: u8, checks: Vec<(bool, String)>, value: Rational| {
        let failed = checks.into_iter().find(|(ok, _)| !ok).map(|(_, name)| name);
        out.push(TypeBound {
            kind: TypeKind::Type(id),
            p1: m,
            p2: l,
            conditions_met: failed.is_none(),
            failed,
            value,
        });
    };

    // Type 1 is Type 3 applied to a = (m - 1) + (beta + 1).
    push(
        1,
        vec![
            (1 <= m, "1 <= m".into()),
            (m <= n + l - k, "m <= n + l - k".into()),
            (gamma > (&beta + &one) / &two, "gamma > (beta + 1)/2".into()),
        ],
        &full - int((m - l) * (k - l)) + &two * &gamma - (&beta + &one),
    );
    push(
        2,
        vec![(m <= n + l - k, "m <= n + l - k".into()), (gamma > beta, "gamma > beta".into())],
        &full - int((m - l) * (k - l)),
    );
    push(
        3,
        vec![
            (m <= n + l - k - 1, "m <= n + l - k - 1".into()),
            (gamma > &beta / &two, "gamma > beta/2".into()),
        ],
        &full - int((m + 1 - l) * (k - l)) + &two * &gamma - &beta,
    );
    push(
        4,
        vec![(l >= 1, "l >= 1".into()), (m <= n + l - k - 1, "m <= n + l - k - 1".into())],
        &full - int((m - l + 1) * (k - l + 1)),
    );
    Ok(out)
}

/// Largest `E(l, w)` over pairs with `l + max{0, a - w} < s`: a set inside a
/// `w`-plane (times a fractal factor of dimension `a - w` when `a > w`) whose
/// projections to `V` with `dim pi_V(w-plane) <= l` have dimension below `s`.
pub fn plateau_bound(prob: &Problem, a: &Rational, s: &Rational) -> Result<TypeBound> {
    check_lower_domain(prob, a, s)?;
    let (n, k) = (prob.n(), prob.k());
    let mut best: Option<TypeBound> = None;
    for w in 0..=n {
        let excess = (a - int(w)).max(Rational::zero());
        for l in 0..=k.min(w) {
            if int(l) + &excess >= *s {
                continue;
            }
            let value = int(exceptional_locus_dim(n, k, l, w)?);
            if best.as_ref().map_or(true, |b| value > b.value) {
                best = Some(TypeBound {
                    kind: TypeKind::Plateau,
                    p1: w,
                    p2: l,
                    conditions_met: true,
                    failed: None,
                    value,
                });
            }
        }
    }
    Ok(best.unwrap_or(TypeBound {
        kind: TypeKind::Plateau,
        p1: 0,
        p2: 0,
        conditions_met: false,
        failed: Some("no (w,l) with l + max{0, a-w} < s".into()),
        value: Rational::zero(),
    }))
}

fn check_table(a: &Rational, s: &Rational, k: i64) -> Result<()> {
    if !a.is_positive() || *a >= int(3) {
        return Err(range(format!("0 < a < 3 fails: a={a}")));
    }
    let cap = a.clone().min(int(k));
    if !s.is_positive() || *s >= cap {
        return Err(range(format!("0 < s < min{{{k},a}} fails: s={s}")));
    }
    Ok(())
}

/// Lower bound table for lines in `R^3` (`n = 3, k = 1`).
pub fn r3_line_table(a: &Rational, s: &Rational) -> Result<Rational> {
    check_table(a, s, 1)?;
    let one = Rational::one();
    let two = int(2);
    if *a <= one {
        return Ok(one);
    }
    let low = (a - &one) / &two;
    if *s <= low {
        return Ok(Rational::zero());
    }
    let rising = &one + &two * s - a;
    if *a <= two {
        if *s <= a - &one {
            Ok(rising)
        } else {
            Ok(one)
        }
    } else {
        Ok(rising)
    }
}

/// Lower bound table for planes in `R^3` (`n = 3, k = 2`).
pub fn r3_plane_table(a: &Rational, s: &Rational) -> Result<Rational> {
    check_table(a, s, 2)?;
    let one = Rational::one();
    let two = int(2);
    let rising = &two * s - a;
    if *a <= one {
        return Ok(rising.max(Rational::zero()));
    }
    let upper_mid = (a + &one) / &two;
    if *a <= two {
        if *s <= a / &two {
            Ok(Rational::zero())
        } else if *s <= one {
            Ok(rising)
        } else if *s <= upper_mid {
            Ok(one)
        } else {
            Ok(rising)
        }
    } else if *s <= a - &one {
        Ok(Rational::zero())
    } else if *s <= upper_mid {
        Ok(one)
    } else {
        Ok(rising)
    }
}

/// Every lower bound that applies at `(a,s)`, in a fixed order: types,
/// plateau, tables, the planar value, then the trivial `0`.
pub fn lower_candidates(prob: &Problem, a: &Rational, s: &Rational) -> Result<Vec<BoundValue>> {
    let mut out: Vec<BoundValue> = type_bounds(prob, a, s)?.iter().filter_map(TypeBound::to_bound).collect();
    out.extend(plateau_bound(prob, a, s)?.to_bound());
    let below_cap = *s < a.clone().min(int(prob.k()));
    if prob.n() == 3 && below_cap {
        let table = if prob.k() == 1 { r3_line_table(a, s)? } else { r3_plane_table(a, s)? };
        out.push(BoundValue::new(table, Source::R3Table));
    }
    if prob.n() == 2 && prob.k() == 1 {
        out.push(BoundValue::new((int(2) * s - a).max(Rational::zero()), Source::RenWang));
    }
    out.push(BoundValue::new(Rational::zero(), Source::Trivial));
    Ok(out)
}

/// Maximum over [`lower_candidates`]; ties keep the earliest.
pub fn best_lower(prob: &Problem, a: &Rational, s: &Rational) -> Result<BoundValue> {
    let mut best: Option<BoundValue> = None;
    for b in lower_candidates(prob, a, s)? {
        if best.as_ref().map_or(true, |x| b.value > x.value) {
            best = Some(b);
        }
    }
    Ok(best.expect("trivial bound always present"))
}

/// A grid point where upper and lower bounds agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPoint {
    pub a: Rational,
    pub s: Rational,
    pub value: Rational,
    pub upper: Source,
    pub lower: Source,
}

/// All admissible grid points (`0 < a < n`, `0 < s < min{k,a}`) where
/// `best_upper == best_lower`, in `a`-major grid order.
pub fn exact_regions(prob: &Problem, a_grid: &[Rational], s_grid: &[Rational]) -> Vec<ExactPoint> {
    let pairs: Vec<(&Rational, &Rational)> = a_grid
        .iter()
        .flat_map(|a| s_grid.iter().map(move |s| (a, s)))
        .filter(|(a, s)| prob.check_as(a, s).is_ok())
        .collect();
    pairs
        .par_iter()
        .filter_map(|(a, s)| {
            let up = best_upper(prob, a, s).ok()?;
            let low = best_lower(prob, a, s).ok()?;
            (up.value == low.value).then(|| ExactPoint {
                a: (*a).clone(),
                s: (*s).clone(),
                value: up.value,
                upper: up.source,
                lower: low.source,
            })
        })
        .collect()
}

/// The constant value on the closed-form equality regions, when `(a,s)` lies
/// in one: `a = 1 + beta, s = gamma` with `beta < gamma <= k(1+beta)/n` for
/// `k <= n/2`, and `a = n - 1 + beta, s = k - 1 + gamma` with
/// `beta < gamma <= (1 - k/n) + k beta/n` for `k >= n/2`.
pub fn explicit_region_value(prob: &Problem, a: &Rational, s: &Rational) -> Option<Rational> {
    let (n, k) = (prob.n(), prob.k());
    let one = Rational::one();
    let (nr, kr) = (int(n), int(k));
    if 2 * k <= n {
        let beta = a - &one;
        let gamma = s.clone();
        let in_beta = beta.is_positive() && beta <= one;
        if in_beta && gamma > beta && gamma <= &kr * (&one + &beta) / &nr && prob.check_as(a, s).is_ok() {
            return Some(int(prob.full() - k));
        }
    }
    if 2 * k >= n {
        let beta = a - int(n - 1);
        let gamma = s - int(k - 1);
        let in_beta = beta.is_positive() && beta <= one;
        let cap = (&one - &kr / &nr) + &kr * &beta / &nr;
        if in_beta && gamma > beta && gamma <= cap && prob.check_as(a, s).is_ok() {
            return Some(int(prob.full() - (n - k)));
        }
    }
    None
}

/// `{j/den : lo < j/den < hi}`.
pub fn open_grid(lo: &Rational, hi: &Rational, den: i64) -> Vec<Rational> {
    let start = (lo * int(den)).floor().to_integer();
    let end = (hi * int(den)).ceil().to_integer();
    let mut out = Vec::new();
    let mut j = start;
    while j <= end {
        let v = Rational::new(j.clone(), den.into());
        if v > *lo && v < *hi {
            out.push(v);
        }
        j += 1;
    }
    out
}

/// Grid of `(a, s)` with `a in (0,n)` and `s in (0, min{k,a})` at spacing
/// `1/den`.
pub fn admissible_grid(prob: &Problem, den: i64) -> Vec<(Rational, Rational)> {
    let zero = Rational::zero();
    open_grid(&zero, &int(prob.n()), den)
        .into_iter()
        .flat_map(|a| {
            let cap = a.clone().min(int(prob.k()));
            open_grid(&zero, &cap, den).into_iter().map(move |s| (a.clone(), s))
        })
        .collect()
}
