//! Closed-form dimension counts on `G(k,n)`.

use crate::error::{condition, range, Result};

/// `dim G(m,n) = m(n - m)`.
pub fn grassmann_dim(m: i64, n: i64) -> Result<i64> {
    if m < 0 || m > n {
        return Err(range(format!("grassmann_dim needs 0 <= m <= n, got m={m}, n={n}")));
    }
    Ok(m * (n - m))
}

/// Dimension of `{V in G(k,n) : dim(V cap W^perp) >= k - l}` for a fixed
/// `W in G(m,n)`, equal to `d(k-l, n-m) + d(l, n-(k-l))`.
pub fn schubert_dim(n: i64, k: i64, m: i64, l: i64) -> Result<i64> {
    for (name, v) in [("n", n), ("k", k), ("m", m), ("l", l)] {
        if v < 0 || v > n {
            return Err(range(format!("{name}={v} outside [0, {n}]")));
        }
    }
    if n - k < m - l {
        return Err(condition(format!("n - k >= m - l fails: {} < {}", n - k, m - l)));
    }
    if l > k {
        return Err(condition(format!("l <= k fails: l={l}, k={k}")));
    }
    if l > m {
        return Err(condition(format!("l <= m fails: l={l}, m={m}")));
    }
    Ok(grassmann_dim(k - l, n - m)? + grassmann_dim(l, n - (k - l))?)
}

/// `E(m,l)`: the dimension of `{V in G(k,n) : dim pi_L(V) <= m}` for a fixed
/// `l`-plane `L`.
pub fn exceptional_locus_dim(n: i64, k: i64, m: i64, l: i64) -> Result<i64> {
    if k < 1 || k >= n {
        return Err(range(format!("k={k} outside [1, n-1] for n={n}")));
    }
    if !(-1..=n).contains(&m) {
        return Err(range(format!("m={m} outside [-1, {n}]")));
    }
    if !(0..=n).contains(&l) {
        return Err(range(format!("l={l} outside [0, {n}]")));
    }
    let full = k * (n - k);
    let lo = (l + k - n).max(0);
    let hi = l.min(k);
    Ok(if m < lo {
        0
    } else if m <= hi {
        full - (k - m) * (l - m)
    } else {
        full
    })
}
