//! Brascamp-Lieb exponents `sup_L (dim L - (p/J) sum_j dim pi_{W_j}(L))`
//! evaluated over finite candidate families of subspaces.

use std::collections::BTreeSet;

use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{lambda_p, m_of, Problem};
use crate::error::{Error, Result};
use crate::grassmann::{proj_dim, Subspace};
use crate::ratmath::{int, parse_rational, Rational};

/// `W_1, ..., W_J` in `G(k,n)` with an exponent `p >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BLConfig {
    ambient: usize,
    subspaces: Vec<Subspace>,
    p: Rational,
}

impl BLConfig {
    pub fn new(subspaces: Vec<Subspace>, p: Rational) -> Result<Self> {
        let first = subspaces.first().ok_or_else(|| Error::Domain("need at least one subspace".into()))?;
        let (ambient, dim) = (first.ambient_dim(), first.dim());
        for w in &subspaces {
            if w.ambient_dim() != ambient {
                return Err(Error::AmbientMismatch { left: ambient, right: w.ambient_dim() });
            }
            if w.dim() != dim {
                return Err(Error::DimMismatch(format!("subspaces of dim {dim} and {}", w.dim())));
            }
        }
        if p < Rational::one() {
            return Err(Error::Range(format!("p = {p} must be >= 1")));
        }
        Ok(Self { ambient, subspaces, p })
    }

    pub fn with_p(&self, p: Rational) -> Result<Self> {
        Self::new(self.subspaces.clone(), p)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    /// Parses `n J p` followed by `J` subspace blocks (`n d` plus `d` rows).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (lineno, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty config".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad = |msg: String| Error::Parse { line: lineno, msg };
        if fields.len() != 3 {
            return Err(bad("header must be \"n J p\"".into()));
        }
        let n: usize = fields[0].parse().map_err(|_| bad(format!("bad n {:?}", fields[0])))?;
        let j: usize = fields[1].parse().map_err(|_| bad(format!("bad J {:?}", fields[1])))?;
        let p = parse_rational(fields[2]).map_err(|e| bad(e.to_string()))?;
        let mut subspaces = Vec::with_capacity(j);
        for _ in 0..j {
            let w = Subspace::parse_block(&mut lines)?;
            if w.ambient_dim() != n {
                return Err(bad(format!("subspace in R^{} but header says n = {n}", w.ambient_dim())));
            }
            subspaces.push(w);
        }
        if let Some((extra, _)) = lines.next() {
            return Err(Error::Parse { line: extra, msg: "trailing content after J blocks".into() });
        }
        Self::new(subspaces, p).map_err(|e| bad(e.to_string()))
    }

    /// `dim L - (p/J) sum_j dim pi_{W_j}(L)`.
    pub fn objective(&self, l: &Subspace) -> Result<Rational> {
        let mut total = 0i64;
        for w in &self.subspaces {
            total += proj_dim(w, l)? as i64;
        }
        let j = int(self.subspaces.len() as i64);
        Ok(int(l.dim() as i64) - &self.p * int(total) / j)
    }
}

/// Finite set of candidate subspaces `L`, sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateFamily {
    subspaces: Vec<Subspace>,
    truncated: bool,
}

impl CandidateFamily {
    /// A family from explicit subspaces; `{0}` and `R^n` are added.
    pub fn from_subspaces(ambient: usize, subspaces: impl IntoIterator<Item = Subspace>) -> Result<Self> {
        let mut set: BTreeSet<Subspace> = BTreeSet::new();
        set.insert(Subspace::zero(ambient));
        set.insert(Subspace::full(ambient));
        for s in subspaces {
            if s.ambient_dim() != ambient {
                return Err(Error::AmbientMismatch { left: ambient, right: s.ambient_dim() });
            }
            set.insert(s);
        }
        Ok(Self { subspaces: set.into_iter().collect(), truncated: false })
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    /// True when [`lattice_closure`] stopped at its cap before a fixpoint.
    pub fn truncated(&self) -> bool {
        self.truncated
    }
}

pub const DEFAULT_CAP: usize = 512;

/// Closes seeds, their orthocomplements and all coordinate subspaces under
/// pairwise sum and intersection, stopping once `cap` subspaces are known.
pub fn lattice_closure(ambient: usize, seeds: &[Subspace], cap: usize) -> Result<CandidateFamily> {
    let mut seen: BTreeSet<Subspace> = BTreeSet::new();
    let mut order: Vec<Subspace> = Vec::new();
    let mut truncated = false;
    let add = |s: Subspace, seen: &mut BTreeSet<Subspace>, order: &mut Vec<Subspace>| {
        if seen.insert(s.clone()) {
            order.push(s);
        }
    };
    for c in Subspace::all_coordinate(ambient) {
        add(c, &mut seen, &mut order);
    }
    for s in seeds {
        if s.ambient_dim() != ambient {
            return Err(Error::AmbientMismatch { left: ambient, right: s.ambient_dim() });
        }
        add(s.clone(), &mut seen, &mut order);
        add(s.orthocomplement(), &mut seen, &mut order);
    }
    let mut i = 0;
    'outer: while i < order.len() {
        for j in 0..i {
            for next in [order[i].sum(&order[j])?, order[i].intersect(&order[j])?] {
                if !seen.contains(&next) {
                    if seen.len() >= cap {
                        truncated = true;
                        break 'outer;
                    }
                    add(next, &mut seen, &mut order);
                }
            }
        }
        i += 1;
    }
    Ok(CandidateFamily { subspaces: seen.into_iter().collect(), truncated })
}

/// Result of [`bl_constant`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BLValue {
    pub value: Rational,
    /// Maximizer, smallest dimension first and then canonical order.
    pub critical: Subspace,
    /// The supremum runs over all subspaces; a finite family only certifies
    /// a lower bound. Always true.
    pub lower_bound_only: bool,
    /// The candidate family was cut off by its cap.
    pub truncated: bool,
}

/// Maximum of the objective over the family.
pub fn bl_constant(config: &BLConfig, candidates: &CandidateFamily) -> Result<BLValue> {
    if candidates.is_empty() {
        return Err(Error::Domain("empty candidate family".into()));
    }
    let scored = candidates
        .subspaces
        .par_iter()
        .map(|l| {
            if l.ambient_dim() != config.ambient {
                return Err(Error::DimMismatch(format!("candidate in R^{}, config in R^{}", l.ambient_dim(), config.ambient)));
            }
            Ok((config.objective(l)?, l))
        })
        .collect::<Result<Vec<_>>>()?;
    // Larger value wins; on ties the smaller subspace in canonical order.
    let (value, critical) = scored
        .into_iter()
        .reduce(|best, cur| if cur.0 > best.0 || (cur.0 == best.0 && cur.1 < best.1) { cur } else { best })
        .expect("nonempty");
    Ok(BLValue { value, critical: critical.clone(), lower_bound_only: true, truncated: candidates.truncated })
}

/// The maximizing `L` and its objective value.
pub fn critical_subspace(config: &BLConfig, candidates: &CandidateFamily) -> Result<(Subspace, Rational)> {
    let v = bl_constant(config, candidates)?;
    Ok((v.critical, v.value))
}

/// Number of patches `V_i` with `dim pi_L(V_i) >= threshold`.
pub fn transversal_count(patches: &[Subspace], l: &Subspace, threshold: usize) -> Result<usize> {
    let mut count = 0;
    for v in patches {
        if proj_dim(l, v)? >= threshold {
            count += 1;
        }
    }
    Ok(count)
}

/// A coordinate subspace where the sampled configuration exceeded
/// `lambda_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrosscheckViolation {
    pub trial: usize,
    pub l: Subspace,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub lambda: Rational,
    pub trials: usize,
    /// Number of `(trial, L)` pairs where every patch was transversal enough
    /// for the comparison to apply.
    pub checks: usize,
    pub violations: Vec<CrosscheckViolation>,
}

/// Patches drawn per trial by [`lambda_p_crosscheck`].
pub const CROSSCHECK_PATCHES: usize = 4;

/// Samples random `k`-planes and compares `dim L - p min_V dim pi_L(V)`
/// against `lambda_p` on every coordinate subspace `L` for which all patches
/// satisfy `dim pi_L(V) >= m(t, dim L)`.
pub fn lambda_p_crosscheck(prob: &Problem, t_floor: i64, p: &Rational, trials: usize, seed: u64) -> Result<CrosscheckReport> {
    let lambda = lambda_p(prob, t_floor, p)?;
    let n = prob.n() as usize;
    let k = prob.k() as usize;
    let coords = Subspace::all_coordinate(n);
    let thresholds: Vec<i64> = (0..=prob.n()).map(|l| m_of(prob, t_floor, l)).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    let mut violations = Vec::new();
    for trial in 0..trials {
        let patches: Vec<Subspace> = (0..CROSSCHECK_PATCHES).map(|_| Subspace::random(n, k, 3, &mut rng)).collect();
        for l in &coords {
            let dims: Vec<i64> = patches.iter().map(|v| proj_dim(l, v).map(|d| d as i64)).collect::<Result<_>>()?;
            let min = *dims.iter().min().expect("patches nonempty");
            if min < thresholds[l.dim()] {
                continue;
            }
            checks += 1;
            let value = int(l.dim() as i64) - p * int(min);
            if value > lambda {
                violations.push(CrosscheckViolation { trial, l: l.clone(), value });
            }
        }
    }
    Ok(CrosscheckReport { lambda, trials, checks, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmath::rat;

    fn axes2() -> Vec<Subspace> {
        vec![Subspace::coordinate(2, &[0]).unwrap(), Subspace::coordinate(2, &[1]).unwrap()]
    }

    fn loomis_whitney() -> Vec<Subspace> {
        [[0, 1], [0, 2], [1, 2]].iter().map(|a| Subspace::coordinate(3, a).unwrap()).collect()
    }

    #[test]
    fn closure_examples() {
        let fam = lattice_closure(2, &axes2(), DEFAULT_CAP).unwrap();
        assert_eq!(fam.len(), 4);
        assert!(!fam.truncated());
        assert_eq!(lattice_closure(2, &[], DEFAULT_CAP).unwrap().subspaces(), fam.subspaces());
        let diag = Subspace::from_int_rows(2, &[&[1, 1]]).unwrap();
        let fam = lattice_closure(2, &[diag.clone()], DEFAULT_CAP).unwrap();
        assert_eq!(fam.len(), 6);
        assert!(fam.subspaces().contains(&diag));
        assert!(fam.subspaces().contains(&Subspace::from_int_rows(2, &[&[1, -1]]).unwrap()));
    }

    #[test]
    fn closure_cap_is_flagged() {
        let seeds: Vec<Subspace> =
            [[1, 2, 3], [3, 1, 2], [1, -1, 5]].iter().map(|r| Subspace::from_int_rows(3, &[r]).unwrap()).collect();
        let fam = lattice_closure(3, &seeds, 20).unwrap();
        assert!(fam.truncated());
        assert_eq!(fam.len(), 20);
    }

    #[test]
    fn bl_examples() {
        let fam = lattice_closure(2, &axes2(), DEFAULT_CAP).unwrap();
        let cfg = BLConfig::new(axes2(), int(2)).unwrap();
        let v = bl_constant(&cfg, &fam).unwrap();
        assert_eq!(v.value, int(0));
        assert!(v.lower_bound_only);
        assert_eq!(critical_subspace(&cfg, &fam).unwrap(), (Subspace::zero(2), int(0)));
        let cfg = cfg.with_p(int(1)).unwrap();
        assert_eq!(critical_subspace(&cfg, &fam).unwrap(), (Subspace::full(2), int(1)));

        let lw = loomis_whitney();
        let fam = lattice_closure(3, &lw, DEFAULT_CAP).unwrap();
        let cfg = BLConfig::new(lw, rat(3, 2)).unwrap();
        assert_eq!(bl_constant(&cfg, &fam).unwrap().value, int(0));
        let cfg = cfg.with_p(int(2)).unwrap();
        assert_eq!(critical_subspace(&cfg, &fam).unwrap(), (Subspace::zero(3), int(0)));
    }

    #[test]
    fn config_validation() {
        assert!(BLConfig::new(vec![], int(1)).is_err());
        assert!(BLConfig::new(axes2(), rat(1, 2)).is_err());
        let mixed = vec![Subspace::coordinate(3, &[0]).unwrap(), Subspace::coordinate(3, &[0, 1]).unwrap()];
        assert!(matches!(BLConfig::new(mixed, int(1)), Err(Error::DimMismatch(_))));
    }

    #[test]
    fn config_file() {
        let text = "2 2 1\n2 1\n1 0\n2 1\n0 1\n";
        let cfg = BLConfig::parse(text).unwrap();
        assert_eq!(cfg.subspaces(), axes2().as_slice());
        assert_eq!(cfg.p(), &int(1));
        assert!(BLConfig::parse("2 2 1\n2 1\n1 0\n").is_err());
        assert!(BLConfig::parse("2 1 1.5\n2 1\n1 0\n").is_err());
        assert!(BLConfig::parse("2 1 1\n3 1\n1 0 0\n").is_err());
    }

    #[test]
    fn transversal_examples() {
        let x = Subspace::coordinate(2, &[0]).unwrap();
        assert_eq!(transversal_count(&axes2(), &x, 1).unwrap(), 1);
        assert_eq!(transversal_count(&axes2(), &x, 0).unwrap(), 2);
        let axes3: Vec<Subspace> = (0..3).map(|i| Subspace::coordinate(3, &[i]).unwrap()).collect();
        let xy = Subspace::coordinate(3, &[0, 1]).unwrap();
        assert_eq!(transversal_count(&axes3, &xy, 1).unwrap(), 2);
    }

    #[test]
    fn crosscheck_examples() {
        let r = lambda_p_crosscheck(&Problem::new(2, 1).unwrap(), 0, &int(2), 100, 7).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.checks > 0);
        let r = lambda_p_crosscheck(&Problem::new(3, 1).unwrap(), 1, &int(3), 100, 7).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.lambda, int(0));
        let r = lambda_p_crosscheck(&Problem::new(3, 1).unwrap(), 1, &int(3), 0, 7).unwrap();
        assert_eq!((r.checks, r.violations.len()), (0, 0));
    }
}
