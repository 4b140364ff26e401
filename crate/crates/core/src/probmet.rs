//! Finite probabilistic metric spaces and exact checks of their axioms.
//!
//! Reflexivity and symmetry are built into the representation: the diagonal
//! is always `ε_0` and one distribution is stored per unordered pair. The
//! separation axiom (P4) and the t-norm triangle law (P5) are decided by
//! [`check_pm_axioms`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::carrier::{Carrier, PairMap};
use crate::distributions::{epsilon_zero_ref, DistributionFunction};
use crate::error::{Error, Result};
use crate::exactnum::{ExtNonneg, UnitRational};
use crate::report::{Axiom, AxiomReport, Verdict, Witness};
use crate::tnorms::TNorm;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePMSpace {
    carrier: Carrier,
    alpha: PairMap<DistributionFunction>,
    tnorm: TNorm,
}

impl FinitePMSpace {
    pub fn from_fn(
        carrier: Carrier,
        tnorm: TNorm,
        f: impl FnMut(usize, usize) -> DistributionFunction,
    ) -> Self {
        let alpha = PairMap::from_fn(carrier.len(), f);
        FinitePMSpace { carrier, alpha, tnorm }
    }

    /// Builds a space from distributions keyed by canonical pair keys; every
    /// unordered pair of distinct points must be present exactly once.
    pub fn from_keyed(
        carrier: Carrier,
        tnorm: TNorm,
        mut alpha: BTreeMap<String, DistributionFunction>,
    ) -> Result<Self> {
        for key in alpha.keys() {
            carrier.parse_pair_key(key)?;
        }
        let pairs = PairMap::try_from_fn(carrier.len(), |i, j| {
            let key = carrier.pair_key(i, j);
            alpha
                .remove(&key)
                .ok_or_else(|| Error::Malformed(format!("alpha: missing pair \"{key}\"")))
        })?;
        Ok(FinitePMSpace {
            carrier,
            alpha: pairs,
            tnorm,
        })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn tnorm(&self) -> TNorm {
        self.tnorm
    }

    pub fn with_tnorm(mut self, tnorm: TNorm) -> Self {
        self.tnorm = tnorm;
        self
    }

    /// `α(x, y, ·)`; the diagonal is `ε_0`.
    pub fn alpha(&self, x: usize, y: usize) -> &DistributionFunction {
        if x == y {
            epsilon_zero_ref()
        } else {
            self.alpha.get(x, y)
        }
    }

    pub fn alpha_mut(&mut self, x: usize, y: usize) -> &mut DistributionFunction {
        assert!(x != y, "the diagonal is fixed to ε_0");
        self.alpha.get_mut(x, y)
    }

    pub fn eval(&self, x: usize, y: usize, gamma: &ExtNonneg) -> UnitRational {
        self.alpha(x, y).eval(gamma)
    }

    pub fn distributions(&self) -> impl Iterator<Item = &DistributionFunction> {
        self.alpha.values()
    }

    pub fn to_document(&self) -> SpaceDocument {
        SpaceDocument {
            alpha: self
                .carrier
                .pairs()
                .map(|(i, j)| (self.carrier.pair_key(i, j), self.alpha(i, j).clone()))
                .collect(),
            carrier: self.carrier.clone(),
            provenance: None,
            tnorm: self.tnorm,
        }
    }
}

/// JSON form of a space. Field order is alphabetical so the serialization is
/// canonical.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub alpha: BTreeMap<String, DistributionFunction>,
    pub carrier: Carrier,
    /// Generator label; ignored when reading a space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub tnorm: TNorm,
}

impl TryFrom<SpaceDocument> for FinitePMSpace {
    type Error = Error;

    fn try_from(doc: SpaceDocument) -> Result<Self> {
        FinitePMSpace::from_keyed(doc.carrier, doc.tnorm, doc.alpha)
    }
}

impl Serialize for FinitePMSpace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_document().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FinitePMSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = SpaceDocument::deserialize(deserializer)?;
        FinitePMSpace::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// Left endpoints of the maximal intervals `(a, b]` on which a distribution is
/// constant for positive finite arguments, with the value taken there and the
/// right end `b` (`None` for an unbounded interval).
fn constant_regions(phi: &DistributionFunction) -> Vec<(ExtNonneg, &UnitRational, Option<&ExtNonneg>)> {
    let zero = ExtNonneg::zero();
    let mut starts: Vec<&ExtNonneg> = Vec::new();
    starts.push(&zero);
    starts.extend(phi.finite_breakpoints().filter(|p| !p.is_zero()));
    starts
        .into_iter()
        .map(|a| (a.clone(), phi.right_limit_finite(a), phi.next_breakpoint_after(a)))
        .collect()
}

/// Exact (P5) search for one ordered triple. On a violation returns the
/// witness `(r, s, lhs, rhs)` with `lhs = α(y,z,r) * α(x,y,s) > α(x,z,r+s) = rhs`.
fn p5_violation(space: &FinitePMSpace, x: usize, y: usize, z: usize) -> Option<Witness> {
    let t = space.tnorm;
    let r_regions = constant_regions(space.alpha(y, z));
    let s_regions = constant_regions(space.alpha(x, y));
    let xz = space.alpha(x, z);
    let one = ExtNonneg::from_integer(1);
    for (a, vr, b) in &r_regions {
        if vr.is_zero() {
            continue;
        }
        for (c, vs, d) in &s_regions {
            let lhs = t.apply(vr, vs);
            let corner = a + c;
            let inf_rhs = xz.right_limit_finite(&corner);
            if &lhs <= inf_rhs {
                continue;
            }
            // Step inward from the corner, staying inside both regions and below
            // the next breakpoint of α(x,z,·).
            let mut h = one.clone();
            if let Some(b) = b {
                h = h.min_of(&b.checked_sub(a).expect("ordered")).clone();
            }
            if let Some(d) = d {
                h = h.min_of(&d.checked_sub(c).expect("ordered")).clone();
            }
            if let Some(q) = xz.next_breakpoint_after(&corner) {
                h = h.min_of(&q.checked_sub(&corner).expect("ordered")).clone();
            }
            let h = h.half();
            let r = a + &h;
            let s = c + &h;
            let rhs = xz.eval(&(&r + &s));
            debug_assert!(lhs > rhs);
            let lbl = |i| space.carrier.label(i).to_owned();
            return Some(
                Witness::new([lbl(x), lbl(y), lbl(z)])
                    .with("r", r)
                    .with("s", s)
                    .with("lhs", lhs)
                    .with("rhs", rhs),
            );
        }
    }
    None
}

/// Decides (P1)–(P5) exactly.
///
/// (P5) is checked region by region: `α(y,z,·)` and `α(x,y,·)` are constant on
/// intervals `(a, b]` and `(c, d]`, so the left side is constant on their
/// product, while the infimum of `α(x,z,r+s)` over the product is the right
/// limit of `α(x,z,·)` at `a + c`. Arguments `0` and `∞` and triples with a
/// repeated point cannot violate (P5) given (P1)–(P3) and are skipped.
pub fn check_pm_axioms(space: &FinitePMSpace) -> AxiomReport {
    let mut report = AxiomReport::new();
    report.push(Axiom::P1, Verdict::ByConstruction);
    report.push(Axiom::P2, Verdict::ByConstruction);
    report.push(Axiom::P3, Verdict::ByConstruction);

    let p4 = space.carrier.pairs().find_map(|(x, y)| {
        space
            .alpha(x, y)
            .is_epsilon_zero()
            .then(|| Witness::new([space.carrier.label(x), space.carrier.label(y)]))
    });
    report.push(Axiom::P4, Verdict::from_witness(p4));

    let n = space.len();
    let mut p5 = None;
    'outer: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x == y || y == z || x == z {
                    continue;
                }
                if let Some(w) = p5_violation(space, x, y, z) {
                    p5 = Some(w);
                    break 'outer;
                }
            }
        }
    }
    report.push(Axiom::P5, Verdict::from_witness(p5));
    report
}

/// The standard oracle grid: `{0, ∞}` plus every finite jump position `p`
/// together with `p ± 1/denominator` (when non-negative).
pub fn standard_gamma_grid(space: &FinitePMSpace, denominator: u64) -> Vec<ExtNonneg> {
    let delta = ExtNonneg::ratio(1, denominator);
    let mut grid = vec![ExtNonneg::zero(), ExtNonneg::INFINITY, delta.clone()];
    for phi in space.distributions() {
        for p in phi.finite_breakpoints() {
            grid.push(p.clone());
            grid.push(p + &delta);
            if let Some(below) = p.checked_sub(&delta) {
                grid.push(below);
            }
        }
    }
    grid.sort();
    grid.dedup();
    grid
}

/// Brute-force (P5) at every `(r, s)` of `grid × grid`, for every ordered
/// triple. Sound but not complete.
///
/// Every argument `γ` is first replaced by the number of jump positions of the
/// space lying strictly below it, which determines `α(x, y, γ)` for all pairs;
/// values are replaced by their rank among all occurring values and t-norm
/// products by the number of occurring values strictly below them. The inner
/// loop then compares integers only.
pub fn oracle_p5_grid(space: &FinitePMSpace, grid: &[ExtNonneg]) -> Result<AxiomReport> {
    if !grid.iter().any(ExtNonneg::is_zero) || !grid.iter().any(ExtNonneg::is_infinite) {
        return Err(Error::Precondition("oracle grid must contain 0 and ∞".into()));
    }
    let n = space.len();
    let t = space.tnorm;
    let g = grid.len();

    let mut levels: Vec<UnitRational> = vec![UnitRational::zero(), UnitRational::one()];
    levels.extend(space.distributions().flat_map(|phi| phi.jumps().iter().map(|j| j.to.clone())));
    levels.sort();
    levels.dedup();
    let rank = |v: &UnitRational| levels.binary_search(v).expect("occurring value");
    // below[i][j]: number of occurring values strictly below T(levels[i], levels[j])
    let below: Vec<Vec<usize>> = levels
        .iter()
        .map(|a| {
            levels
                .iter()
                .map(|b| {
                    let v = t.apply(a, b);
                    levels.partition_point(|l| l < &v)
                })
                .collect()
        })
        .collect();

    let mut breaks: Vec<&ExtNonneg> = space.distributions().flat_map(|phi| phi.finite_breakpoints()).collect();
    breaks.sort();
    breaks.dedup();
    let m = breaks.len();
    let pos = |v: &ExtNonneg| if v.is_infinite() { m + 1 } else { breaks.partition_point(|b| *b < v) };
    // a representative argument for each position class
    let one = ExtNonneg::from_integer(1);
    let reps: Vec<ExtNonneg> = (0..=m + 1)
        .map(|p| match p {
            0 => ExtNonneg::zero(),
            p if p == m + 1 => ExtNonneg::INFINITY,
            p if p == m => breaks[m - 1] + &one,
            p => breaks[p].clone(),
        })
        .collect();
    // table[x][y][p] = rank of α(x, y, ·) on position class p
    let table: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|x| (0..n).map(|y| reps.iter().map(|v| rank(&space.eval(x, y, v))).collect()).collect())
        .collect();
    let grid_pos: Vec<usize> = grid.iter().map(pos).collect();
    let sum_pos: Vec<usize> = grid
        .iter()
        .flat_map(|r| grid.iter().map(move |s| r + s))
        .map(|v| pos(&v))
        .collect();

    let mut violation = None;
    'outer: for x in 0..n {
        for z in 0..n {
            let xz = &table[x][z];
            for y in 0..n {
                let (yz, xy) = (&table[y][z], &table[x][y]);
                for ri in 0..g {
                    let row = &below[yz[grid_pos[ri]]];
                    let sums = &sum_pos[ri * g..(ri + 1) * g];
                    for si in 0..g {
                        // T(a, b) > levels[c] iff c < #{levels below T(a, b)}
                        if xz[sums[si]] < row[xy[grid_pos[si]]] {
                            let (r, s) = (&grid[ri], &grid[si]);
                            let lbl = |i| space.carrier.label(i).to_owned();
                            violation = Some(
                                Witness::new([lbl(x), lbl(y), lbl(z)])
                                    .with("r", r.clone())
                                    .with("s", s.clone())
                                    .with("lhs", t.apply(&space.eval(y, z, r), &space.eval(x, y, s)))
                                    .with("rhs", space.eval(x, z, &(r + s))),
                            );
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let mut report = AxiomReport::new();
    report.push(Axiom::P5, Verdict::from_witness(violation));
    Ok(report)
}

/// Re-evaluates a (P5) witness against the space.
pub fn p5_witness_holds(space: &FinitePMSpace, w: &Witness) -> Result<bool> {
    let idx = |k: usize| space.carrier.index_of(&w.points[k]);
    let (x, y, z) = (idx(0)?, idx(1)?, idx(2)?);
    let missing = || Error::Malformed("witness lacks r or s".into());
    let r = w.get("r").ok_or_else(missing)?;
    let s = w.get("s").ok_or_else(missing)?;
    let lhs = space.tnorm.apply(&space.eval(y, z, r), &space.eval(x, y, s));
    Ok(lhs > space.eval(x, z, &(r + s)))
}

/// Every `α(x,y,·)` reaches 1 at a finite argument.
pub fn is_lim_space(space: &FinitePMSpace) -> bool {
    space.distributions().all(DistributionFunction::reaches_one_finitely)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn e(s: &str) -> ExtNonneg {
        s.parse().unwrap()
    }

    #[test]
    fn pm2_is_valid() {
        let report = check_pm_axioms(&pm2());
        assert!(report.passed(), "{}", report.summary());
        assert_eq!(report.get(Axiom::P1), Some(&Verdict::ByConstruction));
        let oracle = oracle_p5_grid(&pm2(), &standard_gamma_grid(&pm2(), 1024)).unwrap();
        assert!(oracle.passed());
    }

    #[test]
    fn pm3bad_fails_p5_at_three_halves() {
        let space = pm3bad();
        let report = check_pm_axioms(&space);
        let w = report.witness(Axiom::P5).expect("P5 must fail");
        assert_eq!(w.points, ["x", "y", "z"]);
        assert_eq!(w.get("r"), Some(&e("3/2")));
        assert_eq!(w.get("s"), Some(&e("3/2")));
        assert_eq!(w.get("lhs"), Some(&e("1")));
        assert_eq!(w.get("rhs"), Some(&e("0")));
        assert!(p5_witness_holds(&space, w).unwrap());
        assert!(report.get(Axiom::P4).unwrap().holds());

        let oracle = oracle_p5_grid(&space, &standard_gamma_grid(&space, 1024)).unwrap();
        let ow = oracle.witness(Axiom::P5).expect("oracle must fail too");
        assert!(p5_witness_holds(&space, ow).unwrap());
        // the oracle also sees the specific point (3/2, 3/2)
        let mut grid = standard_gamma_grid(&space, 1024);
        grid.retain(|g| g.is_zero() || g.is_infinite());
        grid.push(e("3/2"));
        assert!(!oracle_p5_grid(&space, &grid).unwrap().passed());
    }

    #[test]
    fn one_point_space_is_vacuous() {
        let space = one_point();
        assert!(check_pm_axioms(&space).passed());
        assert!(is_lim_space(&space));
    }

    #[test]
    fn boundary_only_grid_always_passes() {
        let grid = [ExtNonneg::zero(), ExtNonneg::INFINITY];
        assert!(oracle_p5_grid(&pm3bad(), &grid).unwrap().passed());
        assert!(oracle_p5_grid(&pm3bad(), &grid[..1]).is_err());
    }

    #[test]
    fn p4_detects_indistinguishable_points() {
        let space = two_point(TNorm::Minimum, crate::distributions::epsilon_zero());
        let report = check_pm_axioms(&space);
        assert_eq!(report.witness(Axiom::P4).unwrap().points, ["x", "y"]);
        assert_eq!(report.failed_axioms(), vec![Axiom::P4]);
    }

    #[test]
    fn lim_space() {
        assert!(is_lim_space(&pm2()));
        let at_inf = two_point(TNorm::Product, df(&[("1", "1/2"), ("inf", "1")]));
        assert!(!is_lim_space(&at_inf));
        assert!(check_pm_axioms(&at_inf).passed());
    }

    #[test]
    fn document_round_trip() {
        let json = r#"{"carrier":["x","y"],"tnorm":"product","alpha":{"x|y":[{"at":"2","to":"1/2"},{"at":"5","to":"1"}]}}"#;
        let space: FinitePMSpace = serde_json::from_str(json).unwrap();
        assert_eq!(space, pm2());
        let out = serde_json::to_string(&space).unwrap();
        assert_eq!(
            out,
            r#"{"alpha":{"x|y":[{"at":"2","to":"1/2"},{"at":"5","to":"1"}]},"carrier":["x","y"],"tnorm":"product"}"#
        );
    }

    #[test]
    fn document_errors() {
        let missing = r#"{"carrier":["x","y","z"],"tnorm":"product","alpha":{"x|y":[{"at":"1","to":"1"}]}}"#;
        let err = serde_json::from_str::<FinitePMSpace>(missing).unwrap_err().to_string();
        assert!(err.contains("missing pair"), "{err}");
        let bad_norm = r#"{"carrier":["x"],"tnorm":"hamacher","alpha":{}}"#;
        assert!(serde_json::from_str::<FinitePMSpace>(bad_norm).is_err());
        let unsorted = r#"{"carrier":["x","y"],"tnorm":"product","alpha":{"y|x":[{"at":"1","to":"1"}]}}"#;
        assert!(serde_json::from_str::<FinitePMSpace>(unsorted).is_err());
    }
}
