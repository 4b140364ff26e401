//! λ-indexed level distances.
//!
//! For a space `(X, α, *)` the level distance is
//! `d_λ(x,y) = inf { γ ≥ 0 finite : α(x,y,γ) > 1 − λ }`, the λ-quantile of
//! `α(x,y,·)`. The same numbers serve as the local distances `φ_{λ,x}(y)` of the
//! associated approach space and as the uniform distances of the associated
//! uniform gauge space; which structure is meant is decided by the checkers in
//! [`crate::systems`] and [`crate::morphisms`], not here.
//!
//! Conversely a family `{d_λ}` determines the distributions
//! `β(x,y,γ) = sup { 1 − λ : d_λ(x,y) < γ }` (0 on the empty set, 1 at ∞).
//! Both directions are computed in closed form on canonical step functions,
//! so `reconstruct(levels_of(S)) == S` and `levels_of(reconstruct(F)) == F`
//! are plain structural equalities.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::carrier::{Carrier, PairMap};
use crate::distributions::{DistributionFunction, Jump};
use crate::error::{Error, Result};
use crate::exactnum::{ExtNonneg, UnitRational};
use crate::probmet::{check_pm_axioms, FinitePMSpace};
use crate::report::{Axiom, AxiomReport, Verdict, Witness};
use crate::tnorms::TNorm;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub upto: UnitRational,
    pub value: ExtNonneg,
}

impl Piece {
    pub fn new(upto: UnitRational, value: ExtNonneg) -> Self {
        Piece { upto, value }
    }
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(≤{}→{})", self.upto, self.value)
    }
}

/// A nonincreasing, left-continuous step function `λ ↦ d_λ` on `]0,1]`.
///
/// `d_λ = value_i` for `λ ∈ (upto_{i−1}, upto_i]` with `upto_0 = 0`; the
/// `upto` sequence increases strictly to exactly 1 and the values decrease
/// strictly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LevelProfile {
    pieces: Vec<Piece>,
}

impl LevelProfile {
    /// Validates and canonicalizes: adjacent pieces with equal values merge.
    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self> {
        let mut canonical: Vec<Piece> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            if piece.upto.is_zero() {
                return Err(Error::Malformed("profile piece ends at λ = 0".into()));
            }
            if let Some(last) = canonical.last_mut() {
                if piece.upto <= last.upto {
                    return Err(Error::Malformed(format!(
                        "profile breakpoints must increase strictly ({} after {})",
                        piece.upto, last.upto
                    )));
                }
                if piece.value > last.value {
                    return Err(Error::Malformed(format!(
                        "profile values must not increase with λ ({} after {})",
                        piece.value, last.value
                    )));
                }
                if piece.value == last.value {
                    last.upto = piece.upto;
                    continue;
                }
            }
            canonical.push(piece);
        }
        match canonical.last() {
            Some(last) if last.upto.is_one() => Ok(LevelProfile { pieces: canonical }),
            _ => Err(Error::Malformed("profile must end at λ = 1".into())),
        }
    }

    pub fn constant(value: ExtNonneg) -> Self {
        LevelProfile {
            pieces: vec![Piece::new(UnitRational::one(), value)],
        }
    }

    /// Shorthand for fixtures: `[("1/2", "5"), ("1", "2")]`.
    pub fn parse(pairs: &[(&str, &str)]) -> Result<Self> {
        let pieces = pairs
            .iter()
            .map(|(upto, value)| Ok(Piece::new(upto.parse()?, value.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_pieces(pieces)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Pieces together with their (open) left endpoints.
    pub fn intervals(&self) -> impl Iterator<Item = (&UnitRational, &Piece)> {
        let zero = zero_unit();
        self.pieces.iter().enumerate().map(move |(i, p)| {
            let left = if i == 0 { zero } else { &self.pieces[i - 1].upto };
            (left, p)
        })
    }

    /// `d_λ` for `λ ∈ ]0,1]`.
    pub fn eval(&self, lambda: &UnitRational) -> &ExtNonneg {
        debug_assert!(!lambda.is_zero());
        let idx = self.pieces.partition_point(|p| &p.upto < lambda);
        &self.pieces[idx.min(self.pieces.len() - 1)].value
    }

    /// `lim_{ε↓e} d_ε` for `e ∈ [0,1)`: the value of the piece whose interval
    /// contains points just above `e`.
    pub fn right_value(&self, e: &UnitRational) -> &ExtNonneg {
        debug_assert!(!e.is_one());
        let idx = self.pieces.partition_point(|p| &p.upto <= e);
        &self.pieces[idx].value
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].value.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.pieces.iter().all(|p| p.value.is_finite())
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &UnitRational> {
        self.pieces.iter().map(|p| &p.upto)
    }
}

fn zero_unit() -> &'static UnitRational {
    use std::sync::OnceLock;
    static ZERO: OnceLock<UnitRational> = OnceLock::new();
    ZERO.get_or_init(UnitRational::zero)
}

fn zero_profile() -> &'static LevelProfile {
    use std::sync::OnceLock;
    static ZERO: OnceLock<LevelProfile> = OnceLock::new();
    ZERO.get_or_init(|| LevelProfile::constant(ExtNonneg::zero()))
}

impl fmt::Debug for LevelProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.pieces).finish()
    }
}

impl Serialize for LevelProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.pieces.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LevelProfile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pieces = Vec::<Piece>::deserialize(deserializer)?;
        LevelProfile::from_pieces(pieces).map_err(serde::de::Error::custom)
    }
}

/// Quantile profile of one distribution: `d_λ = min { p_i : u_i > 1 − λ }`.
pub fn profile_of(phi: &DistributionFunction) -> LevelProfile {
    let jumps = phi.jumps();
    // Piece for jump j covers λ ∈ (1 − u_j, 1 − u_{j−1}], listed from the last jump down.
    let pieces = (0..jumps.len())
        .rev()
        .map(|j| {
            let prev = if j == 0 { UnitRational::zero() } else { jumps[j - 1].to.clone() };
            Piece::new(prev.complement(), jumps[j].at.clone())
        })
        .collect();
    LevelProfile::from_pieces(pieces).expect("quantiles of a canonical distribution are canonical")
}

/// Distribution recovered from a profile: a piece on `(a, b]` with value `v`
/// contributes the jump `v → 1 − a`.
pub fn distribution_of(profile: &LevelProfile) -> DistributionFunction {
    let jumps = profile
        .intervals()
        .map(|(left, p)| Jump::new(p.value.clone(), left.complement()))
        .collect();
    DistributionFunction::from_jumps(jumps).expect("profiles map to valid distributions")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelFamily {
    carrier: Carrier,
    levels: PairMap<LevelProfile>,
    tnorm: TNorm,
}

impl LevelFamily {
    pub fn from_fn(carrier: Carrier, tnorm: TNorm, f: impl FnMut(usize, usize) -> LevelProfile) -> Self {
        let levels = PairMap::from_fn(carrier.len(), f);
        LevelFamily { carrier, levels, tnorm }
    }

    pub fn from_keyed(carrier: Carrier, tnorm: TNorm, mut levels: BTreeMap<String, LevelProfile>) -> Result<Self> {
        for key in levels.keys() {
            carrier.parse_pair_key(key)?;
        }
        let pairs = PairMap::try_from_fn(carrier.len(), |i, j| {
            let key = carrier.pair_key(i, j);
            levels
                .remove(&key)
                .ok_or_else(|| Error::Malformed(format!("levels: missing pair \"{key}\"")))
        })?;
        Ok(LevelFamily {
            carrier,
            levels: pairs,
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

    pub fn profile(&self, x: usize, y: usize) -> &LevelProfile {
        if x == y {
            zero_profile()
        } else {
            self.levels.get(x, y)
        }
    }

    pub fn profile_mut(&mut self, x: usize, y: usize) -> &mut LevelProfile {
        assert!(x != y, "the diagonal is fixed to 0");
        self.levels.get_mut(x, y)
    }

    pub fn profiles(&self) -> impl Iterator<Item = &LevelProfile> {
        self.levels.values()
    }

    /// Union of all profile breakpoints, always including 1.
    pub fn breakpoints(&self) -> Vec<UnitRational> {
        let mut out: Vec<UnitRational> = self.profiles().flat_map(|p| p.breakpoints().cloned()).collect();
        out.push(UnitRational::one());
        out.sort();
        out.dedup();
        out
    }

    pub fn eval(&self, lambda: &UnitRational, x: usize, y: usize) -> &ExtNonneg {
        self.profile(x, y).eval(lambda)
    }

    pub fn to_document(&self) -> LevelDocument {
        LevelDocument {
            carrier: self.carrier.clone(),
            levels: self
                .carrier
                .pairs()
                .map(|(i, j)| (self.carrier.pair_key(i, j), self.profile(i, j).clone()))
                .collect(),
            tnorm: self.tnorm,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelDocument {
    pub carrier: Carrier,
    pub levels: BTreeMap<String, LevelProfile>,
    pub tnorm: TNorm,
}

impl TryFrom<LevelDocument> for LevelFamily {
    type Error = Error;

    fn try_from(doc: LevelDocument) -> Result<Self> {
        LevelFamily::from_keyed(doc.carrier, doc.tnorm, doc.levels)
    }
}

impl Serialize for LevelFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_document().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LevelFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = LevelDocument::deserialize(deserializer)?;
        LevelFamily::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// `d_λ(x, y)` by label.
pub fn level_eval(family: &LevelFamily, lambda: &UnitRational, x: &str, y: &str) -> Result<ExtNonneg> {
    if lambda.is_zero() {
        return Err(Error::Precondition("λ must be positive".into()));
    }
    let (i, j) = (family.carrier.index_of(x)?, family.carrier.index_of(y)?);
    Ok(family.eval(lambda, i, j).clone())
}

/// The level family of a space, without checking the space's axioms.
pub fn levels_of(space: &FinitePMSpace) -> LevelFamily {
    LevelFamily::from_fn(space.carrier().clone(), space.tnorm(), |i, j| profile_of(space.alpha(i, j)))
}

/// The space described by a family, without checking the family's axioms.
pub fn reconstruct(family: &LevelFamily) -> FinitePMSpace {
    FinitePMSpace::from_fn(family.carrier.clone(), family.tnorm, |i, j| distribution_of(family.profile(i, j)))
}

/// Δ: the level family of a valid probabilistic metric space.
pub fn delta_transform(space: &FinitePMSpace) -> Result<LevelFamily> {
    let report = check_pm_axioms(space);
    if !report.passed() {
        return Err(Error::AxiomViolation(Box::new(report)));
    }
    Ok(levels_of(space))
}

/// Φ: the probabilistic metric space of a family satisfying (US)–(UH).
pub fn phi_reconstruct(family: &LevelFamily) -> Result<FinitePMSpace> {
    let report = check_level_axioms(family);
    if !report.passed() {
        return Err(Error::AxiomViolation(Box::new(report)));
    }
    Ok(reconstruct(family))
}

/// Brute-force `d_λ(x,y)`: the least grid `γ` with `α(x,y,γ) > 1 − λ`, or ∞.
pub fn oracle_level_distance(
    space: &FinitePMSpace,
    lambda: &UnitRational,
    x: usize,
    y: usize,
    grid: &[ExtNonneg],
) -> ExtNonneg {
    let bound = lambda.complement();
    grid.iter()
        .filter(|g| g.is_finite() && space.eval(x, y, g) > bound)
        .min()
        .cloned()
        .unwrap_or(ExtNonneg::INFINITY)
}

/// Searches one ordered triple for a violation of
/// `d_ε(x,z) ≤ d_λ(x,y) + d_λ'(y,z)` whenever `(1−λ') * (1−λ) > 1−ε`.
///
/// On pieces `(a, b]` of `d(x,y)` and `(a', b']` of `d(y,z)` the right side is
/// constant and `1 − (1−λ')*(1−λ)` decreases towards `e* = 1 − (1−a')*(1−a)`
/// as `λ↓a`, `λ'↓a'`; the largest admissible left side is therefore the right
/// limit of `d(x,z)` at `e*`.
fn ut_violation(family: &LevelFamily, x: usize, y: usize, z: usize) -> Option<Witness> {
    let t = family.tnorm;
    let xy = family.profile(x, y);
    let yz = family.profile(y, z);
    let xz = family.profile(x, z);
    for (a, p) in xy.intervals() {
        for (a2, p2) in yz.intervals() {
            let sum = &p.value + &p2.value;
            if sum.is_infinite() {
                continue;
            }
            let s = t.apply(&a2.complement(), &a.complement());
            if s.is_zero() {
                continue;
            }
            let e_star = s.complement();
            let required = xz.right_value(&e_star);
            if required <= &sum {
                continue;
            }
            return Some(ut_witness(family, (x, y, z), (a, &p.upto), (a2, &p2.upto), &e_star, sum));
        }
    }
    None
}

/// Concrete `(ε, λ, λ')` inside a violating region found by [`ut_violation`].
fn ut_witness(
    family: &LevelFamily,
    (x, y, z): (usize, usize, usize),
    (a, b): (&UnitRational, &UnitRational),
    (a2, b2): (&UnitRational, &UnitRational),
    e_star: &UnitRational,
    sum: ExtNonneg,
) -> Witness {
    let t = family.tnorm;
    let xz = family.profile(x, z);
    let upto = &xz.pieces()[xz.pieces().partition_point(|p| &p.upto <= e_star)].upto;
    let eps = e_star.midpoint(upto);
    let bound = eps.complement();
    let (mut lambda, mut lambda2) = (a.midpoint(b), a2.midpoint(b2));
    while t.apply(&lambda2.complement(), &lambda.complement()) <= bound {
        lambda = a.midpoint(&lambda);
        lambda2 = a2.midpoint(&lambda2);
    }
    let lhs = family.eval(&eps, x, z).clone();
    debug_assert!(lhs > sum);
    debug_assert_eq!(family.eval(&lambda, x, y) + family.eval(&lambda2, y, z), sum);
    let lbl = |i| family.carrier.label(i).to_owned();
    Witness::new([lbl(x), lbl(y), lbl(z)])
        .with("epsilon", eps)
        .with("lambda", lambda)
        .with("lambda_prime", lambda2)
        .with("lhs", lhs)
        .with("rhs", sum)
}

/// Decides (US), (UD), (UT) and (UH) for a family.
///
/// (US) and (UD) hold by representation. Triples with a repeated point
/// satisfy (UT) automatically and are skipped.
pub fn check_level_axioms(family: &LevelFamily) -> AxiomReport {
    let mut report = AxiomReport::new();
    report.push(Axiom::US, Verdict::ByConstruction);
    report.push(Axiom::UD, Verdict::ByConstruction);

    let n = family.len();
    let mut ut = None;
    'outer: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x == y || y == z || x == z {
                    continue;
                }
                if let Some(w) = ut_violation(family, x, y, z) {
                    ut = Some(w);
                    break 'outer;
                }
            }
        }
    }
    report.push(Axiom::UT, Verdict::from_witness(ut));

    let uh = family.carrier.pairs().find_map(|(x, y)| {
        family
            .profile(x, y)
            .is_zero()
            .then(|| Witness::new([family.carrier.label(x), family.carrier.label(y)]))
    });
    report.push(Axiom::UH, Verdict::from_witness(uh));
    report
}

/// Oracle λ-grid: every profile breakpoint `u` with `u ± 1/denominator`
/// (inside `]0,1]`), plus `1/denominator`.
pub fn standard_lambda_grid(family: &LevelFamily, denominator: u64) -> Vec<UnitRational> {
    let delta = UnitRational::ratio(1, denominator);
    let mut grid = vec![delta.clone()];
    for u in family.breakpoints() {
        if let Some(v) = u.checked_add(delta.value()) {
            grid.push(v);
        }
        if let Some(v) = u.checked_sub(delta.value()).filter(|v| !v.is_zero()) {
            grid.push(v);
        }
        grid.push(u);
    }
    grid.sort();
    grid.dedup();
    grid
}

/// Brute-force (UT) over `grid³`. Since `d_ε` is nonincreasing in `ε`, for each
/// `(λ, λ')` only the smallest admissible grid `ε` needs checking.
pub fn oracle_ut_grid(family: &LevelFamily, grid: &[UnitRational]) -> Result<AxiomReport> {
    if grid.iter().any(UnitRational::is_zero) {
        return Err(Error::Precondition("λ grid must lie in ]0,1]".into()));
    }
    let mut sorted = grid.to_vec();
    sorted.sort();
    sorted.dedup();
    let g = sorted.len();
    let t = family.tnorm;
    // eps_for[i * g + j]: index of the least grid ε with (1−λ_j)*(1−λ_i) > 1−ε
    let eps_for: Vec<Option<usize>> = sorted
        .iter()
        .flat_map(|l| {
            let sorted = &sorted;
            sorted.iter().map(move |l2| {
                let threshold = t.apply(&l2.complement(), &l.complement()).complement();
                let idx = sorted.partition_point(|e| e <= &threshold);
                (idx < sorted.len()).then_some(idx)
            })
        })
        .collect();
    let n = family.len();
    // distances by rank among all occurring values; sums by the number of
    // occurring values not exceeding them
    let mut dist: Vec<&ExtNonneg> = family.profiles().flat_map(|p| p.pieces().iter().map(|q| &q.value)).collect();
    let zero = ExtNonneg::zero();
    dist.push(&zero);
    dist.sort();
    dist.dedup();
    let not_above: Vec<Vec<usize>> = dist
        .iter()
        .map(|a| {
            dist.iter()
                .map(|b| {
                    let v = *a + *b;
                    dist.partition_point(|d| *d <= &v)
                })
                .collect()
        })
        .collect();
    let values: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    sorted
                        .iter()
                        .map(|l| dist.binary_search(&family.eval(l, x, y)).expect("occurring value"))
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut violation = None;
    'outer: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for i in 0..g {
                    let row = &not_above[values[x][y][i]];
                    for j in 0..g {
                        let Some(k) = eps_for[i * g + j] else { continue };
                        // d_ε(x,z) > d_λ(x,y) + d_λ'(y,z)
                        if values[x][z][k] >= row[values[y][z][j]] {
                            let lbl = |p| family.carrier.label(p).to_owned();
                            let (eps, l, l2) = (&sorted[k], &sorted[i], &sorted[j]);
                            violation = Some(
                                Witness::new([lbl(x), lbl(y), lbl(z)])
                                    .with("epsilon", eps.clone())
                                    .with("lambda", l.clone())
                                    .with("lambda_prime", l2.clone())
                                    .with("lhs", family.eval(eps, x, z).clone())
                                    .with("rhs", family.eval(l, x, y) + family.eval(l2, y, z)),
                            );
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let mut report = AxiomReport::new();
    report.push(Axiom::UT, Verdict::from_witness(violation));
    Ok(report)
}

/// Re-evaluates a (UT) witness against the family.
pub fn ut_witness_holds(family: &LevelFamily, w: &Witness) -> Result<bool> {
    let idx = |k: usize| family.carrier.index_of(&w.points[k]);
    let (x, y, z) = (idx(0)?, idx(1)?, idx(2)?);
    let unit = |name: &str| -> Result<UnitRational> {
        let v = w.get(name).ok_or_else(|| Error::Malformed(format!("witness lacks {name}")))?;
        UnitRational::new(v.as_rational().cloned().unwrap_or_default())
    };
    let (eps, l, l2) = (unit("epsilon")?, unit("lambda")?, unit("lambda_prime")?);
    let admissible = family.tnorm.apply(&l2.complement(), &l.complement()) > eps.complement();
    Ok(admissible && family.eval(&eps, x, z) > &(family.eval(&l, x, y) + family.eval(&l2, y, z)))
}

/// The mixed triangle inequality with a single level on the right:
/// `d_ε(x,z) ≤ d_λ(x,y) + d_λ(y,z)` for `λ = lambda_for_epsilon(ε)`, checked at
/// every profile breakpoint `ε`. The local form `φ_{ε,x}(z) ≤ φ_{λ,x}(y) + φ_{λ,y}(z)`
/// involves the same numbers.
pub fn check_mixed_triangle(family: &LevelFamily) -> AxiomReport {
    let t = family.tnorm;
    let n = family.len();
    let mut violation = None;
    'outer: for eps in family.breakpoints() {
        let lambda = t.lambda_for_epsilon(&eps).expect("breakpoints are positive");
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = family.eval(&eps, x, z);
                    let rhs = family.eval(&lambda, x, y) + family.eval(&lambda, y, z);
                    if lhs > &rhs {
                        let lbl = |p| family.carrier.label(p).to_owned();
                        violation = Some(
                            Witness::new([lbl(x), lbl(y), lbl(z)])
                                .with("epsilon", eps.clone())
                                .with("lambda", lambda.clone())
                                .with("lhs", lhs.clone())
                                .with("rhs", rhs),
                        );
                        break 'outer;
                    }
                }
            }
        }
    }
    let mut report = AxiomReport::new();
    report.push(Axiom::MixedTriangle, Verdict::from_witness(violation));
    report
}

/// Checks `d_λ(x,y) < γ ⇔ α(x,y,γ) > 1−λ` and `β(x,y,γ) > 1−λ ⇔ d_λ(x,y) < γ`
/// (with `β` the reconstruction of `family`) at every pair, every `γ` in
/// `{0} ∪ {p, p ± δ}` over the pair's jump positions and every `λ` in
/// `{u, u ± δ}` over the pair's profile breakpoints, `δ = 1/denominator`.
/// Returns the first discrepancy.
pub fn duality_violation(space: &FinitePMSpace, family: &LevelFamily, denominator: u64) -> Option<Witness> {
    let delta = ExtNonneg::ratio(1, denominator);
    let delta_u = UnitRational::ratio(1, denominator);
    let beta = reconstruct(family);
    let n = space.len();
    for x in 0..n {
        for y in x..n {
            let mut gammas = vec![ExtNonneg::zero(), delta.clone()];
            for p in space.alpha(x, y).finite_breakpoints() {
                gammas.push(p.clone());
                gammas.push(p + &delta);
                gammas.extend(p.checked_sub(&delta));
            }
            let mut lambdas = vec![delta_u.clone()];
            for u in family.profile(x, y).breakpoints() {
                lambdas.push(u.clone());
                lambdas.extend(u.checked_add(delta_u.value()));
                lambdas.extend(u.checked_sub(delta_u.value()).filter(|v| !v.is_zero()));
            }
            let alpha = space.alpha(x, y);
            let beta_xy = beta.alpha(x, y);
            let profile = family.profile(x, y);
            for gamma in &gammas {
                let a = alpha.eval(gamma);
                let b = beta_xy.eval(gamma);
                for lambda in &lambdas {
                    let bound = lambda.complement();
                    let below = profile.eval(lambda) < gamma;
                    if below != (a > bound) || below != (b > bound) {
                        let lbl = |p| space.carrier().label(p).to_owned();
                        return Some(
                            Witness::new([lbl(x), lbl(y)])
                                .with("gamma", gamma.clone())
                                .with("lambda", lambda.clone()),
                        );
                    }
                }
            }
        }
    }
    None
}

pub fn duality_check(space: &FinitePMSpace, family: &LevelFamily) -> bool {
    duality_violation(space, family, 1024).is_none()
}

/// Every level distance is finite.
pub fn is_fin_family(family: &LevelFamily) -> bool {
    family.profiles().all(LevelProfile::is_finite)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::probmet::fixtures::{df, one_point, pm2, two_point};
    use crate::probmet::standard_gamma_grid;

    fn u(s: &str) -> UnitRational {
        s.parse().unwrap()
    }

    fn e(s: &str) -> ExtNonneg {
        s.parse().unwrap()
    }

    #[test]
    fn pm2_levels_match_grid_oracle() {
        let space = pm2();
        let grid = standard_gamma_grid(&space, 1024);
        let slack = e("1/1024");
        for (lambda, exact) in [("3/10", "5"), ("7/10", "2"), ("1/2", "5"), ("1", "2"), ("1/1024", "5")] {
            let o = oracle_level_distance(&space, &u(lambda), 0, 1, &grid);
            assert!(o >= e(exact) && o <= &e(exact) + &slack, "λ={lambda}: oracle {o}");
        }
        let family = delta_transform(&space).unwrap();
        assert_eq!(family, f2());
        assert_eq!(level_eval(&family, &u("3/10"), "x", "y").unwrap(), e("5"));
        assert_eq!(level_eval(&family, &u("7/10"), "x", "y").unwrap(), e("2"));
        assert_eq!(level_eval(&family, &u("1/3"), "y", "y").unwrap(), e("0"));
        assert!(level_eval(&family, &u("0"), "x", "y").is_err());
        assert!(level_eval(&family, &u("1/2"), "x", "w").is_err());
        assert!(oracle_level_distance(&space, &u("1"), 0, 0, &grid) <= slack);
    }

    #[test]
    fn reconstruction_of_f2_is_pm2() {
        let space = phi_reconstruct(&f2()).unwrap();
        assert_eq!(space, pm2());
        for (g, v) in [("1", "0"), ("3", "1/2"), ("7", "1"), ("inf", "1"), ("2", "0"), ("5", "1/2")] {
            assert_eq!(space.eval(0, 1, &e(g)), u(v), "β(x,y,{g})");
        }
    }

    #[test]
    fn infinite_levels() {
        let space = two_point(TNorm::Product, df(&[("1", "1/2"), ("inf", "1")]));
        let family = delta_transform(&space).unwrap();
        assert_eq!(family.profile(0, 1), &profile(&[("1/2", "inf"), ("1", "1")]));
        assert!(!is_fin_family(&family));
        assert!(is_fin_family(&f2()));
        assert_eq!(reconstruct(&family), space);
    }

    #[test]
    fn one_point_family() {
        let family = delta_transform(&one_point()).unwrap();
        assert_eq!(family.profiles().count(), 0);
        assert!(is_fin_family(&family));
        assert!(check_level_axioms(&family).passed());
        assert_eq!(phi_reconstruct(&family).unwrap(), one_point());
    }

    #[test]
    fn f2_passes_level_axioms_and_oracle() {
        assert!(check_level_axioms(&f2()).passed());
        assert!(check_mixed_triangle(&f2()).passed());
        let grid = UnitRational::dyadic_grid(64, false);
        assert!(oracle_ut_grid(&f2(), &grid).unwrap().passed());
        assert!(oracle_ut_grid(&f2(), &[UnitRational::one()]).unwrap().passed());
        assert!(oracle_ut_grid(&f2(), &[UnitRational::zero()]).is_err());
    }

    #[test]
    fn zero_profile_breaks_separation_only() {
        let mut family = f2();
        *family.profile_mut(0, 1) = profile(&[("1/2", "5"), ("1", "0")]);
        assert!(check_level_axioms(&family).passed());
        *family.profile_mut(0, 1) = LevelProfile::constant(ExtNonneg::zero());
        let report = check_level_axioms(&family);
        assert_eq!(report.failed_axioms(), vec![Axiom::UH]);
        assert_eq!(report.witness(Axiom::UH).unwrap().points, ["x", "y"]);
        assert!(phi_reconstruct(&family).is_err());
    }

    fn three_point(xy: LevelProfile, yz: LevelProfile, xz: LevelProfile) -> LevelFamily {
        LevelFamily::from_fn(Carrier::new(["x", "y", "z"]).unwrap(), TNorm::Product, |i, j| match (i, j) {
            (0, 1) => xy.clone(),
            (1, 2) => yz.clone(),
            _ => xz.clone(),
        })
    }

    #[test]
    fn ut_failure_agrees_with_oracle() {
        // d(x,z) = 10 at every level, far above d(x,y) + d(y,z) = 2.
        let family = three_point(
            LevelProfile::constant(e("1")),
            LevelProfile::constant(e("1")),
            LevelProfile::constant(e("10")),
        );
        let report = check_level_axioms(&family);
        let w = report.witness(Axiom::UT).expect("UT must fail");
        assert!(ut_witness_holds(&family, w).unwrap());
        let oracle = oracle_ut_grid(&family, &UnitRational::dyadic_grid(64, false)).unwrap();
        let ow = oracle.witness(Axiom::UT).expect("oracle must fail");
        assert!(ut_witness_holds(&family, ow).unwrap());
        assert!(!check_mixed_triangle(&family).passed());
    }

    #[test]
    fn ut_boundary_is_open() {
        // product t-norm: (1−λ')(1−λ) > 1−ε. With d(x,y) = d(y,z) = 1 for λ > 1/2
        // and ∞ below, the admissible ε exceed 1 − 1/4 = 3/4, so d(x,z) may be
        // large up to ε = 3/4 inclusive.
        let half = profile(&[("1/2", "inf"), ("1", "1")]);
        let ok = three_point(half.clone(), half.clone(), profile(&[("3/4", "100"), ("1", "2")]));
        assert!(check_level_axioms(&ok).passed(), "{}", check_level_axioms(&ok).summary());
        let bad = three_point(half.clone(), half, profile(&[("13/16", "100"), ("1", "2")]));
        let report = check_level_axioms(&bad);
        let w = report.witness(Axiom::UT).expect("must fail just above 3/4");
        assert!(ut_witness_holds(&bad, w).unwrap());
    }

    #[test]
    fn duality_examples() {
        let space = pm2();
        let family = f2();
        assert!(duality_check(&space, &family));
        // γ = 3, λ = 7/10: both sides true
        assert!(family.eval(&u("7/10"), 0, 1) < &e("3"));
        assert!(space.eval(0, 1, &e("3")) > u("3/10"));
        // γ = 2, λ = 7/10: both sides false
        assert!(!(family.eval(&u("7/10"), 0, 1) < &e("2")));
        assert!(!(space.eval(0, 1, &e("2")) > u("3/10")));
        // a mismatched family is caught
        let other = LevelFamily::from_fn(space.carrier().clone(), TNorm::Product, |_, _| {
            profile(&[("1/2", "6"), ("1", "2")])
        });
        assert!(!duality_check(&space, &other));
    }

    #[test]
    fn profile_validation() {
        assert!(LevelProfile::parse(&[("1/2", "2"), ("1", "5")]).is_err());
        assert!(LevelProfile::parse(&[("1/2", "5")]).is_err());
        assert!(LevelProfile::parse(&[("1/2", "5"), ("1/2", "2"), ("1", "1")]).is_err());
        assert!(LevelProfile::parse(&[("0", "5"), ("1", "1")]).is_err());
        assert_eq!(
            LevelProfile::parse(&[("1/4", "5"), ("1/2", "5"), ("1", "2")]).unwrap(),
            profile(&[("1/2", "5"), ("1", "2")])
        );
    }

    #[test]
    fn family_document() {
        let json = r#"{"carrier":["x","y"],"tnorm":"product","levels":{"x|y":[{"upto":"1/2","value":"5"},{"upto":"1","value":"2"}]}}"#;
        let family: LevelFamily = serde_json::from_str(json).unwrap();
        assert_eq!(family, f2());
        let canonical = r#"{"carrier":["x","y"],"levels":{"x|y":[{"upto":"1/2","value":"5"},{"upto":"1","value":"2"}]},"tnorm":"product"}"#;
        assert_eq!(serde_json::to_string(&family).unwrap(), canonical);
        let missing = r#"{"carrier":["x","y","z"],"levels":{"x|y":[{"upto":"1","value":"2"}]},"tnorm":"product"}"#;
        let err = serde_json::from_str::<LevelFamily>(missing).unwrap_err().to_string();
        assert!(err.contains("missing pair"), "{err}");
        let unknown = r#"{"carrier":["x","y"],"levels":{},"tnorm":"product","extra":1}"#;
        assert!(serde_json::from_str::<LevelFamily>(unknown).is_err());
    }
}
