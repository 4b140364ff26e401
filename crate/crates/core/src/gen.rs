//! Seeded generators for spaces, families and maps.
//!
//! Valid spaces come from chains of finite metrics `m_1 ≤ … ≤ m_k` paired
//! with levels `u_1 < … < u_k = 1`: `α(x,y)` jumps to `u_i` at `m_i(x,y)`.
//! Since `T(u_i, u_j) ≤ u_min(i,j)` and each `m_i` satisfies the triangle
//! inequality, such spaces satisfy (P5) for every t-norm. Metric weights are
//! multiples of 1/4 and levels multiples of 1/16, which keeps every
//! breakpoint well inside the resolution of the default oracle grids.
//!
//! Mutants break one named axiom of a valid object.

use std::fmt;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::carrier::Carrier;
use crate::distributions::{epsilon_zero, scaled, DistributionFunction, Jump};
use crate::exactnum::{ExtNonneg, UnitRational};
use crate::levels::{check_level_axioms, levels_of, LevelFamily, LevelProfile, Piece};
use crate::morphisms::SpaceMap;
use crate::probmet::{check_pm_axioms, FinitePMSpace};
use crate::report::Axiom;
use crate::tnorms::TNorm;

/// How a generated object was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    OnePoint,
    Chain,
    ChainAtInfinity,
    Perturbed,
    Random,
    Mutant(Axiom),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::OnePoint => f.write_str("one-point"),
            Provenance::Chain => f.write_str("chain"),
            Provenance::ChainAtInfinity => f.write_str("chain-at-infinity"),
            Provenance::Perturbed => f.write_str("perturbed"),
            Provenance::Random => f.write_str("random"),
            Provenance::Mutant(axiom) => write!(f, "mutant:{axiom}"),
        }
    }
}

impl Serialize for Provenance {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Debug)]
pub struct Generated<T> {
    pub value: T,
    pub provenance: Provenance,
}

impl<T> Generated<T> {
    fn new(value: T, provenance: Provenance) -> Self {
        Generated { value, provenance }
    }
}

/// A symmetric matrix of extended distances with zero diagonal.
pub type Metric = Vec<Vec<ExtNonneg>>;

fn quarters<R: Rng>(rng: &mut R, lo: u64, hi: u64) -> ExtNonneg {
    ExtNonneg::ratio(rng.gen_range(lo..=hi), 4)
}

/// Shortest-path closure.
pub fn closure(mut m: Metric) -> Metric {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &m[i][k] + &m[k][j];
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
    m
}

fn symmetric<R: Rng>(rng: &mut R, n: usize, mut f: impl FnMut(&mut R, usize, usize) -> ExtNonneg) -> Metric {
    let mut m = vec![vec![ExtNonneg::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = f(rng, i, j);
            m[i][j] = v.clone();
            m[j][i] = v;
        }
    }
    m
}

/// `m_1 ≤ … ≤ m_k`, each the closure of positive weights in `[1/4, 4]`
/// added to the previous metric.
pub fn metric_chain<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<Metric> {
    let mut chain = vec![closure(symmetric(rng, n, |r, _, _| quarters(r, 1, 16)))];
    for _ in 1..k {
        let prev = chain.last().expect("nonempty");
        let next = symmetric(rng, n, |r, i, j| &prev[i][j] + &quarters(r, 0, 8));
        chain.push(closure(next));
    }
    chain
}

/// Levels `u_1 < … < u_k = 1`, multiples of 1/16.
pub fn random_levels<R: Rng>(rng: &mut R, k: usize) -> Vec<UnitRational> {
    let k = k.clamp(1, 16);
    let mut picks: Vec<u64> = (1..16).collect::<Vec<_>>();
    picks.shuffle(rng);
    let mut lower: Vec<u64> = picks.into_iter().take(k - 1).collect();
    lower.sort_unstable();
    let mut levels: Vec<UnitRational> = lower.into_iter().map(|v| UnitRational::ratio(v, 16)).collect();
    levels.push(UnitRational::one());
    levels
}

/// Splits the points into two nonempty clusters and makes every metric from
/// index `cut` on infinite across them.
fn split_at_infinity<R: Rng>(rng: &mut R, chain: &mut [Metric]) {
    let n = chain[0].len();
    if n < 2 {
        return;
    }
    let mut side: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    side[0] = false;
    side[rng.gen_range(1..n)] = true;
    let cut = rng.gen_range(0..chain.len());
    for m in &mut chain[cut..] {
        for i in 0..n {
            for j in 0..n {
                if side[i] != side[j] {
                    m[i][j] = ExtNonneg::INFINITY;
                }
            }
        }
    }
}

fn distribution_from_chain(chain: &[Metric], levels: &[UnitRational], i: usize, j: usize) -> DistributionFunction {
    let jumps = chain
        .iter()
        .zip(levels)
        .filter(|(m, _)| m[i][j].is_finite())
        .map(|(m, u)| Jump::new(m[i][j].clone(), u.clone()))
        .collect();
    DistributionFunction::from_jumps(jumps).expect("finite jumps are valid")
}

/// The space of a metric chain.
pub fn space_from_chain(chain: &[Metric], levels: &[UnitRational], tnorm: TNorm) -> FinitePMSpace {
    let n = chain.first().map_or(0, Vec::len);
    FinitePMSpace::from_fn(Carrier::numbered(n), tnorm, |i, j| distribution_from_chain(chain, levels, i, j))
}

/// A chain space with `n` points and at most `k` jumps per pair; with
/// `at_infinity` some pairs only reach 1 at ∞.
pub fn chain_space<R: Rng>(rng: &mut R, n: usize, k: usize, tnorm: TNorm, at_infinity: bool) -> FinitePMSpace {
    let levels = random_levels(rng, k);
    let mut chain = metric_chain(rng, n, levels.len());
    if at_infinity {
        split_at_infinity(rng, &mut chain);
    }
    space_from_chain(&chain, &levels, tnorm)
}

/// Moves one jump by 1/4 or changes one intermediate level by 1/16, keeping
/// the result only if it still satisfies the axioms.
fn perturb_space<R: Rng>(rng: &mut R, space: &FinitePMSpace) -> Option<FinitePMSpace> {
    let n = space.len();
    if n < 2 {
        return None;
    }
    for _ in 0..20 {
        let x = rng.gen_range(0..n);
        let y = (x + rng.gen_range(1..n)) % n;
        let mut jumps = space.alpha(x, y).jumps().to_vec();
        let idx = rng.gen_range(0..jumps.len());
        let jump = &mut jumps[idx];
        let step = ExtNonneg::ratio(1, 4);
        let nudge = UnitRational::ratio(1, 16);
        match rng.gen_range(0..4) {
            0 if jump.at.is_finite() => jump.at = &jump.at + &step,
            1 => match jump.at.checked_sub(&step) {
                Some(at) if jump.at.is_finite() => jump.at = at,
                _ => continue,
            },
            2 if !jump.to.is_one() => match jump.to.checked_add(nudge.value()) {
                Some(to) if !to.is_one() => jump.to = to,
                _ => continue,
            },
            3 if !jump.to.is_one() => match jump.to.checked_sub(nudge.value()) {
                Some(to) if !to.is_zero() => jump.to = to,
                _ => continue,
            },
            _ => continue,
        }
        let Ok(phi) = DistributionFunction::from_jumps(jumps) else { continue };
        if &phi == space.alpha(x, y) {
            continue;
        }
        let mut candidate = space.clone();
        *candidate.alpha_mut(x, y) = phi;
        if check_pm_axioms(&candidate).passed() {
            return Some(candidate);
        }
    }
    None
}

/// A valid space with `n` points and at most `k` jumps per pair.
pub fn valid_space<R: Rng>(rng: &mut R, n: usize, k: usize, tnorm: TNorm) -> Generated<FinitePMSpace> {
    if n <= 1 {
        return Generated::new(chain_space(rng, n, k, tnorm, false), Provenance::OnePoint);
    }
    match rng.gen_range(0..5) {
        0 => Generated::new(chain_space(rng, n, k, tnorm, true), Provenance::ChainAtInfinity),
        1 => {
            let inf = rng.gen_bool(0.3);
            let base = chain_space(rng, n, k, tnorm, inf);
            match perturb_space(rng, &base) {
                Some(space) => Generated::new(space, Provenance::Perturbed),
                None if inf => Generated::new(base, Provenance::ChainAtInfinity),
                None => Generated::new(base, Provenance::Chain),
            }
        }
        _ => Generated::new(chain_space(rng, n, k, tnorm, false), Provenance::Chain),
    }
}

/// Copies point `y` of `space` into a new last point at distance `ε_0`.
fn clone_point(space: &FinitePMSpace, y: usize) -> FinitePMSpace {
    let n = space.len();
    let twin = |i: usize| if i == n { y } else { i };
    FinitePMSpace::from_fn(Carrier::numbered(n + 1), space.tnorm(), |i, j| {
        let (a, b) = (twin(i), twin(j));
        if a == b {
            epsilon_zero()
        } else {
            space.alpha(a, b).clone()
        }
    })
}

fn last_finite_jump(phi: &DistributionFunction) -> ExtNonneg {
    phi.finite_breakpoints().last().cloned().unwrap_or_else(ExtNonneg::zero)
}

/// A space failing exactly the named axiom: (P4) by duplicating a point, or
/// (P5) by pushing one distance beyond the sum of two others.
pub fn mutant_space<R: Rng>(rng: &mut R, n: usize, k: usize, tnorm: TNorm) -> Generated<FinitePMSpace> {
    assert!(n >= 2, "mutants need two points");
    if n == 2 || rng.gen_bool(0.5) {
        let inf = rng.gen_bool(0.2);
        let base = chain_space(rng, n - 1, k, tnorm, inf);
        let y = rng.gen_range(0..n - 1);
        return Generated::new(clone_point(&base, y), Provenance::Mutant(Axiom::P4));
    }
    let mut space = chain_space(rng, n, k, tnorm, false);
    let mut points: Vec<usize> = (0..n).collect();
    points.shuffle(rng);
    let (x, y, z) = (points[0], points[1], points[2]);
    let reach = &last_finite_jump(space.alpha(x, y)) + &last_finite_jump(space.alpha(y, z));
    let far = &reach + &ExtNonneg::from_integer(1);
    *space.alpha_mut(x, z) =
        DistributionFunction::from_jumps(vec![Jump::new(far, UnitRational::one())]).expect("valid jump");
    Generated::new(space, Provenance::Mutant(Axiom::P5))
}

/// Moves one profile breakpoint by 1/16 or one value by 1/4, keeping the
/// result only if it still satisfies the level axioms.
fn perturb_family<R: Rng>(rng: &mut R, family: &LevelFamily) -> Option<LevelFamily> {
    let n = family.len();
    if n < 2 {
        return None;
    }
    for _ in 0..20 {
        let x = rng.gen_range(0..n);
        let y = (x + rng.gen_range(1..n)) % n;
        let mut pieces = family.profile(x, y).pieces().to_vec();
        let idx = rng.gen_range(0..pieces.len());
        let piece = &mut pieces[idx];
        let step = ExtNonneg::ratio(1, 4);
        let nudge = UnitRational::ratio(1, 16);
        match rng.gen_range(0..4) {
            0 if piece.value.is_finite() => piece.value = &piece.value + &step,
            1 => match piece.value.checked_sub(&step) {
                Some(v) if piece.value.is_finite() => piece.value = v,
                _ => continue,
            },
            2 if !piece.upto.is_one() => match piece.upto.checked_add(nudge.value()) {
                Some(u) => piece.upto = u,
                None => continue,
            },
            3 if !piece.upto.is_one() => match piece.upto.checked_sub(nudge.value()) {
                Some(u) if !u.is_zero() => piece.upto = u,
                _ => continue,
            },
            _ => continue,
        }
        let Ok(profile) = LevelProfile::from_pieces(pieces) else { continue };
        if &profile == family.profile(x, y) {
            continue;
        }
        let mut candidate = family.clone();
        *candidate.profile_mut(x, y) = profile;
        if check_level_axioms(&candidate).passed() {
            return Some(candidate);
        }
    }
    None
}

fn random_profile<R: Rng>(rng: &mut R, k: usize) -> LevelProfile {
    let count = rng.gen_range(1..=k.clamp(1, 15));
    let mut uptos: Vec<u64> = (1..16).collect();
    uptos.shuffle(rng);
    let mut uptos: Vec<u64> = uptos.into_iter().take(count - 1).collect();
    uptos.sort_unstable();
    uptos.push(16);
    let mut values: Vec<u64> = (1..=32).collect();
    values.shuffle(rng);
    let mut values: Vec<u64> = values.into_iter().take(count).collect();
    values.sort_unstable_by(|a, b| b.cmp(a));
    let pieces = uptos
        .iter()
        .zip(&values)
        .map(|(&u, &v)| Piece::new(UnitRational::ratio(u, 16), ExtNonneg::ratio(v, 4)))
        .collect();
    LevelProfile::from_pieces(pieces).expect("strictly monotone pieces")
}

/// A family satisfying (US)–(UH): the levels of a chain space, a perturbation
/// of one, or random profiles that happen to pass.
pub fn valid_family<R: Rng>(rng: &mut R, n: usize, k: usize, tnorm: TNorm) -> Generated<LevelFamily> {
    if n <= 1 {
        return Generated::new(levels_of(&chain_space(rng, n, k, tnorm, false)), Provenance::OnePoint);
    }
    match rng.gen_range(0..4) {
        0 => {
            let inf = rng.gen_bool(0.3);
            let base = levels_of(&chain_space(rng, n, k, tnorm, inf));
            match perturb_family(rng, &base) {
                Some(family) => Generated::new(family, Provenance::Perturbed),
                None if inf => Generated::new(base, Provenance::ChainAtInfinity),
                None => Generated::new(base, Provenance::Chain),
            }
        }
        1 => {
            for _ in 0..50 {
                let family = LevelFamily::from_fn(Carrier::numbered(n), tnorm, |_, _| random_profile(rng, k));
                if check_level_axioms(&family).passed() {
                    return Generated::new(family, Provenance::Random);
                }
            }
            Generated::new(levels_of(&chain_space(rng, n, k, tnorm, false)), Provenance::Chain)
        }
        2 => Generated::new(levels_of(&chain_space(rng, n, k, tnorm, true)), Provenance::ChainAtInfinity),
        _ => Generated::new(levels_of(&chain_space(rng, n, k, tnorm, false)), Provenance::Chain),
    }
}

/// A family failing exactly the named axiom: (UH) by duplicating a point, or
/// (UT) by making one distance exceed a two-step path at every level.
pub fn mutant_family<R: Rng>(rng: &mut R, n: usize, k: usize, tnorm: TNorm) -> Generated<LevelFamily> {
    assert!(n >= 2, "mutants need two points");
    if n == 2 || rng.gen_bool(0.5) {
        let inf = rng.gen_bool(0.2);
        let base = chain_space(rng, n - 1, k, tnorm, inf);
        let y = rng.gen_range(0..n - 1);
        return Generated::new(levels_of(&clone_point(&base, y)), Provenance::Mutant(Axiom::UH));
    }
    let mut family = levels_of(&chain_space(rng, n, k, tnorm, false));
    let mut points: Vec<usize> = (0..n).collect();
    points.shuffle(rng);
    let (x, y, z) = (points[0], points[1], points[2]);
    // ε = 1 and λ = λ' = λ0 satisfy (1−λ0)*(1−λ0) > 0
    let lambda = tnorm.lambda_for_epsilon(&UnitRational::one()).expect("ε = 1 is positive");
    let path = family.eval(&lambda, x, y) + family.eval(&lambda, y, z);
    *family.profile_mut(x, z) = LevelProfile::constant(&path + &ExtNonneg::from_integer(1));
    Generated::new(family, Provenance::Mutant(Axiom::UT))
}

pub fn random_map<R: Rng>(rng: &mut R, domain: &Carrier, codomain: &Carrier) -> SpaceMap {
    let assign = (0..domain.len()).map(|_| rng.gen_range(0..codomain.len())).collect();
    SpaceMap::new(domain.clone(), codomain.clone(), assign).expect("assignment inside the codomain")
}

/// How a map triple was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapSource {
    /// The domain's metrics dominate the pulled-back codomain metrics.
    PullBack,
    /// Identity between a space and a rescaled copy.
    Scaled,
    /// Unrelated domain and map.
    Independent,
}

impl fmt::Display for MapSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapSource::PullBack => "pull-back",
            MapSource::Scaled => "scaled",
            MapSource::Independent => "independent",
        })
    }
}

#[derive(Clone, Debug)]
pub struct MapTriple {
    pub map: SpaceMap,
    pub domain: FinitePMSpace,
    pub codomain: FinitePMSpace,
    pub source: MapSource,
}

/// A map `f : X → Y` between valid spaces with at most `max_points` points
/// and `k` jumps per pair. Pull-backs and upward rescalings are
/// non-expansive by construction; the other triples mostly are not.
pub fn map_triple<R: Rng>(rng: &mut R, max_points: usize, k: usize, tnorm: TNorm) -> MapTriple {
    let ny = rng.gen_range(1..=max_points);
    let levels = random_levels(rng, k);
    let mut chain_y = metric_chain(rng, ny, levels.len());
    if rng.gen_bool(0.2) {
        split_at_infinity(rng, &mut chain_y);
    }
    let codomain = space_from_chain(&chain_y, &levels, tnorm);
    match rng.gen_range(0..3) {
        0 => {
            let nx = rng.gen_range(1..=max_points);
            let map = random_map(rng, &Carrier::numbered(nx), codomain.carrier());
            let mut chain_x: Vec<Metric> = Vec::with_capacity(levels.len());
            for m in &chain_y {
                let prev = chain_x.last();
                let weights = symmetric(rng, nx, |r, i, j| {
                    let pulled = &m[map.apply(i)][map.apply(j)] + &quarters(r, 1, 4);
                    match prev {
                        Some(p) => pulled.max(p[i][j].clone()),
                        None => pulled,
                    }
                });
                chain_x.push(closure(weights));
            }
            let domain = space_from_chain(&chain_x, &levels, tnorm);
            MapTriple { map, domain, codomain, source: MapSource::PullBack }
        }
        1 => {
            let factors = [(1, 2), (3, 4), (1, 1), (5, 4), (3, 2), (2, 1)];
            let (p, q) = factors[rng.gen_range(0..factors.len())];
            let c = BigRational::new(p.into(), q.into());
            let domain = FinitePMSpace::from_fn(codomain.carrier().clone(), tnorm, |i, j| {
                scaled(codomain.alpha(i, j), &c)
            });
            let map = SpaceMap::identity(codomain.carrier().clone());
            MapTriple { map, domain, codomain, source: MapSource::Scaled }
        }
        _ => {
            let nx = rng.gen_range(1..=max_points);
            let inf = rng.gen_bool(0.2);
            let domain = chain_space(rng, nx, k, tnorm, inf);
            let map = random_map(rng, domain.carrier(), codomain.carrier());
            MapTriple { map, domain, codomain, source: MapSource::Independent }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphisms::is_nonexpansive;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chains_are_metrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let chain = metric_chain(&mut rng, 5, 4);
            for w in chain.windows(2) {
                assert!((0..5).all(|i| (0..5).all(|j| w[0][i][j] <= w[1][i][j])));
            }
            for m in &chain {
                assert_eq!(&closure(m.clone()), m);
            }
        }
    }

    #[test]
    fn generated_spaces_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for t in TNorm::ALL {
            for n in 1..=5 {
                for _ in 0..10 {
                    let g = valid_space(&mut rng, n, 4, t);
                    assert!(check_pm_axioms(&g.value).passed(), "{}: {:?}", g.provenance, g.value);
                    assert!(g.value.distributions().all(|phi| phi.jumps().len() <= 5));
                }
            }
        }
    }

    #[test]
    fn mutants_fail_their_axiom() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for t in TNorm::ALL {
            for _ in 0..20 {
                let g = mutant_space(&mut rng, 4, 3, t);
                let Provenance::Mutant(axiom) = g.provenance else { panic!("not a mutant") };
                assert_eq!(check_pm_axioms(&g.value).failed_axioms(), vec![axiom]);
                let g = mutant_family(&mut rng, 4, 3, t);
                let Provenance::Mutant(axiom) = g.provenance else { panic!("not a mutant") };
                assert_eq!(check_level_axioms(&g.value).failed_axioms(), vec![axiom]);
            }
        }
    }

    #[test]
    fn generated_families_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for t in TNorm::ALL {
            for _ in 0..20 {
                let g = valid_family(&mut rng, 4, 4, t);
                assert!(check_level_axioms(&g.value).passed(), "{}", g.provenance);
            }
        }
    }

    #[test]
    fn pull_backs_are_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let m = map_triple(&mut rng, 4, 3, TNorm::Product);
            assert!(check_pm_axioms(&m.domain).passed());
            assert!(check_pm_axioms(&m.codomain).passed());
            if m.source == MapSource::PullBack {
                assert!(is_nonexpansive(&m.map, &m.domain, &m.codomain).unwrap());
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = valid_space(&mut ChaCha8Rng::seed_from_u64(7), 3, 3, TNorm::Minimum);
        let b = valid_space(&mut ChaCha8Rng::seed_from_u64(7), 3, 3, TNorm::Minimum);
        assert_eq!(a.value, b.value);
        assert_eq!(a.provenance, b.provenance);
    }
}
