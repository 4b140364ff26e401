//! Distance distribution functions as canonical left-continuous step functions.
//!
//! A distribution is stored as its jumps `(at_i → to_i)` with both coordinates
//! strictly increasing. Its value at `γ` is the largest `to_i` with
//! `at_i < γ` (zero if there is none), and the value at infinity is always 1.
//! A jump located at infinity records a distribution whose finite values stay
//! below 1.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{ExtNonneg, UnitRational};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Jump {
    pub at: ExtNonneg,
    pub to: UnitRational,
}

impl Jump {
    pub fn new(at: ExtNonneg, to: UnitRational) -> Self {
        Jump { at, to }
    }
}

impl fmt::Debug for Jump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}→{})", self.at, self.to)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DistributionFunction {
    jumps: Vec<Jump>,
}

impl DistributionFunction {
    /// Builds the canonical form of an arbitrary jump list.
    ///
    /// Jumps dominated by an earlier (or equal-position) jump are dropped, as
    /// are jumps to 0. If no finite jump reaches 1, a jump at infinity is
    /// appended. A jump at infinity must go to 1.
    pub fn from_jumps(mut jumps: Vec<Jump>) -> Result<Self> {
        if let Some(j) = jumps.iter().find(|j| j.at.is_infinite() && !j.to.is_one()) {
            return Err(Error::Malformed(format!(
                "a jump at infinity must go to 1, found {:?}",
                j
            )));
        }
        jumps.sort_by(|a, b| a.at.cmp(&b.at).then_with(|| b.to.cmp(&a.to)));
        let mut canonical: Vec<Jump> = Vec::with_capacity(jumps.len() + 1);
        let mut top = UnitRational::zero();
        for jump in jumps {
            if canonical.last().is_some_and(|last| last.at == jump.at) {
                // same position, smaller or equal target: dominated
                continue;
            }
            if jump.to > top {
                top = jump.to.clone();
                canonical.push(jump);
            }
        }
        if !top.is_one() {
            canonical.push(Jump::new(ExtNonneg::INFINITY, UnitRational::one()));
        }
        Ok(DistributionFunction { jumps: canonical })
    }

    /// Shorthand for tests and fixtures: `[("2", "1/2"), ("5", "1")]`.
    pub fn parse(pairs: &[(&str, &str)]) -> Result<Self> {
        let jumps = pairs
            .iter()
            .map(|(at, to)| Ok(Jump::new(at.parse()?, to.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_jumps(jumps)
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Value at `gamma`: `max{ to_i : at_i < gamma }`, 0 if none, 1 at infinity.
    pub fn eval(&self, gamma: &ExtNonneg) -> UnitRational {
        if gamma.is_infinite() {
            return UnitRational::one();
        }
        let idx = self.jumps.partition_point(|j| &j.at < gamma);
        match idx {
            0 => UnitRational::zero(),
            i => self.jumps[i - 1].to.clone(),
        }
    }

    /// `lim_{t↓gamma} φ(t) = max{ to_i : at_i ≤ gamma }` for finite `gamma`.
    pub fn right_limit(&self, gamma: &ExtNonneg) -> Result<UnitRational> {
        if gamma.is_infinite() {
            return Err(Error::Precondition("right limit at infinity".into()));
        }
        Ok(self.right_limit_finite(gamma).clone())
    }

    pub(crate) fn right_limit_finite<'a>(&'a self, gamma: &ExtNonneg) -> &'a UnitRational {
        debug_assert!(gamma.is_finite());
        match self.jumps.partition_point(|j| &j.at <= gamma) {
            0 => zero_ref(),
            i => &self.jumps[i - 1].to,
        }
    }

    /// Finite jump positions in increasing order.
    pub fn finite_breakpoints(&self) -> impl Iterator<Item = &ExtNonneg> {
        self.jumps.iter().map(|j| &j.at).filter(|at| at.is_finite())
    }

    /// The smallest finite breakpoint strictly greater than `gamma`.
    pub fn next_breakpoint_after(&self, gamma: &ExtNonneg) -> Option<&ExtNonneg> {
        let idx = self.jumps.partition_point(|j| &j.at <= gamma);
        self.jumps.get(idx).map(|j| &j.at).filter(|at| at.is_finite())
    }

    /// Supremum of the values taken at finite arguments.
    pub fn finite_supremum(&self) -> UnitRational {
        self.jumps
            .iter()
            .filter(|j| j.at.is_finite())
            .map(|j| j.to.clone())
            .next_back()
            .unwrap_or_else(UnitRational::zero)
    }

    /// True when the value 1 is reached at a finite argument.
    pub fn reaches_one_finitely(&self) -> bool {
        self.jumps.last().is_some_and(|j| j.at.is_finite())
    }

    pub fn is_epsilon_zero(&self) -> bool {
        self.jumps.len() == 1 && self.jumps[0].at.is_zero()
    }
}

fn zero_ref() -> &'static UnitRational {
    use std::sync::OnceLock;
    static ZERO: OnceLock<UnitRational> = OnceLock::new();
    ZERO.get_or_init(UnitRational::zero)
}

/// The largest distance distribution: 0 at 0 and 1 everywhere to the right.
pub fn epsilon_zero() -> DistributionFunction {
    DistributionFunction {
        jumps: vec![Jump::new(ExtNonneg::zero(), UnitRational::one())],
    }
}

pub(crate) fn epsilon_zero_ref() -> &'static DistributionFunction {
    use std::sync::OnceLock;
    static EPS0: OnceLock<DistributionFunction> = OnceLock::new();
    EPS0.get_or_init(epsilon_zero)
}

/// Finds some `t` with `phi(t) > psi(t)`, if one exists.
///
/// Both functions are constant on every interval `(p, q]` between consecutive
/// merged breakpoints, so comparing right limits at the breakpoints (and at 0)
/// decides the question. The returned point lies inside the offending interval.
pub fn first_violation(phi: &DistributionFunction, psi: &DistributionFunction) -> Option<ExtNonneg> {
    let mut points: Vec<&ExtNonneg> = phi.finite_breakpoints().chain(psi.finite_breakpoints()).collect();
    let zero = ExtNonneg::zero();
    points.push(&zero);
    points.sort();
    points.dedup();
    for (i, p) in points.iter().enumerate() {
        if phi.right_limit_finite(p) > psi.right_limit_finite(p) {
            let one = ExtNonneg::from_integer(1);
            let gap = match points.get(i + 1) {
                Some(next) => next.checked_sub(p).expect("sorted"),
                None => one.clone(),
            };
            return Some(*p + &gap.min_of(&one).half());
        }
    }
    None
}

/// `phi(γ) ≤ psi(γ)` for every `γ ∈ [0, ∞]`.
pub fn pointwise_leq(phi: &DistributionFunction, psi: &DistributionFunction) -> bool {
    first_violation(phi, psi).is_none()
}

/// Shifts every finite jump position by a factor (used by generators).
pub(crate) fn scaled(phi: &DistributionFunction, factor: &BigRational) -> DistributionFunction {
    let jumps = phi
        .jumps
        .iter()
        .map(|j| Jump::new(j.at.scale(factor), j.to.clone()))
        .collect();
    DistributionFunction::from_jumps(jumps).expect("scaling keeps validity")
}

impl fmt::Debug for DistributionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.jumps).finish()
    }
}

impl Serialize for DistributionFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.jumps.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DistributionFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let jumps = Vec::<Jump>::deserialize(deserializer)?;
        DistributionFunction::from_jumps(jumps).map_err(serde::de::Error::custom)
    }
}
