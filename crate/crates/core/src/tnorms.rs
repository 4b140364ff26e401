//! The three classical continuous t-norms, a law checker for arbitrary binary
//! operations on a grid, and the ε ↦ λ search behind the mixed triangle
//! inequalities.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Bound;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::UnitRational;
use crate::report::{Axiom, AxiomReport, Verdict, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TNorm {
    Minimum,
    Product,
    Lukasiewicz,
}

impl TNorm {
    pub const ALL: [TNorm; 3] = [TNorm::Minimum, TNorm::Product, TNorm::Lukasiewicz];

    pub fn apply(self, a: &UnitRational, b: &UnitRational) -> UnitRational {
        match self {
            TNorm::Minimum => a.min(b).clone(),
            TNorm::Product => a.mul(b),
            TNorm::Lukasiewicz => a.bounded_sum(b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TNorm::Minimum => "minimum",
            TNorm::Product => "product",
            TNorm::Lukasiewicz => "lukasiewicz",
        }
    }

    /// Some `λ ∈ ]0,1]` with `(1−λ) * (1−λ) > 1−ε`.
    ///
    /// For the minimum this is `ε/2`. The other t-norms try `λ = 1/2, 1/4, …`
    /// and return the first that works; continuity at `(1,1)` guarantees one.
    pub fn lambda_for_epsilon(self, eps: &UnitRational) -> Result<UnitRational> {
        if eps.is_zero() {
            return Err(Error::Precondition("ε must be positive".into()));
        }
        let bound = eps.complement();
        let lambda = match self {
            TNorm::Minimum => eps.midpoint(&UnitRational::zero()),
            _ => {
                let mut lambda = UnitRational::ratio(1, 2);
                loop {
                    let c = lambda.complement();
                    if self.apply(&c, &c) > bound {
                        break lambda;
                    }
                    lambda = lambda.midpoint(&UnitRational::zero());
                }
            }
        };
        let c = lambda.complement();
        debug_assert!(self.apply(&c, &c) > bound);
        Ok(lambda)
    }
}

impl fmt::Display for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minimum" => Ok(TNorm::Minimum),
            "product" => Ok(TNorm::Product),
            "lukasiewicz" => Ok(TNorm::Lukasiewicz),
            other => Err(Error::Malformed(format!("unknown t-norm `{other}`"))),
        }
    }
}

/// Checks unit, commutativity, associativity and monotonicity of `op` over all
/// tuples drawn from `grid`.
pub fn verify_tnorm_laws<F>(op: F, grid: &[UnitRational]) -> Result<AxiomReport>
where
    F: Fn(&UnitRational, &UnitRational) -> UnitRational,
{
    if grid.is_empty() || !grid.iter().any(UnitRational::is_zero) || !grid.iter().any(UnitRational::is_one) {
        return Err(Error::Precondition("grid must be nonempty and contain 0 and 1".into()));
    }
    let w2 = |a: &UnitRational, b: &UnitRational, lhs: UnitRational, rhs: UnitRational| {
        Witness::default().with("a", a).with("b", b).with("lhs", lhs).with("rhs", rhs)
    };
    let one = UnitRational::one();

    let unit = grid.iter().find_map(|a| {
        let v = op(&one, a);
        (&v != a).then(|| w2(&one, a, v, a.clone()))
    });

    let mut comm = None;
    let mut mono = None;
    'pairs: for a in grid {
        for b in grid {
            let ab = op(a, b);
            if comm.is_none() {
                let ba = op(b, a);
                if ab != ba {
                    comm = Some(w2(a, b, ab.clone(), ba));
                }
            }
            if mono.is_none() {
                for a2 in grid.iter().filter(|x| *x >= a) {
                    for b2 in grid.iter().filter(|x| *x >= b) {
                        let v = op(a2, b2);
                        if ab > v {
                            mono = Some(w2(a, b, ab.clone(), v).with("a2", a2).with("b2", b2));
                            break;
                        }
                    }
                    if mono.is_some() {
                        break;
                    }
                }
            }
            if comm.is_some() && mono.is_some() {
                break 'pairs;
            }
        }
    }

    let mut assoc = None;
    'triples: for a in grid {
        for b in grid {
            let ab = op(a, b);
            for c in grid {
                let left = op(&ab, c);
                let right = op(a, &op(b, c));
                if left != right {
                    assoc = Some(
                        Witness::default()
                            .with("a", a)
                            .with("b", b)
                            .with("c", c)
                            .with("lhs", left)
                            .with("rhs", right),
                    );
                    break 'triples;
                }
            }
        }
    }

    let mut report = AxiomReport::new();
    report.push(Axiom::TUnit, Verdict::from_witness(unit));
    report.push(Axiom::TCommutative, Verdict::from_witness(comm));
    report.push(Axiom::TAssociative, Verdict::from_witness(assoc));
    report.push(Axiom::TMonotone, Verdict::from_witness(mono));
    Ok(report)
}

/// The three equivalent conditions of the t-norm lemma, evaluated for given
/// `(a, b, d)`; conditions 2 and 3 quantify over `grid` instead of `]0,1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaStar {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
}

/// A grid of λ values prepared for repeated [`check_lemma_star`] queries.
#[derive(Clone, Debug)]
pub struct LambdaGrid {
    /// `{1 − λ : λ ∈ grid}`.
    complements: BTreeSet<UnitRational>,
}

impl LambdaGrid {
    pub fn new(grid: &[UnitRational]) -> Result<Self> {
        if grid.iter().any(UnitRational::is_zero) {
            return Err(Error::Precondition("grid must lie in ]0,1]".into()));
        }
        Ok(LambdaGrid {
            complements: grid.iter().map(UnitRational::complement).collect(),
        })
    }

    /// Grid of all `k/denom`, `1 ≤ k ≤ denom`.
    pub fn dyadic(denom: u64) -> Self {
        LambdaGrid::new(&UnitRational::dyadic_grid(denom, false)).expect("positive grid")
    }

    /// Largest `1 − λ` strictly below `bound`.
    fn largest_below(&self, bound: &UnitRational) -> Option<&UnitRational> {
        self.complements.range(..bound.clone()).next_back()
    }

    /// Whether some `1 − ρ` lies strictly between `lo` and `hi`.
    fn any_between(&self, lo: &UnitRational, hi: &UnitRational) -> bool {
        lo < hi
            && self
                .complements
                .range((Bound::Excluded(lo.clone()), Bound::Excluded(hi.clone())))
                .next()
                .is_some()
    }
}

/// Evaluates the three conditions for `a, b, d ∈ ]0,1]`:
///
/// 1. `d ≥ a * b`
/// 2. for all grid `λ, λ'` with `a > 1−λ`, `b > 1−λ'`: `d ≥ (1−λ') * (1−λ)`
/// 3. for all grid `ρ` with `a * b > 1−ρ`: `d ≥ 1−ρ`
///
/// Condition 2 is monotone in both `1−λ` and `1−λ'`, so only the largest
/// admissible grid complements need testing; condition 3 fails exactly when a
/// grid complement falls strictly between `d` and `a * b`.
pub fn check_lemma_star(
    t: TNorm,
    a: &UnitRational,
    b: &UnitRational,
    d: &UnitRational,
    grid: &LambdaGrid,
) -> Result<LemmaStar> {
    if a.is_zero() || b.is_zero() || d.is_zero() {
        return Err(Error::Precondition("a, b and d must lie in ]0,1]".into()));
    }
    let ab = t.apply(a, b);
    let c1 = d >= &ab;
    let c2 = match (grid.largest_below(a), grid.largest_below(b)) {
        (Some(u), Some(v)) => d >= &t.apply(v, u),
        _ => true,
    };
    let c3 = !grid.any_between(d, &ab);
    Ok(LemmaStar { c1, c2, c3 })
}
