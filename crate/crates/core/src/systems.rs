//! Finite bases of local and uniform systems.
//!
//! A uniform basis is a finite set of [`FiniteDistanceTable`]s on one carrier;
//! a local basis assigns to every point a finite set of [`FiniteLocalTable`]s
//! anchored there. Saturations are never materialized; only membership is
//! decided.
//!
//! For finite data the `∀ε > 0` quantifiers collapse to non-strict comparisons,
//! and the `∀ω` (or `∀N`) truncation quantifiers collapse to the finite values
//! of the candidate plus one unbounded cap, represented here by ∞: truncating
//! at ∞ leaves a table unchanged, and a finite table can only dominate an
//! infinite entry at every large cap if it is itself infinite there.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::carrier::Carrier;
use crate::error::{Error, Result};
use crate::exactnum::{ExtNonneg, UnitRational};
use crate::levels::LevelFamily;
use crate::morphisms::SpaceMap;
use crate::report::{Axiom, AxiomReport, Verdict, Witness};

/// A distance `d : X × X → [0,∞]` with `d(x,x) = 0`; not necessarily symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDistanceTable {
    carrier: Carrier,
    values: Vec<ExtNonneg>,
}

impl FiniteDistanceTable {
    /// `f` is only consulted off the diagonal.
    pub fn from_fn(carrier: Carrier, mut f: impl FnMut(usize, usize) -> ExtNonneg) -> Self {
        let n = carrier.len();
        let values = (0..n * n)
            .map(|k| if k / n == k % n { ExtNonneg::zero() } else { f(k / n, k % n) })
            .collect();
        FiniteDistanceTable { carrier, values }
    }

    pub fn zero(carrier: Carrier) -> Self {
        Self::from_fn(carrier, |_, _| ExtNonneg::zero())
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn get(&self, x: usize, y: usize) -> &ExtNonneg {
        &self.values[x * self.carrier.len() + y]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.carrier.clone(), |x, y| self.get(y, x).clone())
    }

    pub fn max(&self, other: &Self) -> Self {
        Self::from_fn(self.carrier.clone(), |x, y| self.get(x, y).max(other.get(x, y)).clone())
    }

    /// `d ∘ (f × f)`, a table on the domain of `f`.
    pub fn pull_back(&self, f: &SpaceMap) -> Result<Self> {
        if f.codomain() != &self.carrier {
            return Err(Error::CarrierMismatch("table is not on the codomain of the map".into()));
        }
        Ok(Self::from_fn(f.domain().clone(), |x, y| self.get(f.apply(x), f.apply(y)).clone()))
    }

    pub fn to_document(&self) -> TableDocument {
        let n = self.carrier.len();
        let table = (0..n)
            .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
            .map(|(x, y)| (self.carrier.ordered_key(x, y), self.get(x, y).clone()))
            .collect();
        TableDocument {
            anchor: None,
            carrier: self.carrier.clone(),
            table,
        }
    }

    pub fn from_document(doc: TableDocument) -> Result<Self> {
        if doc.anchor.is_some() {
            return Err(Error::Malformed("a distance table has no anchor".into()));
        }
        let n = doc.carrier.len();
        let mut values: Vec<Option<ExtNonneg>> = vec![None; n * n];
        for (key, value) in doc.table {
            let (x, y) = doc.carrier.parse_ordered_key(&key)?;
            if x == y && !value.is_zero() {
                return Err(Error::OutOfRange(format!("table: diagonal entry \"{key}\" must be 0")));
            }
            values[x * n + y] = Some(value);
        }
        let carrier = doc.carrier;
        let values = (0..n * n)
            .map(|k| match values[k].take() {
                Some(v) => Ok(v),
                None if k / n == k % n => Ok(ExtNonneg::zero()),
                None => Err(Error::Malformed(format!(
                    "table: missing pair \"{}\"",
                    carrier.ordered_key(k / n, k % n)
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteDistanceTable { carrier, values })
    }
}

/// A local distance `φ : X → [0,∞]` anchored at `x` with `φ(x) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLocalTable {
    carrier: Carrier,
    anchor: usize,
    values: Vec<ExtNonneg>,
}

impl FiniteLocalTable {
    /// `f` is not consulted at the anchor.
    pub fn from_fn(carrier: Carrier, anchor: usize, mut f: impl FnMut(usize) -> ExtNonneg) -> Self {
        assert!(anchor < carrier.len(), "anchor outside the carrier");
        let values = (0..carrier.len())
            .map(|y| if y == anchor { ExtNonneg::zero() } else { f(y) })
            .collect();
        FiniteLocalTable { carrier, anchor, values }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn get(&self, y: usize) -> &ExtNonneg {
        &self.values[y]
    }

    /// `φ' ∘ f` anchored at `x`, for `φ'` anchored at `f(x)`.
    pub fn pull_back(&self, f: &SpaceMap, x: usize) -> Result<Self> {
        if f.codomain() != &self.carrier {
            return Err(Error::CarrierMismatch("table is not on the codomain of the map".into()));
        }
        if f.apply(x) != self.anchor {
            return Err(Error::Precondition("table is not anchored at the image point".into()));
        }
        Ok(Self::from_fn(f.domain().clone(), x, |y| self.get(f.apply(y)).clone()))
    }

    pub fn to_document(&self) -> TableDocument {
        let a = self.anchor;
        let table = (0..self.carrier.len())
            .filter(|&y| y != a)
            .map(|y| (self.carrier.ordered_key(a, y), self.get(y).clone()))
            .collect();
        TableDocument {
            anchor: Some(self.carrier.label(a).to_owned()),
            carrier: self.carrier.clone(),
            table,
        }
    }

    /// Keys are ordered pairs `anchor|>y`.
    pub fn from_document(doc: TableDocument) -> Result<Self> {
        let label = doc
            .anchor
            .as_deref()
            .ok_or_else(|| Error::Malformed("a local table needs an anchor".into()))?;
        let anchor = doc.carrier.index_of(label)?;
        let n = doc.carrier.len();
        let mut values: Vec<Option<ExtNonneg>> = vec![None; n];
        for (key, value) in doc.table {
            let (x, y) = doc.carrier.parse_ordered_key(&key)?;
            if x != anchor {
                return Err(Error::Malformed(format!("table: key \"{key}\" does not start at the anchor")));
            }
            if y == anchor && !value.is_zero() {
                return Err(Error::OutOfRange(format!("table: anchor entry \"{key}\" must be 0")));
            }
            values[y] = Some(value);
        }
        let carrier = doc.carrier;
        let values = (0..n)
            .map(|y| match values[y].take() {
                Some(v) => Ok(v),
                None if y == anchor => Ok(ExtNonneg::zero()),
                None => Err(Error::Malformed(format!(
                    "table: missing pair \"{}\"",
                    carrier.ordered_key(anchor, y)
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteLocalTable { carrier, anchor, values })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
    pub carrier: Carrier,
    pub table: BTreeMap<String, ExtNonneg>,
}

/// Input of a membership query: `candidate ∈ ⟨basis⟩`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationQuery {
    pub basis: Vec<TableDocument>,
    pub candidate: TableDocument,
}

/// Caps at which truncated membership must be checked: the finite values of
/// the candidate in increasing order, then the unbounded cap ∞.
fn caps(values: &[ExtNonneg]) -> Vec<ExtNonneg> {
    let mut caps: Vec<ExtNonneg> = values.iter().filter(|v| v.is_finite()).cloned().collect();
    caps.push(ExtNonneg::INFINITY);
    caps.sort();
    caps.dedup();
    caps
}

fn dominates(b: &[ExtNonneg], candidate: &[ExtNonneg], cap: &ExtNonneg) -> bool {
    candidate.iter().zip(b).all(|(c, b)| c.min(cap) <= b)
}

/// The first cap at which no basis row dominates the truncated candidate.
fn uncovered_cap(basis: &[&[ExtNonneg]], candidate: &[ExtNonneg]) -> Option<ExtNonneg> {
    caps(candidate)
        .into_iter()
        .find(|cap| !basis.iter().any(|b| dominates(b, candidate, cap)))
}

/// `candidate ∈ ⟨basis⟩` for value vectors over a common index set.
fn member(basis: &[&[ExtNonneg]], candidate: &[ExtNonneg]) -> bool {
    uncovered_cap(basis, candidate).is_none()
}

/// Decides `candidate ∈ ⟨basis⟩`.
pub fn saturation_member(basis: &[FiniteDistanceTable], candidate: &FiniteDistanceTable) -> Result<bool> {
    if basis.iter().any(|b| b.carrier != candidate.carrier) {
        return Err(Error::CarrierMismatch("basis and candidate live on different carriers".into()));
    }
    let rows: Vec<&[ExtNonneg]> = basis.iter().map(|b| b.values.as_slice()).collect();
    Ok(member(&rows, &candidate.values))
}

/// Decides `candidate ∈ ⟨basis⟩` for local tables at one point.
pub fn local_saturation_member(basis: &[FiniteLocalTable], candidate: &FiniteLocalTable) -> Result<bool> {
    if basis
        .iter()
        .any(|b| b.carrier != candidate.carrier || b.anchor != candidate.anchor)
    {
        return Err(Error::CarrierMismatch("basis and candidate differ in carrier or anchor".into()));
    }
    let rows: Vec<&[ExtNonneg]> = basis.iter().map(|b| b.values.as_slice()).collect();
    Ok(member(&rows, &candidate.values))
}

/// Runs a [`SaturationQuery`]: local if the candidate carries an anchor.
pub fn run_saturation_query(query: SaturationQuery) -> Result<bool> {
    if query.candidate.anchor.is_some() {
        let candidate = FiniteLocalTable::from_document(query.candidate)?;
        let basis = query
            .basis
            .into_iter()
            .map(FiniteLocalTable::from_document)
            .collect::<Result<Vec<_>>>()?;
        local_saturation_member(&basis, &candidate)
    } else {
        let candidate = FiniteDistanceTable::from_document(query.candidate)?;
        let basis = query
            .basis
            .into_iter()
            .map(FiniteDistanceTable::from_document)
            .collect::<Result<Vec<_>>>()?;
        saturation_member(&basis, &candidate)
    }
}

/// Directedness is decided up to saturation: every pointwise maximum of two
/// members must belong to the saturation of the basis.
pub const DIRECTEDNESS_NOTE: &str = "directedness decided up to saturation: max(d, e) ∈ ⟨basis⟩ for all members d, e";

/// Checks (AU1), directedness, (AU3) and (AU4) for a finite uniform basis.
pub fn check_uniform_basis(basis: &[FiniteDistanceTable]) -> Result<AxiomReport> {
    let mut report = AxiomReport::new();
    report.push(Axiom::AU1, Verdict::ByConstruction);
    let Some(first) = basis.first() else {
        report.push_noted(Axiom::Directed, Verdict::Pass, DIRECTEDNESS_NOTE);
        report.push(Axiom::AU3, Verdict::Pass);
        report.push(Axiom::AU4, Verdict::Pass);
        return Ok(report);
    };
    if basis.iter().any(|b| b.carrier != first.carrier) {
        return Err(Error::CarrierMismatch("basis tables live on different carriers".into()));
    }
    let carrier = &first.carrier;
    let n = carrier.len();
    let idx = |i: usize| ExtNonneg::from_integer(i as u64);

    let mut directed = None;
    'dir: for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            if !saturation_member(basis, &basis[i].max(&basis[j]))? {
                directed = Some(Witness::new(Vec::<String>::new()).with("d", idx(i)).with("e", idx(j)));
                break 'dir;
            }
        }
    }
    report.push_noted(Axiom::Directed, Verdict::from_witness(directed), DIRECTEDNESS_NOTE);

    // (AU3): for every d and cap N some e satisfies d(x,z) ∧ N ≤ e(x,y) + e(y,z).
    let au3_holds = |d: &FiniteDistanceTable, cap: &ExtNonneg, e: &FiniteDistanceTable| {
        (0..n).all(|x| {
            (0..n).all(|z| {
                let lhs = d.get(x, z).min(cap);
                lhs.is_zero() || (0..n).all(|y| lhs <= &(e.get(x, y) + e.get(y, z)))
            })
        })
    };
    let mut au3 = None;
    'au3: for (i, d) in basis.iter().enumerate() {
        for cap in caps(&d.values) {
            if !basis.iter().any(|e| au3_holds(d, &cap, e)) {
                au3 = Some(Witness::new(Vec::<String>::new()).with("d", idx(i)).with("cap", cap));
                break 'au3;
            }
        }
    }
    report.push(Axiom::AU3, Verdict::from_witness(au3));

    let mut au4 = None;
    for (i, d) in basis.iter().enumerate() {
        let t = d.transpose();
        if !saturation_member(basis, &t)? {
            // d itself fails to dominate its transpose somewhere
            let (x, y) = (0..n * n)
                .map(|k| (k / n, k % n))
                .find(|&(x, y)| d.get(y, x) > d.get(x, y))
                .expect("a symmetric table dominates its transpose");
            au4 = Some(
                Witness::new([carrier.label(x), carrier.label(y)])
                    .with("d", idx(i))
                    .with("d(x,y)", d.get(x, y).clone())
                    .with("d(y,x)", d.get(y, x).clone()),
            );
            break;
        }
    }
    report.push(Axiom::AU4, Verdict::from_witness(au4));
    Ok(report)
}

/// Default bound on the number of candidate selections tried by the (A3) search.
pub const DEFAULT_CUTOFF: u64 = 1_000_000;

/// Checks (A1) and (A3) for a finite local basis `bases[x]`.
///
/// In (A3) the selected `φ_x` appears on both sides (take `y = x`), so the
/// search first fixes `φ_x ∈ B(x)` with `φ ∧ ω ≤ φ_x`; the remaining choices
/// `φ_y`, `y ≠ x`, are then independent of each other. Every candidate table
/// tried counts against `cutoff`; running out yields an undecided verdict.
pub fn check_local_basis(bases: &[Vec<FiniteLocalTable>], cutoff: u64) -> Result<AxiomReport> {
    let mut report = AxiomReport::new();
    report.push(Axiom::A1, Verdict::ByConstruction);
    let n = bases.len();
    for (x, basis) in bases.iter().enumerate() {
        for table in basis {
            if table.carrier.len() != n || table.anchor != x {
                return Err(Error::Precondition(format!("local table at position {x} is misanchored")));
            }
        }
    }
    if let Some(empty) = bases.iter().position(Vec::is_empty) {
        return Err(Error::Precondition(format!("point {empty} has an empty local basis")));
    }
    let carrier = match bases.first() {
        Some(b) => b[0].carrier.clone(),
        None => {
            report.push(Axiom::A3, Verdict::Pass);
            return Ok(report);
        }
    };
    if bases.iter().flatten().any(|t| t.carrier != carrier) {
        return Err(Error::CarrierMismatch("local tables live on different carriers".into()));
    }

    let mut budget = cutoff;
    let mut spend = || -> bool {
        if budget == 0 {
            return false;
        }
        budget -= 1;
        true
    };
    for x in 0..n {
        for (i, phi) in bases[x].iter().enumerate() {
            for cap in caps(&phi.values) {
                let truncated: Vec<ExtNonneg> = phi.values.iter().map(|v| v.min(&cap).clone()).collect();
                let mut found = false;
                for phi_x in &bases[x] {
                    if !spend() {
                        report.push(Axiom::A3, Verdict::Undecided { cutoff });
                        return Ok(report);
                    }
                    if !truncated.iter().zip(&phi_x.values).all(|(t, v)| t <= v) {
                        continue;
                    }
                    let mut all = true;
                    for y in (0..n).filter(|&y| y != x) {
                        let base = phi_x.get(y);
                        let mut some = false;
                        for phi_y in &bases[y] {
                            if !spend() {
                                report.push(Axiom::A3, Verdict::Undecided { cutoff });
                                return Ok(report);
                            }
                            if truncated.iter().zip(&phi_y.values).all(|(t, v)| t <= &(base + v)) {
                                some = true;
                                break;
                            }
                        }
                        if !some {
                            all = false;
                            break;
                        }
                    }
                    if all {
                        found = true;
                        break;
                    }
                }
                if !found {
                    let w = Witness::new([carrier.label(x)])
                        .with("phi", ExtNonneg::from_integer(i as u64))
                        .with("cap", cap);
                    report.push(Axiom::A3, Verdict::Fail { witness: w });
                    return Ok(report);
                }
            }
        }
    }
    report.push(Axiom::A3, Verdict::Pass);
    Ok(report)
}

/// First `x` and codomain member `φ'` at `f(x)` with `φ' ∘ f ∉ ⟨A(x)⟩`. The
/// witness records the member's index and the cap at which no member of
/// `A(x)` dominates the pulled-back table.
pub fn contraction_violation(
    f: &SpaceMap,
    domain_bases: &[Vec<FiniteLocalTable>],
    codomain_bases: &[Vec<FiniteLocalTable>],
) -> Result<Option<Witness>> {
    if domain_bases.len() != f.domain().len() || codomain_bases.len() != f.codomain().len() {
        return Err(Error::CarrierMismatch("bases do not match the map's carriers".into()));
    }
    for (x, basis) in domain_bases.iter().enumerate() {
        for (k, phi) in codomain_bases[f.apply(x)].iter().enumerate() {
            let pulled = phi.pull_back(f, x)?;
            if basis.iter().any(|b| b.carrier != pulled.carrier || b.anchor != x) {
                return Err(Error::CarrierMismatch("domain basis is misanchored".into()));
            }
            let rows: Vec<&[ExtNonneg]> = basis.iter().map(|b| b.values.as_slice()).collect();
            if let Some(cap) = uncovered_cap(&rows, &pulled.values) {
                let w = Witness::new([f.domain().label(x)])
                    .with("member", ExtNonneg::from_integer(k as u64))
                    .with("cap", cap);
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// `f` is a contraction: `φ' ∘ f ∈ ⟨A(x)⟩` for every `x` and every `φ'` in the
/// codomain basis at `f(x)`.
pub fn is_contraction(
    f: &SpaceMap,
    domain_bases: &[Vec<FiniteLocalTable>],
    codomain_bases: &[Vec<FiniteLocalTable>],
) -> Result<bool> {
    Ok(contraction_violation(f, domain_bases, codomain_bases)?.is_none())
}

/// First codomain member `d'` with `d' ∘ (f × f) ∉ ⟨domain_basis⟩`, with its
/// index and the uncovered cap.
pub fn uniform_contraction_violation(
    f: &SpaceMap,
    domain_basis: &[FiniteDistanceTable],
    codomain_basis: &[FiniteDistanceTable],
) -> Result<Option<Witness>> {
    if domain_basis.iter().any(|b| b.carrier() != f.domain()) {
        return Err(Error::CarrierMismatch("domain basis is not on the map's domain".into()));
    }
    let rows: Vec<&[ExtNonneg]> = domain_basis.iter().map(|b| b.values.as_slice()).collect();
    for (k, d) in codomain_basis.iter().enumerate() {
        let pulled = d.pull_back(f)?;
        if let Some(cap) = uncovered_cap(&rows, &pulled.values) {
            let w = Witness::new(Vec::<String>::new())
                .with("member", ExtNonneg::from_integer(k as u64))
                .with("cap", cap);
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// `f` is a uniform contraction: `d' ∘ (f × f) ∈ ⟨domain_basis⟩` for every
/// `d'` in the codomain basis.
pub fn is_uniform_contraction(
    f: &SpaceMap,
    domain_basis: &[FiniteDistanceTable],
    codomain_basis: &[FiniteDistanceTable],
) -> Result<bool> {
    Ok(uniform_contraction_violation(f, domain_basis, codomain_basis)?.is_none())
}

/// The λ-levels of a family used as basis indices: every profile breakpoint and 1.
pub fn basis_levels(family: &LevelFamily) -> Vec<UnitRational> {
    family.breakpoints()
}

/// `{ d_λ : λ ∈ basis_levels(F) }` as distance tables.
pub fn uniform_basis_of(family: &LevelFamily) -> Vec<FiniteDistanceTable> {
    basis_levels(family)
        .iter()
        .map(|l| FiniteDistanceTable::from_fn(family.carrier().clone(), |x, y| family.eval(l, x, y).clone()))
        .collect()
}

/// `B(x) = { φ_{λ,x} : λ ∈ basis_levels(F) }` for every point `x`.
pub fn local_bases_of(family: &LevelFamily) -> Vec<Vec<FiniteLocalTable>> {
    let levels = basis_levels(family);
    (0..family.len())
        .map(|x| {
            levels
                .iter()
                .map(|l| FiniteLocalTable::from_fn(family.carrier().clone(), x, |y| family.eval(l, x, y).clone()))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levels::fixtures::f2;
    use proptest::prelude::*;

    fn e(s: &str) -> ExtNonneg {
        s.parse().unwrap()
    }

    fn carrier(n: usize) -> Carrier {
        Carrier::numbered(n)
    }

    fn table(n: usize, vals: &[&str]) -> FiniteDistanceTable {
        let mut it = vals.iter();
        FiniteDistanceTable::from_fn(carrier(n), |_, _| e(it.next().unwrap()))
    }

    /// The literal membership formula: for every cap ω among the candidate's
    /// finite values, plus one cap beyond every finite value in sight,
    /// `min_b max_pairs ((c ∧ ω) − b) ≤ 0`, where an infinite entry of `b` absorbs
    /// anything.
    fn member_by_defect(basis: &[FiniteDistanceTable], c: &FiniteDistanceTable) -> bool {
        use num_rational::BigRational;
        use num_traits::Zero;
        let all: Vec<&ExtNonneg> = basis.iter().flat_map(|b| b.values.iter()).chain(&c.values).collect();
        let beyond = all
            .iter()
            .filter_map(|v| v.as_rational())
            .max()
            .cloned()
            .unwrap_or_default()
            + BigRational::from_integer(1.into());
        let mut omegas: Vec<BigRational> = c.values.iter().filter_map(|v| v.as_rational()).cloned().collect();
        omegas.push(beyond);
        omegas.iter().all(|w| {
            basis.iter().any(|b| {
                let defect = c
                    .values
                    .iter()
                    .zip(&b.values)
                    .map(|(cv, bv)| {
                        let cw = cv.as_rational().map_or(w.clone(), |r| r.min(w).clone());
                        match bv.as_rational() {
                            Some(bq) => cw - bq,
                            None => BigRational::zero() - w,
                        }
                    })
                    .max()
                    .unwrap_or_default();
                defect <= BigRational::zero()
            })
        })
    }

    #[test]
    fn saturation_examples() {
        let d = table(3, &["1", "2", "1", "3", "2", "3"]);
        assert!(saturation_member(std::slice::from_ref(&d), &d).unwrap());
        let plus_one = FiniteDistanceTable::from_fn(carrier(3), |x, y| d.get(x, y) + &e("1"));
        assert!(!saturation_member(std::slice::from_ref(&d), &plus_one).unwrap());
        assert!(!member_by_defect(std::slice::from_ref(&d), &plus_one));
        let capped = FiniteDistanceTable::from_fn(carrier(3), |x, y| d.get(x, y).min(&e("5")).clone());
        assert!(saturation_member(std::slice::from_ref(&d), &capped).unwrap());
        let elsewhere = FiniteDistanceTable::zero(carrier(2));
        assert!(saturation_member(&[d], &elsewhere).is_err());
    }

    #[test]
    fn infinite_entries_need_infinite_basis_entries() {
        let inf = table(2, &["inf", "inf"]);
        let big = table(2, &["1000", "1000"]);
        assert!(!saturation_member(&[big.clone()], &inf).unwrap());
        assert!(saturation_member(&[inf.clone()], &big).unwrap());
        assert!(saturation_member(&[big, inf.clone()], &inf).unwrap());
    }

    #[test]
    fn f2_uniform_basis_passes() {
        let basis = uniform_basis_of(&f2());
        assert_eq!(basis.len(), 2);
        let report = check_uniform_basis(&basis).unwrap();
        assert!(report.passed(), "{}", report.summary());
        assert!(check_uniform_basis(&[FiniteDistanceTable::zero(carrier(3))]).unwrap().passed());
        assert!(check_uniform_basis(&[]).unwrap().passed());
    }

    #[test]
    fn asymmetric_table_fails_au4() {
        let report = check_uniform_basis(&[table(2, &["1", "2"])]).unwrap();
        assert_eq!(report.failed_axioms(), vec![Axiom::AU4]);
        assert_eq!(report.witness(Axiom::AU4).unwrap().points, ["p0", "p1"]);
    }

    #[test]
    fn au3_failure() {
        // d(0,2) = 10 while every two-step path costs 2.
        let d = table(3, &["1", "10", "1", "1", "10", "1"]);
        let report = check_uniform_basis(&[d]).unwrap();
        assert_eq!(report.failed_axioms(), vec![Axiom::AU3]);
    }

    #[test]
    fn f2_local_basis_passes() {
        let report = check_local_basis(&local_bases_of(&f2()), DEFAULT_CUTOFF).unwrap();
        assert!(report.passed(), "{}", report.summary());
        let one = vec![vec![FiniteLocalTable::from_fn(carrier(1), 0, |_| e("0"))]];
        assert!(check_local_basis(&one, DEFAULT_CUTOFF).unwrap().passed());
    }

    #[test]
    fn a3_fails_on_unreachable_infinity() {
        let c = carrier(3);
        let bases = vec![
            vec![FiniteLocalTable::from_fn(c.clone(), 0, |y| if y == 2 { e("inf") } else { e("1") })],
            vec![FiniteLocalTable::from_fn(c.clone(), 1, |_| e("1"))],
            vec![FiniteLocalTable::from_fn(c.clone(), 2, |_| e("1"))],
        ];
        let report = check_local_basis(&bases, DEFAULT_CUTOFF).unwrap();
        let w = report.witness(Axiom::A3).expect("A3 must fail");
        assert_eq!(w.get("cap"), Some(&ExtNonneg::INFINITY));
        let tight = check_local_basis(&bases, 1).unwrap();
        assert!(matches!(tight.get(Axiom::A3), Some(Verdict::Undecided { cutoff: 1 })));
    }

    #[test]
    fn contractions() {
        let family = f2();
        let id = SpaceMap::identity(family.carrier().clone());
        let local = local_bases_of(&family);
        let uniform = uniform_basis_of(&family);
        assert!(is_contraction(&id, &local, &local).unwrap());
        assert!(is_uniform_contraction(&id, &uniform, &uniform).unwrap());

        let point = Carrier::new(["p"]).unwrap();
        let to_point = SpaceMap::new(family.carrier().clone(), point.clone(), vec![0, 0]).unwrap();
        let point_local = vec![vec![FiniteLocalTable::from_fn(point.clone(), 0, |_| e("0"))]];
        assert!(is_contraction(&to_point, &local, &point_local).unwrap());
        assert!(is_uniform_contraction(&to_point, &uniform, &[FiniteDistanceTable::zero(point)]).unwrap());

        let larger: Vec<FiniteDistanceTable> = vec![FiniteDistanceTable::from_fn(family.carrier().clone(), |_, _| e("6"))];
        assert!(!is_uniform_contraction(&id, &uniform, &larger).unwrap());
        let finer: Vec<Vec<FiniteLocalTable>> = (0..2)
            .map(|x| vec![FiniteLocalTable::from_fn(family.carrier().clone(), x, |_| e("6"))])
            .collect();
        assert!(!is_contraction(&id, &local, &finer).unwrap());
        assert!(is_contraction(&id, &finer, &local).unwrap());
    }

    #[test]
    fn table_documents() {
        let d = table(2, &["1", "inf"]);
        let json = serde_json::to_string(&d.to_document()).unwrap();
        assert_eq!(json, r#"{"carrier":["p0","p1"],"table":{"p0|>p1":"1","p1|>p0":"inf"}}"#);
        let back = FiniteDistanceTable::from_document(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, d);
        let missing: TableDocument = serde_json::from_str(r#"{"carrier":["p0","p1"],"table":{"p0|>p1":"1"}}"#).unwrap();
        assert!(FiniteDistanceTable::from_document(missing).is_err());
        let diag: TableDocument =
            serde_json::from_str(r#"{"carrier":["p0","p1"],"table":{"p0|>p0":"1","p0|>p1":"1","p1|>p0":"1"}}"#).unwrap();
        assert!(FiniteDistanceTable::from_document(diag).is_err());

        let phi = FiniteLocalTable::from_fn(carrier(2), 1, |_| e("3"));
        let json = serde_json::to_string(&phi.to_document()).unwrap();
        assert_eq!(json, r#"{"anchor":"p1","carrier":["p0","p1"],"table":{"p1|>p0":"3"}}"#);
        let back = FiniteLocalTable::from_document(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, phi);
        let query: SaturationQuery = serde_json::from_str(&format!(r#"{{"basis":[{json}],"candidate":{json}}}"#)).unwrap();
        assert!(run_saturation_query(query).unwrap());
    }

    fn value() -> impl Strategy<Value = ExtNonneg> {
        prop_oneof![4 => (0u64..6).prop_map(ExtNonneg::from_integer), 1 => Just(ExtNonneg::INFINITY)]
    }

    fn table_strategy(n: usize) -> impl Strategy<Value = FiniteDistanceTable> {
        proptest::collection::vec(value(), n * n).prop_map(move |vals| {
            let mut it = vals.into_iter();
            FiniteDistanceTable::from_fn(carrier(n), |_, _| it.next().unwrap())
        })
    }

    proptest! {
        #[test]
        fn membership_matches_defect_formula(
            basis in proptest::collection::vec(table_strategy(3), 1..4),
            c in table_strategy(3),
        ) {
            prop_assert_eq!(saturation_member(&basis, &c).unwrap(), member_by_defect(&basis, &c));
        }

        #[test]
        fn membership_is_monotone(
            basis in proptest::collection::vec(table_strategy(3), 1..4),
            c in table_strategy(3),
            lower in table_strategy(3),
        ) {
            let below = FiniteDistanceTable::from_fn(carrier(3), |x, y| lower.get(x, y).min(c.get(x, y)).clone());
            if saturation_member(&basis, &c).unwrap() {
                prop_assert!(saturation_member(&basis, &below).unwrap());
            }
        }

        #[test]
        fn membership_is_transitive(
            basis in proptest::collection::vec(table_strategy(3), 1..4),
            other in proptest::collection::vec(table_strategy(3), 1..4),
            c in table_strategy(3),
        ) {
            let covered = basis.iter().all(|b| saturation_member(&other, b).unwrap());
            if covered && saturation_member(&basis, &c).unwrap() {
                prop_assert!(saturation_member(&other, &c).unwrap());
            }
        }

        #[test]
        fn identity_is_a_uniform_contraction(basis in proptest::collection::vec(table_strategy(3), 1..4)) {
            let id = SpaceMap::identity(carrier(3));
            prop_assert!(is_uniform_contraction(&id, &basis, &basis).unwrap());
        }
    }
}
