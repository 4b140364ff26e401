//! Verdict reports shared by every checker.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactnum::ExtNonneg;

/// Every named condition a checker can report on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    P1,
    P2,
    P3,
    P4,
    P5,
    US,
    UD,
    UT,
    UH,
    #[serde(rename = "UM/LM")]
    MixedTriangle,
    A1,
    A3,
    AU1,
    AU3,
    AU4,
    Directed,
    TUnit,
    TCommutative,
    TAssociative,
    TMonotone,
    NonExpansive,
    LevelwiseNonExpansive,
    Contraction,
    UniformContraction,
    Duality,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::MixedTriangle => f.write_str("UM/LM"),
            other => fmt::Debug::fmt(other, f),
        }
    }
}

/// A replayable counterexample: the points involved and every numeric
/// parameter (γ, λ, r, s, ...) needed to re-evaluate both sides.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub points: Vec<String>,
    pub values: BTreeMap<String, ExtNonneg>,
}

impl Witness {
    pub fn new<I, S>(points: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Witness {
            points: points.into_iter().map(Into::into).collect(),
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: impl Into<ExtNonneg>) -> Self {
        self.values.insert(name.to_owned(), value.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<&ExtNonneg> {
        self.values.get(name)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.points.join(","))?;
        for (k, v) in &self.values {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Holds because the representation cannot express a violation.
    ByConstruction,
    Fail { witness: Witness },
    Undecided { cutoff: u64 },
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Pass | Verdict::ByConstruction)
    }

    pub fn from_witness(witness: Option<Witness>) -> Verdict {
        match witness {
            Some(witness) => Verdict::Fail { witness },
            None => Verdict::Pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub verdicts: Vec<AxiomVerdict>,
}

impl AxiomReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, axiom: Axiom, verdict: Verdict) {
        self.verdicts.push(AxiomVerdict { axiom, verdict, note: None });
    }

    pub fn push_noted(&mut self, axiom: Axiom, verdict: Verdict, note: &str) {
        self.verdicts.push(AxiomVerdict {
            axiom,
            verdict,
            note: Some(note.to_owned()),
        });
    }

    pub fn extend(&mut self, other: AxiomReport) {
        self.verdicts.extend(other.verdicts);
    }

    /// True when every verdict holds (no failure, nothing undecided).
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict.holds())
    }

    pub fn get(&self, axiom: Axiom) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.axiom == axiom).map(|v| &v.verdict)
    }

    pub fn witness(&self, axiom: Axiom) -> Option<&Witness> {
        match self.get(axiom) {
            Some(Verdict::Fail { witness }) => Some(witness),
            _ => None,
        }
    }

    pub fn failed_axioms(&self) -> Vec<Axiom> {
        self.verdicts
            .iter()
            .filter(|v| v.verdict.is_fail())
            .map(|v| v.axiom)
            .collect()
    }

    pub fn summary(&self) -> String {
        let bad: Vec<String> = self
            .verdicts
            .iter()
            .filter(|v| !v.verdict.holds())
            .map(|v| match &v.verdict {
                Verdict::Fail { witness } => format!("{} fails at {witness}", v.axiom),
                Verdict::Undecided { cutoff } => format!("{} undecided (cutoff {cutoff})", v.axiom),
                _ => unreachable!(),
            })
            .collect();
        if bad.is_empty() {
            "all pass".to_owned()
        } else {
            bad.join("; ")
        }
    }
}
