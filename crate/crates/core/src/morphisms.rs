//! Maps between finite spaces and the morphism notions on each side.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::carrier::Carrier;
use crate::distributions::first_violation;
use crate::error::{Error, Result};
use crate::levels::{levels_of, LevelFamily};
use crate::probmet::FinitePMSpace;
use crate::report::{Axiom, AxiomReport, Verdict, Witness};
use crate::systems::{contraction_violation, local_bases_of, uniform_basis_of, uniform_contraction_violation};

/// A total map between two carriers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceMap {
    domain: Carrier,
    codomain: Carrier,
    assign: Vec<usize>,
}

impl SpaceMap {
    pub fn new(domain: Carrier, codomain: Carrier, assign: Vec<usize>) -> Result<Self> {
        if assign.len() != domain.len() {
            return Err(Error::Malformed("assignment must cover the whole domain".into()));
        }
        if assign.iter().any(|&y| y >= codomain.len()) {
            return Err(Error::UnknownPoint("assignment leaves the codomain".into()));
        }
        Ok(SpaceMap { domain, codomain, assign })
    }

    pub fn identity(carrier: Carrier) -> Self {
        let assign = (0..carrier.len()).collect();
        SpaceMap {
            domain: carrier.clone(),
            codomain: carrier,
            assign,
        }
    }

    pub fn domain(&self) -> &Carrier {
        &self.domain
    }

    pub fn codomain(&self) -> &Carrier {
        &self.codomain
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assign[x]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &SpaceMap) -> Result<SpaceMap> {
        if self.codomain != g.domain {
            return Err(Error::Precondition("maps are not composable".into()));
        }
        Ok(SpaceMap {
            domain: self.domain.clone(),
            codomain: g.codomain.clone(),
            assign: self.assign.iter().map(|&y| g.apply(y)).collect(),
        })
    }

    pub fn to_document(&self) -> MapDocument {
        MapDocument {
            assign: (0..self.domain.len())
                .map(|x| (self.domain.label(x).to_owned(), self.codomain.label(self.apply(x)).to_owned()))
                .collect(),
            codomain: CarrierRef::Inline(self.codomain.clone()),
            domain: CarrierRef::Inline(self.domain.clone()),
        }
    }
}

/// A carrier given inline or by the path of the document that defines it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CarrierRef {
    Inline(Carrier),
    Path(String),
}

impl CarrierRef {
    /// The carrier to use, given the one the referenced space actually has.
    fn resolve(self, actual: &Carrier, side: &str) -> Result<Carrier> {
        match self {
            CarrierRef::Path(_) => Ok(actual.clone()),
            CarrierRef::Inline(c) if &c == actual => Ok(c),
            CarrierRef::Inline(_) => Err(Error::CarrierMismatch(format!("{side} carrier differs from the space"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub assign: BTreeMap<String, String>,
    pub codomain: CarrierRef,
    pub domain: CarrierRef,
}

impl MapDocument {
    /// Builds the map between the given carriers. Path references are taken
    /// to name those carriers; inline carriers must equal them.
    pub fn resolve(self, domain: &Carrier, codomain: &Carrier) -> Result<SpaceMap> {
        let domain = self.domain.resolve(domain, "domain")?;
        let codomain = self.codomain.resolve(codomain, "codomain")?;
        for key in self.assign.keys() {
            domain
                .index_of(key)
                .map_err(|_| Error::CarrierMismatch(format!("assign: \"{key}\" is not in the domain")))?;
        }
        let assign = (0..domain.len())
            .map(|x| {
                let label = domain.label(x);
                let target = self
                    .assign
                    .get(label)
                    .ok_or_else(|| Error::CarrierMismatch(format!("assign: no image for \"{label}\"")))?;
                codomain
                    .index_of(target)
                    .map_err(|_| Error::CarrierMismatch(format!("assign: \"{target}\" is not in the codomain")))
            })
            .collect::<Result<Vec<_>>>()?;
        SpaceMap::new(domain, codomain, assign)
    }
}

impl TryFrom<MapDocument> for SpaceMap {
    type Error = Error;

    fn try_from(doc: MapDocument) -> Result<Self> {
        match (&doc.domain, &doc.codomain) {
            (CarrierRef::Inline(d), CarrierRef::Inline(c)) => {
                let (d, c) = (d.clone(), c.clone());
                doc.resolve(&d, &c)
            }
            _ => Err(Error::Precondition("map document refers to carriers by path".into())),
        }
    }
}

impl Serialize for SpaceMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_document().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpaceMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = MapDocument::deserialize(deserializer)?;
        SpaceMap::try_from(doc).map_err(serde::de::Error::custom)
    }
}

fn check_carriers(f: &SpaceMap, domain: &Carrier, codomain: &Carrier) -> Result<()> {
    if &f.domain != domain || &f.codomain != codomain {
        return Err(Error::CarrierMismatch("map carriers do not match the spaces".into()));
    }
    Ok(())
}

/// First pair and `t` with `α_X(x,x',t) > α_Y(f x, f x', t)`.
pub fn nonexpansive_violation(f: &SpaceMap, x: &FinitePMSpace, y: &FinitePMSpace) -> Result<Option<Witness>> {
    check_carriers(f, x.carrier(), y.carrier())?;
    for (a, b) in x.carrier().pairs() {
        let (fa, fb) = (f.apply(a), f.apply(b));
        if let Some(t) = first_violation(x.alpha(a, b), y.alpha(fa, fb)) {
            let w = Witness::new([x.carrier().label(a), x.carrier().label(b)])
                .with("t", t.clone())
                .with("domain", x.eval(a, b, &t))
                .with("codomain", y.eval(fa, fb, &t));
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// `α_X(x,x',·) ≤ α_Y(f x, f x', ·)` for all pairs.
pub fn is_nonexpansive(f: &SpaceMap, x: &FinitePMSpace, y: &FinitePMSpace) -> Result<bool> {
    Ok(nonexpansive_violation(f, x, y)?.is_none())
}

/// First pair and `λ` with `G_λ(f x, f x') > F_λ(x, x')`. Both profiles are
/// constant between consecutive breakpoints, so the breakpoints suffice.
pub fn levelwise_violation(f: &SpaceMap, from: &LevelFamily, to: &LevelFamily) -> Result<Option<Witness>> {
    check_carriers(f, from.carrier(), to.carrier())?;
    if from.tnorm() != to.tnorm() {
        return Err(Error::Precondition("families carry different t-norms".into()));
    }
    for (a, b) in from.carrier().pairs() {
        let (fa, fb) = (f.apply(a), f.apply(b));
        let src = from.profile(a, b);
        let dst = to.profile(fa, fb);
        let mut lambdas: Vec<_> = src.breakpoints().chain(dst.breakpoints()).collect();
        lambdas.sort();
        lambdas.dedup();
        for l in lambdas {
            if dst.eval(l) > src.eval(l) {
                let w = Witness::new([from.carrier().label(a), from.carrier().label(b)])
                    .with("lambda", l.clone())
                    .with("domain", src.eval(l).clone())
                    .with("codomain", dst.eval(l).clone());
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// `G_λ(f x, f x') ≤ F_λ(x, x')` for all pairs and all `λ`.
pub fn is_levelwise_nonexpansive(f: &SpaceMap, from: &LevelFamily, to: &LevelFamily) -> Result<bool> {
    Ok(levelwise_violation(f, from, to)?.is_none())
}

/// The four morphism verdicts for one map, and whether they agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismReport {
    pub nonexpansive: bool,
    pub levelwise_nonexpansive: bool,
    pub contraction: bool,
    pub uniform_contraction: bool,
    pub consistent: bool,
    pub verdicts: AxiomReport,
}

/// Decides non-expansiveness of `f` directly and through the level families,
/// local bases and uniform bases of both spaces.
///
/// Consistency means: the first two verdicts coincide, and a non-expansive
/// map is a contraction and a uniform contraction of the induced bases.
pub fn morphism_equivalence_suite(f: &SpaceMap, x: &FinitePMSpace, y: &FinitePMSpace) -> Result<MorphismReport> {
    let ne = nonexpansive_violation(f, x, y)?;
    let (fx, fy) = (levels_of(x), levels_of(y));
    let lw = levelwise_violation(f, &fx, &fy)?;
    let lc = contraction_violation(f, &local_bases_of(&fx), &local_bases_of(&fy))?;
    let uc = uniform_contraction_violation(f, &uniform_basis_of(&fx), &uniform_basis_of(&fy))?;
    let (nonexpansive, levelwise) = (ne.is_none(), lw.is_none());
    let (contraction, uniform) = (lc.is_none(), uc.is_none());
    let consistent = nonexpansive == levelwise && (!nonexpansive || (contraction && uniform));

    let mut verdicts = AxiomReport::new();
    verdicts.push(Axiom::NonExpansive, Verdict::from_witness(ne));
    verdicts.push(Axiom::LevelwiseNonExpansive, Verdict::from_witness(lw));
    verdicts.push(Axiom::Contraction, Verdict::from_witness(lc));
    verdicts.push(Axiom::UniformContraction, Verdict::from_witness(uc));
    Ok(MorphismReport {
        nonexpansive,
        levelwise_nonexpansive: levelwise,
        contraction,
        uniform_contraction: uniform,
        consistent,
        verdicts,
    })
}

/// Composition is preserved on both sides: `Δ` leaves assignments unchanged,
/// so `Δ(g ∘ f) = Δ(g) ∘ Δ(f)`, and composites of non-expansive (levelwise
/// non-expansive) maps are again non-expansive (levelwise non-expansive).
pub fn functor_composition_check(
    f: &SpaceMap,
    g: &SpaceMap,
    x: &FinitePMSpace,
    y: &FinitePMSpace,
    z: &FinitePMSpace,
) -> Result<bool> {
    let gf = f.then(g)?;
    check_carriers(f, x.carrier(), y.carrier())?;
    check_carriers(g, y.carrier(), z.carrier())?;
    let (fx, fy, fz) = (levels_of(x), levels_of(y), levels_of(z));
    let composed = (0..x.len()).all(|p| gf.apply(p) == g.apply(f.apply(p)));
    let ne = !(is_nonexpansive(f, x, y)? && is_nonexpansive(g, y, z)?) || is_nonexpansive(&gf, x, z)?;
    let lw = !(is_levelwise_nonexpansive(f, &fx, &fy)? && is_levelwise_nonexpansive(g, &fy, &fz)?)
        || is_levelwise_nonexpansive(&gf, &fx, &fz)?;
    Ok(composed && ne && lw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levels::fixtures::f2;
    use crate::probmet::fixtures::{df, pm2, two_point};
    use crate::tnorms::TNorm;

    fn pm2_prime() -> FinitePMSpace {
        two_point(TNorm::Product, df(&[("3", "1/2"), ("6", "1")]))
    }

    fn pm2_second() -> FinitePMSpace {
        two_point(TNorm::Product, df(&[("4", "1/2"), ("7", "1")]))
    }

    fn id() -> SpaceMap {
        SpaceMap::identity(pm2().carrier().clone())
    }

    #[test]
    fn nonexpansive_examples() {
        assert!(is_nonexpansive(&id(), &pm2(), &pm2()).unwrap());
        assert!(is_nonexpansive(&id(), &pm2_prime(), &pm2()).unwrap());
        let w = nonexpansive_violation(&id(), &pm2(), &pm2_prime()).unwrap().unwrap();
        assert_eq!(w.get("t"), Some(&"5/2".parse().unwrap()));
        assert_eq!(w.get("domain"), Some(&"1/2".parse().unwrap()));
        assert_eq!(w.get("codomain"), Some(&"0".parse().unwrap()));
    }

    #[test]
    fn levelwise_examples() {
        let (f, g) = (levels_of(&pm2()), levels_of(&pm2_prime()));
        assert!(is_levelwise_nonexpansive(&id(), &f2(), &f2()).unwrap());
        assert!(is_levelwise_nonexpansive(&id(), &g, &f).unwrap());
        let w = levelwise_violation(&id(), &f, &g).unwrap().unwrap();
        assert!(w.get("domain") < w.get("codomain"));
        // 7/10 lies in the violating region as well: 3 > 2
        let l = "7/10".parse().unwrap();
        assert!(g.eval(&l, 0, 1) > f.eval(&l, 0, 1));
        let other = two_point(TNorm::Minimum, df(&[("2", "1/2"), ("5", "1")]));
        assert!(is_levelwise_nonexpansive(&id(), &f, &levels_of(&other)).is_err());
    }

    #[test]
    fn equivalence_suite_examples() {
        for (x, y, expected) in [
            (pm2(), pm2(), true),
            (pm2_prime(), pm2(), true),
            (pm2(), pm2_prime(), false),
        ] {
            let r = morphism_equivalence_suite(&id(), &x, &y).unwrap();
            assert!(r.consistent);
            assert_eq!(r.nonexpansive, expected);
            assert_eq!(r.levelwise_nonexpansive, expected);
            if expected {
                assert!(r.contraction && r.uniform_contraction);
            }
        }
    }

    #[test]
    fn composition() {
        let (x, y, z) = (pm2_second(), pm2_prime(), pm2());
        assert!(functor_composition_check(&id(), &id(), &x, &y, &z).unwrap());
        assert!(is_nonexpansive(&id().then(&id()).unwrap(), &x, &z).unwrap());
        assert!(functor_composition_check(&id(), &id(), &pm2(), &pm2(), &pm2()).unwrap());
        let three = Carrier::new(["a", "b", "c"]).unwrap();
        let f = SpaceMap::identity(three);
        assert!(functor_composition_check(&f, &id(), &x, &y, &z).is_err());
    }

    #[test]
    fn map_documents() {
        let c = pm2().carrier().clone();
        let swap = SpaceMap::new(c.clone(), c, vec![1, 0]).unwrap();
        let json = serde_json::to_string(&swap).unwrap();
        assert_eq!(json, r#"{"assign":{"x":"y","y":"x"},"codomain":["x","y"],"domain":["x","y"]}"#);
        assert_eq!(serde_json::from_str::<SpaceMap>(&json).unwrap(), swap);
        let bad = r#"{"assign":{"x":"y","y":"w"},"codomain":["x","y"],"domain":["x","y"]}"#;
        assert!(serde_json::from_str::<SpaceMap>(bad).is_err());
        let partial = r#"{"assign":{"x":"y"},"codomain":["x","y"],"domain":["x","y"]}"#;
        assert!(serde_json::from_str::<SpaceMap>(partial).is_err());
    }

    #[test]
    fn map_documents_by_path() {
        let c = pm2().carrier().clone();
        let doc: MapDocument =
            serde_json::from_str(r#"{"domain":"X.json","codomain":"Y.json","assign":{"x":"y","y":"y"}}"#).unwrap();
        assert_eq!(doc.domain, CarrierRef::Path("X.json".into()));
        let f = doc.clone().resolve(&c, &c).unwrap();
        assert_eq!(f.assignment(), &[1, 1]);
        assert!(SpaceMap::try_from(doc.clone()).is_err());
        let other = Carrier::numbered(2);
        assert!(matches!(doc.resolve(&other, &c), Err(Error::CarrierMismatch(_))));
        let inline: MapDocument =
            serde_json::from_str(r#"{"domain":["x","y"],"codomain":"Y.json","assign":{"x":"x","y":"y"}}"#).unwrap();
        assert!(matches!(inline.resolve(&other, &c), Err(Error::CarrierMismatch(_))));
    }
}
