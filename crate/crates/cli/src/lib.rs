//! The `probmet` command line.
//!
//! Every command prints one JSON value, pretty-printed with a trailing
//! newline. Exit codes: 0 when every check passes, 1 on a mathematical
//! violation or an undecided search, 2 on input or usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use probmet_core::gen::{self, Provenance};
use probmet_core::levels::{oracle_ut_grid, standard_lambda_grid};
use probmet_core::morphisms::MapDocument;
use probmet_core::probmet::{oracle_p5_grid, standard_gamma_grid, SpaceDocument};
use probmet_core::systems::{run_saturation_query, SaturationQuery, TableDocument, DEFAULT_CUTOFF};
use probmet_core::{
    check_level_axioms, check_local_basis, check_lemma_star, check_mixed_triangle, check_pm_axioms,
    check_uniform_basis, delta_transform, morphism_equivalence_suite, phi_reconstruct, AxiomReport, AxiomVerdict,
    Error, FiniteDistanceTable, FiniteLocalTable, FinitePMSpace, LambdaGrid, LevelFamily, TNorm, UnitRational,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "probmet", version, about = "Exact checks for finite probabilistic metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the result to this file instead of standard output.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,

    /// Seed for the random generators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Denominator of the grids used by the brute-force oracles and by lemma-star.
    #[arg(long, global = true, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
    pub grid_denominator: u64,

    /// Search budget for the local basis (A3) check.
    #[arg(long, global = true, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: u64,

    /// Include wall-clock timings in reports. Off by default so output is reproducible.
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the axioms of a space, level family or basis document.
    Verify { path: PathBuf },
    /// Level family of a space.
    Delta { path: PathBuf },
    /// Space reconstructed from a level family.
    Phi { path: PathBuf },
    /// Apply both transforms and compare the result with the input byte for byte.
    Roundtrip { path: PathBuf },
    /// Generate a random space.
    Gen {
        #[arg(long)]
        points: usize,
        #[arg(long)]
        breaks: usize,
        #[arg(long, value_enum, default_value_t = TNormArg::Product)]
        tnorm: TNormArg,
        #[arg(long, value_enum, default_value_t = Mode::Valid)]
        mode: Mode,
    },
    /// Decide the morphism notions for a map between two spaces.
    CheckMap { map: PathBuf, domain: PathBuf, codomain: PathBuf },
    /// Decide membership of a table in the saturation of a basis.
    Saturate { path: PathBuf },
    /// Evaluate the three t-norm lemma conditions for a, b, d on the grid.
    LemmaStar {
        #[arg(long, value_enum, default_value_t = TNormArg::Product)]
        tnorm: TNormArg,
        a: String,
        b: String,
        d: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TNormArg {
    Minimum,
    Product,
    Lukasiewicz,
}

impl From<TNormArg> for TNorm {
    fn from(t: TNormArg) -> TNorm {
        match t {
            TNormArg::Minimum => TNorm::Minimum,
            TNormArg::Product => TNorm::Product,
            TNormArg::Lukasiewicz => TNorm::Lukasiewicz,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Valid,
    Mutant,
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubjectKind {
    Space,
    Family,
    UniformBasis,
    LocalBasis,
}

/// Result of `verify`, and of the precondition checks of other commands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub subject: String,
    pub kind: SubjectKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub verdicts: Vec<AxiomVerdict>,
    /// Verdicts of the grid oracle run alongside the exact checker.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<AxiomVerdict>,
    /// Microseconds per stage, only with `--timings`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, u64>>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict.holds())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundtripReport {
    pub subject: String,
    pub kind: SubjectKind,
    pub identical: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapReport {
    pub subject: String,
    pub domain: String,
    pub codomain: String,
    pub nonexpansive: bool,
    pub levelwise_nonexpansive: bool,
    pub contraction: bool,
    pub uniform_contraction: bool,
    pub consistent: bool,
    pub verdicts: Vec<AxiomVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationReport {
    pub subject: String,
    pub member: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaReport {
    pub tnorm: TNorm,
    pub a: UnitRational,
    pub b: UnitRational,
    pub d: UnitRational,
    pub grid_denominator: u64,
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
}

/// A finished command: what to print, where, and the exit code.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<Emit, Failure>;

/// One JSON value and the exit code. `document` outputs go to `-o` when
/// given; a report explaining why no document was produced always goes to
/// standard output.
struct Emit {
    code: i32,
    body: String,
    to_output: bool,
}

impl Emit {
    fn result<T: Serialize>(value: &T, ok: bool) -> Self {
        Emit {
            code: if ok { 0 } else { 1 },
            body: canonical(value),
            to_output: true,
        }
    }

    fn refusal<T: Serialize>(value: &T) -> Self {
        Emit {
            code: 1,
            body: canonical(value),
            to_output: false,
        }
    }
}

/// Pretty JSON with a trailing newline. Every document type has its fields
/// in a fixed order and maps keyed by `BTreeMap`, so this is canonical.
pub fn canonical<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

/// Parses arguments and runs the command without touching the process.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            };
        }
    };
    let output = cli.output.clone();
    match dispatch(&cli) {
        Ok(emit) => match (&output, emit.to_output) {
            (Some(path), true) => match fs::write(path, &emit.body) {
                Ok(()) => Outcome { code: emit.code, ..Outcome::default() },
                Err(e) => input_error(format!("{}: {e}", path.display())),
            },
            _ => Outcome {
                code: emit.code,
                stdout: emit.body,
                stderr: String::new(),
            },
        },
        Err(Failure::Input(msg)) => input_error(msg),
    }
}

fn input_error(msg: String) -> Outcome {
    Outcome {
        code: 2,
        stdout: String::new(),
        stderr: format!("error: {msg}\n"),
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Verify { path } => cmd_verify(cli, path),
        Command::Delta { path } => cmd_delta(cli, path),
        Command::Phi { path } => cmd_phi(cli, path),
        Command::Roundtrip { path } => cmd_roundtrip(cli, path),
        Command::Gen { points, breaks, tnorm, mode } => cmd_gen(cli.seed, *points, *breaks, (*tnorm).into(), *mode),
        Command::CheckMap { map, domain, codomain } => cmd_check_map(map, domain, codomain),
        Command::Saturate { path } => cmd_saturate(path),
        Command::LemmaStar { tnorm, a, b, d } => cmd_lemma_star(cli.grid_denominator, (*tnorm).into(), a, b, d),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| {
        let place = if e.line() == 0 { locate(text, &e.to_string()) } else { None };
        match place {
            Some((line, column)) => Failure::Input(format!("{}: {e} at line {line} column {column}", path.display())),
            None => Failure::Input(format!("{}: {e}", path.display())),
        }
    })
}

/// Position for errors raised after a whole document was read: the first
/// quoted name in the message that occurs in the text, else the section key.
fn locate(text: &str, message: &str) -> Option<(usize, usize)> {
    let quoted = message.split('"').skip(1).step_by(2).map(|q| format!("\"{q}\""));
    let sections = ["alpha", "levels", "assign", "table", "carrier"].map(|k| format!("\"{k}\""));
    let offset = quoted.chain(sections).find_map(|needle| text.find(&needle))?;
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Some((line, column))
}

/// Decides what a document describes from its top-level keys.
fn kind_of(path: &Path, text: &str) -> Result<SubjectKind, Failure> {
    let value: serde_json::Value = parse(path, text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Failure::Input(format!("{}: expected a JSON object", path.display())))?;
    if obj.contains_key("alpha") {
        Ok(SubjectKind::Space)
    } else if obj.contains_key("levels") {
        Ok(SubjectKind::Family)
    } else if let Some(basis) = obj.get("basis").filter(|_| !obj.contains_key("candidate")) {
        let anchored = basis
            .as_array()
            .is_some_and(|b| b.iter().any(|t| t.get("anchor").is_some()));
        Ok(if anchored { SubjectKind::LocalBasis } else { SubjectKind::UniformBasis })
    } else {
        Err(Failure::Input(format!(
            "{}: not a space, level family or basis document",
            path.display()
        )))
    }
}

struct Loaded<T> {
    value: T,
    provenance: Option<String>,
}

fn load_space(path: &Path, text: &str) -> Result<Loaded<FinitePMSpace>, Failure> {
    let value: FinitePMSpace = parse(path, text)?;
    let doc: SpaceDocument = parse(path, text)?;
    Ok(Loaded { value, provenance: doc.provenance })
}

fn load_family(path: &Path, text: &str) -> Result<LevelFamily, Failure> {
    parse(path, text)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisDocument {
    basis: Vec<TableDocument>,
}

struct Clock {
    enabled: bool,
    marks: BTreeMap<String, u64>,
}

impl Clock {
    fn new(enabled: bool) -> Self {
        Clock { enabled, marks: BTreeMap::new() }
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.marks.insert(stage.to_owned(), start.elapsed().as_micros() as u64);
        }
        out
    }

    fn finish(self) -> Option<BTreeMap<String, u64>> {
        self.enabled.then_some(self.marks)
    }
}

fn space_report(cli: &Cli, subject: &str, loaded: &Loaded<FinitePMSpace>) -> Result<VerificationReport, Failure> {
    let mut clock = Clock::new(cli.timings);
    let space = &loaded.value;
    let exact = clock.time("exact", || check_pm_axioms(space));
    let oracle = clock.time("oracle", || oracle_p5_grid(space, &standard_gamma_grid(space, cli.grid_denominator)))?;
    Ok(VerificationReport {
        subject: subject.to_owned(),
        kind: SubjectKind::Space,
        provenance: loaded.provenance.clone(),
        verdicts: exact.verdicts,
        oracle: oracle.verdicts,
        timings: clock.finish(),
    })
}

fn family_report(cli: &Cli, subject: &str, family: &LevelFamily) -> Result<VerificationReport, Failure> {
    let mut clock = Clock::new(cli.timings);
    let mut exact = clock.time("exact", || check_level_axioms(family));
    exact.extend(clock.time("mixed", || check_mixed_triangle(family)));
    let oracle = clock.time("oracle", || {
        oracle_ut_grid(family, &standard_lambda_grid(family, cli.grid_denominator))
    })?;
    Ok(VerificationReport {
        subject: subject.to_owned(),
        kind: SubjectKind::Family,
        provenance: None,
        verdicts: exact.verdicts,
        oracle: oracle.verdicts,
        timings: clock.finish(),
    })
}

fn basis_report(cli: &Cli, path: &Path, text: &str, kind: SubjectKind) -> Result<VerificationReport, Failure> {
    let doc: BasisDocument = parse(path, text)?;
    let mut clock = Clock::new(cli.timings);
    let report: AxiomReport = match kind {
        SubjectKind::UniformBasis => {
            let basis = doc
                .basis
                .into_iter()
                .map(FiniteDistanceTable::from_document)
                .collect::<Result<Vec<_>, _>>()?;
            clock.time("exact", || check_uniform_basis(&basis))?
        }
        _ => {
            let tables = doc
                .basis
                .into_iter()
                .map(FiniteLocalTable::from_document)
                .collect::<Result<Vec<_>, _>>()?;
            let n = tables.first().map_or(0, |t| t.carrier().len());
            if let Some(t) = tables.iter().find(|t| t.carrier() != tables[0].carrier()) {
                return Err(Failure::Input(format!(
                    "{}: tables anchored at \"{}\" use a different carrier",
                    path.display(),
                    t.carrier().label(t.anchor())
                )));
            }
            let mut bases: Vec<Vec<FiniteLocalTable>> = vec![Vec::new(); n];
            for t in tables {
                bases[t.anchor()].push(t);
            }
            clock.time("exact", || check_local_basis(&bases, cli.cutoff))?
        }
    };
    Ok(VerificationReport {
        subject: path.display().to_string(),
        kind,
        provenance: None,
        verdicts: report.verdicts,
        oracle: Vec::new(),
        timings: clock.finish(),
    })
}

fn cmd_verify(cli: &Cli, path: &Path) -> CmdResult {
    let text = read(path)?;
    let subject = path.display().to_string();
    let report = match kind_of(path, &text)? {
        SubjectKind::Space => space_report(cli, &subject, &load_space(path, &text)?)?,
        SubjectKind::Family => family_report(cli, &subject, &load_family(path, &text)?)?,
        kind => basis_report(cli, path, &text, kind)?,
    };
    let ok = report.passed();
    Ok(Emit::result(&report, ok))
}

fn cmd_delta(cli: &Cli, path: &Path) -> CmdResult {
    let text = read(path)?;
    let loaded = load_space(path, &text)?;
    match delta_transform(&loaded.value) {
        Ok(family) => Ok(Emit::result(&family, true)),
        Err(Error::AxiomViolation(_)) => Ok(Emit::refusal(&space_report(cli, &path.display().to_string(), &loaded)?)),
        Err(e) => Err(e.into()),
    }
}

fn cmd_phi(cli: &Cli, path: &Path) -> CmdResult {
    let text = read(path)?;
    let family = load_family(path, &text)?;
    match phi_reconstruct(&family) {
        Ok(space) => Ok(Emit::result(&space, true)),
        Err(Error::AxiomViolation(_)) => Ok(Emit::refusal(&family_report(cli, &path.display().to_string(), &family)?)),
        Err(e) => Err(e.into()),
    }
}

fn cmd_roundtrip(cli: &Cli, path: &Path) -> CmdResult {
    let text = read(path)?;
    let subject = path.display().to_string();
    let kind = kind_of(path, &text)?;
    let identical = match kind {
        SubjectKind::Space => {
            let loaded = load_space(path, &text)?;
            let family = match delta_transform(&loaded.value) {
                Ok(f) => f,
                Err(Error::AxiomViolation(_)) => return Ok(Emit::refusal(&space_report(cli, &subject, &loaded)?)),
                Err(e) => return Err(e.into()),
            };
            canonical(&phi_reconstruct(&family)?) == canonical(&loaded.value)
        }
        SubjectKind::Family => {
            let family = load_family(path, &text)?;
            let space = match phi_reconstruct(&family) {
                Ok(s) => s,
                Err(Error::AxiomViolation(_)) => return Ok(Emit::refusal(&family_report(cli, &subject, &family)?)),
                Err(e) => return Err(e.into()),
            };
            canonical(&delta_transform(&space)?) == canonical(&family)
        }
        _ => return Err(Failure::Input(format!("{subject}: roundtrip needs a space or a level family"))),
    };
    Ok(Emit::result(&RoundtripReport { subject, kind, identical }, identical))
}

fn cmd_gen(seed: u64, points: usize, breaks: usize, tnorm: TNorm, mode: Mode) -> CmdResult {
    if points == 0 || breaks == 0 {
        return Err(Failure::Input("--points and --breaks must be at least 1".into()));
    }
    if points > 256 {
        return Err(Failure::Input("--points is limited to 256".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (space, provenance) = match mode {
        Mode::Valid => {
            let g = gen::valid_space(&mut rng, points, breaks, tnorm);
            (g.value, g.provenance)
        }
        Mode::Infinite => {
            if points < 2 {
                return Err(Failure::Input("mode infinite needs at least 2 points".into()));
            }
            (
                gen::chain_space(&mut rng, points, breaks, tnorm, true),
                Provenance::ChainAtInfinity,
            )
        }
        Mode::Mutant => {
            if points < 2 {
                return Err(Failure::Input("mode mutant needs at least 2 points".into()));
            }
            let g = gen::mutant_space(&mut rng, points, breaks, tnorm);
            (g.value, g.provenance)
        }
    };
    let report = check_pm_axioms(&space);
    let expected = match provenance {
        Provenance::Mutant(axiom) => report.failed_axioms() == vec![axiom],
        _ => report.passed(),
    };
    if !expected {
        return Err(Failure::Input(format!("generator produced an unexpected space: {}", report.summary())));
    }
    let mut doc = space.to_document();
    doc.provenance = Some(provenance.to_string());
    Ok(Emit::result(&doc, true))
}

fn cmd_check_map(map_path: &Path, x_path: &Path, y_path: &Path) -> CmdResult {
    let map_doc: MapDocument = parse(map_path, &read(map_path)?)?;
    let x = load_space(x_path, &read(x_path)?)?.value;
    let y = load_space(y_path, &read(y_path)?)?.value;
    for (path, space) in [(x_path, &x), (y_path, &y)] {
        let report = check_pm_axioms(space);
        if !report.passed() {
            return Err(Failure::Input(format!("{}: not a valid space: {}", path.display(), report.summary())));
        }
    }
    if x.tnorm() != y.tnorm() {
        return Err(Failure::Input("the two spaces use different t-norms".into()));
    }
    let f = map_doc.resolve(x.carrier(), y.carrier())?;
    let r = morphism_equivalence_suite(&f, &x, &y)?;
    let ok = r.nonexpansive && r.levelwise_nonexpansive && r.contraction && r.uniform_contraction && r.consistent;
    let report = MapReport {
        subject: map_path.display().to_string(),
        domain: x_path.display().to_string(),
        codomain: y_path.display().to_string(),
        nonexpansive: r.nonexpansive,
        levelwise_nonexpansive: r.levelwise_nonexpansive,
        contraction: r.contraction,
        uniform_contraction: r.uniform_contraction,
        consistent: r.consistent,
        verdicts: r.verdicts.verdicts,
    };
    Ok(Emit::result(&report, ok))
}

fn cmd_saturate(path: &Path) -> CmdResult {
    let query: SaturationQuery = parse(path, &read(path)?)?;
    let member = run_saturation_query(query)?;
    let report = SaturationReport {
        subject: path.display().to_string(),
        member,
    };
    Ok(Emit::result(&report, member))
}

fn cmd_lemma_star(denom: u64, tnorm: TNorm, a: &str, b: &str, d: &str) -> CmdResult {
    let unit = |name: &str, s: &str| -> Result<UnitRational, Failure> {
        s.parse::<UnitRational>()
            .map_err(|e| Failure::Input(format!("{name}: {e}")))
    };
    let (a, b, d) = (unit("a", a)?, unit("b", b)?, unit("d", d)?);
    let r = check_lemma_star(tnorm, &a, &b, &d, &LambdaGrid::dyadic(denom))?;
    let report = LemmaReport {
        tnorm,
        a,
        b,
        d,
        grid_denominator: denom,
        c1: r.c1,
        c2: r.c2,
        c3: r.c3,
    };
    Ok(Emit::result(&report, true))
}
