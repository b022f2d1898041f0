//! Config ingestion, expression parsing, suite dispatch and report
//! rendering for the `dolbeault` binary.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use dolbeault::expr::{parse_free, parse_rational, ParseError};
use dolbeault::group::{FiniteGroup, GroupFunction, Perm};
use dolbeault::groupdolbeault::{Flavor, GeneratorSplit};
use dolbeault::ncalg::{Alphabet, NCPoly, RewriteSystem};
use dolbeault::orebundle::OreExtension;
use dolbeault::qdolbeault::{Calculus, Form};
use dolbeault::report::Report;
use dolbeault::suites::{self, BraidedPreset, GroupSetup};
use dolbeault::Scalar;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config target `{config}` does not match the `{command}` command")]
    TargetMismatch { config: String, command: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum ExprError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("unknown symbol: {0}")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Qplane,
    Group,
    Braided,
    Bundle,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Qplane => "qplane",
            Target::Group => "group",
            Target::Braided => "braided",
            Target::Bundle => "bundle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Md,
}

/// A group given by name (`a4`, `z5`, `cyclic`) or by permutation
/// generators in cycle notation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Preset(String),
    Permutations(PermutationGroup),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermutationGroup {
    /// number of points permuted
    pub degree: usize,
    pub generators: BTreeMap<String, String>,
}

/// Suite parameters from a JSON document. Every field is optional;
/// command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub target: Option<Target>,
    pub group: Option<GroupSpec>,
    /// order of the cyclic group when `group` is `cyclic`
    pub n: Option<usize>,
    /// names of the elements of `C01`; `C10` is their inverses
    pub split: Option<Vec<String>>,
    pub flavor: Option<Flavor>,
    pub factorise: Option<bool>,
    /// exponent `2 alpha` of the Ore exchange weight `q^{2 alpha}`
    pub two_alpha: Option<i64>,
    /// braided preset: `qplane` or `flip`
    pub preset: Option<String>,
    /// dimension of the flip preset
    pub dim: Option<usize>,
    /// diagonal metric on E: one row per holomorphic generator, one
    /// rational value per group element
    pub metric: Option<Vec<Vec<String>>>,
    pub max_degree: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    /// Overlay `o` on `self`; fields set in `o` win.
    pub fn merged(&self, o: &SuiteConfig) -> SuiteConfig {
        macro_rules! pick {
            ($($f:ident),*) => { SuiteConfig { $($f: o.$f.clone().or_else(|| self.$f.clone()),)* } };
        }
        pick!(target, group, n, split, flavor, factorise, two_alpha, preset, dim, metric, max_degree, seed, format)
    }
}

/// The suite selected by a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    QplaneVerify,
    QplaneMetric,
    BraidedDims,
    GroupDims,
    GroupChern,
    BundleVerify,
}

impl Command {
    pub fn target(self) -> Target {
        match self {
            Command::QplaneVerify | Command::QplaneMetric => Target::Qplane,
            Command::BraidedDims => Target::Braided,
            Command::GroupDims | Command::GroupChern => Target::Group,
            Command::BundleVerify => Target::Bundle,
        }
    }
}

/// A fully validated suite invocation.
#[derive(Debug, Clone)]
pub enum Job {
    QplaneVerify { max_degree: usize, seed: u64 },
    QplaneMetric,
    BraidedDims { preset: BraidedPreset, max_degree: usize },
    GroupDims(GroupSetup),
    GroupChern { setup: GroupSetup, seed: u64, metric: Option<Vec<GroupFunction>> },
    BundleVerify { two_alpha: i64 },
}

fn invalid<T>(m: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(m.into()))
}

fn resolve_group(cfg: &SuiteConfig) -> Result<FiniteGroup, ConfigError> {
    match &cfg.group {
        None => Ok(FiniteGroup::a4()),
        Some(GroupSpec::Preset(name)) if name == "cyclic" => match cfg.n {
            Some(n) if n >= 3 => Ok(FiniteGroup::cyclic(n)),
            Some(n) => invalid(format!("cyclic group needs n >= 3, got {n}")),
            None => invalid("cyclic group needs `n`"),
        },
        Some(GroupSpec::Preset(name)) => FiniteGroup::preset(name).map_err(|e| ConfigError::Invalid(e.to_string())),
        Some(GroupSpec::Permutations(p)) => {
            let mut gens = Vec::new();
            for (name, cycles) in &p.generators {
                gens.push((name.clone(), Perm::parse_cycles(cycles, p.degree).map_err(|e| ConfigError::Invalid(e.to_string()))?));
            }
            FiniteGroup::from_permutations(&gens).map_err(|e| ConfigError::Invalid(e.to_string()))
        }
    }
}

fn resolve_split(cfg: &SuiteConfig, g: &FiniteGroup) -> Result<GeneratorSplit, ConfigError> {
    match &cfg.split {
        Some(names) => {
            let c01 = names.iter().map(|n| g.index_of(n).map_err(|e| ConfigError::Invalid(e.to_string()))).collect::<Result<Vec<_>, _>>()?;
            GeneratorSplit::from_c01(g, c01).map_err(|e| ConfigError::Invalid(e.to_string()))
        }
        None if *g == FiniteGroup::a4() => Ok(GeneratorSplit::a4(g)),
        None if g.order() >= 3 && *g == FiniteGroup::cyclic(g.order()) => Ok(GeneratorSplit::cyclic(g)),
        None => invalid("`split` is required for this group"),
    }
}

fn resolve_metric(rows: &[Vec<String>], setup: &GroupSetup) -> Result<Vec<GroupFunction>, ConfigError> {
    let (k, n) = (setup.split.c10.len(), setup.group.order());
    if rows.len() != k {
        return invalid(format!("metric needs {k} rows (one per holomorphic generator), got {}", rows.len()));
    }
    let mut out = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return invalid(format!("metric row {r} needs {n} values, got {}", row.len()));
        }
        let vals = row.iter().map(|t| parse_rational(t).map_err(|e| ConfigError::Invalid(format!("metric row {r}: {e}")))).collect::<Result<Vec<_>, _>>()?;
        if vals.iter().any(num_traits::Zero::is_zero) {
            return invalid(format!("metric row {r} has a zero value"));
        }
        out.push(GroupFunction(vals));
    }
    Ok(out)
}

/// Validate `cfg` for `cmd`. Nothing is computed before this succeeds.
pub fn resolve(cmd: Command, cfg: &SuiteConfig) -> Result<Job, ConfigError> {
    if let Some(t) = cfg.target {
        if t != cmd.target() {
            return Err(ConfigError::TargetMismatch { config: t.name().into(), command: cmd.target().name().into() });
        }
    }
    let seed = cfg.seed.unwrap_or(0);
    Ok(match cmd {
        Command::QplaneVerify => Job::QplaneVerify { max_degree: cfg.max_degree.unwrap_or(5), seed },
        Command::QplaneMetric => Job::QplaneMetric,
        Command::BraidedDims => {
            let preset = match cfg.preset.as_deref().unwrap_or("qplane") {
                "qplane" => BraidedPreset::QPlane,
                "flip" => match cfg.dim {
                    Some(d) if d >= 1 => BraidedPreset::Flip(d),
                    _ => return invalid("flip preset needs `dim` >= 1"),
                },
                other => return invalid(format!("unknown braided preset `{other}`")),
            };
            let max_degree = cfg.max_degree.unwrap_or(5);
            if max_degree > 8 {
                return invalid("max_degree above 8 is not supported for braided dims");
            }
            Job::BraidedDims { preset, max_degree }
        }
        Command::GroupDims | Command::GroupChern => {
            let group = resolve_group(cfg)?;
            let split = resolve_split(cfg, &group)?;
            let setup = GroupSetup { group, split, flavor: cfg.flavor.unwrap_or(Flavor::Wor), factorise: cfg.factorise.unwrap_or(true) };
            if cmd == Command::GroupDims {
                if cfg.metric.is_some() {
                    return invalid("`metric` applies to `group chern` only");
                }
                Job::GroupDims(setup)
            } else {
                let metric = cfg.metric.as_deref().map(|m| resolve_metric(m, &setup)).transpose()?;
                Job::GroupChern { setup, seed, metric }
            }
        }
        Command::BundleVerify => Job::BundleVerify { two_alpha: cfg.two_alpha.unwrap_or(3) },
    })
}

pub fn run_suite(job: &Job) -> Report {
    match job {
        Job::QplaneVerify { max_degree, seed } => suites::qplane_verify(*max_degree, *seed),
        Job::QplaneMetric => suites::qplane_metric(),
        Job::BraidedDims { preset, max_degree } => suites::braided_dims(*preset, *max_degree),
        Job::GroupDims(setup) => suites::group_dims(setup),
        Job::GroupChern { setup, seed, metric } => suites::group_chern_with_metric(setup, *seed, metric.as_deref()),
        Job::BundleVerify { two_alpha } => suites::bundle_verify(*two_alpha),
    }
}

/// Exit status for a finished report: 0 iff nothing failed.
pub fn exit_code(r: &Report) -> i32 {
    if r.all_passed() {
        0
    } else {
        1
    }
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

pub fn emit_report(r: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(r).expect("report serialises");
            s.push('\n');
            s
        }
        Format::Md => {
            let mut s = format!("# Report (version {})\n\n", r.version);
            s.push_str(&format!("{} checks, {} failed\n\n", r.checks.len(), r.failures()));
            s.push_str("| check | status | lhs | rhs | witness | elapsed (s) |\n|---|---|---|---|---|---|\n");
            for c in &r.checks {
                s.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} |\n",
                    md_cell(&c.check),
                    c.status,
                    md_cell(&c.lhs),
                    md_cell(&c.rhs),
                    md_cell(c.witness.as_deref().unwrap_or("")),
                    c.elapsed.map(|t| format!("{t:.3}")).unwrap_or_default()
                ));
            }
            s
        }
    }
}

/// A parsed expression, reduced to normal form in the smallest algebra
/// containing its atoms.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Scalar(Scalar),
    /// element of the quantum plane
    Poly(NCPoly),
    /// element of the Ore extension by `delta^{+-1}` (exchange weight `q^3`)
    Ore(NCPoly),
    Form(Form),
}

pub fn parse_expr(text: &str) -> Result<Parsed, ExprError> {
    let e = parse_free(text)?;
    if let Some(c) = e.as_scalar() {
        return Ok(Parsed::Scalar(c));
    }
    let atoms: Vec<_> = e.terms.keys().flatten().copied().collect();
    if atoms.iter().any(|a| a.is_form()) {
        let calc = Calculus::build().expect("plane calculus");
        return calc.parse(text).map(Parsed::Form).map_err(|e| ExprError::Unknown(e.to_string()));
    }
    let plane = Alphabet::quantum_plane();
    if atoms.iter().all(|&a| plane.atom(a).is_some()) {
        let p = NCPoly::from_free(&e, &plane).map_err(|e| ExprError::Unknown(e.to_string()))?;
        return Ok(Parsed::Poly(RewriteSystem::quantum_plane().normal_form(&p)));
    }
    let ore = OreExtension::default();
    let p = NCPoly::from_free(&e, ore.rs().alphabet()).map_err(|e| ExprError::Unknown(e.to_string()))?;
    let p = ore.nf(&p);
    Ok(match OreExtension::restrict(&p) {
        Some(plane) => Parsed::Poly(plane),
        None => Parsed::Ore(p),
    })
}

/// Canonical text; parses back to the same value.
pub fn render(p: &Parsed) -> String {
    match p {
        Parsed::Scalar(c) => c.to_string(),
        Parsed::Poly(x) => RewriteSystem::quantum_plane().text(x),
        Parsed::Ore(x) => OreExtension::default().text(x),
        Parsed::Form(x) => Calculus::build().expect("plane calculus").text(x),
    }
}
