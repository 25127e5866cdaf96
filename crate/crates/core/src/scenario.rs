//! Scenario files, the built-in catalog and the artifacts a run leaves on disk.
//!
//! # Config grammar
//!
//! A scenario is a plain text document of `key = value` lines grouped under
//! `[scenario]`, `[flow]` and `[output]` headers. Everything after `#` is a
//! comment, blank lines are ignored and keys are case-sensitive. Keys that
//! appear before the first header may belong to any section; under a header
//! only that section's keys are accepted.
//!
//! `[scenario]`
//! - `name = <word>` (default `scenario`)
//! - `task = flow | duality | aleksandrov` (default `flow`)
//! - `n = 1 | 2`, `N = <nodes>` (defaults 1 and 512)
//! - `initial = sphere ρ | ellipse a b | shifted_disk c | fourier c0 a1 b1 a2 b2 … | file <path>`
//! - `seed = <u64>` and `perturb = <amplitude> <max mode>` add a seeded
//!   random trigonometric perturbation to the initial body
//! - `expect = converged | timeout | blowup | extinct | pass | fail | any`
//!
//! `[flow]`
//! - `alpha = <real>` (required for flow runs)
//! - `f = constant c | cosine c0 a1 a2 … | fourier c0 a1 b1 … | spike center width fraction | file <path>`
//! - `mode = normalized | raw`
//! - `phi0_rule = aleksandrov | bracket | iq_matching | unit_volume | explicit v`
//! - `cfl`, `t_max`, `residual_tol`, `blowup_ratio`, `min_u_floor`, `record_every`
//!
//! `[output]`
//! - `dir = <path>` relative to the output root (default: the scenario name)
//! - `snapshot_every = <steps>`; 0 writes only the initial and final body
//!
//! A `file` initial body is a snapshot table as written by the runner. A
//! `file` anisotropy holds `theta value` rows on the run's grid.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::error::{FlowError, GeometryError, GridError};
use crate::flow::{self, FlowConfig, FlowMode, FlowState, Outcome, PhiRule};
use crate::geometry::{self, BodySnapshot, SupportFn};
use crate::grid::{integrate, SphericalGrid};
use crate::measures::{self, AnisotropyF};

/// Environment variable that overrides the output root.
pub const OUTPUT_ROOT_ENV: &str = "ANIFLOW_OUTPUT_ROOT";
/// Output root used when [`OUTPUT_ROOT_ENV`] is unset.
pub const DEFAULT_OUTPUT_ROOT: &str = "aniflow-out";

/// Thresholds of the duality task.
pub const DUALITY_PRODUCT_TOL: f64 = 5e-3;
pub const INVOLUTION_TOL: f64 = 2e-3;
pub const ROUND_TRIP_TOL: f64 = 1e-3;
pub const MASS_TOL: f64 = 1e-6;
/// Tolerance on `|∫ f − |Sⁿ||` in the Aleksandrov task.
pub const CDT1_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

impl ScenarioError {
    /// Whether the error stems from the scenario document rather than the run.
    pub fn is_config_error(&self) -> bool {
        matches!(self, ScenarioError::Parse { .. } | ScenarioError::Invalid(_))
    }

    fn io(path: &Path, source: io::Error) -> Self {
        ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Flow,
    Duality,
    Aleksandrov,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialBody {
    Sphere(f64),
    Ellipse(f64, f64),
    ShiftedDisk(f64),
    /// `c₀` and `(aₖ, bₖ)` pairs, see [`SupportFn::fourier`].
    Fourier(f64, Vec<(f64, f64)>),
    File(PathBuf),
}

/// Random perturbation `amplitude · Σ_{k=2}^{max_mode} (aₖ cos kθ + bₖ sin kθ)/k²`
/// with `aₖ, bₖ` uniform in `[−1, 1]`. Only cosine terms are used for n = 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub amplitude: f64,
    pub max_mode: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Any,
    Converged,
    TimeOut,
    Blowup,
    Extinct,
    Pass,
    Fail,
}

impl Expect {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "any" => Expect::Any,
            "converged" => Expect::Converged,
            "timeout" => Expect::TimeOut,
            "blowup" => Expect::Blowup,
            "extinct" => Expect::Extinct,
            "pass" => Expect::Pass,
            "fail" => Expect::Fail,
            _ => return None,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Expect::Any => "any",
            Expect::Converged => "converged",
            Expect::TimeOut => "timeout",
            Expect::Blowup => "blowup",
            Expect::Extinct => "extinct",
            Expect::Pass => "pass",
            Expect::Fail => "fail",
        }
    }

    /// Whether an outcome label satisfies the expectation.
    pub fn admits(&self, outcome: &str) -> bool {
        *self == Expect::Any || self.label() == outcome
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub task: Task,
    pub dim: usize,
    pub nodes: usize,
    /// `None` only for the Aleksandrov task.
    pub initial: Option<InitialBody>,
    pub seed: u64,
    pub perturb: Option<Perturbation>,
    pub expect: Expect,
    pub flow: FlowConfig,
    /// Output directory relative to the output root.
    pub output_dir: PathBuf,
    pub snapshot_every: usize,
}

impl ScenarioSpec {
    pub fn grid(&self) -> Result<Arc<SphericalGrid>, ScenarioError> {
        Ok(Arc::new(SphericalGrid::new(self.dim, self.nodes)?))
    }

    /// Builds the (perturbed) initial support function.
    pub fn initial_support(&self) -> Result<SupportFn, ScenarioError> {
        let grid = self.grid()?;
        let body = self
            .initial
            .as_ref()
            .ok_or_else(|| ScenarioError::Invalid(format!("scenario {} has no initial body", self.name)))?;
        let u = match body {
            InitialBody::Sphere(rho) => SupportFn::sphere(grid, *rho)?,
            InitialBody::Ellipse(a, b) => SupportFn::ellipse(grid, *a, *b)?,
            InitialBody::ShiftedDisk(c) => SupportFn::shifted_disk(grid, *c)?,
            InitialBody::Fourier(c0, coeffs) => SupportFn::fourier(grid, *c0, coeffs)?,
            InitialBody::File(path) => {
                let text = fs::read_to_string(path).map_err(|e| ScenarioError::io(path, e))?;
                let table = geometry::parse_table(&text)
                    .map_err(|e| ScenarioError::Invalid(format!("{}: {e}", path.display())))?;
                if table.dim != self.dim || table.node_count != self.nodes {
                    return Err(ScenarioError::Invalid(format!(
                        "{}: table is n = {}, N = {} but the scenario uses n = {}, N = {}",
                        path.display(),
                        table.dim,
                        table.node_count,
                        self.dim,
                        self.nodes
                    )));
                }
                SupportFn::new(grid, table.u)?
            }
        };
        match self.perturb {
            None => Ok(u),
            Some(p) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let modes: Vec<(usize, f64, f64)> = (2..=p.max_mode)
                    .map(|k| (k, rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
                    .collect();
                let sine = self.dim == 1;
                let values = u
                    .grid()
                    .nodes()
                    .iter()
                    .zip(u.values())
                    .map(|(&t, &v)| {
                        let bump: f64 = modes
                            .iter()
                            .map(|&(k, a, b)| {
                                let kt = k as f64 * t;
                                (a * kt.cos() + if sine { b * kt.sin() } else { 0.0 }) / (k * k) as f64
                            })
                            .sum();
                        v + p.amplitude * bump
                    })
                    .collect();
                Ok(SupportFn::new(Arc::clone(u.shared_grid()), values)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Scenario,
    Flow,
    Output,
}

fn section_of(key: &str) -> Option<Section> {
    Some(match key {
        "name" | "task" | "n" | "N" | "initial" | "seed" | "perturb" | "expect" => Section::Scenario,
        "alpha" | "f" | "mode" | "phi0_rule" | "cfl" | "t_max" | "residual_tol" | "blowup_ratio"
        | "min_u_floor" | "record_every" => Section::Flow,
        "dir" | "snapshot_every" => Section::Output,
        _ => return None,
    })
}

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

fn err(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(e: &Entry, key: &str) -> Result<T, ScenarioError>
where
    T::Err: std::fmt::Display,
{
    e.value
        .parse::<T>()
        .map_err(|x| err(e.line, format!("malformed number for {key}: '{}' ({x})", e.value)))
}

fn numbers(line: usize, key: &str, words: &[&str]) -> Result<Vec<f64>, ScenarioError> {
    words
        .iter()
        .map(|w| {
            w.parse::<f64>()
                .map_err(|x| err(line, format!("malformed number for {key}: '{w}' ({x})")))
        })
        .collect()
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn parse_initial(e: &Entry, base: &Path) -> Result<InitialBody, ScenarioError> {
    let words: Vec<&str> = e.value.split_whitespace().collect();
    let (kind, args) = words.split_first().ok_or_else(|| err(e.line, "empty initial body"))?;
    if *kind == "file" {
        return match args {
            [path] => Ok(InitialBody::File(resolve(base, path))),
            _ => Err(err(e.line, "expected 'initial = file <path>'")),
        };
    }
    let v = numbers(e.line, "initial", args)?;
    let arity = |k: usize| {
        if v.len() == k {
            Ok(())
        } else {
            Err(err(e.line, format!("initial body '{kind}' takes {k} number(s), got {}", v.len())))
        }
    };
    Ok(match *kind {
        "sphere" => {
            arity(1)?;
            InitialBody::Sphere(v[0])
        }
        "ellipse" => {
            arity(2)?;
            InitialBody::Ellipse(v[0], v[1])
        }
        "shifted_disk" => {
            arity(1)?;
            InitialBody::ShiftedDisk(v[0])
        }
        "fourier" => {
            if v.is_empty() || v.len() % 2 == 0 {
                return Err(err(e.line, "fourier body needs c0 followed by (a_k, b_k) pairs"));
            }
            InitialBody::Fourier(v[0], v[1..].chunks(2).map(|c| (c[0], c[1])).collect())
        }
        other => return Err(err(e.line, format!("unknown initial body '{other}'"))),
    })
}

fn parse_f(e: &Entry, base: &Path, dim: usize, nodes: usize) -> Result<AnisotropyF, ScenarioError> {
    let words: Vec<&str> = e.value.split_whitespace().collect();
    let (kind, args) = words.split_first().ok_or_else(|| err(e.line, "empty anisotropy"))?;
    if *kind == "file" {
        let [path] = args else {
            return Err(err(e.line, "expected 'f = file <path>'"));
        };
        let path = resolve(base, path);
        let text = fs::read_to_string(&path).map_err(|x| ScenarioError::io(&path, x))?;
        let grid = SphericalGrid::new(dim, nodes)?;
        let mut values = Vec::with_capacity(nodes);
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols = numbers(k + 1, "f table", &line.split_whitespace().collect::<Vec<_>>())
                .map_err(|x| ScenarioError::Invalid(format!("{}: {x}", path.display())))?;
            let [theta, value] = cols[..] else {
                return Err(ScenarioError::Invalid(format!(
                    "{}: line {}: expected 'theta value'",
                    path.display(),
                    k + 1
                )));
            };
            let expected = grid.nodes().get(values.len()).copied().unwrap_or(f64::NAN);
            if !((theta - expected).abs() < 1e-9) {
                return Err(ScenarioError::Invalid(format!(
                    "{}: line {}: theta {theta} is not grid node {} of the run",
                    path.display(),
                    k + 1,
                    values.len()
                )));
            }
            values.push(value);
        }
        if values.len() != nodes {
            return Err(ScenarioError::Invalid(format!(
                "{}: expected {nodes} rows, found {}",
                path.display(),
                values.len()
            )));
        }
        return Ok(AnisotropyF::tabulated(grid, values));
    }
    let v = numbers(e.line, "f", args)?;
    let f = match *kind {
        "constant" => match v[..] {
            [c] => AnisotropyF::constant(c),
            _ => return Err(err(e.line, "expected 'f = constant <c>'")),
        },
        "cosine" => {
            let (c0, rest) = v.split_first().ok_or_else(|| err(e.line, "cosine needs c0"))?;
            AnisotropyF::cosine(*c0, rest.to_vec(), vec![])
        }
        "fourier" => {
            if v.is_empty() || v.len() % 2 == 0 {
                return Err(err(e.line, "fourier f needs c0 followed by (a_k, b_k) pairs"));
            }
            let cos = v[1..].iter().step_by(2).copied().collect();
            let sin = v[2..].iter().step_by(2).copied().collect();
            AnisotropyF::cosine(v[0], cos, sin)
        }
        "spike" => match v[..] {
            [center, width, fraction] => {
                if dim != 1 {
                    return Err(err(e.line, "spike anisotropy is only defined for n = 1"));
                }
                if !(width > 0.0 && width < std::f64::consts::TAU) {
                    return Err(err(e.line, "spike width must lie in (0, 2π)"));
                }
                if !(0.0..1.0).contains(&fraction) {
                    return Err(err(e.line, "spike fraction must lie in [0, 1)"));
                }
                AnisotropyF::spike(center, width, fraction)
            }
            _ => return Err(err(e.line, "expected 'f = spike <center> <width> <fraction>'")),
        },
        other => return Err(err(e.line, format!("unknown anisotropy '{other}'"))),
    };
    Ok(f)
}

fn parse_phi_rule(e: &Entry) -> Result<PhiRule, ScenarioError> {
    let words: Vec<&str> = e.value.split_whitespace().collect();
    Ok(match words[..] {
        ["aleksandrov"] => PhiRule::Aleksandrov,
        ["bracket"] => PhiRule::Bracket,
        ["iq_matching"] => PhiRule::IqMatching,
        ["unit_volume"] => PhiRule::UnitVolume,
        ["explicit", v] => PhiRule::Explicit(
            v.parse()
                .map_err(|x| err(e.line, format!("malformed number for phi0_rule: '{v}' ({x})")))?,
        ),
        _ => return Err(err(e.line, format!("unknown phi0_rule '{}'", e.value))),
    })
}

/// Parses a scenario document, resolving relative file references against
/// the current directory.
pub fn parse_config(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    parse_config_in(text, Path::new("."))
}

/// As [`parse_config`], resolving relative file references against `base`.
pub fn parse_config_in(text: &str, base: &Path) -> Result<ScenarioSpec, ScenarioError> {
    let mut section: Option<Section> = None;
    let mut entries: HashMap<&str, Entry> = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line, format!("malformed section header '{content}'")))?;
            section = Some(match name.trim() {
                "scenario" => Section::Scenario,
                "flow" => Section::Flow,
                "output" => Section::Output,
                other => return Err(err(line, format!("unknown section [{other}]"))),
            });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected 'key = value', got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let home = section_of(key).ok_or_else(|| err(line, format!("unknown key '{key}'")))?;
        if let Some(current) = section {
            if current != home {
                return Err(err(line, format!("key '{key}' does not belong in this section")));
            }
        }
        if value.is_empty() {
            return Err(err(line, format!("missing value for '{key}'")));
        }
        if let Some(prev) = entries.insert(key, Entry { line, value }) {
            return Err(err(line, format!("duplicate key '{key}' (first set on line {})", prev.line)));
        }
    }
    build_spec(&entries, base)
}

fn build_spec(entries: &HashMap<&str, Entry>, base: &Path) -> Result<ScenarioSpec, ScenarioError> {
    let get = |k: &str| entries.get(k);
    let name = get("name").map_or("scenario", |e| e.value).to_string();
    if name.contains(['/', '\\']) || name.split_whitespace().count() != 1 {
        let line = get("name").map_or(0, |e| e.line);
        return Err(err(line, format!("scenario name must be a single word, got '{name}'")));
    }
    let task = match get("task") {
        None => Task::Flow,
        Some(e) => match e.value {
            "flow" => Task::Flow,
            "duality" => Task::Duality,
            "aleksandrov" => Task::Aleksandrov,
            other => return Err(err(e.line, format!("unknown task '{other}'"))),
        },
    };
    let dim = match get("n") {
        None => 1,
        Some(e) => {
            let d: usize = number(e, "n")?;
            if !(d == 1 || d == 2) {
                return Err(err(e.line, format!("only n = 1 and n = 2 are supported, got {d}")));
            }
            d
        }
    };
    let nodes = match get("N") {
        None => 512,
        Some(e) => {
            let m: usize = number(e, "N")?;
            SphericalGrid::new(dim, m).map_err(|x| err(e.line, x.to_string()))?;
            m
        }
    };
    let initial = match get("initial") {
        Some(e) => Some(parse_initial(e, base)?),
        None if task == Task::Aleksandrov => None,
        None => return Err(ScenarioError::Invalid("missing required key 'initial'".into())),
    };
    let seed = get("seed").map(|e| number(e, "seed")).transpose()?.unwrap_or(0);
    let perturb = match get("perturb") {
        None => None,
        Some(e) => {
            let words: Vec<&str> = e.value.split_whitespace().collect();
            let [amp, modes] = words[..] else {
                return Err(err(e.line, "expected 'perturb = <amplitude> <max mode>'"));
            };
            let amplitude: f64 = amp
                .parse()
                .map_err(|x| err(e.line, format!("malformed number for perturb: '{amp}' ({x})")))?;
            let max_mode: usize = modes
                .parse()
                .map_err(|x| err(e.line, format!("malformed number for perturb: '{modes}' ({x})")))?;
            Some(Perturbation { amplitude, max_mode })
        }
    };
    let expect = match get("expect") {
        None => Expect::Any,
        Some(e) => Expect::parse(e.value).ok_or_else(|| err(e.line, format!("unknown expectation '{}'", e.value)))?,
    };

    let alpha = match get("alpha") {
        Some(e) => number(e, "alpha")?,
        None if task == Task::Flow => {
            return Err(ScenarioError::Invalid("missing required key 'alpha'".into()));
        }
        None => (dim + 1) as f64,
    };
    let f = match get("f") {
        Some(e) => parse_f(e, base, dim, nodes)?,
        None => AnisotropyF::constant(1.0),
    };
    if let Some(e) = get("f") {
        f.sample(&SphericalGrid::new(dim, nodes)?)
            .map_err(|x| err(e.line, format!("invalid anisotropy: {x}")))?;
    }
    let mut flow = FlowConfig::new(dim, alpha, f);
    if let Some(e) = get("mode") {
        flow.mode = match e.value {
            "normalized" => FlowMode::Normalized,
            "raw" => FlowMode::Raw,
            other => return Err(err(e.line, format!("unknown mode '{other}'"))),
        };
    }
    if let Some(e) = get("phi0_rule") {
        flow.phi0_rule = parse_phi_rule(e)?;
    }
    if let Some(e) = get("cfl") {
        flow.cfl = number(e, "cfl")?;
    }
    if let Some(e) = get("t_max") {
        flow.t_max = number(e, "t_max")?;
    }
    if let Some(e) = get("residual_tol") {
        flow.residual_tol = number(e, "residual_tol")?;
    }
    if let Some(e) = get("blowup_ratio") {
        flow.blowup_ratio = number(e, "blowup_ratio")?;
    }
    if let Some(e) = get("min_u_floor") {
        flow.min_u_floor = number(e, "min_u_floor")?;
    }
    if let Some(e) = get("record_every") {
        flow.record_every = number(e, "record_every")?;
    }
    if let Err(FlowError::Config(message)) = flow.validate(dim) {
        // attribute the inconsistency to the key that introduced it
        let culprit = if message.contains("iq_matching") || message.contains("phi0") {
            "phi0_rule"
        } else {
            ["cfl", "t_max", "residual_tol", "blowup_ratio", "min_u_floor", "record_every"]
                .into_iter()
                .find(|k| message.starts_with(k))
                .unwrap_or("alpha")
        };
        let line = get(culprit).map_or(0, |e| e.line);
        return Err(err(line, message));
    }

    let output_dir = get("dir").map_or_else(|| PathBuf::from(&name), |e| PathBuf::from(e.value));
    let snapshot_every = get("snapshot_every")
        .map(|e| number(e, "snapshot_every"))
        .transpose()?
        .unwrap_or(0);

    let spec = ScenarioSpec {
        name,
        task,
        dim,
        nodes,
        initial,
        seed,
        perturb,
        expect,
        flow,
        output_dir,
        snapshot_every,
    };
    if spec.initial.is_some() {
        let line = get("initial").map_or(0, |e| e.line);
        spec.initial_support().map_err(|x| match x {
            ScenarioError::Geometry(g) => err(line, format!("invalid initial body: {g}")),
            other => other,
        })?;
    }
    Ok(spec)
}

const CATALOG: [(&str, &str); 9] = [
    ("thm_A_isotropic", include_str!("../scenarios/thm_A_isotropic.conf")),
    ("thm_A_alpha_gt", include_str!("../scenarios/thm_A_alpha_gt.conf")),
    ("thm_B_anisotropic", include_str!("../scenarios/thm_B_anisotropic.conf")),
    ("thm_C_aleksandrov", include_str!("../scenarios/thm_C_aleksandrov.conf")),
    ("thm_Da_symmetric", include_str!("../scenarios/thm_Da_symmetric.conf")),
    ("thm_D_counterexample", include_str!("../scenarios/thm_D_counterexample.conf")),
    ("lemma_2_2_monotonicity", include_str!("../scenarios/lemma_2_2_monotonicity.conf")),
    ("duality_identities", include_str!("../scenarios/duality_identities.conf")),
    ("aleksandrov_checker_demo", include_str!("../scenarios/aleksandrov_checker_demo.conf")),
];

/// Names of the built-in scenarios.
pub fn catalog() -> Vec<&'static str> {
    CATALOG.iter().map(|(name, _)| *name).collect()
}

/// Source text of a built-in scenario.
pub fn catalog_source(name: &str) -> Option<&'static str> {
    CATALOG.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Parsed built-in scenario.
pub fn catalog_spec(name: &str) -> Result<ScenarioSpec, ScenarioError> {
    let text = catalog_source(name).ok_or_else(|| ScenarioError::Invalid(format!("no catalog scenario named '{name}'")))?;
    parse_config(text)
}

/// Output root from [`OUTPUT_ROOT_ENV`], or [`DEFAULT_OUTPUT_ROOT`].
pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV)
        .filter(|v| !v.is_empty())
        .map_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT), PathBuf::from)
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub name: String,
    /// Outcome label: a flow outcome, or `pass` / `fail` for check tasks.
    pub outcome: String,
    pub expect: Expect,
    pub dir: PathBuf,
    pub summary: String,
}

impl ScenarioReport {
    pub fn matched(&self) -> bool {
        self.expect.admits(&self.outcome)
    }
}

fn write(path: &Path, contents: &str) -> Result<(), ScenarioError> {
    fs::write(path, contents).map_err(|e| ScenarioError::io(path, e))
}

/// Runs a scenario and writes its artifacts under `root/<output dir>`.
pub fn run_scenario(spec: &ScenarioSpec, root: &Path) -> Result<ScenarioReport, ScenarioError> {
    let dir = root.join(&spec.output_dir);
    fs::create_dir_all(&dir).map_err(|e| ScenarioError::io(&dir, e))?;
    let start = Instant::now();
    let (outcome, mut summary) = match spec.task {
        Task::Flow => run_flow(spec, &dir)?,
        Task::Duality => run_duality(spec, &dir)?,
        Task::Aleksandrov => run_aleksandrov(spec, &dir)?,
    };
    let head = format!(
        "name = {}\noutcome = {}\nexpect = {}\n",
        spec.name,
        outcome,
        spec.expect.label()
    );
    summary.insert_str(0, &head);
    let _ = writeln!(summary, "wall_time_s = {:.3}", start.elapsed().as_secs_f64());
    write(&dir.join("summary.txt"), &summary)?;
    Ok(ScenarioReport {
        name: spec.name.clone(),
        outcome,
        expect: spec.expect,
        dir,
        summary,
    })
}

/// Writes the body at `state`. Close to blowup the radial function can no
/// longer be resampled; the table then carries `theta u` only, which is
/// still a valid `file` initial body.
fn write_snapshot(dir: &Path, k: usize, state: &FlowState) -> Result<(), ScenarioError> {
    let table = match BodySnapshot::from_support(state.u.clone()) {
        Ok(body) => body.to_table(state.t),
        Err(e) => {
            let grid = state.u.grid();
            let mut out = format!("# n {} N {} t {:.16e}\n", grid.dim(), grid.len(), state.t);
            let _ = writeln!(out, "# theta u (radial function unavailable: {e})");
            for (x, u) in grid.nodes().iter().zip(state.u.values()) {
                let _ = writeln!(out, "{x:.16e} {u:.16e}");
            }
            out
        }
    };
    write(&dir.join(format!("snapshot_{k}.txt")), &table)
}

fn run_flow(spec: &ScenarioSpec, dir: &Path) -> Result<(String, String), ScenarioError> {
    let u0 = spec.initial_support()?;
    let config = &spec.flow;
    let mut snapshots = 0usize;
    let mut failure: Option<ScenarioError> = None;
    let result = flow::run_observed(u0, config, |state| {
        let due = state.step_index == 0
            || (spec.snapshot_every > 0 && state.step_index % spec.snapshot_every == 0);
        if due && failure.is_none() {
            match write_snapshot(dir, snapshots, state) {
                Ok(()) => snapshots += 1,
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let state = &result.final_state;
    let last_written = spec.snapshot_every > 0 && state.step_index % spec.snapshot_every == 0;
    if !last_written && state.step_index > 0 {
        write_snapshot(dir, snapshots, state)?;
    }
    write(&dir.join("diagnostics.csv"), &flow::history_csv(&state.history))?;

    let alpha = config.alpha;
    let mut s = String::new();
    let _ = writeln!(s, "task = flow");
    let _ = writeln!(s, "collapsed = {}", matches!(result.outcome, Outcome::Blowup { collapsed: true }));
    let _ = writeln!(s, "steps = {}", state.step_index);
    let _ = writeln!(s, "t_final = {:.16e}", state.t);
    let _ = writeln!(s, "phi0 = {:.16e}", result.phi0);
    let _ = writeln!(s, "residual_max = {:.16e}", state.residual_max(alpha));
    let _ = writeln!(s, "ratio_R = {:.16e}", state.ratio_r());
    let _ = writeln!(s, "initial_ratio_R = {:.16e}", result.initial_ratio);
    let _ = writeln!(s, "J_alpha = {:.16e}", state.functional_j(alpha));
    let _ = writeln!(s, "symmetry_defect = {:.16e}", flow::symmetry_defect(&state.u));
    Ok((result.outcome.label().to_string(), s))
}

/// The quantities checked by the duality task.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityChecks {
    pub product_deviation: f64,
    /// `max |u** − u|`.
    pub involution_defect: f64,
    /// `max |support_from_radial(r) − u|`.
    pub round_trip_error: f64,
    /// `|∫ u/(r^{n+1} K) dx − |Sⁿ||`.
    pub mass_error: f64,
}

impl DualityChecks {
    pub fn evaluate(body: &BodySnapshot) -> Result<Self, GeometryError> {
        let dual = geometry::polar_dual(body)?;
        let product_deviation = geometry::duality_product_deviation(body, &dual);
        let double = geometry::polar_dual(&dual)?;
        let max_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let u = body.support().values();
        let involution_defect = max_diff(double.support().values(), u);
        let round_trip = geometry::support_from_radial(body.radial())?;
        let round_trip_error = max_diff(round_trip.values(), u);
        let grid = body.grid();
        let mass_error = (integrate(&body.frame().jacobian, grid) - grid.sphere_measure()).abs();
        Ok(Self {
            product_deviation,
            involution_defect,
            round_trip_error,
            mass_error,
        })
    }

    pub fn rows(&self) -> [(&'static str, f64, f64); 4] {
        [
            ("duality_product", self.product_deviation, DUALITY_PRODUCT_TOL),
            ("involution", self.involution_defect, INVOLUTION_TOL),
            ("round_trip", self.round_trip_error, ROUND_TRIP_TOL),
            ("gauss_map_mass", self.mass_error, MASS_TOL),
        ]
    }

    pub fn pass(&self) -> bool {
        self.rows().iter().all(|(_, v, tol)| v <= tol)
    }
}

fn checks_csv(rows: &[(&str, f64, f64, bool)]) -> String {
    let mut out = String::from("check,value,tolerance,pass\n");
    for (name, v, tol, ok) in rows {
        let _ = writeln!(out, "{name},{v:.16e},{tol:.16e},{ok}");
    }
    out
}

fn pass_label(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_string()
}

fn run_duality(spec: &ScenarioSpec, dir: &Path) -> Result<(String, String), ScenarioError> {
    let body = BodySnapshot::from_support(spec.initial_support()?)?;
    let checks = DualityChecks::evaluate(&body)?;
    let dual = geometry::polar_dual(&body)?;
    write(&dir.join("snapshot_0.txt"), &body.to_table(0.0))?;
    write(&dir.join("dual_snapshot.txt"), &dual.to_table(0.0))?;
    let rows: Vec<_> = checks.rows().iter().map(|&(n, v, tol)| (n, v, tol, v <= tol)).collect();
    write(&dir.join("checks.csv"), &checks_csv(&rows))?;
    let mut s = String::from("task = duality\n");
    for (name, v, _, _) in &rows {
        let _ = writeln!(s, "{name} = {v:.16e}");
    }
    Ok((pass_label(checks.pass()), s))
}

fn run_aleksandrov(spec: &ScenarioSpec, dir: &Path) -> Result<(String, String), ScenarioError> {
    let grid = spec.grid()?;
    let report = measures::aleksandrov_check(&spec.flow.f, &grid).map_err(ScenarioError::Invalid)?;
    let cdt1_ok = report.cdt1_error <= CDT1_TOL;
    let rows = [
        ("cdt1", report.cdt1_error, CDT1_TOL, cdt1_ok),
        ("cdt2_worst_margin", report.worst_margin, 0.0, report.cdt2_ok),
    ];
    write(&dir.join("checks.csv"), &checks_csv(&rows))?;
    let mut s = String::from("task = aleksandrov\n");
    let _ = writeln!(s, "cdt1_error = {:.16e}", report.cdt1_error);
    let _ = writeln!(s, "cdt2_ok = {}", report.cdt2_ok);
    let _ = writeln!(s, "worst_window = {:.16e} {:.16e}", report.worst_window.0, report.worst_window.1);
    let _ = writeln!(s, "worst_margin = {:.16e}", report.worst_margin);
    let _ = writeln!(s, "partial = {}", report.partial);
    Ok((pass_label(cdt1_ok && report.cdt2_ok), s))
}
