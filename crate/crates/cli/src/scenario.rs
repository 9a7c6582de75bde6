//! Scenario files: a versioned TOML document describing a fan, named
//! support vectors, a K family and a list of tasks.
//!
//! ```text
//! # polytrunc-scenario v1
//! name = "intro_1d"
//!
//! [space]
//! dim = 1
//!
//! [fan]
//! cones = [[[1]], [[-1]]]
//!
//! [supports]
//! delta = [-2, -1]
//!
//! [k]
//! default = "1"
//! [[k.cone]]
//! rays = []
//! expr = "1 + exp(-abs(x1))"
//!
//! [[task]]
//! kind = "integrate"
//! support = "delta"
//! ```
//!
//! Rays are numbered in order of first appearance in `fan.cones`; support
//! vectors list one support number per ray in that order.

use polytrunc_core::geometry::{Cone, Fan, Space, SupportVector};
use polytrunc_core::rational::{parse_rat, vec_i, Rat, Vector};
use polytrunc_core::truncation::{parse_expr, Expr, KFamily};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// First line of every scenario file.
pub const HEADER: &str = "# polytrunc-scenario v1";

/// A rational number written as a TOML integer or a string `"p/q"` / `"1.25"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    pub fn to_rat(&self) -> Result<Rat, String> {
        match self {
            Num::Int(i) => Ok(Rat::from_integer((*i).into())),
            Num::Text(s) => parse_rat(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub space: SpaceSpec,
    pub fan: FanSpec,
    #[serde(default)]
    pub supports: BTreeMap<String, Vec<Num>>,
    #[serde(default)]
    pub k: KSpec,
    #[serde(default, rename = "task", skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<Task>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub dim: usize,
    /// Gram matrix of the inner product (Euclidean when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_product: Option<Vec<Vec<Num>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanSpec {
    /// Maximal cones, each given by the integer matrix of its rays.
    pub cones: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KSpec {
    /// Expression used for every cone without an override.
    pub default: String,
    #[serde(default, rename = "cone", skip_serializing_if = "Vec::is_empty")]
    pub cones: Vec<KOverride>,
}

impl Default for KSpec {
    fn default() -> Self {
        KSpec { default: "1".into(), cones: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KOverride {
    /// The rays of the cone (`[]` for the zero cone).
    pub rays: Vec<Vec<i64>>,
    pub expr: String,
}

/// A task; `name` defaults to `<kind>-<position>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Task {
    Validate(ValidateTask),
    Decompose(DecomposeTask),
    Truncate(TruncateTask),
    Integrate(IntegrateTask),
    LatticeSum(LatticeSumTask),
    Fit(FitTask),
    Langlands(LanglandsTask),
    PartitionCheck(PartitionTask),
    IdentityCheck(IdentityTask),
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Validate(_) => "validate",
            Task::Decompose(_) => "decompose",
            Task::Truncate(_) => "truncate",
            Task::Integrate(_) => "integrate",
            Task::LatticeSum(_) => "lattice-sum",
            Task::Fit(_) => "fit",
            Task::Langlands(_) => "langlands",
            Task::PartitionCheck(_) => "partition-check",
            Task::IdentityCheck(_) => "identity-check",
        }
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Task::Validate(t) => t.name.as_deref(),
            Task::Decompose(t) => t.name.as_deref(),
            Task::Truncate(t) => t.name.as_deref(),
            Task::Integrate(t) => t.name.as_deref(),
            Task::LatticeSum(t) => t.name.as_deref(),
            Task::Fit(t) => t.name.as_deref(),
            Task::Langlands(t) => t.name.as_deref(),
            Task::PartitionCheck(t) => t.name.as_deref(),
            Task::IdentityCheck(t) => t.name.as_deref(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Task::Decompose(t) => t.seed,
            Task::Truncate(t) => t.seed,
            Task::Integrate(t) => t.seed,
            Task::Langlands(t) => t.seed,
            Task::PartitionCheck(t) => t.seed,
            _ => None,
        }
    }

    /// Support vectors the task refers to by name.
    fn supports(&self) -> Vec<&str> {
        fn one(s: &Option<String>) -> Vec<&str> {
            s.as_deref().into_iter().collect()
        }
        match self {
            Task::Validate(_) => vec![],
            Task::Decompose(t) => {
                let mut v = vec![t.support.as_str()];
                v.extend(t.minus.as_deref());
                v
            }
            Task::Truncate(t) => vec![t.support.as_str()],
            Task::Integrate(t) => one(&t.support),
            Task::LatticeSum(t) => one(&t.support),
            Task::Fit(t) => one(&t.support),
            Task::Langlands(t) => one(&t.support),
            Task::PartitionCheck(t) => vec![t.support.as_str()],
            Task::IdentityCheck(t) => vec![t.support.as_str()],
        }
    }
}

/// Report the fan, the supports and the convergence certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateTask {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_acute: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_certified: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BrianchonGram,
    LawrenceVarchenko,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionSpec {
    Inward,
    Outward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSpec {
    Exact,
    Sampled,
}

/// Check a polyhedral decomposition against the characteristic function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeTask {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub support: String,
    /// With `lawrence-varchenko`: compare against the virtual polytope
    /// `support − minus` instead of `1_Δ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus: Option<String>,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionSpec>,
    /// Explicit directions ξ for Lawrence-Varchenko.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub xi: Vec<Vec<Num>>,
    /// Number of additional random generic directions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_xi: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Tabulate `k_Δ` and check `k_Δ = K₀` on `Δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncateTask {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub support: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<Num>>,
    /// Random rational points in `[−radius, radius]ⁿ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Where a numeric task evaluates: one support, a tensor grid of support
/// numbers, or the dilations `tΔ`, `t = 1..dilations`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateTask {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<String>,
    /// One list of values per ray; infeasible combinations are skipped.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilations: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Closed form in the support numbers `a0, a1, …`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    /// On a failed certificate, probe `∫_{[−2^j,2^j]ⁿ} |k_Δ|` for `j` in this range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSumTask {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilations: Option<i64>,
    /// Sum over `shift + ℤⁿ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Integral,
    LatticeSum,
    Volume,
}

/// Fit a quantity as a polynomial in the support numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitTask {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<String>,
    pub quantity: Quantity,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<Vec<Num>>,
    /// Fit in the dilation factor `t` over `tΔ`, `t = 1..dilations`, instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilations: Option<i64>,
    pub degree: usize,
    /// Every `holdout_every`-th grid point is held out (0: none).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holdout_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coef_tol: Option<f64>,
    /// Fit over ℚ (constant K, lattice-sum or volume only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
}

/// Verify the Langlands lemma on cones (the maximal cones of the fan by
/// default), and the Γ inversion on a support when given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanglandsTask {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cones: Vec<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Pass,
    Fail,
}

/// Sample the double partition of the outward tangent cones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionTask {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub support: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Whether the partition is expected to hold (default: pass).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
}

/// Compare `J` with its expansion through quotient fans.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityTask {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub support: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_relative: Option<f64>,
}

/// A parse error with a 1-based position.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at line {}, column {}: {}", self.line, self.column, self.message)
    }
}

/// A validation failure naming the offending item.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationError {
    pub item: String,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "validation failed for {}: {}", self.item, self.message)
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parse a scenario document (header line included).
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let first = text.lines().next().unwrap_or("");
    if first.trim_end() != HEADER {
        return Err(ParseError { line: 1, column: 1, message: format!("expected header line {HEADER:?}") });
    }
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| position(text, s.start));
        ParseError { line, column, message: e.message().to_string() }
    })
}

/// Serialize a scenario back to its file format.
pub fn to_text(s: &Scenario) -> String {
    let body = toml::to_string(s).expect("scenarios serialize");
    format!("{HEADER}\n{body}")
}

/// A scenario with every name resolved and every object built.
pub struct Model {
    pub scenario: Scenario,
    pub fan: Arc<Fan>,
    pub family: KFamily,
    pub supports: BTreeMap<String, SupportVector>,
    /// Task names, defaulted and checked for uniqueness.
    pub task_names: Vec<String>,
}

fn invalid(item: impl Into<String>, message: impl fmt::Display) -> ValidationError {
    ValidationError { item: item.into(), message: message.to_string() }
}

fn rats(item: &str, v: &[Num]) -> Result<Vector, ValidationError> {
    v.iter().map(|x| x.to_rat().map_err(|e| invalid(item, e))).collect()
}

/// Index of the fan ray pointing along `v`.
pub fn ray_index(fan: &Fan, v: &[i64]) -> Option<usize> {
    let p = polytrunc_core::rational::primitive(&vec_i(v));
    fan.rays.iter().position(|r| *r == p)
}

/// Cone of `fan` spanned by the given ray vectors.
pub fn cone_by_rays(fan: &Fan, rays: &[Vec<i64>]) -> Option<usize> {
    let mut idx = rays.iter().map(|r| ray_index(fan, r)).collect::<Option<Vec<_>>>()?;
    idx.sort_unstable();
    fan.cone_index(&idx)
}

/// Names of the support numbers: `a0, a1, …`.
pub fn support_vars(num_rays: usize) -> Vec<String> {
    (0..num_rays).map(|i| format!("a{i}")).collect()
}

/// Parse an expression whose variables are `vars` (e.g. the support numbers
/// `a0, a1, …` or the dilation factor `t`).
pub fn parse_vars_expr(text: &str, vars: &[String]) -> Result<Expr, String> {
    let mut out = String::new();
    let mut rest = text;
    while let Some(c) = rest.chars().next() {
        if c.is_ascii_alphabetic() || c == '_' {
            let end = rest.find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_')).unwrap_or(rest.len());
            let ident = &rest[..end];
            match vars.iter().position(|v| v == ident) {
                Some(i) => out.push_str(&format!("x{}", i + 1)),
                None if matches!(ident, "exp" | "abs") => out.push_str(ident),
                None => return Err(format!("unknown variable {ident:?} (expected one of {})", vars.join(", "))),
            }
            rest = &rest[end..];
        } else {
            out.push(c);
            rest = &rest[c.len_utf8()..];
        }
    }
    parse_expr(&out, vars.len()).map_err(|e| e.to_string())
}

fn check_grid(item: &str, grid: &[Vec<Num>], num_rays: usize) -> Result<(), ValidationError> {
    if !grid.is_empty() && grid.len() != num_rays {
        return Err(invalid(item, format!("grid needs one value list per ray ({num_rays}), got {}", grid.len())));
    }
    for g in grid {
        rats(item, g)?;
    }
    Ok(())
}

/// Resolve names and build the fan, supports and K family.
pub fn validate(s: Scenario) -> Result<Model, ValidationError> {
    let n = s.space.dim;
    if n == 0 {
        return Err(invalid("space.dim", "dimension must be positive"));
    }
    let space = match &s.space.inner_product {
        None => Space::euclidean(n),
        Some(rows) => {
            let m = rows.iter().map(|r| rats("space.inner_product", r)).collect::<Result<Vec<_>, _>>()?;
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                return Err(invalid("space.inner_product", format!("expected a {n}x{n} matrix")));
            }
            Space::with_inner_product(m).map_err(|e| invalid("space.inner_product", e))?
        }
    };
    let mut cones = Vec::new();
    for (i, c) in s.fan.cones.iter().enumerate() {
        let item = format!("fan.cones[{i}]");
        if c.iter().any(|r| r.len() != n) {
            return Err(invalid(item, format!("rays must have {n} coordinates")));
        }
        cones.push(Cone::new(c.iter().map(|r| vec_i(r)).collect(), &space).map_err(|e| invalid(item, e))?);
    }
    let fan = Fan::from_cones(space, &cones).map_err(|e| invalid("fan", e))?;
    if !fan.complete {
        return Err(invalid("fan", "fan is not complete"));
    }
    let fan = Arc::new(fan);
    let k = fan.num_rays();
    let mut overrides = Vec::new();
    for (i, o) in s.k.cones.iter().enumerate() {
        let item = format!("k.cone[{i}]");
        let c = cone_by_rays(&fan, &o.rays).ok_or_else(|| invalid(&item, "rays do not span a cone of the fan"))?;
        overrides.push((fan.cones[c].rays.clone(), o.expr.clone()));
    }
    let family = KFamily::parse(fan.clone(), &s.k.default, &overrides).map_err(|e| invalid("k", e))?;
    let mut supports = BTreeMap::new();
    for (name, a) in &s.supports {
        let item = format!("supports.{name}");
        let v = rats(&item, a)?;
        if v.len() != k {
            return Err(invalid(item, format!("expected {k} support numbers, got {}", v.len())));
        }
        supports.insert(name.clone(), SupportVector::new(fan.clone(), v).map_err(|e| invalid(&item, e))?);
    }
    let mut task_names = Vec::new();
    for (i, t) in s.tasks.iter().enumerate() {
        let name = t.name().map_or_else(|| format!("{}-{}", t.kind(), i + 1), str::to_string);
        let item = format!("task {name}");
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(invalid(item, "names use letters, digits, '-' and '_'"));
        }
        if task_names.contains(&name) {
            return Err(invalid(item, "duplicate task name"));
        }
        for sup in t.supports() {
            if !supports.contains_key(sup) {
                return Err(invalid(&item, format!("unknown support {sup:?}")));
            }
        }
        let needs_support = match t {
            Task::Integrate(x) => x.support.is_none() && x.grid.is_empty(),
            Task::LatticeSum(x) => x.support.is_none() && x.grid.is_empty(),
            _ => false,
        };
        if needs_support {
            return Err(invalid(&item, "give a support or a grid"));
        }
        let expected = match t {
            Task::Integrate(x) => {
                check_grid(&item, &x.grid, k)?;
                if x.dilations.is_some() && x.support.is_none() {
                    return Err(invalid(&item, "dilations need a support"));
                }
                x.expected.as_deref()
            }
            Task::LatticeSum(x) => {
                check_grid(&item, &x.grid, k)?;
                if x.dilations.is_some() && x.support.is_none() {
                    return Err(invalid(&item, "dilations need a support"));
                }
                if let Some(sh) = &x.shift {
                    if rats(&item, sh)?.len() != n {
                        return Err(invalid(&item, format!("shift needs {n} coordinates")));
                    }
                }
                x.expected.as_deref()
            }
            Task::Fit(x) => {
                check_grid(&item, &x.grid, k)?;
                match (x.grid.is_empty(), x.dilations) {
                    (false, None) => {}
                    (true, Some(_)) if x.support.is_some() => {}
                    _ => return Err(invalid(&item, "fit needs either a grid or a support with dilations")),
                }
                if let Some(e) = &x.expected {
                    let vars = if x.dilations.is_some() { vec!["t".to_string()] } else { support_vars(k) };
                    parse_vars_expr(e, &vars).map_err(|m| invalid(&item, format!("expected: {m}")))?;
                }
                None
            }
            Task::Decompose(x) => {
                for xi in &x.xi {
                    if rats(&item, xi)?.len() != n {
                        return Err(invalid(&item, format!("xi needs {n} coordinates")));
                    }
                }
                None
            }
            Task::Truncate(x) => {
                for p in &x.points {
                    if rats(&item, p)?.len() != n {
                        return Err(invalid(&item, format!("points need {n} coordinates")));
                    }
                }
                None
            }
            Task::Langlands(x) => {
                for c in &x.cones {
                    if c.iter().any(|r| r.len() != n) {
                        return Err(invalid(&item, format!("cone rays need {n} coordinates")));
                    }
                }
                None
            }
            _ => None,
        };
        if let Some(e) = expected {
            parse_vars_expr(e, &support_vars(k)).map_err(|m| invalid(&item, format!("expected: {m}")))?;
        }
        task_names.push(name);
    }
    Ok(Model { scenario: s, fan, family, supports, task_names })
}

/// Rational grid values per ray (already validated).
pub fn grid_values(grid: &[Vec<Num>]) -> Vec<Vec<Rat>> {
    grid.iter().map(|g| g.iter().map(|x| x.to_rat().expect("validated")).collect()).collect()
}

/// Rational vector (already validated).
pub fn rat_vec(v: &[Num]) -> Vector {
    v.iter().map(|x| x.to_rat().expect("validated")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"# polytrunc-scenario v1
name = "t"

[space]
dim = 1

[fan]
cones = [[[1]], [[-1]]]

[supports]
delta = [-2, "1/2"]

[k]
default = "1"

[[k.cone]]
rays = []
expr = "1 + exp(-abs(x1))"

[[task]]
kind = "integrate"
support = "delta"
expected = "2 - a0 - a1"
"#;

    #[test]
    fn round_trip_is_lossless() {
        let s = parse_scenario(SMALL).unwrap();
        let again = parse_scenario(&to_text(&s)).unwrap();
        assert_eq!(s, again);
        validate(s).unwrap();
    }

    #[test]
    fn header_is_required() {
        let e = parse_scenario("name = \"t\"\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
    }

    #[test]
    fn unknown_fields_are_rejected_with_position() {
        let text = SMALL.replace("expected =", "expectd =");
        let e = parse_scenario(&text).unwrap_err();
        assert!(e.message.contains("expectd"), "{e}");
        assert!(e.line > 1);
        let text = SMALL.replace("dim = 1", "dim = 1\ncolour = 3");
        let e = parse_scenario(&text).unwrap_err();
        assert_eq!((e.line, e.column), (6, 1), "{e}");
    }

    #[test]
    fn unknown_support_is_named() {
        let text = SMALL.replace("support = \"delta\"", "support = \"omega\"");
        let e = validate(parse_scenario(&text).unwrap()).err().unwrap();
        assert!(e.message.contains("omega"), "{e}");
    }

    #[test]
    fn support_expressions() {
        let v = support_vars(2);
        let e = parse_vars_expr("2 - a0 - a1", &v).unwrap();
        assert_eq!(e.eval(&[-3.0, 1.0]), 4.0);
        assert!(parse_vars_expr("a2", &v).is_err());
        assert!(parse_vars_expr("exp(-abs(a1))", &v).is_ok());
        let t = parse_vars_expr("1 + 2*t + t*t", &["t".to_string()]).unwrap();
        assert_eq!(t.eval(&[3.0]), 16.0);
    }
}
