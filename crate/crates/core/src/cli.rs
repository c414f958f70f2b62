//! Command-line front end: expansion dumps, identity checks, pipeline
//! derivations and theorem verification, emitted as text or as a JSON
//! report document `{version, config, results: [{name, kind, data, status}]}`.
//!
//! Exit status: 0 when every requested tier-1 check passes and every printed
//! statement matches, 2 when tier 1 passes but some printed statement does
//! not, 1 on any error or tier-1 failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bundles::{
    lambda_st_product_check, theta_product_expand, BundleExpr, Geometry, ThetaLabel,
    ThetaProductSpec,
};
use crate::error::{Error, Result};
use crate::formring::Form;
use crate::modforms::{
    eisenstein_e2, modform, theta_const, theta_prime_normalized, ModFormId, RSeries,
};
use crate::qseries::{exponent_label, half, whole, QSeries, EIGHTHS};
use crate::rational::{self, frac, int, Rational};
use crate::verifier::{
    default_grid, derive_identity_at, solve_basis, verify_all, verify_theorem, PipelineId,
    TheoremId, TheoremParams, VerificationReport, VerifyOptions,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Default q-order in whole powers of `q`.
pub const DEFAULT_Q_ORDER: u32 = 5;
/// Smallest q-order that still reaches the `q^2` residual checks.
pub const MIN_Q_ORDER: u32 = 3;
/// Forms with more terms than this are summarized by term count in text output.
const TEXT_FORM_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Per-theorem parameter lists.
pub type GridConfig = BTreeMap<TheoremId, Vec<TheoremParams>>;

/// Settings shared by every command; read from `--config` and overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Exact below `q^{q_order}`.
    #[serde(default = "default_q_order")]
    pub q_order: u32,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_grid_config")]
    pub grid: GridConfig,
}

fn default_q_order() -> u32 {
    DEFAULT_Q_ORDER
}

/// The library's default grid, grouped by theorem.
pub fn default_grid_config() -> GridConfig {
    let mut out = GridConfig::new();
    for (t, p) in default_grid() {
        out.entry(t).or_default().push(p);
    }
    out
}

impl Default for Config {
    fn default() -> Self {
        Config {
            q_order: DEFAULT_Q_ORDER,
            format: Format::Text,
            output: None,
            grid: default_grid_config(),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameters(format!("config: {e}")))
    }

    /// q-order in eighths.
    pub fn order_eighths(&self) -> i64 {
        whole(self.q_order as i64)
    }

    fn validate(&self) -> Result<()> {
        if self.q_order < MIN_Q_ORDER {
            return Err(Error::InvalidParameters(format!(
                "q-order must be at least {MIN_Q_ORDER} to reach the q^2 residual checks, got {}",
                self.q_order
            )));
        }
        Ok(())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "modcancel",
    version,
    about = "Exact level-2 modular forms and anomaly cancellation checks"
)]
pub struct Cli {
    /// q-order in whole powers of q (default 5, minimum 3)
    #[arg(long, global = true)]
    pub order: Option<u32>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the document here instead of standard output
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// JSON config file with q_order, format, output and grid
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Include wall-clock timings (makes output run-dependent)
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dump q-expansions
    #[command(subcommand)]
    Expand(ExpandCommand),
    /// Run an exact identity check
    #[command(subcommand)]
    Check(CheckCommand),
    /// Solve a pipeline in the modular basis and derive its identity
    Derive(DeriveArgs),
    /// Verify printed theorems
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
pub enum ExpandCommand {
    /// Theta constants theta_1..theta_3 and theta'/pi
    Theta {
        #[arg(long)]
        index: Option<u8>,
    },
    /// delta_i / epsilon_i
    Modform {
        /// e.g. delta2, epsilon3; all six when omitted
        #[arg(long)]
        id: Option<String>,
    },
    /// The weight-2 Eisenstein series
    E2,
    /// Chern character of an infinite Lambda/S product
    ThetaProduct(ProductArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelArg {
    Trivial,
    Xi,
    Twisted,
    Powers,
    PowersEta,
}

#[derive(Args, Debug)]
pub struct ProductArgs {
    #[arg(long, value_enum)]
    pub label: LabelArg,
    /// Manifold dimension
    #[arg(long)]
    pub dim: u32,
    #[arg(long)]
    pub m0: Option<u32>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Vec<i64>,
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    /// theta'/pi = theta_1 theta_2 theta_3
    Jacobi,
    /// Printed Fourier coefficients of delta_i, epsilon_i and E_2
    FourierTables,
    /// tau -> tau + 1 sends delta_2, epsilon_2 to delta_3, epsilon_3
    Tshift,
    /// S_t(E) Lambda_{-t}(E) = 1 through t^4 for every declared generator
    LambdaS {
        #[arg(long, default_value_t = 8)]
        dim: u32,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PipelineArg {
    P2,
    P2prime,
    P2tilde,
    Q2,
    Q2bar,
}

#[derive(Args, Debug)]
pub struct DeriveArgs {
    #[arg(long, value_enum)]
    pub pipeline: PipelineArg,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long)]
    pub m0: Option<u32>,
    /// Weight of the twisted pipeline is 2*m1
    #[arg(long)]
    pub m1: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Vec<i64>,
    /// Relation exponent in powers of q, e.g. 1 or 3/2; first past the pivots by default
    #[arg(long)]
    pub relation: Option<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// 3.1 .. 3.7, 4.1 .. 4.4 or agw
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    pub theorem: Option<String>,
    /// Every theorem over the configured grid
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub m0: Option<u32>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Vec<i64>,
}

/// One named result of a command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub name: String,
    pub kind: String,
    pub data: Value,
    pub status: String,
    #[serde(skip)]
    pub text: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub config: Value,
    pub results: Vec<ResultEntry>,
}

impl ReportDocument {
    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.results {
            let _ = writeln!(s, "[{}] {} ({})", r.status, r.name, r.kind);
            for line in &r.text {
                let _ = writeln!(s, "  {line}");
            }
        }
        let _ = writeln!(s, "{}", summary_line(&self.results));
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
        }
    }

    /// 1 on any error or failure, else 2 on any printed mismatch, else 0.
    pub fn exit_code(&self) -> i32 {
        if self
            .results
            .iter()
            .any(|r| r.status == "fail" || r.status == "error")
        {
            1
        } else if self.results.iter().any(|r| r.status == "printed-mismatch") {
            2
        } else {
            0
        }
    }
}

fn summary_line(results: &[ResultEntry]) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in results {
        *counts.entry(r.status.as_str()).or_default() += 1;
    }
    let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    format!("{} results ({})", results.len(), parts.join(", "))
}

/// The outcome of one invocation, before anything is written.
#[derive(Clone, Debug)]
pub struct Invocation {
    pub document: ReportDocument,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Invocation {
    pub fn rendered(&self) -> String {
        self.document.render(self.format)
    }

    pub fn exit_code(&self) -> i32 {
        self.document.exit_code()
    }
}

/// Parse arguments and run the command without touching standard streams.
/// Command-line parse errors are returned as `Err` with clap's message.
pub fn invoke<I, T>(args: I) -> std::result::Result<Invocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    Ok(execute(&cli))
}

/// Run a parsed command line.
pub fn execute(cli: &Cli) -> Invocation {
    let (config, config_error) = match resolve_config(cli) {
        Ok(c) => (c, None),
        Err(e) => (Config::default(), Some(e)),
    };
    let format = config.format;
    let output = config.output.clone();
    let echo = config_echo(cli, &config);
    let results = match config_error {
        Some(e) => vec![error_entry(&command_name(&cli.command), &e)],
        None => run_command(cli, &config),
    };
    Invocation {
        document: ReportDocument {
            version: VERSION.to_string(),
            config: echo,
            results,
        },
        format,
        output,
    }
}

/// Full CLI behavior: parse, run, write the document, return the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let inv = match invoke(args) {
        Ok(inv) => inv,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let text = inv.rendered();
    for r in inv.document.results.iter().filter(|r| r.status == "error") {
        if let Some(msg) = r.data.get("error").and_then(Value::as_str) {
            eprintln!("error: {}: {msg}", r.name);
        }
    }
    match &inv.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{text}"),
    }
    inv.exit_code()
}

fn resolve_config(cli: &Cli) -> Result<Config> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidParameters(format!("cannot read config {}: {e}", path.display()))
            })?;
            Config::from_json(&text)?
        }
        None => Config::default(),
    };
    if let Some(o) = cli.order {
        config.q_order = o;
    }
    if let Some(f) = cli.format {
        config.format = f;
    }
    if let Some(p) = &cli.output {
        config.output = Some(p.clone());
    }
    config.validate()?;
    Ok(config)
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Expand(e) => format!(
            "expand {}",
            match e {
                ExpandCommand::Theta { .. } => "theta",
                ExpandCommand::Modform { .. } => "modform",
                ExpandCommand::E2 => "e2",
                ExpandCommand::ThetaProduct(_) => "theta-product",
            }
        ),
        Command::Check(c) => format!(
            "check {}",
            match c {
                CheckCommand::Jacobi => "jacobi",
                CheckCommand::FourierTables => "fourier-tables",
                CheckCommand::Tshift => "tshift",
                CheckCommand::LambdaS { .. } => "lambda-s",
            }
        ),
        Command::Derive(_) => "derive".to_string(),
        Command::Verify(v) if v.all => "verify --all".to_string(),
        Command::Verify(_) => "verify".to_string(),
    }
}

fn config_echo(cli: &Cli, config: &Config) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command_name(&cli.command)));
    m.insert("q_order".into(), json!(config.q_order));
    m.insert("order_eighths".into(), json!(config.order_eighths()));
    m.insert(
        "format".into(),
        serde_json::to_value(config.format).expect("format serializes"),
    );
    if matches!(&cli.command, Command::Verify(v) if v.all) {
        m.insert(
            "grid".into(),
            serde_json::to_value(&config.grid).expect("grid serializes"),
        );
    }
    Value::Object(m)
}

fn error_entry(name: &str, e: &Error) -> ResultEntry {
    ResultEntry {
        name: name.to_string(),
        kind: "error".into(),
        data: json!({ "error": e.to_string() }),
        status: "error".into(),
        text: vec![format!("error: {e}")],
    }
}

fn run_command(cli: &Cli, config: &Config) -> Vec<ResultEntry> {
    let order = config.order_eighths();
    let name = command_name(&cli.command);
    let out = match &cli.command {
        Command::Expand(e) => expand(e, order),
        Command::Check(c) => check(c, order),
        Command::Derive(d) => derive(d, order).map(|r| vec![r]),
        Command::Verify(v) => verify(v, config, cli.timing),
    };
    out.unwrap_or_else(|e| vec![error_entry(&name, &e)])
}

// ---- encodings ----

/// Which sublattice of the eighth-integers an exponent sits on.
pub fn lattice(e: i64) -> &'static str {
    if e % EIGHTHS == 0 {
        "integer"
    } else if e % 4 == 0 {
        "half-integer"
    } else if e % 2 == 0 {
        "quarter-integer"
    } else {
        "eighth-integer"
    }
}

fn exponent_json(e: i64) -> Value {
    json!({ "eighths": e, "label": exponent_label(e), "lattice": lattice(e) })
}

fn rational_json(r: &Rational) -> Value {
    Value::String(rational::render(r))
}

fn rationals_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_json).collect())
}

/// A form as `{monomial: "p/q"}`.
pub fn form_json(f: &Form) -> Value {
    let m: serde_json::Map<String, Value> = f
        .terms()
        .map(|(mono, c)| (mono.display(f.ring()), rational_json(c)))
        .collect();
    Value::Object(m)
}

fn form_text(f: &Form) -> String {
    if f.len() > TEXT_FORM_LIMIT {
        format!("<{} terms>", f.len())
    } else {
        f.display()
    }
}

fn rseries_json(s: &RSeries) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .map(|(e, c)| json!({ "exponent": exponent_json(e), "coefficient": rational_json(c) }))
        .collect();
    json!({ "order_eighths": s.order(), "terms": terms })
}

fn rseries_text(s: &RSeries) -> String {
    let parts: Vec<String> = s
        .terms()
        .map(|(e, c)| format!("{}: {}", exponent_label(e), c))
        .collect();
    if parts.is_empty() {
        format!("0 (exact below {})", exponent_label(s.order()))
    } else {
        format!(
            "{} (exact below {})",
            parts.join(", "),
            exponent_label(s.order())
        )
    }
}

fn fseries_json(s: &QSeries<Form>) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .map(|(e, c)| json!({ "exponent": exponent_json(e), "coefficient": form_json(c) }))
        .collect();
    json!({ "order_eighths": s.order(), "terms": terms })
}

fn series_entry(name: String, s: &RSeries) -> ResultEntry {
    ResultEntry {
        name,
        kind: "expansion".into(),
        data: rseries_json(s),
        status: "ok".into(),
        text: vec![rseries_text(s)],
    }
}

fn check_entry(name: &str, pass: bool, data: Value, text: Vec<String>) -> ResultEntry {
    ResultEntry {
        name: name.to_string(),
        kind: "check".into(),
        data,
        status: if pass { "pass" } else { "fail" }.into(),
        text,
    }
}

// ---- expand ----

fn expand(cmd: &ExpandCommand, order: i64) -> Result<Vec<ResultEntry>> {
    match cmd {
        ExpandCommand::Theta { index } => {
            let indices: Vec<u8> = match index {
                Some(j) => vec![*j],
                None => vec![1, 2, 3],
            };
            let mut out = Vec::new();
            for j in indices {
                out.push(series_entry(format!("theta{j}"), &theta_const(j, order)?));
            }
            if index.is_none() {
                out.push(series_entry(
                    "theta-prime/pi".into(),
                    &theta_prime_normalized(order)?,
                ));
            }
            Ok(out)
        }
        ExpandCommand::Modform { id } => {
            let ids = match id {
                Some(s) => vec![s.parse::<ModFormId>()?],
                None => ModFormId::all(),
            };
            ids.into_iter()
                .map(|id| Ok(series_entry(id.to_string(), &modform(id, order)?)))
                .collect()
        }
        ExpandCommand::E2 => Ok(vec![series_entry("E2".into(), &eisenstein_e2(order))]),
        ExpandCommand::ThetaProduct(p) => {
            let label = product_label(p)?;
            let g = label_geometry(&label, p.dim)?;
            let spec = ThetaProductSpec::new(label.clone())?;
            let s = theta_product_expand(&spec, &g, order)?;
            let mut text: Vec<String> =
                spec.factors.iter().map(|f| format!("factor {f}")).collect();
            text.extend(
                s.terms()
                    .map(|(e, c)| format!("{}: {}", exponent_label(e), form_text(c))),
            );
            let factors: Vec<Value> = spec.factors.iter().map(|f| json!(f.to_string())).collect();
            Ok(vec![ResultEntry {
                name: format!("{label} dim {}", p.dim),
                kind: "form-expansion".into(),
                data: json!({ "label": label.to_string(), "dimension": p.dim, "factors": factors, "series": fseries_json(&s) }),
                status: "ok".into(),
                text,
            }])
        }
    }
}

fn product_label(p: &ProductArgs) -> Result<ThetaLabel> {
    let single = |v: &[i64], n: &str| match v {
        [x] => Ok(*x),
        _ => Err(Error::InvalidParameters(format!(
            "powers-eta needs a single integer --{n}"
        ))),
    };
    Ok(match p.label {
        LabelArg::Trivial => ThetaLabel::Trivial,
        LabelArg::Xi => ThetaLabel::Xi,
        LabelArg::Twisted => ThetaLabel::Twisted {
            m0: p
                .m0
                .ok_or_else(|| Error::InvalidParameters("twisted needs --m0".into()))?,
        },
        LabelArg::Powers => ThetaLabel::Powers {
            a: p.a.clone(),
            b: p.b.clone(),
        },
        LabelArg::PowersEta => ThetaLabel::PowersEta {
            a: single(&p.a, "a")?,
            b: single(&p.b, "b")?,
        },
    })
}

/// The geometry declaring every generator a label refers to.
pub fn label_geometry(label: &ThetaLabel, dim: u32) -> Result<Geometry> {
    match label {
        ThetaLabel::Trivial | ThetaLabel::Xi | ThetaLabel::Twisted { .. } => {
            Geometry::with_plane(dim, false)
        }
        ThetaLabel::Powers { a, b } => {
            let mut ms: Vec<i64> = a.iter().chain(b).copied().collect();
            ms.sort_unstable();
            ms.dedup();
            Geometry::with_powers(dim, &ms)
        }
        ThetaLabel::PowersEta { a, b } => {
            let mut ms = vec![*a, *b];
            ms.sort_unstable();
            ms.dedup();
            Geometry::with_powers_and_eta(dim, &ms, true)
        }
    }
}

// ---- check ----

/// Printed low-order Fourier coefficients: `(series, exponent in eighths, value)`.
pub fn printed_fourier_table() -> Vec<(&'static str, i64, Rational)> {
    vec![
        ("delta1", 0, frac(1, 4)),
        ("delta1", half(1), int(0)),
        ("delta1", whole(1), int(6)),
        ("epsilon1", 0, frac(1, 16)),
        ("epsilon1", half(1), int(0)),
        ("epsilon1", whole(1), int(-1)),
        ("delta2", 0, frac(-1, 8)),
        ("delta2", half(1), int(-3)),
        ("epsilon2", 0, int(0)),
        ("epsilon2", half(1), int(1)),
        ("delta3", 0, frac(-1, 8)),
        ("delta3", half(1), int(3)),
        ("epsilon3", 0, int(0)),
        ("epsilon3", half(1), int(-1)),
        ("8delta2", 0, int(-1)),
        ("8delta2", half(1), int(-24)),
        ("8delta2", whole(1), int(-24)),
        ("epsilon2", whole(1), int(8)),
        ("E2", 0, int(1)),
        ("E2", whole(1), int(-24)),
        ("E2", whole(2), int(-72)),
    ]
}

fn table_series(name: &str, order: i64) -> Result<RSeries> {
    match name {
        "E2" => Ok(eisenstein_e2(order)),
        "8delta2" => Ok(modform("delta2".parse()?, order)?.scale(&int(8))),
        other => modform(other.parse()?, order),
    }
}

fn check(cmd: &CheckCommand, order: i64) -> Result<Vec<ResultEntry>> {
    match cmd {
        CheckCommand::Jacobi => {
            let lhs = theta_prime_normalized(order)?;
            let rhs = theta_const(1, order)?
                .mul(&theta_const(2, order)?)?
                .mul(&theta_const(3, order)?)?;
            let diff = lhs.sub(&rhs)?;
            let first = diff.terms().next().map(
                |(e, c)| json!({ "exponent": exponent_json(e), "difference": rational_json(c) }),
            );
            let pass = diff.is_zero();
            let text = vec![format!(
                "theta'/pi - theta1 theta2 theta3 = {} below {} ({} nonzero terms compared)",
                if pass { "0" } else { "nonzero" },
                exponent_label(order),
                lhs.terms().count()
            )];
            Ok(vec![check_entry(
                "jacobi",
                pass,
                json!({ "order_eighths": order, "terms_compared": lhs.terms().count(), "first_difference": first }),
                text,
            )])
        }
        CheckCommand::FourierTables => {
            let need = whole(2) + 1;
            let order = order.max(need);
            let mut cache: BTreeMap<&str, RSeries> = BTreeMap::new();
            let mut rows = Vec::new();
            let mut text = Vec::new();
            let mut pass = true;
            for (name, e, printed) in printed_fourier_table() {
                if !cache.contains_key(name) {
                    cache.insert(name, table_series(name, order)?);
                }
                let computed = cache[name].coefficient(e)?;
                let ok = computed == printed;
                pass &= ok;
                text.push(format!(
                    "{name} {}: computed {computed}, printed {printed}{}",
                    exponent_label(e),
                    if ok { "" } else { "  MISMATCH" }
                ));
                rows.push(json!({
                    "series": name,
                    "exponent": exponent_json(e),
                    "computed": rational_json(&computed),
                    "printed": rational_json(&printed),
                    "matches": ok,
                }));
            }
            Ok(vec![check_entry(
                "fourier-tables",
                pass,
                json!({ "rows": rows }),
                text,
            )])
        }
        CheckCommand::Tshift => {
            let mut out = Vec::new();
            for (from, to) in [("delta2", "delta3"), ("epsilon2", "epsilon3")] {
                let shifted = modform(from.parse()?, order)?.t_shift()?;
                let target = modform(to.parse()?, order)?;
                let pass = shifted == target;
                out.push(check_entry(
                    &format!("tshift {from} -> {to}"),
                    pass,
                    json!({ "from": from, "to": to, "order_eighths": order, "equal": pass }),
                    vec![format!(
                        "t-shift({from}) {} {to} below {}",
                        if pass { "=" } else { "!=" },
                        exponent_label(order)
                    )],
                ));
            }
            Ok(out)
        }
        CheckCommand::LambdaS { dim } => {
            let geometries = [
                ("tangent", Geometry::tangent(*dim)?),
                ("plane", Geometry::with_plane(*dim, false)?),
                (
                    "powers(1,2,3)",
                    Geometry::with_powers_and_eta(*dim, &[1, 2, 3], true)?,
                ),
            ];
            let mut out = Vec::new();
            for (gname, g) in &geometries {
                let mut rows = Vec::new();
                let mut pass = true;
                let mut text = Vec::new();
                let mut names: Vec<String> = g.generator_names().map(str::to_string).collect();
                names.push("trivial(3)".into());
                for n in &names {
                    let e = if n == "trivial(3)" {
                        BundleExpr::trivial(3)
                    } else {
                        BundleExpr::gen(n)
                    };
                    let ok = lambda_st_product_check(&e, g, 4)?;
                    pass &= ok;
                    text.push(format!(
                        "{n}: {}",
                        if ok {
                            "S_t Lambda_-t = 1 through t^4"
                        } else {
                            "FAILS"
                        }
                    ));
                    rows.push(json!({ "generator": n, "holds": ok }));
                }
                out.push(check_entry(
                    &format!("lambda-s {gname} dim {dim}"),
                    pass,
                    json!({ "geometry": gname, "dimension": dim, "through_t_power": 4, "generators": rows }),
                    text,
                ));
            }
            Ok(out)
        }
    }
}

// ---- derive ----

/// Parse an exponent given in powers of `q` ("1", "3/2", "1/8") into eighths.
pub fn parse_q_exponent(s: &str) -> Result<i64> {
    let r = rational::parse(s)
        .ok_or_else(|| Error::InvalidParameters(format!("bad q exponent `{s}`")))?;
    let e = &r * int(EIGHTHS);
    if !e.is_integer() {
        return Err(Error::InvalidParameters(format!(
            "q exponent `{s}` is not a multiple of 1/8"
        )));
    }
    rational::to_i64(&e)
        .ok_or_else(|| Error::InvalidParameters(format!("q exponent `{s}` out of range")))
}

fn pipeline_from_args(d: &DeriveArgs) -> Result<PipelineId> {
    let need = |v: Option<u32>, n: &str| {
        v.ok_or_else(|| Error::InvalidParameters(format!("this pipeline needs --{n}")))
    };
    let single = |v: &[i64], n: &str| match v {
        [x] => Ok(*x),
        _ => Err(Error::InvalidParameters(format!(
            "q2bar needs a single integer --{n}"
        ))),
    };
    let id = match d.pipeline {
        PipelineArg::P2 => PipelineId::P2 { k: d.k },
        PipelineArg::P2prime => PipelineId::P2Prime { k: d.k },
        PipelineArg::P2tilde => {
            let m0 = need(d.m0, "m0")?;
            match (d.m1, d.d) {
                (Some(m1), _) => PipelineId::tilde(m0, m1),
                (None, Some(dd)) => {
                    if m0 % 2 != dd % 2 {
                        return Err(Error::InvalidParameters(format!(
                            "m0 = 2n + (1 - (-1)^d)/2 needs m0 and d of equal parity (m0 = {m0}, d = {dd})"
                        )));
                    }
                    PipelineId::P2Tilde { n: m0 / 2, d: dd }
                }
                (None, None) => {
                    return Err(Error::InvalidParameters("p2tilde needs --m1 or --d".into()))
                }
            }
        }
        PipelineArg::Q2 => PipelineId::Q2 {
            d: need(d.d, "d")?,
            a: d.a.clone(),
            b: d.b.clone(),
        },
        PipelineArg::Q2bar => PipelineId::Q2Bar {
            d: need(d.d, "d")?,
            a: single(&d.a, "a")?,
            b: single(&d.b, "b")?,
        },
    };
    id.validate()?;
    Ok(id)
}

fn derive(d: &DeriveArgs, order: i64) -> Result<ResultEntry> {
    let id = pipeline_from_args(d)?;
    let basis_len = (id.weight() / 4 + 1) as i64;
    let relation = match &d.relation {
        Some(s) => parse_q_exponent(s)?,
        None => half(basis_len),
    };
    let order = order.max(relation + 1);
    let (series, identity) = derive_identity_at(&id, relation, order)?;
    let solve = solve_basis(&series, id.weight())?;
    let pass = identity.holds() && solve.residuals_vanish();
    let mut text = vec![format!(
        "{id}: dimension {}, weight {}",
        id.dim(),
        id.weight()
    )];
    let coefficients: Vec<Value> = solve
        .coefficients
        .iter()
        .map(|(m, h)| {
            text.push(format!("h[{m}] = {}", form_text(h)));
            json!({ "basis": m.to_string(), "pivot": exponent_json(m.pivot()), "h": form_json(h) })
        })
        .collect();
    let residuals: Vec<Value> = solve
        .residuals
        .iter()
        .map(|(e, f)| json!({ "exponent": exponent_json(*e), "vanishes": f.is_zero(), "residual": form_json(f) }))
        .collect();
    text.push(format!(
        "{} residuals past the pivots, {}",
        solve.residuals.len(),
        if solve.residuals_vanish() {
            "all zero"
        } else {
            "NOT all zero"
        }
    ));
    let mu: Vec<String> = identity.multipliers.iter().map(|m| m.to_string()).collect();
    text.push(format!(
        "identity at {}: coefficient = sum of ({}) times the pivot coefficients, {}",
        exponent_label(relation),
        mu.join(", "),
        if identity.holds() { "holds" } else { "FAILS" }
    ));
    Ok(ResultEntry {
        name: format!("derive {id}"),
        kind: "derivation".into(),
        data: json!({
            "pipeline": id.to_string(),
            "dimension": id.dim(),
            "weight": id.weight(),
            "coefficients": coefficients,
            "residuals": residuals,
            "identity": {
                "relation": exponent_json(relation),
                "multipliers": rationals_json(&identity.multipliers),
                "holds": identity.holds(),
                "lhs": form_json(&identity.lhs),
                "rhs": form_json(&identity.rhs),
            },
        }),
        status: if pass { "pass" } else { "fail" }.into(),
        text,
    })
}

// ---- verify ----

fn verify(v: &VerifyArgs, config: &Config, timing: bool) -> Result<Vec<ResultEntry>> {
    let opts = VerifyOptions {
        order: config.order_eighths(),
        spare_variable: false,
    };
    if v.all {
        let grid: Vec<(TheoremId, TheoremParams)> = config
            .grid
            .iter()
            .flat_map(|(t, ps)| ps.iter().map(move |p| (*t, p.clone())))
            .collect();
        return Ok(verify_all(&grid, opts)
            .into_iter()
            .map(|o| match o.result {
                Ok(r) => report_entry(&r, timing),
                Err(e) => error_entry(&entry_name(o.theorem, &o.params), &e),
            })
            .collect());
    }
    let theorem: TheoremId = v.theorem.as_deref().unwrap_or_default().parse()?;
    let params = TheoremParams {
        m0: v.m0,
        a: v.a.clone(),
        b: v.b.clone(),
    };
    Ok(vec![report_entry(
        &verify_theorem(theorem, &params, opts)?,
        timing,
    )])
}

fn entry_name(t: TheoremId, p: &TheoremParams) -> String {
    let ps = p.to_string();
    if ps.is_empty() {
        format!("theorem {t}")
    } else {
        format!("theorem {t} {ps}")
    }
}

fn discrepancy_json(d: &Option<crate::verifier::Discrepancy>) -> Value {
    match d {
        None => Value::Null,
        Some(d) => json!({
            "side": d.side,
            "monomial": d.monomial,
            "computed": rational_json(&d.computed),
            "printed": rational_json(&d.printed),
        }),
    }
}

/// A verification report as a result entry.
pub fn report_entry(r: &VerificationReport, timing: bool) -> ResultEntry {
    let mut text = Vec::new();
    let derived: Vec<String> = r
        .derived_multipliers
        .iter()
        .map(|m| m.to_string())
        .collect();
    let printed: Vec<String> = r
        .printed_multipliers
        .iter()
        .map(|m| m.to_string())
        .collect();
    text.push(format!(
        "dimension {}{}",
        r.dimension,
        r.pipeline
            .as_ref()
            .map(|p| format!(", pipeline {p}"))
            .unwrap_or_default()
    ));
    text.push(format!(
        "tier 1 (derived identity): {} with multipliers ({}); {} residuals checked",
        if r.derived_holds { "holds" } else { "FAILS" },
        derived.join(", "),
        r.residuals_checked
    ));
    text.push(format!(
        "tier 2 (printed statement): {} (printed multipliers ({}))",
        if r.printed_matches {
            "matches"
        } else {
            "DIFFERS"
        },
        printed.join(", ")
    ));
    if let Some(d) = &r.discrepancy {
        text.push(format!(
            "  {} at {}: computed {}, printed {}",
            d.side, d.monomial, d.computed, d.printed
        ));
    }
    text.push(format!("lhs = {}", form_text(&r.lhs)));
    text.push(format!("rhs = {}", form_text(&r.rhs)));
    for c in &r.coefficient_checks {
        if c.matches {
            text.push(format!(
                "coefficient {} at {}: matches",
                c.id,
                exponent_label(c.exponent)
            ));
        } else {
            text.push(format!(
                "coefficient {} at {}: DIFFERS{}",
                c.id,
                exponent_label(c.exponent),
                c.correction
                    .as_ref()
                    .map(|s| format!("; expanded - printed = {s}"))
                    .unwrap_or_default()
            ));
        }
    }
    text.extend(r.notes.iter().map(|n| format!("note: {n}")));
    let checks: Vec<Value> = r
        .coefficient_checks
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "exponent": exponent_json(c.exponent),
                "matches": c.matches,
                "discrepancy": discrepancy_json(&c.discrepancy),
                "correction": c.correction,
            })
        })
        .collect();
    let mut data = json!({
        "theorem": r.theorem.as_str(),
        "params": serde_json::to_value(&r.params).expect("params serialize"),
        "pipeline": r.pipeline,
        "dimension": r.dimension,
        "relation": r.relation.map(exponent_json),
        "residuals_checked": r.residuals_checked,
        "derived_holds": r.derived_holds,
        "derived_multipliers": rationals_json(&r.derived_multipliers),
        "printed_multipliers": rationals_json(&r.printed_multipliers),
        "printed_matches": r.printed_matches,
        "discrepancy": discrepancy_json(&r.discrepancy),
        "lhs": form_json(&r.lhs),
        "rhs": form_json(&r.rhs),
        "coefficient_checks": checks,
        "notes": r.notes,
    });
    if timing {
        data["elapsed_ms"] = json!(r.elapsed.as_secs_f64() * 1000.0);
        text.push(format!("elapsed {:.1?}", r.elapsed));
    }
    ResultEntry {
        name: entry_name(r.theorem, &r.params),
        kind: "verification".into(),
        data,
        status: r.status().into(),
        text,
    }
}
