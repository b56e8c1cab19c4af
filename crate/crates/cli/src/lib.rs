//! Command-line front end. Every command yields a JSON report and an exit
//! code: 0 ok, 2 obstructions present (or a failed suite), 3 invalid input,
//! 4 numeric failure.

pub mod input;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use z22_core::berezinian::{ber_closed, ber_direct};
use z22_core::integrate::{
    component_name, constraints_def1, decompose_total_derivative, generic_function, integrate_def1,
    integrate_def2, integrate_def3, invariance_suite, old_section, parse_component_name, Def3Options,
    IntegralResult, SuiteConfig, SuiteReport,
};
use z22_core::numeric::{transform_env, Quadrature, TransformSampling};
use z22_core::superfn::{EightComponentForm, SuperFunction, Window};
use z22_core::transform::CoordinateChange;
use z22_core::{BindingEnv, Degree, Error, Expr, Result};

use input::{read_json, FunctionFile, TransformFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OBSTRUCTED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

const LINE_DOMAIN: [f64; 4] = [-3.0, 3.0, 0.0, 4.0];
const SURFACE_DOMAIN: [f64; 4] = [-2.0, 2.0, 0.0, 2.0];

#[derive(Debug, Parser)]
#[command(name = "z22", version, about = "Berezinians and integrals on the minimal Z2xZ2 superspace")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Berezinian of a coordinate change: body and soul.
    Ber {
        #[arg(long)]
        transform: PathBuf,
        #[arg(long, value_enum, default_value_t = BerMode::Both)]
        mode: BerMode,
    },
    /// Canonical term, obstructions and value of one integral.
    Integrate(IntegrateArgs),
    /// Components that must vanish for definition 1 at level `ell`.
    Constraints {
        #[arg(long)]
        ell: u32,
    },
    /// Randomized new-versus-old coordinate comparison.
    Invariance(InvarianceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BerMode {
    Closed,
    Direct,
    Both,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[arg(long = "def", value_parser = clap::value_parser!(u8).range(1..=3))]
    pub def: u8,
    /// Bump functions for the components (omitted: generic symbolic function).
    #[arg(long)]
    pub function: Option<PathBuf>,
    /// Coordinate change (omitted: generic for definitions 1 and 2, none for 3).
    #[arg(long)]
    pub transform: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub ell: u32,
    #[arg(long = "laurent-depth", default_value_t = 1)]
    pub laurent_depth: i64,
    /// `x0,x1,w0,w1`.
    #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
    pub domain: Option<[f64; 4]>,
    /// Highest z-power kept.
    #[arg(long)]
    pub trunc: Option<i64>,
    /// Drop the components the computation flags.
    #[arg(long)]
    pub restrict: bool,
}

#[derive(Debug, Args)]
pub struct InvarianceArgs {
    #[arg(long = "def", value_parser = clap::value_parser!(u8).range(1..=3))]
    pub def: u8,
    #[arg(long, default_value_t = 0)]
    pub ell: u32,
    #[arg(long = "laurent-depth", default_value_t = 1)]
    pub laurent_depth: i64,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Functions drawn per transform.
    #[arg(long, default_value_t = 1)]
    pub functions: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub restrict: bool,
    /// Definition 3: also compare the integral that keeps `A11`.
    #[arg(long = "keep-a11")]
    pub keep_a11: bool,
    #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
    pub domain: Option<[f64; 4]>,
}

pub fn parse_domain(s: &str) -> std::result::Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let d: [f64; 4] = v.try_into().map_err(|_| "expected x0,x1,w0,w1".to_string())?;
    if !(d[0] < d[1] && d[2] < d[3]) || d.iter().any(|c| !c.is_finite()) {
        return Err("domain needs x0 < x1 and w0 < w1".into());
    }
    Ok(d)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DivisionNearZero { .. }
        | Error::NonFiniteValue(..)
        | Error::SupportViolation { .. }
        | Error::ResampleExhausted(_)
        | Error::DecompositionMismatch => EXIT_NUMERIC,
        _ => EXIT_INVALID,
    }
}

fn is_concrete(t: &CoordinateChange) -> bool {
    t.fields().iter().all(|e| e.atoms_deep().is_empty())
}

pub fn cmd_ber(t: &CoordinateChange, mode: BerMode) -> Result<(Value, i32)> {
    let closed = (mode != BerMode::Direct).then(|| ber_closed(t)).transpose()?;
    let direct = (mode != BerMode::Closed).then(|| ber_direct(&t.jacobian())).transpose()?;
    let shown = closed.as_ref().or(direct.as_ref()).expect("one of the two forms");
    let mut report = json!({
        "command": "ber",
        "config": { "mode": format!("{mode:?}").to_lowercase() },
        "body": shown.body.to_string(),
        "soul": shown.soul.to_string(),
    });
    let mut code = EXIT_OK;
    if let (Some(c), Some(d)) = (&closed, &direct) {
        let equal = c.equal(d);
        report["verdict"] = json!(if equal { "equal" } else { "different" });
        if !equal {
            code = EXIT_NUMERIC;
        }
    }
    Ok((report, code))
}

pub fn cmd_constraints(ell: u32) -> Result<(Value, i32)> {
    let names: Vec<String> = constraints_def1(ell)?.into_iter().map(|(k, a, b)| component_name(k, a, b)).collect();
    Ok((json!({ "command": "constraints", "config": { "ell": ell }, "constraints": names }), EXIT_OK))
}

fn obstruction_json(r: &IntegralResult) -> Value {
    r.obstructions
        .iter()
        .map(|o| {
            json!({
                "component": o.component(),
                "derivativeOrder": o.derivative_order,
                "multiplier": o.multiplier.to_string(),
            })
        })
        .collect()
}

/// `F` from the one-variable components of a function file.
fn line_function(file: &FunctionFile, lo: i64, hi: i64, zeroed: &BTreeSet<(i64, u8, u8)>) -> Result<SuperFunction> {
    if !file.slots.is_empty() {
        return Err(Error::Invalid("`slots` belong to definition 3".into()));
    }
    let mut comps = BTreeMap::new();
    for name in file.components.keys() {
        let key = parse_component_name(name).ok_or_else(|| Error::Invalid(format!("bad component name `{name}`")))?;
        if !zeroed.contains(&key) {
            comps.insert(key, Expr::func1(name));
        }
    }
    Ok(SuperFunction::from_components(&comps, Window::new(-lo.min(0), hi))?.with_declared_degree(Degree::EVEN))
}

fn integrate_line(a: &IntegrateArgs) -> Result<(Value, i32)> {
    let t = match &a.transform {
        Some(p) => read_json::<TransformFile>(p)?.to_transform()?,
        None => CoordinateChange::generic(),
    };
    let file = a.function.as_ref().map(|p| read_json::<FunctionFile>(p)).transpose()?;
    let (lo, hi) = if a.def == 1 {
        (0, a.trunc.unwrap_or(a.ell as i64 + 2))
    } else {
        (-a.laurent_depth, a.trunc.unwrap_or(2))
    };
    let build = |zeroed: &BTreeSet<_>| match &file {
        Some(f) => line_function(f, lo, hi, zeroed),
        None => Ok(generic_function(lo, hi, zeroed)),
    };
    let run = |f: &SuperFunction| if a.def == 1 { integrate_def1(f, &t, a.ell) } else { integrate_def2(f, &t, a.ell) };
    let mut r = run(&build(&BTreeSet::new())?)?;
    if a.restrict {
        r = run(&build(&r.obstruction_keys())?)?;
    }
    let dom = a.domain.unwrap_or(LINE_DOMAIN);
    let mut numeric = Value::Null;
    let mut canonical_value = Value::Null;
    if let (Some(f), true) = (&file, is_concrete(&t)) {
        let mut env = transform_env(&t)?;
        for (name, b) in &f.components {
            env.bind(name, b.bump()?.to_fn());
        }
        let q = Quadrature::new(64, 8);
        let line = |e: &Expr| -> Result<f64> {
            let c = env.compile(e)?;
            q.integrate(dom[0], dom[1], |x| c.eval(x, 0.0))
        };
        numeric = json!(line(&r.integrand)?);
        canonical_value = json!(line(&r.canonical_term)?);
    }
    let mut config = json!({ "def": a.def, "ell": a.ell, "trunc": hi, "restrict": a.restrict, "domain": dom });
    if a.def == 2 {
        config["laurentDepth"] = json!(a.laurent_depth);
    }
    let obstructed = !r.is_well_defined();
    let report = json!({
        "command": "integrate",
        "config": config,
        "canonicalTerm": r.canonical_term.to_string(),
        "canonicalMultiplier": r.canonical_multiplier.to_string(),
        "obstructions": obstruction_json(&r),
        "numericValue": numeric,
        "canonicalValue": canonical_value,
        "warning": r.degree_warning,
        "verdict": if obstructed { "obstructed" } else { "well-defined" },
    });
    Ok((report, if obstructed { EXIT_OBSTRUCTED } else { EXIT_OK }))
}

fn integrate_surface(a: &IntegrateArgs) -> Result<(Value, i32)> {
    let t = a
        .transform
        .as_ref()
        .map(|p| read_json::<TransformFile>(p)?.to_transform())
        .transpose()?;
    let file = a.function.as_ref().map(|p| read_json::<FunctionFile>(p)).transpose()?;
    let f = match &file {
        Some(file) => {
            if !file.components.is_empty() {
                return Err(Error::Invalid("definition 3 takes `slots`, not `components`".into()));
            }
            let mut e: [Expr; 8] = Default::default();
            for name in file.slots.keys() {
                let i = EightComponentForm::NAMES
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::Invalid(format!("unknown slot `{name}`")))?;
                e[i] = Expr::func2(name);
            }
            EightComponentForm::from_entries(e)
        }
        None => EightComponentForm::generic(),
    }
    .to_superfunction();
    let dom = a.domain.unwrap_or(SURFACE_DOMAIN);
    let mut report = json!({
        "command": "integrate",
        "config": { "def": 3, "domain": dom },
        "obstructions": [],
        "numericValue": Value::Null,
        "verdict": "well-defined",
    });
    match &t {
        Some(t) => {
            let (jx, jy, ob) = decompose_total_derivative(t, &f)?;
            let canonical = old_section(&f, t)?.slot(1, 1, 1) - &ob;
            report["canonicalTerm"] = json!(canonical.to_string());
            report["divergence"] = json!({ "jx": jx.to_string(), "jy": jy.to_string() });
        }
        None => report["canonicalTerm"] = json!(f.slot(1, 1, 1).to_string()),
    }
    if let Some(file) = &file {
        let mut env = BindingEnv::new();
        for (name, b) in &file.slots {
            env.bind(name, b.bump()?.to_fn());
        }
        let value = match &t {
            Some(t) if is_concrete(t) => {
                env.extend(&transform_env(t)?);
                Some(integrate_def3(&f, Some(t), &env, dom, &Def3Options::default())?.value)
            }
            Some(_) => None,
            None => Some(integrate_def3(&f, None, &env, dom, &Def3Options::default())?.value),
        };
        report["numericValue"] = json!(value);
    }
    Ok((report, EXIT_OK))
}

pub fn cmd_integrate(a: &IntegrateArgs) -> Result<(Value, i32)> {
    if a.def == 3 {
        integrate_surface(a)
    } else {
        integrate_line(a)
    }
}

pub fn suite_config(a: &InvarianceArgs) -> SuiteConfig {
    let base = SuiteConfig::default();
    SuiteConfig {
        def: a.def,
        ell: a.ell,
        laurent_depth: a.laurent_depth,
        trials: a.trials,
        functions_per_transform: a.functions,
        seed: a.seed,
        tol: a.tol,
        restrict: a.restrict,
        domain: a.domain.unwrap_or(base.domain),
        sampling: TransformSampling::default(),
        compare_a11: a.keep_a11,
        ..base
    }
}

pub fn suite_json(r: &SuiteReport) -> Value {
    let c = &r.config;
    let trials: Vec<Value> = r
        .trials
        .iter()
        .map(|t| {
            json!({
                "index": t.index,
                "valueNew": t.value_new,
                "valueOld": t.value_old,
                "relError": t.rel_error,
                "pass": t.pass,
                "obstructions": t.obstructions,
                "a11RelError": t.a11_rel_error,
                "error": t.error,
            })
        })
        .collect();
    json!({
        "command": "invariance",
        "config": {
            "def": c.def,
            "ell": c.ell,
            "laurentDepth": c.laurent_depth,
            "trials": c.trials,
            "functionsPerTransform": c.functions_per_transform,
            "seed": c.seed,
            "tol": c.tol,
            "restrict": c.restrict,
            "domain": c.domain,
            "keepA11": c.compare_a11,
        },
        "trials": trials,
        "passed": r.passed,
        "maxRelError": r.max_rel_error,
        "maxA11RelError": r.max_a11_rel_error,
        "obstructions": r.symbolic_obstructions,
        "verdict": if r.all_pass() { "pass" } else { "fail" },
    })
}

pub fn cmd_invariance(a: &InvarianceArgs) -> Result<(Value, i32)> {
    let r = invariance_suite(&suite_config(a))?;
    let code = if r.all_pass() {
        EXIT_OK
    } else if r.trials.iter().any(|t| t.error.is_some()) {
        EXIT_NUMERIC
    } else {
        EXIT_OBSTRUCTED
    };
    Ok((suite_json(&r), code))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Ber { .. } => "ber",
        Command::Integrate(_) => "integrate",
        Command::Constraints { .. } => "constraints",
        Command::Invariance(_) => "invariance",
    }
}

pub fn dispatch(cli: &Cli) -> (Value, i32) {
    let out = match &cli.command {
        Command::Ber { transform, mode } => {
            read_json::<TransformFile>(transform).and_then(|f| f.to_transform()).and_then(|t| cmd_ber(&t, *mode))
        }
        Command::Integrate(a) => cmd_integrate(a),
        Command::Constraints { ell } => cmd_constraints(*ell),
        Command::Invariance(a) => cmd_invariance(a),
    };
    out.unwrap_or_else(|e| (json!({ "command": command_name(&cli.command), "error": e.to_string() }), exit_code(&e)))
}

pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Parses `args` (program name first), runs the command and returns the
/// text for stdout with the exit code.
pub fn run<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            return (e.render().to_string(), code);
        }
    };
    let (report, code) = dispatch(&cli);
    let text = render(&report);
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, &text) {
            return (format!("{}: {e}\n", path.display()), EXIT_INVALID);
        }
    }
    (text, code)
}
