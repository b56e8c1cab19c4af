//! Randomized invariance checks: the same integral computed in the new
//! coordinates and through the old-coordinate section.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{BindingEnv, Expr};
use crate::numeric::{sample_transform, transform_env, Bump2, BumpFunction, Quadrature, TransformSampling};
use crate::superfn::{EightComponentForm, SuperFunction};
use crate::transform::CoordinateChange;

use super::def3::integrate_section;
use super::{
    generic_function, integrate_def1, integrate_def2, integrate_def3, is_component, old_section,
    parse_component_name, Def3Options, Def3Variant, IntegralResult,
};

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    /// 1, 2 or 3.
    pub def: u8,
    pub ell: u32,
    /// Laurent depth `M` for definition 2.
    pub laurent_depth: i64,
    /// Number of sampled transforms.
    pub trials: usize,
    /// Functions drawn per transform.
    pub functions_per_transform: usize,
    pub seed: u64,
    pub tol: f64,
    /// Zero the components the generic computation flags.
    pub restrict: bool,
    /// `(u, w)` box for definition 3; definitions 1 and 2 use `u ∈ [x0, x1]`.
    pub domain: [f64; 4],
    pub sampling: TransformSampling,
    pub def3: Def3Options,
    /// Definition 3: also compare `½∫(A00 + A11)`.
    pub compare_a11: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            def: 3,
            ell: 0,
            laurent_depth: 1,
            trials: 50,
            functions_per_transform: 1,
            seed: 0,
            tol: 1e-6,
            restrict: false,
            domain: [-2.0, 2.0, 0.0, 2.0],
            sampling: TransformSampling::default(),
            def3: Def3Options::default(),
            compare_a11: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub index: usize,
    /// Integral in the new coordinates.
    pub value_new: f64,
    /// Same integral through the old-coordinate section.
    pub value_old: f64,
    pub rel_error: f64,
    pub pass: bool,
    /// Components whose obstruction terms contribute above `tol`.
    pub obstructions: Vec<String>,
    /// Relative error of the variant keeping `A11`.
    pub a11_rel_error: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub trials: Vec<TrialReport>,
    pub max_rel_error: f64,
    pub max_a11_rel_error: Option<f64>,
    pub passed: usize,
    /// Obstructions of the generic symbolic computation (definitions 1, 2).
    pub symbolic_obstructions: Vec<String>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.passed == self.trials.len()
    }
}

fn rel(new: f64, old: f64) -> f64 {
    let d = (new - old).abs();
    if d == 0.0 {
        0.0
    } else {
        d / new.abs().max(f64::MIN_POSITIVE)
    }
}

fn failed(index: usize, e: &Error) -> TrialReport {
    TrialReport {
        index,
        value_new: f64::NAN,
        value_old: f64::NAN,
        rel_error: f64::INFINITY,
        pass: false,
        obstructions: Vec::new(),
        a11_rel_error: None,
        error: Some(e.to_string()),
    }
}

/// Symbolic data shared by every trial.
enum Plan {
    Line {
        result: IntegralResult,
        /// Component atom names to bind.
        components: Vec<String>,
        /// `(label, term)` for each obstruction contribution.
        terms: Vec<(String, Expr)>,
    },
    Surface {
        f: SuperFunction,
        section: SuperFunction,
    },
}

fn label(name: &str, order: u32) -> String {
    format!("{name}{}", "'".repeat(order as usize))
}

fn plan(cfg: &SuiteConfig) -> Result<Plan> {
    let tg = CoordinateChange::generic();
    let ell = cfg.ell;
    let (lo, hi) = match cfg.def {
        1 => (0, ell as i64 + 2),
        2 => (-cfg.laurent_depth, 2),
        3 => {
            let f = EightComponentForm::generic().to_superfunction();
            let section = old_section(&f, &tg)?;
            return Ok(Plan::Surface { f, section });
        }
        d => return Err(Error::Invalid(format!("unknown definition {d}"))),
    };
    let run = |f: &SuperFunction| if cfg.def == 1 { integrate_def1(f, &tg, ell) } else { integrate_def2(f, &tg, ell) };
    let mut f = generic_function(lo, hi, &BTreeSet::new());
    let mut result = run(&f)?;
    if cfg.restrict {
        f = generic_function(lo, hi, &result.obstruction_keys());
        result = run(&f)?;
    }
    let mut components = Vec::new();
    for a in f.slots().flat_map(|(_, c)| c.atoms_deep()) {
        if parse_component_name(a.name()).is_some() && !components.contains(&a.name().to_string()) {
            components.push(a.name().to_string());
        }
    }
    let terms = result
        .obstructions
        .iter()
        .map(|o| {
            let parts = result.integrand.split_linear(&is_component).unwrap_or_default();
            let term = parts
                .into_iter()
                .filter_map(|(a, _)| a)
                .find(|a| parse_component_name(a.name()) == Some((o.k, o.alpha, o.beta)) && a.derivative_order() == o.derivative_order)
                .map(|a| &o.multiplier * &Expr::atom(a))
                .unwrap_or_default();
            (label(&o.component(), o.derivative_order), term)
        })
        .collect();
    Ok(Plan::Line { result, components, terms })
}

fn surface_support(d: [f64; 4]) -> [f64; 4] {
    let (wu, ww) = (d[1] - d[0], d[3] - d[2]);
    [d[0] + 0.1 * wu, d[1] - 0.1 * wu, d[2] + 0.05 * ww, d[3] - 0.05 * ww]
}

fn run_transform(cfg: &SuiteConfig, plan: &Plan, ti: usize) -> Vec<TrialReport> {
    let n = cfg.functions_per_transform.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(ti as u64);
    let env_t = sample_transform(&mut rng, &cfg.sampling).and_then(|t| Ok((transform_env(&t)?, t)));
    let (env_t, t) = match env_t {
        Ok(v) => v,
        Err(e) => return (0..n).map(|j| failed(ti * n + j, &e)).collect(),
    };
    (0..n)
        .map(|j| {
            let index = ti * n + j;
            trial(cfg, plan, &env_t, &t, &mut rng, index).unwrap_or_else(|e| failed(index, &e))
        })
        .collect()
}

fn trial(
    cfg: &SuiteConfig,
    plan: &Plan,
    env_t: &BindingEnv,
    t: &CoordinateChange,
    rng: &mut ChaCha8Rng,
    index: usize,
) -> Result<TrialReport> {
    let mut env = env_t.clone();
    match plan {
        Plan::Line { result, components, terms } => {
            let [u0, u1, _, _] = cfg.domain;
            for c in components {
                env.bind(c, BumpFunction::sample(rng, u0, u1, (0.5, 1.5)).to_fn());
            }
            let [x0, x1, _, _] = cfg.sampling.valid_box;
            let q = Quadrature::new(64, 8);
            let line = |e: &Expr| -> Result<f64> {
                let c = env.compile(e)?;
                q.integrate(x0, x1, |x| c.eval(x, 0.0))
            };
            let value_new = line(&result.canonical_term)?;
            let value_old = line(&result.integrand)?;
            let rel_error = rel(value_new, value_old);
            let mut obstructions = Vec::new();
            for (name, term) in terms {
                if line(term)?.abs() > cfg.tol * value_new.abs() {
                    obstructions.push(name.clone());
                }
            }
            Ok(TrialReport {
                index,
                value_new,
                value_old,
                rel_error,
                pass: rel_error <= cfg.tol,
                obstructions,
                a11_rel_error: None,
                error: None,
            })
        }
        Plan::Surface { f, section } => {
            let support = surface_support(cfg.domain);
            for name in EightComponentForm::NAMES {
                env.bind(name, Bump2::sample(rng, support, (0.5, 1.5)).to_fn());
            }
            let variant = if cfg.compare_a11 { Def3Variant::KeepA11 } else { Def3Variant::Standard };
            let opts = Def3Options { variant, ..cfg.def3.clone() };
            let new = integrate_def3(f, None, &env, cfg.domain, &opts)?;
            let old = integrate_section(section, t, &env, cfg.domain, &opts)?;
            let (value_new, value_old) = (new.value - new.a11_part, old.value - old.a11_part);
            let rel_error = rel(value_new, value_old);
            let a11_rel_error = cfg.compare_a11.then(|| rel(new.value, old.value));
            Ok(TrialReport {
                index,
                value_new,
                value_old,
                rel_error,
                pass: rel_error <= cfg.tol,
                obstructions: Vec::new(),
                a11_rel_error,
                error: None,
            })
        }
    }
}

/// Runs `cfg.trials × cfg.functions_per_transform` comparisons. Trials draw
/// from independent seeded streams, so the report does not depend on
/// scheduling.
pub fn invariance_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let plan = plan(cfg)?;
    let trials: Vec<TrialReport> = (0..cfg.trials)
        .into_par_iter()
        .map(|ti| run_transform(cfg, &plan, ti))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let max_rel_error = trials.iter().map(|t| t.rel_error).fold(0.0, f64::max);
    let max_a11_rel_error = trials
        .iter()
        .filter_map(|t| t.a11_rel_error)
        .reduce(f64::max);
    let symbolic_obstructions = match &plan {
        Plan::Line { terms, .. } => terms.iter().map(|(n, _)| n.clone()).collect(),
        Plan::Surface { .. } => Vec::new(),
    };
    Ok(SuiteReport {
        config: cfg.clone(),
        passed: trials.iter().filter(|t| t.pass).count(),
        trials,
        max_rel_error,
        max_a11_rel_error,
        symbolic_obstructions,
    })
}
