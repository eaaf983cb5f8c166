//! Scenario execution: expand the sweep, evaluate every requested method at
//! every point, and collect rows with diagnostics.
//!
//! Sweep points run concurrently; rows are assembled in declared order
//! (sweep value major, method minor), so output ordering is deterministic
//! regardless of thread scheduling.

use std::time::Instant;

use erqt::current::{
    current_landauer_continuum, evaluate_method, CurrentResult, Method, WideBandLeads,
};
use erqt::model::{BiasSpec, RelaxationKind, Side};
use erqt::{CMatrix, Error, C64};
use rayon::prelude::*;

use crate::config::{build_model, wide_band_profile, BuiltModel, ScenarioConfig};

/// One evaluated (sweep value, method) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    /// Sweep parameter name; empty when the scenario has no sweep.
    pub param_name: String,
    /// Sweep value; `None` when the scenario has no sweep.
    pub param_value: Option<f64>,
    pub method: String,
    /// NaN when the method failed without a best estimate.
    pub current: f64,
    pub abs_error: f64,
    pub n_eval: usize,
    pub wall_time_s: f64,
    /// Flags: `zero_bias_anomaly`, `not_proportional`, `quadrature_warn`,
    /// `undamped_subspace`, or `error` (anything else).
    pub diagnostics: Vec<String>,
    /// True when the method failed; drives the exit status.
    pub errored: bool,
}

/// Run a validated scenario. The returned rows follow the declared order:
/// every method at the first sweep value, then the second, and so on.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Vec<ResultRow>, String> {
    let methods: Vec<Method> = config
        .run
        .methods
        .iter()
        .map(|name| {
            Method::from_name(name).ok_or_else(|| format!("run.methods: unknown method {name:?}"))
        })
        .collect::<Result<_, _>>()?;
    let points: Vec<Option<(String, f64)>> = match &config.run.sweep {
        None => vec![None],
        Some(sweep) => sweep
            .values
            .iter()
            .map(|&v| Some((sweep.parameter.clone(), v)))
            .collect(),
    };
    let rows: Vec<Vec<ResultRow>> = points
        .par_iter()
        .map(|point| evaluate_point(config, &methods, point.as_ref()))
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// True when any row failed (exit-status contract: nonzero iff so).
pub fn has_errors(rows: &[ResultRow]) -> bool {
    rows.iter().any(|r| r.errored)
}

fn evaluate_point(
    config: &ScenarioConfig,
    methods: &[Method],
    point: Option<&(String, f64)>,
) -> Vec<ResultRow> {
    let (param_name, param_value) = match point {
        None => (String::new(), None),
        Some((name, value)) => (name.clone(), Some(*value)),
    };
    let row_shell = |method: Method| ResultRow {
        scenario: config.scenario.clone(),
        param_name: param_name.clone(),
        param_value,
        method: method.name().into(),
        current: f64::NAN,
        abs_error: f64::NAN,
        n_eval: 0,
        wall_time_s: 0.0,
        diagnostics: Vec::new(),
        errored: false,
    };

    let built = match build_point_model(config, point) {
        Ok(built) => built,
        Err(message) => {
            // The whole point is unevaluable; every method errors.
            return methods
                .iter()
                .map(|&m| {
                    let mut row = row_shell(m);
                    row.errored = true;
                    row.diagnostics.push("error".into());
                    row.diagnostics.push(message.clone());
                    row
                })
                .collect();
        }
    };

    methods
        .iter()
        .map(|&method| {
            let mut row = row_shell(method);
            let start = Instant::now();
            let outcome = evaluate_one(config, &built, method);
            row.wall_time_s = start.elapsed().as_secs_f64();
            match outcome {
                Ok(result) => {
                    row.current = result.value;
                    row.abs_error = result.abs_error_estimate;
                    row.n_eval = result.n_evaluations;
                    if is_zero_bias_anomaly(&built, result.value) {
                        row.diagnostics.push("zero_bias_anomaly".into());
                    }
                }
                Err(err) => {
                    row.errored = true;
                    match err {
                        Error::NotProportional(_) => {
                            row.diagnostics.push("not_proportional".into());
                        }
                        Error::QuadratureFailure {
                            best,
                            error_estimate,
                            n_evaluations,
                        } => {
                            // Keep the best estimate; the flag marks it unconverged.
                            row.current = best;
                            row.abs_error = error_estimate;
                            row.n_eval = n_evaluations;
                            row.diagnostics.push("quadrature_warn".into());
                        }
                        Error::UndampedSubspace(_) => {
                            row.diagnostics.push("undamped_subspace".into());
                        }
                        other => {
                            row.diagnostics.push("error".into());
                            row.diagnostics.push(other.to_string());
                        }
                    }
                }
            }
            row
        })
        .collect()
}

/// Junction and bias for one sweep point.
fn build_point_model(
    config: &ScenarioConfig,
    point: Option<&(String, f64)>,
) -> Result<BuiltModel, String> {
    match point.map(|(name, value)| (name.as_str(), *value)) {
        None => build_model(config, None),
        Some(("gamma_scale", scale)) => {
            let built = build_model(config, None)?;
            let junction = built
                .junction
                .scale_gammas(scale)
                .map_err(|e| format!("run.sweep (gamma_scale {scale}): {e}"))?;
            Ok(BuiltModel { junction, ..built })
        }
        Some(("bias_delta", delta)) => {
            let built = build_model(config, None)?;
            let mean = 0.5 * (config.bias.mu_left + config.bias.mu_right);
            let bias = BiasSpec::new(
                mean + 0.5 * delta,
                mean - 0.5 * delta,
                config.bias.temp_left,
                config.bias.temp_right,
            )
            .map_err(|e| format!("run.sweep (bias_delta {delta}): {e}"))?;
            Ok(BuiltModel { bias, ..built })
        }
        Some(("n_modes", n)) => build_model(config, Some(n as usize)),
        Some((other, _)) => Err(format!("run.sweep.parameter: unknown parameter {other:?}")),
    }
}

fn evaluate_one(
    config: &ScenarioConfig,
    built: &BuiltModel,
    method: Method,
) -> Result<CurrentResult, Error> {
    if method == Method::LandauerContinuum {
        let (g_left, g_right, site_left, site_right) =
            wide_band_profile(config).ok_or_else(|| {
                Error::InvalidParameter(
                    "landauer_continuum needs flat-band wide-band couplings".into(),
                )
            })?;
        let n = built.junction.n_sites();
        let mut gamma_left = CMatrix::zeros(n, n);
        gamma_left[(site_left, site_left)] = C64::new(g_left, 0.0);
        let mut gamma_right = CMatrix::zeros(n, n);
        gamma_right[(site_right, site_right)] = C64::new(g_right, 0.0);
        let leads = WideBandLeads::new(built.junction.h_system().clone(), gamma_left, gamma_right)?;
        let mut inner: Option<Error> = None;
        let result = current_landauer_continuum(
            |omega| match leads.transmission(omega) {
                Ok(t) => t,
                Err(e) => {
                    inner.get_or_insert(e);
                    f64::NAN
                }
            },
            &built.bias,
            &built.quadrature,
        );
        return match inner {
            Some(e) => Err(e),
            None => result,
        };
    }
    evaluate_method(
        &built.junction,
        &built.bias,
        built.kind,
        method,
        &built.quadrature,
    )
}

/// A nonzero current at exactly zero bias under Markovian relaxation: real,
/// reported, never clamped.
fn is_zero_bias_anomaly(built: &BuiltModel, current: f64) -> bool {
    built.kind == RelaxationKind::Markovian
        && built.bias.mu(Side::Left) == built.bias.mu(Side::Right)
        && built.bias.temperature(Side::Left) == built.bias.temperature(Side::Right)
        && current.abs() > 10.0 * built.quadrature.abs_tol
}
