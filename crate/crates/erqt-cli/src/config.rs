//! Scenario configuration: TOML schema, validation, normalization, and
//! construction of the model objects a run needs.
//!
//! The grammar is documented in `docs/config-format.md`. Parsing applies all
//! defaults, so dumping a parsed config yields a normalized file that parses
//! back to the same configuration.

use erqt::current::Method;
use erqt::model::{
    discretize_band, make_proportional_right, BandProfile, BandScheme, BiasSpec, GammaRule,
    JunctionModel, RelaxationKind, Reservoir, ReservoirMode,
};
use erqt::quad::QuadratureSpec;
use erqt::{CMatrix, CVector, C64};
use serde::{Deserialize, Serialize};

/// A fully parsed scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Scenario identifier echoed into every result row.
    #[serde(default = "default_scenario_id")]
    pub scenario: String,
    pub system: SystemConfig,
    pub reservoirs: ReservoirsConfig,
    pub bias: BiasConfig,
    #[serde(default)]
    pub relaxation: RelaxationConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_scenario_id() -> String {
    "scenario".into()
}

/// System Hamiltonian: a named preset or an explicit Hermitian matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Currently `"single-level"`: one site at energy `epsilon`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Level energy for the `single-level` preset (default 0).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Row-major complex matrix, each entry a `[re, im]` pair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirsConfig {
    pub left: SideConfig,
    pub right: SideConfig,
}

/// One reservoir, built by exactly one of the three mechanisms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideConfig {
    /// Explicit mode list.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<ModeConfig>>,
    /// Discretized continuum band.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<BandConfig>,
    /// Right side only: copy of the left with couplings scaled by √λ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proportional: Option<ProportionalConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub omega: f64,
    pub gamma: f64,
    /// One `[re, im]` pair per system site.
    pub coupling: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    /// `"flat"` (requires `gamma0`) or `"tabulated"` (requires `points`).
    pub profile: String,
    /// Coupling-weighted density `Γ(ω)` of the flat profile.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
    /// `[ω, Γ(ω)]` knots of the tabulated profile, strictly increasing in ω.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    /// Band edges `[ω_min, ω_max]`.
    pub range: [f64; 2],
    /// Number of modes the band is discretized into.
    pub n_modes: usize,
    /// `"spacing"`: `γ_k = gamma_value · Δω_k`; `"constant"`: `γ_k = gamma_value`.
    pub gamma_rule: String,
    pub gamma_value: f64,
    /// System site the band couples to (default 0).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProportionalConfig {
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasConfig {
    pub mu_left: f64,
    pub mu_right: f64,
    pub temp_left: f64,
    pub temp_right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxationConfig {
    /// `"markovian"` or `"nonmarkovian"` (wide-band, frequency-resolved).
    pub kind: String,
}

impl Default for RelaxationConfig {
    fn default() -> Self {
        Self {
            kind: "markovian".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Method names, evaluated in order at every sweep point.
    pub methods: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    /// Quadrature overrides; missing fields take the library defaults.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// `"gamma_scale"`, `"bias_delta"`, or `"n_modes"`.
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_padding: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: String,
    pub format: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: "results.csv".into(),
            format: "csv".into(),
        }
    }
}

/// Parse, normalize (apply defaults), and validate a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, String> {
    let mut config: ScenarioConfig =
        toml::from_str(text).map_err(|e| format!("parse error: {e}"))?;
    normalize(&mut config);
    validate(&config)?;
    Ok(config)
}

/// Materialize every default so the dumped form is complete and idempotent
/// under parse → dump → parse.
fn normalize(config: &mut ScenarioConfig) {
    if config.system.preset.is_some() && config.system.epsilon.is_none() {
        config.system.epsilon = Some(0.0);
    }
    for side in [&mut config.reservoirs.left, &mut config.reservoirs.right] {
        if let Some(band) = side.band.as_mut() {
            band.site.get_or_insert(0);
        }
    }
    let defaults = QuadratureSpec::default();
    let quad = config.run.quadrature.get_or_insert(QuadratureConfig {
        abs_tol: None,
        rel_tol: None,
        max_subdivisions: None,
        window_padding: None,
    });
    quad.abs_tol.get_or_insert(defaults.abs_tol);
    quad.rel_tol.get_or_insert(defaults.rel_tol);
    quad.max_subdivisions
        .get_or_insert(defaults.max_subdivisions);
    quad.window_padding
        .get_or_insert(defaults.window_padding_factor);
}

/// Serialize a normalized config back to TOML.
pub fn dump_config(config: &ScenarioConfig) -> Result<String, String> {
    toml::to_string_pretty(config).map_err(|e| format!("serialization error: {e}"))
}

/// Validate every field and cross-field rule. Returns the first violation,
/// naming the offending field.
pub fn validate(config: &ScenarioConfig) -> Result<(), String> {
    if config.scenario.is_empty()
        || !config
            .scenario
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
    {
        return Err(format!(
            "scenario: identifier {:?} must be non-empty and use only [A-Za-z0-9_.-] \
             (it is embedded verbatim in CSV rows)",
            config.scenario
        ));
    }
    match (&config.system.preset, &config.system.matrix) {
        (Some(p), None) => {
            if p != "single-level" {
                return Err(format!(
                    "system.preset: unknown preset {p:?}; expected \"single-level\""
                ));
            }
        }
        (None, Some(m)) => {
            if config.system.epsilon.is_some() {
                return Err("system.epsilon: only meaningful with a preset".into());
            }
            if m.is_empty() || m.iter().any(|row| row.len() != m.len()) {
                return Err("system.matrix: must be a non-empty square matrix".into());
            }
        }
        (Some(_), Some(_)) => {
            return Err("system: preset and matrix are mutually exclusive".into());
        }
        (None, None) => return Err("system: needs either preset or matrix".into()),
    }

    validate_side("reservoirs.left", &config.reservoirs.left, false)?;
    validate_side("reservoirs.right", &config.reservoirs.right, true)?;

    let kind = parse_kind(&config.relaxation.kind)?;

    if config.run.methods.is_empty() {
        return Err("run.methods: at least one method is required".into());
    }
    for name in &config.run.methods {
        let method = Method::from_name(name).ok_or_else(|| {
            let known: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
            format!(
                "run.methods: unknown method {name:?}; known: {}",
                known.join(", ")
            )
        })?;
        if kind == RelaxationKind::NonMarkovianWideBand
            && matches!(
                method,
                Method::PcAnalytic | Method::Lyapunov | Method::OccupancyLargeGamma
            )
        {
            return Err(format!(
                "run.methods: {name} requires markovian relaxation \
                 (the closed form and the correlation-matrix solve do not support \
                 frequency-resolved damping)"
            ));
        }
        if method == Method::LandauerContinuum && wide_band_profile(config).is_none() {
            return Err(
                "run.methods: landauer_continuum needs a flat-band left reservoir with the \
                 right reservoir either flat-band or proportional, so the continuum \
                 transmission is defined"
                    .into(),
            );
        }
    }

    if let Some(sweep) = &config.run.sweep {
        if sweep.values.is_empty() {
            return Err("run.sweep.values: at least one value is required".into());
        }
        match sweep.parameter.as_str() {
            "gamma_scale" => {
                if let Some(v) = sweep.values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
                    return Err(format!(
                        "run.sweep.values: gamma_scale value {v} must be > 0"
                    ));
                }
            }
            "bias_delta" => {
                if let Some(v) = sweep.values.iter().find(|v| !v.is_finite()) {
                    return Err(format!(
                        "run.sweep.values: bias_delta value {v} must be finite"
                    ));
                }
            }
            "n_modes" => {
                if let Some(v) = sweep
                    .values
                    .iter()
                    .find(|v| !v.is_finite() || **v < 1.0 || v.fract() != 0.0)
                {
                    return Err(format!(
                        "run.sweep.values: n_modes value {v} must be a positive integer"
                    ));
                }
                if config.reservoirs.left.band.is_none() {
                    return Err(
                        "run.sweep.parameter: n_modes requires a band-built left reservoir".into(),
                    );
                }
                if config.reservoirs.right.modes.is_some() {
                    return Err(
                        "run.sweep.parameter: n_modes cannot resize an explicit right mode list"
                            .into(),
                    );
                }
            }
            other => {
                return Err(format!(
                    "run.sweep.parameter: unknown parameter {other:?}; expected gamma_scale, \
                     bias_delta, or n_modes"
                ));
            }
        }
    }

    quadrature_spec(config).map_err(|e| format!("run.quadrature: {e}"))?;

    if config.output.format != "csv" {
        return Err(format!(
            "output.format: only \"csv\" is supported, got {:?}",
            config.output.format
        ));
    }
    if config.output.path.is_empty() {
        return Err("output.path: must not be empty".into());
    }

    // Dry-run the model build to surface Hermiticity, coupling-dimension, and
    // bias violations with their field context.
    build_model(config, None)?;
    Ok(())
}

fn validate_side(path: &str, side: &SideConfig, is_right: bool) -> Result<(), String> {
    let chosen =
        side.modes.is_some() as u8 + side.band.is_some() as u8 + side.proportional.is_some() as u8;
    if chosen != 1 {
        return Err(format!(
            "{path}: exactly one of modes, band, or proportional is required"
        ));
    }
    if side.proportional.is_some() && !is_right {
        return Err(format!(
            "{path}: proportional is only valid for the right reservoir"
        ));
    }
    if let Some(p) = &side.proportional {
        if !p.lambda.is_finite() || p.lambda < 0.0 {
            return Err(format!(
                "{path}.proportional.lambda: {} must be ≥ 0",
                p.lambda
            ));
        }
    }
    if let Some(modes) = &side.modes {
        if modes.is_empty() {
            return Err(format!("{path}.modes: at least one mode is required"));
        }
        for (i, mode) in modes.iter().enumerate() {
            if !mode.omega.is_finite() {
                return Err(format!("{path}.modes[{i}].omega: must be finite"));
            }
            if !mode.gamma.is_finite() || mode.gamma <= 0.0 {
                return Err(format!(
                    "{path}.modes[{i}].gamma: {} must be > 0",
                    mode.gamma
                ));
            }
            if mode.coupling.is_empty() {
                return Err(format!("{path}.modes[{i}].coupling: must not be empty"));
            }
        }
    }
    if let Some(band) = &side.band {
        match band.profile.as_str() {
            "flat" => {
                let g0 = band
                    .gamma0
                    .ok_or_else(|| format!("{path}.band.gamma0: required for the flat profile"))?;
                if !g0.is_finite() || g0 < 0.0 {
                    return Err(format!("{path}.band.gamma0: {g0} must be ≥ 0"));
                }
                if band.points.is_some() {
                    return Err(format!(
                        "{path}.band.points: only valid for tabulated profiles"
                    ));
                }
            }
            "tabulated" => {
                if band.points.as_ref().is_none_or(|p| p.len() < 2) {
                    return Err(format!(
                        "{path}.band.points: tabulated profiles need at least two [ω, Γ] knots"
                    ));
                }
                if band.gamma0.is_some() {
                    return Err(format!("{path}.band.gamma0: only valid for flat profiles"));
                }
            }
            other => {
                return Err(format!(
                    "{path}.band.profile: unknown profile {other:?}; expected flat or tabulated"
                ));
            }
        }
        if band.n_modes == 0 {
            return Err(format!("{path}.band.n_modes: must be ≥ 1"));
        }
        if !matches!(band.gamma_rule.as_str(), "spacing" | "constant") {
            return Err(format!(
                "{path}.band.gamma_rule: unknown rule {:?}; expected spacing or constant",
                band.gamma_rule
            ));
        }
        if !band.gamma_value.is_finite() || band.gamma_value <= 0.0 {
            return Err(format!(
                "{path}.band.gamma_value: {} must be > 0",
                band.gamma_value
            ));
        }
    }
    Ok(())
}

/// Parse the relaxation kind string.
pub fn parse_kind(kind: &str) -> Result<RelaxationKind, String> {
    match kind {
        "markovian" => Ok(RelaxationKind::Markovian),
        "nonmarkovian" => Ok(RelaxationKind::NonMarkovianWideBand),
        other => Err(format!(
            "relaxation.kind: unknown kind {other:?}; expected markovian or nonmarkovian"
        )),
    }
}

/// Effective quadrature settings after overrides.
pub fn quadrature_spec(config: &ScenarioConfig) -> Result<QuadratureSpec, String> {
    let defaults = QuadratureSpec::default();
    let spec = match &config.run.quadrature {
        None => defaults,
        Some(q) => QuadratureSpec {
            abs_tol: q.abs_tol.unwrap_or(defaults.abs_tol),
            rel_tol: q.rel_tol.unwrap_or(defaults.rel_tol),
            max_subdivisions: q.max_subdivisions.unwrap_or(defaults.max_subdivisions),
            window_padding_factor: q.window_padding.unwrap_or(defaults.window_padding_factor),
        },
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// Wide-band continuum couplings `(Γ_L, Γ_R, site_L, site_R)` when the config
/// supports the continuum Landauer reference: flat-band left, flat-band or
/// proportional right.
pub fn wide_band_profile(config: &ScenarioConfig) -> Option<(f64, f64, usize, usize)> {
    let left = config.reservoirs.left.band.as_ref()?;
    if left.profile != "flat" {
        return None;
    }
    let g_left = left.gamma0?;
    let site_left = left.site.unwrap_or(0);
    if let Some(p) = &config.reservoirs.right.proportional {
        return Some((g_left, p.lambda * g_left, site_left, site_left));
    }
    let right = config.reservoirs.right.band.as_ref()?;
    if right.profile != "flat" {
        return None;
    }
    Some((g_left, right.gamma0?, site_left, right.site.unwrap_or(0)))
}

/// Everything the runner needs for one evaluation point.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub junction: JunctionModel,
    pub bias: BiasSpec,
    pub kind: RelaxationKind,
    pub quadrature: QuadratureSpec,
}

/// Build the junction, bias, and solver settings from a validated config.
/// `n_modes_override` resizes band-built reservoirs (the `n_modes` sweep).
pub fn build_model(
    config: &ScenarioConfig,
    n_modes_override: Option<usize>,
) -> Result<BuiltModel, String> {
    let h_system = build_h_system(&config.system)?;
    let n_sites = h_system.nrows();
    let left = build_side(
        "reservoirs.left",
        &config.reservoirs.left,
        n_sites,
        None,
        n_modes_override,
    )?;
    let right = build_side(
        "reservoirs.right",
        &config.reservoirs.right,
        n_sites,
        Some(&left),
        n_modes_override,
    )?;
    let junction =
        JunctionModel::new(h_system, left, right).map_err(|e| format!("system/reservoirs: {e}"))?;
    let bias = BiasSpec::new(
        config.bias.mu_left,
        config.bias.mu_right,
        config.bias.temp_left,
        config.bias.temp_right,
    )
    .map_err(|e| format!("bias: {e}"))?;
    let kind = parse_kind(&config.relaxation.kind)?;
    let quadrature = quadrature_spec(config)?;
    Ok(BuiltModel {
        junction,
        bias,
        kind,
        quadrature,
    })
}

fn build_h_system(system: &SystemConfig) -> Result<CMatrix, String> {
    if let Some(preset) = &system.preset {
        if preset != "single-level" {
            return Err(format!("system.preset: unknown preset {preset:?}"));
        }
        let epsilon = system.epsilon.unwrap_or(0.0);
        if !epsilon.is_finite() {
            return Err(format!("system.epsilon: {epsilon} must be finite"));
        }
        return Ok(CMatrix::from_element(1, 1, C64::new(epsilon, 0.0)));
    }
    let rows = system
        .matrix
        .as_ref()
        .ok_or("system: needs either preset or matrix")?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err("system.matrix: must be a non-empty square matrix".into());
    }
    let mut h = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            h[(i, j)] = C64::new(re, im);
        }
    }
    Ok(h)
}

fn build_side(
    path: &str,
    side: &SideConfig,
    n_sites: usize,
    left: Option<&Reservoir>,
    n_modes_override: Option<usize>,
) -> Result<Reservoir, String> {
    if let Some(p) = &side.proportional {
        let left = left.ok_or_else(|| format!("{path}: proportional needs a left reservoir"))?;
        return make_proportional_right(left, p.lambda)
            .map_err(|e| format!("{path}.proportional: {e}"));
    }
    if let Some(modes) = &side.modes {
        let mut built = Vec::with_capacity(modes.len());
        for (i, mode) in modes.iter().enumerate() {
            if mode.coupling.len() != n_sites {
                return Err(format!(
                    "{path}.modes[{i}].coupling: {} entries for {} system sites",
                    mode.coupling.len(),
                    n_sites
                ));
            }
            let coupling = CVector::from_iterator(
                n_sites,
                mode.coupling.iter().map(|&[re, im]| C64::new(re, im)),
            );
            built.push(
                ReservoirMode::new(mode.omega, mode.gamma, coupling)
                    .map_err(|e| format!("{path}.modes[{i}]: {e}"))?,
            );
        }
        return Ok(Reservoir::new(built));
    }
    let band = side.band.as_ref().ok_or_else(|| {
        format!("{path}: exactly one of modes, band, or proportional is required")
    })?;
    let profile = match band.profile.as_str() {
        "flat" => BandProfile::Flat {
            gamma0: band
                .gamma0
                .ok_or_else(|| format!("{path}.band.gamma0: required"))?,
        },
        "tabulated" => BandProfile::Tabulated {
            points: band
                .points
                .clone()
                .ok_or_else(|| format!("{path}.band.points: required"))?
                .into_iter()
                .map(|[w, g]| (w, g))
                .collect(),
        },
        other => return Err(format!("{path}.band.profile: unknown profile {other:?}")),
    };
    let rule = match band.gamma_rule.as_str() {
        "spacing" => GammaRule::SpacingProportional(band.gamma_value),
        "constant" => GammaRule::Constant(band.gamma_value),
        other => return Err(format!("{path}.band.gamma_rule: unknown rule {other:?}")),
    };
    let site = band.site.unwrap_or(0);
    if site >= n_sites {
        return Err(format!(
            "{path}.band.site: {site} out of range for {n_sites} system sites"
        ));
    }
    let n = n_modes_override.unwrap_or(band.n_modes);
    discretize_band(
        &profile,
        (band.range[0], band.range[1]),
        n,
        BandScheme::Uniform,
        rule,
        site,
        n_sites,
    )
    .map_err(|e| format!("{path}.band: {e}"))
}
