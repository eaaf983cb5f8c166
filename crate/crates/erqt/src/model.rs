//! Junction and reservoir model types.
//!
//! A [`JunctionModel`] is a Hermitian system Hamiltonian together with two
//! [`Reservoir`]s of damped modes. Each [`ReservoirMode`] carries a frequency,
//! a relaxation rate `γ > 0`, and a coupling vector to the system sites (the
//! entry `v[i]` is the amplitude on `c†_i c_k`, creating a particle on system
//! site `i` while destroying one in the mode).

use crate::{CMatrix, CVector, Error, Result, C64};

/// Which reservoir a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// The opposite side.
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// How a reservoir mode's relaxation target depends on frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxationKind {
    /// The target occupation of mode `k` is `f_α(ω_k)`, frozen at the mode
    /// frequency. Relaxation is frequency-blind.
    Markovian,
    /// The target occupation follows the probe frequency, `f_α(ω)`; the
    /// wide-band form of frequency-resolved relaxation.
    NonMarkovianWideBand,
}

/// Chemical potentials and temperatures of the two reservoirs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasSpec {
    mu_left: f64,
    mu_right: f64,
    temp_left: f64,
    temp_right: f64,
}

impl BiasSpec {
    /// Build a bias specification. Temperatures must be finite and
    /// non-negative; chemical potentials must be finite.
    pub fn new(mu_left: f64, mu_right: f64, temp_left: f64, temp_right: f64) -> Result<Self> {
        for (name, value) in [("mu_left", mu_left), ("mu_right", mu_right)] {
            if !value.is_finite() {
                return Err(Error::InvalidBias(format!(
                    "{name} = {value} is not finite"
                )));
            }
        }
        for (name, value) in [("temp_left", temp_left), ("temp_right", temp_right)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidBias(format!(
                    "{name} = {value}; temperatures must be finite and >= 0"
                )));
            }
        }
        Ok(Self {
            mu_left,
            mu_right,
            temp_left,
            temp_right,
        })
    }

    /// Equal chemical potential and temperature on both sides.
    pub fn equilibrium(mu: f64, temperature: f64) -> Result<Self> {
        Self::new(mu, mu, temperature, temperature)
    }

    /// Chemical potential of one side.
    pub fn mu(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.mu_left,
            Side::Right => self.mu_right,
        }
    }

    /// Temperature of one side.
    pub fn temperature(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.temp_left,
            Side::Right => self.temp_right,
        }
    }

    /// Fermi-Dirac occupation of one side at frequency `ω`.
    pub fn occupation(&self, side: Side, omega: f64) -> f64 {
        fermi_raw(omega, self.mu(side), self.temperature(side))
    }

    /// A copy with the two sides exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            mu_left: self.mu_right,
            mu_right: self.mu_left,
            temp_left: self.temp_right,
            temp_right: self.temp_left,
        }
    }
}

/// Fermi-Dirac occupation `f(ω) = 1 / (e^{(ω−μ)/T} + 1)`.
///
/// At `T = 0` this is the exact step: 1 below `μ`, 0 above, and `1/2` at
/// `ω = μ`. The evaluation is overflow-safe for arbitrarily large `|ω − μ|`.
pub fn fermi(omega: f64, mu: f64, temperature: f64) -> Result<f64> {
    if !temperature.is_finite() || temperature < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "temperature = {temperature}; must be finite and >= 0"
        )));
    }
    Ok(fermi_raw(omega, mu, temperature))
}

fn fermi_raw(omega: f64, mu: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return match omega.partial_cmp(&mu) {
            Some(std::cmp::Ordering::Less) => 1.0,
            Some(std::cmp::Ordering::Greater) => 0.0,
            _ => 0.5,
        };
    }
    let x = (omega - mu) / temperature;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Relaxation target `f̃` of a reservoir mode: the occupation the damping
/// drives the mode toward when probed at frequency `ω`.
///
/// For [`RelaxationKind::Markovian`] the probe frequency is ignored and the
/// target is `f_α(ω_k)`; for [`RelaxationKind::NonMarkovianWideBand`] it is
/// `f_α(ω)`.
pub fn f_tilde(
    mode: &ReservoirMode,
    omega: f64,
    side: Side,
    bias: &BiasSpec,
    kind: RelaxationKind,
) -> f64 {
    match kind {
        RelaxationKind::Markovian => bias.occupation(side, mode.omega()),
        RelaxationKind::NonMarkovianWideBand => bias.occupation(side, omega),
    }
}

/// A single damped reservoir mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirMode {
    omega: f64,
    gamma: f64,
    coupling: CVector,
}

impl ReservoirMode {
    /// Build a mode. The relaxation rate must be strictly positive and all
    /// parameters finite.
    pub fn new(omega: f64, gamma: f64, coupling: CVector) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mode frequency {omega} is not finite"
            )));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "relaxation rate gamma = {gamma}; must be finite and > 0"
            )));
        }
        if coupling
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "coupling contains a non-finite entry".into(),
            ));
        }
        Ok(Self {
            omega,
            gamma,
            coupling,
        })
    }

    /// Mode frequency `ω_k`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Relaxation rate `γ_k > 0`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Coupling vector to the system sites.
    pub fn coupling(&self) -> &CVector {
        &self.coupling
    }

    /// `v† v`, the squared coupling strength.
    pub fn coupling_norm_sq(&self) -> f64 {
        self.coupling.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// An ordered collection of reservoir modes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Reservoir {
    modes: Vec<ReservoirMode>,
}

impl Reservoir {
    /// Wrap a list of modes.
    pub fn new(modes: Vec<ReservoirMode>) -> Self {
        Self { modes }
    }

    /// The modes in order.
    pub fn modes(&self) -> &[ReservoirMode] {
        &self.modes
    }

    /// Number of modes.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    /// Whether the reservoir has no modes.
    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Largest relaxation rate, or `None` for an empty reservoir.
    pub fn max_gamma(&self) -> Option<f64> {
        self.modes.iter().map(|m| m.gamma).fold(None, |acc, g| {
            Some(match acc {
                Some(a) if a >= g => a,
                _ => g,
            })
        })
    }
}

/// Build a right reservoir proportional to `left`: identical frequencies and
/// rates, couplings scaled by `√λ`.
pub fn make_proportional_right(left: &Reservoir, lambda: f64) -> Result<Reservoir> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "proportionality factor lambda = {lambda}; must be finite and >= 0"
        )));
    }
    let scale = lambda.sqrt();
    let modes = left
        .modes
        .iter()
        .map(|m| ReservoirMode {
            omega: m.omega,
            gamma: m.gamma,
            coupling: m.coupling.map(|v| v * scale),
        })
        .collect();
    Ok(Reservoir::new(modes))
}

/// Result of [`check_proportionality`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionalityReport {
    /// Whether the two reservoirs are proportional.
    pub is_proportional: bool,
    /// The factor `λ` with `v_R = √λ v_L` mode by mode; `Some` only when
    /// proportional.
    pub lambda: Option<f64>,
}

/// Tolerance used by [`check_proportionality`].
const PROPORTIONALITY_REL_TOL: f64 = 1e-10;

/// Decide whether the two reservoirs of a junction are proportional: equal
/// mode counts, matching frequencies and rates, and every right coupling
/// vector equal to `√λ` times the matching left coupling vector for a single
/// `λ ≥ 0`.
///
/// Frequencies and rates are compared to `1e-10` relative with a unit floor;
/// couplings to `1e-10` relative to the per-mode coupling scale. A junction
/// whose couplings all vanish is reported proportional with `λ = 1`.
pub fn check_proportionality(junction: &JunctionModel) -> ProportionalityReport {
    let not = ProportionalityReport {
        is_proportional: false,
        lambda: None,
    };
    let left = junction.left().modes();
    let right = junction.right().modes();
    if left.len() != right.len() {
        return not;
    }

    let close =
        |a: f64, b: f64| (a - b).abs() <= PROPORTIONALITY_REL_TOL * a.abs().max(b.abs()).max(1.0);
    for (l, r) in left.iter().zip(right) {
        if !close(l.omega, r.omega) || !close(l.gamma, r.gamma) {
            return not;
        }
    }

    // Estimate λ from the first mode with a nonzero left coupling.
    let lambda = left
        .iter()
        .zip(right)
        .find(|(l, _)| l.coupling_norm_sq() > 0.0)
        .map(|(l, r)| r.coupling_norm_sq() / l.coupling_norm_sq());
    let lambda = match lambda {
        Some(v) => v,
        // No left coupling anywhere: proportional (λ = 1) only if the right
        // couplings all vanish as well.
        None => {
            return if right.iter().all(|r| r.coupling_norm_sq() == 0.0) {
                ProportionalityReport {
                    is_proportional: true,
                    lambda: Some(1.0),
                }
            } else {
                not
            };
        }
    };

    let sqrt_lambda = lambda.sqrt();
    for (l, r) in left.iter().zip(right) {
        let scale = l
            .coupling
            .iter()
            .map(|v| v.norm() * sqrt_lambda)
            .chain(r.coupling.iter().map(|v| v.norm()))
            .fold(0.0_f64, f64::max);
        let deviation = (0..l.coupling.len())
            .map(|i| (r.coupling[i] - l.coupling[i] * sqrt_lambda).norm())
            .fold(0.0_f64, f64::max);
        if deviation > PROPORTIONALITY_REL_TOL * scale {
            return not;
        }
    }
    ProportionalityReport {
        is_proportional: true,
        lambda: Some(lambda),
    }
}

/// Continuum coupling-density profile `Γ_cont(ω) ≥ 0` used by
/// [`discretize_band`].
#[derive(Debug, Clone, PartialEq)]
pub enum BandProfile {
    /// Constant density `Γ₀` across the band.
    Flat { gamma0: f64 },
    /// Piecewise-linear interpolation through `(ω, Γ)` points; evaluation
    /// clamps to the tabulated range.
    Tabulated { points: Vec<(f64, f64)> },
}

impl BandProfile {
    /// Evaluate the profile at `ω`.
    pub fn value(&self, omega: f64) -> f64 {
        match self {
            BandProfile::Flat { gamma0 } => *gamma0,
            BandProfile::Tabulated { points } => {
                if points.is_empty() {
                    return 0.0;
                }
                if omega <= points[0].0 {
                    return points[0].1;
                }
                if omega >= points[points.len() - 1].0 {
                    return points[points.len() - 1].1;
                }
                let idx = points.partition_point(|p| p.0 <= omega);
                let (x0, y0) = points[idx - 1];
                let (x1, y1) = points[idx];
                if x1 == x0 {
                    y0
                } else {
                    y0 + (y1 - y0) * (omega - x0) / (x1 - x0)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |v: f64| !v.is_finite() || v < 0.0;
        match self {
            BandProfile::Flat { gamma0 } if bad(*gamma0) => Err(Error::InvalidParameter(format!(
                "flat band profile value {gamma0}; must be finite and >= 0"
            ))),
            BandProfile::Tabulated { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidParameter(
                        "tabulated band profile is empty".into(),
                    ));
                }
                if points.windows(2).any(|w| w[1].0 < w[0].0) {
                    return Err(Error::InvalidParameter(
                        "tabulated band profile frequencies must be non-decreasing".into(),
                    ));
                }
                if points.iter().any(|&(x, y)| !x.is_finite() || bad(y)) {
                    return Err(Error::InvalidParameter(
                        "tabulated band profile contains a negative or non-finite value".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Node placement for [`discretize_band`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandScheme {
    /// Midpoints of `N` equal cells; each node carries weight `Δω = (b−a)/N`.
    Uniform,
    /// Gauss-Legendre nodes on the band with the corresponding quadrature
    /// weights as `Δω_k`.
    MidpointGauss,
}

/// How relaxation rates are assigned to discretized modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaRule {
    /// Every mode gets the same rate `c`.
    Constant(f64),
    /// Each mode gets `c · Δω_k`, proportional to its frequency weight.
    SpacingProportional(f64),
}

/// Discretize a continuum band into a [`Reservoir`] of damped modes.
///
/// The band `[ω_min, ω_max]` is sampled at `n` nodes `ω_k` with weights
/// `Δω_k` chosen by `scheme`; each mode couples to system site `site` (of
/// `n_sites`) with real amplitude `|v_k|² = Γ_cont(ω_k) Δω_k / 2π`, so the
/// discrete coupling density reproduces the continuum profile. Relaxation
/// rates follow `gamma_rule`.
pub fn discretize_band(
    profile: &BandProfile,
    range: (f64, f64),
    n: usize,
    scheme: BandScheme,
    gamma_rule: GammaRule,
    site: usize,
    n_sites: usize,
) -> Result<Reservoir> {
    profile.validate()?;
    let (lo, hi) = range;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidParameter(format!(
            "band range [{lo}, {hi}] must be finite with ω_min < ω_max"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "band discretization needs at least one mode".into(),
        ));
    }
    if site >= n_sites {
        return Err(Error::InvalidParameter(format!(
            "coupling site {site} out of range for {n_sites} system sites"
        )));
    }
    match gamma_rule {
        GammaRule::Constant(c) | GammaRule::SpacingProportional(c) => {
            if !c.is_finite() || c <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "gamma rule coefficient {c}; must be finite and > 0"
                )));
            }
        }
    }

    let (nodes, weights): (Vec<f64>, Vec<f64>) = match scheme {
        BandScheme::Uniform => {
            let dw = (hi - lo) / n as f64;
            (
                (0..n).map(|k| lo + (k as f64 + 0.5) * dw).collect(),
                vec![dw; n],
            )
        }
        BandScheme::MidpointGauss => crate::quad::gauss_legendre(n, lo, hi),
    };

    let modes = nodes
        .iter()
        .zip(&weights)
        .map(|(&omega, &dw)| {
            let gamma = match gamma_rule {
                GammaRule::Constant(c) => c,
                GammaRule::SpacingProportional(c) => c * dw,
            };
            let mut coupling = CVector::zeros(n_sites);
            coupling[site] = C64::new(
                (profile.value(omega) * dw / (2.0 * std::f64::consts::PI)).sqrt(),
                0.0,
            );
            ReservoirMode::new(omega, gamma, coupling)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Reservoir::new(modes))
}

/// Relative tolerance for the Hermiticity check on the system Hamiltonian.
const HERMITICITY_REL_TOL: f64 = 1e-12;

/// A system Hamiltonian with a left and a right reservoir.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionModel {
    h_system: CMatrix,
    left: Reservoir,
    right: Reservoir,
}

impl JunctionModel {
    /// Build a junction. The system Hamiltonian must be square and Hermitian
    /// to `1e-12` relative; every coupling vector must match its dimension.
    pub fn new(h_system: CMatrix, left: Reservoir, right: Reservoir) -> Result<Self> {
        if h_system.nrows() != h_system.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "system Hamiltonian is {}x{}, expected square",
                h_system.nrows(),
                h_system.ncols()
            )));
        }
        if h_system
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "system Hamiltonian contains a non-finite entry".into(),
            ));
        }
        let scale = h_system
            .iter()
            .map(|v| v.norm())
            .fold(0.0_f64, f64::max)
            .max(1.0);
        let asym = (&h_system - h_system.adjoint())
            .iter()
            .map(|v| v.norm())
            .fold(0.0_f64, f64::max);
        if asym > HERMITICITY_REL_TOL * scale {
            return Err(Error::InvalidParameter(format!(
                "system Hamiltonian is not Hermitian: max |H - H†| = {asym:.3e}"
            )));
        }
        let n = h_system.nrows();
        for (side, res) in [("left", &left), ("right", &right)] {
            for (k, mode) in res.modes().iter().enumerate() {
                if mode.coupling().len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "{side} mode {k} coupling has length {}, expected {n}",
                        mode.coupling().len()
                    )));
                }
            }
        }
        Ok(Self {
            h_system,
            left,
            right,
        })
    }

    /// Number of system sites.
    pub fn n_sites(&self) -> usize {
        self.h_system.nrows()
    }

    /// The system Hamiltonian.
    pub fn h_system(&self) -> &CMatrix {
        &self.h_system
    }

    /// The left reservoir.
    pub fn left(&self) -> &Reservoir {
        &self.left
    }

    /// The right reservoir.
    pub fn right(&self) -> &Reservoir {
        &self.right
    }

    /// Reservoir on the given side.
    pub fn reservoir(&self, side: Side) -> &Reservoir {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Total number of reservoir modes (both sides).
    pub fn total_modes(&self) -> usize {
        self.left.len() + self.right.len()
    }

    /// Largest relaxation rate over all modes, or `None` if there are no
    /// modes.
    pub fn max_gamma(&self) -> Option<f64> {
        match (self.left.max_gamma(), self.right.max_gamma()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }

    /// A copy with every relaxation rate multiplied by `factor > 0`.
    pub fn scale_gammas(&self, factor: f64) -> Result<Self> {
        if !factor.is_finite() || factor <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma scale factor {factor}; must be finite and > 0"
            )));
        }
        let scale = |res: &Reservoir| {
            Reservoir::new(
                res.modes()
                    .iter()
                    .map(|m| ReservoirMode {
                        omega: m.omega,
                        gamma: m.gamma * factor,
                        coupling: m.coupling.clone(),
                    })
                    .collect(),
            )
        };
        Ok(Self {
            h_system: self.h_system.clone(),
            left: scale(&self.left),
            right: scale(&self.right),
        })
    }

    /// A copy with the two reservoirs exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            h_system: self.h_system.clone(),
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }
}
