//! Green's functions and spectral densities of the damped junction.
//!
//! Every reservoir mode contributes a Lorentzian of half-width `γ_k/2`: its
//! retarded propagator is `g^r_k(z) = 1/(z − ω_k + iγ_k/2)`, and its lesser
//! function carries the relaxation target `f̃_k`. The system propagator feels
//! the reservoirs through the retarded self-energy
//! `Σ^r(z) = Σ_k v_k v_k† / (z − ω_k + iγ_k/2)`, which is analytic in the
//! upper half-plane because every `γ_k` is strictly positive.

use crate::model::{
    check_proportionality, f_tilde, BiasSpec, JunctionModel, RelaxationKind, ReservoirMode, Side,
};
use crate::{CMatrix, Error, Result, C64};

/// Retarded mode propagator `g^r_k(z) = 1/(z − ω_k + iγ_k/2)`.
pub fn mode_gr(mode: &ReservoirMode, z: C64) -> C64 {
    1.0 / (z - mode.omega() + C64::new(0.0, 0.5 * mode.gamma()))
}

/// Advanced mode propagator `g^a_k(z) = 1/(z − ω_k − iγ_k/2)`.
pub fn mode_ga(mode: &ReservoirMode, z: C64) -> C64 {
    1.0 / (z - mode.omega() - C64::new(0.0, 0.5 * mode.gamma()))
}

/// Lorentzian weight `γ_k / ((ω − ω_k)² + γ_k²/4)`; equals
/// `i (g^r_k − g^a_k)` on the real axis.
pub fn lorentzian_weight(mode: &ReservoirMode, omega: f64) -> f64 {
    let d = omega - mode.omega();
    let g = mode.gamma();
    g / (d * d + 0.25 * g * g)
}

/// Lesser mode function on the real axis,
/// `g^<_k(ω) = i γ_k f̃_k(ω) / ((ω − ω_k)² + γ_k²/4)`.
pub fn mode_glesser(
    mode: &ReservoirMode,
    omega: f64,
    side: Side,
    bias: &BiasSpec,
    kind: RelaxationKind,
) -> C64 {
    C64::new(
        0.0,
        f_tilde(mode, omega, side, bias, kind) * lorentzian_weight(mode, omega),
    )
}

/// Retarded self-energy of one reservoir,
/// `Σ^r_α(z) = Σ_{k∈α} v_k v_k† g^r_k(z)`.
pub fn self_energy_r_side(junction: &JunctionModel, side: Side, z: C64) -> CMatrix {
    let n = junction.n_sites();
    let mut sigma = CMatrix::zeros(n, n);
    for mode in junction.reservoir(side).modes() {
        sigma.gerc(
            mode_gr(mode, z),
            mode.coupling(),
            mode.coupling(),
            C64::new(1.0, 0.0),
        );
    }
    sigma
}

/// Total retarded self-energy `Σ^r(z)`, summed over both reservoirs.
pub fn self_energy_r(junction: &JunctionModel, z: C64) -> CMatrix {
    self_energy_r_side(junction, Side::Left, z) + self_energy_r_side(junction, Side::Right, z)
}

/// System retarded Green's function `G^r(z) = (z − H_S − Σ^r(z))⁻¹`.
///
/// `z` must lie in the closed upper half-plane, where `G^r` is analytic; on
/// the real axis the mode widths keep the resolvent finite unless the system
/// is exactly decoupled and `z` hits an eigenvalue of `H_S`.
pub fn system_gr(junction: &JunctionModel, z: C64) -> Result<CMatrix> {
    let n = junction.n_sites();
    let mut m = -junction.h_system() - self_energy_r(junction, z);
    for i in 0..n {
        m[(i, i)] += z;
    }
    m.lu()
        .try_inverse()
        .ok_or_else(|| Error::SingularMatrix(format!("z − H_S − Σ^r(z) is singular at z = {z}")))
}

/// System advanced Green's function on the real axis, `G^a(ω) = G^r(ω)†`.
pub fn system_ga(junction: &JunctionModel, omega: f64) -> Result<CMatrix> {
    Ok(system_gr(junction, C64::new(omega, 0.0))?.adjoint())
}

/// The four spectral-density matrices of a junction at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensities {
    /// `Γ^L(ω) = Σ_{k∈L} v_k v_k† γ_k / ((ω − ω_k)² + γ_k²/4)`.
    pub gamma_left: CMatrix,
    /// Same for the right reservoir.
    pub gamma_right: CMatrix,
    /// Occupation-weighted density `Γ̃^L(ω)` with `f̃_k` inside the sum.
    pub gamma_tilde_left: CMatrix,
    /// Same for the right reservoir.
    pub gamma_tilde_right: CMatrix,
}

impl SpectralDensities {
    /// `Γ^α` for one side.
    pub fn gamma(&self, side: Side) -> &CMatrix {
        match side {
            Side::Left => &self.gamma_left,
            Side::Right => &self.gamma_right,
        }
    }

    /// `Γ̃^α` for one side.
    pub fn gamma_tilde(&self, side: Side) -> &CMatrix {
        match side {
            Side::Left => &self.gamma_tilde_left,
            Side::Right => &self.gamma_tilde_right,
        }
    }
}

/// Evaluate all four spectral densities at `ω`.
pub fn spectral_densities(
    junction: &JunctionModel,
    omega: f64,
    bias: &BiasSpec,
    kind: RelaxationKind,
) -> SpectralDensities {
    let n = junction.n_sites();
    let one = C64::new(1.0, 0.0);
    let mut out = SpectralDensities {
        gamma_left: CMatrix::zeros(n, n),
        gamma_right: CMatrix::zeros(n, n),
        gamma_tilde_left: CMatrix::zeros(n, n),
        gamma_tilde_right: CMatrix::zeros(n, n),
    };
    for side in [Side::Left, Side::Right] {
        for mode in junction.reservoir(side).modes() {
            let weight = lorentzian_weight(mode, omega);
            let target = f_tilde(mode, omega, side, bias, kind);
            let (gamma, tilde) = match side {
                Side::Left => (&mut out.gamma_left, &mut out.gamma_tilde_left),
                Side::Right => (&mut out.gamma_right, &mut out.gamma_tilde_right),
            };
            gamma.gerc(C64::new(weight, 0.0), mode.coupling(), mode.coupling(), one);
            tilde.gerc(
                C64::new(weight * target, 0.0),
                mode.coupling(),
                mode.coupling(),
                one,
            );
        }
    }
    out
}

/// System lesser function via the Keldysh closure,
/// `G^<(ω) = i G^r (Γ̃^L + Γ̃^R) G^a`.
pub fn system_glesser(
    junction: &JunctionModel,
    omega: f64,
    bias: &BiasSpec,
    kind: RelaxationKind,
) -> Result<CMatrix> {
    let densities = spectral_densities(junction, omega, bias, kind);
    let gr = system_gr(junction, C64::new(omega, 0.0))?;
    let ga = gr.adjoint();
    let tilde_sum = &densities.gamma_tilde_left + &densities.gamma_tilde_right;
    Ok((&gr * tilde_sum * ga).map(|v| v * C64::new(0.0, 1.0)))
}

/// Occupation-difference density of a proportional junction,
/// `ΔΓ̃(ω) = Σ_{k∈L} (f̃^L_k − f̃^R_k) v_k v_k† γ_k / ((ω − ω_k)² + γ_k²/4)`.
///
/// Built from the left modes only; independent of the proportionality factor.
/// Fails when the junction is not proportionally coupled.
pub fn delta_gamma_tilde(
    junction: &JunctionModel,
    omega: f64,
    bias: &BiasSpec,
    kind: RelaxationKind,
) -> Result<CMatrix> {
    if !check_proportionality(junction).is_proportional {
        return Err(Error::NotProportional(
            "ΔΓ̃ is defined only for proportional reservoirs".into(),
        ));
    }
    Ok(delta_gamma_tilde_unchecked(junction, omega, bias, kind))
}

/// [`delta_gamma_tilde`] without the proportionality check, for callers that
/// have already validated the junction and evaluate at many frequencies.
pub(crate) fn delta_gamma_tilde_unchecked(
    junction: &JunctionModel,
    omega: f64,
    bias: &BiasSpec,
    kind: RelaxationKind,
) -> CMatrix {
    let n = junction.n_sites();
    let one = C64::new(1.0, 0.0);
    let mut out = CMatrix::zeros(n, n);
    for mode in junction.left().modes() {
        let df = f_tilde(mode, omega, Side::Left, bias, kind)
            - f_tilde(mode, omega, Side::Right, bias, kind);
        let weight = lorentzian_weight(mode, omega) * df;
        out.gerc(C64::new(weight, 0.0), mode.coupling(), mode.coupling(), one);
    }
    out
}

/// A source of system retarded Green's functions.
///
/// Implementations must be analytic in the open upper half-plane and satisfy
/// `G^r(z)† = G^a(z̄)`; the closed-form current routes accept any provider so
/// the non-interacting resolvent can be swapped for a dressed one.
pub trait GreensProvider {
    /// Evaluate `G^r(z)` for `Im z ≥ 0`.
    fn retarded(&self, z: C64) -> Result<CMatrix>;
    /// System dimension.
    fn dim(&self) -> usize;
}

/// The non-interacting resolvent of a junction: the default
/// [`GreensProvider`].
#[derive(Debug, Clone, Copy)]
pub struct NonInteractingGreens<'a> {
    junction: &'a JunctionModel,
}

impl<'a> NonInteractingGreens<'a> {
    /// Wrap a junction.
    pub fn new(junction: &'a JunctionModel) -> Self {
        Self { junction }
    }
}

impl GreensProvider for NonInteractingGreens<'_> {
    fn retarded(&self, z: C64) -> Result<CMatrix> {
        system_gr(self.junction, z)
    }

    fn dim(&self) -> usize {
        self.junction.n_sites()
    }
}
