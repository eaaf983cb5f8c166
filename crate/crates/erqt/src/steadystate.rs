//! Direct correlation-matrix route to the steady state.
//!
//! For Markovian relaxation the one-particle correlation matrix obeys the
//! linear equation of motion `Ċ = A C + C A† + Q` with `A = −i h̄ − D/2`,
//! where `h̄` is the full single-particle coefficient matrix over
//! `[left modes, system sites, right modes]`, `D` holds the relaxation rates
//! `γ_k` on the reservoir entries, and the pump `Q = diag(γ_k f_α(ω_k))`
//! drives each mode toward its occupation target. The steady state solves the
//! Lyapunov equation `A C + C A† + Q = 0`.
//!
//! Index convention: the stored matrix satisfies `C[(m, n)] = ⟨c†_n c_m⟩`, so
//! occupations sit on the diagonal and the current from reservoir `α` into
//! the system is `I_α = −2 Σ_{k∈α} Σ_j Im[ v̄_{jk} C[(j, k)] ]` with `j`
//! running over system sites.

use crate::linalg;
use crate::model::{BiasSpec, JunctionModel, RelaxationKind, Side};
use crate::{CMatrix, Error, Result, C64};

/// Index layout of the combined one-particle space
/// `[left modes, system sites, right modes]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    /// Number of left-reservoir modes.
    pub n_left: usize,
    /// Number of system sites.
    pub n_sites: usize,
    /// Number of right-reservoir modes.
    pub n_right: usize,
}

impl Layout {
    /// Total dimension.
    pub fn dim(&self) -> usize {
        self.n_left + self.n_sites + self.n_right
    }

    /// Global index of system site `i`.
    pub fn site(&self, i: usize) -> usize {
        self.n_left + i
    }

    /// Global index of mode `k` of one reservoir.
    pub fn mode(&self, side: Side, k: usize) -> usize {
        match side {
            Side::Left => k,
            Side::Right => self.n_left + self.n_sites + k,
        }
    }

    fn matches(&self, junction: &JunctionModel) -> bool {
        self.n_left == junction.left().len()
            && self.n_sites == junction.n_sites()
            && self.n_right == junction.right().len()
    }
}

/// The assembled generator `A = −i h̄ − D/2` and pump `Q` of the correlation
/// dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsOperator {
    a: CMatrix,
    pump: CMatrix,
    layout: Layout,
}

impl DynamicsOperator {
    /// The generator `A`.
    pub fn generator(&self) -> &CMatrix {
        &self.a
    }

    /// The diagonal pump matrix `Q`.
    pub fn pump(&self) -> &CMatrix {
        &self.pump
    }

    /// Index layout.
    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Total dimension.
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }
}

/// Assemble the correlation dynamics of a junction under a bias.
///
/// Only [`RelaxationKind::Markovian`] admits this closed linear form; the
/// frequency-resolved kind is rejected.
pub fn assemble_dynamics(
    junction: &JunctionModel,
    bias: &BiasSpec,
    kind: RelaxationKind,
) -> Result<DynamicsOperator> {
    if kind != RelaxationKind::Markovian {
        return Err(Error::UnsupportedKind(
            "the correlation-matrix dynamics is linear only for Markovian relaxation".into(),
        ));
    }
    let layout = Layout {
        n_left: junction.left().len(),
        n_sites: junction.n_sites(),
        n_right: junction.right().len(),
    };
    let dim = layout.dim();
    let mut h = CMatrix::zeros(dim, dim);
    let mut damping = vec![0.0; dim];
    let mut pump = CMatrix::zeros(dim, dim);

    for i in 0..layout.n_sites {
        for j in 0..layout.n_sites {
            h[(layout.site(i), layout.site(j))] = junction.h_system()[(i, j)];
        }
    }
    for side in [Side::Left, Side::Right] {
        for (k, mode) in junction.reservoir(side).modes().iter().enumerate() {
            let g = layout.mode(side, k);
            h[(g, g)] = C64::new(mode.omega(), 0.0);
            damping[g] = mode.gamma();
            pump[(g, g)] = C64::new(mode.gamma() * bias.occupation(side, mode.omega()), 0.0);
            for i in 0..layout.n_sites {
                let v = mode.coupling()[i];
                h[(layout.site(i), g)] = v;
                h[(g, layout.site(i))] = v.conj();
            }
        }
    }

    let mut a = h.map(|v| v * C64::new(0.0, -1.0));
    for (g, &d) in damping.iter().enumerate() {
        a[(g, g)] -= C64::new(0.5 * d, 0.0);
    }
    Ok(DynamicsOperator { a, pump, layout })
}

/// Hermitian correlation matrix over `[left modes, system sites, right
/// modes]`, with `C[(m, n)] = ⟨c†_n c_m⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    matrix: CMatrix,
    layout: Layout,
}

impl CorrelationMatrix {
    /// Wrap an explicit correlation matrix (e.g. an initial condition for
    /// [`propagate_transient`]). Must be square and match the layout.
    pub fn new(matrix: CMatrix, layout: Layout) -> Result<Self> {
        if matrix.nrows() != layout.dim() || matrix.ncols() != layout.dim() {
            return Err(Error::DimensionMismatch(format!(
                "correlation matrix is {}x{}, layout expects {}",
                matrix.nrows(),
                matrix.ncols(),
                layout.dim()
            )));
        }
        Ok(Self { matrix, layout })
    }

    /// The stored matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Index layout.
    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Mode and site occupations: the real diagonal. Fails if any diagonal
    /// entry has imaginary part at or above `1e-12`.
    pub fn occupations(&self) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.layout.dim());
        for i in 0..self.layout.dim() {
            let d = self.matrix[(i, i)];
            if d.im.abs() >= 1e-12 {
                return Err(Error::Inconsistent(format!(
                    "occupation {i} has imaginary part {:.3e}",
                    d.im
                )));
            }
            out.push(d.re);
        }
        Ok(out)
    }
}

/// Which Lyapunov route produced a steady state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveRoute {
    /// Spectral decomposition of the generator.
    Eigen,
    /// Schur-factor back-substitution, used when the eigenbasis is too
    /// ill-conditioned.
    Schur,
}

/// Numerical details of a steady-state solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateDiagnostics {
    /// Route that produced the accepted solution.
    pub route: SolveRoute,
    /// 1-norm condition number of the eigenvector basis.
    pub eigenvector_condition: f64,
    /// Max-norm of the Lyapunov residual of the accepted solution.
    pub residual: f64,
    /// Set when the eigenbasis was rejected and the solve fell back to the
    /// Schur route.
    pub ill_conditioned_eigenbasis: bool,
}

/// A solved steady state with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// The steady correlation matrix.
    pub correlations: CorrelationMatrix,
    /// Solver diagnostics.
    pub diagnostics: SteadyStateDiagnostics,
}

/// Eigenvector condition number above which the spectral route is abandoned.
const EIGENBASIS_CONDITION_LIMIT: f64 = 1e8;
/// Accepted residual, relative to the largest pump entry.
const RESIDUAL_REL_TOL: f64 = 1e-10;
/// Margin (relative to the generator norm) by which every eigenvalue must sit
/// left of the imaginary axis.
const HURWITZ_REL_MARGIN: f64 = 1e-12;

/// Solve the steady-state Lyapunov equation `A C + C A† + Q = 0`.
///
/// The generator must be strictly stable (every eigenvalue real part below
/// `−1e-12 ‖A‖`); otherwise the steady state is not unique and
/// [`Error::UndampedSubspace`] is returned. The spectral route is preferred;
/// when its eigenbasis condition number exceeds `1e8`, or its residual fails
/// the acceptance test `‖residual‖_max < 1e-10 ‖Q‖_max`, the solve falls back
/// to Schur back-substitution. The returned matrix is exactly Hermitian.
pub fn solve_steady_c(op: &DynamicsOperator) -> Result<SteadyState> {
    let dim = op.dim();
    let a = &op.a;
    let (u, t) = linalg::schur(a)?;
    let eigenvalues = linalg::schur_eigenvalues(&t);
    let a_norm = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let margin = HURWITZ_REL_MARGIN * a_norm;
    if let Some(bad) = eigenvalues.iter().find(|l| l.re >= -margin) {
        return Err(Error::UndampedSubspace(format!(
            "generator eigenvalue {bad} has real part >= -{margin:.3e}; \
             some mode or site is not damped"
        )));
    }

    let q_scale = op.pump.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if q_scale == 0.0 {
        // With a strictly stable generator and no pump the unique steady
        // state is empty.
        return Ok(SteadyState {
            correlations: CorrelationMatrix {
                matrix: CMatrix::zeros(dim, dim),
                layout: op.layout,
            },
            diagnostics: SteadyStateDiagnostics {
                route: SolveRoute::Eigen,
                eigenvector_condition: 1.0,
                residual: 0.0,
                ill_conditioned_eigenbasis: false,
            },
        });
    }
    let residual_tol = RESIDUAL_REL_TOL * q_scale;

    let v = linalg::eigenvectors_from_schur(&u, &t);
    let condition = linalg::condition_number(&v);
    let mut ill_conditioned = condition > EIGENBASIS_CONDITION_LIMIT;

    let mut accepted: Option<(CMatrix, SolveRoute, f64)> = None;
    if !ill_conditioned {
        let v_inv = v
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::SingularMatrix("eigenvector basis is singular".into()))?;
        let c = linalg::lyapunov_from_eigen(&v, &v_inv, &eigenvalues, &op.pump);
        let residual = linalg::lyapunov_residual(a, &c, &op.pump);
        if residual < residual_tol {
            accepted = Some((c, SolveRoute::Eigen, residual));
        } else {
            ill_conditioned = true;
        }
    }
    let (mut c, route, residual) = match accepted {
        Some(found) => found,
        None => {
            let c = linalg::lyapunov_from_schur(&u, &t, &op.pump);
            let residual = linalg::lyapunov_residual(a, &c, &op.pump);
            if residual >= residual_tol {
                return Err(Error::Inconsistent(format!(
                    "steady-state residual {residual:.3e} exceeds {residual_tol:.3e}"
                )));
            }
            (c, SolveRoute::Schur, residual)
        }
    };

    // Symmetrize away the roundoff-level anti-Hermitian part.
    c = (&c + c.adjoint()).map(|v| v * 0.5);
    Ok(SteadyState {
        correlations: CorrelationMatrix {
            matrix: c,
            layout: op.layout,
        },
        diagnostics: SteadyStateDiagnostics {
            route,
            eigenvector_condition: condition,
            residual,
            ill_conditioned_eigenbasis: ill_conditioned,
        },
    })
}

/// Steady current from reservoir `side` into the system, read from a
/// correlation matrix: `I_α = −2 Σ_{k∈α} Σ_j Im[ v̄_{jk} C[(j, k)] ]`.
/// Positive values flow into the system.
pub fn current_from_c(
    junction: &JunctionModel,
    correlations: &CorrelationMatrix,
    side: Side,
) -> Result<f64> {
    let layout = correlations.layout;
    if !layout.matches(junction) {
        return Err(Error::DimensionMismatch(format!(
            "correlation layout {layout:?} does not match the junction \
             ({} left, {} sites, {} right)",
            junction.left().len(),
            junction.n_sites(),
            junction.right().len()
        )));
    }
    let mut current = 0.0;
    for (k, mode) in junction.reservoir(side).modes().iter().enumerate() {
        let col = layout.mode(side, k);
        for j in 0..layout.n_sites {
            let c = correlations.matrix[(layout.site(j), col)];
            current -= 2.0 * (mode.coupling()[j].conj() * c).im;
        }
    }
    Ok(current)
}

/// Integrate the transient `Ċ = A C + C A† + Q` from `c0` to `t_final` with
/// classical fourth-order Runge-Kutta steps of size `dt`.
///
/// The step must satisfy `dt ‖A‖ < 0.1` (∞-norm); the state is re-Hermitized
/// after every step to stop roundoff drift.
pub fn propagate_transient(
    op: &DynamicsOperator,
    c0: &CorrelationMatrix,
    t_final: f64,
    dt: f64,
) -> Result<CorrelationMatrix> {
    if c0.layout != op.layout {
        return Err(Error::DimensionMismatch(
            "initial condition layout does not match the dynamics".into(),
        ));
    }
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(Error::InvalidParameter(format!("t_final = {t_final}")));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!("dt = {dt}")));
    }
    let a_norm = (0..op.a.nrows())
        .map(|i| op.a.row(i).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    if dt * a_norm >= 0.1 {
        return Err(Error::StepSize(format!(
            "dt ‖A‖ = {:.3e} must stay below 0.1 for stable integration",
            dt * a_norm
        )));
    }

    let rhs = |c: &CMatrix| op.a.clone() * c + c * op.a.adjoint() + &op.pump;
    let mut c = c0.matrix.clone();
    let mut remaining = t_final;
    while remaining > 0.0 {
        let h = dt.min(remaining);
        let k1 = rhs(&c);
        let k2 = rhs(&(&c + &k1 * C64::new(0.5 * h, 0.0)));
        let k3 = rhs(&(&c + &k2 * C64::new(0.5 * h, 0.0)));
        let k4 = rhs(&(&c + &k3 * C64::new(h, 0.0)));
        c += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
        c = (&c + c.adjoint()).map(|v| v * 0.5);
        remaining -= h;
    }
    Ok(CorrelationMatrix {
        matrix: c,
        layout: op.layout,
    })
}
