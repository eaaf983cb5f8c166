//! Adaptive quadrature on finite windows.
//!
//! The engine applies a 15-point Kronrod rule with embedded 7-point Gauss
//! error estimation to a worklist of panels, bisecting the panel with the
//! largest error estimate until the summed error drops below the requested
//! tolerance. Subdivision order and summation order are deterministic, so a
//! given integrand always produces bit-identical results.
//!
//! Integrands with known structure (occupation steps at `T = 0`, very narrow
//! resonances) converge much faster when the window is pre-split at those
//! points; see [`integrate_adaptive_with_splits`].

// The tabulated nodes and weights keep their canonical 33-digit forms.
#![allow(clippy::excessive_precision)]

use crate::{Error, Result};

/// Nodes of the 15-point Kronrod rule on `[-1, 1]` (positive half; the rule
/// is symmetric). Odd indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Weights of the embedded 7-point Gauss rule (for `XGK[1]`, `XGK[3]`,
/// `XGK[5]`, `XGK[7]`).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances and budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target (against the current integral magnitude).
    pub rel_tol: f64,
    /// Maximum number of panel bisections before giving up.
    pub max_subdivisions: usize,
    /// Padding multiplier used when deriving integration windows from model
    /// scales (largest relaxation rate or temperature).
    pub window_padding_factor: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            window_padding_factor: 20.0,
        }
    }
}

impl QuadratureSpec {
    /// Check the parameters are usable.
    pub fn validate(&self) -> Result<()> {
        if !self.abs_tol.is_finite() || self.abs_tol < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "abs_tol = {}",
                self.abs_tol
            )));
        }
        if !self.rel_tol.is_finite() || self.rel_tol < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "rel_tol = {}",
                self.rel_tol
            )));
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return Err(Error::InvalidParameter(
                "abs_tol and rel_tol cannot both be zero".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter(
                "max_subdivisions must be >= 1".into(),
            ));
        }
        if !self.window_padding_factor.is_finite() || self.window_padding_factor <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "window_padding_factor = {}",
                self.window_padding_factor
            )));
        }
        Ok(())
    }
}

/// Converged integral with its error estimate and evaluation count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralEstimate {
    /// Integral value.
    pub value: f64,
    /// Summed per-panel error estimate.
    pub abs_error: f64,
    /// Number of integrand evaluations.
    pub n_evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Integrate `f` over `window` adaptively. Equivalent to
/// [`integrate_adaptive_with_splits`] with no interior split points.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    f: F,
    window: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate> {
    integrate_adaptive_with_splits(f, window, &[], spec)
}

/// Integrate `f` over `window`, seeding the panel list with boundaries at the
/// given interior `splits` (points outside the open window are ignored).
///
/// Convergence: the summed panel errors must drop below
/// `max(abs_tol, rel_tol · |value|)`. On failure the best available estimate
/// is carried inside [`Error::QuadratureFailure`].
pub fn integrate_adaptive_with_splits<F: FnMut(f64) -> f64>(
    mut f: F,
    window: (f64, f64),
    splits: &[f64],
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate> {
    spec.validate()?;
    let (a, b) = window;
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::InvalidParameter(format!(
            "integration window [{a}, {b}] must be finite with a <= b"
        )));
    }
    if a == b {
        return Ok(IntegralEstimate {
            value: 0.0,
            abs_error: 0.0,
            n_evaluations: 0,
        });
    }

    let mut boundaries: Vec<f64> = splits.iter().copied().filter(|&s| s > a && s < b).collect();
    boundaries.sort_by(f64::total_cmp);
    boundaries.dedup();
    boundaries.insert(0, a);
    boundaries.push(b);

    let mut n_evaluations = 0usize;
    let eval = |f: &mut F, lo: f64, hi: f64, n: &mut usize| -> Result<Panel> {
        let (value, error) = gk15(f, lo, hi);
        *n += 15;
        if !value.is_finite() {
            return Err(Error::Inconsistent(format!(
                "integrand returned a non-finite value on [{lo}, {hi}]"
            )));
        }
        Ok(Panel {
            a: lo,
            b: hi,
            value,
            error,
        })
    };

    let mut panels = Vec::with_capacity(boundaries.len() + spec.max_subdivisions);
    for pair in boundaries.windows(2) {
        panels.push(eval(&mut f, pair[0], pair[1], &mut n_evaluations)?);
    }

    let mut subdivisions = 0usize;
    loop {
        let total_value: f64 = panels.iter().map(|p| p.value).sum();
        let total_error: f64 = panels.iter().map(|p| p.error).sum();
        let tolerance = spec.abs_tol.max(spec.rel_tol * total_value.abs());
        if total_error <= tolerance {
            break;
        }
        if subdivisions >= spec.max_subdivisions {
            let mut sorted = panels.clone();
            sorted.sort_by(|p, q| f64::total_cmp(&p.a, &q.a));
            return Err(Error::QuadratureFailure {
                best: sorted.iter().map(|p| p.value).sum(),
                error_estimate: total_error,
                n_evaluations,
            });
        }
        // Bisect the panel with the largest error (ties: the leftmost).
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error
                || (p.error == panels[worst].error && p.a < panels[worst].a)
            {
                worst = i;
            }
        }
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = 0.5 * (pa + pb);
        let left = eval(&mut f, pa, mid, &mut n_evaluations)?;
        let right = eval(&mut f, mid, pb, &mut n_evaluations)?;
        panels[worst] = left;
        panels.push(right);
        subdivisions += 1;
    }

    panels.sort_by(|p, q| f64::total_cmp(&p.a, &q.a));
    Ok(IntegralEstimate {
        value: panels.iter().map(|p| p.value).sum(),
        abs_error: panels.iter().map(|p| p.error).sum(),
        n_evaluations,
    })
}

/// One 15-point Kronrod evaluation on `[a, b]`, returning the integral and a
/// conservative error estimate from the embedded Gauss rule.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut resk = WGK[7] * f_center;
    let mut resg = WG[3] * f_center;
    let mut resabs = WGK[7] * f_center.abs();
    let mut samples = [0.0f64; 15];
    samples[7] = f_center;

    for j in 0..7 {
        let dx = half * XGK[j];
        let f_lo = f(center - dx);
        let f_hi = f(center + dx);
        samples[j] = f_lo;
        samples[14 - j] = f_hi;
        resk += WGK[j] * (f_lo + f_hi);
        resabs += WGK[j] * (f_lo.abs() + f_hi.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f_lo + f_hi);
        }
    }

    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((samples[j] - mean).abs() + (samples[14 - j] - mean).abs());
    }

    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * 1.0f64.min((200.0 * error / resasc).powf(1.5));
    }
    let tiny = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > tiny {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    (value, error)
}

/// Gauss-Legendre nodes and weights on `[a, b]`, ascending in the node
/// coordinate. Newton iteration on the Legendre recurrence; exact for
/// polynomials up to degree `2n - 1`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // Only the lower half is computed; the rule is symmetric.
    for i in 0..n.div_ceil(2) {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid + half * x;
        weights[i] = half * w;
        nodes[n - 1 - i] = mid - half * x;
        weights[n - 1 - i] = half * w;
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n(x)` and its derivative via the three-term
/// recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}
