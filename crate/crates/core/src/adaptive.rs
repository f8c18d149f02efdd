//! Adaptive IMQ/IQ Adams methods.
//!
//! Each step approximates `f` by an RBF interpolant with a single shape
//! parameter and integrates it over the next interval. Expanding the
//! resulting weights in `εh` gives the truncated coefficients used here,
//!
//! ```text
//!     c_i = p_i h + q_i ε² h³,
//! ```
//!
//! where `p_i` are the classical Adams weights. The shape parameter is chosen
//! per step so that the leading local truncation term cancels, with the
//! derivatives in that condition replaced by finite differences of already
//! computed f-values. The estimate `ε²` may be negative: it enters the
//! scheme only through `ε²` and is never square-rooted.
//!
//! The untruncated weights (closed forms in `asinh` / `atan`) are available
//! for the two-step cases to validate the truncation.

use crate::driver::{self, SolveOptions};
use crate::error::{Error, Result};
use crate::ivp::{IvProblem, Trajectory};
use crate::method::MethodId;
use crate::rbf::RbfKind;

/// Per-step shape parameter estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEstimate {
    pub eps_sq: f64,
    /// The stencil denominator was degenerate and `eps_sq` was set to 0.
    pub fallback_used: bool,
    /// The denominator the numerator was divided by (diagnostic).
    pub denominator: f64,
}

impl ShapeEstimate {
    fn fallback(denominator: f64) -> Self {
        ShapeEstimate {
            eps_sq: 0.0,
            fallback_used: true,
            denominator,
        }
    }
}

const DEGENERATE: f64 = 1e-12;

/// `ε²` from the centred second difference of f, for the two-step rules:
/// `-(f_{n+1} - 2 f_n + f_{n-1}) / (d h² f_n)` with `d = 1` (IMQ) or `2` (IQ).
pub fn shape_param_two_lag(
    kind: RbfKind,
    f_prev: f64,
    f_curr: f64,
    f_next: f64,
    h: f64,
) -> ShapeEstimate {
    let second = f_next - 2.0 * f_curr + f_prev;
    let divisor = match kind {
        RbfKind::Imq => 1.0,
        RbfKind::Iq => 2.0,
    };
    let denominator = divisor * h * h * f_curr;
    if f_curr.abs() < DEGENERATE * (second.abs() / (h * h)).max(1.0) {
        return ShapeEstimate::fallback(denominator);
    }
    let eps_sq = -second / denominator;
    if !eps_sq.is_finite() {
        return ShapeEstimate::fallback(denominator);
    }
    ShapeEstimate {
        eps_sq,
        fallback_used: false,
        denominator,
    }
}

/// `ε²` from the backward third difference over the first difference, for
/// the three-step rules:
/// `-(f_{n+2} - 3 f_{n+1} + 3 f_n - f_{n-1}) / (d h² (f_n - f_{n-1}))` with
/// `d = 9` (IMQ) or `12` (IQ).
pub fn shape_param_three_lag(
    kind: RbfKind,
    f_m1: f64,
    f_0: f64,
    f_1: f64,
    f_2: f64,
    h: f64,
) -> ShapeEstimate {
    let numerator = -(f_2 - 3.0 * f_1 + 3.0 * f_0 - f_m1);
    let first = f_0 - f_m1;
    let divisor = match kind {
        RbfKind::Imq => 9.0,
        RbfKind::Iq => 12.0,
    };
    let denominator = divisor * h * h * first;
    if first.abs() < DEGENERATE * (numerator.abs() / (h * h)).max(1.0) {
        return ShapeEstimate::fallback(denominator);
    }
    let eps_sq = numerator / denominator;
    if !eps_sq.is_finite() {
        return ShapeEstimate::fallback(denominator);
    }
    ShapeEstimate {
        eps_sq,
        fallback_used: false,
        denominator,
    }
}

/// Shape estimate for the step that produces `v_m`, given the f-values
/// `f_0 .. f_{m-1}` computed so far.
pub fn estimate_for_step(method: MethodId, f: &[f64], h: f64) -> Result<ShapeEstimate> {
    let kind = method
        .rbf_kind()
        .ok_or(Error::NotRbfMethod(method.name()))?;
    let need = if method.uses_three_lag_shape() { 4 } else { 3 };
    if f.len() < need {
        return Err(Error::InsufficientHistory {
            needed: need,
            available: f.len(),
        });
    }
    let w = &f[f.len() - need..];
    Ok(if need == 4 {
        shape_param_three_lag(kind, w[0], w[1], w[2], w[3], h)
    } else {
        shape_param_two_lag(kind, w[0], w[1], w[2], h)
    })
}

/// Polynomial (`p_i`) and shape (`q_i`) parts of a truncated scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfScheme {
    pub poly: &'static [f64],
    pub shape: &'static [f64],
}

/// Coefficient tables, oldest lag first; for the Adams-Moulton variants the
/// last entry multiplies the implicit value.
pub fn rbf_scheme(method: MethodId) -> Result<RbfScheme> {
    const AB2: [f64; 2] = [-1.0 / 2.0, 3.0 / 2.0];
    const AB3: [f64; 3] = [5.0 / 12.0, -4.0 / 3.0, 23.0 / 12.0];
    const AM2: [f64; 2] = [1.0 / 2.0, 1.0 / 2.0];
    const AM3: [f64; 3] = [-1.0 / 12.0, 2.0 / 3.0, 5.0 / 12.0];

    const IMQ_AB2: [f64; 2] = [31.0 / 24.0, -41.0 / 24.0];
    const IQ_AB2: [f64; 2] = [19.0 / 12.0, -29.0 / 12.0];
    const IMQ_AB3: [f64; 3] = [-213.0 / 80.0, 87.0 / 10.0, -483.0 / 80.0];
    const IQ_AB3: [f64; 3] = [-949.0 / 300.0, 812.0 / 75.0, -2299.0 / 300.0];
    const IMQ_AM2: [f64; 2] = [1.0 / 24.0, 1.0 / 24.0];
    const IQ_AM2: [f64; 2] = [1.0 / 12.0, 1.0 / 12.0];
    const IMQ_AM3: [f64; 3] = [-3.0 / 80.0, -3.0 / 10.0, 27.0 / 80.0];
    const IQ_AM3: [f64; 3] = [-19.0 / 300.0, -28.0 / 75.0, 131.0 / 300.0];

    let (poly, shape): (&'static [f64], &'static [f64]) = match method {
        MethodId::IMQ_AB2 => (&AB2, &IMQ_AB2),
        MethodId::IQ_AB2 => (&AB2, &IQ_AB2),
        MethodId::IMQ_AB3 => (&AB3, &IMQ_AB3),
        MethodId::IQ_AB3 => (&AB3, &IQ_AB3),
        MethodId::IMQ_AM2 => (&AM2, &IMQ_AM2),
        MethodId::IQ_AM2 => (&AM2, &IQ_AM2),
        MethodId::IMQ_AM3 => (&AM3, &IMQ_AM3),
        MethodId::IQ_AM3 => (&AM3, &IQ_AM3),
        other => return Err(Error::NotRbfMethod(other.name())),
    };
    Ok(RbfScheme { poly, shape })
}

/// Step multipliers `p_i h + q_i ε² h³` for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfStepCoeffs {
    pub method: MethodId,
    pub eps_sq: f64,
    pub h: f64,
    pub multipliers: Vec<f64>,
}

pub fn truncated_step_coeffs(method: MethodId, eps_sq: f64, h: f64) -> Result<RbfStepCoeffs> {
    let scheme = rbf_scheme(method)?;
    let h3 = h * h * h;
    let multipliers = scheme
        .poly
        .iter()
        .zip(scheme.shape)
        .map(|(&p, &q)| p * h + q * eps_sq * h3)
        .collect();
    Ok(RbfStepCoeffs {
        method,
        eps_sq,
        h,
        multipliers,
    })
}

fn require_positive(eps: f64, h: f64) -> Result<()> {
    if !(eps > 0.0) || !(h > 0.0) || !eps.is_finite() || !h.is_finite() {
        return Err(Error::Domain(format!(
            "exact coefficients need eps > 0 and h > 0, got eps = {eps}, h = {h}"
        )));
    }
    Ok(())
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

// Below this εh the closed forms lose digits to cancellation (the numerator
// is O((εh)³) built from O(εh) terms); use their Maclaurin series in (εh)².
const SERIES_BELOW: f64 = 0.02;

/// Untruncated two-step Adams-Bashforth weights `(β0, β1)` such that
/// `v_{n+2} = v_{n+1} + h (β0 f_n + β1 f_{n+1})`.
pub fn exact_beta_ab2(kind: RbfKind, eps: f64, h: f64) -> Result<(f64, f64)> {
    require_positive(eps, h)?;
    let a = eps * h;
    if a < SERIES_BELOW {
        let a2 = a * a;
        let (b0, b1): (&[f64], &[f64]) = match kind {
            RbfKind::Imq => (
                &[
                    -0.5,
                    31.0 / 24.0,
                    -821.0 / 240.0,
                    133141.0 / 13440.0,
                    -2444003.0 / 80640.0,
                ],
                &[
                    1.5,
                    -41.0 / 24.0,
                    1039.0 / 240.0,
                    -55113.0 / 4480.0,
                    2992897.0 / 80640.0,
                ],
            ),
            RbfKind::Iq => (
                &[
                    -0.5,
                    19.0 / 12.0,
                    -583.0 / 120.0,
                    8843.0 / 560.0,
                    -536707.0 / 10080.0,
                ],
                &[
                    1.5,
                    -29.0 / 12.0,
                    857.0 / 120.0,
                    -38431.0 / 1680.0,
                    766973.0 / 10080.0,
                ],
            ),
        };
        return Ok((horner(b0, a2), horner(b1, a2)));
    }
    let a3 = a * a * a;
    Ok(match kind {
        RbfKind::Imq => {
            let s = (1.0 + a * a).sqrt();
            let (as1, as2) = (a.asinh(), (2.0 * a).asinh());
            (
                s / a3 * (s * as2 - (1.0 + s) * as1),
                s / a3 * ((1.0 + s) * as1 - as2),
            )
        }
        RbfKind::Iq => {
            let q = 1.0 + a * a;
            let c = q / (a3 * (2.0 + a * a));
            let (at1, at2) = (a.atan(), (2.0 * a).atan());
            (
                c * (q * at2 - (2.0 + a * a) * at1),
                c * ((2.0 + a * a) * at1 - at2),
            )
        }
    })
}

/// Untruncated IMQ trapezoidal weight `β` such that
/// `v_{n+2} = v_{n+1} + h β (f_{n+2} + f_{n+1})`.
pub fn exact_beta_am2_imq(eps: f64, h: f64) -> Result<f64> {
    require_positive(eps, h)?;
    let a = eps * h;
    if a < SERIES_BELOW {
        let series = [
            0.5,
            1.0 / 24.0,
            -11.0 / 240.0,
            491.0 / 13440.0,
            -2333.0 / 80640.0,
        ];
        return Ok(horner(&series, a * a));
    }
    let s = (1.0 + a * a).sqrt();
    Ok((a * a - s + 1.0) * a.asinh() / (a * a * a))
}

/// Integrates `problem` with one of the eight adaptive methods on `n`
/// uniform steps.
pub fn rbf_integrate(
    problem: &IvProblem,
    method: MethodId,
    n: usize,
    opts: &SolveOptions,
) -> Result<Trajectory> {
    if !method.is_rbf() {
        return Err(Error::NotRbfMethod(method.name()));
    }
    driver::integrate(problem, method, n, opts)
}
