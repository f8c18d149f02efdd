//! Runge-Kutta, Adams-Bashforth and Adams-Moulton step rules built on
//! polynomial interpolation, plus the scalar implicit solver shared with the
//! adaptive methods.

use crate::error::{Error, Result};
use crate::ivp::{eval_rhs_counted, FeCounter, IvProblem};
use crate::method::MethodId;

/// How the implicit Adams-Moulton equation is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImplicitMode {
    /// Predict with the matching Adams-Bashforth step, evaluate, apply the
    /// corrector once, evaluate again.
    Pece,
    /// Iterate `v <- g(v)` to convergence. Switches to Newton when the
    /// probed contraction factor `|g'|` reaches 0.9.
    FixedPoint,
    /// Newton on `v - g(v) = 0` with a central-difference derivative.
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitSolveConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub mode: ImplicitMode,
}

impl Default for ImplicitSolveConfig {
    fn default() -> Self {
        ImplicitSolveConfig {
            tol: 1e-13,
            max_iter: 100,
            mode: ImplicitMode::Pece,
        }
    }
}

impl ImplicitSolveConfig {
    pub fn with_mode(mode: ImplicitMode) -> Self {
        ImplicitSolveConfig {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter < 1 {
            return Err(Error::Domain(format!(
                "implicit solve needs tol > 0 and max_iter >= 1, got {} / {}",
                self.tol, self.max_iter
            )));
        }
        Ok(())
    }
}

/// Outcome of [`solve_scalar_implicit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitSolution {
    pub value: f64,
    pub iterations: usize,
    /// Size of the last update, `|g(v_k) - v_k|` for fixed point.
    pub residual: f64,
    /// The mode that produced the value (fixed point may hand over to Newton).
    pub mode: ImplicitMode,
}

const STIFF_CONTRACTION: f64 = 0.9;

fn numeric_slope<G>(g: &mut G, v: f64) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    let d = 1e-7 * v.abs().max(1.0);
    Ok((g(v + d)? - g(v - d)?) / (2.0 * d))
}

/// Solves `v = g(v)` starting from `v_init`.
pub fn solve_scalar_implicit<G>(
    mut g: G,
    v_init: f64,
    cfg: &ImplicitSolveConfig,
) -> Result<ImplicitSolution>
where
    G: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    match cfg.mode {
        ImplicitMode::Pece => {
            let value = g(v_init)?;
            Ok(ImplicitSolution {
                value,
                iterations: 1,
                residual: (value - v_init).abs(),
                mode: ImplicitMode::Pece,
            })
        }
        ImplicitMode::FixedPoint => {
            if numeric_slope(&mut g, v_init)?.abs() >= STIFF_CONTRACTION {
                return newton(g, v_init, cfg);
            }
            let mut v = v_init;
            let mut residual = f64::INFINITY;
            for it in 1..=cfg.max_iter {
                let next = g(v)?;
                if !next.is_finite() {
                    return Err(Error::ImplicitSolve {
                        iterations: it,
                        residual,
                    });
                }
                residual = (next - v).abs();
                v = next;
                if residual <= cfg.tol * v.abs().max(1.0) {
                    // the last evaluation only confirms the previous iterate
                    return Ok(ImplicitSolution {
                        value: v,
                        iterations: (it - 1).max(1),
                        residual,
                        mode: ImplicitMode::FixedPoint,
                    });
                }
            }
            Err(Error::ImplicitSolve {
                iterations: cfg.max_iter,
                residual,
            })
        }
        ImplicitMode::Newton => newton(g, v_init, cfg),
    }
}

fn newton<G>(mut g: G, v_init: f64, cfg: &ImplicitSolveConfig) -> Result<ImplicitSolution>
where
    G: FnMut(f64) -> Result<f64>,
{
    let mut v = v_init;
    let mut residual = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        let gv = g(v)?;
        let slope = 1.0 - numeric_slope(&mut g, v)?;
        if slope == 0.0 || !slope.is_finite() {
            return Err(Error::ImplicitSolve {
                iterations: it,
                residual,
            });
        }
        let next = v - (v - gv) / slope;
        if !next.is_finite() {
            return Err(Error::ImplicitSolve {
                iterations: it,
                residual,
            });
        }
        residual = (next - v).abs();
        v = next;
        if residual <= cfg.tol * v.abs().max(1.0) {
            return Ok(ImplicitSolution {
                value: v,
                iterations: it,
                residual,
                mode: ImplicitMode::Newton,
            });
        }
    }
    Err(Error::ImplicitSolve {
        iterations: cfg.max_iter,
        residual,
    })
}

/// Interpolation weights (without the factor h), oldest lag first. For the
/// Adams-Moulton rules the last entry multiplies the implicit value.
pub fn classical_coefficients(method: MethodId) -> Result<&'static [f64]> {
    const AB2: [f64; 2] = [-1.0 / 2.0, 3.0 / 2.0];
    const AB3: [f64; 3] = [5.0 / 12.0, -4.0 / 3.0, 23.0 / 12.0];
    const AM2: [f64; 2] = [1.0 / 2.0, 1.0 / 2.0];
    const AM3: [f64; 3] = [-1.0 / 12.0, 2.0 / 3.0, 5.0 / 12.0];
    match method {
        MethodId::AB2 => Ok(&AB2),
        MethodId::AB3 => Ok(&AB3),
        MethodId::AM2 => Ok(&AM2),
        MethodId::AM3 => Ok(&AM3),
        other => Err(Error::NotMultistep(other.name())),
    }
}

/// Classical weights multiplied by `h`.
pub fn scaled_coefficients(method: MethodId, h: f64) -> Result<Vec<f64>> {
    Ok(classical_coefficients(method)?
        .iter()
        .map(|&b| b * h)
        .collect())
}

/// `Σ c_i f_i`, accumulated oldest first.
pub fn weighted_sum(coeffs: &[f64], f: &[f64]) -> f64 {
    debug_assert_eq!(coeffs.len(), f.len());
    coeffs.iter().zip(f).map(|(c, fv)| c * fv).sum()
}

/// `v_prev + Σ c_i f_i`.
pub fn explicit_update(v_prev: f64, coeffs: &[f64], f: &[f64]) -> f64 {
    v_prev + weighted_sum(coeffs, f)
}

/// Result of one corrector step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitStep {
    pub value: f64,
    /// `f(t_next, value)`, already counted.
    pub f_value: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `v = v_prev + (known + c_new f(t_next, v))` starting from
/// `predictor`, then evaluates `f` at the accepted value.
#[allow(clippy::too_many_arguments)]
pub fn corrector_update(
    problem: &IvProblem,
    t_next: f64,
    v_prev: f64,
    known: f64,
    c_new: f64,
    predictor: f64,
    cfg: &ImplicitSolveConfig,
    counter: &mut FeCounter,
) -> Result<ImplicitStep> {
    let sol = solve_scalar_implicit(
        |x| Ok(v_prev + (known + c_new * eval_rhs_counted(problem, t_next, x, counter)?)),
        predictor,
        cfg,
    )?;
    if !sol.value.is_finite() {
        return Err(Error::NonFinite {
            t: t_next,
            value: sol.value,
        });
    }
    let f_value = eval_rhs_counted(problem, t_next, sol.value, counter)?;
    Ok(ImplicitStep {
        value: sol.value,
        f_value,
        iterations: sol.iterations,
        residual: sol.residual,
    })
}

/// Window of consecutive grid values `(t_j, v_j, f_j)` ending at the most
/// recent node.
#[derive(Debug, Clone, Copy)]
pub struct StepHistory<'a> {
    pub times: &'a [f64],
    pub values: &'a [f64],
    pub f: &'a [f64],
    pub h: f64,
}

impl<'a> StepHistory<'a> {
    pub fn new(times: &'a [f64], values: &'a [f64], f: &'a [f64], h: f64) -> Result<Self> {
        if times.len() != values.len() || times.len() != f.len() || times.is_empty() {
            return Err(Error::Domain(
                "history arrays must be non-empty and equally long".into(),
            ));
        }
        if !(h > 0.0) {
            return Err(Error::Domain(format!(
                "step size must be positive, got {h}"
            )));
        }
        Ok(StepHistory {
            times,
            values,
            f,
            h,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The last `k` f-values, oldest first.
    pub fn last_f(&self, k: usize) -> Result<&'a [f64]> {
        let n = self.f.len();
        if n < k {
            return Err(Error::InsufficientHistory {
                needed: k,
                available: n,
            });
        }
        Ok(&self.f[n - k..])
    }

    pub fn last_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn next_time(&self) -> f64 {
        self.times[self.times.len() - 1] + self.h
    }
}

/// One explicit Runge-Kutta step of order 2, 3 or 4.
pub fn rk_step(
    order: u32,
    problem: &IvProblem,
    t: f64,
    v: f64,
    h: f64,
    counter: &mut FeCounter,
) -> Result<f64> {
    let mut f = |t: f64, u: f64| eval_rhs_counted(problem, t, u, counter);
    let next = match order {
        2 => {
            let k1 = h * f(t, v)?;
            let k2 = h * f(t + h, v + k1)?;
            v + (k1 + k2) / 2.0
        }
        3 => {
            let k1 = h * f(t, v)?;
            let k2 = h * f(t + h / 2.0, v + k1 / 2.0)?;
            let k3 = h * f(t + h, v - k1 + 2.0 * k2)?;
            v + (k1 + 4.0 * k2 + k3) / 6.0
        }
        4 => {
            let k1 = h * f(t, v)?;
            let k2 = h * f(t + h / 2.0, v + k1 / 2.0)?;
            let k3 = h * f(t + h / 2.0, v + k2 / 2.0)?;
            let k4 = h * f(t + h, v + k3)?;
            v + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        }
        _ => {
            return Err(Error::Domain(format!(
                "no Runge-Kutta rule of order {order}"
            )))
        }
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::NonFinite {
            t: t + h,
            value: next,
        })
    }
}

/// Explicit k-step Adams-Bashforth update (k = 2 or 3) from the tail of
/// `history`.
pub fn ab_step(k: usize, history: &StepHistory<'_>) -> Result<f64> {
    let method = match k {
        2 => MethodId::AB2,
        3 => MethodId::AB3,
        _ => {
            return Err(Error::Domain(format!(
                "no Adams-Bashforth rule with {k} steps"
            )))
        }
    };
    let coeffs = scaled_coefficients(method, history.h)?;
    let f = history.last_f(k)?;
    Ok(explicit_update(history.last_value(), &coeffs, f))
}

/// Adams-Moulton step of order k (trapezoidal for k = 2), predicted by the
/// k-step Adams-Bashforth rule.
pub fn am_step(
    k: usize,
    history: &StepHistory<'_>,
    problem: &IvProblem,
    cfg: &ImplicitSolveConfig,
    counter: &mut FeCounter,
) -> Result<ImplicitStep> {
    let method = match k {
        2 => MethodId::AM2,
        3 => MethodId::AM3,
        _ => return Err(Error::Domain(format!("no Adams-Moulton rule of order {k}"))),
    };
    let predictor = ab_step(k, history)?;
    let coeffs = scaled_coefficients(method, history.h)?;
    let lags = coeffs.len() - 1;
    let known = weighted_sum(&coeffs[..lags], history.last_f(lags)?);
    corrector_update(
        problem,
        history.next_time(),
        history.last_value(),
        known,
        coeffs[lags],
        predictor,
        cfg,
        counter,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex4() -> IvProblem {
        IvProblem::new("ex4", |_, u| u + 2.0, 0.0, 1.0, -1.0).unwrap()
    }

    #[test]
    fn rk_constant_and_zero_rhs() {
        let zero = IvProblem::new("z", |_, _| 0.0, 0.0, 1.0, 3.0).unwrap();
        let one = IvProblem::new("o", |_, _| 1.0, 0.0, 1.0, 3.0).unwrap();
        let mut c = FeCounter::new();
        for order in [2, 3, 4] {
            assert_eq!(rk_step(order, &zero, 0.0, 3.0, 0.1, &mut c).unwrap(), 3.0);
            assert_eq!(rk_step(order, &one, 0.0, 3.0, 0.25, &mut c).unwrap(), 3.25);
        }
        assert_eq!(c.count(), 2 * (2 + 3 + 4));
        assert!(rk_step(5, &one, 0.0, 0.0, 0.1, &mut c).is_err());
    }

    #[test]
    fn rk2_hand_value() {
        let mut c = FeCounter::new();
        let v = rk_step(2, &ex4(), 0.0, -1.0, 0.1, &mut c).unwrap();
        assert!((v + 0.895).abs() < 1e-15);
        assert!((v - (0.1f64.exp() - 2.0)).abs() < 2e-4);
    }

    #[test]
    fn ab_consistency_and_example() {
        let t = [0.0, 0.1, 0.2];
        let v = [0.0, 0.0, 0.0];
        let f = [1.5, 1.5, 1.5];
        let h = StepHistory::new(&t, &v, &f, 0.1).unwrap();
        assert!((ab_step(2, &h).unwrap() - 0.15).abs() < 1e-15);
        assert!((ab_step(3, &h).unwrap() - 0.15).abs() < 1e-15);

        let f = [1.0, 2.0];
        let h = StepHistory::new(&t[..2], &v[..2], &f, 0.1).unwrap();
        assert!((ab_step(2, &h).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(
            ab_step(3, &h),
            Err(Error::InsufficientHistory {
                needed: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn coefficients_sum_to_one() {
        for m in [MethodId::AB2, MethodId::AB3, MethodId::AM2, MethodId::AM3] {
            let s: f64 = classical_coefficients(m).unwrap().iter().sum();
            assert!((s - 1.0).abs() < 1e-15, "{m}");
        }
        assert!(classical_coefficients(MethodId::RK2).is_err());
    }

    #[test]
    fn am_constant_rhs_is_exact() {
        let p = IvProblem::new("c", |_, _| 2.0, 0.0, 1.0, 0.0).unwrap();
        let t = [0.0, 0.1, 0.2];
        let v = [0.0, 0.2, 0.4];
        let f = [2.0, 2.0, 2.0];
        let h = StepHistory::new(&t, &v, &f, 0.1).unwrap();
        for mode in [
            ImplicitMode::Pece,
            ImplicitMode::FixedPoint,
            ImplicitMode::Newton,
        ] {
            let cfg = ImplicitSolveConfig::with_mode(mode);
            let mut c = FeCounter::new();
            for k in [2, 3] {
                let s = am_step(k, &h, &p, &cfg, &mut c).unwrap();
                assert!((s.value - 0.6).abs() < 1e-15);
                assert_eq!(s.f_value, 2.0);
                if mode != ImplicitMode::Newton {
                    assert_eq!(s.iterations, 1);
                }
            }
        }
    }

    #[test]
    fn trapezoidal_amplification() {
        let lambda = -1.0;
        let p = IvProblem::new("lin", move |_, u| lambda * u, 0.0, 1.0, 1.0).unwrap();
        let t = [0.0, 0.1];
        let v = [1.0, 0.9];
        let f = [-1.0, -0.9];
        let h = StepHistory::new(&t, &v, &f, 0.1).unwrap();
        let mut c = FeCounter::new();
        let cfg = ImplicitSolveConfig::with_mode(ImplicitMode::FixedPoint);
        let s = am_step(2, &h, &p, &cfg, &mut c).unwrap();
        assert!((s.value - 0.9 * 0.95 / 1.05).abs() < 1e-14);
    }

    #[test]
    fn scalar_solver_examples() {
        let fixed = ImplicitSolveConfig::with_mode(ImplicitMode::FixedPoint);
        let newton = ImplicitSolveConfig::with_mode(ImplicitMode::Newton);

        let s = solve_scalar_implicit(|_| Ok(4.0), 0.0, &fixed).unwrap();
        assert_eq!((s.value, s.iterations), (4.0, 1));

        for cfg in [&fixed, &newton] {
            let s = solve_scalar_implicit(|v| Ok(0.5 * v + 1.0), 0.0, cfg).unwrap();
            assert!((s.value - 2.0).abs() < 1e-12);
            let s = solve_scalar_implicit(|v: f64| Ok(v.cos()), 1.0, cfg).unwrap();
            assert!((s.value - 0.739_085_133_215_160_6).abs() < 1e-12);
        }
    }

    #[test]
    fn stiff_fixed_point_hands_over_to_newton() {
        let fixed = ImplicitSolveConfig::with_mode(ImplicitMode::FixedPoint);
        let s = solve_scalar_implicit(|v| Ok(1.0 - 5.0 * v), 0.0, &fixed).unwrap();
        assert_eq!(s.mode, ImplicitMode::Newton);
        assert!((s.value - 1.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn non_convergence_is_reported() {
        let cfg = ImplicitSolveConfig {
            tol: 1e-13,
            max_iter: 3,
            mode: ImplicitMode::FixedPoint,
        };
        let err = solve_scalar_implicit(|v: f64| Ok(0.8 * v.sin() + 3.0), 0.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::ImplicitSolve { iterations: 3, residual } if residual > 0.0));
        let bad = ImplicitSolveConfig { tol: 0.0, ..cfg };
        assert!(solve_scalar_implicit(Ok, 0.0, &bad).is_err());
    }
}
