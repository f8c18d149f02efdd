//! Fixed-step integration on the uniform grid `t_k = t_start + k h`.
//!
//! Classical and adaptive multistep methods share one march; they differ
//! only in where the per-step weights come from. At `ε² = 0` the adaptive
//! weights equal the classical ones bit for bit, so a run with forced
//! fallback reproduces its classical counterpart exactly.

use crate::adaptive::{estimate_for_step, truncated_step_coeffs};
use crate::classical::{
    corrector_update, explicit_update, rk_step, scaled_coefficients, weighted_sum,
    ImplicitSolveConfig,
};
use crate::error::{Error, Result};
use crate::ivp::{eval_rhs_counted, FeCounter, IvProblem, Trajectory};
use crate::method::{Family, MethodId};

/// Source of the values at the startup nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Startup {
    /// The closed-form solution, or RK4 when the problem has none.
    #[default]
    Exact,
    /// Classical RK4 steps from `u0`.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveOptions {
    pub startup: Startup,
    pub implicit: ImplicitSolveConfig,
    /// Use `ε² = 0` on every adaptive step.
    pub force_fallback: bool,
    /// Clamp the shape estimate to `|ε² h²| <= bound`.
    pub eps_sq_bound: Option<f64>,
}

fn check_steps(method: MethodId, n: usize) -> Result<()> {
    let min = method.startup_nodes();
    if n < min {
        return Err(Error::TooFewSteps {
            method: method.name(),
            min,
            n,
        });
    }
    Ok(())
}

/// Integrates `problem` with `method` on `n` uniform steps.
pub fn integrate(
    problem: &IvProblem,
    method: MethodId,
    n: usize,
    opts: &SolveOptions,
) -> Result<Trajectory> {
    check_steps(method, n)?;
    opts.implicit.validate()?;
    let h = problem.step_size(n);
    let mut counter = FeCounter::new();
    let initial = startup_values(
        problem,
        method.startup_nodes(),
        h,
        opts.startup,
        &mut counter,
    )?;
    march(problem, method, n, initial, opts, counter)
}

/// Like [`integrate`], but with caller-supplied values at the first
/// `method.startup_nodes()` grid nodes.
pub fn integrate_from(
    problem: &IvProblem,
    method: MethodId,
    n: usize,
    initial: &[f64],
    opts: &SolveOptions,
) -> Result<Trajectory> {
    check_steps(method, n)?;
    opts.implicit.validate()?;
    let s = method.startup_nodes();
    if initial.len() != s {
        return Err(Error::InsufficientHistory {
            needed: s,
            available: initial.len(),
        });
    }
    if let Some(&value) = initial.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            t: problem.t_start(),
            value,
        });
    }
    march(problem, method, n, initial.to_vec(), opts, FeCounter::new())
}

/// Values at nodes `0 .. count`. RK4 stage evaluations are counted.
pub fn startup_values(
    problem: &IvProblem,
    count: usize,
    h: f64,
    startup: Startup,
    counter: &mut FeCounter,
) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(count);
    values.push(problem.u0());
    for k in 1..count {
        let t = problem.node(k, h);
        let v = match (startup, problem.exact(t)) {
            (Startup::Exact, Some(u)) => u,
            _ => rk_step(
                4,
                problem,
                problem.node(k - 1, h),
                values[k - 1],
                h,
                counter,
            )?,
        };
        values.push(v);
    }
    Ok(values)
}

fn march(
    problem: &IvProblem,
    method: MethodId,
    n: usize,
    initial: Vec<f64>,
    opts: &SolveOptions,
    counter: FeCounter,
) -> Result<Trajectory> {
    let h = problem.step_size(n);
    let times: Vec<f64> = (0..=n).map(|k| problem.node(k, h)).collect();
    match method.family() {
        Family::RungeKutta => rk_march(problem, method, h, times, initial[0], counter),
        _ => multistep_march(problem, method, h, times, initial, opts, counter),
    }
}

fn rk_march(
    problem: &IvProblem,
    method: MethodId,
    h: f64,
    times: Vec<f64>,
    v0: f64,
    mut counter: FeCounter,
) -> Result<Trajectory> {
    let startup_fe_count = counter.count();
    let mut values = Vec::with_capacity(times.len());
    values.push(v0);
    for k in 0..times.len() - 1 {
        let v = rk_step(
            method.order(),
            problem,
            times[k],
            values[k],
            h,
            &mut counter,
        )?;
        values.push(v);
    }
    Ok(Trajectory {
        method,
        times,
        values,
        fe_count: counter.count(),
        startup_fe_count,
        fallback_count: 0,
    })
}

/// Per-step weights for `method`, oldest lag first.
fn step_weights(method: MethodId, eps_sq: f64, h: f64) -> Result<Vec<f64>> {
    if method.is_rbf() {
        Ok(truncated_step_coeffs(method, eps_sq, h)?.multipliers)
    } else {
        scaled_coefficients(method, h)
    }
}

fn multistep_march(
    problem: &IvProblem,
    method: MethodId,
    h: f64,
    times: Vec<f64>,
    mut values: Vec<f64>,
    opts: &SolveOptions,
    mut counter: FeCounter,
) -> Result<Trajectory> {
    let n = times.len() - 1;
    let s = values.len();
    values.reserve(n + 1 - s);
    let mut f = Vec::with_capacity(n + 1);
    for (k, &v) in values.iter().enumerate() {
        f.push(eval_rhs_counted(problem, times[k], v, &mut counter)?);
    }
    let startup_fe_count = counter.count();
    let mut fallback_count = 0;

    for m in s..=n {
        let eps_sq = if !method.is_rbf() {
            0.0
        } else if opts.force_fallback {
            fallback_count += 1;
            0.0
        } else {
            let est = estimate_for_step(method, &f, h)?;
            if est.fallback_used {
                fallback_count += 1;
            }
            match opts.eps_sq_bound {
                Some(bound) => est.eps_sq.clamp(-bound / (h * h), bound / (h * h)),
                None => est.eps_sq,
            }
        };

        let t = times[m];
        let v_prev = values[m - 1];
        let (v, fv) = match method.family() {
            Family::AdamsBashforth => {
                let w = step_weights(method, eps_sq, h)?;
                let v = explicit_update(v_prev, &w, &f[m - w.len()..]);
                if !v.is_finite() {
                    return Err(Error::NonFinite { t, value: v });
                }
                (v, eval_rhs_counted(problem, t, v, &mut counter)?)
            }
            _ => {
                let pred_method = method
                    .predictor()
                    .ok_or(Error::NotMultistep(method.name()))?;
                let pw = step_weights(pred_method, eps_sq, h)?;
                let predictor = explicit_update(v_prev, &pw, &f[m - pw.len()..]);
                let w = step_weights(method, eps_sq, h)?;
                let lags = w.len() - 1;
                let known = weighted_sum(&w[..lags], &f[m - lags..]);
                let st = corrector_update(
                    problem,
                    t,
                    v_prev,
                    known,
                    w[lags],
                    predictor,
                    &opts.implicit,
                    &mut counter,
                )?;
                (st.value, st.f_value)
            }
        };
        values.push(v);
        f.push(fv);
    }

    Ok(Trajectory {
        method,
        times,
        values,
        fe_count: counter.count(),
        startup_fe_count,
        fallback_count,
    })
}
