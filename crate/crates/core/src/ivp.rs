//! Scalar initial value problems, trajectories and error metrics.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::method::MethodId;

pub type RhsFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `u'(t) = f(t, u)`, `u(t_start) = u0`, integrated towards increasing `t`.
#[derive(Clone)]
pub struct IvProblem {
    id: String,
    rhs: RhsFn,
    t_start: f64,
    t_end: f64,
    u0: f64,
    exact: Option<ExactFn>,
}

impl IvProblem {
    pub fn new<F>(id: impl Into<String>, rhs: F, t_start: f64, t_end: f64, u0: f64) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let id = id.into();
        if !(t_start < t_end) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::InvalidProblem {
                id,
                reason: format!("need finite t_start < t_end, got ({t_start}, {t_end})"),
            });
        }
        if !u0.is_finite() {
            return Err(Error::InvalidProblem {
                id,
                reason: "initial value is not finite".into(),
            });
        }
        Ok(IvProblem {
            id,
            rhs: Arc::new(rhs),
            t_start,
            t_end,
            u0,
            exact: None,
        })
    }

    /// Attaches a closed-form solution; it must reproduce `u0` at `t_start`.
    pub fn with_exact<E>(mut self, exact: E) -> Result<Self>
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mismatch = (exact(self.t_start) - self.u0).abs();
        if !(mismatch < 1e-12) {
            return Err(Error::InvalidProblem {
                id: self.id,
                reason: format!("exact(t_start) differs from u0 by {mismatch:e}"),
            });
        }
        self.exact = Some(Arc::new(exact));
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    /// Uncounted right-hand side evaluation.
    pub fn rhs(&self, t: f64, u: f64) -> f64 {
        (self.rhs)(t, u)
    }

    pub fn exact(&self, t: f64) -> Option<f64> {
        self.exact.as_ref().map(|e| e(t))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Uniform step for `n` intervals.
    pub fn step_size(&self, n: usize) -> f64 {
        (self.t_end - self.t_start) / n as f64
    }

    /// Grid node `t_k = t_start + k h`.
    pub fn node(&self, k: usize, h: f64) -> f64 {
        self.t_start + k as f64 * h
    }
}

impl fmt::Debug for IvProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IvProblem")
            .field("id", &self.id)
            .field("t_start", &self.t_start)
            .field("t_end", &self.t_end)
            .field("u0", &self.u0)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

/// Running count of right-hand-side evaluations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FeCounter(u64);

impl FeCounter {
    pub fn new() -> Self {
        FeCounter(0)
    }

    pub fn count(&self) -> u64 {
        self.0
    }
}

/// Evaluates `f(t, u)` and bumps the counter by one. A non-finite result
/// aborts the run.
pub fn eval_rhs_counted(
    problem: &IvProblem,
    t: f64,
    u: f64,
    counter: &mut FeCounter,
) -> Result<f64> {
    counter.0 += 1;
    let value = problem.rhs(t, u);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { t, value })
    }
}

/// Samples produced by one integration run on a uniform grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub method: MethodId,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Every right-hand-side call made during the run, startup included.
    pub fe_count: u64,
    /// The part of `fe_count` spent producing and evaluating startup nodes.
    pub startup_fe_count: u64,
    /// Steps that used ε² = 0 because the shape estimate was degenerate or
    /// fallback was forced.
    pub fallback_count: usize,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    pub fn step_size(&self) -> f64 {
        match self.times.len() {
            0 | 1 => 0.0,
            n => (self.times[n - 1] - self.times[0]) / (n - 1) as f64,
        }
    }

    pub fn last_value(&self) -> Option<f64> {
        self.values.last().copied()
    }
}

/// Absolute endpoint error `|u(t_end) - v_N|`.
pub fn global_error(traj: &Trajectory, problem: &IvProblem) -> Result<f64> {
    let exact_end = problem
        .exact(problem.t_end())
        .ok_or_else(|| Error::MissingExact(problem.id().to_string()))?;
    let (t_last, v_last) = match (traj.times.last(), traj.values.last()) {
        (Some(&t), Some(&v)) => (t, v),
        _ => return Err(Error::Domain("empty trajectory".into())),
    };
    let scale = problem.t_end().abs().max(1.0);
    if (t_last - problem.t_end()).abs() > 1e-12 * scale {
        return Err(Error::Domain(format!(
            "trajectory ends at {t_last}, problem ends at {}",
            problem.t_end()
        )));
    }
    Ok((exact_end - v_last).abs())
}

/// `log2(err_coarse / err_fine)` for a pair of runs whose step sizes differ
/// by a factor of two. Returns NaN when either error is not positive.
pub fn observed_order(err_coarse: f64, err_fine: f64) -> f64 {
    if err_coarse > 0.0 && err_fine > 0.0 {
        (err_coarse / err_fine).log2()
    } else {
        f64::NAN
    }
}
