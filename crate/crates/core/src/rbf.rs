//! Inverse-multiquadric and inverse-quadratic radial basis functions in one
//! dimension, the interpolation system they induce, and the closed-form
//! two- and three-point derivative stencils on a uniform grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RbfKind {
    /// `1 / sqrt(1 + ε² r²)`
    Imq,
    /// `1 / (1 + ε² r²)`
    Iq,
}

impl RbfKind {
    /// `φ(r, ε)` for a distance `r >= 0`.
    pub fn phi(self, r: f64, eps: f64) -> f64 {
        let q = 1.0 + eps * eps * r * r;
        match self {
            RbfKind::Imq => 1.0 / q.sqrt(),
            RbfKind::Iq => 1.0 / q,
        }
    }

    /// `d/dx φ(|x - c|, ε)` written in terms of the signed offset `d = x - c`.
    pub fn dphi(self, d: f64, eps: f64) -> f64 {
        let e2 = eps * eps;
        let q = 1.0 + e2 * d * d;
        match self {
            RbfKind::Imq => -e2 * d / (q * q.sqrt()),
            RbfKind::Iq => -2.0 * e2 * d / (q * q),
        }
    }
}

/// `φ(|x - center|, eps)`. Always in `(0, 1]`.
pub fn basis_eval(kind: RbfKind, x: f64, center: f64, eps: f64) -> f64 {
    kind.phi((x - center).abs(), eps)
}

/// Interpolation data on strictly increasing nodes with one shared shape
/// parameter.
#[derive(Debug, Clone)]
pub struct InterpSystem {
    nodes: Vec<f64>,
    data: Vec<f64>,
    kind: RbfKind,
    eps: f64,
}

impl InterpSystem {
    pub fn new(nodes: Vec<f64>, data: Vec<f64>, kind: RbfKind, eps: f64) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != data.len() {
            return Err(Error::Domain(format!(
                "{} nodes for {} data values",
                nodes.len(),
                data.len()
            )));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("nodes must be strictly increasing".into()));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::Domain(format!(
                "shape parameter must be >= 0, got {eps}"
            )));
        }
        Ok(InterpSystem {
            nodes,
            data,
            kind,
            eps,
        })
    }

    /// Nodes `x0, x0 + h, ...` for the given data.
    pub fn uniform(x0: f64, h: f64, data: Vec<f64>, kind: RbfKind, eps: f64) -> Result<Self> {
        let nodes = (0..data.len()).map(|k| x0 + k as f64 * h).collect();
        Self::new(nodes, data, kind, eps)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn kind(&self) -> RbfKind {
        self.kind
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Row-major interpolation matrix `A_ij = φ(|x_i - x_j|, ε)`.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.nodes
            .iter()
            .map(|&xi| {
                self.nodes
                    .iter()
                    .map(|&xj| self.kind.phi((xi - xj).abs(), self.eps))
                    .collect()
            })
            .collect()
    }

    /// `r(x) = Σ λ_k φ(|x - x_k|, ε)`.
    pub fn evaluate(&self, weights: &[f64], x: f64) -> f64 {
        self.nodes
            .iter()
            .zip(weights)
            .map(|(&xk, &l)| l * self.kind.phi((x - xk).abs(), self.eps))
            .sum()
    }

    /// `r'(x)` of the interpolant.
    pub fn derivative(&self, weights: &[f64], x: f64) -> f64 {
        self.nodes
            .iter()
            .zip(weights)
            .map(|(&xk, &l)| l * self.kind.dphi(x - xk, self.eps))
            .sum()
    }
}

/// Solves the interpolation system for the expansion weights by Gaussian
/// elimination with partial pivoting.
pub fn solve_interp_weights(system: &InterpSystem) -> Result<Vec<f64>> {
    let mut a = system.matrix();
    let mut b = system.data.clone();
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty column");
        let pivot = a[pivot_row][col];
        if pivot.abs() < 1e-14 * scale {
            return Err(Error::Conditioning { pivot: pivot.abs() });
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// Derivative at the left node of the two-point interpolant through
/// `(x0, u0), (x0 + h, u1)`. Reduces to `(u1 - u0) / h` at `eps = 0`.
pub fn deriv_two_point(kind: RbfKind, u0: f64, u1: f64, h: f64, eps: f64) -> f64 {
    let a2 = eps * eps * h * h;
    match kind {
        RbfKind::Imq => (u1 * (1.0 + a2).sqrt() - u0) / ((1.0 + a2) * h),
        RbfKind::Iq => 2.0 * (u1 * (1.0 + a2) - u0) / ((1.0 + a2) * (2.0 + a2) * h),
    }
}

/// Derivative at the middle node of the three-point interpolant through
/// `(x0 - h, u0), (x0, u1), (x0 + h, u2)`. Reduces to `(u2 - u0) / 2h` at
/// `eps = 0`. The middle value does not enter.
pub fn deriv_three_point(kind: RbfKind, u0: f64, _u1: f64, u2: f64, h: f64, eps: f64) -> f64 {
    let a2 = eps * eps * h * h;
    let q4 = 1.0 + 4.0 * a2;
    let q1 = 1.0 + a2;
    match kind {
        RbfKind::Imq => (q4 + q4.sqrt()) * (u2 - u0) / (4.0 * h * q1 * q1.sqrt()),
        RbfKind::Iq => q4 * (u2 - u0) / (2.0 * h * q1 * q1),
    }
}
