//! Absolute stability of the step rules applied to `u' = λu`, `z = hλ`.
//!
//! Substituting `f_j = λ v_j` and `v_j = ζ^j` turns each method into a
//! polynomial in `ζ` whose coefficients are polynomials in `z`. For the
//! adaptive rules the shape estimate on this test equation is `ε² = c λ²`
//! with a method-dependent constant `c`, so the `ε² h³` weights contribute
//! `z³` terms. A point `z` is stable when the roots satisfy the root
//! condition.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::adaptive::rbf_scheme;
use crate::classical::classical_coefficients;
use crate::error::{Error, Result};
use crate::method::{Family, MethodId};

/// Real coefficients of `z^0 .. z^4`.
pub type ZPoly = [f64; 5];

fn zpoly_eval(p: &ZPoly, z: Complex64) -> Complex64 {
    p.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// How the polynomial is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolyMode {
    /// From the scheme's weights and the shape substitution.
    #[default]
    Derived,
    /// The closed forms as usually tabulated for the eight adaptive rules.
    /// Classical methods have no separate printed form and use `Derived`.
    Printed,
}

impl FromStr for PolyMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "derived" => Ok(PolyMode::Derived),
            "printed" | "as_printed" | "as-printed" => Ok(PolyMode::Printed),
            other => Err(format!(
                "unknown polynomial mode `{other}`; expected derived or printed"
            )),
        }
    }
}

impl fmt::Display for PolyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolyMode::Derived => "derived",
            PolyMode::Printed => "printed",
        })
    }
}

/// `ε² = c λ²` on the linear test equation.
pub fn shape_substitution(method: MethodId) -> f64 {
    use MethodId::*;
    match method {
        IMQ_AB2 | IMQ_AM2 => -1.0,
        IQ_AB2 | IQ_AM2 => -0.5,
        IMQ_AB3 | IMQ_AM3 => -1.0 / 9.0,
        IQ_AB3 | IQ_AM3 => -1.0 / 12.0,
        _ => 0.0,
    }
}

/// `π(ζ; z)` with ζ-coefficients as polynomials in `z`, highest ζ power
/// first.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicPolynomial {
    pub method: MethodId,
    pub mode: PolyMode,
    pub coeffs: Vec<ZPoly>,
}

impl SymbolicPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn at(&self, z: Complex64) -> StabilityPolynomial {
        StabilityPolynomial {
            z,
            coeffs: self.coeffs.iter().map(|p| zpoly_eval(p, z)).collect(),
        }
    }
}

/// `π(ζ; z)` at a fixed `z`; coefficients highest power first.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityPolynomial {
    pub z: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl StabilityPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        horner(&self.coeffs, zeta)
    }

    /// Leading coefficient is negligible against the others.
    pub fn is_degenerate(&self) -> bool {
        let max = max_abs(&self.coeffs);
        max == 0.0 || self.coeffs[0].norm() <= LEADING_TOL * max
    }
}

fn derived(method: MethodId) -> Result<Vec<ZPoly>> {
    if method.family() == Family::RungeKutta {
        let r: ZPoly = match method {
            MethodId::RK2 => [1.0, 1.0, 0.5, 0.0, 0.0],
            MethodId::RK3 => [1.0, 1.0, 0.5, 1.0 / 6.0, 0.0],
            _ => [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0],
        };
        // ζ - R(z)
        return Ok(vec![[1.0, 0.0, 0.0, 0.0, 0.0], r.map(|c| -c)]);
    }
    let (poly, shape): (&[f64], &[f64]) = if method.is_rbf() {
        let s = rbf_scheme(method)?;
        (s.poly, s.shape)
    } else {
        (classical_coefficients(method)?, &[0.0; 3])
    };
    let c = shape_substitution(method);
    // b_i(z) multiplies ζ^i: p_i z + q_i c z³
    let b: Vec<ZPoly> = poly
        .iter()
        .zip(shape)
        .map(|(&p, &q)| [0.0, p, 0.0, q * c, 0.0])
        .collect();
    let k = match method.family() {
        Family::AdamsBashforth => b.len(),
        _ => b.len() - 1,
    };
    // coefficient of ζ^j, stored at index k - j
    let mut out = vec![[0.0; 5]; k + 1];
    out[0][0] += 1.0;
    out[1][0] -= 1.0;
    for (j, bj) in b.iter().enumerate() {
        for (d, &v) in bj.iter().enumerate() {
            out[k - j][d] -= v;
        }
    }
    Ok(out)
}

fn printed(method: MethodId) -> Option<Vec<ZPoly>> {
    use MethodId::*;
    let v = match method {
        IMQ_AB2 => vec![
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [-1.0, -3.0 / 2.0, 0.0, -41.0 / 24.0, 0.0],
            [0.0, 1.0 / 2.0, 0.0, 31.0 / 24.0, 0.0],
        ],
        IQ_AB2 => vec![
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [-1.0, -3.0 / 2.0, 0.0, -29.0 / 24.0, 0.0],
            [0.0, 1.0 / 2.0, 0.0, 19.0 / 24.0, 0.0],
        ],
        IMQ_AB3 => vec![
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [-1.0, -23.0 / 12.0, 0.0, -483.0 / 720.0, 0.0],
            [0.0, 4.0 / 3.0, 0.0, 87.0 / 90.0, 0.0],
            [0.0, -5.0 / 12.0, 0.0, -213.0 / 720.0, 0.0],
        ],
        IQ_AB3 => vec![
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [-1.0, -23.0 / 12.0, 0.0, -2299.0 / 3600.0, 0.0],
            [0.0, 4.0 / 3.0, 0.0, 812.0 / 900.0, 0.0],
            [0.0, -5.0 / 12.0, 0.0, -949.0 / 3600.0, 0.0],
        ],
        IMQ_AM2 | IQ_AM2 => vec![
            [1.0, -1.0 / 2.0, 0.0, 1.0 / 24.0, 0.0],
            [-1.0, -1.0 / 2.0, 0.0, 1.0 / 24.0, 0.0],
        ],
        IMQ_AM3 => vec![
            [1.0, -5.0 / 12.0, 0.0, 27.0 / 80.0, 0.0],
            [-1.0, -2.0 / 3.0, 0.0, -3.0 / 90.0, 0.0],
            [0.0, 1.0 / 12.0, 0.0, -3.0 / 720.0, 0.0],
        ],
        IQ_AM3 => vec![
            [1.0, -5.0 / 12.0, 0.0, 131.0 / 3600.0, 0.0],
            [-1.0, -2.0 / 3.0, 0.0, -28.0 / 900.0, 0.0],
            [0.0, 1.0 / 12.0, 0.0, -19.0 / 3600.0, 0.0],
        ],
        _ => return None,
    };
    Some(v)
}

/// The symbolic stability polynomial of `method`.
pub fn symbolic_polynomial(method: MethodId, mode: PolyMode) -> Result<SymbolicPolynomial> {
    let (coeffs, mode) = match (mode, printed(method)) {
        (PolyMode::Printed, Some(p)) => (p, PolyMode::Printed),
        _ => (derived(method)?, PolyMode::Derived),
    };
    Ok(SymbolicPolynomial {
        method,
        mode,
        coeffs,
    })
}

pub fn stability_polynomial(
    method: MethodId,
    z: Complex64,
    mode: PolyMode,
) -> Result<StabilityPolynomial> {
    Ok(symbolic_polynomial(method, mode)?.at(z))
}

/// One coefficient where the printed and derived forms disagree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy {
    pub method: MethodId,
    pub zeta_power: usize,
    pub z_power: usize,
    pub printed: f64,
    pub derived: f64,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: coefficient of zeta^{} z^{} printed {} vs derived {}",
            self.method, self.zeta_power, self.z_power, self.printed, self.derived
        )
    }
}

/// Coefficients differing by more than `tol` between the two modes.
pub fn printed_discrepancies(method: MethodId, tol: f64) -> Result<Vec<Discrepancy>> {
    let d = derived(method)?;
    let Some(p) = printed(method) else {
        return Ok(Vec::new());
    };
    let degree = d.len() - 1;
    let mut out = Vec::new();
    for (i, (pz, dz)) in p.iter().zip(&d).enumerate() {
        for (k, (&pv, &dv)) in pz.iter().zip(dz).enumerate() {
            if (pv - dv).abs() > tol {
                out.push(Discrepancy {
                    method,
                    zeta_power: degree - i,
                    z_power: k,
                    printed: pv,
                    derived: dv,
                });
            }
        }
    }
    Ok(out)
}

const LEADING_TOL: f64 = 1e-14;

fn max_abs(c: &[Complex64]) -> f64 {
    c.iter().fold(0.0f64, |m, v| m.max(v.norm()))
}

fn horner(c: &[Complex64], x: Complex64) -> Complex64 {
    c.iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &v| acc * x + v)
}

/// Roots of a polynomial, highest power first.
#[derive(Debug, Clone, PartialEq)]
pub struct Roots {
    pub roots: Vec<Complex64>,
    /// Negligible leading coefficients were dropped: at least one root
    /// escaped to infinity.
    pub degree_reduced: bool,
}

/// All roots: closed form up to degree 2, Durand-Kerner for degree 3.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Roots> {
    let max = max_abs(coeffs);
    if max == 0.0 || coeffs.len() < 2 {
        return Err(Error::Domain("polynomial has no roots to find".into()));
    }
    let start = coeffs
        .iter()
        .position(|c| c.norm() > LEADING_TOL * max)
        .expect("nonzero coefficient exists");
    let degree_reduced = start > 0;
    let mut c: Vec<Complex64> = coeffs[start..].to_vec();
    if c.len() < 2 {
        return Err(Error::Domain(
            "polynomial is constant after degree reduction".into(),
        ));
    }
    let mut roots = Vec::with_capacity(c.len() - 1);
    // exact zero roots
    while c.len() > 1 && c[c.len() - 1] == Complex64::new(0.0, 0.0) {
        c.pop();
        roots.push(Complex64::new(0.0, 0.0));
    }
    match c.len() - 1 {
        0 => {}
        1 => roots.push(-c[1] / c[0]),
        2 => roots.extend(quadratic(c[0], c[1], c[2])),
        3 => roots.extend(durand_kerner(&c, max)?),
        d => return Err(Error::Domain(format!("degree {d} is not supported"))),
    }
    Ok(Roots {
        roots,
        degree_reduced,
    })
}

fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // choose the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q == Complex64::new(0.0, 0.0) {
        return [q, q];
    }
    [q / a, c / q]
}

fn durand_kerner(c: &[Complex64], max: f64) -> Result<Vec<Complex64>> {
    let monic: Vec<Complex64> = c.iter().map(|v| v / c[0]).collect();
    let mut z: Vec<Complex64> = (0..3)
        .map(|k| Complex64::from_polar(0.4, 2.0 * std::f64::consts::PI * k as f64 / 3.0 + 0.5))
        .collect();
    let mut iterations = 0;
    while iterations < 500 {
        iterations += 1;
        let mut change = 0.0f64;
        for i in 0..3 {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom == Complex64::new(0.0, 0.0) {
                denom = Complex64::new(1e-300, 0.0);
            }
            let delta = horner(&monic, z[i]) / denom;
            z[i] -= delta;
            change = change.max(delta.norm() / z[i].norm().max(1.0));
        }
        if change < 1e-12 {
            break;
        }
    }
    let residual = z.iter().fold(0.0f64, |m, &r| m.max(horner(c, r).norm()));
    if !(residual <= 1e-9 * max) {
        return Err(Error::RootFinding {
            iterations,
            residual,
        });
    }
    Ok(z)
}

/// Root condition: every root has `|ζ| <= 1 + tol`, and roots that are
/// repeated (closer than 1e-7) lie strictly inside, `|ζ| < 1 - tol`.
pub fn satisfies_root_condition(roots: &[Complex64], tol: f64) -> bool {
    roots.iter().enumerate().all(|(i, r)| {
        let m = r.norm();
        if m > 1.0 + tol {
            return false;
        }
        let repeated = roots
            .iter()
            .enumerate()
            .any(|(j, s)| j != i && (r - s).norm() < 1e-7);
        !repeated || m < 1.0 - tol
    })
}

pub const ROOT_TOL: f64 = 1e-9;

/// Whether `z` lies in the region of absolute stability. A degenerate
/// leading coefficient sends a root to infinity and counts as unstable.
pub fn is_stable(poly: &SymbolicPolynomial, z: Complex64) -> Result<bool> {
    let p = poly.at(z);
    let r = poly_roots(&p.coeffs)?;
    Ok(!r.degree_reduced && satisfies_root_condition(&r.roots, ROOT_TOL))
}

/// Rectangle in the z-plane, `re_min:re_max:im_min:im_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            re_min: -3.0,
            re_max: 1.0,
            im_min: -2.0,
            im_max: 2.0,
        }
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format!("bad window `{s}`: {e}"))?;
        let [re_min, re_max, im_min, im_max] = parts[..] else {
            return Err(format!(
                "bad window `{s}`: expected re_min:re_max:im_min:im_max"
            ));
        };
        let w = Window {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        if parts.iter().any(|v| !v.is_finite()) || !(re_min < re_max) || !(im_min < im_max) {
            return Err(format!(
                "bad window `{s}`: need finite min < max on both axes"
            ));
        }
        Ok(w)
    }
}

/// Root-condition mask on the cell midpoints of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionScan {
    pub method: MethodId,
    pub mode: PolyMode,
    pub window: Window,
    pub resolution: usize,
    /// Row-major with the imaginary axis outer: index `j * resolution + i`.
    pub mask: Vec<bool>,
    /// Cells where root finding failed; they are marked unstable.
    pub failures: usize,
}

impl RegionScan {
    /// Midpoint of cell `(i, j)`, `i` along the real axis.
    pub fn cell_center(&self, i: usize, j: usize) -> Complex64 {
        cell_center(&self.window, self.resolution, i, j)
    }

    pub fn is_stable(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.resolution + i]
    }

    /// `(re, im, stable)` in storage order.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, bool)> + '_ {
        let n = self.resolution;
        self.mask.iter().enumerate().map(move |(k, &s)| {
            let c = self.cell_center(k % n, k / n);
            (c.re, c.im, s)
        })
    }

    pub fn stable_count(&self) -> usize {
        self.mask.iter().filter(|&&s| s).count()
    }

    /// Area of the stable cells.
    pub fn stable_area(&self) -> f64 {
        let w = &self.window;
        let cell = (w.re_max - w.re_min) * (w.im_max - w.im_min)
            / (self.resolution * self.resolution) as f64;
        self.stable_count() as f64 * cell
    }
}

fn cell_center(w: &Window, n: usize, i: usize, j: usize) -> Complex64 {
    let dx = (w.re_max - w.re_min) / n as f64;
    let dy = (w.im_max - w.im_min) / n as f64;
    Complex64::new(
        w.re_min + (i as f64 + 0.5) * dx,
        w.im_min + (j as f64 + 0.5) * dy,
    )
}

pub const MIN_RESOLUTION: usize = 16;
pub const MAX_RESOLUTION: usize = 4096;

pub fn scan_region(
    method: MethodId,
    window: Window,
    resolution: usize,
    mode: PolyMode,
) -> Result<RegionScan> {
    if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&resolution) {
        return Err(Error::Domain(format!(
            "resolution must lie in [{MIN_RESOLUTION}, {MAX_RESOLUTION}], got {resolution}"
        )));
    }
    let poly = symbolic_polynomial(method, mode)?;
    let mut mask = Vec::with_capacity(resolution * resolution);
    let mut failures = 0;
    for j in 0..resolution {
        for i in 0..resolution {
            let z = cell_center(&window, resolution, i, j);
            mask.push(match is_stable(&poly, z) {
                Ok(s) => s,
                Err(_) => {
                    failures += 1;
                    false
                }
            });
        }
    }
    Ok(RegionScan {
        method,
        mode: poly.mode,
        window,
        resolution,
        mask,
        failures,
    })
}

/// Stable interval `(left, 0)` on the negative real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealInterval {
    /// Points just left of 0 are already unstable.
    Empty,
    Bounded {
        left: f64,
    },
    /// Stable at least out to `-UNBOUNDED_BEYOND`.
    Unbounded,
}

impl RealInterval {
    pub fn left(&self) -> Option<f64> {
        match *self {
            RealInterval::Bounded { left } => Some(left),
            RealInterval::Empty => Some(0.0),
            RealInterval::Unbounded => None,
        }
    }

    /// `self ⊆ other`, with slack `tol` on the boundary.
    pub fn within(&self, other: &RealInterval, tol: f64) -> bool {
        match (self.left(), other.left()) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a >= b - tol,
        }
    }
}

pub const UNBOUNDED_BEYOND: f64 = 1e6;

/// Leftmost stability boundary reached from `0⁻`: linear sampling at 1e-3
/// out to -20, geometric beyond, then bisection to 1e-6.
pub fn real_axis_interval(method: MethodId, mode: PolyMode) -> Result<RealInterval> {
    let poly = symbolic_polynomial(method, mode)?;
    let stable = |x: f64| is_stable(&poly, Complex64::new(x, 0.0)).unwrap_or(false);
    let step = 1e-3;
    if !stable(-step) {
        return Ok(RealInterval::Empty);
    }
    let mut good = -step;
    let mut bad = None;
    let mut k = 2;
    while good > -20.0 {
        let x = -(k as f64) * step;
        if !stable(x) {
            bad = Some(x);
            break;
        }
        good = x;
        k += 1;
    }
    if bad.is_none() {
        let mut x = good;
        while x > -UNBOUNDED_BEYOND {
            let next = (x * 1.5).max(-UNBOUNDED_BEYOND);
            if !stable(next) {
                bad = Some(next);
                break;
            }
            good = next;
            x = next;
        }
    }
    let Some(mut bad) = bad else {
        return Ok(RealInterval::Unbounded);
    };
    while good - bad > 1e-6 {
        let mid = 0.5 * (good + bad);
        if stable(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(RealInterval::Bounded {
        left: 0.5 * (good + bad),
    })
}
