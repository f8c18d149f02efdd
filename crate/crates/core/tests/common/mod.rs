//! Independent oracles and reference endpoint errors shared by the
//! integration tests and the acceptance runner.
#![allow(dead_code, clippy::excessive_precision, clippy::needless_range_loop)]

/// Gauss-Jordan elimination with full pivoting; deliberately a different
/// algorithm from the crate's partial-pivot LU.
pub fn gauss_jordan(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let (mut pr, mut pc, mut best) = (col, col, 0.0);
        for r in col..n {
            for c in col..n {
                if a[r][c].abs() > best {
                    best = a[r][c].abs();
                    pr = r;
                    pc = c;
                }
            }
        }
        a.swap(col, pr);
        b.swap(col, pr);
        for row in a.iter_mut() {
            row.swap(col, pc);
        }
        perm.swap(col, pc);
        let p = a[col][col];
        for c in 0..n {
            a[col][c] /= p;
        }
        b[col] /= p;
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                for c in 0..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for (k, &p) in perm.iter().enumerate() {
        x[p] = b[k];
    }
    x
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel {
    Imq,
    Iq,
}

pub fn phi(kind: Kernel, r: f64, eps: f64) -> f64 {
    match kind {
        Kernel::Imq => (1.0 + (eps * r).powi(2)).powf(-0.5),
        Kernel::Iq => (1.0 + (eps * r).powi(2)).recip(),
    }
}

/// `d/dx φ(x - c)` at offset `d = x - c`.
pub fn dphi(kind: Kernel, d: f64, eps: f64) -> f64 {
    let e2 = eps * eps;
    match kind {
        Kernel::Imq => -e2 * d * (1.0 + e2 * d * d).powf(-1.5),
        Kernel::Iq => -2.0 * e2 * d * (1.0 + e2 * d * d).powi(-2),
    }
}

/// Interpolant through `(nodes, data)`, returned as its expansion weights.
pub fn interp_weights(kind: Kernel, nodes: &[f64], data: &[f64], eps: f64) -> Vec<f64> {
    let a = nodes
        .iter()
        .map(|&xi| nodes.iter().map(|&xj| phi(kind, xi - xj, eps)).collect())
        .collect();
    gauss_jordan(a, data.to_vec())
}

pub fn interp_eval(kind: Kernel, nodes: &[f64], w: &[f64], eps: f64, x: f64) -> f64 {
    nodes
        .iter()
        .zip(w)
        .map(|(&c, &l)| l * phi(kind, x - c, eps))
        .sum()
}

pub fn interp_deriv(kind: Kernel, nodes: &[f64], w: &[f64], eps: f64, x: f64) -> f64 {
    nodes
        .iter()
        .zip(w)
        .map(|(&c, &l)| l * dphi(kind, x - c, eps))
        .sum()
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 30)
}

/// Quadrature oracle for the two-step explicit weights: integrate the
/// interpolant at nodes `0, h` over `[h, 2h]` for unit data.
pub fn oracle_beta_ab2(kind: Kernel, eps: f64, h: f64) -> (f64, f64) {
    let nodes = [0.0, h];
    let beta = |data: [f64; 2]| {
        let w = interp_weights(kind, &nodes, &data, eps);
        adaptive_simpson(
            &|t| interp_eval(kind, &nodes, &w, eps, t),
            h,
            2.0 * h,
            1e-12,
        ) / h
    };
    (beta([1.0, 0.0]), beta([0.0, 1.0]))
}

/// Quadrature oracle for the IMQ trapezoidal weight: interpolant at `0, h`
/// integrated over `[0, h]`.
pub fn oracle_beta_am2_imq(eps: f64, h: f64) -> f64 {
    let nodes = [0.0, h];
    let w = interp_weights(Kernel::Imq, &nodes, &[1.0, 0.0], eps);
    adaptive_simpson(
        &|t| interp_eval(Kernel::Imq, &nodes, &w, eps, t),
        0.0,
        h,
        1e-12,
    ) / h
}

/// Reference endpoint errors, N = 10 .. 320 (ex1 and ex4) or 400 .. 6400 (ex3).
pub struct Reference {
    pub problem: &'static str,
    pub method: &'static str,
    pub ns: &'static [usize],
    pub errors: &'static [f64],
}

const NS_SMALL: &[usize] = &[10, 20, 40, 80, 160, 320];
const NS_EX3: &[usize] = &[400, 800, 1600, 3200, 6400];

pub const REFERENCE: &[Reference] = &[
    Reference {
        problem: "ex1",
        method: "AB2",
        ns: NS_SMALL,
        errors: &[
            3.034213293051979e-03,
            7.717017538266813e-04,
            1.942291044479960e-04,
            4.869943879992622e-05,
            1.219136102492691e-05,
            3.049824816026003e-06,
        ],
    },
    Reference {
        problem: "ex1",
        method: "AB3",
        ns: NS_SMALL,
        errors: &[
            7.430910927918588e-04,
            9.925706387875488e-05,
            1.279667578490962e-05,
            1.623800487515759e-06,
            2.044853487093157e-07,
            2.565496837192427e-08,
        ],
    },
    Reference {
        problem: "ex1",
        method: "AM2",
        ns: NS_SMALL,
        errors: &[
            7.753684341746392e-04,
            1.754079900484484e-04,
            4.148050726904273e-05,
            1.006933784897246e-05,
            2.479461800375393e-06,
            6.151142203369986e-07,
        ],
    },
    Reference {
        problem: "ex1",
        method: "AM3",
        ns: NS_SMALL,
        errors: &[
            1.104840310713895e-04,
            1.298901521773477e-05,
            1.551538363786520e-06,
            1.887581442261421e-07,
            2.324890380211997e-08,
            2.883801752950887e-09,
        ],
    },
    Reference {
        problem: "ex1",
        method: "IMQ_AB2",
        ns: NS_SMALL,
        errors: &[
            1.014577580230713e-03,
            1.319855656692903e-04,
            1.670368395367827e-05,
            2.097728918681874e-06,
            2.627413366873554e-07,
            3.287300842647056e-08,
        ],
    },
    Reference {
        problem: "ex1",
        method: "IQ_AB2",
        ns: NS_SMALL,
        errors: &[
            5.038309526130824e-04,
            6.437212122212266e-05,
            8.070554016970100e-06,
            1.008518872303021e-06,
            1.259923502194837e-07,
            1.574287422645426e-08,
        ],
    },
    Reference {
        problem: "ex1",
        method: "IMQ_AB3",
        ns: NS_SMALL,
        errors: &[
            1.525244127912884e-04,
            1.216124766295623e-05,
            8.526626621430111e-07,
            5.636826039268072e-08,
            3.622233790689933e-09,
            2.295398315865782e-10,
        ],
    },
    Reference {
        problem: "ex1",
        method: "IQ_AB3",
        ns: NS_SMALL,
        errors: &[
            1.421782464514632e-04,
            1.132787643659539e-05,
            7.939137788848249e-07,
            5.247294543320180e-08,
            3.371532331097882e-09,
            2.136404941843750e-10,
        ],
    },
    Reference {
        problem: "ex1",
        method: "IMQ_AM2",
        ns: NS_SMALL,
        errors: &[
            3.844720863910300e-05,
            1.074390241362355e-05,
            1.756382688733460e-06,
            2.466792591304667e-07,
            3.257045100291123e-08,
            4.181011092896370e-09,
        ],
    },
    Reference {
        problem: "ex1",
        method: "IQ_AM2",
        ns: NS_SMALL,
        errors: &[
            7.506991550942921e-05,
            1.325486070935522e-05,
            1.920298273949683e-06,
            2.571422232922060e-07,
            3.323120434384208e-08,
            4.222521887697894e-09,
        ],
    },
    Reference {
        problem: "ex1",
        method: "IMQ_AM3",
        ns: NS_SMALL,
        errors: &[
            1.050535370195060e-05,
            5.453207364558565e-07,
            2.650622332733832e-08,
            1.335914157074569e-09,
            7.196310214396817e-11,
            4.112044038606655e-12,
        ],
    },
    Reference {
        problem: "ex1",
        method: "IQ_AM3",
        ns: NS_SMALL,
        errors: &[
            9.647365355580639e-06,
            4.945506376641262e-07,
            2.366657114727388e-08,
            1.173951602595480e-09,
            6.241751560054354e-11,
            3.535283177313886e-12,
        ],
    },
    Reference {
        problem: "ex4",
        method: "IMQ_AM2",
        ns: NS_SMALL,
        errors: &[
            1.219551075468672e-04,
            9.239788074211219e-06,
            6.328599858607120e-07,
            4.136389708531141e-08,
            2.643091190357438e-09,
            1.670212856907938e-10,
        ],
    },
    Reference {
        problem: "ex3",
        method: "IMQ_AB2",
        ns: NS_EX3,
        errors: &[
            9.460567630474581e-02,
            1.114652209122968e-02,
            1.395850828363576e-03,
            1.753004553235460e-04,
            2.197209075882611e-05,
        ],
    },
    Reference {
        problem: "ex3",
        method: "IMQ_AB3",
        ns: NS_EX3,
        errors: &[
            1.979811601221737e-03,
            1.376981990173221e-04,
            7.834765070935390e-06,
            4.666861030955261e-07,
            3.102741330529568e-08,
        ],
    },
];

pub fn reference(problem: &str, method: &str) -> &'static Reference {
    REFERENCE
        .iter()
        .find(|r| r.problem == problem && r.method == method)
        .expect("reference entry")
}

pub fn within_factor(got: f64, want: f64, factor: f64) -> bool {
    got > 0.0 && got <= want * factor && got >= want / factor
}
