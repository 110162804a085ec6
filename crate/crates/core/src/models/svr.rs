//! ε-insensitive support vector regression, trained by sequential minimal
//! optimization of the dual.
//!
//! The dual keeps one pair of box-constrained variables (αᵢ, αᵢ*) per
//! sample under the balance constraint Σ(αᵢ − αᵢ*) = 0. Each step picks
//! the maximal violating pair, solves the two-variable subproblem in
//! closed form, and clips to the box; the loop stops when the KKT gap
//! falls below `tol`. Points strictly inside the ε-tube end with zero
//! dual coefficients, and |coefficient| reaches C only on or outside
//! the tube.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{FitDiagnostics, FittedModel, Kernel, ModelParams};

/// SVR hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    /// Penalty on training error outside the tube.
    pub c: f64,
    /// Half-width of the insensitive tube.
    pub epsilon: f64,
    pub kernel: Kernel,
    /// KKT gap at which training stops.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_tol() -> f64 {
    1e-3
}

fn default_max_iter() -> usize {
    1_000_000
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            c: 1.0,
            epsilon: 0.1,
            kernel: Kernel::Linear,
            tol: default_tol(),
            max_iter: default_max_iter(),
        }
    }
}

/// One side of a sample's dual pair: the up variable αᵢ raises the net
/// coefficient, the down variable αᵢ* lowers it.
#[derive(Clone, Copy, PartialEq)]
enum Side {
    Up,
    Dn,
}

struct Scan {
    /// Largest ascent value over the up-feasible set.
    m: f64,
    m_at: (usize, Side),
    /// Smallest value over the down-feasible set; KKT gap is m − big_m.
    big_m: f64,
    /// Second-order partner for the working pair, and its value.
    partner: (usize, Side),
    partner_v: f64,
}

struct Smo<'a> {
    n: usize,
    y: &'a [f64],
    c: f64,
    epsilon: f64,
    k: Vec<f64>,
    alpha_up: Vec<f64>,
    alpha_dn: Vec<f64>,
    /// fᵢ = Σⱼ βⱼ K(xⱼ, xᵢ) with βⱼ = αⱼ − αⱼ*.
    f: Vec<f64>,
}

impl<'a> Smo<'a> {
    fn beta(&self, i: usize) -> f64 {
        self.alpha_up[i] - self.alpha_dn[i]
    }

    /// Violation scan: the largest ascent value over the up-feasible set
    /// and the smallest over the down-feasible set. KKT holds when m ≤ M.
    /// The partner index is chosen by second-order gain, (m − v)²/curvature,
    /// which avoids the zigzag of plain maximal-violating-pair selection.
    fn scan(&self) -> Scan {
        let mut m = f64::NEG_INFINITY;
        let mut m_at = (0, Side::Up);
        let mut big_m = f64::INFINITY;
        for i in 0..self.n {
            let v_up = self.y[i] - self.f[i] - self.epsilon;
            let v_dn = self.y[i] - self.f[i] + self.epsilon;
            if self.alpha_up[i] < self.c && v_up > m {
                m = v_up;
                m_at = (i, Side::Up);
            }
            if self.alpha_dn[i] > 0.0 && v_dn > m {
                m = v_dn;
                m_at = (i, Side::Dn);
            }
            if self.alpha_up[i] > 0.0 && v_up < big_m {
                big_m = v_up;
            }
            if self.alpha_dn[i] < self.c && v_dn < big_m {
                big_m = v_dn;
            }
        }

        let a = m_at.0;
        let k_row = &self.k[a * self.n..(a + 1) * self.n];
        let k_aa = self.k[a * self.n + a];
        let mut best_gain = f64::NEG_INFINITY;
        let mut partner = (0, Side::Up);
        let mut partner_v = 0.0;
        for i in 0..self.n {
            let v_up = self.y[i] - self.f[i] - self.epsilon;
            let v_dn = self.y[i] - self.f[i] + self.epsilon;
            let curv = (k_aa + self.k[i * self.n + i] - 2.0 * k_row[i]).max(1e-12);
            if self.alpha_up[i] > 0.0 && v_up < m {
                let diff = m - v_up;
                let gain = diff * diff / curv;
                if gain > best_gain {
                    best_gain = gain;
                    partner = (i, Side::Up);
                    partner_v = v_up;
                }
            }
            if self.alpha_dn[i] < self.c && v_dn < m {
                let diff = m - v_dn;
                let gain = diff * diff / curv;
                if gain > best_gain {
                    best_gain = gain;
                    partner = (i, Side::Dn);
                    partner_v = v_dn;
                }
            }
        }
        Scan { m, m_at, big_m, partner, partner_v }
    }

    fn refresh_f(&mut self) {
        for r in 0..self.n {
            let mut s = 0.0;
            for j in 0..self.n {
                let b = self.beta(j);
                if b != 0.0 {
                    s += b * self.k[j * self.n + r];
                }
            }
            self.f[r] = s;
        }
    }

    /// Value of the minimized dual objective at the current point.
    fn dual_objective(&self) -> f64 {
        let mut quad = 0.0;
        let mut slack = 0.0;
        let mut lin = 0.0;
        for i in 0..self.n {
            let b = self.beta(i);
            quad += b * self.f[i];
            slack += self.alpha_up[i] + self.alpha_dn[i];
            lin += self.y[i] * b;
        }
        0.5 * quad + self.epsilon * slack - lin
    }
}

/// Train an SVR on predictor rows (no intercept column) and targets.
pub fn fit_svr(rows: &[Vec<f64>], y: &[f64], params: &SvrParams) -> Result<FittedModel> {
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::InvalidHyperparameter("C must be positive and finite"));
    }
    if !(params.epsilon >= 0.0 && params.epsilon.is_finite()) {
        return Err(Error::InvalidHyperparameter("epsilon must be nonnegative"));
    }
    if let Kernel::Rbf { gamma } = params.kernel {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidHyperparameter("rbf gamma must be positive"));
        }
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    let dim = rows[0].len();
    for row in rows {
        if row.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
        }
    }

    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = params.kernel.apply(&rows[i], &rows[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }

    let mut smo = Smo {
        n,
        y,
        c: params.c,
        epsilon: params.epsilon,
        k,
        alpha_up: vec![0.0; n],
        alpha_dn: vec![0.0; n],
        f: vec![0.0; n],
    };

    let snap = 1e-12 * params.c;
    let mut iterations = 0usize;
    let mut scan = smo.scan();
    while scan.m - scan.big_m > params.tol {
        if iterations >= params.max_iter {
            return Err(Error::KktNotSatisfied { iterations, violation: scan.m - scan.big_m });
        }
        let (a, side_p) = scan.m_at;
        let (b, side_q) = scan.partner;

        let curv = (smo.k[a * n + a] + smo.k[b * n + b] - 2.0 * smo.k[a * n + b]).max(1e-12);
        let cap_p = match side_p {
            Side::Up => smo.c - smo.alpha_up[a],
            Side::Dn => smo.alpha_dn[a],
        };
        let cap_q = match side_q {
            Side::Up => smo.alpha_up[b],
            Side::Dn => smo.c - smo.alpha_dn[b],
        };
        let t = ((scan.m - scan.partner_v) / curv).min(cap_p).min(cap_q);

        match side_p {
            Side::Up => smo.alpha_up[a] += t,
            Side::Dn => smo.alpha_dn[a] -= t,
        }
        match side_q {
            Side::Up => smo.alpha_up[b] -= t,
            Side::Dn => smo.alpha_dn[b] += t,
        }
        smo.alpha_up[a] = snap_to_box(smo.alpha_up[a], smo.c, snap);
        smo.alpha_dn[a] = snap_to_box(smo.alpha_dn[a], smo.c, snap);
        smo.alpha_up[b] = snap_to_box(smo.alpha_up[b], smo.c, snap);
        smo.alpha_dn[b] = snap_to_box(smo.alpha_dn[b], smo.c, snap);
        // β changes by +t at sample a and −t at sample b.
        for r in 0..n {
            smo.f[r] += t * (smo.k[a * n + r] - smo.k[b * n + r]);
        }

        iterations += 1;
        if iterations % 512 == 0 {
            smo.refresh_f();
        }
        scan = smo.scan();
    }

    smo.refresh_f();

    // Intercept: free dual variables pin it exactly; otherwise any value in
    // the KKT interval works and the midpoint is used.
    let mut free = Vec::new();
    for i in 0..n {
        if smo.alpha_up[i] > 0.0 && smo.alpha_up[i] < smo.c {
            free.push(y[i] - smo.f[i] - smo.epsilon);
        }
        if smo.alpha_dn[i] > 0.0 && smo.alpha_dn[i] < smo.c {
            free.push(y[i] - smo.f[i] + smo.epsilon);
        }
    }
    let bias = if free.is_empty() {
        let final_scan = smo.scan();
        0.5 * (final_scan.m + final_scan.big_m)
    } else {
        free.iter().sum::<f64>() / free.len() as f64
    };

    let objective = smo.dual_objective();
    let mut dual_coefficients = Vec::new();
    let mut support_vectors = Vec::new();
    for i in 0..n {
        let b = smo.beta(i);
        if b != 0.0 {
            dual_coefficients.push(b);
            support_vectors.push(rows[i].clone());
        }
    }

    Ok(FittedModel::new(
        ModelParams::Svr {
            kernel: params.kernel,
            bias,
            dual_coefficients,
            support_vectors,
        },
        FitDiagnostics {
            iterations,
            final_objective: objective,
            objective_trace: Vec::new(),
        },
    ))
}

/// Box values within `snap` of a bound land exactly on it, so feasibility
/// scans never stall on float dust.
fn snap_to_box(v: f64, c: f64, snap: f64) -> f64 {
    if v < snap {
        0.0
    } else if v > c - snap {
        c
    } else {
        v
    }
}

/// Σᵢ coeffᵢ·K(svᵢ, x) + bias.
pub(crate) fn predict(
    kernel: &Kernel,
    bias: f64,
    dual_coefficients: &[f64],
    support_vectors: &[Vec<f64>],
    x: &[f64],
) -> Result<f64> {
    if let Some(first) = support_vectors.first() {
        if x.len() != first.len() {
            return Err(Error::DimensionMismatch { expected: first.len(), got: x.len() });
        }
    }
    let mut out = bias;
    for (coeff, sv) in dual_coefficients.iter().zip(support_vectors) {
        out += coeff * kernel.apply(sv, x);
    }
    Ok(out)
}
