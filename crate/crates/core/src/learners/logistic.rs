//! Binary logistic regression with gradient-descent and Newton solvers.
//!
//! Features are z-scored with statistics from the training set. The objective
//! is the mean log-loss plus `R(w) / (C n)`, where `R` is `|w|²/2` for `l2`
//! and `|w|₁` for `l1`; the intercept is never penalized.
//!
//! Gradient descent uses the fixed step `1/L`, with `L` an upper bound on the
//! gradient's Lipschitz constant, so the recorded loss never increases. `l1`
//! is handled by a proximal (soft-threshold) step and is not available to the
//! Newton solver.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::trace::{site_table, Site, Tracer};
use super::{get_bool, get_cat, get_int, get_real};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::space::Configuration;

pub const PARAMS: &[&str] = &[
    "solver",
    "penalty",
    "C",
    "tol",
    "max_iter",
    "fit_intercept",
    "random_state",
];

site_table!(SITES {
    SOLVER_GD = 0x7300,
    SOLVER_NEWTON = 0x7301,
    PENALTY_NONE = 0x7302,
    PENALTY_L2 = 0x7303,
    PENALTY_L1 = 0x7304,
    INTERCEPT_ON = 0x7305,
    INTERCEPT_OFF = 0x7306,
    CONVERGED_TOL = 0x7310,
    STOPPED_MAX_ITER = 0x7311,
    NEWTON_STEP_FULL = 0x7312,
    NEWTON_STEP_DAMPED = 0x7313,
    NEWTON_FALLBACK_GD = 0x7314,
    CONSTANT_COLUMN = 0x7315,
});

/// Hessians with an eigenvalue ratio above this are treated as singular.
const MAX_CONDITION: f64 = 1e12;
const MAX_BACKTRACK: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solver {
    GradientDescent,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Penalty {
    None,
    L2,
    L1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub solver: Solver,
    pub penalty: Penalty,
    pub c: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub fit_intercept: bool,
    pub random_state: u64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            solver: Solver::GradientDescent,
            penalty: Penalty::L2,
            c: 1.0,
            tol: 1e-4,
            max_iter: 100,
            fit_intercept: true,
            random_state: 0,
        }
    }
}

impl LogisticParams {
    pub fn from_config(cfg: &Configuration) -> Result<Self> {
        let solver = match get_cat(cfg, "solver", "gd")? {
            "gd" => Solver::GradientDescent,
            "newton" => Solver::Newton,
            other => return Err(Error::validation("solver", format!("unknown value {other:?}"))),
        };
        let penalty = match get_cat(cfg, "penalty", "l2")? {
            "none" => Penalty::None,
            "l2" => Penalty::L2,
            "l1" => Penalty::L1,
            other => return Err(Error::validation("penalty", format!("unknown value {other:?}"))),
        };
        if solver == Solver::Newton && penalty == Penalty::L1 {
            return Err(Error::InvalidCombination(
                "the newton solver does not support the l1 penalty".into(),
            ));
        }
        let c = get_real(cfg, "C", 1.0)?;
        if c.is_nan() || c <= 0.0 {
            return Err(Error::InvalidCombination(format!("C must be positive, got {c}")));
        }
        let tol = get_real(cfg, "tol", 1e-4)?;
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::InvalidCombination(format!("tol must be non-negative, got {tol}")));
        }
        let max_iter = get_int(cfg, "max_iter", 100)?;
        if max_iter < 1 {
            return Err(Error::InvalidCombination(format!(
                "max_iter must be at least 1, got {max_iter}"
            )));
        }
        Ok(Self {
            solver,
            penalty,
            c,
            tol,
            max_iter: max_iter as usize,
            fit_intercept: get_bool(cfg, "fit_intercept", true)?,
            random_state: get_int(cfg, "random_state", 0)? as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after initialization and after every iteration.
    pub loss_history: Vec<f64>,
}

impl LogisticModel {
    pub fn decision(&self, row: &[f64]) -> f64 {
        row.iter()
            .zip(&self.means)
            .zip(&self.scales)
            .zip(&self.weights)
            .map(|(((x, m), s), w)| w * (x - m) / s)
            .sum::<f64>()
            + self.intercept
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        u8::from(self.decision(row) > 0.0)
    }
}

/// Standardized design with labels in {-1, +1}.
struct Problem {
    rows: Vec<Vec<f64>>,
    signs: Vec<f64>,
    d: usize,
    fit_intercept: bool,
    /// Coefficient of the penalty term: `1 / (C n)`.
    lambda: f64,
    penalty: Penalty,
}

impl Problem {
    fn n(&self) -> f64 {
        self.rows.len() as f64
    }

    fn margins(&self, w: &[f64], b: f64) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.signs)
            .map(|(x, s)| s * (dot(x, w) + b))
            .collect()
    }

    fn loss(&self, w: &[f64], b: f64) -> f64 {
        let data: f64 = self.margins(w, b).iter().map(|&m| softplus(-m)).sum::<f64>() / self.n();
        data + self.lambda * self.regularizer(w)
    }

    fn regularizer(&self, w: &[f64]) -> f64 {
        match self.penalty {
            Penalty::None => 0.0,
            Penalty::L2 => 0.5 * dot(w, w),
            Penalty::L1 => w.iter().map(|v| v.abs()).sum(),
        }
    }

    /// Gradient of the smooth part: mean log-loss plus the `l2` term.
    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let mut gw = vec![0.0; self.d];
        let mut gb = 0.0;
        for (x, s) in self.rows.iter().zip(&self.signs) {
            let m = s * (dot(x, w) + b);
            let coef = -s * sigmoid(-m);
            for (g, xi) in gw.iter_mut().zip(x) {
                *g += coef * xi;
            }
            gb += coef;
        }
        let n = self.n();
        for (g, wi) in gw.iter_mut().zip(w) {
            *g /= n;
            if self.penalty == Penalty::L2 {
                *g += self.lambda * wi;
            }
        }
        (gw, if self.fit_intercept { gb / n } else { 0.0 })
    }

    /// Upper bound on the Lipschitz constant of the smooth gradient.
    fn lipschitz(&self) -> f64 {
        let trace: f64 = self.rows.iter().map(|x| dot(x, x)).sum::<f64>() / self.n();
        let intercept = if self.fit_intercept { 1.0 } else { 0.0 };
        let reg = if self.penalty == Penalty::L2 { self.lambda } else { 0.0 };
        (0.25 * (trace + intercept) + reg).max(1e-12)
    }

    fn hessian(&self, w: &[f64], b: f64) -> DMatrix<f64> {
        let k = self.d + usize::from(self.fit_intercept);
        let mut h = DMatrix::zeros(k, k);
        let mut ext = vec![0.0; k];
        for x in &self.rows {
            let p = sigmoid(dot(x, w) + b);
            let s = p * (1.0 - p);
            ext[..self.d].copy_from_slice(x);
            if self.fit_intercept {
                ext[self.d] = 1.0;
            }
            for i in 0..k {
                let si = s * ext[i];
                for j in i..k {
                    h[(i, j)] += si * ext[j];
                }
            }
        }
        let n = self.n();
        for i in 0..k {
            for j in i..k {
                h[(i, j)] /= n;
                h[(j, i)] = h[(i, j)];
            }
        }
        if self.penalty == Penalty::L2 {
            for i in 0..self.d {
                h[(i, i)] += self.lambda;
            }
        }
        h
    }
}

pub(crate) fn fit(params: &LogisticParams, data: &Dataset, tracer: &mut Tracer<'_>) -> LogisticModel {
    let n = data.n_rows();
    let d = data.n_features();
    let mut means = vec![0.0; d];
    let mut scales = vec![1.0; d];
    for j in 0..d {
        let col = data.features.column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        means[j] = mean;
        if var > 0.0 {
            scales[j] = var.sqrt();
        } else {
            tracer.hit(CONSTANT_COLUMN);
        }
    }
    let problem = Problem {
        rows: data
            .features
            .rows()
            .map(|r| {
                r.iter()
                    .zip(&means)
                    .zip(&scales)
                    .map(|((x, m), s)| (x - m) / s)
                    .collect()
            })
            .collect(),
        signs: data
            .labels
            .iter()
            .map(|&y| if y == 1 { 1.0 } else { -1.0 })
            .collect(),
        d,
        fit_intercept: params.fit_intercept,
        lambda: 1.0 / (params.c * n as f64),
        penalty: params.penalty,
    };

    tracer.hit(match params.penalty {
        Penalty::None => PENALTY_NONE,
        Penalty::L2 => PENALTY_L2,
        Penalty::L1 => PENALTY_L1,
    });
    tracer.hit(if params.fit_intercept { INTERCEPT_ON } else { INTERCEPT_OFF });

    let mut rng = ChaCha8Rng::seed_from_u64(params.random_state);
    let mut w: Vec<f64> = (0..d).map(|_| rng.random_range(-0.01..0.01)).collect();
    let mut b = 0.0;
    let mut history = vec![problem.loss(&w, b)];

    let mut converged = false;
    let mut iterations = 0;
    let mut newton = params.solver == Solver::Newton;
    tracer.hit(if newton { SOLVER_NEWTON } else { SOLVER_GD });
    let step = 1.0 / problem.lipschitz();

    while iterations < params.max_iter {
        iterations += 1;
        if newton {
            match newton_step(&problem, &mut w, &mut b, params.tol, tracer) {
                Some(done) => {
                    history.push(problem.loss(&w, b));
                    if done {
                        converged = true;
                        break;
                    }
                    continue;
                }
                None => {
                    log::debug!("newton: ill-conditioned hessian, continuing with gradient descent");
                    tracer.hit(NEWTON_FALLBACK_GD);
                    newton = false;
                }
            }
        }
        let (gw, gb) = problem.gradient(&w, b);
        let mut moved = 0.0f64;
        for (wi, g) in w.iter_mut().zip(&gw) {
            let mut next = *wi - step * g;
            if problem.penalty == Penalty::L1 {
                let t = step * problem.lambda;
                next = next.signum() * (next.abs() - t).max(0.0);
            }
            moved = moved.max((next - *wi).abs());
            *wi = next;
        }
        if problem.fit_intercept {
            moved = moved.max((step * gb).abs());
            b -= step * gb;
        }
        history.push(problem.loss(&w, b));
        // gradient-mapping norm; equals the gradient norm without l1
        if moved / step <= params.tol {
            converged = true;
            break;
        }
    }
    tracer.hit(if converged { CONVERGED_TOL } else { STOPPED_MAX_ITER });

    LogisticModel {
        means,
        scales,
        weights: w,
        intercept: b,
        iterations,
        converged,
        loss_history: history,
    }
}

/// One damped Newton iteration. Returns `None` when the Hessian is too
/// ill-conditioned to solve, otherwise whether the gradient is within `tol`.
fn newton_step(
    p: &Problem,
    w: &mut [f64],
    b: &mut f64,
    tol: f64,
    tracer: &mut Tracer<'_>,
) -> Option<bool> {
    let (gw, gb) = p.gradient(w, *b);
    let gmax = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
    if gmax <= tol {
        return Some(true);
    }
    let h = p.hessian(w, *b);
    let eig = h.clone().symmetric_eigenvalues();
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v.abs())));
    if lo.is_nan() || lo <= 0.0 || hi / lo > MAX_CONDITION {
        return None;
    }
    let mut g = DVector::from_vec(gw.clone());
    if p.fit_intercept {
        g = g.push(gb);
    }
    let dir = h.cholesky()?.solve(&g);

    let base = p.loss(w, *b);
    let mut t = 1.0;
    for attempt in 0..MAX_BACKTRACK {
        let cw: Vec<f64> = w.iter().zip(dir.iter()).map(|(wi, di)| wi - t * di).collect();
        let cb = if p.fit_intercept { *b - t * dir[p.d] } else { *b };
        if p.loss(&cw, cb) <= base {
            tracer.hit(if attempt == 0 { NEWTON_STEP_FULL } else { NEWTON_STEP_DAMPED });
            w.copy_from_slice(&cw);
            *b = cb;
            return Some(false);
        }
        t *= 0.5;
    }
    // no decrease along the Newton direction: at a numerical optimum
    Some(true)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}
