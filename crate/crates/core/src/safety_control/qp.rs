//! Small dense convex QP solvers.
//!
//! [`solve_qp`] is a dual active-set method (Goldfarb-Idnani) for
//! `min 1/2 x'Hx + c'x  s.t.  Gx >= b` with `H` positive definite. It starts at the
//! unconstrained minimizer and adds the most violated constraint each outer step,
//! which makes it cheap when few constraints bind and lets it certify infeasibility.
//!
//! [`solve_penalized_box`] handles the soft version
//! `min |u - u0|^2 + rho * sum max(0, b_i - a_i'u)^2` over a box, with the
//! squared-slack variables eliminated, by a semismooth Newton iteration whose
//! box-constrained subproblems go through [`solve_qp`].

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QpError {
    #[error("constraints are infeasible")]
    Infeasible,
    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),
    #[error("numerical breakdown: {0}")]
    Numerical(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub x: DVector<f64>,
    /// Indices of constraints active at the solution.
    pub active: Vec<usize>,
    pub multipliers: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpOptions {
    pub max_iterations: usize,
    /// Violation threshold on row-normalized constraint residuals.
    pub tolerance: f64,
}

impl Default for QpOptions {
    fn default() -> Self {
        Self { max_iterations: 200, tolerance: 1e-10 }
    }
}

const PIVOT_EPS: f64 = 1e-14;

pub fn solve_qp(
    h: &DMatrix<f64>,
    c: &DVector<f64>,
    g: &DMatrix<f64>,
    b: &DVector<f64>,
    opts: &QpOptions,
) -> Result<QpSolution, QpError> {
    let n = h.nrows();
    let m = g.nrows();
    let h_inv = h
        .clone()
        .cholesky()
        .ok_or(QpError::Numerical("Hessian is not positive definite"))?
        .inverse();
    let mut x = -(&h_inv * c);
    let norms: Vec<f64> = (0..m)
        .map(|j| {
            let nrm = g.row(j).norm();
            if nrm > 0.0 {
                nrm
            } else {
                1.0
            }
        })
        .collect();
    let mut active: Vec<usize> = Vec::new();
    let mut u: Vec<f64> = Vec::new();
    let mut iterations = 0;

    loop {
        let mut chosen = None;
        let mut worst = -opts.tolerance;
        for j in 0..m {
            if active.contains(&j) {
                continue;
            }
            let s = g.row(j).tr_dot(&x) - b[j];
            let scaled = s / norms[j];
            if scaled < worst {
                worst = scaled;
                chosen = Some(j);
            }
        }
        let Some(p) = chosen else {
            return Ok(QpSolution { x, active, multipliers: u, iterations });
        };
        let np: DVector<f64> = g.row(p).transpose();
        let mut u_plus = u.clone();
        u_plus.push(0.0);

        loop {
            iterations += 1;
            if iterations > opts.max_iterations {
                return Err(QpError::IterationLimit(opts.max_iterations));
            }
            let q = active.len();
            let (z, r) = if q == 0 {
                (&h_inv * &np, DVector::zeros(0))
            } else {
                let nmat = DMatrix::from_fn(n, q, |i, k| g[(active[k], i)]);
                let hinv_n = &h_inv * &nmat;
                let gram = nmat.transpose() * &hinv_n;
                let chol = gram
                    .cholesky()
                    .ok_or(QpError::Numerical("active constraints became dependent"))?;
                let r = chol.solve(&(hinv_n.transpose() * &np));
                let z = &h_inv * &np - &hinv_n * &r;
                (z, r)
            };

            let mut t_partial = f64::INFINITY;
            let mut drop_at = None;
            for k in 0..q {
                if r[k] > PIVOT_EPS {
                    let t = u_plus[k] / r[k];
                    if t < t_partial {
                        t_partial = t;
                        drop_at = Some(k);
                    }
                }
            }
            let zn = z.dot(&np);
            let t_full = if zn > PIVOT_EPS * np.norm_squared() {
                -((np.dot(&x)) - b[p]) / zn
            } else {
                f64::INFINITY
            };
            let t = t_partial.min(t_full);
            if !t.is_finite() {
                return Err(QpError::Infeasible);
            }
            for k in 0..q {
                u_plus[k] -= t * r[k];
            }
            u_plus[q] += t;
            if t_full.is_finite() {
                x += &z * t;
            }
            if t_full <= t_partial {
                active.push(p);
                u = u_plus;
                break;
            }
            let l = drop_at.expect("partial step implies a blocking multiplier");
            active.remove(l);
            u_plus.remove(l);
        }
    }
}

/// One soft constraint `a'u >= b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftRow {
    pub a: DVector<f64>,
    pub b: f64,
}

fn box_constraints(lo: &DVector<f64>, hi: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let n = lo.len();
    let mut g = DMatrix::zeros(2 * n, n);
    let mut b = DVector::zeros(2 * n);
    for i in 0..n {
        g[(2 * i, i)] = 1.0;
        b[2 * i] = lo[i];
        g[(2 * i + 1, i)] = -1.0;
        b[2 * i + 1] = -hi[i];
    }
    (g, b)
}

pub fn penalized_objective(u: &DVector<f64>, nominal: &DVector<f64>, rows: &[SoftRow], rho: f64) -> f64 {
    let slack: f64 = rows.iter().map(|r| (r.b - r.a.dot(u)).max(0.0).powi(2)).sum();
    (u - nominal).norm_squared() + rho * slack
}

/// Exact minimizer of the convex piecewise-quadratic `phi(t) = f(u + t d)` on `[0, 1]`.
fn exact_line_search(u: &DVector<f64>, d: &DVector<f64>, nominal: &DVector<f64>, rows: &[SoftRow], rho: f64) -> f64 {
    let slope = |t: f64| {
        let x = u + d * t;
        let mut s = 2.0 * (&x - nominal).dot(d);
        for r in rows {
            let viol = r.b - r.a.dot(&x);
            if viol > 0.0 {
                s -= 2.0 * rho * viol * r.a.dot(d);
            }
        }
        s
    };
    let mut knots: Vec<f64> = rows
        .iter()
        .filter_map(|r| {
            let ad = r.a.dot(d);
            if ad.abs() < PIVOT_EPS {
                return None;
            }
            let t = (r.b - r.a.dot(u)) / ad;
            (t > 0.0 && t < 1.0).then_some(t)
        })
        .collect();
    knots.push(0.0);
    knots.push(1.0);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut prev_t = knots[0];
    let mut prev_s = slope(prev_t);
    if prev_s >= 0.0 {
        return prev_t;
    }
    for &t in &knots[1..] {
        let s = slope(t);
        if s >= 0.0 {
            // slope is linear between knots
            return prev_t + (t - prev_t) * (-prev_s) / (s - prev_s);
        }
        prev_t = t;
        prev_s = s;
    }
    1.0
}

/// Minimizes `|u - nominal|^2 + rho * sum max(0, b_i - a_i'u)^2` over `lo <= u <= hi`.
pub fn solve_penalized_box(
    nominal: &DVector<f64>,
    rows: &[SoftRow],
    lo: &DVector<f64>,
    hi: &DVector<f64>,
    rho: f64,
    opts: &QpOptions,
) -> Result<(DVector<f64>, usize), QpError> {
    let n = nominal.len();
    let (g_box, b_box) = box_constraints(lo, hi);
    let mut u = nominal.zip_zip_map(lo, hi, |x, l, h| x.clamp(l, h));
    for it in 1..=opts.max_iterations {
        let mut h = DMatrix::identity(n, n) * 2.0;
        let mut c = nominal * -2.0;
        for r in rows {
            if r.b - r.a.dot(&u) > 0.0 {
                h += &r.a * r.a.transpose() * (2.0 * rho);
                c -= &r.a * (2.0 * rho * r.b);
            }
        }
        let model = solve_qp(&h, &c, &g_box, &b_box, opts)?;
        let d = model.x - &u;
        if d.amax() < 1e-13 {
            return Ok((u, it));
        }
        let t = exact_line_search(&u, &d, nominal, rows, rho);
        if t <= 0.0 {
            return Ok((u, it));
        }
        u += d * t;
        u = u.zip_zip_map(lo, hi, |x, l, h| x.clamp(l, h));
    }
    Err(QpError::IterationLimit(opts.max_iterations))
}
