//! First-order operator-splitting solver for real symmetric SDPs.
//!
//! The problem `min <C, X> s.t. <A_i, X> {>=,<=,=} b_i, Tr X <= cap, X psd`
//! is written in the conic form `min c'x s.t. Ax + s = b, s in K` over the
//! scaled-vectorization (svec) of `X`, with `K` a product of zero cones,
//! nonnegative rays and the PSD cone. The homogeneous self-dual embedding of
//! the primal-dual pair is solved by alternating a linear-system projection
//! with a cone projection under over-relaxation; infeasibility and
//! unboundedness fall out as certificates instead of errors.
//!
//! Data is equilibrated before the iteration: constraint rows are normalized
//! (which leaves the feasible set unchanged), the cost is scaled to unit
//! norm, and the right-hand side is scaled toward unit magnitude; residuals
//! are always evaluated against the unscaled data.

use nalgebra::linalg::Cholesky;
use nalgebra::{DMatrix, DVector};

use super::embed::RealSdpProblem;
use super::{SdpStatus, Sense, SolveOptions};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone)]
pub struct RealSdpSolution<T: Real> {
    /// Solved PSD matrix (exact cone membership up to floating rounding).
    pub matrix: DMatrix<T>,
    pub objective: T,
    pub status: SdpStatus,
    pub primal_residual: T,
    pub dual_residual: T,
    pub iterations: usize,
}

pub(crate) fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Scaled vectorization of a symmetric matrix: upper triangle, column-major,
/// off-diagonals multiplied by sqrt(2) so the map is an isometry.
pub(crate) fn mat_to_svec<T: Real>(m: &DMatrix<T>) -> DVector<T> {
    let n = m.nrows();
    let sqrt2 = lit::<T>(2.0).sqrt();
    let mut out = DVector::zeros(svec_len(n));
    let mut idx = 0;
    for j in 0..n {
        for i in 0..=j {
            out[idx] = if i == j { m[(i, j)] } else { m[(i, j)] * sqrt2 };
            idx += 1;
        }
    }
    out
}

pub(crate) fn svec_to_mat<T: Real>(s: &DVector<T>, n: usize) -> DMatrix<T> {
    let inv_sqrt2 = T::one() / lit::<T>(2.0).sqrt();
    let mut out = DMatrix::zeros(n, n);
    let mut idx = 0;
    for j in 0..n {
        for i in 0..=j {
            if i == j {
                out[(i, j)] = s[idx];
            } else {
                let v = s[idx] * inv_sqrt2;
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
            idx += 1;
        }
    }
    out
}

/// One linear row in canonical `a'x + s = b` form.
struct LinRow<T: Real> {
    vec: DVector<T>,
    bound: T,
    /// Zero cone when an equality, nonnegative ray otherwise.
    equality: bool,
}

struct Workspace<T: Real> {
    dim: usize,
    n: usize,
    // unscaled canonical data for residual evaluation
    orig_rows: Vec<LinRow<T>>,
    orig_cost: DVector<T>,
    norm_b: T,
    norm_c: T,
    // scaled data driving the iteration
    lin: DMatrix<T>,
    b_scaled: DVector<T>,
    c_scaled: DVector<T>,
    row_scale: Vec<T>,
    cost_scale: T,
    rhs_scale: T,
    chol: Option<Cholesky<T, nalgebra::Dyn>>,
}

impl<T: Real> Workspace<T> {
    fn build(problem: &RealSdpProblem<T>) -> Self {
        let dim = problem.dimension;
        let n = svec_len(dim);
        let tiny = lit::<T>(1e-300);

        let mut orig_rows: Vec<LinRow<T>> = Vec::new();
        for (matrix, bound, sense) in &problem.constraints {
            let sym = (matrix + matrix.transpose()) * lit::<T>(0.5);
            let v = mat_to_svec(&sym);
            match sense {
                Sense::Ge => orig_rows.push(LinRow { vec: -v, bound: -*bound, equality: false }),
                Sense::Le => orig_rows.push(LinRow { vec: v, bound: *bound, equality: false }),
                Sense::Eq => orig_rows.push(LinRow { vec: v, bound: *bound, equality: true }),
            }
        }
        if let Some(cap) = problem.trace_cap {
            orig_rows.push(LinRow {
                vec: mat_to_svec(&DMatrix::identity(dim, dim)),
                bound: cap,
                equality: false,
            });
        }
        let orig_cost = mat_to_svec(&((&problem.cost + problem.cost.transpose()) * lit::<T>(0.5)));
        let norm_b = orig_rows
            .iter()
            .fold(T::zero(), |acc, r| acc + r.bound * r.bound)
            .sqrt();
        let norm_c = orig_cost.norm();

        let r = orig_rows.len();
        let mut row_scale = Vec::with_capacity(r);
        let mut lin = DMatrix::zeros(r, n);
        let mut b_scaled = DVector::zeros(r);
        for (i, row) in orig_rows.iter().enumerate() {
            let rho = row.vec.norm().max(tiny);
            row_scale.push(rho);
            lin.row_mut(i).copy_from(&(row.vec.transpose() / rho));
            b_scaled[i] = row.bound / rho;
        }
        let cost_scale = norm_c.max(tiny).max(lit(1e-12));
        let c_scaled = &orig_cost / cost_scale;
        let rhs_scale = {
            let m = b_scaled.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
            if m > T::zero() {
                m
            } else {
                T::one()
            }
        };
        b_scaled /= rhs_scale;

        let chol = if r > 0 {
            let s = DMatrix::identity(r, r) + &lin * lin.transpose() * lit::<T>(0.5);
            Some(Cholesky::new(s).expect("gram of normalized rows is positive definite"))
        } else {
            None
        };

        Workspace {
            dim,
            n,
            orig_rows,
            orig_cost,
            norm_b,
            norm_c,
            lin,
            b_scaled,
            c_scaled,
            row_scale,
            cost_scale,
            rhs_scale,
            chol,
        }
    }

    /// Solves `(2 I + L' L) z = w` through the small-rank Woodbury identity.
    fn solve_normal(&self, w: &DVector<T>) -> DVector<T> {
        let half = lit::<T>(0.5);
        match &self.chol {
            None => w * half,
            Some(chol) => {
                let lw = &self.lin * w;
                let corr = self.lin.transpose() * chol.solve(&lw);
                w * half - corr * lit::<T>(0.25)
            }
        }
    }

    /// Applies the inverse of `[[I, A'], [-A, I]]` with `A = [L; -I]`.
    fn apply_minv(
        &self,
        rx: &DVector<T>,
        ry_lin: &DVector<T>,
        ry_psd: &DVector<T>,
    ) -> (DVector<T>, DVector<T>, DVector<T>) {
        let t = rx - self.lin.transpose() * ry_lin + ry_psd;
        let zx = self.solve_normal(&t);
        let zy_lin = ry_lin + &self.lin * &zx;
        let zy_psd = ry_psd - &zx;
        (zx, zy_lin, zy_psd)
    }
}

struct Candidate<T: Real> {
    s_psd: DVector<T>,
    primal_residual: T,
    dual_residual: T,
    gap: T,
}

fn evaluate_candidate<T: Real>(
    ws: &Workspace<T>,
    ux: &DVector<T>,
    uy_lin: &DVector<T>,
    uy_psd: &DVector<T>,
    v_lin: &DVector<T>,
    v_psd: &DVector<T>,
    tau: T,
) -> Candidate<T> {
    let inv_tau = T::one() / tau;
    let x = ux * (inv_tau * ws.rhs_scale);
    let s_psd = v_psd * (inv_tau * ws.rhs_scale);

    let mut pres_sq = T::zero();
    let mut dual_vec = ws.orig_cost.clone();
    let mut pobj_dual = T::zero();
    for (i, row) in ws.orig_rows.iter().enumerate() {
        let s_i = ws.row_scale[i] * ws.rhs_scale * v_lin[i] * inv_tau;
        let y_i = ws.cost_scale * uy_lin[i] * inv_tau / ws.row_scale[i];
        let viol = row.vec.dot(&x) + s_i - row.bound;
        pres_sq += viol * viol;
        dual_vec += &row.vec * y_i;
        pobj_dual += row.bound * y_i;
    }
    let psd_gap = &s_psd - &x;
    pres_sq += psd_gap.norm_squared();
    dual_vec -= uy_psd * (ws.cost_scale * inv_tau);

    let pobj = ws.orig_cost.dot(&x);
    Candidate {
        s_psd,
        primal_residual: pres_sq.sqrt() / (T::one() + ws.norm_b),
        dual_residual: dual_vec.norm() / (T::one() + ws.norm_c),
        gap: (pobj + pobj_dual).abs() / (T::one() + pobj.abs() + pobj_dual.abs()),
    }
}

/// Solves a real symmetric SDP. Deterministic for identical inputs; returns
/// `Infeasible`, `Unbounded` or `MaxIterations` as statuses rather than
/// failing.
pub fn solve_real_sdp<T: Real>(
    problem: &RealSdpProblem<T>,
    options: &SolveOptions<T>,
) -> RealSdpSolution<T> {
    let ws = Workspace::build(problem);
    let n = ws.n;
    let r = ws.orig_rows.len();
    let alpha = options.over_relaxation;
    let one_minus = T::one() - alpha;
    let check_every = options.check_every.max(1);

    // homogeneous embedding state
    let mut ux: DVector<T> = DVector::zeros(n);
    let mut uy_lin: DVector<T> = DVector::zeros(r);
    let mut uy_psd: DVector<T> = DVector::zeros(n);
    let mut utau = T::one();
    let mut v_lin: DVector<T> = DVector::zeros(r);
    let mut v_psd: DVector<T> = DVector::zeros(n);
    let mut vtau = T::zero();

    let (qx, qlin, qpsd) = ws.apply_minv(&ws.c_scaled, &ws.b_scaled, &DVector::zeros(n));
    let denom = T::one() + ws.c_scaled.dot(&qx) + ws.b_scaled.dot(&qlin);

    let mut trace: Vec<(usize, T, T, T)> = Vec::new();
    let mut last = None;
    let mut status = SdpStatus::MaxIterations;
    let mut iterations = options.max_iters;

    for iter in 1..=options.max_iters {
        let rhs_lin = &uy_lin + &v_lin;
        let rhs_psd = &uy_psd + &v_psd;
        let (px, plin, ppsd) = ws.apply_minv(&ux, &rhs_lin, &rhs_psd);
        let wtau = (utau + vtau + ws.c_scaled.dot(&px) + ws.b_scaled.dot(&plin)) / denom;
        let wx = px - &qx * wtau;
        let wlin = plin - &qlin * wtau;
        let wpsd = ppsd - &qpsd * wtau;

        // over-relaxed point
        let tx = wx * alpha + &ux * one_minus;
        let tlin = wlin * alpha + &uy_lin * one_minus;
        let tpsd = wpsd * alpha + &uy_psd * one_minus;
        let ttau = wtau * alpha + utau * one_minus;

        // projection onto free x, dual slack cones for y, nonnegative tau
        ux = tx;
        let mut glin = &tlin - &v_lin;
        for (i, row) in ws.orig_rows.iter().enumerate() {
            if !row.equality {
                glin[i] = glin[i].max(T::zero());
            }
        }
        let gpsd = &tpsd - &v_psd;
        let projected = {
            let m = svec_to_mat(&gpsd, ws.dim);
            let eig = m.symmetric_eigen();
            let clamped = eig.eigenvalues.map(|v| v.max(T::zero()));
            let back = &eig.eigenvectors * DMatrix::from_diagonal(&clamped) * eig.eigenvectors.transpose();
            mat_to_svec(&back)
        };
        let gtau = (ttau - vtau).max(T::zero());

        v_lin += &glin - &tlin;
        v_psd += &projected - &tpsd;
        vtau += gtau - ttau;
        uy_lin = glin;
        uy_psd = projected;
        utau = gtau;

        if iter % check_every == 0 || iter == options.max_iters {
            if utau > lit(1e-11) {
                let cand = evaluate_candidate(&ws, &ux, &uy_lin, &uy_psd, &v_lin, &v_psd, utau);
                if options.trace_file.is_some() {
                    trace.push((iter, cand.primal_residual, cand.dual_residual, cand.gap));
                }
                let done = cand.primal_residual <= options.tol
                    && cand.dual_residual <= options.tol
                    && cand.gap <= options.tol;
                last = Some(cand);
                if done {
                    status = SdpStatus::Optimal;
                    iterations = iter;
                    break;
                }
            }

            // certificate checks in the scaled space
            let ctx = ws.c_scaled.dot(&ux);
            if ctx < lit(-1e-12) {
                let scale = -T::one() / ctx;
                let xb = &ux * scale;
                let res_lin = &ws.lin * &xb + &v_lin * scale;
                let res_psd = &v_psd * scale - &xb;
                if (res_lin.norm_squared() + res_psd.norm_squared()).sqrt() <= options.tol {
                    status = SdpStatus::Unbounded;
                    iterations = iter;
                    last = None;
                    break;
                }
            }
            let bty = ws.b_scaled.dot(&uy_lin);
            if bty < lit(-1e-12) {
                let scale = -T::one() / bty;
                let res = ws.lin.transpose() * (&uy_lin * scale) - &uy_psd * scale;
                if res.norm() <= options.tol {
                    status = SdpStatus::Infeasible;
                    iterations = iter;
                    last = None;
                    break;
                }
            }
        }
    }

    if let Some(path) = &options.trace_file {
        let mut out = String::new();
        for (iter, p, d, g) in &trace {
            out.push_str(&format!(
                "{{\"iteration\":{},\"primal\":{:e},\"dual\":{:e},\"gap\":{:e}}}\n",
                iter,
                p.to_f64().unwrap_or(f64::NAN),
                d.to_f64().unwrap_or(f64::NAN),
                g.to_f64().unwrap_or(f64::NAN)
            ));
        }
        let _ = std::fs::write(path, out);
    }

    match (status, last) {
        (SdpStatus::Optimal, Some(cand)) | (SdpStatus::MaxIterations, Some(cand)) => {
            let matrix = svec_to_mat(&cand.s_psd, ws.dim);
            let objective = ws.orig_cost.dot(&cand.s_psd);
            RealSdpSolution {
                matrix,
                objective,
                status,
                primal_residual: cand.primal_residual,
                dual_residual: cand.dual_residual,
                iterations,
            }
        }
        (st, _) => RealSdpSolution {
            matrix: DMatrix::zeros(ws.dim, ws.dim),
            objective: T::zero(),
            status: st,
            primal_residual: lit(f64::NAN),
            dual_residual: lit(f64::NAN),
            iterations,
        },
    }
}
