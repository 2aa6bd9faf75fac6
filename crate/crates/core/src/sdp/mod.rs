//! Self-contained solver for complex Hermitian semidefinite programs with
//! trace constraints.
//!
//! Complex problems are reduced to real symmetric ones through the standard
//! block embedding and solved by a first-order operator-splitting method
//! over the PSD cone (see [`solver`]). The module also provides the cone
//! projection and the low-rank factor extraction used to recover precoders
//! from a solved Gram matrix.

mod embed;
mod solver;

pub use embed::{complex_from_embedding, embed_matrix, real_embedding};
pub use solver::{solve_real_sdp, RealSdpSolution};

use nalgebra::{ComplexField, Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{lit, Real};

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("eigendecomposition failed: input contains non-finite entries")]
    EigenFailure,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense Hermitian matrix; construction symmetrizes so the invariant
/// `A == A^H` holds exactly.
#[derive(Debug, Clone)]
pub struct HermitianMatrix<T: Real> {
    entries: DMatrix<Complex<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Builds from an arbitrary square matrix by averaging with its adjoint.
    pub fn new(matrix: DMatrix<Complex<T>>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "Hermitian matrix must be square");
        let half = Complex::new(lit::<T>(0.5), T::zero());
        let entries = (&matrix + matrix.adjoint()) * half;
        HermitianMatrix { entries }
    }

    pub fn identity(dimension: usize) -> Self {
        HermitianMatrix {
            entries: DMatrix::identity(dimension, dimension),
        }
    }

    pub fn zeros(dimension: usize) -> Self {
        HermitianMatrix {
            entries: DMatrix::zeros(dimension, dimension),
        }
    }

    /// Rank-one matrix `v v^H`.
    pub fn from_rank_one(v: &DVector<Complex<T>>) -> Self {
        HermitianMatrix {
            entries: v * v.adjoint(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    /// Real trace inner product `Re Tr(A X)`; real-valued for Hermitian
    /// operands.
    pub fn trace_inner(&self, other: &HermitianMatrix<T>) -> T {
        trace_inner(&self.entries, &other.entries)
    }
}

/// `Re Tr(A B)` for two square complex matrices of equal size.
pub fn trace_inner<T: Real>(a: &DMatrix<Complex<T>>, b: &DMatrix<Complex<T>>) -> T {
    let mut acc = T::zero();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let p = a[(i, j)] * b[(j, i)];
            acc += p.re;
        }
    }
    acc
}

/// Direction of one linear trace constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    /// `Tr(A X) >= b`
    Ge,
    /// `Tr(A X) <= b`
    Le,
    /// `Tr(A X) == b`
    Eq,
}

#[derive(Debug, Clone)]
pub struct SdpConstraint<T: Real> {
    pub matrix: HermitianMatrix<T>,
    pub bound: T,
    pub sense: Sense,
}

/// Canonical problem: minimize `Tr(C X)` over Hermitian PSD `X` subject to
/// linear trace constraints and an optional cap on `Tr(X)`.
#[derive(Debug, Clone)]
pub struct SdpProblem<T: Real> {
    pub dimension: usize,
    pub cost: HermitianMatrix<T>,
    pub constraints: Vec<SdpConstraint<T>>,
    pub trace_cap: Option<T>,
}

impl<T: Real> SdpProblem<T> {
    pub fn new(cost: HermitianMatrix<T>) -> Self {
        SdpProblem {
            dimension: cost.dimension(),
            cost,
            constraints: Vec::new(),
            trace_cap: None,
        }
    }

    pub fn with_constraint(mut self, matrix: HermitianMatrix<T>, bound: T, sense: Sense) -> Self {
        self.constraints.push(SdpConstraint { matrix, bound, sense });
        self
    }

    pub fn with_trace_cap(mut self, cap: T) -> Self {
        self.trace_cap = Some(cap);
        self
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        if self.cost.dimension() != self.dimension {
            return Err(SdpError::Dimension("cost dimension mismatch".into()));
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if c.matrix.dimension() != self.dimension {
                return Err(SdpError::Dimension(format!("constraint {k} dimension mismatch")));
            }
        }
        Ok(())
    }
}

/// Termination state of a solve. Reported as data, never as a panic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SdpSolution<T: Real> {
    pub matrix: HermitianMatrix<T>,
    pub objective: T,
    pub status: SdpStatus,
    pub primal_residual: T,
    pub dual_residual: T,
    pub iterations: usize,
}

/// Solver parameters. The tolerance is relative: primal/dual residuals and
/// the duality gap are normalized by the data scale before comparison.
#[derive(Debug, Clone)]
pub struct SolveOptions<T: Real> {
    pub tol: T,
    pub max_iters: usize,
    pub over_relaxation: T,
    /// Residuals are evaluated every this many iterations.
    pub check_every: usize,
    /// When set, per-check iterate residuals are appended to this file as
    /// JSON lines for convergence plots.
    pub trace_file: Option<std::path::PathBuf>,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            tol: lit(1e-6),
            max_iters: 50_000,
            over_relaxation: lit(1.5),
            check_every: 10,
            trace_file: None,
        }
    }
}

impl<T: Real> SolveOptions<T> {
    pub fn with_tol(tol: T, max_iters: usize) -> Self {
        SolveOptions {
            tol,
            max_iters,
            ..Self::default()
        }
    }
}

/// Solves a complex Hermitian SDP through its real embedding.
pub fn solve_sdp<T: Real>(problem: &SdpProblem<T>, options: &SolveOptions<T>) -> SdpSolution<T> {
    problem.validate().expect("malformed SDP");
    let real = real_embedding(problem);
    let real_solution = solve_real_sdp(&real, options);
    let matrix = HermitianMatrix::new(complex_from_embedding(&real_solution.matrix));
    let objective = trace_inner(problem.cost.entries(), matrix.entries());
    SdpSolution {
        matrix,
        objective,
        status: real_solution.status,
        primal_residual: real_solution.primal_residual,
        dual_residual: real_solution.dual_residual,
        iterations: real_solution.iterations,
    }
}

/// Frobenius-nearest PSD matrix: symmetrize, eigendecompose, clamp negative
/// eigenvalues to zero.
pub fn psd_projection<T: Real>(matrix: &DMatrix<T>) -> Result<DMatrix<T>, SdpError> {
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(SdpError::EigenFailure);
    }
    let half = lit::<T>(0.5);
    let sym = (matrix + matrix.transpose()) * half;
    let eig = sym.symmetric_eigen();
    let clamped = eig.eigenvalues.map(|v| v.max(T::zero()));
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&clamped) * eig.eigenvectors.transpose())
}

/// Eigen-pairs of a Hermitian matrix sorted by descending eigenvalue, each
/// eigenvector phase-normalized so its first significantly nonzero component
/// has positive real part; this makes degenerate decompositions
/// deterministic up to exactly tied eigenvalues.
pub fn hermitian_eigen_sorted<T: Real>(
    matrix: &DMatrix<Complex<T>>,
) -> (Vec<T>, Vec<DVector<Complex<T>>>) {
    let eig = matrix.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &idx in &order {
        values.push(eig.eigenvalues[idx]);
        let mut v: DVector<Complex<T>> = eig.eigenvectors.column(idx).into_owned();
        let scale = v.iter().fold(T::zero(), |acc, c| acc.max(c.modulus()));
        if scale > T::zero() {
            let pivot = v
                .iter()
                .copied()
                .find(|c| c.modulus() > scale * lit(1e-9))
                .unwrap_or(Complex::new(T::one(), T::zero()));
            let phase = pivot / Complex::new(pivot.modulus(), T::zero());
            let rotation = phase.conj();
            for c in v.iter_mut() {
                *c *= rotation;
            }
        }
        vectors.push(v);
    }
    (values, vectors)
}

/// Scaled eigenvector factors of a PSD matrix: eigenvectors weighted by the
/// square root of their eigenvalues, for all eigenvalues above `rank_tol`
/// times the largest, capped at `max_factors` and sorted by descending
/// eigenvalue.
pub fn factor_psd_matrix<T: Real>(
    matrix: &DMatrix<Complex<T>>,
    max_factors: usize,
    rank_tol: T,
) -> Vec<DVector<Complex<T>>> {
    let (values, vectors) = hermitian_eigen_sorted(matrix);
    let Some(&lead) = values.first() else {
        return Vec::new();
    };
    if lead <= T::zero() {
        return Vec::new();
    }
    values
        .iter()
        .zip(vectors)
        .take(max_factors)
        .filter(|(&v, _)| v > rank_tol * lead)
        .map(|(&v, vec)| vec * Complex::new(v.sqrt(), T::zero()))
        .collect()
}

/// [`factor_psd_matrix`] applied to a solved SDP matrix.
pub fn extract_rank_factors<T: Real>(
    solution: &SdpSolution<T>,
    max_factors: usize,
    rank_tol: T,
) -> Vec<DVector<Complex<T>>> {
    debug_assert_eq!(solution.status, SdpStatus::Optimal);
    factor_psd_matrix(solution.matrix.entries(), max_factors, rank_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cplx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn hermitian_construction_symmetrizes() {
        let raw = DMatrix::from_row_slice(2, 2, &[cplx(1.0, 0.5), cplx(2.0, 1.0), cplx(0.0, 0.0), cplx(3.0, -0.2)]);
        let h = HermitianMatrix::new(raw);
        let e = h.entries();
        assert_eq!(e[(0, 1)], e[(1, 0)].conj());
        assert_eq!(e[(0, 0)].im, 0.0);
        assert_eq!(e[(1, 1)].im, 0.0);
    }

    #[test]
    fn psd_projection_clamps_eigenvalues() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let p = psd_projection(&m).unwrap();
        assert_relative_eq!(p[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(p[(1, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn psd_projection_is_idempotent_on_psd_input() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 0.9]);
        let psd = &g * g.transpose();
        let p = psd_projection(&psd).unwrap();
        assert!((p - &psd).norm() < 1e-12 * psd.norm());
    }

    #[test]
    fn psd_projection_rejects_non_finite() {
        let m = DMatrix::from_row_slice(2, 2, &[f64::NAN, 0.0, 0.0, 1.0]);
        assert!(matches!(psd_projection(&m), Err(SdpError::EigenFailure)));
    }

    #[test]
    fn psd_projection_beats_random_psd_candidates() {
        // sampling oracle: no random PSD candidate is closer in Frobenius
        // norm than the eigenvalue clamp
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[0.5, -1.1, 0.7, -1.1, -0.4, 0.2, 0.7, 0.2, -1.3],
        );
        let p = psd_projection(&m).unwrap();
        let best = (&p - &m).norm();
        let mut state = 0x1234_5678_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..10_000 {
            let g = DMatrix::from_fn(3, 3, |_, _| next());
            let cand = &g * g.transpose();
            assert!((cand - &m).norm() >= best - 1e-9);
        }
    }

    #[test]
    fn rank_factors_recover_rank_one() {
        let v = DVector::from_vec(vec![cplx(1.0, 0.5), cplx(-0.3, 0.2), cplx(0.0, 1.0)]);
        let solution = SdpSolution {
            matrix: HermitianMatrix::from_rank_one(&v),
            objective: 0.0,
            status: SdpStatus::Optimal,
            primal_residual: 0.0,
            dual_residual: 0.0,
            iterations: 1,
        };
        let factors = extract_rank_factors(&solution, 4, 1e-9);
        assert_eq!(factors.len(), 1);
        // equal up to a global phase: compare outer products
        let recon = HermitianMatrix::from_rank_one(&factors[0]);
        assert!((recon.entries() - solution.matrix.entries()).norm() < 1e-9 * v.norm_squared());
    }

    #[test]
    fn rank_factors_of_identity() {
        let solution = SdpSolution {
            matrix: HermitianMatrix::identity(2),
            objective: 0.0,
            status: SdpStatus::Optimal,
            primal_residual: 0.0,
            dual_residual: 0.0,
            iterations: 1,
        };
        let factors = extract_rank_factors(&solution, 2, 1e-9);
        assert_eq!(factors.len(), 2);
        assert_relative_eq!(factors[0].norm(), 1.0, epsilon = 1e-10);
        assert!(factors[0].dotc(&factors[1]).norm() < 1e-10);
    }

    #[test]
    fn rank_factor_reconstruction_error_equals_discarded_mass() {
        let a = DMatrix::from_fn(4, 4, |i, j| {
            let t = (i * 4 + j) as f64;
            cplx((t * 0.731).sin(), (t * 1.37 + 0.4).cos())
        });
        let x = HermitianMatrix::new(&a * a.adjoint());
        let solution = SdpSolution {
            matrix: x.clone(),
            objective: 0.0,
            status: SdpStatus::Optimal,
            primal_residual: 0.0,
            dual_residual: 0.0,
            iterations: 1,
        };
        let factors = extract_rank_factors(&solution, 2, 0.0);
        let mut recon = DMatrix::zeros(4, 4);
        for f in &factors {
            recon += f * f.adjoint();
        }
        let (values, vectors) = hermitian_eigen_sorted(x.entries());
        let mut discarded = DMatrix::zeros(4, 4);
        for (v, vec) in values.iter().zip(vectors).skip(2) {
            discarded += &vec * vec.adjoint() * cplx(*v, 0.0);
        }
        assert_relative_eq!(
            (x.entries() - &recon).norm(),
            discarded.norm(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn eigen_sign_convention_is_deterministic() {
        let m = DMatrix::from_row_slice(2, 2, &[cplx(0.0, 0.0), cplx(0.0, 1.0), cplx(0.0, -1.0), cplx(0.0, 0.0)]);
        let (vals_a, vecs_a) = hermitian_eigen_sorted(&m);
        let (vals_b, vecs_b) = hermitian_eigen_sorted(&m.clone());
        assert_eq!(vals_a, vals_b);
        for (a, b) in vecs_a.iter().zip(&vecs_b) {
            assert!((a - b).norm() < 1e-14);
            let pivot = a.iter().find(|c| c.norm() > 1e-9).unwrap();
            assert!(pivot.re > 0.0);
            assert!(pivot.im.abs() < 1e-12);
        }
    }
}
