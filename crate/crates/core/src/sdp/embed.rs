//! Complex-to-real SDP embedding.
//!
//! A Hermitian `A = R + jS` maps to the symmetric `[[R, -S], [S, R]]` of
//! twice the dimension; `X` is complex-PSD exactly when its embedding is
//! real-PSD, and trace inner products double:
//! `Tr(embed(A) embed(X)) = 2 Tr(A X)`. Constraint bounds and the trace cap
//! are therefore doubled on the way in, and the factor is undone when a
//! solved real matrix is folded back to complex form.

use nalgebra::{Complex, DMatrix};

use super::{SdpConstraint, SdpProblem, Sense};
use crate::scalar::{lit, Real};

/// Real symmetric counterpart of [`SdpProblem`]; also usable directly for
/// natively real problems.
#[derive(Debug, Clone)]
pub struct RealSdpProblem<T: Real> {
    pub dimension: usize,
    pub cost: DMatrix<T>,
    pub constraints: Vec<(DMatrix<T>, T, Sense)>,
    pub trace_cap: Option<T>,
}

/// `[[Re A, -Im A], [Im A, Re A]]`.
pub fn embed_matrix<T: Real>(a: &DMatrix<Complex<T>>) -> DMatrix<T> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = a[(i, j)];
            out[(i, j)] = v.re;
            out[(n + i, n + j)] = v.re;
            out[(i, n + j)] = -v.im;
            out[(n + i, j)] = v.im;
        }
    }
    out
}

/// Folds a real symmetric `2n x 2n` matrix back to the complex `n x n` form,
/// averaging the two embedding copies. For matrices with exact embedding
/// structure this inverts [`embed_matrix`]; for any PSD input the result is
/// PSD with the same constraint inner products.
pub fn complex_from_embedding<T: Real>(x: &DMatrix<T>) -> DMatrix<Complex<T>> {
    let n = x.nrows() / 2;
    let half = lit::<T>(0.5);
    DMatrix::from_fn(n, n, |i, j| {
        Complex::new(
            (x[(i, j)] + x[(n + i, n + j)]) * half,
            (x[(n + i, j)] - x[(i, n + j)]) * half,
        )
    })
}

/// Embeds a complex problem, doubling constraint bounds and the trace cap to
/// match the doubled trace inner products.
pub fn real_embedding<T: Real>(problem: &SdpProblem<T>) -> RealSdpProblem<T> {
    let two = lit::<T>(2.0);
    RealSdpProblem {
        dimension: 2 * problem.dimension,
        cost: embed_matrix(problem.cost.entries()),
        constraints: problem
            .constraints
            .iter()
            .map(|SdpConstraint { matrix, bound, sense }| {
                (embed_matrix(matrix.entries()), *bound * two, *sense)
            })
            .collect(),
        trace_cap: problem.trace_cap.map(|c| c * two),
    }
}
