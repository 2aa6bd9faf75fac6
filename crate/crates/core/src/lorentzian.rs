//! Lorentzian-constrained metamaterial element weights.
//!
//! A physically realizable element weight lies on the circle
//! `(j + exp(j*phi)) / 2`, i.e. the circle of radius 1/2 centered at `j/2`:
//! amplitude and phase are coupled. This module builds the sparse weight
//! matrix `Q` and projects unconstrained weights back onto the circle.

use nalgebra::{ComplexField, Complex, DMatrix};
use thiserror::Error;

use crate::config::ArrayGeometry;
use crate::scalar::{imag_unit, lit, polar, wrap_angle, Real};

#[derive(Debug, Error)]
pub enum LorentzianError {
    #[error("expected {expected} phases, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// Weight of a single element at configured phase `phi`.
#[inline]
pub fn lorentzian_weight<T: Real>(phase_rad: T) -> Complex<T> {
    (imag_unit::<T>() + polar(T::one(), phase_rad)) * Complex::new(lit(0.5), T::zero())
}

/// A full DMA weight configuration: per-element phases, their Lorentzian
/// weights and the assembled `N x N_v` block-sparse matrix `Q`.
#[derive(Debug, Clone)]
pub struct DmaConfiguration<T: Real> {
    /// Element phases in `[0, 2*pi)`, flattened in array order.
    pub phases: Vec<T>,
    /// Lorentzian weights `(j + exp(j*phi)) / 2`, flattened in array order.
    pub weights: Vec<Complex<T>>,
    /// Weight matrix: row `(i * N_h + l)` has its only nonzero in column `i`.
    pub q_matrix: DMatrix<Complex<T>>,
}

impl<T: Real> DmaConfiguration<T> {
    /// Largest deviation of any weight from the Lorentzian circle.
    pub fn circle_deviation(&self) -> T {
        let center = imag_unit::<T>() * Complex::new(lit(0.5), T::zero());
        self.weights.iter().fold(T::zero(), |acc, q| {
            acc.max(((q - center).modulus() - lit::<T>(0.5)).abs())
        })
    }
}

/// Assembles the weight matrix for a phase vector; phases are wrapped into
/// `[0, 2*pi)`.
pub fn build_q_matrix<T: Real>(
    phases: &[T],
    geometry: &ArrayGeometry<T>,
) -> Result<DmaConfiguration<T>, LorentzianError> {
    if phases.len() != geometry.total_elements {
        return Err(LorentzianError::DimensionMismatch {
            expected: geometry.total_elements,
            actual: phases.len(),
        });
    }
    let phases: Vec<T> = phases.iter().map(|&p| wrap_angle(p)).collect();
    let weights: Vec<Complex<T>> = phases.iter().map(|&p| lorentzian_weight(p)).collect();
    let mut q = DMatrix::zeros(geometry.total_elements, geometry.num_waveguides);
    for i in 0..geometry.num_waveguides {
        for l in 0..geometry.elements_per_waveguide {
            let row = geometry.index_of(i, l);
            q[(row, i)] = weights[row];
        }
    }
    Ok(DmaConfiguration {
        phases,
        weights,
        q_matrix: q,
    })
}

/// Nearest Lorentzian phase for one unconstrained weight. The nearest point
/// on a circle is the radial projection, so `phi = arg(q' - j/2)`; the
/// circle center itself projects to the maximum-gain phase `pi/2`.
#[inline]
pub fn project_weight<T: Real>(unconstrained: Complex<T>) -> T {
    let center = imag_unit::<T>() * Complex::new(lit(0.5), T::zero());
    let radial = unconstrained - center;
    if radial.modulus() == T::zero() {
        return T::frac_pi_2();
    }
    wrap_angle(radial.argument())
}

/// Projects every entry onto the Lorentzian circle, returning the phases and
/// the projected weights.
pub fn project_to_lorentzian<T: Real>(
    unconstrained: &[Complex<T>],
) -> (Vec<T>, Vec<Complex<T>>) {
    let phases: Vec<T> = unconstrained.iter().map(|&q| project_weight(q)).collect();
    let weights = phases.iter().map(|&p| lorentzian_weight(p)).collect();
    (phases, weights)
}
