//! Near-field channel coefficients between array elements and users.
//!
//! Each coefficient is a deterministic function of geometry: a spherical
//! spreading loss weighted by the element radiation profile and a phase set
//! by the exact element-to-user distance.

use nalgebra::{ComplexField, Complex, DVector, Vector3};
use thiserror::Error;

use crate::config::ArrayGeometry;
use crate::scalar::{lit, polar, Real};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("element and user positions coincide")]
    DegenerateGeometry,
}

/// Complex channel coefficients from every array element to one user,
/// flattened in the array's `(waveguide, element)` order.
#[derive(Debug, Clone)]
pub struct ChannelVector<T: Real> {
    pub user_index: usize,
    pub coefficients: DVector<Complex<T>>,
    pub user_position: Vector3<T>,
}

impl<T: Real> ChannelVector<T> {
    /// Squared Euclidean norm of the coefficient vector.
    pub fn gain(&self) -> T {
        self.coefficients.iter().fold(T::zero(), |acc, c| acc + c.modulus_squared())
    }
}

/// Radiation profile `F(theta)` of a single element: `G_t cos(theta)^(G_t/2 - 1)`
/// over the front half space and zero behind it, with `G_t = 2 (b + 1)`.
pub fn element_radiation_gain<T: Real>(elevation_rad: T, boresight_gain: T) -> T {
    let gt = lit::<T>(2.0) * (boresight_gain + T::one());
    // the profile vanishes at the horizon, where floating cos would not
    if elevation_rad < T::zero() || elevation_rad >= T::frac_pi_2() {
        return T::zero();
    }
    let c = elevation_rad.cos().max(T::zero());
    gt * c.powf(gt / lit(2.0) - T::one())
}

/// Channel coefficient `gamma = A * exp(-j 2 pi d / lambda)` with
/// `A = sqrt(F(theta)) * lambda / (4 pi d)`.
///
/// The elevation is measured from the array's downward boresight normal
/// (the array radiates from the ceiling toward the floor).
pub fn channel_coefficient<T: Real>(
    element_pos: &Vector3<T>,
    user_pos: &Vector3<T>,
    wavelength_m: T,
    boresight_gain: T,
) -> Result<Complex<T>, ChannelError> {
    let ray = user_pos - element_pos;
    let distance = ray.norm();
    if distance == T::zero() {
        return Err(ChannelError::DegenerateGeometry);
    }
    // cos(theta) against the (0, 0, -1) boresight direction
    let cos_theta = -ray.z / distance;
    if cos_theta <= T::zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let theta = cos_theta.min(T::one()).acos();
    let profile = element_radiation_gain(theta, boresight_gain);
    let amplitude = profile.sqrt() * wavelength_m / (lit::<T>(4.0) * T::pi() * distance);
    let phase = -T::two_pi() * distance / wavelength_m;
    Ok(polar(amplitude, phase))
}

/// Channel coefficients from an arbitrary list of element positions.
pub fn channel_vector_for_positions<T: Real>(
    positions: &[Vector3<T>],
    user_pos: &Vector3<T>,
    wavelength_m: T,
    boresight_gain: T,
) -> Result<DVector<Complex<T>>, ChannelError> {
    let coefficients = positions
        .iter()
        .map(|p| channel_coefficient(p, user_pos, wavelength_m, boresight_gain))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DVector::from_vec(coefficients))
}

/// Channel vector between the full array and one user, ordered to match the
/// geometry's element flattening.
pub fn channel_vector<T: Real>(
    geometry: &ArrayGeometry<T>,
    user_pos: &Vector3<T>,
    wavelength_m: T,
    boresight_gain: T,
) -> Result<ChannelVector<T>, ChannelError> {
    let coefficients = channel_vector_for_positions(
        &geometry.element_positions,
        user_pos,
        wavelength_m,
        boresight_gain,
    )?;
    Ok(ChannelVector {
        user_index: 0,
        coefficients,
        user_position: *user_pos,
    })
}
