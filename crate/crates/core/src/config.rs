//! Physical scenario description: system parameters, array construction,
//! user placement and near-field region bookkeeping.

use nalgebra::Vector3;
use rand::distributions::Uniform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{lit, Real, SPEED_OF_LIGHT};

#[derive(Debug, Error)]
pub enum GeometryError {
    /// The requested antenna length is too small to fit a single waveguide
    /// or a single element at the given wavelength.
    #[error("array has no elements: {num_waveguides} waveguides x {elements_per_waveguide} elements")]
    ZeroArray {
        num_waveguides: usize,
        elements_per_waveguide: usize,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Top-level physical scenario parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig<T: Real> {
    /// Carrier frequency (Hz).
    pub frequency_hz: T,
    /// Side length of the square transmit aperture (m).
    pub antenna_length_m: T,
    /// Number of energy-harvesting users.
    pub num_users: usize,
    /// Per-user RF power requirement (W); one entry per user.
    pub rf_thresholds_w: Vec<T>,
    /// Boresight gain `b` of the element radiation profile.
    #[serde(default = "default_boresight")]
    pub boresight_gain: T,
    /// Side of the square service area (m); users fall on its floor.
    #[serde(default = "default_room_side")]
    pub room_side_m: T,
    /// Height of the transmit array above the floor (m).
    #[serde(default = "default_tx_height")]
    pub tx_height_m: T,
    /// Number of random user-placement realizations.
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    /// Base seed for all randomness derived from this scenario.
    #[serde(default)]
    pub rng_seed: u64,
}

fn default_boresight<T: Real>() -> T {
    lit(2.0)
}
fn default_room_side<T: Real>() -> T {
    lit(10.0)
}
fn default_tx_height<T: Real>() -> T {
    lit(3.0)
}
fn default_realizations() -> usize {
    30
}

impl<T: Real> SystemConfig<T> {
    /// Free-space wavelength (m); always derived from the frequency.
    pub fn wavelength(&self) -> T {
        lit::<T>(SPEED_OF_LIGHT) / self.frequency_hz
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let fail = |msg: &str| Err(GeometryError::Invalid(msg.to_string()));
        if self.frequency_hz <= T::zero() {
            return fail("frequency_hz must be positive");
        }
        if self.antenna_length_m <= T::zero() {
            return fail("antenna_length_m must be positive");
        }
        if self.num_users == 0 {
            return fail("num_users must be at least 1");
        }
        if self.rf_thresholds_w.len() != self.num_users {
            return fail("rf_thresholds_w must have one entry per user");
        }
        if self.rf_thresholds_w.iter().any(|&d| d <= T::zero()) {
            return fail("all rf_thresholds_w must be positive");
        }
        if self.boresight_gain < T::zero() {
            return fail("boresight_gain must be nonnegative");
        }
        if self.room_side_m <= T::zero() || self.tx_height_m <= T::zero() {
            return fail("room dimensions must be positive");
        }
        if self.realizations == 0 {
            return fail("realizations must be at least 1");
        }
        Ok(())
    }
}

/// Element layout of the planar metasurface array.
///
/// The array lies in the plane `z = tx_height`, centered on the origin.
/// Waveguides run along the x-axis and are stacked along y; element `(i, l)`
/// (waveguide `i`, element `l`, both 0-based) sits at flattened index
/// `i * elements_per_waveguide + l`.
#[derive(Debug, Clone)]
pub struct ArrayGeometry<T: Real> {
    pub num_waveguides: usize,
    pub elements_per_waveguide: usize,
    pub total_elements: usize,
    pub element_positions: Vec<Vector3<T>>,
    /// Spacing between consecutive elements along a waveguide (m).
    pub element_spacing_m: T,
    /// Spacing between adjacent waveguides (m).
    pub waveguide_spacing_m: T,
    /// Aperture diameter `sqrt(2) * L` (m).
    pub diameter_m: T,
    /// Center of the array plane.
    pub center: Vector3<T>,
}

impl<T: Real> ArrayGeometry<T> {
    #[inline]
    pub fn index_of(&self, waveguide: usize, element: usize) -> usize {
        waveguide * self.elements_per_waveguide + element
    }
}

/// Builds the array layout from the scenario: the element spacing is a fifth
/// of a wavelength along each waveguide and the waveguides sit half a
/// wavelength apart, with counts floored to fit inside the aperture length.
pub fn build_array_geometry<T: Real>(
    config: &SystemConfig<T>,
) -> Result<ArrayGeometry<T>, GeometryError> {
    config.validate()?;
    let lambda = config.wavelength();
    let length = config.antenna_length_m;
    let waveguide_spacing = lambda / lit(2.0);
    let element_spacing = lambda / lit(5.0);
    let num_waveguides = (length / waveguide_spacing).floor().to_usize().unwrap_or(0);
    let elements_per_waveguide = (length / element_spacing).floor().to_usize().unwrap_or(0);
    if num_waveguides < 1 || elements_per_waveguide < 1 {
        return Err(GeometryError::ZeroArray {
            num_waveguides,
            elements_per_waveguide,
        });
    }

    let center = Vector3::new(T::zero(), T::zero(), config.tx_height_m);
    let half = |n: usize| lit::<T>((n as f64 - 1.0) / 2.0);
    let x_off = half(elements_per_waveguide);
    let y_off = half(num_waveguides);
    let mut element_positions = Vec::with_capacity(num_waveguides * elements_per_waveguide);
    for i in 0..num_waveguides {
        let y = (lit::<T>(i as f64) - y_off) * waveguide_spacing;
        for l in 0..elements_per_waveguide {
            let x = (lit::<T>(l as f64) - x_off) * element_spacing;
            element_positions.push(center + Vector3::new(x, y, T::zero()));
        }
    }

    Ok(ArrayGeometry {
        num_waveguides,
        elements_per_waveguide,
        total_elements: num_waveguides * elements_per_waveguide,
        element_positions,
        element_spacing_m: element_spacing,
        waveguide_spacing_m: waveguide_spacing,
        diameter_m: lit::<T>(2.0).sqrt() * length,
        center,
    })
}

/// Radiating-near-field bounds for an aperture.
#[derive(Debug, Clone, Copy)]
pub struct FieldRegion<T: Real> {
    /// Fresnel distance (m): inner edge of the radiating near field.
    pub fresnel_m: T,
    /// Fraunhofer distance (m): outer edge of the radiating near field.
    pub fraunhofer_m: T,
}

impl<T: Real> FieldRegion<T> {
    /// True when a transmitter-to-user distance falls inside the region.
    pub fn contains(&self, distance: T) -> bool {
        distance > self.fresnel_m && distance < self.fraunhofer_m
    }
}

/// Fresnel distance `cbrt(D^4 / 8 lambda)` and Fraunhofer distance
/// `2 D^2 / lambda` for the array's diameter.
pub fn field_region_bounds<T: Real>(
    geometry: &ArrayGeometry<T>,
    wavelength_m: T,
) -> FieldRegion<T> {
    let d = geometry.diameter_m;
    let d2 = d * d;
    let fresnel = (d2 * d2 / (lit::<T>(8.0) * wavelength_m)).cbrt();
    let fraunhofer = lit::<T>(2.0) * d2 / wavelength_m;
    if d > wavelength_m / lit(2.0) {
        assert!(
            fresnel < fraunhofer,
            "Fresnel bound must lie below the Fraunhofer bound for D > lambda/2"
        );
    }
    FieldRegion {
        fresnel_m: fresnel,
        fraunhofer_m: fraunhofer,
    }
}

/// Deterministically mixes a base seed with context words (realization
/// index, method id, ...) using splitmix64 steps. Stable across platforms.
pub fn derive_seed(base: u64, salts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let mut state = splitmix(base);
    for &s in salts {
        state = splitmix(state ^ s.wrapping_mul(0xa076_1d64_78bd_642f));
    }
    state
}

/// Draws the user positions of one realization: uniform over the floor of
/// the `room_side x room_side` area, `z = 0`. Deterministic in
/// `(rng_seed, realization_index)`.
pub fn sample_user_positions<T: Real>(
    config: &SystemConfig<T>,
    realization_index: usize,
) -> Vec<Vector3<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        config.rng_seed,
        &[0x5cee_u64, realization_index as u64],
    ));
    let half = config.room_side_m / lit(2.0);
    let dist = Uniform::new(-half, half);
    (0..config.num_users)
        .map(|_| Vector3::new(rng.sample(&dist), rng.sample(&dist), T::zero()))
        .collect()
}

/// Indices of users whose distance to the array center falls outside the
/// radiating near field. Advisory only; the channel model stays valid.
pub fn near_field_violations<T: Real>(
    geometry: &ArrayGeometry<T>,
    region: &FieldRegion<T>,
    users: &[Vector3<T>],
) -> Vec<usize> {
    users
        .iter()
        .enumerate()
        .filter(|(_, p)| !region.contains((*p - geometry.center).norm()))
        .map(|(k, _)| k)
        .collect()
}
