//! Microstrip waveguide physics: effective dielectric constant with
//! frequency dispersion, characteristic impedance, conductor and dielectric
//! losses, and the per-element propagation matrix of the feed lines.
//!
//! Unit conventions: attenuation in nepers per meter throughout; the
//! dispersion factor `G(f)` is evaluated with frequency in GHz, substrate
//! thickness in cm and impedance in ohms, which renders it dimensionless.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ArrayGeometry;
use crate::scalar::{lit, polar, Real, SPEED_OF_LIGHT, VACUUM_PERMEABILITY};

/// Conductivity of annealed copper (S/m), the default strip conductor.
pub const COPPER_CONDUCTIVITY: f64 = 5.8e7;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("material parameters out of range: {0}")]
    Invalid(String),
    #[error("unknown material '{0}'")]
    Unknown(String),
    #[error("material database parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("material database io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Substrate and conductor parameters of one microstrip build.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaterialSpec<T: Real> {
    pub name: String,
    /// Relative dielectric constant of the substrate (> 1).
    pub dielectric_constant: T,
    /// Dielectric loss tangent.
    pub loss_tangent: T,
    /// Substrate thickness (m).
    pub substrate_thickness_m: T,
    /// Conductor strip width (m); defaults to the substrate thickness.
    pub conductor_width_m: T,
    /// Conductor conductivity (S/m); defaults to copper.
    pub conductivity_s_per_m: T,
}

impl<T: Real> MaterialSpec<T> {
    pub fn validate(&self) -> Result<(), MaterialError> {
        if self.dielectric_constant <= T::one() {
            return Err(MaterialError::Invalid("dielectric_constant must exceed 1".into()));
        }
        if self.loss_tangent < T::zero() {
            return Err(MaterialError::Invalid("loss_tangent must be nonnegative".into()));
        }
        if self.substrate_thickness_m <= T::zero()
            || self.conductor_width_m <= T::zero()
            || self.conductivity_s_per_m <= T::zero()
        {
            return Err(MaterialError::Invalid("geometric and conductor parameters must be positive".into()));
        }
        Ok(())
    }
}

/// Quasi-static effective dielectric constant for raw parameters.
pub fn static_eff_dielectric_formula<T: Real>(eps_r: T, thickness: T, width: T) -> T {
    let half = lit::<T>(0.5);
    (eps_r + T::one()) * half
        + (eps_r - T::one()) * half / (T::one() + lit::<T>(12.0) * thickness / width).sqrt()
}

/// Effective dielectric constant of the strip at DC.
pub fn static_eff_dielectric<T: Real>(material: &MaterialSpec<T>) -> T {
    static_eff_dielectric_formula(
        material.dielectric_constant,
        material.substrate_thickness_m,
        material.conductor_width_m,
    )
}

/// Narrow-strip impedance branch (width <= thickness).
pub fn impedance_narrow_strip<T: Real>(thickness: T, width: T, eff_dielectric: T) -> T {
    lit::<T>(60.0) * (lit::<T>(8.0) * thickness / width + width / (lit::<T>(4.0) * thickness)).ln()
        / eff_dielectric.sqrt()
}

/// Wide-strip impedance branch (width >= thickness).
pub fn impedance_wide_strip<T: Real>(thickness: T, width: T, eff_dielectric: T) -> T {
    let ratio = width / thickness;
    lit::<T>(120.0) * T::pi()
        / (eff_dielectric.sqrt()
            * (ratio + lit::<T>(1.393) + lit::<T>(0.667) * (ratio + lit::<T>(1.444)).ln()))
}

/// Characteristic impedance of the strip, branched on the width/thickness
/// ratio. Both branches agree within about 2% at equal width and thickness.
pub fn characteristic_impedance<T: Real>(material: &MaterialSpec<T>, eff_dielectric: T) -> T {
    let zeta = material.substrate_thickness_m;
    let ups = material.conductor_width_m;
    if ups == zeta {
        let narrow = impedance_narrow_strip(zeta, ups, eff_dielectric);
        let wide = impedance_wide_strip(zeta, ups, eff_dielectric);
        debug_assert!(
            ((narrow - wide) / narrow).abs() < lit(0.02),
            "impedance branches disagree at width = thickness"
        );
        narrow
    } else if ups < zeta {
        impedance_narrow_strip(zeta, ups, eff_dielectric)
    } else {
        impedance_wide_strip(zeta, ups, eff_dielectric)
    }
}

/// Frequency-dispersed effective dielectric constant,
/// `eps_r - (eps_r - eps_static) / (1 + G(f))`.
pub fn dispersive_eff_dielectric<T: Real>(
    material: &MaterialSpec<T>,
    frequency_hz: T,
    z0_ohm: T,
) -> T {
    let eps_r = material.dielectric_constant;
    let eps_static = static_eff_dielectric(material);
    // G(f) in the dimensionless GHz / cm / ohm convention
    let f_ghz = frequency_hz * lit(1e-9);
    let zeta_cm = material.substrate_thickness_m * lit(100.0);
    let corner = z0_ohm / (lit::<T>(8.0) * T::pi() * zeta_cm);
    let g = (lit::<T>(0.6) + lit::<T>(0.009) * z0_ohm) * (f_ghz / corner) * (f_ghz / corner);
    eps_r - (eps_r - eps_static) / (T::one() + g)
}

/// Fully evaluated strip model at one frequency.
#[derive(Debug, Clone)]
pub struct MicrostripModel<T: Real> {
    pub material: MaterialSpec<T>,
    pub frequency_hz: T,
    /// Quasi-static effective dielectric constant.
    pub static_eff_dielectric: T,
    /// Dispersed effective dielectric constant at the model frequency.
    pub eff_dielectric: T,
    pub char_impedance_ohm: T,
    /// Guided propagation constant (rad/m).
    pub beta_rad_per_m: T,
    /// Total attenuation (Np/m).
    pub alpha_np_per_m: T,
    pub alpha_dielectric: T,
    pub alpha_conductor: T,
    pub surface_resistivity_ohm: T,
}

/// Evaluates the full strip model: the impedance is computed once from the
/// quasi-static dielectric constant and reused inside the dispersion factor.
pub fn attenuation_and_beta<T: Real>(
    material: &MaterialSpec<T>,
    frequency_hz: T,
) -> MicrostripModel<T> {
    let eps_static = static_eff_dielectric(material);
    let z0 = characteristic_impedance(material, eps_static);
    let eps_f = dispersive_eff_dielectric(material, frequency_hz, z0);
    let lambda = lit::<T>(SPEED_OF_LIGHT) / frequency_hz;
    let beta = T::two_pi() / lambda * eps_f.sqrt();

    let eps_r = material.dielectric_constant;
    let alpha_d = T::pi() * eps_r * (eps_f - T::one()) * material.loss_tangent
        / (lambda * eps_f.sqrt() * (eps_r - T::one()));
    let rs = (T::pi() * frequency_hz * lit::<T>(VACUUM_PERMEABILITY)
        / material.conductivity_s_per_m)
        .sqrt();
    let alpha_c = rs / (z0 * material.conductor_width_m);

    debug_assert!(eps_static <= eps_f && eps_f <= eps_r);
    MicrostripModel {
        material: material.clone(),
        frequency_hz,
        static_eff_dielectric: eps_static,
        eff_dielectric: eps_f,
        char_impedance_ohm: z0,
        beta_rad_per_m: beta,
        alpha_np_per_m: alpha_d + alpha_c,
        alpha_dielectric: alpha_d,
        alpha_conductor: alpha_c,
        surface_resistivity_ohm: rs,
    }
}

/// Diagonal intra-waveguide propagation matrix: the element at position `l`
/// along its strip (0-based) sees `exp(-l * d * (alpha + j beta))`.
#[derive(Debug, Clone)]
pub struct PropagationMatrix<T: Real> {
    /// Diagonal entries, flattened in array element order.
    pub diagonal: DVector<Complex<T>>,
    pub inter_element_spacing_m: T,
}

impl<T: Real> PropagationMatrix<T> {
    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.len() == 0
    }

    /// Materializes the full diagonal matrix.
    pub fn dense(&self) -> DMatrix<Complex<T>> {
        DMatrix::from_diagonal(&self.diagonal)
    }

    /// Identity propagation (no feed-line losses or phase).
    pub fn identity(n: usize) -> Self {
        PropagationMatrix {
            diagonal: DVector::from_element(n, Complex::new(T::one(), T::zero())),
            inter_element_spacing_m: T::zero(),
        }
    }
}

/// Builds the propagation matrix from a strip model and array layout; every
/// waveguide is assumed to use the same strip.
pub fn propagation_matrix<T: Real>(
    model: &MicrostripModel<T>,
    geometry: &ArrayGeometry<T>,
) -> PropagationMatrix<T> {
    let d = geometry.element_spacing_m;
    let mut diagonal = DVector::from_element(
        geometry.total_elements,
        Complex::new(T::one(), T::zero()),
    );
    for i in 0..geometry.num_waveguides {
        for l in 0..geometry.elements_per_waveguide {
            let along = lit::<T>(l as f64) * d;
            let magnitude = (-model.alpha_np_per_m * along).exp();
            let phase = -model.beta_rad_per_m * along;
            diagonal[geometry.index_of(i, l)] = polar(magnitude, phase);
        }
    }
    PropagationMatrix {
        diagonal,
        inter_element_spacing_m: d,
    }
}

/// Table of known strip materials, loadable from JSON and extendable by the
/// user. Entries omit the conductor width (defaults to the thickness) and
/// conductivity (defaults to copper).
#[derive(Debug, Clone)]
pub struct MaterialDb<T: Real> {
    materials: Vec<MaterialSpec<T>>,
}

#[derive(Deserialize)]
struct RawMaterial {
    name: String,
    #[serde(default)]
    #[allow(dead_code)]
    note: String,
    dielectric_constant: f64,
    loss_tangent: f64,
    substrate_thickness_m: f64,
    conductor_width_m: Option<f64>,
    conductivity_s_per_m: Option<f64>,
}

#[derive(Deserialize)]
struct RawDb {
    materials: Vec<RawMaterial>,
}

const BUILTIN_MATERIALS: &str = include_str!("../data/materials.json");

impl<T: Real> MaterialDb<T> {
    /// The built-in material table.
    pub fn builtin() -> Self {
        Self::from_json_str(BUILTIN_MATERIALS).expect("embedded material table is valid")
    }

    pub fn from_json_str(json: &str) -> Result<Self, MaterialError> {
        let raw: RawDb = serde_json::from_str(json)?;
        let mut materials = Vec::with_capacity(raw.materials.len());
        for m in raw.materials {
            let thickness = m.substrate_thickness_m;
            let spec = MaterialSpec {
                name: m.name,
                dielectric_constant: lit(m.dielectric_constant),
                loss_tangent: lit(m.loss_tangent),
                substrate_thickness_m: lit(thickness),
                conductor_width_m: lit(m.conductor_width_m.unwrap_or(thickness)),
                conductivity_s_per_m: lit(m.conductivity_s_per_m.unwrap_or(COPPER_CONDUCTIVITY)),
            };
            spec.validate()?;
            materials.push(spec);
        }
        Ok(MaterialDb { materials })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, MaterialError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Appends user materials; later entries shadow earlier ones by name.
    pub fn extend_from(&mut self, other: MaterialDb<T>) {
        for m in other.materials {
            self.materials.retain(|e| e.name != m.name);
            self.materials.push(m);
        }
    }

    pub fn get(&self, name: &str) -> Result<&MaterialSpec<T>, MaterialError> {
        self.materials
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| MaterialError::Unknown(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &MaterialSpec<T>> {
        self.materials.iter()
    }
}
