//! Comparison methods: the fully-digital (FD) architecture, the per-user
//! maximum-ratio-transmission reference, and a particle-swarm search over
//! the element phases with optimal digital precoders per particle.

use nalgebra::{Complex, ComplexField, DVector, Vector3};
use rand::distributions::Uniform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::beamform::{
    solve_precoder_sdp, BeamformError, BeamformingSolution, PrecoderSet, Scenario,
};
use crate::channel::ChannelVector;
use crate::config::GeometryError;
use crate::lorentzian::build_q_matrix;
use crate::scalar::{lit, wrap_angle, Real};
use crate::sdp::{
    extract_rank_factors, solve_sdp, HermitianMatrix, SdpProblem, SdpStatus, Sense, SolveOptions,
};

/// Uniform square array with one RF chain per element.
#[derive(Debug, Clone)]
pub struct FdGeometry<T: Real> {
    pub positions: Vec<Vector3<T>>,
    pub num_elements: usize,
    pub side_elements: usize,
    pub element_spacing_m: T,
}

/// Builds the half-wavelength square grid that fits the aperture length,
/// centered at the transmitter like the DMA plane.
pub fn build_fd_geometry<T: Real>(
    antenna_length_m: T,
    wavelength_m: T,
    tx_height_m: T,
) -> Result<FdGeometry<T>, GeometryError> {
    let spacing = wavelength_m / lit(2.0);
    let side = (antenna_length_m / spacing).floor().to_usize().unwrap_or(0);
    if side < 1 {
        return Err(GeometryError::ZeroArray {
            num_waveguides: side,
            elements_per_waveguide: side,
        });
    }
    let offset = lit::<T>((side as f64 - 1.0) / 2.0);
    let mut positions = Vec::with_capacity(side * side);
    for row in 0..side {
        let y = (lit::<T>(row as f64) - offset) * spacing;
        for col in 0..side {
            let x = (lit::<T>(col as f64) - offset) * spacing;
            positions.push(Vector3::new(x, y, tx_height_m));
        }
    }
    Ok(FdGeometry {
        positions,
        num_elements: side * side,
        side_elements: side,
        element_spacing_m: spacing,
    })
}

/// A fully-digital design: per-element precoders and power bookkeeping.
#[derive(Debug, Clone)]
pub struct FdDesign<T: Real> {
    pub precoders: PrecoderSet<T>,
    pub transmit_power_w: T,
    pub received_powers_w: Vec<T>,
    pub feasible: bool,
}

fn fd_received_power<T: Real>(channel: &ChannelVector<T>, precoders: &PrecoderSet<T>) -> T {
    precoders.precoders.iter().fold(T::zero(), |acc, w| {
        acc + channel.coefficients.dotc(w).modulus_squared()
    })
}

fn orthonormal_basis<T: Real>(vectors: &[&DVector<Complex<T>>]) -> Vec<DVector<Complex<T>>> {
    let scale = vectors.iter().map(|v| v.norm()).fold(T::zero(), |a, b| a.max(b));
    if scale <= T::zero() {
        return Vec::new();
    }
    let drop = scale * lit::<T>(1e-12);
    let mut basis: Vec<DVector<Complex<T>>> = Vec::new();
    for v in vectors {
        let mut r = (*v).clone();
        for b in &basis {
            let coef = b.dotc(&r);
            r -= b * coef;
        }
        let norm = r.norm();
        if norm > drop {
            basis.push(r / Complex::new(norm, T::zero()));
        }
    }
    basis
}

/// Minimum-power fully-digital precoder design: the same trace-minimization
/// SDP as the DMA precoder step with the feed and weight matrices replaced
/// by the identity. Solved on the span of the user channels, which is exact
/// because cost mass orthogonal to every channel helps no constraint.
pub fn solve_fd<T: Real>(
    channels: &[ChannelVector<T>],
    thresholds_w: &[T],
    options: &SolveOptions<T>,
) -> Result<FdDesign<T>, BeamformError> {
    if channels.is_empty() || channels.len() != thresholds_w.len() {
        return Err(BeamformError::DimensionMismatch(
            "one channel and one threshold per user required".into(),
        ));
    }
    let n = channels[0].coefficients.len();
    for (channel, &delta) in channels.iter().zip(thresholds_w) {
        if channel.coefficients.norm_squared() == T::zero() && delta > T::zero() {
            return Err(BeamformError::InfeasibleProblem);
        }
    }

    let vectors: Vec<&DVector<Complex<T>>> = channels.iter().map(|c| &c.coefficients).collect();
    let basis = orthonormal_basis(&vectors);
    let s = basis.len().max(1);

    let mut problem = SdpProblem::new(HermitianMatrix::identity(s));
    for (channel, &delta) in channels.iter().zip(thresholds_w) {
        let reduced = DVector::from_fn(s, |r, _| {
            basis
                .get(r)
                .map(|b| b.dotc(&channel.coefficients))
                .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
        });
        problem = problem.with_constraint(HermitianMatrix::from_rank_one(&reduced), delta, Sense::Ge);
    }

    let solution = solve_sdp(&problem, options);
    match solution.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => return Err(BeamformError::InfeasibleProblem),
        status => return Err(BeamformError::SolverFailure(status)),
    }

    let m = channels.len().min(n);
    let reduced_factors = extract_rank_factors(&solution, m, lit(1e-9));
    let factors: Vec<DVector<Complex<T>>> = reduced_factors
        .into_iter()
        .map(|f| {
            let mut w = DVector::zeros(n);
            for (r, b) in basis.iter().enumerate() {
                w += b * f[r];
            }
            w
        })
        .collect();
    let mut precoders = PrecoderSet::from_vectors(n, m, factors);

    let mut received: Vec<T> = channels.iter().map(|c| fd_received_power(c, &precoders)).collect();
    let mut boost = T::one();
    for (&p, &delta) in received.iter().zip(thresholds_w) {
        if delta > T::zero() {
            if p <= T::zero() {
                return Err(BeamformError::InfeasibleProblem);
            }
            boost = boost.max(delta / p);
        }
    }
    if boost > T::one() {
        precoders.scale(boost.sqrt());
        for p in received.iter_mut() {
            *p *= boost;
        }
    }
    let transmit = precoders
        .precoders
        .iter()
        .fold(T::zero(), |acc, w| acc + w.norm_squared());
    let slack = T::one() - lit::<T>(crate::beamform::FEASIBILITY_SLACK);
    let feasible = received
        .iter()
        .zip(thresholds_w)
        .all(|(&p, &d)| p >= d * slack);
    Ok(FdDesign {
        precoders,
        transmit_power_w: transmit,
        received_powers_w: received,
        feasible,
    })
}

/// Transmit power of dedicated per-user maximum-ratio beams,
/// `sum_k threshold_k / |gamma_k|^2`. Exact for one user or orthogonal
/// channels; for correlated channels the cross-received power makes the true
/// optimum smaller, so this is an upper reference, not a bound from below.
pub fn mrt_bound<T: Real>(channels: &[ChannelVector<T>], thresholds_w: &[T]) -> T {
    channels
        .iter()
        .zip(thresholds_w)
        .fold(T::zero(), |acc, (c, &d)| acc + d / c.coefficients.norm_squared())
}

/// The explicit per-user MRT beams behind [`mrt_bound`], with their power
/// bookkeeping (cross terms included in the received powers).
pub fn mrt_design<T: Real>(channels: &[ChannelVector<T>], thresholds_w: &[T]) -> FdDesign<T> {
    let n = channels.first().map(|c| c.coefficients.len()).unwrap_or(0);
    let vectors: Vec<DVector<Complex<T>>> = channels
        .iter()
        .zip(thresholds_w)
        .map(|(c, &d)| {
            let g2 = c.coefficients.norm_squared();
            if g2 > T::zero() {
                &c.coefficients * Complex::new((d / (g2 * g2)).sqrt(), T::zero())
            } else {
                DVector::zeros(n)
            }
        })
        .collect();
    let precoders = PrecoderSet::from_vectors(n, channels.len(), vectors);
    let received: Vec<T> = channels.iter().map(|c| fd_received_power(c, &precoders)).collect();
    let transmit = precoders
        .precoders
        .iter()
        .fold(T::zero(), |acc, w| acc + w.norm_squared());
    let slack = T::one() - lit::<T>(crate::beamform::FEASIBILITY_SLACK);
    let feasible = received
        .iter()
        .zip(thresholds_w)
        .all(|(&p, &d)| p >= d * slack);
    FdDesign {
        precoders,
        transmit_power_w: transmit,
        received_powers_w: received,
        feasible,
    }
}

/// Swarm parameters. The defaults match the benchmark configuration of
/// 100 particles over 1000 iterations with standard constriction weights.
#[derive(Debug, Clone)]
pub struct PsoOptions<T: Real> {
    pub num_particles: usize,
    pub num_iterations: usize,
    pub inertia: T,
    pub cognitive: T,
    pub social: T,
    pub seed: u64,
    pub solver: SolveOptions<T>,
}

impl<T: Real> Default for PsoOptions<T> {
    fn default() -> Self {
        PsoOptions {
            num_particles: 100,
            num_iterations: 1000,
            inertia: lit(0.729),
            cognitive: lit(1.49445),
            social: lit(1.49445),
            seed: 0,
            solver: SolveOptions::default(),
        }
    }
}

/// Particle-swarm optimization over the element phases. Each particle's
/// fitness is the optimal-precoder transmit power at its phase vector
/// (infeasible designs score infinite). Fitness evaluations run in parallel;
/// the swarm update is a sequential barrier, so a fixed seed replays
/// exactly.
pub fn pso_optimize<T: Real + Send + Sync>(
    scenario: &Scenario<T>,
    options: &PsoOptions<T>,
) -> Result<(BeamformingSolution<T>, Vec<T>), BeamformError> {
    if options.num_particles == 0 || options.num_iterations == 0 {
        return Err(BeamformError::DimensionMismatch(
            "swarm needs at least one particle and one iteration".into(),
        ));
    }
    let n = scenario.geometry.total_elements;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let phase_dist = Uniform::new(T::zero(), T::two_pi());
    let vel_dist = Uniform::new(-T::frac_pi_2(), T::frac_pi_2());

    let fitness_of = |phases: &[T]| -> T {
        let Ok(dma) = build_q_matrix(phases, &scenario.geometry) else {
            return lit(f64::INFINITY);
        };
        match solve_precoder_sdp(
            &scenario.channels,
            &scenario.propagation,
            &dma,
            &scenario.thresholds_w,
            &options.solver,
        ) {
            Ok(design) => design.transmit_power_w,
            Err(_) => lit(f64::INFINITY),
        }
    };

    let mut positions: Vec<Vec<T>> = (0..options.num_particles)
        .map(|_| (0..n).map(|_| rng.sample(&phase_dist)).collect())
        .collect();
    let mut velocities: Vec<Vec<T>> = (0..options.num_particles)
        .map(|_| (0..n).map(|_| rng.sample(&vel_dist)).collect())
        .collect();

    let mut fitness: Vec<T> = positions.par_iter().map(|p| fitness_of(p)).collect();
    let mut personal_best = positions.clone();
    let mut personal_fitness = fitness.clone();
    let mut best_index = 0usize;
    for (i, &f) in personal_fitness.iter().enumerate() {
        if f < personal_fitness[best_index] {
            best_index = i;
        }
    }
    let mut global_best = personal_best[best_index].clone();
    let mut global_fitness = personal_fitness[best_index];
    let mut history = vec![global_fitness];

    let unit = Uniform::new(T::zero(), T::one());
    let vel_cap = T::pi();
    for _ in 1..options.num_iterations {
        for i in 0..options.num_particles {
            for d in 0..n {
                let r1 = rng.sample(&unit);
                let r2 = rng.sample(&unit);
                let v = options.inertia * velocities[i][d]
                    + options.cognitive * r1 * (personal_best[i][d] - positions[i][d])
                    + options.social * r2 * (global_best[d] - positions[i][d]);
                let v = v.clamp(-vel_cap, vel_cap);
                velocities[i][d] = v;
                positions[i][d] += v;
            }
        }
        fitness = positions.par_iter().map(|p| fitness_of(p)).collect();
        for i in 0..options.num_particles {
            if fitness[i] < personal_fitness[i] {
                personal_fitness[i] = fitness[i];
                personal_best[i] = positions[i].clone();
            }
            if fitness[i] < global_fitness {
                global_fitness = fitness[i];
                global_best = positions[i].clone();
            }
        }
        history.push(global_fitness);
    }

    // rebuild the full design at the best phases found
    let wrapped: Vec<T> = global_best.iter().map(|&p| wrap_angle(p)).collect();
    let dma = build_q_matrix(&wrapped, &scenario.geometry)
        .map_err(|e| BeamformError::DimensionMismatch(e.to_string()))?;
    let solution = match solve_precoder_sdp(
        &scenario.channels,
        &scenario.propagation,
        &dma,
        &scenario.thresholds_w,
        &options.solver,
    ) {
        Ok(design) => {
            let received: Vec<T> = scenario
                .channels
                .iter()
                .map(|c| crate::beamform::received_power(c, &scenario.propagation, &dma, &design.precoders))
                .collect::<Result<_, _>>()?;
            let slack = T::one() - lit::<T>(crate::beamform::FEASIBILITY_SLACK);
            let feasible = received
                .iter()
                .zip(&scenario.thresholds_w)
                .all(|(&p, &d)| p >= d * slack);
            BeamformingSolution {
                precoders: design.precoders,
                dma,
                transmit_power_w: design.transmit_power_w,
                received_powers_w: received,
                feasible,
                iterations_used: options.num_iterations,
            }
        }
        Err(_) => BeamformingSolution {
            precoders: PrecoderSet::from_vectors(
                scenario.geometry.num_waveguides,
                scenario.channels.len().min(scenario.geometry.num_waveguides),
                Vec::new(),
            ),
            dma,
            transmit_power_w: lit(f64::INFINITY),
            received_powers_w: vec![T::zero(); scenario.channels.len()],
            feasible: false,
            iterations_used: options.num_iterations,
        },
    };
    Ok((solution, history))
}
