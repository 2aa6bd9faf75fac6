//! Minimum-power energy beamforming for the DMA transmitter.
//!
//! The joint design over digital precoders and Lorentzian element weights is
//! non-convex, so it is split into two semidefinite programs solved in
//! alternation: with the weights fixed, the optimal precoder Gram matrix
//! comes from a trace-minimization SDP; with the precoders fixed, a relaxed
//! max-min SDP proposes unconstrained weights that are then mapped back to
//! the Lorentzian circle. The loop keeps the best transmit power seen and
//! stops after a stall limit or an iteration cap.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};
use rand::distributions::Uniform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::channel::ChannelVector;
use crate::config::ArrayGeometry;
use crate::lorentzian::{build_q_matrix, project_to_lorentzian, DmaConfiguration};
use crate::microstrip::PropagationMatrix;
use crate::scalar::{lit, Real};
use crate::sdp::{
    factor_psd_matrix, hermitian_eigen_sorted, solve_sdp, trace_inner, HermitianMatrix,
    SdpProblem, SdpStatus, Sense, SolveOptions,
};

/// Relative slack tolerated when declaring a solution threshold-feasible.
pub const FEASIBILITY_SLACK: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum BeamformError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("power requirements cannot be met in this configuration")]
    InfeasibleProblem,
    #[error("SDP solver stopped with status {0:?}")]
    SolverFailure(SdpStatus),
}

/// Digital precoders and their Gram matrix `W = sum_m w_m w_m^H`.
#[derive(Debug, Clone)]
pub struct PrecoderSet<T: Real> {
    /// Number of energy streams `M = min(N_v, K)`.
    pub num_streams: usize,
    /// Exactly `num_streams` vectors of length `N_v`; zero-padded when the
    /// solved Gram matrix has lower rank.
    pub precoders: Vec<DVector<Complex<T>>>,
    pub gram: HermitianMatrix<T>,
}

impl<T: Real> PrecoderSet<T> {
    /// Builds from extracted factors, padding with zero vectors up to `m`.
    pub fn from_vectors(dimension: usize, m: usize, mut vectors: Vec<DVector<Complex<T>>>) -> Self {
        vectors.truncate(m);
        while vectors.len() < m {
            vectors.push(DVector::zeros(dimension));
        }
        let mut gram = DMatrix::zeros(dimension, dimension);
        for w in &vectors {
            gram += w * w.adjoint();
        }
        PrecoderSet {
            num_streams: m,
            precoders: vectors,
            gram: HermitianMatrix::new(gram),
        }
    }

    pub fn scale(&mut self, factor: T) {
        let f = Complex::new(factor, T::zero());
        for w in &mut self.precoders {
            *w *= f;
        }
        let dim = self.gram.dimension();
        let mut gram = DMatrix::zeros(dim, dim);
        for w in &self.precoders {
            gram += w * w.adjoint();
        }
        self.gram = HermitianMatrix::new(gram);
    }
}

/// A complete beamforming design with its recomputed power bookkeeping.
#[derive(Debug, Clone)]
pub struct BeamformingSolution<T: Real> {
    pub precoders: PrecoderSet<T>,
    pub dma: DmaConfiguration<T>,
    pub transmit_power_w: T,
    pub received_powers_w: Vec<T>,
    pub feasible: bool,
    pub iterations_used: usize,
}

/// Immutable problem data for one optimization run.
#[derive(Debug, Clone)]
pub struct Scenario<T: Real> {
    pub geometry: ArrayGeometry<T>,
    pub propagation: PropagationMatrix<T>,
    pub channels: Vec<ChannelVector<T>>,
    pub thresholds_w: Vec<T>,
}

impl<T: Real> Scenario<T> {
    fn check(&self) -> Result<(), BeamformError> {
        let n = self.geometry.total_elements;
        if self.propagation.len() != n {
            return Err(BeamformError::DimensionMismatch(
                "propagation matrix does not match the array size".into(),
            ));
        }
        if self.channels.is_empty() || self.channels.len() != self.thresholds_w.len() {
            return Err(BeamformError::DimensionMismatch(
                "one channel and one threshold per user required".into(),
            ));
        }
        if self.channels.iter().any(|c| c.coefficients.len() != n) {
            return Err(BeamformError::DimensionMismatch(
                "channel vector does not match the array size".into(),
            ));
        }
        Ok(())
    }
}

/// Knobs of the alternating loop.
#[derive(Debug, Clone)]
pub struct AlgorithmOptions<T: Real> {
    /// Consecutive non-improving iterations tolerated before stopping.
    pub stall_limit: usize,
    /// Hard cap on outer iterations.
    pub max_iterations: usize,
    pub seed: u64,
    /// Fresh random initializations tried when the first precoder solve
    /// fails.
    pub init_retries: usize,
    pub solver: SolveOptions<T>,
}

impl<T: Real> Default for AlgorithmOptions<T> {
    fn default() -> Self {
        AlgorithmOptions {
            stall_limit: 5,
            max_iterations: 50,
            seed: 0,
            init_retries: 5,
            solver: SolveOptions::default(),
        }
    }
}

/// One outer-iteration record for convergence inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord<T: Real> {
    pub iteration: usize,
    /// Transmit power of this iteration's candidate (infinite when the
    /// candidate solve failed).
    pub transmit_power_w: T,
    /// Smallest margin `P_rx - threshold` over the users.
    pub min_slack_w: T,
    pub accepted: bool,
    /// Uniform power boost applied to repair rank-truncated precoders.
    pub power_boost: T,
}

/// Output of one fixed-weight precoder design.
#[derive(Debug, Clone)]
pub struct PrecoderDesign<T: Real> {
    pub precoders: PrecoderSet<T>,
    pub transmit_power_w: T,
    pub received_powers_w: Vec<T>,
    /// Uniform power factor applied after rank truncation (1 when the
    /// truncated factors already met every threshold).
    pub power_boost: T,
}

// ---------------------------------------------------------------------------
// power bookkeeping
// ---------------------------------------------------------------------------

/// Entries of the row vector `gamma^H H`, i.e. `conj(gamma_e) h_e`.
pub fn effective_channel<T: Real>(
    channel: &ChannelVector<T>,
    propagation: &PropagationMatrix<T>,
) -> DVector<Complex<T>> {
    DVector::from_fn(channel.coefficients.len(), |e, _| {
        channel.coefficients[e].conj() * propagation.diagonal[e]
    })
}

/// Effective channel strength `|gamma^H H|^2`, the average-gain metric for
/// the DMA architecture.
pub fn effective_gain<T: Real>(
    channel: &ChannelVector<T>,
    propagation: &PropagationMatrix<T>,
) -> T {
    effective_channel(channel, propagation)
        .iter()
        .fold(T::zero(), |acc, c| acc + c.modulus_squared())
}

/// `H Q`: each row of `Q` scaled by the matching propagation coefficient.
fn propagated_weights<T: Real>(
    propagation: &PropagationMatrix<T>,
    dma: &DmaConfiguration<T>,
) -> DMatrix<Complex<T>> {
    let mut hq = dma.q_matrix.clone();
    for e in 0..hq.nrows() {
        let h = propagation.diagonal[e];
        for n in 0..hq.ncols() {
            hq[(e, n)] *= h;
        }
    }
    hq
}

/// Precoder-space cost matrix `F = (H Q)^H (H Q)`.
pub fn precoder_cost_matrix<T: Real>(
    propagation: &PropagationMatrix<T>,
    dma: &DmaConfiguration<T>,
) -> HermitianMatrix<T> {
    let hq = propagated_weights(propagation, dma);
    HermitianMatrix::new(hq.adjoint() * &hq)
}

/// Per-user constraint vector `b_k = (gamma_k^H H Q)^H`.
pub fn user_constraint_vector<T: Real>(
    channel: &ChannelVector<T>,
    propagation: &PropagationMatrix<T>,
    dma: &DmaConfiguration<T>,
) -> DVector<Complex<T>> {
    let eff = effective_channel(channel, propagation);
    (dma.q_matrix.transpose() * eff).map(|c| c.conj())
}

/// Total radiated power `sum_m |H Q w_m|^2`.
pub fn transmit_power<T: Real>(
    precoders: &PrecoderSet<T>,
    propagation: &PropagationMatrix<T>,
    dma: &DmaConfiguration<T>,
) -> Result<T, BeamformError> {
    if dma.q_matrix.nrows() != propagation.len() {
        return Err(BeamformError::DimensionMismatch(
            "weight matrix does not match the propagation matrix".into(),
        ));
    }
    let hq = propagated_weights(propagation, dma);
    let mut total = T::zero();
    for w in &precoders.precoders {
        if w.len() != hq.ncols() {
            return Err(BeamformError::DimensionMismatch(
                "precoder length does not match the waveguide count".into(),
            ));
        }
        total += (&hq * w).norm_squared();
    }
    Ok(total)
}

/// Transmit power through the Gram-matrix identity `Tr(W F)`.
pub fn transmit_power_gram<T: Real>(
    precoders: &PrecoderSet<T>,
    propagation: &PropagationMatrix<T>,
    dma: &DmaConfiguration<T>,
) -> T {
    precoder_cost_matrix(propagation, dma).trace_inner(&precoders.gram)
}

/// RF power received by one user, `sum_m |gamma^H H Q w_m|^2`.
pub fn received_power<T: Real>(
    channel: &ChannelVector<T>,
    propagation: &PropagationMatrix<T>,
    dma: &DmaConfiguration<T>,
    precoders: &PrecoderSet<T>,
) -> Result<T, BeamformError> {
    if channel.coefficients.len() != propagation.len() {
        return Err(BeamformError::DimensionMismatch(
            "channel vector does not match the propagation matrix".into(),
        ));
    }
    let eff = effective_channel(channel, propagation);
    let row = dma.q_matrix.transpose() * eff;
    let mut total = T::zero();
    for w in &precoders.precoders {
        if w.len() != row.len() {
            return Err(BeamformError::DimensionMismatch(
                "precoder length does not match the waveguide count".into(),
            ));
        }
        let amp = row.iter().zip(w.iter()).fold(Complex::new(T::zero(), T::zero()), |acc, (r, w)| acc + r * w);
        total += amp.modulus_squared();
    }
    Ok(total)
}

/// Received power through the Gram identity `Tr(W B_k)`.
pub fn received_power_gram<T: Real>(
    channel: &ChannelVector<T>,
    propagation: &PropagationMatrix<T>,
    dma: &DmaConfiguration<T>,
    precoders: &PrecoderSet<T>,
) -> T {
    let b = user_constraint_vector(channel, propagation, dma);
    HermitianMatrix::from_rank_one(&b).trace_inner(&precoders.gram)
}

/// Per-stream weight-space profile vector: the Kronecker-product row
/// restricted to the structurally nonzero weight entries,
/// `z_hat[e] = conj(w[i(e)] * (gamma^H H)[e])`.
pub fn weight_profile_vector<T: Real>(
    effective: &DVector<Complex<T>>,
    precoder: &DVector<Complex<T>>,
    geometry: &ArrayGeometry<T>,
) -> DVector<Complex<T>> {
    DVector::from_fn(geometry.total_elements, |e, _| {
        let i = e / geometry.elements_per_waveguide;
        (precoder[i] * effective[e]).conj()
    })
}

/// Weight-space quadratic form `Z_k = sum_m z_hat_mk z_hat_mk^H`.
pub fn weight_quadratic_form<T: Real>(
    channel: &ChannelVector<T>,
    propagation: &PropagationMatrix<T>,
    precoders: &PrecoderSet<T>,
    geometry: &ArrayGeometry<T>,
) -> HermitianMatrix<T> {
    let eff = effective_channel(channel, propagation);
    let n = geometry.total_elements;
    let mut z = DMatrix::zeros(n, n);
    for w in &precoders.precoders {
        let zv = weight_profile_vector(&eff, w, geometry);
        z += &zv * zv.adjoint();
    }
    HermitianMatrix::new(z)
}

/// Received power through the vectorized-weight identity `Tr(Z_k Q_tilde)`
/// with `Q_tilde = q_hat q_hat^H`.
pub fn received_power_vectorized<T: Real>(
    channel: &ChannelVector<T>,
    propagation: &PropagationMatrix<T>,
    dma: &DmaConfiguration<T>,
    precoders: &PrecoderSet<T>,
    geometry: &ArrayGeometry<T>,
) -> T {
    let z = weight_quadratic_form(channel, propagation, precoders, geometry);
    let q_hat = DVector::from_vec(dma.weights.clone());
    let q_tilde = HermitianMatrix::from_rank_one(&q_hat);
    trace_inner(z.entries(), q_tilde.entries())
}

// ---------------------------------------------------------------------------
// SDP subproblems
// ---------------------------------------------------------------------------

/// Minimum-power precoder design at fixed weights: minimizes `Tr(W F)`
/// subject to `Tr(W B_k) >= threshold_k` over PSD `W`, then factors `W` into
/// at most `min(N_v, K)` precoders. When truncation to that many factors
/// breaks a threshold, all precoders are boosted by the smallest common
/// factor that restores feasibility.
///
/// The SDP is solved in column-equilibrated coordinates: weakly excited
/// waveguides make `F = (HQ)^H HQ` badly scaled, so each waveguide's
/// precoder entry is substituted by its feed-column norm times itself. The
/// substitution is invertible and changes nothing about the optimum.
pub fn solve_precoder_sdp<T: Real>(
    channels: &[ChannelVector<T>],
    propagation: &PropagationMatrix<T>,
    dma: &DmaConfiguration<T>,
    thresholds_w: &[T],
    options: &SolveOptions<T>,
) -> Result<PrecoderDesign<T>, BeamformError> {
    if channels.is_empty() || channels.len() != thresholds_w.len() {
        return Err(BeamformError::DimensionMismatch(
            "one channel and one threshold per user required".into(),
        ));
    }
    let num_waveguides = dma.q_matrix.ncols();
    let mut hq = propagated_weights(propagation, dma);
    let mut column_scales: Vec<T> = (0..num_waveguides).map(|i| hq.column(i).norm()).collect();
    let scale_max = column_scales.iter().fold(T::zero(), |a, &b| a.max(b));
    let scale_floor = if scale_max > T::zero() {
        scale_max * lit::<T>(1e-12)
    } else {
        T::one()
    };
    for (i, s) in column_scales.iter_mut().enumerate() {
        *s = s.max(scale_floor);
        let inv = Complex::new(T::one() / *s, T::zero());
        for e in 0..hq.nrows() {
            hq[(e, i)] *= inv;
        }
    }
    let cost = HermitianMatrix::new(hq.adjoint() * &hq);

    let mut problem = SdpProblem::new(cost);
    for (channel, &delta) in channels.iter().zip(thresholds_w) {
        // b = (gamma^H H Q D^{-1})^H, with H Q D^{-1} already materialized
        let b = DVector::from_fn(num_waveguides, |i, _| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for e in 0..hq.nrows() {
                acc += channel.coefficients[e].conj() * hq[(e, i)];
            }
            acc.conj()
        });
        if b.norm_squared() == T::zero() && delta > T::zero() {
            return Err(BeamformError::InfeasibleProblem);
        }
        problem = problem.with_constraint(HermitianMatrix::from_rank_one(&b), delta, Sense::Ge);
    }

    let solution = solve_sdp(&problem, options);
    match solution.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => return Err(BeamformError::InfeasibleProblem),
        status => return Err(BeamformError::SolverFailure(status)),
    }

    // undo the equilibration on the Gram matrix, then factor
    let scaled_gram = solution.matrix.entries();
    let gram = DMatrix::from_fn(num_waveguides, num_waveguides, |i, j| {
        scaled_gram[(i, j)] / Complex::new(column_scales[i] * column_scales[j], T::zero())
    });
    let m = num_waveguides.min(channels.len());
    let factors = factor_psd_matrix(&gram, m, lit(1e-9));
    let mut precoders = PrecoderSet::from_vectors(num_waveguides, m, factors);

    let mut received: Vec<T> = channels
        .iter()
        .map(|c| received_power(c, propagation, dma, &precoders))
        .collect::<Result<_, _>>()?;
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
    let transmit = transmit_power(&precoders, propagation, dma)?;
    Ok(PrecoderDesign {
        precoders,
        transmit_power_w: transmit,
        received_powers_w: received,
        power_boost: boost,
    })
}

/// Orthonormal basis of the span of the given vectors (modified
/// Gram-Schmidt with a relative drop tolerance). Deterministic in the input
/// order.
fn orthonormal_basis<T: Real>(vectors: &[DVector<Complex<T>>]) -> Vec<DVector<Complex<T>>> {
    let scale = vectors
        .iter()
        .map(|v| v.norm())
        .fold(T::zero(), |a, b| a.max(b));
    if scale <= T::zero() {
        return Vec::new();
    }
    let drop = scale * lit::<T>(1e-12);
    let mut basis: Vec<DVector<Complex<T>>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
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

/// Relaxed max-min weight design at fixed precoders. The epigraph SDP
/// `max t s.t. t <= Tr(Z_k Q_tilde), Tr(Q_tilde) <= N, Q_tilde psd` is
/// solved on the span of the profile vectors (mass outside that span can
/// help no user, so the restriction is exact), and the dominant eigenvector
/// of the solved matrix, scaled by the root of its eigenvalue, is returned
/// as the unconstrained weight proposal.
pub fn solve_weight_sdp<T: Real>(
    channels: &[ChannelVector<T>],
    propagation: &PropagationMatrix<T>,
    precoders: &PrecoderSet<T>,
    geometry: &ArrayGeometry<T>,
    options: &SolveOptions<T>,
) -> Result<DVector<Complex<T>>, BeamformError> {
    let n = geometry.total_elements;
    if precoders.precoders.iter().all(|w| w.norm_squared() == T::zero()) {
        return Err(BeamformError::DimensionMismatch("all precoders are zero".into()));
    }

    let mut profiles: Vec<Vec<DVector<Complex<T>>>> = Vec::with_capacity(channels.len());
    let mut flat: Vec<DVector<Complex<T>>> = Vec::new();
    for channel in channels {
        let eff = effective_channel(channel, propagation);
        let per_user: Vec<_> = precoders
            .precoders
            .iter()
            .map(|w| weight_profile_vector(&eff, w, geometry))
            .collect();
        flat.extend(per_user.iter().cloned());
        profiles.push(per_user);
    }

    let basis = orthonormal_basis(&flat);
    if basis.is_empty() {
        // every profile vanished: any feasible weight matrix scores zero,
        // so fall back to the dominant direction of the scaled identity
        let mut q = DVector::zeros(n);
        q[0] = Complex::new(T::one(), T::zero());
        return Ok(q);
    }
    let s = basis.len();

    // reduced quadratic forms and the epigraph variable in the last slot
    let dim = s + 1;
    let mut cost = DMatrix::zeros(dim, dim);
    cost[(s, s)] = Complex::new(-T::one(), T::zero());
    let mut problem = SdpProblem::new(HermitianMatrix::new(cost));
    let mut forms: Vec<DMatrix<Complex<T>>> = Vec::with_capacity(profiles.len());
    let mut z_scale = T::zero();
    for per_user in &profiles {
        let mut zk = DMatrix::zeros(s, s);
        for z in per_user {
            let reduced = DVector::from_fn(s, |r, _| basis[r].dotc(z));
            zk += &reduced * reduced.adjoint();
        }
        z_scale = z_scale.max(zk.norm());
        forms.push(zk);
    }
    // a common scale on the quadratic forms only rescales the epigraph
    // variable, not the optimal weight matrix, and balances the rows
    let z_scale = Complex::new(T::one() / z_scale.max(lit(1e-300)), T::zero());
    for form in forms {
        let mut zk = DMatrix::zeros(dim, dim);
        for a in 0..s {
            for b in 0..s {
                zk[(a, b)] = form[(a, b)] * z_scale;
            }
        }
        zk[(s, s)] = Complex::new(-T::one(), T::zero());
        problem = problem.with_constraint(HermitianMatrix::new(zk), T::zero(), Sense::Ge);
    }
    let mut cap = DMatrix::zeros(dim, dim);
    for a in 0..s {
        cap[(a, a)] = Complex::new(T::one(), T::zero());
    }
    problem = problem.with_constraint(
        HermitianMatrix::new(cap),
        lit::<T>(n as f64),
        Sense::Le,
    );

    let solution = solve_sdp(&problem, options);
    match solution.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => return Err(BeamformError::InfeasibleProblem),
        status => return Err(BeamformError::SolverFailure(status)),
    }

    let reduced_q = solution.matrix.entries().view((0, 0), (s, s)).into_owned();
    let (values, vectors) = hermitian_eigen_sorted(&reduced_q);
    let lead = values[0].max(T::zero());
    let dominant = &vectors[0] * Complex::new(lead.sqrt(), T::zero());
    let mut q = DVector::zeros(n);
    for (r, b) in basis.iter().enumerate() {
        // lift the reduced coordinates back to element space
        q += b * dominant[r];
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// the alternating loop
// ---------------------------------------------------------------------------

fn random_phases<T: Real>(n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    let dist = Uniform::new(T::zero(), T::two_pi());
    (0..n).map(|_| rng.sample(&dist)).collect()
}

fn assemble_solution<T: Real>(
    scenario: &Scenario<T>,
    design: &PrecoderDesign<T>,
    dma: DmaConfiguration<T>,
    iterations_used: usize,
) -> Result<BeamformingSolution<T>, BeamformError> {
    // recompute the received powers from scratch for the feasibility flag
    let received: Vec<T> = scenario
        .channels
        .iter()
        .map(|c| received_power(c, &scenario.propagation, &dma, &design.precoders))
        .collect::<Result<_, _>>()?;
    let slack = T::one() - lit::<T>(FEASIBILITY_SLACK);
    let feasible = received
        .iter()
        .zip(&scenario.thresholds_w)
        .all(|(&p, &d)| p >= d * slack);
    let transmit = transmit_power(&design.precoders, &scenario.propagation, &dma)?;
    Ok(BeamformingSolution {
        precoders: design.precoders.clone(),
        dma,
        transmit_power_w: transmit,
        received_powers_w: received,
        feasible,
        iterations_used,
    })
}

fn min_slack<T: Real>(received: &[T], thresholds: &[T]) -> T {
    received
        .iter()
        .zip(thresholds)
        .map(|(&p, &d)| p - d)
        .fold(lit::<T>(f64::INFINITY), |a, b| a.min(b))
}

/// Alternating weight/precoder optimization. Starts from random Lorentzian
/// phases, then repeats {weight relaxation, Lorentzian mapping, precoder
/// design}, keeping the best transmit power; stops after `stall_limit`
/// non-improving iterations or `max_iterations` outer passes. Deterministic
/// for a fixed seed.
pub fn alternating_optimize<T: Real>(
    scenario: &Scenario<T>,
    options: &AlgorithmOptions<T>,
) -> Result<(BeamformingSolution<T>, Vec<TraceRecord<T>>), BeamformError> {
    scenario.check()?;
    let n = scenario.geometry.total_elements;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    // initialization: random phases, retried on failure
    let mut init = None;
    for _ in 0..=options.init_retries {
        let phases = random_phases::<T>(n, &mut rng);
        let dma = build_q_matrix(&phases, &scenario.geometry)
            .map_err(|e| BeamformError::DimensionMismatch(e.to_string()))?;
        match solve_precoder_sdp(
            &scenario.channels,
            &scenario.propagation,
            &dma,
            &scenario.thresholds_w,
            &options.solver,
        ) {
            Ok(design) => {
                init = Some((design, dma));
                break;
            }
            Err(BeamformError::InfeasibleProblem) | Err(BeamformError::SolverFailure(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let Some((mut best_design, mut best_dma)) = init else {
        return Err(BeamformError::InfeasibleProblem);
    };

    let mut trace = vec![TraceRecord {
        iteration: 0,
        transmit_power_w: best_design.transmit_power_w,
        min_slack_w: min_slack(&best_design.received_powers_w, &scenario.thresholds_w),
        accepted: true,
        power_boost: best_design.power_boost,
    }];

    let mut current = best_design.clone();
    let mut stall = 0usize;
    let mut iteration = 1usize;
    while stall < options.stall_limit && iteration < options.max_iterations {
        let step = solve_weight_sdp(
            &scenario.channels,
            &scenario.propagation,
            &current.precoders,
            &scenario.geometry,
            &options.solver,
        )
        .and_then(|proposal| {
            let (phases, _) = project_to_lorentzian(proposal.as_slice());
            let dma = build_q_matrix(&phases, &scenario.geometry)
                .map_err(|e| BeamformError::DimensionMismatch(e.to_string()))?;
            let design = solve_precoder_sdp(
                &scenario.channels,
                &scenario.propagation,
                &dma,
                &scenario.thresholds_w,
                &options.solver,
            )?;
            Ok((design, dma))
        });

        iteration += 1;
        stall += 1;
        match step {
            Ok((design, dma)) => {
                let accepted = design.transmit_power_w < best_design.transmit_power_w;
                trace.push(TraceRecord {
                    iteration: iteration - 1,
                    transmit_power_w: design.transmit_power_w,
                    min_slack_w: min_slack(&design.received_powers_w, &scenario.thresholds_w),
                    accepted,
                    power_boost: design.power_boost,
                });
                current = design.clone();
                if accepted {
                    best_design = design;
                    best_dma = dma;
                    stall = 0;
                }
            }
            Err(BeamformError::InfeasibleProblem) | Err(BeamformError::SolverFailure(_)) => {
                trace.push(TraceRecord {
                    iteration: iteration - 1,
                    transmit_power_w: lit::<T>(f64::INFINITY),
                    min_slack_w: T::zero(),
                    accepted: false,
                    power_boost: T::one(),
                });
            }
            Err(e) => return Err(e),
        }
    }

    let solution = assemble_solution(scenario, &best_design, best_dma, iteration)?;
    Ok((solution, trace))
}
