//! Experiment orchestration: configuration files, sweeps over random user
//! realizations, method comparison, aggregation, CSV/SVG/manifest output.
//!
//! Every (sweep point, realization) cell builds one scene (user draws,
//! channels, feed model) that all requested methods consume; per-realization
//! scenes are drawn independently of the sweep point so sweep comparisons
//! are paired. Cells run on a worker pool and results are sorted into a
//! canonical order, so `records.csv` is byte-reproducible for a fixed
//! configuration.

pub mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::baselines::{build_fd_geometry, mrt_design, pso_optimize, solve_fd, PsoOptions};
use crate::beamform::{
    alternating_optimize, effective_gain, AlgorithmOptions, Scenario,
};
use crate::channel::{channel_vector, channel_vector_for_positions, ChannelVector};
use crate::config::{
    build_array_geometry, derive_seed, field_region_bounds, near_field_violations,
    sample_user_positions, SystemConfig,
};
use crate::microstrip::{attenuation_and_beta, propagation_matrix, MaterialDb};
use crate::sdp::SolveOptions;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Material(#[from] crate::microstrip::MaterialError),
    #[error(transparent)]
    Geometry(#[from] crate::config::GeometryError),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Which quantity the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Frequency,
    AntennaLength,
    #[default]
    None,
}

/// Optimization methods the harness can run on a scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "EB_ASD")]
    EbAsd,
    #[serde(rename = "PSO")]
    Pso,
    #[serde(rename = "FD")]
    Fd,
    #[serde(rename = "MRT_BOUND")]
    MrtBound,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::EbAsd => "EB_ASD",
            Method::Pso => "PSO",
            Method::Fd => "FD",
            Method::MrtBound => "MRT_BOUND",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-6,
            max_iters: 50_000,
        }
    }
}

impl SolverConfig {
    pub fn to_options(&self) -> SolveOptions<f64> {
        SolveOptions::with_tol(self.tol, self.max_iters)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgorithmConfig {
    /// Stall counter: consecutive non-improving outer iterations tolerated.
    pub stall_limit: usize,
    /// Outer iteration cap.
    pub max_iterations: usize,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        AlgorithmConfig {
            stall_limit: 5,
            max_iterations: 50,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub num_particles: usize,
    pub num_iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            num_particles: 100,
            num_iterations: 1000,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
        }
    }
}

/// Full experiment description, loadable from a JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub base: SystemConfig<f64>,
    #[serde(default)]
    pub sweep_variable: SweepVariable,
    #[serde(default)]
    pub sweep_values: Vec<f64>,
    pub methods: Vec<Method>,
    #[serde(default = "default_material")]
    pub material_name: String,
    #[serde(default)]
    pub solver_options: SolverConfig,
    #[serde(default)]
    pub algorithm_options: AlgorithmConfig,
    #[serde(default)]
    pub pso_options: PsoConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_material() -> String {
    "DuPont Pyralux AP-9161".to_string()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self, db: &MaterialDb<f64>) -> Result<(), HarnessError> {
        self.base
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.methods.is_empty() {
            return Err(HarnessError::Config("methods must be nonempty".into()));
        }
        if self.sweep_variable != SweepVariable::None && self.sweep_values.is_empty() {
            return Err(HarnessError::Config(
                "sweep_values must be nonempty when a sweep variable is set".into(),
            ));
        }
        if self.sweep_values.iter().any(|&v| v <= 0.0) {
            return Err(HarnessError::Config("sweep values must be positive".into()));
        }
        db.get(&self.material_name)?;
        // every sweep point must produce a buildable array
        for point in self.sweep_points() {
            build_array_geometry(&point)?;
        }
        Ok(())
    }

    /// The per-sweep-point system configurations (the base itself when no
    /// sweep variable is set).
    pub fn sweep_points(&self) -> Vec<SystemConfig<f64>> {
        match self.sweep_variable {
            SweepVariable::None => vec![self.base.clone()],
            SweepVariable::Frequency => self
                .sweep_values
                .iter()
                .map(|&f| {
                    let mut cfg = self.base.clone();
                    cfg.frequency_hz = f;
                    cfg
                })
                .collect(),
            SweepVariable::AntennaLength => self
                .sweep_values
                .iter()
                .map(|&l| {
                    let mut cfg = self.base.clone();
                    cfg.antenna_length_m = l;
                    cfg
                })
                .collect(),
        }
    }
}

/// One result row: method x sweep point x realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub frequency_hz: f64,
    pub antenna_length_m: f64,
    pub num_users: usize,
    pub realization_index: usize,
    pub transmit_power_w: f64,
    pub min_received_power_w: f64,
    pub feasible: bool,
    /// Mean effective channel strength over the users: `|gamma|^2` for the
    /// fully digital array, `|gamma^H H|^2` for the DMA.
    pub avg_gain: f64,
    pub num_elements: usize,
    pub outer_iterations: usize,
    pub status: String,
    pub scene_checksum: String,
}

/// Wall-clock timing of one record, kept out of `records.csv` so reruns
/// byte-reproduce it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunTiming {
    pub method: Method,
    pub frequency_hz: f64,
    pub antenna_length_m: f64,
    pub realization_index: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    pub timings: Vec<RunTiming>,
    /// Users that fell outside the radiating near field, per cell.
    pub near_field_violations: usize,
}

/// One fully built scene shared by every method of a cell.
pub struct SceneData {
    pub scenario: Scenario<f64>,
    pub fd_channels: Vec<ChannelVector<f64>>,
    pub fd_elements: usize,
    pub users: Vec<Vector3<f64>>,
    pub checksum: String,
    pub near_field_violations: usize,
}

/// Builds the scene of one (sweep point, realization) cell: user draw, DMA
/// geometry/feed/channels and the fully-digital channels. The draw depends
/// on the base seed and realization only, never on the sweep point, so
/// sweep comparisons see paired scenes.
pub fn build_scene(
    point: &SystemConfig<f64>,
    realization: usize,
    db: &MaterialDb<f64>,
    material_name: &str,
) -> Result<SceneData, HarnessError> {
    let geometry = build_array_geometry(point)?;
    let material = db.get(material_name)?;
    let model = attenuation_and_beta(material, point.frequency_hz);
    let propagation = propagation_matrix(&model, &geometry);
    let lambda = point.wavelength();
    let users = sample_user_positions(point, realization);

    let mut channels = Vec::with_capacity(users.len());
    for (k, user) in users.iter().enumerate() {
        let mut c = channel_vector(&geometry, user, lambda, point.boresight_gain)?;
        c.user_index = k;
        channels.push(c);
    }

    let fd_geometry = build_fd_geometry(point.antenna_length_m, lambda, point.tx_height_m)?;
    let mut fd_channels = Vec::with_capacity(users.len());
    for (k, user) in users.iter().enumerate() {
        let coefficients =
            channel_vector_for_positions(&fd_geometry.positions, user, lambda, point.boresight_gain)?;
        fd_channels.push(ChannelVector {
            user_index: k,
            coefficients,
            user_position: *user,
        });
    }

    let region = field_region_bounds(&geometry, lambda);
    let violations = near_field_violations(&geometry, &region, &users);
    if !violations.is_empty() {
        log::warn!(
            "realization {realization}: {} of {} users outside the radiating near field ({:.3} m .. {:.3} m)",
            violations.len(),
            users.len(),
            region.fresnel_m,
            region.fraunhofer_m
        );
    }

    let mut hasher = Sha256::new();
    for u in &users {
        for v in [u.x, u.y, u.z] {
            hasher.update(v.to_le_bytes());
        }
    }
    for c in channels.iter().chain(fd_channels.iter()) {
        for z in c.coefficients.iter() {
            hasher.update(z.re.to_le_bytes());
            hasher.update(z.im.to_le_bytes());
        }
    }
    let checksum = hasher
        .finalize()
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect::<String>();

    Ok(SceneData {
        scenario: Scenario {
            geometry,
            propagation,
            channels,
            thresholds_w: point.rf_thresholds_w.clone(),
        },
        fd_channels,
        fd_elements: fd_geometry.num_elements,
        users,
        checksum,
        near_field_violations: violations.len(),
    })
}

fn dma_avg_gain(scene: &SceneData) -> f64 {
    let k = scene.scenario.channels.len() as f64;
    scene
        .scenario
        .channels
        .iter()
        .map(|c| effective_gain(c, &scene.scenario.propagation))
        .sum::<f64>()
        / k
}

fn fd_avg_gain(scene: &SceneData) -> f64 {
    let k = scene.fd_channels.len() as f64;
    scene
        .fd_channels
        .iter()
        .map(|c| c.coefficients.norm_squared())
        .sum::<f64>()
        / k
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn run_method(
    method: Method,
    config: &ExperimentConfig,
    point: &SystemConfig<f64>,
    scene: &SceneData,
    sweep_index: usize,
    realization: usize,
) -> RunRecord {
    let solver = config.solver_options.to_options();
    let mut record = RunRecord {
        method,
        frequency_hz: point.frequency_hz,
        antenna_length_m: point.antenna_length_m,
        num_users: point.num_users,
        realization_index: realization,
        transmit_power_w: f64::NAN,
        min_received_power_w: f64::NAN,
        feasible: false,
        avg_gain: match method {
            Method::EbAsd | Method::Pso => dma_avg_gain(scene),
            Method::Fd | Method::MrtBound => fd_avg_gain(scene),
        },
        num_elements: match method {
            Method::EbAsd | Method::Pso => scene.scenario.geometry.total_elements,
            Method::Fd | Method::MrtBound => scene.fd_elements,
        },
        outer_iterations: 0,
        status: "ok".to_string(),
        scene_checksum: scene.checksum.clone(),
    };

    match method {
        Method::EbAsd => {
            let options = AlgorithmOptions {
                stall_limit: config.algorithm_options.stall_limit,
                max_iterations: config.algorithm_options.max_iterations,
                seed: derive_seed(point.rng_seed, &[sweep_index as u64, realization as u64, 1]),
                init_retries: 5,
                solver,
            };
            match alternating_optimize(&scene.scenario, &options) {
                Ok((solution, _trace)) => {
                    record.transmit_power_w = solution.transmit_power_w;
                    record.min_received_power_w = min_of(&solution.received_powers_w);
                    record.feasible = solution.feasible;
                    record.outer_iterations = solution.iterations_used;
                }
                Err(e) => record.status = e.to_string(),
            }
        }
        Method::Pso => {
            let options = PsoOptions {
                num_particles: config.pso_options.num_particles,
                num_iterations: config.pso_options.num_iterations,
                inertia: config.pso_options.inertia,
                cognitive: config.pso_options.cognitive,
                social: config.pso_options.social,
                seed: derive_seed(point.rng_seed, &[sweep_index as u64, realization as u64, 2]),
                solver,
            };
            match pso_optimize(&scene.scenario, &options) {
                Ok((solution, _history)) => {
                    record.transmit_power_w = solution.transmit_power_w;
                    record.min_received_power_w = min_of(&solution.received_powers_w);
                    record.feasible = solution.feasible;
                    record.outer_iterations = solution.iterations_used;
                }
                Err(e) => record.status = e.to_string(),
            }
        }
        Method::Fd => match solve_fd(&scene.fd_channels, &point.rf_thresholds_w, &solver) {
            Ok(design) => {
                record.transmit_power_w = design.transmit_power_w;
                record.min_received_power_w = min_of(&design.received_powers_w);
                record.feasible = design.feasible;
            }
            Err(e) => record.status = e.to_string(),
        },
        Method::MrtBound => {
            let design = mrt_design(&scene.fd_channels, &point.rf_thresholds_w);
            record.transmit_power_w = design.transmit_power_w;
            record.min_received_power_w = min_of(&design.received_powers_w);
            record.feasible = design.feasible;
        }
    }
    record
}

/// Runs the full sweep. Cells are independent work items on the rayon pool;
/// completed sweep points are appended to `records.partial.csv` in the
/// output directory as progress insurance, and the returned records are in
/// canonical (sweep point, realization, method) order.
pub fn run_experiment(
    config: &ExperimentConfig,
    db: &MaterialDb<f64>,
) -> Result<ExperimentOutcome, HarnessError> {
    config.validate(db)?;
    let points = config.sweep_points();
    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();

    let partial_path = config.output_dir.join("records.partial.csv");
    if config.output_dir.exists() {
        let _ = std::fs::remove_file(&partial_path);
    }

    let mut records = Vec::new();
    let mut timings = Vec::new();
    let mut violations = 0usize;
    for (sweep_index, point) in points.iter().enumerate() {
        let cell_results: Vec<(Vec<RunRecord>, Vec<RunTiming>, usize)> = (0..point.realizations)
            .into_par_iter()
            .map(|realization| {
                let scene = build_scene(point, realization, db, &config.material_name)?;
                let mut cell_records = Vec::with_capacity(methods.len());
                let mut cell_timings = Vec::with_capacity(methods.len());
                for &method in &methods {
                    let start = Instant::now();
                    let record = run_method(method, config, point, &scene, sweep_index, realization);
                    cell_timings.push(RunTiming {
                        method,
                        frequency_hz: point.frequency_hz,
                        antenna_length_m: point.antenna_length_m,
                        realization_index: realization,
                        wall_time_s: start.elapsed().as_secs_f64(),
                    });
                    cell_records.push(record);
                }
                Ok::<_, HarnessError>((cell_records, cell_timings, scene.near_field_violations))
            })
            .collect::<Result<_, _>>()?;

        let mut point_records = Vec::new();
        for (r, t, v) in cell_results {
            point_records.extend(r);
            timings.extend(t);
            violations += v;
        }
        point_records.sort_by(|a, b| {
            (a.realization_index, a.method).cmp(&(b.realization_index, b.method))
        });
        flush_partial(&partial_path, &point_records, records.is_empty());
        records.extend(point_records);
    }
    timings.sort_by(|a, b| {
        (a.frequency_hz.to_bits(), a.antenna_length_m.to_bits(), a.realization_index, a.method)
            .cmp(&(b.frequency_hz.to_bits(), b.antenna_length_m.to_bits(), b.realization_index, b.method))
    });

    Ok(ExperimentOutcome {
        records,
        timings,
        near_field_violations: violations,
    })
}

fn flush_partial(path: &Path, records: &[RunRecord], first: bool) {
    let write = || -> Result<(), HarnessError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err(path))?;
        let mut writer = csv::WriterBuilder::new().has_headers(first).from_writer(file);
        for r in records {
            writer.serialize(r)?;
        }
        writer.flush().map_err(io_err(path))?;
        Ok(())
    };
    if let Err(e) = write() {
        log::warn!("could not flush partial results: {e}");
    }
}

/// Aggregated statistics of one (method, sweep point) cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: Method,
    pub frequency_hz: f64,
    pub antenna_length_m: f64,
    pub records: usize,
    pub feasible_records: usize,
    pub infeasible_fraction: f64,
    pub mean_transmit_power_w: Option<f64>,
    pub std_transmit_power_w: Option<f64>,
    pub mean_avg_gain: Option<f64>,
    pub mean_num_elements: Option<f64>,
}

/// Groups records per (sweep point, method); means and sample standard
/// deviations cover feasible records only, with the infeasible fraction
/// reported alongside.
pub fn aggregate(records: &[RunRecord]) -> Vec<SummaryRow> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(u64, u64, Method), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.frequency_hz.to_bits(), r.antenna_length_m.to_bits(), r.method))
            .or_default()
            .push(r);
    }
    let mut rows = Vec::with_capacity(groups.len());
    for ((f_bits, l_bits, method), group) in groups {
        let feasible: Vec<&&RunRecord> = group.iter().filter(|r| r.feasible).collect();
        let count = group.len();
        let mean_std = |f: &dyn Fn(&RunRecord) -> f64| -> (Option<f64>, Option<f64>) {
            if feasible.is_empty() {
                return (None, None);
            }
            let n = feasible.len() as f64;
            let mean = feasible.iter().map(|r| f(r)).sum::<f64>() / n;
            let std = if feasible.len() > 1 {
                (feasible.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            (Some(mean), Some(std))
        };
        let (mean_ptx, std_ptx) = mean_std(&|r| r.transmit_power_w);
        let (mean_gain, _) = mean_std(&|r| r.avg_gain);
        let (mean_elems, _) = mean_std(&|r| r.num_elements as f64);
        if feasible.is_empty() {
            log::warn!(
                "empty cell: every realization infeasible for {} at f={} Hz, L={} m",
                method.label(),
                f64::from_bits(f_bits),
                f64::from_bits(l_bits)
            );
        }
        rows.push(SummaryRow {
            method,
            frequency_hz: f64::from_bits(f_bits),
            antenna_length_m: f64::from_bits(l_bits),
            records: count,
            feasible_records: feasible.len(),
            infeasible_fraction: (count - feasible.len()) as f64 / count as f64,
            mean_transmit_power_w: mean_ptx,
            std_transmit_power_w: std_ptx,
            mean_avg_gain: mean_gain,
            mean_num_elements: mean_elems,
        });
    }
    rows
}

#[derive(Serialize)]
struct Manifest<'a> {
    toolkit_version: &'static str,
    config: &'a ExperimentConfig,
    rng_seed: u64,
    records: usize,
    near_field_violations: usize,
}

fn watt_to_dbm(w: f64) -> f64 {
    10.0 * (w * 1000.0).log10()
}

/// Writes `records.csv`, `timings.csv`, `summary.csv`, the SVG charts and
/// `manifest.json` into the output directory, returning the created paths.
pub fn emit_outputs(
    outcome: &ExperimentOutcome,
    summary: &[SummaryRow],
    config: &ExperimentConfig,
    output_dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(output_dir).map_err(io_err(output_dir))?;
    let mut written = Vec::new();

    let records_path = output_dir.join("records.csv");
    let mut writer = csv::Writer::from_path(&records_path)?;
    for r in &outcome.records {
        writer.serialize(r)?;
    }
    if outcome.records.is_empty() {
        writer.write_record([
            "method",
            "frequency_hz",
            "antenna_length_m",
            "num_users",
            "realization_index",
            "transmit_power_w",
            "min_received_power_w",
            "feasible",
            "avg_gain",
            "num_elements",
            "outer_iterations",
            "status",
            "scene_checksum",
        ])?;
    }
    writer.flush().map_err(io_err(&records_path))?;
    written.push(records_path);

    let timings_path = output_dir.join("timings.csv");
    let mut writer = csv::Writer::from_path(&timings_path)?;
    for t in &outcome.timings {
        writer.serialize(t)?;
    }
    writer.flush().map_err(io_err(&timings_path))?;
    written.push(timings_path);

    let summary_path = output_dir.join("summary.csv");
    let mut writer = csv::Writer::from_path(&summary_path)?;
    for row in summary {
        writer.serialize(row)?;
    }
    if summary.is_empty() {
        writer.write_record([
            "method",
            "frequency_hz",
            "antenna_length_m",
            "records",
            "feasible_records",
            "infeasible_fraction",
            "mean_transmit_power_w",
            "std_transmit_power_w",
            "mean_avg_gain",
            "mean_num_elements",
        ])?;
    }
    writer.flush().map_err(io_err(&summary_path))?;
    written.push(summary_path);

    if !summary.is_empty() {
        let sweep_value = |row: &SummaryRow| match config.sweep_variable {
            SweepVariable::AntennaLength => row.antenna_length_m,
            _ => row.frequency_hz,
        };
        let x_label = match config.sweep_variable {
            SweepVariable::AntennaLength => "antenna length (m)",
            SweepVariable::Frequency => "frequency (Hz)",
            SweepVariable::None => "frequency (Hz)",
        };
        let mut methods: Vec<Method> = summary.iter().map(|r| r.method).collect();
        methods.sort();
        methods.dedup();

        let series_for = |f: &dyn Fn(&SummaryRow) -> Option<f64>| -> Vec<svg::Series> {
            methods
                .iter()
                .filter_map(|&m| {
                    let points: Vec<(f64, f64)> = summary
                        .iter()
                        .filter(|r| r.method == m)
                        .filter_map(|r| f(r).map(|y| (sweep_value(r), y)))
                        .collect();
                    (!points.is_empty()).then(|| svg::Series {
                        name: m.label().to_string(),
                        points,
                    })
                })
                .collect()
        };

        let power_series = series_for(&|r| r.mean_transmit_power_w.map(watt_to_dbm));
        if !power_series.is_empty() {
            let path = output_dir.join("transmit_power.svg");
            std::fs::write(
                &path,
                svg::line_chart("mean transmit power", x_label, "transmit power (dBm)", &power_series),
            )
            .map_err(io_err(&path))?;
            written.push(path);
        }

        let mut gain_series = series_for(&|r| r.mean_avg_gain.map(|g| 10.0 * g.log10()));
        for s in &mut gain_series {
            s.name = format!("{} gain", s.name);
        }
        let mut element_series = series_for(&|r| r.mean_num_elements);
        for s in &mut element_series {
            s.name = format!("{} elements", s.name);
        }
        //元素 counts share the x axis; plot them next to the gain curves
        let mut combined = gain_series;
        combined.extend(element_series);
        if !combined.is_empty() {
            let path = output_dir.join("average_gain.svg");
            std::fs::write(
                &path,
                svg::line_chart("mean effective gain (dB) and element count", x_label, "gain (dB) / elements", &combined),
            )
            .map_err(io_err(&path))?;
            written.push(path);
        }
    }

    let manifest_path = output_dir.join("manifest.json");
    let manifest = Manifest {
        toolkit_version: env!("CARGO_PKG_VERSION"),
        config,
        rng_seed: config.base.rng_seed,
        records: outcome.records.len(),
        near_field_violations: outcome.near_field_violations,
    };
    let mut file = std::fs::File::create(&manifest_path).map_err(io_err(&manifest_path))?;
    file.write_all(serde_json::to_string_pretty(&manifest)?.as_bytes())
        .map_err(io_err(&manifest_path))?;
    file.write_all(b"\n").map_err(io_err(&manifest_path))?;
    written.push(manifest_path);

    Ok(written)
}

/// Parses `records.csv` back into records.
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in reader.deserialize() {
        out.push(row?);
    }
    Ok(out)
}
