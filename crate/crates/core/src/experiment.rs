//! Synthetic sensor-network experiment: a Gaussian process observed at random
//! sensor locations, a radius-constrained graph estimated from training draws,
//! bandwidth calibration for the fixed transform, and the comparison of
//! partitioners and reconstructors on fresh test draws.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gft::{compute_fixed_gft, compute_sf_gft, VariationOperator};
use crate::io::{format_f64, to_json_pretty, write_atomic};
use crate::linalg;
use crate::reconstruct::{err_metric, fixed_gft_operator, sf_operator, ErrMetric, LinearInterpolator};
use crate::rng::{item_rng, streams};
use crate::sampling::{
    exact_objective, greedy_select_traced, partition_baseline, partition_greedy, Baseline, Objective, Partition,
};

/// Initial jitter for the GP Cholesky, scaled by `N`.
const GP_JITTER: f64 = 1e-10;
const GP_MAX_JITTER: f64 = 1e-2;
/// Regularization of the sample covariance before inversion, relative to its mean variance.
const COV_EPSILON: f64 = 1e-6;
const COV_EPSILON_RETRY: f64 = 1e3;

fn default_n_sensors() -> usize {
    500
}
fn default_sigmas() -> Vec<f64> {
    vec![1.0, 0.4]
}
fn default_n_train() -> usize {
    5000
}
fn default_n_test() -> usize {
    500
}
fn default_radius() -> f64 {
    0.3
}
fn default_p_values() -> Vec<usize> {
    vec![5, 10]
}
fn default_random_seeds() -> Vec<u64> {
    (0..5).collect()
}
fn default_probe_p() -> usize {
    5
}
fn default_frequency_steps() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_n_sensors")]
    pub n_sensors: usize,
    #[serde(default = "default_sigmas")]
    pub sigmas: Vec<f64>,
    #[serde(default = "default_n_train")]
    pub n_train: usize,
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_p_values")]
    pub p_values: Vec<usize>,
    /// Master seed for locations, draws and derived streams.
    pub seed: u64,
    /// Seeds for the random-partition baseline.
    #[serde(default = "default_random_seeds")]
    pub random_seeds: Vec<u64>,
    /// Ridge added to the estimated Laplacian; `None` uses `1e-8 · trace(L) / N`.
    #[serde(default)]
    pub ridge: Option<f64>,
    #[serde(default)]
    pub objective: Objective,
    /// Partition size used to calibrate the fixed-transform bandwidth.
    #[serde(default = "default_probe_p")]
    pub probe_p: usize,
    /// Upper end of the bandwidth sweep; `None` sweeps up to the smallest probe subset.
    #[serde(default)]
    pub max_bandwidth: Option<usize>,
    /// Greedy steps recorded in the exact-vs-approximate frequency curve.
    #[serde(default = "default_frequency_steps")]
    pub frequency_steps: usize,
}

impl ExperimentConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            n_sensors: default_n_sensors(),
            sigmas: default_sigmas(),
            n_train: default_n_train(),
            n_test: default_n_test(),
            radius: default_radius(),
            p_values: default_p_values(),
            seed,
            random_seeds: default_random_seeds(),
            ridge: None,
            objective: Objective::default(),
            probe_p: default_probe_p(),
            max_bandwidth: None,
            frequency_steps: default_frequency_steps(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_sensors < 4 {
            return bad(format!("n_sensors = {} is too small", self.n_sensors));
        }
        if self.sigmas.is_empty() || self.sigmas.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return bad("sigmas must be non-empty and positive".into());
        }
        if self.n_train <= self.n_sensors {
            return bad(format!(
                "n_train = {} must exceed n_sensors = {} for an invertible sample covariance",
                self.n_train, self.n_sensors
            ));
        }
        if self.n_test == 0 {
            return bad("n_test must be positive".into());
        }
        if !(self.radius > 0.0 && self.radius < std::f64::consts::SQRT_2) {
            return bad(format!("radius {} outside (0, sqrt 2)", self.radius));
        }
        if self.p_values.is_empty() {
            return bad("p_values must be non-empty".into());
        }
        for &p in self.p_values.iter().chain(std::iter::once(&self.probe_p)) {
            if p < 2 || p > self.n_sensors / 2 {
                return bad(format!("p = {p} must be in [2, n_sensors / 2]"));
            }
        }
        if let Some(r) = self.ridge {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("ridge {r} must be positive"));
            }
        }
        if self.max_bandwidth == Some(0) {
            return bad("max_bandwidth must be positive".into());
        }
        Ok(())
    }
}

/// Points drawn uniformly in the unit square.
pub fn sensor_locations(n: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = item_rng(seed, streams::LOCATIONS, 0);
    (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect()
}

fn distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// `S_ij = exp(−d_ij / σ²)`.
pub fn gp_covariance(locations: &[[f64; 2]], sigma: f64) -> DMatrix<f64> {
    let n = locations.len();
    let scale = sigma * sigma;
    DMatrix::from_fn(n, n, |i, j| (-distance(&locations[i], &locations[j]) / scale).exp())
}

/// Gaussian process restricted to the sensor locations.
#[derive(Debug, Clone)]
pub struct GpField {
    pub sigma: f64,
    pub locations: Vec<[f64; 2]>,
    pub cov: DMatrix<f64>,
    factor: DMatrix<f64>,
    /// Jitter that was needed for the factorization (0 if none).
    pub jitter: f64,
}

impl GpField {
    pub fn new(locations: Vec<[f64; 2]>, sigma: f64) -> Result<Self> {
        let cov = gp_covariance(&locations, sigma);
        let n = locations.len();
        let mut jitter = 0.0;
        let factor = loop {
            let mut c = cov.clone();
            for i in 0..n {
                c[(i, i)] += jitter;
            }
            if let Some(ch) = linalg::cholesky(&c) {
                break ch.l();
            }
            jitter = if jitter == 0.0 { GP_JITTER * n as f64 } else { jitter * 10.0 };
            if jitter > GP_MAX_JITTER {
                return Err(Error::CholeskyFailure { jitter });
            }
        };
        Ok(Self {
            sigma,
            locations,
            cov,
            factor,
            jitter,
        })
    }

    pub fn n(&self) -> usize {
        self.locations.len()
    }

    /// `count` i.i.d. draws as rows; draw `i` uses stream item `offset + i`.
    pub fn sample(&self, count: usize, seed: u64, stream: u64, offset: u64) -> DMatrix<f64> {
        let n = self.n();
        let rows: Vec<DVector<f64>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = item_rng(seed, stream, offset + i as u64);
                let z = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
                &self.factor * z
            })
            .collect();
        DMatrix::from_fn(count, n, |i, j| rows[i][j])
    }
}

/// Sensor locations for `config.seed`, the field for `sigma`, and training draws.
pub fn gen_field(config: &ExperimentConfig, sigma: f64, sigma_index: usize) -> Result<(GpField, DMatrix<f64>)> {
    let field = GpField::new(sensor_locations(config.n_sensors, config.seed), sigma)?;
    let train = field.sample(config.n_train, config.seed, streams::TRAIN, (sigma_index as u64) << 32);
    Ok((field, train))
}

/// Unbiased sample covariance of the rows of `x`.
pub fn sample_covariance(x: &DMatrix<f64>) -> DMatrix<f64> {
    let t = x.nrows() as f64;
    let mean = x.row_mean();
    let centered = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] - mean[j]);
    centered.tr_mul(&centered) / (t - 1.0)
}

/// Radius-masked precision graph: invert the regularized sample covariance,
/// keep negative off-diagonal precision entries between sensors within `radius`
/// as edge weights, and return the combinatorial Laplacian plus `ridge · I`.
pub fn build_graph(
    realizations: &DMatrix<f64>,
    locations: &[[f64; 2]],
    radius: f64,
    ridge: Option<f64>,
) -> Result<VariationOperator> {
    let n = locations.len();
    if realizations.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: realizations.ncols(),
        });
    }
    if realizations.nrows() <= n {
        return Err(Error::InvalidConfig(format!(
            "need more than {n} realizations, got {}",
            realizations.nrows()
        )));
    }
    let cov = sample_covariance(realizations);
    let base = COV_EPSILON * cov.trace() / n as f64;
    let mut epsilon = base;
    let precision = loop {
        let mut c = cov.clone();
        for i in 0..n {
            c[(i, i)] += epsilon;
        }
        if let Some(ch) = linalg::cholesky(&c) {
            break ch.inverse();
        }
        if epsilon > base {
            return Err(Error::SingularCovariance { epsilon });
        }
        epsilon *= COV_EPSILON_RETRY;
    };
    let weights = DMatrix::from_fn(n, n, |i, j| {
        if i == j || distance(&locations[i], &locations[j]) > radius {
            0.0
        } else {
            (-(precision[(i, j)] + precision[(j, i)]) * 0.5).max(0.0)
        }
    });
    let lap = VariationOperator::laplacian(&weights)?;
    let delta = ridge.unwrap_or_else(|| {
        let d = lap.default_ridge();
        if d > 0.0 {
            d
        } else {
            1e-8
        }
    });
    Ok(lap.with_ridge(delta))
}

/// Error of `(M, I)`-GFT bandlimited reconstruction per bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthCurve {
    /// `(K, Err)`; `Err = +inf` where the normal matrix is singular for some subset.
    pub points: Vec<(usize, f64)>,
    pub k_opt: usize,
}

impl BandwidthCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,err\n");
        for (k, e) in &self.points {
            out.push_str(&format!("{k},{}\n", format_f64(*e)));
        }
        out
    }
}

pub fn estimate_bandwidth(
    m: &VariationOperator,
    signals: &[DVector<f64>],
    probe: &Partition,
    k_range: std::ops::RangeInclusive<usize>,
) -> Result<BandwidthCurve> {
    let min_size = probe.subsets().iter().map(|s| s.len()).min().unwrap_or(0);
    if *k_range.start() == 0 || *k_range.end() > min_size || k_range.is_empty() {
        return Err(Error::InvalidBandSize {
            k: *k_range.end(),
            set_size: min_size,
        });
    }
    let gft = compute_fixed_gft(m)?;
    let ks: Vec<usize> = k_range.collect();
    let points: Vec<(usize, f64)> = ks
        .par_iter()
        .map(|&k| {
            let ops: Result<Vec<LinearInterpolator>> =
                probe.subsets().iter().map(|s| fixed_gft_operator(&gft, s, k)).collect();
            match ops {
                Ok(ops) => Ok((k, err_metric(&ops, signals)?.err)),
                Err(Error::SingularNormalMatrix { .. }) => Ok((k, f64::INFINITY)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut k_opt = points[0].0;
    let mut best = points[0].1;
    for &(k, e) in &points[1..] {
        if e < best {
            best = e;
            k_opt = k;
        }
    }
    Ok(BandwidthCurve { points, k_opt })
}

/// Exact frequency and its zero-order surrogate along a greedy run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyPoint {
    pub step: usize,
    pub vertex: usize,
    /// `λ_{|S|}` of the current set.
    pub exact: f64,
    /// `1 − σ_min(D_S^{-1/2} M_SSᶜ D_Sᶜ^{-1/2})`.
    pub approx: f64,
}

/// Greedy run with `objective`, recording exact and approximate frequencies per step.
pub fn frequency_curve(m: &VariationOperator, steps: usize, objective: Objective) -> Result<Vec<FrequencyPoint>> {
    let (set, trace) = greedy_select_traced(m, steps, objective)?;
    let n = m.n();
    (1..=steps)
        .into_par_iter()
        .map(|len| {
            let prefix = crate::gft::SamplingSet::new(set.indices()[..len].to_vec(), n)?;
            let exact = exact_objective(m, &prefix)?;
            let approx = 1.0 - crate::sampling::approx_objective(m, &prefix, 0)?;
            Ok(FrequencyPoint {
                step: len,
                vertex: trace[len - 1].vertex,
                exact,
                approx,
            })
        })
        .collect()
}

pub fn frequency_curve_csv(sigma: f64, points: &[FrequencyPoint], out: &mut String) {
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_f64(sigma),
            p.step,
            p.vertex,
            format_f64(p.exact),
            format_f64(p.approx)
        ));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReconstructorKind {
    /// `(M, I)`-GFT bandlimited with the calibrated bandwidth.
    FixedGft,
    /// Adaptive `(M, Q(S_j))`-GFT interpolator.
    SfGft,
}

impl std::fmt::Display for ReconstructorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReconstructorKind::FixedGft => write!(f, "fixed-gft"),
            ReconstructorKind::SfGft => write!(f, "sf-gft"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub sigma: f64,
    pub p: usize,
    pub partitioner: String,
    pub reconstructor: ReconstructorKind,
    /// Bandwidth used by the fixed transform (per-subset cap applied); absent for SF rows.
    pub bandwidth: Option<usize>,
    pub err: f64,
    pub snr_db: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma,p,partitioner,reconstructor,bandwidth,err,snr_db\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                format_f64(r.sigma),
                r.p,
                r.partitioner,
                r.reconstructor,
                r.bandwidth.map(|k| k.to_string()).unwrap_or_default(),
                format_f64(r.err),
                format_f64(r.snr_db)
            ));
        }
        out
    }

    pub fn find(&self, sigma: f64, p: usize, partitioner: &str, rec: ReconstructorKind) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.sigma == sigma && r.p == p && r.partitioner == partitioner && r.reconstructor == rec)
    }
}

/// Everything produced for one smoothness value.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaSummary {
    pub sigma: f64,
    pub k_opt: usize,
    pub edges: usize,
    pub components: usize,
    pub gp_jitter: f64,
}

#[derive(Debug, Clone)]
pub struct Table1Output {
    pub table: ResultTable,
    pub bandwidth_curves: Vec<(f64, BandwidthCurve)>,
    pub frequency_curves: Vec<(f64, Vec<FrequencyPoint>)>,
    /// `(sigma, p, partitioner label, partition)`
    pub partitions: Vec<(f64, usize, String, Partition)>,
    pub summaries: Vec<SigmaSummary>,
}

pub const PROPOSED: &str = "proposed";
pub const FIXED_GFT_GREEDY: &str = "fixed-gft-greedy";

pub fn random_label(seed: u64) -> String {
    format!("random-{seed}")
}

fn evaluate_partition(
    gft: &crate::gft::FixedGft,
    m: &VariationOperator,
    partition: &Partition,
    k_opt: usize,
    test: &[DVector<f64>],
) -> Result<(usize, ErrMetric, ErrMetric)> {
    let min_size = partition.subsets().iter().map(|s| s.len()).min().unwrap_or(0);
    let k = k_opt.min(min_size);
    let fixed: Vec<LinearInterpolator> = partition
        .subsets()
        .iter()
        .map(|s| fixed_gft_operator(gft, s, k))
        .collect::<Result<_>>()?;
    let adaptive: Vec<LinearInterpolator> = partition
        .subsets()
        .par_iter()
        .map(|s| compute_sf_gft(m, s).and_then(|b| sf_operator(&b)))
        .collect::<Result<_>>()?;
    Ok((k, err_metric(&fixed, test)?, err_metric(&adaptive, test)?))
}

fn rows_of(matrix: &DMatrix<f64>) -> Vec<DVector<f64>> {
    (0..matrix.nrows()).map(|i| matrix.row(i).transpose()).collect()
}

/// Runs the whole comparison grid.
pub fn run_table1(config: &ExperimentConfig) -> Result<Table1Output> {
    config.validate()?;
    let mut out = Table1Output {
        table: ResultTable::default(),
        bandwidth_curves: Vec::new(),
        frequency_curves: Vec::new(),
        partitions: Vec::new(),
        summaries: Vec::new(),
    };
    for (si, &sigma) in config.sigmas.iter().enumerate() {
        let (field, train) = gen_field(config, sigma, si)?;
        let m = build_graph(&train, &field.locations, config.radius, config.ridge)?;
        let train_signals = rows_of(&train);
        let test_signals = rows_of(&field.sample(config.n_test, config.seed, streams::TEST, (si as u64) << 32));

        let probe = partition_greedy(&m, config.probe_p, config.objective)?;
        let min_probe = probe.subsets().iter().map(|s| s.len()).min().unwrap_or(1);
        let k_max = config.max_bandwidth.map_or(min_probe, |k| k.min(min_probe));
        let curve = estimate_bandwidth(&m, &train_signals, &probe, 1..=k_max)?;
        let k_opt = curve.k_opt;
        log::info!("sigma = {sigma}: K_opt = {k_opt}");

        let steps = config.frequency_steps.min(config.n_sensors / 2);
        if steps > 0 {
            out.frequency_curves.push((sigma, frequency_curve(&m, steps, config.objective)?));
        }

        let gft = compute_fixed_gft(&m)?;
        for &p in &config.p_values {
            if p * k_opt > config.n_sensors {
                log::warn!(
                    "p = {p} exceeds N / K_opt = {}; fixed-GFT bandwidth capped at the subset size",
                    config.n_sensors / k_opt
                );
            }
            let mut partitions: Vec<(String, Partition)> = Vec::new();
            let proposed = if p == config.probe_p {
                probe.clone()
            } else {
                partition_greedy(&m, p, config.objective)?
            };
            partitions.push((PROPOSED.into(), proposed));
            partitions.push((
                FIXED_GFT_GREEDY.into(),
                partition_baseline(&m, p, Baseline::FixedGftGreedy { bandwidth: k_opt })?,
            ));
            for &seed in &config.random_seeds {
                partitions.push((random_label(seed), partition_baseline(&m, p, Baseline::Random { seed })?));
            }
            for (label, partition) in partitions {
                let (k, fixed, adaptive) = evaluate_partition(&gft, &m, &partition, k_opt, &test_signals)?;
                out.table.rows.push(ResultRow {
                    sigma,
                    p,
                    partitioner: label.clone(),
                    reconstructor: ReconstructorKind::FixedGft,
                    bandwidth: Some(k),
                    err: fixed.err,
                    snr_db: fixed.snr_db,
                });
                out.table.rows.push(ResultRow {
                    sigma,
                    p,
                    partitioner: label.clone(),
                    reconstructor: ReconstructorKind::SfGft,
                    bandwidth: None,
                    err: adaptive.err,
                    snr_db: adaptive.snr_db,
                });
                out.partitions.push((sigma, p, label, partition));
            }
        }
        out.summaries.push(SigmaSummary {
            sigma,
            k_opt,
            edges: m.edges().len(),
            components: m.connected_components(),
            gp_jitter: field.jitter,
        });
        out.bandwidth_curves.push((sigma, curve));
    }
    Ok(out)
}

/// Writes `table1.csv`, `bandwidth_curve.csv`, `frequency_curves.csv`,
/// `partition_<p>.json` and `metadata.json` into `dir`.
pub fn write_artifacts(output: &Table1Output, dir: &Path) -> Result<()> {
    write_atomic(&dir.join("table1.csv"), output.table.to_csv().as_bytes())?;

    let mut bw = String::from("sigma,k,err\n");
    for (sigma, curve) in &output.bandwidth_curves {
        for (k, e) in &curve.points {
            bw.push_str(&format!("{},{k},{}\n", format_f64(*sigma), format_f64(*e)));
        }
    }
    write_atomic(&dir.join("bandwidth_curve.csv"), bw.as_bytes())?;

    let mut freq = String::from("sigma,step,vertex,exact_lambda,approx_lambda\n");
    for (sigma, points) in &output.frequency_curves {
        frequency_curve_csv(*sigma, points, &mut freq);
    }
    write_atomic(&dir.join("frequency_curves.csv"), freq.as_bytes())?;

    let mut by_p: std::collections::BTreeMap<usize, Vec<serde_json::Value>> = Default::default();
    for (sigma, p, label, partition) in &output.partitions {
        by_p.entry(*p).or_default().push(serde_json::json!({
            "sigma": sigma,
            "partitioner": label,
            "partition": partition,
        }));
    }
    for (p, entries) in by_p {
        write_atomic(&dir.join(format!("partition_{p}.json")), to_json_pretty(&entries)?.as_bytes())?;
    }

    let meta = serde_json::json!({
        "snr_db": "-10 log10 of the partition-averaged Err (Err is averaged first, then converted)",
        "sigmas": output.summaries,
    });
    write_atomic(&dir.join("metadata.json"), to_json_pretty(&meta)?.as_bytes())
}
