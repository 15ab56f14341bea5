//! Interpolators, error decomposition and the partition error metric.
//!
//! Every interpolator here is linear in the samples, so each one is materialized
//! once as an `n × |S|` operator ([`LinearInterpolator`]) and then applied to
//! as many signals as needed.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Block, Error, Result};
use crate::gft::{compute_sf_gft, FixedGft, GraphSignal, SamplingSet, SfBasis, VariationOperator};
use crate::linalg;
use crate::rng::{item_rng, streams};

/// Relative eigenvalue floor below which `U_SKᵀ Q_S U_SK` is treated as singular.
pub const NORMAL_MATRIX_RCOND: f64 = 1e-12;

/// Norm used on the samples in the least-squares fit.
#[derive(Debug, Clone, Copy)]
pub enum SampleNorm<'a> {
    Identity,
    /// `Q_S`, rows/columns in sampling-set order.
    Weighted(&'a DMatrix<f64>),
}

/// Anything that maps samples `x_S` to a full-length signal estimate.
pub trait Reconstructor: Sync {
    fn set(&self) -> &SamplingSet;
    fn reconstruct(&self, samples: &DVector<f64>) -> Result<DVector<f64>>;
}

/// A reconstruction operator `x̃ = A x_S` with `A` of size `n × |S|`.
#[derive(Debug, Clone)]
pub struct LinearInterpolator {
    set: SamplingSet,
    operator: DMatrix<f64>,
}

impl LinearInterpolator {
    pub fn new(set: SamplingSet, operator: DMatrix<f64>) -> Result<Self> {
        if operator.nrows() != set.n() || operator.ncols() != set.len() {
            return Err(Error::DimensionMismatch {
                expected: set.n() * set.len(),
                got: operator.nrows() * operator.ncols(),
            });
        }
        Ok(Self { set, operator })
    }

    pub fn operator(&self) -> &DMatrix<f64> {
        &self.operator
    }

    pub fn apply(&self, samples: &DVector<f64>) -> Result<GraphSignal> {
        if samples.len() != self.set.len() {
            return Err(Error::DimensionMismatch {
                expected: self.set.len(),
                got: samples.len(),
            });
        }
        GraphSignal::new(&self.operator * samples)
    }
}

impl Reconstructor for LinearInterpolator {
    fn set(&self) -> &SamplingSet {
        &self.set
    }

    fn reconstruct(&self, samples: &DVector<f64>) -> Result<DVector<f64>> {
        self.apply(samples).map(GraphSignal::into_values)
    }
}

/// `U_VK (U_SKᵀ Q_S U_SK)⁻¹ U_SKᵀ Q_S` for the first `k` columns of `u`.
pub fn bandlimited_operator(
    u: &DMatrix<f64>,
    norm: SampleNorm<'_>,
    set: &SamplingSet,
    k: usize,
) -> Result<LinearInterpolator> {
    if u.nrows() != set.n() {
        return Err(Error::DimensionMismatch {
            expected: set.n(),
            got: u.nrows(),
        });
    }
    if k == 0 || k > set.len() || k > u.ncols() {
        return Err(Error::InvalidBandSize { k, set_size: set.len() });
    }
    let u_vk = u.columns(0, k);
    let u_sk = linalg::select_rows(&u_vk.into_owned(), set.indices());
    // Q_S U_SK
    let weighted = match norm {
        SampleNorm::Identity => u_sk.clone(),
        SampleNorm::Weighted(q) => {
            if q.nrows() != set.len() || q.ncols() != set.len() {
                return Err(Error::DimensionMismatch {
                    expected: set.len(),
                    got: q.nrows(),
                });
            }
            q * &u_sk
        }
    };
    let normal = u_sk.tr_mul(&weighted);
    let normal = (&normal + normal.transpose()) * 0.5;
    let eigs = linalg::symmetric_eigenvalues_sorted(&normal)?;
    let (lo, hi) = (eigs[0], eigs[eigs.len() - 1]);
    if hi <= 0.0 || lo <= NORMAL_MATRIX_RCOND * hi {
        return Err(Error::SingularNormalMatrix { k });
    }
    let chol = linalg::cholesky(&normal).ok_or(Error::SingularNormalMatrix { k })?;
    let coeffs = chol.solve(&weighted.transpose());
    LinearInterpolator::new(set.clone(), u.columns(0, k) * coeffs)
}

/// Sample-consistent least-squares bandlimited interpolation.
pub fn bandlimited_interpolate(
    u: &DMatrix<f64>,
    norm: SampleNorm<'_>,
    set: &SamplingSet,
    k: usize,
    samples: &DVector<f64>,
) -> Result<GraphSignal> {
    bandlimited_operator(u, norm, set, k)?.apply(samples)
}

/// Bandlimited interpolation with the first `k` vectors of the `(M, I)`-GFT.
pub fn fixed_gft_operator(gft: &FixedGft, set: &SamplingSet, k: usize) -> Result<LinearInterpolator> {
    bandlimited_operator(gft.u(), SampleNorm::Identity, set, k)
}

/// `2 U_VK U_SKᵀ Q_S` with `K = {1, …, |S|}`.
///
/// Under the full-rank coupling condition the first `|S|` frequencies are
/// exactly the low band.
pub fn sf_operator(basis: &SfBasis) -> Result<LinearInterpolator> {
    let set = basis.set();
    let s = set.len();
    let u_vk = basis.u().columns(0, s).into_owned();
    let u_sk = linalg::select_rows(&u_vk, set.indices());
    let q_s = basis.inner_product().sampled_block();
    let op = (&u_vk * u_sk.transpose() * q_s) * 2.0;
    LinearInterpolator::new(set.clone(), op)
}

pub fn sf_interpolate(basis: &SfBasis, samples: &DVector<f64>) -> Result<GraphSignal> {
    sf_operator(basis)?.apply(samples)
}

/// GMRF conditional mean `Σ_ScS Σ_S⁻¹ x_S`, computed as `−M_ScSc⁻¹ M_ScS x_S`.
/// Returned in `set.complement()` order.
pub fn mmse_estimate(m: &VariationOperator, set: &SamplingSet, samples: &DVector<f64>) -> Result<DVector<f64>> {
    if set.n() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            got: set.n(),
        });
    }
    if samples.len() != set.len() {
        return Err(Error::DimensionMismatch {
            expected: set.len(),
            got: samples.len(),
        });
    }
    let m_cc = linalg::submatrix(m.matrix(), set.complement(), set.complement());
    let m_cs = linalg::submatrix(m.matrix(), set.complement(), set.indices());
    let chol = linalg::cholesky(&m_cc).ok_or(Error::SingularBlock(Block::Complement))?;
    Ok(-chol.solve(&(m_cs * samples)))
}

/// The same estimate through the adaptive basis: `2 U_ScL (I − Λ_L) U_SLᵀ Q_S x_S`.
pub fn mmse_spectral(basis: &SfBasis, samples: &DVector<f64>) -> Result<DVector<f64>> {
    let set = basis.set();
    if samples.len() != set.len() {
        return Err(Error::DimensionMismatch {
            expected: set.len(),
            got: samples.len(),
        });
    }
    let low = &basis.bands().low;
    let u_l = basis.columns(low);
    let u_sl = linalg::select_rows(&u_l, set.indices());
    let u_cl = linalg::select_rows(&u_l, set.complement());
    let mut coeffs = u_sl.tr_mul(&(basis.inner_product().sampled_block() * samples));
    for (row, &k) in low.iter().enumerate() {
        coeffs[row] *= 1.0 - basis.lambdas()[k];
    }
    Ok(u_cl * coeffs * 2.0)
}

/// Both sides of the error identity for the adaptive interpolator, computed independently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorDecomposition {
    /// `‖x̃ − x‖²_Q` from running the interpolator.
    pub err_q_sq: f64,
    /// `‖Δx̂_h‖²₂`
    pub high_energy: f64,
    /// `‖Δx̂_m‖²₂`
    pub mid_energy: f64,
}

impl ErrorDecomposition {
    /// `2‖Δx̂_h‖² + ‖Δx̂_m‖²`
    pub fn predicted(&self) -> f64 {
        2.0 * self.high_energy + self.mid_energy
    }
}

pub fn error_decomposition(basis: &SfBasis, x: &GraphSignal) -> Result<ErrorDecomposition> {
    let xhat = basis.analyze(x)?;
    let samples = x.restrict(basis.set().indices());
    let x_tilde = sf_interpolate(basis, &samples)?;
    let diff = x_tilde.values() - x.values();
    let energy = |idx: &[usize]| idx.iter().map(|&k| xhat[k] * xhat[k]).sum::<f64>();
    Ok(ErrorDecomposition {
        err_q_sq: basis.inner_product().norm_sq(&diff),
        high_energy: energy(&basis.bands().high),
        mid_energy: energy(&basis.bands().mid),
    })
}

fn serialize_db<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&format!("{v}"))
    }
}

/// `−10 log10(err)`; `+inf` for a perfect reconstruction.
pub fn snr_db(err: f64) -> f64 {
    if err <= 0.0 {
        f64::INFINITY
    } else {
        -10.0 * err.log10()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    #[serde(skip)]
    pub x_tilde: GraphSignal,
    pub err_q_norm_sq: f64,
    /// `(‖Δx̂_h‖², ‖Δx̂_m‖²)`
    pub band_energies: (f64, f64),
    #[serde(serialize_with = "serialize_db")]
    pub snr_db: f64,
}

/// Adaptive reconstruction of a known signal, with its error breakdown.
pub fn reconstruction_report(basis: &SfBasis, x: &GraphSignal) -> Result<ReconstructionReport> {
    let samples = x.restrict(basis.set().indices());
    let x_tilde = sf_interpolate(basis, &samples)?;
    let dec = error_decomposition(basis, x)?;
    let miss = x_tilde.restrict(basis.set().complement()) - x.restrict(basis.set().complement());
    let total = x.values().norm_squared();
    if total == 0.0 {
        return Err(Error::ZeroSignal { index: 0 });
    }
    Ok(ReconstructionReport {
        x_tilde,
        err_q_norm_sq: dec.err_q_sq,
        band_energies: (dec.high_energy, dec.mid_energy),
        snr_db: snr_db(miss.norm_squared() / total),
    })
}

/// Partition-averaged relative interpolation error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrMetric {
    pub err: f64,
    #[serde(serialize_with = "serialize_db")]
    pub snr_db: f64,
    /// Per-subset average over signals.
    pub per_subset: Vec<f64>,
}

/// `(1/p) Σ_j (1/M) Σ_i ‖x̃ⁱ_{S_jᶜ} − xⁱ_{S_jᶜ}‖² / ‖xⁱ‖²`, one reconstructor per subset.
pub fn err_metric<R: Reconstructor>(reconstructors: &[R], signals: &[DVector<f64>]) -> Result<ErrMetric> {
    if reconstructors.is_empty() {
        return Err(Error::EmptyPartition);
    }
    if signals.is_empty() {
        return Err(Error::InvalidConfig("no test signals".into()));
    }
    let energies: Vec<f64> = signals.iter().map(|x| x.norm_squared()).collect();
    if let Some(index) = energies.iter().position(|&e| e == 0.0) {
        return Err(Error::ZeroSignal { index });
    }
    let mut per_subset = Vec::with_capacity(reconstructors.len());
    for rec in reconstructors {
        let set = rec.set();
        let ratios: Vec<f64> = signals
            .par_iter()
            .zip(energies.par_iter())
            .map(|(x, &energy)| {
                let samples = linalg::subvector(x, set.indices());
                let x_tilde = rec.reconstruct(&samples)?;
                let miss: f64 = set
                    .complement()
                    .iter()
                    .map(|&i| (x_tilde[i] - x[i]).powi(2))
                    .sum();
                Ok(miss / energy)
            })
            .collect::<Result<_>>()?;
        per_subset.push(linalg::ordered_sum(&ratios) / signals.len() as f64);
    }
    let err = linalg::ordered_sum(&per_subset) / per_subset.len() as f64;
    Ok(ErrMetric {
        err,
        snr_db: snr_db(err),
        per_subset,
    })
}

/// Monte-Carlo check of the high/middle band coefficient covariances.
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceCheck {
    /// `max |Ĉ_HH − diag(1/λ_h)|_ij / sqrt(λ_i⁻¹ λ_j⁻¹)`; zero when the high band is empty.
    pub high_deviation: f64,
    /// `max |Ĉ_MM − I|`
    pub mid_deviation: f64,
    /// `max |Ĉ_HM|`
    pub cross_max: f64,
    pub empty_band: bool,
    pub expected_high_variances: Vec<f64>,
    pub num_samples: usize,
}

const MC_CHUNK: usize = 4096;

/// Draws `x ~ N(0, M⁻¹)` and compares the sample covariance of the band
/// coefficients with the closed form.
pub fn high_freq_covariance_check(
    m: &VariationOperator,
    set: &SamplingSet,
    num_samples: usize,
    seed: u64,
) -> Result<CovarianceCheck> {
    if num_samples < 2 {
        return Err(Error::InvalidConfig("need at least two samples".into()));
    }
    let chol = linalg::cholesky(m.matrix()).ok_or(Error::SingularBlock(Block::Full))?;
    let basis = compute_sf_gft(m, set)?;
    let n = m.n();
    let bands = basis.bands();
    let tracked: Vec<usize> = bands.high.iter().chain(bands.mid.iter()).copied().collect();
    let n_high = bands.high.len();
    // coefficients of tracked bands: rows of Uᵀ Q
    let proj = basis.columns(&tracked).transpose() * basis.inner_product().to_dense();
    let lt = chol.l().transpose();

    let chunks = num_samples.div_ceil(MC_CHUNK);
    let partials: Vec<(DVector<f64>, DMatrix<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = MC_CHUNK.min(num_samples - c * MC_CHUNK);
            let mut rng = item_rng(seed, streams::MONTE_CARLO, c as u64);
            let z = DMatrix::from_fn(n, count, |_, _| StandardNormal.sample(&mut rng));
            // x = L⁻ᵀ z has covariance (L Lᵀ)⁻¹ = M⁻¹
            let x = lt.solve_upper_triangular(&z).expect("triangular factor of a PD matrix");
            let coeffs = &proj * x;
            let sum = coeffs.column_sum();
            let outer = &coeffs * coeffs.transpose();
            (sum, outer)
        })
        .collect();
    let k = tracked.len();
    let mut sum = DVector::zeros(k);
    let mut outer = DMatrix::zeros(k, k);
    for (s, o) in &partials {
        sum += s;
        outer += o;
    }
    let count = num_samples as f64;
    let mean = &sum / count;
    let cov = (outer - &mean * mean.transpose() * count) / (count - 1.0);

    let expected: Vec<f64> = bands.high.iter().map(|&h| 1.0 / basis.lambdas()[h]).collect();
    let mut high_dev = 0.0_f64;
    let mut mid_dev = 0.0_f64;
    let mut cross = 0.0_f64;
    for i in 0..k {
        for j in 0..k {
            let c = cov[(i, j)];
            match (i < n_high, j < n_high) {
                (true, true) => {
                    let target = if i == j { expected[i] } else { 0.0 };
                    let scale = (expected[i] * expected[j]).sqrt();
                    high_dev = high_dev.max((c - target).abs() / scale);
                }
                (false, false) => {
                    let target = if i == j { 1.0 } else { 0.0 };
                    mid_dev = mid_dev.max((c - target).abs());
                }
                _ => cross = cross.max(c.abs()),
            }
        }
    }
    Ok(CovarianceCheck {
        high_deviation: high_dev,
        mid_deviation: mid_dev,
        cross_max: cross,
        empty_band: n_high == 0,
        expected_high_variances: expected,
        num_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gft::compute_fixed_gft;

    fn two_node() -> VariationOperator {
        VariationOperator::new(DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])).unwrap()
    }

    /// Path 0-1-2-3-4 with one chord, plus ridge.
    fn five_node() -> VariationOperator {
        let mut w = DMatrix::zeros(5, 5);
        for (i, j, v) in [(0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0), (3, 4, 1.0), (0, 3, 0.3)] {
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
        VariationOperator::laplacian(&w).unwrap().with_ridge(0.2)
    }

    #[test]
    fn two_node_constant_signal_is_reproduced() {
        let s = SamplingSet::new(vec![0], 2).unwrap();
        let b = compute_sf_gft(&two_node(), &s).unwrap();
        let x = sf_interpolate(&b, &DVector::from_vec(vec![3.5])).unwrap();
        assert!((x.values()[0] - 3.5).abs() < 1e-12 && (x.values()[1] - 3.5).abs() < 1e-12);
    }

    #[test]
    fn exact_bandlimited_signal_recovered() {
        let m = five_node();
        let gft = compute_fixed_gft(&m).unwrap();
        let s = SamplingSet::new(vec![0, 2, 4], 5).unwrap();
        let c = DVector::from_vec(vec![1.0, -0.7]);
        let x = gft.leading(2) * c;
        let rec = bandlimited_interpolate(gft.u(), SampleNorm::Identity, &s, 2, &linalg::subvector(&x, s.indices()))
            .unwrap();
        assert!((rec.values() - &x).amax() < 1e-12);
    }

    #[test]
    fn band_size_checked() {
        let m = five_node();
        let gft = compute_fixed_gft(&m).unwrap();
        let s = SamplingSet::new(vec![0, 2], 5).unwrap();
        assert!(matches!(
            fixed_gft_operator(&gft, &s, 3),
            Err(Error::InvalidBandSize { k: 3, set_size: 2 })
        ));
        assert!(fixed_gft_operator(&gft, &s, 0).is_err());
    }

    #[test]
    fn rank_deficient_normal_matrix_reported() {
        // basis whose first column vanishes on S
        let u = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let s = SamplingSet::new(vec![0, 1], 3).unwrap();
        assert!(matches!(
            bandlimited_operator(&u, SampleNorm::Identity, &s, 1),
            Err(Error::SingularNormalMatrix { k: 1 })
        ));
    }

    #[test]
    fn mmse_matches_explicit_inverse() {
        let m = five_node();
        let s = SamplingSet::new(vec![1, 3], 5).unwrap();
        let xs = DVector::from_vec(vec![0.4, -1.3]);
        let sigma = m.matrix().clone().try_inverse().unwrap();
        let sigma_cs = linalg::submatrix(&sigma, s.complement(), s.indices());
        let sigma_s = linalg::submatrix(&sigma, s.indices(), s.indices());
        let oracle = sigma_cs * sigma_s.try_inverse().unwrap() * &xs;
        let est = mmse_estimate(&m, &s, &xs).unwrap();
        assert!((est - &oracle).amax() < 1e-12 * oracle.amax().max(1.0));
        let b = compute_sf_gft(&m, &s).unwrap();
        let spectral = mmse_spectral(&b, &xs).unwrap();
        assert!((spectral - &oracle).amax() < 1e-9 * oracle.amax());
    }

    #[test]
    fn mmse_trivial_cases() {
        let m = five_node();
        let s = SamplingSet::new(vec![0, 4], 5).unwrap();
        assert_eq!(mmse_estimate(&m, &s, &DVector::zeros(2)).unwrap().amax(), 0.0);
        let d = VariationOperator::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1., 2., 3., 4.]))).unwrap();
        let s = SamplingSet::new(vec![2], 4).unwrap();
        assert_eq!(mmse_estimate(&d, &s, &DVector::from_vec(vec![5.0])).unwrap().amax(), 0.0);
    }

    #[test]
    fn mmse_spectral_low_band_weights() {
        // penalty weights (1 − λ) vanish as λ → 1 and reduce to the SF interpolator at λ = 0
        let m = five_node();
        let s = SamplingSet::new(vec![1, 3], 5).unwrap();
        let b = compute_sf_gft(&m, &s).unwrap();
        let xs = DVector::from_vec(vec![1.0, 0.5]);
        let sf = sf_interpolate(&b, &xs).unwrap();
        let spectral = mmse_spectral(&b, &xs).unwrap();
        let lam_max_low = b.bands().low.iter().map(|&k| b.lambdas()[k]).fold(0.0, f64::max);
        let sf_c = sf.restrict(s.complement());
        // difference bounded by the largest penalty
        assert!((spectral - &sf_c).norm() <= lam_max_low * sf_c.norm() * 2.0 + 1e-12);
    }

    #[test]
    fn error_decomposition_of_pure_high_vector() {
        let m = five_node();
        let s = SamplingSet::new(vec![0, 2], 5).unwrap();
        let b = compute_sf_gft(&m, &s).unwrap();
        let h = b.bands().high[0];
        let x = GraphSignal::new(b.u().column(h).into_owned()).unwrap();
        let d = error_decomposition(&b, &x).unwrap();
        assert!((d.err_q_sq - 2.0).abs() < 1e-10);
        assert!((d.high_energy - 1.0).abs() < 1e-10);
        assert!(d.mid_energy.abs() < 1e-10);

        let l = b.bands().low[1];
        let x = GraphSignal::new(b.u().column(l).into_owned()).unwrap();
        let d = error_decomposition(&b, &x).unwrap();
        assert!(d.err_q_sq < 1e-20 && d.high_energy < 1e-20 && d.mid_energy < 1e-20);
    }

    #[test]
    fn report_snr_for_perfect_reconstruction() {
        let m = five_node();
        let s = SamplingSet::new(vec![0, 2], 5).unwrap();
        let b = compute_sf_gft(&m, &s).unwrap();
        let x = GraphSignal::new(b.u().column(b.bands().low[0]).into_owned()).unwrap();
        let r = reconstruction_report(&b, &x).unwrap();
        assert!(r.snr_db > 200.0);
        assert!(r.err_q_norm_sq < 1e-20);
    }

    struct Oracle {
        set: SamplingSet,
        signals: Vec<DVector<f64>>,
    }

    impl Reconstructor for Oracle {
        fn set(&self) -> &SamplingSet {
            &self.set
        }
        fn reconstruct(&self, samples: &DVector<f64>) -> Result<DVector<f64>> {
            Ok(self
                .signals
                .iter()
                .find(|x| linalg::subvector(x, self.set.indices()) == *samples)
                .cloned()
                .unwrap())
        }
    }

    struct Zero(SamplingSet);

    impl Reconstructor for Zero {
        fn set(&self) -> &SamplingSet {
            &self.0
        }
        fn reconstruct(&self, samples: &DVector<f64>) -> Result<DVector<f64>> {
            let mut out = DVector::zeros(self.0.n());
            for (a, &i) in self.0.indices().iter().enumerate() {
                out[i] = samples[a];
            }
            Ok(out)
        }
    }

    #[test]
    fn err_metric_perfect_and_zero_reconstructors() {
        let signals = vec![
            DVector::from_vec(vec![1.0, 2.0, 0.0, -1.0]),
            DVector::from_vec(vec![0.5, 0.5, 3.0, 1.0]),
        ];
        let sets = [
            SamplingSet::new(vec![0, 2], 4).unwrap(),
            SamplingSet::new(vec![1, 3], 4).unwrap(),
        ];
        let perfect: Vec<Oracle> = sets
            .iter()
            .map(|s| Oracle {
                set: s.clone(),
                signals: signals.clone(),
            })
            .collect();
        let r = err_metric(&perfect, &signals).unwrap();
        assert_eq!(r.err, 0.0);
        assert_eq!(r.snr_db, f64::INFINITY);
        assert_eq!(serde_json::to_value(&r).unwrap()["snr_db"], "inf");

        let zeros: Vec<Zero> = sets.iter().cloned().map(Zero).collect();
        let r = err_metric(&zeros, &signals).unwrap();
        // hand computation: ‖x‖² = 6, 10.5
        // S0 = {0,2}: miss {1,3}: 5/6, 1.25/10.5 ; S1 = {1,3}: miss {0,2}: 1/6, 9.25/10.5
        let expected = ((5.0 / 6.0 + 1.25 / 10.5) / 2.0 + (1.0 / 6.0 + 9.25 / 10.5) / 2.0) / 2.0;
        assert!((r.err - expected).abs() < 1e-15);
        assert!((r.snr_db - (-10.0 * expected.log10())).abs() < 1e-12);
    }

    #[test]
    fn err_metric_errors() {
        let signals = vec![DVector::from_vec(vec![0.0, 0.0, 0.0])];
        let zeros = vec![Zero(SamplingSet::new(vec![0], 3).unwrap())];
        assert!(matches!(err_metric(&zeros, &signals), Err(Error::ZeroSignal { index: 0 })));
        let none: Vec<Zero> = Vec::new();
        assert!(matches!(err_metric(&none, &signals), Err(Error::EmptyPartition)));
    }

    #[test]
    fn covariance_check_identity_operator_has_empty_high_band() {
        let m = VariationOperator::new(DMatrix::identity(4, 4)).unwrap();
        let s = SamplingSet::new(vec![0], 4).unwrap();
        let c = high_freq_covariance_check(&m, &s, 1000, 1).unwrap();
        assert!(c.empty_band);
        assert_eq!(c.high_deviation, 0.0);
    }

    #[test]
    fn covariance_check_single_sample_vertex() {
        let m = five_node();
        let s = SamplingSet::new(vec![2], 5).unwrap();
        let c = high_freq_covariance_check(&m, &s, 50_000, 3).unwrap();
        assert_eq!(c.expected_high_variances.len(), 1);
        assert!(c.high_deviation < 0.05, "{c:?}");
    }
}
