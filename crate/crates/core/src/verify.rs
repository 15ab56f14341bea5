//! Self-check suite run by `sfgft verify`: residuals and deviations of the
//! folding, error-decomposition, covariance, MMSE and objective identities on a
//! user-supplied operator and sampling set.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::Result;
use crate::gft::{compute_sf_gft, GraphSignal, SamplingSet, VariationOperator};
use crate::linalg;
use crate::reconstruct::{error_decomposition, high_freq_covariance_check, mmse_estimate, mmse_spectral};
use crate::rng::{item_rng, streams};
use crate::sampling::exact_objective;

pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
pub const MONTE_CARLO_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn measured(name: &str, value: f64, tolerance: f64) -> Self {
        let status = if value <= tolerance { Status::Pass } else { Status::Fail };
        Self {
            name: name.into(),
            value,
            tolerance,
            status,
            note: None,
        }
    }

    fn skipped(name: &str, tolerance: f64, note: &str) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            tolerance,
            status: Status::Skipped,
            note: Some(note.into()),
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Random signals for the error identity and MMSE checks.
    pub trials: usize,
    /// Monte-Carlo draws for the covariance check.
    pub mc_draws: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub set_size: usize,
    pub norm: f64,
    pub bands: [usize; 3],
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn random_vector(len: usize, seed: u64, index: u64) -> DVector<f64> {
    let mut rng = item_rng(seed, streams::GRAPHS, index);
    DVector::from_fn(len, |_, _| StandardNormal.sample(&mut rng))
}

fn max_rel(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let scale = a.amax().max(b.amax());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).amax() / scale
    }
}

pub fn run_verification(m: &VariationOperator, set: &SamplingSet, opts: &VerifyOptions) -> Result<VerifyReport> {
    let n = m.n();
    let basis = compute_sf_gft(m, set)?;
    let norm = m.spectral_norm()?;
    let q = basis.inner_product().to_dense();
    let u = basis.u();
    let lambdas = basis.lambdas();
    let j = DMatrix::from_diagonal(&set.folding_signs());
    let mm = m.matrix();
    let mut checks = Vec::new();

    let eig = mm * u - &q * u * DMatrix::from_diagonal(lambdas);
    let ju = &j * u;
    let folded = lambdas.map(|l| 2.0 - l);
    let fold = mm * &ju - &q * &ju * DMatrix::from_diagonal(&folded);
    let col_max = |r: &DMatrix<f64>| r.column_iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
    checks.push(Check::measured("eigen_residual", col_max(&eig) / norm, RESIDUAL_TOLERANCE));
    checks.push(Check::measured("folding_residual", col_max(&fold) / norm, RESIDUAL_TOLERANCE));
    let gram = u.transpose() * &q * u - DMatrix::identity(n, n);
    checks.push(Check::measured("q_orthonormality", linalg::max_abs(&gram), RESIDUAL_TOLERANCE));
    let sym = (0..n)
        .map(|k| (lambdas[k] + lambdas[n - 1 - k] - 2.0).abs())
        .fold(0.0_f64, f64::max);
    checks.push(Check::measured("spectrum_symmetry", sym, RESIDUAL_TOLERANCE));
    let flip = u.transpose() * &q * &j * u;
    let involution = &flip * &flip - DMatrix::identity(n, n);
    checks.push(Check::measured("folding_involution", linalg::max_abs(&involution), RESIDUAL_TOLERANCE));

    let coupling = linalg::submatrix(mm, set.indices(), set.complement());
    let rank = linalg::numerical_rank(&coupling, 1e-10);
    let bands = basis.bands();
    let band_sizes = [bands.low.len(), bands.mid.len(), bands.high.len()];
    if rank == set.len() {
        let ok = bands.low.len() == set.len() && bands.high.len() == set.len();
        let mut c = Check::measured("band_cardinality", if ok { 0.0 } else { 1.0 }, 0.0);
        c.note = Some(format!("|L|={} |Mid|={} |H|={}", band_sizes[0], band_sizes[1], band_sizes[2]));
        checks.push(c);
    } else {
        checks.push(Check::skipped(
            "band_cardinality",
            0.0,
            &format!("rank(M_SSc) = {rank} < |S| = {}", set.len()),
        ));
    }

    if rank == set.len() {
        let mut worst = 0.0_f64;
        for t in 0..opts.trials {
            let x = GraphSignal::new(random_vector(n, opts.seed, t as u64))?;
            let d = error_decomposition(&basis, &x)?;
            let denom = d.err_q_sq.abs().max(d.predicted().abs());
            if denom > 0.0 {
                worst = worst.max((d.err_q_sq - d.predicted()).abs() / denom);
            }
        }
        checks.push(Check::measured("error_identity", worst, RESIDUAL_TOLERANCE));
    } else {
        checks.push(Check::skipped("error_identity", RESIDUAL_TOLERANCE, "requires rank(M_SSc) = |S|"));
    }

    let mut worst = 0.0_f64;
    for t in 0..opts.trials {
        let xs = random_vector(set.len(), opts.seed, (opts.trials + t) as u64);
        let direct = mmse_estimate(m, set, &xs)?;
        let spectral = mmse_spectral(&basis, &xs)?;
        worst = worst.max(max_rel(&direct, &spectral));
    }
    checks.push(Check::measured("mmse_equivalence", worst, RESIDUAL_TOLERANCE));

    if set.len() <= n - set.len() {
        let exact = exact_objective(m, set)?;
        // σ(L_S⁻¹ M_SSᶜ L_Sᶜ⁻ᵀ) = σ(Q_S^{-1/2} M_SSᶜ Q_Sᶜ^{-1/2}): the factors differ by orthogonal matrices
        let ip = basis.inner_product();
        let left = ip
            .sampled_cholesky()
            .l()
            .solve_lower_triangular(&coupling)
            .expect("triangular factor of a PD block");
        let whitened = ip
            .complement_cholesky()
            .l()
            .solve_lower_triangular(&left.transpose())
            .expect("triangular factor of a PD block");
        let via_svd = 1.0 - linalg::sigma_min(&whitened);
        let via_fold = 2.0 - lambdas[n - set.len()];
        let dev = (exact - via_svd).abs().max((exact - via_fold).abs());
        checks.push(
            Check::measured("objective_identity", dev, RESIDUAL_TOLERANCE)
                .with_note(format!("lambda_|S| = {exact}")),
        );
    } else {
        checks.push(Check::skipped("objective_identity", RESIDUAL_TOLERANCE, "requires |S| <= |Sc|"));
    }

    if opts.mc_draws >= 2 {
        let c = high_freq_covariance_check(m, set, opts.mc_draws, opts.seed)?;
        let note = format!("{} draws", c.num_samples);
        checks.push(Check::measured("high_band_covariance", c.high_deviation, MONTE_CARLO_TOLERANCE).with_note(note.clone()));
        checks.push(Check::measured("mid_band_covariance", c.mid_deviation, MONTE_CARLO_TOLERANCE).with_note(note.clone()));
        checks.push(Check::measured("band_cross_covariance", c.cross_max, MONTE_CARLO_TOLERANCE).with_note(note));
    } else {
        checks.push(Check::skipped("high_band_covariance", MONTE_CARLO_TOLERANCE, "Monte-Carlo disabled"));
    }

    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Ok(VerifyReport {
        n,
        set_size: set.len(),
        norm,
        bands: band_sizes,
        checks,
        passed,
    })
}
