use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::json;

use sfgft::experiment::{run_table1, write_artifacts, ExperimentConfig};
use sfgft::gft::{compute_fixed_gft, compute_sf_gft, SamplingSet, VariationOperator, BAND_EPSILON};
use sfgft::io::{
    read_sampling_set, read_to_string, read_variation_operator, read_vector_csv, sampling_set_to_json, to_json_pretty,
    vector_to_csv, write_atomic,
};
use sfgft::io::matrix_to_csv;
use sfgft::reconstruct::{fixed_gft_operator, mmse_estimate, sf_interpolate};
use sfgft::sampling::{brute_force_select, greedy_select_traced, partition_baseline, partition_greedy, Baseline, Objective};
use sfgft::verify::{run_verification, Status, VerifyOptions};
use sfgft::Error;

#[derive(Parser, Debug)]
#[command(name = "sfgft", version, about = "Sampling and reconstruction with spectral-folding graph Fourier transforms")]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "SFGFT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    /// Variation operator as dense CSV.
    #[arg(long)]
    matrix: PathBuf,

    /// Add `ridge * I` to the operator after loading.
    #[arg(long)]
    ridge: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the sampling-set-adaptive basis: U.csv, lambdas.csv, bands.json.
    Gft {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// JSON array of sampled vertex ids.
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Greedy (or exhaustive) sampling-set selection: set.json, select_trace.csv.
    Select {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = Objective::ApproxZeroOrder)]
        objective: Objective,
        /// Enumerate every subset instead of selecting greedily.
        #[arg(long)]
        brute_force: bool,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Representative sampling partition: partition.json.
    Partition {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = Objective::ApproxZeroOrder)]
        objective: Objective,
        #[arg(long, value_enum, default_value_t = Partitioner::Greedy)]
        partitioner: Partitioner,
        /// Bandwidth for the fixed-gft partitioner.
        #[arg(long)]
        bandwidth: Option<usize>,
        /// Required by the random partitioner.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Interpolate a full signal from samples on a set: x_hat.csv.
    Reconstruct {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        set: PathBuf,
        /// Sample values, one per line, in the order of the set file.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Sf)]
        method: Method,
        /// Bandwidth for the fixed-gft method.
        #[arg(long)]
        bandwidth: Option<usize>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the identity and Monte-Carlo checks: verify.json.
    Verify {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        set: PathBuf,
        /// Random signals for the deterministic identities.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Monte-Carlo draws for the covariance checks (0 disables).
        #[arg(long, default_value_t = 200_000)]
        mc_draws: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the sensor-network comparison experiment from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Partitioner {
    Greedy,
    Random,
    FixedGft,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    Sf,
    Mmse,
    FixedGft,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_validation() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Tags an error with the input that caused it.
fn context<T>(r: sfgft::Result<T>, what: impl Display) -> Result<T, Failure> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{what}: {}", f.message);
        f
    })
}

fn load_matrix(args: &MatrixArgs) -> Result<VariationOperator, Failure> {
    let m = context(read_variation_operator(&args.matrix), format!("--matrix {}", args.matrix.display()))?;
    match args.ridge {
        None => Ok(m),
        Some(r) if r.is_finite() && r >= 0.0 => Ok(m.with_ridge(r)),
        Some(r) => Err(invalid(format!("--ridge must be a finite non-negative number, got {r}"))),
    }
}

fn load_set(path: &Path, n: usize) -> Result<SamplingSet, Failure> {
    context(read_sampling_set(path, n), format!("--set {}", path.display()))
}

fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> Result<(), Failure> {
    let path = dir.join(name);
    write_atomic(&path, bytes.as_ref())?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| invalid(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Gft { matrix, set, out_dir } => {
            let m = load_matrix(&matrix)?;
            let s = load_set(&set, m.n())?;
            let basis = compute_sf_gft(&m, &s)?;
            let bands = basis.bands();
            let meta = json!({
                "epsilon": BAND_EPSILON,
                "set": s.indices(),
                "low": bands.low,
                "mid": bands.mid,
                "high": bands.high,
            });
            write(&out_dir, "U.csv", matrix_to_csv(basis.u()))?;
            write(&out_dir, "lambdas.csv", vector_to_csv(basis.lambdas()))?;
            write(&out_dir, "bands.json", to_json_pretty(&meta)?)?;
        }
        Command::Select {
            matrix,
            size,
            objective,
            brute_force,
            out_dir,
        } => {
            let m = load_matrix(&matrix)?;
            if brute_force {
                let (s, value) = brute_force_select(&m, size, objective)?;
                write(&out_dir, "set.json", sampling_set_to_json(&s)?)?;
                println!("objective {objective} = {value}");
            } else {
                let (s, steps) = greedy_select_traced(&m, size, objective)?;
                let mut trace = String::from("step,vertex,value\n");
                for (i, st) in steps.iter().enumerate() {
                    trace.push_str(&format!("{},{},{}\n", i + 1, st.vertex, sfgft::io::format_f64(st.value)));
                }
                write(&out_dir, "set.json", sampling_set_to_json(&s)?)?;
                write(&out_dir, "select_trace.csv", trace)?;
            }
        }
        Command::Partition {
            matrix,
            p,
            objective,
            partitioner,
            bandwidth,
            seed,
            out_dir,
        } => {
            let m = load_matrix(&matrix)?;
            let part = match partitioner {
                Partitioner::Greedy => partition_greedy(&m, p, objective)?,
                Partitioner::Random => {
                    let seed = seed.ok_or_else(|| invalid("--seed is required for the random partitioner"))?;
                    partition_baseline(&m, p, Baseline::Random { seed })?
                }
                Partitioner::FixedGft => {
                    let bandwidth =
                        bandwidth.ok_or_else(|| invalid("--bandwidth is required for the fixed-gft partitioner"))?;
                    partition_baseline(&m, p, Baseline::FixedGftGreedy { bandwidth })?
                }
            };
            write(&out_dir, "partition.json", to_json_pretty(&part)?)?;
        }
        Command::Reconstruct {
            matrix,
            set,
            samples,
            method,
            bandwidth,
            out_dir,
        } => {
            let m = load_matrix(&matrix)?;
            let s = load_set(&set, m.n())?;
            let xs = context(read_vector_csv(&samples), format!("--samples {}", samples.display()))?;
            if xs.len() != s.len() {
                return Err(invalid(format!(
                    "--samples {}: expected {} values, found {}",
                    samples.display(),
                    s.len(),
                    xs.len()
                )));
            }
            let x_hat: DVector<f64> = match method {
                Method::Sf => sf_interpolate(&compute_sf_gft(&m, &s)?, &xs)?.into_values(),
                Method::Mmse => {
                    let est = mmse_estimate(&m, &s, &xs)?;
                    let mut full = DVector::zeros(m.n());
                    for (k, &v) in s.indices().iter().enumerate() {
                        full[v] = xs[k];
                    }
                    for (k, &v) in s.complement().iter().enumerate() {
                        full[v] = est[k];
                    }
                    full
                }
                Method::FixedGft => {
                    let k = bandwidth.ok_or_else(|| invalid("--bandwidth is required for the fixed-gft method"))?;
                    fixed_gft_operator(&compute_fixed_gft(&m)?, &s, k)?.apply(&xs)?.into_values()
                }
            };
            write(&out_dir, "x_hat.csv", vector_to_csv(&x_hat))?;
        }
        Command::Verify {
            matrix,
            set,
            trials,
            mc_draws,
            seed,
            out_dir,
        } => {
            let m = load_matrix(&matrix)?;
            let s = load_set(&set, m.n())?;
            context(m.check_positive_definite(), format!("--matrix {}", matrix.matrix.display()))?;
            let report = run_verification(&m, &s, &VerifyOptions { trials, mc_draws, seed })?;
            for c in &report.checks {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skipped => "SKIP",
                };
                println!("[{tag}] {} = {:e} (tolerance {:e})", c.name, c.value, c.tolerance);
            }
            write(&out_dir, "verify.json", to_json_pretty(&report)?)?;
            if !report.passed {
                return Err(Failure {
                    code: 1,
                    message: "verification failed".into(),
                });
            }
        }
        Command::Experiment { config, out_dir } => {
            let label = format!("--config {}", config.display());
            let text = context(read_to_string(&config), &label)?;
            let cfg: ExperimentConfig = context(serde_json::from_str(&text).map_err(Error::from), &label)?;
            context(cfg.validate(), &label)?;
            let out = run_table1(&cfg)?;
            write_artifacts(&out, &out_dir)?;
            print!("{}", out.table.to_csv());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
