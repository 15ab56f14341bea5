use nalgebra::DVector;
use sfgft::experiment::{
    build_graph, estimate_bandwidth, gen_field, run_table1, sample_covariance, write_artifacts, ExperimentConfig,
};
use sfgft::gft::compute_fixed_gft;
use sfgft::linalg;
use sfgft::sampling::{partition_baseline, partition_greedy, Baseline, Objective};

fn tiny_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::with_seed(5);
    c.n_sensors = 40;
    c.n_train = 400;
    c.n_test = 30;
    c.sigmas = vec![1.0];
    c.p_values = vec![2, 4];
    c.random_seeds = vec![0, 1];
    c.probe_p = 4;
    c.frequency_steps = 10;
    c
}

#[test]
fn full_size_graph_is_connected_and_partitions_evenly() {
    let config = ExperimentConfig::with_seed(1);
    let (field, train) = gen_field(&config, 1.0, 0).unwrap();
    assert_eq!(train.shape(), (5000, 500));
    let m = build_graph(&train, &field.locations, 0.3, Some(1e-3)).unwrap();
    assert_eq!(m.connected_components(), 1);
    let min_eig = linalg::symmetric_eigenvalues_sorted(m.matrix()).unwrap()[0];
    assert!(min_eig >= 1e-3 * (1.0 - 1e-6));

    let greedy = partition_greedy(&m, 5, Objective::ApproxZeroOrder).unwrap();
    assert!(greedy.subsets().iter().all(|s| s.len() == 100));
    let random = partition_baseline(&m, 5, Baseline::Random { seed: 3 }).unwrap();
    assert!(random.subsets().iter().all(|s| s.len() == 100));
    let fixed = partition_baseline(&m, 5, Baseline::FixedGftGreedy { bandwidth: 50 }).unwrap();
    assert!(fixed.subsets().iter().all(|s| s.len() == 100));
}

#[test]
fn sample_covariance_tracks_kernel_at_n50() {
    let mut config = ExperimentConfig::with_seed(2);
    config.n_sensors = 50;
    let (field, train) = gen_field(&config, 1.0, 0).unwrap();
    let cov = sample_covariance(&train);
    assert!(linalg::max_abs(&(cov - &field.cov)) < 0.1);
}

#[test]
fn bandwidth_estimate_recovers_exact_band() {
    let config = tiny_config();
    let (field, train) = gen_field(&config, 1.0, 0).unwrap();
    let m = build_graph(&train, &field.locations, config.radius, None).unwrap();
    let gft = compute_fixed_gft(&m).unwrap();
    let k0 = 4;
    let signals: Vec<DVector<f64>> = (0..20)
        .map(|i| {
            let c = DVector::from_fn(k0, |j, _| ((i * 7 + j * 3) % 5) as f64 - 1.5 + 0.1 * j as f64);
            gft.leading(k0) * c
        })
        .collect();
    let probe = partition_greedy(&m, 4, Objective::ApproxZeroOrder).unwrap();
    let curve = estimate_bandwidth(&m, &signals, &probe, 1..=8).unwrap();
    assert_eq!(curve.k_opt, k0);
    let at_k0 = curve.points.iter().find(|p| p.0 == k0).unwrap().1;
    assert!(at_k0 < 1e-20);
    let again = estimate_bandwidth(&m, &signals, &probe, 1..=8).unwrap();
    assert_eq!(curve.to_csv(), again.to_csv());
}

#[test]
fn artifacts_are_byte_identical_across_thread_counts() {
    let config = tiny_config();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let out = pool.install(|| run_table1(&config).unwrap());
        let dir = tempfile::tempdir().unwrap();
        write_artifacts(&out, dir.path()).unwrap();
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    let a = run(1);
    let b = run(4);
    let names: Vec<&str> = a.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(
        names,
        [
            "bandwidth_curve.csv",
            "frequency_curves.csv",
            "metadata.json",
            "partition_2.json",
            "partition_4.json",
            "table1.csv"
        ]
    );
    assert_eq!(a, b);
}

#[test]
fn config_json_requires_seed_and_rejects_unknown_fields() {
    assert!(serde_json::from_str::<ExperimentConfig>("{}").is_err());
    assert!(serde_json::from_str::<ExperimentConfig>(r#"{"seed": 1, "sensors": 5}"#).is_err());
    let c: ExperimentConfig = serde_json::from_str(r#"{"seed": 9, "p_values": [5]}"#).unwrap();
    assert_eq!(c.n_sensors, 500);
    assert_eq!(c.n_train, 5000);
    assert_eq!(c.n_test, 500);
    assert_eq!(c.radius, 0.3);
    c.validate().unwrap();

    let mut bad = ExperimentConfig::with_seed(1);
    bad.p_values = vec![1];
    assert!(bad.validate().is_err());
}
