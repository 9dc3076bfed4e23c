use ngppca::rng::RngStream;
use ngppca::simulation::{matrix_checksum, run_benchmark, simulate_isotropic, BenchmarkConfig, Method, SimConfig};
use ngppca_oracle::stats::{mean, mean_se};

#[test]
fn large_sample_spectrum_is_two_block() {
    let cfg = SimConfig { n: 100_000, p: 5, d_true: 2, snr: 4.0, seed: 31 };
    let x = simulate_isotropic(&cfg, &mut RngStream::new(31, 0)).unwrap().center();
    let l = x.spectrum().unwrap();
    let want = [6.0, 6.0, 1.0, 1.0, 1.0];
    for (got, want) in l.eigenvalues().iter().zip(want) {
        assert!((got - want).abs() < 0.02 * want, "{:?}", l.eigenvalues());
    }
}

#[test]
fn columns_have_zero_mean() {
    let cfg = SimConfig { n: 100_000, p: 5, d_true: 2, snr: 4.0, seed: 32 };
    let x = simulate_isotropic(&cfg, &mut RngStream::new(32, 0)).unwrap();
    for col in x.values().column_iter() {
        let v: Vec<f64> = col.iter().copied().collect();
        assert!(mean(&v).abs() < 5.0 * mean_se(&v), "column mean {}", mean(&v));
    }
}

#[test]
fn same_stream_same_matrix() {
    let cfg = SimConfig { n: 30, p: 8, d_true: 3, snr: 5.0, seed: 33 };
    let a = simulate_isotropic(&cfg, &mut RngStream::new(33, 4)).unwrap();
    let b = simulate_isotropic(&cfg, &mut RngStream::new(33, 4)).unwrap();
    let c = simulate_isotropic(&cfg, &mut RngStream::new(33, 5)).unwrap();
    assert_eq!(a, b);
    assert_ne!(matrix_checksum(a.values()), matrix_checksum(c.values()));
}

#[test]
fn replication_datasets_are_stable() {
    let config = BenchmarkConfig { master_seed: 34, ..Default::default() };
    let a = config.replication_dataset(40, 20.0, 3).unwrap();
    let b = config.replication_dataset(40, 20.0, 3).unwrap();
    assert_eq!(matrix_checksum(a.values()), matrix_checksum(b.values()));
    let other_cell = config.replication_dataset(40, 10.0, 3).unwrap();
    assert_ne!(matrix_checksum(a.values()), matrix_checksum(other_cell.values()));
}

#[test]
fn easy_cell_is_solved_by_every_method() {
    let config = BenchmarkConfig {
        n_values: vec![200],
        snr_values: vec![50.0],
        p: 10,
        d_true: 2,
        replications: 1,
        master_seed: 35,
        ..Default::default()
    };
    let table = run_benchmark(&config).unwrap();
    assert_eq!(table.cells.len(), Method::ALL.len());
    for cell in &table.cells {
        assert_eq!(cell.accuracy(), 100.0, "{}", cell.method);
    }
}

#[test]
fn repeated_runs_give_identical_tables() {
    let config = BenchmarkConfig {
        n_values: vec![30, 60],
        snr_values: vec![3.0, 10.0],
        p: 12,
        d_true: 3,
        replications: 4,
        master_seed: 36,
        ..Default::default()
    };
    let a = run_benchmark(&config).unwrap();
    let b = run_benchmark(&BenchmarkConfig { threads: Some(3), ..config.clone() }).unwrap();
    assert_eq!(a.cells, b.cells);
    assert_eq!(a.to_csv(), b.to_csv());
    for cell in &a.cells {
        assert_eq!(cell.correct + cell.under + cell.over + cell.failed, cell.replications);
    }
}

#[test]
fn accuracy_grows_with_snr() {
    let snrs = vec![1.5, 3.0, 5.0, 10.0];
    let config = BenchmarkConfig {
        n_values: vec![60],
        snr_values: snrs.clone(),
        p: 20,
        d_true: 5,
        replications: 20,
        master_seed: 37,
        ..Default::default()
    };
    let table = run_benchmark(&config).unwrap();
    for method in Method::ALL {
        let acc: Vec<f64> = snrs.iter().map(|&s| table.cell(method, 60, s).unwrap().accuracy()).collect();
        for w in acc.windows(2) {
            assert!(w[1] >= w[0] - 10.0, "{method}: {acc:?}");
        }
    }
}

#[test]
fn csv_has_long_format_header() {
    let config = BenchmarkConfig {
        n_values: vec![40],
        snr_values: vec![5.0],
        p: 10,
        d_true: 2,
        replications: 2,
        master_seed: 38,
        ..Default::default()
    };
    let csv = run_benchmark(&config).unwrap().to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("method,n,snr,replications,accuracy,under,over"));
    assert_eq!(lines.count(), Method::ALL.len());
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
}
