use photon_trajectories::analysis::{
    read_rows_csv, run_sweep, Experiment, SweepResult, SweepSpec,
};
use photon_trajectories::engine::{Execution, NoiseKind};
use photon_trajectories::Error;

fn spec(experiment: Experiment, kind: NoiseKind) -> SweepSpec {
    SweepSpec::new(experiment, kind, vec![1e-3, 1e-2, 1e-1], 128, 11)
}

#[test]
fn x_gate_sweep_rows() {
    let r = run_sweep(&spec(Experiment::XGateGbqc, NoiseKind::Dep), Execution::Parallel).unwrap();
    // two diagonal entries, trace, herald, discarded, hellinger, fidelity
    assert_eq!(r.rows.len(), 3 * 7);
    assert!(r.rows.iter().all(|row| row.scenario == "dep"));
    let h = r.series("hellinger");
    assert_eq!(h.len(), 3);
    assert!(h.windows(2).all(|w| w[1].0 > w[0].0));
    let (f, _) = r.value(1e-1, "fidelity").unwrap();
    assert!((f - (1.0 - h[2].0 * h[2].0).powi(2)).abs() < 1e-15);
}

#[test]
fn bell_sweep_reports_the_coherence() {
    let r = run_sweep(&spec(Experiment::BellGbqc, NoiseKind::Loss), Execution::Parallel).unwrap();
    assert_eq!(r.rows.len(), 3 * (4 + 1 + 5));
    let (c, s) = r.value(1e-3, "rho_03_re").unwrap();
    assert!((c - 0.5).abs() < 0.05 && s >= 0.0);
    let (hp, _) = r.value(1e-3, "herald_probability").unwrap();
    assert!((hp - 1.0 / 16.0).abs() < 0.01);
}

#[test]
fn raw_flag_changes_only_the_normalization() {
    let mut s = SweepSpec::new(Experiment::XGateMbqc, NoiseKind::Both, vec![1e-2], 64, 2);
    let normed = run_sweep(&s, Execution::Parallel).unwrap();
    s.raw = true;
    let raw = run_sweep(&s, Execution::Parallel).unwrap();
    let (t_norm, _) = normed.value(1e-2, "trace").unwrap();
    let (t_raw, _) = raw.value(1e-2, "trace").unwrap();
    let (hp, _) = raw.value(1e-2, "herald_probability").unwrap();
    // the unnormalized trace carries the herald probability
    assert!((t_raw / t_norm - hp).abs() < 1e-12 * hp.max(1.0));
}

#[test]
fn csv_and_json_round_trips_are_bit_exact() {
    let r = run_sweep(&spec(Experiment::BellGbqc, NoiseKind::Both), Execution::Parallel).unwrap();
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    assert!(String::from_utf8_lossy(&csv).starts_with("p,scenario,observable,value,stderr\n"));
    let back = read_rows_csv(&csv[..]).unwrap();
    assert_eq!(back, r.rows);
    for (a, b) in back.iter().zip(&r.rows) {
        assert_eq!(a.value.0.to_bits(), b.value.0.to_bits());
        assert_eq!(a.stderr.0.to_bits(), b.stderr.0.to_bits());
    }
    assert_eq!(SweepResult::from_json(&r.to_json().unwrap()).unwrap(), r);
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let s = spec(Experiment::XGateMbqc, NoiseKind::Dep);
    let seq = run_sweep(&s, Execution::Sequential).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(5).build().unwrap();
    let par = pool.install(|| run_sweep(&s, Execution::Parallel).unwrap());
    assert_eq!(seq, par);
}

#[test]
fn vqa_sweep_rows() {
    let mut s = SweepSpec::new(Experiment::Vqa, NoiseKind::Loss, vec![1e-3], 16, 4);
    s.restarts = 2;
    let r = run_sweep(&s, Execution::Parallel).unwrap();
    let names: Vec<&str> = r.rows.iter().map(|row| row.observable.as_str()).collect();
    assert_eq!(names, ["approximation_ratio", "relative_error", "final_energy"]);
}

#[test]
fn invalid_specs_are_config_errors() {
    let mut s = spec(Experiment::XGateGbqc, NoiseKind::Dep);
    s.probabilities = vec![0.2, 0.1];
    let e = run_sweep(&s, Execution::Parallel).unwrap_err();
    assert!(e.is_config());
    s.probabilities = vec![0.7];
    assert!(matches!(run_sweep(&s, Execution::Parallel), Err(Error::Probability(_))));
    assert!(SweepSpec::from_json("{").unwrap_err().is_config());
}

#[test]
fn simulation_errors_name_the_experiment_and_probability() {
    let e = Error::HeraldNeverSucceeded(10).context("bell-gbqc (loss) at p = 0.1");
    assert!(!e.is_config());
    assert!(matches!(e.root(), Error::HeraldNeverSucceeded(10)));
    let text = e.to_string();
    assert!(text.contains("bell-gbqc") && text.contains("p = 0.1"), "{text}");
}
