use std::f64::consts::PI;

use photon_trajectories::engine::{run_trajectories, Execution, NoiseKind, NoiseModel, Normalization, RunConfig};
use photon_trajectories::vqa::*;
use proptest::prelude::*;

fn cost() -> CostOperator {
    maxcut_cost(&Graph::square()).unwrap()
}

/// Product ansatz energy by hand: rotations about one axis add, so qubit q
/// ends with `⟨Z⟩ = cos(θ_q + θ'_q)`.
fn product_energy(params: &[f64]) -> f64 {
    let z: Vec<f64> = (0..4).map(|q| (params[q] + params[q + 4]).cos()).collect();
    Graph::square().edges.iter().map(|&(i, j)| z[i] * z[j]).sum()
}

#[test]
fn ansatz_layout() {
    let c = RingAnsatz::default().circuit(&[0.1; 8]).unwrap();
    assert_eq!(c.mode_count, 8);
    assert_eq!(c.input.counts(), &[1, 0, 1, 0, 1, 0, 1, 0]);
    assert_eq!(c.elements.len(), 12);
    assert!(RingAnsatz::default().circuit(&[0.0; 7]).is_err());
    assert!(RingAnsatz { qubits: 1, entangle: true }.circuit(&[0.0; 2]).is_err());
}

#[test]
fn product_ansatz_examples() {
    let a = RingAnsatz { qubits: 4, entangle: false };
    let e = evaluate_energy(&a, &[0.0; 8], &cost(), &NoiseModel::noiseless(), 1, 0).unwrap();
    assert!((e - 4.0).abs() < 1e-12);
    let x = [PI, 0.0, PI, 0.0, 0.0, 0.0, 0.0, 0.0];
    let r = run_trajectories(&a.circuit(&x).unwrap(), &NoiseModel::noiseless(), &RunConfig::new(1, 0)).unwrap();
    assert!((r.entries[(0b1010, 0b1010)].re - 1.0).abs() < 1e-12);
    let e = evaluate_energy(&a, &x, &cost(), &NoiseModel::noiseless(), 1, 0).unwrap();
    assert!((e + 4.0).abs() < 1e-12);
}

#[test]
fn ring_ansatz_reaches_the_optimum() {
    let a = RingAnsatz::default();
    // the coupler ring postselects onto |0000⟩ and |1111⟩
    let e = evaluate_energy(&a, &[0.0; 8], &cost(), &NoiseModel::noiseless(), 1, 0).unwrap();
    assert!((e - 4.0).abs() < 1e-12);
    let x = [0.0, 0.0, 0.0, 0.0, 0.0, PI, 0.0, PI];
    let e = evaluate_energy(&a, &x, &cost(), &NoiseModel::noiseless(), 1, 0).unwrap();
    assert!((e + 4.0).abs() < 1e-12);
}

#[test]
fn evaluation_is_deterministic() {
    let a = RingAnsatz::default();
    let x = [0.3, 1.1, -0.4, 2.0, 0.7, 0.2, 1.5, -1.0];
    let noise = NoiseModel::combined(0.01);
    let e1 = evaluate_energy(&a, &x, &cost(), &noise, 200, 42).unwrap();
    let e2 = evaluate_energy(&a, &x, &cost(), &noise, 200, 42).unwrap();
    let e3 = evaluate_energy(&a, &x, &cost(), &noise, 200, 43).unwrap();
    assert_eq!(e1.to_bits(), e2.to_bits());
    assert_ne!(e1, e3);
}

#[test]
fn noiseless_optimization_converges() {
    let run = optimize(&Graph::square(), &NoiseModel::noiseless(), &OptimizeConfig { seed: 3, ..Default::default() }).unwrap();
    assert!(run.relative_error < 1e-3, "{}", run.relative_error);
    assert!(run.trace.len() <= 500);
    for (k, t) in run.trace.iter().enumerate() {
        assert_eq!(t.step, k);
        assert!((t.relative_error - ((-4.0 - t.energy) / -4.0).abs()).abs() < 1e-15);
    }
    assert_eq!(run.optimum, -4.0);
}

#[test]
fn mismatched_graph_is_rejected() {
    let a = RingAnsatz::default();
    let g = Graph::new(3, vec![(0, 1)]).unwrap();
    let r = optimize_with(&a, &NelderMead::default(), &g, &NoiseModel::noiseless(), &OptimizeConfig::default());
    assert!(r.is_err());
}

#[test]
fn config_and_outputs() {
    let text = r#"{"probabilities": [0.001], "noise_types": ["loss"], "restarts": 2, "n_samples": 20, "max_iters": 30, "seed": 5}"#;
    let cfg = VqaConfig::from_json(text).unwrap();
    assert_eq!(cfg.graph, Graph::square());
    assert!(cfg.noiseless);
    assert_eq!(cfg.scenarios().len(), 2);
    assert!(VqaConfig::from_json(r#"{"probabilities": [0.6]}"#).is_err());
    assert!(VqaConfig::from_json(r#"{"probabilities": [], "bogus": 1}"#).is_err());

    let seq = run_vqa(&cfg, Execution::Sequential).unwrap();
    let par = run_vqa(&cfg, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    assert_eq!(seq.runs.len(), 4);
    let mut csv = Vec::new();
    seq.write_trace_csv(&mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "scenario,p,restart,step,energy,relative_error");
    assert_eq!(lines.count(), seq.runs.iter().map(|r| r.run.trace.len()).sum::<usize>());
    let summary: serde_json::Value = serde_json::from_str(&seq.summary_json().unwrap()).unwrap();
    assert_eq!(summary["summary"].as_array().unwrap().len(), 2);

    let dir = tempfile::tempdir().unwrap();
    seq.write_to(dir.path()).unwrap();
    assert!(dir.path().join("vqa_trace.csv").exists());
    assert!(dir.path().join("vqa_summary.json").exists());
}

#[test]
fn noise_kinds_parse() {
    for k in NoiseKind::ALL {
        assert_eq!(k.label().parse::<NoiseKind>().unwrap(), k);
    }
    assert!("none".parse::<NoiseKind>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_ansatz_matches_closed_form(x in proptest::collection::vec(-PI..PI, 8)) {
        let a = RingAnsatz { qubits: 4, entangle: false };
        let e = evaluate_energy(&a, &x, &cost(), &NoiseModel::noiseless(), 1, 0).unwrap();
        prop_assert!((e - product_energy(&x)).abs() < 1e-10);
    }

    #[test]
    fn energies_are_bounded_and_postselection_is_a_contraction(
        x in proptest::collection::vec(-PI..PI, 8),
        p in 0.0..0.05f64,
        seed in any::<u64>(),
    ) {
        let a = RingAnsatz::default();
        let c = a.circuit(&x).unwrap();
        let raw = run_trajectories(&c, &NoiseModel::combined(p), &RunConfig::new(16, seed)).unwrap();
        prop_assert!(raw.trace() <= 1.0 + 1e-12);
        prop_assert!(raw.discarded_weight >= -1e-12);
        let rho = run_trajectories(&c, &NoiseModel::combined(p), &RunConfig::new(16, seed).normalized(Normalization::Trace)).unwrap();
        let e = energy(&rho, &cost()).unwrap();
        prop_assert!((-4.0 - 1e-9..=4.0 + 1e-9).contains(&e));
    }
}
