use nalgebra::DMatrix;
use photon_trajectories::circuits::{OpticalCircuit, PlacedElement};
use photon_trajectories::engine::{run_trajectories, NoiseModel, Normalization, RunConfig};
use photon_trajectories::fock::{FockVector, Occupation};
use photon_trajectories::gbqc::{
    h_gate_block, transpile, transpile_with, with_logical_input, x_gate_circuit, CzRealization,
    Gate, KnillCz, QubitCircuit, TranspileOptions,
};
use photon_trajectories::C64;
use proptest::prelude::*;

/// Minimal state-vector simulator, qubit 0 most significant.
mod qsim {
    use super::*;

    pub fn apply(state: &mut [C64], qubits: usize, gate: Gate) {
        let bit = |q: usize| 1usize << (qubits - 1 - q);
        let n = state.len();
        match gate {
            Gate::X(q) => {
                for i in 0..n {
                    if i & bit(q) == 0 {
                        state.swap(i, i | bit(q));
                    }
                }
            }
            Gate::H(q) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..n {
                    if i & bit(q) == 0 {
                        let (a, b) = (state[i], state[i | bit(q)]);
                        state[i] = (a + b) * s;
                        state[i | bit(q)] = (a - b) * s;
                    }
                }
            }
            Gate::Cz(a, b) => {
                for (i, x) in state.iter_mut().enumerate() {
                    if i & bit(a) != 0 && i & bit(b) != 0 {
                        *x = -*x;
                    }
                }
            }
            Gate::Cx(c, t) => {
                for i in 0..n {
                    if i & bit(c) != 0 && i & bit(t) == 0 {
                        state.swap(i, i | bit(t));
                    }
                }
            }
        }
    }

    pub fn unitary(qc: &QubitCircuit) -> DMatrix<C64> {
        let d = 1 << qc.qubits;
        let mut u = DMatrix::zeros(d, d);
        for b in 0..d {
            let mut s = vec![C64::new(0.0, 0.0); d];
            s[b] = C64::new(1.0, 0.0);
            for g in &qc.gates {
                apply(&mut s, qc.qubits, *g);
            }
            for (k, x) in s.into_iter().enumerate() {
                u[(k, b)] = x;
            }
        }
        u
    }
}

/// Heralded logical action: column `b` holds the amplitudes onto the
/// dual-rail outputs for logical input `b`, herald counts on the ancillas.
fn logical_action(c: &OpticalCircuit) -> DMatrix<C64> {
    let d = c.qubit_map.dim();
    let t = c.transfer().unwrap();
    let outputs: Vec<Occupation> = (0..d)
        .map(|b| {
            let q = c.qubit_map.basis_occupation(b, c.mode_count);
            let counts = q
                .counts()
                .iter()
                .zip(&c.herald)
                .map(|(a, h)| a + h.unwrap_or(0))
                .collect();
            Occupation::new(counts)
        })
        .collect();
    let mut a = DMatrix::zeros(d, d);
    for b in 0..d {
        let input = with_logical_input(c, b).input;
        let amps = FockVector::basis(input).amplitudes_onto(&t, &outputs).unwrap();
        for (k, x) in amps.into_iter().enumerate() {
            a[(k, b)] = x;
        }
    }
    a
}

/// Scale `c` with `action ≈ c·target`, fitted on the largest target entry.
fn fit_scale(action: &DMatrix<C64>, target: &DMatrix<C64>) -> C64 {
    let (mut best, mut at) = (0.0, (0, 0));
    for i in 0..target.nrows() {
        for j in 0..target.ncols() {
            if target[(i, j)].norm() > best {
                best = target[(i, j)].norm();
                at = (i, j);
            }
        }
    }
    action[at] / target[at]
}

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn hadamard() -> DMatrix<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[s, s, s, -s]).map(|x| C64::new(x, 0.0))
}

#[test]
fn x_gate_flips_both_basis_states() {
    let c = x_gate_circuit();
    assert_eq!(c.mode_count, 2);
    assert_eq!(c.elements, vec![PlacedElement::bs(0, 1, std::f64::consts::PI, 0.0)]);
    assert_eq!(c.input, Occupation::new(vec![1, 0]));
    let cfg = RunConfig::new(1, 0);
    let r0 = run_trajectories(&c, &NoiseModel::noiseless(), &cfg).unwrap();
    assert!((r0.entries[(1, 1)].re - 1.0).abs() < 1e-15);
    let r1 = run_trajectories(&with_logical_input(&c, 1), &NoiseModel::noiseless(), &cfg).unwrap();
    assert!((r1.entries[(0, 0)].re - 1.0).abs() < 1e-15);
}

#[test]
fn hadamard_block_is_the_real_hadamard() {
    let mut c = OpticalCircuit::new(2);
    c.qubit_map = photon_trajectories::fock::DualRailMap::consecutive(1);
    c.elements = h_gate_block();
    let t = c.transfer().unwrap();
    assert!(max_diff(t.matrix(), &hadamard()) < 1e-15);
    let a = logical_action(&c);
    assert!(max_diff(&a, &hadamard()) < 1e-15);
    c.elements.extend(h_gate_block());
    let id = DMatrix::identity(2, 2);
    assert!(max_diff(c.transfer().unwrap().matrix(), &id) < 1e-15);
}

#[test]
fn heralded_cz_block() {
    let block = KnillCz.cz_block();
    assert_eq!(block.ancilla_modes(), 4);
    assert_eq!(block.ancilla_input.iter().map(|&n| n as usize).sum::<usize>(), 2);
    let c = block.circuit(0);
    let a = logical_action(&c);
    let mut cz = DMatrix::identity(4, 4);
    cz[(3, 3)] = C64::new(-1.0, 0.0);
    let s = fit_scale(&a, &cz);
    assert!(max_diff(&(a.map(|x| x / s)), &cz) < 1e-9);
    // the same success probability for every basis input
    for b in 0..4 {
        let p: f64 = a.column(b).iter().map(|x| x.norm_sqr()).sum();
        assert!((p - 1.0 / 16.0).abs() < 1e-12, "input {b}: {p}");
    }
    // engine view of the same block: heralded and normalized
    for b in [0, 3] {
        let r = run_trajectories(&block.circuit(b), &NoiseModel::noiseless(), &RunConfig::new(1, 0).normalized(Normalization::Herald)).unwrap();
        assert!((r.entries[(b, b)].re - 1.0).abs() < 1e-9);
        assert!((r.herald_probability - 1.0 / 16.0).abs() < 1e-12);
        assert!(r.discarded_weight.abs() < 1e-12);
    }
}

#[test]
fn single_x_transpiles_to_the_x_circuit() {
    let mut qc = QubitCircuit::new(1);
    qc.push(Gate::X(0));
    assert_eq!(transpile(&qc).unwrap(), x_gate_circuit());
}

#[test]
fn double_hadamard_is_identity() {
    let mut qc = QubitCircuit::new(1);
    qc.push(Gate::H(0)).push(Gate::H(0));
    let a = logical_action(&transpile(&qc).unwrap());
    let id = DMatrix::identity(2, 2);
    let s = fit_scale(&a, &id);
    assert!((s.norm() - 1.0).abs() < 1e-12);
    assert!(max_diff(&a.map(|x| x / s), &id) < 1e-12);
}

#[test]
fn noiseless_bell_state() {
    let c = transpile(&QubitCircuit::bell()).unwrap();
    assert_eq!(c.mode_count, 8);
    assert_eq!(c.input.photons(), 4);
    let r = run_trajectories(&c, &NoiseModel::noiseless(), &RunConfig::new(1, 0).normalized(Normalization::Herald)).unwrap();
    let e = &r.entries;
    assert!((e[(0, 0)].re - 0.5).abs() < 1e-9);
    assert!((e[(3, 3)].re - 0.5).abs() < 1e-9);
    assert!(e[(1, 1)].re.abs() < 1e-9 && e[(2, 2)].re.abs() < 1e-9);
    assert!((e[(0, 3)] - C64::new(0.5, 0.0)).norm() < 1e-9);
    assert!((r.herald_probability - 1.0 / 16.0).abs() < 1e-9);
}

#[test]
fn reck_option_keeps_the_action() {
    let mut qc = QubitCircuit::new(2);
    qc.push(Gate::H(1)).push(Gate::Cz(0, 1)).push(Gate::X(0));
    let a = logical_action(&transpile_with(&qc, TranspileOptions { reck: true }, &KnillCz).unwrap());
    let b = logical_action(&transpile_with(&qc, TranspileOptions { reck: false }, &KnillCz).unwrap());
    assert!(max_diff(&a, &b) < 1e-12);
}

fn gate_strategy(qubits: usize) -> impl Strategy<Value = Gate> {
    let q = 0..qubits;
    prop_oneof![
        q.clone().prop_map(Gate::X),
        q.clone().prop_map(Gate::H),
        (q.clone(), 1..qubits).prop_map(move |(a, d)| Gate::Cz(a, (a + d) % qubits)),
        (q, 1..qubits).prop_map(move |(a, d)| Gate::Cx(a, (a + d) % qubits)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn transpiled_circuits_match_state_vector_simulation(
        qubits in 2usize..=3,
        gates in proptest::collection::vec(gate_strategy(3), 1..5),
    ) {
        let gates: Vec<Gate> = gates
            .into_iter()
            .filter(|g| g.targets().iter().all(|&t| t < qubits))
            .collect();
        // at most two entangling gates keep the mode count small
        let entangling = gates.iter().filter(|g| g.targets().len() == 2).count();
        prop_assume!(entangling <= 2);
        let qc = QubitCircuit { qubits, gates };
        let optical = transpile(&qc).unwrap();
        let a = logical_action(&optical);
        let u = qsim::unitary(&qc);
        let s = fit_scale(&a, &u);
        // herald probability multiplies over the entangling blocks
        prop_assert!((s.norm_sqr() - 16f64.powi(-(entangling as i32))).abs() < 1e-9);
        for b in 0..u.ncols() {
            let p: f64 = a.column(b).iter().map(|x| x.norm_sqr()).sum();
            prop_assert!((p - s.norm_sqr()).abs() < 1e-9);
        }
        prop_assert!(max_diff(&a.map(|x| x / s), &u) < 1e-9);
    }
}
