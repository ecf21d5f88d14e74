//! Deterministic reference for the trajectory average.
//!
//! The full Fock-space density matrix is propagated element by element. A
//! noisy element maps `ρ ↦ E[K ρ K†]`, where `K` is the Fock representation
//! of the traced element matrix for one draw, and the expectation over the
//! Gaussian draws is a tensor Gauss–Hermite rule. The Fock representation
//! comes from expanding products of creation operators, so it shares no
//! code with the permanent kernel.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::circuits::{bs_matrix, ps_matrix, ElementKind, OpticalCircuit, PlacedElement};
use crate::engine::density::{DensityMatrix, Normalization};
use crate::engine::noise_model::{build_noisy_circuit, NoiseModel};
use crate::error::{Error, Result};
use crate::fock::Occupation;
use crate::noise::{
    depolarization_block, epsilon_from_p, ics_covariance, traced_bs_block, traced_phase_entry,
    BeamSplitterDraw, DepolarizingDraw, IcsPair,
};
use crate::C64;

/// Nodes per Gaussian variable.
pub const QUADRATURE_NODES: usize = 21;
pub const ORACLE_MAX_MODES: usize = 4;
pub const ORACLE_MAX_PHOTONS: usize = 2;

/// Gauss–Hermite rule for the standard normal density: nodes and weights
/// with `Σ w f(x) ≈ E[f(Z)]`, from the eigenproblem of the Jacobi matrix.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Quadrature over a correlated `(I_C, I_S)` pair: nodes of two independent
/// normals pushed through the symmetric square root of the covariance.
fn ics_rule(theta_eff: f64, gh: &(Vec<f64>, Vec<f64>)) -> Vec<(IcsPair, f64)> {
    let c = ics_covariance(theta_eff);
    let cov = DMatrix::from_row_slice(2, 2, &[c.var_c, c.cov, c.cov, c.var_s]);
    let eig = SymmetricEigen::new(cov);
    let l0 = eig.eigenvalues[0].max(0.0).sqrt();
    let l1 = eig.eigenvalues[1].max(0.0).sqrt();
    let v = &eig.eigenvectors;
    let mut out = Vec::with_capacity(gh.0.len() * gh.0.len());
    for (&z0, &w0) in gh.0.iter().zip(&gh.1) {
        for (&z1, &w1) in gh.0.iter().zip(&gh.1) {
            let (a, b) = (l0 * z0, l1 * z1);
            out.push((
                IcsPair {
                    i_c: v[(0, 0)] * a + v[(0, 1)] * b,
                    i_s: v[(1, 0)] * a + v[(1, 1)] * b,
                },
                w0 * w1,
            ));
        }
    }
    out
}

/// Matrix of the Fock-space operator induced by the mode transfer `m`, on the
/// basis `basis` (all of one photon number).
pub fn fock_operator(m: &DMatrix<C64>, basis: &[Occupation]) -> DMatrix<C64> {
    let modes = m.nrows();
    let index: BTreeMap<&Occupation, usize> = basis.iter().enumerate().map(|(k, o)| (o, k)).collect();
    let mut out = DMatrix::zeros(basis.len(), basis.len());
    for (col, occ) in basis.iter().enumerate() {
        // polynomial in commuting creation operators: exponent vector -> coefficient
        let mut poly: BTreeMap<Vec<u8>, C64> = BTreeMap::new();
        poly.insert(vec![0; modes], C64::new(1.0, 0.0));
        for (j, &n) in occ.counts().iter().enumerate() {
            for _ in 0..n {
                let mut next = BTreeMap::new();
                for (exp, coef) in &poly {
                    for i in 0..modes {
                        if m[(i, j)] == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let mut e = exp.clone();
                        e[i] += 1;
                        *next.entry(e).or_insert(C64::new(0.0, 0.0)) += coef * m[(i, j)];
                    }
                }
                poly = next;
            }
        }
        let in_norm = occ.factorial_product().sqrt();
        for (exp, coef) in poly {
            let o = Occupation::new(exp);
            if let Some(&row) = index.get(&o) {
                out[(row, col)] = coef * o.factorial_product().sqrt() / in_norm;
            }
        }
    }
    out
}

fn embed(block: &DMatrix<C64>, modes: &[usize], m: usize) -> DMatrix<C64> {
    let mut full = DMatrix::identity(m, m);
    for (r, &mr) in modes.iter().enumerate() {
        for (c, &mc) in modes.iter().enumerate() {
            full[(mr, mc)] = block[(r, c)];
        }
    }
    full
}

/// `(weight, block)` pairs whose weighted sum of `K ρ K†` is the element's
/// averaged action.
fn element_rule(e: &PlacedElement, gh: &(Vec<f64>, Vec<f64>)) -> Result<Vec<(f64, DMatrix<C64>)>> {
    let eps = if e.loss_p > 0.0 { epsilon_from_p(e.loss_p)? } else { 0.0 };
    let out = match e.kind {
        ElementKind::PhaseShifter { theta } if e.is_noisy() => ics_rule(theta, gh)
            .into_iter()
            .map(|(d, w)| (w, DMatrix::from_element(1, 1, traced_phase_entry(theta, eps, d))))
            .collect(),
        ElementKind::BeamSplitter { theta, phi } if e.is_noisy() => {
            let rule = ics_rule(theta / 2.0, gh);
            let mut v = Vec::with_capacity(rule.len() * rule.len());
            for &(d0, w0) in &rule {
                for &(d1, w1) in &rule {
                    let draw = BeamSplitterDraw { mode0: d0, mode1: d1 };
                    v.push((w0 * w1, traced_bs_block(theta, phi, eps, eps, &draw)));
                }
            }
            v
        }
        ElementKind::PhaseShifter { theta } => vec![(1.0, ps_matrix(theta).into_matrix())],
        ElementKind::BeamSplitter { theta, phi } => vec![(1.0, bs_matrix(theta, phi).into_matrix())],
        ElementKind::Depolarization if e.is_noisy() => {
            let mut v = Vec::with_capacity(gh.0.len().pow(3));
            for (&x, &wx) in gh.0.iter().zip(&gh.1) {
                for (&y, &wy) in gh.0.iter().zip(&gh.1) {
                    for (&z, &wz) in gh.0.iter().zip(&gh.1) {
                        let d = DepolarizingDraw { w_x: x, w_y: y, w_z: z };
                        v.push((wx * wy * wz, depolarization_block(eps, &d)));
                    }
                }
            }
            v
        }
        ElementKind::Loss if e.is_noisy() => gh
            .0
            .iter()
            .zip(&gh.1)
            .map(|(&x, &w)| (w, DMatrix::from_element(1, 1, C64::new((eps * x).cos(), 0.0))))
            .collect(),
        ElementKind::Depolarization | ElementKind::Loss => vec![],
    };
    Ok(out)
}

/// Exact ensemble average of the noisy circuit for small systems.
pub fn kraus_oracle(
    circuit: &OpticalCircuit,
    noise: &NoiseModel,
    normalize: Normalization,
) -> Result<DensityMatrix> {
    let noisy = build_noisy_circuit(circuit, noise)?;
    kraus_oracle_noisy(&noisy, normalize)
}

/// [`kraus_oracle`] for a circuit whose elements already carry their noise.
pub fn kraus_oracle_noisy(noisy: &OpticalCircuit, normalize: Normalization) -> Result<DensityMatrix> {
    noisy.validate()?;
    let m = noisy.mode_count;
    let photons = noisy.input.photons();
    if m > ORACLE_MAX_MODES || photons > ORACLE_MAX_PHOTONS {
        return Err(Error::ResourceGuard(format!(
            "oracle limited to {ORACLE_MAX_MODES} modes and {ORACLE_MAX_PHOTONS} photons, got {m} and {photons}"
        )));
    }
    let basis = Occupation::enumerate(m, photons);
    let dim = basis.len();
    let start = basis.iter().position(|o| *o == noisy.input).expect("input is in its own sector");
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    rho[(start, start)] = C64::new(1.0, 0.0);

    let gh = gauss_hermite(QUADRATURE_NODES);
    for e in &noisy.elements {
        let rule = element_rule(e, &gh)?;
        if rule.is_empty() {
            continue;
        }
        let mut next = DMatrix::<C64>::zeros(dim, dim);
        for (w, block) in rule {
            let k = fock_operator(&embed(&block, &e.modes, m), &basis);
            next += (&k * &rho * k.adjoint()) * C64::new(w, 0.0);
        }
        rho = next;
    }
    decode(noisy, &basis, &rho, normalize)
}

fn decode(
    noisy: &OpticalCircuit,
    basis: &[Occupation],
    rho: &DMatrix<C64>,
    normalize: Normalization,
) -> Result<DensityMatrix> {
    let map = &noisy.qubit_map;
    let m = noisy.mode_count;
    let total: f64 = rho.diagonal().iter().map(|x| x.re).sum();
    let herald_ok = |o: &Occupation| {
        noisy
            .herald
            .iter()
            .zip(o.counts())
            .all(|(h, &c)| h.is_none_or(|n| n == c))
    };
    let kept: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, o)| herald_ok(o))
        .map(|(k, _)| rho[(k, k)].re)
        .sum();
    // dual-rail basis state b, with the herald counts on the herald modes
    let herald_counts: Vec<u8> = noisy.herald.iter().map(|h| h.unwrap_or(0)).collect();
    let locate = |b: usize| {
        let q = map.basis_occupation(b, m);
        let counts: Vec<u8> = q.counts().iter().zip(&herald_counts).map(|(a, h)| a + h).collect();
        basis.iter().position(|o| o.counts() == counts.as_slice())
    };
    let idx: Vec<Option<usize>> = (0..map.dim()).map(locate).collect();
    let d = map.dim();
    let mut out = DMatrix::from_fn(d, d, |i, j| match (idx[i], idx[j]) {
        (Some(a), Some(b)) => rho[(a, b)],
        _ => C64::new(0.0, 0.0),
    });
    let dual: f64 = out.diagonal().iter().map(|x| x.re).sum();
    if kept <= 0.0 {
        return Err(Error::HeraldNeverSucceeded(0));
    }
    let g = match normalize {
        Normalization::None => 1.0,
        Normalization::Herald => total / kept,
        Normalization::Trace => 1.0 / dual,
    };
    out *= C64::new(g, 0.0);
    let mut r = DensityMatrix::from_parts(out, kept / total, kept - dual, 0, 0);
    r.normalization = normalize;
    Ok(r)
}
