use nalgebra::DMatrix;

use crate::circuits::elements::bs_block;
use crate::circuits::{OpticalCircuit, PlacedElement};
use crate::error::{Error, Result};
use crate::fock::{unitarity_deviation, ModeTransfer};
use crate::C64;

const INPUT_TOL: f64 = 1e-8;
/// Residual output phases below this magnitude are not emitted.
const PHASE_EPS: f64 = 1e-13;

/// Triangular decomposition of a unitary into nearest-neighbour beam
/// splitters followed by output phase shifters.
///
/// Entries are nulled row by row from the bottom row upward, left to right
/// within a row, by mixing adjacent columns `(j, j+1)`. With `T_k` the
/// splitter that nulls the k-th entry, `U T_1† ⋯ T_K† = D` is diagonal, so
/// the circuit is `T_1, …, T_K` followed by the phases of `D`.
pub fn reck_decompose(u: &ModeTransfer) -> Result<OpticalCircuit> {
    let dev = unitarity_deviation(u.matrix());
    if dev > INPUT_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let m = u.dim();
    let mut work = u.matrix().clone();
    let mut circuit = OpticalCircuit::new(m);

    for row in (1..m).rev() {
        for j in 0..row {
            let a = work[(row, j)];
            let b = work[(row, j + 1)];
            let (theta, phi) = nulling_angles(a, b);
            right_multiply_adjoint(&mut work, j, &bs_block(theta, phi));
            circuit.push(PlacedElement::bs(j, j + 1, theta, phi));
        }
    }
    for k in 0..m {
        let phase = work[(k, k)].arg();
        if phase.abs() > PHASE_EPS {
            circuit.push(PlacedElement::ps(k, phase));
        }
    }
    Ok(circuit)
}

/// Angles of the splitter on columns `(j, j+1)` that zeroes `a` in the row
/// `(…, a, b, …)`: `c·a − i e^{iφ} s·b = 0`.
fn nulling_angles(a: C64, b: C64) -> (f64, f64) {
    if a.norm() == 0.0 {
        return (0.0, 0.0);
    }
    let theta = 2.0 * a.norm().atan2(b.norm());
    let minus_i = C64::new(0.0, -1.0);
    let phi = if b.norm() == 0.0 {
        (minus_i * a).arg()
    } else {
        (minus_i * a * b.conj()).arg()
    };
    (theta, phi)
}

/// `work <- work · T†` with `T` acting on columns `(j, j+1)`.
fn right_multiply_adjoint(work: &mut DMatrix<C64>, j: usize, t: &DMatrix<C64>) {
    let td = t.adjoint();
    for r in 0..work.nrows() {
        let x = work[(r, j)];
        let y = work[(r, j + 1)];
        work[(r, j)] = x * td[(0, 0)] + y * td[(1, 0)];
        work[(r, j + 1)] = x * td[(0, 1)] + y * td[(1, 1)];
    }
}
