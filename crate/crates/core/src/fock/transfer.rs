use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

const UNITARY_TOL: f64 = 1e-10;

/// Linear map on creation operators, `a_j† -> Σ_i M_ij a_i†`.
///
/// Unitary for lossless networks; sub-unitary once a loss mode has been
/// traced out.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTransfer {
    matrix: DMatrix<C64>,
    subunitary: bool,
}

impl ModeTransfer {
    pub fn identity(modes: usize) -> Self {
        ModeTransfer {
            matrix: DMatrix::identity(modes, modes),
            subunitary: false,
        }
    }

    /// Checked unitary constructor (`M M† = I` within 1e-10).
    pub fn unitary(matrix: DMatrix<C64>) -> Result<Self> {
        square(&matrix)?;
        let dev = unitarity_deviation(&matrix);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(ModeTransfer {
            matrix,
            subunitary: false,
        })
    }

    /// Checked sub-unitary constructor (all singular values ≤ 1 + 1e-10).
    pub fn subunitary(matrix: DMatrix<C64>) -> Result<Self> {
        square(&matrix)?;
        let smax = max_singular_value(&matrix);
        if smax > 1.0 + UNITARY_TOL {
            return Err(Error::OutOfRange(format!(
                "largest singular value {smax} exceeds 1"
            )));
        }
        Ok(ModeTransfer {
            matrix,
            subunitary: true,
        })
    }

    /// No checks. For matrices that are unitary or contractive by construction.
    pub(crate) fn from_parts(matrix: DMatrix<C64>, subunitary: bool) -> Self {
        ModeTransfer { matrix, subunitary }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_subunitary(&self) -> bool {
        self.subunitary
    }

    /// `next · self`: apply `self` first, then `next`.
    pub fn then(&self, next: &ModeTransfer) -> Result<ModeTransfer> {
        if next.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: next.dim(),
            });
        }
        Ok(ModeTransfer {
            matrix: &next.matrix * &self.matrix,
            subunitary: self.subunitary || next.subunitary,
        })
    }

    /// Left-multiply by `block` embedded on `modes` (row operations only).
    pub fn apply_block(&mut self, block: &DMatrix<C64>, modes: &[usize], subunitary: bool) {
        apply_block_rows(&mut self.matrix, block, modes);
        self.subunitary |= subunitary;
    }
}

fn square(m: &DMatrix<C64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "mode transfer must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `max |(M M† − I)_ij|`
pub fn unitarity_deviation(m: &DMatrix<C64>) -> f64 {
    let prod = m * m.adjoint();
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn max_singular_value(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// `target <- E · target` where `E` is `block` embedded on rows `modes`.
pub(crate) fn apply_block_rows(target: &mut DMatrix<C64>, block: &DMatrix<C64>, modes: &[usize]) {
    let k = modes.len();
    debug_assert_eq!(block.nrows(), k);
    let cols = target.ncols();
    let mut old = [C64::new(0.0, 0.0); 8];
    assert!(k <= old.len());
    for c in 0..cols {
        for (a, &m) in modes.iter().enumerate() {
            old[a] = target[(m, c)];
        }
        for (a, &m) in modes.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..k {
                acc += block[(a, b)] * old[b];
            }
            target[(m, c)] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate() {
        let m = DMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0); 4]);
        assert!(matches!(ModeTransfer::unitary(m.clone()), Err(Error::NotUnitary(_))));
        // singular values of the all-0.5 matrix are (1, 0)
        assert!(ModeTransfer::subunitary(m).is_ok());
        let big = DMatrix::from_element(1, 1, C64::new(1.5, 0.0));
        assert!(ModeTransfer::subunitary(big).is_err());
        let rect = DMatrix::from_element(1, 2, C64::new(0.0, 0.0));
        assert!(matches!(ModeTransfer::unitary(rect), Err(Error::Shape(_))));
    }

    #[test]
    fn embedded_block_matches_full_product() {
        let block = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 1.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
        );
        let mut t = ModeTransfer::identity(3);
        t.apply_block(&block, &[2, 0], false);
        let mut full = DMatrix::identity(3, 3);
        full[(2, 2)] = C64::new(0.0, 1.0);
        full[(0, 0)] = C64::new(-1.0, 0.0);
        assert_eq!(t.matrix(), &full);
    }
}
