use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

/// Matrix permanent by Ryser's formula with Gray-code subset updates,
/// `O(2^n · n)`.
///
/// The empty matrix has permanent 1.
pub fn permanent(m: &DMatrix<C64>) -> Result<C64> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "permanent needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let idx: Vec<usize> = (0..m.nrows()).collect();
    Ok(permanent_of_selection(m, &idx, &idx))
}

/// Permanent of the submatrix `m[rows, cols]`, where indices may repeat.
///
/// This is the kernel behind multi-photon amplitudes: rows repeat by output
/// occupation and columns by input occupation. No submatrix is materialized.
pub(crate) fn permanent_of_selection(m: &DMatrix<C64>, rows: &[usize], cols: &[usize]) -> C64 {
    let n = rows.len();
    debug_assert_eq!(n, cols.len());
    match n {
        0 => return C64::new(1.0, 0.0),
        1 => return m[(rows[0], cols[0])],
        2 => {
            return m[(rows[0], cols[0])] * m[(rows[1], cols[1])]
                + m[(rows[0], cols[1])] * m[(rows[1], cols[0])]
        }
        _ => {}
    }
    assert!(n < 31, "permanent size {n} is beyond the supported range");

    // Row sums over the current column subset.
    let mut row_sums = [C64::new(0.0, 0.0); 32];
    let row_sums = &mut row_sums[..n];
    let mut in_subset = 0u32;
    let mut total = C64::new(0.0, 0.0);
    for k in 1u32..(1u32 << n) {
        let j = k.trailing_zeros() as usize;
        let bit = 1u32 << j;
        let col = cols[j];
        if in_subset & bit == 0 {
            in_subset |= bit;
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += m[(rows[i], col)];
            }
        } else {
            in_subset &= !bit;
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= m[(rows[i], col)];
            }
        }
        let prod = row_sums.iter().fold(C64::new(1.0, 0.0), |acc, s| acc * s);
        if in_subset.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(m: &DMatrix<C64>) -> C64 {
        fn rec(m: &DMatrix<C64>, row: usize, used: &mut Vec<bool>) -> C64 {
            let n = m.nrows();
            if row == n {
                return C64::new(1.0, 0.0);
            }
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    acc += m[(row, j)] * rec(m, row + 1, used);
                    used[j] = false;
                }
            }
            acc
        }
        rec(m, 0, &mut vec![false; m.nrows()])
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn small_cases() {
        assert_eq!(permanent(&DMatrix::from_element(0, 0, c(0.0))).unwrap(), c(1.0));
        assert_eq!(permanent(&DMatrix::from_element(1, 1, c(2.0))).unwrap(), c(2.0));
        assert_eq!(permanent(&DMatrix::from_element(2, 2, c(1.0))).unwrap(), c(2.0));
        let p = permanent(&DMatrix::from_element(3, 3, c(1.0))).unwrap();
        assert!((p - c(6.0)).norm() < 1e-14);
        // brute force over 3! permutations agrees
        assert!((naive(&DMatrix::from_element(3, 3, c(1.0))) - c(6.0)).norm() < 1e-14);
    }

    #[test]
    fn non_square_is_rejected() {
        let m = DMatrix::from_element(2, 3, c(1.0));
        assert!(matches!(permanent(&m), Err(Error::Shape(_))));
    }

    #[test]
    fn repeated_selection_matches_expanded_matrix() {
        let m = DMatrix::from_fn(3, 3, |i, j| C64::new(i as f64 + 0.5, j as f64 - 1.0));
        let rows = [0, 0, 2];
        let cols = [1, 2, 2];
        let expanded = DMatrix::from_fn(3, 3, |i, j| m[(rows[i], cols[j])]);
        let a = permanent_of_selection(&m, &rows, &cols);
        let b = naive(&expanded);
        assert!((a - b).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn ryser_agrees_with_enumeration(
            n in 1usize..=7,
            seed in proptest::collection::vec(-1.0f64..1.0, 98)
        ) {
            let m = DMatrix::from_fn(n, n, |i, j| C64::new(seed[2 * (i * 7 + j)], seed[2 * (i * 7 + j) + 1]));
            let fast = permanent(&m).unwrap();
            let slow = naive(&m);
            let scale = slow.norm().max(1.0);
            prop_assert!((fast - slow).norm() / scale < 1e-10);
        }
    }
}
