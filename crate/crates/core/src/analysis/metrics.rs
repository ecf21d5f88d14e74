use crate::engine::DensityMatrix;
use crate::error::{Error, Result};

/// Hellinger distance between the readout distributions (diagonals) of two
/// density matrices. Diagonals are used as given, so loss that lowers the
/// trace counts toward the distance. Slightly negative entries are clamped.
pub fn hellinger(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    hellinger_diag(&rho.diagonal(), &sigma.diagonal())
}

pub fn hellinger_diag(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            got: q.len(),
        });
    }
    let s: f64 = p
        .iter()
        .zip(q)
        .map(|(a, b)| (a.max(0.0).sqrt() - b.max(0.0).sqrt()).powi(2))
        .sum();
    Ok((s / 2.0).sqrt())
}

/// Delta-method standard error of `hellinger(rho, reference)` when `rho`
/// carries ensemble statistics and `reference` is exact. The distance is not
/// differentiable where it vanishes or where an estimated probability is
/// zero; those directions contribute nothing.
pub fn hellinger_stderr(rho: &DensityMatrix, reference: &DensityMatrix) -> Result<f64> {
    let p = rho.diagonal();
    let q = reference.diagonal();
    let h = hellinger_diag(&p, &q)?;
    if h == 0.0 {
        return Ok(0.0);
    }
    let grad: Vec<f64> = p
        .iter()
        .zip(&q)
        .map(|(&a, &b)| {
            if a <= 0.0 {
                0.0
            } else {
                let (sa, sb) = (a.sqrt(), b.max(0.0).sqrt());
                (sa - sb) / (4.0 * h * sa)
            }
        })
        .collect();
    Ok(rho.diagonal_functional_stderr(&grad))
}

/// `F = (1 − H²)²`
pub fn fidelity_from_hellinger(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::OutOfRange(format!("Hellinger distance {h} outside [0, 1]")));
    }
    Ok((1.0 - h * h).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(hellinger_diag(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert!((hellinger_diag(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        // sqrt(1 − 1/√2) at 30 digits: 0.541196100146196984399723205366
        let h = hellinger_diag(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((h - 0.541_196_100_146_197).abs() < 1e-15);
        assert!((fidelity_from_hellinger(h).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(fidelity_from_hellinger(0.0).unwrap(), 1.0);
        assert_eq!(fidelity_from_hellinger(1.0).unwrap(), 0.0);
        assert!(fidelity_from_hellinger(1.5).is_err());
        assert!(hellinger_diag(&[1.0], &[0.5, 0.5]).is_err());
        // tiny negative noise is clamped
        assert_eq!(hellinger_diag(&[-1e-13, 1.0], &[0.0, 1.0]).unwrap(), 0.0);
    }

    fn dist(raw: &[f64]) -> Vec<f64> {
        let s: f64 = raw.iter().sum();
        raw.iter().map(|x| x / s).collect()
    }

    proptest! {
        #[test]
        fn metric_properties(
            a in proptest::collection::vec(0.001f64..1.0, 4),
            b in proptest::collection::vec(0.001f64..1.0, 4),
            c in proptest::collection::vec(0.001f64..1.0, 4),
        ) {
            let (p, q, r) = (dist(&a), dist(&b), dist(&c));
            let pq = hellinger_diag(&p, &q).unwrap();
            prop_assert_eq!(pq, hellinger_diag(&q, &p).unwrap());
            prop_assert!(pq <= 1.0 + 1e-12);
            let pr = hellinger_diag(&p, &r).unwrap();
            let qr = hellinger_diag(&q, &r).unwrap();
            prop_assert!(pr <= pq + qr + 1e-12);
            prop_assert_eq!(fidelity_from_hellinger(hellinger_diag(&p, &p).unwrap()).unwrap(), 1.0);
        }
    }
}
