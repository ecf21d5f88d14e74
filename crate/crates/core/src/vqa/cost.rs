use serde::{Deserialize, Serialize};

use crate::engine::DensityMatrix;
use crate::error::{Error, Result};

/// Largest vertex count whose cost diagonal is stored densely.
pub const MAX_VERTICES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = Graph { n_vertices, edges };
        g.validate()?;
        Ok(g)
    }

    /// Four vertices on a ring.
    pub fn square() -> Self {
        Graph {
            n_vertices: 4,
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 0)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for &(a, b) in &self.edges {
            if a >= self.n_vertices || b >= self.n_vertices {
                return Err(Error::OutOfRange(format!(
                    "edge ({a}, {b}) on a graph with {} vertices",
                    self.n_vertices
                )));
            }
            if a == b {
                return Err(Error::Config(format!("self-loop on vertex {a}")));
            }
        }
        Ok(())
    }
}

/// Diagonal of `Σ_edges Z_i Z_j` in the computational basis, vertex 0 as the
/// most significant bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostOperator {
    pub diagonal: Vec<f64>,
}

impl CostOperator {
    pub fn minimum(&self) -> f64 {
        self.diagonal.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn maxcut_cost(graph: &Graph) -> Result<CostOperator> {
    graph.validate()?;
    let n = graph.n_vertices;
    if n > MAX_VERTICES {
        return Err(Error::OutOfRange(format!("{n} vertices, at most {MAX_VERTICES} supported")));
    }
    let z = |b: usize, k: usize| if (b >> (n - 1 - k)) & 1 == 0 { 1.0 } else { -1.0 };
    let diagonal = (0..1usize << n)
        .map(|b| graph.edges.iter().map(|&(i, j)| z(b, i) * z(b, j)).sum())
        .collect();
    Ok(CostOperator { diagonal })
}

/// `Tr(ρ H)` for a diagonal cost.
pub fn energy(rho: &DensityMatrix, cost: &CostOperator) -> Result<f64> {
    if rho.dim() != cost.diagonal.len() {
        return Err(Error::Dimension {
            expected: cost.diagonal.len(),
            got: rho.dim(),
        });
    }
    Ok(cost
        .diagonal
        .iter()
        .enumerate()
        .map(|(b, h)| h * rho.entries[(b, b)].re)
        .sum())
}

/// Monte-Carlo standard error of [`energy`]; zero for a density matrix
/// without ensemble statistics.
pub fn energy_stderr(rho: &DensityMatrix, cost: &CostOperator) -> Result<f64> {
    if rho.dim() != cost.diagonal.len() {
        return Err(Error::Dimension {
            expected: cost.diagonal.len(),
            got: rho.dim(),
        });
    }
    Ok(rho.diagonal_functional_stderr(&cost.diagonal))
}

pub fn approximation_ratio(e_final: f64, e_opt: f64) -> Result<f64> {
    if e_opt == 0.0 {
        return Err(Error::OutOfRange("optimal energy is zero".into()));
    }
    Ok(e_final / e_opt)
}

pub fn relative_error(e: f64, e_opt: f64) -> f64 {
    ((e_opt - e) / e_opt).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;
    use nalgebra::DMatrix;

    fn basis_rho(b: usize, d: usize) -> DensityMatrix {
        let mut m = DMatrix::zeros(d, d);
        m[(b, b)] = C64::new(1.0, 0.0);
        DensityMatrix::from_parts(m, 1.0, 0.0, 1, 0)
    }

    #[test]
    fn square_graph_values() {
        let c = maxcut_cost(&Graph::square()).unwrap();
        assert_eq!(c.diagonal[0b0101], -4.0);
        assert_eq!(c.diagonal[0b1010], -4.0);
        assert_eq!(c.diagonal[0b0000], 4.0);
        assert_eq!(c.diagonal[0b0011], 0.0);
        assert_eq!(c.minimum(), -4.0);
        for b in 0..16 {
            assert_eq!(c.diagonal[b], c.diagonal[b ^ 0b1111]);
        }
    }

    #[test]
    fn energies() {
        let c = maxcut_cost(&Graph::square()).unwrap();
        assert_eq!(energy(&basis_rho(0b0101, 16), &c).unwrap(), -4.0);
        assert_eq!(energy(&basis_rho(0, 16), &c).unwrap(), 4.0);
        let mixed = DMatrix::from_diagonal_element(16, 16, C64::new(1.0 / 16.0, 0.0));
        let mixed = DensityMatrix::from_parts(mixed, 1.0, 0.0, 1, 0);
        assert_eq!(energy(&mixed, &c).unwrap(), 0.0);
        assert!(energy(&basis_rho(0, 4), &c).is_err());
    }

    #[test]
    fn ratios() {
        assert_eq!(approximation_ratio(-4.0, -4.0).unwrap(), 1.0);
        assert!((approximation_ratio(-3.9308, -4.0).unwrap() - 0.9827).abs() < 1e-12);
        assert_eq!(approximation_ratio(0.0, -4.0).unwrap(), 0.0);
        assert!(approximation_ratio(1.0, 0.0).is_err());
    }

    #[test]
    fn graph_errors() {
        assert!(Graph::new(3, vec![(0, 3)]).is_err());
        assert!(Graph::new(3, vec![(1, 1)]).is_err());
        assert!(maxcut_cost(&Graph { n_vertices: 11, edges: vec![] }).is_err());
    }
}
