use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// How the averaged projector is scaled before it is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Plain trajectory mean. Loss shows up as trace < 1.
    #[default]
    None,
    /// Divide by the herald probability. Loss still shows up as trace < 1.
    Herald,
    /// Divide by the trace, i.e. postselect on the dual-rail subspace.
    Trace,
}

/// Per-trajectory output: decoded amplitudes of the kept branches plus the
/// total surviving weight and the weight compatible with the herald. The
/// trajectory contributes `Σ_b |ψ_b⟩⟨ψ_b|`; most runners keep one branch.
#[derive(Debug, Clone)]
pub(crate) struct TrajectorySample {
    pub branches: Vec<Vec<C64>>,
    pub total: f64,
    pub kept: f64,
}

impl TrajectorySample {
    pub fn single(psi: Vec<C64>, total: f64, kept: f64) -> Self {
        TrajectorySample {
            branches: vec![psi],
            total,
            kept,
        }
    }
}

const NV: usize = 3; // (total, kept, dual)

/// Additive first and second moments of the projector entries and of the
/// scalar weights. Merging is plain summation, so any fixed merge order
/// gives a reproducible result.
#[derive(Debug, Clone)]
pub(crate) struct Moments {
    n: u64,
    sum: DMatrix<C64>,
    sum_re2: DMatrix<f64>,
    sum_im2: DMatrix<f64>,
    sum_re_v: [DMatrix<f64>; NV],
    sum_im_v: [DMatrix<f64>; NV],
    sum_diag_cross: DMatrix<f64>,
    sum_v: [f64; NV],
    sum_vv: [[f64; NV]; NV],
}

impl Moments {
    pub fn new(dim: usize) -> Self {
        let z = DMatrix::zeros(dim, dim);
        Moments {
            n: 0,
            sum: DMatrix::zeros(dim, dim),
            sum_re2: z.clone(),
            sum_im2: z.clone(),
            sum_re_v: [z.clone(), z.clone(), z.clone()],
            sum_im_v: [z.clone(), z.clone(), z.clone()],
            sum_diag_cross: z,
            sum_v: [0.0; NV],
            sum_vv: [[0.0; NV]; NV],
        }
    }

    pub fn dim(&self) -> usize {
        self.sum.nrows()
    }

    pub fn push(&mut self, s: &TrajectorySample) {
        let d = self.dim();
        let mut x = DMatrix::<C64>::zeros(d, d);
        for psi in &s.branches {
            for j in 0..d {
                let cj = psi[j].conj();
                for i in 0..d {
                    x[(i, j)] += psi[i] * cj;
                }
            }
        }
        let diag: Vec<f64> = (0..d).map(|i| x[(i, i)].re).collect();
        let dual: f64 = diag.iter().sum();
        let v = [s.total, s.kept, dual];
        self.n += 1;
        for i in 0..NV {
            self.sum_v[i] += v[i];
            for j in 0..NV {
                self.sum_vv[i][j] += v[i] * v[j];
            }
        }
        for j in 0..d {
            for i in 0..d {
                let x = x[(i, j)];
                self.sum[(i, j)] += x;
                self.sum_re2[(i, j)] += x.re * x.re;
                self.sum_im2[(i, j)] += x.im * x.im;
                for k in 0..NV {
                    self.sum_re_v[k][(i, j)] += x.re * v[k];
                    self.sum_im_v[k][(i, j)] += x.im * v[k];
                }
            }
            for i in 0..d {
                self.sum_diag_cross[(i, j)] += diag[i] * diag[j];
            }
        }
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum += &other.sum;
        self.sum_re2 += &other.sum_re2;
        self.sum_im2 += &other.sum_im2;
        for k in 0..NV {
            self.sum_re_v[k] += &other.sum_re_v[k];
            self.sum_im_v[k] += &other.sum_im_v[k];
            self.sum_v[k] += other.sum_v[k];
            for j in 0..NV {
                self.sum_vv[k][j] += other.sum_vv[k][j];
            }
        }
        self.sum_diag_cross += &other.sum_diag_cross;
    }

    fn n(&self) -> f64 {
        self.n as f64
    }

    fn mean_v(&self) -> [f64; NV] {
        self.sum_v.map(|s| s / self.n())
    }

    /// Sample covariance from raw sums.
    fn cov(&self, sab: f64, sa: f64, sb: f64) -> f64 {
        let n = self.n();
        if self.n < 2 {
            return 0.0;
        }
        (sab - sa * sb / n) / (n - 1.0)
    }

    fn cov_vv(&self) -> [[f64; NV]; NV] {
        let mut c = [[0.0; NV]; NV];
        for i in 0..NV {
            for j in 0..NV {
                c[i][j] = self.cov(self.sum_vv[i][j], self.sum_v[i], self.sum_v[j]);
            }
        }
        c
    }

    /// Scale factor `g` and its gradient with respect to the means of
    /// `(total, kept, dual)`.
    fn scale(&self, norm: Normalization) -> ([f64; NV], f64) {
        let [t, k, d] = self.mean_v();
        match norm {
            Normalization::None => ([0.0; NV], 1.0),
            Normalization::Herald => ([1.0 / k, -t / (k * k), 0.0], t / k),
            Normalization::Trace => ([0.0, 0.0, -1.0 / (d * d)], 1.0 / d),
        }
    }
}

/// Delta-method variance of `g·mean(x)` given the moments of one real
/// component `x`.
fn delta_var(
    g: f64,
    grad: &[f64; NV],
    xbar: f64,
    var_x: f64,
    cov_xv: &[f64; NV],
    cov_vv: &[[f64; NV]; NV],
    n: f64,
) -> f64 {
    let mut lin = 0.0;
    let mut quad = 0.0;
    for i in 0..NV {
        lin += grad[i] * cov_xv[i];
        for j in 0..NV {
            quad += grad[i] * grad[j] * cov_vv[i][j];
        }
    }
    ((g * g * var_x + 2.0 * g * xbar * lin + xbar * xbar * quad) / n).max(0.0)
}

/// Averaged density matrix in the decoded computational basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub entries: DMatrix<C64>,
    /// Mean herald-compatible weight over mean surviving weight; exactly one
    /// for circuits without herald constraints.
    pub herald_probability: f64,
    /// Mean weight that passed the herald but left the dual-rail subspace.
    pub discarded_weight: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub normalization: Normalization,
    moments: Option<Moments>,
}

impl DensityMatrix {
    pub(crate) fn from_moments(
        moments: Moments,
        normalization: Normalization,
        seed: u64,
    ) -> Result<Self> {
        let n = moments.n();
        let [t, k, d] = moments.mean_v();
        if k <= 0.0 {
            return Err(Error::HeraldNeverSucceeded(moments.n as usize));
        }
        if normalization == Normalization::Trace && d <= 0.0 {
            return Err(Error::HeraldNeverSucceeded(moments.n as usize));
        }
        let (_, g) = moments.scale(normalization);
        let entries = moments.sum.map(|x| x * (g / n));
        Ok(DensityMatrix {
            entries,
            herald_probability: k / t,
            discarded_weight: k - d,
            n_samples: moments.n as usize,
            seed,
            normalization,
            moments: Some(moments),
        })
    }

    /// Density matrix without ensemble statistics (oracle output, parsed
    /// results).
    pub fn from_parts(
        entries: DMatrix<C64>,
        herald_probability: f64,
        discarded_weight: f64,
        n_samples: usize,
        seed: u64,
    ) -> Self {
        DensityMatrix {
            entries,
            herald_probability,
            discarded_weight,
            n_samples,
            seed,
            normalization: Normalization::None,
            moments: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|x| x.re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|x| x.re).collect()
    }

    pub fn has_statistics(&self) -> bool {
        self.moments.is_some()
    }

    /// Monte-Carlo standard error of entry `(i, j)`, combining real and
    /// imaginary parts. Zero when no ensemble statistics are attached.
    pub fn entry_stderr(&self, i: usize, j: usize) -> f64 {
        let Some(m) = &self.moments else { return 0.0 };
        let n = m.n();
        let (grad, g) = m.scale(self.normalization);
        let cvv = m.cov_vv();
        let x = m.sum[(i, j)];
        let cov_re: [f64; NV] =
            std::array::from_fn(|k| m.cov(m.sum_re_v[k][(i, j)], x.re, m.sum_v[k]));
        let cov_im: [f64; NV] =
            std::array::from_fn(|k| m.cov(m.sum_im_v[k][(i, j)], x.im, m.sum_v[k]));
        let var_re = m.cov(m.sum_re2[(i, j)], x.re, x.re);
        let var_im = m.cov(m.sum_im2[(i, j)], x.im, x.im);
        let v = delta_var(g, &grad, x.re / n, var_re, &cov_re, &cvv, n)
            + delta_var(g, &grad, x.im / n, var_im, &cov_im, &cvv, n);
        v.sqrt()
    }

    /// Covariance matrix of the estimated diagonal (delta method through the
    /// normalization). All zero without ensemble statistics.
    pub fn diagonal_covariance(&self) -> DMatrix<f64> {
        let d = self.dim();
        let Some(m) = &self.moments else {
            return DMatrix::zeros(d, d);
        };
        let n = m.n();
        let (grad, g) = m.scale(self.normalization);
        let cvv = m.cov_vv();
        let mut quad = 0.0;
        for a in 0..NV {
            for b in 0..NV {
                quad += grad[a] * grad[b] * cvv[a][b];
            }
        }
        let xs: Vec<f64> = (0..d).map(|i| m.sum[(i, i)].re).collect();
        let lin: Vec<f64> = (0..d)
            .map(|i| {
                (0..NV)
                    .map(|k| grad[k] * m.cov(m.sum_re_v[k][(i, i)], xs[i], m.sum_v[k]))
                    .sum()
            })
            .collect();
        DMatrix::from_fn(d, d, |i, j| {
            let cij = m.cov(m.sum_diag_cross[(i, j)], xs[i], xs[j]);
            let (xi, xj) = (xs[i] / n, xs[j] / n);
            (g * g * cij + g * xi * lin[j] + g * xj * lin[i] + xi * xj * quad) / n
        })
    }

    /// Standard error of a smooth function of the diagonal, given its
    /// gradient at the estimate.
    pub fn diagonal_functional_stderr(&self, gradient: &[f64]) -> f64 {
        let c = self.diagonal_covariance();
        let mut v = 0.0;
        for i in 0..gradient.len() {
            for j in 0..gradient.len() {
                v += gradient[i] * gradient[j] * c[(i, j)];
            }
        }
        v.max(0.0).sqrt()
    }

    pub fn trace_stderr(&self) -> f64 {
        self.diagonal_functional_stderr(&vec![1.0; self.dim()])
    }

    /// Standard error of `herald_probability`, a ratio of two means.
    pub fn herald_probability_stderr(&self) -> f64 {
        let Some(m) = &self.moments else { return 0.0 };
        let [t, k, _] = m.mean_v();
        let c = m.cov_vv();
        let (gt, gk) = (-k / (t * t), 1.0 / t);
        let v = gt * gt * c[0][0] + gk * gk * c[1][1] + 2.0 * gt * gk * c[0][1];
        (v / m.n()).max(0.0).sqrt()
    }

    /// Standard error of `discarded_weight`.
    pub fn discarded_weight_stderr(&self) -> f64 {
        let Some(m) = &self.moments else { return 0.0 };
        let c = m.cov_vv();
        ((c[1][1] + c[2][2] - 2.0 * c[1][2]) / m.n()).max(0.0).sqrt()
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        let a = self.entries.adjoint();
        self.entries
            .iter()
            .zip(a.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.entries + self.entries.adjoint()).map(|x| x * 0.5);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> Result<String> {
        let d = self.dim();
        let rho = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| ComplexJson {
                        re: self.entries[(i, j)].re,
                        im: self.entries[(i, j)].im,
                    })
                    .collect()
            })
            .collect();
        Ok(serde_json::to_string_pretty(&ResultJson {
            rho,
            herald_probability: self.herald_probability,
            discarded_weight: self.discarded_weight,
            n_samples: self.n_samples,
            seed: self.seed,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: ResultJson = serde_json::from_str(text)?;
        let d = r.rho.len();
        if r.rho.iter().any(|row| row.len() != d) {
            return Err(Error::Shape("rho must be square".into()));
        }
        let entries = DMatrix::from_fn(d, d, |i, j| C64::new(r.rho[i][j].re, r.rho[i][j].im));
        Ok(DensityMatrix::from_parts(
            entries,
            r.herald_probability,
            r.discarded_weight,
            r.n_samples,
            r.seed,
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ResultJson {
    rho: Vec<Vec<ComplexJson>>,
    herald_probability: f64,
    discarded_weight: f64,
    n_samples: usize,
    seed: u64,
}
