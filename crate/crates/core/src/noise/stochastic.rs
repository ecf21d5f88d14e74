//! Noise strength and the stochastic integrals driving each noisy element.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Error probability together with the noise strength it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseStrength {
    pub p: f64,
    pub eps: f64,
}

impl NoiseStrength {
    pub fn from_p(p: f64) -> Result<Self> {
        Ok(NoiseStrength {
            p,
            eps: epsilon_from_p(p)?,
        })
    }
}

/// `ε = √(−ln(1−2p)/2)`, defined for `0 ≤ p < 1/2`.
///
/// With the element duration normalized to one, this is the strength for
/// which a single loss channel keeps a photon with probability exactly `1−p`.
pub fn epsilon_from_p(p: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::Probability(p));
    }
    Ok((-(-2.0 * p).ln_1p() / 2.0).sqrt())
}

/// Covariance of the stochastic integrals `I_C = ∫ dW cos θ(s)` and
/// `I_S = ∫ dW sin θ(s)` for the linear ramp `θ(s) = θ_eff·s`, `s ∈ [0,1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcsCovariance {
    pub var_c: f64,
    pub var_s: f64,
    pub cov: f64,
}

pub fn ics_covariance(theta_eff: f64) -> IcsCovariance {
    let t = theta_eff;
    if t == 0.0 {
        return IcsCovariance {
            var_c: 1.0,
            var_s: 0.0,
            cov: 0.0,
        };
    }
    let t2 = t * t;
    let var_s = if t.abs() < 1e-3 {
        // series of 1/2 − sin(2t)/(4t), exact cancellation avoided
        t2 / 3.0 - t2 * t2 / 15.0 + 2.0 * t2 * t2 * t2 / 315.0
    } else {
        0.5 - (2.0 * t).sin() / (4.0 * t)
    };
    IcsCovariance {
        var_c: 1.0 - var_s,
        var_s,
        cov: t.sin().powi(2) / (2.0 * t),
    }
}

/// Correlated pair of stochastic integrals for one physical mode.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IcsPair {
    pub i_c: f64,
    pub i_s: f64,
}

/// Map two independent standard normals onto `(I_C, I_S)` through the
/// Cholesky factor of [`ics_covariance`].
pub fn ics_from_normals(theta_eff: f64, z1: f64, z2: f64) -> IcsPair {
    let c = ics_covariance(theta_eff);
    let l11 = c.var_c.sqrt();
    let l21 = c.cov / l11;
    let l22 = (c.var_s - l21 * l21).max(0.0).sqrt();
    IcsPair {
        i_c: l11 * z1,
        i_s: l21 * z1 + l22 * z2,
    }
}

pub fn draw_ics<R: Rng + ?Sized>(theta_eff: f64, rng: &mut R) -> IcsPair {
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    ics_from_normals(theta_eff, z1, z2)
}

/// Draws for a noisy beam splitter: one independent pair per physical mode,
/// with the half-angle ramp `θ_eff = θ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BeamSplitterDraw {
    pub mode0: IcsPair,
    pub mode1: IcsPair,
}

impl BeamSplitterDraw {
    pub fn sample<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> Self {
        BeamSplitterDraw {
            mode0: draw_ics(theta / 2.0, rng),
            mode1: draw_ics(theta / 2.0, rng),
        }
    }
}

/// Wiener increments of a depolarization layer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DepolarizingDraw {
    pub w_x: f64,
    pub w_y: f64,
    pub w_z: f64,
}

impl DepolarizingDraw {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        DepolarizingDraw {
            w_x: rng.sample(StandardNormal),
            w_y: rng.sample(StandardNormal),
            w_z: rng.sample(StandardNormal),
        }
    }
}

/// Wiener increment of a lossy guide or detector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossDraw {
    pub w: f64,
}

impl LossDraw {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        LossDraw {
            w: rng.sample(StandardNormal),
        }
    }
}
