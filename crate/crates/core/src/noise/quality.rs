//! Quality factor of exchange oscillations under quasistatic Gaussian noise.
//!
//! With J′ ~ Normal(J, σ_tot) the ensemble average of cos(2πJ′t) is
//! cos(2πJt)·exp(−2π²σ_tot²t²), so the envelope reaches 1/e at
//! t* = 1/(√2πσ_tot) and Q = J·t*.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussHermite;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{DqdError, Result};
use crate::roots::brent;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityModel {
    /// σ_J/J.
    pub sigma_rel: f64,
    /// J-independent width σ₀ in GHz.
    pub sigma_floor_ghz: f64,
}

impl QualityModel {
    pub fn relative(sigma_rel: f64) -> Self {
        QualityModel {
            sigma_rel,
            sigma_floor_ghz: 0.0,
        }
    }

    pub fn floor(sigma_floor_ghz: f64) -> Self {
        QualityModel {
            sigma_rel: 0.0,
            sigma_floor_ghz,
        }
    }

    /// σ_tot = √((σ_rel·J)² + σ₀²).
    pub fn sigma_total(&self, j_ghz: f64) -> f64 {
        (self.sigma_rel * j_ghz).hypot(self.sigma_floor_ghz)
    }

    fn check(&self, j_ghz: f64) -> Result<f64> {
        if !(j_ghz.is_finite() && j_ghz > 0.0) {
            return Err(DqdError::invalid("j_ghz", j_ghz, "must be finite and positive"));
        }
        for (name, v) in [("sigma_rel", self.sigma_rel), ("sigma_floor_ghz", self.sigma_floor_ghz)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(DqdError::invalid(name, v, "must be finite and non-negative"));
            }
        }
        let s = self.sigma_total(j_ghz);
        if s == 0.0 {
            return Err(DqdError::InfiniteQuality);
        }
        Ok(s)
    }
}

pub fn quality_factor(j_ghz: f64, model: &QualityModel) -> Result<f64> {
    let s = model.check(j_ghz)?;
    Ok(j_ghz / (2f64.sqrt() * PI * s))
}

fn envelope_q<F>(j_ghz: f64, sigma: f64, mut envelope: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let target = (-1.0f64).exp();
    // The envelope is monotone; bracket the crossing by doubling.
    let mut hi = 1.0 / sigma;
    while envelope(hi) > target {
        hi *= 2.0;
    }
    let root = brent(|t| Ok(envelope(t) - target), 0.0, hi, 1e-15 * hi, 0.0)?;
    Ok(j_ghz * root.x)
}

/// Q from the Gauss-Hermite average of the phase factor e^{2πi(J′−J)t}.
pub fn numeric_quality(j_ghz: f64, model: &QualityModel, nodes: usize) -> Result<f64> {
    let sigma = model.check(j_ghz)?;
    let n = NonZeroUsize::new(nodes).ok_or(DqdError::invalid("nodes", 0.0, "must be positive"))?;
    let gh = GaussHermite::new(n);
    let pairs = gh.as_node_weight_pairs();
    let norm = PI.sqrt();
    envelope_q(j_ghz, sigma, |t| {
        pairs
            .iter()
            .map(|&(x, w)| w * (2.0 * PI * 2f64.sqrt() * sigma * x * t).cos())
            .sum::<f64>()
            / norm
    })
}

/// Q from a seeded Monte-Carlo ensemble of J′ samples.
pub fn monte_carlo_quality(
    j_ghz: f64,
    model: &QualityModel,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let sigma = model.check(j_ghz)?;
    if samples == 0 {
        return Err(DqdError::invalid("samples", 0.0, "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<f64> = (0..samples)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * z
        })
        .collect();
    let inv = 1.0 / samples as f64;
    envelope_q(j_ghz, sigma, |t| {
        let (c, s) = offsets.iter().fold((0.0, 0.0), |(c, s), d| {
            let ph = 2.0 * PI * d * t;
            (c + ph.cos(), s + ph.sin())
        });
        c.hypot(s) * inv
    })
}
