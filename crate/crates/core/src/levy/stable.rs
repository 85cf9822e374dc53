use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::law::StableLaw;
use super::path::{CadlagPath, Jump};
use crate::error::{Error, Result};

/// Standard totally skewed stable variate `S_α(1, 1, 0)` by the
/// Chambers–Mallows–Stuck transform.
pub fn standard_skewed_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let tan = (PI * alpha / 2.0).tan();
    let b = tan.atan() / alpha;
    let s = (1.0 + tan * tan).powf(1.0 / (2.0 * alpha));
    let v = PI * (rng.random::<f64>() - 0.5);
    let w: f64 = Exp1.sample(rng);
    let avb = alpha * (v + b);
    s * avb.sin() / v.cos().powf(1.0 / alpha)
        * ((v - avb).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Increment over time `h` with `E[exp(-λ ΔX)] = exp(h·ψ(λ))`.
pub fn stable_increment<R: Rng + ?Sized>(law: &StableLaw, h: f64, rng: &mut R) -> f64 {
    let a = law.alpha();
    let sigma = (h * law.scale() * (PI * a / 2.0).cos().abs()).powf(1.0 / a);
    sigma * standard_skewed_stable(a, rng)
}

/// How the path sampler treats jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum JumpLedger {
    /// Exact stable increments; the ledger stays empty.
    Off,
    /// Jumps of size at least `threshold` are simulated one by one and recorded;
    /// smaller ones are replaced by their compensated Gaussian approximation.
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StablePathSpec {
    pub horizon: f64,
    pub step: f64,
    pub start: f64,
    pub ledger: JumpLedger,
}

impl StablePathSpec {
    pub fn new(horizon: f64, step: f64) -> Self {
        StablePathSpec {
            horizon,
            step,
            start: 0.0,
            ledger: JumpLedger::Off,
        }
    }

    pub fn with_start(mut self, start: f64) -> Self {
        self.start = start;
        self
    }

    pub fn with_ledger(mut self, threshold: f64) -> Self {
        self.ledger = JumpLedger::Threshold(threshold);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::param("horizon", format!("{} must be positive", self.horizon)));
        }
        if !(self.step > 0.0 && self.step <= self.horizon) {
            return Err(Error::param(
                "step",
                format!("{} must lie in (0, horizon = {}]", self.step, self.horizon),
            ));
        }
        if let JumpLedger::Threshold(eps) = self.ledger {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::param("ledger threshold", format!("{eps} must be positive")));
            }
        }
        Ok(())
    }
}

/// Grid `0, step, 2·step, …, horizon` (the last cell may be short).
pub(crate) fn time_grid(horizon: f64, step: f64) -> Vec<f64> {
    let n = ((horizon / step) - 1e-9).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    times.push(horizon);
    times
}

/// Spectrally positive stable path on a regular grid.
pub fn sample_stable_path<R: Rng + ?Sized>(
    law: &StableLaw,
    spec: &StablePathSpec,
    rng: &mut R,
) -> Result<CadlagPath> {
    spec.validate()?;
    let times = time_grid(spec.horizon, spec.step);
    let mut values = Vec::with_capacity(times.len());
    let mut jumps = Vec::new();
    let mut x = spec.start;
    values.push(x);
    match spec.ledger {
        JumpLedger::Off => {
            for w in times.windows(2) {
                x += stable_increment(law, w[1] - w[0], rng);
                values.push(x);
            }
        }
        JumpLedger::Threshold(eps) => {
            let big = BigJumps::new(law, eps);
            for w in times.windows(2) {
                let h = w[1] - w[0];
                let count = big.count(h, rng);
                let mut dx = -h * big.compensator + (h * big.small_variance).sqrt() * {
                    let z: f64 = StandardNormal.sample(rng);
                    z
                };
                let first = jumps.len();
                for _ in 0..count {
                    let size = big.size(rng);
                    dx += size;
                    let time = w[0] + h * rng.random::<f64>();
                    jumps.push(Jump {
                        time: time.max(w[0]).min(w[1]),
                        size,
                    });
                }
                jumps[first..].sort_by(|a, b| a.time.total_cmp(&b.time));
                x += dx;
                values.push(x);
            }
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "stable path",
        });
    }
    Ok(CadlagPath::from_parts_unchecked(times, values, jumps))
}

/// Compound Poisson description of the jumps above a threshold.
struct BigJumps {
    alpha: f64,
    eps: f64,
    rate: f64,
    compensator: f64,
    small_variance: f64,
}

impl BigJumps {
    fn new(law: &StableLaw, eps: f64) -> Self {
        let a = law.alpha();
        let c = law.levy_density_constant();
        BigJumps {
            alpha: a,
            eps,
            rate: c * eps.powf(-a) / a,
            compensator: c * eps.powf(1.0 - a) / (a - 1.0),
            small_variance: c * eps.powf(2.0 - a) / (2.0 - a),
        }
    }

    fn count<R: Rng + ?Sized>(&self, h: f64, rng: &mut R) -> u64 {
        let mean = self.rate * h;
        if mean <= 0.0 {
            return 0;
        }
        Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
    }

    /// Pareto tail `P[size ≥ u] = (u/eps)^{-α}`.
    fn size<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = 1.0 - rng.random::<f64>();
        self.eps * u.powf(-1.0 / self.alpha)
    }
}

/// Expected ledger count in `[a, b)` over time `horizon`.
pub fn expected_jump_count(law: &StableLaw, a: f64, b: f64, horizon: f64) -> f64 {
    horizon * law.levy_measure(a, b)
}
