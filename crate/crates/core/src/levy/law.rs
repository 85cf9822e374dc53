use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Spectrally positive α-stable law with Laplace exponent `ψ(λ) = scale·λ^α`,
/// i.e. `E[exp(-λ(X_t - X_0))] = exp(t·ψ(λ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableLaw {
    alpha: f64,
    scale: f64,
}

impl Default for StableLaw {
    fn default() -> Self {
        StableLaw {
            alpha: 1.5,
            scale: 1.0,
        }
    }
}

impl StableLaw {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::param("alpha", format!("{alpha} not in (1,2)")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param("scale", format!("{scale} must be positive")));
        }
        Ok(StableLaw { alpha, scale })
    }

    /// The 3/2-stable law with `ψ(λ) = λ^{3/2}`.
    pub fn three_halves() -> Self {
        Self::default()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Positivity parameter `ρ = 1 - 1/α`.
    pub fn rho(&self) -> f64 {
        1.0 - 1.0 / self.alpha
    }

    /// Branching mechanism / Laplace exponent.
    pub fn psi(&self, lambda: f64) -> f64 {
        self.scale * lambda.powf(self.alpha)
    }

    /// Constant `C` of the Lévy density `C·u^{-1-α}`; `C = scale / Γ(-α)`.
    pub fn levy_density_constant(&self) -> f64 {
        let a = self.alpha;
        // Γ(-α) = Γ(2-α) / (α(α-1)) for α in (1,2)
        self.scale * a * (a - 1.0) / gamma(2.0 - a)
    }

    /// Lévy measure of `[a, b)`.
    pub fn levy_measure(&self, a: f64, b: f64) -> f64 {
        let al = self.alpha;
        self.levy_density_constant() / al * (a.powf(-al) - b.powf(-al))
    }

    /// CSBP Laplace functional `u_t(λ)`, the solution of `∂u/∂t = -ψ(u)`, `u_0 = λ`.
    pub fn u_t(&self, lambda: f64, t: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::param("lambda", format!("{lambda} must be positive")));
        }
        if !(t >= 0.0) {
            return Err(Error::param("t", format!("{t} must be non-negative")));
        }
        let a = self.alpha;
        Ok((lambda.powf(1.0 - a) + self.scale * (a - 1.0) * t).powf(1.0 / (1.0 - a)))
    }

    /// `lim_{λ→∞} u_t(λ) = ((α-1)·scale·t)^{-1/(α-1)}`; `4/t²` for the 3/2 law.
    pub fn u_t_infinity(&self, t: f64) -> f64 {
        let a = self.alpha;
        (self.scale * (a - 1.0) * t).powf(1.0 / (1.0 - a))
    }

    /// `P[ζ ≤ t]` for the CSBP started from `y0`.
    pub fn extinction_cdf(&self, y0: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        (-y0 * self.u_t_infinity(t)).exp()
    }

    /// Right inverse of `ψ`: `Φ(q) = sup{θ ≥ 0 : ψ(θ) = q} = (q/scale)^{1/α}`.
    pub fn phi(&self, q: f64) -> Result<f64> {
        if !(q >= 0.0) {
            return Err(Error::param("q", format!("{q} must be non-negative")));
        }
        Ok((q / self.scale).powf(1.0 / self.alpha))
    }
}
