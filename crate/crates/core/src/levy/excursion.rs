use rand::Rng;
use rand_distr::{Distribution, Zeta};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::law::StableLaw;
use super::path::{CadlagPath, Jump};
use crate::error::{Error, Result};
use crate::stats::zeta;

/// Positive excursion: starts and ends at 0, strictly positive in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Excursion {
    path: CadlagPath,
}

impl Excursion {
    pub fn new(path: CadlagPath) -> Result<Self> {
        let v = path.values();
        if path.len() < 2 {
            return Err(Error::Precondition("excursion needs at least two grid points".into()));
        }
        if path.start_time() != 0.0 {
            return Err(Error::Precondition("excursion must start at time 0".into()));
        }
        if v[0] != 0.0 || *v.last().unwrap() != 0.0 {
            return Err(Error::Precondition("excursion must start and end at 0".into()));
        }
        if v[1..v.len() - 1].iter().any(|&x| !(x > 0.0)) {
            return Err(Error::Precondition("excursion must be positive in the interior".into()));
        }
        Ok(Excursion { path })
    }

    pub fn path(&self) -> &CadlagPath {
        &self.path
    }

    pub fn lifetime(&self) -> f64 {
        self.path.end_time()
    }

    /// `e* = sup e`.
    pub fn max(&self) -> f64 {
        self.path.sup()
    }

    pub fn jumps(&self) -> &[Jump] {
        self.path.jumps()
    }

    /// The reversed process `t ↦ e(T - t)`.
    pub fn time_reversed(&self) -> Excursion {
        Excursion {
            path: self.path.time_reversed(),
        }
    }

    /// `t ↦ λ e(t / λ^α)`, which maps the lifetime `T` to `λ^α T`.
    pub fn stable_rescaled(&self, lambda: f64, alpha: f64) -> Excursion {
        Excursion {
            path: self.path.rescaled(lambda.powf(alpha), lambda),
        }
    }
}

/// Downward skip-free step law `P[-1] = p`, `P[k] = c·k^{-1-α}` for `k ≥ 1`,
/// with `p` and `c` fixed by normalization and zero mean.
///
/// For `α = 3/2`: `c ≈ 0.252917`, `p ≈ 0.660714`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepLaw {
    alpha: f64,
    p_down: f64,
    c: f64,
    space_constant: f64,
}

impl StepLaw {
    pub fn new(law: &StableLaw) -> Self {
        let a = law.alpha();
        // p + c·ζ(1+α) = 1 and -p + c·ζ(α) = 0
        let c = 1.0 / (zeta(1.0 + a) + zeta(a));
        let p_down = c * zeta(a);
        let gamma_neg_alpha = gamma(2.0 - a) / (a * (a - 1.0));
        let space_constant = (c * gamma_neg_alpha / law.scale()).powf(1.0 / a);
        StepLaw {
            alpha: a,
            p_down,
            c,
            space_constant,
        }
    }

    pub fn p_down(&self) -> f64 {
        self.p_down
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `κ` such that `W_{⌊nt⌋} / (κ n^{1/α})` converges to the stable process
    /// with exponent `scale·λ^α`.
    pub fn space_constant(&self) -> f64 {
        self.space_constant
    }

    pub fn prob(&self, k: i64) -> f64 {
        match k {
            -1 => self.p_down,
            k if k >= 1 => self.c * (k as f64).powf(-1.0 - self.alpha),
            _ => 0.0,
        }
    }

    fn sampler(&self) -> StepSampler {
        StepSampler {
            p_down: self.p_down,
            up: Zeta::new(1.0 + self.alpha).expect("1 + α > 1"),
        }
    }
}

struct StepSampler {
    p_down: f64,
    up: Zeta<f64>,
}

impl StepSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        if rng.random::<f64>() < self.p_down {
            -1
        } else {
            let k = self.up.sample(rng);
            if k >= 9.0e15 {
                i64::MAX / 4
            } else {
                k as i64
            }
        }
    }
}

/// Bridge of `m` steps summing to `-1`, then rotated by the cycle lemma into a
/// path that first hits `-1` at step `m`.
fn lukasiewicz_path<R: Rng + ?Sized>(steps: &StepLaw, m: usize, rng: &mut R) -> Vec<i64> {
    let sampler = steps.sampler();
    let mut bridge = vec![0i64; m];
    loop {
        let mut sum = 0i64;
        for b in bridge.iter_mut().take(m - 1) {
            *b = sampler.sample(rng);
            sum = sum.saturating_add(*b);
        }
        let last = -1 - sum;
        let p = steps.prob(last);
        if p > 0.0 && rng.random::<f64>() * steps.p_down < p {
            bridge[m - 1] = last;
            break;
        }
    }
    // rotate to start just after the first time the minimum is attained
    let mut s = 0i64;
    let (mut min, mut argmin) = (i64::MAX, 0usize);
    for (i, b) in bridge.iter().enumerate() {
        s += b;
        if s < min {
            min = s;
            argmin = i + 1;
        }
    }
    bridge.rotate_left(argmin % m);
    bridge
}

/// Unscaled integer excursion of exactly `n_steps` steps: an up-step followed
/// by a Łukasiewicz path of `n_steps - 1` steps.
pub(crate) fn integer_excursion<R: Rng + ?Sized>(
    steps: &StepLaw,
    n_steps: usize,
    rng: &mut R,
) -> Vec<i64> {
    let walk = lukasiewicz_path(steps, n_steps - 1, rng);
    let mut e = Vec::with_capacity(n_steps + 1);
    e.push(0);
    e.push(1);
    let mut level = 1i64;
    for a in walk {
        level += a;
        e.push(level);
    }
    e
}

/// Excursion of the skip-free walk with exactly `n_steps` steps, rescaled to
/// lifetime 1 (time by `1/n`, space by `1/(κ n^{1/α})`).
pub fn sample_normalized_excursion<R: Rng + ?Sized>(
    law: &StableLaw,
    n_steps: usize,
    rng: &mut R,
) -> Result<Excursion> {
    let steps = StepLaw::new(law);
    normalized_with(&steps, n_steps, rng)
}

pub(crate) fn normalized_with<R: Rng + ?Sized>(
    steps: &StepLaw,
    n_steps: usize,
    rng: &mut R,
) -> Result<Excursion> {
    if n_steps < 2 {
        return Err(Error::param("n_steps", format!("{n_steps} < 2")));
    }
    if n_steps == 3 {
        // an up-step followed by two steps in {-1, 1, 2, ...} summing to -1 is impossible
        return Err(Error::param("n_steps", "no excursion has exactly 3 steps without zero steps"));
    }
    let e = integer_excursion(steps, n_steps, rng);
    let n = n_steps as f64;
    let space = 1.0 / (steps.space_constant() * n.powf(1.0 / steps.alpha));
    let times: Vec<f64> = (0..=n_steps).map(|i| i as f64 / n).collect();
    let values: Vec<f64> = e.iter().map(|&v| v as f64 * space).collect();
    let jumps = e
        .windows(2)
        .enumerate()
        .skip(1)
        .filter(|(_, w)| w[1] > w[0])
        .map(|(i, w)| Jump {
            time: (i + 1) as f64 / n,
            size: (w[1] - w[0]) as f64 * space,
        })
        .collect();
    Excursion::new(CadlagPath::from_parts_unchecked(times, values, jumps))
}

/// Lifetime proposal for Itô excursions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LifetimeProposal {
    /// Draw `T` from the lifetime density `t^{-1-1/α}` itself.
    Native,
    /// Draw `log T` uniformly and correct with the importance weight.
    LogUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItoSpec {
    pub t_min: f64,
    pub t_max: f64,
    /// Walk steps used for the normalized shape of every excursion.
    pub n_steps: usize,
    pub proposal: LifetimeProposal,
}

impl ItoSpec {
    pub fn new(t_min: f64, t_max: f64, n_steps: usize) -> Self {
        ItoSpec {
            t_min,
            t_max,
            n_steps,
            proposal: LifetimeProposal::Native,
        }
    }

    pub fn log_uniform(mut self) -> Self {
        self.proposal = LifetimeProposal::LogUniform;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max.is_finite()) {
            return Err(Error::param(
                "lifetime window",
                format!("need 0 < t_min < t_max, got [{}, {}]", self.t_min, self.t_max),
            ));
        }
        if self.n_steps < 2 {
            return Err(Error::param("n_steps", format!("{} < 2", self.n_steps)));
        }
        Ok(())
    }
}

/// Sample from the excursion measure restricted to lifetimes in a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedExcursion {
    pub excursion: Excursion,
    /// Weighted averages of `f` estimate `∫ f dN` over the window, with the
    /// lifetime density normalized to `t^{-1-1/α}`.
    pub weight: f64,
}

/// `∫_{t_min}^{t_max} t^{-1-1/α} dt`.
pub fn lifetime_mass(alpha: f64, t_min: f64, t_max: f64) -> f64 {
    alpha * (t_min.powf(-1.0 / alpha) - t_max.powf(-1.0 / alpha))
}

/// Itô excursion with lifetime in `[t_min, t_max]`: a normalized excursion
/// stretched to lifetime `T` in time and by `T^{1/α}` in space.
pub fn sample_ito_excursion<R: Rng + ?Sized>(
    law: &StableLaw,
    spec: &ItoSpec,
    rng: &mut R,
) -> Result<WeightedExcursion> {
    spec.validate()?;
    let steps = StepLaw::new(law);
    ito_with(&steps, spec, rng)
}

pub(crate) fn ito_with<R: Rng + ?Sized>(
    steps: &StepLaw,
    spec: &ItoSpec,
    rng: &mut R,
) -> Result<WeightedExcursion> {
    let a = steps.alpha;
    let (lo, hi) = (spec.t_min, spec.t_max);
    let (t, weight) = match spec.proposal {
        LifetimeProposal::Native => {
            let (x0, x1) = (lo.powf(-1.0 / a), hi.powf(-1.0 / a));
            let u: f64 = rng.random();
            let t = (x0 - u * (x0 - x1)).powf(-a).clamp(lo, hi);
            (t, lifetime_mass(a, lo, hi))
        }
        LifetimeProposal::LogUniform => {
            let span = (hi / lo).ln();
            let t = (lo.ln() + rng.random::<f64>() * span).exp().clamp(lo, hi);
            (t, t.powf(-1.0 / a) * span)
        }
    };
    let shape = normalized_with(steps, spec.n_steps, rng)?;
    Ok(WeightedExcursion {
        excursion: Excursion {
            path: shape.path.rescaled(t, t.powf(1.0 / a)),
        },
        weight,
    })
}
