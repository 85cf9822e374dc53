use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lamperti::{lamperti_levy_to_csbp, log_mean, CsbpPath};
use super::law::StableLaw;
use super::path::CadlagPath;
use super::stable::stable_increment;
use crate::error::{Error, Result};
use crate::rng::{SeedTree, StreamTag};
use crate::stats::{binomial_se, RunningMean};

/// Adaptive simulation of the Lévy path that drives a branching process.
///
/// Steps are `h = (r·x)^α / scale` with the relative resolution `r` growing
/// below `y0` as `r0·(y0/x)^{1/4}` (capped at 1/2), shortened so that the
/// branching clock lands on every requested time. Below `floor·y0` the
/// remaining time to extinction is drawn from its exact conditional law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsbpSimSpec {
    pub y0: f64,
    /// Branching-time horizon; `f64::INFINITY` runs to extinction.
    pub horizon: f64,
    pub resolution: f64,
    pub floor: f64,
    /// Stop once the driving path has run this long.
    pub max_levy_time: f64,
    pub max_steps: usize,
    /// Branching times the clock must hit (to relative accuracy 1e-9).
    pub targets: Vec<f64>,
}

impl CsbpSimSpec {
    pub fn new(y0: f64, horizon: f64) -> Self {
        CsbpSimSpec {
            y0,
            horizon,
            resolution: 0.01,
            floor: 1e-5,
            max_levy_time: f64::INFINITY,
            max_steps: 5_000_000,
            targets: Vec::new(),
        }
    }

    pub fn with_targets(mut self, targets: &[f64]) -> Self {
        self.targets = targets.to_vec();
        self.targets.sort_by(f64::total_cmp);
        self
    }

    pub fn with_resolution(mut self, resolution: f64) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn with_max_levy_time(mut self, t: f64) -> Self {
        self.max_levy_time = t;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.y0 > 0.0 && self.y0.is_finite()) {
            return Err(Error::param("y0", format!("{} must be positive", self.y0)));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::param("horizon", format!("{} must be positive", self.horizon)));
        }
        if !(self.resolution > 0.0 && self.resolution <= 0.5) {
            return Err(Error::param("resolution", format!("{} not in (0, 1/2]", self.resolution)));
        }
        if !(self.floor > 0.0 && self.floor < 1.0) {
            return Err(Error::param("floor", format!("{} not in (0, 1)", self.floor)));
        }
        if !(self.max_levy_time > 0.0) {
            return Err(Error::param("max_levy_time", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Extinct,
    Horizon,
    LevyTime,
    StepBudget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsbpSample {
    pub levy: CadlagPath,
    pub csbp: CsbpPath,
    pub stop: StopReason,
}

/// Remaining extinction time from mass `x`: `P[ζ ≤ τ] = exp(-x·u_∞(τ))`.
fn residual_extinction_time<R: Rng + ?Sized>(law: &StableLaw, x: f64, rng: &mut R) -> f64 {
    let a = law.alpha();
    let e = -(1.0 - rng.random::<f64>()).ln();
    (x / e).powf(a - 1.0) / ((a - 1.0) * law.scale())
}

pub fn simulate_csbp<R: Rng + ?Sized>(
    law: &StableLaw,
    spec: &CsbpSimSpec,
    rng: &mut R,
) -> Result<CsbpSample> {
    spec.validate()?;
    let a = law.alpha();
    let y0 = spec.y0;
    let (mut r, mut x, mut s) = (0.0f64, y0, 0.0f64);
    let mut times = vec![0.0];
    let mut values = vec![y0];
    let mut next_target = 0usize;
    let mut stop = StopReason::StepBudget;
    for _ in 0..spec.max_steps {
        while next_target < spec.targets.len()
            && spec.targets[next_target] - s <= 1e-9 * (1.0 + spec.targets[next_target])
        {
            next_target += 1;
        }
        if s >= spec.horizon * (1.0 - 1e-12) {
            stop = StopReason::Horizon;
            break;
        }
        if r >= spec.max_levy_time {
            stop = StopReason::LevyTime;
            break;
        }
        let res = if x < y0 {
            (spec.resolution * (y0 / x).powf(0.25)).min(0.5)
        } else {
            spec.resolution
        };
        let mut h = (res * x).powf(a) / law.scale();
        let goal = spec
            .targets
            .get(next_target)
            .copied()
            .unwrap_or(f64::INFINITY)
            .min(spec.horizon);
        if goal.is_finite() {
            h = h.min(0.5 * (goal - s) * x + 1e-300);
        }
        h = h.min(spec.max_levy_time - r).max(4.0 * f64::EPSILON * r);
        let nx = x + stable_increment(law, h, rng);
        r += h;
        if nx <= 0.0 {
            times.push(r);
            values.push(nx);
            stop = StopReason::Extinct;
            break;
        }
        s += h / log_mean(x, nx);
        x = nx;
        if x < spec.floor * y0 {
            let tau = residual_extinction_time(law, x, rng);
            let end = r + tau * x * (a - 1.0) / a;
            // the remaining time can be below the resolution of r
            if end > r {
                times.push(r);
                values.push(x);
            }
            r = end;
            times.push(r);
            values.push(0.0);
            stop = StopReason::Extinct;
            break;
        }
        times.push(r);
        values.push(x);
    }
    let levy = CadlagPath::new(times, values, Vec::new())?;
    let csbp = lamperti_levy_to_csbp(&levy, y0, law)?;
    Ok(CsbpSample { levy, csbp, stop })
}

/// Monte Carlo estimate against a closed-form target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McCheck {
    pub estimate: f64,
    pub std_error: f64,
    pub target: f64,
    pub samples: u64,
    pub censored: u64,
}

impl McCheck {
    /// `|estimate - target|` in units of the standard error.
    pub fn z_score(&self) -> f64 {
        (self.estimate - self.target).abs() / self.std_error
    }

    pub fn within(&self, k: f64) -> bool {
        self.z_score() <= k
    }

    pub fn censored_fraction(&self) -> f64 {
        self.censored as f64 / self.samples.max(1) as f64
    }

    /// More than 1% of paths did not reach extinction.
    pub fn flagged(&self) -> bool {
        self.censored_fraction() > 0.01
    }
}

fn ensemble<T: Send>(
    n: u64,
    seed: u64,
    f: impl Fn(&mut rand_chacha::ChaCha12Rng) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    let tree = SeedTree::new(seed);
    (0..n)
        .into_par_iter()
        .map(|i| f(&mut tree.stream(StreamTag::Csbp, i)))
        .collect()
}

/// `exp(-λ Y_t)` for each of `n_paths` paths from `Y_0 = y0`, in path order.
pub fn laplace_samples(law: &StableLaw, y0: f64, t: f64, lambda: f64, n_paths: u64, seed: u64) -> Result<Vec<f64>> {
    let spec = CsbpSimSpec::new(y0, t).with_targets(&[t]);
    spec.validate()?;
    ensemble(n_paths, seed, |rng| {
        let run = simulate_csbp(law, &spec, rng)?;
        Ok((-lambda * run.csbp.value_at(t)).exp())
    })
}

/// `E[exp(-λ Y_t)]` from `Y_0 = y0` against `exp(-y0·u_t(λ))`.
pub fn check_laplace_functional(
    law: &StableLaw,
    y0: f64,
    t: f64,
    lambda: f64,
    n_paths: u64,
    seed: u64,
) -> Result<McCheck> {
    let target = (-y0 * law.u_t(lambda, t)?).exp();
    let acc: RunningMean = laplace_samples(law, y0, t, lambda, n_paths, seed)?.into_iter().collect();
    Ok(McCheck {
        estimate: acc.mean(),
        std_error: acc.std_error(),
        target,
        samples: n_paths,
        censored: 0,
    })
}

/// Extinction time of each path run up to `horizon` at relative step
/// `resolution`; `None` if still alive.
pub fn extinction_samples(
    law: &StableLaw,
    y0: f64,
    horizon: f64,
    resolution: f64,
    n_paths: u64,
    seed: u64,
) -> Result<Vec<Option<f64>>> {
    let spec = CsbpSimSpec::new(y0, horizon).with_resolution(resolution);
    spec.validate()?;
    ensemble(n_paths, seed, |rng| Ok(simulate_csbp(law, &spec, rng)?.csbp.zeta()))
}

/// Empirical `P[ζ ≤ t]` for each `t` against `exp(-y0·u_∞(t))`.
pub fn check_extinction_law(
    law: &StableLaw,
    y0: f64,
    ts: &[f64],
    n_paths: u64,
    seed: u64,
) -> Result<Vec<(f64, McCheck)>> {
    let horizon = ts.iter().cloned().fold(0.0, f64::max);
    let zetas = extinction_samples(law, y0, horizon, CsbpSimSpec::new(y0, horizon).resolution, n_paths, seed)?;
    Ok(ts
        .iter()
        .map(|&t| {
            let hits = zetas.iter().filter(|z| matches!(z, Some(z) if *z <= t)).count() as u64;
            let p = hits as f64 / n_paths as f64;
            let target = law.extinction_cdf(y0, t);
            (
                t,
                McCheck {
                    estimate: p,
                    std_error: binomial_se(target, n_paths),
                    target,
                    samples: n_paths,
                    censored: 0,
                },
            )
        })
        .collect())
}

/// `∫_0^ζ Y_s ds` for each path, `None` when the path is still alive after
/// `max_levy_time` (the Lévy time horizon used for `q`).
pub fn integral_samples(law: &StableLaw, y0: f64, max_levy_time: f64, n_paths: u64, seed: u64) -> Result<Vec<Option<f64>>> {
    let spec = CsbpSimSpec::new(y0, f64::INFINITY)
        .with_resolution(0.05)
        .with_max_levy_time(max_levy_time);
    spec.validate()?;
    ensemble(n_paths, seed, |rng| {
        let run = simulate_csbp(law, &spec, rng)?;
        Ok(match run.stop {
            StopReason::Extinct => Some(run.csbp.integral()),
            _ => None,
        })
    })
}

/// Lévy time horizon for the exponential-integral check at rate `q`.
pub fn integral_horizon(q: f64) -> f64 {
    2000.0 / q
}

/// `E[exp(-q ∫_0^ζ Y_s ds)]` against `exp(-Φ(q)·y0)`. Paths still alive after
/// the Lévy time horizon contribute at most `exp(-q·horizon)`; they are
/// counted as censored and scored as 0.
pub fn check_exponential_integral(
    law: &StableLaw,
    y0: f64,
    q: f64,
    n_paths: u64,
    seed: u64,
) -> Result<McCheck> {
    if !(y0 > 0.0) {
        return Err(Error::param("y0", format!("{y0} must be positive")));
    }
    if !(q > 0.0) {
        return Err(Error::param("q", format!("{q} must be positive")));
    }
    let target = (-law.phi(q)? * y0).exp();
    let vals = integral_samples(law, y0, integral_horizon(q), n_paths, seed)?;
    let censored = vals.iter().filter(|v| v.is_none()).count() as u64;
    let acc: RunningMean = vals.into_iter().map(|v| v.map_or(0.0, |i| (-q * i).exp())).collect();
    Ok(McCheck {
        estimate: acc.mean(),
        std_error: acc.std_error(),
        target,
        samples: n_paths,
        censored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_specs() {
        let law = StableLaw::three_halves();
        let mut rng = SeedTree::new(0).stream(StreamTag::Csbp, 0);
        assert!(simulate_csbp(&law, &CsbpSimSpec::new(0.0, 1.0), &mut rng).is_err());
        assert!(simulate_csbp(&law, &CsbpSimSpec::new(1.0, 0.0), &mut rng).is_err());
        assert!(check_exponential_integral(&law, 1.0, 0.0, 10, 0).is_err());
    }

    #[test]
    fn deep_undershoot_below_the_floor_keeps_times_increasing() {
        // this path jumps from above the floor to within one ulp of extinction
        let law = StableLaw::three_halves();
        let tree = SeedTree::new(SeedTree::new(1).child(0).seed());
        let spec = CsbpSimSpec::new(0.01, 4.0).with_resolution(0.03);
        let run = simulate_csbp(&law, &spec, &mut tree.stream(StreamTag::Csbp, 22454)).unwrap();
        assert_eq!(run.stop, StopReason::Extinct);
        assert!(run.levy.times().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn paths_are_absorbed_and_land_on_targets() {
        let law = StableLaw::three_halves();
        let tree = SeedTree::new(1);
        let spec = CsbpSimSpec::new(0.1, f64::INFINITY);
        for i in 0..200 {
            let run = simulate_csbp(&law, &spec, &mut tree.stream(StreamTag::Csbp, i)).unwrap();
            assert_eq!(run.stop, StopReason::Extinct);
            let zeta = run.csbp.zeta().unwrap();
            assert_eq!(run.csbp.value_at(zeta), 0.0);
            assert_eq!(run.csbp.value_at(zeta * 2.0), 0.0);
            assert!(run.csbp.path().values().iter().all(|&v| v >= 0.0));
        }
        let spec = CsbpSimSpec::new(1.0, 2.0).with_targets(&[0.5, 1.0]);
        for i in 0..50 {
            let run = simulate_csbp(&law, &spec, &mut tree.stream(StreamTag::Csbp, 1000 + i)).unwrap();
            let ts = run.csbp.path().times();
            for target in [0.5, 1.0] {
                if run.csbp.horizon() > target {
                    let k = ts.partition_point(|&t| t < target);
                    let near = (ts[k] - target).abs().min((ts[k - 1] - target).abs());
                    assert!(near < 1e-8, "{near}");
                }
            }
        }
    }

    #[test]
    fn laplace_functional_small_ensemble() {
        let law = StableLaw::three_halves();
        let c = check_laplace_functional(&law, 1.0, 0.5, 2.0, 20_000, 3).unwrap();
        assert!((c.target - 0.3357).abs() < 1e-4);
        assert!(c.within(3.0), "{c:?}");
    }

    #[test]
    fn extinction_law_small_ensemble() {
        let law = StableLaw::three_halves();
        // three correlated comparisons on one ensemble, so a wider band here
        for (t, c) in check_extinction_law(&law, 0.1, &[1.0, 2.0, 4.0], 20_000, 4).unwrap() {
            assert!(c.within(4.0), "t = {t}: {c:?}");
        }
    }

    #[test]
    fn exponential_integral_small_ensemble() {
        let law = StableLaw::three_halves();
        let c = check_exponential_integral(&law, 1.0, 1.0, 20_000, 5).unwrap();
        assert!((c.target - (-1.0f64).exp()).abs() < 1e-15);
        assert!(!c.flagged(), "{c:?}");
        assert!(c.within(3.0), "{c:?}");
        let tiny = check_exponential_integral(&law, 1.0, 1e-9, 200, 5).unwrap();
        assert!((tiny.target - 1.0).abs() < 1e-5);
    }

    #[test]
    fn branching_in_initial_mass() {
        let law = StableLaw::three_halves();
        let one = check_exponential_integral(&law, 1.0, 1.0, 10, 0).unwrap().target;
        let two = check_exponential_integral(&law, 2.0, 1.0, 10, 0).unwrap().target;
        assert!((two - one * one).abs() < 1e-15);
    }
}
