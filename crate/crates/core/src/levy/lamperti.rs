use serde::{Deserialize, Serialize};

use super::law::StableLaw;
use super::path::{CadlagPath, Jump};
use crate::error::{Error, Result};

/// Logarithmic mean `(b - a) / ln(b / a)` of two positive numbers.
pub(crate) fn log_mean(a: f64, b: f64) -> f64 {
    let r = b / a;
    if (r - 1.0).abs() < 1e-6 {
        // series in x = r - 1 keeps full precision near a = b
        let x = r - 1.0;
        a * (1.0 + x / 2.0 - x * x / 12.0 + x * x * x / 24.0)
    } else {
        (b - a) / r.ln()
    }
}

/// `∫ 1/X` over a segment where `X` moves linearly from `a > 0` to `b > 0`.
pub(crate) fn inverse_integral(dt: f64, a: f64, b: f64) -> f64 {
    dt / log_mean(a, b)
}

/// `∫ 1/X` over a final segment where `X` falls from `a` to 0. The process is
/// taken to vanish like `(ζ - r)^{1/α}`, the stable first-passage profile.
pub(crate) fn terminal_inverse_integral(dt: f64, a: f64, alpha: f64) -> f64 {
    dt * alpha / ((alpha - 1.0) * a)
}

/// Branching process trajectory obtained by the Lamperti time change.
///
/// Between grid points `Y` is read geometrically (constant relative rate), and
/// on the final segment before extinction as `a·(1 - u)^{1/(α-1)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsbpPath {
    path: CadlagPath,
    y0: f64,
    zeta: Option<f64>,
    alpha: f64,
}

impl CsbpPath {
    pub fn new(path: CadlagPath, zeta: Option<f64>, alpha: f64) -> Result<Self> {
        let v = path.values();
        if path.start_time() != 0.0 {
            return Err(Error::Precondition("branching path must start at time 0".into()));
        }
        if !(v[0] > 0.0) {
            return Err(Error::param("y0", format!("{} must be positive", v[0])));
        }
        if v.iter().any(|&y| y < 0.0) {
            return Err(Error::Precondition("branching path must be non-negative".into()));
        }
        match zeta {
            Some(z) => {
                if path.end_time() != z || path.last_value() != 0.0 {
                    return Err(Error::Precondition(
                        "extinct path must end at 0 at its extinction time".into(),
                    ));
                }
                if v[..v.len() - 1].iter().any(|&y| y == 0.0) {
                    return Err(Error::Precondition("path touches 0 before extinction".into()));
                }
            }
            None => {
                if v.iter().any(|&y| y == 0.0) {
                    return Err(Error::Precondition("surviving path touches 0".into()));
                }
            }
        }
        Ok(CsbpPath {
            y0: v[0],
            path,
            zeta,
            alpha,
        })
    }

    pub fn path(&self) -> &CadlagPath {
        &self.path
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    /// Extinction time, if it happened within the simulated horizon.
    pub fn zeta(&self) -> Option<f64> {
        self.zeta
    }

    pub fn horizon(&self) -> f64 {
        self.path.end_time()
    }

    /// `Y_t`; 0 after extinction, the last value past a surviving horizon.
    pub fn value_at(&self, t: f64) -> f64 {
        let (times, values) = (self.path.times(), self.path.values());
        if t <= 0.0 {
            return self.y0;
        }
        if t >= self.path.end_time() {
            return self.path.last_value();
        }
        let i = times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (times[i], times[i + 1]);
        let (a, b) = (values[i], values[i + 1]);
        let u = (t - t0) / (t1 - t0);
        if b == 0.0 {
            a * (1.0 - u).powf(1.0 / (self.alpha - 1.0))
        } else {
            a * (b / a).powf(u)
        }
    }

    /// `∫_0^{horizon} Y_s ds`, consistent with the inverse time change.
    pub fn integral(&self) -> f64 {
        levy_clock(self)
            .last()
            .copied()
            .unwrap_or(0.0)
    }
}

/// `s(r) = ∫_0^r 1/X` at each grid time up to absorption.
fn csbp_clock(path: &CadlagPath, alpha: f64) -> (Vec<f64>, Vec<f64>, Option<(usize, f64)>) {
    let (r, x) = (path.times(), path.values());
    let mut s = Vec::with_capacity(r.len());
    let mut y = Vec::with_capacity(r.len());
    s.push(0.0);
    y.push(x[0]);
    for i in 0..r.len() - 1 {
        let dr = r[i + 1] - r[i];
        let (a, b) = (x[i], x[i + 1]);
        if b > 0.0 {
            s.push(s[i] + inverse_integral(dr, a, b));
            y.push(b);
        } else {
            let hit = dr * a / (a - b);
            let zeta = s[i] + terminal_inverse_integral(hit, a, alpha);
            s.push(zeta);
            y.push(0.0);
            return (s, y, Some((i, r[i] + hit)));
        }
    }
    (s, y, None)
}

/// Clock of a piecewise-linear path at time `t` inside segment `i`.
fn clock_inside(path: &CadlagPath, s: &[f64], i: usize, t: f64) -> f64 {
    let (r, x) = (path.times(), path.values());
    if t <= r[i] {
        return s[i];
    }
    if t >= r[i + 1] {
        return s[i + 1];
    }
    let xt = x[i] + (t - r[i]) / (r[i + 1] - r[i]) * (x[i + 1] - x[i]);
    s[i] + inverse_integral(t - r[i], x[i], xt)
}

/// Lamperti transform `Y_t = X_{s*(t)}`, `s(r) = ∫_0^r 1/X_u du`, absorbing at
/// the first grid value `≤ 0`.
pub fn lamperti_levy_to_csbp(path: &CadlagPath, y0: f64, law: &StableLaw) -> Result<CsbpPath> {
    if !(y0 > 0.0) {
        return Err(Error::param("y0", format!("{y0} must be positive")));
    }
    if path.first_value() != y0 {
        return Err(Error::Precondition(format!(
            "path starts at {} rather than y0 = {y0}",
            path.first_value()
        )));
    }
    let (s, y, hit) = csbp_clock(path, law.alpha());
    let zeta = hit.map(|_| *s.last().unwrap());
    let cutoff = hit.map(|(_, rh)| rh).unwrap_or(f64::INFINITY);
    let times = path.times();
    let jumps = path
        .jumps()
        .iter()
        .filter(|j| j.time < cutoff)
        .map(|j| {
            let i = (times.partition_point(|&t| t <= j.time) - 1).min(times.len() - 2);
            Jump {
                time: clock_inside(path, &s, i, j.time),
                size: j.size,
            }
        })
        .collect();
    CsbpPath::new(CadlagPath::new(s, y, jumps)?, zeta, law.alpha())
}

/// Clock `t(s) = ∫_0^s Y_u du` at each grid time.
fn levy_clock(csbp: &CsbpPath) -> Vec<f64> {
    let (s, y) = (csbp.path.times(), csbp.path.values());
    let mut t = Vec::with_capacity(s.len());
    t.push(0.0);
    for i in 0..s.len() - 1 {
        let ds = s[i + 1] - s[i];
        let dt = if y[i + 1] > 0.0 {
            ds * log_mean(y[i], y[i + 1])
        } else {
            ds * y[i] * (csbp.alpha - 1.0) / csbp.alpha
        };
        t.push(t[i] + dt);
    }
    t
}

/// Inverse Lamperti transform `X_s = Y_{t*(s)}`, `t(s) = ∫_0^s Y_u du`; an
/// extinct path maps to a Lévy path ending at 0 at time `t(ζ)`.
pub fn lamperti_csbp_to_levy(csbp: &CsbpPath) -> Result<CadlagPath> {
    let t = levy_clock(csbp);
    let s = csbp.path.times();
    let y = csbp.path.values();
    let jumps = csbp
        .path
        .jumps()
        .iter()
        .map(|j| {
            let i = (s.partition_point(|&u| u <= j.time) - 1).min(s.len() - 2);
            let du = j.time - s[i];
            let time = if du <= 0.0 {
                t[i]
            } else if j.time >= s[i + 1] {
                t[i + 1]
            } else if y[i + 1] > 0.0 {
                let frac = du / (s[i + 1] - s[i]);
                let yt = y[i] * (y[i + 1] / y[i]).powf(frac);
                t[i] + du * log_mean(y[i], yt)
            } else {
                t[i]
            };
            Jump { time, size: j.size }
        })
        .collect();
    CadlagPath::new(t, y.to_vec(), jumps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn law() -> StableLaw {
        StableLaw::three_halves()
    }

    #[test]
    fn constant_paths_are_fixed_points() {
        let c = 2.5;
        let x = CadlagPath::constant(c, 4.0, 17).unwrap();
        let y = lamperti_levy_to_csbp(&x, c, &law()).unwrap();
        assert!(y.zeta().is_none());
        assert!(y.path().values().iter().all(|&v| v == c));
        assert!((y.horizon() - 4.0 / c).abs() < 1e-12);
        for t in [0.1, 0.7, 1.5] {
            assert_eq!(y.value_at(t), c);
        }
        let back = lamperti_csbp_to_levy(&y).unwrap();
        assert!(back.values().iter().all(|&v| v == c));
        assert!((back.end_time() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn absorption_at_first_nonpositive_value() {
        let x = CadlagPath::new(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![1.0, 0.5, -0.5, 2.0],
            vec![Jump { time: 2.5, size: 2.5 }],
        )
        .unwrap();
        let y = lamperti_levy_to_csbp(&x, 1.0, &law()).unwrap();
        assert_eq!(y.path().len(), 3);
        assert_eq!(y.path().last_value(), 0.0);
        assert!(y.path().jumps().is_empty());
        let zeta = y.zeta().unwrap();
        assert_eq!(y.value_at(zeta + 1.0), 0.0);
        // segment 2 reaches 0 at r = 1.5, the endpoint rule gives 0.5·3 / 0.5
        let expected = (0.5f64).ln() / -0.5 + 0.5 * 1.5 / (0.5 * 0.5);
        assert!((zeta - expected).abs() < 1e-12);
        let back = lamperti_csbp_to_levy(&y).unwrap();
        assert_eq!(back.last_value(), 0.0);
        assert!((back.end_time() - 1.5).abs() < 1e-12);
        assert!(lamperti_levy_to_csbp(&x, 2.0, &law()).is_err());
        assert!(lamperti_levy_to_csbp(&x, 0.0, &law()).is_err());
    }

    #[test]
    fn log_mean_is_smooth_across_the_series_switch() {
        for d in [1e-9f64, 1e-7, 9e-7, 1.1e-6, 1e-5] {
            let a = 3.0;
            let exact = (d * a) / d.ln_1p();
            assert!((log_mean(a, a * (1.0 + d)) / exact - 1.0).abs() < 1e-12);
        }
    }

    fn arb_positive_path() -> impl Strategy<Value = CadlagPath> {
        (2usize..60, any::<u64>()).prop_map(|(n, seed)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut times = vec![0.0];
            let mut values = vec![1.0 + rng.random::<f64>()];
            let mut jumps = Vec::new();
            for _ in 1..n {
                let t = times.last().unwrap() + 0.01 + rng.random::<f64>();
                let v: f64 = values.last().unwrap() * (0.3 + 1.4 * rng.random::<f64>());
                if rng.random::<f64>() < 0.3 {
                    jumps.push(Jump {
                        time: t,
                        size: 0.1 + rng.random::<f64>(),
                    });
                }
                times.push(t);
                values.push(v);
            }
            if rng.random::<f64>() < 0.5 {
                let t = times.last().unwrap() + 0.5;
                times.push(t);
                values.push(-0.1);
            }
            CadlagPath::new(times, values, jumps).unwrap()
        })
    }

    proptest! {
        #[test]
        fn round_trip_levy_csbp_levy(x in arb_positive_path()) {
            let y = lamperti_levy_to_csbp(&x, x.first_value(), &law()).unwrap();
            let back = lamperti_csbp_to_levy(&y).unwrap();
            let n = back.len();
            prop_assert!(n <= x.len());
            for i in 0..n - 1 {
                prop_assert!((back.times()[i] - x.times()[i]).abs() <= 1e-9 * (1.0 + x.times()[i]));
                prop_assert_eq!(back.values()[i], x.values()[i]);
            }
            prop_assert_eq!(back.jumps().len(), y.path().jumps().len());
        }

        #[test]
        fn round_trip_csbp_levy_csbp(x in arb_positive_path()) {
            let y = lamperti_levy_to_csbp(&x, x.first_value(), &law()).unwrap();
            let xx = lamperti_csbp_to_levy(&y).unwrap();
            let yy = lamperti_levy_to_csbp(&xx, xx.first_value(), &law()).unwrap();
            prop_assert_eq!(yy.path().len(), y.path().len());
            prop_assert_eq!(yy.zeta().is_some(), y.zeta().is_some());
            let horizon = y.horizon();
            let mut sup: f64 = 0.0;
            for k in 0..=200 {
                let t = horizon * k as f64 / 200.0;
                sup = sup.max((yy.value_at(t) - y.value_at(t)).abs());
            }
            prop_assert!(sup <= 1e-8 * y.path().sup(), "sup = {}", sup);
            for (a, b) in yy.path().jumps().iter().zip(y.path().jumps()) {
                prop_assert!((a.time - b.time).abs() <= 1e-9 * (1.0 + b.time));
            }
        }
    }
}
