//! Boundary-length picture of the δ-approximation to QLE(8/3, 0): the
//! unexplored boundary follows the reversed excursion, disks are cut out at
//! its jumps, and the growth tip is redrawn uniformly every `δ` units of time.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{CadlagPath, Excursion, StableLaw};
use crate::rng::{SeedTree, StreamTag};
use crate::sphere::encode::{encode_sphere, inverse_integral_of};
use crate::sphere::{BubbleRecord, SphereSample};
use crate::stats::{ks_uniform, KsResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QleConfig {
    pub delta: f64,
    pub law: StableLaw,
    pub seed: u64,
}

impl QleConfig {
    pub fn new(delta: f64, seed: u64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::param("delta", format!("{delta} must be positive")));
        }
        Ok(QleConfig {
            delta,
            law: StableLaw::three_halves(),
            seed,
        })
    }
}

/// Snapshot at a resampling time `jδ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QleState {
    pub boundary_length: f64,
    /// Tip coordinate on the boundary circle, in `[0, boundary_length)`.
    pub tip: f64,
    pub natural_time: f64,
    pub distance_time: f64,
}

/// A bubble together with where it left the boundary circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Emission {
    pub bubble: BubbleRecord,
    /// Tip coordinate just before the disk is cut out.
    pub tip: f64,
    /// Start of the removed arc, in the coordinates before removal.
    pub arc_start: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub delta: f64,
    pub states: Vec<QleState>,
    pub emissions: Vec<Emission>,
    pub total_distance: f64,
    boundary: CadlagPath,
    clock: Vec<f64>,
    alpha: f64,
}

impl GrowthRecord {
    pub fn bubbles(&self) -> Vec<BubbleRecord> {
        self.emissions.iter().map(|e| e.bubble).collect()
    }

    pub fn lifetime(&self) -> f64 {
        self.boundary.end_time()
    }

    pub fn boundary(&self) -> &CadlagPath {
        &self.boundary
    }
}

fn wrap(x: f64, len: f64) -> f64 {
    if len <= 0.0 {
        return 0.0;
    }
    let r = x.rem_euclid(len);
    if r >= len {
        0.0
    } else {
        r
    }
}

/// Cumulative `∫ 1/X` at each grid point, with the stable profile on pieces
/// touching 0.
fn running_clock(path: &CadlagPath, alpha: f64) -> Result<Vec<f64>> {
    let n = path.len();
    let mut clock = Vec::with_capacity(n);
    clock.push(0.0);
    for i in 0..n - 1 {
        let piece = CadlagPath::new(
            vec![path.times()[i], path.times()[i + 1]],
            vec![path.values()[i], path.values()[i + 1]],
            Vec::new(),
        )?;
        clock.push(clock[i] + inverse_integral_of(&piece, alpha)?);
    }
    Ok(clock)
}

/// Partial `∫ 1/X` from the start of piece `i` to time `t` inside it.
fn partial_clock(path: &CadlagPath, alpha: f64, i: usize, t: f64) -> f64 {
    let (ts, xs) = (path.times(), path.values());
    let (t0, t1) = (ts[i], ts[i + 1]);
    let (a, b) = (xs[i], xs[i + 1]);
    let dt = t1 - t0;
    let u = ((t - t0) / dt).clamp(0.0, 1.0);
    let k = alpha / (alpha - 1.0);
    let rho = 1.0 - 1.0 / alpha;
    if u == 0.0 {
        return 0.0;
    }
    match (a > 0.0, b > 0.0) {
        (true, true) => {
            let xt = a + u * (b - a);
            crate::levy::lamperti::inverse_integral(u * dt, a, xt)
        }
        // X rises from 0 like u^{1/α}
        (false, true) => dt / b * k * u.powf(rho),
        // X falls to 0 like (1-u)^{1/α}
        (true, false) => dt / a * k * (1.0 - (1.0 - u).powf(rho)),
        (false, false) => 0.0,
    }
}

/// Run the growth on the sphere encoded by `excursion`.
///
/// Bubble attributes come from the sphere stream of `config.seed` and tip
/// draws from its growth stream, so the bubble ledger does not depend on δ.
pub fn qle_delta_run(excursion: &Excursion, config: &QleConfig) -> Result<GrowthRecord> {
    if !(config.delta > 0.0) {
        return Err(Error::param("delta", format!("{} must be positive", config.delta)));
    }
    let tree = SeedTree::new(config.seed);
    let sphere: SphereSample = encode_sphere(excursion, 1.0, &mut tree.stream(StreamTag::Sphere, 0));
    let mut tip_rng = tree.stream(StreamTag::Qle, 0);
    let alpha = config.law.alpha();
    let boundary = sphere.boundary_process().path().clone();
    let clock = running_clock(&boundary, alpha)?;
    let total_distance = *clock.last().unwrap();
    let lifetime = boundary.end_time();
    let (ts, xs) = (boundary.times(), boundary.values());

    let mut states = Vec::new();
    let mut emissions = Vec::with_capacity(sphere.bubbles().len());
    let mut tip = 0.0f64;
    let mut bubbles = sphere.bubbles().iter().peekable();
    let mut j = 0u64;
    let mut grid = 0usize;
    loop {
        let reshuffle = j as f64 * config.delta;
        let stop = reshuffle.min(lifetime);
        // advance through grid points and bubbles up to the next resampling time
        while grid + 1 < ts.len() && ts[grid + 1] <= stop {
            let (a, b) = (xs[grid], xs[grid + 1]);
            let t_next = ts[grid + 1];
            while let Some(bub) = bubbles.next_if(|bb| bb.time <= t_next) {
                let len_before = a.max(bub.length);
                let arc_start = if bub.orientation {
                    tip
                } else {
                    wrap(tip - bub.length, len_before)
                };
                emissions.push(Emission {
                    bubble: *bub,
                    tip,
                    arc_start,
                });
                let left = (len_before - bub.length).max(0.0);
                tip = if bub.orientation {
                    wrap(tip, left)
                } else {
                    wrap(tip - bub.length, left)
                };
            }
            // growth inserts new boundary just behind the tip
            if b > a {
                tip = wrap(tip + (b - a), b);
            } else {
                tip = wrap(tip, b);
            }
            grid += 1;
        }
        if reshuffle > lifetime {
            break;
        }
        let x = boundary.value_at(reshuffle);
        tip = if x > 0.0 { tip_rng.random::<f64>() * x } else { 0.0 };
        let i = (ts.partition_point(|&s| s <= reshuffle).max(1) - 1).min(ts.len() - 2);
        let distance_time = clock[i] + partial_clock(&boundary, alpha, i, reshuffle);
        states.push(QleState {
            boundary_length: x,
            tip,
            natural_time: reshuffle,
            distance_time,
        });
        j += 1;
    }
    for bub in bubbles {
        emissions.push(Emission {
            bubble: *bub,
            tip,
            arc_start: tip,
        });
    }
    Ok(GrowthRecord {
        delta: config.delta,
        states,
        emissions,
        total_distance,
        boundary,
        clock,
        alpha,
    })
}

/// `s(t) = ∫_0^t 1/X_u du` along the recorded boundary process.
pub fn distance_clock(record: &GrowthRecord, t: f64) -> Result<f64> {
    let lifetime = record.lifetime();
    if !(0.0..=lifetime).contains(&t) {
        return Err(Error::param("t", format!("{t} outside [0, {lifetime}]")));
    }
    if t == lifetime {
        return Ok(record.total_distance);
    }
    let ts = record.boundary.times();
    let i = (ts.partition_point(|&s| s <= t).max(1) - 1).min(ts.len() - 2);
    Ok(record.clock[i] + partial_clock(&record.boundary, record.alpha, i, t))
}

/// Probability that the growth from boundary length `u` hits a given boundary
/// interval of length `eps`: `min(eps/u, 1)`.
pub fn hitting_probability(u: f64, eps: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::param("u", format!("{u} must be positive")));
    }
    if !(eps >= 0.0) {
        return Err(Error::param("eps", format!("{eps} must be non-negative")));
    }
    Ok((eps / u).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplementTolerances {
    /// Largest Kolmogorov distance accepted as a uniform pushforward.
    pub uniformity: f64,
    /// Largest `|F(d) - (D - d)| / D` accepted.
    pub deviation: f64,
}

impl Default for ComplementTolerances {
    fn default() -> Self {
        ComplementTolerances {
            uniformity: 0.02,
            deviation: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ComplementOutcome {
    /// Uniform pushforward and `F(d) = D - d` within tolerance.
    Pass { deviation: f64, ks_distance: f64 },
    /// The pushforward is not uniform; the lemma says nothing.
    HypothesisUnmet { ks_distance: f64 },
    /// Uniform pushforward but `F` is not the complement; `witness` is the
    /// grid point of largest deviation.
    Fail { witness: f64, deviation: f64, ks_distance: f64 },
}

/// Check that a non-increasing `F` on `[0, D]` whose pushforward of the
/// uniform measure is uniform must be `d ↦ D - d`.
///
/// `values[i] = F(i·D/(n-1))`.
pub fn check_complement_lemma(
    values: &[f64],
    total: f64,
    tol: ComplementTolerances,
) -> Result<ComplementOutcome> {
    let n = values.len();
    if n < 2 || !(total > 0.0) {
        return Err(Error::param("grid", "need at least two points and D > 0"));
    }
    if let Some(i) = (1..n).find(|&i| values[i] > values[i - 1]) {
        return Err(Error::Precondition(format!(
            "F increases between grid points {} and {i}",
            i - 1
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "tabulated F" });
    }
    let scaled: Vec<f64> = values.iter().map(|v| v / total).collect();
    let KsResult { statistic, .. } = ks_uniform(&scaled);
    // the grid itself is at distance up to 1/(2(n-1)) from uniform
    let ks_distance = (statistic - 1.0 / (n - 1) as f64).max(0.0);
    if ks_distance > tol.uniformity {
        return Ok(ComplementOutcome::HypothesisUnmet { ks_distance });
    }
    let step = total / (n - 1) as f64;
    let (witness, deviation) = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let d = i as f64 * step;
            (d, (v - (total - d)).abs() / total)
        })
        .fold((0.0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    if deviation > tol.deviation {
        Ok(ComplementOutcome::Fail {
            witness,
            deviation,
            ks_distance,
        })
    } else {
        Ok(ComplementOutcome::Pass {
            deviation,
            ks_distance,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeetingConfig {
    pub u: f64,
    pub tau: f64,
    pub distance: f64,
}

impl MeetingConfig {
    pub fn new(u: f64, distance: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::param("u", format!("{u} not in [0, 1]")));
        }
        if !(distance >= 0.0 && distance.is_finite()) {
            return Err(Error::param("distance", format!("{distance} must be finite and ≥ 0")));
        }
        Ok(MeetingConfig {
            u,
            tau: u * distance,
            distance,
        })
    }
}

/// `(τ, σ̄) = (U·D, D - U·D)`.
pub fn meeting_bookkeeping(record: &GrowthRecord, meeting: &MeetingConfig) -> Result<(f64, f64)> {
    if (meeting.distance - record.total_distance).abs() > 1e-12 * record.total_distance.max(1.0) {
        return Err(Error::Precondition(format!(
            "meeting distance {} differs from the record's {}",
            meeting.distance, record.total_distance
        )));
    }
    let d = record.total_distance;
    let tau = meeting.u * d;
    let sigma_bar = d - tau;
    debug_assert!((0.0..=d).contains(&tau) && (0.0..=d).contains(&sigma_bar));
    Ok((tau, sigma_bar))
}
