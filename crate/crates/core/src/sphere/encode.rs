use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::lamperti::{inverse_integral, terminal_inverse_integral};
use crate::levy::{CadlagPath, Excursion};

/// A disk cut out by the exploration, known through its boundary length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleRecord {
    /// Time along the boundary-length process at which the disk is cut out.
    pub time: f64,
    pub length: f64,
    /// `false`/`true` for the two orientations.
    pub orientation: bool,
    /// Boundary coordinate in `[0, 1)`.
    pub marked_point: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightKind {
    Unweighted,
    /// Weighted by the lifetime `T`.
    Lifetime,
    /// Weighted by the distance `D = ∫ 1/X`.
    Distance,
}

impl std::fmt::Display for WeightKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            WeightKind::Unweighted => "unweighted",
            WeightKind::Lifetime => "lifetime-weighted",
            WeightKind::Distance => "distance-weighted",
        };
        f.write_str(s)
    }
}

/// Excursion encoding of a doubly marked sphere.
///
/// The boundary process is `X_t = e(T - t)`; bubbles are listed in the order
/// the exploration cuts them out, i.e. increasing `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSample {
    boundary: Excursion,
    bubbles: Vec<BubbleRecord>,
    pub weight: f64,
}

impl SphereSample {
    pub fn boundary_process(&self) -> &Excursion {
        &self.boundary
    }

    pub fn bubbles(&self) -> &[BubbleRecord] {
        &self.bubbles
    }

    pub fn lifetime(&self) -> f64 {
        self.boundary.lifetime()
    }

    pub fn max(&self) -> f64 {
        self.boundary.max()
    }

    /// Same sphere explored from the other marked point.
    pub fn time_reversed(&self) -> SphereSample {
        let t = self.lifetime();
        let mut bubbles: Vec<BubbleRecord> = self
            .bubbles
            .iter()
            .rev()
            .map(|b| BubbleRecord {
                time: t - b.time,
                ..*b
            })
            .collect();
        bubbles.sort_by(|a, b| a.time.total_cmp(&b.time));
        SphereSample {
            boundary: self.boundary.time_reversed(),
            bubbles,
            weight: self.weight,
        }
    }

    /// Sample built directly from a boundary-length path (for synthetic checks).
    pub fn from_boundary(boundary: Excursion, weight: f64) -> SphereSample {
        SphereSample {
            bubbles: Vec::new(),
            boundary,
            weight,
        }
    }
}

/// Attach one bubble per jump of `e`, each with an independent uniform
/// orientation and marked point; the boundary process is the reversal of `e`.
pub fn encode_sphere<R: Rng + ?Sized>(excursion: &Excursion, weight: f64, rng: &mut R) -> SphereSample {
    let boundary = excursion.time_reversed();
    let bubbles = boundary
        .jumps()
        .iter()
        .map(|j| BubbleRecord {
            time: j.time,
            length: j.size,
            orientation: rng.random::<bool>(),
            marked_point: rng.random::<f64>(),
        })
        .collect();
    SphereSample {
        boundary,
        bubbles,
        weight,
    }
}

/// `∫ 1/X` over the whole path. Pieces are integrated exactly for the linear
/// interpolant; pieces touching 0 use the stable endpoint profile.
pub(crate) fn inverse_integral_of(path: &CadlagPath, alpha: f64) -> Result<f64> {
    let (t, x) = (path.times(), path.values());
    let mut total = 0.0;
    for i in 0..t.len() - 1 {
        let dt = t[i + 1] - t[i];
        let (a, b) = (x[i], x[i + 1]);
        let piece = match (a > 0.0, b > 0.0) {
            (true, true) => inverse_integral(dt, a, b),
            (true, false) => terminal_inverse_integral(dt, a, alpha),
            (false, true) => terminal_inverse_integral(dt, b, alpha),
            (false, false) => {
                return Err(Error::Precondition(format!(
                    "boundary process vanishes on [{}, {}]",
                    t[i],
                    t[i + 1]
                )))
            }
        };
        total += piece;
    }
    if !total.is_finite() {
        return Err(Error::NonFinite {
            context: "quantum distance",
        });
    }
    Ok(total)
}

/// `D = ∫_0^T 1/X_u du` along the boundary process.
pub fn quantum_distance(sample: &SphereSample, alpha: f64) -> Result<f64> {
    inverse_integral_of(sample.boundary.path(), alpha)
}
