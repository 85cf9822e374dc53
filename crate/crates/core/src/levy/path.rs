use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A recorded upward jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub time: f64,
    pub size: f64,
}

/// Right-continuous path sampled on a grid, with a ledger of resolved jumps.
///
/// Between grid points the path is read by linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CadlagPath {
    times: Vec<f64>,
    values: Vec<f64>,
    jumps: Vec<Jump>,
}

impl CadlagPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>, jumps: Vec<Jump>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::Precondition(format!(
                "path needs matching non-empty grids, got {} times and {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("path times must be strictly increasing".into()));
        }
        if values.iter().chain(times.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "path grid" });
        }
        let (lo, hi) = (times[0], *times.last().unwrap());
        for j in &jumps {
            if !(j.size > 0.0) {
                return Err(Error::Precondition(format!("non-positive jump {} in ledger", j.size)));
            }
            if j.time < lo || j.time > hi {
                return Err(Error::Precondition(format!(
                    "ledger jump at {} outside [{lo}, {hi}]",
                    j.time
                )));
            }
        }
        Ok(CadlagPath {
            times,
            values,
            jumps,
        })
    }

    /// Path that stays at `c` on `[0, horizon]`.
    pub fn constant(c: f64, horizon: f64, points: usize) -> Result<Self> {
        let points = points.max(2);
        let times = (0..points)
            .map(|i| horizon * i as f64 / (points - 1) as f64)
            .collect();
        Self::new(times, vec![c; points], Vec::new())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn first_value(&self) -> f64 {
        self.values[0]
    }

    pub fn last_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Value at `t` by linear interpolation, clamped to the grid range.
    pub fn value_at(&self, t: f64) -> f64 {
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.end_time() {
            return self.last_value();
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }

    /// `t ↦ X(start + end - t)`; ledger times are mirrored and reordered.
    pub fn time_reversed(&self) -> CadlagPath {
        let (lo, hi) = (self.start_time(), self.end_time());
        let times = self.times.iter().rev().map(|t| lo + hi - t).collect();
        let values = self.values.iter().rev().cloned().collect();
        let jumps = self
            .jumps
            .iter()
            .rev()
            .map(|j| Jump {
                time: lo + hi - j.time,
                size: j.size,
            })
            .collect();
        CadlagPath {
            times,
            values,
            jumps,
        }
    }

    /// `t ↦ space · X(t / time)`, applied to grid and ledger.
    pub fn rescaled(&self, time: f64, space: f64) -> CadlagPath {
        CadlagPath {
            times: self.times.iter().map(|t| t * time).collect(),
            values: self.values.iter().map(|v| v * space).collect(),
            jumps: self
                .jumps
                .iter()
                .map(|j| Jump {
                    time: j.time * time,
                    size: j.size * space,
                })
                .collect(),
        }
    }

    pub(crate) fn from_parts_unchecked(times: Vec<f64>, values: Vec<f64>, jumps: Vec<Jump>) -> Self {
        debug_assert!(Self::new(times.clone(), values.clone(), jumps.clone()).is_ok());
        CadlagPath {
            times,
            values,
            jumps,
        }
    }
}
