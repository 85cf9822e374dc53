use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares fit of `log P[V ≥ t]` against `log t` over one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub slope: f64,
    pub std_error: f64,
    /// Change of local slope across the window from a quadratic fit.
    pub curvature: f64,
    /// Kish effective sample size of the values inside the window.
    pub effective_samples: f64,
    pub thresholds: usize,
}

impl TailFit {
    /// Curvature small enough for the data to be read as a power law.
    pub fn is_power_law(&self, max_curvature: f64) -> bool {
        self.curvature.abs() <= max_curvature
    }
}

pub const MIN_EFFECTIVE_SAMPLES: usize = 100;
const THRESHOLDS: usize = 11;

fn kish(weights: impl Iterator<Item = f64>) -> f64 {
    let (s, s2) = weights.fold((0.0, 0.0), |(s, s2), w| (s + w, s2 + w * w));
    if s2 > 0.0 {
        s * s / s2
    } else {
        0.0
    }
}

/// Solve the weighted normal equations for a polynomial of degree `deg`.
fn weighted_polyfit(x: &[f64], y: &[f64], w: &[f64], deg: usize) -> (Vec<f64>, Vec<f64>) {
    let k = deg + 1;
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        let pows: Vec<f64> = (0..k).map(|p| xi.powi(p as i32)).collect();
        for r in 0..k {
            b[r] += wi * pows[r] * yi;
            for c in 0..k {
                a[r][c] += wi * pows[r] * pows[c];
            }
        }
    }
    // Gauss–Jordan on [a | I] for the inverse
    let mut inv: Vec<Vec<f64>> = (0..k)
        .map(|r| (0..k).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for c in 0..k {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for r in 0..k {
            if r != col {
                let f = a[r][col];
                for c in 0..k {
                    a[r][c] -= f * a[col][c];
                    inv[r][c] -= f * inv[col][c];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..k).map(|r| (0..k).map(|c| inv[r][c] * b[c]).sum()).collect();
    let var: Vec<f64> = (0..k).map(|r| inv[r][r]).collect();
    (coef, var)
}

/// Fit the tail exponent of weighted `values` over the window `[lo, hi]`.
///
/// The survival function is evaluated at log-spaced thresholds; each point is
/// weighted by the inverse of the binomial variance of `log Ŝ`.
pub fn fit_tail_exponent(values: &[f64], weights: &[f64], window: (f64, f64)) -> Result<TailFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::param("window", format!("need 0 < lo < hi, got ({lo}, {hi})")));
    }
    if values.len() != weights.len() {
        return Err(Error::param(
            "weights",
            format!("{} weights for {} values", weights.len(), values.len()),
        ));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::param("weights", "weights must be non-negative"));
    }
    let inside = kish(
        values
            .iter()
            .zip(weights)
            .filter(|(v, _)| **v >= lo && **v <= hi)
            .map(|(_, w)| *w),
    );
    if inside < MIN_EFFECTIVE_SAMPLES as f64 {
        return Err(Error::InsufficientSamples {
            effective: inside,
            required: MIN_EFFECTIVE_SAMPLES,
        });
    }
    let total: f64 = weights.iter().sum();
    let n_eff = kish(weights.iter().cloned());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut xs = Vec::with_capacity(THRESHOLDS);
    let mut ys = Vec::with_capacity(THRESHOLDS);
    let mut ws = Vec::with_capacity(THRESHOLDS);
    // sweep thresholds from the top down, accumulating the tail weight
    let mut acc = 0.0;
    let mut k = 0;
    for i in (0..THRESHOLDS).rev() {
        let lt = llo + (lhi - llo) * i as f64 / (THRESHOLDS - 1) as f64;
        let t = lt.exp();
        while k < order.len() && values[order[k]] >= t {
            acc += weights[order[k]];
            k += 1;
        }
        let s = acc / total;
        if s > 0.0 && s < 1.0 {
            xs.push(lt);
            ys.push(s.ln());
            ws.push(s * n_eff / (1.0 - s));
        }
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientSamples {
            effective: inside,
            required: MIN_EFFECTIVE_SAMPLES,
        });
    }
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let xc: Vec<f64> = xs.iter().map(|x| x - xm).collect();
    let (lin, var) = weighted_polyfit(&xc, &ys, &ws, 1);
    let (quad, _) = weighted_polyfit(&xc, &ys, &ws, 2);
    Ok(TailFit {
        slope: lin[1],
        std_error: var[1].sqrt(),
        curvature: 2.0 * quad[2] * (lhi - llo),
        effective_samples: inside,
        thresholds: xs.len(),
    })
}
