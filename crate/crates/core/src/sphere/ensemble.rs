use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::encode::{encode_sphere, quantum_distance, SphereSample, WeightKind};
use crate::error::{Error, Result};
use crate::levy::excursion::{ito_with, normalized_with};
use crate::levy::{ItoSpec, LifetimeProposal, StableLaw, StepLaw};
use crate::rng::{SeedTree, StreamTag};
use crate::stats::{ks_two_sample, KsResult};

/// Event an ensemble is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Restriction {
    /// `e* ≥ eps`.
    MaxAtLeast(f64),
    /// `T ≥ t_min`.
    LifetimeAtLeast(f64),
}

impl Restriction {
    pub fn admits(&self, lifetime: f64, max: f64) -> bool {
        match *self {
            Restriction::MaxAtLeast(eps) => max >= eps,
            Restriction::LifetimeAtLeast(t) => lifetime >= t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub restriction: Restriction,
    pub lifetimes: ItoSpec,
    pub samples: usize,
}

impl EnsembleSpec {
    /// `{e* ≥ eps}` with log-uniform lifetimes on `[t_min, t_max]`.
    pub fn max_restricted(eps: f64, t_min: f64, t_max: f64, n_steps: usize, samples: usize) -> Self {
        EnsembleSpec {
            restriction: Restriction::MaxAtLeast(eps),
            lifetimes: ItoSpec::new(t_min, t_max, n_steps).log_uniform(),
            samples,
        }
    }
}

/// Summary of one sample, as written to ensemble tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereSummary {
    pub sample_id: u64,
    pub lifetime: f64,
    pub distance: f64,
    pub max: f64,
    pub bubbles: usize,
    pub weight: f64,
}

/// Samples drawn under a declared restriction, with their weighting history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereEnsemble {
    pub restriction: Restriction,
    pub kind: WeightKind,
    pub alpha: f64,
    pub rows: Vec<SphereSummary>,
    /// Proposals drawn to obtain the accepted rows.
    pub proposals: u64,
}

impl SphereEnsemble {
    pub fn weights(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.weight).collect()
    }

    pub fn column(&self, f: impl Fn(&SphereSummary) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    /// `Σ w f / Σ w`.
    pub fn weighted_mean(&self, f: impl Fn(&SphereSummary) -> f64) -> f64 {
        let (num, den) = self
            .rows
            .iter()
            .fold((0.0, 0.0), |(n, d), r| (n + r.weight * f(r), d + r.weight));
        num / den
    }
}

fn summarize(id: u64, sample: &SphereSample, alpha: f64) -> Result<SphereSummary> {
    Ok(SphereSummary {
        sample_id: id,
        lifetime: sample.lifetime(),
        distance: quantum_distance(sample, alpha)?,
        max: sample.max(),
        bubbles: sample.bubbles().len(),
        weight: sample.weight,
    })
}

/// Draw excursions from the lifetime window until one satisfies the
/// restriction, then encode it. Sample `i` depends only on `(seed, i)`.
pub fn sample_sphere(
    law: &StableLaw,
    spec: &EnsembleSpec,
    tree: &SeedTree,
    index: u64,
) -> Result<(SphereSample, u64)> {
    let steps = StepLaw::new(law);
    let mut rng = tree.stream(StreamTag::ItoExcursion, index);
    let mut tries = 0u64;
    loop {
        tries += 1;
        let w = ito_with(&steps, &spec.lifetimes, &mut rng)?;
        let e = &w.excursion;
        if spec.restriction.admits(e.lifetime(), e.max()) {
            let sample = encode_sphere(e, w.weight, &mut tree.stream(StreamTag::Sphere, index));
            return Ok((sample, tries));
        }
        if tries > 1_000_000 {
            return Err(Error::Precondition(format!(
                "restriction {:?} admits no excursion from the lifetime window",
                spec.restriction
            )));
        }
    }
}

pub fn sample_sphere_ensemble(law: &StableLaw, spec: &EnsembleSpec, seed: u64) -> Result<SphereEnsemble> {
    let tree = SeedTree::new(seed);
    let alpha = law.alpha();
    let rows: Vec<(SphereSummary, u64)> = (0..spec.samples as u64)
        .into_par_iter()
        .map(|i| {
            let (s, tries) = sample_sphere(law, spec, &tree, i)?;
            Ok((summarize(i, &s, alpha)?, tries))
        })
        .collect::<Result<_>>()?;
    let proposals = rows.iter().map(|r| r.1).sum();
    Ok(SphereEnsemble {
        restriction: spec.restriction,
        kind: WeightKind::Unweighted,
        alpha,
        rows: rows.into_iter().map(|r| r.0).collect(),
        proposals,
    })
}

/// Multiply every weight by `T` or `D`. Only unweighted ensembles can be
/// reweighted; asking for `Unweighted` is the identity on such ensembles.
pub fn reweight(ensemble: &SphereEnsemble, kind: WeightKind) -> Result<SphereEnsemble> {
    if ensemble.kind != WeightKind::Unweighted {
        return Err(Error::WeightMismatch {
            found: ensemble.kind.to_string(),
            requested: kind.to_string(),
        });
    }
    let mut out = ensemble.clone();
    out.kind = kind;
    for r in &mut out.rows {
        r.weight *= match kind {
            WeightKind::Unweighted => 1.0,
            WeightKind::Lifetime => r.lifetime,
            WeightKind::Distance => r.distance,
        };
    }
    Ok(out)
}

/// Bin in `(𝔱, X_𝔱)` for the conditional-law comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkBin {
    pub time: (f64, f64),
    pub level: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalLawCheck {
    pub bin: MarkBin,
    pub weighted_in_bin: usize,
    pub conditioned_in_bin: usize,
    pub ks: KsResult,
}

/// Remaining lifetime `T - 𝔱` in a `(𝔱, X_𝔱)` bin, compared between
/// (a) lifetime-weighted samples with a uniform mark `𝔱 = U·T`, and
/// (b) unweighted samples conditioned on `T ≥ 𝔱`, with `𝔱` drawn from the
/// same marginal.
///
/// Lifetimes live on `[t_min, t_max]`; the bin's time range must lie inside it.
pub fn check_conditional_law(
    law: &StableLaw,
    t_min: f64,
    t_max: f64,
    n_steps: usize,
    bin: MarkBin,
    target_per_side: usize,
    seed: u64,
) -> Result<ConditionalLawCheck> {
    let a = law.alpha();
    let (b0, b1) = bin.time;
    if !(t_min <= b0 && b0 < b1 && b1 < t_max) {
        return Err(Error::param("bin", "mark-time bin must lie inside the lifetime window"));
    }
    let steps = StepLaw::new(law);
    let tree = SeedTree::new(seed);
    let in_level = |x: f64| x >= bin.level.0 && x < bin.level.1;
    // N[T ≥ s] on the window, up to a constant
    let tail = |s: f64| s.max(t_min).powf(-1.0 / a) - t_max.powf(-1.0 / a);

    let draw_weighted = |rng: &mut rand_chacha::ChaCha12Rng| -> Result<Option<f64>> {
        // lifetime density T·T^{-1-1/α} = T^{-1/α} on the window
        let p = 1.0 - 1.0 / a;
        let u: f64 = rng.random();
        let t = (t_min.powf(p) + u * (t_max.powf(p) - t_min.powf(p))).powf(1.0 / p);
        let mark = rng.random::<f64>() * t;
        if !(mark >= b0 && mark < b1) {
            return Ok(None);
        }
        let shape = normalized_with(&steps, n_steps, rng)?;
        let x = shape.path().value_at(mark / t) * t.powf(1.0 / a);
        Ok(in_level(x).then_some(t - mark))
    };
    let draw_conditioned = |rng: &mut rand_chacha::ChaCha12Rng| -> Result<Option<f64>> {
        // mark from the density ∝ N[T ≥ 𝔱] on the bin, by rejection
        let top = tail(b0);
        let mark = loop {
            let m = b0 + rng.random::<f64>() * (b1 - b0);
            if rng.random::<f64>() * top <= tail(m) {
                break m;
            }
        };
        let spec = ItoSpec {
            t_min: mark.max(t_min),
            t_max,
            n_steps,
            proposal: LifetimeProposal::Native,
        };
        let w = ito_with(&steps, &spec, rng)?;
        let t = w.excursion.lifetime();
        let x = w.excursion.path().value_at(mark);
        Ok(in_level(x).then_some(t - mark))
    };

    let collect = |tag: StreamTag, draw: &(dyn Fn(&mut rand_chacha::ChaCha12Rng) -> Result<Option<f64>> + Sync)| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(target_per_side);
        let mut next = 0u64;
        let batch = 4096u64;
        while out.len() < target_per_side {
            let got: Vec<Option<f64>> = (next..next + batch)
                .into_par_iter()
                .map(|i| draw(&mut tree.stream(tag, i)))
                .collect::<Result<_>>()?;
            out.extend(got.into_iter().flatten());
            next += batch;
            if next > 2_000_000_000 {
                return Err(Error::Precondition("bin is essentially never hit".into()));
            }
        }
        out.truncate(target_per_side);
        Ok(out)
    };
    let weighted = collect(StreamTag::Sphere, &draw_weighted)?;
    let conditioned = collect(StreamTag::ItoExcursion, &draw_conditioned)?;
    Ok(ConditionalLawCheck {
        bin,
        weighted_in_bin: weighted.len(),
        conditioned_in_bin: conditioned.len(),
        ks: ks_two_sample(&weighted, &conditioned),
    })
}
