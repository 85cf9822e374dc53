use lqgsim_core::levy::{sample_normalized_excursion, StableLaw};
use lqgsim_core::qle::{
    check_complement_lemma, distance_clock, hitting_probability, meeting_bookkeeping, qle_delta_run,
    ComplementOutcome, ComplementTolerances, MeetingConfig, QleConfig,
};
use lqgsim_core::rng::{SeedTree, StreamTag};
use lqgsim_core::sphere::{encode_sphere, quantum_distance};
use lqgsim_core::stats::ks_uniform;
use rand::Rng;

use super::Outcome;
use crate::config::Context;
use crate::error::Result;
use crate::record::{Check, Estimate, Table, Tolerance};
use crate::row;

const KS_LEVEL: f64 = 0.01;

pub(super) fn bookkeeping(ctx: &Context) -> Result<Outcome> {
    let deltas = ctx.f64_list("deltas")?;
    let n_steps = ctx.usize("n_steps")?;
    let n = ctx.samples()?;
    if deltas.is_empty() {
        return Err(ctx.param_error("deltas", "need at least one δ"));
    }
    let law = StableLaw::three_halves();
    let alpha = law.alpha();
    let tree = SeedTree::new(ctx.seed);
    let mut rows = Table::new(&[
        "run_id", "delta", "T", "D", "n_bubbles", "tau", "sigma_bar", "clock_err", "reversal_err",
    ]);
    let (mut ledger_mismatch, mut clock_err, mut reversal_err) = (0u64, 0.0f64, 0.0f64);
    let (mut tips, mut fractions) = (Vec::new(), Vec::new());
    for i in 0..n {
        let path = tree.child(i);
        let e = ctx.core(sample_normalized_excursion(&law, n_steps, &mut path.stream(StreamTag::Excursion, 0)))?;
        let sphere = encode_sphere(&e, 1.0, &mut path.stream(StreamTag::Sphere, 0));
        let d = ctx.core(quantum_distance(&sphere, alpha))?;
        let reversed = ctx.core(quantum_distance(&sphere.time_reversed(), alpha))?;
        let rev = (d - reversed).abs() / d;
        reversal_err = reversal_err.max(rev);
        let u: f64 = path.stream(StreamTag::Misc, 0).random();
        let mut ledger = None;
        for (k, &delta) in deltas.iter().enumerate() {
            let config = ctx.core(QleConfig::new(delta, path.seed()))?;
            let rec = ctx.core(qle_delta_run(&e, &config))?;
            let bubbles = rec.bubbles();
            match &ledger {
                None => ledger = Some(bubbles.clone()),
                Some(first) => ledger_mismatch += (*first != bubbles) as u64,
            }
            if k == 0 {
                tips.extend(
                    rec.states
                        .iter()
                        .filter(|s| s.boundary_length > 0.0)
                        .map(|s| s.tip / s.boundary_length),
                );
            }
            let clock = ctx.core(distance_clock(&rec, rec.lifetime()))?;
            let err = (clock - d).abs();
            clock_err = clock_err.max(err);
            let meeting = ctx.core(MeetingConfig::new(u, rec.total_distance))?;
            let (tau, sigma_bar) = ctx.core(meeting_bookkeeping(&rec, &meeting))?;
            if k == 0 {
                fractions.push(sigma_bar / rec.total_distance);
            }
            rows.push(row![i, delta, rec.lifetime(), rec.total_distance, bubbles.len(), tau, sigma_bar, err, rev]);
        }
    }
    let tip_ks = ks_uniform(&tips);
    let sigma_ks = ks_uniform(&fractions);
    Ok(Outcome {
        rows,
        summary: vec![
            Estimate::new("ledger_mismatches", ledger_mismatch as f64, None),
            Estimate::new("tip_ks_p", tip_ks.p_value, None),
            Estimate::new("tips", tips.len() as f64, None),
            Estimate::new("sigma_bar_ks_p", sigma_ks.p_value, None),
            Estimate::new("max_clock_err", clock_err, None),
            Estimate::new("max_reversal_rel_err", reversal_err, None),
        ],
        checks: vec![
            Check::new(
                format!("bubble ledger identical for δ in {deltas:?}: paths that differ"),
                0.0,
                Some(ledger_mismatch as f64),
                Tolerance::Exact,
            ),
            Check::new("tip position / boundary length is uniform: KS p-value", KS_LEVEL, Some(tip_ks.p_value), Tolerance::Above)
                .with_detail(format!("{} tips", tips.len())),
            Check::new("σ̄/D is uniform: KS p-value", KS_LEVEL, Some(sigma_ks.p_value), Tolerance::Above),
            Check::new(
                "distance clock at the lifetime vs quantum distance: largest difference",
                0.0,
                Some(clock_err),
                Tolerance::Absolute { abs: 1e-10 },
            ),
            Check::new(
                "D of the time-reversed sphere: largest relative difference",
                0.0,
                Some(reversal_err),
                Tolerance::Absolute { abs: 1e-12 },
            ),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Expect {
    Accept,
    Reject,
}

fn tabulate(n: usize, total: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..n).map(|i| f(i as f64 * total / (n - 1) as f64)).collect()
}

pub(super) fn complement_lemma(ctx: &Context) -> Result<Outcome> {
    let n = ctx.usize("grid")?;
    if n < 101 {
        return Err(ctx.param_error("grid", "need at least 101 points"));
    }
    let tol = ComplementTolerances::default();
    let mut cases: Vec<(String, f64, Expect, Vec<f64>)> = Vec::new();
    for total in [0.5, 1.0, 3.7] {
        cases.push(("complement".into(), total, Expect::Accept, tabulate(n, total, |d| total - d)));
        cases.push((
            "quadratic".into(),
            total,
            Expect::Reject,
            tabulate(n, total, |d| total - d * d / total),
        ));
        // flat on a short stretch, the rest squeezed to stay onto [0, D]
        let (a, w) = (0.4 * total, 0.01 * total);
        let s = total / (total - w);
        cases.push((
            "flat stretch".into(),
            total,
            Expect::Reject,
            tabulate(n, total, |d| {
                if d < a {
                    total - d * s
                } else if d <= a + w {
                    total - a * s
                } else {
                    total - (d - w) * s
                }
            }),
        ));
        cases.push((
            "staircase".into(),
            total,
            Expect::Reject,
            tabulate(n, total, |d| total * ((1.0 - d / total) * 10.0).floor() / 10.0),
        ));
        cases.push((
            "shifted".into(),
            total,
            Expect::Reject,
            tabulate(n, total, |d| (1.05 * total - d).min(total)),
        ));
        cases.push(("constant".into(), total, Expect::Reject, vec![total / 2.0; n]));
        cases.push(("increasing".into(), total, Expect::Reject, tabulate(n, total, |d| d)));
    }
    let mut rows = Table::new(&["case", "D", "expected", "outcome"]);
    let mut wrong = 0u64;
    for (name, total, expect, values) in &cases {
        let (label, got) = match check_complement_lemma(values, *total, tol) {
            Ok(ComplementOutcome::Pass { .. }) => ("pass".to_string(), Expect::Accept),
            Ok(ComplementOutcome::HypothesisUnmet { ks_distance }) => {
                (format!("hypothesis unmet (KS {ks_distance:.3})"), Expect::Reject)
            }
            Ok(ComplementOutcome::Fail { witness, .. }) => (format!("fail at d = {witness:.4}"), Expect::Reject),
            Err(e) => (format!("rejected: {e}"), Expect::Reject),
        };
        wrong += (got != *expect) as u64;
        let expected = match expect {
            Expect::Accept => "accept",
            Expect::Reject => "reject",
        };
        rows.push(row![name, total, expected, label]);
    }
    Ok(Outcome {
        rows,
        summary: vec![
            Estimate::new("cases", cases.len() as f64, None),
            Estimate::new("misclassified", wrong as f64, None),
        ],
        checks: vec![Check::new(
            format!("F = D - d accepted, non-examples rejected: misclassified of {}", cases.len()),
            0.0,
            Some(wrong as f64),
            Tolerance::Exact,
        )],
    })
}

pub(super) fn hitting_rule(_ctx: &Context) -> Result<Outcome> {
    let us = [1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 100.0];
    let epss = [0.0, 1e-6, 0.05, 0.5, 1.0, 2.0, 10.0, 1000.0];
    let mut rows = Table::new(&["u", "eps", "probability", "expected"]);
    let mut wrong = 0u64;
    for &u in &us {
        for &eps in &epss {
            let expected = if eps >= u { 1.0 } else { eps / u };
            let got = hitting_probability(u, eps);
            wrong += !matches!(got, Ok(p) if p == expected) as u64;
            rows.push(row![u, eps, got.map(|p| p.to_string()).unwrap_or_else(|e| e.to_string()), expected]);
        }
    }
    // outside the domain the rule has no value
    for (u, eps) in [(0.0, 1.0), (-1.0, 0.5), (1.0, -0.1), (f64::NAN, 1.0)] {
        let got = hitting_probability(u, eps);
        wrong += got.is_ok() as u64;
        rows.push(row![u, eps, got.map(|p| p.to_string()).unwrap_or_else(|e| e.to_string()), "error"]);
    }
    Ok(Outcome {
        summary: vec![Estimate::new("mismatches", wrong as f64, None)],
        checks: vec![Check::new(
            format!("min(ε/u, 1) on a {}-point grid: mismatches", rows.len()),
            0.0,
            Some(wrong as f64),
            Tolerance::Exact,
        )],
        rows,
    })
}
