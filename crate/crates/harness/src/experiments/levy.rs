use lqgsim_core::levy::{sample_stable_path, StableLaw, StablePathSpec};
use lqgsim_core::rng::{SeedTree, StreamTag};

use super::Outcome;
use crate::config::Context;
use crate::error::Result;
use crate::record::{Check, Estimate, Table, Tolerance};
use crate::row;

pub(super) fn jump_ratio(ctx: &Context) -> Result<Outcome> {
    let (a, threshold) = (ctx.f64("bin")?, ctx.f64("threshold")?);
    let (step, horizon) = (ctx.f64("step")?, ctx.f64("horizon")?);
    let n = ctx.samples()?;
    if !(threshold > 0.0 && threshold <= a) {
        return Err(ctx.param_error("threshold", format!("must lie in (0, {a}] so both bins are recorded")));
    }
    let law = StableLaw::three_halves();
    let spec = StablePathSpec::new(horizon, step).with_ledger(threshold);
    let tree = SeedTree::new(ctx.seed);
    let mut rows = Table::new(&["path_id", "low_bin", "high_bin"]);
    let (mut lo, mut hi) = (0u64, 0u64);
    for i in 0..n {
        let path = ctx.core(sample_stable_path(&law, &spec, &mut tree.stream(StreamTag::StablePath, i)))?;
        let (mut l, mut h) = (0u64, 0u64);
        for j in path.jumps() {
            if j.size >= a && j.size < 2.0 * a {
                l += 1;
            } else if j.size >= 2.0 * a && j.size < 4.0 * a {
                h += 1;
            }
        }
        rows.push(row![i, l, h]);
        lo += l;
        hi += h;
    }
    let ratio = if hi > 0 { Some(lo as f64 / hi as f64) } else { None };
    // delta method for a ratio of independent Poisson counts
    let se = ratio.map(|r| r * (1.0 / lo.max(1) as f64 + 1.0 / hi as f64).sqrt());
    let check = Check::new(
        format!("jumps in [{a}, {}) over jumps in [{}, {})", 2.0 * a, 2.0 * a, 4.0 * a),
        2f64.powf(1.5),
        ratio,
        Tolerance::Relative { rel: 0.05 },
    )
    .with_detail(format!("{lo} and {hi} jumps"));
    Ok(Outcome {
        rows,
        summary: vec![
            Estimate::new("ratio", ratio.unwrap_or(f64::NAN), se),
            Estimate::new("low_bin", lo as f64, None),
            Estimate::new("high_bin", hi as f64, None),
        ],
        checks: vec![check],
    })
}

pub(super) fn semigroup(ctx: &Context) -> Result<Outcome> {
    let law = StableLaw::three_halves();
    let lambdas = [0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0];
    let times = [0.01, 0.1, 0.5, 1.0, 3.0];
    let mut rows = Table::new(&["lambda", "t", "s", "semigroup_rel_err", "ode_rel_err"]);
    let (mut semi, mut ode) = (0.0f64, 0.0f64);
    for &lambda in &lambdas {
        for &t in &times {
            let u = |time: f64| ctx.core(law.u_t(lambda, time));
            // five-point derivative against -ψ(u)
            let h = 1e-3 * t;
            let slope = (u(t - 2.0 * h)? - 8.0 * u(t - h)? + 8.0 * u(t + h)? - u(t + 2.0 * h)?) / (12.0 * h);
            let psi = law.psi(u(t)?);
            let ode_err = (slope + psi).abs() / psi;
            ode = ode.max(ode_err);
            for &s in &times {
                let composed = ctx.core(law.u_t(ctx.core(law.u_t(lambda, s))?, t))?;
                let direct = u(t + s)?;
                let err = (composed - direct).abs() / direct;
                semi = semi.max(err);
                rows.push(row![lambda, t, s, err, ode_err]);
            }
        }
    }
    Ok(Outcome {
        rows,
        summary: vec![
            Estimate::new("max_semigroup_rel_err", semi, None),
            Estimate::new("max_ode_rel_err", ode, None),
        ],
        checks: vec![
            Check::new("u_{t+s}(λ) = u_t(u_s(λ)), largest relative error", 0.0, Some(semi), Tolerance::Absolute { abs: 1e-10 }),
            Check::new("∂u/∂t = -ψ(u), largest relative residual", 0.0, Some(ode), Tolerance::Absolute { abs: 1e-6 }),
        ],
    })
}
