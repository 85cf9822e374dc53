use lqgsim_core::levy::{extinction_samples, integral_horizon, integral_samples, laplace_samples, StableLaw};
use lqgsim_core::stats::{binomial_se, RunningMean};

use super::Outcome;
use crate::config::Context;
use crate::error::Result;
use crate::record::{Check, Estimate, Table, Tolerance};
use crate::row;

const SIGMAS: f64 = 3.0;

pub(super) fn laplace(ctx: &Context) -> Result<Outcome> {
    let (y0, t, lambda) = (ctx.f64("y0")?, ctx.f64("t")?, ctx.f64("lambda")?);
    let n = ctx.samples()?;
    let law = StableLaw::three_halves();
    let target = (-y0 * ctx.core(law.u_t(lambda, t))?).exp();
    let values = ctx.core(laplace_samples(&law, y0, t, lambda, n, ctx.seed))?;
    let mut rows = Table::new(&["sample_id", "exp_neg_lambda_y"]);
    for (i, v) in values.iter().enumerate() {
        rows.push(row![i, v]);
    }
    let acc: RunningMean = values.into_iter().collect();
    let check = Check::new(
        format!("E[exp(-{lambda}·Y_{t})] from y0 = {y0}"),
        target,
        Some(acc.mean()),
        Tolerance::StdErrors {
            k: SIGMAS,
            std_error: acc.std_error(),
        },
    );
    Ok(Outcome {
        rows,
        summary: vec![
            Estimate::new("laplace", acc.mean(), Some(acc.std_error())),
            Estimate::new("target", target, None),
        ],
        checks: vec![check],
    })
}

pub(super) fn extinction(ctx: &Context) -> Result<Outcome> {
    let (y0s, ts) = (ctx.f64_list("y0")?, ctx.f64_list("t")?);
    let resolution = ctx.f64("resolution")?;
    let n = ctx.samples()?;
    if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0)) {
        return Err(ctx.param_error("t", "need positive times"));
    }
    let law = StableLaw::three_halves();
    let horizon = ts.iter().cloned().fold(0.0, f64::max);
    let mut out = Outcome {
        rows: Table::new(&["y0", "sample_id", "zeta"]),
        ..Outcome::default()
    };
    for (k, &y0) in y0s.iter().enumerate() {
        // each starting mass gets its own family of streams
        let seed = lqgsim_core::rng::SeedTree::new(ctx.seed).child(k as u64).seed();
        let zetas = ctx.core(extinction_samples(&law, y0, horizon, resolution, n, seed))?;
        for (i, z) in zetas.iter().enumerate() {
            out.rows.push(row![y0, i, z.map(|z| z.to_string()).unwrap_or_default()]);
        }
        for &t in &ts {
            let hits = zetas.iter().filter(|z| matches!(z, Some(z) if *z <= t)).count();
            let p = hits as f64 / n as f64;
            let target = law.extinction_cdf(y0, t);
            let se = binomial_se(target, n);
            out.summary.push(Estimate::new(format!("P[zeta <= {t} | y0 = {y0}]"), p, Some(se)));
            out.checks.push(Check::new(
                format!("P[ζ ≤ {t}] from y0 = {y0}"),
                target,
                Some(p),
                Tolerance::StdErrors {
                    k: SIGMAS,
                    std_error: se,
                },
            ));
        }
    }
    Ok(out)
}

pub(super) fn exp_integral(ctx: &Context) -> Result<Outcome> {
    let (y0, q) = (ctx.f64("y0")?, ctx.f64("q")?);
    let n = ctx.samples()?;
    if !(q > 0.0) {
        return Err(ctx.param_error("q", "must be positive"));
    }
    let law = StableLaw::three_halves();
    let target = (-ctx.core(law.phi(q))? * y0).exp();
    let integrals = ctx.core(integral_samples(&law, y0, integral_horizon(q), n, ctx.seed))?;
    let mut rows = Table::new(&["sample_id", "integral", "score"]);
    let mut acc = RunningMean::new();
    let mut censored = 0u64;
    for (i, v) in integrals.iter().enumerate() {
        // an unfinished path is scored 0, its largest possible error
        let score = v.map_or(0.0, |x| (-q * x).exp());
        censored += v.is_none() as u64;
        acc.push(score);
        rows.push(row![i, v.map(|x| x.to_string()).unwrap_or_default(), score]);
    }
    let censored_fraction = censored as f64 / n.max(1) as f64;
    let check = Check::new(
        format!("E[exp(-{q}∫Y)] from y0 = {y0}"),
        target,
        Some(acc.mean()),
        Tolerance::StdErrors {
            k: SIGMAS,
            std_error: acc.std_error(),
        },
    )
    .censored(censored_fraction > 0.01)
    .with_detail(format!("{censored} of {n} paths censored"));
    Ok(Outcome {
        rows,
        summary: vec![
            Estimate::new("exp_integral", acc.mean(), Some(acc.std_error())),
            Estimate::new("censored_fraction", censored_fraction, None),
        ],
        checks: vec![check],
    })
}
