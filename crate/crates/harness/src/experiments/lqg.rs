use lqgsim_core::lqg::{coord_change_experiment, LqgParams};
use lqgsim_core::rng::SeedTree;

use super::Outcome;
use crate::config::Context;
use crate::error::Result;
use crate::record::{Check, Estimate, Table, Tolerance};
use crate::row;

pub(super) fn coord_change(ctx: &Context) -> Result<Outcome> {
    let (resolution, eps) = (ctx.usize("resolution")?, ctx.usize("eps")?);
    let (shift, radius) = (ctx.f64("shift")?, ctx.f64("radius")?);
    let control_fields = ctx.usize("control_fields")? as u64;
    let fields = ctx.samples()?;
    let control_seed = SeedTree::new(ctx.seed).child(0).seed();
    let control = ctx.core(coord_change_experiment(
        &ctx.core(LqgParams::new(0.0))?,
        resolution,
        eps,
        control_fields,
        shift,
        radius,
        control_seed,
    ))?;
    let gravity = ctx.core(coord_change_experiment(
        &LqgParams::pure_gravity(),
        resolution,
        eps,
        fields,
        shift,
        radius,
        ctx.seed,
    ))?;
    let mut rows = Table::new(&["gamma", "field_id", "discrepancy"]);
    for s in [&control, &gravity] {
        for (i, d) in s.discrepancies.iter().enumerate() {
            rows.push(row![s.gamma, i, d]);
        }
    }
    let control_max = control.discrepancies.iter().cloned().fold(0.0, f64::max);
    Ok(Outcome {
        rows,
        summary: vec![
            Estimate::new("control_max", control_max, None),
            Estimate::new("median", gravity.median, None),
            Estimate::new("lower_quartile", gravity.lower_quartile, None),
            Estimate::new("upper_quartile", gravity.upper_quartile, None),
        ],
        checks: vec![
            Check::new(
                format!("γ = 0 control, largest discrepancy over {control_fields} fields"),
                0.01,
                Some(control_max),
                Tolerance::Below,
            ),
            Check::new(
                format!("γ = √(8/3), median discrepancy over {fields} fields at {resolution}²"),
                0.1,
                Some(gravity.median),
                Tolerance::Below,
            )
            .with_detail(format!(
                "quartiles {:.4} / {:.4}",
                gravity.lower_quartile, gravity.upper_quartile
            )),
        ],
    })
}
