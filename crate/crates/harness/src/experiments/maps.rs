use lqgsim_maps::{brute_force_disk_count, count_disk_triangulations, MapClass, Statistic, UniverseLaws};

use super::Outcome;
use crate::config::Context;
use crate::error::Result;
use crate::record::{Check, Estimate, Table, Tolerance};
use crate::row;

fn statistic_name(s: Statistic) -> String {
    serde_json::to_value(s)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| format!("{s:?}"))
}

pub(super) fn eden_percolation(ctx: &Context) -> Result<Outcome> {
    let class: MapClass = ctx.maps(ctx.str("class")?.parse())?;
    let sizes = ctx.usize_list("n_vertices")?;
    let mut out = Outcome {
        rows: Table::new(&["class", "n_vertices", "statistic", "tv_num", "tv_den", "universe"]),
        ..Outcome::default()
    };
    for n in sizes {
        let laws = ctx.maps(UniverseLaws::compute(n, class))?;
        for stat in Statistic::ALL {
            let r = ctx.maps(laws.report(stat))?;
            let name = statistic_name(stat);
            let value = r.tv_distance_num.parse::<f64>().unwrap_or(f64::NAN)
                / r.tv_distance_den.parse::<f64>().unwrap_or(f64::NAN);
            out.rows
                .push(row![class, n, name, r.tv_distance_num, r.tv_distance_den, laws.universe]);
            out.summary.push(Estimate::new(format!("tv {name} n={n}"), value, None));
            let claim = match stat {
                Statistic::Reshuffle => format!("{class} n={n}: reshuffled percolation vs Eden, total variation"),
                _ => format!("{class} n={n}: Eden vs percolation {name} law, total variation"),
            };
            let exact = if r.is_exact_zero() { 0.0 } else { value };
            out.checks.push(
                Check::new(claim, 0.0, Some(exact), Tolerance::Exact)
                    .with_detail(format!("{}/{}", r.tv_distance_num, r.tv_distance_den)),
            );
        }
    }
    Ok(out)
}

pub(super) fn count_oracle(ctx: &Context) -> Result<Outcome> {
    let (max_m, max_n) = (ctx.usize("max_perimeter")?, ctx.usize("max_inner")?);
    if max_m < 2 {
        return Err(ctx.param_error("max_perimeter", "must be at least 2"));
    }
    let mut rows = Table::new(&["class", "perimeter", "inner", "recursion", "brute_force"]);
    let (mut cases, mut mismatches) = (0u64, 0u64);
    for class in [MapClass::MultiEdge, MapClass::Simple] {
        for m in 2..=max_m {
            for n in 0..=max_n {
                let counted = ctx.maps(count_disk_triangulations(m, n, class))?;
                let brute = ctx.maps(brute_force_disk_count(m, n, class, false))?;
                cases += 1;
                mismatches += (counted != brute.into()) as u64;
                rows.push(row![class, m, n, counted, brute]);
            }
        }
    }
    Ok(Outcome {
        rows,
        summary: vec![
            Estimate::new("cases", cases as f64, None),
            Estimate::new("mismatches", mismatches as f64, None),
        ],
        checks: vec![Check::new(
            format!("recursion vs gluing on m ≤ {max_m}, n ≤ {max_n}, both classes: mismatches"),
            0.0,
            Some(mismatches as f64),
            Tolerance::Exact,
        )],
    })
}
