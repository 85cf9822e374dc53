//! The registry: one experiment per acceptance criterion.

use std::fmt;

use serde_json::json;

use crate::config::{Context, Params};
use crate::error::{HarnessError, Result};
use crate::record::{Check, Estimate, Table};

mod csbp;
mod levy;
mod lqg;
mod maps;
mod qle;
mod sphere;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Module {
    Levy,
    Csbp,
    Sphere,
    Qle,
    Maps,
    Lqg,
}

impl Module {
    pub const ALL: [Module; 6] = [
        Module::Levy,
        Module::Csbp,
        Module::Sphere,
        Module::Qle,
        Module::Maps,
        Module::Lqg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Module::Levy => "levy",
            Module::Csbp => "csbp",
            Module::Sphere => "sphere",
            Module::Qle => "qle",
            Module::Maps => "maps",
            Module::Lqg => "lqg",
        }
    }
}

impl fmt::Display for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What an experiment hands back to the runner.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub rows: Table,
    pub summary: Vec<Estimate>,
    pub checks: Vec<Check>,
}

pub struct Experiment {
    /// `<module>-<name>`.
    pub id: &'static str,
    pub module: Module,
    pub criterion: u8,
    pub claim: &'static str,
    pub default_n: Option<u64>,
    /// Wall-clock limit in seconds, checked like any other tolerance.
    pub budget_secs: Option<f64>,
    pub defaults: fn() -> Params,
    pub run: fn(&Context) -> Result<Outcome>,
}

impl Experiment {
    /// The part of the id after the module prefix.
    pub fn short_name(&self) -> &'static str {
        &self.id[self.module.name().len() + 1..]
    }
}

impl fmt::Debug for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Experiment")
            .field("id", &self.id)
            .field("criterion", &self.criterion)
            .finish_non_exhaustive()
    }
}

pub(crate) fn params(value: serde_json::Value) -> Params {
    match value {
        serde_json::Value::Object(m) => m.into_iter().collect(),
        _ => Params::new(),
    }
}

fn no_params() -> Params {
    Params::new()
}

static REGISTRY: [Experiment; 14] = [
    Experiment {
        id: "csbp-laplace",
        module: Module::Csbp,
        criterion: 1,
        claim: "CSBP Laplace transform E[exp(-λY_t)] = exp(-y0·u_t(λ))",
        default_n: Some(200_000),
        budget_secs: Some(120.0),
        defaults: || params(json!({"y0": 1.0, "t": 0.5, "lambda": 2.0})),
        run: csbp::laplace,
    },
    Experiment {
        id: "csbp-extinction",
        module: Module::Csbp,
        criterion: 2,
        claim: "CSBP extinction law P[ζ ≤ t] = exp(-4·y0/t²)",
        default_n: Some(100_000),
        budget_secs: Some(120.0),
        defaults: || params(json!({"y0": [0.01, 0.1], "t": [1.0, 2.0, 4.0], "resolution": 0.03})),
        run: csbp::extinction,
    },
    Experiment {
        id: "csbp-exp-integral",
        module: Module::Csbp,
        criterion: 3,
        claim: "E[exp(-q∫Y)] = exp(-Φ(q)·y0)",
        default_n: Some(100_000),
        budget_secs: Some(120.0),
        defaults: || params(json!({"y0": 1.0, "q": 1.0})),
        run: csbp::exp_integral,
    },
    Experiment {
        id: "sphere-distance-tail",
        module: Module::Sphere,
        criterion: 4,
        claim: "log-log slope of P[D ≥ t] is -2",
        default_n: Some(100_000),
        budget_secs: Some(600.0),
        defaults: || sphere::defaults(1.0, 10.0),
        run: sphere::distance_tail,
    },
    Experiment {
        id: "sphere-max-tail",
        module: Module::Sphere,
        criterion: 5,
        claim: "log-log slope of P[e* ≥ t] is -1",
        default_n: Some(100_000),
        budget_secs: Some(600.0),
        defaults: || sphere::defaults(0.1, 1.0),
        run: sphere::max_tail,
    },
    Experiment {
        id: "sphere-lifetime-tail",
        module: Module::Sphere,
        criterion: 6,
        claim: "log-log slope of P[T ≥ t] is -2/3",
        default_n: Some(100_000),
        budget_secs: Some(600.0),
        defaults: || sphere::defaults(0.1, 1.0),
        run: sphere::lifetime_tail,
    },
    Experiment {
        id: "levy-jump-ratio",
        module: Module::Levy,
        criterion: 7,
        claim: "ledger jump counts on [a,2a) and [2a,4a) have ratio 2^{3/2}",
        default_n: Some(400),
        budget_secs: None,
        defaults: || params(json!({"bin": 0.01, "threshold": 1e-3, "step": 0.01, "horizon": 1.0})),
        run: levy::jump_ratio,
    },
    Experiment {
        id: "maps-eden-percolation",
        module: Module::Maps,
        criterion: 8,
        claim: "Eden and percolation peeling laws agree exactly; reshuffled percolation reproduces Eden",
        default_n: None,
        budget_secs: Some(1800.0),
        defaults: || params(json!({"class": "SIMPLE", "n_vertices": [4, 5, 6]})),
        run: maps::eden_percolation,
    },
    Experiment {
        id: "maps-count-oracle",
        module: Module::Maps,
        criterion: 9,
        claim: "disk counting recursion equals brute-force gluing",
        default_n: None,
        budget_secs: None,
        defaults: || params(json!({"max_perimeter": 6, "max_inner": 3})),
        run: maps::count_oracle,
    },
    Experiment {
        id: "qle-bookkeeping",
        module: Module::Qle,
        criterion: 10,
        claim: "QLE bookkeeping: δ-free ledger, uniform tips, uniform σ̄/D, clock and reversal identities",
        default_n: Some(1000),
        budget_secs: None,
        defaults: || params(json!({"deltas": [0.1, 0.05, 0.137], "n_steps": 200})),
        run: qle::bookkeeping,
    },
    Experiment {
        id: "qle-complement-lemma",
        module: Module::Qle,
        criterion: 11,
        claim: "complement lemma accepts F = D - d and rejects every constructed non-example",
        default_n: None,
        budget_secs: None,
        defaults: || params(json!({"grid": 1001})),
        run: qle::complement_lemma,
    },
    Experiment {
        id: "qle-hitting-rule",
        module: Module::Qle,
        criterion: 12,
        claim: "hitting probability equals min(ε/u, 1)",
        default_n: None,
        budget_secs: None,
        defaults: no_params,
        run: qle::hitting_rule,
    },
    Experiment {
        id: "lqg-coord-change",
        module: Module::Lqg,
        criterion: 13,
        claim: "LQG area is invariant under the coordinate change rule",
        default_n: Some(50),
        budget_secs: Some(1200.0),
        defaults: || {
            params(json!({"resolution": 512, "eps": 8, "shift": 0.3, "radius": 0.3, "control_fields": 5}))
        },
        run: lqg::coord_change,
    },
    Experiment {
        id: "levy-semigroup",
        module: Module::Levy,
        criterion: 14,
        claim: "u_t satisfies the semigroup identity and ∂u/∂t = -ψ(u)",
        default_n: None,
        budget_secs: Some(1.0),
        defaults: no_params,
        run: levy::semigroup,
    },
];

pub fn registry() -> &'static [Experiment] {
    &REGISTRY
}

pub fn find(id: &str) -> Result<&'static Experiment> {
    REGISTRY.iter().find(|e| e.id == id).ok_or_else(|| HarnessError::UnknownExperiment {
        id: id.to_string(),
        known: REGISTRY.iter().map(|e| e.id).collect::<Vec<_>>().join(", "),
    })
}

pub fn by_criterion(criterion: u8) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.criterion == criterion)
}

pub fn of_module(module: Module) -> impl Iterator<Item = &'static Experiment> {
    REGISTRY.iter().filter(move |e| e.module == module)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn one_experiment_per_criterion() {
        let criteria: HashSet<u8> = registry().iter().map(|e| e.criterion).collect();
        assert_eq!(criteria, (1..=14).collect());
        let ids: HashSet<&str> = registry().iter().map(|e| e.id).collect();
        assert_eq!(ids.len(), registry().len());
        for e in registry() {
            assert!(e.id.starts_with(&format!("{}-", e.module)), "{}", e.id);
            assert!(!e.short_name().is_empty());
        }
    }

    #[test]
    fn unknown_id_lists_the_registry() {
        let err = find("nope").unwrap_err().to_string();
        for e in registry() {
            assert!(err.contains(e.id), "{err}");
        }
    }
}
