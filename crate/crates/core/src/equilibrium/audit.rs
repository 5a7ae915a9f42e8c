use serde::Serialize;

use super::{EquilibriumReport, RecursiveVerdict};
use crate::centrality::GameSpec;
use crate::graph::{structural_metrics, ComponentRole, Condensation, Configuration};
use crate::scalar::Scalar;

/// One necessary structural condition and whether the configuration meets it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Checks the structural conditions every equilibrium of the stated kind
/// must satisfy. Only conditions that apply to the certified status in
/// `report` are listed; a failure on a certified equilibrium signals a bug.
pub fn audit_conditions<S: Scalar, A>(
    spec: &GameSpec<S>,
    cfg: &Configuration,
    report: &EquilibriumReport<A>,
) -> Vec<ConditionCheck> {
    let cond = Condensation::of(cfg);
    let metrics = structural_metrics(cfg);
    let n = cfg.n();
    let mut checks = Vec::new();

    let mean = spec.degrees.0.iter().sum::<usize>();
    let bound = 1 + mean.div_ceil(n);
    checks.push(ConditionCheck {
        name: "reach-lower-bound",
        passed: metrics.m >= bound,
        detail: format!("m = {} >= {bound}", metrics.m),
    });

    if report.nash {
        let internal = cond.count(ComponentRole::Internal);
        checks.push(ConditionCheck {
            name: "components-sink-or-source",
            passed: internal == 0,
            detail: format!("{internal} of {} components are neither", cond.len()),
        });
        if cond.len() == 1 {
            let d_min = spec.degrees.min();
            checks.push(ConditionCheck {
                name: "undirected-link-bound",
                passed: 2 * metrics.c2 >= n,
                detail: format!("2*c2 = {} >= n = {n}", 2 * metrics.c2),
            });
            checks.push(ConditionCheck {
                name: "triangle-bound",
                passed: d_min * metrics.c3 + 2 * metrics.c2 >= n * d_min,
                detail: format!(
                    "d_min*c3 + 2*c2 = {} >= n*d_min = {}",
                    d_min * metrics.c3 + 2 * metrics.c2,
                    n * d_min
                ),
            });
        }
    }
    if report.recursive == Some(RecursiveVerdict::Yes) {
        let sources = cond.count(ComponentRole::Source);
        checks.push(ConditionCheck {
            name: "at-most-one-source",
            passed: sources <= 1,
            detail: format!("{sources} source components"),
        });
    }
    if report.strict && spec.degrees.max() < n - 1 {
        let isolated = (0..cond.len()).filter(|&c| cond.is_isolated(cfg, c)).count();
        checks.push(ConditionCheck {
            name: "strict-components-isolated",
            passed: isolated == cond.len(),
            detail: format!("{isolated} of {} components isolated", cond.len()),
        });
    }
    checks
}
