//! Equilibrium verdicts, condition audits and family labels for named graphs.

use centrality_forge::equilibrium::{audit_conditions, classify_family, is_recursive, DEFAULT_EXPLORATION_BUDGET};
use centrality_forge::graph::named::*;
use centrality_forge::{GameSpec, Rational, Scalar};

fn main() -> centrality_forge::Result<()> {
    let fixtures = [
        ("ring(6)", ring(6)),
        ("cube", cube()),
        ("butterfly", butterfly()),
        ("hub_spoke(2, 2)", hub_spoke(2, 2)),
        ("clique_with_source(3)", clique_with_source(3)),
        ("directed_cycle(4)", directed_cycle(4)),
    ];
    for (name, cfg) in fixtures {
        let spec = GameSpec::uniform(Rational::frac(1, 2), cfg.degrees())?;
        let report = is_recursive(&spec, &cfg, DEFAULT_EXPLORATION_BUDGET)?;
        println!(
            "{name:<22} nash={:<5} strict={:<5} recursive={:?} family={}",
            report.nash,
            report.strict,
            report.recursive,
            classify_family(&cfg)
        );
        for check in audit_conditions(&spec, &cfg, &report).iter().filter(|c| !c.passed) {
            println!("  failed {}: {}", check.name, check.detail);
        }
        if let Some(w) = &report.witness {
            println!("  player {} improves with {:?}", w.player, w.action);
        }
    }
    Ok(())
}
