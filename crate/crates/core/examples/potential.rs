//! Tree sums and the potential, checked against a unilateral deviation.

use centrality_forge::game::{potential, tree_sum, utility, TreeSumMethod};
use centrality_forge::graph::named::ring;
use centrality_forge::{GameSpec, Rational, Scalar};

fn main() -> centrality_forge::Result<()> {
    let cfg = ring(5);
    let spec = GameSpec::uniform(Rational::frac(1, 2), cfg.degrees())?;
    let report = potential(&spec, &cfg)?;
    println!("Z = {}, psi = {:.6}, m = {}", report.z, report.psi, report.m);
    let by_minor = tree_sum(&spec, &cfg, 0, TreeSumMethod::Minor)?;
    let by_trees = tree_sum(&spec, &cfg, 0, TreeSumMethod::Enumerate)?;
    println!("tree sum at 0: {by_minor} (minor) vs {by_trees} (enumerated)");

    // the ratio of utilities matches the inverse ratio of potentials
    let moved = cfg.with_action(0, vec![2, 3])?;
    let after = potential(&spec, &moved)?;
    let lhs = utility(&spec, &moved, 0)? * after.z.clone();
    let rhs = utility(&spec, &cfg, 0)? * report.z.clone();
    println!("u'Z' = {lhs}, uZ = {rhs}, equal: {}", lhs == rhs);
    println!("Z after deviation = {} ({:.6})", after.z, after.z.to_f64());
    Ok(())
}
