//! Named graphs used throughout the equilibrium analysis.

use super::Configuration;

fn build(out: Vec<Vec<usize>>) -> Configuration {
    Configuration::new(out.len(), out).expect("named graph is well formed")
}

/// Undirected ring `R_n` (out-degree 2, `n >= 3`).
pub fn ring(n: usize) -> Configuration {
    assert!(n >= 3, "ring needs at least 3 nodes");
    build((0..n).map(|i| vec![(i + n - 1) % n, (i + 1) % n]).collect())
}

/// Complete graph `K_n` (out-degree `n - 1`).
pub fn complete(n: usize) -> Configuration {
    assert!(n >= 2);
    build((0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect())
}

/// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
pub fn directed_cycle(n: usize) -> Configuration {
    assert!(n >= 2);
    build((0..n).map(|i| vec![(i + 1) % n]).collect())
}

/// Complete bipartite `K_{l,m}`; the first `l` nodes form one side.
pub fn complete_bipartite(l: usize, m: usize) -> Configuration {
    let n = l + m;
    build(
        (0..n)
            .map(|i| if i < l { (l..n).collect() } else { (0..l).collect() })
            .collect(),
    )
}

/// The 3-cube skeleton (8 nodes, out-degree 3).
pub fn cube() -> Configuration {
    build((0..8usize).map(|i| (0..3).map(|b| i ^ (1 << b)).collect()).collect())
}

/// Butterfly `B5`: hub 0 with wings `{1,2}` and `{3,4}`.
///
/// Links: `0 -> {1,3}`, `1 -> {0,2}`, `2 -> {0,1}`, `3 -> {0,4}`, `4 -> {0,3}`.
pub fn butterfly() -> Configuration {
    build(vec![vec![1, 3], vec![0, 2], vec![0, 1], vec![0, 4], vec![0, 3]])
}

/// `B5'`: the hub of [`butterfly`] rewires to `{3,4}`, leaving the 3-clique
/// `{0,3,4}` as a sink and the 2-clique `{1,2}` pointing at `0`.
pub fn butterfly_prime() -> Configuration {
    build(vec![vec![3, 4], vec![0, 2], vec![0, 1], vec![0, 4], vec![0, 3]])
}

/// `B5''`: the 2-clique source of [`butterfly_prime`] points at two distinct
/// nodes of the 3-clique.
pub fn butterfly_double_prime() -> Configuration {
    build(vec![vec![3, 4], vec![2, 3], vec![0, 1], vec![0, 4], vec![0, 3]])
}

/// `cliques` disjoint `(d+1)`-cliques plus a hub (last node) linking to all.
pub fn hub_spoke(cliques: usize, d: usize) -> Configuration {
    let parts: Vec<Configuration> = (0..cliques).map(|_| complete(d + 1)).collect();
    let base = disjoint_union(&parts);
    let n = base.n() + 1;
    let mut out = base.adjacency().to_vec();
    out.push((0..n - 1).collect());
    build(out)
}

/// A `(d+1)`-clique on `0..=d` plus a source node `d+1` linking to `1..=d`.
pub fn clique_with_source(d: usize) -> Configuration {
    let mut out = complete(d + 1).adjacency().to_vec();
    out.push((1..=d).collect());
    build(out)
}

/// Places the given graphs side by side, relabeling consecutively.
pub fn disjoint_union(parts: &[Configuration]) -> Configuration {
    let mut out = Vec::new();
    let mut offset = 0;
    for p in parts {
        out.extend(
            p.adjacency()
                .iter()
                .map(|l| l.iter().map(|&j| j + offset).collect::<Vec<_>>()),
        );
        offset += p.n();
    }
    build(out)
}

/// Relabels node `v` to `perm[v]`.
pub fn relabel(cfg: &Configuration, perm: &[usize]) -> Configuration {
    let mut out = vec![Vec::new(); cfg.n()];
    for v in 0..cfg.n() {
        out[perm[v]] = cfg.out(v).iter().map(|&j| perm[j]).collect();
    }
    build(out)
}
