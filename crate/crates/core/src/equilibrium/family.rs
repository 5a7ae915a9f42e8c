use std::fmt;

use serde::Serialize;

use crate::graph::named::butterfly;
use crate::graph::{ComponentRole, Condensation, Configuration};

/// Structural families of equilibrium graphs.
///
/// Families overlap (two disjoint 2-cliques are also a clique union), so
/// labels are assigned in a fixed order: the degree-one family, then the
/// degree-two families, then clique unions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyLabel {
    /// Disjoint 2-cliques plus `sources` single nodes linking into them.
    TwoCliquesWithSources {
        sources: usize,
    },
    /// Disjoint undirected rings of length at least 3.
    RingUnion,
    /// Disjoint triangles plus one 2-clique source whose other links land on the triangles.
    TrianglesWithPairSource,
    /// Disjoint triangles plus one butterfly.
    TrianglesWithButterfly,
    /// Disjoint, isolated `size`-cliques.
    CliqueUnion {
        size: usize,
    },
    Unclassified,
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyLabel::TwoCliquesWithSources { sources } => write!(f, "two-cliques+{sources}-sources"),
            FamilyLabel::RingUnion => write!(f, "rings"),
            FamilyLabel::TrianglesWithPairSource => write!(f, "triangles+pair-source"),
            FamilyLabel::TrianglesWithButterfly => write!(f, "triangles+butterfly"),
            FamilyLabel::CliqueUnion { size } => write!(f, "cliques-of-{size}"),
            FamilyLabel::Unclassified => write!(f, "none"),
        }
    }
}

/// Assigns the structural family of a configuration (independent of `beta` and `eta`).
pub fn classify_family(cfg: &Configuration) -> FamilyLabel {
    let cond = Condensation::of(cfg);
    let degrees = cfg.degrees();
    match degrees.uniform() {
        Some(1) => {
            if let Some(sources) = two_cliques_with_sources(cfg, &cond) {
                return FamilyLabel::TwoCliquesWithSources { sources };
            }
        }
        Some(2) => {
            if let Some(label) = degree_two_family(cfg, &cond) {
                return label;
            }
        }
        _ => {}
    }
    clique_union(cfg, &cond).map_or(FamilyLabel::Unclassified, |size| FamilyLabel::CliqueUnion { size })
}

fn is_mutual(cfg: &Configuration, members: &[usize]) -> bool {
    members
        .iter()
        .all(|&a| cfg.out(a).iter().all(|&b| members.contains(&b) && cfg.has_link(b, a)))
}

fn two_cliques_with_sources(cfg: &Configuration, cond: &Condensation) -> Option<usize> {
    let mut sources = 0;
    let mut cliques = 0;
    for (members, role) in cond.components.iter().zip(&cond.roles) {
        match (members.len(), role) {
            (2, ComponentRole::Sink) => cliques += 1,
            (1, ComponentRole::Source) => {
                let target = cfg.out(members[0])[0];
                if cond.components[cond.component_of[target]].len() != 2 {
                    return None;
                }
                sources += 1;
            }
            _ => return None,
        }
    }
    (cliques > 0).then_some(sources)
}

fn degree_two_family(cfg: &Configuration, cond: &Condensation) -> Option<FamilyLabel> {
    let isolated_ring = |c: usize| cond.is_isolated(cfg, c) && is_mutual(cfg, &cond.components[c]);
    if (0..cond.len()).all(isolated_ring) {
        return Some(FamilyLabel::RingUnion);
    }
    // the remaining families: triangles plus one special component
    let mut special = Vec::new();
    for (c, members) in cond.components.iter().enumerate() {
        let triangle = members.len() == 3 && cond.roles[c] == ComponentRole::Sink && is_mutual(cfg, members);
        if !triangle {
            special.push(c);
        }
    }
    let [c] = special[..] else { return None };
    let members = &cond.components[c];
    match (members.len(), cond.roles[c]) {
        (2, ComponentRole::Source) => {
            let [a, b] = members[..] else { return None };
            let paired = cfg.has_link(a, b) && cfg.has_link(b, a);
            paired.then_some(FamilyLabel::TrianglesWithPairSource)
        }
        (5, ComponentRole::Sink) if cond.is_isolated(cfg, c) && is_butterfly(cfg, members) => {
            Some(FamilyLabel::TrianglesWithButterfly)
        }
        _ => None,
    }
}

/// Matches the induced subgraph on five nodes against the butterfly under
/// every relabeling.
fn is_butterfly(cfg: &Configuration, members: &[usize]) -> bool {
    let local = |v: usize| members.iter().position(|&m| m == v);
    let mut adj = [[false; 5]; 5];
    for (a, &v) in members.iter().enumerate() {
        for &w in cfg.out(v) {
            match local(w) {
                Some(b) => adj[a][b] = true,
                None => return false,
            }
        }
    }
    let pattern = butterfly();
    let mut perm = [0usize, 1, 2, 3, 4];
    loop {
        let matches = (0..5).all(|v| (0..5).all(|w| pattern.has_link(v, w) == adj[perm[v]][perm[w]]));
        if matches {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn clique_union(cfg: &Configuration, cond: &Condensation) -> Option<usize> {
    let size = cond.components[0].len();
    let ok = size >= 2
        && cond.components.iter().enumerate().all(|(c, members)| {
            members.len() == size && cond.is_isolated(cfg, c) && members.iter().all(|&v| cfg.degree(v) == size - 1)
        });
    ok.then_some(size)
}
