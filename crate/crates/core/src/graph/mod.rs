//! Directed-graph view of a configuration.
//!
//! A [`Configuration`] is simultaneously a strategy profile (player `i` plays
//! the set `out[i]`) and the directed graph whose links are `(i, j)` for
//! `j in out[i]`. Node ids are `0..n`.

mod io;
pub mod named;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{parse_edge_list, read_configuration};

/// Out-degree `d_i` of every node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutDegreeProfile(pub Vec<usize>);

impl OutDegreeProfile {
    pub fn homogeneous(n: usize, d: usize) -> Self {
        OutDegreeProfile(vec![d; n])
    }

    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        let profile = OutDegreeProfile(degrees);
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.0.len();
        for (i, &d) in self.0.iter().enumerate() {
            if d == 0 || d + 1 > n {
                return Err(Error::InvalidSpec(format!(
                    "out-degree of node {i} is {d}, must lie in 1..={}",
                    n.saturating_sub(1)
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> usize {
        self.0.iter().copied().min().unwrap_or(0)
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Common degree when every node has the same out-degree.
    pub fn uniform(&self) -> Option<usize> {
        let first = *self.0.first()?;
        self.0.iter().all(|&d| d == first).then_some(first)
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<usize>() as f64 / self.0.len() as f64
    }
}

impl std::ops::Index<usize> for OutDegreeProfile {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// A strategy profile, canonically encoded as sorted out-neighbor lists.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Configuration {
    n: usize,
    out: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawConfiguration {
    n: usize,
    out: Vec<Vec<usize>>,
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawConfiguration::deserialize(d)?;
        Configuration::new(raw.n, raw.out).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration{:?}", self.out)
    }
}

impl Configuration {
    /// Validates and canonicalizes adjacency lists.
    pub fn new(n: usize, out: Vec<Vec<usize>>) -> Result<Self> {
        if out.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} adjacency lists for n = {n}",
                out.len()
            )));
        }
        let mut canonical = Vec::with_capacity(n);
        for (i, mut list) in out.into_iter().enumerate() {
            if list.is_empty() {
                return Err(Error::EmptyOutSet { node: i });
            }
            for &j in &list {
                if j >= n {
                    return Err(Error::OutOfRange {
                        node: i,
                        neighbor: j,
                        n,
                    });
                }
                if j == i {
                    return Err(Error::SelfLoop { node: i });
                }
            }
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateNeighbor {
                    node: i,
                    neighbor: w[0],
                });
            }
            canonical.push(list);
        }
        Ok(Configuration { n, out: canonical })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn out(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.out
    }

    pub fn degree(&self, i: usize) -> usize {
        self.out[i].len()
    }

    pub fn degrees(&self) -> OutDegreeProfile {
        OutDegreeProfile(self.out.iter().map(Vec::len).collect())
    }

    pub fn has_link(&self, from: usize, to: usize) -> bool {
        self.out[from].binary_search(&to).is_ok()
    }

    pub fn link_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// The configuration obtained when player `i` switches to `action`.
    pub fn with_action(&self, i: usize, action: Vec<usize>) -> Result<Self> {
        let mut out = self.out.clone();
        out[i] = action;
        Configuration::new(self.n, out)
    }

    /// In-neighbor lists (sorted).
    pub fn in_neighbors(&self) -> Vec<Vec<usize>> {
        let mut inn = vec![Vec::new(); self.n];
        for (j, list) in self.out.iter().enumerate() {
            for &k in list {
                inn[k].push(j);
            }
        }
        inn
    }

    /// Nodes with a walk of length at most `bound` towards `i` (`None` = unbounded).
    pub fn in_reach(&self, i: usize, bound: Option<usize>) -> Vec<usize> {
        let mask = self.in_reach_mask(i, bound);
        (0..self.n).filter(|&j| mask[j]).collect()
    }

    /// Membership mask of [`Configuration::in_reach`].
    pub fn in_reach_mask(&self, i: usize, bound: Option<usize>) -> Vec<bool> {
        let inn = self.in_neighbors();
        reverse_bfs(&inn, i, bound)
    }

    /// Canonical JSON encoding `{"n":..,"out":[[..],..]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub(crate) fn reverse_bfs(inn: &[Vec<usize>], start: usize, bound: Option<usize>) -> Vec<bool> {
    let mut seen = vec![false; inn.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((v, depth)) = queue.pop_front() {
        if bound.is_some_and(|b| depth >= b) {
            continue;
        }
        for &u in &inn[v] {
            if !seen[u] {
                seen[u] = true;
                queue.push_back((u, depth + 1));
            }
        }
    }
    seen
}

/// Tarjan's algorithm without recursion; components come out in reverse
/// topological order of the condensation.
pub(crate) fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut counter = 0usize;
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    components
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentRole {
    /// No link leaves the component (isolated components included).
    Sink,
    /// Not a sink, and no link enters the component.
    Source,
    Internal,
}

/// Strongly connected components ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condensation {
    pub components: Vec<Vec<usize>>,
    pub roles: Vec<ComponentRole>,
    pub component_of: Vec<usize>,
}

impl Condensation {
    pub fn of(cfg: &Configuration) -> Self {
        let mut components = strongly_connected_components(&cfg.out);
        components.sort_by_key(|c| c[0]);
        let mut component_of = vec![0; cfg.n];
        for (c, members) in components.iter().enumerate() {
            for &v in members {
                component_of[v] = c;
            }
        }
        let mut has_out = vec![false; components.len()];
        let mut has_in = vec![false; components.len()];
        for (j, list) in cfg.out.iter().enumerate() {
            for &k in list {
                let (a, b) = (component_of[j], component_of[k]);
                if a != b {
                    has_out[a] = true;
                    has_in[b] = true;
                }
            }
        }
        let roles = (0..components.len())
            .map(|c| match (has_out[c], has_in[c]) {
                (false, _) => ComponentRole::Sink,
                (true, false) => ComponentRole::Source,
                (true, true) => ComponentRole::Internal,
            })
            .collect();
        Condensation {
            components,
            roles,
            component_of,
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn count(&self, role: ComponentRole) -> usize {
        self.roles.iter().filter(|&&r| r == role).count()
    }

    /// A sink with no incoming links from other components.
    pub fn is_isolated(&self, cfg: &Configuration, c: usize) -> bool {
        self.roles[c] == ComponentRole::Sink
            && (0..cfg.n).all(|j| self.component_of[j] == c || cfg.out[j].iter().all(|&k| self.component_of[k] != c))
    }
}

pub fn condensation(cfg: &Configuration) -> Condensation {
    Condensation::of(cfg)
}

/// Counts used by the structural theorems and by the fragmentation experiments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralMetrics {
    /// Number of strongly connected components.
    pub c: usize,
    /// Undirected links: unordered pairs joined in both directions.
    pub c2: usize,
    /// Directed 3-cycles, one per (node set, orientation).
    pub c3: usize,
    /// Largest number of nodes from which a single node is reachable.
    pub m: usize,
    pub source_sizes: Vec<usize>,
}

pub fn structural_metrics(cfg: &Configuration) -> StructuralMetrics {
    let cond = Condensation::of(cfg);
    let mut c2 = 0;
    let mut c3 = 0;
    for a in 0..cfg.n {
        for &b in cfg.out(a) {
            if b > a && cfg.has_link(b, a) {
                c2 += 1;
            }
            if b < a {
                continue;
            }
            // each oriented triangle is counted from its smallest node
            for &c in cfg.out(b) {
                if c > a && c != b && cfg.has_link(c, a) {
                    c3 += 1;
                }
            }
        }
    }
    let source_sizes = cond
        .components
        .iter()
        .zip(&cond.roles)
        .filter(|(_, &r)| r == ComponentRole::Source)
        .map(|(c, _)| c.len())
        .collect();
    StructuralMetrics {
        c: cond.len(),
        c2,
        c3,
        m: max_in_reach(cfg),
        source_sizes,
    }
}

/// `m(x)`: every node of a component reaches the same set, so one reverse
/// BFS per component suffices.
pub fn max_in_reach(cfg: &Configuration) -> usize {
    let cond = Condensation::of(cfg);
    let inn = cfg.in_neighbors();
    cond.components
        .iter()
        .map(|comp| reverse_bfs(&inn, comp[0], None).into_iter().filter(|&b| b).count())
        .max()
        .unwrap_or(0)
}

/// Smallest number of non-links in a spanning tree directed toward a single
/// root, i.e. the exponent `e` with `Z ~ (1 - beta)^e` as `beta -> 1`.
///
/// Rooted at `i`, every sink component of the graph without `i`'s links,
/// other than `{i}` itself, must be left through exactly one teleport.
/// Equals `n - m(x)` when the graph has a single sink component, and can be
/// smaller otherwise (nodes outside the root's in-reach still follow links).
pub fn teleport_exponent(cfg: &Configuration) -> usize {
    (0..cfg.n())
        .map(|i| {
            let mut adj = cfg.out.clone();
            adj[i].clear();
            let comps = strongly_connected_components(&adj);
            let mut comp_of = vec![0; cfg.n()];
            for (c, members) in comps.iter().enumerate() {
                for &v in members {
                    comp_of[v] = c;
                }
            }
            let sinks = comps
                .iter()
                .enumerate()
                .filter(|(c, members)| members.iter().all(|&v| adj[v].iter().all(|&w| comp_of[w] == *c)))
                .count();
            sinks - 1
        })
        .min()
        .unwrap_or(0)
}
