//! Utilities, best-response sets and the tree-sum potential.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::centrality::{normalized_times, pagerank, transition_matrix, GameSpec};
use crate::error::{Error, Result};
use crate::graph::{max_in_reach, Configuration};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Largest game for which rooted trees are enumerated one by one.
pub const TREE_ENUMERATION_LIMIT: usize = 8;

/// Utility of player `i`: its PageRank.
pub fn utility<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration, i: usize) -> Result<S> {
    let pi = pagerank(spec, cfg)?.pi;
    pi.into_iter()
        .nth(i)
        .ok_or_else(|| Error::DimensionMismatch(format!("player {i} outside 0..{}", cfg.n())))
}

/// All optimal actions of one player, stored as `fixed ∪ (choose of pool)`.
///
/// Every member contains all of `fixed` plus exactly `choose` nodes of
/// `pool`; with large tie classes this family is far too big to list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponseSet<S> {
    pub player: usize,
    pub fixed: Vec<usize>,
    pub pool: Vec<usize>,
    pub choose: usize,
    /// Largest normalized hitting time among the chosen nodes.
    pub threshold: S,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, t| acc.saturating_mul((n - t) as u128) / (t as u128 + 1))
}

impl<S> BestResponseSet<S> {
    /// Number of optimal actions.
    pub fn len(&self) -> u128 {
        binomial(self.pool.len(), self.choose)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_singleton(&self) -> bool {
        self.len() == 1
    }

    pub fn degree(&self) -> usize {
        self.fixed.len() + self.choose
    }

    /// Whether the (sorted or unsorted) `action` is optimal.
    pub fn contains(&self, action: &[usize]) -> bool {
        if action.len() != self.degree() || !self.fixed.iter().all(|f| action.contains(f)) {
            return false;
        }
        action
            .iter()
            .filter(|a| !self.fixed.contains(a))
            .all(|a| self.pool.contains(a))
    }

    /// Iterates the optimal actions in lexicographic order of pool choices;
    /// each action is sorted.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        Combinations::new(self.pool.len(), self.choose).map(move |pick| {
            let mut action = self.fixed.clone();
            action.extend(pick.iter().map(|&p| self.pool[p]));
            action.sort_unstable();
            action
        })
    }

    /// All optimal actions, or `BudgetExceeded` when there are more than `cap`.
    pub fn actions(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        if self.len() > cap as u128 {
            return Err(Error::BudgetExceeded { cap });
        }
        Ok(self.iter().collect())
    }

    /// A uniformly random optimal action (sorted).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut action = self.fixed.clone();
        action.extend(
            rand::seq::index::sample(rng, self.pool.len(), self.choose)
                .into_iter()
                .map(|p| self.pool[p]),
        );
        action.sort_unstable();
        action
    }
}

/// k-subsets of `0..n` in lexicographic order.
pub(crate) struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut pos = k;
        while pos > 0 && next[pos - 1] == self.n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            self.current = None;
        } else {
            next[pos - 1] += 1;
            for t in pos..k {
                next[t] = next[t - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

/// The optimal actions of player `i` against the other players' links.
///
/// Nodes that reach `i` are ranked by their normalized hitting time toward
/// `i`; the optimum takes the `d_i` smallest, with every completion of the
/// tie class at the cut. When fewer than `d_i` nodes reach `i`, all of them
/// are taken and the remaining links are free. The intrinsic centrality
/// plays no role.
pub fn best_response_set<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration, i: usize) -> Result<BestResponseSet<S>> {
    spec.check(cfg)?;
    if i >= cfg.n() {
        return Err(Error::DimensionMismatch(format!("player {i} outside 0..{}", cfg.n())));
    }
    let d = cfg.degree(i);
    let reach = cfg.in_reach_mask(i, None);
    let times = normalized_times(spec, cfg, i, &reach)?;
    let mut candidates: Vec<usize> = (0..cfg.n()).filter(|&j| reach[j] && j != i).collect();

    if candidates.len() <= d {
        let pool: Vec<usize> = (0..cfg.n()).filter(|&j| !reach[j]).collect();
        let threshold = if candidates.len() < d {
            spec.unreachable_time()
        } else {
            candidates
                .iter()
                .map(|&j| times[j].clone())
                .fold(S::zero(), |a, b| if b > a { b } else { a })
        };
        let choose = d - candidates.len();
        return Ok(BestResponseSet {
            player: i,
            fixed: candidates,
            pool: if choose == 0 { Vec::new() } else { pool },
            choose,
            threshold,
        });
    }

    candidates.sort_by(|&a, &b| {
        times[a]
            .partial_cmp(&times[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let threshold = times[candidates[d - 1]].clone();
    let tol = spec.tie_tolerance;
    let mut fixed = Vec::new();
    let mut pool = Vec::new();
    for &j in &candidates {
        if times[j].ties(&threshold, tol) {
            pool.push(j);
        } else if times[j] < threshold {
            fixed.push(j);
        }
    }
    let mut choose = d - fixed.len();
    if choose == pool.len() {
        fixed.append(&mut pool);
        choose = 0;
    }
    fixed.sort_unstable();
    Ok(BestResponseSet {
        player: i,
        fixed,
        pool,
        choose,
        threshold,
    })
}

/// How rooted-tree sums are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeSumMethod {
    /// Sum over every spanning in-tree; exponential, limited to small games.
    Enumerate,
    /// Principal minor of `I - P`.
    Minor,
}

/// Sum over spanning in-trees rooted at `i` of the product of transition
/// probabilities along the tree links.
pub fn tree_sum<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration, i: usize, method: TreeSumMethod) -> Result<S> {
    let p = transition_matrix(spec, cfg)?;
    match method {
        TreeSumMethod::Enumerate => {
            if cfg.n() > TREE_ENUMERATION_LIMIT {
                return Err(Error::TooLargeForEnumeration {
                    n: cfg.n(),
                    limit: TREE_ENUMERATION_LIMIT,
                });
            }
            Ok(enumerate_trees(&p, i))
        }
        TreeSumMethod::Minor => Ok(minor_factorization(&p, i)?.0),
    }
}

fn enumerate_trees<S: Scalar>(p: &DenseMatrix<S>, root: usize) -> S {
    let n = p.dim();
    let order: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut parent = vec![usize::MAX; n];
    parent[root] = root;
    let mut total = S::zero();
    grow(p, root, &order, 0, &mut parent, S::one(), &mut total);
    total
}

fn grow<S: Scalar>(
    p: &DenseMatrix<S>,
    root: usize,
    order: &[usize],
    depth: usize,
    parent: &mut [usize],
    weight: S,
    total: &mut S,
) {
    if depth == order.len() {
        *total = total.clone() + weight;
        return;
    }
    let v = order[depth];
    for u in 0..p.dim() {
        if u == v || p[(v, u)].is_zero() || closes_cycle(parent, root, v, u) {
            continue;
        }
        parent[v] = u;
        grow(
            p,
            root,
            order,
            depth + 1,
            parent,
            weight.clone() * p[(v, u)].clone(),
            total,
        );
        parent[v] = usize::MAX;
    }
}

/// Whether linking `v -> u` closes a cycle among the links chosen so far.
fn closes_cycle(parent: &[usize], root: usize, v: usize, mut u: usize) -> bool {
    while u != root && parent[u] != usize::MAX {
        if u == v {
            return true;
        }
        u = parent[u];
    }
    u == v
}

/// `det` and `ln det` of `I - P` without row and column `i`.
fn minor_factorization<S: Scalar>(p: &DenseMatrix<S>, i: usize) -> Result<(S, f64)> {
    let n = p.dim();
    let mut a = DenseMatrix::<S>::identity(n);
    for r in 0..n {
        for c in 0..n {
            a[(r, c)] = a[(r, c)].clone() - p[(r, c)].clone();
        }
    }
    let minor = a.without(i);
    let (pivots, negative) = minor.elimination_pivots()?;
    let mut value = S::one();
    let mut log = 0.0;
    for pv in &pivots {
        if pv.is_zero() {
            return Err(Error::SolveFailure(format!("tree sum of node {i} vanishes")));
        }
        value = value * pv.clone();
        log += pv.abs().ln_value();
    }
    if negative {
        value = -value;
    }
    if !value.is_positive() && (S::EXACT || value.to_f64() != 0.0) {
        return Err(Error::SolveFailure(format!("tree sum of node {i} is not positive")));
    }
    Ok((value, log))
}

/// Tree sums, their total `Z` and the potential `-ln Z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialReport<S> {
    pub tree_sums: Vec<S>,
    pub z: S,
    pub log_tree_sums: Vec<f64>,
    pub log_z: f64,
    /// `-ln Z`; players improve exactly when it increases.
    pub psi: f64,
    /// Largest number of nodes that can reach a single node.
    pub m: usize,
}

impl<S: Scalar> PotentialReport<S> {
    /// `N_i / Z`, which equals the PageRank vector.
    pub fn centralities(&self) -> Vec<S> {
        self.tree_sums.iter().map(|t| t.clone() / self.z.clone()).collect()
    }
}

/// Full potential report via principal minors, evaluated in log space so
/// that `beta` close to one does not underflow.
pub fn potential<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration) -> Result<PotentialReport<S>> {
    let p = transition_matrix(spec, cfg)?;
    let parts: Vec<(S, f64)> = (0..cfg.n())
        .into_par_iter()
        .map(|i| minor_factorization(&p, i))
        .collect::<Result<_>>()?;
    let (tree_sums, log_tree_sums): (Vec<S>, Vec<f64>) = parts.into_iter().unzip();
    let z = tree_sums.iter().fold(S::zero(), |a, b| a + b.clone());
    let log_z = log_sum_exp(&log_tree_sums);
    Ok(PotentialReport {
        tree_sums,
        z,
        log_tree_sums,
        log_z,
        psi: -log_z,
        m: max_in_reach(cfg),
    })
}

/// `-ln Z` from one minor and the PageRank vector (`Z = N_k / pi_k`).
///
/// Cheaper than [`potential`] by a factor of `n`; used for trajectory
/// monitoring.
pub fn psi<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration) -> Result<f64> {
    let pi = pagerank(spec, cfg)?.pi;
    let k = (0..pi.len())
        .max_by(|&a, &b| pi[a].partial_cmp(&pi[b]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    let p = transition_matrix(spec, cfg)?;
    let (_, log_nk) = minor_factorization(&p, k)?;
    Ok(pi[k].ln_value() - log_nk)
}

pub(crate) fn log_sum_exp(logs: &[f64]) -> f64 {
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use crate::scalar::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::frac(a, b)
    }

    fn hetero() -> (GameSpec<Rational>, Configuration) {
        let cfg = Configuration::new(3, vec![vec![1, 2], vec![0], vec![0]]).unwrap();
        (GameSpec::uniform(q(1, 2), cfg.degrees()).unwrap(), cfg)
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(Combinations::new(3, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(Combinations::new(2, 3).count(), 0);
        assert_eq!(binomial(99, 4), 3_764_376);
    }

    #[test]
    fn utility_examples() {
        let cfg = ring(8);
        let spec = GameSpec::uniform(q(3, 5), cfg.degrees()).unwrap();
        for i in 0..8 {
            assert_eq!(utility(&spec, &cfg, i).unwrap(), q(1, 8));
        }
        let (spec, cfg) = hetero();
        assert_eq!(utility(&spec, &cfg, 0).unwrap(), q(4, 9));
    }

    #[test]
    fn butterfly_best_responses() {
        let cfg = butterfly();
        let spec = GameSpec::uniform(q(1, 2), cfg.degrees()).unwrap();
        let hub = best_response_set(&spec, &cfg, 0).unwrap();
        assert_eq!(hub.len(), 6);
        assert!(hub.contains(&[1, 3]));
        let wing = best_response_set(&spec, &cfg, 3).unwrap();
        assert!(wing.is_singleton());
        assert_eq!(wing.iter().collect::<Vec<_>>(), vec![vec![0, 4]]);
    }

    #[test]
    fn degree_one_best_response_is_any_in_neighbor() {
        // 1 -> 0, 2 -> 0, 0 -> 1, 3 -> 2
        let cfg = Configuration::new(4, vec![vec![1], vec![0], vec![0], vec![2]]).unwrap();
        let spec = GameSpec::uniform(q(1, 2), cfg.degrees()).unwrap();
        let br = best_response_set(&spec, &cfg, 0).unwrap();
        assert_eq!(br.iter().collect::<Vec<_>>(), vec![vec![1], vec![2]]);
    }

    #[test]
    fn unreached_player_links_freely() {
        // nobody links to node 3
        let cfg = Configuration::new(4, vec![vec![1], vec![0], vec![0], vec![2]]).unwrap();
        let spec = GameSpec::uniform(0.5, cfg.degrees()).unwrap();
        let br = best_response_set(&spec, &cfg, 3).unwrap();
        assert_eq!(br.len(), 3);
        assert!(br.fixed.is_empty());
        assert_eq!(br.threshold, 2.0);
    }

    #[test]
    fn saturated_reach_is_fixed() {
        // d = 2, only node 1 reaches node 0
        let cfg = Configuration::new(4, vec![vec![1, 2], vec![0, 2], vec![1, 3], vec![1, 2]]).unwrap();
        let spec = GameSpec::uniform(q(1, 2), cfg.degrees()).unwrap();
        let br = best_response_set(&spec, &cfg, 0).unwrap();
        assert!(br.contains(&[1, 3]) && br.contains(&[1, 2]));
        assert_eq!(br.fixed.len() + br.choose, 2);
        assert!(br.fixed.contains(&1));
    }

    #[test]
    fn tree_sum_examples() {
        let cfg = complete(2);
        let beta = q(2, 7);
        let spec = GameSpec::new(beta.clone(), vec![q(1, 1), q(0, 1)], cfg.degrees()).unwrap();
        for m in [TreeSumMethod::Enumerate, TreeSumMethod::Minor] {
            assert_eq!(tree_sum(&spec, &cfg, 0, m).unwrap(), q(1, 1));
            assert_eq!(tree_sum(&spec, &cfg, 1, m).unwrap(), beta);
        }
        let (spec, cfg) = hetero();
        for m in [TreeSumMethod::Enumerate, TreeSumMethod::Minor] {
            let sums: Vec<_> = (0..3).map(|i| tree_sum(&spec, &cfg, i, m).unwrap()).collect();
            assert_eq!(sums, vec![q(2, 3), q(5, 12), q(5, 12)]);
        }
        let big = ring(9);
        let spec = GameSpec::uniform(0.5, big.degrees()).unwrap();
        assert!(matches!(
            tree_sum(&spec, &big, 0, TreeSumMethod::Enumerate),
            Err(Error::TooLargeForEnumeration { n: 9, .. })
        ));
    }

    #[test]
    fn literal_link_weights_do_not_reproduce_pagerank() {
        // weights beta*[k in x_j] + (1-beta)*eta_k without the 1/d_j factor
        let (spec, cfg) = hetero();
        let mut p = DenseMatrix::<Rational>::zeros(3);
        for j in 0..3 {
            for k in 0..3 {
                p[(j, k)] = (q(1, 1) - spec.beta.clone()) * spec.eta[k].clone();
            }
            for &k in cfg.out(j) {
                p[(j, k)] = p[(j, k)].clone() + spec.beta.clone();
            }
        }
        let sums: Vec<_> = (0..3).map(|i| enumerate_trees(&p, i)).collect();
        let total = sums.iter().fold(q(0, 1), |a, b| a + b.clone());
        assert_eq!(sums[2].clone() / total, q(1, 3));
        assert_ne!(q(1, 3), pagerank(&spec, &cfg).unwrap().pi[2]);
    }

    #[test]
    fn potential_examples() {
        let beta = q(3, 10);
        let cfg = complete(2);
        for eta in [vec![q(1, 1), q(0, 1)], vec![q(1, 4), q(3, 4)]] {
            let spec = GameSpec::new(beta.clone(), eta, cfg.degrees()).unwrap();
            assert_eq!(potential(&spec, &cfg).unwrap().z, q(13, 10));
        }
        let (spec, cfg) = hetero();
        let rep = potential(&spec, &cfg).unwrap();
        assert_eq!(rep.z, q(3, 2));
        assert_eq!(rep.centralities(), pagerank(&spec, &cfg).unwrap().pi);
        assert!((rep.psi + 1.5f64.ln()).abs() < 1e-12);
        assert!((psi(&spec, &cfg).unwrap() - rep.psi).abs() < 1e-12);
        assert_eq!(rep.m, 3);
    }

    #[test]
    fn potential_survives_beta_near_one() {
        let cfg = disjoint_union(&[complete(3), complete(3), complete(3), complete(3)]);
        let spec = GameSpec::uniform(0.999, cfg.degrees()).unwrap();
        let rep = potential(&spec, &cfg).unwrap();
        assert!(rep.psi.is_finite());
        assert!((psi(&spec, &cfg).unwrap() - rep.psi).abs() < 1e-8);
    }
}
