//! PageRank centrality and expected hitting times of the random walk
//! `P = beta * R + (1 - beta) * 1 eta^T`, where `R` is the row-normalized
//! adjacency matrix of the configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Configuration, OutDegreeProfile};
use crate::linalg::DenseMatrix;
use crate::scalar::{Scalar, DEFAULT_TIE_TOLERANCE};

/// Largest system solved by dense elimination; larger float systems iterate.
pub const DENSE_SOLVE_LIMIT: usize = 512;
const ITERATIVE_RESIDUAL: f64 = 1e-12;
const ITERATIVE_MAX_SWEEPS: usize = 200_000;

/// Parameters of a centrality game: discount factor, intrinsic centrality
/// and out-degree profile.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec<S> {
    pub beta: S,
    pub eta: Vec<S>,
    pub degrees: OutDegreeProfile,
    /// Relative tolerance for float tie detection; ignored by exact backends.
    pub tie_tolerance: f64,
}

impl<S: Scalar> GameSpec<S> {
    pub fn new(beta: S, eta: Vec<S>, degrees: OutDegreeProfile) -> Result<Self> {
        let spec = GameSpec {
            beta,
            eta,
            degrees,
            tie_tolerance: DEFAULT_TIE_TOLERANCE,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Uniform intrinsic centrality `eta_i = 1/n`.
    pub fn uniform(beta: S, degrees: OutDegreeProfile) -> Result<Self> {
        let n = degrees.len();
        let eta = (0..n).map(|_| S::one() / S::from_count(n)).collect();
        Self::new(beta, eta, degrees)
    }

    /// Uniform spec whose degree profile is read off a configuration.
    pub fn uniform_for(beta: S, cfg: &Configuration) -> Result<Self> {
        Self::uniform(beta, cfg.degrees())
    }

    pub fn with_tie_tolerance(mut self, tolerance: f64) -> Self {
        self.tie_tolerance = tolerance;
        self
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > S::zero() && self.beta < S::one()) {
            return Err(Error::InvalidSpec(format!("beta = {} must lie in (0, 1)", self.beta)));
        }
        if self.eta.len() != self.degrees.len() {
            return Err(Error::InvalidSpec(format!(
                "eta has {} entries for {} nodes",
                self.eta.len(),
                self.degrees.len()
            )));
        }
        if self.eta.iter().any(|e| e.is_negative()) {
            return Err(Error::InvalidSpec("eta must be nonnegative".into()));
        }
        let total = self.eta.iter().fold(S::zero(), |a, e| a + e.clone());
        let sums_to_one = if S::EXACT {
            total == S::one()
        } else {
            (total.to_f64() - 1.0).abs() <= 1e-12
        };
        if !sums_to_one {
            return Err(Error::InvalidSpec(format!("eta sums to {total}, not 1")));
        }
        self.degrees.validate()
    }

    /// Checks that `cfg` is a configuration of this game.
    pub fn check(&self, cfg: &Configuration) -> Result<()> {
        if cfg.n() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "configuration has {} nodes, game has {}",
                cfg.n(),
                self.n()
            )));
        }
        for i in 0..cfg.n() {
            if cfg.degree(i) != self.degrees[i] {
                return Err(Error::DimensionMismatch(format!(
                    "node {i} plays {} links, its out-degree is {}",
                    cfg.degree(i),
                    self.degrees[i]
                )));
            }
        }
        Ok(())
    }

    /// `1 / (1 - beta)`: normalized hitting time of nodes that cannot reach the target.
    pub fn unreachable_time(&self) -> S {
        S::one() / (S::one() - self.beta.clone())
    }

    fn link_weight(&self, j: usize) -> S {
        self.beta.clone() / S::from_count(self.degrees[j])
    }
}

/// JSON description of a game: `{"beta": .., "eta": "uniform" | [..], "degrees": [..]}`.
///
/// Numbers may be JSON numbers or strings such as `"1/2"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub beta: serde_json::Value,
    #[serde(default = "uniform_eta")]
    pub eta: serde_json::Value,
    pub degrees: Vec<usize>,
}

fn uniform_eta() -> serde_json::Value {
    serde_json::Value::String("uniform".into())
}

fn literal<S: Scalar>(v: &serde_json::Value) -> Result<S> {
    match v {
        serde_json::Value::Number(x) => S::parse_literal(&x.to_string()),
        serde_json::Value::String(s) => S::parse_literal(s),
        other => Err(Error::Parse(format!("expected a number, found {other}"))),
    }
}

/// Parses an intrinsic-centrality description (`"uniform"` or a list of numbers).
pub fn parse_eta<S: Scalar>(v: &serde_json::Value, n: usize) -> Result<Vec<S>> {
    match v {
        serde_json::Value::String(s) if s == "uniform" => Ok((0..n).map(|_| S::one() / S::from_count(n)).collect()),
        serde_json::Value::Array(items) => items.iter().map(literal).collect(),
        other => Err(Error::Parse(format!(
            "eta must be \"uniform\" or a list, found {other}"
        ))),
    }
}

impl SpecFile {
    pub fn into_spec<S: Scalar>(&self) -> Result<GameSpec<S>> {
        let n = self.degrees.len();
        let beta = literal(&self.beta)?;
        let eta = parse_eta(&self.eta, n)?;
        GameSpec::new(beta, eta, OutDegreeProfile(self.degrees.clone()))
    }
}

/// Stationary distribution of `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector<S> {
    pub pi: Vec<S>,
}

/// Expected hitting times toward `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingTimeTable<S> {
    pub target: usize,
    pub values: Vec<S>,
    /// `true` for the `eta = delta^target` variant.
    pub normalized: bool,
}

/// `P[j][k] = beta [k in out(j)] / d_j + (1 - beta) eta_k`.
pub fn transition_matrix<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration) -> Result<DenseMatrix<S>> {
    spec.check(cfg)?;
    let n = cfg.n();
    let teleport = S::one() - spec.beta.clone();
    let mut p = DenseMatrix::zeros(n);
    for j in 0..n {
        for k in 0..n {
            p[(j, k)] = teleport.clone() * spec.eta[k].clone();
        }
        let w = spec.link_weight(j);
        for &k in cfg.out(j) {
            p[(j, k)] = p[(j, k)].clone() + w.clone();
        }
    }
    Ok(p)
}

/// Solves `(I - beta R^T) pi = (1 - beta) eta`.
pub fn pagerank<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration) -> Result<CentralityVector<S>> {
    spec.check(cfg)?;
    let n = cfg.n();
    let teleport = S::one() - spec.beta.clone();
    let rhs: Vec<S> = spec.eta.iter().map(|e| teleport.clone() * e.clone()).collect();
    if n > DENSE_SOLVE_LIMIT && !S::EXACT {
        return pagerank_iterative(spec, cfg, rhs);
    }
    let mut a = DenseMatrix::<S>::identity(n);
    for j in 0..n {
        let w = spec.link_weight(j);
        for &k in cfg.out(j) {
            a[(k, j)] = a[(k, j)].clone() - w.clone();
        }
    }
    let pi = a.solve(&rhs)?;
    Ok(CentralityVector { pi })
}

fn pagerank_iterative<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration, rhs: Vec<S>) -> Result<CentralityVector<S>> {
    let mut pi = rhs.clone();
    for _ in 0..ITERATIVE_MAX_SWEEPS {
        let mut next = rhs.clone();
        for (j, p) in pi.iter().enumerate() {
            let share = spec.link_weight(j) * p.clone();
            for &k in cfg.out(j) {
                next[k] = next[k].clone() + share.clone();
            }
        }
        let change = next
            .iter()
            .zip(&pi)
            .map(|(a, b)| (a.clone() - b.clone()).abs().to_f64())
            .fold(0.0, f64::max);
        pi = next;
        if change < ITERATIVE_RESIDUAL {
            return Ok(CentralityVector { pi });
        }
    }
    Err(Error::SolveFailure("pagerank iteration did not converge".into()))
}

/// `(1 - beta) sum_{k < terms} beta^k (R^T)^k eta`.
pub fn pagerank_series<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration, terms: usize) -> Result<Vec<S>> {
    spec.check(cfg)?;
    let n = cfg.n();
    let teleport = S::one() - spec.beta.clone();
    let mut term: Vec<S> = spec.eta.iter().map(|e| teleport.clone() * e.clone()).collect();
    let mut total = vec![S::zero(); n];
    for _ in 0..terms {
        for (t, x) in total.iter_mut().zip(&term) {
            *t = t.clone() + x.clone();
        }
        let mut next = vec![S::zero(); n];
        for (j, x) in term.iter().enumerate() {
            let share = spec.link_weight(j) * x.clone();
            for &k in cfg.out(j) {
                next[k] = next[k].clone() + share.clone();
            }
        }
        term = next;
    }
    Ok(total)
}

/// Expected hitting times toward `target`.
///
/// With `normalized`, `eta` is replaced by `delta^target`; only the unknowns
/// of nodes that can reach `target` are solved and every other node gets
/// `1 / (1 - beta)`.
pub fn hitting_times<S: Scalar>(
    spec: &GameSpec<S>,
    cfg: &Configuration,
    target: usize,
    normalized: bool,
) -> Result<HittingTimeTable<S>> {
    spec.check(cfg)?;
    if target >= cfg.n() {
        return Err(Error::DimensionMismatch(format!(
            "target {target} outside 0..{}",
            cfg.n()
        )));
    }
    let values = if normalized {
        let reach = cfg.in_reach_mask(target, None);
        normalized_times(spec, cfg, target, &reach)?
    } else {
        full_times(spec, cfg, target)?
    };
    Ok(HittingTimeTable {
        target,
        values,
        normalized,
    })
}

/// Normalized times given the precomputed reach mask of `target`.
pub(crate) fn normalized_times<S: Scalar>(
    spec: &GameSpec<S>,
    cfg: &Configuration,
    target: usize,
    reach: &[bool],
) -> Result<Vec<S>> {
    let n = cfg.n();
    let outside = spec.unreachable_time();
    let unknowns: Vec<usize> = (0..n).filter(|&j| reach[j] && j != target).collect();
    let mut slot = vec![usize::MAX; n];
    for (a, &j) in unknowns.iter().enumerate() {
        slot[j] = a;
    }
    let mut values: Vec<S> = (0..n)
        .map(|j| if reach[j] { S::zero() } else { outside.clone() })
        .collect();
    if unknowns.is_empty() {
        return Ok(values);
    }
    // constant part: 1 + (beta/d_j) * #(links leaving the reach set) / (1 - beta)
    let constant: Vec<S> = unknowns
        .iter()
        .map(|&j| {
            let escaping = cfg.out(j).iter().filter(|&&k| !reach[k]).count();
            S::one() + spec.link_weight(j) * S::from_count(escaping) * outside.clone()
        })
        .collect();

    let solved = if unknowns.len() > DENSE_SOLVE_LIMIT && !S::EXACT {
        gauss_seidel(spec, cfg, &unknowns, &slot, &constant)?
    } else {
        let mut a = DenseMatrix::<S>::identity(unknowns.len());
        for (r, &j) in unknowns.iter().enumerate() {
            let w = spec.link_weight(j);
            for &k in cfg.out(j) {
                if slot[k] != usize::MAX {
                    a[(r, slot[k])] = a[(r, slot[k])].clone() - w.clone();
                }
            }
        }
        a.solve(&constant)?
    };
    for (&j, v) in unknowns.iter().zip(solved) {
        values[j] = v;
    }
    Ok(values)
}

fn gauss_seidel<S: Scalar>(
    spec: &GameSpec<S>,
    cfg: &Configuration,
    unknowns: &[usize],
    slot: &[usize],
    constant: &[S],
) -> Result<Vec<S>> {
    let mut x = constant.to_vec();
    for _ in 0..ITERATIVE_MAX_SWEEPS {
        let mut change = 0f64;
        for (r, &j) in unknowns.iter().enumerate() {
            let w = spec.link_weight(j);
            let mut acc = constant[r].clone();
            for &k in cfg.out(j) {
                if slot[k] != usize::MAX {
                    acc = acc + w.clone() * x[slot[k]].clone();
                }
            }
            change = change.max((acc.clone() - x[r].clone()).abs().to_f64());
            x[r] = acc;
        }
        if change < ITERATIVE_RESIDUAL {
            return Ok(x);
        }
    }
    Err(Error::SolveFailure("hitting-time iteration did not converge".into()))
}

fn full_times<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration, target: usize) -> Result<Vec<S>> {
    let n = cfg.n();
    let p = transition_matrix(spec, cfg)?;
    // tau_j - sum_{k != target} P[j][k] tau_k = 1 for j != target
    let mut a = DenseMatrix::<S>::identity(n).without(target);
    let others: Vec<usize> = (0..n).filter(|&k| k != target).collect();
    for (r, &j) in others.iter().enumerate() {
        for (c, &k) in others.iter().enumerate() {
            a[(r, c)] = a[(r, c)].clone() - p[(j, k)].clone();
        }
    }
    let solved = a.solve(&vec![S::one(); n - 1])?;
    let mut values = vec![S::zero(); n];
    for (&j, v) in others.iter().zip(solved) {
        values[j] = v;
    }
    Ok(values)
}

/// `tau_eta = sum_j eta_j tau_j` for a full (non-normalized) table.
pub fn eta_average<S: Scalar>(spec: &GameSpec<S>, table: &HittingTimeTable<S>) -> S {
    spec.eta
        .iter()
        .zip(&table.values)
        .fold(S::zero(), |a, (e, t)| a + e.clone() * t.clone())
}

/// Utility of the table's target if it played `action`, read off the full
/// hitting times toward it (which do not depend on its own links).
pub fn utility_of_action<S: Scalar>(spec: &GameSpec<S>, table: &HittingTimeTable<S>, action: &[usize]) -> S {
    let teleport = S::one() - spec.beta.clone();
    let linked = action.iter().fold(S::zero(), |a, &j| a + table.values[j].clone());
    let ret = S::one()
        + teleport * eta_average(spec, table)
        + spec.beta.clone() / S::from_count(action.len().max(1)) * linked;
    S::one() / ret
}

/// PageRank of `i` through the expected return time:
/// `pi_i = 1 / (1 + (1-beta) tau_eta + (beta/d_i) sum_{j in out(i)} tau_j)`.
pub fn kac_utility<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration, i: usize) -> Result<S> {
    let table = hitting_times(spec, cfg, i, false)?;
    Ok(utility_of_action(spec, &table, cfg.out(i)))
}
