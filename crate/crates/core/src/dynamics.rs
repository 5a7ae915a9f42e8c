//! Asynchronous best-response and noisy best-response dynamics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::centrality::{hitting_times, pagerank, utility_of_action, GameSpec};
use crate::equilibrium::ConfigurationSpace;
use crate::error::{Error, Result};
use crate::game::{best_response_set, log_sum_exp, potential, psi, Combinations};
use crate::graph::Configuration;
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Name of the pinned generator, recorded in every trace.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3), seed_from_u64";
/// Largest action set enumerated by one noisy step.
pub const NOISY_ACTION_CAP: usize = 1_000_000;
/// Largest configuration space for which the exact noisy chain is built.
pub const EXACT_CHAIN_LIMIT: u128 = 10_000;
const DENSE_STATIONARY_LIMIT: usize = 2_000;

/// Current configuration, step counter and generator.
#[derive(Debug, Clone)]
pub struct DynamicsState {
    pub cfg: Configuration,
    pub t: u64,
    pub rng: ChaCha8Rng,
}

impl DynamicsState {
    pub fn new(cfg: Configuration, seed: u64) -> Self {
        DynamicsState {
            cfg,
            t: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

/// One player changing its links.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub t: u64,
    pub player: usize,
    pub old: Vec<usize>,
    pub new: Vec<usize>,
}

/// Outcome of one update: the drawn player and the change, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub player: usize,
    pub event: Option<Event>,
}

fn apply(state: &mut DynamicsState, player: usize, action: Vec<usize>) -> Result<Step> {
    let old = state.cfg.out(player).to_vec();
    let event = if action != old {
        state.cfg = state.cfg.with_action(player, action.clone())?;
        Some(Event {
            t: state.t,
            player,
            old,
            new: action,
        })
    } else {
        None
    };
    state.t += 1;
    Ok(Step { player, event })
}

/// A uniformly drawn player moves to a uniformly drawn best response
/// (possibly its current action).
pub fn step_br<S: Scalar>(spec: &GameSpec<S>, state: &mut DynamicsState) -> Result<Step> {
    let player = state.rng.gen_range(0..state.cfg.n());
    let br = best_response_set(spec, &state.cfg, player)?;
    let action = br.sample(&mut state.rng);
    apply(state, player, action)
}

/// Log-utilities of every action of `player` against the others.
fn action_log_utilities<S: Scalar>(
    spec: &GameSpec<S>,
    cfg: &Configuration,
    player: usize,
) -> Result<(Vec<Vec<usize>>, Vec<f64>)> {
    let n = cfg.n();
    let d = cfg.degree(player);
    let count = (0..d).fold(1u128, |c, t| c * (n - 1 - t) as u128 / (t as u128 + 1));
    if count > NOISY_ACTION_CAP as u128 {
        return Err(Error::BudgetExceeded { cap: NOISY_ACTION_CAP });
    }
    let others: Vec<usize> = (0..n).filter(|&j| j != player).collect();
    let actions: Vec<Vec<usize>> = Combinations::new(n - 1, d)
        .map(|c| c.iter().map(|&k| others[k]).collect())
        .collect();
    // hitting times toward the player do not depend on its own links
    let logs = match hitting_times(spec, cfg, player, false) {
        Ok(table) => actions
            .iter()
            .map(|a| utility_of_action(spec, &table, a).ln_value())
            .collect(),
        Err(Error::SolveFailure(_)) => actions
            .iter()
            .map(|a| Ok(pagerank(spec, &cfg.with_action(player, a.clone())?)?.pi[player].ln_value()))
            .collect::<Result<_>>()?,
        Err(e) => return Err(e),
    };
    Ok((actions, logs))
}

/// Probabilities proportional to `exp(log / gamma)`, evaluated in log space.
fn log_linear_weights(logs: &[f64], gamma: f64) -> Result<Vec<f64>> {
    let scaled: Vec<f64> = logs.iter().map(|l| l / gamma).collect();
    let norm = log_sum_exp(&scaled);
    if !norm.is_finite() {
        return Err(Error::NumericUnderflow { gamma });
    }
    Ok(scaled.iter().map(|s| (s - norm).exp()).collect())
}

/// A uniformly drawn player picks any action with probability proportional
/// to `utility^(1/gamma)`; the current action is part of the support.
pub fn step_noisy<S: Scalar>(spec: &GameSpec<S>, state: &mut DynamicsState, gamma: f64) -> Result<Step> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidSpec(format!("noise level {gamma} must be positive")));
    }
    let player = state.rng.gen_range(0..state.cfg.n());
    let (actions, logs) = action_log_utilities(spec, &state.cfg, player)?;
    let weights = log_linear_weights(&logs, gamma)?;
    let u: f64 = state.rng.gen();
    let mut acc = 0.0;
    let mut pick = actions.len() - 1;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            pick = k;
            break;
        }
    }
    apply(state, player, actions[pick].clone())
}

/// Settings of a best-response run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunOptions {
    pub steps: u64,
    pub seed: u64,
    /// Stop once the configuration is a strict Nash equilibrium.
    pub early_stop: bool,
    /// Sample the potential every this many steps.
    pub potential_every: Option<u64>,
}

impl RunOptions {
    pub fn new(steps: u64, seed: u64) -> Self {
        RunOptions {
            steps,
            seed,
            early_stop: true,
            potential_every: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMetadata {
    pub rng: &'static str,
    pub seed: u64,
    pub steps: u64,
    pub early_stop: bool,
    pub beta: String,
    pub eta: Vec<String>,
    pub degrees: Vec<usize>,
}

/// A recorded best-response trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub metadata: TraceMetadata,
    pub initial: Configuration,
    pub events: Vec<Event>,
    #[serde(rename = "final")]
    pub final_configuration: Configuration,
    pub steps_run: u64,
    /// Whether the run ended at a strict Nash equilibrium.
    pub absorbed: bool,
    /// `(t, -ln Z)` samples; non-decreasing along the run.
    pub potential_series: Vec<(u64, f64)>,
}

impl Trace {
    /// Replays the events on the initial configuration.
    pub fn replay(&self) -> Result<Configuration> {
        let mut cfg = self.initial.clone();
        for e in &self.events {
            cfg = cfg.with_action(e.player, e.new.clone())?;
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Tracks which players are known to hold their unique best response in
/// the current configuration; cleared on every change.
struct StrictnessTracker {
    verified: Vec<bool>,
    count: usize,
    blocked: bool,
    quiet_steps: usize,
}

impl StrictnessTracker {
    fn new(n: usize) -> Self {
        StrictnessTracker {
            verified: vec![false; n],
            count: 0,
            blocked: false,
            quiet_steps: 0,
        }
    }

    fn reset(&mut self) {
        self.verified.iter_mut().for_each(|v| *v = false);
        self.count = 0;
        self.blocked = false;
        self.quiet_steps = 0;
    }

    fn is_complete(&self) -> bool {
        self.count == self.verified.len()
    }

    /// Verifies the remaining players, stopping at the first that has
    /// several best responses or is not playing one.
    fn sweep<S: Scalar>(&mut self, spec: &GameSpec<S>, cfg: &Configuration) -> Result<()> {
        for i in 0..cfg.n() {
            if self.verified[i] {
                continue;
            }
            let br = best_response_set(spec, cfg, i)?;
            if br.is_singleton() && br.contains(cfg.out(i)) {
                self.verified[i] = true;
                self.count += 1;
            } else {
                self.blocked = true;
                return Ok(());
            }
        }
        Ok(())
    }
}

/// Runs asynchronous best-response dynamics for `options.steps` updates.
///
/// With early stopping the run ends as soon as every player's best
/// response is unique and already played; non-strict equilibria keep
/// moving through their ties.
pub fn run_br<S: Scalar>(spec: &GameSpec<S>, init: &Configuration, options: RunOptions) -> Result<Trace> {
    spec.check(init)?;
    let n = init.n();
    let mut state = DynamicsState::new(init.clone(), options.seed);
    let mut events = Vec::new();
    let mut series = Vec::new();
    let mut tracker = StrictnessTracker::new(n);
    if let Some(k) = options.potential_every {
        if k == 0 {
            return Err(Error::InvalidSpec(
                "potential sampling interval must be positive".into(),
            ));
        }
        series.push((0, psi(spec, &state.cfg)?));
    }
    let mut absorbed = false;
    if options.early_stop {
        tracker.sweep(spec, &state.cfg)?;
        absorbed = tracker.is_complete();
    }
    while !absorbed && state.t < options.steps {
        let player = state.rng.gen_range(0..n);
        let br = best_response_set(spec, &state.cfg, player)?;
        let action = br.sample(&mut state.rng);
        let strict_here = br.is_singleton() && br.contains(state.cfg.out(player));
        let step = apply(&mut state, player, action)?;
        if let Some(e) = step.event {
            events.push(e);
            tracker.reset();
        } else if options.early_stop {
            tracker.quiet_steps += 1;
            if strict_here && !tracker.verified[player] {
                tracker.verified[player] = true;
                tracker.count += 1;
            } else if !strict_here {
                tracker.blocked = true;
            }
            if !tracker.blocked && tracker.quiet_steps >= n {
                tracker.sweep(spec, &state.cfg)?;
            }
            absorbed = tracker.is_complete();
        }
        if let Some(k) = options.potential_every {
            if state.t.is_multiple_of(k) {
                series.push((state.t, psi(spec, &state.cfg)?));
            }
        }
    }
    if options.potential_every.is_some() && series.last().map(|s| s.0) != Some(state.t) {
        series.push((state.t, psi(spec, &state.cfg)?));
    }
    Ok(Trace {
        metadata: TraceMetadata {
            rng: RNG_ALGORITHM,
            seed: options.seed,
            steps: options.steps,
            early_stop: options.early_stop,
            beta: spec.beta.to_string(),
            eta: spec.eta.iter().map(|e| e.to_string()).collect(),
            degrees: spec.degrees.0.clone(),
        },
        initial: init.clone(),
        events,
        final_configuration: state.cfg,
        steps_run: state.t,
        absorbed,
        potential_series: series,
    })
}

/// The noisy best-response chain on a whole configuration space.
#[derive(Debug, Clone)]
pub struct ExactChain {
    pub configurations: Vec<Configuration>,
    /// Sparse rows: `(target, probability)`, diagonal included.
    pub kernel: Vec<Vec<(usize, f64)>>,
    pub stationary: Vec<f64>,
    /// `Z^(-1/gamma)`, normalized.
    pub predicted: Vec<f64>,
}

impl ExactChain {
    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.kernel[x].iter().filter(|(w, _)| *w == y).map(|(_, p)| p).sum()
    }

    /// Largest `|stationary - predicted|`.
    pub fn stationary_error(&self) -> f64 {
        self.stationary
            .iter()
            .zip(&self.predicted)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|mu_x K(x,y) - mu_y K(y,x)|` with `mu` the computed stationary law.
    pub fn detailed_balance_error(&self) -> f64 {
        let mut worst = 0f64;
        for (x, row) in self.kernel.iter().enumerate() {
            for &(y, p) in row {
                let flow = self.stationary[x] * p - self.stationary[y] * self.entry(y, x);
                worst = worst.max(flow.abs());
            }
        }
        worst
    }
}

/// Builds the one-step kernel of the noisy dynamics over every
/// configuration, solves for its stationary law and compares it with the
/// law proportional to `Z^(-1/gamma)`.
pub fn exact_chain<S: Scalar>(spec: &GameSpec<S>, gamma: f64) -> Result<ExactChain> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidSpec(format!("noise level {gamma} must be positive")));
    }
    let space = ConfigurationSpace::new(&spec.degrees, EXACT_CHAIN_LIMIT)?;
    let configurations: Vec<Configuration> = space.iter().collect();
    let n = spec.n();
    let size = configurations.len();
    let mut kernel = Vec::with_capacity(size);
    let mut log_z = Vec::with_capacity(size);
    for cfg in &configurations {
        let mut row: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            let (actions, logs) = action_log_utilities(spec, cfg, i)?;
            let weights = log_linear_weights(&logs, gamma)?;
            for (a, w) in actions.into_iter().zip(weights) {
                let y = space
                    .index_of(&cfg.with_action(i, a)?)
                    .expect("deviation stays in the space");
                match row.iter_mut().find(|(t, _)| *t == y) {
                    Some(entry) => entry.1 += w / n as f64,
                    None => row.push((y, w / n as f64)),
                }
            }
        }
        row.sort_by_key(|e| e.0);
        kernel.push(row);
        log_z.push(potential(spec, cfg)?.log_z);
    }
    let stationary = stationary_law(&kernel)?;
    let scaled: Vec<f64> = log_z.iter().map(|l| -l / gamma).collect();
    let norm = log_sum_exp(&scaled);
    let predicted = scaled.iter().map(|s| (s - norm).exp()).collect();
    Ok(ExactChain {
        configurations,
        kernel,
        stationary,
        predicted,
    })
}

fn stationary_law(kernel: &[Vec<(usize, f64)>]) -> Result<Vec<f64>> {
    let size = kernel.len();
    if size <= DENSE_STATIONARY_LIMIT {
        // (K^T - I) mu = 0 with the last equation replaced by sum(mu) = 1
        let mut a = DenseMatrix::<f64>::zeros(size);
        for (x, row) in kernel.iter().enumerate() {
            for &(y, p) in row {
                a[(y, x)] += p;
            }
            a[(x, x)] -= 1.0;
        }
        for x in 0..size {
            a[(size - 1, x)] = 1.0;
        }
        let mut rhs = vec![0.0; size];
        rhs[size - 1] = 1.0;
        return a.solve(&rhs);
    }
    let mut mu = vec![1.0 / size as f64; size];
    for _ in 0..1_000_000 {
        let mut next = vec![0.0; size];
        for (x, row) in kernel.iter().enumerate() {
            // lazy chain: same stationary law, no periodicity
            next[x] += 0.5 * mu[x];
            for &(y, p) in row {
                next[y] += 0.5 * mu[x] * p;
            }
        }
        let change = next.iter().zip(&mu).map(|(a, b)| (a - b).abs()).sum::<f64>();
        mu = next;
        if change < 1e-15 {
            return Ok(mu);
        }
    }
    Err(Error::SolveFailure("stationary iteration did not converge".into()))
}
