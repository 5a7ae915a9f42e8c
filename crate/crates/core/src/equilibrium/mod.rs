//! Nash, strict and recursive equilibria.
//!
//! A configuration is recursive when every configuration reachable from it
//! along best-response moves can move back to it. That is checked by
//! exploring the reachable part of the best-response graph.

mod audit;
mod enumerate;
mod family;
mod table;

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use serde::Serialize;

use crate::centrality::GameSpec;
use crate::error::{Error, Result};
use crate::game::{best_response_set, BestResponseSet};
use crate::graph::Configuration;
use crate::scalar::Scalar;

pub use audit::{audit_conditions, ConditionCheck};
pub use enumerate::{
    enumerate_equilibria, potential_minimizers, Catalog, CatalogEntry, CatalogSummary, ConfigurationSpace,
};
pub use family::{classify_family, FamilyLabel};
pub use table::TableGame;

/// Default number of configurations explored before giving up.
pub const DEFAULT_EXPLORATION_BUDGET: usize = 200_000;
/// Default cap on the best-response moves listed for one configuration.
pub const DEFAULT_SUCCESSOR_CAP: usize = 100_000;
/// Default cap on the configuration space of an exhaustive enumeration.
pub const ENUMERATION_LIMIT: u128 = 100_000;

/// A finite game seen through its best-response correspondence.
pub trait FiniteGameView {
    type Action: Clone + PartialEq + std::fmt::Debug;
    type Profile: Clone + Eq + Hash;

    fn players(&self) -> usize;

    /// Number of actions available to `player`.
    fn action_count(&self, player: usize) -> u128;

    fn action_of(&self, profile: &Self::Profile, player: usize) -> Self::Action;

    /// Optimal actions of `player` against the others in `profile`;
    /// `BudgetExceeded` when there are more than `cap`.
    fn best_responses(&self, profile: &Self::Profile, player: usize, cap: usize) -> Result<Vec<Self::Action>>;

    /// Whether the current action of `player` is optimal, and whether it is
    /// the only optimal action.
    fn best_response_status(&self, profile: &Self::Profile, player: usize) -> Result<(bool, bool)> {
        let current = self.action_of(profile, player);
        let all = self.best_responses(profile, player, DEFAULT_SUCCESSOR_CAP)?;
        Ok((all.contains(&current), all.len() == 1))
    }

    /// One optimal action of `player`.
    fn some_best_response(&self, profile: &Self::Profile, player: usize) -> Result<Self::Action> {
        let all = self.best_responses(profile, player, usize::MAX)?;
        Ok(all.into_iter().next().expect("best-response sets are nonempty"))
    }

    fn deviate(&self, profile: &Self::Profile, player: usize, action: Self::Action) -> Result<Self::Profile>;
}

/// A player together with an action that strictly improves on its current one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation<A> {
    pub player: usize,
    pub action: A,
}

/// Outcome of a recursive-equilibrium check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecursiveVerdict {
    Yes,
    No,
    /// The exploration budget ran out after this many configurations.
    Inconclusive {
        explored: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport<A> {
    pub nash: bool,
    pub strict: bool,
    /// `None` when no recursive check was requested.
    pub recursive: Option<RecursiveVerdict>,
    pub witness: Option<Deviation<A>>,
    /// Configurations explored by the recursive check.
    pub reachable_count: Option<usize>,
}

/// Nash and strict status of a profile, with a witness on failure.
pub fn nash_status<G: FiniteGameView>(game: &G, profile: &G::Profile) -> Result<EquilibriumReport<G::Action>> {
    let mut strict = true;
    for i in 0..game.players() {
        let (optimal, unique) = game.best_response_status(profile, i)?;
        if !optimal {
            let action = game.some_best_response(profile, i)?;
            let witness = Some(Deviation { player: i, action });
            return Ok(EquilibriumReport {
                nash: false,
                strict: false,
                recursive: None,
                witness,
                reachable_count: None,
            });
        }
        strict &= unique;
    }
    Ok(EquilibriumReport {
        nash: true,
        strict,
        recursive: None,
        witness: None,
        reachable_count: None,
    })
}

/// Profiles one best-response move away (excluding the profile itself).
pub fn successors<G: FiniteGameView>(game: &G, profile: &G::Profile, cap: usize) -> Result<Vec<G::Profile>> {
    let mut out = Vec::new();
    for i in 0..game.players() {
        let current = game.action_of(profile, i);
        for a in game.best_responses(profile, i, cap)? {
            if a != current {
                if out.len() == cap {
                    return Err(Error::BudgetExceeded { cap });
                }
                out.push(game.deviate(profile, i, a)?);
            }
        }
    }
    Ok(out)
}

/// Explores the best-response graph forward from `start` and decides
/// whether `start` lies in a closed strongly connected class.
///
/// Returns the verdict and the number of configurations explored.
pub fn explore_recursive<G: FiniteGameView>(
    game: &G,
    start: &G::Profile,
    budget: usize,
    successor_cap: usize,
) -> Result<(RecursiveVerdict, usize)> {
    let mut index: HashMap<G::Profile, usize> = HashMap::from([(start.clone(), 0)]);
    let mut profiles = vec![start.clone()];
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let next = match successors(game, &profiles[v], successor_cap) {
            Ok(next) => next,
            Err(Error::BudgetExceeded { .. }) => {
                return Ok((
                    RecursiveVerdict::Inconclusive {
                        explored: profiles.len(),
                    },
                    profiles.len(),
                ))
            }
            Err(e) => return Err(e),
        };
        // a dead end other than the start can never lead back
        if next.is_empty() && v != 0 {
            return Ok((RecursiveVerdict::No, profiles.len()));
        }
        for y in next {
            let w = match index.get(&y) {
                Some(&w) => w,
                None => {
                    if profiles.len() >= budget {
                        return Ok((
                            RecursiveVerdict::Inconclusive {
                                explored: profiles.len(),
                            },
                            profiles.len(),
                        ));
                    }
                    let w = profiles.len();
                    index.insert(y.clone(), w);
                    profiles.push(y);
                    reverse.push(Vec::new());
                    queue.push_back(w);
                    w
                }
            };
            reverse[w].push(v);
        }
    }
    // the start is recursive iff it is reachable back from everything reached
    let mut back = vec![false; profiles.len()];
    back[0] = true;
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        for &u in &reverse[v] {
            if !back[u] {
                back[u] = true;
                stack.push(u);
            }
        }
    }
    let verdict = if back.iter().all(|&b| b) {
        RecursiveVerdict::Yes
    } else {
        RecursiveVerdict::No
    };
    Ok((verdict, profiles.len()))
}

/// Nash, strict and recursive status in one report.
pub fn full_report<G: FiniteGameView>(
    game: &G,
    profile: &G::Profile,
    budget: usize,
    successor_cap: usize,
) -> Result<EquilibriumReport<G::Action>> {
    let mut report = nash_status(game, profile)?;
    let (verdict, explored) = explore_recursive(game, profile, budget, successor_cap)?;
    report.recursive = Some(verdict);
    report.reachable_count = Some(explored);
    Ok(report)
}

/// The centrality game over configurations.
#[derive(Debug, Clone, Copy)]
pub struct CentralityGame<'a, S> {
    pub spec: &'a GameSpec<S>,
}

impl<'a, S: Scalar> CentralityGame<'a, S> {
    pub fn new(spec: &'a GameSpec<S>) -> Self {
        CentralityGame { spec }
    }

    pub fn best_response_set(&self, cfg: &Configuration, player: usize) -> Result<BestResponseSet<S>> {
        best_response_set(self.spec, cfg, player)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k.min(n)).fold(1u128, |acc, t| acc.saturating_mul((n - t) as u128) / (t as u128 + 1))
}

impl<S: Scalar> FiniteGameView for CentralityGame<'_, S> {
    type Action = Vec<usize>;
    type Profile = Configuration;

    fn players(&self) -> usize {
        self.spec.n()
    }

    fn action_count(&self, player: usize) -> u128 {
        binomial(self.spec.n() - 1, self.spec.degrees[player])
    }

    fn action_of(&self, profile: &Configuration, player: usize) -> Vec<usize> {
        profile.out(player).to_vec()
    }

    fn best_responses(&self, profile: &Configuration, player: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
        self.best_response_set(profile, player)?.actions(cap)
    }

    fn best_response_status(&self, profile: &Configuration, player: usize) -> Result<(bool, bool)> {
        let br = self.best_response_set(profile, player)?;
        Ok((br.contains(profile.out(player)), br.is_singleton()))
    }

    fn some_best_response(&self, profile: &Configuration, player: usize) -> Result<Vec<usize>> {
        let br = self.best_response_set(profile, player)?;
        let first = br.iter().next().expect("best-response sets are nonempty");
        Ok(first)
    }

    fn deviate(&self, profile: &Configuration, player: usize, action: Vec<usize>) -> Result<Configuration> {
        profile.with_action(player, action)
    }
}

/// Nash and strict status of a configuration.
pub fn is_nash<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration) -> Result<EquilibriumReport<Vec<usize>>> {
    spec.check(cfg)?;
    nash_status(&CentralityGame::new(spec), cfg)
}

/// Configurations one best-response move away from `cfg`.
pub fn br_successors<S: Scalar>(spec: &GameSpec<S>, cfg: &Configuration, cap: usize) -> Result<Vec<Configuration>> {
    spec.check(cfg)?;
    successors(&CentralityGame::new(spec), cfg, cap)
}

/// Nash, strict and recursive status, exploring at most `budget` configurations.
pub fn is_recursive<S: Scalar>(
    spec: &GameSpec<S>,
    cfg: &Configuration,
    budget: usize,
) -> Result<EquilibriumReport<Vec<usize>>> {
    spec.check(cfg)?;
    full_report(&CentralityGame::new(spec), cfg, budget, DEFAULT_SUCCESSOR_CAP)
}
