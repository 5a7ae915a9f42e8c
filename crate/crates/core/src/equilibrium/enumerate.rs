use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{classify_family, FamilyLabel};
use crate::centrality::GameSpec;
use crate::error::{Error, Result};
use crate::game::{best_response_set, potential, Combinations};
use crate::graph::{strongly_connected_components, Configuration, OutDegreeProfile};
use crate::scalar::Scalar;

/// Every configuration of a degree profile, indexed in lexicographic order
/// of the adjacency lists (player 0 most significant).
#[derive(Debug, Clone)]
pub struct ConfigurationSpace {
    actions: Vec<Vec<Vec<usize>>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
    strides: Vec<usize>,
    size: usize,
}

fn space_size(degrees: &OutDegreeProfile) -> u128 {
    let n = degrees.len();
    degrees.0.iter().fold(1u128, |acc, &d| {
        let choices = (0..d).fold(1u128, |c, t| c.saturating_mul((n - 1 - t) as u128) / (t as u128 + 1));
        acc.saturating_mul(choices)
    })
}

impl ConfigurationSpace {
    pub fn new(degrees: &OutDegreeProfile, limit: u128) -> Result<Self> {
        degrees.validate()?;
        let size = space_size(degrees);
        if size > limit {
            return Err(Error::SpaceTooLarge { size, limit });
        }
        let n = degrees.len();
        let actions: Vec<Vec<Vec<usize>>> = (0..n)
            .map(|i| {
                let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                Combinations::new(n - 1, degrees[i])
                    .map(|c| c.iter().map(|&k| others[k]).collect())
                    .collect()
            })
            .collect();
        let lookup = actions
            .iter()
            .map(|list| list.iter().cloned().enumerate().map(|(k, a)| (a, k)).collect())
            .collect();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * actions[i + 1].len();
        }
        Ok(ConfigurationSpace {
            actions,
            lookup,
            strides,
            size: size as usize,
        })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn configuration(&self, mut index: usize) -> Configuration {
        let n = self.actions.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.actions[i][index / self.strides[i]].clone());
            index %= self.strides[i];
        }
        Configuration::new(n, out).expect("enumerated configurations are valid")
    }

    pub fn index_of(&self, cfg: &Configuration) -> Option<usize> {
        (0..self.actions.len()).try_fold(0, |acc, i| {
            Some(acc + self.lookup[i].get(cfg.out(i))? * self.strides[i])
        })
    }

    fn action_index(&self, player: usize, action: &[usize]) -> usize {
        self.lookup[player][action]
    }

    pub fn iter(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.size).map(|k| self.configuration(k))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub index: usize,
    pub configuration: Configuration,
    pub nash: bool,
    pub strict: bool,
    pub recursive: bool,
    #[serde(serialize_with = "as_text")]
    pub family: FamilyLabel,
}

fn as_text<S: serde::Serializer>(label: &FamilyLabel, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(label)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CatalogSummary {
    pub configurations: usize,
    pub nash: usize,
    pub strict: usize,
    pub recursive: usize,
    /// Family counts among Nash equilibria.
    pub nash_families: BTreeMap<String, usize>,
}

/// Exhaustive equilibrium verdicts over a configuration space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    pub summary: CatalogSummary,
}

impl Catalog {
    /// One JSON record per configuration.
    pub fn write_json_lines<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.entries {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn filter<'a>(
        &'a self,
        pred: impl Fn(&CatalogEntry) -> bool + 'a,
    ) -> impl Iterator<Item = &'a CatalogEntry> + 'a {
        self.entries.iter().filter(move |e| pred(e))
    }
}

struct Verdicts {
    nash: bool,
    strict: bool,
    successors: Vec<usize>,
}

/// Builds the full best-response graph of the game and certifies every
/// configuration. A configuration is recursive exactly when its strongly
/// connected class has no outgoing move.
pub fn enumerate_equilibria<S: Scalar>(spec: &GameSpec<S>, limit: u128) -> Result<Catalog> {
    let space = ConfigurationSpace::new(&spec.degrees, limit)?;
    let n = spec.n();
    let verdicts: Vec<Verdicts> = (0..space.len())
        .into_par_iter()
        .map(|idx| {
            let cfg = space.configuration(idx);
            let mut v = Verdicts {
                nash: true,
                strict: true,
                successors: Vec::new(),
            };
            for i in 0..n {
                let br = best_response_set(spec, &cfg, i)?;
                let current = space.action_index(i, cfg.out(i));
                let plays = br.contains(cfg.out(i));
                v.nash &= plays;
                v.strict &= plays && br.is_singleton();
                for a in br.iter() {
                    let k = space.action_index(i, &a);
                    if k != current {
                        v.successors
                            .push(idx - current * space.strides[i] + k * space.strides[i]);
                    }
                }
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;

    let adjacency: Vec<Vec<usize>> = verdicts.iter().map(|v| v.successors.clone()).collect();
    let mut recursive = vec![false; space.len()];
    let components = strongly_connected_components(&adjacency);
    let mut component_of = vec![0; space.len()];
    for (c, members) in components.iter().enumerate() {
        for &v in members {
            component_of[v] = c;
        }
    }
    for (c, members) in components.iter().enumerate() {
        let closed = members
            .iter()
            .all(|&v| adjacency[v].iter().all(|&w| component_of[w] == c));
        if closed {
            for &v in members {
                recursive[v] = true;
            }
        }
    }

    let mut summary = CatalogSummary {
        configurations: space.len(),
        ..Default::default()
    };
    let entries: Vec<CatalogEntry> = verdicts
        .into_iter()
        .enumerate()
        .map(|(index, v)| {
            let configuration = space.configuration(index);
            let family = classify_family(&configuration);
            summary.nash += v.nash as usize;
            summary.strict += v.strict as usize;
            summary.recursive += recursive[index] as usize;
            if v.nash {
                *summary.nash_families.entry(family.to_string()).or_default() += 1;
            }
            CatalogEntry {
                index,
                configuration,
                nash: v.nash,
                strict: v.strict,
                recursive: recursive[index],
                family,
            }
        })
        .collect();
    Ok(Catalog { entries, summary })
}

/// All configurations with the smallest tree-sum total `Z`, i.e. the
/// maximizers of the potential. Float backends group values within the
/// spec's tie tolerance.
pub fn potential_minimizers<S: Scalar>(spec: &GameSpec<S>, limit: u128) -> Result<Vec<Configuration>> {
    let space = ConfigurationSpace::new(&spec.degrees, limit)?;
    let totals: Vec<S> = (0..space.len())
        .into_par_iter()
        .map(|idx| Ok(potential(spec, &space.configuration(idx))?.z))
        .collect::<Result<_>>()?;
    let best = totals.iter().fold(None::<&S>, |acc, z| match acc {
        Some(b) if b <= z => Some(b),
        _ => Some(z),
    });
    let Some(best) = best else { return Ok(Vec::new()) };
    Ok(totals
        .iter()
        .enumerate()
        .filter(|(_, z)| z.ties(best, spec.tie_tolerance))
        .map(|(k, _)| space.configuration(k))
        .collect())
}
