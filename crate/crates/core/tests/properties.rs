use std::collections::BTreeSet;

use centrality_forge::centrality::pagerank_series;
use centrality_forge::dynamics::{run_br, RunOptions};
use centrality_forge::experiment::random_configuration_with;
use centrality_forge::game::{best_response_set, potential, tree_sum, utility, TreeSumMethod};
use centrality_forge::graph::{max_in_reach, structural_metrics, teleport_exponent, ComponentRole, Condensation};
use centrality_forge::{
    hitting_times, kac_utility, pagerank, Configuration, GameSpec, OutDegreeProfile, Rational, Scalar,
};
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(a: i64, b: i64) -> Rational {
    Rational::frac(a, b)
}

/// Random configuration with `2..=max_n` nodes and degrees below `max_d`.
fn config(max_n: usize, max_d: usize) -> impl Strategy<Value = Configuration> {
    (2..=max_n, any::<u64>()).prop_map(move |(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degrees = OutDegreeProfile((0..n).map(|_| rng.gen_range(1..n.min(max_d + 1).max(2))).collect());
        random_configuration_with(&degrees, &mut rng).unwrap()
    })
}

fn rational_beta() -> impl Strategy<Value = Rational> {
    (1i64..10).prop_map(|k| q(k, 10))
}

fn random_eta<R: Rng>(n: usize, rng: &mut R) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..10)).collect();
    let total: i64 = raw.iter().sum();
    raw.iter().map(|&r| q(r, total)).collect()
}

fn all_actions(n: usize, i: usize, d: usize) -> Vec<Vec<usize>> {
    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    (0u32..(1 << others.len()))
        .filter(|m| m.count_ones() as usize == d)
        .map(|m| {
            others
                .iter()
                .enumerate()
                .filter(|(k, _)| m >> k & 1 == 1)
                .map(|(_, &j)| j)
                .collect()
        })
        .collect()
}

fn naive_reach(cfg: &Configuration, i: usize) -> BTreeSet<usize> {
    let n = cfg.n();
    let mut reach = vec![vec![false; n]; n];
    for (j, row) in reach.iter_mut().enumerate() {
        row[j] = true;
        for &k in cfg.out(j) {
            row[k] = true;
        }
    }
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                if reach[a][k] && reach[k][b] {
                    reach[a][b] = true;
                }
            }
        }
    }
    (0..n).filter(|&j| reach[j][i]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn in_reach_grows_and_stabilizes(cfg in config(12, 4)) {
        for i in 0..cfg.n() {
            let full = cfg.in_reach(i, None);
            let mut previous = Vec::new();
            for l in 0..=cfg.n() {
                let ball = cfg.in_reach(i, Some(l));
                prop_assert!(ball.contains(&i));
                prop_assert!(previous.iter().all(|v| ball.contains(v)));
                previous = ball;
            }
            prop_assert_eq!(&previous, &full);
            prop_assert_eq!(full.into_iter().collect::<BTreeSet<_>>(), naive_reach(&cfg, i));
        }
    }

    #[test]
    fn condensation_partitions_nodes(cfg in config(20, 5)) {
        let cond = Condensation::of(&cfg);
        let mut seen = vec![0; cfg.n()];
        for (c, members) in cond.components.iter().enumerate() {
            for &v in members {
                seen[v] += 1;
                prop_assert_eq!(cond.component_of[v], c);
            }
            let leaves = members.iter().any(|&v| cfg.out(v).iter().any(|&w| cond.component_of[w] != c));
            let enters = (0..cfg.n()).any(|u| cond.component_of[u] != c && cfg.out(u).iter().any(|&w| cond.component_of[w] == c));
            let expected = match (leaves, enters) {
                (false, _) => ComponentRole::Sink,
                (true, false) => ComponentRole::Source,
                (true, true) => ComponentRole::Internal,
            };
            prop_assert_eq!(cond.roles[c], expected);
        }
        prop_assert!(seen.iter().all(|&s| s == 1));
    }

    #[test]
    fn metrics_match_naive_recount(cfg in config(30, 5)) {
        let n = cfg.n();
        let m = structural_metrics(&cfg);
        let mut c2 = 0;
        let mut c3 = 0;
        for a in 0..n {
            for b in 0..n {
                if a < b && cfg.has_link(a, b) && cfg.has_link(b, a) {
                    c2 += 1;
                }
                for c in 0..n {
                    // each directed 3-cycle once: smallest node first
                    if a < b && a < c && b != c && cfg.has_link(a, b) && cfg.has_link(b, c) && cfg.has_link(c, a) {
                        c3 += 1;
                    }
                }
            }
        }
        let reach: Vec<BTreeSet<usize>> = (0..n).map(|i| naive_reach(&cfg, i)).collect();
        let classes: BTreeSet<BTreeSet<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| reach[i].contains(&j) && reach[j].contains(&i)).collect())
            .collect();
        prop_assert_eq!(m.c2, c2);
        prop_assert_eq!(m.c3, c3);
        prop_assert_eq!(m.m, reach.iter().map(|r| r.len()).max().unwrap());
        prop_assert_eq!(m.c, classes.len());
    }

    #[test]
    fn pagerank_matches_return_time_identity(cfg in config(20, 5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..cfg.n()).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let spec = GameSpec::new(rng.gen_range(0.05..0.95), raw.iter().map(|r| r / total).collect(), cfg.degrees()).unwrap();
        let pi = pagerank(&spec, &cfg).unwrap().pi;
        for (i, p) in pi.iter().enumerate() {
            prop_assert!((kac_utility(&spec, &cfg, i).unwrap() - p).abs() <= 1e-9);
        }
    }

    #[test]
    fn hitting_time_order_ignores_eta(cfg in config(6, 3), beta in rational_beta(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = rng.gen_range(0..cfg.n());
        let order = |eta: Vec<Rational>| {
            let spec = GameSpec::new(beta.clone(), eta, cfg.degrees()).unwrap();
            let t = hitting_times(&spec, &cfg, target, false).unwrap().values;
            let mut pairs = Vec::new();
            for a in 0..t.len() {
                for b in 0..t.len() {
                    pairs.push(t[a].partial_cmp(&t[b]).unwrap());
                }
            }
            pairs
        };
        let reference = order(random_eta(cfg.n(), &mut rng));
        for _ in 0..10 {
            prop_assert_eq!(&order(random_eta(cfg.n(), &mut rng)), &reference);
        }
    }

    #[test]
    fn unreachable_nodes_share_the_plateau(cfg in config(8, 3), beta in rational_beta()) {
        let spec = GameSpec::uniform(beta.clone(), cfg.degrees()).unwrap();
        let plateau = Rational::from_count(1) / (Rational::from_count(1) - beta);
        for i in 0..cfg.n() {
            let reach = cfg.in_reach_mask(i, None);
            let t = hitting_times(&spec, &cfg, i, true).unwrap().values;
            for j in 0..cfg.n() {
                if reach[j] {
                    prop_assert!(t[j] < plateau);
                } else {
                    prop_assert_eq!(&t[j], &plateau);
                }
            }
        }
    }

    #[test]
    fn every_path_crosses_a_closer_node(cfg in config(8, 3), beta in rational_beta()) {
        let spec = GameSpec::uniform(beta, cfg.degrees()).unwrap();
        for i in 0..cfg.n() {
            let t = hitting_times(&spec, &cfg, i, true).unwrap().values;
            // nodes exactly `h` hops from `i` separate everything farther away
            let dist = |l| cfg.in_reach_mask(i, Some(l));
            for h in 1..cfg.n() {
                let (inner, outer) = (dist(h - 1), dist(h));
                let cut: Vec<usize> = (0..cfg.n()).filter(|&j| outer[j] && !inner[j]).collect();
                if cut.is_empty() {
                    break;
                }
                let best = cut.iter().map(|&j| t[j].clone()).fold(None, |m: Option<Rational>, v| match m {
                    Some(m) if m <= v => Some(m),
                    _ => Some(v),
                }).unwrap();
                for k in cfg.in_reach(i, None) {
                    if !outer[k] {
                        prop_assert!(t[k] > best);
                    }
                }
            }
        }
    }

    #[test]
    fn twins_have_equal_hitting_times(cfg in config(7, 3), beta in rational_beta(), seed in any::<u64>()) {
        prop_assume!(cfg.n() >= 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = rng.gen_range(0..cfg.n());
        let j = (h + rng.gen_range(1..cfg.n())) % cfg.n();
        // give h the links of j, with j standing in for h itself
        let twin: Vec<usize> = cfg.out(j).iter().map(|&k| if k == h { j } else { k }).collect();
        let cfg = cfg.with_action(h, twin).unwrap();
        let spec = GameSpec::uniform(beta, cfg.degrees()).unwrap();
        for i in (0..cfg.n()).filter(|&i| i != h && i != j) {
            let t = hitting_times(&spec, &cfg, i, true).unwrap().values;
            prop_assert_eq!(&t[h], &t[j]);
        }
    }

    #[test]
    fn truncated_series_is_within_tail_bound(cfg in config(15, 4), terms in 1usize..40) {
        let beta = 0.8;
        let spec = GameSpec::uniform(beta, cfg.degrees()).unwrap();
        let exact = pagerank(&spec, &cfg).unwrap().pi;
        let partial = pagerank_series(&spec, &cfg, terms).unwrap();
        let bound = beta.powi(terms as i32) / (1.0 - beta);
        for (a, b) in exact.iter().zip(&partial) {
            prop_assert!((a - b).abs() <= bound + 1e-12);
        }
    }

    #[test]
    fn tree_sum_ignores_own_links(cfg in config(4, 2), beta in rational_beta()) {
        let spec = GameSpec::uniform(beta, cfg.degrees()).unwrap();
        for i in 0..cfg.n() {
            let base = tree_sum(&spec, &cfg, i, TreeSumMethod::Enumerate).unwrap();
            for a in all_actions(cfg.n(), i, cfg.degree(i)) {
                let other = cfg.with_action(i, a).unwrap();
                prop_assert_eq!(&tree_sum(&spec, &other, i, TreeSumMethod::Enumerate).unwrap(), &base);
            }
        }
    }

    #[test]
    fn minor_and_enumeration_agree(cfg in config(5, 3), beta in rational_beta()) {
        let spec = GameSpec::uniform(beta, cfg.degrees()).unwrap();
        for i in 0..cfg.n() {
            prop_assert_eq!(
                tree_sum(&spec, &cfg, i, TreeSumMethod::Enumerate).unwrap(),
                tree_sum(&spec, &cfg, i, TreeSumMethod::Minor).unwrap()
            );
        }
    }

    #[test]
    fn best_responses_are_exactly_the_maximizers(cfg in config(6, 3), beta in rational_beta()) {
        let spec = GameSpec::uniform(beta, cfg.degrees()).unwrap();
        for i in 0..cfg.n() {
            let br = best_response_set(&spec, &cfg, i).unwrap();
            let scored: Vec<(Vec<usize>, Rational)> = all_actions(cfg.n(), i, cfg.degree(i))
                .into_iter()
                .map(|a| { let u = utility(&spec, &cfg.with_action(i, a.clone()).unwrap(), i).unwrap(); (a, u) })
                .collect();
            let top = scored.iter().map(|(_, u)| u.clone()).max().unwrap();
            let best: BTreeSet<Vec<usize>> = scored.into_iter().filter(|(_, u)| *u == top).map(|(a, _)| a).collect();
            prop_assert_eq!(br.iter().collect::<BTreeSet<_>>(), best);
        }
    }

    #[test]
    fn best_responses_stay_local(cfg in config(10, 4)) {
        let spec = GameSpec::uniform(0.6, cfg.degrees()).unwrap();
        for i in 0..cfg.n() {
            let d = cfg.degree(i);
            if cfg.in_reach(i, None).len() > d {
                let ball = cfg.in_reach_mask(i, Some(d));
                for a in best_response_set(&spec, &cfg, i).unwrap().actions(10_000).unwrap() {
                    prop_assert!(a.iter().all(|&j| j != i && ball[j]));
                }
            }
        }
    }

    #[test]
    fn potential_tracks_utility_changes(cfg in config(5, 3), beta in rational_beta(), seed in any::<u64>()) {
        let spec = GameSpec::uniform(beta, cfg.degrees()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = rng.gen_range(0..cfg.n());
        let z = potential(&spec, &cfg).unwrap().z;
        let u = utility(&spec, &cfg, i).unwrap();
        for a in all_actions(cfg.n(), i, cfg.degree(i)) {
            let other = cfg.with_action(i, a).unwrap();
            let z2 = potential(&spec, &other).unwrap().z;
            let u2 = utility(&spec, &other, i).unwrap();
            prop_assert_eq!((u2.clone() - u.clone()).signum(), (z.clone() - z2.clone()).signum());
            prop_assert_eq!(u2 * z2, u.clone() * z.clone());
        }
    }

    #[test]
    fn potential_order_follows_teleport_exponent(cfg in config(8, 3)) {
        let e = teleport_exponent(&cfg);
        if Condensation::of(&cfg).count(ComponentRole::Sink) == 1 {
            prop_assert_eq!(e, cfg.n() - max_in_reach(&cfg));
        }
        let values: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|&b| potential(&GameSpec::uniform(b, cfg.degrees()).unwrap(), &cfg).unwrap().log_z - e as f64 * (1.0 - b).ln())
            .collect();
        let spread = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
        prop_assert!(spread < 10f64.ln(), "spread {spread}");
    }

    #[test]
    fn runs_are_deterministic(cfg in config(10, 3), seed in any::<u64>()) {
        let spec = GameSpec::uniform(0.7, cfg.degrees()).unwrap();
        let a = run_br(&spec, &cfg, RunOptions::new(300, seed)).unwrap();
        let b = run_br(&spec, &cfg, RunOptions::new(300, seed)).unwrap();
        prop_assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        prop_assert_eq!(a.replay().unwrap(), a.final_configuration);
    }

    #[test]
    fn potential_never_drops_along_runs(cfg in config(7, 3), seed in any::<u64>()) {
        let spec = GameSpec::uniform(q(3, 4), cfg.degrees()).unwrap();
        let trace = run_br(&spec, &cfg, RunOptions::new(200, seed)).unwrap();
        let mut current = cfg.clone();
        let mut z = potential(&spec, &current).unwrap().z;
        for e in &trace.events {
            current = current.with_action(e.player, e.new.clone()).unwrap();
            let next = potential(&spec, &current).unwrap().z;
            prop_assert!(next <= z);
            z = next;
        }
    }

    #[test]
    fn configuration_json_round_trips(cfg in config(12, 4)) {
        prop_assert_eq!(Configuration::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}
