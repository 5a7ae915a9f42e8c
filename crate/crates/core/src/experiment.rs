//! Random instances and parameter sweeps of the best-response dynamics.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::centrality::GameSpec;
use crate::dynamics::{run_br, RunOptions};
use crate::error::{Error, Result};
use crate::graph::{structural_metrics, Configuration, OutDegreeProfile};

/// Environment variable overriding the sweep worker count.
pub const WORKERS_ENV: &str = "CENTRALITY_FORGE_WORKERS";

/// Every player links to a uniform `d_i`-subset of the other nodes.
pub fn random_configuration_with<R: Rng + ?Sized>(profile: &OutDegreeProfile, rng: &mut R) -> Result<Configuration> {
    profile.validate()?;
    let n = profile.len();
    let out = (0..n)
        .map(|i| {
            rand::seq::index::sample(rng, n - 1, profile[i])
                .into_iter()
                .map(|k| if k >= i { k + 1 } else { k })
                .collect()
        })
        .collect();
    Configuration::new(n, out)
}

pub fn random_configuration(n: usize, profile: &OutDegreeProfile, seed: u64) -> Result<Configuration> {
    if profile.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "profile has {} entries for {n} nodes",
            profile.len()
        )));
    }
    random_configuration_with(profile, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `P(d) = d^-alpha / sum_{k=1}^{n-1} k^-alpha` for `d = 1..n-1`.
pub fn powerlaw_pmf(n: usize, alpha: f64) -> Result<Vec<f64>> {
    if alpha.is_nan() || alpha <= 0.0 || n < 2 {
        return Err(Error::InvalidSpec(format!(
            "power law needs alpha > 0 and n >= 2 (alpha = {alpha}, n = {n})"
        )));
    }
    let logs: Vec<f64> = (1..n).map(|k| -alpha * (k as f64).ln()).collect();
    let norm = crate::game::log_sum_exp(&logs);
    Ok(logs.iter().map(|l| (l - norm).exp()).collect())
}

/// Independent out-degrees drawn from the truncated power law by inverse CDF.
pub fn sample_powerlaw_profile_with<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> Result<OutDegreeProfile> {
    let pmf = powerlaw_pmf(n, alpha)?;
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for p in &pmf {
        acc += p;
        cdf.push(acc);
    }
    let degrees = (0..n)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * acc;
            cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1) + 1
        })
        .collect();
    Ok(OutDegreeProfile(degrees))
}

pub fn sample_powerlaw_profile(n: usize, alpha: f64, seed: u64) -> Result<OutDegreeProfile> {
    sample_powerlaw_profile_with(n, alpha, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// How out-degrees are chosen in a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeSpec {
    Homogeneous(usize),
    PowerLaw(f64),
    /// Degrees listed in a file (JSON array or whitespace separated).
    File(PathBuf),
}

impl fmt::Display for DegreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeSpec::Homogeneous(d) => write!(f, "homogeneous:{d}"),
            DegreeSpec::PowerLaw(a) => write!(f, "powerlaw:{a}"),
            DegreeSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl std::str::FromStr for DegreeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("degree spec `{s}`: expected kind:value")))?;
        let bad = || Error::Parse(format!("degree spec `{s}`: bad value"));
        match kind {
            "homogeneous" | "d" => Ok(DegreeSpec::Homogeneous(value.parse().map_err(|_| bad())?)),
            "powerlaw" | "alpha" => Ok(DegreeSpec::PowerLaw(value.parse().map_err(|_| bad())?)),
            "file" => Ok(DegreeSpec::File(PathBuf::from(value))),
            _ => Err(Error::Parse(format!("degree spec `{s}`: unknown kind `{kind}`"))),
        }
    }
}

/// Reads out-degrees from a JSON array or whitespace-separated text.
pub fn read_degree_file(path: &std::path::Path) -> Result<OutDegreeProfile> {
    let text = std::fs::read_to_string(path)?;
    let degrees: Vec<usize> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text)?
    } else {
        text.split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("degree `{t}` in {}", path.display())))
            })
            .collect::<Result<_>>()?
    };
    OutDegreeProfile::new(degrees)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_values: Vec<usize>,
    pub degree_spec: DegreeSpec,
    pub beta_grid: Vec<f64>,
    pub replicas: usize,
    pub steps: u64,
    pub master_seed: u64,
    pub early_stop: bool,
    /// Worker threads; `None` uses the environment override or all cores.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::InvalidSpec("replicas must be at least 1".into()));
        }
        if let Some(b) = self.beta_grid.iter().find(|b| !(**b > 0.0 && **b < 1.0)) {
            return Err(Error::InvalidSpec(format!("beta = {b} must lie in (0, 1)")));
        }
        if self.n_values.is_empty() || self.beta_grid.is_empty() {
            return Err(Error::InvalidSpec("sweep needs at least one n and one beta".into()));
        }
        Ok(())
    }
}

/// One finished run; field order matches the CSV columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub degree_spec: String,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub replica: usize,
    pub seed: u64,
    pub steps_run: u64,
    pub components: usize,
    /// `c (d+1) / n` for homogeneous degrees, `c / n` otherwise.
    #[serde(rename = "C_index")]
    pub c_index: f64,
    pub m_x: usize,
    pub strict_absorbed: bool,
    #[serde(skip)]
    pub final_configuration: Configuration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFailure {
    pub n: usize,
    pub beta: f64,
    pub replica: usize,
    pub message: String,
}

/// Mean and sample variance of the component index in one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStats {
    pub n: usize,
    pub degree_spec: String,
    pub beta: f64,
    pub count: usize,
    pub mean_index: f64,
    pub var_index: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<SweepFailure>,
    pub cells: Vec<CellStats>,
}

/// Pinned per-row seed: the first eight bytes of a SHA-256 digest.
pub fn row_seed(master: u64, n: usize, degree_spec: &DegreeSpec, beta: f64, replica: usize) -> u64 {
    let key = format!("{master}|{n}|{degree_spec}|{beta:?}|{replica}");
    let digest = Sha256::digest(key.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

fn run_row(spec: &SweepSpec, n: usize, beta: f64, replica: usize) -> Result<SweepRow> {
    let seed = row_seed(spec.master_seed, n, &spec.degree_spec, beta, replica);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (profile, alpha) = match &spec.degree_spec {
        DegreeSpec::Homogeneous(d) => (OutDegreeProfile::new(vec![*d; n])?, None),
        DegreeSpec::PowerLaw(a) => (sample_powerlaw_profile_with(n, *a, &mut rng)?, Some(*a)),
        DegreeSpec::File(path) => {
            let p = read_degree_file(path)?;
            if p.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{} lists {} degrees, sweep asks n = {n}",
                    path.display(),
                    p.len()
                )));
            }
            (p, None)
        }
    };
    let init = random_configuration_with(&profile, &mut rng)?;
    let game = GameSpec::uniform(beta, profile.clone())?;
    let options = RunOptions {
        steps: spec.steps,
        seed: rng.gen(),
        early_stop: spec.early_stop,
        potential_every: None,
    };
    let trace = run_br(&game, &init, options)?;
    let metrics = structural_metrics(&trace.final_configuration);
    let c_index = match spec.degree_spec {
        DegreeSpec::Homogeneous(d) => metrics.c as f64 * (d + 1) as f64 / n as f64,
        _ => metrics.c as f64 / n as f64,
    };
    Ok(SweepRow {
        n,
        degree_spec: spec.degree_spec.to_string(),
        alpha,
        beta,
        replica,
        seed,
        steps_run: trace.steps_run,
        components: metrics.c,
        c_index,
        m_x: metrics.m,
        strict_absorbed: trace.absorbed,
        final_configuration: trace.final_configuration,
    })
}

/// Worker count: explicit value, then the environment override, then all cores.
pub fn worker_count(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()))
        .filter(|&w| w > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Runs every `(n, beta, replica)` cell concurrently. `on_row` sees rows
/// as they finish (serialized by the caller); the outcome is sorted.
pub fn sweep_streaming(spec: &SweepSpec, on_row: impl Fn(&SweepRow) + Sync) -> Result<SweepOutcome> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for &n in &spec.n_values {
        for &beta in &spec.beta_grid {
            for replica in 0..spec.replicas {
                jobs.push((n, beta, replica));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(spec.workers))
        .build()
        .map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let results: Vec<(usize, f64, usize, Result<SweepRow>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, beta, replica)| {
                let row = run_row(spec, n, beta, replica);
                if let Ok(r) = &row {
                    on_row(r);
                }
                (n, beta, replica, row)
            })
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (n, beta, replica, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(SweepFailure {
                n,
                beta,
                replica,
                message: e.to_string(),
            }),
        }
    }
    rows.sort_by(|a, b| {
        (a.n, a.beta, a.replica)
            .partial_cmp(&(b.n, b.beta, b.replica))
            .expect("finite betas")
    });
    let cells = cell_stats(&rows);
    Ok(SweepOutcome { rows, failures, cells })
}

pub fn sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    sweep_streaming(spec, |_| {})
}

fn cell_stats(rows: &[SweepRow]) -> Vec<CellStats> {
    let mut groups: BTreeMap<(usize, String, u64), Vec<f64>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.n, r.degree_spec.clone(), r.beta.to_bits()))
            .or_default()
            .push(r.c_index);
    }
    let mut cells: Vec<CellStats> = groups
        .into_iter()
        .map(|((n, degree_spec, bits), values)| {
            let count = values.len();
            let mean = values.iter().sum::<f64>() / count as f64;
            let var = if count > 1 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64
            } else {
                0.0
            };
            CellStats {
                n,
                degree_spec,
                beta: f64::from_bits(bits),
                count,
                mean_index: mean,
                var_index: var,
            }
        })
        .collect();
    cells.sort_by(|a, b| (a.n, a.beta).partial_cmp(&(b.n, b.beta)).expect("finite betas"));
    cells
}

/// Writes rows with the columns
/// `n,degree_spec,alpha,beta,replica,seed,steps_run,components,C_index,m_x,strict_absorbed`.
pub fn write_rows_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Per-cell mean/variance table for plotting.
pub fn write_cells_csv<W: Write>(cells: &[CellStats], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in cells {
        w.serialize(c).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_nodes_always_pair_up() {
        let p = OutDegreeProfile::homogeneous(2, 1);
        for seed in 0..10 {
            assert_eq!(
                random_configuration(2, &p, seed).unwrap().adjacency(),
                &[vec![1], vec![0]]
            );
        }
    }

    #[test]
    fn random_configuration_is_reproducible() {
        let p = OutDegreeProfile::homogeneous(30, 4);
        assert_eq!(
            random_configuration(30, &p, 8).unwrap(),
            random_configuration(30, &p, 8).unwrap()
        );
        assert_ne!(
            random_configuration(30, &p, 8).unwrap(),
            random_configuration(30, &p, 9).unwrap()
        );
    }

    #[test]
    fn powerlaw_pmf_values() {
        let pmf = powerlaw_pmf(4, 3.0).unwrap();
        let expect = [216.0 / 251.0, 27.0 / 251.0, 8.0 / 251.0];
        for (a, b) in pmf.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = sample_powerlaw_profile(50, 400.0, 1).unwrap();
        assert!(p.0.iter().all(|&d| d == 1));
        assert!(powerlaw_pmf(4, 0.0).is_err());
    }

    #[test]
    fn degree_spec_round_trips() {
        for s in ["homogeneous:4", "powerlaw:2.5", "file:degrees.txt"] {
            assert_eq!(s.parse::<DegreeSpec>().unwrap().to_string(), s);
        }
        assert!("cube:3".parse::<DegreeSpec>().is_err());
    }

    #[test]
    fn seeds_are_stable() {
        let d = DegreeSpec::Homogeneous(2);
        assert_eq!(row_seed(1, 10, &d, 0.5, 0), row_seed(1, 10, &d, 0.5, 0));
        assert_ne!(row_seed(1, 10, &d, 0.5, 0), row_seed(1, 10, &d, 0.5, 1));
        assert_ne!(row_seed(1, 10, &d, 0.5, 0), row_seed(2, 10, &d, 0.5, 0));
    }

    #[test]
    fn small_sweep_writes_expected_columns() {
        let spec = SweepSpec {
            n_values: vec![8],
            degree_spec: DegreeSpec::Homogeneous(1),
            beta_grid: vec![0.5, 0.9],
            replicas: 2,
            steps: 2000,
            master_seed: 7,
            early_stop: true,
            workers: Some(2),
        };
        let out = sweep(&spec).unwrap();
        assert_eq!(out.rows.len(), 4);
        assert!(out.failures.is_empty());
        assert_eq!(out.cells.len(), 2);
        let mut buf = Vec::new();
        write_rows_csv(&out.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "n,degree_spec,alpha,beta,replica,seed,steps_run,components,C_index,m_x,strict_absorbed"
        );
        assert_eq!(out, sweep(&spec).unwrap());
    }
}
