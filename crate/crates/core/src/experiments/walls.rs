//! Replica pairs from boundary-condition strategies, tethered-wall counts
//! and translation averages over shifted windows.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{retry_ties, sample_instance, stream, trial_seed, Built, Setup};
use crate::couplings::{derive_seed, CouplingConfig};
use crate::error::{LabError, Result};
use crate::groundstate::{solve_ground_state, BoundaryCondition, SpinConfig, UniformMeasure};
use crate::interface::{count_tethered, decompose, interface};

/// How the two replicas of a pair are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcStrategy {
    /// Two independent draws from the uniform measure on the enumerated window
    /// ground states.
    Enumerated,
    /// Two independent uniformly random boundary conditions.
    Independent,
    /// A random boundary condition and the same one with its right half negated.
    Antipodal,
    /// A random boundary condition and its negation.
    FlipRelated,
}

impl fmt::Display for BcStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BcStrategy::Enumerated => "enumerated",
            BcStrategy::Independent => "independent",
            BcStrategy::Antipodal => "antipodal",
            BcStrategy::FlipRelated => "flip",
        })
    }
}

impl FromStr for BcStrategy {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumerated" => Ok(BcStrategy::Enumerated),
            "independent" => Ok(BcStrategy::Independent),
            "antipodal" => Ok(BcStrategy::Antipodal),
            "flip" | "flip_related" => Ok(BcStrategy::FlipRelated),
            _ => Err(LabError::Config(format!(
                "unknown pair strategy `{s}`; known: enumerated, independent, antipodal, flip"
            ))),
        }
    }
}

/// Two full ground-state configurations on the outer region for one
/// disorder draw. Degenerate disorder is resampled.
pub fn replica_pair(built: &Built, strategy: BcStrategy, seed: u64) -> Result<(CouplingConfig, SpinConfig, SpinConfig)> {
    if strategy == BcStrategy::Enumerated {
        let inst = sample_instance(built, seed)?;
        let (a, b) = UniformMeasure::new(&inst.gss)?.sample_replica_pair(derive_seed(inst.seed, stream::PAIR));
        let s = inst.gss.witness_config(&built.lattice, a)?;
        let t = inst.gss.witness_config(&built.lattice, b)?;
        return Ok((inst.j, s, t));
    }
    let l = &built.lattice;
    let boundary = l.external_boundary(&built.outer)?;
    retry_ties(seed, |s| {
        let j = CouplingConfig::sample(l, built.dist, s)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(s, stream::BC));
        let bc1: Vec<(usize, i8)> = boundary.iter().map(|&v| (v, if rng.random::<bool>() { 1 } else { -1 })).collect();
        let (lo, hi) = l.bounds();
        let bc2: Vec<(usize, i8)> = match strategy {
            BcStrategy::Independent => boundary.iter().map(|&v| (v, if rng.random::<bool>() { 1 } else { -1 })).collect(),
            BcStrategy::Antipodal => {
                bc1.iter().map(|&(v, x)| (v, if 2 * l.coord(v)[0] >= lo[0] + hi[0] { -x } else { x })).collect()
            }
            BcStrategy::FlipRelated => bc1.iter().map(|&(v, x)| (v, -x)).collect(),
            BcStrategy::Enumerated => unreachable!(),
        };
        let solve = |bc: Vec<(usize, i8)>| -> Result<SpinConfig> {
            let cond = if bc.is_empty() { BoundaryCondition::Free } else { BoundaryCondition::Fixed(bc) };
            Ok(solve_ground_state(l, &j, &built.outer, &cond)?.config)
        };
        let a = solve(bc1)?;
        let b = if strategy == BcStrategy::FlipRelated && boundary.is_empty() { a.flipped() } else { solve(bc2)? };
        Ok((j, a, b))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallRow {
    pub n: i64,
    pub k: i64,
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubadditivityCheck {
    pub k: i64,
    pub n: i64,
    pub m: i64,
    /// `Ê N_{n+m,k}`.
    pub lhs: f64,
    /// `Ê N_{n,k} + Ê N_{m,k}`.
    pub rhs: f64,
    /// Three combined standard errors.
    pub slack: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallTable {
    pub strategy: BcStrategy,
    pub rows: Vec<WallRow>,
    pub subadditivity: Vec<SubadditivityCheck>,
    /// Configurations where `N_{n,k}` decreased in `n`.
    pub monotone_violations: usize,
    pub passed: bool,
}

impl WallTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k,mean,stderr,trials\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.n, r.k, r.mean, r.stderr, r.trials));
        }
        out
    }

    pub fn row(&self, n: i64, k: i64) -> Option<&WallRow> {
        self.rows.iter().find(|r| r.n == n && r.k == k)
    }
}

/// Mean tethered-wall counts `N_{n,k}` with subadditivity checks over every
/// `n + m` in range.
pub fn wall_statistics(
    setup: &Setup,
    strategy: BcStrategy,
    ns: &[i64],
    ks: &[i64],
    trials: usize,
    seed: u64,
) -> Result<WallTable> {
    if trials < 2 {
        return Err(LabError::Config("wall statistics need at least 2 trials".into()));
    }
    if ns.iter().any(|&n| n < 1) {
        return Err(LabError::Config("segment half-widths must be positive".into()));
    }
    let built = setup.build()?;
    let dual = built.lattice.build_dual()?;
    let cells: Vec<(i64, i64)> = ks.iter().flat_map(|&k| ns.iter().map(move |&n| (n, k))).collect();
    // sizing check before spending any trials
    let empty = decompose(&built.lattice, &dual, &[])?;
    for &(n, k) in &cells {
        count_tethered(&built.lattice, &empty, n, k)?;
    }
    let counts: Vec<Vec<usize>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (_, s, u) = replica_pair(&built, strategy, trial_seed(seed, t))?;
            let dec = decompose(&built.lattice, &dual, &interface(&built.lattice, &s, &u)?)?;
            cells.iter().map(|&(n, k)| count_tethered(&built.lattice, &dec, n, k)).collect()
        })
        .collect::<Result<_>>()?;

    let mut sorted_ns = ns.to_vec();
    sorted_ns.sort_unstable();
    let mut monotone_violations = 0;
    for c in &counts {
        for &k in ks {
            let series: Vec<usize> = sorted_ns.iter().map(|&n| c[cells.iter().position(|x| *x == (n, k)).unwrap()]).collect();
            if series.windows(2).any(|w| w[1] < w[0]) {
                monotone_violations += 1;
            }
        }
    }
    let nt = trials as f64;
    let rows: Vec<WallRow> = cells
        .iter()
        .enumerate()
        .map(|(i, &(n, k))| {
            let mean = counts.iter().map(|c| c[i] as f64).sum::<f64>() / nt;
            let var = counts.iter().map(|c| (c[i] as f64 - mean).powi(2)).sum::<f64>() / (nt - 1.0);
            WallRow { n, k, mean, stderr: (var / nt).sqrt(), trials }
        })
        .collect();
    let find = |n: i64, k: i64| rows.iter().find(|r| r.n == n && r.k == k);
    let mut subadditivity = Vec::new();
    for &k in ks {
        for &n in &sorted_ns {
            for &m in sorted_ns.iter().filter(|&&m| m >= n) {
                let (Some(a), Some(b), Some(ab)) = (find(n, k), find(m, k), find(n + m, k)) else { continue };
                let slack = crate::tolerance::STAT_WIDTHS * (ab.stderr.powi(2) + a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
                let rhs = a.mean + b.mean;
                subadditivity.push(SubadditivityCheck { k, n, m, lhs: ab.mean, rhs, slack, passed: ab.mean <= rhs + slack });
            }
        }
    }
    let passed = monotone_violations == 0 && subadditivity.iter().all(|c| c.passed);
    Ok(WallTable { strategy, rows, subadditivity, monotone_violations, passed })
}

/// Per-configuration statistic for translation averages.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name", content = "value")]
pub enum Statistic {
    Constant(f64),
    /// Mean coupling over window edges.
    CouplingMean,
    /// Number of window edges in the interface of an enumerated pair.
    InterfaceSize,
    /// Number of window ground states.
    StateCount,
}

impl FromStr for Statistic {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "coupling_mean" => Statistic::CouplingMean,
            "interface_size" => Statistic::InterfaceSize,
            "state_count" => Statistic::StateCount,
            _ => match s.strip_prefix("constant:").map(str::parse::<f64>) {
                Some(Ok(c)) => Statistic::Constant(c),
                _ => {
                    return Err(LabError::Config(format!(
                        "unknown statistic `{s}`; known: constant:C, coupling_mean, interface_size, state_count"
                    )))
                }
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationSeries {
    pub statistic: Statistic,
    pub n: usize,
    pub trials: usize,
    /// Mean over trials of the statistic on the window moved up by `k`.
    pub series: Vec<f64>,
    /// `1/(n+1) Σ_k series[k]`.
    pub average: f64,
    /// Standard error of the average over trials.
    pub stderr: f64,
}

/// Averages a statistic over the windows moved up by `k = 0..=n` rows,
/// the finite analogue of averaging the measure over downward shifts.
pub fn translation_average(setup: &Setup, stat: Statistic, n: usize, trials: usize, seed: u64) -> Result<TranslationSeries> {
    if trials == 0 {
        return Err(LabError::Config("trials must be at least 1".into()));
    }
    let shifted: Vec<Built> = (0..=n as i64)
        .map(|k| {
            let s = Setup {
                outer: setup.outer.shifted_up(k)?,
                window: setup.window.shifted_up(k)?,
                ..setup.clone()
            };
            s.build().map_err(|e| match e {
                LabError::Sizing(m) => LabError::Sizing(format!("shift {k}: {m}")),
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed_t = trial_seed(seed, t);
            shifted.iter().map(|b| evaluate(b, stat, seed_t)).collect()
        })
        .collect::<Result<_>>()?;
    let nt = trials as f64;
    let series: Vec<f64> = (0..=n).map(|k| per_trial.iter().map(|v| v[k]).sum::<f64>() / nt).collect();
    let averages: Vec<f64> = per_trial.iter().map(|v| v.iter().sum::<f64>() / (n + 1) as f64).collect();
    let average = series.iter().sum::<f64>() / (n + 1) as f64;
    let stderr = if trials > 1 {
        (averages.iter().map(|a| (a - average).powi(2)).sum::<f64>() / (nt - 1.0) / nt).sqrt()
    } else {
        0.0
    };
    Ok(TranslationSeries { statistic: stat, n, trials, series, average, stderr })
}

fn evaluate(built: &Built, stat: Statistic, seed: u64) -> Result<f64> {
    Ok(match stat {
        Statistic::Constant(c) => c,
        Statistic::CouplingMean => {
            if built.window_edges.is_empty() {
                return Err(LabError::Config("the window contains no edge".into()));
            }
            let j = CouplingConfig::sample(&built.lattice, built.dist, seed)?;
            built.window_edges.iter().map(|&e| j.get(e)).sum::<f64>() / built.window_edges.len() as f64
        }
        Statistic::InterfaceSize => {
            let (_, s, t) = replica_pair(built, BcStrategy::Enumerated, seed)?;
            built.window_edges.iter().filter(|&&e| s.bond(&built.lattice, e) != t.bond(&built.lattice, e)).count() as f64
        }
        Statistic::StateCount => sample_instance(built, seed)?.gss.count as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::RegionSpec;
    use crate::lattice::LatticeSpec;

    fn strip() -> Setup {
        Setup::new(LatticeSpec::halfplane_strip(8, 6), RegionSpec::Bulk, RegionSpec::Bulk)
    }

    #[test]
    fn flip_related_pairs_have_no_walls() {
        let t = wall_statistics(&strip(), BcStrategy::FlipRelated, &[1, 2, 3], &[0, 1], 20, 4).unwrap();
        assert!(t.rows.iter().all(|r| r.mean == 0.0));
        assert!(t.passed);
    }

    #[test]
    fn counts_grow_with_segment() {
        let t = wall_statistics(&strip(), BcStrategy::Independent, &[1, 2, 3], &[0, 1], 60, 5).unwrap();
        assert_eq!(t.monotone_violations, 0);
        for k in [0, 1] {
            assert!(t.row(1, k).unwrap().mean <= t.row(3, k).unwrap().mean);
        }
        assert!(t.to_csv().starts_with("n,k,mean,stderr,trials\n"));
        assert!(wall_statistics(&strip(), BcStrategy::Independent, &[5], &[0], 4, 1).is_err());
    }

    #[test]
    fn translation_average_basics() {
        let setup = Setup::new(LatticeSpec::halfplane_strip(8, 8), RegionSpec::Bulk, RegionSpec::Bulk);
        let rect = Setup {
            outer: "4,3@-2,0".parse().unwrap(),
            window: "2,2@-1,0".parse().unwrap(),
            ..setup.clone()
        };
        let c = translation_average(&rect, Statistic::Constant(2.5), 3, 4, 1).unwrap();
        assert!(c.series.iter().all(|&x| x == 2.5) && c.average == 2.5);
        let zero = translation_average(&rect, Statistic::StateCount, 0, 3, 2).unwrap();
        assert_eq!(zero.series.len(), 1);
        assert_eq!(zero.average, zero.series[0]);
        assert!(matches!(translation_average(&rect, Statistic::Constant(1.0), 9, 1, 1), Err(LabError::Sizing(_))));
        assert!(translation_average(&setup, Statistic::Constant(1.0), 1, 1, 1).is_err());
    }
}
