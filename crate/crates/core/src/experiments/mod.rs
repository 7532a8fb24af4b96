//! Monte-Carlo harness over the disorder: instances with tie retries,
//! two-replica records, event estimates, translation averages, wall
//! statistics and the verification suites.

mod events;
mod suites;
mod walls;

pub use events::{estimate_event, Event, EventEstimate, Monotonicity};
pub use suites::{verify_suite, CheckResult, SuiteParams, SuiteReport, SUITES};
pub use walls::{
    replica_pair, translation_average, wall_statistics, BcStrategy, Statistic, TranslationSeries, WallRow, WallTable,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::couplings::{derive_seed, CouplingConfig, DistributionSpec};
use crate::criticality::critical_value;
use crate::error::{LabError, Result};
use crate::groundstate::{enumerate_window_ground_states, GroundStateSet, SpinConfig};
use crate::lattice::{parse_pair_i64, Coord, Lattice, LatticeSpec, Region};
use crate::tolerance::TIE_RETRY_CAP;

/// Named region of a lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionSpec {
    All,
    /// Lattice minus its outer ring (a strip keeps its bottom row).
    Bulk,
    /// `size` vertices wide and high with lower-left corner `corner`.
    Rect { size: [usize; 2], corner: Coord },
}

impl RegionSpec {
    pub fn resolve(&self, lattice: &Lattice) -> Result<Region> {
        match self {
            RegionSpec::All => Ok(lattice.region_all()),
            RegionSpec::Bulk => Ok(lattice.region_bulk()),
            RegionSpec::Rect { size, corner } => lattice.region_rect(*corner, *size),
        }
    }

    /// Moved up by `dy` rows; only rectangles can move.
    pub fn shifted_up(&self, dy: i64) -> Result<Self> {
        match self {
            RegionSpec::Rect { size, corner } => Ok(RegionSpec::Rect { size: *size, corner: [corner[0], corner[1] + dy] }),
            _ if dy == 0 => Ok(*self),
            _ => Err(LabError::Config(format!("region `{self}` cannot be translated; give it as W,H@X,Y"))),
        }
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionSpec::All => write!(f, "all"),
            RegionSpec::Bulk => write!(f, "bulk"),
            RegionSpec::Rect { size, corner } => write!(f, "{},{}@{},{}", size[0], size[1], corner[0], corner[1]),
        }
    }
}

impl FromStr for RegionSpec {
    type Err = LabError;

    /// `all`, `bulk`, or `W,H@X,Y`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(RegionSpec::All),
            "bulk" => Ok(RegionSpec::Bulk),
            t => {
                let (size, corner) = t
                    .split_once('@')
                    .ok_or_else(|| LabError::Config(format!("region `{s}` must be all, bulk or W,H@X,Y")))?;
                let [w, h] = parse_pair_i64(size)?;
                if w <= 0 || h <= 0 {
                    return Err(LabError::Config(format!("region `{s}` has an empty side")));
                }
                Ok(RegionSpec::Rect { size: [w as usize, h as usize], corner: parse_pair_i64(corner)? })
            }
        }
    }
}

impl Serialize for RegionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RegionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Lattice, outer region `Λ_n`, window `Λ_m` and disorder distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub lattice: LatticeSpec,
    pub outer: RegionSpec,
    pub window: RegionSpec,
    pub dist: DistributionSpec,
}

impl Setup {
    pub fn new(lattice: LatticeSpec, outer: RegionSpec, window: RegionSpec) -> Self {
        Setup { lattice, outer, window, dist: DistributionSpec::default() }
    }

    pub fn build(&self) -> Result<Built> {
        let lattice = self.lattice.build()?;
        let outer = self.outer.resolve(&lattice)?;
        let window = self.window.resolve(&lattice)?;
        if !window.is_subset_of(&outer) {
            return Err(LabError::Config(format!("window {} is not inside the outer region {}", self.window, self.outer)));
        }
        let mask = window.mask(lattice.num_vertices());
        let window_edges = (0..lattice.num_edges()).filter(|&e| lattice.edge(e).iter().all(|&v| mask[v])).collect();
        Ok(Built { lattice, outer, window, window_edges, dist: self.dist })
    }
}

/// A resolved [`Setup`].
#[derive(Clone, Debug)]
pub struct Built {
    pub lattice: Lattice,
    pub outer: Region,
    pub window: Region,
    /// Edges with both endpoints in the window.
    pub window_edges: Vec<usize>,
    pub dist: DistributionSpec,
}

/// Stream ids under a trial seed.
pub(crate) mod stream {
    pub const RETRY: u64 = 0x7265_7472_7900_0000;
    pub const PAIR: u64 = 0x7061_6972;
    pub const BC: u64 = 0x6263;
    pub const AUX: u64 = 0x61_75_78;
}

/// Seed of trial `t` under a run seed.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    derive_seed(seed, t as u64)
}

/// Runs `f` on a trial seed, resampling with a derived seed whenever the
/// disorder turns out to be degenerate.
pub fn retry_ties<T>(seed: u64, mut f: impl FnMut(u64) -> Result<T>) -> Result<T> {
    let mut last = String::new();
    for attempt in 0..TIE_RETRY_CAP {
        let s = if attempt == 0 { seed } else { derive_seed(seed, stream::RETRY + attempt as u64) };
        match f(s) {
            Err(e) if e.is_degenerate() => last = e.to_string(),
            other => return other,
        }
    }
    Err(LabError::TieAudit { attempts: TIE_RETRY_CAP, detail: last })
}

/// Disorder with its window ground states.
#[derive(Clone, Debug)]
pub struct Instance {
    pub seed: u64,
    pub j: CouplingConfig,
    pub gss: GroundStateSet,
}

pub fn sample_instance(built: &Built, seed: u64) -> Result<Instance> {
    retry_ties(seed, |s| {
        let j = CouplingConfig::sample(&built.lattice, built.dist, s)?;
        let gss = enumerate_window_ground_states(&built.lattice, &j, &built.outer, &built.window)?;
        Ok(Instance { seed: s, j, gss })
    })
}

/// `(J, σ, σ′, {C_e(J,σ)}, {C_e(J,σ′)})` over a declared edge set, with the
/// derived flexibilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaRecord {
    pub j: CouplingConfig,
    pub sigma: SpinConfig,
    pub sigma_prime: SpinConfig,
    /// Region the critical values range over.
    pub region: Region,
    pub edges: Vec<usize>,
    pub c: Vec<f64>,
    pub c_prime: Vec<f64>,
    pub f: Vec<f64>,
    pub f_prime: Vec<f64>,
    /// `min(F_e, F′_e)`.
    pub f_tilde: Vec<f64>,
    /// `max(C_e, C′_e)`.
    pub c_tilde: Vec<f64>,
}

impl OmegaRecord {
    pub fn build(
        lattice: &Lattice,
        j: CouplingConfig,
        sigma: SpinConfig,
        sigma_prime: SpinConfig,
        region: Region,
        edges: Vec<usize>,
    ) -> Result<Self> {
        let crit = |s: &SpinConfig| -> Result<Vec<f64>> {
            edges.iter().map(|&e| critical_value(lattice, &j, s, e, &region)).collect()
        };
        let c = crit(&sigma)?;
        let c_prime = crit(&sigma_prime)?;
        let f: Vec<f64> = edges.iter().zip(&c).map(|(&e, c)| (j.get(e) - c).abs()).collect();
        let f_prime: Vec<f64> = edges.iter().zip(&c_prime).map(|(&e, c)| (j.get(e) - c).abs()).collect();
        let f_tilde = f.iter().zip(&f_prime).map(|(a, b)| a.min(*b)).collect();
        let c_tilde = c.iter().zip(&c_prime).map(|(a, b)| a.max(*b)).collect();
        Ok(OmegaRecord { j, sigma, sigma_prime, region, edges, c, c_prime, f, f_prime, f_tilde, c_tilde })
    }

    pub fn slot(&self, e: usize) -> Option<usize> {
        self.edges.iter().position(|&x| x == e)
    }

    /// Recomputes every critical value and compares exactly.
    pub fn recompute_matches(&self, lattice: &Lattice) -> Result<bool> {
        let again = OmegaRecord::build(
            lattice,
            self.j.clone(),
            self.sigma.clone(),
            self.sigma_prime.clone(),
            self.region.clone(),
            self.edges.clone(),
        )?;
        Ok(again == *self)
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::standard().inverse_cdf(0.975);
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
    // the interval always covers p; clamp away rounding at the ends
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// Half-width of the Wilson interval.
pub fn wilson_width(successes: usize, trials: usize) -> f64 {
    let (lo, hi) = wilson_interval(successes, trials);
    0.5 * (hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_spec_round_trip() {
        for s in ["all", "bulk", "2,2@1,1", "3,1@-2,0"] {
            let r: RegionSpec = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("2,2".parse::<RegionSpec>().is_err());
        assert!("0,2@0,0".parse::<RegionSpec>().is_err());
    }

    #[test]
    fn wilson_contains_estimate() {
        for (s, n) in [(0, 10), (3, 10), (10, 10), (5000, 10000)] {
            let (lo, hi) = wilson_interval(s, n);
            let p = s as f64 / n as f64;
            assert!(lo <= p && p <= hi);
        }
        let (lo, _) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
    }

    #[test]
    fn omega_record_round_trip() {
        let setup = Setup::new(LatticeSpec::boxed(4, 4), RegionSpec::Bulk, RegionSpec::Bulk);
        let built = setup.build().unwrap();
        let inst = sample_instance(&built, 5).unwrap();
        let s = inst.gss.witness_config(&built.lattice, 0).unwrap();
        let t = inst.gss.witness_config(&built.lattice, inst.gss.count - 1).unwrap();
        let rec = OmegaRecord::build(&built.lattice, inst.j, s, t, built.outer.clone(), built.window_edges.clone()).unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        let back: OmegaRecord = serde_json::from_str(&json).unwrap();
        assert!(back.recompute_matches(&built.lattice).unwrap());
        for i in 0..rec.edges.len() {
            assert_eq!(rec.f_tilde[i], rec.f[i].min(rec.f_prime[i]));
            assert_eq!(rec.c_tilde[i], rec.c[i].max(rec.c_prime[i]));
        }
    }
}
