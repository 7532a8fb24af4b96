//! Coupling realizations drawn from a continuous i.i.d. product measure.
//!
//! Each edge draws from its own counter-based stream keyed by the seed and
//! the edge's geometry (lower endpoint and orientation), never by its index.
//! A given seed therefore assigns the same value to the same geometric edge
//! in every lattice that contains it.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{LabError, Result};
use crate::lattice::{Coord, Lattice, LatticeSpec, Orientation};
use crate::tolerance::{TAU_TIE, TIE_RETRY_CAP};

/// SplitMix64 finalizer, used to derive independent stream keys.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines a parent seed with a child index into a fresh seed.
pub fn derive_seed(seed: u64, child: u64) -> u64 {
    mix64(seed ^ mix64(child.wrapping_add(0x632B_E59B_D9B4_E019)))
}

pub fn edge_stream_key(lower: Coord, orientation: Orientation) -> u64 {
    let o = match orientation {
        Orientation::Horizontal => 0u64,
        Orientation::Vertical => 1u64,
    };
    let x = lower[0] as u64;
    let y = lower[1] as u64;
    mix64(mix64(mix64(x) ^ y.rotate_left(21)) ^ o)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistJson", into = "DistJson")]
pub enum DistributionSpec {
    Gaussian { mean: f64, stddev: f64 },
    UniformSymmetric { halfwidth: f64 },
}

impl Default for DistributionSpec {
    fn default() -> Self {
        DistributionSpec::Gaussian { mean: 0.0, stddev: 1.0 }
    }
}

#[derive(Serialize, Deserialize)]
struct DistJson {
    family: String,
    params: Vec<f64>,
}

impl TryFrom<DistJson> for DistributionSpec {
    type Error = LabError;

    fn try_from(j: DistJson) -> Result<Self> {
        let d = match (j.family.as_str(), j.params.as_slice()) {
            ("gaussian", [m, s]) => DistributionSpec::Gaussian { mean: *m, stddev: *s },
            ("uniform_symmetric" | "uniform", [h]) => DistributionSpec::UniformSymmetric { halfwidth: *h },
            _ => return Err(LabError::Config(format!("unknown distribution {}({:?})", j.family, j.params))),
        };
        d.validate()?;
        Ok(d)
    }
}

impl From<DistributionSpec> for DistJson {
    fn from(d: DistributionSpec) -> Self {
        match d {
            DistributionSpec::Gaussian { mean, stddev } => {
                DistJson { family: "gaussian".into(), params: vec![mean, stddev] }
            }
            DistributionSpec::UniformSymmetric { halfwidth } => {
                DistJson { family: "uniform_symmetric".into(), params: vec![halfwidth] }
            }
        }
    }
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DistributionSpec::Gaussian { mean, stddev } => mean.is_finite() && stddev.is_finite() && stddev > 0.0,
            DistributionSpec::UniformSymmetric { halfwidth } => halfwidth.is_finite() && halfwidth > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(LabError::Config(format!("invalid distribution parameters {self}")))
        }
    }

    pub fn scale(&self) -> f64 {
        match *self {
            DistributionSpec::Gaussian { stddev, .. } => stddev,
            DistributionSpec::UniformSymmetric { halfwidth } => halfwidth,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DistributionSpec::Gaussian { mean, .. } => mean,
            DistributionSpec::UniformSymmetric { .. } => 0.0,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            DistributionSpec::Gaussian { stddev, .. } => stddev * stddev,
            DistributionSpec::UniformSymmetric { halfwidth } => halfwidth * halfwidth / 3.0,
        }
    }

    /// Exact CDF `ν((-∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Gaussian { mean, stddev } => {
                Normal::new(mean, stddev).expect("validated parameters").cdf(x)
            }
            DistributionSpec::UniformSymmetric { halfwidth } => ((x + halfwidth) / (2.0 * halfwidth)).clamp(0.0, 1.0),
        }
    }

    /// `ν([λ, ∞))`.
    pub fn upper_tail(&self, lambda: f64) -> f64 {
        1.0 - self.cdf(lambda)
    }

    /// `ν([c, d])`.
    pub fn interval(&self, c: f64, d: f64) -> f64 {
        (self.cdf(d) - self.cdf(c)).max(0.0)
    }

    pub fn tie_tolerance(&self) -> f64 {
        TAU_TIE * self.scale()
    }

    /// Value of the stream `(seed, key)` at resampling attempt `attempt`.
    pub fn sample_keyed(&self, seed: u64, key: u64, attempt: u32) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(derive_seed(seed, key), attempt as u64));
        match *self {
            DistributionSpec::Gaussian { mean, stddev } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + stddev * z
            }
            DistributionSpec::UniformSymmetric { halfwidth } => rng.random_range(-halfwidth..halfwidth),
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistributionSpec::Gaussian { mean, stddev } => write!(f, "gaussian:{mean},{stddev}"),
            DistributionSpec::UniformSymmetric { halfwidth } => write!(f, "uniform:{halfwidth}"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = LabError;

    /// `gaussian:MEAN,STD` or `uniform:HALFWIDTH`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = s.split_once(':').unwrap_or((s, ""));
        let params: Vec<f64> = if params.is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| LabError::Config(format!("bad distribution parameters `{params}`")))?
        };
        let params = match (family, params.len()) {
            ("gaussian", 0) => vec![0.0, 1.0],
            ("uniform" | "uniform_symmetric", 0) => vec![1.0],
            _ => params,
        };
        DistributionSpec::try_from(DistJson { family: family.to_string(), params })
    }
}

/// A coupling realization `J: edge -> R`, one value per canonical edge.
///
/// `seed` is `None` for configurations produced by [`CouplingConfig::modify`]
/// or built by hand; `dist` is kept so the tie tolerance keeps its scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub lattice_ref: LatticeSpec,
    pub dist: DistributionSpec,
    pub seed: Option<u64>,
    pub values: Vec<f64>,
}

impl CouplingConfig {
    /// Draws one value per edge and audits for ties, resampling a tied edge
    /// on a fresh attempt of its own stream.
    pub fn sample(lattice: &Lattice, dist: DistributionSpec, seed: u64) -> Result<Self> {
        dist.validate()?;
        let keys: Vec<u64> = (0..lattice.num_edges())
            .map(|e| {
                let (c, o) = lattice.edge_geometry(e);
                edge_stream_key(c, o)
            })
            .collect();
        let mut attempts = vec![0u32; keys.len()];
        let mut values: Vec<f64> = keys.iter().map(|&k| dist.sample_keyed(seed, k, 0)).collect();
        let tol = dist.tie_tolerance();
        while let Some((_, later)) = first_tie(&values, tol) {
            attempts[later] += 1;
            if attempts[later] >= TIE_RETRY_CAP {
                return Err(LabError::TieAudit {
                    attempts: attempts[later],
                    detail: format!("edge {later} keeps tying"),
                });
            }
            values[later] = dist.sample_keyed(seed, keys[later], attempts[later]);
        }
        Ok(CouplingConfig { lattice_ref: *lattice.spec(), dist, seed: Some(seed), values })
    }

    /// Hand-built configuration; values must be finite and match the edge count.
    pub fn manual(lattice: &Lattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.num_edges() {
            return Err(LabError::Structural(format!(
                "{} coupling values for {} edges",
                values.len(),
                lattice.num_edges()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(LabError::Structural(format!("coupling at edge {i} is not finite")));
        }
        Ok(CouplingConfig { lattice_ref: *lattice.spec(), dist: DistributionSpec::default(), seed: None, values })
    }

    pub fn is_manual(&self) -> bool {
        self.seed.is_none()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, e: usize) -> f64 {
        self.values[e]
    }

    pub fn tie_tolerance(&self) -> f64 {
        self.dist.tie_tolerance()
    }

    pub fn check_lattice(&self, lattice: &Lattice) -> Result<()> {
        if self.lattice_ref != *lattice.spec() || self.values.len() != lattice.num_edges() {
            return Err(LabError::Structural(format!(
                "couplings built for {} used on {}",
                self.lattice_ref,
                lattice.spec()
            )));
        }
        Ok(())
    }

    /// `J(e, y)`: value `y` at `e`, unchanged elsewhere.
    pub fn modify(&self, e: usize, y: f64) -> Result<Self> {
        if e >= self.values.len() {
            return Err(LabError::Structural(format!("edge {e} out of range ({} edges)", self.values.len())));
        }
        if !y.is_finite() {
            return Err(LabError::Structural(format!("coupling value {y} is not finite")));
        }
        let mut out = self.clone();
        out.values[e] = y;
        out.seed = None;
        Ok(out)
    }

    /// Couplings on `dst` copied from `self` (living on `src`) at the
    /// geometrically shifted edge: `out(e) = self(e + shift)`.
    pub fn pull_back(&self, src: &Lattice, dst: &Lattice, shift: Coord) -> Result<Self> {
        self.check_lattice(src)?;
        let mut values = Vec::with_capacity(dst.num_edges());
        for e in 0..dst.num_edges() {
            let [u, v] = dst.edge(e);
            let a = dst.coord(u);
            let b = dst.coord(v);
            let f = src
                .edge_at([a[0] + shift[0], a[1] + shift[1]], [b[0] + shift[0], b[1] + shift[1]])
                .ok_or_else(|| LabError::Sizing(format!("shifted edge {e} leaves {}", src.spec())))?;
            values.push(self.values[f]);
        }
        Ok(CouplingConfig { lattice_ref: *dst.spec(), dist: self.dist, seed: None, values })
    }
}

/// Indices `(earlier, later)` of some pair of values closer than `tol`.
fn first_tie(values: &[f64], tol: f64) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order.windows(2).find(|w| (values[w[1]] - values[w[0]]).abs() < tol).map(|w| (w[0].min(w[1]), w[0].max(w[1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> DistributionSpec {
        DistributionSpec::default()
    }

    #[test]
    fn deterministic() {
        let l = LatticeSpec::boxed(4, 4).build().unwrap();
        assert_eq!(CouplingConfig::sample(&l, gauss(), 9).unwrap(), CouplingConfig::sample(&l, gauss(), 9).unwrap());
        assert_ne!(CouplingConfig::sample(&l, gauss(), 9).unwrap(), CouplingConfig::sample(&l, gauss(), 10).unwrap());
    }

    #[test]
    fn nested_lattices_share_values() {
        let small = LatticeSpec::boxed(4, 4).build().unwrap();
        let big = LatticeSpec::boxed(8, 8).build().unwrap();
        let js = CouplingConfig::sample(&small, gauss(), 3).unwrap();
        let jb = CouplingConfig::sample(&big, gauss(), 3).unwrap();
        for e in 0..small.num_edges() {
            let [u, v] = small.edge(e);
            let f = big.edge_at(small.coord(u), small.coord(v)).unwrap();
            assert_eq!(js.get(e), jb.get(f));
        }
    }

    #[test]
    fn gaussian_mean_within_five_sigma() {
        let l = LatticeSpec::boxed(71, 72).build_with_cap(6000).unwrap();
        assert!(l.num_edges() >= 10_000);
        let j = CouplingConfig::sample(&l, gauss(), 12345).unwrap();
        let mean = j.values.iter().sum::<f64>() / j.len() as f64;
        assert!(mean.abs() < 5.0 / (j.len() as f64).sqrt(), "mean {mean}");
        assert!(first_tie(&j.values, j.tie_tolerance()).is_none());
    }

    #[test]
    fn ks_statistic_below_critical_value() {
        // Critical value of the one-sample KS statistic at level 0.001.
        let n = 100_000usize;
        for dist in [gauss(), DistributionSpec::UniformSymmetric { halfwidth: 2.0 }] {
            let mut xs: Vec<f64> = (0..n as u64).map(|k| dist.sample_keyed(77, k, 0)).collect();
            xs.sort_by(f64::total_cmp);
            let d = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let f = dist.cdf(x);
                    (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
                })
                .fold(0.0, f64::max);
            assert!(d < 1.95 / (n as f64).sqrt(), "{dist}: D = {d}");
        }
    }

    #[test]
    fn modify_examples() {
        let l = LatticeSpec::boxed(3, 3).build().unwrap();
        let j = CouplingConfig::sample(&l, gauss(), 1).unwrap();
        let same = j.modify(2, j.get(2)).unwrap();
        assert_eq!(same.values, j.values);
        assert_eq!(j.modify(2, 1.0).unwrap().modify(2, -3.0).unwrap(), j.modify(2, -3.0).unwrap());
        let m = j.modify(5, 42.0).unwrap();
        assert!(m.is_manual());
        assert_eq!(m.values.iter().zip(&j.values).filter(|(a, b)| a != b).count(), 1);
        assert!(matches!(j.modify(99, 0.0), Err(LabError::Structural(_))));
    }

    #[test]
    fn tie_audit_resamples() {
        let values = vec![0.5, 0.1, 0.5 + 1e-14, -2.0];
        assert_eq!(first_tie(&values, 1e-12), Some((0, 2)));
    }

    #[test]
    fn distribution_parsing_and_json() {
        let d: DistributionSpec = "gaussian:0,1".parse().unwrap();
        assert_eq!(d, gauss());
        let u: DistributionSpec = "uniform:2".parse().unwrap();
        assert_eq!(u, DistributionSpec::UniformSymmetric { halfwidth: 2.0 });
        assert!("gaussian:0,-1".parse::<DistributionSpec>().is_err());
        assert!("cauchy:1".parse::<DistributionSpec>().is_err());
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"family":"gaussian","params":[0.0,1.0]}"#);
        assert!((u.interval(-2.0, 0.0) - 0.5).abs() < 1e-15);
        assert!((d.upper_tail(0.0) - 0.5).abs() < 1e-12);
    }
}
