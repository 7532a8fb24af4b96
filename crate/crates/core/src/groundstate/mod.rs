//! Spin configurations, the Hamiltonian, the local-flip ground-state test,
//! exact minimization and window enumeration over boundary conditions.

mod solver;
mod window;

pub use solver::{solve_ground_state, solve_with, GroundState, SolverKind};
pub use window::{enumerate_window_ground_states, GroundStateSet, UniformMeasure, WindowState};

use serde::{Deserialize, Serialize};

use crate::couplings::CouplingConfig;
use crate::error::{LabError, Result};
use crate::lattice::{Lattice, LatticeSpec, Region};
use crate::subsets::{canonical_less, SubsetScan};
use crate::tolerance::INEQ_SLACK;

pub type Spin = i8;

/// A spin on every lattice vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfig {
    pub lattice_ref: LatticeSpec,
    #[serde(with = "spin_string")]
    pub spins: Vec<Spin>,
}

impl SpinConfig {
    pub fn all_plus(lattice: &Lattice) -> Self {
        SpinConfig { lattice_ref: *lattice.spec(), spins: vec![1; lattice.num_vertices()] }
    }

    pub fn from_spins(lattice: &Lattice, spins: Vec<Spin>) -> Result<Self> {
        if spins.len() != lattice.num_vertices() {
            return Err(LabError::Structural(format!(
                "{} spins for {} vertices",
                spins.len(),
                lattice.num_vertices()
            )));
        }
        if spins.iter().any(|s| *s != 1 && *s != -1) {
            return Err(LabError::Structural("spins must be +1 or -1".into()));
        }
        Ok(SpinConfig { lattice_ref: *lattice.spec(), spins })
    }

    /// Parses a `+`/`-` string, one character per vertex.
    pub fn parse(lattice: &Lattice, s: &str) -> Result<Self> {
        Self::from_spins(lattice, spin_string::decode(s)?)
    }

    pub fn get(&self, v: usize) -> Spin {
        self.spins[v]
    }

    pub fn set(&mut self, v: usize, s: Spin) {
        self.spins[v] = s;
    }

    /// `σ_e = σ_x σ_y`.
    pub fn bond(&self, lattice: &Lattice, e: usize) -> Spin {
        let [u, v] = lattice.edge(e);
        self.spins[u] * self.spins[v]
    }

    pub fn flipped(&self) -> Self {
        SpinConfig { lattice_ref: self.lattice_ref, spins: self.spins.iter().map(|s| -s).collect() }
    }

    /// `−σ` on `region`, `σ` elsewhere.
    pub fn flip_region(&self, region: &Region) -> Self {
        let mut out = self.clone();
        for v in region.iter() {
            out.spins[v] = -out.spins[v];
        }
        out
    }

    pub fn restriction(&self, region: &Region) -> String {
        spin_string::encode(region.iter().map(|v| self.spins[v]))
    }

    pub fn to_string_full(&self) -> String {
        spin_string::encode(self.spins.iter().copied())
    }

    pub fn check_lattice(&self, lattice: &Lattice) -> Result<()> {
        if self.lattice_ref != *lattice.spec() || self.spins.len() != lattice.num_vertices() {
            return Err(LabError::Structural(format!(
                "spin configuration for {} used on {}",
                self.lattice_ref,
                lattice.spec()
            )));
        }
        Ok(())
    }
}

pub(crate) mod spin_string {
    use super::Spin;
    use crate::error::{LabError, Result};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn encode(spins: impl Iterator<Item = Spin>) -> String {
        spins.map(|s| if s > 0 { '+' } else { '-' }).collect()
    }

    pub fn decode(s: &str) -> Result<Vec<Spin>> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(LabError::Structural(format!("bad spin character `{c}`"))),
            })
            .collect()
    }

    pub fn serialize<S: Serializer>(spins: &[Spin], ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&encode(spins.iter().copied()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<Spin>, D::Error> {
        let s = String::deserialize(de)?;
        decode(&s).map_err(serde::de::Error::custom)
    }
}

/// Boundary condition for a solve region: free, or a spin on every vertex of
/// the region's external boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "assignment")]
pub enum BoundaryCondition {
    Free,
    Fixed(Vec<(usize, Spin)>),
}

impl BoundaryCondition {
    /// The boundary spins of `sigma` on the external boundary of `region`.
    pub fn from_config(lattice: &Lattice, region: &Region, sigma: &SpinConfig) -> Result<Self> {
        let b = lattice.external_boundary(region)?;
        Ok(BoundaryCondition::Fixed(b.into_iter().map(|v| (v, sigma.get(v))).collect()))
    }

    pub fn flipped(&self) -> Self {
        match self {
            BoundaryCondition::Free => BoundaryCondition::Free,
            BoundaryCondition::Fixed(a) => BoundaryCondition::Fixed(a.iter().map(|&(v, s)| (v, -s)).collect()),
        }
    }
}

/// `H = −Σ J_xy σ_x σ_y` over edges with both endpoints in `region`, summed
/// in canonical edge order.
pub fn hamiltonian(lattice: &Lattice, j: &CouplingConfig, region: &Region, sigma: &SpinConfig) -> f64 {
    let mask = region.mask(lattice.num_vertices());
    let mut h = 0.0;
    for (e, [u, v]) in lattice.edges().iter().enumerate() {
        if mask[*u] && mask[*v] {
            h -= j.get(e) * (sigma.get(*u) * sigma.get(*v)) as f64;
        }
    }
    h
}

/// Outcome of the local-flip test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateCheck {
    pub is_ground_state: bool,
    /// Subset with the most negative boundary sum, and that sum.
    pub worst: Option<(Region, f64)>,
}

/// Checks `Σ_{∂B} J σσ ≥ −slack` for every nonempty `B ⊆ window`, with
/// boundary edges taken in the whole lattice.
pub fn is_ground_state(lattice: &Lattice, j: &CouplingConfig, sigma: &SpinConfig, window: &Region) -> Result<GroundStateCheck> {
    local_flip_check(lattice, j, sigma, window, None)
}

/// As [`is_ground_state`], but when `exclude` is set only subsets whose
/// boundary avoids that edge are tested (membership in `𝒢_{±e}`).
pub fn local_flip_check(
    lattice: &Lattice,
    j: &CouplingConfig,
    sigma: &SpinConfig,
    window: &Region,
    exclude: Option<usize>,
) -> Result<GroundStateCheck> {
    let scan = SubsetScan::new(lattice, j, sigma, window)?;
    let skip = exclude.and_then(|e| scan.edge_slot(e));
    let tol = j.tie_tolerance();
    let mut best: Option<(u32, f64)> = None;
    scan.for_each(|mask, sum, inb| {
        if skip.is_some_and(|k| inb[k]) {
            return;
        }
        match best {
            None => best = Some((mask, sum)),
            Some((m, s)) => {
                if sum < s - tol || (sum <= s + tol && canonical_less(mask, m)) {
                    best = Some((mask, sum.min(s)));
                }
            }
        }
    });
    Ok(match best {
        None => GroundStateCheck { is_ground_state: true, worst: None },
        Some((mask, _)) => {
            let sum = scan.exact_sum(mask);
            GroundStateCheck { is_ground_state: sum >= -INEQ_SLACK, worst: Some((scan.to_region(mask), sum)) }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::DistributionSpec;

    fn seg3() -> (Lattice, CouplingConfig) {
        let l = LatticeSpec::segment(3).build().unwrap();
        let j = CouplingConfig::manual(&l, vec![1.5, -2.0]).unwrap();
        (l, j)
    }

    #[test]
    fn hamiltonian_examples() {
        let (l, j) = seg3();
        let zero = CouplingConfig::manual(&l, vec![0.0, 0.0]).unwrap();
        let s = SpinConfig::parse(&l, "++-").unwrap();
        assert_eq!(hamiltonian(&l, &zero, &l.region_all(), &s), 0.0);
        assert_eq!(hamiltonian(&l, &j, &l.region_all(), &s), -3.5);
        let two = LatticeSpec::segment(2).build().unwrap();
        let one = CouplingConfig::manual(&two, vec![1.0]).unwrap();
        assert_eq!(hamiltonian(&two, &one, &two.region_all(), &SpinConfig::all_plus(&two)), -1.0);
    }

    #[test]
    fn hamiltonian_brute_force_minimum_segment() {
        let (l, j) = seg3();
        let all = l.region_all();
        let min = (0..8u32)
            .map(|m| {
                let spins = (0..3).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect();
                hamiltonian(&l, &j, &all, &SpinConfig::from_spins(&l, spins).unwrap())
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, -3.5);
    }

    #[test]
    fn ground_state_test_examples() {
        let (l, j) = seg3();
        let all = l.region_all();
        let good = is_ground_state(&l, &j, &SpinConfig::parse(&l, "++-").unwrap(), &all).unwrap();
        assert!(good.is_ground_state);
        let bad = is_ground_state(&l, &j, &SpinConfig::parse(&l, "+++").unwrap(), &all).unwrap();
        assert!(!bad.is_ground_state);
        let (b, sum) = bad.worst.unwrap();
        assert_eq!(b, Region::from_indices(vec![2]));
        assert_eq!(sum, -2.0);
    }

    #[test]
    fn ferromagnet_all_plus_is_ground_state_everywhere() {
        let l = LatticeSpec::boxed(3, 3).build().unwrap();
        let j = CouplingConfig::manual(&l, (0..l.num_edges()).map(|e| 0.5 + e as f64 * 0.1).collect()).unwrap();
        let s = SpinConfig::all_plus(&l);
        for w in [l.region_all(), l.region_bulk(), l.region_rect([0, 0], [2, 3]).unwrap()] {
            assert!(is_ground_state(&l, &j, &s, &w).unwrap().is_ground_state);
        }
    }

    #[test]
    fn window_cap() {
        let l = LatticeSpec::boxed(5, 5).build().unwrap();
        let j = CouplingConfig::sample(&l, DistributionSpec::default(), 1).unwrap();
        let r = is_ground_state(&l, &j, &SpinConfig::all_plus(&l), &l.region_all());
        assert!(matches!(r, Err(LabError::Sizing(_))));
    }

    #[test]
    fn flip_symmetry_and_strings() {
        let l = LatticeSpec::boxed(3, 2).build().unwrap();
        let j = CouplingConfig::sample(&l, DistributionSpec::default(), 4).unwrap();
        let s = SpinConfig::parse(&l, "+-+--+").unwrap();
        let all = l.region_all();
        assert_eq!(hamiltonian(&l, &j, &all, &s), hamiltonian(&l, &j, &all, &s.flipped()));
        assert_eq!(s.flipped().flipped(), s);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"+-+--+\""));
        assert_eq!(serde_json::from_str::<SpinConfig>(&json).unwrap(), s);
        assert!(SpinConfig::parse(&l, "+-+--").is_err());
    }
}
