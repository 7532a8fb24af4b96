//! Ground states seen through a window: solve the outer region under every
//! boundary condition and restrict.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{solve_ground_state, spin_string, BoundaryCondition, SpinConfig};
use crate::couplings::CouplingConfig;
use crate::error::{LabError, Result};
use crate::lattice::{Lattice, Region};
use crate::tolerance::MAX_BOUNDARY;

/// One window restriction together with a full configuration that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowState {
    /// Spins on the window, in vertex order.
    pub spins: String,
    /// Number of boundary conditions (counting both flip images) yielding it.
    pub multiplicity: u64,
    /// Boundary spins of the first witnessing condition, in vertex order.
    pub witness_bc: String,
    /// Spins on the outer region for that witness.
    pub outer_spins: String,
    /// Index of the globally flipped state.
    pub partner: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundStateSet {
    pub window: Region,
    pub outer: Region,
    pub boundary: Vec<usize>,
    pub states: Vec<WindowState>,
    pub count: usize,
}

impl GroundStateSet {
    /// Full lattice configuration of the `i`-th witness; vertices outside the
    /// outer region and its boundary are `+1`.
    pub fn witness_config(&self, lattice: &Lattice, i: usize) -> Result<SpinConfig> {
        let st = self.states.get(i).ok_or_else(|| LabError::Structural(format!("no window state {i}")))?;
        let mut cfg = SpinConfig::all_plus(lattice);
        for (v, s) in self.boundary.iter().zip(spin_string::decode(&st.witness_bc)?) {
            cfg.set(*v, s);
        }
        for (v, s) in self.outer.iter().zip(spin_string::decode(&st.outer_spins)?) {
            cfg.set(v, s);
        }
        Ok(cfg)
    }

    pub fn index_of(&self, spins: &str) -> Option<usize> {
        self.states.binary_search_by(|s| s.spins.as_str().cmp(spins)).ok()
    }

    pub fn contains(&self, spins: &str) -> bool {
        self.index_of(spins).is_some()
    }
}

/// Enumerates the window restrictions of ground states of `outer` over every
/// boundary condition on its external boundary, closed under global flip.
///
/// The first boundary spin is held at `+1`; the other half comes from flip
/// closure. With an empty external boundary the outer region is solved once
/// under free boundary.
pub fn enumerate_window_ground_states(
    lattice: &Lattice,
    j: &CouplingConfig,
    outer: &Region,
    window: &Region,
) -> Result<GroundStateSet> {
    lattice.check_region(outer)?;
    lattice.check_region(window)?;
    if !window.is_subset_of(outer) {
        return Err(LabError::Precondition("window must lie inside the outer region".into()));
    }
    let boundary = lattice.external_boundary(outer)?;
    if boundary.len() > MAX_BOUNDARY {
        return Err(LabError::Sizing(format!(
            "outer region has {} boundary vertices; at most {MAX_BOUNDARY} are enumerated",
            boundary.len()
        )));
    }

    let solutions: Vec<(SpinConfig, String)> = if boundary.is_empty() {
        let gs = solve_ground_state(lattice, j, outer, &BoundaryCondition::Free)?;
        vec![(gs.config, String::new())]
    } else {
        let codes = 1u64 << (boundary.len() - 1);
        (0..codes)
            .into_par_iter()
            .map(|code| {
                let assign: Vec<(usize, i8)> = boundary
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (v, if i > 0 && code >> (i - 1) & 1 == 1 { -1 } else { 1 }))
                    .collect();
                let bc_str = spin_string::encode(assign.iter().map(|a| a.1));
                let gs = solve_ground_state(lattice, j, outer, &BoundaryCondition::Fixed(assign))?;
                Ok((gs.config, bc_str))
            })
            .collect::<Result<Vec<_>>>()?
    };

    let mut found: BTreeMap<String, WindowState> = BTreeMap::new();
    for (cfg, bc) in &solutions {
        for (c, b) in [(cfg.clone(), bc.clone()), (cfg.flipped(), flip_str(bc))] {
            let key = c.restriction(window);
            found
                .entry(key.clone())
                .and_modify(|s| s.multiplicity += 1)
                .or_insert(WindowState { spins: key, multiplicity: 1, witness_bc: b, outer_spins: c.restriction(outer), partner: 0 });
        }
    }
    let mut states: Vec<WindowState> = found.into_values().collect();
    let keys: Vec<String> = states.iter().map(|s| s.spins.clone()).collect();
    for s in &mut states {
        let f = flip_str(&s.spins);
        s.partner = keys.binary_search(&f).expect("flip closure");
    }
    let count = states.len();
    Ok(GroundStateSet { window: window.clone(), outer: outer.clone(), boundary, states, count })
}

fn flip_str(s: &str) -> String {
    s.chars().map(|c| if c == '+' { '-' } else { '+' }).collect()
}

/// Uniform measure over the states of a ground-state set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformMeasure {
    pub weights: Vec<f64>,
}

impl UniformMeasure {
    pub fn new(gss: &GroundStateSet) -> Result<Self> {
        if gss.count == 0 {
            return Err(LabError::Precondition("empty ground-state set".into()));
        }
        Ok(UniformMeasure { weights: vec![1.0 / gss.count as f64; gss.count] })
    }

    /// Two independent draws of state indices.
    pub fn sample_pair_with<R: Rng>(&self, rng: &mut R) -> (usize, usize) {
        let n = self.weights.len();
        (rng.random_range(0..n), rng.random_range(0..n))
    }

    pub fn sample_replica_pair(&self, seed: u64) -> (usize, usize) {
        self.sample_pair_with(&mut ChaCha8Rng::seed_from_u64(seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::DistributionSpec;
    use crate::groundstate::is_ground_state;
    use crate::lattice::LatticeSpec;

    #[test]
    fn one_dimensional_free_count_two() {
        let l = LatticeSpec::segment(8).build().unwrap();
        let j = CouplingConfig::sample(&l, DistributionSpec::default(), 7).unwrap();
        let all = l.region_all();
        let window = Region::from_indices(vec![2, 3, 4, 5]);
        let gss = enumerate_window_ground_states(&l, &j, &all, &window).unwrap();
        assert_eq!(gss.count, 2);
        assert_eq!(gss.states[0].partner, 1);
        assert_eq!(gss.states[1].partner, 0);
    }

    #[test]
    fn ferromagnet_window_sees_both_uniform_states() {
        let l = LatticeSpec::boxed(4, 4).build().unwrap();
        let g = CouplingConfig::sample(&l, DistributionSpec::default(), 2).unwrap();
        let j = CouplingConfig::manual(&l, g.values.iter().map(|v| v.abs() + 0.25).collect()).unwrap();
        let bulk = l.region_bulk();
        let gss = enumerate_window_ground_states(&l, &j, &bulk, &bulk).unwrap();
        assert!(gss.contains("++++"));
        assert!(gss.contains("----"));
        assert_eq!(gss.states.iter().map(|s| s.multiplicity).sum::<u64>(), 1 << gss.boundary.len());
    }

    #[test]
    fn witnesses_are_local_ground_states() {
        let l = LatticeSpec::boxed(5, 5).build().unwrap();
        let j = CouplingConfig::sample(&l, DistributionSpec::default(), 3).unwrap();
        let bulk = l.region_bulk();
        let window = l.region_rect([1, 1], [2, 2]).unwrap();
        let gss = enumerate_window_ground_states(&l, &j, &bulk, &window).unwrap();
        assert!(gss.count >= 2 && gss.count.is_multiple_of(2));
        for i in 0..gss.count {
            let cfg = gss.witness_config(&l, i).unwrap();
            assert_eq!(cfg.restriction(&window), gss.states[i].spins);
            assert!(is_ground_state(&l, &j, &cfg, &bulk).unwrap().is_ground_state);
        }
        let json = serde_json::to_value(&gss).unwrap();
        assert_eq!(json["count"], gss.count);
    }

    #[test]
    fn window_outside_outer_rejected() {
        let l = LatticeSpec::boxed(4, 4).build().unwrap();
        let j = CouplingConfig::sample(&l, DistributionSpec::default(), 3).unwrap();
        let r = enumerate_window_ground_states(&l, &j, &l.region_bulk(), &Region::from_indices(vec![0]));
        assert!(matches!(r, Err(LabError::Precondition(_))));
    }

    #[test]
    fn replica_pairs_are_deterministic() {
        let l = LatticeSpec::boxed(4, 4).build().unwrap();
        let j = CouplingConfig::sample(&l, DistributionSpec::default(), 5).unwrap();
        let bulk = l.region_bulk();
        let gss = enumerate_window_ground_states(&l, &j, &bulk, &bulk).unwrap();
        let mu = UniformMeasure::new(&gss).unwrap();
        assert_eq!(mu.sample_replica_pair(9), mu.sample_replica_pair(9));
    }
}
