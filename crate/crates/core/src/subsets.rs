//! Gray-order scan over every nonempty subset `A` of a small region,
//! maintaining the boundary sum `Σ_{∂A} J_xy σ_x σ_y` incrementally.

use crate::couplings::CouplingConfig;
use crate::error::{LabError, Result};
use crate::groundstate::SpinConfig;
use crate::lattice::{Lattice, Region};
use crate::tolerance::MAX_SUBSET_REGION;

/// Exact sums are recomputed this often to stop round-off from drifting.
const RESYNC_PERIOD: u64 = 1 << 12;

pub(crate) struct SubsetScan {
    region: Vec<usize>,
    /// Lattice edges with at least one endpoint in the region.
    edges: Vec<usize>,
    /// `J_e σ_x σ_y` for each entry of `edges`.
    weights: Vec<f64>,
    /// For each region slot, positions in `edges` of its incident edges.
    slot_edges: Vec<Vec<usize>>,
}

impl SubsetScan {
    pub(crate) fn new(lattice: &Lattice, j: &CouplingConfig, sigma: &SpinConfig, region: &Region) -> Result<Self> {
        if region.len() > MAX_SUBSET_REGION {
            return Err(LabError::Sizing(format!(
                "region of {} vertices exceeds the subset-enumeration cap {MAX_SUBSET_REGION}",
                region.len()
            )));
        }
        lattice.check_region(region)?;
        j.check_lattice(lattice)?;
        sigma.check_lattice(lattice)?;
        let mut edges: Vec<usize> = region.iter().flat_map(|v| lattice.incident(v).iter().copied()).collect();
        edges.sort_unstable();
        edges.dedup();
        let weights = edges.iter().map(|&e| j.get(e) * sigma.bond(lattice, e) as f64).collect();
        let slot_edges = region
            .iter()
            .map(|v| lattice.incident(v).iter().map(|e| edges.binary_search(e).expect("collected above")).collect())
            .collect();
        Ok(SubsetScan { region: region.as_slice().to_vec(), edges, weights, slot_edges })
    }

    /// Position of lattice edge `e` among the scanned edges.
    pub(crate) fn edge_slot(&self, e: usize) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    pub(crate) fn weight(&self, slot: usize) -> f64 {
        self.weights[slot]
    }

    pub(crate) fn to_region(&self, mask: u32) -> Region {
        Region::from_indices((0..self.region.len()).filter(|i| mask >> i & 1 == 1).map(|i| self.region[i]).collect())
    }

    pub(crate) fn full_mask(&self) -> u32 {
        if self.region.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.region.len()) - 1
        }
    }

    /// Exact boundary membership of every scanned edge for subset `mask`.
    pub(crate) fn boundary_of(&self, mask: u32) -> Vec<bool> {
        let mut inb = vec![false; self.edges.len()];
        for (slot, es) in self.slot_edges.iter().enumerate() {
            if mask >> slot & 1 == 1 {
                for &k in es {
                    inb[k] = !inb[k];
                }
            }
        }
        inb
    }

    pub(crate) fn exact_sum(&self, mask: u32) -> f64 {
        self.boundary_of(mask).iter().zip(&self.weights).filter(|(b, _)| **b).map(|(_, w)| w).sum()
    }

    /// Calls `f(mask, boundary_sum, in_boundary)` for every nonempty subset.
    pub(crate) fn for_each(&self, mut f: impl FnMut(u32, f64, &[bool])) {
        let n = self.region.len();
        let mut inb = vec![false; self.edges.len()];
        let mut sum = 0.0;
        let mut mask = 0u32;
        for i in 1u64..(1u64 << n) {
            let slot = i.trailing_zeros() as usize;
            mask ^= 1 << slot;
            for &k in &self.slot_edges[slot] {
                inb[k] = !inb[k];
                if inb[k] {
                    sum += self.weights[k];
                } else {
                    sum -= self.weights[k];
                }
            }
            if i % RESYNC_PERIOD == 0 {
                sum = inb.iter().zip(&self.weights).filter(|(b, _)| **b).map(|(_, w)| w).sum();
            }
            f(mask, sum, &inb);
        }
    }
}

/// Canonical order among subsets: fewer vertices first, then the
/// lexicographically smaller sorted slot list.
pub(crate) fn canonical_less(a: u32, b: u32) -> bool {
    let (ca, cb) = (a.count_ones(), b.count_ones());
    if ca != cb {
        return ca < cb;
    }
    // compare sorted slot lists: the first differing slot decides
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let low = diff.trailing_zeros();
    a >> low & 1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order() {
        assert!(canonical_less(0b100, 0b011));
        assert!(canonical_less(0b001, 0b010));
        assert!(canonical_less(0b0011, 0b0101));
        assert!(!canonical_less(0b0101, 0b0011));
        assert!(!canonical_less(0b1, 0b1));
    }
}
