//! Critical values, flexibilities, super-satisfied values and critical
//! droplets of single edges in a ground state.
//!
//! All infima range over nonempty subsets `A` of an explicit region, with
//! boundaries taken in the whole lattice.

use serde::{Deserialize, Serialize};

use crate::couplings::CouplingConfig;
use crate::error::{LabError, Result};
use crate::groundstate::{local_flip_check, SpinConfig};
use crate::lattice::{Lattice, Region};
use crate::subsets::{canonical_less, SubsetScan};
use crate::tolerance::{BISECTION_STEPS, INEQ_SLACK};

/// Per-edge summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub edge: usize,
    pub endpoints: [usize; 2],
    pub j_e: f64,
    pub sigma_e: i8,
    pub critical_value: f64,
    pub flexibility: f64,
    pub s_e: f64,
    pub s_e_x: f64,
    pub s_e_y: f64,
    pub super_satisfied: bool,
    pub droplets: Vec<Region>,
    pub region: Region,
}

/// `(𝒮_e, 𝒮_e^x, 𝒮_e^y, |J_e| > 𝒮_e)` with `x`, `y` the edge's endpoints in
/// vertex order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperSatisfied {
    pub s_e: f64,
    pub s_x: f64,
    pub s_y: f64,
    pub flag: bool,
}

pub fn super_satisfied_values(lattice: &Lattice, j: &CouplingConfig, e: usize) -> Result<SuperSatisfied> {
    lattice.check_edge(e)?;
    j.check_lattice(lattice)?;
    let [x, y] = lattice.edge(e);
    let side = |v: usize| lattice.incident(v).iter().filter(|&&f| f != e).map(|&f| j.get(f).abs()).sum::<f64>();
    let (s_x, s_y) = (side(x), side(y));
    let s_e = s_x.min(s_y);
    Ok(SuperSatisfied { s_e, s_x, s_y, flag: j.get(e).abs() > s_e })
}

/// Everything one subset scan yields for edge `e`.
struct EdgeScan {
    sigma_e: i8,
    /// `min Σ_{∂A∖e}` over `A` with `e ∈ ∂A`.
    rest_min: f64,
    /// `min Σ_{∂A}` over the same family.
    flex: f64,
    droplets: Vec<Region>,
}

fn scan_edge(
    lattice: &Lattice,
    j: &CouplingConfig,
    sigma: &SpinConfig,
    e: usize,
    region: &Region,
    require_ground_state: bool,
) -> Result<EdgeScan> {
    lattice.check_edge(e)?;
    let [u, v] = lattice.edge(e);
    if !region.contains(u) && !region.contains(v) {
        return Err(LabError::Structural(format!("edge {e} has no endpoint in the region")));
    }
    let scan = SubsetScan::new(lattice, j, sigma, region)?;
    let k = scan.edge_slot(e).expect("edge touches the region");
    let we = scan.weight(k);
    let mut all_min = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut cands: Vec<(u32, f64)> = Vec::new();
    scan.for_each(|mask, sum, inb| {
        all_min = all_min.min(sum);
        if !inb[k] {
            return;
        }
        let rest = sum - we;
        if rest <= best + INEQ_SLACK {
            if rest < best {
                best = rest;
                cands.retain(|c| c.1 <= best + INEQ_SLACK);
            }
            cands.push((mask, rest));
        }
    });
    if require_ground_state && all_min < -INEQ_SLACK {
        return Err(LabError::Precondition(format!(
            "configuration is not a ground state on the region (boundary sum {all_min:.3e})"
        )));
    }
    // exact values for the minimizers, then the droplet family
    let exact: Vec<(u32, f64)> = cands.iter().map(|&(m, _)| (m, scan.exact_sum(m) - we)).collect();
    let rest_min = exact.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let full = scan.full_mask();
    let region_boundary_empty = lattice.boundary_edges(region)?.is_empty();
    let mut reps: Vec<u32> = exact
        .iter()
        .filter(|c| c.1 <= rest_min + INEQ_SLACK)
        .map(|&(m, _)| {
            let comp = full & !m;
            // complements share the boundary only when the region has none
            if region_boundary_empty && comp != 0 && canonical_less(comp, m) { comp } else { m }
        })
        .collect();
    reps.sort_by(|a, b| {
        if canonical_less(*a, *b) {
            std::cmp::Ordering::Less
        } else if canonical_less(*b, *a) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    reps.dedup();
    Ok(EdgeScan {
        sigma_e: sigma.bond(lattice, e),
        rest_min,
        flex: rest_min + we,
        droplets: reps.into_iter().map(|m| scan.to_region(m)).collect(),
    })
}

/// `C_e` from `σ_e C_e = −min_{A: e∈∂A} Σ_{∂A∖e} J σσ`.
pub fn critical_value(lattice: &Lattice, j: &CouplingConfig, sigma: &SpinConfig, e: usize, region: &Region) -> Result<f64> {
    let s = scan_edge(lattice, j, sigma, e, region, true)?;
    Ok(-(s.sigma_e as f64) * s.rest_min)
}

/// `min_{A: e∈∂A} Σ_{∂A} J σσ`.
pub fn flexibility(lattice: &Lattice, j: &CouplingConfig, sigma: &SpinConfig, e: usize, region: &Region) -> Result<f64> {
    Ok(scan_edge(lattice, j, sigma, e, region, true)?.flex)
}

/// Canonical minimizers of the critical-value objective.
pub fn critical_droplets(
    lattice: &Lattice,
    j: &CouplingConfig,
    sigma: &SpinConfig,
    e: usize,
    region: &Region,
) -> Result<Vec<Region>> {
    Ok(scan_edge(lattice, j, sigma, e, region, true)?.droplets)
}

pub fn critical_report(
    lattice: &Lattice,
    j: &CouplingConfig,
    sigma: &SpinConfig,
    e: usize,
    region: &Region,
) -> Result<CriticalReport> {
    let s = scan_edge(lattice, j, sigma, e, region, true)?;
    let ss = super_satisfied_values(lattice, j, e)?;
    Ok(CriticalReport {
        edge: e,
        endpoints: lattice.edge(e),
        j_e: j.get(e),
        sigma_e: s.sigma_e,
        critical_value: -(s.sigma_e as f64) * s.rest_min,
        flexibility: s.flex,
        s_e: ss.s_e,
        s_e_x: ss.s_x,
        s_e_y: ss.s_y,
        super_satisfied: ss.flag,
        droplets: s.droplets,
        region: region.clone(),
    })
}

/// Critical value without the ground-state precondition; used for
/// configurations that are only in `𝒢_{±e}`.
pub fn critical_value_relaxed(
    lattice: &Lattice,
    j: &CouplingConfig,
    sigma: &SpinConfig,
    e: usize,
    region: &Region,
) -> Result<f64> {
    let s = scan_edge(lattice, j, sigma, e, region, false)?;
    Ok(-(s.sigma_e as f64) * s.rest_min)
}

/// Result of flipping a critical droplet, with the postcondition values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DropletFlip {
    pub flipped: SpinConfig,
    pub critical_before: f64,
    pub critical_after: f64,
}

/// `σ̃ = −σ` on the droplet, checked to land in `𝒢_{∓e}` with a critical
/// value no closer to `J_e` from the wrong side.
pub fn droplet_flip(
    lattice: &Lattice,
    j: &CouplingConfig,
    sigma: &SpinConfig,
    droplet: &Region,
    e: usize,
    region: &Region,
) -> Result<DropletFlip> {
    let flipped = sigma.flip_region(droplet);
    let se = sigma.bond(lattice, e);
    if flipped.bond(lattice, e) != -se {
        return Err(LabError::Verification(format!("flipping the droplet does not reverse edge {e}")));
    }
    let check = local_flip_check(lattice, j, &flipped, region, Some(e))?;
    if !check.is_ground_state {
        return Err(LabError::Verification(format!(
            "flipped configuration fails the restricted ground-state test: {:?}",
            check.worst
        )));
    }
    let before = critical_value(lattice, j, sigma, e, region)?;
    let after = critical_value_relaxed(lattice, j, &flipped, e, region)?;
    let ok = if se > 0 { after >= before - INEQ_SLACK } else { after <= before + INEQ_SLACK };
    if !ok {
        return Err(LabError::Verification(format!("critical value moved the wrong way: {before} -> {after}")));
    }
    Ok(DropletFlip { flipped, critical_before: before, critical_after: after })
}

/// Independent route to `C_e`: bisect on `y` for the threshold of
/// ground-state membership of `σ` under `J(e, y)`.
pub fn critical_value_bisection(
    lattice: &Lattice,
    j: &CouplingConfig,
    sigma: &SpinConfig,
    e: usize,
    region: &Region,
) -> Result<f64> {
    let [u, v] = lattice.edge(e);
    if !region.contains(u) && !region.contains(v) {
        return Err(LabError::Structural(format!("edge {e} has no endpoint in the region")));
    }
    if !local_flip_check(lattice, j, sigma, region, None)?.is_ground_state {
        return Err(LabError::Precondition("configuration is not a ground state on the region".into()));
    }
    let s = super_satisfied_values(lattice, j, e)?.s_e;
    let member = |y: f64| -> Result<bool> {
        let jy = j.modify(e, y)?;
        let w = local_flip_check(lattice, &jy, sigma, region, None)?;
        Ok(w.worst.is_none_or(|(_, sum)| sum >= 0.0))
    };
    let plus = sigma.bond(lattice, e) > 0;
    // membership holds above the threshold for σ_e = +1, below it otherwise
    let (mut lo, mut hi) = (-s - 1.0, s + 1.0);
    let (at_lo, at_hi) = (member(lo)?, member(hi)?);
    if at_lo == at_hi || at_hi != plus {
        return Err(LabError::Inconsistent(format!(
            "membership is not monotone on [{lo}, {hi}] for edge {e}"
        )));
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if member(mid)? == plus {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::DistributionSpec;
    use crate::groundstate::{solve_ground_state, BoundaryCondition};
    use crate::lattice::LatticeSpec;

    fn seg3() -> (Lattice, CouplingConfig, SpinConfig) {
        let l = LatticeSpec::segment(3).build().unwrap();
        let j = CouplingConfig::manual(&l, vec![1.5, -2.0]).unwrap();
        let s = SpinConfig::parse(&l, "++-").unwrap();
        (l, j, s)
    }

    #[test]
    fn segment_examples() {
        let (l, j, s) = seg3();
        let all = l.region_all();
        assert_eq!(critical_value(&l, &j, &s, 0, &all).unwrap(), 0.0);
        assert_eq!(flexibility(&l, &j, &s, 0, &all).unwrap(), 1.5);
        assert_eq!(critical_droplets(&l, &j, &s, 0, &all).unwrap(), vec![Region::from_indices(vec![0])]);
        assert!(critical_value_bisection(&l, &j, &s, 0, &all).unwrap().abs() < 1e-9);
        for y in [-5.0, 0.3, 7.0] {
            assert_eq!(critical_value_relaxed(&l, &j.modify(0, y).unwrap(), &s, 0, &all).unwrap(), 0.0);
        }
        let ss = super_satisfied_values(&l, &j, 0).unwrap();
        assert_eq!((ss.s_x, ss.s_y, ss.s_e, ss.flag), (0.0, 2.0, 0.0, true));
        let flip = droplet_flip(&l, &j, &s, &Region::from_indices(vec![0]), 0, &all).unwrap();
        assert_eq!(flip.flipped.to_string_full(), "-+-");
        assert_eq!(flip.critical_after, 0.0);
    }

    #[test]
    fn super_satisfied_interior_edge() {
        let l = LatticeSpec::boxed(4, 4).build().unwrap();
        let e = l.edge_at([1, 1], [2, 1]).unwrap();
        let [x, y] = l.edge(e);
        let mut vals = vec![0.0; l.num_edges()];
        vals[e] = 0.5;
        for (v, ws) in [(x, [1.0, 2.0, 3.0]), (y, [4.0, 5.0, 6.0])] {
            let others: Vec<usize> = l.incident(v).iter().copied().filter(|&f| f != e).collect();
            for (f, w) in others.into_iter().zip(ws) {
                vals[f] = w;
            }
        }
        let j = CouplingConfig::manual(&l, vals).unwrap();
        let ss = super_satisfied_values(&l, &j, e).unwrap();
        assert_eq!((ss.s_x, ss.s_y, ss.s_e), (6.0, 15.0, 6.0));
        let zero = CouplingConfig::manual(&l, vec![0.0; l.num_edges()]).unwrap();
        assert_eq!(super_satisfied_values(&l, &zero, e).unwrap().s_e, 0.0);
    }

    #[test]
    fn preconditions() {
        let (l, j, _) = seg3();
        let bad = SpinConfig::parse(&l, "+++").unwrap();
        assert!(matches!(critical_value(&l, &j, &bad, 0, &l.region_all()), Err(LabError::Precondition(_))));
        let s = SpinConfig::parse(&l, "++-").unwrap();
        let r = Region::from_indices(vec![2]);
        assert!(matches!(critical_value(&l, &j, &s, 0, &r), Err(LabError::Structural(_))));
    }

    #[test]
    fn random_box_agrees_with_bisection() {
        let l = LatticeSpec::boxed(3, 3).build().unwrap();
        let all = l.region_all();
        for seed in 0..20 {
            let j = CouplingConfig::sample(&l, DistributionSpec::default(), seed).unwrap();
            let gs = solve_ground_state(&l, &j, &all, &BoundaryCondition::Free).unwrap();
            for e in 0..l.num_edges() {
                let r = critical_report(&l, &j, &gs.config, e, &all).unwrap();
                let b = critical_value_bisection(&l, &j, &gs.config, e, &all).unwrap();
                assert!((r.critical_value - b).abs() < 1e-6);
                assert!((r.flexibility - (r.j_e - r.critical_value).abs()).abs() < 1e-9);
                assert!(r.critical_value.abs() <= r.s_e + 1e-9);
                assert_eq!(r.droplets.len(), 1);
                let f = droplet_flip(&l, &j, &gs.config, &r.droplets[0], e, &all).unwrap();
                assert_eq!(f.flipped.flip_region(&r.droplets[0]), gs.config);
            }
        }
    }
}
