//! Window ground states over every boundary condition, and the uniform
//! measure on them.

use spinglass_lab::couplings::{CouplingConfig, DistributionSpec};
use spinglass_lab::groundstate::{enumerate_window_ground_states, UniformMeasure};
use spinglass_lab::lattice::LatticeSpec;

fn main() -> spinglass_lab::Result<()> {
    // in one dimension every bond can be satisfied: only the flip pair remains
    let seg = LatticeSpec::segment(8).build()?;
    let j = CouplingConfig::sample(&seg, DistributionSpec::default(), 7)?;
    let all = seg.region_all();
    let gss = enumerate_window_ground_states(&seg, &j, &all, &all)?;
    println!("segment:8 -> {} states: {:?}", gss.count, gss.states.iter().map(|s| &s.spins).collect::<Vec<_>>());

    // a 2x2 window seen through the 3x3 bulk of a 5x5 box (12 boundary spins)
    let l = LatticeSpec::boxed(5, 5).build()?;
    let j = CouplingConfig::sample(&l, DistributionSpec::default(), 3)?;
    let outer = l.region_bulk();
    let window = l.region_rect([1, 1], [2, 2])?;
    let gss = enumerate_window_ground_states(&l, &j, &outer, &window)?;
    println!("{} boundary vertices, {} window states", gss.boundary.len(), gss.count);
    for s in &gss.states {
        println!("  {}  x{}  partner {}", s.spins, s.multiplicity, s.partner);
    }
    let (a, b) = UniformMeasure::new(&gss)?.sample_replica_pair(11);
    println!("replica pair from the uniform measure: {} / {}", gss.states[a].spins, gss.states[b].spins);
    Ok(())
}
