//! Exact ground states: Gray-code enumeration and the transfer solver.

use std::time::Instant;

use spinglass_lab::couplings::{CouplingConfig, DistributionSpec};
use spinglass_lab::groundstate::{is_ground_state, solve_with, BoundaryCondition, SolverKind};
use spinglass_lab::lattice::LatticeSpec;

fn main() -> spinglass_lab::Result<()> {
    let l = LatticeSpec::boxed(6, 4).build()?;
    let j = CouplingConfig::sample(&l, DistributionSpec::default(), 7)?;
    let all = l.region_all();
    for kind in [SolverKind::GrayCode, SolverKind::Transfer, SolverKind::Auto] {
        let t = Instant::now();
        let gs = solve_with(&l, &j, &all, &BoundaryCondition::Free, kind)?;
        println!("{kind:?}: H = {:.9} via {:?} in {:.3?}", gs.energy, gs.solver, t.elapsed());
    }

    // a bulk region under fixed plus boundary spins, checked by subset flips
    let big = LatticeSpec::boxed(6, 6).build()?;
    let jb = CouplingConfig::sample(&big, DistributionSpec::default(), 7)?;
    let bulk = big.region_bulk();
    let bc = BoundaryCondition::Fixed(big.external_boundary(&bulk)?.into_iter().map(|v| (v, 1)).collect());
    let gs = solve_with(&big, &jb, &bulk, &bc, SolverKind::Auto)?;
    let check = is_ground_state(&big, &jb, &gs.config, &bulk)?;
    println!("bulk 4x4 under + boundary: {} (ground state: {})", gs.config.restriction(&bulk), check.is_ground_state);
    Ok(())
}
