//! Critical values, flexibilities, droplets and the droplet flip.

use spinglass_lab::couplings::{CouplingConfig, DistributionSpec};
use spinglass_lab::criticality::{critical_droplets, critical_report, critical_value_bisection, droplet_flip};
use spinglass_lab::groundstate::{solve_ground_state, BoundaryCondition};
use spinglass_lab::lattice::LatticeSpec;

fn main() -> spinglass_lab::Result<()> {
    let l = LatticeSpec::boxed(3, 3).build()?;
    let j = CouplingConfig::sample(&l, DistributionSpec::default(), 5)?;
    let all = l.region_all();
    let sigma = solve_ground_state(&l, &j, &all, &BoundaryCondition::Free)?.config;
    println!("ground state {}", sigma.to_string_full());
    println!("edge  J_e        C_e        F_e       S_e      supersat  droplet");
    for e in 0..l.num_edges() {
        let r = critical_report(&l, &j, &sigma, e, &all)?;
        println!(
            "{:>4}  {:+.6}  {:+.6}  {:.6}  {:.6}  {:<8}  {:?}",
            e, r.j_e, r.critical_value, r.flexibility, r.s_e, r.super_satisfied, r.droplets[0].as_slice()
        );
    }

    let e = 4;
    let exact = critical_report(&l, &j, &sigma, e, &all)?.critical_value;
    println!("edge {e}: exact {exact:+.9}, bisection {:+.9}", critical_value_bisection(&l, &j, &sigma, e, &all)?);
    let droplet = &critical_droplets(&l, &j, &sigma, e, &all)?[0];
    let flip = droplet_flip(&l, &j, &sigma, droplet, e, &all)?;
    println!(
        "flipping {:?}: bond {} -> {}, C_e {:+.6} -> {:+.6}",
        droplet.as_slice(),
        sigma.bond(&l, e),
        flip.flipped.bond(&l, e),
        flip.critical_before,
        flip.critical_after
    );
    Ok(())
}
