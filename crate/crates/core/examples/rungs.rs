//! Rungs between (j,l)-walls and their infima.

use spinglass_lab::couplings::derive_seed;
use spinglass_lab::experiments::{replica_pair, BcStrategy, RegionSpec, Setup};
use spinglass_lab::interface::{boxed_walls, enumerate_rungs, interface, rung_infima};
use spinglass_lab::lattice::{LatticeSpec, Rect};

fn main() -> spinglass_lab::Result<()> {
    let built = Setup::new(LatticeSpec::halfplane_strip(8, 6), RegionSpec::Bulk, RegionSpec::Bulk).build()?;
    let dual = built.lattice.build_dual()?;
    let box_l = Rect::new([-4, 0], [3, 5]);
    let box_j = Rect::new([-3, 0], [2, 4]);
    for i in 0..200 {
        let (j, s, t) = replica_pair(&built, BcStrategy::Independent, derive_seed(3, i))?;
        let iface = interface(&built.lattice, &s, &t)?;
        if boxed_walls(&dual, &iface, &box_j, &box_l)?.len() < 2 {
            continue;
        }
        for k in [2, 4, 6] {
            let cat = enumerate_rungs(&built.lattice, &dual, &iface, &j, &s, &box_j, &box_l, k)?;
            let Some(first) = cat.rungs.first() else {
                println!("pair {i}, K = {k}: {} walls, no rungs", cat.walls.len());
                continue;
            };
            let inf = rung_infima(&cat.rungs, 0, first.dual_edges[0]);
            println!("pair {i}, K = {k}: {} walls, {} rungs, I = {:?}, I' = {:?}, I~ = {:?}", cat.walls.len(), cat.rungs.len(), inf.i, inf.i_prime, inf.i_tilde);
        }
        return Ok(());
    }
    println!("no pair with two (j,l)-walls");
    Ok(())
}
