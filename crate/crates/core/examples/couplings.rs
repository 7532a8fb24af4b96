//! Coupling realizations: keyed per-edge streams, tie audit, modification.

use spinglass_lab::couplings::{CouplingConfig, DistributionSpec};
use spinglass_lab::lattice::LatticeSpec;

fn main() -> spinglass_lab::Result<()> {
    let small = LatticeSpec::boxed(3, 3).build()?;
    let big = LatticeSpec::boxed(6, 6).translated(-2, -2).build()?;
    let dist: DistributionSpec = "gaussian:0,1".parse()?;
    let j = CouplingConfig::sample(&small, dist, 42)?;
    let jb = CouplingConfig::sample(&big, dist, 42)?;

    // couplings are keyed by edge position, so nested boxes agree
    for e in 0..3 {
        let [u, v] = small.edge(e);
        let f = big.edge_at(small.coord(u), small.coord(v)).expect("nested");
        println!("edge {:?}-{:?}: {:+.6} in the 3x3 box, {:+.6} in the 6x6 box", small.coord(u), small.coord(v), j.get(e), jb.get(f));
    }

    let raised = j.modify(0, 2.5)?;
    println!("modified edge 0 to {}, seed now {:?}", raised.get(0), raised.seed);
    println!("P(J >= 0.5) = {:.6}, P(J in [0, 1]) = {:.6}", dist.upper_tail(0.5), dist.interval(0.0, 1.0));
    println!("{}", serde_json::to_string(&j)?);
    Ok(())
}
