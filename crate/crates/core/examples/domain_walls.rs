//! Interfaces between replica pairs on a half-plane strip, their domain
//! walls, and tethered-wall counts.

use spinglass_lab::experiments::{replica_pair, BcStrategy, RegionSpec, Setup};
use spinglass_lab::interface::{count_tethered, decompose, interface, parity_check};
use spinglass_lab::lattice::LatticeSpec;

fn main() -> spinglass_lab::Result<()> {
    let built = Setup::new(LatticeSpec::halfplane_strip(10, 6), RegionSpec::Bulk, RegionSpec::Bulk).build()?;
    let dual = built.lattice.build_dual()?;
    for strategy in [BcStrategy::Independent, BcStrategy::Antipodal, BcStrategy::FlipRelated] {
        let (j, s, t) = replica_pair(&built, strategy, 17)?;
        let iface = interface(&built.lattice, &s, &t)?;
        let dec = decompose(&built.lattice, &dual, &iface)?;
        let tethered = dec.walls.iter().filter(|w| w.tethered).count();
        println!(
            "{strategy}: {} interface edges, {} walls ({tethered} tethered), N(3,0) = {}, sanity clean: {}",
            iface.len(),
            dec.walls.len(),
            count_tethered(&built.lattice, &dec, 3, 0)?,
            dec.sanity.is_clean()
        );
        let faces = built.lattice.faces()?;
        let ok = faces.iter().all(|f| parity_check(&built.lattice, &j, &s, f).unwrap_or(false));
        println!("  parity holds on all {} faces: {ok}", faces.len());
    }
    Ok(())
}
