//! Tethered-wall counts N_{n,k} on a strip and the subadditivity check,
//! for each replica-pair strategy.

use spinglass_lab::experiments::{wall_statistics, BcStrategy, RegionSpec, Setup};
use spinglass_lab::lattice::LatticeSpec;

fn main() -> spinglass_lab::Result<()> {
    let setup = Setup::new(LatticeSpec::halfplane_strip(16, 8), RegionSpec::Bulk, RegionSpec::Bulk);
    let ns: Vec<i64> = (1..=6).collect();
    for strategy in [BcStrategy::Antipodal, BcStrategy::Independent] {
        let t = wall_statistics(&setup, strategy, &ns, &[0, 1], 500, 8)?;
        println!("{strategy}: subadditive within slack: {}, monotone violations: {}", t.passed, t.monotone_violations);
        print!("{}", t.to_csv());
        for c in t.subadditivity.iter().filter(|c| !c.passed) {
            println!("  k={} n={} m={}: {:.4} > {:.4} + {:.4}", c.k, c.n, c.m, c.lhs, c.rhs, c.slack);
        }
    }
    Ok(())
}
