//! Monte-Carlo estimates of two-replica events and translation averages.

use spinglass_lab::experiments::{estimate_event, translation_average, Event, RegionSpec, Setup, Statistic};
use spinglass_lab::lattice::LatticeSpec;

fn main() -> spinglass_lab::Result<()> {
    let setup = Setup::new(LatticeSpec::boxed(4, 4), RegionSpec::Bulk, RegionSpec::Bulk);
    for name in ["replicas_equal", "interface_empty", "bond_plus", "critical_below:0.5", "critical_equals_coupling"] {
        let event: Event = name.parse()?;
        let est = estimate_event(&setup, event, None, 2000, 1)?;
        println!(
            "{name:<26} {:>5}/{} = {:.4}  [{:.4}, {:.4}]  {:?}",
            est.successes, est.trials, est.estimate, est.interval[0], est.interval[1], est.monotonicity
        );
    }

    let strip = Setup::new(
        LatticeSpec::halfplane_strip(8, 8),
        RegionSpec::Rect { size: [6, 4], corner: [-3, 0] },
        RegionSpec::Rect { size: [2, 2], corner: [-1, 0] },
    );
    let series = translation_average(&strip, Statistic::CouplingMean, 3, 400, 2)?;
    println!("coupling mean over windows moved up 0..=3: {:?}, average {:.4} +- {:.4}", series.series, series.average, series.stderr);
    Ok(())
}
