//! Builds the plot-ready scenes consumed by the figure renderer and writes
//! them as JSON files into a directory (default: the system temp dir).

use spinglass_lab::experiments::{BcStrategy, RegionSpec, Setup};
use spinglass_lab::lattice::{LatticeSpec, Rect};
use spinglass_lab::scene::{empty_scene, rung_scene, tethered_pair_scene};

fn main() -> spinglass_lab::Result<()> {
    let dir = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let built = Setup::new(LatticeSpec::halfplane_strip(8, 6), RegionSpec::Bulk, RegionSpec::Bulk).build()?;
    let empty = empty_scene(&built.lattice)?;
    let pair = tethered_pair_scene(&built, BcStrategy::Independent, 3, 2000)?;
    let (rung, catalog) = rung_scene(&built, BcStrategy::Independent, 3, &Rect::new([-3, 1], [2, 4]), &Rect::new([-4, 0], [3, 5]), 6, 2000)?;
    println!("tethered pair: {} walls, rung scene: {} rungs in catalog, labels {:?}", pair.walls.len(), catalog.rungs.len(), rung.labels);
    for scene in [empty, pair, rung] {
        let path = dir.join(format!("scene-{}.json", scene.name));
        std::fs::write(&path, serde_json::to_string_pretty(&scene)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
