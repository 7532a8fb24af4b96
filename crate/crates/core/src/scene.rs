//! Plot-ready scenes: lattice geometry, interface edges, dual wall segments,
//! rungs and box overlays, all in lattice coordinates.

use serde::{Deserialize, Serialize};

use crate::couplings::derive_seed;
use crate::error::{LabError, Result};
use crate::experiments::{replica_pair, BcStrategy, Built};
use crate::groundstate::SpinConfig;
use crate::interface::{decompose, enumerate_rungs, interface, rung_infima, RungCatalog};
use crate::lattice::{Coord, DualGraph, Lattice, LatticeJson, Rect};

/// Dual segment between two dual vertices; coordinates are multiples of 1/2.
pub type Segment = [[f64; 2]; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneWall {
    pub id: usize,
    pub tethered: bool,
    /// Dual edge ids; each equals the id of the interface edge it crosses.
    pub dual_edges: Vec<usize>,
    pub segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneRung {
    pub walls: [usize; 2],
    pub energy: f64,
    pub dual_edges: Vec<usize>,
    pub segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneBox {
    pub label: String,
    pub lo: Coord,
    pub hi: Coord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneLabel {
    pub key: String,
    /// `None` marks an empty family.
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub name: String,
    pub lattice: LatticeJson,
    pub interface_edges: Vec<usize>,
    /// Primal endpoints of each interface edge, in the same order.
    pub interface_segments: Vec<[Coord; 2]>,
    pub walls: Vec<SceneWall>,
    pub rungs: Vec<SceneRung>,
    pub boxes: Vec<SceneBox>,
    pub labels: Vec<SceneLabel>,
}

fn segments(dual: &DualGraph, edges: &[usize]) -> Vec<Segment> {
    edges
        .iter()
        .map(|&d| {
            let [a, b] = dual.edge(d);
            [dual.position(a), dual.position(b)]
        })
        .collect()
}

/// Scene of the interface between two configurations.
pub fn pair_scene(name: &str, lattice: &Lattice, sigma: &SpinConfig, sigma_prime: &SpinConfig) -> Result<Scene> {
    let dual = lattice.build_dual()?;
    let iface = interface(lattice, sigma, sigma_prime)?;
    let dec = decompose(lattice, &dual, &iface)?;
    let walls = dec
        .walls
        .iter()
        .map(|w| SceneWall {
            id: w.id,
            tethered: w.tethered,
            dual_edges: w.dual_edges.clone(),
            segments: segments(&dual, &w.dual_edges),
        })
        .collect();
    let interface_segments = iface
        .iter()
        .map(|&e| {
            let [u, v] = lattice.edge(e);
            [lattice.coord(u), lattice.coord(v)]
        })
        .collect();
    Ok(Scene {
        name: name.into(),
        lattice: lattice.to_json(),
        interface_edges: iface,
        interface_segments,
        walls,
        rungs: Vec::new(),
        boxes: Vec::new(),
        labels: Vec::new(),
    })
}

/// Lattice only.
pub fn empty_scene(lattice: &Lattice) -> Result<Scene> {
    let s = SpinConfig::all_plus(lattice);
    pair_scene("empty", lattice, &s, &s.flipped())
}

/// First replica pair, scanning seeds derived from `seed`, whose interface
/// has exactly two tethered walls.
pub fn tethered_pair_scene(built: &Built, strategy: BcStrategy, seed: u64, attempts: usize) -> Result<Scene> {
    for i in 0..attempts {
        let (_, s, t) = replica_pair(built, strategy, derive_seed(seed, i as u64))?;
        let scene = pair_scene("tethered-pair", &built.lattice, &s, &t)?;
        if scene.walls.iter().filter(|w| w.tethered).count() == 2 {
            return Ok(scene);
        }
    }
    Err(LabError::Sizing(format!("no pair with exactly two tethered walls in {attempts} attempts")))
}

/// First replica pair with at least one rung between `(j,l)`-walls, drawn
/// with the shortest rung touching wall 0 highlighted and `(I, I′, Ĩ)` for
/// its first dual edge.
pub fn rung_scene(
    built: &Built,
    strategy: BcStrategy,
    seed: u64,
    box_j: &Rect,
    box_l: &Rect,
    max_len: usize,
    attempts: usize,
) -> Result<(Scene, RungCatalog)> {
    let dual = built.lattice.build_dual()?;
    for i in 0..attempts {
        let (j, s, t) = replica_pair(built, strategy, derive_seed(seed, i as u64))?;
        let iface = interface(&built.lattice, &s, &t)?;
        let cat = enumerate_rungs(&built.lattice, &dual, &iface, &j, &s, box_j, box_l, max_len)?;
        let Some(best) = cat
            .rungs
            .iter()
            .filter(|r| r.walls[0] == 0)
            .min_by(|a, b| a.energy.total_cmp(&b.energy).then(a.dual_vertices.cmp(&b.dual_vertices)))
        else {
            continue;
        };
        let mut scene = pair_scene("rung", &built.lattice, &s, &t)?;
        let f = best.dual_edges[0];
        let inf = rung_infima(&cat.rungs, 0, f);
        scene.rungs = vec![SceneRung {
            walls: best.walls,
            energy: best.energy,
            dual_edges: best.dual_edges.clone(),
            segments: segments(&dual, &best.dual_edges),
        }];
        scene.boxes = vec![
            SceneBox { label: "j".into(), lo: box_j.lo, hi: box_j.hi },
            SceneBox { label: "l".into(), lo: box_l.lo, hi: box_l.hi },
        ];
        scene.labels = vec![
            SceneLabel { key: "I".into(), value: inf.i },
            SceneLabel { key: "I'".into(), value: inf.i_prime },
            SceneLabel { key: "I~".into(), value: inf.i_tilde },
        ];
        return Ok((scene, cat));
    }
    Err(LabError::Sizing(format!("no pair with a rung of length <= {max_len} in {attempts} attempts")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{RegionSpec, Setup};
    use crate::lattice::LatticeSpec;

    #[test]
    fn empty_scene_has_no_walls() {
        let l = LatticeSpec::boxed(3, 3).build().unwrap();
        let s = empty_scene(&l).unwrap();
        assert!(s.walls.is_empty() && s.interface_edges.is_empty());
        assert_eq!(s.lattice.vertices.len(), 9);
    }

    #[test]
    fn wall_segments_cross_interface_edges() {
        let built = Setup::new(LatticeSpec::halfplane_strip(8, 6), RegionSpec::Bulk, RegionSpec::Bulk).build().unwrap();
        let scene = tethered_pair_scene(&built, BcStrategy::Independent, 1, 500).unwrap();
        assert_eq!(scene.walls.iter().filter(|w| w.tethered).count(), 2);
        for w in &scene.walls {
            for (d, seg) in w.dual_edges.iter().zip(&w.segments) {
                let i = scene.interface_edges.iter().position(|e| e == d).expect("drawn edge is an interface edge");
                let [p, q] = scene.interface_segments[i];
                // the dual segment and the primal edge share their midpoint
                let mid = [(seg[0][0] + seg[1][0]) / 2.0, (seg[0][1] + seg[1][1]) / 2.0];
                assert_eq!(mid, [(p[0] + q[0]) as f64 / 2.0, (p[1] + q[1]) as f64 / 2.0]);
            }
        }
    }
}
