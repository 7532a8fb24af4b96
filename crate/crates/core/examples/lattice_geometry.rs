//! Lattices, regions and the planar dual.

use spinglass_lab::lattice::LatticeSpec;

fn main() -> spinglass_lab::Result<()> {
    let strip: LatticeSpec = "strip:6,4".parse()?;
    let l = strip.build()?;
    let (lo, hi) = l.bounds();
    println!("{strip}: {} vertices, {} edges, x in {}..={}, y in {}..={}", l.num_vertices(), l.num_edges(), lo[0], hi[0], lo[1], hi[1]);

    let bulk = l.region_bulk();
    println!("bulk keeps the free bottom row: {} vertices, external boundary {:?}", bulk.len(), l.external_boundary(&bulk)?);

    let faces = l.faces()?;
    println!("{} faces, first {:?}", faces.len(), faces[0]);

    let dual = l.build_dual()?;
    let outer = (0..dual.num_vertices()).filter(|&v| dual.is_outer(v)).count();
    println!("dual: {} vertices ({outer} outer), {} edges", dual.num_vertices(), dual.num_edges());
    let e = l.edge_at([0, 0], [1, 0]).expect("bottom-row edge");
    let [a, b] = dual.edge(e);
    println!("edge {e} {:?}-{:?} is crossed by the dual edge {:?}-{:?}", l.coord(l.edge(e)[0]), l.coord(l.edge(e)[1]), dual.position(a), dual.position(b));
    Ok(())
}
