//! Interfaces between two spin configurations seen on the dual lattice:
//! domain walls, tethered walls, parity of cycles, and rungs between walls.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::couplings::CouplingConfig;
use crate::error::{LabError, Result};
use crate::groundstate::SpinConfig;
use crate::lattice::{DualGraph, Lattice, LatticeKind, Orientation, Rect};
use crate::tolerance::MAX_RUNG_LEN;

/// Primal edges where the bond products of the two configurations differ.
pub fn interface(lattice: &Lattice, sigma: &SpinConfig, sigma2: &SpinConfig) -> Result<Vec<usize>> {
    sigma.check_lattice(lattice)?;
    sigma2.check_lattice(lattice)?;
    Ok((0..lattice.num_edges()).filter(|&e| sigma.bond(lattice, e) != sigma2.bond(lattice, e)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainWall {
    pub id: usize,
    /// Dual edge ids, equal to the ids of the primal edges they cross.
    pub dual_edges: Vec<usize>,
    pub dual_vertices: Vec<usize>,
    pub tethered: bool,
    /// Number of dual edges crossing the bottom row.
    pub axis_crossings: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SanityReport {
    /// Sum over walls of independent cycles (edges − vertices + 1).
    pub loops: usize,
    /// Interior dual vertices of interface degree 1.
    pub dangling: usize,
    /// Interface degree → number of interior dual vertices with it.
    pub branch_hist: BTreeMap<usize, usize>,
    /// Walls crossing the bottom row more than once.
    pub multi_crossing: usize,
}

impl SanityReport {
    pub fn is_clean(&self) -> bool {
        self.loops == 0 && self.dangling == 0 && self.multi_crossing == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterfaceDecomposition {
    pub interface_edges: Vec<usize>,
    pub walls: Vec<DomainWall>,
    pub sanity: SanityReport,
}

/// Dual edge of a bottom-row horizontal primal edge on a strip: the wall
/// enters the lattice from below the free bottom boundary.
fn crosses_axis(lattice: &Lattice, e: usize) -> bool {
    if lattice.kind() != LatticeKind::HalfplaneStrip {
        return false;
    }
    let (lower, o) = lattice.edge_geometry(e);
    o == Orientation::Horizontal && lower[1] == lattice.bounds().0[1]
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Components of a set of dual edges, each sorted, ordered by smallest edge.
fn components(dual: &DualGraph, edges: &[usize]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(dual.num_vertices());
    for &d in edges {
        let [a, b] = dual.edge(d);
        uf.union(a, b);
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &d in edges {
        let r = uf.find(dual.edge(d)[0]);
        by_root.entry(r).or_default().push(d);
    }
    let mut comps: Vec<Vec<usize>> = by_root.into_values().map(|mut c| {
        c.sort_unstable();
        c
    }).collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

pub fn decompose(lattice: &Lattice, dual: &DualGraph, interface_edges: &[usize]) -> Result<InterfaceDecomposition> {
    for &e in interface_edges {
        lattice.check_edge(e)?;
    }
    let mut edges = interface_edges.to_vec();
    edges.sort_unstable();
    edges.dedup();
    let mut degree: HashMap<usize, usize> = HashMap::new();
    for &d in &edges {
        for v in dual.edge(d) {
            *degree.entry(v).or_default() += 1;
        }
    }
    let mut sanity = SanityReport::default();
    for (&v, &deg) in &degree {
        if !dual.is_outer(v) {
            *sanity.branch_hist.entry(deg).or_default() += 1;
            if deg == 1 {
                sanity.dangling += 1;
            }
        }
    }
    let walls: Vec<DomainWall> = components(dual, &edges)
        .into_iter()
        .enumerate()
        .map(|(id, dual_edges)| {
            let mut dual_vertices: Vec<usize> = dual_edges.iter().flat_map(|&d| dual.edge(d)).collect();
            dual_vertices.sort_unstable();
            dual_vertices.dedup();
            let axis_crossings = dual_edges.iter().filter(|&&d| crosses_axis(lattice, dual.primal_of(d))).count();
            sanity.loops += dual_edges.len() + 1 - dual_vertices.len();
            if axis_crossings > 1 {
                sanity.multi_crossing += 1;
            }
            DomainWall { id, dual_edges, dual_vertices, tethered: axis_crossings > 0, axis_crossings }
        })
        .collect();
    Ok(InterfaceDecomposition { interface_edges: edges, walls, sanity })
}

/// `N_{n,k}`: tethered walls containing the dual of a horizontal edge
/// `{(x,k),(x+1,k)}` with `−n ≤ x < n`.
pub fn count_tethered(lattice: &Lattice, decomposition: &InterfaceDecomposition, n: i64, k: i64) -> Result<usize> {
    let mut seg = Vec::new();
    for x in -n..n {
        let e = lattice.edge_at([x, k], [x + 1, k]).ok_or_else(|| {
            LabError::Sizing(format!("segment [-{n},{n}]x{{{k}}} leaves the lattice {}", lattice.spec()))
        })?;
        seg.push(e);
    }
    Ok(decomposition
        .walls
        .iter()
        .filter(|w| w.tethered && seg.iter().any(|e| w.dual_edges.binary_search(e).is_ok()))
        .count())
}

/// Whether the parity of negative couplings on a cycle equals the parity of
/// unsatisfied edges on it. Any nonempty even-degree edge set is accepted.
pub fn parity_check(lattice: &Lattice, j: &CouplingConfig, sigma: &SpinConfig, cycle: &[usize]) -> Result<bool> {
    sigma.check_lattice(lattice)?;
    j.check_lattice(lattice)?;
    if cycle.is_empty() {
        return Err(LabError::Structural("empty cycle".into()));
    }
    let mut degree: HashMap<usize, usize> = HashMap::new();
    for &e in cycle {
        lattice.check_edge(e)?;
        for v in lattice.edge(e) {
            *degree.entry(v).or_default() += 1;
        }
    }
    if degree.values().any(|d| d % 2 == 1) {
        return Err(LabError::Structural("edge list is not a closed cycle".into()));
    }
    let negative = cycle.iter().filter(|&&e| j.get(e) < 0.0).count();
    let unsatisfied = cycle.iter().filter(|&&e| j.get(e) * (sigma.bond(lattice, e) as f64) < 0.0).count();
    Ok(negative % 2 == unsatisfied % 2)
}

/// Interface edges seen inside `box_j`, grouped by connectivity inside `box_l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxedWall {
    pub id: usize,
    pub dual_edges: Vec<usize>,
    pub dual_vertices: Vec<usize>,
}

fn edge_in(dual: &DualGraph, r: &Rect, d: usize) -> bool {
    dual.edge(d).iter().all(|&v| r.contains_dual(dual.doubled(v)))
}

/// `(j,l)`-walls: interface dual edges inside `box_j`, two of them in the
/// same wall when they connect through interface edges inside `box_l`.
pub fn boxed_walls(dual: &DualGraph, interface_edges: &[usize], box_j: &Rect, box_l: &Rect) -> Result<Vec<BoxedWall>> {
    if !box_l.contains_rect(box_j) {
        return Err(LabError::Precondition("box_l must contain box_j".into()));
    }
    let in_l: Vec<usize> = interface_edges.iter().copied().filter(|&d| edge_in(dual, box_l, d)).collect();
    let mut walls = Vec::new();
    for comp in components(dual, &in_l) {
        let dual_edges: Vec<usize> = comp.into_iter().filter(|&d| edge_in(dual, box_j, d)).collect();
        if dual_edges.is_empty() {
            continue;
        }
        let mut dual_vertices: Vec<usize> = dual_edges.iter().flat_map(|&d| dual.edge(d)).collect();
        dual_vertices.sort_unstable();
        dual_vertices.dedup();
        walls.push(BoxedWall { id: walls.len(), dual_edges, dual_vertices });
    }
    Ok(walls)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub dual_vertices: Vec<usize>,
    pub dual_edges: Vec<usize>,
    /// The two walls joined, smaller id first.
    pub walls: [usize; 2],
    /// `Σ J_e σ_e` over crossed primal edges.
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RungCatalog {
    pub box_j: Rect,
    pub box_l: Rect,
    pub max_len: usize,
    pub walls: Vec<BoxedWall>,
    pub rungs: Vec<Rung>,
}

/// All self-avoiding dual paths of length `1..=max_len` inside `box_j`
/// joining two distinct `(j,l)`-walls, avoiding interface edges and touching
/// walls only at their two ends.
#[allow(clippy::too_many_arguments)]
pub fn enumerate_rungs(
    lattice: &Lattice,
    dual: &DualGraph,
    interface_edges: &[usize],
    j: &CouplingConfig,
    sigma: &SpinConfig,
    box_j: &Rect,
    box_l: &Rect,
    max_len: usize,
) -> Result<RungCatalog> {
    if max_len > MAX_RUNG_LEN {
        return Err(LabError::Sizing(format!("rung length {max_len} exceeds {MAX_RUNG_LEN}")));
    }
    j.check_lattice(lattice)?;
    sigma.check_lattice(lattice)?;
    let walls = boxed_walls(dual, interface_edges, box_j, box_l)?;
    let mut wall_of = vec![usize::MAX; dual.num_vertices()];
    for w in &walls {
        for &v in &w.dual_vertices {
            wall_of[v] = w.id;
        }
    }
    let mut in_interface = vec![false; dual.num_edges()];
    for &d in interface_edges {
        in_interface[d] = true;
    }
    let usable: Vec<bool> = (0..dual.num_edges()).map(|d| !in_interface[d] && edge_in(dual, box_j, d)).collect();
    let weight = |d: usize| {
        let e = dual.primal_of(d);
        j.get(e) * sigma.bond(lattice, e) as f64
    };

    let starts: Vec<usize> = if walls.len() < 2 {
        Vec::new()
    } else {
        walls.iter().flat_map(|w| w.dual_vertices.iter().copied()).collect()
    };
    let mut rungs: Vec<Rung> = starts
        .par_iter()
        .flat_map_iter(|&s| {
            let mut out = Vec::new();
            let mut path_v = vec![s];
            let mut path_e = Vec::new();
            let mut on_path = vec![false; dual.num_vertices()];
            on_path[s] = true;
            dfs(dual, &usable, &wall_of, max_len, &mut path_v, &mut path_e, &mut on_path, &mut |pv, pe| {
                let (a, b) = (wall_of[pv[0]], wall_of[*pv.last().unwrap()]);
                // each undirected path once: from its smaller end vertex
                if pv[0] < *pv.last().unwrap() {
                    out.push(Rung {
                        dual_vertices: pv.to_vec(),
                        dual_edges: pe.to_vec(),
                        walls: [a.min(b), a.max(b)],
                        energy: pe.iter().map(|&d| weight(d)).sum(),
                    });
                }
            });
            out
        })
        .collect();
    rungs.sort_by(|a, b| a.dual_vertices.cmp(&b.dual_vertices));
    Ok(RungCatalog { box_j: *box_j, box_l: *box_l, max_len, walls, rungs })
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    dual: &DualGraph,
    usable: &[bool],
    wall_of: &[usize],
    max_len: usize,
    path_v: &mut Vec<usize>,
    path_e: &mut Vec<usize>,
    on_path: &mut [bool],
    emit: &mut dyn FnMut(&[usize], &[usize]),
) {
    if path_e.len() == max_len {
        return;
    }
    let v = *path_v.last().unwrap();
    let start_wall = wall_of[path_v[0]];
    for &d in dual.incident(v) {
        if !usable[d] {
            continue;
        }
        let w = dual.other_end(d, v);
        if on_path[w] {
            continue;
        }
        path_v.push(w);
        path_e.push(d);
        if wall_of[w] != usize::MAX {
            if wall_of[w] != start_wall {
                emit(path_v, path_e);
            }
        } else {
            on_path[w] = true;
            dfs(dual, usable, wall_of, max_len, path_v, path_e, on_path, emit);
            on_path[w] = false;
        }
        path_v.pop();
        path_e.pop();
    }
}

/// Rung infima; `None` when the family is empty.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RungInfima {
    /// Over rungs touching wall `D₀`.
    pub i: Option<f64>,
    /// Over rungs touching `D₀` that avoid the dual of `f`.
    pub i_prime: Option<f64>,
    /// Over rungs containing the dual of `f`.
    pub i_tilde: Option<f64>,
}

pub fn rung_infima(rungs: &[Rung], d0: usize, f: usize) -> RungInfima {
    let min = |it: &mut dyn Iterator<Item = f64>| it.fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))));
    let touches = |r: &&Rung| r.walls.contains(&d0);
    let has_f = |r: &Rung| r.dual_edges.contains(&f);
    RungInfima {
        i: min(&mut rungs.iter().filter(touches).map(|r| r.energy)),
        i_prime: min(&mut rungs.iter().filter(touches).filter(|r| !has_f(r)).map(|r| r.energy)),
        i_tilde: min(&mut rungs.iter().filter(|r| has_f(r)).map(|r| r.energy)),
    }
}
