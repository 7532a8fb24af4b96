//! Finite lattice substrate: segments, boxes and half-plane strips, with
//! boundary operators, unit faces and the planar dual.
//!
//! Vertices are indexed in lexicographic order of their `(x, y)` coordinates
//! and edges in lexicographic order of `(min endpoint, max endpoint)`, so the
//! same [`LatticeSpec`] always yields the same indexing.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::tolerance::DEFAULT_VERTEX_CAP;

pub type Coord = [i64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Segment,
    Box,
    HalfplaneStrip,
}

impl LatticeKind {
    pub fn is_planar(self) -> bool {
        !matches!(self, LatticeKind::Segment)
    }
}

/// What to build: a kind, its dimensions and a translation of the whole
/// vertex set.
///
/// A half-plane strip of width `w` has `x` running over
/// `-(w/2) ..= w - 1 - w/2` so that `x = 0` sits at its center, and `y`
/// running upward from the free bottom row `y = 0`. Segments live on `y = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub dims: [usize; 2],
    #[serde(default)]
    pub origin: Coord,
}

impl LatticeSpec {
    pub fn segment(len: usize) -> Self {
        LatticeSpec { kind: LatticeKind::Segment, dims: [len, 1], origin: [0, 0] }
    }

    pub fn boxed(width: usize, height: usize) -> Self {
        LatticeSpec { kind: LatticeKind::Box, dims: [width, height], origin: [0, 0] }
    }

    pub fn halfplane_strip(width: usize, height: usize) -> Self {
        LatticeSpec { kind: LatticeKind::HalfplaneStrip, dims: [width, height], origin: [0, 0] }
    }

    pub fn translated(mut self, dx: i64, dy: i64) -> Self {
        self.origin = [self.origin[0] + dx, self.origin[1] + dy];
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.dims[0].saturating_mul(self.dims[1])
    }

    /// Lower-left corner of the vertex set.
    pub fn base(&self) -> Coord {
        let x0 = match self.kind {
            LatticeKind::HalfplaneStrip => -((self.dims[0] / 2) as i64),
            _ => 0,
        };
        [x0 + self.origin[0], self.origin[1]]
    }

    pub fn build(&self) -> Result<Lattice> {
        self.build_with_cap(DEFAULT_VERTEX_CAP)
    }

    pub fn build_with_cap(&self, cap: usize) -> Result<Lattice> {
        Lattice::new(*self, cap)
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LatticeKind::Segment => write!(f, "segment:{}", self.dims[0])?,
            LatticeKind::Box => write!(f, "box:{},{}", self.dims[0], self.dims[1])?,
            LatticeKind::HalfplaneStrip => write!(f, "strip:{},{}", self.dims[0], self.dims[1])?,
        }
        if self.origin != [0, 0] {
            write!(f, "@{},{}", self.origin[0], self.origin[1])?;
        }
        Ok(())
    }
}

impl FromStr for LatticeSpec {
    type Err = LabError;

    /// Parses `segment:L`, `box:W,H`, `strip:W,H` (alias `halfplane:W,H`),
    /// each optionally followed by `@dx,dy`.
    fn from_str(s: &str) -> Result<Self> {
        let (body, origin) = match s.split_once('@') {
            Some((b, o)) => (b, parse_pair_i64(o)?),
            None => (s, [0, 0]),
        };
        let (kind, dims) = body
            .split_once(':')
            .ok_or_else(|| LabError::Config(format!("lattice spec `{s}` needs KIND:DIMS")))?;
        let nums: Vec<usize> = dims
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| LabError::Config(format!("bad lattice dimensions `{dims}`")))?;
        let spec = match (kind, nums.as_slice()) {
            ("segment", [l]) => LatticeSpec::segment(*l),
            ("box", [w, h]) => LatticeSpec::boxed(*w, *h),
            ("strip" | "halfplane" | "halfplane_strip", [w, h]) => LatticeSpec::halfplane_strip(*w, *h),
            _ => return Err(LabError::Config(format!("unknown lattice spec `{s}`"))),
        };
        Ok(spec.translated(origin[0], origin[1]))
    }
}

pub(crate) fn parse_pair_i64(s: &str) -> Result<Coord> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| LabError::Config(format!("expected `a,b`, got `{s}`")))?;
    let a = a.trim().parse().map_err(|_| LabError::Config(format!("bad integer `{a}`")))?;
    let b = b.trim().parse().map_err(|_| LabError::Config(format!("bad integer `{b}`")))?;
    Ok([a, b])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A finite lattice graph. Immutable once built.
#[derive(Clone, Debug)]
pub struct Lattice {
    spec: LatticeSpec,
    coords: Vec<Coord>,
    edges: Vec<[usize; 2]>,
    incident: Vec<Vec<usize>>,
    lookup: HashMap<Coord, usize>,
    faces: Vec<[usize; 4]>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Lattice {
    fn new(spec: LatticeSpec, cap: usize) -> Result<Self> {
        let [w, h] = spec.dims;
        if w == 0 || h == 0 {
            return Err(LabError::Sizing(format!("lattice {spec} has a zero dimension")));
        }
        if spec.kind == LatticeKind::Segment && h != 1 {
            return Err(LabError::Sizing("a segment has height 1".into()));
        }
        if spec.vertex_count() > cap {
            return Err(LabError::Sizing(format!(
                "lattice {spec} has {} vertices, cap is {cap}",
                spec.vertex_count()
            )));
        }
        let base = spec.base();
        let mut coords = Vec::with_capacity(w * h);
        for dx in 0..w as i64 {
            for dy in 0..h as i64 {
                coords.push([base[0] + dx, base[1] + dy]);
            }
        }
        coords.sort_unstable();
        let lookup: HashMap<Coord, usize> = coords.iter().enumerate().map(|(i, c)| (*c, i)).collect();

        let mut edges = Vec::new();
        for (i, c) in coords.iter().enumerate() {
            for step in [[1, 0], [0, 1]] {
                if let Some(&j) = lookup.get(&[c[0] + step[0], c[1] + step[1]]) {
                    edges.push([i.min(j), i.max(j)]);
                }
            }
        }
        edges.sort_unstable();

        let mut incident = vec![Vec::new(); coords.len()];
        for (e, [u, v]) in edges.iter().enumerate() {
            incident[*u].push(e);
            incident[*v].push(e);
        }

        let mut lattice = Lattice { spec, coords, edges, incident, lookup, faces: Vec::new() };
        if spec.kind.is_planar() {
            lattice.faces = lattice.collect_faces();
        }
        Ok(lattice)
    }

    fn collect_faces(&self) -> Vec<[usize; 4]> {
        let mut faces = Vec::new();
        for c in &self.coords {
            let [x, y] = *c;
            let corners = [[x, y], [x + 1, y], [x + 1, y + 1], [x, y + 1]];
            let ids: Option<Vec<usize>> = corners.iter().map(|p| self.vertex_at(*p)).collect();
            let Some(ids) = ids else { continue };
            let cycle = [
                self.edge_between(ids[0], ids[1]),
                self.edge_between(ids[1], ids[2]),
                self.edge_between(ids[3], ids[2]),
                self.edge_between(ids[0], ids[3]),
            ];
            if let [Some(a), Some(b), Some(c), Some(d)] = cycle {
                faces.push([a, b, c, d]);
            }
        }
        faces
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn kind(&self) -> LatticeKind {
        self.spec.kind
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn coord(&self, v: usize) -> Coord {
        self.coords[v]
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn vertex_at(&self, c: Coord) -> Option<usize> {
        self.lookup.get(&c).copied()
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.incident.get(u)?.iter().copied().find(|&e| self.other_end(e, u) == v)
    }

    pub fn edge_at(&self, a: Coord, b: Coord) -> Option<usize> {
        self.edge_between(self.vertex_at(a)?, self.vertex_at(b)?)
    }

    pub fn orientation(&self, e: usize) -> Orientation {
        let [u, v] = self.edges[e];
        if self.coords[u][1] == self.coords[v][1] {
            Orientation::Horizontal
        } else {
            Orientation::Vertical
        }
    }

    /// Lower (or left) endpoint coordinates plus orientation; identifies an
    /// edge by geometry, independent of the lattice it sits in.
    pub fn edge_geometry(&self, e: usize) -> (Coord, Orientation) {
        let [u, v] = self.edges[e];
        (self.coords[u].min(self.coords[v]), self.orientation(e))
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.num_vertices() {
            Ok(())
        } else {
            Err(LabError::Structural(format!("vertex {v} out of range ({} vertices)", self.num_vertices())))
        }
    }

    pub fn check_edge(&self, e: usize) -> Result<()> {
        if e < self.num_edges() {
            Ok(())
        } else {
            Err(LabError::Structural(format!("edge {e} out of range ({} edges)", self.num_edges())))
        }
    }

    /// Smallest and largest coordinates present.
    pub fn bounds(&self) -> (Coord, Coord) {
        let lo = self.coords[0];
        let hi = *self.coords.last().expect("lattice is nonempty");
        let ymin = self.coords.iter().map(|c| c[1]).min().unwrap_or(0);
        let ymax = self.coords.iter().map(|c| c[1]).max().unwrap_or(0);
        ([lo[0], ymin], [hi[0], ymax])
    }

    /// Unit faces, each as four edges in cyclic order (bottom, right, top, left).
    pub fn faces(&self) -> Result<&[[usize; 4]]> {
        if !self.kind().is_planar() {
            return Err(LabError::UnsupportedKind("faces of a segment".into()));
        }
        Ok(&self.faces)
    }

    // ---- regions ----------------------------------------------------------

    pub fn region_all(&self) -> Region {
        Region { vertices: (0..self.num_vertices()).collect() }
    }

    /// Vertices with `x0 <= x < x0 + w` and `y0 <= y < y0 + h`; every such
    /// coordinate must exist.
    pub fn region_rect(&self, corner: Coord, size: [usize; 2]) -> Result<Region> {
        let mut vertices = Vec::with_capacity(size[0] * size[1]);
        for dx in 0..size[0] as i64 {
            for dy in 0..size[1] as i64 {
                let c = [corner[0] + dx, corner[1] + dy];
                let v = self.vertex_at(c).ok_or_else(|| {
                    LabError::Sizing(format!("rectangle {size:?}@{corner:?} leaves the lattice at {c:?}"))
                })?;
                vertices.push(v);
            }
        }
        Ok(Region::from_indices(vertices))
    }

    /// The lattice with its fixed-boundary frame removed: segment ends, the
    /// perimeter of a box, or the sides and top of a half-plane strip (whose
    /// bottom row stays free).
    pub fn region_bulk(&self) -> Region {
        let (lo, hi) = self.bounds();
        let keep = |c: &Coord| match self.kind() {
            LatticeKind::Segment => c[0] > lo[0] && c[0] < hi[0],
            LatticeKind::Box => c[0] > lo[0] && c[0] < hi[0] && c[1] > lo[1] && c[1] < hi[1],
            LatticeKind::HalfplaneStrip => c[0] > lo[0] && c[0] < hi[0] && c[1] < hi[1],
        };
        Region::from_indices(
            self.coords.iter().enumerate().filter(|(_, c)| keep(c)).map(|(i, _)| i).collect(),
        )
    }

    pub fn check_region(&self, region: &Region) -> Result<()> {
        match region.vertices.last() {
            Some(&v) => self.check_vertex(v),
            None => Ok(()),
        }
    }

    /// Edges with exactly one endpoint in `region`.
    pub fn boundary_edges(&self, region: &Region) -> Result<Vec<usize>> {
        self.check_region(region)?;
        let mask = region.mask(self.num_vertices());
        Ok((0..self.num_edges())
            .filter(|&e| {
                let [u, v] = self.edges[e];
                mask[u] != mask[v]
            })
            .collect())
    }

    /// Vertices outside `region` adjacent to it.
    pub fn external_boundary(&self, region: &Region) -> Result<Vec<usize>> {
        self.check_region(region)?;
        let mask = region.mask(self.num_vertices());
        let mut out: Vec<usize> = region
            .iter()
            .flat_map(|v| self.incident[v].iter().map(move |&e| (e, v)))
            .map(|(e, v)| self.other_end(e, v))
            .filter(|&u| !mask[u])
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub fn build_dual(&self) -> Result<DualGraph> {
        DualGraph::new(self)
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            kind: self.spec.kind,
            dims: self.spec.dims,
            origin: self.spec.origin,
            vertices: self.coords.clone(),
            edges: self.edges.clone(),
        }
    }

    /// Rebuilds from a serialization, rejecting any mismatch with the
    /// canonical construction.
    pub fn from_json(json: &LatticeJson) -> Result<Self> {
        let spec = LatticeSpec { kind: json.kind, dims: json.dims, origin: json.origin };
        let cap = spec.vertex_count().max(DEFAULT_VERTEX_CAP);
        let lattice = spec.build_with_cap(cap)?;
        if lattice.coords != json.vertices || lattice.edges != json.edges {
            return Err(LabError::Structural("lattice serialization is not canonical".into()));
        }
        Ok(lattice)
    }
}

/// Canonical JSON form: `{kind, dims, origin, vertices, edges}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub kind: LatticeKind,
    pub dims: [usize; 2],
    #[serde(default)]
    pub origin: Coord,
    pub vertices: Vec<Coord>,
    pub edges: Vec<[usize; 2]>,
}

/// A set of vertex indices, kept sorted and deduplicated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region {
    vertices: Vec<usize>,
}

impl Region {
    pub fn from_indices(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        Region { vertices }
    }

    pub fn empty() -> Self {
        Region::default()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.vertices
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.vertices {
            if v < n {
                m[v] = true;
            }
        }
        m
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.vertices.iter().all(|&v| other.contains(v))
    }

    /// `other ∖ self`.
    pub fn complement_in(&self, other: &Region) -> Region {
        Region { vertices: other.vertices.iter().copied().filter(|&v| !self.contains(v)).collect() }
    }
}

impl FromIterator<usize> for Region {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Region::from_indices(iter.into_iter().collect())
    }
}

/// Closed primal rectangle `[x0, x1] × [y0, y1]`, used to cut dual objects.
/// A dual vertex lies in the rectangle when it is strictly inside, i.e. its
/// face is fully contained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: Coord,
    pub hi: Coord,
}

impl Rect {
    pub fn new(lo: Coord, hi: Coord) -> Self {
        Rect { lo, hi }
    }

    /// Square of half-width `r` around `center`.
    pub fn centered(center: Coord, r: i64) -> Self {
        Rect { lo: [center[0] - r, center[1] - r], hi: [center[0] + r, center[1] + r] }
    }

    pub fn contains(&self, c: Coord) -> bool {
        (self.lo[0]..=self.hi[0]).contains(&c[0]) && (self.lo[1]..=self.hi[1]).contains(&c[1])
    }

    pub fn contains_dual(&self, doubled: Coord) -> bool {
        doubled[0] > 2 * self.lo[0]
            && doubled[0] < 2 * self.hi[0]
            && doubled[1] > 2 * self.lo[1]
            && doubled[1] < 2 * self.hi[1]
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.contains(other.lo) && self.contains(other.hi)
    }
}

impl FromStr for Rect {
    type Err = LabError;

    /// `x0,y0:x1,y1`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| LabError::Config(format!("rectangle `{s}` needs x0,y0:x1,y1")))?;
        Ok(Rect::new(parse_pair_i64(a)?, parse_pair_i64(b)?))
    }
}

/// Planar dual. Dual vertices are stored in doubled coordinates, so the face
/// center `(x + 1/2, y + 1/2)` is `(2x + 1, 2y + 1)`. Every boundary primal
/// edge gets its own outer dual vertex. Dual edge `i` crosses primal edge `i`.
#[derive(Clone, Debug)]
pub struct DualGraph {
    vertices: Vec<Coord>,
    outer: Vec<bool>,
    edges: Vec<[usize; 2]>,
    incident: Vec<Vec<usize>>,
    lookup: HashMap<Coord, usize>,
}

impl DualGraph {
    fn new(lattice: &Lattice) -> Result<Self> {
        if !lattice.kind().is_planar() {
            return Err(LabError::UnsupportedKind("dual of a segment".into()));
        }
        let mut ends = Vec::with_capacity(lattice.num_edges());
        for e in 0..lattice.num_edges() {
            let ([x, y], o) = lattice.edge_geometry(e);
            let pair = match o {
                Orientation::Horizontal => [[2 * x + 1, 2 * y - 1], [2 * x + 1, 2 * y + 1]],
                Orientation::Vertical => [[2 * x - 1, 2 * y + 1], [2 * x + 1, 2 * y + 1]],
            };
            ends.push(pair);
        }
        let mut vertices: Vec<Coord> = ends.iter().flatten().copied().collect();
        vertices.sort_unstable();
        vertices.dedup();
        let lookup: HashMap<Coord, usize> = vertices.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let face_centers: std::collections::HashSet<Coord> = lattice
            .faces
            .iter()
            .map(|f| {
                let (c, _) = lattice.edge_geometry(f[0]);
                [2 * c[0] + 1, 2 * c[1] + 1]
            })
            .collect();
        let outer = vertices.iter().map(|c| !face_centers.contains(c)).collect();
        let edges: Vec<[usize; 2]> = ends.iter().map(|[a, b]| [lookup[a], lookup[b]]).collect();
        let mut incident = vec![Vec::new(); vertices.len()];
        for (i, [a, b]) in edges.iter().enumerate() {
            incident[*a].push(i);
            incident[*b].push(i);
        }
        Ok(DualGraph { vertices, outer, edges, incident, lookup })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn doubled(&self, v: usize) -> Coord {
        self.vertices[v]
    }

    pub fn position(&self, v: usize) -> [f64; 2] {
        let c = self.vertices[v];
        [c[0] as f64 / 2.0, c[1] as f64 / 2.0]
    }

    pub fn is_outer(&self, v: usize) -> bool {
        self.outer[v]
    }

    pub fn edge(&self, d: usize) -> [usize; 2] {
        self.edges[d]
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn other_end(&self, d: usize, v: usize) -> usize {
        let [a, b] = self.edges[d];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn vertex_at_doubled(&self, c: Coord) -> Option<usize> {
        self.lookup.get(&c).copied()
    }

    /// Dual edge crossing primal edge `e`.
    pub fn dual_of(&self, e: usize) -> usize {
        e
    }

    /// Primal edge crossed by dual edge `d`.
    pub fn primal_of(&self, d: usize) -> usize {
        d
    }

    /// Dual orientation is perpendicular to the primal one.
    pub fn orientation(&self, d: usize) -> Orientation {
        let [a, b] = self.edges[d];
        if self.vertices[a][1] == self.vertices[b][1] {
            Orientation::Horizontal
        } else {
            Orientation::Vertical
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_counts() {
        let l = LatticeSpec::segment(3).build().unwrap();
        assert_eq!((l.num_vertices(), l.num_edges()), (3, 2));
        assert!(l.faces().is_err());
    }

    #[test]
    fn box_counts() {
        let l = LatticeSpec::boxed(2, 2).build().unwrap();
        assert_eq!((l.num_vertices(), l.num_edges(), l.faces().unwrap().len()), (4, 4, 1));
        let l = LatticeSpec::boxed(4, 3).build().unwrap();
        assert_eq!((l.num_vertices(), l.num_edges(), l.faces().unwrap().len()), (12, 17, 6));
        assert_eq!(LatticeSpec::boxed(3, 3).build().unwrap().faces().unwrap().len(), 4);
        assert_eq!(LatticeSpec::boxed(5, 2).build().unwrap().faces().unwrap().len(), 4);
    }

    #[test]
    fn sizing_errors() {
        assert!(matches!(LatticeSpec::boxed(0, 3).build(), Err(LabError::Sizing(_))));
        assert!(matches!(LatticeSpec::boxed(40, 40).build(), Err(LabError::Sizing(_))));
        assert!(LatticeSpec::boxed(40, 40).build_with_cap(1600).is_ok());
    }

    #[test]
    fn faces_are_cycles() {
        let l = LatticeSpec::boxed(4, 3).build().unwrap();
        for f in l.faces().unwrap() {
            let mut deg = HashMap::new();
            for &e in f {
                for v in l.edge(e) {
                    *deg.entry(v).or_insert(0) += 1;
                }
            }
            assert_eq!(deg.len(), 4);
            assert!(deg.values().all(|&d| d == 2));
            // consecutive edges share a vertex
            for i in 0..4 {
                let a = l.edge(f[i]);
                let b = l.edge(f[(i + 1) % 4]);
                assert!(a.iter().any(|v| b.contains(v)));
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let l = LatticeSpec::boxed(3, 3).build().unwrap();
        assert!(l.boundary_edges(&l.region_all()).unwrap().is_empty());
        let center = l.vertex_at([1, 1]).unwrap();
        let b = l.boundary_edges(&Region::from_indices(vec![center])).unwrap();
        assert_eq!(b, {
            let mut v = l.incident(center).to_vec();
            v.sort();
            v
        });

        let l = LatticeSpec::boxed(4, 4).build().unwrap();
        let pair = Region::from_indices(vec![l.vertex_at([1, 1]).unwrap(), l.vertex_at([2, 1]).unwrap()]);
        assert_eq!(l.boundary_edges(&pair).unwrap().len(), 6);

        assert!(matches!(
            l.boundary_edges(&Region::from_indices(vec![99])),
            Err(LabError::Structural(_))
        ));
    }

    #[test]
    fn dual_examples() {
        let l = LatticeSpec::boxed(2, 2).build().unwrap();
        let d = l.build_dual().unwrap();
        assert_eq!(d.num_edges(), 4);
        assert_eq!((0..d.num_vertices()).filter(|&v| !d.is_outer(v)).count(), 1);
        for e in 0..l.num_edges() {
            assert_ne!(l.orientation(e), d.orientation(d.dual_of(e)));
        }

        let s = LatticeSpec::halfplane_strip(3, 2).build().unwrap();
        let d = s.build_dual().unwrap();
        let bottom = (0..s.num_edges())
            .find(|&e| s.orientation(e) == Orientation::Horizontal && s.edge_geometry(e).0[1] == 0)
            .unwrap();
        let [a, b] = d.edge(d.dual_of(bottom));
        assert!(d.position(a)[1] < 0.0 || d.position(b)[1] < 0.0);

        assert!(matches!(LatticeSpec::segment(4).build().unwrap().build_dual(), Err(LabError::UnsupportedKind(_))));
    }

    #[test]
    fn strip_is_centered() {
        let s = LatticeSpec::halfplane_strip(16, 8).build().unwrap();
        let (lo, hi) = s.bounds();
        assert_eq!((lo, hi), ([-8, 0], [7, 7]));
    }

    #[test]
    fn bulk_regions() {
        let l = LatticeSpec::boxed(5, 5).build().unwrap();
        let bulk = l.region_bulk();
        assert_eq!(bulk.len(), 9);
        assert_eq!(l.external_boundary(&bulk).unwrap().len(), 12);
        let s = LatticeSpec::halfplane_strip(8, 6).build().unwrap();
        let bulk = s.region_bulk();
        assert_eq!(bulk.len(), 30);
        assert_eq!(s.external_boundary(&bulk).unwrap().len(), 16);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("box:4,3".parse::<LatticeSpec>().unwrap(), LatticeSpec::boxed(4, 3));
        assert_eq!("segment:8".parse::<LatticeSpec>().unwrap(), LatticeSpec::segment(8));
        assert_eq!(
            "strip:16,8@1,0".parse::<LatticeSpec>().unwrap(),
            LatticeSpec::halfplane_strip(16, 8).translated(1, 0)
        );
        assert!("torus:3".parse::<LatticeSpec>().is_err());
        let spec = LatticeSpec::boxed(3, 2).translated(-1, 4);
        assert_eq!(spec.to_string().parse::<LatticeSpec>().unwrap(), spec);
    }

    #[test]
    fn serialization_is_canonical() {
        let l = LatticeSpec::boxed(3, 4).build().unwrap();
        let a = serde_json::to_string(&l.to_json()).unwrap();
        let b = serde_json::to_string(&LatticeSpec::boxed(3, 4).build().unwrap().to_json()).unwrap();
        assert_eq!(a, b);
        let back: LatticeJson = serde_json::from_str(&a).unwrap();
        assert_eq!(Lattice::from_json(&back).unwrap(), l);
        let mut bad = back.clone();
        bad.edges.swap(0, 1);
        assert!(Lattice::from_json(&bad).is_err());
    }
}
