//! Exact minimization of `H` on a region under a boundary condition.
//!
//! Two exact methods: a Gray-code walk over all free spins with O(1)
//! energy updates, and a frontier dynamic program that sweeps the region
//! column by column (or row by row). Both report an exact tie for the
//! minimum as [`LabError::Degenerate`].

use serde::{Deserialize, Serialize};

use super::{BoundaryCondition, Spin, SpinConfig};
use crate::couplings::CouplingConfig;
use crate::error::{LabError, Result};
use crate::lattice::{Lattice, Region};
use crate::tolerance::{MAX_GRAY_FREE_SPINS, MAX_TRANSFER_FRONTIER};

/// Gray code is preferred up to this many free spins.
const GRAY_PREFERRED: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Auto,
    GrayCode,
    Transfer,
}

impl std::str::FromStr for SolverKind {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SolverKind::Auto),
            "gray" | "gray_code" | "gray-code" => Ok(SolverKind::GrayCode),
            "transfer" => Ok(SolverKind::Transfer),
            _ => Err(LabError::Config(format!("unknown solver `{s}`"))),
        }
    }
}

/// The unique minimizer (under a fixed boundary) or one of the flip pair
/// (under free boundary, anchored at the first region vertex).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    /// Region spins from the minimizer, boundary spins from the condition,
    /// `+1` everywhere else.
    pub config: SpinConfig,
    /// Energy of edges touching the region: internal edges plus, for a fixed
    /// boundary, edges to boundary vertices.
    pub energy: f64,
    /// Under free boundary, the globally flipped partner on the region.
    pub partner: Option<SpinConfig>,
    pub solver: SolverKind,
}

/// The region's spin problem in slot coordinates.
struct Problem {
    region: Vec<usize>,
    /// `(slot_a, slot_b, J)` for edges inside the region.
    couplings: Vec<(usize, usize, f64)>,
    /// Per-slot field from fixed boundary spins.
    field: Vec<f64>,
    /// Slot held at `+1` (free boundary only).
    pinned: Option<usize>,
    base: SpinConfig,
    tol: f64,
}

impl Problem {
    fn new(lattice: &Lattice, j: &CouplingConfig, region: &Region, bc: &BoundaryCondition) -> Result<Self> {
        lattice.check_region(region)?;
        j.check_lattice(lattice)?;
        let n = lattice.num_vertices();
        let mut slot = vec![usize::MAX; n];
        for (i, v) in region.iter().enumerate() {
            slot[v] = i;
        }
        let mut base = SpinConfig::all_plus(lattice);
        let mut fixed = vec![0i8; n];
        if let BoundaryCondition::Fixed(assign) = bc {
            let want = lattice.external_boundary(region)?;
            let mut got: Vec<usize> = assign.iter().map(|(v, _)| *v).collect();
            got.sort_unstable();
            let dup = got.windows(2).any(|w| w[0] == w[1]);
            if dup || got != want {
                return Err(LabError::Structural(
                    "boundary condition must assign exactly the external boundary of the region".into(),
                ));
            }
            for &(v, s) in assign {
                if s != 1 && s != -1 {
                    return Err(LabError::Structural("boundary spins must be +1 or -1".into()));
                }
                fixed[v] = s;
                base.set(v, s);
            }
        }
        let mut couplings = Vec::new();
        let mut field = vec![0.0; region.len()];
        for (e, &[u, v]) in lattice.edges().iter().enumerate() {
            match (slot[u] != usize::MAX, slot[v] != usize::MAX) {
                (true, true) => couplings.push((slot[u], slot[v], j.get(e))),
                (true, false) if fixed[v] != 0 => field[slot[u]] += j.get(e) * fixed[v] as f64,
                (false, true) if fixed[u] != 0 => field[slot[v]] += j.get(e) * fixed[u] as f64,
                _ => {}
            }
        }
        let pinned = (matches!(bc, BoundaryCondition::Free) && !region.is_empty()).then_some(0);
        Ok(Problem { region: region.as_slice().to_vec(), couplings, field, pinned, base, tol: j.tie_tolerance() })
    }

    fn energy(&self, s: &[Spin]) -> f64 {
        let mut e = 0.0;
        for &(a, b, jv) in &self.couplings {
            e -= jv * (s[a] * s[b]) as f64;
        }
        for (a, h) in self.field.iter().enumerate() {
            e -= h * s[a] as f64;
        }
        e
    }

    fn finish(&self, lattice: &Lattice, s: Vec<Spin>, solver: SolverKind) -> GroundState {
        let energy = self.energy(&s);
        let mut config = self.base.clone();
        for (i, &v) in self.region.iter().enumerate() {
            config.set(v, s[i]);
        }
        let partner = self.pinned.map(|_| config.flip_region(&Region::from_indices(self.region.clone())));
        let _ = lattice;
        GroundState { config, energy, partner, solver }
    }

    fn degenerate(&self, gap: f64) -> LabError {
        LabError::Degenerate(format!(
            "two distinct minimizers on a region of {} spins differ in energy by {gap:.3e}",
            self.region.len()
        ))
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.region.len()];
        for &(a, b, jv) in &self.couplings {
            adj[a].push((b, jv));
            adj[b].push((a, jv));
        }
        adj
    }
}

/// Exact ground state with automatic solver choice.
pub fn solve_ground_state(lattice: &Lattice, j: &CouplingConfig, region: &Region, bc: &BoundaryCondition) -> Result<GroundState> {
    solve_with(lattice, j, region, bc, SolverKind::Auto)
}

pub fn solve_with(
    lattice: &Lattice,
    j: &CouplingConfig,
    region: &Region,
    bc: &BoundaryCondition,
    kind: SolverKind,
) -> Result<GroundState> {
    let p = Problem::new(lattice, j, region, bc)?;
    let free = p.region.len() - p.pinned.is_some() as usize;
    let kind = match kind {
        SolverKind::Auto => {
            if free <= GRAY_PREFERRED {
                SolverKind::GrayCode
            } else if lattice.kind().is_planar() && sweep_plan(lattice, &p).1 <= MAX_TRANSFER_FRONTIER {
                SolverKind::Transfer
            } else if free <= MAX_GRAY_FREE_SPINS {
                SolverKind::GrayCode
            } else {
                return Err(LabError::Sizing(format!(
                    "region of {} spins is beyond both exact solvers (frontier {} > {MAX_TRANSFER_FRONTIER})",
                    p.region.len(),
                    sweep_plan(lattice, &p).1
                )));
            }
        }
        k => k,
    };
    let spins = match kind {
        SolverKind::GrayCode => gray_code(&p)?,
        SolverKind::Transfer => transfer(lattice, &p)?,
        SolverKind::Auto => unreachable!(),
    };
    Ok(p.finish(lattice, spins, kind))
}

fn gray_code(p: &Problem) -> Result<Vec<Spin>> {
    let n = p.region.len();
    let order: Vec<usize> = (0..n).filter(|&i| Some(i) != p.pinned).collect();
    let m = order.len();
    if m > MAX_GRAY_FREE_SPINS {
        return Err(LabError::Sizing(format!("{m} free spins exceed the Gray-code cap {MAX_GRAY_FREE_SPINS}")));
    }
    let adj = p.adjacency();
    let mut s: Vec<Spin> = vec![1; n];
    let mut e = p.energy(&s);
    let (mut best, mut best_code) = (e, 0u64);
    let (mut second, mut second_code) = (f64::INFINITY, u64::MAX);
    for i in 1u64..(1u64 << m) {
        let g = order[i.trailing_zeros() as usize];
        let local: f64 = adj[g].iter().map(|&(b, jv)| jv * s[b] as f64).sum::<f64>() + p.field[g];
        e += 2.0 * s[g] as f64 * local;
        s[g] = -s[g];
        let code = i ^ (i >> 1);
        if e < best {
            (second, second_code) = (best, best_code);
            (best, best_code) = (e, code);
        } else if e < second {
            (second, second_code) = (e, code);
        }
    }
    let decode = |code: u64| -> Vec<Spin> {
        let mut s = vec![1; n];
        for (k, &slot) in order.iter().enumerate() {
            if code >> k & 1 == 1 {
                s[slot] = -1;
            }
        }
        s
    };
    let mut sb = decode(best_code);
    if second_code != u64::MAX {
        let ss = decode(second_code);
        let (eb, es) = (p.energy(&sb), p.energy(&ss));
        if (es - eb).abs() <= p.tol {
            return Err(p.degenerate(es - eb));
        }
        if es < eb {
            sb = ss;
        }
    }
    Ok(sb)
}

/// Vertex order for the sweep and its maximum frontier size.
fn sweep_plan(lattice: &Lattice, p: &Problem) -> (Vec<usize>, usize) {
    let by = |swap: bool| {
        let mut order: Vec<usize> = (0..p.region.len()).collect();
        order.sort_by_key(|&i| {
            let [x, y] = lattice.coord(p.region[i]);
            if swap { (y, x) } else { (x, y) }
        });
        let width = frontier_width(p, &order);
        (order, width)
    };
    let a = by(false);
    let b = by(true);
    if b.1 < a.1 { b } else { a }
}

/// Step at which each slot can leave the frontier.
fn last_use(p: &Problem, order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (t, &s) in order.iter().enumerate() {
        pos[s] = t;
    }
    let mut last = pos.clone();
    for &(a, b, _) in &p.couplings {
        let m = pos[a].max(pos[b]);
        last[a] = last[a].max(m);
        last[b] = last[b].max(m);
    }
    last
}

fn frontier_width(p: &Problem, order: &[usize]) -> usize {
    let last = last_use(p, order);
    let mut leave = vec![0usize; order.len()];
    for s in 0..order.len() {
        leave[last[s]] += 1;
    }
    let (mut live, mut width) = (0usize, 0usize);
    for item in leave.iter().take(order.len()) {
        live += 1;
        width = width.max(live);
        live -= item;
    }
    width
}

struct Removal {
    position: usize,
    /// Bit per surviving state: value of the removed spin at the argmin.
    choice: Vec<u64>,
}

fn transfer(lattice: &Lattice, p: &Problem) -> Result<Vec<Spin>> {
    let n = p.region.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (order, width) = sweep_plan(lattice, p);
    if width > MAX_TRANSFER_FRONTIER {
        return Err(LabError::Sizing(format!("sweep frontier {width} exceeds {MAX_TRANSFER_FRONTIER}")));
    }
    let last = last_use(p, &order);
    let adj = p.adjacency();
    let tol = p.tol;

    // frontier[i] = slot held at bit i; bit value 1 means spin -1
    let mut frontier: Vec<usize> = Vec::new();
    let mut energy = vec![0.0f64];
    let mut count = vec![1u32];
    let mut history: Vec<Vec<Removal>> = Vec::with_capacity(n);

    for (t, &v) in order.iter().enumerate() {
        let f = frontier.len();
        let links: Vec<(usize, f64)> = adj[v]
            .iter()
            .filter_map(|&(b, jv)| frontier.iter().position(|&s| s == b).map(|i| (i, jv)))
            .collect();
        let mut ne = vec![f64::INFINITY; 1 << (f + 1)];
        let mut nc = vec![0u32; 1 << (f + 1)];
        for state in 0..(1usize << f) {
            if energy[state].is_infinite() {
                continue;
            }
            for bit in 0..2usize {
                if bit == 1 && p.pinned == Some(v) {
                    continue;
                }
                let sv = if bit == 1 { -1.0 } else { 1.0 };
                let mut c = -p.field[v] * sv;
                for &(i, jv) in &links {
                    let su = if state >> i & 1 == 1 { -1.0 } else { 1.0 };
                    c -= jv * su * sv;
                }
                let idx = state | bit << f;
                ne[idx] = energy[state] + c;
                nc[idx] = count[state];
            }
        }
        frontier.push(v);
        energy = ne;
        count = nc;

        let mut removals = Vec::new();
        // drop slots whose last neighbor has now been added, highest bit first
        let mut i = frontier.len();
        while i > 0 {
            i -= 1;
            if last[frontier[i]] != t {
                continue;
            }
            let size = 1usize << (frontier.len() - 1);
            let mut re = vec![f64::INFINITY; size];
            let mut rc = vec![0u32; size];
            let mut choice = vec![0u64; size.div_ceil(64)];
            let low = (1usize << i) - 1;
            for c in 0..size {
                let s0 = (c & low) | (c & !low) << 1;
                let s1 = s0 | 1 << i;
                let (e0, e1) = (energy[s0], energy[s1]);
                let pick1 = if (e0 - e1).abs() <= tol {
                    rc[c] = count[s0].saturating_add(count[s1]);
                    re[c] = e0.min(e1);
                    e1 < e0
                } else if e1 < e0 {
                    rc[c] = count[s1];
                    re[c] = e1;
                    true
                } else {
                    rc[c] = count[s0];
                    re[c] = e0;
                    false
                };
                if pick1 {
                    choice[c / 64] |= 1 << (c % 64);
                }
            }
            frontier.remove(i);
            energy = re;
            count = rc;
            removals.push(Removal { position: i, choice });
        }
        history.push(removals);
    }

    debug_assert!(frontier.is_empty());
    if count[0] > 1 {
        return Err(p.degenerate(0.0));
    }

    // walk back: undo removals, then the addition, at each step
    let mut spins: Vec<Spin> = vec![1; n];
    let mut state = 0usize;
    let mut size = 0usize;
    for (t, removals) in history.iter().enumerate().rev() {
        for r in removals.iter().rev() {
            let bit = (r.choice[state / 64] >> (state % 64) & 1) as usize;
            let low = (1usize << r.position) - 1;
            state = (state & low) | (state & !low) << 1 | bit << r.position;
            size += 1;
        }
        size -= 1;
        let v = order[t];
        spins[v] = if state >> size & 1 == 1 { -1 } else { 1 };
        state &= (1usize << size) - 1;
    }
    Ok(spins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::DistributionSpec;
    use crate::groundstate::hamiltonian;
    use crate::lattice::LatticeSpec;

    /// Independent oracle: energy of every configuration from the lattice
    /// edge list directly.
    fn brute_force(lattice: &Lattice, j: &CouplingConfig, region: &Region, bc: &BoundaryCondition) -> (f64, f64) {
        let mut base = SpinConfig::all_plus(lattice);
        if let BoundaryCondition::Fixed(a) = bc {
            for &(v, s) in a {
                base.set(v, s);
            }
        }
        let inb: Vec<bool> = (0..lattice.num_vertices())
            .map(|v| region.contains(v) || matches!(bc, BoundaryCondition::Fixed(a) if a.iter().any(|x| x.0 == v)))
            .collect();
        let touched = |u: usize, v: usize| {
            (region.contains(u) || region.contains(v)) && inb[u] && inb[v]
        };
        let r: Vec<usize> = region.iter().collect();
        let mut all = Vec::new();
        for code in 0u64..(1 << r.len()) {
            let mut s = base.clone();
            for (k, &v) in r.iter().enumerate() {
                s.set(v, if code >> k & 1 == 1 { -1 } else { 1 });
            }
            let mut e = 0.0;
            for (idx, &[u, v]) in lattice.edges().iter().enumerate() {
                if touched(u, v) {
                    e -= j.get(idx) * (s.get(u) * s.get(v)) as f64;
                }
            }
            all.push(e);
        }
        all.sort_by(f64::total_cmp);
        // under free boundary the minimum appears twice (flip pair)
        let step = if matches!(bc, BoundaryCondition::Free) { 2 } else { 1 };
        (all[0], all.get(step).copied().unwrap_or(f64::INFINITY))
    }

    #[test]
    fn segment_example() {
        let l = LatticeSpec::segment(3).build().unwrap();
        let j = CouplingConfig::manual(&l, vec![1.5, -2.0]).unwrap();
        let gs = solve_ground_state(&l, &j, &l.region_all(), &BoundaryCondition::Free).unwrap();
        assert_eq!(gs.config.to_string_full(), "++-");
        assert_eq!(gs.energy, -3.5);
        assert_eq!(gs.partner.unwrap().to_string_full(), "--+");
    }

    #[test]
    fn ferromagnet_fixed_minus_boundary() {
        let l = LatticeSpec::boxed(4, 4).build().unwrap();
        let j = CouplingConfig::manual(&l, (0..l.num_edges()).map(|e| 1.0 + 0.01 * e as f64).collect()).unwrap();
        let bulk = l.region_bulk();
        let bc = BoundaryCondition::Fixed(l.external_boundary(&bulk).unwrap().into_iter().map(|v| (v, -1)).collect());
        for kind in [SolverKind::GrayCode, SolverKind::Transfer] {
            let gs = solve_with(&l, &j, &bulk, &bc, kind).unwrap();
            assert!(bulk.iter().all(|v| gs.config.get(v) == -1));
        }
    }

    #[test]
    fn solvers_agree_with_brute_force() {
        for (seed, spec) in [
            (1, LatticeSpec::boxed(3, 3)),
            (2, LatticeSpec::boxed(4, 3)),
            (3, LatticeSpec::halfplane_strip(5, 3)),
            (4, LatticeSpec::segment(9)),
            (5, LatticeSpec::boxed(4, 4)),
        ] {
            let l = spec.build().unwrap();
            let j = CouplingConfig::sample(&l, DistributionSpec::default(), seed).unwrap();
            let bulk = l.region_bulk();
            let mut cases = vec![(l.region_all(), BoundaryCondition::Free)];
            if !bulk.is_empty() {
                let ext = l.external_boundary(&bulk).unwrap();
                let bc = ext.iter().enumerate().map(|(i, &v)| (v, if (i * 7 + seed as usize).is_multiple_of(3) { -1 } else { 1 })).collect();
                cases.push((bulk.clone(), BoundaryCondition::Fixed(bc)));
                cases.push((bulk, BoundaryCondition::Free));
            }
            for (region, bc) in cases {
                let (min, next) = brute_force(&l, &j, &region, &bc);
                assert!(next - min > 1e-9);
                for kind in [SolverKind::GrayCode, SolverKind::Transfer] {
                    let gs = solve_with(&l, &j, &region, &bc, kind).unwrap();
                    assert!((gs.energy - min).abs() < 1e-9, "{kind:?} on {spec}: {} vs {min}", gs.energy);
                }
            }
        }
    }

    #[test]
    fn transfer_handles_large_strip() {
        let l = LatticeSpec::halfplane_strip(16, 8).build().unwrap();
        let j = CouplingConfig::sample(&l, DistributionSpec::default(), 11).unwrap();
        let bulk = l.region_bulk();
        assert!(bulk.len() > MAX_GRAY_FREE_SPINS);
        let ext = l.external_boundary(&bulk).unwrap();
        let bc = BoundaryCondition::Fixed(ext.iter().map(|&v| (v, 1)).collect());
        let gs = solve_ground_state(&l, &j, &bulk, &bc).unwrap();
        assert_eq!(gs.solver, SolverKind::Transfer);
        // any ground state passes the local test on every small window
        let w = l.region_rect([-2, 2], [4, 3]).unwrap();
        assert!(super::super::is_ground_state(&l, &j, &gs.config, &w).unwrap().is_ground_state);
        let _ = hamiltonian(&l, &j, &bulk, &gs.config);
    }

    #[test]
    fn ties_are_reported() {
        let l = LatticeSpec::segment(3).build().unwrap();
        let j = CouplingConfig::manual(&l, vec![1.0, 0.0]).unwrap();
        for kind in [SolverKind::GrayCode, SolverKind::Transfer] {
            let r = solve_with(&l, &j, &l.region_all(), &BoundaryCondition::Free, kind);
            assert!(r.unwrap_err().is_degenerate(), "{kind:?}");
        }
    }

    #[test]
    fn bad_boundary_rejected() {
        let l = LatticeSpec::boxed(4, 4).build().unwrap();
        let j = CouplingConfig::sample(&l, DistributionSpec::default(), 1).unwrap();
        let bulk = l.region_bulk();
        let r = solve_ground_state(&l, &j, &bulk, &BoundaryCondition::Fixed(vec![(0, 1)]));
        assert!(matches!(r, Err(LabError::Structural(_))));
    }

    #[test]
    fn empty_region() {
        let l = LatticeSpec::boxed(2, 2).build().unwrap();
        let j = CouplingConfig::sample(&l, DistributionSpec::default(), 1).unwrap();
        let gs = solve_ground_state(&l, &j, &Region::empty(), &BoundaryCondition::Free).unwrap();
        assert_eq!(gs.energy, 0.0);
    }
}
