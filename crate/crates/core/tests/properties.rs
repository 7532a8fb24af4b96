//! Property tests against brute-force oracles and structural invariants.

use proptest::prelude::*;

use spinglass_lab::couplings::CouplingConfig;
use spinglass_lab::criticality::{critical_value, critical_value_bisection, flexibility};
use spinglass_lab::experiments::{wilson_interval, Event, RegionSpec};
use spinglass_lab::groundstate::{
    enumerate_window_ground_states, is_ground_state, solve_with, BoundaryCondition, GroundState, SolverKind, SpinConfig,
};
use spinglass_lab::interface::{interface, parity_check};
use spinglass_lab::lattice::{Lattice, LatticeSpec};

fn energy(l: &Lattice, j: &[f64], spins: &[i8], skip: Option<usize>) -> f64 {
    (0..l.num_edges())
        .filter(|&e| Some(e) != skip)
        .map(|e| {
            let [u, v] = l.edge(e);
            -j[e] * (spins[u] * spins[v]) as f64
        })
        .sum()
}

fn configs(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0u32..1 << n).map(move |m| (0..n).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect())
}

fn spins(l: &Lattice, s: &SpinConfig) -> Vec<i8> {
    (0..l.num_vertices()).map(|v| s.get(v)).collect()
}

fn small_box() -> impl Strategy<Value = (Lattice, Vec<f64>)> {
    (2usize..=4, 2usize..=3).prop_flat_map(|(w, h)| {
        let l = LatticeSpec::boxed(w, h).build().unwrap();
        let n = l.num_edges();
        (Just(l), prop::collection::vec(-2.0f64..2.0, n))
    })
}

fn solve(l: &Lattice, j: &CouplingConfig, kind: SolverKind) -> Option<GroundState> {
    solve_with(l, j, &l.region_all(), &BoundaryCondition::Free, kind).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solvers_match_brute_force((l, vals) in small_box()) {
        let j = CouplingConfig::manual(&l, vals.clone()).unwrap();
        let best = configs(l.num_vertices()).map(|s| energy(&l, &vals, &s, None)).fold(f64::INFINITY, f64::min);
        let gray = solve(&l, &j, SolverKind::GrayCode);
        let transfer = solve(&l, &j, SolverKind::Transfer);
        prop_assume!(gray.is_some() && transfer.is_some());
        let (gray, transfer) = (gray.unwrap(), transfer.unwrap());
        prop_assert!((gray.energy - best).abs() < 1e-9);
        prop_assert!((transfer.energy - best).abs() < 1e-9);
        prop_assert!((energy(&l, &vals, &spins(&l, &gray.config), None) - best).abs() < 1e-9);
        prop_assert!(is_ground_state(&l, &j, &gray.config, &l.region_all()).unwrap().is_ground_state);
    }

    #[test]
    fn critical_value_matches_constrained_minimum((l, vals) in small_box(), pick in 0usize..1000, y in -3.0f64..3.0) {
        let j = CouplingConfig::manual(&l, vals.clone()).unwrap();
        let gs = solve(&l, &j, SolverKind::GrayCode);
        prop_assume!(gs.is_some());
        let sigma = gs.unwrap().config;
        let all = l.region_all();
        let e = pick % l.num_edges();
        let [u, v] = l.edge(e);
        let s = spins(&l, &sigma);
        let b = s[u] * s[v];
        // best energy without e among configurations that reverse the bond
        let rest = configs(l.num_vertices())
            .filter(|t| t[u] * t[v] != b)
            .map(|t| energy(&l, &vals, &t, Some(e)))
            .fold(f64::INFINITY, f64::min);
        let oracle = b as f64 * (energy(&l, &vals, &s, Some(e)) - rest) / 2.0;
        let c = critical_value(&l, &j, &sigma, e, &all).unwrap();
        prop_assert!((c - oracle).abs() < 1e-9, "C_e = {c}, oracle {oracle}");
        prop_assert!((critical_value_bisection(&l, &j, &sigma, e, &all).unwrap() - c).abs() < 1e-6);
        prop_assert!(flexibility(&l, &j, &sigma, e, &all).unwrap() >= 0.0);
        // C_e does not depend on J_e, anywhere sigma stays a ground state
        let moved = j.modify(e, c + b as f64 * (y.abs() + 1e-3)).unwrap();
        prop_assert!((critical_value(&l, &moved, &sigma, e, &all).unwrap() - c).abs() < 1e-9);
    }

    #[test]
    fn interface_is_symmetric_and_flip_invariant((l, _) in small_box(), a in any::<u32>(), b in any::<u32>()) {
        let n = l.num_vertices();
        let cfg = |m: u32| SpinConfig::from_spins(&l, (0..n).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect()).unwrap();
        let (s, t) = (cfg(a), cfg(b));
        let st = interface(&l, &s, &t).unwrap();
        prop_assert_eq!(&st, &interface(&l, &t, &s).unwrap());
        prop_assert_eq!(&st, &interface(&l, &s.flipped(), &t).unwrap());
        prop_assert!(interface(&l, &s, &s.flipped()).unwrap().is_empty());
        for e in st {
            prop_assert_ne!(s.bond(&l, e), t.bond(&l, e));
        }
    }

    #[test]
    fn frustration_parity_holds_on_faces((l, vals) in small_box(), m in any::<u32>()) {
        let j = CouplingConfig::manual(&l, vals).unwrap();
        let n = l.num_vertices();
        let s = SpinConfig::from_spins(&l, (0..n).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect()).unwrap();
        for f in l.faces().unwrap() {
            prop_assert!(parity_check(&l, &j, &s, f).unwrap());
        }
    }

    #[test]
    fn window_states_close_under_flip(seed in any::<u64>()) {
        let l = LatticeSpec::boxed(4, 4).build().unwrap();
        let j = CouplingConfig::sample(&l, Default::default(), seed).unwrap();
        let outer = l.region_bulk();
        let gss = enumerate_window_ground_states(&l, &j, &outer, &outer).unwrap();
        prop_assert!(gss.count >= 2 && gss.count.is_multiple_of(2));
        for (i, s) in gss.states.iter().enumerate() {
            let flipped: String = s.spins.chars().map(|c| if c == '+' { '-' } else { '+' }).collect();
            prop_assert_eq!(&gss.states[s.partner].spins, &flipped);
            prop_assert_eq!(gss.states[s.partner].partner, i);
            let witness = gss.witness_config(&l, i).unwrap();
            prop_assert!(is_ground_state(&l, &j, &witness, &outer).unwrap().is_ground_state);
        }
    }

    #[test]
    fn wilson_interval_covers_estimate(trials in 1usize..5000, frac in 0.0f64..=1.0) {
        let k = ((trials as f64) * frac).round() as usize;
        let (lo, hi) = wilson_interval(k, trials);
        let p = k as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn specs_round_trip(w in 1usize..20, h in 1usize..20, x in -10i64..10, y in -10i64..10, c in -5.0f64..5.0) {
        let region = RegionSpec::Rect { size: [w, h], corner: [x, y] };
        prop_assert_eq!(region.to_string().parse::<RegionSpec>().unwrap(), region);
        let event = Event::CriticalBelow(c);
        prop_assert_eq!(event.to_string().parse::<Event>().unwrap(), event);
        let lattice = LatticeSpec::boxed(w, h).translated(x, y);
        prop_assert_eq!(lattice.to_string().parse::<LatticeSpec>().unwrap(), lattice);
    }
}
