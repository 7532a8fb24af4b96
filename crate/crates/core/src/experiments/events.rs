//! Registered two-replica events and their estimation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_instance, stream, trial_seed, wilson_interval, Built, OmegaRecord, Setup};
use crate::couplings::derive_seed;
use crate::error::{LabError, Result};
use crate::groundstate::UniformMeasure;
use crate::tolerance::INEQ_SLACK;

/// How an event responds to raising `J_e` with the configuration held fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    None,
}

/// Closed catalog of events over an [`OmegaRecord`] and a designated edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Event {
    False,
    True,
    /// No window edge in the interface.
    InterfaceEmpty,
    /// `σ = σ′` on the window.
    ReplicasEqual,
    /// `|C_e − J_e| ≤ 1e-9`.
    CriticalEqualsCoupling,
    /// `σ_e = +1`.
    BondPlus,
    /// `σ_e = −1`.
    BondMinus,
    /// `σ_e = +1` and `C_e < c`.
    CriticalBelow(f64),
    /// `e ∈ σΔσ′`.
    EdgeInInterface,
}

pub const EVENT_NAMES: &[&str] = &[
    "false",
    "true",
    "interface_empty",
    "replicas_equal",
    "critical_equals_coupling",
    "bond_plus",
    "bond_minus",
    "critical_below:C",
    "edge_in_interface",
];

impl Event {
    pub fn monotonicity(&self) -> Monotonicity {
        match self {
            Event::BondPlus | Event::CriticalBelow(_) => Monotonicity::Increasing,
            Event::BondMinus => Monotonicity::Decreasing,
            _ => Monotonicity::None,
        }
    }

    pub fn needs_edge(&self) -> bool {
        !matches!(self, Event::False | Event::True | Event::InterfaceEmpty | Event::ReplicasEqual)
    }

    /// Evaluates on a record; `edge` must be one of the record's edges when
    /// the event needs one.
    pub fn holds(&self, built: &Built, rec: &OmegaRecord, edge: usize) -> bool {
        let l = &built.lattice;
        let slot = || rec.slot(edge).expect("designated edge is declared in the record");
        match *self {
            Event::False => false,
            Event::True => true,
            Event::InterfaceEmpty => {
                built.window_edges.iter().all(|&e| rec.sigma.bond(l, e) == rec.sigma_prime.bond(l, e))
            }
            Event::ReplicasEqual => rec.sigma.restriction(&built.window) == rec.sigma_prime.restriction(&built.window),
            Event::CriticalEqualsCoupling => (rec.c[slot()] - rec.j.get(edge)).abs() <= INEQ_SLACK,
            Event::BondPlus => rec.sigma.bond(l, edge) > 0,
            Event::BondMinus => rec.sigma.bond(l, edge) < 0,
            Event::CriticalBelow(c) => rec.sigma.bond(l, edge) > 0 && rec.c[slot()] < c,
            Event::EdgeInInterface => rec.sigma.bond(l, edge) != rec.sigma_prime.bond(l, edge),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::False => write!(f, "false"),
            Event::True => write!(f, "true"),
            Event::InterfaceEmpty => write!(f, "interface_empty"),
            Event::ReplicasEqual => write!(f, "replicas_equal"),
            Event::CriticalEqualsCoupling => write!(f, "critical_equals_coupling"),
            Event::BondPlus => write!(f, "bond_plus"),
            Event::BondMinus => write!(f, "bond_minus"),
            Event::CriticalBelow(c) => write!(f, "critical_below:{c}"),
            Event::EdgeInInterface => write!(f, "edge_in_interface"),
        }
    }
}

impl FromStr for Event {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "false" => Event::False,
            "true" => Event::True,
            "interface_empty" => Event::InterfaceEmpty,
            "replicas_equal" => Event::ReplicasEqual,
            "critical_equals_coupling" => Event::CriticalEqualsCoupling,
            "bond_plus" => Event::BondPlus,
            "bond_minus" => Event::BondMinus,
            "edge_in_interface" => Event::EdgeInInterface,
            _ => match s.strip_prefix("critical_below:").map(str::parse::<f64>) {
                Some(Ok(c)) if c.is_finite() => Event::CriticalBelow(c),
                _ => {
                    return Err(LabError::Config(format!(
                        "unregistered event `{s}`; known: {}",
                        EVENT_NAMES.join(", ")
                    )))
                }
            },
        })
    }
}

impl Serialize for Event {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Event {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventEstimate {
    pub event: Event,
    pub monotonicity: Monotonicity,
    pub edge: Option<usize>,
    pub trials: usize,
    pub successes: usize,
    pub estimate: f64,
    /// 95% Wilson interval.
    pub interval: [f64; 2],
    /// First seed and number of trials; trial `t` uses `derive_seed(seed, t)`.
    pub seed_range: [u64; 2],
}

/// One two-replica draw: disorder, window ground states, a pair from the
/// uniform measure, and its record over the window edges.
pub(crate) fn draw_record(built: &Built, seed: u64) -> Result<(OmegaRecord, usize)> {
    let inst = sample_instance(built, seed)?;
    let mu = UniformMeasure::new(&inst.gss)?;
    let (a, b) = mu.sample_replica_pair(derive_seed(inst.seed, stream::PAIR));
    let s = inst.gss.witness_config(&built.lattice, a)?;
    let t = inst.gss.witness_config(&built.lattice, b)?;
    let rec = OmegaRecord::build(&built.lattice, inst.j, s, t, built.outer.clone(), built.window_edges.clone())?;
    Ok((rec, inst.gss.count))
}

/// Resolves the designated edge: the given one, or the first window edge.
pub(crate) fn designated_edge(built: &Built, edge: Option<usize>) -> Result<usize> {
    match edge {
        Some(e) if built.window_edges.contains(&e) => Ok(e),
        Some(e) => Err(LabError::Config(format!("edge {e} does not lie inside the window"))),
        None => built
            .window_edges
            .first()
            .copied()
            .ok_or_else(|| LabError::Config("the window contains no edge".into())),
    }
}

pub fn estimate_event(setup: &Setup, event: Event, edge: Option<usize>, trials: usize, seed: u64) -> Result<EventEstimate> {
    if trials == 0 {
        return Err(LabError::Config("trials must be at least 1".into()));
    }
    let built = setup.build()?;
    let e = if event.needs_edge() { Some(designated_edge(&built, edge)?) } else { edge };
    let hits: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (rec, _) = draw_record(&built, trial_seed(seed, t))?;
            Ok(event.holds(&built, &rec, e.unwrap_or(usize::MAX)))
        })
        .collect::<Result<_>>()?;
    let successes = hits.iter().filter(|h| **h).count();
    let estimate = successes as f64 / trials as f64;
    let (lo, hi) = wilson_interval(successes, trials);
    // a certain outcome gets a degenerate interval at the estimate
    let interval = if successes == 0 { [0.0, hi] } else if successes == trials { [lo, 1.0] } else { [lo, hi] };
    Ok(EventEstimate {
        event,
        monotonicity: event.monotonicity(),
        edge: e,
        trials,
        successes,
        estimate,
        interval,
        seed_range: [seed, trials as u64],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::RegionSpec;
    use crate::lattice::LatticeSpec;

    #[test]
    fn event_names_round_trip() {
        for s in ["false", "bond_plus", "critical_below:0.5", "edge_in_interface"] {
            assert_eq!(s.parse::<Event>().unwrap().to_string(), s);
        }
        assert!(matches!("nope".parse::<Event>(), Err(LabError::Config(_))));
        assert_eq!(Event::BondPlus.monotonicity(), Monotonicity::Increasing);
    }

    #[test]
    fn one_dimensional_interface_is_empty() {
        let setup = Setup::new(LatticeSpec::segment(8), RegionSpec::All, RegionSpec::All);
        let est = estimate_event(&setup, Event::InterfaceEmpty, None, 50, 3).unwrap();
        assert_eq!(est.estimate, 1.0);
        let f = estimate_event(&setup, Event::False, None, 20, 3).unwrap();
        assert_eq!((f.successes, f.interval[0]), (0, 0.0));
    }

    #[test]
    fn estimates_are_reproducible() {
        let setup = Setup::new(LatticeSpec::boxed(4, 4), RegionSpec::Bulk, RegionSpec::Bulk);
        let a = estimate_event(&setup, Event::BondPlus, None, 40, 9).unwrap();
        let b = estimate_event(&setup, Event::BondPlus, None, 40, 9).unwrap();
        assert_eq!(a, b);
    }
}
