//! Tolerance ladder and caps shared by every module.
//!
//! The three tolerances are separated by three decades so that a failure can
//! be attributed: a tie audit trip, an inequality slack breach, or an
//! oracle disagreement.

/// Two coupling values or two subset energies closer than this (in units of
/// the distribution scale) count as a tie.
pub const TAU_TIE: f64 = 1e-12;

/// Slack for every "sum >= 0" ground-state or inequality test.
pub const INEQ_SLACK: f64 = 1e-9;

/// Agreement required between two independent routes to the same number.
pub const ORACLE_AGREEMENT: f64 = 1e-6;

/// Default cap on lattice vertex count.
pub const DEFAULT_VERTEX_CAP: usize = 1024;

/// Largest region for exhaustive subset enumeration.
pub const MAX_SUBSET_REGION: usize = 24;

/// Largest number of free spins for the Gray-code solver.
pub const MAX_GRAY_FREE_SPINS: usize = 28;

/// Largest sweep frontier for the transfer-matrix solver.
pub const MAX_TRANSFER_FRONTIER: usize = 20;

/// Largest external boundary for window enumeration.
pub const MAX_BOUNDARY: usize = 16;

/// Largest rung length for dual path enumeration.
pub const MAX_RUNG_LEN: usize = 12;

/// Resampling attempts before the tie audit gives up.
pub const TIE_RETRY_CAP: u32 = 16;

/// Fixed number of bisection steps for the critical-value oracle.
pub const BISECTION_STEPS: usize = 60;

/// Number of Wilson-interval widths allowed before a statistical check fails.
pub const STAT_WIDTHS: f64 = 3.0;
