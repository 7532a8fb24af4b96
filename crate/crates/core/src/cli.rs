//! The `lab` command line. Exit codes: 0 all checks passed, 1 an assertion
//! or verification failed, 2 bad arguments or configuration.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::couplings::{derive_seed, CouplingConfig, DistributionSpec};
use crate::criticality::critical_report;
use crate::error::{LabError, Result};
use crate::experiments::{
    estimate_event, replica_pair, stream, verify_suite, wall_statistics, BcStrategy, Event, RegionSpec, Setup,
    SuiteParams,
};
use crate::groundstate::{enumerate_window_ground_states, solve_with, BoundaryCondition, SolverKind, SpinConfig};
use crate::interface::{decompose, enumerate_rungs, interface, rung_infima};
use crate::lattice::{Lattice, LatticeSpec, Rect, Region};
use crate::report::{unwrap_payload, Envelope, Format, RunConfig};
use crate::scene;

#[derive(Parser, Debug)]
#[command(
    name = "lab",
    version,
    about = "Exact ground states, critical values and domain walls of small Edwards-Anderson spin glasses",
    after_help = "Environment: LAB_THREADS caps the worker pool.\nExit codes: 0 pass, 1 assertion failure, 2 configuration error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the lattice geometry and its faces.
    Build(BuildArgs),
    /// Draw a coupling realization.
    Sample(SampleArgs),
    /// Exact ground state of a region under a boundary condition.
    Solve(SolveArgs),
    /// All window ground states over every boundary condition on the outer region.
    Enumerate(EnumerateArgs),
    /// Critical values, flexibilities and droplets of a ground state.
    Critical(CriticalArgs),
    /// Interface of a replica pair and its domain walls.
    Interface(InterfaceArgs),
    /// Rungs between (j,l)-walls and their infima.
    Rungs(RungsArgs),
    /// Tethered-wall counts N_{n,k} and their subadditivity.
    Walls(WallsArgs),
    /// Estimate the probability of a registered event.
    Estimate(EstimateArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Plot-ready scene JSON.
    RenderData(RenderArgs),
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write the report here instead of stdout; tables also go to the same path with a .csv extension.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct DisorderArgs {
    /// Lattice: segment:L, box:W,H or strip:W,H, optionally @DX,DY.
    #[arg(long)]
    lattice: Option<LatticeSpec>,
    /// Coupling distribution: gaussian:MEAN,SD or uniform:HALFWIDTH.
    #[arg(long, default_value = "gaussian:0,1")]
    dist: DistributionSpec,
    #[arg(long)]
    seed: Option<u64>,
    /// Couplings JSON (bare or inside a report) instead of sampling.
    #[arg(long, value_name = "FILE")]
    couplings: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long, default_value = "box:4,4")]
    lattice: LatticeSpec,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    disorder: DisorderArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum BcMode {
    Free,
    Plus,
    Minus,
    Random,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    disorder: DisorderArgs,
    /// Region: all, bulk or W,H@X,Y.
    #[arg(long, default_value = "all")]
    region: RegionSpec,
    /// Boundary condition on the region's external boundary.
    #[arg(long, value_enum, default_value_t = BcMode::Random)]
    bc: BcMode,
    /// auto, gray or transfer.
    #[arg(long, default_value = "auto")]
    solver: SolverKind,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    disorder: DisorderArgs,
    #[arg(long, default_value = "all")]
    window: RegionSpec,
    #[arg(long, default_value = "all")]
    outer: RegionSpec,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CriticalArgs {
    #[command(flatten)]
    disorder: DisorderArgs,
    #[arg(long, default_value = "all")]
    region: RegionSpec,
    #[arg(long, value_enum, default_value_t = BcMode::Random)]
    bc: BcMode,
    /// Edge given by its endpoint vertex indices.
    #[arg(long, value_name = "U,V", conflicts_with = "all", required_unless_present = "all")]
    edge: Option<String>,
    /// Every edge inside the region, as a table.
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    #[arg(long, default_value = "strip:8,6")]
    lattice: LatticeSpec,
    #[arg(long, default_value = "gaussian:0,1")]
    dist: DistributionSpec,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "bulk")]
    outer: RegionSpec,
    /// enumerated, independent, antipodal or flip.
    #[arg(long, default_value = "independent")]
    strategy: BcStrategy,
}

#[derive(Args, Debug)]
struct InterfaceArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct RungsArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Inner box x0,y0:x1,y1 where walls and rungs are cut.
    #[arg(long = "box-j")]
    box_j: Option<Rect>,
    /// Outer box judging wall connectivity; defaults to the lattice bounds.
    #[arg(long = "box-l")]
    box_l: Option<Rect>,
    #[arg(long, default_value_t = 6)]
    maxlen: usize,
    /// Dual edge f for I′ and Ĩ; defaults to the first edge of the cheapest rung at the wall.
    #[arg(long)]
    edge: Option<usize>,
    /// Reference wall D0.
    #[arg(long, default_value_t = 0)]
    wall: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct WallsArgs {
    #[arg(long, default_value = "strip:16,8")]
    lattice: LatticeSpec,
    #[arg(long, default_value = "gaussian:0,1")]
    dist: DistributionSpec,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "bulk")]
    outer: RegionSpec,
    #[arg(long, default_value = "antipodal")]
    strategy: BcStrategy,
    /// Segment half-lengths: A..B (inclusive), a list A,B,C, or one value.
    #[arg(long, default_value = "1..6")]
    n: String,
    /// Rows of the segments, same grammar as --n.
    #[arg(long, default_value = "0..1")]
    k: String,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Registered event, e.g. bond_plus or critical_below:0.5.
    #[arg(long)]
    event: Event,
    #[arg(long, default_value = "box:4,4")]
    lattice: LatticeSpec,
    #[arg(long, default_value = "gaussian:0,1")]
    dist: DistributionSpec,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "bulk")]
    window: RegionSpec,
    #[arg(long, default_value = "bulk")]
    outer: RegionSpec,
    /// Designated edge index; defaults to the first window edge.
    #[arg(long)]
    edge: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of the suites listed by `lab verify --suite list`.
    #[arg(long)]
    suite: String,
    /// Defaults to the suite's own size.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "gaussian:0,1")]
    dist: DistributionSpec,
    #[arg(long)]
    edge: Option<usize>,
    /// Counterexamples kept in the report.
    #[arg(long, default_value_t = 5)]
    dump_limit: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SceneKind {
    Instance,
    Empty,
    TetheredPair,
    Rung,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long, value_enum)]
    scene: SceneKind,
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long = "box-j")]
    box_j: Option<Rect>,
    #[arg(long = "box-l")]
    box_l: Option<Rect>,
    #[arg(long, default_value_t = 6)]
    maxlen: usize,
    /// Replica pairs tried when searching for a scene.
    #[arg(long, default_value_t = 2000)]
    attempts: usize,
    #[command(flatten)]
    output: OutputArgs,
}

/// Runs one command line (including the program name) and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    match run(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &LabError) -> i32 {
    match e {
        LabError::Verification(_) | LabError::Inconsistent(_) | LabError::Degenerate(_) | LabError::TieAudit { .. } => 1,
        _ => 2,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("LAB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| LabError::Config(format!("LAB_THREADS=`{v}` is not a positive integer")))?;
    // a second call in one process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Returns whether every assertion the command makes held.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Build(a) => build(a),
        Command::Sample(a) => sample(a),
        Command::Solve(a) => solve(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Critical(a) => critical(a),
        Command::Interface(a) => interface_cmd(a),
        Command::Rungs(a) => rungs(a),
        Command::Walls(a) => walls(a),
        Command::Estimate(a) => estimate(a),
        Command::Verify(a) => verify(a),
        Command::RenderData(a) => render(a),
    }
}

fn require_seed(seed: Option<u64>, command: &str) -> Result<u64> {
    seed.ok_or_else(|| LabError::Config(format!("`{command}` is stochastic and needs --seed")))
}

/// Writes the report (and its CSV table when there is one).
fn emit<T: Serialize>(
    output: &OutputArgs,
    mut rc: RunConfig,
    kind: &str,
    inputs: &[Vec<u8>],
    data: T,
    table: Option<String>,
) -> Result<()> {
    rc.format = match output.format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
    };
    if output.format == OutFormat::Csv && table.is_none() {
        return Err(LabError::Config(format!("`{}` has no tabular output", rc.command)));
    }
    let csv_path = output.out.as_ref().filter(|_| table.is_some()).map(|p| match output.format {
        OutFormat::Csv => p.clone(),
        OutFormat::Json => p.with_extension("csv"),
    });
    if let Some(p) = &output.out {
        rc.outputs.push(p.display().to_string());
    }
    if let Some(p) = csv_path.as_ref().filter(|p| Some(*p) != output.out.as_ref()) {
        rc.outputs.push(p.display().to_string());
    }
    let env = Envelope::new(kind, rc, inputs, data);
    let json = env.to_json()?;
    let csv = table.map(|t| env.csv(&t));
    match (&output.out, output.format) {
        (None, OutFormat::Json) => print_out(&json)?,
        (None, OutFormat::Csv) => print_out(csv.as_deref().unwrap_or_default())?,
        (Some(p), OutFormat::Json) => {
            write_file(p, &json)?;
            if let (Some(cp), Some(c)) = (&csv_path, &csv) {
                write_file(cp, c)?;
            }
        }
        (Some(p), OutFormat::Csv) => write_file(p, csv.as_deref().unwrap_or_default())?,
    }
    Ok(())
}

fn print_out(s: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn write_file(p: &Path, s: &str) -> Result<()> {
    std::fs::write(p, s).map_err(|e| LabError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display()))))
}

/// Lattice and couplings from `--couplings` or from `--lattice/--dist/--seed`.
fn disorder(d: &DisorderArgs, default_lattice: &str, rc: &mut RunConfig) -> Result<(Lattice, CouplingConfig, Vec<Vec<u8>>)> {
    let (spec, j, inputs) = match &d.couplings {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| LabError::Config(format!("cannot read couplings {}: {e}", path.display())))?;
            let v = unwrap_payload(serde_json::from_slice(&bytes)?);
            let j: CouplingConfig = serde_json::from_value(v)?;
            if d.lattice.is_some_and(|l| l != j.lattice_ref) {
                return Err(LabError::Config(format!("couplings were built for {}", j.lattice_ref)));
            }
            rc.param("couplings", path.display().to_string());
            (j.lattice_ref, Some(j), vec![bytes])
        }
        None => (d.lattice.unwrap_or(default_lattice.parse()?), None, Vec::new()),
    };
    let lattice = spec.build()?;
    rc.lattice = Some(spec.to_string());
    let j = match j {
        Some(j) => {
            j.check_lattice(&lattice)?;
            rc.dist = Some(j.dist.to_string());
            rc.seed = j.seed;
            j
        }
        None => {
            let seed = require_seed(d.seed, &rc.command)?;
            rc.dist = Some(d.dist.to_string());
            rc.seed = Some(seed);
            CouplingConfig::sample(&lattice, d.dist, seed)?
        }
    };
    Ok((lattice, j, inputs))
}

fn boundary_condition(lattice: &Lattice, region: &Region, mode: BcMode, seed: u64) -> Result<BoundaryCondition> {
    let boundary = lattice.external_boundary(region)?;
    if mode == BcMode::Free || boundary.is_empty() {
        return Ok(BoundaryCondition::Free);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, stream::BC));
    Ok(BoundaryCondition::Fixed(
        boundary
            .into_iter()
            .map(|v| {
                let s = match mode {
                    BcMode::Plus => 1,
                    BcMode::Minus => -1,
                    _ => {
                        if rng.random::<bool>() {
                            1
                        } else {
                            -1
                        }
                    }
                };
                (v, s)
            })
            .collect(),
    ))
}

fn build(a: BuildArgs) -> Result<bool> {
    let lattice = a.lattice.build()?;
    let mut rc = RunConfig::new("build");
    rc.lattice = Some(a.lattice.to_string());
    #[derive(Serialize)]
    struct Built {
        #[serde(flatten)]
        lattice: crate::lattice::LatticeJson,
        faces: Vec<[usize; 4]>,
    }
    let faces = lattice.faces().map(|f| f.to_vec()).unwrap_or_default();
    emit(&a.output, rc, "lattice", &[], Built { lattice: lattice.to_json(), faces }, None)?;
    Ok(true)
}

fn sample(a: SampleArgs) -> Result<bool> {
    let mut rc = RunConfig::new("sample");
    let (_, j, inputs) = disorder(&a.disorder, "box:4,4", &mut rc)?;
    emit(&a.output, rc, "couplings", &inputs, j, None)?;
    Ok(true)
}

fn solve(a: SolveArgs) -> Result<bool> {
    let mut rc = RunConfig::new("solve");
    let (lattice, j, inputs) = disorder(&a.disorder, "box:4,4", &mut rc)?;
    let region = a.region.resolve(&lattice)?;
    rc.outer = Some(a.region.to_string());
    rc.param("bc", a.bc).param("solver", a.solver);
    let bc = boundary_condition(&lattice, &region, a.bc, rc.seed.unwrap_or(0))?;
    let gs = solve_with(&lattice, &j, &region, &bc, a.solver)?;
    #[derive(Serialize)]
    struct Solved {
        region: Region,
        bc: BoundaryCondition,
        #[serde(flatten)]
        ground_state: crate::groundstate::GroundState,
    }
    emit(&a.output, rc, "ground_state", &inputs, Solved { region, bc, ground_state: gs }, None)?;
    Ok(true)
}

fn enumerate(a: EnumerateArgs) -> Result<bool> {
    let mut rc = RunConfig::new("enumerate");
    let (lattice, j, inputs) = disorder(&a.disorder, "box:4,4", &mut rc)?;
    rc.window = Some(a.window.to_string());
    rc.outer = Some(a.outer.to_string());
    let gss = enumerate_window_ground_states(&lattice, &j, &a.outer.resolve(&lattice)?, &a.window.resolve(&lattice)?)?;
    emit(&a.output, rc, "ground_state_set", &inputs, gss, None)?;
    Ok(true)
}

fn parse_edge(lattice: &Lattice, s: &str) -> Result<usize> {
    let bad = || LabError::Config(format!("edge `{s}` must be U,V with adjacent vertex indices"));
    let (u, v) = s.split_once(',').ok_or_else(bad)?;
    let u: usize = u.trim().parse().map_err(|_| bad())?;
    let v: usize = v.trim().parse().map_err(|_| bad())?;
    if u >= lattice.num_vertices() || v >= lattice.num_vertices() {
        return Err(LabError::Config(format!("edge `{s}` names a vertex outside the lattice")));
    }
    lattice.edge_between(u, v).ok_or_else(bad)
}

fn critical(a: CriticalArgs) -> Result<bool> {
    let mut rc = RunConfig::new("critical");
    let (lattice, j, inputs) = disorder(&a.disorder, "box:3,3", &mut rc)?;
    let region = a.region.resolve(&lattice)?;
    rc.outer = Some(a.region.to_string());
    rc.param("bc", a.bc);
    let bc = boundary_condition(&lattice, &region, a.bc, rc.seed.unwrap_or(0))?;
    let sigma = solve_with(&lattice, &j, &region, &bc, SolverKind::Auto)?.config;
    if let Some(edge) = &a.edge {
        let e = parse_edge(&lattice, edge)?;
        rc.param("edge", edge);
        let report = critical_report(&lattice, &j, &sigma, e, &region)?;
        emit(&a.output, rc, "critical_report", &inputs, report, None)?;
        return Ok(true);
    }
    rc.param("all", true);
    let mask = region.mask(lattice.num_vertices());
    let reports = (0..lattice.num_edges())
        .filter(|&e| lattice.edge(e).iter().all(|&v| mask[v]))
        .map(|e| critical_report(&lattice, &j, &sigma, e, &region))
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from("edge,J_e,C_e,F_e,S_e,S_e_x,S_e_y,supersat,droplet_size\n");
    for r in &reports {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.edge,
            r.j_e,
            r.critical_value,
            r.flexibility,
            r.s_e,
            r.s_e_x,
            r.s_e_y,
            r.super_satisfied,
            r.droplets.first().map_or(0, |d| d.len())
        ));
    }
    #[derive(Serialize)]
    struct Table {
        sigma: SpinConfig,
        reports: Vec<crate::criticality::CriticalReport>,
    }
    emit(&a.output, rc, "critical_table", &inputs, Table { sigma, reports }, Some(csv))?;
    Ok(true)
}

fn pair_setup(p: &PairArgs, rc: &mut RunConfig) -> Result<(crate::experiments::Built, u64)> {
    let seed = require_seed(p.seed, &rc.command)?;
    let setup = Setup { lattice: p.lattice, outer: p.outer, window: p.outer, dist: p.dist };
    rc.lattice = Some(p.lattice.to_string());
    rc.outer = Some(p.outer.to_string());
    rc.dist = Some(p.dist.to_string());
    rc.seed = Some(seed);
    rc.param("strategy", p.strategy.to_string());
    Ok((setup.build()?, seed))
}

fn interface_cmd(a: InterfaceArgs) -> Result<bool> {
    let mut rc = RunConfig::new("interface");
    let (built, seed) = pair_setup(&a.pair, &mut rc)?;
    let (j, s, t) = replica_pair(&built, a.pair.strategy, seed)?;
    let dual = built.lattice.build_dual()?;
    let dec = decompose(&built.lattice, &dual, &interface(&built.lattice, &s, &t)?)?;
    let clean = dec.sanity.is_clean();
    #[derive(Serialize)]
    struct Out {
        #[serde(flatten)]
        decomposition: crate::interface::InterfaceDecomposition,
        couplings: CouplingConfig,
        sigma: SpinConfig,
        sigma_prime: SpinConfig,
    }
    emit(&a.output, rc, "interface", &[], Out { decomposition: dec, couplings: j, sigma: s, sigma_prime: t }, None)?;
    Ok(clean)
}

/// Lattice bounds, and the same shrunk by one on every side.
fn default_boxes(lattice: &Lattice, box_j: Option<Rect>, box_l: Option<Rect>) -> (Rect, Rect) {
    let (lo, hi) = lattice.bounds();
    let l = box_l.unwrap_or(Rect::new(lo, hi));
    let j = box_j.unwrap_or(Rect::new([l.lo[0] + 1, l.lo[1] + 1], [l.hi[0] - 1, l.hi[1] - 1]));
    (j, l)
}

fn rungs(a: RungsArgs) -> Result<bool> {
    let mut rc = RunConfig::new("rungs");
    let (built, seed) = pair_setup(&a.pair, &mut rc)?;
    let (box_j, box_l) = default_boxes(&built.lattice, a.box_j, a.box_l);
    rc.caps.rung_len = a.maxlen;
    rc.param("box_j", box_j).param("box_l", box_l).param("maxlen", a.maxlen).param("wall", a.wall).param("edge", a.edge);
    let (j, s, t) = replica_pair(&built, a.pair.strategy, seed)?;
    let dual = built.lattice.build_dual()?;
    let iface = interface(&built.lattice, &s, &t)?;
    let catalog = enumerate_rungs(&built.lattice, &dual, &iface, &j, &s, &box_j, &box_l, a.maxlen)?;
    let f = a.edge.or_else(|| {
        catalog
            .rungs
            .iter()
            .filter(|r| r.walls.contains(&a.wall))
            .min_by(|x, y| x.energy.total_cmp(&y.energy))
            .map(|r| r.dual_edges[0])
    });
    if a.wall >= catalog.walls.len().max(1) {
        return Err(LabError::Config(format!("wall {} does not exist ({} walls)", a.wall, catalog.walls.len())));
    }
    #[derive(Serialize)]
    struct Out {
        #[serde(flatten)]
        catalog: crate::interface::RungCatalog,
        wall: usize,
        edge: Option<usize>,
        infima: crate::interface::RungInfima,
    }
    let infima = f.map(|f| rung_infima(&catalog.rungs, a.wall, f)).unwrap_or_default();
    emit(&a.output, rc, "rung_catalog", &[], Out { catalog, wall: a.wall, edge: f, infima }, None)?;
    Ok(true)
}

/// `A..B` inclusive, `A,B,C`, or a single integer.
fn parse_range(s: &str) -> Result<Vec<i64>> {
    let bad = || LabError::Config(format!("range `{s}` must be A..B, A,B,C or A"));
    let v: Vec<i64> = if let Some((a, b)) = s.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if v.is_empty() {
        return Err(bad());
    }
    Ok(v)
}

fn walls(a: WallsArgs) -> Result<bool> {
    let mut rc = RunConfig::new("walls");
    let seed = require_seed(a.seed, "walls")?;
    let (ns, ks) = (parse_range(&a.n)?, parse_range(&a.k)?);
    let setup = Setup { lattice: a.lattice, outer: a.outer, window: a.outer, dist: a.dist };
    rc.lattice = Some(a.lattice.to_string());
    rc.outer = Some(a.outer.to_string());
    rc.dist = Some(a.dist.to_string());
    rc.seed = Some(seed);
    rc.trials = Some(a.trials);
    rc.param("strategy", a.strategy.to_string()).param("n", &ns).param("k", &ks);
    let table = wall_statistics(&setup, a.strategy, &ns, &ks, a.trials, seed)?;
    let passed = table.passed;
    let csv = table.to_csv();
    emit(&a.output, rc, "wall_table", &[], table, Some(csv))?;
    Ok(passed)
}

fn estimate(a: EstimateArgs) -> Result<bool> {
    let mut rc = RunConfig::new("estimate");
    let seed = require_seed(a.seed, "estimate")?;
    let setup = Setup { lattice: a.lattice, outer: a.outer, window: a.window, dist: a.dist };
    rc.lattice = Some(a.lattice.to_string());
    rc.window = Some(a.window.to_string());
    rc.outer = Some(a.outer.to_string());
    rc.dist = Some(a.dist.to_string());
    rc.seed = Some(seed);
    rc.trials = Some(a.trials);
    rc.param("event", a.event).param("edge", a.edge);
    let est = estimate_event(&setup, a.event, a.edge, a.trials, seed)?;
    emit(&a.output, rc, "event_estimate", &[], est, None)?;
    Ok(true)
}

fn verify(a: VerifyArgs) -> Result<bool> {
    if a.suite == "list" {
        print_out(&format!("{}\n", crate::experiments::SUITES.join("\n")))?;
        return Ok(true);
    }
    let mut rc = RunConfig::new("verify");
    let seed = require_seed(a.seed, "verify")?;
    rc.seed = Some(seed);
    rc.dist = Some(a.dist.to_string());
    rc.trials = a.trials;
    rc.param("suite", &a.suite).param("edge", a.edge).param("dump_limit", a.dump_limit);
    let params = SuiteParams { trials: a.trials, seed, dist: a.dist, edge: a.edge, dump_limit: a.dump_limit };
    let report = verify_suite(&a.suite, &params)?;
    let passed = report.passed;
    for c in &report.checks {
        eprintln!("{} {}/{}: {}", if c.passed { "PASS" } else { "FAIL" }, report.suite, c.name, c.detail);
    }
    emit(&a.output, rc, "suite_report", &[], report, None)?;
    Ok(passed)
}

fn render(a: RenderArgs) -> Result<bool> {
    let mut rc = RunConfig::new("render-data");
    rc.param("scene", a.scene);
    let scene = match a.scene {
        SceneKind::Empty => {
            rc.lattice = Some(a.pair.lattice.to_string());
            scene::empty_scene(&a.pair.lattice.build()?)?
        }
        SceneKind::Instance => {
            let (built, seed) = pair_setup(&a.pair, &mut rc)?;
            let (_, s, t) = replica_pair(&built, a.pair.strategy, seed)?;
            scene::pair_scene("instance", &built.lattice, &s, &t)?
        }
        SceneKind::TetheredPair => {
            let (built, seed) = pair_setup(&a.pair, &mut rc)?;
            rc.param("attempts", a.attempts);
            scene::tethered_pair_scene(&built, a.pair.strategy, seed, a.attempts)?
        }
        SceneKind::Rung => {
            let (built, seed) = pair_setup(&a.pair, &mut rc)?;
            let (box_j, box_l) = default_boxes(&built.lattice, a.box_j, a.box_l);
            rc.caps.rung_len = a.maxlen;
            rc.param("box_j", box_j).param("box_l", box_l).param("maxlen", a.maxlen).param("attempts", a.attempts);
            scene::rung_scene(&built, a.pair.strategy, seed, &box_j, &box_l, a.maxlen, a.attempts)?.0
        }
    };
    emit(&a.output, rc, "scene", &[], scene, None)?;
    Ok(true)
}
