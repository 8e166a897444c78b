//! Command-line front end. `run` parses arguments, dispatches a subcommand
//! and maps the outcome to an exit code: 0 success, 1 negative verdict,
//! 2 usage or I/O error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use scartower::circuit::{
    apply_circuit, build_mapping_circuit, layer_count_bound, measure_locality_growth_with_cap, CircuitMode,
    GateCircuit, DEFAULT_CONE_CAP,
};
use scartower::decomp::{
    classify_terms, decompose, sample_parent_with, verify_certificate, DecompositionCertificate, SampleFlavor,
};
use scartower::fock::{apply, dicke_state, SparseState};
use scartower::graph::{ball_bound, verify_layers, verify_packing, LayeringCertificate, PackingCertificate};
use scartower::tower::{check_classes, TowerPreset};
use scartower::verify::{
    annihilation_induction_check, finite_fraction_check, freeze_check, theorem_precondition_check,
    tower_energies_with, InductionVerdict, SpacingError, SpacingOptions, SpacingVerdict,
};
use scartower::{Error, Operator, SiteGraph, TowerSpec};

/// Environment variable overriding the largest dense register.
pub const DIM_CAP_ENV: &str = "SCARTOWER_DIM_CAP";
/// Hard ceiling for dense registers.
pub const GLOBAL_DIM_CAP: usize = 20;
/// Residual bound for circuit mapping checks.
pub const CIRCUIT_TOLERANCE: f64 = 1e-12;
/// Entropy deviation bound for freezing.
pub const FREEZE_TOLERANCE: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "scartower", version, about = "Parent Hamiltonians and equally spaced towers of hard-core boson states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GraphArgs {
    /// Graph JSON file `{"n_sites":N,"edges":[[i,j],...]}`
    #[arg(long, conflicts_with_all = ["chain", "grid"])]
    graph: Option<PathBuf>,
    /// Chain of N sites
    #[arg(long, conflicts_with = "grid")]
    chain: Option<usize>,
    /// Square grid given as LXxLY, sites indexed x + LX*y
    #[arg(long)]
    grid: Option<String>,
    /// Open boundaries for --chain/--grid
    #[arg(long)]
    open: bool,
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// Write the JSON result here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose a parent Hamiltonian of |W⟩ into identity, number and local annihilators
    Decompose {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Re-validate an existing certificate instead of decomposing
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Tower energies and the equal-spacing verdict
    VerifyTower {
        #[arg(long)]
        hamiltonian: PathBuf,
        /// dicke, s2, nn, or a tower JSON file
        #[arg(long)]
        tower: String,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        pmax: Option<usize>,
        #[arg(long, default_value_t = 1e-10)]
        eigen_tol: f64,
        #[arg(long, default_value_t = 1e-9)]
        spacing_tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Annihilation of low tower levels implies annihilation of all levels
    InductionCheck {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        tower: String,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Zero eigenvalues of annihilator sums on far-separated tower levels
    FiniteFraction {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        tower: String,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        rmax: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Greedy packing of disjoint balls
    Pack {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        radius: usize,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Layers of pairwise-disjoint balls
    Layers {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        radius: usize,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Circuit mapping |W⟩ to |Q⟩
    BuildCircuit {
        #[arg(long)]
        tower: String,
        #[command(flatten)]
        graph: GraphArgs,
        /// balls, chain5 or chain3
        #[arg(long, default_value = "balls")]
        mode: String,
        #[command(flatten)]
        out: OutArgs,
        /// Re-validate an existing circuit instead of building one
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Range growth of number operators under circuit conjugation
    LocalityGrowth {
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        /// Probe sites; all sites when omitted
        #[arg(long, value_delimiter = ',')]
        probes: Vec<usize>,
        /// Compare against the bound for this tower
        #[arg(long)]
        tower: Option<String>,
        #[arg(long)]
        cone_cap: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Entanglement entropy of a tower superposition over time
    FreezeCheck {
        #[arg(long)]
        tower: String,
        #[command(flatten)]
        graph: GraphArgs,
        /// Energies E_0, E_1, ... as re[:im]; must be real
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
        energies: Vec<Complex64>,
        /// Amplitudes as re[:im]; normalized before use
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
        amplitudes: Vec<Complex64>,
        /// Subsystem sites; first half when omitted
        #[arg(long, value_delimiter = ',')]
        cut: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
        /// Number of random times in [0, tmax] added to --times
        #[arg(long, default_value_t = 0)]
        random_times: usize,
        #[arg(long, default_value_t = 20.0)]
        tmax: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Random parent Hamiltonian Ω·I + ω·Σn + Σ h_X
    SampleParent {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        rmax: usize,
        #[arg(long)]
        terms: usize,
        /// re or re:im
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        omega0: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        omega: String,
        #[arg(long)]
        seed: u64,
        /// generic, hermitian, dicke, hermitian_dicke
        #[arg(long, default_value = "generic")]
        flavor: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Row-by-row conditions for |W⟩ to be an eigenstate
    Classify {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// System-size hypotheses of the equal-spacing theorems
    Precheck {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        tower: String,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Failure modes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Negative(String),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(lib) if is_negative(lib) => Failure::Negative(format!("{e:#}")),
            _ => Failure::Usage(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

fn is_negative(e: &Error) -> bool {
    matches!(
        e,
        Error::NotParentOfW(_)
            | Error::ClassConditionViolated(_)
            | Error::TowerTruncated { .. }
            | Error::PackingInsufficient { .. }
            | Error::NotKLocal { .. }
            | Error::DisconnectedGraph
            | Error::NonRealEnergies { .. }
    )
}

type Outcome = std::result::Result<(), Failure>;

fn negative(msg: impl Into<String>) -> Outcome {
    Err(Failure::Negative(msg.into()))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Negative(msg)) => {
            println!("verdict: negative: {msg}");
            1
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(out: &OutArgs, value: &T) -> anyhow::Result<()> {
    if let Some(path) = &out.out {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Largest dense register, from the environment when set.
pub fn dim_cap() -> anyhow::Result<usize> {
    match std::env::var(DIM_CAP_ENV) {
        Ok(v) => {
            let cap: usize = v.trim().parse().with_context(|| format!("{DIM_CAP_ENV}={v:?}"))?;
            if cap == 0 || cap > GLOBAL_DIM_CAP {
                bail!("{DIM_CAP_ENV} must be between 1 and {GLOBAL_DIM_CAP}");
            }
            Ok(cap)
        }
        Err(_) => Ok(DEFAULT_CONE_CAP),
    }
}

fn load_graph(args: &GraphArgs) -> anyhow::Result<SiteGraph> {
    let periodic = !args.open;
    if let Some(path) = &args.graph {
        return read_json(path);
    }
    if let Some(n) = args.chain {
        if n == 0 {
            bail!("--chain needs at least one site");
        }
        return Ok(SiteGraph::chain(n, periodic));
    }
    if let Some(spec) = &args.grid {
        let (lx, ly) = spec
            .split_once(['x', 'X'])
            .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
            .ok_or_else(|| anyhow!("--grid expects LXxLY, got {spec:?}"))?;
        if lx == 0 || ly == 0 {
            bail!("--grid dimensions must be positive");
        }
        return Ok(SiteGraph::square_grid(lx, ly, periodic));
    }
    bail!("one of --graph, --chain or --grid is required")
}

fn load_tower(arg: &str, g: &SiteGraph) -> anyhow::Result<TowerSpec> {
    if let Ok(preset) = arg.parse::<TowerPreset>() {
        return Ok(TowerSpec::from_preset(preset, g));
    }
    let q: TowerSpec = read_json(Path::new(arg))?;
    if q.n_sites() != g.n_sites() {
        bail!("tower on {} sites, graph on {}", q.n_sites(), g.n_sites());
    }
    Ok(q)
}

fn load_operator(path: &Path, g: &SiteGraph) -> anyhow::Result<Operator> {
    let h: Operator = read_json(path)?;
    if let Some(&bad) = h.support().iter().find(|&&s| s >= g.n_sites()) {
        return Err(Error::SiteOutOfGraph {
            site: bad,
            n_sites: g.n_sites(),
        })
        .with_context(|| format!("{}", path.display()));
    }
    Ok(h)
}

fn parse_complex(s: &str) -> anyhow::Result<Complex64> {
    let (re, im) = match s.split_once(':') {
        Some((a, b)) => (a.trim().parse::<f64>()?, b.trim().parse::<f64>()?),
        None => (s.trim().parse::<f64>()?, 0.0),
    };
    Ok(Complex64::new(re, im))
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Decompose {
            hamiltonian,
            graph,
            out,
            check,
        } => {
            let g = load_graph(&graph)?;
            let h = load_operator(&hamiltonian, &g)?;
            if let Some(path) = check {
                let cert: DecompositionCertificate = read_json(&path)?;
                let report = verify_certificate(&cert, Some(&h), &g)?;
                write_json(&out, &report)?;
                println!(
                    "certificate: {} annihilators, max residual {:.3e}, max diameter {} (bound {})",
                    cert.annihilators.len(),
                    report.max_residual_w.max(report.max_residual_vacuum),
                    report.max_diameter,
                    report.diameter_bound
                );
                return if report.valid {
                    println!("verdict: certificate valid");
                    Ok(())
                } else {
                    negative(report.failures.join("; "))
                };
            }
            let cert = decompose(&h, &g)?;
            write_json(&out, &cert)?;
            println!(
                "omega0 = {}, omega = {}, R = {}, {} annihilators, verified at {} sites",
                cert.omega0,
                cert.omega,
                cert.range,
                cert.annihilators.len(),
                cert.verified_at_n_sites
            );
            for w in &cert.warnings {
                println!("warning: {w}");
            }
            println!("verdict: parent of W");
            Ok(())
        }
        Command::VerifyTower {
            hamiltonian,
            tower,
            graph,
            pmax,
            eigen_tol,
            spacing_tol,
            out,
        } => {
            let g = load_graph(&graph)?;
            let h = load_operator(&hamiltonian, &g)?;
            let q = load_tower(&tower, &g)?;
            if !(eigen_tol > 0.0 && spacing_tol > 0.0) {
                return Err(Failure::Usage(anyhow!("tolerances must be positive")));
            }
            let opts = SpacingOptions {
                eigen_tolerance: eigen_tol,
                spacing_tolerance: spacing_tol,
            };
            let p_max = pmax.unwrap_or(g.n_sites());
            let report = match tower_energies_with(&h, &q, p_max, opts) {
                Ok(r) => r,
                Err(SpacingError::Truncated { source, partial }) => {
                    write_json(&out, &partial)?;
                    return negative(source.to_string());
                }
                Err(SpacingError::Other(e)) => return Err(e.into()),
            };
            write_json(&out, &report)?;
            for l in &report.levels {
                println!("p = {:>2}  E = {:.12}  residual = {:.3e}", l.p, l.energy, l.residual);
            }
            println!(
                "omega0 = {:.12}, omega = {:.12}, max deviation = {:.3e}",
                report.omega0, report.omega, report.max_deviation
            );
            match report.verdict {
                SpacingVerdict::EquallySpaced => {
                    println!("verdict: equally spaced");
                    Ok(())
                }
                SpacingVerdict::NotEigenstates { ps } => negative(format!("NotEigenstates at p = {ps:?}")),
                SpacingVerdict::Unequal { deviation } => negative(format!("Unequal, deviation {deviation:e}")),
            }
        }
        Command::InductionCheck {
            hamiltonian,
            tower,
            graph,
            k,
            out,
        } => {
            let g = load_graph(&graph)?;
            let h = load_operator(&hamiltonian, &g)?;
            let q = load_tower(&tower, &g)?;
            let report = annihilation_induction_check(&h, &q, k)?;
            write_json(&out, &report)?;
            println!(
                "hypothesis p <= {}: failed at {:?}; conclusion p <= {}: failed at {:?}",
                report.hypothesis_depth, report.failed_hypothesis, report.tower_length, report.failed_conclusion
            );
            match report.verdict {
                InductionVerdict::Confirmed => {
                    println!("verdict: confirmed");
                    Ok(())
                }
                InductionVerdict::HypothesisFailed => negative("hypothesis fails"),
                InductionVerdict::Violation => negative("hypothesis holds but conclusion fails"),
            }
        }
        Command::FiniteFraction {
            hamiltonian,
            tower,
            graph,
            rmax,
            out,
        } => {
            let g = load_graph(&graph)?;
            let h = load_operator(&hamiltonian, &g)?;
            let q = load_tower(&tower, &g)?;
            let report = finite_fraction_check(&h, &q, &g, rmax)?;
            write_json(&out, &report)?;
            println!(
                "theorem bound p <= {}, checked p <= {}",
                report.theorem_bound, report.checked_up_to
            );
            for l in &report.levels {
                println!(
                    "p = {:>2}  witness {}  overlap {:.3e}  eigenstate {}  E = {:.3e}",
                    l.p,
                    l.witness,
                    l.witness_overlap.norm(),
                    l.is_eigenstate,
                    l.eigenvalue.norm()
                );
            }
            if !report.precondition_holds {
                return negative(format!("precondition fails: {}", report.precondition_failures.join("; ")));
            }
            if report.passed {
                println!("verdict: passed");
                Ok(())
            } else {
                negative(format!("violations at p = {:?}", report.violations))
            }
        }
        Command::Pack {
            graph,
            radius,
            out,
            check,
        } => {
            let g = load_graph(&graph)?;
            let bound = ball_bound(g.max_degree(), 2 * radius);
            let expected = (g.n_sites() as u128).div_ceil(bound);
            let cert = match check {
                Some(path) => read_json::<PackingCertificate>(&path)?,
                None => PackingCertificate {
                    radius,
                    centers: g.pack_spheres(radius),
                },
            };
            if cert.radius != radius {
                return negative(format!("certificate radius {} differs from {radius}", cert.radius));
            }
            write_json(&out, &cert)?;
            println!("{} centers (guaranteed at least {expected}): {:?}", cert.centers.len(), cert.centers);
            if !verify_packing(&g, radius, &cert.centers)? {
                return negative("balls overlap");
            }
            if (cert.centers.len() as u128) < expected {
                return negative("fewer centers than guaranteed");
            }
            println!("verdict: packing valid");
            Ok(())
        }
        Command::Layers {
            graph,
            radius,
            out,
            check,
        } => {
            let g = load_graph(&graph)?;
            let bound = ball_bound(g.max_degree(), 2 * radius);
            let cert = match check {
                Some(path) => read_json::<LayeringCertificate>(&path)?,
                None => LayeringCertificate {
                    radius,
                    layers: g.disjoint_layers(radius),
                },
            };
            if cert.radius != radius {
                return negative(format!("certificate radius {} differs from {radius}", cert.radius));
            }
            write_json(&out, &cert)?;
            println!("{} layers (bound {bound})", cert.layers.len());
            if !verify_layers(&g, radius, &cert.layers)? {
                return negative("layers do not cover every site once with disjoint balls");
            }
            if cert.layers.len() as u128 > bound {
                return negative("more layers than the bound");
            }
            println!("verdict: layering valid");
            Ok(())
        }
        Command::BuildCircuit {
            tower,
            graph,
            mode,
            out,
            check,
        } => {
            let g = load_graph(&graph)?;
            let q = load_tower(&tower, &g)?;
            let mode: CircuitMode = mode.parse()?;
            let m = match check {
                Some(path) => read_json::<GateCircuit>(&path)?,
                None => build_mapping_circuit(&q, &g, mode)?,
            };
            if m.n_sites() != g.n_sites() {
                return Err(Failure::Usage(anyhow!(
                    "circuit on {} sites, graph on {}",
                    m.n_sites(),
                    g.n_sites()
                )));
            }
            let (rw, rv) = circuit_residuals(&m, &q)?;
            let classes = check_classes(&q, &g)?;
            let bound = layer_count_bound(g.max_degree(), classes.q1.d.unwrap_or(0));
            write_json(&out, &m)?;
            println!(
                "{} layers (bound {bound}), {} gates; residual on W {rw:.3e}, on vacuum {rv:.3e}",
                m.n_layers(),
                m.n_gates()
            );
            if rw >= CIRCUIT_TOLERANCE || rv >= CIRCUIT_TOLERANCE {
                return negative("circuit does not map W to Q and fix the vacuum");
            }
            if m.n_layers() as u128 > bound {
                return negative("more layers than the bound");
            }
            println!("verdict: circuit valid");
            Ok(())
        }
        Command::LocalityGrowth {
            circuit,
            graph,
            probes,
            tower,
            cone_cap,
            out,
        } => {
            let g = load_graph(&graph)?;
            let m: GateCircuit = read_json(&circuit)?;
            let global = dim_cap()?;
            let cap = cone_cap.unwrap_or(global);
            if cap > global.max(DEFAULT_CONE_CAP) {
                return Err(Failure::Usage(anyhow!("--cone-cap {cap} exceeds the dimension cap {global}")));
            }
            let probes = if probes.is_empty() { (0..g.n_sites()).collect() } else { probes };
            let delta = measure_locality_growth_with_cap(&m, &g, &probes, cap)?;
            let bound = match &tower {
                Some(t) => {
                    let q = load_tower(t, &g)?;
                    check_classes(&q, &g)?.delta_bound
                }
                None => None,
            };
            write_json(
                &out,
                &serde_json::json!({ "probes": probes, "delta": delta, "bound": bound.map(|b| b.to_string()) }),
            )?;
            match bound {
                Some(b) => println!("observed delta {delta}, bound {b}"),
                None => println!("observed delta {delta}"),
            }
            if bound.is_some_and(|b| delta as u128 > b) {
                return negative("observed growth exceeds the bound");
            }
            Ok(())
        }
        Command::FreezeCheck {
            tower,
            graph,
            energies,
            amplitudes,
            cut,
            mut times,
            random_times,
            tmax,
            seed,
            out,
        } => {
            let g = load_graph(&graph)?;
            let q = load_tower(&tower, &g)?;
            if energies.len() != amplitudes.len() || energies.is_empty() {
                return Err(Failure::Usage(anyhow!("--energies and --amplitudes need equal nonzero lengths")));
            }
            let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Failure::Usage(anyhow!("amplitudes vanish")));
            }
            let amps: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            times.extend((0..random_times).map(|_| rng.random_range(0.0..=tmax)));
            let cut = if cut.is_empty() { (0..g.n_sites() / 2).collect() } else { cut };
            let deviation = freeze_check(&q, &energies, &amps, &cut, &times)?;
            write_json(&out, &serde_json::json!({ "cut": cut, "times": times, "max_deviation": deviation }))?;
            println!("max entropy deviation {deviation:.3e} over {} times", times.len());
            if deviation < FREEZE_TOLERANCE {
                println!("verdict: frozen");
                Ok(())
            } else {
                negative(format!("entropy deviates by {deviation:e}"))
            }
        }
        Command::SampleParent {
            graph,
            rmax,
            terms,
            omega0,
            omega,
            seed,
            flavor,
            out,
        } => {
            let g = load_graph(&graph)?;
            let flavor: SampleFlavor = flavor.parse()?;
            let h = sample_parent_with(&g, rmax, terms, parse_complex(&omega0)?, parse_complex(&omega)?, seed, flavor)?;
            write_json(&out, &h)?;
            println!("{} monomials, {}-local", h.len(), h.k_local());
            let w = dicke_state(g.n_sites(), 1)?;
            let residual = apply(&h, &w)?.add_scaled(&w, -(parse_complex(&omega0)? + parse_complex(&omega)?)).norm();
            println!("residual on W {residual:.3e}");
            Ok(())
        }
        Command::Classify { hamiltonian, graph, out } => {
            let g = load_graph(&graph)?;
            let h = load_operator(&hamiltonian, &g)?;
            let c = classify_terms(&h, g.n_sites())?;
            write_json(&out, &c)?;
            for b in &c.rows {
                println!("{:<14} {:>4} terms  {:?}", b.row.label(), b.terms.len(), b.status);
            }
            if c.is_parent_of_w() {
                println!("verdict: W is an eigenstate");
                Ok(())
            } else {
                let rows: Vec<&str> = c.violated_rows().iter().map(|r| r.label()).collect();
                negative(format!("violated rows {}", rows.join(", ")))
            }
        }
        Command::Precheck {
            hamiltonian,
            tower,
            graph,
            out,
        } => {
            let g = load_graph(&graph)?;
            let h = load_operator(&hamiltonian, &g)?;
            let q = load_tower(&tower, &g)?;
            let r = theorem_precondition_check(&h, &g, &q)?;
            write_json(&out, &r)?;
            println!("N = {}, k = {}, R = {}, max degree {}", r.n_sites, r.k, r.range, r.max_degree);
            for (name, c) in [("one-dimensional", &r.one_dimensional), ("bounded degree", &r.bounded_degree), ("general tower", &r.general_tower)] {
                let threshold = c.threshold.map_or("unbounded".to_string(), |t| t.to_string());
                println!(
                    "{name:<16} applicable {:<5} N > {threshold}: {}",
                    c.applicable,
                    if c.satisfied { "met" } else { "not met" }
                );
            }
            if r.one_dimensional.satisfied || r.bounded_degree.satisfied || r.general_tower.satisfied {
                println!("verdict: some size hypothesis met");
                Ok(())
            } else {
                negative("no size hypothesis met")
            }
        }
    }
}

/// `(‖M|W⟩ − Q†|0̄⟩/√N‖, ‖M|0̄⟩ − |0̄⟩‖)`
pub fn circuit_residuals(m: &GateCircuit, q: &TowerSpec) -> scartower::Result<(f64, f64)> {
    let n = q.n_sites();
    let w = dicke_state(n, 1)?;
    let target = apply(&q.to_operator(), &SparseState::vacuum(n))?.scale(Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
    let rw = apply_circuit(m, &w, false)?.distance(&target);
    let vac = SparseState::vacuum(n);
    let rv = apply_circuit(m, &vac, false)?.distance(&vac);
    Ok((rw, rv))
}
