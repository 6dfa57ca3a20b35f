use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tpack::absorb::{absorb, build_absorbing_family, AbsorberConfig};
use tpack::classify::{classify_vertices, ClassPartition};
use tpack::complex::{build_complex, check_km_hypothesis, degree_sequence};
use tpack::constructions as cons;
use tpack::extremal::{extremal_c3_pack, ExtremalConfig};
use tpack::harness::{self, SweepMode, SweepReport};
use tpack::matching::{
    d_matching_covering, d_matching_covering_digraph, matching_or_certificate, matching_or_certificate_digraph,
    validate_certificate, validate_certificate_digraph, UGraph,
};
use tpack::pattern::pattern_by_name;
use tpack::solver::{find_max_packing, find_perfect_family_packing, DEFAULT_BUDGET};
use tpack::t3::t3_pack;
use tpack::turan::{consistent_or_independent, density_condition, find_kr_from_density, independent_or_copy};
use tpack::{Digraph, Pattern, Tournament, VertexSet};

/// Perfect tournament packings in digraphs.
#[derive(Parser)]
#[command(name = "tpack", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a digraph in edge-list format.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Exact perfect (or maximum) packing.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "t3")]
        tournament: String,
        /// Comma-separated pattern names; overrides --tournament.
        #[arg(long, value_delimiter = ',')]
        family: Vec<String>,
        /// Maximum packing instead of a perfect one.
        #[arg(long)]
        almost: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Perfect T3-packing by edge minimisation and swaps.
    T3pack {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Density and independence certificates.
    Turan {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        op: TuranOp,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value = "t3")]
        tournament: String,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
    /// Layer sizes, degree sequence and the degree-sequence hypothesis.
    Complex {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "t3")]
        tournament: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Include every layer's edges.
        #[arg(long)]
        layers: bool,
    },
    /// Absorbing families.
    Absorb {
        #[arg(value_enum)]
        action: AbsorbAction,
        #[command(flatten)]
        opts: AbsorbOpts,
    },
    /// Matching, classification and extremal-case certificates.
    Lemma {
        #[command(subcommand)]
        lemma: Lemma,
    },
    /// Threshold sweeps and tightness checks.
    Verify {
        #[command(subcommand)]
        check: Verify,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    /// Ex_c(n).
    Ex {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        c: usize,
    },
    /// Complete digraph minus the arcs inside {0..n/r}.
    NearIndependent {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
    },
    Source {
        #[arg(long)]
        n: usize,
    },
    K3minus {
        #[arg(long)]
        m: usize,
    },
    TotalDegree {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
    },
    Cycle {
        #[arg(long)]
        n: usize,
    },
    Complete {
        #[arg(long)]
        n: usize,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Semidegree {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Cond41 {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    TotalMin {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TuranOp {
    Density,
    Independent,
    Consistent,
}

#[derive(Clone, Copy, ValueEnum)]
enum AbsorbAction {
    Build,
    Check,
    Apply,
}

#[derive(Args)]
struct AbsorbOpts {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "t3")]
    tournament: String,
    #[arg(long)]
    xi: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absorber size (multiple of r); defaults to 2r^2.
    #[arg(long)]
    size: Option<usize>,
    /// Vertex set W for `apply`, comma separated.
    #[arg(long)]
    w: Option<String>,
}

#[derive(Subcommand)]
enum Lemma {
    /// d-matching covering X.
    Match {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        x: String,
        /// Use the digraph form (outdegree or indegree at least d).
        #[arg(long)]
        directed: bool,
    },
    /// Perfect matching, near-independent half or near-split partition.
    Matchcert {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        directed: bool,
    },
    Classify {
        #[arg(long)]
        graph: PathBuf,
        /// Classes separated by ';', vertices by ','.
        #[arg(long)]
        classes: String,
        #[arg(long, default_value = "")]
        b: String,
        #[arg(long)]
        delta: f64,
    },
    /// Perfect C3-packing of a host close to Ex(n).
    Expack {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        classes: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SweepOpts {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "random")]
    mode: Mode,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

impl From<Mode> for SweepMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exhaustive => SweepMode::Exhaustive,
            Mode::Random => SweepMode::Random,
        }
    }
}

#[derive(Subcommand)]
enum Verify {
    /// Minimum semidegree (1 - 1/r)n for an r-tournament.
    Threshold {
        #[arg(long)]
        r: usize,
        #[arg(long, default_value = "t3")]
        tournament: String,
        #[command(flatten)]
        opts: SweepOpts,
    },
    /// Outdegree or indegree at least (1 - 1/r)n at every vertex, for T_r.
    Conj14 {
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        opts: SweepOpts,
    },
    Tightness {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Total degree (2 - 1/r)n - 1 for K_r.
    Krtotal {
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        opts: SweepOpts,
    },
    /// Total degree (3n - 3)/2 for C3.
    Wang {
        #[command(flatten)]
        opts: SweepOpts,
    },
}

fn load(path: &Path) -> Result<Digraph> {
    Digraph::load(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_set(text: &str) -> Result<VertexSet> {
    let mut set = VertexSet::EMPTY;
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let v: usize = part.parse().with_context(|| format!("bad vertex `{part}`"))?;
        if v >= 64 {
            bail!("vertex {v} out of range");
        }
        set.insert(v);
    }
    Ok(set)
}

fn print(value: &impl serde::Serialize) -> Result<()> {
    emit(&format!("{}\n", serde_json::to_string_pretty(value)?))
}

/// Writes to stdout; a reader closing the pipe early is not an error.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn tournament(name: &str) -> Result<Tournament> {
    Ok(Tournament::by_name(name)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { family, out } => {
            let g = generate(family)?;
            match out {
                Some(path) => g.save(&path).with_context(|| format!("writing {}", path.display()))?,
                None => emit(&g.to_edge_list())?,
            }
        }
        Command::Solve { graph, tournament, family, almost, budget } => {
            let g = load(&graph)?;
            let names = if family.is_empty() { vec![tournament] } else { family };
            let patterns = names.iter().map(|n| pattern_by_name(n)).collect::<tpack::Result<Vec<Pattern>>>()?;
            if almost {
                if patterns.len() != 1 {
                    bail!("--almost takes a single pattern");
                }
                print(&find_max_packing(&g, &patterns[0], budget)?)?;
            } else {
                print(&find_perfect_family_packing(&g, &patterns, budget)?)?;
            }
        }
        Command::T3pack { graph, trace } => {
            let out = t3_pack(&load(&graph)?)?;
            if let Some(path) = trace {
                std::fs::write(&path, serde_json::to_string_pretty(&out.trace)?)?;
            }
            print(
                &json!({ "packing": out.packing, "swaps": out.trace.steps.len(), "minimized_arcs": out.minimized_arcs }),
            )?;
        }
        Command::Turan { graph, op, r, tournament: name, alpha } => {
            let g = load(&graph)?;
            let value = match op {
                TuranOp::Density => {
                    let holds = density_condition(&g, r);
                    let clique = if holds { Some(find_kr_from_density(&g, r)?) } else { None };
                    json!({ "condition": holds, "clique": clique })
                }
                TuranOp::Independent => {
                    let (cert, trace) = independent_or_copy(&g, &tournament(&name)?, alpha)?;
                    json!({ "certificate": cert, "trace": trace })
                }
                TuranOp::Consistent => {
                    let (cert, steps) = consistent_or_independent(&g, r, alpha)?;
                    json!({ "certificate": cert, "steps": steps })
                }
            };
            print(&value)?;
        }
        Command::Complex { graph, tournament: name, eps, layers } => {
            let g = load(&graph)?;
            let j = build_complex(&g, tournament(&name)?.pattern());
            let mut value = json!({
                "layer_sizes": j.layer_sizes(),
                "degree_sequence": degree_sequence(&j),
                "km_check": check_km_hypothesis(&j, eps),
            });
            if layers {
                value["layers"] = serde_json::to_value(&j.layers)?;
            }
            print(&value)?;
        }
        Command::Absorb { action, opts } => return absorb_cmd(action, opts),
        Command::Lemma { lemma } => lemma_cmd(lemma)?,
        Command::Verify { check } => return verify_cmd(check),
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(family: GenFamily) -> Result<Digraph> {
    Ok(match family {
        GenFamily::Ex { n, c } => cons::make_ex(n, c)?.0,
        GenFamily::NearIndependent { n, r } => cons::make_near_independent_extremal(n, r)?,
        GenFamily::Source { n } => cons::make_source_counterexample(n)?,
        GenFamily::K3minus { m } => cons::make_k3minus_example(m)?,
        GenFamily::TotalDegree { n, r } => cons::make_total_degree_extremal(n, r)?,
        GenFamily::Cycle { n } => cons::directed_cycle(n)?,
        GenFamily::Complete { n } => Digraph::complete(n)?,
        GenFamily::Random { n, p, seed } => cons::random_digraph(n, p, seed)?,
        GenFamily::Semidegree { n, delta, seed } => cons::random_digraph_min_semidegree(n, delta, seed)?,
        GenFamily::Cond41 { n, seed } => cons::random_digraph_cond_4_1(n, seed)?,
        GenFamily::TotalMin { n, degree, seed } => cons::random_digraph_min_total_degree(n, degree, seed)?,
    })
}

fn absorb_cmd(action: AbsorbAction, opts: AbsorbOpts) -> Result<ExitCode> {
    let g = load(&opts.graph)?;
    let t = tournament(&opts.tournament)?;
    let config = AbsorberConfig { absorber_size: opts.size, ..AbsorberConfig::new(opts.xi, opts.seed) };
    let family = build_absorbing_family(&g, t.pattern(), &config)?;
    match action {
        AbsorbAction::Build => print(&family)?,
        AbsorbAction::Check => {
            let ok = family.check_invariants(&g, opts.xi)?;
            print(&json!({ "invariants_hold": ok, "absorbers": family.absorbers.len(), "union": family.union }))?;
            if !ok {
                return Ok(ExitCode::from(2));
            }
        }
        AbsorbAction::Apply => {
            let w = parse_set(opts.w.as_deref().context("apply needs --w")?)?;
            print(&absorb(&g, &family, w)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn lemma_cmd(lemma: Lemma) -> Result<()> {
    match lemma {
        Lemma::Match { graph, d, x, directed } => {
            let g = load(&graph)?;
            let x = parse_set(&x)?;
            if directed {
                print(&json!({ "arcs": d_matching_covering_digraph(&g, d, x)? }))
            } else {
                print(&d_matching_covering(&UGraph::underlying(&g), d, x)?)
            }
        }
        Lemma::Matchcert { graph, gamma, directed } => {
            let g = load(&graph)?;
            let (cert, valid) = if directed {
                let cert = matching_or_certificate_digraph(&g, gamma)?;
                let valid = validate_certificate_digraph(&g, &cert);
                (cert, valid)
            } else {
                let u = UGraph::underlying(&g);
                let cert = matching_or_certificate(&u, gamma)?;
                let valid = validate_certificate(&u, &cert);
                (cert, valid)
            };
            print(&json!({ "certificate": cert, "valid": valid }))
        }
        Lemma::Classify { graph, classes, b, delta } => {
            let g = load(&graph)?;
            let classes = classes.split(';').map(parse_set).collect::<Result<Vec<_>>>()?;
            let partition = ClassPartition::new(classes, parse_set(&b)?);
            print(&classify_vertices(&g, &partition, delta)?)
        }
        Lemma::Expack { graph, alpha, classes, seed } => {
            let g = load(&graph)?;
            let classes = match classes {
                Some(text) => {
                    let sets = text.split(';').map(parse_set).collect::<Result<Vec<_>>>()?;
                    let Ok(three) = <[VertexSet; 3]>::try_from(sets) else { bail!("--classes needs three classes") };
                    Some(three)
                }
                None => None,
            };
            let config = ExtremalConfig { classes, seed, ..ExtremalConfig::new(alpha) };
            print(&extremal_c3_pack(&g, &config)?)
        }
    }
}

fn finish(report: &SweepReport, out: Option<PathBuf>) -> Result<ExitCode> {
    match out {
        Some(path) => {
            let written = report.write(&path).with_context(|| format!("writing {}", path.display()))?;
            let summary: Value = json!({
                "examined": report.examined,
                "packed": report.packed,
                "counterexamples": report.counterexamples.len(),
                "label": report.label,
                "files": written,
            });
            print(&summary)?;
        }
        None => print(report)?,
    }
    Ok(if report.has_counterexample() { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn verify_cmd(check: Verify) -> Result<ExitCode> {
    match check {
        Verify::Threshold { r, tournament, opts } => {
            let report = harness::sweep_semidegree(r, &tournament, opts.n, opts.mode.into(), opts.samples, opts.seed)?;
            finish(&report, opts.out)
        }
        Verify::Conj14 { r, opts } => {
            let report = harness::sweep_conjecture_1_4(r, opts.n, opts.mode.into(), opts.samples, opts.seed)?;
            finish(&report, opts.out)
        }
        Verify::Krtotal { r, opts } => {
            let report = harness::sweep_total_degree_kr(r, opts.n, opts.samples, opts.seed)?;
            finish(&report, opts.out)
        }
        Verify::Wang { opts } => finish(&harness::sweep_wang(opts.n, opts.samples, opts.seed)?, opts.out),
        Verify::Tightness { r, n, out } => {
            let report = harness::tightness_suite(r, n)?;
            let text = serde_json::to_string_pretty(&report)?;
            match out {
                Some(path) => std::fs::write(&path, text)?,
                None => emit(&format!("{text}\n"))?,
            }
            Ok(if report.all_hold() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
