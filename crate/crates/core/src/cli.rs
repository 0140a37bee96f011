//! Command-line front end over a JSON workspace.
//!
//! Exit codes: 0 success, 1 domain error, 2 a theorem check failed,
//! 3 usage error. Domain errors go to stderr prefixed with their name.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{enumerate_structures_with, ArithStructure};
use crate::critical::{critical_group, induced_pullback, induced_pushforward, DEFAULT_ENUMERATION_BOUND};
use crate::divisor::{self, Divisor, DivisorError};
use crate::io::{int_strings, parse_int, Workspace};
use crate::morphism::{
    analyze_harmonic, enumerate_harmonic_morphisms_with, pullback_structure, verify_matrix_identities, GraphMorphism,
    HarmonicData, MorphismError,
};
use crate::par::Execution;
use crate::verify::{self, fmt_rational, TheoremReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_THEOREM: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "arithgraph",
    version,
    about = "Arithmetical structures, harmonic morphisms and critical groups"
)]
pub struct Cli {
    /// Workspace JSON file holding named graphs, structures, morphisms and divisors.
    #[arg(short, long, global = true)]
    pub workspace: Option<PathBuf>,
    /// Indented output.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Seed for randomized spot checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest group that is verified by enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_BOUND)]
    pub bound: u64,
    /// Run on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a structure, named or given inline with --r and --s.
    ValidateStructure {
        graph: String,
        structure: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        r: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Option<Vec<String>>,
    },
    /// The natural structure (all-ones, degrees).
    Natural { graph: String },
    /// Arithmetical Laplacian Diag(s) - A.
    Laplacian { graph: String, structure: String },
    /// Invariant factors of the critical group.
    CriticalGroup { graph: String, structure: String },
    /// Every structure with r bounded by --max-r.
    EnumerateStructures {
        graph: String,
        #[arg(long)]
        max_r: u64,
    },
    /// Multiplicities of a morphism and its matrix identities.
    CheckHarmonic { morphism: String },
    /// Every harmonic morphism from one graph to another.
    FindMorphisms {
        domain: String,
        codomain: String,
        #[arg(long)]
        include_constant: bool,
    },
    /// Pull a codomain structure back along a morphism.
    PullbackStructure { morphism: String, structure: String },
    /// Push a domain divisor forward.
    Pushforward { morphism: String, divisor: String },
    /// Pull a codomain divisor back.
    PullbackDivisor { morphism: String, divisor: String },
    /// Decide principality, with a witness function.
    IsPrincipal { divisor: String, structure: String },
    /// Canonical divisor s - 2.
    Canonical { graph: String, structure: String },
    /// Ramification divisor 2μ - 2 + ν.
    Ramification { morphism: String },
    /// Degree of the canonical divisor and the genus.
    Genus { graph: String, structure: String },
    /// Check identities for a morphism and a codomain structure.
    Check {
        which: CheckKind,
        morphism: String,
        structure: String,
    },
    /// Invariant-factor obstruction to morphisms between two graphs.
    Obstruction {
        domain: String,
        codomain: String,
        #[arg(long)]
        max_r: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Rh,
    Kram,
    Divides,
    Sdeg,
    GenusIneq,
    Surjective,
    Injective,
    All,
}

enum Failure {
    Usage(String),
    Domain(String),
    Theorem(Vec<String>),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.to_string())
    }
}

struct Ctx {
    ws: Workspace,
    pretty: bool,
    seed: u64,
    bound: u64,
    exec: Execution,
    lines: Vec<String>,
}

impl Ctx {
    fn emit<T: Serialize>(&mut self, value: &T) {
        let text = if self.pretty {
            serde_json::to_string_pretty(value)
        } else {
            serde_json::to_string(value)
        };
        self.lines.push(text.expect("output serializes"));
    }

    fn harmonic(&self, name: &str) -> Result<HarmonicData, Failure> {
        Ok(analyze_harmonic(self.ws.morphism(name)?)?)
    }

    fn graph_label(&self, g: &crate::graph::Graph) -> String {
        self.ws.graph_name(g).unwrap_or("").to_owned()
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let ws = match &cli.workspace {
        Some(path) => match Workspace::load(path) {
            Ok(ws) => ws,
            Err(e) => {
                let _ = writeln!(err, "{e}");
                return EXIT_DOMAIN;
            }
        },
        None => Workspace::default(),
    };
    let mut ctx = Ctx {
        ws,
        pretty: cli.pretty,
        seed: cli.seed,
        bound: cli.bound,
        exec: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
        lines: Vec::new(),
    };
    let result = dispatch(&mut ctx, &cli.command);
    for line in &ctx.lines {
        let _ = writeln!(out, "{line}");
    }
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "{msg}");
            EXIT_USAGE
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "{msg}");
            EXIT_DOMAIN
        }
        Err(Failure::Theorem(msgs)) => {
            for m in msgs {
                let _ = writeln!(err, "{m}");
            }
            EXIT_THEOREM
        }
    }
}

fn structure_json(ctx: &Ctx, st: &ArithStructure) -> Value {
    json!({
        "graph": ctx.graph_label(st.graph()),
        "r": int_strings(st.r()),
        "s": int_strings(st.s()),
    })
}

fn divisor_json(ctx: &Ctx, d: &Divisor) -> Value {
    json!({ "graph": ctx.graph_label(d.graph()), "values": int_strings(d.values()) })
}

fn map_json(m: &GraphMorphism) -> Value {
    let map: serde_json::Map<String, Value> = (0..m.domain().n())
        .map(|v| {
            (
                m.domain().label(v).to_owned(),
                Value::from(m.codomain().label(m.image(v))),
            )
        })
        .collect();
    Value::Object(map)
}

fn dispatch(ctx: &mut Ctx, cmd: &Command) -> Result<(), Failure> {
    match cmd {
        Command::ValidateStructure { graph, structure, r, s } => {
            let g = ctx.ws.graph(graph)?.clone();
            let st = match (structure, r, s) {
                (Some(name), None, None) => ctx.ws.structure_on(&g, name)?,
                (None, Some(r), Some(s)) => {
                    let parse = |xs: &[String]| xs.iter().map(|x| parse_int(x)).collect::<Result<Vec<_>, _>>();
                    ArithStructure::validate(g, parse(r)?, parse(s)?)?
                }
                _ => {
                    return Err(Failure::Usage(
                        "error: give either a structure name or both --r and --s".into(),
                    ))
                }
            };
            let mut v = structure_json(ctx, &st);
            v["natural"] = st.is_natural().into();
            v["valid"] = true.into();
            ctx.emit(&v);
        }
        Command::Natural { graph } => {
            let st = ArithStructure::natural(ctx.ws.graph(graph)?.clone());
            let v = structure_json(ctx, &st);
            ctx.emit(&v);
        }
        Command::Laplacian { graph, structure } => {
            let st = ctx.ws.structure_on(&ctx.ws.graph(graph)?.clone(), structure)?;
            let rows: Vec<Vec<String>> = st.laplacian().to_rows().iter().map(|r| int_strings(r)).collect();
            ctx.emit(&json!({ "laplacian": rows }));
        }
        Command::CriticalGroup { graph, structure } => {
            let st = ctx.ws.structure_on(&ctx.ws.graph(graph)?.clone(), structure)?;
            let k = critical_group(&st);
            ctx.emit(&json!({ "invariant_factors": int_strings(k.invariant_factors()) }));
        }
        Command::EnumerateStructures { graph, max_r } => {
            let g = ctx.ws.graph(graph)?.clone();
            let all = enumerate_structures_with(&g, *max_r, ctx.exec);
            let list: Vec<Value> = all
                .iter()
                .map(|st| {
                    json!({
                        "r": int_strings(st.r()),
                        "s": int_strings(st.s()),
                        "invariant_factors": int_strings(critical_group(st).invariant_factors()),
                    })
                })
                .collect();
            ctx.emit(&json!({ "graph": graph, "max_r": max_r, "count": all.len(), "structures": list }));
        }
        Command::CheckHarmonic { morphism } => {
            let m = ctx.ws.morphism(morphism)?;
            let v = match analyze_harmonic(m) {
                Ok(h) if h.constant => json!({ "harmonic": true, "constant": true, "degree": "0" }),
                Ok(h) => {
                    let ids = verify_matrix_identities(&h)?;
                    json!({
                        "harmonic": true,
                        "constant": h.constant,
                        "degree": h.degree.to_string(),
                        "mu": h.mu.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "nu": h.nu.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "adjacency_identity": ids.adjacency.holds,
                        "degree_identity": ids.degree.holds,
                    })
                }
                Err(e @ MorphismError::NotHarmonic { .. }) => {
                    json!({ "harmonic": false, "reason": e.to_string() })
                }
                Err(e) => return Err(e.into()),
            };
            ctx.emit(&v);
        }
        Command::FindMorphisms {
            domain,
            codomain,
            include_constant,
        } => {
            let (g2, g1) = (ctx.ws.graph(domain)?.clone(), ctx.ws.graph(codomain)?.clone());
            let found = enumerate_harmonic_morphisms_with(&g2, &g1, *include_constant, ctx.exec);
            let list: Vec<Value> = found
                .iter()
                .map(|h| json!({ "map": map_json(&h.morphism), "degree": h.degree.to_string() }))
                .collect();
            ctx.emit(&json!({ "domain": domain, "codomain": codomain, "count": found.len(), "morphisms": list }));
        }
        Command::PullbackStructure { morphism, structure } => {
            let h = ctx.harmonic(morphism)?;
            let st1 = ctx.ws.structure_on(h.codomain(), structure)?;
            let st2 = pullback_structure(&h, &st1)?;
            let v = structure_json(ctx, &st2);
            ctx.emit(&v);
        }
        Command::Pushforward { morphism, divisor } => {
            let h = ctx.harmonic(morphism)?;
            let d = divisor::pushforward(&h, ctx.ws.divisor(divisor)?)?;
            let v = divisor_json(ctx, &d);
            ctx.emit(&v);
        }
        Command::PullbackDivisor { morphism, divisor } => {
            let h = ctx.harmonic(morphism)?;
            let d = divisor::pullback_divisor(&h, ctx.ws.divisor(divisor)?)?;
            let v = divisor_json(ctx, &d);
            ctx.emit(&v);
        }
        Command::IsPrincipal { divisor, structure } => {
            let d = ctx.ws.divisor(divisor)?.clone();
            let st = ctx.ws.structure_on(d.graph(), structure)?;
            let deg = divisor::degree(&d, &st)?;
            let v = match divisor::is_principal(&d, &st) {
                Ok(f) => json!({ "principal": true, "degree": deg.to_string(), "witness": int_strings(&f) }),
                Err(DivisorError::NotPrincipal) => json!({ "principal": false, "degree": deg.to_string() }),
                Err(e) => return Err(e.into()),
            };
            ctx.emit(&v);
        }
        Command::Canonical { graph, structure } => {
            let st = ctx.ws.structure_on(&ctx.ws.graph(graph)?.clone(), structure)?;
            let k = divisor::canonical_divisor(&st);
            let deg = divisor::degree(&k, &st)?;
            let mut v = divisor_json(ctx, &k);
            v["degree"] = deg.to_string().into();
            ctx.emit(&v);
        }
        Command::Ramification { morphism } => {
            let h = ctx.harmonic(morphism)?;
            let d = divisor::ramification_divisor(&h)?;
            let v = divisor_json(ctx, &d);
            ctx.emit(&v);
        }
        Command::Genus { graph, structure } => {
            let st = ctx.ws.structure_on(&ctx.ws.graph(graph)?.clone(), structure)?;
            let g = divisor::genus_data(&st);
            ctx.emit(&json!({
                "deg_k": g.deg_k.to_string(),
                "genus": fmt_rational(&g.genus),
                "integral": g.is_integral(),
            }));
        }
        Command::Check {
            which,
            morphism,
            structure,
        } => return run_checks(ctx, *which, morphism, structure),
        Command::Obstruction {
            domain,
            codomain,
            max_r,
        } => {
            let (g2, g1) = (ctx.ws.graph(domain)?.clone(), ctx.ws.graph(codomain)?.clone());
            let report = verify::morphism_obstruction(&g2, &g1, *max_r, ctx.exec);
            ctx.emit(&report);
        }
    }
    Ok(())
}

fn run_checks(ctx: &mut Ctx, which: CheckKind, morphism: &str, structure: &str) -> Result<(), Failure> {
    use CheckKind::*;
    let h = ctx.harmonic(morphism)?;
    h.require_nonconstant()?;
    let st1 = ctx.ws.structure_on(h.codomain(), structure)?;
    let wants = |k: CheckKind| which == k || which == All;
    let mut reports: Vec<TheoremReport> = Vec::new();
    if wants(Rh) {
        reports.push(verify::check_riemann_hurwitz(&h, &st1)?);
    }
    if wants(Kram) {
        reports.push(verify::check_canonical_ramification(&h, &st1)?);
    }
    if wants(Divides) {
        reports.push(verify::check_order_divisibility(&h, &st1)?);
    }
    if wants(Sdeg) {
        reports.push(verify::check_s_degree(&st1));
        reports.push(verify::check_s_degree(&pullback_structure(&h, &st1)?));
    }
    if wants(GenusIneq) {
        reports.push(verify::check_genus_inequality(&h, &st1)?);
    }
    if wants(Surjective) {
        reports.push(verify::check_pushforward_surjective(&h, &st1, ctx.bound)?);
    }
    if wants(Injective) {
        reports.push(verify::check_pullback_injective(&h, &st1, ctx.bound)?);
    }
    let mut failures: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("TheoremFailure: {} on {}", r.theorem.as_str(), r.instance))
        .collect();
    if matches!(which, Surjective | Injective | All) {
        let st2 = pullback_structure(&h, &st1)?;
        let (k1, k2) = (critical_group(&st1), critical_group(&st2));
        let push = induced_pushforward(&h, &k2, &k1)?;
        let pull = induced_pullback(&h, &k1, &k2)?;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let push_ok = verify::spot_check_well_defined(
            &k2,
            &k1,
            &push,
            |d| divisor::pushforward(&h, d).expect("domain divisor"),
            &mut rng,
            4,
        );
        let pull_ok = verify::spot_check_well_defined(
            &k1,
            &k2,
            &pull,
            |d| divisor::pullback_divisor(&h, d).expect("codomain divisor"),
            &mut rng,
            4,
        );
        if !(push_ok && pull_ok) {
            failures.push("TheoremFailure: induced map depends on the representative".into());
        }
    }
    for r in &reports {
        ctx.emit(r);
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Theorem(failures))
    }
}

/// Entry point for the binary.
pub fn main_with_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
