use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use opendesc::closed::{build_fc, BracketKey, ClosedSolver, Sector};
use opendesc::graphs::{degenerations, enumerate_boundary, Label, StableGraph};
use opendesc::identities::{
    sweep, verify_binomial, verify_virasoro_genus0, write_csv, Identity, SweepOptions, Trr,
    VerificationReport, Verifier,
};
use opendesc::open::{build_fo, build_fo_via_kdv, provenance, OpenSolver, Provenance};
use opendesc::FormalSeries;

#[derive(Parser)]
#[command(name = "opendesc", version, about = "Exact open and closed descendent integrals")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// One intersection number with its status
    Bracket(BracketArgs),
    /// Truncated F^c, F^o or Z = exp(F^c + F^o)
    Series(SeriesArgs),
    /// Check an identity on one instance or over a sweep
    Verify(VerifyArgs),
    /// Stable-graph operations on graph files
    #[command(subcommand)]
    Graphs(GraphCommand),
}

#[derive(Args)]
struct BracketArgs {
    #[arg(long, value_enum)]
    sector: SectorArg,
    #[arg(long)]
    genus: u32,
    /// descendent indices, comma separated
    #[arg(long, value_parser = parse_list, default_value = "")]
    a: Indices,
    /// boundary points (open sector)
    #[arg(long, default_value_t = 0)]
    k: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum SectorArg {
    Open,
    Closed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Potential {
    Fc,
    Fo,
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Virasoro,
    Kdv,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, value_enum)]
    potential: Potential,
    /// total (t, s)-degree cap
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    degree: u32,
    /// largest descendent index
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), default_value_t = 3)]
    cap: u32,
    /// how F^o is determined
    #[arg(long, value_enum, default_value_t = Route::Kdv)]
    route: Route,
}

#[derive(Args)]
struct VerifyArgs {
    /// open-string, open-dilaton, trr1, trr2, open-kdv, virasoro-genus0, xxz, xxzz, vxxz2 or xz2
    identity: String,
    /// operator or leading index; with --a (or alone for virasoro-genus0) checks one instance
    #[arg(long, allow_hyphen_values = true)]
    n: Option<i32>,
    /// second index of trr2
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, value_parser = parse_list)]
    a: Option<Indices>,
    #[arg(long)]
    k: Option<u32>,
    /// degree bound of a sweep, or the degree cap for virasoro-genus0
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    degree: Option<u32>,
    /// descendent cap for virasoro-genus0 (defaults to the degree)
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    cap: Option<u32>,
    #[arg(long)]
    max_genus: Option<u32>,
    #[arg(long)]
    max_a: Option<u32>,
    #[arg(long)]
    max_l: Option<u32>,
    #[arg(long)]
    max_n: Option<u32>,
    /// print every checked instance, not only failures
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Report every violated stable-graph condition
    Validate { file: String },
    /// ∂Γ of a graph file, or of the disk with --k/--l
    Boundary {
        file: Option<String>,
        #[arg(long, conflicts_with = "file")]
        k: Option<u32>,
        #[arg(long, conflicts_with = "file")]
        l: Option<u32>,
        /// only strata with this many edges
        #[arg(long)]
        codim: Option<usize>,
    },
    /// Base graph of a graph in which every disk component has odd boundary
    Base { file: String },
    /// Forget an interior marking and stabilize
    Forget {
        file: String,
        #[arg(long)]
        label: i64,
    },
    /// Subgraph spanned by some vertices, cut edges turned into labels
    Span {
        file: String,
        #[arg(long, value_parser = parse_list)]
        vertices: Indices,
    },
}

#[derive(Clone)]
struct Indices(Vec<u32>);

fn parse_list(s: &str) -> Result<Indices, String> {
    if s.trim().is_empty() {
        return Ok(Indices(Vec::new()));
    }
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| format!("`{}` is not a non-negative integer", x.trim())))
        .collect::<Result<Vec<_>, _>>()
        .map(Indices)
}

/// What went wrong: bad input exits 2, a failed check exits 1.
enum Failure {
    Usage(String),
    Check(String),
}

impl From<opendesc::Error> for Failure {
    fn from(e: opendesc::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

const CONJECTURAL: &str = "conjectural (open Virasoro/KdV determination)";

fn status(p: Provenance) -> &'static str {
    match p {
        Provenance::Proved => "proved",
        Provenance::Conjectural => CONJECTURAL,
    }
}

fn bracket(args: &BracketArgs, format: Format) -> Outcome {
    let a = &args.a.0;
    let sector = match args.sector {
        SectorArg::Open => Sector::Open,
        SectorArg::Closed => Sector::Closed,
    };
    let key = BracketKey::new(sector, args.genus, a, args.k)?;
    let value = match sector {
        Sector::Closed => ClosedSolver::new().bracket(args.genus, a),
        Sector::Open => OpenSolver::new().bracket(args.genus, a, args.k),
    };
    let st = status(provenance(&key));
    Ok(match format {
        Format::Plain => format!("{}\nstatus: {}\n", value, st),
        Format::Json => {
            let v = json!({
                "key": key.to_string(),
                "sector": sector,
                "genus": args.genus,
                "a": key.descendents,
                "k": args.k,
                "value": value.to_string(),
                "status": st,
            });
            format!("{}\n", v)
        }
        Format::Csv => {
            let list: Vec<String> = key.descendents.iter().map(|x| x.to_string()).collect();
            format!(
                "sector,genus,a,k,value,status\n{},{},\"{}\",{},{},{}\n",
                match sector {
                    Sector::Open => "open",
                    Sector::Closed => "closed",
                },
                args.genus,
                list.join(","),
                args.k,
                value,
                st
            )
        }
    })
}

fn series(args: &SeriesArgs, format: Format) -> Outcome {
    let (d, n) = (args.degree, args.cap);
    let fo = || match args.route {
        Route::Virasoro => build_fo(d, n),
        Route::Kdv => build_fo_via_kdv(d, n),
    };
    let f: FormalSeries = match args.potential {
        Potential::Fc => build_fc(&mut ClosedSolver::new(), d, n),
        Potential::Fo => fo(),
        Potential::Z => build_fc(&mut ClosedSolver::new(), d, n).add(&fo())?.exp()?,
    };
    Ok(match format {
        Format::Plain => f.dump(),
        Format::Json => {
            let terms: Vec<Value> = f
                .terms()
                .map(|(m, c)| json!({"monomial": m.to_string(), "coefficient": c.to_string()}))
                .collect();
            format!("{}\n", json!({"degree_cap": d, "descendent_cap": n, "terms": terms}))
        }
        Format::Csv => {
            let mut out = String::from("monomial,coefficient\n");
            for (m, c) in f.terms() {
                let _ = writeln!(out, "{},{}", m, c);
            }
            out
        }
    })
}

fn single_instance(id: Identity, args: &VerifyArgs) -> Result<Option<VerificationReport>, Failure> {
    let a = args.a.as_ref().map(|x| x.0.clone());
    let n_index = |n: Option<i32>| -> Result<u32, Failure> {
        match n {
            Some(n) if n >= 0 => Ok(n as u32),
            Some(n) => Err(Failure::Usage(format!("--n {} must be non-negative here", n))),
            None => Err(Failure::Usage("--n is required with --a".into())),
        }
    };
    let k = || args.k.ok_or_else(|| Failure::Usage("--k is required with --a".into()));
    let mut v = Verifier::new();
    let report = match (id, a) {
        (Identity::VirasoroGenus0, _) => match args.n {
            Some(n) => {
                let d = args.degree.unwrap_or(10);
                verify_virasoro_genus0(n, d, args.cap.unwrap_or(d))?
            }
            None => return Ok(None),
        },
        (_, None) => return Ok(None),
        (Identity::OpenString, Some(a)) => v.string(&a, k()?)?,
        (Identity::OpenDilaton, Some(a)) => v.dilaton(&a, k()?)?,
        (Identity::TrrI, Some(a)) => v.trr(Trr::I, n_index(args.n)?, None, &a, k()?)?,
        (Identity::TrrII, Some(a)) => v.trr(Trr::II, n_index(args.n)?, args.m, &a, k()?)?,
        (Identity::OpenKdv, Some(a)) => v.open_kdv_coeff(n_index(args.n)?, &a)?,
        (Identity::Binomial(b), Some(a)) => {
            let n = if b.takes_n() { Some(n_index(args.n)?) } else { None };
            verify_binomial(b, n, &a)?
        }
    };
    Ok(Some(report))
}

fn verify(args: &VerifyArgs, format: Format) -> Outcome {
    let id: Identity = args
        .identity
        .parse()
        .map_err(|e: opendesc::Error| Failure::Usage(e.to_string()))?;
    let reports = match single_instance(id, args)? {
        Some(r) => vec![r],
        None => {
            let defaults = SweepOptions::default();
            let opts = SweepOptions {
                degree: args.degree.unwrap_or(defaults.degree),
                max_genus: args.max_genus.unwrap_or(defaults.max_genus),
                operators: defaults.operators,
                descendent_cap: args.cap,
                max_a: args.max_a.unwrap_or(defaults.max_a),
                max_l: args.max_l.unwrap_or(defaults.max_l),
                max_n: args.max_n.unwrap_or(defaults.max_n),
            };
            sweep(id, &opts)?
        }
    };
    let passed = reports.iter().all(|r| r.pass);
    let text = match format {
        Format::Plain => {
            let mut out = String::new();
            for r in reports.iter().filter(|r| args.verbose || !r.pass) {
                let _ = writeln!(out, "{}", r);
            }
            out.push_str(if passed { "PASS\n" } else { "FAIL\n" });
            out
        }
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({"identity": id.name(), "pass": passed, "reports": reports}))
                .expect("reports serialize")
        ),
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&reports, &mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
    };
    if passed {
        Ok(text)
    } else {
        Err(Failure::Check(text))
    }
}

fn read_graph(path: &str) -> Result<StableGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {}", path, e)))?;
    Ok(StableGraph::from_json(&text)?)
}

fn emit_graphs(graphs: &[StableGraph], format: Format) -> Outcome {
    match format {
        Format::Plain => Ok(graphs.iter().map(|g| g.to_json() + "\n").collect()),
        Format::Json => Ok(serde_json::to_string_pretty(graphs).expect("graphs serialize") + "\n"),
        Format::Csv => Err(Failure::Usage("graph output has no csv form".into())),
    }
}

fn graphs(cmd: &GraphCommand, format: Format) -> Outcome {
    match cmd {
        GraphCommand::Validate { file } => {
            let g = read_graph(file)?;
            let diags = g.validate();
            let text = match format {
                Format::Plain if diags.is_empty() => "valid\n".to_string(),
                Format::Plain => diags.iter().map(|d| d.clone() + "\n").collect(),
                Format::Json => format!("{}\n", json!({"valid": diags.is_empty(), "violations": diags})),
                Format::Csv => {
                    let mut out = String::from("violation\n");
                    for d in &diags {
                        let _ = writeln!(out, "\"{}\"", d.replace('"', "\"\""));
                    }
                    out
                }
            };
            if diags.is_empty() {
                Ok(text)
            } else {
                Err(Failure::Check(text))
            }
        }
        GraphCommand::Boundary { file, k, l, codim } => {
            let list = match (file, k, l) {
                (Some(f), _, _) => {
                    let g = read_graph(f)?.canonical();
                    let edges = g.edges.len();
                    degenerations(&g)?
                        .into_iter()
                        .filter(|h| *h != g && codim.is_none_or(|c| h.edges.len() == edges + c))
                        .collect()
                }
                (None, Some(k), l) => enumerate_boundary(*k, l.unwrap_or(0), *codim),
                (None, None, Some(l)) => enumerate_boundary(0, *l, *codim),
                (None, None, None) => return Err(Failure::Usage("give a graph file or --k/--l".into())),
            };
            emit_graphs(&list, format)
        }
        GraphCommand::Base { file } => emit_graphs(&[read_graph(file)?.base()?], format),
        GraphCommand::Forget { file, label } => {
            emit_graphs(&[read_graph(file)?.forget_interior(&Label::interior(*label))?], format)
        }
        GraphCommand::Span { file, vertices } => {
            let u: Vec<usize> = vertices.0.iter().map(|&x| x as usize).collect();
            emit_graphs(&[read_graph(file)?.span(&u)?], format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bracket(a) => bracket(a, cli.format),
        Command::Series(a) => series(a, cli.format),
        Command::Verify(a) => verify(a, cli.format),
        Command::Graphs(g) => graphs(g, cli.format),
    };
    match result {
        Ok(text) => {
            print!("{}", text);
            ExitCode::SUCCESS
        }
        Err(Failure::Check(text)) => {
            print!("{}", text);
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
