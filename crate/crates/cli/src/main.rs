use std::fs;
use std::io::{self, Write};
use std::num::NonZeroU64;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use umlmine::batch::evaluate_batch;
use umlmine::codefacts::{emit_facts, parse_description};
use umlmine::harness::{aggregate, score, GroundTruth};
use umlmine::querygen::{build_query, render};
use umlmine::rdf::parse_ntriples;
use umlmine::resolver::{resolve, ResolverConfig};
use umlmine::sparql::{parse_query, plan, ResultSet};
use umlmine::uml::parse_xmi;

/// Mine design patterns from RDF code facts with queries generated from UML diagrams.
#[derive(Parser)]
#[command(name = "umlmine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a SPARQL query from an XMI class diagram.
    Generate(GenerateArgs),
    /// Emit N-Triples code facts from a JSON code description.
    Facts(FactsArgs),
    /// Run queries over one or more N-Triples files.
    Mine(MineArgs),
    /// Score result tables against ground truth.
    Eval(EvalArgs),
}

#[derive(Args)]
struct GenerateArgs {
    xmi: PathBuf,
    /// Output .rq file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Interpret stereotypes (constructor, override, interaction, ...).
    #[arg(long)]
    stereotypes: bool,
    /// Leave out Public/Private/Protected constraints.
    #[arg(long)]
    suppress_visibility: bool,
    /// Leave out pairwise FILTER(!=) between same-kind nodes.
    #[arg(long)]
    no_distinct_filters: bool,
    #[arg(long)]
    limit: Option<NonZeroU64>,
    /// Report skipped XMI elements on standard error.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Args)]
struct FactsArgs {
    description: PathBuf,
    #[arg(long)]
    base_iri: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    query: PathBuf,
    #[arg(required = true)]
    facts: Vec<PathBuf>,
    /// Further queries evaluated against the same store.
    #[arg(long = "query")]
    extra_queries: Vec<PathBuf>,
    /// Cap the number of rows of every query.
    #[arg(long)]
    limit: Option<NonZeroU64>,
    /// Print evaluation time in milliseconds on standard error.
    #[arg(long)]
    time: bool,
    /// Print the join plan on standard error.
    #[arg(long)]
    debug: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Ground-truth JSON, paired in order with --results.
    #[arg(short, long = "truth", required = true)]
    truth: Vec<PathBuf>,
    /// Result table written by `mine`.
    #[arg(short, long = "results", required = true)]
    results: Vec<PathBuf>,
    /// Machine-readable report instead of a table.
    #[arg(long)]
    json: bool,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read(path)?).with_context(|| format!("{} is not valid UTF-8", path.display()))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn generate(args: GenerateArgs) -> Result<()> {
    let model = parse_xmi(&read(&args.xmi)?).with_context(|| format!("{}", args.xmi.display()))?;
    if args.verbose {
        eprintln!("{}: {} element(s); {}", args.xmi.display(), model.len(), model.diagnostics);
    }
    let config = ResolverConfig {
        suppress_visibility: args.suppress_visibility,
        parse_stereotypes: args.stereotypes,
        emit_distinct_filters: !args.no_distinct_filters,
    };
    let resolution = resolve(&model, &config)?;
    let query = build_query(&resolution.components, &resolution.relationships, &config)?
        .with_limit(args.limit.map(NonZeroU64::get));
    if args.verbose {
        eprintln!(
            "{} node(s), {} relationship(s), {} filter(s)",
            query.selected().count(),
            query.relationships.len(),
            query.filters.len()
        );
    }
    write_output(args.output.as_deref(), &render(&query))
}

fn facts(args: FactsArgs) -> Result<()> {
    let desc = parse_description(&read_text(&args.description)?)
        .with_context(|| format!("{}", args.description.display()))?;
    let nt = emit_facts(&desc, &args.base_iri)?;
    write_output(args.output.as_deref(), &nt)
}

fn mine(args: MineArgs) -> Result<()> {
    let paths: Vec<&PathBuf> = std::iter::once(&args.query).chain(&args.extra_queries).collect();
    let mut queries = Vec::new();
    for p in &paths {
        let mut ir = parse_query(&read_text(p)?).with_context(|| format!("{}", p.display()))?;
        if let Some(n) = args.limit {
            ir.limit = Some(ir.limit.map_or(n.get(), |l| l.min(n.get())));
        }
        queries.push(ir);
    }

    let docs = args
        .facts
        .iter()
        .map(|p| Ok((p.display().to_string(), read(p)?)))
        .collect::<Result<Vec<_>>>()?;
    let store = parse_ntriples(&docs)?;

    if args.debug {
        eprintln!("store: {} triple(s), {} term(s)", store.len(), store.term_count());
        for (p, q) in paths.iter().zip(&queries) {
            eprint!("plan for {}:\n{}", p.display(), plan(&store, q));
        }
    }

    let results = evaluate_batch(&store, &queries);
    let mut out = io::stdout().lock();
    for (i, (p, rs)) in paths.iter().zip(&results).enumerate() {
        if paths.len() > 1 {
            if i > 0 {
                writeln!(out)?;
            }
            writeln!(out, "# {}", p.display())?;
        }
        out.write_all(rs.to_table().as_bytes())?;
        if args.time {
            eprintln!("Time: {} ms", rs.elapsed.as_millis());
        }
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    if args.truth.len() != args.results.len() {
        bail!(
            "{} ground-truth file(s) but {} result file(s)",
            args.truth.len(),
            args.results.len()
        );
    }
    let mut reports = Vec::new();
    for (t, r) in args.truth.iter().zip(&args.results) {
        let truth = GroundTruth::from_json(&read_text(t)?).with_context(|| format!("{}", t.display()))?;
        let results = ResultSet::parse_table(&read_text(r)?).with_context(|| format!("{}", r.display()))?;
        let report = score(&results, &truth).with_context(|| format!("{}", r.display()))?;
        if !report.precision_defined {
            eprintln!("warning: nothing detected for {}; precision reported as 1.0", report.pattern);
        }
        reports.push(report);
    }
    let summary = aggregate(&reports);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        print!("{}", summary.to_table());
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Facts(a) => facts(a),
        Command::Mine(a) => mine(a),
        Command::Eval(a) => eval(a),
    }
}
