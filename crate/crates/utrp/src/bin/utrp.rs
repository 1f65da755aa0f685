//! Command-line front end: realization distributions, order-realization
//! tables, behavior graph/net exports, expected conformance, simulation,
//! and the three-way analytic/simulation validation report.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use utrp::io;
use utrp::partial_order::{build_behavior_graph, Realization, DEFAULT_CAP};
use utrp::petri::expected_conformance;
use utrp::probability::realization_distribution;
use utrp::{
    assign_weights, construct_behavior_net, generative_sample, simulate, Error, Result,
    SimulationReport, UncertainLog, UncertainTrace,
};

#[derive(Parser)]
#[command(name = "utrp", version, about = "Uncertain-trace realization probabilities and expected conformance")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Cap on enumerated order-realizations / realizations per trace.
    #[arg(long, global = true, env = "UTRP_CAP", default_value_t = DEFAULT_CAP)]
    cap: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Decimal places for printed probabilities.
    #[arg(long, global = true, default_value_t = 6)]
    precision: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Realization distribution P(σ|τ) per case.
    Realizations {
        log: PathBuf,
        #[arg(long)]
        case: Option<String>,
    },
    /// Order-realizations of one case with I(ρ) and P_O(ρ|τ) columns.
    OrderRealizations {
        log: PathBuf,
        #[arg(long)]
        case: String,
    },
    /// Export the behavior graph of one case (JSON, or DOT with --dot).
    BehaviorGraph {
        log: PathBuf,
        #[arg(long)]
        case: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Export the weighted behavior net of one case (JSON, or DOT with --dot).
    BehaviorNet {
        log: PathBuf,
        #[arg(long)]
        case: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Probability-weighted alignment cost against a reference model.
    ExpectedConformance {
        log: PathBuf,
        model: PathBuf,
        #[arg(long)]
        case: Option<String>,
    },
    /// Stochastic simulation of the behavior net.
    Simulate {
        log: PathBuf,
        #[arg(long)]
        case: String,
        #[arg(short)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write per-run running frequencies as CSV.
        #[arg(long)]
        convergence: Option<PathBuf>,
        /// Write a running-frequency plot as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Three-way comparison: analytic vs behavior-net MC vs generative MC.
    Validate {
        log: PathBuf,
        #[arg(long)]
        case: String,
        #[arg(short)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if format == Format::Json {
                eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::FAILURE
        }
    }
}

fn load(path: &PathBuf) -> Result<UncertainLog> {
    let parsed = io::parse_log(path)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed.log)
}

fn select<'a>(log: &'a UncertainLog, case: &Option<String>) -> Result<Vec<&'a UncertainTrace>> {
    match case {
        None => Ok(log.traces.iter().collect()),
        Some(id) => log
            .trace(id)
            .map(|t| vec![t])
            .ok_or_else(|| Error::Validation(format!("no case {id:?} in log"))),
    }
}

fn one<'a>(log: &'a UncertainLog, case: &str) -> Result<&'a UncertainTrace> {
    log.trace(case)
        .ok_or_else(|| Error::Validation(format!("no case {case:?} in log")))
}

fn run(cli: Cli) -> Result<()> {
    let (cap, format, prec) = (cli.cap, cli.format, cli.precision);
    match cli.command {
        Command::Realizations { log, case } => {
            let log = load(&log)?;
            let traces = select(&log, &case)?;
            let mut cases = Vec::new();
            for trace in traces {
                let dist = realization_distribution(trace, cap)?;
                cases.push((trace.case.clone(), dist));
            }
            match format {
                Format::Json => {
                    let value = serde_json::json!({
                        "cases": cases.iter().map(|(case, dist)| serde_json::json!({
                            "case": case,
                            "realizations": dist.by_sequence.iter().map(|(s, p)| serde_json::json!({
                                "sequence": s.labels,
                                "probability": p,
                                "order_realizations": dist.provenance.get(s)
                                    .map(|v| v.iter().map(|(i, _)| i + 1).collect::<Vec<_>>())
                                    .unwrap_or_default(),
                            })).collect::<Vec<_>>(),
                            "total_probability": dist.total_probability(),
                        })).collect::<Vec<_>>(),
                    });
                    println!("{}", serde_json::to_string_pretty(&value)?);
                }
                Format::Csv => {
                    println!("case,sequence,probability,order_realizations");
                    for (case, dist) in &cases {
                        for (s, p) in &dist.by_sequence {
                            let rhos: Vec<String> = dist
                                .provenance
                                .get(s)
                                .map(|v| v.iter().map(|(i, _)| (i + 1).to_string()).collect())
                                .unwrap_or_default();
                            println!(
                                "{case},\"{}\",{:.*},\"{}\"",
                                io::sequence_display(s),
                                prec,
                                p,
                                rhos.join(";")
                            );
                        }
                    }
                }
                Format::Text => {
                    for (case, dist) in &cases {
                        println!("case {case}");
                        for (s, p) in &dist.by_sequence {
                            println!("  {}  {:.*}", io::sequence_display(s), prec, p);
                        }
                        println!("  total  {:.*}", prec, dist.total_probability());
                    }
                }
            }
            Ok(())
        }
        Command::OrderRealizations { log, case } => {
            let log = load(&log)?;
            let trace = one(&log, &case)?;
            let dist = realization_distribution(trace, cap)?;
            match format {
                Format::Json => {
                    let value = serde_json::json!({
                        "case": case,
                        "order_realizations": dist.by_order.iter().enumerate().map(|(i, e)| serde_json::json!({
                            "index": i + 1,
                            "events": e.rho.events,
                            "integral": e.integral,
                            "probability": e.probability,
                        })).collect::<Vec<_>>(),
                        "total_probability": dist.total_order_probability(),
                    });
                    println!("{}", serde_json::to_string_pretty(&value)?);
                }
                Format::Csv => print!("{}", io::order_realizations_csv(&dist, prec)),
                Format::Text => {
                    println!("case {case}");
                    for (i, e) in dist.by_order.iter().enumerate() {
                        println!(
                            "  ρ{}  ⟨{}⟩  I={:.*}  P_O={:.*}",
                            i + 1,
                            e.rho.events.join(","),
                            prec,
                            e.integral,
                            prec,
                            e.probability
                        );
                    }
                    println!("  total P_O  {:.*}", prec, dist.total_order_probability());
                }
            }
            Ok(())
        }
        Command::BehaviorGraph { log, case, out, dot } => {
            let log = load(&log)?;
            let trace = one(&log, &case)?;
            let graph = build_behavior_graph(trace)?;
            let content = if dot {
                io::behavior_graph_dot(&graph, trace)
            } else {
                serde_json::to_string_pretty(&graph)? + "\n"
            };
            std::fs::write(&out, content)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::BehaviorNet { log, case, out, dot } => {
            let log = load(&log)?;
            let trace = one(&log, &case)?;
            let graph = build_behavior_graph(trace)?;
            let bnet = assign_weights(&construct_behavior_net(trace, &graph)?, trace)?;
            let content = if dot {
                io::behavior_net_dot(&bnet)
            } else {
                serde_json::to_string_pretty(&bnet)? + "\n"
            };
            std::fs::write(&out, content)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::ExpectedConformance { log, model, case } => {
            let log = load(&log)?;
            let net = io::parse_model(&model)?;
            let traces = select(&log, &case)?;
            let mut reports = Vec::new();
            for trace in traces {
                let dist = realization_distribution(trace, cap)?;
                reports.push((trace.case.clone(), expected_conformance(&dist, &net)?));
            }
            match format {
                Format::Json => {
                    let value = serde_json::json!({
                        "cases": reports.iter().map(|(case, r)| serde_json::json!({
                            "case": case,
                            "expected": r.expected,
                            "min": r.min,
                            "max": r.max,
                            "unweighted_mean": r.unweighted_mean,
                            "realizations": r.per_realization.iter().map(|(s, p, c)| serde_json::json!({
                                "sequence": s.labels, "probability": p, "conformance": c,
                            })).collect::<Vec<_>>(),
                        })).collect::<Vec<_>>(),
                    });
                    println!("{}", serde_json::to_string_pretty(&value)?);
                }
                Format::Csv => {
                    println!("case,sequence,probability,conformance");
                    for (case, r) in &reports {
                        for (s, p, c) in &r.per_realization {
                            println!("{case},\"{}\",{:.*},{c}", io::sequence_display(s), prec, p);
                        }
                    }
                }
                Format::Text => {
                    for (case, r) in &reports {
                        println!("case {case}");
                        for (s, p, c) in &r.per_realization {
                            println!("  {}  P={:.*}  conf={c}", io::sequence_display(s), prec, p);
                        }
                        println!(
                            "  expected={:.*}  min={}  max={}  unweighted mean={:.*}",
                            prec, r.expected, r.min, r.max, prec, r.unweighted_mean
                        );
                    }
                }
            }
            Ok(())
        }
        Command::Simulate { log, case, n, seed, convergence, svg } => {
            let log = load(&log)?;
            let trace = one(&log, &case)?;
            let graph = build_behavior_graph(trace)?;
            let bnet = assign_weights(&construct_behavior_net(trace, &graph)?, trace)?;
            let report = simulate(&bnet, n, seed)?;
            let analytic = realization_distribution(trace, cap)?;
            if let Some(path) = convergence {
                std::fs::write(&path, io::convergence_csv(&report))?;
                eprintln!("wrote {}", path.display());
            }
            if let Some(path) = svg {
                std::fs::write(&path, io::convergence_svg(&report, Some(&analytic.by_sequence)))?;
                eprintln!("wrote {}", path.display());
            }
            print_frequencies(&report, format, prec)?;
            Ok(())
        }
        Command::Validate { log, case, n, seed } => {
            let log = load(&log)?;
            let trace = one(&log, &case)?;
            let dist = realization_distribution(trace, cap)?;
            let graph = build_behavior_graph(trace)?;
            let bnet = assign_weights(&construct_behavior_net(trace, &graph)?, trace)?;
            let net_mc = simulate(&bnet, n, seed)?;
            let gen_mc = generative_sample(trace, n, seed.wrapping_add(1))?;

            let mut sequences: Vec<Realization> = dist.by_sequence.keys().cloned().collect();
            for s in net_mc.sequences.iter().chain(gen_mc.sequences.iter()) {
                if !sequences.contains(s) {
                    sequences.push(s.clone());
                }
            }
            sequences.sort();
            let mut rows = Vec::new();
            let (mut dev_net, mut dev_gen): (f64, f64) = (0.0, 0.0);
            for s in &sequences {
                let a = dist.by_sequence.get(s).copied().unwrap_or(0.0);
                let fn_ = net_mc.frequency_of(s);
                let fg = gen_mc.frequency_of(s);
                dev_net = dev_net.max((a - fn_).abs());
                dev_gen = dev_gen.max((a - fg).abs());
                rows.push((s.clone(), a, fn_, fg));
            }
            match format {
                Format::Json => {
                    let value = serde_json::json!({
                        "case": case, "n": n, "seed": seed,
                        "rows": rows.iter().map(|(s, a, f1, f2)| serde_json::json!({
                            "sequence": s.labels, "analytic": a,
                            "behavior_net_frequency": f1, "generative_frequency": f2,
                        })).collect::<Vec<_>>(),
                        "max_deviation_behavior_net": dev_net,
                        "max_deviation_generative": dev_gen,
                    });
                    println!("{}", serde_json::to_string_pretty(&value)?);
                }
                Format::Csv => {
                    println!("sequence,analytic,behavior_net_frequency,generative_frequency");
                    for (s, a, f1, f2) in &rows {
                        println!(
                            "\"{}\",{:.*},{:.*},{:.*}",
                            io::sequence_display(s),
                            prec,
                            a,
                            prec,
                            f1,
                            prec,
                            f2
                        );
                    }
                }
                Format::Text => {
                    println!("case {case}  n={n}  seed={seed}");
                    println!("  {:<24} {:>12} {:>12} {:>12}", "sequence", "analytic", "net MC", "generative");
                    for (s, a, f1, f2) in &rows {
                        println!(
                            "  {:<24} {:>12.*} {:>12.*} {:>12.*}",
                            io::sequence_display(s),
                            prec,
                            a,
                            prec,
                            f1,
                            prec,
                            f2
                        );
                    }
                    println!("  max |analytic − net MC| = {dev_net:.6}");
                    println!("  max |analytic − generative| = {dev_gen:.6}");
                }
            }
            Ok(())
        }
    }
}

fn print_frequencies(report: &SimulationReport, format: Format, prec: usize) -> Result<()> {
    match format {
        Format::Json => {
            let value = serde_json::json!({
                "n_runs": report.n_runs,
                "seed": report.seed,
                "frequencies": report.sequences.iter().zip(&report.frequencies)
                    .map(|(s, f)| serde_json::json!({"sequence": s.labels, "frequency": f}))
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        Format::Csv => {
            println!("sequence,frequency");
            for (s, f) in report.sequences.iter().zip(&report.frequencies) {
                println!("\"{}\",{:.*}", io::sequence_display(s), prec, f);
            }
        }
        Format::Text => {
            println!("n={}  seed={}", report.n_runs, report.seed);
            for (s, f) in report.sequences.iter().zip(&report.frequencies) {
                println!("  {}  {:.*}", io::sequence_display(s), prec, f);
            }
        }
    }
    Ok(())
}
