//! Command-line front door: `gen`, `spectrum`, `sweep`, `theory`, `compare`.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::coupling::{CoupledSystem, InterlinkSequence, Strategy};
use crate::error::{Error, Result};
use crate::gen::{GenSpec, Model};
use crate::graph::Graph;
use crate::spectral::{fiedler_pair_with, full_spectrum, Solver};
use crate::sweep::{
    aggregate, comparison_to_csv, detect_transition, parse_records_csv, run_sweep,
    write_aggregates_csv, write_records_csv, SweepConfig,
};
use crate::theory::{
    layer_spectrum, meanfield_diagonal, meanfield_general, perturbation_estimate,
    MeanFieldPrediction,
};

#[derive(Parser, Debug)]
#[command(
    name = "interlink",
    version,
    about = "Spectral analysis of interdependent two-layer networks"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a model graph and write it as an edge list
    Gen(GenArgs),
    /// Print the Laplacian spectrum of a layer or a coupled system
    Spectrum(SpectrumArgs),
    /// Run a sweep experiment from a JSON config
    Sweep(SweepArgs),
    /// Print mean-field thresholds and perturbation estimates for a layer
    Theory(TheoryArgs),
    /// Join sweep aggregates with the mean-field prediction
    Compare(CompareArgs),
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    match s {
        "diagonal" => Ok(Strategy::Diagonal),
        "general" => Ok(Strategy::General),
        "mf-diagonal" | "mean-field-diagonal" => Ok(Strategy::MeanFieldDiagonal),
        "mf-general" | "mean-field-general" => Ok(Strategy::MeanFieldGeneral),
        _ => Err(format!(
            "unknown strategy `{s}` (diagonal, general, mf-diagonal, mf-general)"
        )),
    }
}

fn parse_solver(s: &str) -> std::result::Result<Solver, String> {
    match s {
        "dense" => Ok(Solver::Dense),
        "iterative" => Ok(Solver::Iterative),
        "auto" => Ok(Solver::Auto),
        _ => Err(format!("unknown solver `{s}` (dense, iterative, auto)")),
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Graph model: rr, ba, ws, or la
    #[arg(long)]
    model: Model,
    #[arg(long)]
    n: Option<usize>,
    /// Degree (rr) or ring neighbors (ws)
    #[arg(long)]
    k: Option<usize>,
    /// Links per new node (ba)
    #[arg(long)]
    m: Option<usize>,
    /// Rewiring probability (ws)
    #[arg(long)]
    p: Option<f64>,
    /// Cube side (la)
    #[arg(long)]
    side: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output edge-list path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// Layer edge-list file
    #[arg(long)]
    layer: PathBuf,
    /// Couple two copies of the layer with this strategy before solving
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
    /// Interlink count for explicit strategies
    #[arg(long)]
    count: Option<usize>,
    /// Coupling weight (mean-field strategies; explicit default 1)
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print only the Fiedler pair instead of the full spectrum
    #[arg(long)]
    fiedler: bool,
    #[arg(long, value_parser = parse_solver, default_value = "auto")]
    solver: Solver,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// JSON config file (keys mirror the sweep configuration fields)
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's record output path
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write per-count aggregates to this path
    #[arg(long)]
    aggregate_output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    /// Layer edge-list file
    #[arg(long)]
    layer: PathBuf,
    /// diagonal or general
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    /// Sample this many interlinks and print perturbation estimates
    #[arg(long)]
    count: Option<usize>,
    /// Coupling weight for the perturbation bounds
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the mean-field curve mu(alpha) with this many points
    #[arg(long)]
    curve_points: Option<usize>,
    /// Destination for the curve CSV (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Sweep record CSV produced by `sweep`
    #[arg(long)]
    records: PathBuf,
    /// Layer edge-list file the sweep ran on
    #[arg(long)]
    layer: PathBuf,
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Parses `argv` and runs; returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success intent
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Theory(args) => cmd_theory(args),
        Command::Compare(args) => cmd_compare(args),
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let spec = GenSpec {
        model: args.model,
        n: args.n,
        k: args.k,
        m: args.m,
        p: args.p,
        side: args.side,
        seed: args.seed,
    };
    let graph = spec.generate()?;
    match &args.output {
        Some(path) => graph.save_edge_list(path)?,
        None => {
            let mut buf = Vec::new();
            graph.write_edge_list(&mut buf)?;
            std::io::stdout().lock().write_all(&buf)?;
        }
    }
    eprintln!(
        "generated {} graph: {} nodes, {} edges",
        args.model.as_str(),
        graph.n(),
        graph.edge_count()
    );
    Ok(())
}

fn build_system(
    layer: Graph,
    strategy: Strategy,
    count: Option<usize>,
    alpha: f64,
    seed: u64,
) -> Result<CoupledSystem> {
    let sys = match strategy {
        Strategy::MeanFieldDiagonal => CoupledSystem::mean_field_diagonal(layer, alpha),
        Strategy::MeanFieldGeneral => CoupledSystem::mean_field_general(layer, alpha),
        Strategy::Diagonal | Strategy::General => {
            let count = count.ok_or_else(|| {
                Error::Parameter("--count is required for explicit strategies".into())
            })?;
            let sys = match strategy {
                Strategy::Diagonal => CoupledSystem::diagonal(layer, count, seed)?,
                _ => CoupledSystem::general(layer, count, seed)?,
            };
            sys.with_alpha(alpha)
        }
    };
    Ok(sys)
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<()> {
    let layer = Graph::load_edge_list(&args.layer)?;
    let q = match args.strategy {
        None => layer.laplacian(),
        Some(strategy) => {
            build_system(layer, strategy, args.count, args.alpha, args.seed)?.supra_laplacian()
        }
    };
    let mut text = String::new();
    if args.fiedler {
        let f = fiedler_pair_with(&q, args.solver, crate::spectral::DEFAULT_TOL)?;
        text.push_str(&format!("mu {:.17e}\n", f.mu));
        text.push_str(&format!("residual {:.3e}\n", f.residual));
        if let Some(gap) = f.gap {
            text.push_str(&format!("gap {:.17e}\n", gap));
        }
        text.push_str(&format!("degenerate {}\n", f.degenerate));
    } else {
        for v in full_spectrum(&q)?.eigenvalues {
            text.push_str(&format!("{v:.17e}\n"));
        }
    }
    emit(&args.output, &text)
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut cfg = SweepConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.output {
        cfg.output = Some(out);
    }
    let records = run_sweep(&cfg)?;
    let aggregates = aggregate(&records);
    match &cfg.output {
        Some(path) => {
            write_records_csv(&records, path)?;
            eprintln!("wrote {} records to {}", records.len(), path.display());
        }
        None => emit(&None, &crate::sweep::records_to_csv(&records))?,
    }
    if let Some(path) = &args.aggregate_output {
        write_aggregates_csv(&aggregates, path)?;
        eprintln!("wrote {} aggregates to {}", aggregates.len(), path.display());
    }
    match detect_transition(&aggregates, None) {
        Ok(t) => eprintln!(
            "transition estimate: count {} (angle jump {:.3}{})",
            t.count,
            t.jump,
            if t.low_confidence {
                ", low confidence"
            } else {
                ""
            }
        ),
        Err(Error::InsufficientData(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(())
}

fn prediction_for(layer: &Graph, strategy: Strategy) -> Result<MeanFieldPrediction> {
    let omega = layer_spectrum(layer)?;
    match strategy {
        Strategy::Diagonal | Strategy::MeanFieldDiagonal => meanfield_diagonal(&omega),
        Strategy::General | Strategy::MeanFieldGeneral => meanfield_general(&omega),
    }
}

fn cmd_theory(args: TheoryArgs) -> Result<()> {
    let layer = Graph::load_edge_list(&args.layer)?;
    let pred = prediction_for(&layer, args.strategy)?;
    let mut text = String::new();
    text.push_str(&format!("n1 {}\n", pred.n1));
    text.push_str(&format!("omega_fiedler {:.17e}\n", pred.omega_fiedler()));
    text.push_str(&format!("alpha_threshold {:.17e}\n", pred.alpha_threshold));
    text.push_str(&format!("link_threshold {:.17e}\n", pred.link_threshold));
    text.push_str(&format!(
        "link_threshold_ceil {}\n",
        pred.link_threshold_ceil()
    ));
    if let Some(count) = args.count {
        let seq = match args.strategy {
            Strategy::Diagonal | Strategy::MeanFieldDiagonal => {
                InterlinkSequence::diagonal(layer.clone(), args.seed)
            }
            _ => InterlinkSequence::general(layer.clone(), count, args.seed)?,
        };
        let sys = seq.system(count)?;
        let est = perturbation_estimate(&sys)?;
        let (b0, b1) = est.bounds(args.alpha);
        text.push_str(&format!("mu1 {:.17e}\n", est.mu1));
        text.push_str(&format!("mu2 {:.17e}\n", est.mu2));
        text.push_str(&format!("alpha {:.17e}\n", args.alpha));
        text.push_str(&format!("bound0 {:.17e}\n", b0));
        text.push_str(&format!("bound1 {:.17e}\n", b1));
    }
    if let Some(points) = args.curve_points {
        text.push_str("curve alpha,mu\n");
        let max_alpha = 2.0 * pred.alpha_threshold;
        let denom = points.saturating_sub(1).max(1) as f64;
        for i in 0..points.max(1) {
            let alpha = max_alpha * i as f64 / denom;
            text.push_str(&format!("{:.17e},{:.17e}\n", alpha, pred.mu_at(alpha)));
        }
    }
    emit(&args.output, &text)
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let records = parse_records_csv(&std::fs::read_to_string(&args.records)?)?;
    let layer = Graph::load_edge_list(&args.layer)?;
    let pred = prediction_for(&layer, args.strategy)?;
    let aggregates = aggregate(&records);
    let text = comparison_to_csv(&aggregates, &pred);
    emit(&args.output, &text)?;
    match detect_transition(&aggregates, Some(&pred)) {
        Ok(t) => eprintln!(
            "transition estimate: count {} vs closed-form threshold {:.2}",
            t.count, pred.link_threshold
        ),
        Err(Error::InsufficientData(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_and_solver_parsers() {
        assert_eq!(parse_strategy("diagonal").unwrap(), Strategy::Diagonal);
        assert_eq!(
            parse_strategy("mf-general").unwrap(),
            Strategy::MeanFieldGeneral
        );
        assert!(parse_strategy("nope").is_err());
        assert_eq!(parse_solver("dense").unwrap(), Solver::Dense);
        assert!(parse_solver("nope").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(cli_main(["interlink", "bogus-subcommand"]), 1);
        assert_eq!(cli_main(["interlink"]), 1);
    }

    #[test]
    fn runtime_errors_exit_two() {
        assert_eq!(
            cli_main(["interlink", "spectrum", "--layer", "/nonexistent/g.edges"]),
            2
        );
    }

    #[test]
    fn gen_then_spectrum_and_theory() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("g.edges");
        let code = cli_main([
            "interlink",
            "gen",
            "--model",
            "ws",
            "--n",
            "30",
            "--k",
            "4",
            "--p",
            "0.1",
            "--seed",
            "7",
            "-o",
            edges.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let g = Graph::load_edge_list(&edges).unwrap();
        assert_eq!(g.edge_count(), 60);

        let spec_out = dir.path().join("spec.txt");
        let code = cli_main([
            "interlink",
            "spectrum",
            "--layer",
            edges.to_str().unwrap(),
            "-o",
            spec_out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let lines = std::fs::read_to_string(&spec_out).unwrap();
        assert_eq!(lines.lines().count(), 30);

        let theory_out = dir.path().join("theory.txt");
        let code = cli_main([
            "interlink",
            "theory",
            "--layer",
            edges.to_str().unwrap(),
            "--strategy",
            "diagonal",
            "--count",
            "3",
            "--alpha",
            "0.05",
            "-o",
            theory_out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(&theory_out).unwrap();
        assert!(text.contains("link_threshold "));
        assert!(text.contains("bound0 "));
    }

    #[test]
    fn sweep_then_compare_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("g.edges");
        Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
            .unwrap()
            .save_edge_list(&edges)
            .unwrap();
        let cfg_path = dir.path().join("cfg.json");
        let out_path = dir.path().join("records.csv");
        std::fs::write(
            &cfg_path,
            format!(
                r#"{{"layer":{:?},"strategy":"diagonal","counts":[1,2,3,4],
                    "realizations":2,"seed":5,"solver":"dense","output":{:?}}}"#,
                edges.to_str().unwrap(),
                out_path.to_str().unwrap()
            ),
        )
        .unwrap();
        assert_eq!(
            cli_main(["interlink", "sweep", "--config", cfg_path.to_str().unwrap()]),
            0
        );
        let cmp_path = dir.path().join("compare.csv");
        assert_eq!(
            cli_main([
                "interlink",
                "compare",
                "--records",
                out_path.to_str().unwrap(),
                "--layer",
                edges.to_str().unwrap(),
                "--strategy",
                "diagonal",
                "-o",
                cmp_path.to_str().unwrap(),
            ]),
            0
        );
        let text = std::fs::read_to_string(&cmp_path).unwrap();
        assert!(text.lines().next().unwrap().contains("mu_theory"));
        assert_eq!(text.lines().count(), 5);
    }
}
