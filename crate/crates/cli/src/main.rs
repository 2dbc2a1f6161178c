use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ihara::cusp;
use ihara::report::{self, ReportError, RunOptions, VerifySelection, EXIT_CHECK_FAILED, EXIT_INPUT};
use ihara::sheaf::CSheaf;
use ihara::Graph;

#[derive(Parser, Debug)]
#[command(name = "zeta", version, about = "Ihara zeta functions of graphs, sheaves and cusped graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zeta inverse, square-free factors, poles and checks for a graph.
    Compute(CommonArgs),
    /// Enumerate loops up to --max-length.
    Loops(CommonArgs),
    /// Pole table of a graph.
    Poles(CommonArgs),
    /// Run identity checks; with no check flags, all applicable ones run.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        euler: bool,
        #[arg(long)]
        traces: bool,
        #[arg(long)]
        lefschetz: bool,
        #[arg(long)]
        funceq: bool,
    },
    /// Twisted zeta of a c-sheaf document.
    Sheaf(CommonArgs),
    /// Zeta series and truncation data of a cusped-graph document.
    Cusped(CommonArgs),
    /// Dense dump of the edge operator.
    DumpOperator(CommonArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Input JSON file.
    input: PathBuf,
    /// Series order or number of traces.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    order: Option<u64>,
    /// Longest loop to enumerate.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_length: Option<u64>,
    /// Truncation depth for cusped eigenvalues.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    depth: Option<u64>,
    /// Tolerance for numeric checks, in (0, 1).
    #[arg(long, value_parser = parse_tol, default_value_t = ihara::zeta::DEFAULT_CROSS_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for functional-equation sample points.
    #[arg(long, default_value_t = ihara::zeta::DEFAULT_SEED)]
    seed: u64,
    /// Maximum number of loop classes to enumerate.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = ihara::loops::DEFAULT_CLASS_CAP as u64)]
    cap: u64,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(format!("tolerance must lie in (0, 1), got {x}"))
    }
}

impl CommonArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            order: self.order.map(|x| x as usize),
            max_length: self.max_length.map(|x| x as usize),
            depth: self.depth.map(|x| x as usize),
            tol: self.tol,
            seed: self.seed,
            cap: self.cap as usize,
        }
    }
}

enum Failure {
    Input(String),
    Report(ReportError),
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        Failure::Report(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT as u8,
            Failure::Report(e) => e.exit_code() as u8,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(m) => m.clone(),
            Failure::Report(e) => e.to_string(),
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_graph(args: &CommonArgs) -> Result<Graph, Failure> {
    Ok(Graph::from_json(&read(&args.input)?).map_err(ReportError::from)?)
}

fn json_only(args: &CommonArgs, what: &str) -> Result<(), Failure> {
    if args.format == Format::Csv {
        return Err(Failure::Input(format!("--format csv is not available for {what}")));
    }
    Ok(())
}

/// Output text and whether any check failed.
fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    match &cli.command {
        Command::Compute(args) => {
            let g = read_graph(args)?;
            let r = report::compute(&g, &args.options())?;
            let failed = !r.failed_checks().is_empty();
            let text = match args.format {
                Format::Json => report::to_json(&r),
                Format::Csv => report::poles_csv(&r.poles),
            };
            Ok((text, failed))
        }
        Command::Poles(args) => {
            let g = read_graph(args)?;
            let doc = report::poles(&g)?;
            let text = match args.format {
                Format::Json => report::to_json(&doc),
                Format::Csv => report::poles_csv(&doc.poles),
            };
            Ok((text, false))
        }
        Command::Loops(args) => {
            let g = read_graph(args)?;
            let doc = report::loops(&g, &args.options())?;
            let text = match args.format {
                Format::Json => report::to_json(&doc),
                Format::Csv => {
                    let mut s = String::from("length,primitive_length,multiplicity,canonical_vertices\n");
                    for l in &doc.loops {
                        let vs: Vec<String> = l.canonical_vertices.iter().map(usize::to_string).collect();
                        let _ = writeln!(s, "{},{},{},{}", l.length, l.primitive_length, l.multiplicity, vs.join(" "));
                    }
                    s
                }
            };
            Ok((text, false))
        }
        Command::Verify {
            common,
            euler,
            traces,
            lefschetz,
            funceq,
        } => {
            json_only(common, "verify")?;
            let g = read_graph(common)?;
            let sel = VerifySelection {
                euler: *euler,
                traces: *traces,
                lefschetz: *lefschetz,
                funceq: *funceq,
            };
            let doc = report::verify(&g, sel, &common.options())?;
            Ok((report::to_json(&doc), doc.any_failed()))
        }
        Command::Sheaf(args) => {
            json_only(args, "sheaf")?;
            let s = CSheaf::from_json(&read(&args.input)?).map_err(ReportError::from)?;
            let doc = report::sheaf_report(&s, &args.options())?;
            Ok((report::to_json(&doc), doc.any_failed()))
        }
        Command::Cusped(args) => {
            json_only(args, "cusped")?;
            let (cg, w) = cusp::cusped_from_json(&read(&args.input)?).map_err(ReportError::from)?;
            let doc = report::cusped_report(&cg, &w, &args.options())?;
            Ok((report::to_json(&doc), doc.any_failed()))
        }
        Command::DumpOperator(args) => {
            json_only(args, "dump-operator")?;
            let g = read_graph(args)?;
            Ok((report::to_json(&report::dump_operator(&g)), false))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, failed)) => {
            print!("{text}");
            if failed {
                ExitCode::from(EXIT_CHECK_FAILED as u8)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
