//! `qrious`: exact checks for factorial ratios, their q-analogues and the
//! G2 constant term.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use qrious_cli::commands::{
    cmd_check, cmd_ct, cmd_families, cmd_positivity, cmd_qpoly, cmd_search, parse_point, with_jobs, CheckOptions,
    CommandOutput, Method, PolyFormat, EXIT_INPUT,
};
use qrious_core::laurent::DEFAULT_TERM_BUDGET;

#[derive(Parser)]
#[command(name = "qrious", version, about = "Integrality and positivity checks for factorial ratios")]
struct Cli {
    /// Write the JSON report to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Add wall-clock time to the JSON report.
    #[arg(long, global = true)]
    timing: bool,
    /// Box bound for brute force, residue and positivity scans.
    #[arg(long = "box", global = true, default_value_t = 8)]
    box_bound: u64,
    /// Largest modulus for the residue scan.
    #[arg(long, global = true)]
    d_max: Option<u64>,
    /// Maximum number of stored Laurent terms.
    #[arg(long, global = true, env = "QRIOUS_BUDGET", default_value_t = DEFAULT_TERM_BUDGET)]
    budget: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide integrality of a factorial ratio.
    Check {
        /// Registry name or spec such as "30n, n / 15n, 10n, 6n".
        spec: String,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
        /// Scan depth at which a clean scan counts as a proof.
        #[arg(long)]
        threshold: Option<u64>,
    },
    /// Print the q-analogue at one point.
    Qpoly {
        spec: String,
        /// Point such as "1,0", optionally preceded by "at".
        #[arg(num_args = 1..=2, required = true)]
        point: Vec<String>,
        #[arg(long, value_enum, default_value = "coeffs")]
        format: PolyFormat,
    },
    /// Check coefficient positivity over a box.
    Positivity {
        spec: String,
        /// Write the per-point table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Constant term of the G2 product at (m, n).
    Ct {
        #[arg(short)]
        m: u32,
        #[arg(short)]
        n: u32,
        /// Specialize to q = 1 during expansion.
        #[arg(long)]
        q1: bool,
    },
    /// Enumerate one-parameter height-one ratios.
    Search {
        #[arg(long, default_value_t = 31)]
        max_sum: u64,
        #[arg(long, default_value_t = 2)]
        max_terms: usize,
    },
    /// List the registry families.
    Families,
}

fn run(cli: Cli) -> CommandOutput {
    let Cli {
        box_bound,
        d_max,
        budget,
        ..
    } = cli;
    match cli.command {
        Command::Check {
            spec,
            method,
            threshold,
        } => cmd_check(
            &spec,
            &CheckOptions {
                method,
                box_bound,
                d_max,
                threshold,
            },
        ),
        Command::Qpoly { spec, point, format } => match point_arg(&point) {
            Ok(p) => cmd_qpoly(&spec, &p, format),
            Err(e) => CommandOutput {
                text: format!("error: {e}\n"),
                json: serde_json::json!({ "command": "qpoly", "error": e }),
                exit_code: EXIT_INPUT,
                csv: None,
            },
        },
        Command::Positivity { spec, .. } => cmd_positivity(&spec, box_bound),
        Command::Ct { m, n, q1 } => cmd_ct(m, n, q1, budget),
        Command::Search { max_sum, max_terms } => cmd_search(max_sum, max_terms),
        Command::Families => cmd_families(),
    }
}

/// Accepts `1,0` or `at (1,0)`.
fn point_arg(words: &[String]) -> Result<Vec<i64>, String> {
    match words {
        [p] => parse_point(p),
        [at, p] if at == "at" => parse_point(p),
        _ => Err(format!("expected a point such as 1,0, got {:?}", words.join(" "))),
    }
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let csv_path = match &cli.command {
        Command::Positivity { csv, .. } => csv.clone(),
        _ => None,
    };
    let (jobs, timing, json_path) = (cli.jobs, cli.timing, cli.json.clone());
    let start = Instant::now();
    let mut out = with_jobs(jobs, || run(cli));
    let elapsed = start.elapsed();

    if timing {
        if let Some(obj) = out.json.as_object_mut() {
            obj.insert("wall_time_ms".into(), serde_json::json!(elapsed.as_millis() as u64));
        }
    }
    if out.exit_code == EXIT_INPUT {
        eprint!("{}", out.text);
    } else {
        print!("{}", out.text);
    }
    if let Some(path) = &json_path {
        let text = serde_json::to_string_pretty(&out.json).expect("json") + "\n";
        if let Err(e) = write_file(path, &text) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    if let (Some(path), Some(csv)) = (&csv_path, &out.csv) {
        if let Err(e) = write_file(path, csv) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    ExitCode::from(out.exit_code as u8)
}
