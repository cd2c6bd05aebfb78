use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use flexsolve::extnum::Neutrix;
use flexsolve::parse::{parse_point, parse_system};
use flexsolve::render::{
    format_echelon, format_feasibility, format_robustness, format_solution_full, Mode,
};
use flexsolve::robustness::{is_feasible_system_with, robustness_matrix};
use flexsolve::solver::{integrate, run_pipeline, solution_membership, solution_equiv, solve,
    Equivalence, FlexibleSystem};

#[derive(Parser)]
#[command(name = "flexsolve", version, about = "Exact solver for flexible systems of linear inclusions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Emit scalar coefficients as explicit lists in JSON output.
    #[arg(long, global = true)]
    exact: bool,
    /// Largest minor order evaluated by determinant-based checks.
    #[arg(long, global = true, default_value_t = 8)]
    max_det_order: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Files {
    #[arg(required = true)]
    files: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve each system and print its solution set.
    Solve(Files),
    /// Print the integrated and echelon forms, permutation and rank.
    Echelon(Files),
    /// Print the feasibility space and constraint rows.
    Feasibility(Files),
    /// Robustness matrix of a real reduced system with external right side.
    Robustness(Files),
    /// Test a point for membership in the solution set.
    Check {
        file: String,
        #[arg(long)]
        point: String,
    },
    /// Compare the solution sets of two systems.
    Equiv { first: String, second: String },
}

fn mode(f: Format) -> Mode {
    match f {
        Format::Text => Mode::Text,
        Format::Json => Mode::Json,
    }
}

fn load(path: &str) -> Result<FlexibleSystem, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    parse_system(&text).map_err(|e| format!("{path}: {e}"))
}

/// Exit 0 on success, 1 when a result is negative (inconsistent, not
/// equivalent, inconclusive, precondition failure), 2 on usage or parse
/// errors.
fn run(cli: &Cli) -> Result<u8, String> {
    let m = mode(cli.format);
    match &cli.cmd {
        Cmd::Solve(fs) => {
            let mut worst = 0u8;
            for f in &fs.files {
                let s = load(f)?;
                let p = run_pipeline(&s);
                println!(
                    "{}",
                    format_solution_full(&p.solution, p.echelon.permutation(), m, cli.exact)
                );
                if !p.solution.is_consistent() {
                    worst = 1;
                }
            }
            Ok(worst)
        }
        Cmd::Echelon(fs) => {
            for f in &fs.files {
                let s = load(f)?;
                let p = run_pipeline(&s);
                print!("{}", ensure_newline(format_echelon(&p, m, cli.exact)));
            }
            Ok(0)
        }
        Cmd::Feasibility(fs) => {
            let mut worst = 0u8;
            for f in &fs.files {
                let s = load(f)?;
                let integrated = integrate(&s);
                let verdict = is_feasible_system_with(&s, cli.max_det_order).ok();
                if !matches!(
                    verdict,
                    None | Some(flexsolve::robustness::Feasibility::Feasible)
                ) {
                    worst = 1;
                }
                print!(
                    "{}",
                    ensure_newline(format_feasibility(
                        integrated.feasibility(),
                        integrated.constrained_cols(),
                        verdict.as_ref(),
                        m,
                    ))
                );
            }
            Ok(worst)
        }
        Cmd::Robustness(fs) => {
            let mut worst = 0u8;
            for f in &fs.files {
                let s = load(f)?;
                if s.coefficients()
                    .neutrix_grid()
                    .iter()
                    .flatten()
                    .any(|n| *n != Neutrix::Zero)
                {
                    return Err(format!("{f}: coefficient matrix must be exact"));
                }
                match robustness_matrix(&s.coefficients().representative(), s.rhs()) {
                    Ok(report) => print!("{}", ensure_newline(format_robustness(&report, m))),
                    Err(e) => {
                        eprintln!("{f}: {e}");
                        worst = 1;
                    }
                }
            }
            Ok(worst)
        }
        Cmd::Check { file, point } => {
            let s = load(file)?;
            let x = parse_point(point).map_err(|e| format!("point: {e}"))?;
            if x.len() != s.unknowns() {
                return Err(format!(
                    "point has {} coordinates, system has {} unknowns",
                    x.len(),
                    s.unknowns()
                ));
            }
            let z = solve(&s);
            let member = solution_membership(&z, &x);
            println!("{}", if member { "member" } else { "not a member" });
            Ok(if member { 0 } else { 1 })
        }
        Cmd::Equiv { first, second } => {
            let s1 = load(first)?;
            let s2 = load(second)?;
            let z1 = solve(&s1);
            let z2 = solve(&s2);
            let eq = solution_equiv(&z1, &z2).map_err(|e| e.to_string())?;
            println!("{eq}");
            Ok(if eq == Equivalence::Equal { 0 } else { 1 })
        }
    }
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
