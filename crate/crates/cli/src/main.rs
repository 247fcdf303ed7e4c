use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wpp_cli::checks::{scan, Check};
use wpp_cli::render::{render, Format, What};
use wpp_cli::report::{build_report, report_schema};
use wpp_cli::{eps_text, CliError};
use wpp_core::{build_resolution, ChopSide, EpsSchedule, PolygonError};

#[derive(Parser)]
#[command(
    name = "wpp",
    version,
    about = "Minimal resolutions of weighted projective planes CP(a,b,c)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve one triple and print its report.
    Resolve {
        a: u64,
        b: u64,
        c: u64,
        /// Moment triangle T_1 … T_6.
        #[arg(long, default_value_t = 1)]
        presentation: usize,
        /// Truncation schedule: `default`, `geom:F:R` or `a=e1,e2;c=…`.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, conflicts_with = "text")]
        json: bool,
        #[arg(long)]
        text: bool,
    },
    /// Check every pairwise coprime triple 2 ≤ a < b < c ≤ max-c.
    Scan {
        #[arg(long)]
        max_c: u64,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Check::All)]
        check: Check,
        #[arg(long)]
        eps: Option<String>,
        /// Print the full per-triple outcomes as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Draw the resolved polygon, the boundary strings or the ruling.
    Render {
        a: u64,
        b: u64,
        c: u64,
        #[arg(long, value_enum, default_value_t = What::Polygon)]
        what: What,
        #[arg(long, value_enum, default_value_t = Format::Svg)]
        format: Format,
        #[arg(long, default_value_t = 1)]
        presentation: usize,
        #[arg(long)]
        eps: Option<String>,
    },
    /// Print the JSON schema of the `resolve --json` report.
    Schema,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Resolve {
            a,
            b,
            c,
            presentation,
            eps,
            json,
            text: _,
        } => {
            let report = build_report([a, b, c], presentation, &eps_text(eps.as_deref()))?;
            if json {
                let s = serde_json::to_string_pretty(&report).map_err(|e| CliError::Violation(e.to_string()))?;
                println!("{s}");
            } else {
                print!("{}", report.to_text());
            }
            if let Some(v) = report.violations.first() {
                return Err(CliError::Violation(format!(
                    "{} violation(s), first: {v}",
                    report.violations.len()
                )));
            }
            Ok(())
        }
        Command::Scan {
            max_c,
            jobs,
            check,
            eps,
            json,
        } => {
            let schedule: EpsSchedule = eps_text(eps.as_deref())
                .parse()
                .map_err(|e: PolygonError| CliError::Input(e.to_string()))?;
            let summary = scan(max_c, jobs, check, &schedule)?;
            if json {
                let s = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Violation(e.to_string()))?;
                println!("{s}");
            } else {
                println!(
                    "triples {}  resolutions {}  check {}",
                    summary.triples, summary.resolutions, summary.check
                );
                println!(
                    "embedded-fiber {}  unicuspidal {}",
                    summary.embedded_fiber, summary.unicuspidal
                );
                println!(
                    "{:>14} {:>4} {:>7} {:>15} {:>10}",
                    "triple", "n", "[N_c]²", "case", "violations"
                );
                for o in &summary.outcomes {
                    let [a, b, c] = o.triple;
                    println!(
                        "{:>14} {:>4} {:>7} {:>15} {:>10}",
                        format!("({a},{b},{c})"),
                        o.n,
                        o.nc_selfint,
                        o.case.as_deref().unwrap_or("-"),
                        o.violations.len()
                    );
                }
            }
            if let Some(v) = summary.first_violation() {
                let total = summary.violations().count();
                return Err(CliError::Violation(format!(
                    "{total} violation(s); first [{}] {}\nreproduce with: {}",
                    v.check,
                    v.message,
                    v.reproducer()
                )));
            }
            Ok(())
        }
        Command::Render {
            a,
            b,
            c,
            what,
            format,
            presentation,
            eps,
        } => {
            let schedule: EpsSchedule = eps_text(eps.as_deref())
                .parse()
                .map_err(|e: PolygonError| CliError::Input(e.to_string()))?;
            let r = build_resolution(a, b, c, presentation, &schedule, ChopSide::Intrinsic)?;
            print!("{}", render(&r, what, format));
            Ok(())
        }
        Command::Schema => {
            print!("{}", report_schema());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
