use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use beamforge::runner::{
    dump_scenario_sdp, parse_values, run_scenario, run_study, run_verify, Scenario, StudyKind,
};
use beamforge::Result;

/// Transmit beampattern design for colocated MIMO radar.
#[derive(Parser)]
#[command(name = "beamforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design one scenario and write `<name>.result.json` and `<name>.beampattern.csv`.
    Design {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the convex program as `<name>.sdp` (sdp-dump v1).
        #[arg(long)]
        dump_sdp: bool,
    },
    /// Sweep one parameter of a scenario and print a CSV table.
    Study {
        /// q_sweep, m_sweep or rank_vs_width.
        #[arg(long)]
        kind: StudyKind,
        #[arg(long)]
        config: PathBuf,
        /// Comma list (`4,8,12`) or inclusive range (`5:160:5`).
        #[arg(long)]
        values: String,
        /// Write the table here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle suite and print a JSON pass/fail manifest.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Design {
            config,
            out,
            dump_sdp,
        } => {
            let s = Scenario::load(&config)?;
            if dump_sdp {
                if let Some(text) = dump_scenario_sdp(&s)? {
                    std::fs::create_dir_all(&out)?;
                    std::fs::write(out.join(format!("{}.sdp", s.name)), text)?;
                } else {
                    log::warn!(
                        "method {:?} solves no convex program; nothing to dump",
                        s.method
                    );
                }
            }
            let o = run_scenario(&s, &out)?;
            println!("{}", o.json_path.display());
            println!("{}", o.csv_path.display());
            Ok(true)
        }
        Command::Study {
            kind,
            config,
            values,
            out,
        } => {
            let s = Scenario::load(&config)?;
            let table = run_study(kind, &s, &parse_values(&values)?)?;
            let csv = table.to_csv();
            match out {
                Some(p) => std::fs::write(p, csv)?,
                None => print!("{csv}"),
            }
            Ok(table.rows.iter().all(|r| r.status == "ok"))
        }
        Command::Verify { seed } => {
            let manifest = run_verify(seed);
            println!("{}", serde_json::to_string_pretty(&manifest)?);
            Ok(manifest.passed)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
