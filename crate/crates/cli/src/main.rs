use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use densefactor_cli::scenario::parse_scenario;
use densefactor_cli::{rejected, run, Command, Exit, Overrides};

#[derive(Parser)]
#[command(name = "densefactor", version, about = "Factorizations G = AB from scenario files")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    stages: Option<usize>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long)]
    up_to: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage.code() as u8 } else { 0 });
        }
    };
    let text = match std::fs::read_to_string(&cli.scenario) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("densefactor: cannot read {}: {e}", cli.scenario.display());
            return ExitCode::from(Exit::Usage.code() as u8);
        }
    };
    let outcome = match parse_scenario(&text) {
        Ok(mut scenario) => {
            Overrides {
                steps: cli.steps,
                stages: cli.stages,
                probes: cli.probes,
                up_to: cli.up_to,
            }
            .apply(&mut scenario);
            run(cli.command, &scenario)
        }
        Err(e) => rejected(cli.command, &e),
    };
    print!("{}", outcome.text());
    ExitCode::from(outcome.exit.code() as u8)
}
