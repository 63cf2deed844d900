mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn run(cli: Cli) -> starcons::Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| starcons::Error::ParameterBounds(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Slem(a) => commands::slem_cmd(a),
        Command::Table(a) => commands::table_cmd(a),
        Command::Fig(a) => commands::fig_cmd(a),
        Command::Verify(a) => commands::verify_cmd(a),
        Command::Graph(a) => commands::graph_cmd(a),
        Command::Weights(a) => commands::weights_cmd(a),
        Command::Spectrum(a) => commands::spectrum_cmd(a),
        Command::Charfn(a) => commands::charfn_cmd(a),
        Command::Simulate(a) => commands::simulate_cmd(a),
        Command::Optimize(a) => commands::optimize_cmd(a),
        Command::Slackness(a) => commands::slackness_cmd(a),
        Command::Kmax(a) => commands::kmax_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
