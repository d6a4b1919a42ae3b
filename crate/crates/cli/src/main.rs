use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

mod commands;
mod report;

use commands::{Cli, Status};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap routes help to stdout and errors to stderr.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let result = commands::run(&cli);
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(out) => {
            let rep = report::Report::new(&argv[1..], &out, cli.precision_bits, seconds);
            if cli.json {
                println!("{}", rep.to_json());
            } else {
                print!("{}", out.text);
            }
            match out.status {
                Status::Ok => ExitCode::SUCCESS,
                Status::Negative(why) => {
                    eprintln!("{why}");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
