// Copyright 2026 GKSL Numerics Contributors
// SPDX-License-Identifier: Apache-2.0

use clap::Parser;

use gksl_cli::{exit_code, run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if outcome.failures.is_empty() {
                std::process::exit(0);
            }
            for f in &outcome.failures {
                eprintln!("band failure: {f}");
            }
            std::process::exit(1);
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}
