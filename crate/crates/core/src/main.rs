// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

use clap::Parser;

fn main() {
    let cli = semilab::cli::Cli::parse();
    std::process::exit(semilab::cli::execute(&cli));
}
