use clap::Parser;

use dynmeasure::cli::{emit, run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = emit(&cli, run(&cli));
    std::process::exit(code);
}
