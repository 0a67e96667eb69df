use clap::Parser;
use cs_higgs::cli::{run, ExperimentConfig};

fn main() {
    let cfg = ExperimentConfig::parse();
    std::process::exit(run(&cfg));
}
