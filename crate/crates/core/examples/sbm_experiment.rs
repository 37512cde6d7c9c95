//! Monte-Carlo comparison of the conformal procedure with the two
//! thresholding baselines on the five-class block model.
//!
//! cargo run --release --example sbm_experiment -- [replications]

use conflink::harness::{aggregate, format_summary, run_experiment, ExperimentConfig};

fn main() -> conflink::Result<()> {
    let mut config = ExperimentConfig::block_model_study();
    if let Some(reps) = std::env::args().nth(1) {
        config.replications = reps.parse().expect("replications must be an integer");
    }
    let records = run_experiment(&config, true)?;
    print!("{}", format_summary(&aggregate(&records)));
    Ok(())
}
