//! Effect of running the selection at `α / π̂₀` instead of `α`, with the
//! ratio and Storey estimates of the null proportion.
//!
//! cargo run --release --example pi0_adjustment

use conflink::conformal::{Adjustment, CalibratedScores};
use conflink::harness::{fdp, replication_experiment, tdp, ExperimentConfig};
use conflink::scoring::ScorerKind;

fn main() -> conflink::Result<()> {
    let config = ExperimentConfig::block_model_study();
    let adjustments = [
        ("none", Adjustment::None),
        ("ratio", Adjustment::Ratio),
        ("storey", Adjustment::Storey { lambda: 0.5 }),
    ];
    let alpha = 0.3;
    let reps = 50;
    for (name, adjustment) in adjustments {
        let (mut f, mut t, mut level) = (0.0, 0.0, 0.0);
        for rep in 0..reps {
            let (observed, truth) = replication_experiment(&config, rep)?;
            let scores =
                CalibratedScores::prepare(&observed, ScorerKind::CN.predictor(), 5000, rep as u64)?;
            let result = scores.select(alpha, adjustment)?;
            f += fdp(&result.selected, &truth.h0);
            t += tdp(&result.selected, &truth.h1);
            level += result.alpha_used;
        }
        let r = reps as f64;
        println!(
            "{name:<7} mean level {:.3}  FDR {:.3}  TDR {:.3}",
            level / r,
            f / r,
            t / r
        );
    }
    Ok(())
}
