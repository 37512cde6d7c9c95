//! Trains the logistic pair scorer on a block-model observation and uses it
//! for conformal selection.
//!
//! cargo run --release --example logistic_scorer

use conflink::conformal::{conformal_link_predict, ConformalConfig};
use conflink::generator::{gen_sbm, make_experiment, ExperimentDesign, SbmParams};
use conflink::harness::{fdp, tdp};
use conflink::scoring::{fit_logistic_erm, ScorerKind, TrainConfig, FEATURE_NAMES};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> conflink::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let params = SbmParams::five_class_hub(0.5, 0.05);
    let a_star = gen_sbm(&params, 100, false, true, &mut rng)?.adjacency;
    let design = ExperimentDesign {
        pi_mis: 0.1,
        ratio_h0_h1: 0.5,
        cal_size: 5000,
    };
    let (observed, truth) = make_experiment(&a_star, &design, &mut rng)?;

    let fit = fit_logistic_erm(&observed, &TrainConfig::default(), &mut rng)?;
    println!(
        "trained on {} pairs, loss {:.4} -> {:.4}",
        fit.training_pairs.len(),
        fit.loss_history[0],
        fit.loss_history.last().unwrap()
    );
    for (name, w) in FEATURE_NAMES.iter().zip(&fit.model.weights) {
        println!("  {name:<14} {w:+.3}");
    }

    // A trained scorer needs negatives outside the reference set, so the
    // reference set takes only part of the observed non-edges.
    let kind = ScorerKind::Logistic(TrainConfig::default());
    for alpha in [0.1, 0.2, 0.3] {
        let config = ConformalConfig {
            alpha,
            cal_size: 2000,
            ..ConformalConfig::default()
        };
        let result = conformal_link_predict(&observed, &kind, &config, 5)?;
        println!(
            "alpha = {alpha}: |R| = {:>3}, FDP = {:.3}, TDP = {:.3}",
            result.len(),
            fdp(&result.selected, &truth.h0),
            tdp(&result.selected, &truth.h1)
        );
    }
    Ok(())
}
