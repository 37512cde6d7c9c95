//! Plugs a user-defined scorer into the conformal procedure: the number of
//! length-3 paths between the two endpoints.
//!
//! cargo run --release --example custom_predictor

use conflink::conformal::{conformal_link_predict_with, ConformalConfig};
use conflink::generator::{gen_sbm, make_experiment, ExperimentDesign, SbmParams};
use conflink::graph::{ObservedGraph, Pair};
use conflink::harness::{fdp, tdp};
use conflink::scoring::LinkPredictor;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct ThreePaths;

impl LinkPredictor for ThreePaths {
    fn name(&self) -> &str {
        "paths3"
    }

    fn score(&self, graph: &ObservedGraph, pair: Pair) -> f64 {
        let nj = graph.neighbors(pair.j).expect("pair was validated");
        let mut count = 0usize;
        for &u in graph.neighbors(pair.i).expect("pair was validated") {
            for &v in graph.neighbors(u).expect("valid node") {
                count += nj.binary_search(&v).is_ok() as usize;
            }
        }
        count as f64
    }
}

fn main() -> conflink::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let params = SbmParams::five_class_hub(0.5, 0.05);
    let a_star = gen_sbm(&params, 100, false, true, &mut rng)?.adjacency;
    let design = ExperimentDesign {
        pi_mis: 0.1,
        ratio_h0_h1: 0.5,
        cal_size: 5000,
    };
    let (observed, truth) = make_experiment(&a_star, &design, &mut rng)?;

    for alpha in [0.1, 0.2, 0.3] {
        let config = ConformalConfig {
            alpha,
            ..ConformalConfig::default()
        };
        let result = conformal_link_predict_with(&observed, Box::new(ThreePaths), &config, 9)?;
        println!(
            "alpha = {alpha}: |R| = {:>3}, FDP = {:.3}, TDP = {:.3}",
            result.len(),
            fdp(&result.selected, &truth.h0),
            tdp(&result.selected, &truth.h1)
        );
    }
    Ok(())
}
