//! Walks the five-node toy observation through every step of the
//! procedure: partition, reference masking, scoring, p-values, selection.
//!
//! cargo run --example toy_walkthrough

use conflink::conformal::{ck_select, ScoreTable};
use conflink::graph::{mask_reference, partition_pairs, GraphBuilder};
use conflink::scoring::cn_score;

fn main() -> conflink::Result<()> {
    let graph = GraphBuilder::new(5, false)
        .self_pairs(false)
        .edges([(0, 1), (0, 3), (1, 2), (1, 4), (2, 4)])
        .unsampled_pairs([(1, 3), (2, 3)])
        .build()?;

    let sets = partition_pairs(&graph);
    println!("observed true edges : {:?}", fmt(sets.dtr_alt()));
    println!("observed non-edges  : {:?}", fmt(sets.dtr_null()));
    println!("test pairs          : {:?}", fmt(sets.dtest()));

    // Every observed non-edge serves as a reference pair.
    let dcal = sets.dtr_null().to_vec();
    let masked = mask_reference(&graph, &dcal)?;
    println!(
        "masked graph hides {} pairs",
        masked.unsampled_pairs().count()
    );

    let cal: Vec<f64> = dcal.iter().map(|&p| cn_score(&masked, p)).collect();
    let test: Vec<_> = sets
        .dtest()
        .iter()
        .map(|&p| (p, cn_score(&masked, p)))
        .collect();
    let table = ScoreTable::new(cal.clone(), test.clone())?;
    let pvalues = table.pvalues()?;
    println!("reference CN scores : {cal:?}");
    for ((pair, score), p) in test.iter().zip(&pvalues) {
        println!("  {pair}: CN = {score}, p = {p:.3}");
    }

    for alpha in [0.5, 0.9] {
        let result = ck_select(&table, alpha)?;
        println!("alpha = {alpha}: selected {:?}", fmt(&result.selected));
    }
    Ok(())
}

fn fmt(pairs: &[conflink::graph::Pair]) -> Vec<String> {
    pairs.iter().map(|p| p.to_string()).collect()
}
