//! Counting Knockoff on raw score tables, checked against
//! Benjamini-Hochberg on the conformal p-values.
//!
//! cargo run --example counting_knockoff

use conflink::conformal::{bh_select, ck_select, ScoreTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> conflink::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // 200 reference scores from the null, 40 null and 20 shifted test scores.
    let cal: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
    let mut test: Vec<f64> = (0..40).map(|_| rng.random::<f64>()).collect();
    test.extend((0..20).map(|_| 0.8 + 0.4 * rng.random::<f64>()));
    let table = ScoreTable::from_scores(cal, &test)?;

    let pvalues = table.pvalues()?;
    for alpha in [0.05, 0.1, 0.2] {
        let ck = ck_select(&table, alpha)?;
        let bh = bh_select(&pvalues, alpha);
        let false_hits = ck.selected.iter().filter(|p| p.j.index() < 40).count();
        println!(
            "alpha = {alpha:<4} |R| = {:>2}  false = {:>2}  t = {:?}  same as BH: {}",
            ck.len(),
            false_hits,
            ck.threshold,
            ck.len() == bh.len()
        );
    }
    Ok(())
}
