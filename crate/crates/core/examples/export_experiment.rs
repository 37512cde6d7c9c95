//! Writes a simulated experiment as edge, mask and truth files that the
//! `conflink predict` and `conflink evaluate` commands read.
//!
//! cargo run --example export_experiment -- out_dir
//! conflink predict out_dir/edges.txt out_dir/mask.txt --alpha 0.2 --output sel.txt
//! conflink evaluate sel.txt out_dir/truth.txt

use std::path::PathBuf;

use conflink::harness::{replication_experiment, ExperimentConfig};
use conflink::io::export_experiment;

fn main() -> conflink::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "experiment".into()),
    );
    let config = ExperimentConfig::block_model_study();
    let (observed, truth) = replication_experiment(&config, 0)?;
    for path in export_experiment(&dir, &observed, &truth)? {
        println!("wrote {}", path.display());
    }
    println!(
        "{} observed edges, {} hidden true edges, {} hidden non-edges",
        observed.edge_count(),
        truth.h1.len(),
        truth.h0.len()
    );
    Ok(())
}
