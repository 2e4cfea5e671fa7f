//! Run the full experiment matrix on a small dataset and print the
//! comparison table.
//!
//! Episodes run in parallel; per-config rows report SR, SPL, and mean
//! Kendall tau over successes. The privileged baseline (true target
//! coordinates, sequential point goals) is appended last, with no ordering
//! metric since its visit order is fixed.
//!
//! Run with: `cargo run --example benchmark_matrix`

use housenav::bench::generate_dataset;
use housenav::episode::{run_matrix, LowLevelKind, RunConfig, SceneGraphMode};
use housenav::knowledge::KnowledgeBase;

fn main() -> anyhow::Result<()> {
    let kb = KnowledgeBase::bundled();
    let episodes = generate_dataset(20, 3..=7, "demo", 9, &kb)?;

    let configs = vec![
        (
            "gt_ornav".to_string(),
            RunConfig::new(SceneGraphMode::Gt, LowLevelKind::OrNav, 1),
        ),
        (
            "vo_ornav".to_string(),
            RunConfig::new(SceneGraphMode::Vo, LowLevelKind::OrNav, 1),
        ),
        (
            "vo_pnavs".to_string(),
            RunConfig::new(SceneGraphMode::Vo, LowLevelKind::PNavS, 1),
        ),
    ];

    let report = run_matrix(&episodes, &configs, &kb, 1)?;

    println!("| Config | SR | SPL | KT | n |");
    println!("|--------|----|-----|----|---|");
    for row in &report.rows {
        let kt = row
            .metrics
            .kendall_tau
            .map_or("N/A".to_string(), |t| format!("{t:.3}"));
        println!(
            "| {} | {:.1}% | {:.3} | {} | {} |",
            row.name,
            row.metrics.sr * 100.0,
            row.metrics.spl,
            kt,
            row.metrics.n_episodes
        );
    }

    Ok(())
}
