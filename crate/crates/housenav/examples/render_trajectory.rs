//! Render an episode trajectory as a top-down SVG.
//!
//! The drawing shows room outlines with type labels, doors, object
//! markers, the agent's path from the trace's pose events, and a green
//! marker where each target was found.
//!
//! Run with: `cargo run --example render_trajectory`

use housenav::bench::{episode_house, generate_dataset, render_topdown};
use housenav::episode::{run_episode, LowLevelKind, RunConfig, SceneGraphMode};
use housenav::knowledge::KnowledgeBase;

fn main() -> anyhow::Result<()> {
    let kb = KnowledgeBase::bundled();
    let episodes = generate_dataset(1, 5..=5, "demo", 2024, &kb)?;
    let ep = &episodes[0];
    let house = episode_house(ep, &kb)?;

    let cfg = RunConfig::new(SceneGraphMode::Gt, LowLevelKind::OrNav, 3);
    let result = run_episode(&house, ep, &cfg, &kb);
    println!(
        "episode: success={} steps={} found={:?}",
        result.success,
        result.steps,
        result.found.iter().map(|f| f.category.as_str()).collect::<Vec<_>>()
    );

    let svg = render_topdown(&house, &result.trace)?;
    let out = std::env::temp_dir().join("trajectory.svg");
    std::fs::write(&out, &svg)?;
    println!("wrote {} ({} bytes)", out.display(), svg.len());

    Ok(())
}
