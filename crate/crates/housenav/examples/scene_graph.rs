//! Build a scene graph incrementally from perception sweeps.
//!
//! The graph has four levels — house, rooms, large objects (landmarks),
//! small objects — plus door edges. Integration is idempotent: repeating a
//! sweep adds nothing, and every percept lands under exactly one parent.
//!
//! Run with: `cargo run --example scene_graph`

use housenav::graph::{extract_subgraph, subgraph_to_text, SceneGraph};
use housenav::knowledge::KnowledgeBase;
use housenav::sim::{
    generate_house, AgentState, Heading, HouseSpec, PerceptionConfig, SimSession,
};

fn main() -> anyhow::Result<()> {
    let kb = KnowledgeBase::bundled();
    let house = generate_house(&HouseSpec::new(3, 5), &kb)?;

    let (cx, cy) = house.rooms[0].bounds.center();
    let start = house.nearest_passable_cell(cx, cy).unwrap();
    let mut session = SimSession::new(
        &house,
        AgentState::new(start, Heading::East),
        PerceptionConfig::ground_truth(),
        0,
    );

    let mut graph = SceneGraph::new();
    let room = graph.create_room();

    let obs = session.look_around();
    let delta = graph.integrate_observation(&kb, room, &obs);
    println!(
        "first sweep:  {} nodes created, {} updated: {:?}",
        delta.created.len(),
        delta.updated.len(),
        delta.created
    );

    // The same observation integrates to an empty delta.
    let delta = graph.integrate_observation(&kb, room, &obs);
    assert!(delta.is_empty());
    println!("second sweep: no change (idempotent)");

    // The per-room subgraph is what the high-level planner sees, rendered
    // as compact text for prompting.
    let sub = extract_subgraph(&graph, room)?;
    println!(
        "\nsubgraph for {}: {} nodes, {} edges",
        sub.room_id,
        sub.node_count(),
        sub.edge_count()
    );
    println!("{}", subgraph_to_text(&sub));

    // The full graph snapshot serializes for inspection or logging.
    println!("snapshot:\n{}", serde_json::to_string_pretty(&graph.snapshot_json())?);

    Ok(())
}
