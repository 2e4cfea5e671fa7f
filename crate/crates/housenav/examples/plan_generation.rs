//! High-level plan generation: the offline heuristic backend and the LLM
//! backend driven through a scripted transport.
//!
//! Both backends speak the same two-verb plan language
//! (`navigate(<id>)` / `look()`), so plans are parsed, validated against
//! the room subgraph, and rendered back identically. The LLM backend falls
//! back to the heuristic whenever the model output fails to parse or names
//! unknown targets.
//!
//! Run with: `cargo run --example plan_generation`

use std::collections::BTreeSet;

use housenav::graph::{extract_subgraph, subgraph_to_text, SceneGraph};
use housenav::knowledge::KnowledgeBase;
use housenav::plan::{
    parse_plan, render_plan, HeuristicPlanner, LlmPlanner, PlanBackend, PlannerConfig,
    ScriptedTransport,
};
use housenav::sim::{
    generate_house, AgentState, Heading, HouseSpec, PerceptionConfig, SimSession,
};

fn main() -> anyhow::Result<()> {
    let kb = KnowledgeBase::bundled();
    let house = generate_house(&HouseSpec::new(3, 5), &kb)?;

    // Observe one room to get a subgraph for the planner.
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
    graph.integrate_observation(&kb, room, &obs);
    let sub = extract_subgraph(&graph, room)?;
    println!("room as the planner sees it:\n{}", subgraph_to_text(&sub));

    let unfound: BTreeSet<String> =
        ["laptop", "apple", "book"].iter().map(|s| s.to_string()).collect();

    // Heuristic backend: room-type vote, feasibility, landmark-ordered plan.
    let mut heuristic = HeuristicPlanner::new(&kb, PlannerConfig::default());
    let room_type = heuristic.identify_room_type(&sub);
    let feasibility = heuristic.assess_feasibility(&room_type, &unfound);
    println!("room type vote: {room_type}");
    println!("feasibility: {feasibility:?}");
    let plan = heuristic.generate_plan(&sub, &unfound);
    println!("heuristic plan ({:?}):\n{}", plan.source, render_plan(&plan.steps));

    // The plan language round-trips through its parser.
    let reparsed = parse_plan(&render_plan(&plan.steps))?;
    assert_eq!(reparsed, plan.steps);

    // LLM backend with a scripted transport: first call returns a valid
    // plan; the second returns junk, exercising the heuristic fallback.
    let valid = if let Some(first) = sub.larges.first() {
        format!("navigate({})  # head to the landmark\nlook()  # scan", first.id)
    } else {
        "look()  # scan the room".to_string()
    };
    let transport = ScriptedTransport::new([valid, "I cannot help with that.".to_string()]);
    let mut llm = LlmPlanner::new(&kb, PlannerConfig::default(), Box::new(transport));

    let plan = llm.generate_plan(&sub, &unfound);
    println!("scripted llm plan ({:?}):\n{}", plan.source, render_plan(&plan.steps));
    let plan = llm.generate_plan(&sub, &unfound);
    println!("after junk reply, fallback ({:?}):\n{}", plan.source, render_plan(&plan.steps));

    println!("transcript: {} exchanges", llm.transcript().len());
    Ok(())
}
