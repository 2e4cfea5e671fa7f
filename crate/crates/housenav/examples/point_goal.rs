//! Low-level point-goal navigation: the grid A* oracle and the calibrated
//! stochastic surrogate.
//!
//! The oracle follows a shortest 4-connected path; the surrogate replays an
//! oracle path inflated with detours and occasionally fails with a random
//! walk, matching the published success/efficiency rates of a learned
//! point-goal policy.
//!
//! Run with: `cargo run --example point_goal`

use housenav::knowledge::KnowledgeBase;
use housenav::nav::{navigate_ornav, PnavSurrogate, PointGoal, SurrogateParams};
use housenav::sim::{
    generate_house, AgentState, Heading, HouseSpec, PerceptionConfig, SimSession,
};

fn main() -> anyhow::Result<()> {
    let kb = KnowledgeBase::bundled();
    let house = generate_house(&HouseSpec::new(5, 11), &kb)?;

    // Navigate from the first room's center to the last room's center.
    let (sx, sy) = house.rooms[0].bounds.center();
    let (gx, gy) = house.rooms.last().unwrap().bounds.center();
    let start = house.nearest_passable_cell(sx, sy).unwrap();
    let goal = PointGoal::new((gx, gy));

    let mut session = SimSession::new(
        &house,
        AgentState::new(start, Heading::North),
        PerceptionConfig::ground_truth(),
        0,
    );
    let oracle = navigate_ornav(&mut session, &goal);
    println!(
        "oracle:    success={} steps={} path={:.2} m",
        oracle.success, oracle.steps_taken, oracle.path_length
    );

    // The surrogate is seeded: the same seed gives the same outcome.
    for seed in 0..3u64 {
        let mut session = SimSession::new(
            &house,
            AgentState::new(start, Heading::North),
            PerceptionConfig::ground_truth(),
            0,
        );
        let mut pnav = PnavSurrogate::new(SurrogateParams::calibrated(seed));
        let r = pnav.navigate(&mut session, &goal);
        println!(
            "surrogate (seed {seed}): success={} steps={} path={:.2} m",
            r.success, r.steps_taken, r.path_length
        );
    }

    // Measured over many goals, the surrogate hits its calibration targets.
    let params = SurrogateParams::calibrated(1);
    let mut successes = 0;
    let n = 500;
    for i in 0..n {
        let mut session = SimSession::new(
            &house,
            AgentState::new(start, Heading::North),
            PerceptionConfig::ground_truth(),
            0,
        );
        let mut pnav = PnavSurrogate::new(SurrogateParams {
            rng_seed: i,
            ..params
        });
        if pnav.navigate(&mut session, &goal).success {
            successes += 1;
        }
    }
    println!(
        "surrogate cross-room SR over {n} trials: {:.3} (target 0.845)",
        successes as f64 / n as f64
    );

    Ok(())
}
