use super::*;
use crate::bench::{generate_dataset, Target};
use crate::sim::{generate_house, HouseSpec};

fn kb() -> KnowledgeBase {
    KnowledgeBase::bundled()
}

fn gt_config(seed: u64) -> RunConfig {
    RunConfig::new(SceneGraphMode::Gt, LowLevelKind::OrNav, seed)
}

#[test]
fn targets_in_start_room_solved_without_doors() {
    let kb = kb();
    // Single-room houses put every target in the spawn room.
    let eps = generate_dataset(1, 1..=1, "val", 31, &kb).unwrap();
    let house = crate::bench::episode_house(&eps[0], &kb).unwrap();
    let r = run_episode(&house, &eps[0], &gt_config(1), &kb);
    assert!(r.success);
    assert_eq!(r.failure_reason, FailureReason::None);
    assert!(!r
        .trace
        .iter()
        .any(|e| matches!(e, TraceEvent::DoorTraversed { .. })));
}

#[test]
fn absent_target_fails_with_doors_exhausted() {
    let kb = kb();
    let spec = HouseSpec {
        room_type_mix: vec![("bedroom".to_string(), 1)],
        ..HouseSpec::new(1, 77)
    };
    let house = generate_house(&spec, &kb).unwrap();
    let center = house.rooms[0].bounds.center();
    let start = house.nearest_passable_cell(center.0, center.1).unwrap();
    let (sx, sy) = start.center();
    let ep = Episode {
        schema: crate::bench::EPISODE_SCHEMA_VERSION,
        data_type: "val".into(),
        house_idx: 0,
        num_rooms: 1,
        num_targets: 3,
        targets: vec![
            Target { category: "toilet".into(), position: [sx, sy] },
            Target { category: "shower".into(), position: [sx, sy] },
            Target { category: "toothbrush".into(), position: [sx, sy] },
        ],
        start_position: [sx, sy],
        start_heading: 0,
        shortest_path_targets_order: vec!["toilet".into(), "shower".into(), "toothbrush".into()],
        shortest_path_length: 1.0,
        house_seed: 77,
    };
    let r = run_episode(&house, &ep, &gt_config(2), &kb);
    assert!(!r.success);
    assert_eq!(r.failure_reason, FailureReason::DoorsExhausted);
}

#[test]
fn identical_seeds_give_identical_results() {
    let kb = kb();
    let eps = generate_dataset(1, 3..=4, "val", 51, &kb).unwrap();
    let house = crate::bench::episode_house(&eps[0], &kb).unwrap();
    let cfg = RunConfig::new(SceneGraphMode::Vo, LowLevelKind::PNavS, 9);
    let a = run_episode(&house, &eps[0], &cfg, &kb);
    let b = run_episode(&house, &eps[0], &cfg, &kb);
    assert_eq!(a, b);
    assert_eq!(
        serde_json::to_vec(&a).unwrap(),
        serde_json::to_vec(&b).unwrap()
    );
}

fn check_trace_invariants(r: &EpisodeResult) {
    // Budget accounting: total steps = nav primitives + 4 per sweep.
    let nav_steps: usize = r
        .trace
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Nav { steps_taken, .. } => Some(steps_taken),
            _ => None,
        })
        .sum();
    let looks = r
        .trace
        .iter()
        .filter(|e| matches!(e, TraceEvent::Look { .. }))
        .count();
    assert_eq!(r.steps, nav_steps + looks * crate::sim::LOOK_AROUND_COST);

    // Found step indices strictly increase.
    for pair in r.found.windows(2) {
        assert!(pair[0].step_index < pair[1].step_index);
    }

    // At most one generated plan per (room, unfound-set).
    let mut seen = std::collections::HashSet::new();
    for e in &r.trace {
        if let TraceEvent::PlanGenerated { room, unfound, .. } = e {
            assert!(
                seen.insert((room.clone(), unfound.clone())),
                "repeated plan for {room} {unfound:?}"
            );
        }
    }

    // A room skipped as fully infeasible is never planned at that step.
    for e in &r.trace {
        if let TraceEvent::Skipped { step, room, .. } = e {
            assert!(!r.trace.iter().any(|p| matches!(
                p,
                TraceEvent::PlanGenerated { step: s, room: pr, .. } if s == step && pr == room
            )));
        }
    }
}

#[test]
fn multiroom_episodes_hold_trace_invariants() {
    let kb = kb();
    let eps = generate_dataset(4, 3..=6, "val", 61, &kb).unwrap();
    for ep in &eps {
        let house = crate::bench::episode_house(ep, &kb).unwrap();
        let r = run_episode(&house, ep, &gt_config(3), &kb);
        check_trace_invariants(&r);
        assert_eq!(r.success, r.found.len() == 3);
        // Found positions stay within the association radius of a
        // ground-truth instance.
        for f in &r.found {
            let ok = house.objects.iter().any(|o| {
                o.category == f.category
                    && ((o.position[0] - f.position[0]).powi(2)
                        + (o.position[1] - f.position[1]).powi(2))
                    .sqrt()
                        <= crate::graph::ASSOCIATION_RADIUS
            });
            assert!(ok, "found {} away from any instance", f.category);
        }
    }
}

#[test]
fn vo_mode_episode_completes() {
    let kb = kb();
    let eps = generate_dataset(2, 3..=4, "val", 71, &kb).unwrap();
    for ep in &eps {
        let house = crate::bench::episode_house(ep, &kb).unwrap();
        let cfg = RunConfig::new(SceneGraphMode::Vo, LowLevelKind::OrNav, 4);
        let r = run_episode(&house, ep, &cfg, &kb);
        check_trace_invariants(&r);
    }
}

#[test]
fn trace_round_trips_through_jsonl() {
    let kb = kb();
    let eps = generate_dataset(1, 3..=3, "val", 81, &kb).unwrap();
    let house = crate::bench::episode_house(&eps[0], &kb).unwrap();
    let r = run_episode(&house, &eps[0], &gt_config(5), &kb);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.jsonl");
    write_trace(&path, &r.trace).unwrap();
    assert_eq!(read_trace(&path).unwrap(), r.trace);
}

#[test]
fn matrix_has_config_rows_plus_baseline() {
    let kb = kb();
    let eps = generate_dataset(3, 3..=4, "val", 91, &kb).unwrap();
    let configs = vec![
        ("gt_ornav".to_string(), gt_config(7)),
        (
            "vo_pnavs".to_string(),
            RunConfig::new(SceneGraphMode::Vo, LowLevelKind::PNavS, 7),
        ),
    ];
    let report = run_matrix(&eps, &configs, &kb, 7).unwrap();
    assert_eq!(report.rows.len(), 3);
    assert_eq!(report.rows[2].name, "baseline");
    assert!(report.rows[2].metrics.kendall_tau.is_none());
    for row in &report.rows {
        assert!(row.metrics.sr >= 0.0 && row.metrics.sr <= 1.0);
        assert!(row.metrics.spl >= 0.0 && row.metrics.spl <= 1.0);
        assert_eq!(row.metrics.n_episodes, 3);
    }
    assert!(run_matrix(&eps, &[], &kb, 7).is_err());
    assert!(run_matrix(&[], &configs, &kb, 7).is_err());
}
