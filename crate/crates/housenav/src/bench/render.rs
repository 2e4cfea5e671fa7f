//! Top-down SVG rendering of a house and an episode trace.

use std::fmt::Write;

use thiserror::Error;

use crate::episode::TraceEvent;
use crate::sim::House;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("trace is for house {trace} but house {house} was supplied")]
    HouseMismatch { trace: u64, house: u64 },
}

const SCALE: f64 = 60.0;
const MARGIN: f64 = 20.0;

fn sx(x: f64) -> f64 {
    MARGIN + x * SCALE
}

fn sy(y: f64) -> f64 {
    MARGIN + y * SCALE
}

/// Render room outlines, doors, objects, the agent trajectory polyline
/// (one vertex per pose event), and target-found markers with step
/// indices.
pub fn render_topdown(house: &House, trace: &[TraceEvent]) -> Result<String, RenderError> {
    for event in trace {
        if let TraceEvent::Start { house_id, .. } = event {
            if *house_id != house.id {
                return Err(RenderError::HouseMismatch {
                    trace: *house_id,
                    house: house.id,
                });
            }
        }
    }

    let max_x = house
        .rooms
        .iter()
        .map(|r| r.bounds.max_x)
        .fold(0.0, f64::max);
    let max_y = house
        .rooms
        .iter()
        .map(|r| r.bounds.max_y)
        .fold(0.0, f64::max);
    let (w, h) = (sx(max_x) + MARGIN, sy(max_y) + MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w:.0}" height="{h:.0}" fill="white"/>"#);

    for room in &house.rooms {
        let b = &room.bounds;
        let _ = writeln!(
            svg,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black" stroke-width="2"/>"#,
            sx(b.min_x),
            sy(b.min_y),
            (b.max_x - b.min_x) * SCALE,
            (b.max_y - b.min_y) * SCALE
        );
        let (cx, cy) = b.center();
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" fill="gray" text-anchor="middle">{}</text>"#,
            sx(cx),
            sy(b.min_y) + 12.0,
            room.room_type
        );
        let _ = writeln!(svg, "<!-- room center ({cx:.2}, {cy:.2}) -->");
    }

    for door in &house.doors {
        let fill = if door.open { "sienna" } else { "darkred" };
        let _ = writeln!(
            svg,
            r#"<rect x="{:.1}" y="{:.1}" width="8" height="8" fill="{fill}"/>"#,
            sx(door.position.0) - 4.0,
            sy(door.position.1) - 4.0
        );
    }

    for obj in &house.objects {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="steelblue"><title>{}</title></circle>"#,
            sx(obj.position[0]),
            sy(obj.position[1]),
            obj.category
        );
    }

    let poses: Vec<(f64, f64)> = trace
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Pose { x, y, .. } => Some((sx(*x), sy(*y))),
            _ => None,
        })
        .collect();
    if !poses.is_empty() {
        let points: Vec<String> = poses.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="crimson" stroke-width="1.5" opacity="0.8"/>"#,
            points.join(" ")
        );
    }

    for event in trace {
        if let TraceEvent::Found { step, category, x, y } = event {
            let _ = writeln!(
                svg,
                r#"<g><circle cx="{:.1}" cy="{:.1}" r="7" fill="none" stroke="green" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="10" fill="green">{category}@{step}</text></g>"#,
                sx(*x),
                sy(*y),
                sx(*x) + 9.0,
                sy(*y) + 3.0
            );
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}
