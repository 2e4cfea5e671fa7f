//! House serialization: a schema-versioned JSON document with a
//! run-length-encoded grid. Loaders reject unknown schema versions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CellKind, Door, House, ObjectInstance, OccupancyGrid, Room};

pub const HOUSE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HouseIoError {
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported house schema version {found} (expected {HOUSE_SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("corrupt house document: {0}")]
    Corrupt(String),
}

#[derive(Serialize, Deserialize)]
struct RleRun {
    n: usize,
    kind: CellKind,
}

#[derive(Serialize, Deserialize)]
struct GridDoc {
    width: usize,
    height: usize,
    rle: Vec<RleRun>,
}

#[derive(Serialize, Deserialize)]
struct HouseDoc {
    schema_version: u32,
    id: u64,
    rooms: Vec<Room>,
    doors: Vec<Door>,
    objects: Vec<ObjectInstance>,
    grid: GridDoc,
}

fn encode_grid(grid: &OccupancyGrid) -> GridDoc {
    let mut rle: Vec<RleRun> = Vec::new();
    for &kind in grid.cells() {
        match rle.last_mut() {
            Some(run) if run.kind == kind => run.n += 1,
            _ => rle.push(RleRun { n: 1, kind }),
        }
    }
    GridDoc {
        width: grid.width,
        height: grid.height,
        rle,
    }
}

fn decode_grid(doc: GridDoc) -> Result<OccupancyGrid, HouseIoError> {
    let mut cells = Vec::with_capacity(doc.width * doc.height);
    for run in doc.rle {
        cells.extend(std::iter::repeat_n(run.kind, run.n));
    }
    if cells.len() != doc.width * doc.height {
        return Err(HouseIoError::Corrupt(format!(
            "grid rle decodes to {} cells, expected {}",
            cells.len(),
            doc.width * doc.height
        )));
    }
    Ok(OccupancyGrid::from_cells(doc.width, doc.height, cells))
}

pub fn house_to_json(house: &House) -> String {
    let doc = HouseDoc {
        schema_version: HOUSE_SCHEMA_VERSION,
        id: house.id,
        rooms: house.rooms.clone(),
        doors: house.doors.clone(),
        objects: house.objects.clone(),
        grid: encode_grid(&house.grid),
    };
    serde_json::to_string_pretty(&doc).expect("house serialization cannot fail")
}

pub fn house_from_json(text: &str) -> Result<House, HouseIoError> {
    let doc: HouseDoc = serde_json::from_str(text)?;
    if doc.schema_version != HOUSE_SCHEMA_VERSION {
        return Err(HouseIoError::SchemaVersion {
            found: doc.schema_version,
        });
    }
    let grid = decode_grid(doc.grid)?;
    for door in &doc.doors {
        if !matches!(grid.kind(door.cell), CellKind::Door(_)) {
            return Err(HouseIoError::Corrupt(format!(
                "door {} does not sit on a door cell",
                door.id
            )));
        }
    }
    Ok(House {
        id: doc.id,
        rooms: doc.rooms,
        doors: doc.doors,
        objects: doc.objects,
        grid,
    })
}
