//! Scene files and frame dumps.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::circuits::{ChannelScene, Probe, Rect};
use super::engine::Lattice;
use crate::error::CaError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedCells {
    pub cells: Vec<[usize; 2]>,
}

/// On-disk scene: walls are frozen dead cells, seeds are live cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneFile {
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub walls: Vec<Rect>,
    #[serde(default)]
    pub seeds: Vec<SeedCells>,
    #[serde(default)]
    pub probes: BTreeMap<String, Probe>,
}

impl SceneFile {
    pub fn from_scene(scene: &ChannelScene) -> Self {
        SceneFile {
            width: scene.lattice.width(),
            height: scene.lattice.height(),
            walls: scene.walls.clone(),
            seeds: scene
                .seeds
                .iter()
                .map(|s| SeedCells { cells: s.cells.iter().map(|&(x, y)| [x, y]).collect() })
                .collect(),
            probes: scene.probes.clone(),
        }
    }

    pub fn to_lattice(&self) -> Result<Lattice, CaError> {
        let mut l = Lattice::new(self.width, self.height);
        for r in &self.walls {
            if r.x + r.w > self.width || r.y + r.h > self.height {
                return Err(CaError::InvalidConfig(format!("wall {:?} outside the lattice", <[usize; 4]>::from(*r))));
            }
            for (x, y) in r.cells() {
                l.freeze(x, y, false);
            }
        }
        for s in &self.seeds {
            for &[x, y] in &s.cells {
                if !l.in_bounds(x as i64, y as i64) || l.is_frozen(x, y) {
                    return Err(CaError::InvalidConfig(format!(
                        "seed cell ({x}, {y}) is outside the lattice or on a wall"
                    )));
                }
                l.set(x, y, true);
            }
        }
        for (name, p) in &self.probes {
            let r = &p.rect;
            if r.w == 0 || r.h == 0 || r.x + r.w > self.width || r.y + r.h > self.height {
                return Err(CaError::ProbeOutside(name.clone()));
            }
        }
        Ok(l)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }
}

/// `.` dead, `#` alive, `%` wall; one line per row.
pub fn to_ascii(l: &Lattice) -> String {
    let mut out = String::with_capacity((l.width() + 1) * l.height());
    for y in 0..l.height() {
        for x in 0..l.width() {
            out.push(if l.is_frozen(x, y) {
                '%'
            } else if l.get(x, y) {
                '#'
            } else {
                '.'
            });
        }
        out.push('\n');
    }
    out
}

/// Binary PGM: dead 0, alive 255, wall 128.
pub fn to_pgm(l: &Lattice) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", l.width(), l.height()).into_bytes();
    for y in 0..l.height() {
        for x in 0..l.width() {
            out.push(if l.is_frozen(x, y) {
                128
            } else if l.get(x, y) {
                255
            } else {
                0
            });
        }
    }
    out
}

/// Parses a frame written by [`to_pgm`] back to its pixel rows.
pub fn pgm_pixels(data: &[u8]) -> Option<(usize, usize, Vec<u8>)> {
    let mut fields = Vec::new();
    let mut i = 0;
    while fields.len() < 4 {
        while i < data.len() && data[i].is_ascii_whitespace() {
            i += 1;
        }
        let start = i;
        while i < data.len() && !data[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i {
            return None;
        }
        fields.push(std::str::from_utf8(&data[start..i]).ok()?.to_string());
    }
    if fields[0] != "P5" {
        return None;
    }
    let w: usize = fields[1].parse().ok()?;
    let h: usize = fields[2].parse().ok()?;
    let body = data.get(i + 1..)?;
    (body.len() == w * h).then(|| (w, h, body.to_vec()))
}
