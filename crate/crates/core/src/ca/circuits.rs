//! Walled channel scenes, bit seeding, symmetry readout and the majority
//! cross-junction.
//!
//! A channel interior is a strip of live-able cells bounded by frozen dead
//! walls. Bit 0 is a particle pair centred on the channel's transverse axis,
//! bit 1 the same pair shifted toward the left of the travel direction. A
//! probe reads the pattern it covers: mirror-symmetric about the channel
//! midline is `Zero`, anything else is `One`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{Lattice, RuleBS};
use crate::error::CaError;

pub const MIN_CHANNEL_LENGTH: usize = 10;
pub const MIN_CHANNEL_WIDTH: usize = 3;
/// Distance from a channel's upstream end to the first seed cell.
pub const SEED_MARGIN: usize = 4;
/// Probe sits this many cells downstream of the seed in a straight channel.
pub const PROBE_DISTANCE: usize = 40;

/// Axis-aligned rectangle, serialized as `[x, y, w, h]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 4]", into = "[usize; 4]")]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl From<[usize; 4]> for Rect {
    fn from([x, y, w, h]: [usize; 4]) -> Self {
        Rect { x, y, w, h }
    }
}

impl From<Rect> for [usize; 4] {
    fn from(r: Rect) -> Self {
        [r.x, r.y, r.w, r.h]
    }
}

impl Rect {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Rect { x, y, w, h }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.w > 0
            && other.h > 0
            && other.x >= self.x
            && other.y >= self.y
            && other.x + other.w <= self.x + self.w
            && other.y + other.h <= self.y + self.h
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.y..self.y + self.h).flat_map(move |y| (self.x..self.x + self.w).map(move |x| (x, y)))
    }
}

/// Direction a signal travels along a channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heading {
    East,
    West,
    North,
    South,
}

impl Heading {
    /// Unit step along the heading, in lattice coordinates (y grows downward).
    pub fn along(self) -> (i64, i64) {
        match self {
            Heading::East => (1, 0),
            Heading::West => (-1, 0),
            Heading::North => (0, -1),
            Heading::South => (0, 1),
        }
    }

    /// Unit step toward the left of travel as drawn on screen.
    pub fn left(self) -> (i64, i64) {
        match self {
            Heading::East => (0, -1),
            Heading::West => (0, 1),
            Heading::North => (-1, 0),
            Heading::South => (1, 0),
        }
    }

    pub fn axis(self) -> Axis {
        match self {
            Heading::East | Heading::West => Axis::Horizontal,
            Heading::North | Heading::South => Axis::Vertical,
        }
    }
}

/// Orientation of a channel; a probe reflects across its midline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[default]
    Horizontal,
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub interior: Rect,
    pub heading: Heading,
}

impl Channel {
    pub fn axis(&self) -> Axis {
        self.heading.axis()
    }

    pub fn length(&self) -> usize {
        match self.axis() {
            Axis::Horizontal => self.interior.w,
            Axis::Vertical => self.interior.h,
        }
    }

    pub fn width(&self) -> usize {
        match self.axis() {
            Axis::Horizontal => self.interior.h,
            Axis::Vertical => self.interior.w,
        }
    }

    /// Maps channel-local `(along, across)` to lattice coordinates. `along`
    /// counts from the upstream end, `across` from the right-hand wall.
    fn to_lattice(&self, along: i64, across: i64) -> (i64, i64) {
        let r = &self.interior;
        let (x0, y0, x1, y1) = (r.x as i64, r.y as i64, (r.x + r.w) as i64 - 1, (r.y + r.h) as i64 - 1);
        match self.heading {
            Heading::East => (x0 + along, y1 - across),
            Heading::West => (x1 - along, y0 + across),
            Heading::South => (x0 + across, y0 + along),
            Heading::North => (x1 - across, y1 - along),
        }
    }
}

/// Seed geometry in channel-local coordinates `(along, across)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParticleShape {
    /// Two single cells one cell apart along the channel.
    Pair,
    /// Two cells side by side across the channel.
    Domino,
    /// Two across-dominoes one cell apart along the channel.
    DominoPair,
    Block,
}

impl ParticleShape {
    fn cells(self) -> &'static [(i64, i64)] {
        match self {
            ParticleShape::Pair => &[(0, 0), (2, 0)],
            ParticleShape::Domino => &[(0, 0), (0, 1)],
            ParticleShape::DominoPair => &[(0, 0), (0, 1), (2, 0), (2, 1)],
            ParticleShape::Block => &[(0, 0), (0, 1), (1, 0), (1, 1)],
        }
    }

    fn span_across(self) -> usize {
        self.cells().iter().map(|c| c.1).max().unwrap_or(0) as usize + 1
    }

    fn span_along(self) -> usize {
        self.cells().iter().map(|c| c.0).max().unwrap_or(0) as usize + 1
    }

    /// Whether the shape can sit exactly on the midline of a channel.
    pub fn centers_in(self, width: usize) -> bool {
        width >= self.span_across() && (width - self.span_across()).is_multiple_of(2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub channel: usize,
    pub bit: u8,
    pub cells: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub rect: Rect,
    #[serde(default)]
    pub axis: Axis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternClass {
    /// Pattern mirror-symmetric about the channel midline.
    Zero,
    One,
    None,
}

impl PatternClass {
    pub fn bit(self) -> Option<u8> {
        match self {
            PatternClass::Zero => Some(0),
            PatternClass::One => Some(1),
            PatternClass::None => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JunctionKind {
    /// Arms open straight into a square box whose side equals the channel width.
    Cross,
    /// Input arms open into a chamber two cells wider than the channel; the
    /// output arm leaves its east face.
    Tee,
}

impl JunctionKind {
    pub fn box_side(self, width: usize) -> usize {
        match self {
            JunctionKind::Cross => width,
            JunctionKind::Tee => width + 2,
        }
    }
}

/// When and how a gate output is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReadoutWindow {
    /// Step budget for the pattern to reach the output probe.
    pub max_steps: usize,
    /// Steps after first arrival at which the class is checked again.
    pub settle: usize,
}

impl Default for ReadoutWindow {
    fn default() -> Self {
        ReadoutWindow { max_steps: 400, settle: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateConfig {
    pub width: usize,
    /// Input arm lengths, north, west, south.
    pub arm_lengths: [usize; 3],
    pub output_length: usize,
    pub offset: usize,
    pub shape: ParticleShape,
    pub junction: JunctionKind,
    pub probe_length: usize,
    /// Distance of the probe from the junction along the output arm.
    pub probe_distance: usize,
    pub readout: ReadoutWindow,
}

impl GateConfig {
    pub fn uniform(width: usize, arm: usize, offset: usize, junction: JunctionKind) -> Self {
        GateConfig {
            width,
            arm_lengths: [arm; 3],
            output_length: 30,
            offset,
            shape: if width % 2 == 1 { ParticleShape::Pair } else { ParticleShape::DominoPair },
            junction,
            probe_length: 4,
            probe_distance: 20,
            readout: ReadoutWindow::default(),
        }
    }

    pub fn validate(&self) -> Result<(), CaError> {
        if self.width < MIN_CHANNEL_WIDTH {
            return Err(CaError::InvalidConfig(format!("width {} below minimum {}", self.width, MIN_CHANNEL_WIDTH)));
        }
        if self.offset < 1 {
            return Err(CaError::InvalidConfig("bit-1 offset must be at least 1".into()));
        }
        if self.readout.max_steps == 0 {
            return Err(CaError::InvalidConfig("readout window is empty".into()));
        }
        if self.probe_length == 0 || self.probe_distance + self.probe_length > self.output_length {
            return Err(CaError::InvalidConfig("probe does not fit in the output arm".into()));
        }
        if !self.shape.centers_in(self.width) {
            return Err(CaError::InvalidConfig(format!(
                "{:?} particle cannot be centred in a channel of width {}",
                self.shape, self.width
            )));
        }
        if self.shape.span_across() + self.offset > self.width {
            return Err(CaError::InvalidConfig("offset pushes the particle into the wall".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelScene {
    pub lattice: Lattice,
    pub walls: Vec<Rect>,
    pub channels: Vec<Channel>,
    pub seeds: Vec<Seed>,
    pub probes: BTreeMap<String, Probe>,
    pub shape: ParticleShape,
    pub offset: usize,
}

impl ChannelScene {
    fn from_interiors(width: usize, height: usize, interiors: &[Rect], shape: ParticleShape, offset: usize) -> Self {
        let mut inside = vec![false; width * height];
        for r in interiors {
            for (x, y) in r.cells() {
                inside[y * width + x] = true;
            }
        }
        let mut wall = vec![false; width * height];
        for y in 0..height {
            for x in 0..width {
                if inside[y * width + x] {
                    continue;
                }
                let near = (-1i64..=1).any(|dy| {
                    (-1i64..=1).any(|dx| {
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        nx >= 0
                            && ny >= 0
                            && (nx as usize) < width
                            && (ny as usize) < height
                            && inside[ny as usize * width + nx as usize]
                    })
                });
                wall[y * width + x] = near;
            }
        }
        let walls = merge_runs(&wall, width, height);
        let mut lattice = Lattice::new(width, height);
        for r in &walls {
            for (x, y) in r.cells() {
                lattice.freeze(x, y, false);
            }
        }
        ChannelScene { lattice, walls, channels: Vec::new(), seeds: Vec::new(), probes: BTreeMap::new(), shape, offset }
    }

    /// Seeds `bit` near the upstream end of `channel`.
    pub fn place_signal(&mut self, channel: usize, bit: u8) -> Result<(), CaError> {
        self.place_signal_at(channel, bit, SEED_MARGIN)
    }

    pub fn place_signal_at(&mut self, channel: usize, bit: u8, along: usize) -> Result<(), CaError> {
        if bit > 1 {
            return Err(CaError::InvalidBit(bit));
        }
        let ch = self.channels.get(channel).ok_or(CaError::UnknownChannel(channel))?.clone();
        let shape = self.shape;
        let width = ch.width();
        if !shape.centers_in(width) {
            return Err(CaError::InvalidConfig(format!("{shape:?} particle cannot be centred in width {width}")));
        }
        let centred = (width - shape.span_across()) / 2;
        let across0 = centred + if bit == 1 { self.offset } else { 0 };
        if across0 + shape.span_across() > width || along + shape.span_along() > ch.length() {
            return Err(CaError::SeedOutsideChannel(channel));
        }
        let mut cells = Vec::new();
        for &(da, dc) in shape.cells() {
            let (x, y) = ch.to_lattice(along as i64 + da, across0 as i64 + dc);
            let (x, y) = (x as usize, y as usize);
            if self.lattice.get(x, y) || self.lattice.is_frozen(x, y) {
                return Err(CaError::SeedOccupied { channel, x, y });
            }
            cells.push((x, y));
        }
        for &(x, y) in &cells {
            self.lattice.set(x, y, true);
        }
        self.seeds.push(Seed { channel, bit, cells });
        Ok(())
    }

    /// Adds a probe spanning the full width of `channel`, `along` cells from
    /// its upstream end.
    pub fn add_probe(&mut self, name: &str, channel: usize, along: usize, length: usize) -> Result<(), CaError> {
        let ch = self.channels.get(channel).ok_or(CaError::UnknownChannel(channel))?;
        if length == 0 || along + length > ch.length() {
            return Err(CaError::ProbeOutside(name.to_string()));
        }
        let (ax, ay) = ch.to_lattice(along as i64, 0);
        let (bx, by) = ch.to_lattice((along + length) as i64 - 1, ch.width() as i64 - 1);
        let rect = Rect::new(
            ax.min(bx) as usize,
            ay.min(by) as usize,
            ax.abs_diff(bx) as usize + 1,
            ay.abs_diff(by) as usize + 1,
        );
        self.probes.insert(name.to_string(), Probe { rect, axis: ch.axis() });
        Ok(())
    }
}

/// Merges a cell mask into row runs, then stacks identical runs vertically.
fn merge_runs(mask: &[bool], width: usize, height: usize) -> Vec<Rect> {
    let mut open: Vec<Rect> = Vec::new();
    let mut done = Vec::new();
    for y in 0..height {
        let mut runs = Vec::new();
        let mut x = 0;
        while x < width {
            if mask[y * width + x] {
                let start = x;
                while x < width && mask[y * width + x] {
                    x += 1;
                }
                runs.push((start, x - start));
            } else {
                x += 1;
            }
        }
        let mut next_open = Vec::new();
        for r in open.drain(..) {
            if let Some(pos) = runs.iter().position(|&(s, l)| s == r.x && l == r.w) {
                runs.remove(pos);
                next_open.push(Rect { h: r.h + 1, ..r });
            } else {
                done.push(r);
            }
        }
        next_open.extend(runs.into_iter().map(|(s, l)| Rect::new(s, y, l, 1)));
        open = next_open;
    }
    done.extend(open);
    done.sort_by_key(|r| (r.y, r.x));
    done
}

/// Straight eastbound channel, `length` long with `width` interior rows and
/// one wall row above and below. Both ends are open.
pub fn build_channel(length: usize, width: usize) -> Result<ChannelScene, CaError> {
    if length < MIN_CHANNEL_LENGTH {
        return Err(CaError::InvalidConfig(format!("channel length {length} below minimum {MIN_CHANNEL_LENGTH}")));
    }
    if width < MIN_CHANNEL_WIDTH {
        return Err(CaError::InvalidConfig(format!("channel width {width} below minimum {MIN_CHANNEL_WIDTH}")));
    }
    let interior = Rect::new(0, 1, length, width);
    let shape = if width % 2 == 1 { ParticleShape::Pair } else { ParticleShape::DominoPair };
    let mut scene = ChannelScene::from_interiors(length, width + 2, &[interior], shape, 1);
    scene.channels.push(Channel { interior, heading: Heading::East });
    Ok(scene)
}

/// Straight channel carrying one signal, with probe `out` spanning the
/// channel [`PROBE_DISTANCE`] cells downstream of the seed.
pub fn signal_channel(length: usize, width: usize, bit: u8, probe_length: usize) -> Result<ChannelScene, CaError> {
    let mut scene = build_channel(length, width)?;
    scene.place_signal(0, bit)?;
    scene.add_probe(OUTPUT_PROBE, 0, SEED_MARGIN + PROBE_DISTANCE, probe_length)?;
    Ok(scene)
}

/// Classifies the live cells inside `probe`.
pub fn classify_output(lattice: &Lattice, probe: &Probe) -> Result<PatternClass, CaError> {
    let r = probe.rect;
    if r.w == 0 || r.h == 0 || r.x + r.w > lattice.width() || r.y + r.h > lattice.height() {
        return Err(CaError::ProbeOutside(format!("{:?}", r)));
    }
    let mut any = false;
    let mut symmetric = true;
    for (x, y) in r.cells() {
        let alive = lattice.get(x, y);
        any |= alive;
        let (mx, my) = match probe.axis {
            Axis::Horizontal => (x, r.y + r.y + r.h - 1 - y),
            Axis::Vertical => (r.x + r.x + r.w - 1 - x, y),
        };
        if alive != lattice.get(mx, my) {
            symmetric = false;
        }
    }
    Ok(match (any, symmetric) {
        (false, _) => PatternClass::None,
        (true, true) => PatternClass::Zero,
        (true, false) => PatternClass::One,
    })
}

/// Channel ids inside a majority scene.
pub const NORTH: usize = 0;
pub const WEST: usize = 1;
pub const SOUTH: usize = 2;
pub const EAST: usize = 3;
pub const OUTPUT_PROBE: &str = "out";

/// Cross-junction with inputs on the north, west and south arms and the
/// output on the east arm. `a` enters from the north, `b` from the west and
/// `c` from the south.
pub fn build_majority_scene(config: &GateConfig, a: u8, b: u8, c: u8) -> Result<ChannelScene, CaError> {
    config.validate()?;
    let min_arm = SEED_MARGIN + config.shape.span_along() + 1;
    if let Some(&short) = config.arm_lengths.iter().find(|&&l| l < min_arm) {
        return Err(CaError::InvalidConfig(format!("arm length {short} too short for seeding (need {min_arm})")));
    }
    let w = config.width;
    let side = config.junction.box_side(w);
    let inset = (side - w) / 2;
    let [ln, lw, ls] = config.arm_lengths;
    let le = config.output_length;
    // Vertical arms share the x-range of the box's centre; horizontal arms its y-range.
    let (bx, by) = (lw, ln.max(ls));
    let width = lw + side + le;
    let height = by + side + by;
    let north = Rect::new(bx + inset, by - ln, w, ln);
    let west = Rect::new(0, by + inset, lw, w);
    let south = Rect::new(bx + inset, by + side, w, ls);
    let east = Rect::new(bx + side, by + inset, le, w);
    let junction = Rect::new(bx, by, side, side);
    let mut scene =
        ChannelScene::from_interiors(width, height, &[north, west, south, east, junction], config.shape, config.offset);
    scene.channels = vec![
        Channel { interior: north, heading: Heading::South },
        Channel { interior: west, heading: Heading::East },
        Channel { interior: south, heading: Heading::North },
        Channel { interior: east, heading: Heading::East },
    ];
    for (ch, bit) in [(NORTH, a), (WEST, b), (SOUTH, c)] {
        scene.place_signal(ch, bit)?;
    }
    scene.add_probe(OUTPUT_PROBE, EAST, config.probe_distance, config.probe_length)?;
    Ok(scene)
}

/// Runs until `probe` first sees live cells, classifies, and re-checks after
/// the settle window. Returns the class and the step of first arrival.
pub fn read_probe(
    lattice: &Lattice,
    rule: &RuleBS,
    probe: &Probe,
    window: &ReadoutWindow,
) -> Result<(PatternClass, usize), CaError> {
    let mut cur = lattice.clone();
    for t in 0..=window.max_steps {
        if t > 0 {
            cur = cur.step(rule);
        }
        let first = classify_output(&cur, probe)?;
        if first != PatternClass::None {
            let settled = classify_output(&cur.run(rule, window.settle), probe)?;
            return if settled == first {
                Ok((first, t))
            } else {
                Err(CaError::Timeout {
                    steps: t + window.settle,
                    reason: format!("readout flipped from {first:?} to {settled:?}"),
                })
            };
        }
    }
    Err(CaError::Timeout { steps: window.max_steps, reason: "no pattern reached the probe".into() })
}

pub fn eval_majority_ca(config: &GateConfig, a: u8, b: u8, c: u8) -> Result<u8, CaError> {
    let scene = build_majority_scene(config, a, b, c)?;
    let probe = scene.probes[OUTPUT_PROBE];
    let (class, _) = read_probe(&scene.lattice, &RuleBS::B2_S2345, &probe, &config.readout)?;
    Ok(class.bit().expect("read_probe returns a non-empty class"))
}

pub fn majority(a: u8, b: u8, c: u8) -> u8 {
    ((a & b) | (a & c) | (b & c)) & 1
}

/// Input rows in truth-table order: 000, 001, ..., 111.
pub fn input_rows() -> impl Iterator<Item = (u8, u8, u8)> {
    (0u8..8).map(|i| ((i >> 2) & 1, (i >> 1) & 1, i & 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowOutcome {
    pub inputs: [u8; 3],
    pub expected: u8,
    /// Observed bit, or the error text when evaluation failed.
    pub observed: Result<u8, String>,
}

impl RowOutcome {
    pub fn passed(&self) -> bool {
        self.observed == Ok(self.expected)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigOutcome {
    pub config: GateConfig,
    pub rows: Vec<RowOutcome>,
    pub correct: usize,
}

impl ConfigOutcome {
    pub fn failing_rows(&self) -> Vec<[u8; 3]> {
        self.rows.iter().filter(|r| !r.passed()).map(|r| r.inputs).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationReport {
    /// First config in grid order reproducing all eight rows.
    pub best: Option<GateConfig>,
    pub found: bool,
    pub outcomes: Vec<ConfigOutcome>,
}

pub fn evaluate_config(config: &GateConfig) -> ConfigOutcome {
    let rows: Vec<RowOutcome> = input_rows()
        .map(|(a, b, c)| RowOutcome {
            inputs: [a, b, c],
            expected: majority(a, b, c),
            observed: eval_majority_ca(config, a, b, c).map_err(|e| e.to_string()),
        })
        .collect();
    let correct = rows.iter().filter(|r| r.passed()).count();
    ConfigOutcome { config: config.clone(), rows, correct }
}

/// Exhaustive search over `grid`. Configs are evaluated in parallel; the
/// report keeps grid order.
pub fn calibrate_gate(grid: &[GateConfig]) -> CalibrationReport {
    let outcomes: Vec<ConfigOutcome> = grid.par_iter().map(evaluate_config).collect();
    let best = outcomes.iter().find(|o| o.correct == 8).map(|o| o.config.clone());
    CalibrationReport { found: best.is_some(), best, outcomes }
}

/// The documented search grid: width 4..=8, offset 1..=2, arm length
/// 20..=60 step 10, both junction kinds.
pub fn default_grid() -> Vec<GateConfig> {
    let mut grid = Vec::new();
    for width in 4..=8 {
        for offset in 1..=2 {
            for arm in (20..=60).step_by(10) {
                for junction in [JunctionKind::Cross, JunctionKind::Tee] {
                    grid.push(GateConfig::uniform(width, arm, offset, junction));
                }
            }
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_geometry() {
        let s = build_channel(40, 5).unwrap();
        assert_eq!((s.lattice.width(), s.lattice.height()), (40, 7));
        assert_eq!(s.walls, vec![Rect::new(0, 0, 40, 1), Rect::new(0, 6, 40, 1)]);
        assert_eq!(s.channels[0].interior, Rect::new(0, 1, 40, 5));
        assert!(build_channel(10, 3).is_ok());
        assert!(matches!(build_channel(5, 3), Err(CaError::InvalidConfig(_))));
        assert!(matches!(build_channel(20, 2), Err(CaError::InvalidConfig(_))));
    }

    #[test]
    fn seeds_centre_and_offset() {
        let mut s = build_channel(40, 5).unwrap();
        s.place_signal(0, 0).unwrap();
        // Interior rows 1..=5, midline row 3.
        assert_eq!(s.seeds[0].cells, vec![(4, 3), (6, 3)]);
        let mut s = build_channel(40, 5).unwrap();
        s.place_signal(0, 1).unwrap();
        assert_eq!(s.seeds[0].cells, vec![(4, 2), (6, 2)]);
        let mut s = build_channel(40, 5).unwrap();
        assert_eq!(s.place_signal(0, 2), Err(CaError::InvalidBit(2)));
        assert_eq!(s.place_signal(3, 0), Err(CaError::UnknownChannel(3)));
        s.place_signal(0, 0).unwrap();
        assert!(matches!(s.place_signal(0, 0), Err(CaError::SeedOccupied { .. })));
    }

    #[test]
    fn classify_basic() {
        let mut l = Lattice::new(6, 5);
        let probe = Probe { rect: Rect::new(1, 0, 3, 5), axis: Axis::Horizontal };
        assert_eq!(classify_output(&l, &probe).unwrap(), PatternClass::None);
        l.set(2, 1, true);
        l.set(2, 3, true);
        assert_eq!(classify_output(&l, &probe).unwrap(), PatternClass::Zero);
        l.set(3, 0, true);
        assert_eq!(classify_output(&l, &probe).unwrap(), PatternClass::One);
        let vprobe = Probe { rect: Rect::new(1, 0, 3, 5), axis: Axis::Vertical };
        let mut v = Lattice::new(6, 5);
        v.set(1, 2, true);
        v.set(3, 2, true);
        assert_eq!(classify_output(&v, &vprobe).unwrap(), PatternClass::Zero);
        let bad = Probe { rect: Rect::new(5, 0, 3, 5), axis: Axis::Horizontal };
        assert!(matches!(classify_output(&l, &bad), Err(CaError::ProbeOutside(_))));
    }

    #[test]
    fn majority_scene_seeds() {
        let cfg = GateConfig::uniform(5, 20, 1, JunctionKind::Cross);
        let s = build_majority_scene(&cfg, 0, 0, 0).unwrap();
        assert_eq!(s.seeds.len(), 3);
        assert!(s.seeds.iter().all(|seed| seed.bit == 0));
        let s = build_majority_scene(&cfg, 1, 1, 0).unwrap();
        let bits: Vec<u8> = s.seeds.iter().map(|s| s.bit).collect();
        assert_eq!(bits, vec![1, 1, 0]);
        // North seed is offset toward the east (left of southward travel).
        let centred = build_majority_scene(&cfg, 0, 0, 0).unwrap();
        assert_eq!(s.seeds[0].cells[0].0, centred.seeds[0].cells[0].0 + 1);
        let mut short = cfg.clone();
        short.arm_lengths = [5, 20, 20];
        assert!(matches!(build_majority_scene(&short, 0, 0, 0), Err(CaError::InvalidConfig(_))));
    }

    #[test]
    fn symmetric_scene_reads_zero() {
        let cfg = GateConfig::uniform(5, 20, 1, JunctionKind::Cross);
        assert_eq!(eval_majority_ca(&cfg, 0, 0, 0), Ok(0));
    }

    #[test]
    fn empty_grid_finds_nothing() {
        let r = calibrate_gate(&[]);
        assert!(!r.found && r.best.is_none() && r.outcomes.is_empty());
    }

    #[test]
    fn grid_is_bounded() {
        let g = default_grid();
        assert_eq!(g.len(), 100);
        assert!(g.iter().all(|c| c.readout.max_steps <= 400));
    }

    #[test]
    fn wall_runs_merge() {
        let mask = [true, true, false, true, true, false, false, false, true];
        let rects = merge_runs(&mask, 3, 3);
        assert_eq!(rects, vec![Rect::new(0, 0, 2, 2), Rect::new(2, 2, 1, 1)]);
    }
}
