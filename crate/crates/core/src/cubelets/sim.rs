//! Signal propagation over assemblies.
//!
//! Power floods from every battery through all face contacts. Data flows
//! away from the sense cubes along a breadth-first distance field: a cube's
//! upstream neighbours are those strictly closer to some sensor, and
//! blockers stop the field. Values are settled by row-major sweeps until
//! nothing changes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::corpus;
use super::model::{Assembly, CubeKind, Pos};
use crate::error::SimError;

pub const DEFAULT_SWEEP_CAP: usize = 10_000;
pub const BINARY_CUTOFF: u8 = 127;

pub type Stimulus = BTreeMap<Pos, u8>;
pub type Programs = BTreeMap<Pos, CubeProgram>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "program", rename_all = "kebab-case")]
pub enum CubeProgram {
    /// Emits 0 when the input exceeds `cutoff`, 255 otherwise.
    ThresholdInvert { cutoff: u8 },
}

impl CubeProgram {
    fn apply(self, x: u8) -> u8 {
        match self {
            CubeProgram::ThresholdInvert { cutoff } => {
                if x > cutoff {
                    0
                } else {
                    255
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightSource {
    pub source: Pos,
    /// Contribution is `floor(weight * light / 255)`.
    pub weight: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensorLight {
    pub sensor: Pos,
    pub sources: Vec<LightSource>,
}

/// Cross-gap light coupling between flashlights and brightness cubes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightProfile {
    pub name: String,
    pub sensors: Vec<SensorLight>,
    pub threshold: u8,
}

impl LightProfile {
    pub fn none() -> Self {
        LightProfile { name: "none".into(), sensors: Vec::new(), threshold: BINARY_CUTOFF }
    }

    fn sensor(sensor: Pos, weight: u8, sources: &[Pos]) -> SensorLight {
        SensorLight { sensor, sources: sources.iter().map(|&source| LightSource { source, weight }).collect() }
    }

    /// The majority gate: the three branch flashlights nearest the gap seen
    /// by the output brightness cube.
    pub fn maj_gate() -> Self {
        let sources = [(Pos::new(4, 2, 0), 47), (Pos::new(2, 4, 0), 31), (Pos::new(4, 6, 0), 47)]
            .into_iter()
            .map(|(source, weight)| LightSource { source, weight })
            .collect();
        LightProfile {
            name: "maj-gate".into(),
            sensors: vec![SensorLight { sensor: MAJ_SENSOR, sources }],
            threshold: 78,
        }
    }

    /// The adder: each brightness cube sees three flashlights equally.
    pub fn adder() -> Self {
        let p = |x, y| Pos::new(x, y, 0);
        LightProfile {
            name: "adder".into(),
            sensors: vec![
                Self::sensor(ADDER_NM2, 85, &[p(3, 2), p(2, 3), p(3, 4)]),
                Self::sensor(ADDER_NM1, 85, &[p(3, 7), p(2, 8), p(3, 9)]),
                Self::sensor(ADDER_NM3, 85, &[p(7, 3), p(4, 5), p(7, 8)]),
            ],
            threshold: BINARY_CUTOFF,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "maj-gate" => Some(Self::maj_gate()),
            "adder" => Some(Self::adder()),
            "none" => Some(Self::none()),
            _ => None,
        }
    }

    fn check(&self, asm: &Assembly) -> Result<(), SimError> {
        let mismatch = |msg: String| SimError::ProfileMismatch { profile: self.name.clone(), msg };
        for s in &self.sensors {
            match asm.get(s.sensor) {
                Some(c) if c.kind == CubeKind::Brightness => {}
                _ => return Err(mismatch(format!("no brightness cube at ({})", s.sensor))),
            }
            for src in &s.sources {
                match asm.get(src.source) {
                    Some(c) if c.kind == CubeKind::Flashlight => {}
                    _ => return Err(mismatch(format!("no flashlight at ({})", src.source))),
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimState {
    pub powered: BTreeMap<Pos, bool>,
    /// Value each cube passes to its downstream neighbours.
    pub value: BTreeMap<Pos, u8>,
    /// Emitted brightness of every flashlight.
    pub light: BTreeMap<Pos, u8>,
    /// Raw reading of every brightness cube.
    pub sensed: BTreeMap<Pos, u8>,
    pub sweeps: usize,
}

pub fn power_propagate(asm: &Assembly) -> BTreeSet<Pos> {
    let mut powered: BTreeSet<Pos> =
        asm.cubes.values().filter(|c| c.kind == CubeKind::Battery).map(|c| c.pos).collect();
    let mut queue: VecDeque<Pos> = powered.iter().copied().collect();
    while let Some(p) = queue.pop_front() {
        for q in p.face_neighbors() {
            if asm.cubes.contains_key(&q) && powered.insert(q) {
                queue.push_back(q);
            }
        }
    }
    powered
}

fn is_sensor(kind: CubeKind) -> bool {
    matches!(kind, CubeKind::Distance | CubeKind::Brightness | CubeKind::Knob | CubeKind::Temperature)
}

/// Upstream neighbours of every cube reached by data.
pub fn data_graph(asm: &Assembly) -> BTreeMap<Pos, Vec<Pos>> {
    let mut dist: BTreeMap<Pos, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for c in asm.cubes.values().filter(|c| is_sensor(c.kind)) {
        dist.insert(c.pos, 0);
        queue.push_back(c.pos);
    }
    while let Some(p) = queue.pop_front() {
        if asm.cubes[&p].kind == CubeKind::Blocker {
            continue;
        }
        let d = dist[&p];
        for q in p.face_neighbors() {
            if asm.cubes.contains_key(&q) && !dist.contains_key(&q) {
                dist.insert(q, d + 1);
                queue.push_back(q);
            }
        }
    }
    dist.iter()
        .map(|(&p, &d)| {
            let ups = p.face_neighbors().filter(|q| dist.get(q).is_some_and(|&dq| dq < d)).collect();
            (p, ups)
        })
        .collect()
}

pub fn settle(
    asm: &Assembly,
    stimulus: &Stimulus,
    programs: &Programs,
    profile: &LightProfile,
) -> Result<SimState, SimError> {
    settle_capped(asm, stimulus, programs, profile, DEFAULT_SWEEP_CAP)
}

pub fn settle_capped(
    asm: &Assembly,
    stimulus: &Stimulus,
    programs: &Programs,
    profile: &LightProfile,
    cap: usize,
) -> Result<SimState, SimError> {
    for p in stimulus.keys() {
        match asm.get(*p) {
            Some(c) if matches!(c.kind, CubeKind::Distance | CubeKind::Knob | CubeKind::Temperature) => {}
            _ => return Err(SimError::UnknownStimulus(p.to_string())),
        }
    }
    if let Some(p) = programs.keys().find(|p| asm.get(**p).is_none()) {
        return Err(SimError::UnknownProgram(p.to_string()));
    }
    profile.check(asm)?;

    let powered = power_propagate(asm);
    let upstream = data_graph(asm);
    let sources: BTreeMap<Pos, &[LightSource]> =
        profile.sensors.iter().map(|s| (s.sensor, s.sources.as_slice())).collect();

    let mut st = SimState {
        powered: asm.cubes.keys().map(|p| (*p, powered.contains(p))).collect(),
        value: asm.cubes.keys().map(|p| (*p, 0)).collect(),
        light: asm.cubes.values().filter(|c| c.kind == CubeKind::Flashlight).map(|c| (c.pos, 0)).collect(),
        sensed: asm.cubes.values().filter(|c| c.kind == CubeKind::Brightness).map(|c| (c.pos, 0)).collect(),
        sweeps: 0,
    };

    loop {
        if st.sweeps == cap {
            let mut probe = st.clone();
            let changing = sweep(asm, &mut probe, stimulus, programs, &upstream, &sources, &powered);
            return Err(SimError::Diverged { sweeps: cap, cubes: changing.iter().map(Pos::to_string).collect() });
        }
        st.sweeps += 1;
        if sweep(asm, &mut st, stimulus, programs, &upstream, &sources, &powered).is_empty() {
            return Ok(st);
        }
    }
}

/// One in-place pass in row-major order; returns the cubes that changed.
fn sweep(
    asm: &Assembly,
    st: &mut SimState,
    stimulus: &Stimulus,
    programs: &Programs,
    upstream: &BTreeMap<Pos, Vec<Pos>>,
    sources: &BTreeMap<Pos, &[LightSource]>,
    powered: &BTreeSet<Pos>,
) -> Vec<Pos> {
    let mut changed = Vec::new();
    for (&p, cube) in &asm.cubes {
        let ups = upstream.get(&p).map(Vec::as_slice).unwrap_or(&[]);
        let input = if cube.kind == CubeKind::Passive {
            ups.iter().map(|q| st.value[q]).max().unwrap_or(0)
        } else {
            ups.iter().fold(0u8, |acc, q| acc.saturating_add(st.value[q]))
        };
        let on = powered.contains(&p);
        let program = programs.get(&p).copied();
        let mut light = None;
        let mut sensed = None;
        let value = if !on {
            if cube.kind == CubeKind::Flashlight {
                light = Some(0);
            }
            if cube.kind == CubeKind::Brightness {
                sensed = Some(0);
            }
            0
        } else {
            match cube.kind {
                CubeKind::Distance | CubeKind::Knob | CubeKind::Temperature => {
                    let v = stimulus.get(&p).copied().unwrap_or(0);
                    program.map_or(v, |g| g.apply(v))
                }
                CubeKind::Brightness => {
                    let s = sources.get(&p).map_or(0u8, |srcs| {
                        srcs.iter().fold(0u8, |acc, src| {
                            let l = st.light.get(&src.source).copied().unwrap_or(0) as u32;
                            acc.saturating_add((src.weight as u32 * l / 255) as u8)
                        })
                    });
                    sensed = Some(s);
                    program.map_or(s, |g| g.apply(s))
                }
                CubeKind::Flashlight => {
                    let l = program.map_or(input, |g| g.apply(input));
                    light = Some(l);
                    (7 * l as u32 / 10) as u8
                }
                kind => {
                    let v = match kind {
                        CubeKind::Battery => {
                            if input >= 128 {
                                255
                            } else {
                                0
                            }
                        }
                        CubeKind::Inverse => 255 - input,
                        CubeKind::Blocker => 0,
                        _ => input,
                    };
                    program.map_or(v, |g| g.apply(input))
                }
            }
        };
        let mut moved = st.value.insert(p, value) != Some(value);
        if let Some(l) = light {
            moved |= st.light.insert(p, l) != Some(l);
        }
        if let Some(s) = sensed {
            moved |= st.sensed.insert(p, s) != Some(s);
        }
        if moved {
            changed.push(p);
        }
    }
    changed
}

/// Binary reading: light for flashlights, emitted value otherwise.
pub fn read_binary(state: &SimState, pos: Pos, cutoff: u8) -> Result<u8, SimError> {
    let v = state
        .light
        .get(&pos)
        .or_else(|| state.value.get(&pos))
        .ok_or_else(|| SimError::UnknownCube(pos.to_string()))?;
    Ok((*v > cutoff) as u8)
}

pub fn level(bit: u8) -> Result<u8, SimError> {
    match bit {
        0 => Ok(0),
        1 => Ok(255),
        b => Err(SimError::InvalidBit(b)),
    }
}

pub const MAJ_INPUTS: [Pos; 3] = [Pos::new(4, 1, 0), Pos::new(1, 4, 0), Pos::new(4, 7, 0)];
pub const MAJ_SENSOR: Pos = Pos::new(6, 4, 0);
/// First flashlight after the inverse cube of the not-majority output.
pub const NMAJ_OUTPUT: Pos = Pos::new(8, 4, 0);

fn maj_stimulus(a: u8, b: u8, c: u8) -> Result<Stimulus, SimError> {
    Ok(MAJ_INPUTS.into_iter().zip([level(a)?, level(b)?, level(c)?]).collect())
}

/// Settles the majority gate and returns the brightness its sensor reads.
pub fn maj_sensed(a: u8, b: u8, c: u8, profile: &LightProfile) -> Result<u8, SimError> {
    let st = settle(&corpus::maj_gate(), &maj_stimulus(a, b, c)?, &Programs::new(), profile)?;
    Ok(st.sensed[&MAJ_SENSOR])
}

pub fn eval_maj_with(a: u8, b: u8, c: u8, profile: &LightProfile) -> Result<u8, SimError> {
    Ok((maj_sensed(a, b, c, profile)? >= profile.threshold) as u8)
}

pub fn eval_maj_cubelets(a: u8, b: u8, c: u8) -> Result<u8, SimError> {
    eval_maj_with(a, b, c, &LightProfile::maj_gate())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotMajVariant {
    /// Inverse cube on the output wire; the next flashlight is read.
    InverseCube,
    /// The brightness cube itself runs the threshold-invert program.
    Programmed,
}

pub fn eval_not_maj_cubelets(a: u8, b: u8, c: u8, variant: NotMajVariant) -> Result<u8, SimError> {
    let profile = LightProfile::maj_gate();
    let stim = maj_stimulus(a, b, c)?;
    match variant {
        NotMajVariant::InverseCube => {
            let st = settle(&corpus::not_maj_gate(), &stim, &Programs::new(), &profile)?;
            // Sensed s arrives as 255 - s; MAJ is s >= t, so NOT-MAJ is 255 - s > 255 - t.
            read_binary(&st, NMAJ_OUTPUT, 255 - profile.threshold)
        }
        NotMajVariant::Programmed => {
            let programs =
                Programs::from([(MAJ_SENSOR, CubeProgram::ThresholdInvert { cutoff: profile.threshold - 1 })]);
            let st = settle(&corpus::maj_gate(), &stim, &programs, &profile)?;
            read_binary(&st, MAJ_SENSOR, BINARY_CUTOFF)
        }
    }
}

pub fn eval_and(a: u8, b: u8) -> Result<u8, SimError> {
    eval_maj_cubelets(a, b, 0)
}

pub fn eval_or(a: u8, b: u8) -> Result<u8, SimError> {
    eval_maj_cubelets(a, b, 1)
}

pub const ADDER_A: [Pos; 2] = [Pos::new(3, 0, 0), Pos::new(3, 11, 0)];
pub const ADDER_B: [Pos; 2] = [Pos::new(0, 3, 0), Pos::new(0, 8, 0)];
pub const ADDER_CIN: Pos = Pos::new(3, 6, 0);
pub const ADDER_NM1: Pos = Pos::new(5, 8, 0);
pub const ADDER_NM2: Pos = Pos::new(6, 3, 0);
pub const ADDER_NM3: Pos = Pos::new(10, 5, 0);
/// Flashlight after the inverse cube that follows the first stage.
pub const ADDER_COUT: Pos = Pos::new(7, 8, 0);
/// Flashlight at the end of the third stage's output wire.
pub const ADDER_SUM: Pos = Pos::new(12, 5, 0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdderOutputs {
    pub nm1: u8,
    pub nm2: u8,
    pub nm3: u8,
    pub cout: u8,
    pub sum: u8,
}

pub fn adder_programs() -> Programs {
    [ADDER_NM1, ADDER_NM2, ADDER_NM3]
        .into_iter()
        .map(|p| (p, CubeProgram::ThresholdInvert { cutoff: BINARY_CUTOFF }))
        .collect()
}

pub fn adder_stimulus(a: u8, b: u8, cin: u8) -> Result<Stimulus, SimError> {
    let mut s = Stimulus::new();
    for p in ADDER_A {
        s.insert(p, level(a)?);
    }
    for p in ADDER_B {
        s.insert(p, level(b)?);
    }
    s.insert(ADDER_CIN, level(cin)?);
    Ok(s)
}

pub fn eval_adder_cubelets(a: u8, b: u8, cin: u8) -> Result<AdderOutputs, SimError> {
    let st = settle(&corpus::robot("w_BA"), &adder_stimulus(a, b, cin)?, &adder_programs(), &LightProfile::adder())?;
    let r = |p| read_binary(&st, p, BINARY_CUTOFF);
    Ok(AdderOutputs {
        nm1: r(ADDER_NM1)?,
        nm2: r(ADDER_NM2)?,
        nm3: r(ADDER_NM3)?,
        cout: r(ADDER_COUT)?,
        sum: r(ADDER_SUM)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubelets::lang::parse_assembly;

    #[test]
    fn lamp_powers_and_lights() {
        let lamp = corpus::lamp();
        assert_eq!(power_propagate(&lamp).len(), 3);
        let stim = Stimulus::from([(Pos::new(0, 0, 0), 255)]);
        let st = settle(&lamp, &stim, &Programs::new(), &LightProfile::none()).unwrap();
        assert_eq!(st.light[&Pos::new(2, 0, 0)], 255);
        let dark = settle(&lamp, &Stimulus::new(), &Programs::new(), &LightProfile::none()).unwrap();
        assert!(dark.value.values().all(|&v| v == 0) && dark.light.values().all(|&v| v == 0));
    }

    #[test]
    fn chain_attenuates() {
        let stim = Stimulus::from([(Pos::new(0, 0, 0), 255)]);
        let st = settle(&corpus::chain(), &stim, &Programs::new(), &LightProfile::none()).unwrap();
        let lights: Vec<u8> = st.light.values().copied().collect();
        assert_eq!(lights, vec![255, 178, 124]);
    }

    #[test]
    fn power_needs_battery() {
        let a = parse_assembly("di . fl", "x").unwrap();
        assert!(power_propagate(&a).is_empty());
        let two = parse_assembly("ba_(0,0,0) . fl_(1,0,0) . fl_(3,0,0)", "x").unwrap();
        assert_eq!(power_propagate(&two), BTreeSet::from([Pos::new(0, 0, 0), Pos::new(1, 0, 0)]));
    }

    #[test]
    fn blocker_conducts_power_not_data() {
        let a = parse_assembly("di . ba . bo . fl", "x").unwrap();
        let stim = Stimulus::from([(Pos::new(0, 0, 0), 255)]);
        let st = settle(&a, &stim, &Programs::new(), &LightProfile::none()).unwrap();
        assert!(st.powered[&Pos::new(3, 0, 0)]);
        assert_eq!(st.light[&Pos::new(3, 0, 0)], 0);
    }

    #[test]
    fn read_binary_is_strict() {
        let mut st = SimState::default();
        st.value.insert(Pos::new(0, 0, 0), 255);
        st.value.insert(Pos::new(1, 0, 0), 127);
        st.value.insert(Pos::new(2, 0, 0), 0);
        let bits: Vec<u8> = (0..3).map(|x| read_binary(&st, Pos::new(x, 0, 0), 127).unwrap()).collect();
        assert_eq!(bits, vec![1, 0, 0]);
        assert!(matches!(read_binary(&st, Pos::new(9, 0, 0), 127), Err(SimError::UnknownCube(_))));
    }

    #[test]
    fn majority_readings() {
        let p = LightProfile::maj_gate();
        assert_eq!(maj_sensed(1, 0, 0, &p).unwrap(), 47);
        assert_eq!(maj_sensed(0, 1, 1, &p).unwrap(), 78);
        assert_eq!(maj_sensed(1, 1, 1, &p).unwrap(), 125);
        assert_eq!(eval_maj_cubelets(1, 0, 0).unwrap(), 0);
        assert_eq!(eval_maj_cubelets(0, 1, 1).unwrap(), 1);
        assert_eq!(eval_maj_cubelets(2, 0, 0), Err(SimError::InvalidBit(2)));
    }

    #[test]
    fn not_majority_variants() {
        for v in [NotMajVariant::InverseCube, NotMajVariant::Programmed] {
            assert_eq!(eval_not_maj_cubelets(0, 1, 0, v).unwrap(), 1);
            assert_eq!(eval_not_maj_cubelets(1, 1, 0, v).unwrap(), 0);
            assert_eq!(eval_not_maj_cubelets(0, 0, 0, v).unwrap(), 1);
        }
    }

    #[test]
    fn adder_rows() {
        let o = eval_adder_cubelets(0, 0, 0).unwrap();
        assert_eq!((o.nm1, o.nm2, o.nm3, o.cout, o.sum), (1, 1, 0, 0, 0));
        let o = eval_adder_cubelets(0, 1, 1).unwrap();
        assert_eq!((o.nm1, o.nm2, o.nm3, o.cout, o.sum), (0, 1, 0, 1, 0));
        let o = eval_adder_cubelets(1, 1, 1).unwrap();
        assert_eq!((o.nm1, o.nm2, o.nm3, o.cout, o.sum), (0, 0, 1, 1, 1));
    }

    #[test]
    fn light_feedback_diverges() {
        // A programmed sensor that watches the flashlight it drives.
        let a = parse_assembly("br_(0,0,0) . ba_(1,0,0) . fl_(2,0,0)", "loop").unwrap();
        let profile = LightProfile {
            name: "loop".into(),
            sensors: vec![SensorLight {
                sensor: Pos::new(0, 0, 0),
                sources: vec![LightSource { source: Pos::new(2, 0, 0), weight: 255 }],
            }],
            threshold: 127,
        };
        let programs = Programs::from([(Pos::new(0, 0, 0), CubeProgram::ThresholdInvert { cutoff: 127 })]);
        let err = settle_capped(&a, &Stimulus::new(), &programs, &profile, 50).unwrap_err();
        assert!(matches!(err, SimError::Diverged { sweeps: 50, ref cubes } if !cubes.is_empty()));
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let lamp = corpus::lamp();
        let stim = Stimulus::from([(Pos::new(1, 0, 0), 10)]);
        assert!(matches!(
            settle(&lamp, &stim, &Programs::new(), &LightProfile::none()),
            Err(SimError::UnknownStimulus(_))
        ));
        assert!(matches!(
            settle(&lamp, &Stimulus::new(), &Programs::new(), &LightProfile::maj_gate()),
            Err(SimError::ProfileMismatch { .. })
        ));
    }
}
