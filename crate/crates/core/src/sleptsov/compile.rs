//! Assembly to net compilation for straight powered lines and the planar
//! majority gate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::net::{Marking, Net};
use super::templates::{build_maj_net, MajNetOptions, NetBuilder};
use crate::cubelets::corpus;
use crate::cubelets::model::{Assembly, CubeKind, Pos};
use crate::cubelets::sim::{LightProfile, MAJ_INPUTS};
use crate::error::NetError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileOptions {
    /// Initial marking of the line sensor's real-value place.
    pub sensor_value: u64,
    /// Light left in every flashlight from an earlier reading.
    pub light_prior: u64,
    /// Real values for the majority gate inputs A, B, C.
    pub maj_inputs: [u64; 3],
    /// Light coupling used for the majority gate gap.
    pub profile: LightProfile,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            sensor_value: 135,
            light_prior: 22,
            maj_inputs: [255, 255, 0],
            profile: LightProfile::maj_gate(),
        }
    }
}

fn unsupported(msg: impl Into<String>) -> NetError {
    NetError::Unsupported(msg.into())
}

pub fn compile(asm: &Assembly, opts: &CompileOptions) -> Result<(Net<u64>, Marking<u64>), NetError> {
    if let Some(shift) = translation_of(asm, &corpus::maj_gate()) {
        return compile_maj(shift, opts);
    }
    compile_line(asm, opts)
}

/// Offset taking `reference` onto `asm`, if the two match up to translation.
fn translation_of(asm: &Assembly, reference: &Assembly) -> Option<[i64; 3]> {
    let (lo, _) = asm.bounds()?;
    let (rlo, _) = reference.bounds()?;
    let d = [lo.x - rlo.x, lo.y - rlo.y, lo.z - rlo.z];
    let same = asm.mass() == reference.mass()
        && reference.cubes.values().all(|c| asm.get(c.pos.offset(d)).is_some_and(|o| o.kind == c.kind));
    same.then_some(d)
}

fn compile_maj(shift: [i64; 3], opts: &CompileOptions) -> Result<(Net<u64>, Marking<u64>), NetError> {
    let sensor = opts
        .profile
        .sensors
        .first()
        .ok_or_else(|| unsupported(format!("profile `{}` couples no light into the gate", opts.profile.name)))?;
    let inputs: Vec<Pos> = MAJ_INPUTS.iter().map(|p| p.offset(shift)).collect();
    let mut weights = [0u64; 3];
    for src in &sensor.sources {
        let s = src.source.offset(shift);
        let dist = |p: &Pos| (p.x - s.x).abs() + (p.y - s.y).abs() + (p.z - s.z).abs();
        let branch = (0..3).min_by_key(|&i| dist(&inputs[i])).expect("three branches");
        weights[branch] += u64::from(src.weight);
    }
    build_maj_net(opts.maj_inputs, &MajNetOptions { weights, ..MajNetOptions::default() })
}

/// Cubes of a straight, gap-free line, ordered from its lowest coordinate.
fn line_order(asm: &Assembly) -> Result<Vec<(Pos, CubeKind)>, NetError> {
    let (lo, hi) = asm.bounds().ok_or_else(|| unsupported("empty assembly"))?;
    let extent = [hi.x - lo.x, hi.y - lo.y, hi.z - lo.z];
    if extent.iter().filter(|&&e| e > 0).count() > 1 {
        return Err(unsupported("cubes do not lie on one straight line"));
    }
    let len = extent.iter().sum::<i64>() as usize + 1;
    if asm.mass() != len {
        return Err(unsupported("line has a gap"));
    }
    let axis = extent.iter().position(|&e| e > 0).unwrap_or(0);
    let mut cubes: Vec<(Pos, CubeKind)> = asm.cubes.values().map(|c| (c.pos, c.kind)).collect();
    cubes.sort_by_key(|(p, _)| [p.x, p.y, p.z][axis]);
    Ok(cubes)
}

fn compile_line(asm: &Assembly, opts: &CompileOptions) -> Result<(Net<u64>, Marking<u64>), NetError> {
    use CubeKind::*;
    for c in asm.cubes.values() {
        if !matches!(c.kind, Distance | Brightness | Flashlight | Inverse | Passive | Battery) {
            return Err(unsupported(format!("cube `{}` at ({}) cannot be compiled", c.kind.code(), c.pos)));
        }
    }
    let mut cubes = line_order(asm)?;
    if !cubes.iter().any(|(_, k)| *k == Battery) {
        return Err(unsupported("line has no battery"));
    }
    let is_sensor = |k: CubeKind| matches!(k, Distance | Brightness);
    if !cubes.first().is_some_and(|(_, k)| is_sensor(*k)) {
        cubes.reverse();
    }
    let sensor = match cubes.first() {
        Some(&(_, k)) if is_sensor(k) => k,
        _ => return Err(unsupported("the sensor must sit at one end of the line")),
    };
    let data: Vec<(Pos, CubeKind)> = cubes[1..].iter().copied().filter(|(_, k)| *k != Battery).collect();
    if let Some((p, k)) = data.iter().find(|(_, k)| is_sensor(*k)) {
        return Err(unsupported(format!("second sensor `{}` at ({p})", k.code())));
    }

    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut name = |base: &'static str| {
        let n = seen.entry(base).or_insert(0);
        *n += 1;
        if *n == 1 {
            base.to_string()
        } else {
            format!("{base}{n}")
        }
    };

    let mut b = NetBuilder::new();
    let code = sensor.code();
    let real = format!("real{}{}", code[..1].to_ascii_uppercase(), &code[1..]);
    b.mark(&real, opts.sensor_value);
    let lights: Vec<String> = data.iter().filter(|(_, k)| *k == Flashlight).map(|_| name("light")).collect();
    b.stage();
    for (i, light) in lights.iter().enumerate() {
        let clean = if i == 0 { "clean".to_string() } else { format!("clean{}", i + 1) };
        b.mark(light, opts.light_prior).input(light, &clean, 1).action(&clean);
    }
    let mut input = name("input");
    b.stage().sensor(code, &real, &[&input]).action(code);
    let mut lights = lights.into_iter();
    for (j, &(_, kind)) in data.iter().enumerate() {
        let last = j + 1 == data.len();
        let next = if last && kind != Flashlight {
            "output".to_string()
        } else if last {
            String::new()
        } else {
            name("input")
        };
        b.stage();
        match kind {
            Flashlight => {
                let t = name("fl");
                let light = lights.next().expect("one light per flashlight");
                if last {
                    b.flashlight_end(&t, &input, &light).action(&t);
                } else {
                    let rem = format!("cleanReminder{}", &t[2..]);
                    b.flashlight(&t, &rem, [&input, &light, &next], 1, 1).action(&t).action(&rem);
                }
            }
            Inverse => {
                let t = name("in");
                let tag = &t[2..];
                b.inverse(tag, &input, &[&next]);
                for base in ["initUpper", "subtract", "move"] {
                    b.action(&format!("{base}{tag}"));
                }
            }
            Passive => {
                let t = name("pa");
                b.input(&input, &t, 1).output(&t, &next, 1).action(&t);
            }
            _ => unreachable!("filtered above"),
        }
        input = next;
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubelets::lang::parse_assembly;
    use crate::sleptsov::templates::{build_lamp_net, maj_net_eval_with, LampScenario};

    fn net_of(text: &str) -> Result<(Net<u64>, Marking<u64>), NetError> {
        compile(&parse_assembly(text, "t").unwrap(), &CompileOptions::default())
    }

    #[test]
    fn lamp_compiles_to_hand_net() {
        let (net, m) = compile(&corpus::lamp_br(), &CompileOptions::default()).unwrap();
        let (hand, hm) = build_lamp_net(LampScenario::default()).unwrap();
        let a = net.run(&m, 100).unwrap();
        let b = hand.run(&hm, 100).unwrap();
        assert_eq!(a.transitions(), b.transitions());
        assert_eq!(net.marking_map(&a.final_marking), hand.marking_map(&b.final_marking));
        let (net, m) = compile(&corpus::lamp(), &CompileOptions::default()).unwrap();
        let t = net.run(&m, 100).unwrap();
        assert_eq!(t.transitions(), ["next0", "clean", "next1", "di", "next2", "fl", "next3"]);
    }

    #[test]
    fn line_is_direction_free() {
        let (net, m) = net_of("fl . ba . br").unwrap();
        assert_eq!(net.run(&m, 100).unwrap().transitions().len(), 7);
    }

    #[test]
    fn chain_and_inverse() {
        let (net, m) = compile(&corpus::chain(), &CompileOptions::default()).unwrap();
        let end = net.run(&m, 100).unwrap().final_marking;
        let get = |p| net.tokens(&end, p).unwrap();
        assert_eq!((get("light"), get("light2"), get("light3")), (67, 33, 33));
        let (net, m) = net_of("di . ba . in . pa").unwrap();
        let end = net.run(&m, 100).unwrap().final_marking;
        assert_eq!(net.tokens(&end, "output").unwrap(), 120);
    }

    #[test]
    fn maj_layout_compiles() {
        for real in [[0, 255, 255], [255, 0, 0], [255, 255, 255]] {
            let opts = CompileOptions { maj_inputs: real, ..CompileOptions::default() };
            let (net, m) = compile(&corpus::maj_gate(), &opts).unwrap();
            let end = net.run(&m, 1_000).unwrap().final_marking;
            assert_eq!(
                net.tokens(&end, "lightD2").unwrap(),
                maj_net_eval_with(real, &MajNetOptions::default()).unwrap()
            );
        }
    }

    #[test]
    fn unsupported_shapes() {
        for text in ["di . ba . dr", "di . fl", "di . B . ba . fl", "ba . di . fl", "di . ba . br"] {
            assert!(matches!(net_of(text), Err(NetError::Unsupported(_))), "{text}");
        }
        assert!(matches!(compile(&Assembly::new("e"), &CompileOptions::default()), Err(NetError::Unsupported(_))));
    }
}
