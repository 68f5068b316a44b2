//! Cube templates and the hand-built lamp, majority and adder nets.
//!
//! Staged nets share one battery control chain: places `run` and
//! `control0..controlN`, transitions `next0..nextN`. Every control place
//! starts marked; `next_i` empties `control_i` (zero marking travels down
//! the chain) and refills `control_{i-1}`. The actions of stage `i` are
//! inhibited by `control_i`, and `next_{i+1}` waits until every place those
//! actions consume from is empty.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::net::{Marking, Net, RunStatus};
use crate::cubelets::sim::AdderOutputs;
use crate::error::NetError;

/// Upper bound of a Cubelets signal.
pub const SIGNAL_MAX: u64 = 255;
/// Light reaching the majority-gate sensor from branches A, B and C.
pub const MAJ_WEIGHTS: [u64; 3] = [47, 31, 47];
pub const MAJ_THRESHOLD: u64 = 78;
/// Light each adder flashlight contributes to its sensor, and the level at
/// which a sensor reads high.
pub const ADDER_WEIGHT: u64 = 85;
pub const ADDER_HIGH: u64 = 128;

const RUN_CAP: usize = 100_000;

/// Incremental net construction by name. Places and transitions are created
/// on first mention; the first structural error is kept and reported by
/// [`NetBuilder::finish`].
#[derive(Default)]
pub struct NetBuilder {
    net: Net<u64>,
    init: BTreeMap<String, u64>,
    stages: Vec<Vec<String>>,
    error: Option<NetError>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn keep<T>(&mut self, r: Result<T, NetError>) {
        if let Err(e) = r {
            self.error.get_or_insert(e);
        }
    }

    pub fn place(&mut self, name: &str) -> &mut Self {
        if !self.net.has_place(name) {
            let r = self.net.add_place(name);
            self.keep(r);
        }
        self
    }

    pub fn mark(&mut self, name: &str, tokens: u64) -> &mut Self {
        self.place(name);
        self.init.insert(name.into(), tokens);
        self
    }

    pub fn trans(&mut self, name: &str) -> &mut Self {
        if !self.net.has_transition(name) {
            let r = self.net.add_transition(name);
            self.keep(r);
        }
        self
    }

    pub fn input(&mut self, place: &str, trans: &str, w: u64) -> &mut Self {
        self.place(place).trans(trans);
        let r = self.net.add_input(place, trans, w);
        self.keep(r);
        self
    }

    pub fn output(&mut self, trans: &str, place: &str, w: u64) -> &mut Self {
        self.place(place).trans(trans);
        let r = self.net.add_output(trans, place, w);
        self.keep(r);
        self
    }

    pub fn inhibit(&mut self, place: &str, trans: &str, w: u64) -> &mut Self {
        self.place(place).trans(trans);
        let r = self.net.add_inhibitor(place, trans, w);
        self.keep(r);
        self
    }

    /// Opens the next stage of the control chain.
    pub fn stage(&mut self) -> &mut Self {
        self.stages.push(Vec::new());
        self
    }

    /// Puts `trans` under control of the current stage.
    pub fn action(&mut self, trans: &str) -> &mut Self {
        self.trans(trans);
        match self.stages.last_mut() {
            Some(s) => s.push(trans.into()),
            None => {
                self.error.get_or_insert(NetError::InvalidInput(format!("action `{trans}` outside any stage")));
            }
        }
        self
    }

    fn control_chain(&mut self) {
        let stages = std::mem::take(&mut self.stages);
        if stages.is_empty() {
            return;
        }
        let n = stages.len();
        self.mark("run", 1);
        for i in 0..=n {
            self.mark(&format!("control{i}"), 1);
        }
        self.input("run", "next0", 1).input("control0", "next0", 1);
        for (i, actions) in stages.iter().enumerate() {
            let ctl = format!("control{i}");
            let next = format!("next{}", i + 1);
            self.input(&format!("control{}", i + 1), &next, 1).output(&next, &ctl, 1).inhibit(&ctl, &next, 1);
            let mut drains: Vec<String> = Vec::new();
            for a in actions {
                self.inhibit(&ctl, a, 1);
                let t = self.net.transition(a).expect("action exists");
                for &(p, _) in &self.net.transitions()[t].inputs {
                    let name = self.net.places()[p].clone();
                    if !drains.contains(&name) {
                        drains.push(name);
                    }
                }
            }
            for d in drains {
                self.inhibit(&d, &next, 1);
            }
        }
    }

    pub fn finish(mut self) -> Result<(Net<u64>, Marking<u64>), NetError> {
        self.control_chain();
        if let Some(e) = self.error {
            return Err(e);
        }
        let pairs: Vec<(&str, u64)> = self.init.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let m = self.net.marking_from(&pairs)?;
        Ok((self.net, m))
    }

    /// Sensor: one transition moving the real value into the sensed place.
    pub fn sensor(&mut self, name: &str, real: &str, outs: &[&str]) -> &mut Self {
        self.input(real, name, 1);
        for o in outs {
            self.output(name, o, 1);
        }
        self
    }

    /// Flashlight in a line: every `x + y` input units give `x` light and
    /// `y` output; `reminder` drains what is left below `x + y`.
    pub fn flashlight(&mut self, name: &str, reminder: &str, ports: [&str; 3], x: u64, y: u64) -> &mut Self {
        let [input, light, output] = ports;
        self.input(input, name, x + y).output(name, light, x).output(name, output, y);
        self.input(input, reminder, 1).inhibit(input, reminder, x + y)
    }

    /// Flashlight at the end of a line: all input becomes light.
    pub fn flashlight_end(&mut self, name: &str, input: &str, light: &str) -> &mut Self {
        self.input(input, name, 1).output(name, light, 1)
    }

    /// Inverse `255 - x`: `initUpper`, `subtract`, `move`, each name
    /// suffixed by `tag`. `move` copies the result into every output place.
    pub fn inverse(&mut self, tag: &str, input: &str, outs: &[&str]) -> &mut Self {
        let flag = format!("initFlag{tag}");
        let upper = format!("upper{tag}");
        let init = format!("initUpper{tag}");
        let sub = format!("subtract{tag}");
        let mv = format!("move{tag}");
        self.mark(&flag, 1).input(&flag, &init, 1).output(&init, &upper, SIGNAL_MAX);
        self.input(input, &sub, 1).input(&upper, &sub, 1);
        self.input(&upper, &mv, 1).inhibit(input, &mv, 1).inhibit(&flag, &mv, 1);
        for o in outs {
            self.output(&mv, o, 1);
        }
        self
    }

    /// Light crossing a gap: a full-scale source adds `w` to `dst`; any
    /// smaller remainder is drained by `{name}r`.
    pub fn contribution(&mut self, name: &str, src: &str, dst: &str, w: u64) -> &mut Self {
        let drain = format!("{name}r");
        self.input(src, name, SIGNAL_MAX).output(name, dst, w);
        self.input(src, &drain, 1).inhibit(src, &drain, SIGNAL_MAX)
    }
}

/// Standalone cube fragments with their ports named as in the figures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Template {
    /// Control chain of `n` stages.
    Battery {
        n: usize,
    },
    Distance,
    Brightness,
    Flashlight {
        x: u64,
        y: u64,
    },
    Inverse,
}

pub fn template(kind: Template) -> Result<(Net<u64>, Marking<u64>), NetError> {
    let mut b = NetBuilder::new();
    match kind {
        Template::Battery { n } => {
            if n == 0 {
                return Err(NetError::InvalidInput("battery needs at least one stage".into()));
            }
            for _ in 0..n {
                b.stage();
            }
        }
        Template::Distance => {
            b.sensor("di", "realDi", &["di_out"]);
        }
        Template::Brightness => {
            b.sensor("br", "realBr", &["br_out"]);
        }
        Template::Flashlight { x, y } => {
            if x == 0 || y == 0 {
                return Err(NetError::InvalidInput(format!("flashlight split {x}+{y} needs both parts at least 1")));
            }
            b.flashlight("fl", "cleanReminder", ["input", "light", "output"], x, y);
        }
        Template::Inverse => {
            b.inverse("", "input", &["inverse"]);
        }
    }
    b.finish()
}

/// Lamp robot scenario: sensor kind, its current reading and the light left
/// over from the previous reading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LampScenario {
    pub sensor: &'static str,
    pub real: u64,
    pub prior_light: u64,
}

impl Default for LampScenario {
    fn default() -> Self {
        LampScenario { sensor: "br", real: 135, prior_light: 22 }
    }
}

fn real_place(sensor: &str) -> String {
    let mut c = sensor.chars();
    match c.next() {
        Some(f) => format!("real{}{}", f.to_ascii_uppercase(), c.as_str()),
        None => "real".into(),
    }
}

/// Sensor, battery and a truncated flashlight joined through `input`.
pub fn build_lamp_net(s: LampScenario) -> Result<(Net<u64>, Marking<u64>), NetError> {
    let real = real_place(s.sensor);
    let mut b = NetBuilder::new();
    b.mark(&real, s.real).place("input").mark("light", s.prior_light);
    b.stage().input("light", "clean", 1).action("clean");
    b.stage().sensor(s.sensor, &real, &["input"]).action(s.sensor);
    b.stage().flashlight_end("fl", "input", "light").action("fl");
    b.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajNetOptions {
    pub weights: [u64; 3],
    /// Adds `decide`, which marks `D` once `lightD2` reaches the threshold.
    pub threshold: Option<u64>,
    /// Adds `clean`, which empties `lightD2` before the control flow splits.
    pub clean: bool,
    pub prior_light: u64,
}

impl Default for MajNetOptions {
    fn default() -> Self {
        MajNetOptions { weights: MAJ_WEIGHTS, threshold: None, clean: false, prior_light: 0 }
    }
}

fn check_signal(name: &str, v: u64) -> Result<(), NetError> {
    if v > SIGNAL_MAX {
        return Err(NetError::InvalidInput(format!("{name}={v} is outside 0..=255")));
    }
    Ok(())
}

/// Majority gate: three sensed branches whose flashlights light `lightD2`.
pub fn build_maj_net(real: [u64; 3], opts: &MajNetOptions) -> Result<(Net<u64>, Marking<u64>), NetError> {
    let mut b = NetBuilder::new();
    let split = "splitControlFlow";
    let sync = "syncControlFlow";
    b.mark("start", 1).input("start", split, 1).output(split, "sync", 1).output(split, "splitDone", 1);
    b.mark("lightD2", opts.prior_light);
    for (i, x) in ["A", "B", "C"].into_iter().enumerate() {
        let realx = format!("real{x}");
        check_signal(&realx, real[i])?;
        let hold = format!("hold{x}");
        let di = format!("di{x}");
        let fl = format!("fl{x}");
        b.mark(&realx, real[i]).mark(&hold, 1).input(&hold, split, 1);
        b.sensor(&di, &realx, &[&fl]).inhibit(&hold, &di, 1);
        let (lit, drain) = (["lA1", "lB3", "lC1"][i], ["lA2", "lB2", "lC2"][i]);
        b.input(&fl, lit, SIGNAL_MAX).output(lit, "lightD2", opts.weights[i]);
        b.input(&fl, drain, 1).inhibit(&fl, drain, SIGNAL_MAX);
        b.inhibit(&realx, sync, 1).inhibit(&fl, sync, 1);
    }
    b.input("sync", sync, 1).output(sync, "done", 1);
    if let Some(t) = opts.threshold {
        if t == 0 {
            return Err(NetError::InvalidInput("threshold must be at least 1".into()));
        }
        b.place("D").input("done", "decide", 1).input("lightD2", "decide", t);
        b.output("decide", "lightD2", t).output("decide", "D", 1);
    }
    if opts.clean {
        b.input("lightD2", "clean", 1).inhibit("splitDone", "clean", 1).inhibit("lightD2", split, 1);
    }
    b.finish()
}

fn run_to_deadlock(net: &Net<u64>, m: &Marking<u64>) -> Result<Marking<u64>, NetError> {
    let out = net.run(m, RUN_CAP)?;
    if out.status != RunStatus::Deadlock {
        return Err(NetError::InvalidInput(format!("net still running after {RUN_CAP} steps")));
    }
    Ok(out.final_marking)
}

pub fn maj_net_eval_with(real: [u64; 3], opts: &MajNetOptions) -> Result<u64, NetError> {
    let (net, m) = build_maj_net(real, opts)?;
    let end = run_to_deadlock(&net, &m)?;
    net.tokens(&end, "lightD2")
}

/// Final `lightD2` of the majority net.
pub fn maj_net_eval(a: u64, b: u64, c: u64) -> Result<u64, NetError> {
    maj_net_eval_with([a, b, c], &MajNetOptions::default())
}

pub fn threshold_classify(light: u64, threshold: u64) -> u8 {
    u8::from(light >= threshold)
}

fn adder_level(name: &str, bit: u8) -> Result<u64, NetError> {
    match bit {
        0 => Ok(0),
        1 => Ok(SIGNAL_MAX),
        _ => Err(NetError::InvalidInput(format!("{name}={bit} is not a bit"))),
    }
}

/// One-bit full adder built from three negated majority stages:
/// `nm1 = ¬MAJ(a, b, cin)`, `nm2 = ¬MAJ(a, b, ¬cin)`, `cout = ¬nm1`,
/// `sum = nm3 = ¬MAJ(nm2, ¬cin, cout)`.
pub fn build_adder_net(a: u8, b: u8, cin: u8) -> Result<(Net<u64>, Marking<u64>), NetError> {
    let mut n = NetBuilder::new();
    n.mark("realA", adder_level("a", a)?).mark("realB", adder_level("b", b)?).mark("realCin", adder_level("cin", cin)?);
    n.stage();
    n.sensor("diA", "realA", &["a1", "a2"]).action("diA");
    n.sensor("diB", "realB", &["b1", "b2"]).action("diB");
    n.sensor("diCin", "realCin", &["c1", "c2"]).action("diCin");
    n.stage().inverse("Cin", "c2", &["nc1", "nc2"]);
    for t in ["initUpperCin", "subtractCin", "moveCin"] {
        n.action(t);
    }
    let sense = |n: &mut NetBuilder, lum: &str, srcs: [&str; 3]| {
        for s in srcs {
            let t = format!("l_{s}");
            n.contribution(&t, s, lum, ADDER_WEIGHT).action(&t).action(&format!("{t}r"));
        }
    };
    let compare = |n: &mut NetBuilder, i: u8| {
        let (lum, hi, cmp, rest) = (format!("lum{i}"), format!("hi{i}"), format!("cmp{i}"), format!("rest{i}"));
        n.input(&lum, &cmp, ADDER_HIGH).output(&cmp, &hi, 1).action(&cmp);
        n.input(&lum, &rest, 1).inhibit(&lum, &rest, ADDER_HIGH).action(&rest);
    };
    let emit = |n: &mut NetBuilder, i: u8, outs: [&str; 2]| {
        let (flag, hi, emit, kill) = (format!("e{i}"), format!("hi{i}"), format!("emit{i}"), format!("kill{i}"));
        n.mark(&flag, 1).input(&flag, &emit, 1).inhibit(&hi, &emit, 1).action(&emit);
        for o in outs {
            n.output(&emit, o, SIGNAL_MAX);
        }
        n.input(&flag, &kill, 1).input(&hi, &kill, 1).action(&kill);
    };
    n.stage();
    sense(&mut n, "lum1", ["a1", "b1", "c1"]);
    sense(&mut n, "lum2", ["a2", "b2", "nc1"]);
    n.stage();
    compare(&mut n, 1);
    compare(&mut n, 2);
    n.stage();
    emit(&mut n, 1, ["nm1", "nm1c"]);
    emit(&mut n, 2, ["nm2", "nm2c"]);
    n.stage().inverse("Cout", "nm1c", &["cout", "coutc"]);
    for t in ["initUpperCout", "subtractCout", "moveCout"] {
        n.action(t);
    }
    n.stage();
    sense(&mut n, "lum3", ["nm2c", "nc2", "coutc"]);
    n.stage();
    compare(&mut n, 3);
    n.stage();
    emit(&mut n, 3, ["nm3", "sum"]);
    n.finish()
}

pub fn eval_adder_net(a: u8, b: u8, cin: u8) -> Result<AdderOutputs, NetError> {
    let (net, m) = build_adder_net(a, b, cin)?;
    let end = run_to_deadlock(&net, &m)?;
    let bit = |p: &str| net.tokens(&end, p).map(|v| threshold_classify(v, ADDER_HIGH));
    Ok(AdderOutputs { nm1: bit("nm1")?, nm2: bit("nm2")?, nm3: bit("nm3")?, cout: bit("cout")?, sum: bit("sum")? })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(net: &Net<u64>, m: &Marking<u64>) -> Marking<u64> {
        run_to_deadlock(net, m).unwrap()
    }

    #[test]
    fn flashlight_splits_evenly() {
        let (net, mut m) = template(Template::Flashlight { x: 1, y: 1 }).unwrap();
        m.0[net.place("input").unwrap()] = 7;
        let end = run(&net, &m);
        let get = |p| net.tokens(&end, p).unwrap();
        assert_eq!((get("light"), get("output"), get("input")), (3, 3, 0));
        assert!(template(Template::Flashlight { x: 0, y: 1 }).is_err());
    }

    #[test]
    fn inverse_complements() {
        for (x, inv) in [(100, 155), (0, 255), (255, 0)] {
            let (net, mut m) = template(Template::Inverse).unwrap();
            m.0[net.place("input").unwrap()] = x;
            let end = run(&net, &m);
            assert_eq!(net.tokens(&end, "inverse").unwrap(), inv, "input {x}");
        }
    }

    #[test]
    fn battery_chain_walks_down() {
        let (net, m) = template(Template::Battery { n: 3 }).unwrap();
        let out = net.run(&m, 100).unwrap();
        assert_eq!(out.transitions(), ["next0", "next1", "next2", "next3"]);
        assert!(template(Template::Battery { n: 0 }).is_err());
    }

    #[test]
    fn sensors_move_everything() {
        let (net, mut m) = template(Template::Distance).unwrap();
        m.0[net.place("realDi").unwrap()] = 200;
        let out = net.run(&m, 10).unwrap();
        assert_eq!(out.steps.len(), 1);
        assert_eq!(out.steps[0].k, 200);
    }

    #[test]
    fn lamp_follows_sigma() {
        let (net, m) = build_lamp_net(LampScenario::default()).unwrap();
        let out = net.run(&m, 100).unwrap();
        assert_eq!(out.transitions(), ["next0", "clean", "next1", "br", "next2", "fl", "next3"]);
        assert_eq!(net.tokens(&out.final_marking, "light").unwrap(), 135);
        let dark = build_lamp_net(LampScenario { real: 0, ..LampScenario::default() }).unwrap();
        assert_eq!(dark.0.tokens(&run(&dark.0, &dark.1), "light").unwrap(), 0);
    }

    #[test]
    fn majority_light_levels() {
        assert_eq!(maj_net_eval(0, 0, 0).unwrap(), 0);
        assert_eq!(maj_net_eval(255, 0, 255).unwrap(), 94);
        assert_eq!(maj_net_eval(255, 255, 0).unwrap(), 78);
        assert!(maj_net_eval(256, 0, 0).is_err());
        assert_eq!(threshold_classify(78, MAJ_THRESHOLD), 1);
        assert_eq!(threshold_classify(47, MAJ_THRESHOLD), 0);
    }

    #[test]
    fn majority_decide_and_clean() {
        let opts = MajNetOptions { threshold: Some(MAJ_THRESHOLD), clean: true, prior_light: 94, ..Default::default() };
        for (real, d) in [([255, 255, 0], 1), ([0, 0, 255], 0)] {
            let (net, m) = build_maj_net(real, &opts).unwrap();
            let end = run(&net, &m);
            assert_eq!(net.tokens(&end, "D").unwrap(), d);
        }
    }

    #[test]
    fn adder_net_rows() {
        for a in 0..2u8 {
            for b in 0..2u8 {
                for c in 0..2u8 {
                    let o = eval_adder_net(a, b, c).unwrap();
                    let s = a + b + c;
                    assert_eq!((o.cout, o.sum), (s / 2, s % 2), "{a}{b}{c}");
                    assert_eq!(o.nm1, 1 - s / 2);
                    assert_eq!(o.nm3, o.sum);
                }
            }
        }
    }
}
