use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use cubeworks::ca::circuits::{calibrate_gate, default_grid, read_probe, signal_channel, ReadoutWindow};
use cubeworks::ca::render::{to_ascii, to_pgm, SceneFile};
use cubeworks::ca::{local_rule, Lattice, RuleBS};
use cubeworks::cubelets::sim::{self, LightProfile, Programs, Stimulus};
use cubeworks::cubelets::{census, corpus, format, parse, parse_assembly, validate, Assembly};
use cubeworks::sleptsov::text::format_marking;
use cubeworks::sleptsov::{compile, format_net, format_trace, parse_net, CompileOptions, DEFAULT_STATE_CAP};
use cubeworks::verify::{default_golden_dir, verify, Backend, Circuit, VerifyOptions, CA_FIXTURE};
use cubeworks::SleptsovNet;

const GOLDEN_ENV: &str = "CUBEWORKS_GOLDEN_DIR";

#[derive(Parser)]
#[command(
    name = "cubeworks",
    version,
    about = "Gates and adders on a B2/S2345 automaton, Cubelets assemblies and Sleptsov nets"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a B/S rule and tabulate its local transitions.
    RuleTest { rule: String },
    /// Run, seed and calibrate cellular automaton scenes.
    #[command(subcommand)]
    Ca(CaCmd),
    /// Work with Cubelets assemblies. FILE is a path or a shipped robot name.
    Robot {
        #[arg(value_enum)]
        action: RobotAction,
        file: String,
        /// JSON object mapping "x,y,z" of sense cubes to 0..255.
        #[arg(long)]
        stimulus: Option<PathBuf>,
        /// Light coupling for simulate: none, maj-gate or adder.
        #[arg(long, default_value = "none")]
        profile: String,
        /// Real value of the line sensor (compile).
        #[arg(long, default_value_t = 135)]
        sensor_value: u64,
        /// Light left from the previous reading (compile).
        #[arg(long, default_value_t = 22)]
        light_prior: u64,
        /// Majority inputs A,B,C as real values (compile).
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [255u64, 255, 0])]
        maj_inputs: Vec<u64>,
    },
    /// Run or explore a net file.
    Net {
        #[arg(value_enum)]
        action: NetAction,
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        #[arg(long, default_value_t = 1_000)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        cap: usize,
        /// Print the trace as text lines instead of JSON (run).
        #[arg(long)]
        text: bool,
    },
    /// Check truth tables; exits non-zero if any row fails.
    Verify {
        #[arg(long)]
        circuit: String,
        #[arg(long, value_delimiter = ',', default_value = "cubelets,sleptsov")]
        backends: Vec<String>,
        #[arg(long)]
        golden: Option<PathBuf>,
        #[arg(long, default_value_t = cubeworks::sleptsov::MAJ_THRESHOLD)]
        sleptsov_threshold: u64,
    },
}

#[derive(Subcommand)]
enum CaCmd {
    /// Step a scene and optionally dump frames.
    Run {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value = "B2/S2345")]
        rule: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        frames: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "ascii")]
        format: FrameFormat,
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
    /// Print a straight single-signal channel scene.
    Channel {
        #[arg(long, default_value_t = 60)]
        length: usize,
        #[arg(long, default_value_t = 5)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        bit: u8,
        #[arg(long, default_value_t = 4)]
        probe_length: usize,
    },
    /// Search the documented gate grid for a majority geometry.
    Calibrate {
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to freeze a successful geometry as the CA fixture.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameFormat {
    Ascii,
    Pgm,
}

#[derive(Clone, Copy, ValueEnum)]
enum RobotAction {
    Parse,
    Validate,
    Census,
    Simulate,
    Compile,
}

#[derive(Clone, Copy, ValueEnum)]
enum NetAction {
    Run,
    Explore,
}

/// Writes to stdout; a closed pipe downstream is not an error.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    emit(&(serde_json::to_string_pretty(v)? + "\n"))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn rule_test(text: &str) -> Result<()> {
    let rule = RuleBS::parse(text)?;
    let table: Vec<_> = (0..=8u8)
        .map(|n| json!({ "neighbors": n, "dead": u8::from(rule.apply(false, n)), "alive": u8::from(rule.apply(true, n)) }))
        .collect();
    let cases: Vec<_> = [[0, 0, 0, 0, 0, 0, 1, 0, 0], [0, 0, 0, 1, 0, 0, 0, 1, 0], [1, 0, 1, 1, 1, 0, 1, 1, 1]]
        .into_iter()
        .map(|cells| json!({ "cells": cells, "next": local_rule(&rule, cells) }))
        .collect();
    print_json(
        &json!({ "rule": rule.to_string(), "birth": rule.birth(), "survival": rule.survival(), "table": table, "cases": cases }),
    )
}

fn frame_path(dir: &Path, t: usize, format: FrameFormat) -> PathBuf {
    let ext = match format {
        FrameFormat::Ascii => "txt",
        FrameFormat::Pgm => "pgm",
    };
    dir.join(format!("frame_{t:06}.{ext}"))
}

fn write_frame(dir: &Path, t: usize, l: &Lattice, format: FrameFormat) -> Result<PathBuf> {
    let path = frame_path(dir, t, format);
    match format {
        FrameFormat::Ascii => fs::write(&path, to_ascii(l)),
        FrameFormat::Pgm => fs::write(&path, to_pgm(l)),
    }
    .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn ca_run(
    scene: &Path,
    rule: &str,
    steps: usize,
    frames: Option<&Path>,
    format: FrameFormat,
    every: usize,
) -> Result<()> {
    if every == 0 {
        bail!("--every must be at least 1");
    }
    let rule = RuleBS::parse(rule)?;
    let scene = SceneFile::from_json(&read(scene)?).context("scene file")?;
    let start = scene.to_lattice()?;
    if let Some(dir) = frames {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut written = Vec::new();
    let mut err = None;
    let mut observe = |t: usize, l: &Lattice| {
        if let (Some(dir), None) = (frames, &err) {
            if t.is_multiple_of(every) || t == steps {
                match write_frame(dir, t, l, format) {
                    Ok(p) => written.push(p.display().to_string()),
                    Err(e) => err = Some(e),
                }
            }
        }
    };
    let end = start.run_observed(&rule, steps, |t, l| observe(t, l));
    if let Some(e) = err {
        return Err(e);
    }
    let mut probes = serde_json::Map::new();
    for (name, p) in &scene.probes {
        let reading =
            match read_probe(&start, &rule, p, &ReadoutWindow { max_steps: steps, ..ReadoutWindow::default() }) {
                Ok((class, t)) => json!({ "class": class, "arrival": t }),
                Err(e) => json!({ "error": e.to_string() }),
            };
        probes.insert(name.clone(), reading);
    }
    print_json(&json!({
        "rule": rule.to_string(),
        "steps": steps,
        "population": { "initial": start.population(), "final": end.population() },
        "frames": written,
        "probes": probes,
    }))
}

fn ca_calibrate(out: Option<&Path>, golden: Option<&Path>) -> Result<()> {
    let report = calibrate_gate(&default_grid());
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(path) = out {
        fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    if let (Some(dir), Some(best)) = (golden, &report.best) {
        let path = dir.join(CA_FIXTURE);
        fs::write(&path, serde_json::to_string_pretty(best)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    emit(&(text + "\n"))
}

fn load_robot(spec: &str) -> Result<(Assembly, String)> {
    let path = Path::new(spec);
    if path.exists() {
        let text = read(path)?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("robot").to_string();
        return Ok((parse_assembly(&text, &name).with_context(|| format!("parsing {spec}"))?, text));
    }
    let merged = match spec {
        "w_MAJ" => Some(corpus::maj_gate()),
        "w_NMAJ" => Some(corpus::not_maj_gate()),
        _ => None,
    };
    if let Some(asm) = merged {
        let text = format(&asm);
        return Ok((asm, text));
    }
    let text = match spec {
        "lamp" => corpus::LAMP,
        "lamp_br" => corpus::LAMP_BR,
        "chain" => corpus::CHAIN,
        _ => corpus::source(spec).ok_or_else(|| anyhow!("`{spec}` is neither a file nor a shipped robot"))?,
    };
    Ok((parse_assembly(text, spec)?, text.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn robot(
    action: RobotAction,
    file: &str,
    stimulus: Option<&Path>,
    profile: &str,
    sensor_value: u64,
    light_prior: u64,
    maj_inputs: &[u64],
) -> Result<()> {
    let (asm, text) = load_robot(file)?;
    match action {
        RobotAction::Parse => {
            let expr = parse(&text)?;
            print_json(&json!({ "name": asm.name, "expr": expr, "cubes": asm.cubes.values().collect::<Vec<_>>() }))
        }
        RobotAction::Validate => print_json(&validate(&asm)),
        RobotAction::Census => print_json(&census(&asm)),
        RobotAction::Simulate => {
            let profile = LightProfile::by_name(profile).ok_or_else(|| anyhow!("unknown profile `{profile}`"))?;
            let stim: Stimulus = match stimulus {
                Some(p) => serde_json::from_str(&read(p)?).context("stimulus file")?,
                None => Stimulus::new(),
            };
            let programs = if profile.name == "adder" { sim::adder_programs() } else { Programs::new() };
            print_json(&sim::settle(&asm, &stim, &programs, &profile)?)
        }
        RobotAction::Compile => {
            let opts = CompileOptions {
                sensor_value,
                light_prior,
                maj_inputs: [maj_inputs[0], maj_inputs[1], maj_inputs[2]],
                ..CompileOptions::default()
            };
            let (net, m) = compile(&asm, &opts)?;
            emit(&format!("# compiled from {}\n{}", asm.name, format_net(&net, &m)))
        }
    }
}

fn net(action: NetAction, file: &Path, max_steps: usize, depth: usize, cap: usize, text: bool) -> Result<()> {
    let (net, m): (SleptsovNet, _) = parse_net(&read(file)?)?;
    match action {
        NetAction::Run => {
            let out = net.run(&m, max_steps)?;
            if text {
                return emit(&format_trace(&net, &out));
            }
            let lines: Vec<String> = format_trace(&net, &out).lines().map(str::to_string).collect();
            print_json(&json!({
                "status": out.status,
                "steps": out.steps.len(),
                "sequence": out.transitions(),
                "trace": lines,
                "final": net.marking_map(&out.final_marking),
            }))
        }
        NetAction::Explore => {
            let g = net.explore(&m, depth, cap)?;
            let markings: Vec<String> = g.markings.iter().map(|mk| format_marking(&net, mk)).collect();
            print_json(&json!({
                "states": g.markings.len(),
                "edges": g.edges,
                "markings": markings,
                "deadlocks": g.deadlocks,
                "maximal_sequences": g.maximal_sequences,
                "unique_sequence": g.unique_sequence,
                "unique": g.has_unique_maximal_sequence(),
                "truncated": g.truncated,
                "depth_limited": g.depth_limited,
            }))
        }
    }
}

fn run_verify(circuit: &str, backends: &[String], golden: Option<PathBuf>, threshold: u64) -> Result<bool> {
    let circuit: Circuit = circuit.parse()?;
    let golden_dir =
        golden.or_else(|| std::env::var_os(GOLDEN_ENV).map(PathBuf::from)).unwrap_or_else(default_golden_dir);
    let opts = VerifyOptions { golden_dir, sleptsov_threshold: threshold };
    let mut reports = Vec::new();
    for b in backends {
        let backend: Backend = b.trim().parse()?;
        reports.push(verify(circuit, backend, &opts)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    print_json(&json!({ "circuit": circuit, "pass": pass, "reports": reports }))?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::RuleTest { rule } => rule_test(&rule).map(|_| true),
        Cmd::Ca(CaCmd::Run { scene, rule, steps, frames, format, every }) => {
            ca_run(&scene, &rule, steps, frames.as_deref(), format, every).map(|_| true)
        }
        Cmd::Ca(CaCmd::Channel { length, width, bit, probe_length }) => {
            signal_channel(length, width, bit, probe_length)
                .map_err(Into::into)
                .and_then(|scene| emit(&(SceneFile::from_scene(&scene).to_json() + "\n")))
                .map(|_| true)
        }
        Cmd::Ca(CaCmd::Calibrate { out, golden }) => ca_calibrate(out.as_deref(), golden.as_deref()).map(|_| true),
        Cmd::Robot { action, file, stimulus, profile, sensor_value, light_prior, maj_inputs } => {
            robot(action, &file, stimulus.as_deref(), &profile, sensor_value, light_prior, &maj_inputs).map(|_| true)
        }
        Cmd::Net { action, file, max_steps, depth, cap, text } => {
            net(action, &file, max_steps, depth, cap, text).map(|_| true)
        }
        Cmd::Verify { circuit, backends, golden, sleptsov_threshold } => {
            run_verify(&circuit, &backends, golden, sleptsov_threshold)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
