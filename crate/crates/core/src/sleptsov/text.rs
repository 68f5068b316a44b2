//! Line-oriented net files and trace output.

use std::collections::HashMap;
use std::fmt::Write;

use super::net::{Marking, Net, RunOutcome};
use super::Token;
use crate::error::NetError;

enum Decl<'a> {
    Arc(&'a str, &'a str, &'a str),
    Inhib(&'a str, &'a str, &'a str),
}

fn weight<T: Token>(line: usize, s: &str) -> Result<T, NetError> {
    s.parse().map_err(|_| NetError::Parse { line, msg: format!("bad count `{s}`") })
}

/// Reads a net and its initial marking. Declarations may appear in any order.
pub fn parse_net<T: Token>(text: &str) -> Result<(Net<T>, Marking<T>), NetError> {
    let mut net = Net::new();
    let mut init: Vec<(usize, T)> = Vec::new();
    let mut arcs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        let at = |e: NetError| match e {
            NetError::Parse { .. } => e,
            other => NetError::Parse { line, msg: other.to_string() },
        };
        match words.as_slice() {
            [] => {}
            ["place", name, n] => {
                let p = net.add_place(name).map_err(at)?;
                init.push((p, weight(line, n)?));
            }
            ["place", name] => {
                net.add_place(name).map_err(at)?;
            }
            ["trans", name] => {
                net.add_transition(name).map_err(at)?;
            }
            ["arc", a, "->", b, w] => arcs.push((line, Decl::Arc(a, b, w))),
            ["inhib", p, "-o", t, w] => arcs.push((line, Decl::Inhib(p, t, w))),
            _ => return Err(NetError::Parse { line, msg: format!("cannot read `{}`", body.trim()) }),
        }
    }
    for (line, decl) in arcs {
        let at = |e: NetError| NetError::Parse { line, msg: e.to_string() };
        match decl {
            Decl::Arc(a, b, w) => {
                let w: T = weight(line, w)?;
                match (net.has_place(a), net.has_transition(b), net.has_transition(a), net.has_place(b)) {
                    (true, true, _, _) => net.add_input(a, b, w).map_err(at)?,
                    (_, _, true, true) => net.add_output(a, b, w).map_err(at)?,
                    _ => {
                        return Err(NetError::Parse {
                            line,
                            msg: format!("arc {a} -> {b} must join a declared place and transition"),
                        })
                    }
                }
            }
            Decl::Inhib(p, t, w) => {
                let w: T = weight(line, w)?;
                net.add_inhibitor(p, t, w).map_err(at)?;
            }
        }
    }
    let mut m = net.zero_marking();
    for (p, v) in init {
        m.0[p] = v;
    }
    Ok((net, m))
}

pub fn format_net<T: Token>(net: &Net<T>, marking: &Marking<T>) -> String {
    let mut out = String::new();
    for (i, p) in net.places().iter().enumerate() {
        writeln!(out, "place {p} {}", marking.get(i)).unwrap();
    }
    for t in net.transitions() {
        writeln!(out, "trans {}", t.name).unwrap();
    }
    let places = net.places();
    for t in net.transitions() {
        for &(p, w) in &t.inputs {
            writeln!(out, "arc {} -> {} {w}", places[p], t.name).unwrap();
        }
        for &(p, w) in &t.outputs {
            writeln!(out, "arc {} -> {} {w}", t.name, places[p]).unwrap();
        }
        for &(p, w) in &t.inhibitors {
            writeln!(out, "inhib {} -o {} {w}", places[p], t.name).unwrap();
        }
    }
    out
}

/// Nonzero places as `name=value`, in declaration order.
pub fn format_marking<T: Token>(net: &Net<T>, marking: &Marking<T>) -> String {
    net.places()
        .iter()
        .enumerate()
        .filter(|&(i, _)| !marking.get(i).is_zero())
        .map(|(i, p)| format!("{p}={}", marking.get(i)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// One line per firing: `<step> <trans> x<k> | <nonzero marking>`.
pub fn format_trace<T: Token>(net: &Net<T>, outcome: &RunOutcome<T>) -> String {
    let mut out = String::new();
    for s in &outcome.steps {
        writeln!(out, "{} {} x{} | {}", s.step, s.transition, s.k, format_marking(net, &s.marking)).unwrap();
    }
    out
}

/// Place name to value, for reports.
pub fn marking_by_name<T: Token>(net: &Net<T>, marking: &Marking<T>) -> HashMap<String, T> {
    net.places().iter().enumerate().map(|(i, p)| (p.clone(), marking.get(i))).collect()
}
