//! Places, transitions and maximal-multiplicity firing.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::Token;
use crate::error::NetError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition<T> {
    pub name: String,
    pub inputs: Vec<(usize, T)>,
    pub outputs: Vec<(usize, T)>,
    pub inhibitors: Vec<(usize, T)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net<T> {
    places: Vec<String>,
    transitions: Vec<Transition<T>>,
    place_ix: HashMap<String, usize>,
    trans_ix: HashMap<String, usize>,
}

/// Token counts indexed like the net's places.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Marking<T>(pub Vec<T>);

impl<T: Token> Marking<T> {
    pub fn get(&self, place: usize) -> T {
        self.0.get(place).copied().unwrap_or_else(T::zero)
    }
}

impl<T: Token> Default for Net<T> {
    fn default() -> Self {
        Net { places: Vec::new(), transitions: Vec::new(), place_ix: HashMap::new(), trans_ix: HashMap::new() }
    }
}

impl<T: Token> Net<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_place(&mut self, name: &str) -> Result<usize, NetError> {
        if self.place_ix.contains_key(name) {
            return Err(NetError::DuplicatePlace(name.into()));
        }
        self.places.push(name.into());
        self.place_ix.insert(name.into(), self.places.len() - 1);
        Ok(self.places.len() - 1)
    }

    pub fn add_transition(&mut self, name: &str) -> Result<usize, NetError> {
        if self.trans_ix.contains_key(name) {
            return Err(NetError::DuplicateTransition(name.into()));
        }
        self.transitions.push(Transition {
            name: name.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            inhibitors: Vec::new(),
        });
        self.trans_ix.insert(name.into(), self.transitions.len() - 1);
        Ok(self.transitions.len() - 1)
    }

    pub fn place(&self, name: &str) -> Result<usize, NetError> {
        self.place_ix.get(name).copied().ok_or_else(|| NetError::UnknownPlace(name.into()))
    }

    pub fn transition(&self, name: &str) -> Result<usize, NetError> {
        self.trans_ix.get(name).copied().ok_or_else(|| NetError::UnknownTransition(name.into()))
    }

    pub fn has_place(&self, name: &str) -> bool {
        self.place_ix.contains_key(name)
    }

    pub fn has_transition(&self, name: &str) -> bool {
        self.trans_ix.contains_key(name)
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition<T>] {
        &self.transitions
    }

    fn arc(&mut self, place: &str, trans: &str, w: T, kind: u8) -> Result<(), NetError> {
        let (from, to) = if kind == 1 { (trans, place) } else { (place, trans) };
        if w.is_zero() {
            return Err(NetError::ZeroWeight { from: from.into(), to: to.into() });
        }
        let p = self.place(place)?;
        let t = self.transition(trans)?;
        let tr = &mut self.transitions[t];
        let list = match kind {
            0 => &mut tr.inputs,
            1 => &mut tr.outputs,
            _ => &mut tr.inhibitors,
        };
        if list.iter().any(|&(q, _)| q == p) {
            return Err(NetError::DuplicateArc { from: from.into(), to: to.into() });
        }
        list.push((p, w));
        Ok(())
    }

    /// Place-to-transition arc.
    pub fn add_input(&mut self, place: &str, trans: &str, w: T) -> Result<(), NetError> {
        self.arc(place, trans, w, 0)
    }

    /// Transition-to-place arc.
    pub fn add_output(&mut self, trans: &str, place: &str, w: T) -> Result<(), NetError> {
        self.arc(place, trans, w, 1)
    }

    /// Enables `trans` only while `place` holds fewer than `w` tokens.
    pub fn add_inhibitor(&mut self, place: &str, trans: &str, w: T) -> Result<(), NetError> {
        self.arc(place, trans, w, 2)
    }

    pub fn zero_marking(&self) -> Marking<T> {
        Marking(vec![T::zero(); self.places.len()])
    }

    pub fn marking_from(&self, values: &[(&str, T)]) -> Result<Marking<T>, NetError> {
        let mut m = self.zero_marking();
        for (name, v) in values {
            m.0[self.place(name)?] = *v;
        }
        Ok(m)
    }

    pub fn marking_map(&self, m: &Marking<T>) -> BTreeMap<String, T> {
        self.places.iter().enumerate().map(|(i, n)| (n.clone(), m.get(i))).collect()
    }

    pub fn tokens(&self, m: &Marking<T>, place: &str) -> Result<T, NetError> {
        Ok(m.get(self.place(place)?))
    }

    /// Maximal firing multiplicity, or `None` when disabled. A transition
    /// with no input arcs fires once.
    pub fn multiplicity(&self, m: &Marking<T>, t: usize) -> Option<T> {
        let tr = &self.transitions[t];
        if tr.inhibitors.iter().any(|&(p, w)| m.get(p) >= w) {
            return None;
        }
        if tr.inputs.is_empty() {
            return Some(T::one());
        }
        let k = tr.inputs.iter().map(|&(p, w)| m.get(p) / w).min().unwrap();
        (!k.is_zero()).then_some(k)
    }

    /// Enabled transitions with their multiplicities, ordered by name.
    pub fn enabled(&self, m: &Marking<T>) -> Vec<(usize, T)> {
        let mut out: Vec<(usize, T)> =
            (0..self.transitions.len()).filter_map(|t| self.multiplicity(m, t).map(|k| (t, k))).collect();
        out.sort_by(|a, b| self.transitions[a.0].name.cmp(&self.transitions[b.0].name));
        out
    }

    /// Fires `t` at its maximal multiplicity.
    pub fn fire(&self, m: &Marking<T>, t: usize) -> Result<(Marking<T>, T), NetError> {
        let k = self.multiplicity(m, t).ok_or_else(|| NetError::NotEnabled(self.transitions[t].name.clone()))?;
        Ok((self.fire_times(m, t, k)?, k))
    }

    /// Fires `t` exactly `k` times in one step.
    pub fn fire_times(&self, m: &Marking<T>, t: usize, k: T) -> Result<Marking<T>, NetError> {
        let tr = &self.transitions[t];
        let max = self.multiplicity(m, t).ok_or_else(|| NetError::NotEnabled(tr.name.clone()))?;
        if k.is_zero() || k > max || (tr.inputs.is_empty() && k > T::one()) {
            return Err(NetError::BadMultiplicity {
                transition: tr.name.clone(),
                k: k.to_string(),
                max: max.to_string(),
            });
        }
        let mut next = m.clone();
        next.0.resize(self.places.len(), T::zero());
        let overflow = |p: usize| NetError::Overflow(self.places[p].clone());
        for &(p, w) in &tr.inputs {
            let d = w.checked_mul(&k).ok_or_else(|| overflow(p))?;
            next.0[p] = next.0[p].checked_sub(&d).ok_or_else(|| overflow(p))?;
        }
        for &(p, w) in &tr.outputs {
            let d = w.checked_mul(&k).ok_or_else(|| overflow(p))?;
            next.0[p] = next.0[p].checked_add(&d).ok_or_else(|| overflow(p))?;
        }
        Ok(next)
    }

    /// Deterministic run: the enabled transition with the lowest name fires
    /// each step until deadlock or `max_steps`.
    pub fn run(&self, initial: &Marking<T>, max_steps: usize) -> Result<RunOutcome<T>, NetError> {
        let mut m = initial.clone();
        let mut steps = Vec::new();
        loop {
            let Some(&(t, _)) = self.enabled(&m).first() else {
                return Ok(RunOutcome { steps, final_marking: m, status: RunStatus::Deadlock });
            };
            if steps.len() == max_steps {
                return Ok(RunOutcome { steps, final_marking: m, status: RunStatus::StepCap });
            }
            let (next, k) = self.fire(&m, t)?;
            m = next;
            steps.push(Step {
                step: steps.len() + 1,
                transition: self.transitions[t].name.clone(),
                k,
                marking: m.clone(),
            });
        }
    }

    /// Reachability graph under every enabled choice, up to `depth` firings
    /// from the initial marking and at most `cap` markings.
    pub fn explore(&self, initial: &Marking<T>, depth: usize, cap: usize) -> Result<Reachability<T>, NetError> {
        let mut index: HashMap<Marking<T>, usize> = HashMap::new();
        let mut markings = vec![initial.clone()];
        let mut levels = vec![0usize];
        let mut edges = Vec::new();
        let mut expanded = vec![false];
        let mut truncated = false;
        let mut depth_limited = false;
        index.insert(initial.clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        'bfs: while let Some(i) = queue.pop_front() {
            let enabled = self.enabled(&markings[i]);
            if enabled.is_empty() {
                expanded[i] = true;
                continue;
            }
            if levels[i] >= depth {
                depth_limited = true;
                continue;
            }
            let mut local = Vec::new();
            for (t, _) in enabled {
                let (next, k) = self.fire(&markings[i], t)?;
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        if markings.len() >= cap {
                            truncated = true;
                            break 'bfs;
                        }
                        markings.push(next.clone());
                        levels.push(levels[i] + 1);
                        expanded.push(false);
                        index.insert(next, markings.len() - 1);
                        queue.push_back(markings.len() - 1);
                        markings.len() - 1
                    }
                };
                local.push(Edge { from: i, to: j, transition: self.transitions[t].name.clone(), k });
            }
            edges.extend(local);
            expanded[i] = true;
        }
        let deadlocks = (0..markings.len()).filter(|&i| expanded[i] && !edges.iter().any(|e| e.from == i)).collect();
        let mut graph = Reachability {
            markings,
            edges,
            deadlocks,
            maximal_sequences: None,
            unique_sequence: None,
            truncated,
            depth_limited,
        };
        if !truncated && !depth_limited {
            graph.count_sequences();
        }
        Ok(graph)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Deadlock,
    StepCap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step<T> {
    pub step: usize,
    pub transition: String,
    pub k: T,
    pub marking: Marking<T>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome<T> {
    pub steps: Vec<Step<T>>,
    pub final_marking: Marking<T>,
    pub status: RunStatus,
}

impl<T> RunOutcome<T> {
    pub fn transitions(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.transition.as_str()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge<T> {
    pub from: usize,
    pub to: usize,
    pub transition: String,
    pub k: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reachability<T> {
    pub markings: Vec<Marking<T>>,
    pub edges: Vec<Edge<T>>,
    /// Indices of markings with no enabled transition.
    pub deadlocks: Vec<usize>,
    /// Number of maximal firing sequences from the initial marking; `None`
    /// when the search was cut short or the graph has a cycle.
    pub maximal_sequences: Option<u64>,
    pub unique_sequence: Option<Vec<String>>,
    /// The state cap stopped the search.
    pub truncated: bool,
    /// Some markings sat at the depth bound with transitions still enabled.
    pub depth_limited: bool,
}

impl<T> Reachability<T> {
    pub fn has_unique_maximal_sequence(&self) -> bool {
        self.maximal_sequences == Some(1)
    }

    fn count_sequences(&mut self) {
        let n = self.markings.len();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for (e_ix, e) in self.edges.iter().enumerate() {
            out[e.from].push(e_ix);
            indeg[e.to] += 1;
        }
        let mut order = Vec::with_capacity(n);
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &e in &out[i] {
                let j = self.edges[e].to;
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        if order.len() < n {
            return;
        }
        let mut count = vec![0u64; n];
        for &i in order.iter().rev() {
            count[i] = if out[i].is_empty() {
                1
            } else {
                out[i].iter().fold(0u64, |acc, &e| acc.saturating_add(count[self.edges[e].to]))
            };
        }
        self.maximal_sequences = Some(count[0]);
        if count[0] == 1 {
            let mut seq = Vec::new();
            let mut i = 0;
            while let Some(&e) = out[i].first() {
                seq.push(self.edges[e].transition.clone());
                i = self.edges[e].to;
            }
            self.unique_sequence = Some(seq);
        }
    }
}
