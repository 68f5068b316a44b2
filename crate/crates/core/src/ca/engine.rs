//! Semi-totalistic two-state automaton on a bounded lattice with frozen cells.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::RuleError;

/// Birth/survival rule over Moore neighbor counts, stored as 9-bit masks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleBS {
    birth: u16,
    survival: u16,
}

impl RuleBS {
    /// The diffusion rule used for every channel scene.
    pub const B2_S2345: RuleBS = RuleBS { birth: 1 << 2, survival: (1 << 2) | (1 << 3) | (1 << 4) | (1 << 5) };

    pub fn new(birth: impl IntoIterator<Item = u8>, survival: impl IntoIterator<Item = u8>) -> Result<Self, RuleError> {
        let mut rule = RuleBS { birth: 0, survival: 0 };
        for n in birth {
            if n > 8 {
                return Err(RuleError::CountOutOfRange(n));
            }
            rule.birth |= 1 << n;
        }
        for n in survival {
            if n > 8 {
                return Err(RuleError::CountOutOfRange(n));
            }
            rule.survival |= 1 << n;
        }
        Ok(rule)
    }

    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let bytes = text.as_bytes();
        if bytes.is_empty() {
            return Err(RuleError::Syntax { pos: 0, msg: "empty rule string".into() });
        }
        let mut pos = 0;
        let expect = |pos: &mut usize, ch: u8| -> Result<(), RuleError> {
            match bytes.get(*pos) {
                Some(&b) if b == ch => {
                    *pos += 1;
                    Ok(())
                }
                Some(&b) => Err(RuleError::Syntax {
                    pos: *pos,
                    msg: format!("expected '{}', found '{}'", ch as char, b as char),
                }),
                None => {
                    Err(RuleError::Syntax { pos: *pos, msg: format!("expected '{}', found end of input", ch as char) })
                }
            }
        };
        let digits = |pos: &mut usize| -> Result<u16, RuleError> {
            let mut mask = 0u16;
            while let Some(&b) = bytes.get(*pos) {
                match b {
                    b'0'..=b'8' => mask |= 1 << (b - b'0'),
                    b'9' => {
                        return Err(RuleError::Syntax {
                            pos: *pos,
                            msg: "neighbor count 9 is out of range 0..8".into(),
                        })
                    }
                    _ => break,
                }
                *pos += 1;
            }
            Ok(mask)
        };
        expect(&mut pos, b'B')?;
        let birth = digits(&mut pos)?;
        expect(&mut pos, b'/')?;
        expect(&mut pos, b'S')?;
        let survival = digits(&mut pos)?;
        if let Some(&b) = bytes.get(pos) {
            return Err(RuleError::Syntax { pos, msg: format!("unexpected character '{}'", b as char) });
        }
        Ok(RuleBS { birth, survival })
    }

    pub fn births_on(&self, n: u8) -> bool {
        n <= 8 && self.birth & (1 << n) != 0
    }

    pub fn survives_on(&self, n: u8) -> bool {
        n <= 8 && self.survival & (1 << n) != 0
    }

    pub fn birth(&self) -> Vec<u8> {
        (0..=8).filter(|&n| self.births_on(n)).collect()
    }

    pub fn survival(&self) -> Vec<u8> {
        (0..=8).filter(|&n| self.survives_on(n)).collect()
    }

    /// Next state of a cell given its current state and live-neighbor count.
    #[inline]
    pub fn apply(&self, alive: bool, live_neighbors: u8) -> bool {
        if alive {
            self.survives_on(live_neighbors)
        } else {
            self.births_on(live_neighbors)
        }
    }
}

impl FromStr for RuleBS {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleBS::parse(s)
    }
}

impl fmt::Display for RuleBS {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B")?;
        for n in self.birth() {
            write!(f, "{n}")?;
        }
        write!(f, "/S")?;
        for n in self.survival() {
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Bounded binary lattice. Cells outside the lattice read as dead; frozen
/// cells keep their state forever but still count as neighbors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    width: usize,
    height: usize,
    state: Vec<u8>,
    frozen: Vec<bool>,
}

impl Lattice {
    pub fn new(width: usize, height: usize) -> Self {
        Lattice { width, height, state: vec![0; width * height], frozen: vec![false; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    fn idx(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.state[self.idx(x, y)] != 0
    }

    /// Out-of-bounds coordinates read as dead.
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        self.in_bounds(x, y) && self.get(x as usize, y as usize)
    }

    pub fn set(&mut self, x: usize, y: usize, alive: bool) {
        let i = self.idx(x, y);
        self.state[i] = alive as u8;
    }

    pub fn is_frozen(&self, x: usize, y: usize) -> bool {
        self.frozen[self.idx(x, y)]
    }

    pub fn freeze(&mut self, x: usize, y: usize, alive: bool) {
        let i = self.idx(x, y);
        self.frozen[i] = true;
        self.state[i] = alive as u8;
    }

    pub fn population(&self) -> usize {
        self.state.iter().zip(&self.frozen).filter(|(s, f)| **s != 0 && !**f).count()
    }

    pub fn cells(&self) -> &[u8] {
        &self.state
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn live_neighbors(&self, x: usize, y: usize) -> u8 {
        let (x, y) = (x as i64, y as i64);
        let mut n = 0;
        for dy in -1..=1 {
            for dx in -1..=1 {
                if (dx, dy) != (0, 0) && self.get_signed(x + dx, y + dy) {
                    n += 1;
                }
            }
        }
        n
    }

    pub fn reflect_horizontal(&self) -> Lattice {
        let mut out = Lattice::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let (sx, sy) = (self.width - 1 - x, y);
                let i = out.idx(x, y);
                out.state[i] = self.state[self.idx(sx, sy)];
                out.frozen[i] = self.frozen[self.idx(sx, sy)];
            }
        }
        out
    }

    pub fn reflect_vertical(&self) -> Lattice {
        let mut out = Lattice::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let (sx, sy) = (x, self.height - 1 - y);
                let i = out.idx(x, y);
                out.state[i] = self.state[self.idx(sx, sy)];
                out.frozen[i] = self.frozen[self.idx(sx, sy)];
            }
        }
        out
    }

    /// One synchronous update of every non-frozen cell.
    pub fn step(&self, rule: &RuleBS) -> Lattice {
        let (w, h) = (self.width, self.height);
        let mut next = self.state.clone();
        if w == 0 || h == 0 {
            return self.clone();
        }
        // Horizontal 3-sums per row, then vertical sums of three rows.
        let mut hsum = vec![0u8; w * h];
        for y in 0..h {
            let row = &self.state[y * w..(y + 1) * w];
            let out = &mut hsum[y * w..(y + 1) * w];
            for x in 0..w {
                let l = if x > 0 { row[x - 1] } else { 0 };
                let r = if x + 1 < w { row[x + 1] } else { 0 };
                out[x] = l + row[x] + r;
            }
        }
        let (birth, survival) = (rule.birth, rule.survival);
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if self.frozen[i] {
                    continue;
                }
                let mut n = hsum[i];
                if y > 0 {
                    n += hsum[i - w];
                }
                if y + 1 < h {
                    n += hsum[i + w];
                }
                let alive = self.state[i];
                n -= alive;
                let mask = if alive != 0 { survival } else { birth };
                next[i] = ((mask >> n) & 1) as u8;
            }
        }
        Lattice { width: w, height: h, state: next, frozen: self.frozen.clone() }
    }

    /// `steps`-fold composition of [`Lattice::step`]. The observer sees
    /// every intermediate generation, starting with generation 0.
    pub fn run_observed<F: FnMut(usize, &Lattice)>(&self, rule: &RuleBS, steps: usize, mut observe: F) -> Lattice {
        let mut cur = self.clone();
        observe(0, &cur);
        for t in 1..=steps {
            cur = cur.step(rule);
            observe(t, &cur);
        }
        cur
    }

    pub fn run(&self, rule: &RuleBS, steps: usize) -> Lattice {
        self.run_observed(rule, steps, |_, _| {})
    }
}

/// Evaluates the local rule on a 3x3 neighborhood listed as
/// `(center, n1, ..., n8)`.
pub fn local_rule(rule: &RuleBS, cells: [u8; 9]) -> u8 {
    let live = cells[1..].iter().filter(|&&c| c != 0).count() as u8;
    rule.apply(cells[0] != 0, live) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_b2_s2345() {
        let r = RuleBS::parse("B2/S2345").unwrap();
        assert_eq!(r, RuleBS::B2_S2345);
        assert_eq!(r.birth(), vec![2]);
        assert_eq!(r.survival(), vec![2, 3, 4, 5]);
        assert_eq!(r.to_string(), "B2/S2345");
    }

    #[test]
    fn parses_empty_sets_and_collapses_duplicates() {
        let r = RuleBS::parse("B/S").unwrap();
        assert!(r.birth().is_empty() && r.survival().is_empty());
        let r = RuleBS::parse("B2/S2245").unwrap();
        assert_eq!(r.survival(), vec![2, 4, 5]);
    }

    #[test]
    fn rejects_bad_rules_with_position() {
        match RuleBS::parse("B29/S23") {
            Err(RuleError::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(RuleBS::parse(""), Err(RuleError::Syntax { pos: 0, .. })));
        match RuleBS::parse("B2S23") {
            Err(RuleError::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        match RuleBS::parse("B2/S23x") {
            Err(RuleError::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn moore_cases() {
        let r = RuleBS::B2_S2345;
        assert_eq!(local_rule(&r, [0, 0, 0, 0, 0, 0, 1, 0, 0]), 0);
        assert_eq!(local_rule(&r, [0, 0, 0, 1, 0, 0, 0, 1, 0]), 1);
        assert_eq!(local_rule(&r, [1, 0, 0, 0, 1, 1, 0, 1, 0]), 1);
        assert_eq!(local_rule(&r, [1, 0, 1, 1, 1, 0, 1, 1, 1]), 0);
    }

    #[test]
    fn dead_lattice_is_quiescent() {
        let l = Lattice::new(12, 9);
        assert_eq!(l.run(&RuleBS::B2_S2345, 100), l);
    }

    #[test]
    fn frozen_cells_hold_and_count() {
        let mut l = Lattice::new(5, 5);
        l.freeze(1, 2, true);
        l.freeze(3, 2, true);
        let next = l.step(&RuleBS::B2_S2345);
        // (2,1), (2,2), (2,3) each see both frozen live cells.
        assert!(next.get(2, 1) && next.get(2, 2) && next.get(2, 3));
        assert!(next.get(1, 2) && next.is_frozen(1, 2));
        let later = l.run(&RuleBS::B2_S2345, 20);
        assert_eq!(later.frozen_mask(), l.frozen_mask());
        assert!(later.get(1, 2) && later.get(3, 2));
    }

    #[test]
    fn run_zero_is_identity() {
        let mut l = Lattice::new(4, 4);
        l.set(1, 1, true);
        assert_eq!(l.run(&RuleBS::B2_S2345, 0), l);
    }
}
