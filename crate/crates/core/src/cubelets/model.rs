use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Sense,
    Think,
    Action,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CubeKind {
    Distance,
    Brightness,
    Knob,
    Temperature,
    Battery,
    Bluetooth,
    Passive,
    Blocker,
    Inverse,
    Minimum,
    Maximum,
    Threshold,
    Rotate,
    Drive,
    BarGraph,
    Speaker,
    Flashlight,
}

impl CubeKind {
    pub const ALL: [CubeKind; 17] = [
        CubeKind::Distance,
        CubeKind::Brightness,
        CubeKind::Knob,
        CubeKind::Temperature,
        CubeKind::Battery,
        CubeKind::Bluetooth,
        CubeKind::Passive,
        CubeKind::Blocker,
        CubeKind::Inverse,
        CubeKind::Minimum,
        CubeKind::Maximum,
        CubeKind::Threshold,
        CubeKind::Rotate,
        CubeKind::Drive,
        CubeKind::BarGraph,
        CubeKind::Speaker,
        CubeKind::Flashlight,
    ];

    pub fn code(self) -> &'static str {
        use CubeKind::*;
        match self {
            Distance => "di",
            Brightness => "br",
            Knob => "kn",
            Temperature => "te",
            Battery => "ba",
            Bluetooth => "bl",
            Passive => "pa",
            Blocker => "bo",
            Inverse => "in",
            Minimum => "mi",
            Maximum => "ma",
            Threshold => "th",
            Rotate => "ro",
            Drive => "dr",
            BarGraph => "bg",
            Speaker => "sp",
            Flashlight => "fl",
        }
    }

    pub fn from_code(code: &str) -> Option<CubeKind> {
        CubeKind::ALL.into_iter().find(|k| k.code() == code)
    }

    pub fn role(self) -> Role {
        use CubeKind::*;
        match self {
            Distance | Brightness | Knob | Temperature => Role::Sense,
            Battery | Bluetooth | Passive | Blocker | Inverse | Minimum | Maximum | Threshold => Role::Think,
            Rotate | Drive | BarGraph | Speaker | Flashlight => Role::Action,
        }
    }

    /// Fully symmetric cubes carry no face labelling.
    pub fn is_symmetric(self) -> bool {
        matches!(self, CubeKind::Blocker | CubeKind::Inverse | CubeKind::Passive)
    }
}

impl fmt::Display for CubeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for CubeKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for CubeKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CubeKind::from_code(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown cube kind `{s}`")))
    }
}

/// Global direction. E/W run along x, N/S along y, F/B along z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    N,
    S,
    E,
    W,
    F,
    B,
}

impl Dir {
    pub const ALL: [Dir; 6] = [Dir::N, Dir::S, Dir::E, Dir::W, Dir::F, Dir::B];

    pub fn vector(self) -> [i64; 3] {
        match self {
            Dir::E => [1, 0, 0],
            Dir::W => [-1, 0, 0],
            Dir::N => [0, 1, 0],
            Dir::S => [0, -1, 0],
            Dir::F => [0, 0, 1],
            Dir::B => [0, 0, -1],
        }
    }

    pub fn from_vector(v: [i64; 3]) -> Option<Dir> {
        Dir::ALL.into_iter().find(|d| d.vector() == v)
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::N => Dir::S,
            Dir::S => Dir::N,
            Dir::E => Dir::W,
            Dir::W => Dir::E,
            Dir::F => Dir::B,
            Dir::B => Dir::F,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Dir::N => 'N',
            Dir::S => 'S',
            Dir::E => 'E',
            Dir::W => 'W',
            Dir::F => 'F',
            Dir::B => 'B',
        }
    }

    pub fn from_letter(c: char) -> Option<Dir> {
        Dir::ALL.into_iter().find(|d| d.letter() == c)
    }

    fn axis(self) -> usize {
        self.vector().iter().position(|&c| c != 0).unwrap()
    }
}

/// Global directions faced by a cube's front, north and west faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Orientation {
    pub f: Dir,
    pub n: Dir,
    pub w: Dir,
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation { f: Dir::F, n: Dir::N, w: Dir::W };

    pub fn new(f: Dir, n: Dir, w: Dir) -> Self {
        Orientation { f, n, w }
    }

    /// The three directions lie on three distinct axes.
    pub fn is_orthogonal(&self) -> bool {
        let (a, b, c) = (self.f.axis(), self.n.axis(), self.w.axis());
        a != b && b != c && a != c
    }

    /// Orthogonal and `f × n = w`, the handedness of the identity basis.
    pub fn is_right_handed(&self) -> bool {
        if !self.is_orthogonal() {
            return false;
        }
        let (f, n) = (self.f.vector(), self.n.vector());
        let cross = [f[1] * n[2] - f[2] * n[1], f[2] * n[0] - f[0] * n[2], f[0] * n[1] - f[1] * n[0]];
        cross == self.w.vector()
    }

    /// Every orthogonal triple, right- and left-handed.
    pub fn all_orthogonal() -> Vec<Orientation> {
        let mut out = Vec::new();
        for f in Dir::ALL {
            for n in Dir::ALL {
                for w in Dir::ALL {
                    let o = Orientation { f, n, w };
                    if o.is_orthogonal() {
                        out.push(o);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.f.letter(), self.n.letter(), self.w.letter())
    }
}

/// Lattice position. Ordered row-major: z, then y, then x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pos {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Pos {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Pos { x, y, z }
    }

    pub fn offset(self, d: [i64; 3]) -> Pos {
        Pos::new(self.x + d[0], self.y + d[1], self.z + d[2])
    }

    pub fn face_neighbors(self) -> impl Iterator<Item = Pos> {
        Dir::ALL.into_iter().map(move |d| self.offset(d.vector()))
    }
}

impl Ord for Pos {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.z, self.y, self.x).cmp(&(other.z, other.y, other.x))
    }
}

impl PartialOrd for Pos {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.x, self.y, self.z)
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected `x,y,z`, got `{s}`"));
        }
        let n = |t: &str| t.parse::<i64>().map_err(|e| format!("bad coordinate `{t}`: {e}"));
        Ok(Pos::new(n(parts[0])?, n(parts[1])?, n(parts[2])?))
    }
}

impl Serialize for Pos {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pos {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cube {
    pub kind: CubeKind,
    pub pos: Pos,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orient: Option<Orientation>,
}

impl Cube {
    pub fn new(kind: CubeKind, pos: Pos, orient: Option<Orientation>) -> Self {
        Cube { kind, pos, orient }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assembly {
    pub name: String,
    pub cubes: BTreeMap<Pos, Cube>,
}

impl Assembly {
    pub fn new(name: impl Into<String>) -> Self {
        Assembly { name: name.into(), cubes: BTreeMap::new() }
    }

    pub fn mass(&self) -> usize {
        self.cubes.len()
    }

    pub fn get(&self, pos: Pos) -> Option<&Cube> {
        self.cubes.get(&pos)
    }

    /// Inserts a cube, returning the occupant if the cell was taken.
    pub fn insert(&mut self, cube: Cube) -> Result<(), Cube> {
        match self.cubes.get(&cube.pos) {
            Some(existing) => Err(*existing),
            None => {
                self.cubes.insert(cube.pos, cube);
                Ok(())
            }
        }
    }

    /// Inclusive min and max corners.
    pub fn bounds(&self) -> Option<(Pos, Pos)> {
        let mut it = self.cubes.keys();
        let first = *it.next()?;
        let (mut lo, mut hi) = (first, first);
        for p in it {
            lo = Pos::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Pos::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        Some((lo, hi))
    }

    /// Bounding-box extents along x, y and z.
    pub fn volume(&self) -> [u64; 3] {
        match self.bounds() {
            None => [0, 0, 0],
            Some((lo, hi)) => [(hi.x - lo.x + 1) as u64, (hi.y - lo.y + 1) as u64, (hi.z - lo.z + 1) as u64],
        }
    }

    pub fn neighbors(&self, pos: Pos) -> impl Iterator<Item = &Cube> + '_ {
        pos.face_neighbors().filter_map(move |p| self.cubes.get(&p))
    }

    /// Face-connected components, each sorted, in order of their first cube.
    pub fn components(&self) -> Vec<Vec<Pos>> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.cubes.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(p) = queue.pop_front() {
                for q in p.face_neighbors() {
                    if self.cubes.contains_key(&q) && seen.insert(q) {
                        comp.push(q);
                        queue.push_back(q);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    /// Union of two assemblies; fails on the first shared position.
    pub fn merged(&self, other: &Assembly, name: impl Into<String>) -> Result<Assembly, Pos> {
        let mut out = self.clone();
        out.name = name.into();
        for c in other.cubes.values() {
            out.insert(*c).map_err(|_| c.pos)?;
        }
        Ok(out)
    }
}
