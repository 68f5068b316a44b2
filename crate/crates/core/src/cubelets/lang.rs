//! Robot string language.
//!
//! ```text
//! seq     = [ postfix { "." postfix } ]
//! postfix = atom [ "*" INT [ "@" "(" INT "," INT "," INT ")" ] ]
//! atom    = "(" seq ")" | "B" [ "^" INT ] | KIND [ "_" coords ] [ "^" dirs ]
//! ```
//!
//! `·` is accepted for `.`, and `#` starts a line comment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::{Assembly, Cube, CubeKind, Dir, Orientation, Pos};
use crate::error::{LangError, LangErrorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    fn err(self, kind: LangErrorKind) -> LangError {
        LangError { kind, line: self.line, col: self.col }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeTerm {
    pub kind: CubeKind,
    pub pos: Option<Pos>,
    pub orient: Option<Orientation>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Expr {
    Cube(CubeTerm),
    Blank { count: u32, span: Span },
    Concat { items: Vec<Expr> },
    Group { inner: Box<Expr> },
    Star { body: Box<Expr>, count: u32, shift: [i64; 3], span: Span },
}

impl Expr {
    pub fn empty() -> Expr {
        Expr::Concat { items: Vec::new() }
    }

    /// Cube terms in source order.
    pub fn terms(&self) -> Vec<&CubeTerm> {
        let mut out = Vec::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms<'a>(&'a self, out: &mut Vec<&'a CubeTerm>) {
        match self {
            Expr::Cube(t) => out.push(t),
            Expr::Blank { .. } => {}
            Expr::Concat { items } => items.iter().for_each(|e| e.collect_terms(out)),
            Expr::Group { inner } => inner.collect_terms(out),
            Expr::Star { body, .. } => body.collect_terms(out),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Upper(char),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    Caret,
    Underscore,
    Star,
    At,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Upper(c) => format!("`{c}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Underscore => "`_`".into(),
            Tok::Star => "`*`".into(),
            Tok::At => "`@`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, LangError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        let start = i;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' | '·' => Tok::Dot,
            '^' => Tok::Caret,
            '_' => Tok::Underscore,
            '*' => Tok::Star,
            '@' => Tok::At,
            'a'..='z' => {
                while i < chars.len() && chars[i].is_ascii_lowercase() {
                    i += 1;
                }
                col += i - start;
                out.push((Tok::Ident(chars[start..i].iter().collect()), span));
                continue;
            }
            'A'..='Z' => Tok::Upper(c),
            '-' | '0'..='9' => {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| span.err(LangErrorKind::BadTuple(format!("bad integer `{s}`"))))?;
                col += i - start;
                out.push((Tok::Int(n), span));
                continue;
            }
            other => return Err(span.err(LangErrorKind::UnexpectedChar(other))),
        };
        out.push((tok, span));
        i += 1;
        col += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    at: usize,
    end: Span,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn span(&self) -> Span {
        self.toks.get(self.at).map(|(_, s)| *s).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn found(&self) -> String {
        self.peek().map(Tok::describe).unwrap_or_else(|| "end of input".into())
    }

    fn expect(&mut self, tok: Tok, bad: impl Fn(String) -> LangErrorKind) -> Result<Span, LangError> {
        if self.peek() == Some(&tok) {
            Ok(self.bump().unwrap().1)
        } else {
            Err(self.span().err(bad(format!("expected {}, found {}", tok.describe(), self.found()))))
        }
    }

    fn seq(&mut self) -> Result<Expr, LangError> {
        let mut items = vec![self.postfix()?];
        while self.peek() == Some(&Tok::Dot) {
            self.bump();
            items.push(self.postfix()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Concat { items } })
    }

    fn postfix(&mut self) -> Result<Expr, LangError> {
        let atom = self.atom()?;
        if self.peek() != Some(&Tok::Star) {
            return Ok(atom);
        }
        let span = self.bump().unwrap().1;
        let count = match self.peek() {
            Some(&Tok::Int(n)) if n >= 0 => {
                self.bump();
                u32::try_from(n).map_err(|_| span.err(LangErrorKind::BadTuple(format!("star count {n} too large"))))?
            }
            _ => return Err(span.err(LangErrorKind::StarWithoutCount)),
        };
        let shift = if self.peek() == Some(&Tok::At) {
            self.bump();
            self.int_tuple()?
        } else {
            [0, 0, 0]
        };
        Ok(Expr::Star { body: Box::new(atom), count, shift, span })
    }

    fn atom(&mut self) -> Result<Expr, LangError> {
        let span = self.span();
        match self.bump() {
            Some((Tok::LParen, _)) => {
                if self.peek() == Some(&Tok::RParen) {
                    return Err(self
                        .span()
                        .err(LangErrorKind::Unexpected { expected: "a term".into(), found: "`)`".into() }));
                }
                let inner = self.seq()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(if self.peek().is_none() {
                        span.err(LangErrorKind::Unbalanced)
                    } else {
                        self.span()
                            .err(LangErrorKind::Unexpected { expected: "`.` or `)`".into(), found: self.found() })
                    });
                }
                self.bump();
                Ok(Expr::Group { inner: Box::new(inner) })
            }
            Some((Tok::Upper('B'), _)) => {
                let mut count = 1;
                if self.peek() == Some(&Tok::Caret) {
                    self.bump();
                    match self.bump() {
                        Some((Tok::Int(n), _)) if n >= 1 && n <= u32::MAX as i64 => count = n as u32,
                        Some((t, s)) => {
                            return Err(s.err(LangErrorKind::BadTuple(format!(
                                "blank run needs a positive count, found {}",
                                t.describe()
                            ))))
                        }
                        None => return Err(self.end.err(LangErrorKind::BadTuple("blank run needs a count".into()))),
                    }
                }
                Ok(Expr::Blank { count, span })
            }
            Some((Tok::Ident(code), _)) => {
                let kind = CubeKind::from_code(&code).ok_or_else(|| span.err(LangErrorKind::UnknownKind(code)))?;
                let pos = if self.peek() == Some(&Tok::Underscore) {
                    self.bump();
                    let [x, y, z] = self.int_tuple()?;
                    Some(Pos::new(x, y, z))
                } else {
                    None
                };
                let orient = if self.peek() == Some(&Tok::Caret) {
                    self.bump();
                    Some(self.dir_tuple()?)
                } else {
                    None
                };
                Ok(Expr::Cube(CubeTerm { kind, pos, orient, span }))
            }
            Some((Tok::RParen, s)) => Err(s.err(LangErrorKind::Unbalanced)),
            Some((t, s)) => Err(s.err(LangErrorKind::Unexpected { expected: "a term".into(), found: t.describe() })),
            None => {
                Err(self.end.err(LangErrorKind::Unexpected { expected: "a term".into(), found: "end of input".into() }))
            }
        }
    }

    fn int_tuple(&mut self) -> Result<[i64; 3], LangError> {
        self.expect(Tok::LParen, LangErrorKind::BadTuple)?;
        let mut out = [0; 3];
        for (i, slot) in out.iter_mut().enumerate() {
            if i > 0 {
                self.expect(Tok::Comma, LangErrorKind::BadTuple)?;
            }
            match self.peek() {
                Some(&Tok::Int(n)) => {
                    self.bump();
                    *slot = n;
                }
                _ => {
                    return Err(self
                        .span()
                        .err(LangErrorKind::BadTuple(format!("expected integer, found {}", self.found()))))
                }
            }
        }
        self.expect(Tok::RParen, LangErrorKind::BadTuple)?;
        Ok(out)
    }

    fn dir_tuple(&mut self) -> Result<Orientation, LangError> {
        self.expect(Tok::LParen, LangErrorKind::BadTuple)?;
        let mut dirs = [Dir::F; 3];
        for (i, slot) in dirs.iter_mut().enumerate() {
            if i > 0 {
                self.expect(Tok::Comma, LangErrorKind::BadTuple)?;
            }
            match self.peek().cloned() {
                Some(Tok::Upper(c)) if Dir::from_letter(c).is_some() => {
                    self.bump();
                    *slot = Dir::from_letter(c).unwrap();
                }
                _ => {
                    return Err(self
                        .span()
                        .err(LangErrorKind::BadTuple(format!("expected one of N,S,E,W,F,B, found {}", self.found()))))
                }
            }
        }
        self.expect(Tok::RParen, LangErrorKind::BadTuple)?;
        Ok(Orientation::new(dirs[0], dirs[1], dirs[2]))
    }
}

pub fn parse(text: &str) -> Result<Expr, LangError> {
    let toks = lex(text)?;
    let lines: Vec<&str> = text.split('\n').collect();
    let end = Span { line: lines.len(), col: lines.last().map_or(0, |l| l.chars().count()) + 1 };
    if toks.is_empty() {
        return Ok(Expr::empty());
    }
    let mut p = Parser { toks, at: 0, end };
    let expr = p.seq()?;
    match p.bump() {
        None => Ok(expr),
        Some((Tok::RParen, s)) => Err(s.err(LangErrorKind::Unbalanced)),
        Some((t, s)) => Err(s.err(LangErrorKind::Unexpected { expected: "`.`".into(), found: t.describe() })),
    }
}

fn resolved(term: &CubeTerm, pos: Pos) -> Cube {
    let orient = if term.kind.is_symmetric() { None } else { Some(term.orient.unwrap_or(Orientation::IDENTITY)) };
    Cube::new(term.kind, pos, orient)
}

/// Resolves every term to a placed cube, before any collision check.
fn place(expr: &Expr) -> Result<Vec<(Cube, Span)>, LangError> {
    let terms = expr.terms();
    let coordinated = terms.iter().filter(|t| t.pos.is_some()).count();
    if coordinated != 0 && coordinated != terms.len() {
        let first_pos = terms[0].pos.is_some();
        let odd = terms.iter().find(|t| t.pos.is_some() != first_pos).unwrap();
        return Err(odd.span.err(LangErrorKind::MixedPlacement));
    }
    let mut out = Vec::new();
    if coordinated > 0 {
        fn walk(e: &Expr, shift: [i64; 3], out: &mut Vec<(Cube, Span)>) {
            match e {
                Expr::Cube(t) => out.push((resolved(t, t.pos.unwrap().offset(shift)), t.span)),
                Expr::Blank { .. } => {}
                Expr::Concat { items } => items.iter().for_each(|i| walk(i, shift, out)),
                Expr::Group { inner } => walk(inner, shift, out),
                Expr::Star { body, count, shift: d, .. } => {
                    for k in 0..*count as i64 {
                        walk(body, [shift[0] + k * d[0], shift[1] + k * d[1], shift[2] + k * d[2]], out);
                    }
                }
            }
        }
        walk(expr, [0, 0, 0], &mut out);
    } else {
        fn walk(e: &Expr, cursor: &mut i64, out: &mut Vec<(Cube, Span)>) {
            match e {
                Expr::Cube(t) => {
                    out.push((resolved(t, Pos::new(*cursor, 0, 0)), t.span));
                    *cursor += 1;
                }
                Expr::Blank { count, .. } => *cursor += *count as i64,
                Expr::Concat { items } => items.iter().for_each(|i| walk(i, cursor, out)),
                Expr::Group { inner } => walk(inner, cursor, out),
                Expr::Star { body, count, .. } => (0..*count).for_each(|_| walk(body, cursor, out)),
            }
        }
        walk(expr, &mut 0, &mut out);
    }
    Ok(out)
}

pub fn expand(expr: &Expr) -> Result<Assembly, LangError> {
    let mut asm = Assembly::default();
    for (cube, span) in place(expr)? {
        asm.insert(cube).map_err(|_| span.err(LangErrorKind::Collision(cube.pos.to_string())))?;
    }
    Ok(asm)
}

pub fn parse_assembly(text: &str, name: &str) -> Result<Assembly, LangError> {
    let mut a = expand(&parse(text)?)?;
    a.name = name.to_string();
    Ok(a)
}

fn term_text(c: &Cube) -> String {
    let p = c.pos;
    match c.orient {
        Some(o) => format!("{}_({},{},{})^{}", c.kind.code(), p.x, p.y, p.z, o),
        None => format!("{}_({},{},{})", c.kind.code(), p.x, p.y, p.z),
    }
}

/// Canonical row-major text; blanks fill gaps from the bounding box's
/// low x edge within each occupied row.
pub fn format(asm: &Assembly) -> String {
    let Some((lo, _)) = asm.bounds() else {
        return String::new();
    };
    let mut parts = Vec::new();
    let mut row: Option<(i64, i64)> = None;
    let mut prev_x = lo.x - 1;
    for c in asm.cubes.values() {
        if row != Some((c.pos.z, c.pos.y)) {
            row = Some((c.pos.z, c.pos.y));
            prev_x = lo.x - 1;
        }
        match c.pos.x - prev_x - 1 {
            0 => {}
            1 => parts.push("B".to_string()),
            k => parts.push(format!("B^{k}")),
        }
        parts.push(term_text(c));
        prev_x = c.pos.x;
    }
    parts.join(" . ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub connected: bool,
    pub components: usize,
    pub battery_count: usize,
    pub orientation_ok: bool,
    /// Positions claimed by more than one term.
    pub collisions: Vec<Pos>,
    pub functional: bool,
}

fn orientation_valid(c: &Cube, strict: bool) -> bool {
    match (c.kind.is_symmetric(), c.orient) {
        (true, None) => true,
        (false, Some(o)) => o.is_orthogonal() && (!strict || o.is_right_handed()),
        _ => false,
    }
}

fn report(asm: &Assembly, collisions: Vec<Pos>, strict: bool) -> ValidationReport {
    let components = asm.components().len();
    let battery_count = asm.cubes.values().filter(|c| c.kind == CubeKind::Battery).count();
    let orientation_ok = asm.cubes.values().all(|c| orientation_valid(c, strict));
    ValidationReport {
        connected: components == 1,
        components,
        battery_count,
        orientation_ok,
        functional: battery_count >= 1 && orientation_ok && collisions.is_empty(),
        collisions,
    }
}

/// Orthogonality-only orientation check.
pub fn validate(asm: &Assembly) -> ValidationReport {
    report(asm, Vec::new(), false)
}

/// Strict mode additionally requires right-handed orientations.
pub fn validate_strict(asm: &Assembly) -> ValidationReport {
    report(asm, Vec::new(), true)
}

/// Validates an expression without stopping at collisions; the first term
/// at a position wins and later ones are reported.
pub fn validate_expr(expr: &Expr, strict: bool) -> Result<ValidationReport, LangError> {
    let mut asm = Assembly::default();
    let mut collisions = Vec::new();
    for (cube, _) in place(expr)? {
        if asm.insert(cube).is_err() && !collisions.contains(&cube.pos) {
            collisions.push(cube.pos);
        }
    }
    Ok(report(&asm, collisions, strict))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub mass: usize,
    pub volume: [u64; 3],
    pub counts: BTreeMap<String, usize>,
}

pub fn census(asm: &Assembly) -> Census {
    let mut counts = BTreeMap::new();
    for c in asm.cubes.values() {
        *counts.entry(c.kind.code().to_string()).or_insert(0) += 1;
    }
    Census { mass: asm.mass(), volume: asm.volume(), counts }
}
