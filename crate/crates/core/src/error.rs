use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("neighbor count {0} is out of range 0..8")]
    CountOutOfRange(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("bit must be 0 or 1, got {0}")]
    InvalidBit(u8),
    #[error("unknown channel {0}")]
    UnknownChannel(usize),
    #[error("seed for channel {0} does not fit inside it")]
    SeedOutsideChannel(usize),
    #[error("seed for channel {channel} overlaps occupied cell ({x}, {y})")]
    SeedOccupied { channel: usize, x: usize, y: usize },
    #[error("probe {0} lies outside the lattice or channel")]
    ProbeOutside(String),
    #[error("timed out after {steps} steps: {reason}")]
    Timeout { steps: usize, reason: String },
}

/// Robot-language failure with a 1-based source location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct LangError {
    pub kind: LangErrorKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unknown cube kind `{0}`")]
    UnknownKind(String),
    #[error("malformed tuple: {0}")]
    BadTuple(String),
    #[error("star without a repetition count")]
    StarWithoutCount,
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("cube collides with an existing cube at ({0})")]
    Collision(String),
    #[error("bare and coordinated terms mixed in one expression")]
    MixedPlacement,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("no cube at ({0})")]
    UnknownCube(String),
    #[error("stimulus key ({0}) is not a distance, knob or temperature cube")]
    UnknownStimulus(String),
    #[error("light profile `{profile}` does not fit the assembly: {msg}")]
    ProfileMismatch { profile: String, msg: String },
    #[error("program attached to ({0}), which is not a cube")]
    UnknownProgram(String),
    #[error("no fixed point after {sweeps} sweeps; still changing: {cubes:?}")]
    Diverged { sweeps: usize, cubes: Vec<String> },
    #[error("input bit must be 0 or 1, got {0}")]
    InvalidBit(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("duplicate place `{0}`")]
    DuplicatePlace(String),
    #[error("duplicate transition `{0}`")]
    DuplicateTransition(String),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("arc {from} -> {to}: weight must be at least 1")]
    ZeroWeight { from: String, to: String },
    #[error("arc {from} -> {to} declared twice")]
    DuplicateArc { from: String, to: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("transition `{transition}` cannot fire {k} times (at most {max})")]
    BadMultiplicity { transition: String, k: String, max: String },
    #[error("token count overflow at `{0}`")]
    Overflow(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported shape: {0}")]
    Unsupported(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("unknown circuit `{0}` (expected maj, notmaj, and, or, adder)")]
    UnknownCircuit(String),
    #[error("unknown backend `{0}` (expected ca, cubelets, sleptsov)")]
    UnknownBackend(String),
    #[error("fixture {path}: {msg}")]
    Fixture { path: String, msg: String },
}
