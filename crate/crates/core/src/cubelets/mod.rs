pub mod corpus;
pub mod lang;
pub mod model;
pub mod sim;

pub use lang::{census, expand, format, parse, parse_assembly, validate, Census, Expr, ValidationReport};
pub use model::{Assembly, Cube, CubeKind, Dir, Orientation, Pos, Role};
