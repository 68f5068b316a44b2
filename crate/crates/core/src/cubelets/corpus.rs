//! Robot strings shipped in `data/robots`, embedded at build time.

use super::lang::parse_assembly;
use super::model::Assembly;

macro_rules! robots {
    ($($name:literal),* $(,)?) => {
        pub const CORPUS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../../../data/robots/", $name, ".cub")))),*
        ];
    };
}

robots!(
    "w_scar",
    "w_fire",
    "w_acar",
    "w_caterpillar",
    "w_lg",
    "w_lg_tape",
    "w_TM",
    "w_MAJgateI",
    "w_MAJgateO",
    "w_NMAJgateO",
    "w_BA",
);

pub const LAMP: &str = include_str!("../../../../data/robots/lamp.cub");
pub const LAMP_BR: &str = include_str!("../../../../data/robots/lamp_br.cub");
pub const CHAIN: &str = include_str!("../../../../data/robots/chain.cub");

pub fn source(name: &str) -> Option<&'static str> {
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses and expands a corpus robot. Panics if the shipped text is broken.
pub fn robot(name: &str) -> Assembly {
    let text = source(name).unwrap_or_else(|| panic!("no corpus robot `{name}`"));
    parse_assembly(text, name).unwrap_or_else(|e| panic!("corpus robot `{name}`: {e}"))
}

pub fn lamp() -> Assembly {
    parse_assembly(LAMP, "lamp").expect("lamp parses")
}

pub fn lamp_br() -> Assembly {
    parse_assembly(LAMP_BR, "lamp_br").expect("lamp_br parses")
}

pub fn chain() -> Assembly {
    parse_assembly(CHAIN, "chain").expect("chain parses")
}

/// Input part and output part together, as placed on the table.
pub fn maj_gate() -> Assembly {
    robot("w_MAJgateI").merged(&robot("w_MAJgateO"), "w_MAJ").expect("gate parts are disjoint")
}

pub fn not_maj_gate() -> Assembly {
    robot("w_MAJgateI").merged(&robot("w_NMAJgateO"), "w_NMAJ").expect("gate parts are disjoint")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubelets::lang::census;

    #[test]
    fn every_robot_expands() {
        assert_eq!(CORPUS.len(), 11);
        for (name, _) in CORPUS {
            assert!(robot(name).mass() > 0, "{name}");
        }
    }

    #[test]
    fn adder_census() {
        let c = census(&robot("w_BA"));
        assert_eq!(c.mass, 39);
        let counts: Vec<(&str, usize)> =
            ["fl", "ba", "di", "br", "in", "bo"].iter().map(|k| (*k, c.counts[*k])).collect();
        assert_eq!(counts, vec![("fl", 17), ("ba", 10), ("di", 5), ("br", 3), ("in", 2), ("bo", 2)]);
        assert_eq!(robot("w_BA").components().len(), 3);
    }
}
