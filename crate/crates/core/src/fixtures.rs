//! Reference networks used throughout the tests and bundled under `fixtures/`.

use crate::io::parse_network;
use crate::model::TemporalNetwork;

/// Two subsystems on three nodes: `u -> v1 -> v2`, then `v2 -> v3` with no input.
pub const EX1_JSON: &str = include_str!("../../../fixtures/ex1.json");
/// Patterns of [`EX1_JSON`] applied in the order 1, 2, 1.
pub const EH3_JSON: &str = include_str!("../../../fixtures/eh3.json");
/// Same pairs as [`EX1_JSON`], used as a switched system.
pub const SW_JSON: &str = include_str!("../../../fixtures/sw.json");
/// Four nodes: `v3` is input-unreachable in subsystem 1; subsystem 2 has a
/// self-loop at `v3` and no inputs.
pub const FIG3_JSON: &str = include_str!("../../../fixtures/fig3.json");
/// [`FIG3_JSON`] with an input on `v3` in subsystem 2.
pub const FIG2_JSON: &str = include_str!("../../../fixtures/fig2.json");

fn load(text: &str) -> TemporalNetwork {
    parse_network(text).expect("bundled fixture parses")
}

pub fn ex1() -> TemporalNetwork {
    load(EX1_JSON)
}

pub fn eh3() -> TemporalNetwork {
    load(EH3_JSON)
}

pub fn sw() -> TemporalNetwork {
    load(SW_JSON)
}

pub fn fig3() -> TemporalNetwork {
    load(FIG3_JSON)
}

pub fn fig2() -> TemporalNetwork {
    load(FIG2_JSON)
}

/// All bundled fixtures by file stem.
pub fn all() -> Vec<(&'static str, TemporalNetwork)> {
    vec![
        ("ex1", ex1()),
        ("eh3", eh3()),
        ("sw", sw()),
        ("fig3", fig3()),
        ("fig2", fig2()),
    ]
}
