//! Data compiled into the binary: the default truck and the two reference
//! cycles.

use cyclesmooth_core::DriveCycle;

use crate::cycle_file::parse_cycle;

pub const HWFET_CSV: &str = include_str!("../../../data/cycles/hwfet.csv");
pub const LA92_CSV: &str = include_str!("../../../data/cycles/la92.csv");

pub use crate::config::DEFAULT_CONFIG;

/// EPA Highway Fuel Economy Test, 765 s at 1 s.
pub fn hwfet() -> DriveCycle {
    parse_cycle(HWFET_CSV, "hwfet").expect("bundled HWFET cycle is valid")
}

/// Aggressive urban cycle with LA92 statistics; see `data/cycles/README.md`.
pub fn la92() -> DriveCycle {
    parse_cycle(LA92_CSV, "la92").expect("bundled LA92 cycle is valid")
}

/// Looks up a bundled cycle by name (`hwfet` or `la92`).
pub fn by_name(name: &str) -> Option<DriveCycle> {
    match name.to_ascii_lowercase().as_str() {
        "hwfet" => Some(hwfet()),
        "la92" => Some(la92()),
        _ => None,
    }
}
