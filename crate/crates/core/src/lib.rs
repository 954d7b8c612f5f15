//! Longitudinal fuel-economy model of a conventional automatic-transmission
//! truck, a split-range PI driver, moving-average drive-cycle smoothing, and
//! the sweep that trades smoothing fuel savings against the extra
//! inter-vehicle spacing the smoothed trajectory needs.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration
//! parsing, parallel execution and the command-line front end live in the
//! `cyclesmooth` companion crate.
//!
//! Module map:
//!
//! - [`powertrain`]: chassis force balance, driveline, torque converter,
//!   engine shaft, shift map and fuel rate.
//! - [`driver`]: PI speed tracking with anti-windup and a traction/brake split.
//! - [`cycle`]: drive cycles, moving-average smoothing, distance, resampling.
//! - [`sim`]: fixed-step closed-loop simulation and its trajectory log.
//! - [`tradeoff`]: spacing metric and the smoothing half-width sweep.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cycle;
pub mod driver;
mod error;
pub mod interp;
pub mod powertrain;
pub mod sim;
pub mod tradeoff;

pub use cycle::{
    cycle_distance, position_trace, resample_cycle, smooth_cycle, DriveCycle, SmoothingMode,
    SmoothingSpec,
};
pub use driver::{driver_step, DriverCommand, DriverGains, DriverState};
pub use error::{Error, Result};
pub use powertrain::{
    chassis_acceleration, driveline_transform, engine_shaft_step, fuel_rate, select_gear,
    torque_converter_coupling, BsfcMap, Gear, PowertrainMaps, PowertrainState, ShiftMap,
    TorqueConverterMap, VehicleParams,
};
pub use sim::{fuel_per_100km, simulate, LogRow, Model, SimConfig, TargetHold, TrajectoryLog};
pub use tradeoff::{
    spacing_requirement, sweep_tradeoff, Executor, Serial, SpacingReport, TradeoffFront,
    TradeoffPoint,
};
