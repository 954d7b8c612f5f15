//! Truck model: chassis force balance, driveline kinematics, torque
//! converter coupling, engine shaft dynamics, gear selection and fuel rate.
//!
//! Brakes act at the wheels only; nothing back-drives the engine shaft.

mod chassis;
mod converter;
mod engine;
mod params;
mod shift;

pub use chassis::{chassis_acceleration, driveline_transform, turbine_speed};
pub use converter::{torque_converter_coupling, ConverterTorques, TorqueConverterMap};
pub use engine::{
    engine_shaft_step, fuel_rate, fuel_rate_sample, BsfcMap, FuelSample, G_PER_KWH_TO_G_PER_J,
};
pub use params::VehicleParams;
pub use shift::{select_gear, Gear, ShiftMap};

#[cfg(test)]
pub(crate) use {converter::test_converter, params::test_params};

/// The static maps of one truck.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowertrainMaps {
    pub converter: TorqueConverterMap,
    pub shift: ShiftMap,
    pub bsfc: BsfcMap,
}

/// Dynamic state of the truck between simulation steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowertrainState {
    pub engine_speed_rad_s: f64,
    pub gear: Gear,
    pub vehicle_speed_m_s: f64,
    pub position_m: f64,
}
