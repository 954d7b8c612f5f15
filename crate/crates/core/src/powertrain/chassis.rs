use super::{Gear, ShiftMap, VehicleParams};
use crate::error::{ensure_finite, Error, Result};

/// Longitudinal acceleration from the point-mass force balance
/// `(f_prop - f_brake - drag(v) - rolling) / mass`.
///
/// A stopped vehicle whose net force is not positive stays stopped:
/// resistance and brakes cannot drive it backwards.
pub fn chassis_acceleration(v: f64, f_prop: f64, f_brake: f64, p: &VehicleParams) -> Result<f64> {
    ensure_finite(v, "vehicle speed must be finite")?;
    ensure_finite(f_prop, "propulsion force must be finite")?;
    ensure_finite(f_brake, "brake force must be finite")?;
    if v < 0.0 {
        return Err(Error::InvalidInput("vehicle speed must be non-negative"));
    }
    if f_prop < 0.0 || f_brake < 0.0 {
        return Err(Error::InvalidInput("forces must be non-negative"));
    }
    let net = f_prop - f_brake - p.drag_force(v) - p.rolling_force();
    if v == 0.0 && net <= 0.0 {
        return Ok(0.0);
    }
    Ok(net / p.mass_kg)
}

/// Turbine speed seen through the gearbox at vehicle speed `v`.
pub fn turbine_speed(v: f64, gear: Gear, shift_map: &ShiftMap, p: &VehicleParams) -> Result<f64> {
    Ok(shift_map.ratio(gear)? * v / p.tire_radius_m)
}

/// Propulsion force and turbine speed through the gearbox and final drive:
/// `f_prop = eta * R * turbine_torque / r_w`, `turbine_speed = R * v / r_w`.
pub fn driveline_transform(
    turbine_torque: f64,
    v: f64,
    gear: Gear,
    shift_map: &ShiftMap,
    p: &VehicleParams,
) -> Result<(f64, f64)> {
    ensure_finite(turbine_torque, "turbine torque must be finite")?;
    ensure_finite(v, "vehicle speed must be finite")?;
    if v < 0.0 {
        return Err(Error::InvalidInput("vehicle speed must be non-negative"));
    }
    let ratio = shift_map.ratio(gear)?;
    let f_prop = p.driveline_efficiency * ratio * turbine_torque / p.tire_radius_m;
    let omega_t = ratio * v / p.tire_radius_m;
    Ok((f_prop, omega_t))
}
