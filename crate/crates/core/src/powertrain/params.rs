use alloc::string::ToString;

use crate::error::{Error, Result};

/// Static chassis, driveline and engine constants of the truck.
///
/// The bundled values are a representative medium-duty parameterization and
/// are not measured data for any specific vehicle.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VehicleParams {
    pub mass_kg: f64,
    pub air_density_kg_m3: f64,
    pub drag_coeff: f64,
    pub frontal_area_m2: f64,
    pub rolling_coeff: f64,
    pub gravity_m_s2: f64,
    pub tire_radius_m: f64,
    /// Effective transmission/driveline efficiency, 0 < eta <= 1.
    pub driveline_efficiency: f64,
    /// Engine output shaft inertia including flywheel and impeller.
    pub engine_inertia_kg_m2: f64,
    /// Idling system and accessory load on the engine.
    pub accessory_power_w: f64,
    /// Used only for energy audits.
    pub fuel_lower_heating_value_j_per_g: f64,
    /// Engine speed floor held by the idle governor.
    pub idle_speed_rad_s: f64,
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass_kg", self.mass_kg),
            ("air_density_kg_m3", self.air_density_kg_m3),
            ("drag_coeff", self.drag_coeff),
            ("frontal_area_m2", self.frontal_area_m2),
            ("rolling_coeff", self.rolling_coeff),
            ("gravity_m_s2", self.gravity_m_s2),
            ("tire_radius_m", self.tire_radius_m),
            ("driveline_efficiency", self.driveline_efficiency),
            ("engine_inertia_kg_m2", self.engine_inertia_kg_m2),
            ("accessory_power_w", self.accessory_power_w),
            (
                "fuel_lower_heating_value_j_per_g",
                self.fuel_lower_heating_value_j_per_g,
            ),
            ("idle_speed_rad_s", self.idle_speed_rad_s),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: "must be finite and strictly positive".to_string(),
                });
            }
        }
        if self.driveline_efficiency > 1.0 {
            return Err(Error::InvalidParameter {
                field: "driveline_efficiency",
                reason: "must not exceed 1".to_string(),
            });
        }
        if self.rolling_coeff >= 1.0 {
            return Err(Error::InvalidParameter {
                field: "rolling_coeff",
                reason: "must be below 1".to_string(),
            });
        }
        if self.drag_coeff >= 2.0 {
            return Err(Error::InvalidParameter {
                field: "drag_coeff",
                reason: "must be below 2".to_string(),
            });
        }
        Ok(())
    }

    /// Aerodynamic drag force at speed `v`.
    pub fn drag_force(&self, v: f64) -> f64 {
        0.5 * self.air_density_kg_m3 * self.drag_coeff * self.frontal_area_m2 * v * v
    }

    pub fn rolling_force(&self) -> f64 {
        self.rolling_coeff * self.mass_kg * self.gravity_m_s2
    }
}

#[cfg(test)]
pub(crate) fn test_params() -> VehicleParams {
    VehicleParams {
        mass_kg: 10_000.0,
        air_density_kg_m3: 1.2,
        drag_coeff: 0.7,
        frontal_area_m2: 8.0,
        rolling_coeff: 0.008,
        gravity_m_s2: 9.81,
        tire_radius_m: 0.5,
        driveline_efficiency: 0.95,
        engine_inertia_kg_m2: 2.0,
        accessory_power_w: 5_000.0,
        fuel_lower_heating_value_j_per_g: 42_800.0,
        idle_speed_rad_s: 62.8,
    }
}
