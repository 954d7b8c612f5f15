use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::interp::Table1d;

/// Static torque-converter curves over speed ratio `turbine / engine`.
///
/// Capacity factor convention: `K(s) = engine_speed / sqrt(impeller_torque)`
/// in rad/s per sqrt(N·m), so the impeller absorbs `(engine_speed / K(s))^2`.
/// There is no lockup clutch; the converter is always fluid-coupled.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TorqueConverterMap {
    torque_ratio: Table1d,
    capacity_factor: Table1d,
}

/// Converter torques at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverterTorques {
    pub impeller_nm: f64,
    pub turbine_nm: f64,
    /// Speed ratio after clamping to the map domain.
    pub speed_ratio: f64,
}

impl TorqueConverterMap {
    pub fn new(
        speed_ratio_grid: Vec<f64>,
        torque_ratio_values: Vec<f64>,
        capacity_factor_values: Vec<f64>,
    ) -> Result<Self> {
        const MAP: &str = "torque_converter";
        if speed_ratio_grid.first().is_some_and(|&s| s != 0.0) {
            return Err(Error::InvalidMap {
                map: MAP,
                reason: "speed ratio grid must start at 0 (stall)".into(),
            });
        }
        for (name, values) in [
            ("torque ratio", &torque_ratio_values),
            ("capacity factor", &capacity_factor_values),
        ] {
            if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::InvalidMap {
                    map: MAP,
                    reason: format!("{name} value {i} must be finite and positive"),
                });
            }
        }
        if torque_ratio_values.first().is_some_and(|&tr| tr < 1.0) {
            return Err(Error::InvalidMap {
                map: MAP,
                reason: "torque ratio at stall must be at least 1".into(),
            });
        }
        let torque_ratio = Table1d::new(MAP, speed_ratio_grid.clone(), torque_ratio_values)?;
        let capacity_factor = Table1d::new(MAP, speed_ratio_grid, capacity_factor_values)?;
        Ok(Self {
            torque_ratio,
            capacity_factor,
        })
    }

    pub fn speed_ratio_grid(&self) -> &[f64] {
        self.torque_ratio.grid()
    }

    pub fn torque_ratio_values(&self) -> &[f64] {
        self.torque_ratio.values()
    }

    pub fn capacity_factor_values(&self) -> &[f64] {
        self.capacity_factor.values()
    }

    pub fn torque_ratio(&self, speed_ratio: f64) -> f64 {
        self.torque_ratio.eval(speed_ratio)
    }

    pub fn capacity_factor(&self, speed_ratio: f64) -> f64 {
        self.capacity_factor.eval(speed_ratio)
    }
}

/// Impeller and turbine torque from engine and turbine speed.
///
/// The speed ratio is clamped to the map domain, so an overrunning turbine
/// reads the last grid point (no reverse torque, no engine braking).
pub fn torque_converter_coupling(
    engine_speed: f64,
    turbine_speed: f64,
    map: &TorqueConverterMap,
) -> Result<ConverterTorques> {
    if !engine_speed.is_finite() || !turbine_speed.is_finite() {
        return Err(Error::InvalidInput("converter speeds must be finite"));
    }
    if engine_speed <= 0.0 {
        return Err(Error::InvalidState("engine speed must be positive"));
    }
    if turbine_speed < 0.0 {
        return Err(Error::InvalidInput("turbine speed must be non-negative"));
    }
    let (lo, hi) = map.torque_ratio.domain();
    let speed_ratio = (turbine_speed / engine_speed).clamp(lo, hi);
    let k = map.capacity_factor(speed_ratio);
    let root = engine_speed / k;
    let impeller_nm = root * root;
    let turbine_nm = map.torque_ratio(speed_ratio) * impeller_nm;
    Ok(ConverterTorques {
        impeller_nm,
        turbine_nm,
        speed_ratio,
    })
}

#[cfg(test)]
pub(crate) fn test_converter() -> TorqueConverterMap {
    use alloc::vec;
    TorqueConverterMap::new(
        vec![0.0, 0.5, 0.9, 1.0],
        vec![2.0, 1.5, 1.0, 1.0],
        vec![10.0, 11.0, 16.0, 40.0],
    )
    .unwrap()
}
