use alloc::format;
use alloc::vec::Vec;

use super::VehicleParams;
use crate::error::{ensure_finite, Error, Result};
use crate::interp::{Sample, Table1d, Table2d};

/// g/kWh to g/J.
pub const G_PER_KWH_TO_G_PER_J: f64 = 1.0 / 3.6e6;

/// Brake-specific fuel consumption over (total torque, speed) plus the
/// wide-open-throttle torque curve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BsfcMap {
    bsfc: Table2d,
    max_torque: Table1d,
}

impl BsfcMap {
    /// `bsfc_g_per_kwh` has one row per torque grid point, one column per
    /// speed grid point.
    pub fn new(
        torque_grid_nm: Vec<f64>,
        speed_grid_rad_s: Vec<f64>,
        bsfc_g_per_kwh: &[Vec<f64>],
        max_torque_speed_grid_rad_s: Vec<f64>,
        max_torque_nm: Vec<f64>,
    ) -> Result<Self> {
        let bsfc = Table2d::new("bsfc", torque_grid_nm, speed_grid_rad_s, bsfc_g_per_kwh)?;
        if let Some(i) = bsfc.values().iter().position(|&b| b <= 0.0) {
            return Err(Error::InvalidMap {
                map: "bsfc",
                reason: format!("value {i} must be positive"),
            });
        }
        if let Some(i) = max_torque_nm.iter().position(|&t| t < 0.0) {
            return Err(Error::InvalidMap {
                map: "max_torque",
                reason: format!("value {i} must be non-negative"),
            });
        }
        let max_torque = Table1d::new("max_torque", max_torque_speed_grid_rad_s, max_torque_nm)?;
        // positive over the operating speed range covered by the bsfc grid
        let (lo, hi) = (bsfc.y_grid()[0], bsfc.y_grid()[bsfc.y_grid().len() - 1]);
        let inside = max_torque
            .grid()
            .iter()
            .zip(max_torque.values())
            .filter(|(w, _)| **w >= lo && **w <= hi);
        if inside.clone().any(|(_, t)| *t <= 0.0) || max_torque.eval(lo) <= 0.0 {
            return Err(Error::InvalidMap {
                map: "max_torque",
                reason: "must be positive across the bsfc speed range".into(),
            });
        }
        Ok(Self { bsfc, max_torque })
    }

    pub fn table(&self) -> &Table2d {
        &self.bsfc
    }

    pub fn max_torque_curve(&self) -> &Table1d {
        &self.max_torque
    }

    /// BSFC in g/kWh, edge-clamped.
    pub fn bsfc(&self, total_torque_nm: f64, engine_speed: f64) -> Sample {
        self.bsfc.sample(total_torque_nm, engine_speed)
    }

    pub fn max_torque(&self, engine_speed: f64) -> f64 {
        self.max_torque.eval(engine_speed)
    }
}

/// Fuel mass flow with a flag for map clamping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuelSample {
    pub grams_per_s: f64,
    pub clamped: bool,
}

/// Fuel rate in g/s:
/// `(torque * speed + accessory) * bsfc(torque + accessory / speed, speed)`.
///
/// Negative torque is a fuel cut and is evaluated at zero torque, so only the
/// accessory load is fueled.
pub fn fuel_rate_sample(
    engine_torque: f64,
    engine_speed: f64,
    p: &VehicleParams,
    bsfc: &BsfcMap,
) -> Result<FuelSample> {
    ensure_finite(engine_torque, "engine torque must be finite")?;
    ensure_finite(engine_speed, "engine speed must be finite")?;
    if engine_speed <= 0.0 {
        return Err(Error::InvalidState("engine speed must be positive"));
    }
    let torque = engine_torque.max(0.0);
    let power = torque * engine_speed + p.accessory_power_w;
    let total_torque = torque + p.accessory_power_w / engine_speed;
    let beta = bsfc.bsfc(total_torque, engine_speed);
    Ok(FuelSample {
        grams_per_s: power * beta.value * G_PER_KWH_TO_G_PER_J,
        clamped: beta.clamped,
    })
}

/// Fuel rate in g/s; see [`fuel_rate_sample`]. Out-of-map queries are
/// clamped to the grid edge and logged.
pub fn fuel_rate(
    engine_torque: f64,
    engine_speed: f64,
    p: &VehicleParams,
    bsfc: &BsfcMap,
) -> Result<f64> {
    let s = fuel_rate_sample(engine_torque, engine_speed, p, bsfc)?;
    if s.clamped {
        log::trace!(
            "bsfc query clamped to grid edge (torque {engine_torque} N·m, speed {engine_speed} rad/s)"
        );
    }
    Ok(s.grams_per_s)
}

/// One explicit-Euler step of the engine shaft,
/// `speed + dt / inertia * (engine_torque - impeller_torque)`, floored at idle.
pub fn engine_shaft_step(
    engine_speed: f64,
    engine_torque: f64,
    impeller_torque: f64,
    p: &VehicleParams,
    dt: f64,
) -> Result<f64> {
    ensure_finite(engine_speed, "engine speed must be finite")?;
    ensure_finite(engine_torque, "engine torque must be finite")?;
    ensure_finite(impeller_torque, "impeller torque must be finite")?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput("time step must be positive"));
    }
    let next = engine_speed + dt / p.engine_inertia_kg_m2 * (engine_torque - impeller_torque);
    Ok(next.max(p.idle_speed_rad_s))
}

#[cfg(test)]
pub(crate) fn constant_bsfc(value: f64) -> BsfcMap {
    use alloc::vec;
    BsfcMap::new(
        vec![0.0, 2000.0],
        vec![50.0, 300.0],
        &[vec![value, value], vec![value, value]],
        vec![50.0, 300.0],
        vec![1000.0, 1000.0],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powertrain::params::test_params;
    use alloc::vec;

    #[test]
    fn fuel_rate_constant_map() {
        let p = test_params();
        let rate = fuel_rate(500.0, 150.0, &p, &constant_bsfc(200.0)).unwrap();
        assert!((rate - 80_000.0 * 200.0 / 3.6e6).abs() < 1e-12);
        assert!((rate - 4.4444).abs() < 1e-4);
    }

    #[test]
    fn zero_power_zero_fuel() {
        let mut p = test_params();
        p.accessory_power_w = 0.0;
        let rate = fuel_rate(0.0, p.idle_speed_rad_s, &p, &constant_bsfc(200.0)).unwrap();
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn linear_in_bsfc() {
        let p = test_params();
        let a = fuel_rate(321.0, 123.0, &p, &constant_bsfc(210.0)).unwrap();
        let b = fuel_rate(321.0, 123.0, &p, &constant_bsfc(420.0)).unwrap();
        assert!((b - 2.0 * a).abs() <= 1e-12 * b);
    }

    #[test]
    fn negative_torque_is_fuel_cut() {
        let p = test_params();
        let map = constant_bsfc(250.0);
        let cut = fuel_rate(-300.0, 100.0, &p, &map).unwrap();
        let idle = fuel_rate(0.0, 100.0, &p, &map).unwrap();
        assert_eq!(cut, idle);
        assert!((idle - p.accessory_power_w * 250.0 / 3.6e6).abs() < 1e-12);
    }

    #[test]
    fn uses_total_torque_for_lookup() {
        // bsfc varies with torque only: 100 g/kWh at 0 N·m, 300 at 200 N·m
        let p = test_params();
        let map = BsfcMap::new(
            vec![0.0, 200.0],
            vec![50.0, 300.0],
            &[vec![100.0, 100.0], vec![300.0, 300.0]],
            vec![50.0, 300.0],
            vec![1000.0, 1000.0],
        )
        .unwrap();
        // total torque = 50 + 5000/100 = 100 N·m -> 200 g/kWh
        let rate = fuel_rate(50.0, 100.0, &p, &map).unwrap();
        assert!((rate - 10_000.0 * 200.0 / 3.6e6).abs() < 1e-12);
    }

    #[test]
    fn clamps_out_of_map_queries() {
        let p = test_params();
        let map = constant_bsfc(200.0);
        let s = fuel_rate_sample(5000.0, 400.0, &p, &map).unwrap();
        assert!(s.clamped);
        assert!(s.grams_per_s.is_finite());
    }

    #[test]
    fn fuel_rate_rejects_zero_speed() {
        let p = test_params();
        assert!(fuel_rate(10.0, 0.0, &p, &constant_bsfc(200.0)).is_err());
        assert!(fuel_rate(f64::NAN, 100.0, &p, &constant_bsfc(200.0)).is_err());
    }

    #[test]
    fn shaft_step_euler() {
        let p = test_params();
        let w = engine_shaft_step(100.0, 400.0, 300.0, &p, 0.1).unwrap();
        assert!((w - 105.0).abs() < 1e-12);
    }

    #[test]
    fn shaft_step_balanced() {
        let p = test_params();
        assert_eq!(engine_shaft_step(150.0, 250.0, 250.0, &p, 0.1).unwrap(), 150.0);
    }

    #[test]
    fn shaft_step_idle_floor() {
        let p = test_params();
        // 100 + 0.1/2 * (0 - 1000) = 50 -> floored
        let w = engine_shaft_step(100.0, 0.0, 1000.0, &p, 0.1).unwrap();
        assert_eq!(w, 62.8);
    }

    #[test]
    fn shaft_step_rejects_bad_dt() {
        let p = test_params();
        assert!(engine_shaft_step(100.0, 0.0, 0.0, &p, 0.0).is_err());
        assert!(engine_shaft_step(f64::INFINITY, 0.0, 0.0, &p, 0.1).is_err());
    }

    #[test]
    fn map_validation() {
        let bad = BsfcMap::new(
            vec![0.0, 100.0],
            vec![50.0, 300.0],
            &[vec![200.0, 0.0], vec![200.0, 200.0]],
            vec![50.0, 300.0],
            vec![1000.0, 1000.0],
        );
        assert!(bad.is_err());
        let no_torque = BsfcMap::new(
            vec![0.0, 100.0],
            vec![50.0, 300.0],
            &[vec![200.0, 200.0], vec![200.0, 200.0]],
            vec![50.0, 300.0],
            vec![1000.0, 0.0],
        );
        assert!(no_torque.is_err());
    }
}
