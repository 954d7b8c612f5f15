//! Fixed-step closed-loop simulation of driver and truck against a cycle.
//!
//! Every step runs, in this order: target lookup, driver, gear selection,
//! torque converter, driveline, then explicit-Euler updates of vehicle speed,
//! engine speed and position, with fuel accumulated by the left-rectangle
//! rule. The order is fixed, so identical inputs give bit-identical logs.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::cycle::DriveCycle;
use crate::driver::{driver_step, DriverGains, DriverState};
use crate::error::{Error, Result};
use crate::powertrain::{
    chassis_acceleration, driveline_transform, engine_shaft_step, fuel_rate_sample, select_gear,
    torque_converter_coupling, turbine_speed, Gear, PowertrainMaps, PowertrainState,
    VehicleParams,
};

/// Speed magnitude treated as numerical blow-up.
pub const DIVERGENCE_SPEED_M_S: f64 = 150.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum TargetHold {
    /// Hold each cycle sample until the next one.
    #[default]
    ZeroOrder,
    /// Interpolate linearly between cycle samples.
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub step_dt_s: f64,
    pub log_every_n_steps: usize,
    pub initial_gear: Gear,
    pub initial_engine_speed_rad_s: f64,
    pub initial_speed_m_s: f64,
    pub target_hold: TargetHold,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            step_dt_s: 0.1,
            log_every_n_steps: 1,
            initial_gear: Gear::FIRST,
            initial_engine_speed_rad_s: 62.8,
            initial_speed_m_s: 0.0,
            target_hold: TargetHold::ZeroOrder,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_dt_s.is_finite() && self.step_dt_s > 0.0) {
            return Err(Error::InvalidParameter {
                field: "step_dt_s",
                reason: "must be finite and positive".to_string(),
            });
        }
        if self.log_every_n_steps == 0 {
            return Err(Error::InvalidParameter {
                field: "log_every_n_steps",
                reason: "must be at least 1".to_string(),
            });
        }
        if !(self.initial_engine_speed_rad_s.is_finite() && self.initial_engine_speed_rad_s > 0.0) {
            return Err(Error::InvalidParameter {
                field: "initial_engine_speed_rad_s",
                reason: "must be finite and positive".to_string(),
            });
        }
        if !(self.initial_speed_m_s.is_finite() && self.initial_speed_m_s >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "initial_speed_m_s",
                reason: "must be finite and non-negative".to_string(),
            });
        }
        Ok(())
    }

    /// Number of integration steps spanning `cycle`, or an error when the
    /// step does not divide the cycle's sampling interval.
    pub fn steps_for(&self, cycle: &DriveCycle) -> Result<usize> {
        let per_sample = cycle.dt_s() / self.step_dt_s;
        let whole = libm::round(per_sample);
        if whole < 1.0 || (per_sample - whole).abs() > 1e-9 * per_sample.max(1.0) {
            return Err(Error::InvalidParameter {
                field: "step_dt_s",
                reason: alloc::format!(
                    "{} s does not divide the cycle interval {} s",
                    self.step_dt_s,
                    cycle.dt_s()
                ),
            });
        }
        Ok((cycle.len() - 1) * whole as usize)
    }
}

/// One logged step. Inputs (target, torque, brake, fuel rate) are the values
/// applied during the step; states are at its end.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogRow {
    pub time_s: f64,
    pub target_speed_m_s: f64,
    pub speed_m_s: f64,
    pub position_m: f64,
    pub gear: u8,
    pub engine_speed_rad_s: f64,
    pub engine_torque_nm: f64,
    pub brake_force_n: f64,
    pub fuel_rate_g_s: f64,
    pub cumulative_fuel_g: f64,
}

impl LogRow {
    pub const COLUMNS: [&'static str; 10] = [
        "time_s",
        "target_speed_m_s",
        "speed_m_s",
        "position_m",
        "gear",
        "engine_speed_rad_s",
        "engine_torque_nm",
        "brake_force_n",
        "fuel_rate_g_s",
        "cumulative_fuel_g",
    ];
}

/// Whole-run integrals kept at full step resolution regardless of the log
/// cadence.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunTotals {
    pub steps: usize,
    pub duration_s: f64,
    pub fuel_g: f64,
    pub distance_m: f64,
    /// Integral of max(f_prop, 0) * v over the run.
    pub tractive_work_j: f64,
    /// Integral of f_brake * v over the run.
    pub brake_work_j: f64,
    /// Steps whose bsfc lookup was clamped to the map edge.
    pub clamped_bsfc_lookups: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectoryLog {
    pub rows: Vec<LogRow>,
    pub totals: RunTotals,
}

impl TrajectoryLog {
    pub fn final_position_m(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.position_m)
    }

    pub fn cumulative_fuel_g(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cumulative_fuel_g)
    }

    pub fn trip_time_s(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.time_s)
    }

    /// Root-mean-square of `target - speed` over rows later than `skip_s`.
    pub fn rms_tracking_error(&self, skip_s: f64) -> f64 {
        let (sum, n) = self
            .rows
            .iter()
            .filter(|r| r.time_s > skip_s)
            .fold((0.0, 0usize), |(s, n), r| {
                let e = r.target_speed_m_s - r.speed_m_s;
                (s + e * e, n + 1)
            });
        if n == 0 {
            0.0
        } else {
            libm::sqrt(sum / n as f64)
        }
    }

    /// Fuel chemical energy over positive tractive work.
    pub fn energy_ratio(&self, lower_heating_value_j_per_g: f64) -> f64 {
        self.totals.fuel_g * lower_heating_value_j_per_g / self.totals.tractive_work_j
    }
}

/// Grams of fuel per 100 km travelled.
pub fn fuel_per_100km(log: &TrajectoryLog) -> Result<f64> {
    let distance = log.final_position_m();
    if !(distance > 0.0) {
        return Err(Error::UndefinedMetric("fuel per distance needs a positive distance"));
    }
    Ok(log.cumulative_fuel_g() / distance * 1e5)
}

/// Everything needed to simulate one truck.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Model {
    pub params: VehicleParams,
    pub maps: PowertrainMaps,
    pub gains: DriverGains,
    pub sim: SimConfig,
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.gains.validate()?;
        self.sim.validate()?;
        if !self.maps.shift.contains(self.sim.initial_gear) {
            return Err(Error::InvalidGear {
                gear: self.sim.initial_gear.0,
                count: self.maps.shift.gear_count(),
            });
        }
        Ok(())
    }

    pub fn simulate(&self, cycle: &DriveCycle) -> Result<TrajectoryLog> {
        simulate(cycle, &self.params, &self.maps, &self.gains, &self.sim)
    }
}

fn diverged(step: usize, time_s: f64, reason: &'static str) -> Error {
    Error::Divergence {
        step,
        time_s,
        reason,
    }
}

/// Closed-loop run of `cycle`; see the module docs for the step order.
///
/// The engine idle governor adds whatever torque is needed to keep the shaft
/// from dropping below idle, and that torque is fueled like any other.
pub fn simulate(
    cycle: &DriveCycle,
    params: &VehicleParams,
    maps: &PowertrainMaps,
    gains: &DriverGains,
    cfg: &SimConfig,
) -> Result<TrajectoryLog> {
    params.validate()?;
    gains.validate()?;
    cfg.validate()?;
    let steps = cfg.steps_for(cycle)?;
    let dt = cfg.step_dt_s;

    let mut state = PowertrainState {
        engine_speed_rad_s: cfg.initial_engine_speed_rad_s.max(params.idle_speed_rad_s),
        gear: cfg.initial_gear,
        vehicle_speed_m_s: cfg.initial_speed_m_s,
        position_m: 0.0,
    };
    maps.shift.ratio(state.gear)?;
    let mut driver = DriverState::default();
    let mut totals = RunTotals {
        steps,
        duration_s: steps as f64 * dt,
        ..RunTotals::default()
    };
    let mut rows = Vec::with_capacity(steps / cfg.log_every_n_steps + 1);

    for i in 0..steps {
        let t = i as f64 * dt;
        let v = state.vehicle_speed_m_s;
        let w_e = state.engine_speed_rad_s;

        let v_ref = match cfg.target_hold {
            TargetHold::ZeroOrder => cycle.held_speed_at(t),
            TargetHold::Linear => cycle.interpolated_speed_at(t),
        };
        let (cmd, next_driver) =
            driver_step(v_ref, v, driver, gains, maps.bsfc.max_torque(w_e), dt);
        driver = next_driver;

        let gear = select_gear(cmd.pedal, v, state.gear, &maps.shift);
        let w_t = turbine_speed(v, gear, &maps.shift, params)?;
        let conv = torque_converter_coupling(w_e, w_t, &maps.converter)?;
        let (f_prop, _) = driveline_transform(conv.turbine_nm, v, gear, &maps.shift, params)?;

        let governor = conv.impeller_nm
            - params.engine_inertia_kg_m2 * (w_e - params.idle_speed_rad_s) / dt;
        let torque = cmd.engine_torque_nm.max(governor).max(0.0);

        let accel = chassis_acceleration(v, f_prop, cmd.brake_force_n, params)?;
        let w_next = engine_shaft_step(w_e, torque, conv.impeller_nm, params, dt)?;
        let fuel = fuel_rate_sample(torque, w_e, params, &maps.bsfc)?;

        let v_next = (v + accel * dt).max(0.0);
        let x_next = state.position_m + v * dt;
        let step = i + 1;
        let t_next = step as f64 * dt;
        if !(v_next.is_finite() && w_next.is_finite() && x_next.is_finite()) {
            return Err(diverged(step, t_next, "non-finite state"));
        }
        if v_next.abs() > DIVERGENCE_SPEED_M_S {
            return Err(diverged(step, t_next, "vehicle speed out of range"));
        }

        totals.fuel_g += fuel.grams_per_s * dt;
        totals.tractive_work_j += f_prop.max(0.0) * v * dt;
        totals.brake_work_j += cmd.brake_force_n * v * dt;
        totals.clamped_bsfc_lookups += usize::from(fuel.clamped);

        state = PowertrainState {
            engine_speed_rad_s: w_next,
            gear,
            vehicle_speed_m_s: v_next,
            position_m: x_next,
        };

        if step % cfg.log_every_n_steps == 0 || step == steps {
            rows.push(LogRow {
                time_s: t_next,
                target_speed_m_s: v_ref,
                speed_m_s: v_next,
                position_m: x_next,
                gear: gear.0,
                engine_speed_rad_s: w_next,
                engine_torque_nm: torque,
                brake_force_n: cmd.brake_force_n,
                fuel_rate_g_s: fuel.grams_per_s,
                cumulative_fuel_g: totals.fuel_g,
            });
        }
    }
    totals.distance_m = state.position_m;
    if totals.clamped_bsfc_lookups > 0 {
        log::warn!(
            "{}: {} of {} bsfc lookups fell outside the map and were clamped",
            cycle.name(),
            totals.clamped_bsfc_lookups,
            steps
        );
    }
    Ok(TrajectoryLog { rows, totals })
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use crate::powertrain::{test_converter, BsfcMap, ShiftMap};
    use alloc::vec;

    /// Small self-contained truck for unit tests.
    pub fn test_model() -> Model {
        let shift = ShiftMap::new(
            vec![18.0, 10.0, 6.5, 4.5, 3.3],
            vec![0.0, 1.0],
            vec![vec![3.0, 5.0], vec![6.5, 9.0], vec![10.0, 14.0], vec![14.0, 19.0]],
            vec![vec![1.5, 2.5], vec![4.0, 5.5], vec![7.0, 9.5], vec![10.5, 13.0]],
        )
        .unwrap();
        let bsfc = BsfcMap::new(
            vec![0.0, 200.0, 600.0, 1200.0],
            vec![60.0, 150.0, 300.0],
            &[
                vec![600.0, 700.0, 800.0],
                vec![260.0, 250.0, 280.0],
                vec![215.0, 205.0, 230.0],
                vec![225.0, 215.0, 240.0],
            ],
            vec![60.0, 150.0, 250.0, 300.0],
            vec![600.0, 1100.0, 1000.0, 500.0],
        )
        .unwrap();
        Model {
            params: crate::powertrain::test_params(),
            maps: PowertrainMaps {
                converter: test_converter(),
                shift,
                bsfc,
            },
            gains: DriverGains {
                kp: 900.0,
                ki: 60.0,
                brake_scale: 12.0,
                torque_command_max_nm: 1100.0,
                brake_force_max_n: 60_000.0,
                integrator_limit: 15.0,
            },
            sim: SimConfig::default(),
        }
    }
}
