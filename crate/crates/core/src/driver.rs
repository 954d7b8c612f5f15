//! PI speed-tracking driver.
//!
//! The controller output `u = kp * e + ki * integral(e)` is split: a positive
//! `u` is an engine torque request, a negative `u` is scaled into a wheel
//! brake force. Torque and brake are never both non-zero.

use alloc::string::ToString;

use crate::cycle::STOP_SPEED_M_S;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DriverGains {
    /// N·m of torque request per m/s of speed error.
    pub kp: f64,
    /// N·m per (m/s · s) of integrated error.
    pub ki: f64,
    /// N of brake force per N·m of negative controller output.
    pub brake_scale: f64,
    pub torque_command_max_nm: f64,
    pub brake_force_max_n: f64,
    /// Bound on the integrated speed error, m/s · s.
    pub integrator_limit: f64,
}

impl DriverGains {
    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("kp", self.kp),
            ("ki", self.ki),
            ("brake_scale", self.brake_scale),
            ("integrator_limit", self.integrator_limit),
        ];
        for (field, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: "must be finite and non-negative".to_string(),
                });
            }
        }
        for (field, value) in [
            ("torque_command_max_nm", self.torque_command_max_nm),
            ("brake_force_max_n", self.brake_force_max_n),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: "must be finite and strictly positive".to_string(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DriverState {
    /// Accumulated speed error, m/s · s.
    pub integrator: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverCommand {
    pub engine_torque_nm: f64,
    pub brake_force_n: f64,
    /// Torque request normalized by `torque_command_max_nm`; feeds the shift map.
    pub pedal: f64,
}

struct Output {
    torque: f64,
    brake: f64,
    /// Output is pinned at a limit in the direction the error pushes it.
    saturated: bool,
}

fn split(u: f64, e: f64, gains: &DriverGains, torque_limit: f64) -> Output {
    if u >= 0.0 {
        let cap = gains.torque_command_max_nm.min(torque_limit).max(0.0);
        Output {
            torque: u.min(cap),
            brake: 0.0,
            saturated: u > cap && e > 0.0,
        }
    } else {
        let wanted = -u * gains.brake_scale;
        Output {
            torque: 0.0,
            brake: wanted.min(gains.brake_force_max_n),
            saturated: wanted > gains.brake_force_max_n && e < 0.0,
        }
    }
}

/// One driver update.
///
/// `torque_limit_nm` is the engine's maximum torque at its current speed.
/// The integrator uses conditional integration: it is frozen whenever the
/// output would be saturated in the direction of the error, and it is kept
/// within `integrator_limit`. A driver whose target is a stop and whose
/// vehicle is stationary holds full brake with a cleared integrator.
pub fn driver_step(
    v_ref: f64,
    v: f64,
    state: DriverState,
    gains: &DriverGains,
    torque_limit_nm: f64,
    dt: f64,
) -> (DriverCommand, DriverState) {
    if v_ref < STOP_SPEED_M_S && v <= 0.0 {
        let hold = DriverCommand {
            engine_torque_nm: 0.0,
            brake_force_n: gains.brake_force_max_n,
            pedal: 0.0,
        };
        return (hold, DriverState { integrator: 0.0 });
    }
    let e = v_ref - v;
    let limit = gains.integrator_limit;
    let candidate = (state.integrator + e * dt).clamp(-limit, limit);
    let mut integrator = candidate;
    let mut out = split(gains.kp * e + gains.ki * candidate, e, gains, torque_limit_nm);
    if out.saturated {
        integrator = state.integrator.clamp(-limit, limit);
        out = split(gains.kp * e + gains.ki * integrator, e, gains, torque_limit_nm);
    }
    let cmd = DriverCommand {
        engine_torque_nm: out.torque,
        brake_force_n: out.brake,
        pedal: (out.torque / gains.torque_command_max_nm).clamp(0.0, 1.0),
    };
    (cmd, DriverState { integrator })
}

#[cfg(test)]
pub(crate) fn test_gains() -> DriverGains {
    DriverGains {
        kp: 1000.0,
        ki: 0.0,
        brake_scale: 10.0,
        torque_command_max_nm: 1500.0,
        brake_force_max_n: 50_000.0,
        integrator_limit: 20.0,
    }
}
