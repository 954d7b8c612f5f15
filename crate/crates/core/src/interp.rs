//! Piecewise-linear lookup tables with edge clamping.
//!
//! Queries outside the grid are clamped to the nearest edge and the returned
//! [`Sample`] records that the clamp happened, so callers can count or log it.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Interpolated value plus whether any coordinate had to be clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub clamped: bool,
}

/// Position of `x` on a strictly increasing grid: the lower cell index and
/// the fractional offset inside that cell.
#[derive(Debug, Clone, Copy)]
struct Cell {
    index: usize,
    frac: f64,
    clamped: bool,
}

fn locate(grid: &[f64], x: f64) -> Cell {
    let last = grid.len() - 1;
    if x <= grid[0] {
        return Cell {
            index: 0,
            frac: 0.0,
            clamped: x < grid[0],
        };
    }
    if x >= grid[last] {
        return Cell {
            index: last - 1,
            frac: 1.0,
            clamped: x > grid[last],
        };
    }
    // first grid point strictly greater than x; x is interior so 1..=last
    let upper = grid.partition_point(|&g| g <= x);
    let index = upper - 1;
    let frac = (x - grid[index]) / (grid[upper] - grid[index]);
    Cell {
        index,
        frac,
        clamped: false,
    }
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    // exact at both ends
    if t == 0.0 {
        a
    } else if t == 1.0 {
        b
    } else {
        a + (b - a) * t
    }
}

fn check_grid(map: &'static str, grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidMap {
            map,
            reason: format!("grid needs at least 2 points, got {}", grid.len()),
        });
    }
    if let Some(bad) = grid.iter().position(|g| !g.is_finite()) {
        return Err(Error::InvalidMap {
            map,
            reason: format!("grid value {bad} is not finite"),
        });
    }
    if let Some(w) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidMap {
            map,
            reason: format!("grid is not strictly increasing at index {}", w + 1),
        });
    }
    Ok(())
}

/// One-dimensional table `y(x)`, linear between grid points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Table1d {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Table1d {
    pub fn new(map: &'static str, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_grid(map, &xs)?;
        if ys.len() != xs.len() {
            return Err(Error::InvalidMap {
                map,
                reason: format!("{} values for {} grid points", ys.len(), xs.len()),
            });
        }
        if let Some(bad) = ys.iter().position(|y| !y.is_finite()) {
            return Err(Error::InvalidMap {
                map,
                reason: format!("value {bad} is not finite"),
            });
        }
        Ok(Self { xs, ys })
    }

    pub fn grid(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn sample(&self, x: f64) -> Sample {
        let c = locate(&self.xs, x);
        Sample {
            value: lerp(self.ys[c.index], self.ys[c.index + 1], c.frac),
            clamped: c.clamped,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sample(x).value
    }
}

/// Two-dimensional table `z(x, y)` on a rectangular grid, bilinear inside
/// each cell. Values are stored row-major: one row per `x` grid point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Table2d {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<f64>,
}

impl Table2d {
    pub fn new(map: &'static str, xs: Vec<f64>, ys: Vec<f64>, rows: &[Vec<f64>]) -> Result<Self> {
        check_grid(map, &xs)?;
        check_grid(map, &ys)?;
        if rows.len() != xs.len() {
            return Err(Error::InvalidMap {
                map,
                reason: format!("{} rows for {} x grid points", rows.len(), xs.len()),
            });
        }
        let mut values = Vec::with_capacity(xs.len() * ys.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ys.len() {
                return Err(Error::InvalidMap {
                    map,
                    reason: format!("row {i} has {} values, expected {}", row.len(), ys.len()),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidMap {
                    map,
                    reason: format!("value ({i}, {j}) is not finite"),
                });
            }
            values.extend_from_slice(row);
        }
        Ok(Self { xs, ys, values })
    }

    pub fn x_grid(&self) -> &[f64] {
        &self.xs
    }

    pub fn y_grid(&self) -> &[f64] {
        &self.ys
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ys.len() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample(&self, x: f64, y: f64) -> Sample {
        let cx = locate(&self.xs, x);
        let cy = locate(&self.ys, y);
        let lo = lerp(self.at(cx.index, cy.index), self.at(cx.index, cy.index + 1), cy.frac);
        let hi = lerp(
            self.at(cx.index + 1, cy.index),
            self.at(cx.index + 1, cy.index + 1),
            cy.frac,
        );
        Sample {
            value: lerp(lo, hi, cx.frac),
            clamped: cx.clamped || cy.clamped,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.sample(x, y).value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ramp() -> Table1d {
        Table1d::new("ramp", vec![0.0, 1.0, 3.0], vec![10.0, 20.0, 0.0]).unwrap()
    }

    #[test]
    fn grid_points_are_exact() {
        let t = ramp();
        assert_eq!(t.eval(0.0), 10.0);
        assert_eq!(t.eval(1.0), 20.0);
        assert_eq!(t.eval(3.0), 0.0);
    }

    #[test]
    fn linear_between_points() {
        let t = ramp();
        assert_eq!(t.eval(0.5), 15.0);
        assert_eq!(t.eval(2.0), 10.0);
    }

    #[test]
    fn clamps_outside_and_reports_it() {
        let t = ramp();
        let below = t.sample(-1.0);
        assert_eq!(below.value, 10.0);
        assert!(below.clamped);
        let above = t.sample(7.0);
        assert_eq!(above.value, 0.0);
        assert!(above.clamped);
        assert!(!t.sample(3.0).clamped);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Table1d::new("t", vec![0.0], vec![1.0]).is_err());
        assert!(Table1d::new("t", vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(Table1d::new("t", vec![1.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(Table1d::new("t", vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Table1d::new("t", vec![0.0, f64::NAN], vec![1.0, 2.0]).is_err());
        assert!(Table1d::new("t", vec![0.0, 1.0], vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn bilinear_matches_hand_value() {
        // z = x + 10 y is reproduced exactly by bilinear interpolation
        let t = Table2d::new(
            "plane",
            vec![0.0, 2.0],
            vec![0.0, 1.0, 4.0],
            &[vec![0.0, 10.0, 40.0], vec![2.0, 12.0, 42.0]],
        )
        .unwrap();
        let s = t.sample(0.5, 2.5);
        assert!((s.value - 25.5).abs() < 1e-12);
        assert!(!s.clamped);
        let c = t.sample(3.0, -1.0);
        assert_eq!(c.value, 2.0);
        assert!(c.clamped);
    }

    #[test]
    fn bilinear_rejects_ragged_rows() {
        let r = Table2d::new("t", vec![0.0, 1.0], vec![0.0, 1.0], &[vec![1.0, 2.0], vec![1.0]]);
        assert!(r.is_err());
    }
}
