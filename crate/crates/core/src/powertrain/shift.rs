use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::interp::Table1d;

/// Transmission gear, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Gear(pub u8);

impl Gear {
    pub const FIRST: Gear = Gear(1);

    pub fn number(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Gear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
struct GearEntry {
    ratio: f64,
    /// Vehicle speed above which this gear shifts up, over pedal. None in top gear.
    upshift: Option<Table1d>,
    /// Vehicle speed below which this gear shifts down, over pedal. None in first gear.
    downshift: Option<Table1d>,
}

/// Gear ratios and pedal-dependent shift speeds.
///
/// Ratios are overall (gearbox times final drive). Shift thresholds are
/// vehicle speeds tabulated over a shared pedal grid on [0, 1].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShiftMap {
    gears: Vec<GearEntry>,
}

impl ShiftMap {
    /// `upshift_m_s[g]` holds the g+1 -> g+2 threshold over the pedal grid and
    /// `downshift_m_s[g]` the g+2 -> g+1 threshold, so both have one row fewer
    /// than there are gears.
    pub fn new(
        ratios: Vec<f64>,
        pedal_grid: Vec<f64>,
        upshift_m_s: Vec<Vec<f64>>,
        downshift_m_s: Vec<Vec<f64>>,
    ) -> Result<Self> {
        const MAP: &str = "shift_map";
        let n = ratios.len();
        if n == 0 || n > u8::MAX as usize {
            return Err(Error::InvalidMap {
                map: MAP,
                reason: format!("need between 1 and 255 gears, got {n}"),
            });
        }
        if let Some(g) = ratios.iter().position(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidMap {
                map: MAP,
                reason: format!("ratio of gear {} must be finite and positive", g + 1),
            });
        }
        if let Some(g) = ratios.windows(2).position(|w| w[1] >= w[0]) {
            return Err(Error::InvalidMap {
                map: MAP,
                reason: format!("ratios must strictly decrease (gear {})", g + 2),
            });
        }
        if upshift_m_s.len() != n - 1 || downshift_m_s.len() != n - 1 {
            return Err(Error::InvalidMap {
                map: MAP,
                reason: format!(
                    "{n} gears need {} upshift and downshift rows, got {} and {}",
                    n - 1,
                    upshift_m_s.len(),
                    downshift_m_s.len()
                ),
            });
        }
        if pedal_grid.first().is_some_and(|&p| p < 0.0) || pedal_grid.last().is_some_and(|&p| p > 1.0)
        {
            return Err(Error::InvalidMap {
                map: MAP,
                reason: "pedal grid must lie within [0, 1]".into(),
            });
        }
        let mut ups = Vec::with_capacity(n - 1);
        let mut downs = Vec::with_capacity(n - 1);
        for (up, down) in upshift_m_s.into_iter().zip(downshift_m_s) {
            ups.push(Table1d::new(MAP, pedal_grid.clone(), up)?);
            downs.push(Table1d::new(MAP, pedal_grid.clone(), down)?);
        }
        for g in 0..n.saturating_sub(1) {
            for (k, pedal) in pedal_grid.iter().enumerate() {
                let up = ups[g].values()[k];
                let down_next = downs[g].values()[k];
                if !(down_next > 0.0 && up > 0.0) {
                    return Err(Error::InvalidMap {
                        map: MAP,
                        reason: format!("shift speeds must be positive (gear {}, pedal {pedal})", g + 1),
                    });
                }
                if down_next >= up {
                    return Err(Error::InvalidMap {
                        map: MAP,
                        reason: format!(
                            "empty hysteresis band between gears {} and {} at pedal {pedal}",
                            g + 1,
                            g + 2
                        ),
                    });
                }
                // gear g+2 must not be able to downshift above its own upshift
                if g + 1 < n - 1 && down_next >= ups[g + 1].values()[k] {
                    return Err(Error::InvalidMap {
                        map: MAP,
                        reason: format!(
                            "gear {} downshift is not below its upshift at pedal {pedal}",
                            g + 2
                        ),
                    });
                }
            }
        }
        let mut ups = ups.into_iter();
        let mut downs = downs.into_iter();
        let gears = ratios
            .into_iter()
            .enumerate()
            .map(|(i, ratio)| GearEntry {
                ratio,
                upshift: if i + 1 < n { ups.next() } else { None },
                downshift: if i > 0 { downs.next() } else { None },
            })
            .collect();
        Ok(Self { gears })
    }

    pub fn gear_count(&self) -> u8 {
        self.gears.len() as u8
    }

    pub fn top_gear(&self) -> Gear {
        Gear(self.gear_count())
    }

    pub fn contains(&self, gear: Gear) -> bool {
        gear.0 >= 1 && gear.0 <= self.gear_count()
    }

    fn entry(&self, gear: Gear) -> Result<&GearEntry> {
        if self.contains(gear) {
            Ok(&self.gears[gear.0 as usize - 1])
        } else {
            Err(Error::InvalidGear {
                gear: gear.0,
                count: self.gear_count(),
            })
        }
    }

    pub fn ratio(&self, gear: Gear) -> Result<f64> {
        self.entry(gear).map(|e| e.ratio)
    }

    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.gears.iter().map(|e| e.ratio)
    }

    /// Speed above which `gear` shifts up at this pedal; None in top gear.
    pub fn upshift_speed(&self, gear: Gear, pedal: f64) -> Result<Option<f64>> {
        Ok(self.entry(gear)?.upshift.as_ref().map(|t| t.eval(pedal)))
    }

    /// Speed below which `gear` shifts down at this pedal; None in first gear.
    pub fn downshift_speed(&self, gear: Gear, pedal: f64) -> Result<Option<f64>> {
        Ok(self.entry(gear)?.downshift.as_ref().map(|t| t.eval(pedal)))
    }
}

/// Shift decision from pedal and vehicle speed.
///
/// Shifts up when `v` exceeds the current gear's upshift speed, down when it
/// falls below the downshift speed, and holds inside the band. Changes at
/// most one gear per call while moving; a stopped vehicle (`v <= 0`) is
/// returned to first gear. An out-of-range `current` is clamped into the map.
pub fn select_gear(pedal: f64, v: f64, current: Gear, map: &ShiftMap) -> Gear {
    if !(v > 0.0) {
        return Gear::FIRST;
    }
    let pedal = if pedal.is_nan() { 0.0 } else { pedal.clamp(0.0, 1.0) };
    let gear = Gear(current.0.clamp(1, map.gear_count()));
    let entry = &map.gears[gear.0 as usize - 1];
    if let Some(up) = &entry.upshift {
        if v > up.eval(pedal) {
            return Gear(gear.0 + 1);
        }
    }
    if let Some(down) = &entry.downshift {
        if v < down.eval(pedal) {
            return Gear(gear.0 - 1);
        }
    }
    gear
}

#[cfg(test)]
pub(crate) fn two_gear_map() -> ShiftMap {
    use alloc::vec;
    ShiftMap::new(
        vec![10.0, 6.0],
        vec![0.0, 1.0],
        vec![vec![4.0, 6.0]],
        vec![vec![2.0, 3.0]],
    )
    .unwrap()
}

#[cfg(test)]
pub(crate) fn four_gear_map() -> ShiftMap {
    use alloc::vec;
    ShiftMap::new(
        vec![16.0, 9.0, 6.0, 4.0],
        vec![0.0, 0.5, 1.0],
        vec![vec![3.0, 4.0, 6.0], vec![7.0, 9.0, 12.0], vec![11.0, 14.0, 18.0]],
        vec![vec![1.5, 2.0, 3.0], vec![4.0, 5.0, 7.0], vec![8.0, 10.0, 13.0]],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn upshift_on_threshold_crossing() {
        // gear 1 upshift at pedal 0.5 interpolates to 5 m/s
        let map = two_gear_map();
        assert_eq!(map.upshift_speed(Gear(1), 0.5).unwrap(), Some(5.0));
        assert_eq!(select_gear(0.5, 6.0, Gear(1), &map), Gear(2));
        assert_eq!(select_gear(0.5, 5.0, Gear(1), &map), Gear(1));
    }

    #[test]
    fn holds_inside_band() {
        let map = two_gear_map();
        // band for 1<->2 at pedal 0.5 is (2.5, 5.0)
        for v in [2.6, 3.0, 4.0, 4.9] {
            assert_eq!(select_gear(0.5, v, Gear(1), &map), Gear(1));
            assert_eq!(select_gear(0.5, v, Gear(2), &map), Gear(2));
        }
    }

    #[test]
    fn downshift_below_threshold() {
        let map = two_gear_map();
        assert_eq!(select_gear(0.5, 2.0, Gear(2), &map), Gear(1));
    }

    #[test]
    fn standstill_returns_first_gear() {
        let map = four_gear_map();
        for g in 1..=4 {
            for pedal in [0.0, 0.3, 1.0] {
                assert_eq!(select_gear(pedal, 0.0, Gear(g), &map), Gear::FIRST);
            }
        }
    }

    #[test]
    fn one_gear_per_call_while_moving() {
        let map = four_gear_map();
        assert_eq!(select_gear(0.0, 30.0, Gear(1), &map), Gear(2));
        assert_eq!(select_gear(0.0, 0.5, Gear(4), &map), Gear(3));
    }

    #[test]
    fn gear_queries_reject_unknown_gear() {
        let map = two_gear_map();
        assert!(matches!(
            map.ratio(Gear(3)),
            Err(Error::InvalidGear { gear: 3, count: 2 })
        ));
        assert!(map.ratio(Gear(0)).is_err());
        assert_eq!(map.upshift_speed(Gear(2), 0.2).unwrap(), None);
        assert_eq!(map.downshift_speed(Gear(1), 0.2).unwrap(), None);
    }

    #[test]
    fn rejects_invalid_maps() {
        // ratios not decreasing
        assert!(ShiftMap::new(vec![5.0, 6.0], vec![0.0, 1.0], vec![vec![4.0, 6.0]], vec![vec![2.0, 3.0]]).is_err());
        // empty hysteresis band
        assert!(ShiftMap::new(vec![6.0, 5.0], vec![0.0, 1.0], vec![vec![4.0, 6.0]], vec![vec![4.0, 3.0]]).is_err());
        // missing rows
        assert!(ShiftMap::new(vec![6.0, 5.0], vec![0.0, 1.0], vec![], vec![]).is_err());
        // pedal grid outside [0, 1]
        assert!(ShiftMap::new(vec![6.0, 5.0], vec![0.0, 2.0], vec![vec![4.0, 6.0]], vec![vec![2.0, 3.0]]).is_err());
    }

    proptest! {
        #[test]
        fn converges_to_a_fixed_point(pedal in 0.0f64..=1.0, v in 0.0f64..40.0, g in 1u8..=4) {
            // a steady (pedal, v) settles within gear_count calls and then holds
            let map = four_gear_map();
            let mut gear = Gear(g);
            for _ in 0..map.gear_count() {
                gear = select_gear(pedal, v, gear, &map);
            }
            let again = select_gear(pedal, v, gear, &map);
            prop_assert_eq!(again, gear);
            prop_assert_eq!(select_gear(pedal, v, again, &map), again);
        }

        #[test]
        fn at_most_one_step_while_moving(pedal in 0.0f64..=1.0, v in 0.01f64..40.0, g in 1u8..=4) {
            let map = four_gear_map();
            let next = select_gear(pedal, v, Gear(g), &map);
            prop_assert!((next.0 as i16 - g as i16).abs() <= 1);
        }
    }
}
