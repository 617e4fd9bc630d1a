use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{HALF_WIDTH, TAU};

/// A closed interval `[a, b]` with `a <= b`.
///
/// Radial intervals live inside `[-1/√2, 1/√2]`; angular windows are read
/// as the half-open arc `[a, b)` taken modulo `2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub a: f64,
    pub b: f64,
}

impl IntervalSpec {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Interval { a, b, reason: "endpoints must be finite".into() });
        }
        if a > b {
            return Err(Error::Interval { a, b, reason: "lower endpoint exceeds upper".into() });
        }
        Ok(IntervalSpec { a, b })
    }

    /// The full radial range `[-1/√2, 1/√2]`.
    pub fn full_radial() -> Self {
        IntervalSpec { a: -HALF_WIDTH, b: HALF_WIDTH }
    }

    /// The full circle `[0, 2π)`.
    pub fn full_circle() -> Self {
        IntervalSpec { a: 0.0, b: TAU }
    }

    /// A radial interval; rejects anything leaving `[-1/√2, 1/√2]`.
    pub fn radial(a: f64, b: f64) -> Result<Self> {
        let iv = Self::new(a, b)?;
        iv.check_radial()?;
        Ok(iv)
    }

    pub fn check_radial(&self) -> Result<()> {
        if self.a < -HALF_WIDTH || self.b > HALF_WIDTH {
            return Err(Error::Interval {
                a: self.a,
                b: self.b,
                reason: "radial interval must lie inside [-1/√2, 1/√2]".into(),
            });
        }
        Ok(())
    }

    pub fn check_angular(&self) -> Result<()> {
        if self.len() > TAU {
            return Err(Error::Interval {
                a: self.a,
                b: self.b,
                reason: "angular window longer than 2π".into(),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_empty(&self) -> bool {
        self.a == self.b
    }

    /// Closed membership, used for radial intervals.
    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    /// Half-open membership of an angle in `[a, b)` modulo `2π`.
    pub fn contains_angle(&self, theta: f64) -> bool {
        in_arc(theta, self.a, self.len())
    }
}

/// `theta ∈ [start, start + width)` modulo `2π`.
///
/// Every windowed count in the crate goes through this predicate so that
/// fast sweeps and brute-force recounts agree bit for bit.
#[inline]
pub fn in_arc(theta: f64, start: f64, width: f64) -> bool {
    if width >= TAU {
        return true;
    }
    (theta - start).rem_euclid(TAU) < width
}

impl std::fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

impl std::str::FromStr for IntervalSpec {
    type Err = Error;

    /// Parses `a,b` or `a:b`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split([',', ':']).map(str::trim).collect();
        let bad = || Error::Interval { a: f64::NAN, b: f64::NAN, reason: format!("cannot parse {s:?}; expected a,b") };
        if parts.len() != 2 {
            return Err(bad());
        }
        let a = parse_endpoint(parts[0]).ok_or_else(bad)?;
        let b = parse_endpoint(parts[1]).ok_or_else(bad)?;
        IntervalSpec::new(a, b)
    }
}

// Accepts plain floats plus the symbolic endpoints `pi`, `2pi`, `h` (1/√2)
// with an optional leading minus sign.
fn parse_endpoint(s: &str) -> Option<f64> {
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s),
    };
    let v = match body {
        "pi" => std::f64::consts::PI,
        "2pi" => TAU,
        "h" => HALF_WIDTH,
        other => other.parse::<f64>().ok()?,
    };
    Some(sign * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let iv: IntervalSpec = "-h,h".parse().unwrap();
        assert_eq!(iv, IntervalSpec::full_radial());
        let iv: IntervalSpec = "0:2pi".parse().unwrap();
        assert_eq!(iv.b, TAU);
        assert!("1,0".parse::<IntervalSpec>().is_err());
        assert!("1".parse::<IntervalSpec>().is_err());
    }

    #[test]
    fn radial_bounds() {
        assert!(IntervalSpec::radial(-0.8, 0.0).is_err());
        assert!(IntervalSpec::radial(-0.5, 0.5).is_ok());
    }

    #[test]
    fn arc_wraps() {
        let j = IntervalSpec::new(6.0, 7.0).unwrap();
        assert!(j.contains_angle(0.5));
        assert!(j.contains_angle(6.1));
        assert!(!j.contains_angle(1.0));
        assert!(!IntervalSpec::new(1.0, 1.0).unwrap().contains_angle(1.0));
    }
}
