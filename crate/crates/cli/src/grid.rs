//! Coupling grids given on the command line.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

/// `start:stop:step`. The grid is `start + i·step` for every `i` whose point
/// lies no more than half a step beyond `stop`; points are computed from the
/// index so no rounding error accumulates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 0.5).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("expected start:stop:step, got '{s}'"));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("'{t}' is not a finite number"))
        };
        let r = Range {
            start: num(start)?,
            stop: num(stop)?,
            step: num(step)?,
        };
        if r.step <= 0.0 {
            return Err(format!("step must be positive, got {}", r.step));
        }
        if r.stop < r.start {
            return Err(format!("stop {} lies below start {}", r.stop, r.start));
        }
        if (r.stop - r.start) / r.step > 1e7 {
            return Err("more than 10^7 grid points".into());
        }
        Ok(r)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl Serialize for Range {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
