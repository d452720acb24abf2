use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Rectangular,
    /// `0.5 (1 - cos(2πn/L))`. Sums to one at hop `L/2`.
    HannPeriodic,
    /// `0.5 (1 - cos(2πn/(L-1)))`, symmetric about the centre.
    HannSymmetric,
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowKind::Rectangular => "rectangular",
            WindowKind::HannPeriodic => "hann_periodic",
            WindowKind::HannSymmetric => "hann_symmetric",
        })
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "rectangular" | "rect" | "boxcar" => Ok(WindowKind::Rectangular),
            "hann" | "hann_periodic" | "hanning" => Ok(WindowKind::HannPeriodic),
            "hann_symmetric" => Ok(WindowKind::HannSymmetric),
            other => Err(Error::invalid(format!("unknown window kind `{other}`"))),
        }
    }
}

/// Sampled analysis or crossfade window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowFunction {
    kind: WindowKind,
    values: Vec<f64>,
}

impl WindowFunction {
    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn make_window(kind: WindowKind, length: usize) -> Result<WindowFunction> {
    if length < 2 {
        return Err(Error::invalid(format!(
            "window length must be at least 2, got {length}"
        )));
    }
    let values = match kind {
        WindowKind::Rectangular => vec![1.0; length],
        WindowKind::HannPeriodic => hann(length, length as f64),
        WindowKind::HannSymmetric => hann(length, (length - 1) as f64),
    };
    Ok(WindowFunction { kind, values })
}

fn hann(length: usize, denom: f64) -> Vec<f64> {
    (0..length)
        .map(|n| 0.5 * (1.0 - (2.0 * PI * n as f64 / denom).cos()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rectangular_is_ones() {
        let w = make_window(WindowKind::Rectangular, 4).unwrap();
        assert_eq!(w.values(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn hann_periodic_four() {
        let w = make_window(WindowKind::HannPeriodic, 4).unwrap();
        let expected = [0.0, 0.5, 1.0, 0.5];
        for (a, b) in w.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn hann_symmetric_endpoints() {
        let w = make_window(WindowKind::HannSymmetric, 5).unwrap();
        assert_eq!(w.values()[0], 0.0);
        assert!(w.values()[4].abs() < 1e-15);
        assert_eq!(w.values()[2], 1.0);
    }

    #[test]
    fn cola_at_half_hop() {
        let w = make_window(WindowKind::HannPeriodic, 8).unwrap();
        assert!((w.values()[1] + w.values()[5] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            make_window(WindowKind::HannPeriodic, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn parses_names() {
        assert_eq!("hann".parse::<WindowKind>().unwrap(), WindowKind::HannPeriodic);
        assert_eq!("rect".parse::<WindowKind>().unwrap(), WindowKind::Rectangular);
        assert!("kaiser".parse::<WindowKind>().is_err());
    }

    proptest! {
        #[test]
        fn values_in_unit_interval(len in 2usize..5000, kind in prop_oneof![
            Just(WindowKind::Rectangular),
            Just(WindowKind::HannPeriodic),
            Just(WindowKind::HannSymmetric)
        ]) {
            let w = make_window(kind, len).unwrap();
            prop_assert!(w.values().iter().all(|v| (0.0..=1.0).contains(v)));
        }

        #[test]
        fn periodic_hann_is_cola(half in 1usize..2048) {
            let len = 2 * half;
            let w = make_window(WindowKind::HannPeriodic, len).unwrap();
            for n in 0..half {
                prop_assert!((w.values()[n] + w.values()[n + half] - 1.0).abs() < 1e-12);
            }
        }
    }
}
