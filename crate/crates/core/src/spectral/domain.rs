use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};

/// Bounded open region: an interval or an axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Interval([f64; 2]),
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let d = Domain::Interval([a, b]);
        d.validate()?;
        Ok(d)
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let d = Domain::Box { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds();
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(FracError::Config(
                "domain bounds must be non-empty and of equal length".into(),
            ));
        }
        for (a, b) in lo.iter().zip(hi) {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(FracError::Config(format!("empty or unbounded side [{a}, {b}]")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval(_) => 1,
            Domain::Box { lo, .. } => lo.len(),
        }
    }

    /// Lower and upper corners.
    pub fn bounds(&self) -> (&[f64], &[f64]) {
        match self {
            Domain::Interval(ab) => (&ab[..1], &ab[1..]),
            Domain::Box { lo, hi } => (lo, hi),
        }
    }

    pub fn side_lengths(&self) -> Vec<f64> {
        let (lo, hi) = self.bounds();
        lo.iter().zip(hi).map(|(a, b)| b - a).collect()
    }

    pub fn volume(&self) -> f64 {
        self.side_lengths().iter().product()
    }

    pub fn center(&self) -> Vec<f64> {
        let (lo, hi) = self.bounds();
        lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Open-set membership; boundary points are outside.
    pub fn contains(&self, x: &[f64]) -> bool {
        let (lo, hi) = self.bounds();
        x.len() == lo.len() && x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a < *v && *v < *b)
    }

    /// Radius of the smallest origin-centred ball containing the closure.
    pub fn enclosing_radius(&self) -> f64 {
        let (lo, hi) = self.bounds();
        lo.iter()
            .zip(hi)
            .map(|(a, b)| a.abs().max(b.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Distance from an interior point to the boundary.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        let (lo, hi) = self.bounds();
        x.iter()
            .zip(lo.iter().zip(hi))
            .map(|(v, (a, b))| (v - a).min(b - v))
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn require_contains(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(FracError::Config(format!(
                "point {x:?} has dimension {} but the domain has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        if !self.contains(x) {
            return Err(FracError::PointOutsideDomain { point: x.to_vec() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_is_open() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        assert!(d.contains(&[0.5]));
        assert!(!d.contains(&[0.0]));
        assert!(!d.contains(&[1.0]));
        assert!(!d.contains(&[f64::NAN]));
        let b = Domain::boxed(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert!(b.contains(&[0.5, 0.0]));
        assert!(!b.contains(&[0.5, 1.0]));
        assert!(!b.contains(&[0.5]));
    }

    #[test]
    fn rejects_degenerate_sides() {
        assert!(Domain::interval(1.0, 1.0).is_err());
        assert!(Domain::interval(0.0, f64::INFINITY).is_err());
        assert!(Domain::boxed(vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn json_shape() {
        let d = Domain::interval(0.0, 2.0).unwrap();
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"interval":[0.0,2.0]}"#);
        let b: Domain = serde_json::from_str(r#"{"box":{"lo":[0,0],"hi":[1,2]}}"#).unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.volume(), 2.0);
    }
}
