use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Torus,
    HardWall,
}

/// The simulation window `[0, side)^dimension`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxGeometry {
    pub dimension: usize,
    pub side: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl BoxGeometry {
    pub fn new(dimension: usize, side: f64, boundary: Boundary) -> Result<Self> {
        let g = BoxGeometry { dimension, side, boundary };
        g.validate()?;
        Ok(g)
    }

    pub fn torus(dimension: usize, side: f64) -> Result<Self> {
        Self::new(dimension, side, Boundary::Torus)
    }

    pub fn hard_wall(dimension: usize, side: f64) -> Result<Self> {
        Self::new(dimension, side, Boundary::HardWall)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(CoreError::InvalidGeometry("dimension must be at least 1".into()));
        }
        if !(self.side.is_finite() && self.side > 0.0) {
            return Err(CoreError::InvalidGeometry(format!(
                "side must be finite and positive, got {}",
                self.side
            )));
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dimension as i32)
    }

    /// Largest distance two points of the box can have.
    pub fn diameter(&self) -> f64 {
        let per_axis = match self.boundary {
            Boundary::Torus => self.side / 2.0,
            Boundary::HardWall => self.side,
        };
        per_axis * (self.dimension as f64).sqrt()
    }

    #[inline]
    pub fn axis_delta(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        match self.boundary {
            Boundary::Torus => d.min(self.side - d),
            Boundary::HardWall => d,
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        for p in [a, b] {
            if p.len() != self.dimension {
                return Err(CoreError::DimensionMismatch { expected: self.dimension, got: p.len() });
            }
        }
        Ok(self.distance_unchecked(a, b))
    }

    /// Same as [`distance`](Self::distance) without the length checks.
    #[inline]
    pub fn distance_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        if a.len() == 1 {
            return self.axis_delta(a[0], b[0]);
        }
        let mut s = 0.0;
        for (x, y) in a.iter().zip(b) {
            let d = self.axis_delta(*x, *y);
            s += d * d;
        }
        s.sqrt()
    }

    /// Wraps a coordinate back into `[0, side)` on the torus, clamps on hard walls.
    pub fn normalize(&self, x: f64) -> f64 {
        match self.boundary {
            Boundary::Torus => {
                let y = x.rem_euclid(self.side);
                if y >= self.side {
                    0.0
                } else {
                    y
                }
            }
            Boundary::HardWall => x.clamp(0.0, next_down(self.side)),
        }
    }
}

fn next_down(x: f64) -> f64 {
    f64::from_bits(x.to_bits() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_and_plain() {
        let t = BoxGeometry::torus(1, 1.0).unwrap();
        let h = BoxGeometry::hard_wall(1, 1.0).unwrap();
        assert!((t.distance(&[0.1], &[0.9]).unwrap() - 0.2).abs() < 1e-12);
        assert!((h.distance(&[0.1], &[0.9]).unwrap() - 0.8).abs() < 1e-12);
        let t2 = BoxGeometry::torus(2, 10.0).unwrap();
        let d = t2.distance(&[0.0, 0.0], &[9.0, 9.0]).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BoxGeometry::torus(0, 1.0).is_err());
        assert!(BoxGeometry::torus(2, f64::NAN).is_err());
        assert!(BoxGeometry::torus(2, -1.0).is_err());
        let g = BoxGeometry::torus(2, 1.0).unwrap();
        assert!(matches!(
            g.distance(&[0.0], &[0.0, 0.0]),
            Err(CoreError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn normalize_stays_inside() {
        let g = BoxGeometry::torus(1, 3.0).unwrap();
        assert_eq!(g.normalize(-0.5), 2.5);
        assert_eq!(g.normalize(3.0), 0.0);
        let h = BoxGeometry::hard_wall(1, 3.0).unwrap();
        assert!(h.normalize(3.0) < 3.0);
    }
}
