//! Piecewise paths in (p, q, r)-space, parameterized per segment by
//! `s ∈ [0, 1]`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TransportError;
use crate::geometry::relative_divisor_value;
use crate::pfaffian::FactorName;

pub type Point = [Complex64; 3];

/// `[re, im]` triple as stored in JSON.
pub type JsonPoint = [[f64; 2]; 3];

fn from_json(p: &JsonPoint) -> Point {
    p.map(|[re, im]| Complex64::new(re, im))
}

fn to_json(p: &Point) -> JsonPoint {
    p.map(|z| [z.re, z.im])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Segment {
    Segment {
        from: JsonPoint,
        to: JsonPoint,
    },
    /// `center + radius·e^{i(start_angle + 2π·turns·s)}` in one coordinate.
    Circle {
        center: JsonPoint,
        radius: f64,
        coordinate: usize,
        #[serde(default = "one")]
        turns: f64,
        #[serde(default)]
        start_angle: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Segment {
    pub fn line(from: Point, to: Point) -> Self {
        Segment::Segment {
            from: to_json(&from),
            to: to_json(&to),
        }
    }

    pub fn circle(center: Point, radius: f64, coordinate: usize, turns: f64) -> Self {
        Segment::Circle {
            center: to_json(&center),
            radius,
            coordinate,
            turns,
            start_angle: 0.0,
        }
    }

    pub fn point(&self, s: f64) -> Point {
        match self {
            Segment::Segment { from, to } => {
                let (a, b) = (from_json(from), from_json(to));
                [0, 1, 2].map(|k| a[k] + (b[k] - a[k]) * s)
            }
            Segment::Circle {
                center,
                radius,
                coordinate,
                turns,
                start_angle,
            } => {
                let mut z = from_json(center);
                z[*coordinate] += Complex64::from_polar(*radius, start_angle + TAU * turns * s);
                z
            }
        }
    }

    /// `dz/ds`.
    pub fn velocity(&self, s: f64) -> Point {
        match self {
            Segment::Segment { from, to } => {
                let (a, b) = (from_json(from), from_json(to));
                [0, 1, 2].map(|k| b[k] - a[k])
            }
            Segment::Circle {
                radius,
                coordinate,
                turns,
                start_angle,
                ..
            } => {
                let mut v = [Complex64::new(0.0, 0.0); 3];
                let w = TAU * turns;
                v[*coordinate] = Complex64::from_polar(*radius, start_angle + w * s) * Complex64::new(0.0, w);
                v
            }
        }
    }

    /// Coordinates that move along the segment.
    pub fn moving(&self) -> [bool; 3] {
        match self {
            Segment::Segment { from, to } => [0, 1, 2].map(|k| from[k] != to[k]),
            Segment::Circle { coordinate, .. } => [0, 1, 2].map(|k| k == *coordinate),
        }
    }

    pub fn reversed(&self) -> Self {
        match self {
            Segment::Segment { from, to } => Segment::Segment { from: *to, to: *from },
            Segment::Circle {
                center,
                radius,
                coordinate,
                turns,
                start_angle,
            } => Segment::Circle {
                center: *center,
                radius: *radius,
                coordinate: *coordinate,
                turns: -turns,
                start_angle: start_angle + TAU * turns,
            },
        }
    }
}

fn max_norm(z: &Point) -> f64 {
    z.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn close(a: &Point, b: &Point) -> bool {
    let scale = max_norm(a).max(max_norm(b)).max(1e-300);
    (0..3).all(|k| (a[k] - b[k]).norm() <= 1e-12 * scale)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub segments: Vec<Segment>,
    #[serde(default = "default_samples")]
    pub samples_hint: usize,
}

fn default_samples() -> usize {
    64
}

/// Divisors checked for clearance, `d1` included.
pub const CLEARANCE_DIVISORS: [FactorName; 6] = FactorName::ALL;

impl Path {
    pub fn new(segments: Vec<Segment>) -> Self {
        Self {
            segments,
            samples_hint: default_samples(),
        }
    }

    pub fn start(&self) -> Option<Point> {
        self.segments.first().map(|s| s.point(0.0))
    }

    pub fn end(&self) -> Option<Point> {
        self.segments.last().map(|s| s.point(1.0))
    }

    pub fn is_closed(&self) -> bool {
        match (self.start(), self.end()) {
            (Some(a), Some(b)) => close(&a, &b),
            _ => true,
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            samples_hint: self.samples_hint,
        }
    }

    pub fn validate(&self) -> Result<(), TransportError> {
        for (i, w) in self.segments.windows(2).enumerate() {
            if !close(&w[0].point(1.0), &w[1].point(0.0)) {
                return Err(TransportError::Discontinuous { segment: i + 1 });
            }
        }
        Ok(())
    }

    /// Smallest scale-free divisor distance over the sample points.
    pub fn min_clearance(&self) -> (f64, Option<FactorName>) {
        let n = self.samples_hint.max(2);
        let mut best = (f64::INFINITY, None);
        for seg in &self.segments {
            for i in 0..=n {
                let z = seg.point(i as f64 / n as f64);
                for d in CLEARANCE_DIVISORS {
                    let v = relative_divisor_value(d, &z);
                    if v < best.0 {
                        best = (v, Some(d));
                    }
                }
            }
        }
        best
    }

    pub fn check_clearance(&self, clearance: f64) -> Result<(), TransportError> {
        let (c, d) = self.min_clearance();
        if c < clearance {
            return Err(TransportError::Clearance {
                divisor: d.map(|d| d.as_str().to_string()).unwrap_or_default(),
                value: c,
                required: clearance,
            });
        }
        Ok(())
    }

    /// Axis-parallel rectangle `z, z + a e_i, z + a e_i + b e_j, z + b e_j, z`.
    pub fn rectangle(corner: Point, i: usize, a: Complex64, j: usize, b: Complex64) -> Self {
        let mut c1 = corner;
        c1[i] += a;
        let mut c2 = c1;
        c2[j] += b;
        let mut c3 = corner;
        c3[j] += b;
        Self::new(vec![
            Segment::line(corner, c1),
            Segment::line(c1, c2),
            Segment::line(c2, c3),
            Segment::line(c3, corner),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_closes_and_reverses() {
        let s = Segment::circle([c(0.3, 0.0), c(0.2, 0.0), c(0.0, 0.0)], 0.01, 2, 1.0);
        assert!(close(&s.point(0.0), &s.point(1.0)));
        let r = s.reversed();
        for t in [0.0, 0.3, 0.9] {
            assert!(close(&s.point(t), &r.point(1.0 - t)));
        }
        let h = 1e-6;
        let fd = (s.point(0.4 + h)[2] - s.point(0.4 - h)[2]) / (2.0 * h);
        assert!((fd - s.velocity(0.4)[2]).norm() < 1e-6);
    }

    #[test]
    fn json_schema() {
        let j = r#"{"segments":[{"type":"segment","from":[[0.1,0],[0.2,0],[0.3,0]],"to":[[0.1,0.01],[0.2,0],[0.3,0]]},
                    {"type":"circle","center":[[0.1,0.01],[0.2,0],[0.3,0]],"radius":0.0,"coordinate":1}]}"#;
        let p: Path = serde_json::from_str(j).unwrap();
        assert_eq!(p.samples_hint, 64);
        assert!(p.validate().is_ok());
        let back: Path = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rectangle_is_closed_and_continuous() {
        let p = Path::rectangle([c(0.3, 0.0), c(0.2, 0.0), c(0.1, 0.0)], 0, c(0.01, 0.0), 1, c(0.0, 0.01));
        assert!(p.is_closed());
        assert!(p.validate().is_ok());
        assert!(p.reversed().validate().is_ok());
    }

    #[test]
    fn clearance_flags_coordinate_planes() {
        let p = Path::new(vec![Segment::line(
            [c(1e-3, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1e-3, 0.0), c(0.0, 0.0)],
        )]);
        assert!(matches!(p.check_clearance(1e-3), Err(TransportError::Clearance { .. })));
    }
}
