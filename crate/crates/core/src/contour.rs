//! Piecewise paths in ℂ with semicircular detours around poles.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Quadrature};

/// Detour radius used when none is requested.
pub const DEFAULT_RADIUS: f64 = 0.1;

/// Which side of the direction of travel a detour passes.
///
/// `Upper` is the left-hand side, i.e. the upper half-plane for a path
/// running in the +Re direction; `Lower` is the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    Upper,
    Lower,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upper" => Ok(Side::Upper),
            "lower" => Ok(Side::Lower),
            other => Err(Error::InvalidInput(format!(
                "contour side must be upper or lower, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Piece {
    Segment {
        from: Complex64,
        to: Complex64,
    },
    /// `center + radius·e^{i(start + s·sweep)}`, `s ∈ [0, 1]`.
    Arc {
        center: Complex64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Piece {
    fn point(&self, s: f64) -> Complex64 {
        match *self {
            Piece::Segment { from, to } => from + (to - from) * s,
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + Complex64::from_polar(radius, start + s * sweep),
        }
    }

    fn velocity(&self, s: f64) -> Complex64 {
        match *self {
            Piece::Segment { from, to } => to - from,
            Piece::Arc {
                radius, start, sweep, ..
            } => Complex64::new(0.0, sweep) * Complex64::from_polar(radius, start + s * sweep),
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Piece::Segment { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let s = if len2 == 0.0 {
                    0.0
                } else {
                    ((p - from) * d.conj()).re / len2
                };
                (p - self.point(s.clamp(0.0, 1.0))).norm()
            }
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let rel = p - center;
                // fraction of the sweep at which the ray through p sits
                let mut angle = (rel.arg() - start) / sweep.signum();
                angle = angle.rem_euclid(2.0 * PI);
                if rel.norm() > 0.0 && angle <= sweep.abs() {
                    (rel.norm() - radius).abs()
                } else {
                    (p - self.start()).norm().min((p - self.end()).norm())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourPath {
    pieces: Vec<Piece>,
    radius: f64,
    side: Side,
}

impl ContourPath {
    /// The straight segment; no detours.
    pub fn segment(from: Complex64, to: Complex64) -> Self {
        Self::polyline(&[from, to])
    }

    /// Straight pieces through the given vertices.
    pub fn polyline(points: &[Complex64]) -> Self {
        let pieces = points
            .windows(2)
            .filter(|w| w[0] != w[1])
            .map(|w| Piece::Segment { from: w[0], to: w[1] })
            .collect();
        ContourPath {
            pieces,
            radius: DEFAULT_RADIUS,
            side: Side::Upper,
        }
    }

    /// The segment `from → to`, replacing a diameter of length `2·radius`
    /// around every listed pole within `radius` of it by a semicircle on `side`.
    pub fn detoured(from: Complex64, to: Complex64, poles: &[Complex64], radius: f64, side: Side) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!(
                "detour radius must be positive, got {radius}"
            )));
        }
        let d = to - from;
        let len = d.norm();
        if len == 0.0 {
            return Ok(ContourPath {
                pieces: Vec::new(),
                radius,
                side,
            });
        }
        let u = d / len;
        let mut hits: Vec<(f64, Complex64)> = poles
            .iter()
            .filter_map(|&p| {
                let s = ((p - from) * u.conj()).re;
                let off = ((p - from) * u.conj()).im.abs();
                (off < radius && s > -radius && s < len + radius).then_some((s, p))
            })
            .collect();
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        let sweep = match side {
            Side::Upper => -PI,
            Side::Lower => PI,
        };
        let mut pieces = Vec::new();
        let mut cursor = 0.0;
        for &(s, p) in &hits {
            // centre the arc on the projection so it starts and ends on the segment
            let foot = from + u * s;
            if s - radius < cursor - 1e-12 || s + radius > len + 1e-12 || (p - foot).norm() > 1e-12 * len.max(1.0) {
                return Err(Error::ContourThroughPole {
                    pole: p,
                    distance: (s - cursor).min(len - s).max(0.0),
                });
            }
            if s - radius > cursor {
                pieces.push(Piece::Segment {
                    from: from + u * cursor,
                    to: from + u * (s - radius),
                });
            }
            pieces.push(Piece::Arc {
                center: foot,
                radius,
                start: (-u).arg(),
                sweep,
            });
            cursor = s + radius;
        }
        if cursor < len {
            pieces.push(Piece::Segment {
                from: from + u * cursor,
                to,
            });
        }
        Ok(ContourPath { pieces, radius, side })
    }

    /// The deformation radius used for the `ρ/2` clearance check.
    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn start(&self) -> Complex64 {
        self.pieces.first().map_or(Complex64::new(0.0, 0.0), Piece::start)
    }

    pub fn end(&self) -> Complex64 {
        self.pieces.last().map_or(self.start(), Piece::end)
    }

    /// Largest modulus reached; poles beyond it cannot interfere.
    pub fn reach(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| match *p {
                Piece::Segment { from, to } => from.norm().max(to.norm()),
                Piece::Arc { center, radius, .. } => center.norm() + radius,
            })
            .fold(0.0, f64::max)
    }

    pub fn distance_to(&self, p: Complex64) -> f64 {
        self.pieces
            .iter()
            .map(|q| q.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Every pole must stay at least `ρ/2` away from the path.
    pub fn check_avoids(&self, poles: &[Complex64]) -> Result<()> {
        for &pole in poles {
            let distance = self.distance_to(pole);
            if distance < 0.5 * self.radius {
                return Err(Error::ContourThroughPole { pole, distance });
            }
        }
        Ok(())
    }

    /// `∫ f(z) dz` along the path, absolute tolerance `tol` shared across pieces.
    pub fn integrate(&self, f: &(dyn Fn(Complex64) -> Result<Complex64> + Sync), tol: f64) -> Result<Quadrature> {
        let share = tol / self.pieces.len().max(1) as f64;
        let mut total = Quadrature {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        };
        for piece in &self.pieces {
            let initial = match *piece {
                Piece::Segment { from, to } => ((to - from).norm().ceil() as usize).clamp(1, 64),
                Piece::Arc { .. } => 2,
            };
            let q = quad::integrate(
                &|s| Ok(f(piece.point(s))? * piece.velocity(s)),
                0.0,
                1.0,
                share,
                initial,
            )?;
            total.value += q.value;
            total.error += q.error;
            total.evaluations += q.evaluations;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn detour_endpoints_and_side() {
        let path = ContourPath::detoured(c(0.0, 0.0), c(1.0, 0.0), &[c(0.5, 0.0)], 0.1, Side::Upper).unwrap();
        assert_eq!(path.pieces().len(), 3);
        assert!((path.start() - c(0.0, 0.0)).norm() < 1e-15);
        assert!((path.end() - c(1.0, 0.0)).norm() < 1e-15);
        let Piece::Arc { .. } = path.pieces()[1] else { panic!() };
        assert!(path.pieces()[1].point(0.5).im > 0.09);
        let lower = ContourPath::detoured(c(0.0, 0.0), c(1.0, 0.0), &[c(0.5, 0.0)], 0.1, Side::Lower).unwrap();
        assert!(lower.pieces()[1].point(0.5).im < -0.09);
        assert!((path.distance_to(c(0.5, 0.0)) - 0.1).abs() < 1e-14);
        path.check_avoids(&[c(0.5, 0.0)]).unwrap();
    }

    #[test]
    fn residue_from_detour_difference() {
        // upper minus lower semicircle encircles the pole clockwise
        let f = |z: Complex64| Ok(1.0 / (z - 0.5));
        let up = ContourPath::detoured(c(0.0, 0.0), c(1.0, 0.0), &[c(0.5, 0.0)], 0.1, Side::Upper).unwrap();
        let down = ContourPath::detoured(c(0.0, 0.0), c(1.0, 0.0), &[c(0.5, 0.0)], 0.1, Side::Lower).unwrap();
        let diff = up.integrate(&f, 1e-12).unwrap().value - down.integrate(&f, 1e-12).unwrap().value;
        assert!((diff - c(0.0, -2.0 * PI)).norm() < 1e-11, "{diff}");
    }

    #[test]
    fn straight_path_through_pole_rejected() {
        let path = ContourPath::segment(c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(
            path.check_avoids(&[c(0.5, 0.01)]),
            Err(Error::ContourThroughPole { .. })
        ));
        assert!(ContourPath::detoured(c(0.0, 0.0), c(1.0, 0.0), &[c(0.95, 0.0)], 0.1, Side::Upper).is_err());
    }

    #[test]
    fn polyline_integral_of_entire_function() {
        let path = ContourPath::polyline(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 2.0), c(-1.0, 1.0)]);
        let q = path.integrate(&|z: Complex64| Ok(z.exp()), 1e-13).unwrap();
        assert!((q.value - (c(-1.0, 1.0).exp() - 1.0)).norm() < 1e-12);
    }

    #[test]
    fn side_parses() {
        assert_eq!("Lower".parse::<Side>().unwrap(), Side::Lower);
        assert!("left".parse::<Side>().is_err());
    }
}
