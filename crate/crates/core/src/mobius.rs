//! Orientation-preserving isometries of the upper half-plane.
//!
//! Elements are stored as real 2×2 matrices of unit determinant. Every
//! constructor rescales by `1/sqrt(det)`, so long word products do not drift
//! away from `SL(2, R)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Margin on `|tr| - 2` below which an element is not treated as hyperbolic.
pub const HYPERBOLIC_TOL: f64 = 1e-10;

/// `|c|` below which an element is considered to fix infinity.
pub const FIXES_INFINITY_TOL: f64 = 1e-12;

/// A point of the closed upper half-plane including the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedPoint {
    Finite(Complex64),
    Infinity,
}

impl ExtendedPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtendedPoint::Finite(z) => Some(z),
            ExtendedPoint::Infinity => None,
        }
    }
}

impl From<Complex64> for ExtendedPoint {
    fn from(z: Complex64) -> Self {
        ExtendedPoint::Finite(z)
    }
}

/// Real Möbius transformation `z ↦ (az + b)/(cz + d)` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct MoebiusElement {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl TryFrom<[f64; 4]> for MoebiusElement {
    type Error = Error;

    fn try_from(m: [f64; 4]) -> Result<Self> {
        MoebiusElement::new(m[0], m[1], m[2], m[3])
    }
}

impl From<MoebiusElement> for [f64; 4] {
    fn from(g: MoebiusElement) -> Self {
        g.entries()
    }
}

impl MoebiusElement {
    pub const IDENTITY: MoebiusElement = MoebiusElement {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds an element from matrix entries, rescaling to unit determinant.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.is_finite() && det > 0.0) || ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "matrix [[{a}, {b}], [{c}, {d}]] must have finite entries and positive determinant"
            )));
        }
        Ok(Self::scaled(a, b, c, d, det))
    }

    fn scaled(a: f64, b: f64, c: f64, d: f64, det: f64) -> Self {
        let s = det.sqrt().recip();
        MoebiusElement {
            a: a * s,
            b: b * s,
            c: c * s,
            d: d * s,
        }
    }

    /// Diagonal element `diag(e^{t/2}, e^{-t/2})`: translation by `t` along the imaginary axis.
    pub fn dilation(t: f64) -> Self {
        let e = (0.5 * t).exp();
        MoebiusElement {
            a: e,
            b: 0.0,
            c: 0.0,
            d: e.recip(),
        }
    }

    /// Hyperbolic element of translation length `length` whose axis joins
    /// `repelling` to `attracting` (both finite, distinct, real).
    pub fn hyperbolic_with_axis(repelling: f64, attracting: f64, length: f64) -> Result<Self> {
        if !(length > 0.0) || !(repelling - attracting).is_normal() {
            return Err(Error::InvalidInput(format!(
                "hyperbolic element needs length > 0 and distinct fixed points, got {repelling}, {attracting}, {length}"
            )));
        }
        // h sends 0 -> repelling and ∞ -> attracting, so h·diag(e^{l/2}, e^{-l/2})·h⁻¹
        // pushes everything towards `attracting`.
        let h = MoebiusElement::new(attracting, repelling, 1.0, 1.0)
            .or_else(|_| MoebiusElement::new(-attracting, repelling, -1.0, 1.0))?;
        Ok(h.compose(&MoebiusElement::dilation(length)).compose(&h.inverse()))
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Matrix product `self · other`, renormalized to unit determinant.
    pub fn compose(&self, other: &MoebiusElement) -> MoebiusElement {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        // no renormalization: ad - bc cancels catastrophically for long words
        MoebiusElement { a, b, c, d }
    }

    pub fn inverse(&self) -> MoebiusElement {
        MoebiusElement {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn power(&self, m: u32) -> MoebiusElement {
        (0..m).fold(MoebiusElement::IDENTITY, |acc, _| acc.compose(self))
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.trace().abs() > 2.0 + HYPERBOLIC_TOL
    }

    /// Translation length `2 arccosh(|tr|/2)` of a hyperbolic element.
    pub fn translation_length(&self) -> Result<f64> {
        let t = self.trace().abs();
        if t <= 2.0 + HYPERBOLIC_TOL {
            return Err(Error::NotHyperbolic { trace: t });
        }
        Ok(2.0 * (0.5 * t).acosh())
    }

    /// Image of a point; `cz + d = 0` maps to infinity.
    pub fn apply(&self, z: ExtendedPoint) -> ExtendedPoint {
        match z {
            ExtendedPoint::Infinity => {
                if self.c == 0.0 {
                    ExtendedPoint::Infinity
                } else {
                    ExtendedPoint::Finite(Complex64::new(self.a / self.c, 0.0))
                }
            }
            ExtendedPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == Complex64::new(0.0, 0.0) {
                    ExtendedPoint::Infinity
                } else {
                    ExtendedPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Image of a finite point, panicking on the pole. Callers use it only where the
    /// pole is known to be excluded (e.g. inside Schottky disks).
    pub(crate) fn apply_finite(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// Derivative `1/(cz + d)^2`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        (den * den).inv()
    }

    /// The circle `|cz + d| = 1`, on whose exterior the element contracts.
    pub fn isometric_disk(&self) -> Result<Disk> {
        if self.c.abs() < FIXES_INFINITY_TOL {
            return Err(Error::FixesInfinity { c: self.c.abs() });
        }
        Disk::new(-self.d / self.c, self.c.abs().recip())
    }

    /// Fixed points on the real line as `(repelling, attracting)`, for hyperbolic elements.
    pub fn fixed_points(&self) -> Result<(ExtendedPoint, ExtendedPoint)> {
        self.translation_length()?;
        let sign = self.trace().signum();
        // Work with the representative of positive trace.
        let (a, b, c, d) = (sign * self.a, sign * self.b, sign * self.c, sign * self.d);
        if c.abs() < FIXES_INFINITY_TOL {
            let fin = ExtendedPoint::Finite(Complex64::new(b / (d - a), 0.0));
            return Ok(if a > d {
                (fin, ExtendedPoint::Infinity)
            } else {
                (ExtendedPoint::Infinity, fin)
            });
        }
        let tr = a + d;
        let disc = (tr * tr - 4.0).sqrt();
        let x1 = (a - d + disc) / (2.0 * c);
        let x2 = (a - d - disc) / (2.0 * c);
        // attracting fixed point has |g'(x)| = 1/(cx+d)^2 < 1.
        let attracting_first = (c * x1 + d).abs() > 1.0;
        let (p1, p2) = (
            ExtendedPoint::Finite(Complex64::new(x1, 0.0)),
            ExtendedPoint::Finite(Complex64::new(x2, 0.0)),
        );
        Ok(if attracting_first { (p2, p1) } else { (p1, p2) })
    }

    /// Largest `|g - h|` entry difference, matching `±` representatives.
    pub fn distance_to(&self, other: &MoebiusElement) -> f64 {
        let plus = self
            .entries()
            .iter()
            .zip(other.entries())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let minus = self
            .entries()
            .iter()
            .zip(other.entries())
            .map(|(x, y)| (x + y).abs())
            .fold(0.0, f64::max);
        plus.min(minus)
    }
}

/// Closed disk in the plane whose center lies on the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: f64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        if !center.is_finite() || !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!(
                "disk needs finite center and positive radius, got center {center}, radius {radius}"
            )));
        }
        Ok(Disk { center, radius })
    }

    pub fn center_point(&self) -> Complex64 {
        Complex64::new(self.center, 0.0)
    }

    /// Boundary point at angle `theta`.
    pub fn boundary_point(&self, theta: f64) -> Complex64 {
        self.center_point() + Complex64::from_polar(self.radius, theta)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center_point()).norm() <= self.radius
    }

    /// Euclidean gap between two disks; negative when they overlap.
    pub fn gap(&self, other: &Disk) -> f64 {
        (self.center - other.center).abs() - self.radius - other.radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn generic() -> MoebiusElement {
        MoebiusElement::new(2.0, 3.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn compose_with_identity() {
        let g = generic();
        assert_eq!(MoebiusElement::IDENTITY.compose(&g), g);
        assert!(g.compose(&g.inverse()).distance_to(&MoebiusElement::IDENTITY) < 1e-12);
    }

    #[test]
    fn diagonal_products() {
        let p = MoebiusElement::dilation(1.0).compose(&MoebiusElement::dilation(2.0));
        assert!(p.distance_to(&MoebiusElement::dilation(3.0)) < 1e-14);
        let inv = MoebiusElement::dilation(1.0).inverse();
        assert!(inv.distance_to(&MoebiusElement::dilation(-1.0)) < 1e-15);
        assert_eq!(MoebiusElement::IDENTITY.inverse(), MoebiusElement::IDENTITY);
        let g = generic();
        assert!(g.inverse().inverse().distance_to(&g) < 1e-14);
    }

    #[test]
    fn construction_normalizes_determinant() {
        let g = MoebiusElement::new(4.0, 6.0, 2.0, 4.0).unwrap();
        assert!((g.determinant() - 1.0).abs() < 1e-12);
        assert!(MoebiusElement::new(1.0, 2.0, 3.0, 4.0).is_err());
    }

    #[test]
    fn translation_lengths() {
        assert!((MoebiusElement::dilation(1.0).translation_length().unwrap() - 1.0).abs() < 1e-14);
        let t = 2.0 * 3.0_f64.cosh();
        let g = MoebiusElement::new(t - 1.0, 1.0, t - 2.0, 1.0).unwrap();
        assert!((g.trace() - t).abs() < 1e-12);
        assert!((g.translation_length().unwrap() - 6.0).abs() < 1e-10);
        let (s, c) = 0.4_f64.sin_cos();
        let rotation = MoebiusElement::new(c, -s, s, c).unwrap();
        assert!(matches!(
            rotation.translation_length(),
            Err(Error::NotHyperbolic { .. })
        ));
    }

    #[test]
    fn apply_points() {
        let i = Complex64::i();
        assert_eq!(MoebiusElement::IDENTITY.apply(i.into()), ExtendedPoint::Finite(i));
        let z = MoebiusElement::dilation(1.0).apply(i.into()).finite().unwrap();
        assert!((z - std::f64::consts::E * i).norm() < 1e-14);
        let g = generic();
        assert_eq!(g.apply(Complex64::new(-2.0, 0.0).into()), ExtendedPoint::Infinity);
        assert_eq!(
            g.apply(ExtendedPoint::Infinity),
            ExtendedPoint::Finite(Complex64::new(2.0, 0.0))
        );
    }

    #[test]
    fn isometric_disks() {
        let g = generic();
        let disk = g.isometric_disk().unwrap();
        assert_eq!(disk.center, -2.0);
        assert_eq!(disk.radius, 1.0);
        assert!(matches!(
            MoebiusElement::dilation(2.0).isometric_disk(),
            Err(Error::FixesInfinity { .. })
        ));
        // boundary circle maps onto the isometric circle of the inverse
        let target = g.inverse().isometric_disk().unwrap();
        for k in 0..64 {
            let z = disk.boundary_point(2.0 * std::f64::consts::PI * k as f64 / 64.0);
            let w = g.apply_finite(z);
            assert!(((w - target.center_point()).norm() - target.radius).abs() < 1e-10);
        }
    }

    #[test]
    fn hyperbolic_with_axis_fixed_points() {
        let g = MoebiusElement::hyperbolic_with_axis(-3.0, 5.0, 2.5).unwrap();
        assert!((g.translation_length().unwrap() - 2.5).abs() < 1e-12);
        let (rep, att) = g.fixed_points().unwrap();
        assert!((rep.finite().unwrap().re + 3.0).abs() < 1e-12);
        assert!((att.finite().unwrap().re - 5.0).abs() < 1e-12);
    }

    fn element() -> impl Strategy<Value = MoebiusElement> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_filter_map(
            "positive determinant",
            |(a, b, c, d)| {
                let det = a * d - b * c;
                (det > 0.05).then(|| MoebiusElement::new(a, b, c, d).unwrap())
            },
        )
    }

    fn hyperbolic() -> impl Strategy<Value = MoebiusElement> {
        (-2.0..2.0f64, 0.5..2.0f64, 0.3..3.0f64)
            .prop_map(|(p, w, l)| MoebiusElement::hyperbolic_with_axis(p - w, p + w, l).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 1000, rng_seed: proptest::test_runner::RngSeed::Fixed(7), ..ProptestConfig::default() })]

        #[test]
        fn upper_half_plane_preserved(g in element()) {
            let w = g.apply(Complex64::i().into()).finite().unwrap();
            prop_assert!(w.im > 0.0);
        }

        #[test]
        fn determinant_preserved(g in element(), h in element()) {
            prop_assert!((g.compose(&h).determinant() - 1.0).abs() < 1e-12);
            prop_assert!((g.inverse().determinant() - 1.0).abs() < 1e-12);
            let assoc = g.compose(&h).compose(&g).distance_to(&g.compose(&h.compose(&g)));
            let scale = g.entries().iter().chain(h.entries().iter()).fold(1.0f64, |m, x| m.max(x.abs()));
            prop_assert!(assoc < 1e-12 * scale.powi(3));
        }

        #[test]
        fn conjugation_invariance(g in hyperbolic(), h in element()) {
            let conj = h.compose(&g.compose(&h.inverse()));
            let l = g.translation_length().unwrap();
            prop_assert!((conj.translation_length().unwrap() - l).abs() < 1e-10);
        }

        #[test]
        fn powers_scale_length(g in hyperbolic(), m in 1u32..=8) {
            let l = g.translation_length().unwrap();
            let lm = g.power(m).translation_length().unwrap();
            prop_assert!((lm - m as f64 * l).abs() < 1e-10);
        }
    }
}
