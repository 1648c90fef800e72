//! Closed forms for general odd `n`: log-gamma, `L(t)`, the scattering
//! determinant of `H^{n+1}`, the 0-volume and the Weyl polynomial.

mod gamma;
mod weyl;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::ContourPath;
use crate::error::{Error, Result};

pub use gamma::log_gamma;
pub use weyl::{WeylForm, WeylPolynomial};

/// Quadrature tolerance for `∫ L`.
pub const L_INTEGRAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct OddDimension(u32);

impl OddDimension {
    pub const ONE: OddDimension = OddDimension(1);

    pub fn new(n: u32) -> Result<Self> {
        if n % 2 == 1 {
            Ok(OddDimension(n))
        } else {
            Err(Error::InvalidInput(format!(
                "dimension n must be odd and positive, got {n}"
            )))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn half(self) -> f64 {
        0.5 * self.0 as f64
    }

    /// `(-1)^{(n+1)/2}`.
    pub fn sign(self) -> f64 {
        if (self.0 + 1) / 2 % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `Γ(n + 1) = n!`.
    pub fn factorial(self) -> f64 {
        (1..=self.0).map(f64::from).product()
    }
}

impl TryFrom<u32> for OddDimension {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        OddDimension::new(n)
    }
}

impl From<OddDimension> for u32 {
    fn from(n: OddDimension) -> u32 {
        n.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LRoute {
    /// `Γ(n/2+it)Γ(n/2-it) / (Γ(it)Γ(-it))`.
    GammaQuotient,
    /// `Π_j ((n/2-j)² + t²) · t tanh(πt)`.
    #[default]
    Polynomial,
}

/// `L(t)` by the requested route.
pub fn big_l(n: OddDimension, t: Complex64, route: LRoute) -> Result<Complex64> {
    match route {
        LRoute::Polynomial => {
            // tanh has its poles where cosh(πt) = 0, i.e. t = i(k + 1/2)
            let k = t.im - 0.5;
            if t.re == 0.0 && k.fract() == 0.0 {
                return Err(Error::PoleAt(t));
            }
            let product: Complex64 = (1..=(n.get() - 1) / 2)
                .map(|j| (n.half() - j as f64).powi(2) + t * t)
                .product();
            Ok(product * t * (PI * t).tanh())
        }
        LRoute::GammaQuotient => {
            let i = Complex64::i();
            // 1/Γ vanishes at the non-positive integers
            if t.re == 0.0 && t.im.fract() == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let num_at = |s: Complex64| {
                log_gamma(s).map_err(|e| match e {
                    Error::PoleAt(_) => Error::PoleAt(t),
                    other => other,
                })
            };
            let log = num_at(n.half() + i * t)? + num_at(n.half() - i * t)? - log_gamma(i * t)? - log_gamma(-i * t)?;
            Ok(log.exp())
        }
    }
}

/// Poles of `L` with `|t| ≤ reach`: `±i(m + 1/2)` for `m ≥ (n-1)/2`, the
/// lower half-integers being cancelled by the polynomial factors.
pub fn l_poles(n: OddDimension, reach: f64) -> Vec<Complex64> {
    let mut poles = Vec::new();
    let mut m = (n.get() - 1) / 2;
    while m as f64 + 0.5 <= reach {
        let y = m as f64 + 0.5;
        poles.push(Complex64::new(0.0, y));
        poles.push(Complex64::new(0.0, -y));
        m += 1;
    }
    poles
}

/// `∫ L(t) dt` along the contour, after checking it clears the poles of `L`.
pub fn integrate_l(n: OddDimension, contour: &ContourPath) -> Result<Complex64> {
    contour.check_avoids(&l_poles(n, contour.reach() + contour.radius()))?;
    Ok(contour
        .integrate(&|t| big_l(n, t, LRoute::Polynomial), L_INTEGRAL_TOL)?
        .value)
}

/// `det S_{H^{n+1}}(n/2 + iz)` = `exp(-2iπ(-1)^{(n+1)/2}/Γ(n+1) ∫₀^z L)`;
/// the contour must run from 0 to `z`.
pub fn det_sh(n: OddDimension, z: Complex64, contour: &ContourPath) -> Result<Complex64> {
    check_endpoints(contour, z)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let integral = integrate_l(n, contour)?;
    Ok((Complex64::new(0.0, -2.0 * PI * n.sign() / n.factorial()) * integral).exp())
}

pub(crate) fn check_endpoints(contour: &ContourPath, z: Complex64) -> Result<()> {
    let scale = z.norm().max(1.0);
    if contour.start().norm() > 1e-12 * scale || (contour.end() - z).norm() > 1e-12 * scale {
        return Err(Error::InvalidInput(format!(
            "contour runs from {} to {}, expected 0 to {z}",
            contour.start(),
            contour.end()
        )));
    }
    Ok(())
}

/// `0-vol(X) = (-1)^{(n+1)/2} π^{n/2+1} χ / Γ(n/2+1)`.
pub fn zero_volume(n: OddDimension, chi: i64) -> f64 {
    // Γ(n/2 + 1) = √π Π_{k=0}^{(n-1)/2} (k + 1/2), so the √π cancels
    let denominator: f64 = (0..=(n.get() - 1) / 2).map(|k| k as f64 + 0.5).product();
    n.sign() * chi as f64 * PI.powi((n.get() as i32 + 1) / 2) / denominator
}

/// `(4π)^{-(n+1)/2} / Γ((n+3)/2) · 0-vol`, the coefficient of the Weyl polynomial in ξ.
pub fn weyl_leading_constant(n: OddDimension, chi: i64) -> f64 {
    // Γ((n+3)/2) = ((n+1)/2)!
    let gamma: f64 = (1..=(n.get() + 1) / 2).map(f64::from).product();
    (4.0 * PI).powi(-((n.get() as i32 + 1) / 2)) / gamma * zero_volume(n, chi)
}

pub fn weyl_polynomial(n: OddDimension, form: WeylForm) -> WeylPolynomial {
    WeylPolynomial::new(n, form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::Side;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dim(n: u32) -> OddDimension {
        OddDimension::new(n).unwrap()
    }

    #[test]
    fn odd_dimension_validated() {
        assert!(OddDimension::new(4).is_err());
        assert!(OddDimension::new(0).is_err());
        assert_eq!(dim(3).sign(), 1.0);
        assert_eq!(dim(5).sign(), -1.0);
        assert_eq!(dim(5).factorial(), 120.0);
        assert!(serde_json::from_str::<OddDimension>("2").is_err());
    }

    #[test]
    fn l_at_simple_points() {
        assert_eq!(big_l(dim(1), c(0.0, 0.0), LRoute::Polynomial).unwrap(), c(0.0, 0.0));
        assert_eq!(big_l(dim(1), c(0.0, 0.0), LRoute::GammaQuotient).unwrap(), c(0.0, 0.0));
        let a = big_l(dim(1), c(1.0, 0.0), LRoute::Polynomial).unwrap();
        let b = big_l(dim(1), c(1.0, 0.0), LRoute::GammaQuotient).unwrap();
        assert!((a - c(PI.tanh(), 0.0)).norm() < 1e-15);
        assert!((a - b).norm() < 1e-11);
    }

    #[test]
    fn routes_agree_on_real_grids() {
        for n in [1, 3, 5] {
            for k in -200..=200 {
                let t = c(0.05 * k as f64 + 1e-3, 0.0);
                let a = big_l(dim(n), t, LRoute::Polynomial).unwrap();
                let b = big_l(dim(n), t, LRoute::GammaQuotient).unwrap();
                assert!(
                    (a - b).norm() <= 1e-11 * a.norm().max(1.0),
                    "n = {n}, t = {t}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn poles_reported() {
        assert_eq!(
            big_l(dim(1), c(0.0, 0.5), LRoute::Polynomial),
            Err(Error::PoleAt(c(0.0, 0.5)))
        );
        assert_eq!(
            big_l(dim(1), c(0.0, -1.5), LRoute::GammaQuotient),
            Err(Error::PoleAt(c(0.0, -1.5)))
        );
        // the polynomial factor cancels ±i/2 for n = 3
        assert_eq!(l_poles(dim(3), 2.0), vec![c(0.0, 1.5), c(0.0, -1.5)]);
        assert!(big_l(dim(3), c(0.0, 0.5), LRoute::GammaQuotient)
            .unwrap()
            .norm()
            .is_finite());
    }

    #[test]
    fn det_sh_unit_modulus() {
        assert_eq!(
            det_sh(dim(1), c(0.0, 0.0), &ContourPath::segment(c(0.0, 0.0), c(0.0, 0.0))).unwrap(),
            c(1.0, 0.0)
        );
        for n in [1, 3] {
            for &x in &[0.5, 1.0, 2.0, 5.0, 10.0] {
                let v = det_sh(dim(n), c(x, 0.0), &ContourPath::segment(c(0.0, 0.0), c(x, 0.0))).unwrap();
                assert!((v.norm() - 1.0).abs() < 1e-10, "n = {n}, z = {x}");
            }
        }
    }

    #[test]
    fn det_sh_matches_closed_form_phase() {
        let x = 2.0;
        let v = det_sh(dim(1), c(x, 0.0), &ContourPath::segment(c(0.0, 0.0), c(x, 0.0))).unwrap();
        let (i, _) = crate::quad::integrate_real(&|t| Ok(t * (PI * t).tanh()), 0.0, x, 1e-14, 4).unwrap();
        assert!((v - c(0.0, 2.0 * PI * i).exp()).norm() < 1e-12);
    }

    #[test]
    fn det_sh_contour_independent() {
        let z = c(0.0, -0.9);
        let o = c(0.0, 0.0);
        let straight = ContourPath::detoured(o, z, &l_poles(dim(1), 1.0), 0.1, Side::Upper).unwrap();
        let other_side = ContourPath::detoured(o, z, &l_poles(dim(1), 1.0), 0.1, Side::Lower).unwrap();
        let rectangle = ContourPath::polyline(&[o, c(1.0, 0.0), c(1.0, -0.9), z]);
        let a = det_sh(dim(1), z, &straight).unwrap();
        let b = det_sh(dim(1), z, &rectangle).unwrap();
        let d = det_sh(dim(1), z, &other_side).unwrap();
        assert!((a - b).norm() < 1e-9 * a.norm(), "{a} vs {b}");
        assert!((a - d).norm() < 1e-9 * a.norm(), "{a} vs {d}");
        assert!(matches!(
            det_sh(dim(1), z, &ContourPath::segment(o, z)),
            Err(Error::ContourThroughPole { .. })
        ));
        assert!(det_sh(dim(1), z, &ContourPath::segment(o, c(1.0, 0.0))).is_err());
    }

    #[test]
    fn zero_volume_values() {
        assert_eq!(zero_volume(dim(1), -1), 2.0 * PI);
        assert_eq!(zero_volume(dim(1), 0), 0.0);
        // (+1)·π^{5/2}·(-1) / Γ(5/2) with Γ(5/2) = 3√π/4
        let v = zero_volume(dim(3), -1);
        assert!((v + PI.powf(2.5) / (0.75 * PI.sqrt())).abs() < 1e-13);
        assert!(zero_volume(dim(5), -1) > 0.0);
        assert_eq!(weyl_leading_constant(dim(1), -1), 0.5);
    }

    #[test]
    fn zero_volume_matches_contour_exponent() {
        for n in [1, 3, 5] {
            let n = dim(n);
            let half = log_gamma(c(n.half(), 0.0)).unwrap().re.exp();
            for chi in -3..=3 {
                let lhs = PI.powf(-n.half()) * half / n.factorial() * (n.get() as f64) * zero_volume(n, chi);
                let rhs = n.sign() * 2.0 * PI * chi as f64 / n.factorial();
                assert!((lhs - rhs).abs() < 1e-12, "n = {n:?}, chi = {chi}: {lhs} vs {rhs}");
            }
        }
    }

    proptest! {
        #[test]
        fn l_routes_agree_off_axis(re in -6.0..6.0f64, im in -3.0..3.0f64) {
            let t = c(re, im);
            prop_assume!(l_poles(dim(3), 10.0).iter().all(|p| (t - p).norm() > 1e-2));
            let a = big_l(dim(3), t, LRoute::Polynomial).unwrap();
            let b = big_l(dim(3), t, LRoute::GammaQuotient).unwrap();
            prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
        }

        #[test]
        fn l_even(re in -8.0..8.0f64) {
            let a = big_l(dim(5), c(re, 0.0), LRoute::Polynomial).unwrap();
            let b = big_l(dim(5), c(-re, 0.0), LRoute::Polynomial).unwrap();
            prop_assert!((a - b).norm() <= 1e-15 * a.norm().max(1.0));
        }
    }
}
