//! The spectral shift ξ of a Schottky surface and the determinants built from
//! it: `det S_X(1/2 + iz)`, `det P_k` and winding numbers of `det S_X`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use dashmap::DashMap;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{ContourPath, Side, DEFAULT_RADIUS};
use crate::error::{Error, Result};
use crate::quad;
use crate::schottky::{Orientation, SchottkyGroup};
use crate::specialfn::{
    big_l, check_endpoints, integrate_l, l_poles, log_gamma, weyl_leading_constant, weyl_polynomial, zero_volume,
    LRoute, OddDimension, WeylForm,
};
use crate::zeta::{
    fredholm_det, winding_number, EulerConfig, EulerProduct, Rect, TransferOperator, CONVERGENCE_MARGIN,
};

/// Largest `|Im|` tolerated in the raw value of `∂ξ` on the real axis.
pub const DXI_IMAG_TOL: f64 = 1e-9;
/// `|Z(n/2)|` above which `m(n/2) = 0` is accepted without a winding count.
pub const M_HALF_THRESHOLD: f64 = 1e-8;
/// Phase and functional-equation routes for `det S_X` must agree this well.
pub const ROUTE_TOL: f64 = 1e-5;
/// Distance from an integer allowed for a winding number.
pub const WINDING_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ZetaRoute {
    /// Euler sums when `δ < n/2 - 0.05`, the transfer operator otherwise.
    #[default]
    Auto,
    Euler,
    Fredholm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KreinConfig {
    pub route: ZetaRoute,
    /// Euler cutoff; chosen from `dxi_tol` when absent.
    pub euler_l_max: Option<f64>,
    /// Target for the a priori bound on the Euler-route error of `∂ξ`.
    pub dxi_tol: f64,
    /// Collocation nodes per disk for the transfer operator.
    pub nodes: usize,
    /// Absolute tolerance for ξ.
    pub quad_tol: f64,
}

impl Default for KreinConfig {
    fn default() -> Self {
        KreinConfig {
            route: ZetaRoute::Auto,
            euler_l_max: None,
            dxi_tol: 1e-8,
            nodes: 32,
            quad_tol: 1e-9,
        }
    }
}

/// `∂ξ(z)` with the discarded imaginary part and the Euler tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DxiValue {
    pub value: f64,
    pub raw_imag: f64,
    /// `None` on the Fredholm route.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetSx {
    pub z: Complex64,
    pub value: Complex64,
    /// `(-1)^{m(n/2)} e^{-2πiξ(z)}`, real `z` only.
    pub phase_route: Option<Complex64>,
    /// `Z(n/2-iz)/Z(n/2+iz) · det S_H(n/2+iz)^χ`.
    pub functional_route: Complex64,
    pub route_difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetPk {
    pub k: u32,
    pub value: Complex64,
    pub zeta_ratio: Complex64,
    /// `∫₀^k L(-it) dt` along the contour.
    pub integral: Complex64,
    pub contour: ContourPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisorRecord {
    pub center: Complex64,
    pub radius: f64,
    pub winding: i64,
    /// `(1/2πi)∮ d log det S_X` before rounding.
    pub raw: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylSample {
    pub t: f64,
    pub xi: f64,
    pub dxi: f64,
    /// `ξ(t) - c·(t^{n+1} + Σ C_i t^{2i})`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylReport {
    pub form: WeylForm,
    pub leading_constant: f64,
    pub samples: Vec<WeylSample>,
    /// `sup |r(t)| / t` over the grid.
    pub sup_residual_over_t: f64,
    /// Least-squares `r(t) ≈ slope·t + intercept`.
    pub residual_slope: f64,
    pub residual_intercept: f64,
    /// Fit `ξ ≈ a t² + b t + c` on the upper half of the range.
    pub quadratic_fit: [f64; 3],
    pub fit_range: (f64, f64),
    /// `|a - c| / |c|` for the fitted leading coefficient `a`.
    pub leading_relative_error: f64,
    /// `∂ξ > 0` on the fit range.
    pub increasing_on_fit_range: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Resolved {
    Euler,
    Fredholm,
}

/// Scalar scattering quantities of a surface `Γ\H²`.
#[derive(Debug)]
pub struct KreinEvaluator {
    group: SchottkyGroup,
    n: OddDimension,
    chi: i64,
    delta: f64,
    config: KreinConfig,
    route: Resolved,
    euler: Option<EulerProduct>,
    dxi_cache: DashMap<u64, DxiValue>,
    m_half: OnceLock<i64>,
}

impl KreinEvaluator {
    pub fn new(group: SchottkyGroup, config: KreinConfig) -> Result<Self> {
        let delta = group.estimate_delta(1e-10)?;
        Self::with_delta(group, config, delta)
    }

    pub fn with_delta(group: SchottkyGroup, config: KreinConfig, delta: f64) -> Result<Self> {
        if !(config.quad_tol > 0.0 && config.dxi_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        let n = OddDimension::ONE;
        let euler_ok = delta < n.half() - CONVERGENCE_MARGIN;
        let route = match config.route {
            ZetaRoute::Auto if euler_ok => Resolved::Euler,
            ZetaRoute::Auto | ZetaRoute::Fredholm => Resolved::Fredholm,
            ZetaRoute::Euler if euler_ok => Resolved::Euler,
            ZetaRoute::Euler => {
                return Err(Error::RouteUnavailable(format!(
                    "Euler sums need δ < {}, got δ = {delta}",
                    n.half() - CONVERGENCE_MARGIN
                )))
            }
        };
        let euler = match route {
            Resolved::Euler => Some(match config.euler_l_max {
                Some(l) => EulerProduct::with_delta(&group, EulerConfig::new(l, Orientation::Oriented), delta)?,
                None => euler_for_target(&group, delta, n.half(), PI * config.dxi_tol)?,
            }),
            Resolved::Fredholm => None,
        };
        Ok(KreinEvaluator {
            chi: group.chi(),
            group,
            n,
            delta,
            config,
            route,
            euler,
            dxi_cache: DashMap::new(),
            m_half: OnceLock::new(),
        })
    }

    pub fn group(&self) -> &SchottkyGroup {
        &self.group
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn chi(&self) -> i64 {
        self.chi
    }

    pub fn config(&self) -> &KreinConfig {
        &self.config
    }

    pub fn uses_euler(&self) -> bool {
        self.route == Resolved::Euler
    }

    /// Cutoff of the Euler sums, when that route is in use.
    pub fn euler_l_max(&self) -> Option<f64> {
        self.euler.as_ref().map(|e| e.config().l_max)
    }

    /// `Z'/Z(λ)` by the selected route, with a bound when one is available.
    pub fn dlog_z(&self, lambda: Complex64) -> Result<(Complex64, Option<f64>)> {
        match &self.euler {
            Some(e) if lambda.re > self.delta + CONVERGENCE_MARGIN => {
                let v = e.dlog_z(lambda)?;
                Ok((v.value, Some(v.tail_bound)))
            }
            _ => Ok((self.fredholm_dlog(lambda)?, None)),
        }
    }

    fn fredholm_dlog(&self, lambda: Complex64) -> Result<Complex64> {
        TransferOperator::new(&self.group, lambda, self.config.nodes)?.log_det_derivative()
    }

    fn zeta(&self, lambda: Complex64) -> Result<Complex64> {
        fredholm_det(&self.group, lambda, self.config.nodes)
    }

    /// `(1/2π)[Z'/Z(n/2+iz) + Z'/Z(n/2-iz) + π^{-n/2}Γ(n/2)/Γ(n)·L(z)·0-vol]`.
    pub fn dxi(&self, z: f64) -> Result<DxiValue> {
        if !z.is_finite() {
            return Err(Error::InvalidInput(format!("dxi at non-finite z = {z}")));
        }
        if let Some(v) = self.dxi_cache.get(&z.to_bits()) {
            return Ok(*v);
        }
        let h = self.n.half();
        let (a, ba) = self.dlog_z(Complex64::new(h, z))?;
        let (b, bb) = self.dlog_z(Complex64::new(h, -z))?;
        let volume_term = self.volume_coefficient()? * big_l(self.n, Complex64::new(z, 0.0), LRoute::Polynomial)?;
        let raw = (a + b + volume_term) / (2.0 * PI);
        if !(raw.im.abs() <= DXI_IMAG_TOL) {
            return Err(Error::InvalidInput(format!(
                "dxi({z}) has imaginary part {:e} above {DXI_IMAG_TOL:e}",
                raw.im
            )));
        }
        let value = DxiValue {
            value: raw.re,
            raw_imag: raw.im,
            bound: ba.zip(bb).map(|(x, y)| (x + y) / (2.0 * PI)),
        };
        self.dxi_cache.insert(z.to_bits(), value);
        Ok(value)
    }

    /// `π^{-n/2} Γ(n/2)/Γ(n) · 0-vol(X)`.
    fn volume_coefficient(&self) -> Result<f64> {
        let h = self.n.half();
        let log = -h * PI.ln() + log_gamma(Complex64::new(h, 0.0))?.re - log_gamma(Complex64::new(2.0 * h, 0.0))?.re;
        Ok(log.exp() * zero_volume(self.n, self.chi))
    }

    /// `ξ(t) = ∫₀^t ∂ξ`, adaptive to the configured tolerance.
    pub fn xi(&self, t: f64) -> Result<f64> {
        self.xi_between(0.0, t, self.config.quad_tol)
    }

    fn xi_between(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let initial = (2.0 * (b - a).abs()).ceil().max(1.0) as usize;
        let q = quad::integrate_parallel(&|z| Ok(Complex64::new(self.dxi(z)?.value, 0.0)), a, b, tol, initial)?;
        Ok(q.value.re)
    }

    /// ξ at many points, accumulated from 0 so each stretch is integrated once;
    /// the tolerance is split in proportion to length.
    pub fn xi_grid(&self, ts: &[f64]) -> Result<Vec<f64>> {
        let mut order: Vec<usize> = (0..ts.len()).collect();
        order.sort_by(|&i, &j| ts[i].total_cmp(&ts[j]));
        let span = ts.iter().fold(0f64, |m, t| m.max(t.abs()));
        let mut out = vec![0.0; ts.len()];
        if span == 0.0 {
            return Ok(out);
        }
        // positive and negative points accumulate separately from 0
        for sign in [1.0, -1.0] {
            let mut at = 0.0;
            let mut acc = 0.0;
            let mut idx: Vec<usize> = order.iter().copied().filter(|&i| ts[i] * sign > 0.0).collect();
            if sign < 0.0 {
                idx.reverse();
            }
            for i in idx {
                let t = ts[i];
                acc += self.xi_between(at, t, self.config.quad_tol * (t - at).abs() / span)?;
                at = t;
                out[i] = acc;
            }
        }
        Ok(out)
    }

    /// The order of the zero of `Z` at `n/2`, verified once.
    pub fn m_half(&self) -> Result<i64> {
        if let Some(m) = self.m_half.get() {
            return Ok(*m);
        }
        let h = self.n.half();
        let value = self.zeta(Complex64::new(h, 0.0))?;
        let m = if value.norm() > M_HALF_THRESHOLD {
            0
        } else {
            let r = 1e-3;
            winding_number(&self.group, Rect::new(h - r, h + r, -r, r)?, self.config.nodes)?
        };
        Ok(*self.m_half.get_or_init(|| m))
    }

    fn check_m_half(&self, m_half: i64) -> Result<()> {
        let m = self.m_half()?;
        if m != m_half {
            return Err(Error::InvalidInput(format!(
                "m_half = {m_half} but Z has a zero of order {m} at n/2"
            )));
        }
        Ok(())
    }

    /// Straight path `0 → z` with detours around the poles of `L` it meets.
    pub fn default_contour(&self, z: Complex64) -> Result<ContourPath> {
        ContourPath::detoured(
            Complex64::new(0.0, 0.0),
            z,
            &l_poles(self.n, z.norm() + 1.0),
            DEFAULT_RADIUS,
            Side::Upper,
        )
    }

    /// `Z(n/2-iz)/Z(n/2+iz) · det S_H(n/2+iz)^χ` along the given contour.
    pub fn det_sx_functional(&self, z: Complex64, contour: &ContourPath) -> Result<Complex64> {
        check_endpoints(contour, z)?;
        let h = self.n.half();
        let i = Complex64::i();
        let denominator = self.zeta(h + i * z)?;
        if denominator.norm() == 0.0 {
            return Err(Error::ZetaZero(h + i * z));
        }
        let ratio = self.zeta(h - i * z)? / denominator;
        let integral = if z == Complex64::new(0.0, 0.0) {
            Complex64::new(0.0, 0.0)
        } else {
            integrate_l(self.n, contour)?
        };
        let exponent = Complex64::new(0.0, -2.0 * PI * self.n.sign() * self.chi as f64 / self.n.factorial()) * integral;
        Ok(ratio * exponent.exp())
    }

    /// `(-1)^{m(n/2)} e^{-2πiξ(z)}` for real `z`.
    pub fn det_sx_phase(&self, z: f64, m_half: i64) -> Result<Complex64> {
        self.check_m_half(m_half)?;
        let sign = if m_half % 2 == 0 { 1.0 } else { -1.0 };
        Ok(sign * Complex64::new(0.0, -2.0 * PI * self.xi(z)?).exp())
    }

    /// `det S_X(n/2 + iz)`; on the real axis both routes are computed and
    /// must agree to `ROUTE_TOL`.
    pub fn det_sx(&self, z: Complex64, m_half: i64) -> Result<DetSx> {
        self.check_m_half(m_half)?;
        let functional = self.det_sx_functional(z, &self.default_contour(z)?)?;
        let (phase_route, route_difference) = if z.im == 0.0 {
            let phase = self.det_sx_phase(z.re, m_half)?;
            let difference = (phase - functional).norm() / functional.norm();
            if !(difference <= ROUTE_TOL) {
                return Err(Error::InconsistentRoutes { difference });
            }
            (Some(phase), Some(difference))
        } else {
            (None, None)
        };
        Ok(DetSx {
            z,
            value: functional,
            phase_route,
            functional_route: functional,
            route_difference,
        })
    }

    /// Path `0 → k` on the real axis around the half-integer poles of `L(-it)`.
    pub fn pk_contour(&self, k: u32, radius: f64, side: Side) -> Result<ContourPath> {
        ContourPath::detoured(
            Complex64::new(0.0, 0.0),
            Complex64::new(k as f64, 0.0),
            &self.pk_poles(k as f64 + 1.0),
            radius,
            side,
        )
    }

    /// Poles of `t ↦ L(-it)`: the poles `s` of `L` sit at `t = is`.
    fn pk_poles(&self, reach: f64) -> Vec<Complex64> {
        l_poles(self.n, reach).into_iter().map(|s| Complex64::i() * s).collect()
    }

    /// `[Z(n/2-k)/Z(n/2+k)] exp(2π(-1)^{(n+3)/2}/Γ(n+1) · χ ∫₀^k L(-it) dt)`.
    pub fn det_pk(&self, k: u32, contour: &ContourPath) -> Result<DetPk> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be a positive integer".into()));
        }
        check_endpoints(contour, Complex64::new(k as f64, 0.0))?;
        contour.check_avoids(&self.pk_poles(contour.reach() + contour.radius()))?;
        let h = self.n.half();
        let denominator = self.zeta(Complex64::new(h + k as f64, 0.0))?;
        if !(denominator.norm() > f64::MIN_POSITIVE) {
            return Err(Error::ZetaZero(Complex64::new(h + k as f64, 0.0)));
        }
        let zeta_ratio = self.zeta(Complex64::new(h - k as f64, 0.0))? / denominator;
        let i = Complex64::i();
        let integral = contour
            .integrate(&|t| big_l(self.n, -i * t, LRoute::Polynomial), 1e-12)?
            .value;
        // (-1)^{(n+3)/2} = -(-1)^{(n+1)/2}
        let exponent = -2.0 * PI * self.n.sign() / self.n.factorial() * self.chi as f64 * integral;
        Ok(DetPk {
            k,
            value: zeta_ratio * exponent.exp(),
            zeta_ratio,
            integral,
            contour: contour.clone(),
        })
    }

    /// `d/dz log det S_X(n/2 + iz)`.
    fn dlog_det_sx(&self, z: Complex64) -> Result<Complex64> {
        let h = self.n.half();
        let i = Complex64::i();
        let a = self.fredholm_dlog(h - i * z)?;
        let b = self.fredholm_dlog(h + i * z)?;
        let l = big_l(self.n, z, LRoute::Polynomial)?;
        Ok(-i * (a + b) + Complex64::new(0.0, -2.0 * PI * self.n.sign() * self.chi as f64 / self.n.factorial()) * l)
    }

    /// Periodic trapezoid rule on the circle, doubled until stable.
    fn circle_winding(&self, center: Complex64, radius: f64) -> Result<Complex64> {
        let mut previous: Option<Complex64> = None;
        let mut n = 64;
        while n <= 4096 {
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
                // dz = i r e^{iθ} dθ
                sum += self.dlog_det_sx(center + radius * e)? * Complex64::i() * radius * e;
            }
            let raw = sum * (2.0 * PI / n as f64) / (2.0 * PI * Complex64::i());
            if let Some(p) = previous {
                if (raw - p).norm() < 1e-6 {
                    return Ok(raw);
                }
            }
            previous = Some(raw);
            n *= 2;
        }
        Ok(previous.unwrap())
    }

    /// Winding of `det S_X` around a circle, nudging the radius if the circle
    /// runs too close to a zero or pole.
    pub fn divisor_at(&self, center: Complex64, radius: f64) -> Result<DivisorRecord> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
        }
        let mut worst = 0.0;
        for factor in [1.0, 1.05, 0.95, 1.1, 0.9] {
            let r = radius * factor;
            let raw = match self.circle_winding(center, r) {
                Ok(raw) => raw,
                Err(Error::PoleAt(_)) | Err(Error::ZetaZero(_)) => continue,
                Err(e) => return Err(e),
            };
            let winding = raw.re.round();
            let off = (raw - winding).norm();
            if off <= WINDING_TOL {
                return Ok(DivisorRecord {
                    center,
                    radius: r,
                    winding: winding as i64,
                    raw,
                });
            }
            worst = off;
        }
        Err(Error::NonIntegerWinding { raw: worst })
    }

    /// Winding of `det S_X` around the boundary of a rectangle in the `z` plane.
    pub fn divisor_in_rect(&self, rect: Rect) -> Result<DivisorRecord> {
        let corners = [
            Complex64::new(rect.re_min, rect.im_min),
            Complex64::new(rect.re_max, rect.im_min),
            Complex64::new(rect.re_max, rect.im_max),
            Complex64::new(rect.re_min, rect.im_max),
            Complex64::new(rect.re_min, rect.im_min),
        ];
        let path = ContourPath::polyline(&corners);
        let total = path.integrate(&|z| self.dlog_det_sx(z), 1e-7)?.value;
        let raw = total / (2.0 * PI * Complex64::i());
        let winding = raw.re.round();
        if (raw - winding).norm() > WINDING_TOL {
            return Err(Error::NonIntegerWinding {
                raw: (raw - winding).norm(),
            });
        }
        Ok(DivisorRecord {
            center: rect.center(),
            radius: 0.5 * rect.width().hypot(rect.height()),
            winding: winding as i64,
            raw,
        })
    }

    /// Compares ξ with the Weyl polynomial on `samples` points of `[5, T]`.
    pub fn weyl_check(&self, t_max: f64, samples: usize, form: WeylForm) -> Result<WeylReport> {
        if !(self.delta < self.n.half()) {
            return Err(Error::InvalidInput(format!(
                "Weyl check needs δ < n/2, got δ = {}",
                self.delta
            )));
        }
        if !(t_max >= 5.0) || samples < 4 {
            return Err(Error::InvalidInput(format!(
                "need T ≥ 5 and at least 4 samples, got T = {t_max}, {samples}"
            )));
        }
        let ts: Vec<f64> = (0..samples)
            .map(|i| 5.0 + (t_max - 5.0) * i as f64 / (samples - 1) as f64)
            .collect();
        let xis = self.xi_grid(&ts)?;
        let leading = weyl_leading_constant(self.n, self.chi);
        let poly = weyl_polynomial(self.n, form);
        let mut out = Vec::with_capacity(samples);
        for (&t, &xi) in ts.iter().zip(&xis) {
            out.push(WeylSample {
                t,
                xi,
                dxi: self.dxi(t)?.value,
                residual: xi - leading * poly.eval(t),
            });
        }
        let sup = out.iter().map(|s| s.residual.abs() / s.t).fold(0.0, f64::max);
        let linear = least_squares(&out.iter().map(|s| (s.t, s.residual)).collect::<Vec<_>>(), 1)?;
        let fit_range = (0.5 * t_max, t_max);
        let upper: Vec<(f64, f64)> = out.iter().filter(|s| s.t >= fit_range.0).map(|s| (s.t, s.xi)).collect();
        let quadratic = least_squares(&upper, 2)?;
        let increasing = out.iter().filter(|s| s.t >= fit_range.0).all(|s| s.dxi > 0.0);
        Ok(WeylReport {
            form,
            leading_constant: leading,
            samples: out,
            sup_residual_over_t: sup,
            residual_slope: linear[1],
            residual_intercept: linear[0],
            quadratic_fit: [quadratic[2], quadratic[1], quadratic[0]],
            fit_range,
            leading_relative_error: (quadratic[2] - leading).abs() / leading.abs(),
            increasing_on_fit_range: increasing,
        })
    }
}

/// Polynomial least squares, coefficients lowest degree first.
fn least_squares(points: &[(f64, f64)], degree: usize) -> Result<Vec<f64>> {
    if points.len() <= degree {
        return Err(Error::WindowTooSmall {
            samples: points.len(),
            needed: degree + 1,
        });
    }
    let a = DMatrix::from_fn(points.len(), degree + 1, |i, j| points[i].0.powi(j as i32));
    let b = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let x = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidInput(format!("least squares failed: {e}")))?;
    Ok(x.iter().copied().collect())
}

/// Euler cutoff grown until the a priori bound on `Z'/Z` at `Re λ = σ` meets `target`.
fn euler_for_target(group: &SchottkyGroup, delta: f64, sigma: f64, target: f64) -> Result<EulerProduct> {
    let mut l_max = 30.0;
    for _ in 0..8 {
        let euler = EulerProduct::with_delta(group, EulerConfig::new(l_max, Orientation::Oriented), delta)?;
        let bound = euler.dlog_z(Complex64::new(sigma, 0.0))?.tail_bound;
        if bound <= target {
            return Ok(euler);
        }
        let rate = sigma - euler.bound_exponent();
        if !(rate > 0.0) || !bound.is_finite() {
            return Err(Error::RouteUnavailable(format!(
                "Euler tail bound does not decay at Re λ = {sigma}"
            )));
        }
        // the bound decays like e^{-(σ - s*) L} up to polynomial factors
        l_max += ((bound / target).ln() / rate).max(1.0) + 1.0;
    }
    Err(Error::RouteUnavailable(format!(
        "Euler tail above {target:e} after raising l_max to {l_max}"
    )))
}
