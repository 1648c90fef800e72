//! Finite parts of integrals whose integrands blow up at a boundary with a
//! known expansion shape, and the 0-volumes built from them.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::schottky::SchottkyGroup;
use crate::specialfn::{zero_volume, OddDimension};

/// Fit residual allowed, relative to the leading coefficient.
pub const FIT_TOL: f64 = 1e-8;
/// Samples required per fitted coefficient.
pub const SAMPLES_PER_UNKNOWN: usize = 4;
/// Fit window `(0, x₀·WINDOW_FRACTION]`.
pub const WINDOW_FRACTION: f64 = 0.125;

/// `Σ_j Σ_{l ≤ k} c_{j,l} r^{e_j} (log r)^l + O(r^{remainder_order})`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSeries {
    exponents: Vec<Complex64>,
    log_depth: usize,
    /// `coefficients[j][l]` multiplies `r^{e_j} (log r)^l`.
    coefficients: Vec<Vec<Complex64>>,
    remainder_order: f64,
}

impl AsymptoticSeries {
    pub fn new(
        exponents: Vec<Complex64>,
        log_depth: usize,
        coefficients: Vec<Vec<Complex64>>,
        remainder_order: f64,
    ) -> Result<Self> {
        if exponents.windows(2).any(|w| !(w[0].re < w[1].re)) {
            return Err(Error::InvalidInput(
                "exponents must increase strictly in real part".into(),
            ));
        }
        if coefficients.len() != exponents.len() || coefficients.iter().any(|c| c.len() != log_depth + 1) {
            return Err(Error::InvalidInput(format!(
                "need {} rows of {} coefficients",
                exponents.len(),
                log_depth + 1
            )));
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !exponents.iter().all(finite) || !coefficients.iter().flatten().all(finite) {
            return Err(Error::InvalidInput("series entries must be finite".into()));
        }
        Ok(AsymptoticSeries {
            exponents,
            log_depth,
            coefficients,
            remainder_order,
        })
    }

    pub fn exponents(&self) -> &[Complex64] {
        &self.exponents
    }

    pub fn log_depth(&self) -> usize {
        self.log_depth
    }

    pub fn coefficients(&self) -> &[Vec<Complex64>] {
        &self.coefficients
    }

    pub fn remainder_order(&self) -> f64 {
        self.remainder_order
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// The explicit terms at `r > 0`.
    pub fn eval(&self, r: f64) -> Complex64 {
        let log = r.ln();
        self.exponents
            .iter()
            .zip(&self.coefficients)
            .map(|(e, row)| {
                let power = Complex64::new(r, 0.0).powc(*e);
                row.iter()
                    .enumerate()
                    .map(|(l, c)| c * log.powi(l as i32))
                    .sum::<Complex64>()
                    * power
            })
            .sum()
    }

    fn select(&self, keep: impl Fn(usize) -> bool, remainder_order: f64) -> AsymptoticSeries {
        let (exponents, coefficients) = self
            .exponents
            .iter()
            .zip(&self.coefficients)
            .enumerate()
            .filter(|(j, _)| keep(*j))
            .map(|(_, (e, c))| (*e, c.clone()))
            .unzip();
        AsymptoticSeries {
            exponents,
            log_depth: self.log_depth,
            coefficients,
            remainder_order,
        }
    }
}

/// The three parts of a series graded by `r^{-n-1+i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingRegSplit {
    /// Terms `i = 0, …, n-1`.
    pub singular: AsymptoticSeries,
    /// The term `i = n`, which belongs to neither part.
    pub critical: AsymptoticSeries,
    /// Terms `i > n` and the remainder.
    pub regular: AsymptoticSeries,
}

impl SingRegSplit {
    /// Merges the parts back into one series.
    pub fn reconstruct(&self) -> AsymptoticSeries {
        let mut rows: Vec<(Complex64, Vec<Complex64>)> = [&self.singular, &self.critical, &self.regular]
            .iter()
            .flat_map(|s| s.exponents.iter().copied().zip(s.coefficients.iter().cloned()))
            .collect();
        rows.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
        let (exponents, coefficients) = rows.into_iter().unzip();
        AsymptoticSeries {
            exponents,
            log_depth: self.regular.log_depth,
            coefficients,
            remainder_order: self.regular.remainder_order,
        }
    }
}

/// `[u]_sing` keeps `i < n`; `[u]_reg = u - Σ_{i ≤ n}`.
pub fn split_sing_reg(series: &AsymptoticSeries, n: OddDimension) -> Result<SingRegSplit> {
    let shift = n.get() as f64 + 1.0;
    let grades = series
        .exponents
        .iter()
        .map(|e| {
            let i = e.re + shift;
            if e.im != 0.0 || i.fract() != 0.0 || i < 0.0 {
                Err(Error::GradingMismatch(format!(
                    "exponent {e} is not -n-1+i with integer i ≥ 0 for n = {}",
                    n.get()
                )))
            } else {
                Ok(i as u64)
            }
        })
        .collect::<Result<Vec<u64>>>()?;
    let n = n.get() as u64;
    Ok(SingRegSplit {
        singular: series.select(|j| grades[j] < n, f64::INFINITY),
        critical: series.select(|j| grades[j] == n, f64::INFINITY),
        regular: series.select(|j| grades[j] > n, series.remainder_order),
    })
}

/// One fitted term `x^exponent (log x)^log_power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeTerm {
    pub exponent: f64,
    pub log_power: u32,
}

/// The declared expansion: each exponent with or without a companion log term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionShape {
    terms: Vec<ShapeTerm>,
}

impl ExpansionShape {
    /// `(exponent, has_log)` pairs; exponents strictly increasing.
    pub fn new(exponents: &[(f64, bool)]) -> Result<Self> {
        if exponents.is_empty() || exponents.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidInput(
                "shape exponents must be nonempty and increasing".into(),
            ));
        }
        let terms = exponents
            .iter()
            .flat_map(|&(e, log)| {
                let plain = ShapeTerm {
                    exponent: e,
                    log_power: 0,
                };
                let logged = ShapeTerm {
                    exponent: e,
                    log_power: 1,
                };
                std::iter::once(plain).chain(log.then_some(logged))
            })
            .collect();
        Ok(ExpansionShape { terms })
    }

    /// Integer powers `lo..=hi` without logs.
    pub fn powers(lo: i32, hi: i32) -> Self {
        let list: Vec<(f64, bool)> = (lo..=hi).map(|p| (p as f64, false)).collect();
        Self::new(&list).expect("nonempty increasing powers")
    }

    pub fn terms(&self) -> &[ShapeTerm] {
        &self.terms
    }

    fn leading(&self) -> f64 {
        self.terms[0].exponent
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledBoundaryFunction {
    xs: Vec<f64>,
    us: Vec<f64>,
    shape: ExpansionShape,
}

impl SampledBoundaryFunction {
    pub fn new(xs: Vec<f64>, us: Vec<f64>, shape: ExpansionShape) -> Result<Self> {
        if xs.len() != us.len() {
            return Err(Error::InvalidInput(format!(
                "{} x values but {} samples",
                xs.len(),
                us.len()
            )));
        }
        if xs.first().is_none_or(|&x| !(x > 0.0)) || xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput(
                "grid must be positive and strictly increasing".into(),
            ));
        }
        if !us.iter().all(|u| u.is_finite()) {
            return Err(Error::InvalidInput("samples must be finite".into()));
        }
        Ok(SampledBoundaryFunction { xs, us, shape })
    }

    /// Samples `f` on `count` geometrically spaced points of `[x₀·10⁻⁴, x₀]`.
    pub fn from_fn(f: impl Fn(f64) -> f64, x0: f64, count: usize, shape: ExpansionShape) -> Result<Self> {
        if !(x0 > 0.0) || count < 2 {
            return Err(Error::InvalidInput(format!(
                "need x0 > 0 and two samples, got {x0}, {count}"
            )));
        }
        let lo = x0 * 1e-4;
        let xs: Vec<f64> = (0..count)
            .map(|k| {
                if k + 1 == count {
                    x0
                } else {
                    lo * (x0 / lo).powf(k as f64 / (count - 1) as f64)
                }
            })
            .collect();
        let us = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, us, shape)
    }

    pub fn x0(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn us(&self) -> &[f64] {
        &self.us
    }

    pub fn shape(&self) -> &ExpansionShape {
        &self.shape
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinitePart {
    /// Constant term of `∫_t^{x₀} u x^w dx` as `t → 0`.
    pub value: f64,
    /// Coefficient of `log(1/t)`.
    pub log_coefficient: f64,
    /// Coefficient of `log²(1/t)`.
    pub log_squared_coefficient: f64,
    /// Fitted coefficients in the order of the shape terms.
    pub coefficients: Vec<f64>,
    /// Largest `|u - fit|·x^{-I}` on the window, relative to the largest `|u|·x^{-I}`.
    pub residual: f64,
    /// Upper end of the fit window, also the split point of the integral.
    pub split: f64,
    pub window_samples: usize,
}

/// Finite part of `∫_0^{x₀} u(x) x^weight dx` with the default window.
pub fn finite_part(f: &SampledBoundaryFunction, weight: f64) -> Result<FinitePart> {
    finite_part_with_window(f, weight, WINDOW_FRACTION)
}

/// Fits the declared shape by weighted least squares on `(0, x₀·fraction]`,
/// takes finite parts of the fitted terms there and integrates the samples
/// beyond.
pub fn finite_part_with_window(f: &SampledBoundaryFunction, weight: f64, fraction: f64) -> Result<FinitePart> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "window fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let terms = f.shape.terms();
    let window = f.xs.iter().take_while(|&&x| x <= f.x0() * fraction).count();
    let needed = SAMPLES_PER_UNKNOWN * terms.len();
    if window < needed {
        return Err(Error::WindowTooSmall {
            samples: window,
            needed,
        });
    }
    let split = f.xs[window - 1];
    let lead = f.shape.leading();

    // rows scaled by x^{-I}, columns by their largest entry
    let basis = |x: f64, t: &ShapeTerm| x.powf(t.exponent - lead) * x.ln().powi(t.log_power as i32);
    let mut a = DMatrix::from_fn(window, terms.len(), |i, j| basis(f.xs[i], &terms[j]));
    let scales: Vec<f64> = (0..terms.len())
        .map(|j| a.column(j).amax().max(f64::MIN_POSITIVE))
        .collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).unscale_mut(*s);
    }
    let b = DVector::from_iterator(window, (0..window).map(|i| f.us[i] * f.xs[i].powf(-lead)));
    let solved = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-15)
        .map_err(|e| Error::InvalidInput(format!("fit failed: {e}")))?;
    let coefficients: Vec<f64> = solved.iter().zip(&scales).map(|(c, s)| c / s).collect();
    let misfit = (&a * &solved - &b).amax();
    // the leading behaviour is read off the data, since a declared leading
    // coefficient may vanish
    let leading = b.amax();
    let residual = misfit / if leading > 0.0 { leading } else { 1.0 };
    if !(residual <= FIT_TOL) {
        return Err(Error::FitResidualTooLarge {
            residual,
            allowed: FIT_TOL,
        });
    }

    let mut value = integrate_samples(&f.xs[window - 1..], &f.us[window - 1..], weight);
    let mut log_coefficient = 0.0;
    let mut log_squared_coefficient = 0.0;
    for (c, t) in coefficients.iter().zip(terms) {
        let p = t.exponent + weight;
        let part = term_finite_part(p, t.log_power, split)?;
        value += c * part.value;
        log_coefficient += c * part.log;
        log_squared_coefficient += c * part.log_squared;
    }
    Ok(FinitePart {
        value,
        log_coefficient,
        log_squared_coefficient,
        coefficients,
        residual,
        split,
        window_samples: window,
    })
}

struct TermPart {
    value: f64,
    log: f64,
    log_squared: f64,
}

/// `FP ∫_0^s x^p (log x)^l dx` for `l ∈ {0, 1}`, with its `log(1/t)` powers.
fn term_finite_part(p: f64, l: u32, s: f64) -> Result<TermPart> {
    let ls = s.ln();
    let q = p + 1.0;
    // for q ≠ 0 the lower limit only produces pure powers of t (times log t)
    let (value, log, log_squared) = match (l, q == 0.0) {
        (0, false) => (s.powf(q) / q, 0.0, 0.0),
        (1, false) => (s.powf(q) * (ls / q - 1.0 / (q * q)), 0.0, 0.0),
        // ∫_t^s dx/x = log s + log(1/t)
        (0, true) => (ls, 1.0, 0.0),
        // ∫_t^s log x dx/x = (log² s - log² t)/2
        (1, true) => (0.5 * ls * ls, 0.0, -0.5),
        _ => return Err(Error::InvalidInput(format!("log power {l} unsupported"))),
    };
    Ok(TermPart {
        value,
        log,
        log_squared,
    })
}

/// Points per local interpolant in [`integrate_samples`].
const STENCIL: usize = 8;
const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// `∫ u x^w dx` over the sample range: degree-7 interpolation through
/// neighbouring samples, integrated exactly by four-point Gauss per interval.
fn integrate_samples(xs: &[f64], us: &[f64], weight: f64) -> f64 {
    let g: Vec<f64> = xs.iter().zip(us).map(|(x, u)| u * x.powf(weight)).collect();
    let n = xs.len();
    if n < STENCIL {
        return xs
            .windows(2)
            .zip(g.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum();
    }
    let mut total = 0.0;
    for i in 0..n - 1 {
        let j = i.saturating_sub(STENCIL / 2 - 1).min(n - STENCIL);
        let (a, b) = (xs[i], xs[i + 1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (node, w) in GAUSS4 {
            total += half * w * lagrange(&xs[j..j + STENCIL], &g[j..j + STENCIL], mid + half * node);
        }
    }
    total
}

fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    (0..xs.len())
        .map(|i| {
            let basis: f64 = (0..xs.len())
                .filter(|&k| k != i)
                .map(|k| (x - xs[k]) / (xs[i] - xs[k]))
                .product();
            ys[i] * basis
        })
        .sum()
}

/// Samples on the funnel grid; fine enough that twice as many change the
/// result by far less than the 1e-8 target.
pub const FUNNEL_SAMPLES: usize = 1200;

/// 0-volume of the funnel `[0, ∞) × S¹_ℓ` with metric `dr² + cosh²r dθ²`,
/// in the boundary-defining coordinate `x = 2e^{-r}`.
pub fn funnel_zero_volume(length: f64) -> Result<f64> {
    funnel_zero_volume_with(length, FUNNEL_SAMPLES, WINDOW_FRACTION)
}

pub fn funnel_zero_volume_with(length: f64, samples: usize, fraction: f64) -> Result<f64> {
    if !(length > 0.0) {
        return Err(Error::InvalidInput(format!(
            "boundary length must be positive, got {length}"
        )));
    }
    // area density ℓ cosh(r) |dr/dx| at r = log(2/x)
    let density = |x: f64| length * (2.0 / x).ln().cosh() / x;
    let sampled = SampledBoundaryFunction::from_fn(density, 2.0, samples, ExpansionShape::powers(-2, 3))?;
    Ok(finite_part_with_window(&sampled, 0.0, fraction)?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceVolume {
    /// Gauss–Bonnet area `-2πχ` of the convex core.
    pub core_area: f64,
    /// Renormalized volume of each funnel.
    pub funnels: Vec<f64>,
    pub total: f64,
    /// `0-vol` from the Euler-characteristic formula.
    pub formula: f64,
}

/// Tolerance between the geometric total and the Euler-characteristic formula.
pub const SURFACE_TOL: f64 = 1e-6;

/// 0-volume as core area plus funnel finite parts, checked against the formula.
pub fn surface_zero_volume(group: &SchottkyGroup) -> Result<SurfaceVolume> {
    let lengths = group
        .boundary_lengths()
        .ok_or_else(|| Error::InvalidInput("boundary lengths are only known for three-funnel groups".into()))?;
    let chi = group.chi();
    let core_area = -2.0 * PI * chi as f64;
    let funnels = lengths
        .iter()
        .map(|&l| funnel_zero_volume(l))
        .collect::<Result<Vec<_>>>()?;
    let total = core_area + funnels.iter().sum::<f64>();
    let formula = zero_volume(OddDimension::ONE, chi);
    let difference = (total - formula).abs();
    if !(difference <= SURFACE_TOL) {
        return Err(Error::InconsistentRoutes { difference });
    }
    Ok(SurfaceVolume {
        core_area,
        funnels,
        total,
        formula,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn one() -> OddDimension {
        OddDimension::ONE
    }

    #[test]
    fn split_simple_series() {
        // r^{-2} + 5 for n = 1
        let s = AsymptoticSeries::new(vec![c(-2.0), c(0.0)], 0, vec![vec![c(1.0)], vec![c(5.0)]], 1.0).unwrap();
        let split = split_sing_reg(&s, one()).unwrap();
        assert_eq!(split.singular.exponents(), &[c(-2.0)]);
        assert!(split.critical.is_empty());
        assert_eq!(split.regular.exponents(), &[c(0.0)]);
        assert_eq!(split.regular.coefficients()[0], vec![c(5.0)]);
        assert_eq!(split.reconstruct(), s);
    }

    #[test]
    fn split_only_high_term() {
        let s = AsymptoticSeries::new(vec![c(1.0)], 1, vec![vec![c(2.0), c(-1.0)]], 2.0).unwrap();
        let split = split_sing_reg(&s, one()).unwrap();
        assert!(split.singular.is_empty() && split.critical.is_empty());
        assert_eq!(split.regular, s);
    }

    #[test]
    fn split_rejects_bad_grading() {
        let s = AsymptoticSeries::new(vec![c(-1.5)], 0, vec![vec![c(1.0)]], 0.0).unwrap();
        assert!(matches!(split_sing_reg(&s, one()), Err(Error::GradingMismatch(_))));
        let s = AsymptoticSeries::new(vec![Complex64::new(-1.0, 0.5)], 0, vec![vec![c(1.0)]], 0.0).unwrap();
        assert!(matches!(split_sing_reg(&s, one()), Err(Error::GradingMismatch(_))));
        assert!(AsymptoticSeries::new(vec![c(0.0), c(0.0)], 0, vec![vec![c(1.0)]; 2], 1.0).is_err());
    }

    proptest! {
        #[test]
        fn split_round_trip(
            coeffs in proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 6),
            n in prop_oneof![Just(1u32), Just(3), Just(5)],
        ) {
            let n = OddDimension::new(n).unwrap();
            let exps: Vec<Complex64> = (0..6).map(|i| c(-(n.get() as f64) - 1.0 + i as f64)).collect();
            let rows: Vec<Vec<Complex64>> = coeffs.iter().map(|&(a, b)| vec![c(a), c(b)]).collect();
            let s = AsymptoticSeries::new(exps, 1, rows, 5.0 - n.get() as f64).unwrap();
            let split = split_sing_reg(&s, n).unwrap();
            prop_assert_eq!(split.singular.exponents().len(), n.get() as usize);
            prop_assert_eq!(split.critical.exponents().len(), 1);
            prop_assert_eq!(split.reconstruct(), s);
        }
    }

    fn sampled(f: impl Fn(f64) -> f64, shape: ExpansionShape) -> SampledBoundaryFunction {
        SampledBoundaryFunction::from_fn(f, 1.0, 600, shape).unwrap()
    }

    #[test]
    fn analytic_examples() {
        let shape = || ExpansionShape::powers(-2, 2);
        let fp = finite_part(&sampled(|x| x.powi(-2) + 1.0, shape()), 0.0).unwrap();
        assert!(fp.value.abs() < 1e-10, "{}", fp.value);
        let fp = finite_part(&sampled(|x| 1.0 / x, shape()), 0.0).unwrap();
        assert!(
            fp.value.abs() < 1e-10 && (fp.log_coefficient - 1.0).abs() < 1e-10,
            "{fp:?}"
        );
        let fp = finite_part(&sampled(|x| x.powi(-2) + 3.0 + x, shape()), 0.0).unwrap();
        assert!((fp.value - 2.5).abs() < 1e-10, "{}", fp.value);
    }

    #[test]
    fn logarithmic_terms_and_weights() {
        // ∫_t^1 (log x / x) dx = -log²t/2; ∫_t^1 x^{-1/2} log x dx = -4 + O(√t log t)
        let shape = ExpansionShape::new(&[(-1.0, true), (0.0, false), (1.0, false)]).unwrap();
        let fp = finite_part(&sampled(|x| x.ln() / x, shape), 0.0).unwrap();
        assert!(
            fp.value.abs() < 1e-9 && (fp.log_squared_coefficient + 0.5).abs() < 1e-9,
            "{fp:?}"
        );
        let shape = ExpansionShape::new(&[(0.5, true), (1.5, false)]).unwrap();
        let fp = finite_part(&sampled(|x| x.sqrt() * x.ln(), shape), -1.0).unwrap();
        assert!((fp.value + 4.0).abs() < 1e-9, "{}", fp.value);
    }

    #[test]
    fn regular_integrand_matches_plain_integral() {
        let fp = finite_part(&sampled(f64::cos, ExpansionShape::powers(0, 7)), 0.0).unwrap();
        assert!((fp.value - 1f64.sin()).abs() < 1e-10);
        assert_eq!(fp.log_coefficient, 0.0);
    }

    #[test]
    fn grid_refinement_stable() {
        let f = |x: f64| x.powi(-2) + (-x).exp();
        let shape = || ExpansionShape::powers(-2, 8);
        let coarse = SampledBoundaryFunction::from_fn(f, 1.0, 600, shape()).unwrap();
        let fine = SampledBoundaryFunction::from_fn(f, 1.0, 1200, shape()).unwrap();
        let (a, b) = (finite_part(&coarse, 0.0).unwrap(), finite_part(&fine, 0.0).unwrap());
        assert!((a.value - b.value).abs() < 1e-8);
        // -1 + (1 - e^{-1})
        assert!((b.value - (-(-1f64).exp())).abs() < 1e-9, "{}", b.value);
    }

    #[test]
    fn fit_errors() {
        // a 1/√x term the shape does not declare
        let bad = sampled(|x| x.powi(-2) + x.powf(-0.5), ExpansionShape::powers(-2, 2));
        assert!(matches!(finite_part(&bad, 0.0), Err(Error::FitResidualTooLarge { .. })));
        let short = SampledBoundaryFunction::from_fn(|x| x, 1.0, 20, ExpansionShape::powers(0, 3)).unwrap();
        assert!(matches!(finite_part(&short, 0.0), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn funnel_has_zero_volume() {
        for &l in &[0.5, 1.0, 6.0, 20.0] {
            let v = funnel_zero_volume(l).unwrap();
            assert!(v.abs() < 1e-8, "{l}: {v}");
        }
        let a = funnel_zero_volume_with(6.0, FUNNEL_SAMPLES, 0.125).unwrap();
        let b = funnel_zero_volume_with(6.0, FUNNEL_SAMPLES, 0.0625).unwrap();
        let c = funnel_zero_volume_with(6.0, 2 * FUNNEL_SAMPLES, 0.125).unwrap();
        assert!((a - b).abs() < 1e-8 && (a - c).abs() < 1e-8);
        assert!(funnel_zero_volume(0.0).is_err());
    }

    #[test]
    fn surface_volume() {
        let g = SchottkyGroup::three_funnel(6.0, 6.0, 6.0).unwrap();
        let v = surface_zero_volume(&g).unwrap();
        assert!((v.total - 2.0 * PI).abs() < 1e-6);
        assert_eq!(v.formula, 2.0 * PI);
        assert_eq!(v.core_area, zero_volume(OddDimension::ONE, g.chi()));
        assert_eq!(zero_volume(OddDimension::ONE, 1 - 3), 4.0 * PI);
    }
}
