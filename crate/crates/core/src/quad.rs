//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Panels allowed before giving up.
pub const MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    /// Sum of `|K15 - G7|` over the final panels.
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn panel(f: &(dyn Fn(f64) -> Result<Complex64> + Sync), a: f64, b: f64, parallel: bool) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let points: Vec<f64> = (0..15)
        .map(|i| match i {
            0..=6 => c - h * XGK[i],
            7 => c,
            _ => c + h * XGK[14 - i],
        })
        .collect();
    let values: Vec<Result<Complex64>> = if parallel {
        points.par_iter().map(|&x| f(x)).collect()
    } else {
        points.iter().map(|&x| f(x)).collect()
    };
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (i, v) in values.iter().enumerate() {
        let k = if i <= 7 { i } else { 14 - i };
        kronrod += WGK[k] * v;
        if k % 2 == 1 {
            gauss += WG[k / 2] * v;
        }
    }
    let (kronrod, gauss) = (kronrod * h, gauss * h);
    if !(kronrod.re.is_finite() && kronrod.im.is_finite()) {
        return Err(Error::QuadratureFailure {
            estimate: f64::INFINITY,
            tol: 0.0,
        });
    }
    Ok(Panel {
        a,
        b,
        value: kronrod,
        error: (kronrod - gauss).norm(),
    })
}

/// `∫_a^b f` to absolute tolerance `tol`, bisecting the worst panel first.
/// `initial` equal panels seed the subdivision.
pub fn integrate(
    f: &(dyn Fn(f64) -> Result<Complex64> + Sync),
    a: f64,
    b: f64,
    tol: f64,
    initial: usize,
) -> Result<Quadrature> {
    adaptive(f, a, b, tol, initial, false)
}

/// As [`integrate`], evaluating the nodes of each panel in parallel.
pub fn integrate_parallel(
    f: &(dyn Fn(f64) -> Result<Complex64> + Sync),
    a: f64,
    b: f64,
    tol: f64,
    initial: usize,
) -> Result<Quadrature> {
    adaptive(f, a, b, tol, initial, true)
}

fn adaptive(
    f: &(dyn Fn(f64) -> Result<Complex64> + Sync),
    a: f64,
    b: f64,
    tol: f64,
    initial: usize,
    parallel: bool,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let n = initial.max(1);
    let mut panels = (0..n)
        .map(|i| {
            let lo = a + (b - a) * i as f64 / n as f64;
            let hi = a + (b - a) * (i + 1) as f64 / n as f64;
            panel(f, lo, hi, parallel)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut evaluations = 15 * n;
    loop {
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= tol {
            let value = panels.iter().fold(Complex64::new(0.0, 0.0), |s, p| s + p.value);
            return Ok(Quadrature {
                value,
                error,
                evaluations,
            });
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureFailure { estimate: error, tol });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a.min(p.b) && mid < p.a.max(p.b)) {
            return Err(Error::QuadratureFailure { estimate: error, tol });
        }
        panels[worst] = panel(f, p.a, mid, parallel)?;
        panels.insert(worst + 1, panel(f, mid, p.b, parallel)?);
        evaluations += 30;
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real(
    f: &(dyn Fn(f64) -> Result<f64> + Sync),
    a: f64,
    b: f64,
    tol: f64,
    initial: usize,
) -> Result<(f64, f64)> {
    let q = integrate(&|x| f(x).map(|v| Complex64::new(v, 0.0)), a, b, tol, initial)?;
    Ok((q.value.re, q.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = integrate_real(&|x| Ok(x.powi(20) - 3.0 * x), 0.0, 1.0, 1e-14, 1).unwrap();
        assert!((q.0 - (1.0 / 21.0 - 1.5)).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_integral() {
        let q = integrate(&|x| Ok(Complex64::new(0.0, 30.0 * x).exp()), 0.0, 2.0, 1e-12, 1).unwrap();
        let exact = (Complex64::new(0.0, 60.0).exp() - 1.0) / Complex64::new(0.0, 30.0);
        assert!((q.value - exact).norm() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_refined() {
        let (v, _) = integrate_real(&|x| Ok(x.sqrt()), 0.0, 1.0, 1e-10, 1).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn parallel_matches_serial() {
        let f = |x: f64| Ok(Complex64::new(x.sin(), (3.0 * x).cos()));
        let a = integrate(&f, 0.0, 7.0, 1e-12, 2).unwrap();
        let b = integrate_parallel(&f, 0.0, 7.0, 1e-12, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let (v, _) = integrate_real(&|x| Ok(x.exp()), 1.0, 0.0, 1e-13, 1).unwrap();
        assert!((v + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn nonintegrable_fails() {
        let err = integrate_real(&|x| Ok(1.0 / x), 0.0, 1.0, 1e-10, 1).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }
}
