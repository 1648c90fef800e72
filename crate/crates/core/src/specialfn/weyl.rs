use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::OddDimension;

/// Factor convention in the integrand `u Π_j (…)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeylForm {
    /// `(n/2 - j)² + u²`, matching the factors of `L(t)`.
    #[default]
    Squared,
    /// `n/2 - j + u²`, the literal factor form; kept for comparison only.
    PaperLiteral,
}

/// `t^{n+1} + Σ_{i=1}^{(n-1)/2} C_i t^{2i}` = `(n+1)∫₀^t u Π_j (…) du`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylPolynomial {
    pub n: OddDimension,
    pub form: WeylForm,
    /// `C_1, …, C_{(n-1)/2}` as exact rationals.
    pub coefficients: Vec<Ratio<i128>>,
}

impl WeylPolynomial {
    pub fn new(n: OddDimension, form: WeylForm) -> Self {
        let m = (n.get() as usize - 1) / 2;
        // product as a polynomial in v = u², lowest degree first
        let mut product = vec![Ratio::from_integer(1i128)];
        for j in 1..=m as i128 {
            let twice = n.get() as i128 - 2 * j;
            let constant = match form {
                WeylForm::Squared => Ratio::new(twice * twice, 4),
                WeylForm::PaperLiteral => Ratio::new(twice, 2),
            };
            let mut next = vec![Ratio::from_integer(0); product.len() + 1];
            for (k, p) in product.iter().enumerate() {
                next[k] += *p * constant;
                next[k + 1] += *p;
            }
            product = next;
        }
        // (n+1)∫₀^t u·v^k du = (n+1) t^{2k+2} / (2k+2); C_i comes from k = i - 1
        let scale = n.get() as i128 + 1;
        let coefficients = (1..=m)
            .map(|i| product[i - 1] * Ratio::new(scale, 2 * i as i128))
            .collect();
        WeylPolynomial { n, form, coefficients }
    }

    pub fn coefficient(&self, i: usize) -> Option<f64> {
        let c = self.coefficients.get(i.checked_sub(1)?)?;
        Some(*c.numer() as f64 / *c.denom() as f64)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t2 = t * t;
        let lower: f64 = (1..=self.coefficients.len())
            .map(|i| self.coefficient(i).unwrap() * t2.powi(i as i32))
            .sum();
        t.powi(self.n.get() as i32 + 1) + lower
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_real;

    fn poly(n: u32, form: WeylForm) -> WeylPolynomial {
        WeylPolynomial::new(OddDimension::new(n).unwrap(), form)
    }

    #[test]
    fn low_dimensions() {
        assert!(poly(1, WeylForm::Squared).coefficients.is_empty());
        assert_eq!(poly(3, WeylForm::Squared).coefficients, vec![Ratio::new(1, 2)]);
        // (6)∫ u(9/4 + u²)(1/4 + u²) du = t⁶ + (15/4)t⁴ + (27/16)t²
        assert_eq!(
            poly(5, WeylForm::Squared).coefficients,
            vec![Ratio::new(27, 16), Ratio::new(15, 4)]
        );
        // printed form, n = 3: 4∫ u(1/2 + u²) du = t⁴ + t²
        assert_eq!(
            poly(3, WeylForm::PaperLiteral).coefficients,
            vec![Ratio::from_integer(1)]
        );
    }

    #[test]
    fn coefficients_positive() {
        for n in [3, 5, 7] {
            assert!(poly(n, WeylForm::Squared)
                .coefficients
                .iter()
                .all(|c| *c > Ratio::from_integer(0)));
        }
    }

    #[test]
    fn matches_numerical_integral() {
        for n in [1u32, 3, 5, 7, 9] {
            let w = poly(n, WeylForm::Squared);
            let t = 1.7;
            let integrand = |u: f64| {
                Ok(u * (1..=(n - 1) / 2)
                    .map(|j| (n as f64 / 2.0 - j as f64).powi(2) + u * u)
                    .product::<f64>())
            };
            let (v, _) = integrate_real(&integrand, 0.0, t, 1e-13, 1).unwrap();
            let expected = (n + 1) as f64 * v;
            assert!((w.eval(t) - expected).abs() < 1e-11 * expected, "n = {n}");
        }
    }
}
