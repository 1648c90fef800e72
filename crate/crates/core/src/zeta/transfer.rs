//! Bowen–Series transfer operator discretized by collocation.
//!
//! On the disk `D(b)` of each letter `b` the operator acts by
//! `(L_λ f)_b(z) = Σ_{a ≠ b⁻¹} (g_a'(z))^λ f_a(g_a z)`.
//! Functions on `D(a)` are represented by their values at `M` equally spaced
//! points of its boundary circle and evaluated inside through the barycentric
//! formula for roots of unity. Periodic orbits of the coding are cyclically
//! reduced words, so `det(I - L_λ)` equals the Selberg product over
//! oriented primitive classes.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::schottky::{inverse_letter, Letter, SchottkyGroup};

pub const DEFAULT_NODES: usize = 32;
pub const MIN_NODES: usize = 4;

/// Dense collocation matrix of `L_λ` for one spectral parameter.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    lambda: Complex64,
    nodes: usize,
    matrix: DMatrix<Complex64>,
    /// `log g_a'(z)` for row `(b, i)` and source block `a`; zero where the block is empty.
    log_weights: DMatrix<Complex64>,
}

impl TransferOperator {
    pub fn new(group: &SchottkyGroup, lambda: Complex64, nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::InvalidInput(format!(
                "need at least {MIN_NODES} nodes per disk, got {nodes}"
            )));
        }
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::InvalidInput(format!("lambda {lambda} is not finite")));
        }
        let letters = group.letter_count();
        let size = letters * nodes;
        let roots: Vec<Complex64> = (0..nodes)
            .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / nodes as f64))
            .collect();
        let mut matrix = DMatrix::<Complex64>::zeros(size, size);
        let mut log_weights = DMatrix::<Complex64>::zeros(size, letters);

        for b in 0..letters {
            let target = group.disk(b as Letter);
            for a in 0..letters {
                if b as Letter == inverse_letter(a as Letter) {
                    continue;
                }
                let g = group.element(a as Letter);
                let source = group.disk(a as Letter);
                // orient cz + d so its real part is positive along the whole disk
                let sign = (g.c() * target.center + g.d()).signum();
                for i in 0..nodes {
                    let z = target.center_point() + target.radius * roots[i];
                    let den = sign * (g.c() * z + g.d());
                    if !(den.re > 0.0) {
                        return Err(Error::BranchAmbiguity { disk: b, letter: a });
                    }
                    let log_derivative = -2.0 * den.ln();
                    let weight = (lambda * log_derivative).exp();
                    let row = b * nodes + i;
                    log_weights[(row, a)] = log_derivative;

                    let u = (g.apply_finite(z) - source.center_point()) / source.radius;
                    let um1 = u.powu(nodes as u32) - 1.0;
                    let scale = weight * um1 / nodes as f64;
                    for (j, &w) in roots.iter().enumerate() {
                        matrix[(row, a * nodes + j)] = scale * w / (u - w);
                    }
                }
            }
        }
        Ok(TransferOperator {
            lambda,
            nodes,
            matrix,
            log_weights,
        })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    fn identity_minus(&self) -> DMatrix<Complex64> {
        let n = self.matrix.nrows();
        DMatrix::<Complex64>::identity(n, n) - &self.matrix
    }

    /// `det(I - L_λ)` by partially pivoted LU.
    pub fn fredholm_det(&self) -> Complex64 {
        self.identity_minus().lu().determinant()
    }

    /// `d/dλ log det(I - L_λ) = -tr((I - L_λ)⁻¹ ∂_λ L_λ)`.
    pub fn log_det_derivative(&self) -> Result<Complex64> {
        let n = self.matrix.nrows();
        let mut derivative = self.matrix.clone();
        for row in 0..n {
            for col in 0..n {
                derivative[(row, col)] *= self.log_weights[(row, col / self.nodes)];
            }
        }
        let lu = self.identity_minus().lu();
        let solved = lu.solve(&derivative).ok_or_else(|| Error::ZetaZero(self.lambda))?;
        Ok(-solved.trace())
    }

    /// Determinant together with its logarithmic derivative.
    pub fn det_and_log_derivative(&self) -> Result<(Complex64, Complex64)> {
        Ok((self.fredholm_det(), self.log_det_derivative()?))
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let schur = nalgebra::Schur::try_new(self.matrix.clone(), 1e-15, 100_000)
            .ok_or_else(|| Error::InvalidInput("Schur iteration did not converge".into()))?;
        Ok(schur
            .eigenvalues()
            .map(|e| e.iter().copied().collect())
            .unwrap_or_default())
    }

    /// Eigenvalue of largest modulus, which at real `λ` is real and positive.
    pub fn leading_eigenvalue(&self) -> Result<f64> {
        let eig = self.eigenvalues()?;
        let lead = eig
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .ok_or_else(|| Error::InvalidInput("empty spectrum".into()))?;
        if self.lambda.im == 0.0 && (lead.im.abs() > 1e-8 * lead.norm() || lead.re <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "leading eigenvalue {lead} at real lambda is not positive real"
            )));
        }
        Ok(lead.re)
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let svd = self.matrix.clone().svd(false, false);
        let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Frobenius norm of the collocation matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }
}

/// Fredholm determinant at `nodes` together with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FredholmEstimate {
    pub value: Complex64,
    /// `|det(M) - det(2M)|`.
    pub change_on_doubling: f64,
    /// Smallest singular value of the collocation matrix.
    pub smallest_singular_value: f64,
}

/// `det(I - L_λ)`: approximates the Selberg zeta function anywhere in `C`.
pub fn fredholm_det(group: &SchottkyGroup, lambda: Complex64, nodes: usize) -> Result<Complex64> {
    Ok(TransferOperator::new(group, lambda, nodes)?.fredholm_det())
}

/// Like [`fredholm_det`], failing with `NotConverged` when doubling the node
/// count moves the value by more than `tol`.
pub fn fredholm_det_checked(
    group: &SchottkyGroup,
    lambda: Complex64,
    nodes: usize,
    tol: f64,
) -> Result<FredholmEstimate> {
    let op = TransferOperator::new(group, lambda, nodes)?;
    let value = op.fredholm_det();
    let fine = fredholm_det(group, lambda, 2 * nodes)?;
    let change = (value - fine).norm();
    if !(change <= tol) {
        return Err(Error::NotConverged { change, tol });
    }
    let smallest_singular_value = op.singular_values().last().copied().unwrap_or(0.0);
    Ok(FredholmEstimate {
        value,
        change_on_doubling: change,
        smallest_singular_value,
    })
}

/// Determinants on a grid of parameters, in input order.
pub fn fredholm_det_grid(group: &SchottkyGroup, lambdas: &[Complex64], nodes: usize) -> Vec<Result<Complex64>> {
    lambdas.par_iter().map(|&l| fredholm_det(group, l, nodes)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cylinder_zeta(lambda: Complex64, length: f64) -> Complex64 {
        // oriented product: g and g⁻¹ each contribute Π_k (1 - e^{-(λ+k)ℓ})
        let mut p = Complex64::new(1.0, 0.0);
        for k in 0..200 {
            p *= 1.0 - (-(lambda + k as f64) * length).exp();
        }
        p * p
    }

    #[test]
    fn cylinder_matches_closed_form() {
        let length = 2.0;
        let group = SchottkyGroup::cylinder(length).unwrap();
        for lambda in [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.3, 2.0),
            Complex64::new(-0.7, -1.5),
        ] {
            let det = fredholm_det(&group, lambda, 48).unwrap();
            let expected = cylinder_zeta(lambda, length);
            assert!(
                (det - expected).norm() < 1e-10 * expected.norm().max(1.0),
                "{lambda}: {det} vs {expected}"
            );
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let group = SchottkyGroup::three_funnel(6.0, 6.0, 6.0).unwrap();
        let l = Complex64::new(0.3, 4.0);
        let a = fredholm_det(&group, l, 24).unwrap();
        let b = fredholm_det(&group, l.conj(), 24).unwrap();
        assert!((a - b.conj()).norm() < 1e-13 * a.norm().max(1.0));
    }

    #[test]
    fn norm_decreases_with_re_lambda() {
        let group = SchottkyGroup::three_funnel(6.0, 6.0, 6.0).unwrap();
        let norms: Vec<f64> = [0.0, 0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&s| {
                let op = TransferOperator::new(&group, Complex64::new(s, 1.0), 16).unwrap();
                assert!(op.matrix().iter().all(|z| z.re.is_finite() && z.im.is_finite()));
                op.norm()
            })
            .collect();
        assert!(norms.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
    }

    #[test]
    fn perron_eigenvalue_positive() {
        let group = SchottkyGroup::three_funnel(6.0, 6.0, 6.0).unwrap();
        for s in [0.1, 0.3, 0.8] {
            let op = TransferOperator::new(&group, Complex64::new(s, 0.0), 16).unwrap();
            assert!(op.leading_eigenvalue().unwrap() > 0.0);
        }
    }

    #[test]
    fn log_derivative_matches_finite_difference() {
        let group = SchottkyGroup::three_funnel(5.0, 6.0, 7.0).unwrap();
        let l = Complex64::new(0.2, 1.3);
        let h = 1e-5;
        let op = TransferOperator::new(&group, l, 24).unwrap();
        let analytic = op.log_det_derivative().unwrap();
        let fp = fredholm_det(&group, l + h, 24).unwrap();
        let fm = fredholm_det(&group, l - h, 24).unwrap();
        let fd = (fp / fm).ln() / (2.0 * h);
        assert!(
            (analytic - fd).norm() < 1e-7 * analytic.norm().max(1.0),
            "{analytic} vs {fd}"
        );
    }

    #[test]
    fn too_few_nodes_rejected() {
        let group = SchottkyGroup::cylinder(1.0).unwrap();
        assert!(TransferOperator::new(&group, Complex64::new(1.0, 0.0), 3).is_err());
    }
}
