//! Truncated Euler product `log Z(λ) = -Σ_γ Σ_m e^{-λ m l}/(m (1 - e^{-m l}))`.

use dashmap::DashMap;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tail::{CostZeta, WindowCosts, DEFAULT_WINDOW_DEPTH};
use crate::error::{Error, Result};
use crate::schottky::{inverse_letter, EnumerationConfig, Letter, Orientation, SchottkyGroup};

/// Required distance of `Re λ` from the exponent of convergence.
pub const CONVERGENCE_MARGIN: f64 = 0.05;

/// Classes per partial sum; fixed so sums do not depend on the thread count.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerConfig {
    pub l_max: f64,
    /// The `m`-sum stops at the first term smaller than this.
    pub term_tol: f64,
    pub orientation: Orientation,
    /// Lookahead of the path costs behind the tail bound.
    #[serde(default = "default_depth")]
    pub window_depth: usize,
}

fn default_depth() -> usize {
    DEFAULT_WINDOW_DEPTH
}

impl EulerConfig {
    pub fn new(l_max: f64, orientation: Orientation) -> Self {
        EulerConfig {
            l_max,
            term_tol: 1e-20,
            orientation,
            window_depth: DEFAULT_WINDOW_DEPTH,
        }
    }

    pub fn with_term_tol(mut self, term_tol: f64) -> Self {
        self.term_tol = term_tol;
        self
    }

    fn check(&self) -> Result<()> {
        if !(self.l_max > 0.0 && self.l_max.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "l_max must be positive, got {}",
                self.l_max
            )));
        }
        if !(self.term_tol > 0.0 && self.term_tol < 1.0) {
            return Err(Error::InvalidInput(format!(
                "term_tol must lie in (0, 1), got {}",
                self.term_tol
            )));
        }
        Ok(())
    }
}

/// `G_γ(m) = 1 - e^{-m l}`: `e^{-ml/2} |det(1 - P_γ^m)|^{1/2}` for the
/// Poincaré map with eigenvalues `e^{±l}`.
pub fn poincare_factor(length: f64, m: u32) -> f64 {
    -(-(m as f64) * length).exp_m1()
}

/// A truncated sum with a bound on everything left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerValue {
    pub value: Complex64,
    /// Bound on the classes beyond `l_max` plus the truncated `m`-sums.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy)]
struct ClassRecord {
    length: f64,
    /// Path costs of the class and of its inverse.
    costs: [f64; 2],
}

/// Classes whose lengths agree to `MERGE_TOL`, summed as one term.
#[derive(Debug, Clone, Copy)]
struct LengthGroup {
    length: f64,
    count: f64,
    width: f64,
}

/// Relative spread of lengths merged into one group; symmetric groups have
/// many classes of equal length, which this collapses.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct CostSums {
    /// Over the enumerated classes, both orientations.
    known: CostZeta,
    /// Over all classes, when the window matrix contracts.
    total: Option<CostZeta>,
}

/// Enumerated classes prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct EulerProduct {
    config: EulerConfig,
    delta: f64,
    classes: Vec<ClassRecord>,
    groups: Vec<LengthGroup>,
    window: WindowCosts,
    nodes_visited: u64,
    /// Keyed by the bits of `Re λ`.
    cost_sums: DashMap<u64, CostSums>,
}

#[derive(Clone, Copy, Default)]
struct Partial {
    value: Complex64,
    truncation: f64,
}

impl std::ops::Add for Partial {
    type Output = Partial;
    fn add(self, o: Partial) -> Partial {
        Partial {
            value: self.value + o.value,
            truncation: self.truncation + o.truncation,
        }
    }
}

fn merge(classes: &[ClassRecord]) -> Vec<LengthGroup> {
    let mut groups: Vec<LengthGroup> = Vec::new();
    for c in classes {
        match groups.last_mut() {
            Some(g) if c.length - g.length <= MERGE_TOL * c.length => {
                g.count += 1.0;
                g.width = c.length - g.length;
            }
            _ => groups.push(LengthGroup {
                length: c.length,
                count: 1.0,
                width: 0.0,
            }),
        }
    }
    groups
}

/// Bound on `|d/dl|` of either per-class series at `|λ|`, `Re λ = σ`.
fn length_sensitivity(length: f64, lambda: Complex64) -> f64 {
    let sigma = lambda.re;
    let g = poincare_factor(length, 1);
    (1.0 + length * (lambda.norm() + 1.0 / g)) * (-sigma * length).exp() / ((-(-sigma * length).exp_m1()).powi(2) * g)
}

impl EulerProduct {
    /// Enumerates the classes and estimates δ for the convergence check.
    pub fn new(group: &SchottkyGroup, config: EulerConfig) -> Result<Self> {
        let delta = group.estimate_delta(1e-10)?;
        Self::with_delta(group, config, delta)
    }

    pub fn with_delta(group: &SchottkyGroup, config: EulerConfig, delta: f64) -> Result<Self> {
        config.check()?;
        let window = WindowCosts::new(group, config.window_depth);
        let cfg = EnumerationConfig::new(config.l_max, Orientation::Unoriented);
        let (mut classes, nodes_visited) = group.map_classes(&cfg, &|word: &[Letter], length| {
            let inverse: Vec<Letter> = word.iter().rev().map(|&x| inverse_letter(x)).collect();
            ClassRecord {
                length,
                costs: [window.cyclic_cost(word), window.cyclic_cost(&inverse)],
            }
        })?;
        classes.sort_by(|a, b| {
            a.length
                .total_cmp(&b.length)
                .then(a.costs[0].total_cmp(&b.costs[0]))
                .then(a.costs[1].total_cmp(&b.costs[1]))
        });
        let groups = merge(&classes);
        Ok(EulerProduct {
            config,
            delta,
            classes,
            groups,
            window,
            nodes_visited,
            cost_sums: DashMap::new(),
        })
    }

    pub fn config(&self) -> &EulerConfig {
        &self.config
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Number of unoriented classes retained.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Number of distinct lengths after merging.
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn nodes_visited(&self) -> u64 {
        self.nodes_visited
    }

    /// Exponent above which the tail bound is finite.
    pub fn bound_exponent(&self) -> f64 {
        self.window.critical_exponent()
    }

    fn check_convergence(&self, lambda: Complex64) -> Result<()> {
        let threshold = self.delta + CONVERGENCE_MARGIN;
        if !(lambda.re > threshold) || !lambda.im.is_finite() {
            return Err(Error::OutsideConvergence {
                re: lambda.re,
                threshold,
            });
        }
        Ok(())
    }

    fn weight(&self) -> f64 {
        self.config.orientation.weight()
    }

    /// Sums `term(length)` over length groups in fixed chunks, adding the
    /// error of merging to the truncation.
    fn accumulate(&self, lambda: Complex64, term: &(dyn Fn(f64) -> (Complex64, f64) + Sync)) -> Partial {
        let partials: Vec<Partial> = self
            .groups
            .par_chunks(CHUNK)
            .map(|chunk| {
                chunk.iter().fold(Partial::default(), |acc, g| {
                    let (value, truncation) = term(g.length);
                    let merged = g.count * g.width * length_sensitivity(g.length, lambda);
                    acc + Partial {
                        value: value * g.count,
                        truncation: (truncation + merged) * g.count,
                    }
                })
            })
            .collect();
        partials.into_iter().fold(Partial::default(), |a, b| a + b)
    }

    fn cost_sums(&self, sigma: f64) -> CostSums {
        if let Some(s) = self.cost_sums.get(&sigma.to_bits()) {
            return *s;
        }
        let partials: Vec<CostZeta> = self
            .classes
            .par_chunks(CHUNK)
            .map(|chunk| {
                chunk.iter().flat_map(|c| c.costs).fold(CostZeta::default(), |acc, k| {
                    let z = CostZeta::class(sigma, k);
                    CostZeta {
                        log_sum: acc.log_sum + z.log_sum,
                        derivative_sum: acc.derivative_sum + z.derivative_sum,
                    }
                })
            })
            .collect();
        let known = partials.into_iter().fold(CostZeta::default(), |a, b| CostZeta {
            log_sum: a.log_sum + b.log_sum,
            derivative_sum: a.derivative_sum + b.derivative_sum,
        });
        let sums = CostSums {
            known,
            total: self.window.cost_zeta(sigma),
        };
        self.cost_sums.insert(sigma.to_bits(), sums);
        sums
    }

    /// `(1 - e^{-L})⁻¹` times the cost sum over oriented classes beyond the
    /// cutoff, halved for unoriented classes (both orientations share a length).
    fn beyond_cutoff(&self, total: f64, known: f64) -> f64 {
        // margin for rounding in the determinant, well above what the tests observe
        let excess = (total - known).max(0.0) + 1e-11 * total.abs();
        let share = match self.config.orientation {
            Orientation::Oriented => 1.0,
            Orientation::Unoriented => 0.5,
        };
        share * excess / (1.0 - (-self.config.l_max).exp())
    }

    /// `log Z(λ)` from the classes up to `l_max`.
    pub fn log_z(&self, lambda: Complex64) -> Result<EulerValue> {
        self.check_convergence(lambda)?;
        let tol = self.config.term_tol;
        let w = self.weight();
        let sum = self.accumulate(lambda, &|length| {
            let q = (-lambda * length).exp();
            let mut qm = q;
            let mut value = Complex64::new(0.0, 0.0);
            for m in 1.. {
                let term = qm / (m as f64 * poincare_factor(length, m));
                if term.norm() < tol {
                    // later terms shrink at least geometrically with ratio |q|
                    return (value, term.norm() / (1.0 - q.norm()));
                }
                value += term;
                qm *= q;
            }
            unreachable!()
        });
        let sums = self.cost_sums(lambda.re);
        let tail = match sums.total {
            Some(total) => self.beyond_cutoff(total.log_sum, sums.known.log_sum),
            None => f64::INFINITY,
        };
        Ok(EulerValue {
            value: -w * sum.value,
            tail_bound: tail + w * sum.truncation,
        })
    }

    /// `Z'/Z(λ) = Σ_γ Σ_m l e^{-λ m l}/(1 - e^{-m l})`, termwise.
    pub fn dlog_z(&self, lambda: Complex64) -> Result<EulerValue> {
        self.check_convergence(lambda)?;
        let tol = self.config.term_tol;
        let w = self.weight();
        let sum = self.accumulate(lambda, &|length| {
            let q = (-lambda * length).exp();
            let mut qm = q;
            let mut value = Complex64::new(0.0, 0.0);
            for m in 1.. {
                let term = length * qm / poincare_factor(length, m);
                if term.norm() < tol {
                    return (value, term.norm() / (1.0 - q.norm()));
                }
                value += term;
                qm *= q;
            }
            unreachable!()
        });
        let sums = self.cost_sums(lambda.re);
        let tail = match sums.total {
            Some(total) => self.beyond_cutoff(total.derivative_sum, sums.known.derivative_sum),
            None => f64::INFINITY,
        };
        Ok(EulerValue {
            value: w * sum.value,
            tail_bound: tail + w * sum.truncation,
        })
    }

    /// Evaluations at many points, in input order.
    pub fn log_z_grid(&self, lambdas: &[Complex64]) -> Vec<Result<EulerValue>> {
        lambdas.iter().map(|&l| self.log_z(l)).collect()
    }
}

/// One-shot `log Z(λ)`; prefer [`EulerProduct`] for repeated evaluation.
pub fn log_z_euler(group: &SchottkyGroup, lambda: Complex64, config: EulerConfig) -> Result<EulerValue> {
    EulerProduct::new(group, config)?.log_z(lambda)
}

/// One-shot `Z'/Z(λ)`.
pub fn dlog_z_euler(group: &SchottkyGroup, lambda: Complex64, config: EulerConfig) -> Result<EulerValue> {
    EulerProduct::new(group, config)?.dlog_z(lambda)
}
