//! Zeros of `det(I - L_λ)` in a rectangle by the argument principle.
//!
//! The phase of the determinant is tracked along each edge, halving steps
//! until consecutive samples differ by less than an eighth of a turn. Boxes
//! with nonzero winding are bisected until the zeros are isolated, then
//! polished by Newton's method `λ ← λ - m / (log det)'`.

use dashmap::DashMap;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::transfer::TransferOperator;
use crate::error::{Error, Result};
use crate::schottky::SchottkyGroup;

/// Axis-parallel rectangle in the λ-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let all_finite = [re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite());
        if !all_finite || !(re_min < re_max && im_min < im_max) {
            return Err(Error::InvalidInput(format!(
                "rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}] is empty or not finite"
            )));
        }
        Ok(Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (self.re_min..=self.re_max).contains(&z.re) && (self.im_min..=self.im_max).contains(&z.im)
    }

    /// Distance from an interior point to the boundary (negative outside).
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        (z.re - self.re_min)
            .min(self.re_max - z.re)
            .min(z.im - self.im_min)
            .min(self.im_max - z.im)
    }

    pub fn expanded(&self, h: f64) -> Rect {
        Rect {
            re_min: self.re_min - h,
            re_max: self.re_max + h,
            im_min: self.im_min - h,
            im_max: self.im_max + h,
        }
    }

    /// Counter-clockwise corners starting at the lower left.
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn split(&self, fraction: f64) -> (Rect, Rect) {
        if self.width() >= self.height() {
            let x = self.re_min + fraction * self.width();
            (Rect { re_max: x, ..*self }, Rect { re_min: x, ..*self })
        } else {
            let y = self.im_min + fraction * self.height();
            (Rect { im_max: y, ..*self }, Rect { im_min: y, ..*self })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub location: Complex64,
    pub multiplicity: u32,
    /// Rectangle in which the zero was isolated.
    #[serde(rename = "box")]
    pub bbox: Rect,
}

/// Tuning of the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSearch {
    /// Nodes per disk of the transfer operator.
    pub nodes: usize,
    /// Newton stops once `|det| < tol`.
    pub tol: f64,
    /// Boxes are bisected until their longer side is at most this.
    pub isolation: f64,
}

impl ZeroSearch {
    pub fn new(nodes: usize, tol: f64) -> Self {
        ZeroSearch {
            nodes,
            tol,
            isolation: 0.25,
        }
    }
}

const INITIAL_SEGMENTS: usize = 4;
const MAX_EDGE_DEPTH: u32 = 40;
const MAX_STEP: f64 = std::f64::consts::FRAC_PI_4;
const NEWTON_STEPS: usize = 40;
/// Newton is tried on any box carrying at most this many zeros.
const NEWTON_WINDING: i64 = 3;
/// Outward shifts of the box, relative to its size, tried on a near miss.
const PERTURBATIONS: [f64; 4] = [1e-3, 3e-3, 1e-2, 3e-2];
const SPLITS: [f64; 5] = [0.5, 0.47, 0.53, 0.41, 0.59];
const BOUNDARY_TOL: f64 = 1e-6;

enum Edge {
    Change(f64),
    /// Phase tracking stalled near this point.
    NearMiss(Complex64),
}

/// Determinant and logarithmic derivative at one point.
#[derive(Clone, Copy)]
struct Sample {
    at: Complex64,
    value: Complex64,
    log_derivative: Complex64,
}

struct Finder<'a> {
    group: &'a SchottkyGroup,
    search: ZeroSearch,
    cache: DashMap<(u64, u64), Sample>,
}

impl Finder<'_> {
    fn sample(&self, at: Complex64) -> Result<Sample> {
        let key = (at.re.to_bits(), at.im.to_bits());
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let op = TransferOperator::new(self.group, at, self.search.nodes)?;
        let value = op.fredholm_det();
        let log_derivative = match op.log_det_derivative() {
            Ok(d) => d,
            Err(Error::ZetaZero(_)) => Complex64::new(f64::INFINITY, 0.0),
            Err(e) => return Err(e),
        };
        let s = Sample {
            at,
            value,
            log_derivative,
        };
        self.cache.insert(key, s);
        Ok(s)
    }

    fn det(&self, lambda: Complex64) -> Result<Complex64> {
        Ok(self.sample(lambda)?.value)
    }

    fn log_derivative(&self, lambda: Complex64) -> Result<Complex64> {
        TransferOperator::new(self.group, lambda, self.search.nodes)?.log_det_derivative()
    }

    /// Phase change from `a` to `b`. A step is accepted when it is small and
    /// agrees with the trapezoid prediction from the log-derivatives, which
    /// rules out whole turns hiding between the samples.
    fn track(&self, a: Sample, b: Sample, depth: u32) -> Result<Edge> {
        let ratio = b.value / a.value;
        let step = ratio.arg();
        let h = b.at - a.at;
        let (da, db) = (h * a.log_derivative, h * b.log_derivative);
        let predicted = 0.5 * (da + db).im;
        let smooth = da.norm() < 1.0 && db.norm() < 1.0 && (step - predicted).abs() < 0.1;
        if smooth && step.abs() < MAX_STEP && ratio.norm().ln().abs() < 1.0 {
            return Ok(Edge::Change(step));
        }
        let degenerate = a.value == Complex64::new(0.0, 0.0) || !ratio.is_finite();
        if depth >= MAX_EDGE_DEPTH || degenerate {
            return Ok(Edge::NearMiss(if a.value.norm() < b.value.norm() {
                a.at
            } else {
                b.at
            }));
        }
        let m = self.sample(0.5 * (a.at + b.at))?;
        let first = match self.track(a, m, depth + 1)? {
            Edge::Change(x) => x,
            miss => return Ok(miss),
        };
        match self.track(m, b, depth + 1)? {
            Edge::Change(x) => Ok(Edge::Change(first + x)),
            miss => Ok(miss),
        }
    }

    /// Total phase change of the determinant over `∂rect`, or a near-miss point.
    fn boundary_phase(&self, rect: &Rect) -> Result<Edge> {
        let corners = rect.corners();
        let mut points = Vec::with_capacity(4 * INITIAL_SEGMENTS + 1);
        for k in 0..4 {
            let (p, q) = (corners[k], corners[(k + 1) % 4]);
            for j in 0..INITIAL_SEGMENTS {
                points.push(p + (q - p) * (j as f64 / INITIAL_SEGMENTS as f64));
            }
        }
        points.push(corners[0]);
        let samples: Vec<Result<Sample>> = points.par_iter().map(|&z| self.sample(z)).collect();
        let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
        let mut total = 0.0;
        for pair in samples.windows(2) {
            match self.track(pair[0], pair[1], 0)? {
                Edge::Change(x) => total += x,
                miss => return Ok(miss),
            }
        }
        Ok(Edge::Change(total))
    }

    fn winding(&self, rect: &Rect) -> Result<std::result::Result<i64, Complex64>> {
        Ok(match self.boundary_phase(rect)? {
            Edge::Change(total) => {
                let raw = total / std::f64::consts::TAU;
                let n = raw.round();
                if (raw - n).abs() > 1e-3 {
                    return Err(Error::NonIntegerWinding { raw });
                }
                Ok(n as i64)
            }
            Edge::NearMiss(z) => Err(z),
        })
    }

    /// Newton distance `|f / f'|` to the nearest zero.
    fn newton_distance(&self, z: Complex64) -> Result<f64> {
        Ok(1.0 / self.log_derivative(z)?.norm())
    }

    /// Newton iteration for a zero of multiplicity `multiplicity`, continued
    /// past `|det| < tol` until the step stalls.
    fn newton(&self, start: Complex64, multiplicity: u32, rect: &Rect) -> Result<Option<Complex64>> {
        let mut z = start;
        let mut previous = f64::INFINITY;
        for _ in 0..NEWTON_STEPS {
            let d = match self.log_derivative(z) {
                Ok(d) => d,
                Err(Error::ZetaZero(_)) => break,
                Err(e) => return Err(e),
            };
            let step = multiplicity as f64 / d;
            if !step.is_finite() {
                break;
            }
            if step.norm() > previous {
                // diverging: the start is not in the basin of a cluster of this size
                return Ok(None);
            }
            previous = step.norm().max(1e-3 * rect.width().max(rect.height()));
            z -= step;
            if !rect.contains(z) {
                return Ok(None);
            }
            if step.norm() < 1e-14 * (1.0 + z.norm()) {
                break;
            }
        }
        Ok((self.det(z)?.norm() < self.search.tol).then_some(z))
    }

    /// Zeros inside `rect`, whose boundary is known to carry winding `n`.
    fn isolate(&self, rect: Rect, n: i64) -> Result<Vec<ZeroRecord>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        let size = rect.width().max(rect.height());
        if size <= self.search.isolation || n <= NEWTON_WINDING {
            if let Some(z) = self.newton(rect.center(), n as u32, &rect)? {
                // all n zeros coincide only if a tiny box around z already carries them
                let r = (1e-3 * size).max(1e-9);
                let probe = Rect::new(z.re - r, z.re + r, z.im - r, z.im + r)?;
                if matches!(self.winding(&probe)?, Ok(w) if w == n) {
                    return Ok(vec![ZeroRecord {
                        location: z,
                        multiplicity: n as u32,
                        bbox: rect,
                    }]);
                }
            }
            if size < 1e-10 {
                return Ok(vec![ZeroRecord {
                    location: rect.center(),
                    multiplicity: n as u32,
                    bbox: rect,
                }]);
            }
        }
        for fraction in SPLITS {
            let (left, right) = rect.split(fraction);
            let (wl, wr) = match (self.winding(&left)?, self.winding(&right)?) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            if wl + wr != n {
                continue;
            }
            let mut found = self.isolate(left, wl)?;
            found.extend(self.isolate(right, wr)?);
            return Ok(found);
        }
        Err(Error::BoundaryZero {
            location: rect.center(),
            distance: size,
        })
    }
}

/// All zeros of `det(I - L_λ)` in `rect` with multiplicities, sorted by
/// imaginary then real part.
pub fn find_zeros(group: &SchottkyGroup, rect: Rect, search: ZeroSearch) -> Result<Vec<ZeroRecord>> {
    let finder = Finder {
        group,
        search,
        cache: DashMap::new(),
    };
    let size = rect.width().max(rect.height());
    let mut last_miss = None;
    for shift in std::iter::once(0.0).chain(PERTURBATIONS) {
        let box_ = rect.expanded(shift * size);
        match finder.winding(&box_)? {
            Ok(n) => {
                let mut zeros = finder.isolate(box_, n)?;
                zeros.sort_by(|a, b| {
                    a.location
                        .im
                        .total_cmp(&b.location.im)
                        .then(a.location.re.total_cmp(&b.location.re))
                });
                return Ok(zeros);
            }
            Err(z) => last_miss = Some(z),
        }
    }
    let location = last_miss.unwrap_or(rect.center());
    let distance = finder.newton_distance(location).unwrap_or(0.0);
    Err(Error::BoundaryZero {
        location,
        distance: distance.min(BOUNDARY_TOL),
    })
}

/// Argument-principle winding of `det(I - L_λ)` around `∂rect`.
pub fn winding_number(group: &SchottkyGroup, rect: Rect, nodes: usize) -> Result<i64> {
    let finder = Finder {
        group,
        search: ZeroSearch::new(nodes, 0.0),
        cache: DashMap::new(),
    };
    match finder.winding(&rect)? {
        Ok(n) => Ok(n),
        Err(location) => Err(Error::BoundaryZero {
            location,
            distance: finder.newton_distance(location).unwrap_or(0.0),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn funnel() -> SchottkyGroup {
        SchottkyGroup::three_funnel(6.0, 6.0, 6.0).unwrap()
    }

    #[test]
    fn cylinder_zeros_are_known() {
        // det = Π (1 - e^{-(λ+k)ℓ})²: double zeros at λ = -k + 2πi j/ℓ
        let length = 2.0;
        let group = SchottkyGroup::cylinder(length).unwrap();
        let rect = Rect::new(-0.3, 0.3, -1.0, 4.0).unwrap();
        let zeros = find_zeros(&group, rect, ZeroSearch::new(24, 1e-12)).unwrap();
        let period = std::f64::consts::TAU / length;
        assert_eq!(zeros.len(), 2, "{zeros:?}");
        for (z, j) in zeros.iter().zip([0.0, 1.0]) {
            assert_eq!(z.multiplicity, 2);
            assert!((z.location - Complex64::new(0.0, j * period)).norm() < 1e-6, "{z:?}");
        }
    }

    #[test]
    fn no_zeros_right_of_delta() {
        let group = funnel();
        let rect = Rect::new(0.35, 1.5, -3.0, 3.0).unwrap();
        assert!(find_zeros(&group, rect, ZeroSearch::new(24, 1e-12)).unwrap().is_empty());
    }

    #[test]
    fn delta_is_a_simple_zero() {
        let group = funnel();
        let delta = group.estimate_delta(1e-10).unwrap();
        let rect = Rect::new(0.1, 0.3, -0.2, 0.2).unwrap();
        let zeros = find_zeros(&group, rect, ZeroSearch::new(32, 1e-13)).unwrap();
        assert_eq!(zeros.len(), 1, "{zeros:?}");
        assert_eq!(zeros[0].multiplicity, 1);
        assert!((zeros[0].location - delta).norm() < 1e-8, "{:?} vs {delta}", zeros[0]);
    }

    #[test]
    fn winding_equals_total_multiplicity() {
        let group = funnel();
        let rect = Rect::new(-0.7, 0.3, 0.5, 3.5).unwrap();
        let search = ZeroSearch::new(24, 1e-12);
        let zeros = find_zeros(&group, rect, search).unwrap();
        let total: u32 = zeros.iter().map(|z| z.multiplicity).sum();
        assert_eq!(winding_number(&group, rect, 24).unwrap(), total as i64);
        for z in &zeros {
            assert!(rect.contains(z.location));
        }
    }

    #[test]
    fn zeros_come_in_conjugate_pairs() {
        let group = funnel();
        let rect = Rect::new(-0.7, 0.3, -2.5, 2.5).unwrap();
        let zeros = find_zeros(&group, rect, ZeroSearch::new(24, 1e-12)).unwrap();
        for z in &zeros {
            assert!(
                zeros
                    .iter()
                    .any(|w| (w.location - z.location.conj()).norm() < 1e-6 && w.multiplicity == z.multiplicity),
                "{z:?} has no mirror in {zeros:?}"
            );
        }
    }
}
