//! A priori bound on the part of the Euler product beyond the length cutoff.
//!
//! Along the periodic orbit of a cyclic word `x_1 x_2 …`, the point where
//! `g_{x_i}'` is evaluated lies in `x_{i+1} ⋯ x_{i+p-1} D(x_{i+p})`, so each
//! letter contributes at least a cost depending on the next `p` letters, and
//! the geodesic length of a cyclically reduced word is at least the cost of
//! the closed path it traces in the graph of length-`p` windows. With
//! `B_s[u][v] = e^{-s cost(u → v)}` and `ρ(B_s) < 1`,
//!
//! `-log det(I - B_s) = Σ_k tr B_s^k / k = -Σ_γ log(1 - e^{-s cost(γ)})`
//!
//! over oriented primitive classes, so subtracting the enumerated classes
//! leaves an upper bound for everything beyond the cutoff.

use nalgebra::{DMatrix, DVector};

use crate::mobius::{Disk, MoebiusElement};
use crate::schottky::{disk_cost, inverse_letter, Letter, SchottkyGroup};

/// Window depth used when none is requested; `2r(2r-1)^{p-1}` states.
pub const DEFAULT_WINDOW_DEPTH: usize = 3;

#[derive(Debug, Clone)]
pub struct WindowCosts {
    depth: usize,
    letters: usize,
    size: usize,
    /// Cost of window `x_0 … x_p` indexed by its base-`letters` code.
    table: Vec<f64>,
    /// `(from, to, cost)` for every admissible shift of the window.
    edges: Vec<(usize, usize, f64)>,
    critical: f64,
}

/// `-log det(I - B_s)` and its `s`-derivative with the sign flipped, both
/// nonnegative sums over oriented primitive classes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostZeta {
    /// `Σ_γ -log(1 - e^{-s cost})`.
    pub log_sum: f64,
    /// `Σ_γ cost e^{-s cost} / (1 - e^{-s cost})`.
    pub derivative_sum: f64,
}

impl CostZeta {
    /// Contribution of one class of the given path cost.
    pub fn class(s: f64, cost: f64) -> Self {
        let e = (-s * cost).exp();
        CostZeta {
            log_sum: -(-e).ln_1p(),
            derivative_sum: cost * e / (1.0 - e),
        }
    }
}

impl WindowCosts {
    pub fn new(group: &SchottkyGroup, depth: usize) -> Self {
        let depth = depth.max(1);
        let letters = group.letter_count() as Letter;
        let mut states: Vec<Vec<Letter>> = (0..letters).map(|x| vec![x]).collect();
        for _ in 1..depth {
            states = states
                .iter()
                .flat_map(|w| {
                    let last = *w.last().unwrap();
                    (0..letters).filter(move |&y| y != inverse_letter(last)).map(move |y| {
                        let mut v = w.clone();
                        v.push(y);
                        v
                    })
                })
                .collect();
        }
        let n = letters as usize;
        let index: std::collections::HashMap<usize, usize> =
            states.iter().enumerate().map(|(i, s)| (encode(s, n), i)).collect();
        let mut table = vec![f64::INFINITY; n.pow(depth as u32 + 1)];
        let mut edges = Vec::new();
        for (from, s) in states.iter().enumerate() {
            let last = *s.last().unwrap();
            let inner = group.word_element(&s[1..]);
            let head = group.element(s[0]);
            for y in (0..letters).filter(|&y| y != inverse_letter(last)) {
                // window x_0 … x_p = s ++ [y]; evaluation disk for g_{x_0}
                let cost = disk_cost(&head, &image_disk(&inner, &group.disk(y)));
                table[encode(s, n) * n + y as usize] = cost;
                let next = (encode(&s[1..], n)) * n + y as usize;
                edges.push((from, index[&next], cost));
            }
        }
        let mut costs = WindowCosts {
            depth,
            letters: n,
            size: states.len(),
            table,
            edges,
            critical: f64::INFINITY,
        };
        costs.critical = costs.find_critical();
        costs
    }

    fn matrix(&self, s: f64) -> DMatrix<f64> {
        let mut b = DMatrix::<f64>::zeros(self.size, self.size);
        for &(i, j, c) in &self.edges {
            b[(i, j)] = (-s * c).exp();
        }
        b
    }

    /// `x ≥ 0` solving `(I - B_s) x = 1` certifies `ρ(B_s) < 1` (M-matrix criterion).
    fn contracting(&self, s: f64) -> bool {
        let a = DMatrix::<f64>::identity(self.size, self.size) - self.matrix(s);
        a.lu()
            .solve(&DVector::from_element(self.size, 1.0))
            .is_some_and(|x| x.iter().all(|v| *v > 0.0 && v.is_finite()))
    }

    /// Exponent where the spectral radius of `B_s` crosses 1; an upper bound on δ.
    fn find_critical(&self) -> f64 {
        if self.edges.iter().any(|e| !(e.2 > 0.0)) {
            return f64::INFINITY;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while !self.contracting(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e3 {
                return f64::INFINITY;
            }
        }
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if self.contracting(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    pub fn critical_exponent(&self) -> f64 {
        self.critical
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Cost of the closed path traced by a cyclically reduced word; a lower
    /// bound on the length of its geodesic.
    pub fn cyclic_cost(&self, word: &[Letter]) -> f64 {
        let k = word.len();
        let n = self.letters;
        (0..k)
            .map(|i| {
                let code = (0..=self.depth).fold(0usize, |acc, j| acc * n + word[(i + j) % k] as usize);
                self.table[code]
            })
            .sum()
    }

    /// Sums over all oriented primitive classes; `None` unless `s` exceeds the
    /// critical exponent.
    pub fn cost_zeta(&self, s: f64) -> Option<CostZeta> {
        if !(s > self.critical) || !self.contracting(s) {
            return None;
        }
        let b = self.matrix(s);
        let lu = (DMatrix::<f64>::identity(self.size, self.size) - &b).lu();
        let det = lu.determinant();
        if !(det > 0.0) {
            return None;
        }
        let mut weighted = b;
        for &(i, j, c) in &self.edges {
            weighted[(i, j)] *= c;
        }
        let derivative_sum = lu.solve(&weighted)?.trace();
        Some(CostZeta {
            log_sum: -det.ln(),
            derivative_sum,
        })
    }
}

fn encode(word: &[Letter], base: usize) -> usize {
    word.iter().fold(0, |acc, &x| acc * base + x as usize)
}

/// Image of a disk under `g`, whose pole lies outside the disk.
fn image_disk(g: &MoebiusElement, disk: &Disk) -> Disk {
    let p = g.apply_finite((disk.center - disk.radius).into()).re;
    let q = g.apply_finite((disk.center + disk.radius).into()).re;
    Disk {
        center: 0.5 * (p + q),
        radius: 0.5 * (p - q).abs(),
    }
}
