//! Schottky groups acting on the upper half-plane.
//!
//! A rank-`r` group is stored with its generators and one pair of closed
//! disks per generator. Letters index both: letter `2i` is `g_i`, letter
//! `2i + 1` is `g_i⁻¹`, and [`SchottkyGroup::disk`] of a letter is the disk
//! that letter maps the outside of its inverse's disk into.

mod enumerate;
pub(crate) use enumerate::disk_cost;
mod spec;

pub use enumerate::{
    EnumerationConfig, GeodesicClass, GeodesicLengths, LengthSpectrumEntry, Orientation, DEFAULT_NODE_BUDGET,
};
pub use spec::GroupSpec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{Disk, MoebiusElement};
use crate::zeta::TransferOperator;

/// Minimal Euclidean gap between distinct closed disks.
pub const DISK_GAP_TOL: f64 = 1e-9;

/// Allowed mismatch when checking that a generator maps circle onto circle.
pub const CIRCLE_IMAGE_TOL: f64 = 1e-9;

/// Generator index plus orientation, packed as `2 * generator + inverted`.
pub type Letter = u8;

#[inline]
pub fn inverse_letter(x: Letter) -> Letter {
    x ^ 1
}

/// Human-readable letter: `a, b, c, ...` for generators, upper case for inverses.
pub fn letter_symbol(x: Letter) -> char {
    let base = (b'a' + x / 2) as char;
    if x % 2 == 0 {
        base
    } else {
        base.to_ascii_uppercase()
    }
}

pub fn word_string(word: &[Letter]) -> String {
    word.iter().copied().map(letter_symbol).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchottkyGroup {
    generators: Vec<MoebiusElement>,
    /// `(D_i⁻, D_i⁺)` for each generator.
    disk_pairs: Vec<(Disk, Disk)>,
    /// Lengths of the boundary geodesics of the funnels, when the construction knows them.
    boundary_lengths: Option<Vec<f64>>,
}

impl SchottkyGroup {
    /// Assembles a group without validating it; see [`SchottkyGroup::validate`].
    pub fn from_parts(generators: Vec<MoebiusElement>, disk_pairs: Vec<(Disk, Disk)>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidInput(
                "a Schottky group needs at least one generator".into(),
            ));
        }
        if generators.len() != disk_pairs.len() {
            return Err(Error::InvalidInput(format!(
                "{} generators but {} disk pairs",
                generators.len(),
                disk_pairs.len()
            )));
        }
        if generators.len() > 13 {
            return Err(Error::InvalidInput("rank above 13 is not supported".into()));
        }
        Ok(SchottkyGroup {
            generators,
            disk_pairs,
            boundary_lengths: None,
        })
    }

    /// Group whose disks are the isometric disks `D_i⁻ = I(g_i)`, `D_i⁺ = I(g_i⁻¹)`.
    pub fn with_isometric_disks(generators: Vec<MoebiusElement>) -> Result<Self> {
        let disk_pairs = generators
            .iter()
            .map(|g| Ok((g.isometric_disk()?, g.inverse().isometric_disk()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(generators, disk_pairs)
    }

    /// Hyperbolic cylinder generated by one element of translation length `length`.
    pub fn cylinder(length: f64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::InvalidInput(format!("length must be positive, got {length}")));
        }
        let (s, c) = ((0.5 * length).sinh(), (0.5 * length).cosh());
        let g = MoebiusElement::new(c, s, s, c)?;
        let mut group = Self::with_isometric_disks(vec![g])?;
        group.boundary_lengths = Some(vec![length, length]);
        group.validate().into_result()?;
        Ok(group)
    }

    /// Rank-two group uniformizing the pair of pants with boundary lengths `l1, l2, l3`.
    ///
    /// `g_1` translates by `l1` along the axis `(-1, 1)`; `g_2` translates by `l2`
    /// along the concentric axis `(-R, R)` towards `-R`, with `R > 1` found by
    /// bisection so that `tr(g_1 g_2) = -2 cosh(l3/2)`.
    pub fn three_funnel(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        for (i, l) in [l1, l2, l3].into_iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "boundary length l{} = {l} must be positive",
                    i + 1
                )));
            }
        }
        let (ha, hb) = (0.5 * l1, 0.5 * l2);
        let g1 = MoebiusElement::new(ha.cosh(), ha.sinh(), ha.sinh(), ha.cosh())?;
        let g2_at = |r: f64| MoebiusElement::new(hb.cosh(), -r * hb.sinh(), -hb.sinh() / r, hb.cosh());
        let target = -2.0 * (0.5 * l3).cosh();
        let residual = |r: f64| -> Result<f64> { Ok(g1.compose(&g2_at(r)?).trace() - target) };

        let mut lo = 1.0;
        let mut hi = 2.0;
        if residual(lo)? <= 0.0 {
            return Err(Error::BisectionFailure("trace equation has no root with R > 1".into()));
        }
        let mut doublings = 0;
        while residual(hi)? > 0.0 {
            hi *= 2.0;
            doublings += 1;
            if doublings > 1000 || !hi.is_finite() {
                return Err(Error::BisectionFailure("could not bracket the axis radius".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if residual(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let radius = 0.5 * (lo + hi);
        let g2 = g2_at(radius)?;
        let product_trace = g1.compose(&g2).trace();
        let tol = 1e-9 * target.abs().max(1.0);
        if (product_trace - target).abs() > tol {
            return Err(Error::BisectionFailure(format!(
                "tr(g1 g2) = {product_trace}, wanted {target}"
            )));
        }
        let mut group = Self::with_isometric_disks(vec![g1, g2])?;
        group.boundary_lengths = Some(vec![l1, l2, l3]);
        group.validate().into_result()?;
        Ok(group)
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Euler characteristic `1 - rank` of the compactified quotient.
    pub fn chi(&self) -> i64 {
        1 - self.rank() as i64
    }

    pub fn generators(&self) -> &[MoebiusElement] {
        &self.generators
    }

    pub fn disk_pairs(&self) -> &[(Disk, Disk)] {
        &self.disk_pairs
    }

    pub fn boundary_lengths(&self) -> Option<&[f64]> {
        self.boundary_lengths.as_deref()
    }

    pub fn letter_count(&self) -> usize {
        2 * self.rank()
    }

    pub fn element(&self, x: Letter) -> MoebiusElement {
        let g = self.generators[(x / 2) as usize];
        if x % 2 == 0 {
            g
        } else {
            g.inverse()
        }
    }

    /// Disk containing the image of letter `x`: `D_i⁺` for `g_i`, `D_i⁻` for `g_i⁻¹`.
    pub fn disk(&self, x: Letter) -> Disk {
        let (minus, plus) = self.disk_pairs[(x / 2) as usize];
        if x % 2 == 0 {
            plus
        } else {
            minus
        }
    }

    /// Matrix product `g_{w_1} ··· g_{w_k}`.
    pub fn word_element(&self, word: &[Letter]) -> MoebiusElement {
        word.iter()
            .fold(MoebiusElement::IDENTITY, |acc, &x| acc.compose(&self.element(x)))
    }

    /// Checks disjointness, the circle-pairing property and hyperbolicity.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let letters = self.letter_count();
        for i in 0..letters {
            for j in (i + 1)..letters {
                let gap = self.disk(i as Letter).gap(&self.disk(j as Letter));
                checks.push(Check {
                    kind: CheckKind::DiskGap { first: i, second: j },
                    margin: gap - DISK_GAP_TOL,
                });
            }
        }
        for (i, g) in self.generators.iter().enumerate() {
            let (minus, plus) = self.disk_pairs[i];
            let mut worst = 0.0f64;
            let mut pole_inside = true;
            for k in 0..64 {
                let z = minus.boundary_point(2.0 * std::f64::consts::PI * k as f64 / 64.0);
                match g.apply(z.into()).finite() {
                    Some(w) => {
                        let mismatch = ((w - plus.center_point()).norm() - plus.radius).abs();
                        worst = worst.max(mismatch / plus.radius.max(1.0));
                    }
                    None => pole_inside = false,
                }
            }
            // the pole of g must sit inside D⁻ so that the outside lands inside D⁺
            if g.c().abs() > 0.0 {
                pole_inside &= minus.contains((-g.d() / g.c()).into());
            } else {
                pole_inside = false;
            }
            let margin = if pole_inside {
                CIRCLE_IMAGE_TOL - worst
            } else {
                -worst.max(1.0)
            };
            checks.push(Check {
                kind: CheckKind::CircleImage { generator: i },
                margin,
            });
            checks.push(Check {
                kind: CheckKind::Hyperbolic { generator: i },
                margin: g.trace().abs() - 2.0 - crate::mobius::HYPERBOLIC_TOL,
            });
        }
        ValidationReport { checks }
    }

    /// Hausdorff dimension of the limit set: the `s ∈ [0, 1)` where the leading
    /// eigenvalue of the real transfer operator equals 1, found by bisection.
    pub fn estimate_delta(&self, tol: f64) -> Result<f64> {
        self.estimate_delta_with_nodes(tol, crate::zeta::DEFAULT_NODES)
    }

    pub fn estimate_delta_with_nodes(&self, tol: f64, nodes: usize) -> Result<f64> {
        if !(tol >= 1e-10) {
            return Err(Error::InvalidInput(format!(
                "delta tolerance {tol} must be at least 1e-10"
            )));
        }
        let leading = |s: f64| -> Result<f64> { TransferOperator::new(self, s.into(), nodes)?.leading_eigenvalue() };
        let at_zero = leading(0.0)?;
        if (at_zero - 1.0).abs() <= tol {
            return Ok(0.0);
        }
        let at_one = leading(1.0)?;
        if !(at_zero > 1.0 && at_one < 1.0) {
            return Err(Error::NoBracketing { at_zero, at_one });
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if leading(mid)? > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckKind {
    DiskGap { first: usize, second: usize },
    CircleImage { generator: usize },
    Hyperbolic { generator: usize },
}

/// One validation check; it passes when `margin >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    #[serde(flatten)]
    pub kind: CheckKind,
    pub margin: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.margin >= 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// First failing check as an error, disk overlaps first.
    pub fn into_result(self) -> Result<()> {
        let mut failures: Vec<&Check> = self.failures().collect();
        failures.sort_by_key(|c| !matches!(c.kind, CheckKind::DiskGap { .. }));
        match failures.first() {
            None => Ok(()),
            Some(check) => Err(match check.kind {
                CheckKind::DiskGap { first, second } => Error::DiskOverlap {
                    first,
                    second,
                    gap: check.margin + DISK_GAP_TOL,
                },
                CheckKind::CircleImage { generator } => Error::InvalidInput(format!(
                    "generator {generator} does not map the outside of D⁻ onto the inside of D⁺ (mismatch {:e})",
                    CIRCLE_IMAGE_TOL - check.margin
                )),
                CheckKind::Hyperbolic { .. } => Error::NotHyperbolic {
                    trace: check.margin + 2.0 + crate::mobius::HYPERBOLIC_TOL,
                },
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_funnel_traces() {
        let g = SchottkyGroup::three_funnel(6.0, 6.0, 6.0).unwrap();
        let t = 2.0 * 3.0f64.cosh();
        assert!((g.element(0).trace().abs() - t).abs() < 1e-9);
        assert!((g.element(2).trace().abs() - t).abs() < 1e-9);
        assert!((g.word_element(&[0, 2]).trace().abs() - t).abs() < 1e-9);
        assert_eq!(g.chi(), -1);
        assert!(g.validate().passed());
    }

    #[test]
    fn three_funnel_round_trip() {
        let g = SchottkyGroup::three_funnel(5.0, 6.0, 7.0).unwrap();
        let l = |w: &[Letter]| g.word_element(w).translation_length().unwrap();
        assert!((l(&[0]) - 5.0).abs() < 1e-9);
        assert!((l(&[2]) - 6.0).abs() < 1e-9);
        assert!((l(&[0, 2]) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn short_boundaries_still_schottky() {
        // nested axes keep the isometric disks apart even for very short boundaries
        let g = SchottkyGroup::three_funnel(0.1, 0.1, 0.1).unwrap();
        let report = g.validate();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn side_by_side_axes_overlap() {
        // short boundaries with axes (-1, 1) and (2, 4): isometric disks intersect
        let g1 = MoebiusElement::hyperbolic_with_axis(-1.0, 1.0, 0.1).unwrap();
        let g2 = MoebiusElement::hyperbolic_with_axis(2.0, 4.0, 0.1).unwrap();
        assert!(matches!(
            SchottkyGroup::with_isometric_disks(vec![g1, g2])
                .unwrap()
                .validate()
                .into_result(),
            Err(Error::DiskOverlap { .. })
        ));
    }

    #[test]
    fn coincident_disks_reported() {
        let g1 = MoebiusElement::new(2.0, 3.0, 1.0, 2.0).unwrap();
        let d = g1.isometric_disk().unwrap();
        let group = SchottkyGroup::from_parts(vec![g1], vec![(d, d)]).unwrap();
        let report = group.validate();
        assert!(!report.passed());
        assert!(matches!(report.into_result(), Err(Error::DiskOverlap { .. })));
    }

    #[test]
    fn cylinder_passes() {
        let g = SchottkyGroup::cylinder(2.0).unwrap();
        assert!(g.validate().passed());
        assert_eq!(g.chi(), 0);
    }

    #[test]
    fn letters_and_disks() {
        let g = SchottkyGroup::three_funnel(6.0, 6.0, 6.0).unwrap();
        for x in 0..4u8 {
            let h = g.element(x);
            // pole of the letter lies in the disk of its inverse
            assert!(g.disk(inverse_letter(x)).contains((-h.d() / h.c()).into()));
            // attracting fixed point lies in the letter's own disk
            let (_, att) = h.fixed_points().unwrap();
            assert!(g.disk(x).contains(att.finite().unwrap()));
        }
        assert_eq!(word_string(&[0, 1, 2, 3]), "aAbB");
    }
}
