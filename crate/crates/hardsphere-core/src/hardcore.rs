//! The conditional exclusion constraint, its Hamiltonian form, boundary
//! conditions, and a packing bound on the size of admissible configurations.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{distance_sq, Configuration, InteractionRadius, Point, Region};

/// A fixed configuration outside a region, constraining the model inside it
/// within interaction range.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCondition {
    points: Configuration,
    region_of_validity: Region,
}

impl BoundaryCondition {
    /// Checks every point against the region; a point inside is an error.
    pub fn new(points: Configuration, region_of_validity: Region) -> Result<Self> {
        if points.points().iter().any(|p| region_of_validity.contains(p)) {
            return Err(Error::BoundaryInsideRegion);
        }
        Ok(BoundaryCondition { points, region_of_validity })
    }

    /// The empty (free) boundary condition.
    pub fn free(region_of_validity: Region) -> Self {
        BoundaryCondition { points: Configuration::empty(), region_of_validity }
    }

    pub fn points(&self) -> &Configuration {
        &self.points
    }

    pub fn region_of_validity(&self) -> &Region {
        &self.region_of_validity
    }

    /// Drop points further than `r` from the region's base box. Outputs of
    /// every operation are unchanged under this restriction (only points in
    /// range can interact); with identical seeds they are bitwise identical.
    pub fn restricted_to_ring(&self, r: InteractionRadius) -> Self {
        let base = self.region_of_validity.base();
        let kept: Vec<Point> = self
            .points
            .points()
            .iter()
            .filter(|p| base.distance_sq_to(p) <= r.value() * r.value())
            .cloned()
            .collect();
        BoundaryCondition {
            points: Configuration::from_sorted_unchecked(kept),
            region_of_validity: self.region_of_validity.clone(),
        }
    }
}

/// The conditional exclusion indicator: 1 iff every pair within `y` and
/// every cross pair `y x c` is at distance strictly greater than `r`.
/// The empty configuration always satisfies it.
pub fn is_hard_core(
    y: &Configuration,
    c: &Configuration,
    r: InteractionRadius,
) -> Result<bool> {
    if y.points().iter().any(|p| c.contains_point(p)) {
        return Err(Error::ConfigurationsOverlap);
    }
    Ok(hard_core_unchecked(y.points(), c.points(), r))
}

/// Hot-path variant without the disjointness check; inputs are disjoint by
/// construction in the samplers.
pub(crate) fn hard_core_unchecked(y: &[Point], c: &[Point], r: InteractionRadius) -> bool {
    let r2 = r.value() * r.value();
    for (i, p) in y.iter().enumerate() {
        for q in &y[i + 1..] {
            if distance_sq(p, q) <= r2 {
                return false;
            }
        }
        for q in c {
            if distance_sq(p, q) <= r2 {
                return false;
            }
        }
    }
    true
}

/// Pair check of one extra point against a condition; the short-circuit of
/// the thinning probability.
pub(crate) fn point_admissible(x: &Point, cond: &[Point], r: InteractionRadius) -> bool {
    let r2 = r.value() * r.value();
    cond.iter().all(|q| distance_sq(x, q) > r2)
}

/// Hamiltonian of `x` under condition `c`: 0 if the exclusion constraint
/// holds, +inf otherwise, so that exp(-H) equals the indicator exactly.
pub fn hamiltonian(x: &Configuration, c: &Configuration, r: InteractionRadius) -> Result<f64> {
    Ok(if is_hard_core(x, c, r)? { 0.0 } else { f64::INFINITY })
}

/// Whether the chaining identity of the conditional constraint holds on a
/// triple: the indicator of `x ∪ y` under `z` must equal the product of the
/// indicator of `x` under `y ∪ z` and of `y` under `z`. Test-suite aid.
pub fn chain_identity_check(
    x: &Configuration,
    y: &Configuration,
    z: &Configuration,
    r: InteractionRadius,
) -> Result<bool> {
    let xy = x.union_disjoint(y)?;
    let yz = y.union_disjoint(z)?;
    let lhs = is_hard_core(&xy, z, r)?;
    let rhs = is_hard_core(x, &yz, r)? && is_hard_core(y, z, r)?;
    Ok(lhs == rhs)
}

/// Upper bound on the cardinality of admissible configurations in a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeBound {
    Finite(u64),
    /// `r = 0` puts no bound on configuration size.
    Unbounded,
}

impl SizeBound {
    pub fn finite(self) -> Option<u64> {
        match self {
            SizeBound::Finite(n) => Some(n),
            SizeBound::Unbounded => None,
        }
    }
}

/// Packing bound: cells of side `r / sqrt(d)` have diameter `r`, so an
/// admissible configuration holds at most one point per cell. The bound
/// counts cells that can intersect the region: every cell of the base box,
/// minus cells entirely inside a removed ball, minus cells missing some
/// restricted ball union. Both cell tests are exact for axis-aligned cells
/// and closed balls. Monotone under removing balls from the region.
pub fn hs_size_bound(region: &Region, r: InteractionRadius) -> SizeBound {
    let base = region.base();
    if base.is_empty() || region.restricted_groups().iter().any(Vec::is_empty) {
        return SizeBound::Finite(0);
    }
    if r.value() == 0.0 {
        return SizeBound::Unbounded;
    }
    let d = base.dim();
    let side = r.value() / crate::fmath::sqrt(d as f64);
    let mut counts: Vec<u64> = Vec::with_capacity(d);
    let mut total: u128 = 1;
    for (lo, hi) in base.lo().iter().zip(base.hi()) {
        let n = ((hi - lo) / side) as u64 + 1;
        counts.push(n);
        total = total.saturating_mul(n as u128);
    }
    if total > 100_000_000 {
        // the guard only needs finiteness; an over-count stays a valid bound
        return SizeBound::Finite(total.min(u64::MAX as u128) as u64);
    }

    let mut idx = alloc::vec![0u64; d];
    let mut bound = 0u64;
    'cells: loop {
        let cell_lo: Vec<f64> = idx
            .iter()
            .zip(base.lo())
            .map(|(i, lo)| lo + *i as f64 * side)
            .collect();
        let cell_hi: Vec<f64> = cell_lo
            .iter()
            .zip(base.hi())
            .map(|(a, hi)| (a + side).min(*hi))
            .collect();

        let mut alive = true;
        for ball in region.removed_balls() {
            if cell_inside_ball(&cell_lo, &cell_hi, ball.center.coords(), ball.radius) {
                alive = false;
                break;
            }
        }
        if alive {
            for group in region.restricted_groups() {
                if !group.iter().any(|b| {
                    cell_touches_ball(&cell_lo, &cell_hi, b.center.coords(), b.radius)
                }) {
                    alive = false;
                    break;
                }
            }
        }
        if alive {
            bound += 1;
        }

        for k in 0..d {
            idx[k] += 1;
            if idx[k] < counts[k] {
                continue 'cells;
            }
            idx[k] = 0;
        }
        break;
    }
    SizeBound::Finite(bound)
}

/// Cell fully inside a closed ball: the farthest cell corner is within the
/// radius.
fn cell_inside_ball(lo: &[f64], hi: &[f64], center: &[f64], radius: f64) -> bool {
    let mut far2 = 0.0;
    for ((a, b), c) in lo.iter().zip(hi).zip(center) {
        let da = (c - a).abs();
        let db = (c - b).abs();
        let m = da.max(db);
        far2 += m * m;
    }
    far2 <= radius * radius
}

/// Cell intersects a closed ball: the nearest cell point is within the
/// radius.
fn cell_touches_ball(lo: &[f64], hi: &[f64], center: &[f64], radius: f64) -> bool {
    let mut near2 = 0.0;
    for ((a, b), c) in lo.iter().zip(hi).zip(center) {
        let gap = if c < a {
            a - c
        } else if c > b {
            c - b
        } else {
            0.0
        };
        near2 += gap * gap;
    }
    near2 <= radius * radius
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Ball;
    use alloc::vec;

    fn cfg(coords: &[&[f64]]) -> Configuration {
        Configuration::new(coords.iter().map(|c| Point::new(c).unwrap()).collect()).unwrap()
    }

    fn radius(r: f64) -> InteractionRadius {
        InteractionRadius::new(r).unwrap()
    }

    #[test]
    fn empty_is_always_admissible() {
        let c = cfg(&[&[0.0], &[0.4]]);
        assert!(is_hard_core(&Configuration::empty(), &c, radius(1.0)).unwrap());
    }

    #[test]
    fn close_pair_violates() {
        let y = cfg(&[&[0.0, 0.0], &[0.5, 0.0]]);
        assert!(!is_hard_core(&y, &Configuration::empty(), radius(1.0)).unwrap());
        let y = cfg(&[&[0.0, 0.0]]);
        let c = cfg(&[&[2.0, 0.0]]);
        assert!(is_hard_core(&y, &c, radius(1.0)).unwrap());
    }

    #[test]
    fn distance_exactly_r_violates() {
        // strict constraint: |x - y| > R
        let y = cfg(&[&[0.0], &[1.0]]);
        assert!(!is_hard_core(&y, &Configuration::empty(), radius(1.0)).unwrap());
    }

    #[test]
    fn overlap_is_an_error() {
        let y = cfg(&[&[0.5]]);
        let c = cfg(&[&[0.5], &[0.9]]);
        assert_eq!(is_hard_core(&y, &c, radius(0.1)), Err(Error::ConfigurationsOverlap));
    }

    #[test]
    fn hamiltonian_encodes_indicator() {
        let y = cfg(&[&[0.0], &[0.4]]);
        let h = hamiltonian(&y, &Configuration::empty(), radius(0.6)).unwrap();
        assert_eq!(h, f64::INFINITY);
        assert_eq!((-h).exp(), 0.0);
        let h = hamiltonian(&y, &Configuration::empty(), radius(0.3)).unwrap();
        assert_eq!(h, 0.0);
    }

    #[test]
    fn chain_identity_on_fixed_triples() {
        let r = radius(0.5);
        let x = cfg(&[&[0.1], &[0.9]]);
        let y = cfg(&[&[0.45]]);
        let z = cfg(&[&[1.6]]);
        assert!(chain_identity_check(&x, &y, &z, r).unwrap());
        assert!(chain_identity_check(
            &Configuration::empty(),
            &Configuration::empty(),
            &Configuration::empty(),
            r
        )
        .unwrap());
    }

    #[test]
    fn boundary_condition_rejects_inside_points() {
        let region = Region::interval(0.0, 1.0).unwrap();
        let inside = cfg(&[&[0.5]]);
        assert_eq!(
            BoundaryCondition::new(inside, region.clone()),
            Err(Error::BoundaryInsideRegion)
        );
        let outside = cfg(&[&[-0.1], &[1.4]]);
        assert!(BoundaryCondition::new(outside, region).is_ok());
    }

    #[test]
    fn ring_restriction_drops_far_points() {
        let region = Region::interval(0.0, 1.0).unwrap();
        let bc = BoundaryCondition::new(cfg(&[&[-0.1], &[-5.0], &[1.2]]), region).unwrap();
        let ring = bc.restricted_to_ring(radius(0.5));
        assert_eq!(ring.points().len(), 2);
    }

    #[test]
    fn size_bound_empty_region_is_zero() {
        let empty = Region::interval(1.0, 0.0).unwrap();
        assert_eq!(hs_size_bound(&empty, radius(0.5)), SizeBound::Finite(0));
    }

    #[test]
    fn size_bound_zero_radius_unbounded() {
        let region = Region::interval(0.0, 1.0).unwrap();
        assert_eq!(hs_size_bound(&region, radius(0.0)), SizeBound::Unbounded);
    }

    #[test]
    fn size_bound_dominates_1d_packing() {
        // [0,1] with R = 0.6: the densest admissible set is {0, 1}
        let region = Region::interval(0.0, 1.0).unwrap();
        let bound = hs_size_bound(&region, radius(0.6)).finite().unwrap();
        assert!(bound >= 2, "{bound}");
    }

    #[test]
    fn size_bound_monotone_under_ball_removal() {
        let region = Region::unit_box_like(&[0.0, 0.0], &[2.0, 2.0]).unwrap();
        let r = radius(0.4);
        let full = hs_size_bound(&region, r).finite().unwrap();
        let carved = region.minus_balls([Ball::new(Point::new(&[1.0, 1.0]).unwrap(), 0.7).unwrap()]);
        let less = hs_size_bound(&carved, r).finite().unwrap();
        assert!(less <= full, "{less} vs {full}");
        let gone = region.minus_balls([Ball::new(Point::new(&[1.0, 1.0]).unwrap(), 5.0).unwrap()]);
        assert_eq!(hs_size_bound(&gone, r), SizeBound::Finite(0));
    }

    #[test]
    fn monotone_decreasing_in_both_arguments() {
        let r = radius(0.5);
        let y = cfg(&[&[0.2], &[0.9]]);
        let c = cfg(&[&[1.6]]);
        assert!(is_hard_core(&y, &c, r).unwrap());
        // adding a point to the condition can only break admissibility
        let c2 = cfg(&[&[1.6], &[1.1]]);
        assert!(!is_hard_core(&y, &c2, r).unwrap());
    }
}
