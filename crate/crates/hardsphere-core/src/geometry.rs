//! Points, canonical configurations, and sampling regions.
//!
//! A [`Region`] is an axis-aligned box, optionally intersected with one or
//! more unions of closed balls, minus a union of closed balls, optionally
//! intersected with the upper set of the coordinate order. That is exactly
//! the class of shapes the twisted-coupling recursion produces (boxes with
//! spheres carved out, spheres intersected back in for the disagreement
//! zone, and order cuts for the unexplored remainder during thinning), so no
//! general CSG machinery is needed. Membership tests are exact; volumes of
//! carved shapes are estimated by hit-or-miss Monte Carlo.
//!
//! Boundary conventions, fixed once: boxes are closed, removed balls are
//! closed (a point exactly on a removed ball's surface is removed),
//! restricted balls are closed, and the exclusion constraint elsewhere in
//! the crate is the strict `distance > R`. All comparisons are exact IEEE
//! comparisons; coincidences on the measure-zero boundaries are accepted.

use alloc::vec::Vec;
use core::cmp::Ordering;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::sampling::RngStream;

/// Inline storage for up to four coordinates; higher dimensions spill.
type Coords = SmallVec<[f64; 4]>;

/// A point of R^d. Coordinates are finite by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Coords,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("point coordinates must be finite"));
        }
        Ok(Point { coords: SmallVec::from_slice(coords) })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.coords[i]
    }
}

/// Euclidean distance. Dimension mismatch is a programming error; points are
/// validated at construction and never change dimension.
pub fn distance(x: &Point, y: &Point) -> f64 {
    fmath::sqrt(distance_sq(x, y))
}

/// Squared Euclidean distance; the exclusion checks compare against R^2 so
/// the hot paths never take a square root.
pub fn distance_sq(x: &Point, y: &Point) -> f64 {
    assert_eq!(x.dim(), y.dim(), "points of different dimension");
    x.coords
        .iter()
        .zip(&y.coords)
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// Strict total order on points: plain lexicographic coordinate order.
///
/// Any measurable total order works for sequencing the thinning; the
/// lexicographic one keeps the unexplored remainder representable as an
/// order cut against the region.
pub fn order_less(x: &Point, y: &Point) -> bool {
    order_cmp(x, y) == Ordering::Less
}

pub(crate) fn order_cmp(x: &Point, y: &Point) -> Ordering {
    assert_eq!(x.dim(), y.dim(), "points of different dimension");
    for (a, b) in x.coords.iter().zip(&y.coords) {
        // coordinates are finite, so partial_cmp cannot fail
        match a.partial_cmp(b).expect("finite coordinates") {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// A finite set of distinct points, kept sorted in the coordinate order so
/// that equal sets compare equal and thinning visits points canonically.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Configuration {
    points: Vec<Point>,
}

impl Configuration {
    pub fn empty() -> Self {
        Configuration { points: Vec::new() }
    }

    /// Sorts the points; rejects duplicates and mixed dimensions.
    pub fn new(mut points: Vec<Point>) -> Result<Self> {
        if let Some(first) = points.first() {
            let d = first.dim();
            if let Some(p) = points.iter().find(|p| p.dim() != d) {
                return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
            }
        }
        points.sort_by(order_cmp);
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint);
        }
        Ok(Configuration { points })
    }

    /// Internal constructor for points already sorted and distinct.
    pub(crate) fn from_sorted_unchecked(points: Vec<Point>) -> Self {
        debug_assert!(points.windows(2).all(|w| order_cmp(&w[0], &w[1]) == Ordering::Less));
        Configuration { points }
    }

    /// Append a point known to come strictly after the current maximum in
    /// the coordinate order (thinning visits points in that order).
    pub(crate) fn push_after_unchecked(&mut self, p: Point) {
        debug_assert!(self.points.last().map_or(true, |last| order_less(last, &p)));
        self.points.push(p);
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(Point::dim)
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.points
            .binary_search_by(|q| order_cmp(q, p))
            .is_ok()
    }

    /// Set union; an error if the two configurations share a point.
    pub fn union_disjoint(&self, other: &Configuration) -> Result<Configuration> {
        let mut points = Vec::with_capacity(self.len() + other.len());
        points.extend_from_slice(&self.points);
        points.extend_from_slice(&other.points);
        points.sort_by(order_cmp);
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::ConfigurationsOverlap);
        }
        Ok(Configuration { points })
    }

    /// Set union, deduplicating shared points.
    pub fn merged(&self, other: &Configuration) -> Configuration {
        let mut points = Vec::with_capacity(self.len() + other.len());
        points.extend_from_slice(&self.points);
        points.extend_from_slice(&other.points);
        points.sort_by(order_cmp);
        points.dedup();
        Configuration { points }
    }

    pub fn symmetric_difference(&self, other: &Configuration) -> Configuration {
        let mut points: Vec<Point> = Vec::new();
        for p in &self.points {
            if !other.contains_point(p) {
                points.push(p.clone());
            }
        }
        for p in &other.points {
            if !self.contains_point(p) {
                points.push(p.clone());
            }
        }
        points.sort_by(order_cmp);
        Configuration { points }
    }

    /// The subset of points inside `region`.
    pub fn restricted_to(&self, region: &Region) -> Configuration {
        Configuration {
            points: self.points.iter().filter(|p| region.contains(p)).cloned().collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Configuration) -> bool {
        self.points.iter().all(|p| other.contains_point(p))
    }

    /// Per-point nearest-neighbour distances (empty for fewer than 2 points).
    pub fn nearest_neighbor_distances(&self) -> Vec<f64> {
        let n = self.points.len();
        if n < 2 {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(n);
        for (i, p) in self.points.iter().enumerate() {
            let mut best = f64::INFINITY;
            for (j, q) in self.points.iter().enumerate() {
                if i != j {
                    let d2 = distance_sq(p, q);
                    if d2 < best {
                        best = d2;
                    }
                }
            }
            out.push(fmath::sqrt(best));
        }
        out
    }
}

/// The exclusion radius of the model. Finite and non-negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteractionRadius(f64);

impl InteractionRadius {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidParameter("interaction radius must be finite and >= 0"));
        }
        Ok(InteractionRadius(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A closed ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius < 0.0 {
            return Err(Error::InvalidParameter("ball radius must be finite and >= 0"));
        }
        Ok(Ball { center, radius })
    }

    pub fn contains(&self, p: &Point) -> bool {
        distance_sq(&self.center, p) <= self.radius * self.radius
    }
}

/// Closed axis-aligned box; `lo[i] > hi[i]` in any coordinate means empty.
#[derive(Clone, Debug, PartialEq)]
pub struct AaBox {
    lo: Coords,
    hi: Coords,
}

impl AaBox {
    pub fn new(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len().max(1), found: hi.len() });
        }
        if lo.iter().chain(hi.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("box bounds must be finite"));
        }
        Ok(AaBox { lo: SmallVec::from_slice(lo), hi: SmallVec::from_slice(hi) })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| a > b)
    }

    pub fn volume(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.coords()
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(c, (a, b))| a <= c && c <= b)
    }

    /// Distance from a point to the box (0 inside).
    pub fn distance_to(&self, p: &Point) -> f64 {
        fmath::sqrt(self.distance_sq_to(p))
    }

    pub fn distance_sq_to(&self, p: &Point) -> f64 {
        assert_eq!(p.dim(), self.dim(), "points of different dimension");
        let mut d2 = 0.0;
        for (c, (a, b)) in p.coords().iter().zip(self.lo.iter().zip(&self.hi)) {
            let gap = if c < a {
                a - c
            } else if c > b {
                c - b
            } else {
                0.0
            };
            d2 += gap * gap;
        }
        d2
    }
}

/// Keep only points strictly after `after` in the coordinate order; the
/// unexplored remainder of a region during thinning.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderCut {
    pub after: Point,
}

/// A sampling domain: box ∩ (each restricted ball union) \ (removed balls),
/// optionally cut to the order-upper set of a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    base: AaBox,
    restricted: Vec<Vec<Ball>>,
    removed: Vec<Ball>,
    cut: Option<OrderCut>,
}

impl Region {
    pub fn from_box(base: AaBox) -> Self {
        Region { base, restricted: Vec::new(), removed: Vec::new(), cut: None }
    }

    /// Convenience constructor for a box region.
    pub fn unit_box_like(lo: &[f64], hi: &[f64]) -> Result<Self> {
        Ok(Region::from_box(AaBox::new(lo, hi)?))
    }

    /// 1D interval region.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Region::unit_box_like(&[lo], &[hi])
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &AaBox {
        &self.base
    }

    pub fn restricted_groups(&self) -> &[Vec<Ball>] {
        &self.restricted
    }

    pub fn removed_balls(&self) -> &[Ball] {
        &self.removed
    }

    pub fn cut(&self) -> Option<&OrderCut> {
        self.cut.as_ref()
    }

    /// Membership is exact: in the closed base box, inside every restricted
    /// union, outside every removed ball, and after the cut point if any.
    pub fn contains(&self, p: &Point) -> bool {
        if !self.base.contains(p) {
            return false;
        }
        if let Some(cut) = &self.cut {
            if !order_less(&cut.after, p) {
                return false;
            }
        }
        for group in &self.restricted {
            if !group.iter().any(|b| b.contains(p)) {
                return false;
            }
        }
        !self.removed.iter().any(|b| b.contains(p))
    }

    /// Intersect with the union of `balls` (a new restricted group). An empty
    /// group makes the region empty.
    pub fn restricted_to(&self, balls: Vec<Ball>) -> Region {
        let mut r = self.clone();
        r.restricted.push(balls);
        r
    }

    /// Remove the union of `balls`.
    pub fn minus_balls(&self, balls: impl IntoIterator<Item = Ball>) -> Region {
        let mut r = self.clone();
        r.removed.extend(balls);
        r
    }

    /// Restrict to points strictly after `p` in the coordinate order.
    /// Successive cuts keep only the latest point, which is correct because
    /// thinning visits points in increasing order.
    pub fn with_cut_after(&self, p: &Point) -> Region {
        let mut r = self.clone();
        if let Some(prev) = &r.cut {
            debug_assert!(order_less(&prev.after, p));
        }
        r.cut = Some(OrderCut { after: p.clone() });
        r
    }

    /// A region that is certainly empty as a set (empty base box).
    pub fn is_certainly_empty(&self) -> bool {
        self.base.is_empty() || self.restricted.iter().any(Vec::is_empty)
    }

    pub fn is_box_only(&self) -> bool {
        self.restricted.is_empty() && self.removed.is_empty() && self.cut.is_none()
    }
}

/// The sub-region of `base` covered by closed balls of radius `r` around the
/// points of `c`. Used for the reach of a boundary condition into a region;
/// an empty `c` yields the empty region.
pub fn ring_region(base: &Region, c: &Configuration, r: InteractionRadius) -> Region {
    let balls = c
        .points()
        .iter()
        .map(|p| Ball { center: p.clone(), radius: r.value() })
        .collect();
    base.restricted_to(balls)
}

/// Volume of a region: exact for a pure box, hit-or-miss Monte Carlo against
/// the base box otherwise.
pub fn region_volume(
    region: &Region,
    mc_samples: u64,
    rng: &mut RngStream,
) -> Result<crate::partition::Estimate> {
    use crate::partition::Estimate;
    if region.is_box_only() {
        return Ok(Estimate::exact(region.base.volume()));
    }
    if region.base.is_empty() || region.restricted.iter().any(Vec::is_empty) {
        return Ok(Estimate::exact(0.0));
    }
    if mc_samples == 0 {
        return Err(Error::VolumeNeedsSamples);
    }
    let vol = region.base.volume();
    let mut hits: u64 = 0;
    let mut buf = Coords::new();
    for _ in 0..mc_samples {
        buf.clear();
        for (a, b) in region.base.lo().iter().zip(region.base.hi()) {
            buf.push(a + rng.uniform() * (b - a));
        }
        let p = Point { coords: buf.clone() };
        if region.contains(&p) {
            hits += 1;
        }
    }
    let frac = hits as f64 / mc_samples as f64;
    let se = fmath::sqrt(frac * (1.0 - frac) / mc_samples as f64);
    Ok(Estimate::mc_plain(vol * frac, vol * se, mc_samples))
}

/// Uniform point in a box; used by the samplers.
pub(crate) fn uniform_in_box(base: &AaBox, rng: &mut RngStream) -> Point {
    let mut coords = Coords::with_capacity(base.dim());
    for (a, b) in base.lo().iter().zip(base.hi()) {
        coords.push(a + rng.uniform() * (b - a));
    }
    Point { coords }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(cs: &[f64]) -> Point {
        Point::new(cs).unwrap()
    }

    #[test]
    fn distance_345() {
        assert_eq!(distance(&pt(&[0.0, 0.0]), &pt(&[3.0, 4.0])), 5.0);
        let x = pt(&[1.25, -2.5]);
        assert_eq!(distance(&x, &x), 0.0);
    }

    #[test]
    fn order_is_lexicographic() {
        assert!(order_less(&pt(&[0.0, 1.0]), &pt(&[1.0, 0.0])));
        assert!(order_less(&pt(&[1.0, 0.0]), &pt(&[1.0, 1.0])));
        assert!(!order_less(&pt(&[1.0, 1.0]), &pt(&[1.0, 0.0])));
    }

    #[test]
    fn configuration_sorts_and_rejects_duplicates() {
        let c = Configuration::new(vec![pt(&[0.5]), pt(&[0.1]), pt(&[0.9])]).unwrap();
        let xs: Vec<f64> = c.points().iter().map(|p| p.coord(0)).collect();
        assert_eq!(xs, vec![0.1, 0.5, 0.9]);
        assert_eq!(
            Configuration::new(vec![pt(&[0.5]), pt(&[0.5])]),
            Err(Error::DuplicatePoint)
        );
    }

    #[test]
    fn region_membership_box_and_balls() {
        let unit = Region::unit_box_like(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(unit.contains(&pt(&[0.5, 0.5])));
        assert!(!unit.contains(&pt(&[1.5, 0.5])));

        let carved = unit.minus_balls([Ball::new(pt(&[0.5, 0.5]), 0.3).unwrap()]);
        assert!(!carved.contains(&pt(&[0.5, 0.5])));
        assert!(carved.contains(&pt(&[0.05, 0.05])));

        let restricted = unit.restricted_to(vec![Ball::new(pt(&[0.0, 0.0]), 0.1).unwrap()]);
        assert!(!restricted.contains(&pt(&[0.9, 0.9])));
        assert!(restricted.contains(&pt(&[0.05, 0.05])));
    }

    #[test]
    fn removed_ball_surface_is_removed() {
        let line = Region::interval(0.0, 1.0).unwrap();
        let carved = line.minus_balls([Ball::new(pt(&[0.5]), 0.2).unwrap()]);
        assert!(!carved.contains(&pt(&[0.7]))); // exactly on the surface
        assert!(carved.contains(&pt(&[0.7000001])));
    }

    #[test]
    fn ring_region_1d_interval() {
        let line = Region::interval(0.0, 1.0).unwrap();
        let c = Configuration::new(vec![pt(&[-0.5])]).unwrap();
        let ring = ring_region(&line, &c, InteractionRadius::new(0.7).unwrap());
        assert!(ring.contains(&pt(&[0.1])));
        assert!(!ring.contains(&pt(&[0.3])));
        let empty_ring = ring_region(&line, &Configuration::empty(), InteractionRadius::new(0.7).unwrap());
        assert!(empty_ring.is_certainly_empty());
    }

    #[test]
    fn box_volume_exact() {
        let r = Region::unit_box_like(&[0.0, 0.0], &[2.0, 3.0]).unwrap();
        let mut rng = RngStream::new(1, 0);
        let v = region_volume(&r, 0, &mut rng).unwrap();
        assert_eq!(v.mean, 6.0);
        assert_eq!(v.std_error, 0.0);
    }

    #[test]
    fn covered_box_has_zero_volume() {
        let r = Region::unit_box_like(&[0.0, 0.0], &[1.0, 1.0])
            .unwrap()
            .minus_balls([Ball::new(pt(&[0.5, 0.5]), 2.0).unwrap()]);
        let mut rng = RngStream::new(1, 0);
        let v = region_volume(&r, 2000, &mut rng).unwrap();
        assert_eq!(v.mean, 0.0);
    }

    #[test]
    fn volume_estimator_needs_samples() {
        let r = Region::interval(0.0, 1.0)
            .unwrap()
            .minus_balls([Ball::new(pt(&[0.5]), 0.1).unwrap()]);
        let mut rng = RngStream::new(1, 0);
        assert_eq!(region_volume(&r, 0, &mut rng), Err(Error::VolumeNeedsSamples));
    }

    #[test]
    fn carved_disk_volume_matches_closed_form() {
        // [0,1]^2 minus a disk of radius 1/4: area 1 - pi/16
        let r = Region::unit_box_like(&[0.0, 0.0], &[1.0, 1.0])
            .unwrap()
            .minus_balls([Ball::new(pt(&[0.5, 0.5]), 0.25).unwrap()]);
        let mut rng = RngStream::new(7, 0);
        let v = region_volume(&r, 200_000, &mut rng).unwrap();
        let truth = 1.0 - core::f64::consts::PI / 16.0;
        assert!((v.mean - truth).abs() < 3.0 * v.std_error, "{} vs {truth}", v.mean);
    }

    #[test]
    fn order_cut_restricts_membership() {
        let r = Region::interval(0.0, 1.0).unwrap().with_cut_after(&pt(&[0.5]));
        assert!(!r.contains(&pt(&[0.5])));
        assert!(!r.contains(&pt(&[0.2])));
        assert!(r.contains(&pt(&[0.7])));
    }
}
