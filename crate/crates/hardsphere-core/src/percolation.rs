//! Gilbert-graph connectivity, spanning sweeps for the critical intensity,
//! and exponential decay fits.
//!
//! Two points are adjacent when their distance is at most the interaction
//! radius; clusters are the connected components. Neighbour search buckets
//! points into a grid of cell side R so only 3^d neighbouring cells are
//! scanned per point; a brute-force transitive closure backs it in tests.

use alloc::string::String;
use alloc::vec::Vec;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::geometry::{distance_sq, AaBox, Configuration, InteractionRadius, Point, Region};
use crate::partition::Estimate;
use crate::sampling::{self, Intensity, RngStream};

type CellKey = SmallVec<[i64; 4]>;

/// Connected components of a configuration's Gilbert graph. Labels are
/// canonical: each point is labelled with the smallest point index in its
/// component, so partitions of equal configurations compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterPartition {
    labels: Vec<usize>,
    components: usize,
}

impl ClusterPartition {
    pub fn label_of(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn same_cluster(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }

    pub fn component_count(&self) -> usize {
        self.components
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: alloc::vec![0; n] }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            core::cmp::Ordering::Less => self.parent[ra] = rb,
            core::cmp::Ordering::Greater => self.parent[rb] = ra,
            core::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

fn cell_key(p: &Point, side: f64) -> CellKey {
    p.coords()
        .iter()
        .map(|c| {
            let q = c / side;
            let f = q as i64;
            if (f as f64) > q {
                f - 1
            } else {
                f
            }
        })
        .collect()
}

/// Union-find over all pairs at distance at most R, with grid-bucketed
/// neighbour search.
pub fn cluster_partition(c: &Configuration, radius: InteractionRadius) -> ClusterPartition {
    let n = c.len();
    let mut uf = UnionFind::new(n);
    let r = radius.value();
    let r2 = r * r;
    if n > 0 && r > 0.0 {
        let d = c.points()[0].dim();
        // sorted (cell, point index) pairs stand in for a hash grid
        let mut cells: Vec<(CellKey, usize)> = c
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| (cell_key(p, r), i))
            .collect();
        cells.sort();
        let mut offsets: Vec<SmallVec<[i64; 4]>> = alloc::vec![SmallVec::new()];
        for _ in 0..d {
            let mut next = Vec::with_capacity(offsets.len() * 3);
            for base in &offsets {
                for step in -1i64..=1 {
                    let mut o = base.clone();
                    o.push(step);
                    next.push(o);
                }
            }
            offsets = next;
        }
        for (key, i) in &cells {
            for off in &offsets {
                let neighbor: CellKey =
                    key.iter().zip(off.iter()).map(|(k, o)| k + o).collect();
                let start = cells.partition_point(|(k, _)| k < &neighbor);
                for (k, j) in &cells[start..] {
                    if k != &neighbor {
                        break;
                    }
                    if j > i && distance_sq(&c.points()[*i], &c.points()[*j]) <= r2 {
                        uf.union(*i, *j);
                    }
                }
            }
        }
    } else if n > 0 && r == 0.0 {
        // distinct points are never adjacent at radius zero
    }
    let mut labels = alloc::vec![usize::MAX; n];
    let mut components = 0;
    for i in 0..n {
        let root = uf.find(i);
        if labels[root] == usize::MAX {
            labels[root] = i;
            components += 1;
        }
        labels[i] = labels[root];
    }
    ClusterPartition { labels, components }
}

/// The sets connectivity checks run against: a box, a finite set of points,
/// or the complement of a box (the outside world when probing how far a
/// boundary's influence reaches into a region). Distances between any two
/// targets, and from a point to a target, are exact.
#[derive(Clone, Debug)]
pub enum ConnectTarget {
    Box(AaBox),
    Points(Configuration),
    BoxComplement(AaBox),
}

impl ConnectTarget {
    pub fn distance_to(&self, p: &Point) -> f64 {
        match self {
            ConnectTarget::Box(b) => b.distance_to(p),
            ConnectTarget::Points(c) => fmath::sqrt(
                c.points()
                    .iter()
                    .map(|q| distance_sq(p, q))
                    .fold(f64::INFINITY, f64::min),
            ),
            ConnectTarget::BoxComplement(b) => distance_to_complement(b, p),
        }
    }
}

fn distance_to_complement(b: &AaBox, p: &Point) -> f64 {
    if !b.contains(p) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (c, (lo, hi)) in p.coords().iter().zip(b.lo().iter().zip(b.hi())) {
        best = best.min(c - lo).min(hi - c);
    }
    best.max(0.0)
}

fn box_box_distance(a: &AaBox, b: &AaBox) -> f64 {
    let mut d2 = 0.0;
    for ((alo, ahi), (blo, bhi)) in
        a.lo().iter().zip(a.hi()).zip(b.lo().iter().zip(b.hi()))
    {
        let gap = (blo - ahi).max(alo - bhi).max(0.0);
        d2 += gap * gap;
    }
    fmath::sqrt(d2)
}

fn box_in_box_margin(inner: &AaBox, outer: &AaBox) -> f64 {
    // distance from the inner box to the complement of the outer box
    let mut best = f64::INFINITY;
    for ((ilo, ihi), (olo, ohi)) in
        inner.lo().iter().zip(inner.hi()).zip(outer.lo().iter().zip(outer.hi()))
    {
        if ilo < olo || ihi > ohi {
            return 0.0;
        }
        best = best.min(ilo - olo).min(ohi - ihi);
    }
    best.max(0.0)
}

/// Exact distance between two targets.
pub fn target_distance(a: &ConnectTarget, b: &ConnectTarget) -> f64 {
    use ConnectTarget::*;
    match (a, b) {
        (Box(x), Box(y)) => box_box_distance(x, y),
        (Points(c), t) | (t, Points(c)) => c
            .points()
            .iter()
            .map(|p| t.distance_to(p))
            .fold(f64::INFINITY, f64::min),
        (Box(x), BoxComplement(y)) | (BoxComplement(y), Box(x)) => box_in_box_margin(x, y),
        (BoxComplement(_), BoxComplement(_)) => 0.0,
    }
}

/// Whether targets `a` and `b` are R-connected through the configuration: a
/// chain of points of `c` with jumps at most R starts within R of `a` and
/// ends within R of `b`. Targets already within distance R of each other
/// count as connected with no hops.
pub fn sets_connected(
    a: &ConnectTarget,
    b: &ConnectTarget,
    c: &Configuration,
    radius: InteractionRadius,
) -> bool {
    let r = radius.value();
    if target_distance(a, b) <= r {
        return true;
    }
    if c.is_empty() {
        return false;
    }
    let clusters = cluster_partition(c, radius);
    let mut a_labels: Vec<usize> = Vec::new();
    for (i, p) in c.points().iter().enumerate() {
        if a.distance_to(p) <= r {
            a_labels.push(clusters.label_of(i));
        }
    }
    if a_labels.is_empty() {
        return false;
    }
    a_labels.sort_unstable();
    a_labels.dedup();
    c.points()
        .iter()
        .enumerate()
        .any(|(i, p)| b.distance_to(p) <= r && a_labels.binary_search(&clusters.label_of(i)).is_ok())
}

/// Fraction of Poisson draws on `window` connecting `a` to `b`.
pub fn connection_probability(
    window: &Region,
    a: &ConnectTarget,
    b: &ConnectTarget,
    alpha: Intensity,
    radius: InteractionRadius,
    replicas: u64,
    rng: &mut RngStream,
) -> Result<Estimate> {
    if replicas == 0 {
        return Err(Error::ZeroSamples);
    }
    let mut hits = 0u64;
    for _ in 0..replicas {
        let draw = sampling::sample_poisson(window, alpha, rng);
        if sets_connected(a, b, &draw, radius) {
            hits += 1;
        }
    }
    Ok(Estimate::from_bernoulli(hits, replicas))
}

/// One record of a parameter sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub dimension: u32,
    pub radius: f64,
    pub intensity: f64,
    pub box_side: f64,
    pub replicas: u64,
    pub statistic: String,
    pub value: f64,
    pub std_error: f64,
}

/// Spanning probability (left face R-connected to right face) on cubes of
/// the given sides for each intensity on the grid. The crossing of the
/// spanning-probability curve through 1/2 on the largest boxes estimates
/// the critical intensity.
pub fn critical_intensity_sweep(
    dimension: u32,
    radius: InteractionRadius,
    box_sides: &[f64],
    alpha_grid: &[f64],
    replicas: u64,
    rng: &mut RngStream,
) -> Result<Vec<SweepRow>> {
    if dimension == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1"));
    }
    if replicas == 0 {
        return Err(Error::ZeroSamples);
    }
    let d = dimension as usize;
    let mut rows = Vec::with_capacity(box_sides.len() * alpha_grid.len());
    for &side in box_sides {
        let lo = alloc::vec![0.0; d];
        let hi = alloc::vec![side; d];
        let window = Region::from_box(AaBox::new(&lo, &hi)?);
        let mut face_hi = hi.clone();
        face_hi[0] = 0.0;
        let left = ConnectTarget::Box(AaBox::new(&lo, &face_hi)?);
        let mut face_lo = lo.clone();
        face_lo[0] = side;
        let right = ConnectTarget::Box(AaBox::new(&face_lo, &hi)?);
        for &alpha in alpha_grid {
            let est = connection_probability(
                &window,
                &left,
                &right,
                Intensity::new(alpha)?,
                radius,
                replicas,
                rng,
            )?;
            rows.push(SweepRow {
                dimension,
                radius: radius.value(),
                intensity: alpha,
                box_side: side,
                replicas,
                statistic: String::from("spanning_probability"),
                value: est.mean,
                std_error: est.std_error,
            });
        }
    }
    Ok(rows)
}

/// Linear interpolation of the intensity at which the spanning probability
/// first crosses 1/2, on the rows for one box side.
pub fn crossing_estimate(rows: &[SweepRow], box_side: f64) -> Result<f64> {
    let mut curve: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.box_side == box_side && r.statistic == "spanning_probability")
        .map(|r| (r.intensity, r.value))
        .collect();
    if curve.len() < 2 {
        return Err(Error::InvalidParameter("crossing estimate needs a grid of intensities"));
    }
    curve.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite intensities"));
    for w in curve.windows(2) {
        let ((a0, p0), (a1, p1)) = (w[0], w[1]);
        if p0 < 0.5 && p1 >= 0.5 {
            if p1 == p0 {
                return Ok(a1);
            }
            return Ok(a0 + (0.5 - p0) / (p1 - p0) * (a1 - a0));
        }
    }
    Err(Error::InvalidParameter("spanning probability does not cross 1/2 on the grid"))
}

/// Least-squares fit of `log(value)` against distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    /// exp(intercept), clamped to at least 1.
    pub amplitude: f64,
    /// Minus the slope.
    pub rate: f64,
    pub rate_stderr: f64,
    pub residual_rms: f64,
    pub n_points: usize,
}

// two-sided 97.5% Student quantiles for 1..=30 degrees of freedom
const T_975: [f64; 30] = [
    12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912, 2.364624, 2.306004, 2.262157,
    2.228139, 2.200985, 2.178813, 2.160369, 2.144787, 2.131450, 2.119905, 2.109816, 2.100922,
    2.093024, 2.085963, 2.079614, 2.073873, 2.068658, 2.063899, 2.059539, 2.055529, 2.051831,
    2.048407, 2.045230, 2.042272,
];

pub(crate) fn t_quantile_975(dof: usize) -> f64 {
    if dof == 0 {
        f64::INFINITY
    } else if dof <= T_975.len() {
        T_975[dof - 1]
    } else {
        1.96
    }
}

impl DecayFit {
    /// 95% confidence interval for the decay rate (Student t on the fit's
    /// residual degrees of freedom).
    pub fn rate_ci95(&self) -> (f64, f64) {
        let t = t_quantile_975(self.n_points.saturating_sub(2));
        (self.rate - t * self.rate_stderr, self.rate + t * self.rate_stderr)
    }

    /// Whether the fitted rate is significantly positive (decaying).
    pub fn is_decaying(&self) -> bool {
        self.rate_ci95().0 > 0.0
    }
}

/// Fit `K exp(-kappa t)` through positive estimates by least squares on the
/// log scale. Zero (or negative) estimates are excluded; fewer than three
/// surviving points is an error.
pub fn fit_decay(rows: &[(f64, Estimate)]) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, e)| e.mean > 0.0)
        .map(|(t, e)| (*t, fmath::ln(e.mean)))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientDecayData { available: pts.len() });
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let mx = sx / n;
    let my = sy / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("decay fit needs distinct distances"));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let dof = pts.len() - 2;
    let sigma2 = if dof > 0 { ssr / dof as f64 } else { 0.0 };
    Ok(DecayFit {
        amplitude: fmath::exp(intercept).max(1.0),
        rate: -slope,
        rate_stderr: fmath::sqrt(sigma2 / sxx),
        residual_rms: fmath::sqrt(ssr / pts.len() as f64),
        n_points: pts.len(),
    })
}
