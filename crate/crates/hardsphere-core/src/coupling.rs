//! The two couplings: dependent thinning from a dominating Poisson process
//! to the hard-sphere model, and the recursive twisted coupling of two
//! hard-sphere processes with differing boundary conditions under a single
//! dominating Poisson process.
//!
//! Thinning: draw the dominating Poisson configuration, visit its points in
//! the coordinate order, and keep each with the thinning probability (the
//! partition-function ratio over the unexplored remainder). The kept set is
//! hard-sphere distributed, the draw stays Poisson, and kept ⊆ draw surely.
//!
//! Twisted coupling: the zone of disagreement `D` is the part of the region
//! within interaction range of either boundary condition, partitioned into
//! the side blocked only by condition 1 (`D2`), only by condition 2 (`D1`),
//! and by both (`D0`). On `D1` the coupling places the restriction of a
//! full-region thinning under condition 1 (restriction, not a thinning run
//! on `D1` itself: the kept points must feel the still-unsampled remainder
//! of the region, and the restricted pair has exactly the marginal the
//! recursion needs), symmetrically on `D2`; `D0` gets a fresh Poisson layer
//! so the dominating process is Poisson on all of `D`. The recursion then
//! handles `region \ D` with the newly placed zone points as boundary
//! conditions — the original conditions are screened: no point of the
//! remainder is within range of them.
//!
//! Every coupling consumes randomness from a single stream in a fixed
//! order, so samples are reproducible bit for bit from `(seed, stream_id)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Ball, Configuration, InteractionRadius, Point, Region};
use crate::hardcore::{self, BoundaryCondition, SizeBound};
use crate::partition::{self, ThinningEstimator};
use crate::sampling::{self, Intensity, RngStream};

/// Outcome of a dependent thinning run.
#[derive(Clone, Debug, PartialEq)]
pub struct ThinnedPair {
    /// Hard-sphere marginal; subset of `dominating`.
    pub kept: Configuration,
    /// The dominating Poisson draw.
    pub dominating: Configuration,
    pub diagnostics: ThinningDiagnostics,
}

/// Counters for the estimator behaviour during a thinning run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ThinningDiagnostics {
    pub decisions: u64,
    /// Decisions whose raw ratio estimate needed clamping into [0,1]. The
    /// paired estimator keeps this at zero structurally; a nonzero count
    /// signals an estimator bug.
    pub clamped: u64,
}

/// A draw from the twisted coupling: two hard-sphere marginals under their
/// respective boundary conditions and one dominating Poisson marginal.
#[derive(Clone, Debug)]
pub struct CouplingSample {
    pub xi1: Configuration,
    pub xi2: Configuration,
    pub xi3: Configuration,
    pub region: Region,
    pub condition1: BoundaryCondition,
    pub condition2: BoundaryCondition,
    pub seed: u64,
    pub stream_id: u64,
}

/// One level of the twisted recursion.
#[derive(Clone, Copy, Debug)]
pub struct TraceLevel {
    pub depth: u32,
    /// Whether this level hit the identification base case (empty zone).
    pub base_case: bool,
    /// Points placed into (xi1, xi2, xi3) at this level.
    pub placed: [usize; 3],
}

/// Recursion record; the depth never exceeds `cap` on valid geometry.
#[derive(Clone, Debug)]
pub struct RecursionTrace {
    pub levels: Vec<TraceLevel>,
    pub cap: u32,
}

impl RecursionTrace {
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }
}

/// Dependent thinning of a Poisson draw to the hard-sphere law.
pub fn thin_to_hard_sphere(
    region: &Region,
    condition: &BoundaryCondition,
    lambda: Intensity,
    radius: InteractionRadius,
    estimator: ThinningEstimator,
    rng: &mut RngStream,
) -> Result<ThinnedPair> {
    if condition.points().points().iter().any(|p| region.contains(p)) {
        return Err(Error::BoundaryInsideRegion);
    }
    let dominating = sampling::sample_poisson(region, lambda, rng);
    let mut kept = Configuration::empty();
    let mut diagnostics = ThinningDiagnostics::default();
    for x in dominating.points() {
        let remaining = region.with_cut_after(x);
        let p = partition::thinning_probability(
            x, condition, &kept, &remaining, lambda, radius, estimator, rng,
        )?;
        diagnostics.decisions += 1;
        if !(0.0..=1.0).contains(&p.mean) {
            diagnostics.clamped += 1;
        }
        // one uniform per decision, taken unconditionally: streams stay
        // aligned across runs that differ only in screened-off far points
        if rng.bernoulli(p.mean.clamp(0.0, 1.0)) {
            kept.push_after_unchecked(x.clone());
        }
    }
    Ok(ThinnedPair { kept, dominating, diagnostics })
}

/// Boundary points whose interaction ball can reach the region's base box.
/// Conservative (box, not carved region), which only costs a harmless extra
/// recursion level when the reachable part was already carved away.
fn in_range_points(
    condition: &BoundaryCondition,
    region: &Region,
    radius: InteractionRadius,
) -> Vec<Point> {
    let r2 = radius.value() * radius.value();
    condition
        .points()
        .points()
        .iter()
        .filter(|p| region.base().distance_sq_to(p) <= r2)
        .cloned()
        .collect()
}

fn balls_around(points: &[Point], radius: InteractionRadius) -> Vec<Ball> {
    points
        .iter()
        .map(|p| Ball { center: p.clone(), radius: radius.value() })
        .collect()
}

struct ZoneOutcome {
    xi1: Configuration,
    xi2: Configuration,
    xi3: Vec<Point>,
}

/// The coupling on the zone of disagreement. `reach1`/`reach2` are the
/// in-range boundary points; at least one must be nonempty.
fn zone_step(
    region: &Region,
    condition1: &BoundaryCondition,
    condition2: &BoundaryCondition,
    reach1: &[Point],
    reach2: &[Point],
    lambda: Intensity,
    radius: InteractionRadius,
    estimator: ThinningEstimator,
    rng: &mut RngStream,
) -> Result<ZoneOutcome> {
    let balls1 = balls_around(reach1, radius);
    let balls2 = balls_around(reach2, radius);
    // D1: blocked by condition 2 only; D2: by condition 1 only; D0: both.
    let d1 = region.restricted_to(balls2.clone()).minus_balls(balls1.clone());
    let d2 = region.restricted_to(balls1.clone()).minus_balls(balls2.clone());
    let d0 = region.restricted_to(balls1).restricted_to(balls2);

    let mut xi1 = Configuration::empty();
    let mut xi2 = Configuration::empty();
    let mut xi3: Vec<Point> = Vec::new();
    // when one side is out of range its zone part is empty and the whole
    // full-region run would be discarded; skip it
    if !reach2.is_empty() {
        let run1 = thin_to_hard_sphere(region, condition1, lambda, radius, estimator, rng)?;
        xi1 = run1.kept.restricted_to(&d1);
        xi3.extend(run1.dominating.restricted_to(&d1).points().iter().cloned());
    }
    if !reach1.is_empty() {
        let run2 = thin_to_hard_sphere(region, condition2, lambda, radius, estimator, rng)?;
        xi2 = run2.kept.restricted_to(&d2);
        xi3.extend(run2.dominating.restricted_to(&d2).points().iter().cloned());
    }
    if !reach1.is_empty() && !reach2.is_empty() {
        xi3.extend(sampling::sample_poisson(&d0, lambda, rng).points().iter().cloned());
    }
    Ok(ZoneOutcome { xi1, xi2, xi3 })
}

/// The coupling triple on the zone of disagreement alone. Errors when the
/// zone is empty (no boundary point in range); the recursive coupling
/// handles that case by identification instead.
pub fn twisted_zone(
    region: &Region,
    condition1: &BoundaryCondition,
    condition2: &BoundaryCondition,
    lambda: Intensity,
    radius: InteractionRadius,
    estimator: ThinningEstimator,
    rng: &mut RngStream,
) -> Result<(Configuration, Configuration, Configuration)> {
    let reach1 = in_range_points(condition1, region, radius);
    let reach2 = in_range_points(condition2, region, radius);
    if reach1.is_empty() && reach2.is_empty() {
        return Err(Error::DisagreementZoneEmpty);
    }
    let out = zone_step(
        region, condition1, condition2, &reach1, &reach2, lambda, radius, estimator, rng,
    )?;
    Ok((out.xi1, out.xi2, Configuration::new(out.xi3)?))
}

/// The recursive twisted coupling on `region` under two boundary conditions.
///
/// With no boundary point in range the two processes are identified and a
/// single thinning under the merged condition is returned. Otherwise the
/// zone is coupled, the zone's interaction balls are carved out of the
/// region, and the recursion continues with the zone points as the new
/// boundary conditions (the carving screens the old ones off).
pub fn twisted_couple(
    region: &Region,
    condition1: &BoundaryCondition,
    condition2: &BoundaryCondition,
    lambda: Intensity,
    radius: InteractionRadius,
    estimator: ThinningEstimator,
    rng: &mut RngStream,
) -> Result<(CouplingSample, RecursionTrace)> {
    let cap = match hardcore::hs_size_bound(region, radius) {
        // with radius 0 the zone is Lebesgue-null: one zone level at most
        SizeBound::Unbounded => 4,
        SizeBound::Finite(n) => u32::try_from(2 * n + 2).unwrap_or(u32::MAX),
    };
    let mut acc1: Vec<Point> = Vec::new();
    let mut acc2: Vec<Point> = Vec::new();
    let mut acc3: Vec<Point> = Vec::new();
    let mut levels: Vec<TraceLevel> = Vec::new();

    let mut cur_region = region.clone();
    let mut cur_c1 = condition1.clone();
    let mut cur_c2 = condition2.clone();
    let mut depth: u32 = 0;
    loop {
        let reach1 = in_range_points(&cur_c1, &cur_region, radius);
        let reach2 = in_range_points(&cur_c2, &cur_region, radius);
        if reach1.is_empty() && reach2.is_empty() {
            let merged = BoundaryCondition::new(
                cur_c1.points().merged(cur_c2.points()),
                cur_region.clone(),
            )?;
            let pair =
                thin_to_hard_sphere(&cur_region, &merged, lambda, radius, estimator, rng)?;
            levels.push(TraceLevel {
                depth,
                base_case: true,
                placed: [pair.kept.len(), pair.kept.len(), pair.dominating.len()],
            });
            acc1.extend(pair.kept.points().iter().cloned());
            acc2.extend(pair.kept.points().iter().cloned());
            acc3.extend(pair.dominating.points().iter().cloned());
            break;
        }
        if depth >= cap {
            return Err(Error::RecursionCapExceeded { depth, cap });
        }
        let zone = zone_step(
            &cur_region, &cur_c1, &cur_c2, &reach1, &reach2, lambda, radius, estimator, rng,
        )?;
        levels.push(TraceLevel {
            depth,
            base_case: false,
            placed: [zone.xi1.len(), zone.xi2.len(), zone.xi3.len()],
        });
        acc1.extend(zone.xi1.points().iter().cloned());
        acc2.extend(zone.xi2.points().iter().cloned());
        acc3.extend(zone.xi3.iter().cloned());

        let mut carve = balls_around(&reach1, radius);
        carve.extend(balls_around(&reach2, radius));
        let next_region = cur_region.minus_balls(carve);
        cur_c1 = BoundaryCondition::new(zone.xi1, next_region.clone())?;
        cur_c2 = BoundaryCondition::new(zone.xi2, next_region.clone())?;
        cur_region = next_region;
        depth += 1;
    }

    let xi1 = Configuration::new(acc1)?;
    let xi2 = Configuration::new(acc2)?;
    let xi3 = Configuration::new(acc3)?;
    // Screening check: dropping the original conditions during recursion is
    // only valid if the assembled marginals still satisfy them.
    assert!(
        hardcore::hard_core_unchecked(xi1.points(), condition1.points().points(), radius),
        "twisted coupling: first marginal violates its boundary condition"
    );
    assert!(
        hardcore::hard_core_unchecked(xi2.points(), condition2.points().points(), radius),
        "twisted coupling: second marginal violates its boundary condition"
    );
    let sample = CouplingSample {
        xi1,
        xi2,
        xi3,
        region: region.clone(),
        condition1: condition1.clone(),
        condition2: condition2.clone(),
        seed: rng.seed(),
        stream_id: rng.stream_id(),
    };
    Ok((sample, RecursionTrace { levels, cap }))
}
