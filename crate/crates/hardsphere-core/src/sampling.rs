//! Seeded random streams and the two basic samplers: Poisson on a region and
//! the rejection oracle for the hard-sphere law.
//!
//! Reproducibility contract: identical `(seed, stream_id)` reproduce
//! identical draws bit for bit; distinct stream ids give statistically
//! independent streams (one per replica). ChaCha8 provides 2^64 streams per
//! seed natively.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::fmath;
use crate::geometry::{self, Configuration, InteractionRadius, Point, Region};
use crate::hardcore::{self, BoundaryCondition};

/// Expected points per unit volume (Poisson intensity or hard-sphere
/// activity). Finite and non-negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Intensity(f64);

impl Intensity {
    pub fn new(v: f64) -> Result<Self> {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter("intensity must be finite and >= 0"));
        }
        Ok(Intensity(v))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A reproducible random stream, identified by `(seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform in [0, 1), 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Poisson count by inversion; means above 350 are split additively so
    /// exp(-mean) stays comfortably inside the normal f64 range.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        debug_assert!(mean.is_finite() && mean >= 0.0);
        if mean <= 0.0 {
            return 0;
        }
        if mean > 350.0 {
            let half = mean / 2.0;
            return self.poisson(half) + self.poisson(mean - half);
        }
        let u = self.uniform();
        let mut p = fmath::exp(-mean);
        let mut cdf = p;
        let mut k: u64 = 0;
        // cdf can stall one ulp below 1; the guard bounds the tail walk
        let guard = (mean + 60.0 * fmath::sqrt(mean) + 60.0) as u64;
        while u > cdf && k < guard {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        k
    }
}

/// Poisson point process of intensity `alpha` on `region`: a Poisson number
/// of uniform points on the base box, filtered to the region (the exact
/// restriction of a Poisson process), sorted in the coordinate order.
pub fn sample_poisson(region: &Region, alpha: Intensity, rng: &mut RngStream) -> Configuration {
    let mut buf = Vec::new();
    sample_poisson_into(region, alpha, rng, &mut buf);
    Configuration::from_sorted_unchecked(buf)
}

/// Allocation-free inner loop for the Monte Carlo kernels: fills `out` with
/// the sorted draw.
pub(crate) fn sample_poisson_into(
    region: &Region,
    alpha: Intensity,
    rng: &mut RngStream,
    out: &mut Vec<Point>,
) {
    out.clear();
    if region.is_certainly_empty() {
        return;
    }
    let mean = alpha.value() * region.base().volume();
    let n = rng.poisson(mean);
    for _ in 0..n {
        let p = geometry::uniform_in_box(region.base(), rng);
        if region.contains(&p) {
            out.push(p);
        }
    }
    out.sort_by(geometry::order_cmp);
    // exact coordinate collisions have probability zero; drop them anyway so
    // the configuration invariant cannot be violated
    out.dedup();
}

/// Exact hard-sphere sampler: redraw Poisson configurations until one
/// satisfies the exclusion constraint against itself and the boundary
/// condition. Ground truth for every statistical test, feasible only while
/// `lambda * volume` is small.
pub fn sample_hard_sphere_rejection(
    region: &Region,
    condition: &BoundaryCondition,
    lambda: Intensity,
    radius: InteractionRadius,
    rng: &mut RngStream,
    max_attempts: u64,
) -> Result<Configuration> {
    let mut buf = Vec::new();
    for attempt in 1..=max_attempts {
        sample_poisson_into(region, lambda, rng, &mut buf);
        if hardcore::hard_core_unchecked(&buf, condition.points().points(), radius) {
            return Ok(Configuration::from_sorted_unchecked(buf));
        }
        let _ = attempt;
    }
    Err(Error::RejectionExhausted {
        attempts: max_attempts,
        acceptance: if max_attempts == 0 { f64::NAN } else { 1.0 / max_attempts as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Ball;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = RngStream::new(42, 7);
        let mut b = RngStream::new(42, 7);
        let mut c = RngStream::new(42, 8);
        let xs: Vec<f64> = (0..64).map(|_| a.uniform()).collect();
        let ys: Vec<f64> = (0..64).map(|_| b.uniform()).collect();
        let zs: Vec<f64> = (0..64).map(|_| c.uniform()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn poisson_mean_matches() {
        let mut rng = RngStream::new(3, 0);
        let n = 20_000;
        let mean = 5.0;
        let total: u64 = (0..n).map(|_| rng.poisson(mean)).sum();
        let emp = total as f64 / n as f64;
        let se = (mean / n as f64).sqrt();
        assert!((emp - mean).abs() < 4.0 * se, "{emp}");
    }

    #[test]
    fn poisson_large_mean_splitting() {
        let mut rng = RngStream::new(3, 1);
        let n = 2_000;
        let mean = 900.0;
        let total: u64 = (0..n).map(|_| rng.poisson(mean)).sum();
        let emp = total as f64 / n as f64;
        let se = (mean / n as f64).sqrt();
        assert!((emp - mean).abs() < 5.0 * se, "{emp}");
    }

    #[test]
    fn zero_intensity_always_empty() {
        let region = Region::interval(0.0, 1.0).unwrap();
        let mut rng = RngStream::new(1, 0);
        for _ in 0..50 {
            assert!(sample_poisson(&region, Intensity::new(0.0).unwrap(), &mut rng).is_empty());
        }
    }

    #[test]
    fn covered_region_always_empty() {
        let region = Region::unit_box_like(&[0.0, 0.0], &[1.0, 1.0])
            .unwrap()
            .minus_balls([Ball::new(Point::new(&[0.5, 0.5]).unwrap(), 2.0).unwrap()]);
        let mut rng = RngStream::new(1, 0);
        for _ in 0..50 {
            assert!(sample_poisson(&region, Intensity::new(5.0).unwrap(), &mut rng).is_empty());
        }
    }

    #[test]
    fn poisson_count_mean_on_unit_square() {
        let region = Region::unit_box_like(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let alpha = Intensity::new(5.0).unwrap();
        let reps = 10_000u64;
        let mut total = 0u64;
        for r in 0..reps {
            let mut rng = RngStream::new(99, r);
            total += sample_poisson(&region, alpha, &mut rng).len() as u64;
        }
        let emp = total as f64 / reps as f64;
        let se = (5.0f64 / reps as f64).sqrt();
        assert!((emp - 5.0).abs() < 4.0 * se, "{emp}");
    }

    #[test]
    fn rejection_sampler_outputs_are_hard_core() {
        let region = Region::interval(0.0, 1.0).unwrap();
        let bc = BoundaryCondition::free(region.clone());
        let lambda = Intensity::new(2.0).unwrap();
        let radius = InteractionRadius::new(0.6).unwrap();
        let mut rng = RngStream::new(5, 0);
        for _ in 0..500 {
            let c =
                sample_hard_sphere_rejection(&region, &bc, lambda, radius, &mut rng, 100_000)
                    .unwrap();
            assert!(hardcore::is_hard_core(&c, bc.points(), radius).unwrap());
            assert!(c.len() <= 2);
        }
    }

    #[test]
    fn rejection_with_zero_radius_is_poisson() {
        // R = 0: no rejection ever happens, counts match Poisson counts
        let region = Region::interval(0.0, 1.0).unwrap();
        let bc = BoundaryCondition::free(region.clone());
        let lambda = Intensity::new(3.0).unwrap();
        let radius = InteractionRadius::new(0.0).unwrap();
        let mut a = RngStream::new(11, 0);
        let mut b = RngStream::new(11, 0);
        for _ in 0..200 {
            let hs =
                sample_hard_sphere_rejection(&region, &bc, lambda, radius, &mut a, 10).unwrap();
            let poi = sample_poisson(&region, lambda, &mut b);
            assert_eq!(hs, poi);
        }
    }

    #[test]
    fn rejection_budget_error_carries_acceptance() {
        // interval too crowded: lambda*vol = 40 with R = 0.6 never accepts
        let region = Region::interval(0.0, 4.0).unwrap();
        let bc = BoundaryCondition::free(region.clone());
        let lambda = Intensity::new(10.0).unwrap();
        let radius = InteractionRadius::new(0.6).unwrap();
        let mut rng = RngStream::new(2, 0);
        let err = sample_hard_sphere_rejection(&region, &bc, lambda, radius, &mut rng, 200)
            .unwrap_err();
        assert!(matches!(err, Error::RejectionExhausted { attempts: 200, .. }));
    }
}
