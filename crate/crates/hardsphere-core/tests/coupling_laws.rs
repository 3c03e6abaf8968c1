//! Statistical checks of the coupling marginals against the exact 1D law
//! and of the thinning identities, at module-test scale. The acceptance
//! suite runs the full-size versions.

use hardsphere_core::coupling::{thin_to_hard_sphere, twisted_couple};
use hardsphere_core::geometry::{Configuration, InteractionRadius, Point, Region};
use hardsphere_core::hardcore::BoundaryCondition;
use hardsphere_core::partition::{
    count_law_1d, partition_series_1d, thinning_probability, ThinningEstimator,
};
use hardsphere_core::sampling::{sample_poisson, Intensity, RngStream};

fn pt(x: f64) -> Point {
    Point::new(&[x]).unwrap()
}

fn lam(v: f64) -> Intensity {
    Intensity::new(v).unwrap()
}

fn rad(r: f64) -> InteractionRadius {
    InteractionRadius::new(r).unwrap()
}

/// Assert an empirical histogram matches a law within z standard errors.
fn assert_histogram_matches(hist: &[u64], reps: u64, law: &[f64], z: f64, tag: &str) {
    for (n, &target) in law.iter().enumerate() {
        let emp = hist.get(n).copied().unwrap_or(0) as f64 / reps as f64;
        let se = (target * (1.0 - target) / reps as f64).sqrt().max(1e-12);
        assert!(
            (emp - target).abs() <= z * se || (emp - target).abs() < 5e-3,
            "{tag}: count {n}: empirical {emp:.4} vs exact {target:.4} (se {se:.4})"
        );
    }
}

#[test]
fn thinning_count_law_exact_estimator() {
    let region = Region::interval(0.0, 1.0).unwrap();
    let bc = BoundaryCondition::free(region.clone());
    let (lambda, radius) = (lam(2.0), rad(0.6));
    let law = count_law_1d(&region, &bc, lambda, radius, 3).unwrap();
    assert!((law[0] - 0.3012048192771084).abs() < 1e-12);

    let reps = 6_000u64;
    let mut hist = [0u64; 4];
    for s in 0..reps {
        let mut rng = RngStream::new(1000, s);
        let pair = thin_to_hard_sphere(
            &region, &bc, lambda, radius, ThinningEstimator::Exact1d, &mut rng,
        )
        .unwrap();
        hist[pair.kept.len().min(3)] += 1;
        assert!(pair.kept.is_subset_of(&pair.dominating));
    }
    assert_histogram_matches(&hist, reps, &law, 4.0, "thinning exact estimator");
}

#[test]
fn thinning_count_law_mc_estimator() {
    // the paired ratio estimator has O(1/n_mc) bias; at n_mc = 2000 that is
    // far below the binomial resolution of 4000 replicas
    let region = Region::interval(0.0, 1.0).unwrap();
    let bc = BoundaryCondition::free(region.clone());
    let (lambda, radius) = (lam(2.0), rad(0.6));
    let law = count_law_1d(&region, &bc, lambda, radius, 3).unwrap();

    let reps = 4_000u64;
    let mut hist = [0u64; 4];
    for s in 0..reps {
        let mut rng = RngStream::new(1100, s);
        let pair = thin_to_hard_sphere(
            &region,
            &bc,
            lambda,
            radius,
            ThinningEstimator::MonteCarlo { n_mc: 2000 },
            &mut rng,
        )
        .unwrap();
        hist[pair.kept.len().min(3)] += 1;
    }
    assert_histogram_matches(&hist, reps, &law, 4.0, "thinning mc estimator");
}

#[test]
fn twisted_marginal_count_laws() {
    // region [0,1], R = 0.3, lambda = 1, conditions empty vs {-0.1}: each
    // marginal must follow its own exact hard-sphere law
    let region = Region::interval(0.0, 1.0).unwrap();
    let c1 = BoundaryCondition::free(region.clone());
    let c2 = BoundaryCondition::new(
        Configuration::new(vec![pt(-0.1)]).unwrap(),
        region.clone(),
    )
    .unwrap();
    let (lambda, radius) = (lam(1.0), rad(0.3));
    let law1 = count_law_1d(&region, &c1, lambda, radius, 4).unwrap();
    let law2 = count_law_1d(&region, &c2, lambda, radius, 4).unwrap();
    assert!((law1[0] - 0.44332709596738584).abs() < 1e-12);
    assert!((law2[0] - 0.5191209551825575).abs() < 1e-12);

    let reps = 6_000u64;
    let mut h1 = [0u64; 5];
    let mut h2 = [0u64; 5];
    let mut h3 = [0u64; 5];
    for s in 0..reps {
        let mut rng = RngStream::new(1200, s);
        let (sample, _) = twisted_couple(
            &region, &c1, &c2, lambda, radius, ThinningEstimator::Exact1d, &mut rng,
        )
        .unwrap();
        h1[sample.xi1.len().min(4)] += 1;
        h2[sample.xi2.len().min(4)] += 1;
        h3[sample.xi3.len().min(4)] += 1;
    }
    assert_histogram_matches(&h1, reps, &law1, 4.0, "twisted xi1");
    assert_histogram_matches(&h2, reps, &law2, 4.0, "twisted xi2");
    // xi3 is Poisson(1) on the unit interval
    let e = std::f64::consts::E;
    let poisson_law = [1.0 / e, 1.0 / e, 0.5 / e, 1.0 / (6.0 * e)];
    assert_histogram_matches(&h3, reps, &poisson_law, 4.0, "twisted xi3");
}

#[test]
fn interval_identity_quick() {
    // thinning every Poisson point of (a,b) leaves the ratio of partition
    // functions of the order-upper remainders
    let region = Region::interval(0.0, 1.0).unwrap();
    let (lambda, radius) = (lam(2.0), rad(0.3));
    let boundary = Configuration::new(vec![pt(-0.05)]).unwrap();
    let bc = BoundaryCondition::new(boundary, region.clone()).unwrap();
    let y_prime = Configuration::new(vec![pt(0.15)]).unwrap();
    let (a, b) = (0.2, 0.7);

    let upper_b = region.with_cut_after(&pt(b));
    let upper_a = region.with_cut_after(&pt(a));
    let cond_full = bc
        .points()
        .union_disjoint(&y_prime)
        .unwrap();
    let bc_full = BoundaryCondition::new(cond_full, Region::interval(2.0, 1.0).unwrap()).unwrap();
    let z_hi = partition_series_1d(&upper_b, &bc_full, lambda, radius).unwrap().mean;
    let z_lo = partition_series_1d(&upper_a, &bc_full, lambda, radius).unwrap().mean;
    let rhs = z_hi / z_lo;
    assert!((rhs - 0.7191011235955056).abs() < 1e-12, "{rhs}");

    let window = Region::interval(a, b).unwrap();
    let reps = 30_000u64;
    let mut acc = 0.0;
    let mut acc2 = 0.0;
    for s in 0..reps {
        let mut rng = RngStream::new(1300, s);
        let draw = sample_poisson(&window, lambda, &mut rng);
        let mut product = 1.0;
        for z in draw.points() {
            let remaining = region.with_cut_after(z);
            let p = thinning_probability(
                z,
                &bc,
                &y_prime,
                &remaining,
                lambda,
                radius,
                ThinningEstimator::Exact1d,
                &mut rng,
            )
            .unwrap();
            product *= 1.0 - p.mean;
        }
        acc += product;
        acc2 += product * product;
    }
    let mean = acc / reps as f64;
    let var = (acc2 / reps as f64 - mean * mean).max(0.0);
    let se = (var / reps as f64).sqrt();
    assert!(
        (mean - rhs).abs() <= 4.0 * se,
        "interval identity: mc {mean:.5} vs exact {rhs:.5} (se {se:.5})"
    );
}

#[test]
fn sum_product_identity_small_sets() {
    // Σ over kept-subsets of the product of the per-point choice factors is
    // exactly 1; probabilities from the exact 1D oracle
    let region = Region::interval(0.0, 1.0).unwrap();
    let bc = BoundaryCondition::free(region.clone());
    let (lambda, radius) = (lam(2.0), rad(0.6));
    let z_pts = [0.15, 0.5, 0.85];
    let x_pts = [0.33];
    let mut total = 0.0;
    for mask in 0u32..(1 << z_pts.len()) {
        let mut product = 1.0;
        for (i, &zx) in z_pts.iter().enumerate() {
            let kept_in_y = mask & (1 << i) != 0;
            // W = X ∪ Y restricted to points before zx
            let mut w: Vec<Point> = Vec::new();
            for &xx in &x_pts {
                if xx < zx {
                    w.push(pt(xx));
                }
            }
            for (j, &zy) in z_pts.iter().enumerate() {
                if mask & (1 << j) != 0 && zy < zx {
                    w.push(pt(zy));
                }
            }
            let before = Configuration::new(w).unwrap();
            let remaining = region.with_cut_after(&pt(zx));
            let mut rng = RngStream::new(0, 0);
            let p = thinning_probability(
                &pt(zx),
                &bc,
                &before,
                &remaining,
                lambda,
                radius,
                ThinningEstimator::Exact1d,
                &mut rng,
            )
            .unwrap()
            .mean;
            product *= if kept_in_y { p } else { 1.0 - p };
        }
        total += product;
    }
    assert!((total - 1.0).abs() < 1e-12, "sum-product total {total}");
}
