//! Reference constants: rigorous and high-confidence windows for the
//! critical intensity of the Boolean model and for the cluster-expansion
//! radius of the hard-sphere gas, as collected in the percolation and
//! statistical mechanics literature. All finite entries scale as R^{-d}.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One row of the constants table. `lower`/`upper` are `None` when that side
/// is not known; infinities are genuine (no percolation in one dimension).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsRow {
    pub dimension: u32,
    pub quantity: &'static str,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub source: &'static str,
}

/// Volume of the unit ball in d dimensions, by the two-step recurrence
/// v_d = 2 pi v_{d-2} / d with v_0 = 1, v_1 = 2.
pub fn ball_volume_coeff(d: u32) -> f64 {
    let mut even = 1.0; // v_0
    let mut odd = 2.0; // v_1
    if d == 0 {
        return even;
    }
    let mut k = if d % 2 == 0 { 0 } else { 1 };
    let mut v = if d % 2 == 0 { even } else { odd };
    while k < d {
        k += 2;
        v = if k % 2 == 0 {
            even *= 2.0 * core::f64::consts::PI / k as f64;
            even
        } else {
            odd *= 2.0 * core::f64::consts::PI / k as f64;
            odd
        };
    }
    v
}

/// The constants table for one dimension and interaction radius.
pub fn bounds_table(dimension: u32, radius: f64) -> Result<Vec<BoundsRow>> {
    if dimension == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1"));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter("radius must be finite and positive"));
    }
    let d = dimension;
    let vd = ball_volume_coeff(d);
    let rd = crate::fmath::powi(radius, d as i32);
    let e = core::f64::consts::E;
    let mut rows = Vec::new();

    match d {
        1 => {
            rows.push(BoundsRow {
                dimension: d,
                quantity: "critical_intensity",
                lower: Some(f64::INFINITY),
                upper: Some(f64::INFINITY),
                source: "Meester & Roy (1996), Thm 3.1",
            });
            rows.push(BoundsRow {
                dimension: d,
                quantity: "cluster_expansion_radius",
                lower: Some(1.0 / (e * radius)),
                upper: Some(1.0 / (e * radius)),
                source: "exact (one-dimensional gas)",
            });
        }
        2 => {
            let r2 = radius * radius;
            rows.push(BoundsRow {
                dimension: d,
                quantity: "critical_intensity",
                lower: Some(0.174 / r2),
                upper: Some(0.843 / r2),
                source: "Meester & Roy (1996), Thm 3.10",
            });
            rows.push(BoundsRow {
                dimension: d,
                quantity: "critical_intensity_high_confidence",
                lower: Some(0.358 / r2),
                upper: None,
                source: "Balister, Bollobas & Walters (2005); Mertens & Moore (2012)",
            });
            rows.push(BoundsRow {
                dimension: d,
                quantity: "cluster_expansion_radius",
                lower: Some(0.1625 / r2),
                upper: Some(2.0 / (e * core::f64::consts::PI * r2)),
                source: "Fernandez, Procacci & Scoppola (2007); Ruelle (1969)",
            });
        }
        _ => {}
    }
    rows.push(BoundsRow {
        dimension: d,
        quantity: "cluster_expansion_radius_general",
        lower: Some(1.0 / (e * vd * rd)),
        upper: Some(2.0 / (vd * rd)),
        source: "Ruelle (1969), Sect. 4.5",
    });
    rows.push(BoundsRow {
        dimension: d,
        quantity: "critical_intensity_asymptotic_scale",
        lower: Some(1.0 / (vd * rd)),
        upper: Some(1.0 / (vd * rd)),
        source: "Penrose (1996): lambda_c * v_d * R^d -> 1 as d -> inf",
    });
    rows.push(BoundsRow {
        dimension: d,
        quantity: "cluster_expansion_asymptotic_scale",
        lower: Some(1.0 / (e * vd * rd)),
        upper: Some(1.0 / (e * vd * rd)),
        source: "conjectured: R_ce * v_d * R^d -> 1/e (not a bound)",
    });
    Ok(rows)
}
