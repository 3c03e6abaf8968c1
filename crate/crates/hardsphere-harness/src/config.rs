//! Flat key=value experiment configuration, overridable by CLI flags.
//!
//! Format: one `key = value` per line, `#` starts a comment. Points are
//! written as colon-separated coordinates, point lists as semicolon-
//! separated points, boxes as comma-separated `lo:hi` per dimension:
//!
//! ```text
//! # marginal test, exact 1D estimator
//! experiment = marginal
//! dim = 1
//! radius = 0.6
//! lambda = 2.0
//! box = 0:1
//! boundary1 =
//! replicas = 10000
//! n_mc = 0
//! seed = 42
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hardsphere_core::geometry::{AaBox, Configuration, Point, Region};
use hardsphere_core::hardcore::BoundaryCondition;
use hardsphere_core::partition::ThinningEstimator;
use hardsphere_core::sampling::Intensity;
use hardsphere_core::InteractionRadius;

use crate::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub dim: usize,
    pub radius: f64,
    pub lambda: f64,
    /// Intensity of the dominating / Boolean process; defaults to `lambda`.
    pub alpha: Option<f64>,
    /// Per-dimension `(lo, hi)`.
    pub box_spec: Vec<(f64, f64)>,
    pub boundary1: Vec<Vec<f64>>,
    pub boundary2: Vec<Vec<f64>>,
    /// Observation window for void-probability events, `(lo, hi)` per dim.
    pub window: Option<Vec<(f64, f64)>>,
    /// Distances for decay scans.
    pub distances: Vec<f64>,
    /// Box sides for sweeps.
    pub box_sides: Vec<f64>,
    /// Intensity grid for sweeps.
    pub alpha_grid: Vec<f64>,
    pub replicas: u64,
    /// Monte Carlo draws per thinning decision; 0 selects the exact 1D
    /// estimator.
    pub n_mc: u32,
    pub seed: u64,
    pub max_attempts: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: String::new(),
            dim: 1,
            radius: 0.5,
            lambda: 1.0,
            alpha: None,
            box_spec: vec![(0.0, 1.0)],
            boundary1: Vec::new(),
            boundary2: Vec::new(),
            window: None,
            distances: Vec::new(),
            box_sides: Vec::new(),
            alpha_grid: Vec::new(),
            replicas: 1000,
            n_mc: 20_000,
            seed: 1,
            max_attempts: 10_000_000,
            threads: None,
            out: None,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| HarnessError::Parse(format!("{key}: expected a number, got '{v}'")))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.trim()
        .parse()
        .map_err(|_| HarnessError::Parse(format!("{key}: expected an integer, got '{v}'")))
}

/// `0:1,0:2` -> [(0,1), (0,2)]
pub fn parse_box(v: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for part in v.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (lo, hi) = part
            .split_once(':')
            .ok_or_else(|| HarnessError::Parse(format!("box side '{part}' is not lo:hi")))?;
        out.push((parse_f64("box", lo)?, parse_f64("box", hi)?));
    }
    if out.is_empty() {
        return Err(HarnessError::Parse("box must have at least one dimension".into()));
    }
    Ok(out)
}

/// `-0.1:0.5; 1.2:0.3` -> [[-0.1, 0.5], [1.2, 0.3]]
pub fn parse_points(v: &str) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for part in v.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let coords: Result<Vec<f64>> = part.split(':').map(|c| parse_f64("point", c)).collect();
        out.push(coords?);
    }
    Ok(out)
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Apply one key=value pair.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "experiment" => self.experiment = v.to_string(),
            "dim" => self.dim = parse_u64(key, v)? as usize,
            "radius" => self.radius = parse_f64(key, v)?,
            "lambda" => self.lambda = parse_f64(key, v)?,
            "alpha" => self.alpha = Some(parse_f64(key, v)?),
            "box" => self.box_spec = parse_box(v)?,
            "boundary1" => self.boundary1 = parse_points(v)?,
            "boundary2" => self.boundary2 = parse_points(v)?,
            "window" => self.window = Some(parse_box(v)?),
            "distances" => self.distances = parse_list(key, v)?,
            "box_sides" => self.box_sides = parse_list(key, v)?,
            "alpha_grid" => self.alpha_grid = parse_list(key, v)?,
            "replicas" => self.replicas = parse_u64(key, v)?,
            "n_mc" => self.n_mc = parse_u64(key, v)? as u32,
            "seed" => self.seed = parse_u64(key, v)?,
            "max_attempts" => self.max_attempts = parse_u64(key, v)?,
            "threads" => self.threads = Some(parse_u64(key, v)? as usize),
            "out" => self.out = Some(PathBuf::from(v)),
            other => {
                return Err(HarnessError::Parse(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Parse(format!("line {}: expected key = value", ln + 1))
            })?;
            cfg.set(key.trim(), value)?;
        }
        Ok(cfg)
    }

    pub fn parse_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(HarnessError::Parse("replicas must be at least 1".into()));
        }
        if self.box_spec.len() != self.dim {
            return Err(HarnessError::Parse(format!(
                "box has {} dimensions but dim = {}",
                self.box_spec.len(),
                self.dim
            )));
        }
        for p in self.boundary1.iter().chain(&self.boundary2) {
            if p.len() != self.dim {
                return Err(HarnessError::Parse(format!(
                    "boundary point {p:?} does not have dimension {}",
                    self.dim
                )));
            }
        }
        Ok(())
    }

    pub fn region(&self) -> Result<Region> {
        let lo: Vec<f64> = self.box_spec.iter().map(|s| s.0).collect();
        let hi: Vec<f64> = self.box_spec.iter().map(|s| s.1).collect();
        Ok(Region::from_box(AaBox::new(&lo, &hi)?))
    }

    pub fn window_region(&self) -> Result<Option<AaBox>> {
        match &self.window {
            None => Ok(None),
            Some(spec) => {
                let lo: Vec<f64> = spec.iter().map(|s| s.0).collect();
                let hi: Vec<f64> = spec.iter().map(|s| s.1).collect();
                Ok(Some(AaBox::new(&lo, &hi)?))
            }
        }
    }

    fn boundary(&self, points: &[Vec<f64>], region: &Region) -> Result<BoundaryCondition> {
        let pts: hardsphere_core::Result<Vec<Point>> =
            points.iter().map(|c| Point::new(c)).collect();
        Ok(BoundaryCondition::new(Configuration::new(pts?)?, region.clone())?)
    }

    pub fn boundary1(&self, region: &Region) -> Result<BoundaryCondition> {
        self.boundary(&self.boundary1, region)
    }

    pub fn boundary2(&self, region: &Region) -> Result<BoundaryCondition> {
        self.boundary(&self.boundary2, region)
    }

    pub fn lambda_intensity(&self) -> Result<Intensity> {
        Ok(Intensity::new(self.lambda)?)
    }

    pub fn alpha_intensity(&self) -> Result<Intensity> {
        Ok(Intensity::new(self.alpha.unwrap_or(self.lambda))?)
    }

    pub fn interaction_radius(&self) -> Result<InteractionRadius> {
        Ok(InteractionRadius::new(self.radius)?)
    }

    pub fn estimator(&self) -> ThinningEstimator {
        if self.n_mc == 0 {
            ThinningEstimator::Exact1d
        } else {
            ThinningEstimator::MonteCarlo { n_mc: self.n_mc }
        }
    }

    /// Key=value echo for reports; deterministic order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let fmt_box = |spec: &[(f64, f64)]| {
            spec.iter().map(|(a, b)| format!("{a}:{b}")).collect::<Vec<_>>().join(",")
        };
        let fmt_pts = |pts: &[Vec<f64>]| {
            pts.iter()
                .map(|p| p.iter().map(f64::to_string).collect::<Vec<_>>().join(":"))
                .collect::<Vec<_>>()
                .join("; ")
        };
        let fmt_list = |xs: &[f64]| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        kv.insert("experiment".into(), self.experiment.clone());
        kv.insert("dim".into(), self.dim.to_string());
        kv.insert("radius".into(), self.radius.to_string());
        kv.insert("lambda".into(), self.lambda.to_string());
        if let Some(a) = self.alpha {
            kv.insert("alpha".into(), a.to_string());
        }
        kv.insert("box".into(), fmt_box(&self.box_spec));
        kv.insert("boundary1".into(), fmt_pts(&self.boundary1));
        kv.insert("boundary2".into(), fmt_pts(&self.boundary2));
        if let Some(w) = &self.window {
            kv.insert("window".into(), fmt_box(w));
        }
        if !self.distances.is_empty() {
            kv.insert("distances".into(), fmt_list(&self.distances));
        }
        if !self.box_sides.is_empty() {
            kv.insert("box_sides".into(), fmt_list(&self.box_sides));
        }
        if !self.alpha_grid.is_empty() {
            kv.insert("alpha_grid".into(), fmt_list(&self.alpha_grid));
        }
        kv.insert("replicas".into(), self.replicas.to_string());
        kv.insert("n_mc".into(), self.n_mc.to_string());
        kv.insert("seed".into(), self.seed.to_string());
        kv.into_iter().collect()
    }
}
