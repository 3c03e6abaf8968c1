//! File formats. Every schema starts with a `# hardsphere-<kind> v1`
//! comment line; floats are written in shortest round-trip form so that
//! parse(render(x)) == x exactly.
//!
//! * sample records: one line per replica,
//!   `replica=<id> seed=<seed> stream=<id> points=<pts>`;
//! * coupling records: same with `points1= points2= points3=`;
//! * points: coordinates joined by `:`, points joined by `,`, empty `-`;
//! * sweep rows, decay rows, and the bounds table: CSV with fixed headers.

use std::io::Write;

use hardsphere_core::coupling::CouplingSample;
use hardsphere_core::geometry::{Configuration, Point};
use hardsphere_core::percolation::SweepRow;
use hardsphere_core::bounds::BoundsRow;
use hardsphere_core::partition::Estimate;

use crate::{HarnessError, Result};

pub const SAMPLES_HEADER: &str = "# hardsphere-samples v1";
pub const COUPLE_HEADER: &str = "# hardsphere-couple v1";
pub const SWEEP_HEADER: &str = "# hardsphere-sweep v1";
pub const DECAY_HEADER: &str = "# hardsphere-decay v1";
pub const BOUNDS_HEADER: &str = "# hardsphere-bounds v1";

pub fn format_points(c: &Configuration) -> String {
    if c.is_empty() {
        return "-".to_string();
    }
    c.points()
        .iter()
        .map(|p| {
            p.coords()
                .iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(":")
        })
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_points_field(s: &str) -> Result<Configuration> {
    if s == "-" || s.is_empty() {
        return Ok(Configuration::empty());
    }
    let mut pts = Vec::new();
    for tok in s.split(',') {
        let coords: std::result::Result<Vec<f64>, _> =
            tok.split(':').map(str::parse::<f64>).collect();
        let coords =
            coords.map_err(|_| HarnessError::Parse(format!("bad point '{tok}'")))?;
        pts.push(Point::new(&coords)?);
    }
    Ok(Configuration::new(pts)?)
}

fn field<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.split_whitespace()
        .find_map(|tok| tok.strip_prefix(key).and_then(|rest| rest.strip_prefix('=')))
        .ok_or_else(|| HarnessError::Parse(format!("missing field '{key}' in '{line}'")))
}

/// One plain sample record.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub replica: u64,
    pub seed: u64,
    pub stream: u64,
    pub points: Configuration,
}

pub fn write_sample_records<W: Write>(w: &mut W, records: &[SampleRecord]) -> Result<()> {
    writeln!(w, "{SAMPLES_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "replica={} seed={} stream={} points={}",
            r.replica,
            r.seed,
            r.stream,
            format_points(&r.points)
        )?;
    }
    Ok(())
}

pub fn parse_sample_records(text: &str) -> Result<Vec<SampleRecord>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(SampleRecord {
            replica: field(line, "replica")?
                .parse()
                .map_err(|_| HarnessError::Parse("bad replica".into()))?,
            seed: field(line, "seed")?
                .parse()
                .map_err(|_| HarnessError::Parse("bad seed".into()))?,
            stream: field(line, "stream")?
                .parse()
                .map_err(|_| HarnessError::Parse("bad stream".into()))?,
            points: parse_points_field(field(line, "points")?)?,
        });
    }
    Ok(out)
}

/// A coupling record, as serialized: the triple plus provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupleRecord {
    pub replica: u64,
    pub seed: u64,
    pub stream: u64,
    pub points1: Configuration,
    pub points2: Configuration,
    pub points3: Configuration,
}

impl CoupleRecord {
    pub fn from_sample(replica: u64, s: &CouplingSample) -> Self {
        CoupleRecord {
            replica,
            seed: s.seed,
            stream: s.stream_id,
            points1: s.xi1.clone(),
            points2: s.xi2.clone(),
            points3: s.xi3.clone(),
        }
    }
}

pub fn write_couple_records<W: Write>(w: &mut W, records: &[CoupleRecord]) -> Result<()> {
    writeln!(w, "{COUPLE_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "replica={} seed={} stream={} points1={} points2={} points3={}",
            r.replica,
            r.seed,
            r.stream,
            format_points(&r.points1),
            format_points(&r.points2),
            format_points(&r.points3)
        )?;
    }
    Ok(())
}

pub fn parse_couple_records(text: &str) -> Result<Vec<CoupleRecord>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(CoupleRecord {
            replica: field(line, "replica")?
                .parse()
                .map_err(|_| HarnessError::Parse("bad replica".into()))?,
            seed: field(line, "seed")?
                .parse()
                .map_err(|_| HarnessError::Parse("bad seed".into()))?,
            stream: field(line, "stream")?
                .parse()
                .map_err(|_| HarnessError::Parse("bad stream".into()))?,
            points1: parse_points_field(field(line, "points1")?)?,
            points2: parse_points_field(field(line, "points2")?)?,
            points3: parse_points_field(field(line, "points3")?)?,
        });
    }
    Ok(out)
}

pub fn render_sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut out = format!("{SWEEP_HEADER}\n");
    out.push_str("dimension,radius,intensity,box_side,replicas,statistic,value,std_error\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:?},{:?},{:?},{},{},{:?},{:?}\n",
            r.dimension, r.radius, r.intensity, r.box_side, r.replicas, r.statistic, r.value,
            r.std_error
        ));
    }
    Ok(out)
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| HarnessError::Parse(format!("csv: {e}")))?;
        if rec.len() != 8 {
            return Err(HarnessError::Parse(format!("sweep row needs 8 fields: {rec:?}")));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| HarnessError::Parse(format!("bad number '{}'", &rec[i])))
        };
        out.push(SweepRow {
            dimension: rec[0]
                .parse()
                .map_err(|_| HarnessError::Parse("bad dimension".into()))?,
            radius: num(1)?,
            intensity: num(2)?,
            box_side: num(3)?,
            replicas: rec[4]
                .parse()
                .map_err(|_| HarnessError::Parse("bad replicas".into()))?,
            statistic: rec[5].to_string(),
            value: num(6)?,
            std_error: num(7)?,
        });
    }
    Ok(out)
}

/// Decay rows `(distance, estimate)` as CSV.
pub fn render_decay_csv(rows: &[(f64, Estimate)]) -> String {
    let mut out = format!("{DECAY_HEADER}\ndistance,value,std_error\n");
    for (t, e) in rows {
        out.push_str(&format!("{t:?},{:?},{:?}\n", e.mean, e.std_error));
    }
    out
}

pub fn parse_decay_csv(text: &str) -> Result<Vec<(f64, Estimate)>> {
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| HarnessError::Parse(format!("csv: {e}")))?;
        if rec.len() != 3 {
            return Err(HarnessError::Parse("decay row needs distance,value,std_error".into()));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| HarnessError::Parse(format!("bad number '{}'", &rec[i])))
        };
        out.push((num(0)?, Estimate::mc_plain(num(1)?, num(2)?, 0)));
    }
    Ok(out)
}

pub fn render_bounds_csv(rows: &[BoundsRow]) -> String {
    let mut out = format!("{BOUNDS_HEADER}\ndimension,quantity,lower,upper,source\n");
    for r in rows {
        let side = |v: Option<f64>| match v {
            None => String::new(),
            Some(x) if x.is_infinite() => "inf".to_string(),
            Some(x) => format!("{x:.6}"),
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.dimension,
            r.quantity,
            side(r.lower),
            side(r.upper),
            r.source.replace(',', ";")
        ));
    }
    out
}

/// Plain-text alignment of the bounds table for terminal output.
pub fn render_bounds_text(rows: &[BoundsRow]) -> String {
    let mut out = String::new();
    let side = |v: Option<f64>| match v {
        None => "-".to_string(),
        Some(x) if x.is_infinite() => "inf".to_string(),
        Some(x) => format!("{x:.6}"),
    };
    out.push_str(&format!(
        "{:<42} {:>12} {:>12}  {}\n",
        "quantity", "lower", "upper", "source"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<42} {:>12} {:>12}  {}\n",
            r.quantity,
            side(r.lower),
            side(r.upper),
            r.source
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(coords: &[&[f64]]) -> Configuration {
        Configuration::new(coords.iter().map(|c| Point::new(c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn sample_records_round_trip() {
        let records = vec![
            SampleRecord { replica: 0, seed: 42, stream: 0, points: cfg(&[&[0.1, 0.2]]) },
            SampleRecord {
                replica: 1,
                seed: 42,
                stream: 1,
                points: cfg(&[&[0.30000000000000004, 0.7], &[0.5, 0.25]]),
            },
            SampleRecord { replica: 2, seed: 42, stream: 2, points: Configuration::empty() },
        ];
        let mut buf = Vec::new();
        write_sample_records(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(SAMPLES_HEADER));
        let back = parse_sample_records(&text).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn couple_records_round_trip() {
        let records = vec![CoupleRecord {
            replica: 7,
            seed: 1,
            stream: 7,
            points1: cfg(&[&[0.125]]),
            points2: Configuration::empty(),
            points3: cfg(&[&[0.125], &[0.875]]),
        }];
        let mut buf = Vec::new();
        write_couple_records(&mut buf, &records).unwrap();
        let back = parse_couple_records(&String::from_utf8(buf).unwrap()).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn sweep_csv_round_trip() {
        let rows = vec![
            SweepRow {
                dimension: 2,
                radius: 1.0,
                intensity: 0.3000000000000004,
                box_side: 20.0,
                replicas: 400,
                statistic: "spanning_probability".into(),
                value: 0.4525,
                std_error: 0.024888,
            },
            SweepRow {
                dimension: 1,
                radius: 0.5,
                intensity: 2.0,
                box_side: 50.0,
                replicas: 100,
                statistic: "spanning_probability".into(),
                value: 0.0,
                std_error: 0.0,
            },
        ];
        let text = render_sweep_csv(&rows).unwrap();
        assert!(text.starts_with(SWEEP_HEADER));
        let back = parse_sweep_csv(&text).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn decay_csv_round_trip() {
        let rows = vec![
            (0.75, Estimate::mc_plain(0.0063, 0.0011, 0)),
            (1.5, Estimate::mc_plain(0.00054, 0.0011, 0)),
        ];
        let text = render_decay_csv(&rows);
        let back = parse_decay_csv(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].0, rows[0].0);
        assert_eq!(back[0].1.mean, rows[0].1.mean);
        assert_eq!(back[1].1.std_error, rows[1].1.std_error);
    }

    #[test]
    fn bounds_renderings_contain_values() {
        let rows = hardsphere_core::bounds::bounds_table(2, 1.0).unwrap();
        let csv = render_bounds_csv(&rows);
        assert!(csv.contains("0.174000"));
        assert!(csv.contains("0.358000"));
        let txt = render_bounds_text(&rows);
        assert!(txt.contains("critical_intensity_high_confidence"));
    }
}
