//! File formats for batch outputs: CSV tables (RFC 4180, CRLF, `.`
//! decimal, shortest round-trip float formatting) and JSON report records.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::alexandrov::AlphaTable;
use crate::bounds::ParityTrial;
use crate::flux::Parallel;
use crate::profile::{DelaunayProfile, Extremum, ProfileCurve};
use crate::Result;

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(out)
}

/// `s,y,z,psi,I` — one row per sample. The `I` column is empty for
/// relations without a first integral.
pub fn write_profile_csv<W: Write>(out: W, curve: &ProfileCurve) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["s", "y", "z", "psi", "I"])?;
    for (i, p) in curve.samples.iter().enumerate() {
        let i_val = curve
            .first_integral_values
            .get(i)
            .map(|v| v.to_string())
            .unwrap_or_default();
        w.write_record([
            p.s.to_string(),
            p.y.to_string(),
            p.z.to_string(),
            p.psi.to_string(),
            i_val,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `s,y,z,kind` for located extrema.
pub fn write_extrema_csv<W: Write>(out: W, extrema: &[Extremum]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["s", "y", "z", "kind"])?;
    for e in extrema {
        w.write_record([
            e.s.to_string(),
            e.y.to_string(),
            e.z.to_string(),
            format!("{:?}", e.kind).to_lowercase(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `t,alpha` rows of an α table.
pub fn write_alpha_csv<W: Write>(out: W, table: &AlphaTable) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["t", "alpha"])?;
    for (t, a) in table.heights.iter().zip(table.alpha.iter()) {
        w.write_record([t.to_string(), a.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `seed,loop_count,nonzero_windings,verdict` per parity trial.
pub fn write_parity_csv<W: Write>(out: W, trials: &[ParityTrial]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["seed", "loop_count", "nonzero_windings", "verdict"])?;
    for t in trials {
        w.write_record([
            t.seed.to_string(),
            t.loop_count.to_string(),
            t.nonzero_count.to_string(),
            if t.pass { "PASS" } else { "FAIL" }.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per family member of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub neck_r: f64,
    pub r_big: f64,
    pub period: f64,
    pub first_integral: f64,
    pub mass: f64,
    /// |R + r − 2a|
    pub radii_residual: f64,
}

impl SweepRow {
    pub fn from_profile(prof: &DelaunayProfile, a: f64, b: f64) -> Self {
        Self {
            neck_r: prof.r_small,
            r_big: prof.r_big,
            period: prof.period,
            first_integral: prof.i0,
            mass: std::f64::consts::PI * (prof.r_big * prof.r_small + b),
            radii_residual: (prof.r_big + prof.r_small - 2.0 * a).abs(),
        }
    }
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["neck_r", "R", "period", "I", "mass", "radii_residual"])?;
    for r in rows {
        w.write_record([
            r.neck_r.to_string(),
            r.r_big.to_string(),
            r.period.to_string(),
            r.first_integral.to_string(),
            r.mass.to_string(),
            r.radii_residual.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Closed-form vs quadrature comparison at one parallel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FluxRecord {
    pub parallel: Parallel,
    pub closed_form: f64,
    pub quadrature: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FluxReport {
    pub a: f64,
    pub b: f64,
    pub records: Vec<FluxRecord>,
    /// π(R·r + b) for the swept member.
    pub mass: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{integrate_profile, ProfileState};
    use crate::relation::WeingartenRelation;

    #[test]
    fn profile_csv_is_rfc4180() {
        let rel = WeingartenRelation::linear(1.0, 1.0).unwrap();
        let curve =
            integrate_profile(ProfileState::new(0.0, 1.0, 0.0, 0.0), &rel, 1.0, 1e-9).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &curve).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,y,z,psi,I\r\n"));
        assert!(text.ends_with("\r\n"));
        // Values round-trip through their decimal representation.
        let second_line = text.lines().nth(1).unwrap();
        let y: f64 = second_line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(y, curve.samples[0].y);
    }

    #[test]
    fn parity_csv_shape() {
        let trials = vec![crate::bounds::ParityTrial {
            seed: 7,
            loop_count: 2,
            nonzero_count: 2,
            pass: true,
        }];
        let mut buf = Vec::new();
        write_parity_csv(&mut buf, &trials).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "seed,loop_count,nonzero_windings,verdict\r\n7,2,2,PASS\r\n"
        );
    }
}
