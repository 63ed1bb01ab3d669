//! Participation-weighted dielectric loss budget.
//!
//! 1/T1 = ω Σ_i P_i tanδ_i + Γ0, with ω = 2π f the angular qubit frequency.
//! This is the only place in the crate that works with angular frequency.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::curve::{Column, SweepCurve, Unit};
use crate::error::{domain, Error, Result};

/// Sum of participations may exceed one by at most this much.
pub const PARTICIPATION_SLACK: f64 = 1e-6;
pub const PARTICIPATION_HEADER: &str = "thickness_um,P_planar,P_tsv";

const BUNDLED_TABLE: &str = include_str!("../data/sige_participation.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DielectricChannel {
    pub name: String,
    pub participation: f64,
    pub loss_tangent: f64,
}

impl DielectricChannel {
    pub fn new(name: impl Into<String>, participation: f64, loss_tangent: f64) -> Self {
        Self {
            name: name.into(),
            participation,
            loss_tangent,
        }
    }

    /// Q_i = 1/tanδ_i.
    pub fn quality_factor(&self) -> f64 {
        1.0 / self.loss_tangent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossModel {
    pub channels: Vec<DielectricChannel>,
    /// Residual decay rate Γ0 in 1/s.
    pub gamma0: f64,
    /// Qubit frequency in GHz (ordinary, not angular).
    pub frequency_ghz: f64,
}

impl LossModel {
    pub fn validate(&self) -> Result<()> {
        for c in &self.channels {
            if !(0.0..=1.0).contains(&c.participation) {
                return Err(domain(format!("channel {}: participation {} outside [0, 1]", c.name, c.participation)));
            }
            if !(c.loss_tangent >= 0.0 && c.loss_tangent.is_finite()) {
                return Err(domain(format!("channel {}: loss tangent {} must be non-negative", c.name, c.loss_tangent)));
            }
        }
        let total: f64 = self.channels.iter().map(|c| c.participation).sum();
        if total > 1.0 + PARTICIPATION_SLACK {
            return Err(domain(format!("participations sum to {total}, above 1")));
        }
        if !(self.gamma0 >= 0.0 && self.gamma0.is_finite()) {
            return Err(domain(format!("gamma0 must be non-negative, got {}", self.gamma0)));
        }
        if !(self.frequency_ghz > 0.0 && self.frequency_ghz.is_finite()) {
            return Err(domain(format!("frequency must be positive, got {} GHz", self.frequency_ghz)));
        }
        Ok(())
    }

    pub fn angular_frequency(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.frequency_ghz * 1e9
    }

    /// Σ P_i tanδ_i.
    pub fn dielectric_loss(&self) -> f64 {
        self.channels.iter().map(|c| c.participation * c.loss_tangent).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    /// Dielectric-only quality factor 1/Σ P_i tanδ_i.
    pub q_dielectric: f64,
    /// ω·T1, including Γ0.
    pub q_total: f64,
    pub t1_us: f64,
}

/// Infinite values stand in for a loss-free budget.
pub fn total_quality(model: &LossModel) -> Result<QualityReport> {
    model.validate()?;
    let loss = model.dielectric_loss();
    let omega = model.angular_frequency();
    let rate = omega * loss + model.gamma0;
    let q_dielectric = if loss == 0.0 { f64::INFINITY } else { 1.0 / loss };
    let (t1_us, q_total) = if rate == 0.0 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (1e6 / rate, omega / rate)
    };
    Ok(QualityReport {
        q_dielectric,
        q_total,
        t1_us,
    })
}

/// Q_TSV/Q_planar when both designs share every loss channel except SiGe,
/// where the planar design has the larger participation:
/// 1/Q_planar = 1/Q_TSV + (P_planar − P_tsv) tanδ, so
/// ratio = 1 + Q_TSV (P_planar − P_tsv) tanδ.
pub fn q_ratio(p_planar: f64, p_tsv: f64, tan_delta: f64, q_tsv: f64) -> f64 {
    1.0 + q_tsv * (p_planar - p_tsv) * tan_delta
}

pub const Q_RATIO_MODEL: &str = "shared-residual-loss";

pub fn q_ratio_curve(p_planar: f64, p_tsv: f64, tan_delta: f64, qtsv_grid: &[f64]) -> Result<SweepCurve> {
    for (name, p) in [("P_planar", p_planar), ("P_tsv", p_tsv)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("{name} = {p} outside [0, 1]")));
        }
    }
    if p_planar < p_tsv {
        return Err(domain(format!(
            "P_planar ({p_planar}) must be at least P_tsv ({p_tsv}) for the shared-loss model"
        )));
    }
    if !(tan_delta >= 0.0 && tan_delta.is_finite()) {
        return Err(domain(format!("loss tangent must be non-negative, got {tan_delta}")));
    }
    if qtsv_grid.iter().any(|q| !(*q > 0.0)) {
        return Err(domain("Q_TSV grid values must be positive"));
    }
    SweepCurve::new(
        Column::new("Q_TSV", Unit::Dimensionless, qtsv_grid.to_vec()),
        vec![Column::new(
            "Q_TSV_over_Q_planar",
            Unit::Dimensionless,
            qtsv_grid.iter().map(|&q| q_ratio(p_planar, p_tsv, tan_delta, q)).collect(),
        )],
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticipationRow {
    pub thickness_um: f64,
    pub p_planar: f64,
    pub p_tsv: f64,
}

/// SiGe participation against layer thickness for both designs.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticipationTable {
    pub rows: Vec<ParticipationRow>,
    pub provenance: String,
}

impl ParticipationTable {
    /// The curated table shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TABLE).expect("bundled participation table is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        load_participation_table(text.as_bytes())
    }

    /// (P_planar, P_tsv) by linear interpolation in thickness, held constant
    /// outside the tabulated range.
    pub fn interpolate(&self, thickness_um: f64) -> (f64, f64) {
        let rows = &self.rows;
        let first = rows[0];
        let last = rows[rows.len() - 1];
        if thickness_um <= first.thickness_um {
            return (first.p_planar, first.p_tsv);
        }
        if thickness_um >= last.thickness_um {
            return (last.p_planar, last.p_tsv);
        }
        let k = rows.partition_point(|r| r.thickness_um <= thickness_um);
        let (a, b) = (rows[k - 1], rows[k]);
        let t = (thickness_um - a.thickness_um) / (b.thickness_um - a.thickness_um);
        (a.p_planar + t * (b.p_planar - a.p_planar), a.p_tsv + t * (b.p_tsv - a.p_tsv))
    }
}

/// Reads the `thickness_um,P_planar,P_tsv` format. Lines starting with `#`
/// are comments; the first one must carry the provenance note.
pub fn load_participation_table<R: BufRead>(source: R) -> Result<ParticipationTable> {
    let mut provenance: Option<String> = None;
    let mut header_seen = false;
    let mut rows: Vec<ParticipationRow> = Vec::new();

    for (k, line) in source.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if provenance.is_none() {
                let note = comment.trim();
                if note.is_empty() {
                    return Err(parse_err(line_no, "first comment must carry a provenance note"));
                }
                provenance = Some(note.to_string());
            }
            continue;
        }
        if !header_seen {
            if trimmed.replace(' ', "") != PARTICIPATION_HEADER {
                return Err(parse_err(line_no, format!("expected header `{PARTICIPATION_HEADER}`, got `{trimmed}`")));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(line_no, format!("expected 3 fields, got {}", fields.len())));
        }
        let mut values = [0.0; 3];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field
                .parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("`{field}` is not a number")))?;
            if !slot.is_finite() {
                return Err(parse_err(line_no, format!("`{field}` is not finite")));
            }
        }
        let row = ParticipationRow {
            thickness_um: values[0],
            p_planar: values[1],
            p_tsv: values[2],
        };
        for (name, p) in [("P_planar", row.p_planar), ("P_tsv", row.p_tsv)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(parse_err(line_no, format!("{name} = {p} outside [0, 1]")));
            }
        }
        if let Some(prev) = rows.last() {
            if !(row.thickness_um > prev.thickness_um) {
                return Err(parse_err(
                    line_no,
                    format!("thickness {} does not increase past {}", row.thickness_um, prev.thickness_um),
                ));
            }
        }
        rows.push(row);
    }

    let provenance = provenance.ok_or_else(|| parse_err(1, "missing provenance comment"))?;
    if rows.is_empty() {
        return Err(parse_err(1, "table has no data rows"));
    }
    Ok(ParticipationTable { rows, provenance })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single(p: f64, tan: f64, gamma0: f64, f: f64) -> LossModel {
        LossModel {
            channels: vec![DielectricChannel::new("SiGe", p, tan)],
            gamma0,
            frequency_ghz: f,
        }
    }

    #[test]
    fn sige_only_budget() {
        let r = total_quality(&single(0.05, 1.6e-5, 0.0, 5.0)).unwrap();
        assert!((r.q_dielectric - 1.25e6).abs() < 1e-6);
        // 1.25e6 / (2π · 5e9 Hz) = 39.789 μs
        assert!((r.t1_us - 39.789).abs() < 1e-3, "{}", r.t1_us);
        assert!((r.q_total / r.q_dielectric - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_gamma0_budget() {
        let model = LossModel {
            channels: vec![],
            gamma0: 1e4,
            frequency_ghz: 5.0,
        };
        let r = total_quality(&model).unwrap();
        assert_eq!(r.t1_us, 100.0);
        assert_eq!(r.q_dielectric, f64::INFINITY);
        let lossless = LossModel { gamma0: 0.0, ..model };
        assert_eq!(total_quality(&lossless).unwrap().t1_us, f64::INFINITY);
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(total_quality(&single(1.2, 1e-5, 0.0, 5.0)).is_err());
        assert!(total_quality(&single(0.5, -1e-5, 0.0, 5.0)).is_err());
        assert!(total_quality(&single(0.5, 1e-5, -1.0, 5.0)).is_err());
        assert!(total_quality(&single(0.5, 1e-5, 0.0, 0.0)).is_err());
        let over = LossModel {
            channels: vec![DielectricChannel::new("a", 0.7, 1e-6), DielectricChannel::new("b", 0.4, 1e-6)],
            gamma0: 0.0,
            frequency_ghz: 5.0,
        };
        assert!(total_quality(&over).is_err());
    }

    #[test]
    fn q_ratio_examples() {
        let c = q_ratio_curve(0.30, 0.05, 1.6e-5, &[1e6]).unwrap();
        assert!((c.column("Q_TSV_over_Q_planar").unwrap()[0] - 5.0).abs() < 1e-12);
        let same = q_ratio_curve(0.2, 0.2, 1.6e-5, &[1e3, 1e6, 1e9]).unwrap();
        assert!(same.column("Q_TSV_over_Q_planar").unwrap().iter().all(|r| *r == 1.0));
        assert!((q_ratio(0.3, 0.05, 1.6e-5, 1e-12) - 1.0).abs() < 1e-12);
        assert!(q_ratio_curve(0.05, 0.3, 1.6e-5, &[1e6]).is_err());
        assert!(q_ratio_curve(0.3, 0.05, 1.6e-5, &[0.0]).is_err());
    }

    #[test]
    fn bundled_table_saturates_near_five_percent() {
        let t = ParticipationTable::bundled();
        assert!(!t.provenance.is_empty());
        let (planar, tsv) = t.interpolate(30.0);
        assert!((tsv - 0.05).abs() < 0.005, "{tsv}");
        assert!(planar > tsv);
        for r in t.rows.iter().filter(|r| r.thickness_um < 10.0) {
            assert!(r.p_planar >= 9.0 * r.p_tsv);
        }
    }

    #[test]
    fn interpolation_and_extrapolation() {
        let t = ParticipationTable::parse("# note\nthickness_um,P_planar,P_tsv\n1,0.1,0.01\n3,0.3,0.03\n").unwrap();
        let (p, q) = t.interpolate(2.0);
        assert!((p - 0.2).abs() < 1e-12 && (q - 0.02).abs() < 1e-12);
        assert_eq!(t.interpolate(0.5), (0.1, 0.01));
        assert_eq!(t.interpolate(10.0), (0.3, 0.03));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = |s: &str| match ParticipationTable::parse(s) {
            Err(Error::Parse { line, message }) => (line, message),
            other => panic!("expected parse error, got {other:?}"),
        };
        assert!(ParticipationTable::parse("").is_err());
        assert_eq!(err("# n\nthickness_um,P_planar,P_tsv\n1,1.5,0.1\n").0, 3);
        assert_eq!(err("# n\nthickness_um,P_planar,P_tsv\n2,0.1,0.1\n1,0.1,0.1\n").0, 4);
        assert_eq!(err("# n\nthickness_um,P_planar,P_tsv\n1,abc,0.1\n").0, 3);
        assert_eq!(err("# n\nthickness_um,P_planar,P_tsv\n1,0.1\n").0, 3);
        assert_eq!(err("# n\nthickness,P,Q\n").0, 2);
        assert!(err("thickness_um,P_planar,P_tsv\n1,0.1,0.1\n").1.contains("provenance"));
        assert!(err("#\nthickness_um,P_planar,P_tsv\n1,0.1,0.1\n").1.contains("provenance"));
    }

    proptest! {
        #[test]
        fn t1_never_increases_with_more_loss(
            p in 0.0f64..0.5, tan in 0.0f64..1e-3, g0 in 0.0f64..1e5,
            dp in 0.0f64..0.5, dtan in 0.0f64..1e-3, dg in 0.0f64..1e5,
        ) {
            let base = total_quality(&single(p, tan, g0, 5.0)).unwrap().t1_us;
            let worse = total_quality(&single(p + dp, tan + dtan, g0 + dg, 5.0)).unwrap().t1_us;
            prop_assert!(worse <= base);
        }

        #[test]
        fn t1_times_omega_is_q(p in 1e-4f64..1.0, tan in 1e-8f64..1e-3, f in 0.1f64..20.0) {
            let m = single(p, tan, 0.0, f);
            let r = total_quality(&m).unwrap();
            let product = r.t1_us * 1e-6 * m.angular_frequency();
            prop_assert!((product / r.q_dielectric - 1.0).abs() < 1e-9);
        }

        #[test]
        fn q_ratio_is_affine_with_unit_intercept(
            pt in 0.0f64..0.5, dp in 0.0f64..0.5, tan in 0.0f64..1e-4, q in 1.0f64..1e8,
        ) {
            let pp = pt + dp;
            let slope = (pp - pt) * tan;
            prop_assert!((q_ratio(pp, pt, tan, 0.0) - 1.0).abs() <= 1e-12);
            let r = q_ratio(pp, pt, tan, q);
            prop_assert!((r - (1.0 + slope * q)).abs() <= 1e-12 * r);
        }
    }
}
