//! Tabular (x, y…) series written out as CSV.

use std::fmt;
use std::io::Write;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    MHz,
    Microseconds,
    Dimensionless,
}

impl Unit {
    pub fn suffix(self) -> &'static str {
        match self {
            Unit::MHz => "MHz",
            Unit::Microseconds => "us",
            Unit::Dimensionless => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub label: String,
    pub unit: Unit,
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(label: impl Into<String>, unit: Unit, values: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            unit,
            values,
        }
    }
}

/// One x axis and any number of y columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub x: Column,
    pub y: Vec<Column>,
}

impl SweepCurve {
    pub fn new(x: Column, y: Vec<Column>) -> Result<Self> {
        if x.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain(format!("{} values must be strictly increasing", x.label)));
        }
        if let Some(bad) = y.iter().find(|c| c.values.len() != x.values.len()) {
            return Err(domain(format!(
                "column {} has {} values, expected {}",
                bad.label,
                bad.values.len(),
                x.values.len()
            )));
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.values.is_empty()
    }

    pub fn column(&self, label: &str) -> Option<&[f64]> {
        self.y.iter().find(|c| c.label == label).map(|c| c.values.as_slice())
    }

    /// Header row followed by one row per x value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<&str> = std::iter::once(&self.x).chain(&self.y).map(|c| c.label.as_str()).collect();
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.len() {
            write!(out, "{}", CsvNumber(self.x.values[i]))?;
            for c in &self.y {
                write!(out, ",{}", CsvNumber(c.values[i]))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Shortest round-trip decimal form; `inf`/`-inf`/`nan` for non-finite values.
pub struct CsvNumber(pub f64);

impl fmt::Display for CsvNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0;
        if v.is_nan() {
            f.write_str("nan")
        } else if v.is_infinite() {
            f.write_str(if v > 0.0 { "inf" } else { "-inf" })
        } else {
            write!(f, "{v:?}")
        }
    }
}
