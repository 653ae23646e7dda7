//! Result bundles and their CSV form.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;

/// Values on a rectangular grid, stored row-major (`values[i][j]` at `axis1[i], axis2[j]`).
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub title: String,
    pub axis1_label: String,
    pub axis2_label: String,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Plot {
    Heatmap {
        table: usize,
    },
    Lines {
        name: String,
        title: String,
        xlabel: String,
        ylabel: String,
        series: Vec<Series>,
    },
    Bars {
        name: String,
        title: String,
        ylabel: String,
        categories: Vec<String>,
        series: Vec<Series>,
    },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bundle {
    pub scalars: Vec<(String, f64)>,
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
    /// Step sizes actually used, recorded in the provenance block.
    pub steps: Vec<(String, f64)>,
}

impl Bundle {
    pub fn scalar(&mut self, name: impl Into<String>, v: f64) {
        self.scalars.push((name.into(), v));
    }
}

/// Twelve significant digits in scientific notation.
pub fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // −0 prints as 0 so reruns never differ in sign of zero
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

pub fn scalar_csv(scalars: &[(String, f64)]) -> String {
    let mut s = String::from("name,value\n");
    for (k, v) in scalars {
        let _ = writeln!(s, "{k},{}", fmt_value(*v));
    }
    s
}

pub fn table_csv(t: &Table) -> String {
    let mut s = String::from("axis1,axis2,value\n");
    for (i, row) in t.values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", fmt_value(t.axis1[i]), fmt_value(t.axis2[j]), fmt_value(*v));
        }
    }
    s
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
