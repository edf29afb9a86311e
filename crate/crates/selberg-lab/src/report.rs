//! Serialized experiment reports: JSON / CSV rendering, atomic file output,
//! and plot-data extraction.

use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::{Error, Result};

/// Report metadata. Wall-clock runtime is deliberately absent: reports must
/// be byte-identical across re-runs, so the runtime goes to stderr instead.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportMeta {
    pub library_version: String,
    pub columns: Vec<String>,
}

/// Full result of one experiment run. Rows are row-major numeric values in
/// the column order given by `meta.columns`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<Vec<f64>>,
    pub meta: ReportMeta,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig, columns: Vec<&str>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let columns: Vec<String> = columns.into_iter().map(str::to_string).collect();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::NumericValidation(format!(
                    "row {i} has {} values for {} columns",
                    row.len(),
                    columns.len()
                )));
            }
            for (value, name) in row.iter().zip(&columns) {
                if !value.is_finite() {
                    return Err(Error::NumericValidation(format!(
                        "row {i} column '{name}' is not finite: {value}"
                    )));
                }
            }
        }
        Ok(ExperimentReport {
            config,
            rows,
            meta: ReportMeta {
                library_version: env!("CARGO_PKG_VERSION").to_string(),
                columns,
            },
        })
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.meta
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Config {
                field: "metric".into(),
                message: format!("no column '{name}'; have {:?}", self.meta.columns),
            })
    }

    /// JSON rendering: a single object with `config`, `rows`, `meta` keys.
    /// Floats use the shortest decimal representation that round-trips.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// CSV rendering with a mandatory header row; same shortest round-trip
    /// float formatting as the JSON output.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.meta.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Writes the report atomically: temp file in the target directory, then
    /// rename over the destination.
    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<()> {
        let rendered = self.render(format);
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
        let file_name = path
            .file_name()
            .ok_or_else(|| Error::Config {
                field: "out".into(),
                message: format!("output path '{}' has no file name", path.display()),
            })?
            .to_string_lossy();
        let tmp = match dir {
            Some(d) => d.join(format!(".{file_name}.tmp")),
            None => Path::new(&format!(".{file_name}.tmp")).to_path_buf(),
        };
        {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(rendered.as_bytes())?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Abscissa transform for plot-data extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotAxis {
    /// Identity: x = T.
    T,
    /// x = 1/log log T.
    LogLogTInv,
    /// x = 1/√(log log T).
    LogLogTInvSqrt,
}

impl PlotAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "T" => Ok(PlotAxis::T),
            "loglogT_inv" => Ok(PlotAxis::LogLogTInv),
            "loglogT_invsqrt" => Ok(PlotAxis::LogLogTInvSqrt),
            other => Err(Error::Config {
                field: "x_axis".into(),
                message: format!("unknown axis '{other}'"),
            }),
        }
    }

    pub fn transform(self, t: f64) -> f64 {
        match self {
            PlotAxis::T => t,
            PlotAxis::LogLogTInv => 1.0 / t.ln().ln(),
            PlotAxis::LogLogTInvSqrt => 1.0 / t.ln().ln().sqrt(),
        }
    }
}

/// Two-column (transformed x, metric) table for external plotting. The
/// report must carry a `t` column and the requested metric column.
pub fn emit_plotdata(
    report: &ExperimentReport,
    x_axis: PlotAxis,
    metric: &str,
) -> Result<Vec<(f64, f64)>> {
    if report.rows.is_empty() {
        return Err(Error::NumericValidation("report has no rows".into()));
    }
    let t_col = report.column_index("t")?;
    let m_col = report.column_index(metric)?;
    Ok(report
        .rows
        .iter()
        .map(|row| (x_axis.transform(row[t_col]), row[m_col]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> ExperimentReport {
        let config = ExperimentConfig::defaults("onedim");
        ExperimentReport::new(
            config,
            vec!["t", "d_k"],
            vec![vec![1e3, 0.07], vec![1e6, 0.04]],
        )
        .unwrap()
    }

    #[test]
    fn json_has_required_keys() {
        let json = sample_report().to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(v.get("config").is_some());
        assert!(v.get("rows").is_some());
        assert!(v.get("meta").is_some());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let csv = sample_report().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,d_k");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn float_formatting_round_trips() {
        let x = 0.1 + 0.2;
        let s = format!("{x}");
        assert_eq!(s.parse::<f64>().unwrap(), x);
        // shortest representation, not 17 digits of noise
        assert_eq!(s, "0.30000000000000004");
    }

    #[test]
    fn non_finite_rejected() {
        let config = ExperimentConfig::defaults("onedim");
        let r = ExperimentReport::new(config, vec!["t"], vec![vec![f64::NAN]]);
        assert!(r.is_err());
    }

    #[test]
    fn atomic_write_and_reread() {
        let path = std::env::temp_dir().join("selberg-lab-report-test.json");
        let report = sample_report();
        report.write(&path, OutputFormat::Json).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, report.to_json());
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn plotdata_transforms() {
        let report = sample_report();
        let table = emit_plotdata(&report, PlotAxis::LogLogTInv, "d_k").unwrap();
        assert!((table[0].0 - 1.0 / (1e3_f64).ln().ln()).abs() < 1e-15);
        assert!((table[0].0 - 0.518).abs() < 2e-3);
        assert!((table[1].0 - 0.381).abs() < 2e-3);
        let ident = emit_plotdata(&report, PlotAxis::T, "d_k").unwrap();
        assert_eq!(ident[0].0, 1e3);
        assert!(emit_plotdata(&report, PlotAxis::T, "nope").is_err());
    }
}
