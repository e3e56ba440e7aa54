//! Convergence tables and their CSV/JSON forms.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

use super::config::StudyEcho;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub errors: Vec<f64>,
    /// Empty on the first row.
    pub ecr: Vec<Option<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportMeta {
    pub config: StudyEcho,
    pub settings: String,
    pub wall_time_s: f64,
    pub special_fn_check: String,
    pub threads: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub method: String,
    /// Name of each error column, e.g. `E_lambda`.
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<ReportMeta>,
}

/// log2(previous / current)
pub fn ecr(previous: f64, current: f64) -> f64 {
    (previous / current).log2()
}

impl ConvergenceReport {
    /// Build rows from per-N errors and compute e.c.r. columns.
    pub fn from_errors(method: String, columns: Vec<String>, entries: Vec<(usize, Vec<f64>)>) -> Self {
        let mut rows: Vec<ReportRow> = Vec::with_capacity(entries.len());
        for (n, errors) in entries {
            let ecr_row = match rows.last() {
                Some(prev) => prev.errors.iter().zip(&errors).map(|(p, c)| Some(ecr(*p, *c))).collect(),
                None => vec![None; errors.len()],
            };
            rows.push(ReportRow { n, errors, ecr: ecr_row });
        }
        ConvergenceReport {
            method,
            columns,
            rows,
            warnings: Vec::new(),
            meta: None,
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.errors[i]).collect())
    }

    /// Recompute every e.c.r. from the error column and compare.
    pub fn check_ecr(&self) -> Result<()> {
        for w in self.rows.windows(2) {
            for (i, e) in w[1].ecr.iter().enumerate() {
                let expected = ecr(w[0].errors[i], w[1].errors[i]);
                let same = match e {
                    Some(v) => v == &expected || (v.is_nan() && expected.is_nan()),
                    None => false,
                };
                if !same {
                    return Err(Error::InvalidParameter(format!(
                        "e.c.r. mismatch at N = {} column {}",
                        w[1].n,
                        i + 1
                    )));
                }
            }
        }
        if let Some(first) = self.rows.first() {
            if first.ecr.iter().any(Option::is_some) {
                return Err(Error::InvalidParameter("e.c.r. on the first row".into()));
            }
        }
        Ok(())
    }

    /// `N,error_1,ecr_1,...`; errors with 5 significant digits. Metadata,
    /// when present, precedes the header as `#` lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        self.check_ecr()?;
        if let Some(meta) = &self.meta {
            writeln!(w, "# method: {}", self.method)?;
            for (i, c) in self.columns.iter().enumerate() {
                writeln!(w, "# error_{}: {}", i + 1, c)?;
            }
            writeln!(w, "# curve: {}", meta.config.curve)?;
            writeln!(w, "# eps: {}", meta.config.eps)?;
            writeln!(w, "# special functions: {}", meta.special_fn_check)?;
            writeln!(w, "# wall time: {:.3} s", meta.wall_time_s)?;
            for warning in &self.warnings {
                writeln!(w, "# warning: {warning}")?;
            }
        }
        let mut header = vec!["N".to_string()];
        for i in 1..=self.columns.len() {
            header.push(format!("error_{i}"));
            header.push(format!("ecr_{i}"));
        }
        writeln!(w, "{}", header.join(","))?;
        for row in &self.rows {
            let mut fields = vec![row.n.to_string()];
            for (e, r) in row.errors.iter().zip(&row.ecr) {
                fields.push(format!("{e:.4e}"));
                fields.push(r.map(|v| format!("{v:.4}")).unwrap_or_default());
            }
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        self.check_ecr()?;
        serde_json::to_writer_pretty(&mut w, self).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut out = Vec::new();
        self.write_csv(&mut out)?;
        Ok(String::from_utf8(out).expect("ascii output"))
    }
}
