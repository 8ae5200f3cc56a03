//! CSV exports for external plotting.

use std::fs::File;
use std::path::Path;

use super::run::RunReport;
use crate::coupling::{fmt, ProfileKind};
use crate::error::Result;

fn opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// Writes `statistics.csv`, one CSV per table and one per dependence
/// profile. Returns the file names written.
pub fn emit_plotdata(report: &RunReport, dir: &Path) -> Result<Vec<String>> {
    let mut written = Vec::new();

    let mut w = csv::Writer::from_path(dir.join("statistics.csv"))?;
    w.write_record(["name", "value", "stderr", "threshold", "passed"])?;
    for s in &report.statistics {
        w.write_record([s.name.clone(), fmt(s.value), opt(s.stderr), opt(s.threshold), s.passed.to_string()])?;
    }
    w.flush()?;
    written.push("statistics.csv".to_string());

    for t in &report.tables {
        let name = format!("{}.csv", t.name);
        let mut w = csv::Writer::from_path(dir.join(&name))?;
        w.write_record(&t.columns)?;
        for row in &t.rows {
            w.write_record(row.iter().map(|v| fmt(*v)))?;
        }
        w.flush()?;
        written.push(name);
    }

    for p in &report.profiles {
        let kind = match p.kind {
            ProfileKind::Gamma => "gamma",
            ProfileKind::Theta => "theta",
            ProfileKind::Tau => "tau",
        };
        let name = match p.coordinate {
            Some(c) => format!("profile_{kind}_{c}.csv"),
            None => format!("profile_{kind}.csv"),
        };
        p.write_csv(File::create(dir.join(&name))?)?;
        written.push(name);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::Table;

    #[test]
    fn empty_statistics_give_a_header_only_csv() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_plotdata(&RunReport::new("simulate", 1), dir.path()).unwrap();
        assert_eq!(files, vec!["statistics.csv"]);
        let text = std::fs::read_to_string(dir.path().join("statistics.csv")).unwrap();
        assert_eq!(text, "name,value,stderr,threshold,passed\n");
    }

    #[test]
    fn tables_keep_their_columns() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = RunReport::new("tightness", 1);
        r.tables.push(Table {
            name: "tail".into(),
            columns: vec!["lambda".into(), "lambda2_phat".into(), "stderr".into()],
            rows: vec![vec![2.0, 0.5, 0.01]],
        });
        emit_plotdata(&r, dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("tail.csv")).unwrap();
        assert_eq!(text, "lambda,lambda2_phat,stderr\n2.0,0.5,0.01\n");
    }
}
