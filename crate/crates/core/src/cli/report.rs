use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Version of the `report.json` layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 11] = [
    "id",
    "n",
    "N",
    "eps",
    "c_eps",
    "M_eps",
    "lhs_product",
    "rhs",
    "margin",
    "residual",
    "pass",
];

/// One `summary.csv` row; `None` fields are left empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SummaryRow {
    pub id: String,
    pub n: usize,
    pub grid: usize,
    pub eps: Option<f64>,
    pub c_eps: Option<f64>,
    pub m_eps: Option<f64>,
    pub lhs_product: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub residual: Option<f64>,
    pub pass: bool,
}

impl SummaryRow {
    fn record(&self) -> Vec<String> {
        let f = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        vec![
            self.id.clone(),
            self.n.to_string(),
            self.grid.to_string(),
            f(self.eps),
            f(self.c_eps),
            f(self.m_eps),
            f(self.lhs_product),
            f(self.rhs),
            f(self.margin),
            f(self.residual),
            self.pass.to_string(),
        ]
    }
}

#[derive(Serialize)]
struct Envelope<'a, B: Serialize> {
    schema_version: u32,
    command: &'a str,
    id: &'a str,
    seed: Option<u64>,
    pass: bool,
    #[serde(flatten)]
    body: &'a B,
}

fn ensure_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| {
        Error::Usage(format!(
            "cannot create output directory {}: {e}",
            out.display()
        ))
    })
}

/// Writes `report.json` (overwriting) under `out`.
pub fn write_report<B: Serialize>(
    out: &Path,
    command: &str,
    id: &str,
    seed: Option<u64>,
    pass: bool,
    body: &B,
) -> Result<()> {
    ensure_dir(out)?;
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        id,
        seed,
        pass,
        body,
    };
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    let path = out.join("report.json");
    fs::write(&path, text)
        .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Appends rows to `summary.csv` under `out`, writing the header when the file is new or empty.
pub fn append_summary(out: &Path, rows: &[SummaryRow]) -> Result<()> {
    ensure_dir(out)?;
    let path = out.join("summary.csv");
    let fresh = fs::metadata(&path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| Error::Usage(format!("cannot open {}: {e}", path.display())))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    if fresh {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes raw bytes under `out`.
pub fn write_blob(out: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    ensure_dir(out)?;
    let path = out.join(name);
    let mut f = fs::File::create(&path)
        .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    f.write_all(bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_summary_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        append_summary(dir.path(), &[]).unwrap();
        let text = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(
            text,
            "id,n,N,eps,c_eps,M_eps,lhs_product,rhs,margin,residual,pass\n"
        );
    }

    #[test]
    fn appends_without_repeating_header() {
        let dir = tempfile::tempdir().unwrap();
        let row = SummaryRow {
            id: "a".into(),
            n: 2,
            grid: 8,
            c_eps: Some(2.0),
            pass: true,
            ..Default::default()
        };
        append_summary(dir.path(), std::slice::from_ref(&row)).unwrap();
        append_summary(dir.path(), &[row]).unwrap();
        let text = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().nth(1).unwrap(), "a,2,8,,2e0,,,,,,true");
    }

    #[test]
    fn report_is_schema_versioned() {
        let dir = tempfile::tempdir().unwrap();
        write_report(
            dir.path(),
            "x",
            "id",
            Some(3),
            true,
            &serde_json::json!({"k": 1}),
        )
        .unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap())
                .unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["seed"], 3);
        assert_eq!(v["k"], 1);
    }
}
