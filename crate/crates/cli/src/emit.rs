//! Report files: pretty JSON, comma-separated tables with a header row and
//! `%.17g` numbers, and the manifest listing them.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// `x` formatted like C's `%.17g`: 17 significant digits, trailing zeros
/// dropped, exponent form when the decimal exponent is below -4 or above 16.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Empty for `None`.
pub fn format_opt(x: Option<f64>) -> String {
    x.map(format_g17).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| format_g17(x)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Json { name: String, value: Value },
    Csv { name: String, table: CsvTable },
}

impl Artifact {
    pub fn json(name: &str, value: &impl Serialize) -> Self {
        Artifact::Json { name: name.into(), value: serde_json::to_value(value).expect("reports serialize") }
    }

    pub fn csv(name: &str, table: CsvTable) -> Self {
        Artifact::Csv { name: name.into(), table }
    }

    pub fn name(&self) -> &str {
        match self {
            Artifact::Json { name, .. } | Artifact::Csv { name, .. } => name,
        }
    }

    fn render(&self) -> String {
        match self {
            Artifact::Json { value, .. } => pretty(value),
            Artifact::Csv { table, .. } => table.render(),
        }
    }
}

pub fn pretty(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes every artifact into `out_dir`, then `manifest.json` with the
/// `files` entry listing them. Returns the written file names.
pub fn emit_report(out_dir: &Path, artifacts: &[Artifact], mut manifest: Value) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut files = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        write(&out_dir.join(a.name()), &a.render())?;
        files.push(a.name().to_owned());
    }
    if let Value::Object(map) = &mut manifest {
        map.insert("files".into(), Value::from(files.clone()));
    }
    write(&out_dir.join("manifest.json"), &pretty(&manifest))?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g17() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (1.0 / 3.0, "0.33333333333333331"),
            (123456789.0, "123456789"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (0.0001, "0.0001"),
            (6.02214076e23, "6.0221407599999999e+23"),
            (0.0, "0"),
            (f64::NAN, "nan"),
            (f64::NEG_INFINITY, "-inf"),
        ];
        for (x, expected) in cases {
            assert_eq!(format_g17(x), expected, "{x}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for x in [std::f64::consts::PI, 1e-300, -7.25e-9, 4.0e15 + 0.5, f64::MAX, f64::MIN_POSITIVE] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_has_header_and_empty_optionals() {
        let mut t = CsvTable::new(["k", "eta"]);
        t.push(vec![format_g17(0.5), format_opt(None)]);
        assert_eq!(t.render(), "k,eta\n0.5,\n");
    }

    #[test]
    fn empty_report_list_writes_only_the_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(dir.path(), &[], serde_json::json!({"kind": "none"})).unwrap();
        assert!(files.is_empty());
        let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names, vec![std::ffi::OsString::from("manifest.json")]);
        let manifest: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["files"], serde_json::json!([]));
    }
}
