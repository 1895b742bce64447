//! Published reference errors and comparison of measured runs against them.
//!
//! The constants live in `reference.csv`, embedded at compile time and
//! checked against a frozen SHA-256 digest before use.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::basis::BasisFamily;
use crate::benchmarks::ErrorReport;
use crate::error::{Error, Result};

const REFERENCE_CSV: &str = include_str!("reference.csv");

/// SHA-256 of `reference.csv`.
pub const REFERENCE_SHA256: &str = "ab8a0086ae897e3e5dcee49f611f158a69c482417b4f21c27ddd5c39a9bfebc6";

/// One published row.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRow {
    pub table: u8,
    /// Parameter block within the table, e.g. `alpha=0.05 beta=0.8`.
    pub block: String,
    pub method: String,
    /// `None` for competing schemes.
    pub basis: Option<BasisFamily>,
    /// Nodes per direction, when the table is indexed by node count.
    pub n: Option<usize>,
    pub h: Option<f64>,
    /// `None` means `dt = h^2`.
    pub dt: Option<f64>,
    pub linf: Option<f64>,
    pub roc_linf: Option<f64>,
    pub l2: Option<f64>,
    pub roc_l2: Option<f64>,
}

impl ReferenceRow {
    pub fn key(&self) -> String {
        let grid = match (self.n, self.h) {
            (Some(n), _) => format!("N={n}"),
            (None, Some(h)) => format!("h={h}"),
            _ => "-".into(),
        };
        let method = self.basis.map(|b| b.to_string()).unwrap_or_else(|| self.method.clone());
        format!("{}/{}/{}/{}", self.table, self.block, method, grid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    rows: Vec<ReferenceRow>,
    digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn parse_opt<T: std::str::FromStr>(field: &str, line: usize, name: &str) -> Result<Option<T>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::InvalidConfiguration(format!("reference line {line}: bad {name} '{field}'")))
}

impl ReferenceTable {
    /// The embedded table, digest-checked.
    pub fn embedded() -> Result<Self> {
        Self::from_csv(REFERENCE_CSV, REFERENCE_SHA256)
    }

    /// Parse `text` after checking it hashes to `expected_sha256`.
    pub fn from_csv(text: &str, expected_sha256: &str) -> Result<Self> {
        let digest = sha256_hex(text.as_bytes());
        if digest != expected_sha256 {
            return Err(Error::ReferenceDigest { expected: expected_sha256.to_string(), actual: digest });
        }
        let mut rows = Vec::new();
        for (k, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 12 {
                return Err(Error::InvalidConfiguration(format!(
                    "reference line {}: expected 12 fields, found {}",
                    k + 1,
                    f.len()
                )));
            }
            let line_no = k + 1;
            let table = f[0]
                .parse()
                .map_err(|_| Error::InvalidConfiguration(format!("reference line {line_no}: bad table id")))?;
            let basis = match f[3] {
                "-" => None,
                name => Some(BasisFamily::from_name(name, parse_opt(f[4], line_no, "param")?)?),
            };
            let dt = if f[7] == "h2" { None } else { parse_opt(f[7], line_no, "dt")? };
            rows.push(ReferenceRow {
                table,
                block: f[1].to_string(),
                method: f[2].to_string(),
                basis,
                n: parse_opt(f[5], line_no, "n")?,
                h: parse_opt(f[6], line_no, "h")?,
                dt,
                linf: parse_opt(f[8], line_no, "linf")?,
                roc_linf: parse_opt(f[9], line_no, "roc_linf")?,
                l2: parse_opt(f[10], line_no, "l2")?,
                roc_l2: parse_opt(f[11], line_no, "roc_l2")?,
            });
        }
        Ok(Self { rows, digest })
    }

    pub fn rows(&self) -> &[ReferenceRow] {
        &self.rows
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// The row for `basis` at the grid of `report` (node count or spacing).
    pub fn find(&self, key: &RowKey, report: &ErrorReport) -> Option<&ReferenceRow> {
        self.rows.iter().find(|r| {
            r.table == key.table
                && r.block == key.block
                && r.basis.is_some_and(|b| same_basis(b, key.basis))
                && match (r.n, r.h) {
                    (Some(n), _) => n == report.n,
                    (None, Some(h)) => (h - report.h).abs() <= 1e-9 * h,
                    _ => false,
                }
        })
    }
}

fn same_basis(a: BasisFamily, b: BasisFamily) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0);
    match (a, b) {
        (BasisFamily::Trigonometric, BasisFamily::Trigonometric) => true,
        (BasisFamily::Exponential { p: x }, BasisFamily::Exponential { p: y }) => close(x, y),
        (BasisFamily::Extended { lambda: x }, BasisFamily::Extended { lambda: y }) => close(x, y),
        _ => false,
    }
}

/// Which published row a measured report corresponds to.
#[derive(Debug, Clone, PartialEq)]
pub struct RowKey {
    pub table: u8,
    pub block: String,
    pub basis: BasisFamily,
}

/// Pass bands: errors within a multiplicative factor, orders within an
/// absolute band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    pub error_factor: f64,
    pub roc_band: f64,
}

impl TolerancePolicy {
    pub const DEFAULT: TolerancePolicy = TolerancePolicy { error_factor: 3.0, roc_band: 0.5 };
    pub const ORDER_OF_MAGNITUDE: TolerancePolicy = TolerancePolicy { error_factor: 10.0, roc_band: 0.5 };

    pub fn error_ok(&self, measured: f64, reference: f64) -> bool {
        measured > 0.0
            && reference > 0.0
            && measured <= reference * self.error_factor
            && reference <= measured * self.error_factor
    }

    pub fn roc_ok(&self, measured: f64, reference: f64) -> bool {
        (measured - reference).abs() <= self.roc_band
    }
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Linf,
    L2,
    RocLinf,
    RocL2,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Linf => "linf",
            Quantity::L2 => "l2",
            Quantity::RocLinf => "roc_linf",
            Quantity::RocL2 => "roc_l2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: Quantity,
    pub measured: f64,
    pub reference: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Compared(Vec<Comparison>),
    /// No matching row, or nothing measurable to compare.
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowComparison {
    pub key: String,
    pub outcome: Outcome,
}

impl RowComparison {
    /// True when compared and every quantity passed. Skipped rows are not
    /// passes.
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, Outcome::Compared(c) if !c.is_empty() && c.iter().all(|x| x.pass))
    }
}

/// Compare every quantity present on both sides.
pub fn compare_to_reference(
    report: &ErrorReport,
    reference: &ReferenceTable,
    key: &RowKey,
    policy: TolerancePolicy,
) -> RowComparison {
    let label = format!("{}/{}/{}/N={}", key.table, key.block, key.basis, report.n);
    let Some(row) = reference.find(key, report) else {
        return RowComparison { key: label, outcome: Outcome::Skipped("no reference row".into()) };
    };
    let pairs = [
        (Quantity::Linf, report.linf, row.linf),
        (Quantity::L2, report.l2, row.l2),
        (Quantity::RocLinf, report.roc_linf, row.roc_linf),
        (Quantity::RocL2, report.roc_l2, row.roc_l2),
    ];
    let comparisons: Vec<Comparison> = pairs
        .iter()
        .filter_map(|&(q, m, r)| {
            let (m, r) = (m?, r?);
            let pass = match q {
                Quantity::Linf | Quantity::L2 => policy.error_ok(m, r),
                Quantity::RocLinf | Quantity::RocL2 => policy.roc_ok(m, r),
            };
            Some(Comparison { quantity: q, measured: m, reference: r, pass })
        })
        .collect();
    let outcome = if comparisons.is_empty() {
        Outcome::Skipped("no quantity present on both sides".into())
    } else {
        Outcome::Compared(comparisons)
    };
    RowComparison { key: row.key(), outcome }
}

/// Markdown diff table.
pub fn diff_markdown(rows: &[RowComparison]) -> String {
    let mut s = String::from("| row | quantity | measured | reference | ratio | result |\n|---|---|---|---|---|---|\n");
    for r in rows {
        match &r.outcome {
            Outcome::Skipped(why) => {
                let _ = writeln!(s, "| {} | - | - | - | - | skipped: {why} |", r.key);
            }
            Outcome::Compared(cs) => {
                for c in cs {
                    let _ = writeln!(
                        s,
                        "| {} | {} | {:.5e} | {:.5e} | {:.3} | {} |",
                        r.key,
                        c.quantity.name(),
                        c.measured,
                        c.reference,
                        c.measured / c.reference,
                        if c.pass { "pass" } else { "FAIL" }
                    );
                }
            }
        }
    }
    s
}

pub const DIFF_CSV_HEADER: &str = "row,quantity,measured,reference,pass";

/// CSV diff; skipped rows carry an empty quantity and `skipped` in the
/// pass column.
pub fn diff_csv(rows: &[RowComparison]) -> String {
    let mut s = format!("{DIFF_CSV_HEADER}\n");
    for r in rows {
        match &r.outcome {
            Outcome::Skipped(_) => {
                let _ = writeln!(s, "\"{}\",,,,skipped", r.key);
            }
            Outcome::Compared(cs) => {
                for c in cs {
                    let _ = writeln!(
                        s,
                        "\"{}\",{},{:.5e},{:.5e},{}",
                        r.key,
                        c.quantity.name(),
                        c.measured,
                        c.reference,
                        c.pass
                    );
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(basis: BasisFamily, n: usize, h: f64, linf: f64) -> ErrorReport {
        ErrorReport {
            basis,
            n,
            h,
            dt: 0.0,
            steps: 0,
            t_final: 1.0,
            linf: Some(linf),
            l2: None,
            roc_linf: None,
            roc_l2: None,
            seconds: 0.0,
            failure: None,
        }
    }

    #[test]
    fn embedded_table_loads() {
        let t = ReferenceTable::embedded().unwrap();
        assert_eq!(t.rows().len(), 143);
        assert_eq!(t.digest(), REFERENCE_SHA256);
        assert!(t.rows().iter().all(|r| (1..=7).contains(&r.table) && !r.block.is_empty()));
        let row = t
            .rows()
            .iter()
            .find(|r| r.table == 2 && r.method == "MTB-DQM")
            .unwrap();
        assert_eq!(row.linf, Some(4.327e-8));
        assert_eq!(row.l2, Some(8.026e-12));
        assert_eq!(row.dt, Some(0.00625));
    }

    #[test]
    fn digest_mismatch_fails_fast() {
        let tampered = REFERENCE_CSV.replacen("4.327E-08", "4.327E-09", 1);
        assert!(matches!(
            ReferenceTable::from_csv(&tampered, REFERENCE_SHA256),
            Err(Error::ReferenceDigest { .. })
        ));
    }

    #[test]
    fn policies() {
        let om = TolerancePolicy::ORDER_OF_MAGNITUDE;
        assert!(om.error_ok(6.0e-8, 4.327e-8));
        assert!(!om.error_ok(6.0e-6, 4.327e-8));
        let d = TolerancePolicy::DEFAULT;
        assert!(d.error_ok(1.2e-7, 4.327e-8));
        assert!(!d.error_ok(1.4e-7, 4.327e-8));
        assert!(d.roc_ok(3.1, 3.30));
        assert!(!d.roc_ok(2.7, 3.30));
        assert!(!d.error_ok(0.0, 1.0));
    }

    #[test]
    fn compare_and_skip() {
        let t = ReferenceTable::embedded().unwrap();
        let key = RowKey { table: 2, block: "alpha=0.01 beta=0.8".into(), basis: BasisFamily::Trigonometric };
        let r = report(BasisFamily::Trigonometric, 81, 0.025, 6.0e-8);
        let c = compare_to_reference(&r, &t, &key, TolerancePolicy::ORDER_OF_MAGNITUDE);
        assert!(c.passed(), "{c:?}");
        let c = compare_to_reference(&report(BasisFamily::Trigonometric, 81, 0.025, 2.3e-5), &t, &key, TolerancePolicy::DEFAULT);
        assert!(!c.passed());
        let md = diff_markdown(std::slice::from_ref(&c));
        assert!(md.contains("FAIL") && md.contains("linf"));
        let missing = RowKey { table: 2, block: "alpha=0.01 beta=0.8".into(), basis: BasisFamily::Exponential { p: 3.0 } };
        let s = compare_to_reference(&r, &t, &missing, TolerancePolicy::DEFAULT);
        assert!(matches!(s.outcome, Outcome::Skipped(_)) && !s.passed());
        assert!(diff_csv(&[s]).lines().nth(1).unwrap().ends_with(",skipped"));
    }

    #[test]
    fn node_count_rows_match_on_n() {
        let t = ReferenceTable::embedded().unwrap();
        let key = RowKey { table: 1, block: "alpha=0.05 beta=0.8".into(), basis: BasisFamily::Extended { lambda: -0.3 } };
        let mut r = report(BasisFamily::Extended { lambda: -0.3 }, 20, 1.0 / 19.0, 4.0e-6);
        r.roc_linf = Some(3.2);
        let c = compare_to_reference(&r, &t, &key, TolerancePolicy::DEFAULT);
        let Outcome::Compared(cs) = &c.outcome else { panic!("{c:?}") };
        assert_eq!(cs.len(), 2);
        assert!(c.passed());
    }
}
