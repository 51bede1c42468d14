//! Known van der Waerden values and published lower bounds.
//!
//! The dataset is a CSV file with header `r,k,w,lower_bound,source` and
//! exactly one of `w` or `lower_bound` per row. Everything else (the
//! exponent, interval endpoints, logarithms) is recomputed on load and in
//! [`audit`], never read from the file. Exact values are cross-checked
//! against the bundled certificates.

use std::collections::BTreeSet;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bounds::{check_square_condition, ConditionReport};
use crate::certificate;
use crate::error::{Error, Result};
use crate::radix;

pub const HEADER: [&str; 5] = ["r", "k", "w", "lower_bound", "source"];

const BUNDLED_DATASET: &str = include_str!("../data/known_values.csv");
const PUBLISHED_DIGITS: &str = include_str!("../data/published_digits.csv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownValueRecord {
    pub r: u64,
    pub k: u64,
    #[serde(with = "crate::decimal::option")]
    pub w: Option<BigUint>,
    #[serde(with = "crate::decimal::option")]
    pub lower_bound: Option<BigUint>,
    /// `floor_log(w or lower_bound, r)`.
    pub n: u64,
    pub source: String,
    /// Whether a bundled certificate backs the exact value.
    pub certified: bool,
}

impl KnownValueRecord {
    /// The exact value, or the lower bound when the value is unknown.
    pub fn value(&self) -> &BigUint {
        self.w
            .as_ref()
            .or(self.lower_bound.as_ref())
            .expect("record holds a value or a bound")
    }

    pub fn is_exact(&self) -> bool {
        self.w.is_some()
    }

    fn label(&self) -> String {
        match (&self.w, &self.lower_bound) {
            (Some(w), _) => format!("W({},{}) = {w}", self.r, self.k),
            (None, Some(l)) => format!("W({},{}) > {l}", self.r, self.k),
            (None, None) => format!("W({},{})", self.r, self.k),
        }
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<Vec<KnownValueRecord>> {
    let text = std::fs::read_to_string(path)?;
    load_str(&text)
}

/// The dataset shipped with the crate.
pub fn bundled() -> Result<Vec<KnownValueRecord>> {
    load_str(BUNDLED_DATASET)
}

pub fn bundled_text() -> &'static str {
    BUNDLED_DATASET
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(1, |p| p.line() as usize);
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("expected {expected_len} fields, found {len}"),
        csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".to_string(),
        _ => e.to_string(),
    };
    Error::Parse { line, message }
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<bool> {
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.is_empty() {
        return Ok(false);
    }
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", expected.join(",")),
        });
    }
    Ok(true)
}

fn field<T: std::str::FromStr>(line: usize, name: &str, text: &str) -> Result<T> {
    text.parse().map_err(|_| Error::Parse {
        line,
        message: format!("field `{name}`: expected a nonnegative integer, found {text:?}"),
    })
}

fn optional_big(line: usize, name: &str, text: &str) -> Result<Option<BigUint>> {
    if text.is_empty() {
        return Ok(None);
    }
    if !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse {
            line,
            message: format!("field `{name}`: expected a nonnegative integer, found {text:?}"),
        });
    }
    Ok(BigUint::parse_bytes(text.as_bytes(), 10))
}

fn violation(record: String, line: usize, reason: impl Into<String>) -> Error {
    Error::InvariantViolation {
        record: format!("{record} (line {line})"),
        reason: reason.into(),
    }
}

pub fn load_str(text: &str) -> Result<Vec<KnownValueRecord>> {
    let mut rdr = reader(text);
    if !check_header(&mut rdr, &HEADER)? {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let r: u64 = field(line, "r", &row[0])?;
        let k: u64 = field(line, "k", &row[1])?;
        let w = optional_big(line, "w", &row[2])?;
        let lower_bound = optional_big(line, "lower_bound", &row[3])?;
        let source = row[4].to_string();
        let label = format!("W({r},{k})");

        if r < 2 {
            return Err(violation(label, line, format!("r = {r} is below 2")));
        }
        if k < 3 {
            return Err(violation(label, line, format!("k = {k} is below 3")));
        }
        if source.is_empty() {
            return Err(violation(label, line, "empty source tag"));
        }
        let value = match (&w, &lower_bound) {
            (Some(v), None) | (None, Some(v)) => v.clone(),
            _ => {
                return Err(violation(label, line, "exactly one of w and lower_bound must be given"));
            }
        };
        if value.is_zero() {
            return Err(violation(label, line, "value must be positive"));
        }
        if !seen.insert((r, k)) {
            return Err(violation(label, line, "duplicate record"));
        }
        let n = radix::floor_log(&value, &BigUint::from(r))?;
        let mut record = KnownValueRecord {
            r,
            k,
            w,
            lower_bound,
            n,
            source,
            certified: false,
        };
        let interval = radix::localize(&value, &BigUint::from(r))?;
        if !interval.contains(&value) || interval.exponent() != n {
            return Err(violation(record.label(), line, "value is outside its power interval"));
        }
        let cert = u8::try_from(r)
            .ok()
            .and_then(|r8| certificate::bundled_for(r8, k));
        if let Some(cert) = cert {
            let proven = BigUint::from(cert.w());
            match (&record.w, &record.lower_bound) {
                (Some(w), _) if *w != proven => {
                    return Err(violation(
                        record.label(),
                        line,
                        format!("bundled certificate proves W({r},{k}) = {proven}"),
                    ));
                }
                (Some(_), _) => record.certified = true,
                (None, Some(l)) if proven <= *l => {
                    return Err(violation(
                        record.label(),
                        line,
                        format!("bundled certificate proves W({r},{k}) = {proven}"),
                    ));
                }
                _ => {}
            }
        }
        out.push(record);
    }
    Ok(out)
}

/// A digit string as printed in a published table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublishedDigit {
    pub r: u64,
    pub k: u64,
    pub column: Column,
    pub printed: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Delta,
    N,
    SqrtNPlus1,
    LnR,
    LnK,
    KSquared,
}

impl Column {
    fn parse(text: &str) -> Option<Column> {
        Some(match text {
            "delta" => Column::Delta,
            "n" => Column::N,
            "sqrt_n_plus_1" => Column::SqrtNPlus1,
            "ln_r" => Column::LnR,
            "ln_k" => Column::LnK,
            "k_squared" => Column::KSquared,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Column::Delta => "delta",
            Column::N => "n",
            Column::SqrtNPlus1 => "sqrt_n_plus_1",
            Column::LnR => "ln_r",
            Column::LnK => "ln_k",
            Column::KSquared => "k_squared",
        }
    }
}

pub fn parse_published(text: &str) -> Result<Vec<PublishedDigit>> {
    let mut rdr = reader(text);
    if !check_header(&mut rdr, &["r", "k", "column", "printed"])? {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let column = Column::parse(&row[2]).ok_or_else(|| Error::Parse {
            line,
            message: format!("unknown column {:?}", &row[2]),
        })?;
        let printed = row[3].to_string();
        let well_formed = !printed.is_empty()
            && printed.split_once('.').map_or(printed.bytes().all(|b| b.is_ascii_digit()), |(i, f)| {
                !i.is_empty() && !f.is_empty() && (i.bytes().chain(f.bytes())).all(|b| b.is_ascii_digit())
            });
        if !well_formed {
            return Err(Error::Parse {
                line,
                message: format!("printed value {printed:?} is not a decimal"),
            });
        }
        out.push(PublishedDigit {
            r: field(line, "r", &row[0])?,
            k: field(line, "k", &row[1])?,
            column,
            printed,
        });
    }
    Ok(out)
}

pub fn bundled_published() -> Vec<PublishedDigit> {
    parse_published(PUBLISHED_DIGITS).expect("bundled digits are well formed")
}

/// One dataset row with every derived column recomputed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub r: u64,
    pub k: u64,
    #[serde(with = "crate::decimal")]
    pub value: BigUint,
    pub exact: bool,
    pub certified: bool,
    pub n: u64,
    pub delta: f64,
    pub sqrt_n_plus_1: f64,
    pub ln_r: f64,
    pub ln_k: f64,
    #[serde(with = "crate::decimal")]
    pub r_pow_n: BigUint,
    #[serde(with = "crate::decimal")]
    pub r_pow_n_plus_1: BigUint,
    pub k_squared: u64,
    pub in_power_interval: bool,
    pub condition: ConditionReport,
    pub source: String,
}

/// A published digit string that disagrees with the recomputed value
/// truncated to the same number of decimals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitMismatch {
    pub r: u64,
    pub k: u64,
    pub column: Column,
    pub printed: String,
    pub computed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub mismatches: Vec<DigitMismatch>,
    /// Published digits with no matching dataset row.
    pub unmatched: Vec<PublishedDigit>,
}

impl AuditReport {
    pub fn all_conditions_hold(&self) -> bool {
        self.rows.iter().filter(|r| r.exact).all(|r| r.condition.all_hold())
    }
}

/// Truncates `x >= 0` to `decimals` places.
fn truncate(x: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    let t = (x * scale).floor() / scale;
    format!("{t:.decimals$}")
}

/// `floor(sqrt(m) * 10^decimals)` rendered with `decimals` places, exactly.
fn truncated_sqrt(m: u64, decimals: usize) -> String {
    let scaled = BigUint::from(m) * radix::pow(&BigUint::from(10u32), 2 * decimals as u64);
    let digits = scaled.sqrt().to_string();
    if decimals == 0 {
        return digits;
    }
    let digits = format!("{digits:0>width$}", width = decimals + 1);
    let (int, frac) = digits.split_at(digits.len() - decimals);
    format!("{int}.{frac}")
}

fn decimals_of(printed: &str) -> usize {
    printed.split_once('.').map_or(0, |(_, f)| f.len())
}

fn computed_digits(row: &AuditRow, column: Column, decimals: usize) -> String {
    match column {
        Column::Delta => truncate(row.delta, decimals),
        Column::N => row.n.to_string(),
        Column::SqrtNPlus1 => truncated_sqrt(row.n + 1, decimals),
        Column::LnR => truncate(row.ln_r, decimals),
        Column::LnK => truncate(row.ln_k, decimals),
        Column::KSquared => row.k_squared.to_string(),
    }
}

fn audit_row(rec: &KnownValueRecord) -> Result<AuditRow> {
    let base = BigUint::from(rec.r);
    let value = rec.value().clone();
    let interval = radix::localize(&value, &base)?;
    let condition = check_square_condition(&value, rec.r, rec.k)?;
    let n = interval.exponent();
    Ok(AuditRow {
        r: rec.r,
        k: rec.k,
        exact: rec.is_exact(),
        certified: rec.certified,
        n,
        delta: radix::delta(&value, &base)?,
        sqrt_n_plus_1: ((n + 1) as f64).sqrt(),
        ln_r: (rec.r as f64).ln(),
        ln_k: (rec.k as f64).ln(),
        r_pow_n: interval.lower().clone(),
        r_pow_n_plus_1: interval.upper().clone(),
        k_squared: rec.k * rec.k,
        in_power_interval: interval.contains(&value),
        condition,
        source: rec.source.clone(),
        value,
    })
}

pub fn audit(records: &[KnownValueRecord]) -> Result<AuditReport> {
    audit_against(records, &bundled_published())
}

pub fn audit_against(records: &[KnownValueRecord], published: &[PublishedDigit]) -> Result<AuditReport> {
    let rows = records.iter().map(audit_row).collect::<Result<Vec<_>>>()?;
    let mut mismatches = Vec::new();
    let mut unmatched = Vec::new();
    for p in published {
        let Some(row) = rows.iter().find(|row| row.r == p.r && row.k == p.k && row.exact) else {
            unmatched.push(p.clone());
            continue;
        };
        let computed = computed_digits(row, p.column, decimals_of(&p.printed));
        if computed != p.printed {
            mismatches.push(DigitMismatch {
                r: p.r,
                k: p.k,
                column: p.column,
                printed: p.printed.clone(),
                computed,
            });
        }
    }
    Ok(AuditReport {
        rows,
        mismatches,
        unmatched,
    })
}
