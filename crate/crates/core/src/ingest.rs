//! Exchange-rate ingestion: CSV parsing, forward-difference digitization
//! and segmentation of the resulting ±1 data.
//!
//! The accepted CSV layout is one header row followed by one row per trading
//! day. The header names a date column followed by the currency columns. A
//! leading unnamed index column (as written by pandas) is tolerated and
//! ignored. Any cell that does not parse as a positive finite number (the
//! Kaggle file uses the literal `ND`) marks the whole row as a no-data record.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of currency columns in the full exchange-rate dataset.
pub const CURRENCY_COUNT: usize = 22;

/// A currency column: its position in the table and its short code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurrencyId {
    pub index: usize,
    pub code: String,
}

impl CurrencyId {
    pub fn new(index: usize, code: impl Into<String>) -> Self {
        CurrencyId {
            index,
            code: code.into(),
        }
    }
}

impl std::fmt::Display for CurrencyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.code)
    }
}

/// Header labels of the Kaggle "foreign exchange rates per dollar" file,
/// mapped to ISO 4217 codes. The label is the part between " - " and "/US$".
pub const KNOWN_CURRENCIES: &[(&str, &str, &str)] = &[
    ("AUSTRALIAN DOLLAR", "AUD", "Australian Dollar"),
    ("EURO", "EUR", "Euro"),
    ("NEW ZELAND DOLLAR", "NZD", "New Zealand Dollar"),
    ("NEW ZEALAND DOLLAR", "NZD", "New Zealand Dollar"),
    ("UNITED KINGDOM POUND", "GBP", "Pound Sterling"),
    ("REAL", "BRL", "Brazilian Real"),
    ("CANADIAN DOLLAR", "CAD", "Canadian Dollar"),
    ("YUAN", "CNY", "Chinese Yuan"),
    ("HONG KONG DOLLAR", "HKD", "Hong Kong Dollar"),
    ("INDIAN RUPEE", "INR", "Indian Rupee"),
    ("WON", "KRW", "Korean Won"),
    ("MEXICAN PESO", "MXN", "Mexican Peso"),
    ("RAND", "ZAR", "South African Rand"),
    ("SINGAPORE DOLLAR", "SGD", "Singapore Dollar"),
    ("DANISH KRONE", "DKK", "Danish Krone"),
    ("YEN", "JPY", "Japanese Yen"),
    ("RINGGIT", "MYR", "Malaysian Ringgit"),
    ("NORWEGIAN KRONE", "NOK", "Norwegian Krone"),
    ("KRONA", "SEK", "Swedish Krona"),
    ("SRI LANKAN RUPEE", "LKR", "Sri Lankan Rupee"),
    ("FRANC", "CHF", "Swiss Franc"),
    ("NEW TAIWAN DOLLAR", "TWD", "New Taiwan Dollar"),
    ("BAHT", "THB", "Thai Baht"),
];

/// Short code for a CSV header label. Known Kaggle labels map to ISO codes,
/// anything else is used verbatim (trimmed).
pub fn currency_code(label: &str) -> String {
    let label = label.trim();
    let core = label
        .split_once(" - ")
        .map(|(_, rest)| rest)
        .unwrap_or(label)
        .trim_end_matches("/US$")
        .trim();
    KNOWN_CURRENCIES
        .iter()
        .find(|(name, _, _)| name.eq_ignore_ascii_case(core))
        .map(|(_, code, _)| (*code).to_string())
        .unwrap_or_else(|| label.to_string())
}

/// Dated matrix of positive exchange rates, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub currencies: Vec<CurrencyId>,
    pub dates: Vec<String>,
    rates: Vec<f64>,
    /// No-data records dropped while parsing.
    pub skipped: usize,
}

impl RateTable {
    pub fn new(currencies: Vec<CurrencyId>, dates: Vec<String>, rates: Vec<f64>) -> Result<Self> {
        let cols = currencies.len();
        if cols == 0 || rates.len() != dates.len() * cols {
            return Err(Error::Format(format!(
                "{} rates do not fill {} rows of {} columns",
                rates.len(),
                dates.len(),
                cols
            )));
        }
        if let Some(bad) = rates.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::Domain(format!("rate {bad} is not a positive finite number")));
        }
        Ok(RateTable {
            currencies,
            dates,
            rates,
            skipped: 0,
        })
    }

    pub fn rows(&self) -> usize {
        self.dates.len()
    }

    pub fn cols(&self) -> usize {
        self.currencies.len()
    }

    pub fn rate(&self, row: usize, col: usize) -> f64 {
        self.rates[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let cols = self.cols();
        &self.rates[row * cols..(row + 1) * cols]
    }

    /// Writes the table back as CSV (`date,<codes...>`). Rates use Rust's
    /// shortest round-trip formatting, so re-parsing is bit-exact.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date");
        for c in &self.currencies {
            out.push(',');
            out.push_str(&c.code);
        }
        out.push('\n');
        for (i, date) in self.dates.iter().enumerate() {
            out.push_str(date);
            for r in self.row(i) {
                out.push(',');
                out.push_str(&r.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a full 22-currency exchange-rate file.
pub fn parse_rate_table<R: Read>(reader: R) -> Result<RateTable> {
    parse_rate_table_with_width(reader, CURRENCY_COUNT)
}

/// Parses an exchange-rate CSV with `width` currency columns.
pub fn parse_rate_table_with_width<R: Read>(reader: R, width: usize) -> Result<RateTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();

    // date + currencies, optionally preceded by an unnamed index column
    let offset = if header.len() == width + 2 && header[0].is_empty() {
        2
    } else if header.len() == width + 1 {
        1
    } else {
        return Err(Error::Format(format!(
            "expected a date column and {width} currency columns, header has {} fields",
            header.len()
        )));
    };

    let mut currencies = Vec::with_capacity(width);
    for (index, label) in header.iter().skip(offset).enumerate() {
        if label.is_empty() {
            return Err(Error::Format(format!("currency column {index} has an empty name")));
        }
        let code = currency_code(label);
        if currencies.iter().any(|c: &CurrencyId| c.code == code) {
            return Err(Error::Format(format!("duplicate currency column {code}")));
        }
        currencies.push(CurrencyId::new(index, code));
    }

    let mut dates = Vec::new();
    let mut rates = Vec::new();
    let mut skipped = 0;
    let mut row = Vec::with_capacity(width);
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != width + offset {
            return Err(Error::Format(format!(
                "record {} has {} fields, expected {}",
                line + 1,
                record.len(),
                width + offset
            )));
        }
        row.clear();
        let complete = record.iter().skip(offset).all(|cell| match cell.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => {
                row.push(v);
                true
            }
            _ => false,
        });
        if complete {
            dates.push(record[offset - 1].to_string());
            rates.extend_from_slice(&row);
        } else {
            skipped += 1;
        }
    }

    if dates.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} usable rows, at least 2 are needed",
            dates.len()
        )));
    }

    Ok(RateTable {
        currencies,
        dates,
        rates,
        skipped,
    })
}

/// How a zero forward difference is digitized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroPolicy {
    /// Map 0 to +1.
    #[default]
    Plus,
    /// Map 0 to −1.
    Minus,
    /// Drop every difference row that contains a zero in any column.
    DropRow,
}

impl std::str::FromStr for ZeroPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(ZeroPolicy::Plus),
            "minus" => Ok(ZeroPolicy::Minus),
            "drop" | "drop_row" => Ok(ZeroPolicy::DropRow),
            other => Err(Error::Domain(format!("unknown zero policy {other:?}"))),
        }
    }
}

/// ±1 matrix of digitized forward differences, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignMatrix {
    pub currencies: Vec<CurrencyId>,
    /// Date of the later record of each difference; empty when the matrix
    /// was not built from a rate table.
    pub dates: Vec<String>,
    signs: Vec<i8>,
    rows: usize,
    /// Number of zero differences encountered (cells, not rows).
    pub zero_count: usize,
}

impl SignMatrix {
    pub fn from_rows(currencies: Vec<CurrencyId>, rows: Vec<Vec<i8>>) -> Result<Self> {
        let cols = currencies.len();
        let mut signs = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Format(format!("sign row {i} has {} entries, expected {cols}", r.len())));
            }
            check_signs(r)?;
            signs.extend_from_slice(r);
        }
        Ok(SignMatrix {
            currencies,
            dates: Vec::new(),
            signs,
            rows: rows.len(),
            zero_count: 0,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.currencies.len()
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.signs[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[i8] {
        let cols = self.cols();
        &self.signs[row * cols..(row + 1) * cols]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.signs
    }
}

fn check_signs(values: &[i8]) -> Result<()> {
    match values.iter().find(|v| **v != 1 && **v != -1) {
        Some(v) => Err(Error::Domain(format!("sign value {v} is not ±1"))),
        None => Ok(()),
    }
}

/// Digitizes `sign(rate[i+1] - rate[i])` for every column.
pub fn forward_diff_signs(table: &RateTable, zero_policy: ZeroPolicy) -> Result<SignMatrix> {
    if table.rows() < 2 {
        return Err(Error::InsufficientData(
            "forward differences need at least 2 rows".into(),
        ));
    }
    let cols = table.cols();
    let mut signs = Vec::with_capacity((table.rows() - 1) * cols);
    let mut dates = Vec::with_capacity(table.rows() - 1);
    let mut rows = 0;
    let mut zero_count = 0;
    let mut buf = Vec::with_capacity(cols);
    for i in 0..table.rows() - 1 {
        buf.clear();
        let mut row_has_zero = false;
        for (next, prev) in table.row(i + 1).iter().zip(table.row(i)) {
            let d = next - prev;
            let s = if d > 0.0 {
                1
            } else if d < 0.0 {
                -1
            } else {
                zero_count += 1;
                row_has_zero = true;
                match zero_policy {
                    ZeroPolicy::Minus => -1,
                    _ => 1,
                }
            };
            buf.push(s);
        }
        if zero_policy == ZeroPolicy::DropRow && row_has_zero {
            continue;
        }
        signs.extend_from_slice(&buf);
        dates.push(table.dates[i + 1].clone());
        rows += 1;
    }
    Ok(SignMatrix {
        currencies: table.currencies.clone(),
        dates,
        signs,
        rows,
        zero_count,
    })
}

/// Equal-length, time-ordered blocks of ±1 data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentedData {
    pub currencies: Vec<CurrencyId>,
    /// One row-major `n × cols` block per segment.
    segments: Vec<Vec<i8>>,
    /// Rows per segment.
    pub n: usize,
    /// Trailing rows discarded to make the segments equal.
    pub dropped: usize,
}

impl SegmentedData {
    /// Builds segmented data from explicit row-major blocks.
    pub fn from_segments(currencies: Vec<CurrencyId>, segments: Vec<Vec<i8>>) -> Result<Self> {
        let cols = currencies.len();
        if cols == 0 || segments.is_empty() {
            return Err(Error::InsufficientData("no columns or no segments".into()));
        }
        let len = segments[0].len();
        if !len.is_multiple_of(cols) || segments.iter().any(|s| s.len() != len) {
            return Err(Error::Data("segments must hold equal numbers of full rows".into()));
        }
        for s in &segments {
            check_signs(s)?;
        }
        Ok(SegmentedData {
            currencies,
            segments,
            n: len / cols,
            dropped: 0,
        })
    }

    pub fn parts(&self) -> usize {
        self.segments.len()
    }

    pub fn cols(&self) -> usize {
        self.currencies.len()
    }

    /// Row-major data of segment `s` (1-based).
    pub fn segment(&self, s: usize) -> &[i8] {
        &self.segments[s - 1]
    }

    pub fn get(&self, s: usize, row: usize, col: usize) -> i8 {
        self.segments[s - 1][row * self.cols() + col]
    }

    /// Values of one column within segment `s` (1-based).
    pub fn column(&self, s: usize, col: usize) -> impl Iterator<Item = i8> + '_ {
        self.segments[s - 1]
            .iter()
            .skip(col)
            .step_by(self.cols())
            .copied()
    }

    /// Concatenation of all segments in time order.
    pub fn concatenated(&self) -> SignMatrix {
        let signs: Vec<i8> = self.segments.concat();
        SignMatrix {
            currencies: self.currencies.clone(),
            dates: Vec::new(),
            rows: signs.len() / self.cols(),
            signs,
            zero_count: 0,
        }
    }

    pub fn currency(&self, code: &str) -> Option<&CurrencyId> {
        self.currencies.iter().find(|c| c.code == code)
    }
}

/// Splits the first `parts·N` rows into `parts` contiguous blocks of
/// `N = floor(rows / parts)` rows; the remaining trailing rows are dropped.
pub fn segment(signs: &SignMatrix, parts: usize) -> Result<SegmentedData> {
    if parts == 0 {
        return Err(Error::Domain("number of segments must be at least 1".into()));
    }
    if signs.rows() < parts {
        return Err(Error::InsufficientData(format!(
            "{} rows cannot be split into {parts} segments",
            signs.rows()
        )));
    }
    let n = signs.rows() / parts;
    let block = n * signs.cols();
    let segments = (0..parts)
        .map(|s| signs.signs[s * block..(s + 1) * block].to_vec())
        .collect();
    Ok(SegmentedData {
        currencies: signs.currencies.clone(),
        segments,
        n,
        dropped: signs.rows() - parts * n,
    })
}

/// JSON layout of a sign matrix: one date label and one array of −1/1 per
/// difference row.
#[derive(Debug, Serialize, Deserialize)]
pub struct SignMatrixFile {
    pub currencies: Vec<String>,
    pub zero_count: usize,
    pub dates: Vec<String>,
    pub signs: Vec<Vec<i8>>,
}

impl From<&SignMatrix> for SignMatrixFile {
    fn from(m: &SignMatrix) -> Self {
        SignMatrixFile {
            currencies: m.currencies.iter().map(|c| c.code.clone()).collect(),
            zero_count: m.zero_count,
            dates: m.dates.clone(),
            signs: m.signs.chunks(m.cols()).map(<[i8]>::to_vec).collect(),
        }
    }
}

/// JSON layout of segmented data. Segments are time-ordered blocks of sign
/// rows, each row an array of −1/1.
#[derive(Debug, Serialize, Deserialize)]
pub struct SegmentedDataFile {
    pub currencies: Vec<String>,
    pub n: usize,
    pub dropped: usize,
    /// `segments[s][row][col]`
    pub segments: Vec<Vec<Vec<i8>>>,
}

impl From<&SegmentedData> for SegmentedDataFile {
    fn from(data: &SegmentedData) -> Self {
        SegmentedDataFile {
            currencies: data.currencies.iter().map(|c| c.code.clone()).collect(),
            n: data.n,
            dropped: data.dropped,
            segments: data
                .segments
                .iter()
                .map(|s| s.chunks(data.cols()).map(<[i8]>::to_vec).collect())
                .collect(),
        }
    }
}

impl TryFrom<SegmentedDataFile> for SegmentedData {
    type Error = Error;

    fn try_from(file: SegmentedDataFile) -> Result<Self> {
        let currencies = file
            .currencies
            .into_iter()
            .enumerate()
            .map(|(i, c)| CurrencyId::new(i, c))
            .collect();
        let segments = file.segments.into_iter().map(|s| s.concat()).collect();
        let mut data = SegmentedData::from_segments(currencies, segments)?;
        if data.n != file.n {
            return Err(Error::Data(format!("declared n = {} but segments hold {} rows", file.n, data.n)));
        }
        data.dropped = file.dropped;
        Ok(data)
    }
}
