//! Segment-wise and pooled pair correlations of ±1 data.
//!
//! Sums of ±1 products are accumulated as integers and divided once.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{CurrencyId, SegmentedData, SignMatrix};

/// Which rows a correlation was computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentLabel {
    Segment(usize),
    Pooled,
}

impl std::fmt::Display for SegmentLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SegmentLabel::Segment(s) => write!(f, "{s}"),
            SegmentLabel::Pooled => f.write_str("pooled"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub segment: SegmentLabel,
    pub a: CurrencyId,
    pub b: CurrencyId,
    /// Σ A_i B_i over the rows.
    pub sum: i64,
    pub n: usize,
    pub value: f64,
}

impl CorrelationRecord {
    fn new(segment: SegmentLabel, a: &CurrencyId, b: &CurrencyId, sum: i64, n: usize) -> Self {
        CorrelationRecord {
            segment,
            a: a.clone(),
            b: b.clone(),
            sum,
            n,
            value: sum as f64 / n as f64,
        }
    }
}

fn product_sum(x: impl Iterator<Item = i8>, y: impl Iterator<Item = i8>) -> i64 {
    x.zip(y).map(|(p, q)| i64::from(p * q)).sum()
}

fn check_pair(cols: usize, a: usize, b: usize) -> Result<()> {
    if a == b {
        return Err(Error::Domain(format!("trivial self-correlation of column {a}")));
    }
    if a >= cols || b >= cols {
        return Err(Error::Domain(format!("column index out of range ({a}, {b}) for {cols} columns")));
    }
    Ok(())
}

/// C_s(A,B) = (1/N) Σ_i A_{s,i} B_{s,i} for segment `segment` (1-based).
pub fn correlate(data: &SegmentedData, segment: usize, a: usize, b: usize) -> Result<CorrelationRecord> {
    check_pair(data.cols(), a, b)?;
    if segment == 0 || segment > data.parts() {
        return Err(Error::Domain(format!("segment {segment} outside 1..={}", data.parts())));
    }
    let sum = product_sum(data.column(segment, a), data.column(segment, b));
    Ok(CorrelationRecord::new(
        SegmentLabel::Segment(segment),
        &data.currencies[a],
        &data.currencies[b],
        sum,
        data.n,
    ))
}

/// Correlation over all rows of the sign matrix, without segmentation.
pub fn pooled_correlate(signs: &SignMatrix, a: usize, b: usize) -> Result<CorrelationRecord> {
    check_pair(signs.cols(), a, b)?;
    if signs.rows() == 0 {
        return Err(Error::InsufficientData("no rows to correlate".into()));
    }
    let col = |c: usize| (0..signs.rows()).map(move |r| signs.get(r, c));
    let sum = product_sum(col(a), col(b));
    Ok(CorrelationRecord::new(
        SegmentLabel::Pooled,
        &signs.currencies[a],
        &signs.currencies[b],
        sum,
        signs.rows(),
    ))
}

/// Read access to pair correlations indexed by segment (1-based) and
/// column indices. Orientation of the pair is irrelevant.
pub trait CorrelationLookup {
    fn currencies(&self) -> &[CurrencyId];
    fn value(&self, segment: usize, a: usize, b: usize) -> Option<f64>;
    /// Samples behind each correlation, for significance estimates.
    fn sample_count(&self) -> usize;
}

/// Index of the unordered pair {a, b} with a ≠ b among `cols` columns.
fn pair_index(cols: usize, a: usize, b: usize) -> usize {
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    i * (2 * cols - i - 1) / 2 + (j - i - 1)
}

/// All segment correlations and per-segment column means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSet {
    pub currencies: Vec<CurrencyId>,
    pub parts: usize,
    pub n: usize,
    /// Ordered by (segment, a, b) with a < b.
    pub records: Vec<CorrelationRecord>,
    /// `means[s-1][col]`: average of the ±1 values of a column in segment s.
    pub means: Vec<Vec<f64>>,
}

impl CorrelationSet {
    fn pairs(&self) -> usize {
        let c = self.currencies.len();
        c * (c - 1) / 2
    }

    pub fn get(&self, segment: usize, a: usize, b: usize) -> Option<&CorrelationRecord> {
        let cols = self.currencies.len();
        if a == b || a >= cols || b >= cols || segment == 0 || segment > self.parts {
            return None;
        }
        self.records
            .get((segment - 1) * self.pairs() + pair_index(cols, a, b))
    }

    /// Writes `segment,currency_a,currency_b,value,n` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["segment", "currency_a", "currency_b", "value", "n"])?;
        for r in &self.records {
            w.write_record([
                r.segment.to_string(),
                r.a.code.clone(),
                r.b.code.clone(),
                r.value.to_string(),
                r.n.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

impl CorrelationLookup for CorrelationSet {
    fn currencies(&self) -> &[CurrencyId] {
        &self.currencies
    }

    fn value(&self, segment: usize, a: usize, b: usize) -> Option<f64> {
        self.get(segment, a, b).map(|r| r.value)
    }

    fn sample_count(&self) -> usize {
        self.n
    }
}

/// Every non-trivial correlation in every segment, plus column means.
pub fn all_correlations(data: &SegmentedData) -> Result<CorrelationSet> {
    let cols = data.cols();
    if cols < 2 || data.n == 0 {
        return Err(Error::InsufficientData("need at least 2 columns and 1 row per segment".into()));
    }
    let keys: Vec<(usize, usize, usize)> = (1..=data.parts())
        .flat_map(|s| (0..cols).flat_map(move |a| (a + 1..cols).map(move |b| (s, a, b))))
        .collect();
    let records = keys
        .par_iter()
        .map(|&(s, a, b)| correlate(data, s, a, b))
        .collect::<Result<Vec<_>>>()?;
    let means = (1..=data.parts())
        .map(|s| {
            (0..cols)
                .map(|c| data.column(s, c).map(i64::from).sum::<i64>() as f64 / data.n as f64)
                .collect()
        })
        .collect();
    Ok(CorrelationSet {
        currencies: data.currencies.clone(),
        parts: data.parts(),
        n: data.n,
        records,
        means,
    })
}

/// Correlations over unsegmented rows; the same value serves every segment
/// slot of a lookup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledCorrelations {
    pub currencies: Vec<CurrencyId>,
    pub n: usize,
    /// Ordered by (a, b) with a < b.
    pub records: Vec<CorrelationRecord>,
}

pub fn all_pooled_correlations(signs: &SignMatrix) -> Result<PooledCorrelations> {
    let cols = signs.cols();
    let keys: Vec<(usize, usize)> = (0..cols)
        .flat_map(|a| (a + 1..cols).map(move |b| (a, b)))
        .collect();
    let records = keys
        .par_iter()
        .map(|&(a, b)| pooled_correlate(signs, a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(PooledCorrelations {
        currencies: signs.currencies.clone(),
        n: signs.rows(),
        records,
    })
}

impl CorrelationLookup for PooledCorrelations {
    fn currencies(&self) -> &[CurrencyId] {
        &self.currencies
    }

    fn value(&self, _segment: usize, a: usize, b: usize) -> Option<f64> {
        let cols = self.currencies.len();
        if a == b || a >= cols || b >= cols {
            return None;
        }
        self.records.get(pair_index(cols, a, b)).map(|r| r.value)
    }

    fn sample_count(&self) -> usize {
        self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::segment;

    fn ids(n: usize) -> Vec<CurrencyId> {
        (0..n).map(|i| CurrencyId::new(i, format!("C{i}"))).collect()
    }

    fn one_segment(rows: Vec<Vec<i8>>) -> SegmentedData {
        let cols = rows[0].len();
        SegmentedData::from_segments(ids(cols), vec![rows.concat()]).unwrap()
    }

    #[test]
    fn hand_sum_is_zero() {
        let d = one_segment(vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]]);
        let r = correlate(&d, 1, 0, 1).unwrap();
        assert_eq!(r.sum, 0);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn identical_columns_give_one() {
        let d = one_segment(vec![vec![1, 1], vec![-1, -1], vec![-1, -1]]);
        assert_eq!(correlate(&d, 1, 0, 1).unwrap().value, 1.0);
    }

    #[test]
    fn self_pair_is_rejected() {
        let d = one_segment(vec![vec![1, 1]]);
        assert!(matches!(correlate(&d, 1, 1, 1), Err(Error::Domain(_))));
        assert!(matches!(correlate(&d, 2, 0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn pair_index_is_dense() {
        let cols = 7;
        let mut seen = vec![false; cols * (cols - 1) / 2];
        for a in 0..cols {
            for b in a + 1..cols {
                let k = pair_index(cols, a, b);
                assert_eq!(k, pair_index(cols, b, a));
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
        assert!(seen.iter().all(|s| *s));
    }

    #[test]
    fn two_columns_three_segments() {
        let m = SignMatrix::from_rows(ids(2), vec![vec![1, -1], vec![1, 1], vec![-1, -1], vec![1, 1], vec![-1, 1], vec![1, 1]]).unwrap();
        let d = segment(&m, 3).unwrap();
        let set = all_correlations(&d).unwrap();
        assert_eq!(set.records.len(), 3);
        let values: Vec<f64> = set.records.iter().map(|r| r.value).collect();
        assert_eq!(values, vec![0.0, 1.0, 0.0]);
        assert_eq!(set.means[0], vec![1.0, 0.0]);
        assert_eq!(set.value(2, 1, 0), Some(1.0));
    }

    #[test]
    fn pooled_is_mean_of_segments() {
        let m = SignMatrix::from_rows(ids(2), vec![vec![1, -1], vec![1, 1], vec![-1, -1], vec![1, 1], vec![-1, 1], vec![1, -1]]).unwrap();
        let d = segment(&m, 3).unwrap();
        let pooled = pooled_correlate(&m, 0, 1).unwrap();
        let mean = (1..=3).map(|s| correlate(&d, s, 0, 1).unwrap().value).sum::<f64>() / 3.0;
        assert!((pooled.value - mean).abs() < 1e-12);
        // products: -1 +1 +1 +1 -1 -1
        assert_eq!(pooled.sum, 0);
    }

    #[test]
    fn csv_export_header() {
        let d = one_segment(vec![vec![1, 1], vec![-1, 1]]);
        let set = all_correlations(&d).unwrap();
        let csv = set.to_csv().unwrap();
        assert_eq!(csv, "segment,currency_a,currency_b,value,n\n1,C0,C1,0,2\n");
    }
}
