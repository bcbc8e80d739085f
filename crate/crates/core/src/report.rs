//! End-to-end analysis runs and their serializable reports.

use std::collections::HashMap;
use std::io::Read;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{all_correlations, all_pooled_correlations, CorrelationSet};
use crate::error::{Error, Result};
use crate::inequality::{scan_triples, significance, SignVariant, TripleTest, VIOLATION_TOLERANCE};
use crate::ingest::{forward_diff_signs, parse_rate_table, segment, SegmentedData, SignMatrix, ZeroPolicy};
use crate::triple_lp::{gamma_for_triple, PairCounts, TripleAnalysis};

pub const TOOL_NAME: &str = "fxbell";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub input: Option<String>,
    pub zero_policy: ZeroPolicy,
    pub segments: usize,
    /// Compute Γ for every test, not only the violating ones.
    pub with_gamma: bool,
    /// Violations with lhs below this value are counted but not listed.
    pub threshold: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            input: None,
            zero_policy: ZeroPolicy::Plus,
            segments: 3,
            with_gamma: false,
            threshold: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFingerprint {
    pub currencies: Vec<String>,
    pub records: usize,
    pub skipped_records: usize,
    pub sign_rows: usize,
    pub zero_count: usize,
    pub n: usize,
    pub dropped: usize,
}

/// Parsed, digitized and segmented data with its fingerprint.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub signs: SignMatrix,
    pub data: SegmentedData,
    pub fingerprint: DatasetFingerprint,
}

pub fn load_dataset<R: Read>(reader: R, zero_policy: ZeroPolicy, segments: usize) -> Result<Dataset> {
    let table = parse_rate_table(reader)?;
    let signs = forward_diff_signs(&table, zero_policy)?;
    let data = segment(&signs, segments)?;
    let fingerprint = DatasetFingerprint {
        currencies: table.currencies.iter().map(|c| c.code.clone()).collect(),
        records: table.rows(),
        skipped_records: table.skipped,
        sign_rows: signs.rows(),
        zero_count: signs.zero_count,
        n: data.n,
        dropped: data.dropped,
    };
    Ok(Dataset {
        signs,
        data,
        fingerprint,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    pub records: usize,
    pub min: f64,
    pub max: f64,
    /// Largest |mean| of any currency in any segment.
    pub max_abs_mean: f64,
}

impl From<&CorrelationSet> for CorrelationSummary {
    fn from(set: &CorrelationSet) -> Self {
        let values = set.records.iter().map(|r| r.value);
        CorrelationSummary {
            records: set.records.len(),
            min: values.clone().fold(f64::INFINITY, f64::min),
            max: values.fold(f64::NEG_INFINITY, f64::max),
            max_abs_mean: set.means.iter().flatten().fold(0.0, |acc, m| acc.max(m.abs())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationEntry {
    /// (A, B, C): C_1 uses (A,B), C_2 uses (A,C), C_3 uses (B,C).
    pub currencies: [String; 3],
    pub variant: SignVariant,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub lhs: f64,
    pub gamma: Option<f64>,
    pub slack: Option<f64>,
    /// lhs in units of 1/(2√N).
    pub sigma: f64,
}

impl ViolationEntry {
    fn new(t: &TripleTest, n: usize) -> Self {
        ViolationEntry {
            currencies: [t.a.code.clone(), t.b.code.clone(), t.c.code.clone()],
            variant: t.variant,
            c1: t.c1,
            c2: t.c2,
            c3: t.c3,
            lhs: t.lhs,
            gamma: t.gamma,
            slack: t.slack,
            sigma: significance(t.lhs, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: String,
    pub version: String,
    pub config: AnalysisConfig,
    pub dataset: DatasetFingerprint,
    pub correlations: CorrelationSummary,
    pub tests: usize,
    pub violation_count: usize,
    /// Violations with lhs ≥ threshold, by descending lhs.
    pub violations: Vec<ViolationEntry>,
    pub max_plus: Option<ViolationEntry>,
    pub max_minus: Option<ViolationEntry>,
    /// Γ computations performed and the smallest model-free slack among them.
    pub gamma_evaluations: usize,
    pub min_slack: Option<f64>,
}

impl AnalysisReport {
    /// Violation list as CSV.
    pub fn violations_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "currency_a", "currency_b", "currency_c", "variant", "c1", "c2", "c3", "lhs", "gamma", "slack", "sigma",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for v in &self.violations {
            w.write_record([
                v.currencies[0].clone(),
                v.currencies[1].clone(),
                v.currencies[2].clone(),
                v.variant.to_string(),
                v.c1.to_string(),
                v.c2.to_string(),
                v.c3.to_string(),
                v.lhs.to_string(),
                opt(v.gamma),
                opt(v.slack),
                v.sigma.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Γ for each distinct (A, B, C) among `tests`, computed in parallel.
fn attach_gammas(data: &SegmentedData, tests: &mut [TripleTest], all: bool) -> Result<usize> {
    let mut keys: Vec<(usize, usize, usize)> = tests
        .iter()
        .filter(|t| all || t.violated)
        .map(|t| (t.a.index, t.b.index, t.c.index))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let gammas: HashMap<(usize, usize, usize), f64> = keys
        .par_iter()
        .map(|&(a, b, c)| gamma_for_triple(data, a, b, c).map(|r| ((a, b, c), r.solution.gamma)))
        .collect::<Result<_>>()?;
    for t in tests.iter_mut() {
        if let Some(g) = gammas.get(&(t.a.index, t.b.index, t.c.index)) {
            t.attach_gamma(*g);
        }
    }
    Ok(gammas.len())
}

/// Ingest → correlations → triple scan → Γ for the violating triples.
pub fn run_scan(dataset: &Dataset, config: &AnalysisConfig) -> Result<AnalysisReport> {
    if dataset.data.parts() != 3 {
        return Err(Error::Data(format!(
            "the triple scan needs 3 segments, dataset has {}",
            dataset.data.parts()
        )));
    }
    let corrs = all_correlations(&dataset.data)?;
    let mut tests = scan_triples(&corrs)?;
    let gamma_evaluations = attach_gammas(&dataset.data, &mut tests, config.with_gamma)?;
    let n = dataset.data.n;

    let min_slack = tests.iter().filter_map(|t| t.slack).reduce(f64::min);
    let best = |variant: SignVariant| {
        tests
            .iter()
            .find(|t| t.variant == variant)
            .map(|t| ViolationEntry::new(t, n))
    };
    Ok(AnalysisReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        config: config.clone(),
        dataset: dataset.fingerprint.clone(),
        correlations: CorrelationSummary::from(&corrs),
        tests: tests.len(),
        violation_count: tests.iter().filter(|t| t.violated).count(),
        violations: tests
            .iter()
            .filter(|t| t.violated && t.lhs >= config.threshold)
            .map(|t| ViolationEntry::new(t, n))
            .collect(),
        max_plus: best(SignVariant::Plus),
        max_minus: best(SignVariant::Minus),
        gamma_evaluations,
        min_slack,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledReport {
    pub tool: String,
    pub version: String,
    pub config: AnalysisConfig,
    pub dataset: DatasetFingerprint,
    /// Rows behind every pooled correlation (3N).
    pub rows: usize,
    pub tests: usize,
    pub violation_count: usize,
    pub max_lhs: f64,
}

/// The same triple scan with correlations over the first 3N rows unsplit.
pub fn run_pooled(dataset: &Dataset, config: &AnalysisConfig) -> Result<PooledReport> {
    let rows = dataset.data.concatenated();
    let pooled = all_pooled_correlations(&rows)?;
    let tests = scan_triples(&pooled)?;
    Ok(PooledReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        config: config.clone(),
        dataset: dataset.fingerprint.clone(),
        rows: rows.rows(),
        tests: tests.len(),
        violation_count: tests.iter().filter(|t| t.lhs > VIOLATION_TOLERANCE).count(),
        max_lhs: tests.first().map_or(f64::NEG_INFINITY, |t| t.lhs),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub currencies: [String; 3],
    pub counts: PairCounts,
    pub correlations: [f64; 3],
    pub lhs_plus: f64,
    pub lhs_minus: f64,
    pub gamma: f64,
    pub two_one_minus_gamma: f64,
    pub slack_plus: f64,
    pub slack_minus: f64,
    pub integral: bool,
    pub m: [f64; 8],
}

pub fn gamma_report(data: &SegmentedData, codes: [&str; 3]) -> Result<GammaReport> {
    let idx = |code: &str| {
        data.currency(code)
            .map(|c| c.index)
            .ok_or_else(|| Error::Domain(format!("unknown currency {code}")))
    };
    let (a, b, c) = (idx(codes[0])?, idx(codes[1])?, idx(codes[2])?);
    let TripleAnalysis {
        counts,
        correlations,
        solution,
        slack_plus,
        slack_minus,
    } = gamma_for_triple(data, a, b, c)?;
    let two = 2.0 * (1.0 - solution.gamma);
    Ok(GammaReport {
        currencies: codes.map(String::from),
        counts,
        correlations,
        lhs_plus: two - slack_plus,
        lhs_minus: two - slack_minus,
        gamma: solution.gamma,
        two_one_minus_gamma: two,
        slack_plus,
        slack_minus,
        integral: solution.integral,
        m: solution.m,
    })
}
