//! Synthetic ±1 pair data: independent uniform pairs, and pairs biased
//! towards anti-alignment the way two spins in the singlet state are.
//!
//! Every dataset has two columns (A, B) and three segments; the triple LP
//! consumes it with column pair (0, 1) in every segment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{CurrencyId, SegmentedData};
use crate::rng::SplitMix64;
use crate::triple_lp::{analyze_counts, count_segment_pairs, PairCounts, TripleAnalysis, OUTCOMES};

/// Tolerance for the saturation check 3 − 2Γ − C_3 = |C_1 − C_2|.
pub const SATURATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n: usize,
    pub seed: u64,
    /// Bias per segment; segment s has expected correlation −c_s.
    pub c: [f64; 3],
}

impl SyntheticConfig {
    pub fn new(n: usize, seed: u64, c: [f64; 3]) -> Result<Self> {
        let cfg = SyntheticConfig { n, seed, c };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The singlet-mimicking setting c_1 = −c_2 = 1/√2, c_3 = 0.
    pub fn singlet(n: usize, seed: u64) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        SyntheticConfig { n, seed, c: [h, -h, 0.0] }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if let Some(c) = self.c.iter().find(|c| !(c.is_finite() && c.abs() <= 1.0)) {
            return Err(Error::Domain(format!("bias {c} outside [-1, 1]")));
        }
        Ok(())
    }
}

fn pair_columns() -> Vec<CurrencyId> {
    vec![CurrencyId::new(0, "A"), CurrencyId::new(1, "B")]
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Three segments of `n` independent uniform ±1 pairs. A is the top bit of
/// each 64-bit draw and B the next bit.
pub fn gen_random(n: usize, seed: u64) -> Result<SegmentedData> {
    check_n(n)?;
    let mut rng = SplitMix64::new(seed);
    let bit = |v: u64, shift: u32| if (v >> shift) & 1 == 1 { -1 } else { 1 };
    let segments = (0..3)
        .map(|_| {
            let mut seg = Vec::with_capacity(2 * n);
            for _ in 0..n {
                let v = rng.next_u64();
                seg.push(bit(v, 63));
                seg.push(bit(v, 62));
            }
            seg
        })
        .collect();
    SegmentedData::from_segments(pair_columns(), segments)
}

/// Segment s draws (A, B) with probability (1 − c_s·A·B)/4, by inverse CDF
/// over the outcomes in the order (+,+), (+,−), (−,+), (−,−).
pub fn gen_biased(config: &SyntheticConfig) -> Result<SegmentedData> {
    config.validate()?;
    let mut rng = SplitMix64::new(config.seed);
    let segments = config
        .c
        .iter()
        .map(|&c| {
            let probs = OUTCOMES.map(|(a, b)| (1.0 - c * f64::from(a * b)) / 4.0);
            let mut cut = [0.0; 3];
            let mut acc = 0.0;
            for (slot, p) in cut.iter_mut().zip(probs) {
                acc += p;
                *slot = acc;
            }
            let mut seg = Vec::with_capacity(2 * config.n);
            for _ in 0..config.n {
                let u = rng.next_f64();
                let k = cut.iter().take_while(|&&edge| u >= edge).count();
                let (a, b) = OUTCOMES[k];
                seg.push(a);
                seg.push(b);
            }
            seg
        })
        .collect();
    SegmentedData::from_segments(pair_columns(), segments)
}

/// Tallies a two-column synthetic dataset for the triple LP.
pub fn synthetic_counts(data: &SegmentedData) -> Result<PairCounts> {
    count_segment_pairs(data, [(0, 1); 3])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: SyntheticConfig,
    pub correlations: [f64; 3],
    pub gamma: f64,
    pub integral: bool,
    /// |C_1 − C_2|
    pub abs_diff: f64,
    /// 3 − 2Γ − C_3
    pub bound: f64,
    /// bound − |C_1 − C_2|
    pub gap: f64,
    pub saturated: bool,
    pub analysis: TripleAnalysis,
}

/// Runs the triple LP on already generated two-column data.
pub fn run_experiment(config: SyntheticConfig, data: &SegmentedData) -> Result<ExperimentReport> {
    let analysis = analyze_counts(&synthetic_counts(data)?)?;
    let [c1, c2, c3] = analysis.correlations;
    let gamma = analysis.solution.gamma;
    let abs_diff = (c1 - c2).abs();
    let bound = 3.0 - 2.0 * gamma - c3;
    let gap = bound - abs_diff;
    Ok(ExperimentReport {
        config,
        correlations: analysis.correlations,
        gamma,
        integral: analysis.solution.integral,
        abs_diff,
        bound,
        gap,
        saturated: gap.abs() <= SATURATION_TOLERANCE,
        analysis,
    })
}

/// Generates biased data and compares |C_1 − C_2| with 3 − 2Γ − C_3.
pub fn singlet_experiment(config: &SyntheticConfig) -> Result<ExperimentReport> {
    let data = gen_biased(config)?;
    run_experiment(*config, &data)
}
