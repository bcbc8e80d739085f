//! Maximum fraction of triples Γ as a linear program.
//!
//! Each segment contributes pairs: segment 1 pairs (A, B), segment 2 pairs
//! (A, C), segment 3 pairs (B, C). A *triple* (x, y, z) ∈ {±1}³ consumes the
//! pair (x, y) from segment 1, (x, z) from segment 2 and (y, z) from
//! segment 3. With `m_i` triples of pattern `i` and `u_k(p)` pairs of
//! outcome `p` in segment `k` left over,
//!
//! ```text
//! N_k(p) = Σ_{i uses p in k} m_i + u_k(p),   Σ_p u_1(p) = Σ_p u_2(p) = Σ_p u_3(p) = U
//! ```
//!
//! and `U = N − Σ m_i` is minimized. Γ = (N − U)/N.
//!
//! Pattern `i` encodes x = −1 in bit 2, z = −1 in bit 1 and y = −1 in bit 0,
//! which gives the count identities n_1(+,+) = m_0 + m_2,
//! n_2(+,+) = m_0 + m_1, n_3(+,+) = m_0 + m_4, and so on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::{model_free_check, SignVariant};
use crate::ingest::SegmentedData;
use crate::simplex::{LinearProgram, LpStatus};

/// Pair outcomes in fixed order (+,+), (+,−), (−,+), (−,−).
pub const OUTCOMES: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

pub const UNKNOWNS: usize = 20;
pub const EQUALITIES: usize = 14;
/// m_i ≥ 0, u_k(p) ≥ 0 and U ≥ 0.
pub const INEQUALITIES: usize = 21;

fn outcome_index(x: i8, y: i8) -> usize {
    (usize::from(x < 0) << 1) | usize::from(y < 0)
}

/// The triple (x, y, z) of pattern `i`.
pub fn triple_pattern(i: usize) -> (i8, i8, i8) {
    let s = |bit: usize| if i & bit != 0 { -1 } else { 1 };
    (s(4), s(1), s(2))
}

/// Outcome index of the pair that pattern `i` consumes in segment `k` (1..=3).
pub fn pattern_pair(i: usize, k: usize) -> usize {
    let (x, y, z) = triple_pattern(i);
    match k {
        1 => outcome_index(x, y),
        2 => outcome_index(x, z),
        3 => outcome_index(y, z),
        _ => panic!("segment {k} outside 1..=3"),
    }
}

/// Pair tallies N_k(x, y) for the three segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    /// `counts[k-1][p]` with `p` indexing [`OUTCOMES`].
    pub counts: [[u64; 4]; 3],
}

impl PairCounts {
    pub fn new(counts: [[u64; 4]; 3]) -> Result<Self> {
        let pc = PairCounts { counts };
        let n = pc.segment_total(1);
        if (2..=3).any(|k| pc.segment_total(k) != n) {
            return Err(Error::Data(format!(
                "segments hold {}, {} and {} pairs",
                pc.segment_total(1),
                pc.segment_total(2),
                pc.segment_total(3)
            )));
        }
        Ok(pc)
    }

    /// Tallies explicit pair lists, one per segment.
    pub fn from_pairs(segments: [&[(i8, i8)]; 3]) -> Result<Self> {
        let mut counts = [[0u64; 4]; 3];
        for (k, pairs) in segments.iter().enumerate() {
            for &(x, y) in pairs.iter() {
                if x.abs() != 1 || y.abs() != 1 {
                    return Err(Error::Domain(format!("pair ({x}, {y}) is not ±1")));
                }
                counts[k][outcome_index(x, y)] += 1;
            }
        }
        PairCounts::new(counts)
    }

    fn segment_total(&self, k: usize) -> u64 {
        self.counts[k - 1].iter().sum()
    }

    pub fn n(&self) -> u64 {
        self.segment_total(1)
    }

    pub fn get(&self, k: usize, x: i8, y: i8) -> u64 {
        self.counts[k - 1][outcome_index(x, y)]
    }

    /// C_k = (N(+,+) − N(+,−) − N(−,+) + N(−,−)) / N.
    pub fn correlations(&self) -> [f64; 3] {
        let n = self.n() as f64;
        std::array::from_fn(|k| {
            let c = &self.counts[k];
            (c[0] as i64 - c[1] as i64 - c[2] as i64 + c[3] as i64) as f64 / n
        })
    }
}

/// Tallies pairs of columns `columns[k-1]` in segment `k`.
pub fn count_segment_pairs(data: &SegmentedData, columns: [(usize, usize); 3]) -> Result<PairCounts> {
    if data.parts() != 3 {
        return Err(Error::Data(format!("expected 3 segments, found {}", data.parts())));
    }
    let cols = data.cols();
    let mut counts = [[0u64; 4]; 3];
    for (k, &(x, y)) in columns.iter().enumerate() {
        if x >= cols || y >= cols {
            return Err(Error::Domain(format!("column ({x}, {y}) out of range")));
        }
        for row in data.segment(k + 1).chunks(cols) {
            counts[k][outcome_index(row[x], row[y])] += 1;
        }
    }
    PairCounts::new(counts)
}

/// Pair tallies for a currency triple: (A,B) in segment 1, (A,C) in
/// segment 2, (B,C) in segment 3.
pub fn count_pairs(data: &SegmentedData, a: usize, b: usize, c: usize) -> Result<PairCounts> {
    if a == b || a == c || b == c {
        return Err(Error::Domain(format!("currencies ({a}, {b}, {c}) are not distinct")));
    }
    count_segment_pairs(data, [(a, b), (a, c), (b, c)])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleLpProblem {
    pub counts: PairCounts,
    /// Columns 0..8 are m_0..m_7, column 8 + 4(k−1) + p is u_k(p).
    pub lp: LinearProgram,
}

impl TripleLpProblem {
    pub fn unknowns(&self) -> usize {
        self.lp.c.len()
    }

    pub fn equalities(&self) -> usize {
        self.lp.b.len()
    }

    pub fn inequalities(&self) -> usize {
        // every unknown plus U
        self.unknowns() + 1
    }
}

pub fn u_column(k: usize, p: usize) -> usize {
    8 + 4 * (k - 1) + p
}

pub fn build_lp(counts: &PairCounts) -> Result<TripleLpProblem> {
    let counts = PairCounts::new(counts.counts)?;
    if counts.n() == 0 {
        return Err(Error::InsufficientData("no pairs to form triples from".into()));
    }
    let mut a = Vec::with_capacity(EQUALITIES);
    let mut b = Vec::with_capacity(EQUALITIES);
    for k in 1..=3 {
        for p in 0..4 {
            let mut row = vec![0.0; UNKNOWNS];
            for (i, v) in row.iter_mut().enumerate().take(8) {
                if pattern_pair(i, k) == p {
                    *v = 1.0;
                }
            }
            row[u_column(k, p)] = 1.0;
            a.push(row);
            b.push(counts.counts[k - 1][p] as f64);
        }
    }
    for k in 1..=2 {
        let mut row = vec![0.0; UNKNOWNS];
        for p in 0..4 {
            row[u_column(k, p)] = 1.0;
            row[u_column(k + 1, p)] = -1.0;
        }
        a.push(row);
        b.push(0.0);
    }
    let mut c = vec![0.0; UNKNOWNS];
    c[..8].iter_mut().for_each(|v| *v = -1.0);
    Ok(TripleLpProblem {
        counts,
        lp: LinearProgram::new(a, b, c)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleLpSolution {
    pub n: u64,
    pub m: [f64; 8],
    /// `u[k-1][p]`
    pub u: [[f64; 4]; 3],
    /// Pairs per segment that are not part of a triple.
    pub unmatched: f64,
    pub gamma: f64,
    /// Rounding the solution to integers keeps it feasible and optimal.
    pub integral: bool,
    pub pivots: usize,
}

impl TripleLpSolution {
    /// Number of triples Σ m_i.
    pub fn triples(&self) -> f64 {
        self.m.iter().sum()
    }
}

fn integral_solution(counts: &PairCounts, m: &[f64; 8], u: &[[f64; 4]; 3]) -> bool {
    let close = |v: f64| (v - v.round()).abs() <= 1e-6;
    if !m.iter().chain(u.iter().flatten()).all(|v| close(*v)) {
        return false;
    }
    let mi: Vec<i64> = m.iter().map(|v| v.round() as i64).collect();
    let ui: Vec<Vec<i64>> = u.iter().map(|r| r.iter().map(|v| v.round() as i64).collect()).collect();
    if mi.iter().chain(ui.iter().flatten()).any(|v| *v < 0) {
        return false;
    }
    for k in 1..=3 {
        #[allow(clippy::needless_range_loop)]
        for p in 0..4 {
            let used: i64 = (0..8).filter(|&i| pattern_pair(i, k) == p).map(|i| mi[i]).sum();
            if used + ui[k - 1][p] != counts.counts[k - 1][p] as i64 {
                return false;
            }
        }
    }
    let sum_m: f64 = m.iter().sum();
    (mi.iter().sum::<i64>() as f64 - sum_m).abs() <= 1e-6
}

pub fn solve_max_triples(problem: &TripleLpProblem) -> Result<TripleLpSolution> {
    let sol = problem.lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Data(format!("triple LP ended {:?}", sol.status)));
    }
    let n = problem.counts.n();
    let residual = problem.lp.max_residual(&sol.x);
    if residual > 1e-9 * (n as f64).max(1.0) {
        return Err(Error::Data(format!("triple LP solution violates constraints by {residual}")));
    }
    let m: [f64; 8] = std::array::from_fn(|i| sol.x[i].max(0.0));
    let u: [[f64; 4]; 3] = std::array::from_fn(|k| std::array::from_fn(|p| sol.x[u_column(k + 1, p)].max(0.0)));
    let triples: f64 = m.iter().sum();
    let unmatched = (n as f64 - triples).max(0.0);
    let gamma = ((n as f64 - unmatched) / n as f64).clamp(0.0, 1.0);
    Ok(TripleLpSolution {
        n,
        integral: integral_solution(&problem.counts, &m, &u),
        m,
        u,
        unmatched,
        gamma,
        pivots: sol.pivots,
    })
}

/// Γ together with the correlations it bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleAnalysis {
    pub counts: PairCounts,
    /// C_1(A,B), C_2(A,C), C_3(B,C) recomputed from the counts.
    pub correlations: [f64; 3],
    pub solution: TripleLpSolution,
    /// 2(1 − Γ) − lhs for the plus variant.
    pub slack_plus: f64,
    /// 2(1 − Γ) − lhs for the minus variant.
    pub slack_minus: f64,
}

impl TripleAnalysis {
    pub fn two_one_minus_gamma(&self) -> f64 {
        2.0 * (1.0 - self.solution.gamma)
    }

    pub fn slack(&self, variant: SignVariant) -> f64 {
        match variant {
            SignVariant::Plus => self.slack_plus,
            SignVariant::Minus => self.slack_minus,
        }
    }
}

/// Solves the triple LP for already tallied pairs.
pub fn analyze_counts(counts: &PairCounts) -> Result<TripleAnalysis> {
    let problem = build_lp(counts)?;
    let solution = solve_max_triples(&problem)?;
    let [c1, c2, c3] = counts.correlations();
    Ok(TripleAnalysis {
        counts: *counts,
        correlations: [c1, c2, c3],
        slack_plus: model_free_check(c1, c2, c3, solution.gamma, SignVariant::Plus)?,
        slack_minus: model_free_check(c1, c2, c3, solution.gamma, SignVariant::Minus)?,
        solution,
    })
}

/// End-to-end Γ for the currency triple (A, B, C).
pub fn gamma_for_triple(data: &SegmentedData, a: usize, b: usize, c: usize) -> Result<TripleAnalysis> {
    analyze_counts(&count_pairs(data, a, b, c)?)
}
