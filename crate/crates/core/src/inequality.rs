//! Boole-Bell and model-free inequalities on triples of correlations.
//!
//! For a triple of currencies (A, B, C) the three correlations are taken from
//! different segments: C_1(A,B), C_2(A,C) and C_3(B,C). The Boole-Bell form
//!
//! ```text
//! |C_1 ± C_2| ∓ C_3 − 1 ≤ 0
//! ```
//!
//! can be violated by data that cannot be reshuffled into triples, while the
//! model-free form `|C_1 ± C_2| ∓ C_3 − 1 ≤ 2(1 − Γ)` cannot.

use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationLookup;
use crate::error::{Error, Result};
use crate::ingest::CurrencyId;

/// `lhs` above this value counts as a violation.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignVariant {
    /// |c1 + c2| − c3 − 1
    Plus,
    /// |c1 − c2| + c3 − 1
    Minus,
}

impl SignVariant {
    pub const BOTH: [SignVariant; 2] = [SignVariant::Plus, SignVariant::Minus];

    fn sign(self) -> f64 {
        match self {
            SignVariant::Plus => 1.0,
            SignVariant::Minus => -1.0,
        }
    }
}

impl std::fmt::Display for SignVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SignVariant::Plus => "plus",
            SignVariant::Minus => "minus",
        })
    }
}

fn check_correlation(c: f64) -> Result<()> {
    if c.is_finite() && c.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("correlation {c} outside [-1, 1]")))
    }
}

/// `|c1 ± c2| ∓ c3 − 1`; positive values violate the Boole-Bell inequality.
pub fn bell_like_lhs(c1: f64, c2: f64, c3: f64, variant: SignVariant) -> Result<f64> {
    check_correlation(c1)?;
    check_correlation(c2)?;
    check_correlation(c3)?;
    let s = variant.sign();
    Ok((c1 + s * c2).abs() - s * c3 - 1.0)
}

/// Slack `2(1 − Γ) − lhs` of the model-free inequality. A slack below
/// `−VIOLATION_TOLERANCE` means the inputs are arithmetically inconsistent.
pub fn model_free_check(c1: f64, c2: f64, c3: f64, gamma: f64, variant: SignVariant) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("gamma {gamma} outside [0, 1]")));
    }
    Ok(2.0 * (1.0 - gamma) - bell_like_lhs(c1, c2, c3, variant)?)
}

/// Violation size in units of the estimated standard deviation 1/(2√n).
pub fn significance(lhs: f64, n: usize) -> f64 {
    lhs * 2.0 * (n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleTest {
    /// Shared currency of the first two correlations.
    pub a: CurrencyId,
    pub b: CurrencyId,
    pub c: CurrencyId,
    pub variant: SignVariant,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub lhs: f64,
    pub violated: bool,
    pub gamma: Option<f64>,
    /// 2(1 − Γ) − lhs, present when `gamma` is.
    pub slack: Option<f64>,
}

impl TripleTest {
    pub fn key(&self) -> (usize, usize, usize, SignVariant) {
        (self.a.index, self.b.index, self.c.index, self.variant)
    }

    pub fn attach_gamma(&mut self, gamma: f64) {
        self.gamma = Some(gamma);
        self.slack = Some(2.0 * (1.0 - gamma) - self.lhs);
    }
}

/// Evaluates both sign variants for every ordered triple of distinct
/// currencies, i.e. `k(k−1)(k−2)·2` tests for `k` currencies (18480 for 22).
///
/// Symmetric duplicates (the plus variant is invariant under B↔C) are kept.
/// The result is sorted by descending `lhs`, ties by (A, B, C, variant).
pub fn scan_triples<L: CorrelationLookup + ?Sized>(corrs: &L) -> Result<Vec<TripleTest>> {
    let currencies = corrs.currencies();
    let k = currencies.len();
    let lookup = |s: usize, x: usize, y: usize| {
        corrs.value(s, x, y).ok_or_else(|| {
            Error::Data(format!(
                "missing correlation C_{s}({}, {})",
                currencies[x], currencies[y]
            ))
        })
    };
    let mut tests = Vec::with_capacity(k * k.saturating_sub(1) * k.saturating_sub(2) * 2);
    for a in 0..k {
        for b in (0..k).filter(|&b| b != a) {
            let c1 = lookup(1, a, b)?;
            for c in (0..k).filter(|&c| c != a && c != b) {
                let c2 = lookup(2, a, c)?;
                let c3 = lookup(3, b, c)?;
                for variant in SignVariant::BOTH {
                    let lhs = bell_like_lhs(c1, c2, c3, variant)?;
                    tests.push(TripleTest {
                        a: currencies[a].clone(),
                        b: currencies[b].clone(),
                        c: currencies[c].clone(),
                        variant,
                        c1,
                        c2,
                        c3,
                        lhs,
                        violated: lhs > VIOLATION_TOLERANCE,
                        gamma: None,
                        slack: None,
                    });
                }
            }
        }
    }
    tests.sort_by(|x, y| y.lhs.total_cmp(&x.lhs).then_with(|| x.key().cmp(&y.key())));
    Ok(tests)
}

/// Unit vector in three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingVector([f64; 3]);

impl SettingVector {
    pub fn new(components: [f64; 3]) -> Result<Self> {
        let norm = components.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("setting vector has norm {norm}, expected 1")));
        }
        Ok(SettingVector(components))
    }

    /// Scales a nonzero vector to unit length.
    pub fn normalized(components: [f64; 3]) -> Result<Self> {
        let norm = components.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        Ok(SettingVector(components.map(|v| v / norm)))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &SettingVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(x, y)| x * y).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingletReport {
    pub c_ab: f64,
    pub c_ac: f64,
    pub c_bc: f64,
    pub plus_lhs: f64,
    pub minus_lhs: f64,
    pub violated: bool,
}

/// Evaluates the Boole-Bell inequality on singlet correlations
/// C(x, y) = −x·y for three measurement settings.
pub fn singlet_demo(a: &SettingVector, b: &SettingVector, c: &SettingVector) -> Result<SingletReport> {
    // dot products of unit vectors can overshoot ±1 by an ulp
    let corr = |x: &SettingVector, y: &SettingVector| (-x.dot(y)).clamp(-1.0, 1.0);
    let (c_ab, c_ac, c_bc) = (corr(a, b), corr(a, c), corr(b, c));
    let plus_lhs = bell_like_lhs(c_ab, c_ac, c_bc, SignVariant::Plus)?;
    let minus_lhs = bell_like_lhs(c_ab, c_ac, c_bc, SignVariant::Minus)?;
    Ok(SingletReport {
        c_ab,
        c_ac,
        c_bc,
        plus_lhs,
        minus_lhs,
        violated: plus_lhs > VIOLATION_TOLERANCE || minus_lhs > VIOLATION_TOLERANCE,
    })
}
