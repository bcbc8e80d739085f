//! Trivariates of three ±1 variables and their moments.
//!
//! Any normalized f on {±1}³ can be written as
//!
//! ```text
//! f(x1,x2,x3) = (1 + K1 x1 + K2 x2 + K3 x3 + K12 x1x2 + K13 x1x3 + K23 x2x3 + K123 x1x2x3) / 8
//! ```
//!
//! Given the six lower-order moments, a nonnegative f exists iff all single,
//! pair and Boole-Bell moment inequalities hold; K123 is then free within a
//! closed interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{LinearProgram, LpStatus};

/// Tolerance on the emptiness of the K123 interval and on inequality slacks.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k12: f64,
    pub k13: f64,
    pub k23: f64,
    pub k123: Option<f64>,
}

impl MomentSet {
    pub fn new(k1: f64, k2: f64, k3: f64, k12: f64, k13: f64, k23: f64) -> Self {
        MomentSet {
            k1,
            k2,
            k3,
            k12,
            k13,
            k23,
            k123: None,
        }
    }

    /// `[k1, k2, k3, k12, k13, k23]`
    pub fn lower_order(&self) -> [f64; 6] {
        [self.k1, self.k2, self.k3, self.k12, self.k13, self.k23]
    }

    pub fn from_lower_order(m: [f64; 6]) -> Self {
        MomentSet::new(m[0], m[1], m[2], m[3], m[4], m[5])
    }
}

/// Index of (x1, x2, x3): bit 2 set for x1 = −1, bit 1 for x2, bit 0 for x3.
pub fn point_index(x1: i8, x2: i8, x3: i8) -> usize {
    (usize::from(x1 < 0) << 2) | (usize::from(x2 < 0) << 1) | usize::from(x3 < 0)
}

/// The point of {±1}³ at `index`.
pub fn point(index: usize) -> (i8, i8, i8) {
    let s = |bit: usize| if index & bit != 0 { -1 } else { 1 };
    (s(4), s(2), s(1))
}

/// Monomials (1, x1, x2, x3, x1x2, x1x3, x2x3, x1x2x3) at a point.
fn monomials(index: usize) -> [f64; 8] {
    let (x1, x2, x3) = point(index);
    let (a, b, c) = (f64::from(x1), f64::from(x2), f64::from(x3));
    [1.0, a, b, c, a * b, a * c, b * c, a * b * c]
}

/// Probability distribution on {±1}³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trivariate {
    f: [f64; 8],
}

impl Trivariate {
    pub fn new(f: [f64; 8]) -> Result<Self> {
        if f.iter().any(|v| !v.is_finite() || *v < -FEASIBILITY_TOLERANCE || *v > 1.0 + FEASIBILITY_TOLERANCE) {
            return Err(Error::Domain(format!("trivariate values {f:?} outside [0, 1]")));
        }
        let total: f64 = f.iter().sum();
        if (total - 1.0).abs() > FEASIBILITY_TOLERANCE {
            return Err(Error::Domain(format!("trivariate sums to {total}, expected 1")));
        }
        Ok(Trivariate { f })
    }

    pub fn get(&self, x1: i8, x2: i8, x3: i8) -> f64 {
        self.f[point_index(x1, x2, x3)]
    }

    pub fn values(&self) -> &[f64; 8] {
        &self.f
    }
}

/// All seven moments by direct summation over the eight points.
pub fn moments_from_trivariate(f: &Trivariate) -> MomentSet {
    let mut k = [0.0; 8];
    for (i, fv) in f.f.iter().enumerate() {
        for (acc, mono) in k.iter_mut().zip(monomials(i)) {
            *acc += mono * fv;
        }
    }
    MomentSet {
        k1: k[1],
        k2: k[2],
        k3: k[3],
        k12: k[4],
        k13: k[5],
        k23: k[6],
        k123: Some(k[7]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs
    pub slack: f64,
    pub satisfied: bool,
}

fn check(name: String, lhs: f64, rhs: f64) -> InequalityCheck {
    let slack = rhs - lhs;
    InequalityCheck {
        name,
        lhs,
        rhs,
        slack,
        satisfied: slack >= -FEASIBILITY_TOLERANCE,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Three3Report {
    /// |K| ≤ 1 for the six lower-order moments.
    pub single: Vec<InequalityCheck>,
    /// |K_i ± K_j| ≤ 1 ± K_ij.
    pub bivariate: Vec<InequalityCheck>,
    /// |K12 ± K13| ≤ 1 ± K23.
    pub boole_bell: Vec<InequalityCheck>,
}

impl Three3Report {
    pub fn all(&self) -> impl Iterator<Item = &InequalityCheck> {
        self.single.iter().chain(&self.bivariate).chain(&self.boole_bell)
    }

    pub fn all_satisfied(&self) -> bool {
        self.all().all(|c| c.satisfied)
    }

    pub fn violations(&self) -> Vec<&InequalityCheck> {
        self.all().filter(|c| !c.satisfied).collect()
    }
}

pub fn check_three3(m: &MomentSet) -> Three3Report {
    let names = ["K1", "K2", "K3", "K12", "K13", "K23"];
    let single = names
        .iter()
        .zip(m.lower_order())
        .map(|(name, v)| check(format!("|{name}| <= 1"), v.abs(), 1.0))
        .collect();

    let mut bivariate = Vec::with_capacity(6);
    for (i, j, ki, kj, kij) in [
        (1, 2, m.k1, m.k2, m.k12),
        (1, 3, m.k1, m.k3, m.k13),
        (2, 3, m.k2, m.k3, m.k23),
    ] {
        bivariate.push(check(format!("|K{i} + K{j}| <= 1 + K{i}{j}"), (ki + kj).abs(), 1.0 + kij));
        bivariate.push(check(format!("|K{i} - K{j}| <= 1 - K{i}{j}"), (ki - kj).abs(), 1.0 - kij));
    }

    let boole_bell = vec![
        check("|K12 + K13| <= 1 + K23".into(), (m.k12 + m.k13).abs(), 1.0 + m.k23),
        check("|K12 - K13| <= 1 - K23".into(), (m.k12 - m.k13).abs(), 1.0 - m.k23),
    ];

    Three3Report {
        single,
        bivariate,
        boole_bell,
    }
}

/// Range of K123 for which the trivariate is nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct K123Interval {
    pub lhs: f64,
    pub rhs: f64,
    pub feasible: bool,
}

impl K123Interval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lhs + self.rhs)
    }

    pub fn width(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn k123_interval(m: &MomentSet) -> K123Interval {
    let MomentSet {
        k1,
        k2,
        k3,
        k12,
        k13,
        k23,
        ..
    } = *m;
    let lhs = f64::max(
        -1.0 - k3 - k12 + (k1 + k2 + k13 + k23).abs(),
        -1.0 + k3 + k12 + (k1 - k2 - k13 + k23).abs(),
    );
    let rhs = f64::min(
        1.0 - k3 + k12 - (k1 + k2 - k13 - k23).abs(),
        1.0 + k3 - k12 - (k1 - k2 + k13 - k23).abs(),
    );
    K123Interval {
        lhs,
        rhs,
        feasible: rhs >= lhs - FEASIBILITY_TOLERANCE,
    }
}

/// The four arguments whose minimum is the interval width RHS − LHS.
pub fn interval_width_terms(m: &MomentSet) -> [f64; 4] {
    let MomentSet {
        k1,
        k2,
        k3,
        k12,
        k13,
        k23,
        ..
    } = *m;
    [
        2.0 + 2.0 * k12 - (k1 + k2 - k13 - k23).abs() - (k1 + k2 + k13 + k23).abs(),
        2.0 - 2.0 * k12 - (k1 - k2 + k13 - k23).abs() - (k1 - k2 - k13 + k23).abs(),
        2.0 - 2.0 * k3 - (k1 + k2 - k13 - k23).abs() - (k1 - k2 - k13 + k23).abs(),
        2.0 + 2.0 * k3 - (k1 - k2 + k13 - k23).abs() - (k1 + k2 + k13 + k23).abs(),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum K123Choice {
    Lower,
    Upper,
    Midpoint,
    Value(f64),
}

impl std::str::FromStr for K123Choice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lhs" | "lower" => Ok(K123Choice::Lower),
            "rhs" | "upper" => Ok(K123Choice::Upper),
            "mid" | "midpoint" => Ok(K123Choice::Midpoint),
            v => v
                .parse()
                .map(K123Choice::Value)
                .map_err(|_| Error::Domain(format!("invalid K123 choice {v:?}"))),
        }
    }
}

/// Builds the trivariate with the given lower-order moments and a K123
/// from the feasible interval.
pub fn construct_trivariate(m: &MomentSet, choice: K123Choice) -> Result<Trivariate> {
    let interval = k123_interval(m);
    if !interval.feasible {
        let violated: Vec<String> = check_three3(m).violations().iter().map(|c| c.name.clone()).collect();
        return Err(Error::NoDistribution(format!(
            "K123 interval [{}, {}] is empty; violated: {}",
            interval.lhs,
            interval.rhs,
            violated.join(", ")
        )));
    }
    let (lo, hi) = (interval.lhs.min(interval.rhs), interval.rhs.max(interval.lhs));
    let k123 = match choice {
        K123Choice::Lower => lo,
        K123Choice::Upper => hi,
        K123Choice::Midpoint => interval.midpoint(),
        K123Choice::Value(v) => {
            if v < lo - FEASIBILITY_TOLERANCE || v > hi + FEASIBILITY_TOLERANCE {
                return Err(Error::Domain(format!("K123 = {v} outside [{lo}, {hi}]")));
            }
            v
        }
    };
    let coeffs = [1.0, m.k1, m.k2, m.k3, m.k12, m.k13, m.k23, k123];
    let f = std::array::from_fn(|i| {
        monomials(i).iter().zip(&coeffs).map(|(x, k)| x * k).sum::<f64>() / 8.0
    });
    Trivariate::new(f)
}

/// Decides whether some f ≥ 0 with Σf = 1 has the six given moments, by
/// solving the 8-unknown feasibility LP.
pub fn feasibility_oracle(m: &MomentSet) -> bool {
    let targets = [1.0, m.k1, m.k2, m.k3, m.k12, m.k13, m.k23];
    if targets.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let a = (0..7)
        .map(|row| (0..8).map(|i| monomials(i)[row]).collect())
        .collect();
    let lp = LinearProgram::new(a, targets.to_vec(), vec![0.0; 8]).expect("shape is fixed");
    matches!(lp.solve(), Ok(s) if s.status == LpStatus::Optimal)
}
