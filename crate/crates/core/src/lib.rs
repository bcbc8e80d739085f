//! Boole-Bell inequality analysis of digitized exchange-rate data.
//!
//! The pipeline digitizes forward differences of exchange rates to ±1,
//! splits the record into three segments, correlates currency pairs per
//! segment and tests every currency triple against the Boole-Bell inequality
//! `|C_1(A,B) ± C_2(A,C)| ∓ C_3(B,C) ≤ 1`. Violations are then set against
//! the model-free bound `2(1 − Γ)`, where Γ is the largest fraction of the
//! data that can be reshuffled into triples, obtained by linear programming.
//!
//! The [`fine`] module covers moment problems for three ±1 variables and
//! [`synth`] regenerates the synthetic pair experiments.

pub mod correlation;
pub mod error;
pub mod fine;
pub mod inequality;
pub mod ingest;
pub mod report;
pub mod rng;
pub mod simplex;
pub mod synth;
pub mod triple_lp;

pub use error::{Error, Result};
