//! Exact-arithmetic irrationality, transcendence and Cremer-condition
//! criteria for series of positive rationals `Σ a_n / b_n`.

pub mod catalog;
pub mod criteria;
pub mod magnitude;
pub mod oracle;
pub mod rational;
pub mod report;
pub mod seqexpr;
pub mod series;
pub mod specfile;
