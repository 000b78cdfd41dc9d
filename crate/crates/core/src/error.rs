use thiserror::Error;

use crate::jordan::JordanBlockSpec;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is numerically singular: {0}")]
    Singular(String),
    #[error("jordan-unreliable: {reason}")]
    JordanUnreliable {
        reason: String,
        partial: Vec<JordanBlockSpec>,
    },
    #[error("canonical-unreliable: {0}")]
    CanonicalUnreliable(String),
    #[error("not-TWSD-B: {0}")]
    NotTwsdB(String),
    #[error("k-too-large: entries of P_k exceed the overflow guard at k = {0}")]
    KTooLarge(f64),
    #[error("parse error: {0}")]
    Parse(String),
}
