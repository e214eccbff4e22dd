use std::collections::BTreeSet;
use std::path::PathBuf;

use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A query or constraint that violates a structural precondition.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    /// One or more nodal counts are neither computable nor present in a table.
    #[error("oracle data missing for {} key(s): {}", keys.len(), keys.join(", "))]
    OracleMissing { keys: Vec<String> },

    /// An exact division left a remainder, or a count came out negative.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn missing(key: impl Into<String>) -> Self {
        Error::OracleMissing {
            keys: vec![key.into()],
        }
    }
}

/// Running sum of recursion terms.
///
/// Missing oracle keys are collected instead of aborting on the first one, so a
/// failed evaluation reports every key the caller has to supply.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    total: BigInt,
    missing: BTreeSet<String>,
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coeff * term`. A zero coefficient skips evaluating the term.
    pub fn add<F>(&mut self, coeff: impl Into<BigInt>, term: F) -> Result<()>
    where
        F: FnOnce() -> Result<BigInt>,
    {
        let coeff = coeff.into();
        if coeff == BigInt::from(0) {
            return Ok(());
        }
        match term() {
            Ok(v) => {
                self.total += coeff * v;
                Ok(())
            }
            Err(Error::OracleMissing { keys }) => {
                self.missing.extend(keys);
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    pub fn finish(self) -> Result<BigInt> {
        if self.missing.is_empty() {
            Ok(self.total)
        } else {
            Err(Error::OracleMissing {
                keys: self.missing.into_iter().collect(),
            })
        }
    }
}

/// Divides exactly or reports an internal-consistency failure naming `what`.
pub(crate) fn exact_div(num: &BigInt, den: &BigInt, what: &str) -> Result<BigInt> {
    use num_integer::Integer;
    let (q, rem) = num.div_rem(den);
    if rem != BigInt::from(0) {
        return Err(Error::Inconsistent(format!(
            "{what}: {num} is not divisible by {den}"
        )));
    }
    Ok(q)
}

pub(crate) fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
