//! Resource bounds, with environment-variable overrides.
//!
//! | variable | meaning | default |
//! |---|---|---|
//! | `PSLRACK_MAX_Q` | largest accepted field order | 1024 |
//! | `PSLRACK_LATTICE_BOUND` | largest group order for full subgroup lattices | 660 |
//! | `PSLRACK_COSET_LIMIT` | coset table rows before enumeration gives up | 1000000 |

use serde::Serialize;
use thiserror::Error;

use crate::field::{field_of_order, prime_power, Field, FieldError};
use crate::fpgroup::DEFAULT_COSET_LIMIT;
use crate::subgroups::DEFAULT_LATTICE_BOUND;

pub const DEFAULT_MAX_Q: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{var} = {value:?} is not a positive integer")]
    BadValue { var: &'static str, value: String },
    #[error("{q} is not a prime power")]
    NotPrimePower { q: u32 },
    #[error("q = {q} exceeds the configured maximum {max} (PSLRACK_MAX_Q)")]
    QTooLarge { q: u32, max: u32 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_q: u32,
    pub lattice_bound: u64,
    pub coset_limit: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_q: DEFAULT_MAX_Q, lattice_bound: DEFAULT_LATTICE_BOUND, coset_limit: DEFAULT_COSET_LIMIT }
    }
}

impl Limits {
    /// Defaults overridden by the process environment.
    pub fn from_env() -> Result<Limits, ConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Limits, ConfigError> {
        fn read<T: std::str::FromStr + PartialOrd + From<u8>>(
            get: &impl Fn(&str) -> Option<String>,
            var: &'static str,
            default: T,
        ) -> Result<T, ConfigError> {
            match get(var) {
                None => Ok(default),
                Some(v) => match v.trim().parse::<T>() {
                    Ok(x) if x > T::from(0) => Ok(x),
                    _ => Err(ConfigError::BadValue { var, value: v }),
                },
            }
        }
        let d = Limits::default();
        Ok(Limits {
            max_q: read(&get, "PSLRACK_MAX_Q", d.max_q)?,
            lattice_bound: read(&get, "PSLRACK_LATTICE_BOUND", d.lattice_bound)?,
            coset_limit: read(&get, "PSLRACK_COSET_LIMIT", d.coset_limit)?,
        })
    }

    /// The field of order `q`, if `q` is an admissible prime power.
    pub fn field(&self, q: u32) -> Result<Field, ConfigError> {
        if prime_power(q).is_none() {
            return Err(ConfigError::NotPrimePower { q });
        }
        if q > self.max_q {
            return Err(ConfigError::QTooLarge { q, max: self.max_q });
        }
        Ok(field_of_order(q)?)
    }
}
