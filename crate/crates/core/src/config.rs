//! Home for every absolute constant the analysis leaves implicit, plus
//! resource budgets. Parsed from a flat `key = value` file; unknown keys are
//! rejected so every constant choice stays auditable.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct ConstantsConfig {
    /// C in K = ceil(C * alpha^-2 * log N).
    pub c_kdef: f64,
    /// c0 in N' = floor(c0 * nu * alpha * N / (K q^2)).
    pub c0_nprime: f64,
    /// c in nu = exp(-c * log(1/alpha) / loglog(1/alpha)).
    pub c_nu: f64,
    /// c' in m = ceil(c' * loglog(1/alpha)), floored at 2.
    pub c_prime_m: f64,
    /// Sparse-branch threshold: sparse when log(1/alpha) >= c_sparse * log N.
    pub c_sparse: f64,
    /// Exponent in the small-arc discard threshold N / K^6 (fixed at 6).
    pub discard_exponent: u32,
    /// Cap on |B|^(2m) for the brute energy backend.
    pub tuple_budget: u128,
    /// Cap on the meet-in-the-middle sum table, bytes.
    pub memory_budget: u64,
    /// PRNG seed for randomized constructors.
    pub seed: u64,
    /// FFT grid oversampling factor for spectrum extraction.
    pub grid_oversample: u32,
    /// Cap on the number of frequencies listed in a SpectrumReport.
    pub max_report_frequencies: usize,
    /// Absolute floor on N below which the iteration stops.
    pub n_floor: u64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig {
            c_kdef: 1.0,
            c0_nprime: 0.01,
            c_nu: 1.0,
            c_prime_m: 1.0,
            c_sparse: 0.25,
            discard_exponent: 6,
            tuple_budget: crate::energy::DEFAULT_TUPLE_BUDGET,
            memory_budget: crate::energy::DEFAULT_MEMORY_BUDGET,
            seed: 0,
            grid_oversample: 8,
            max_report_frequencies: 1024,
            n_floor: 32,
        }
    }
}

impl ConstantsConfig {
    /// Parses the flat `key = value` format. Comment lines start with '#'.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = ConstantsConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |e: &dyn std::fmt::Display| {
                Error::Parse(format!("line {}: bad value for {key}: {e}", lineno + 1))
            };
            match key {
                "c_kdef" => config.c_kdef = value.parse().map_err(|e| bad(&e))?,
                "c0_nprime" => config.c0_nprime = value.parse().map_err(|e| bad(&e))?,
                "c_nu" => config.c_nu = value.parse().map_err(|e| bad(&e))?,
                "c_prime_m" => config.c_prime_m = value.parse().map_err(|e| bad(&e))?,
                "c_sparse" => config.c_sparse = value.parse().map_err(|e| bad(&e))?,
                "discard_exponent" => {
                    config.discard_exponent = value.parse().map_err(|e| bad(&e))?;
                    if config.discard_exponent != 6 {
                        return Err(Error::Parse(
                            "discard_exponent is fixed at 6".into(),
                        ));
                    }
                }
                "tuple_budget" => config.tuple_budget = value.parse().map_err(|e| bad(&e))?,
                "memory_budget" => config.memory_budget = value.parse().map_err(|e| bad(&e))?,
                "seed" => config.seed = value.parse().map_err(|e| bad(&e))?,
                "grid_oversample" => config.grid_oversample = value.parse().map_err(|e| bad(&e))?,
                "max_report_frequencies" => {
                    config.max_report_frequencies = value.parse().map_err(|e| bad(&e))?
                }
                "n_floor" => config.n_floor = value.parse().map_err(|e| bad(&e))?,
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("c_kdef", self.c_kdef),
            ("c0_nprime", self.c0_nprime),
            ("c_prime_m", self.c_prime_m),
            ("c_sparse", self.c_sparse),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        if self.c_nu < 0.0 {
            return Err(Error::InvalidArgument("c_nu must be nonnegative".into()));
        }
        Ok(())
    }
}
