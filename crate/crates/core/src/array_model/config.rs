use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn unit_power() -> f64 {
    1.0
}

/// Half-wavelength ULA with `m` antennas, `q` orthonormal waveforms and
/// total transmit power `e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    #[serde(rename = "E", default = "unit_power")]
    pub e: f64,
}

impl ArrayConfig {
    pub fn new(m: usize, q: usize, e: f64) -> Result<Self> {
        let cfg = ArrayConfig { m, q, e };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Validation("antenna count M must be >= 1".into()));
        }
        if self.q == 0 {
            return Err(Error::Validation("waveform count Q must be >= 1".into()));
        }
        if !(self.e > 0.0 && self.e.is_finite()) {
            return Err(Error::Validation(format!(
                "total power E must be positive, got {}",
                self.e
            )));
        }
        Ok(())
    }

    /// Length of `c = vec{C}`.
    pub fn dim(&self) -> usize {
        self.m * self.q
    }
}
