use rug::ops::Pow;
use rug::Float;

use super::RiemannError;

pub const DEFAULT_DIGITS: u32 = 50;
pub const MIN_DIGITS: u32 = 30;

/// Working precision shared by every computation in the module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    digits: u32,
    /// Largest `|lambda|` accepted by the direct evaluator.
    pub max_lambda: f64,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            digits: DEFAULT_DIGITS,
            max_lambda: 100.0,
        }
    }
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self, RiemannError> {
        if digits < MIN_DIGITS {
            return Err(RiemannError::PrecisionTooLow {
                digits,
                min: MIN_DIGITS,
            });
        }
        Ok(PrecisionContext {
            digits,
            ..Default::default()
        })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Mantissa bits: the requested digits plus 64 guard bits.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64
    }

    pub fn float(&self, x: f64) -> Float {
        Float::with_val(self.bits(), x)
    }

    /// `10^-e` at working precision.
    pub fn ten_pow_neg(&self, e: u32) -> Float {
        let ten = Float::with_val(self.bits(), 10);
        Float::with_val(self.bits(), ten.pow(-(e as i32)))
    }

    /// Series truncation threshold `10^-(digits + 5)`.
    pub fn series_eps(&self) -> Float {
        self.ten_pow_neg(self.digits + 5)
    }
}
