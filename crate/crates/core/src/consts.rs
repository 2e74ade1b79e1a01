//! Numerical constants shared across modules.

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// √π
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Largest accuracy exponent that is meaningful in 64-bit arithmetic.
pub const MAX_ACCURACY_EXPONENT: u32 = 13;
