//! Per-pixel tone math in the log domain.
//!
//! A pixel value `v` in `[0, 1]` is mapped to `x = ln v <= 0`. The illumination
//! refinement keeps the reflectance fixed at the initial log image `x0` and
//! iterates
//!
//! ```text
//! x_{n+1} = x_n / x0 + x0,        x_0 = x0
//! ```
//!
//! which unrolls to the geometric partial sum `sum_{n=0}^{N} x0^{-n} + x0`.
//! When `|x0| > 1` the iteration contracts towards the closed form
//!
//! ```text
//! f(x0) = x0^2 / (x0 - 1)
//! ```
//!
//! `f` is defined on all of `(-inf, 0]`, maps it into itself, fixes `0` and
//! strictly brightens every other value. The production path only ever uses
//! `f` (possibly cascaded); the recursion and the partial sum are kept for
//! validation and tracing.

use crate::error::{Error, Result};

/// Clamp applied to zero-valued pixels before taking the logarithm.
pub const DEFAULT_EPS: f64 = 1e-12;

/// Default lower threshold on the mean V statistic (inclusive middle band).
pub const DEFAULT_THRESHOLD_LOW: f64 = 0.08;
/// Default upper threshold on the mean V statistic (inclusive middle band).
pub const DEFAULT_THRESHOLD_HIGH: f64 = 0.16;

/// A dimensionless intensity in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NormalizedValue(f64);

impl NormalizedValue {
    pub const ZERO: Self = NormalizedValue(0.0);
    pub const ONE: Self = NormalizedValue(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite(value));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfRange {
                value,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(NormalizedValue(value))
    }

    /// Converts an 8-bit sample by exact division by 255.
    pub fn from_u8(value: u8) -> Self {
        NormalizedValue(f64::from(value) / 255.0)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for NormalizedValue {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        NormalizedValue::new(value)
    }
}

impl From<NormalizedValue> for f64 {
    fn from(v: NormalizedValue) -> f64 {
        v.0
    }
}

/// Natural logarithm of a [`NormalizedValue`]; always `<= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogDomainValue(f64);

impl LogDomainValue {
    pub const ZERO: Self = LogDomainValue(0.0);

    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        if x > 0.0 {
            return Err(Error::OutOfRange {
                value: x,
                min: f64::NEG_INFINITY,
                max: 0.0,
            });
        }
        Ok(LogDomainValue(x))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `exp(x)`, back in the linear domain.
    pub fn to_linear(self) -> NormalizedValue {
        NormalizedValue(self.0.exp().min(1.0))
    }
}

/// Number of cascaded applications of the closed-form transfer.
///
/// Level selection only ever produces 1, 2 or 3; larger counts come from an
/// explicit override.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelCount(u32);

impl LevelCount {
    pub const ONE: Self = LevelCount(1);
    pub const TWO: Self = LevelCount(2);
    pub const THREE: Self = LevelCount(3);

    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidLevels(k));
        }
        Ok(LevelCount(k))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl std::fmt::Display for LevelCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// State of the literal illumination recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationState {
    /// Initial log image, which doubles as the fixed reflectance.
    pub x0: LogDomainValue,
    pub x_n: f64,
    pub n: u32,
}

impl IterationState {
    pub fn new(x0: LogDomainValue) -> Self {
        IterationState {
            x0,
            x_n: x0.get(),
            n: 0,
        }
    }

    pub fn step(self) -> Result<Self> {
        retinex_step(self)
    }
}

/// `ln(max(v, eps))` without validation; the caller guarantees `v <= 1` and
/// `eps > 0`.
#[inline(always)]
pub fn ln_clamped(v: f64, eps: f64) -> f64 {
    v.max(eps).ln()
}

/// Closed-form transfer `x^2 / (x - 1)` on raw `f64`.
#[inline(always)]
pub fn transfer(x: f64) -> f64 {
    x * x / (x - 1.0)
}

/// `transfer` applied `k` times.
#[inline(always)]
pub fn transfer_n(mut x: f64, k: u32) -> f64 {
    for _ in 0..k {
        x = transfer(x);
    }
    x
}

pub fn to_log(v: NormalizedValue, eps: f64) -> Result<LogDomainValue> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange {
            value: eps,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(LogDomainValue(ln_clamped(v.get(), eps)))
}

/// One step of `x_{n+1} = x_n / x0 + x0`.
///
/// Only contracts when `|x0| > 1` (pixel values below `1/e`). Fails for
/// `x0 = 0`; callers short-circuit white pixels instead.
pub fn retinex_step(state: IterationState) -> Result<IterationState> {
    let x0 = state.x0.get();
    if x0 == 0.0 {
        return Err(Error::ZeroInitialValue);
    }
    Ok(IterationState {
        x0: state.x0,
        x_n: state.x_n / x0 + x0,
        n: state.n + 1,
    })
}

/// `sum_{n=0}^{N} x0^{-n} + x0`, equal to `N + 1` recursion steps from `x0`.
pub fn partial_sum_oracle(x0: LogDomainValue, n: u32) -> Result<f64> {
    let x0 = x0.get();
    if x0 == 0.0 {
        return Err(Error::ZeroInitialValue);
    }
    let ratio = x0.recip();
    let mut term = 1.0_f64;
    let mut sum = 0.0_f64;
    for i in 0..=n {
        if i > 0 {
            term *= ratio;
        }
        if !term.is_finite() {
            return Err(Error::Overflow { term: i });
        }
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Overflow { term: i });
        }
    }
    Ok(sum + x0)
}

/// Limit of the recursion, `x0^2 / (x0 - 1)`. Satisfies `x0 <= f(x0) <= 0`.
pub fn retinex_fixed_point(x0: LogDomainValue) -> LogDomainValue {
    LogDomainValue(transfer(x0.get()))
}

/// The closed form applied `k` times in succession.
pub fn cascade(x0: LogDomainValue, k: LevelCount) -> LogDomainValue {
    LogDomainValue(transfer_n(x0.get(), k.get()))
}

/// Picks the cascade depth from the mean V of the input using the default
/// thresholds: 1 above 0.16, 2 on `[0.08, 0.16]`, 3 below 0.08.
pub fn select_levels(mu_v: NormalizedValue) -> LevelCount {
    select_levels_with(mu_v, DEFAULT_THRESHOLD_LOW, DEFAULT_THRESHOLD_HIGH)
}

pub fn select_levels_with(mu_v: NormalizedValue, low: f64, high: f64) -> LevelCount {
    let mu = mu_v.get();
    if mu > high {
        LevelCount::ONE
    } else if mu >= low {
        LevelCount::TWO
    } else {
        LevelCount::THREE
    }
}
