//! Integer counts that survive astronomically large mode sums.
//!
//! Counting-function values grow like exp(exp(...)) as the spectral offset
//! shrinks, so a count is either an exact big integer or a base-10 logarithm.
//! Exact arithmetic is used whenever every operand is exact; any mixing
//! promotes to the log form. Display switches representation at 10^15.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Counts at or below this are printed as plain integers.
pub const EXACT_DISPLAY_LIMIT: f64 = 1e15;

/// log10 of a big integer, accurate to ~1e-15 relative.
pub fn big_log10(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 63 {
        return (v.to_u64().expect("fits") as f64).log10();
    }
    let shift = bits - 63;
    let top = (v >> shift).to_u64().expect("63 bits fit");
    (top as f64).log10() + shift as f64 * std::f64::consts::LOG10_2
}

/// Floor of a nonnegative finite f64 as a big integer.
pub fn f64_floor_to_biguint(x: f64) -> Option<BigUint> {
    if !x.is_finite() || x < 0.0 {
        return None;
    }
    let x = x.floor();
    if x < 1.0 {
        return Some(BigUint::zero());
    }
    if x <= u128::MAX as f64 {
        return Some(BigUint::from(x as u128));
    }
    let bits = x.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mantissa = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
    // x = mantissa * 2^(exponent - 52), exponent >= 127 here so the shift is positive
    Some(BigUint::from(mantissa) << (exponent - 52) as u64)
}

/// A nonnegative eigenvalue count.
#[derive(Debug, Clone)]
pub enum Count {
    Exact(BigUint),
    Log10(f64),
}

impl Count {
    pub fn zero() -> Self {
        Count::Exact(BigUint::zero())
    }

    pub fn from_u64(v: u64) -> Self {
        Count::Exact(BigUint::from(v))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Count::Exact(v) => v.is_zero(),
            Count::Log10(l) => *l == f64::NEG_INFINITY,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Count::Exact(_))
    }

    pub fn log10(&self) -> f64 {
        match self {
            Count::Exact(v) => big_log10(v),
            Count::Log10(l) => *l,
        }
    }

    /// Approximate value as f64 (infinite when out of range).
    pub fn approx(&self) -> f64 {
        match self {
            Count::Exact(v) => v.to_f64().unwrap_or(f64::INFINITY),
            Count::Log10(l) => 10f64.powf(*l),
        }
    }

    pub fn add(&self, other: &Count) -> Count {
        match (self, other) {
            (Count::Exact(a), Count::Exact(b)) => Count::Exact(a + b),
            _ => Count::Log10(log10_add(self.log10(), other.log10())),
        }
    }

    /// self - other, clamped at zero. Band arithmetic never goes negative
    /// when the cumulative counting function is monotone.
    pub fn saturating_sub(&self, other: &Count) -> Count {
        match (self, other) {
            (Count::Exact(a), Count::Exact(b)) => {
                if a >= b {
                    Count::Exact(a - b)
                } else {
                    Count::zero()
                }
            }
            _ => Count::Log10(log10_sub(self.log10(), other.log10())),
        }
    }

    pub fn scale(&self, k: u64) -> Count {
        match self {
            Count::Exact(v) => Count::Exact(v * BigUint::from(k)),
            Count::Log10(l) => {
                if k == 0 {
                    Count::zero()
                } else {
                    Count::Log10(l + (k as f64).log10())
                }
            }
        }
    }

    pub fn cmp_log(&self, other: &Count) -> Ordering {
        if let (Count::Exact(a), Count::Exact(b)) = (self, other) {
            return a.cmp(b);
        }
        self.log10()
            .partial_cmp(&other.log10())
            .unwrap_or(Ordering::Equal)
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Exact(v) if big_log10(v) <= EXACT_DISPLAY_LIMIT.log10() => write!(f, "{v}"),
            other => {
                let l = other.log10();
                if l == f64::NEG_INFINITY {
                    write!(f, "0")
                } else {
                    write!(f, "10^{l}")
                }
            }
        }
    }
}

/// log10(10^a + 10^b).
pub fn log10_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + 10f64.powf(lo - hi)).log10()
}

/// log10(10^a - 10^b), clamped at -inf when b >= a.
pub fn log10_sub(a: f64, b: f64) -> f64 {
    if b >= a {
        return f64::NEG_INFINITY;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let d = 1.0 - 10f64.powf(b - a);
    if d <= 0.0 {
        f64::NEG_INFINITY
    } else {
        a + d.log10()
    }
}

/// A positive scalar carried as its natural logarithm, so quantities like
/// e^(2 rho_u) stay usable long after f64 overflows.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogScale {
    pub ln: f64,
}

impl LogScale {
    pub fn from_value(v: f64) -> Self {
        LogScale { ln: v.ln() }
    }

    pub fn from_ln(ln: f64) -> Self {
        LogScale { ln }
    }

    pub fn zero() -> Self {
        LogScale {
            ln: f64::NEG_INFINITY,
        }
    }

    /// Plain value; +inf when the exponent exceeds f64 range.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn log10(self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_and_display() {
        let a = Count::from_u64(7);
        let b = Count::from_u64(5);
        assert_eq!(format!("{}", a.add(&b)), "12");
        assert_eq!(format!("{}", a.saturating_sub(&b)), "2");
        assert_eq!(format!("{}", b.saturating_sub(&a)), "0");
        assert_eq!(format!("{}", a.scale(3)), "21");
    }

    #[test]
    fn log10_of_big_integers() {
        let v = BigUint::from(10u32).pow(40);
        assert!((big_log10(&v) - 40.0).abs() < 1e-12);
        let w = BigUint::from(2u32).pow(200);
        assert!((big_log10(&w) - 200.0 * std::f64::consts::LOG10_2).abs() < 1e-10);
    }

    #[test]
    fn promotion_keeps_twelve_digits() {
        // exact and log paths agree on the overlap band
        for exp in [6u32, 9, 12, 15] {
            let v = BigUint::from(10u32).pow(exp) + BigUint::from(12345u32);
            let exact = Count::Exact(v.clone());
            let logged = Count::Log10(big_log10(&v));
            assert!((exact.log10() - logged.log10()).abs() < 1e-12);
        }
    }

    #[test]
    fn log_add_sub_roundtrip() {
        let a = 20.0;
        let b = 19.2;
        let s = log10_add(a, b);
        let back = log10_sub(s, b);
        assert!((back - a).abs() < 1e-12);
        assert_eq!(log10_sub(b, a), f64::NEG_INFINITY);
    }

    #[test]
    fn f64_to_biguint_large() {
        let x = 1e300;
        let v = f64_floor_to_biguint(x).unwrap();
        assert!((big_log10(&v) - 300.0).abs() < 1e-9);
        assert_eq!(f64_floor_to_biguint(0.3).unwrap(), BigUint::zero());
        assert!(f64_floor_to_biguint(-1.0).is_none());
        assert!(f64_floor_to_biguint(f64::INFINITY).is_none());
    }
}
