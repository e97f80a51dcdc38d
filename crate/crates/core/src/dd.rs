//! Double-double arithmetic: an unevaluated sum `hi + lo` with |lo| ≤ ulp(hi)/2,
//! giving roughly 32 significant decimal digits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };
    pub const PI: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::PI,
        lo: 1.2246467991473532e-16,
    };
    pub const TWO_PI: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::TAU,
        lo: 2.4492935982947064e-16,
    };
    pub const HALF_PI: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::FRAC_PI_2,
        lo: 6.123233995736766e-17,
    };

    pub const fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    /// Renormalizes an arbitrary pair.
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// Nearest integer, returned as a double-double.
    pub fn round(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            DoubleDouble::new(hi, self.lo.round())
        } else if (hi - self.hi).abs() == 0.5 {
            // tie in `hi` decided by the sign of `lo`
            let down = self.hi.floor();
            if self.lo > 0.0 {
                DoubleDouble::from_f64(down + 1.0)
            } else {
                DoubleDouble::from_f64(down)
            }
        } else {
            DoubleDouble::from_f64(hi)
        }
    }

    pub fn square(self) -> Self {
        let (p, e) = two_prod(self.hi, self.hi);
        let e = e + 2.0 * self.hi * self.lo;
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    fn sin_taylor(r: DoubleDouble) -> DoubleDouble {
        let r2 = r.square();
        let mut term = r;
        let mut sum = r;
        let mut k = 1.0;
        loop {
            term = -(term * r2) / ((k + 1.0) * (k + 2.0));
            k += 2.0;
            sum += term;
            if term.hi.abs() < 1e-35 {
                return sum;
            }
        }
    }

    fn cos_taylor(r: DoubleDouble) -> DoubleDouble {
        let r2 = r.square();
        let mut term = DoubleDouble::ONE;
        let mut sum = DoubleDouble::ONE;
        let mut k = 0.0;
        loop {
            term = -(term * r2) / ((k + 1.0) * (k + 2.0));
            k += 2.0;
            sum += term;
            if term.hi.abs() < 1e-35 {
                return sum;
            }
        }
    }

    /// (sin, cos) with argument reduction modulo π/2.
    pub fn sin_cos_dd(self) -> (DoubleDouble, DoubleDouble) {
        let turns = (self / DoubleDouble::TWO_PI).round();
        let x = self - DoubleDouble::TWO_PI * turns;
        let quarter = (x / DoubleDouble::HALF_PI).round();
        let r = x - DoubleDouble::HALF_PI * quarter;
        let (s, c) = (Self::sin_taylor(r), Self::cos_taylor(r));
        match (quarter.hi as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;
    #[inline]
    fn add(self, b: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = DoubleDouble;
    #[inline]
    fn sub(self, b: DoubleDouble) -> DoubleDouble {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = DoubleDouble;
    #[inline]
    fn mul(self, b: DoubleDouble) -> DoubleDouble {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = DoubleDouble;
    fn div(self, b: DoubleDouble) -> DoubleDouble {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + q3
    }
}

impl Neg for DoubleDouble {
    type Output = DoubleDouble;
    #[inline]
    fn neg(self) -> DoubleDouble {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add<f64> for DoubleDouble {
    type Output = DoubleDouble;
    #[inline]
    fn add(self, b: f64) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        DoubleDouble { hi, lo }
    }
}

impl Sub<f64> for DoubleDouble {
    type Output = DoubleDouble;
    #[inline]
    fn sub(self, b: f64) -> DoubleDouble {
        self + (-b)
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = DoubleDouble;
    #[inline]
    fn mul(self, b: f64) -> DoubleDouble {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble { hi, lo }
    }
}

impl Div<f64> for DoubleDouble {
    type Output = DoubleDouble;
    fn div(self, b: f64) -> DoubleDouble {
        self / DoubleDouble::from_f64(b)
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, b: DoubleDouble) {
        *self = *self + b;
    }
}

impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, b: DoubleDouble) {
        *self = *self - b;
    }
}

impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, b: DoubleDouble) {
        *self = *self * b;
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}", self.hi, self.lo)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDoubleDoubleError(String);

impl fmt::Display for ParseDoubleDoubleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid decimal literal {:?}", self.0)
    }
}

impl std::error::Error for ParseDoubleDoubleError {}

impl FromStr for DoubleDouble {
    type Err = ParseDoubleDoubleError;

    /// Parses a decimal literal (`-1.25E-3`, `0.5`, `42`) correctly to
    /// double-double precision for up to ~30 significant digits.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || ParseDoubleDoubleError(text.to_string());
        let s = text.trim();
        let (negative, s) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let mut digits = DoubleDouble::ZERO;
        let mut scale = exponent;
        let mut seen_point = false;
        let mut seen_digit = false;
        for ch in mantissa.chars() {
            match ch {
                '.' if !seen_point => seen_point = true,
                '0'..='9' => {
                    seen_digit = true;
                    digits = digits * 10.0 + f64::from(ch as u8 - b'0');
                    if seen_point {
                        scale -= 1;
                    }
                }
                _ => return Err(bad()),
            }
        }
        if !seen_digit {
            return Err(bad());
        }
        let ten = DoubleDouble::from_f64(10.0);
        let power = ten.powi(scale.unsigned_abs());
        let value = if scale >= 0 {
            digits * power
        } else {
            digits / power
        };
        Ok(if negative { -value } else { value })
    }
}

impl Scalar for DoubleDouble {
    fn cst(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }

    fn value(&self) -> f64 {
        self.hi
    }

    fn with_value(self, value: f64) -> Self {
        DoubleDouble::from_f64(value)
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from_f64(self.hi.sqrt());
        }
        let y = self.hi.sqrt();
        let residual = self - DoubleDouble::from_f64(y).square();
        DoubleDouble::from_f64(y) + residual.hi / (2.0 * y)
    }

    fn sin(self) -> Self {
        self.sin_cos_dd().0
    }

    fn cos(self) -> Self {
        self.sin_cos_dd().1
    }

    fn sin_cos(self) -> (Self, Self) {
        self.sin_cos_dd()
    }

    fn atan(self) -> Self {
        DoubleDouble::ONE.atan2_impl(self)
    }

    fn atan2(self, x: Self) -> Self {
        x.atan2_impl(self)
    }
}

impl DoubleDouble {
    // angle of (self, y) refined from the double estimate by one Newton step
    fn atan2_impl(self, y: DoubleDouble) -> DoubleDouble {
        let z0 = DoubleDouble::from_f64(y.hi.atan2(self.hi));
        let (s, c) = z0.sin_cos_dd();
        let num = y * c - self * s;
        let den = self * c + y * s;
        z0 + num / den
    }
}
