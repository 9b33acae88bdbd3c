//! Closed intervals with rational endpoints and explicit outward rounding.
//!
//! Arithmetic on endpoints is exact; `round_out` trades exactness for size by snapping the
//! endpoints outward to dyadic rationals with a given number of significant bits.
//! Degenerate intervals are never rounded, so exact inputs give exact outputs.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    pub fn exact(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_int(x: i64) -> Self {
        Self::exact(BigRational::from_integer(BigInt::from(x)))
    }

    pub fn from_biguint(x: &BigUint) -> Self {
        Self::exact(BigRational::from_integer(BigInt::from(x.clone())))
    }

    pub fn zero() -> Self {
        Self::exact(BigRational::zero())
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.clone().min(other.lo.clone()), hi: self.hi.clone().max(other.hi.clone()) }
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.lo.is_negative()
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        if self.is_exact() && o.is_exact() {
            return Interval::exact(&self.lo * &o.lo);
        }
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().expect("four").clone();
        let hi = c.iter().max().expect("four").clone();
        Interval { lo, hi }
    }

    pub fn scale(&self, r: &BigRational) -> Interval {
        self.mul(&Interval::exact(r.clone()))
    }

    pub fn div(&self, o: &Interval) -> Result<Interval> {
        if o.contains(&BigRational::zero()) {
            return Err(Error::Inconclusive("division by an interval containing zero".into()));
        }
        let inv = Interval { lo: o.hi.recip(), hi: o.lo.recip() };
        Ok(self.mul(&inv))
    }

    pub fn pow(&self, e: u32) -> Interval {
        let mut acc = Interval::exact(BigRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Snaps endpoints outward to `prec` significant bits; exact intervals are returned as is.
    pub fn round_out(&self, prec: u32) -> Interval {
        if self.is_exact() {
            return self.clone();
        }
        Interval { lo: round_dyadic(&self.lo, prec, false), hi: round_dyadic(&self.hi, prec, true) }
    }

    /// Compares against a threshold; straddling intervals are inconclusive.
    pub fn compare(&self, t: &BigRational) -> Result<Ordering> {
        if &self.hi < t {
            Ok(Ordering::Less)
        } else if &self.lo > t {
            Ok(Ordering::Greater)
        } else if self.is_exact() {
            Ok(Ordering::Equal)
        } else {
            Err(Error::Inconclusive(format!("interval {self} straddles {}", fmt_sci(t, 12, false))))
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.mid())
    }

    /// `[lo,hi]` in decimal with `sig` significant digits, rounded outward.
    pub fn fmt_decimal(&self, sig: usize) -> String {
        format!("[{},{}]", fmt_sci(&self.lo, sig, false), fmt_sci(&self.hi, sig, true))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact_value() {
            Some(x) => write!(f, "{x}"),
            None => write!(f, "{}", self.fmt_decimal(20)),
        }
    }
}

fn bits(x: &BigInt) -> i64 {
    x.bits() as i64
}

/// Rounds `x` to a dyadic rational with about `prec` significant bits, downward or upward.
pub fn round_dyadic(x: &BigRational, prec: u32, up: bool) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let e = bits(x.numer()) - bits(x.denom());
    let shift = prec as i64 - e;
    let (num, den) = if shift >= 0 {
        (x.numer() << (shift as usize), x.denom().clone())
    } else {
        (x.numer().clone(), x.denom() << ((-shift) as usize))
    };
    let m = if up { -((-num).div_floor(&den)) } else { num.div_floor(&den) };
    if shift >= 0 {
        BigRational::new(m, BigInt::one() << (shift as usize))
    } else {
        BigRational::from_integer(m << ((-shift) as usize))
    }
}

pub fn rat_to_f64(x: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = bits(x.numer()) - bits(x.denom());
    let scaled = if shift > 0 {
        x / BigRational::from_integer(BigInt::one() << (shift as usize))
    } else {
        x * BigRational::from_integer(BigInt::one() << ((-shift) as usize))
    };
    let m = scaled.numer().to_f64().unwrap_or(0.0) / scaled.denom().to_f64().unwrap_or(1.0);
    m * 2f64.powi(shift as i32)
}

/// Scientific notation with `sig` significant digits, rounded toward +inf when `up`.
pub fn fmt_sci(x: &BigRational, sig: usize, up: bool) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let neg = x.is_negative();
    let a = x.abs();
    // up-rounding of a negative number truncates its magnitude
    let mag_up = up != neg;
    let mut e10 = estimate_log10(&a);
    loop {
        let scale = sig as i64 - 1 - e10;
        let scaled = if scale >= 0 {
            &a * BigRational::from_integer(num_traits::pow(BigInt::from(10), scale as usize))
        } else {
            &a / BigRational::from_integer(num_traits::pow(BigInt::from(10), (-scale) as usize))
        };
        let m = if mag_up { scaled.ceil().to_integer() } else { scaled.floor().to_integer() };
        let digits = m.to_string();
        if digits.len() > sig && digits.len() > 1 && !(mag_up && digits.trim_end_matches('0') == "1") {
            e10 += 1;
            continue;
        }
        if digits.len() < sig && m.is_positive() {
            e10 -= 1;
            continue;
        }
        let (head, tail) = digits.split_at(1);
        let exp = e10 + (digits.len() as i64 - sig as i64);
        let tail = tail.trim_end_matches('0');
        let body = if tail.is_empty() { head.to_string() } else { format!("{head}.{tail}") };
        let sign = if neg { "-" } else { "" };
        return if exp == 0 { format!("{sign}{body}") } else { format!("{sign}{body}e{exp}") };
    }
}

fn estimate_log10(a: &BigRational) -> i64 {
    let b = bits(a.numer()) - bits(a.denom());
    ((b as f64) * std::f64::consts::LOG10_2).floor() as i64
}

pub fn fmt_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
