//! Exact rational arithmetic helpers on top of `num_rational::BigRational`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `10^-k` exactly.
pub fn pow10_neg(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(10u32).pow(k))
}

/// Parses `p/q`, an integer, or a plain/scientific decimal (`0.001`, `1e-8`)
/// into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..].parse().map_err(|_| bad())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10u32);
    let mut r = if scale >= 0 {
        Rational::from_integer(all * ten.pow(scale as u32))
    } else {
        Rational::new(all, ten.pow((-scale) as u32))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Canonical `p/q` rendering (always with a denominator).
pub fn to_exact_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Non-authoritative decimal rendering, 15 significant digits.
pub fn to_decimal_string(r: &Rational) -> String {
    let x = to_f64(r);
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10();
    if (-4.0..15.0).contains(&mag) {
        let decimals = (14 - mag.floor() as i32).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.14e}")
    }
}

pub fn pow(base: &Rational, exp: i32) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

/// Exact rational nearest to `x` with denominator `denom`. Used to snap
/// sampled reals onto a fixed grid.
pub fn from_f64_on_grid(x: f64, denom: u64) -> Rational {
    let k = (x * denom as f64).round() as i64;
    Rational::new(BigInt::from(k), BigInt::from(denom))
}

/// Outward rounding onto the dyadic grid `2^-bits`: returns `(down, up)` with
/// `down <= lo` and `hi <= up`. Values already on the grid are untouched.
/// Sums of grid values keep denominators of at most `bits` bits.
pub fn round_outward(lo: &Rational, hi: &Rational, bits: u64) -> (Rational, Rational) {
    (round_dyadic(lo, bits, false), round_dyadic(hi, bits, true))
}

fn round_dyadic(x: &Rational, bits: u64, up: bool) -> Rational {
    let d = x.denom();
    let dyadic = (d & (d - BigInt::one())).is_zero();
    if dyadic && d.bits() <= bits + 1 {
        return x.clone();
    }
    let scale = BigInt::one() << bits;
    let scaled = x.numer() * &scale;
    let (q, r) = scaled.div_mod_floor(x.denom());
    let q = if up && !r.is_zero() { q + 1 } else { q };
    Rational::new(q, scale)
}

pub fn bit_size(x: &Rational) -> u64 {
    x.numer().bits().max(x.denom().bits())
}

pub fn is_positive(x: &Rational) -> bool {
    x.numer().sign() == Sign::Plus
}

/// Serde adaptor emitting `{ "exact": "p/q", "decimal": "..." }`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactValue(pub Rational);

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExactValue", 2)?;
        st.serialize_field("exact", &to_exact_string(&self.0))?;
        st.serialize_field("decimal", &to_decimal_string(&self.0))?;
        st.end()
    }
}

impl From<Rational> for ExactValue {
    fn from(r: Rational) -> Self {
        ExactValue(r)
    }
}
