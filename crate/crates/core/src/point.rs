//! Input points: exact rational vectors, or fixed-point reals with an error radius.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::fixed;
use crate::linear::RationalVector3;

/// Default working precision in bits for irrational inputs.
pub const DEFAULT_PRECISION: u32 = 256;

/// A coordinate token: an exact rational or one of the named constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Real {
    Exact(BigRational),
    E,
    Pi,
}

impl Real {
    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(ten.pow(scale as u32));
    } else {
        r /= BigRational::from_integer(ten.pow(scale.unsigned_abs()));
    }
    Some(if neg { -r } else { r })
}

impl FromStr for Real {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "e" => return Ok(Real::E),
            "pi" | "π" => return Ok(Real::Pi),
            _ => {}
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {t:?}")))?;
            let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {t:?}")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {t:?}")));
            }
            return Ok(Real::Exact(BigRational::new(n, d)));
        }
        parse_decimal(t).map(Real::Exact).ok_or_else(|| Error::Parse(format!("not a number: {t:?}")))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => write!(f, "{q}"),
            Real::E => f.write_str("e"),
            Real::Pi => f.write_str("pi"),
        }
    }
}

/// A point of `R^3` held as fixed-point mantissas `m_i / 2^precision`.
///
/// The true coordinate lies within `radius_i / 2^precision` of the mantissa.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloatVector3 {
    pub(crate) mant: [BigInt; 3],
    pub(crate) radius: [BigInt; 3],
    precision: u32,
}

impl FloatVector3 {
    pub fn from_reals(v: &[Real; 3], precision: u32) -> Result<Self> {
        if precision < 16 {
            return Err(Error::Domain(format!("precision {precision} is too small")));
        }
        let mut mant: [BigInt; 3] = Default::default();
        let mut radius: [BigInt; 3] = Default::default();
        for i in 0..3 {
            let (m, r) = match &v[i] {
                Real::Exact(q) => {
                    let scaled = q * BigRational::from_integer(BigInt::from(1) << precision);
                    let exact = scaled.is_integer();
                    (scaled.floor().to_integer(), BigInt::from(if exact { 0 } else { 1 }))
                }
                Real::E => (fixed::e_fixed(precision), BigInt::from(2)),
                Real::Pi => (fixed::pi_fixed(precision), BigInt::from(2)),
            };
            mant[i] = m;
            radius[i] = r;
        }
        Ok(Self { mant, radius, precision })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn to_f64(&self) -> [f64; 3] {
        std::array::from_fn(|i| fixed::to_f64(&self.mant[i], self.precision))
    }

    pub fn radius_f64(&self) -> [f64; 3] {
        std::array::from_fn(|i| fixed::to_f64(&self.radius[i], self.precision))
    }

    pub(crate) fn is_nonnegative(&self) -> bool {
        (0..3).all(|i| !(&self.mant[i] + &self.radius[i]).is_negative())
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.mant.iter().chain(&self.radius).all(|x| x.is_zero())
    }
}

/// A point given either exactly or at finite precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Exact(RationalVector3),
    Float(FloatVector3),
}

impl Point {
    /// Parses `"a,b,c"` where each token is a decimal, a fraction, `e` or `pi`.
    ///
    /// All-rational input stays exact; any named constant switches to fixed point.
    pub fn parse(s: &str, precision: u32) -> Result<Self> {
        let toks: Vec<&str> = s.split(',').collect();
        if toks.len() != 3 {
            return Err(Error::Parse(format!("expected three comma-separated coordinates, got {s:?}")));
        }
        let reals: Vec<Real> = toks.iter().map(|t| t.parse()).collect::<Result<_>>()?;
        let reals: [Real; 3] = reals.try_into().expect("three tokens");
        Self::from_reals(reals, precision)
    }

    pub fn from_reals(reals: [Real; 3], precision: u32) -> Result<Self> {
        if reals.iter().all(Real::is_exact) {
            let q = reals.map(|r| match r {
                Real::Exact(q) => q,
                _ => unreachable!(),
            });
            Ok(Point::Exact(RationalVector3(q)))
        } else {
            Ok(Point::Float(FloatVector3::from_reals(&reals, precision)?))
        }
    }

    pub fn to_f64(&self) -> [f64; 3] {
        match self {
            Point::Exact(q) => q.to_f64(),
            Point::Float(v) => v.to_f64(),
        }
    }
}
