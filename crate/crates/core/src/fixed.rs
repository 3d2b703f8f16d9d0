//! Fixed-point reals: a `BigInt` mantissa `m` stands for `m / 2^bits`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

const GUARD: u32 = 32;

/// `floor(e * 2^bits)` up to one unit in the last place.
pub fn e_fixed(bits: u32) -> BigInt {
    let mut term = BigInt::one() << (bits + GUARD);
    let mut sum = BigInt::zero();
    let mut k: u32 = 1;
    while !term.is_zero() {
        sum += &term;
        term /= k;
        k += 1;
    }
    sum >> GUARD
}

fn atan_inv(x: u32, bits: u32) -> BigInt {
    let x2 = BigInt::from(x) * x;
    let mut power = (BigInt::one() << bits) / x;
    let mut sum = BigInt::zero();
    let mut k: u32 = 0;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// `floor(pi * 2^bits)` up to one unit in the last place.
pub fn pi_fixed(bits: u32) -> BigInt {
    let b = bits + GUARD;
    let pi = atan_inv(5, b) * 16 - atan_inv(239, b) * 4;
    pi >> GUARD
}

/// Nearest `f64` to `m / 2^bits`.
pub fn to_f64(m: &BigInt, bits: u32) -> f64 {
    let excess = m.bits().saturating_sub(62);
    let top = (m >> excess).to_f64().unwrap_or(0.0);
    top * 2f64.powi(excess as i32 - bits as i32)
}

/// `num / den` as `f64`, for arbitrarily large operands.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if den.is_zero() {
        return f64::NAN;
    }
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        (num >> (-shift) as u64) / den
    };
    let top = q.bits().saturating_sub(62);
    let mant = (&q >> top).to_f64().unwrap_or(0.0);
    let exp = top as i64 - shift;
    if exp > 1023 {
        return if mant.is_sign_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    if exp < -1100 {
        return 0.0;
    }
    // split the scaling so intermediate powers stay finite
    let half = (exp / 2) as i32;
    mant * 2f64.powi(half) * 2f64.powi(exp as i32 - half)
}

/// `ln(num / den)` for positive operands of any size.
pub fn ln_ratio(num: &BigInt, den: &BigInt) -> f64 {
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let n = (num >> nb.saturating_sub(60) as u64).to_f64().unwrap_or(0.0);
    let d = (den >> db.saturating_sub(60) as u64).to_f64().unwrap_or(0.0);
    n.ln() - d.ln() + ((nb - 60).max(0) - (db - 60).max(0)) as f64 * std::f64::consts::LN_2
}

/// Product of two fixed-point numbers at the same scale.
pub fn mul(a: &BigInt, b: &BigInt, bits: u32) -> BigInt {
    (a * b) >> bits
}

/// Quotient of two fixed-point numbers at the same scale.
pub fn div(a: &BigInt, b: &BigInt, bits: u32) -> BigInt {
    (a << bits) / b
}

/// Square root of a non-negative fixed-point number.
pub fn sqrt(a: &BigInt, bits: u32) -> BigInt {
    debug_assert!(!a.is_negative());
    num_integer::Roots::sqrt(&(a << bits))
}

/// The fixed-point value of a small integer.
pub fn from_i64(v: i64, bits: u32) -> BigInt {
    BigInt::from(v) << bits
}

/// Truncate an `f64` to the given scale (exact for dyadic inputs with enough bits).
pub fn from_f64(v: f64, bits: u32) -> Option<BigInt> {
    if !v.is_finite() {
        return None;
    }
    let (mant, exp, sign) = num_traits::float::FloatCore::integer_decode(v);
    let m = BigInt::from(mant) * sign;
    let e = exp as i64 + bits as i64;
    Some(if e >= 0 { m << e as u64 } else { m >> (-e) as u64 })
}
