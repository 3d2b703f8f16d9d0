//! Rauzy-fractal point clouds from the cubic field of the c1c2 fixed point, and
//! abelian discrepancy clouds for arbitrary directives.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::directive::DirectiveWord;
use crate::error::{Error, Result};
use crate::fixed;
use crate::mcfa::{pi_project, DEFAULT_MAX_STEPS, DEFAULT_TOL};
use crate::words::{abelianization, sadic_prefix, WordPrefix};

/// The real root `β` of `x³ - 2x² + x - 1` and its conjugate `β*` with positive imaginary part,
/// as fixed-point integers scaled by `2^precision`.
#[derive(Clone, Debug)]
pub struct CubicContext {
    precision: u32,
    beta: BigInt,
    star_re: BigInt,
    star_im: BigInt,
}

fn cubic(x: &BigInt, bits: u32) -> BigInt {
    // ((x - 2) x + 1) x - 1
    let one = fixed::from_i64(1, bits);
    let t = fixed::mul(&(x - fixed::from_i64(2, bits)), x, bits) + &one;
    fixed::mul(&t, x, bits) - one
}

fn cubic_derivative(x: &BigInt, bits: u32) -> BigInt {
    // (3x - 4) x + 1
    fixed::mul(&(x * 3 - fixed::from_i64(4, bits)), x, bits) + fixed::from_i64(1, bits)
}

/// Newton's method from 1.75, then the conjugates from the deflated quadratic
/// `x² + (β-2)x + (β-1)²`.
pub fn solve_beta(precision: u32) -> Result<CubicContext> {
    if precision < 64 {
        return Err(Error::Domain(format!("precision {precision} is below 64 bits")));
    }
    let bits = precision + 16;
    let mut x = fixed::from_f64(1.75, bits).expect("finite");
    let tol = BigInt::one() << 8u32;
    for _ in 0..200 {
        let step = fixed::div(&cubic(&x, bits), &cubic_derivative(&x, bits), bits);
        x -= &step;
        if step.abs() < tol {
            break;
        }
    }
    let one = fixed::from_i64(1, bits);
    let a = &x - fixed::from_i64(2, bits);
    let b = fixed::mul(&(&x - &one), &(&x - &one), bits);
    let disc = b * 4 - fixed::mul(&a, &a, bits);
    let star_re = -&a / 2;
    let star_im = fixed::sqrt(&disc, bits) / 2;
    let drop = |v: BigInt| v >> 16u32;
    Ok(CubicContext { precision, beta: drop(x), star_re: drop(star_re), star_im: drop(star_im) })
}

impl CubicContext {
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn beta(&self) -> f64 {
        fixed::to_f64(&self.beta, self.precision)
    }

    pub fn beta_star(&self) -> Complex64 {
        Complex64::new(fixed::to_f64(&self.star_re, self.precision), fixed::to_f64(&self.star_im, self.precision))
    }

    /// `|β³ - 2β² + β - 1|` at working precision.
    pub fn residual(&self) -> f64 {
        fixed::to_f64(&cubic(&self.beta, self.precision).abs(), self.precision)
    }

    /// `|β |β*|² - 1|`, which vanishes since the roots multiply to 1.
    pub fn vieta_residual(&self) -> f64 {
        let p = self.precision;
        let m2 = fixed::mul(&self.star_re, &self.star_re, p) + fixed::mul(&self.star_im, &self.star_im, p);
        fixed::to_f64(&(fixed::mul(&self.beta, &m2, p) - fixed::from_i64(1, p)).abs(), p)
    }

    /// `h(a)` as fixed-point `(re, im)`.
    fn h_fixed(&self, letter: u8) -> Result<(BigInt, BigInt)> {
        let p = self.precision;
        let one = fixed::from_i64(1, p);
        let (re, im) = (&self.star_re, &self.star_im);
        match letter {
            1 => Ok((one, BigInt::from(0))),
            2 => {
                let sq_re = fixed::mul(re, re, p) - fixed::mul(im, im, p);
                let sq_im = fixed::mul(re, im, p) * 2;
                Ok((sq_re - re, sq_im - im))
            }
            3 => Ok((re - one, im.clone())),
            _ => Err(Error::Domain(format!("letter {letter} is outside the alphabet {{1,2,3}}"))),
        }
    }

    /// `|Σ f_i h(i)|` for `f = (1, β-1, (β-1)²)`, the eigenvector of `C1 C2` for `β`.
    pub fn orthogonality_residual(&self) -> f64 {
        let p = self.precision;
        let one = fixed::from_i64(1, p);
        let f2 = &self.beta - &one;
        let f3 = fixed::mul(&f2, &f2, p);
        let mut acc = (BigInt::from(0), BigInt::from(0));
        for (a, fa) in [(1u8, one.clone()), (2, f2), (3, f3)] {
            let (re, im) = self.h_fixed(a).expect("valid letter");
            acc.0 += fixed::mul(&fa, &re, p);
            acc.1 += fixed::mul(&fa, &im, p);
        }
        Complex64::new(fixed::to_f64(&acc.0, p), fixed::to_f64(&acc.1, p)).norm()
    }
}

/// `h(1) = 1`, `h(2) = β*² - β*`, `h(3) = β* - 1`.
pub fn h_map(ctx: &CubicContext, letter: u8) -> Result<Complex64> {
    let (re, im) = ctx.h_fixed(letter)?;
    Ok(Complex64::new(fixed::to_f64(&re, ctx.precision), fixed::to_f64(&im, ctx.precision)))
}

/// `|Σ f_i h(i)|` for a caller-supplied `f`.
pub fn inner_product(ctx: &CubicContext, f: &[f64; 3]) -> f64 {
    (1..=3u8).map(|a| h_map(ctx, a).expect("valid letter") * f[(a - 1) as usize]).sum::<Complex64>().norm()
}

/// Which letter colours `S^h(N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ColorMode {
    /// `w_N`
    Current,
    /// `w_{N-1}`
    Previous,
}

impl std::str::FromStr for ColorMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "current" => Ok(ColorMode::Current),
            "previous" => Ok(ColorMode::Previous),
            _ => Err(Error::Parse(format!("mode must be current or previous, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FractalPoint {
    pub n: usize,
    pub re: f64,
    pub im: f64,
    pub letter: u8,
}

/// `S^h(N) = Σ_{i<N} h(w_i)`: for `N < |p|` in current mode, `1 <= N <= |p|` in previous mode.
pub fn partial_sum_points(ctx: &CubicContext, p: &WordPrefix, mode: ColorMode) -> Result<Vec<FractalPoint>> {
    let h: Vec<Complex64> = (1..=3u8).map(|a| h_map(ctx, a)).collect::<Result<_>>()?;
    let w = p.letters();
    let mut out = Vec::with_capacity(w.len());
    let mut s = Complex64::new(0.0, 0.0);
    for (i, &l) in w.iter().enumerate() {
        if mode == ColorMode::Current {
            out.push(FractalPoint { n: i, re: s.re, im: s.im, letter: l });
        }
        s += h[(l - 1) as usize];
        if mode == ColorMode::Previous {
            out.push(FractalPoint { n: i + 1, re: s.re, im: s.im, letter: l });
        }
    }
    Ok(out)
}

/// `S^h(N)` by pairwise summation, as a check on the running sums.
pub fn pairwise_partial_sum(ctx: &CubicContext, p: &WordPrefix, n: usize) -> Result<Complex64> {
    fn go(h: &[Complex64; 3], w: &[u8]) -> Complex64 {
        if w.len() <= 8 {
            return w.iter().map(|&l| h[(l - 1) as usize]).sum();
        }
        let (a, b) = w.split_at(w.len() / 2);
        go(h, a) + go(h, b)
    }
    if n > p.len() {
        return Err(Error::Domain(format!("index {n} exceeds prefix length {}", p.len())));
    }
    let h = [h_map(ctx, 1)?, h_map(ctx, 2)?, h_map(ctx, 3)?];
    Ok(go(&h, &p.letters()[..n]))
}

/// `max_{N <= n} |S^h(N)|` for each requested `n` (sorted), in one pass.
pub fn max_modulus(ctx: &CubicContext, p: &WordPrefix, bounds: &[usize]) -> Result<Vec<f64>> {
    let pts = partial_sum_points(ctx, p, ColorMode::Previous)?;
    let mut out = Vec::with_capacity(bounds.len());
    let mut m = 0.0f64;
    let mut i = 0usize;
    for &b in bounds {
        if b > p.len() {
            return Err(Error::Domain(format!("bound {b} exceeds prefix length {}", p.len())));
        }
        while i < b {
            m = m.max(pts[i].re.hypot(pts[i].im));
            i += 1;
        }
        out.push(m);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyCloud {
    pub f: [f64; 3],
    /// `(N, ab(w_{<N}) - N f)` for `N = 0..=length`.
    pub points: Vec<(usize, [f64; 3])>,
    /// Largest sup-norm over the cloud.
    pub envelope: f64,
}

/// Abelianized prefixes minus their expected counts.
pub fn generic_discrepancy_points(w: &DirectiveWord, length: usize) -> Result<DiscrepancyCloud> {
    let proj = pi_project(w, DEFAULT_TOL, DEFAULT_MAX_STEPS)?;
    let f = proj.f;
    let word = sadic_prefix(w, length.max(1))?;
    let letters = &word.letters()[..length];
    let mut points = Vec::with_capacity(length + 1);
    let mut envelope = 0.0f64;
    let mut counts = [0u64; 3];
    for n in 0..=length {
        if n > 0 {
            counts[(letters[n - 1] - 1) as usize] += 1;
        }
        let d: [f64; 3] = std::array::from_fn(|i| counts[i] as f64 - n as f64 * f[i]);
        envelope = envelope.max(d.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        points.push((n, d));
    }
    debug_assert_eq!(abelianization(letters), counts);
    Ok(DiscrepancyCloud { f, points, envelope })
}

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> CubicContext {
        solve_beta(128).unwrap()
    }

    #[test]
    fn roots() {
        let c = solve_beta(64).unwrap();
        assert!((c.beta() - 1.754877666246693).abs() < 1e-15);
        assert!(c.residual() < 1e-15);
        let s = c.beta_star();
        assert!((s.re - 0.12256).abs() < 1e-5 && (s.im - 0.74486).abs() < 1e-5);
        assert!(c.vieta_residual() < 1e-12);
        assert!(solve_beta(32).is_err());
        assert!(ctx().residual() < 1e-30);
    }

    #[test]
    fn images_and_orthogonality() {
        let c = ctx();
        assert_eq!(h_map(&c, 1).unwrap(), Complex64::new(1.0, 0.0));
        let h3 = h_map(&c, 3).unwrap();
        assert!((h3.re + 0.87744).abs() < 1e-5 && (h3.im - 0.74486).abs() < 1e-5);
        assert!(h_map(&c, 4).is_err());
        for bits in [64, 128, 512] {
            assert!(solve_beta(bits).unwrap().orthogonality_residual() < 1e-15, "{bits}");
        }
    }

    #[test]
    fn spot_values() {
        let c = ctx();
        let p = WordPrefix::parse("1321213121").unwrap();
        let pts = partial_sum_points(&c, &p, ColorMode::Current).unwrap();
        assert_eq!((pts[0].re, pts[0].im), (0.0, 0.0));
        let star = c.beta_star();
        assert!((Complex64::new(pts[2].re, pts[2].im) - star).norm() < 1e-15);
        let prev = partial_sum_points(&c, &p, ColorMode::Previous).unwrap();
        for (a, b) in pts[1..].iter().zip(&prev) {
            assert_eq!((a.n, a.re, a.im), (b.n, b.re, b.im));
        }
        assert_eq!(prev.last().unwrap().n, 10);
    }

    #[test]
    fn discrepancy_of_constant_word() {
        let cloud = generic_discrepancy_points(&DirectiveWord::parse("(1)^w").unwrap(), 50).unwrap();
        assert!(cloud.envelope < 1e-9);
        let fixed_point = generic_discrepancy_points(&DirectiveWord::parse("(12)^w").unwrap(), 5000).unwrap();
        assert!(fixed_point.envelope < 3.0);
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(-2.0).parse::<f64>().unwrap(), -2.0);
    }
}
