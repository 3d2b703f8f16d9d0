//! Exact 3x3 integer matrices, vector semi-norms and cone semi-norms.

use std::fmt;
use std::ops::{Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{domain, Error, Result};

pub type IntVector3 = [BigInt; 3];

/// A 3x3 matrix with arbitrary-precision integer entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix3 {
    rows: [[BigInt; 3]; 3],
}

impl IntMatrix3 {
    pub fn from_rows(rows: [[i64; 3]; 3]) -> Self {
        Self { rows: rows.map(|r| r.map(BigInt::from)) }
    }

    pub fn from_big_rows(rows: [[BigInt; 3]; 3]) -> Self {
        Self { rows }
    }

    pub fn identity() -> Self {
        Self::from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    pub fn c1() -> Self {
        Self::from_rows([[1, 1, 0], [0, 0, 1], [0, 1, 0]])
    }

    pub fn c2() -> Self {
        Self::from_rows([[0, 1, 0], [1, 0, 0], [0, 1, 1]])
    }

    /// `C1` or `C2` for directive letter 1 or 2.
    pub fn generator(letter: u8) -> Result<Self> {
        match letter {
            1 => Ok(Self::c1()),
            2 => Ok(Self::c2()),
            _ => domain(format!("directive letter {letter} is not 1 or 2")),
        }
    }

    /// `C_{l0} C_{l1} ... C_{l(n-1)}` for a directive word.
    pub fn product_of(letters: &[u8]) -> Result<Self> {
        let mut acc = Self::identity();
        for &l in letters {
            acc.mul_generator_right(l)?;
        }
        Ok(acc)
    }

    /// In-place `self <- self * C_letter` using column moves only.
    pub fn mul_generator_right(&mut self, letter: u8) -> Result<()> {
        for r in self.rows.iter_mut() {
            let [a, b, c] = std::mem::take(r);
            *r = match letter {
                // columns of M*C1: (c1, c1 + c3, c2)
                1 => {
                    let s = &a + &c;
                    [a, s, b]
                }
                // columns of M*C2: (c2, c1 + c3, c3)
                2 => {
                    let s = &a + &c;
                    [b, s, c]
                }
                _ => return domain(format!("directive letter {letter} is not 1 or 2")),
            };
        }
        Ok(())
    }

    /// In-place `self <- C_letter^{-1} * self` using row moves only.
    pub fn mul_generator_inverse_left(&mut self, letter: u8) -> Result<()> {
        let [r1, r2, r3] = std::mem::take(&mut self.rows);
        self.rows = match letter {
            // C1^{-1} x = (x1 - x3, x3, x2)
            1 => [sub_rows(&r1, &r3), r3, r2],
            // C2^{-1} x = (x2, x1, x3 - x1)
            2 => {
                let d = sub_rows(&r3, &r1);
                [r2, r1, d]
            }
            _ => return domain(format!("directive letter {letter} is not 1 or 2")),
        };
        Ok(())
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[[BigInt; 3]; 3] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> IntVector3 {
        [self.rows[0][j].clone(), self.rows[1][j].clone(), self.rows[2][j].clone()]
    }

    pub fn transpose(&self) -> Self {
        let r = &self.rows;
        Self::from_big_rows(std::array::from_fn(|i| std::array::from_fn(|j| r[j][i].clone())))
    }

    pub fn det(&self) -> BigInt {
        let r = &self.rows;
        &r[0][0] * (&r[1][1] * &r[2][2] - &r[1][2] * &r[2][1])
            - &r[0][1] * (&r[1][0] * &r[2][2] - &r[1][2] * &r[2][0])
            + &r[0][2] * (&r[1][0] * &r[2][1] - &r[1][1] * &r[2][0])
    }

    pub fn adjugate(&self) -> Self {
        let r = &self.rows;
        let cof = |i: usize, j: usize| {
            let (a, b) = ((i + 1) % 3, (i + 2) % 3);
            let (c, d) = ((j + 1) % 3, (j + 2) % 3);
            &r[a][c] * &r[b][d] - &r[a][d] * &r[b][c]
        };
        // adj(M)_{ij} = cofactor_{ji}
        Self::from_big_rows(std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i))))
    }

    /// Exact inverse of a unimodular matrix.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.is_one() {
            Ok(self.adjugate())
        } else if (-&d).is_one() {
            Ok(self.adjugate().scale(&d))
        } else {
            domain(format!("determinant {d} is not a unit; inverse is not integral"))
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_big_rows(self.rows.clone().map(|r| r.map(|x| x * k)))
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn mul_vec(&self, v: &IntVector3) -> IntVector3 {
        std::array::from_fn(|i| dot(&self.rows[i], v))
    }

    /// `M^T v`.
    pub fn tmul_vec(&self, v: &IntVector3) -> IntVector3 {
        std::array::from_fn(|j| {
            &self.rows[0][j] * &v[0] + &self.rows[1][j] * &v[1] + &self.rows[2][j] * &v[2]
        })
    }

    pub fn min_entry(&self) -> BigInt {
        self.rows.iter().flatten().min().cloned().unwrap_or_default()
    }

    pub fn is_positive(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_positive())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.rows.iter().flatten().all(|x| !x.is_negative())
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> BigInt {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_default()
    }

    pub fn boolean_shadow(&self) -> BooleanMatrix3 {
        BooleanMatrix3 { cells: std::array::from_fn(|i| std::array::from_fn(|j| self.rows[i][j].is_positive())) }
    }

    /// Entries as `f64`; large entries lose precision.
    pub fn to_f64(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.rows[i][j].to_f64().unwrap_or(f64::NAN)))
    }
}

fn sub_rows(a: &[BigInt; 3], b: &[BigInt; 3]) -> [BigInt; 3] {
    std::array::from_fn(|i| &a[i] - &b[i])
}

fn dot(a: &[BigInt; 3], b: &[BigInt; 3]) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

impl Mul for &IntMatrix3 {
    type Output = IntMatrix3;
    fn mul(self, rhs: &IntMatrix3) -> IntMatrix3 {
        let (a, b) = (&self.rows, &rhs.rows);
        IntMatrix3::from_big_rows(std::array::from_fn(|i| {
            std::array::from_fn(|j| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j] + &a[i][2] * &b[2][j])
        }))
    }
}

impl fmt::Display for IntMatrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

impl Serialize for IntMatrix3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(3))?;
        for r in &self.rows {
            seq.serialize_element(&r.iter().map(|x| x.to_string()).collect::<Vec<_>>())?;
        }
        seq.end()
    }
}

/// Entrywise positivity pattern of a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BooleanMatrix3 {
    pub cells: [[bool; 3]; 3],
}

impl BooleanMatrix3 {
    pub fn from_rows(rows: [[u8; 3]; 3]) -> Self {
        Self { cells: rows.map(|r| r.map(|x| x != 0)) }
    }

    pub fn is_positive(&self) -> bool {
        self.cells.iter().flatten().all(|&b| b)
    }
}

impl Mul for BooleanMatrix3 {
    type Output = BooleanMatrix3;
    fn mul(self, rhs: BooleanMatrix3) -> BooleanMatrix3 {
        BooleanMatrix3 {
            cells: std::array::from_fn(|i| std::array::from_fn(|j| (0..3).any(|k| self.cells[i][k] && rhs.cells[k][j]))),
        }
    }
}

/// A vector of three exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalVector3(pub [BigRational; 3]);

impl RationalVector3 {
    pub fn from_ints(v: [i64; 3]) -> Self {
        Self(v.map(|x| BigRational::from_integer(x.into())))
    }

    /// Exact conversion; every finite `f64` is a dyadic rational.
    pub fn from_f64(v: [f64; 3]) -> Result<Self> {
        let mut out: [BigRational; 3] = Default::default();
        for (o, x) in out.iter_mut().zip(v) {
            *o = BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite coordinate {x}")))?;
        }
        Ok(Self(out))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    /// The same ray as a primitive integer vector (positive multiple).
    pub fn to_integer_ray(&self) -> IntVector3 {
        let l = self.0.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let v: IntVector3 = std::array::from_fn(|i| (&self.0[i] * BigRational::from_integer(l.clone())).to_integer());
        primitive(&v)
    }

    pub fn to_f64(&self) -> [f64; 3] {
        self.0.clone().map(|x| x.to_f64().unwrap_or(f64::NAN))
    }

    pub fn l1_normalized(&self) -> Result<Self> {
        let s: BigRational = self.0.iter().map(|x| x.abs()).sum();
        if s.is_zero() {
            return Err(Error::Degenerate("zero vector has no direction".into()));
        }
        Ok(Self(self.0.clone().map(|x| x / &s)))
    }
}

impl fmt::Display for RationalVector3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Divide out the gcd of the entries (sign preserved).
pub fn primitive(v: &IntVector3) -> IntVector3 {
    let g = v[0].gcd(&v[1]).gcd(&v[2]);
    if g.is_zero() {
        return v.clone();
    }
    v.clone().map(|x| x / &g)
}

/// Primitive vector on the same line with a positive leading non-zero entry.
pub fn canonical_line(v: &IntVector3) -> IntVector3 {
    let p = primitive(v);
    match p.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => p.map(|x| -x),
        _ => p,
    }
}

pub fn cross(a: &IntVector3, b: &IntVector3) -> IntVector3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn cross_f64(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn int_vec(v: [i64; 3]) -> IntVector3 {
    v.map(BigInt::from)
}

/// `max(v) - min(v)`.
pub fn norm_d<T>(v: &[T; 3]) -> T
where
    T: Clone + PartialOrd + Sub<Output = T>,
{
    let mut hi = &v[0];
    let mut lo = &v[0];
    for x in &v[1..] {
        if x > hi {
            hi = x;
        }
        if x < lo {
            lo = x;
        }
    }
    hi.clone() - lo.clone()
}

pub fn norm_inf<T>(v: &[T; 3]) -> T
where
    T: Clone + PartialOrd + Signed,
{
    let mut m = v[0].abs();
    for x in &v[1..] {
        let a = x.abs();
        if a > m {
            m = a;
        }
    }
    m
}

/// Projective separation of two non-negative rays.
pub fn semimetric_dm(v: &[f64; 3], w: &[f64; 3]) -> Result<f64> {
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nv == 0.0 || nw == 0.0 {
        return domain("d_M is undefined for the zero vector");
    }
    if v.iter().chain(w).any(|&x| x < 0.0) {
        return domain("d_M expects non-negative vectors");
    }
    let mut m = 0.0f64;
    for i in 0..3 {
        for j in (i + 1)..3 {
            m = m.max((v[i] * w[j] - v[j] * w[i]).abs());
        }
    }
    Ok(m / (nv * nw))
}

/// Which vector semi-norm a restricted matrix norm is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VecNorm {
    /// `max - min`
    D,
    /// `max |v_i|`
    Inf,
}

impl VecNorm {
    fn eval(self, v: &IntVector3) -> BigInt {
        match self {
            VecNorm::D => norm_d(v),
            VecNorm::Inf => norm_inf(v),
        }
    }

    pub fn eval_f64(self, v: &[f64; 3]) -> f64 {
        match self {
            VecNorm::D => norm_d(v),
            VecNorm::Inf => v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        }
    }

    /// Normals of the planes across which the norm changes its linear piece.
    fn kinks(self) -> Vec<IntVector3> {
        let mut out = vec![int_vec([1, -1, 0]), int_vec([1, 0, -1]), int_vec([0, 1, -1])];
        if self == VecNorm::Inf {
            out.extend([int_vec([1, 1, 0]), int_vec([1, 0, 1]), int_vec([0, 1, 1])]);
        }
        out
    }
}

/// `sup { |A^T x| / |B^T x| : x in n^perp, x != 0 }`.
///
/// Both quotient terms are piecewise linear on the plane `n^perp`, so the
/// supremum sits on one of the finitely many rays where either changes piece.
fn plane_ratio_sup(normal: &IntVector3, a: &IntMatrix3, b: &IntMatrix3, norm: VecNorm) -> Option<BigRational> {
    let mut best: Option<BigRational> = None;
    for k in norm.kinks() {
        for m in [a, b] {
            let x = cross(normal, &m.mul_vec(&k));
            if x.iter().all(|c| c.is_zero()) {
                continue;
            }
            let den = norm.eval(&b.tmul_vec(&x));
            if den.is_zero() {
                continue;
            }
            let r = BigRational::new(norm.eval(&a.tmul_vec(&x)), den);
            if best.as_ref().is_none_or(|b| r > *b) {
                best = Some(r);
            }
        }
    }
    best
}

fn check_ray(f: &RationalVector3) -> Result<IntVector3> {
    if !f.is_nonnegative() {
        return domain("f must be non-negative");
    }
    if f.is_zero() {
        return domain("f must be non-zero");
    }
    Ok(f.to_integer_ray())
}

/// `sup_{z in f^perp} |M^T z|_D / |z|_D`, exactly.
pub fn restricted_seminorm_d(m: &IntMatrix3, f: &RationalVector3) -> Result<BigRational> {
    restricted_norm(m, f, VecNorm::D)
}

/// As [`restricted_seminorm_d`] for either vector norm.
pub fn restricted_norm(m: &IntMatrix3, f: &RationalVector3, norm: VecNorm) -> Result<BigRational> {
    let n = check_ray(f)?;
    plane_ratio_sup(&n, m, &IntMatrix3::identity(), norm)
        .ok_or_else(|| Error::Degenerate("no admissible direction in f^perp".into()))
}

/// The restricted norm of `M^T` on `f^perp` where `f = M g`, given `M^{-1}` and `g`.
///
/// Substituting `y = M^T z` turns the quotient into `|y| / |M^{-T} y|` on
/// `g^perp`; this avoids forming `f` when `M` has huge entries.
pub fn restricted_norm_pullback(m_inv: &IntMatrix3, g: &IntVector3, norm: VecNorm) -> Result<BigRational> {
    if g.iter().any(|x| x.is_negative()) || g.iter().all(|x| x.is_zero()) {
        return domain("g must be non-negative and non-zero");
    }
    plane_ratio_sup(g, &IntMatrix3::identity(), m_inv, norm)
        .ok_or_else(|| Error::Degenerate("no admissible direction in g^perp".into()))
}

fn unit_random<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>() * 2.0 - 1.0);
        let n = v.iter().map(|x| x * x).sum::<f64>();
        if n > 1e-6 && n <= 1.0 {
            return v.map(|x| x / n.sqrt());
        }
    }
}

fn project_out(v: &[f64; 3], f: &[f64; 3]) -> [f64; 3] {
    let ff: f64 = f.iter().map(|x| x * x).sum();
    let vf: f64 = v.iter().zip(f).map(|(a, b)| a * b).sum();
    std::array::from_fn(|i| v[i] - vf / ff * f[i])
}

fn tmul_f64(m: &[[f64; 3]; 3], z: &[f64; 3]) -> [f64; 3] {
    std::array::from_fn(|j| m[0][j] * z[0] + m[1][j] * z[1] + m[2][j] * z[2])
}

/// Random-direction estimate of [`restricted_seminorm_d`]; never above the exact value.
pub fn restricted_seminorm_d_sampled<R: Rng>(m: &IntMatrix3, f: &[f64; 3], samples: usize, rng: &mut R) -> f64 {
    let mf = m.to_f64();
    let mut best = 0.0f64;
    for _ in 0..samples {
        let z = project_out(&unit_random(rng), f);
        let den = norm_d(&z);
        if den > 1e-9 {
            best = best.max(norm_d(&tmul_f64(&mf, &z)) / den);
        }
    }
    best
}

fn top_singular_on_plane(at: &[[f64; 3]; 3], f: &[f64; 3]) -> f64 {
    // orthonormal basis of f^perp
    let pick = if f[0].abs() < 0.9 * f.iter().fold(0.0f64, |m, x| m.max(x.abs())) { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let q1 = cross_f64(f, &pick);
    let n1 = q1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let q1 = q1.map(|x| x / n1);
    let q2 = cross_f64(f, &q1);
    let n2 = q2.iter().map(|x| x * x).sum::<f64>().sqrt();
    let q2 = q2.map(|x| x / n2);
    let apply = |q: &[f64; 3]| -> [f64; 3] { std::array::from_fn(|i| (0..3).map(|k| at[i][k] * q[k]).sum()) };
    let (b1, b2) = (apply(&q1), apply(&q2));
    let g11: f64 = b1.iter().map(|x| x * x).sum();
    let g22: f64 = b2.iter().map(|x| x * x).sum();
    let g12: f64 = b1.iter().zip(&b2).map(|(a, b)| a * b).sum();
    let tr = g11 + g22;
    let disc = ((g11 - g22).powi(2) + 4.0 * g12 * g12).sqrt();
    ((tr + disc) / 2.0).max(0.0).sqrt()
}

/// Upper bound on the projective diameter of `A R^3_{>=0}` for a positive matrix.
///
/// The cone norm `sup_{f in A R^3_{>=0}} |A^T|_{f^perp}|_2` is maximized over a
/// simplex grid with local refinement.
pub fn cone_diameter_bound(a: &IntMatrix3) -> Result<f64> {
    if !a.is_positive() {
        return domain("cone diameter bound needs a positive matrix");
    }
    let af = a.to_f64();
    let at = a.transpose().to_f64();
    let eval = |u: &[f64; 3]| -> f64 {
        let f: [f64; 3] = std::array::from_fn(|i| (0..3).map(|k| af[i][k] * u[k]).sum());
        top_singular_on_plane(&at, &f)
    };
    let steps = 60usize;
    let mut cands: Vec<(f64, [f64; 3])> = Vec::new();
    for i in 0..=steps {
        for j in 0..=(steps - i) {
            let u = [i as f64, j as f64, (steps - i - j) as f64].map(|x| x / steps as f64);
            cands.push((eval(&u), u));
        }
    }
    cands.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut best = cands[0].0;
    for &(mut val, mut u) in cands.iter().take(8) {
        let mut h = 1.0 / steps as f64;
        while h > 1e-9 {
            let mut moved = false;
            for (di, dj) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
                let w = [u[0] + di * h, u[1] + dj * h, 1.0 - u[0] - u[1] - (di + dj) * h];
                if w.iter().any(|&x| x < 0.0) {
                    continue;
                }
                let v = eval(&w);
                if v > val {
                    val = v;
                    u = w;
                    moved = true;
                }
            }
            if !moved {
                h /= 2.0;
            }
        }
        best = best.max(val);
    }
    let min = a.min_entry().to_f64().unwrap_or(f64::NAN);
    Ok(best / min)
}

/// Largest `d_M` over random pairs of rays of `A R^3_{>=0}`.
pub fn sampled_cone_diameter<R: Rng>(a: &IntMatrix3, samples: usize, rng: &mut R) -> f64 {
    let af = a.to_f64();
    let ray = |rng: &mut R| -> [f64; 3] {
        let u: [f64; 3] = std::array::from_fn(|_| -rng.random::<f64>().max(1e-300).ln());
        std::array::from_fn(|i| (0..3).map(|k| af[i][k] * u[k]).sum())
    };
    let mut best = 0.0f64;
    for _ in 0..samples {
        let (v, w) = (ray(rng), ray(rng));
        best = best.max(semimetric_dm(&v, &w).unwrap_or(0.0));
    }
    best
}

/// One candidate line of the boundary enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeminormRow {
    pub u_label: String,
    pub v_label: String,
    pub z: IntVector3,
    pub mt_z: IntVector3,
    /// `M^T z` has all entries strictly positive or all strictly negative.
    pub excluded: bool,
    pub norm_d_z: Option<BigInt>,
    pub norm_d_mt_z: Option<BigInt>,
}

#[derive(Clone, Debug)]
pub struct SeminormTable {
    pub rows: Vec<SeminormRow>,
    pub value: BigRational,
    /// Maximizer, primitive with positive leading entry.
    pub witness: IntVector3,
    pub distinct_lines: usize,
}

fn boundary_vectors(m: &IntMatrix3) -> Vec<(String, IntVector3)> {
    let e = |i: usize| -> IntVector3 { std::array::from_fn(|k| BigInt::from((k == i) as i64)) };
    let diff = |i: usize, j: usize| -> IntVector3 { std::array::from_fn(|k| &e(i)[k] - &e(j)[k]) };
    vec![
        ("Me1".into(), m.mul_vec(&e(0))),
        ("Me2".into(), m.mul_vec(&e(1))),
        ("Me3".into(), m.mul_vec(&e(2))),
        ("e1-e3".into(), diff(0, 2)),
        ("e1-e2".into(), diff(0, 1)),
        ("e2-e3".into(), diff(1, 2)),
        ("M(e1-e2)".into(), m.mul_vec(&diff(0, 1))),
        ("M(e2-e3)".into(), m.mul_vec(&diff(1, 2))),
        ("M(e1-e3)".into(), m.mul_vec(&diff(0, 2))),
    ]
}

/// All 36 candidate lines for the cone semi-norm `|M^T|_D^{M R^3_{>=0}}` and its maximum.
pub fn cone_seminorm_table(m: &IntMatrix3) -> Result<SeminormTable> {
    if !m.is_positive() {
        return domain("boundary enumeration needs a positive matrix");
    }
    if m.det().is_zero() {
        return domain("boundary enumeration needs an invertible matrix");
    }
    let s = boundary_vectors(m);
    let mut rows = Vec::with_capacity(36);
    let mut lines = std::collections::HashSet::new();
    let mut best: Option<(BigRational, IntVector3)> = None;
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            let z = cross(&s[i].1, &s[j].1);
            let mt_z = m.tmul_vec(&z);
            let zero = z.iter().all(|x| x.is_zero());
            if !zero {
                lines.insert(canonical_line(&z));
            }
            let excluded = zero || mt_z.iter().all(|x| x.is_positive()) || mt_z.iter().all(|x| x.is_negative());
            let (nz, nmz) = if excluded { (None, None) } else { (Some(norm_d(&z)), Some(norm_d(&mt_z))) };
            if let (Some(a), Some(b)) = (&nz, &nmz) {
                if !a.is_zero() {
                    let r = BigRational::new(b.clone(), a.clone());
                    if best.as_ref().is_none_or(|(v, _)| r > *v) {
                        best = Some((r, canonical_line(&z)));
                    }
                }
            }
            rows.push(SeminormRow {
                u_label: s[i].0.clone(),
                v_label: s[j].0.clone(),
                z,
                mt_z,
                excluded,
                norm_d_z: nz,
                norm_d_mt_z: nmz,
            });
        }
    }
    let (value, witness) = best.ok_or_else(|| Error::Degenerate("every candidate line is excluded".into()))?;
    Ok(SeminormTable { rows, value, witness, distinct_lines: lines.len() })
}

/// Exact maximum of `|M^T z|_D / |z|_D` over the admissible boundary lines, with its witness.
pub fn cone_seminorm_bruteforce(m: &IntMatrix3) -> Result<(BigRational, IntVector3)> {
    let t = cone_seminorm_table(m)?;
    Ok((t.value, t.witness))
}

fn admissible_ratio(mf: &[[f64; 3]; 3], z: &[f64; 3]) -> Option<f64> {
    let y = tmul_f64(mf, z);
    if y.iter().all(|&x| x > 0.0) || y.iter().all(|&x| x < 0.0) {
        return None;
    }
    let den = norm_d(z);
    (den > 1e-12).then(|| norm_d(&y) / den)
}

/// Random search plus local refinement over admissible directions.
pub fn cone_seminorm_sampled<R: Rng>(m: &IntMatrix3, samples: usize, rng: &mut R) -> f64 {
    let mf = m.to_f64();
    let mut top: Vec<(f64, [f64; 3])> = Vec::new();
    for _ in 0..samples {
        let z = unit_random(rng);
        if let Some(r) = admissible_ratio(&mf, &z) {
            top.push((r, z));
            if top.len() > 64 {
                top.sort_by(|a, b| b.0.total_cmp(&a.0));
                top.truncate(16);
            }
        }
    }
    top.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = top.first().map_or(0.0, |t| t.0);
    for &(mut val, mut z) in top.iter().take(16) {
        let mut h = 0.05;
        while h > 1e-13 {
            let mut moved = false;
            for _ in 0..24 {
                let d = unit_random(rng);
                let w: [f64; 3] = std::array::from_fn(|i| z[i] + h * d[i]);
                if let Some(v) = admissible_ratio(&mf, &w) {
                    if v > val {
                        val = v;
                        z = w;
                        moved = true;
                    }
                }
            }
            if !moved {
                h /= 2.0;
            }
        }
        best = best.max(val);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn generators_and_products() {
        let p = IntMatrix3::product_of(&[1, 2]).unwrap();
        assert_eq!(p, &IntMatrix3::c1() * &IntMatrix3::c2());
        assert_eq!(IntMatrix3::c1().det(), BigInt::from(-1));
        assert_eq!(IntMatrix3::c2().det(), BigInt::from(-1));
        let m = p.pow(3);
        assert_eq!(m, IntMatrix3::from_rows([[2, 3, 2], [2, 2, 1], [1, 2, 1]]));
        assert_eq!(m.inverse().unwrap(), IntMatrix3::from_rows([[0, 1, -1], [-1, 0, 2], [2, -1, -2]]));
    }

    #[test]
    fn generator_moves_match_multiplication() {
        let mut m = IntMatrix3::from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 10]]);
        let base = m.clone();
        m.mul_generator_right(2).unwrap();
        assert_eq!(m, &base * &IntMatrix3::c2());
        let mut n = base.clone();
        n.mul_generator_inverse_left(1).unwrap();
        assert_eq!(n, &IntMatrix3::c1().inverse().unwrap() * &base);
        let mut n = base.clone();
        n.mul_generator_inverse_left(2).unwrap();
        assert_eq!(n, &IntMatrix3::c2().inverse().unwrap() * &base);
    }

    #[test]
    fn inverse_rejects_non_unimodular() {
        let m = IntMatrix3::from_rows([[2, 0, 0], [0, 1, 0], [0, 0, 1]]);
        assert!(matches!(m.inverse(), Err(Error::Domain(_))));
    }

    #[test]
    fn norm_d_values() {
        assert_eq!(norm_d(&int_vec([8, -5, 13])), BigInt::from(18));
        assert_eq!(norm_d(&int_vec([21, 3, -5])), BigInt::from(26));
        assert_eq!(norm_d(&[q(1, 3), q(1, 3), q(1, 3)]), q(0, 1));
    }

    #[test]
    fn semimetric_values() {
        assert_eq!(semimetric_dm(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(semimetric_dm(&[2.0, 1.0, 1.0], &[4.0, 2.0, 2.0]).unwrap(), 0.0);
        assert!(semimetric_dm(&[0.0; 3], &[1.0, 0.0, 0.0]).is_err());
        // brute force over the index pairs
        let (v, w) = ([2.0, 1.0, 1.0], [3.0, 2.0, 2.0]);
        let mut m = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((v[i] * w[j] - v[j] * w[i]) as f64);
            }
        }
        let expect = m / (6f64.sqrt() * 17f64.sqrt());
        assert!((semimetric_dm(&v, &w).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn shadow_patterns() {
        let m = IntMatrix3::product_of(&[1, 2, 1]).unwrap();
        assert_eq!(m.boolean_shadow(), BooleanMatrix3::from_rows([[1, 1, 1], [0, 1, 1], [1, 1, 0]]));
        let m = IntMatrix3::product_of(&[1, 2, 2, 2, 1]).unwrap();
        assert_eq!(m.boolean_shadow(), BooleanMatrix3::from_rows([[1, 1, 1], [1, 1, 1], [1, 1, 0]]));
        assert_eq!(IntMatrix3::identity().boolean_shadow(), BooleanMatrix3::from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]]));
    }

    #[test]
    fn restricted_seminorm_examples() {
        let m = IntMatrix3::product_of(&[1, 2, 1]).unwrap();
        let one = RationalVector3::from_ints([1, 1, 1]);
        assert_eq!(restricted_seminorm_d(&m, &one).unwrap(), q(1, 1));
        assert_eq!(restricted_seminorm_d(&IntMatrix3::identity(), &RationalVector3::from_ints([3, 1, 7])).unwrap(), q(1, 1));
        assert!(restricted_seminorm_d(&m, &RationalVector3::from_ints([0, 0, 0])).is_err());
        let m = IntMatrix3::product_of(&[1, 2]).unwrap();
        let z = int_vec([8, -5, 13]);
        let f = RationalVector3::from_ints([5, 8, 0]);
        assert!(dot(&z, &f.to_integer_ray()).is_zero());
        let exact = restricted_seminorm_d(&m, &f).unwrap();
        assert!(exact >= q(26, 18));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sampled = restricted_seminorm_d_sampled(&m, &f.to_f64(), 100_000, &mut rng);
        let ex = exact.to_f64().unwrap();
        assert!(sampled <= ex + 1e-9 && sampled > ex - 1e-2, "sampled {sampled} exact {ex}");
    }

    #[test]
    fn degenerate_f_on_axis() {
        let m = IntMatrix3::product_of(&[1, 1, 2]).unwrap();
        let f = RationalVector3::from_ints([1, 0, 0]);
        let exact = restricted_seminorm_d(&m, &f).unwrap().to_f64().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sampled = restricted_seminorm_d_sampled(&m, &[1.0, 0.0, 0.0], 100_000, &mut rng);
        assert!(sampled <= exact + 1e-9 && sampled > exact - 1e-2);
    }

    #[test]
    fn pullback_matches_direct() {
        let m = IntMatrix3::product_of(&[1, 2, 2, 1, 2, 1, 1, 2]).unwrap();
        let g = int_vec([2, 3, 5]);
        let f = m.mul_vec(&g);
        let fq = RationalVector3(f.clone().map(BigRational::from_integer));
        for norm in [VecNorm::D, VecNorm::Inf] {
            let direct = restricted_norm(&m, &fq, norm).unwrap();
            let pulled = restricted_norm_pullback(&m.inverse().unwrap(), &g, norm).unwrap();
            assert_eq!(direct, pulled);
        }
    }

    #[test]
    fn table_for_cube_of_c1c2() {
        let m = IntMatrix3::product_of(&[1, 2]).unwrap().pow(3);
        let t = cone_seminorm_table(&m).unwrap();
        assert_eq!(t.rows.len(), 36);
        assert_eq!(t.value, q(4, 5));
        assert_eq!(t.witness, int_vec([2, -3, 2]));
        assert_eq!(t.distinct_lines, 24);
        assert_eq!(t.rows.iter().filter(|r| r.excluded).count(), 13);
        let first = &t.rows[0];
        assert_eq!(first.z, int_vec([2, -1, -2]));
        assert_eq!(first.mt_z, int_vec([0, 0, 1]));
        assert_eq!(first.norm_d_z, Some(BigInt::from(4)));
        assert_eq!(first.norm_d_mt_z, Some(BigInt::from(1)));
    }

    #[test]
    fn sampled_seminorm_stays_below_exact() {
        let m = IntMatrix3::product_of(&[1, 2]).unwrap().pow(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = cone_seminorm_sampled(&m, 100_000, &mut rng);
        assert!(s <= 0.8 + 1e-12 && s > 0.7, "{s}");
    }

    #[test]
    fn table_for_cube_of_c2c1() {
        let m = IntMatrix3::product_of(&[2, 1]).unwrap().pow(3);
        let (v, _) = cone_seminorm_bruteforce(&m).unwrap();
        assert_eq!(v, q(4, 5));
    }

    #[test]
    fn bruteforce_rejects_nonpositive() {
        assert!(cone_seminorm_bruteforce(&IntMatrix3::c1()).is_err());
        let singular = IntMatrix3::from_rows([[1, 1, 1], [1, 1, 1], [1, 2, 3]]);
        assert!(cone_seminorm_bruteforce(&singular).is_err());
    }

    #[test]
    fn diameter_bound_dominates_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [
            IntMatrix3::product_of(&[1, 2]).unwrap().pow(3),
            IntMatrix3::from_rows([[2, 1, 1], [1, 2, 1], [1, 1, 2]]),
        ] {
            let bound = cone_diameter_bound(&m).unwrap();
            let sampled = sampled_cone_diameter(&m, 10_000, &mut rng);
            assert!(bound.is_finite() && sampled <= bound, "{sampled} > {bound}");
        }
        let ones = IntMatrix3::from_rows([[1, 1, 1], [1, 1, 1], [1, 1, 1]]);
        assert!(cone_diameter_bound(&ones).unwrap() < 1e-12);
        assert!(cone_diameter_bound(&IntMatrix3::c1()).is_err());
    }
}
