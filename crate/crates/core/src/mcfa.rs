//! The Cassaigne map, directive expansion, cone projection and the semi-sorted Selmer map.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::directive::DirectiveWord;
use crate::error::{domain, Error, Result};
use crate::fixed;
use crate::linear::{semimetric_dm, BooleanMatrix3, IntMatrix3, RationalVector3};
use crate::point::{FloatVector3, Point};

fn check_cone<T: Signed + Clone>(x: &[T; 3]) -> Result<()> {
    if x.iter().any(|c| c.is_negative()) {
        return domain("vector must be non-negative");
    }
    if x.iter().all(|c| c.is_zero()) {
        return domain("vector must be non-zero");
    }
    Ok(())
}

/// One step of the Cassaigne map: `x' = C_b^{-1} x` with `b = 1` iff `x1 >= x3`.
pub fn step_fc<T>(x: &[T; 3]) -> Result<([T; 3], u8)>
where
    T: Signed + Ord + Clone,
{
    check_cone(x)?;
    let [a, b, c] = x.clone();
    if a >= c {
        Ok(([a - c.clone(), c, b], 1))
    } else {
        Ok(([b, a.clone(), c - a], 2))
    }
}

/// The inverse step: `C_b x'`.
pub fn unstep_fc<T>(x: &[T; 3], b: u8) -> Result<[T; 3]>
where
    T: Signed + Clone,
{
    let [p, q, r] = x.clone();
    match b {
        1 => Ok([p + q.clone(), r, q]),
        2 => Ok([q.clone(), p, r + q]),
        _ => domain(format!("branch {b} is not 1 or 2")),
    }
}

/// One step in fixed-point mode; `step` is only used to label a tie.
pub fn step_fc_float(x: &FloatVector3, step: usize) -> Result<(FloatVector3, u8)> {
    if !x.is_nonnegative() || x.is_zero() {
        return domain("vector must be non-negative and non-zero");
    }
    let [m1, m2, m3] = x.mant.clone();
    let [r1, r2, r3] = x.radius.clone();
    let gap = &m1 - &m3;
    let slack = &r1 + &r3;
    if !slack.is_zero() && gap.abs() <= slack {
        return Err(Error::TieUncertainty { step });
    }
    let mut out = x.clone();
    if !gap.is_negative() {
        out.mant = [gap, m3, m2];
        out.radius = [slack, r3, r2];
        Ok((out, 1))
    } else {
        let d = &m3 - &m1;
        out.mant = [m2, m1, d];
        out.radius = [r2, r1.clone(), &r3 + &r1];
        Ok((out, 2))
    }
}

/// `F_C(x) / |F_C(x)|_1`.
pub fn project_fc(x: &RationalVector3) -> Result<RationalVector3> {
    let (y, _) = step_fc(&x.0)?;
    let y = RationalVector3(y);
    if y.is_zero() {
        return Err(Error::Degenerate(format!("F_C{x} = 0")));
    }
    y.l1_normalized()
}

/// A finite orbit with the branch taken at each step.
#[derive(Clone, Debug)]
pub struct OrbitRecord<S> {
    pub states: Vec<S>,
    pub branches: Vec<u8>,
}

/// `steps` iterations of `F_C` from an exact or fixed-point start.
pub fn orbit_fc(x: &Point, steps: usize) -> Result<OrbitRecord<Point>> {
    let mut states = vec![x.clone()];
    let mut branches = Vec::with_capacity(steps);
    let mut cur = x.clone();
    for k in 0..steps {
        let (next, b) = match &cur {
            Point::Exact(q) => {
                let (y, b) = step_fc(&q.0)?;
                (Point::Exact(RationalVector3(y)), b)
            }
            Point::Float(v) => {
                let (y, b) = step_fc_float(v, k)?;
                (Point::Float(y), b)
            }
        };
        states.push(next.clone());
        branches.push(b);
        cur = next;
    }
    Ok(OrbitRecord { states, branches })
}

/// Where an exact orbit lands on a coordinate axis and stays fixed up to the branch pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Collapse {
    pub step: usize,
    /// 0, 1 or 2 for the surviving coordinate.
    pub axis: usize,
}

impl Collapse {
    /// Letters emitted from the collapsed state on: a finite head, then a repeated letter.
    fn tail(&self) -> (&'static [u8], u8) {
        match self.axis {
            0 => (&[], 1),
            1 => (&[1], 2),
            _ => (&[], 2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaExpansion {
    pub letters: Vec<u8>,
    pub collapse: Option<Collapse>,
}

impl DeltaExpansion {
    /// The expansion as a directive: eventually periodic after a collapse, otherwise a prefix.
    pub fn directive(&self) -> DirectiveWord {
        match self.collapse {
            Some(c) => {
                let (head, rep) = c.tail();
                let mut pre = self.letters[..c.step.min(self.letters.len())].to_vec();
                pre.extend_from_slice(head);
                DirectiveWord::periodic(pre, vec![rep]).expect("valid letters")
            }
            None => DirectiveWord::Prefix(self.letters.clone()),
        }
    }
}

fn axis_of(x: &[BigInt; 3]) -> Option<usize> {
    let nz: Vec<usize> = (0..3).filter(|&i| !x[i].is_zero()).collect();
    (nz.len() == 1).then(|| nz[0])
}

/// The first `n` letters of `δ(x)`.
///
/// Exact inputs are followed on their integer ray; when the orbit hits an axis
/// the remaining letters are fixed and the collapse is reported. Fixed-point
/// inputs fail with a tie error when a branch cannot be decided.
pub fn delta_expand(x: &Point, n: usize) -> Result<DeltaExpansion> {
    match x {
        Point::Exact(q) => {
            check_cone(&q.0)?;
            let mut cur = q.to_integer_ray();
            let mut letters = Vec::with_capacity(n);
            let mut collapse = None;
            while letters.len() < n {
                if collapse.is_none() {
                    if let Some(axis) = axis_of(&cur) {
                        collapse = Some(Collapse { step: letters.len(), axis });
                    }
                }
                let (next, b) = step_fc(&cur)?;
                letters.push(b);
                cur = next;
            }
            Ok(DeltaExpansion { letters, collapse })
        }
        Point::Float(v) => {
            let mut cur = v.clone();
            let mut letters = Vec::with_capacity(n);
            for k in 0..n {
                let (next, b) = step_fc_float(&cur, k)?;
                letters.push(b);
                cur = next;
            }
            Ok(DeltaExpansion { letters, collapse: None })
        }
    }
}

/// `δ(x)` as a directive word.
///
/// Exact inputs give an eventually periodic word once the orbit collapses
/// (every rational point does), else a prefix of `max_len` letters. Fixed-point
/// inputs give the longest decidable prefix, capped at `max_len`.
pub fn delta_directive(x: &Point, max_len: usize) -> Result<DirectiveWord> {
    match x {
        Point::Exact(q) => {
            check_cone(&q.0)?;
            let mut cur = q.to_integer_ray();
            let mut letters = Vec::new();
            while letters.len() < max_len {
                if let Some(axis) = axis_of(&cur) {
                    let e = DeltaExpansion { letters: letters.clone(), collapse: Some(Collapse { step: letters.len(), axis }) };
                    return Ok(e.directive());
                }
                let (next, b) = step_fc(&cur)?;
                letters.push(b);
                cur = next;
            }
            Ok(DirectiveWord::Prefix(letters))
        }
        Point::Float(v) => {
            let mut cur = v.clone();
            let mut letters = Vec::new();
            while letters.len() < max_len {
                match step_fc_float(&cur, letters.len()) {
                    Ok((next, b)) => {
                        letters.push(b);
                        cur = next;
                    }
                    Err(e @ Error::TieUncertainty { .. }) if letters.is_empty() => return Err(e),
                    Err(Error::TieUncertainty { .. }) => break,
                    Err(e) => return Err(e),
                }
            }
            Ok(DirectiveWord::Prefix(letters))
        }
    }
}

/// Result of [`pi_project`].
#[derive(Clone, Debug, Serialize)]
pub struct Projection {
    /// 1-normalized mean of the normalized product columns.
    pub f: [f64; 3],
    /// Largest pairwise `d_M` between the normalized columns.
    pub spread: f64,
    pub converged: bool,
    /// Matrix multiplications performed.
    pub steps: usize,
}

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_STEPS: usize = 10_000;

fn normalized_columns(p: &IntMatrix3) -> [[f64; 3]; 3] {
    std::array::from_fn(|j| {
        let col = p.column(j);
        let s: BigInt = col.iter().sum();
        std::array::from_fn(|i| fixed::ratio_to_f64(&col[i], &s))
    })
}

fn spread_and_mean(p: &IntMatrix3) -> (f64, [f64; 3]) {
    let cols = normalized_columns(p);
    let mut spread = 0.0f64;
    for i in 0..3 {
        for j in (i + 1)..3 {
            spread = spread.max(semimetric_dm(&cols[i], &cols[j]).unwrap_or(f64::INFINITY));
        }
    }
    let mut mean: [f64; 3] = std::array::from_fn(|i| (cols[0][i] + cols[1][i] + cols[2][i]) / 3.0);
    let s: f64 = mean.iter().sum();
    mean.iter_mut().for_each(|x| *x /= s);
    (spread, mean)
}

/// Approximates `π(w)`, the ray shared by the nested cones `C_{w0}⋯C_{wn} R^3_{>=0}`.
///
/// Eventually periodic words are handled by repeated squaring of the period
/// product, which also covers the slow polynomial convergence of `1^ω`/`2^ω` tails.
pub fn pi_project(w: &DirectiveWord, tol: f64, max_steps: usize) -> Result<Projection> {
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let mut steps = 0usize;
    match w {
        DirectiveWord::Prefix(letters) => {
            let mut p = IntMatrix3::identity();
            let (mut spread, mut mean) = spread_and_mean(&p);
            for &l in letters {
                if spread < tol || steps >= max_steps {
                    break;
                }
                p.mul_generator_right(l)?;
                steps += 1;
                (spread, mean) = spread_and_mean(&p);
            }
            Ok(Projection { f: mean, spread, converged: spread < tol, steps })
        }
        DirectiveWord::Periodic { pre, per } => {
            let head = IntMatrix3::product_of(pre)?;
            let mut period = IntMatrix3::product_of(per)?;
            steps += pre.len() + per.len();
            let mut p = &head * &period;
            steps += 1;
            let (mut spread, mut mean) = spread_and_mean(&p);
            while spread >= tol && steps + 2 <= max_steps {
                period = &period * &period;
                p = &head * &period;
                steps += 2;
                (spread, mean) = spread_and_mean(&p);
            }
            Ok(Projection { f: mean, spread, converged: spread < tol, steps })
        }
    }
}

/// Rational dimension of the limit vector, decided from an eventually periodic directive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RationalDim {
    #[serde(rename = "dim1")]
    One,
    #[serde(rename = "dim2")]
    Two,
    #[serde(rename = "dim3")]
    Three,
}

impl fmt::Display for RationalDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RationalDim::One => "dim1",
            RationalDim::Two => "dim2",
            RationalDim::Three => "dim3",
        })
    }
}

fn paired_from(w: &[u8], offset: usize) -> bool {
    w.get(offset..).is_none_or(|s| s.chunks_exact(2).all(|b| b[0] == b[1]))
}

/// dim1 for a constant tail, dim2 for a tail of equal 2-blocks, dim3 otherwise.
pub fn classify_directive(w: &DirectiveWord) -> Result<RationalDim> {
    let DirectiveWord::Periodic { per, .. } = w else {
        return domain("classification needs an eventually periodic directive");
    };
    if per.is_empty() {
        return domain("period must be non-empty");
    }
    if per.len() == 1 {
        return Ok(RationalDim::One);
    }
    let tail: Vec<u8> = per.iter().chain(per).chain(per).copied().collect();
    let window = &tail[..2 * per.len() + 1];
    if paired_from(&window[..2 * per.len()], 0) || paired_from(window, 1) {
        Ok(RationalDim::Two)
    } else {
        Ok(RationalDim::Three)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    /// Some factor `i j^{2k+1} i` with `i != j` occurs.
    pub positive_window_found: bool,
    /// The letters after the last such factor split into equal 2-blocks.
    pub obstruction_prefix_is_paired: bool,
    /// Start of the first such factor.
    pub first_witness_index: Option<usize>,
    /// The boolean product over the whole window is positive.
    pub shadow_positive: bool,
}

/// Looks for the factors `C_i C_j^{2k+1} C_i` that force a positive product.
pub fn primitivity_scan(w: &[u8]) -> Result<ScanReport> {
    if w.is_empty() {
        return domain("scan needs a non-empty word");
    }
    if w.iter().any(|&l| l != 1 && l != 2) {
        return domain("directive letters must be 1 or 2");
    }
    // maximal runs as (start, len)
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (i, &l) in w.iter().enumerate() {
        match runs.last_mut() {
            Some((s, n)) if w[*s] == l => *n += 1,
            _ => runs.push((i, 1)),
        }
    }
    let mut first = None;
    let mut last_end = None;
    for r in 1..runs.len().saturating_sub(1) {
        let (s, n) = runs[r];
        if n % 2 == 1 {
            first.get_or_insert(s - 1);
            last_end = Some(s + n + 1);
        }
    }
    let suffix = &w[last_end.unwrap_or(0).min(w.len())..];
    let paired = paired_from(suffix, 0) || paired_from(suffix, 1);
    let mut shadow = IntMatrix3::identity().boolean_shadow();
    for &l in w {
        shadow = shadow * IntMatrix3::generator(l)?.boolean_shadow();
    }
    Ok(ScanReport {
        positive_window_found: first.is_some(),
        obstruction_prefix_is_paired: paired,
        first_witness_index: first,
        shadow_positive: shadow.is_positive(),
    })
}

/// Boolean pattern of `C_{w0}⋯C_{wn}`.
pub fn shadow_of(w: &[u8]) -> Result<BooleanMatrix3> {
    Ok(IntMatrix3::product_of(w)?.boolean_shadow())
}

#[derive(Clone, Debug, Serialize)]
pub struct Cylinder {
    pub label: String,
    /// Vertices in the simplex, one per column of the product.
    pub vertices: [[f64; 3]; 3],
}

/// Planar coordinates of a point of the simplex: `(x2 + x3/2, x3·√3/2)`.
pub fn barycentric_xy(v: &[f64; 3]) -> [f64; 2] {
    [v[1] + v[2] / 2.0, v[2] * 3f64.sqrt() / 2.0]
}

/// The `2^depth` cylinder triangles of depth `depth`, in lexicographic label order.
pub fn cylinder_polygons(depth: usize) -> Result<Vec<Cylinder>> {
    if depth == 0 {
        return domain("depth must be at least 1");
    }
    if depth > 24 {
        return domain("depth above 24 is not supported");
    }
    let mut out = Vec::with_capacity(1 << depth);
    for code in 0..(1u32 << depth) {
        let letters: Vec<u8> = (0..depth).map(|i| 1 + ((code >> (depth - 1 - i)) & 1) as u8).collect();
        let p = IntMatrix3::product_of(&letters)?;
        out.push(Cylinder { label: crate::directive::letters_to_string(&letters), vertices: normalized_columns(&p) });
    }
    Ok(out)
}

/// Area of a cylinder triangle in the planar picture.
pub fn cylinder_area(c: &Cylinder) -> f64 {
    let [a, b, d] = c.vertices.map(|v| barycentric_xy(&v));
    ((b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1])).abs() / 2.0
}

/// `max(x2, x3) <= x1`.
pub fn in_theta<T: Ord>(x: &[T; 3]) -> bool {
    x[1] <= x[0] && x[2] <= x[0]
}

/// One step of the semi-sorted Selmer map, with branch in `1..=4`.
pub fn step_fs<T>(x: &[T; 3]) -> Result<([T; 3], u8)>
where
    T: Signed + Ord + Clone,
{
    check_cone(x)?;
    if !in_theta(x) {
        return domain("Selmer step needs max(x2, x3) <= x1");
    }
    let [a, b, c] = x.clone();
    let small = a <= b.clone() + c.clone();
    Ok(match (small, b >= c) {
        (true, true) => ([b, a - c.clone(), c], 1),
        (true, false) => ([c, b.clone(), a - b], 2),
        (false, true) => ([a - c.clone(), c, b], 3),
        (false, false) => ([a - b.clone(), c, b], 4),
    })
}

/// `S_b` with `x = S_b F_S(x)` on branch `b`.
pub fn selmer_matrix(b: u8) -> Result<IntMatrix3> {
    Ok(IntMatrix3::from_rows(match b {
        1 => [[0, 1, 1], [1, 0, 0], [0, 0, 1]],
        2 => [[0, 1, 1], [0, 1, 0], [1, 0, 0]],
        3 => [[1, 1, 0], [0, 0, 1], [0, 1, 0]],
        4 => [[1, 0, 1], [0, 0, 1], [0, 1, 0]],
        _ => return domain(format!("Selmer branch {b} is not in 1..=4")),
    }))
}

/// The conjugacy `Z` with `Z ∘ F_C = F_S ∘ Z`.
pub fn conjugacy_matrix() -> IntMatrix3 {
    IntMatrix3::from_rows([[1, 1, 1], [1, 1, 0], [0, 1, 1]])
}

#[derive(Clone, Debug)]
pub struct ConjugacyReport {
    pub holds: bool,
    /// Orbit of `x` under `F_C`.
    pub fc_orbit: Vec<[BigRational; 3]>,
    /// Orbit of `Z x` under `F_S`.
    pub fs_orbit: Vec<[BigRational; 3]>,
    pub fs_branches: Vec<u8>,
    /// `S_1 Z = Z C_1` and `S_2 Z = Z C_2`.
    pub matrices_intertwine: bool,
}

fn apply_q(m: &IntMatrix3, x: &[BigRational; 3]) -> [BigRational; 3] {
    std::array::from_fn(|i| {
        (0..3).fold(BigRational::zero(), |acc, j| acc + BigRational::from_integer(m.entry(i, j).clone()) * &x[j])
    })
}

/// Checks `Z F_C^k(x) = F_S^k(Z x)` for `k = 0..=n` in exact arithmetic.
pub fn selmer_conjugacy_check(x: &RationalVector3, n: usize) -> Result<ConjugacyReport> {
    check_cone(&x.0)?;
    let z = conjugacy_matrix();
    let mut fc = vec![x.0.clone()];
    let mut fs = vec![apply_q(&z, &x.0)];
    let mut fs_branches = Vec::new();
    let mut holds = apply_q(&z, &fc[0]) == fs[0];
    for _ in 0..n {
        let (a, _) = step_fc(fc.last().expect("non-empty"))?;
        let cur = fs.last().expect("non-empty");
        // Z x can reach zero only if x does; the Selmer step would then be undefined
        if cur.iter().all(|c| c.is_zero()) {
            break;
        }
        let (b, br) = step_fs(cur)?;
        holds &= apply_q(&z, &a) == b;
        fc.push(a);
        fs.push(b);
        fs_branches.push(br);
    }
    let matrices_intertwine = [1u8, 2].iter().all(|&i| {
        &selmer_matrix(i).expect("valid") * &z == &z * &IntMatrix3::generator(i).expect("valid")
    });
    Ok(ConjugacyReport { holds: holds && matrices_intertwine, fc_orbit: fc, fs_orbit: fs, fs_branches, matrices_intertwine })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::int_vec;

    fn iv(v: [i64; 3]) -> [BigInt; 3] {
        int_vec(v)
    }

    #[test]
    fn fc_orbit_diagram() {
        let expect = [[3, 15, 22], [15, 3, 19], [3, 15, 4], [15, 3, 1], [14, 1, 3]];
        let branches = [2, 2, 2, 1];
        let mut x = iv(expect[0]);
        for k in 0..4 {
            let (y, b) = step_fc(&x).unwrap();
            assert_eq!(y, iv(expect[k + 1]));
            assert_eq!(b, branches[k]);
            assert_eq!(unstep_fc(&y, b).unwrap(), x);
            x = y;
        }
    }

    #[test]
    fn fc_tie_goes_to_branch_one() {
        assert_eq!(step_fc(&iv([2, 5, 2])).unwrap(), (iv([0, 2, 5]), 1));
        assert!(step_fc(&iv([0, 0, 0])).is_err());
        assert!(step_fc(&iv([1, -1, 0])).is_err());
    }

    #[test]
    fn project_examples() {
        let third = RationalVector3::from_ints([1, 1, 1]);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(project_fc(&third).unwrap().0, [BigRational::zero(), half.clone(), half]);
        let p = project_fc(&RationalVector3::from_ints([3, 15, 22])).unwrap();
        assert_eq!(p.0, RationalVector3::from_ints([15, 3, 19]).l1_normalized().unwrap().0);
        assert!(project_fc(&RationalVector3::from_ints([0, 0, 0])).is_err());
    }

    #[test]
    fn delta_of_one_e_pi() {
        let p = Point::parse("1,e,pi", 256).unwrap();
        let d = delta_expand(&p, 5).unwrap();
        assert_eq!(d.letters, vec![2, 1, 2, 1, 1]);
        let (y, b) = step_fc_float(match &p {
            Point::Float(v) => v,
            _ => unreachable!(),
        }, 0)
        .unwrap();
        assert_eq!(b, 2);
        let f = y.to_f64();
        assert!((f[0] - std::f64::consts::E).abs() < 1e-15);
        assert!((f[2] - (std::f64::consts::PI - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn delta_collapses_on_axes() {
        let d = delta_expand(&Point::parse("1,0,0", 64).unwrap(), 4).unwrap();
        assert_eq!(d.letters, vec![1, 1, 1, 1]);
        assert_eq!(d.collapse, Some(Collapse { step: 0, axis: 0 }));
        let d = delta_expand(&Point::parse("0,1,0", 64).unwrap(), 4).unwrap();
        assert_eq!(d.letters, vec![1, 2, 2, 2]);
        assert_eq!(d.directive(), DirectiveWord::parse("1(2)^w").unwrap());
        let w = delta_directive(&Point::parse("3,15,22", 64).unwrap(), 1000).unwrap();
        assert!(matches!(w, DirectiveWord::Periodic { .. }));
        assert_eq!(w.take(4), vec![2, 2, 2, 1]);
    }

    #[test]
    fn float_tie_is_reported() {
        let p = Point::parse("pi,1,pi", 128).unwrap();
        assert_eq!(delta_expand(&p, 3), Err(Error::TieUncertainty { step: 0 }));
    }

    #[test]
    fn projection_of_periodic_words() {
        let pr = pi_project(&DirectiveWord::parse("(12)^w").unwrap(), 1e-10, 10_000).unwrap();
        assert!(pr.converged);
        for (a, b) in pr.f.iter().zip([0.4302, 0.3247, 0.2451]) {
            assert!((a - b).abs() < 1e-4);
        }
        for input in ["1(2)^w", "2(1)^w"] {
            let pr = pi_project(&DirectiveWord::parse(input).unwrap(), 1e-12, 10_000).unwrap();
            assert!(pr.converged, "{input}");
            assert!((pr.f[1] - 1.0).abs() < 1e-12 && pr.f[0].abs() < 1e-12, "{input}: {:?}", pr.f);
        }
        let pr = pi_project(&DirectiveWord::parse("(1)^w").unwrap(), 1e-12, 10_000).unwrap();
        assert!((pr.f[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_of_short_prefix_is_not_converged() {
        let pr = pi_project(&DirectiveWord::parse("1212").unwrap(), 1e-12, 10_000).unwrap();
        assert!(!pr.converged);
        assert_eq!(pr.steps, 4);
        assert!(pi_project(&DirectiveWord::parse("12").unwrap(), 0.0, 10).is_err());
    }

    #[test]
    fn classification() {
        let c = |pre: &str, per: &str| {
            classify_directive(&DirectiveWord::parse(&format!("pre:{pre} per:{per}")).unwrap()).unwrap()
        };
        assert_eq!(c("12", "1"), RationalDim::One);
        assert_eq!(c("", "1122"), RationalDim::Two);
        assert_eq!(c("", "12"), RationalDim::Three);
        assert_eq!(c("1", "1221"), RationalDim::Two);
        assert_eq!(c("", "112212"), RationalDim::Three);
        assert!(classify_directive(&DirectiveWord::parse("1212").unwrap()).is_err());
    }

    #[test]
    fn scans() {
        let r = primitivity_scan(&[1, 2, 1]).unwrap();
        assert!(r.positive_window_found && !r.shadow_positive);
        assert_eq!(r.first_witness_index, Some(0));
        let r = primitivity_scan(&[1, 1, 2, 2, 1, 1, 2, 2, 1, 1]).unwrap();
        assert!(!r.positive_window_found && r.obstruction_prefix_is_paired);
        let r = primitivity_scan(&[1, 1, 1, 2, 2, 2]).unwrap();
        assert!(!r.positive_window_found);
        // 1·11·22·2
        assert!(r.obstruction_prefix_is_paired);
        let r = primitivity_scan(&[2, 1, 2, 2, 2, 1]).unwrap();
        assert_eq!(r.first_witness_index, Some(0));
        assert!(primitivity_scan(&[]).is_err());
    }

    #[test]
    fn cylinders() {
        let d1 = cylinder_polygons(1).unwrap();
        assert_eq!(d1.len(), 2);
        // the shared edge joins (1/2,0,1/2) and (0,1,0), both on x1 = x3
        for v in [[0.5, 0.0, 0.5], [0.0, 1.0, 0.0]] {
            assert!(d1.iter().all(|c| c.vertices.contains(&v)));
        }
        let full = 3f64.sqrt() / 4.0;
        for depth in [2, 6] {
            let cells = cylinder_polygons(depth).unwrap();
            assert_eq!(cells.len(), 1 << depth);
            let area: f64 = cells.iter().map(cylinder_area).sum();
            assert!((area - full).abs() < 1e-12);
            assert!(cells.iter().all(|c| cylinder_area(c) > 0.0));
        }
        assert!(cylinder_polygons(0).is_err());
    }

    #[test]
    fn selmer_diagram() {
        let expect = [[40, 18, 37], [37, 18, 22], [22, 18, 19], [19, 18, 4], [18, 15, 4]];
        let branches = [2, 2, 2, 1];
        let mut x = iv(expect[0]);
        for k in 0..4 {
            let (y, b) = step_fs(&x).unwrap();
            assert_eq!(y, iv(expect[k + 1]));
            assert_eq!(b, branches[k]);
            assert_eq!(selmer_matrix(b).unwrap().mul_vec(&y), x);
            x = y;
        }
        assert_eq!(step_fs(&iv([2, 1, 1])).unwrap().1, 1);
        assert!(step_fs(&iv([1, 2, 0])).is_err());
    }

    #[test]
    fn conjugacy() {
        let r = selmer_conjugacy_check(&RationalVector3::from_ints([3, 15, 22]), 4).unwrap();
        assert!(r.holds && r.matrices_intertwine);
        let to_q = |v: [i64; 3]| RationalVector3::from_ints(v).0;
        assert_eq!(r.fs_orbit[0], to_q([40, 18, 37]));
        assert_eq!(r.fs_orbit[4], to_q([18, 15, 4]));
        assert_eq!(r.fc_orbit[4], to_q([14, 1, 3]));
        assert!(selmer_conjugacy_check(&RationalVector3::from_ints([1, 1, 1]), 10).unwrap().holds);
    }
}
