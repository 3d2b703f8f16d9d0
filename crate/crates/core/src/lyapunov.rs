//! Monte-Carlo Lyapunov exponents of the `{C1, C2}` cocycle, cylinder measures,
//! and the restricted-norm series behind balance.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::directive::DirectiveWord;
use crate::error::{Error, Result};
use crate::fixed;
use crate::linear::{restricted_norm_pullback, IntMatrix3, IntVector3, VecNorm};
use crate::subst::word_to_string;
use crate::words::FrequencyVector;

/// A shift-invariant (or Lebesgue-started) law on directive sequences.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Measure {
    /// I.i.d. letters with `P(1) = p`.
    Bernoulli(f64),
    /// Directive of a uniform point of the simplex.
    Lebesgue,
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "lebesgue" {
            return Ok(Measure::Lebesgue);
        }
        let p = s
            .strip_prefix("bernoulli:")
            .ok_or_else(|| Error::Parse(format!("expected bernoulli:<p> or lebesgue, got {s:?}")))?;
        let p: f64 = p.parse().map_err(|_| Error::Parse(format!("bad probability {p:?}")))?;
        check_probability(p)?;
        Ok(Measure::Bernoulli(p))
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Bernoulli(p) => write!(f, "bernoulli:{p}"),
            Measure::Lebesgue => f.write_str("lebesgue"),
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Bernoulli parameter {p} must lie in (0, 1)")))
    }
}

/// A measure plus a master seed; trajectory `i` depends only on `(seed, i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureSampler {
    pub measure: Measure,
    pub seed: u64,
}

impl MeasureSampler {
    pub fn bernoulli(p: f64, seed: u64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { measure: Measure::Bernoulli(p), seed })
    }

    pub fn simplex_lebesgue(seed: u64) -> Self {
        Self { measure: Measure::Lebesgue, seed }
    }

    pub fn trajectory(&self, i: u64) -> LetterStream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i);
        let state = match self.measure {
            Measure::Bernoulli(p) => StreamState::Bernoulli(p),
            Measure::Lebesgue => StreamState::Lebesgue([1.0; 3]),
        };
        LetterStream { rng, state }
    }
}

#[derive(Clone, Debug)]
enum StreamState {
    Bernoulli(f64),
    /// Column sums `1^T C_{i0} ⋯ C_{i(n-1)}`, up to scale.
    Lebesgue([f64; 3]),
}

/// Endless stream of directive letters.
///
/// For the Lebesgue law, given the letters so far with product `M`, the
/// cylinder of `M` has volume proportional to `1 / ∏ (M^T 1)_i`, so the next
/// letter is 1 with probability `c3 / (c1 + c3)` where `c = M^T 1`. This draws
/// exactly from the image of the uniform law without tracking the point.
#[derive(Clone, Debug)]
pub struct LetterStream {
    rng: ChaCha8Rng,
    state: StreamState,
}

impl Iterator for LetterStream {
    type Item = u8;
    fn next(&mut self) -> Option<u8> {
        let u: f64 = self.rng.random();
        Some(match &mut self.state {
            StreamState::Bernoulli(p) => {
                if u < *p {
                    1
                } else {
                    2
                }
            }
            StreamState::Lebesgue(c) => {
                let [c1, c2, c3] = *c;
                let (letter, next) = if u * (c1 + c3) < c3 { (1, [c1, c1 + c3, c2]) } else { (2, [c2, c1 + c3, c3]) };
                *c = if next[1] > 1e200 { next.map(|x| x * 1e-200) } else { next };
                letter
            }
        })
    }
}

/// Lebesgue probability of the cylinder `[u]`, exactly as a float.
pub fn lebesgue_cylinder(u: &[u8]) -> Result<f64> {
    let mut c = [1.0f64; 3];
    let mut p = 1.0;
    for &l in u {
        let [c1, c2, c3] = c;
        match l {
            1 => {
                p *= c3 / (c1 + c3);
                c = [c1, c1 + c3, c2];
            }
            2 => {
                p *= c1 / (c1 + c3);
                c = [c2, c1 + c3, c3];
            }
            _ => return Err(Error::Domain(format!("directive letter {l} is not 1 or 2"))),
        }
    }
    Ok(p)
}

/// Exact `β_p([u])`.
pub fn bernoulli_cylinder(p: f64, u: &[u8]) -> Result<f64> {
    check_probability(p)?;
    u.iter().try_fold(1.0, |acc, &l| match l {
        1 => Ok(acc * p),
        2 => Ok(acc * (1.0 - p)),
        _ => Err(Error::Domain(format!("directive letter {l} is not 1 or 2"))),
    })
}

/// `1/2 - 3 ln(2)^2 / π^2`, the invariant measure of `[11]`.
pub fn xi_cylinder_11() -> f64 {
    0.5 - 3.0 * std::f64::consts::LN_2.powi(2) / std::f64::consts::PI.powi(2)
}

/// Lyapunov spectrum estimate, in nats per step.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    /// 95% half-widths from batch means.
    pub ci1: f64,
    pub ci2: f64,
    /// `1 - θ2/θ1`.
    pub ratio: f64,
    pub measure: String,
    pub seed: u64,
    pub steps: usize,
    pub traj: usize,
}

/// Renormalizing more rarely than this could overflow `f64` (`‖C_i‖ = 2`).
pub const MAX_RENORM: usize = 512;
pub const DEFAULT_RENORM: usize = 32;
/// Batches used when a single trajectory is run.
const SINGLE_TRAJECTORY_BATCHES: usize = 16;

fn rescale(v: &mut [f64; 3]) -> f64 {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    v.iter_mut().for_each(|x| *x /= m);
    m.ln()
}

/// Log-growth of `1^T M` and of `M^{-1} w` (the cofactor action on 2-forms) per batch.
fn trajectory_logs(stream: LetterStream, steps: usize, renorm: usize, batches: usize) -> Vec<(f64, f64, usize)> {
    let mut u = [1.0f64; 3];
    let mut w = [0.5377f64, -1.8339, 2.2588];
    let (mut lu, mut lw) = (0.0, 0.0);
    let mut out = Vec::with_capacity(batches);
    let per = steps / batches;
    let mut done = 0usize;
    for (k, l) in stream.take(steps).enumerate() {
        let [a, b, c] = u;
        let [x, y, z] = w;
        if l == 1 {
            u = [a, a + c, b];
            w = [x - z, z, y];
        } else {
            u = [b, a + c, c];
            w = [y, x, z - x];
        }
        let n = k + 1;
        let boundary = out.len() + 1 < batches && n == (out.len() + 1) * per;
        if n % renorm == 0 || boundary || n == steps {
            lu += rescale(&mut u);
            lw += rescale(&mut w);
        }
        if boundary || n == steps {
            out.push((lu, lw, n - done));
            done = n;
            lu = 0.0;
            lw = 0.0;
        }
    }
    out
}

fn half_width(samples: &[f64]) -> f64 {
    let k = samples.len();
    if k < 2 {
        return f64::INFINITY;
    }
    let mean = samples.iter().sum::<f64>() / k as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (k - 1) as f64).expect("positive dof").inverse_cdf(0.975);
    t * (var / k as f64).sqrt()
}

/// Estimates `θ1` from `1^T M_[0,n)` and `θ1 + θ2` from the action on 2-forms.
pub fn estimate_exponents(s: &MeasureSampler, steps: usize, trajectories: usize, renorm: usize) -> Result<EstimateReport> {
    if steps < 1000 {
        return Err(Error::Domain(format!("need at least 1000 steps, got {steps}")));
    }
    if trajectories == 0 || renorm == 0 {
        return Err(Error::Domain("trajectories and renormalization period must be positive".into()));
    }
    if renorm > MAX_RENORM {
        return Err(Error::Overflow(format!("renormalization period {renorm} exceeds {MAX_RENORM}")));
    }
    let batches = if trajectories == 1 { SINGLE_TRAJECTORY_BATCHES } else { 1 };
    let logs: Vec<Vec<(f64, f64, usize)>> = (0..trajectories)
        .into_par_iter()
        .map(|i| trajectory_logs(s.trajectory(i as u64), steps, renorm, batches))
        .collect();
    let flat: Vec<(f64, f64, usize)> = logs.into_iter().flatten().collect();
    let total = (steps * trajectories) as f64;
    let theta1 = flat.iter().map(|b| b.0).sum::<f64>() / total;
    let sum12 = flat.iter().map(|b| b.1).sum::<f64>() / total;
    let theta2 = sum12 - theta1;
    let t1: Vec<f64> = flat.iter().map(|b| b.0 / b.2 as f64).collect();
    let t2: Vec<f64> = flat.iter().map(|b| (b.1 - b.0) / b.2 as f64).collect();
    Ok(EstimateReport {
        theta1,
        theta2,
        theta3: -theta1 - theta2,
        ci1: half_width(&t1),
        ci2: half_width(&t2),
        ratio: 1.0 - theta2 / theta1,
        measure: s.measure.to_string(),
        seed: s.seed,
        steps,
        traj: trajectories,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CylinderEstimate {
    pub word: String,
    pub estimate: f64,
    /// 95% half-width from batch means.
    pub ci: f64,
    pub samples: usize,
}

impl LetterStream {
    /// Probability that the next letters spell `u`, given the letters drawn so far.
    pub fn conditional(&self, u: &[u8]) -> f64 {
        match &self.state {
            StreamState::Bernoulli(p) => u.iter().map(|&l| if l == 1 { *p } else { 1.0 - p }).product(),
            StreamState::Lebesgue(c) => {
                let mut c = *c;
                let mut prob = 1.0;
                for &l in u {
                    let [c1, c2, c3] = c;
                    if l == 1 {
                        prob *= c3 / (c1 + c3);
                        c = [c1, c1 + c3, c2];
                    } else {
                        prob *= c1 / (c1 + c3);
                        c = [c2, c1 + c3, c3];
                    }
                }
                prob
            }
        }
    }
}

/// Ergodic estimate of `μ([u])` along sampled trajectories.
///
/// At each position the exact conditional probability of `[u]` given the past
/// is averaged instead of the indicator; both have the same ergodic limit and
/// the former has far smaller variance. `samples` positions are split evenly
/// over `trajectories`; each trajectory first discards `burn_in` letters.
pub fn cylinder_frequency(
    s: &MeasureSampler,
    u: &[u8],
    burn_in: usize,
    samples: usize,
    trajectories: usize,
) -> Result<CylinderEstimate> {
    if u.iter().any(|&l| l != 1 && l != 2) {
        return Err(Error::Domain("cylinder letters must be 1 or 2".into()));
    }
    if u.is_empty() {
        return Ok(CylinderEstimate { word: String::new(), estimate: 1.0, ci: 0.0, samples });
    }
    if trajectories == 0 || samples < trajectories {
        return Err(Error::Domain(format!("need at least one sample per trajectory ({samples} < {trajectories})")));
    }
    let batches = if trajectories == 1 { SINGLE_TRAJECTORY_BATCHES } else { 1 };
    let per_traj = samples / trajectories;
    let per_batch = per_traj / batches;
    let sums: Vec<Vec<(f64, usize)>> = (0..trajectories)
        .into_par_iter()
        .map(|i| {
            let mut stream = s.trajectory(i as u64);
            stream.by_ref().take(burn_in).for_each(drop);
            (0..batches)
                .map(|b| {
                    let len = if b + 1 == batches { per_traj - b * per_batch } else { per_batch };
                    let mut acc = 0.0;
                    for _ in 0..len {
                        acc += stream.conditional(u);
                        stream.next();
                    }
                    (acc, len)
                })
                .collect()
        })
        .collect();
    let flat: Vec<(f64, usize)> = sums.into_iter().flatten().collect();
    let n: usize = flat.iter().map(|b| b.1).sum();
    let total: f64 = flat.iter().map(|b| b.0).sum();
    let means: Vec<f64> = flat.iter().map(|&(a, m)| a / m as f64).collect();
    Ok(CylinderEstimate { word: word_to_string(u), estimate: total / n as f64, ci: half_width(&means), samples: n })
}

/// A point of the simplex drawn from the invariant density `6 / (π² (1-x1)(1-x3))`.
///
/// With `a = 1 - x1`, `b = 1 - x3` the density is `∝ 1/(ab)` on `a + b >= 1`.
/// The marginal of `a` is the mixture `Σ_k 6/(π² k²) · k a^{k-1}`, and given `a`,
/// `ln b` is uniform on `[ln(1-a), 0]`.
pub fn sample_invariant_point<R: Rng>(rng: &mut R) -> [f64; 3] {
    let k = loop {
        // proposal P(k) = 1/(k(k+1)); target/proposal is at most 12/π²
        let u: f64 = rng.random();
        if u == 0.0 {
            continue;
        }
        let k = (1.0 / u).floor();
        if k < 1e15 && rng.random::<f64>() * 2.0 * k < k + 1.0 {
            break k;
        }
    };
    let a = rng.random::<f64>().powf(1.0 / k);
    let b = (1.0 - a).powf(rng.random::<f64>());
    [1.0 - a, a + b - 1.0, 1.0 - b]
}

/// Longest cylinder accepted by [`invariant_cylinder`]; `f64` orbits stay exact enough this far.
pub const MAX_DIRECT_CYLINDER: usize = 48;

/// Independent-draw estimate of the invariant measure of `[u]`.
pub fn invariant_cylinder(u: &[u8], samples: usize, seed: u64) -> Result<CylinderEstimate> {
    if u.iter().any(|&l| l != 1 && l != 2) {
        return Err(Error::Domain("cylinder letters must be 1 or 2".into()));
    }
    if u.len() > MAX_DIRECT_CYLINDER {
        return Err(Error::Domain(format!("cylinder longer than {MAX_DIRECT_CYLINDER} letters")));
    }
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    const CHUNKS: usize = 64;
    let per = samples.div_ceil(CHUNKS);
    let hits: Vec<(u64, usize)> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = per.min(samples.saturating_sub(c * per));
            let mut h = 0u64;
            for _ in 0..len {
                let mut x = sample_invariant_point(&mut rng);
                let mut ok = true;
                for &l in u {
                    let (next, b) = if x[0] >= x[2] { ([x[0] - x[2], x[2], x[1]], 1) } else { ([x[1], x[0], x[2] - x[0]], 2) };
                    if b != l {
                        ok = false;
                        break;
                    }
                    x = next;
                }
                h += u64::from(ok);
            }
            (h, len)
        })
        .collect();
    let n: usize = hits.iter().map(|c| c.1).sum();
    let total: u64 = hits.iter().map(|c| c.0).sum();
    let p = total as f64 / n as f64;
    let ci = 1.96 * (p * (1.0 - p) / n as f64).sqrt();
    Ok(CylinderEstimate { word: word_to_string(u), estimate: p, ci, samples: n })
}

/// `(1/8) μ([12121212]) ln(4/5)`.
pub fn theta2_bound(mu_cyl: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu_cyl) {
        return Err(Error::Domain(format!("cylinder measure {mu_cyl} must lie in [0, 1]")));
    }
    Ok(mu_cyl / 8.0 * (0.8f64).ln())
}

/// Terms `‖M_[0,n)^T|_{f⊥}‖_D · ‖C_{i_n}‖∞` of the balance series and their partial sums.
#[derive(Clone, Debug, Serialize)]
pub struct BalanceSeries {
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Letters looked ahead to pin down `f`.
    pub lookahead: usize,
    /// Sup-distance between the given `f` and the one implied by the directive.
    pub f_error: f64,
}

fn lookahead_for(n_max: usize) -> usize {
    n_max / 4 + 96
}

/// `M_[n,N) 1` for every `n` in `checkpoints` (sorted), where `N = letters.len()`.
fn tail_columns(letters: &[u8], checkpoints: &[usize]) -> Vec<IntVector3> {
    let mut v: IntVector3 = std::array::from_fn(|_| BigInt::from(1));
    let mut out = vec![v.clone(); checkpoints.len()];
    let mut next = checkpoints.len();
    for n in (0..letters.len()).rev() {
        let [p, q, r] = v;
        v = if letters[n] == 1 { [&p + &q, r, q] } else { [q.clone(), p, q + r] };
        while next > 0 && checkpoints[next - 1] == n {
            next -= 1;
            out[next] = v.clone();
        }
    }
    out
}

/// Restricted norms of `M_[0,n)^T` on `f⊥` at each checkpoint, exactly, where `f` is
/// approximated by `M_[0,N) 1`; each value is computed on `g⊥` with `g = M_[n,N) 1`.
fn restricted_norms(letters: &[u8], checkpoints: &[usize], norm: VecNorm) -> Result<Vec<f64>> {
    let tails = tail_columns(letters, checkpoints);
    let mut inv = IntMatrix3::identity();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut n = 0usize;
    for (k, &c) in checkpoints.iter().enumerate() {
        while n < c {
            inv.mul_generator_inverse_left(letters[n])?;
            n += 1;
        }
        let r = restricted_norm_pullback(&inv, &tails[k], norm)?;
        out.push(fixed::ratio_to_f64(r.numer(), r.denom()));
    }
    Ok(out)
}

/// Partial sums of the balance series for `n = 0..n_max`.
///
/// `f` is checked against the directive; the terms then use `f = M_[0,N) 1`
/// with `N` a little past `n_max`, which is accurate far beyond `f64`.
pub fn balance_series_partial_sums(w: &DirectiveWord, f: &FrequencyVector, n_max: usize) -> Result<BalanceSeries> {
    if f.0.iter().any(|&x| !(x >= 0.0)) || f.0.iter().sum::<f64>() <= 0.0 {
        return Err(Error::Domain("f must be non-negative and non-zero".into()));
    }
    let lookahead = lookahead_for(n_max);
    let total = n_max + lookahead;
    let letters = w.take(total);
    if letters.len() < total {
        return Err(Error::InsufficientDirective(format!("need {total} directive letters, have {}", letters.len())));
    }
    let tails = tail_columns(&letters, &[0, total / 2]);
    let implied = l1_direction(&tails[0]);
    let fs: f64 = f.0.iter().sum();
    let f_error = (0..3).fold(0.0f64, |m, i| m.max((f.0[i] / fs - implied[i]).abs()));
    // spread of the columns of M_[0,N/2) bounds how well f is pinned down
    let m_half = IntMatrix3::product_of(&letters[..total / 2])?;
    let spread = (0..3)
        .map(|j| l1_direction(&m_half.column(j)))
        .fold(0.0f64, |m, c| m.max((0..3).fold(0.0f64, |a, i| a.max((c[i] - implied[i]).abs()))));
    if f_error > 1e-6 + spread {
        return Err(Error::Domain(format!(
            "f = {:?} is not the frequency vector of the directive (off by {f_error:.3e})",
            f.0
        )));
    }
    let checkpoints: Vec<usize> = (0..n_max).collect();
    let norms = restricted_norms(&letters, &checkpoints, VecNorm::D)?;
    let terms: Vec<f64> = norms.iter().map(|r| 2.0 * r).collect();
    let partial_sums = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    Ok(BalanceSeries { terms, partial_sums, lookahead, f_error })
}

fn l1_direction(v: &IntVector3) -> [f64; 3] {
    let s: BigInt = v.iter().sum();
    std::array::from_fn(|i| fixed::ratio_to_f64(&v[i], &s))
}

/// One checkpoint of the restricted-norm envelope.
#[derive(Clone, Debug, Serialize)]
pub struct EnvelopePoint {
    pub n: usize,
    pub ln_norm: f64,
    pub ln_bound: f64,
    /// Occurrences of `12121212` starting in `0..=n-8`.
    pub occurrences: usize,
}

impl EnvelopePoint {
    pub fn holds(&self) -> bool {
        self.ln_norm <= self.ln_bound
    }
}

/// Compares `‖M_[0,n)^T|_{f⊥}‖∞` with `2 (n+3) (4/5)^{#J_n/8 - 1/8}` at each checkpoint.
///
/// The directive must extend past the last checkpoint by enough letters to fix `f`.
pub fn envelope_check(letters: &[u8], checkpoints: &[usize]) -> Result<Vec<EnvelopePoint>> {
    if letters.iter().any(|&l| l != 1 && l != 2) {
        return Err(Error::Domain("directive letters must be 1 or 2".into()));
    }
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    let last = cps.last().copied().unwrap_or(0);
    if letters.len() < last + lookahead_for(last) {
        return Err(Error::InsufficientDirective(format!(
            "need {} letters for checkpoint {last}, have {}",
            last + lookahead_for(last),
            letters.len()
        )));
    }
    const PATTERN: [u8; 8] = [1, 2, 1, 2, 1, 2, 1, 2];
    let mut hits = vec![0usize; letters.len() + 1];
    for k in 0..letters.len() {
        let h = usize::from(letters[k..].starts_with(&PATTERN));
        hits[k + 1] = hits[k] + h;
    }
    let norms = restricted_norms(letters, &cps, VecNorm::Inf)?;
    Ok(cps
        .iter()
        .zip(norms)
        .map(|(&n, r)| {
            let occurrences = if n >= 8 { hits[n - 7] } else { 0 };
            let ln_bound = (2.0 * (n as f64 + 3.0)).ln() + (occurrences as f64 / 8.0 - 0.125) * 0.8f64.ln();
            EnvelopePoint { n, ln_norm: r.ln(), ln_bound, occurrences }
        })
        .collect())
}

/// A finite directive sample of `len` letters from trajectory `i`.
pub fn sample_directive(s: &MeasureSampler, i: u64, len: usize) -> Vec<u8> {
    s.trajectory(i).take(len).collect()
}

/// Directive letters of a cylinder such as `"12121212"`.
pub fn parse_cylinder(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .map(|c| match c {
            '1' | '2' => Ok(c as u8 - b'0'),
            _ => Err(Error::Parse(format!("unexpected {c:?} in cylinder {text:?}"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcfa::{pi_project, DEFAULT_MAX_STEPS};

    #[test]
    fn bernoulli_letters() {
        let s = MeasureSampler::bernoulli(0.5, 7).unwrap();
        let ones = s.trajectory(0).take(1_000_000).filter(|&l| l == 1).count();
        assert!((ones as f64 / 1e6 - 0.5).abs() < 0.001);
        assert!(MeasureSampler::bernoulli(1.0, 0).is_err());
        assert!("bernoulli:0".parse::<Measure>().is_err());
        assert_eq!("bernoulli:0.25".parse::<Measure>().unwrap(), Measure::Bernoulli(0.25));
        let est = cylinder_frequency(&MeasureSampler::bernoulli(0.9, 1).unwrap(), &[1, 1], 0, 200_000, 8).unwrap();
        assert!((est.estimate - 0.81).abs() < 1e-12);
        let pattern = [1, 2, 1, 2, 1, 2, 1, 2];
        let hits = s.trajectory(5).take(1_000_000).collect::<Vec<u8>>().windows(8).filter(|w| *w == pattern).count();
        let sd = (2f64.powi(-8) * 1e6).sqrt() * 3.0;
        assert!((hits as f64 - 1e6 * 2f64.powi(-8)).abs() < 3.0 * sd);
    }

    #[test]
    fn streams_are_reproducible() {
        let s = MeasureSampler::simplex_lebesgue(42);
        let a: Vec<u8> = s.trajectory(3).take(500).collect();
        let b: Vec<u8> = s.trajectory(3).take(500).collect();
        let c: Vec<u8> = s.trajectory(4).take(500).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn lebesgue_first_letters_match_cylinder_volumes() {
        let s = MeasureSampler::simplex_lebesgue(3);
        let n = 200_000u64;
        let mut counts = [0u64; 4];
        for i in 0..n {
            let w: Vec<u8> = s.trajectory(i).take(2).collect();
            counts[((w[0] - 1) * 2 + (w[1] - 1)) as usize] += 1;
        }
        for (k, u) in [[1u8, 1], [1, 2], [2, 1], [2, 2]].iter().enumerate() {
            let exact = lebesgue_cylinder(u).unwrap();
            assert!((counts[k] as f64 / n as f64 - exact).abs() < 0.005, "{u:?}");
        }
        assert_eq!(lebesgue_cylinder(&[1]).unwrap(), 0.5);
    }

    #[test]
    fn exponent_sum_is_zero_and_deterministic() {
        let s = MeasureSampler::bernoulli(0.5, 11).unwrap();
        let a = estimate_exponents(&s, 20_000, 4, DEFAULT_RENORM).unwrap();
        let b = estimate_exponents(&s, 20_000, 4, DEFAULT_RENORM).unwrap();
        assert_eq!(a.theta1.to_bits(), b.theta1.to_bits());
        assert_eq!(a.theta1 + a.theta2 + a.theta3, 0.0);
        assert!(a.ci1 > 0.0 && a.ci2 > 0.0);
        assert!(a.theta1 > 0.0 && a.theta2 < 0.0);
        let single = estimate_exponents(&s, 20_000, 1, 8).unwrap();
        assert!(single.ci1.is_finite() && single.ci1 > 0.0);
        assert!(matches!(estimate_exponents(&s, 20_000, 1, 4096), Err(Error::Overflow(_))));
        assert!(estimate_exponents(&s, 10, 1, 8).is_err());
    }

    #[test]
    fn invariant_draws_match_known_cylinders() {
        let one = invariant_cylinder(&[1], 400_000, 9).unwrap();
        assert!((one.estimate - 0.5).abs() < 0.003);
        let eleven = invariant_cylinder(&[1, 1], 400_000, 9).unwrap();
        assert!((eleven.estimate - xi_cylinder_11()).abs() < 0.003);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let x = sample_invariant_point(&mut rng);
            assert!(x.iter().all(|&v| v >= 0.0) && (x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(invariant_cylinder(&[3], 10, 0).is_err());
    }

    #[test]
    fn bound_formula() {
        assert_eq!(theta2_bound(0.0).unwrap(), 0.0);
        let v = theta2_bound(2f64.powi(-8)).unwrap();
        assert!((v - (-1.0896e-4)).abs() < 1e-7);
        let mu = -0.00002633 * 8.0 / 0.8f64.ln();
        assert!((theta2_bound(mu).unwrap() + 0.00002633).abs() < 1e-12);
        assert!(theta2_bound(1.5).is_err());
    }

    #[test]
    fn series_plateaus_for_fixed_point() {
        let w = DirectiveWord::parse("(12)^w").unwrap();
        let f = FrequencyVector(pi_project(&w, 1e-12, DEFAULT_MAX_STEPS).unwrap().f);
        let s = balance_series_partial_sums(&w, &f, 300).unwrap();
        assert_eq!(s.terms[0], 2.0);
        assert!(s.partial_sums.windows(2).all(|p| p[1] >= p[0]));
        assert!(s.terms[299] < 1e-6);
        assert!(s.partial_sums[299] - s.partial_sums[200] < 1e-4);
        let wrong = FrequencyVector([0.2, 0.3, 0.5]);
        assert!(balance_series_partial_sums(&w, &wrong, 50).is_err());
    }

    #[test]
    fn series_does_not_decay_for_square_blocks() {
        let w = DirectiveWord::parse("(1122)^w").unwrap();
        let f = FrequencyVector(pi_project(&w, 1e-12, DEFAULT_MAX_STEPS).unwrap().f);
        let s = balance_series_partial_sums(&w, &f, 200).unwrap();
        assert!(s.terms[199] > 1e-3);
    }

    #[test]
    fn envelope_on_fixed_point() {
        let letters: Vec<u8> = (0..2000).map(|i| 1 + (i % 2) as u8).collect();
        let pts = envelope_check(&letters, &[0, 10, 100, 500, 1000]).unwrap();
        assert!(pts.iter().all(EnvelopePoint::holds), "{pts:?}");
        assert_eq!(pts[2].occurrences, 47);
    }
}
