//! Branch-by-branch simulation of controlled teleportation.
//!
//! Particles: 1 Charlie, 2 Alice, 3 Bob, 4 the message. Charlie measures in
//! `{|x⟩, |x⟩⊥}`, Alice makes a Bell measurement on 2 and 4 in the Schmidt
//! basis of particle 2, Bob filters with `{F_s, F_f}` and applies the Pauli
//! correction for Alice's outcome.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::canonical::{canonical_state, CanonicalCoefficients};
use crate::channel::MeasurementBasis;
use crate::qcore::{fidelity, mat2_apply, mat2_dagger, normalize, schmidt_two_qubit, Mat2, PureState, SchmidtPair};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessageQubit<T: Real> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
}

impl<T: Real> MessageQubit<T> {
    pub fn new(alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if !n.is_finite() || (n - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::InvalidMessage(format!("|alpha|^2 + |beta|^2 = {n}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn normalized(alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(n > T::lit(1e-14)) || !n.is_finite() {
            return Err(Error::InvalidMessage("zero message".into()));
        }
        Ok(Self { alpha: alpha / n, beta: beta / n })
    }

    pub fn as_state(&self) -> PureState<T> {
        PureState::new(vec![self.alpha, self.beta]).expect("normalized by construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharlieOutcome {
    X,
    XPerp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterOutcome {
    Success,
    Failure,
}

/// Alice's outcomes in her Schmidt-aligned basis.
pub const BELL_LABELS: [&str; 4] = ["phi+", "phi-", "psi+", "psi-"];

#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T: Real> {
    pub charlie_outcome: CharlieOutcome,
    /// Index into [`BELL_LABELS`].
    pub bell_outcome: usize,
    pub filter_outcome: FilterOutcome,
    pub probability: T,
    /// Bob's corrected qubit; only for success branches of nonnegligible weight.
    pub output_state: Option<PureState<T>>,
    pub output_fidelity: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport<T: Real> {
    pub branches: Vec<Branch<T>>,
    pub p_success: T,
    /// `1` when no success branch carries weight.
    pub min_success_fidelity: T,
    pub basis: MeasurementBasis<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleReport {
    pub shots: u64,
    pub successes: u64,
    pub seed: u64,
    pub empirical_rate: f64,
}

/// `(F_s, F_f)` in Bob's Schmidt basis `{b_large, b_small}`:
/// `F_s = diag(√(λ_small/λ_large), 1)`, `F_f = diag(√(1 − λ_small/λ_large), 0)`.
pub fn build_filter<T: Real>(sp: &SchmidtPair<T>) -> Result<(Mat2<T>, Mat2<T>)> {
    if sp.lambda_large < T::lit(1e-12) {
        return Err(Error::DegenerateChannel(format!("lambda_large = {}", sp.lambda_large)));
    }
    let ratio = (sp.lambda_small / sp.lambda_large).min(T::one()).max(T::zero());
    let z = Complex::new(T::zero(), T::zero());
    let re = |v: T| Complex::new(v, T::zero());
    let success = [[re(ratio.sqrt()), z], [z, re(T::one())]];
    let failure = [[re((T::one() - ratio).sqrt()), z], [z, z]];
    Ok((success, failure))
}

/// Bell vector `k` over (particle 2, message) with particle 2 in the basis given by `a`'s columns.
fn bell_vector<T: Real>(a: &Mat2<T>, k: usize) -> [Complex<T>; 4] {
    let h = T::FRAC_1_SQRT_2();
    let col = |c: usize| [a[0][c], a[1][c]];
    let (e0, e1) = (col(0), col(1));
    // (Schmidt index on particle 2, message bit) for the two terms
    let (terms, sign): ([(usize, usize); 2], T) = match k {
        0 => ([(0, 0), (1, 1)], T::one()),
        1 => ([(0, 0), (1, 1)], -T::one()),
        2 => ([(0, 1), (1, 0)], T::one()),
        _ => ([(0, 1), (1, 0)], -T::one()),
    };
    let mut v = [Complex::new(T::zero(), T::zero()); 4];
    for (n, &(p2, m)) in terms.iter().enumerate() {
        let e = if p2 == 0 { e0 } else { e1 };
        let s = if n == 0 { h } else { h * sign };
        for i in 0..2 {
            v[2 * i + m] = v[2 * i + m] + e[i] * s;
        }
    }
    v
}

/// Pauli correction for Bell outcome `k`, acting in Bob's Schmidt coordinates.
fn correct<T: Real>(k: usize, w: [Complex<T>; 2]) -> [Complex<T>; 2] {
    match k {
        0 => w,
        1 => [w[0], -w[1]],
        2 => [w[1], w[0]],
        _ => [w[1], -w[0]],
    }
}

const OUTPUT_FLOOR: f64 = 1e-14;

pub fn run_exact<T: Real>(
    c: &CanonicalCoefficients<T>,
    b: &MeasurementBasis<T>,
    m: &MessageQubit<T>,
) -> Result<ProtocolReport<T>> {
    if c.a0() <= T::lit(1e-8) {
        return Err(Error::BiseparableChannel(c.a0().to_f64_lossy()));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let channel = canonical_state(c);
    let full = channel.tensor(&m.as_state())?;
    let amps = full.amplitudes();
    let (x, xp) = b.vectors();
    let target = m.as_state();

    let mut branches = Vec::with_capacity(16);
    for (outcome, v) in [(CharlieOutcome::X, x), (CharlieOutcome::XPerp, xp)] {
        // χ[i2, i3, i4], unnormalized, weight p_outcome
        let chi: Vec<Complex<T>> = (0..8).map(|r| v[0].conj() * amps[r] + v[1].conj() * amps[8 + r]).collect();
        let pair: Vec<Complex<T>> = (0..4).map(|r| v[0].conj() * channel.amplitudes()[r] + v[1].conj() * channel.amplitudes()[4 + r]).collect();
        let schmidt = normalize(pair).ok().map(|s| schmidt_two_qubit(&s)).transpose()?;
        for k in 0..4 {
            let Some(sp) = schmidt else {
                for filter_outcome in [FilterOutcome::Success, FilterOutcome::Failure] {
                    branches.push(Branch {
                        charlie_outcome: outcome,
                        bell_outcome: k,
                        filter_outcome,
                        probability: T::zero(),
                        output_state: None,
                        output_fidelity: None,
                    });
                }
                continue;
            };
            let bell = bell_vector(sp.basis_a.matrix(), k);
            let mut bob = [zero; 2];
            for i2 in 0..2 {
                for i4 in 0..2 {
                    let w = bell[2 * i2 + i4].conj();
                    for (j, slot) in bob.iter_mut().enumerate() {
                        *slot = *slot + w * chi[4 * i2 + 2 * j + i4];
                    }
                }
            }
            let coords = mat2_apply(&mat2_dagger(sp.basis_b.matrix()), bob);
            let (fs, ff) = build_filter(&sp)?;
            let ok = mat2_apply(&fs, coords);
            let bad = mat2_apply(&ff, coords);
            let p_ok = ok[0].norm_sqr() + ok[1].norm_sqr();
            let p_bad = bad[0].norm_sqr() + bad[1].norm_sqr();
            let (state, fid) = if p_ok > T::lit(OUTPUT_FLOOR) {
                let out = normalize(correct(k, ok).to_vec())?;
                let f = fidelity(&out, &target)?;
                (Some(out), Some(f))
            } else {
                (None, None)
            };
            branches.push(Branch {
                charlie_outcome: outcome,
                bell_outcome: k,
                filter_outcome: FilterOutcome::Success,
                probability: p_ok,
                output_state: state,
                output_fidelity: fid,
            });
            branches.push(Branch {
                charlie_outcome: outcome,
                bell_outcome: k,
                filter_outcome: FilterOutcome::Failure,
                probability: p_bad,
                output_state: None,
                output_fidelity: None,
            });
        }
    }
    let p_success = branches
        .iter()
        .filter(|br| br.filter_outcome == FilterOutcome::Success)
        .map(|br| br.probability)
        .sum();
    let min_success_fidelity = branches
        .iter()
        .filter_map(|br| br.output_fidelity)
        .fold(T::one(), |a, f| a.min(f));
    Ok(ProtocolReport { branches, p_success, min_success_fidelity, basis: *b })
}

/// Shots per independent random stream.
pub const SHOTS_PER_CHUNK: u64 = 4096;

/// Samples `shots` protocol runs from the exact branch distribution.
///
/// Chunk `k` of [`SHOTS_PER_CHUNK`] shots draws from ChaCha8 seeded with
/// `seed` on stream `k`, so counts do not depend on the number of workers.
pub fn run_sampled<T: Real>(
    c: &CanonicalCoefficients<T>,
    b: &MeasurementBasis<T>,
    m: &MessageQubit<T>,
    shots: u64,
    seed: u64,
) -> Result<SampleReport> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    let report = run_exact(c, b, m)?;
    let mut cdf = Vec::with_capacity(report.branches.len());
    let mut acc = 0.0f64;
    for br in &report.branches {
        acc += br.probability.to_f64_lossy().max(0.0);
        cdf.push((acc, br.filter_outcome == FilterOutcome::Success));
    }
    let total = acc;
    let chunks = shots.div_ceil(SHOTS_PER_CHUNK);
    let successes: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let n = SHOTS_PER_CHUNK.min(shots - k * SHOTS_PER_CHUNK);
            (0..n)
                .filter(|_| {
                    let u = rng.gen::<f64>() * total;
                    let idx = cdf.partition_point(|&(edge, _)| edge <= u).min(cdf.len() - 1);
                    cdf[idx].1
                })
                .count() as u64
        })
        .sum();
    Ok(SampleReport { shots, successes, seed, empirical_rate: successes as f64 / shots as f64 })
}
