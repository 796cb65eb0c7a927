//! Minimum of `R(θ, φ)` over the controller's measurement bases, hence the
//! best success probability `p_max = 1 − R_min`.
//!
//! The dense grid plus compass refinement is authoritative. Boundary,
//! P-zero and analytic stationary points join as extra candidates and are
//! checked against it.

use rayon::prelude::*;

use crate::canonical::CanonicalCoefficients;
use crate::channel::{p_zero_points, pq_at, r_at, MeasurementBasis, DEFAULT_TOL};
use crate::stationary::{derived_coefficients, stationary_candidates};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig<T: Real> {
    pub grid_theta: usize,
    pub grid_phi: usize,
    pub refine_tol: T,
    pub accept_tol: T,
    pub use_analytic: bool,
}

impl<T: Real> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            grid_theta: 257,
            grid_phi: 512,
            refine_tol: T::lit(1e-10),
            accept_tol: T::lit(1e-6),
            use_analytic: true,
        }
    }
}

impl<T: Real> OptimizerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.grid_theta < 65 || self.grid_phi < 128 {
            return Err(Error::InvalidConfig(format!(
                "grid {}x{} is below the 65x128 minimum",
                self.grid_theta, self.grid_phi
            )));
        }
        let cap = T::lit(1e-2);
        for (name, v) in [("refine_tol", self.refine_tol), ("accept_tol", self.accept_tol)] {
            if !(v > T::zero() && v < cap) {
                return Err(Error::InvalidConfig(format!("{name} = {v} outside (0, 1e-2)")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    GridRefined,
    AnalyticStationary,
    PZero,
    BoundaryTheta0,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::GridRefined => "grid_refined",
            Provenance::AnalyticStationary => "analytic_stationary",
            Provenance::PZero => "p_zero",
            Provenance::BoundaryTheta0 => "boundary_theta0",
        }
    }

    /// Preference among candidates that tie on `R`.
    fn rank(&self) -> u8 {
        match self {
            Provenance::PZero => 0,
            Provenance::AnalyticStationary => 1,
            Provenance::BoundaryTheta0 => 2,
            Provenance::GridRefined => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<T: Real> {
    pub basis: MeasurementBasis<T>,
    pub r_value: T,
    pub provenance: Provenance,
}

impl<T: Real> Candidate<T> {
    fn at(c: &CanonicalCoefficients<T>, basis: MeasurementBasis<T>, provenance: Provenance) -> Self {
        let r_value = r_at(c, basis.theta(), basis.phi());
        Self { basis, r_value, provenance }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationReport<T: Real> {
    pub p_max: T,
    pub r_min: T,
    pub argmin: MeasurementBasis<T>,
    pub candidates: Vec<Candidate<T>>,
    /// The analytic stationary system does not apply (`a₀a₁a₂a₃a₄ sin μ = 0`).
    pub degenerate_case: bool,
}

fn grid_angle<T: Real>(i: usize, j: usize, nt: usize, np: usize) -> (T, T) {
    let theta = T::PI() * T::lit(i as f64) / T::lit((nt - 1) as f64);
    let phi = T::TAU() * T::lit(j as f64) / T::lit(np as f64);
    (theta, phi)
}

/// `R` on the inclusive-θ, half-open-φ grid, row-major over θ.
pub fn r_grid<T: Real>(c: &CanonicalCoefficients<T>, nt: usize, np: usize) -> Vec<T> {
    (0..nt)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..np).map(move |j| {
                let (theta, phi) = grid_angle::<T>(i, j, nt, np);
                r_at(c, theta, phi)
            })
        })
        .collect()
}

/// Grid indices ordered by `(R, θ, φ)`.
fn best_grid_points<T: Real>(values: &[T], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let key = |&k: &usize| (values[k], k);
    let cmp = |a: &usize, b: &usize| {
        key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
    };
    let count = count.min(idx.len());
    if count == 0 {
        return Vec::new();
    }
    idx.select_nth_unstable_by(count - 1, cmp);
    idx.truncate(count);
    idx.sort_by(cmp);
    idx
}

/// Grid point of least `R`; ties go to the smallest `θ`, then the smallest `φ`.
pub fn r_grid_min<T: Real>(c: &CanonicalCoefficients<T>, nt: usize, np: usize) -> Candidate<T> {
    let (nt, np) = (nt.max(2), np.max(2));
    let values = r_grid(c, nt, np);
    let k = best_grid_points(&values, 1)[0];
    let (theta, phi) = grid_angle::<T>(k / np, k % np, nt, np);
    Candidate {
        basis: MeasurementBasis::wrapped(theta, phi),
        r_value: values[k],
        provenance: Provenance::GridRefined,
    }
}

/// Derivative-free compass descent on `f` over `θ ∈ [0, π]`, `φ` periodic.
/// Never returns a point worse than the seed.
pub fn compass_minimize<T: Real, F: Fn(T, T) -> T>(f: F, seed: MeasurementBasis<T>, tol: T) -> (MeasurementBasis<T>, T) {
    let s = T::FRAC_1_SQRT_2();
    let dirs = [
        (T::one(), T::zero()),
        (-T::one(), T::zero()),
        (T::zero(), T::one()),
        (T::zero(), -T::one()),
        (s, s),
        (-s, -s),
        (s, -s),
        (-s, s),
    ];
    let mut best = seed;
    let mut best_f = f(seed.theta(), seed.phi());
    let mut step = T::lit(0.05);
    let floor = tol.max(T::tol(1e-15));
    let mut evals = 0usize;
    while step > floor && evals < 200_000 {
        let mut moved = false;
        for &(dt, dp) in &dirs {
            let cand = MeasurementBasis::wrapped(best.theta() + dt * step, best.phi() + dp * step);
            let v = f(cand.theta(), cand.phi());
            evals += 1;
            if v < best_f {
                best = cand;
                best_f = v;
                moved = true;
                break;
            }
        }
        if !moved {
            step = step * T::lit(0.5);
        }
    }
    (best, best_f)
}

/// Compass refinement of `R` from `seed`.
pub fn refine<T: Real>(c: &CanonicalCoefficients<T>, seed: MeasurementBasis<T>, tol: T) -> Candidate<T> {
    let (basis, r_value) = compass_minimize(|t, p| r_at(c, t, p), seed, tol);
    Candidate { basis, r_value, provenance: Provenance::GridRefined }
}

/// `R(0, φ)`, which is the same for every `φ` and equals `R(π, φ)`.
pub fn boundary_candidate<T: Real>(c: &CanonicalCoefficients<T>) -> Candidate<T> {
    let a02 = c.a0() * c.a0();
    let q = (T::one() - a02).powi(2) - T::lit(4.0) * c.k().norm_sqr();
    Candidate {
        basis: MeasurementBasis::wrapped(T::zero(), T::zero()),
        r_value: a02 + q.max(T::zero()).sqrt(),
        provenance: Provenance::BoundaryTheta0,
    }
}

const MULTI_START: usize = 8;

pub fn optimize<T: Real>(c: &CanonicalCoefficients<T>, cfg: &OptimizerConfig<T>) -> Result<OptimizationReport<T>> {
    cfg.validate()?;
    if c.a0() <= T::lit(1e-8) {
        return Err(Error::BiseparableChannel(c.a0().to_f64_lossy()));
    }
    let (nt, np) = (cfg.grid_theta, cfg.grid_phi);
    let values = r_grid(c, nt, np);
    let seeds = best_grid_points(&values, MULTI_START);
    let refined: Vec<Candidate<T>> = seeds
        .par_iter()
        .map(|&k| {
            let (theta, phi) = grid_angle::<T>(k / np, k % np, nt, np);
            refine(c, MeasurementBasis::wrapped(theta, phi), cfg.refine_tol)
        })
        .collect();
    let numeric_min = refined.iter().fold(T::infinity(), |m, r| m.min(r.r_value));

    let mut extra = vec![boundary_candidate(c)];
    if (c.a2() - c.a3()).abs() <= T::lit(DEFAULT_TOL) {
        for basis in p_zero_points(c, T::lit(DEFAULT_TOL))? {
            let (big_p, _) = pq_at(c, basis.theta(), basis.phi())?;
            if big_p < T::lit(1e-10) {
                extra.push(Candidate::at(c, basis, Provenance::PZero));
            }
        }
    }
    let degenerate_case = derived_coefficients(c).is_err();
    if cfg.use_analytic && !degenerate_case {
        for s in stationary_candidates(c, cfg.accept_tol)? {
            extra.push(Candidate { basis: s.basis, r_value: s.r_value, provenance: Provenance::AnalyticStationary });
        }
    }
    let slack = T::lit(1e-6);
    if let Some(bad) = extra.iter().find(|e| e.r_value < numeric_min - slack) {
        return Err(Error::InternalInconsistency(format!(
            "{} candidate R = {} at ({}, {}) beats the refined grid minimum {}",
            bad.provenance.as_str(),
            bad.r_value,
            bad.basis.theta(),
            bad.basis.phi(),
            numeric_min
        )));
    }

    let mut candidates = refined;
    dedupe(&mut candidates);
    candidates.extend(extra);
    let r_min = candidates.iter().fold(T::infinity(), |m, x| m.min(x.r_value));
    let tie = T::lit(1e-12);
    let best = candidates
        .iter()
        .filter(|x| x.r_value <= r_min + tie)
        .min_by_key(|x| x.provenance.rank())
        .expect("at least one candidate");
    Ok(OptimizationReport {
        p_max: (T::one() - r_min).max(T::zero()).min(T::one()),
        r_min,
        argmin: best.basis,
        candidates,
        degenerate_case,
    })
}

fn dedupe<T: Real>(cands: &mut Vec<Candidate<T>>) {
    let close = T::lit(1e-9);
    let mut kept: Vec<Candidate<T>> = Vec::with_capacity(cands.len());
    for cand in cands.drain(..) {
        let seen = kept.iter().any(|k| {
            (k.basis.theta() - cand.basis.theta()).abs() < close && (k.basis.phi() - cand.basis.phi()).abs() < close
        });
        if !seen {
            kept.push(cand);
        }
    }
    *cands = kept;
}
