//! Branch quantities of the channel after the controller's projective
//! measurement in the basis
//!
//! `|x⟩ = cos(θ/2)|0⟩ + e^{iφ}sin(θ/2)|1⟩`, `|x⟩⊥ = sin(θ/2)|0⟩ − e^{iφ}cos(θ/2)|1⟩`.
//!
//! Everything is computed division-free: `P = p₁² − n₁²` and `Q = p₂² − n₂²`
//! where `n₁ = p₁C₁`, `n₂ = p₂C₂` are the concurrence numerators, so nothing
//! blows up when a branch probability vanishes.

use num_complex::Complex;

use crate::canonical::CanonicalCoefficients;
use crate::qcore::{normalize, PureState};
use crate::{Error, Real, Result};

/// Controller measurement angles, `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis<T: Real> {
    theta: T,
    phi: T,
}

impl<T: Real> MeasurementBasis<T> {
    /// Rejects (does not wrap) out-of-range angles.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        if !theta.is_finite() || theta < T::zero() || theta > T::PI() {
            return Err(Error::InvalidBasis(format!("theta = {theta} outside [0, pi]")));
        }
        if !phi.is_finite() || phi < T::zero() || phi >= T::TAU() {
            return Err(Error::InvalidBasis(format!("phi = {phi} outside [0, 2pi)")));
        }
        Ok(Self { theta, phi })
    }

    /// Clamps `θ` into `[0, π]` and wraps `φ` into `[0, 2π)`.
    pub fn wrapped(theta: T, phi: T) -> Self {
        let theta = theta.max(T::zero()).min(T::PI());
        let mut phi = phi % T::TAU();
        if phi < T::zero() {
            phi = phi + T::TAU();
        }
        if phi >= T::TAU() {
            phi = T::zero();
        }
        Self { theta, phi }
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    /// `(|x⟩, |x⟩⊥)` as amplitude pairs.
    pub fn vectors(&self) -> ([Complex<T>; 2], [Complex<T>; 2]) {
        let half = self.theta * T::lit(0.5);
        let (c, s) = (half.cos(), half.sin());
        let e = Complex::from_polar(T::one(), self.phi);
        let x = [Complex::new(c, T::zero()), e * s];
        let xp = [Complex::new(s, T::zero()), -e * c];
        (x, xp)
    }
}

/// Everything that depends on one controller basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSplit<T: Real> {
    pub p1: T,
    pub p2: T,
    /// `p₁C₁`, the unnormalized concurrence of the first branch.
    pub n1: T,
    pub n2: T,
    /// `None` when `p₁ ≤ 1e-8`.
    pub c1: Option<T>,
    pub c2: Option<T>,
    pub lambda10: T,
    pub lambda11: T,
    pub lambda20: T,
    pub lambda21: T,
    pub big_p: T,
    pub big_q: T,
    pub r: T,
    pub p_success: T,
    /// Post-measurement state of particles 2 and 3, absent when the branch never occurs.
    pub phi1: Option<PureState<T>>,
    pub phi2: Option<PureState<T>>,
}

/// `(p₁, p₂, n₁, n₂)` at a basis.
fn numerators<T: Real>(c: &CanonicalCoefficients<T>, theta: T, phi: T) -> (T, T, T, T) {
    let half = theta * T::lit(0.5);
    let (s2, c2) = (half.sin().powi(2), half.cos().powi(2));
    let (a0, a1, a4) = (c.a0(), c.a1(), c.a4());
    let cross = a0 * a0 * theta.cos() + a0 * a1 * (c.mu() - phi).cos() * theta.sin();
    let p1 = s2 + cross;
    let p2 = c2 - cross;
    let lead = Complex::from_polar(a0 * a4 * theta.sin(), -phi);
    let tail = c.k() * Complex::from_polar(T::lit(2.0), -phi * T::lit(2.0));
    let n1 = (lead + tail * s2).norm();
    let n2 = (lead - tail * c2).norm();
    (p1, p2, n1, n2)
}

fn clamp_nonnegative<T: Real>(v: T, what: &str) -> Result<T> {
    if v >= T::zero() {
        Ok(v)
    } else if v >= -T::tol(1e-12) {
        Ok(T::zero())
    } else {
        Err(Error::InternalInconsistency(format!("{what} = {v} is negative")))
    }
}

/// `(P, Q)` at any angles, no domain check.
pub(crate) fn pq_at<T: Real>(c: &CanonicalCoefficients<T>, theta: T, phi: T) -> Result<(T, T)> {
    let (p1, p2, n1, n2) = numerators(c, theta, phi);
    let big_p = clamp_nonnegative((p1 - n1) * (p1 + n1), "P")?;
    let big_q = clamp_nonnegative((p2 - n2) * (p2 + n2), "Q")?;
    Ok((big_p, big_q))
}

/// `R(θ, φ)` at any angles; rounding-level negatives of `P`, `Q` are treated as 0.
pub(crate) fn r_at<T: Real>(c: &CanonicalCoefficients<T>, theta: T, phi: T) -> T {
    let (p1, p2, n1, n2) = numerators(c, theta, phi);
    let big_p = ((p1 - n1) * (p1 + n1)).max(T::zero());
    let big_q = ((p2 - n2) * (p2 + n2)).max(T::zero());
    big_p.sqrt() + big_q.sqrt()
}

/// `p₁C₁ + p₂C₂` at any angles.
pub(crate) fn concurrence_sum_at<T: Real>(c: &CanonicalCoefficients<T>, theta: T, phi: T) -> T {
    let (_, _, n1, n2) = numerators(c, theta, phi);
    n1 + n2
}

/// `(P, Q, R)` without building the branch states.
pub fn pqr<T: Real>(c: &CanonicalCoefficients<T>, b: &MeasurementBasis<T>) -> Result<(T, T, T)> {
    let (big_p, big_q) = pq_at(c, b.theta, b.phi)?;
    Ok((big_p, big_q, big_p.sqrt() + big_q.sqrt()))
}

/// Projects the canonical channel onto the controller's outcome vector.
fn branch_state<T: Real>(c: &CanonicalCoefficients<T>, x: &[Complex<T>; 2]) -> Option<PureState<T>> {
    let amps = c.amplitudes();
    let v: Vec<Complex<T>> = (0..4)
        .map(|j| x[0].conj() * amps[j] + x[1].conj() * amps[4 + j])
        .collect();
    normalize(v).ok()
}

pub fn split<T: Real>(c: &CanonicalCoefficients<T>, b: &MeasurementBasis<T>) -> Result<ChannelSplit<T>> {
    let (p1, p2, n1, n2) = numerators(c, b.theta, b.phi);
    let (big_p, big_q) = pq_at(c, b.theta, b.phi)?;
    let (sp, sq) = (big_p.sqrt(), big_q.sqrt());
    let defined = T::lit(1e-8);
    let half = T::lit(0.5);
    // λ_small = (1 − √(1−C²))/2 = (p − √P)/(2p)
    let lambdas = |p: T, n: T, root: T| {
        if p > defined {
            let small = ((p - root) / p * half).max(T::zero());
            (Some((n / p).min(T::one())), small, T::one() - small)
        } else {
            (None, T::zero(), T::one())
        }
    };
    let (c1, lambda10, lambda11) = lambdas(p1, n1, sp);
    let (c2, lambda20, lambda21) = lambdas(p2, n2, sq);
    let r = sp + sq;
    let (x, xp) = b.vectors();
    let phi1 = if p1 > defined { branch_state(c, &x) } else { None };
    let phi2 = if p2 > defined { branch_state(c, &xp) } else { None };
    Ok(ChannelSplit {
        p1,
        p2,
        n1,
        n2,
        c1,
        c2,
        lambda10,
        lambda11,
        lambda20,
        lambda21,
        big_p,
        big_q,
        r,
        p_success: (T::one() - r).max(T::zero()),
        phi1,
        phi2,
    })
}

/// `(a²−a₄²)² + 2(aa₂−a₃a₄)² + 2(aa₃−a₂a₄)² + 8aa₂a₃a₄(1+cos α) + (a₂²−a₃²)²`.
///
/// Equals `N²(1 − C²)` for the two-qubit state `(ae^{iα}, a₂, a₃, a₄)` of squared
/// norm `N`, so it vanishes exactly when that state is maximally entangled.
/// With `a = a₄ = 0` the phase `α` is undefined and the residual reduces to
/// `(a₂²−a₃²)²`, so `a₂ = a₃` is enough there (the W-type case).
pub fn max_entanglement_residual<T: Real>(a: T, alpha: T, a2: T, a3: T, a4: T) -> T {
    let two = T::lit(2.0);
    (a * a - a4 * a4).powi(2)
        + two * (a * a2 - a3 * a4).powi(2)
        + two * (a * a3 - a2 * a4).powi(2)
        + T::lit(8.0) * a * a2 * a3 * a4 * (T::one() + alpha.cos())
        + (a2 * a2 - a3 * a3).powi(2)
}

/// Default tolerance for the coefficient classifiers.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Bases with `θ ∈ (0, π]` where `P = 0`, i.e. where the first branch is a Bell pair.
/// Empty unless `a₂ = a₃` within `tol`.
pub fn p_zero_points<T: Real>(c: &CanonicalCoefficients<T>, tol: T) -> Result<Vec<MeasurementBasis<T>>> {
    let (a0, a1, a2, a3, a4, mu) = (c.a0(), c.a1(), c.a2(), c.a3(), c.a4(), c.mu());
    if a0 <= tol {
        return Err(Error::BiseparableChannel(a0.to_f64_lossy()));
    }
    if (a2 - a3).abs() > tol {
        return Ok(Vec::new());
    }
    let pi = T::PI();
    // t = cot(θ/2)
    let (t, phi) = if a1 <= tol {
        (a4 / a0, pi)
    } else if mu <= tol {
        ((a1 + a4) / a0, pi)
    } else if (pi - mu) <= tol {
        if a1 > a4 {
            ((a1 - a4) / a0, T::zero())
        } else {
            ((a4 - a1) / a0, pi)
        }
    } else {
        let t = (a1 * a1 + T::lit(2.0) * a1 * a4 * mu.cos() + a4 * a4).sqrt() / a0;
        // cot φ = cot μ + a₄/(a₁ sin μ), φ ∈ (π, 2π)
        let cot = mu.cos() / mu.sin() + a4 / (a1 * mu.sin());
        (t, arccot(cot) + pi)
    };
    let theta = T::lit(2.0) * T::one().atan2(t);
    Ok(vec![MeasurementBasis::wrapped(theta, phi)])
}

/// `arccot` onto `(0, π)`.
pub(crate) fn arccot<T: Real>(y: T) -> T {
    T::FRAC_PI_2() - y.atan()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelClassification<T: Real> {
    /// Some controller measurement leaves Alice and Bob a Bell pair with nonzero probability.
    pub epr_collapsible: bool,
    /// Unit success probability and unit fidelity are reachable.
    pub perfect_ct: bool,
    pub biseparable_1_23: bool,
    pub p_zero_points: Vec<MeasurementBasis<T>>,
}

pub fn classify<T: Real>(c: &CanonicalCoefficients<T>, tol: T) -> ChannelClassification<T> {
    let biseparable = c.a0() < tol;
    let collapsible = !biseparable && (c.a2() - c.a3()).abs() <= tol;
    let perfect = !biseparable
        && c.a2() <= tol
        && c.a3() <= tol
        && (c.a4() - T::FRAC_1_SQRT_2()).abs() <= tol;
    let points = if collapsible {
        p_zero_points(c, tol).unwrap_or_default()
    } else {
        Vec::new()
    };
    ChannelClassification {
        epr_collapsible: collapsible,
        perfect_ct: perfect,
        biseparable_1_23: biseparable,
        p_zero_points: points,
    }
}
