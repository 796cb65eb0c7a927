//! Analytic stationary points of `R(θ, φ)` for the general channel
//! `a₀a₁a₂a₃a₄ sin μ ≠ 0`.
//!
//! With `x = a₀cot θ` the two stationarity conditions become a quadratic and a
//! cubic in `x`; their polynomial remainder is linear in `x`, and eliminating
//! `x` leaves a degree-6 polynomial in `V = cot φ`.

use nalgebra::DMatrix;

use crate::canonical::CanonicalCoefficients;
use crate::channel::{arccot, pq_at, r_at, MeasurementBasis};
use crate::{Error, Real, Result};

/// Threshold below which a factor of `a₀a₁a₂a₃a₄ sin μ` counts as zero.
pub const GENERAL_CASE_TOL: f64 = 1e-8;

/// Coefficient tables. Index `i` holds the symbol with subscript `i + 1`
/// (`b[0]` is `b₁`, `d[9]` is `d₁₀`).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedCoefficients<T: Real> {
    pub a0: T,
    pub g: [T; 3],
    pub b: [T; 5],
    pub d: [T; 10],
    pub c: [T; 7],
}

pub fn derived_coefficients<T: Real>(c: &CanonicalCoefficients<T>) -> Result<DerivedCoefficients<T>> {
    let (a0, a1, a2, a3, a4, mu) = (c.a0(), c.a1(), c.a2(), c.a3(), c.a4(), c.mu());
    let floor = T::lit(GENERAL_CASE_TOL);
    let factors = [a0, a1, a2, a3, a4, mu.sin()];
    if let Some(bad) = factors.iter().position(|&f| f <= floor) {
        let name = ["a0", "a1", "a2", "a3", "a4", "sin(mu)"][bad];
        return Err(Error::DegenerateChannel(format!("{name} = {} is not in the general case", factors[bad])));
    }
    let n = T::lit;
    let (q0, q1, q2, q3, q4) = (a0 * a0, a1 * a1, a2 * a2, a3 * a3, a4 * a4);
    let p23 = q2 * q3;
    let (cm, sm) = (mu.cos(), mu.sin());
    let (c2m, s2m) = ((n(2.0) * mu).cos(), (n(2.0) * mu).sin());
    let (c3m, s3m) = ((n(3.0) * mu).cos(), (n(3.0) * mu).sin());
    let (c4m, s4m) = ((n(4.0) * mu).cos(), (n(4.0) * mu).sin());
    let a1c = q1 * a1;

    let g1 = a2 * a3 * a4;
    let g2 = p23 - (q2 + q3) * q4;
    let g3 = n(2.0) * q1 + n(2.0) * q4 - n(1.0);
    let gg = g1 * g1;

    let b1 = a1 * g1 * sm;
    let b2 = n(2.0) * a1 * sm * (n(3.0) * a1 * g1 * cm - g2);
    let b3 = n(2.0) * a1 * g2 * cm + g1 * (n(1.0) - n(2.0) * q0 - q1 - n(3.0) * q1 * c2m - n(2.0) * q4);
    let b4 = a1 * sm * (g1 * (q0 - n(1.0) + n(4.0) * q1 * cm * cm + n(2.0) * q4) - n(2.0) * a1 * g2 * cm);
    let b5 = gg - a1 * g1 * (q1 * c3m - (q2 + q3 - q4) * cm) + q1 * g2 * c2m;

    let d1 = a1 * g1 * (g3 + q0) * cm - q1 * g2 - gg;
    let d2 = n(2.0) * a1 * sm * (a1 * g1 * (n(2.0) * g3 + q0) * cm - n(2.0) * gg + (q0 - n(2.0) * q1) * g2);
    let d3 = g1
        * (n(3.0) * q0 - n(1.0) - n(2.0) * q0 * q0 + n(4.0) * q1 * q4 + n(4.0) * p23 - n(2.0) * q0 * q4
            + n(4.0) * q1 * g3 * cm * cm
            - n(2.0) * q0 * q1 * sm * sm)
        - n(2.0) * a1 * cm * (n(6.0) * gg - (q0 - n(2.0) * q1) * g2);
    let d4 = n(2.0) * p23 * (q4 - n(2.0) * p23 - n(3.0) * q1 * q4)
        + (n(1.0) - n(2.0) * q0 - n(2.0) * q1 + n(4.0) * q0 * q1 - n(2.0) * q1 * q1) * g2
        - n(16.0) * q1 * gg * cm * cm
        + n(2.0)
            * a1
            * g1
            * cm
            * (n(5.0) * q0 - n(2.0) - n(2.0) * q0 * q0 + q1 - n(3.0) * q0 * q1 + n(2.0) * q1 * q1 + n(8.0) * p23
                - n(2.0) * q0 * q4
                + n(6.0) * q1 * q4);
    let d5 = n(4.0) * (q0 - q1) * gg
        + a1c * g1 * (g3 - q0) * c3m
        + a1 * g1
            * cm
            * (n(2.0) * q0 - (n(1.0) - n(2.0) * q0).powi(2) + q1 * (g3 + n(4.0) * q4 - n(5.0) * q0) + n(4.0) * p23
                - n(8.0) * q0 * q4)
        + n(2.0) * q1 * c2m * ((n(2.0) * q0 - q1) * g2 - n(3.0) * gg);
    let d6 = a1
        * sm
        * (g1
            * (n(2.0) * q0 * (n(1.0) + n(2.0) * q2 + n(2.0) * q3 - n(2.0) * q4) - n(1.0)
                + n(4.0) * p23
                + n(4.0) * q1 * q4
                + n(4.0) * q1 * (g3 - q0) * cm * cm)
            + n(4.0) * a1 * ((n(2.0) * q0 - q1) * g2 - n(3.0) * gg) * cm);
    let d7 = g1
        * (n(1.0) - n(2.0) * q0 * q0 * q1 - n(4.0) * p23 - n(2.0) * q4 + q1 * (n(4.0) * q4 - n(2.0))
            - q0 * (n(2.0) + n(2.0) * q1 * q1 - n(4.0) * q4 - q1 * (n(3.0) - n(6.0) * q4))
            - n(2.0)
                * q1
                * cm
                * cm
                * (n(2.0) * q0 * q0 + n(3.0) - n(12.0) * p23 - n(4.0) * q1 * (n(1.0) + q4)
                    + q0 * (n(5.0) * q1 - n(7.0) + n(2.0) * q4))
            - n(4.0) * a1c * g1 * c3m)
        + n(2.0)
            * a1
            * cm
            * ((n(1.0) - n(2.0) * q0 - n(2.0) * q1 + n(3.0) * q0 * q1) * g2
                - n(2.0) * p23 * (n(2.0) * p23 - (n(1.0) + q0 - n(5.0) * q1) * q4));
    let d8 = n(2.0)
        * a1
        * sm
        * ((n(1.0) - n(2.0) * q0 - n(2.0) * q1 + n(3.0) * q0 * q1) * g2
            - n(2.0) * p23 * (n(2.0) * p23 - q4 + q0 * q4 + n(4.0) * q1 * q4)
            - n(4.0) * q1 * gg * c2m
            + a1 * g1
                * cm
                * (n(7.0) * q0 - n(3.0) - n(2.0) * q0 * q0 + n(4.0) * q1 - n(5.0) * q0 * q1 + n(12.0) * p23
                    - n(2.0) * q0 * q4
                    + n(4.0) * q1 * q4));
    let inner = n(2.0) * q0 - n(3.0) + n(3.0) * q1 + n(6.0) * q4;
    let d9 = q0 * a1 * (n(2.0) * q1 * g2 * c3m - g1 * (a1 * c2m * inner + a1c * c4m - n(4.0) * g1 * cm));
    let d10 = q0 * a1 * (n(2.0) * q1 * g2 * s3m - g1 * (a1 * s2m * inner + a1c * s4m - n(4.0) * g1 * sm));

    let bb = b1 * b1;
    let c1 = -b2 * b4 * d1 + b3 * b5 * d1 - b1 * b5 * d2 + b1 * b4 * d3 - bb * d9;
    let c2 = -b3 * b4 * d1 - b2 * b5 * d1 - bb * d10 + b1 * b4 * d2 + b1 * b5 * d3;
    let c3 = b3 * b4 * d1 - b2 * b5 * d1 - b1 * b4 * d2 + b1 * b5 * d3 - bb * d8 + n(2.0) * b1 * b3 * d1 * q0
        - n(2.0) * bb * d2 * q0;
    let c4 = -b2 * b4 * d1 - b3 * b5 * d1 + b1 * b5 * d2 + b1 * b4 * d3 - bb * d7 + n(2.0) * b1 * b2 * d1 * q0
        - n(2.0) * bb * d3 * q0;
    let c5 = b2 * b2 * d1 - b3 * b3 * d1 - n(4.0) * b1 * b4 * d1 + b1 * b3 * d2 - b1 * b2 * d3 + n(2.0) * bb * d5;
    let c6 = n(2.0) * b2 * b3 * d1 - n(4.0) * b1 * b5 * d1 - b1 * b2 * d2 - b1 * b3 * d3 + n(2.0) * bb * d6;
    let c7 = b2 * b2 * d1 + b3 * b3 * d1 - b1 * b3 * d2 - b1 * b2 * d3 + n(2.0) * bb * d4 + n(4.0) * bb * d1 * q0;

    Ok(DerivedCoefficients {
        a0,
        g: [g1, g2, g3],
        b: [b1, b2, b3, b4, b5],
        d: [d1, d2, d3, d4, d5, d6, d7, d8, d9, d10],
        c: [c1, c2, c3, c4, c5, c6, c7],
    })
}

/// Quadratic condition in `x = a₀cot θ`.
pub fn quadratic_residual<T: Real>(dc: &DerivedCoefficients<T>, x: T, phi: T) -> T {
    let [b1, b2, b3, b4, b5] = dc.b;
    let two = T::lit(2.0);
    two * b1 * x * x + (b2 * phi.cos() + b3 * phi.sin()) * x - dc.a0 * dc.a0 * b1
        + b4 * (two * phi).cos()
        + b5 * (two * phi).sin()
}

/// Cubic condition in `x = a₀cot θ`.
pub fn cubic_residual<T: Real>(dc: &DerivedCoefficients<T>, x: T, phi: T) -> T {
    let [d1, d2, d3, d4, d5, d6, d7, d8, d9, d10] = dc.d;
    let (two, three) = (T::lit(2.0), T::lit(3.0));
    T::lit(8.0) * d1 * x * x * x
        + T::lit(4.0) * x * x * (d2 * phi.sin() + d3 * phi.cos())
        + two * x * (d4 + d5 * (two * phi).cos() + d6 * (two * phi).sin())
        + d7 * phi.cos()
        + d8 * phi.sin()
        + d9 * (three * phi).cos()
        + d10 * (three * phi).sin()
}

/// `(k₁(φ), k₂(φ))`; the remainder of the cubic by the quadratic is `−x·k₁ + k₂`.
pub fn k1k2<T: Real>(dc: &DerivedCoefficients<T>, phi: T) -> (T, T) {
    let [c1, c2, c3, c4, c5, c6, c7] = dc.c;
    let (two, three) = (T::lit(2.0), T::lit(3.0));
    let k1 = c7 + c5 * (two * phi).cos() + c6 * (two * phi).sin();
    let k2 = c1 * (three * phi).cos() + c2 * (three * phi).sin() + c3 * phi.sin() + c4 * phi.cos();
    (k1, k2)
}

/// Remainder `−x·k₁(φ) + k₂(φ)`.
pub fn remainder_residual<T: Real>(dc: &DerivedCoefficients<T>, x: T, phi: T) -> T {
    let (k1, k2) = k1k2(dc, phi);
    -x * k1 + k2
}

/// Real polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolynomial<T: Real> {
    pub coefficients: Vec<T>,
}

impl<T: Real> VPolynomial<T> {
    pub fn eval(&self, v: T) -> T {
        self.coefficients.iter().rev().fold(T::zero(), |acc, &c| acc * v + c)
    }

    fn eval_with_derivative(&self, v: T) -> (T, T) {
        let mut p = T::zero();
        let mut dp = T::zero();
        for &c in self.coefficients.iter().rev() {
            dp = dp * v + p;
            p = p * v + c;
        }
        (p, dp)
    }

    pub fn norm(&self) -> T {
        self.coefficients.iter().map(|&c| c * c).sum::<T>().sqrt()
    }

    /// Real roots, ascending. Leading coefficients below `1e-14` of the largest are dropped.
    pub fn real_roots(&self) -> Vec<T> {
        let big = self.coefficients.iter().fold(T::zero(), |m, c| m.max(c.abs()));
        if big == T::zero() {
            return Vec::new();
        }
        let mut coeffs: Vec<f64> = self.coefficients.iter().map(|c| c.to_f64_lossy()).collect();
        let cut = big.to_f64_lossy() * 1e-14;
        while coeffs.last().is_some_and(|c| c.abs() <= cut) {
            coeffs.pop();
        }
        let degree = coeffs.len().saturating_sub(1);
        if degree == 0 {
            return Vec::new();
        }
        let lead = coeffs[degree];
        let companion = DMatrix::from_fn(degree, degree, |i, j| {
            if i == 0 {
                -coeffs[degree - 1 - j] / lead
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let mut roots: Vec<T> = companion
            .complex_eigenvalues()
            .iter()
            .filter(|z| z.im.abs() < 1e-8 * (1.0 + z.re.abs()))
            .map(|z| self.polish(T::lit(z.re)))
            .collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        roots.dedup_by(|a, b| (*a - *b).abs() <= T::tol(1e-12) * (T::one() + b.abs()));
        roots
    }

    fn polish(&self, mut v: T) -> T {
        for _ in 0..8 {
            let (p, dp) = self.eval_with_derivative(v);
            if dp == T::zero() || !dp.is_finite() {
                break;
            }
            let next = v - p / dp;
            if !next.is_finite() || self.eval(next).abs() > p.abs() {
                break;
            }
            v = next;
        }
        v
    }
}

/// The degree-6 polynomial in `V = cot φ` obtained by substituting `x = k₂/k₁`
/// into the quadratic condition and dividing by `sin⁶φ`.
pub fn v_polynomial<T: Real>(dc: &DerivedCoefficients<T>) -> VPolynomial<T> {
    let [b1, b2, b3, b4, b5] = dc.b;
    let [c1, c2, c3, c4, c5, c6, c7] = dc.c;
    let a02 = dc.a0 * dc.a0;
    let n = T::lit;

    let v6 = n(2.0) * b1 * (c1 + c4).powi(2) + b2 * (c5 + c7) * (c1 + c4) + (c5 + c7).powi(2) * (b4 - b1 * a02);
    let v5 = (c1 + c4) * (n(4.0) * b1 * (n(3.0) * c2 + c3) + n(2.0) * b2 * c6 + b3 * (c5 + c7))
        + (c5 + c7) * (b2 * (n(3.0) * c2 + c3) + n(2.0) * b5 * (c5 + c7) + n(4.0) * c6 * (b4 - b1 * a02));
    let v4 = -(n(2.0) * b1 * (n(8.0) * c1 * c1 - (n(3.0) * c2 + c3).powi(2) - n(2.0) * (c1 - c4).powi(2))
        - n(2.0) * b3 * (c1 + c4) * c6
        + n(2.0) * (b2 * c1 - n(4.0) * b5 * c6) * (c5 + c7)
        + n(2.0) * b2 * (c1 * c5 - c4 * c7)
        - (c5 - c7).powi(2) * (b4 + b1 * a02)
        - (n(3.0) * c2 + c3) * (b3 * c5 + n(2.0) * b2 * c6 + b3 * c7)
        + n(4.0) * b4 * (c5 * c5 - c6 * c6)
        + n(4.0) * b1 * (c6 * c6 + c7 * c7) * a02);
    let v3 = -n(2.0)
        * (n(4.0) * b1 * c1 * (n(5.0) * c2 + c3) - (c2 + c3) * (n(4.0) * b1 * c4 + b2 * c7)
            + n(2.0) * (b3 * c1 + b2 * c2) * c5
            + n(2.0) * b5 * (c5 * c5 - c7 * c7)
            + b2 * (n(3.0) * c1 - c4) * c6
            - b3 * (n(3.0) * c2 + c3) * c6
            + b3 * (c1 - c4) * c7
            + n(4.0) * c6 * (b4 * c5 - b5 * c6 + b1 * c7 * a02));
    let v2 = n(2.0) * b1 * ((n(3.0) * c1 - c4).powi(2) - n(8.0) * c2 * c2 + n(2.0) * (c2 + c3).powi(2))
        - n(4.0) * b3 * c2 * c5
        + (n(3.0) * c1 - c4) * (b2 * (c5 - c7) - n(2.0) * b3 * c6)
        + n(2.0) * c7 * b3 * (c2 + c3)
        + n(2.0) * b2 * (c3 - c2) * c6
        + n(4.0) * b4 * (c5 * c5 - c6 * c6)
        - n(8.0) * b5 * c6 * (c5 - c7)
        + (c5 + c7).powi(2) * (b1 * a02 - b4)
        - n(4.0) * b1 * (c6 * c6 + c7 * c7) * a02;
    let v1 = (c2 - c3) * (n(12.0) * b1 * c1 - n(4.0) * b1 * c4 + b2 * c5 - n(2.0) * b3 * c6 - b2 * c7)
        + (c5 - c7)
            * (n(3.0) * b3 * c1 - b3 * c4 + n(2.0) * b5 * c5 + n(4.0) * b4 * c6 - n(2.0) * b5 * c7
                + n(4.0) * b1 * c6 * a02);
    // the value at φ = π/2, where V = 0
    let v0 = n(2.0) * b1 * (c3 - c2).powi(2) + b3 * (c3 - c2) * (c7 - c5) - (a02 * b1 + b4) * (c7 - c5).powi(2);

    VPolynomial { coefficients: vec![v0, v1, v2, v3, v4, v5, v6] }
}

/// Which elimination produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateBranch {
    /// `x = k₂/k₁` with `V` a root of the degree-6 polynomial.
    K1Nonzero,
    /// `k₁(φ) = k₂(φ) = 0`, `x` from the quadratic.
    K1Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals<T: Real> {
    pub quadratic: T,
    pub cubic: T,
    pub remainder: T,
    pub grad_norm: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryCandidate<T: Real> {
    pub basis: MeasurementBasis<T>,
    pub r_value: T,
    pub residuals: Residuals<T>,
    pub branch: CandidateBranch,
}

/// Central-difference gradient of `R` with step `1e-5`.
pub(crate) fn r_gradient<T: Real>(c: &CanonicalCoefficients<T>, theta: T, phi: T) -> (T, T) {
    let h = T::lit(1e-5);
    let two_h = h + h;
    let dt = (r_at(c, theta + h, phi) - r_at(c, theta - h, phi)) / two_h;
    let dp = (r_at(c, theta, phi + h) - r_at(c, theta, phi - h)) / two_h;
    (dt, dp)
}

fn scaled<T: Real>(coeffs: &[T], x: T, degree: i32) -> T {
    let sum: T = coeffs.iter().map(|c| c.abs()).sum();
    T::one().max(sum * T::one().max(x.abs()).powi(degree))
}

const K1_SCAN: usize = 4096;

/// Stationary points of `R` in the open domain with `P·Q·sin θ·sin φ ≠ 0`.
pub fn stationary_candidates<T: Real>(
    c: &CanonicalCoefficients<T>,
    accept_tol: T,
) -> Result<Vec<StationaryCandidate<T>>> {
    let dc = derived_coefficients(c)?;
    let mut raw: Vec<(T, T, CandidateBranch)> = Vec::new();

    for v in v_polynomial(&dc).real_roots() {
        let base = arccot(v);
        for phi in [base, base + T::PI()] {
            let (k1, k2) = k1k2(&dc, phi);
            if k1 != T::zero() {
                raw.push((k2 / k1, phi, CandidateBranch::K1Nonzero));
            }
        }
    }

    let c_scale = scaled(&dc.c, T::zero(), 0);
    for phi in k1_roots(&dc) {
        let (_, k2) = k1k2(&dc, phi);
        if k2.abs() >= accept_tol * c_scale {
            continue;
        }
        let [b1, b2, b3, b4, b5] = dc.b;
        let two = T::lit(2.0);
        let qa = two * b1;
        let qb = b2 * phi.cos() + b3 * phi.sin();
        let qc = -dc.a0 * dc.a0 * b1 + b4 * (two * phi).cos() + b5 * (two * phi).sin();
        let disc = qb * qb - T::lit(4.0) * qa * qc;
        if disc < T::zero() {
            continue;
        }
        for sign in [T::one(), -T::one()] {
            raw.push(((-qb + sign * disc.sqrt()) / (two * qa), phi, CandidateBranch::K1Zero));
        }
    }

    let mut out: Vec<StationaryCandidate<T>> = Vec::new();
    for (x, phi, branch) in raw {
        if !x.is_finite() || phi.sin().abs() <= T::tol(1e-12) {
            continue;
        }
        let theta = arccot(x / dc.a0);
        if theta.sin().abs() <= T::tol(1e-12) {
            continue;
        }
        let (big_p, big_q) = match pq_at(c, theta, phi) {
            Ok(pq) => pq,
            Err(_) => continue,
        };
        if big_p <= T::zero() || big_q <= T::zero() {
            continue;
        }
        let quad = quadratic_residual(&dc, x, phi);
        let cubic = cubic_residual(&dc, x, phi);
        if quad.abs() >= accept_tol * scaled(&dc.b, x, 2) || cubic.abs() >= accept_tol * scaled(&dc.d, x, 3) {
            continue;
        }
        let (gt, gp) = r_gradient(c, theta, phi);
        let grad_norm = (gt * gt + gp * gp).sqrt();
        if grad_norm >= accept_tol {
            continue;
        }
        let basis = MeasurementBasis::wrapped(theta, phi);
        let dup = out.iter().any(|o| {
            (o.basis.theta() - basis.theta()).abs() < T::lit(1e-9) && (o.basis.phi() - basis.phi()).abs() < T::lit(1e-9)
        });
        if dup {
            continue;
        }
        out.push(StationaryCandidate {
            basis,
            r_value: big_p.sqrt() + big_q.sqrt(),
            residuals: Residuals { quadratic: quad, cubic, remainder: remainder_residual(&dc, x, phi), grad_norm },
            branch,
        });
    }
    Ok(out)
}

/// Roots of `k₁` on `(0, 2π)` from a sign-change scan plus bisection.
fn k1_roots<T: Real>(dc: &DerivedCoefficients<T>) -> Vec<T> {
    let step = T::TAU() / T::lit(K1_SCAN as f64);
    let k1 = |phi: T| k1k2(dc, phi).0;
    let mut roots = Vec::new();
    let mut lo = T::zero();
    let mut f_lo = k1(lo);
    for i in 1..=K1_SCAN {
        let hi = step * T::lit(i as f64);
        let f_hi = k1(hi);
        if f_lo == T::zero() {
            roots.push(lo);
        } else if f_lo * f_hi < T::zero() {
            let (mut a, mut b, mut fa) = (lo, hi, f_lo);
            for _ in 0..100 {
                let m = (a + b) * T::lit(0.5);
                let fm = k1(m);
                if fm == T::zero() || (b - a) <= T::tol(1e-15) {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < T::zero() {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push((a + b) * T::lit(0.5));
        }
        lo = hi;
        f_lo = f_hi;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_general(rng: &mut ChaCha8Rng) -> CanonicalCoefficients<f64> {
        loop {
            let a: [f64; 5] = std::array::from_fn(|_| rng.gen_range(0.05..1.0));
            let mu = rng.gen_range(0.1..(PI - 0.1));
            if let Ok(c) = CanonicalCoefficients::normalized(a, mu) {
                return c;
            }
        }
    }

    /// The same tables, written out term by term.
    fn tables_again(a: [f64; 5], mu: f64) -> ([f64; 5], [f64; 10], [f64; 7]) {
        let [a0, a1, a2, a3, a4] = a;
        let (cos, sin) = (f64::cos, f64::sin);
        let g1 = a2 * a3 * a4;
        let g2 = a2.powi(2) * a3.powi(2) - (a2.powi(2) + a3.powi(2)) * a4.powi(2);
        let g3 = 2.0 * a1.powi(2) + 2.0 * a4.powi(2) - 1.0;
        let b1 = a1 * g1 * sin(mu);
        let b2 = 2.0 * a1 * sin(mu) * (3.0 * a1 * g1 * cos(mu) - g2);
        let b3 = 2.0 * a1 * g2 * cos(mu)
            + g1 * (1.0 - 2.0 * a0.powi(2) - a1.powi(2) - 3.0 * a1.powi(2) * cos(2.0 * mu) - 2.0 * a4.powi(2));
        let b4 = a1 * sin(mu)
            * (g1 * (a0.powi(2) - 1.0 + 4.0 * a1.powi(2) * cos(mu).powi(2) + 2.0 * a4.powi(2))
                - 2.0 * a1 * g2 * cos(mu));
        let b5 = g1.powi(2) - a1 * g1 * (a1.powi(2) * cos(3.0 * mu) - (a2.powi(2) + a3.powi(2) - a4.powi(2)) * cos(mu))
            + a1.powi(2) * g2 * cos(2.0 * mu);
        let d1 = a1 * g1 * (g3 + a0.powi(2)) * cos(mu) - a1.powi(2) * g2 - g1.powi(2);
        let d2 = 2.0 * a1 * sin(mu)
            * (a1 * g1 * (2.0 * g3 + a0.powi(2)) * cos(mu) - 2.0 * g1.powi(2) + (a0.powi(2) - 2.0 * a1.powi(2)) * g2);
        let d3 = g1
            * (3.0 * a0.powi(2) - 1.0 - 2.0 * a0.powi(4) + 4.0 * a1.powi(2) * a4.powi(2) + 4.0 * a2.powi(2) * a3.powi(2)
                - 2.0 * a0.powi(2) * a4.powi(2)
                + 4.0 * a1.powi(2) * g3 * cos(mu).powi(2)
                - 2.0 * a0.powi(2) * a1.powi(2) * sin(mu).powi(2))
            - 2.0 * a1 * cos(mu) * (6.0 * g1.powi(2) - (a0.powi(2) - 2.0 * a1.powi(2)) * g2);
        let d4 = 2.0 * a2.powi(2) * a3.powi(2)
            * (a4.powi(2) - 2.0 * a2.powi(2) * a3.powi(2) - 3.0 * a1.powi(2) * a4.powi(2))
            + (1.0 - 2.0 * a0.powi(2) - 2.0 * a1.powi(2) + 4.0 * a0.powi(2) * a1.powi(2) - 2.0 * a1.powi(4)) * g2
            - 16.0 * a1.powi(2) * g1.powi(2) * cos(mu).powi(2)
            + 2.0 * a1 * g1 * cos(mu)
                * (5.0 * a0.powi(2) - 2.0 - 2.0 * a0.powi(4) + a1.powi(2) - 3.0 * a0.powi(2) * a1.powi(2)
                    + 2.0 * a1.powi(4)
                    + 8.0 * a2.powi(2) * a3.powi(2)
                    - 2.0 * a0.powi(2) * a4.powi(2)
                    + 6.0 * a1.powi(2) * a4.powi(2));
        let d5 = 4.0 * (a0.powi(2) - a1.powi(2)) * g1.powi(2)
            + a1.powi(3) * g1 * (g3 - a0.powi(2)) * cos(3.0 * mu)
            + a1 * g1 * cos(mu)
                * (2.0 * a0.powi(2) - (1.0 - 2.0 * a0.powi(2)).powi(2)
                    + a1.powi(2) * (g3 + 4.0 * a4.powi(2) - 5.0 * a0.powi(2))
                    + 4.0 * a2.powi(2) * a3.powi(2)
                    - 8.0 * a0.powi(2) * a4.powi(2))
            + 2.0 * a1.powi(2) * cos(2.0 * mu) * ((2.0 * a0.powi(2) - a1.powi(2)) * g2 - 3.0 * g1.powi(2));
        let d6 = a1 * sin(mu)
            * (g1 * (2.0 * a0.powi(2) * (1.0 + 2.0 * a2.powi(2) + 2.0 * a3.powi(2) - 2.0 * a4.powi(2)) - 1.0
                + 4.0 * a2.powi(2) * a3.powi(2)
                + 4.0 * a1.powi(2) * a4.powi(2)
                + 4.0 * a1.powi(2) * (g3 - a0.powi(2)) * cos(mu).powi(2))
                + 4.0 * a1 * ((2.0 * a0.powi(2) - a1.powi(2)) * g2 - 3.0 * g1.powi(2)) * cos(mu));
        let d7 = g1
            * (1.0 - 2.0 * a0.powi(4) * a1.powi(2) - 4.0 * a2.powi(2) * a3.powi(2) - 2.0 * a4.powi(2)
                + a1.powi(2) * (4.0 * a4.powi(2) - 2.0)
                - a0.powi(2) * (2.0 + 2.0 * a1.powi(4) - 4.0 * a4.powi(2) - a1.powi(2) * (3.0 - 6.0 * a4.powi(2)))
                - 2.0 * a1.powi(2) * cos(mu).powi(2)
                    * (2.0 * a0.powi(4) + 3.0 - 12.0 * a2.powi(2) * a3.powi(2) - 4.0 * a1.powi(2) * (1.0 + a4.powi(2))
                        + a0.powi(2) * (5.0 * a1.powi(2) - 7.0 + 2.0 * a4.powi(2)))
                - 4.0 * a1.powi(3) * g1 * cos(3.0 * mu))
            + 2.0 * a1 * cos(mu)
                * ((1.0 - 2.0 * a0.powi(2) - 2.0 * a1.powi(2) + 3.0 * a0.powi(2) * a1.powi(2)) * g2
                    - 2.0 * a2.powi(2) * a3.powi(2)
                        * (2.0 * a2.powi(2) * a3.powi(2) - (1.0 + a0.powi(2) - 5.0 * a1.powi(2)) * a4.powi(2)));
        let d8 = 2.0 * a1 * sin(mu)
            * ((1.0 - 2.0 * a0.powi(2) - 2.0 * a1.powi(2) + 3.0 * a0.powi(2) * a1.powi(2)) * g2
                - 2.0 * a2.powi(2) * a3.powi(2)
                    * (2.0 * a2.powi(2) * a3.powi(2) - a4.powi(2) + a0.powi(2) * a4.powi(2) + 4.0 * a1.powi(2) * a4.powi(2))
                - 4.0 * a1.powi(2) * g1.powi(2) * cos(2.0 * mu)
                + a1 * g1 * cos(mu)
                    * (7.0 * a0.powi(2) - 3.0 - 2.0 * a0.powi(4) + 4.0 * a1.powi(2) - 5.0 * a0.powi(2) * a1.powi(2)
                        + 12.0 * a2.powi(2) * a3.powi(2)
                        - 2.0 * a0.powi(2) * a4.powi(2)
                        + 4.0 * a1.powi(2) * a4.powi(2)));
        let d9 = a0.powi(2) * a1
            * (2.0 * a1.powi(2) * g2 * cos(3.0 * mu)
                - g1 * (a1 * cos(2.0 * mu) * (2.0 * a0.powi(2) - 3.0 + 3.0 * a1.powi(2) + 6.0 * a4.powi(2))
                    + a1.powi(3) * cos(4.0 * mu)
                    - 4.0 * g1 * cos(mu)));
        let d10 = a0.powi(2) * a1
            * (2.0 * a1.powi(2) * g2 * sin(3.0 * mu)
                - g1 * (a1 * sin(2.0 * mu) * (2.0 * a0.powi(2) - 3.0 + 3.0 * a1.powi(2) + 6.0 * a4.powi(2))
                    + a1.powi(3) * sin(4.0 * mu)
                    - 4.0 * g1 * sin(mu)));
        let b = [b1, b2, b3, b4, b5];
        let d = [d1, d2, d3, d4, d5, d6, d7, d8, d9, d10];
        let a02 = a0.powi(2);
        let c = [
            -b2 * b4 * d1 + b3 * b5 * d1 - b1 * b5 * d2 + b1 * b4 * d3 - b1.powi(2) * d9,
            -b3 * b4 * d1 - b2 * b5 * d1 - b1.powi(2) * d10 + b1 * b4 * d2 + b1 * b5 * d3,
            b3 * b4 * d1 - b2 * b5 * d1 - b1 * b4 * d2 + b1 * b5 * d3 - b1.powi(2) * d8 + 2.0 * b1 * b3 * d1 * a02
                - 2.0 * b1.powi(2) * d2 * a02,
            -b2 * b4 * d1 - b3 * b5 * d1 + b1 * b5 * d2 + b1 * b4 * d3 - b1.powi(2) * d7 + 2.0 * b1 * b2 * d1 * a02
                - 2.0 * b1.powi(2) * d3 * a02,
            b2.powi(2) * d1 - b3.powi(2) * d1 - 4.0 * b1 * b4 * d1 + b1 * b3 * d2 - b1 * b2 * d3 + 2.0 * b1.powi(2) * d5,
            2.0 * b2 * b3 * d1 - 4.0 * b1 * b5 * d1 - b1 * b2 * d2 - b1 * b3 * d3 + 2.0 * b1.powi(2) * d6,
            b2.powi(2) * d1 + b3.powi(2) * d1 - b1 * b3 * d2 - b1 * b2 * d3
                + 2.0 * b1.powi(2) * d4
                + 4.0 * b1.powi(2) * d1 * a02,
        ];
        (b, d, c)
    }

    fn close(x: f64, y: f64, scale: f64) -> bool {
        (x - y).abs() <= 1e-12 * scale.max(x.abs()).max(1e-300)
    }

    #[test]
    fn tables_agree_with_term_by_term_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let c = random_general(&mut rng);
            let dc = derived_coefficients(&c).unwrap();
            let (b, d, cc) = tables_again(*c.a(), c.mu());
            let bs = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let ds = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let cs = cc.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for i in 0..5 {
                assert!(close(dc.b[i], b[i], bs), "b{} {} {}", i + 1, dc.b[i], b[i]);
            }
            for i in 0..10 {
                assert!(close(dc.d[i], d[i], ds), "d{} {} {}", i + 1, dc.d[i], d[i]);
            }
            for i in 0..7 {
                assert!(close(dc.c[i], cc[i], cs), "c{} {} {}", i + 1, dc.c[i], cc[i]);
            }
        }
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let c = CanonicalCoefficients::normalized([0.5, 0.0, 0.4, 0.3, 0.5], 1.0).unwrap();
        assert!(matches!(derived_coefficients(&c), Err(Error::DegenerateChannel(_))));
        let c = CanonicalCoefficients::normalized([0.5, 0.4, 0.4, 0.3, 0.5], 0.0).unwrap();
        assert!(matches!(derived_coefficients(&c), Err(Error::DegenerateChannel(_))));
        assert!(stationary_candidates(&c, 1e-6).is_err());
    }

    #[test]
    fn quarter_turn_phase_simplifies() {
        let a4 = (1.0f64 - 0.25 - 0.25 - 0.16 - 0.09).sqrt();
        let c = CanonicalCoefficients::new([0.5, 0.5, 0.4, 0.3, a4], PI / 2.0).unwrap();
        let dc = derived_coefficients(&c).unwrap();
        assert_relative_eq!(dc.g[0], 0.4 * 0.3 * a4, max_relative = 1e-15);
        assert_relative_eq!(dc.b[0], 0.5 * dc.g[0], max_relative = 1e-15);
    }

    #[test]
    fn hand_sums() {
        let dc = DerivedCoefficients {
            a0: 0.5,
            g: [0.0; 3],
            b: [1.0, 2.0, 3.0, 4.0, 5.0],
            d: [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0],
            c: [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
        };
        // φ = 0: 2x² + 2x − 0.25 + 4
        assert_relative_eq!(quadratic_residual(&dc, 1.0, 0.0), 7.75);
        // φ = 0: 8 + 4·3 + 2·(4+5) + 7 + 9
        assert_relative_eq!(cubic_residual(&dc, 1.0, 0.0), 54.0);
        assert_eq!(k1k2(&dc, 0.0), (12.0, 5.0));
        let (k1, k2) = k1k2(&dc, PI / 2.0);
        assert_relative_eq!(k1, 2.0, epsilon = 1e-12);
        assert_relative_eq!(k2, 1.0, epsilon = 1e-12);
        assert_relative_eq!(remainder_residual(&dc, 2.0, 0.0), -19.0);
    }

    #[test]
    fn v_polynomial_matches_substitution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let c = random_general(&mut rng);
            let dc = derived_coefficients(&c).unwrap();
            let poly = v_polynomial(&dc);
            let [b1, b2, b3, b4, b5] = dc.b;
            for _ in 0..20 {
                let phi: f64 = rng.gen_range(0.05..(PI - 0.05)) + if rng.gen_bool(0.5) { PI } else { 0.0 };
                let (k1, k2) = k1k2(&dc, phi);
                let direct = 2.0 * b1 * k2 * k2
                    + (b2 * phi.cos() + b3 * phi.sin()) * k2 * k1
                    + (-c.a0().powi(2) * b1 + b4 * (2.0 * phi).cos() + b5 * (2.0 * phi).sin()) * k1 * k1;
                let via_v = poly.eval(phi.cos() / phi.sin()) * phi.sin().powi(6);
                let scale = poly.norm() + direct.abs();
                assert!((direct - via_v).abs() <= 1e-10 * scale, "{direct} {via_v}");
            }
        }
    }

    #[test]
    fn real_roots_of_known_polynomials() {
        // (V−1)(V+2)(V−3)(V²+1)
        let p: VPolynomial<f64> = VPolynomial { coefficients: vec![6.0, -5.0, 4.0, -4.0, -2.0, 1.0, 0.0] };
        let r = p.real_roots();
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-2.0, 1.0, 3.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
            assert!(p.eval(*got).abs() < 1e-9 * p.norm());
        }
        let p = VPolynomial { coefficients: vec![-2.0, 1.0, 1e-300] };
        assert_eq!(p.real_roots(), vec![2.0]);
        assert!(VPolynomial { coefficients: vec![1.0, 0.0, 1.0] }.real_roots().is_empty());
    }

    #[test]
    fn roots_of_v_polynomial_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let c = random_general(&mut rng);
            let p = v_polynomial(&derived_coefficients(&c).unwrap());
            for v in p.real_roots() {
                assert!(p.eval(v).abs() < 1e-9 * p.norm() * (1.0 + v.abs()).powi(6));
            }
        }
    }

    #[test]
    fn candidates_are_stationary() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut total = 0;
        for _ in 0..30 {
            let c = random_general(&mut rng);
            for cand in stationary_candidates(&c, 1e-6).unwrap() {
                total += 1;
                let (gt, gp) = r_gradient(&c, cand.basis.theta(), cand.basis.phi());
                assert!(gt.abs() < 1e-5 && gp.abs() < 1e-5);
                let (p, q) = pq_at(&c, cand.basis.theta(), cand.basis.phi()).unwrap();
                assert!(p > 0.0 && q > 0.0);
                assert!((cand.r_value - (p.sqrt() + q.sqrt())).abs() < 1e-12);
                assert!(cand.basis.phi().sin().abs() > 1e-12);
            }
        }
        assert!(total > 0);
    }
}
