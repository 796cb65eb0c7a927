//! Five-term generalized Schmidt form of three-qubit pure states:
//!
//! `a₀|000⟩ + a₁e^{iμ}|100⟩ + a₂|101⟩ + a₃|110⟩ + a₄|111⟩`, `aᵢ ≥ 0`, `μ ∈ [0, π]`.
//!
//! Construction: pick a unitary row on particle 1 that makes the `|0⟩₁` slice
//! singular (a root of `det(z·T₀ + T₁) = 0`), rotate particles 2 and 3 so that
//! slice collapses onto `|00⟩`, then spend the remaining diagonal phases on
//! making `a₂, a₃, a₄` real. The quadratic has two roots; for generic states
//! exactly one of them leaves `μ` in `[0, π]`.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::qcore::{apply_local_raw, hermitian_eig2, svd2, LocalUnitary, PureState};
use crate::{Error, Real, Result};

/// Amplitudes below this are treated as zero when deciding which phases are free.
const PHASE_FREE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalCoefficients<T: Real> {
    a: [T; 5],
    mu: T,
}

impl<T: Real> CanonicalCoefficients<T> {
    /// Validates `Σaᵢ² = 1` (within `1e-10`), `aᵢ ≥ 0` and `μ ∈ [0, π]`.
    /// Negatives above `-1e-12` are clamped to zero.
    pub fn new(a: [T; 5], mu: T) -> Result<Self> {
        let clamp = T::tol(1e-12);
        let mut out = a;
        for (i, v) in out.iter_mut().enumerate() {
            if !v.is_finite() || *v < -clamp {
                return Err(Error::InvalidCoefficients(format!("a{i} = {v} is negative")));
            }
            *v = v.max(T::zero());
        }
        let sum: T = out.iter().map(|v| *v * *v).sum();
        if (sum - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::InvalidCoefficients(format!("sum of squares is {sum}")));
        }
        if !mu.is_finite() || mu < -clamp || mu > T::PI() + clamp {
            return Err(Error::InvalidCoefficients(format!("mu = {mu} outside [0, pi]")));
        }
        Ok(Self {
            a: out,
            mu: mu.max(T::zero()).min(T::PI()),
        })
    }

    /// Like [`new`](Self::new) but rescales `a` to unit norm first.
    pub fn normalized(a: [T; 5], mu: T) -> Result<Self> {
        let n = a.iter().map(|v| *v * *v).sum::<T>().sqrt();
        if !(n > T::zero()) {
            return Err(Error::InvalidCoefficients("all coefficients vanish".into()));
        }
        Self::new(a.map(|v| v / n), mu)
    }

    pub fn a(&self) -> &[T; 5] {
        &self.a
    }

    pub fn a0(&self) -> T {
        self.a[0]
    }
    pub fn a1(&self) -> T {
        self.a[1]
    }
    pub fn a2(&self) -> T {
        self.a[2]
    }
    pub fn a3(&self) -> T {
        self.a[3]
    }
    pub fn a4(&self) -> T {
        self.a[4]
    }
    pub fn mu(&self) -> T {
        self.mu
    }

    /// `a₁a₄e^{iμ} − a₂a₃`, the combination every concurrence numerator shares.
    pub fn k(&self) -> Complex<T> {
        Complex::from_polar(self.a[1] * self.a[4], self.mu)
            - Complex::new(self.a[2] * self.a[3], T::zero())
    }

    /// The form's amplitude vector, indices `000 … 111`.
    pub fn amplitudes(&self) -> [Complex<T>; 8] {
        let z = Complex::zero();
        let r = |x: T| Complex::new(x, T::zero());
        [
            r(self.a[0]),
            z,
            z,
            z,
            Complex::from_polar(self.a[1], self.mu),
            r(self.a[2]),
            r(self.a[3]),
            r(self.a[4]),
        ]
    }
}

/// The state `a₀|000⟩ + a₁e^{iμ}|100⟩ + a₂|101⟩ + a₃|110⟩ + a₄|111⟩`.
pub fn canonical_state<T: Real>(c: &CanonicalCoefficients<T>) -> PureState<T> {
    let amps = c.amplitudes();
    // Coefficients are unit-norm within 1e-10; rescale so the state meets 1e-12.
    let n = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
    PureState::new(amps.iter().map(|a| a / n).collect()).expect("validated coefficients")
}

/// Canonical coefficients together with the local frame that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm<T: Real> {
    pub coeffs: CanonicalCoefficients<T>,
    /// One unitary per particle; `global_phase·(u₁⊗u₂⊗u₃)` maps the canonical
    /// state back to the input.
    pub unitaries: [LocalUnitary<T>; 3],
    pub global_phase: Complex<T>,
}

pub fn reconstruct<T: Real>(f: &CanonicalForm<T>) -> PureState<T> {
    let mut amps: Vec<Complex<T>> = canonical_state(&f.coeffs).into_amplitudes();
    for (q, u) in f.unitaries.iter().enumerate() {
        apply_local_raw(&mut amps, q, u.matrix());
    }
    amps.iter_mut().for_each(|a| *a = *a * f.global_phase);
    let n = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
    PureState::new(amps.into_iter().map(|a| a / n).collect()).expect("unitary image of a normalized state")
}

/// One decomposition candidate, kept for verbose reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalCandidate<T: Real> {
    pub form: CanonicalForm<T>,
    /// `μ` as constructed, before clamping into `[0, π]`.
    pub raw_mu: T,
    /// Whether `raw_mu` already lies in `[0, π]`.
    pub valid: bool,
}

/// Canonical form of a three-qubit state. Deterministic for identical input.
pub fn canonicalize<T: Real>(s: &PureState<T>) -> Result<CanonicalForm<T>> {
    let candidates = canonical_candidates(s)?;
    select(candidates)
}

/// Every decomposition the construction produces, one per root of the slice
/// quadratic (one when the roots coincide or the quadratic vanishes).
pub fn canonical_candidates<T: Real>(s: &PureState<T>) -> Result<Vec<CanonicalCandidate<T>>> {
    if s.qubits() != 3 {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: 8,
        });
    }
    let psi: [Complex<T>; 8] = s.amplitudes().try_into().expect("8 amplitudes");
    let rows = slice_rows(&psi);
    let mut out: Vec<CanonicalCandidate<T>> = rows.iter().map(|r| from_row(&psi, *r, None)).collect();
    if !out.iter().any(|c| c.valid) {
        // Near-degenerate numerics: spend the phase of the smallest of a2..a4.
        out = rows
            .iter()
            .map(|r| {
                let probe = from_row(&psi, *r, None);
                let a = probe.form.coeffs.a;
                let smallest = (2..5)
                    .min_by(|&i, &j| a[i].partial_cmp(&a[j]).expect("finite"))
                    .expect("nonempty");
                from_row(&psi, *r, Some(smallest))
            })
            .collect();
    }
    Ok(out)
}

fn select<T: Real>(candidates: Vec<CanonicalCandidate<T>>) -> Result<CanonicalForm<T>> {
    let tie = T::tol(1e-12);
    candidates
        .into_iter()
        .reduce(|best, c| if prefer(&c, &best, tie) { c } else { best })
        .map(|c| c.form)
        .ok_or_else(|| Error::InternalInconsistency("no canonical candidate".into()))
}

/// Whether `c` should replace `best`: valid μ, then larger a0, smaller μ, a2 ≥ a3.
fn prefer<T: Real>(c: &CanonicalCandidate<T>, best: &CanonicalCandidate<T>, tie: T) -> bool {
    if c.valid != best.valid {
        return c.valid;
    }
    let (x, y) = (&c.form.coeffs, &best.form.coeffs);
    if (x.a0() - y.a0()).abs() > tie {
        return x.a0() > y.a0();
    }
    if (x.mu() - y.mu()).abs() > tie {
        return x.mu() < y.mu();
    }
    x.a2() >= x.a3() && y.a2() < y.a3()
}

/// Unit rows `(r₀, r₁)` on particle 1 with `det(r₀T₀ + r₁T₁) = 0`.
fn slice_rows<T: Real>(psi: &[Complex<T>; 8]) -> Vec<[Complex<T>; 2]> {
    let t0 = [psi[0], psi[1], psi[2], psi[3]];
    let t1 = [psi[4], psi[5], psi[6], psi[7]];
    let det = |m: &[Complex<T>; 4]| m[0] * m[3] - m[1] * m[2];
    let qa = det(&t0);
    let qc = det(&t1);
    let qb = t0[0] * t1[3] + t1[0] * t0[3] - t0[1] * t1[2] - t1[1] * t0[2];
    let scale = qa.norm().max(qb.norm()).max(qc.norm());
    let one = Complex::one();
    let zero = Complex::zero();

    if scale <= T::lit(1e-13) {
        // Every row is a root; keep the one maximizing a0.
        return vec![dominant_row(psi)];
    }
    let tiny = T::epsilon() * scale;
    let mut rows = Vec::with_capacity(2);
    if qa.norm() >= qc.norm() {
        if qa.norm() <= tiny {
            rows.push([zero, one]);
            rows.push([one, zero]);
        } else {
            for z in quadratic_roots(qa, qb, qc) {
                let z = polish(qa, qb, qc, z);
                rows.push([z, one]);
            }
        }
    } else {
        for w in quadratic_roots(qc, qb, qa) {
            let w = polish(qc, qb, qa, w);
            rows.push([one, w]);
        }
    }
    for r in rows.iter_mut() {
        let n = (r[0].norm_sqr() + r[1].norm_sqr()).sqrt();
        *r = [r[0] / n, r[1] / n];
    }
    if rows.len() == 2 {
        let overlap = (rows[0][0].conj() * rows[1][0] + rows[0][1].conj() * rows[1][1]).norm();
        if overlap >= T::one() - T::tol(1e-14) {
            rows.truncate(1);
        }
    }
    rows
}

/// Roots of `a z² + b z + c` with `a ≠ 0`, computed without cancellation.
fn quadratic_roots<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> [Complex<T>; 2] {
    let disc = (b * b - a * c * T::lit(4.0)).sqrt();
    let sign = if (b.conj() * disc).re >= T::zero() { T::one() } else { -T::one() };
    let q = -(b + disc * sign) * T::lit(0.5);
    if q.norm() == T::zero() {
        return [Complex::zero(), Complex::zero()];
    }
    [q / a, c / q]
}

fn polish<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, mut z: Complex<T>) -> Complex<T> {
    for _ in 0..2 {
        let f = a * z * z + b * z + c;
        let df = a * z * T::lit(2.0) + b;
        if df.norm() <= T::epsilon() * (a.norm() + b.norm()) {
            break;
        }
        let step = f / df;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z = z - step;
    }
    z
}

/// Row `r` maximizing `‖r₀T₀ + r₁T₁‖`: conjugate of the top eigenvector of `M M†`.
fn dominant_row<T: Real>(psi: &[Complex<T>; 8]) -> [Complex<T>; 2] {
    let a = psi[..4].iter().map(|x| x.norm_sqr()).sum::<T>();
    let d = psi[4..].iter().map(|x| x.norm_sqr()).sum::<T>();
    let b = (0..4).fold(Complex::zero(), |acc, k| acc + psi[k] * psi[4 + k].conj());
    let (_, _, v) = hermitian_eig2(a, b, d);
    [v[0].conj(), v[1].conj()]
}

fn from_row<T: Real>(
    psi: &[Complex<T>; 8],
    row: [Complex<T>; 2],
    force_free: Option<usize>,
) -> CanonicalCandidate<T> {
    let w1 = [[row[0], row[1]], [-row[1].conj(), row[0].conj()]];
    let mut amps = psi.to_vec();
    apply_local_raw(&mut amps, 0, &w1);

    let slice = |amps: &[Complex<T>], base: usize| [[amps[base], amps[base + 1]], [amps[base + 2], amps[base + 3]]];
    let top = slice(&amps, 0);
    let top_norm = top.iter().flatten().map(|x| x.norm_sqr()).sum::<T>().sqrt();
    // Rotate particles 2 and 3 onto the singular vectors of the top slice, or of
    // the bottom slice when the top one vanishes (1|23 product states).
    let svd = if top_norm > T::lit(1e-14) { svd2(&top) } else { svd2(&slice(&amps, 4)) };
    let w2 = *svd.u.dagger().matrix();
    let w3 = *svd.v.dagger().matrix();
    apply_local_raw(&mut amps, 1, &w2);
    apply_local_raw(&mut amps, 2, &w3);

    let [b1, b2, b3] = phase_choice(&amps, force_free);
    let p1 = *LocalUnitary::phase(b1).matrix();
    let p2 = *LocalUnitary::phase(b2).matrix();
    let p3 = *LocalUnitary::phase(b3).matrix();
    apply_local_raw(&mut amps, 0, &p1);
    apply_local_raw(&mut amps, 1, &p2);
    apply_local_raw(&mut amps, 2, &p3);

    // Global phase: make the 000 amplitude real nonnegative.
    let lead = amps[0];
    let global = if lead.norm() > T::tol(1e-14) { lead / lead.norm() } else { Complex::one() };
    amps.iter_mut().for_each(|x| *x = *x * global.conj());

    let free = T::lit(PHASE_FREE_TOL);
    let idx = [0usize, 4, 5, 6, 7];
    let mut a = idx.map(|i| amps[i].norm());
    let norm = a.iter().map(|v| *v * *v).sum::<T>().sqrt();
    a.iter_mut().for_each(|v| *v = *v / norm);
    let raw_mu = if a[1] > free { amps[4].arg() } else { T::zero() };
    let edge = T::tol(1e-12);
    let valid = raw_mu >= -edge;
    let mu = if raw_mu <= -T::PI() + edge {
        T::PI()
    } else {
        raw_mu.max(T::zero()).min(T::PI())
    };
    let valid = valid || raw_mu <= -T::PI() + edge;
    let coeffs = CanonicalCoefficients::new(a, mu).expect("unit-norm construction");

    let total = |w: &[[Complex<T>; 2]; 2], p: &[[Complex<T>; 2]; 2]| {
        LocalUnitary::from_matrix_unchecked(*p).then_after(&LocalUnitary::from_matrix_unchecked(*w))
    };
    let unitaries = [
        total(&w1, &p1).dagger(),
        total(&w2, &p2).dagger(),
        total(&w3, &p3).dagger(),
    ];
    CanonicalCandidate {
        form: CanonicalForm {
            coeffs,
            unitaries,
            global_phase: global,
        },
        raw_mu,
        valid,
    }
}

/// Phases `(β₁, β₂, β₃)` for `diag(1, e^{iβₖ})` on each particle that make the
/// 101, 110, 111 amplitudes real nonnegative. When one of them (or the 100
/// amplitude) vanishes the spare phase sets `μ = 0`.
fn phase_choice<T: Real>(amps: &[Complex<T>], force_free: Option<usize>) -> [T; 3] {
    let free = T::lit(PHASE_FREE_TOL);
    let z = [amps[4], amps[5], amps[6], amps[7]];
    let known = |k: usize| z[k].norm() > free && force_free != Some(k + 1);
    let (k2, k3, k4) = (known(1), known(2), known(3));
    let ph = |k: usize| z[k].arg();
    if k2 && k3 && k4 {
        // β₁+β₃ = −φ₂, β₁+β₂ = −φ₃, β₁+β₂+β₃ = −φ₄
        let b1 = ph(3) - ph(1) - ph(2);
        let b2 = -ph(3) + ph(1);
        let b3 = -ph(3) + ph(2);
        return [b1, b2, b3];
    }
    let b1 = if z[0].norm() > free { -ph(0) } else { T::zero() };
    let mut b2 = None;
    let mut b3 = None;
    if k2 {
        b3 = Some(-ph(1) - b1);
    }
    if k3 {
        b2 = Some(-ph(2) - b1);
    }
    if k4 {
        let target = -ph(3) - b1;
        match (b2, b3) {
            (Some(x), None) => b3 = Some(target - x),
            (None, Some(y)) => b2 = Some(target - y),
            (None, None) => b2 = Some(target),
            (Some(_), Some(_)) => unreachable!("all three known handled above"),
        }
    }
    [b1, b2.unwrap_or(T::zero()), b3.unwrap_or(T::zero())]
}
