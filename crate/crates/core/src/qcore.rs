//! Small exact complex linear algebra for few-qubit pure states.
//!
//! Amplitude index bit `k`, counted from the most significant bit, belongs to
//! qubit `k` (particle `k + 1`), so index 0 is `|00…0⟩`.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::{Error, Real, Result};

const MAX_QUBITS: usize = 5;

/// Normalized pure state of up to five qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    amps: Vec<Complex<T>>,
    qubits: usize,
}

impl<T: Real> PureState<T> {
    /// Wraps amplitudes that are already normalized (within `1e-12`).
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self> {
        let qubits = qubit_count(amps.len())?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm_sqr: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::InvalidState(format!(
                "squared norm {} differs from 1",
                norm_sqr
            )));
        }
        Ok(Self { amps, qubits })
    }

    /// Computational basis state `|index⟩` on `qubits` qubits.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        if index >= dim || qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::IndexOutOfRange { index, qubits });
        }
        let mut amps = vec![Complex::zero(); dim];
        amps[index] = Complex::one();
        Ok(Self { amps, qubits })
    }

    pub fn from_real(amps: &[T]) -> Result<Self> {
        normalize(amps.iter().map(|&a| Complex::new(a, T::zero())).collect())
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// Same ray with the first nonzero amplitude made real and nonnegative.
    pub fn with_canonical_phase(&self) -> Self {
        let threshold = T::tol(1e-14);
        let mut amps = self.amps.clone();
        if let Some(lead) = amps.iter().find(|a| a.norm() > threshold).copied() {
            let phase = lead.conj() / lead.norm();
            amps.iter_mut().for_each(|a| *a = *a * phase);
        }
        Self {
            amps,
            qubits: self.qubits,
        }
    }

    /// Tensor product `self ⊗ other`, `self` on the more significant qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let qubits = self.qubits + other.qubits;
        if qubits > MAX_QUBITS {
            return Err(Error::InvalidState(format!("{qubits} qubits exceeds the limit")));
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|&a| other.amps.iter().map(move |&b| a * b))
            .collect();
        Ok(Self { amps, qubits })
    }

    /// Reorders qubits: qubit `k` of the result is qubit `order[k]` of `self`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<Self> {
        let n = self.qubits;
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::DimensionMismatch {
                left: order.len(),
                right: n,
            });
        }
        for &q in order {
            if q >= n || seen[q] {
                return Err(Error::IndexOutOfRange { index: q, qubits: n });
            }
            seen[q] = true;
        }
        let mut amps = vec![Complex::zero(); self.dim()];
        for (new_index, amp) in amps.iter_mut().enumerate() {
            let mut old_index = 0;
            for (k, &src) in order.iter().enumerate() {
                let bit = (new_index >> (n - 1 - k)) & 1;
                old_index |= bit << (n - 1 - src);
            }
            *amp = self.amps[old_index];
        }
        Ok(Self { amps, qubits: n })
    }
}

fn qubit_count(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() || len > (1 << MAX_QUBITS) {
        return Err(Error::InvalidState(format!(
            "length {len} is not 2^n for 1 <= n <= {MAX_QUBITS}"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

pub(crate) fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

pub(crate) fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
}

/// Scales `v` to unit norm.
pub fn normalize<T: Real>(v: Vec<Complex<T>>) -> Result<PureState<T>> {
    let qubits = qubit_count(v.len())?;
    let n = norm(&v);
    if !n.is_finite() || n <= T::lit(1e-14) {
        return Err(Error::ZeroVector(n.to_f64_lossy()));
    }
    let amps = v.into_iter().map(|a| a / n).collect();
    Ok(PureState { amps, qubits })
}

/// `|⟨a|b⟩|²`.
pub fn fidelity<T: Real>(a: &PureState<T>, b: &PureState<T>) -> Result<T> {
    Ok(a.inner(b)?.norm_sqr().min(T::one()))
}

/// 2×2 complex matrix, row-major.
pub type Mat2<T> = [[Complex<T>; 2]; 2];

pub(crate) fn mat2_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[Complex::zero(); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn mat2_apply<T: Real>(m: &Mat2<T>, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub(crate) fn mat2_dagger<T: Real>(m: &Mat2<T>) -> Mat2<T> {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

/// Single-qubit unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalUnitary<T: Real> {
    m: Mat2<T>,
}

impl<T: Real> LocalUnitary<T> {
    /// Checks `U·U† = 1` entrywise within `1e-12`.
    pub fn new(m: Mat2<T>) -> Result<Self> {
        let prod = mat2_mul(&m, &mat2_dagger(&m));
        let mut dev = T::zero();
        for (i, row) in prod.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                let target = if i == j { T::one() } else { T::zero() };
                dev = dev.max((e - Complex::new(target, T::zero())).norm());
            }
        }
        if !(dev <= T::tol(1e-12)) {
            return Err(Error::NotUnitary(dev.to_f64_lossy()));
        }
        Ok(Self { m })
    }

    /// Unitary whose columns are the orthonormal vectors `c0`, `c1`.
    pub fn from_columns(c0: [Complex<T>; 2], c1: [Complex<T>; 2]) -> Result<Self> {
        Self::new([[c0[0], c1[0]], [c0[1], c1[1]]])
    }

    pub(crate) fn from_matrix_unchecked(m: Mat2<T>) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex::one(), Complex::zero());
        Self { m: [[o, z], [z, o]] }
    }

    pub fn pauli_x() -> Self {
        let (o, z) = (Complex::one(), Complex::zero());
        Self { m: [[z, o], [o, z]] }
    }

    pub fn pauli_z() -> Self {
        let (o, z) = (Complex::one(), Complex::zero());
        Self { m: [[o, z], [z, -o]] }
    }

    pub fn hadamard() -> Self {
        let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        Self { m: [[h, h], [h, -h]] }
    }

    /// `diag(1, e^{iβ})`.
    pub fn phase(beta: T) -> Self {
        let (o, z) = (Complex::one(), Complex::zero());
        Self {
            m: [[o, z], [z, Complex::from_polar(T::one(), beta)]],
        }
    }

    /// General SU(2)-style rotation from three angles, used for random local unitaries.
    pub fn from_angles(alpha: T, beta: T, gamma: T, delta: T) -> Self {
        // e^{iα} Rz(β) Ry(γ) Rz(δ)
        let half = T::lit(0.5);
        let (c, s) = ((gamma * half).cos(), (gamma * half).sin());
        let e = |x: T| Complex::from_polar(T::one(), x);
        let m = [
            [
                e(alpha - (beta + delta) * half) * c,
                -e(alpha - (beta - delta) * half) * s,
            ],
            [
                e(alpha + (beta - delta) * half) * s,
                e(alpha + (beta + delta) * half) * c,
            ],
        ];
        Self { m }
    }

    pub fn matrix(&self) -> &Mat2<T> {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.m[row][col]
    }

    pub fn column(&self, col: usize) -> [Complex<T>; 2] {
        [self.m[0][col], self.m[1][col]]
    }

    pub fn dagger(&self) -> Self {
        Self {
            m: mat2_dagger(&self.m),
        }
    }

    /// Matrix product `self · rhs`.
    pub fn then_after(&self, rhs: &Self) -> Self {
        Self {
            m: mat2_mul(&self.m, &rhs.m),
        }
    }

    pub fn apply(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        mat2_apply(&self.m, v)
    }
}

/// Applies `u` to qubit `qubit` (0 = most significant) of a raw amplitude vector.
pub(crate) fn apply_local_raw<T: Real>(amps: &mut [Complex<T>], qubit: usize, u: &Mat2<T>) {
    let n = amps.len().trailing_zeros() as usize;
    let stride = 1usize << (n - 1 - qubit);
    for i in 0..amps.len() {
        if i & stride == 0 {
            let j = i | stride;
            let [x, y] = mat2_apply(u, [amps[i], amps[j]]);
            amps[i] = x;
            amps[j] = y;
        }
    }
}

pub fn apply_local_unitary<T: Real>(
    s: &PureState<T>,
    qubit: usize,
    u: &LocalUnitary<T>,
) -> Result<PureState<T>> {
    if qubit >= s.qubits {
        return Err(Error::IndexOutOfRange {
            index: qubit,
            qubits: s.qubits,
        });
    }
    let mut amps = s.amps.clone();
    apply_local_raw(&mut amps, qubit, &u.m);
    Ok(PureState {
        amps,
        qubits: s.qubits,
    })
}

/// Schmidt decomposition of a two-qubit state.
///
/// `(basis_a ⊗ basis_b)(√λ_large|00⟩ + √λ_small|11⟩)` reproduces the state:
/// column 0 of each basis carries the larger coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtPair<T: Real> {
    pub lambda_small: T,
    pub lambda_large: T,
    pub basis_a: LocalUnitary<T>,
    pub basis_b: LocalUnitary<T>,
}

impl<T: Real> SchmidtPair<T> {
    pub fn reconstruct(&self) -> Vec<Complex<T>> {
        let (l, s) = (self.lambda_large.sqrt(), self.lambda_small.sqrt());
        let (ua, ub) = (self.basis_a.m, self.basis_b.m);
        let mut out = vec![Complex::zero(); 4];
        for i in 0..2 {
            for j in 0..2 {
                out[2 * i + j] = ua[i][0] * ub[j][0] * l + ua[i][1] * ub[j][1] * s;
            }
        }
        out
    }
}

/// Eigen-decomposition of the Hermitian matrix `[[a, b], [b*, d]]`.
///
/// Returns `(λ_large, λ_small, v_large)` with `v_large` normalized and its
/// first nonzero component real nonnegative. Degenerate spectra resolve to
/// `|0⟩` when `a ≥ d`.
pub(crate) fn hermitian_eig2<T: Real>(a: T, b: Complex<T>, d: T) -> (T, T, [Complex<T>; 2]) {
    let half = T::lit(0.5);
    let mean = (a + d) * half;
    let gap = ((a - d) * half).hypot(b.norm());
    let (large, small) = (mean + gap, mean - gap);
    let zero = Complex::zero();
    let one = Complex::one();
    if b.norm() <= T::epsilon() * (a.abs() + d.abs()) {
        let v = if a >= d { [one, zero] } else { [zero, one] };
        return (large, small, v);
    }
    // Two algebraically equivalent eigenvectors; keep the better conditioned one.
    let v1 = [b, Complex::new(large - a, T::zero())];
    let v2 = [Complex::new(large - d, T::zero()), b.conj()];
    let (n1, n2) = (norm(&v1), norm(&v2));
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    let mut v = [v[0] / n, v[1] / n];
    let lead = if v[0].norm() > T::epsilon() { v[0] } else { v[1] };
    let phase = lead.conj() / lead.norm();
    v = [v[0] * phase, v[1] * phase];
    (large, small, v)
}

/// Singular value decomposition `M = U · diag(σ_large, σ_small) · Vᵀ` of a 2×2 matrix.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Svd2<T: Real> {
    pub sigma_large: T,
    pub sigma_small: T,
    pub u: LocalUnitary<T>,
    pub v: LocalUnitary<T>,
}

pub(crate) fn svd2<T: Real>(m: &Mat2<T>) -> Svd2<T> {
    let a = m[0][0].norm_sqr() + m[0][1].norm_sqr();
    let d = m[1][0].norm_sqr() + m[1][1].norm_sqr();
    let b = m[0][0] * m[1][0].conj() + m[0][1] * m[1][1].conj();
    let (_, _, u_large) = hermitian_eig2(a, b, d);
    let u_small = [-u_large[1].conj(), u_large[0].conj()];
    // Mᵀ ū = σ v for each left singular vector u.
    let project = |u: [Complex<T>; 2]| {
        [
            m[0][0] * u[0].conj() + m[1][0] * u[1].conj(),
            m[0][1] * u[0].conj() + m[1][1] * u[1].conj(),
        ]
    };
    let w_large = project(u_large);
    let sigma_large = norm(&w_large);
    let one = Complex::one();
    let zero = Complex::zero();
    let v_large = if sigma_large > T::min_positive_value().sqrt() {
        [w_large[0] / sigma_large, w_large[1] / sigma_large]
    } else {
        [one, zero]
    };
    let v_perp = [-v_large[1].conj(), v_large[0].conj()];
    let gamma = inner(&v_perp, &project(u_small));
    let sigma_small = gamma.norm();
    let v_small = if sigma_small > T::zero() {
        let ph = gamma / sigma_small;
        [v_perp[0] * ph, v_perp[1] * ph]
    } else {
        v_perp
    };
    Svd2 {
        sigma_large,
        sigma_small,
        u: LocalUnitary::from_matrix_unchecked([
            [u_large[0], u_small[0]],
            [u_large[1], u_small[1]],
        ]),
        v: LocalUnitary::from_matrix_unchecked([
            [v_large[0], v_small[0]],
            [v_large[1], v_small[1]],
        ]),
    }
}

fn two_qubit_matrix<T: Real>(s: &PureState<T>) -> Result<Mat2<T>> {
    if s.qubits != 2 {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: 4,
        });
    }
    let a = &s.amps;
    Ok([[a[0], a[1]], [a[2], a[3]]])
}

pub fn schmidt_two_qubit<T: Real>(s: &PureState<T>) -> Result<SchmidtPair<T>> {
    let svd = svd2(&two_qubit_matrix(s)?);
    let (l, sm) = (svd.sigma_large.powi(2), svd.sigma_small.powi(2));
    let total = l + sm;
    Ok(SchmidtPair {
        lambda_small: sm / total,
        lambda_large: l / total,
        basis_a: svd.u,
        basis_b: svd.v,
    })
}

/// `C = 2|t₀₀t₁₁ − t₀₁t₁₀|`.
pub fn concurrence_two_qubit<T: Real>(s: &PureState<T>) -> Result<T> {
    let m = two_qubit_matrix(s)?;
    let c = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm() * T::lit(2.0);
    Ok(c.min(T::one()))
}
