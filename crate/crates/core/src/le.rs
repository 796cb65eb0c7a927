//! Localizable entanglement between particles 2 and 3: the largest average
//! concurrence `p₁C₁ + p₂C₂` reachable by measuring particle 1.

use rayon::prelude::*;

use crate::canonical::CanonicalCoefficients;
use crate::channel::{concurrence_sum_at, MeasurementBasis};
use crate::optimizer::compass_minimize;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeReport<T: Real> {
    pub analytic: T,
    pub numeric: T,
    pub argmax: MeasurementBasis<T>,
}

/// `2√(a₂²a₃² − 2a₁a₂a₃a₄cos μ + (a₀² + a₁²)a₄²)`.
pub fn le_analytic<T: Real>(c: &CanonicalCoefficients<T>) -> Result<T> {
    let (a0, a1, a2, a3, a4) = (c.a0(), c.a1(), c.a2(), c.a3(), c.a4());
    let radicand = a2 * a2 * a3 * a3 - T::lit(2.0) * a1 * a2 * a3 * a4 * c.mu().cos() + (a0 * a0 + a1 * a1) * a4 * a4;
    if radicand < -T::tol(1e-12) {
        return Err(Error::InternalInconsistency(format!("negative radicand {radicand}")));
    }
    Ok((T::lit(2.0) * radicand.max(T::zero()).sqrt()).min(T::one()))
}

const LE_STARTS: usize = 4;

/// Grid maximum of `n₁ + n₂`, polished by compass ascent from the best few points.
pub fn le_numeric<T: Real>(c: &CanonicalCoefficients<T>, nt: usize, np: usize) -> (T, MeasurementBasis<T>) {
    let (nt, np) = (nt.max(2), np.max(2));
    let angle = |k: usize| {
        let (i, j) = (k / np, k % np);
        (
            T::PI() * T::lit(i as f64) / T::lit((nt - 1) as f64),
            T::TAU() * T::lit(j as f64) / T::lit(np as f64),
        )
    };
    let values: Vec<T> = (0..nt * np)
        .into_par_iter()
        .map(|k| {
            let (t, p) = angle(k);
            concurrence_sum_at(c, t, p)
        })
        .collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&x, &y| {
        values[y]
            .partial_cmp(&values[x])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.cmp(&y))
    });
    let mut best_v = T::neg_infinity();
    let mut best_b = MeasurementBasis::wrapped(T::zero(), T::zero());
    for &k in order.iter().take(LE_STARTS) {
        let (t, p) = angle(k);
        let (b, v) = compass_minimize(|t, p| -concurrence_sum_at(c, t, p), MeasurementBasis::wrapped(t, p), T::lit(1e-10));
        let v = -v;
        if v > best_v {
            best_v = v;
            best_b = b;
        }
    }
    (best_v.min(T::one()), best_b)
}

pub fn le_report<T: Real>(c: &CanonicalCoefficients<T>, nt: usize, np: usize) -> Result<LeReport<T>> {
    let analytic = le_analytic(c)?;
    let (numeric, argmax) = le_numeric(c, nt, np);
    Ok(LeReport { analytic, numeric, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn coeffs(a: [f64; 5], mu: f64) -> CanonicalCoefficients<f64> {
        CanonicalCoefficients::new(a, mu).unwrap()
    }

    #[test]
    fn analytic_examples() {
        let ghz = coeffs([FRAC_1_SQRT_2, 0.0, 0.0, 0.0, FRAC_1_SQRT_2], 0.0);
        assert_abs_diff_eq!(le_analytic(&ghz).unwrap(), 1.0, epsilon = 1e-12);
        let t = 1.0 / 3f64.sqrt();
        let w = coeffs([t, 0.0, t, t, 0.0], 0.0);
        assert_abs_diff_eq!(le_analytic(&w).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        let prod = coeffs([1.0, 0.0, 0.0, 0.0, 0.0], 0.0);
        assert_eq!(le_analytic(&prod).unwrap(), 0.0);
        let g = coeffs([0.6, 0.0, 0.0, 0.0, 0.8], 0.0);
        assert_abs_diff_eq!(le_analytic(&g).unwrap(), 0.96, epsilon = 1e-12);
    }

    #[test]
    fn numeric_examples() {
        let ghz = coeffs([FRAC_1_SQRT_2, 0.0, 0.0, 0.0, FRAC_1_SQRT_2], 0.0);
        let (v, b) = le_numeric(&ghz, 65, 128);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.theta(), PI / 2.0, epsilon = 1e-4);

        let t = 1.0 / 3f64.sqrt();
        let w = coeffs([t, 0.0, t, t, 0.0], 0.0);
        assert_abs_diff_eq!(le_numeric(&w, 65, 128).0, 2.0 / 3.0, epsilon = 1e-12);

        let g = coeffs([0.6, 0.0, 0.0, 0.0, 0.8], 0.0);
        let (v, b) = le_numeric(&g, 65, 128);
        assert_abs_diff_eq!(v, 0.96, epsilon = 1e-9);
        assert_abs_diff_eq!(b.theta(), PI / 2.0, epsilon = 1e-4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn ghz_family_is_two_a0_a4(a0 in 0.01f64..0.99) {
            let a4 = (1.0 - a0 * a0).sqrt();
            let c = coeffs([a0, 0.0, 0.0, 0.0, a4], 0.0);
            prop_assert!((le_analytic(&c).unwrap() - 2.0 * a0 * a4).abs() < 1e-12);
        }

        #[test]
        fn analytic_matches_numeric(a in prop::array::uniform5(0.0f64..1.0), mu in 0.0..PI) {
            if let Ok(c) = CanonicalCoefficients::normalized(a, mu) {
                let e = le_analytic(&c).unwrap();
                let (n, _) = le_numeric(&c, 65, 128);
                prop_assert!((0.0..=1.0).contains(&e));
                prop_assert!((e - n).abs() <= 1e-4, "{} vs {}", e, n);
            }
        }
    }
}
