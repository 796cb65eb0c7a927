//! JSON renderings of core results. Complex numbers are `[re, im]`, angles radians.

use serde_json::{json, Value};

use teleport_core::le::LeReport;
use teleport_core::simulator::{CharlieOutcome, FilterOutcome, SampleReport, BELL_LABELS};
use teleport_core::{
    CanonicalCoefficients, CanonicalForm, ChannelClassification, ChannelSplit, Complex, LocalUnitary, MeasurementBasis,
    OptimizationReport, ProtocolReport, PureState,
};

fn complex(z: Complex) -> Value {
    json!([z.re, z.im])
}

fn amplitudes(s: &PureState) -> Value {
    Value::Array(s.amplitudes().iter().map(|&z| complex(z)).collect())
}

fn unitary(u: &LocalUnitary) -> Value {
    Value::Array((0..2).map(|r| Value::Array((0..2).map(|c| complex(u.entry(r, c))).collect())).collect())
}

pub fn basis(b: &MeasurementBasis) -> Value {
    json!({ "theta": b.theta(), "phi": b.phi() })
}

pub fn coefficients(c: &CanonicalCoefficients) -> Value {
    json!({ "a": c.a(), "mu": c.mu() })
}

pub fn canonical(form: &CanonicalForm, fidelity: f64, controller: usize) -> Value {
    json!({
        "controller": controller,
        "coefficients": coefficients(&form.coeffs),
        "unitaries": form.unitaries.iter().map(unitary).collect::<Vec<_>>(),
        "global_phase": complex(form.global_phase),
        "round_trip_fidelity": fidelity,
    })
}

pub fn split(b: &MeasurementBasis, s: &ChannelSplit) -> Value {
    json!({
        "basis": basis(b),
        "p1": s.p1,
        "p2": s.p2,
        "c1": s.c1,
        "c2": s.c2,
        "lambda10": s.lambda10,
        "lambda11": s.lambda11,
        "lambda20": s.lambda20,
        "lambda21": s.lambda21,
        "P": s.big_p,
        "Q": s.big_q,
        "R": s.r,
        "p_success": s.p_success,
        "phi1": s.phi1.as_ref().map(amplitudes),
        "phi2": s.phi2.as_ref().map(amplitudes),
    })
}

pub fn optimization(c: &CanonicalCoefficients, r: &OptimizationReport) -> Value {
    json!({
        "coefficients": coefficients(c),
        "p_max": r.p_max,
        "r_min": r.r_min,
        "argmin": basis(&r.argmin),
        "degenerate_case": r.degenerate_case,
        "candidates": r.candidates.iter().map(|k| json!({
            "theta": k.basis.theta(),
            "phi": k.basis.phi(),
            "R": k.r_value,
            "provenance": k.provenance.as_str(),
        })).collect::<Vec<_>>(),
    })
}

pub fn le(c: &CanonicalCoefficients, r: &LeReport<f64>) -> Value {
    json!({
        "coefficients": coefficients(c),
        "analytic": r.analytic,
        "numeric": r.numeric,
        "argmax": basis(&r.argmax),
    })
}

pub fn classification(c: &CanonicalCoefficients, k: &ChannelClassification, tol: f64) -> Value {
    json!({
        "coefficients": coefficients(c),
        "tol": tol,
        "epr_collapsible": k.epr_collapsible,
        "perfect_ct": k.perfect_ct,
        "biseparable_1_23": k.biseparable_1_23,
        "p_zero_points": k.p_zero_points.iter().map(basis).collect::<Vec<_>>(),
    })
}

pub fn protocol(r: &ProtocolReport) -> Value {
    json!({
        "basis": basis(&r.basis),
        "p_success": r.p_success,
        "min_success_fidelity": r.min_success_fidelity,
        "branches": r.branches.iter().map(|b| json!({
            "charlie": match b.charlie_outcome { CharlieOutcome::X => "x", CharlieOutcome::XPerp => "x_perp" },
            "bell": BELL_LABELS[b.bell_outcome],
            "filter": match b.filter_outcome { FilterOutcome::Success => "success", FilterOutcome::Failure => "failure" },
            "probability": b.probability,
            "fidelity": b.output_fidelity,
        })).collect::<Vec<_>>(),
    })
}

pub fn sample(b: &MeasurementBasis, exact: f64, r: &SampleReport) -> Value {
    json!({
        "basis": basis(b),
        "shots": r.shots,
        "successes": r.successes,
        "seed": r.seed,
        "empirical_rate": r.empirical_rate,
        "exact_rate": exact,
    })
}
