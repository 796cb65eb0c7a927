//! State files: `{"amplitudes": [[re, im]; 8]}` or
//! `{"canonical": {"a": [a0, .., a4], "mu": m}}`, with optional `"controller"`.

use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use teleport_core::qcore::normalize;
use teleport_core::{canonical_state, canonicalize, CanonicalCoefficients, CanonicalForm, Complex, PureState};

/// Largest accepted deviation of the norm from one.
pub const NORM_REJECT: f64 = 1e-6;
/// Deviations above this are reported on stderr before renormalizing.
pub const NORM_WARN: f64 = 1e-10;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    amplitudes: Option<Vec<[f64; 2]>>,
    canonical: Option<RawCanonical>,
    controller: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCanonical {
    a: [f64; 5],
    mu: f64,
}

#[derive(Debug, Clone)]
pub enum StateSource {
    Amplitudes(PureState),
    Canonical(CanonicalCoefficients),
}

#[derive(Debug, Clone)]
pub struct StateInput {
    pub source: StateSource,
    /// 1-based particle index.
    pub controller: usize,
}

fn check_norm(norm: f64, what: &str) -> Result<()> {
    let dev = (norm - 1.0).abs();
    if !norm.is_finite() || dev > NORM_REJECT {
        bail!("{what} have norm {norm}, expected 1 within {NORM_REJECT:e}");
    }
    if dev > NORM_WARN {
        eprintln!("warning: {what} have norm {norm}; renormalizing");
    }
    Ok(())
}

pub fn parse(text: &str) -> Result<StateInput> {
    let raw: RawInput = serde_json::from_str(text).context("malformed state file")?;
    let controller = raw.controller.unwrap_or(1);
    if !(1..=3).contains(&controller) {
        bail!("controller must be 1, 2 or 3, got {controller}");
    }
    let source = match (raw.amplitudes, raw.canonical) {
        (Some(amps), None) => {
            if amps.len() != 8 {
                bail!("expected 8 amplitudes, got {}", amps.len());
            }
            let v: Vec<Complex> = amps.iter().map(|&[re, im]| Complex::new(re, im)).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            check_norm(norm, "amplitudes")?;
            StateSource::Amplitudes(normalize(v)?)
        }
        (None, Some(c)) => {
            let norm = c.a.iter().map(|v| v * v).sum::<f64>().sqrt();
            check_norm(norm, "canonical coefficients")?;
            StateSource::Canonical(CanonicalCoefficients::normalized(c.a, c.mu)?)
        }
        (Some(_), Some(_)) => bail!("give either \"amplitudes\" or \"canonical\", not both"),
        (None, None) => bail!("missing \"amplitudes\" or \"canonical\""),
    };
    Ok(StateInput { source, controller })
}

pub fn read(path: &Path) -> Result<StateInput> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse(&text)
}

/// Qubit order placing `controller` first; the other two keep their order.
pub fn controller_order(controller: usize) -> [usize; 3] {
    match controller {
        2 => [1, 0, 2],
        3 => [2, 0, 1],
        _ => [0, 1, 2],
    }
}

impl StateInput {
    /// The state with the controller relabeled as particle 1.
    pub fn state(&self) -> Result<PureState> {
        let s = match &self.source {
            StateSource::Amplitudes(s) => s.clone(),
            StateSource::Canonical(c) => canonical_state(c),
        };
        Ok(s.permute_qubits(&controller_order(self.controller))?)
    }

    pub fn canonical_form(&self) -> Result<CanonicalForm> {
        Ok(canonicalize(&self.state()?)?)
    }

    /// Canonical coefficients, taken verbatim when given for controller 1.
    pub fn coefficients(&self) -> Result<CanonicalCoefficients> {
        match (&self.source, self.controller) {
            (StateSource::Canonical(c), 1) => Ok(*c),
            _ => Ok(self.canonical_form()?.coeffs),
        }
    }
}
