//! Runs every module check for one configuration and merges the results.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::{check_algebra, lie_closure};
use crate::kappa::KappaSpec;
use crate::mub::{build_mub_set, Route};
use crate::phase_ops::check_phase_operators;
use crate::phase_states::{check_phase_states, qutrit_cross_check};
use crate::report::{CheckEntry, VerificationReport};
use crate::space::FockSpace;
use crate::truncated::{check_window, Window};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub spec: KappaSpec,
    pub tolerance: f64,
    pub seed: u64,
    /// Window used for the κ ≥ 0 part of `run_all` when `spec` has κ < 0.
    pub sigma: usize,
    /// κ used for that window.
    pub truncated_kappa: f64,
    /// Dimensions for the MUB part of `run_all`.
    pub mub_dims: Vec<usize>,
}

impl RunConfig {
    pub fn new(spec: KappaSpec) -> Self {
        Self {
            spec,
            tolerance: crate::DEFAULT_TOLERANCE,
            seed: 0,
            sigma: spec.sigma().unwrap_or(8),
            truncated_kappa: 0.5,
            mub_dims: vec![2, 3, 5],
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Defining relations plus Lie closure.
pub fn verify_representation(spec: &KappaSpec, tol: f64) -> Result<VerificationReport> {
    let space = Arc::new(FockSpace::build(spec));
    let mut report = check_algebra(spec, &space, tol)?;
    if spec.kappa() != 0.0 && spec.k() != Some(0) {
        let c = lie_closure(spec)?;
        report.push(
            CheckEntry::full("Lie closure of the 8 generators", c.max_residual, tol).with_note(format!(
                "{} pairs, worst [{}, {}]",
                c.pairs_checked, c.worst_pair.0, c.worst_pair.1
            )),
        );
    }
    Ok(report)
}

pub fn verify_phase_operators(spec: &KappaSpec, tol: f64) -> Result<VerificationReport> {
    let space = Arc::new(FockSpace::build(spec));
    check_phase_operators(spec, &space, tol)
}

/// Phase-state checks with a random evolution time and second phase.
pub fn verify_phase_states(spec: &KappaSpec, tol: f64, rng: &mut impl Rng) -> Result<VerificationReport> {
    let space = Arc::new(FockSpace::build(spec));
    let t = rng.random_range(-PI..PI);
    let phi2 = rng.random_range(-PI..PI);
    let mut report = check_phase_states(spec, &space, t, phi2, tol)?;
    if spec.k() == Some(1) {
        report.push(CheckEntry::full(
            "qutrit operators match closed-form dyads",
            qutrit_cross_check(spec.phi())?,
            tol,
        ));
    }
    Ok(report)
}

pub fn verify_truncated(spec: &KappaSpec, tol: f64) -> Result<VerificationReport> {
    check_window(spec, &Window::for_spec(spec)?, tol)
}

/// Certificate of one MUB set as report entries. For composite `N` the
/// unbiasedness entry is a negative control.
pub fn verify_mub(n: usize, route: Route, tol: f64) -> Result<VerificationReport> {
    let set = build_mub_set(n, route, tol)?;
    let c = &set.certificate;
    let mut report = VerificationReport::new();
    report.push(CheckEntry::full(format!("N={n} bases orthonormal"), c.orthonormality, tol));
    report.push(CheckEntry::full(format!("N={n} overlaps = S(u,v,w)/N"), c.gauss_deviation, tol));
    report.push(CheckEntry::full(
        format!("N={n} {route} route = closed form"),
        c.route_deviation,
        tol,
    ));
    if c.prime {
        report.push(CheckEntry::full(
            format!("N={n} cross overlaps have modulus 1/sqrt(N)"),
            c.max_deviation,
            tol,
        ));
    } else {
        report.push(
            CheckEntry::expect_failure(format!("N={n} composite: some pairs biased"), c.max_deviation, tol)
                .with_note(format!("{} failing pairs", c.failing_pairs.len())),
        );
    }
    Ok(report)
}

/// Every check that applies to `config.spec`, plus a κ ≥ 0 window and MUB
/// sets when the spec is in the finite regime.
pub fn run_all(config: &RunConfig) -> Result<VerificationReport> {
    let tol = config.tolerance;
    let spec = &config.spec;
    let mut rng = config.rng();
    let mut report = VerificationReport::new();
    report.extend_prefixed("rep", verify_representation(spec, tol)?);
    if spec.is_negative() {
        if spec.k() != Some(0) {
            report.extend_prefixed("phase-ops", verify_phase_operators(spec, tol)?);
            report.extend_prefixed("phase-states", verify_phase_states(spec, tol, &mut rng)?);
        }
        let window_spec = KappaSpec::non_negative(config.truncated_kappa, config.sigma, spec.phi())?;
        report.extend_prefixed("truncated", verify_truncated(&window_spec, tol)?);
    } else {
        report.extend_prefixed("truncated", verify_truncated(spec, tol)?);
    }
    for &n in &config.mub_dims {
        for route in [Route::E1, Route::E3] {
            report.extend_prefixed("mub", verify_mub(n, route, tol)?);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_all_k3() {
        let mut cfg = RunConfig::new(KappaSpec::negative(3, 0.5));
        cfg.sigma = 4;
        let r = run_all(&cfg).unwrap();
        assert!(r.len() >= 20);
        assert!(r.overall, "{r}");
    }

    #[test]
    fn run_all_non_negative() {
        let cfg = RunConfig::new(KappaSpec::non_negative(1.0, 3, 0.2).unwrap());
        let r = run_all(&cfg).unwrap();
        assert!(r.overall, "{r}");
    }

    #[test]
    fn seed_determines_report() {
        let mut cfg = RunConfig::new(KappaSpec::negative(2, 0.1));
        cfg.sigma = 2;
        cfg.seed = 99;
        let a = serde_json::to_string(&run_all(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_all(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn composite_mub_is_negative_control() {
        let r = verify_mub(4, Route::E1, 1e-10).unwrap();
        assert!(r.overall, "{r}");
    }
}
