//! The deformation parameter κ and its regime.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regime selected by the sign of κ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Regime {
    /// κ = -1/k: finite Fock space `n1 + n2 ≤ k`.
    NegativeFinite { k: usize },
    Zero,
    Positive,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::NegativeFinite { k } => write!(f, "kappa = -1/{k}"),
            Regime::Zero => write!(f, "kappa = 0"),
            Regime::Positive => write!(f, "kappa > 0"),
        }
    }
}

/// κ, its regime, the representation phase φ and the window size σ (κ ≥ 0).
///
/// Fields are private so that the regime always agrees with κ. For the
/// negative regime κ is stored as `-1/k` computed from the integer `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaSpec {
    kappa: f64,
    regime: Regime,
    phi: f64,
    sigma: Option<usize>,
}

impl KappaSpec {
    /// κ = -1/k. `k = 0` is accepted as the one-dimensional fixture; its κ is
    /// stored as `-inf` and never enters a formula with a nonzero weight.
    pub fn negative(k: usize, phi: f64) -> Self {
        let kappa = if k == 0 {
            f64::NEG_INFINITY
        } else {
            -1.0 / k as f64
        };
        Self {
            kappa,
            regime: Regime::NegativeFinite { k },
            phi,
            sigma: None,
        }
    }

    /// κ ≥ 0 realized on the window `n1 + n2 ≤ sigma`.
    pub fn non_negative(kappa: f64, sigma: usize, phi: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::NonFiniteKappa(kappa));
        }
        if kappa < 0.0 {
            return Err(Error::RequiresNonNegativeKappa { kappa });
        }
        if sigma == 0 {
            return Err(Error::MissingSigma);
        }
        let regime = if kappa == 0.0 {
            Regime::Zero
        } else {
            Regime::Positive
        };
        Ok(Self {
            kappa,
            regime,
            phi,
            sigma: Some(sigma),
        })
    }

    /// Classifies a raw κ. Negative values must satisfy `-1/κ ∈ ℕ*` up to a
    /// relative 1e-9 rounding slack; the stored κ is then rebuilt exactly.
    pub fn from_kappa(kappa: f64, sigma: Option<usize>, phi: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::NonFiniteKappa(kappa));
        }
        if kappa < 0.0 {
            let inv = -1.0 / kappa;
            let k = inv.round();
            if k < 1.0 || (inv - k).abs() > 1e-9 * k {
                return Err(Error::NonIntegerInverseKappa { kappa });
            }
            return Ok(Self::negative(k as usize, phi));
        }
        Self::non_negative(kappa, sigma.ok_or(Error::MissingSigma)?, phi)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn sigma(&self) -> Option<usize> {
        self.sigma
    }

    /// Same κ and σ with a different φ.
    pub fn with_phi(&self, phi: f64) -> Self {
        Self { phi, ..*self }
    }

    /// Same κ and φ with a different window size. No effect for κ < 0.
    pub fn with_sigma(&self, sigma: usize) -> Self {
        match self.regime {
            Regime::NegativeFinite { .. } => *self,
            _ => Self {
                sigma: Some(sigma),
                ..*self
            },
        }
    }

    /// `k` for the negative regime.
    pub fn k(&self) -> Option<usize> {
        match self.regime {
            Regime::NegativeFinite { k } => Some(k),
            _ => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self.regime, Regime::NegativeFinite { .. })
    }

    /// Largest `n1 + n2` in the realized space: `k` for κ < 0, σ otherwise.
    pub fn shell(&self) -> usize {
        match self.regime {
            Regime::NegativeFinite { k } => k,
            _ => self.sigma.expect("sigma is set for kappa >= 0"),
        }
    }

    /// `k`, or an error naming the regime for κ ≥ 0.
    pub fn require_negative(&self) -> Result<usize> {
        self.k().ok_or_else(|| Error::RequiresNegativeKappa {
            regime: self.regime.to_string(),
        })
    }

    /// Energy `H(n1, n2) = n[1 + κ(n - 1)]` with `n = n1 + n2`.
    pub fn energy(&self, n1: usize, n2: usize) -> f64 {
        energy(n1, n2, self.kappa)
    }
}

/// `H(n1, n2) = (n1 + n2)[1 + κ(n1 + n2 - 1)]`.
pub fn energy(n1: usize, n2: usize, kappa: f64) -> f64 {
    let n = (n1 + n2) as f64;
    if n == 0.0 {
        return 0.0;
    }
    n * (1.0 + kappa * (n - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_kappa_accepts_inverse_integers() {
        let s = KappaSpec::from_kappa(-1.0 / 3.0, None, 0.2).unwrap();
        assert_eq!(s.regime(), Regime::NegativeFinite { k: 3 });
        assert_eq!(s.kappa(), -1.0 / 3.0);
        assert_eq!(s.shell(), 3);
    }

    #[test]
    fn from_kappa_rejects_non_integer_inverse() {
        let err = KappaSpec::from_kappa(-0.4, None, 0.0).unwrap_err();
        assert!(matches!(err, Error::NonIntegerInverseKappa { .. }));
        assert!(KappaSpec::from_kappa(-3.0, None, 0.0).is_err());
    }

    #[test]
    fn non_negative_requires_sigma() {
        assert!(matches!(
            KappaSpec::from_kappa(0.5, None, 0.0),
            Err(Error::MissingSigma)
        ));
        let s = KappaSpec::from_kappa(0.0, Some(4), 0.0).unwrap();
        assert_eq!(s.regime(), Regime::Zero);
        assert_eq!(s.shell(), 4);
    }

    #[test]
    fn energy_levels() {
        assert_eq!(energy(2, 2, 0.0), 4.0);
        assert_eq!(energy(1, 0, -1.0), 1.0);
        assert_eq!(energy(0, 0, f64::NEG_INFINITY), 0.0);
        // λ_n at the shell of k = 2: 2·(1 - 1/2) = 1
        assert!((energy(1, 1, -0.5) - 1.0).abs() < 1e-15);
    }
}
