//! Truncated two-mode Fock space with the Φ_j linear ordering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kappa::KappaSpec;

/// Orthonormal basis `{|n1, n2⟩ : n1 + n2 ≤ bound}`.
///
/// States are ordered with `n2 = l` as the outer loop and `n1 = n` as the inner
/// loop, so `|n, l⟩` sits at index `l(2·bound − l + 3)/2 + n`. With this order
/// `Ed` is a cyclic shift and each `A_l` block is a contiguous index range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockSpace {
    bound: usize,
    windowed: bool,
    states: Vec<(usize, usize)>,
}

impl FockSpace {
    /// Finite space of the κ < 0 representation (`bound = k`).
    pub fn finite(k: usize) -> Self {
        Self::with_bound(k, false)
    }

    /// Window `n1 + n2 ≤ σ` of the infinite κ ≥ 0 representation.
    pub fn window(sigma: usize) -> Self {
        Self::with_bound(sigma, true)
    }

    fn with_bound(bound: usize, windowed: bool) -> Self {
        let states = (0..=bound)
            .flat_map(|l| (0..=bound - l).map(move |n| (n, l)))
            .collect();
        Self {
            bound,
            windowed,
            states,
        }
    }

    /// Space for `spec`: `n1 + n2 ≤ k` for κ < 0, the σ window otherwise.
    pub fn build(spec: &KappaSpec) -> Self {
        match spec.k() {
            Some(k) => Self::finite(k),
            None => Self::window(spec.shell()),
        }
    }

    /// Rebuilds a space from an explicit basis listing, checking that it is
    /// the canonical Φ_j order for some bound.
    pub fn from_basis(states: &[(usize, usize)], windowed: bool) -> Result<Self> {
        let dim = states.len();
        let bound = (0..)
            .find(|&b| dimension(b) >= dim)
            .expect("dimension grows without bound");
        let space = Self::with_bound(bound, windowed);
        if space.states != states {
            return Err(Error::Schema {
                path: "$.basis".into(),
                message: format!(
                    "basis of length {dim} is not the canonical ordering of n1+n2 <= {bound}"
                ),
            });
        }
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// `k` or σ.
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn is_window(&self) -> bool {
        self.windowed
    }

    pub fn states(&self) -> &[(usize, usize)] {
        &self.states
    }

    pub fn state(&self, j: usize) -> (usize, usize) {
        self.states[j]
    }

    /// Φ index of `|n1, n2⟩`, if the state lies in the space.
    pub fn index_of(&self, n1: usize, n2: usize) -> Option<usize> {
        (n1 + n2 <= self.bound).then(|| phi_index(self.bound, n1, n2))
    }

    /// True when `n1 + n2` equals the bound.
    pub fn on_shell(&self, j: usize) -> bool {
        let (n1, n2) = self.states[j];
        n1 + n2 == self.bound
    }

    /// Indices of the boundary shell `n1 + n2 = bound`.
    pub fn shell_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.on_shell(j)).collect()
    }
}

/// `(b+1)(b+2)/2`.
pub fn dimension(bound: usize) -> usize {
    (bound + 1) * (bound + 2) / 2
}

/// `Φ_{l(2b − l + 3)/2 + n} = |n, l⟩`.
pub fn phi_index(bound: usize, n: usize, l: usize) -> usize {
    l * (2 * bound + 3 - l) / 2 + n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_match_lattice_count() {
        for (k, d) in [(0, 1), (1, 3), (2, 6), (3, 10)] {
            assert_eq!(FockSpace::finite(k).dim(), d);
            let brute = (0..=k)
                .flat_map(|a| (0..=k).map(move |b| (a, b)))
                .filter(|(a, b)| a + b <= k)
                .count();
            assert_eq!(brute, d);
        }
    }

    #[test]
    fn index_and_states_are_inverse() {
        let space = FockSpace::finite(6);
        for (j, &(n1, n2)) in space.states().iter().enumerate() {
            assert_eq!(space.index_of(n1, n2), Some(j));
        }
        assert_eq!(space.index_of(4, 3), None);
    }

    #[test]
    fn ordering_puts_n2_outermost() {
        let space = FockSpace::finite(1);
        assert_eq!(space.states(), &[(0, 0), (1, 0), (0, 1)]);
        let space = FockSpace::finite(2);
        assert_eq!(space.state(3), (0, 1));
        assert_eq!(space.state(5), (0, 2));
    }

    #[test]
    fn from_basis_round_trip_and_rejection() {
        let space = FockSpace::finite(3);
        assert_eq!(FockSpace::from_basis(space.states(), false).unwrap(), space);
        let mut bad = space.states().to_vec();
        bad.swap(0, 1);
        assert!(FockSpace::from_basis(&bad, false).is_err());
        assert!(FockSpace::from_basis(&bad[..4], false).is_err());
    }
}
