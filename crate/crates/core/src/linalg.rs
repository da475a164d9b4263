//! Dense complex operators and state vectors tagged with their Fock space.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::report::ResidualSplit;
use crate::space::FockSpace;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Dense `d × d` complex matrix acting on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    label: String,
    space: Arc<FockSpace>,
    matrix: CMatrix,
}

impl LinearOperator {
    pub fn new(label: impl Into<String>, space: Arc<FockSpace>, matrix: CMatrix) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, space has dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            label: label.into(),
            space,
            matrix,
        })
    }

    /// Builds from a closure over `(row, col)` state pairs.
    pub fn from_fn(
        label: impl Into<String>,
        space: &Arc<FockSpace>,
        mut f: impl FnMut((usize, usize), (usize, usize)) -> C64,
    ) -> Self {
        let d = space.dim();
        let matrix = CMatrix::from_fn(d, d, |i, j| f(space.state(i), space.state(j)));
        Self {
            label: label.into(),
            space: Arc::clone(space),
            matrix,
        }
    }

    pub fn zeros(label: impl Into<String>, space: &Arc<FockSpace>) -> Self {
        let d = space.dim();
        Self {
            label: label.into(),
            space: Arc::clone(space),
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn identity(space: &Arc<FockSpace>) -> Self {
        let d = space.dim();
        Self {
            label: "I".into(),
            space: Arc::clone(space),
            matrix: CMatrix::identity(d, d),
        }
    }

    /// Diagonal operator `f(n1, n2)`.
    pub fn diagonal(
        label: impl Into<String>,
        space: &Arc<FockSpace>,
        f: impl Fn(usize, usize) -> C64,
    ) -> Self {
        let diag = CVector::from_iterator(space.dim(), space.states().iter().map(|&(a, b)| f(a, b)));
        Self {
            label: label.into(),
            space: Arc::clone(space),
            matrix: CMatrix::from_diagonal(&diag),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same space, new matrix.
    pub fn with_matrix(&self, label: impl Into<String>, matrix: CMatrix) -> Self {
        assert_eq!(matrix.shape(), self.matrix.shape());
        Self {
            label: label.into(),
            space: Arc::clone(&self.space),
            matrix,
        }
    }

    pub fn dagger(&self) -> Self {
        self.with_matrix(format!("({})^dagger", self.label), self.matrix.adjoint())
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        self.with_matrix(
            format!("{} {}", self.label, rhs.label),
            &self.matrix * &rhs.matrix,
        )
    }

    /// `[self, rhs]`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.with_matrix(
            format!("[{}, {}]", self.label, rhs.label),
            commutator(&self.matrix, &rhs.matrix),
        )
    }

    /// Matrix element `⟨row| A |col⟩` addressed by occupation numbers.
    pub fn element(&self, row: (usize, usize), col: (usize, usize)) -> Option<C64> {
        let i = self.space.index_of(row.0, row.1)?;
        let j = self.space.index_of(col.0, col.1)?;
        Some(self.matrix[(i, j)])
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        StateVector {
            label: format!("{} {}", self.label, v.label),
            space: Arc::clone(&self.space),
            amps: &self.matrix * &v.amps,
        }
    }

    /// Max-abs distance to another matrix, split by whether the entry touches
    /// the boundary shell.
    pub fn residual_split(&self, expected: &CMatrix) -> ResidualSplit {
        split_residual(&self.space, &(&self.matrix - expected))
    }

    /// `max |A A† − I|` and `max |A† A − I|`, whichever is larger.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim();
        let id = CMatrix::identity(d, d);
        let a = max_abs(&(&self.matrix * self.matrix.adjoint() - &id));
        let b = max_abs(&(self.matrix.adjoint() * &self.matrix - &id));
        a.max(b)
    }
}

/// Complex amplitude vector over a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    label: String,
    space: Arc<FockSpace>,
    amps: CVector,
}

impl StateVector {
    pub fn new(label: impl Into<String>, space: Arc<FockSpace>, amps: CVector) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector has length {}, space has dimension {}",
                amps.len(),
                space.dim()
            )));
        }
        Ok(Self {
            label: label.into(),
            space,
            amps,
        })
    }

    pub fn zeros(label: impl Into<String>, space: &Arc<FockSpace>) -> Self {
        Self {
            label: label.into(),
            space: Arc::clone(space),
            amps: CVector::zeros(space.dim()),
        }
    }

    /// `|n1, n2⟩`.
    pub fn basis(space: &Arc<FockSpace>, n1: usize, n2: usize) -> Option<Self> {
        let j = space.index_of(n1, n2)?;
        let mut v = Self::zeros(format!("|{n1},{n2}>"), space);
        v.amps[j] = C64::new(1.0, 0.0);
        Some(v)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn amps(&self) -> &CVector {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut CVector {
        &mut self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitude `⟨n1, n2|ψ⟩`.
    pub fn amplitude(&self, n1: usize, n2: usize) -> Option<C64> {
        self.space.index_of(n1, n2).map(|j| self.amps[j])
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.amps - &other.amps).norm()
    }

    /// Dyad `|self⟩⟨self|`.
    pub fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Splits `max |R_ij|` into entries whose row and column both lie strictly
/// inside the shell and entries touching it.
pub fn split_residual(space: &FockSpace, r: &CMatrix) -> ResidualSplit {
    let mut split = ResidualSplit::default();
    for j in 0..r.ncols() {
        for i in 0..r.nrows() {
            let v = r[(i, j)].norm();
            if space.on_shell(i) || space.on_shell(j) {
                split.shell = split.shell.max(v);
            } else {
                split.interior = split.interior.max(v);
            }
        }
    }
    split
}

/// `e^{iθ}`.
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    m.singular_values().max()
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let d = (a - b).rem_euclid(tau);
    d.min(tau - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_checked_on_construction() {
        let space = Arc::new(FockSpace::finite(1));
        assert!(LinearOperator::new("x", Arc::clone(&space), CMatrix::zeros(2, 2)).is_err());
        assert!(StateVector::new("v", space, CVector::zeros(4)).is_err());
    }

    #[test]
    fn residual_split_separates_shell() {
        let space = FockSpace::finite(1);
        let mut r = CMatrix::zeros(3, 3);
        r[(0, 0)] = real(1e-3);
        r[(1, 2)] = real(2.0);
        let s = split_residual(&space, &r);
        assert_eq!(s.interior, 1e-3);
        assert_eq!(s.shell, 2.0);
    }

    #[test]
    fn angle_distance_wraps() {
        let tau = std::f64::consts::TAU;
        assert!(angle_distance(0.1, tau - 0.1) - 0.2 < 1e-15);
        assert!(angle_distance(3.0, -3.0) < 0.3);
    }
}
