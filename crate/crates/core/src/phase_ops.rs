//! Partitions of the finite Fock space and the unitary phase operators
//! `E1d`, `E2d`, `E3d` (block-cyclic) and `Ed` (one global d-cycle).
//!
//! Every operator is assembled from its action on basis states. The polar
//! decompositions `a_i^- = E_id √F_i` are verified afterwards, never used to
//! build the operators, since `√F_i` is singular.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{sqrt_f3, structure_function, Mode, Representation, Sign};
use crate::kappa::KappaSpec;
use crate::linalg::{angle_distance, cis, max_abs, real, CMatrix, LinearOperator, StateVector, C64};
use crate::report::{CheckEntry, VerificationReport};
use crate::space::FockSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartitionKind {
    /// `A_l = span{|n, l⟩ : n = 0..k−l}`
    A,
    /// `B_l = span{|l, n⟩ : n = 0..k−l}`
    B,
    /// `C_l = span{|l−n, n⟩ : n = 0..l}`
    C,
}

/// Direct-sum decomposition of the finite space into `k + 1` blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub kind: PartitionKind,
    /// `blocks[l]` lists the Φ indices of block `l` in its natural `n` order.
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Block of index `j`.
    pub fn block_of(&self, j: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&j))
    }

    /// Projector onto block `l`.
    pub fn projector(&self, space: &Arc<FockSpace>, l: usize) -> CMatrix {
        let d = space.dim();
        let mut p = CMatrix::zeros(d, d);
        for &j in &self.blocks[l] {
            p[(j, j)] = real(1.0);
        }
        p
    }
}

/// State `n` of block `l` for each partition kind.
pub fn block_state(kind: PartitionKind, k: usize, l: usize, n: usize) -> (usize, usize) {
    debug_assert!(l <= k);
    match kind {
        PartitionKind::A => (n, l),
        PartitionKind::B => (l, n),
        PartitionKind::C => (l - n, n),
    }
}

/// Number of states in block `l`.
pub fn block_len(kind: PartitionKind, k: usize, l: usize) -> usize {
    match kind {
        PartitionKind::A | PartitionKind::B => k - l + 1,
        PartitionKind::C => l + 1,
    }
}

pub fn build_partition(space: &FockSpace, kind: PartitionKind) -> Result<Partition> {
    if space.is_window() {
        return Err(Error::RequiresNegativeKappa {
            regime: format!("window sigma = {}", space.bound()),
        });
    }
    let k = space.bound();
    let blocks = (0..=k)
        .map(|l| {
            (0..block_len(kind, k, l))
                .map(|n| {
                    let (a, b) = block_state(kind, k, l, n);
                    space.index_of(a, b).expect("block state lies in the space")
                })
                .collect()
        })
        .collect();
    Ok(Partition { kind, blocks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseFamily {
    E1d,
    E2d,
    E3d,
    Ed,
}

impl PhaseFamily {
    pub fn partition_kind(self) -> Option<PartitionKind> {
        match self {
            PhaseFamily::E1d => Some(PartitionKind::A),
            PhaseFamily::E2d => Some(PartitionKind::B),
            PhaseFamily::E3d => Some(PartitionKind::C),
            PhaseFamily::Ed => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PhaseFamily::E1d => "E1d",
            PhaseFamily::E2d => "E2d",
            PhaseFamily::E3d => "E3d",
            PhaseFamily::Ed => "Ed",
        }
    }
}

/// A unitary phase operator with its block components when it has them.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOperator {
    pub op: LinearOperator,
    pub family: PhaseFamily,
    /// `E_id(l)` as full `d × d` matrices, zero outside block `l`.
    pub block_ops: Option<Vec<LinearOperator>>,
    pub partition: Option<Partition>,
}

impl PhaseOperator {
    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn block(&self, l: usize) -> Option<&LinearOperator> {
        self.block_ops.as_ref()?.get(l)
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.op.unitarity_residual()
    }
}

/// Block-cyclic operator: within block `l`, state `n` goes to `n − 1` and
/// state 0 wraps to the last state, with phase `phase(source, target)`.
fn block_cyclic(
    spec: &KappaSpec,
    space: &Arc<FockSpace>,
    family: PhaseFamily,
    phase: impl Fn((usize, usize), (usize, usize)) -> C64,
) -> Result<PhaseOperator> {
    let k = spec.require_negative()?;
    let kind = family.partition_kind().expect("block family");
    let partition = build_partition(space, kind)?;
    let d = space.dim();
    let mut blocks = Vec::with_capacity(k + 1);
    let mut total = CMatrix::zeros(d, d);
    for (l, idx) in partition.blocks.iter().enumerate() {
        let len = idx.len();
        let mut m = CMatrix::zeros(d, d);
        for n in 0..len {
            let to = if n == 0 { len - 1 } else { n - 1 };
            let src = block_state(kind, k, l, n);
            let tgt = block_state(kind, k, l, to);
            m[(idx[to], idx[n])] = phase(src, tgt);
        }
        total += &m;
        blocks.push(LinearOperator::new(
            format!("{}({l})", family.name()),
            Arc::clone(space),
            m,
        )?);
    }
    Ok(PhaseOperator {
        op: LinearOperator::new(family.name(), Arc::clone(space), total)?,
        family,
        block_ops: Some(blocks),
        partition: Some(partition),
    })
}

/// `E1d|n1,n2⟩ = e^{i[H(n1,n2) − H(n1−1,n2)]φ}|n1−1,n2⟩` for `n1 ≠ 0` and
/// `E1d|0,n2⟩ = e^{i[H(0,n2) − H(k−n2,n2)]φ}|k−n2,n2⟩`.
pub fn build_e1d(spec: &KappaSpec, space: &Arc<FockSpace>) -> Result<PhaseOperator> {
    block_cyclic(spec, space, PhaseFamily::E1d, |src, tgt| {
        cis((spec.energy(src.0, src.1) - spec.energy(tgt.0, tgt.1)) * spec.phi())
    })
}

/// Mode-2 analogue of [`build_e1d`] on the `B` partition.
pub fn build_e2d(spec: &KappaSpec, space: &Arc<FockSpace>) -> Result<PhaseOperator> {
    block_cyclic(spec, space, PhaseFamily::E2d, |src, tgt| {
        cis((spec.energy(src.0, src.1) - spec.energy(tgt.0, tgt.1)) * spec.phi())
    })
}

/// `E3d(l)|l−n,n⟩ = |l−n+1,n−1⟩` for `n ≠ 0`, `E3d(l)|l,0⟩ = |0,l⟩`. No φ phases.
pub fn build_e3d(spec: &KappaSpec, space: &Arc<FockSpace>) -> Result<PhaseOperator> {
    block_cyclic(spec, space, PhaseFamily::E3d, |_, _| real(1.0))
}

/// Global cyclic operator: `|n,l⟩ → |n−1,l⟩` inside a block, `|0,l⟩ →
/// |k−l+1,l−1⟩` between blocks and `|0,0⟩ → |0,k⟩`, each with phase
/// `e^{i[H(source) − H(target)]φ}`. In Φ order this is `Φ_j → Φ_{j−1}` with
/// `Φ_0 → Φ_{d−1}`.
pub fn build_ed(spec: &KappaSpec, space: &Arc<FockSpace>) -> Result<PhaseOperator> {
    let k = spec.require_negative()?;
    if space.is_window() {
        return Err(Error::RequiresNegativeKappa {
            regime: format!("window sigma = {}", space.bound()),
        });
    }
    let d = space.dim();
    let mut m = CMatrix::zeros(d, d);
    for (j, &(n, l)) in space.states().iter().enumerate() {
        let tgt = match (n, l) {
            (0, 0) => (0, k),
            (0, l) => (k - l + 1, l - 1),
            (n, l) => (n - 1, l),
        };
        let i = space.index_of(tgt.0, tgt.1).expect("target lies in the space");
        m[(i, j)] = cis((spec.energy(n, l) - spec.energy(tgt.0, tgt.1)) * spec.phi());
    }
    Ok(PhaseOperator {
        op: LinearOperator::new("Ed", Arc::clone(space), m)?,
        family: PhaseFamily::Ed,
        block_ops: None,
        partition: None,
    })
}

pub fn build(family: PhaseFamily, spec: &KappaSpec, space: &Arc<FockSpace>) -> Result<PhaseOperator> {
    match family {
        PhaseFamily::E1d => build_e1d(spec, space),
        PhaseFamily::E2d => build_e2d(spec, space),
        PhaseFamily::E3d => build_e3d(spec, space),
        PhaseFamily::Ed => build_ed(spec, space),
    }
}

/// `max |a_i^- − E_id √F_i(N1,N2)|` for `i = 1, 2, 3`, with
/// `√F_3 = |κ|√((N1+1)N2)` and `a_3^- = [a_1^+, a_2^-]`.
pub fn polar_residuals(spec: &KappaSpec, space: &Arc<FockSpace>) -> Result<[f64; 3]> {
    let rep = Representation::on_space(spec, space)?;
    let kappa = spec.kappa();
    let sqrt_f = |mode: Mode| -> Result<CMatrix> {
        let diag = space
            .states()
            .iter()
            .map(|&(a, b)| structure_function(mode, a, b, kappa).map(|f| real(f.sqrt())))
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    };
    let f3 = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        space.dim(),
        space.states().iter().map(|&(a, b)| real(sqrt_f3(a, b, kappa))),
    ));
    let e1 = build_e1d(spec, space)?;
    let e2 = build_e2d(spec, space)?;
    let e3 = build_e3d(spec, space)?;
    let r1 = max_abs(&(rep.a1_minus.matrix() - e1.matrix() * sqrt_f(Mode::One)?));
    let r2 = max_abs(&(rep.a2_minus.matrix() - e2.matrix() * sqrt_f(Mode::Two)?));
    let r3 = max_abs(&(rep.ladder3(Sign::Lower).matrix() - e3.matrix() * f3));
    Ok([r1, r2, r3])
}

/// Largest entry of `E(l) E(l')†` over `l ≠ l'`, and the largest deviation of
/// `E(l) E(l)†` from the block-`l` projector.
pub fn block_orthogonality(op: &PhaseOperator) -> Option<(f64, f64)> {
    let blocks = op.block_ops.as_ref()?;
    let partition = op.partition.as_ref()?;
    let mut cross: f64 = 0.0;
    let mut diag: f64 = 0.0;
    for (l, x) in blocks.iter().enumerate() {
        for (l2, y) in blocks.iter().enumerate() {
            let p = x.matrix() * y.matrix().adjoint();
            if l == l2 {
                diag = diag.max(max_abs(&(p - partition.projector(op.op.space(), l))));
            } else {
                cross = cross.max(max_abs(&p));
            }
        }
    }
    Some((cross, diag))
}

/// True when every block component maps its block into itself.
pub fn blocks_invariant(op: &PhaseOperator) -> bool {
    let (Some(blocks), Some(partition)) = (&op.block_ops, &op.partition) else {
        return true;
    };
    blocks.iter().enumerate().all(|(l, b)| {
        let m = b.matrix();
        (0..m.nrows()).all(|i| {
            (0..m.ncols()).all(|j| {
                m[(i, j)] == C64::new(0.0, 0.0)
                    || (partition.blocks[l].contains(&i) && partition.blocks[l].contains(&j))
            })
        })
    })
}

/// Length of the orbit of `Φ_start` under repeated application of `op`,
/// tracking the single nonzero entry of a basis ray.
pub fn orbit_length(op: &PhaseOperator, start: usize) -> usize {
    let space = op.op.space();
    let d = space.dim();
    let mut seen = vec![false; d];
    let mut v = StateVector::zeros("orbit", space);
    v.amps_mut()[start] = real(1.0);
    let mut current = start;
    let mut count = 0;
    while !seen[current] {
        seen[current] = true;
        count += 1;
        v = op.op.apply(&v);
        let next = v.amps().iter().position(|z| z.norm() > 0.5);
        match next {
            Some(n) => current = n,
            None => break,
        }
    }
    count
}

/// Eigenvalues of a unitary matrix, as angles in `[0, 2π)` sorted ascending.
///
/// Uses the Hermitian pencil `Re U + c Im U` with a generic `c`: its
/// eigenvectors diagonalize `U`, and the iteration converges even for exact
/// permutation matrices where the Schur iteration stalls.
pub fn eigen_angles(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Eigen(format!("matrix is {}x{}", m.nrows(), m.ncols())));
    }
    const C: f64 = 0.618_033_988_749_894_9;
    let adj = m.adjoint();
    let re = (m + &adj).scale(0.5);
    let im = (m - &adj) * C64::new(0.0, -0.5);
    let herm = re + im.scale(C);
    let eig = herm.symmetric_eigen();
    let mut angles: Vec<f64> = eig
        .eigenvectors
        .column_iter()
        .map(|v| (v.adjoint() * m * v)[(0, 0)].arg().rem_euclid(std::f64::consts::TAU))
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// Largest wrap-aware distance between the spectrum of `Ed` and the `d`-th
/// roots of unity. Each root is matched to its nearest unused eigenvalue.
pub fn ed_spectrum_residual(ed: &PhaseOperator) -> Result<f64> {
    let d = ed.op.dim();
    let angles = eigen_angles(ed.matrix())?;
    let mut used = vec![false; d];
    let mut worst: f64 = 0.0;
    for m in 0..d {
        let root = std::f64::consts::TAU * m as f64 / d as f64;
        let (idx, dist) = angles
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, &a)| (i, angle_distance(a, root)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("as many eigenvalues as roots");
        used[idx] = true;
        worst = worst.max(dist);
    }
    Ok(worst)
}

/// Unitarity, block structure, polar decompositions and the `Ed` spectrum
/// and orbit for one `(k, φ)`.
pub fn check_phase_operators(spec: &KappaSpec, space: &Arc<FockSpace>, tol: f64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let ops = [
        build_e1d(spec, space)?,
        build_e2d(spec, space)?,
        build_e3d(spec, space)?,
        build_ed(spec, space)?,
    ];
    for op in &ops {
        report.push(CheckEntry::full(
            format!("{} unitary", op.family.name()),
            op.unitarity_residual(),
            tol,
        ));
    }
    for op in &ops[..3] {
        let (cross, diag) = block_orthogonality(op).expect("block family");
        report.push(CheckEntry::full(
            format!("{}(l) {}(l')^dagger = delta_ll' P_l", op.family.name(), op.family.name()),
            cross.max(diag),
            tol,
        ));
        report.push(CheckEntry::flag(
            format!("{}(l) leaves block l invariant", op.family.name()),
            blocks_invariant(op),
        ));
        let sum = op
            .block_ops
            .as_ref()
            .expect("block family")
            .iter()
            .fold(CMatrix::zeros(space.dim(), space.dim()), |acc, b| acc + b.matrix());
        report.push(CheckEntry::full(
            format!("{} = sum_l {}(l)", op.family.name(), op.family.name()),
            max_abs(&(sum - op.matrix())),
            tol,
        ));
    }
    let [r1, r2, r3] = polar_residuals(spec, space)?;
    report.push(CheckEntry::full("a1- = E1d sqrt(F1)", r1, tol));
    report.push(CheckEntry::full("a2- = E2d sqrt(F2)", r2, tol));
    report.push(CheckEntry::full("a3- = E3d sqrt(F3)", r3, tol));

    let ed = &ops[3];
    let d = space.dim();
    report.push(CheckEntry::full(
        "Ed spectrum = d-th roots of unity",
        ed_spectrum_residual(ed)?,
        tol.max(1e-9),
    ));
    report.push(CheckEntry::flag(
        "Ed orbit visits all d basis rays",
        (0..d).all(|j| orbit_length(ed, j) == d),
    ));
    Ok(report)
}
