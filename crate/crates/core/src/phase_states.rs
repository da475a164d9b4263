//! Eigenstates of the unitary phase operators, their overlaps, vector phase
//! states and the `k = 1` qutrit operators.
//!
//! All states come from closed-form sums. The eigenvalue equations are
//! verified, never solved.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kappa::KappaSpec;
use crate::linalg::{cis, max_abs, real, CMatrix, CVector, LinearOperator, StateVector, C64};
use crate::phase_ops::{self, block_len, block_state, PartitionKind, PhaseFamily};
use crate::report::{CheckEntry, VerificationReport};
use crate::space::{phi_index, FockSpace};

/// Which operator a phase state diagonalizes; block families carry `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", content = "l")]
pub enum StateFamily {
    E1d(usize),
    E2d(usize),
    E3d(usize),
    Ed,
}

impl StateFamily {
    pub fn operator_family(self) -> PhaseFamily {
        match self {
            StateFamily::E1d(_) => PhaseFamily::E1d,
            StateFamily::E2d(_) => PhaseFamily::E2d,
            StateFamily::E3d(_) => PhaseFamily::E3d,
            StateFamily::Ed => PhaseFamily::Ed,
        }
    }

    pub fn block(self) -> Option<usize> {
        match self {
            StateFamily::E1d(l) | StateFamily::E2d(l) | StateFamily::E3d(l) => Some(l),
            StateFamily::Ed => None,
        }
    }

    pub fn with_block(family: PhaseFamily, l: usize) -> Self {
        match family {
            PhaseFamily::E1d => StateFamily::E1d(l),
            PhaseFamily::E2d => StateFamily::E2d(l),
            PhaseFamily::E3d => StateFamily::E3d(l),
            PhaseFamily::Ed => StateFamily::Ed,
        }
    }

    /// Number of eigenstates: `k − l + 1`, `l + 1` or `d`.
    pub fn size(self, k: usize) -> usize {
        match self {
            StateFamily::E1d(l) | StateFamily::E2d(l) => k - l + 1,
            StateFamily::E3d(l) => l + 1,
            StateFamily::Ed => crate::space::dimension(k),
        }
    }

    fn kind(self) -> Option<PartitionKind> {
        self.operator_family().partition_kind()
    }
}

impl std::fmt::Display for StateFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.block() {
            Some(l) => write!(f, "{}({l})", self.operator_family().name()),
            None => f.write_str("Ed"),
        }
    }
}

/// All eigenstates of one operator (or one block) at fixed φ, indexed by `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseStateFamily {
    pub family: StateFamily,
    pub phi: f64,
    pub states: Vec<StateVector>,
}

impl PhaseStateFamily {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// State with label `m`, taken modulo the family size.
    pub fn state(&self, m: i64) -> &StateVector {
        &self.states[canonical_m(m, self.len())]
    }

    /// `θ_m = 2πm / size`.
    pub fn eigen_angle(&self, m: usize) -> f64 {
        TAU * m as f64 / self.len() as f64
    }

    /// `Σ_m |m⟩⟨m|`.
    pub fn completeness(&self) -> CMatrix {
        let d = self.states.first().map_or(0, StateVector::dim);
        self.states
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, s| acc + s.projector())
    }
}

pub fn canonical_m(m: i64, size: usize) -> usize {
    m.rem_euclid(size as i64) as usize
}

fn check_block(k: usize, l: usize) -> Result<()> {
    if l > k {
        return Err(Error::BlockOutOfRange { l, max: k });
    }
    Ok(())
}

fn require_finite(spec: &KappaSpec, space: &FockSpace) -> Result<usize> {
    let k = spec.require_negative()?;
    if space.is_window() || space.bound() != k {
        return Err(Error::DimensionMismatch(format!(
            "phase states need the finite space n1+n2 <= {k}"
        )));
    }
    Ok(k)
}

/// One state of a block family at label `m` (already canonical).
fn block_state_vector(
    spec: &KappaSpec,
    space: &Arc<FockSpace>,
    family: StateFamily,
    m: usize,
    phi: f64,
) -> StateVector {
    let k = spec.k().expect("finite regime");
    let l = family.block().expect("block family");
    let kind = family.kind().expect("block family");
    let size = block_len(kind, k, l);
    let norm = 1.0 / (size as f64).sqrt();
    let mut v = StateVector::zeros(format!("{family} m={m} phi={phi}"), space);
    for n in 0..size {
        let (a, b) = block_state(kind, k, l, n);
        // q_l^{mn} (or ω_l^{mn}) with the exponent reduced mod size before scaling
        let root = cis(TAU * ((m * n) % size) as f64 / size as f64);
        let phase = match kind {
            PartitionKind::C => cis(-spec.energy(0, l) * phi),
            _ => cis(-spec.energy(a, b) * phi),
        };
        let j = space.index_of(a, b).expect("block state lies in the space");
        v.amps_mut()[j] = phase * root * norm;
    }
    v
}

fn ed_state_vector(spec: &KappaSpec, space: &Arc<FockSpace>, m: usize, phi: f64) -> StateVector {
    let k = spec.k().expect("finite regime");
    let d = space.dim();
    let norm = 1.0 / (d as f64).sqrt();
    let mut v = StateVector::zeros(format!("Ed m={m} phi={phi}"), space);
    for (j, &(n, l)) in space.states().iter().enumerate() {
        let e = (m * phi_index(k, n, l)) % d;
        v.amps_mut()[j] = cis(TAU * e as f64 / d as f64 - spec.energy(n, l) * phi) * norm;
    }
    v
}

/// A single phase state `|family, m, φ⟩`; `m` wraps modulo the family size.
pub fn phase_state(
    spec: &KappaSpec,
    space: &Arc<FockSpace>,
    family: StateFamily,
    m: i64,
    phi: f64,
) -> Result<StateVector> {
    let k = require_finite(spec, space)?;
    if let Some(l) = family.block() {
        check_block(k, l)?;
    }
    let m = canonical_m(m, family.size(k));
    Ok(match family {
        StateFamily::Ed => ed_state_vector(spec, space, m, phi),
        _ => block_state_vector(spec, space, family, m, phi),
    })
}

pub fn phase_states(
    spec: &KappaSpec,
    space: &Arc<FockSpace>,
    family: StateFamily,
    phi: f64,
) -> Result<PhaseStateFamily> {
    let k = require_finite(spec, space)?;
    if let Some(l) = family.block() {
        check_block(k, l)?;
    }
    let states = (0..family.size(k))
        .map(|m| phase_state(spec, space, family, m as i64, phi))
        .collect::<Result<_>>()?;
    Ok(PhaseStateFamily { family, phi, states })
}

/// `|l, m, φ⟩ = (k−l+1)^{-1/2} Σ_n e^{−iH(n,l)φ} q_l^{mn} |n, l⟩`.
pub fn phase_states_e1(spec: &KappaSpec, space: &Arc<FockSpace>, l: usize, phi: f64) -> Result<PhaseStateFamily> {
    phase_states(spec, space, StateFamily::E1d(l), phi)
}

/// Mode-2 counterpart of [`phase_states_e1`] over `|l, n⟩`.
pub fn phase_states_e2(spec: &KappaSpec, space: &Arc<FockSpace>, l: usize, phi: f64) -> Result<PhaseStateFamily> {
    phase_states(spec, space, StateFamily::E2d(l), phi)
}

/// `‖l, m, φ⟩⟩ = (l+1)^{-1/2} e^{−iH(0,l)φ} Σ_n ω_l^{mn} |l−n, n⟩`.
pub fn phase_states_e3(spec: &KappaSpec, space: &Arc<FockSpace>, l: usize, phi: f64) -> Result<PhaseStateFamily> {
    phase_states(spec, space, StateFamily::E3d(l), phi)
}

/// `|m, φ⟩ = d^{-1/2} Σ_{l,n} q^{m Φ(n,l)} e^{−iH(n,l)φ} |n, l⟩`.
pub fn phase_states_ed(spec: &KappaSpec, space: &Arc<FockSpace>, phi: f64) -> Result<PhaseStateFamily> {
    phase_states(spec, space, StateFamily::Ed, phi)
}

/// `e^{−iHt}` applied to `state`.
pub fn evolve(spec: &KappaSpec, space: &Arc<FockSpace>, state: &StateVector, t: f64) -> Result<StateVector> {
    if state.dim() != space.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has length {}, space has dimension {}",
            state.dim(),
            space.dim()
        )));
    }
    let amps = CVector::from_iterator(
        space.dim(),
        space
            .states()
            .iter()
            .zip(state.amps().iter())
            .map(|(&(a, b), z)| cis(-spec.energy(a, b) * t) * z),
    );
    StateVector::new(format!("exp(-iHt) {}", state.label()), Arc::clone(space), amps)
}

/// `q^x = exp(2πi x / size)` for real `x`.
fn q_pow(x: f64, size: usize) -> C64 {
    cis(TAU * x / size as f64)
}

/// Closed-form overlap `⟨l,m,φ | l',m',φ'⟩` for a block family:
/// `δ_{ll'} (1/s) Σ_n q^{ρ}` with `ρ = −(m−m')n + s/(2π)(φ−φ')H`, where `s`
/// is the block size and `H` is evaluated on the block state `n`.
#[allow(clippy::too_many_arguments)]
pub fn overlap_rho(
    spec: &KappaSpec,
    family: PhaseFamily,
    l: usize,
    m: i64,
    phi: f64,
    l2: usize,
    m2: i64,
    phi2: f64,
) -> Result<C64> {
    let k = spec.require_negative()?;
    check_block(k, l)?;
    check_block(k, l2)?;
    let kind = family.partition_kind().ok_or_else(|| {
        Error::InvalidArgument("overlap_rho needs a block family; use overlap_tau for Ed".into())
    })?;
    if l != l2 {
        return Ok(real(0.0));
    }
    let s = block_len(kind, k, l);
    let sum: C64 = (0..s)
        .map(|n| {
            let (a, b) = block_state(kind, k, l, n);
            let rho = -((m - m2) as f64) * n as f64
                + s as f64 / TAU * (phi - phi2) * spec.energy(a, b);
            q_pow(rho, s)
        })
        .sum();
    Ok(sum / s as f64)
}

/// Closed-form `⟨m,φ | m',φ'⟩ = (1/d) Σ_{l,n} q^{τ}` with
/// `τ = (m'−m)Φ(n,l) + d/(2π)(φ−φ')H(n,l)`.
pub fn overlap_tau(spec: &KappaSpec, m: i64, phi: f64, m2: i64, phi2: f64) -> Result<C64> {
    let k = spec.require_negative()?;
    let d = crate::space::dimension(k);
    let mut sum = C64::new(0.0, 0.0);
    for l in 0..=k {
        for n in 0..=k - l {
            let tau = ((m2 - m) as f64) * phi_index(k, n, l) as f64
                + d as f64 / TAU * (phi - phi2) * spec.energy(n, l);
            sum += q_pow(tau, d);
        }
    }
    Ok(sum / d as f64)
}

/// `[l, m, φ]`: `k + 1` slots of length `d`, only slot `l` nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPhaseState {
    pub family: PhaseFamily,
    pub l: usize,
    pub m: usize,
    pub phi: f64,
    pub lines: Vec<StateVector>,
}

impl VectorPhaseState {
    pub fn nonzero_lines(&self) -> Vec<usize> {
        self.lines
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// `Σ_lines v v†`, the `d × d` contribution to the closure sum.
    pub fn projector(&self) -> CMatrix {
        let d = self.lines[0].dim();
        self.lines
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, v| acc + v.projector())
    }
}

/// Vector phase states for `E1d`, `E2d` or `E3d` at label `m`, one per
/// line `l`, built as `Σ_n e^{−iHφ} Z^n [n, l]` (or with `W` for `E3d`).
/// `m` is reduced modulo each block size.
pub fn vector_phase_states(
    spec: &KappaSpec,
    space: &Arc<FockSpace>,
    family: PhaseFamily,
    m: i64,
    phi: f64,
) -> Result<Vec<VectorPhaseState>> {
    let k = require_finite(spec, space)?;
    let kind = family.partition_kind().ok_or_else(|| {
        Error::InvalidArgument("vector phase states are defined for E1d, E2d and E3d only".into())
    })?;
    // Z = diag(q_l^m) or W = diag(ω_l^m); the exponent is reduced per line.
    let diag: Vec<C64> = (0..=k)
        .map(|l| {
            let s = block_len(kind, k, l);
            cis(TAU * canonical_m(m, s) as f64 / s as f64)
        })
        .collect();
    let mut out = Vec::with_capacity(k + 1);
    for l in 0..=k {
        let s = block_len(kind, k, l);
        let norm = 1.0 / (s as f64).sqrt();
        let mut lines: Vec<StateVector> = (0..=k)
            .map(|line| StateVector::zeros(format!("line {line}"), space))
            .collect();
        let prefactor = match kind {
            PartitionKind::C => cis(-spec.energy(l, 0) * phi),
            _ => real(1.0),
        };
        for n in 0..s {
            let (a, b) = block_state(kind, k, l, n);
            let phase = match kind {
                PartitionKind::C => prefactor,
                _ => cis(-spec.energy(a, b) * phi),
            };
            let j = space.index_of(a, b).expect("block state lies in the space");
            // Z^n [n, l] only touches line l.
            lines[l].amps_mut()[j] += phase * diag[l].powu(n as u32) * norm;
        }
        out.push(VectorPhaseState {
            family,
            l,
            m: canonical_m(m, s),
            phi,
            lines,
        });
    }
    Ok(out)
}

/// `⊕_l Σ_m [l,m,φ][l,m,φ]†` over every label of every line.
pub fn vector_closure(spec: &KappaSpec, space: &Arc<FockSpace>, family: PhaseFamily, phi: f64) -> Result<CMatrix> {
    let k = require_finite(spec, space)?;
    let kind = family
        .partition_kind()
        .ok_or_else(|| Error::InvalidArgument("vector closure needs a block family".into()))?;
    let d = space.dim();
    let max_size = (0..=k).map(|l| block_len(kind, k, l)).max().unwrap_or(1);
    let mut sum = CMatrix::zeros(d, d);
    for m in 0..max_size {
        for v in vector_phase_states(spec, space, family, m as i64, phi)? {
            // a line contributes once per distinct label in its own block
            if v.m == m {
                sum += v.projector();
            }
        }
    }
    Ok(sum)
}

/// Largest `‖E(line) v_line − e^{iθ_m} v_line‖` for the block-diagonal
/// operator `diag(E(0), …, E(k))` acting on a vector phase state.
pub fn vector_eigen_residual(op: &phase_ops::PhaseOperator, v: &VectorPhaseState) -> f64 {
    let blocks = op.block_ops.as_ref().expect("block family");
    let k = blocks.len() - 1;
    let kind = op.family.partition_kind().expect("block family");
    let theta = TAU * v.m as f64 / block_len(kind, k, v.l) as f64;
    v.lines
        .iter()
        .zip(blocks)
        .map(|(line, e)| {
            let lhs = e.matrix() * line.amps();
            (lhs - line.amps() * cis(theta)).norm()
        })
        .fold(0.0, f64::max)
}

/// The `k = 1` operators `E13`, `E23`, `E33`, `E3` with `φ1 = |0,0⟩`,
/// `φ2 = |1,0⟩`, `φ3 = |0,1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct QutritFixture {
    pub e13: LinearOperator,
    pub e23: LinearOperator,
    pub e33: LinearOperator,
    pub e3: LinearOperator,
}

pub fn qutrit_fixture(phi: f64) -> QutritFixture {
    let space = Arc::new(FockSpace::finite(1));
    let dyads = |label: &str, entries: &[(usize, usize, C64)]| {
        let mut m = CMatrix::zeros(3, 3);
        for &(i, j, z) in entries {
            m[(i - 1, j - 1)] += z;
        }
        LinearOperator::new(label, Arc::clone(&space), m).expect("3x3")
    };
    let one = real(1.0);
    QutritFixture {
        e13: dyads("E13", &[(1, 2, cis(phi)), (2, 1, cis(-phi)), (3, 3, one)]),
        e23: dyads("E23", &[(1, 3, cis(phi)), (3, 1, cis(-phi)), (2, 2, one)]),
        e33: dyads("E33", &[(2, 3, one), (3, 2, one), (1, 1, one)]),
        e3: dyads("E3", &[(1, 2, cis(phi)), (2, 3, one), (3, 1, cis(-phi))]),
    }
}

/// Max distance between the qutrit fixture and the general builders at `k = 1`.
pub fn qutrit_cross_check(phi: f64) -> Result<f64> {
    let spec = KappaSpec::negative(1, phi);
    let space = Arc::new(FockSpace::build(&spec));
    let fx = qutrit_fixture(phi);
    let pairs = [
        (fx.e13, phase_ops::build_e1d(&spec, &space)?),
        (fx.e23, phase_ops::build_e2d(&spec, &space)?),
        (fx.e33, phase_ops::build_e3d(&spec, &space)?),
        (fx.e3, phase_ops::build_ed(&spec, &space)?),
    ];
    Ok(pairs
        .iter()
        .map(|(a, b)| max_abs(&(a.matrix() - b.matrix())))
        .fold(0.0, f64::max))
}

/// Eigenvalue residual `max_m ‖E v_m − e^{iθ_m} v_m‖` for a whole family.
pub fn eigen_residual(op: &LinearOperator, fam: &PhaseStateFamily) -> f64 {
    fam.states
        .iter()
        .enumerate()
        .map(|(m, v)| (op.matrix() * v.amps() - v.amps() * cis(fam.eigen_angle(m))).norm())
        .fold(0.0, f64::max)
}

/// `max |⟨a|b⟩ − δ_ab|` within one family.
pub fn orthonormality_residual(fam: &PhaseStateFamily) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in fam.states.iter().enumerate() {
        for (j, b) in fam.states.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b) - real(target)).norm());
        }
    }
    worst
}

/// `max | |⟨basis|v⟩| − 1/√size |` over the support of the family.
pub fn equiprobability_residual(fam: &PhaseStateFamily, support: &[usize]) -> f64 {
    let target = 1.0 / (fam.len() as f64).sqrt();
    fam.states
        .iter()
        .flat_map(|v| support.iter().map(move |&j| (v.amps()[j].norm() - target).abs()))
        .fold(0.0, f64::max)
}

/// `max |U − F|` where `U[n][m] = ⟨l−n, n ‖ l, m, 0⟩⟩` and `F` is the unitary
/// DFT matrix of size `l + 1`.
pub fn dft_residual(spec: &KappaSpec, space: &Arc<FockSpace>, l: usize) -> Result<f64> {
    let fam = phase_states_e3(spec, space, l, 0.0)?;
    let s = l + 1;
    let mut worst: f64 = 0.0;
    for (m, v) in fam.states.iter().enumerate() {
        for n in 0..s {
            let dft = C64::from_polar(1.0 / (s as f64).sqrt(), TAU * (m * n) as f64 / s as f64);
            let j = space.index_of(l - n, n).expect("in space");
            worst = worst.max((v.amps()[j] - dft).norm());
        }
    }
    Ok(worst)
}

/// Every property of the phase states for one `(k, φ)`; `t` and `phi2`
/// drive the temporal-stability and overlap checks.
pub fn check_phase_states(
    spec: &KappaSpec,
    space: &Arc<FockSpace>,
    t: f64,
    phi2: f64,
    tol: f64,
) -> Result<VerificationReport> {
    let k = require_finite(spec, space)?;
    let phi = spec.phi();
    let mut report = VerificationReport::new();
    let ops = [
        phase_ops::build_e1d(spec, space)?,
        phase_ops::build_e2d(spec, space)?,
        phase_ops::build_e3d(spec, space)?,
    ];
    for op in &ops {
        let name = op.family.name();
        let mut eig: f64 = 0.0;
        let mut ortho: f64 = 0.0;
        let mut equi: f64 = 0.0;
        let mut complete: f64 = 0.0;
        let mut stable: f64 = 0.0;
        let mut rho: f64 = 0.0;
        let partition = op.partition.as_ref().expect("block family");
        for l in 0..=k {
            let family = StateFamily::with_block(op.family, l);
            let fam = phase_states(spec, space, family, phi)?;
            let block = op.block(l).expect("block exists");
            eig = eig.max(eigen_residual(block, &fam));
            eig = eig.max(eigen_residual(&op.op, &fam));
            ortho = ortho.max(orthonormality_residual(&fam));
            equi = equi.max(equiprobability_residual(&fam, &partition.blocks[l]));
            complete = complete.max(max_abs(&(fam.completeness() - partition.projector(space, l))));
            let later = phase_states(spec, space, family, phi + t)?;
            for (v, w) in fam.states.iter().zip(&later.states) {
                stable = stable.max(evolve(spec, space, v, t)?.distance(w));
            }
            for l2 in 0..=k {
                let other2 = phase_states(spec, space, StateFamily::with_block(op.family, l2), phi2)?;
                for (m, v) in fam.states.iter().enumerate() {
                    for (m2, w) in other2.states.iter().enumerate() {
                        let closed =
                            overlap_rho(spec, op.family, l, m as i64, phi, l2, m2 as i64, phi2)?;
                        rho = rho.max((closed - v.inner(w)).norm());
                    }
                }
            }
        }
        report.push(CheckEntry::full(format!("{name}(l) eigenvalue equation"), eig, tol));
        report.push(CheckEntry::full(format!("{name} states orthonormal"), ortho, tol));
        report.push(CheckEntry::full(format!("{name} states equiprobable"), equi, tol));
        report.push(CheckEntry::full(
            format!("{name} sum_m |l,m><l,m| = block projector"),
            complete,
            tol,
        ));
        report.push(CheckEntry::full(format!("{name} states temporally stable"), stable, tol));
        report.push(CheckEntry::full(format!("{name} overlap closed form"), rho, tol));

        let mut vec_eig: f64 = 0.0;
        let mut lines_ok = true;
        let max_size = (0..=k)
            .map(|l| block_len(op.family.partition_kind().expect("block"), k, l))
            .max()
            .unwrap_or(1);
        for m in 0..max_size {
            for v in vector_phase_states(spec, space, op.family, m as i64, phi)? {
                vec_eig = vec_eig.max(vector_eigen_residual(op, &v));
                lines_ok &= v.nonzero_lines() == vec![v.l];
                let fam = phase_states(spec, space, StateFamily::with_block(op.family, v.l), phi)?;
                vec_eig = vec_eig.max(v.lines[v.l].distance(&fam.states[v.m]));
            }
        }
        report.push(CheckEntry::full(format!("{name} vector phase states eigen"), vec_eig, tol));
        report.push(CheckEntry::flag(format!("{name} vector states: one nonzero line"), lines_ok));
        let closure = vector_closure(spec, space, op.family, phi)?;
        let d = space.dim();
        report.push(CheckEntry::full(
            format!("{name} vector closure = I_d"),
            max_abs(&(closure - CMatrix::identity(d, d))),
            tol,
        ));
    }

    let ed = phase_ops::build_ed(spec, space)?;
    let fam = phase_states_ed(spec, space, phi)?;
    let d = space.dim();
    report.push(CheckEntry::full("Ed eigenvalue equation", eigen_residual(&ed.op, &fam), tol));
    report.push(CheckEntry::full("Ed states orthonormal", orthonormality_residual(&fam), tol));
    let all: Vec<usize> = (0..d).collect();
    report.push(CheckEntry::full(
        "Ed states equiprobable",
        equiprobability_residual(&fam, &all),
        tol,
    ));
    report.push(CheckEntry::full(
        "Ed closure sum_m |m><m| = I",
        max_abs(&(fam.completeness() - CMatrix::identity(d, d))),
        tol,
    ));
    let later = phase_states_ed(spec, space, phi + t)?;
    let stable = fam
        .states
        .iter()
        .zip(&later.states)
        .map(|(v, w)| evolve(spec, space, v, t).map(|e| e.distance(w)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.push(CheckEntry::full("Ed states temporally stable", stable, tol));
    let other = phase_states_ed(spec, space, phi2)?;
    let mut tau: f64 = 0.0;
    for (m, v) in fam.states.iter().enumerate() {
        for (m2, w) in other.states.iter().enumerate() {
            tau = tau.max((overlap_tau(spec, m as i64, phi, m2 as i64, phi2)? - v.inner(w)).norm());
        }
    }
    report.push(CheckEntry::full("Ed overlap closed form", tau, tol));

    let dft = (0..=k)
        .map(|l| dft_residual(spec, space, l))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.push(CheckEntry::full("E3d states at phi=0 = DFT", dft, tol));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neg(k: usize, phi: f64) -> (KappaSpec, Arc<FockSpace>) {
        let spec = KappaSpec::negative(k, phi);
        (spec, Arc::new(FockSpace::build(&spec)))
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn e1_k1_l0_phi0_is_plus_minus() {
        let (spec, space) = neg(1, 0.0);
        let fam = phase_states_e1(&spec, &space, 0, 0.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(fam.len(), 2);
        assert!(close(fam.states[0].amplitude(0, 0).unwrap(), real(h)));
        assert!(close(fam.states[0].amplitude(1, 0).unwrap(), real(h)));
        assert!(close(fam.states[1].amplitude(0, 0).unwrap(), real(h)));
        assert!(close(fam.states[1].amplitude(1, 0).unwrap(), real(-h)));
    }

    #[test]
    fn one_dimensional_blocks() {
        let (spec, space) = neg(1, 0.4);
        let fam = phase_states_e1(&spec, &space, 1, 0.4).unwrap();
        assert_eq!(fam.len(), 1);
        let expected = cis(-spec.energy(0, 1) * 0.4);
        assert!(close(fam.states[0].amplitude(0, 1).unwrap(), expected));

        let fam = phase_states_e3(&spec, &space, 0, 0.4).unwrap();
        assert_eq!(fam.len(), 1);
        assert!(close(fam.states[0].amplitude(0, 0).unwrap(), real(1.0)));
    }

    #[test]
    fn e3_l1_m0_is_symmetric_pair() {
        let (spec, space) = neg(2, 0.0);
        let fam = phase_states_e3(&spec, &space, 1, 0.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(fam.states[0].amplitude(1, 0).unwrap(), real(h)));
        assert!(close(fam.states[0].amplitude(0, 1).unwrap(), real(h)));
    }

    #[test]
    fn ed_k1_phi0_is_dft_with_block_phase() {
        let (spec, space) = neg(1, 0.0);
        let fam = phase_states_ed(&spec, &space, 0.0).unwrap();
        for m in 0..3 {
            for j in 0..3 {
                let (n, l) = space.state(j);
                // q^{m(l(5−l)/2 + n)}, written independently of phi_index
                let e = m * (l * (5 - l) / 2 + n);
                let want = C64::from_polar(1.0 / 3f64.sqrt(), TAU * e as f64 / 3.0);
                assert!(close(fam.states[m].amps()[j], want));
            }
        }
    }

    #[test]
    fn negative_m_wraps() {
        let (spec, space) = neg(3, 0.2);
        let a = phase_state(&spec, &space, StateFamily::E1d(1), -1, 0.2).unwrap();
        let b = phase_state(&spec, &space, StateFamily::E1d(1), 2, 0.2).unwrap();
        assert_eq!(a.amps(), b.amps());
    }

    #[test]
    fn block_out_of_range() {
        let (spec, space) = neg(2, 0.0);
        assert!(matches!(
            phase_states_e1(&spec, &space, 3, 0.0),
            Err(Error::BlockOutOfRange { l: 3, max: 2 })
        ));
    }

    #[test]
    fn overlap_edge_cases() {
        let spec = KappaSpec::negative(3, 0.0);
        assert_eq!(overlap_rho(&spec, PhaseFamily::E1d, 0, 1, 0.3, 1, 1, 0.3).unwrap(), real(0.0));
        let same = overlap_rho(&spec, PhaseFamily::E2d, 1, 2, 0.3, 1, 2, 0.3).unwrap();
        assert!(close(same, real(1.0)));
        assert!(close(overlap_tau(&spec, 4, 1.1, 4, 1.1).unwrap(), real(1.0)));
        assert!(overlap_rho(&spec, PhaseFamily::Ed, 0, 0, 0.0, 0, 0, 0.0).is_err());
    }

    #[test]
    fn evolve_identity_and_norm() {
        let (spec, space) = neg(3, 0.0);
        let mut v = StateVector::zeros("v", &space);
        for (j, z) in v.amps_mut().iter_mut().enumerate() {
            *z = C64::new(j as f64, 1.0 - j as f64 * 0.5);
        }
        assert_eq!(evolve(&spec, &space, &v, 0.0).unwrap().amps(), v.amps());
        let w = evolve(&spec, &space, &v, 2.7).unwrap();
        assert!((w.norm() - v.norm()).abs() < 1e-12);
    }

    #[test]
    fn vector_states_k1_e1() {
        let (spec, space) = neg(1, 0.0);
        let vs = vector_phase_states(&spec, &space, PhaseFamily::E1d, 1, 0.0).unwrap();
        assert_eq!(vs.len(), 2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(vs[0].nonzero_lines(), vec![0]);
        assert!(close(vs[0].lines[0].amplitude(1, 0).unwrap(), real(-h)));
        assert_eq!(vs[1].nonzero_lines(), vec![1]);
        assert_eq!(vs[1].m, 0);
        assert!(close(vs[1].lines[1].amplitude(0, 1).unwrap(), real(1.0)));
    }

    #[test]
    fn qutrit_fixture_properties() {
        for phi in [0.0, 0.8, -2.3] {
            assert!(qutrit_cross_check(phi).unwrap() < 1e-15);
            let fx = qutrit_fixture(phi);
            let sq = fx.e13.matrix() * fx.e13.matrix();
            assert!(max_abs(&(sq - CMatrix::identity(3, 3))) < 1e-15);
            let e33 = fx.e33.matrix();
            assert_eq!(e33, &e33.adjoint());
            assert_eq!(e33 * e33, CMatrix::identity(3, 3));
        }
        let e3 = qutrit_fixture(0.0).e3;
        // φ1 ← φ2 ← φ3 ← φ1
        assert_eq!(e3.matrix()[(0, 1)], real(1.0));
        assert_eq!(e3.matrix()[(1, 2)], real(1.0));
        assert_eq!(e3.matrix()[(2, 0)], real(1.0));
    }

    #[test]
    fn full_check_several_k() {
        for k in 1..=5 {
            let (spec, space) = neg(k, 0.61 * k as f64);
            let r = check_phase_states(&spec, &space, 0.3, -1.2, 1e-10).unwrap();
            assert!(r.overall, "k={k}\n{r}");
        }
    }
}
