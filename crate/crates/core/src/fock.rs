//! Fock representation of `A_κ(2)`: structure functions, ladder operators,
//! Hamiltonian, the su(3)/su(2,1) generators and the defining relations.

use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kappa::{energy, KappaSpec};
use crate::linalg::{cis, commutator, max_abs, real, CMatrix, LinearOperator, C64};
use crate::report::{CheckEntry, VerificationReport};
use crate::space::FockSpace;

/// Slack below zero that a structure function may show from rounding.
const NEGATIVITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub fn index(self) -> usize {
        match self {
            Mode::One => 1,
            Mode::Two => 2,
        }
    }

    pub fn occupation(self, n1: usize, n2: usize) -> usize {
        match self {
            Mode::One => n1,
            Mode::Two => n2,
        }
    }

    /// `(n1, n2)` shifted by one quantum of this mode, if it stays nonnegative.
    fn shift(self, (n1, n2): (usize, usize), sign: Sign) -> Option<(usize, usize)> {
        match (self, sign) {
            (Mode::One, Sign::Raise) => Some((n1 + 1, n2)),
            (Mode::Two, Sign::Raise) => Some((n1, n2 + 1)),
            (Mode::One, Sign::Lower) => n1.checked_sub(1).map(|m| (m, n2)),
            (Mode::Two, Sign::Lower) => n2.checked_sub(1).map(|m| (n1, m)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Raise,
    Lower,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Raise => '+',
            Sign::Lower => '-',
        }
    }

    fn flip(self) -> Self {
        match self {
            Sign::Raise => Sign::Lower,
            Sign::Lower => Sign::Raise,
        }
    }
}

/// `F_i(n1, n2) = n_i [1 + κ(n1 + n2 − 1)]` without the positivity check.
pub fn structure_function_raw(mode: Mode, n1: usize, n2: usize, kappa: f64) -> f64 {
    let ni = mode.occupation(n1, n2);
    if ni == 0 {
        return 0.0;
    }
    let n = (n1 + n2) as f64;
    ni as f64 * (1.0 + kappa * (n - 1.0))
}

/// `F_i(n1, n2)`. Zero is a valid value (the operator annihilates); values
/// below zero, which occur outside the κ < 0 shell, are a domain error.
pub fn structure_function(mode: Mode, n1: usize, n2: usize, kappa: f64) -> Result<f64> {
    let value = structure_function_raw(mode, n1, n2, kappa);
    if value.is_nan() || value < -NEGATIVITY_SLACK {
        return Err(Error::NegativeStructureFunction {
            mode: mode.index(),
            n1,
            n2,
            kappa,
            value,
        });
    }
    Ok(value.max(0.0))
}

/// `√F_3(n1, n2) = |κ| √((n1 + 1) n2)`, the diagonal factor in `a_3^- = E_3d √F_3`.
pub fn sqrt_f3(n1: usize, n2: usize, kappa: f64) -> f64 {
    if n2 == 0 {
        return 0.0;
    }
    kappa.abs() * (((n1 + 1) * n2) as f64).sqrt()
}

/// `a_i^±` from its action on `|n1, n2⟩`, including the phase
/// `e^{-i[H(target) − H(source)]φ}`. Transitions leaving the space are dropped,
/// so creation on the shell gives zero.
pub fn ladder(
    spec: &KappaSpec,
    space: &Arc<FockSpace>,
    mode: Mode,
    sign: Sign,
) -> Result<LinearOperator> {
    let d = space.dim();
    let kappa = spec.kappa();
    let phi = spec.phi();
    let mut m = CMatrix::zeros(d, d);
    for (j, &src) in space.states().iter().enumerate() {
        let Some(tgt) = mode.shift(src, sign) else {
            continue;
        };
        let Some(i) = space.index_of(tgt.0, tgt.1) else {
            continue;
        };
        let upper = match sign {
            Sign::Raise => tgt,
            Sign::Lower => src,
        };
        let f = structure_function(mode, upper.0, upper.1, kappa)?;
        let dh = energy(tgt.0, tgt.1, kappa) - energy(src.0, src.1, kappa);
        m[(i, j)] = cis(-dh * phi) * f.sqrt();
    }
    LinearOperator::new(
        format!("a{}{}", mode.index(), sign.symbol()),
        Arc::clone(space),
        m,
    )
}

/// Number operator `N_i`.
pub fn number(space: &Arc<FockSpace>, mode: Mode) -> LinearOperator {
    LinearOperator::diagonal(format!("N{}", mode.index()), space, |a, b| {
        real(mode.occupation(a, b) as f64)
    })
}

/// `H(N1, N2) = (N1 + N2)[1 + κ(N1 + N2 − 1)]`.
pub fn hamiltonian(spec: &KappaSpec, space: &Arc<FockSpace>) -> LinearOperator {
    LinearOperator::diagonal("H", space, |a, b| real(spec.energy(a, b)))
}

/// `λ_n = n[1 + κ(n − 1)]`.
pub fn level_energy(n: usize, kappa: f64) -> f64 {
    energy(n, 0, kappa)
}

/// `a_3^+ = [a_2^+, a_1^-]` and `a_3^- = [a_1^+, a_2^-]`.
pub fn ladder3(spec: &KappaSpec, space: &Arc<FockSpace>, sign: Sign) -> Result<LinearOperator> {
    let (x, y) = match sign {
        Sign::Raise => (
            ladder(spec, space, Mode::Two, Sign::Raise)?,
            ladder(spec, space, Mode::One, Sign::Lower)?,
        ),
        Sign::Lower => (
            ladder(spec, space, Mode::One, Sign::Raise)?,
            ladder(spec, space, Mode::Two, Sign::Lower)?,
        ),
    };
    Ok(x.commutator(&y).relabel(format!("a3{}", sign.symbol())))
}

/// Closed-form action `a_3^+|n1,n2⟩ = −κ√(n1(n2+1)) |n1−1, n2+1⟩` and
/// `a_3^-|n1,n2⟩ = −κ√((n1+1)n2) |n1+1, n2−1⟩`. No φ phase appears because
/// `H` depends on `n1 + n2` only.
pub fn ladder3_closed_form(
    spec: &KappaSpec,
    space: &Arc<FockSpace>,
    sign: Sign,
) -> LinearOperator {
    let kappa = spec.kappa();
    let d = space.dim();
    let mut m = CMatrix::zeros(d, d);
    for (j, &(n1, n2)) in space.states().iter().enumerate() {
        let (tgt, weight) = match sign {
            Sign::Raise if n1 > 0 => ((n1 - 1, n2 + 1), n1 * (n2 + 1)),
            Sign::Lower if n2 > 0 => ((n1 + 1, n2 - 1), (n1 + 1) * n2),
            _ => continue,
        };
        if let Some(i) = space.index_of(tgt.0, tgt.1) {
            m[(i, j)] = real(-kappa * (weight as f64).sqrt());
        }
    }
    LinearOperator::new(format!("a3{} closed form", sign.symbol()), Arc::clone(space), m)
        .expect("square by construction")
}

/// Matrices of one representation: `a_i^±`, `N_i` and `H`.
#[derive(Debug, Clone)]
pub struct Representation {
    pub spec: KappaSpec,
    pub space: Arc<FockSpace>,
    pub a1_plus: LinearOperator,
    pub a1_minus: LinearOperator,
    pub a2_plus: LinearOperator,
    pub a2_minus: LinearOperator,
    pub n1: LinearOperator,
    pub n2: LinearOperator,
    pub h: LinearOperator,
}

impl Representation {
    pub fn build(spec: &KappaSpec) -> Result<Self> {
        Self::on_space(spec, &Arc::new(FockSpace::build(spec)))
    }

    pub fn on_space(spec: &KappaSpec, space: &Arc<FockSpace>) -> Result<Self> {
        Ok(Self {
            spec: *spec,
            space: Arc::clone(space),
            a1_plus: ladder(spec, space, Mode::One, Sign::Raise)?,
            a1_minus: ladder(spec, space, Mode::One, Sign::Lower)?,
            a2_plus: ladder(spec, space, Mode::Two, Sign::Raise)?,
            a2_minus: ladder(spec, space, Mode::Two, Sign::Lower)?,
            n1: number(space, Mode::One),
            n2: number(space, Mode::Two),
            h: hamiltonian(spec, space),
        })
    }

    pub fn ladder(&self, mode: Mode, sign: Sign) -> &LinearOperator {
        match (mode, sign) {
            (Mode::One, Sign::Raise) => &self.a1_plus,
            (Mode::One, Sign::Lower) => &self.a1_minus,
            (Mode::Two, Sign::Raise) => &self.a2_plus,
            (Mode::Two, Sign::Lower) => &self.a2_minus,
        }
    }

    pub fn number(&self, mode: Mode) -> &LinearOperator {
        match mode {
            Mode::One => &self.n1,
            Mode::Two => &self.n2,
        }
    }

    pub fn ladder3(&self, sign: Sign) -> LinearOperator {
        let (x, y) = match sign {
            Sign::Raise => (&self.a2_plus, &self.a1_minus),
            Sign::Lower => (&self.a1_plus, &self.a2_minus),
        };
        x.commutator(y).relabel(format!("a3{}", sign.symbol()))
    }

    /// The six generators `a1+, a1-, a2+, a2-, N1, N2`.
    pub fn generators(&self) -> [&LinearOperator; 6] {
        [
            &self.a1_plus,
            &self.a1_minus,
            &self.a2_plus,
            &self.a2_minus,
            &self.n1,
            &self.n2,
        ]
    }
}

/// `{E_{+1}, E_{−1}, E_{+2}, E_{−2}, E_{+3}, E_{−3}, H_1, H_2}` with
/// `E_{±α} = a_α^± / √|κ|` and `H_1 = [I + κ(2N_1 + N_2)]/(2κ)`,
/// `H_2 = [I + κ(2N_2 + N_1)]/(2κ)`.
pub fn lie_generators(spec: &KappaSpec, space: &Arc<FockSpace>) -> Result<Vec<LinearOperator>> {
    if spec.kappa() == 0.0 {
        return Err(Error::RequiresNonZeroKappa);
    }
    if spec.k() == Some(0) {
        return Err(Error::DegenerateSpace);
    }
    let rep = Representation::on_space(spec, space)?;
    Ok(generators_from(&rep))
}

fn generators_from(rep: &Representation) -> Vec<LinearOperator> {
    let kappa = rep.spec.kappa();
    let s = real(1.0 / kappa.abs().sqrt());
    let scaled = |op: &LinearOperator, label: &str| op.with_matrix(label, op.matrix() * s);
    let cartan = |label: &str, w1: f64, w2: f64| {
        LinearOperator::diagonal(label, &rep.space, |a, b| {
            real((1.0 + kappa * (w1 * a as f64 + w2 * b as f64)) / (2.0 * kappa))
        })
    };
    vec![
        scaled(&rep.a1_plus, "E+1"),
        scaled(&rep.a1_minus, "E-1"),
        scaled(&rep.a2_plus, "E+2"),
        scaled(&rep.a2_minus, "E-2"),
        scaled(&rep.ladder3(Sign::Raise), "E+3"),
        scaled(&rep.ladder3(Sign::Lower), "E-3"),
        cartan("H1", 2.0, 1.0),
        cartan("H2", 1.0, 2.0),
    ]
}

/// Outcome of projecting every pairwise commutator of the eight generators
/// onto their linear span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieClosure {
    pub max_residual: f64,
    pub worst_pair: (String, String),
    pub pairs_checked: usize,
}

/// Closure of the generator span under commutation.
///
/// For κ < 0 the commutators are taken on the finite space. For κ ≥ 0 the
/// generators are built on the window σ + 2, commuted there and compressed to
/// the σ window, so that the compressed commutators equal those of the
/// untruncated representation and no boundary projector leaks into them.
pub fn lie_closure(spec: &KappaSpec) -> Result<LieClosure> {
    if spec.kappa() == 0.0 {
        return Err(Error::RequiresNonZeroKappa);
    }
    let (gens, keep) = match spec.k() {
        Some(0) => return Err(Error::DegenerateSpace),
        Some(k) => {
            let space = Arc::new(FockSpace::finite(k));
            let gens = lie_generators(spec, &space)?;
            (gens, (0..space.dim()).collect::<Vec<_>>())
        }
        None => {
            let sigma = spec.shell();
            let ambient = Arc::new(FockSpace::window(sigma + 2));
            let gens = lie_generators(spec, &ambient)?;
            let inner = FockSpace::window(sigma);
            let keep = inner
                .states()
                .iter()
                .map(|&(a, b)| ambient.index_of(a, b).expect("window nests"))
                .collect();
            (gens, keep)
        }
    };
    let compress = |m: &CMatrix| -> DVector<C64> {
        let n = keep.len();
        DVector::from_iterator(n * n, keep.iter().flat_map(|&j| keep.iter().map(move |&i| m[(i, j)])))
    };
    let basis: Vec<DVector<C64>> = gens.iter().map(|g| compress(g.matrix())).collect();
    let q = CMatrix::from_columns(&basis).qr().q();

    let mut best = LieClosure {
        max_residual: 0.0,
        worst_pair: (String::new(), String::new()),
        pairs_checked: 0,
    };
    for (i, x) in gens.iter().enumerate() {
        for y in gens.iter().skip(i + 1) {
            let c = compress(&commutator(x.matrix(), y.matrix()));
            let r = &c - &q * (q.adjoint() * &c);
            let res = r.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
            best.pairs_checked += 1;
            if res >= best.max_residual {
                best.max_residual = res;
                best.worst_pair = (x.label().to_string(), y.label().to_string());
            }
        }
    }
    Ok(best)
}

/// Checks the defining relations of `A_κ(2)` on the realized space.
///
/// Commutation relations are judged on entries strictly inside the boundary
/// shell (κ < 0: `n1 + n2 < k`; κ ≥ 0: `n1 + n2 < σ`); shell residuals are
/// reported alongside. For κ < 0 the structure functions vanish on the shell,
/// so the shell residuals come out at rounding level as well.
pub fn check_algebra(spec: &KappaSpec, space: &Arc<FockSpace>, tol: f64) -> Result<VerificationReport> {
    let rep = Representation::on_space(spec, space)?;
    let kappa = spec.kappa();
    let d = space.dim();
    let id = CMatrix::identity(d, d);
    let mut report = VerificationReport::new();

    for mode in [Mode::One, Mode::Two] {
        let (lo, hi) = (rep.ladder(mode, Sign::Lower), rep.ladder(mode, Sign::Raise));
        let expected = &id
            + (rep.n1.matrix() + rep.n2.matrix() + rep.number(mode).matrix()) * real(kappa);
        let expected = if d == 1 && kappa.is_infinite() {
            // k = 0: the single state carries the value 1 + κ·0.
            id.clone()
        } else {
            expected
        };
        let split = lo.commutator(hi).residual_split(&expected);
        report.push(CheckEntry::split_interior(
            format!("[a{i}-, a{i}+] = I + kappa(N1 + N2 + N{i})", i = mode.index()),
            split,
            tol,
        ));
    }

    let mut number_res: f64 = 0.0;
    for i in [Mode::One, Mode::Two] {
        for j in [Mode::One, Mode::Two] {
            for sign in [Sign::Raise, Sign::Lower] {
                let a = rep.ladder(j, sign);
                let c = commutator(rep.number(i).matrix(), a.matrix());
                let expected = if i == j {
                    match sign {
                        Sign::Raise => a.matrix().clone(),
                        Sign::Lower => -a.matrix(),
                    }
                } else {
                    CMatrix::zeros(d, d)
                };
                number_res = number_res.max(max_abs(&(c - expected)));
            }
        }
    }
    report.push(CheckEntry::full("[N_i, a_j^(+/-)] = +/- delta_ij a_i^(+/-)", number_res, tol));

    let same_sign = [Sign::Raise, Sign::Lower]
        .iter()
        .map(|&s| {
            max_abs(&commutator(
                rep.ladder(Mode::One, s).matrix(),
                rep.ladder(Mode::Two, s).matrix(),
            ))
        })
        .fold(0.0, f64::max);
    report.push(CheckEntry::full("[a1^(+/-), a2^(+/-)] = 0", same_sign, tol));

    let mut triple = crate::report::ResidualSplit::default();
    for (i, j) in [(Mode::One, Mode::Two), (Mode::Two, Mode::One)] {
        for sign in [Sign::Raise, Sign::Lower] {
            let ai = rep.ladder(i, sign).matrix();
            let aj = rep.ladder(j, sign.flip()).matrix();
            let t = commutator(ai, &commutator(ai, aj));
            let s = crate::linalg::split_residual(space, &t);
            triple.interior = triple.interior.max(s.interior);
            triple.shell = triple.shell.max(s.shell);
        }
    }
    report.push(CheckEntry::split_interior(
        "[a_i^(+/-), [a_i^(+/-), a_j^(-/+)]] = 0",
        triple,
        tol,
    ));

    let herm = [Mode::One, Mode::Two]
        .iter()
        .map(|&m| {
            max_abs(&(rep.ladder(m, Sign::Lower).matrix().adjoint() - rep.ladder(m, Sign::Raise).matrix()))
                .max(max_abs(&(rep.number(m).matrix().adjoint() - rep.number(m).matrix())))
        })
        .fold(0.0, f64::max);
    report.push(CheckEntry::full("(a_i^-)^dagger = a_i^+, N_i^dagger = N_i", herm, tol));

    let sum = rep.a1_plus.matrix() * rep.a1_minus.matrix() + rep.a2_plus.matrix() * rep.a2_minus.matrix();
    report.push(CheckEntry::full(
        "H = a1+ a1- + a2+ a2-",
        max_abs(&(sum - rep.h.matrix())),
        tol,
    ));

    report.push(CheckEntry::flag("H spectrum lambda_n with degeneracy n+1", spectrum_ok(spec, &rep)));

    let a3 = [Sign::Raise, Sign::Lower]
        .iter()
        .map(|&s| {
            rep.ladder3(s)
                .residual_split(ladder3_closed_form(spec, space, s).matrix())
        })
        .fold(crate::report::ResidualSplit::default(), |acc, s| crate::report::ResidualSplit {
            interior: acc.interior.max(s.interior),
            shell: acc.shell.max(s.shell),
        });
    report.push(CheckEntry::split_interior("a3 commutator = closed-form action", a3, tol));

    report.push(CheckEntry::full(
        "a_i(phi) = U(phi) a_i(0) U(phi)^dagger",
        phi_covariance_residual(spec, space)?,
        tol,
    ));

    report.push(CheckEntry::full(
        "F_i recurrences",
        recurrence_residual(space.bound(), kappa),
        tol,
    ));
    Ok(report)
}

fn spectrum_ok(spec: &KappaSpec, rep: &Representation) -> bool {
    let bound = rep.space.bound();
    let mut count = vec![0usize; bound + 1];
    for (j, &(a, b)) in rep.space.states().iter().enumerate() {
        let n = a + b;
        count[n] += 1;
        let lambda = level_energy(n, spec.kappa());
        if rep.h.matrix()[(j, j)] != real(lambda) {
            return false;
        }
    }
    count.iter().enumerate().all(|(n, &c)| c == n + 1)
}

/// `max |a_i^±(φ) − U(φ) a_i^±(0) U(φ)†|` with `U(φ) = exp(−iHφ)`.
pub fn phi_covariance_residual(spec: &KappaSpec, space: &Arc<FockSpace>) -> Result<f64> {
    let at_phi = Representation::on_space(spec, space)?;
    let at_zero = Representation::on_space(&spec.with_phi(0.0), space)?;
    let u = LinearOperator::diagonal("U", space, |a, b| cis(-spec.energy(a, b) * spec.phi()));
    let mut res: f64 = 0.0;
    for mode in [Mode::One, Mode::Two] {
        for sign in [Sign::Raise, Sign::Lower] {
            let conj = u.matrix() * at_zero.ladder(mode, sign).matrix() * u.matrix().adjoint();
            res = res.max(max_abs(&(conj - at_phi.ladder(mode, sign).matrix())));
        }
    }
    Ok(res)
}

/// Max deviation of `F_1(n1+1,n2) − F_1(n1,n2) = 1 + κ(2n1+n2)` and its mode-2
/// partner over `n1 + n2 ≤ bound`, plus the boundary values `F_1(0,n2) = 0`,
/// `F_2(n1,0) = 0`.
pub fn recurrence_residual(bound: usize, kappa: f64) -> f64 {
    if kappa.is_infinite() {
        return 0.0;
    }
    let mut res: f64 = 0.0;
    for n2 in 0..=bound {
        for n1 in 0..=bound - n2 {
            let (a, b) = (n1 as f64, n2 as f64);
            let d1 = structure_function_raw(Mode::One, n1 + 1, n2, kappa)
                - structure_function_raw(Mode::One, n1, n2, kappa);
            let d2 = structure_function_raw(Mode::Two, n1, n2 + 1, kappa)
                - structure_function_raw(Mode::Two, n1, n2, kappa);
            res = res
                .max((d1 - (1.0 + kappa * (2.0 * a + b))).abs())
                .max((d2 - (1.0 + kappa * (2.0 * b + a))).abs());
        }
        res = res
            .max(structure_function_raw(Mode::One, 0, n2, kappa).abs())
            .max(structure_function_raw(Mode::Two, n2, 0, kappa).abs());
    }
    res
}
