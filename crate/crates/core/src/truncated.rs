//! κ ≥ 0 on a finite window `n1 + n2 ≤ σ`: the projector `Π_σ`, truncated
//! ladders `b_i^± = Π_σ a_i^± Π_σ`, the non-unitary shifts `E_i∞` and the
//! unnormalized `|θ1, θ2, φ)` states.
//!
//! Ladders are built on an ambient window `σ + 2` and compressed, so the
//! truncation is an actual projection rather than a reimplementation.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, structure_function, Mode, Sign};
use crate::kappa::KappaSpec;
use crate::linalg::{
    cis, commutator, max_abs, operator_norm, real, split_residual, CMatrix, CVector, LinearOperator,
    StateVector,
};
use crate::report::{CheckEntry, ResidualSplit, VerificationReport};
use crate::space::FockSpace;

/// Window of size σ embedded in an ambient window of size σ + 2.
#[derive(Debug, Clone)]
pub struct Window {
    pub sigma: usize,
    pub space: Arc<FockSpace>,
    pub ambient: Arc<FockSpace>,
    /// `Π_σ` as an operator on the ambient space.
    pub projector: LinearOperator,
    embed: Vec<usize>,
}

impl Window {
    pub fn new(sigma: usize) -> Result<Self> {
        if sigma == 0 {
            return Err(Error::InvalidArgument("sigma must be at least 1".into()));
        }
        let space = Arc::new(FockSpace::window(sigma));
        let ambient = Arc::new(FockSpace::window(sigma + 2));
        let embed: Vec<usize> = space
            .states()
            .iter()
            .map(|&(a, b)| ambient.index_of(a, b).expect("window inside ambient"))
            .collect();
        let projector = LinearOperator::diagonal("Pi_sigma", &ambient, |a, b| {
            real(if a + b <= sigma { 1.0 } else { 0.0 })
        });
        Ok(Self {
            sigma,
            space,
            ambient,
            projector,
            embed,
        })
    }

    /// Window for a non-negative spec, using its σ.
    pub fn for_spec(spec: &KappaSpec) -> Result<Self> {
        require_non_negative(spec)?;
        Self::new(spec.sigma().ok_or(Error::MissingSigma)?)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Restriction of an ambient matrix to the window block.
    pub fn compress(&self, m: &CMatrix) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |i, j| m[(self.embed[i], self.embed[j])])
    }

    /// Zero-padded embedding of a window matrix into the ambient space.
    pub fn expand(&self, m: &CMatrix) -> CMatrix {
        let da = self.ambient.dim();
        let mut out = CMatrix::zeros(da, da);
        for (i, &ei) in self.embed.iter().enumerate() {
            for (j, &ej) in self.embed.iter().enumerate() {
                out[(ei, ej)] = m[(i, j)];
            }
        }
        out
    }

    /// Projector onto the shell `n1 + n2 = σ`, on the window.
    pub fn shell_projector(&self) -> CMatrix {
        self.diag_projector(|a, b| a + b == self.sigma)
    }

    /// Diagonal projector onto the states selected by `pred`.
    pub fn diag_projector(&self, pred: impl Fn(usize, usize) -> bool) -> CMatrix {
        LinearOperator::diagonal("P", &self.space, |a, b| real(if pred(a, b) { 1.0 } else { 0.0 }))
            .into_matrix()
    }
}

fn require_non_negative(spec: &KappaSpec) -> Result<()> {
    if spec.is_negative() {
        return Err(Error::RequiresNonNegativeKappa { kappa: spec.kappa() });
    }
    Ok(())
}

/// `b_1^±`, `b_2^±` and the number operators on the window.
#[derive(Debug, Clone)]
pub struct TruncatedLadders {
    pub b1_plus: LinearOperator,
    pub b1_minus: LinearOperator,
    pub b2_plus: LinearOperator,
    pub b2_minus: LinearOperator,
    pub n1: LinearOperator,
    pub n2: LinearOperator,
}

impl TruncatedLadders {
    pub fn ladder(&self, mode: Mode, sign: Sign) -> &LinearOperator {
        match (mode, sign) {
            (Mode::One, Sign::Raise) => &self.b1_plus,
            (Mode::One, Sign::Lower) => &self.b1_minus,
            (Mode::Two, Sign::Raise) => &self.b2_plus,
            (Mode::Two, Sign::Lower) => &self.b2_minus,
        }
    }

    pub fn number(&self, mode: Mode) -> &LinearOperator {
        match mode {
            Mode::One => &self.n1,
            Mode::Two => &self.n2,
        }
    }

    pub fn all(&self) -> [&LinearOperator; 4] {
        [&self.b1_plus, &self.b1_minus, &self.b2_plus, &self.b2_minus]
    }
}

/// `b_i^± = Π_σ a_i^± Π_σ`, compressed to the window.
pub fn build_truncated_ladders(spec: &KappaSpec, window: &Window) -> Result<TruncatedLadders> {
    require_non_negative(spec)?;
    let pi = window.projector.matrix();
    let b = |mode: Mode, sign: Sign| -> Result<LinearOperator> {
        let a = fock::ladder(spec, &window.ambient, mode, sign)?;
        let m = window.compress(&(pi * a.matrix() * pi));
        LinearOperator::new(
            format!("b{}{}", mode.index(), sign.symbol()),
            Arc::clone(&window.space),
            m,
        )
    };
    Ok(TruncatedLadders {
        b1_plus: b(Mode::One, Sign::Raise)?,
        b1_minus: b(Mode::One, Sign::Lower)?,
        b2_plus: b(Mode::Two, Sign::Raise)?,
        b2_minus: b(Mode::Two, Sign::Lower)?,
        n1: fock::number(&window.space, Mode::One),
        n2: fock::number(&window.space, Mode::Two),
    })
}

/// Right-hand side of `[b_i^-, b_i^+]`: `I + κ(2N_i + N_j)` minus the shell
/// dyads weighted by `F_i` evaluated one step outside the window.
pub fn modified_commutator_rhs(spec: &KappaSpec, window: &Window, mode: Mode) -> Result<CMatrix> {
    let kappa = spec.kappa();
    let sigma = window.sigma;
    let diag = window
        .space
        .states()
        .iter()
        .map(|&(a, b)| {
            let base = 1.0 + kappa * (a + b + mode.occupation(a, b)) as f64;
            let boundary = if a + b == sigma {
                let outside = match mode {
                    Mode::One => (a + 1, b),
                    Mode::Two => (a, b + 1),
                };
                structure_function(mode, outside.0, outside.1, kappa)?
            } else {
                0.0
            };
            Ok(real(base - boundary))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_diagonal(&CVector::from_vec(diag)))
}

/// The `A_{κ,σ}(2)` relations plus projection and interior-agreement checks.
pub fn check_truncated_algebra(spec: &KappaSpec, window: &Window, tol: f64) -> Result<VerificationReport> {
    let b = build_truncated_ladders(spec, window)?;
    let d = window.dim();
    let space = &window.space;
    let mut report = VerificationReport::new();

    for mode in [Mode::One, Mode::Two] {
        let (lo, hi) = (b.ladder(mode, Sign::Lower), b.ladder(mode, Sign::Raise));
        let rhs = modified_commutator_rhs(spec, window, mode)?;
        let split = split_residual(space, &(commutator(lo.matrix(), hi.matrix()) - rhs));
        let i = mode.index();
        report.push(CheckEntry::split_full(
            format!("[b{i}-, b{i}+] = I + kappa(2N{i} + N{j}) - shell term", j = 3 - i),
            split,
            tol,
        ));
    }

    let mut number_res: f64 = 0.0;
    for i in [Mode::One, Mode::Two] {
        for j in [Mode::One, Mode::Two] {
            for sign in [Sign::Raise, Sign::Lower] {
                let x = b.ladder(j, sign).matrix();
                let c = commutator(b.number(i).matrix(), x);
                let expected = match (i == j, sign) {
                    (false, _) => CMatrix::zeros(d, d),
                    (true, Sign::Raise) => x.clone(),
                    (true, Sign::Lower) => -x,
                };
                number_res = number_res.max(max_abs(&(c - expected)));
            }
        }
    }
    report.push(CheckEntry::full("[N_i, b_j^(+/-)] = +/- delta_ij b_i^(+/-)", number_res, tol));

    let same_sign = [Sign::Raise, Sign::Lower]
        .iter()
        .map(|&s| max_abs(&commutator(b.ladder(Mode::One, s).matrix(), b.ladder(Mode::Two, s).matrix())))
        .fold(0.0, f64::max);
    report.push(CheckEntry::full("[b1^(+/-), b2^(+/-)] = 0", same_sign, tol));

    // [b_i^±, [b_i^±, b_j^∓]] = 0 for i ≠ j. Shell-touching elements do not
    // vanish on a finite window, so only the interior is judged.
    let mut triple = ResidualSplit::default();
    for (i, j) in [(Mode::One, Mode::Two), (Mode::Two, Mode::One)] {
        for (s, t) in [(Sign::Raise, Sign::Lower), (Sign::Lower, Sign::Raise)] {
            let x = b.ladder(i, s).matrix();
            let inner = commutator(x, b.ladder(j, t).matrix());
            let r = split_residual(space, &commutator(x, &inner));
            triple.interior = triple.interior.max(r.interior);
            triple.shell = triple.shell.max(r.shell);
        }
    }
    report.push(
        CheckEntry::split_interior("[b_i^(+/-), [b_i^(+/-), b_j^(-/+)]] = 0", triple, tol)
            .with_note("shell-touching elements carry a windowing defect"),
    );

    let herm = [Mode::One, Mode::Two]
        .iter()
        .map(|&m| max_abs(&(b.ladder(m, Sign::Lower).matrix().adjoint() - b.ladder(m, Sign::Raise).matrix())))
        .fold(0.0, f64::max);
    report.push(CheckEntry::full("(b_i^-)^dagger = b_i^+", herm, tol));

    let pi = window.projector.matrix();
    let mut inside: f64 = 0.0;
    let mut agree = ResidualSplit::default();
    for mode in [Mode::One, Mode::Two] {
        for sign in [Sign::Raise, Sign::Lower] {
            let x = window.expand(b.ladder(mode, sign).matrix());
            inside = inside.max(max_abs(&(pi * &x * pi - &x)));
            let a = fock::ladder(spec, &window.ambient, mode, sign)?;
            let direct = fock::ladder(spec, &window.space, mode, sign)?;
            let diff = b.ladder(mode, sign).matrix() - window.compress(a.matrix());
            let r = split_residual(space, &diff);
            agree.interior = agree.interior.max(r.interior);
            agree.shell = agree.shell.max(r.shell);
            inside = inside.max(max_abs(&(b.ladder(mode, sign).matrix() - direct.matrix())));
        }
    }
    report.push(CheckEntry::full("Pi b Pi = b", inside, tol));
    report.push(
        CheckEntry::split_interior("b_i^(+/-) = a_i^(+/-) below the shell", agree, tol)
            .with_note("creation out of the shell is cut by the window"),
    );

    if spec.kappa() == 0.0 {
        report.push(CheckEntry::full(
            "kappa = 0: b matches the truncated oscillator",
            pegg_barnett_residual(&b, window, spec.phi()),
            tol,
        ));
    }
    Ok(report)
}

/// Distance of the κ = 0 raising operators from `√(n+1)` shifts cut at the
/// window edge.
pub fn pegg_barnett_residual(b: &TruncatedLadders, window: &Window, phi: f64) -> f64 {
    let space = &window.space;
    // H = N1 + N2 at κ = 0, so every raising step carries e^{−iφ}.
    let phase = cis(-phi);
    let mut worst: f64 = 0.0;
    for mode in [Mode::One, Mode::Two] {
        let expected = LinearOperator::from_fn("pb", space, |row, col| {
            let (r, c) = (mode.occupation(row.0, row.1), mode.occupation(col.0, col.1));
            let other_same = match mode {
                Mode::One => row.1 == col.1,
                Mode::Two => row.0 == col.0,
            };
            if other_same && r == c + 1 {
                phase * (r as f64).sqrt()
            } else {
                real(0.0)
            }
        });
        worst = worst.max(max_abs(&(b.ladder(mode, Sign::Raise).matrix() - expected.matrix())));
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shift {
    E1,
    E2,
    E3,
}

impl Shift {
    pub fn name(self) -> &'static str {
        match self {
            Shift::E1 => "E1inf",
            Shift::E2 => "E2inf",
            Shift::E3 => "E3inf",
        }
    }
}

/// Windowed `E_1∞`, `E_2∞` or `E_3∞`; terms reaching outside the window are dropped.
pub fn build_einf(spec: &KappaSpec, window: &Window, which: Shift) -> Result<LinearOperator> {
    require_non_negative(spec)?;
    let space = &window.space;
    let phi = spec.phi();
    let d = window.dim();
    let mut m = CMatrix::zeros(d, d);
    for (i, &(n1, n2)) in space.states().iter().enumerate() {
        let (row, col, value) = match which {
            Shift::E1 => (i, space.index_of(n1 + 1, n2), {
                cis((spec.energy(n1 + 1, n2) - spec.energy(n1, n2)) * phi)
            }),
            Shift::E2 => (i, space.index_of(n1, n2 + 1), {
                cis((spec.energy(n1, n2 + 1) - spec.energy(n1, n2)) * phi)
            }),
            // |n1+1, n2⟩⟨n1, n2+1|: the row is the shifted state
            Shift::E3 => match space.index_of(n1 + 1, n2) {
                Some(r) => (r, space.index_of(n1, n2 + 1), real(1.0)),
                None => continue,
            },
        };
        if let Some(c) = col {
            m[(row, c)] = value;
        }
    }
    LinearOperator::new(which.name(), Arc::clone(space), m)
}

/// Windowed defect identities, norms, `E_3∞ = E_1∞† E_2∞` and the polar
/// decompositions `b_i^- = E_i∞ √F_i`, `b_3^- = −κ E_3∞ √((N1+1)N2)`.
pub fn check_einf(spec: &KappaSpec, window: &Window, tol: f64) -> Result<VerificationReport> {
    let e1 = build_einf(spec, window, Shift::E1)?;
    let e2 = build_einf(spec, window, Shift::E2)?;
    let e3 = build_einf(spec, window, Shift::E3)?;
    let d = window.dim();
    let id = CMatrix::identity(d, d);
    let shell = window.shell_projector();
    let n1_zero = window.diag_projector(|a, _| a == 0);
    let n2_zero = window.diag_projector(|_, b| b == 0);
    let mut report = VerificationReport::new();

    let identities: [(&str, CMatrix, CMatrix); 6] = [
        ("E1inf^dagger E1inf = I - sum |0,n2><0,n2|", e1.matrix().adjoint() * e1.matrix(), &id - &n1_zero),
        ("E1inf E1inf^dagger = I - P_shell", e1.matrix() * e1.matrix().adjoint(), &id - &shell),
        ("E2inf^dagger E2inf = I - sum |n1,0><n1,0|", e2.matrix().adjoint() * e2.matrix(), &id - &n2_zero),
        ("E2inf E2inf^dagger = I - P_shell", e2.matrix() * e2.matrix().adjoint(), &id - &shell),
        ("E3inf E3inf^dagger = I - sum |0,n2><0,n2|", e3.matrix() * e3.matrix().adjoint(), &id - &n1_zero),
        ("E3inf^dagger E3inf = I - sum |n1,0><n1,0|", e3.matrix().adjoint() * e3.matrix(), &id - &n2_zero),
    ];
    for (name, lhs, rhs) in identities {
        report.push(CheckEntry::full(name, max_abs(&(lhs - rhs)), tol));
    }

    let norm = [&e1, &e2, &e3]
        .iter()
        .map(|e| operator_norm(e.matrix()))
        .fold(0.0, f64::max);
    report.push(
        CheckEntry::full("||E_i inf|| <= 1", (norm - 1.0).max(0.0), tol)
            .with_note(format!("largest operator norm {norm:.15}")),
    );

    let split = e3.residual_split(&(e1.matrix().adjoint() * e2.matrix()));
    report.push(CheckEntry::split_full("E3inf = E1inf^dagger E2inf", split, tol));

    let b = build_truncated_ladders(spec, window)?;
    let kappa = spec.kappa();
    let sqrt_f = |mode: Mode| -> Result<CMatrix> {
        let diag = window
            .space
            .states()
            .iter()
            .map(|&(a, c)| structure_function(mode, a, c, kappa).map(|f| real(f.sqrt())))
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_diagonal(&CVector::from_vec(diag)))
    };
    let p1 = b.b1_minus.residual_split(&(e1.matrix() * sqrt_f(Mode::One)?));
    let p2 = b.b2_minus.residual_split(&(e2.matrix() * sqrt_f(Mode::Two)?));
    report.push(CheckEntry::split_full("b1- = E1inf sqrt(F1)", p1, tol));
    report.push(CheckEntry::split_full("b2- = E2inf sqrt(F2)", p2, tol));
    let f3 = LinearOperator::diagonal("sqrt((N1+1)N2)", &window.space, |a, c| {
        real((((a + 1) * c) as f64).sqrt())
    });
    let b3 = commutator(b.b1_plus.matrix(), b.b2_minus.matrix());
    let p3 = split_residual(&window.space, &(b3 - e3.matrix() * f3.matrix() * real(-kappa)));
    report.push(
        CheckEntry::split_interior("[b1+, b2-] = -kappa E3inf sqrt((N1+1)N2)", p3, tol)
            .with_note("b1+ annihilates the shell, so the commutator loses one term there"),
    );
    Ok(report)
}

/// `|θ1, θ2, φ)` truncated to the window; unnormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaState {
    pub theta1: f64,
    pub theta2: f64,
    pub phi: f64,
    pub state: StateVector,
}

impl ThetaState {
    pub fn norm(&self) -> f64 {
        self.state.norm()
    }
}

/// Amplitude `e^{i n1 θ1} e^{i n2 θ2} e^{−iH(n1,n2)φ}` on every window state.
pub fn theta_state(spec: &KappaSpec, window: &Window, theta1: f64, theta2: f64, phi: f64) -> Result<ThetaState> {
    require_non_negative(spec)?;
    let amps = CVector::from_iterator(
        window.dim(),
        window.space.states().iter().map(|&(a, b)| {
            cis(a as f64 * theta1 + b as f64 * theta2 - spec.energy(a, b) * phi)
        }),
    );
    Ok(ThetaState {
        theta1,
        theta2,
        phi,
        state: StateVector::new(
            format!("|{theta1},{theta2},{phi})"),
            Arc::clone(&window.space),
            amps,
        )?,
    })
}

/// `‖E v − λ v‖ / ‖v‖` split into components off and on the defect set.
///
/// The defect set is the shell for `E_1∞` and `E_2∞` and the states with
/// `n1 = 0` for `E_3∞`, whose range never reaches them. `interior` holds the
/// off-defect part and `shell` the defect part.
pub fn theta_eigen_residual(spec: &KappaSpec, window: &Window, v: &ThetaState, which: Shift) -> Result<ResidualSplit> {
    let e = build_einf(spec, window, which)?;
    let lambda = match which {
        Shift::E1 => cis(v.theta1),
        Shift::E2 => cis(v.theta2),
        Shift::E3 => cis(v.theta2 - v.theta1),
    };
    let r = e.matrix() * v.state.amps() - v.state.amps() * lambda;
    let norm = v.norm();
    let mut split = ResidualSplit::default();
    for (j, &(a, b)) in window.space.states().iter().enumerate() {
        let defect = match which {
            Shift::E1 | Shift::E2 => a + b == window.sigma,
            Shift::E3 => a == 0,
        };
        let x = r[j].norm() / norm;
        if defect {
            split.shell = split.shell.max(x);
        } else {
            split.interior = split.interior.max(x);
        }
    }
    Ok(split)
}

/// Grid angle `θ_j = −π + 2πj/G`.
pub fn grid_angle(j: usize, g: usize) -> f64 {
    -PI + TAU * j as f64 / g as f64
}

/// `(1/G²) Σ_{j1,j2} |θ_{j1}, θ_{j2}, φ)(θ_{j1}, θ_{j2}, φ|` in a fixed order.
pub fn quadrature_matrix(spec: &KappaSpec, window: &Window, phi: f64, g: usize) -> Result<CMatrix> {
    if g == 0 {
        return Err(Error::InvalidArgument("grid size must be positive".into()));
    }
    let d = window.dim();
    let mut sum = CMatrix::zeros(d, d);
    for j1 in 0..g {
        for j2 in 0..g {
            let v = theta_state(spec, window, grid_angle(j1, g), grid_angle(j2, g), phi)?;
            sum += v.state.projector();
        }
    }
    Ok(sum / real((g * g) as f64))
}

/// Grid quadrature of the closure relation. Exact when `G > σ`; for `G ≤ σ`
/// the entry is a negative control that must show aliasing.
pub fn quadrature_closure(spec: &KappaSpec, window: &Window, phi: f64, g: usize, tol: f64) -> Result<VerificationReport> {
    let d = window.dim();
    let m = quadrature_matrix(spec, window, phi, g)?;
    let residual = max_abs(&(&m - CMatrix::identity(d, d)));
    let mut report = VerificationReport::new();
    let name = format!("quadrature closure sigma={} G={g}", window.sigma);
    if g > window.sigma {
        let entry = CheckEntry::full(name, residual, tol);
        report.push(if g < 2 * window.sigma + 1 {
            entry.with_note("G below 2 sigma + 1 but above sigma: still exact")
        } else {
            entry
        });
    } else {
        report.push(CheckEntry::expect_failure(format!("{name} (aliasing)"), residual, tol));
    }
    Ok(report)
}

/// Everything for one `(κ, σ, φ)`.
pub fn check_window(spec: &KappaSpec, window: &Window, tol: f64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let pi = window.projector.matrix();
    report.push(CheckEntry::full(
        "Pi_sigma idempotent and Hermitian",
        max_abs(&(pi * pi - pi)).max(max_abs(&(pi.adjoint() - pi))),
        tol,
    ));
    let rank = pi.diagonal().iter().filter(|z| z.re > 0.5).count();
    report.push(CheckEntry::flag(
        "rank Pi_sigma = (sigma+1)(sigma+2)/2",
        rank == crate::space::dimension(window.sigma),
    ));
    report.extend_prefixed("algebra", check_truncated_algebra(spec, window, tol)?);
    report.extend_prefixed("shifts", check_einf(spec, window, tol)?);

    let phi = spec.phi();
    let mut e12 = ResidualSplit::default();
    let mut e3 = ResidualSplit::default();
    let mut stable: f64 = 0.0;
    for (t1, t2) in [(0.0, 0.0), (0.7, -1.9), (-PI, 2.5)] {
        let v = theta_state(spec, window, t1, t2, phi)?;
        for which in [Shift::E1, Shift::E2] {
            let r = theta_eigen_residual(spec, window, &v, which)?;
            e12.interior = e12.interior.max(r.interior);
            e12.shell = e12.shell.max(r.shell);
        }
        let r = theta_eigen_residual(spec, window, &v, Shift::E3)?;
        e3.interior = e3.interior.max(r.interior);
        e3.shell = e3.shell.max(r.shell);
        let later = theta_state(spec, window, t1, t2, phi + 0.4)?;
        let evolved = crate::phase_states::evolve(spec, &window.space, &v.state, 0.4)?;
        stable = stable.max(evolved.distance(&later.state));
    }
    report.push(
        CheckEntry::split_interior("E_i inf |theta) = e^(i theta_i) |theta)", e12, tol)
            .with_note("defect on the shell"),
    );
    report.push(
        CheckEntry::split_interior("E3inf |theta) = e^(i(theta2-theta1)) |theta)", e3, tol)
            .with_note("defect on n1 = 0, outside the range of E3inf"),
    );
    report.push(CheckEntry::full("theta states temporally stable", stable, tol));

    let g = 2 * window.sigma + 1;
    report.extend_prefixed("quadrature", quadrature_closure(spec, window, phi, g, tol)?);
    report.extend_prefixed("quadrature", quadrature_closure(spec, window, phi, window.sigma, tol)?);
    let other = quadrature_matrix(spec, window, phi + 1.3, g)?;
    let base = quadrature_matrix(spec, window, phi, g)?;
    report.push(CheckEntry::full("quadrature independent of phi", max_abs(&(other - base)), tol));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn setup(kappa: f64, sigma: usize, phi: f64) -> (KappaSpec, Window) {
        let spec = KappaSpec::non_negative(kappa, sigma, phi).unwrap();
        (spec, Window::new(sigma).unwrap())
    }

    #[test]
    fn rejects_negative_kappa() {
        let spec = KappaSpec::negative(3, 0.0);
        let w = Window::new(3).unwrap();
        assert!(build_truncated_ladders(&spec, &w).is_err());
        assert!(build_einf(&spec, &w, Shift::E1).is_err());
        assert!(Window::new(0).is_err());
    }

    #[test]
    fn oscillator_amplitudes_kappa0_sigma2() {
        let (spec, w) = setup(0.0, 2, 0.0);
        let b = build_truncated_ladders(&spec, &w).unwrap();
        let amp = b.b1_plus.element((2, 0), (1, 0)).unwrap();
        assert!((amp - C64::new(2f64.sqrt(), 0.0)).norm() < 1e-15);
        for (a, c) in [(2, 0), (1, 1), (0, 2)] {
            let col = w.space.index_of(a, c).unwrap();
            assert!(b.b1_plus.matrix().column(col).iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn boundary_term_kappa0() {
        let (spec, w) = setup(0.0, 3, 0.0);
        let rhs = modified_commutator_rhs(&spec, &w, Mode::One).unwrap();
        for l in 0..=3 {
            let j = w.space.index_of(3 - l, l).unwrap();
            // 1 + 0 − (σ − l + 1)
            assert!((rhs[(j, j)].re - (1.0 - (4 - l) as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn truncated_algebra_holds() {
        for kappa in [0.0, 0.5, 1.0] {
            for sigma in 2..=5 {
                let (spec, w) = setup(kappa, sigma, 0.9);
                let r = check_truncated_algebra(&spec, &w, 1e-12).unwrap();
                assert!(r.overall, "kappa={kappa} sigma={sigma}\n{r}");
            }
        }
    }

    #[test]
    fn shifts_and_theta_states() {
        for kappa in [0.0, 0.5, 1.0] {
            let (spec, w) = setup(kappa, 4, -0.6);
            let r = check_window(&spec, &w, 1e-12).unwrap();
            assert!(r.overall, "kappa={kappa}\n{r}");
        }
    }

    #[test]
    fn theta_zero_is_all_ones() {
        let (spec, w) = setup(0.5, 3, 0.0);
        let v = theta_state(&spec, &w, 0.0, 0.0, 0.0).unwrap();
        assert!(v.state.amps().iter().all(|z| *z == real(1.0)));
        assert!((v.norm() - (w.dim() as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn quadrature_sigma3() {
        let (spec, w) = setup(1.0, 3, 0.2);
        let ok = quadrature_closure(&spec, &w, 0.2, 7, 1e-12).unwrap();
        assert!(ok.overall, "{ok}");
        assert_eq!(ok.entries[0].scope, crate::report::Scope::Full);
        let alias = quadrature_closure(&spec, &w, 0.2, 3, 1e-12).unwrap();
        assert!(alias.overall);
        assert!(alias.entries[0].max_residual > 0.5);
    }

    #[test]
    fn e3_equals_e1dag_e2_on_window() {
        let (spec, w) = setup(0.5, 5, 1.7);
        let e1 = build_einf(&spec, &w, Shift::E1).unwrap();
        let e2 = build_einf(&spec, &w, Shift::E2).unwrap();
        let e3 = build_einf(&spec, &w, Shift::E3).unwrap();
        assert!(max_abs(&(e3.matrix() - e1.matrix().adjoint() * e2.matrix())) < 1e-14);
    }
}
