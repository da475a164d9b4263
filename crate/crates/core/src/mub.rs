//! Mutually unbiased bases from quantized phase states.
//!
//! Vectors live in `C^N` with the computational basis `|0⟩, …, |N−1⟩`; the
//! phase-state label `|n, 0⟩` (or `|N−1−n, n⟩`) is identified with `|N−1−n⟩`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::sqrt_f3;
use crate::kappa::KappaSpec;
use crate::linalg::{cis, max_abs, max_abs_vec, CMatrix, CVector, C64};
use crate::phase_states::{phase_state, StateFamily};
use crate::space::FockSpace;

/// `φ = −π (N−1) a / N`.
pub fn quantized_phase(n: usize, a: usize) -> Result<f64> {
    check_label("a", a, n)?;
    Ok(-PI * (n as f64 - 1.0) * a as f64 / n as f64)
}

fn check_label(name: &'static str, value: usize, n: usize) -> Result<()> {
    if value >= n {
        return Err(Error::IndexOutOfRange { name, value, bound: n });
    }
    Ok(())
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("MUB dimension must be at least 2, got {n}")));
    }
    Ok(())
}

/// `|aα⟩ = N^{-1/2} Σ_n q_0^{n(N−n)a/2 + nα} |N−1−n⟩`.
///
/// The exponent is kept as the integer `n(N−n)a + 2nα` over `2N`, reduced
/// modulo `2N` before conversion to an angle.
pub fn mub_vector(n: usize, a: usize, alpha: usize) -> Result<CVector> {
    check_dim(n)?;
    check_label("a", a, n)?;
    check_label("alpha", alpha, n)?;
    let norm = 1.0 / (n as f64).sqrt();
    let two_n = 2 * n as u128;
    let mut v = CVector::zeros(n);
    for j in 0..n {
        let (jj, nn) = (j as u128, n as u128);
        let num = (jj * (nn - jj) * a as u128 + 2 * jj * alpha as u128) % two_n;
        v[n - 1 - j] = cis(PI * num as f64 / n as f64) * norm;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    E1,
    E3,
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e1" | "E1" => Ok(Route::E1),
            "e3" | "E3" => Ok(Route::E3),
            other => Err(Error::InvalidArgument(format!("unknown route {other:?}; expected e1 or e3"))),
        }
    }
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::E1 => "e1",
            Route::E3 => "e3",
        })
    }
}

/// `E1d(0)` phase state at `k = N−1` and quantized φ, relabeled into `C^N`.
pub fn mub_vector_e1route(n: usize, a: usize, alpha: usize) -> Result<CVector> {
    check_dim(n)?;
    check_label("alpha", alpha, n)?;
    let phi = quantized_phase(n, a)?;
    let spec = KappaSpec::negative(n - 1, phi);
    let space = Arc::new(FockSpace::build(&spec));
    let state = phase_state(&spec, &space, StateFamily::E1d(0), alpha as i64, phi)?;
    Ok(CVector::from_fn(n, |i, _| {
        state.amplitude(n - 1 - i, 0).expect("line l = 0 lies in the space")
    }))
}

/// `e^{−iF_3 φ} ‖N−1, α, 0⟩⟩` at `k = N−1` with `φ = −πk²a/N`, relabeled
/// `|N−1−n, n⟩ → |N−1−n⟩`.
pub fn mub_vector_e3route(n: usize, a: usize, alpha: usize) -> Result<CVector> {
    check_dim(n)?;
    check_label("a", a, n)?;
    check_label("alpha", alpha, n)?;
    let k = n - 1;
    let spec = KappaSpec::negative(k, 0.0);
    let space = Arc::new(FockSpace::build(&spec));
    let l = n - 1;
    let state = phase_state(&spec, &space, StateFamily::E3d(l), alpha as i64, 0.0)?;
    let phi = -PI * (k * k) as f64 / n as f64 * a as f64;
    Ok(CVector::from_fn(n, |i, _| {
        let m = n - 1 - i;
        let (n1, n2) = (l - m, m);
        let f3 = sqrt_f3(n1, n2, spec.kappa()).powi(2);
        cis(-f3 * phi) * state.amplitude(n1, n2).expect("block l lies in the space")
    }))
}

pub fn route_vector(route: Route, n: usize, a: usize, alpha: usize) -> Result<CVector> {
    match route {
        Route::E1 => mub_vector_e1route(n, a, alpha),
        Route::E3 => mub_vector_e3route(n, a, alpha),
    }
}

/// `S(u, v, w) = Σ_{k=0}^{|w|−1} e^{iπ(uk² + vk)/w}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussSumSpec {
    pub u: i64,
    pub v: i64,
    pub w: i64,
}

/// Direct summation; each exponent `uk² + vk` is reduced modulo `2|w|` in
/// integer arithmetic.
pub fn gauss_sum(spec: GaussSumSpec) -> Result<C64> {
    let GaussSumSpec { u, v, w } = spec;
    if w == 0 {
        return Err(Error::InvalidArgument("Gauss sum needs w != 0".into()));
    }
    let aw = w.unsigned_abs() as i128;
    let sign = if w > 0 { 1.0 } else { -1.0 };
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..aw {
        let x = (u as i128 * k * k + v as i128 * k).rem_euclid(2 * aw);
        sum += cis(sign * PI * x as f64 / aw as f64);
    }
    Ok(sum)
}

/// `⟨aα|bβ⟩ = S(a−b, −(a−b)N − 2(α−β), N) / N`.
pub fn overlap_gauss(n: usize, a: usize, alpha: usize, b: usize, beta: usize) -> Result<C64> {
    let (n_, a, alpha, b, beta) = (n as i64, a as i64, alpha as i64, b as i64, beta as i64);
    let s = gauss_sum(GaussSumSpec {
        u: a - b,
        v: -(a - b) * n_ - 2 * (alpha - beta),
        w: n_,
    })?;
    Ok(s / n as f64)
}

/// Deterministic trial division.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// One orthonormal basis of `C^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct MubBasis {
    /// `"computational"` or `"a=<a>"`.
    pub label: String,
    /// `None` for the computational basis.
    pub a: Option<usize>,
    pub vectors: Vec<CVector>,
}

impl MubBasis {
    /// Columns are the basis vectors.
    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.vectors)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MubCertificate {
    /// Largest `| |⟨x|y⟩| − 1/√N |` over vectors from distinct bases.
    pub max_deviation: f64,
    /// Number of unordered pairs of distinct bases.
    pub pairs_checked: usize,
    pub prime: bool,
    /// Largest `|B†B − I|` over all bases.
    pub orthonormality: f64,
    /// Largest `|⟨aα|bβ⟩ − S/N|`.
    pub gauss_deviation: f64,
    /// Largest elementwise distance between the route vectors and the closed form.
    pub route_deviation: f64,
    /// Basis index pairs `(i, j)`, `i < j`, that fail unbiasedness at the tolerance.
    pub failing_pairs: Vec<(usize, usize)>,
    pub tolerance: f64,
}

impl MubCertificate {
    /// True when every pair is unbiased at the tolerance.
    pub fn complete(&self) -> bool {
        self.failing_pairs.is_empty() && self.max_deviation < self.tolerance
    }
}

/// `B_N` followed by `B_{0a}` for `a = 0..N−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MubSet {
    pub n: usize,
    pub route: Route,
    pub bases: Vec<MubBasis>,
    /// `overlap_table[i][j]`: worst `| |⟨x|y⟩| − 1/√N |` for `i ≠ j`, worst
    /// orthonormality defect for `i = j`.
    pub overlap_table: Vec<Vec<f64>>,
    pub certificate: MubCertificate,
}

/// Builds and certifies the `N + 1` bases. Composite `N` is not an error: the
/// certificate lists the pairs that fail.
pub fn build_mub_set(n: usize, route: Route, tol: f64) -> Result<MubSet> {
    check_dim(n)?;
    let mut bases = Vec::with_capacity(n + 1);
    bases.push(MubBasis {
        label: "computational".into(),
        a: None,
        vectors: (0..n)
            .map(|j| {
                let mut e = CVector::zeros(n);
                e[j] = C64::new(1.0, 0.0);
                e
            })
            .collect(),
    });
    let mut route_deviation: f64 = 0.0;
    let mut gauss_deviation: f64 = 0.0;
    for a in 0..n {
        let mut vectors = Vec::with_capacity(n);
        for alpha in 0..n {
            let v = route_vector(route, n, a, alpha)?;
            let exact = mub_vector(n, a, alpha)?;
            route_deviation = route_deviation.max(max_abs_vec(&(&v - &exact)));
            vectors.push(v);
        }
        bases.push(MubBasis {
            label: format!("a={a}"),
            a: Some(a),
            vectors,
        });
    }

    let target = 1.0 / (n as f64).sqrt();
    let nb = bases.len();
    let mut table = vec![vec![0.0; nb]; nb];
    let mut orthonormality: f64 = 0.0;
    let mut max_deviation: f64 = 0.0;
    let mut failing_pairs = Vec::new();
    for i in 0..nb {
        let bi = bases[i].matrix();
        let gram = bi.adjoint() * &bi;
        let defect = max_abs(&(gram - CMatrix::identity(n, n)));
        table[i][i] = defect;
        orthonormality = orthonormality.max(defect);
        for j in i + 1..nb {
            let cross = bi.adjoint() * bases[j].matrix();
            let dev = cross.iter().map(|z| (z.norm() - target).abs()).fold(0.0, f64::max);
            table[i][j] = dev;
            table[j][i] = dev;
            max_deviation = max_deviation.max(dev);
            if dev >= tol {
                failing_pairs.push((i, j));
            }
            if let (Some(a), Some(b)) = (bases[i].a, bases[j].a) {
                for alpha in 0..n {
                    for beta in 0..n {
                        let closed = overlap_gauss(n, a, alpha, b, beta)?;
                        gauss_deviation = gauss_deviation.max((cross[(alpha, beta)] - closed).norm());
                    }
                }
            }
        }
    }
    // same-basis overlaps also follow the Gauss-sum formula
    for basis in &bases[1..] {
        let a = basis.a.expect("phase basis");
        let bi = basis.matrix();
        let gram = bi.adjoint() * &bi;
        for alpha in 0..n {
            for beta in 0..n {
                let closed = overlap_gauss(n, a, alpha, a, beta)?;
                gauss_deviation = gauss_deviation.max((gram[(alpha, beta)] - closed).norm());
            }
        }
    }

    Ok(MubSet {
        n,
        route,
        bases,
        overlap_table: table,
        certificate: MubCertificate {
            max_deviation,
            pairs_checked: nb * (nb - 1) / 2,
            prime: is_prime(n),
            orthonormality,
            gauss_deviation,
            route_deviation,
            failing_pairs,
            tolerance: tol,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantized_phase_examples() {
        assert_eq!(quantized_phase(5, 0).unwrap(), 0.0);
        assert!((quantized_phase(3, 1).unwrap() + 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((quantized_phase(2, 1).unwrap() + PI / 2.0).abs() < 1e-15);
        assert!(quantized_phase(3, 3).is_err());
    }

    #[test]
    fn qubit_a0_basis() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = mub_vector(2, 0, 0).unwrap();
        let v1 = mub_vector(2, 0, 1).unwrap();
        // n = 0 sits on |1⟩, n = 1 on |0⟩
        assert!((v0[0] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((v0[1] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((v1[1] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((v1[0] - C64::new(-h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn uniform_for_a0_alpha0() {
        for n in 2..9 {
            let v = mub_vector(n, 0, 0).unwrap();
            let t = 1.0 / (n as f64).sqrt();
            assert!(v.iter().all(|z| (z - C64::new(t, 0.0)).norm() < 1e-15));
        }
    }

    #[test]
    fn routes_match_closed_form() {
        for n in [2, 3, 4, 5, 6, 7] {
            for a in 0..n {
                for alpha in 0..n {
                    let exact = mub_vector(n, a, alpha).unwrap();
                    for route in [Route::E1, Route::E3] {
                        let v = route_vector(route, n, a, alpha).unwrap();
                        assert!(max_abs_vec(&(&v - &exact)) < 1e-12, "n={n} a={a} alpha={alpha} {route}");
                    }
                }
            }
        }
    }

    #[test]
    fn gauss_sum_basics() {
        assert_eq!(gauss_sum(GaussSumSpec { u: 0, v: 0, w: 7 }).unwrap(), C64::new(7.0, 0.0));
        assert!(gauss_sum(GaussSumSpec { u: 1, v: 1, w: 0 }).is_err());
        let pos = gauss_sum(GaussSumSpec { u: 2, v: 1, w: 5 }).unwrap();
        let neg = gauss_sum(GaussSumSpec { u: -2, v: -1, w: -5 }).unwrap();
        assert!((pos - neg).norm() < 1e-12);
    }

    #[test]
    fn gauss_sum_modulus_for_odd_primes() {
        for n in [3i64, 5, 7, 11] {
            for u in 1..n {
                for v in -2 * n..2 * n {
                    if (u * n + v) % 2 != 0 {
                        continue;
                    }
                    let s = gauss_sum(GaussSumSpec { u, v, w: n }).unwrap();
                    assert!((s.norm() - (n as f64).sqrt()).abs() < 1e-10, "u={u} v={v} n={n}");
                }
            }
        }
    }

    #[test]
    fn primality() {
        let primes: Vec<usize> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn qubit_and_n7_complete() {
        for n in [2, 7] {
            for route in [Route::E1, Route::E3] {
                let set = build_mub_set(n, route, 1e-10).unwrap();
                assert_eq!(set.bases.len(), n + 1);
                let c = &set.certificate;
                assert!(c.complete(), "n={n}: {c:?}");
                assert!(c.orthonormality < 1e-12);
                assert!(c.gauss_deviation < 1e-12);
                assert!(c.route_deviation < 1e-12);
            }
        }
    }

    #[test]
    fn n4_fails_for_even_differences() {
        let set = build_mub_set(4, Route::E1, 1e-10).unwrap();
        assert!(!set.certificate.prime);
        assert!(!set.certificate.complete());
        for a in 0..4 {
            for b in a + 1..4 {
                let fails = set.certificate.failing_pairs.contains(&(a + 1, b + 1));
                assert_eq!(fails, (b - a) % 2 == 0, "a={a} b={b}");
            }
        }
        // the computational basis is unbiased with every B_{0a}
        assert!((1..5).all(|j| !set.certificate.failing_pairs.contains(&(0, j))));
    }
}
