//! JSON schemas for operators, states, phase-state families, MUB sets and
//! reports.
//!
//! Complex data is stored as separate real and imaginary arrays, matrices in
//! row-major order. Floats round-trip bit-exactly. Parse errors carry the
//! JSON path of the offending field.

use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, LinearOperator, StateVector, C64};
use crate::mub::{MubBasis, MubCertificate, MubSet, Route};
use crate::phase_ops::{build_partition, PhaseFamily, PhaseOperator};
use crate::phase_states::{PhaseStateFamily, StateFamily, VectorPhaseState};
use crate::space::FockSpace;

/// Parses `text` into `T`, reporting the path of the first failure.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Json {
        path: format!("$.{}", e.path()),
        source: e.into_inner(),
    })
}

pub fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: "$".into(),
        source: e,
    })
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub label: String,
    pub dim: usize,
    pub basis: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub window: bool,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl OperatorJson {
    pub fn from_operator(op: &LinearOperator) -> Self {
        let m = op.matrix();
        let d = op.dim();
        let mut re = Vec::with_capacity(d * d);
        let mut im = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self {
            label: op.label().to_owned(),
            dim: d,
            basis: basis_of(op.space()),
            window: op.space().is_window(),
            re,
            im,
        }
    }

    /// Validates lengths and the basis, then rebuilds the operator. `path` is
    /// the JSON path of this object, used in error messages.
    pub fn to_operator(&self, path: &str) -> Result<LinearOperator> {
        let space = space_from(&self.basis, self.dim, self.window, path)?;
        let d = self.dim;
        for (name, v) in [("re", &self.re), ("im", &self.im)] {
            if v.len() != d * d {
                return Err(schema(
                    format!("{path}.{name}"),
                    format!("expected {} entries for dim {d}, found {}", d * d, v.len()),
                ));
            }
        }
        let m = CMatrix::from_fn(d, d, |i, j| C64::new(self.re[i * d + j], self.im[i * d + j]));
        LinearOperator::new(self.label.clone(), space, m)
    }
}

fn basis_of(space: &FockSpace) -> Vec<[usize; 2]> {
    space.states().iter().map(|&(a, b)| [a, b]).collect()
}

fn space_from(basis: &[[usize; 2]], dim: usize, window: bool, path: &str) -> Result<Arc<FockSpace>> {
    if basis.len() != dim {
        return Err(schema(
            format!("{path}.basis"),
            format!("expected {dim} basis states, found {}", basis.len()),
        ));
    }
    let states: Vec<(usize, usize)> = basis.iter().map(|&[a, b]| (a, b)).collect();
    FockSpace::from_basis(&states, window)
        .map(Arc::new)
        .map_err(|e| match e {
            Error::Schema { message, .. } => schema(format!("{path}.basis"), message),
            other => other,
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub label: String,
    pub dim: usize,
    pub basis: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub window: bool,
    pub amps_re: Vec<f64>,
    pub amps_im: Vec<f64>,
}

impl StateJson {
    pub fn from_state(v: &StateVector) -> Self {
        Self {
            label: v.label().to_owned(),
            dim: v.dim(),
            basis: basis_of(v.space()),
            window: v.space().is_window(),
            amps_re: v.amps().iter().map(|z| z.re).collect(),
            amps_im: v.amps().iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_state(&self, path: &str) -> Result<StateVector> {
        let space = space_from(&self.basis, self.dim, self.window, path)?;
        for (name, v) in [("amps_re", &self.amps_re), ("amps_im", &self.amps_im)] {
            if v.len() != self.dim {
                return Err(schema(
                    format!("{path}.{name}"),
                    format!("expected {} entries, found {}", self.dim, v.len()),
                ));
            }
        }
        let amps = CVector::from_iterator(
            self.dim,
            self.amps_re.iter().zip(&self.amps_im).map(|(&r, &i)| C64::new(r, i)),
        );
        StateVector::new(self.label.clone(), space, amps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseOperatorJson {
    pub family: PhaseFamily,
    #[serde(flatten)]
    pub operator: OperatorJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<OperatorJson>>,
}

impl PhaseOperatorJson {
    pub fn from_phase_operator(op: &PhaseOperator) -> Self {
        Self {
            family: op.family,
            operator: OperatorJson::from_operator(&op.op),
            blocks: op
                .block_ops
                .as_ref()
                .map(|b| b.iter().map(OperatorJson::from_operator).collect()),
        }
    }

    pub fn to_phase_operator(&self, path: &str) -> Result<PhaseOperator> {
        let op = self.operator.to_operator(path)?;
        let block_ops = self
            .blocks
            .as_ref()
            .map(|bs| {
                bs.iter()
                    .enumerate()
                    .map(|(l, b)| b.to_operator(&format!("{path}.blocks[{l}]")))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let partition = match self.family.partition_kind() {
            Some(kind) if block_ops.is_some() => Some(build_partition(op.space(), kind)?),
            _ => None,
        };
        Ok(PhaseOperator {
            op,
            family: self.family,
            block_ops,
            partition,
        })
    }
}

/// One phase state with its labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseStateJson {
    pub family: PhaseFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    pub m: usize,
    pub phi: f64,
    #[serde(flatten)]
    pub state: StateJson,
}

pub fn phase_state_family_json(fam: &PhaseStateFamily) -> Vec<PhaseStateJson> {
    fam.states
        .iter()
        .enumerate()
        .map(|(m, v)| PhaseStateJson {
            family: fam.family.operator_family(),
            l: fam.family.block(),
            m,
            phi: fam.phi,
            state: StateJson::from_state(v),
        })
        .collect()
}

/// Rebuilds a family from its exported states; all entries must share
/// family, `l` and φ and list `m = 0, 1, …` in order.
pub fn phase_state_family_from_json(items: &[PhaseStateJson]) -> Result<PhaseStateFamily> {
    let first = items
        .first()
        .ok_or_else(|| schema("$", "empty phase-state list"))?;
    let family = match first.l {
        Some(l) => StateFamily::with_block(first.family, l),
        None => StateFamily::Ed,
    };
    let mut states = Vec::with_capacity(items.len());
    for (i, it) in items.iter().enumerate() {
        let path = format!("$[{i}]");
        if it.family != first.family || it.l != first.l || it.phi.to_bits() != first.phi.to_bits() {
            return Err(schema(&path, "family, l and phi must agree across the list"));
        }
        if it.m != i {
            return Err(schema(format!("{path}.m"), format!("expected m = {i}, found {}", it.m)));
        }
        states.push(it.state.to_state(&path)?);
    }
    Ok(PhaseStateFamily {
        family,
        phi: first.phi,
        states,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorPhaseStateJson {
    pub family: PhaseFamily,
    pub l: usize,
    pub m: usize,
    pub phi: f64,
    pub lines: Vec<StateJson>,
}

impl VectorPhaseStateJson {
    pub fn from_vector_state(v: &VectorPhaseState) -> Self {
        Self {
            family: v.family,
            l: v.l,
            m: v.m,
            phi: v.phi,
            lines: v.lines.iter().map(StateJson::from_state).collect(),
        }
    }

    pub fn to_vector_state(&self, path: &str) -> Result<VectorPhaseState> {
        let lines = self
            .lines
            .iter()
            .enumerate()
            .map(|(i, s)| s.to_state(&format!("{path}.lines[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        if self.l >= lines.len() {
            return Err(schema(format!("{path}.l"), "line index beyond the number of lines"));
        }
        Ok(VectorPhaseState {
            family: self.family,
            l: self.l,
            m: self.m,
            phi: self.phi,
            lines,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MubBasisJson {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    pub vectors: Vec<VectorJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MubSetJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub route: Route,
    pub bases: Vec<MubBasisJson>,
    pub overlap_table: Vec<Vec<f64>>,
    pub certificate: MubCertificate,
}

impl MubSetJson {
    pub fn from_set(set: &MubSet) -> Self {
        Self {
            n: set.n,
            route: set.route,
            bases: set
                .bases
                .iter()
                .map(|b| MubBasisJson {
                    label: b.label.clone(),
                    a: b.a,
                    vectors: b
                        .vectors
                        .iter()
                        .map(|v| VectorJson {
                            re: v.iter().map(|z| z.re).collect(),
                            im: v.iter().map(|z| z.im).collect(),
                        })
                        .collect(),
                })
                .collect(),
            overlap_table: set.overlap_table.clone(),
            certificate: set.certificate.clone(),
        }
    }

    pub fn to_set(&self) -> Result<MubSet> {
        let n = self.n;
        let mut bases = Vec::with_capacity(self.bases.len());
        for (bi, b) in self.bases.iter().enumerate() {
            if b.vectors.len() != n {
                return Err(schema(
                    format!("$.bases[{bi}].vectors"),
                    format!("expected {n} vectors, found {}", b.vectors.len()),
                ));
            }
            let mut vectors = Vec::with_capacity(n);
            for (vi, v) in b.vectors.iter().enumerate() {
                for (name, part) in [("re", &v.re), ("im", &v.im)] {
                    if part.len() != n {
                        return Err(schema(
                            format!("$.bases[{bi}].vectors[{vi}].{name}"),
                            format!("expected {n} entries, found {}", part.len()),
                        ));
                    }
                }
                vectors.push(CVector::from_iterator(
                    n,
                    v.re.iter().zip(&v.im).map(|(&r, &i)| C64::new(r, i)),
                ));
            }
            bases.push(MubBasis {
                label: b.label.clone(),
                a: b.a,
                vectors,
            });
        }
        Ok(MubSet {
            n,
            route: self.route,
            bases,
            overlap_table: self.overlap_table.clone(),
            certificate: self.certificate.clone(),
        })
    }
}

pub fn operator_to_json(op: &LinearOperator) -> Result<String> {
    to_pretty(&OperatorJson::from_operator(op))
}

pub fn operator_from_json(text: &str) -> Result<LinearOperator> {
    parse::<OperatorJson>(text)?.to_operator("$")
}

pub fn operators_to_json(ops: &[&LinearOperator]) -> Result<String> {
    to_pretty(&ops.iter().map(|op| OperatorJson::from_operator(op)).collect::<Vec<_>>())
}

pub fn operators_from_json(text: &str) -> Result<Vec<LinearOperator>> {
    parse::<Vec<OperatorJson>>(text)?
        .iter()
        .enumerate()
        .map(|(i, o)| o.to_operator(&format!("$[{i}]")))
        .collect()
}

pub fn state_to_json(v: &StateVector) -> Result<String> {
    to_pretty(&StateJson::from_state(v))
}

pub fn state_from_json(text: &str) -> Result<StateVector> {
    parse::<StateJson>(text)?.to_state("$")
}

pub fn phase_operator_to_json(op: &PhaseOperator) -> Result<String> {
    to_pretty(&PhaseOperatorJson::from_phase_operator(op))
}

pub fn phase_operator_from_json(text: &str) -> Result<PhaseOperator> {
    parse::<PhaseOperatorJson>(text)?.to_phase_operator("$")
}

pub fn mub_set_to_json(set: &MubSet) -> Result<String> {
    to_pretty(&MubSetJson::from_set(set))
}

pub fn mub_set_from_json(text: &str) -> Result<MubSet> {
    parse::<MubSetJson>(text)?.to_set()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kappa::KappaSpec;
    use crate::linalg::cis;

    #[test]
    fn operator_round_trip_k2() {
        let spec = KappaSpec::negative(2, 0.37);
        let rep = crate::fock::Representation::build(&spec).unwrap();
        let text = operator_to_json(&rep.a1_minus).unwrap();
        let back = operator_from_json(&text).unwrap();
        assert_eq!(back, rep.a1_minus);
    }

    #[test]
    fn length_mismatch_names_field() {
        let spec = KappaSpec::negative(1, 0.0);
        let rep = crate::fock::Representation::build(&spec).unwrap();
        let mut j = OperatorJson::from_operator(&rep.a1_plus);
        j.im.pop();
        let err = operator_from_json(&serde_json::to_string(&j).unwrap()).unwrap_err();
        match err {
            Error::Schema { path, .. } => assert_eq!(path, "$.im"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn type_error_carries_path() {
        let err = operator_from_json(r#"{"label":"x","dim":1,"basis":[[0,0]],"re":["a"],"im":[0]}"#)
            .unwrap_err();
        match err {
            Error::Json { path, .. } => assert!(path.starts_with("$.re"), "{path}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn state_round_trip_bit_exact() {
        let space = Arc::new(FockSpace::window(3));
        let mut v = StateVector::zeros("v", &space);
        for (j, z) in v.amps_mut().iter_mut().enumerate() {
            *z = cis(0.1 * j as f64 + 1e-17) * (1.0 / 3.0);
        }
        let back = state_from_json(&state_to_json(&v).unwrap()).unwrap();
        assert_eq!(back, v);
        assert!(back.space().is_window());
    }

    #[test]
    fn phase_operator_round_trip() {
        let spec = KappaSpec::negative(3, 1.1);
        let space = Arc::new(FockSpace::build(&spec));
        for op in [
            crate::phase_ops::build_e2d(&spec, &space).unwrap(),
            crate::phase_ops::build_ed(&spec, &space).unwrap(),
        ] {
            let back = phase_operator_from_json(&phase_operator_to_json(&op).unwrap()).unwrap();
            assert_eq!(back, op);
        }
    }

    #[test]
    fn mub_round_trip() {
        let set = crate::mub::build_mub_set(3, Route::E3, 1e-10).unwrap();
        let text = mub_set_to_json(&set).unwrap();
        assert!(text.contains("\"N\": 3"));
        let back = mub_set_from_json(&text).unwrap();
        assert_eq!(back, set);
        let cert: MubCertificate =
            parse(&serde_json::to_string(&set.certificate).unwrap()).unwrap();
        assert_eq!(cert, set.certificate);
    }

    #[test]
    fn phase_family_round_trip() {
        let spec = KappaSpec::negative(3, 0.4);
        let space = Arc::new(FockSpace::build(&spec));
        let fam = crate::phase_states::phase_states_e3(&spec, &space, 2, 0.4).unwrap();
        let text = to_pretty(&phase_state_family_json(&fam)).unwrap();
        let back = phase_state_family_from_json(&parse::<Vec<PhaseStateJson>>(&text).unwrap()).unwrap();
        assert_eq!(back, fam);
    }
}
