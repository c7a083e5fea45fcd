//! The unknown-state ensemble: pure product states realizing
//! `rho = (I + alpha P) / 2^n` via a randomized constant-depth preparation.
//!
//! Per qubit the procedure is: identity sites get a uniform
//! computational-basis state; non-identity sites before the last get a
//! uniform eigenstate of their letter (tracking the running eigenvalue
//! product in `eta`); the last non-identity site gets a uniform
//! computational-basis state with probability `1 - |alpha|`, otherwise the
//! eigenstate matching `eta`. The original procedure hard-codes the
//! 0.95/0.05 split; here the split is `|alpha| / (1 - |alpha|)` so the same
//! code serves both the hardware value 0.95 and the theory value 0.9.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pauli::{pauli_eigenstate, PauliLetter, PauliString, QubitPureState};
use crate::{Error, Result, C64};

/// Specification of one ensemble: qubit count, planted Pauli, and alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct EnsembleSpec {
    n: usize,
    pauli: PauliString,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    n: usize,
    pauli: PauliString,
    alpha: f64,
}

impl TryFrom<RawSpec> for EnsembleSpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        if raw.n != raw.pauli.len() {
            return Err(Error::InvalidSpec(format!(
                "n = {} but Pauli string has length {}",
                raw.n,
                raw.pauli.len()
            )));
        }
        EnsembleSpec::new(raw.pauli, raw.alpha)
    }
}

impl From<EnsembleSpec> for RawSpec {
    fn from(s: EnsembleSpec) -> RawSpec {
        RawSpec { n: s.n, pauli: s.pauli, alpha: s.alpha }
    }
}

impl EnsembleSpec {
    pub fn new(pauli: PauliString, alpha: f64) -> Result<Self> {
        if pauli.is_identity() {
            return Err(Error::InvalidSpec("planted Pauli must not be the identity".into()));
        }
        if !alpha.is_finite() || alpha.abs() >= 1.0 {
            return Err(Error::InvalidSpec(format!("alpha must lie in (-1, 1), got {alpha}")));
        }
        Ok(EnsembleSpec { n: pauli.len(), pauli, alpha })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pauli(&self) -> PauliString {
        self.pauli
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// One sampled pure product state from the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductStateSample {
    qubits: Vec<QubitPureState>,
}

impl ProductStateSample {
    pub fn qubit(&self, k: usize) -> &QubitPureState {
        &self.qubits[k]
    }

    pub fn n(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[QubitPureState] {
        &self.qubits
    }
}

/// Draw one product state from the ensemble.
pub fn sample_state<R: Rng>(spec: &EnsembleSpec, rng: &mut R) -> ProductStateSample {
    let last = spec.pauli.last_support().expect("spec excludes identity");
    let mut eta: i8 = if spec.alpha >= 0.0 { 1 } else { -1 };
    let mut qubits = Vec::with_capacity(spec.n);
    for k in 0..spec.n {
        let letter = spec.pauli.letter(k);
        let state = if letter == PauliLetter::I {
            if rng.gen_bool(0.5) {
                QubitPureState::zero()
            } else {
                QubitPureState::one()
            }
        } else if k < last {
            let sign: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
            eta *= sign;
            pauli_eigenstate(letter, sign)
        } else if rng.gen_bool(1.0 - spec.alpha.abs()) {
            if rng.gen_bool(0.5) {
                QubitPureState::zero()
            } else {
                QubitPureState::one()
            }
        } else {
            pauli_eigenstate(letter, eta)
        };
        qubits.push(state);
    }
    ProductStateSample { qubits }
}

/// Exhaustive enumeration of every preparation branch with its probability.
///
/// The branch-weighted average of `|psi><psi|` is exactly the ensemble
/// density matrix; this is the oracle side of that equivalence and also
/// feeds the exhaustive estimator-expectation checks.
pub fn enumerate_branches(spec: &EnsembleSpec) -> Result<Vec<(f64, ProductStateSample)>> {
    if spec.n > 16 {
        return Err(Error::ResourceLimit(format!(
            "branch enumeration supports n <= 16, got {}",
            spec.n
        )));
    }
    let last = spec.pauli.last_support().expect("spec excludes identity");
    let mut branches: Vec<(f64, i8, Vec<QubitPureState>)> = vec![(1.0, if spec.alpha >= 0.0 { 1 } else { -1 }, Vec::new())];
    for k in 0..spec.n {
        let letter = spec.pauli.letter(k);
        let mut next = Vec::with_capacity(branches.len() * 3);
        for (p, eta, qs) in &branches {
            let mut push = |prob: f64, eta: i8, q: QubitPureState| {
                let mut qs = qs.clone();
                qs.push(q);
                next.push((p * prob, eta, qs));
            };
            if letter == PauliLetter::I {
                push(0.5, *eta, QubitPureState::zero());
                push(0.5, *eta, QubitPureState::one());
            } else if k < last {
                push(0.5, *eta, pauli_eigenstate(letter, 1));
                push(0.5, -*eta, pauli_eigenstate(letter, -1));
            } else {
                let q = 1.0 - spec.alpha.abs();
                if q > 0.0 {
                    push(q * 0.5, *eta, QubitPureState::zero());
                    push(q * 0.5, *eta, QubitPureState::one());
                }
                push(spec.alpha.abs(), *eta, pauli_eigenstate(letter, *eta));
            }
        }
        branches = next;
    }
    Ok(branches
        .into_iter()
        .map(|(p, _, qubits)| (p, ProductStateSample { qubits }))
        .collect())
}

/// Dense `(I + alpha P) / 2^n` (brute-force oracle; n <= 10).
pub fn exact_density(spec: &EnsembleSpec) -> Result<DMatrix<C64>> {
    if spec.n > 10 {
        return Err(Error::ResourceLimit(format!(
            "exact density supports n <= 10, got {}",
            spec.n
        )));
    }
    let dim = 1usize << spec.n;
    let p = dense_pauli(&spec.pauli);
    let mut rho = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    let norm = 1.0 / dim as f64;
    for r in 0..dim {
        for c in 0..dim {
            let id = if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            rho[(r, c)] = (id + C64::new(spec.alpha, 0.0) * p[(r, c)]) * norm;
        }
    }
    Ok(rho)
}

/// Dense matrix of a Pauli word (qubit 0 = most significant bit).
pub fn dense_pauli(s: &PauliString) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for l in s.letters() {
        m = m.kronecker(&DMatrix::from_fn(2, 2, |r, c| l.matrix()[r][c]));
    }
    m
}

/// Dense projector of a product sample (oracle helper).
pub fn dense_projector(sample: &ProductStateSample) -> DMatrix<C64> {
    let mut v = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for q in sample.qubits() {
        v = v.kronecker(&DMatrix::from_fn(2, 1, |r, _| q.amp(r)));
    }
    let vc = v.map(|x| x.conj());
    &v * vc.transpose()
}
