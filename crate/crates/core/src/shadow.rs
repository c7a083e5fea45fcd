//! The best known conventional strategy for the state-learning task:
//! classical shadows from randomized single-copy Pauli measurements.
//!
//! Each experiment measures one fresh copy in a uniformly random per-qubit
//! basis from {X, Y, Z}. A snapshot contributes `3 * outcome` per matching
//! site of the queried observable and zero whenever any basis on the
//! observable's support mismatches; the resulting plain mean is unbiased
//! for `tr(O rho)`.

use rand::Rng;

use crate::ensemble::{sample_state, EnsembleSpec};
use crate::noise::ReadoutProfile;
use crate::pauli::{PauliLetter, PauliString};
use crate::{Error, Result};

const BASES: [PauliLetter; 3] = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

/// One randomized-Pauli measurement: per-qubit bases (no identity) and
/// +-1 outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliSnapshot {
    bases: PauliString,
    outcomes: Vec<i8>,
}

impl PauliSnapshot {
    pub fn new(bases: PauliString, outcomes: Vec<i8>) -> Result<Self> {
        if bases.letters().any(|l| l == PauliLetter::I) {
            return Err(Error::InvalidSpec("snapshot bases must avoid the identity".into()));
        }
        if bases.len() != outcomes.len() {
            return Err(Error::DimensionMismatch("bases and outcomes differ in length".into()));
        }
        if outcomes.iter().any(|&o| o != 1 && o != -1) {
            return Err(Error::Validation("outcomes must be +-1".into()));
        }
        Ok(PauliSnapshot { bases, outcomes })
    }

    pub fn bases(&self) -> PauliString {
        self.bases
    }

    pub fn outcome(&self, k: usize) -> i8 {
        self.outcomes[k]
    }

    /// Outcome eigenvalues as measurement bits (+1 -> 0, -1 -> 1).
    pub fn to_bits(&self) -> Vec<u8> {
        self.outcomes.iter().map(|&o| u8::from(o < 0)).collect()
    }

    pub fn from_bits(bases: PauliString, bits: &[u8]) -> Result<Self> {
        let outcomes = bits.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect();
        PauliSnapshot::new(bases, outcomes)
    }
}

/// Shadow data from N conventional experiments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowDataset {
    snapshots: Vec<PauliSnapshot>,
    n: usize,
}

impl ShadowDataset {
    pub fn new(n: usize, snapshots: Vec<PauliSnapshot>) -> Result<Self> {
        if snapshots.iter().any(|s| s.bases.len() != n) {
            return Err(Error::DimensionMismatch("snapshot width differs from n".into()));
        }
        Ok(ShadowDataset { snapshots, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshots(&self) -> &[PauliSnapshot] {
        &self.snapshots
    }
}

/// Run N randomized-Pauli experiments on fresh copies of the state.
pub fn run_conventional<R: Rng>(
    spec: &EnsembleSpec,
    n_experiments: usize,
    noise: Option<&ReadoutProfile>,
    rng: &mut R,
) -> Result<ShadowDataset> {
    if n_experiments == 0 {
        return Err(Error::InvalidSpec("experiment count must be at least 1".into()));
    }
    if let Some(profile) = noise {
        profile.check_width(spec.n())?;
    }
    let mut snapshots = Vec::with_capacity(n_experiments);
    for _ in 0..n_experiments {
        let state = sample_state(spec, rng);
        let mut bases = PauliString::identity(spec.n())?;
        let mut outcomes = Vec::with_capacity(spec.n());
        for k in 0..spec.n() {
            let basis = BASES[rng.gen_range(0..3)];
            bases.set(k, basis);
            // Born rule: P(+1) = (1 + <sigma>)/2 on this qubit
            let p_plus = 0.5 * (1.0 + state.qubit(k).expectation(basis));
            outcomes.push(if rng.gen_bool(p_plus.clamp(0.0, 1.0)) { 1 } else { -1 });
        }
        let mut snapshot = PauliSnapshot::new(bases, outcomes)?;
        if let Some(profile) = noise {
            let bits = profile.apply(&snapshot.to_bits(), rng)?;
            snapshot = PauliSnapshot::from_bits(bases, &bits)?;
        }
        snapshots.push(snapshot);
    }
    ShadowDataset::new(spec.n(), snapshots)
}

/// Per-snapshot estimator term: 3^w * product of outcomes on the support
/// of O when every support basis matches, else 0.
fn snapshot_term(snapshot: &PauliSnapshot, observable: &PauliString) -> f64 {
    let mut term = 1.0;
    for (k, letter) in observable.letters().enumerate() {
        if letter == PauliLetter::I {
            continue;
        }
        if snapshot.bases.letter(k) != letter {
            return 0.0;
        }
        term *= 3.0 * f64::from(snapshot.outcome(k));
    }
    term
}

/// Classical-shadow estimate of `tr(O rho)` (plain mean over snapshots).
pub fn shadow_estimate(data: &ShadowDataset, observable: &PauliString) -> Result<f64> {
    if observable.len() != data.n() {
        return Err(Error::DimensionMismatch(format!(
            "observable has length {}, dataset has n = {}",
            observable.len(),
            data.n()
        )));
    }
    if data.is_empty() {
        return Err(Error::InvalidSpec("empty dataset".into()));
    }
    let sum: f64 = data.snapshots.iter().map(|s| snapshot_term(s, observable)).sum();
    Ok(sum / data.len() as f64)
}

/// Conventional comparator: argmax of |shadow estimate|, ties to index 1.
pub fn compare_observables_conventional(
    data: &ShadowDataset,
    o1: &PauliString,
    o2: &PauliString,
) -> Result<usize> {
    if o1 == o2 {
        return Err(Error::InvalidTask("observables must be distinct".into()));
    }
    let e1 = shadow_estimate(data, o1)?.abs();
    let e2 = shadow_estimate(data, o2)?.abs();
    Ok(if e2 > e1 { 2 } else { 1 })
}
