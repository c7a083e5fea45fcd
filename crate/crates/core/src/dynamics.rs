//! Probing an unknown dynamics (a generated circuit) with conventional
//! Y-basis measurements or quantum-enhanced Bell-pair probing.
//!
//! The quantum-enhanced protocol (Bell pairs -> U on the system -> swap
//! system/memory -> U again -> pairwise Bell measurement) leaves the
//! register in `(U U^T (x) I)|Omega>`, so the outcome distribution over
//! Bell strings s is `|tr(M P_s)|^2 / 4^n` with `M = U U^T` and `P_s` the
//! Pauli word paired with s. The simulator works with the reduced n-qubit
//! object `M` only; sampling walks the conditional marginals of that
//! distribution one qubit at a time and never materializes the 4^n-entry
//! vector. The full 2n-qubit protocol survives as a brute-force test
//! oracle ([`full_protocol_distribution`]).

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::noise::ReadoutProfile;
use crate::pauli::BellOutcome;
use crate::statevec::{apply_gate, run_circuit, Circuit, Gate, StateVector};
use crate::{Error, Result, C64};

/// Largest n for the reduced quantum-enhanced simulation.
pub const MAX_REDUCED_QUBITS: usize = 12;

/// Which measurement strategy a dynamics experiment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsStrategyKind {
    Conventional,
    QuantumEnhanced,
}

impl DynamicsStrategyKind {
    /// Bits per measurement row: n conventional, 2n quantum-enhanced.
    pub fn row_width(self, n: usize) -> usize {
        match self {
            DynamicsStrategyKind::Conventional => n,
            DynamicsStrategyKind::QuantumEnhanced => 2 * n,
        }
    }
}

/// Configuration of one dynamics experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsExperimentConfig {
    pub n: usize,
    pub depth: usize,
    pub repetitions: usize,
    pub strategy: DynamicsStrategyKind,
    pub noise: Option<ReadoutProfile>,
}

impl DynamicsExperimentConfig {
    pub fn validate(&self, circuit: &Circuit) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidSpec("repetitions must be at least 1".into()));
        }
        if self.n != circuit.n || self.depth != circuit.depth {
            return Err(Error::InvalidSpec(format!(
                "config (n = {}, depth = {}) does not match circuit (n = {}, depth = {})",
                self.n, self.depth, circuit.n, circuit.depth
            )));
        }
        if let Some(profile) = &self.noise {
            profile.check_width(self.strategy.row_width(self.n))?;
        }
        Ok(())
    }
}

/// Measurement rows from repeated experiments on one circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeMatrix {
    width: usize,
    rows: Vec<Vec<u8>>,
}

impl OutcomeMatrix {
    pub fn new(width: usize, rows: Vec<Vec<u8>>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::DimensionMismatch("row width mismatch".into()));
        }
        Ok(OutcomeMatrix { width, rows })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }
}

/// Map the output state into the Y eigenbasis (S^dag then H per qubit) so
/// computational bits encode Y outcomes (bit 0 <-> eigenvalue +1).
fn y_basis_rotation(state: &mut StateVector) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // H * S^dag
    let m = [
        C64::new(h, 0.0),
        C64::new(0.0, -h),
        C64::new(h, 0.0),
        C64::new(0.0, h),
    ];
    for q in 0..state.n() {
        state.apply_single(&m, q);
    }
}

fn sample_index_from_cdf<R: Rng>(cdf: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    match cdf.binary_search_by(|p| p.partial_cmp(&u).unwrap()) {
        Ok(i) | Err(i) => i.min(cdf.len() - 1),
    }
}

/// Conventional probing: run the circuit on `|0^n>`, measure every qubit
/// in the Y basis, repeat.
pub fn run_conventional_dynamics<R: Rng>(
    circuit: &Circuit,
    cfg: &DynamicsExperimentConfig,
    rng: &mut R,
) -> Result<OutcomeMatrix> {
    if cfg.strategy != DynamicsStrategyKind::Conventional {
        return Err(Error::InvalidSpec("config strategy is not conventional".into()));
    }
    cfg.validate(circuit)?;
    let mut state = run_circuit(circuit)?;
    y_basis_rotation(&mut state);
    let probs = state.probabilities();
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cdf.push(acc);
    }
    let n = circuit.n;
    let mut rows = Vec::with_capacity(cfg.repetitions);
    for _ in 0..cfg.repetitions {
        let idx = sample_index_from_cdf(&cdf, rng);
        let mut bits: Vec<u8> = (0..n).map(|q| ((idx >> (n - 1 - q)) & 1) as u8).collect();
        if let Some(profile) = &cfg.noise {
            bits = profile.apply(&bits, rng)?;
        }
        rows.push(bits);
    }
    OutcomeMatrix::new(n, rows)
}

/// The distribution over Bell-outcome strings induced by the
/// quantum-enhanced protocol, represented through `M = U U^T`.
pub struct BellStringDistribution {
    n: usize,
    m: DMatrix<C64>,
}

/// Cap for materializing the full probability vector (oracle use).
pub const MAX_ENUMERATED_QUBITS: usize = 8;

impl BellStringDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `M = U U^T`.
    pub fn reduced_matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    /// Exact probability of a single outcome string, `|tr(M P_s)|^2/4^n`,
    /// in O(2^n) time.
    pub fn prob_of(&self, outcomes: &[BellOutcome]) -> Result<f64> {
        if outcomes.len() != self.n {
            return Err(Error::DimensionMismatch("outcome string length != n".into()));
        }
        let dim = 1usize << self.n;
        // P_s maps |j> to phase * |j ^ flip>, with phase the product of
        // per-qubit entries
        let mut trace = C64::new(0.0, 0.0);
        for j in 0..dim {
            let mut phase = C64::new(1.0, 0.0);
            let mut k = j;
            for (q, outcome) in outcomes.iter().enumerate() {
                let bit = (j >> (self.n - 1 - q)) & 1;
                let mask = 1usize << (self.n - 1 - q);
                match outcome.paired_letter() {
                    crate::pauli::PauliLetter::I => {}
                    crate::pauli::PauliLetter::X => {
                        k ^= mask;
                    }
                    crate::pauli::PauliLetter::Y => {
                        k ^= mask;
                        // Y|0> = i|1>, Y|1> = -i|0>
                        phase *= if bit == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
                    }
                    crate::pauli::PauliLetter::Z => {
                        if bit == 1 {
                            phase = -phase;
                        }
                    }
                }
            }
            // (M P_s)[j, j] = M[j, k(j)] * phase_j
            trace += self.m[(j, k)] * phase;
        }
        let dim_f = dim as f64;
        Ok(trace.norm_sqr() / (dim_f * dim_f))
    }

    /// All 4^n probabilities, indexed by the concatenated 2-bit outcome
    /// encodings (qubit 0 most significant). Oracle path, n <= 8.
    pub fn all_probs(&self) -> Result<Vec<f64>> {
        if self.n > MAX_ENUMERATED_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "probability enumeration supports n <= {MAX_ENUMERATED_QUBITS}, got {}",
                self.n
            )));
        }
        let mut out = vec![0.0; 1usize << (2 * self.n)];
        let mut outcomes = vec![BellOutcome::PsiPlus; self.n];
        self.enumerate_rec(0, &mut outcomes, &mut out)?;
        Ok(out)
    }

    fn enumerate_rec(&self, q: usize, outcomes: &mut Vec<BellOutcome>, out: &mut [f64]) -> Result<()> {
        if q == self.n {
            let mut idx = 0usize;
            for o in outcomes.iter() {
                let (b0, b1) = o.to_bits();
                idx = (idx << 2) | ((b0 as usize) << 1) | b1 as usize;
            }
            out[idx] = self.prob_of(outcomes)?;
            return Ok(());
        }
        for &o in &BellOutcome::ALL {
            outcomes[q] = o;
            self.enumerate_rec(q + 1, outcomes, out)?;
        }
        Ok(())
    }

    /// Draw `shots` outcome strings, returned as (string, count) groups in
    /// depth-first conditional order. The walk splits the shot budget
    /// multinomially among the four children of each prefix, so only the
    /// visited part of the conditional tree is ever expanded.
    pub fn sample_counts<R: Rng>(&self, shots: u64, rng: &mut R) -> Vec<(Vec<BellOutcome>, u64)> {
        let mut out = Vec::new();
        if shots == 0 {
            return out;
        }
        let mut prefix = Vec::with_capacity(self.n);
        sample_rec(&self.m, shots, &mut prefix, &mut out, rng);
        out
    }
}

fn frobenius2(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum()
}

/// The four single-qubit reductions `tr_first((sigma (x) I) B)` of a block
/// matrix, ordered to match `BellOutcome::ALL` via the outcome/letter
/// bijection: Psi+ -> I, Psi- -> Z, Phi+ -> X, Phi- -> Y.
fn child_blocks(b: &DMatrix<C64>) -> [DMatrix<C64>; 4] {
    let h = b.nrows() / 2;
    let b00 = b.view((0, 0), (h, h));
    let b01 = b.view((0, h), (h, h));
    let b10 = b.view((h, 0), (h, h));
    let b11 = b.view((h, h), (h, h));
    let i_child = &b00 + &b11;
    let z_child = &b00 - &b11;
    let x_child = &b01 + &b10;
    let y_child = (&b01 - &b10).map(|v| v * C64::new(0.0, 1.0));
    [i_child, z_child, x_child, y_child]
}

const CHILD_OUTCOMES: [BellOutcome; 4] = [
    BellOutcome::PsiPlus,
    BellOutcome::PsiMinus,
    BellOutcome::PhiPlus,
    BellOutcome::PhiMinus,
];

fn sample_rec<R: Rng>(
    block: &DMatrix<C64>,
    shots: u64,
    prefix: &mut Vec<BellOutcome>,
    out: &mut Vec<(Vec<BellOutcome>, u64)>,
    rng: &mut R,
) {
    if block.nrows() == 1 {
        out.push((prefix.clone(), shots));
        return;
    }
    let children = child_blocks(block);
    let weights: Vec<f64> = children.iter().map(frobenius2).collect();
    let mut remaining_weight: f64 = weights.iter().sum();
    let mut remaining_shots = shots;
    for (i, child) in children.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        let count = if i == 3 {
            remaining_shots
        } else {
            let p = if remaining_weight > 0.0 {
                (weights[i] / remaining_weight).clamp(0.0, 1.0)
            } else {
                0.0
            };
            Binomial::new(remaining_shots, p).expect("p in [0,1]").sample(rng)
        };
        remaining_weight -= weights[i];
        if count > 0 {
            prefix.push(CHILD_OUTCOMES[i]);
            sample_rec(child, count, prefix, out, rng);
            prefix.pop();
        }
        remaining_shots -= count;
    }
}

/// Build `M = U U^T` without materializing U: each column j is the circuit
/// applied to `U^T e_j`, which is itself the transposed circuit applied to
/// the basis vector.
fn reduced_matrix(circuit: &Circuit) -> Result<DMatrix<C64>> {
    let dim = 1usize << circuit.n;
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for col in 0..dim {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[col] = C64::new(1.0, 0.0);
        let mut state = StateVector::from_amplitudes(circuit.n, amps)?;
        apply_circuit_transposed(&mut state, circuit)?;
        for gate in &circuit.gates {
            apply_gate(&mut state, gate)?;
        }
        for row in 0..dim {
            m[(row, col)] = state.amps()[row];
        }
    }
    Ok(m)
}

/// Apply `U^T` (reverse gate order, each gate matrix transposed).
fn apply_circuit_transposed(state: &mut StateVector, circuit: &Circuit) -> Result<()> {
    for gate in circuit.gates.iter().rev() {
        apply_gate_transposed(state, gate)?;
    }
    Ok(())
}

fn apply_gate_transposed(state: &mut StateVector, gate: &Gate) -> Result<()> {
    match gate {
        Gate::PhasedXz { a, x, z, target } => {
            let m = crate::statevec::phased_xz_matrix(*a, *x, *z);
            let t = [m[0], m[2], m[1], m[3]];
            ensure_target(state, &[*target])?;
            state.apply_single(&t, *target);
        }
        Gate::RotY { angle, target } => {
            // (e^{-i t Y})^T = e^{i t Y}
            let m = crate::statevec::rot_y_matrix(-*angle);
            ensure_target(state, &[*target])?;
            state.apply_single(&m, *target);
        }
        Gate::H { target } => {
            ensure_target(state, &[*target])?;
            state.apply_single(&crate::statevec::hadamard_matrix(), *target);
        }
        Gate::Syc { targets } => {
            // SYC is symmetric
            ensure_target(state, targets)?;
            state.apply_two(&crate::statevec::syc_matrix(), targets[0], targets[1]);
        }
        Gate::Swap { targets } => {
            ensure_target(state, targets)?;
            state.apply_two(&crate::statevec::swap_matrix(), targets[0], targets[1]);
        }
        Gate::Cnot { control, target } => {
            ensure_target(state, &[*control, *target])?;
            state.apply_two(&crate::statevec::cnot_matrix(), *control, *target);
        }
        Gate::CompiledTwoQubit { matrix, targets } => {
            let mut t = [C64::new(0.0, 0.0); 16];
            for i in 0..4 {
                for j in 0..4 {
                    let (re, im) = matrix[4 * j + i];
                    t[4 * i + j] = C64::new(re, im);
                }
            }
            ensure_target(state, targets)?;
            state.apply_two(&t, targets[0], targets[1]);
        }
    }
    Ok(())
}

fn ensure_target(state: &StateVector, targets: &[usize]) -> Result<()> {
    if targets.iter().any(|&t| t >= state.n()) {
        return Err(Error::InvalidDimension("gate target out of range".into()));
    }
    Ok(())
}

/// The quantum-enhanced outcome distribution of a circuit (n <= 12).
pub fn quantum_enhanced_distribution(circuit: &Circuit) -> Result<BellStringDistribution> {
    if circuit.n > MAX_REDUCED_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "quantum-enhanced simulation supports n <= {MAX_REDUCED_QUBITS}, got {}",
            circuit.n
        )));
    }
    circuit.validate()?;
    Ok(BellStringDistribution { n: circuit.n, m: reduced_matrix(circuit)? })
}

/// Quantum-enhanced probing: sample Bell strings from the reduced
/// distribution and encode them as 2n-bit rows.
pub fn run_quantum_enhanced_dynamics<R: Rng>(
    circuit: &Circuit,
    cfg: &DynamicsExperimentConfig,
    rng: &mut R,
) -> Result<OutcomeMatrix> {
    if cfg.strategy != DynamicsStrategyKind::QuantumEnhanced {
        return Err(Error::InvalidSpec("config strategy is not quantum_enhanced".into()));
    }
    cfg.validate(circuit)?;
    let dist = quantum_enhanced_distribution(circuit)?;
    let groups = dist.sample_counts(cfg.repetitions as u64, rng);
    let mut rows = Vec::with_capacity(cfg.repetitions);
    for (outcomes, count) in groups {
        let mut bits = Vec::with_capacity(2 * circuit.n);
        for o in &outcomes {
            let (b0, b1) = o.to_bits();
            bits.push(b0);
            bits.push(b1);
        }
        for _ in 0..count {
            let row = match &cfg.noise {
                Some(profile) => profile.apply(&bits, rng)?,
                None => bits.clone(),
            };
            rows.push(row);
        }
    }
    OutcomeMatrix::new(2 * circuit.n, rows)
}

/// Brute-force oracle: simulate the full 2n-qubit protocol (Bell pairs,
/// U on the system, swap, U again, pairwise Bell measurement) and return
/// the distribution over Bell strings in `all_probs` index order. n <= 6.
pub fn full_protocol_distribution(circuit: &Circuit) -> Result<Vec<f64>> {
    if circuit.n > 6 {
        return Err(Error::ResourceLimit(format!(
            "full-protocol oracle supports n <= 6, got {}",
            circuit.n
        )));
    }
    let n = circuit.n;
    let mut state = StateVector::zero(2 * n)?;
    // Bell pair on (k, n + k)
    for k in 0..n {
        apply_gate(&mut state, &Gate::H { target: k })?;
        apply_gate(&mut state, &Gate::Cnot { control: k, target: n + k })?;
    }
    for gate in &circuit.gates {
        apply_gate(&mut state, gate)?;
    }
    for k in 0..n {
        apply_gate(&mut state, &Gate::Swap { targets: [k, n + k] })?;
    }
    for gate in &circuit.gates {
        apply_gate(&mut state, gate)?;
    }
    // rotate every pair from the Bell basis to the computational basis
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let o = C64::new(0.0, 0.0);
    let hh = C64::new(h, 0.0);
    // columns of B are the Bell vectors; apply B^dag = B^T (B is real)
    let b_dag = [
        hh, o, o, hh, // <Psi+|
        hh, o, o, -hh, // <Psi-|
        o, hh, hh, o, // <Phi+|
        o, hh, -hh, o, // <Phi-|
    ];
    for k in 0..n {
        state.apply_two(&b_dag, k, n + k);
    }
    // computational index has system bit k at position k and memory bit at
    // n + k; regroup into per-qubit 2-bit outcome indices
    let probs = state.probabilities();
    let mut out = vec![0.0; 1usize << (2 * n)];
    for (idx, p) in probs.iter().enumerate() {
        let mut key = 0usize;
        for k in 0..n {
            let b0 = (idx >> (2 * n - 1 - k)) & 1;
            let b1 = (idx >> (n - 1 - k)) & 1;
            key = (key << 2) | (b0 << 1) | b1;
        }
        out[key] += p;
    }
    Ok(out)
}

/// Exact probability of the all-Psi+ string, `|tr(M)|^2/4^n`.
pub fn all_psi_plus_probability(dist: &BellStringDistribution) -> f64 {
    let tr: C64 = dist.reduced_matrix().diagonal().iter().copied().sum();
    let dim = (1usize << dist.n()) as f64;
    tr.norm_sqr() / (dim * dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rngstream::stream;
    use crate::statevec::{generate_1d_circuit, SymmetryClass};

    fn cfg(circuit: &Circuit, reps: usize, strategy: DynamicsStrategyKind) -> DynamicsExperimentConfig {
        DynamicsExperimentConfig {
            n: circuit.n,
            depth: circuit.depth,
            repetitions: reps,
            strategy,
            noise: None,
        }
    }

    #[test]
    fn identity_circuit_gives_uniform_y_outcomes() {
        // depth counts generated rounds; a gateless circuit is depth 0 in
        // spirit, built here directly
        let circuit = Circuit {
            n: 3,
            depth: 0,
            symmetry: SymmetryClass::General,
            seed: None,
            gates: vec![],
        };
        let c = DynamicsExperimentConfig {
            n: 3,
            depth: 0,
            repetitions: 30_000,
            strategy: DynamicsStrategyKind::Conventional,
            noise: None,
        };
        let mut rng = stream(90, "dyn", 0);
        let m = run_conventional_dynamics(&circuit, &c, &mut rng).unwrap();
        for q in 0..3 {
            let ones: usize = m.rows().iter().map(|r| r[q] as usize).sum();
            let rate = ones as f64 / m.len() as f64;
            let sigma = (0.25f64 / m.len() as f64).sqrt();
            assert!((rate - 0.5).abs() < 4.0 * sigma, "qubit {q}: rate {rate}");
        }
    }

    #[test]
    fn t_symmetric_y_bias_is_exactly_zero() {
        // single-bit marginals of the exact distribution are 1/2
        let mut rng = stream(91, "dyn", 0);
        let circuit = generate_1d_circuit(4, 3, SymmetryClass::TSymmetric, &mut rng).unwrap();
        let mut state = run_circuit(&circuit).unwrap();
        y_basis_rotation(&mut state);
        let probs = state.probabilities();
        for q in 0..4 {
            let mask = 1usize << (4 - 1 - q);
            let p1: f64 = probs.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, p)| p).sum();
            assert!((p1 - 0.5).abs() < 1e-9, "qubit {q}: marginal {p1}");
        }
    }

    #[test]
    fn t_symmetric_empirical_y_mean_within_noise() {
        let mut rng = stream(92, "dyn", 0);
        let circuit = generate_1d_circuit(4, 3, SymmetryClass::TSymmetric, &mut rng).unwrap();
        let c = cfg(&circuit, 20_000, DynamicsStrategyKind::Conventional);
        let m = run_conventional_dynamics(&circuit, &c, &mut rng).unwrap();
        for q in 0..4 {
            let mean: f64 = m.rows().iter().map(|r| 1.0 - 2.0 * f64::from(r[q])).sum::<f64>() / m.len() as f64;
            let sigma = (1.0 / m.len() as f64).sqrt();
            assert!(mean.abs() < 3.0 * sigma, "qubit {q}: mean {mean}");
        }
    }

    #[test]
    fn conventional_marginals_match_dense_born_probabilities() {
        let mut rng = stream(93, "dyn", 0);
        let circuit = generate_1d_circuit(5, 4, SymmetryClass::General, &mut rng).unwrap();
        let mut state = run_circuit(&circuit).unwrap();
        y_basis_rotation(&mut state);
        let probs = state.probabilities();
        let c = cfg(&circuit, 40_000, DynamicsStrategyKind::Conventional);
        let m = run_conventional_dynamics(&circuit, &c, &mut rng).unwrap();
        for q in 0..5 {
            let mask = 1usize << (5 - 1 - q);
            let exact: f64 = probs.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, p)| p).sum();
            let ones: usize = m.rows().iter().map(|r| r[q] as usize).sum();
            let rate = ones as f64 / m.len() as f64;
            let sigma = (exact * (1.0 - exact) / m.len() as f64).sqrt().max(1e-4);
            assert!((rate - exact).abs() < 3.5 * sigma, "qubit {q}: {rate} vs {exact}");
        }
    }

    #[test]
    fn general_marginal_deviation_is_small_at_n_ten() {
        let mut rng = stream(94, "dyn", 0);
        let circuit = generate_1d_circuit(10, 10, SymmetryClass::General, &mut rng).unwrap();
        let mut state = run_circuit(&circuit).unwrap();
        y_basis_rotation(&mut state);
        let probs = state.probabilities();
        let mut total_dev = 0.0;
        for q in 0..10 {
            let mask = 1usize << (10 - 1 - q);
            let p1: f64 = probs.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, p)| p).sum();
            total_dev += (p1 - 0.5).abs();
        }
        assert!(total_dev / 10.0 < 0.05, "mean deviation {}", total_dev / 10.0);
    }

    #[test]
    fn t_symmetric_distribution_concentrates_on_all_psi_plus() {
        let mut rng = stream(95, "dyn", 0);
        let circuit = generate_1d_circuit(3, 3, SymmetryClass::TSymmetric, &mut rng).unwrap();
        let dist = quantum_enhanced_distribution(&circuit).unwrap();
        let p = dist.prob_of(&[BellOutcome::PsiPlus; 3]).unwrap();
        assert!((p - 1.0).abs() < 1e-9, "all-Psi+ probability {p}");
        let c = cfg(&circuit, 64, DynamicsStrategyKind::QuantumEnhanced);
        let m = run_quantum_enhanced_dynamics(&circuit, &c, &mut rng).unwrap();
        for row in m.rows() {
            assert!(row.iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = stream(96, "dyn", 0);
        for class in [SymmetryClass::General, SymmetryClass::TSymmetric] {
            let circuit = generate_1d_circuit(3, 2, class, &mut rng).unwrap();
            let dist = quantum_enhanced_distribution(&circuit).unwrap();
            let total: f64 = dist.all_probs().unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-9, "{class}: total {total}");
        }
    }

    #[test]
    fn reduced_distribution_matches_full_protocol_oracle() {
        let mut rng = stream(97, "dyn", 0);
        for class in [SymmetryClass::General, SymmetryClass::TSymmetric] {
            for n in [2usize, 3, 4] {
                let circuit = generate_1d_circuit(n, 2, class, &mut rng).unwrap();
                let dist = quantum_enhanced_distribution(&circuit).unwrap();
                let reduced = dist.all_probs().unwrap();
                let full = full_protocol_distribution(&circuit).unwrap();
                let tv: f64 = reduced
                    .iter()
                    .zip(&full)
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>()
                    / 2.0;
                assert!(tv < 1e-9, "{class} n = {n}: TV = {tv:.3e}");
            }
        }
    }

    #[test]
    fn sampler_matches_exact_distribution() {
        let mut rng = stream(98, "dyn", 0);
        let circuit = generate_1d_circuit(2, 2, SymmetryClass::General, &mut rng).unwrap();
        let dist = quantum_enhanced_distribution(&circuit).unwrap();
        let exact = dist.all_probs().unwrap();
        let shots = 200_000u64;
        let groups = dist.sample_counts(shots, &mut rng);
        let mut counts = vec![0u64; exact.len()];
        for (outcomes, count) in &groups {
            let mut idx = 0usize;
            for o in outcomes {
                let (b0, b1) = o.to_bits();
                idx = (idx << 2) | ((b0 as usize) << 1) | b1 as usize;
            }
            counts[idx] += count;
        }
        assert_eq!(counts.iter().sum::<u64>(), shots);
        for (i, &p) in exact.iter().enumerate() {
            let freq = counts[i] as f64 / shots as f64;
            let sigma = (p * (1.0 - p) / shots as f64).sqrt().max(2e-5);
            assert!((freq - p).abs() < 4.5 * sigma, "outcome {i}: {freq} vs {p}");
        }
    }

    #[test]
    fn general_circuit_all_psi_plus_frequency_matches_trace_formula() {
        let mut rng = stream(99, "dyn", 0);
        let circuit = generate_1d_circuit(3, 3, SymmetryClass::General, &mut rng).unwrap();
        let dist = quantum_enhanced_distribution(&circuit).unwrap();
        let exact = all_psi_plus_probability(&dist);
        let c = cfg(&circuit, 50_000, DynamicsStrategyKind::QuantumEnhanced);
        let m = run_quantum_enhanced_dynamics(&circuit, &c, &mut rng).unwrap();
        let hits = m.rows().iter().filter(|r| r.iter().all(|&b| b == 0)).count();
        let freq = hits as f64 / m.len() as f64;
        let sigma = (exact * (1.0 - exact) / m.len() as f64).sqrt().max(1e-5);
        assert!((freq - exact).abs() < 4.0 * sigma, "{freq} vs {exact}");
    }

    #[test]
    fn readout_noise_damps_all_psi_plus_frequency() {
        let mut rng = stream(100, "dyn", 0);
        let n = 3;
        let circuit = generate_1d_circuit(n, 3, SymmetryClass::TSymmetric, &mut rng).unwrap();
        let mut c = cfg(&circuit, 40_000, DynamicsStrategyKind::QuantumEnhanced);
        c.noise = Some(ReadoutProfile::uniform(2 * n, 0.05).unwrap());
        let m = run_quantum_enhanced_dynamics(&circuit, &c, &mut rng).unwrap();
        let hits = m.rows().iter().filter(|r| r.iter().all(|&b| b == 0)).count();
        let freq = hits as f64 / m.len() as f64;
        let expect = 0.95f64.powi(2 * n as i32);
        let sigma = (expect * (1.0 - expect) / m.len() as f64).sqrt();
        assert!((freq - expect).abs() < 3.5 * sigma, "{freq} vs {expect}");
    }

    #[test]
    fn identical_seeds_give_identical_outcomes() {
        let mut gen_rng = stream(101, "dyn", 0);
        let circuit = generate_1d_circuit(4, 3, SymmetryClass::General, &mut gen_rng).unwrap();
        for strategy in [DynamicsStrategyKind::Conventional, DynamicsStrategyKind::QuantumEnhanced] {
            let c = cfg(&circuit, 200, strategy);
            let run = |seed: u64| {
                let mut rng = stream(seed, "dyn-shots", 7);
                match strategy {
                    DynamicsStrategyKind::Conventional => {
                        run_conventional_dynamics(&circuit, &c, &mut rng).unwrap()
                    }
                    DynamicsStrategyKind::QuantumEnhanced => {
                        run_quantum_enhanced_dynamics(&circuit, &c, &mut rng).unwrap()
                    }
                }
            };
            assert_eq!(run(5), run(5));
            assert_ne!(run(5), run(6));
        }
    }

    #[test]
    fn caps_and_config_mismatches_are_rejected() {
        let circuit = Circuit {
            n: 13,
            depth: 1,
            symmetry: SymmetryClass::General,
            seed: None,
            gates: vec![],
        };
        assert!(matches!(
            quantum_enhanced_distribution(&circuit),
            Err(Error::ResourceLimit(_))
        ));

        let mut rng = stream(102, "dyn", 0);
        let circuit = generate_1d_circuit(3, 2, SymmetryClass::General, &mut rng).unwrap();
        let mut c = cfg(&circuit, 0, DynamicsStrategyKind::Conventional);
        assert!(run_conventional_dynamics(&circuit, &c, &mut rng).is_err());
        c.repetitions = 5;
        c.strategy = DynamicsStrategyKind::QuantumEnhanced;
        assert!(run_conventional_dynamics(&circuit, &c, &mut rng).is_err());
    }
}
