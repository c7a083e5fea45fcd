//! The principal-component distinguishing task: states with a planted
//! Haar-random component on the first-qubit |0> or |1> sector,
//!
//! ```text
//! rho_A = 1/2 |0><0| (x) |psi><psi| + 1/2 |1><1| (x) I/2^(n-1)
//! rho_B = 1/2 |1><1| (x) |psi><psi| + 1/2 |0><0| (x) I/2^(n-1)
//! ```
//!
//! The quantum-enhanced estimator measures pairs of copies collectively
//! (virtual distillation): qubit pair 1 in the joint eigenbasis
//! {|00>, |11>, Phi+, Phi-} of `M1 = (Z (x) I + I (x) Z)/2 * SWAP` and
//! `SWAP`, the remaining pairs in the Bell basis, and estimates
//! `tr(Z1 rho^2)/tr(rho^2)` as a ratio of sign-product means. The
//! conventional baseline measures single copies in fresh Haar-random
//! product bases and applies a likelihood-ratio test whose
//! marginalization over the hidden state is approximated by Monte Carlo
//! over a fixed-size net of Haar candidates; the net covers the
//! low-dimensional state spaces but cannot cover the exponentially large
//! ones, so its power fades with n.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::statevec::StateVector;
use crate::{Error, Result, C64};

/// Which hypothesis generated the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    A,
    B,
}

impl Hypothesis {
    pub fn sign(self) -> f64 {
        match self {
            Hypothesis::A => 1.0,
            Hypothesis::B => -1.0,
        }
    }
}

/// The hidden (n-1)-qubit pure component.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenComponent {
    psi: Vec<C64>,
}

impl HiddenComponent {
    pub fn amplitudes(&self) -> &[C64] {
        &self.psi
    }

    pub fn qubits(&self) -> usize {
        self.psi.len().trailing_zeros() as usize
    }
}

/// Largest hidden-component register.
pub const MAX_HIDDEN_QUBITS: usize = 10;

/// Largest instance the estimators accept.
pub const MAX_INSTANCE_QUBITS: usize = 8;

/// Size of the Haar candidate net used by the conventional baseline.
pub const CANDIDATE_NET_SIZE: usize = 64;

/// Draw a Haar-random m-qubit pure state (complex Gaussian, normalized).
pub fn sample_haar_state<R: Rng>(m: usize, rng: &mut R) -> Result<HiddenComponent> {
    if m == 0 || m > MAX_HIDDEN_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "hidden component supports 1..={MAX_HIDDEN_QUBITS} qubits, got {m}"
        )));
    }
    let dim = 1usize << m;
    let mut psi: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut psi {
        *a /= C64::new(norm, 0.0);
    }
    Ok(HiddenComponent { psi })
}

/// One task instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaInstance {
    n: usize,
    hypothesis: Hypothesis,
    hidden: HiddenComponent,
}

impl PcaInstance {
    pub fn new(n: usize, hypothesis: Hypothesis, hidden: HiddenComponent) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec(format!("instances need n >= 2, got {n}")));
        }
        if hidden.psi.len() != 1usize << (n - 1) {
            return Err(Error::DimensionMismatch(format!(
                "hidden component has dimension {}, expected 2^{}",
                hidden.psi.len(),
                n - 1
            )));
        }
        Ok(PcaInstance { n, hypothesis, hidden })
    }

    pub fn sample<R: Rng>(n: usize, hypothesis: Hypothesis, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec(format!("instances need n >= 2, got {n}")));
        }
        let hidden = sample_haar_state(n - 1, rng)?;
        PcaInstance::new(n, hypothesis, hidden)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hypothesis(&self) -> Hypothesis {
        self.hypothesis
    }

    pub fn hidden(&self) -> &HiddenComponent {
        &self.hidden
    }

    /// Flag-qubit value of the pure branch (|0> in A, |1> in B).
    fn pure_flag(&self) -> u8 {
        match self.hypothesis {
            Hypothesis::A => 0,
            Hypothesis::B => 1,
        }
    }
}

/// Closed-form target: `tr(Z1 rho^2)/tr(rho^2) = +-(2^(n-1) - 1)/(2^(n-1) + 1)`.
pub fn exact_target(instance: &PcaInstance) -> f64 {
    let half = (1u64 << (instance.n - 1)) as f64;
    instance.hypothesis.sign() * (half - 1.0) / (half + 1.0)
}

enum RestBranch {
    Hidden,
    Basis(usize),
}

fn draw_copy<R: Rng>(instance: &PcaInstance, rng: &mut R) -> (u8, RestBranch) {
    let m = instance.n - 1;
    if rng.gen_bool(0.5) {
        (instance.pure_flag(), RestBranch::Hidden)
    } else {
        (1 - instance.pure_flag(), RestBranch::Basis(rng.gen_range(0..1usize << m)))
    }
}

/// Per-shot sums of the collective measurement: the numerator term
/// `m1 * prod_(k>=2) swap_k` and denominator term `swap_1 * prod swap_k`.
fn two_copy_sums<R: Rng>(instance: &PcaInstance, shots: usize, rng: &mut R) -> Result<(f64, f64)> {
    if instance.n > MAX_INSTANCE_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "two-copy simulation supports n <= {MAX_INSTANCE_QUBITS}, got {}",
            instance.n
        )));
    }
    if shots == 0 {
        return Err(Error::InvalidSpec("shot count must be at least 1".into()));
    }
    let m = instance.n - 1;
    let dim = 1usize << m;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut amps = vec![C64::new(0.0, 0.0); dim * dim];
    for _ in 0..shots {
        let (f1, rest1) = draw_copy(instance, rng);
        let (f2, rest2) = draw_copy(instance, rng);

        // pair 1 in the {|00>, |11>, Phi+, Phi-} basis
        let (m1, s1): (f64, f64) = match (f1, f2) {
            (0, 0) => (1.0, 1.0),
            (1, 1) => (-1.0, 1.0),
            _ => {
                if rng.gen_bool(0.5) {
                    (0.0, 1.0) // Phi+
                } else {
                    (0.0, -1.0) // Phi-
                }
            }
        };

        // remaining pairs: Bell measurements on |chi1> (x) |chi2>
        for a in amps.iter_mut() {
            *a = C64::new(0.0, 0.0);
        }
        match (&rest1, &rest2) {
            (RestBranch::Hidden, RestBranch::Hidden) => {
                for i in 0..dim {
                    for j in 0..dim {
                        amps[i * dim + j] = instance.hidden.psi[i] * instance.hidden.psi[j];
                    }
                }
            }
            (RestBranch::Hidden, RestBranch::Basis(j)) => {
                for i in 0..dim {
                    amps[i * dim + j] = instance.hidden.psi[i];
                }
            }
            (RestBranch::Basis(i), RestBranch::Hidden) => {
                for j in 0..dim {
                    amps[i * dim + j] = instance.hidden.psi[j];
                }
            }
            (RestBranch::Basis(i), RestBranch::Basis(j)) => {
                amps[i * dim + j] = C64::new(1.0, 0.0);
            }
        }
        let mut state = StateVector::from_amplitudes(2 * m, amps.clone())?;
        let mut rest_sign = 1.0;
        for k in 0..m {
            let outcome = state.measure_pair_in_bell_basis(k, m + k, rng);
            if outcome == 3 {
                rest_sign = -rest_sign; // Phi- is the singlet
            }
        }
        num += m1 * rest_sign;
        den += s1 * rest_sign;
    }
    Ok((num / shots as f64, den / shots as f64))
}

/// Two-copy estimate of `tr(Z1 rho^2)/tr(rho^2)`.
///
/// Errors with [`Error::UnstableEstimate`] when the purity estimate in
/// the denominator is not positive; the caller increases `shots`.
pub fn two_copy_estimate<R: Rng>(instance: &PcaInstance, shots: usize, rng: &mut R) -> Result<f64> {
    let (num, den) = two_copy_sums(instance, shots, rng)?;
    if den <= 0.0 {
        return Err(Error::UnstableEstimate(format!(
            "purity estimate {den} <= 0 after {shots} shots"
        )));
    }
    Ok(num / den)
}

/// Hypothesis guess from the sign of the two-copy estimate. The
/// denominator `tr(rho^2)` is positive, so the sign is carried by the
/// numerator mean; exact zero falls back to a coin flip.
pub fn two_copy_guess<R: Rng>(instance: &PcaInstance, copies: usize, rng: &mut R) -> Result<Hypothesis> {
    let shots = copies / 2;
    if shots == 0 {
        return Ok(if rng.gen_bool(0.5) { Hypothesis::A } else { Hypothesis::B });
    }
    let (num, _den) = two_copy_sums(instance, shots, rng)?;
    if num > 0.0 {
        Ok(Hypothesis::A)
    } else if num < 0.0 {
        Ok(Hypothesis::B)
    } else {
        Ok(if rng.gen_bool(0.5) { Hypothesis::A } else { Hypothesis::B })
    }
}

fn haar_qubit_basis<R: Rng>(rng: &mut R) -> [[C64; 2]; 2] {
    let mut v0 = [
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)),
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)),
    ];
    let norm = (v0[0].norm_sqr() + v0[1].norm_sqr()).sqrt();
    v0[0] /= C64::new(norm, 0.0);
    v0[1] /= C64::new(norm, 0.0);
    let v1 = [-v0[1].conj(), v0[0].conj()];
    [v0, v1]
}

fn logsumexp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Conventional baseline: measure each copy in a fresh Haar-random
/// product basis, then compare the hypothesis likelihoods with the
/// hidden-state marginalization approximated over a
/// [`CANDIDATE_NET_SIZE`]-element Haar candidate net. With zero
/// experiments the guess is a fair coin.
pub fn conventional_baseline<R: Rng>(
    instance: &PcaInstance,
    experiments: usize,
    rng: &mut R,
) -> Result<Hypothesis> {
    if instance.n > MAX_INSTANCE_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "conventional baseline supports n <= {MAX_INSTANCE_QUBITS}, got {}",
            instance.n
        )));
    }
    let m = instance.n - 1;
    let dim = 1usize << m;
    let pure_flag = instance.pure_flag();

    // flag overlaps a_t = |<0|v_(b1)>|^2 and selected rest product vectors
    let mut flag_overlap = Vec::with_capacity(experiments);
    let mut selected = Vec::with_capacity(experiments);
    for _ in 0..experiments {
        let flag_basis = haar_qubit_basis(rng);
        let rest_bases: Vec<[[C64; 2]; 2]> = (0..m).map(|_| haar_qubit_basis(rng)).collect();
        let (flag_bit, rest_index) = if rng.gen_bool(0.5) {
            // pure branch: flag collapses against |pure_flag>, rest from psi
            let p1 = flag_basis[1][usize::from(pure_flag)].norm_sqr();
            let bit = u8::from(rng.gen_bool(p1.clamp(0.0, 1.0)));
            // rotate psi into the product basis and sample
            let mut state = StateVector::from_amplitudes(m, instance.hidden.psi.clone())?;
            for (q, basis) in rest_bases.iter().enumerate() {
                let rows = [
                    basis[0][0].conj(),
                    basis[0][1].conj(),
                    basis[1][0].conj(),
                    basis[1][1].conj(),
                ];
                state.apply_single(&rows, q);
            }
            let probs = state.probabilities();
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut idx = dim - 1;
            for (i, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    idx = i;
                    break;
                }
            }
            (bit, idx)
        } else {
            // mixed branch: flag collapses against |1 - pure_flag>, rest uniform
            let p1 = flag_basis[1][usize::from(1 - pure_flag)].norm_sqr();
            let bit = u8::from(rng.gen_bool(p1.clamp(0.0, 1.0)));
            (bit, rng.gen_range(0..dim))
        };
        flag_overlap.push(flag_basis[usize::from(flag_bit)][0].norm_sqr());
        // full product vector of the selected rest outcome
        let mut w = vec![C64::new(1.0, 0.0)];
        for (q, basis) in rest_bases.iter().enumerate() {
            let bit = (rest_index >> (m - 1 - q)) & 1;
            let v = basis[bit];
            let mut next = vec![C64::new(0.0, 0.0); w.len() * 2];
            for (i, &a) in w.iter().enumerate() {
                next[2 * i] = a * v[0];
                next[2 * i + 1] = a * v[1];
            }
            w = next;
        }
        selected.push(w);
    }

    // likelihoods against the shared candidate net
    let uniform = 1.0 / dim as f64;
    let mut log_a = vec![0.0f64; CANDIDATE_NET_SIZE];
    let mut log_b = vec![0.0f64; CANDIDATE_NET_SIZE];
    for r in 0..CANDIDATE_NET_SIZE {
        let candidate = sample_haar_state(m, rng)?;
        let mut la = 0.0;
        let mut lb = 0.0;
        for (w, &a) in selected.iter().zip(&flag_overlap) {
            let overlap: C64 = w
                .iter()
                .zip(candidate.psi.iter())
                .map(|(wi, pi)| wi.conj() * pi)
                .sum();
            let p = overlap.norm_sqr();
            la += (0.5 * (a * p + (1.0 - a) * uniform)).ln();
            lb += (0.5 * ((1.0 - a) * p + a * uniform)).ln();
        }
        log_a[r] = la;
        log_b[r] = lb;
    }
    let score_a = logsumexp(&log_a);
    let score_b = logsumexp(&log_b);
    if score_a > score_b {
        Ok(Hypothesis::A)
    } else if score_b > score_a {
        Ok(Hypothesis::B)
    } else {
        Ok(if rng.gen_bool(0.5) { Hypothesis::A } else { Hypothesis::B })
    }
}
