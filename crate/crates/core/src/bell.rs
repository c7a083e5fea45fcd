//! The quantum-enhanced strategy for learning states: Bell-basis
//! measurements across two independently drawn copies of the ensemble
//! state, and the estimators built on the outcome records.
//!
//! Measuring qubit pair k of `rho (x) rho` in the Bell basis and averaging
//! the sign product `prod_k tr((sigma_k (x) sigma_k) S_k)` over records
//! gives an unbiased estimate of `tr((O (x) O)(rho (x) rho)) = |tr(O rho)|^2`
//! for every Pauli word O at once; `sqrt(max(0, a_hat))` then estimates
//! `|tr(O rho)|` itself.

use rand::Rng;

use crate::ensemble::{sample_state, EnsembleSpec, ProductStateSample};
use crate::noise::ReadoutProfile;
use crate::pauli::{bell_sign, BellOutcome, PauliString, QubitPureState};
use crate::{Error, Result};

/// One quantum-enhanced snapshot: n Bell outcomes (2n classical bits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellRecord {
    outcomes: Vec<BellOutcome>,
}

impl BellRecord {
    pub fn new(outcomes: Vec<BellOutcome>) -> Self {
        BellRecord { outcomes }
    }

    pub fn n(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcome(&self, k: usize) -> BellOutcome {
        self.outcomes[k]
    }

    pub fn outcomes(&self) -> &[BellOutcome] {
        &self.outcomes
    }

    /// 2n-bit wire encoding, two bits per qubit.
    pub fn to_bits(&self) -> Vec<u8> {
        let mut bits = Vec::with_capacity(2 * self.outcomes.len());
        for o in &self.outcomes {
            let (b0, b1) = o.to_bits();
            bits.push(b0);
            bits.push(b1);
        }
        bits
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "Bell record needs an even bit count, got {}",
                bits.len()
            )));
        }
        let outcomes = bits
            .chunks_exact(2)
            .map(|p| BellOutcome::from_bits(p[0], p[1]))
            .collect();
        Ok(BellRecord { outcomes })
    }
}

/// A collection of Bell records from repeated two-copy experiments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellDataset {
    records: Vec<BellRecord>,
    n: usize,
}

impl BellDataset {
    pub fn new(n: usize, records: Vec<BellRecord>) -> Result<Self> {
        if records.iter().any(|r| r.n() != n) {
            return Err(Error::DimensionMismatch("record length differs from n".into()));
        }
        Ok(BellDataset { records, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of two-copy experiments (N_Q).
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[BellRecord] {
        &self.records
    }
}

/// Born probabilities of the four Bell outcomes on `a (x) b`,
/// in the order (Psi+, Psi-, Phi+, Phi-).
pub fn bell_probs(a: &QubitPureState, b: &QubitPureState) -> [f64; 4] {
    let (a0, a1) = (a.amp(0), a.amp(1));
    let (b0, b1) = (b.amp(0), b.amp(1));
    let psi_p = 0.5 * (a0 * b0 + a1 * b1).norm_sqr();
    let psi_m = 0.5 * (a0 * b0 - a1 * b1).norm_sqr();
    let phi_p = 0.5 * (a0 * b1 + a1 * b0).norm_sqr();
    let phi_m = 0.5 * (a0 * b1 - a1 * b0).norm_sqr();
    [psi_p, psi_m, phi_p, phi_m]
}

pub(crate) fn sample_bell_outcome<R: Rng>(
    a: &QubitPureState,
    b: &QubitPureState,
    rng: &mut R,
) -> BellOutcome {
    let p = bell_probs(a, b);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &outcome) in BellOutcome::ALL.iter().enumerate() {
        acc += p[i];
        if u < acc {
            return outcome;
        }
    }
    BellOutcome::PhiMinus
}

fn bell_record_for_pair<R: Rng>(
    first: &ProductStateSample,
    second: &ProductStateSample,
    rng: &mut R,
) -> BellRecord {
    let outcomes = (0..first.n())
        .map(|k| sample_bell_outcome(first.qubit(k), second.qubit(k), rng))
        .collect();
    BellRecord::new(outcomes)
}

/// Run `n_q` quantum-enhanced experiments. Each experiment consumes two
/// fresh copies of the state; copies are never reused across records.
/// Readout noise, when given, acts on the 2n-bit encodings.
pub fn run_quantum_enhanced<R: Rng>(
    spec: &EnsembleSpec,
    n_q: usize,
    noise: Option<&ReadoutProfile>,
    rng: &mut R,
) -> Result<BellDataset> {
    if n_q == 0 {
        return Err(Error::InvalidSpec("N_Q must be at least 1".into()));
    }
    if let Some(profile) = noise {
        profile.check_width(2 * spec.n())?;
    }
    let mut records = Vec::with_capacity(n_q);
    for _ in 0..n_q {
        let first = sample_state(spec, rng);
        let second = sample_state(spec, rng);
        let mut record = bell_record_for_pair(&first, &second, rng);
        if let Some(profile) = noise {
            let bits = profile.apply(&record.to_bits(), rng)?;
            record = BellRecord::from_bits(&bits)?;
        }
        records.push(record);
    }
    BellDataset::new(spec.n(), records)
}

/// The two-copy estimator `a_hat(O)`: empirical mean of the per-record
/// sign product. Always lies in [-1, 1].
pub fn estimate_a(data: &BellDataset, observable: &PauliString) -> Result<f64> {
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
    let mut acc: i64 = 0;
    for record in data.records() {
        acc += i64::from(record_sign(record, observable));
    }
    Ok(acc as f64 / data.len() as f64)
}

pub(crate) fn record_sign(record: &BellRecord, observable: &PauliString) -> i8 {
    let mut sign: i8 = 1;
    for (k, outcome) in record.outcomes().iter().enumerate() {
        sign *= bell_sign(observable.letter(k), *outcome);
    }
    sign
}

/// `b_hat = sqrt(max(0, a_hat))`, the estimate of `|tr(O rho)|`.
pub fn estimate_b(data: &BellDataset, observable: &PauliString) -> Result<f64> {
    Ok(estimate_a(data, observable)?.max(0.0).sqrt())
}

/// Decide which of two observables has the larger `|tr(O rho)|` from the
/// same dataset. Returns 1 or 2; exact ties go to 1.
pub fn compare_observables(
    data: &BellDataset,
    o1: &PauliString,
    o2: &PauliString,
) -> Result<usize> {
    if o1 == o2 {
        return Err(Error::InvalidTask("observables must be distinct".into()));
    }
    let b1 = estimate_b(data, o1)?;
    let b2 = estimate_b(data, o2)?;
    Ok(if b2 > b1 { 2 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{dense_projector, enumerate_branches, exact_density, dense_pauli};
    use crate::pauli::{pauli_eigenstate, sample_pauli_string, PauliLetter};
    use crate::rngstream::stream;
    use crate::C64;
    use nalgebra::DMatrix;

    fn spec(p: &str, alpha: f64) -> EnsembleSpec {
        EnsembleSpec::new(p.parse().unwrap(), alpha).unwrap()
    }

    /// Exhaustive E[a_hat(O)] over (branch pair, Bell outcomes). The sign
    /// product factorizes per qubit, so the expectation is a product of
    /// per-qubit sums.
    fn exact_estimator_expectation(s: &EnsembleSpec, observable: &PauliString) -> f64 {
        let branches = enumerate_branches(s).unwrap();
        let mut total = 0.0;
        for (p1, first) in &branches {
            for (p2, second) in &branches {
                let mut prod = 1.0;
                for k in 0..s.n() {
                    let probs = bell_probs(first.qubit(k), second.qubit(k));
                    let mut per_qubit = 0.0;
                    for (i, &b) in BellOutcome::ALL.iter().enumerate() {
                        per_qubit += probs[i] * f64::from(bell_sign(observable.letter(k), b));
                    }
                    prod *= per_qubit;
                }
                total += p1 * p2 * prod;
            }
        }
        total
    }

    #[test]
    fn bell_probs_known_pairs() {
        let zero = QubitPureState::zero();
        let p = bell_probs(&zero, &zero);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        assert!(p[2].abs() < 1e-15 && p[3].abs() < 1e-15);

        let plus = pauli_eigenstate(PauliLetter::X, 1);
        let minus = pauli_eigenstate(PauliLetter::X, -1);
        let p = bell_probs(&plus, &minus);
        assert!(p[0].abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        assert!(p[2].abs() < 1e-12 && (p[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bell_probs_match_dense_projector_arithmetic() {
        // oracle: p_B = tr(|B><B| (a (x) b)(a (x) b)^dag) by 4x4 arithmetic
        let a = QubitPureState::zero();
        let b = pauli_eigenstate(PauliLetter::Y, 1);
        let probs = bell_probs(&a, &b);
        let joint = DMatrix::from_fn(4, 1, |r, _| a.amp(r >> 1) * b.amp(r & 1));
        let rho = &joint * joint.map(|x| x.conj()).transpose();
        for (i, &outcome) in BellOutcome::ALL.iter().enumerate() {
            let v = outcome.vector();
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..4 {
                for c in 0..4 {
                    acc += v[r].conj() * rho[(r, c)] * v[c];
                }
            }
            assert!((probs[i] - acc.re).abs() < 1e-12);
        }
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_two_copy_distribution_matches_dense_oracle() {
        // empirical outcome frequencies vs the dense two-copy Born rule
        let s = spec("Z", 0.95);
        let branches = enumerate_branches(&s).unwrap();
        let mut exact = [0.0f64; 4];
        for (p1, first) in &branches {
            for (p2, second) in &branches {
                // dense 4x4 projector of the two-copy product state
                let rho = dense_projector(first).kronecker(&dense_projector(second));
                for (i, &outcome) in BellOutcome::ALL.iter().enumerate() {
                    let v = outcome.vector();
                    let mut acc = C64::new(0.0, 0.0);
                    for r in 0..4 {
                        for c in 0..4 {
                            acc += v[r].conj() * rho[(r, c)] * v[c];
                        }
                    }
                    exact[i] += p1 * p2 * acc.re;
                }
            }
        }
        let mut rng = stream(21, "bell", 0);
        let draws = 200_000;
        let data = run_quantum_enhanced(&s, draws, None, &mut rng).unwrap();
        let mut counts = [0u64; 4];
        for r in data.records() {
            counts[BellOutcome::ALL.iter().position(|&b| b == r.outcome(0)).unwrap()] += 1;
        }
        for i in 0..4 {
            let freq = counts[i] as f64 / draws as f64;
            let sigma = (exact[i] * (1.0 - exact[i]) / draws as f64).sqrt().max(1e-6);
            assert!((freq - exact[i]).abs() < 4.0 * sigma, "outcome {i}: {freq} vs {}", exact[i]);
        }
    }

    #[test]
    fn estimator_is_unbiased_against_dense_oracle() {
        // E[a_hat(O)] == |tr(O rho)|^2 exhaustively at n <= 3
        let mut rng = stream(22, "bell", 1);
        for s in [spec("ZZ", 0.95), spec("XIY", 0.9), spec("YXZ", -0.8)] {
            let rho = exact_density(&s).unwrap();
            for _ in 0..6 {
                let o = sample_pauli_string(s.n(), true, &mut rng).unwrap();
                let exact = exact_estimator_expectation(&s, &o);
                let po = dense_pauli(&o);
                let tr: C64 = (&po * &rho).diagonal().iter().copied().sum();
                assert!(
                    (exact - tr.norm_sqr()).abs() < 1e-10,
                    "spec {s:?}, O = {o}: {exact} vs {}",
                    tr.norm_sqr()
                );
            }
            // and for O = P itself
            let exact = exact_estimator_expectation(&s, &s.pauli());
            assert!((exact - s.alpha() * s.alpha()).abs() < 1e-10);
        }
    }

    #[test]
    fn planted_pauli_estimate_hits_alpha_squared() {
        let s = spec("ZZZZ", 0.9);
        let mut rng = stream(23, "bell", 0);
        let data = run_quantum_enhanced(&s, 100_000, None, &mut rng).unwrap();
        let a = estimate_a(&data, &s.pauli()).unwrap();
        // Var(term) = 1 - 0.81^2
        let sigma = ((1.0 - 0.81f64 * 0.81) / 100_000.0).sqrt();
        assert!((a - 0.81).abs() < 3.0 * sigma, "a_hat = {a}");
        let b = estimate_b(&data, &s.pauli()).unwrap();
        assert!((b - 0.9).abs() < 3.0 * sigma, "b_hat = {b}");
    }

    #[test]
    fn off_support_estimate_vanishes() {
        let s = spec("ZZZZ", 0.9);
        let mut rng = stream(24, "bell", 0);
        let data = run_quantum_enhanced(&s, 100_000, None, &mut rng).unwrap();
        for o in ["XXXX", "ZZZI", "YZYZ"] {
            let a = estimate_a(&data, &o.parse().unwrap()).unwrap();
            let sigma = (1.0f64 / 100_000.0).sqrt();
            assert!(a.abs() < 5.0 * sigma, "O = {o}: a_hat = {a}");
        }
    }

    #[test]
    fn estimate_b_clamps_and_takes_roots() {
        let s = spec("Z", 0.9);
        let all_psi_plus = BellDataset::new(1, vec![BellRecord::new(vec![BellOutcome::PsiPlus]); 4]).unwrap();
        assert_eq!(estimate_a(&all_psi_plus, &s.pauli()).unwrap(), 1.0);
        assert_eq!(estimate_b(&all_psi_plus, &s.pauli()).unwrap(), 1.0);

        // hand-built datasets realizing a_hat = 0.25 and a_hat < 0
        let mixed = BellDataset::new(
            1,
            vec![
                BellRecord::new(vec![BellOutcome::PsiPlus]),
                BellRecord::new(vec![BellOutcome::PsiPlus]),
                BellRecord::new(vec![BellOutcome::PsiPlus]),
                BellRecord::new(vec![BellOutcome::PhiPlus]),
                BellRecord::new(vec![BellOutcome::PsiPlus]),
                BellRecord::new(vec![BellOutcome::PhiPlus]),
                BellRecord::new(vec![BellOutcome::PsiPlus]),
                BellRecord::new(vec![BellOutcome::PhiPlus]),
            ],
        )
        .unwrap();
        let z: PauliString = "Z".parse().unwrap();
        assert!((estimate_a(&mixed, &z).unwrap() - 0.25).abs() < 1e-15);
        assert!((estimate_b(&mixed, &z).unwrap() - 0.5).abs() < 1e-15);

        let negative = BellDataset::new(
            1,
            vec![
                BellRecord::new(vec![BellOutcome::PhiPlus]),
                BellRecord::new(vec![BellOutcome::PhiMinus]),
                BellRecord::new(vec![BellOutcome::PsiPlus]),
            ],
        )
        .unwrap();
        assert!(estimate_a(&negative, &z).unwrap() < 0.0);
        assert_eq!(estimate_b(&negative, &z).unwrap(), 0.0);
    }

    #[test]
    fn estimator_stays_in_unit_interval() {
        let s = spec("XY", 0.6);
        let mut rng = stream(25, "bell", 0);
        let data = run_quantum_enhanced(&s, 500, None, &mut rng).unwrap();
        for _ in 0..50 {
            let o = sample_pauli_string(2, false, &mut rng).unwrap();
            let a = estimate_a(&data, &o).unwrap();
            assert!((-1.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn comparator_is_the_argmax_of_the_estimates() {
        let s = spec("XZY", 0.9);
        let mut rng = stream(31, "bell", 0);
        let data = run_quantum_enhanced(&s, 64, None, &mut rng).unwrap();
        for _ in 0..40 {
            let o1 = sample_pauli_string(3, true, &mut rng).unwrap();
            let mut o2 = sample_pauli_string(3, true, &mut rng).unwrap();
            while o2 == o1 {
                o2 = sample_pauli_string(3, true, &mut rng).unwrap();
            }
            let b1 = estimate_b(&data, &o1).unwrap();
            let b2 = estimate_b(&data, &o2).unwrap();
            let expected = if b2 > b1 { 2 } else { 1 };
            assert_eq!(compare_observables(&data, &o1, &o2).unwrap(), expected);
        }
    }

    #[test]
    fn comparator_errors_and_ties() {
        let s = spec("ZZ", 0.9);
        let mut rng = stream(26, "bell", 0);
        let data = run_quantum_enhanced(&s, 16, None, &mut rng).unwrap();
        let o: PauliString = "ZZ".parse().unwrap();
        assert!(matches!(compare_observables(&data, &o, &o), Err(Error::InvalidTask(_))));
        // mismatched length surfaces a dimension error
        let short: PauliString = "Z".parse().unwrap();
        assert!(matches!(
            compare_observables(&data, &short, &o),
            Err(Error::DimensionMismatch(_))
        ));
        // a dataset on which both observables estimate identically: tie -> 1
        let all = BellDataset::new(2, vec![BellRecord::new(vec![BellOutcome::PsiPlus; 2]); 3]).unwrap();
        assert_eq!(
            compare_observables(&all, &"ZZ".parse().unwrap(), &"ZI".parse().unwrap()).unwrap(),
            1
        );
    }

    #[test]
    fn zero_experiments_rejected() {
        let s = spec("Z", 0.9);
        let mut rng = stream(27, "bell", 0);
        assert!(run_quantum_enhanced(&s, 0, None, &mut rng).is_err());
    }

    #[test]
    fn identity_noise_profile_leaves_distribution_unchanged() {
        let s = spec("ZX", 0.9);
        let profile = ReadoutProfile::identity(4);
        let mut rng_a = stream(28, "bell", 0);
        let mut rng_b = stream(28, "bell", 0);
        let clean = run_quantum_enhanced(&s, 200, None, &mut rng_a).unwrap();
        let noisy = run_quantum_enhanced(&s, 200, Some(&profile), &mut rng_b).unwrap();
        // identity confusion matrices never flip, so the record stream is
        // identical apart from the rng draws the noise layer consumes
        for (a, b) in clean.records().iter().zip(noisy.records()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn comparator_accuracy_high_at_constant_budget() {
        // planted P vs random Q at n = 20, N_Q = 100
        let mut correct = 0u32;
        let trials = 500u32;
        for t in 0..u64::from(trials) {
            let mut rng = stream(29, "bell-trial", t);
            let p = sample_pauli_string(20, true, &mut rng).unwrap();
            let mut q = sample_pauli_string(20, true, &mut rng).unwrap();
            while q == p {
                q = sample_pauli_string(20, true, &mut rng).unwrap();
            }
            let alpha = if rng.gen_bool(0.5) { 0.95 } else { -0.95 };
            let s = EnsembleSpec::new(p, alpha).unwrap();
            let data = run_quantum_enhanced(&s, 100, None, &mut rng).unwrap();
            // present (O1, O2) in random order
            let p_first = rng.gen_bool(0.5);
            let (o1, o2) = if p_first { (p, q) } else { (q, p) };
            let chosen = compare_observables(&data, &o1, &o2).unwrap();
            let picked_p = (chosen == 1) == p_first;
            if picked_p {
                correct += 1;
            }
        }
        let acc = f64::from(correct) / f64::from(trials);
        assert!(acc >= 0.9, "accuracy {acc}");
    }

    #[test]
    fn comparator_accuracy_is_monotone_in_budget() {
        // accuracy at N_Q in {10, 50, 100, 500} is non-decreasing up to 2 sigma
        let n = 6;
        let trials = 10_000u32;
        let budgets = [10usize, 50, 100, 500];
        let mut accs = Vec::new();
        for (bi, &n_q) in budgets.iter().enumerate() {
            let mut correct = 0u32;
            for t in 0..trials {
                let mut rng = stream(30 + bi as u64, "bell-mono", u64::from(t));
                let p = sample_pauli_string(n, true, &mut rng).unwrap();
                let mut q = sample_pauli_string(n, true, &mut rng).unwrap();
                while q == p {
                    q = sample_pauli_string(n, true, &mut rng).unwrap();
                }
                let s = EnsembleSpec::new(p, 0.9).unwrap();
                let data = run_quantum_enhanced(&s, n_q, None, &mut rng).unwrap();
                let p_first = rng.gen_bool(0.5);
                let (o1, o2) = if p_first { (p, q) } else { (q, p) };
                if (compare_observables(&data, &o1, &o2).unwrap() == 1) == p_first {
                    correct += 1;
                }
            }
            accs.push(f64::from(correct) / f64::from(trials));
        }
        let sigma = (0.25 / f64::from(trials)).sqrt();
        for w in accs.windows(2) {
            assert!(w[1] >= w[0] - 2.0 * sigma, "accuracies {accs:?}");
        }
    }
}
