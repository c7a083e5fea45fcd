//! Pauli strings, single-qubit Pauli eigenstates, and the Bell-basis /
//! Pauli correspondence used by every measurement protocol in the crate.
//!
//! A [`PauliString`] is stored as two packed bit words (x-bits, z-bits),
//! giving O(1)-word operations for n <= 64 qubits and a canonical hash.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Single-qubit Pauli operator. The order `I < X < Y < Z` is the canonical
/// serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    /// Dense 2x2 matrix of the operator.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            PauliLetter::I => [[l, o], [o, l]],
            PauliLetter::X => [[o, l], [l, o]],
            PauliLetter::Y => [[o, -i], [i, o]],
            PauliLetter::Z => [[l, o], [o, -l]],
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(PauliLetter::I),
            'X' => Ok(PauliLetter::X),
            'Y' => Ok(PauliLetter::Y),
            'Z' => Ok(PauliLetter::Z),
            other => Err(Error::Parse(format!("invalid Pauli letter {other:?}"))),
        }
    }

    fn bits(self) -> (u64, u64) {
        // symplectic encoding: (x, z)
        match self {
            PauliLetter::I => (0, 0),
            PauliLetter::X => (1, 0),
            PauliLetter::Y => (1, 1),
            PauliLetter::Z => (0, 1),
        }
    }

    fn from_bits(x: u64, z: u64) -> Self {
        match (x, z) {
            (0, 0) => PauliLetter::I,
            (1, 0) => PauliLetter::X,
            (1, 1) => PauliLetter::Y,
            _ => PauliLetter::Z,
        }
    }
}

/// An n-qubit Pauli word over `{I, X, Y, Z}`, packed as x/z bit-vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_bits: u64,
    z_bits: u64,
}

impl PauliString {
    pub const MAX_QUBITS: usize = 64;

    /// Identity word on `n` qubits.
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 || n > Self::MAX_QUBITS {
            return Err(Error::InvalidDimension(format!(
                "Pauli string length must be in 1..={}, got {n}",
                Self::MAX_QUBITS
            )));
        }
        Ok(PauliString { n, x_bits: 0, z_bits: 0 })
    }

    pub fn from_letters(letters: &[PauliLetter]) -> Result<Self> {
        let mut s = Self::identity(letters.len())?;
        for (k, &l) in letters.iter().enumerate() {
            s.set(k, l);
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_identity(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    pub fn letter(&self, k: usize) -> PauliLetter {
        debug_assert!(k < self.n);
        PauliLetter::from_bits((self.x_bits >> k) & 1, (self.z_bits >> k) & 1)
    }

    pub fn set(&mut self, k: usize, l: PauliLetter) {
        debug_assert!(k < self.n);
        let (x, z) = l.bits();
        self.x_bits = (self.x_bits & !(1 << k)) | (x << k);
        self.z_bits = (self.z_bits & !(1 << k)) | (z << k);
    }

    pub fn letters(&self) -> impl Iterator<Item = PauliLetter> + '_ {
        (0..self.n).map(|k| self.letter(k))
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> u32 {
        (self.x_bits | self.z_bits).count_ones()
    }

    /// Largest index with a non-identity letter, if any.
    pub fn last_support(&self) -> Option<usize> {
        let occ = self.x_bits | self.z_bits;
        if occ == 0 {
            None
        } else {
            Some(63 - occ.leading_zeros() as usize)
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<PauliLetter> = s.chars().map(PauliLetter::from_char).collect::<Result<_>>()?;
        PauliString::from_letters(&letters)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Draw a uniformly random Pauli word on `n` qubits; with `exclude_identity`
/// the draw is uniform over the 4^n - 1 non-identity words.
pub fn sample_pauli_string<R: Rng>(n: usize, exclude_identity: bool, rng: &mut R) -> Result<PauliString> {
    let mut s = PauliString::identity(n)?;
    loop {
        for k in 0..n {
            s.set(k, PauliLetter::ALL[rng.gen_range(0..4)]);
        }
        if !(exclude_identity && s.is_identity()) {
            return Ok(s);
        }
    }
}

/// A single-qubit pure state (two complex amplitudes, unit norm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPureState {
    amps: [C64; 2],
}

impl QubitPureState {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(a0: C64, a1: C64) -> Result<Self> {
        let norm2 = a0.norm_sqr() + a1.norm_sqr();
        if (norm2 - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "qubit state norm^2 = {norm2}, expected 1"
            )));
        }
        Ok(QubitPureState { amps: [a0, a1] })
    }

    pub fn zero() -> Self {
        QubitPureState { amps: [C64::new(1.0, 0.0), C64::new(0.0, 0.0)] }
    }

    pub fn one() -> Self {
        QubitPureState { amps: [C64::new(0.0, 0.0), C64::new(1.0, 0.0)] }
    }

    pub fn amp(&self, b: usize) -> C64 {
        self.amps[b]
    }

    /// Expectation value of a Pauli letter in this state.
    pub fn expectation(&self, l: PauliLetter) -> f64 {
        let m = l.matrix();
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..2 {
            for c in 0..2 {
                acc += self.amps[r].conj() * m[r][c] * self.amps[c];
            }
        }
        acc.re
    }
}

/// Eigenstate of a Pauli operator with the given eigenvalue sign.
///
/// For the identity the "eigenstate" is the computational-basis state
/// selected by the sign: `|0>` for +1 and `|1>` for -1.
pub fn pauli_eigenstate(letter: PauliLetter, sign: i8) -> QubitPureState {
    debug_assert!(sign == 1 || sign == -1);
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let ih = C64::new(0.0, FRAC_1_SQRT_2);
    match (letter, sign) {
        (PauliLetter::I | PauliLetter::Z, 1) => QubitPureState::zero(),
        (PauliLetter::I | PauliLetter::Z, _) => QubitPureState::one(),
        (PauliLetter::X, 1) => QubitPureState { amps: [h, h] },
        (PauliLetter::X, _) => QubitPureState { amps: [h, -h] },
        (PauliLetter::Y, 1) => QubitPureState { amps: [h, ih] },
        (PauliLetter::Y, _) => QubitPureState { amps: [h, -ih] },
    }
}

/// One of the four Bell states. The naming follows the convention in which
/// `Psi+` / `Psi-` live on the 00/11 subspace and `Phi+` / `Phi-` on 01/10:
///
/// ```text
/// |Psi+> = (|00> + |11>)/sqrt(2)    |Psi-> = (|00> - |11>)/sqrt(2)
/// |Phi+> = (|01> + |10>)/sqrt(2)    |Phi-> = (|01> - |10>)/sqrt(2)
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BellOutcome {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
    ];

    /// Two-bit wire encoding: Psi+=00, Psi-=01, Phi+=10, Phi-=11.
    pub fn to_bits(self) -> (u8, u8) {
        match self {
            BellOutcome::PsiPlus => (0, 0),
            BellOutcome::PsiMinus => (0, 1),
            BellOutcome::PhiPlus => (1, 0),
            BellOutcome::PhiMinus => (1, 1),
        }
    }

    pub fn from_bits(b0: u8, b1: u8) -> Self {
        match (b0 & 1, b1 & 1) {
            (0, 0) => BellOutcome::PsiPlus,
            (0, 1) => BellOutcome::PsiMinus,
            (1, 0) => BellOutcome::PhiPlus,
            _ => BellOutcome::PhiMinus,
        }
    }

    /// The Pauli letter paired with this outcome under the bijection
    /// Psi+ <-> I, Psi- <-> Z, Phi+ <-> X, Phi- <-> Y.
    pub fn paired_letter(self) -> PauliLetter {
        match self {
            BellOutcome::PsiPlus => PauliLetter::I,
            BellOutcome::PsiMinus => PauliLetter::Z,
            BellOutcome::PhiPlus => PauliLetter::X,
            BellOutcome::PhiMinus => PauliLetter::Y,
        }
    }

    /// Amplitudes of the Bell vector in the computational basis |00..11>.
    pub fn vector(self) -> [C64; 4] {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let o = C64::new(0.0, 0.0);
        match self {
            BellOutcome::PsiPlus => [h, o, o, h],
            BellOutcome::PsiMinus => [h, o, o, -h],
            BellOutcome::PhiPlus => [o, h, h, o],
            BellOutcome::PhiMinus => [o, h, -h, o],
        }
    }
}

/// Eigenvalue of `sigma (x) sigma` on the given Bell state (always +-1).
///
/// This is the per-qubit factor `tr((sigma_k (x) sigma_k) S_k)` of the
/// two-copy estimator.
pub fn bell_sign(letter: PauliLetter, outcome: BellOutcome) -> i8 {
    use BellOutcome::*;
    use PauliLetter::*;
    match (letter, outcome) {
        (I, _) => 1,
        (X, PsiPlus | PhiPlus) => 1,
        (X, PsiMinus | PhiMinus) => -1,
        (Y, PhiPlus | PsiMinus) => 1,
        (Y, PsiPlus | PhiMinus) => -1,
        (Z, PsiPlus | PsiMinus) => 1,
        (Z, PhiPlus | PhiMinus) => -1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rngstream::stream;

    fn kron2(a: [[C64; 2]; 2], b: [[C64; 2]; 2]) -> [[C64; 4]; 4] {
        let mut out = [[C64::new(0.0, 0.0); 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        out
    }

    #[test]
    fn bell_sign_matches_dense_trace_for_all_sixteen_pairs() {
        // oracle: tr((sigma (x) sigma) |B><B|) by explicit 4x4 arithmetic
        for &l in &PauliLetter::ALL {
            let ss = kron2(l.matrix(), l.matrix());
            for &b in &BellOutcome::ALL {
                let v = b.vector();
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..4 {
                    for c in 0..4 {
                        acc += v[r].conj() * ss[r][c] * v[c];
                    }
                }
                assert!((acc.im).abs() < 1e-12);
                assert!(
                    (acc.re - f64::from(bell_sign(l, b))).abs() < 1e-12,
                    "mismatch at ({l:?}, {b:?}): dense {} vs table {}",
                    acc.re,
                    bell_sign(l, b)
                );
            }
        }
    }

    #[test]
    fn eigenstate_round_trip_under_pauli_matrix() {
        for &l in &PauliLetter::ALL {
            for sign in [1i8, -1] {
                let v = pauli_eigenstate(l, sign);
                if l == PauliLetter::I {
                    // convention: computational-basis state chosen by sign
                    let expect = if sign == 1 { QubitPureState::zero() } else { QubitPureState::one() };
                    assert_eq!(v, expect);
                    continue;
                }
                let m = l.matrix();
                for r in 0..2 {
                    let mv = m[r][0] * v.amp(0) + m[r][1] * v.amp(1);
                    let sv = C64::new(f64::from(sign), 0.0) * v.amp(r);
                    assert!((mv - sv).norm() < 1e-12, "{l:?} sign {sign} row {r}");
                }
            }
        }
    }

    #[test]
    fn named_eigenstates() {
        assert_eq!(pauli_eigenstate(PauliLetter::Z, 1), QubitPureState::zero());
        let xm = pauli_eigenstate(PauliLetter::X, -1);
        assert!((xm.amp(0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((xm.amp(1).re + FRAC_1_SQRT_2).abs() < 1e-15);
        let yp = pauli_eigenstate(PauliLetter::Y, 1);
        assert!((yp.amp(1) - C64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn non_normalized_states_are_rejected() {
        assert!(matches!(
            QubitPureState::new(C64::new(0.8, 0.0), C64::new(0.7, 0.0)),
            Err(Error::Validation(_))
        ));
        assert!(QubitPureState::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).is_ok());
    }

    #[test]
    fn sampler_rejects_zero_dimension() {
        let mut rng = stream(1, "pauli", 0);
        assert!(matches!(
            sample_pauli_string(0, false, &mut rng),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn single_qubit_draws_are_uniform() {
        let mut rng = stream(2, "pauli", 0);
        let mut counts = [0u64; 4];
        let draws = 120_000;
        for _ in 0..draws {
            let s = sample_pauli_string(1, true, &mut rng).unwrap();
            counts[s.letter(0) as usize] += 1;
        }
        assert_eq!(counts[0], 0, "identity must be excluded");
        // each of X, Y, Z within 5 sigma of draws/3
        let expect = draws as f64 / 3.0;
        let sigma = (expect * (1.0 - 1.0 / 3.0)).sqrt();
        for &c in &counts[1..] {
            assert!((c as f64 - expect).abs() < 5.0 * sigma);
        }

        let mut counts4 = [0u64; 4];
        for _ in 0..draws {
            let s = sample_pauli_string(1, false, &mut rng).unwrap();
            counts4[s.letter(0) as usize] += 1;
        }
        let expect4 = draws as f64 / 4.0;
        let sigma4 = (expect4 * 0.75).sqrt();
        for &c in &counts4 {
            assert!((c as f64 - expect4).abs() < 5.0 * sigma4);
        }
    }

    #[test]
    fn two_qubit_nonidentity_draws_pass_chi_square() {
        let mut rng = stream(5, "pauli", 0);
        let draws = 100_000usize;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            let s = sample_pauli_string(2, true, &mut rng).unwrap();
            assert!(!s.is_identity());
            *counts.entry(s.to_string()).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 15);
        let expect = draws as f64 / 15.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        // chi-square critical value at p = 0.01, dof = 14
        assert!(chi2 < 29.1412, "chi2 = {chi2}");
    }

    #[test]
    fn last_support_and_weight() {
        let s: PauliString = "IXIZ".parse().unwrap();
        assert_eq!(s.weight(), 2);
        assert_eq!(s.last_support(), Some(3));
        assert_eq!(s.letter(1), PauliLetter::X);
        let id = PauliString::identity(4).unwrap();
        assert_eq!(id.last_support(), None);
    }

    proptest::proptest! {
        #[test]
        fn serialization_round_trip(letters in proptest::collection::vec(0usize..4, 1..20)) {
            let ls: Vec<PauliLetter> = letters.iter().map(|&i| PauliLetter::ALL[i]).collect();
            let s = PauliString::from_letters(&ls).unwrap();
            let text = s.to_string();
            let back: PauliString = text.parse().unwrap();
            proptest::prop_assert_eq!(s, back);
        }

        #[test]
        fn bell_bit_encoding_round_trip(b0 in 0u8..2, b1 in 0u8..2) {
            let o = BellOutcome::from_bits(b0, b1);
            proptest::prop_assert_eq!(o.to_bits(), (b0, b1));
        }
    }
}
