//! Per-bit readout confusion noise and the stochastic noise-inversion
//! expansion used for measurement error mitigation.
//!
//! The mitigation is a sampled pseudo-inverse, not an exact tensor
//! inverse: each noisy row is expanded into `inverse_cnt` replicas whose
//! bits are re-flipped against the calibration diagonal, with a sign
//! coefficient of (-1)^(number of flips) per replica. Estimates are then
//! coefficient-weighted means over replicas. For asymmetric calibration
//! matrices the procedure carries a bias; that is a property of the
//! algorithm itself and is kept as-is.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{record_sign, BellDataset, BellRecord};
use crate::pauli::PauliString;
use crate::{Error, Result};

/// Per-measured-bit 2x2 confusion matrices; entry `[m][t]` is the
/// probability of reading bit `m` when the true bit is `t`. Columns sum
/// to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReadoutProfile {
    calib: Vec<[[f64; 2]; 2]>,
}

impl ReadoutProfile {
    pub fn new(calib: Vec<[[f64; 2]; 2]>) -> Result<Self> {
        let profile = ReadoutProfile { calib };
        profile.validate()?;
        Ok(profile)
    }

    /// Noiseless profile on `bits` measured bits.
    pub fn identity(bits: usize) -> Self {
        ReadoutProfile { calib: vec![[[1.0, 0.0], [0.0, 1.0]]; bits] }
    }

    /// Symmetric profile flipping every bit with probability `flip`.
    pub fn uniform(bits: usize, flip: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip) {
            return Err(Error::InvalidSpec(format!("flip probability {flip} outside [0, 1]")));
        }
        Ok(ReadoutProfile { calib: vec![[[1.0 - flip, flip], [flip, 1.0 - flip]]; bits] })
    }

    /// Symmetric per-bit flip rates drawn uniformly from `[low, high]`,
    /// mirroring the 3%-7% hardware readout-error range.
    pub fn synthetic<R: Rng>(bits: usize, low: f64, high: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&low) || !(low..=1.0).contains(&high) {
            return Err(Error::InvalidSpec(format!("bad flip range [{low}, {high}]")));
        }
        let calib = (0..bits)
            .map(|_| {
                let f = rng.gen_range(low..=high);
                [[1.0 - f, f], [f, 1.0 - f]]
            })
            .collect();
        Ok(ReadoutProfile { calib })
    }

    pub fn validate(&self) -> Result<()> {
        for (i, m) in self.calib.iter().enumerate() {
            for t in 0..2 {
                let col = m[0][t] + m[1][t];
                if (col - 1.0).abs() > 1e-9 {
                    return Err(Error::Validation(format!(
                        "calibration column {t} of bit {i} sums to {col}"
                    )));
                }
                for r in 0..2 {
                    if !(0.0..=1.0).contains(&m[r][t]) {
                        return Err(Error::Validation(format!(
                            "calibration entry [{r}][{t}] of bit {i} outside [0, 1]"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.calib.len()
    }

    pub fn check_width(&self, bits: usize) -> Result<()> {
        if self.width() != bits {
            return Err(Error::DimensionMismatch(format!(
                "profile covers {} bits, data has {bits}",
                self.width()
            )));
        }
        Ok(())
    }

    pub fn matrix(&self, bit: usize) -> &[[f64; 2]; 2] {
        &self.calib[bit]
    }

    /// Forward noise: flip bit `i` independently with probability
    /// `1 - calib[i][b][b]` where `b` is the true bit.
    pub fn apply<R: Rng>(&self, bits: &[u8], rng: &mut R) -> Result<Vec<u8>> {
        self.check_width(bits.len())?;
        Ok(bits
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let flip = 1.0 - self.calib[i][usize::from(b)][usize::from(b)].clamp(0.0, 1.0);
                // draw only when the bit can actually flip, so an identity
                // profile consumes no randomness
                if flip > 0.0 && rng.gen_bool(flip) {
                    1 - b
                } else {
                    b
                }
            })
            .collect())
    }
}

/// Forward readout noise on one bit string.
pub fn apply_readout_noise<R: Rng>(bits: &[u8], profile: &ReadoutProfile, rng: &mut R) -> Result<Vec<u8>> {
    profile.apply(bits, rng)
}

/// Result of the noise-inversion expansion: `inverse_cnt` replicas per
/// input row, each with a +-1 coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedData {
    rows: Vec<Vec<u8>>,
    coefficients: Vec<f64>,
}

impl ExpandedData {
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// The stochastic pseudo-inverse expansion. Per replica and per bit:
/// `p = calib[i][1][1]` if the bit is 0 else `calib[i][0][0]`; with
/// probability `1 - p` the bit is flipped and the replica coefficient is
/// negated.
pub fn noise_inversion<R: Rng>(
    data: &[Vec<u8>],
    profile: &ReadoutProfile,
    inverse_cnt: usize,
    rng: &mut R,
) -> Result<ExpandedData> {
    if inverse_cnt == 0 {
        return Err(Error::InvalidSpec("inverse_cnt must be at least 1".into()));
    }
    profile.validate()?;
    let mut rows = Vec::with_capacity(data.len() * inverse_cnt);
    let mut coefficients = Vec::with_capacity(data.len() * inverse_cnt);
    for row in data {
        profile.check_width(row.len())?;
        for _ in 0..inverse_cnt {
            let mut replica = Vec::with_capacity(row.len());
            let mut coefficient = 1.0;
            for (i, &b) in row.iter().enumerate() {
                let p = if b == 0 {
                    profile.calib[i][1][1]
                } else {
                    profile.calib[i][0][0]
                };
                if rng.gen_bool((1.0 - p).clamp(0.0, 1.0)) {
                    replica.push(1 - b);
                    coefficient = -coefficient;
                } else {
                    replica.push(b);
                }
            }
            rows.push(replica);
            coefficients.push(coefficient);
        }
    }
    Ok(ExpandedData { rows, coefficients })
}

/// Mitigated two-copy estimator: expand the Bell records through
/// [`noise_inversion`] and return the coefficient-weighted mean of the
/// per-replica sign products (weighted by the replica coefficients).
pub fn mitigated_estimate_a<R: Rng>(
    data: &BellDataset,
    profile: &ReadoutProfile,
    observable: &PauliString,
    inverse_cnt: usize,
    rng: &mut R,
) -> Result<f64> {
    if observable.len() != data.n() {
        return Err(Error::DimensionMismatch(format!(
            "observable has length {}, dataset has n = {}",
            observable.len(),
            data.n()
        )));
    }
    profile.check_width(2 * data.n())?;
    let rows: Vec<Vec<u8>> = data.records().iter().map(BellRecord::to_bits).collect();
    let expanded = noise_inversion(&rows, profile, inverse_cnt, rng)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (row, &coeff) in expanded.rows().iter().zip(expanded.coefficients()) {
        let record = BellRecord::from_bits(row)?;
        num += coeff * f64::from(record_sign(&record, observable));
        den += coeff;
    }
    if den <= 0.0 {
        return Err(Error::UnstableEstimate(format!(
            "coefficient mass {den} <= 0; increase N_Q or inverse_cnt"
        )));
    }
    Ok(num / den)
}

/// Default replica count of the inversion pseudocode.
pub const DEFAULT_INVERSE_CNT: usize = 20;
