//! JSONL persistence for measurement datasets: a single header object on
//! the first line, one record object per following line.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::bell::{BellDataset, BellRecord};
use crate::dynamics::{DynamicsStrategyKind, OutcomeMatrix};
use crate::ensemble::EnsembleSpec;
use crate::noise::ReadoutProfile;
use crate::pauli::PauliString;
use crate::shadow::{PauliSnapshot, ShadowDataset};
use crate::statevec::SymmetryClass;
use crate::{Error, Result};

pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

pub fn string_to_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Parse(format!("invalid bit {other:?}"))),
        })
        .collect()
}

/// Header of a Bell-measurement dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellHeader {
    pub kind: String,
    pub spec: EnsembleSpec,
    pub seed: u64,
    pub noise: Option<ReadoutProfile>,
    pub n_q: usize,
}

#[derive(Serialize, Deserialize)]
struct BellLine {
    t: usize,
    bits: String,
}

pub fn write_bell_dataset<W: Write>(
    mut w: W,
    spec: &EnsembleSpec,
    seed: u64,
    noise: Option<&ReadoutProfile>,
    data: &BellDataset,
) -> Result<()> {
    let header = BellHeader {
        kind: "bell".into(),
        spec: *spec,
        seed,
        noise: noise.cloned(),
        n_q: data.len(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for (t, record) in data.records().iter().enumerate() {
        serde_json::to_writer(&mut w, &BellLine { t, bits: bits_to_string(&record.to_bits()) })?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_bell_dataset<R: BufRead>(r: R) -> Result<(BellHeader, BellDataset)> {
    let mut lines = r.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Parse("empty dataset file".into()))??;
    let header: BellHeader = serde_json::from_str(&header_line)?;
    if header.kind != "bell" {
        return Err(Error::Parse(format!("expected bell dataset, found {:?}", header.kind)));
    }
    let mut records = Vec::with_capacity(header.n_q);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: BellLine = serde_json::from_str(&line)?;
        records.push(BellRecord::from_bits(&string_to_bits(&parsed.bits)?)?);
    }
    if records.len() != header.n_q {
        return Err(Error::Parse(format!(
            "header claims {} records, file has {}",
            header.n_q,
            records.len()
        )));
    }
    let data = BellDataset::new(header.spec.n(), records)?;
    Ok((header, data))
}

/// Header of a classical-shadow dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowHeader {
    pub kind: String,
    pub spec: EnsembleSpec,
    pub seed: u64,
    pub noise: Option<ReadoutProfile>,
    pub experiments: usize,
}

#[derive(Serialize, Deserialize)]
struct ShadowLine {
    bases: String,
    bits: String,
}

pub fn write_shadow_dataset<W: Write>(
    mut w: W,
    spec: &EnsembleSpec,
    seed: u64,
    noise: Option<&ReadoutProfile>,
    data: &ShadowDataset,
) -> Result<()> {
    let header = ShadowHeader {
        kind: "shadow".into(),
        spec: *spec,
        seed,
        noise: noise.cloned(),
        experiments: data.len(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for snapshot in data.snapshots() {
        let line = ShadowLine {
            bases: snapshot.bases().to_string(),
            bits: bits_to_string(&snapshot.to_bits()),
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_shadow_dataset<R: BufRead>(r: R) -> Result<(ShadowHeader, ShadowDataset)> {
    let mut lines = r.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Parse("empty dataset file".into()))??;
    let header: ShadowHeader = serde_json::from_str(&header_line)?;
    if header.kind != "shadow" {
        return Err(Error::Parse(format!("expected shadow dataset, found {:?}", header.kind)));
    }
    let mut snapshots = Vec::with_capacity(header.experiments);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: ShadowLine = serde_json::from_str(&line)?;
        let bases: PauliString = parsed.bases.parse()?;
        snapshots.push(PauliSnapshot::from_bits(bases, &string_to_bits(&parsed.bits)?)?);
    }
    if snapshots.len() != header.experiments {
        return Err(Error::Parse(format!(
            "header claims {} snapshots, file has {}",
            header.experiments,
            snapshots.len()
        )));
    }
    let data = ShadowDataset::new(header.spec.n(), snapshots)?;
    Ok((header, data))
}

/// Header of a dynamics outcome file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsHeader {
    pub kind: String,
    pub circuit_seed: Option<u64>,
    pub symmetry_label: SymmetryClass,
    pub strategy: DynamicsStrategyKind,
    pub n: usize,
    pub depth: usize,
    pub repetitions: usize,
    pub noise: Option<ReadoutProfile>,
}

#[derive(Serialize, Deserialize)]
struct OutcomeLine {
    bits: String,
}

pub fn write_outcome_matrix<W: Write>(mut w: W, header: &DynamicsHeader, m: &OutcomeMatrix) -> Result<()> {
    if header.repetitions != m.len() {
        return Err(Error::DimensionMismatch("header repetitions != row count".into()));
    }
    if header.strategy.row_width(header.n) != m.width() {
        return Err(Error::DimensionMismatch("header strategy width != row width".into()));
    }
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    for row in m.rows() {
        serde_json::to_writer(&mut w, &OutcomeLine { bits: bits_to_string(row) })?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_outcome_matrix<R: BufRead>(r: R) -> Result<(DynamicsHeader, OutcomeMatrix)> {
    let mut lines = r.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Parse("empty dataset file".into()))??;
    let header: DynamicsHeader = serde_json::from_str(&header_line)?;
    if header.kind != "dynamics" {
        return Err(Error::Parse(format!("expected dynamics dataset, found {:?}", header.kind)));
    }
    let mut rows = Vec::with_capacity(header.repetitions);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: OutcomeLine = serde_json::from_str(&line)?;
        rows.push(string_to_bits(&parsed.bits)?);
    }
    if rows.len() != header.repetitions {
        return Err(Error::Parse(format!(
            "header claims {} rows, file has {}",
            header.repetitions,
            rows.len()
        )));
    }
    let m = OutcomeMatrix::new(header.strategy.row_width(header.n), rows)?;
    Ok((header, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::run_quantum_enhanced;
    use crate::dynamics::{run_conventional_dynamics, DynamicsExperimentConfig};
    use crate::rngstream::stream;
    use crate::shadow::run_conventional;
    use crate::statevec::{generate_1d_circuit, SymmetryClass};

    #[test]
    fn bell_round_trip() {
        let spec = EnsembleSpec::new("XZ".parse().unwrap(), 0.9).unwrap();
        let mut rng = stream(150, "dataset", 0);
        let noise = ReadoutProfile::uniform(4, 0.05).unwrap();
        let data = run_quantum_enhanced(&spec, 16, Some(&noise), &mut rng).unwrap();
        let mut buffer = Vec::new();
        write_bell_dataset(&mut buffer, &spec, 150, Some(&noise), &data).unwrap();
        let (header, back) = read_bell_dataset(buffer.as_slice()).unwrap();
        assert_eq!(header.spec, spec);
        assert_eq!(header.seed, 150);
        assert_eq!(header.noise, Some(noise));
        assert_eq!(back, data);
    }

    #[test]
    fn shadow_round_trip() {
        let spec = EnsembleSpec::new("ZZY".parse().unwrap(), 0.95).unwrap();
        let mut rng = stream(151, "dataset", 0);
        let data = run_conventional(&spec, 12, None, &mut rng).unwrap();
        let mut buffer = Vec::new();
        write_shadow_dataset(&mut buffer, &spec, 151, None, &data).unwrap();
        let (header, back) = read_shadow_dataset(buffer.as_slice()).unwrap();
        assert_eq!(header.spec, spec);
        assert_eq!(back, data);
    }

    #[test]
    fn dynamics_round_trip() {
        let mut rng = stream(152, "dataset", 0);
        let circuit = generate_1d_circuit(3, 2, SymmetryClass::General, &mut rng).unwrap();
        let cfg = DynamicsExperimentConfig {
            n: 3,
            depth: 2,
            repetitions: 10,
            strategy: DynamicsStrategyKind::Conventional,
            noise: None,
        };
        let m = run_conventional_dynamics(&circuit, &cfg, &mut rng).unwrap();
        let header = DynamicsHeader {
            kind: "dynamics".into(),
            circuit_seed: Some(42),
            symmetry_label: circuit.symmetry,
            strategy: cfg.strategy,
            n: cfg.n,
            depth: cfg.depth,
            repetitions: m.len(),
            noise: None,
        };
        let mut buffer = Vec::new();
        write_outcome_matrix(&mut buffer, &header, &m).unwrap();
        let (back_header, back) = read_outcome_matrix(buffer.as_slice()).unwrap();
        assert_eq!(back_header, header);
        assert_eq!(back, m);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(string_to_bits("01x1").is_err());
        assert!(read_bell_dataset("".as_bytes()).is_err());
        let bad_kind = r#"{"kind":"shadow","spec":{"n":1,"pauli":"Z","alpha":0.9},"seed":0,"noise":null,"n_q":0}"#;
        assert!(read_bell_dataset(bad_kind.as_bytes()).is_err());
    }
}
