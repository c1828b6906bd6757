use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use bcabe_core::tensor::{CMatrix, CVector};
use bcabe_core::{DensityMatrix, PureState};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Density,
    Pure,
}

/// Amplitudes or matrix entries as `[re, im]` pairs, row-major. Floats are
/// written in shortest round-trip form, so reading back is bit-exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub qubits: usize,
    pub kind: StateKind,
    pub data: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let dim = m.nrows();
        let data = (0..dim * dim).map(|k| {
            let z = m[(k / dim, k % dim)];
            [z.re, z.im]
        });
        Self {
            qubits: rho.num_qubits(),
            kind: StateKind::Density,
            data: data.collect(),
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            qubits: psi.num_qubits(),
            kind: StateKind::Pure,
            data: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    fn entries(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.data.iter().map(|[re, im]| Complex64::new(*re, *im))
    }

    fn check_len(&self, expected: usize) -> Result<(), Failure> {
        if self.data.len() != expected {
            return Err(Failure::Usage(format!(
                "state file has {} entries, {} qubits need {expected}",
                self.data.len(),
                self.qubits
            )));
        }
        Ok(())
    }

    pub fn to_density(&self) -> Result<DensityMatrix, Failure> {
        if self.kind != StateKind::Density {
            return Err(Failure::Usage("state file holds a pure state".into()));
        }
        let dim = 1usize << self.qubits;
        self.check_len(dim * dim)?;
        let entries: Vec<Complex64> = self.entries().collect();
        Ok(DensityMatrix::new(CMatrix::from_row_slice(dim, dim, &entries))?)
    }

    pub fn to_pure(&self) -> Result<PureState, Failure> {
        if self.kind != StateKind::Pure {
            return Err(Failure::Usage("state file holds a density matrix".into()));
        }
        self.check_len(1usize << self.qubits)?;
        Ok(PureState::from_vector(CVector::from_iterator(
            self.data.len(),
            self.entries(),
        ))?)
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        write_text(path, &serde_json::to_string(self).expect("state serializes"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value < threshold`.
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value < threshold,
        }
    }

    /// Passes when `value >= threshold`.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value >= threshold,
        }
    }
}

/// Everything in the payload is a function of the command line; run metadata
/// lives in the header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Payload {
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub tolerances: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub unix_time: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub header: Header,
    pub payload: Payload,
}

impl ReportFile {
    pub fn new(command: &str, parameters: Value, results: Value, tolerances: Value, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            header: Header {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                unix_time: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            },
            payload: Payload {
                command: command.into(),
                parameters,
                results,
                tolerances,
                checks,
                passed,
            },
        }
    }

    /// Writes to `path`, or to stdout without one.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        match path {
            Some(p) => write_text(p, &text),
            None => {
                println!("{text}");
                Ok(())
            }
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}
