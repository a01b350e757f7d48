//! JSON file formats for matrices, states, channels, Choi operators and
//! Hamiltonians.
//!
//! A matrix is `{"rows": r, "cols": c, "entries": [[re, im], ...]}` with the
//! entries flattened row-major. The other formats embed or extend it.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{ChoiOperator, KrausChannel};
use crate::densemath::ComplexMatrix;
use crate::error::{Error, Result};
use crate::states::{BipartiteState, DensityMatrix, PureState};
use crate::thermo::Hamiltonian;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let data = self.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        ComplexMatrix::new(self.rows, self.cols, data).map_err(|e| Error::Parse(format!("entries: {e}")))
    }
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), entries: m.entries().iter().map(|z| [z.re, z.im]).collect() }
    }
}

/// Density matrix, optionally with a bipartite split `dims = [d_R, d_A]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = MatrixFile::from(rho.matrix());
        Self { rows: m.rows, cols: m.cols, entries: m.entries, dims: None }
    }

    pub fn from_bipartite(rho: &BipartiteState) -> Self {
        Self { dims: Some([rho.dim_r(), rho.dim_a()]), ..Self::from_state(rho.state()) }
    }

    /// Pure state written as `|v><v|`.
    pub fn from_pure(v: &PureState, dims: Option<[usize; 2]>) -> Self {
        Self { dims, ..Self::from_state(&DensityMatrix::from_pure(v)) }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        let m = MatrixFile { rows: self.rows, cols: self.cols, entries: self.entries.clone() }.to_matrix()?;
        DensityMatrix::new(m)
    }

    pub fn to_bipartite(&self) -> Result<BipartiteState> {
        let [dr, da] = self.dims.ok_or_else(|| Error::Parse("dims: missing bipartite split".into()))?;
        BipartiteState::new(dr, da, self.to_state()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixFile>,
}

impl ChannelFile {
    pub fn to_channel(&self) -> Result<KrausChannel> {
        let kraus = self
            .kraus
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_matrix().map_err(|e| Error::Parse(format!("kraus[{i}]: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(self.dim_in, self.dim_out, kraus)
    }
}

impl From<&KrausChannel> for ChannelFile {
    fn from(ch: &KrausChannel) -> Self {
        Self { dim_in: ch.dim_in(), dim_out: ch.dim_out(), kraus: ch.kraus().iter().map(MatrixFile::from).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiFile {
    pub dim_r: usize,
    pub dim_a: usize,
    pub choi: MatrixFile,
}

impl ChoiFile {
    pub fn to_choi(&self) -> Result<ChoiOperator> {
        ChoiOperator::new(self.dim_r, self.dim_a, self.choi.to_matrix()?)
    }
}

impl From<&ChoiOperator> for ChoiFile {
    fn from(c: &ChoiOperator) -> Self {
        Self { dim_r: c.dim_r(), dim_a: c.dim_a(), choi: MatrixFile::from(c.matrix()) }
    }
}

/// Either channel representation, as found in a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyChannelFile {
    Kraus(ChannelFile),
    Choi(ChoiFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
    /// Free-text unit annotation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

impl HamiltonianFile {
    pub fn to_hamiltonian(&self) -> Result<Hamiltonian> {
        let m = MatrixFile { rows: self.rows, cols: self.cols, entries: self.entries.clone() }.to_matrix()?;
        Hamiltonian::new(m)
    }

    pub fn from_hamiltonian(h: &Hamiltonian, units: Option<String>) -> Self {
        let m = MatrixFile::from(h.matrix());
        Self { rows: m.rows, cols: m.cols, entries: m.entries, units }
    }
}

/// Parses JSON text, reporting the offending field on failure.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let parsed: T = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(parsed)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types always serialize")
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    from_json(&text)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value) + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
