// Copyright 2026 GKSL Numerics Contributors
// SPDX-License-Identifier: Apache-2.0

//! JSON file formats shared by all tools.
//!
//! * Operator: `{"dim": d, "re": [[...]], "im": [[...]]}`, row-major doubles.
//! * Channel: `{"dim": d, "repr": "kraus"|"choi"|"super", "payload": ...}`
//!   where a Kraus payload is a list of operators and Choi/super payloads are
//!   one d²×d² matrix in the same layout.
//! * Generator: `{"dim": d, "H": Operator, "jumps": [Operator, ...]}`.
//!
//! Writes are atomic (temp file + rename) and contain no timestamps, so a
//! fixed seed and configuration produce byte-identical files.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::channel::{super_from_choi, super_from_kraus, ChoiMatrix, KrausSet, SuperMatrix};
use crate::error::CoreError;
use crate::extraction::{ExtractionResult, OrderDiagnostics};
use crate::generator::GkslGenerator;
use crate::operator::{Operator, C64};

/// Errors from reading or writing tool files.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid file: {0}")]
    Format(String),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

/// A dense complex matrix as (re, im) double arrays, row-major.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDto {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixDto {
    pub fn from_dmatrix(m: &DMatrix<C64>) -> Self {
        let dim = m.nrows();
        let re = (0..dim)
            .map(|i| (0..dim).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..dim)
            .map(|i| (0..dim).map(|j| m[(i, j)].im).collect())
            .collect();
        Self { dim, re, im }
    }

    pub fn to_dmatrix(&self) -> IoResult<DMatrix<C64>> {
        let d = self.dim;
        if self.re.len() != d || self.im.len() != d {
            return Err(IoError::Format(format!(
                "matrix claims dim {d} but has {} re rows and {} im rows",
                self.re.len(),
                self.im.len()
            )));
        }
        let mut m = DMatrix::<C64>::zeros(d, d);
        for i in 0..d {
            if self.re[i].len() != d || self.im[i].len() != d {
                return Err(IoError::Format(format!("row {i} has wrong length")));
            }
            for j in 0..d {
                m[(i, j)] = C64::new(self.re[i][j], self.im[i][j]);
            }
        }
        Ok(m)
    }

    pub fn from_operator(op: &Operator) -> Self {
        Self::from_dmatrix(op.matrix())
    }

    pub fn to_operator(&self) -> IoResult<Operator> {
        Ok(Operator::from_matrix(self.to_dmatrix()?)?)
    }
}

/// Payload of a channel file: a Kraus list or a single d²×d² matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelPayload {
    Kraus(Vec<MatrixDto>),
    Matrix(MatrixDto),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelDto {
    pub dim: usize,
    pub repr: String,
    pub payload: ChannelPayload,
}

/// A channel in whichever representation the file carried.
#[derive(Clone, Debug)]
pub enum Channel {
    Kraus(KrausSet),
    Choi(ChoiMatrix),
    Super(SuperMatrix),
}

impl Channel {
    pub fn dim(&self) -> usize {
        match self {
            Channel::Kraus(k) => k.dim(),
            Channel::Choi(j) => j.dim(),
            Channel::Super(s) => s.dim(),
        }
    }

    /// The superoperator matrix of the carried map.
    pub fn to_super(&self) -> SuperMatrix {
        match self {
            Channel::Kraus(k) => super_from_kraus(k),
            Channel::Choi(j) => super_from_choi(j),
            Channel::Super(s) => s.clone(),
        }
    }

    pub fn to_dto(&self) -> ChannelDto {
        match self {
            Channel::Kraus(k) => ChannelDto {
                dim: k.dim(),
                repr: "kraus".into(),
                payload: ChannelPayload::Kraus(
                    k.ops().iter().map(MatrixDto::from_operator).collect(),
                ),
            },
            Channel::Choi(j) => ChannelDto {
                dim: j.dim(),
                repr: "choi".into(),
                payload: ChannelPayload::Matrix(MatrixDto::from_dmatrix(j.matrix())),
            },
            Channel::Super(s) => ChannelDto {
                dim: s.dim(),
                repr: "super".into(),
                payload: ChannelPayload::Matrix(MatrixDto::from_dmatrix(s.matrix())),
            },
        }
    }

    pub fn from_dto(dto: &ChannelDto) -> IoResult<Self> {
        let d = dto.dim;
        match (dto.repr.as_str(), &dto.payload) {
            ("kraus", ChannelPayload::Kraus(ops)) => {
                let ops = ops
                    .iter()
                    .map(|m| {
                        let op = m.to_operator()?;
                        if op.dim() != d {
                            return Err(IoError::Format(format!(
                                "kraus operator dim {} does not match channel dim {d}",
                                op.dim()
                            )));
                        }
                        Ok(op)
                    })
                    .collect::<IoResult<Vec<_>>>()?;
                Ok(Channel::Kraus(KrausSet::new(ops)?))
            }
            ("choi", ChannelPayload::Matrix(m)) => {
                if m.dim != d * d {
                    return Err(IoError::Format(format!(
                        "choi payload must be {0}x{0}, got {1}x{1}",
                        d * d,
                        m.dim
                    )));
                }
                Ok(Channel::Choi(ChoiMatrix::new(d, m.to_dmatrix()?)?))
            }
            ("super", ChannelPayload::Matrix(m)) => {
                if m.dim != d * d {
                    return Err(IoError::Format(format!(
                        "super payload must be {0}x{0}, got {1}x{1}",
                        d * d,
                        m.dim
                    )));
                }
                Ok(Channel::Super(SuperMatrix::new(d, m.to_dmatrix()?)?))
            }
            (repr @ ("kraus" | "choi" | "super"), _) => Err(IoError::Format(format!(
                "repr \"{repr}\" does not match the payload shape"
            ))),
            (other, _) => Err(IoError::Format(format!(
                "unknown repr \"{other}\" (expected kraus, choi or super)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorDto {
    pub dim: usize,
    #[serde(rename = "H")]
    pub h: MatrixDto,
    pub jumps: Vec<MatrixDto>,
}

impl GeneratorDto {
    pub fn from_generator(g: &GkslGenerator) -> Self {
        Self {
            dim: g.dim(),
            h: MatrixDto::from_operator(g.hamiltonian()),
            jumps: g.jumps().iter().map(MatrixDto::from_operator).collect(),
        }
    }

    pub fn to_generator(&self) -> IoResult<GkslGenerator> {
        let h = self.h.to_operator()?;
        if h.dim() != self.dim {
            return Err(IoError::Format(format!(
                "H has dim {}, file claims {}",
                h.dim(),
                self.dim
            )));
        }
        let jumps = self
            .jumps
            .iter()
            .map(|m| m.to_operator())
            .collect::<IoResult<Vec<_>>>()?;
        Ok(GkslGenerator::new(h, jumps)?)
    }
}

/// Serializable form of an [`ExtractionResult`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtractionResultDto {
    pub generator: GeneratorDto,
    pub diagnostics: OrderDiagnostics,
    pub residuals: Vec<f64>,
    pub extrapolation: ExtrapolationDto,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtrapolationDto {
    pub dt1: f64,
    pub dt2: f64,
    pub weights: (f64, f64),
}

impl ExtractionResultDto {
    pub fn from_result(r: &ExtractionResult) -> Self {
        Self {
            generator: GeneratorDto::from_generator(&r.generator),
            diagnostics: r.diagnostics.clone(),
            residuals: r.residuals.clone(),
            extrapolation: ExtrapolationDto {
                dt1: r.extrapolation.dt_pair.0,
                dt2: r.extrapolation.dt_pair.1,
                weights: r.extrapolation.weights,
            },
        }
    }
}

/// Serializable form of an [`crate::align::AlignmentResult`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlignmentResultDto {
    pub mixing: MatrixDto,
    pub aligned: ChannelDto,
    pub distance_before: f64,
    pub distance_after: f64,
}

impl AlignmentResultDto {
    pub fn from_result(r: &crate::align::AlignmentResult) -> Self {
        Self {
            mixing: MatrixDto::from_dmatrix(&r.mixing),
            aligned: Channel::Kraus(r.aligned.clone()).to_dto(),
            distance_before: r.distance_before,
            distance_after: r.distance_after,
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> IoResult<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty-printed JSON written atomically: temp file in the same directory,
/// then rename.
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> IoResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_atomic(path, text.as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> IoResult<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        if !bytes.ends_with(b"\n") {
            f.write_all(b"\n")?;
        }
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_generator(path: &Path) -> IoResult<GkslGenerator> {
    read_json::<GeneratorDto>(path)?.to_generator()
}

pub fn save_generator(path: &Path, g: &GkslGenerator) -> IoResult<()> {
    write_json_atomic(path, &GeneratorDto::from_generator(g))
}

pub fn load_channel(path: &Path) -> IoResult<Channel> {
    Channel::from_dto(&read_json::<ChannelDto>(path)?)
}

pub fn save_channel(path: &Path, c: &Channel) -> IoResult<()> {
    write_json_atomic(path, &c.to_dto())
}
