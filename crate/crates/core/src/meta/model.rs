//! Trained models and their checkpoint documents.
//!
//! A checkpoint is a TOML document:
//!
//! ```toml
//! format = "meta-curriculum-checkpoint"
//! version = 1
//!
//! [architecture]
//! widths = [16, 32, 2]
//! activation = "relu"
//!
//! [[provenance]]
//! stage = "meta-train"
//! seed = 7
//! config = "{...}"          # JSON of the stage configuration
//! log_sha256 = "9f2c..."    # run log digest, when the stage wrote one
//!
//! [params]
//! count = 610
//! values = ["0x1.2p-3", ...]  # hexadecimal floats, bit exact
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hexfloat;
use crate::numerics::{forward, softmax_rows, Architecture, Matrix, ParamVector};

const FORMAT: &str = "meta-curriculum-checkpoint";
const VERSION: u32 = 1;

/// One stage that produced or modified a model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    pub stage: String,
    pub seed: u64,
    /// JSON of the configuration used by the stage.
    pub config: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_sha256: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub arch: Architecture,
    pub params: ParamVector,
    pub provenance: Vec<ProvenanceEntry>,
}

impl TrainedModel {
    pub fn new(arch: Architecture, params: ParamVector) -> Result<Self> {
        params.check_len("model parameters", arch.param_count())?;
        Ok(TrainedModel {
            arch,
            params,
            provenance: Vec::new(),
        })
    }

    /// Randomly initialized model for `arch`.
    pub fn initialized(arch: Architecture, seed: u64) -> Self {
        let mut rng = crate::rng::stream_rng(seed, crate::rng::stream::INIT);
        let params = arch.init_params(&mut rng);
        TrainedModel {
            arch,
            params,
            provenance: vec![ProvenanceEntry {
                stage: "init".into(),
                seed,
                config: "{}".into(),
                log_sha256: None,
            }],
        }
    }

    pub(crate) fn with_stage(mut self, entry: ProvenanceEntry) -> Self {
        self.provenance.push(entry);
        self
    }

    pub fn to_checkpoint(&self) -> String {
        let doc = CheckpointDoc {
            format: FORMAT.into(),
            version: VERSION,
            architecture: self.arch.clone(),
            provenance: self.provenance.clone(),
            params: ParamsDoc {
                count: self.params.len(),
                values: self.params.iter().map(|&x| hexfloat::encode(x)).collect(),
            },
        };
        toml::to_string(&doc).expect("checkpoint serializes")
    }

    pub fn from_checkpoint(text: &str) -> Result<Self> {
        let doc: CheckpointDoc =
            toml::from_str(text).map_err(|e| Error::parse(0, format!("checkpoint: {e}")))?;
        if doc.format != FORMAT || doc.version != VERSION {
            return Err(Error::parse(
                0,
                format!("unsupported checkpoint {} v{}", doc.format, doc.version),
            ));
        }
        if doc.params.count != doc.params.values.len() {
            return Err(Error::parse(
                0,
                format!(
                    "checkpoint declares {} parameters but lists {}",
                    doc.params.count,
                    doc.params.values.len()
                ),
            ));
        }
        let values = doc
            .params
            .values
            .iter()
            .map(|v| hexfloat::decode(v))
            .collect::<Result<Vec<_>>>()?;
        let mut model = TrainedModel::new(doc.architecture, ParamVector::new(values))?;
        if !model.params.is_finite() {
            return Err(Error::NonFinite("checkpoint parameters"));
        }
        model.provenance = doc.provenance;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_checkpoint()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TrainedModel::from_checkpoint(&text)
    }

    pub fn infer(&self, inputs: &Matrix) -> Result<Vec<f64>> {
        infer(&self.arch, &self.params, inputs)
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointDoc {
    format: String,
    version: u32,
    architecture: Architecture,
    #[serde(default)]
    provenance: Vec<ProvenanceEntry>,
    params: ParamsDoc,
}

#[derive(Serialize, Deserialize)]
struct ParamsDoc {
    count: usize,
    values: Vec<String>,
}

/// Positive-class probability for every input row.
pub fn infer(arch: &Architecture, params: &ParamVector, inputs: &Matrix) -> Result<Vec<f64>> {
    let probs = softmax_rows(&forward(arch, params, inputs)?);
    Ok(probs.iter_rows().map(|r| r[1]).collect())
}
