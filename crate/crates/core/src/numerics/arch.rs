use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ParamVector;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    /// Rectifier. The derivative at exactly zero is taken as zero.
    #[default]
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::Identity => 1.0,
        }
    }

    pub fn second_derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu | Activation::Identity => 0.0,
            Activation::Tanh => {
                let t = z.tanh();
                -2.0 * t * (1.0 - t * t)
            }
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        })
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::InvalidArchitecture(format!(
                "unknown activation `{other}`"
            ))),
        }
    }
}

/// Location of one dense layer inside a flat [`ParamVector`].
///
/// Weights are stored row-major (`outputs x inputs`) followed by the biases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerSlot {
    pub inputs: usize,
    pub outputs: usize,
    pub offset: usize,
}

impl LayerSlot {
    pub fn weight_range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.inputs * self.outputs
    }

    pub fn bias_range(&self) -> std::ops::Range<usize> {
        let start = self.offset + self.inputs * self.outputs;
        start..start + self.outputs
    }

    pub fn len(&self) -> usize {
        (self.inputs + 1) * self.outputs
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Fully connected classifier: input width, hidden widths, logit count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ArchitectureRepr", into = "ArchitectureRepr")]
pub struct Architecture {
    widths: Vec<usize>,
    activation: Activation,
    layers: Vec<LayerSlot>,
}

#[derive(Serialize, Deserialize)]
struct ArchitectureRepr {
    widths: Vec<usize>,
    activation: Activation,
}

impl TryFrom<ArchitectureRepr> for Architecture {
    type Error = Error;

    fn try_from(repr: ArchitectureRepr) -> Result<Self> {
        Architecture::new(repr.widths, repr.activation)
    }
}

impl From<Architecture> for ArchitectureRepr {
    fn from(arch: Architecture) -> Self {
        ArchitectureRepr {
            widths: arch.widths,
            activation: arch.activation,
        }
    }
}

impl Architecture {
    /// `widths` lists the input dimension, every hidden width, then the
    /// number of output logits (at least two).
    pub fn new(widths: Vec<usize>, activation: Activation) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::InvalidArchitecture(
                "need at least an input and an output width".into(),
            ));
        }
        if widths.contains(&0) {
            return Err(Error::InvalidArchitecture("zero-width layer".into()));
        }
        if *widths.last().unwrap() < 2 {
            return Err(Error::InvalidArchitecture(
                "output width must be at least 2".into(),
            ));
        }
        let mut offset = 0;
        let layers = widths
            .windows(2)
            .map(|w| {
                let slot = LayerSlot {
                    inputs: w[0],
                    outputs: w[1],
                    offset,
                };
                offset += slot.len();
                slot
            })
            .collect();
        Ok(Architecture {
            widths,
            activation,
            layers,
        })
    }

    /// Binary classifier with the given hidden widths.
    pub fn classifier(input_dim: usize, hidden: &[usize], activation: Activation) -> Result<Self> {
        let mut widths = Vec::with_capacity(hidden.len() + 2);
        widths.push(input_dim);
        widths.extend_from_slice(hidden);
        widths.push(2);
        Architecture::new(widths, activation)
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn layers(&self) -> &[LayerSlot] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().unwrap()
    }

    pub fn hidden_layers(&self) -> usize {
        self.widths.len() - 2
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(LayerSlot::len).sum()
    }

    /// Parameters of every layer except the last.
    pub fn trunk_len(&self) -> usize {
        self.param_count() - self.layers.last().unwrap().len()
    }

    /// Uniform initialization in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]` per layer.
    pub fn init_params<R: Rng + ?Sized>(&self, rng: &mut R) -> ParamVector {
        let mut values = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            let bound = 1.0 / (layer.inputs as f64).sqrt();
            for _ in 0..layer.len() {
                values.push(rng.random_range(-bound..bound));
            }
        }
        ParamVector::new(values)
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths: Vec<String> = self.widths.iter().map(usize::to_string).collect();
        write!(f, "{} ({})", widths.join("-"), self.activation)
    }
}
