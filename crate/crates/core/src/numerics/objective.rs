use super::{network, Architecture, Batch, ParamVector};
use crate::error::Result;

/// A twice-differentiable scalar function of the parameters.
///
/// Adaptation and meta-gradients are written against this trait so the same
/// code runs on network losses and on closed-form test functions.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn value(&self, params: &ParamVector) -> Result<f64>;
    fn gradient(&self, params: &ParamVector) -> Result<ParamVector>;
    fn hessian_vector_product(&self, params: &ParamVector, v: &ParamVector) -> Result<ParamVector>;
}

/// Mean cross-entropy of a network on a fixed batch.
#[derive(Clone, Copy, Debug)]
pub struct BatchLoss<'a> {
    pub arch: &'a Architecture,
    pub batch: &'a Batch,
}

impl<'a> BatchLoss<'a> {
    pub fn new(arch: &'a Architecture, batch: &'a Batch) -> Self {
        BatchLoss { arch, batch }
    }
}

impl Objective for BatchLoss<'_> {
    fn dim(&self) -> usize {
        self.arch.param_count()
    }

    fn value(&self, params: &ParamVector) -> Result<f64> {
        network::loss(self.arch, params, self.batch)
    }

    fn gradient(&self, params: &ParamVector) -> Result<ParamVector> {
        network::grad(self.arch, params, self.batch)
    }

    fn hessian_vector_product(&self, params: &ParamVector, v: &ParamVector) -> Result<ParamVector> {
        network::hessian_vector_product(self.arch, params, self.batch, v)
    }
}

/// `0.5 * scale * ||theta - center||^2`
#[derive(Clone, Debug)]
pub struct Quadratic {
    pub center: ParamVector,
    pub scale: f64,
}

impl Quadratic {
    /// `0.5 * ||theta||^2` in `dim` dimensions.
    pub fn unit(dim: usize) -> Self {
        Quadratic {
            center: ParamVector::zeros(dim),
            scale: 1.0,
        }
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, params: &ParamVector) -> Result<f64> {
        params.check_len("quadratic", self.dim())?;
        let d = params.sub(&self.center);
        Ok(0.5 * self.scale * d.dot(&d))
    }

    fn gradient(&self, params: &ParamVector) -> Result<ParamVector> {
        params.check_len("quadratic", self.dim())?;
        Ok(params.sub(&self.center).scaled(self.scale))
    }

    fn hessian_vector_product(&self, params: &ParamVector, v: &ParamVector) -> Result<ParamVector> {
        params.check_len("quadratic", self.dim())?;
        v.check_len("quadratic direction", self.dim())?;
        Ok(v.scaled(self.scale))
    }
}
