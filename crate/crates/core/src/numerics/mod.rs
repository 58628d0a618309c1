//! Parameter vectors, a small dense classifier, and its exact derivatives.

mod arch;
mod matrix;
pub mod network;
mod objective;
mod params;

pub use arch::{Activation, Architecture, LayerSlot};
pub use matrix::{Batch, Matrix};
pub use network::{
    cross_entropy, forward, grad, hessian_vector_product, loss, loss_and_grad, softmax_rows,
};
pub use objective::{BatchLoss, Objective, Quadratic};
pub use params::ParamVector;
