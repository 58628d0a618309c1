//! Inner-loop adaptation and the gradient of the post-adaptation query loss.
//!
//! Adaptation runs `k` plain gradient steps on the support loss `S`:
//! `theta_{i+1} = theta_i - alpha * grad S(theta_i)`. The meta-objective of an
//! episode is the query loss `Q(theta_k)`, and its exact gradient with respect
//! to `theta_0` is
//!
//! ```text
//! (I - alpha H_S(theta_0)) ... (I - alpha H_S(theta_{k-1})) grad Q(theta_k)
//! ```
//!
//! which is evaluated right to left with one Hessian-vector product per step.

use rayon::prelude::*;

use super::GradientMode;
use crate::error::{Error, Result};
use crate::numerics::{Architecture, BatchLoss, Objective, ParamVector};
use crate::tasks::Episode;

fn check_steps(steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::InvalidConfig("inner steps must be >= 1".into()));
    }
    Ok(())
}

/// All iterates `theta_0 ..= theta_k` of the inner loop.
pub fn adaptation_trajectory<O: Objective + ?Sized>(
    support: &O,
    params: &ParamVector,
    rate: f64,
    steps: usize,
) -> Result<Vec<ParamVector>> {
    check_steps(steps)?;
    params.check_len("adaptation parameters", support.dim())?;
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(params.clone());
    for _ in 0..steps {
        let current = trajectory.last().unwrap();
        let g = support.gradient(current)?;
        let mut next = current.clone();
        next.axpy(-rate, &g);
        trajectory.push(next);
    }
    Ok(trajectory)
}

/// `steps` gradient-descent updates on an arbitrary objective.
pub fn adapt<O: Objective + ?Sized>(
    support: &O,
    params: &ParamVector,
    rate: f64,
    steps: usize,
) -> Result<ParamVector> {
    Ok(adaptation_trajectory(support, params, rate, steps)?
        .pop()
        .unwrap())
}

/// `steps` full-batch gradient-descent updates on the support set.
pub fn inner_adapt(
    arch: &Architecture,
    params: &ParamVector,
    support: &crate::numerics::Batch,
    rate: f64,
    steps: usize,
) -> Result<ParamVector> {
    adapt(&BatchLoss::new(arch, support), params, rate, steps)
}

/// Result of adapting to one episode.
#[derive(Clone, Debug)]
pub struct AdaptationStep {
    pub adapted: ParamVector,
    /// Query loss at the adapted parameters.
    pub query_loss: f64,
    /// Gradient of the query loss with respect to the initial parameters.
    pub meta_gradient: ParamVector,
}

/// Adapts on `support` and differentiates `query` at the result with respect to `params`.
pub fn adaptation_step<S, Q>(
    support: &S,
    query: &Q,
    params: &ParamVector,
    rate: f64,
    steps: usize,
    mode: GradientMode,
) -> Result<AdaptationStep>
where
    S: Objective + ?Sized,
    Q: Objective + ?Sized,
{
    let trajectory = adaptation_trajectory(support, params, rate, steps)?;
    let adapted = trajectory.last().unwrap();
    let query_loss = query.value(adapted)?;
    let mut g = query.gradient(adapted)?;
    if mode == GradientMode::SecondOrder {
        for theta in trajectory[..steps].iter().rev() {
            let hv = support.hessian_vector_product(theta, &g)?;
            g.axpy(-rate, &hv);
        }
    }
    Ok(AdaptationStep {
        adapted: adapted.clone(),
        query_loss,
        meta_gradient: g,
    })
}

/// Per-episode adaptation, evaluated in parallel, returned in episode order.
pub fn adapt_episodes(
    arch: &Architecture,
    params: &ParamVector,
    episodes: &[Episode],
    rate: f64,
    steps: usize,
    mode: GradientMode,
) -> Result<Vec<AdaptationStep>> {
    episodes
        .par_iter()
        .map(|ep| {
            adaptation_step(
                &BatchLoss::new(arch, &ep.support),
                &BatchLoss::new(arch, &ep.query),
                params,
                rate,
                steps,
                mode,
            )
        })
        .collect()
}

/// Sum over episodes of the query-loss gradient with respect to the initial parameters.
///
/// Contributions are added in episode order, so the result does not depend
/// on how the per-episode work was scheduled.
pub fn meta_gradient(
    arch: &Architecture,
    params: &ParamVector,
    episodes: &[Episode],
    rate: f64,
    steps: usize,
    mode: GradientMode,
) -> Result<ParamVector> {
    if episodes.is_empty() {
        return Err(Error::NoEpisodes);
    }
    let parts = adapt_episodes(arch, params, episodes, rate, steps, mode)?;
    Ok(sum_gradients(
        params.len(),
        parts.iter().map(|p| &p.meta_gradient),
    ))
}

pub(crate) fn sum_gradients<'a>(
    len: usize,
    parts: impl Iterator<Item = &'a ParamVector>,
) -> ParamVector {
    let mut total = ParamVector::zeros(len);
    for g in parts {
        total.axpy(1.0, g);
    }
    total
}

/// Sum over episodes of the query loss after adaptation; the scalar that
/// [`meta_gradient`] differentiates.
pub fn meta_objective(
    arch: &Architecture,
    params: &ParamVector,
    episodes: &[Episode],
    rate: f64,
    steps: usize,
) -> Result<f64> {
    if episodes.is_empty() {
        return Err(Error::NoEpisodes);
    }
    let mut total = 0.0;
    for ep in episodes {
        let adapted = inner_adapt(arch, params, &ep.support, rate, steps)?;
        total += BatchLoss::new(arch, &ep.query).value(&adapted)?;
    }
    Ok(total)
}
