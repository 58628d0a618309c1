mod common;

use common::{loss_fd_gradient, max_relative_error, tiny_problem};
use meta_curriculum::meta::infer;
use meta_curriculum::numerics::{
    cross_entropy, forward, grad, hessian_vector_product, loss, Activation, Architecture, Batch,
    Matrix, ParamVector,
};
use meta_curriculum::rng::stream_rng;
use rand::Rng;

#[test]
fn gradient_matches_finite_differences() {
    for seed in 0..20 {
        let (arch, params, batch) = tiny_problem(seed);
        let g = grad(&arch, &params, &batch).unwrap();
        let fd = loss_fd_gradient(&arch, &params, &batch);
        let err = max_relative_error(&g, &fd, 1e-8);
        assert!(err < 1e-5, "seed {seed}: relative error {err:e}");
    }
}

#[test]
fn hvp_matches_gradient_differences() {
    for seed in (0..20).step_by(2) {
        let (arch, params, batch) = tiny_problem(seed);
        let mut rng = stream_rng(seed, 5);
        let v = ParamVector::new(
            (0..params.len())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect(),
        );
        let hv = hessian_vector_product(&arch, &params, &batch, &v).unwrap();
        let h = 1e-4;
        let g = |t: f64| grad(&arch, &params.add(&v.scaled(t)), &batch).unwrap();
        let fd = g(-2.0 * h)
            .sub(&g(2.0 * h))
            .add(&g(h).sub(&g(-h)).scaled(8.0))
            .scaled(1.0 / (12.0 * h));
        let err = hv.sub(&fd).norm() / hv.norm().max(1e-12);
        assert!(err < 1e-4, "seed {seed}: {err:e}");
    }
}

#[test]
fn hvp_is_symmetric() {
    for seed in 0..20 {
        let (arch, params, batch) = tiny_problem(seed);
        let mut rng = stream_rng(seed, 6);
        let mut draw = || {
            ParamVector::new(
                (0..params.len())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect(),
            )
        };
        let (u, v) = (draw(), draw());
        let uhv = u.dot(&hessian_vector_product(&arch, &params, &batch, &v).unwrap());
        let vhu = v.dot(&hessian_vector_product(&arch, &params, &batch, &u).unwrap());
        assert!(
            (uhv - vhu).abs() <= 1e-10 * uhv.abs().max(1.0),
            "seed {seed}: {uhv} vs {vhu}"
        );
    }
}

#[test]
fn forward_matches_hand_computation() {
    // 2-4-2 relu network with every weight written out.
    let arch = Architecture::new(vec![2, 4, 2], Activation::Relu).unwrap();
    let w1 = [[0.5, -1.0], [1.5, 0.25], [-0.75, 0.5], [0.0, 2.0]];
    let b1 = [0.1, -0.2, 0.3, -0.4];
    let w2 = [[1.0, -0.5, 0.25, 0.75], [-1.25, 0.5, 1.0, -0.25]];
    let b2 = [0.05, -0.05];
    let mut p = Vec::new();
    w1.iter().for_each(|r| p.extend(r));
    p.extend(b1);
    w2.iter().for_each(|r| p.extend(r));
    p.extend(b2);
    let params = ParamVector::new(p);
    let x = [[1.0, 2.0], [-0.5, 0.3]];
    let out = forward(&arch, &params, &Matrix::from_rows(&x).unwrap()).unwrap();
    for (r, row) in x.iter().enumerate() {
        let hidden: Vec<f64> = (0..4)
            .map(|j| (w1[j][0] * row[0] + w1[j][1] * row[1] + b1[j]).max(0.0))
            .collect();
        for o in 0..2 {
            let expected = (0..4).map(|j| w2[o][j] * hidden[j]).sum::<f64>() + b2[o];
            assert!((out.get(r, o) - expected).abs() < 1e-14);
        }
    }
}

#[test]
fn cross_entropy_is_mean_of_row_losses() {
    let logits =
        Matrix::from_rows(&[[2.0, -1.0], [0.0, 0.0], [-700.0, 700.0], [3.0, 3.5]]).unwrap();
    let labels = [0u8, 1, 0, 1];
    let mut total = 0.0;
    for (r, &y) in labels.iter().enumerate() {
        let (a, b) = (logits.get(r, 0), logits.get(r, 1));
        let m = a.max(b);
        let lse = m + ((a - m).exp() + (b - m).exp()).ln();
        total += lse - logits.get(r, y as usize);
    }
    let ce = cross_entropy(&logits, &labels).unwrap();
    assert!((ce - total / 4.0).abs() < 1e-12);
    assert!(ce.is_finite());
}

#[test]
fn infer_is_positive_class_softmax() {
    let (arch, params, batch) = tiny_problem(3);
    let logits = forward(&arch, &params, batch.inputs()).unwrap();
    let probs = infer(&arch, &params, batch.inputs()).unwrap();
    for (r, p) in probs.iter().enumerate() {
        let expected = 1.0 / (1.0 + (logits.get(r, 0) - logits.get(r, 1)).exp());
        assert!((p - expected).abs() < 1e-14);
    }
}

#[test]
fn loss_of_duplicated_batch_is_unchanged() {
    let (arch, params, batch) = tiny_problem(4);
    let a = loss(&arch, &params, &batch).unwrap();
    let b = loss(&arch, &params, &batch.duplicated()).unwrap();
    assert!((a - b).abs() < 1e-14);
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let (arch, params, _) = tiny_problem(0);
    let bad = Batch::new(Matrix::zeros(2, arch.input_dim() + 1), vec![0, 1]).unwrap();
    assert!(grad(&arch, &params, &bad).is_err());
    let short = ParamVector::zeros(params.len() - 1);
    assert!(forward(&arch, &short, &Matrix::zeros(1, arch.input_dim())).is_err());
}
