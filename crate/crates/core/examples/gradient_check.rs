//! Backprop gradient and Hessian-vector product against central differences.

use meta_curriculum::numerics::{
    grad, hessian_vector_product, loss, Activation, Architecture, Batch, Matrix, ParamVector,
};
use meta_curriculum::rng::stream_rng;
use rand::Rng;

fn main() -> meta_curriculum::Result<()> {
    let mut rng = stream_rng(7, 0);
    let arch = Architecture::new(vec![3, 5, 4, 2], Activation::Tanh)?;
    let params = arch.init_params(&mut rng);
    let rows: Vec<Vec<f64>> = (0..6)
        .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let batch = Batch::new(Matrix::from_rows(&rows)?, vec![0, 1, 1, 0, 1, 0])?;

    let g = grad(&arch, &params, &batch)?;
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for i in 0..params.len() {
        let mut plus = params.clone();
        let mut minus = params.clone();
        plus[i] += h;
        minus[i] -= h;
        let fd = (loss(&arch, &plus, &batch)? - loss(&arch, &minus, &batch)?) / (2.0 * h);
        worst = worst.max((fd - g[i]).abs() / g[i].abs().max(1e-8));
    }
    println!(
        "{} parameters, max relative gradient error {worst:.2e}",
        params.len()
    );

    let v = ParamVector::new(
        (0..params.len())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect(),
    );
    let hv = hessian_vector_product(&arch, &params, &batch, &v)?;
    let eps = 1e-5;
    let gp = grad(&arch, &params.add(&v.scaled(eps)), &batch)?;
    let gm = grad(&arch, &params.sub(&v.scaled(eps)), &batch)?;
    let fd = gp.sub(&gm).scaled(0.5 / eps);
    println!(
        "Hessian-vector product: |Hv| = {:.4}, |Hv - fd| = {:.2e}",
        hv.norm(),
        hv.sub(&fd).norm()
    );
    Ok(())
}
