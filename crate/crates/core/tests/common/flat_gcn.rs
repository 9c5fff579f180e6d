use kappa_core::kappa_models::KappaGcn;
use ndarray::{Array1, Array2};

/// Flat reference: hidden `relu(Â X W + b)`, output `Â · 4⟨h − p_c, a_c⟩`.
pub fn flat_reference(model: &KappaGcn, x: &Array2<f64>, a_hat: &Array2<f64>) -> Array2<f64> {
    let mut h = x.clone();
    for layer in &model.layers {
        let mut z = a_hat.dot(&h.dot(&layer.weights[0]));
        if let Some(b) = &layer.bias {
            z += &Array1::from(b.clone());
        }
        h = z.mapv(|v| v.max(0.0));
    }
    let k = model.head.a.nrows();
    let l = Array2::from_shape_fn((h.nrows(), k), |(i, c)| {
        4.0 * (&h.row(i) - &model.head.p.row(c)).dot(&model.head.a.row(c))
    });
    a_hat.dot(&l)
}
