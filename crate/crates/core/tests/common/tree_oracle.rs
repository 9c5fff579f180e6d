use kappa_core::Signature;
use ndarray::Array2;
use std::f64::consts::PI;

/// Angle of every (component, dim) projection, computed from the raw coordinates.
pub fn oracle_angles(sig: &Signature, x: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for (c, comp) in sig.components().iter().enumerate() {
        let xs = &x[sig.range(c)];
        for d in 1..=comp.dim() {
            let (x0, xd) = if comp.is_curved() { (xs[0], xs[d]) } else { (1.0, xs[d - 1]) };
            let mut a = x0.atan2(xd);
            if a < 0.0 {
                a += PI;
            }
            if a >= PI {
                a -= PI;
            }
            out.push((c, d, a));
        }
    }
    out
}

pub fn gini(labels: &[usize], k: usize) -> f64 {
    let n = labels.len() as f64;
    let mut counts = vec![0.0; k];
    labels.iter().for_each(|&l| counts[l] += 1.0);
    1.0 - counts.iter().map(|c| (c / n).powi(2)).sum::<f64>()
}

pub fn split_score(left: &[usize], right: &[usize], k: usize) -> f64 {
    let (nl, nr) = (left.len() as f64, right.len() as f64);
    (nl * gini(left, k) + nr * gini(right, k)) / (nl + nr)
}

/// Best root partition by exhaustive scan: returns (score, component, dim, left set).
pub fn exhaustive_root(sig: &Signature, x: &Array2<f64>, y: &[usize], k: usize) -> (f64, usize, usize, Vec<usize>) {
    let n = x.nrows();
    let table: Vec<Vec<(usize, usize, f64)>> = (0..n).map(|i| oracle_angles(sig, x.row(i).as_slice().unwrap())).collect();
    let mut cands: Vec<(f64, usize, usize, usize, Vec<usize>)> = Vec::new();
    for f in 0..table[0].len() {
        let (c, d, _) = table[0][f];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| table[a][f].2.total_cmp(&table[b][f].2).then(a.cmp(&b)));
        for pos in 0..n - 1 {
            if table[order[pos]][f].2 == table[order[pos + 1]][f].2 {
                continue;
            }
            let left: Vec<usize> = order[..=pos].to_vec();
            let ly: Vec<usize> = left.iter().map(|&i| y[i]).collect();
            let ry: Vec<usize> = order[pos + 1..].iter().map(|&i| y[i]).collect();
            cands.push((split_score(&ly, &ry, k), c, d, pos, left));
        }
    }
    let best = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let mut tied: Vec<_> = cands.into_iter().filter(|c| c.0 <= best + 1e-12).collect();
    tied.sort_by(|p, q| (p.1, p.2, p.3).cmp(&(q.1, q.2, q.3)));
    let (s, c, d, _, mut left) = tied.swap_remove(0);
    left.sort_unstable();
    (s, c, d, left)
}

/// Axis-aligned CART on raw Euclidean coordinates with the same stopping rules.
pub enum Cart {
    Leaf(usize),
    Split { dim: usize, thr: f64, above: Box<Cart>, below: Box<Cart> },
}

pub fn cart(x: &Array2<f64>, y: &[usize], idx: Vec<usize>, depth: usize, max_depth: usize, k: usize) -> Cart {
    let labels: Vec<usize> = idx.iter().map(|&i| y[i]).collect();
    let mut counts = vec![0usize; k];
    labels.iter().for_each(|&l| counts[l] += 1);
    let majority = (0..k).fold(0, |b, c| if counts[c] > counts[b] { c } else { b });
    if depth >= max_depth || idx.len() < 2 || labels.iter().all(|&l| l == labels[0]) {
        return Cart::Leaf(majority);
    }
    // Descending coordinate order mirrors ascending angle; ties prefer the earliest position.
    let mut best: Option<(f64, usize, usize, Vec<usize>)> = None;
    let mut cands = Vec::new();
    for dim in 0..x.ncols() {
        let mut order = idx.clone();
        order.sort_by(|&a, &b| x[[b, dim]].total_cmp(&x[[a, dim]]).then(a.cmp(&b)));
        for pos in 0..order.len() - 1 {
            if x[[order[pos], dim]] == x[[order[pos + 1], dim]] {
                continue;
            }
            let ly: Vec<usize> = order[..=pos].iter().map(|&i| y[i]).collect();
            let ry: Vec<usize> = order[pos + 1..].iter().map(|&i| y[i]).collect();
            cands.push((split_score(&ly, &ry, k), dim, pos, order.clone()));
        }
    }
    let min = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    for c in cands.into_iter().filter(|c| c.0 <= min + 1e-12) {
        if best.as_ref().is_none_or(|b| (c.1, c.2) < (b.1, b.2)) {
            best = Some(c);
        }
    }
    let Some((_, dim, pos, order)) = best else { return Cart::Leaf(majority) };
    let thr = 0.5 * (x[[order[pos], dim]] + x[[order[pos + 1], dim]]);
    let above: Vec<usize> = order[..=pos].to_vec();
    let below: Vec<usize> = order[pos + 1..].to_vec();
    Cart::Split {
        dim,
        thr,
        above: Box::new(cart(x, y, above, depth + 1, max_depth, k)),
        below: Box::new(cart(x, y, below, depth + 1, max_depth, k)),
    }
}

pub fn cart_predict(t: &Cart, x: &[f64]) -> usize {
    match t {
        Cart::Leaf(c) => *c,
        Cart::Split { dim, thr, above, below } => {
            if x[*dim] > *thr {
                cart_predict(above, x)
            } else {
                cart_predict(below, x)
            }
        }
    }
}
