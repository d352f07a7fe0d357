//! Real division algebras of dimension 1, 2, 4 and 8 by Cayley–Dickson
//! doubling, with the pair product `(a, b)(c, d) = (ac − d̄b, da + bc̄)`.

pub fn conj(x: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    for v in out.iter_mut().skip(1) {
        *v = -*v;
    }
    out
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Product in the algebra of dimension `x.len()`, which must be a power of
/// two and equal to `y.len()`.
pub fn mul(x: &[f64], y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    if n == 1 {
        return vec![x[0] * y[0]];
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let first = sub(&mul(a, c), &mul(&conj(d), b));
    let second = add(&mul(d, a), &mul(b, &conj(c)));
    let mut out = first;
    out.extend(second);
    out
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
