//! Derivative-free minimisers shared by the fitter and the optimiser.

/// Result of a Nelder–Mead run.
#[derive(Debug, Clone)]
pub struct SimplexMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Nelder–Mead simplex minimisation of `f` from `start`, with initial edge
/// lengths `steps`.
///
/// Stops when the spread of simplex values drops below `ftol` (absolute) or
/// after `max_iter` iterations.
pub fn nelder_mead<F>(f: F, start: &[f64], steps: &[f64], ftol: f64, max_iter: usize) -> SimplexMinimum
where
    F: Fn(&[f64]) -> f64,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let n = start.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let mut iterations = 0;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    while iterations < max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];
        if (values[worst] - values[best]).abs() <= ftol {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / n as f64;
            }
        }

        for j in 0..n {
            trial[j] = centroid[j] + REFLECT * (centroid[j] - simplex[worst][j]);
        }
        let f_reflect = eval(&trial);
        if f_reflect < values[best] {
            for j in 0..n {
                trial2[j] = centroid[j] + EXPAND * (trial[j] - centroid[j]);
            }
            let f_expand = eval(&trial2);
            if f_expand < f_reflect {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = f_expand;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[second_worst] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = f_reflect;
            continue;
        }

        // Contraction, outside if the reflection improved on the worst point.
        let outside = f_reflect < values[worst];
        for j in 0..n {
            let toward = if outside { trial[j] } else { simplex[worst][j] };
            trial2[j] = centroid[j] + CONTRACT * (toward - centroid[j]);
        }
        let f_contract = eval(&trial2);
        if f_contract < values[worst].min(f_reflect) {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = f_contract;
            continue;
        }

        let anchor = simplex[best].clone();
        for i in 0..=n {
            if i == best {
                continue;
            }
            for j in 0..n {
                simplex[i][j] = anchor[j] + SHRINK * (simplex[i][j] - anchor[j]);
            }
            values[i] = eval(&simplex[i]);
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    SimplexMinimum {
        x: simplex.swap_remove(best),
        value: values[best],
        iterations,
    }
}

/// Golden-section maximisation of `f` on `[lo, hi]`.
///
/// `f` may return `None` for points outside its domain; those count as
/// `-inf`. Returns the best point seen and its value, together with the
/// number of evaluations.
pub fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (Option<(f64, f64)>, usize)
where
    F: Fn(f64) -> Option<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let score = |v: Option<f64>| v.unwrap_or(f64::NEG_INFINITY);

    let mut evals = 0;
    let mut best: Option<(f64, f64)> = None;
    let probe = |x: f64, evals: &mut usize, best: &mut Option<(f64, f64)>| {
        *evals += 1;
        let v = f(x);
        if let Some(val) = v {
            if best.map_or(true, |(_, b)| val > b) {
                *best = Some((x, val));
            }
        }
        score(v)
    };

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = probe(x1, &mut evals, &mut best);
    let mut f2 = probe(x2, &mut evals, &mut best);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = probe(x1, &mut evals, &mut best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = probe(x2, &mut evals, &mut best);
        }
    }
    (best, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(rosen, &[-1.2, 1.0], &[0.5, 0.5], 1e-14, 10_000);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4, "{:?}", m.x);
    }

    #[test]
    fn golden_section_parabola_and_domain() {
        let (best, _) = golden_section_max(|x| Some(-(x - 0.3).powi(2)), 0.0, 1.0, 1e-10);
        assert!((best.unwrap().0 - 0.3).abs() < 1e-8);
        // Increasing function cut off at 0.7: maximum at the domain edge.
        let (best, _) = golden_section_max(|x| (x <= 0.7).then_some(x), 0.0, 1.0, 1e-10);
        assert!((best.unwrap().0 - 0.7).abs() < 1e-8);
        let (none, evals) = golden_section_max(|_| None, 0.0, 1.0, 1e-3);
        assert!(none.is_none() && evals > 2);
    }
}
