//! Nelder–Mead simplex minimisation with dimension-adaptive coefficients
//! (Gao & Han, 2012).

#[derive(Debug, Clone, Copy)]
pub struct NmOptions {
    pub max_evals: usize,
    /// Stop when `f_worst − f_best ≤ rel_tol·|f_best| + abs_tol`.
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        NmOptions { max_evals: 10_000, rel_tol: 1e-10, abs_tol: 1e-300 }
    }
}

#[derive(Debug, Clone)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

pub fn nelder_mead<F>(f: &mut F, x0: &[f64], step: f64, opts: &NmOptions) -> NmResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    let mut converged = false;

    while evals < opts.max_evals {
        // Order: best first, worst last.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&k| std::mem::take(&mut simplex[k])).collect();
        values = order.iter().map(|&k| values[k]).collect();

        let (best, worst) = (values[0], values[n]);
        if worst - best <= opts.rel_tol * best.abs() + opts.abs_tol {
            converged = true;
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }
        let along = |t: f64, out: &mut Vec<f64>, s: &[f64], c: &[f64]| {
            for ((o, &ci), &wi) in out.iter_mut().zip(c).zip(s) {
                *o = ci + t * (ci - wi);
            }
        };

        along(alpha, &mut trial, &simplex[n], &centroid);
        let fr = eval(&trial, &mut evals);
        if fr < values[0] {
            along(alpha * gamma, &mut trial2, &simplex[n], &centroid);
            let fe = eval(&trial2, &mut evals);
            if fe < fr {
                simplex[n].clone_from(&trial2);
                values[n] = fe;
            } else {
                simplex[n].clone_from(&trial);
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n].clone_from(&trial);
            values[n] = fr;
            continue;
        }
        let (fc, inside) = if fr < values[n] {
            along(alpha * rho, &mut trial2, &simplex[n], &centroid);
            (eval(&trial2, &mut evals), false)
        } else {
            along(-rho, &mut trial2, &simplex[n], &centroid);
            (eval(&trial2, &mut evals), true)
        };
        let accept = if inside { fc < values[n] } else { fc <= fr };
        if accept {
            simplex[n].clone_from(&trial2);
            values[n] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        let (head, tail) = simplex.split_at_mut(1);
        for (v, val) in tail.iter_mut().zip(values[1..].iter_mut()) {
            for (x, &b) in v.iter_mut().zip(&head[0]) {
                *x = b + sigma * (*x - b);
            }
            *val = eval(v, &mut evals);
        }
    }

    let k = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("non-empty simplex");
    NmResult { x: simplex[k].clone(), f: values[k], evals, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimises_quadratic() {
        let mut f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 1.0).powi(2)).sum::<f64>();
        let r = nelder_mead(&mut f, &[0.0; 6], 0.5, &NmOptions { abs_tol: 1e-20, ..Default::default() });
        assert!(r.converged);
        assert!(r.f < 1e-12, "f = {}", r.f);
    }

    #[test]
    fn minimises_rosenbrock() {
        let mut f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = nelder_mead(&mut f, &[-1.2, 1.0], 0.5, &NmOptions { abs_tol: 1e-20, ..Default::default() });
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4);
    }
}
