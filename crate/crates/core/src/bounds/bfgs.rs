//! BFGS with Armijo backtracking, used on the smoothed bound objective.

pub(crate) struct BfgsOutcome {
    pub x: Vec<f64>,
    pub evals: usize,
    pub converged: bool,
}

pub(crate) fn bfgs<F>(mut f: F, x0: Vec<f64>, step0: f64, max_iter: usize, rel_tol: f64) -> BfgsOutcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);
    let mut evals = 1;
    let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if gnorm == 0.0 || !fx.is_finite() {
        return BfgsOutcome { x, evals, converged: gnorm == 0.0 };
    }
    // Inverse Hessian, row-major.
    let mut h = vec![0.0; n * n];
    let h0 = step0 / gnorm;
    for i in 0..n {
        h[i * n + i] = h0;
    }
    let mut xn = vec![0.0; n];
    let mut gn = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut quiet = 0;
    for _ in 0..max_iter {
        for i in 0..n {
            d[i] = -(0..n).map(|j| h[i * n + j] * g[j]).sum::<f64>();
        }
        let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            h.iter_mut().for_each(|v| *v = 0.0);
            for i in 0..n {
                h[i * n + i] = h0;
                d[i] = -h0 * g[i];
            }
            slope = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        }
        let mut a = 1.0;
        let mut fnew = f64::INFINITY;
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                xn[i] = x[i] + a * d[i];
            }
            fnew = f(&xn, &mut gn);
            evals += 1;
            if fnew <= fx + 1e-4 * a * slope {
                accepted = true;
                break;
            }
            a *= 0.5;
        }
        if !accepted {
            return BfgsOutcome { x, evals, converged: true };
        }
        let s: Vec<f64> = d.iter().map(|v| a * v).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(p, q)| p - q).collect();
        let sy: f64 = s.iter().zip(&y).map(|(p, q)| p * q).sum();
        if sy > 0.0 {
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(p, q)| p * q).sum();
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        let improvement = fx - fnew;
        std::mem::swap(&mut x, &mut xn);
        std::mem::swap(&mut g, &mut gn);
        fx = fnew;
        if improvement <= rel_tol * fx.abs() {
            quiet += 1;
            if quiet >= 3 {
                return BfgsOutcome { x, evals, converged: true };
            }
        } else {
            quiet = 0;
        }
    }
    BfgsOutcome { x, evals, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64], g: &mut [f64]| {
            let mut v = 0.0;
            for (i, (xi, gi)) in x.iter().zip(g.iter_mut()).enumerate() {
                let w = 1.0 + i as f64 * 10.0;
                v += w * (xi - 1.0).powi(2);
                *gi = 2.0 * w * (xi - 1.0);
            }
            v
        };
        let r = bfgs(f, vec![0.0; 5], 1.0, 200, 1e-15);
        assert!(r.converged);
        assert!(r.x.iter().all(|v| (v - 1.0).abs() < 1e-6));
    }
}
