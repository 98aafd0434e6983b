use crate::error::{Error, Result};
use crate::qcore::{c, hermitian_part, ComplexMatrix, KrausSet, C64, I};
use nalgebra::Matrix2;

type M2 = Matrix2<C64>;

/// R×R Hermitian matrix stored as R² reals: the diagonal first, then
/// (re, im) of each upper-triangular entry in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianParam {
    rank: usize,
    params: Vec<f64>,
}

impl HermitianParam {
    pub fn zeros(rank: usize) -> Self {
        HermitianParam { rank, params: vec![0.0; rank * rank] }
    }

    pub fn from_params(rank: usize, params: Vec<f64>) -> Result<Self> {
        if params.len() != rank * rank {
            return Err(Error::LengthMismatch { left: params.len(), right: rank * rank });
        }
        Ok(HermitianParam { rank, params })
    }

    pub fn from_matrix(h: &ComplexMatrix) -> Result<Self> {
        let r = h.nrows();
        let defect = crate::qcore::hermiticity_defect(h);
        if defect > crate::qcore::HERMITIAN_TOL {
            return Err(Error::NonHermitianInput(defect));
        }
        let mut params: Vec<f64> = (0..r).map(|i| h[(i, i)].re).collect();
        for i in 0..r {
            for j in i + 1..r {
                params.push(h[(i, j)].re);
                params.push(h[(i, j)].im);
            }
        }
        Ok(HermitianParam { rank: r, params })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        param_matrix(self.rank, &self.params)
    }
}

fn param_matrix(r: usize, p: &[f64]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(r, r);
    for i in 0..r {
        h[(i, i)] = c(p[i], 0.);
    }
    let mut k = r;
    for i in 0..r {
        for j in i + 1..r {
            h[(i, j)] = c(p[k], p[k + 1]);
            h[(j, i)] = c(p[k], -p[k + 1]);
            k += 2;
        }
    }
    h
}

/// Hermitian basis element for parameter index `p`.
fn basis_matrix(r: usize, p: usize) -> ComplexMatrix {
    let mut v = vec![0.0; r * r];
    v[p] = 1.0;
    param_matrix(r, &v)
}

fn check_rank(k: &KrausSet, h: &HermitianParam) -> Result<()> {
    if h.rank != k.len() {
        return Err(Error::RankMismatch { expected: k.len(), found: h.rank });
    }
    Ok(())
}

/// `K̃̇_i = K̇_i − i Σ_j h_ij K_j`.
pub fn tilde_kraus(k: &KrausSet, h: &HermitianParam) -> Result<Vec<ComplexMatrix>> {
    check_rank(k, h)?;
    let hm = h.to_matrix();
    Ok((0..k.len())
        .map(|i| {
            let mut acc = k.derivatives()[i].clone();
            for (j, kj) in k.operators().iter().enumerate() {
                acc -= kj * (I * hm[(i, j)]);
            }
            acc
        })
        .collect())
}

/// `α = Σ K̃̇†K̃̇` and `β = i Σ K̃̇†K`.
pub fn alpha_beta(k: &KrausSet, h: &HermitianParam) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let kt = tilde_kraus(k, h)?;
    let d = k.dim();
    let mut alpha = ComplexMatrix::zeros(d, d);
    let mut beta = ComplexMatrix::zeros(d, d);
    for (dk, kk) in kt.iter().zip(k.operators()) {
        alpha += dk.adjoint() * dk;
        beta += dk.adjoint() * kk * I;
    }
    Ok((hermitian_part(&alpha), hermitian_part(&beta)))
}

fn to_m2(m: &ComplexMatrix) -> M2 {
    M2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// (trace/2, radius) of a 2×2 Hermitian matrix: eigenvalues are mid ± radius.
fn spectrum2(m: &M2) -> (f64, f64) {
    let mid = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let half = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    (mid, (half * half + off.norm_sqr()).sqrt())
}

/// The objective `‖α(h)‖ + (N−1)‖β(h)‖²` on qubit Kraus sets, with α and β
/// assembled from precomputed directions since both are affine in h.
pub(crate) struct Objective {
    weight: f64,
    kdot: Vec<M2>,
    /// `dirs[p][i]`: change of K̃̇_i per unit of parameter p.
    dirs: Vec<Vec<M2>>,
    beta0: M2,
    beta_dirs: Vec<M2>,
    scale: f64,
}

impl Objective {
    pub(crate) fn new(k: &KrausSet, n: u64) -> Result<Self> {
        if k.dim() != 2 {
            return Err(Error::NotSingleQubit(k.dim()));
        }
        let r = k.len();
        let ops: Vec<M2> = k.operators().iter().map(to_m2).collect();
        let kdot: Vec<M2> = k.derivatives().iter().map(to_m2).collect();
        let mut beta0 = M2::zeros();
        for (dk, kk) in kdot.iter().zip(&ops) {
            beta0 += dk.adjoint() * kk * I;
        }
        let mut dirs = Vec::with_capacity(r * r);
        let mut beta_dirs = Vec::with_capacity(r * r);
        for p in 0..r * r {
            let e = basis_matrix(r, p);
            let d: Vec<M2> = (0..r)
                .map(|i| {
                    let mut acc = M2::zeros();
                    for (j, kj) in ops.iter().enumerate() {
                        acc -= kj * (I * e[(i, j)]);
                    }
                    acc
                })
                .collect();
            let mut b = M2::zeros();
            for i in 0..r {
                for j in 0..r {
                    b -= ops[j].adjoint() * ops[i] * e[(j, i)];
                }
            }
            dirs.push(d);
            beta_dirs.push(b);
        }
        let scale = kdot.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
        Ok(Objective { weight: (n - 1) as f64, kdot, dirs, beta0, beta_dirs, scale })
    }

    pub(crate) fn num_params(&self) -> usize {
        self.dirs.len()
    }

    /// Frobenius norm of the derivatives, the natural size of h.
    pub(crate) fn scale(&self) -> f64 {
        self.scale
    }

    fn beta(&self, x: &[f64]) -> M2 {
        let mut b = self.beta0;
        for (bd, &xp) in self.beta_dirs.iter().zip(x) {
            if xp != 0.0 {
                b += bd * c(xp, 0.);
            }
        }
        b
    }

    pub(crate) fn beta_norm(&self, x: &[f64]) -> f64 {
        let (mid, rad) = spectrum2(&self.beta(x));
        mid.abs() + rad
    }

    fn tilde(&self, x: &[f64]) -> Vec<M2> {
        let mut kt = self.kdot.clone();
        for (dir, &xp) in self.dirs.iter().zip(x) {
            if xp != 0.0 {
                for (t, d) in kt.iter_mut().zip(dir) {
                    *t += d * c(xp, 0.);
                }
            }
        }
        kt
    }

    /// Smoothed objective and its gradient: `λmax(α)` becomes
    /// `mid + √(r² + τ_α²)` and `‖β‖` becomes `√(mid² + τ_β²) + √(r² + τ_β²)`.
    /// Both are convex upper approximations within `τ_α` and `O(τ_β)`.
    pub(crate) fn eval_smooth(&self, x: &[f64], tau_a: f64, tau_b: f64, grad: &mut [f64]) -> f64 {
        let kt = self.tilde(x);
        let mut alpha = M2::zeros();
        for t in &kt {
            alpha += t.adjoint() * t;
        }
        let (a, d, b) = (alpha[(0, 0)].re, alpha[(1, 1)].re, alpha[(0, 1)]);
        let h = 0.5 * (a - d);
        let ra = (h * h + b.norm_sqr() + tau_a * tau_a).sqrt();
        let mut f = 0.5 * (a + d) + ra;

        let smooth_beta = self.weight > 0.0;
        let (mut mb, mut hb, mut bb, mut sm, mut rb, mut nb) = (0.0, 0.0, c(0., 0.), 1.0, 1.0, 0.0);
        if smooth_beta {
            let beta = self.beta(x);
            mb = 0.5 * (beta[(0, 0)].re + beta[(1, 1)].re);
            hb = 0.5 * (beta[(0, 0)].re - beta[(1, 1)].re);
            bb = beta[(0, 1)];
            sm = (mb * mb + tau_b * tau_b).sqrt();
            rb = (hb * hb + bb.norm_sqr() + tau_b * tau_b).sqrt();
            nb = sm + rb;
            f += self.weight * nb * nb;
        }

        for (p, g) in grad.iter_mut().enumerate() {
            let mut xm = M2::zeros();
            for (t, dirp) in kt.iter().zip(&self.dirs[p]) {
                xm += t.adjoint() * dirp;
            }
            let da = 2.0 * xm[(0, 0)].re;
            let dd = 2.0 * xm[(1, 1)].re;
            let db = xm[(0, 1)] + xm[(1, 0)].conj();
            let mut gp = 0.5 * (da + dd) + (h * 0.5 * (da - dd) + (b.conj() * db).re) / ra;
            if smooth_beta {
                let bp = &self.beta_dirs[p];
                let dmb = 0.5 * (bp[(0, 0)].re + bp[(1, 1)].re);
                let dhb = 0.5 * (bp[(0, 0)].re - bp[(1, 1)].re);
                let dbb = bp[(0, 1)];
                let dnb = mb * dmb / sm + (hb * dhb + (bb.conj() * dbb).re) / rb;
                gp += 2.0 * self.weight * nb * dnb;
            }
            *g = gp;
        }
        f
    }

    pub(crate) fn weight(&self) -> f64 {
        self.weight
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        let kt = self.tilde(x);
        let mut alpha = M2::zeros();
        for t in &kt {
            alpha += t.adjoint() * t;
        }
        let (mid, rad) = spectrum2(&alpha);
        let mut f = mid + rad;
        if self.weight > 0.0 {
            let nb = self.beta_norm(x);
            f += self.weight * nb * nb;
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{operator_norm, sigma_z, unitary_evolution};

    fn noiseless(t: f64) -> KrausSet {
        let u = unitary_evolution(&(sigma_z() * c(0.5, 0.)), t);
        let du = sigma_z() * &u * c(0., -t / 2.);
        KrausSet::new(vec![u], vec![du]).unwrap()
    }

    #[test]
    fn smooth_gradient_matches_finite_difference() {
        let m = crate::dynamics::NoiseModel { theta: 0.3, secular: false, omega_c: 3.0, ..Default::default() };
        let k = crate::dynamics::propagate(&m, 1.0, 0.8).unwrap().kraus(Some(4)).unwrap();
        let obj = Objective::new(&k, 7).unwrap();
        let x: Vec<f64> = (0..16).map(|i| ((i * 7 % 11) as f64 - 5.0) * 0.01).collect();
        let mut g = vec![0.0; 16];
        let f0 = obj.eval_smooth(&x, 1e-3, 1e-3, &mut g);
        assert!(f0 >= obj.eval(&x));
        let mut scratch = vec![0.0; 16];
        for p in 0..16 {
            let eps = 1e-6;
            let mut xp = x.clone();
            xp[p] += eps;
            let fp = obj.eval_smooth(&xp, 1e-3, 1e-3, &mut scratch);
            xp[p] -= 2.0 * eps;
            let fm = obj.eval_smooth(&xp, 1e-3, 1e-3, &mut scratch);
            assert!(((fp - fm) / (2.0 * eps) - g[p]).abs() < 1e-6 * (1.0 + g[p].abs()), "p = {p}");
        }
    }

    #[test]
    fn param_round_trip() {
        let h = HermitianParam::from_params(3, (0..9).map(|v| v as f64 * 0.3 - 1.0).collect()).unwrap();
        let back = HermitianParam::from_matrix(&h.to_matrix()).unwrap();
        assert_eq!(h, back);
    }

    #[test]
    fn noiseless_alpha_beta() {
        let t = 0.7;
        let k = noiseless(t);
        let (a, b) = alpha_beta(&k, &HermitianParam::zeros(1)).unwrap();
        assert!((a - ComplexMatrix::identity(2, 2) * c(t * t / 4., 0.)).norm() < 1e-15);
        // i K̇†K = i·i(t/2)σz.
        assert!((b + sigma_z() * c(t / 2., 0.)).norm() < 1e-15);
    }

    #[test]
    fn fast_objective_matches_generic() {
        let t = 0.7;
        let k = noiseless(t);
        let obj = Objective::new(&k, 5).unwrap();
        let x = [0.13];
        let h = HermitianParam::from_params(1, x.to_vec()).unwrap();
        let (a, b) = alpha_beta(&k, &h).unwrap();
        let nb = operator_norm(&b);
        let expect = operator_norm(&a) + 4.0 * nb * nb;
        assert!((obj.eval(&x) - expect).abs() < 1e-14);
    }
}
