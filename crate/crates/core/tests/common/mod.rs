//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use qlimits::dynamics::{propagate, ChannelWithDerivative, NoiseModel};
use qlimits::fisher::qfi;
use qlimits::qcore::{
    c, kron, tensor_apply_matrix, trace, unitary_evolution, ComplexMatrix, ComplexVector, DensityMatrix, Superoperator,
    C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let normal = rand_distr::StandardNormal;
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(r.sample(normal), r.sample(normal)))
}

pub fn random_hermitian(r: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let g = gaussian_matrix(r, d, d);
    (&g + g.adjoint()) * c(0.5, 0.)
}

pub fn random_unitary(r: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    unitary_evolution(&random_hermitian(r, d), 1.0)
}

pub fn random_density(r: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let g = gaussian_matrix(r, d, d);
    let m = &g * g.adjoint();
    let tr = trace(&m).re;
    DensityMatrix::from_numerical(&(m / c(tr, 0.))).unwrap()
}

pub fn random_pure(r: &mut ChaCha8Rng, d: usize) -> ComplexVector {
    let v = gaussian_matrix(r, d, 1).column(0).into_owned();
    let n = v.norm();
    v / c(n, 0.)
}

/// Kraus operators read off the first d columns of a random unitary.
pub fn random_kraus(r: &mut ChaCha8Rng, d: usize, rank: usize) -> Vec<ComplexMatrix> {
    let u = random_unitary(r, d * rank);
    (0..rank).map(|k| u.view((k * d, 0), (d, d)).into_owned()).collect()
}

pub fn random_channel(r: &mut ChaCha8Rng, d: usize, rank: usize) -> Superoperator {
    Superoperator::from_kraus(&random_kraus(r, d, rank)).unwrap()
}

/// A random qubit channel with the derivative of the family `K_i + s D_i`
/// at s = 0.
pub fn random_channel_with_derivative(r: &mut ChaCha8Rng, rank: usize) -> ChannelWithDerivative {
    let ks = random_kraus(r, 2, rank);
    let mut ds: Vec<ComplexMatrix> = (0..rank).map(|_| gaussian_matrix(r, 2, 2) * c(0.3, 0.)).collect();
    // Project so that Σ (D†K + K†D) = 0 and the family stays trace preserving.
    let a = ks.iter().zip(&ds).fold(ComplexMatrix::zeros(2, 2), |acc, (k, d)| acc + k.adjoint() * d + d.adjoint() * k);
    for (k, d) in ks.iter().zip(ds.iter_mut()) {
        *d -= k * &a * c(0.5, 0.);
    }
    let mut dmap = ComplexMatrix::zeros(4, 4);
    for (k, d) in ks.iter().zip(&ds) {
        dmap += kron(&d.conjugate(), k) + kron(&k.conjugate(), d);
    }
    ChannelWithDerivative { map: Superoperator::from_kraus(&ks).unwrap(), dmap, omega0: 0.0, t: 1.0 }
}

/// GHZ parity and its derivative by acting on the full 2^N space.
pub fn parity_brute_force(ch: &ChannelWithDerivative, n: usize) -> (f64, f64) {
    let ghz = DensityMatrix::ghz(n);
    let mut px = ComplexMatrix::identity(1, 1);
    for _ in 0..n {
        px = kron(&px, &qlimits::qcore::sigma_x());
    }
    let m = ch.map.matrix();
    let out = tensor_apply_matrix(&vec![m; n], 2, ghz.matrix()).unwrap();
    let mut dout = ComplexMatrix::zeros(1 << n, 1 << n);
    for k in 0..n {
        let maps: Vec<&ComplexMatrix> = (0..n).map(|j| if j == k { &ch.dmap } else { m }).collect();
        dout += tensor_apply_matrix(&maps, 2, ghz.matrix()).unwrap();
    }
    (trace(&(&px * out)).re, trace(&(&px * dout)).re)
}

/// Largest |eigenvalue| of a Hermitian matrix by power iteration on m².
pub fn power_iteration_norm(m: &ComplexMatrix, iters: usize) -> f64 {
    let m2 = m * m;
    let mut v = ComplexVector::from_fn(m.nrows(), |i, _| C64::new(1.0 + i as f64 * 0.37, 0.1 * i as f64));
    let mut lambda = 0.0;
    for _ in 0..iters {
        let w = &m2 * &v;
        lambda = w.norm() / v.norm();
        v = &w / c(w.norm(), 0.);
    }
    lambda.sqrt()
}

/// Central finite difference of the propagated map in ω0.
pub fn dmap_finite_difference(model: &NoiseModel, omega0: f64, t: f64) -> ComplexMatrix {
    let eps = 1e-5 * omega0.abs().max(1.0);
    let plus = propagate(model, omega0 + eps, t).unwrap();
    let minus = propagate(model, omega0 - eps, t).unwrap();
    (plus.map.matrix() - minus.map.matrix()) / c(2.0 * eps, 0.)
}

/// Near-uniform points on the Bloch sphere (Fibonacci lattice).
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Max over pure inputs on a Bloch grid of the output QFI.
pub fn bloch_grid_qfi_max(ch: &ChannelWithDerivative, points: usize) -> f64 {
    fibonacci_sphere(points)
        .into_iter()
        .map(|[x, y, z]| {
            let rho = DensityMatrix::from_bloch(x, y, z).unwrap();
            let out = ch.map.apply(&rho).unwrap();
            qfi(&out, &ch.apply_derivative(&rho)).map(|q| q.value).unwrap_or(0.0)
        })
        .fold(0.0, f64::max)
}

/// Minimum of `f` on a geometric grid over [lo, hi], refined by repeated
/// local grid zooming.
pub fn grid_refine_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut best = (lo, f(lo));
    for _ in 0..40 {
        let pts = 41;
        let h = (b - a) / (pts - 1) as f64;
        for k in 0..pts {
            let x = (a + k as f64 * h).exp();
            let v = f(x);
            if v < best.1 {
                best = (x, v);
            }
        }
        a = best.0.ln() - 2.0 * h;
        b = best.0.ln() + 2.0 * h;
    }
    best
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
