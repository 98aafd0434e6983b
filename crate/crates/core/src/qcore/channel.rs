use super::{
    c, hermitian_eig_unchecked, hermitian_part, hermiticity_defect, identity, kron, unvec_col,
    vec_col, ComplexMatrix, ComplexVector, DensityMatrix, C64,
};
use crate::error::{Error, Result};

/// Eigenvalues of the Choi matrix below this are treated as zero.
pub const CHOI_RANK_CUTOFF: f64 = 1e-12;
const CP_TOL: f64 = 1e-10;

/// Linear map on d×d matrices stored as a d²×d² matrix acting on
/// column-stacked vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        let dd = dim * dim;
        if matrix.nrows() != dd || matrix.ncols() != dd {
            return Err(Error::DimensionMismatch { expected: dd, found: matrix.nrows() });
        }
        Ok(Superoperator { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Superoperator { dim, matrix: identity(dim * dim) }
    }

    pub fn from_kraus(ops: &[ComplexMatrix]) -> Result<Self> {
        let d = ops.first().map(|k| k.nrows()).ok_or(Error::LengthMismatch { left: 0, right: 1 })?;
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for k in ops {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: k.nrows() });
            }
            m += kron(&k.conjugate(), k);
        }
        Ok(Superoperator { dim: d, matrix: m })
    }

    /// ρ ↦ U ρ U†.
    pub fn unitary(u: &ComplexMatrix) -> Self {
        Superoperator { dim: u.nrows(), matrix: kron(&u.conjugate(), u) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        unvec_col(&(&self.matrix * vec_col(x)), self.dim)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rho.dim() });
        }
        DensityMatrix::from_numerical(&self.apply_matrix(rho.matrix()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(Superoperator { dim: self.dim, matrix: &self.matrix * &other.matrix })
    }

    /// Heisenberg-picture action Λ†(X).
    pub fn apply_adjoint(&self, x: &ComplexMatrix) -> ComplexMatrix {
        unvec_col(&(self.matrix.adjoint() * vec_col(x)), self.dim)
    }

    /// ‖Λ†(I) − I‖ entrywise maximum.
    pub fn trace_preservation_defect(&self) -> f64 {
        let d = identity(self.dim);
        (self.apply_adjoint(&d) - d).iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    pub fn choi(&self) -> ChoiMatrix {
        choi_of(self)
    }
}

/// Choi matrix `Σ E_ij ⊗ Λ(E_ij)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = hermitian_eig_unchecked(&hermitian_part(&self.matrix));
        vals[vals.len() - 1]
    }
}

/// Choi matrix of an arbitrary linear map given as a superoperator matrix.
fn choi_matrix(dim: usize, s: &ComplexMatrix) -> ComplexMatrix {
    let d = dim;
    let mut cm = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            for a in 0..d {
                for b in 0..d {
                    cm[(i * d + a, j * d + b)] = s[(b * d + a, j * d + i)];
                }
            }
        }
    }
    cm
}

pub fn choi_of(map: &Superoperator) -> ChoiMatrix {
    ChoiMatrix { dim: map.dim, matrix: choi_matrix(map.dim, &map.matrix) }
}

/// Kraus operators `K_i` together with their frequency derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dim: usize,
    operators: Vec<ComplexMatrix>,
    derivatives: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>, derivatives: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.len() != derivatives.len() {
            return Err(Error::LengthMismatch { left: operators.len(), right: derivatives.len() });
        }
        let dim = operators.first().map(|k| k.nrows()).ok_or(Error::LengthMismatch { left: 0, right: 1 })?;
        for k in operators.iter().chain(&derivatives) {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.nrows() });
            }
        }
        Ok(KrausSet { dim, operators, derivatives })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn derivatives(&self) -> &[ComplexMatrix] {
        &self.derivatives
    }

    /// Largest entry of `Σ K†K − I`.
    pub fn completeness_defect(&self) -> f64 {
        let mut s = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            s += k.adjoint() * k;
        }
        (s - identity(self.dim)).iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    /// Mix the operators with a unitary: `K'_i = Σ_j u_ij K_j`.
    pub fn rotated(&self, u: &ComplexMatrix) -> Result<KrausSet> {
        let r = self.len();
        if u.nrows() != r || u.ncols() != r {
            return Err(Error::RankMismatch { expected: r, found: u.nrows() });
        }
        let mix = |src: &[ComplexMatrix]| -> Vec<ComplexMatrix> {
            (0..r)
                .map(|i| {
                    let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
                    for (j, k) in src.iter().enumerate() {
                        acc += k * u[(i, j)];
                    }
                    acc
                })
                .collect()
        };
        KrausSet::new(mix(&self.operators), mix(&self.derivatives))
    }

    pub fn to_superoperator(&self) -> Superoperator {
        Superoperator::from_kraus(&self.operators).expect("non-empty Kraus set")
    }
}

fn decomposition_rank(vals: &[f64], fixed_rank: Option<usize>, d: usize) -> Result<usize> {
    let natural = vals.iter().filter(|&&v| v > CHOI_RANK_CUTOFF).count().max(1);
    match fixed_rank {
        None => Ok(natural),
        Some(r) if r == 0 || r > d * d || r < natural => {
            Err(Error::RankMismatch { expected: r, found: natural })
        }
        Some(r) => Ok(r),
    }
}

fn check_cp(vals: &[f64]) -> Result<()> {
    let min = vals[vals.len() - 1];
    if min < -CP_TOL {
        return Err(Error::NotCompletelyPositive(min));
    }
    Ok(())
}

/// Canonical Kraus operators from the spectral decomposition of the Choi
/// matrix. With `fixed_rank` the set is padded with zero operators.
pub fn kraus_from_choi(choi: &ChoiMatrix, fixed_rank: Option<usize>) -> Result<KrausSet> {
    let d = choi.dim;
    let (vals, vecs) = hermitian_eig_unchecked(&hermitian_part(&choi.matrix));
    check_cp(&vals)?;
    let r = decomposition_rank(&vals, fixed_rank, d)?;
    let ops: Vec<_> = (0..r).map(|k| kraus_column(&vals, &vecs, k, d)).collect();
    let ders = vec![ComplexMatrix::zeros(d, d); r];
    KrausSet::new(ops, ders)
}

fn kraus_column(vals: &[f64], vecs: &ComplexMatrix, k: usize, d: usize) -> ComplexMatrix {
    if vals[k] <= CHOI_RANK_CUTOFF {
        return ComplexMatrix::zeros(d, d);
    }
    let v: ComplexVector = vecs.column(k) * c(vals[k].sqrt(), 0.);
    unvec_col(&v, d)
}

/// Kraus operators of `map` and their derivatives induced by the derivative
/// map `dmap` (a superoperator matrix, generally not CP).
///
/// With `C = Σ λ_a |v_a⟩⟨v_a|` and `Ċ_ab = ⟨v_a|Ċ|v_b⟩` the derivative of
/// `k_b = √λ_b v_b` is `Σ_a v_a Ċ_ab √λ_b / (λ_a + λ_b)`. The remaining
/// unitary freedom is absorbed by the h-optimisation in the bounds.
pub fn kraus_pair(map: &Superoperator, dmap: &ComplexMatrix, fixed_rank: Option<usize>) -> Result<KrausSet> {
    let d = map.dim;
    if dmap.nrows() != d * d || dmap.ncols() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: dmap.nrows() });
    }
    let (vals, vecs) = hermitian_eig_unchecked(&hermitian_part(&choi_matrix(d, &map.matrix)));
    check_cp(&vals)?;
    let r = decomposition_rank(&vals, fixed_rank, d)?;
    let dchoi = choi_matrix(d, dmap);
    let dproj = vecs.adjoint() * hermitian_part(&dchoi) * &vecs;
    let ops: Vec<_> = (0..r).map(|k| kraus_column(&vals, &vecs, k, d)).collect();
    let ders = (0..r)
        .map(|b| {
            let mut col = ComplexVector::zeros(d * d);
            if vals[b] > CHOI_RANK_CUTOFF {
                let sb = vals[b].sqrt();
                for a in 0..d * d {
                    let denom = vals[a].max(0.0) + vals[b];
                    col += vecs.column(a) * (dproj[(a, b)] * (sb / denom));
                }
            }
            unvec_col(&col, d)
        })
        .collect();
    KrausSet::new(ops, ders)
}

pub fn apply_channel(map: &Superoperator, rho: &DensityMatrix) -> Result<DensityMatrix> {
    map.apply(rho)
}

/// Apply `maps[0] ⊗ … ⊗ maps[n-1]` to an n-site matrix (site 0 is the most
/// significant tensor factor). The maps need not be CP.
pub fn tensor_apply_matrix(maps: &[&ComplexMatrix], d: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = maps.len();
    let total = d.pow(n as u32);
    if x.nrows() != total || x.ncols() != total {
        return Err(Error::DimensionMismatch { expected: total, found: x.nrows() });
    }
    let mut cur = x.clone();
    for (site, s) in maps.iter().enumerate() {
        if s.nrows() != d * d || s.ncols() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: s.nrows() });
        }
        let stride = d.pow((n - 1 - site) as u32);
        let digit = |idx: usize| (idx / stride) % d;
        let mut next = ComplexMatrix::zeros(total, total);
        for r in 0..total {
            let a = digit(r);
            let r0 = r - a * stride;
            for col in 0..total {
                let b = digit(col);
                let c0 = col - b * stride;
                let mut acc = C64::new(0., 0.);
                for ci in 0..d {
                    for ei in 0..d {
                        acc += s[(b * d + a, ei * d + ci)] * cur[(r0 + ci * stride, c0 + ei * stride)];
                    }
                }
                next[(r, col)] = acc;
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// `Λ₁ ⊗ … ⊗ Λₙ (ρ)` for up to four sites.
pub fn tensor_apply(maps: &[&Superoperator], rho: &DensityMatrix) -> Result<DensityMatrix> {
    if maps.is_empty() || maps.len() > 4 {
        return Err(Error::InvalidArgument(format!("tensor_apply supports 1..=4 sites, got {}", maps.len())));
    }
    let d = maps[0].dim;
    let mats: Vec<&ComplexMatrix> = maps.iter().map(|m| &m.matrix).collect();
    let out = tensor_apply_matrix(&mats, d, rho.matrix())?;
    if hermiticity_defect(&out) > 1e-9 {
        return Err(Error::NonHermitianInput(hermiticity_defect(&out)));
    }
    DensityMatrix::from_numerical(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{sigma_x, sigma_z, unitary_evolution};

    fn dephasing(p: f64) -> Vec<ComplexMatrix> {
        vec![identity(2) * c((1. - p).sqrt(), 0.), sigma_z() * c(p.sqrt(), 0.)]
    }

    #[test]
    fn choi_kraus_round_trip() {
        let s = Superoperator::from_kraus(&dephasing(0.2)).unwrap();
        let k = kraus_from_choi(&s.choi(), None).unwrap();
        assert_eq!(k.len(), 2);
        assert!(k.completeness_defect() < 1e-14);
        assert!((k.to_superoperator().matrix() - s.matrix()).norm() < 1e-14);
    }

    #[test]
    fn fixed_rank_pads_with_zeros() {
        let s = Superoperator::from_kraus(&dephasing(0.2)).unwrap();
        let k = kraus_from_choi(&s.choi(), Some(4)).unwrap();
        assert_eq!(k.len(), 4);
        assert_eq!(k.operators()[3].norm(), 0.0);
        assert!(kraus_from_choi(&s.choi(), Some(1)).is_err());
    }

    #[test]
    fn transpose_is_not_cp() {
        let mut t = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                t[(i * 2 + j, j * 2 + i)] = c(1., 0.);
            }
        }
        let s = Superoperator::new(2, t).unwrap();
        assert!(matches!(kraus_from_choi(&s.choi(), None), Err(Error::NotCompletelyPositive(_))));
    }

    #[test]
    fn kraus_pair_matches_finite_difference() {
        // Amplitude damping followed by a z-rotation by angle w.
        let build = |w: f64| {
            let g: f64 = 0.3;
            let k0 = ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c((1. - g).sqrt(), 0.)]);
            let k1 = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(g.sqrt(), 0.), c(0., 0.), c(0., 0.)]);
            let u = unitary_evolution(&(sigma_z() * c(0.5, 0.) + sigma_x() * c(0.2, 0.)), w);
            Superoperator::from_kraus(&[&u * k0, &u * k1]).unwrap()
        };
        let w = 0.7;
        let eps = 1e-6;
        let dmap = (build(w + eps).matrix() - build(w - eps).matrix()) / c(2. * eps, 0.);
        let ks = kraus_pair(&build(w), &dmap, Some(4)).unwrap();
        // Σ K̇ ⊗ K̄ + K ⊗ K̇̄ reproduces the map derivative.
        let mut recon = ComplexMatrix::zeros(4, 4);
        for (k, dk) in ks.operators().iter().zip(ks.derivatives()) {
            recon += kron(&dk.conjugate(), k) + kron(&k.conjugate(), dk);
        }
        assert!((recon - dmap).norm() < 1e-8);
    }

    #[test]
    fn tensor_apply_matches_kron() {
        let s1 = Superoperator::from_kraus(&dephasing(0.1)).unwrap();
        let s2 = Superoperator::unitary(&unitary_evolution(&sigma_x(), 0.3));
        let rho = DensityMatrix::ghz(2);
        let out = tensor_apply(&[&s1, &s2], &rho).unwrap();
        let ks1 = dephasing(0.1);
        let u = unitary_evolution(&sigma_x(), 0.3);
        let mut expect = ComplexMatrix::zeros(4, 4);
        for k in &ks1 {
            let big = kron(k, &u);
            expect += &big * rho.matrix() * big.adjoint();
        }
        assert!((out.matrix() - expect).norm() < 1e-14);
    }
}
