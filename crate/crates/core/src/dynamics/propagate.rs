use super::model::NoiseModel;
use crate::error::{Error, Result};
use crate::qcore::{
    c, identity, kraus_pair, kron, sigma_minus, sigma_plus, sigma_x, sigma_z, unitary_evolution,
    ComplexMatrix, DensityMatrix, KrausSet, Superoperator, C64,
};
use nalgebra::{Matrix4, Vector4};

type M4 = Matrix4<C64>;
type V4 = Vector4<C64>;

/// Integration steps per unit of the fastest model frequency times t.
pub const STEPS_PER_UNIT: f64 = 2000.0;
const MIN_STEPS: usize = 8;
const CPTP_FAIL_TOL: f64 = 1e-6;

fn to_m4(m: &ComplexMatrix) -> M4 {
    M4::from_iterator(m.iter().copied())
}

fn to_dmatrix(m: &M4) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(4, 4, m.as_slice())
}

/// `−i[H, ·]` as a column-stacked superoperator.
fn commutator_superop(h: &ComplexMatrix) -> ComplexMatrix {
    let id = identity(h.nrows());
    (kron(&id, h) - kron(&h.transpose(), &id)) * c(0., -1.)
}

/// `V ρ V† − ½{V†V, ρ}` as a column-stacked superoperator.
fn lindblad_superop(v: &ComplexMatrix) -> ComplexMatrix {
    let id = identity(v.nrows());
    let vdv = v.adjoint() * v;
    kron(&v.conjugate(), v) - (kron(&id, &vdv) + kron(&vdv.transpose(), &id)) * c(0.5, 0.)
}

/// Time-independent pieces of the generator `G(t) = ω0·H + (γ(t)/2)·D`.
#[derive(Debug, Clone, Copy)]
struct GeneratorParts {
    hamiltonian: M4,
    dissipator: M4,
}

impl GeneratorParts {
    fn new(model: &NoiseModel) -> Self {
        let hamiltonian = to_m4(&commutator_superop(&(sigma_z() * c(0.5, 0.))));
        let (ct, st) = (model.theta.cos(), model.theta.sin());
        let dissipator = if model.secular {
            lindblad_superop(&sigma_plus()) * c(ct * ct, 0.)
                + lindblad_superop(&sigma_minus()) * c(ct * ct, 0.)
                + lindblad_superop(&sigma_z()) * c(st * st, 0.)
        } else {
            let sbar = sigma_x() * c(ct, 0.) + sigma_z() * c(st, 0.);
            lindblad_superop(&sbar)
        };
        let dissipator = if model.lambda == 0.0 { M4::zeros() } else { to_m4(&dissipator) };
        GeneratorParts { hamiltonian, dissipator }
    }

    fn at(&self, omega0: f64, half_rate: f64) -> M4 {
        self.hamiltonian * c(omega0, 0.) + self.dissipator * c(half_rate, 0.)
    }
}

fn half_rate(model: &NoiseModel, t: f64) -> Result<f64> {
    if model.lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(0.5 * model.rate(t)?)
}

/// Time-local generator at time t as a superoperator.
pub fn generator(model: &NoiseModel, omega0: f64, t: f64) -> Result<Superoperator> {
    model.validate()?;
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let g = GeneratorParts::new(model).at(omega0, half_rate(model, t)?);
    Superoperator::new(2, to_dmatrix(&g))
}

/// ∂G/∂ω0 = −(i/2)[σz, ·].
pub fn generator_derivative() -> ComplexMatrix {
    commutator_superop(&(sigma_z() * c(0.5, 0.)))
}

/// Default RK4 step count for an interval of length `dt`.
pub fn default_steps(model: &NoiseModel, omega0: f64, dt: f64) -> usize {
    let scale = if model.lambda == 0.0 { 0.0 } else { model.frequency_scale() };
    let scale = scale.max(omega0.abs()).max(1.0);
    ((STEPS_PER_UNIT * scale * dt).ceil() as usize).max(MIN_STEPS)
}

/// Λ_{ω0,t} together with ∂Λ/∂ω0.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelWithDerivative {
    pub map: Superoperator,
    pub dmap: ComplexMatrix,
    pub omega0: f64,
    pub t: f64,
}

impl ChannelWithDerivative {
    /// Kraus operators and derivatives, padded to `fixed_rank` if given.
    pub fn kraus(&self, fixed_rank: Option<usize>) -> Result<KrausSet> {
        kraus_pair(&self.map, &self.dmap, fixed_rank)
    }

    /// ∂ρ/∂ω0 for the output state of input `rho`.
    pub fn apply_derivative(&self, rho: &DensityMatrix) -> ComplexMatrix {
        crate::qcore::unvec_col(&(&self.dmap * crate::qcore::vec_col(rho.matrix())), 2)
    }

    /// ‖(∂Λ)†(I)‖, zero for an exactly trace-annihilating derivative.
    pub fn dmap_trace_defect(&self) -> f64 {
        let v = self.dmap.adjoint() * crate::qcore::vec_col(&identity(2));
        v.norm()
    }
}

/// Joint RK4 state: the map and its ω0-derivative.
#[derive(Debug, Clone, Copy)]
struct Pair {
    map: M4,
    dmap: M4,
}

struct Stepper<'a> {
    model: &'a NoiseModel,
    omega0: f64,
    parts: GeneratorParts,
}

impl<'a> Stepper<'a> {
    fn new(model: &'a NoiseModel, omega0: f64) -> Self {
        Stepper { model, omega0, parts: GeneratorParts::new(model) }
    }

    fn gen(&self, t: f64) -> Result<M4> {
        Ok(self.parts.at(self.omega0, half_rate(self.model, t)?))
    }

    fn advance(&self, mut p: Pair, t0: f64, t1: f64, steps: usize) -> Result<Pair> {
        let h = (t1 - t0) / steps as f64;
        let hc = c(h, 0.);
        let half = c(0.5 * h, 0.);
        let dg = self.parts.hamiltonian;
        let f = |g: &M4, x: &M4, y: &M4| (g * x, g * y + dg * x);
        for k in 0..steps {
            let s = t0 + k as f64 * h;
            let g0 = self.gen(s)?;
            let gm = self.gen(s + 0.5 * h)?;
            let g1 = self.gen(if k + 1 == steps { t1 } else { s + h })?;
            let (k1x, k1y) = f(&g0, &p.map, &p.dmap);
            let (k2x, k2y) = f(&gm, &(p.map + k1x * half), &(p.dmap + k1y * half));
            let (k3x, k3y) = f(&gm, &(p.map + k2x * half), &(p.dmap + k2y * half));
            let (k4x, k4y) = f(&g1, &(p.map + k3x * hc), &(p.dmap + k3y * hc));
            let w = c(h / 6.0, 0.);
            p.map += (k1x + (k2x + k3x) * c(2., 0.) + k4x) * w;
            p.dmap += (k1y + (k2y + k3y) * c(2., 0.) + k4y) * w;
        }
        if p.map.iter().chain(p.dmap.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::IntegrationDiverged(t1));
        }
        Ok(p)
    }

    fn advance_state(&self, mut v: V4, t0: f64, t1: f64, steps: usize) -> Result<V4> {
        let h = (t1 - t0) / steps as f64;
        let half = c(0.5 * h, 0.);
        for k in 0..steps {
            let s = t0 + k as f64 * h;
            let g0 = self.gen(s)?;
            let gm = self.gen(s + 0.5 * h)?;
            let g1 = self.gen(if k + 1 == steps { t1 } else { s + h })?;
            let k1 = g0 * v;
            let k2 = gm * (v + k1 * half);
            let k3 = gm * (v + k2 * half);
            let k4 = g1 * (v + k3 * c(h, 0.));
            v += (k1 + (k2 + k3) * c(2., 0.) + k4) * c(h / 6.0, 0.);
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::IntegrationDiverged(t1));
        }
        Ok(v)
    }

    fn finish(&self, p: Pair, t: f64) -> Result<ChannelWithDerivative> {
        let map = Superoperator::new(2, to_dmatrix(&p.map))?;
        let min = map.choi().min_eigenvalue();
        if min < -CPTP_FAIL_TOL {
            return Err(Error::NotCptp(min));
        }
        Ok(ChannelWithDerivative { map, dmap: to_dmatrix(&p.dmap), omega0: self.omega0, t })
    }
}

fn identity_pair() -> Pair {
    Pair { map: M4::identity(), dmap: M4::zeros() }
}

/// Integrate the map and its frequency derivative from 0 to t with a fixed
/// number of RK4 steps.
pub fn propagate_channel(model: &NoiseModel, omega0: f64, t: f64, steps: usize) -> Result<ChannelWithDerivative> {
    model.validate()?;
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    let st = Stepper::new(model, omega0);
    let p = if t == 0.0 { identity_pair() } else { st.advance(identity_pair(), 0.0, t, steps)? };
    st.finish(p, t)
}

/// [`propagate_channel`] with the default step density.
pub fn propagate(model: &NoiseModel, omega0: f64, t: f64) -> Result<ChannelWithDerivative> {
    propagate_channel(model, omega0, t, default_steps(model, omega0, t))
}

/// Propagate at the default density, doubling the step count until the map
/// changes by less than `tol` (entrywise).
pub fn propagate_converged(model: &NoiseModel, omega0: f64, t: f64, tol: f64) -> Result<ChannelWithDerivative> {
    let mut steps = default_steps(model, omega0, t);
    let mut prev = propagate_channel(model, omega0, t, steps)?;
    for _ in 0..6 {
        steps *= 2;
        let next = propagate_channel(model, omega0, t, steps)?;
        let diff = (next.map.matrix() - prev.map.matrix()).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        prev = next;
        if diff < tol {
            return Ok(prev);
        }
    }
    Err(Error::IntegrationDiverged(t))
}

/// States `Λ_t(ρ0)` on an increasing time grid starting at 0.
pub fn evolve_state(model: &NoiseModel, omega0: f64, rho0: &DensityMatrix, t_grid: &[f64]) -> Result<Vec<DensityMatrix>> {
    model.validate()?;
    if rho0.dim() != 2 {
        return Err(Error::NotSingleQubit(rho0.dim()));
    }
    match t_grid.first() {
        Some(&t0) if t0 == 0.0 => {}
        Some(&t0) => return Err(Error::InvalidArgument(format!("time grid must start at 0, got {t0}"))),
        None => return Ok(Vec::new()),
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("time grid must be increasing".into()));
    }
    let st = Stepper::new(model, omega0);
    let mut v = V4::from_iterator(rho0.matrix().iter().copied());
    let mut out = vec![rho0.clone()];
    for w in t_grid.windows(2) {
        if w[1] > w[0] {
            v = st.advance_state(v, w[0], w[1], default_steps(model, omega0, w[1] - w[0]))?;
        }
        out.push(DensityMatrix::from_numerical(&ComplexMatrix::from_column_slice(2, 2, v.as_slice()))?);
    }
    Ok(out)
}

/// Checkpointed solution Λ_t on a fixed time grid; evaluations at other
/// times integrate from the nearest earlier checkpoint.
#[derive(Debug, Clone)]
pub struct ChannelTrajectory {
    model: NoiseModel,
    omega0: f64,
    times: Vec<f64>,
    points: Vec<Pair>,
}

impl ChannelTrajectory {
    pub fn build(model: &NoiseModel, omega0: f64, checkpoints: &[f64]) -> Result<Self> {
        model.validate()?;
        let mut times: Vec<f64> = checkpoints.to_vec();
        if times.iter().any(|&t| t < 0.0 || !t.is_finite()) {
            return Err(Error::InvalidArgument("checkpoints must be finite and nonnegative".into()));
        }
        times.push(0.0);
        times.sort_by(f64::total_cmp);
        times.dedup();
        let st = Stepper::new(model, omega0);
        let mut points = vec![identity_pair()];
        for w in times.windows(2) {
            let prev = *points.last().expect("non-empty");
            points.push(st.advance(prev, w[0], w[1], default_steps(model, omega0, w[1] - w[0]))?);
        }
        Ok(ChannelTrajectory { model: model.clone(), omega0, times, points })
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    pub fn at(&self, t: f64) -> Result<ChannelWithDerivative> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let k = self.times.partition_point(|&x| x <= t) - 1;
        let st = Stepper::new(&self.model, self.omega0);
        let t0 = self.times[k];
        let p = if t == t0 {
            self.points[k]
        } else {
            st.advance(self.points[k], t0, t, default_steps(&self.model, self.omega0, t - t0))?
        };
        st.finish(p, t)
    }
}

/// ‖Λ∘R_z(φ) − R_z(φ)∘Λ‖ in operator norm; zero for phase-covariant maps.
pub fn phase_covariance_defect(map: &Superoperator, phi: f64) -> f64 {
    let r = Superoperator::unitary(&unitary_evolution(&(sigma_z() * c(0.5, 0.)), phi));
    let a = map.matrix() * r.matrix();
    let b = r.matrix() * map.matrix();
    crate::qcore::operator_norm(&(a - b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::RateKind;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn noiseless_is_unitary_precession() {
        let m = NoiseModel::noiseless();
        let ch = propagate(&m, 1.3, 0.8).unwrap();
        let u = unitary_evolution(&(sigma_z() * c(0.65, 0.)), 0.8);
        assert!((ch.map.matrix() - Superoperator::unitary(&u).matrix()).norm() < 1e-12);
    }

    #[test]
    fn generator_annihilates_trace() {
        for secular in [true, false] {
            let m = NoiseModel { theta: 0.4, secular, ..Default::default() };
            let g = generator(&m, 1.0, 0.3).unwrap();
            let v = g.matrix().adjoint() * crate::qcore::vec_col(&identity(2));
            assert!(v.norm() < 1e-14);
        }
    }

    #[test]
    fn semigroup_dephasing_envelope() {
        let m = NoiseModel { rate_kind: RateKind::Semigroup, ..Default::default() };
        let rho = DensityMatrix::plus();
        let t = 0.9;
        let out = evolve_state(&m, 1.0, &rho, &[0.0, t]).unwrap();
        let b = out[1].bloch().unwrap();
        let r = (b[0] * b[0] + b[1] * b[1]).sqrt();
        assert!((r - (-m.gamma_infinity() * t).exp()).abs() < 1e-10);
        assert!(b[2].abs() < 1e-14);
    }

    #[test]
    fn trajectory_matches_direct_propagation() {
        let m = NoiseModel { theta: 0.0, secular: false, omega_c: 5.0, ..Default::default() };
        let traj = ChannelTrajectory::build(&m, 1.0, &[0.2, 0.5]).unwrap();
        let direct = propagate(&m, 1.0, 0.65).unwrap();
        let via = traj.at(0.65).unwrap();
        assert!((direct.map.matrix() - via.map.matrix()).norm() < 1e-11);
        assert!((direct.dmap.clone() - via.dmap).norm() < 1e-11);
    }

    #[test]
    fn pure_dephasing_is_phase_covariant() {
        let m = NoiseModel { theta: FRAC_PI_2, secular: false, ..Default::default() };
        let ch = propagate(&m, 1.0, 0.5).unwrap();
        assert!(phase_covariance_defect(&ch.map, 0.7) < 1e-12);
    }
}
