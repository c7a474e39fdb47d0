//! Infinite-gap effective dynamics and phase-averaged mean-field marginals.
//!
//! In the infinite-gap limit the condensate stays in the span of the
//! orbitals `φ_j`; the coefficients obey `i κ̇_j = ⟨φ_j, (V*|Φ|²)Φ⟩` with
//! `Φ = Σ κ_j φ_j` and start from `κ_j(0) = √n_j e^{−iθ_j}`. Averaging
//! `κ_j κ̄_l` over the phases gives the matrix `K(t)` of the one-body marginal.
//! At finite gap the same phase average is taken over full Hartree flows.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::fock::tensor::{interleave, product_tensor};
use crate::fock::{DensityMatrix, ModeBasis};
use crate::hartree::modes::{evolve_modes_at, ModeCoefficients, ModeFlow};
use crate::hartree::InteractionTensor;
use crate::marginals::spin_marginal_quadrature;
use crate::{Error, Result, C64};

/// Norm drift of a κ trajectory above which the step is rejected.
pub const KAPPA_DRIFT_LIMIT: f64 = 1e-6;
/// Eigenvalues of `K` below this are an error rather than quadrature noise.
pub const K_PSD_TOL: f64 = 1e-10;
/// Nodes reduced sequentially per parallel task; fixed so the summation order
/// does not depend on the thread count.
const NODE_CHUNK: usize = 16;

/// Uniform nodes `2πi/m` per angle, endpoint excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaGrid {
    pub m_theta: usize,
}

impl ThetaGrid {
    pub fn new(m_theta: usize) -> Result<Self> {
        if m_theta == 0 {
            return Err(Error::InvalidParameter("m_theta must be positive".into()));
        }
        Ok(Self { m_theta })
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m_theta).map(|i| 2.0 * std::f64::consts::PI * i as f64 / self.m_theta as f64).collect()
    }

    pub fn weight(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.m_theta as f64
    }

    /// Every point of the product grid over `ell` angles, first angle slowest.
    pub fn product(&self, ell: usize) -> Vec<Vec<f64>> {
        let nodes = self.nodes();
        let total = self.m_theta.pow(ell as u32);
        (0..total)
            .map(|mut i| {
                let mut theta = vec![0.0; ell];
                for slot in (0..ell).rev() {
                    theta[slot] = nodes[i % self.m_theta];
                    i /= self.m_theta;
                }
                theta
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaTrajectory {
    pub theta: Vec<f64>,
    pub times: Vec<f64>,
    /// `kappa[t][j]`.
    pub kappa: Vec<Vec<C64>>,
}

/// `K(t)` on the orbital span.
#[derive(Debug, Clone, PartialEq)]
pub struct KMatrix {
    pub t: f64,
    pub entries: DMatrix<C64>,
}

fn check_orbitals(orbitals: &[DVector<C64>], fractions: &[f64], modes: usize) -> Result<()> {
    if orbitals.len() != fractions.len() || orbitals.is_empty() {
        return Err(Error::DimensionMismatch(orbitals.len(), fractions.len()));
    }
    if let Some(o) = orbitals.iter().find(|o| o.len() != modes) {
        return Err(Error::DimensionMismatch(o.len(), modes));
    }
    let dev = crate::fock::spec::gram_deviation(orbitals);
    if dev > crate::fock::spec::ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal(dev));
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-12 || fractions.iter().any(|&f| f < 0.0) {
        return Err(Error::FractionsNotNormalized(sum));
    }
    Ok(())
}

fn check_times(times: &[f64], dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if times.iter().any(|&t| t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("sample times must be sorted and nonnegative".into()));
    }
    Ok(())
}

/// RK4 solution of the κ-system for one phase pair, sampled at `times`.
///
/// Orbitals are coefficient vectors over the `d·s` modes of `basis`; the
/// interaction enters through the same tensor as the Hartree flow.
#[allow(clippy::too_many_arguments)]
pub fn kappa_evolve(
    theta: &[f64],
    orbitals: &[DVector<C64>],
    basis: &ModeBasis,
    tensor: &InteractionTensor,
    fractions: &[f64],
    times: &[f64],
    dt: f64,
) -> Result<KappaTrajectory> {
    check_orbitals(orbitals, fractions, basis.modes())?;
    check_times(times, dt)?;
    if theta.len() != orbitals.len() {
        return Err(Error::DimensionMismatch(theta.len(), orbitals.len()));
    }
    let flow = ModeFlow::new(basis, tensor)?;
    let rhs = |kappa: &[C64]| -> Vec<C64> {
        let mut phi = DVector::<C64>::zeros(basis.modes());
        for (k, o) in kappa.iter().zip(orbitals) {
            phi += o * *k;
        }
        let f = DVector::from_vec(flow.force(phi.as_slice()));
        orbitals.iter().map(|o| C64::new(0.0, -1.0) * o.dotc(&f)).collect()
    };
    let mut kappa: Vec<C64> =
        fractions.iter().zip(theta).map(|(&n, &th)| C64::from_polar(n.sqrt(), -th)).collect();
    let n0: f64 = kappa.iter().map(|z| z.norm_sqr()).sum();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let n = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for _ in 0..n {
                let shift = |a: &[C64], k: &[C64], f: f64| -> Vec<C64> { a.iter().zip(k).map(|(x, y)| x + y * f).collect() };
                let k1 = rhs(&kappa);
                let k2 = rhs(&shift(&kappa, &k1, 0.5 * h));
                let k3 = rhs(&shift(&kappa, &k2, 0.5 * h));
                let k4 = rhs(&shift(&kappa, &k3, h));
                for i in 0..kappa.len() {
                    kappa[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
                }
            }
            let drift = (kappa.iter().map(|z| z.norm_sqr()).sum::<f64>() - n0).abs();
            if !(drift <= KAPPA_DRIFT_LIMIT) {
                return Err(Error::StepTooLarge { drift, suggested_dt: 0.5 * dt });
            }
        }
        t = target;
        out.push(kappa.clone());
    }
    Ok(KappaTrajectory { theta: theta.to_vec(), times: times.to_vec(), kappa: out })
}

/// κ trajectories for every node of the product phase grid, in grid order.
#[allow(clippy::too_many_arguments)]
pub fn kappa_sweep(
    grid: &ThetaGrid,
    orbitals: &[DVector<C64>],
    basis: &ModeBasis,
    tensor: &InteractionTensor,
    fractions: &[f64],
    times: &[f64],
    dt: f64,
) -> Result<Vec<KappaTrajectory>> {
    grid.product(orbitals.len())
        .par_iter()
        .map(|theta| kappa_evolve(theta, orbitals, basis, tensor, fractions, times, dt))
        .collect()
}

/// Phase average of `κ_j(t) κ̄_l(t)` at sample `time_index`.
pub fn assemble_k(trajectories: &[KappaTrajectory], grid: &ThetaGrid, time_index: usize) -> Result<KMatrix> {
    let first = trajectories.first().ok_or(Error::MissingNodes { expected: grid.m_theta, got: 0 })?;
    let ell = first.theta.len();
    let expected = grid.m_theta.pow(ell as u32);
    if trajectories.len() != expected {
        return Err(Error::MissingNodes { expected, got: trajectories.len() });
    }
    if trajectories.iter().any(|tr| tr.times != first.times) {
        return Err(Error::InvalidParameter("trajectories do not share a time grid".into()));
    }
    let t = *first.times.get(time_index).ok_or(Error::IndexOutOfRange(vec![time_index]))?;
    let mut k = DMatrix::<C64>::zeros(ell, ell);
    for tr in trajectories {
        let kap = &tr.kappa[time_index];
        for j in 0..ell {
            for l in 0..ell {
                k[(j, l)] += kap[j] * kap[l].conj();
            }
        }
    }
    k /= C64::new(expected as f64, 0.0);
    let herm = (&k + k.adjoint()) * C64::new(0.5, 0.0);
    let min = herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -K_PSD_TOL {
        return Err(Error::Invariant(format!("K has eigenvalue {min:e}")));
    }
    Ok(KMatrix { t, entries: k })
}

/// `Σ_{j,l} K_{jl} |φ_j⟩⟨φ_l|`.
pub fn gamma_infinite_gap(k: &KMatrix, orbitals: &[DVector<C64>]) -> Result<DensityMatrix> {
    let ell = k.entries.nrows();
    if orbitals.len() != ell {
        return Err(Error::DimensionMismatch(orbitals.len(), ell));
    }
    let m = orbitals[0].len();
    let mut out = DMatrix::<C64>::zeros(m, m);
    for j in 0..ell {
        for l in 0..ell {
            out += &orbitals[j] * orbitals[l].adjoint() * k.entries[(j, l)];
        }
    }
    DensityMatrix::new(1, m, out)
}

/// Orbitals `ψ_0 ⊗ e_j` for `j < s`, the toy-model choice.
pub fn toy_orbitals(basis: &ModeBasis) -> Vec<DVector<C64>> {
    (0..basis.s()).map(|j| crate::fock::spec::unit_vector(basis.modes(), basis.index(0, j))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanFieldPath {
    /// Phase average of full Hartree flows, one per grid node.
    Direct,
    /// Spatial Hartree flow tensored with the spin quadrature; toy model only.
    Factorized,
}

/// Data of the phase-averaged mean-field marginals at finite gap.
#[derive(Debug, Clone)]
pub struct MeanFieldModel {
    pub basis: ModeBasis,
    pub tensor: InteractionTensor,
    pub fractions: Vec<f64>,
    /// Spatial orbital of each spinor level, as coefficients over `d` levels.
    pub spatial_orbitals: Vec<DVector<C64>>,
    pub m_theta: usize,
    pub dt: f64,
}

impl MeanFieldModel {
    /// Every spinor level starts in the spatial ground mode.
    pub fn toy(basis: ModeBasis, tensor: InteractionTensor, fractions: Vec<f64>, m_theta: usize, dt: f64) -> Result<Self> {
        if fractions.len() != basis.s() {
            return Err(Error::DimensionMismatch(fractions.len(), basis.s()));
        }
        let ground = crate::fock::spec::unit_vector(basis.d(), 0);
        let spatial_orbitals = vec![ground; fractions.len()];
        Ok(Self { basis, tensor, fractions, spatial_orbitals, m_theta, dt })
    }

    pub fn is_toy(&self) -> bool {
        let first = &self.spatial_orbitals[0];
        self.fractions.len() == self.basis.s()
            && self.spatial_orbitals.iter().all(|o| (o - first).norm() < 1e-14)
    }

    fn initial(&self, theta: &[f64]) -> Vec<C64> {
        let s = self.basis.s();
        let mut c = vec![C64::new(0.0, 0.0); self.basis.modes()];
        for (j, (orb, &n)) in self.spatial_orbitals.iter().zip(&self.fractions).enumerate() {
            let amp = C64::from_polar(n.sqrt(), -theta[j]);
            for (level, &x) in orb.iter().enumerate() {
                c[level * s + j] += amp * x;
            }
        }
        c
    }
}

/// `γ^{(k)}` of the phase-averaged Hartree states at each of `times`, as
/// operators on `(C^{d·s})^{⊗k}`.
pub fn gamma_mean_field_k(
    model: &MeanFieldModel,
    k: usize,
    times: &[f64],
    path: MeanFieldPath,
) -> Result<Vec<DensityMatrix>> {
    if k == 0 {
        return Err(Error::OrderOutOfRange { k, max: usize::MAX });
    }
    check_times(times, model.dt)?;
    let sum: f64 = model.fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::FractionsNotNormalized(sum));
    }
    if model.spatial_orbitals.len() != model.fractions.len() || model.fractions.len() > model.basis.s() {
        return Err(Error::DimensionMismatch(model.spatial_orbitals.len(), model.fractions.len()));
    }
    match path {
        MeanFieldPath::Direct => direct_path(model, k, times),
        MeanFieldPath::Factorized => factorized_path(model, k, times),
    }
}

fn direct_path(model: &MeanFieldModel, k: usize, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    let m = model.basis.modes();
    let dim = m.pow(k as u32);
    let grid = ThetaGrid::new(model.m_theta)?;
    let nodes = grid.product(model.fractions.len());
    let partial: Vec<Vec<DMatrix<C64>>> = nodes
        .par_chunks(NODE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![DMatrix::<C64>::zeros(dim, dim); times.len()];
            for theta in chunk {
                let c0 = ModeCoefficients::new(model.basis.clone(), model.initial(theta))?;
                let traj = evolve_modes_at(&c0, &model.tensor, times, model.dt)?;
                for (a, state) in acc.iter_mut().zip(&traj) {
                    let v = DVector::from_vec(product_tensor(&state.c, k));
                    *a += &v * v.adjoint();
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let scale = C64::new(1.0 / nodes.len() as f64, 0.0);
    (0..times.len())
        .map(|ti| {
            let mut total = DMatrix::<C64>::zeros(dim, dim);
            for chunk in &partial {
                total += &chunk[ti];
            }
            DensityMatrix::new(k, m, total * scale)
        })
        .collect()
}

fn factorized_path(model: &MeanFieldModel, k: usize, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    if !model.is_toy() {
        return Err(Error::NotToyModel);
    }
    let (d, s) = (model.basis.d(), model.basis.s());
    let spatial_basis = model.basis.spatial_only();
    let c0 = ModeCoefficients::new(spatial_basis, model.spatial_orbitals[0].as_slice().to_vec())?;
    let traj = evolve_modes_at(&c0, &model.tensor, times, model.dt)?;
    let spin = spin_marginal_quadrature(&model.fractions, k, model.m_theta)?;
    traj.iter()
        .map(|state| {
            let v = DVector::from_vec(product_tensor(&state.c, k));
            let spatial = &v * v.adjoint();
            DensityMatrix::new(k, d * s, interleave(&spatial, spin.matrix(), d, s, k)?)
        })
        .collect()
}

impl MeanFieldModel {
    /// Spinor orbitals `φ_j ⊗ e_j` over the `d·s` modes.
    pub fn spinor_orbitals(&self) -> Vec<DVector<C64>> {
        let s = self.basis.s();
        self.spatial_orbitals
            .iter()
            .enumerate()
            .map(|(j, orb)| {
                let mut v = DVector::zeros(self.basis.modes());
                for (level, &x) in orb.iter().enumerate() {
                    v[level * s + j] = x;
                }
                v
            })
            .collect()
    }
}

/// `Tr|γ⁽¹⁾_{∞,ν,t} − γ⁽¹⁾_{∞,∞,t}|` at each sample time: the finite-gap
/// phase-averaged marginal of `model` against the κ-system marginal built on
/// the same orbitals and phase grid. The κ-system has no gap, so it takes its
/// own step `kappa_dt`.
pub fn gap_distance(model: &MeanFieldModel, times: &[f64], path: MeanFieldPath, kappa_dt: f64) -> Result<Vec<f64>> {
    let finite = gamma_mean_field_k(model, 1, times, path)?;
    let orbitals = model.spinor_orbitals();
    let grid = ThetaGrid::new(model.m_theta)?;
    let trajectories = kappa_sweep(&grid, &orbitals, &model.basis, &model.tensor, &model.fractions, times, kappa_dt)?;
    finite
        .iter()
        .enumerate()
        .map(|(ti, g)| {
            let k = assemble_k(&trajectories, &grid, ti)?;
            crate::fock::trace_distance(g, &gamma_infinite_gap(&k, &orbitals)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{numerical_rank, trace_distance, DEFAULT_RANK_TOL};
    use crate::hartree::{default_quadrature_order, interaction_tensor, PotentialSpec};
    use crate::rng;

    fn toy(nu: f64, d: usize) -> (ModeBasis, InteractionTensor) {
        let basis = ModeBasis::one_dim(d, 2, nu).unwrap();
        let v = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        let t = interaction_tensor(&v, &basis, default_quadrature_order(d)).unwrap();
        (basis, t)
    }

    #[test]
    fn zero_potential_freezes_kappa() {
        let basis = ModeBasis::one_dim(2, 2, 1.0).unwrap();
        let orb = toy_orbitals(&basis);
        let tr = kappa_evolve(&[0.3, 1.1], &orb, &basis, &InteractionTensor::zeros(2), &[0.4, 0.6], &[0.0, 1.0], 1e-2)
            .unwrap();
        assert_eq!(tr.kappa[0], tr.kappa[1]);
    }

    #[test]
    fn toy_model_global_phase() {
        let (basis, t) = toy(5.0, 3);
        let orb = toy_orbitals(&basis);
        let g = std::f64::consts::FRAC_1_SQRT_2;
        let times = [0.5, 1.0, 2.0];
        let tr = kappa_evolve(&[0.7, 2.0], &orb, &basis, &t, &[0.25, 0.75], &times, 1e-3).unwrap();
        for (ti, &time) in times.iter().enumerate() {
            for j in 0..2 {
                let init = C64::from_polar([0.25f64, 0.75][j].sqrt(), -[0.7, 2.0][j]);
                let expect = init * C64::from_polar(1.0, -g * time);
                assert!((tr.kappa[ti][j] - expect).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn k_matrix_is_diagonal_in_toy_model() {
        let (basis, t) = toy(5.0, 2);
        let orb = toy_orbitals(&basis);
        for m in [8, 64] {
            let grid = ThetaGrid::new(m).unwrap();
            let trs = kappa_sweep(&grid, &orb, &basis, &t, &[0.3, 0.7], &[0.0, 1.0], 1e-2).unwrap();
            for ti in 0..2 {
                let k = assemble_k(&trs, &grid, ti).unwrap();
                assert!((k.entries[(0, 0)].re - 0.3).abs() < 1e-10);
                assert!((k.entries[(1, 1)].re - 0.7).abs() < 1e-10);
                assert!(k.entries[(0, 1)].norm() < 1e-10);
                let gamma = gamma_infinite_gap(&k, &orb).unwrap();
                assert!((gamma.trace().re - 1.0).abs() < 1e-12);
                assert_eq!(numerical_rank(&gamma, DEFAULT_RANK_TOL), 2);
            }
        }
    }

    #[test]
    fn generic_orbitals_conserve_norm() {
        let (basis, t) = toy(1.0, 3);
        let mut r = rng::seeded(8);
        let orb = rng::random_orthonormal(&mut r, basis.modes(), 2);
        let tr = kappa_evolve(&[0.2, 0.9], &orb, &basis, &t, &[0.5, 0.5], &[0.5, 1.0, 3.0], 1e-3).unwrap();
        for kap in &tr.kappa {
            let n: f64 = kap.iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn missing_nodes_are_reported() {
        let (basis, t) = toy(1.0, 2);
        let orb = toy_orbitals(&basis);
        let grid = ThetaGrid::new(4).unwrap();
        let trs = kappa_sweep(&grid, &orb, &basis, &t, &[0.5, 0.5], &[0.0], 1e-2).unwrap();
        assert!(matches!(assemble_k(&trs[..10], &grid, 0), Err(Error::MissingNodes { expected: 16, got: 10 })));
    }

    #[test]
    fn initial_marginal_and_paths_agree() {
        let (basis, t) = toy(10.0, 4);
        let dt = crate::hartree::suggested_dt(&basis);
        let model = MeanFieldModel::toy(basis.clone(), t, vec![0.4, 0.6], 6, dt).unwrap();
        let g0 = &gamma_mean_field_k(&model, 1, &[0.0], MeanFieldPath::Factorized).unwrap()[0];
        assert!((g0.matrix()[(0, 0)].re - 0.4).abs() < 1e-14);
        assert!((g0.matrix()[(1, 1)].re - 0.6).abs() < 1e-14);
        let a = gamma_mean_field_k(&model, 2, &[1.0], MeanFieldPath::Direct).unwrap();
        let b = gamma_mean_field_k(&model, 2, &[1.0], MeanFieldPath::Factorized).unwrap();
        assert!(trace_distance(&a[0], &b[0]).unwrap() < 1e-6);
    }

    #[test]
    fn factorized_path_requires_toy_structure() {
        let (basis, t) = toy(1.0, 2);
        let mut model = MeanFieldModel::toy(basis, t, vec![0.5, 0.5], 4, 1e-3).unwrap();
        model.spatial_orbitals[1] = crate::fock::spec::unit_vector(2, 1);
        assert!(matches!(gamma_mean_field_k(&model, 1, &[0.1], MeanFieldPath::Factorized), Err(Error::NotToyModel)));
        assert!(gamma_mean_field_k(&model, 1, &[0.1], MeanFieldPath::Direct).is_ok());
    }

    #[test]
    fn gap_distance_is_the_spatial_leakage() {
        // toy model: γ_{∞,∞} = Σ n_j |0,j⟩⟨0,j| and γ_{∞,ν,t} = |φ_t⟩⟨φ_t| ⊗ diag(n),
        // so the distance is the pure-state distance 2√(1 − |⟨0,φ_t⟩|²)
        let (basis, t) = toy(4.0, 4);
        let times = [0.0, 0.5, 1.0];
        let model = MeanFieldModel::toy(basis.clone(), t.clone(), vec![0.3, 0.7], 4, 1e-3).unwrap();
        let dist = gap_distance(&model, &times, MeanFieldPath::Factorized, 1e-3).unwrap();
        let c0 = ModeCoefficients::new(basis.spatial_only(), crate::fock::spec::unit_vector(4, 0).as_slice().to_vec()).unwrap();
        let traj = evolve_modes_at(&c0, &t, &times, 1e-3).unwrap();
        for (d, c) in dist.iter().zip(&traj) {
            let expect = 2.0 * (1.0 - c.c[0].norm_sqr()).max(0.0).sqrt();
            assert!((d - expect).abs() < 1e-9, "{d} vs {expect}");
        }
        assert!(dist[0] < 1e-12 && dist[2] > 1e-3);
    }
}
