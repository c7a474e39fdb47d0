//! Split-step Fourier solver for `i∂ₜφ = h_ν φ + (V*|φ|²)φ` on a periodic box.
//!
//! `h_ν = (ν/2)(−Δ + |x|² − D)`, so the ground Gaussian has energy 0 and the
//! spectrum is `ν·ℕ`.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::diagnostics::Diagnostics;
use super::hermite::hermite_functions;
use super::potential::PotentialSpec;
use super::TimeGrid;
use crate::{Error, Result, C64};

/// Trap value at the box edge must exceed this multiple of the initial energy.
pub const DEFAULT_CONFINEMENT_FACTOR: f64 = 10.0;
/// Largest mass tolerated in the outer tenth of the box on each side.
pub const BOUNDARY_MASS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GridGeometry {
    space_dim: usize,
    extent: f64,
    points: usize,
}

impl GridGeometry {
    /// `points` per axis on `[−L/2, L/2)`, a power of two.
    pub fn new(space_dim: usize, extent: f64, points: usize) -> Result<Self> {
        if space_dim != 1 && space_dim != 3 {
            return Err(Error::InvalidParameter(format!("space_dim must be 1 or 3, got {space_dim}")));
        }
        if !(extent > 0.0) {
            return Err(Error::InvalidParameter(format!("extent must be positive, got {extent}")));
        }
        if !points.is_power_of_two() || points < 4 {
            return Err(Error::InvalidParameter(format!("points must be a power of two ≥ 4, got {points}")));
        }
        Ok(Self { space_dim, extent, points })
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.points as f64
    }

    pub fn total(&self) -> usize {
        self.points.pow(self.space_dim as u32)
    }

    /// Volume element `dx^D`.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.space_dim as i32)
    }

    /// Axis coordinates `x_j = (j − n/2)·dx`.
    pub fn axis(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.points).map(|j| (j as f64 - (self.points / 2) as f64) * dx).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.points as isize;
        let k0 = 2.0 * std::f64::consts::PI / self.extent;
        (0..n).map(|j| k0 * (if j < n / 2 { j } else { j - n }) as f64).collect()
    }

    /// Per-axis indices of flat point `i` (last axis fastest).
    fn multi_index(&self, mut i: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for a in (0..self.space_dim).rev() {
            out[a] = i % self.points;
            i /= self.points;
        }
        out
    }

    /// `f` evaluated at every point, given the per-axis values.
    fn map_points(&self, axis_values: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.total())
            .map(|i| {
                let idx = self.multi_index(i);
                let v: Vec<f64> = (0..self.space_dim).map(|a| axis_values[idx[a]]).collect();
                f(&v)
            })
            .collect()
    }

    fn squared_radius(&self) -> Vec<f64> {
        self.map_points(&self.axis(), |x| x.iter().map(|v| v * v).sum())
    }
}

/// Mean-field orbital sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HartreeField {
    pub grid: GridGeometry,
    pub values: Vec<C64>,
    pub nu: f64,
    pub time: f64,
}

impl HartreeField {
    /// `π^{−D/4} e^{−|x − x₀ e₁|²/2}`, renormalized to unit discrete mass.
    pub fn displaced_gaussian(grid: &GridGeometry, nu: f64, x0: f64) -> Self {
        let axis = grid.axis();
        let mut shifted = vec![0.0; grid.total()];
        for (i, v) in shifted.iter_mut().enumerate() {
            let idx = grid.multi_index(i);
            *v = (0..grid.space_dim())
                .map(|a| {
                    let x = axis[idx[a]] - if a == 0 { x0 } else { 0.0 };
                    x * x
                })
                .sum();
        }
        let mut values: Vec<C64> = shifted.iter().map(|r2| C64::new((-0.5 * r2).exp(), 0.0)).collect();
        normalize(&mut values, grid.cell());
        Self { grid: grid.clone(), values, nu, time: 0.0 }
    }

    /// Ground state of `h_ν`, independent of `ν`.
    pub fn ground_state(grid: &GridGeometry, nu: f64) -> Self {
        Self::displaced_gaussian(grid, nu, 0.0)
    }

    /// `Σ_n c_n ψ_n(x)` on a one-dimensional grid.
    pub fn from_modes(grid: &GridGeometry, nu: f64, coeffs: &[C64]) -> Result<Self> {
        if grid.space_dim() != 1 {
            return Err(Error::InvalidParameter("mode synthesis is one-dimensional".into()));
        }
        let values = grid
            .axis()
            .iter()
            .map(|&x| {
                hermite_functions(coeffs.len(), x).iter().zip(coeffs).map(|(&h, &c)| c * h).sum()
            })
            .collect();
        Ok(Self { grid: grid.clone(), values, nu, time: 0.0 })
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell()
    }

    /// `⟨self, other⟩`.
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter("fields live on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<C64>() * self.grid.cell())
    }

    /// Mass in the outer tenth of the box along any axis.
    pub fn boundary_mass(&self) -> f64 {
        let axis = self.grid.axis();
        let edge = 0.4 * self.grid.extent();
        let outer: Vec<bool> = axis.iter().map(|x| x.abs() > edge).collect();
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let idx = self.grid.multi_index(*i);
                (0..self.grid.space_dim()).any(|a| outer[idx[a]])
            })
            .map(|(_, z)| z.norm_sqr())
            .sum::<f64>()
            * self.grid.cell()
    }
}

fn normalize(values: &mut [C64], cell: f64) {
    let m = (values.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell).sqrt();
    values.iter_mut().for_each(|z| *z /= m);
}

/// Precomputed propagators for one grid, gap, potential and step.
pub struct GridSolver {
    grid: GridGeometry,
    nu: f64,
    dt: f64,
    potential: PotentialSpec,
    trap: Vec<f64>,
    k2: Vec<f64>,
    kinetic_phase: Vec<C64>,
    kernel_hat: Option<Vec<C64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl GridSolver {
    pub fn new(grid: &GridGeometry, nu: f64, potential: &PotentialSpec, dt: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::InvalidParameter(format!("nu must be positive, got {nu}")));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.points());
        let inverse = planner.plan_fft_inverse(grid.points());
        let dim = grid.space_dim() as f64;
        let trap = grid.squared_radius().iter().map(|r2| 0.5 * nu * (r2 - dim)).collect();
        let k2 = grid.map_points(&grid.wavenumbers(), |k| k.iter().map(|v| v * v).sum());
        let kinetic_phase = k2.iter().map(|&k| C64::from_polar(1.0, -0.5 * nu * k * dt)).collect();
        let mut solver = Self {
            grid: grid.clone(),
            nu,
            dt,
            potential: potential.clone(),
            trap,
            k2,
            kinetic_phase,
            kernel_hat: None,
            forward,
            inverse,
        };
        if !potential.is_zero() {
            // V sampled at wrapped offsets so the circular convolution is centered
            let n = grid.points() as isize;
            let dx = grid.spacing();
            let offsets: Vec<f64> = (0..n).map(|j| (if j < n / 2 { j } else { j - n }) as f64 * dx).collect();
            let r = grid.map_points(&offsets, |x| x.iter().map(|v| v * v).sum::<f64>().sqrt());
            let mut kernel: Vec<C64> = r.iter().map(|&r| C64::new(potential.eval_radial(r) * grid.cell(), 0.0)).collect();
            solver.fft(&mut kernel, false);
            solver.kernel_hat = Some(kernel);
        }
        Ok(solver)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// In-place multidimensional FFT; the inverse includes the `1/total` factor.
    fn fft(&self, data: &mut [C64], inverse: bool) {
        let n = self.grid.points();
        let plan = if inverse { &self.inverse } else { &self.forward };
        let dim = self.grid.space_dim();
        let mut line = vec![C64::new(0.0, 0.0); n];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            let block = stride * n;
            for start in 0..data.len() / n {
                let base = (start / stride) * block + start % stride;
                for (j, l) in line.iter_mut().enumerate() {
                    *l = data[base + j * stride];
                }
                plan.process(&mut line);
                for (j, l) in line.iter().enumerate() {
                    data[base + j * stride] = *l;
                }
            }
        }
        if inverse {
            let scale = 1.0 / data.len() as f64;
            data.iter_mut().for_each(|z| *z *= scale);
        }
    }

    /// `V * |φ|²` at the grid points, or `None` for a vanishing potential.
    fn mean_field(&self, values: &[C64]) -> Option<Vec<f64>> {
        let kernel = self.kernel_hat.as_ref()?;
        let mut rho: Vec<C64> = values.iter().map(|z| C64::new(z.norm_sqr(), 0.0)).collect();
        self.fft(&mut rho, false);
        rho.iter_mut().zip(kernel).for_each(|(a, b)| *a *= b);
        self.fft(&mut rho, true);
        Some(rho.iter().map(|z| z.re).collect())
    }

    fn half_potential_step(&self, values: &mut [C64]) {
        let w = self.mean_field(values);
        let h = 0.5 * self.dt;
        for (i, z) in values.iter_mut().enumerate() {
            let u = self.trap[i] + w.as_ref().map_or(0.0, |w| w[i]);
            *z *= C64::from_polar(1.0, -h * u);
        }
    }

    /// One Strang step: half potential, full kinetic, half potential.
    pub fn step(&self, field: &mut HartreeField) {
        self.half_potential_step(&mut field.values);
        self.fft(&mut field.values, false);
        field.values.iter_mut().zip(&self.kinetic_phase).for_each(|(z, p)| *z *= p);
        self.fft(&mut field.values, true);
        self.half_potential_step(&mut field.values);
        field.time += self.dt;
    }

    pub fn diagnostics(&self, field: &HartreeField) -> Diagnostics {
        let cell = self.grid.cell();
        let mass = field.mass();
        let mut hat = field.values.clone();
        self.fft(&mut hat, false);
        let grad2 = hat.iter().zip(&self.k2).map(|(z, k)| z.norm_sqr() * k).sum::<f64>() * cell / hat.len() as f64;
        let rho: Vec<f64> = field.values.iter().map(|z| z.norm_sqr()).collect();
        let x2 = rho.iter().zip(self.grid.squared_radius()).map(|(r, x)| r * x).sum::<f64>() * cell;
        let interaction = self
            .mean_field(&field.values)
            .map_or(0.0, |w| 0.5 * w.iter().zip(&rho).map(|(a, b)| a * b).sum::<f64>() * cell);
        let dim = self.grid.space_dim() as f64;
        Diagnostics {
            mass,
            energy: 0.5 * self.nu * grad2 + 0.5 * self.nu * (x2 - dim * mass) + interaction,
            q_norm: (mass + grad2 + x2).sqrt(),
        }
    }

    /// Initial confinement: trap at the box edge against the state's energy.
    pub fn check_confinement(&self, field: &HartreeField, factor: f64) -> Result<()> {
        let half = 0.5 * self.grid.extent();
        let dim = self.grid.space_dim() as f64;
        let edge_trap = 0.5 * self.nu * (half * half - dim);
        let energy = self.diagnostics(field).energy.abs() + 0.5 * self.nu * self.potential.peak();
        if edge_trap < factor * energy {
            return Err(Error::Confinement(format!(
                "trap at the boundary {edge_trap:.3e} is below {factor} × energy {energy:.3e}"
            )));
        }
        self.check_boundary_mass(field)
    }

    pub fn check_boundary_mass(&self, field: &HartreeField) -> Result<()> {
        let m = field.boundary_mass();
        if m > BOUNDARY_MASS_TOL {
            return Err(Error::Confinement(format!("mass {m:.3e} near the boundary at t = {}", field.time)));
        }
        Ok(())
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }
}

/// Strang-split evolution recording `phi0` and every `record_every`-th step.
pub fn evolve_grid(phi0: &HartreeField, potential: &PotentialSpec, time: &TimeGrid) -> Result<Vec<HartreeField>> {
    let steps = time.steps()?;
    let solver = GridSolver::new(&phi0.grid, phi0.nu, potential, time.dt)?;
    let mass = phi0.mass();
    if (mass - 1.0).abs() > 1e-10 {
        return Err(Error::Invariant(format!("initial mass {mass}")));
    }
    solver.check_confinement(phi0, DEFAULT_CONFINEMENT_FACTOR)?;
    let mut field = phi0.clone();
    let mut out = vec![field.clone()];
    for n in 1..=steps {
        solver.step(&mut field);
        if n % time.record_every == 0 || n == steps {
            solver.check_boundary_mass(&field)?;
            out.push(field.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridGeometry {
        GridGeometry::new(1, 32.0, 512).unwrap()
    }

    #[test]
    fn geometry_validation() {
        assert!(GridGeometry::new(2, 1.0, 64).is_err());
        assert!(GridGeometry::new(1, 1.0, 100).is_err());
        assert!(GridGeometry::new(1, -1.0, 64).is_err());
    }

    #[test]
    fn ground_state_is_stationary_without_interaction() {
        let phi = HartreeField::ground_state(&grid(), 3.0);
        let tr = evolve_grid(&phi, &PotentialSpec::zero(), &TimeGrid::new(2.0, 1e-3, 500).unwrap()).unwrap();
        let last = tr.last().unwrap();
        let dev = (phi.overlap(last).unwrap().norm() - 1.0).abs();
        assert!(dev < 1e-10, "{dev}");
        assert!((last.time - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ground_state_diagnostics() {
        let phi = HartreeField::ground_state(&grid(), 2.0);
        let s = GridSolver::new(&grid(), 2.0, &PotentialSpec::zero(), 1e-3).unwrap();
        let d = s.diagnostics(&phi);
        assert!((d.mass - 1.0).abs() < 1e-14);
        assert!(d.energy.abs() < 1e-12);
        assert!((d.q_norm * d.q_norm - 2.0).abs() < 1e-12);
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let g = GridGeometry::new(1, 16.0, 64).unwrap();
        let v = PotentialSpec::gaussian(1.0, 0.7).unwrap();
        let s = GridSolver::new(&g, 1.0, &v, 1e-3).unwrap();
        let phi = HartreeField::displaced_gaussian(&g, 1.0, 0.5);
        let w = s.mean_field(&phi.values).unwrap();
        let x = g.axis();
        for i in [10, 32, 40] {
            let direct: f64 = (0..64).map(|j| v.eval(x[i] - x[j]) * phi.values[j].norm_sqr() * g.cell()).sum();
            assert!((w[i] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn three_dim_ground_state() {
        let g = GridGeometry::new(3, 16.0, 32).unwrap();
        let phi = HartreeField::ground_state(&g, 1.0);
        let s = GridSolver::new(&g, 1.0, &PotentialSpec::zero(), 1e-2).unwrap();
        let d = s.diagnostics(&phi);
        assert!(d.energy.abs() < 1e-10);
        assert!((d.q_norm * d.q_norm - 4.0).abs() < 1e-10);
        let mut f = phi.clone();
        for _ in 0..20 {
            s.step(&mut f);
        }
        assert!((phi.overlap(&f).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn confinement_violation_is_reported() {
        let g = GridGeometry::new(1, 8.0, 64).unwrap();
        let phi = HartreeField::displaced_gaussian(&g, 1.0, 3.0);
        let err = evolve_grid(&phi, &PotentialSpec::zero(), &TimeGrid::new(0.1, 1e-2, 1).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Confinement(_)));
    }
}
