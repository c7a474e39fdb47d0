//! Hartree flow in a truncated oscillator basis,
//! `i ċ_{pσ} = ε_p c_{pσ} + Σ_{q,r,s,τ} V_{pq,rs} c̄_{qτ} c_{rσ} c_{sτ}`.

use super::tensor::InteractionTensor;
use super::TimeGrid;
use crate::fock::ModeBasis;
use crate::{Error, Result, C64};

/// Norm drift above which a run is rejected.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;
const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients {
    pub basis: ModeBasis,
    /// Indexed by `p = level·s + spin`.
    pub c: Vec<C64>,
    pub time: f64,
}

impl ModeCoefficients {
    pub fn new(basis: ModeBasis, c: Vec<C64>) -> Result<Self> {
        if c.len() != basis.modes() {
            return Err(Error::DimensionMismatch(c.len(), basis.modes()));
        }
        let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::Invariant(format!("coefficient norm² {n}")));
        }
        Ok(Self { basis, c, time: 0.0 })
    }

    /// Spatial ground level carrying the given spinor amplitudes.
    pub fn ground(basis: ModeBasis, spinor: &[C64]) -> Result<Self> {
        if spinor.len() != basis.s() {
            return Err(Error::DimensionMismatch(spinor.len(), basis.s()));
        }
        let mut c = vec![C64::new(0.0, 0.0); basis.modes()];
        c[..basis.s()].copy_from_slice(spinor);
        Self::new(basis, c)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `rho[q·d + s] = ρ_{sq} = Σ_τ c_{sτ} c̄_{qτ}`.
pub fn density_matrix(c: &[C64], d: usize, s: usize) -> Vec<C64> {
    let mut rho = vec![C64::new(0.0, 0.0); d * d];
    for q in 0..d {
        for sp in 0..d {
            rho[q * d + sp] = (0..s).map(|t| c[sp * s + t] * c[q * s + t].conj()).sum();
        }
    }
    rho
}

/// Right-hand side of the mode equations without the one-body part.
pub struct ModeFlow<'a> {
    eps: Vec<f64>,
    tensor: &'a InteractionTensor,
    free: bool,
    d: usize,
    s: usize,
}

impl<'a> ModeFlow<'a> {
    pub fn new(basis: &ModeBasis, tensor: &'a InteractionTensor) -> Result<Self> {
        if tensor.d() != basis.d() {
            return Err(Error::DimensionMismatch(tensor.d(), basis.d()));
        }
        Ok(Self { eps: basis.eigenvalues().to_vec(), tensor, free: tensor.is_zero(), d: basis.d(), s: basis.s() })
    }

    /// `F_{pσ} = Σ_r U_{pr} c_{rσ}` with `U` the contracted tensor.
    pub fn force(&self, c: &[C64]) -> Vec<C64> {
        let (d, s) = (self.d, self.s);
        let mut out = vec![C64::new(0.0, 0.0); c.len()];
        if self.free {
            return out;
        }
        let rho = density_matrix(c, d, s);
        let mut u = vec![C64::new(0.0, 0.0); d * d];
        self.tensor.contract(&rho, &mut u);
        for p in 0..d {
            for sigma in 0..s {
                out[p * s + sigma] = (0..d).map(|r| u[p * d + r] * c[r * s + sigma]).sum();
            }
        }
        out
    }

    /// Interaction-picture field `−i e^{iετ} F(e^{−iετ} b)`.
    fn rotated(&self, b: &[C64], tau: f64) -> Vec<C64> {
        let x: Vec<C64> = b.iter().zip(&self.eps).map(|(z, e)| z * C64::from_polar(1.0, -e * tau)).collect();
        self.force(&x)
            .iter()
            .zip(&self.eps)
            .map(|(f, e)| C64::new(0.0, -1.0) * f * C64::from_polar(1.0, e * tau))
            .collect()
    }

    /// One integrating-factor RK4 step: the linear part is propagated exactly,
    /// RK4 acts on the interaction-picture amplitudes.
    pub fn step(&self, c: &mut [C64], h: f64) {
        let axpy = |a: &[C64], k: &[C64], f: f64| -> Vec<C64> { a.iter().zip(k).map(|(x, y)| x + y * f).collect() };
        let k1 = self.rotated(c, 0.0);
        let k2 = self.rotated(&axpy(c, &k1, 0.5 * h), 0.5 * h);
        let k3 = self.rotated(&axpy(c, &k2, 0.5 * h), 0.5 * h);
        let k4 = self.rotated(&axpy(c, &k3, h), h);
        for (i, z) in c.iter_mut().enumerate() {
            let b = *z + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            *z = b * C64::from_polar(1.0, -self.eps[i] * h);
        }
    }
}

/// A step size that resolves the fastest interaction-picture frequency,
/// `2ν(d−1)`, with `ω·dt ≤ 0.04`, capped at `10⁻³`.
pub fn suggested_dt(basis: &ModeBasis) -> f64 {
    let spread = basis.eigenvalues().iter().cloned().fold(0.0, f64::max);
    if spread == 0.0 {
        1e-3
    } else {
        (0.02 / spread).min(1e-3)
    }
}

/// Trajectory sampled as prescribed by `time`.
pub fn evolve_modes(
    c0: &ModeCoefficients,
    tensor: &InteractionTensor,
    time: &TimeGrid,
) -> Result<Vec<ModeCoefficients>> {
    let steps = time.steps()?;
    let times: Vec<f64> = (0..=steps)
        .filter(|n| n % time.record_every == 0 || *n == steps)
        .map(|n| n as f64 * time.dt)
        .collect();
    evolve_modes_at(c0, tensor, &times, time.dt)
}

/// Trajectory sampled at the nondecreasing `times`; each interval is split
/// into equal steps no longer than `dt`.
pub fn evolve_modes_at(
    c0: &ModeCoefficients,
    tensor: &InteractionTensor,
    times: &[f64],
    dt: f64,
) -> Result<Vec<ModeCoefficients>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if times.iter().any(|&t| t < c0.time) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("sample times must be sorted and not precede the initial time".into()));
    }
    let flow = ModeFlow::new(&c0.basis, tensor)?;
    let n0 = c0.norm_sqr();
    let mut c = c0.c.clone();
    let mut t = c0.time;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let n = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for _ in 0..n {
                flow.step(&mut c, h);
            }
            let drift = (c.iter().map(|z| z.norm_sqr()).sum::<f64>() - n0).abs();
            if !(drift <= NORM_DRIFT_LIMIT) {
                return Err(Error::StepTooLarge { drift, suggested_dt: 0.5 * dt.min(suggested_dt(&c0.basis)) });
            }
        }
        t = target;
        out.push(ModeCoefficients { basis: c0.basis.clone(), c: c.clone(), time: t });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::diagnostics::mode_diagnostics;
    use super::super::potential::PotentialSpec;
    use super::super::tensor::{default_quadrature_order, interaction_tensor};
    use super::*;
    use crate::rng;

    fn random_state(basis: &ModeBasis, seed: u64) -> ModeCoefficients {
        let mut r = rng::seeded(seed);
        let v = rng::random_unit_vector(&mut r, basis.modes());
        ModeCoefficients::new(basis.clone(), v.as_slice().to_vec()).unwrap()
    }

    #[test]
    fn free_flow_is_diagonal() {
        let basis = ModeBasis::one_dim(4, 2, 1.7).unwrap();
        let c0 = random_state(&basis, 1);
        let tr = evolve_modes(&c0, &InteractionTensor::zeros(4), &TimeGrid::new(3.0, 1e-2, 50).unwrap()).unwrap();
        for s in &tr {
            for (p, z) in s.c.iter().enumerate() {
                let expect = c0.c[p] * C64::from_polar(1.0, -basis.eigenvalues()[p] * s.time);
                assert!((z - expect).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn single_mode_phase() {
        let basis = ModeBasis::one_dim(1, 1, 1.0).unwrap();
        let v = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        let t = interaction_tensor(&v, &basis, default_quadrature_order(1)).unwrap();
        let c0 = ModeCoefficients::ground(basis, &[C64::new(1.0, 0.0)]).unwrap();
        let tr = evolve_modes_at(&c0, &t, &[0.5, 2.0], 1e-3).unwrap();
        let g = std::f64::consts::FRAC_1_SQRT_2;
        for s in tr {
            assert!((s.c[0] - C64::from_polar(1.0, -g * s.time)).norm() < 1e-10);
        }
    }

    #[test]
    fn norm_and_energy_conserved() {
        let basis = ModeBasis::one_dim(6, 2, 2.0).unwrap();
        let v = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        let t = interaction_tensor(&v, &basis, default_quadrature_order(6)).unwrap();
        let c0 = random_state(&basis, 4);
        let e0 = mode_diagnostics(&c0, &t);
        let tr = evolve_modes(&c0, &t, &TimeGrid::new(2.0, suggested_dt(&basis), 100).unwrap()).unwrap();
        for s in &tr {
            let d = mode_diagnostics(s, &t);
            assert!((d.mass - 1.0).abs() < 1e-9);
            assert!((d.energy - e0.energy).abs() < 1e-8);
        }
    }

    #[test]
    fn ground_q_norm() {
        let basis = ModeBasis::one_dim(3, 1, 1.0).unwrap();
        let c0 = ModeCoefficients::ground(basis, &[C64::new(1.0, 0.0)]).unwrap();
        let d = mode_diagnostics(&c0, &InteractionTensor::zeros(3));
        assert!((d.q_norm * d.q_norm - 2.0).abs() < 1e-15);
        assert_eq!(d.energy, 0.0);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let basis = ModeBasis::one_dim(4, 1, 1.0).unwrap();
        let v = PotentialSpec::gaussian(40.0, 0.5).unwrap();
        let t = interaction_tensor(&v, &basis, 40).unwrap();
        let c0 = random_state(&basis, 2);
        let err = evolve_modes_at(&c0, &t, &[5.0], 0.5).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
    }
}
