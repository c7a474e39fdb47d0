//! Distance between exact `k`-body marginals and their mean-field
//! counterparts, as a function of `N`.

use rayon::prelude::*;

use super::factorization::factorize;
use super::hamiltonian::{build_hamiltonian_with_cap, HamiltonianSpec, SectorMatrix};
use super::propagate::{PropagationOptions, Propagator};
use crate::fock::spec::{largest_remainder, unit_vector};
use crate::fock::{krdm_from_sector, trace_distance, DensityMatrix, FragmentationSpec, ModeBasis, Occupation};
use crate::hartree::{interaction_tensor, PotentialSpec};
use crate::infinite_gap::{gamma_mean_field_k, MeanFieldModel, MeanFieldPath};
use crate::marginals::{closed_form_marginal, min_theta_nodes, MarginalKind};
use crate::stats::{fit_rate, RateFit};
use crate::{Error, Result, C64};

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub basis: ModeBasis,
    pub potential: PotentialSpec,
    pub quad_order: usize,
    /// Spin fractions, one per spin component.
    pub fractions: Vec<f64>,
    pub n_list: Vec<usize>,
    pub k_list: Vec<usize>,
    /// Sample times, sorted.
    pub times: Vec<f64>,
    /// Step of the mode-truncated Hartree flow used as reference.
    pub dt: f64,
    pub m_theta: usize,
    pub sector_cap: usize,
    pub propagation: PropagationOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub n: usize,
    pub k: usize,
    pub t: f64,
    /// `Tr|γ_N − γ_mf|`.
    pub distance: f64,
    pub factorization_residual: f64,
    /// Distance of the spin factor from the closed-form spin marginal of the
    /// rounded populations.
    pub spin_residual: f64,
}

/// All points sharing one `(k, t)`, ordered by `N`.
#[derive(Debug, Clone)]
pub struct SweepSeries {
    pub k: usize,
    pub t: f64,
    pub points: Vec<(usize, f64)>,
    pub strictly_decreasing: bool,
    /// `None` when fewer than four positive distances are available.
    pub fit: Option<RateFit>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub series: Vec<SweepSeries>,
    /// Populations of each `N` and their deviation `N_j/N − n_j`.
    pub populations: Vec<(usize, Vec<usize>, Vec<f64>)>,
    /// `N` values skipped because their sector exceeded the cap.
    pub gaps: Vec<(usize, String)>,
}

impl SweepResult {
    pub fn max_factorization_residual(&self) -> f64 {
        self.points.iter().map(|p| p.factorization_residual).fold(0.0, f64::max)
    }

    pub fn max_spin_residual(&self) -> f64 {
        self.points.iter().map(|p| p.spin_residual).fold(0.0, f64::max)
    }
}

/// Every particle in the spatial ground level, `N_j` of them with spin `j`.
pub fn initial_occupation(basis: &ModeBasis, populations: &[usize]) -> Result<Occupation> {
    if populations.len() > basis.s() {
        return Err(Error::DimensionMismatch(populations.len(), basis.s()));
    }
    let mut occ = vec![0; basis.modes()];
    for (j, &n) in populations.iter().enumerate() {
        occ[basis.index(0, j)] = n;
    }
    Ok(occ)
}

pub fn convergence_sweep(config: &SweepConfig) -> Result<SweepResult> {
    validate(config)?;
    let basis = &config.basis;
    let (d, s) = (basis.d(), basis.s());
    let tensor = interaction_tensor(&config.potential, basis, config.quad_order)?;
    let model = MeanFieldModel::toy(basis.clone(), tensor.clone(), config.fractions.clone(), config.m_theta, config.dt)?;
    let references: Vec<Vec<DensityMatrix>> = config
        .k_list
        .iter()
        .map(|&k| gamma_mean_field_k(&model, k, &config.times, MeanFieldPath::Factorized))
        .collect::<Result<_>>()?;
    let spin_frame: Vec<_> = (0..s).map(|j| unit_vector(s, j)).collect();

    let outcomes: Vec<Result<NOutcome>> = config
        .n_list
        .par_iter()
        .map(|&n| {
            let populations = largest_remainder(&config.fractions, n);
            let residues = populations.iter().zip(&config.fractions).map(|(&m, f)| m as f64 / n as f64 - f).collect();
            let spec = HamiltonianSpec { basis: basis.clone(), tensor: tensor.clone(), n };
            let h = match build_hamiltonian_with_cap(&spec, config.sector_cap) {
                Ok(h) => h,
                Err(e @ Error::SectorCap { .. }) => return Ok(NOutcome::Gap(n, e.to_string())),
                Err(e) => return Err(e),
            };
            let spin_exact: Vec<DensityMatrix> = config
                .k_list
                .iter()
                .map(|&k| {
                    let fs = FragmentationSpec::from_populations(spin_frame.clone(), populations.clone())?;
                    closed_form_marginal(&fs, k, MarginalKind::Exact)?.densify(&spin_frame)
                })
                .collect::<Result<_>>()?;
            let mut points = Vec::new();
            let occ = initial_occupation(basis, &populations)?;
            let states = evolve_from_occupation(&h, &occ, &config.times, config.propagation)?;
            for ((ti, &t), psi) in config.times.iter().enumerate().zip(&states) {
                check_norm(psi)?;
                for (ki, &k) in config.k_list.iter().enumerate() {
                    let gamma = krdm_from_sector(h.sector(), psi, k)?;
                    let parts = factorize(&gamma, d, s)?;
                    points.push(SweepPoint {
                        n,
                        k,
                        t,
                        distance: trace_distance(&gamma, &references[ki][ti])?,
                        factorization_residual: parts.residual,
                        spin_residual: trace_distance(&parts.spin, &spin_exact[ki])?,
                    });
                }
            }
            Ok(NOutcome::Done { n, populations, residues, points })
        })
        .collect();

    let mut result = SweepResult { points: Vec::new(), series: Vec::new(), populations: Vec::new(), gaps: Vec::new() };
    for outcome in outcomes {
        match outcome? {
            NOutcome::Gap(n, why) => result.gaps.push((n, why)),
            NOutcome::Done { n, populations, residues, points } => {
                result.populations.push((n, populations, residues));
                result.points.extend(points);
            }
        }
    }
    for &k in &config.k_list {
        for &t in &config.times {
            let points: Vec<(usize, f64)> =
                result.points.iter().filter(|p| p.k == k && p.t == t).map(|p| (p.n, p.distance)).collect();
            let strictly_decreasing = points.windows(2).all(|w| w[1].1 < w[0].1);
            let positive: Vec<(f64, f64)> =
                points.iter().filter(|p| p.1 > 0.0).map(|&(n, y)| (n as f64, y)).collect();
            let fit = if positive.len() >= 4 { fit_rate(&positive).ok() } else { None };
            result.series.push(SweepSeries { k, t, points, strictly_decreasing, fit });
        }
    }
    Ok(result)
}

enum NOutcome {
    Gap(usize, String),
    Done { n: usize, populations: Vec<usize>, residues: Vec<f64>, points: Vec<SweepPoint> },
}

fn validate(config: &SweepConfig) -> Result<()> {
    if config.fractions.len() != config.basis.s() {
        return Err(Error::DimensionMismatch(config.fractions.len(), config.basis.s()));
    }
    if config.times.iter().any(|&t| !(t >= 0.0)) || config.times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("sample times must be nonnegative and strictly increasing".into()));
    }
    if config.n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("N list must be strictly increasing".into()));
    }
    for &k in &config.k_list {
        let required = min_theta_nodes(k);
        if config.m_theta < required {
            return Err(Error::QuadratureOrder { got: config.m_theta, required });
        }
        if let Some(&n) = config.n_list.iter().find(|&&n| n < k) {
            return Err(Error::OrderOutOfRange { k, max: n });
        }
    }
    Ok(())
}

fn check_norm(psi: &[C64]) -> Result<()> {
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= 1e-10) {
        return Err(Error::Invariant(format!("norm {norm} after propagation")));
    }
    Ok(())
}

/// Sector vectors at `times`, starting from a single occupation vector at `t = 0`.
pub fn evolve_from_occupation(h: &SectorMatrix, occ: &[usize], times: &[f64], opts: PropagationOptions) -> Result<Vec<Vec<C64>>> {
    let i0 = h.sector().index_of(occ).ok_or_else(|| Error::IndexOutOfRange(occ.to_vec()))?;
    let mut psi = vec![C64::new(0.0, 0.0); h.dim()];
    psi[i0] = C64::new(1.0, 0.0);
    let propagator = Propagator::new(h, opts);
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        psi = propagator.evolve(&psi, t - now)?;
        now = t;
        out.push(psi.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hartree::default_quadrature_order;

    fn config(d: usize, v: PotentialSpec, n_list: Vec<usize>, times: Vec<f64>) -> SweepConfig {
        SweepConfig {
            basis: ModeBasis::one_dim(d, 2, 1.0).unwrap(),
            potential: v,
            quad_order: default_quadrature_order(d),
            fractions: vec![0.5, 0.5],
            n_list,
            k_list: vec![1, 2],
            times,
            dt: 1e-3,
            m_theta: 8,
            sector_cap: 100_000,
            propagation: PropagationOptions::default(),
        }
    }

    fn distance(r: &SweepResult, n: usize, k: usize, t: f64) -> f64 {
        r.points.iter().find(|p| p.n == n && p.k == k && p.t == t).unwrap().distance
    }

    #[test]
    fn initial_distances() {
        let r = convergence_sweep(&config(2, PotentialSpec::gaussian(1.0, 1.0).unwrap(), vec![4, 5], vec![0.0])).unwrap();
        assert!(distance(&r, 4, 1, 0.0) < 1e-12);
        assert!((distance(&r, 5, 1, 0.0) - 0.2).abs() < 1e-12);
        assert_eq!(r.populations[1].1, vec![3, 2]);
        assert!(r.max_factorization_residual() < 1e-12);
        assert!(r.max_spin_residual() < 1e-12);
    }

    #[test]
    fn free_flow_keeps_k1_distance_zero() {
        let r = convergence_sweep(&config(3, PotentialSpec::zero(), vec![4, 6], vec![0.5, 1.0])).unwrap();
        for p in r.points.iter().filter(|p| p.k == 1) {
            assert!(p.distance < 1e-10, "{p:?}");
        }
    }

    #[test]
    fn single_spatial_mode_freezes_marginals() {
        let basis = ModeBasis::one_dim(1, 2, 1.0).unwrap();
        let v = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        let spec = HamiltonianSpec::new(basis.clone(), &v, 5, default_quadrature_order(1)).unwrap();
        let h = build_hamiltonian_with_cap(&spec, 1000).unwrap();
        let occ = initial_occupation(&basis, &[3, 2]).unwrap();
        let states = evolve_from_occupation(&h, &occ, &[0.0, 0.7, 3.0], PropagationOptions::default()).unwrap();
        for k in 1..=3 {
            let g0 = krdm_from_sector(h.sector(), &states[0], k).unwrap();
            for psi in &states[1..] {
                let g = krdm_from_sector(h.sector(), psi, k).unwrap();
                assert!((g.matrix() - g0.matrix()).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn cap_overflow_is_a_gap() {
        let mut c = config(3, PotentialSpec::zero(), vec![4, 30], vec![0.0]);
        c.sector_cap = 1000;
        let r = convergence_sweep(&c).unwrap();
        assert_eq!(r.gaps.len(), 1);
        assert_eq!(r.gaps[0].0, 30);
        assert!(r.points.iter().all(|p| p.n == 4));
    }
}
