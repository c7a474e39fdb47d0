//! Second-quantized states over a fixed particle number.
//!
//! Occupation vectors are enumerated in descending lexicographic order: the
//! first state of a sector puts every particle in mode 0, the last one every
//! particle in mode `M−1`.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use super::state::{ManyBodyState, DEFAULT_STORAGE_CAP};
use super::tensor::{digits, flat_index, tensor_dim};
use crate::{rng, Error, Result, C64};

pub type Occupation = Vec<usize>;

pub const NORM_TOL: f64 = 1e-12;

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

pub fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `Π m_p!` for an occupation vector.
pub fn occupation_factorial(occ: &[usize]) -> f64 {
    occ.iter().map(|&m| factorial(m)).product()
}

/// All occupation vectors of `n` bosons in `modes` modes, with an index.
#[derive(Debug, Clone)]
pub struct FockSector {
    n: usize,
    modes: usize,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl FockSector {
    pub fn new(n: usize, modes: usize, cap: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter("a sector needs at least one mode".into()));
        }
        let dim = Self::dimension(n, modes);
        if dim > cap as u128 {
            return Err(Error::SectorCap { dim, cap });
        }
        let mut states = Vec::with_capacity(dim as usize);
        let mut current = vec![0; modes];
        enumerate(n, 0, &mut current, &mut states);
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Self { n, modes, states, index })
    }

    /// `binom(n + modes − 1, modes − 1)`.
    pub fn dimension(n: usize, modes: usize) -> u128 {
        binomial_u128(n + modes - 1, modes - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn index_of(&self, occ: &[usize]) -> Option<usize> {
        self.index.get(occ).copied()
    }
}

fn enumerate(remaining: usize, mode: usize, current: &mut Vec<usize>, out: &mut Vec<Occupation>) {
    if mode + 1 == current.len() {
        current[mode] = remaining;
        out.push(current.clone());
        return;
    }
    for m in (0..=remaining).rev() {
        current[mode] = m;
        enumerate(remaining - m, mode + 1, current, out);
    }
    current[mode] = 0;
}

/// Sparse map from occupation vectors to amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n: usize,
    modes: usize,
    amplitudes: BTreeMap<Occupation, C64>,
}

impl FockState {
    pub fn new(n: usize, modes: usize, amplitudes: BTreeMap<Occupation, C64>) -> Result<Self> {
        for occ in amplitudes.keys() {
            if occ.len() != modes {
                return Err(Error::DimensionMismatch(occ.len(), modes));
            }
            let total: usize = occ.iter().sum();
            if total != n {
                return Err(Error::InvalidParameter(format!(
                    "occupation {occ:?} holds {total} particles, expected {n}"
                )));
            }
        }
        let state = Self { n, modes, amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Invariant(format!("Fock state norm {norm}")));
        }
        Ok(state)
    }

    /// A single occupation vector with amplitude 1.
    pub fn basis_state(occ: Occupation) -> Self {
        let n = occ.iter().sum();
        let modes = occ.len();
        Self { n, modes, amplitudes: BTreeMap::from([(occ, C64::new(1.0, 0.0))]) }
    }

    /// Reads a coefficient vector indexed by `sector`; exact zeros are dropped.
    pub fn from_vector(sector: &FockSector, coeffs: &[C64]) -> Result<Self> {
        if coeffs.len() != sector.len() {
            return Err(Error::DimensionMismatch(coeffs.len(), sector.len()));
        }
        let amplitudes = sector
            .states()
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| **c != C64::new(0.0, 0.0))
            .map(|(o, &c)| (o.clone(), c))
            .collect();
        Self::new(sector.n(), sector.modes(), amplitudes)
    }

    pub fn to_vector(&self, sector: &FockSector) -> Result<Vec<C64>> {
        if sector.n() != self.n || sector.modes() != self.modes {
            return Err(Error::InvalidParameter("sector does not match the state".into()));
        }
        let mut out = vec![C64::new(0.0, 0.0); sector.len()];
        for (occ, &c) in &self.amplitudes {
            let i = sector.index_of(occ).ok_or_else(|| Error::IndexOutOfRange(occ.clone()))?;
            out[i] = c;
        }
        Ok(out)
    }

    /// Normalized complex-Gaussian amplitudes on every occupation vector.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, modes: usize) -> Result<Self> {
        let sector = FockSector::new(n, modes, DEFAULT_STORAGE_CAP)?;
        let mut v: Vec<C64> = (0..sector.len()).map(|_| rng::complex_normal(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        Self::from_vector(&sector, &v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn amplitudes(&self) -> &BTreeMap<Occupation, C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.values().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Slot word of an occupation vector: mode `p` repeated `m_p` times, ascending.
fn canonical_word(occ: &[usize]) -> Vec<usize> {
    occ.iter().enumerate().flat_map(|(p, &m)| std::iter::repeat_n(p, m)).collect()
}

/// Second-quantized form of a symmetric first-quantized state.
///
/// Uses `c_m = Ψ(w_m)·√(N!/Π m_p!)` with `w_m` the canonical slot word, so the
/// input must be permutation symmetric for the round trip to hold.
pub fn to_fock(state: &ManyBodyState) -> Result<FockState> {
    let n = state.n();
    let m = state.local_dim();
    let sector = FockSector::new(n, m, usize::MAX)?;
    let n_fact = factorial(n);
    let amps = state.amplitudes();
    let mut out = BTreeMap::new();
    for occ in sector.states() {
        let i = flat_index(&canonical_word(occ), m);
        let c = amps[i] * (n_fact / occupation_factorial(occ)).sqrt();
        if c != C64::new(0.0, 0.0) {
            out.insert(occ.clone(), c);
        }
    }
    FockState::new(n, m, out)
}

pub fn from_fock(fock: &FockState) -> Result<ManyBodyState> {
    from_fock_with_cap(fock, DEFAULT_STORAGE_CAP)
}

/// Dense symmetric tensor with `Ψ(i) = c_m·√(Π m_p!/N!)` where `m` counts the
/// modes appearing in the slot word `i`.
pub fn from_fock_with_cap(fock: &FockState, cap: usize) -> Result<ManyBodyState> {
    let (n, m) = (fock.n(), fock.modes());
    let total = tensor_dim(m, n).filter(|&t| t <= cap).ok_or(Error::StorageCap {
        entries: (m as u128).saturating_pow(n as u32),
        cap,
    })?;
    let n_fact = factorial(n);
    let mut amps = vec![C64::new(0.0, 0.0); total];
    let mut occ = vec![0usize; m];
    for (i, a) in amps.iter_mut().enumerate() {
        occ.iter_mut().for_each(|x| *x = 0);
        for p in digits(i, m, n) {
            occ[p] += 1;
        }
        if let Some(&c) = fock.amplitudes().get(&occ) {
            *a = c * (occupation_factorial(&occ) / n_fact).sqrt();
        }
    }
    ManyBodyState::new(n, m, amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_order_and_size() {
        let s = FockSector::new(2, 3, 100).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(FockSector::dimension(2, 3), 6);
        assert_eq!(s.states()[0], vec![2, 0, 0]);
        assert_eq!(s.states()[1], vec![1, 1, 0]);
        assert_eq!(s.states()[5], vec![0, 0, 2]);
        assert_eq!(s.index_of(&[0, 1, 1]), Some(4));
        assert_eq!(FockSector::dimension(12, 6), 6188);
        assert!(FockSector::new(12, 6, 1000).is_err());
    }

    #[test]
    fn rejects_inconsistent_particle_number() {
        let amps = BTreeMap::from([(vec![2, 0], C64::new(1.0, 0.0))]);
        assert!(FockState::new(3, 2, amps).is_err());
    }

    #[test]
    fn round_trip_random_state() {
        let mut r = rng::seeded(11);
        for (n, m) in [(1, 3), (3, 2), (4, 3), (5, 2)] {
            let f = FockState::random(&mut r, n, m).unwrap();
            let dense = from_fock(&f).unwrap();
            assert!(dense.symmetry_defect() < 1e-14);
            assert!((dense.norm() - 1.0).abs() < 1e-12);
            let back = to_fock(&dense).unwrap();
            for (occ, c) in f.amplitudes() {
                assert!((back.amplitudes()[occ] - c).norm() < 1e-12);
            }
        }
    }
}
