//! `H = Σ_p ε_p n_p + (1/2N) Σ V_{pq,rs} a†_{pσ} a†_{qτ} a_{sτ} a_{rσ}` on a
//! fixed-`N` occupation sector.

use rayon::prelude::*;

use crate::fock::{FockSector, ModeBasis};
use crate::hartree::{interaction_tensor, InteractionTensor, PotentialSpec};
use crate::{Error, Result, C64};

pub const DEFAULT_SECTOR_CAP: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    pub basis: ModeBasis,
    pub tensor: InteractionTensor,
    pub n: usize,
}

impl HamiltonianSpec {
    pub fn new(basis: ModeBasis, potential: &PotentialSpec, n: usize, quad_order: usize) -> Result<Self> {
        let tensor = interaction_tensor(potential, &basis, quad_order)?;
        Ok(Self { basis, tensor, n })
    }

    pub fn mean_field_scale(&self) -> f64 {
        1.0 / self.n as f64
    }
}

/// Real symmetric sector matrix in compressed-row form.
#[derive(Debug, Clone)]
pub struct SectorMatrix {
    sector: FockSector,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SectorMatrix {
    pub fn sector(&self) -> &FockSector {
        &self.sector
    }

    pub fn dim(&self) -> usize {
        self.sector.len()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            *yi = self.row(i).map(|(j, v)| x[j] * v).sum();
        });
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Largest `|H_ij − H_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        (0..self.dim())
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }
}

pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<SectorMatrix> {
    build_hamiltonian_with_cap(spec, DEFAULT_SECTOR_CAP)
}

pub fn build_hamiltonian_with_cap(spec: &HamiltonianSpec, cap: usize) -> Result<SectorMatrix> {
    let basis = &spec.basis;
    if spec.tensor.d() != basis.d() {
        return Err(Error::DimensionMismatch(spec.tensor.d(), basis.d()));
    }
    if spec.n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let sector = FockSector::new(spec.n, basis.modes(), cap)?;
    let scale = 0.5 / spec.n as f64;
    let interacting = !spec.tensor.is_zero();
    let rows: Vec<Vec<(usize, f64)>> = sector
        .states()
        .par_iter()
        .enumerate()
        .map(|(i, occ)| {
            let mut entries: Vec<(usize, f64)> = Vec::new();
            let diag: f64 = occ.iter().zip(basis.eigenvalues()).map(|(&m, &e)| m as f64 * e).sum();
            entries.push((i, diag));
            if interacting {
                interaction_row(occ, basis, &spec.tensor, scale, &sector, &mut entries);
            }
            entries.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
            for (c, v) in entries {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|&(c, v)| v != 0.0 || c == i);
            merged
        })
        .collect();
    let mut row_ptr = Vec::with_capacity(rows.len() + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for r in rows {
        for (c, v) in r {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(SectorMatrix { sector, row_ptr, cols, vals })
}

/// Interaction contributions `⟨m'|H_int|m⟩` for the ket `occ`, keyed by `m'`.
fn interaction_row(
    occ: &[usize],
    basis: &ModeBasis,
    tensor: &InteractionTensor,
    scale: f64,
    sector: &FockSector,
    out: &mut Vec<(usize, f64)>,
) {
    let (d, s) = (basis.d(), basis.s());
    let modes = basis.modes();
    let mut w = occ.to_vec();
    for big_r in 0..modes {
        if w[big_r] == 0 {
            continue;
        }
        let a_r = (w[big_r] as f64).sqrt();
        w[big_r] -= 1;
        for big_s in 0..modes {
            if w[big_s] == 0 {
                continue;
            }
            let a_s = a_r * (w[big_s] as f64).sqrt();
            w[big_s] -= 1;
            let (r, sigma) = (big_r / s, big_r % s);
            let (sp, tau) = (big_s / s, big_s % s);
            for q in 0..d {
                let big_q = q * s + tau;
                let c_q = a_s * ((w[big_q] + 1) as f64).sqrt();
                w[big_q] += 1;
                for p in 0..d {
                    let v = tensor.get(p, q, r, sp);
                    if v == 0.0 {
                        continue;
                    }
                    let big_p = p * s + sigma;
                    let c_p = c_q * ((w[big_p] + 1) as f64).sqrt();
                    w[big_p] += 1;
                    let j = sector.index_of(&w).expect("particle number is conserved");
                    out.push((j, scale * v * c_p));
                    w[big_p] -= 1;
                }
                w[big_q] -= 1;
            }
            w[big_s] += 1;
        }
        w[big_r] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::tensor::digits;
    use crate::hartree::default_quadrature_order;

    fn spec(d: usize, s: usize, n: usize, v0: f64) -> HamiltonianSpec {
        let basis = ModeBasis::one_dim(d, s, 1.5).unwrap();
        let v = if v0 == 0.0 { PotentialSpec::zero() } else { PotentialSpec::gaussian(v0, 1.0).unwrap() };
        HamiltonianSpec::new(basis, &v, n, default_quadrature_order(d)).unwrap()
    }

    #[test]
    fn free_hamiltonian_is_diagonal() {
        let h = build_hamiltonian(&spec(3, 2, 3, 0.0)).unwrap();
        assert_eq!(h.nnz(), h.dim());
        for (i, occ) in h.sector().states().iter().enumerate() {
            let e: f64 = occ.iter().enumerate().map(|(p, &m)| m as f64 * 1.5 * (p / 2) as f64).sum();
            assert_eq!(h.get(i, i), e);
        }
    }

    #[test]
    fn single_spatial_mode_is_scalar() {
        for n in [2, 5] {
            let sp = spec(1, 2, n, 1.0);
            let h = build_hamiltonian(&sp).unwrap();
            let expect = sp.tensor.get(0, 0, 0, 0) * (n as f64 - 1.0) / 2.0;
            for i in 0..h.dim() {
                for j in 0..h.dim() {
                    let e = if i == j { expect } else { 0.0 };
                    assert!((h.get(i, j) - e).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn two_body_spectrum_matches_first_quantization() {
        let sp = spec(2, 1, 2, 1.3);
        let h = build_hamiltonian(&sp).unwrap();
        assert!(h.symmetry_defect() < 1e-14);
        // first-quantized h⊗1 + 1⊗h + (1/N)V on C²⊗C², restricted to the symmetric subspace
        let m = 2;
        let eps = sp.basis.eigenvalues();
        let full = nalgebra::DMatrix::from_fn(4, 4, |i, j| {
            let (a, b) = (digits(i, m, 2), digits(j, m, 2));
            let mut v = 0.0;
            if a == b {
                v += eps[a[0]] + eps[a[1]];
            }
            v + 0.5 * sp.tensor.get(a[0], a[1], b[0], b[1])
        });
        let mut fq: Vec<f64> = full.symmetric_eigenvalues().iter().cloned().collect();
        fq.sort_by(f64::total_cmp);
        // antisymmetric state (|01⟩−|10⟩)/√2 is the extra eigenvector
        let anti = nalgebra::DVector::from_vec(vec![0.0, 1.0, -1.0, 0.0]) / 2f64.sqrt();
        let anti_e = (anti.transpose() * &full * &anti)[(0, 0)];
        let mut sq: Vec<f64> = h.to_dense().symmetric_eigenvalues().iter().cloned().collect();
        sq.push(anti_e);
        sq.sort_by(f64::total_cmp);
        for (a, b) in fq.iter().zip(&sq) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn sector_cap_is_enforced() {
        let err = build_hamiltonian_with_cap(&spec(3, 2, 12, 1.0), 1000).unwrap_err();
        assert!(matches!(err, Error::SectorCap { dim: 6188, cap: 1000 }));
    }
}
