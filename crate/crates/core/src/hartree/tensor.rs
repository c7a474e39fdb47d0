//! Two-body matrix elements in the harmonic-oscillator basis.

use nalgebra::DMatrix;

use super::hermite::{hermite_functions, GaussHermite};
use super::potential::PotentialSpec;
use crate::fock::ModeBasis;
use crate::{Error, Result, C64};

/// Spatial matrix elements `V_{pq,rs} = ∬ ψ_p(x)ψ_q(y) V(x−y) ψ_r(x)ψ_s(y)`.
///
/// Indices are spatial levels; the interaction is spin-diagonal, so spinor
/// indices are handled by the consumers. Stored with `(p,r)` as the slow pair
/// and `(q,s)` as the fast pair.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTensor {
    d: usize,
    data: Vec<f64>,
}

/// Smallest accepted Gauss–Hermite order for `d` levels.
pub fn min_quadrature_order(d: usize) -> usize {
    2 * (d - 1) + 8
}

/// A comfortable default: well above the minimum, enough for smooth potentials
/// to converge to roundoff.
pub fn default_quadrature_order(d: usize) -> usize {
    min_quadrature_order(d).max(80)
}

impl InteractionTensor {
    pub fn zeros(d: usize) -> Self {
        Self { d, data: vec![0.0; d.pow(4)] }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let d = self.d;
        self.data[((p * d + r) * d + q) * d + s]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// `U_{pr} = Σ_{q,s} V_{pq,rs} ρ_{sq}` for `ρ` given as `rho[q·d + s] = ρ_{sq}`.
    pub fn contract(&self, rho: &[C64], out: &mut [C64]) {
        let d2 = self.d * self.d;
        for (pr, o) in out.iter_mut().enumerate().take(d2) {
            let row = &self.data[pr * d2..(pr + 1) * d2];
            *o = row.iter().zip(rho).map(|(&v, &r)| r * v).sum();
        }
    }

    /// Largest violation of the symmetries `V_{pq,rs} = V_{qp,sr} = V_{rq,ps} = V_{ps,rq}`.
    pub fn symmetry_defect(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for p in 0..d {
            for q in 0..d {
                for r in 0..d {
                    for s in 0..d {
                        let v = self.get(p, q, r, s);
                        worst = worst
                            .max((v - self.get(q, p, s, r)).abs())
                            .max((v - self.get(r, q, p, s)).abs())
                            .max((v - self.get(p, s, r, q)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Product Gauss–Hermite evaluation `T = A W Aᵀ` with `A_{(pr),a} = w_a ψ_p(x_a) ψ_r(x_a)`
/// and `W_{ab} = V(x_a − x_b)`.
pub fn interaction_tensor(potential: &PotentialSpec, basis: &ModeBasis, quad_order: usize) -> Result<InteractionTensor> {
    if basis.space_dim() != 1 {
        return Err(Error::InvalidParameter("mode-basis matrix elements are implemented in one dimension".into()));
    }
    let d = basis.d();
    let required = min_quadrature_order(d);
    if quad_order < required {
        return Err(Error::QuadratureOrder { got: quad_order, required });
    }
    if potential.is_zero() {
        return Ok(InteractionTensor::zeros(d));
    }
    let rule = GaussHermite::new(quad_order)?;
    let q = rule.order();
    let psi: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| hermite_functions(d, x)).collect();
    let a = DMatrix::from_fn(d * d, q, |pr, i| rule.weights[i] * psi[i][pr / d] * psi[i][pr % d]);
    let w = DMatrix::from_fn(q, q, |i, j| potential.eval(rule.nodes[i] - rule.nodes[j]));
    let t = &a * w * a.transpose();
    let mut data = vec![0.0; d.pow(4)];
    for pr in 0..d * d {
        for qs in 0..d * d {
            data[pr * d * d + qs] = t[(pr, qs)];
        }
    }
    Ok(InteractionTensor { d, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential_gives_zero_tensor() {
        let b = ModeBasis::one_dim(4, 1, 1.0).unwrap();
        assert!(interaction_tensor(&PotentialSpec::zero(), &b, 20).unwrap().is_zero());
    }

    #[test]
    fn ground_element_closed_form() {
        let b = ModeBasis::one_dim(1, 1, 1.0).unwrap();
        let v = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        let t = interaction_tensor(&v, &b, default_quadrature_order(1)).unwrap();
        assert!((t.get(0, 0, 0, 0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-13);
        let v3 = PotentialSpec::gaussian(3.0, 1.0).unwrap();
        let t3 = interaction_tensor(&v3, &b, default_quadrature_order(1)).unwrap();
        assert!((t3.get(0, 0, 0, 0) - 3.0 * std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn general_width_closed_form() {
        // ∬ |ψ₀(x)|²|ψ₀(y)|² e^{−(x−y)²/(2w²)} = w/√(w²+1)
        let b = ModeBasis::one_dim(1, 1, 1.0).unwrap();
        for w in [0.5, 2.0] {
            let t = interaction_tensor(&PotentialSpec::gaussian(1.0, w).unwrap(), &b, 120).unwrap();
            assert!((t.get(0, 0, 0, 0) - w / (w * w + 1.0).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetries_hold() {
        let b = ModeBasis::one_dim(5, 1, 1.0).unwrap();
        let t = interaction_tensor(&PotentialSpec::gaussian(1.0, 0.8).unwrap(), &b, 60).unwrap();
        assert!(t.symmetry_defect() < 1e-12);
        // parity: odd total level vanishes
        assert!(t.get(1, 0, 0, 0).abs() < 1e-14);
    }

    #[test]
    fn order_below_threshold() {
        let b = ModeBasis::one_dim(4, 1, 1.0).unwrap();
        let err = interaction_tensor(&PotentialSpec::gaussian(1.0, 1.0).unwrap(), &b, 13).unwrap_err();
        assert_eq!(err, Error::QuadratureOrder { got: 13, required: 14 });
    }
}
