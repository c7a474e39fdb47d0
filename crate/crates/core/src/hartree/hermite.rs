//! Hermite functions and Gauss–Hermite quadrature.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// `ψ_0(x), …, ψ_{count−1}(x)`, the orthonormal eigenfunctions of `−∂² + x²`.
///
/// Three-term recurrence `ψ_{n+1} = √(2/(n+1))·x·ψ_n − √(n/(n+1))·ψ_{n−1}`.
pub fn hermite_functions(count: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp());
    if count > 1 {
        out.push(std::f64::consts::SQRT_2 * x * out[0]);
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Nodes and weights with `∫ f(x) dx ≈ Σ_i w_i f(x_i)`.
///
/// The weights already include the factor `e^{x²}`, so the rule is exact for
/// `f = p(x)·e^{−x²}` with `deg p ≤ 2·order − 1`; products of two Hermite
/// functions of degree below `order` are integrated exactly.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("quadrature order must be positive".into()));
        }
        // Golub–Welsch: eigenvalues of the Jacobi matrix of the Hermite recurrence
        let jacobi = DMatrix::from_fn(order, order, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().cloned().collect();
        nodes.sort_by(f64::total_cmp);
        let weights = nodes
            .iter_mut()
            .map(|x| {
                for _ in 0..3 {
                    let psi = hermite_functions(order + 1, *x);
                    let value = psi[order];
                    let slope = (2.0 * order as f64).sqrt() * psi[order - 1] - *x * value;
                    if slope != 0.0 {
                        *x -= value / slope;
                    }
                }
                // Christoffel weight of the node, divided by the Gaussian factor
                1.0 / hermite_functions(order, *x).iter().map(|v| v * v).sum::<f64>()
            })
            .collect();
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_orthonormality() {
        let q = GaussHermite::new(40).unwrap();
        let rows: Vec<Vec<f64>> = q.nodes.iter().map(|&x| hermite_functions(12, x)).collect();
        for m in 0..12 {
            for n in 0..12 {
                let s: f64 = rows.iter().zip(&q.weights).map(|(r, w)| w * r[m] * r[n]).sum();
                let e = if m == n { 1.0 } else { 0.0 };
                assert!((s - e).abs() < 1e-13, "{m} {n} {s}");
            }
        }
    }

    #[test]
    fn known_low_order_rule() {
        let q = GaussHermite::new(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((q.nodes[0] + h).abs() < 1e-15 && (q.nodes[1] - h).abs() < 1e-15);
        let w = std::f64::consts::PI.sqrt() / 2.0 * (0.5f64).exp();
        assert!((q.weights[0] - w).abs() < 1e-14);
    }

    #[test]
    fn gaussian_moments() {
        // ∫ x² e^{−x²} = √π/2
        let q = GaussHermite::new(10).unwrap();
        let s: f64 = q.nodes.iter().zip(&q.weights).map(|(x, w)| w * x * x * (-x * x).exp()).sum();
        assert!((s - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
    }
}
