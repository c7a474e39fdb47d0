use super::occupation::{from_fock, FockSector, FockState};
use super::state::ManyBodyState;
use crate::{rng, Error, Result};

/// A symmetric unit state at norm distance exactly `eps` from `state`.
///
/// The direction is a seeded random symmetric state orthogonalized against
/// `state`; the result is `cos α·Ψ + sin α·χ` with `2 sin(α/2) = eps`.
pub fn perturb_state(state: &ManyBodyState, eps: f64, seed: u64) -> Result<ManyBodyState> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0,2), got {eps}")));
    }
    if FockSector::dimension(state.n(), state.local_dim()) < 2 {
        return Err(Error::InvalidParameter("no symmetric direction orthogonal to the state".into()));
    }
    let mut r = rng::seeded(seed);
    let psi = state.amplitudes();
    let norm = state.norm();
    let chi = loop {
        let raw = from_fock(&FockState::random(&mut r, state.n(), state.local_dim())?)?;
        let overlap = state.inner(&raw)? / (norm * norm);
        let mut v: Vec<_> = raw.amplitudes().iter().zip(psi).map(|(c, p)| c - p * overlap).collect();
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn > 1e-6 {
            v.iter_mut().for_each(|z| *z /= vn);
            break v;
        }
    };
    let alpha = 2.0 * (eps / 2.0).asin();
    let (c, s) = (alpha.cos(), alpha.sin());
    let amps = psi.iter().zip(&chi).map(|(p, x)| p / norm * c + x * s).collect();
    ManyBodyState::new(state.n(), state.local_dim(), amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::density::{partial_trace_dense, trace_distance};
    use crate::C64;

    fn sample() -> ManyBodyState {
        let mut r = rng::seeded(5);
        from_fock(&FockState::random(&mut r, 4, 3).unwrap()).unwrap()
    }

    #[test]
    fn distance_is_exact_and_symmetric() {
        let s = sample();
        for eps in [1e-3, 0.1, 0.5, 1.5] {
            let p = perturb_state(&s, eps, 9).unwrap();
            assert!((s.distance(&p).unwrap() - eps).abs() < 1e-10);
            assert!((p.norm() - 1.0).abs() < 1e-12);
            assert!(p.symmetry_defect() < 1e-12);
        }
    }

    #[test]
    fn marginals_move_at_most_twice_eps() {
        let s = sample();
        let p = perturb_state(&s, 0.1, 1).unwrap();
        for k in 1..=4 {
            let d = trace_distance(&partial_trace_dense(&s, k).unwrap(), &partial_trace_dense(&p, k).unwrap()).unwrap();
            assert!(d <= 0.2 + 1e-12);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let s = sample();
        assert_eq!(perturb_state(&s, 0.3, 4).unwrap(), perturb_state(&s, 0.3, 4).unwrap());
        assert_ne!(perturb_state(&s, 0.3, 4).unwrap(), perturb_state(&s, 0.3, 5).unwrap());
    }

    #[test]
    fn rejects_out_of_range_eps() {
        let s = ManyBodyState::product(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], 2).unwrap();
        assert!(perturb_state(&s, 0.0, 1).is_err());
        assert!(perturb_state(&s, 2.0, 1).is_err());
    }
}
