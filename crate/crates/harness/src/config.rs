//! Run configuration: a TOML file layered over per-experiment defaults.
//!
//! Keys absent from the file keep the default of the chosen experiment; keys
//! the schema does not know are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};
use fragbec_core::hartree::PotentialSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Verify,
    MarginalRates,
    NuRates,
    MeanfieldRates,
    Hartree,
    InfiniteGap,
    Manybody,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Verify => "verify",
            Self::MarginalRates => "marginal-rates",
            Self::NuRates => "nu-rates",
            Self::MeanfieldRates => "meanfield-rates",
            Self::Hartree => "hartree",
            Self::InfiniteGap => "infinite-gap",
            Self::Manybody => "manybody",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub model: ModelBlock,
    pub fragmentation: FragmentationBlock,
    pub potential: PotentialBlock,
    pub time: TimeBlock,
    pub quadrature: QuadratureBlock,
    pub experiment: ExperimentBlock,
    pub grid: GridBlock,
    pub verify: VerifyBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    /// Spatial oscillator levels kept.
    pub d: usize,
    /// Spin components.
    pub s: usize,
    pub nu: f64,
    pub space_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FragmentationBlock {
    pub fractions: Vec<f64>,
    /// Exact populations; when given they override the rounding of `fractions`
    /// wherever a single `N` is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub populations: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialName {
    Gaussian,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialBlock {
    pub kind: PotentialName,
    pub v0: f64,
    pub width: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeBlock {
    pub t_final: f64,
    pub dt: f64,
    pub sample_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureBlock {
    /// Phase nodes per angle.
    pub m_theta: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss_hermite_order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    /// When present, must name the subcommand being run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Experiment>,
    pub n_list: Vec<usize>,
    pub nu_list: Vec<f64>,
    pub k_list: Vec<usize>,
    /// Dyadic grid `2^lo ..= 2^hi` for the closed-form rates.
    pub n_exponents: [u32; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub extent: f64,
    pub points: usize,
    /// Offset of the initial Gaussian from the trap centre.
    pub displacement: f64,
    /// Gaps at which the Q-norm is followed.
    pub q_nu_list: Vec<f64>,
    pub q_t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyBlock {
    pub oracle_ell: Vec<usize>,
    pub oracle_n_max: usize,
    pub oracle_k_max: usize,
    pub rank_n_max: usize,
    pub rank_k_max: usize,
    pub quadrature_k_max: usize,
    pub quadrature_m_theta: usize,
    pub instances: usize,
    pub eps_list: Vec<f64>,
}

impl RunConfig {
    /// Defaults of `experiment`; every acceptance criterion runs on these.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut c = Self {
            seed: 0,
            model: ModelBlock { d: 3, s: 2, nu: 1.0, space_dim: 1 },
            fragmentation: FragmentationBlock { fractions: vec![0.5, 0.5], populations: None },
            potential: PotentialBlock { kind: PotentialName::Gaussian, v0: 1.0, width: 1.0, cap: None },
            time: TimeBlock { t_final: 1.0, dt: 1e-3, sample_times: vec![0.25, 0.5, 1.0] },
            quadrature: QuadratureBlock { m_theta: 8, gauss_hermite_order: None },
            experiment: ExperimentBlock {
                kind: None,
                n_list: vec![4, 6, 8, 10, 12],
                nu_list: vec![10.0, 20.0, 40.0, 80.0, 160.0, 320.0],
                k_list: vec![1, 2],
                n_exponents: [3, 20],
            },
            grid: GridBlock {
                extent: 32.0,
                points: 512,
                displacement: 1.0,
                q_nu_list: vec![10.0, 20.0, 40.0, 80.0],
                q_t_final: 5.0,
            },
            verify: VerifyBlock {
                oracle_ell: vec![2, 3],
                oracle_n_max: 8,
                oracle_k_max: 3,
                rank_n_max: 12,
                rank_k_max: 4,
                quadrature_k_max: 4,
                quadrature_m_theta: 64,
                instances: 100,
                eps_list: vec![0.01, 0.1, 0.5],
            },
        };
        match experiment {
            Experiment::MarginalRates => {
                c.fragmentation.fractions = vec![0.3, 0.7];
                c.experiment.k_list = vec![1, 2, 3, 4];
            }
            Experiment::NuRates => {
                c.model.d = 8;
                c.quadrature.m_theta = 4;
                c.time.sample_times = vec![1.0];
            }
            Experiment::InfiniteGap => {
                c.quadrature.m_theta = 4;
                c.time.sample_times = vec![0.0, 0.5, 1.0, 2.0];
            }
            Experiment::Verify => {
                c.fragmentation.fractions = vec![0.3, 0.7];
            }
            _ => {}
        }
        c
    }

    /// Parses `text` over the defaults of `experiment` and validates the result.
    pub fn from_toml(experiment: Experiment, text: &str) -> Result<Self> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        let base = toml::Table::try_from(Self::defaults(experiment)).map_err(|e| HarnessError::Config(e.to_string()))?;
        let merged = merge(base, user);
        let config: Self = merged.try_into().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        config.validate(experiment)?;
        Ok(config)
    }

    pub fn load(experiment: Experiment, path: Option<&std::path::Path>) -> Result<Self> {
        match path {
            None => {
                let c = Self::defaults(experiment);
                c.validate(experiment)?;
                Ok(c)
            }
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::from_toml(experiment, &text)
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML rendering, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn potential(&self) -> Result<PotentialSpec> {
        let p = &self.potential;
        let mut spec = match p.kind {
            PotentialName::Gaussian => PotentialSpec::gaussian(p.v0, p.width)?,
            PotentialName::Zero => PotentialSpec::zero(),
        };
        if let Some(cap) = p.cap {
            spec.cap = Some(cap);
        }
        Ok(spec)
    }

    pub fn validate(&self, experiment: Experiment) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if let Some(kind) = self.experiment.kind {
            if kind != experiment {
                return bad(format!("config is for `{}`, not `{}`", kind.name(), experiment.name()));
            }
        }
        let m = &self.model;
        if m.d == 0 || m.s == 0 || !(m.nu > 0.0) || m.space_dim != 1 {
            return bad("model needs d ≥ 1, s ≥ 1, nu > 0 and space_dim = 1".into());
        }
        let f = &self.fragmentation.fractions;
        let sum: f64 = f.iter().sum();
        if f.len() < 2 || f.iter().any(|&x| !(x > 0.0 && x < 1.0)) || (sum - 1.0).abs() > 1e-12 {
            return bad(format!("fractions {f:?} must be at least two values in (0,1) summing to 1"));
        }
        if let Some(p) = &self.fragmentation.populations {
            if p.len() != f.len() || p.contains(&0) {
                return bad(format!("populations {p:?} must be positive, one per fraction"));
            }
        }
        let p = &self.potential;
        if p.kind == PotentialName::Gaussian && !(p.width > 0.0 && p.v0.is_finite()) {
            return bad("gaussian potential needs width > 0 and finite v0".into());
        }
        if p.cap.is_some_and(|c| !(c > 0.0)) {
            return bad("potential cap must be positive".into());
        }
        let t = &self.time;
        if !(t.dt > 0.0 && t.t_final > 0.0) {
            return bad("time needs dt > 0 and t_final > 0".into());
        }
        if t.sample_times.is_empty() || t.sample_times.iter().any(|&x| !(x >= 0.0)) || t.sample_times.windows(2).any(|w| w[1] <= w[0]) {
            return bad("sample_times must be nonnegative and strictly increasing".into());
        }
        if self.quadrature.m_theta == 0 {
            return bad("m_theta must be positive".into());
        }
        let e = &self.experiment;
        if e.k_list.is_empty() || e.k_list.contains(&0) {
            return bad("k_list must hold positive orders".into());
        }
        if e.n_list.windows(2).any(|w| w[1] <= w[0]) || e.n_list.is_empty() {
            return bad("n_list must be nonempty and strictly increasing".into());
        }
        if e.nu_list.is_empty() || e.nu_list.iter().any(|&x| !(x > 0.0)) {
            return bad("nu_list must hold positive gaps".into());
        }
        if e.n_exponents[0] > e.n_exponents[1] || e.n_exponents[1] > 40 {
            return bad("n_exponents must satisfy lo ≤ hi ≤ 40".into());
        }
        let g = &self.grid;
        if !(g.extent > 0.0) || g.points < 8 || !(g.q_t_final > 0.0) {
            return bad("grid needs extent > 0, at least 8 points and q_t_final > 0".into());
        }
        let per_spin = matches!(
            experiment,
            Experiment::MeanfieldRates | Experiment::Manybody | Experiment::NuRates | Experiment::InfiniteGap
        );
        if per_spin && f.len() != m.s {
            return bad(format!("{} spin fractions for s = {}", f.len(), m.s));
        }
        Ok(())
    }
}

/// Recursive table merge; values in `over` win.
fn merge(mut base: toml::Table, over: toml::Table) -> toml::Table {
    for (key, value) in over {
        match (base.remove(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => {
                base.insert(key, toml::Value::Table(merge(b, o)));
            }
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
    base
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        for e in [Experiment::Verify, Experiment::NuRates, Experiment::Manybody] {
            let c = RunConfig::defaults(e);
            assert_eq!(RunConfig::from_toml(e, &c.to_toml()).unwrap(), c);
        }
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = RunConfig::from_toml(Experiment::Manybody, "[model]\nd = 2\n").unwrap();
        assert_eq!(c.model.d, 2);
        assert_eq!(c.model.s, 2);
        assert_eq!(c.experiment.n_list, vec![4, 6, 8, 10, 12]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            RunConfig::from_toml(Experiment::Hartree, "[model]\ngap = 2.0\n"),
            Err(HarnessError::Config(_))
        ));
        assert!(RunConfig::from_toml(Experiment::Hartree, "colour = 1").is_err());
    }

    #[test]
    fn kind_must_match() {
        assert!(RunConfig::from_toml(Experiment::Hartree, "[experiment]\nkind = \"manybody\"\n").is_err());
        assert!(RunConfig::from_toml(Experiment::Manybody, "[experiment]\nkind = \"manybody\"\n").is_ok());
    }

    #[test]
    fn bad_fractions() {
        assert!(RunConfig::from_toml(Experiment::Verify, "[fragmentation]\nfractions = [0.5, 0.6]\n").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::defaults(Experiment::Hartree);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
