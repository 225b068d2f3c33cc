//! Run configuration: a sectioned TOML document. Radii and sample ranges
//! are given in units of 1/κ.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::initial_data::{family_ads, family_kottler, family_perturbation, HProfile, InitialData, Mode};
use crate::mass::{ExtrapolationConfig, MassConfig, Normalization, SphereQuadrature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Clifford,
    Killing,
    Weitzenbock,
    Decay,
    EnergyConditions,
    Mass,
    QMatrices,
    Rigidity,
}

impl Pipeline {
    /// Dependency order.
    pub const ALL: [Pipeline; 8] = [
        Pipeline::Clifford,
        Pipeline::Killing,
        Pipeline::Weitzenbock,
        Pipeline::Decay,
        Pipeline::EnergyConditions,
        Pipeline::Mass,
        Pipeline::QMatrices,
        Pipeline::Rigidity,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Pipeline::Clifford => "clifford",
            Pipeline::Killing => "killing",
            Pipeline::Weitzenbock => "weitzenbock",
            Pipeline::Decay => "decay",
            Pipeline::EnergyConditions => "energy-conditions",
            Pipeline::Mass => "mass",
            Pipeline::QMatrices => "q-matrices",
            Pipeline::Rigidity => "rigidity",
        }
    }
}

fn all_pipelines() -> Vec<Pipeline> {
    Pipeline::ALL.to_vec()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_profile: Option<HProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_rate: Option<f64>,
}

impl FamilyParams {
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.mass.is_some() {
            out.push("mass");
        }
        if self.eps.is_some() {
            out.push("eps");
        }
        if self.mode.is_some() {
            out.push("mode");
        }
        if self.eta.is_some() {
            out.push("eta");
        }
        if self.h_profile.is_some() {
            out.push("h_profile");
        }
        if self.profile_rate.is_some() {
            out.push("profile_rate");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MassSection {
    pub radii: Vec<f64>,
    pub n_theta: usize,
    pub n_psi: usize,
    pub tolerance: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub normalization: Normalization,
}

impl Default for MassSection {
    fn default() -> Self {
        let q = SphereQuadrature::default();
        let e = ExtrapolationConfig::default();
        Self {
            radii: vec![3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
            n_theta: q.n_theta,
            n_psi: q.n_psi,
            tolerance: e.tolerance,
            sigma_min: e.sigma_min,
            sigma_max: e.sigma_max,
            normalization: Normalization::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecaySection {
    pub radii: Vec<f64>,
    pub n_theta: usize,
    pub n_psi: usize,
}

impl Default for DecaySection {
    fn default() -> Self {
        Self {
            radii: vec![2.0, 3.0, 4.0, 5.0, 6.0],
            n_theta: 32,
            n_psi: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSection {
    /// random sample points for the pointwise pipelines
    pub points: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// first step of the Weitzenböck step-halving pair
    pub weitzenbock_step: f64,
    pub weitzenbock_fields: usize,
    pub identity_samples: usize,
    pub boundary_samples: usize,
}

impl Default for CheckSection {
    fn default() -> Self {
        Self {
            points: 20,
            r_min: 2.0,
            r_max: 4.0,
            weitzenbock_step: 2e-2,
            weitzenbock_fields: 3,
            identity_samples: 1000,
            boundary_samples: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub clifford: f64,
    pub killing: f64,
    pub weitzenbock_ratio_min: f64,
    pub weitzenbock_ratio_max: f64,
    pub identity: f64,
    pub energy: f64,
    pub bookkeeping: f64,
    pub rigidity: f64,
    /// |E|, |P| below this count as zero mass for the rigidity check
    pub zero_mass: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            clifford: 1e-15,
            killing: 1e-8,
            weitzenbock_ratio_min: 3.5,
            weitzenbock_ratio_max: 4.5,
            identity: 1e-12,
            energy: 1e-7,
            bookkeeping: 1e-10,
            rigidity: 1e-9,
            zero_mass: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: String,
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "all_pipelines")]
    pub pipelines: Vec<Pipeline>,
    #[serde(default)]
    pub params: FamilyParams,
    #[serde(default)]
    pub mass: MassSection,
    #[serde(default)]
    pub decay: DecaySection,
    #[serde(default)]
    pub checks: CheckSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn new(family: &str, kappa: f64) -> Self {
        Self {
            family: family.to_string(),
            kappa,
            tau: None,
            seed: 0,
            pipelines: all_pipelines(),
            params: FamilyParams::default(),
            mass: MassSection::default(),
            decay: DecaySection::default(),
            checks: CheckSection::default(),
            tolerances: Tolerances::default(),
            output: OutputSection::default(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialise config: {e}")))
    }

    /// SHA-256 of the canonical serialisation, hex encoded.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Selected pipelines, deduplicated, in dependency order.
    pub fn ordered_pipelines(&self) -> Vec<Pipeline> {
        Pipeline::ALL.into_iter().filter(|p| self.pipelines.contains(p)).collect()
    }

    pub fn mass_config(&self) -> MassConfig {
        let m = &self.mass;
        MassConfig {
            radii: m.radii.iter().map(|r| r / self.kappa).collect(),
            quadrature: SphereQuadrature {
                n_theta: m.n_theta,
                n_psi: m.n_psi,
            },
            extrapolation: ExtrapolationConfig {
                tolerance: m.tolerance,
                sigma_min: m.sigma_min,
                sigma_max: m.sigma_max,
            },
            normalization: m.normalization,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: &str| Err(Error::Config(format!("{key}: {msg}")));
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return bad("kappa", "must be positive");
        }
        let allowed: &[&str] = match self.family.as_str() {
            "ads" => &[],
            "kottler" => &["mass"],
            "perturbation" => &["eps", "mode", "eta", "h_profile", "profile_rate"],
            other => {
                return bad("family", &format!("unknown family \"{other}\" (known: ads, kottler, perturbation)"))
            }
        };
        for key in self.params.present() {
            if !allowed.contains(&key) {
                return bad(&format!("params.{key}"), &format!("not a parameter of family \"{}\"", self.family));
            }
        }
        if let Some(tau) = self.tau {
            if self.family == "kottler" {
                return bad("tau", "kottler data decay at the fixed rate 3");
            }
            if !(tau.is_finite() && tau > 0.0) {
                return bad("tau", "must be positive");
            }
        }
        check_radii("mass.radii", &self.mass.radii)?;
        if self.mass.radii.len() < 3 {
            return bad("mass.radii", "need at least three radii");
        }
        check_radii("decay.radii", &self.decay.radii)?;
        for (key, n) in [
            ("mass.n_theta", self.mass.n_theta),
            ("mass.n_psi", self.mass.n_psi),
            ("decay.n_theta", self.decay.n_theta),
            ("decay.n_psi", self.decay.n_psi),
            ("checks.points", self.checks.points),
            ("checks.weitzenbock_fields", self.checks.weitzenbock_fields),
            ("checks.identity_samples", self.checks.identity_samples),
            ("checks.boundary_samples", self.checks.boundary_samples),
        ] {
            if n == 0 {
                return bad(key, "must be positive");
            }
        }
        if !(self.mass.sigma_min > 0.0 && self.mass.sigma_min < self.mass.sigma_max) {
            return bad("mass.sigma_min", "need 0 < sigma_min < sigma_max");
        }
        let c = &self.checks;
        if !(c.r_min > 0.0 && c.r_min < c.r_max && c.r_max.is_finite()) {
            return bad("checks.r_min", "need 0 < r_min < r_max");
        }
        if !(c.weitzenbock_step > 0.0 && c.weitzenbock_step.is_finite()) {
            return bad("checks.weitzenbock_step", "must be positive");
        }
        let t = &self.tolerances;
        for (key, v) in [
            ("mass.tolerance", self.mass.tolerance),
            ("tolerances.clifford", t.clifford),
            ("tolerances.killing", t.killing),
            ("tolerances.weitzenbock_ratio_min", t.weitzenbock_ratio_min),
            ("tolerances.weitzenbock_ratio_max", t.weitzenbock_ratio_max),
            ("tolerances.identity", t.identity),
            ("tolerances.energy", t.energy),
            ("tolerances.bookkeeping", t.bookkeeping),
            ("tolerances.rigidity", t.rigidity),
            ("tolerances.zero_mass", t.zero_mass),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(key, "tolerances must be positive");
            }
        }
        if t.weitzenbock_ratio_min >= t.weitzenbock_ratio_max {
            return bad("tolerances.weitzenbock_ratio_min", "must be below weitzenbock_ratio_max");
        }
        Ok(())
    }
}

fn check_radii(key: &str, radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::Config(format!("{key}: empty")));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Config(format!("{key}: radii must be positive")));
    }
    if !radii.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config(format!("{key}: radii not increasing")));
    }
    Ok(())
}

/// Parse and validate. Syntax errors carry line and column.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// A constructed family together with what the pipelines need to know
/// about it.
#[derive(Clone)]
pub struct BuiltFamily {
    pub data: Arc<dyn InitialData>,
    /// a ≡ 0 and h ≡ 0 outside the Schwarzschild-AdS mass term
    pub vacuum: bool,
    /// smallest admissible radius of the chart (horizon for Kottler)
    pub inner_radius: f64,
}

pub fn build_family(cfg: &RunConfig) -> Result<BuiltFamily> {
    let k = cfg.kappa;
    let p = &cfg.params;
    let built = match cfg.family.as_str() {
        "ads" => {
            let mut f = family_ads(k)?;
            if let Some(t) = cfg.tau {
                f = f.with_tau(t);
            }
            BuiltFamily {
                data: Arc::new(f),
                vacuum: true,
                inner_radius: 0.0,
            }
        }
        "kottler" => {
            let f = family_kottler(p.mass.unwrap_or(1.0), k)?;
            let inner = f.horizon_coordinate();
            BuiltFamily {
                data: Arc::new(f),
                vacuum: true,
                inner_radius: inner,
            }
        }
        "perturbation" => {
            let eps = p.eps.unwrap_or(0.0);
            let eta = p.eta.unwrap_or(0.0);
            let tau = cfg.tau.unwrap_or(3.0);
            let mut f = family_perturbation(eps, tau, p.mode.unwrap_or(Mode::Isotropic), k)?
                .with_extrinsic(p.h_profile.unwrap_or(HProfile::None), eta);
            if let Some(rate) = p.profile_rate {
                f = f.with_profile_rate(rate);
            }
            BuiltFamily {
                data: Arc::new(f),
                vacuum: eps == 0.0 && eta == 0.0,
                inner_radius: 0.0,
            }
        }
        other => return Err(Error::Config(format!("family: unknown family \"{other}\""))),
    };
    let inner = built.inner_radius * k;
    for (key, r) in [
        ("mass.radii", cfg.mass.radii[0]),
        ("decay.radii", cfg.decay.radii[0]),
        ("checks.r_min", cfg.checks.r_min),
    ] {
        if r <= inner {
            return Err(Error::Config(format!(
                "{key}: {r} lies inside the horizon at κr = {inner:.6}"
            )));
        }
    }
    Ok(built)
}
