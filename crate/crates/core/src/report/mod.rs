//! Configuration, pipeline driver and report emission.

mod config;
mod emit;
mod pipelines;

use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

pub use config::{
    build_family, parse_config, BuiltFamily, CheckSection, DecaySection, FamilyParams, MassSection,
    OutputSection, Pipeline, RunConfig, Tolerances,
};
pub use emit::{emit_csv, emit_human, emit_report, emit_structured, families_human, Format};
pub use pipelines::{
    energy_identity_sweep, CliffordPayload, DecayPayload, DecayQuantityOut, EnergyPayload, EnergySample,
    InvariantValue, KillingPayload, KillingVariantResult, MassPayload, MatrixPayload, Payload, QPayload,
    RigidityPayload, RigidityVariant, WeitzenbockPayload, WeitzenbockSample,
};

use crate::error::{Error, Result};
use crate::mass::EnergyMomentum;
use pipelines::Outcome;

pub const REPORT_FORMAT: &str = "adsmass-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    NotConverged,
    Fail,
    /// the configuration cannot be run as given
    Invalid,
    /// internal contract violation
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::NotConverged => 2,
            Status::Invalid => 3,
            Status::Error => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::NotConverged => "not-converged",
            Status::Fail => "fail",
            Status::Invalid => "invalid",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub name: String,
    pub kappa: f64,
    pub tau: f64,
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// SHA-256 of the resolved configuration
    pub config_hash: String,
    /// resolved configuration, defaults included
    pub config: RunConfig,
    pub family: Option<FamilySummary>,
}

/// Run-dependent fields, excluded from reproducibility comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timestamp {
    pub unix_seconds: u64,
    pub threads: usize,
    pub elapsed_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub name: Pipeline,
    pub status: Status,
    pub message: Option<String>,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format: String,
    pub provenance: Provenance,
    pub status: Status,
    pub exit_code: i32,
    pub pipelines: Vec<PipelineReport>,
    pub timestamp: Timestamp,
}

impl Report {
    pub fn pipeline(&self, name: Pipeline) -> Option<&PipelineReport> {
        self.pipelines.iter().find(|p| p.name == name)
    }

    pub fn mass_payload(&self) -> Option<&MassPayload> {
        self.pipelines.iter().find_map(|p| match &p.payload {
            Payload::Mass(m) => Some(m),
            _ => None,
        })
    }
}

/// Worst status decides the exit code: internal > config > fail > not converged.
fn overall(statuses: impl Iterator<Item = Status>) -> Status {
    statuses.max().unwrap_or(Status::Pass)
}

/// Run every pipeline selected in the configuration.
pub fn run(config: &RunConfig) -> Result<Report> {
    run_pipelines(config, &config.ordered_pipelines())
}

/// Run the given pipelines in dependency order. Only configuration and
/// serialisation problems abort; pipeline failures are recorded.
pub fn run_pipelines(config: &RunConfig, selected: &[Pipeline]) -> Result<Report> {
    config.validate()?;
    let config_hash = config.hash()?;
    let order: Vec<Pipeline> = Pipeline::ALL.into_iter().filter(|p| selected.contains(p)).collect();
    let mut elapsed_ms = BTreeMap::new();
    let needs_family = order.iter().any(|p| !matches!(p, Pipeline::Clifford | Pipeline::Killing));
    let family = if needs_family { Some(build_family(config)?) } else { None };
    let mut em: Option<Result<EnergyMomentum>> = None;
    let mut reports = Vec::with_capacity(order.len());
    for pipeline in order {
        let start = Instant::now();
        let fam = family.as_ref();
        let needs_mass = matches!(pipeline, Pipeline::Mass | Pipeline::QMatrices | Pipeline::Rigidity);
        if needs_mass && em.is_none() {
            let t = Instant::now();
            em = Some(pipelines::compute_mass(config, fam.expect("family built")));
            elapsed_ms.insert("energy_momentum".to_string(), t.elapsed().as_secs_f64() * 1e3);
        }
        let outcome = match pipeline {
            Pipeline::Clifford => pipelines::clifford(config),
            Pipeline::Killing => lift(pipelines::killing(config)),
            Pipeline::Weitzenbock => lift(pipelines::weitzenbock(config, fam.expect("family built"))),
            Pipeline::Decay => pipelines::decay(config, fam.expect("family built")),
            Pipeline::EnergyConditions => lift(pipelines::energy_conditions(config, fam.expect("family built"))),
            Pipeline::Mass => match em.as_ref().expect("mass computed") {
                Ok(em) => pipelines::mass(config, em),
                Err(e) => Outcome::from_error(e),
            },
            Pipeline::QMatrices => match em.as_ref().expect("mass computed") {
                Ok(em) => lift(pipelines::q_matrices(config, em)),
                Err(e) => Outcome::from_error(e),
            },
            Pipeline::Rigidity => match em.as_ref().expect("mass computed") {
                Ok(em) => lift(pipelines::rigidity(config, fam.expect("family built"), em)),
                Err(e) => Outcome::from_error(e),
            },
        };
        elapsed_ms.insert(pipeline.label().to_string(), start.elapsed().as_secs_f64() * 1e3);
        reports.push(PipelineReport {
            name: pipeline,
            status: outcome.status,
            message: outcome.message,
            payload: outcome.payload,
        });
    }
    let status = overall(reports.iter().map(|r| r.status));
    let family_summary = family.as_ref().map(|f| FamilySummary {
        name: f.data.name().to_string(),
        kappa: f.data.kappa(),
        tau: f.data.tau(),
        params: f.data.params(),
    });
    Ok(Report {
        format: REPORT_FORMAT.to_string(),
        provenance: Provenance {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash,
            config: config.clone(),
            family: family_summary,
        },
        status,
        exit_code: status.exit_code(),
        pipelines: reports,
        timestamp: Timestamp {
            unix_seconds: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            threads: rayon::current_num_threads(),
            elapsed_ms,
        },
    })
}

fn lift(r: Result<Outcome>) -> Outcome {
    r.unwrap_or_else(|e| Outcome::from_error(&e))
}

/// Exit code for an error that stopped the run before any report existed.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 3,
        Error::NotConverged(_) => 2,
        Error::Domain(_) | Error::Data(_) => 1,
        Error::Contract(_) => 4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(family: &str) -> RunConfig {
        let mut c = RunConfig::new(family, 1.0);
        c.checks.points = 4;
        c.checks.weitzenbock_fields = 1;
        c.checks.identity_samples = 50;
        c.decay.n_theta = 6;
        c.decay.n_psi = 8;
        c
    }

    #[test]
    fn ads_run_passes_with_zero_energy() {
        let rep = run(&quick("ads")).unwrap();
        for p in &rep.pipelines {
            assert_eq!(p.status, Status::Pass, "{:?}: {:?}", p.name, p.message);
        }
        assert_eq!(rep.exit_code, 0);
        assert_eq!(rep.mass_payload().unwrap().e, [0.0; 4]);
    }

    #[test]
    fn empty_pipeline_set_gives_provenance_only() {
        let mut c = quick("ads");
        c.pipelines.clear();
        let rep = run(&c).unwrap();
        assert!(rep.pipelines.is_empty());
        assert!(rep.provenance.family.is_none());
        assert_eq!(rep.exit_code, 0);
    }

    #[test]
    fn slow_decay_fails_but_other_pipelines_report() {
        let mut c = quick("perturbation");
        c.tau = Some(2.0);
        c.params.eps = Some(0.05);
        c.params.mode = Some(crate::initial_data::Mode::Tangential);
        c.params.profile_rate = Some(1.6);
        c.pipelines = vec![Pipeline::Decay, Pipeline::Clifford, Pipeline::Mass];
        let rep = run(&c).unwrap();
        assert_eq!(rep.pipeline(Pipeline::Decay).unwrap().status, Status::Fail);
        assert_eq!(rep.pipeline(Pipeline::Clifford).unwrap().status, Status::Pass);
        assert!(rep.pipeline(Pipeline::Mass).is_some());
        assert_ne!(rep.exit_code, 0);
    }

    #[test]
    fn exit_code_precedence() {
        use Status::*;
        assert_eq!(overall([Pass, NotConverged, Fail].into_iter()), Fail);
        assert_eq!(overall([Pass, NotConverged].into_iter()), NotConverged);
        assert_eq!(overall([Error, Invalid].into_iter()), Error);
        assert_eq!(overall(std::iter::empty()), Pass);
    }
}
