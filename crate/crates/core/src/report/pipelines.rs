//! The individual verification pipelines. Each returns a typed payload and
//! a status; errors raised inside a pipeline are recorded, never propagated.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BuiltFamily, Pipeline, RunConfig};
use super::Status;
use crate::clifford::{clifford_suite, C64};
use crate::error::{Error, Result};
use crate::geometry::{Point, Sym3};
use crate::initial_data::{
    constraint_densities, energy_identity_defect, family_ads, rigidity_residuals, validate_decay,
    Variant,
};
use crate::mass::{
    boundary_quadratic_form, corollary_margins, energy_momentum, geometric_invariant,
    positivity_report, q1_matrix, q2_matrix, EnergyMomentum, FitDiagnostics, Hermitian4,
    MatrixKind, Normalization, RadiusRecord, Verdict,
};
use crate::spinor::{killing_connection, killing_gram_determinant, weitzenbock_residual, BumpField, KillingField, KillingParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliffordPayload {
    pub pairs: usize,
    pub exact: bool,
    pub anticommutator_defect: f64,
    pub hermiticity_defect: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillingVariantResult {
    pub variant: Variant,
    pub max_residual: f64,
    pub min_gram_determinant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillingPayload {
    pub points: usize,
    pub variants: Vec<KillingVariantResult>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeitzenbockSample {
    pub variant: Variant,
    pub field: usize,
    /// (r, θ, ψ)
    pub point: [f64; 3],
    pub residual_step: f64,
    pub residual_half_step: f64,
    /// residual_step / residual_half_step, absent if the latter vanishes
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeitzenbockPayload {
    pub step: f64,
    pub ratio_band: [f64; 2],
    pub samples: Vec<WeitzenbockSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayQuantityOut {
    pub name: String,
    pub sups: Vec<f64>,
    pub log_slope: f64,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayPayload {
    pub tau: f64,
    pub tau_admissible: bool,
    pub radii: Vec<f64>,
    pub slope_tolerance: f64,
    pub quantities: Vec<DecayQuantityOut>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub point: [f64; 3],
    pub mu: f64,
    pub omega_norm: f64,
    pub margin: f64,
    pub rho: f64,
    pub momentum_norm: f64,
    pub margin_standard: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyPayload {
    pub identity_samples: usize,
    pub identity_max_defect: f64,
    pub identity_tolerance: f64,
    pub vacuum: bool,
    pub tolerance: f64,
    pub min_margin: f64,
    pub min_margin_standard: f64,
    pub max_abs_mu: f64,
    pub max_omega: f64,
    pub samples: Vec<EnergySample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantValue {
    pub c1: f64,
    pub c2: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassPayload {
    pub kappa: f64,
    pub normalization: Normalization,
    pub e: [f64; 4],
    /// p[ν][k−1] = P_νk
    pub p: [[f64; 3]; 4],
    pub beta: [f64; 4],
    /// max_ν |β_ν − E_ν − P_ν1| / max(1, |β|)
    pub bookkeeping_defect: f64,
    pub bookkeeping_tolerance: f64,
    /// E₀ + P₀₁ − |E⃗ + P⃗₁|
    pub margin_energy_momentum: f64,
    /// E₀ − |E⃗|
    pub margin_energy: f64,
    pub geometric_invariants: Vec<InvariantValue>,
    pub fit: FitDiagnostics,
    pub per_radius: Vec<RadiusRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPayload {
    pub kind: MatrixKind,
    /// entries[i][j] = [Re, Im]
    pub entries: [[[f64; 2]; 4]; 4],
    pub eigenvalues: [f64; 4],
    pub minors: [f64; 4],
    pub verdict: Verdict,
    pub band: f64,
    pub negative_definite: bool,
    pub corollary_margin: Option<f64>,
    /// entries (1-based "ij") built from the chart-dependent P_ν2, P_ν3
    pub chart_dependent: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QPayload {
    pub q1: MatrixPayload,
    pub q: MatrixPayload,
    /// max |boundary form − λ†Q1λ| / max(1, |λ†Q1λ|) over random λ
    pub boundary_form_defect: f64,
    pub boundary_samples: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityVariant {
    pub variant: Variant,
    pub max_gauss: f64,
    pub max_codazzi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityPayload {
    pub points: usize,
    pub variants: Vec<RigidityVariant>,
    pub tolerance: f64,
    pub zero_mass: bool,
    pub zero_mass_tolerance: f64,
    /// both variants' residuals below tolerance: the slice sits in AdS
    pub embeds_in_ads: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    None,
    Clifford(CliffordPayload),
    Killing(KillingPayload),
    Weitzenbock(WeitzenbockPayload),
    Decay(DecayPayload),
    EnergyConditions(EnergyPayload),
    Mass(MassPayload),
    QMatrices(QPayload),
    Rigidity(RigidityPayload),
}

pub(crate) struct Outcome {
    pub status: Status,
    pub message: Option<String>,
    pub payload: Payload,
}

impl Outcome {
    fn judged(pass: bool, payload: Payload, why: &str) -> Self {
        Self {
            status: if pass { Status::Pass } else { Status::Fail },
            message: (!pass).then(|| why.to_string()),
            payload,
        }
    }

    pub(crate) fn from_error(e: &Error) -> Self {
        let status = match e {
            Error::Config(_) => Status::Invalid,
            Error::NotConverged(_) => Status::NotConverged,
            Error::Domain(_) | Error::Data(_) => Status::Fail,
            Error::Contract(_) => Status::Error,
        };
        Self {
            status,
            message: Some(e.to_string()),
            payload: Payload::None,
        }
    }
}

/// One RNG stream per pipeline, so adding a pipeline does not shift the
/// samples of another.
fn rng_for(cfg: &RunConfig, pipeline: Pipeline) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(pipeline as u64 + 1);
    rng
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, r_min: f64, r_max: f64) -> Vec<Point> {
    (0..n)
        .map(|_| Point {
            r: rng.random_range(r_min..r_max),
            theta: rng.random_range(0.1..PI - 0.1),
            psi: rng.random_range(0.0..2.0 * PI),
        })
        .collect()
}

fn sample_points(cfg: &RunConfig, pipeline: Pipeline) -> Vec<Point> {
    let mut rng = rng_for(cfg, pipeline);
    let k = cfg.kappa;
    random_points(&mut rng, cfg.checks.points, cfg.checks.r_min / k, cfg.checks.r_max / k)
}

pub(crate) fn clifford(cfg: &RunConfig) -> Outcome {
    let s = clifford_suite();
    let tol = cfg.tolerances.clifford;
    let pass = s.exact && s.anticommutator_defect <= tol && s.hermiticity_defect <= tol;
    let payload = Payload::Clifford(CliffordPayload {
        pairs: s.pairs,
        exact: s.exact,
        anticommutator_defect: s.anticommutator_defect,
        hermiticity_defect: s.hermiticity_defect,
        tolerance: tol,
    });
    Outcome::judged(pass, payload, "Clifford relations violated")
}

/// Killing equations on the hyperbolic background of the configured κ.
pub(crate) fn killing(cfg: &RunConfig) -> Result<Outcome> {
    let k = cfg.kappa;
    let ads = family_ads(k)?;
    let mut rng = rng_for(cfg, Pipeline::Killing);
    let points = random_points(&mut rng, cfg.checks.points, cfg.checks.r_min / k, cfg.checks.r_max / k);
    let mut variants = Vec::new();
    for variant in Variant::ALL {
        let lambdas: Vec<[C64; 4]> = (0..points.len())
            .map(|_| std::array::from_fn(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        let per_point: Vec<(f64, f64)> = points
            .par_iter()
            .zip(&lambdas)
            .map(|(p, lam)| {
                let f = KillingField(KillingParams::new(*lam, variant, k));
                let mut worst: f64 = 0.0;
                for i in 0..3 {
                    worst = worst.max(killing_connection(&ads, &f, p, i, variant)?.norm());
                }
                Ok((worst, killing_gram_determinant(variant, k, p)))
            })
            .collect::<Result<_>>()?;
        variants.push(KillingVariantResult {
            variant,
            max_residual: per_point.iter().fold(0.0, |m, v| m.max(v.0)),
            min_gram_determinant: per_point.iter().fold(f64::INFINITY, |m, v| m.min(v.1)),
        });
    }
    let tol = cfg.tolerances.killing;
    let pass = variants.iter().all(|v| v.max_residual < tol && v.min_gram_determinant > 0.0);
    let payload = Payload::Killing(KillingPayload {
        points: points.len(),
        variants,
        tolerance: tol,
    });
    Ok(Outcome::judged(pass, payload, "Killing residual above tolerance or degenerate span"))
}

pub(crate) fn weitzenbock(cfg: &RunConfig, fam: &BuiltFamily) -> Result<Outcome> {
    let k = cfg.kappa;
    let (lo, hi) = (cfg.checks.r_min / k, cfg.checks.r_max / k);
    let (center, width) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let mut rng = rng_for(cfg, Pipeline::Weitzenbock);
    let step = cfg.checks.weitzenbock_step;
    let mut jobs = Vec::new();
    for variant in Variant::ALL {
        for field in 0..cfg.checks.weitzenbock_fields {
            let f = BumpField::random(&mut rng, center, width);
            let p = Point {
                r: center + 0.5 * width * rng.random_range(-1.0..1.0),
                theta: rng.random_range(0.3..PI - 0.3),
                psi: rng.random_range(0.0..2.0 * PI),
            };
            jobs.push((variant, field, f, p));
        }
    }
    let data = fam.data.as_ref();
    let samples: Vec<WeitzenbockSample> = jobs
        .par_iter()
        .map(|(variant, field, f, p)| {
            let a = weitzenbock_residual(data, f, p, *variant, step)?;
            let b = weitzenbock_residual(data, f, p, *variant, step / 2.0)?;
            Ok(WeitzenbockSample {
                variant: *variant,
                field: *field,
                point: [p.r, p.theta, p.psi],
                residual_step: a,
                residual_half_step: b,
                ratio: (b > 0.0).then(|| a / b),
            })
        })
        .collect::<Result<_>>()?;
    let band = [cfg.tolerances.weitzenbock_ratio_min, cfg.tolerances.weitzenbock_ratio_max];
    let pass = samples
        .iter()
        .all(|s| s.ratio.is_some_and(|r| r >= band[0] && r <= band[1]));
    let payload = Payload::Weitzenbock(WeitzenbockPayload {
        step,
        ratio_band: band,
        samples,
    });
    Ok(Outcome::judged(pass, payload, "step-halving ratio outside the second-order band"))
}

pub(crate) fn decay(cfg: &RunConfig, fam: &BuiltFamily) -> Outcome {
    let radii: Vec<f64> = cfg.decay.radii.iter().map(|r| r / cfg.kappa).collect();
    let rep = validate_decay(fam.data.as_ref(), &radii, cfg.decay.n_theta, cfg.decay.n_psi);
    let why = if rep.error.is_some() {
        "decay sampling failed"
    } else if !rep.tau_admissible {
        "declared decay rate does not exceed 3/2"
    } else {
        "weighted sups grow with r: data decay slower than declared"
    };
    let payload = Payload::Decay(DecayPayload {
        tau: rep.tau,
        tau_admissible: rep.tau_admissible,
        radii: rep.radii,
        slope_tolerance: crate::initial_data::DECAY_SLOPE_TOLERANCE,
        quantities: rep
            .quantities
            .into_iter()
            .map(|q| DecayQuantityOut {
                name: q.name.to_string(),
                sups: q.sups,
                log_slope: q.log_slope,
                bounded: q.bounded,
            })
            .collect(),
        error: rep.error,
    });
    Outcome::judged(rep.pass, payload, why)
}

fn random_sym(rng: &mut ChaCha8Rng, scale: f64) -> Sym3 {
    let v: [f64; 6] = std::array::from_fn(|_| rng.random_range(-scale..scale));
    Sym3::new(v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5])
}

/// Largest relative defect of the expanded energy identity on random
/// (Scal, h, κ).
pub fn energy_identity_sweep(rng: &mut ChaCha8Rng, samples: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let h = random_sym(rng, 3.0);
        let scal: f64 = rng.random_range(-20.0..20.0);
        let kappa: f64 = rng.random_range(0.1..3.0);
        let scale = 1.0 + scal.abs() + h.norm_squared() + h.trace().powi(2) + 6.0 * kappa * kappa;
        worst = worst.max(energy_identity_defect(scal, &h, kappa) / scale);
    }
    worst
}

pub(crate) fn energy_conditions(cfg: &RunConfig, fam: &BuiltFamily) -> Result<Outcome> {
    let mut rng = rng_for(cfg, Pipeline::EnergyConditions);
    let identity_max_defect = energy_identity_sweep(&mut rng, cfg.checks.identity_samples);
    let points = sample_points(cfg, Pipeline::EnergyConditions);
    let samples: Vec<EnergySample> = points
        .par_iter()
        .map(|p| {
            let c = constraint_densities(fam.data.as_ref(), p)?;
            let n = |v: &[f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            Ok(EnergySample {
                point: [p.r, p.theta, p.psi],
                mu: c.mu,
                omega_norm: n(&c.omega),
                margin: c.margin,
                rho: c.rho,
                momentum_norm: n(&c.momentum),
                margin_standard: c.margin_standard,
            })
        })
        .collect::<Result<_>>()?;
    let min_margin = samples.iter().fold(f64::INFINITY, |m, s| m.min(s.margin));
    let min_margin_standard = samples.iter().fold(f64::INFINITY, |m, s| m.min(s.margin_standard));
    let max_abs_mu = samples.iter().fold(0.0f64, |m, s| m.max(s.mu.abs()));
    let max_omega = samples.iter().fold(0.0f64, |m, s| m.max(s.omega_norm));
    let tol = cfg.tolerances.energy;
    let identity_ok = identity_max_defect <= cfg.tolerances.identity;
    let (pass, why) = if !identity_ok {
        (false, "energy identity defect above tolerance")
    } else if fam.vacuum {
        (max_abs_mu <= tol && max_omega <= tol, "vacuum data with nonzero energy or momentum density")
    } else {
        (min_margin >= -tol && min_margin_standard >= -tol, "dominant energy condition violated")
    };
    let payload = Payload::EnergyConditions(EnergyPayload {
        identity_samples: cfg.checks.identity_samples,
        identity_max_defect,
        identity_tolerance: cfg.tolerances.identity,
        vacuum: fam.vacuum,
        tolerance: tol,
        min_margin,
        min_margin_standard,
        max_abs_mu,
        max_omega,
        samples,
    });
    Ok(Outcome::judged(pass, payload, why))
}

pub(crate) fn compute_mass(cfg: &RunConfig, fam: &BuiltFamily) -> Result<EnergyMomentum> {
    energy_momentum(fam.data.as_ref(), &cfg.mass_config())
}

pub(crate) fn mass(cfg: &RunConfig, em: &EnergyMomentum) -> Outcome {
    let scale = em.beta.iter().fold(1.0f64, |m, b| m.max(b.abs()));
    let bookkeeping_defect = (0..4)
        .map(|nu| (em.beta[nu] - em.e[nu] - em.p[nu][0]).abs() / scale)
        .fold(0.0, f64::max);
    let margins = corollary_margins(em);
    let geometric_invariants = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
        .iter()
        .map(|&(c1, c2)| InvariantValue {
            c1,
            c2,
            value: geometric_invariant(em, c1, c2),
        })
        .collect();
    let tol = cfg.tolerances.bookkeeping;
    let payload = Payload::Mass(MassPayload {
        kappa: em.kappa,
        normalization: em.normalization,
        e: em.e,
        p: em.p,
        beta: em.beta,
        bookkeeping_defect,
        bookkeeping_tolerance: tol,
        margin_energy_momentum: margins.energy_momentum,
        margin_energy: margins.energy,
        geometric_invariants,
        fit: em.fit.clone(),
        per_radius: em.per_radius.clone(),
    });
    if !em.converged() {
        return Outcome {
            status: Status::NotConverged,
            message: em.require_converged().err().map(|e| e.to_string()),
            payload,
        };
    }
    Outcome::judged(bookkeeping_defect <= tol, payload, "β_ν differs from E_ν + P_ν1")
}

fn matrix_payload(h: &Hermitian4, chart_dependent: &[&str]) -> MatrixPayload {
    let rep = positivity_report(h);
    MatrixPayload {
        kind: h.kind,
        entries: std::array::from_fn(|i| std::array::from_fn(|j| [h.matrix[(i, j)].re, h.matrix[(i, j)].im])),
        eigenvalues: rep.eigenvalues,
        minors: rep.minors,
        verdict: rep.verdict,
        band: rep.band,
        negative_definite: rep.negative_definite,
        corollary_margin: rep.corollary_margin,
        chart_dependent: chart_dependent.iter().map(|s| s.to_string()).collect(),
    }
}

const Q_CHART_DEPENDENT: [&str; 8] = ["13", "14", "23", "24", "31", "32", "41", "42"];

pub(crate) fn q_matrices(cfg: &RunConfig, em: &EnergyMomentum) -> Result<Outcome> {
    let q1 = q1_matrix(em)?;
    let q = q2_matrix(em)?;
    let mut rng = rng_for(cfg, Pipeline::QMatrices);
    let mut defect: f64 = 0.0;
    for _ in 0..cfg.checks.boundary_samples {
        let l: [C64; 4] = std::array::from_fn(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let a = boundary_quadratic_form(em, &l);
        let b = q1.quadratic_form(&l);
        defect = defect.max((a - b).abs() / b.abs().max(1.0));
    }
    let q1p = matrix_payload(&q1, &[]);
    let qp = matrix_payload(&q, &Q_CHART_DEPENDENT);
    let tol = cfg.tolerances.bookkeeping;
    let pass = q1p.verdict != Verdict::Indefinite && qp.verdict != Verdict::Indefinite && defect <= tol;
    let why = if defect > tol {
        "boundary quadratic form differs from λ†Q1λ"
    } else {
        "mass matrix is indefinite"
    };
    let payload = Payload::QMatrices(QPayload {
        q1: q1p,
        q: qp,
        boundary_form_defect: defect,
        boundary_samples: cfg.checks.boundary_samples,
        tolerance: tol,
    });
    Ok(Outcome::judged(pass, payload, why))
}

/// Zero mass must coincide with the slice satisfying both rigidity systems.
pub(crate) fn rigidity(cfg: &RunConfig, fam: &BuiltFamily, em: &EnergyMomentum) -> Result<Outcome> {
    let points = sample_points(cfg, Pipeline::Rigidity);
    let mut variants = Vec::new();
    for variant in Variant::ALL {
        let res: Vec<(f64, f64)> = points
            .par_iter()
            .map(|p| {
                let r = rigidity_residuals(fam.data.as_ref(), p, variant)?;
                Ok((r.gauss, r.codazzi))
            })
            .collect::<Result<_>>()?;
        variants.push(RigidityVariant {
            variant,
            max_gauss: res.iter().fold(0.0, |m, v| m.max(v.0)),
            max_codazzi: res.iter().fold(0.0, |m, v| m.max(v.1)),
        });
    }
    let tol = cfg.tolerances.rigidity;
    let ztol = cfg.tolerances.zero_mass;
    let embeds_in_ads = variants.iter().all(|v| v.max_gauss < tol && v.max_codazzi < tol);
    let zero_mass = em.e.iter().chain(em.p.iter().flatten()).all(|x| x.abs() <= ztol);
    let pass = zero_mass == embeds_in_ads;
    let why = if zero_mass {
        "zero mass but the slice does not satisfy the rigidity equations"
    } else {
        "slice satisfies the rigidity equations but carries mass"
    };
    let payload = Payload::Rigidity(RigidityPayload {
        points: points.len(),
        variants,
        tolerance: tol,
        zero_mass,
        zero_mass_tolerance: ztol,
        embeds_in_ads,
    });
    Ok(Outcome::judged(pass, payload, why))
}
