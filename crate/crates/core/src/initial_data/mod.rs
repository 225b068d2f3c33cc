//! Asymptotically AdS initial data (M, g, h): the family trait, the built-in
//! families and the pointwise/sampled checks run against them.
//!
//! All tensors are hyperbolic-frame components: `metric` returns
//! a_ij = g(e̊_i, e̊_j) − δ_ij and `extrinsic` returns h(e̊_i, e̊_j).

mod checks;
mod families;

pub use checks::{
    constraint_densities, energy_identity_defect, rigidity_residuals, sample_sphere, validate_decay,
    ConstraintDensities, DecayQuantity, DecayReport, RigidityResiduals, DECAY_SLOPE_TOLERANCE,
};
pub use families::{
    family_ads, family_kottler, family_perturbation, registry, Ads, FamilyInfo, HProfile, Kottler,
    Mode, Perturbation,
};

use std::sync::Arc;

use crate::error::Result;
use crate::geometry::{fd_jet1, fd_jet2, Point, Sym3, TensorJet1, TensorJet2};

/// Default relative step of the centred-difference jets.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Which of the two Killing structures a check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// e₀-Killing spinors, ∇̂ = ∇ + (κ/2)e₀·e_i·.
    E0Killing,
    /// Imaginary Killing spinors, ∇̂ = ∇ + (iκ/2)e_i·.
    Imaginary,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::E0Killing, Variant::Imaginary];

    pub fn label(self) -> &'static str {
        match self {
            Variant::E0Killing => "e0_killing",
            Variant::Imaginary => "imaginary",
        }
    }
}

pub trait InitialData: Send + Sync {
    fn name(&self) -> &str;
    fn kappa(&self) -> f64;
    /// Declared decay rate τ of a and h.
    fn tau(&self) -> f64;
    /// Numeric parameters, for reports.
    fn params(&self) -> Vec<(String, f64)> {
        Vec::new()
    }

    fn metric(&self, p: &Point) -> Result<Sym3>;
    fn extrinsic(&self, p: &Point) -> Result<Sym3>;

    /// a with coordinate partials up to second order. Defaults to centred
    /// differences of [`InitialData::metric`].
    fn metric_jet(&self, p: &Point) -> Result<TensorJet2> {
        fd_jet2(|q| self.metric(q), p, DEFAULT_FD_STEP)
    }

    /// h with first coordinate partials. Defaults to centred differences.
    fn extrinsic_jet(&self, p: &Point) -> Result<TensorJet1> {
        fd_jet1(|q| self.extrinsic(q), p, DEFAULT_FD_STEP)
    }
}

impl<T: InitialData + ?Sized> InitialData for Arc<T> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn kappa(&self) -> f64 {
        (**self).kappa()
    }
    fn tau(&self) -> f64 {
        (**self).tau()
    }
    fn params(&self) -> Vec<(String, f64)> {
        (**self).params()
    }
    fn metric(&self, p: &Point) -> Result<Sym3> {
        (**self).metric(p)
    }
    fn extrinsic(&self, p: &Point) -> Result<Sym3> {
        (**self).extrinsic(p)
    }
    fn metric_jet(&self, p: &Point) -> Result<TensorJet2> {
        (**self).metric_jet(p)
    }
    fn extrinsic_jet(&self, p: &Point) -> Result<TensorJet1> {
        (**self).extrinsic_jet(p)
    }
}

/// Wraps a family so that its jets come from centred differences with the
/// given step, ignoring any analytic derivatives.
#[derive(Debug, Clone)]
pub struct Differenced<F> {
    pub inner: F,
    pub step: f64,
}

impl<F: InitialData> Differenced<F> {
    pub fn new(inner: F, step: f64) -> Self {
        Self { inner, step }
    }
}

impl<F: InitialData> InitialData for Differenced<F> {
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn kappa(&self) -> f64 {
        self.inner.kappa()
    }
    fn tau(&self) -> f64 {
        self.inner.tau()
    }
    fn params(&self) -> Vec<(String, f64)> {
        self.inner.params()
    }
    fn metric(&self, p: &Point) -> Result<Sym3> {
        self.inner.metric(p)
    }
    fn extrinsic(&self, p: &Point) -> Result<Sym3> {
        self.inner.extrinsic(p)
    }
    fn metric_jet(&self, p: &Point) -> Result<TensorJet2> {
        fd_jet2(|q| self.inner.metric(q), p, self.step)
    }
    fn extrinsic_jet(&self, p: &Point) -> Result<TensorJet1> {
        fd_jet1(|q| self.inner.extrinsic(q), p, self.step)
    }
}

type TensorFn = Box<dyn Fn(&Point) -> Result<Sym3> + Send + Sync>;

/// A family given by closures, with finite-difference jets. Used for test
/// fixtures that do not decay (e.g. umbilic slices h = κg).
pub struct FnFamily {
    name: String,
    kappa: f64,
    tau: f64,
    metric: TensorFn,
    extrinsic: TensorFn,
}

impl FnFamily {
    pub fn new<A, H>(name: &str, kappa: f64, tau: f64, metric: A, extrinsic: H) -> Self
    where
        A: Fn(&Point) -> Result<Sym3> + Send + Sync + 'static,
        H: Fn(&Point) -> Result<Sym3> + Send + Sync + 'static,
    {
        Self {
            name: name.to_string(),
            kappa,
            tau,
            metric: Box::new(metric),
            extrinsic: Box::new(extrinsic),
        }
    }
}

impl std::fmt::Debug for FnFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnFamily")
            .field("name", &self.name)
            .field("kappa", &self.kappa)
            .field("tau", &self.tau)
            .finish_non_exhaustive()
    }
}

impl InitialData for FnFamily {
    fn name(&self) -> &str {
        &self.name
    }
    fn kappa(&self) -> f64 {
        self.kappa
    }
    fn tau(&self) -> f64 {
        self.tau
    }
    fn metric(&self, p: &Point) -> Result<Sym3> {
        (self.metric)(p)
    }
    fn extrinsic(&self, p: &Point) -> Result<Sym3> {
        (self.extrinsic)(p)
    }
}
