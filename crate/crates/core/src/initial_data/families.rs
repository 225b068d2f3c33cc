use serde::{Deserialize, Serialize};

use super::InitialData;
use crate::error::{Error, Result};
use crate::geometry::{Point, Sym3, TensorJet1, TensorJet2};
use crate::quadrature::GaussLegendre;

/// Registry entry describing a built-in family and its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub params: Vec<(&'static str, &'static str)>,
}

pub fn registry() -> Vec<FamilyInfo> {
    vec![
        FamilyInfo {
            name: "ads",
            description: "t-slice of anti-de Sitter space: hyperbolic 3-space, a = 0, h = 0",
            params: vec![("kappa", "inverse AdS radius, > 0"), ("tau", "declared decay rate (default 3)")],
        },
        FamilyInfo {
            name: "kottler",
            description: "static slice of Schwarzschild-AdS in geodesic hyperboloidal coordinates, h = 0",
            params: vec![("kappa", "inverse AdS radius, > 0"), ("mass", "mass parameter m >= 0")],
        },
        FamilyInfo {
            name: "perturbation",
            description: "a = eps e^{-rate kappa r} q(theta, psi), h = eta e^{-rate kappa r} s(theta, psi)",
            params: vec![
                ("kappa", "inverse AdS radius, > 0"),
                ("tau", "declared decay rate, > 3/2"),
                ("eps", "metric amplitude"),
                ("mode", "isotropic | radial | tangential | dipole | shear"),
                ("eta", "extrinsic curvature amplitude"),
                ("h_profile", "none | radial | isotropic | shear"),
                ("profile_rate", "actual radial rate (default tau)"),
            ],
        },
    ]
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("kappa must be positive, got {kappa}")))
    }
}

/// Hyperbolic 3-space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ads {
    kappa: f64,
    tau: f64,
}

pub fn family_ads(kappa: f64) -> Result<Ads> {
    check_kappa(kappa)?;
    Ok(Ads { kappa, tau: 3.0 })
}

impl Ads {
    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }
}

impl InitialData for Ads {
    fn name(&self) -> &str {
        "ads"
    }
    fn kappa(&self) -> f64 {
        self.kappa
    }
    fn tau(&self) -> f64 {
        self.tau
    }
    fn metric(&self, p: &Point) -> Result<Sym3> {
        p.validate()?;
        Ok(Sym3::zeros())
    }
    fn extrinsic(&self, p: &Point) -> Result<Sym3> {
        p.validate()?;
        Ok(Sym3::zeros())
    }
    fn metric_jet(&self, p: &Point) -> Result<TensorJet2> {
        p.validate()?;
        Ok(TensorJet2::zero())
    }
    fn extrinsic_jet(&self, p: &Point) -> Result<TensorJet1> {
        p.validate()?;
        Ok(TensorJet1::zero())
    }
}

/// The static Schwarzschild–AdS slice g = dρ²/V + ρ² dΩ², V = 1 − 2m/ρ + κ²ρ²,
/// in geodesic coordinates s with ρ(s) = sinh(κ(s + δ(s)))/κ and δ → 0 at
/// infinity, so that g = ds² + R(s)² κ⁻² sinh²(κs) dΩ².
#[derive(Debug, Clone)]
pub struct Kottler {
    m: f64,
    kappa: f64,
    r_h: f64,
    delta_h: f64,
    s_h: f64,
    gl: GaussLegendre,
}

/// Radial quantities of the Kottler chart at geodesic radius s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KottlerRadial {
    /// areal radius ρ
    pub rho: f64,
    /// δ = asinh(κρ)/κ − s
    pub delta: f64,
    /// a₂₂ = a₃₃ = R² − 1 and its first two s-derivatives
    pub a: f64,
    pub da: f64,
    pub dda: f64,
}

pub fn family_kottler(m: f64, kappa: f64) -> Result<Kottler> {
    check_kappa(kappa)?;
    if !(m.is_finite() && m >= 0.0) {
        return Err(Error::Domain(format!("mass must be nonnegative, got {m}")));
    }
    let mut k = Kottler {
        m,
        kappa,
        r_h: 0.0,
        delta_h: 0.0,
        s_h: 0.0,
        gl: GaussLegendre::new(40),
    };
    if m > 0.0 {
        k.r_h = horizon_radius(m, kappa);
        k.delta_h = k.delta_tilde(k.r_h);
        k.s_h = (kappa * k.r_h).asinh() / kappa - k.delta_h;
    }
    Ok(k)
}

/// Positive root of κ²ρ³ + ρ − 2m.
fn horizon_radius(m: f64, kappa: f64) -> f64 {
    let k2 = kappa * kappa;
    let mut r = (2.0 * m).min((2.0 * m / k2).cbrt());
    for _ in 0..100 {
        let f = k2 * r * r * r + r - 2.0 * m;
        let step = f / (3.0 * k2 * r * r + 1.0);
        r -= step;
        if step.abs() <= 1e-16 * r {
            break;
        }
    }
    r
}

impl Kottler {
    pub fn mass(&self) -> f64 {
        self.m
    }

    /// Areal radius of the horizon.
    pub fn horizon_radius(&self) -> f64 {
        self.r_h
    }

    /// Geodesic coordinate of the horizon; points need s > s_h.
    pub fn horizon_coordinate(&self) -> f64 {
        self.s_h
    }

    fn v_w(&self, x: f64) -> (f64, f64) {
        let k2x2 = self.kappa * self.kappa * x * x;
        (1.0 - 2.0 * self.m / x + k2x2, 1.0 + k2x2)
    }

    /// δ̃(ρ) = ∫_ρ^∞ (V^{-1/2} − W^{-1/2}) dx, W = 1 + κ²x².
    pub fn delta_tilde(&self, rho: f64) -> f64 {
        if self.m == 0.0 {
            return 0.0;
        }
        let k2 = self.kappa * self.kappa;
        let r_h = self.r_h;
        let big_x = (2.0 * rho).max(rho + 1.0 / self.kappa);
        // x = r_h + u², where V = u² Q / x.
        let inner = |u: f64| {
            let x = r_h + u * u;
            let q = k2 * (x * x + r_h * x + r_h * r_h) + 1.0;
            let sv_over_u = (q / x).sqrt();
            let sw = (1.0 + k2 * x * x).sqrt();
            (4.0 * self.m / x) / (sv_over_u * sw * (u * sv_over_u + sw))
        };
        let u0 = (rho - r_h).max(0.0).sqrt();
        let u1 = (big_x - r_h).sqrt();
        let um = 0.5 * (u0 + u1);
        let near = self.gl.integrate(u0, um, inner) + self.gl.integrate(um, u1, inner);
        // x = X / t on (0, 1]
        let tail = self.gl.integrate(0.0, 1.0, |t| {
            if t == 0.0 {
                return 0.0;
            }
            let x = big_x / t;
            let (v, w) = self.v_w(x);
            let (sv, sw) = (v.sqrt(), w.sqrt());
            (2.0 * self.m / x) / (sv * sw * (sv + sw)) * big_x / (t * t)
        });
        near + tail
    }

    /// Solve δ = δ̃(sinh(κ(s+δ))/κ) by safeguarded Newton.
    fn delta(&self, s: f64) -> Result<f64> {
        if self.m == 0.0 {
            return Ok(0.0);
        }
        if s <= self.s_h {
            return Err(Error::Domain(format!(
                "r = {s} lies inside the horizon (r_h = {})",
                self.s_h
            )));
        }
        let kappa = self.kappa;
        let s_h0 = (kappa * self.r_h).asinh() / kappa;
        let mut lo = (s_h0 - s).max(0.0);
        let mut hi = self.delta_h;
        let g = |d: f64| {
            let rho = (kappa * (s + d)).sinh() / kappa;
            d - self.delta_tilde(rho.max(self.r_h))
        };
        let mut d = self
            .delta_tilde(((kappa * s).sinh() / kappa).max(self.r_h))
            .clamp(lo, hi);
        for _ in 0..200 {
            let gd = g(d);
            if gd > 0.0 {
                hi = d;
            } else {
                lo = d;
            }
            let rho = ((kappa * (s + d)).sinh() / kappa).max(self.r_h);
            let (v, w) = self.v_w(rho);
            let (sv, sw) = (v.max(0.0).sqrt(), w.sqrt());
            let dg = 1.0 + (2.0 * self.m / rho) / (sv * sw * (sv + sw)) * (kappa * (s + d)).cosh();
            let mut next = d - gd / dg;
            if !next.is_finite() || next <= lo || next >= hi {
                next = 0.5 * (lo + hi);
            }
            let step = (next - d).abs();
            d = next;
            if step <= 1e-15 * d.abs() || hi - lo <= 1e-15 * d.abs() {
                break;
            }
        }
        Ok(d)
    }

    /// Radial profile at geodesic radius s.
    pub fn radial(&self, s: f64) -> Result<KottlerRadial> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {s}")));
        }
        let kappa = self.kappa;
        let delta = self.delta(s)?;
        let u = s + delta;
        let rho = (kappa * u).sinh() / kappa;
        if self.m == 0.0 {
            return Ok(KottlerRadial {
                rho,
                delta,
                a: 0.0,
                da: 0.0,
                dda: 0.0,
            });
        }
        let (v, w) = self.v_w(rho);
        let (sv, sw) = (v.max(0.0).sqrt(), w.sqrt());
        let d1 = -(2.0 * self.m / rho) / (sw * (sw + sv));
        let d2 = self.m * (1.0 + 3.0 * kappa * kappa * rho * rho) / (rho * rho * w * sw);
        let (shs, chs) = ((kappa * s).sinh(), (kappa * s).cosh());
        let (shu, chu) = ((kappa * u).sinh(), (kappa * u).cosh());
        let (shd, chd) = ((kappa * delta).sinh(), (kappa * delta).cosh());
        let half = (0.5 * kappa * delta).sinh();
        let r_minus_1 = 2.0 * half * half + chs / shs * shd;
        let r = 1.0 + r_minus_1;
        let n = d1 * chu * shs - shd;
        let dn = d2 * chu * shs + kappa * d1 * (1.0 + d1) * shu * shs + kappa * d1 * chu * chs
            - kappa * d1 * chd;
        let dr = kappa * n / (shs * shs);
        let ddr = kappa * (dn * shs - 2.0 * kappa * n * chs) / (shs * shs * shs);
        Ok(KottlerRadial {
            rho,
            delta,
            a: r_minus_1 * (r + 1.0),
            da: 2.0 * r * dr,
            dda: 2.0 * (dr * dr + r * ddr),
        })
    }
}

impl InitialData for Kottler {
    fn name(&self) -> &str {
        "kottler"
    }
    fn kappa(&self) -> f64 {
        self.kappa
    }
    fn tau(&self) -> f64 {
        3.0
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![("mass".into(), self.m)]
    }
    fn metric(&self, p: &Point) -> Result<Sym3> {
        p.validate()?;
        let rad = self.radial(p.r)?;
        Ok(Sym3::from_diagonal(&[0.0, rad.a, rad.a].into()))
    }
    fn extrinsic(&self, p: &Point) -> Result<Sym3> {
        p.validate()?;
        self.radial(p.r)?;
        Ok(Sym3::zeros())
    }
    fn metric_jet(&self, p: &Point) -> Result<TensorJet2> {
        p.validate()?;
        let rad = self.radial(p.r)?;
        let diag = |x: f64| Sym3::from_diagonal(&[0.0, x, x].into());
        let mut jet = TensorJet2::zero();
        jet.value = diag(rad.a);
        jet.d[0] = diag(rad.da);
        jet.dd[0][0] = diag(rad.dda);
        Ok(jet)
    }
    fn extrinsic_jet(&self, p: &Point) -> Result<TensorJet1> {
        p.validate()?;
        self.radial(p.r)?;
        Ok(TensorJet1::zero())
    }
}

/// Angular pattern q_ij(θ, ψ) of the metric perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// q = δ
    Isotropic,
    /// q = diag(1, 0, 0)
    Radial,
    /// q = diag(0, 1, 1)
    Tangential,
    /// q = diag(0, 1, 1) cosθ
    Dipole,
    /// q₁₂ = q₂₁ = n¹ = sinθ cosψ
    Shear,
}

/// Angular pattern s_ij(θ, ψ) of the extrinsic curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HProfile {
    None,
    /// s = diag(1, 0, 0)
    Radial,
    /// s = δ
    Isotropic,
    /// s₁₂ = s₂₁ = n¹
    Shear,
}

/// Pattern value and its (θ, ψ) partials, packed as coordinate jets.
struct Pattern {
    value: Sym3,
    d: [Sym3; 3],
    dd: [[Sym3; 3]; 3],
}

impl Pattern {
    fn constant(value: Sym3) -> Self {
        Self {
            value,
            d: [Sym3::zeros(); 3],
            dd: [[Sym3::zeros(); 3]; 3],
        }
    }

    fn scaled_by(base: Sym3, f: f64, df: [f64; 3], ddf: [[f64; 3]; 3]) -> Self {
        let mut d = [Sym3::zeros(); 3];
        let mut dd = [[Sym3::zeros(); 3]; 3];
        for mu in 0..3 {
            d[mu] = base * df[mu];
            for nu in 0..3 {
                dd[mu][nu] = base * ddf[mu][nu];
            }
        }
        Self {
            value: base * f,
            d,
            dd,
        }
    }
}

fn shear_base() -> Sym3 {
    let mut b = Sym3::zeros();
    b[(0, 1)] = 1.0;
    b[(1, 0)] = 1.0;
    b
}

fn n1_jet(p: &Point) -> (f64, [f64; 3], [[f64; 3]; 3]) {
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.psi.sin_cos();
    let f = st * cp;
    let df = [0.0, ct * cp, -st * sp];
    let mut ddf = [[0.0; 3]; 3];
    ddf[1][1] = -st * cp;
    ddf[1][2] = -ct * sp;
    ddf[2][1] = -ct * sp;
    ddf[2][2] = -st * cp;
    (f, df, ddf)
}

fn mode_pattern(mode: Mode, p: &Point) -> Pattern {
    let diag = |a: f64, b: f64, c: f64| Sym3::from_diagonal(&[a, b, c].into());
    match mode {
        Mode::Isotropic => Pattern::constant(Sym3::identity()),
        Mode::Radial => Pattern::constant(diag(1.0, 0.0, 0.0)),
        Mode::Tangential => Pattern::constant(diag(0.0, 1.0, 1.0)),
        Mode::Dipole => {
            let (st, ct) = p.theta.sin_cos();
            let mut ddf = [[0.0; 3]; 3];
            ddf[1][1] = -ct;
            Pattern::scaled_by(diag(0.0, 1.0, 1.0), ct, [0.0, -st, 0.0], ddf)
        }
        Mode::Shear => {
            let (f, df, ddf) = n1_jet(p);
            Pattern::scaled_by(shear_base(), f, df, ddf)
        }
    }
}

fn h_pattern(profile: HProfile, p: &Point) -> Pattern {
    match profile {
        HProfile::None => Pattern::constant(Sym3::zeros()),
        HProfile::Radial => Pattern::constant(Sym3::from_diagonal(&[1.0, 0.0, 0.0].into())),
        HProfile::Isotropic => Pattern::constant(Sym3::identity()),
        HProfile::Shear => {
            let (f, df, ddf) = n1_jet(p);
            Pattern::scaled_by(shear_base(), f, df, ddf)
        }
    }
}

/// a = ε e^{−λκr} q(θ,ψ), h = η e^{−λκr} s(θ,ψ) with λ = `rate` (τ unless
/// overridden for decay-failure fixtures).
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    kappa: f64,
    tau: f64,
    rate: f64,
    eps: f64,
    mode: Mode,
    eta: f64,
    h_profile: HProfile,
}

pub fn family_perturbation(eps: f64, tau: f64, mode: Mode, kappa: f64) -> Result<Perturbation> {
    check_kappa(kappa)?;
    if !(tau.is_finite() && tau > 1.5) {
        return Err(Error::Domain(format!("decay rate must exceed 3/2, got {tau}")));
    }
    if !eps.is_finite() {
        return Err(Error::Domain("amplitude must be finite".into()));
    }
    Ok(Perturbation {
        kappa,
        tau,
        rate: tau,
        eps,
        mode,
        eta: 0.0,
        h_profile: HProfile::None,
    })
}

impl Perturbation {
    pub fn with_extrinsic(mut self, profile: HProfile, eta: f64) -> Self {
        self.h_profile = profile;
        self.eta = eta;
        self
    }

    /// Override the actual radial decay rate while keeping the declared τ.
    pub fn with_profile_rate(mut self, rate: f64) -> Self {
        self.rate = rate;
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn h_profile(&self) -> HProfile {
        self.h_profile
    }

    fn radial(&self, r: f64) -> (f64, f64, f64) {
        let k = self.rate * self.kappa;
        let f = (-k * r).exp();
        (f, -k * f, k * k * f)
    }

    fn check_metric(&self, a: &Sym3) -> Result<()> {
        let m = Sym3::identity() + a;
        if m.symmetric_eigenvalues().iter().all(|&l| l > 0.0) {
            Ok(())
        } else {
            Err(Error::Data("perturbed metric is not positive definite".into()))
        }
    }
}

impl InitialData for Perturbation {
    fn name(&self) -> &str {
        "perturbation"
    }
    fn kappa(&self) -> f64 {
        self.kappa
    }
    fn tau(&self) -> f64 {
        self.tau
    }
    fn params(&self) -> Vec<(String, f64)> {
        vec![
            ("eps".into(), self.eps),
            ("eta".into(), self.eta),
            ("profile_rate".into(), self.rate),
        ]
    }
    fn metric(&self, p: &Point) -> Result<Sym3> {
        Ok(self.metric_jet(p)?.value)
    }
    fn extrinsic(&self, p: &Point) -> Result<Sym3> {
        Ok(self.extrinsic_jet(p)?.value)
    }
    fn metric_jet(&self, p: &Point) -> Result<TensorJet2> {
        p.validate()?;
        let (f, df, ddf) = self.radial(p.r);
        let q = mode_pattern(self.mode, p);
        let e = self.eps;
        let mut jet = TensorJet2::zero();
        jet.value = q.value * (e * f);
        for mu in 0..3 {
            let fr = if mu == 0 { df } else { 0.0 };
            jet.d[mu] = (q.d[mu] * f + q.value * fr) * e;
        }
        for mu in 0..3 {
            for nu in 0..3 {
                let mut t = q.dd[mu][nu] * f;
                if mu == 0 && nu == 0 {
                    t += q.value * ddf;
                } else if mu == 0 {
                    t += q.d[nu] * df;
                } else if nu == 0 {
                    t += q.d[mu] * df;
                }
                jet.dd[mu][nu] = t * e;
            }
        }
        self.check_metric(&jet.value)?;
        Ok(jet)
    }
    fn extrinsic_jet(&self, p: &Point) -> Result<TensorJet1> {
        p.validate()?;
        let (f, df, _) = self.radial(p.r);
        let s = h_pattern(self.h_profile, p);
        let mut jet = TensorJet1::zero();
        jet.value = s.value * (self.eta * f);
        for mu in 0..3 {
            let fr = if mu == 0 { df } else { 0.0 };
            jet.d[mu] = (s.d[mu] * f + s.value * fr) * self.eta;
        }
        Ok(jet)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fd_jet2;

    #[test]
    fn horizon_is_root() {
        for (m, k) in [(1.0, 1.0), (0.5, 0.5), (2.0, 0.5), (2.0, 1.0)] {
            let r = horizon_radius(m, k);
            assert!((k * k * r * r * r + r - 2.0 * m).abs() < 1e-13, "m={m} k={k}");
        }
    }

    #[test]
    fn kottler_zero_mass_is_ads() {
        let k = family_kottler(0.0, 1.0).unwrap();
        let p = Point::new(2.0, 1.0, 0.5).unwrap();
        assert_eq!(k.metric(&p).unwrap(), Sym3::zeros());
    }

    #[test]
    fn kottler_inside_horizon_is_domain_error() {
        let k = family_kottler(1.0, 1.0).unwrap();
        let p = Point::new(0.9 * k.horizon_coordinate(), 1.0, 0.0);
        match p {
            Ok(p) => assert!(matches!(k.metric(&p), Err(Error::Domain(_)))),
            Err(e) => assert!(matches!(e, Error::Domain(_))),
        }
    }

    #[test]
    fn kottler_areal_radius_solves_the_chart_equation() {
        let k = family_kottler(1.0, 1.0).unwrap();
        for s in [1.5, 3.0, 6.0] {
            let rad = k.radial(s).unwrap();
            let lhs = rad.rho.asinh() - k.delta_tilde(rad.rho);
            assert!((lhs - s).abs() < 1e-13, "s={s}: {lhs}");
        }
    }

    #[test]
    fn kottler_analytic_jet_matches_differences() {
        let k = family_kottler(1.0, 0.7).unwrap();
        let p = Point::new(3.0, 1.1, 0.2).unwrap();
        let an = k.metric_jet(&p).unwrap();
        let fd = fd_jet2(|q| k.metric(q), &p, 1e-3).unwrap();
        let scale = an.d[0][(1, 1)].abs();
        assert!((an.d[0] - fd.d[0]).amax() < 1e-5 * scale);
        assert!((an.dd[0][0] - fd.dd[0][0]).amax() < 1e-4 * an.dd[0][0].amax());
    }

    #[test]
    fn perturbation_analytic_jet_matches_differences() {
        for mode in [Mode::Isotropic, Mode::Dipole, Mode::Shear, Mode::Tangential] {
            let f = family_perturbation(0.3, 2.0, mode, 1.0)
                .unwrap()
                .with_extrinsic(HProfile::Shear, 0.2);
            let p = Point::new(1.3, 0.9, 2.1).unwrap();
            let an = f.metric_jet(&p).unwrap();
            let fd = fd_jet2(|q| f.metric(q), &p, 1e-4).unwrap();
            for mu in 0..3 {
                assert!((an.d[mu] - fd.d[mu]).amax() < 1e-7, "{mode:?} d{mu}");
                for nu in 0..3 {
                    assert!((an.dd[mu][nu] - fd.dd[mu][nu]).amax() < 1e-5, "{mode:?} dd{mu}{nu}");
                }
            }
        }
    }

    #[test]
    fn perturbation_rejects_slow_declared_decay() {
        assert!(family_perturbation(0.1, 1.5, Mode::Radial, 1.0).is_err());
    }

    #[test]
    fn degenerate_perturbation_is_data_error() {
        let f = family_perturbation(-2.0, 2.0, Mode::Isotropic, 1.0).unwrap();
        let p = Point::new(0.1, 1.0, 0.0).unwrap();
        assert!(matches!(f.metric(&p), Err(Error::Data(_))));
    }
}
