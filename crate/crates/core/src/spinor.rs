//! Killing spinors of hyperbolic space, the hypersurface spin connections of
//! an initial data set, Dirac–Witten operators and the Weitzenböck identity
//! D̂*D̂ = ∇̂*∇̂ + 𝓡̂.
//!
//! Frame directions are 0-based here: direction `i` is e_{i+1}, acting by
//! Clifford multiplication with γ_{i+1}.

use nalgebra::Matrix4;
use rand::Rng;

use crate::clifford::{gamma, Spinor, C64};
use crate::error::{Error, Result};
use crate::geometry::{fd_steps, riemann, CovariantH, Point, SliceGeometry};
use crate::initial_data::{InitialData, Variant};

const I: C64 = C64::new(0.0, 1.0);

/// Sign of the spin lift ∇̄φ = dφ + SPIN_SIGN·¼ Σ_kl Γ_ikl γ_k γ_l φ.
/// Fixed by requiring the closed-form Killing families to be Killing on H³.
pub const SPIN_SIGN: f64 = 1.0;

/// Sign relating 2R̃₀ᵢ to 2(∇̄^j h_ij − ∇̄_i tr h). Fixed by the Weitzenböck
/// identity on data with nonzero extrinsic curvature.
pub const MOMENTUM_SIGN: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KillingParams {
    pub lambda: [C64; 4],
    pub variant: Variant,
    pub kappa: f64,
}

impl KillingParams {
    pub fn new(lambda: [C64; 4], variant: Variant, kappa: f64) -> Self {
        Self { lambda, variant, kappa }
    }

    pub fn basis(k: usize, variant: Variant, kappa: f64) -> Self {
        let mut lambda = [C64::new(0.0, 0.0); 4];
        lambda[k] = C64::new(1.0, 0.0);
        Self::new(lambda, variant, kappa)
    }
}

/// λ(t) for the time-dependent imaginary Killing spinors: rotations by κt/2
/// in the (C₁, C₃) and (C₂, C₄) planes.
pub fn lambda_at_time(c: [C64; 4], t: f64, kappa: f64) -> [C64; 4] {
    let (s, co) = (0.5 * kappa * t).sin_cos();
    [
        c[0] * co + c[2] * s,
        c[1] * co + c[3] * s,
        c[2] * co - c[0] * s,
        c[3] * co - c[1] * s,
    ]
}

/// An angular factor with its θ and ψ partials.
#[derive(Clone, Copy)]
struct Ang {
    v: C64,
    dth: C64,
    dps: C64,
}

struct Half {
    p: C64,
    m: C64,
    s: f64,
    c: f64,
}

impl Half {
    fn at(p: &Point) -> Self {
        let (s, c) = (0.5 * p.theta).sin_cos();
        Self {
            p: C64::from_polar(1.0, 0.5 * p.psi),
            m: C64::from_polar(1.0, -0.5 * p.psi),
            s,
            c,
        }
    }

    /// α e^{iψ/2} sin(θ/2) + β e^{−iψ/2} cos(θ/2)
    fn u(&self, a: C64, b: C64) -> Ang {
        Ang {
            v: a * self.p * self.s + b * self.m * self.c,
            dth: 0.5 * (a * self.p * self.c - b * self.m * self.s),
            dps: 0.5 * I * (a * self.p * self.s - b * self.m * self.c),
        }
    }

    /// β e^{−iψ/2} sin(θ/2) − α e^{iψ/2} cos(θ/2)
    fn w(&self, a: C64, b: C64) -> Ang {
        Ang {
            v: b * self.m * self.s - a * self.p * self.c,
            dth: 0.5 * (b * self.m * self.c + a * self.p * self.s),
            dps: 0.5 * I * (-b * self.m * self.s - a * self.p * self.c),
        }
    }
}

/// Value and coordinate partials of one spinor component.
#[derive(Clone, Copy, Default)]
struct Comp {
    v: C64,
    d: [C64; 3],
}

impl Comp {
    /// coef · ang · e^{sign κr/2}
    fn term(ang: Ang, coef: C64, sign: f64, p: &Point, kappa: f64) -> Self {
        let e = (sign * 0.5 * kappa * p.r).exp();
        let v = coef * ang.v * e;
        Self {
            v,
            d: [v * (sign * 0.5 * kappa), coef * ang.dth * e, coef * ang.dps * e],
        }
    }

    fn plus(self, o: Comp) -> Comp {
        Comp {
            v: self.v + o.v,
            d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2]],
        }
    }
}

fn killing_components(params: &KillingParams, p: &Point) -> [Comp; 4] {
    let h = Half::at(p);
    let l = params.lambda;
    let k = params.kappa;
    let one = C64::new(1.0, 0.0);
    match params.variant {
        Variant::E0Killing => [
            Comp::term(h.u(l[0], l[1]), one, -1.0, p, k),
            Comp::term(h.w(l[0], l[1]), one, 1.0, p, k),
            Comp::term(h.u(l[2], l[3]), one, 1.0, p, k),
            Comp::term(h.w(l[2], l[3]), one, -1.0, p, k),
        ],
        Variant::Imaginary => {
            let up = h.u(l[0], l[1]);
            let um = h.u(l[2], l[3]);
            // v± pair sin(θ/2) with the e^{−iψ/2} coefficient, as in the
            // e₀-Killing family; the θ-equation couples v± to u∓.
            let vp = h.w(l[2], l[3]);
            let vm = h.w(l[0], l[1]);
            [
                Comp::term(up, one, 1.0, p, k).plus(Comp::term(um, one, -1.0, p, k)),
                Comp::term(vp, one, 1.0, p, k).plus(Comp::term(vm, one, -1.0, p, k)),
                Comp::term(up, -I, 1.0, p, k).plus(Comp::term(um, I, -1.0, p, k)),
                Comp::term(vp, I, 1.0, p, k).plus(Comp::term(vm, -I, -1.0, p, k)),
            ]
        }
    }
}

/// Closed-form e₀-Killing spinor of H³ with constants λ.
pub fn e0_killing_spinor(lambda: [C64; 4], kappa: f64, p: &Point) -> Spinor {
    killing_spinor(&KillingParams::new(lambda, Variant::E0Killing, kappa), p)
}

/// Closed-form imaginary Killing spinor of H³ with constants λ.
pub fn imaginary_killing_spinor(lambda: [C64; 4], kappa: f64, p: &Point) -> Spinor {
    killing_spinor(&KillingParams::new(lambda, Variant::Imaginary, kappa), p)
}

pub fn killing_spinor(params: &KillingParams, p: &Point) -> Spinor {
    let c = killing_components(params, p);
    Spinor::new([c[0].v, c[1].v, c[2].v, c[3].v])
}

/// Coordinate partials (∂_r, ∂_θ, ∂_ψ) of the closed-form Killing spinor.
pub fn killing_spinor_partials(params: &KillingParams, p: &Point) -> [Spinor; 3] {
    let c = killing_components(params, p);
    std::array::from_fn(|mu| Spinor::new([c[0].d[mu], c[1].d[mu], c[2].d[mu], c[3].d[mu]]))
}

/// Gram determinant det⟨Φ_a, Φ_b⟩ of the four basis Killing spinors at `p`.
/// Nonzero iff they span the spinor space there.
pub fn killing_gram_determinant(variant: Variant, kappa: f64, p: &Point) -> f64 {
    let cols: [Spinor; 4] = std::array::from_fn(|k| killing_spinor(&KillingParams::basis(k, variant, kappa), p));
    let g = Matrix4::from_fn(|a, b| crate::clifford::inner_pos(&cols[a], &cols[b]));
    g.determinant().re
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Global,
    /// Vanishes outside r_min < r < r_max.
    Shell { r_min: f64, r_max: f64 },
}

/// A spinor field on the chart, with coordinate partials.
pub trait SpinorField: Send + Sync {
    fn value(&self, p: &Point) -> Result<Spinor>;
    /// (∂_r, ∂_θ, ∂_ψ) φ
    fn partials(&self, p: &Point) -> Result<[Spinor; 3]>;
    fn support(&self) -> Support {
        Support::Global
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KillingField(pub KillingParams);

impl SpinorField for KillingField {
    fn value(&self, p: &Point) -> Result<Spinor> {
        p.validate()?;
        Ok(killing_spinor(&self.0, p))
    }
    fn partials(&self, p: &Point) -> Result<[Spinor; 3]> {
        p.validate()?;
        Ok(killing_spinor_partials(&self.0, p))
    }
}

/// Replaces a field's partials by centred differences of its values.
#[derive(Debug, Clone)]
pub struct DifferencedField<F> {
    pub inner: F,
    pub step: f64,
}

impl<F: SpinorField> SpinorField for DifferencedField<F> {
    fn value(&self, p: &Point) -> Result<Spinor> {
        self.inner.value(p)
    }
    fn partials(&self, p: &Point) -> Result<[Spinor; 3]> {
        let hs = fd_steps(p, self.step);
        let mut out = [Spinor::ZERO; 3];
        for mu in 0..3 {
            let plus = self.inner.value(&p.shifted(mu, hs[mu]))?;
            let minus = self.inner.value(&p.shifted(mu, -hs[mu]))?;
            out[mu] = (plus - minus) * (0.5 / hs[mu]);
        }
        Ok(out)
    }
    fn support(&self) -> Support {
        self.inner.support()
    }
}

/// φ_a = P_a(r, cosθ, sinθ cosψ, sinθ sinψ) · b(r), with P_a complex
/// polynomials of degree ≤ 2 and b a smooth bump supported in
/// |r − center| < width.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpField {
    /// coeffs[a][m] multiplies monomial m of [`BumpField::monomials`]
    pub coeffs: [[C64; 10]; 4],
    pub center: f64,
    pub width: f64,
}

impl BumpField {
    pub fn random<R: Rng>(rng: &mut R, center: f64, width: f64) -> Self {
        let mut coeffs = [[C64::new(0.0, 0.0); 10]; 4];
        for row in coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        Self { coeffs, center, width }
    }

    /// Monomials 1, x_k, x_k x_l (k ≤ l) in x = (r, cosθ, sinθcosψ, sinθsinψ)
    /// restricted to degree ≤ 2 in a fixed order, with coordinate partials.
    fn monomials(p: &Point) -> [(f64, [f64; 3]); 10] {
        let (st, ct) = p.theta.sin_cos();
        let (sp, cp) = p.psi.sin_cos();
        let x = [p.r, ct, st * cp, st * sp];
        let dx = [
            [1.0, 0.0, 0.0],
            [0.0, -st, 0.0],
            [0.0, ct * cp, -st * sp],
            [0.0, ct * sp, st * cp],
        ];
        let mut out = [(0.0, [0.0; 3]); 10];
        out[0] = (1.0, [0.0; 3]);
        for k in 0..4 {
            out[1 + k] = (x[k], dx[k]);
        }
        let pairs = [(0, 0), (0, 1), (1, 2), (2, 3), (0, 3)];
        for (n, &(k, l)) in pairs.iter().enumerate() {
            let d = std::array::from_fn(|mu| dx[k][mu] * x[l] + x[k] * dx[l][mu]);
            out[5 + n] = (x[k] * x[l], d);
        }
        out
    }

    fn bump(&self, r: f64) -> (f64, f64) {
        let z = (r - self.center) / self.width;
        if z.abs() >= 1.0 {
            return (0.0, 0.0);
        }
        let q = 1.0 - z * z;
        let b = (-1.0 / q).exp();
        // d/dr exp(−1/q) = exp(−1/q) · (−2z / q²) / width
        (b, b * (-2.0 * z / (q * q)) / self.width)
    }
}

impl SpinorField for BumpField {
    fn value(&self, p: &Point) -> Result<Spinor> {
        p.validate()?;
        let (b, _) = self.bump(p.r);
        let mons = Self::monomials(p);
        Ok(Spinor::new(std::array::from_fn(|a| {
            self.coeffs[a].iter().zip(&mons).map(|(c, m)| c * m.0).sum::<C64>() * b
        })))
    }
    fn partials(&self, p: &Point) -> Result<[Spinor; 3]> {
        p.validate()?;
        let (b, db) = self.bump(p.r);
        let mons = Self::monomials(p);
        Ok(std::array::from_fn(|mu| {
            Spinor::new(std::array::from_fn(|a| {
                let mut acc = C64::new(0.0, 0.0);
                for (c, m) in self.coeffs[a].iter().zip(&mons) {
                    acc += c * m.1[mu] * b;
                    if mu == 0 {
                        acc += c * m.0 * db;
                    }
                }
                acc
            }))
        }))
    }
    fn support(&self) -> Support {
        Support::Shell {
            r_min: self.center - self.width,
            r_max: self.center + self.width,
        }
    }
}

fn gamma_matrix(alpha: usize) -> Matrix4<C64> {
    gamma(alpha).expect("generator index in range").matrix
}

/// Pointwise spin-connection operators built on a [`SliceGeometry`].
#[derive(Debug, Clone, Copy)]
pub struct SpinFrame {
    pub geo: SliceGeometry,
}

impl SpinFrame {
    pub fn new(data: &dyn InitialData, p: &Point) -> Result<Self> {
        Ok(Self {
            geo: SliceGeometry::new(data, p)?,
        })
    }

    /// e_i(φ) from coordinate partials.
    pub fn frame_derivative(&self, i: usize, d: &[Spinor; 3]) -> Spinor {
        let f = &self.geo.frame;
        d[0] * f[(i, 0)] + d[1] * f[(i, 1)] + d[2] * f[(i, 2)]
    }

    /// ∇̄_i φ, the spin lift of the Levi-Civita connection of g.
    pub fn nabla_bar(&self, i: usize, phi: &Spinor, d: &[Spinor; 3]) -> Spinor {
        let mut out = self.frame_derivative(i, d);
        for k in 0..3 {
            for l in 0..3 {
                let c = self.geo.conn[i][k][l];
                if c != 0.0 && k != l {
                    out += phi.gamma(l + 1).gamma(k + 1) * (0.25 * SPIN_SIGN * c);
                }
            }
        }
        out
    }

    /// −½ Σ_j h_ij γ₀γ_j φ
    fn h_term(&self, i: usize, phi: &Spinor) -> Spinor {
        let mut out = Spinor::ZERO;
        for j in 0..3 {
            let h = self.geo.h[(i, j)];
            if h != 0.0 {
                out += phi.e0_ei(j + 1) * (-0.5 * h);
            }
        }
        out
    }

    /// ∇_i φ = ∇̄_i φ − ½ h_ij γ₀γ_j φ.
    pub fn nabla(&self, i: usize, phi: &Spinor, d: &[Spinor; 3]) -> Spinor {
        self.nabla_bar(i, phi, d) + self.h_term(i, phi)
    }

    /// Killing term: (κ/2)γ₀γ_i φ or (iκ/2)γ_i φ.
    pub fn killing_term(&self, i: usize, phi: &Spinor, variant: Variant) -> Spinor {
        let k = self.geo.kappa;
        match variant {
            Variant::E0Killing => phi.e0_ei(i + 1) * (0.5 * k),
            Variant::Imaginary => phi.gamma(i + 1) * (0.5 * k * I),
        }
    }

    /// ∇̂_i φ = ∇_i φ + Killing term.
    pub fn nabla_hat(&self, i: usize, phi: &Spinor, d: &[Spinor; 3], variant: Variant) -> Spinor {
        self.nabla(i, phi, d) + self.killing_term(i, phi, variant)
    }

    /// D = Σ γ_k ∇_k.
    pub fn dirac(&self, phi: &Spinor, d: &[Spinor; 3]) -> Spinor {
        (0..3).fold(Spinor::ZERO, |acc, k| acc + self.nabla(k, phi, d).gamma(k + 1))
    }

    /// D̂ = Σ γ_k ∇̂_k.
    pub fn dirac_witten(&self, phi: &Spinor, d: &[Spinor; 3], variant: Variant) -> Spinor {
        (0..3).fold(Spinor::ZERO, |acc, k| {
            acc + self.nabla_hat(k, phi, d, variant).gamma(k + 1)
        })
    }
}

fn field_at(field: &dyn SpinorField, p: &Point) -> Result<(Spinor, [Spinor; 3])> {
    Ok((field.value(p)?, field.partials(p)?))
}

fn check_direction(i: usize) -> Result<()> {
    if i < 3 {
        Ok(())
    } else {
        Err(Error::Domain(format!("frame direction must be 0, 1 or 2, got {i}")))
    }
}

/// ∇_i φ at `p` for the hypersurface connection of (g, h).
pub fn hypersurface_nabla(data: &dyn InitialData, field: &dyn SpinorField, p: &Point, i: usize) -> Result<Spinor> {
    check_direction(i)?;
    let sf = SpinFrame::new(data, p)?;
    let (phi, d) = field_at(field, p)?;
    Ok(sf.nabla(i, &phi, &d))
}

/// ∇̂_i φ at `p` for the requested Killing structure.
pub fn killing_connection(
    data: &dyn InitialData,
    field: &dyn SpinorField,
    p: &Point,
    i: usize,
    variant: Variant,
) -> Result<Spinor> {
    check_direction(i)?;
    let sf = SpinFrame::new(data, p)?;
    let (phi, d) = field_at(field, p)?;
    Ok(sf.nabla_hat(i, &phi, &d, variant))
}

/// D̂φ at `p`.
pub fn dirac_witten(data: &dyn InitialData, field: &dyn SpinorField, p: &Point, variant: Variant) -> Result<Spinor> {
    let sf = SpinFrame::new(data, p)?;
    let (phi, d) = field_at(field, p)?;
    Ok(sf.dirac_witten(&phi, &d, variant))
}

/// Dφ at `p` (no Killing term).
pub fn hypersurface_dirac(data: &dyn InitialData, field: &dyn SpinorField, p: &Point) -> Result<Spinor> {
    let sf = SpinFrame::new(data, p)?;
    let (phi, d) = field_at(field, p)?;
    Ok(sf.dirac(&phi, &d))
}

/// 𝓡̂ from scalar curvature and first-order slice geometry:
/// ¼[(Scal + (tr h)² − |h|² + 6κ² − 4κ tr h·[E₀]) I + 2R̃₀ᵢ γ₀γᵢ].
pub fn endomorphism_from(scal: f64, geo: &SliceGeometry, variant: Variant) -> Matrix4<C64> {
    let h = geo.h;
    let k = geo.kappa;
    let tr = h.trace();
    let mut scalar = scal + tr * tr - h.norm_squared() + 6.0 * k * k;
    if variant == Variant::E0Killing {
        scalar -= 4.0 * k * tr;
    }
    let cov = CovariantH::from_tensor(geo.nabla_h);
    let g0 = gamma_matrix(0);
    let mut m = Matrix4::<C64>::identity() * C64::new(scalar, 0.0);
    for i in 0..3 {
        let r0i = MOMENTUM_SIGN * 2.0 * (cov.divergence[i] - cov.grad_trace[i]);
        m += g0 * gamma_matrix(i + 1) * C64::new(r0i, 0.0);
    }
    m * C64::new(0.25, 0.0)
}

pub fn curvature_endomorphism(data: &dyn InitialData, p: &Point, variant: Variant) -> Result<Matrix4<C64>> {
    let scal = riemann(data, p)?.scalar();
    let geo = SliceGeometry::new(data, p)?;
    Ok(endomorphism_from(scal, &geo, variant))
}

/// ‖D̂*D̂φ − ∇̂*∇̂φ − 𝓡̂φ‖ at `p`. The second derivatives come from centred
/// differences (step `fd_step`, scaled as in [`fd_steps`]) of the fields
/// ∇̂_iφ and D̂φ, whose own first derivatives use the field's partials.
pub fn weitzenbock_residual(
    data: &dyn InitialData,
    field: &dyn SpinorField,
    p: &Point,
    variant: Variant,
    fd_step: f64,
) -> Result<f64> {
    Ok(weitzenbock_defect(data, field, p, variant, fd_step)?.norm())
}

/// The spinor D̂*D̂φ − ∇̂*∇̂φ − 𝓡̂φ.
pub fn weitzenbock_defect(
    data: &dyn InitialData,
    field: &dyn SpinorField,
    p: &Point,
    variant: Variant,
    fd_step: f64,
) -> Result<Spinor> {
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return Err(Error::Config(format!("finite-difference step must be positive, got {fd_step}")));
    }
    // ψ_i = ∇̂_iφ for i = 0..3 and χ = D̂φ at a point
    let first = |q: &Point| -> Result<[Spinor; 4]> {
        let sf = SpinFrame::new(data, q)?;
        let (phi, d) = field_at(field, q)?;
        let psi: [Spinor; 3] = std::array::from_fn(|i| sf.nabla_hat(i, &phi, &d, variant));
        let chi = (0..3).fold(Spinor::ZERO, |acc, k| acc + psi[k].gamma(k + 1));
        Ok([psi[0], psi[1], psi[2], chi])
    };
    let hs = fd_steps(p, fd_step);
    let center = first(p)?;
    let mut partials = [[Spinor::ZERO; 3]; 4]; // [field][mu]
    for mu in 0..3 {
        let plus = first(&p.shifted(mu, hs[mu]))?;
        let minus = first(&p.shifted(mu, -hs[mu]))?;
        for f in 0..4 {
            partials[f][mu] = (plus[f] - minus[f]) * (0.5 / hs[mu]);
        }
    }
    let sf = SpinFrame::new(data, p)?;
    let kappa = data.kappa();
    let chi = center[3];
    let mut lhs = sf.dirac_witten(&chi, &partials[3], variant);
    if variant == Variant::Imaginary {
        lhs += chi * (3.0 * kappa * I);
    }
    let mut rough = Spinor::ZERO;
    for i in 0..3 {
        let psi = center[i];
        rough -= sf.nabla(i, &psi, &partials[i]);
        for j in 0..3 {
            let h = sf.geo.h[(i, j)];
            if h != 0.0 {
                rough -= psi.e0_ei(j + 1) * h;
            }
        }
        for k in 0..3 {
            rough += center[k] * sf.geo.conn[i][i][k];
        }
        rough += sf.killing_term(i, &psi, variant);
    }
    let scal = riemann(data, p)?.scalar();
    let endo = endomorphism_from(scal, &sf.geo, variant);
    let phi = field.value(p)?;
    Ok(lhs - rough - &endo * phi)
}
