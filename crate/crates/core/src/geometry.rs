//! Hyperbolic background geometry and a curvature engine for metrics
//! g = g̊ + a given by frame components in the hyperboloidal polar chart
//! (r, θ, ψ), where g̊ = dr² + κ⁻² sinh²(κr) (dθ² + sin²θ dψ²).
//!
//! Index conventions: coordinate slots are 0 = r, 1 = θ, 2 = ψ; frame slots
//! 0, 1, 2 stand for e₁, e₂, e₃. Curvature follows
//! R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z with frame components arranged so
//! that R_ijij is the sectional curvature K(e_i, e_j); hyperbolic space has
//! R_ijkl = −κ²(δ_ik δ_jl − δ_il δ_jk).

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::initial_data::InitialData;

pub type Sym3 = Matrix3<f64>;
pub type Tensor3 = [[[f64; 3]; 3]; 3];
pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];

const Z3: Tensor3 = [[[0.0; 3]; 3]; 3];
const Z4: Tensor4 = [[[[0.0; 3]; 3]; 3]; 3];

/// A point of the chart. `psi` may range over [0, 4π) for spinor-valued
/// evaluations; tensor quantities are 2π-periodic in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub r: f64,
    pub theta: f64,
    pub psi: f64,
}

impl Point {
    pub fn new(r: f64, theta: f64, psi: f64) -> Result<Self> {
        let p = Self { r, theta, psi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {}", self.r)));
        }
        if !(self.theta > 0.0 && self.theta < std::f64::consts::PI) {
            return Err(Error::Domain(format!(
                "colatitude must lie strictly inside (0, π), got {}",
                self.theta
            )));
        }
        if !self.psi.is_finite() {
            return Err(Error::Domain("longitude must be finite".into()));
        }
        Ok(())
    }

    /// Shift coordinate `mu` by `h`.
    pub fn shifted(&self, mu: usize, h: f64) -> Self {
        let mut q = *self;
        match mu {
            0 => q.r += h,
            1 => q.theta += h,
            _ => q.psi += h,
        }
        q
    }

    /// Unit-sphere position n^i = (sinθ cosψ, sinθ sinψ, cosθ), with n⁰ = 1.
    pub fn n(&self) -> [f64; 4] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.psi.sin_cos();
        [1.0, st * cp, st * sp, ct]
    }
}

/// Default centred-difference steps: `step·max(1, r)` in r, `step` in angles.
pub fn fd_steps(p: &Point, step: f64) -> [f64; 3] {
    [step * p.r.max(1.0), step, step]
}

/// Frame components of a symmetric tensor with first coordinate partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorJet1 {
    pub value: Sym3,
    pub d: [Sym3; 3],
}

/// Frame components of a symmetric tensor with first and second coordinate
/// partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorJet2 {
    pub value: Sym3,
    pub d: [Sym3; 3],
    pub dd: [[Sym3; 3]; 3],
}

impl TensorJet1 {
    pub fn zero() -> Self {
        Self {
            value: Sym3::zeros(),
            d: [Sym3::zeros(); 3],
        }
    }
}

impl TensorJet2 {
    pub fn zero() -> Self {
        Self {
            value: Sym3::zeros(),
            d: [Sym3::zeros(); 3],
            dd: [[Sym3::zeros(); 3]; 3],
        }
    }
}

/// Centred-difference first-order jet of a tensor-valued function.
pub fn fd_jet1<F>(f: F, p: &Point, step: f64) -> Result<TensorJet1>
where
    F: Fn(&Point) -> Result<Sym3>,
{
    let value = f(p)?;
    let hs = fd_steps(p, step);
    let mut d = [Sym3::zeros(); 3];
    for mu in 0..3 {
        let plus = f(&p.shifted(mu, hs[mu]))?;
        let minus = f(&p.shifted(mu, -hs[mu]))?;
        d[mu] = (plus - minus) / (2.0 * hs[mu]);
    }
    Ok(TensorJet1 { value, d })
}

/// Centred-difference second-order jet of a tensor-valued function.
pub fn fd_jet2<F>(f: F, p: &Point, step: f64) -> Result<TensorJet2>
where
    F: Fn(&Point) -> Result<Sym3>,
{
    let value = f(p)?;
    let hs = fd_steps(p, step);
    let mut d = [Sym3::zeros(); 3];
    let mut dd = [[Sym3::zeros(); 3]; 3];
    for mu in 0..3 {
        let plus = f(&p.shifted(mu, hs[mu]))?;
        let minus = f(&p.shifted(mu, -hs[mu]))?;
        d[mu] = (plus - minus) / (2.0 * hs[mu]);
        dd[mu][mu] = (plus - value * 2.0 + minus) / (hs[mu] * hs[mu]);
    }
    for mu in 0..3 {
        for nu in (mu + 1)..3 {
            let q = |s: f64, t: f64| f(&p.shifted(mu, s * hs[mu]).shifted(nu, t * hs[nu]));
            let mixed = (q(1.0, 1.0)? - q(1.0, -1.0)? - q(-1.0, 1.0)? + q(-1.0, -1.0)?)
                / (4.0 * hs[mu] * hs[nu]);
            dd[mu][nu] = mixed;
            dd[nu][mu] = mixed;
        }
    }
    Ok(TensorJet2 { value, d, dd })
}

/// Coordinate coefficients of the hyperbolic orthonormal frame and coframe.
///
/// `frame[i][mu]` is the ∂_mu component of e̊_{i+1}; `coframe[i][mu]` is the
/// dx^mu component of e̊^{i+1}. The static lapse cosh(κr) gives e̊₀ and e̊⁰.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicFrame {
    pub frame: [[f64; 3]; 3],
    pub coframe: [[f64; 3]; 3],
    pub lapse: f64,
}

pub fn hyperbolic_frame(p: &Point, kappa: f64) -> Result<HyperbolicFrame> {
    p.validate()?;
    let w = Warp::at(p, kappa);
    let mut frame = [[0.0; 3]; 3];
    let mut coframe = [[0.0; 3]; 3];
    for i in 0..3 {
        frame[i][i] = 1.0 / w.c[i];
        coframe[i][i] = w.c[i];
    }
    Ok(HyperbolicFrame {
        frame,
        coframe,
        lapse: (kappa * p.r).cosh(),
    })
}

/// Coframe scale factors e̊^i = c_i dx^i, c = (1, S, S sinθ), S = sinh(κr)/κ,
/// with coordinate partials `dc[mu][i]` and `ddc[mu][nu][i]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Warp {
    pub c: [f64; 3],
    pub dc: [[f64; 3]; 3],
    pub ddc: [[[f64; 3]; 3]; 3],
}

impl Warp {
    pub fn at(p: &Point, kappa: f64) -> Self {
        let (sh, ch) = ((kappa * p.r).sinh(), (kappa * p.r).cosh());
        let s = sh / kappa;
        let (st, ct) = p.theta.sin_cos();
        let c = [1.0, s, s * st];
        let mut dc = [[0.0; 3]; 3];
        dc[0] = [0.0, ch, ch * st];
        dc[1] = [0.0, 0.0, s * ct];
        let mut ddc = [[[0.0; 3]; 3]; 3];
        ddc[0][0] = [0.0, kappa * sh, kappa * sh * st];
        ddc[0][1] = [0.0, 0.0, ch * ct];
        ddc[1][0] = ddc[0][1];
        ddc[1][1] = [0.0, 0.0, -s * st];
        Self { c, dc, ddc }
    }
}

/// Levi-Civita connection of g̊ in the frame {e̊_i}:
/// `gamma[m][p][q] = ⟨∇̊_{e̊_m} e̊_p, e̊_q⟩`, and its coordinate partials
/// `d_gamma[mu][m][p][q]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundConnection {
    pub gamma: Tensor3,
    pub d_gamma: [Tensor3; 3],
}

pub fn hyperbolic_connection(p: &Point, kappa: f64) -> Result<BackgroundConnection> {
    p.validate()?;
    let kr = kappa * p.r;
    let (sh, ch) = (kr.sinh(), kr.cosh());
    let (st, ct) = p.theta.sin_cos();
    let coth = kappa * ch / sh;
    let cot_over_s = kappa * (ct / st) / sh;
    let mut gamma = Z3;
    gamma[1][1][0] = -coth;
    gamma[1][0][1] = coth;
    gamma[2][2][0] = -coth;
    gamma[2][0][2] = coth;
    gamma[2][2][1] = -cot_over_s;
    gamma[2][1][2] = cot_over_s;

    let dr_coth = -kappa * kappa / (sh * sh);
    let dr_t = -kappa * kappa * (ct / st) * ch / (sh * sh);
    let dth_t = -kappa / (st * st * sh);
    let mut d_gamma = [Z3; 3];
    d_gamma[0][1][1][0] = -dr_coth;
    d_gamma[0][1][0][1] = dr_coth;
    d_gamma[0][2][2][0] = -dr_coth;
    d_gamma[0][2][0][2] = dr_coth;
    d_gamma[0][2][2][1] = -dr_t;
    d_gamma[0][2][1][2] = dr_t;
    d_gamma[1][2][2][1] = -dth_t;
    d_gamma[1][2][1][2] = dth_t;
    Ok(BackgroundConnection { gamma, d_gamma })
}

/// Frame components R_ijkl with R_ijij = K(e_i, e_j).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureTensor {
    pub r: Tensor4,
}

impl CurvatureTensor {
    /// R_ijkl = −κ²(δ_ik δ_jl − δ_il δ_jk).
    pub fn constant(kappa: f64) -> Self {
        let mut r = Z4;
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        r[i][j][k][l] = -kappa * kappa * (d(i, k) * d(j, l) - d(i, l) * d(j, k));
                    }
                }
            }
        }
        Self { r }
    }

    pub fn max_abs(&self) -> f64 {
        iter4(&self.r).fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Double trace Σ_ij R_ijij.
    pub fn scalar(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.r[i][j][i][j];
            }
        }
        s
    }

    /// Max residual of the pair antisymmetries and the pair-swap symmetry.
    pub fn symmetry_residual(&self) -> f64 {
        let r = &self.r;
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        m = m
                            .max((r[i][j][k][l] + r[j][i][k][l]).abs())
                            .max((r[i][j][k][l] + r[i][j][l][k]).abs())
                            .max((r[i][j][k][l] - r[k][l][i][j]).abs());
                    }
                }
            }
        }
        m
    }

    /// Max residual of R_ijkl + R_jkil + R_kijl.
    pub fn bianchi_residual(&self) -> f64 {
        let r = &self.r;
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        m = m.max((r[i][j][k][l] + r[j][k][i][l] + r[k][i][j][l]).abs());
                    }
                }
            }
        }
        m
    }

    pub fn max_diff(&self, other: &CurvatureTensor) -> f64 {
        iter4(&self.r)
            .zip(iter4(&other.r))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

pub(crate) fn iter4(t: &Tensor4) -> impl Iterator<Item = f64> + '_ {
    t.iter().flatten().flatten().flatten().copied()
}

pub(crate) fn iter3(t: &Tensor3) -> impl Iterator<Item = f64> + '_ {
    t.iter().flatten().flatten().copied()
}

/// Coordinate metric G_μν = c_μ c_ν (δ + a)_μν with first and second partials.
struct CoordinateMetric {
    g: Sym3,
    dg: [Sym3; 3],
    ddg: [[Sym3; 3]; 3],
}

impl CoordinateMetric {
    fn new(a: &TensorJet2, w: &Warp) -> Self {
        let m = Sym3::identity() + a.value;
        let mut g = Sym3::zeros();
        let mut dg = [Sym3::zeros(); 3];
        let mut ddg = [[Sym3::zeros(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let cc = w.c[i] * w.c[j];
                g[(i, j)] = m[(i, j)] * cc;
                for mu in 0..3 {
                    let dcc = w.dc[mu][i] * w.c[j] + w.c[i] * w.dc[mu][j];
                    dg[mu][(i, j)] = a.d[mu][(i, j)] * cc + m[(i, j)] * dcc;
                    for nu in 0..3 {
                        let dncc = w.dc[nu][i] * w.c[j] + w.c[i] * w.dc[nu][j];
                        let ddcc = w.ddc[mu][nu][i] * w.c[j]
                            + w.dc[mu][i] * w.dc[nu][j]
                            + w.dc[nu][i] * w.dc[mu][j]
                            + w.c[i] * w.ddc[mu][nu][j];
                        ddg[mu][nu][(i, j)] = a.dd[mu][nu][(i, j)] * cc
                            + a.d[mu][(i, j)] * dncc
                            + a.d[nu][(i, j)] * dcc
                            + m[(i, j)] * ddcc;
                    }
                }
            }
        }
        Self { g, dg, ddg }
    }
}

/// Coordinate Christoffel symbols `gamma[l][m][n] = Γ^l_mn` and, when
/// second partials are supplied, `d_gamma[rho][l][m][n] = ∂_rho Γ^l_mn`.
struct Christoffel {
    gamma: Tensor3,
    d_gamma: [Tensor3; 3],
}

impl Christoffel {
    fn new(cm: &CoordinateMetric, ginv: &Sym3) -> Self {
        let mut first = Z3; // Γ_smn
        for s in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    first[s][m][n] =
                        0.5 * (cm.dg[m][(s, n)] + cm.dg[n][(s, m)] - cm.dg[s][(m, n)]);
                }
            }
        }
        let mut gamma = Z3;
        for l in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    gamma[l][m][n] = (0..3).map(|s| ginv[(l, s)] * first[s][m][n]).sum();
                }
            }
        }
        let mut d_gamma = [Z3; 3];
        for rho in 0..3 {
            for l in 0..3 {
                for m in 0..3 {
                    for n in 0..3 {
                        let mut acc = 0.0;
                        for s in 0..3 {
                            let d_first = 0.5
                                * (cm.ddg[rho][m][(s, n)] + cm.ddg[rho][n][(s, m)]
                                    - cm.ddg[rho][s][(m, n)]);
                            acc += ginv[(l, s)] * d_first;
                            // −G^{ls} ∂_ρ G_{sb} Γ^b_mn
                            for b in 0..3 {
                                acc -= ginv[(l, s)] * cm.dg[rho][(s, b)] * gamma[b][m][n];
                            }
                        }
                        d_gamma[rho][l][m][n] = acc;
                    }
                }
            }
        }
        Self { gamma, d_gamma }
    }
}

/// g-orthonormal frame e_i = Σ_p B_ip e̊_p with B = (I + a)^{-1/2} and its
/// coordinate partials.
struct OrthonormalFrame {
    b: Sym3,
    db: [Sym3; 3],
}

impl OrthonormalFrame {
    fn new(a: &TensorJet2) -> Result<Self> {
        let m = Sym3::identity() + a.value;
        let eig = SymmetricEigen::new(m);
        let lam = eig.eigenvalues;
        if lam.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::Data(format!(
                "metric is not positive definite (eigenvalues {:?})",
                lam.as_slice()
            )));
        }
        let q = eig.eigenvectors;
        let sq = lam.map(f64::sqrt);
        let b = q * Sym3::from_diagonal(&sq.map(|s| 1.0 / s)) * q.transpose();
        // Daleckii–Krein: divided differences of x^{-1/2}.
        let mut dd = Sym3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                dd[(i, j)] = -1.0 / (sq[i] * sq[j] * (sq[i] + sq[j]));
            }
        }
        let mut db = [Sym3::zeros(); 3];
        for mu in 0..3 {
            let dm = q.transpose() * a.d[mu] * q;
            db[mu] = q * dm.component_mul(&dd) * q.transpose();
        }
        Ok(Self { b, db })
    }
}

/// Riemann tensor of g = (δ + a) e̊^i ⊗ e̊^j at `p`, in the g-orthonormal
/// frame obtained by symmetric orthonormalisation of {e̊_i}.
pub fn riemann(data: &dyn InitialData, p: &Point) -> Result<CurvatureTensor> {
    p.validate()?;
    let a = data.metric_jet(p)?;
    riemann_from_jet(&a, p, data.kappa())
}

pub(crate) fn riemann_from_jet(a: &TensorJet2, p: &Point, kappa: f64) -> Result<CurvatureTensor> {
    let w = Warp::at(p, kappa);
    let cm = CoordinateMetric::new(a, &w);
    let det = cm.g.determinant();
    if !(det > 0.0) {
        return Err(Error::Data(format!("degenerate metric, det = {det}")));
    }
    let ginv = cm
        .g
        .try_inverse()
        .ok_or_else(|| Error::Data("metric not invertible".into()))?;
    let ch = Christoffel::new(&cm, &ginv);
    let frame = OrthonormalFrame::new(a)?;

    // R^ρ_σμν
    let mut up = Z4;
    for rho in 0..3 {
        for s in 0..3 {
            for mu in 0..3 {
                for nu in 0..3 {
                    let mut v = ch.d_gamma[mu][rho][nu][s] - ch.d_gamma[nu][rho][mu][s];
                    for l in 0..3 {
                        v += ch.gamma[rho][mu][l] * ch.gamma[l][nu][s]
                            - ch.gamma[rho][nu][l] * ch.gamma[l][mu][s];
                    }
                    up[rho][s][mu][nu] = v;
                }
            }
        }
    }
    // ⟨R(∂μ,∂ν)∂σ, ∂τ⟩ stored as low[μ][ν][σ][τ]
    let mut low = Z4;
    for mu in 0..3 {
        for nu in 0..3 {
            for s in 0..3 {
                for t in 0..3 {
                    low[mu][nu][s][t] = (0..3).map(|rho| cm.g[(t, rho)] * up[rho][s][mu][nu]).sum();
                }
            }
        }
    }
    // E_i^μ = B_iμ / c_μ
    let e = Sym3::from_fn(|i, mu| frame.b[(i, mu)] / w.c[mu]);
    let contract = |t: &Tensor4, slot: usize| -> Tensor4 {
        let mut out = Z4;
        for x0 in 0..3 {
            for x1 in 0..3 {
                for x2 in 0..3 {
                    for x3 in 0..3 {
                        let idx = [x0, x1, x2, x3];
                        let mut acc = 0.0;
                        for m in 0..3 {
                            let mut src = idx;
                            src[slot] = m;
                            acc += e[(idx[slot], m)] * t[src[0]][src[1]][src[2]][src[3]];
                        }
                        out[x0][x1][x2][x3] = acc;
                    }
                }
            }
        }
        out
    };
    let mut f = low;
    for slot in 0..4 {
        f = contract(&f, slot);
    }
    // f[i][j][s][t] = ⟨R(e_i,e_j)e_s, e_t⟩; R_ijkl = ⟨R(e_i,e_j)e_l, e_k⟩
    let mut r = Z4;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    r[i][j][k][l] = f[i][j][l][k];
                }
            }
        }
    }
    Ok(CurvatureTensor { r })
}

pub fn scalar_curvature(data: &dyn InitialData, p: &Point) -> Result<f64> {
    Ok(riemann(data, p)?.scalar())
}

/// Background covariant derivatives ∇̊a, ∇̊∇̊a and ∇̊h in the frame {e̊_i}.
///
/// `nabla_a[k][i][j] = ∇̊_k a_ij`, `nabla2_a[l][k][i][j] = ∇̊_l ∇̊_k a_ij`,
/// `nabla_h[k][i][j] = ∇̊_k h_ij`.
#[derive(Debug, Clone, Copy)]
pub struct BackgroundDerivatives {
    pub a: Sym3,
    pub h: Sym3,
    pub nabla_a: Tensor3,
    pub nabla2_a: Tensor4,
    pub nabla_h: Tensor3,
}

pub fn background_derivatives(data: &dyn InitialData, p: &Point) -> Result<BackgroundDerivatives> {
    p.validate()?;
    let kappa = data.kappa();
    let a = data.metric_jet(p)?;
    let h = data.extrinsic_jet(p)?;
    let w = Warp::at(p, kappa);
    let bg = hyperbolic_connection(p, kappa)?;
    let gm = &bg.gamma;

    let first = |t: &Sym3, d: &[Sym3; 3]| -> Tensor3 {
        let mut out = Z3;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut v = d[k][(i, j)] / w.c[k];
                    for m in 0..3 {
                        v -= gm[k][i][m] * t[(m, j)] + gm[k][j][m] * t[(i, m)];
                    }
                    out[k][i][j] = v;
                }
            }
        }
        out
    };
    let nabla_a = first(&a.value, &a.d);
    let nabla_h = first(&h.value, &h.d);

    // ∂_l (∇̊_k a_ij)
    let mut d_nabla = [Z3; 3];
    for l in 0..3 {
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut v = a.dd[l][k][(i, j)] / w.c[k]
                        - w.dc[l][k] / (w.c[k] * w.c[k]) * a.d[k][(i, j)];
                    for m in 0..3 {
                        v -= bg.d_gamma[l][k][i][m] * a.value[(m, j)]
                            + gm[k][i][m] * a.d[l][(m, j)]
                            + bg.d_gamma[l][k][j][m] * a.value[(i, m)]
                            + gm[k][j][m] * a.d[l][(i, m)];
                    }
                    d_nabla[l][k][i][j] = v;
                }
            }
        }
    }
    let mut nabla2_a = Z4;
    for l in 0..3 {
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut v = d_nabla[l][k][i][j] / w.c[l];
                    for m in 0..3 {
                        v -= gm[l][k][m] * nabla_a[m][i][j]
                            + gm[l][i][m] * nabla_a[k][m][j]
                            + gm[l][j][m] * nabla_a[k][i][m];
                    }
                    nabla2_a[l][k][i][j] = v;
                }
            }
        }
    }
    Ok(BackgroundDerivatives {
        a: a.value,
        h: h.value,
        nabla_a,
        nabla2_a,
        nabla_h,
    })
}

/// First-order geometry of the slice (M, g, h) at a point, expressed in the
/// g-orthonormal frame {e_i}.
#[derive(Debug, Clone, Copy)]
pub struct SliceGeometry {
    pub point: Point,
    pub kappa: f64,
    /// `frame[i][mu]`: ∂_mu component of e_i.
    pub frame: Sym3,
    /// `conn[i][j][k] = g(∇̄_{e_i} e_j, e_k)`.
    pub conn: Tensor3,
    /// h_ij = h(e_i, e_j).
    pub h: Sym3,
    /// `nabla_h[i][j][k] = (∇̄_{e_i} h)(e_j, e_k)`.
    pub nabla_h: Tensor3,
}

impl SliceGeometry {
    pub fn new(data: &dyn InitialData, p: &Point) -> Result<Self> {
        p.validate()?;
        let kappa = data.kappa();
        let a = data.metric_jet(p)?;
        let hj = data.extrinsic_jet(p)?;
        let w = Warp::at(p, kappa);
        let cm = CoordinateMetric::new(&a, &w);
        if !(cm.g.determinant() > 0.0) {
            return Err(Error::Data("degenerate metric".into()));
        }
        let ginv = cm
            .g
            .try_inverse()
            .ok_or_else(|| Error::Data("metric not invertible".into()))?;
        let ch = Christoffel::new(&cm, &ginv);
        let of = OrthonormalFrame::new(&a)?;

        let frame = Sym3::from_fn(|i, mu| of.b[(i, mu)] / w.c[mu]);
        // ∂_mu E_j^ν
        let mut dframe = [Sym3::zeros(); 3];
        for mu in 0..3 {
            dframe[mu] = Sym3::from_fn(|j, nu| {
                of.db[mu][(j, nu)] / w.c[nu] - of.b[(j, nu)] * w.dc[mu][nu] / (w.c[nu] * w.c[nu])
            });
        }
        let mut conn = Z3;
        for i in 0..3 {
            for j in 0..3 {
                // coordinate components of ∇_{e_i} e_j
                let mut v = [0.0; 3];
                for (nu, vn) in v.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for mu in 0..3 {
                        let mut inner = dframe[mu][(j, nu)];
                        for s in 0..3 {
                            inner += ch.gamma[nu][mu][s] * frame[(j, s)];
                        }
                        acc += frame[(i, mu)] * inner;
                    }
                    *vn = acc;
                }
                for k in 0..3 {
                    let mut acc = 0.0;
                    for nu in 0..3 {
                        for t in 0..3 {
                            acc += v[nu] * cm.g[(nu, t)] * frame[(k, t)];
                        }
                    }
                    conn[i][j][k] = acc;
                }
            }
        }

        let h = of.b * hj.value * of.b;
        let mut dh = [Sym3::zeros(); 3];
        for mu in 0..3 {
            dh[mu] = of.db[mu] * hj.value * of.b + of.b * hj.d[mu] * of.b + of.b * hj.value * of.db[mu];
        }
        let mut nabla_h = Z3;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut v: f64 = (0..3).map(|mu| frame[(i, mu)] * dh[mu][(j, k)]).sum();
                    for m in 0..3 {
                        v -= conn[i][j][m] * h[(m, k)] + conn[i][k][m] * h[(j, m)];
                    }
                    nabla_h[i][j][k] = v;
                }
            }
        }
        Ok(Self {
            point: *p,
            kappa,
            frame,
            conn,
            h,
            nabla_h,
        })
    }

    /// e_i(f) from coordinate partials of f.
    pub fn frame_derivative<T>(&self, i: usize, partials: &[T; 3]) -> T
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        partials[0] * self.frame[(i, 0)] + partials[1] * self.frame[(i, 1)] + partials[2] * self.frame[(i, 2)]
    }

    pub fn trace_h(&self) -> f64 {
        self.h.trace()
    }
}

/// ∇̄h in the g-orthonormal frame, with its divergence and trace gradient.
#[derive(Debug, Clone, Copy)]
pub struct CovariantH {
    /// `nabla[i][j][k] = ∇̄_i h_jk`
    pub nabla: Tensor3,
    /// ∇̄^j h_ij
    pub divergence: [f64; 3],
    /// ∇̄_i tr h
    pub grad_trace: [f64; 3],
}

impl CovariantH {
    pub fn from_tensor(nabla: Tensor3) -> Self {
        let mut divergence = [0.0; 3];
        let mut grad_trace = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                divergence[i] += nabla[j][i][j];
                grad_trace[i] += nabla[i][j][j];
            }
        }
        Self {
            nabla,
            divergence,
            grad_trace,
        }
    }
}

pub fn covariant_derivative_h(data: &dyn InitialData, p: &Point) -> Result<CovariantH> {
    Ok(CovariantH::from_tensor(SliceGeometry::new(data, p)?.nabla_h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::{
        family_ads, family_kottler, family_perturbation, Differenced, FnFamily, HProfile, Mode,
    };

    fn pt(r: f64, t: f64, p: f64) -> Point {
        Point::new(r, t, p).unwrap()
    }

    #[test]
    fn frame_coefficients_and_duality() {
        let k = 0.8;
        let p = pt(1.7, 0.6, 2.0);
        let f = hyperbolic_frame(&p, k).unwrap();
        assert!((f.frame[1][1] - k / (k * p.r).sinh()).abs() < 1e-15);
        assert!((f.coframe[2][2] - (k * p.r).sinh() * p.theta.sin() / k).abs() < 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                let pair: f64 = (0..3).map(|mu| f.coframe[i][mu] * f.frame[j][mu]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((pair - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn poles_and_nonpositive_radius_rejected() {
        assert!(Point::new(1.0, 0.0, 0.0).is_err());
        assert!(Point::new(1.0, PI_, 0.0).is_err());
        assert!(Point::new(0.0, 1.0, 0.0).is_err());
    }
    const PI_: f64 = std::f64::consts::PI;

    #[test]
    fn background_connection_values() {
        let k = 1.3;
        let p = pt(0.9, 1.2, 0.3);
        let c = hyperbolic_connection(&p, k).unwrap();
        assert!((c.gamma[1][1][0] + k / (k * p.r).tanh()).abs() < 1e-14);
        for q in 0..3 {
            assert_eq!(c.gamma[0][0][q], 0.0);
        }
        for m in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    assert_eq!(c.gamma[m][a][b], -c.gamma[m][b][a]);
                }
            }
        }
    }

    #[test]
    fn background_connection_partials_match_differences() {
        let k = 0.9;
        let p = pt(1.4, 0.8, 0.0);
        let c = hyperbolic_connection(&p, k).unwrap();
        let h = 1e-5;
        for mu in 0..2 {
            let plus = hyperbolic_connection(&p.shifted(mu, h), k).unwrap();
            let minus = hyperbolic_connection(&p.shifted(mu, -h), k).unwrap();
            for m in 0..3 {
                for a in 0..3 {
                    for b in 0..3 {
                        let fd = (plus.gamma[m][a][b] - minus.gamma[m][a][b]) / (2.0 * h);
                        assert!((fd - c.d_gamma[mu][m][a][b]).abs() < 1e-8);
                    }
                }
            }
        }
    }

    /// ∇̊_{e̊_i} e̊_j − ∇̊_{e̊_j} e̊_i must equal the commutator [e̊_i, e̊_j],
    /// computed here by differencing the frame coefficients.
    #[test]
    fn background_connection_is_torsion_free() {
        let k = 1.1;
        let h = 1e-4;
        for &(r, t, ps) in &[(0.7, 0.5, 0.1), (2.3, 2.0, 4.0), (1.1, 1.4, 2.2)] {
            let p = pt(r, t, ps);
            let f = hyperbolic_frame(&p, k).unwrap();
            let c = hyperbolic_connection(&p, k).unwrap();
            let mut dframe = [[[0.0; 3]; 3]; 3]; // [mu][j][nu]
            for mu in 0..3 {
                let fp = hyperbolic_frame(&p.shifted(mu, h), k).unwrap();
                let fm = hyperbolic_frame(&p.shifted(mu, -h), k).unwrap();
                for j in 0..3 {
                    for nu in 0..3 {
                        dframe[mu][j][nu] = (fp.frame[j][nu] - fm.frame[j][nu]) / (2.0 * h);
                    }
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    for nu in 0..3 {
                        let bracket: f64 = (0..3)
                            .map(|mu| f.frame[i][mu] * dframe[mu][j][nu] - f.frame[j][mu] * dframe[mu][i][nu])
                            .sum();
                        let conn: f64 = (0..3)
                            .map(|q| (c.gamma[i][j][q] - c.gamma[j][i][q]) * f.frame[q][nu])
                            .sum();
                        assert!((bracket - conn).abs() < 1e-6, "i={i} j={j} nu={nu}");
                    }
                }
            }
        }
    }

    #[test]
    fn hyperbolic_space_has_constant_curvature() {
        for k in [0.5, 1.0, 2.0] {
            let ads = family_ads(k).unwrap();
            for r in [0.5, 2.0, 5.0, 8.0] {
                let p = pt(r / k, 1.0, 0.4);
                let curv = riemann(&ads, &p).unwrap();
                assert!((curv.r[0][1][0][1] + k * k).abs() < 1e-9);
                assert!(curv.max_diff(&CurvatureTensor::constant(k)) < 1e-9 * k * k);
                assert!((curv.scalar() + 6.0 * k * k).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn kottler_curvature_matches_areal_radius_formulas() {
        let (m, k) = (1.0, 1.0);
        let kot = family_kottler(m, k).unwrap();
        for s in [1.5, 2.5, 4.0] {
            let p = pt(s, 0.9, 0.2);
            let rho = kot.radial(s).unwrap().rho;
            let curv = riemann(&kot, &p).unwrap();
            let k23 = 2.0 * m / rho.powi(3) - k * k;
            let k12 = -(m / rho.powi(3) + k * k);
            assert!((curv.r[1][2][1][2] - k23).abs() < 1e-9, "s={s}");
            assert!((curv.r[0][1][0][1] - k12).abs() < 1e-9, "s={s}");
            assert!((curv.r[0][2][0][2] - k12).abs() < 1e-9, "s={s}");
            assert!((curv.scalar() + 6.0 * k * k).abs() < 1e-7 * 6.0 * k * k);
        }
    }

    #[test]
    fn curvature_symmetries_on_perturbations() {
        for mode in [Mode::Isotropic, Mode::Radial, Mode::Dipole, Mode::Shear] {
            let f = family_perturbation(0.2, 2.0, mode, 1.0).unwrap();
            for &(r, t, ps) in &[(0.6, 0.4, 1.0), (1.5, 2.2, 5.0)] {
                let curv = riemann(&f, &pt(r, t, ps)).unwrap();
                let scale = curv.max_abs();
                assert!(curv.symmetry_residual() <= 1e-10 * scale, "{mode:?}");
                assert!(curv.bianchi_residual() <= 1e-10 * scale, "{mode:?}");
            }
        }
    }

    #[test]
    fn differenced_curvature_converges_at_second_order() {
        let f = family_perturbation(0.2, 2.0, Mode::Shear, 1.0).unwrap();
        let p = pt(1.2, 1.0, 0.7);
        let exact = riemann(&f, &p).unwrap();
        let err = |h: f64| riemann(&Differenced::new(f.clone(), h), &p).unwrap().max_diff(&exact);
        let (e1, e2) = (err(4e-2), err(2e-2));
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio} ({e1}, {e2})");
    }

    #[test]
    fn riemann_rejects_degenerate_metric() {
        let bad = FnFamily::new(
            "bad",
            1.0,
            3.0,
            |_| Ok(Sym3::from_diagonal(&[-1.0, 0.0, 0.0].into())),
            |_| Ok(Sym3::zeros()),
        );
        assert!(matches!(riemann(&bad, &pt(1.0, 1.0, 1.0)), Err(Error::Data(_))));
    }

    #[test]
    fn parallel_extrinsic_curvature_has_zero_derivative() {
        let base = family_perturbation(0.1, 2.0, Mode::Dipole, 1.0).unwrap();
        let b2 = base.clone();
        let umbilic = FnFamily::new(
            "umbilic",
            1.0,
            3.0,
            move |p| base.metric(p),
            move |p| Ok((Sym3::identity() + b2.metric(p)?) * 0.7),
        );
        let cov = covariant_derivative_h(&umbilic, &pt(1.3, 1.1, 0.4)).unwrap();
        assert!(iter3(&cov.nabla).all(|x| x.abs() < 1e-8));
    }

    #[test]
    fn radial_extrinsic_divergence_closed_form() {
        let (k, eps) = (1.0, 0.3);
        let fam = FnFamily::new(
            "h11",
            k,
            2.0,
            |_| Ok(Sym3::zeros()),
            move |p| Ok(Sym3::from_diagonal(&[eps * (-2.0 * k * p.r).exp(), 0.0, 0.0].into())),
        );
        let p = pt(1.4, 0.8, 0.1);
        let cov = covariant_derivative_h(&fam, &p).unwrap();
        let h11 = eps * (-2.0 * k * p.r).exp();
        let want = -2.0 * k * h11 + 2.0 * k / (k * p.r).tanh() * h11;
        assert!((cov.divergence[0] - want).abs() < 1e-8);
        assert!(cov.divergence[1].abs() < 1e-10 && cov.divergence[2].abs() < 1e-10);
        assert!((cov.grad_trace[0] + 2.0 * k * h11).abs() < 1e-8);
    }

    #[test]
    fn extrinsic_profiles_are_frame_transported() {
        let f = family_perturbation(0.0, 2.0, Mode::Radial, 1.0)
            .unwrap()
            .with_extrinsic(HProfile::Isotropic, 0.5);
        let geo = SliceGeometry::new(&f, &pt(1.0, 1.0, 1.0)).unwrap();
        assert!((geo.h - Sym3::identity() * 0.5 * (-2.0f64).exp()).amax() < 1e-15);
    }
}
