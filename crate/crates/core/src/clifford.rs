//! The fixed Clifford representation of the spacetime frame {e₀, e₁, e₂, e₃}
//! on ℂ⁴, spinor vectors, and the two spinor pairings.
//!
//! Generators satisfy γ_α γ_β + γ_β γ_α = −2 η_{αβ} with η = diag(−1, 1, 1, 1),
//! so γ₀² = +1 and γᵢ² = −1. Under the componentwise Hermitian product γ₀ is
//! Hermitian and the γᵢ are skew-Hermitian.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// A Gaussian integer, used to keep generator products exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    pub fn to_complex(self) -> C64 {
        C64::new(self.re as f64, self.im as f64)
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }
}

impl Add for GaussInt {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Mul for GaussInt {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// 4×4 matrix over the Gaussian integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExactMatrix(pub [[GaussInt; 4]; 4]);

impl ExactMatrix {
    pub fn identity() -> Self {
        let mut m = Self::default();
        for i in 0..4 {
            m.0[i][i] = GaussInt::new(1, 0);
        }
        m
    }

    pub fn scale(&self, s: i64) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for e in row.iter_mut() {
                *e = GaussInt::new(e.re * s, e.im * s);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::default();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn to_matrix(&self) -> Matrix4<C64> {
        Matrix4::from_fn(|i, j| self.0[i][j].to_complex())
    }
}

impl Add for ExactMatrix {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[i][j] + o.0[i][j];
            }
        }
        out
    }
}

impl Mul for ExactMatrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::default();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = GaussInt::default();
                for k in 0..4 {
                    acc = acc + self.0[i][k] * o.0[k][j];
                }
                out.0[i][j] = acc;
            }
        }
        out
    }
}

const fn g(re: i64, im: i64) -> GaussInt {
    GaussInt::new(re, im)
}

const O: GaussInt = g(0, 0);

/// Generator tables, row-major.
const GENERATORS: [[[GaussInt; 4]; 4]; 4] = [
    [
        [O, O, g(1, 0), O],
        [O, O, O, g(1, 0)],
        [g(1, 0), O, O, O],
        [O, g(1, 0), O, O],
    ],
    [
        [O, O, g(-1, 0), O],
        [O, O, O, g(1, 0)],
        [g(1, 0), O, O, O],
        [O, g(-1, 0), O, O],
    ],
    [
        [O, O, O, g(1, 0)],
        [O, O, g(1, 0), O],
        [O, g(-1, 0), O, O],
        [g(-1, 0), O, O, O],
    ],
    [
        [O, O, O, g(0, 1)],
        [O, O, g(0, -1), O],
        [O, g(0, -1), O, O],
        [g(0, 1), O, O, O],
    ],
];

/// Minkowski metric η = diag(−1, 1, 1, 1).
pub const ETA: [i64; 4] = [-1, 1, 1, 1];

/// Exact generator matrix for frame index α.
pub fn exact_gamma(alpha: usize) -> Result<ExactMatrix> {
    GENERATORS
        .get(alpha)
        .map(|m| ExactMatrix(*m))
        .ok_or_else(|| Error::Domain(format!("frame index {alpha} outside 0..=3")))
}

/// Which element of the algebra a [`CliffordElement`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliffordLabel {
    Generator(usize),
    Product,
}

/// A 4×4 complex matrix in the Clifford algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement {
    pub matrix: Matrix4<C64>,
    pub label: CliffordLabel,
}

impl CliffordElement {
    pub fn apply(&self, phi: &Spinor) -> Spinor {
        Spinor::from_vector(&(self.matrix * phi.to_vector()))
    }
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;
    fn mul(self, o: &CliffordElement) -> CliffordElement {
        CliffordElement {
            matrix: self.matrix * o.matrix,
            label: CliffordLabel::Product,
        }
    }
}

/// The generator γ_α of the fixed representation.
pub fn gamma(alpha: usize) -> Result<CliffordElement> {
    Ok(CliffordElement {
        matrix: exact_gamma(alpha)?.to_matrix(),
        label: CliffordLabel::Generator(alpha),
    })
}

/// A four-component spinor in the representation basis.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Spinor(pub [C64; 4]);

impl fmt::Debug for Spinor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl Spinor {
    pub const ZERO: Spinor = Spinor([ZERO; 4]);

    pub fn new(c: [C64; 4]) -> Self {
        Self(c)
    }

    pub fn real(c: [f64; 4]) -> Self {
        Self(c.map(|x| C64::new(x, 0.0)))
    }

    /// Unit basis spinor with a one in slot `i` (0-based).
    pub fn basis(i: usize) -> Self {
        let mut s = Self::ZERO;
        s.0[i] = C64::new(1.0, 0.0);
        s
    }

    pub fn to_vector(&self) -> nalgebra::Vector4<C64> {
        nalgebra::Vector4::from_column_slice(&self.0)
    }

    pub fn from_vector(v: &nalgebra::Vector4<C64>) -> Self {
        Self([v[0], v[1], v[2], v[3]])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// γ_α φ using the exact generator tables.
    pub fn gamma(&self, alpha: usize) -> Self {
        let m = &GENERATORS[alpha];
        let mut out = [ZERO; 4];
        for (i, row) in m.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.re != 0 || e.im != 0 {
                    out[i] += e.to_complex() * self.0[j];
                }
            }
        }
        Self(out)
    }

    /// γ₀ γᵢ φ for a spatial index `i` in 1..=3.
    pub fn e0_ei(&self, i: usize) -> Self {
        self.gamma(i).gamma(0)
    }
}

impl Index<usize> for Spinor {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Spinor {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, o: Spinor) -> Spinor {
        Spinor(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl AddAssign for Spinor {
    fn add_assign(&mut self, o: Spinor) {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, o: Spinor) -> Spinor {
        Spinor(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl SubAssign for Spinor {
    fn sub_assign(&mut self, o: Spinor) {
        for i in 0..4 {
            self.0[i] -= o.0[i];
        }
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor(self.0.map(|z| -z))
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, s: f64) -> Spinor {
        Spinor(self.0.map(|z| z * s))
    }
}

impl Mul<C64> for Spinor {
    type Output = Spinor;
    fn mul(self, s: C64) -> Spinor {
        self.scale(s)
    }
}

impl Mul<Spinor> for &Matrix4<C64> {
    type Output = Spinor;
    fn mul(self, s: Spinor) -> Spinor {
        Spinor::from_vector(&(self * s.to_vector()))
    }
}

/// Clifford multiplication by the frame vector X = Σ ξ^α e_α.
pub fn clifford_apply(xi: [f64; 4], phi: &Spinor) -> Spinor {
    let mut out = Spinor::ZERO;
    for (alpha, &c) in xi.iter().enumerate() {
        if c != 0.0 {
            out += phi.gamma(alpha) * c;
        }
    }
    out
}

/// Positive-definite pairing ⟨φ, ψ⟩, conjugate-linear in φ.
pub fn inner_pos(phi: &Spinor, psi: &Spinor) -> C64 {
    phi.0
        .iter()
        .zip(psi.0.iter())
        .map(|(a, b)| a.conj() * b)
        .sum()
}

/// Indefinite Hermitian pairing (φ, ψ) = ⟨γ₀φ, ψ⟩.
pub fn inner_lorentz(phi: &Spinor, psi: &Spinor) -> C64 {
    inner_pos(&phi.gamma(0), psi)
}

/// Max-norm of H − H† for a complex 4×4 matrix.
pub fn hermiticity_defect(m: &Matrix4<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Outcome of checking the defining relations of the representation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CliffordSuite {
    /// number of unordered pairs {α, β} checked, α ≤ β
    pub pairs: usize,
    /// {γ_α, γ_β} = −2η_αβ I in exact Gaussian-integer arithmetic
    pub exact: bool,
    /// max entry of {γ_α, γ_β} + 2η_αβ I in floating point
    pub anticommutator_defect: f64,
    /// max over γ₀ − γ₀† and γ_i + γ_i†
    pub hermiticity_defect: f64,
}

pub fn clifford_suite() -> CliffordSuite {
    let mut exact = true;
    let mut anticommutator_defect: f64 = 0.0;
    let mut pairs = 0;
    for a in 0..4 {
        for b in a..4 {
            pairs += 1;
            let (ga, gb) = (ExactMatrix(GENERATORS[a]), ExactMatrix(GENERATORS[b]));
            let eta = if a == b { ETA[a] } else { 0 };
            let lhs = ga * gb + gb * ga;
            exact &= lhs == ExactMatrix::identity().scale(-2 * eta);
            let (fa, fb) = (ga.to_matrix(), gb.to_matrix());
            let d = fa * fb + fb * fa + Matrix4::identity() * C64::new(2.0 * eta as f64, 0.0);
            anticommutator_defect = anticommutator_defect.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    let mut herm: f64 = hermiticity_defect(&ExactMatrix(GENERATORS[0]).to_matrix());
    for m in &GENERATORS[1..] {
        let g = ExactMatrix(*m).to_matrix();
        herm = herm.max((g + g.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    CliffordSuite {
        pairs,
        exact,
        anticommutator_defect,
        hermiticity_defect: herm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gamma0_matches_table() {
        let g0 = gamma(0).unwrap().matrix;
        let expected = [
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g0[(i, j)], c(expected[i][j], 0.0));
            }
        }
    }

    #[test]
    fn gamma_out_of_range() {
        assert!(matches!(gamma(4), Err(Error::Domain(_))));
    }

    #[test]
    fn gamma1_squares_to_minus_identity() {
        let g1 = exact_gamma(1).unwrap();
        assert_eq!(g1 * g1, ExactMatrix::identity().scale(-1));
    }

    #[test]
    fn gamma0_gamma1_anticommute() {
        let g0 = exact_gamma(0).unwrap();
        let g1 = exact_gamma(1).unwrap();
        assert_eq!(g0 * g1 + g1 * g0, ExactMatrix::default());
    }

    #[test]
    fn clifford_apply_examples() {
        let e1 = Spinor::basis(0);
        assert_eq!(clifford_apply([1.0, 0.0, 0.0, 0.0], &e1), Spinor::basis(2));

        let phi = Spinor::new([c(0.3, 1.0), c(-2.0, 0.5), c(0.0, 0.1), c(4.0, 0.0)]);
        assert_eq!(clifford_apply([0.0; 4], &phi), Spinor::ZERO);

        let e3 = Spinor::basis(2);
        let out = clifford_apply([0.0, 1.0, 1.0, 0.0], &e3);
        assert_eq!(out, Spinor::real([-1.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn spinor_gamma_agrees_with_matrix() {
        let phi = Spinor::new([c(0.3, 1.0), c(-2.0, 0.5), c(0.0, 0.1), c(4.0, -1.0)]);
        for a in 0..4 {
            let m = gamma(a).unwrap();
            assert_eq!(m.apply(&phi), phi.gamma(a));
        }
    }

    #[test]
    fn inner_products() {
        let e1 = Spinor::basis(0);
        assert_eq!(inner_pos(&e1, &e1), c(1.0, 0.0));
        assert_eq!(inner_lorentz(&e1, &e1), c(0.0, 0.0));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = Spinor::real([s, 0.0, s, 0.0]);
        assert!((inner_lorentz(&phi, &phi) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_pos_is_conjugate_linear_in_first_slot() {
        let phi = Spinor::new([c(1.0, 2.0), c(0.0, 0.0), c(0.5, 0.0), c(0.0, -1.0)]);
        let psi = Spinor::new([c(0.0, 1.0), c(3.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)]);
        let z = c(0.7, -1.3);
        let lhs = inner_pos(&phi.scale(z), &psi);
        assert!((lhs - z.conj() * inner_pos(&phi, &psi)).norm() < 1e-14);
    }

    #[test]
    fn suite_reports_exact_relations() {
        let s = clifford_suite();
        assert_eq!(s.pairs, 10);
        assert!(s.exact);
        assert_eq!(s.anticommutator_defect, 0.0);
        assert_eq!(s.hermiticity_defect, 0.0);
    }
}
