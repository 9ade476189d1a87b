//! Rank-2 parabolic φ-connections on P¹ with four poles, in the normal form
//! `E1 = E2 = O ⊕ O(-1)`.
//!
//! Frames: `e1` spans `O`, `e2` spans `O(-1) = O(-t4)`. A φ-connection is
//! `∇ = φ∘d_can + Ω` with `d_can = d + diag(0, dz/(z-t4))` and
//! `Ω = N(z) dz / Q(z)`, `Q = ∏(z - t_j)`.

mod normal_form;
mod stability;

pub use normal_form::*;
pub use stability::*;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::Field;
use crate::poly::Poly;

pub type M2<F> = [[F; 2]; 2];
pub type V2<F> = [F; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParabolicError {
    #[error("pole index {0} out of range 0..4")]
    Index(usize),
    #[error("poles are not pairwise distinct")]
    CoincidentPoles,
    #[error("point lies on the exceptional point b_{index}{sign}; use exceptional_fiber_member")]
    OnExceptionalPoint { index: usize, sign: char },
    #[error("point is outside the main chart: {0}")]
    OffChart(String),
    #[error("degenerate residue system at pole {0}")]
    DegenerateResidue(usize),
    #[error("u vanishes identically (omega_3 = 0); the connection is unstable")]
    UVanishes,
    #[error("zero of u is at infinity")]
    PointAtInfinity,
    #[error("iota vanishes; weight hypothesis violated")]
    IotaZero,
    #[error("projective parameter [0:0]")]
    ZeroParameter,
    #[error("phi is degenerate: {0}")]
    DegeneratePhi(String),
    #[error("unsupported weight: {0}")]
    UnsupportedWeight(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
}

pub(crate) fn mat_mul<F: Field>(a: &M2<F>, b: &M2<F>) -> M2<F> {
    let e = |i: usize, j: usize| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub(crate) fn mat_vec<F: Field>(a: &M2<F>, v: &V2<F>) -> V2<F> {
    [
        a[0][0].clone() * v[0].clone() + a[0][1].clone() * v[1].clone(),
        a[1][0].clone() * v[0].clone() + a[1][1].clone() * v[1].clone(),
    ]
}

pub(crate) fn det2<F: Field>(a: &M2<F>) -> F {
    a[0][0].clone() * a[1][1].clone() - a[0][1].clone() * a[1][0].clone()
}

pub(crate) fn inv2<F: Field>(a: &M2<F>) -> M2<F> {
    let d = det2(a);
    [
        [a[1][1].clone() / d.clone(), -a[0][1].clone() / d.clone()],
        [-a[1][0].clone() / d.clone(), a[0][0].clone() / d],
    ]
}

pub(crate) fn vec_mag<F: Field>(v: &V2<F>) -> f64 {
    v[0].magnitude().hypot(v[1].magnitude())
}

/// `v ∧ w == 0` up to the field tolerance.
pub(crate) fn parallel<F: Field>(v: &V2<F>, w: &V2<F>) -> bool {
    let wedge = v[0].clone() * w[1].clone() - v[1].clone() * w[0].clone();
    wedge.is_zero_within(vec_mag(v) * vec_mag(w))
}

/// Kernel vector of a singular 2×2 matrix, choosing the larger of the two
/// row-derived candidates. `None` if the matrix is zero.
pub(crate) fn kernel2<F: Field>(a: &M2<F>) -> Option<V2<F>> {
    let v1 = [a[0][1].clone(), -a[0][0].clone()];
    let v2 = [a[1][1].clone(), -a[1][0].clone()];
    let (m1, m2) = (vec_mag(&v1), vec_mag(&v2));
    if F::EXACT {
        if !(v1[0].is_exact_zero() && v1[1].is_exact_zero()) {
            return Some(v1);
        }
        if !(v2[0].is_exact_zero() && v2[1].is_exact_zero()) {
            return Some(v2);
        }
        return None;
    }
    if m1 == 0.0 && m2 == 0.0 {
        None
    } else if m1 >= m2 {
        Some(v1)
    } else {
        Some(v2)
    }
}

/// Poles `t` and exponents `λ` (the `+` exponents). `λ⁻ = (-λ1, -λ2, -λ3, 1-λ4)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentData<F> {
    pub t: [F; 4],
    pub lambda: [F; 4],
}

impl<F: Field> ExponentData<F> {
    pub fn new(t: [F; 4], lambda: [F; 4]) -> Result<Self, ParabolicError> {
        let e = ExponentData { t, lambda };
        for i in 0..4 {
            for j in 0..i {
                let d = e.t[i].clone() - e.t[j].clone();
                if d.is_zero_within(e.t[i].magnitude().max(e.t[j].magnitude())) {
                    return Err(ParabolicError::CoincidentPoles);
                }
            }
        }
        Ok(e)
    }

    /// `δ_{i4}`: the canonical connection contributes to the residue at `t4` only.
    pub fn delta(i: usize) -> F {
        if i == 3 {
            F::one()
        } else {
            F::zero()
        }
    }

    pub fn lambda_minus(&self, i: usize) -> F {
        Self::delta(i) - self.lambda[i].clone()
    }

    pub fn lambda_minus_all(&self) -> [F; 4] {
        std::array::from_fn(|i| self.lambda_minus(i))
    }

    /// `λ_i^+` for `plus == true`, else `λ_i^-`.
    pub fn lambda_signed(&self, i: usize, plus: bool) -> F {
        if plus {
            self.lambda[i].clone()
        } else {
            self.lambda_minus(i)
        }
    }

    /// `Q(z) = ∏ (z - t_j)`.
    pub fn q_poly(&self) -> Poly<F> {
        Poly::from_roots(self.t.iter())
    }

    /// `T(z) = ∏_{j≠4} (z - t_j)`, numerator of `dz/(z-t4)` over `Q`.
    pub fn tau_numerator(&self) -> Poly<F> {
        Poly::from_roots(self.t[..3].iter())
    }

    /// `∏_{j≠i} (t_i - t_j)`.
    pub fn prod_except(&self, i: usize) -> F {
        (0..4)
            .filter(|&j| j != i)
            .fold(F::one(), |acc, j| acc * (self.t[i].clone() - self.t[j].clone()))
    }

    pub fn coincident(&self, i: usize) -> bool {
        let d = self.lambda[i].clone() - self.lambda_minus(i);
        d.is_zero_within(1.0)
    }

    pub fn scale(&self) -> f64 {
        self.t.iter().chain(self.lambda.iter()).map(|x| x.magnitude()).fold(1.0, f64::max)
    }

    pub fn to_c64(&self) -> ExponentData<Complex64> {
        ExponentData { t: self.t.clone().map(|x| x.to_c64()), lambda: self.lambda.clone().map(|x| x.to_c64()) }
    }

    /// Classification of the exponents: resonant if some `2λ_i ∈ Z`,
    /// reducible if some signed sum `Σ ε_i λ_i ∈ Z`.
    pub fn is_special(&self) -> Speciality {
        is_special(&self.lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speciality {
    Resonant,
    Reducible,
    Generic,
}

pub fn is_special<F: Field>(lambda: &[F; 4]) -> Speciality {
    if lambda.iter().any(|l| (l.clone() + l.clone()).is_integer()) {
        return Speciality::Resonant;
    }
    for mask in 0..16u32 {
        let s = lambda.iter().enumerate().fold(F::zero(), |acc, (i, l)| {
            if mask & (1 << i) != 0 {
                acc - l.clone()
            } else {
                acc + l.clone()
            }
        });
        if s.is_integer() {
            return Speciality::Reducible;
        }
    }
    Speciality::Generic
}

/// `2 r² (g-1) + n r (r-1) + 2`.
pub fn moduli_dimension(r: i64, n: i64, g: i64) -> i64 {
    2 * r * r * (g - 1) + n * r * (r - 1) + 2
}

/// Parabolic weight `(α', β, γ)` for φ-connections; `α = α' β1/(β1+β2)`
/// is the induced weight for connections.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    pub alpha_prime: [BigRational; 8],
    pub beta: (u32, u32),
    pub gamma: BigInt,
}

impl Weight {
    pub fn new(alpha_prime: [BigRational; 8], beta: (u32, u32), gamma: BigInt) -> Result<Self, ParabolicError> {
        if beta.0 == 0 || beta.1 == 0 {
            return Err(ParabolicError::InvalidWeight("beta must be positive".into()));
        }
        if alpha_prime[0].is_negative() || alpha_prime[7] >= BigRational::one() {
            return Err(ParabolicError::InvalidWeight("alpha' must lie in [0,1)".into()));
        }
        if alpha_prime.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ParabolicError::InvalidWeight("alpha' must be strictly increasing".into()));
        }
        if !gamma.is_positive() {
            return Err(ParabolicError::InvalidWeight("gamma must be positive".into()));
        }
        Ok(Weight { alpha_prime, beta, gamma })
    }

    /// `α'_k = k/den` for `k = 1..8`, `β = (1,1)`.
    pub fn uniform(den: i64, gamma: i64) -> Self {
        let ap = std::array::from_fn(|k| BigRational::new(BigInt::from(k as i64 + 1), BigInt::from(den)));
        Weight::new(ap, (1, 1), BigInt::from(gamma)).expect("valid uniform weight")
    }

    pub fn alpha(&self) -> [BigRational; 8] {
        let f = BigRational::new(BigInt::from(self.beta.0), BigInt::from(self.beta.0 + self.beta.1));
        self.alpha_prime.clone().map(|a| a * f.clone())
    }

    pub fn alpha_prime_sum(&self) -> BigRational {
        self.alpha_prime.iter().fold(BigRational::zero(), |a, b| a + b)
    }

    /// `α'_{2i} - α'_{2i-1} < Σ_{j≠i} (α'_{2j} - α'_{2j-1})` for every `i`.
    pub fn satisfies_gap_hypothesis(&self) -> bool {
        let gaps: Vec<BigRational> =
            (0..4).map(|i| &self.alpha_prime[2 * i + 1] - &self.alpha_prime[2 * i]).collect();
        let total = gaps.iter().fold(BigRational::zero(), |a, b| a + b);
        gaps.iter().all(|g| g.clone() < total.clone() - g.clone())
    }
}

/// How a subsheaf meets the flag `l_i ⊂ E|_{t_i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Incidence {
    Zero,
    /// Rank one, not containing `l_i`.
    Transverse,
    /// Rank one, equal to `l_i` at `t_i`.
    Contains,
    Full,
}

impl Incidence {
    /// `(dim F/(l∩F), dim (l∩F))`
    pub fn dims(self) -> (i64, i64) {
        match self {
            Incidence::Zero => (0, 0),
            Incidence::Transverse => (1, 0),
            Incidence::Contains => (0, 1),
            Incidence::Full => (1, 1),
        }
    }
}

fn weighted_incidence(inc: &[Incidence; 4], w: &[BigRational; 8]) -> BigRational {
    let mut s = BigRational::zero();
    for (i, x) in inc.iter().enumerate() {
        let (d1, d2) = x.dims();
        s += &w[2 * i] * BigRational::from_integer(d1.into()) + &w[2 * i + 1] * BigRational::from_integer(d2.into());
    }
    s
}

/// `deg F + Σ_i (α_{2i-1} dim(F/l_i∩F) + α_{2i} dim(l_i∩F))`.
pub fn parabolic_degree(inc: &[Incidence; 4], weight: &Weight, deg: i64) -> BigRational {
    BigRational::from_integer(deg.into()) + weighted_incidence(inc, &weight.alpha())
}

/// `pardeg E` for `E = O ⊕ O(-1)`.
pub fn parabolic_degree_full(weight: &Weight) -> BigRational {
    parabolic_degree(&[Incidence::Full; 4], weight, -1)
}

/// Slope of a sub-pair `(F1, F2)` of `(E1, E2)` for the `(α', β)` weight,
/// with `deg F1(-D) = deg F1 - 4 rk F1`.
pub fn mu_phi(rank1: i64, deg1: i64, inc1: &[Incidence; 4], rank2: i64, deg2: i64, weight: &Weight) -> BigRational {
    let b1 = BigRational::from_integer(BigInt::from(weight.beta.0));
    let b2 = BigRational::from_integer(BigInt::from(weight.beta.1));
    let int = |x: i64| BigRational::from_integer(BigInt::from(x));
    let gamma = BigRational::from_integer(weight.gamma.clone());
    let num = &b1 * (int(deg1 - 4 * rank1) + weighted_incidence(inc1, &weight.alpha_prime))
        + &b2 * (int(deg2) - gamma * int(rank2));
    let den = &b1 * int(rank1) + &b2 * int(rank2);
    num / den
}

pub fn mu_phi_full(weight: &Weight) -> BigRational {
    mu_phi(2, -1, &[Incidence::Full; 4], 2, -1, weight)
}

/// Rank-r, genus-g stability data: weights `α^{(i)}_j` per pole and the
/// flag-incidence table `len(F)^{(i)}_j` of a subbundle.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralStabilityInput {
    pub r: usize,
    pub n: usize,
    pub g: usize,
    pub d: i64,
    pub weights: Vec<Vec<BigRational>>,
}

impl GeneralStabilityInput {
    pub fn validate(&self) -> Result<(), ParabolicError> {
        if self.weights.len() != self.n || self.weights.iter().any(|w| w.len() != self.r) {
            return Err(ParabolicError::InvalidWeight("weight table must be n x r".into()));
        }
        for w in &self.weights {
            if !w[0].is_positive() || w[self.r - 1] >= BigRational::one() || w.windows(2).any(|p| p[0] >= p[1]) {
                return Err(ParabolicError::InvalidWeight("need 0 < a_1 < ... < a_r < 1".into()));
            }
        }
        Ok(())
    }

    /// `deg F + Σ_{i,j} α^{(i)}_j len(F)^{(i)}_j`.
    pub fn pardeg(&self, deg: i64, len: &[Vec<i64>]) -> BigRational {
        let mut s = BigRational::from_integer(deg.into());
        for (wi, li) in self.weights.iter().zip(len) {
            for (a, l) in wi.iter().zip(li) {
                s += a * BigRational::from_integer((*l).into());
            }
        }
        s
    }

    pub fn pardeg_full(&self) -> BigRational {
        let ones = vec![vec![1; self.r]; self.n];
        self.pardeg(self.d, &ones)
    }

    /// `pardeg F / rk F < pardeg E / r`.
    pub fn sub_is_stable(&self, rank: usize, deg: i64, len: &[Vec<i64>]) -> bool {
        let lhs = self.pardeg(deg, len) * BigRational::from_integer(BigInt::from(self.r));
        let rhs = self.pardeg_full() * BigRational::from_integer(BigInt::from(rank));
        lhs < rhs
    }
}

/// A parabolic φ-connection in normal form. `omega` holds the numerators
/// `N1..N4` of `ω_k = N_k dz / Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiConnection<F> {
    pub exponents: ExponentData<F>,
    pub phi1: F,
    pub phi2: F,
    pub phi3: Poly<F>,
    pub omega: [Poly<F>; 4],
    pub lines: [V2<F>; 4],
}

/// Residuals of the defining identities; all zero for a valid object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionCheck {
    pub degree_bounds: bool,
    pub determinant_identity: f64,
    pub residue_conditions: [f64; 4],
    pub lines_nonzero: bool,
}

impl ConnectionCheck {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.degree_bounds
            && self.lines_nonzero
            && self.determinant_identity <= tol
            && self.residue_conditions.iter().all(|r| *r <= tol)
    }
}

impl<F: Field> PhiConnection<F> {
    pub fn phi_at(&self, z: &F) -> M2<F> {
        [[self.phi1.clone(), self.phi3.eval(z)], [F::zero(), self.phi2.clone()]]
    }

    /// `wedge² φ = φ1 φ2`.
    pub fn wedge2_phi(&self) -> F {
        self.phi1.clone() * self.phi2.clone()
    }

    pub fn phi_invertible(&self) -> bool {
        !self.wedge2_phi().is_zero_within(0.0)
    }

    pub fn omega_residue(&self, k: usize, i: usize) -> F {
        self.omega[k].eval(&self.exponents.t[i]) / self.exponents.prod_except(i)
    }

    /// `res_{t_i} ∇ = res Ω + Φ(t_i) diag(0, δ_{i4})`.
    pub fn residue(&self, i: usize) -> Result<M2<F>, ParabolicError> {
        if i >= 4 {
            return Err(ParabolicError::Index(i));
        }
        let r = |k| self.omega_residue(k, i);
        let d = ExponentData::<F>::delta(i);
        let ti = &self.exponents.t[i];
        Ok([
            [r(0), r(1) + self.phi3.eval(ti) * d.clone()],
            [r(2), r(3) + self.phi2.clone() * d],
        ])
    }

    /// `res - λ_i Φ(t_i)`; the parabolic line must lie in its kernel.
    pub fn shifted_residue(&self, i: usize) -> Result<M2<F>, ParabolicError> {
        let r = self.residue(i)?;
        let p = self.phi_at(&self.exponents.t[i]);
        let l = &self.exponents.lambda[i];
        Ok(std::array::from_fn(|a| std::array::from_fn(|b| r[a][b].clone() - l.clone() * p[a][b].clone())))
    }

    /// `N1 φ2 - N3 φ3 + N4 φ1`, identically zero for a valid object.
    pub fn determinant_identity(&self) -> Poly<F> {
        let a = self.omega[0].scale(&self.phi2);
        let b = &self.omega[2] * &self.phi3;
        let c = self.omega[3].scale(&self.phi1);
        &(&a - &b) + &c
    }

    pub fn scale(&self) -> f64 {
        let polys = self.omega.iter().chain(std::iter::once(&self.phi3));
        polys
            .map(|p| p.max_abs())
            .chain([self.phi1.magnitude(), self.phi2.magnitude(), self.exponents.scale()])
            .fold(1.0, f64::max)
    }

    pub fn check(&self) -> ConnectionCheck {
        let bounds = [2usize, 3, 1, 2];
        let degree_bounds = self.omega.iter().zip(bounds).all(|(p, b)| p.degree_within().is_none_or(|d| d <= b))
            && self.phi3.degree_within().is_none_or(|d| d <= 1);
        let s = self.scale();
        let det = self.determinant_identity();
        let determinant_identity = if F::EXACT {
            if det.degree().is_none() {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            det.max_abs() / (s * s)
        };
        let mut residue_conditions = [0.0; 4];
        let mut lines_nonzero = true;
        for (i, rc) in residue_conditions.iter_mut().enumerate() {
            let m = self.shifted_residue(i).expect("index in range");
            let l = &self.lines[i];
            let nl = vec_mag(l);
            if nl == 0.0 {
                lines_nonzero = false;
                continue;
            }
            let v = mat_vec(&m, l);
            *rc = if F::EXACT {
                if v[0].is_exact_zero() && v[1].is_exact_zero() {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                vec_mag(&v) / (nl * s)
            };
        }
        ConnectionCheck { degree_bounds, determinant_identity, residue_conditions, lines_nonzero }
    }

    pub fn to_c64(&self) -> PhiConnection<Complex64> {
        let pc = |p: &Poly<F>| Poly::new(p.coeffs.iter().map(|c| c.to_c64()).collect());
        PhiConnection {
            exponents: self.exponents.to_c64(),
            phi1: self.phi1.to_c64(),
            phi2: self.phi2.to_c64(),
            phi3: pc(&self.phi3),
            omega: std::array::from_fn(|k| pc(&self.omega[k])),
            lines: std::array::from_fn(|i| [self.lines[i][0].to_c64(), self.lines[i][1].to_c64()]),
        }
    }
}

/// JSON form `conn-v1` of a float connection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnV1 {
    pub schema: String,
    pub t: [Complex64; 4],
    pub lambda: [Complex64; 4],
    pub phi1: Complex64,
    pub phi2: Complex64,
    pub phi3: Vec<Complex64>,
    pub omega: [Vec<Complex64>; 4],
    pub lines: [[Complex64; 2]; 4],
}

pub const CONN_SCHEMA: &str = "conn-v1";

impl From<&PhiConnection<Complex64>> for ConnV1 {
    fn from(c: &PhiConnection<Complex64>) -> Self {
        ConnV1 {
            schema: CONN_SCHEMA.into(),
            t: c.exponents.t,
            lambda: c.exponents.lambda,
            phi1: c.phi1,
            phi2: c.phi2,
            phi3: c.phi3.coeffs.clone(),
            omega: std::array::from_fn(|k| c.omega[k].coeffs.clone()),
            lines: c.lines,
        }
    }
}

impl TryFrom<&ConnV1> for PhiConnection<Complex64> {
    type Error = ParabolicError;
    fn try_from(j: &ConnV1) -> Result<Self, Self::Error> {
        if j.schema != CONN_SCHEMA {
            return Err(ParabolicError::Precondition(format!("schema {} is not {CONN_SCHEMA}", j.schema)));
        }
        Ok(PhiConnection {
            exponents: ExponentData::new(j.t, j.lambda)?,
            phi1: j.phi1,
            phi2: j.phi2,
            phi3: Poly::new(j.phi3.clone()),
            omega: std::array::from_fn(|k| Poly::new(j.omega[k].clone())),
            lines: j.lines,
        })
    }
}
