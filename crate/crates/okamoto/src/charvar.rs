//! Representations of surface groups with punctures and their
//! characteristic data.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parabolic::ExponentData;
use crate::poly::Poly;
use crate::rh::MonodromyRep;

type C = Complex64;
pub type CMat = DMatrix<C>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharVarError {
    #[error("relation violated: residual {0:.3e}")]
    Relation(f64),
    #[error("exponents violate the sum condition: d + Σλ = {0}")]
    LambdaSum(C),
    #[error("characteristic data violate Π a0 = (-1)^(rn): residual {0:.3e}")]
    AParamProduct(f64),
    #[error("rank {0} is not supported for sampling")]
    Rank(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("rejection budget of {0} attempts exhausted; the target may be on the singular locus")]
    Sampling(usize),
}

/// Generators `α_i, β_i` (genus part) and `γ_j` (punctures) subject to
/// `Π[α_i, β_i] γ_1 ⋯ γ_n = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGroupRep {
    pub g: usize,
    pub n: usize,
    pub r: usize,
    pub alpha: Vec<CMat>,
    pub beta: Vec<CMat>,
    pub gamma: Vec<CMat>,
}

fn inverse(m: &CMat) -> CMat {
    m.clone().try_inverse().unwrap_or_else(|| CMat::from_element(m.nrows(), m.ncols(), C::new(f64::NAN, f64::NAN)))
}

fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b * inverse(a) * inverse(b)
}

impl SurfaceGroupRep {
    pub fn new(g: usize, n: usize, r: usize, alpha: Vec<CMat>, beta: Vec<CMat>, gamma: Vec<CMat>) -> Result<Self, CharVarError> {
        if alpha.len() != g || beta.len() != g || gamma.len() != n {
            return Err(CharVarError::Shape(format!("expected {g} α, {g} β, {n} γ")));
        }
        if alpha.iter().chain(&beta).chain(&gamma).any(|m| m.nrows() != r || m.ncols() != r) {
            return Err(CharVarError::Shape(format!("all generators must be {r}×{r}")));
        }
        Ok(SurfaceGroupRep { g, n, r, alpha, beta, gamma })
    }

    /// Genus 0, four punctures, from a monodromy representation; the
    /// punctures are listed in its relation order.
    pub fn from_monodromy(rep: &MonodromyRep) -> Self {
        let gamma = rep
            .relation_order
            .iter()
            .map(|&i| {
                let m = rep.matrices[i];
                CMat::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
            })
            .collect();
        SurfaceGroupRep { g: 0, n: 4, r: 2, alpha: vec![], beta: vec![], gamma }
    }

    pub fn relation_product(&self) -> CMat {
        let mut p = CMat::identity(self.r, self.r);
        for (a, b) in self.alpha.iter().zip(&self.beta) {
            p *= commutator(a, b);
        }
        for c in &self.gamma {
            p *= c;
        }
        p
    }

    pub fn relation_residual(&self) -> f64 {
        (self.relation_product() - CMat::identity(self.r, self.r)).norm()
    }

    pub fn is_invertible(&self, tol: f64) -> bool {
        self.alpha.iter().chain(&self.beta).chain(&self.gamma).all(|m| m.determinant().norm() > tol)
    }

    pub fn conjugate(&self, h: &CMat) -> Self {
        let hi = inverse(h);
        let f = |v: &Vec<CMat>| v.iter().map(|m| h * m * &hi).collect();
        SurfaceGroupRep { alpha: f(&self.alpha), beta: f(&self.beta), gamma: f(&self.gamma), ..self.clone() }
    }

    pub fn scale(&self) -> f64 {
        self.alpha.iter().chain(&self.beta).chain(&self.gamma).map(|m| m.norm()).fold(1.0, f64::max)
    }
}

/// Characteristic coefficients per puncture, `det(sI - γ_i) = s^r + a_{r-1} s^{r-1} + … + a_0`,
/// stored in descending order `[a_{r-1}, …, a_0]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AParam {
    pub r: usize,
    pub a: Vec<Vec<C>>,
}

impl AParam {
    pub fn new(r: usize, a: Vec<Vec<C>>) -> Result<Self, CharVarError> {
        if a.iter().any(|row| row.len() != r) {
            return Err(CharVarError::Shape(format!("each row needs {r} coefficients")));
        }
        Ok(AParam { r, a })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a0(&self, i: usize) -> C {
        self.a[i][self.r - 1]
    }

    /// `|Π a0 - (-1)^(rn)|`.
    pub fn product_residual(&self) -> f64 {
        let p: C = (0..self.n()).map(|i| self.a0(i)).product();
        let sign = if (self.r * self.n()).is_multiple_of(2) { 1.0 } else { -1.0 };
        (p - sign).norm()
    }

    /// Traces `-a_{r-1}` per puncture.
    pub fn traces(&self) -> Vec<C> {
        self.a.iter().map(|row| -row[0]).collect()
    }

    pub fn max_distance(&self, other: &AParam) -> f64 {
        self.a
            .iter()
            .flatten()
            .zip(other.a.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(if self.a.len() == other.a.len() && self.r == other.r { 0.0 } else { f64::INFINITY }, f64::max)
    }

    pub fn row_poly(&self, i: usize) -> Poly<C> {
        let mut c: Vec<C> = self.a[i].iter().rev().copied().collect();
        c.push(C::new(1.0, 0.0));
        Poly::new(c)
    }
}

/// Characteristic polynomial coefficients by the Faddeev–LeVerrier recursion,
/// descending and without the leading 1.
pub fn char_coefficients(m: &CMat) -> Vec<C> {
    let r = m.nrows();
    let mut out = vec![C::new(0.0, 0.0); r];
    let mut mk = CMat::zeros(r, r);
    let mut c = C::new(1.0, 0.0);
    for k in 1..=r {
        mk = m * &mk + CMat::identity(r, r) * c;
        c = -(m * &mk).trace() / k as f64;
        out[k - 1] = c;
    }
    out
}

/// `Π_j (s - exp(-2πi λ_j))` per pole, after checking `d + Σλ = 0`.
pub fn rh_exponents(lambda: &[Vec<C>], d: i64, tol: f64) -> Result<AParam, CharVarError> {
    let r = lambda.first().map_or(0, |row| row.len());
    if lambda.iter().any(|row| row.len() != r) {
        return Err(CharVarError::Shape("ragged exponent table".into()));
    }
    let sum: C = lambda.iter().flatten().sum::<C>() + d as f64;
    if sum.norm() > tol {
        return Err(CharVarError::LambdaSum(sum));
    }
    let a = lambda
        .iter()
        .map(|row| {
            let roots: Vec<C> = row.iter().map(|l| (C::new(0.0, -std::f64::consts::TAU) * l).exp()).collect();
            let p = Poly::from_roots(roots.iter());
            (0..r).map(|k| p.coeff(r - 1 - k)).collect()
        })
        .collect();
    AParam::new(r, a)
}

/// Exponent table `[λ_i, λ_i⁻]` of a four-pole rank-2 connection, with `d = -1`.
pub fn exponent_table(exp: &ExponentData<C>) -> (Vec<Vec<C>>, i64) {
    ((0..4).map(|i| vec![exp.lambda[i], exp.lambda_minus(i)]).collect(), -1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharData {
    pub a: AParam,
    /// `(tr γ1γ2, tr γ2γ3, tr γ1γ3)` for rank 2 with at least three punctures.
    pub pairwise: Option<[C; 3]>,
    pub relation_residual: f64,
}

pub fn char_map(rep: &SurfaceGroupRep, tol: f64) -> Result<CharData, CharVarError> {
    let res = rep.relation_residual();
    if res.is_nan() || res > tol * rep.scale().powi(2 * (2 * rep.g + rep.n) as i32).max(1.0) {
        return Err(CharVarError::Relation(res));
    }
    let a = AParam::new(rep.r, rep.gamma.iter().map(char_coefficients).collect())?;
    let pairwise = (rep.r == 2 && rep.n >= 3).then(|| {
        let t = |i: usize, j: usize| (&rep.gamma[i] * &rep.gamma[j]).trace();
        [t(0, 1), t(1, 2), t(0, 2)]
    });
    Ok(CharData { a, pairwise, relation_residual: res })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingOptions {
    pub max_attempts: usize,
    /// Acceptance tolerance for `char_map(rep) = target`, relative to the rep scale.
    pub tol: f64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions { max_attempts: 200, tol: 1e-10 }
    }
}

fn random_c(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_gl2(rng: &mut ChaCha8Rng) -> CMat {
    loop {
        let m = CMat::from_fn(2, 2, |_, _| random_c(rng));
        if m.determinant().norm() > 0.2 {
            return m;
        }
    }
}

fn companion(a: &[C]) -> CMat {
    // s^2 + a1 s + a0
    CMat::from_row_slice(2, 2, &[C::new(0.0, 0.0), -a[1], C::new(1.0, 0.0), -a[0]])
}

fn shear(s: C) -> (CMat, CMat) {
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    (CMat::from_row_slice(2, 2, &[one, s, zero, one]), CMat::from_row_slice(2, 2, &[one, -s, zero, one]))
}

/// Roots of a polynomial via the eigenvalues of its companion matrix.
fn poly_roots(p: &Poly<C>) -> Vec<C> {
    let Some(deg) = p.degree_within() else { return vec![] };
    if deg == 0 {
        return vec![];
    }
    let lead = p.coeff(deg);
    let mut m = CMat::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = C::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -p.coeff(i) / lead;
    }
    match m.schur().eigenvalues() {
        Some(v) => v.iter().copied().collect(),
        None => vec![],
    }
}

/// Samples a rank-2 representation whose puncture matrices have the target
/// characteristic polynomials. The last puncture matrix is solved from the
/// relation; one free generator is sheared by `[[1, s], [0, 1]]` and `s` is
/// chosen among the roots of the resulting trace equation.
pub fn random_rep_with_a(g: usize, n: usize, r: usize, target: &AParam, seed: u64, opts: &SamplingOptions) -> Result<SurfaceGroupRep, CharVarError> {
    if r != 2 || target.r != 2 {
        return Err(CharVarError::Rank(r));
    }
    if target.n() != n {
        return Err(CharVarError::Shape(format!("target has {} rows, expected {n}", target.n())));
    }
    if n == 0 {
        return Err(CharVarError::Shape("at least one puncture is required".into()));
    }
    let pr = target.product_residual();
    if pr > 1e-10 {
        return Err(CharVarError::AParamProduct(pr));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..opts.max_attempts {
        let alpha: Vec<CMat> = (0..g).map(|_| random_gl2(&mut rng)).collect();
        let beta: Vec<CMat> = (0..g).map(|_| random_gl2(&mut rng)).collect();
        let gamma: Vec<CMat> = (0..n - 1)
            .map(|i| {
                let p = random_gl2(&mut rng);
                &p * companion(&target.a[i]) * inverse(&p)
            })
            .collect();
        if g == 0 && n == 1 {
            let rep = SurfaceGroupRep { g, n, r, alpha, beta, gamma: vec![CMat::identity(2, 2)] };
            return accept(rep, target, opts).ok_or(CharVarError::Sampling(1));
        }
        let build = |s: C, alpha: &[CMat], beta: &[CMat], gamma: &[CMat]| -> SurfaceGroupRep {
            let (u, ui) = shear(s);
            let mut beta = beta.to_vec();
            let mut gamma = gamma.to_vec();
            if n >= 2 {
                let k = n - 2;
                gamma[k] = &u * &gamma[k] * &ui;
            } else {
                beta[g - 1] = &u * &beta[g - 1] * &ui;
            }
            let mut rep = SurfaceGroupRep { g, n, r, alpha: alpha.to_vec(), beta, gamma: gamma.clone() };
            rep.gamma.push(CMat::identity(2, 2));
            let last = inverse(&rep.relation_product());
            rep.gamma[n - 1] = last;
            rep
        };
        let target_tr = -target.a[n - 1][0];
        let f = |s: C, gamma: &[CMat]| build(s, &alpha, &beta, gamma).gamma[n - 1].trace() - target_tr;
        let nodes: Vec<C> = [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|x| C::new(*x, 0.0)).collect();
        let vals: Vec<C> = nodes.iter().map(|s| f(*s, &gamma)).collect();
        let p = Poly::interpolate(&nodes, &vals);
        let mut roots = poly_roots(&p);
        if roots.is_empty() {
            continue;
        }
        for s in roots.iter_mut() {
            for _ in 0..4 {
                let h = 1e-6 * (1.0 + s.norm());
                let fs = f(*s, &gamma);
                let df = (f(*s + h, &gamma) - f(*s - h, &gamma)) / (2.0 * h);
                if df.norm() == 0.0 {
                    break;
                }
                *s -= fs / df;
            }
        }
        let pick = rng.random_range(0..roots.len());
        let s = roots[pick];
        if !s.re.is_finite() || !s.im.is_finite() || s.norm() > 1e6 {
            continue;
        }
        let rep = build(s, &alpha, &beta, &gamma);
        if let Some(rep) = accept(rep, target, opts) {
            return Ok(rep);
        }
    }
    Err(CharVarError::Sampling(opts.max_attempts))
}

fn accept(rep: SurfaceGroupRep, target: &AParam, opts: &SamplingOptions) -> Option<SurfaceGroupRep> {
    let scale = rep.scale();
    let cd = char_map(&rep, 1e-8).ok()?;
    (cd.a.max_distance(target) <= opts.tol * scale * scale && rep.relation_residual() <= 1e-12 * scale.powi(4).max(1.0)).then_some(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn trivial_exponents() {
        let a = rh_exponents(&vec![vec![c(0., 0.); 2]; 4], 0, 1e-12).unwrap();
        for row in &a.a {
            assert!((row[0] - c(-2., 0.)).norm() < 1e-14 && (row[1] - c(1., 0.)).norm() < 1e-14);
        }
    }

    #[test]
    fn quarter_exponents() {
        let a = rh_exponents(&[vec![c(0.25, 0.), c(-0.25, 0.)]], 0, 1e-12).unwrap();
        assert!(a.a[0][0].norm() < 1e-14 && (a.a[0][1] - c(1., 0.)).norm() < 1e-14);
    }

    #[test]
    fn sum_condition_enforced() {
        assert!(matches!(rh_exponents(&[vec![c(0.25, 0.), c(0.25, 0.)]], 0, 1e-12), Err(CharVarError::LambdaSum(_))));
    }

    #[test]
    fn identity_generators() {
        let id = CMat::identity(3, 3);
        let rep = SurfaceGroupRep::new(2, 3, 3, vec![id.clone(); 2], vec![id.clone(); 2], vec![id.clone(); 3]).unwrap();
        let cd = char_map(&rep, 1e-12).unwrap();
        for row in &cd.a.a {
            // (s-1)^3 = s^3 - 3s^2 + 3s - 1
            let want = [c(-3., 0.), c(3., 0.), c(-1., 0.)];
            assert!(row.iter().zip(want).all(|(x, y)| (x - y).norm() < 1e-14));
        }
    }

    #[test]
    fn genus_one_commutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_gl2(&mut rng);
        let b = random_gl2(&mut rng);
        let g1 = inverse(&commutator(&a, &b));
        let rep = SurfaceGroupRep::new(1, 1, 2, vec![a], vec![b], vec![g1]).unwrap();
        assert!(rep.relation_residual() < 1e-12);
        let cd = char_map(&rep, 1e-10).unwrap();
        assert!((cd.a.a0(0) - c(1., 0.)).norm() < 1e-12);
    }

    #[test]
    fn sampling_hits_target() {
        let l = [0.11, 0.12, 0.13, 0.15];
        let table: Vec<Vec<C>> = (0..4).map(|i| vec![c(l[i], 0.), c(if i == 3 { 1.0 - l[i] } else { -l[i] }, 0.)]).collect();
        let target = rh_exponents(&table, -1, 1e-12).unwrap();
        let rep = random_rep_with_a(0, 4, 2, &target, 7, &SamplingOptions::default()).unwrap();
        assert!(rep.relation_residual() <= 1e-12);
        let cd = char_map(&rep, 1e-10).unwrap();
        assert!(cd.a.max_distance(&target) < 1e-10);
        let again = random_rep_with_a(0, 4, 2, &target, 7, &SamplingOptions::default()).unwrap();
        assert_eq!(rep, again);
    }

    #[test]
    fn sampling_higher_genus() {
        let table = vec![vec![c(0.2, 0.), c(-0.2, 0.)], vec![c(0.3, 0.1), c(-0.3, -0.1)]];
        let target = rh_exponents(&table, 0, 1e-12).unwrap();
        for (g, n) in [(1, 2), (2, 2)] {
            let rep = random_rep_with_a(g, n, 2, &target, 11, &SamplingOptions::default()).unwrap();
            assert!(char_map(&rep, 1e-10).unwrap().a.max_distance(&target) < 1e-10);
        }
        let t1 = AParam::new(2, vec![vec![c(-0.5, 0.), c(1., 0.)]]).unwrap();
        let rep = random_rep_with_a(1, 1, 2, &t1, 5, &SamplingOptions::default()).unwrap();
        assert!(char_map(&rep, 1e-10).unwrap().a.max_distance(&t1) < 1e-10);
    }
}
