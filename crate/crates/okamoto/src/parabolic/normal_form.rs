//! The map `p` to the blown-up Hirzebruch surface, its inverse on the main
//! chart, the families over the exceptional points and triangular gauges.

use serde::{Deserialize, Serialize};

use super::{kernel2, mat_vec, inv2, ExponentData, ParabolicError, PhiConnection, V2};
use crate::field::Field;
use crate::poly::Poly;

/// A point `(q, [-h1 : h2])` of `P(Ω¹(D(t)) ⊕ O)` over `q ∈ P¹` (finite `q`).
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePoint<F> {
    pub q: F,
    pub iota: V2<F>,
}

impl<F: Field> SurfacePoint<F> {
    /// Main-chart point with `h2 = 1`.
    pub fn chart(q: F, h1: F) -> Self {
        SurfacePoint { q, iota: [-h1, F::one()] }
    }

    pub fn on_d0(&self) -> bool {
        self.iota[1].is_zero_within(self.iota[0].magnitude())
    }

    /// `h1 / h2`, the affine fibre coordinate; `None` on `D0`.
    pub fn h1(&self) -> Option<F> {
        if self.on_d0() {
            None
        } else {
            Some(-self.iota[0].clone() / self.iota[1].clone())
        }
    }

    /// The exceptional point `b_i^±` as a surface point:
    /// `(t_i, [λ_i^± ∏_{j≠i}(t_i - t_j) : 1])`.
    pub fn exceptional(exp: &ExponentData<F>, i: usize, plus: bool) -> Self {
        let kappa = exp.lambda_signed(i, plus) * exp.prod_except(i);
        SurfacePoint { q: exp.t[i].clone(), iota: [kappa, F::one()] }
    }
}

/// Float surface point as stored in reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePointV1 {
    pub q: num_complex::Complex64,
    pub iota: [num_complex::Complex64; 2],
}

impl<F: Field> From<&SurfacePoint<F>> for SurfacePointV1 {
    fn from(s: &SurfacePoint<F>) -> Self {
        SurfacePointV1 { q: s.q.to_c64(), iota: [s.iota[0].to_c64(), s.iota[1].to_c64()] }
    }
}

/// Inverse of `p` on the main chart: `φ = id`, `ω4 = τ_q(h1)`, `ω1 = -ω4`,
/// `ω3 = (z-q)/((t4-q) Q) dz` and `ω2` from the residue equations.
///
/// The section `τ_q(h1)` is the form with constant numerator `h1`, i.e.
/// `h1 dz / Q(z)`; it takes value `h1` in the numerator at `q` for every `q`.
pub fn from_surface_point<F: Field>(s: &SurfacePoint<F>, exp: &ExponentData<F>) -> Result<PhiConnection<F>, ParabolicError> {
    let h1 = s.h1().ok_or_else(|| ParabolicError::OffChart("point on D0 (h2 = 0)".into()))?;
    let scale = exp.scale().max(s.q.magnitude());
    for i in 0..4 {
        if (s.q.clone() - exp.t[i].clone()).is_zero_within(scale) {
            for plus in [true, false] {
                let b = SurfacePoint::exceptional(exp, i, plus);
                let hb = b.h1().expect("exceptional points are in the chart");
                if (hb - h1.clone()).is_zero_within(h1.magnitude().max(scale)) {
                    return Err(ParabolicError::OnExceptionalPoint { index: i + 1, sign: if plus { '+' } else { '-' } });
                }
            }
            return Err(ParabolicError::OffChart(format!("point on D{}", i + 1)));
        }
    }
    let t4 = exp.t[3].clone();
    let n4 = Poly::constant(h1.clone());
    let n1 = Poly::constant(-h1);
    let n3 = Poly::linear_root(s.q.clone()).scale(&(F::one() / (t4 - s.q.clone())));
    let mut n2_vals = Vec::with_capacity(4);
    let mut lines: [V2<F>; 4] = std::array::from_fn(|_| [F::zero(), F::zero()]);
    let mut r2s = Vec::with_capacity(4);
    for i in 0..4 {
        let pe = exp.prod_except(i);
        let ti = &exp.t[i];
        let r4 = n4.eval(ti) / pe.clone();
        let r3 = n3.eval(ti) / pe.clone();
        if r3.is_zero_within(scale) {
            return Err(ParabolicError::DegenerateResidue(i + 1));
        }
        let l = exp.lambda[i].clone();
        let d = ExponentData::<F>::delta(i);
        let r2 = -(r4.clone() + l.clone()) * (r4.clone() + d.clone() - l.clone()) / r3.clone();
        n2_vals.push(r2.clone() * pe);
        let m = [[-r4.clone() - l.clone(), r2.clone()], [r3.clone(), r4 + d - l]];
        lines[i] = kernel2(&m).ok_or(ParabolicError::DegenerateResidue(i + 1))?;
        r2s.push(r2);
    }
    let n2 = Poly::interpolate(&exp.t, &n2_vals);
    Ok(PhiConnection {
        exponents: exp.clone(),
        phi1: F::one(),
        phi2: F::one(),
        phi3: Poly::zero(),
        omega: [n1, n2, n3, n4],
        lines,
    })
}

/// `p(E1, E2, φ, ∇, l) = (q, [-h1 : h2])`: `q` is the zero of `u` (the
/// numerator of `ω3`), `h1 = N4(q)`, `h2 = φ2`.
pub fn p_map<F: Field>(conn: &PhiConnection<F>) -> Result<SurfacePoint<F>, ParabolicError> {
    let n3 = &conn.omega[2];
    let s = n3.max_abs();
    if n3.is_zero_within(conn.scale()) || s == 0.0 {
        return Err(ParabolicError::UVanishes);
    }
    let c1 = n3.coeff(1);
    if c1.is_zero_within(s) {
        return Err(ParabolicError::PointAtInfinity);
    }
    let q = -n3.coeff(0) / c1;
    let h1 = conn.omega[3].eval(&q);
    let h2 = conn.phi2.clone();
    let iota = [-h1, h2];
    if iota[0].is_zero_within(conn.scale()) && iota[1].is_zero_within(conn.scale()) {
        return Err(ParabolicError::IotaZero);
    }
    Ok(SurfacePoint { q, iota })
}

/// Branch of the fibre of `p` over an exceptional point. `Plus`/`Minus`
/// are the curves over `b_i^±` when `λ_i^+ ≠ λ_i^-`; `C1`/`C2` are the two
/// components over the single point `b_i` when they coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FibreBranch {
    Plus,
    Minus,
    C1,
    C2,
}

/// Member of the family over `b_i^{sign}` (`i` is 0-based). For `Plus`,
/// `Minus`, `C1` the parameter is `[φ1 : res_{t_i} ω2]`; for `C2` it is the
/// line `l_i`.
pub fn exceptional_fiber_member<F: Field>(
    exp: &ExponentData<F>,
    i: usize,
    branch: FibreBranch,
    param: V2<F>,
) -> Result<PhiConnection<F>, ParabolicError> {
    if i >= 4 {
        return Err(ParabolicError::Index(i));
    }
    if param[0].is_exact_zero() && param[1].is_exact_zero() {
        return Err(ParabolicError::ZeroParameter);
    }
    let coincident = exp.coincident(i);
    match (coincident, branch) {
        (false, FibreBranch::C1 | FibreBranch::C2) => {
            return Err(ParabolicError::Precondition(format!("λ{}+ ≠ λ{}-: use Plus/Minus", i + 1, i + 1)))
        }
        (true, FibreBranch::Plus | FibreBranch::Minus) => {
            return Err(ParabolicError::Precondition(format!("λ{}+ = λ{}-: use C1/C2", i + 1, i + 1)))
        }
        _ => {}
    }
    let (phi1, rho) = match branch {
        FibreBranch::C2 => (F::one(), F::zero()),
        _ => (param[0].clone(), param[1].clone()),
    };
    let plus = branch != FibreBranch::Minus;
    let kappa = exp.lambda_signed(i, plus) * exp.prod_except(i);
    let n1 = Poly::constant(phi1.clone() * kappa.clone());
    let n4 = Poly::constant(-kappa.clone());
    let n3 = Poly::linear_root(exp.t[i].clone());
    let mut n2_vals = Vec::with_capacity(4);
    let mut lines: [V2<F>; 4] = std::array::from_fn(|_| [F::zero(), F::zero()]);
    for k in 0..4 {
        let pe = exp.prod_except(k);
        if k == i {
            n2_vals.push(rho.clone() * pe);
            lines[k] = match branch {
                FibreBranch::Plus | FibreBranch::C1 => [F::one(), F::zero()],
                FibreBranch::Minus => {
                    let gap = exp.lambda_minus(i) - exp.lambda[i].clone();
                    [rho.clone(), -(phi1.clone() * gap)]
                }
                FibreBranch::C2 => param.clone(),
            };
            continue;
        }
        let kk = kappa.clone() / pe.clone();
        let r3 = n3.eval(&exp.t[k]) / pe.clone();
        let l = exp.lambda[k].clone();
        let d = ExponentData::<F>::delta(k);
        let r2 = phi1.clone() * (kk.clone() - l.clone()) * (d.clone() - kk.clone() - l.clone()) / r3.clone();
        n2_vals.push(r2.clone() * pe);
        let m = [[phi1.clone() * (kk.clone() - l.clone()), r2], [r3, d - kk - l]];
        lines[k] = kernel2(&m).ok_or(ParabolicError::DegenerateResidue(k + 1))?;
    }
    if matches!(branch, FibreBranch::Minus) && lines[i][0].is_exact_zero() && lines[i][1].is_exact_zero() {
        return Err(ParabolicError::DegenerateResidue(i + 1));
    }
    let n2 = Poly::interpolate(&exp.t, &n2_vals);
    Ok(PhiConnection {
        exponents: exp.clone(),
        phi1,
        phi2: F::one(),
        phi3: Poly::zero(),
        omega: [n1, n2, n3, n4],
        lines,
    })
}

/// Upper-triangular automorphism `[[c1, c3(z)], [0, c2]]` of `O ⊕ O(-1)`,
/// `deg c3 ≤ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge<F> {
    pub c1: F,
    pub c2: F,
    pub c3: Poly<F>,
}

impl<F: Field> Gauge<F> {
    pub fn identity() -> Self {
        Gauge { c1: F::one(), c2: F::one(), c3: Poly::zero() }
    }

    pub fn at(&self, z: &F) -> [[F; 2]; 2] {
        [[self.c1.clone(), self.c3.eval(z)], [F::zero(), self.c2.clone()]]
    }
}

/// `(φ, ∇) ↦ (g2⁻¹ φ g1, g2⁻¹ ∇ g1)`, lines `l_i ↦ g1(t_i)⁻¹ l_i`.
///
/// With `d_can` twisted on `e2`, `[d_can, g1] = [[0, -c3(t4) dz/(z-t4)], [0, 0]]`.
pub fn gauge_transform<F: Field>(conn: &PhiConnection<F>, g1: &Gauge<F>, g2: &Gauge<F>) -> PhiConnection<F> {
    let exp = &conn.exponents;
    let (c1, c2, c3) = (&g1.c1, &g1.c2, &g1.c3);
    let (d1, d2, d3) = (&g2.c1, &g2.c2, &g2.c3);
    let k = |x: &F| Poly::constant(x.clone());
    let phi1p = conn.phi1.clone() * c1.clone() / d1.clone();
    let phi2p = conn.phi2.clone() * c2.clone() / d2.clone();
    // φ g1 = [[φ1 c1, φ1 c3 + φ3 c2], [0, φ2 c2]]
    let pg12 = &c3.scale(&conn.phi1) + &conn.phi3.scale(c2);
    let phi3p = &pg12.scale(&(F::one() / d1.clone()))
        - &d3.scale(&(conn.phi2.clone() * c2.clone() / (d1.clone() * d2.clone())));
    let [n1, n2, n3, n4] = &conn.omega;
    let y = exp.tau_numerator().scale(&(-c3.eval(&exp.t[3]) * conn.phi1.clone()));
    let s11 = n1.scale(c1);
    let s12 = &(&(n1 * c3) + &n2.scale(c2)) + &y;
    let s21 = n3.scale(c1);
    let s22 = &(n3 * c3) + &n4.scale(c2);
    let inv_d1 = F::one() / d1.clone();
    let f = F::one() / (d1.clone() * d2.clone());
    let m1 = &s11.scale(&inv_d1) - &(&(d3 * &s21) * &k(&f));
    let m2 = &s12.scale(&inv_d1) - &(&(d3 * &s22) * &k(&f));
    let m3 = s21.scale(&(F::one() / d2.clone()));
    let m4 = s22.scale(&(F::one() / d2.clone()));
    let lines = std::array::from_fn(|i| mat_vec(&inv2(&g1.at(&exp.t[i])), &conn.lines[i]));
    PhiConnection {
        exponents: exp.clone(),
        phi1: phi1p,
        phi2: phi2p,
        phi3: phi3p,
        omega: [m1, m2, m3, m4],
        lines,
    }
}

/// Invariant of a φ-connection lying over an exceptional point `b_i`
/// (`q = t_i`, `φ2 ≠ 0`): gauge it to the normal form of the family
/// (`φ = diag(φ1, 1)`, `N3 = z - t_i`, `N4` constant) and return
/// `[φ1 : res_{t_i} ω2]`, defined up to a common scalar.
pub fn exceptional_invariant<F: Field>(conn: &PhiConnection<F>, i: usize) -> Result<V2<F>, ParabolicError> {
    let exp = &conn.exponents;
    let n3 = &conn.omega[2];
    let a = n3.coeff(1);
    let sc = conn.scale();
    if a.is_zero_within(sc) || !n3.eval(&exp.t[i]).is_zero_within(sc) {
        return Err(ParabolicError::Precondition(format!("zero of u is not t{}", i + 1)));
    }
    if conn.phi2.is_zero_within(sc) {
        return Err(ParabolicError::DegeneratePhi("phi2 = 0".into()));
    }
    let c2 = a.clone() / conn.phi2.clone();
    let n4 = &conn.omega[3];
    let (m, _) = (n4 - &Poly::constant(n4.eval(&exp.t[i])))
        .div_rem(&Poly::linear_root(exp.t[i].clone()))
        .expect("nonzero divisor");
    let c3 = m.scale(&(-(c2.clone()) / a.clone()));
    let g1 = Gauge { c1: F::one(), c2: c2.clone(), c3: c3.clone() };
    let pg12 = &c3.scale(&conn.phi1) + &conn.phi3.scale(&c2);
    let d3 = pg12.scale(&(a.clone() / (conn.phi2.clone() * c2)));
    let g2 = Gauge { c1: F::one(), c2: a, c3: d3 };
    let norm = gauge_transform(conn, &g1, &g2);
    Ok([norm.phi1.clone(), norm.omega_residue(1, i)])
}

/// Projective equality `[a0 : a1] = [b0 : b1]`.
pub fn projectively_equal<F: Field>(a: &V2<F>, b: &V2<F>) -> bool {
    super::parallel(a, b)
}
