//! α-stability of parabolic connections and (α', β)-stability of
//! parabolic φ-connections, by explicit enumeration of the candidate
//! destabilizing subobjects of `O ⊕ O(-1)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{
    kernel2, mat_mul, mu_phi, mu_phi_full, parabolic_degree, parabolic_degree_full, parallel, ExponentData, Incidence,
    ParabolicError, PhiConnection, Weight, M2, V2,
};
use crate::field::Field;
use crate::poly::Poly;

/// A line subbundle of `O ⊕ O(-1)`: `O` itself (`e1`), or `O(-1)` embedded as
/// `span(p e1 + e2)` with `deg p ≤ 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum LineSub<F> {
    E1,
    Graph(Poly<F>),
}

impl<F: Field> LineSub<F> {
    pub fn degree(&self) -> i64 {
        match self {
            LineSub::E1 => 0,
            LineSub::Graph(_) => -1,
        }
    }

    pub fn fibre(&self, z: &F) -> V2<F> {
        match self {
            LineSub::E1 => [F::one(), F::zero()],
            LineSub::Graph(p) => [p.eval(z), F::one()],
        }
    }

    pub fn incidence(&self, conn: &PhiConnection<F>) -> [Incidence; 4] {
        std::array::from_fn(|i| {
            if parallel(&self.fibre(&conn.exponents.t[i]), &conn.lines[i]) {
                Incidence::Contains
            } else {
                Incidence::Transverse
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            LineSub::E1 => "O+0".into(),
            LineSub::Graph(p) => format!("O(-1) via p = {:?}", p.coeffs.iter().map(|c| c.to_c64()).collect::<Vec<_>>()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubbundleWitness<F> {
    pub sub: LineSub<F>,
    pub incidence: [Incidence; 4],
    pub pardeg: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<W> {
    Stable,
    StrictlySemistable(W),
    Unstable(W),
}

impl<W> Verdict<W> {
    pub fn is_stable(&self) -> bool {
        matches!(self, Verdict::Stable)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Stable => None,
            Verdict::StrictlySemistable(w) | Verdict::Unstable(w) => Some(w),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::StrictlySemistable(_) => "strictly-semistable",
            Verdict::Unstable(_) => "unstable",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaStability<F> {
    pub verdict: Verdict<SubbundleWitness<F>>,
    pub pardeg_e: BigRational,
    /// Every invariant line subbundle examined, with its parabolic degree.
    pub invariant_subbundles: Vec<SubbundleWitness<F>>,
}

fn ceil(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

/// Residue of the connection `d + diag(0, dz/(z-t4)) + Φ⁻¹Ω` at `t_i`.
pub fn connection_residue<F: Field>(conn: &PhiConnection<F>, i: usize) -> Result<M2<F>, ParabolicError> {
    let r = conn.residue(i)?;
    let p = conn.phi_at(&conn.exponents.t[i]);
    if !conn.phi_invertible() {
        return Err(ParabolicError::DegeneratePhi("phi is not invertible".into()));
    }
    Ok(mat_mul(&super::inv2(&p), &r))
}

/// Numerators over `Q` of `Φ⁻¹ Ω` scaled by `φ1 φ2`, so they are polynomial.
fn scaled_connection_numerators<F: Field>(conn: &PhiConnection<F>) -> [Poly<F>; 4] {
    let [n1, n2, n3, n4] = &conn.omega;
    let (p1, p2) = (&conn.phi1, &conn.phi2);
    let m11 = &n1.scale(p2) - &(&conn.phi3 * n3);
    let m12 = &n2.scale(p2) - &(&conn.phi3 * n4);
    let m21 = n3.scale(p1);
    let m22 = n4.scale(p1);
    [m11, m12, m21, m22]
}

/// `span(p e1 + e2)` is invariant iff
/// `p' Q = A21 p² + (A22 + T - A11) p - A12` (numerators over `Q`).
pub fn graph_is_invariant<F: Field>(conn: &PhiConnection<F>, p: &Poly<F>) -> bool {
    let [m11, m12, m21, m22] = scaled_connection_numerators(conn);
    let w = conn.wedge2_phi();
    let q = conn.exponents.q_poly();
    let t = conn.exponents.tau_numerator().scale(&w);
    let lhs = (&p.derivative() * &q).scale(&w);
    let pp = p * p;
    let rhs = &(&(&m21 * &pp) + &(&(&(&m22 + &t) - &m11) * p)) - &m12;
    let res = &lhs - &rhs;
    let scale = [lhs.max_abs(), rhs.max_abs(), m12.max_abs(), 1.0].into_iter().fold(0.0, f64::max);
    res.is_zero_within(scale)
}

/// Degree −1 invariant subbundles: interpolate eigenlines at `t1`, `t2`
/// and test the invariance identity.
fn degree_minus_one_candidates<F: Field>(conn: &PhiConnection<F>) -> Result<Vec<Poly<F>>, ParabolicError> {
    let exp = &conn.exponents;
    let mut eig: Vec<Vec<F>> = Vec::new();
    for i in 0..2 {
        let a = connection_residue(conn, i)?;
        let mut vals = Vec::new();
        for mu in [exp.lambda[i].clone(), exp.lambda_minus(i)] {
            let m = [[a[0][0].clone() - mu.clone(), a[0][1].clone()], [a[1][0].clone(), a[1][1].clone() - mu]];
            if let Some(v) = kernel2(&m) {
                if !v[1].is_zero_within(v[0].magnitude()) {
                    vals.push(v[0].clone() / v[1].clone());
                }
            }
        }
        eig.push(vals);
    }
    let mut out: Vec<Poly<F>> = Vec::new();
    for p1 in &eig[0] {
        for p2 in &eig[1] {
            let p = Poly::interpolate(&exp.t[..2], &[p1.clone(), p2.clone()]);
            if graph_is_invariant(conn, &p) && !out.iter().any(|o| (o - &p).is_zero_within(p.max_abs())) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// α-stability for an honest connection (`φ` invertible), with
/// `α = α' β1/(β1+β2)`. Destabilizers are ∇-invariant line subbundles `F`
/// with `pardeg F ≥ pardeg E / 2`; only degrees `d ≥ ⌈pardeg E/2 - Σ α_{2i}⌉`
/// can qualify. Degrees 0 and −1 are searched and all invariant ones are
/// listed in the result.
pub fn is_alpha_stable<F: Field>(conn: &PhiConnection<F>, weight: &Weight) -> Result<AlphaStability<F>, ParabolicError> {
    if !conn.phi_invertible() {
        return Err(ParabolicError::DegeneratePhi("alpha-stability needs invertible phi".into()));
    }
    let alpha = weight.alpha();
    let pe = parabolic_degree_full(weight);
    let half = &pe / BigRational::from_integer(2.into());
    let even: BigRational = (0..4).fold(BigRational::zero(), |a, i| a + &alpha[2 * i + 1]);
    let d_min = ceil(&(&half - &even));
    if d_min < BigInt::from(-1) {
        return Err(ParabolicError::UnsupportedWeight(format!("destabilizers of degree {d_min} would need searching")));
    }
    let mut subs: Vec<LineSub<F>> = Vec::new();
    if conn.omega[2].is_zero_within(conn.scale()) {
        subs.push(LineSub::E1);
    }
    subs.extend(degree_minus_one_candidates(conn)?.into_iter().map(LineSub::Graph));
    let invariant: Vec<SubbundleWitness<F>> = subs
        .into_iter()
        .map(|s| {
            let inc = s.incidence(conn);
            let pd = parabolic_degree(&inc, weight, s.degree());
            SubbundleWitness { sub: s, incidence: inc, pardeg: pd }
        })
        .collect();
    let worst = invariant.iter().max_by(|a, b| a.pardeg.cmp(&b.pardeg)).cloned();
    let verdict = match worst {
        Some(w) if w.pardeg > half => Verdict::Unstable(w),
        Some(w) if w.pardeg == half => Verdict::StrictlySemistable(w),
        _ => Verdict::Stable,
    };
    Ok(AlphaStability { verdict, pardeg_e: pe, invariant_subbundles: invariant })
}

/// A sub-pair `(F1, F2)` with `φ(F1) ⊆ F2`, `∇(F1) ⊆ F2 ⊗ Ω¹(D)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubpairWitness {
    pub label: String,
    pub ranks: (i64, i64),
    pub degrees: (i64, i64),
    pub incidence: [Incidence; 4],
    pub mu: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhiStability {
    pub verdict: Verdict<SubpairWitness>,
    pub mu_e: BigRational,
    pub candidates: Vec<SubpairWitness>,
}

fn exact_quotient<F: Field>(a: &Poly<F>, b: &Poly<F>) -> Option<Poly<F>> {
    let (q, r) = a.div_rem(b)?;
    let s = a.max_abs().max(b.max_abs());
    if r.is_zero_within(s) && q.degree_within().is_none_or(|d| d <= 1) {
        Some(q)
    } else {
        None
    }
}

/// (α', β)-stability of a parabolic φ-connection. Sub-pairs are grouped by
/// ranks; the ones that can reach `μ(E1, E2)` are built explicitly, the rest
/// are dismissed by an exact upper bound on their slope. If a bound cannot
/// dismiss a family that is not enumerated, the weight is reported as
/// unsupported.
pub fn is_phi_stable<F: Field>(conn: &PhiConnection<F>, weight: &Weight) -> Result<PhiStability, ParabolicError> {
    let mu_e = mu_phi_full(weight);
    let sc = conn.scale();
    let zero = |x: &F| x.is_zero_within(sc);
    let [n1, _n2, n3, n4] = &conn.omega;
    let all_contains = [Incidence::Contains; 4];
    let no_inc = [Incidence::Zero; 4];
    let mut cands: Vec<SubpairWitness> = Vec::new();
    let mut push = |label: String, ranks: (i64, i64), degrees: (i64, i64), inc: [Incidence; 4]| {
        let mu = mu_phi(ranks.0, degrees.0, &inc, ranks.1, degrees.1, weight);
        cands.push(SubpairWitness { label, ranks, degrees, incidence: inc, mu });
    };
    let bound = |ranks: (i64, i64), degrees: (i64, i64), inc: &[Incidence; 4]| {
        mu_phi(ranks.0, degrees.0, inc, ranks.1, degrees.1, weight)
    };
    let unsupported = |what: &str| Err(ParabolicError::UnsupportedWeight(format!("{what} not dismissed by slope bound")));

    // (0,1), (0,2): F1 = 0, the largest F2 of each rank.
    push("(0, O)".into(), (0, 1), (0, 0), no_inc);
    push("(0, E2)".into(), (0, 2), (0, -1), no_inc);

    // (1,2): F2 = E2 and F1 any line subbundle.
    let e1 = LineSub::<F>::E1;
    push("(O, E2)".into(), (1, 2), (0, -1), e1.incidence(conn));
    if bound((1, 2), (-1, -1), &all_contains) >= mu_e {
        return unsupported("(1,2) with deg F1 = -1");
    }

    // (1,1)
    if n3.is_zero_within(sc) {
        push("(O, O)".into(), (1, 1), (0, 0), e1.incidence(conn));
    }
    if zero(&conn.phi1) && !n3.is_zero_within(sc)
        && exact_quotient(n1, n3).is_some() {
            push("(O, O(-1))".into(), (1, 1), (0, -1), e1.incidence(conn));
        }
    if zero(&conn.phi2) && !n3.is_zero_within(sc) {
        if let Some(p) = exact_quotient(&-n4, n3) {
            let s = LineSub::Graph(p);
            push("(O(-1), O)".into(), (1, 1), (-1, 0), s.incidence(conn));
        }
    }
    if conn.phi_invertible() {
        if bound((1, 1), (-1, -1), &all_contains) >= mu_e {
            for p in degree_minus_one_candidates(conn)? {
                let s = LineSub::Graph(p);
                push("(O(-1), O(-1))".into(), (1, 1), (-1, -1), s.incidence(conn));
            }
        }
    } else if bound((1, 1), (-1, -1), &all_contains) >= mu_e {
        return unsupported("(1,1) with degrees (-1,-1) and degenerate phi");
    }
    for d in [(0, -2), (-2, 0), (-1, -2), (-2, -1)] {
        if bound((1, 1), d, &all_contains) >= mu_e {
            return unsupported("(1,1) with total degree <= -2");
        }
    }

    // (2,1) and (1,0) need a degenerate φ.
    if !conn.phi_invertible() {
        let (p1z, p2z) = (zero(&conn.phi1), zero(&conn.phi2));
        let phi3z = conn.phi3.is_zero_within(sc);
        let full = [Incidence::Full; 4];
        if p2z && !(p1z && phi3z) {
            if n3.is_zero_within(sc) && n4.is_zero_within(sc) {
                push("(E1, O)".into(), (2, 1), (-1, 0), full);
            }
        } else if p1z && !p2z {
            let c1 = &n1.scale(&conn.phi2) - &(n3 * &conn.phi3);
            let c2 = &conn.omega[1].scale(&conn.phi2) - &(n4 * &conn.phi3);
            if c1.is_zero_within(sc * sc) && c2.is_zero_within(sc * sc) {
                push("(E1, im phi)".into(), (2, 1), (-1, -1), full);
            }
        } else if p1z && p2z && phi3z {
            let det = &(n1 * n4) - &(&conn.omega[1] * n3);
            if det.is_zero_within(sc * sc) {
                if bound((2, 1), (-1, -3), &full) > mu_e {
                    push("(E1, im Omega)".into(), (2, 1), (-1, -3), full);
                } else {
                    return unsupported("(2,1) for phi = 0");
                }
            }
        }
        // (1,0): F1 ⊆ ker φ with ∇|F1 = 0.
        if p1z && !p2z || (p1z && p2z && !phi3z) {
            if n1.is_zero_within(sc) && n3.is_zero_within(sc) {
                push("(O, 0)".into(), (1, 0), (0, 0), e1.incidence(conn));
            }
        } else if p2z && !p1z {
            let p = conn.phi3.scale(&(-F::one() / conn.phi1.clone()));
            let q = conn.exponents.q_poly();
            let t = conn.exponents.tau_numerator();
            let first = &(&(&(&p.derivative() * &q).scale(&conn.phi1) + &(&conn.phi3 * &t)) + &(n1 * &p)) + &conn.omega[1];
            let second = &(n3 * &p) + n4;
            if first.is_zero_within(sc * sc) && second.is_zero_within(sc * sc) {
                let s = LineSub::Graph(p);
                push("(ker phi, 0)".into(), (1, 0), (-1, 0), s.incidence(conn));
            }
        } else if p1z && p2z && phi3z {
            let det = &(n1 * n4) - &(&conn.omega[1] * n3);
            if det.is_zero_within(sc * sc) {
                if bound((1, 0), (-3, 0), &[Incidence::Transverse; 4]) > mu_e {
                    push("(ker Omega, 0)".into(), (1, 0), (-3, 0), [Incidence::Transverse; 4]);
                } else {
                    return unsupported("(1,0) for phi = 0");
                }
            }
        }
    }

    let worst = cands.iter().max_by(|a, b| a.mu.cmp(&b.mu)).cloned();
    let verdict = match worst {
        Some(w) if w.mu > mu_e => Verdict::Unstable(w),
        Some(w) if w.mu == mu_e => Verdict::StrictlySemistable(w),
        _ => Verdict::Stable,
    };
    Ok(PhiStability { verdict, mu_e, candidates: cands })
}

/// Helper for tests and examples: a connection with `ω2 = ω3 = 0`, `φ = id`,
/// with `e1` carrying exponent `λ_i^{±}` according to `e1_plus[i]`. Exists
/// only when the chosen `e1`-exponents sum to zero.
pub fn diagonal_connection<F: Field>(exp: &ExponentData<F>, e1_plus: [bool; 4]) -> Result<PhiConnection<F>, ParabolicError> {
    let r1: Vec<F> = (0..4).map(|i| exp.lambda_signed(i, e1_plus[i])).collect();
    let s = r1.iter().cloned().fold(F::zero(), |a, b| a + b);
    if !s.is_zero_within(exp.scale()) {
        return Err(ParabolicError::Precondition("e1 exponents must sum to zero".into()));
    }
    let vals: Vec<F> = (0..4).map(|i| r1[i].clone() * exp.prod_except(i)).collect();
    let n1 = Poly::interpolate(&exp.t, &vals);
    let n4 = -&n1;
    let lines = std::array::from_fn(|i| if e1_plus[i] { [F::one(), F::zero()] } else { [F::zero(), F::one()] });
    Ok(PhiConnection {
        exponents: exp.clone(),
        phi1: F::one(),
        phi2: F::one(),
        phi3: Poly::zero(),
        omega: [n1, Poly::zero(), Poly::zero(), n4],
        lines,
    })
}
