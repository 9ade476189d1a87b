//! Numerical Riemann–Hilbert map: Fuchsian systems, loop integration and
//! monodromy invariants.
//!
//! Conventions:
//! * The system is `dY/dz = -Σ A_i/(z - t_i) Y`, the equation of horizontal
//!   sections `∇s = 0`; `A_i` has eigenvalues `{λ_i, λ_i⁻}`, so local
//!   monodromy has eigenvalues `exp(-2πiλ)`.
//! * `M_γ` is the transport matrix along `γ` with `Y(b) = I`; composition is
//!   `M_{γδ} = M_δ M_γ`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ode::{integrate_segment, Control, OdeError, OdeOptions, OdeStats};
use crate::parabolic::{connection_residue, ExponentData, ParabolicError, PhiConnection, M2};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

pub(crate) fn eye() -> M2<C> {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub(crate) fn mul(a: &M2<C>, b: &M2<C>) -> M2<C> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

pub(crate) fn sub(a: &M2<C>, b: &M2<C>) -> M2<C> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

pub(crate) fn det(a: &M2<C>) -> C {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub(crate) fn tr(a: &M2<C>) -> C {
    a[0][0] + a[1][1]
}

pub(crate) fn inv(a: &M2<C>) -> M2<C> {
    let d = det(a);
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

/// Frobenius norm.
pub(crate) fn fnorm(a: &M2<C>) -> f64 {
    a.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn eigenvalues(a: &M2<C>) -> [C; 2] {
    let t = tr(a) / 2.0;
    let s = (t * t - det(a)).sqrt();
    [t + s, t - s]
}

/// Matches two unordered pairs; returns the larger of the two distances.
fn pair_distance(a: [C; 2], b: [C; 2]) -> f64 {
    let d1 = (a[0] - b[0]).norm().max((a[1] - b[1]).norm());
    let d2 = (a[0] - b[1]).norm().max((a[1] - b[0]).norm());
    d1.min(d2)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RhError {
    #[error(transparent)]
    Parabolic(#[from] ParabolicError),
    #[error("phi is degenerate; the point lies on the boundary and has no Fuchsian system")]
    DegeneratePhi,
    #[error("path segment {from} -> {to} comes within {distance:.3e} of pole {pole} (clearance {clearance:.3e})")]
    Clearance { from: C, to: C, pole: usize, distance: f64, clearance: f64 },
    #[error("integrator failed on segment {from} -> {to}: {source}")]
    Integration { from: C, to: C, source: OdeError },
    #[error("accuracy not met after refinement: residual {residual:.3e} > {tolerance:.3e}")]
    Accuracy { residual: f64, tolerance: f64 },
    #[error("loop {0} is not closed or is empty")]
    OpenLoop(usize),
    #[error("traces of the representation do not match the exponents: residual {0:.3e}")]
    Inconsistent(f64),
}

/// `dY/dz = -Σ A_i/(z - t_i) Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuchsianSystem {
    pub poles: [C; 4],
    pub residue_matrices: [M2<C>; 4],
}

impl FuchsianSystem {
    pub fn new(poles: [C; 4], residue_matrices: [M2<C>; 4]) -> Self {
        FuchsianSystem { poles, residue_matrices }
    }

    pub fn coefficient(&self, z: C) -> M2<C> {
        let mut s = [[ZERO; 2]; 2];
        for (t, a) in self.poles.iter().zip(&self.residue_matrices) {
            let w = 1.0 / (z - t);
            for i in 0..2 {
                for j in 0..2 {
                    s[i][j] += a[i][j] * w;
                }
            }
        }
        s
    }

    /// Largest mismatch between the eigenvalues of `A_i` and `{λ_i, λ_i⁻}`.
    pub fn eigenvalue_residual(&self, exp: &ExponentData<C>) -> f64 {
        (0..4)
            .map(|i| pair_distance(eigenvalues(&self.residue_matrices[i]), [exp.lambda[i], exp.lambda_minus(i)]))
            .fold(0.0, f64::max)
    }

    pub fn residue_sum(&self) -> M2<C> {
        let mut s = [[ZERO; 2]; 2];
        for a in &self.residue_matrices {
            for i in 0..2 {
                for j in 0..2 {
                    s[i][j] += a[i][j];
                }
            }
        }
        s
    }

    pub fn min_pole_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..4 {
            for j in i + 1..4 {
                d = d.min((self.poles[i] - self.poles[j]).norm());
            }
        }
        d
    }
}

/// Trivialises `(φ ⊗ id)⁻¹ ∘ ∇` in the global frame of `O ⊕ O(-1)`.
pub fn to_fuchsian_system(conn: &PhiConnection<C>) -> Result<FuchsianSystem, RhError> {
    if !conn.phi_invertible() {
        return Err(RhError::DegeneratePhi);
    }
    let mut a = [[[ZERO; 2]; 2]; 4];
    for (i, ai) in a.iter_mut().enumerate() {
        *ai = connection_residue(conn, i)?;
    }
    Ok(FuchsianSystem::new(conn.exponents.t, a))
}

/// A closed polyline from `basepoint` around one pole, counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopPath {
    pub pole: usize,
    pub basepoint: C,
    pub polyline: Vec<C>,
}

impl LoopPath {
    pub fn segments(&self) -> impl Iterator<Item = (C, C)> + '_ {
        self.polyline.windows(2).map(|w| (w[0], w[1]))
    }

    /// Winding number of the polyline around `z`.
    pub fn winding_number(&self, z: C) -> i64 {
        let total: f64 = self.segments().map(|(a, b)| ((b - z) / (a - z)).arg()).sum();
        (total / std::f64::consts::TAU).round() as i64
    }
}

pub(crate) fn segment_distance(a: C, b: C, p: C) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a) * d.conj()).re / len2;
    (a + d * s.clamp(0.0, 1.0) - p).norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyOptions {
    /// Local relative tolerance of the integrator.
    pub tol: f64,
    /// Clearance as a fraction of the minimal pole distance.
    pub clearance_factor: f64,
    /// Loop radius as a fraction of the minimal pole distance.
    pub radius_factor: f64,
    pub vertices: usize,
    /// Defaults to a point below the convex hull of the poles.
    pub basepoint: Option<C>,
    /// Required relation residual; `tol` is refined by 100× steps down to 1e-13 until met.
    pub accuracy: f64,
    /// Also integrate at `tol/10` and report the difference.
    pub estimate_error: bool,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        MonodromyOptions {
            tol: 1e-10,
            clearance_factor: 0.05,
            radius_factor: 0.3,
            vertices: 32,
            basepoint: None,
            accuracy: 1e-8,
            estimate_error: true,
        }
    }
}

pub fn default_basepoint(poles: &[C; 4]) -> C {
    let c = poles.iter().sum::<C>() / 4.0;
    let r = poles.iter().map(|t| (t - c).norm()).fold(0.0, f64::max);
    let mut d = f64::INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            d = d.min((poles[i] - poles[j]).norm());
        }
    }
    c - C::new(0.0, r + d)
}

/// Loops from the basepoint: straight approach, counterclockwise polygon,
/// straight return.
pub fn standard_loops(system: &FuchsianSystem, opts: &MonodromyOptions) -> Result<[LoopPath; 4], RhError> {
    let b = opts.basepoint.unwrap_or_else(|| default_basepoint(&system.poles));
    let dmin = system.min_pole_distance();
    let rho = opts.radius_factor * dmin;
    let loops: [LoopPath; 4] = std::array::from_fn(|i| {
        let t = system.poles[i];
        let u = (b - t) / (b - t).norm();
        let start = t + u * rho;
        let mut poly = vec![b, start];
        let n = opts.vertices.max(4);
        for k in 1..n {
            poly.push(t + u * rho * C::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64));
        }
        poly.push(start);
        poly.push(b);
        LoopPath { pole: i, basepoint: b, polyline: poly }
    });
    for l in &loops {
        check_clearance(system, l, opts.clearance_factor * dmin)?;
    }
    Ok(loops)
}

fn check_clearance(system: &FuchsianSystem, l: &LoopPath, clearance: f64) -> Result<(), RhError> {
    for (a, b) in l.segments() {
        for (j, t) in system.poles.iter().enumerate() {
            let d = segment_distance(a, b, *t);
            if d < clearance {
                return Err(RhError::Clearance { from: a, to: b, pole: j, distance: d, clearance });
            }
        }
    }
    Ok(())
}

fn flatten(m: &M2<C>) -> [C; 4] {
    [m[0][0], m[0][1], m[1][0], m[1][1]]
}

fn unflatten(v: &[C; 4]) -> M2<C> {
    [[v[0], v[1]], [v[2], v[3]]]
}

/// Transport matrix along a polyline, `Y(start) = I`. Each segment is
/// integrated from the identity and the propagators are multiplied; a segment
/// retracing an earlier one uses the inverse of that propagator.
pub fn transport(system: &FuchsianSystem, path: &LoopPath, ode: &OdeOptions) -> Result<(M2<C>, OdeStats), RhError> {
    let mut y = eye();
    let mut stats = OdeStats::default();
    let mut done: Vec<(C, C, M2<C>)> = Vec::new();
    for (a, b) in path.segments() {
        let step = match done.iter().find(|(p, q, _)| *p == b && *q == a) {
            Some((_, _, m)) => inv(m),
            None => {
                let out = integrate_segment(
                    |z, y: &[C; 4]| {
                        let s = system.coefficient(z);
                        let m = mul(&s, &unflatten(y));
                        flatten(&m).map(|c| -c)
                    },
                    a,
                    b,
                    flatten(&eye()),
                    ode,
                    |_, _, _| Control::Continue,
                )
                .map_err(|source| RhError::Integration { from: a, to: b, source })?;
                stats += out.stats;
                let m = unflatten(&out.y);
                done.push((a, b, m));
                m
            }
        };
        y = mul(&step, &y);
    }
    Ok((y, stats))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyRep {
    pub matrices: [M2<C>; 4],
    pub basepoint: C,
    /// Pole indices in the order whose product is the identity.
    pub relation_order: [usize; 4],
    pub error_estimate: f64,
    pub stats: OdeStats,
}

impl MonodromyRep {
    pub fn from_matrices(matrices: [M2<C>; 4]) -> Self {
        MonodromyRep { matrices, basepoint: ZERO, relation_order: [0, 1, 2, 3], error_estimate: 0.0, stats: OdeStats::default() }
    }

    pub fn relation_product(&self) -> M2<C> {
        self.relation_order.iter().fold(eye(), |acc, &i| mul(&acc, &self.matrices[i]))
    }

    pub fn relation_residual(&self) -> f64 {
        fnorm(&sub(&self.relation_product(), &eye()))
    }

    pub fn traces(&self) -> [C; 4] {
        self.matrices.each_ref().map(tr)
    }

    /// `max_i |det M_i - exp(-2πi(λ_i + λ_i⁻))|`.
    pub fn det_residual(&self, exp: &ExponentData<C>) -> f64 {
        (0..4)
            .map(|i| {
                let e = (C::new(0.0, -std::f64::consts::TAU) * (exp.lambda[i] + exp.lambda_minus(i))).exp();
                (det(&self.matrices[i]) - e).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max_i |tr M_i - exp(-2πiλ_i) - exp(-2πiλ_i⁻)|`.
    pub fn trace_residual(&self, exp: &ExponentData<C>) -> f64 {
        let a = expected_traces(exp);
        (0..4).map(|i| (tr(&self.matrices[i]) - a[i]).norm()).fold(0.0, f64::max)
    }

    /// Simultaneous conjugation `g M g⁻¹`.
    pub fn conjugate(&self, g: &M2<C>) -> Self {
        let gi = inv(g);
        MonodromyRep { matrices: self.matrices.each_ref().map(|m| mul(&mul(g, m), &gi)), ..self.clone() }
    }
}

pub fn expected_traces(exp: &ExponentData<C>) -> [C; 4] {
    let e = |l: C| (C::new(0.0, -std::f64::consts::TAU) * l).exp();
    std::array::from_fn(|i| e(exp.lambda[i]) + e(exp.lambda_minus(i)))
}

/// Orders poles by decreasing argument seen from the basepoint. For loops
/// approaching from below this is the order with `M_{o1} M_{o2} M_{o3} M_{o4} = I`.
pub fn relation_order(poles: &[C; 4], basepoint: C) -> [usize; 4] {
    let mut idx = [0, 1, 2, 3];
    // Angles measured from the upward direction, so the branch cut points back at the basepoint.
    let arg = |i: usize| ((poles[i] - basepoint) * C::new(0.0, -1.0)).arg();
    idx.sort_by(|&i, &j| arg(j).total_cmp(&arg(i)));
    idx
}

fn monodromy_once(system: &FuchsianSystem, loops: &[LoopPath; 4], tol: f64) -> Result<([M2<C>; 4], OdeStats), RhError> {
    let ode = OdeOptions::with_tol(tol);
    let res: Vec<Result<(M2<C>, OdeStats), RhError>> = loops.par_iter().map(|l| transport(system, l, &ode)).collect();
    let mut mats = [eye(); 4];
    let mut stats = OdeStats::default();
    for (i, r) in res.into_iter().enumerate() {
        let (m, s) = r?;
        mats[loops[i].pole] = m;
        stats += s;
    }
    Ok((mats, stats))
}

/// Monodromy along explicit loops, one per pole, sharing one basepoint.
/// Refinement floor: below this the integrator's own rounding dominates.
const MIN_TOL: f64 = 1e-13;

pub fn monodromy_along(system: &FuchsianSystem, loops: &[LoopPath; 4], opts: &MonodromyOptions) -> Result<MonodromyRep, RhError> {
    let mut seen = [false; 4];
    for (k, l) in loops.iter().enumerate() {
        if l.polyline.len() < 2 || l.polyline[0] != l.basepoint || *l.polyline.last().unwrap() != l.basepoint || l.pole >= 4 {
            return Err(RhError::OpenLoop(k));
        }
        seen[l.pole] = true;
        check_clearance(system, l, opts.clearance_factor * system.min_pole_distance())?;
    }
    if seen.iter().any(|s| !s) {
        return Err(RhError::OpenLoop(seen.iter().position(|s| !s).unwrap()));
    }
    let b = loops[0].basepoint;
    let order = relation_order(&system.poles, b);
    let mut tol = opts.tol;
    let last_residual = loop {
        let (mats, mut stats) = monodromy_once(system, loops, tol)?;
        let mut rep = MonodromyRep { matrices: mats, basepoint: b, relation_order: order, error_estimate: 0.0, stats };
        if opts.estimate_error {
            let (fine, s2) = monodromy_once(system, loops, tol / 10.0)?;
            stats += s2;
            rep.error_estimate = (0..4).map(|i| fnorm(&sub(&fine[i], &mats[i]))).fold(0.0, f64::max);
            rep.matrices = fine;
            rep.stats = stats;
        }
        let last_residual = rep.relation_residual();
        if last_residual <= opts.accuracy {
            return Ok(rep);
        }
        if tol <= MIN_TOL {
            break last_residual;
        }
        tol = (tol / 100.0).max(MIN_TOL);
    };
    Err(RhError::Accuracy { residual: last_residual, tolerance: opts.accuracy })
}

pub fn monodromy(system: &FuchsianSystem, opts: &MonodromyOptions) -> Result<MonodromyRep, RhError> {
    let loops = standard_loops(system, opts)?;
    monodromy_along(system, &loops, opts)
}

/// Characteristic coefficients `(a1, a0) = (-tr, det)` per pole and the
/// pairwise traces in index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceData {
    pub a: [[C; 2]; 4],
    pub x: C,
    pub y: C,
    pub z: C,
}

impl TraceData {
    pub fn traces(&self) -> [C; 4] {
        self.a.map(|a| -a[0])
    }

    /// Largest deviation in all seven trace coordinates.
    pub fn drift(&self, other: &TraceData) -> f64 {
        let mut d = (self.x - other.x).norm().max((self.y - other.y).norm()).max((self.z - other.z).norm());
        for i in 0..4 {
            d = d.max((self.a[i][0] - other.a[i][0]).norm());
        }
        d
    }
}

pub fn rh_invariants(rep: &MonodromyRep) -> TraceData {
    let m = &rep.matrices;
    TraceData {
        a: m.each_ref().map(|mi| [-tr(mi), det(mi)]),
        x: tr(&mul(&m[0], &m[1])),
        y: tr(&mul(&m[1], &m[2])),
        z: tr(&mul(&m[0], &m[2])),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepClass {
    SmoothLocus,
    Reducible,
    Resonant,
    Indeterminate,
}

impl std::fmt::Display for RepClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RepClass::SmoothLocus => "smooth-locus",
            RepClass::Reducible => "reducible",
            RepClass::Resonant => "resonant",
            RepClass::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: RepClass,
    /// `min ‖M_i - e I‖ / max(1, ‖M_i‖)` over the prescribed eigenvalues.
    pub resonance_score: f64,
    /// Smallest normalised invariance defect of a candidate common line.
    pub reducibility_score: f64,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Decision {
    Yes,
    No,
    Borderline,
}

fn decide(score: f64, tol: f64) -> Decision {
    if score <= tol {
        Decision::Yes
    } else if score <= 10.0 * tol {
        Decision::Borderline
    } else {
        Decision::No
    }
}

fn eigenvectors(m: &M2<C>) -> Vec<[C; 2]> {
    eigenvalues(m)
        .iter()
        .map(|mu| {
            let v1 = [m[0][1], *mu - m[0][0]];
            let v2 = [*mu - m[1][1], m[1][0]];
            let n1 = v1[0].norm().hypot(v1[1].norm());
            let n2 = v2[0].norm().hypot(v2[1].norm());
            let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
            [v[0] / n, v[1] / n]
        })
        .collect()
}

fn invariance_defect(m: &M2<C>, v: &[C; 2]) -> f64 {
    let w = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
    (w[0] * v[1] - w[1] * v[0]).norm() / fnorm(m).max(1.0)
}

/// Resonance by rank tests and reducibility by a common-eigenvector search.
pub fn classify_rep(rep: &MonodromyRep, exp: &ExponentData<C>, tol: f64) -> Result<Classification, RhError> {
    let scale = rep.matrices.iter().map(fnorm).fold(1.0, f64::max);
    let tr_res = rep.trace_residual(exp);
    if tr_res > 1e3 * tol * scale {
        return Err(RhError::Inconsistent(tr_res));
    }
    let mut notes = Vec::new();
    let mut resonance_score = f64::INFINITY;
    for i in 0..4 {
        for l in [exp.lambda[i], exp.lambda_minus(i)] {
            let e = (C::new(0.0, -std::f64::consts::TAU) * l).exp();
            let d = sub(&rep.matrices[i], &[[e, ZERO], [ZERO, e]]);
            let s = fnorm(&d) / fnorm(&rep.matrices[i]).max(1.0);
            if s <= 10.0 * tol {
                notes.push(format!("M{} - exp(-2πi·{:.6}) I has norm {:.3e}", i + 1, l, s));
            }
            resonance_score = resonance_score.min(s);
        }
    }
    let mut candidates: Vec<[C; 2]> = Vec::new();
    for m in &rep.matrices {
        let scalar = fnorm(&sub(m, &[[m[0][0], ZERO], [ZERO, m[0][0]]])) / fnorm(m).max(1.0);
        if scalar > tol {
            candidates.extend(eigenvectors(m));
        }
    }
    let reducibility_score = if candidates.is_empty() {
        0.0
    } else {
        candidates
            .iter()
            .map(|v| rep.matrices.iter().map(|m| invariance_defect(m, v)).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    };
    let res = decide(resonance_score, tol);
    let red = decide(reducibility_score, tol);
    let verdict = match (res, red) {
        (Decision::Yes, _) => RepClass::Resonant,
        (_, Decision::Yes) => RepClass::Reducible,
        (Decision::No, Decision::No) => RepClass::SmoothLocus,
        _ => RepClass::Indeterminate,
    };
    if verdict == RepClass::Indeterminate {
        notes.push("score within 10x of the tolerance".into());
    }
    Ok(Classification { verdict, resonance_score, reducibility_score, notes })
}

/// JSON form `rep-v1`. Complex numbers are `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepV1 {
    pub schema: String,
    pub basepoint: [f64; 2],
    pub relation_order: [usize; 4],
    pub matrices: Vec<[[[f64; 2]; 2]; 2]>,
    pub traces: Vec<[f64; 2]>,
    pub pairwise_traces: [[f64; 2]; 3],
    pub relation_residual: f64,
    pub error_estimate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<RepClass>,
}

pub(crate) fn c2a(c: C) -> [f64; 2] {
    [c.re, c.im]
}

pub(crate) fn a2c(a: [f64; 2]) -> C {
    C::new(a[0], a[1])
}

impl RepV1 {
    pub const SCHEMA: &'static str = "rep-v1";

    pub fn new(rep: &MonodromyRep, exp: Option<&ExponentData<C>>, class: Option<RepClass>) -> Self {
        let t = rh_invariants(rep);
        RepV1 {
            schema: Self::SCHEMA.into(),
            basepoint: c2a(rep.basepoint),
            relation_order: rep.relation_order,
            matrices: rep.matrices.iter().map(|m| m.map(|r| r.map(c2a))).collect(),
            traces: rep.traces().iter().map(|c| c2a(*c)).collect(),
            pairwise_traces: [c2a(t.x), c2a(t.y), c2a(t.z)],
            relation_residual: rep.relation_residual(),
            error_estimate: rep.error_estimate,
            det_residual: exp.map(|e| rep.det_residual(e)),
            classification: class,
        }
    }

    pub fn to_rep(&self) -> Option<MonodromyRep> {
        if self.schema != Self::SCHEMA || self.matrices.len() != 4 {
            return None;
        }
        let matrices = std::array::from_fn(|i| self.matrices[i].map(|r| r.map(a2c)));
        Some(MonodromyRep {
            matrices,
            basepoint: a2c(self.basepoint),
            relation_order: self.relation_order,
            error_estimate: self.error_estimate,
            stats: OdeStats::default(),
        })
    }
}
