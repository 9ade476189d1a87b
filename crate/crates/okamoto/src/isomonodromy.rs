//! Painlevé VI as a Hamiltonian system, and isomonodromic deformation as
//! trace-preserving continuation of connections in the `(q, h1)` chart.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ode::{integrate_segment, Control, OdeError, OdeOptions, OdeStats};
use crate::parabolic::{
    from_surface_point, is_alpha_stable, p_map, ExponentData, ParabolicError, PhiConnection, Speciality, SurfacePoint, Weight,
};
use crate::rh::{
    default_basepoint, monodromy_along, rh_invariants, standard_loops, to_fuchsian_system, MonodromyOptions, RhError, TraceData,
};

type C = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PviError {
    #[error("t = {0} is a fixed singularity (0 or 1)")]
    Domain(C),
    #[error("path passes within {distance:.3e} of the fixed singularity {point}")]
    Clearance { point: C, distance: f64 },
    #[error("integration failed near t = {t} without a blow-up signature: {source}")]
    Accuracy { t: C, source: OdeError },
}

pub fn lambda_bar(l: &[C; 4]) -> C {
    let a = l[0] + l[1] + l[2] - 0.5;
    let b = l[3] - 0.5;
    a * a - b * b
}

/// A point of the PVI phase space. `λ̄` is always recomputed from `lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PviState {
    pub x: C,
    pub y: C,
    pub t: C,
    pub lambda: [C; 4],
}

impl PviState {
    pub fn new(x: C, y: C, t: C, lambda: [C; 4]) -> Result<Self, PviError> {
        check_t(t)?;
        Ok(PviState { x, y, t, lambda })
    }

    pub fn lambda_bar(&self) -> C {
        lambda_bar(&self.lambda)
    }
}

fn check_t(t: C) -> Result<(), PviError> {
    if t.norm() == 0.0 || (t - 1.0).norm() == 0.0 {
        Err(PviError::Domain(t))
    } else {
        Ok(())
    }
}

struct Parts {
    p: C,
    px: C,
    pt: C,
    g: C,
    gx: C,
    gt: C,
    s: C,
    lb: C,
}

fn parts(st: &PviState) -> Parts {
    let (x, t) = (st.x, st.t);
    let [l1, l2, l3, _] = st.lambda;
    Parts {
        p: x * (x - 1.0) * (x - t),
        px: 3.0 * x * x - 2.0 * (1.0 + t) * x + t,
        pt: -x * (x - 1.0),
        g: 2.0 * l1 * (x - 1.0) * (x - t) + 2.0 * l2 * x * (x - t) + (2.0 * l3 - 1.0) * x * (x - 1.0),
        gx: 2.0 * l1 * (2.0 * x - 1.0 - t) + 2.0 * l2 * (2.0 * x - t) + (2.0 * l3 - 1.0) * (2.0 * x - 1.0),
        gt: -2.0 * l1 * (x - 1.0) - 2.0 * l2 * x,
        s: t * (t - 1.0),
        lb: st.lambda_bar(),
    }
}

/// `H = [x(x-1)(x-t) y² - G y + λ̄ (x - t)] / (t(t-1))` with
/// `G = 2λ1(x-1)(x-t) + 2λ2 x(x-t) + (2λ3-1) x(x-1)`.
pub fn h_vi(st: &PviState) -> Result<C, PviError> {
    check_t(st.t)?;
    let k = parts(st);
    Ok((k.p * st.y * st.y - k.g * st.y + k.lb * (st.x - st.t)) / k.s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianPartials {
    pub h_x: C,
    pub h_y: C,
    pub h_t: C,
}

pub fn hamiltonian_partials(st: &PviState) -> Result<HamiltonianPartials, PviError> {
    check_t(st.t)?;
    let k = parts(st);
    let y = st.y;
    let num = k.p * y * y - k.g * y + k.lb * (st.x - st.t);
    Ok(HamiltonianPartials {
        h_x: (k.px * y * y - k.gx * y + k.lb) / k.s,
        h_y: (2.0 * k.p * y - k.g) / k.s,
        h_t: (k.pt * y * y - k.gt * y - k.lb) / k.s - num * (2.0 * st.t - 1.0) / (k.s * k.s),
    })
}

/// `(dx/dt, dy/dt) = (∂H/∂y, -∂H/∂x)`.
pub fn pvi_vector_field(st: &PviState) -> Result<(C, C), PviError> {
    let d = hamiltonian_partials(st)?;
    Ok((d.h_y, -d.h_x))
}

/// `x''` along the flow, by the chain rule `H_yt + H_yx x' + H_yy y'`.
pub fn flow_second_derivative(st: &PviState) -> Result<C, PviError> {
    let d = hamiltonian_partials(st)?;
    let k = parts(st);
    let y = st.y;
    let h_yy = 2.0 * k.p / k.s;
    let h_yx = (2.0 * k.px * y - k.gx) / k.s;
    let h_yt = (2.0 * k.pt * y - k.gt) / k.s - (2.0 * k.p * y - k.g) * (2.0 * st.t - 1.0) / (k.s * k.s);
    Ok(h_yt + h_yx * d.h_y - h_yy * d.h_x)
}

/// Right-hand side of the second-order equation for `x(t)`, returned with
/// the sum of absolute values of its terms.
pub fn second_order_rhs(x: C, xp: C, t: C, l: &[C; 4]) -> (C, f64) {
    let t1 = 0.5 * (1.0 / x + 1.0 / (x - 1.0) + 1.0 / (x - t)) * xp * xp;
    let t2 = -(1.0 / t + 1.0 / (t - 1.0) + 1.0 / (x - t)) * xp;
    let pre = x * (x - 1.0) * (x - t) / (t * t * (t - 1.0) * (t - 1.0));
    let b = [
        2.0 * (l[3] - 0.5) * (l[3] - 0.5),
        -2.0 * l[0] * l[0] * t / (x * x),
        2.0 * l[1] * l[1] * (t - 1.0) / ((x - 1.0) * (x - 1.0)),
        (0.5 - 2.0 * l[2] * l[2]) * t * (t - 1.0) / ((x - t) * (x - t)),
    ];
    let t3: C = pre * b.iter().sum::<C>();
    let mag = t1.norm() + t2.norm() + b.iter().map(|v| (pre * v).norm()).sum::<f64>();
    (t1 + t2 + t3, mag)
}

/// `|x'' - RHS| / (1 + |x''| + Σ|terms|)`.
pub fn second_order_residual(x: C, xp: C, xpp: C, t: C, l: &[C; 4]) -> f64 {
    let (rhs, mag) = second_order_rhs(x, xp, t, l);
    (xpp - rhs).norm() / (1.0 + xpp.norm() + mag)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PviOptions {
    pub tol: f64,
    pub blowup: f64,
    pub clearance: f64,
    /// Accepted steps kept for the Laurent fit.
    pub fit_window: usize,
}

impl Default for PviOptions {
    fn default() -> Self {
        PviOptions { tol: 1e-12, blowup: 1e8, clearance: 1e-3, fit_window: 6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PviSample {
    pub t: C,
    pub x: C,
    pub y: C,
    pub h: C,
    /// Scaled second-order residual at this sample.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MovableSingularity {
    pub t: C,
    pub x: C,
    pub y: C,
    /// Which coordinate crossed the threshold.
    pub variable: char,
    /// Fitted `k` in `v ~ c (t - t*)^(-k)`.
    pub order_estimate: f64,
    pub t_star: C,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PviTrajectory {
    pub samples: Vec<PviSample>,
    pub events: Vec<MovableSingularity>,
    pub halted: bool,
    pub stats: OdeStats,
}

fn sample(st: &PviState) -> PviSample {
    let h = h_vi(st).unwrap_or(C::new(f64::NAN, f64::NAN));
    let residual = match (pvi_vector_field(st), flow_second_derivative(st)) {
        (Ok((xp, _)), Ok(xpp)) => second_order_residual(st.x, xp, xpp, st.t, &st.lambda),
        _ => f64::NAN,
    };
    PviSample { t: st.t, x: st.x, y: st.y, h, residual }
}

/// Least-squares fit of `w = v/v'` against `t`; `w ≈ -(t - t*)/k`.
fn laurent_fit(ts: &[C], v: &[C], dv: &[C]) -> (f64, C) {
    let w: Vec<C> = v.iter().zip(dv).map(|(a, b)| a / b).collect();
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<C>() / n;
    let wm = w.iter().sum::<C>() / n;
    let num: C = ts.iter().zip(&w).map(|(t, w)| (t - tm).conj() * (w - wm)).sum();
    let den: f64 = ts.iter().map(|t| (t - tm).norm_sqr()).sum();
    let a = num / den;
    let k = -1.0 / a;
    let last = ts.len() - 1;
    (k.re, ts[last] + k * w[last])
}

/// Integrates along the polyline `t_path`, sampling at every accepted step.
pub fn integrate_pvi(initial: &PviState, t_path: &[C], opts: &PviOptions) -> Result<PviTrajectory, PviError> {
    check_t(initial.t)?;
    for w in t_path.windows(2) {
        for p in [C::new(0.0, 0.0), C::new(1.0, 0.0)] {
            let d = crate::rh::segment_distance(w[0], w[1], p);
            if d < opts.clearance {
                return Err(PviError::Clearance { point: p, distance: d });
            }
        }
    }
    let lambda = initial.lambda;
    let mut samples = vec![sample(initial)];
    let mut events = Vec::new();
    let mut stats = OdeStats::default();
    let mut y = [initial.x, initial.y];
    let ode = OdeOptions::with_tol(opts.tol);
    let mut window: Vec<(C, [C; 2], [C; 2])> = Vec::new();
    let mut path = t_path.to_vec();
    if path.first() != Some(&initial.t) {
        path.insert(0, initial.t);
    }
    for w in path.windows(2) {
        let mut last = (w[0], y);
        let mut event = None;
        let res = integrate_segment(
            |t, s: &[C; 2]| {
                let st = PviState { x: s[0], y: s[1], t, lambda };
                let (a, b) = pvi_vector_field(&st).unwrap_or((C::new(f64::NAN, 0.0), C::new(f64::NAN, 0.0)));
                [a, b]
            },
            w[0],
            w[1],
            y,
            &ode,
            |t, s, ds| {
                last = (t, *s);
                window.push((t, *s, *ds));
                if window.len() > opts.fit_window {
                    window.remove(0);
                }
                samples.push(sample(&PviState { x: s[0], y: s[1], t, lambda }));
                let k = if s[0].norm() > opts.blowup {
                    Some(0)
                } else if s[1].norm() > opts.blowup {
                    Some(1)
                } else {
                    None
                };
                if let Some(k) = k {
                    event = Some(k);
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        );
        let blown = |s: &[C; 2]| s[0].norm().max(s[1].norm()) > opts.blowup.sqrt();
        match res {
            Ok(out) => {
                stats += out.stats;
                y = out.y;
                if out.stopped {
                    let k = event.unwrap_or(0);
                    events.push(singularity(&window, k));
                    return Ok(PviTrajectory { samples, events, halted: true, stats });
                }
            }
            Err(e) if blown(&last.1) && window.len() >= 3 => {
                let k = if last.1[0].norm() >= last.1[1].norm() { 0 } else { 1 };
                let _ = e;
                events.push(singularity(&window, k));
                return Ok(PviTrajectory { samples, events, halted: true, stats });
            }
            Err(source) => return Err(PviError::Accuracy { t: last.0, source }),
        }
    }
    Ok(PviTrajectory { samples, events, halted: false, stats })
}

fn singularity(window: &[(C, [C; 2], [C; 2])], k: usize) -> MovableSingularity {
    let ts: Vec<C> = window.iter().map(|w| w.0).collect();
    let v: Vec<C> = window.iter().map(|w| w.1[k]).collect();
    let dv: Vec<C> = window.iter().map(|w| w.2[k]).collect();
    let (order_estimate, t_star) = laurent_fit(&ts, &v, &dv);
    let lastw = window.last().expect("non-empty window");
    MovableSingularity {
        t: lastw.0,
        x: lastw.1[0],
        y: lastw.1[1],
        variable: if k == 0 { 'x' } else { 'y' },
        order_estimate,
        t_star,
    }
}

/// Finite-difference weights for derivatives `0..=m` at `z` on arbitrary nodes.
pub fn fd_weights(z: C, nodes: &[C], m: usize) -> Vec<Vec<C>> {
    let n = nodes.len();
    let zero = C::new(0.0, 0.0);
    let mut c = vec![vec![zero; n]; m + 1];
    let mut c1 = C::new(1.0, 0.0);
    let mut c4 = nodes[0] - z;
    c[0][0] = C::new(1.0, 0.0);
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = C::new(1.0, 0.0);
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Scaled second-order residuals at interior nodes from 5-point stencils.
pub fn fd_second_order_residuals(ts: &[C], xs: &[C], lambda: &[C; 4]) -> Vec<f64> {
    if ts.len() < 5 {
        return vec![];
    }
    (2..ts.len() - 2)
        .map(|k| {
            let w = fd_weights(ts[k], &ts[k - 2..=k + 2], 2);
            let d1: C = (0..5).map(|j| w[1][j] * xs[k - 2 + j]).sum();
            let d2: C = (0..5).map(|j| w[2][j] * xs[k - 2 + j]).sum();
            second_order_residual(xs[k], d1, d2, ts[k], lambda)
        })
        .collect()
}

/// Integrates on a uniform grid of `n` intervals from `t0` to `t1`,
/// returning the states at the grid nodes.
pub fn integrate_pvi_grid(initial: &PviState, t1: C, n: usize, opts: &PviOptions) -> Result<Vec<PviState>, PviError> {
    let mut out = vec![*initial];
    let mut st = *initial;
    let h = (t1 - initial.t) / n as f64;
    for k in 1..=n {
        let tk = initial.t + h * k as f64;
        let tr = integrate_pvi(&st, &[st.t, tk], opts)?;
        if tr.halted {
            break;
        }
        let last = tr.samples.last().expect("at least the initial sample");
        st = PviState { x: last.x, y: last.y, t: tk, lambda: st.lambda };
        out.push(st);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Isomonodromic continuation

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuationError {
    #[error(transparent)]
    Parabolic(#[from] ParabolicError),
    #[error(transparent)]
    Rh(#[from] RhError),
    #[error("exponents are {0:?}; continuation needs generic exponents")]
    NotGeneric(Speciality),
    #[error("initial connection is not alpha-stable")]
    Unstable,
    #[error("path point {t3} is within {distance:.3e} of pole {pole}")]
    PathCollision { t3: C, pole: usize, distance: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationOptions {
    pub steps: usize,
    pub newton_tol: f64,
    /// Residual accepted once damping no longer reduces it: the trace noise
    /// floor of ill-conditioned monodromy can sit above `newton_tol`.
    pub stall_tol: f64,
    pub max_newton: usize,
    pub fd_step: f64,
    pub max_bisections: usize,
    /// Boundary proximity, as a fraction of the minimal pole distance.
    pub event_distance: f64,
    /// `|h1|` beyond which the point is reported as close to `D0`.
    pub d0_threshold: f64,
    pub monodromy: MonodromyOptions,
    pub weight: Weight,
    pub pvi_tolerance: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            steps: 50,
            newton_tol: 1e-11,
            stall_tol: 1e-8,
            max_newton: 12,
            fd_step: 1e-6,
            max_bisections: 6,
            event_distance: 0.05,
            d0_threshold: 1e6,
            // Relation gate at the drift budget: with large |M_i| the rounding floor
            // of the product exceeds the absolute 1e-8 used for single computations.
            monodromy: MonodromyOptions { tol: 1e-12, estimate_error: false, accuracy: 1e-6, ..Default::default() },
            weight: Weight::uniform(100, 1000),
            pvi_tolerance: 1e-4,
        }
    }
}

/// Exponents with moving `t3`, the current chart point and the target traces.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationState {
    pub exponents: ExponentData<C>,
    pub point: SurfacePoint<C>,
    pub target: TraceData,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationStep {
    pub t3: C,
    pub q: C,
    pub h1: C,
    pub newton_iterations: usize,
    pub bisections: usize,
    /// Corrector residual `|(x, y) - target|`.
    pub residual: f64,
    /// Drift of all trace coordinates from a fresh monodromy computation.
    pub drift: f64,
    pub drift_x: f64,
    pub drift_y: f64,
    pub drift_z: f64,
    pub drift_local: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ContinuationEvent {
    NearPole { step: usize, t3: C, pole: usize, distance: f64 },
    NearExceptional { step: usize, t3: C, pole: usize, sign: char, distance: f64 },
    NearD0 { step: usize, t3: C, h1_abs: f64 },
    Bisection { step: usize, depth: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PviCrossCheck {
    /// Möbius image of `t3` and of `q` at each step.
    pub t: Vec<C>,
    pub x: Vec<C>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Same residual with `λ4` shifted by `-1/2`, as a normalisation probe.
    pub shifted_max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationReport {
    pub target: TraceData,
    pub steps: Vec<ContinuationStep>,
    pub events: Vec<ContinuationEvent>,
    pub max_drift: f64,
    pub completed: bool,
    pub failure: Option<String>,
    pub pvi_check: Option<PviCrossCheck>,
    pub final_conn: PhiConnection<C>,
}

/// `M(z) = (z - t1)(t2 - t4) / ((z - t4)(t2 - t1))`, sending `(t1, t2, t4)` to `(0, 1, ∞)`.
pub fn mobius(z: C, t: &[C; 4]) -> C {
    (z - t[0]) * (t[1] - t[3]) / ((z - t[3]) * (t[1] - t[0]))
}

struct Corrector<'a> {
    base: &'a ExponentData<C>,
    target: &'a TraceData,
    mono: MonodromyOptions,
}

impl Corrector<'_> {
    fn exponents(&self, t3: C) -> Result<ExponentData<C>, ParabolicError> {
        let mut t = self.base.t;
        t[2] = t3;
        ExponentData::new(t, self.base.lambda)
    }

    fn traces(&self, u: [C; 2], t3: C, mono: &MonodromyOptions) -> Result<TraceData, ContinuationError> {
        let exp = self.exponents(t3)?;
        let conn = from_surface_point(&SurfacePoint::chart(u[0], u[1]), &exp)?;
        let sys = to_fuchsian_system(&conn)?;
        let loops = standard_loops(&sys, mono)?;
        Ok(rh_invariants(&monodromy_along(&sys, &loops, mono)?))
    }

    fn residual(&self, u: [C; 2], t3: C) -> Result<[C; 2], ContinuationError> {
        let d = self.traces(u, t3, &self.mono)?;
        Ok([d.x - self.target.x, d.y - self.target.y])
    }
}

fn norm2(v: &[C; 2]) -> f64 {
    v[0].norm().hypot(v[1].norm())
}

/// Damped Newton with a central-difference Jacobian.
fn newton(cor: &Corrector, mut u: [C; 2], t3: C, opts: &ContinuationOptions) -> Option<([C; 2], usize, f64)> {
    let scale = 1.0 + cor.target.x.norm().max(cor.target.y.norm());
    let mut f = cor.residual(u, t3).ok()?;
    let mut fnorm = norm2(&f);
    for it in 0..opts.max_newton {
        if fnorm <= opts.newton_tol * scale {
            return Some((u, it, fnorm));
        }
        let mut jac = [[C::new(0.0, 0.0); 2]; 2];
        for k in 0..2 {
            let h = opts.fd_step * (1.0 + u[k].norm());
            let mut up = u;
            let mut um = u;
            up[k] += h;
            um[k] -= h;
            let fp = cor.residual(up, t3).ok()?;
            let fm = cor.residual(um, t3).ok()?;
            for r in 0..2 {
                jac[r][k] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.norm() == 0.0 || !det.re.is_finite() {
            return None;
        }
        let du = [(jac[1][1] * f[0] - jac[0][1] * f[1]) / det, (-jac[1][0] * f[0] + jac[0][0] * f[1]) / det];
        let mut damp = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let cand = [u[0] - du[0] * damp, u[1] - du[1] * damp];
            if let Ok(fc) = cor.residual(cand, t3) {
                let nc = norm2(&fc);
                if nc < fnorm || nc <= opts.newton_tol * scale {
                    u = cand;
                    f = fc;
                    fnorm = nc;
                    accepted = true;
                    break;
                }
            }
            damp *= 0.5;
        }
        if !accepted {
            return (fnorm <= opts.stall_tol * scale).then_some((u, it, fnorm));
        }
    }
    (fnorm <= opts.newton_tol * scale).then_some((u, opts.max_newton, fnorm))
}

fn path_points(path: &[C], steps: usize) -> Vec<C> {
    let lens: Vec<f64> = path.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let total: f64 = lens.iter().sum();
    if path.is_empty() {
        return vec![];
    }
    if total == 0.0 || steps == 0 {
        return vec![path[0]];
    }
    let mut out = vec![path[0]];
    for k in 1..=steps {
        let mut s = total * k as f64 / steps as f64;
        let mut idx = 0;
        while idx < lens.len() - 1 && s > lens[idx] {
            s -= lens[idx];
            idx += 1;
        }
        let frac = if lens[idx] > 0.0 { (s / lens[idx]).min(1.0) } else { 0.0 };
        out.push(path[idx] + (path[idx + 1] - path[idx]) * frac);
    }
    out
}

/// Continues `initial` along `t3_path`, keeping `tr(M1M2)` and `tr(M2M3)`
/// fixed by Newton correction in the chart coordinates `(q, h1)`.
pub fn isomonodromic_continue(
    initial: &PhiConnection<C>,
    t3_path: &[C],
    opts: &ContinuationOptions,
) -> Result<ContinuationReport, ContinuationError> {
    let exp0 = initial.exponents.clone();
    let spec = exp0.is_special();
    if spec != Speciality::Generic {
        return Err(ContinuationError::NotGeneric(spec));
    }
    if !is_alpha_stable(initial, &opts.weight)?.verdict.is_stable() {
        return Err(ContinuationError::Unstable);
    }
    let sp = p_map(initial)?;
    let h1_0 = sp.h1().ok_or(ParabolicError::OffChart("initial point on D0".into()))?;
    let dmin = to_fuchsian_system(initial)?.min_pole_distance();
    let pts = path_points(t3_path, opts.steps);
    for &t3 in &pts {
        for j in [0, 1, 3] {
            let d = (t3 - exp0.t[j]).norm();
            if d < opts.monodromy.clearance_factor * dmin * 4.0 {
                return Err(ContinuationError::PathCollision { t3, pole: j, distance: d });
            }
        }
    }
    // One basepoint for the whole path, below every configuration visited.
    let mut mono = opts.monodromy;
    let extra = pts.iter().map(|p| (p - exp0.t[2]).norm()).fold(0.0, f64::max);
    mono.basepoint = Some(mono.basepoint.unwrap_or_else(|| default_basepoint(&exp0.t) - C::new(0.0, 2.0 * extra)));
    let mut verify = mono;
    verify.estimate_error = true;
    verify.tol = opts.monodromy.tol.max(1e-12);

    let start_t3 = exp0.t[2];
    let sys0 = to_fuchsian_system(initial)?;
    let target = rh_invariants(&monodromy_along(&sys0, &standard_loops(&sys0, &verify)?, &verify)?);
    let cor = Corrector { base: &exp0, target: &target, mono };

    let mut u = [sp.q, h1_0];
    let mut steps = vec![ContinuationStep {
        t3: start_t3,
        q: u[0],
        h1: u[1],
        newton_iterations: 0,
        bisections: 0,
        residual: 0.0,
        drift: 0.0,
        drift_x: 0.0,
        drift_y: 0.0,
        drift_z: 0.0,
        drift_local: 0.0,
    }];
    let mut events = Vec::new();
    let mut prev: Option<([C; 2], C)> = None;
    let mut failure = None;
    let mut cur_t = start_t3;
    for (k, &t_next) in pts.iter().enumerate().skip(1) {
        // Sub-steps from cur_t to t_next, bisecting on stagnation.
        let mut queue = vec![t_next];
        let mut depth = 0;
        let mut newton_total = 0;
        let mut last_res = 0.0;
        while let Some(&goal) = queue.last() {
            let pred = match prev {
                Some((up, tp)) if (cur_t - tp).norm() > 0.0 => {
                    let r = (goal - cur_t) / (cur_t - tp);
                    [u[0] + (u[0] - up[0]) * r, u[1] + (u[1] - up[1]) * r]
                }
                _ => u,
            };
            match newton(&cor, pred, goal, opts).or_else(|| newton(&cor, u, goal, opts)) {
                Some((un, it, res)) => {
                    prev = Some((u, cur_t));
                    u = un;
                    cur_t = goal;
                    newton_total += it;
                    last_res = res;
                    queue.pop();
                }
                None => {
                    if depth >= opts.max_bisections {
                        failure = Some(format!("Newton stagnation at t3 = {goal} after {depth} bisections"));
                        break;
                    }
                    depth += 1;
                    events.push(ContinuationEvent::Bisection { step: k, depth });
                    queue.push((cur_t + goal) / 2.0);
                }
            }
        }
        if failure.is_some() {
            break;
        }
        let fresh = cor.traces(u, cur_t, &verify)?;
        let dx = (fresh.x - target.x).norm();
        let dy = (fresh.y - target.y).norm();
        let dz = (fresh.z - target.z).norm();
        let dl = (0..4).map(|i| (fresh.a[i][0] - target.a[i][0]).norm()).fold(0.0, f64::max);
        steps.push(ContinuationStep {
            t3: cur_t,
            q: u[0],
            h1: u[1],
            newton_iterations: newton_total,
            bisections: depth,
            residual: last_res,
            drift: fresh.drift(&target),
            drift_x: dx,
            drift_y: dy,
            drift_z: dz,
            drift_local: dl,
        });
        let exp = cor.exponents(cur_t)?;
        for j in 0..4 {
            let d = (u[0] - exp.t[j]).norm();
            if d < opts.event_distance * dmin {
                events.push(ContinuationEvent::NearPole { step: k, t3: cur_t, pole: j, distance: d });
                for (plus, sign) in [(true, '+'), (false, '-')] {
                    let b = SurfacePoint::exceptional(&exp, j, plus);
                    let hb = b.h1().expect("exceptional points lie in the chart");
                    let db = d.hypot((hb - u[1]).norm());
                    if db < opts.event_distance * dmin * (1.0 + hb.norm()) {
                        events.push(ContinuationEvent::NearExceptional { step: k, t3: cur_t, pole: j, sign, distance: db });
                    }
                }
            }
        }
        if u[1].norm() > opts.d0_threshold {
            events.push(ContinuationEvent::NearD0 { step: k, t3: cur_t, h1_abs: u[1].norm() });
        }
    }
    let exp_final = cor.exponents(cur_t)?;
    let final_conn = from_surface_point(&SurfacePoint::chart(u[0], u[1]), &exp_final)?;
    let max_drift = steps.iter().map(|s| s.drift).fold(0.0, f64::max);
    let pvi_check = pvi_cross_check(&steps, &exp0, opts.pvi_tolerance);
    Ok(ContinuationReport {
        target,
        completed: failure.is_none(),
        failure,
        steps,
        events,
        max_drift,
        pvi_check,
        final_conn,
    })
}

fn pvi_cross_check(steps: &[ContinuationStep], exp: &ExponentData<C>, tolerance: f64) -> Option<PviCrossCheck> {
    if steps.len() < 5 {
        return None;
    }
    let mut tt = exp.t;
    let t: Vec<C> = steps.iter().map(|s| mobius(s.t3, &exp.t)).collect();
    let x: Vec<C> = steps
        .iter()
        .map(|s| {
            tt[2] = s.t3;
            mobius(s.q, &tt)
        })
        .collect();
    let residuals = fd_second_order_residuals(&t, &x, &exp.lambda);
    let mut shifted = exp.lambda;
    shifted[3] -= 0.5;
    let alt = fd_second_order_residuals(&t, &x, &shifted);
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Some(PviCrossCheck {
        shifted_max_residual: alt.iter().copied().fold(0.0, f64::max),
        passed: max_residual <= tolerance,
        t,
        x,
        residuals,
        max_residual,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    const L: [C; 4] = [C::new(0.11, 0.0), C::new(0.12, 0.0), C::new(0.13, 0.0), C::new(0.15, 0.0)];

    #[test]
    fn substitutions() {
        let t = c(0.3, 0.4);
        let y = c(0.7, -0.2);
        let s = PviState::new(c(0., 0.), y, t, L).unwrap();
        let want = -(2.0 * L[0] * y + s.lambda_bar()) / (t - 1.0);
        assert!((h_vi(&s).unwrap() - want).norm() < 1e-14);
        let x = c(0.2, 0.9);
        let s = PviState::new(x, c(0., 0.), t, L).unwrap();
        assert!((h_vi(&s).unwrap() - s.lambda_bar() * (x - t) / (t * (t - 1.0))).norm() < 1e-14);
    }

    #[test]
    fn fixed_singularities_rejected() {
        assert_eq!(PviState::new(c(1., 0.), c(1., 0.), c(0., 0.), L), Err(PviError::Domain(c(0., 0.))));
        assert!(h_vi(&PviState { x: c(1., 0.), y: c(1., 0.), t: c(1., 0.), lambda: L }).is_err());
    }

    #[test]
    fn fd_weights_exact_on_quadratics() {
        let nodes = [c(0., 0.), c(0.1, 0.), c(0.25, 0.05), c(0.3, 0.), c(0.5, 0.1)];
        let w = fd_weights(nodes[2], &nodes, 2);
        let f = |z: C| 3.0 * z * z - z + 2.0;
        let d2: C = (0..5).map(|j| w[2][j] * f(nodes[j])).sum();
        let d1: C = (0..5).map(|j| w[1][j] * f(nodes[j])).sum();
        assert!((d2 - 6.0).norm() < 1e-9);
        assert!((d1 - (6.0 * nodes[2] - 1.0)).norm() < 1e-9);
    }

    #[test]
    fn mobius_normalises() {
        let t = [c(0., 0.), c(1., 0.), c(2., 0.), c(3., 0.)];
        assert!(mobius(t[0], &t).norm() < 1e-15);
        assert!((mobius(t[1], &t) - 1.0).norm() < 1e-15);
        assert!(mobius(c(3.0 + 1e-9, 0.), &t).norm() > 1e8);
    }

    #[test]
    fn trajectory_residual_small() {
        let s = PviState::new(c(0.4, 0.2), c(0.3, -0.1), c(0.5, 0.5), L).unwrap();
        let tr = integrate_pvi(&s, &[c(0.5, 0.5), c(0.7, 0.6)], &PviOptions::default()).unwrap();
        assert!(!tr.halted);
        assert!(tr.samples.iter().all(|s| s.residual < 1e-10));
    }
}
