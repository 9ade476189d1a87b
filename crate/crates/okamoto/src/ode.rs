//! Adaptive Dormand–Prince 8(5,3) integrator for complex systems over a real
//! parameter. Tableau and step-size control follow Hairer's DOP853.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at s = {s} (h = {h})")]
    StepUnderflow { s: f64, h: f64 },
    #[error("step budget exhausted at s = {s}")]
    MaxSteps { s: f64 },
    #[error("non-finite state at s = {s}")]
    NonFinite { s: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-12, atol: 1e-14, h_min: 1e-14, max_steps: 200_000 }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions { rtol: tol, atol: tol * 1e-2, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

impl std::ops::AddAssign for OdeStats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.evals += o.evals;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OdeOutcome<const N: usize> {
    pub s: f64,
    pub y: [Complex64; N],
    pub stats: OdeStats,
    pub stopped: bool,
}

const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

const SAFE: f64 = 0.9;
const FACC1: f64 = 1.0 / 0.333;
const FACC2: f64 = 1.0 / 6.0;
const EXPO1: f64 = 1.0 / 8.0;

type St<const N: usize> = [Complex64; N];

fn comb<const N: usize>(y: &St<N>, h: f64, terms: &[(f64, &St<N>)]) -> St<N> {
    let mut out = *y;
    for (c, k) in terms {
        let ch = c * h;
        for i in 0..N {
            out[i] += k[i] * ch;
        }
    }
    out
}

fn norm_scaled<const N: usize>(v: &St<N>, y: &St<N>, opts: &OdeOptions) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y[i].norm();
        s += (v[i].norm() / sk).powi(2);
    }
    (s / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(f: &mut F, s0: f64, y0: &St<N>, f0: &St<N>, dir: f64, span: f64, opts: &OdeOptions) -> f64
where
    F: FnMut(f64, &St<N>) -> St<N>,
{
    let d0 = norm_scaled(y0, y0, opts);
    let d1 = norm_scaled(f0, y0, opts);
    let mut h = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span);
    let y1 = comb(y0, dir * h, &[(1.0, f0)]);
    let f1 = f(s0 + dir * h, &y1);
    let mut diff = [Complex64::new(0.0, 0.0); N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm_scaled(&diff, y0, opts) / h;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / dm).powf(1.0 / 8.0) };
    (100.0 * h).min(h1).min(span)
}

/// Integrates `dy/ds = f(s, y)` from `s0` to `s1`. `observe` is called after
/// every accepted step with `(s, y, f(s, y))` and may stop the integration.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    s0: f64,
    s1: f64,
    y0: St<N>,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<OdeOutcome<N>, OdeError>
where
    F: FnMut(f64, &St<N>) -> St<N>,
    O: FnMut(f64, &St<N>, &St<N>) -> Control,
{
    let mut stats = OdeStats::default();
    let span = (s1 - s0).abs();
    if span == 0.0 {
        return Ok(OdeOutcome { s: s0, y: y0, stats, stopped: false });
    }
    let dir = (s1 - s0).signum();
    let mut s = s0;
    let mut y = y0;
    // Kahan compensation for the accepted-step sum.
    let mut comp = [Complex64::new(0.0, 0.0); N];
    let mut k1 = f(s, &y);
    stats.evals += 1;
    let mut h = initial_step(&mut f, s, &y, &k1, dir, span, opts);
    stats.evals += 1;
    let mut last_rejected = false;
    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(OdeError::MaxSteps { s });
        }
        let remaining = (s1 - s).abs();
        let mut last = false;
        if h >= remaining * (1.0 - 1e-12) {
            h = remaining;
            last = true;
        }
        if h < opts.h_min * (1.0 + s.abs()) && !last {
            return Err(OdeError::StepUnderflow { s, h });
        }
        let hh = dir * h;
        let k2 = f(s + C2 * hh, &comb(&y, hh, &[(A21, &k1)]));
        let k3 = f(s + C3 * hh, &comb(&y, hh, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(s + C4 * hh, &comb(&y, hh, &[(A41, &k1), (A43, &k3)]));
        let k5 = f(s + C5 * hh, &comb(&y, hh, &[(A51, &k1), (A53, &k3), (A54, &k4)]));
        let k6 = f(s + C6 * hh, &comb(&y, hh, &[(A61, &k1), (A64, &k4), (A65, &k5)]));
        let k7 = f(s + C7 * hh, &comb(&y, hh, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)]));
        let k8 = f(s + C8 * hh, &comb(&y, hh, &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]));
        let k9 = f(
            s + C9 * hh,
            &comb(&y, hh, &[(A91, &k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)]),
        );
        let k10 = f(
            s + C10 * hh,
            &comb(&y, hh, &[(A101, &k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)]),
        );
        let k11 = f(
            s + C11 * hh,
            &comb(
                &y,
                hh,
                &[(A111, &k1), (A114, &k4), (A115, &k5), (A116, &k6), (A117, &k7), (A118, &k8), (A119, &k9), (A1110, &k10)],
            ),
        );
        let s_new = if last { s1 } else { s + hh };
        let yy1 = comb(
            &y,
            hh,
            &[
                (A121, &k1),
                (A124, &k4),
                (A125, &k5),
                (A126, &k6),
                (A127, &k7),
                (A128, &k8),
                (A129, &k9),
                (A1210, &k10),
                (A1211, &k11),
            ],
        );
        let k12 = f(s_new, &yy1);
        stats.evals += 11;
        let mut inc = [Complex64::new(0.0, 0.0); N];
        for i in 0..N {
            inc[i] = k1[i] * B1 + k6[i] * B6 + k7[i] * B7 + k8[i] * B8 + k9[i] * B9 + k10[i] * B10 + k11[i] * B11 + k12[i] * B12;
        }
        let mut y_new = y;
        let mut comp_new = comp;
        for i in 0..N {
            let d = inc[i] * hh + comp[i];
            y_new[i] = y[i] + d;
            comp_new[i] = d - (y_new[i] - y[i]);
        }
        if y_new.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            h *= 0.25;
            last_rejected = true;
            stats.rejected += 1;
            if h < opts.h_min * (1.0 + s.abs()) {
                return Err(OdeError::NonFinite { s });
            }
            continue;
        }
        let mut err = 0.0;
        let mut err2 = 0.0;
        for i in 0..N {
            let sk = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            let e2 = inc[i] - k1[i] * BHH1 - k9[i] * BHH2 - k12[i] * BHH3;
            err2 += (e2.norm() / sk).powi(2);
            let e = k1[i] * ER1 + k6[i] * ER6 + k7[i] * ER7 + k8[i] * ER8 + k9[i] * ER9 + k10[i] * ER10 + k11[i] * ER11 + k12[i] * ER12;
            err += (e.norm() / sk).powi(2);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h * err * (1.0 / (deno * N as f64)).sqrt();
        let fac11 = err.powf(EXPO1);
        let fac = FACC2.max(FACC1.min(fac11 / SAFE));
        let mut h_new = h / fac;
        if err <= 1.0 {
            stats.accepted += 1;
            let k_new = f(s_new, &y_new);
            stats.evals += 1;
            s = s_new;
            y = y_new;
            comp = comp_new;
            k1 = k_new;
            if observe(s, &y, &k1) == Control::Stop {
                return Ok(OdeOutcome { s, y, stats, stopped: true });
            }
            if last {
                return Ok(OdeOutcome { s, y, stats, stopped: false });
            }
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
        } else {
            h_new = h / FACC1.min(fac11 / SAFE);
            last_rejected = true;
            stats.rejected += 1;
        }
        h = h_new;
    }
}

/// Integrates along a straight complex segment `z(s) = a + s (b - a)`,
/// `s ∈ [0, 1]`, for an equation `dy/dz = g(z, y)`.
pub fn integrate_segment<const N: usize, G, O>(
    mut g: G,
    a: Complex64,
    b: Complex64,
    y0: St<N>,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<OdeOutcome<N>, OdeError>
where
    G: FnMut(Complex64, &St<N>) -> St<N>,
    O: FnMut(Complex64, &St<N>, &St<N>) -> Control,
{
    let d = b - a;
    integrate(
        |s, y| {
            let mut v = g(a + d * s, y);
            for c in v.iter_mut() {
                *c *= d;
            }
            v
        },
        0.0,
        1.0,
        y0,
        opts,
        |s, y, dy| {
            let mut dz = *dy;
            for c in dz.iter_mut() {
                *c /= d;
            }
            observe(a + d * s, y, &dz)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential() {
        let i = Complex64::new(0.0, 1.0);
        let out = integrate(|_, y: &[Complex64; 1]| [i * y[0]], 0.0, std::f64::consts::TAU, [Complex64::new(1.0, 0.0)], &OdeOptions::default(), |_, _, _| Control::Continue).unwrap();
        assert!((out.y[0] - Complex64::new(1.0, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn backward_direction() {
        let out = integrate(|_, y: &[Complex64; 1]| [y[0]], 1.0, 0.0, [Complex64::new(1.0, 0.0)], &OdeOptions::default(), |_, _, _| Control::Continue).unwrap();
        assert!((out.y[0].re - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn segment_log() {
        // dy/dz = 1/z along 1 → 1+i gives log(1+i).
        let a = Complex64::new(1.0, 0.0);
        let b = Complex64::new(1.0, 1.0);
        let out = integrate_segment(|z, _y: &[Complex64; 1]| [1.0 / z], a, b, [Complex64::new(0.0, 0.0)], &OdeOptions::default(), |_, _, _| Control::Continue).unwrap();
        assert!((out.y[0] - b.ln()).norm() < 1e-12);
    }

    #[test]
    fn eighth_order_convergence() {
        // Fixed-tolerance sweep: error falls as tolerance tightens.
        let run = |tol: f64| {
            let o = OdeOptions::with_tol(tol);
            let out = integrate(|s, y: &[Complex64; 1]| [y[0] * s.cos()], 0.0, 5.0, [Complex64::new(1.0, 0.0)], &o, |_, _, _| Control::Continue).unwrap();
            (out.y[0].re - 5.0f64.sin().exp()).abs()
        };
        assert!(run(1e-12) < run(1e-6));
        assert!(run(1e-12) < 1e-10);
    }
}
