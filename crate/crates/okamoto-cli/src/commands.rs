//! One function per subcommand; each returns a filled report.

use num_complex::Complex64 as C;
use okamoto::charvar::{char_map, SurfaceGroupRep};
use okamoto::isomonodromy::*;
use okamoto::lattice::*;
use okamoto::parabolic::*;
use okamoto::poly::Poly;
use okamoto::rh::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{CScalar, ExperimentConfig, Expectation};
use crate::report::{Check, Report, Series};
use crate::CliError;

pub struct Ctx {
    pub cfg: ExperimentConfig,
    pub seed: u64,
    pub tol: Option<f64>,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Records a failed numerical stage and returns the report as is.
fn failed(mut report: Report, stage: &str, e: impl std::fmt::Display) -> Result<Report, CliError> {
    report.check(Check::flag(stage, false, Some(e.to_string())));
    Ok(report)
}

fn exponents_f64(ctx: &Ctx) -> Result<ExponentData<C>, CliError> {
    let l = ctx.cfg.lambda()?;
    let lambda = [l[0].c64()?, l[1].c64()?, l[2].c64()?, l[3].c64()?];
    ExponentData::new(ctx.cfg.t_c64()?, lambda).map_err(usage)
}

/// The configured chart point, or one drawn from the seed.
fn chart_point(ctx: &Ctx) -> Result<(C, C), CliError> {
    match &ctx.cfg.point {
        Some(p) => Ok((p.q.c64()?, p.h1.c64()?)),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let q = C::new(rng.random_range(-1.0..4.0), rng.random_range(0.2..1.5));
            let h1 = C::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            Ok((q, h1))
        }
    }
}

fn float_connection(ctx: &Ctx, report: &mut Report) -> Result<(ExponentData<C>, PhiConnection<C>), CliError> {
    let e = exponents_f64(ctx)?;
    report.put("speciality", &e.is_special());
    let (q, h1) = chart_point(ctx)?;
    report.put("point", &json!({ "q": q, "h1": h1 }));
    let conn = from_surface_point(&SurfacePoint::chart(q, h1), &e).map_err(usage)?;
    Ok((e, conn))
}

pub fn verify_surface(ctx: &Ctx, mut report: Report) -> Result<Report, CliError> {
    let co = ctx.cfg.coincidences.unwrap_or([false; 4]);
    let lat = build_okamoto_surface(co);
    let cfg = anti_canonical(&lat);
    for c in verify_op_pair(&cfg).checks {
        report.check(Check::flag(&c.name, c.passed, Some(format!("value {}, expected {}", c.value, c.expected))));
    }
    let sq = |d: &DivisorClass| lat.self_intersection(d).to_string();
    let y2 = sq(&cfg.total());
    report.check(Check::flag("Y^2 = 0", y2 == "0", Some(y2)));
    for i in 0..=4 {
        let d = lat.d(i).map_err(usage)?;
        let s = sq(&d);
        report.check(Check::flag(&format!("D{i}^2 = -2"), s == "-2", Some(s)));
    }
    for i in 1..=4 {
        if co[i - 1] {
            let (c1, c2) = lat.coincident_curves(i).map_err(usage)?;
            let (s1, s2) = (sq(&c1), sq(&c2));
            report.check(Check::flag(&format!("C1[{i}]^2 = -1"), s1 == "-1", Some(s1)));
            report.check(Check::flag(&format!("C2[{i}]^2 = -2"), s2 == "-2", Some(s2)));
        } else {
            for (k, e) in lat.exceptionals_at(i).iter().enumerate() {
                let s = sq(e);
                report.check(Check::flag(&format!("E[{i},{}]^2 = -1", if k == 0 { '+' } else { '-' }), s == "-1", Some(s)));
            }
        }
    }
    let dynkin = dynkin_type(&cfg);
    report.check(Check::flag("dynkin = D4(1)", dynkin == DynkinType::D(4), Some(dynkin.to_string())));
    report.put("dynkin", &dynkin.to_string());
    report.put("kodaira", &dynkin.kodaira());
    report.put("coincidences", &co);
    report.put("lattice", &lat.export());
    let comps: Vec<_> = cfg.components.iter().map(|c| json!({ "label": c.label, "multiplicity": c.multiplicity })).collect();
    report.put("components", &comps);
    let aux: Vec<&String> = cfg.auxiliary.iter().map(|(l, _)| l).collect();
    report.put("auxiliary", &aux);
    Ok(report)
}

pub fn stability(ctx: &Ctx, mut report: Report) -> Result<Report, CliError> {
    let l = ctx.cfg.lambda()?;
    let lambda = [l[0].exact()?, l[1].exact()?, l[2].exact()?, l[3].exact()?];
    let e = ExponentData::new(ctx.cfg.t_exact()?, lambda).map_err(usage)?;
    report.put("speciality", &e.is_special());
    let (q, h1) = match &ctx.cfg.point {
        Some(p) => (p.q.exact()?, p.h1.exact()?),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let mut r = |lo: i64, hi: i64| (rng.random_range(lo..hi), 20);
            (okamoto::field::qc(r(-20, 80), r(1, 30)), okamoto::field::qc(r(-40, 40), r(-40, 40)))
        }
    };
    report.put("point", &json!({ "q": [q.re.to_string(), q.im.to_string()], "h1": [h1.re.to_string(), h1.im.to_string()] }));
    let mut conn = from_surface_point(&SurfacePoint::chart(q, h1), &e).map_err(usage)?;
    if ctx.cfg.omega3_zero.unwrap_or(false) {
        conn.omega[2] = Poly::zero();
    }
    let w = ctx.cfg.weight()?;
    let expect = ctx.cfg.expect.unwrap_or_default();
    let alpha = match is_alpha_stable(&conn, &w) {
        Ok(a) => a,
        Err(x) => return failed(report, "alpha-stability", x),
    };
    let phi = match is_phi_stable(&conn, &w) {
        Ok(p) => p,
        Err(x) => return failed(report, "phi-stability", x),
    };
    let want = expect == Expectation::Stable;
    let a_label = alpha.verdict.witness().map(|w| w.sub.label());
    let p_label = phi.verdict.witness().map(|w| w.label.clone());
    report.check(Check::flag(
        "alpha verdict",
        alpha.verdict.is_stable() == want,
        Some(format!("{}{}", alpha.verdict.kind(), a_label.as_ref().map(|l| format!(" (witness {l})")).unwrap_or_default())),
    ));
    report.check(Check::flag(
        "phi verdict",
        phi.verdict.is_stable() == want,
        Some(format!("{}{}", phi.verdict.kind(), p_label.as_ref().map(|l| format!(" (witness {l})")).unwrap_or_default())),
    ));
    if conn.phi_invertible() {
        report.check(Check::flag("alpha and phi agree", alpha.verdict.kind() == phi.verdict.kind(), None));
    }
    let subs: Vec<_> = alpha.invariant_subbundles.iter().map(|s| json!({ "label": s.sub.label(), "pardeg": s.pardeg.to_string() })).collect();
    report.put(
        "alpha",
        &json!({ "verdict": alpha.verdict.kind(), "witness": a_label, "pardeg_e": alpha.pardeg_e.to_string(), "invariant_subbundles": subs }),
    );
    let cands: Vec<_> = phi.candidates.iter().map(|s| json!({ "label": s.label, "mu": s.mu.to_string() })).collect();
    report.put("phi", &json!({ "verdict": phi.verdict.kind(), "witness": p_label, "mu_e": phi.mu_e.to_string(), "candidates": cands }));
    report.put("expect", &expect);
    Ok(report)
}

fn monodromy_options(ctx: &Ctx, base: MonodromyOptions) -> Result<MonodromyOptions, CliError> {
    let mut o = base;
    if let Some(m) = &ctx.cfg.monodromy {
        o.tol = m.tol.unwrap_or(o.tol);
        o.vertices = m.vertices.unwrap_or(o.vertices);
        o.radius_factor = m.radius_factor.unwrap_or(o.radius_factor);
        o.clearance_factor = m.clearance_factor.unwrap_or(o.clearance_factor);
        if let Some(b) = &m.basepoint {
            o.basepoint = Some(b.c64()?);
        }
    }
    if let Some(t) = ctx.tol {
        o.tol = t;
    }
    Ok(o)
}

pub fn monodromy_cmd(ctx: &Ctx, mut report: Report) -> Result<Report, CliError> {
    let (e, conn) = float_connection(ctx, &mut report)?;
    report.put("conn", &ConnV1::from(&conn));
    let th = ctx.cfg.thresholds();
    let opts = monodromy_options(ctx, MonodromyOptions::default())?;
    let sys = match to_fuchsian_system(&conn) {
        Ok(s) => s,
        Err(x) => return failed(report, "fuchsian system", x),
    };
    let rep = match monodromy(&sys, &opts) {
        Ok(r) => r,
        Err(x) => return failed(report, "monodromy", x),
    };
    report.check(Check::bound("trace contract", rep.trace_residual(&e), th.trace));
    report.check(Check::bound("relation residual", rep.relation_residual(), th.relation));
    report.check(Check::bound("det residual", rep.det_residual(&e), th.det));
    let inv = rh_invariants(&rep);
    match char_map(&SurfaceGroupRep::from_monodromy(&rep), th.relation.max(1e-8)) {
        Ok(cd) => {
            let [x, y, z] = cd.pairwise.unwrap_or([C::new(f64::INFINITY, 0.0); 3]);
            let d = (0..4)
                .flat_map(|i| (0..2).map(move |k| (i, k)))
                .map(|(i, k)| (cd.a.a[i][k] - inv.a[i][k]).norm())
                .chain([(x - inv.x).norm(), (y - inv.y).norm(), (z - inv.z).norm()])
                .fold(0.0, f64::max);
            report.check(Check::bound("character map agrees", d, th.trace));
        }
        Err(x) => report.check(Check::flag("character map agrees", false, Some(x.to_string()))),
    }
    let class = match classify_rep(&rep, &e, th.relation.max(1e-8)) {
        Ok(c) => c,
        Err(x) => return failed(report, "classification", x),
    };
    report.put("expected_traces", &expected_traces(&e));
    report.put("invariants", &inv);
    report.put("rep", &RepV1::new(&rep, Some(&e), Some(class.verdict)));
    report.put("classification", &class);
    report.put("options", &json!({ "tol": opts.tol, "vertices": opts.vertices, "radius_factor": opts.radius_factor, "clearance_factor": opts.clearance_factor }));
    Ok(report)
}

pub fn continue_cmd(ctx: &Ctx, mut report: Report) -> Result<Report, CliError> {
    let (e, conn) = float_connection(ctx, &mut report)?;
    let th = ctx.cfg.thresholds();
    let cc = ctx.cfg.continuation.clone().unwrap_or_default();
    let t3 = e.t[2];
    let mut path = vec![t3];
    match &cc.path {
        Some(p) => {
            for z in p {
                let z = z.c64()?;
                if path.len() > 1 || z != t3 {
                    path.push(z);
                }
            }
        }
        None => path.push(t3 + C::new(0.2, 0.2)),
    }
    let mut opts = ContinuationOptions::default();
    opts.steps = cc.steps.unwrap_or(opts.steps);
    opts.newton_tol = cc.newton_tol.unwrap_or(opts.newton_tol);
    opts.pvi_tolerance = cc.pvi_tolerance.unwrap_or(opts.pvi_tolerance);
    opts.weight = ctx.cfg.weight()?;
    opts.monodromy = monodromy_options(ctx, opts.monodromy)?;
    report.put("path", &path.iter().map(|z| CScalar::from_c64(*z)).collect::<Vec<_>>());
    let r = match isomonodromic_continue(&conn, &path, &opts) {
        Ok(r) => r,
        Err(ContinuationError::Rh(x)) => return failed(report, "monodromy", x),
        Err(x) => return Err(usage(x)),
    };
    report.check(Check::flag("continuation completed", r.completed, r.failure.clone()));
    report.check(Check::bound("max trace drift", r.max_drift, th.drift));
    if let Some(p) = &r.pvi_check {
        report.check(Check::bound("PVI cross-check", p.max_residual, p.tolerance).advisory());
    }
    report.put("target", &r.target);
    report.put("steps", &r.steps);
    report.put("events", &r.events);
    report.put("pvi_check", &r.pvi_check);
    report.put("final_conn", &ConnV1::from(&r.final_conn));
    let cols = ["step", "t3_re", "t3_im", "q_re", "q_im", "h1_re", "h1_im", "drift", "drift_x", "drift_y", "drift_z", "drift_local", "newton", "bisections"];
    let rows = r
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| {
            vec![
                k as f64, s.t3.re, s.t3.im, s.q.re, s.q.im, s.h1.re, s.h1.im, s.drift, s.drift_x, s.drift_y, s.drift_z, s.drift_local,
                s.newton_iterations as f64, s.bisections as f64,
            ]
        })
        .collect();
    report.series = Some(Series { columns: cols.map(String::from).to_vec(), rows });
    Ok(report)
}

pub fn pvi_cmd(ctx: &Ctx, mut report: Report) -> Result<Report, CliError> {
    let l = ctx.cfg.lambda()?;
    let lambda = [l[0].c64()?, l[1].c64()?, l[2].c64()?, l[3].c64()?];
    let th = ctx.cfg.thresholds();
    let pc = ctx.cfg.pvi.clone().unwrap_or_default();
    let need = |v: &Option<CScalar>, name: &str| v.as_ref().ok_or_else(|| usage(format!("missing field `pvi.{name}`"))).and_then(|z| z.c64());
    let (x, y, t0, t1) = (need(&pc.x, "x")?, need(&pc.y, "y")?, need(&pc.t0, "t0")?, need(&pc.t1, "t1")?);
    let st = PviState::new(x, y, t0, lambda).map_err(usage)?;
    let mut opts = PviOptions::default();
    opts.tol = ctx.tol.unwrap_or(opts.tol);
    opts.blowup = pc.blowup.unwrap_or(opts.blowup);
    report.put("lambda_bar", &lambda_bar(&lambda));
    let tr = match integrate_pvi(&st, &[t0, t1], &opts) {
        Ok(t) => t,
        Err(x @ PviError::Accuracy { .. }) => return failed(report, "integration", x),
        Err(x) => return Err(usage(x)),
    };
    let worst = tr.samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    report.check(Check::bound("second-order residual", worst, th.residual));
    if tr.halted {
        report.check(Check::flag("grid residual", true, Some("skipped: trajectory halted at a movable singularity".to_string())).advisory());
    } else {
        let n = pc.intervals.unwrap_or(100);
        match integrate_pvi_grid(&st, t1, n, &opts) {
            Ok(grid) => {
                let ts: Vec<C> = grid.iter().map(|s| s.t).collect();
                let xs: Vec<C> = grid.iter().map(|s| s.x).collect();
                let r = fd_second_order_residuals(&ts, &xs, &lambda).into_iter().fold(0.0, f64::max);
                report.check(Check::bound("grid residual", r, th.residual));
            }
            Err(x) => return failed(report, "grid integration", x),
        }
    }
    report.put("halted", &tr.halted);
    report.put("events", &tr.events);
    report.put("stats", &tr.stats);
    report.put("final", tr.samples.last().expect("initial sample"));
    let cols = ["t_re", "t_im", "x_re", "x_im", "y_re", "y_im", "h_re", "h_im", "residual"];
    let rows = tr.samples.iter().map(|s| vec![s.t.re, s.t.im, s.x.re, s.x.im, s.y.re, s.y.im, s.h.re, s.h.im, s.residual]).collect();
    report.series = Some(Series { columns: cols.map(String::from).to_vec(), rows });
    Ok(report)
}
