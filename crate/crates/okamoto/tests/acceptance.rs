//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigInt;
use okamoto::field::{qc, qr};
use okamoto::isomonodromy::*;
use okamoto::lattice::*;
use okamoto::parabolic::*;
use okamoto::poly::Poly;
use okamoto::rh::*;
use okamoto::{Complex64 as C, QC};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_lambda(rng: &mut ChaCha8Rng) -> [f64; 4] {
    loop {
        let l: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.45..0.45));
        if well_generic(&l) {
            return l;
        }
    }
}

fn random_lambda_q(rng: &mut ChaCha8Rng) -> [i64; 4] {
    loop {
        let n: [i64; 4] = std::array::from_fn(|_| rng.random_range(-40..40));
        if well_generic(&n.map(|k| k as f64 / 97.0)) {
            return n;
        }
    }
}

fn random_chart(rng: &mut ChaCha8Rng) -> (C, C) {
    (c(rng.random_range(-1.0..4.0), rng.random_range(0.2..1.5)), c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
}

fn random_chart_q(rng: &mut ChaCha8Rng) -> (QC, QC) {
    let mut r = |lo: i64, hi: i64| (rng.random_range(lo..hi), 20);
    (qc(r(-20, 80), r(1, 30)), qc(r(-40, 40), r(-40, 40)))
}

fn lattice_suite() -> Outcome {
    let mut failures = Vec::new();
    let bi = BigInt::from;
    for m in 0..16u32 {
        let co: [bool; 4] = std::array::from_fn(|i| m >> i & 1 == 1);
        let l = build_okamoto_surface(co);
        let cfg = anti_canonical(&l);
        let rep = verify_op_pair(&cfg);
        if !rep.ok {
            failures.push(format!("{co:?}: {:?}", rep.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>()));
        }
        let y = cfg.total();
        if l.self_intersection(&y) != bi(0) {
            failures.push(format!("{co:?}: Y^2 != 0"));
        }
        for i in 0..=4 {
            let d = l.d(i).unwrap();
            if l.self_intersection(&d) != bi(-2) || l.intersect(&y, &d).unwrap() != bi(0) {
                failures.push(format!("{co:?}: D{i}"));
            }
        }
        for i in 1..=4 {
            if co[i - 1] {
                let (c1, c2) = l.coincident_curves(i).unwrap();
                if l.self_intersection(&c1) != bi(-1) || l.self_intersection(&c2) != bi(-2) {
                    failures.push(format!("{co:?}: C1/C2 at {i}"));
                }
            } else {
                for e in l.exceptionals_at(i) {
                    if l.self_intersection(&e) != bi(-1) {
                        failures.push(format!("{co:?}: exceptional at {i}"));
                    }
                }
            }
        }
        if dynkin_type(&cfg) != DynkinType::D(4) {
            failures.push(format!("{co:?}: type {}", dynkin_type(&cfg)));
        }
    }
    ok(failures.is_empty(), if failures.is_empty() { "16 configurations exact".into() } else { failures.join("; ") })
}

fn dimension() -> Outcome {
    let (a, b) = (moduli_dimension(2, 4, 0), moduli_dimension(2, 5, 0));
    ok(a == 2 && a == 2 * 4 - 6 && b == 4, format!("dim(2,4,0) = {a}, dim(2,5,0) = {b}"))
}

fn trace_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut tr_err, mut rel, mut det): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..20 {
        let l = random_lambda(&mut rng);
        let (q, h1) = random_chart(&mut rng);
        let e = exp_f64(l);
        let run = || -> Result<MonodromyRep, String> {
            let conn = from_surface_point(&SurfacePoint::chart(q, h1), &e).map_err(|x| x.to_string())?;
            let sys = to_fuchsian_system(&conn).map_err(|x| x.to_string())?;
            monodromy(&sys, &MonodromyOptions::default()).map_err(|x| x.to_string())
        };
        let rep = match run() {
            Ok(r) => r,
            Err(msg) => return ok(false, format!("λ = {l:?}: {msg}")),
        };
        for (i, t) in rep.traces().iter().enumerate() {
            tr_err = tr_err.max((t - 2.0 * (std::f64::consts::TAU * l[i]).cos()).norm());
        }
        rel = rel.max(rep.relation_residual());
        det = det.max(rep.det_residual(&e));
    }
    ok(
        tr_err <= 1e-6 && rel <= 1e-8 && det <= 1e-8,
        format!("max |tr - 2cos| = {tr_err:.2e}, relation {rel:.2e}, det {det:.2e}"),
    )
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut dq, mut di): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let e = exp_f64(random_lambda(&mut rng));
        let (q, h1) = random_chart(&mut rng);
        let s = SurfacePoint::chart(q, h1);
        let back = match from_surface_point(&s, &e).and_then(|conn| p_map(&conn)) {
            Ok(b) => b,
            Err(x) => return ok(false, x.to_string()),
        };
        dq = dq.max((back.q - q).norm());
        let n = |v: &[C; 2]| v[0].norm().hypot(v[1].norm());
        di = di.max((back.iota[0] * s.iota[1] - back.iota[1] * s.iota[0]).norm() / (n(&back.iota) * n(&s.iota)));
    }
    ok(dq <= 1e-10 && di <= 1e-10, format!("max |Δq| = {dq:.2e}, max chordal Δι = {di:.2e}"))
}

fn stability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut notes = Vec::new();
    let mut pass = true;
    let w = Weight::uniform(100, 1000);
    let mut conns = Vec::new();
    for _ in 0..50 {
        let e = exp_q(random_lambda_q(&mut rng), 97);
        let (q, h1) = random_chart_q(&mut rng);
        conns.push(from_surface_point(&SurfacePoint::chart(q, h1), &e).unwrap());
    }
    let stable = conns.iter().filter(|c| is_alpha_stable(c, &w).unwrap().verdict.is_stable()).count();
    pass &= stable == 50;
    notes.push(format!("{stable}/50 chart connections alpha-stable"));

    let mut rejected = 0;
    for conn in conns.clone().iter().take(10) {
        let mut bad = conn.clone();
        bad.omega[2] = Poly::zero();
        if let Verdict::Unstable(wit) = is_alpha_stable(&bad, &w).unwrap().verdict {
            if wit.sub.label() == "O+0" {
                rejected += 1;
            }
        }
        conns.push(bad);
    }
    pass &= rejected == 10;
    notes.push(format!("{rejected}/10 omega3 = 0 rejected with O+0"));

    let mut agree = 0;
    let mut total = 0;
    for gamma in [1000, 10_000, 1_000_000] {
        let w = Weight::uniform(100, gamma);
        for conn in conns.iter().filter(|c| c.phi_invertible()) {
            total += 1;
            let a = is_alpha_stable(conn, &w).unwrap().verdict.kind();
            let p = is_phi_stable(conn, &w).unwrap().verdict.kind();
            if a == p {
                agree += 1;
            }
        }
    }
    pass &= agree == total;
    notes.push(format!("alpha/phi agree on {agree}/{total} at gamma >= 1e3"));
    ok(pass, notes.join(", "))
}

fn fibre_collision() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = Vec::new();
    for k in 0..64 {
        let e = exp_q(random_lambda_q(&mut rng), 97);
        let i = k % 4;
        let pa = [qr(1, 1), qr(rng.random_range(-9..9), rng.random_range(1..9))];
        let pb = [qr(rng.random_range(1..9), 1), qr(rng.random_range(-9..9), rng.random_range(1..9))];
        if projectively_equal(&pa, &pb) {
            continue;
        }
        let ca = exceptional_fiber_member(&e, i, FibreBranch::Plus, pa).unwrap();
        let cb = exceptional_fiber_member(&e, i, FibreBranch::Plus, pb).unwrap();
        let (sa, sb) = (p_map(&ca).unwrap(), p_map(&cb).unwrap());
        let b_plus = SurfacePoint::exceptional(&e, i, true);
        let same_image = sa.q == sb.q && projectively_equal(&sa.iota, &sb.iota) && projectively_equal(&sa.iota, &b_plus.iota);
        let distinct = !projectively_equal(&exceptional_invariant(&ca, i).unwrap(), &exceptional_invariant(&cb, i).unwrap());
        if !(same_image && distinct) {
            bad.push(k);
        }
    }
    ok(bad.is_empty(), if bad.is_empty() { "64 pairs: equal image, distinct invariants".into() } else { format!("failed cases {bad:?}") })
}

fn pvi() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut grad: f64 = 0.0;
    for _ in 0..100 {
        let mut r = || rng.random_range(-1.5..1.5);
        let t = loop {
            let t = c(r(), r());
            if t.norm() > 0.2 && (t - 1.0).norm() > 0.2 {
                break t;
            }
        };
        let lambda = [0; 4].map(|_| c(r() * 0.3, 0.0));
        let st = PviState::new(c(r(), r()), c(r(), r()), t, lambda).unwrap();
        let d = hamiltonian_partials(&st).unwrap();
        let e = 1e-5;
        let fd = |f: &dyn Fn(C) -> PviState| (h_vi(&f(c(e, 0.))).unwrap() - h_vi(&f(c(-e, 0.))).unwrap()) / (2.0 * e);
        let pairs = [
            (d.h_x, fd(&|s| PviState { x: st.x + s, ..st })),
            (d.h_y, fd(&|s| PviState { y: st.y + s, ..st })),
            (d.h_t, fd(&|s| PviState { t: st.t + s, ..st })),
        ];
        for (a, b) in pairs {
            grad = grad.max((a - b).norm() / (1.0 + a.norm()));
        }
    }
    let mut res: f64 = 0.0;
    let mut fd_res: f64 = 0.0;
    for _ in 0..5 {
        let lambda = [0; 4].map(|_| c(rng.random_range(-0.4..0.4), 0.0));
        let t0 = c(rng.random_range(0.3..0.7), rng.random_range(0.3..0.6));
        let st = PviState::new(c(rng.random_range(0.2..0.6), 0.2), c(rng.random_range(-0.3..0.3), -0.1), t0, lambda).unwrap();
        let t1 = t0 + c(0.2, 0.1);
        match integrate_pvi(&st, &[t0, t1], &PviOptions::default()) {
            Ok(tr) if !tr.halted => res = tr.samples.iter().map(|s| s.residual).fold(res, f64::max),
            Ok(_) => continue,
            Err(x) => return ok(false, x.to_string()),
        }
        let grid = integrate_pvi_grid(&st, t1, 100, &PviOptions::default()).unwrap();
        let ts: Vec<C> = grid.iter().map(|s| s.t).collect();
        let xs: Vec<C> = grid.iter().map(|s| s.x).collect();
        fd_res = fd_second_order_residuals(&ts, &xs, &lambda).into_iter().fold(fd_res, f64::max);
    }
    ok(
        res <= 1e-6 && fd_res <= 1e-6 && grad <= 1e-7,
        format!("residual {res:.2e}, grid residual {fd_res:.2e}, gradient {grad:.2e}"),
    )
}

fn isomonodromy() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut pvi_worst: f64 = 0.0;
    let mut pvi_passed = 0;
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(800 + seed);
        let e = exp_f64(random_lambda(&mut rng));
        let (q, h1) = random_chart(&mut rng);
        let conn = from_surface_point(&SurfacePoint::chart(q, h1), &e).unwrap();
        let end = c(2.0, 0.0) + c(rng.random_range(-0.3..0.3), rng.random_range(0.1..0.4));
        match isomonodromic_continue(&conn, &[c(2., 0.), end], &ContinuationOptions::default()) {
            Ok(r) => {
                pass &= r.completed && r.steps.len() == 51;
                worst = worst.max(r.max_drift);
                if let Some(f) = &r.failure {
                    notes.push(format!("seed {seed}: {f}"));
                }
                if let Some(p) = &r.pvi_check {
                    pvi_worst = pvi_worst.max(p.max_residual);
                    pvi_passed += p.passed as usize;
                }
            }
            Err(x) => {
                pass = false;
                notes.push(format!("seed {seed}: {x}"));
            }
        }
    }
    pass &= worst <= 1e-6;
    notes.insert(0, format!("max drift {worst:.2e} over 5 x 50 steps"));
    let conn = from_surface_point(&SurfacePoint::chart(c(0.7, 0.4), c(0.3, -0.2)), &exp_f64([0.11, 0.12, 0.13, 0.15])).unwrap();
    match isomonodromic_continue(&conn, &[c(2., 0.), c(2., 0.)], &ContinuationOptions::default()) {
        Ok(r) => {
            let moved = r.steps.iter().map(|s| (s.q - c(0.7, 0.4)).norm().max((s.h1 - c(0.3, -0.2)).norm())).fold(0.0, f64::max);
            pass &= moved <= 1e-10;
            notes.push(format!("zero-length path moves {moved:.1e}"));
        }
        Err(x) => {
            pass = false;
            notes.push(format!("zero-length path: {x}"));
        }
    }
    notes.push(format!("PVI cross-check (non-blocking) {pvi_passed}/5 within 1e-4, max {pvi_worst:.1e}"));
    ok(pass, notes.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("lattice", lattice_suite, Duration::from_secs(1)),
        ("dimension", dimension, Duration::from_secs(1)),
        ("trace contract", trace_contract, Duration::from_secs(30)),
        ("round trip", round_trip, Duration::from_secs(5)),
        ("stability", stability, Duration::from_secs(60)),
        ("fibre collision", fibre_collision, Duration::from_secs(60)),
        ("painleve vi", pvi, Duration::from_secs(10)),
        ("isomonodromy", isomonodromy, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (k, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let dt = start.elapsed();
        let pass = out.pass && dt <= *budget;
        failed += !pass as usize;
        println!(
            "criterion {}: {} [{name}] {} ({:.2}s, budget {}s)",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            dt.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
