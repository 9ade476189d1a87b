use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use okamoto::charvar::{exponent_table, random_rep_with_a, rh_exponents, SamplingOptions};
use okamoto::field::qr;
use okamoto::isomonodromy::{integrate_pvi, isomonodromic_continue, ContinuationOptions, PviOptions, PviState};
use okamoto::lattice::{anti_canonical, build_okamoto_surface, verify_op_pair};
use okamoto::parabolic::{from_surface_point, is_alpha_stable, is_phi_stable, p_map, ExponentData, SurfacePoint, Weight};
use okamoto::rh::{monodromy, to_fuchsian_system, MonodromyOptions};
use okamoto_bench::{c, standard_connection, standard_exponents};

fn lattice(cr: &mut Criterion) {
    cr.bench_function("lattice/verify_op_pair", |b| {
        b.iter(|| verify_op_pair(&anti_canonical(&build_okamoto_surface([false, true, false, false]))))
    });
}

fn parabolic(cr: &mut Criterion) {
    let e = standard_exponents();
    cr.bench_function("parabolic/round_trip_f64", |b| {
        b.iter(|| p_map(&from_surface_point(&SurfacePoint::chart(c(0.7, 0.4), c(0.3, -0.2)), &e).unwrap()).unwrap())
    });
    let eq = ExponentData::new([0, 1, 2, 3].map(|k| qr(k, 1)), [11, 12, 13, 15].map(|k| qr(k, 100))).unwrap();
    let conn = from_surface_point(&SurfacePoint::chart(qr(1, 3), qr(2, 1)), &eq).unwrap();
    let w = Weight::uniform(100, 1000);
    cr.bench_function("parabolic/alpha_stability_exact", |b| b.iter(|| is_alpha_stable(&conn, &w).unwrap()));
    cr.bench_function("parabolic/phi_stability_exact", |b| b.iter(|| is_phi_stable(&conn, &w).unwrap()));
}

fn riemann_hilbert(cr: &mut Criterion) {
    let sys = to_fuchsian_system(&standard_connection()).unwrap();
    let mut g = cr.benchmark_group("monodromy");
    for tol in [1e-8, 1e-10, 1e-12] {
        let opts = MonodromyOptions { tol, estimate_error: false, ..Default::default() };
        g.bench_function(format!("tol={tol:e}"), |b| b.iter(|| monodromy(&sys, &opts).unwrap()));
    }
    g.finish();
}

fn character_variety(cr: &mut Criterion) {
    let (table, d) = exponent_table(&standard_exponents());
    let target = rh_exponents(&table, d, 1e-12).unwrap();
    let mut seed = 0u64;
    cr.bench_function("charvar/random_rep_g0n4", |b| {
        b.iter_batched(
            || {
                seed += 1;
                seed
            },
            |s| random_rep_with_a(0, 4, 2, &target, s, &SamplingOptions::default()).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn painleve(cr: &mut Criterion) {
    let e = standard_exponents();
    let st = PviState::new(c(0.4, 0.2), c(0.3, -0.1), c(0.5, 0.5), e.lambda).unwrap();
    cr.bench_function("pvi/integrate_segment", |b| {
        b.iter(|| integrate_pvi(&st, &[c(0.5, 0.5), c(0.8, 0.7)], &PviOptions::default()).unwrap())
    });
    let conn = standard_connection();
    let opts = ContinuationOptions { steps: 10, ..Default::default() };
    let mut g = cr.benchmark_group("continuation");
    g.sample_size(10);
    g.bench_function("10_steps", |b| b.iter(|| isomonodromic_continue(&conn, &[c(2.0, 0.0), c(2.1, 0.1)], &opts).unwrap()));
    g.finish();
}

criterion_group!(benches, lattice, parabolic, riemann_hilbert, character_variety, painleve);
criterion_main!(benches);
