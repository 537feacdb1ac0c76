//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cclab::oracle;
use cclab_core::curvature::{ambient_r_star, CurvatureTensors};
use cclab_core::inequalities::{hessian_spectrum, Analysis};
use cclab_core::invariants::{self, ExtremumMode};
use cclab_core::point::AmbientModel;
use cclab_core::quat::QuaternionicStructure;
use cclab_core::scenario::{self, HSpec, MSpec, ScenarioKind, ScenarioSpec};
use cclab_core::tolerance::scale;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / scale(a, b)
}

fn random_unit(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let norm = v.norm();
        if norm > 0.1 && norm <= 1.0 {
            return v / norm;
        }
    }
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

fn envelope(count: u64) -> Vec<cclab_core::SubmanifoldPoint> {
    (0..count).map(|s| scenario::build(&ScenarioSpec::random_envelope(s)).expect("random scenario")).collect()
}

fn structure_suite() -> Outcome {
    let mut worst = 0.0f64;
    let mut pass = true;
    for m in 1..=4 {
        let q = QuaternionicStructure::build_standard(m).expect("standard structure");
        let r = q.verify();
        for x in r.square.iter().chain(&r.cyclic).chain(&r.anticommutator) {
            worst = worst.max(*x);
        }
        pass &= r.pass && r.max_residual() <= 1e-12;
    }
    outcome(pass && worst <= 1e-12, format!("m = 1..4, worst of nine identity residuals {worst:.1e}"))
}

fn tensor_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let amb = AmbientModel::standard(2, rng.random_range(-2.0..2.0)).unwrap();
        let v: Vec<DVector<f64>> = (0..4).map(|_| DVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0))).collect();
        let r = |a: usize, b: usize, c: usize, d: usize| ambient_r_star(&amb, &v[a], &v[b], &v[c], &v[d]).unwrap();
        let base = r(0, 1, 2, 3);
        let residuals = [
            base + r(1, 0, 2, 3),
            base + r(0, 1, 3, 2),
            base - r(2, 3, 0, 1),
            base + r(1, 2, 0, 3) + r(2, 0, 1, 3),
        ];
        for x in residuals {
            worst = worst.max(x.abs());
        }
    }
    outcome(worst <= 1e-10, format!("1000 quadruples in R^8, worst symmetry/Bianchi residual {worst:.1e}"))
}

fn master_identity(points: &[cclab_core::SubmanifoldPoint]) -> Outcome {
    let (mut master, mut tp, mut tdp) = (0.0f64, 0.0f64, 0.0f64);
    for p in points {
        let t = CurvatureTensors::new(p);
        let n = p.n() as f64;
        let h2 = invariants::mean_curvature(p).norm2;
        master = master.max(rel(2.0 * t.scalar_tau(), t.tau_dprime() + n * n * h2 - p.norm_h2()));
        tp = tp.max(rel(t.tau_prime(), t.tau_prime_direct()));
        tdp = tdp.max(rel(t.tau_dprime(), t.tau_dprime_trace())).max(rel(t.tau_dprime(), t.tau_dprime_contraction()));
    }
    outcome(
        master <= 1e-9 && tp <= 1e-9 && tdp <= 1e-10,
        format!("{} scenarios: master {master:.1e}, tau' {tp:.1e}, tau'' {tdp:.1e}", points.len()),
    )
}

fn scalar_bound(points: &[cclab_core::SubmanifoldPoint]) -> Outcome {
    let mut holds = true;
    let mut identity = 0.0f64;
    let mut spurious = 0;
    for p in points {
        let r = Analysis::new(p, 0).check_a1();
        holds &= r.holds;
        identity = identity.max(r.identity_residual().unwrap());
        spurious += r.equality as usize;
    }
    let mut constructed = 0;
    let mut hits = 0;
    for (i, kind) in [ScenarioKind::Invariant, ScenarioKind::AntiInvariant, ScenarioKind::Random].into_iter().enumerate() {
        for lambdas in [vec![], vec![1.0], vec![0.5, -1.5]] {
            let n = if kind == ScenarioKind::Invariant { 4 } else { 3 };
            let spec = ScenarioSpec { kind, n, m: 3, c: 0.7 - i as f64, h: HSpec::Umbilical(lambdas), m_tensor: MSpec::Random { scale: 0.3 }, seed: 9 };
            let p = scenario::build(&spec).unwrap();
            constructed += 1;
            hits += Analysis::new(&p, 0).check_a1().equality as usize;
        }
    }
    for name in ["S0", "S1", "S2"] {
        let p = scenario::fixture_point(name).unwrap();
        constructed += 1;
        hits += Analysis::new(&p, 0).check_a1().equality as usize;
    }
    outcome(
        holds && identity <= 1e-9 && spurious == 0 && hits == constructed,
        format!(
            "{} scenarios hold; identity residual {identity:.1e}; equality on {hits}/{constructed} umbilical constructions, {spurious} spurious",
            points.len()
        ),
    )
}

fn ricci_bound(points: &[cclab_core::SubmanifoldPoint]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut fails = 0;
    let mut min_slack = f64::INFINITY;
    for (i, p) in points.iter().take(200).enumerate() {
        let a = Analysis::new(p, i as u64);
        for _ in 0..100 {
            let r = a.check_a2(&random_unit(&mut rng, p.n())).unwrap();
            fails += (!r.holds) as usize;
            min_slack = min_slack.min(r.slack / scale(r.lhs, r.rhs_canonical));
        }
    }
    let s0 = scenario::fixture_point("S0").unwrap();
    let r0 = Analysis::new(&s0, 0).check_a2(&unit(4, 0)).unwrap();
    let s1 = scenario::fixture_point("S1").unwrap();
    let ric = CurvatureTensors::new(&s1).ricci(&unit(4, 0)).unwrap();
    outcome(
        fails == 0 && r0.equality && r0.slack.abs() <= 1e-8 && (ric - 15.0).abs() <= 1e-10,
        format!("20000 vectors, {fails} failures, min relative slack {min_slack:.1e}; S0 slack {:.1e}; S1 Ric(e1) = {ric}", r0.slack),
    )
}

fn sectional_bound(points: &[cclab_core::SubmanifoldPoint]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut fails, mut total) = (0, 0);
    for (i, p) in points.iter().take(200).enumerate() {
        let a = Analysis::new(p, i as u64);
        let n = p.n();
        let mut planes: Vec<(DVector<f64>, DVector<f64>)> =
            (0..n).flat_map(|x| ((x + 1)..n).map(move |y| (unit(n, x), unit(n, y)))).collect();
        planes.extend((0..100).map(|_| (random_unit(&mut rng, n), random_unit(&mut rng, n))));
        for (u, v) in planes {
            let r = a.check_a3(&u, &v).unwrap();
            total += 1;
            fails += (!r.holds) as usize;
        }
    }
    let s1 = scenario::fixture_point("S1").unwrap();
    let r = Analysis::new(&s1, 0).check_a3(&unit(4, 0), &unit(4, 1)).unwrap();
    outcome(
        fails == 0 && (r.slack - 1.0 / 3.0).abs() <= 1e-9,
        format!("{total} planes, {fails} failures; S1 (e1,e2) slack {:.15}", r.slack),
    )
}

fn casorati_bounds(points: &[cclab_core::SubmanifoldPoint]) -> Outcome {
    let (mut fails, mut t_res, mut scaling) = (0, 0.0f64, 0.0f64);
    for (i, p) in points.iter().enumerate() {
        let a = Analysis::new(p, i as u64);
        let n = p.n() as f64;
        for r in [1.0, n * (n - 1.0) / 2.0, n * n - n - 1.0, n * n - n + 1.0, 2.0 * n * (n - 1.0)] {
            let rep = a.check_b1(r).unwrap();
            fails += (!rep.holds) as usize;
            t_res = t_res.max(rep.identity_residual().unwrap());
        }
        let cor = a.check_corollary().unwrap();
        fails += (!cor.delta_c.holds) as usize + (!cor.delta_c_hat.holds) as usize;
        let nn = n * (n - 1.0);
        let low = a.check_b1(nn / 2.0).unwrap().lhs;
        let high = a.check_b1(2.0 * nn).unwrap().lhs;
        scaling = scaling.max(cor.scaling_residual[0] / scale(low, 1.0)).max(cor.scaling_residual[1] / scale(high, 1.0));
    }
    let q = scenario::build(&ScenarioSpec::invariant(4, 2, 1.0).with_h(HSpec::QuasiUmbilical { u: 1.0, r: 6.0 })).unwrap();
    let qr = Analysis::new(&q, 0).check_b1(6.0).unwrap();
    outcome(
        fails == 0 && t_res <= 1e-8 && scaling <= 1e-10 && qr.slack.abs() <= 1e-9,
        format!(
            "{} scenarios x 5 r + corollary, {fails} failures; T residual {t_res:.1e}; scaling {scaling:.1e}; quasi-umbilical slack {:.1e} ({})",
            points.len(),
            qr.slack,
            qr.equality_case
        ),
    )
}

fn hessian_claim() -> Outcome {
    let mut bad = Vec::new();
    for n in 3..=8usize {
        for r in 1..=(2 * n * (n - 1)) {
            let h = hessian_spectrum(n, r as f64).unwrap();
            if !(h.psd && h.zero_multiplicity == 1) {
                bad.push((n, r));
            }
        }
    }
    let h = hessian_spectrum(4, 6.0).unwrap();
    let exact = h.eigenvalues.iter().zip([0.0, 7.0, 10.0, 10.0]).all(|(a, b)| (a - b).abs() <= 1e-9);
    outcome(
        bad.is_empty() && exact && h.all_match(),
        format!("n = 3..8, all r: {} cases fail PSD/single-zero {:?}; (4,6) eigenvalues {:?}", bad.len(), bad, h.eigenvalues),
    )
}

fn optimizer_vs_oracle() -> Outcome {
    let mut worst = [0.0f64; 3];
    let mut count = 0;
    for n in [3usize, 4] {
        for s in 0..50u64 {
            let mut spec = ScenarioSpec::random_envelope(1000 + s);
            spec.n = n;
            let p = scenario::build(&spec).unwrap();
            let t = CurvatureTensors::new(&p);
            let inf = invariants::hyperplane_extrema(&p, ExtremumMode::Inf, s).unwrap().extremal_value;
            let sup = invariants::hyperplane_extrema(&p, ExtremumMode::Sup, s).unwrap().extremal_value;
            let k = invariants::chen_delta(&t, s).unwrap().inf_k;
            let oi = oracle::hyperplane_oracle(&p, ExtremumMode::Inf, 10_000).unwrap().value;
            let os = oracle::hyperplane_oracle(&p, ExtremumMode::Sup, 10_000).unwrap().value;
            let ok = oracle::plane_oracle(&t, 10_000).unwrap().value;
            worst[0] = worst[0].max((inf - oi).abs());
            worst[1] = worst[1].max((sup - os).abs());
            worst[2] = worst[2].max((k - ok).abs());
            count += 1;
        }
    }
    outcome(
        worst.iter().all(|w| *w <= 1e-6),
        format!("{count} scenarios (n = 3, 4): max |diff| inf C(V) {:.1e}, sup C(V) {:.1e}, inf K {:.1e}", worst[0], worst[1], worst[2]),
    )
}

fn chen_fixtures() -> Outcome {
    let d0 = invariants::chen_delta(&CurvatureTensors::new(&scenario::fixture_point("S0").unwrap()), 0).unwrap().delta;
    let d1 = invariants::chen_delta(&CurvatureTensors::new(&scenario::fixture_point("S1").unwrap()), 0).unwrap().delta;
    outcome((d0 - 20.0).abs() <= 1e-8 && (d1 - 25.0).abs() <= 1e-8, format!("delta(S0) = {d0:.12}, delta(S1) = {d1:.12}"))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_cclab")).args(args).env_remove("CCLAB_SEED").output().expect("run cclab");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_contract(dir: &Path) -> Outcome {
    let clean = dir.join("clean.json");
    let flipped = dir.join("flipped.json");
    let malformed = dir.join("malformed.json");
    let body = r#""scenarios":["S0","S1","S2"],"checks":["A1","A2","A3","A4","B1","COR","HESS","IDENTITIES"],"r_grid":[6],"samples":5,"seed":3"#;
    std::fs::write(&clean, format!("{{{body}}}")).unwrap();
    std::fs::write(&flipped, format!("{{{body},\"flip_rhs\":[\"A1\"]}}")).unwrap();
    std::fs::write(&malformed, r#"{"scenarios":[{"kind":"random","n":-1}],"checks":["A1"]"#).unwrap();
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    let (c1, _) = run_cli(&["check", "--config", &s(&clean), "--out", &s(&a), "--format", "csv"]);
    let (c2, _) = run_cli(&["check", "--config", &s(&clean), "--out", &s(&b), "--format", "csv"]);
    let same = std::fs::read(&a).ok() == std::fs::read(&b).ok() && std::fs::metadata(&a).map(|m| m.len() > 0).unwrap_or(false);
    let (j1, out1) = run_cli(&["check", "--config", &s(&clean), "--format", "json"]);
    let (_, out2) = run_cli(&["check", "--config", &s(&clean), "--format", "json"]);
    let (c3, _) = run_cli(&["check", "--config", &s(&flipped), "--out", &s(&dir.join("f.csv"))]);
    let (c4, _) = run_cli(&["check", "--config", &s(&malformed), "--out", &s(&dir.join("m.csv"))]);
    let (c5, _) = run_cli(&["check", "--config", &s(&dir.join("missing.json"))]);
    outcome(
        same && out1 == out2 && c1 == 0 && c2 == 0 && j1 == 0 && c3 == 1 && c4 == 2 && c5 == 2,
        format!("byte-identical csv {same}, json {}; exit codes clean {c1}/{c2}, flipped {c3}, malformed {c4}, missing {c5}", out1 == out2),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome, Duration, Option<Duration>)> = Vec::new();
    let mut run = |id: usize, name: &'static str, limit: Option<u64>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let mut o = f();
        let elapsed = start.elapsed();
        let limit = limit.map(Duration::from_secs);
        if let Some(l) = limit {
            if elapsed > l {
                o.pass = false;
                o.detail.push_str(&format!("; exceeded {} s limit", l.as_secs()));
            }
        }
        println!(
            "criterion {id:>2} {name:<28} {} ({:.2} s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            o.detail
        );
        results.push((id, name, o, elapsed, limit));
    };

    let start = Instant::now();
    let points = envelope(1000);
    let build = start.elapsed();
    println!("built 1000 seeded random scenarios in {:.2} s", build.as_secs_f64());
    let dir = tempfile::tempdir().expect("temp dir");

    run(1, "quaternionic structure", Some(1), &mut structure_suite);
    run(2, "curvature tensor symmetries", Some(2), &mut tensor_suite);
    run(3, "master identity", Some(10), &mut || master_identity(&points));
    run(4, "scalar curvature bound", Some(5), &mut || scalar_bound(&points));
    run(5, "Ricci bound", None, &mut || ricci_bound(&points));
    run(6, "sectional bound", None, &mut || sectional_bound(&points));
    run(7, "delta-Casorati bounds", Some(30), &mut || casorati_bounds(&points));
    run(8, "Hessian spectrum", Some(1), &mut hessian_claim);
    run(9, "optimizer vs grid oracle", Some(60), &mut optimizer_vs_oracle);
    run(10, "Chen invariant fixtures", None, &mut chen_fixtures);
    run(11, "command line contract", None, &mut || cli_contract(dir.path()));

    let failed = results.iter().filter(|r| !r.2.pass).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
