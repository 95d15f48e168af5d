//! Acceptance criteria 1 to 13, each at its pinned tolerance and with the
//! harness defaults. Prints one line per criterion and exits non-zero if
//! any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use twistor_core::verify::{emit_report, run_suite, ClaimReport, Format, Status, Suite, SuiteConfig, Value};

fn run(suite: Suite) -> (Vec<ClaimReport>, Duration) {
    let cfg = SuiteConfig {
        suite,
        ..SuiteConfig::default()
    };
    let start = Instant::now();
    let reports = run_suite(&cfg).expect("default configuration is valid");
    (reports, start.elapsed())
}

fn claims<'a>(reports: &'a [ClaimReport], id: &str) -> Vec<&'a ClaimReport> {
    reports.iter().filter(|r| r.claim_id == id).collect()
}

fn pq(r: &ClaimReport) -> String {
    let get = |k: &str| match r.param(k) {
        Some(Value::Int(i)) => i.to_string(),
        Some(Value::Text(s)) => s.clone(),
        _ => "?".into(),
    };
    if r.param("sphere").is_some() {
        get("sphere")
    } else if r.param("k").is_some() {
        format!("so({},{})", get("k"), get("l"))
    } else {
        format!("({},{})", get("p"), get("q"))
    }
}

/// `(ok, worst residual, where it failed)` over a set of claims.
fn summary(rs: &[&ClaimReport]) -> (bool, f64, Vec<String>) {
    let ok = !rs.is_empty() && rs.iter().all(|r| r.status == Status::Pass);
    let worst = rs
        .iter()
        .map(|r| r.max_residual)
        .fold(0.0, |m: f64, x| if x.is_nan() { f64::NAN } else { m.max(x) });
    let failed = rs.iter().filter(|r| r.status != Status::Pass).map(|r| pq(r)).collect();
    (ok, worst, failed)
}

struct Line {
    ok: bool,
    text: String,
}

fn line(ok: bool, text: String) -> Line {
    Line { ok, text }
}

fn c1() -> Line {
    let (r, t) = run(Suite::Killing);
    let (ok, worst, failed) = summary(&claims(&r, "killing"));
    let fast = t < Duration::from_secs(5);
    line(
        ok && fast && r.len() == 4,
        format!("Killing constant: max |B_ad - (k+l-2)Tr| = {worst:.2e} (tol 1e-9) over so(2,1),so(3,1),so(2,2),so(4,0) in {:.2}s; failed {failed:?}", t.as_secs_f64()),
    )
}

fn c2() -> Line {
    let (r, _) = run(Suite::Index);
    let rs = claims(&r, "index");
    let (ok, _, failed) = summary(&rs);
    let detail: Vec<String> = rs
        .iter()
        .map(|x| {
            format!(
                "{}:{}/{}",
                pq(x),
                x.extra_real("computed").unwrap_or(f64::NAN),
                x.extra_real("formula").unwrap_or(f64::NAN)
            )
        })
        .collect();
    line(
        ok && rs.len() == 12,
        format!(
            "index formula q^2-q+2pq: computed/formula {}; mismatches at {failed:?}",
            detail.join(" ")
        ),
    )
}

fn c3() -> Line {
    let (r, _) = run(Suite::Metric14);
    let (ok_a, wa, fa) = summary(&claims(&r, "metric14.identity"));
    let (ok_b, wb, fb) = summary(&claims(&r, "metric14.basis"));
    line(
        ok_a && ok_b,
        format!(
            "metric identity: max residual {wa:.2e}, basis check {wb:.2e} (tol 1e-9); failed {:?}",
            [fa, fb].concat()
        ),
    )
}

fn c4() -> Line {
    let (s, _) = run(Suite::Spectrum);
    let (i, _) = run(Suite::Integrability);
    let spec = claims(&s, "spectrum");
    let dims_ok = [2, 3].iter().all(|&n| {
        spec.iter().any(|r| matches!((r.param("p"), r.param("q")), (Some(Value::Int(p)), Some(Value::Int(q))) if (p + q) as usize == n))
    });
    let (ok_s, ws, fs) = summary(&spec);
    let (ok_f, wf, ff) = summary(&claims(&i, "integrability.four_i"));
    let (ok_c, wc, fc) = summary(&claims(&i, "integrability.condition"));
    let trials_ok = claims(&i, "integrability.four_i").iter().all(|r| r.trials >= 100);
    line(
        ok_s && ok_f && ok_c && dims_ok && trials_ok,
        format!(
            "spectrum: eigenvalue distance {ws:.2e} (tol 1e-7, dims 4 and 6); 4i-component {wf:.2e}, integrability {wc:.2e} (tol 1e-9); failed {:?}",
            [fs, ff, fc].concat()
        ),
    )
}

fn c5() -> Line {
    let (r, _) = run(Suite::Weyl);
    let rs = claims(&r, "weyl");
    let (ok, worst, failed) = summary(&rs);
    line(
        ok && rs.len() == 6,
        format!(
            "Weyl of constant curvature: {worst:.2e} (tol 1e-9) over {} signatures; failed {failed:?}",
            rs.len()
        ),
    )
}

fn c6() -> Line {
    let (r, _) = run(Suite::Conformal);
    let (ok, worst, failed) = summary(&claims(&r, "conformal"));
    line(
        ok,
        format!("conformal invariance: max |j+A_(j-Y)j-| = {worst:.2e} (tol 1e-12); failed {failed:?}"),
    )
}

fn c7() -> Line {
    let (r, _) = run(Suite::SphereCurvature);
    let fd = claims(&r, "sphere_curvature");
    let conv = claims(&r, "sphere_curvature.convergence");
    let (ok_a, wa, fa) = summary(&fd);
    let (ok_b, _, fb) = summary(&conv);
    let ratio = conv
        .iter()
        .filter_map(|c| c.extra_real("observed"))
        .fold(f64::INFINITY, f64::min);
    line(
        ok_a && ok_b && fd.len() == 5,
        format!("embedded curvature: max residual {wa:.2e} at h=1e-3, min reduction {ratio:.3}x at h=5e-4 (need 3.5x); failed {:?}", [fa, fb].concat()),
    )
}

fn c8() -> Line {
    let (r, _) = run(Suite::DomegaThreeway);
    let (ok_a, wa, fa) = summary(&claims(&r, "domega_threeway"));
    let (ok_b, wb, fb) = summary(&claims(&r, "domega_threeway.c_star_stability"));
    let info = claims(&r, "domega_threeway.c_star");
    let info_ok = info.len() == 2
        && info
            .iter()
            .all(|c| c.status == Status::Info && c.extra_real("residual_at_nominal_c").is_some());
    let cs: Vec<String> = info
        .iter()
        .map(|c| format!("{}:c*={:.6}", pq(c), c.extra_real("c_star").unwrap_or(f64::NAN)))
        .collect();
    line(
        ok_a && ok_b && info_ok,
        format!("three-way d(omega): |fd - nabla form| {wa:.2e} (tol 5e-4); c* CV {wb:.1e} (tol 1e-2); {} vs nominal 1/8 (info); failed {:?}", cs.join(" "), [fa, fb].concat()),
    )
}

fn c9() -> Line {
    let (b, _) = run(Suite::DomegaBundle);
    let (t, _) = run(Suite::Tstar);
    let (ok_a, wa, fa) = summary(&claims(&b, "domega_bundle.hhv"));
    let (ok_b, wb, fb) = summary(&claims(&b, "domega_bundle.other_patterns"));
    let (ok_c, wc, fc) = summary(&claims(&t, "tstar.solve"));
    let info = claims(&t, "tstar");
    let info_ok = !info.is_empty()
        && info
            .iter()
            .all(|c| c.status == Status::Info && c.extra_real("residual_at_n_over_nm1").is_some());
    let ts: Vec<String> = info
        .iter()
        .map(|c| {
            format!(
                "{}:t*={:.6} n/(n-1)={:.3}",
                pq(c),
                c.extra_real("t_star").unwrap_or(f64::NAN),
                c.extra_real("n_over_nm1").unwrap_or(f64::NAN)
            )
        })
        .collect();
    line(
        ok_a && ok_b && ok_c && info_ok,
        format!(
            "bundle d(Omega): cyclic vs closed {wa:.2e}, other patterns {wb:.2e}, residual at t* {wc:.2e}; {} (info); failed {:?}",
            ts.join(" "),
            [fa, fb, fc].concat()
        ),
    )
}

fn c10() -> Line {
    let (r, _) = run(Suite::DvarpiType);
    let (ok_a, wa, fa) = summary(&claims(&r, "dvarpi_type.pure"));
    let mixed = claims(&r, "dvarpi_type.mixed");
    let (ok_b, _, fb) = summary(&mixed);
    let (ok_c, wc, fc) = summary(&claims(&r, "dvarpi_type.identity"));
    let low = mixed
        .iter()
        .filter_map(|c| c.extra_real("observed"))
        .fold(f64::INFINITY, f64::min);
    line(
        ok_a && ok_b && ok_c,
        format!("d(varpi) type: (3,0)+(0,3) {wa:.2e} (tol 1e-9), min (2,1)+(1,2) {low:.2e} (need 1e-3), identity {wc:.2e}; failed {:?}", [fa, fb, fc].concat()),
    )
}

fn c11() -> Line {
    let (r, _) = run(Suite::SigmaHolo);
    let rs = claims(&r, "sigma_holo");
    let (ok, worst, failed) = summary(&rs);
    line(
        ok && rs.iter().all(|c| c.trials >= 100),
        format!("isometries holomorphic: Cauchy-Riemann residual {worst:.2e} (tol 1e-12); failed {failed:?}"),
    )
}

fn c12() -> Line {
    let (r, _) = run(Suite::S64NearlyKahler);
    let ids = [
        "s64.quaternion_norm",
        "s64.j6",
        "s64.tangent_signature",
        "s64.nearly_kahler",
        "s64.polarized",
        "s64.nijenhuis",
    ];
    let mut ok = true;
    let mut failed = Vec::new();
    let mut parts = Vec::new();
    for id in ids {
        let (o, w, f) = summary(&claims(&r, id));
        ok &= o;
        failed.extend(f.into_iter().map(|x| format!("{id}@{x}")));
        parts.push(format!("{}={w:.1e}", id.trim_start_matches("s64.")));
    }
    let split_nk = claims(&r, "s64.nearly_kahler").into_iter().find(|c| pq(c) == "S6_4");
    let both = split_nk.is_some_and(|c| {
        c.extra_real("timelike_u").unwrap_or(0.0) > 0.0 && c.extra_real("spacelike_u").unwrap_or(0.0) > 0.0
    });
    let nij = claims(&r, "s64.nijenhuis")
        .iter()
        .filter_map(|c| c.extra_real("observed"))
        .fold(0.0, f64::max);
    let swapped = claims(&r, "s64.j6_swapped_doubling");
    let swapped_worst = swapped.iter().map(|c| c.max_residual).fold(0.0, f64::max);
    let swapped_status = if swapped.iter().all(|c| c.status == Status::Pass) {
        "passes"
    } else {
        "fails"
    };
    line(
        ok && both,
        format!(
            "S6_4: {} (shortfalls), max |N| {nij:.2e} (need 0.05), both causal types {both}; swapped-conjugate doubling {swapped_status} J6 invariants (residual {swapped_worst:.2e}); failed {failed:?}",
            parts.join(" ")
        ),
    )
}

fn c13() -> Line {
    let cfg = SuiteConfig::default();
    let mut outs = Vec::new();
    let mut times = Vec::new();
    for _ in 0..2 {
        let start = Instant::now();
        let reports = run_suite(&cfg).expect("default configuration is valid");
        outs.push(emit_report(&cfg, &reports, Format::Json));
        times.push(start.elapsed());
    }
    let same = outs[0] == outs[1];
    let fast = times.iter().all(|t| *t < Duration::from_secs(120));
    line(
        same && fast,
        format!(
            "full suite: {:.1}s and {:.1}s (limit 120s), byte-identical JSON {same} ({} bytes)",
            times[0].as_secs_f64(),
            times[1].as_secs_f64(),
            outs[0].len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [fn() -> Line; 13] = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13];
    let mut failures = 0;
    for (k, c) in criteria.iter().enumerate() {
        let l = c();
        if !l.ok {
            failures += 1;
        }
        println!(
            "criterion {:>2}: {}  {}",
            k + 1,
            if l.ok { "PASS" } else { "FAIL" },
            l.text
        );
    }
    println!("acceptance: {} of 13 criteria pass", 13 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
