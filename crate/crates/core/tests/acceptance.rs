//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use wyner_mg::bounds::{
    compute_m, exact_expectation, finite_k_expectation, inner_region, outer_region, scheme1_corner,
    second_sum_closed, series_identities, slow_mg_cap, third_sum_closed, Delay, InnerKind,
    MgRegion,
};
use wyner_mg::model::{sample_activity, ActivityRealization, NetworkConfig};
use wyner_mg::montecarlo::estimate_mg;
use wyner_mg::oracle;
use wyner_mg::scheduler::{
    converse_sum_bound, realization_mg, realization_mg_with, PatternCondition, PhaseSchedule,
    Scheme, UserState,
};

const FIGURE_TOL: f64 = 0.002;
const LEGEND_TOL: f64 = 0.005;
const SERIES_REL_TOL: f64 = 1e-8;
const SERIES_TERMS: u64 = 100_000;
const EXACT_TOL: f64 = 1e-12;
const MC_K: usize = 2000;
const MC_TRIALS: u64 = 1000;
const MC_SIGMAS: f64 = 3.0;
const MC_SLACK: f64 = 0.002;
const CONVERSE_REALIZATIONS: u64 = 100_000;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            passed: true,
            detail: summary,
        }
    } else {
        Outcome {
            passed: false,
            detail: failures.join("; "),
        }
    }
}

fn fin(d: u32) -> Delay {
    Delay::Finite(d)
}

fn criterion_1() -> Outcome {
    // (rho, rho_f, D, Some(cap) if plotted, corner s_f, corner s_s)
    let cases = [
        (0.8, 0.6, 10, Some(0.7852), 0.24, 0.5434),
        (0.8, 0.6, 4, Some(0.7289), 0.24, 0.4790),
        (0.8, 0.3, 10, None, 0.12, 0.6631),
        (0.8, 0.3, 4, None, 0.12, 0.5965),
        (0.4, 0.3, 4, Some(0.3975), 0.06, 0.3348),
        (0.4, 0.3, 10, None, 0.06, 0.3400),
    ];
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (rho, rho_f, d, cap, sf, ss) in cases {
        if let Some(cap) = cap {
            let got = slow_mg_cap(rho, fin(d)).unwrap();
            worst = worst.max((got - cap).abs());
            if (got - cap).abs() > FIGURE_TOL {
                failures.push(format!("cap({rho},{d}) = {got:.4}, plotted {cap}"));
            }
        }
        let c = scheme1_corner(rho, rho_f, fin(d)).unwrap();
        let err = (c.s_f - sf).abs().max((c.s_s - ss).abs());
        worst = worst.max(err);
        if err > FIGURE_TOL {
            failures.push(format!(
                "corner({rho},{rho_f},{d}) = ({:.4},{:.4}), plotted ({sf},{ss})",
                c.s_f, c.s_s
            ));
        }
    }
    outcome(failures, format!("max abs deviation {worst:.2e}"))
}

fn criterion_2() -> Outcome {
    let cases = [
        (0.8, 0.6, 10, 1.006),
        (0.8, 0.6, 4, 1.03),
        (0.8, 0.3, 10, 1.01),
        (0.8, 0.3, 4, 1.08),
        (0.4, 0.3, 4, 1.027),
        (0.4, 0.3, 10, 1.0001),
    ];
    let mut failures = Vec::new();
    let mut values = Vec::new();
    for (rho, rho_f, d, legend) in cases {
        let m = compute_m(rho, rho_f, fin(d)).unwrap();
        values.push(format!("{m:.5}"));
        if (m - legend).abs() > LEGEND_TOL {
            failures.push(format!(
                "M({rho},{rho_f},{d}) = {m:.5}, legend {legend} (off by {:.4})",
                (m - legend).abs()
            ));
        }
    }
    outcome(failures, format!("M = [{}]", values.join(", ")))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for rho in [0.2, 0.5, 0.8, 0.9] {
        for rho_f in [0.1, 0.5, 0.9] {
            for d in [2u32, 4, 10] {
                let q = 1.0 - rho_f;
                let half = u64::from(d / 2);
                let mut checks = vec![
                    (
                        "first sum",
                        2.0 * series_identities(rho, 0).unwrap().sum_xcx,
                        2.0 * oracle::truncated_sum_xcx(rho, SERIES_TERMS),
                    ),
                    (
                        "second sum",
                        second_sum_closed(rho, rho_f, d).unwrap(),
                        oracle::truncated_second_sum(rho, rho_f, d, SERIES_TERMS),
                    ),
                    (
                        "third sum",
                        third_sum_closed(rho, rho_f, d).unwrap(),
                        oracle::truncated_third_sum(rho, rho_f, d, SERIES_TERMS),
                    ),
                    (
                        "sum x c^x",
                        series_identities(q * rho * rho, 0).unwrap().sum_xcx,
                        oracle::truncated_sum_xcx(q * rho * rho, SERIES_TERMS),
                    ),
                ];
                for c in [rho * rho, q * rho * rho] {
                    checks.push((
                        "finite geometric",
                        series_identities(c, half).unwrap().geom,
                        oracle::direct_geometric(c, half),
                    ));
                }
                for (name, closed, truncated) in checks {
                    count += 1;
                    let e = rel(closed, truncated);
                    worst = worst.max(e);
                    if e.is_nan() || e > SERIES_REL_TOL {
                        failures.push(format!("{name} at ({rho},{rho_f},{d}): rel err {e:.2e}"));
                    }
                }
            }
        }
    }
    outcome(
        failures,
        format!("{count} comparisons, max rel err {worst:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for k in [6usize, 8, 10] {
        for rho in [0.3, 0.7] {
            for rho_f in [0.4, 1.0] {
                for d in [2u32, 4] {
                    let cfg = NetworkConfig::new(k, rho, rho_f, d, 0).unwrap();
                    for scheme in [Scheme::One, Scheme::Two] {
                        count += 1;
                        let e = exact_expectation(&cfg, scheme).unwrap();
                        let a = finite_k_expectation(&cfg, scheme).unwrap();
                        let err = (e.s_f - a.s_f).abs().max((e.s_s - a.s_s).abs());
                        worst = worst.max(err);
                        if err.is_nan() || err > EXACT_TOL {
                            failures.push(format!(
                                "K={k} rho={rho} rho_f={rho_f} D={d} {scheme:?}: {err:.2e}"
                            ));
                        }
                    }
                }
            }
        }
    }
    outcome(failures, format!("{count} cases, max abs err {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (rho, rho_f, d) in [(0.8, 0.6, 4u32), (0.4, 0.3, 10)] {
        let cfg = NetworkConfig::new(MC_K, rho, rho_f, d, 0).unwrap();

        let e1 = estimate_mg(&cfg, Scheme::One, MC_TRIALS).unwrap();
        let corner = scheme1_corner(rho, rho_f, fin(d)).unwrap();
        let budget = MC_SIGMAS * e1.stderr_s.unwrap() + MC_SLACK;
        let gap = (e1.point.s_s - corner.s_s).abs();
        notes.push(format!("s1 slow gap {gap:.4}/{budget:.4}"));
        if !e1.slow_within(corner.s_s, MC_SIGMAS, MC_SLACK) {
            failures.push(format!(
                "scheme 1 slow at ({rho},{rho_f},{d}): {:.5} vs corner {:.5}, gap {gap:.5} > {budget:.5}",
                e1.point.s_s, corner.s_s
            ));
        }
        let fast = rho * rho_f / 2.0;
        if !e1.fast_within(fast, MC_SIGMAS, 0.0) {
            failures.push(format!(
                "scheme 1 fast at ({rho},{rho_f},{d}): {:.5} vs {fast:.5}",
                e1.point.s_f
            ));
        }

        let e2 = estimate_mg(&cfg, Scheme::Two, MC_TRIALS).unwrap();
        let cap = slow_mg_cap(rho, fin(d)).unwrap();
        notes.push(format!(
            "s2 slow gap {:.4}/{:.4}",
            (e2.point.s_s - cap).abs(),
            MC_SIGMAS * e2.stderr_s.unwrap() + MC_SLACK
        ));
        if !e2.slow_within(cap, MC_SIGMAS, MC_SLACK) {
            failures.push(format!(
                "scheme 2 slow at ({rho},{rho_f},{d}): {:.5} vs cap {cap:.5}",
                e2.point.s_s
            ));
        }
    }
    outcome(failures, notes.join(", "))
}

fn criterion_6() -> Outcome {
    let rhos = [0.1, 0.5, 0.8, 0.95, 1.0];
    let rho_fs = [0.0, 0.3, 0.7, 1.0];
    let ds = [2u32, 4, 6, 10];
    let ks = [1usize, 2, 7, 20, 33, 64];
    let mut realizations = 0u64;
    let mut violations = Vec::new();
    let mut seed = 0u64;
    while realizations < CONVERSE_REALIZATIONS {
        for &rho in &rhos {
            for &rho_f in &rho_fs {
                for &d in &ds {
                    for &k in &ks {
                        seed += 1;
                        let cfg = NetworkConfig::new(k, rho, rho_f, d, seed).unwrap();
                        let r = sample_activity(&cfg, 0);
                        realizations += 1;
                        let bound = converse_sum_bound(&r, d) as f64;
                        let totals = [
                            realization_mg(&r, d, Scheme::Two).unwrap().total(),
                            realization_mg(&r, d, Scheme::One).unwrap().total(),
                            realization_mg_with(&r, d, Scheme::One, PatternCondition::Prose)
                                .unwrap()
                                .total(),
                        ];
                        for t in totals {
                            if t > bound {
                                violations.push(format!("seed {seed}: {t} > {bound}"));
                            }
                        }
                    }
                }
            }
        }
    }
    let summary = format!("{realizations} realizations, 0 violations");
    violations.truncate(5);
    outcome(violations, summary)
}

fn vertices_agree(a: &MgRegion, b: &MgRegion) -> bool {
    a.vertices
        .iter()
        .zip(&b.vertices)
        .all(|(p, q)| (p.s_f - q.s_f).abs() <= EXACT_TOL && (p.s_s - q.s_s).abs() <= EXACT_TOL)
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = Vec::new();
    for rho_f in [0.05, 0.2, 0.5, 0.9, 1.0] {
        for d in [2u32, 4, 6, 10] {
            cases.push((1.0, rho_f, fin(d)));
        }
        for rho in [0.1, 0.4, 0.8, 1.0] {
            cases.push((rho, rho_f, Delay::Infinite));
        }
    }
    for (rho, rho_f, d) in cases {
        let outer = outer_region(rho, rho_f, d).unwrap();
        for kind in [InnerKind::Theorem1, InnerKind::TimeShare] {
            let inner = inner_region(rho, rho_f, d, kind).unwrap();
            if !vertices_agree(&inner, &outer) {
                failures.push(format!(
                    "{kind:?} at ({rho},{rho_f},{d}): {:?} vs {:?}",
                    inner.vertices, outer.vertices
                ));
            }
        }
    }
    for m in 1..=40usize {
        let k = 8 * m;
        let r = ActivityRealization::new(vec![true; k], vec![false; k]).unwrap();
        for scheme in [Scheme::One, Scheme::Two] {
            let slow = realization_mg(&r, 6, scheme).unwrap().slow_sum / k as f64;
            if slow != 7.0 / 8.0 {
                failures.push(format!("K={k} {scheme:?}: slow MG {slow}"));
            }
        }
    }
    outcome(
        failures,
        "regions coincide; full network at D=6 gives exactly 7/8".into(),
    )
}

fn criterion_8() -> Outcome {
    let golden_path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/golden/fig5_scheme1_phase1.json"
    );
    let golden = match std::fs::read(golden_path) {
        Ok(g) => g,
        Err(e) => return outcome(vec![format!("cannot read golden file: {e}")], String::new()),
    };
    let out = Command::new(env!("CARGO_BIN_EXE_wyner-mg"))
        .args([
            "schedule",
            "--realization",
            "builtin:fig5",
            "--d",
            "6",
            "--scheme",
            "1",
            "--phase",
            "1",
        ])
        .output()
        .expect("binary runs");
    let mut failures = Vec::new();
    if !out.status.success() {
        failures.push(format!("exit status {:?}", out.status.code()));
    }
    if out.stdout != golden {
        failures.push("output differs from golden JSON".into());
    }
    match serde_json::from_slice::<PhaseSchedule>(&out.stdout) {
        Ok(s) => {
            if s.users_in(UserState::Silenced) != [8, 20] {
                failures.push(format!("silenced {:?}", s.users_in(UserState::Silenced)));
            }
            if s.users_in(UserState::Fast) != [1, 3, 7, 11, 15] {
                failures.push(format!("fast {:?}", s.users_in(UserState::Fast)));
            }
            if !s.users_in(UserState::SlowEdge).contains(&19) {
                failures.push("user 19 is not a slow edge".into());
            }
        }
        Err(e) => failures.push(format!("output does not parse: {e}")),
    }
    outcome(failures, "byte-exact match with golden schedule".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("figure vertices", criterion_1),
        ("legend M values", criterion_2),
        ("series oracles", criterion_3),
        ("enumeration oracle", criterion_4),
        ("Monte Carlo convergence", criterion_5),
        ("converse dominance", criterion_6),
        ("exact-coincidence cases", criterion_7),
        ("golden schedule", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {} ({name}, {secs:.2}s): {}",
            i + 1,
            o.detail
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
