//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero if any criterion fails.
//!
//! The reference-dataset criterion runs only when `SEABREAK_REFERENCE_PANEL`
//! points at a panel CSV (`key,year,value,unit,provenance`).

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;
use seabreak::panel::io::{panel_as_sources, panel_to_csv, read_config, read_cpi, read_panel, read_sources};
use seabreak::panel::{
    allocate_directional, build_panel, calibrate_overlap, capacity_to_quantity, cpi_adjust,
    cpi_unadjust, fixed_ratio_impute, interpolate_linear, newbuilding_per_teu, scrap_per_teu,
    secondhand_calibration, secondhand_per_teu, summary_stats, tonmile_rate_to_teu, BuildConfig,
    CpiTable, Measure, Overlap, PanelRow, SeriesKey, Unit,
};
use seabreak::{
    analyze_series, break_confidence_interval, brute_force_optimal_breaks, compute_ssr_triangle,
    optimal_breaks, select_breaks, AnalysisOptions, Bandwidth, BreakReport, Heterogeneity,
    Segmenter, TimeSeries,
};

enum Verdict {
    Pass,
    Fail,
    Skip,
}

struct Outcome {
    name: &'static str,
    verdict: Verdict,
    detail: String,
}

fn outcome(name: &'static str, ok: bool, detail: String) -> Outcome {
    Outcome {
        name,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        detail,
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(1001);
    let mut mismatches = Vec::new();
    let mut done = 0;
    while done < 200 {
        let t_len = rng.gen_range(8..=20);
        let m = rng.gen_range(1..=3);
        let h = rng.gen_range(2..=3);
        if (m + 1) * h > t_len {
            continue;
        }
        let s = common::random_series(&mut rng, t_len);
        let dp = optimal_breaks(&compute_ssr_triangle(&s, h).unwrap(), m, h).unwrap();
        let bf = brute_force_optimal_breaks(&s, m, h).unwrap();
        let rel = (dp.total_ssr - bf.total_ssr).abs() / bf.total_ssr.abs().max(f64::MIN_POSITIVE);
        let ssr_ok = dp.total_ssr == bf.total_ssr || rel <= 1e-9;
        if dp.breaks != bf.breaks || !ssr_ok {
            mismatches.push(done);
        }
        done += 1;
    }
    let elapsed = start.elapsed();
    outcome(
        "oracle equivalence (200 instances, < 10 s)",
        mismatches.is_empty() && elapsed < Duration::from_secs(10),
        format!("{} mismatches, {:.3} s", mismatches.len(), elapsed.as_secs_f64()),
    )
}

fn seeded_series(rng: &mut rand_chacha::ChaCha8Rng) -> (TimeSeries, usize) {
    let t_len = rng.gen_range(8..=60);
    let h = rng.gen_range(1..=(t_len / 2).min(6));
    (common::random_series(rng, t_len), h)
}

fn ssr_monotonicity() -> Outcome {
    let mut rng = common::rng(1002);
    let (mut checked, mut failures) = (0, 0);
    for _ in 0..500 {
        let (s, h) = seeded_series(&mut rng);
        let tri = compute_ssr_triangle(&s, h).unwrap();
        let scale = tri.ssr(1, s.len()).unwrap().max(1.0);
        let mut seg = Segmenter::new(&tri, h).unwrap();
        let top = seg.max_feasible_breaks().min(6);
        let mut prev = seg.solve(0).unwrap();
        for m in 1..=top {
            let r = seg.solve(m).unwrap();
            // splitting a regime of length >= 2h cannot raise the SSR
            if prev.breaks.regimes(s.len()).iter().any(|(a, b)| b + 1 - a >= 2 * h) {
                checked += 1;
                if r.total_ssr > prev.total_ssr + 1e-9 * scale {
                    failures += 1;
                }
            }
            prev = r;
        }
    }
    outcome(
        "SSR monotonicity in m (500 series)",
        failures == 0 && checked > 0,
        format!("{checked} comparisons, {failures} violations"),
    )
}

fn affine_equivariance() -> Outcome {
    let mut rng = common::rng(1003);
    let mut failures = 0;
    for _ in 0..500 {
        let (s, h) = seeded_series(&mut rng);
        let m = rng.gen_range(1..=3).min(s.len() / h - 1);
        let a = if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.1..10.0);
        let b = rng.gen_range(-100.0..100.0);
        let t = s.map_values(|v| a * v + b);
        let r0 = optimal_breaks(&compute_ssr_triangle(&s, h).unwrap(), m, h).unwrap();
        let r1 = optimal_breaks(&compute_ssr_triangle(&t, h).unwrap(), m, h).unwrap();
        let scale = (compute_ssr_triangle(&s, h).unwrap().ssr(1, s.len()).unwrap() * a * a).max(1e-12);
        if r0.breaks != r1.breaks || (r1.total_ssr - a * a * r0.total_ssr).abs() > 1e-8 * scale {
            failures += 1;
        }
    }
    outcome(
        "affine equivariance (500 series)",
        failures == 0,
        format!("{failures} violations"),
    )
}

fn synthetic_recovery() -> Outcome {
    let mut rng = common::rng(1004);
    let mut hits = 0;
    for _ in 0..500 {
        let s = common::step_series(&mut rng, &[0.0, 5.0, 10.0], 20, 0.1);
        let (table, fit) = select_breaks(&s, 4, 6).unwrap();
        if table.chosen_m == 2 && fit.breaks.indices() == [20, 40] {
            hits += 1;
        }
    }
    outcome(
        "synthetic recovery (>= 99% of 500)",
        hits * 100 >= 99 * 500,
        format!("{hits}/500 recovered m = 2 with breaks {{20, 40}}"),
    )
}

fn interval_coverage() -> Outcome {
    let mut rng = common::rng(1005);
    let mut covered = 0;
    for _ in 0..1000 {
        let values: Vec<f64> = (0..60)
            .map(|t| {
                let e: f64 = rng.sample(StandardNormal);
                (if t < 30 { 0.0 } else { 5.0 }) + e
            })
            .collect();
        let s = TimeSeries::from_values("cov", values).unwrap();
        let fit = optimal_breaks(&compute_ssr_triangle(&s, 4).unwrap(), 1, 4).unwrap();
        let ci = break_confidence_interval(
            &s,
            &fit.breaks,
            0.95,
            Heterogeneity::default(),
            Bandwidth::Auto,
        )
        .unwrap();
        if ci[0].covers_index(30) {
            covered += 1;
        }
    }
    outcome(
        "95% interval coverage, jump/sigma = 5 (>= 90% of 1000)",
        covered * 10 >= 9 * 1000,
        format!("{covered}/1000 covered the true break"),
    )
}

fn calibration_arithmetic() -> Outcome {
    let mut failed: Vec<&str> = Vec::new();
    let mut check = |name, ok: bool| {
        if !ok {
            failed.push(name);
        }
    };
    let sol = secondhand_calibration();
    let a = 0.8 / 11.0;
    check("a", sol.conversion_rate == a);
    check("X", sol.depreciation_rate == (16.0 * a - 2.7) / 2.0);
    check("residuals", sol.residuals().iter().all(|r| r.abs() <= 1e-12));
    check("secondhand", secondhand_per_teu(16.0, &sol, 1.0).is_ok_and(|v| v > 0.0));
    check("scrap 200", scrap_per_teu(200.0) == Ok(500.0));
    check("scrap 4", scrap_per_teu(4.0) == Ok(10.0));
    check("newbuilding", newbuilding_per_teu(18.0, 1.0) == Ok(0.001));
    check(
        "newbuilding factor",
        newbuilding_per_teu(18.0, 1.5) == Ok(1.5 * newbuilding_per_teu(18.0, 1.0).unwrap()),
    );
    check("ton-mile unit", tonmile_rate_to_teu(1.0, 100.0, 1.0) == Ok(1.0));
    check("ton-mile", tonmile_rate_to_teu(0.5, 5000.0, 10.0) == Ok(250.0));
    let cpi = CpiTable::new([(1980, 50.0), (1995, 100.0)].into_iter().collect(), 1995).unwrap();
    check("cpi base", cpi_adjust(100.0, 1995, &cpi) == Ok(100.0));
    check("cpi ratio", cpi_adjust(100.0, 1980, &cpi) == Ok(200.0));
    check(
        "cpi round trip",
        (cpi_unadjust(cpi_adjust(123.4, 1980, &cpi).unwrap(), 1980, &cpi).unwrap() - 123.4).abs()
            <= 1e-12 * 123.4,
    );
    let series = |pairs: &[(i32, f64)]| pairs.iter().copied().collect::<BTreeMap<_, _>>();
    let reference = series(&[(1, 100.0), (2, 110.0), (3, 120.0)]);
    let fill = fixed_ratio_impute(&series(&[(1, 50.0)]), &reference, &[1], None).unwrap();
    check("ratio impute", fill.filled == series(&[(2, 55.0), (3, 60.0)]));
    let alloc = |e, w| {
        let a = allocate_directional(&series(&[(1, 100.0)]), &series(&[(2, e)]), &series(&[(2, w)]))
            .unwrap();
        (a[0].eastbound, a[0].westbound)
    };
    check("allocation 1:1", alloc(1.0, 1.0) == (50.0, 50.0));
    check("allocation 3:1", alloc(3.0, 1.0) == (75.0, 25.0));
    let f = calibrate_overlap(&series(&[(1, 200.0)]), &series(&[(1, 100.0)]), &Overlap::Years(vec![1]));
    check("splice factor", f.is_ok_and(|f| f.factor == 2.0));
    let filled = interpolate_linear(&series(&[(1970, 100.0), (1974, 200.0)]), None).unwrap();
    check("interpolation", filled.get(&1972) == Some(&150.0));
    check("capacity", capacity_to_quantity(1000.0, 0.8) == Ok(800.0));
    let detail = if failed.is_empty() {
        format!("a = {:.7}, X = {:.6}", sol.conversion_rate, sol.depreciation_rate)
    } else {
        format!("mismatched: {}", failed.join(", "))
    };
    outcome("calibration arithmetic", failed.is_empty(), detail)
}

fn pipeline_golden() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy");
    let build = || {
        let sources = read_sources(&dir.join("sources.csv")).unwrap();
        let cpi = read_cpi(&dir.join("cpi.csv"), 1995).unwrap();
        let config = read_config(&dir.join("config.json")).unwrap();
        build_panel(&sources, &cpi, &config).unwrap()
    };
    let golden = std::fs::read_to_string(dir.join("panel.golden.csv")).unwrap();
    let first = build();
    let second = build();
    let matches = panel_to_csv(&first.rows) == golden;
    let deterministic = panel_to_csv(&first.rows) == panel_to_csv(&second.rows)
        && first.log.to_json_pretty() == second.log.to_json_pretty();

    let series = [
        serde_json::json!({"key": "transpacific_eb", "measure": "price", "sources": [{"source": "panel_price"}]}),
        serde_json::json!({"key": "transpacific_eb", "measure": "quantity", "sources": [{"source": "panel_quantity"}]}),
    ];
    let config = BuildConfig::from_json(&serde_json::json!({ "series": series }).to_string()).unwrap();
    let cpi = read_cpi(&dir.join("cpi.csv"), 1995).unwrap();
    let again = build_panel(&panel_as_sources(&first.rows), &cpi, &config).unwrap();
    let values = |rows: &[PanelRow]| rows.iter().map(|r| (r.key, r.year, r.value, r.unit)).collect::<Vec<_>>();
    let idempotent = values(&again.rows) == values(&first.rows);
    outcome(
        "pipeline golden, idempotent, deterministic",
        matches && deterministic && idempotent,
        format!("golden {matches}, deterministic {deterministic}, idempotent {idempotent}"),
    )
}

fn performance_long_series() -> Outcome {
    let mut rng = common::rng(1006);
    let means: Vec<f64> = (0..5).map(|i| (i as f64) * 3.0).collect();
    let s = common::step_series(&mut rng, &means, 200, 1.0);
    let opts = AnalysisOptions {
        min_len: 100,
        max_m: 8,
        ..AnalysisOptions::default()
    };
    let start = Instant::now();
    let report = analyze_series(&s, &opts).unwrap();
    let elapsed = start.elapsed();
    outcome(
        "performance: T = 1000, max_m = 8, h = 100 (< 1 s)",
        elapsed < Duration::from_secs(1),
        format!("{:.1} ms, chosen m = {}", elapsed.as_secs_f64() * 1e3, report.chosen_m),
    )
}

fn performance_six_routes() -> Outcome {
    let mut rng = common::rng(1007);
    let routes: Vec<TimeSeries> = (0..6)
        .map(|r| {
            let values: Vec<f64> = (0..41)
                .map(|t| {
                    let level = if t < 12 { 3000.0 } else if t < 22 { 1800.0 } else { 1200.0 };
                    let e: f64 = rng.sample(StandardNormal);
                    level + 100.0 * r as f64 + 150.0 * e
                })
                .collect();
            TimeSeries::new(format!("route{r}"), (1968..=2008).collect(), values).unwrap()
        })
        .collect();
    let opts = AnalysisOptions::default();
    let start = Instant::now();
    let reports: Vec<BreakReport> = routes.iter().map(|s| analyze_series(s, &opts).unwrap()).collect();
    let elapsed = start.elapsed();
    outcome(
        "performance: six routes, T = 41 (< 100 ms)",
        elapsed < Duration::from_millis(100) && reports.len() == 6,
        format!("{:.2} ms total", elapsed.as_secs_f64() * 1e3),
    )
}

const ROUTE_BIC: [(SeriesKey, i64, [f64; 9], usize); 6] = [
    (SeriesKey::TransatlanticWb, 1968, [647.86, 555.88, 538.08, 538.10, 538.89, 538.95, 545.65, 552.91, 560.26], 2),
    (SeriesKey::TransatlanticEb, 1968, [685.71, 620.56, 596.29, 582.23, 581.03, 584.06, 587.28, 592.78, 598.48], 4),
    (SeriesKey::TranspacificWb, 1968, [679.59, 609.32, 592.63, 568.14, 568.96, 573.59, 579.50, 586.58, 593.87], 3),
    (SeriesKey::TranspacificEb, 1968, [714.70, 640.64, 599.18, 592.70, 592.22, 595.82, 600.01, 606.82, 614.56], 4),
    (SeriesKey::AsiaEurope, 1971, [684.17, 620.42, 593.91, 567.82, 571.46, 576.96, 584.01, 591.20, 627.68], 3),
    (SeriesKey::EuropeAsia, 1971, [631.38, 581.33, 553.76, 539.17, 545.08, 551.75, 558.62, 566.59, 588.79], 3),
];

const INDUSTRY_BIC: [(SeriesKey, [Option<f64>; 8], &[usize]); 3] = [
    (SeriesKey::Newbuilding, [Some(668.72), Some(668.35), Some(665.16), Some(661.39), Some(663.70), Some(667.99), Some(674.65), Some(694.26)], &[3]),
    (SeriesKey::Secondhand, [Some(687.91), Some(610.21), Some(609.25), Some(606.64), Some(612.79), Some(619.02), Some(625.65), None], &[3]),
    (SeriesKey::Scrap, [Some(448.16), Some(446.64), Some(440.37), Some(443.81), Some(440.36), Some(446.38), Some(452.99), Some(470.14)], &[2, 4]),
];

fn price_series(rows: &[PanelRow], key: SeriesKey, first: i64, last: i64) -> Option<TimeSeries> {
    let mut pts: Vec<(i64, f64)> = rows
        .iter()
        .filter(|r| r.key == key && r.measure() == Measure::Price)
        .filter(|r| (first..=last).contains(&i64::from(r.year)))
        .map(|r| (i64::from(r.year), r.value))
        .collect();
    pts.sort_by_key(|p| p.0);
    let (periods, values) = pts.into_iter().unzip();
    TimeSeries::new(key.as_str(), periods, values).ok()
}

fn reference_dataset() -> Outcome {
    const NAME: &str = "reference panel: summary stats, BIC argmins, U.S. intervals";
    let Some(path) = std::env::var_os("SEABREAK_REFERENCE_PANEL") else {
        return Outcome {
            name: NAME,
            verdict: Verdict::Skip,
            detail: "SEABREAK_REFERENCE_PANEL not set; dataset is not shipped".into(),
        };
    };
    let rows = match read_panel(Path::new(&path)) {
        Ok(rows) => rows,
        Err(e) => return outcome(NAME, false, e.to_string()),
    };
    let mut problems = Vec::new();

    let prices: Vec<f64> = rows
        .iter()
        .filter(|r| r.key.is_route() && r.unit == Unit::Usd1995PerTeu)
        .map(|r| r.value)
        .collect();
    match summary_stats(&prices) {
        Ok(s) => {
            let expected = [2105.35, 1250.84, 561.86, 6654.79];
            let got = [s.mean, s.sd, s.min, s.max];
            if s.n != 240 || got.iter().zip(expected).any(|(g, e)| (g - e).abs() > 0.01) {
                problems.push(format!("route price stats {s:?}"));
            }
        }
        Err(e) => problems.push(e.to_string()),
    }

    let check_bic = |report: &BreakReport, expected: &[Option<f64>], problems: &mut Vec<String>| {
        for (m, e) in expected.iter().enumerate() {
            let got = report.selection.row(m).and_then(|r| r.bic);
            match (e, got) {
                (Some(e), Some(g)) if (g - e).abs() > 2.0 => {
                    problems.push(format!("{} BIC m={m}: {g:.2} vs {e:.2}", report.series_id))
                }
                (Some(_), None) => problems.push(format!("{} BIC m={m} missing", report.series_id)),
                _ => {}
            }
        }
    };

    for (key, first, bic, argmin) in ROUTE_BIC {
        let Some(s) = price_series(&rows, key, first, 2008) else {
            problems.push(format!("{key}: no usable series"));
            continue;
        };
        match analyze_series(&s, &AnalysisOptions::default()) {
            Ok(report) => {
                if report.chosen_m != argmin {
                    problems.push(format!("{key}: chosen m {} vs {argmin}", report.chosen_m));
                }
                check_bic(&report, &bic.map(Some), &mut problems);
                if key.is_us_route()
                    && !report.intervals.iter().any(|i| i.lower_period <= 1980 && i.upper_period >= 1979)
                {
                    problems.push(format!("{key}: no interval reaching 1979-1980"));
                }
            }
            Err(e) => problems.push(format!("{key}: {e}")),
        }
    }
    for (key, bic, argmins) in INDUSTRY_BIC {
        let Some(s) = price_series(&rows, key, 1968, 1998) else {
            problems.push(format!("{key}: no usable series"));
            continue;
        };
        let opts = AnalysisOptions {
            max_m: 7,
            ..AnalysisOptions::default()
        };
        match analyze_series(&s, &opts) {
            Ok(report) => {
                if !argmins.contains(&report.chosen_m) {
                    problems.push(format!("{key}: chosen m {} vs {argmins:?}", report.chosen_m));
                }
                check_bic(&report, &bic, &mut problems);
            }
            Err(e) => problems.push(format!("{key}: {e}")),
        }
    }
    let ok = problems.is_empty();
    outcome(NAME, ok, if ok { "all checks matched".into() } else { problems.join("; ") })
}

fn main() {
    let results = [
        oracle_equivalence(),
        ssr_monotonicity(),
        affine_equivariance(),
        synthetic_recovery(),
        interval_coverage(),
        calibration_arithmetic(),
        pipeline_golden(),
        performance_long_series(),
        performance_six_routes(),
        reference_dataset(),
    ];
    let mut failed = 0;
    for r in &results {
        let tag = match r.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => {
                failed += 1;
                "FAIL"
            }
            Verdict::Skip => "SKIP",
        };
        println!("{tag} {} -- {}", r.name, r.detail);
    }
    println!("acceptance: {} criteria, {failed} failed", results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
