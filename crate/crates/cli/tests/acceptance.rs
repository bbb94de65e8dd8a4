//! Acceptance suite: runs every config in `configs/` twice with seed
//! 0x5EED, prints one line per criterion and fails if any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use linresp_cli::{run, Overrides, RunReport};

const SEED: u64 = 0x5EED;

// Pinned tolerances, independent of the per-config tolerances.
const C1_ANALYTIC_TOL: f64 = 1e-9;
const C1_MAX_SECONDS: f64 = 1.0;
const C2_RELATIVE_TOL: f64 = 1e-4;
const C2_MAX_SECONDS: f64 = 10.0;
const C3_ROUTE_TOL: f64 = 1e-9;
const C4_SIGMA_MAX: f64 = 0.9;
const C4_R2_MIN: f64 = 0.99;
const C5_TRANSFER_ORDER: f64 = 1.45;
const C5_COMPOSITION_ORDER: f64 = 1.9;
const C6_HOLDER_SLOPE: (f64, f64) = (0.4, 0.6);
const C6_LIPSCHITZ_SLOPE: f64 = 0.95;
const C7_PRESSURE_TOL: f64 = 1e-6;
const C7_OBSERVABLES: usize = 5;
const C8_SAMPLES: usize = 100;
const C8_RADIUS: f64 = 0.5;
const C8_BALL_SLACK: f64 = 1e-9;
const C8_CONTRACTION_SLACK: f64 = 0.01;
const C9_RELATIVE_TOL: f64 = 1e-3;
const C10_RELATIVE_TOL: f64 = 1e-5;
const C10_EXACT_TOL: f64 = 1e-12;
const C11_MAX_SECONDS: f64 = 120.0;

fn configs() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut v: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("reading {}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    v.sort();
    v
}

fn run_suite(out: &Path) -> BTreeMap<String, RunReport> {
    let overrides = Overrides {
        out: Some(out.to_path_buf()),
        seed: Some(SEED),
        ..Default::default()
    };
    configs()
        .into_iter()
        .map(|p| {
            let r = run(&p, &overrides).unwrap_or_else(|e| panic!("{}: {e:#}", p.display()));
            (r.name.clone(), r)
        })
        .collect()
}

fn csv_rows(report: &RunReport, table: &str) -> usize {
    let suffix = format!(".{table}.csv");
    let path = report
        .csv_files
        .iter()
        .find(|p| p.to_string_lossy().ends_with(&suffix))
        .unwrap_or_else(|| panic!("{}: no {table} table", report.name));
    csv::Reader::from_path(path).unwrap().records().count()
}

struct Suite {
    reports: BTreeMap<String, RunReport>,
}

impl Suite {
    fn get(&self, name: &str) -> &RunReport {
        &self.reports[name]
    }

    fn s(&self, name: &str, scalar: &str) -> f64 {
        self.get(name)
            .scalar(scalar)
            .unwrap_or_else(|| panic!("{name}: missing scalar {scalar}"))
    }
}

type Criterion = (bool, String);

fn c1(s: &Suite) -> Criterion {
    let r = s.get("c01_analytic_spectrum");
    let lam = (s.s("c01_analytic_spectrum", "lambda") - 1.0).abs();
    let phi = s.s("c01_analytic_spectrum", "phi_deviation_from_one");
    let ell = s.s("c01_analytic_spectrum", "ell_deviation_from_lebesgue");
    let ok = lam < C1_ANALYTIC_TOL
        && phi < C1_ANALYTIC_TOL
        && ell < C1_ANALYTIC_TOL
        && r.duration_seconds < C1_MAX_SECONDS;
    (
        ok,
        format!(
            "|lambda-1| = {lam:.2e}, max|phi-1| = {phi:.2e}, max|ell-Leb| = {ell:.2e}, {:.3} s",
            r.duration_seconds
        ),
    )
}

fn c2(s: &Suite) -> Criterion {
    let r = s.get("c02_response");
    let rel = s.s("c02_response", "relative_error");
    (
        rel < C2_RELATIVE_TOL && r.duration_seconds < C2_MAX_SECONDS && r.resolution == 128,
        format!(
            "relative C0 error {rel:.2e} at N = {}, {:.3} s",
            r.resolution, r.duration_seconds
        ),
    )
}

fn c3(s: &Suite) -> Criterion {
    let gap = s.s("c02_response", "route_gap");
    (gap < C3_ROUTE_TOL, format!("node-wise gap {gap:.2e}"))
}

fn c4(s: &Suite) -> Criterion {
    let sigma = s.s("c04_spectral_decay", "sigma_fit");
    let r2 = s.s("c04_spectral_decay", "sigma_r_squared");
    let n = csv_rows(s.get("c04_spectral_decay"), "decay");
    (
        sigma < C4_SIGMA_MAX && r2 > C4_R2_MIN && n == 30,
        format!("sigma = {sigma:.4}, R^2 = {r2:.6} over n = 1..{n}"),
    )
}

fn c5(s: &Suite) -> Criterion {
    let t = s.s("c05_taylor_transfer", "fitted_order");
    let c = s.s("c05_taylor_composition", "fitted_order");
    (
        t >= C5_TRANSFER_ORDER && c >= C5_COMPOSITION_ORDER,
        format!("normalized map order {t:.3} (>= {C5_TRANSFER_ORDER}), composition order {c:.3} (>= {C5_COMPOSITION_ORDER})"),
    )
}

fn c6(s: &Suite) -> Criterion {
    let h = s.s("c06_affine", "holder_slope");
    let l = s.s("c06_affine", "lipschitz_slope");
    (
        h >= C6_HOLDER_SLOPE.0 && h <= C6_HOLDER_SLOPE.1 && l >= C6_LIPSCHITZ_SLOPE,
        format!("Hoelder forcing slope {h:.4}, Lipschitz forcing slope {l:.4}"),
    )
}

fn c7(s: &Suite) -> Criterion {
    let e = s.s("c07_pressure", "max_relative_error");
    let n = csv_rows(s.get("c07_pressure"), "pressure");
    (
        e < C7_PRESSURE_TOL && n == C7_OBSERVABLES,
        format!("{n} observables, max relative error {e:.2e}"),
    )
}

fn c8(s: &Suite) -> Criterion {
    let ball = s.s("c08_composition", "max_ball_norm");
    let k = s.s("c08_composition", "max_contraction_ratio");
    let q = s.s("c08_composition", "max_q_norm");
    let n = csv_rows(s.get("c08_composition"), "constraints");
    let r = C8_RADIUS;
    let q_bound = (1.0 + r) / 2.0;
    let k_bound = q_bound.max((2.0 * r + r * r) / 2.0);
    (
        n == C8_SAMPLES && ball <= r + C8_BALL_SLACK && k <= k_bound + C8_CONTRACTION_SLACK && q <= q_bound + C8_BALL_SLACK,
        format!("{n} samples: max C11 norm {ball:.4} <= {r}, contraction {k:.4} <= {k_bound}, Q norm {q:.4} <= {q_bound}"),
    )
}

fn c9(s: &Suite) -> Criterion {
    let comp = s
        .get("c08_composition")
        .assertion("second-derivative")
        .map(|a| a.passed);
    let aff = s
        .get("c06_affine")
        .assertion("second-derivative")
        .map(|a| a.passed);
    let ec = s.s("c08_composition", "second_derivative_max_relative_error");
    let ea = s.s("c06_affine", "second_derivative_max_relative_error");
    (
        comp == Some(true) && aff == Some(true) && ec < C9_RELATIVE_TOL && ea < C9_RELATIVE_TOL,
        format!("composition max relative error {ec:.2e}, affine {ea:.2e}"),
    )
}

fn c10(s: &Suite) -> Criterion {
    let rel = s.s("c10_lambda_fd", "lambda_derivative_relative_error");
    let exact = s.s("c10_scaled_weight", "lambda_derivative");
    (
        rel < C10_RELATIVE_TOL && (exact - 1.0).abs() < C10_EXACT_TOL,
        format!("engine vs FD relative {rel:.2e}; scaled weight d lambda = {exact:.15}"),
    )
}

fn c11(a: &Suite, b: &Suite, seconds: f64) -> Criterion {
    let mut files = 0;
    let mut mismatched = Vec::new();
    for (name, ra) in &a.reports {
        let rb = &b.reports[name];
        for (pa, pb) in ra.csv_files.iter().zip(&rb.csv_files) {
            files += 1;
            if std::fs::read(pa).unwrap() != std::fs::read(pb).unwrap() {
                mismatched.push(pa.file_name().unwrap().to_string_lossy().into_owned());
            }
        }
    }
    (
        mismatched.is_empty() && files > 0 && seconds < C11_MAX_SECONDS,
        format!(
            "{files} CSV files compared, {} differ {mismatched:?}; two runs in {seconds:.2} s",
            mismatched.len()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let first = Suite {
        reports: run_suite(dir_a.path()),
    };
    let second = Suite {
        reports: run_suite(dir_b.path()),
    };
    let seconds = start.elapsed().as_secs_f64();

    let results: Vec<(&str, Criterion)> = vec![
        ("analytic spectrum", c1(&first)),
        ("linear response vs FD", c2(&first)),
        ("route equivalence", c3(&first)),
        ("spectral decay", c4(&first)),
        ("Taylor order", c5(&first)),
        ("Hoelder exponent forcing", c6(&first)),
        ("pressure identity", c7(&first)),
        ("composition constraint suite", c8(&first)),
        ("second derivative", c9(&first)),
        ("eigenvalue derivative", c10(&first)),
        ("suite determinism", c11(&first, &second, seconds)),
    ];
    let mut failed = 0;
    for (i, (name, (ok, detail))) in results.iter().enumerate() {
        println!(
            "criterion {:>2} {:<30} {}  {detail}",
            i + 1,
            name,
            if *ok { "PASS" } else { "FAIL" }
        );
        if !*ok {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
