//! Acceptance criteria, one line per criterion.
//!
//! Criteria 1 and 2 need the TSPLIB files `eil76.tsp` and `pr1002.tsp`. They
//! are looked up in `$HICLUST_DATA_DIR` and then in `crates/core/data`. When a
//! file is missing the criterion is reported as FAIL with the reason
//! `unavailable`; such lines do not change the exit status, every other FAIL
//! does.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use hiclust::continuation::{solve, ModelKind, Schedule, SolveOptions, SolveReport};
use hiclust::dataio::{emit_report, read_points};
use hiclust::init::{best_index, multistart, radial_search, StartSpec};
use hiclust::model_two::ModelTwo;
use hiclust::postprocess::discrete_optimum;
use hiclust::selfcheck::{self, random_instance, random_matrix, CheckOptions, SuiteReport};
use hiclust::{DataSet, Matrix};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EIL76_COST: f64 = 1099.36;
const EIL76_REL_TOL: f64 = 0.01;
const EIL76_TIME: Duration = Duration::from_secs(60);
const PR1002_COST: f64 = 1.63399e6;
const PR1002_REL_TOL: f64 = 0.015;
const PR1002_TIME: Duration = Duration::from_secs(600);
const DS18_MIN_HITS: usize = 8;
const SEEDS: u64 = 10;
const GRADIENT_TOL: f64 = 1e-6;
const CONJUGATE_TOL: f64 = 1e-8;
const SUBGRADIENT_SLACK: f64 = 1e-9;
const SANDWICH_SLACK: f64 = 1e-12;
const DESCENT_SLACK: f64 = 1e-9;
const SAMPLES: usize = 100;

enum Status {
    Pass,
    Fail,
    Unavailable,
}

struct Ledger {
    failed: usize,
    unavailable: usize,
}

impl Ledger {
    fn line(&mut self, id: u32, title: &str, status: Status, detail: String) {
        let tag = match status {
            Status::Pass => "PASS",
            Status::Fail => {
                self.failed += 1;
                "FAIL"
            }
            Status::Unavailable => {
                self.unavailable += 1;
                "FAIL [unavailable]"
            }
        };
        println!("{tag:<18} {id}. {title}: {detail}");
    }

    fn check(&mut self, id: u32, title: &str, ok: bool, detail: String) {
        self.line(id, title, if ok { Status::Pass } else { Status::Fail }, detail);
    }
}

fn dataset(file: &str) -> Result<DataSet, String> {
    let mut dirs = Vec::new();
    if let Some(dir) = std::env::var_os("HICLUST_DATA_DIR") {
        dirs.push(PathBuf::from(dir));
    }
    dirs.push(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    for dir in &dirs {
        let path = dir.join(file);
        if path.exists() {
            return read_points(&path).map(|f| f.points).map_err(|e| format!("{}: {e}", path.display()));
        }
    }
    let searched: Vec<String> = dirs.iter().map(|d| d.display().to_string()).collect();
    Err(format!("{file} not found in {}", searched.join(", ")))
}

fn eil76_schedule() -> Schedule {
    Schedule::direct(1e-6, 1.0, 100.0, 0.5, 27, 20).unwrap()
}

/// σ₁ = 7500 read as the overall ratio λ_max/λ₀ over 11 outer steps of 30 inner
/// steps each (330 in total).
fn pr1002_schedule() -> Schedule {
    Schedule::from_targets(1e-6, 7500.0 * 1e-6, 1950.0, 1950.0 * 0.5f64.powi(11), 11, 30).unwrap()
}

fn ds18_schedule() -> Schedule {
    eil76_schedule()
}

/// Every run made by the regression criteria, for the descent and
/// determinism checks.
#[derive(Default)]
struct Runs {
    reports: Vec<(String, SolveReport)>,
    sources: Vec<&'static str>,
}

fn best_cost(reports: &[SolveReport]) -> f64 {
    best_index(reports.iter().map(Some)).map_or(f64::INFINITY, |i| reports[i].snapped.cost)
}

fn eil76(ledger: &mut Ledger, runs: &mut Runs) {
    const TITLE: &str = "EIL76 regression, k=3, 10 seeds per model";
    let data = match dataset("eil76.tsp") {
        Ok(d) => d,
        Err(e) => return ledger.line(1, TITLE, Status::Unavailable, e),
    };
    let seeds: Vec<u64> = (0..SEEDS).collect();
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut ok = true;
    for model in [ModelKind::One, ModelKind::Two] {
        let reports: Vec<SolveReport> = match multistart(&data, model, 3, &eil76_schedule(), &seeds, None, &SolveOptions::default())
            .into_iter()
            .collect()
        {
            Ok(r) => r,
            Err(e) => return ledger.check(1, TITLE, false, format!("model {model}: {e}")),
        };
        let best = best_cost(&reports);
        let rel = (best - EIL76_COST).abs() / EIL76_COST;
        ok &= rel <= EIL76_REL_TOL;
        detail.push(format!("model {model} best {best:.2} ({:+.2}%)", 100.0 * (best / EIL76_COST - 1.0)));
        runs.reports.extend(reports.into_iter().map(|r| (format!("eil76/{model}/{}", r.seed.unwrap_or(0)), r)));
    }
    let elapsed = start.elapsed();
    ok &= elapsed <= EIL76_TIME;
    runs.sources.push("EIL76");
    ledger.check(
        1,
        TITLE,
        ok,
        format!(
            "{}; target {EIL76_COST} within {}%; {:.1}s (limit {}s)",
            detail.join(", "),
            100.0 * EIL76_REL_TOL,
            elapsed.as_secs_f64(),
            EIL76_TIME.as_secs()
        ),
    );
}

fn pr1002(ledger: &mut Ledger, runs: &mut Runs) {
    const TITLE: &str = "PR1002 regression, k=6, radial search with 10 probes";
    let data = match dataset("pr1002.tsp") {
        Ok(d) => d,
        Err(e) => return ledger.line(2, TITLE, Status::Unavailable, e),
    };
    let spec = StartSpec::with_seed(0);
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut ok = true;
    for model in [ModelKind::One, ModelKind::Two] {
        let search = match radial_search(&data, model, 6, &pr1002_schedule(), &spec, &SolveOptions::default()) {
            Ok(s) => s,
            Err(e) => return ledger.check(2, TITLE, false, format!("model {model}: {e}")),
        };
        let best = search.best_report().map_or(f64::INFINITY, |r| r.snapped.cost);
        ok &= (best - PR1002_COST).abs() / PR1002_COST <= PR1002_REL_TOL;
        detail.push(format!("model {model} best {best:.6e} ({:+.2}%)", 100.0 * (best / PR1002_COST - 1.0)));
        for (i, probe) in search.probes.into_iter().enumerate() {
            match probe.outcome {
                Ok(r) => runs.reports.push((format!("pr1002/{model}/probe{i}"), r)),
                Err(e) => detail.push(format!("model {model} probe {i} failed: {e}")),
            }
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed <= PR1002_TIME;
    runs.sources.push("PR1002");
    ledger.check(
        2,
        TITLE,
        ok,
        format!(
            "{}; target {PR1002_COST:e} within {}%; {:.1}s (limit {}s)",
            detail.join(", "),
            100.0 * PR1002_REL_TOL,
            elapsed.as_secs_f64(),
            PR1002_TIME.as_secs()
        ),
    );
}

fn ds18(ledger: &mut Ledger, runs: &mut Runs) {
    const TITLE: &str = "18-node stand-in (not the published set), k=2, snapped = enumeration optimum";
    let data = match dataset("ds18_standin.tsp") {
        Ok(d) => d,
        Err(e) => return ledger.check(3, TITLE, false, e),
    };
    let optimum = discrete_optimum(&data, 2).unwrap().cost;
    let seeds: Vec<u64> = (0..SEEDS).collect();
    let mut detail = Vec::new();
    let mut ok = true;
    for model in [ModelKind::One, ModelKind::Two] {
        let results = multistart(&data, model, 2, &ds18_schedule(), &seeds, None, &SolveOptions::default());
        let mut hits = 0;
        for r in results {
            match r {
                Ok(r) => {
                    if (r.snapped.cost - optimum).abs() <= 1e-9 * optimum {
                        hits += 1;
                    }
                    runs.reports.push((format!("ds18/{model}/{}", r.seed.unwrap_or(0)), r));
                }
                Err(e) => detail.push(format!("model {model}: {e}")),
            }
        }
        ok &= hits >= DS18_MIN_HITS;
        detail.push(format!("model {model} {hits}/{SEEDS} seeds"));
    }
    runs.sources.push("stand-in");
    ledger.check(3, TITLE, ok, format!("optimum {optimum:.4}; {} (need {DS18_MIN_HITS})", detail.join(", ")));
}

fn suite_line(ledger: &mut Ledger, id: u32, title: &str, suites: &[SuiteReport], tol: f64) {
    let ok = suites.iter().all(|s| s.passed() && s.tolerance <= tol);
    let detail: Vec<String> = suites.iter().map(|s| s.to_string()).collect();
    ledger.check(id, title, ok, detail.join(" | "));
}

/// `[c₁I + T] X = R` assembled densely and solved by LU.
fn model_two_dense_solve(p: &ModelTwo, y: &Matrix) -> Matrix {
    let (k, n) = (p.k(), y.cols());
    let c1 = p.c1();
    let mut system = DMatrix::<f64>::identity(k + 1, k + 1) * c1;
    for l in 0..k {
        system[(l, k)] -= 1.0;
        system[(k, l)] -= 1.0;
    }
    system[(k, k)] += (k as f64) - 1.0;
    let sums = p.data().column_sums();
    let rhs = DMatrix::<f64>::from_fn(k + 1, n, |r, c| (1.0 + p.lambda()) * sums[c] + p.mu() * y[(r, c)]);
    let x = system.lu().solve(&rhs).expect("c₁I + T is nonsingular");
    Matrix::from_vec(k + 1, n, (0..k + 1).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| x[(r, c)]).collect())
        .unwrap()
}

fn dense_solve_error(samples: usize) -> (usize, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6465_6e73);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let inst = random_instance(&mut rng);
        let p = ModelTwo::new(&inst.data, inst.k, inst.lambda, inst.mu).unwrap();
        let y = random_matrix(&mut rng, inst.k + 1, inst.data.cols(), 50.0);
        let closed = p.grad_g_conj(&y).unwrap();
        let dense = model_two_dense_solve(&p, &y);
        let err = closed.distance(&dense) / (1.0 + dense.frobenius_norm());
        worst = if err.is_nan() { f64::NAN } else { worst.max(err) };
    }
    (samples, worst)
}

fn descent(ledger: &mut Ledger, runs: &Runs, missing: &[&str]) {
    let mut traces = 0;
    let mut worst = 0.0f64;
    let mut offender = None;
    for (name, report) in &runs.reports {
        for (outer, objectives) in report.inner_objectives.iter().enumerate() {
            traces += 1;
            let f0 = objectives.first().copied().unwrap_or(0.0);
            let rise = objectives.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max) / (1.0 + f0.abs());
            if rise.is_nan() || rise > worst {
                worst = rise;
                if (rise.is_nan() || rise > DESCENT_SLACK) && offender.is_none() {
                    offender = Some(format!("{name} outer {outer}"));
                }
            }
        }
    }
    let mut detail = format!(
        "{} runs from {}, {traces} inner traces, worst relative rise {worst:.2e} (slack {DESCENT_SLACK:e})",
        runs.reports.len(),
        runs.sources.join(", ")
    );
    if !missing.is_empty() {
        detail += &format!("; no runs for {}", missing.join(", "));
    }
    if let Some(o) = offender {
        detail += &format!("; first offender {o}");
    }
    ledger.check(8, "inner DCA traces non-increasing", traces > 0 && worst <= DESCENT_SLACK, detail);
}

/// Re-solves a run from its seed and compares the emitted reports byte for byte.
fn rerun(data: &DataSet, model: ModelKind, k: usize, schedule: &Schedule, seed: u64) -> String {
    let r = multistart(data, model, k, schedule, &[seed], None, &SolveOptions::default())
        .pop()
        .unwrap()
        .unwrap();
    emit_report(&r, None)
}

fn determinism(ledger: &mut Ledger, missing: &[&str]) {
    let mut compared = 0;
    let mut differing = Vec::new();
    let mut cases: Vec<(&str, DataSet, usize, Schedule)> = Vec::new();
    if let Ok(d) = dataset("ds18_standin.tsp") {
        cases.push(("stand-in", d, 2, ds18_schedule()));
    }
    if let Ok(d) = dataset("eil76.tsp") {
        cases.push(("EIL76", d, 3, eil76_schedule()));
    }
    for (name, data, k, schedule) in &cases {
        for model in [ModelKind::One, ModelKind::Two] {
            for seed in 0..SEEDS {
                compared += 1;
                if rerun(data, model, *k, schedule, seed) != rerun(data, model, *k, schedule, seed) {
                    differing.push(format!("{name}/{model}/{seed}"));
                }
            }
        }
    }
    if let Ok(d) = dataset("pr1002.tsp") {
        let spec = StartSpec::with_seed(0);
        let x0 = hiclust::init::radial_starts(&d, ModelKind::One.rows(6), &spec).unwrap();
        for (mult, start) in x0.iter().take(2) {
            compared += 1;
            let once = || emit_report(&solve(&d, ModelKind::One, 6, &pr1002_schedule(), start, &SolveOptions::default()).unwrap(), None);
            if once() != once() {
                differing.push(format!("PR1002/I/x{mult}"));
            }
        }
    }
    let mut detail = format!("{compared} report pairs compared, {} differ", differing.len());
    if !missing.is_empty() {
        detail += &format!("; no reruns for {}", missing.join(", "));
    }
    if let Some(first) = differing.first() {
        detail += &format!("; first {first}");
    }
    ledger.check(9, "identical reruns give byte-identical reports", compared > 0 && differing.is_empty(), detail);
}

fn main() {
    let mut ledger = Ledger { failed: 0, unavailable: 0 };
    let mut runs = Runs::default();
    eil76(&mut ledger, &mut runs);
    pr1002(&mut ledger, &mut runs);
    ds18(&mut ledger, &mut runs);

    let opts = CheckOptions {
        seed: 2024,
        samples: SAMPLES,
        fault: None,
    };
    suite_line(&mut ledger, 4, "gradients vs central differences", &[selfcheck::gradient_suite(&opts)], GRADIENT_TOL);

    let conj = selfcheck::conjugate_suite(&opts);
    let (cases, dense_worst) = dense_solve_error(SAMPLES);
    ledger.check(
        5,
        "conjugate round trip and dense solve",
        conj.passed() && conj.tolerance <= CONJUGATE_TOL && dense_worst <= CONJUGATE_TOL,
        format!("{conj} | dense solve {cases} cases, worst {dense_worst:.3e} (tol {CONJUGATE_TOL:e})"),
    );

    suite_line(&mut ledger, 6, "subgradient inequalities", &[selfcheck::subgradient_suite(&opts)], SUBGRADIENT_SLACK);

    let sandwich = selfcheck::sandwich_suite(&opts);
    let gap = selfcheck::gap_suite(&opts);
    let ok = sandwich.passed() && sandwich.cases >= 10 * SAMPLES && sandwich.tolerance <= SANDWICH_SLACK && gap.passed();
    ledger.check(7, "smoothing sandwich and objective gap bound", ok, format!("{sandwich} | {gap}"));

    let missing: Vec<&str> = [("EIL76", "eil76.tsp"), ("PR1002", "pr1002.tsp")]
        .into_iter()
        .filter(|(_, f)| dataset(f).is_err())
        .map(|(n, _)| n)
        .collect();
    descent(&mut ledger, &runs, &missing);
    determinism(&mut ledger, &missing);

    println!(
        "{} failed, {} unavailable (unavailable criteria do not affect the exit status)",
        ledger.failed, ledger.unavailable
    );
    if ledger.failed > 0 {
        std::process::exit(1);
    }
}
