//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.
//!
//! `cargo test -p persistence-core --test acceptance -- C4 C6` runs a subset.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use persistence_core::estimators::{
    check_key_identity, cycle_minimum_probability, fit_exponent, mc_cycle_tail, mc_eta_scaling, mc_persistence_grid,
    positivity_limit_check, psi_symmetry_check, scaling_report, Estimate,
};
use persistence_core::exact::{
    audit_csv_row, cycle_law_csv, enumerate_persistence, exact_bridge_persistence, exact_cycle_law, exact_persistence,
    symmetry_audit, AUDIT_HEADER, CYCLE_LAW_HEADER,
};
use persistence_core::fluctuation::{
    corollary_independence_check, halfplane_measures, sparre_andersen, BivariateIncrementSpec, PositivityMode,
    PositivitySeq,
};
use persistence_core::rational::{self, central_binomial_over_four_pow, ratio};
use persistence_core::{CrossingConvention, IncrementSpec};

const SEED: u64 = 0;
const FRESH_SEEDS: [u64; 5] = [11, 12, 13, 14, 15];
const CAP: usize = 1 << 16;

struct Check {
    pass: bool,
    detail: String,
    /// Raw numbers behind the verdict, compared across reruns.
    fingerprint: String,
}

impl Check {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check { pass, detail: detail.into(), fingerprint: String::new() }
    }

    fn failed(err: impl std::fmt::Display) -> Self {
        Check::new(false, format!("error: {err}"))
    }

    fn with(mut self, fingerprint: impl std::fmt::Debug) -> Self {
        self.fingerprint = format!("{fingerprint:?}");
        self
    }
}

/// Seed, shard count and sample divisor of a Monte Carlo run.
#[derive(Clone, Copy)]
struct Run {
    seed: u64,
    shards: usize,
    divisor: u64,
}

impl Run {
    fn samples(&self, full: u64) -> u64 {
        (full / self.divisor).max(1)
    }
}

fn laplace() -> IncrementSpec {
    IncrementSpec::laplace(1.0).unwrap()
}

fn heavy() -> IncrementSpec {
    IncrementSpec::heavy_tail(1.5, 1).unwrap()
}

fn geometric_grid(lo: u64, hi: u64) -> Vec<usize> {
    std::iter::successors(Some(lo as usize), |&n| Some(2 * n)).take_while(|&n| n as u64 <= hi).collect()
}

fn c1() -> Check {
    let specs = [
        IncrementSpec::simple(),
        IncrementSpec::lazy(ratio(1, 2)).unwrap(),
        IncrementSpec::geometric_right_continuous(),
    ];
    let mut compared = 0;
    for spec in &specs {
        for n in 1..=14 {
            match (exact_persistence(spec, n), enumerate_persistence(spec, n)) {
                (Ok(a), Ok(b)) if a == b => compared += 1,
                (Ok(a), Ok(b)) => {
                    return Check::new(
                        false,
                        format!("{} n={n}: {} != {}", spec.name(), rational::format(&a), rational::format(&b)),
                    )
                }
                (Err(e), _) | (_, Err(e)) => return Check::failed(e),
            }
        }
    }
    Check::new(true, format!("{compared} exact rational matches"))
}

fn c2() -> Check {
    let q = sparre_andersen(&PositivitySeq::constant(PositivityMode::Strict, ratio(1, 2), 50));
    match (1..=50u64).find(|&n| q[n as usize] != central_binomial_over_four_pow(n)) {
        None => Check::new(true, format!("q_n = C(2n,n)/4^n for n <= 50, q_50 = {:.6e}", rational::to_f64(&q[50]))),
        Some(n) => Check::new(false, format!("mismatch at n = {n}")),
    }
}

fn exact_slope(points: Vec<(u64, f64)>) -> persistence_core::Result<f64> {
    let pts: Vec<(u64, Estimate)> = points.into_iter().map(|(n, v)| (n, Estimate::exact(v))).collect();
    Ok(fit_exponent(&pts)?.slope)
}

fn c3() -> Check {
    let spec = IncrementSpec::simple();
    let grid = [16usize, 23, 32, 45, 64, 91, 128];
    let points: persistence_core::Result<Vec<_>> =
        grid.iter().map(|&n| Ok((n as u64, rational::to_f64(&exact_persistence(&spec, n)?)))).collect();
    match points.and_then(exact_slope) {
        Ok(s) => Check::new((s + 0.25).abs() <= 0.03, format!("slope {s:.4}, target -0.25 ± 0.03")),
        Err(e) => Check::failed(e),
    }
}

fn c4(run: Run) -> Check {
    let grid = geometric_grid(256, 8192);
    match scaling_report(&laplace(), &grid, false, run.samples(1_000_000), run.seed, run.shards, 0.03) {
        Ok(r) => {
            let slope_ok = (r.fit.slope + 0.25).abs() <= 0.03;
            let (lo, hi) = r.interval.unwrap_or((f64::NAN, f64::NAN));
            let constant = match &r.constant {
                Ok(c) => format!("constant {:.4} ± {:.4} vs [{lo:.3}, {hi:.3}]", c.value, c.stderr),
                Err(e) => e.to_string(),
            };
            Check::new(
                slope_ok && r.verdict == Some(true),
                format!("slope {:.4} (-0.25 ± 0.03), {constant}", r.fit.slope),
            )
            .with(&r.points)
        }
        Err(e) => Check::failed(e),
    }
}

fn c5() -> Check {
    let spec = IncrementSpec::simple();
    let small = (exact_bridge_persistence(&spec, 2), exact_bridge_persistence(&spec, 4));
    let small_ok = matches!(&small, (Ok(a), Ok(b)) if *a == ratio(1, 2) && *b == ratio(1, 3));
    let points: persistence_core::Result<Vec<_>> =
        (16..=128).step_by(2).map(|n| Ok((n as u64, rational::to_f64(&exact_bridge_persistence(&spec, n)?)))).collect();
    match points.and_then(exact_slope) {
        Ok(s) => Check::new(
            small_ok && (s + 0.25).abs() <= 0.05,
            format!("slope {s:.4} (-0.25 ± 0.05) over even N in [16, 128], p*_2 = 1/2 and p*_4 = 1/3: {small_ok}"),
        ),
        Err(e) => Check::failed(e),
    }
}

fn c6(run: Run) -> Check {
    let target = 2.2568;
    match mc_cycle_tail(&laplace(), &[4096], run.samples(1_000_000), CAP, run.seed, run.shards) {
        Ok(t) => {
            let p = &t.points[0];
            let near = |x: f64| (x / target - 1.0).abs() <= 0.15;
            Check::new(
                near(p.rescaled.value) && near(p.interval.0) && near(p.interval.1),
                format!(
                    "n^(1/2) P(θ >= n) = {:.4} ± {:.4}, censoring interval [{:.4}, {:.4}], target {target} ± 15%",
                    p.rescaled.value, p.rescaled.stderr, p.interval.0, p.interval.1
                ),
            )
            .with((&t.points, t.censored))
        }
        Err(e) => Check::failed(e),
    }
}

fn c7() -> Check {
    let mut checked = 0;
    for name in ["coupled-coin", "independent-coins", "five-atom"] {
        let b = BivariateIncrementSpec::builtin(name).unwrap();
        if !b.y_symmetric() {
            return Check::new(false, format!("{name} is not y-symmetric"));
        }
        for n in 1..=7 {
            match halfplane_measures(&b, n) {
                Ok(h) if h.indep1_holds() && h.indep2_holds() => checked += h.rows.len(),
                Ok(_) => return Check::new(false, format!("{name} violates an inequality at n = {n}")),
                Err(e) => return Check::failed(e),
            }
        }
    }
    Check::new(true, format!("0 violations over {checked} (law, n, x) rows"))
}

fn c8(run: Run) -> Check {
    let spec = laplace();
    let cor = corollary_independence_check(&spec, 10, run.samples(100_000) as usize, run.seed, run.shards, CAP);
    let f = cycle_minimum_probability(&spec, 5, run.samples(200_000), run.seed, run.shards, CAP);
    match (cor, f) {
        (Ok(c), Ok(f)) => {
            let target = 63.0 / 256.0;
            Check::new(
                c.ks.p_value > 0.01 && f[5].within(target, 3.0),
                format!(
                    "KS p = {:.3} (n = 10, {} accepted); P(min Ψ_k > 0, k <= 5) = {:.4} ± {:.4} vs 63/256",
                    c.ks.p_value, c.accepted, f[5].value, f[5].stderr
                ),
            )
            .with((c.ks, &f))
        }
        (Err(e), _) | (_, Err(e)) => Check::failed(e),
    }
}

fn c9(run: Run) -> Check {
    match check_key_identity(&laplace(), 512, run.samples(100_000), run.seed, run.shards, CAP) {
        Ok(k) => Check::new(
            k.z_score.abs() < 3.0,
            format!(
                "lhs {:.4} ± {:.4}, rhs {:.4} ± {:.4}, z = {:.3}",
                k.lhs.value, k.lhs.stderr, k.rhs.value, k.rhs.stderr, k.z_score
            ),
        )
        .with(&k),
        Err(e) => Check::failed(e),
    }
}

fn c10(run: Run) -> Check {
    let r = mc_eta_scaling(&laplace(), 1 << 14, run.samples(10_000), run.seed, run.shards);
    match r.reference() {
        Ok(ks) => Check::new(ks.p_value > 0.01, format!("KS p = {:.3}, D = {:.4}", ks.p_value, ks.statistic)).with(ks),
        Err(e) => Check::failed(e),
    }
}

fn c11(run: Run) -> Check {
    let spec = heavy();
    let pos = positivity_limit_check(&spec, 1000, run.samples(200_000), run.seed, run.shards);
    let grid = geometric_grid(512, 8192);
    let points = mc_persistence_grid(&spec, &grid, run.samples(200_000), run.seed, run.shards);
    let tail = mc_cycle_tail(&spec, &geometric_grid(64, 4096), run.samples(200_000), CAP, run.seed, run.shards);
    let (fit, tail) = match (fit_exponent(&points), tail) {
        (Ok(f), Ok(t)) => (f, t),
        (Err(e), _) | (_, Err(e)) => return Check::failed(e),
    };
    let Some(tail_fit) = &tail.slope else {
        return Check::new(false, "no tail slope");
    };
    let pos_ok = (pos.value - 2.0 / 3.0).abs() <= 0.02;
    let slope_ok = (fit.slope + 1.0 / 6.0).abs() <= 0.05;
    let tail_ok = (tail_fit.slope + 1.0 / 3.0).abs() <= 0.07;
    Check::new(
        pos_ok && slope_ok && tail_ok,
        format!(
            "P(S_1000 > 0) = {:.4} (2/3 ± 0.02); p_N slope {:.4} (-1/6 ± 0.05); tail slope {:.4} (-1/3 ± 0.07)",
            pos.value, fit.slope, tail_fit.slope
        ),
    )
    .with((pos, &points, &tail.points))
}

fn c12_exact(dir: &std::path::Path) -> Check {
    let spec = IncrementSpec::simple();
    let horizon = 12;
    let mut laws = format!("{CYCLE_LAW_HEADER}\n");
    let mut audit = format!("{AUDIT_HEADER}\n");
    let mut weak_up = String::new();
    for conv in CrossingConvention::ALL {
        let law = match exact_cycle_law(&spec, horizon, conv) {
            Ok(l) => l,
            Err(e) => return Check::failed(e),
        };
        if &law.residual + law.first.total() != ratio(1, 1) {
            return Check::new(false, format!("{conv}: cycle law mass does not add up"));
        }
        laws.push_str(&cycle_law_csv(&law));
        for (name, dist) in [("first", &law.first), ("hat", &law.hat)] {
            let a = symmetry_audit(dist);
            let row = audit_csv_row(conv, horizon, name, &a);
            if conv == CrossingConvention::WeakUp && name == "first" {
                weak_up = row.clone();
            }
            let _ = writeln!(audit, "{row}");
        }
    }
    let written = std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(dir.join("cycle_laws.csv"), laws))
        .and_then(|_| std::fs::write(dir.join("symmetry_audit.csv"), audit));
    match written {
        Ok(()) => Check::new(true, format!("audit CSV in {}; weak-up first law (reported): {weak_up}", dir.display())),
        Err(e) => Check::failed(e),
    }
}

fn c12_mc(run: Run) -> Check {
    match psi_symmetry_check(&laplace(), run.samples(100_000), run.seed, run.shards, CAP) {
        Ok(r) => Check::new(
            r.ks.p_value > 0.01,
            format!("ψ vs -ψ KS p = {:.3} ({} censored cycles left out)", r.ks.p_value, r.censored),
        )
        .with(r.ks),
        Err(e) => Check::failed(e),
    }
}

fn c12(run: Run, dir: &std::path::Path) -> Check {
    let (a, b) = (c12_exact(dir), c12_mc(run));
    Check { pass: a.pass && b.pass, detail: format!("{}; {}", a.detail, b.detail), fingerprint: b.fingerprint }
}

type McCheck = fn(Run) -> Check;
type Criterion = (&'static str, &'static str, Box<dyn Fn() -> Check>);

/// Monte Carlo checks with the sample divisor used for their reruns.
const MONTE_CARLO: [(&str, McCheck, u64); 7] = [
    ("C4", c4, 10),
    ("C6", c6, 10),
    ("C8", c8, 10),
    ("C9", c9, 4),
    ("C10", c10, 2),
    ("C11", c11, 4),
    ("C12", c12_mc, 2),
];

/// Reruns every Monte Carlo check with the base seed under two shard counts,
/// then under fresh seeds.
fn c13() -> Check {
    let mut notes = Vec::new();
    let mut pass = true;
    for (id, check, divisor) in MONTE_CARLO {
        let a = check(Run { seed: SEED, shards: 1, divisor });
        let b = check(Run { seed: SEED, shards: 3, divisor });
        let c = check(Run { seed: SEED, shards: 3, divisor });
        let identical = a.fingerprint == b.fingerprint && b.fingerprint == c.fingerprint && !a.fingerprint.is_empty();
        let fresh: Vec<bool> = FRESH_SEEDS.iter().map(|&seed| check(Run { seed, shards: 2, divisor }).pass).collect();
        let fresh_ok = fresh.iter().filter(|&&p| p).count();
        pass &= identical && fresh_ok == FRESH_SEEDS.len();
        notes.push(format!("{id}: identical {identical}, fresh {fresh_ok}/5 (samples / {divisor})"));
    }
    Check::new(pass, notes.join("; "))
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with('C')).collect();
    let full = Run { seed: SEED, shards: std::thread::available_parallelism().map_or(1, |n| n.get()), divisor: 1 };
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let criteria: Vec<Criterion> = vec![
        ("C1", "oracle equivalence", Box::new(c1)),
        ("C2", "Sparre-Andersen closed form", Box::new(c2)),
        ("C3", "exact persistence exponent", Box::new(c3)),
        ("C4", "Monte Carlo exponent and constant", Box::new(move || c4(full))),
        ("C5", "bridge persistence", Box::new(c5)),
        ("C6", "cycle length tail constant", Box::new(move || c6(full))),
        ("C7", "half-plane inequalities", Box::new(c7)),
        ("C8", "cycle independence", Box::new(move || c8(full))),
        ("C9", "cycle minimum identity", Box::new(move || c9(full))),
        ("C10", "cycle count scaling", Box::new(move || c10(full))),
        ("C11", "heavy-tailed increments", Box::new(move || c11(full))),
        ("C12", "cycle law symmetry", Box::new(move || c12(full, &dir))),
        ("C13", "determinism", Box::new(c13)),
    ];
    let mut failures = 0;
    for (id, name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let start = Instant::now();
        let c = check();
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!("{id:<4} {verdict} {name} [{:.1}s]: {}", start.elapsed().as_secs_f64(), c.detail);
        failures += usize::from(!c.pass);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
