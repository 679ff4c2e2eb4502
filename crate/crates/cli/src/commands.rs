use std::fmt::Write as _;

use persistence_core::estimators::{self, estimate_csv_row, Estimate, ESTIMATE_HEADER, FIT_HEADER};
use persistence_core::exact::{self, CSV_HEADER};
use persistence_core::fluctuation::{
    self, BivariateIncrementSpec, PositivityMode, PositivitySeq, HALFPLANE_HEADER, POSITIVITY_HEADER, SERIES_HEADER,
};
use persistence_core::rational::{self, ratio, Rational};
use persistence_core::{CrossingConvention, IncrementSpec};

use crate::config::Config;
use crate::Failure;

/// Result of one subcommand.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub csv: String,
    /// Human-readable lines for standard error.
    pub notes: Vec<String>,
    /// Failed checks; fatal unless assertions are off.
    pub failed: Vec<String>,
}

impl Outcome {
    fn same(csv: String) -> Self {
        Outcome { stdout: csv.clone(), csv, ..Default::default() }
    }
}

pub fn dispatch(cfg: &Config) -> Result<Outcome, Failure> {
    match cfg.command.as_str() {
        "exact-p" => exact_p(cfg),
        "exact-bridge" => exact_bridge(cfg),
        "enumerate" => enumerate(cfg),
        "cycle-law" => cycle_law(cfg),
        "symmetry-audit" => symmetry_audit(cfg),
        "spitzer" => spitzer(cfg),
        "series-diagnostic" => series_diagnostic(cfg),
        "prop2" => prop2(cfg),
        "corollary-check" => corollary_check(cfg),
        "mc-p" => mc_p(cfg),
        "mc-cycle-tail" => mc_cycle_tail(cfg),
        "eta-scaling" => eta_scaling(cfg),
        "key-identity" => key_identity(cfg),
        "positivity-limit" => positivity_limit(cfg),
        "fit-exponent" => fit_exponent(cfg),
        "estimate-constant" => estimate_constant(cfg),
        "scaling-report" => scaling_report(cfg),
        other => Err(Failure::config(format!("unknown command {other:?}"))),
    }
}

const DEFAULT_SAMPLES: u64 = 100_000;

fn samples(cfg: &Config) -> Result<u64, Failure> {
    let s = cfg.u64_or("samples", DEFAULT_SAMPLES)?;
    if s == 0 {
        return Err(Failure::config("samples must be positive"));
    }
    Ok(s)
}

fn cap(cfg: &Config) -> Result<usize, Failure> {
    Ok(cfg.u64_or("cap", estimators::DEFAULT_CYCLE_CAP as u64)?.max(1) as usize)
}

fn n_or(cfg: &Config, default: usize) -> Result<usize, Failure> {
    Ok(cfg.u64_or("n", default as u64)? as usize)
}

/// Value lines for a grid: the bare value for one point, `n,value` otherwise.
fn value_lines(values: &[(usize, String)]) -> String {
    match values {
        [(_, v)] => format!("{v}\n"),
        _ => values.iter().map(|(n, v)| format!("{n},{v}\n")).collect(),
    }
}

fn exact_values(
    cfg: &Config,
    quantity: &str,
    eval: impl Fn(&IncrementSpec, usize) -> Result<Rational, Failure>,
    float: impl Fn(&IncrementSpec, usize) -> Result<(f64, f64, f64), Failure>,
) -> Result<Outcome, Failure> {
    let (id, spec) = cfg.spec()?;
    let mut out = Outcome { csv: format!("{CSV_HEADER}\n"), ..Default::default() };
    let mut values = Vec::new();
    for n in cfg.grid()? {
        if spec.is_rational() {
            let v = eval(&spec, n)?;
            out.csv.push_str(&exact::csv_row(&id, n, quantity, &v));
            values.push((n, rational::format(&v)));
            out.notes.push(format!("{quantity}({n}) = {} ≈ {:.12}", rational::format(&v), rational::to_f64(&v)));
        } else {
            let (v, lo, hi) = float(&spec, n)?;
            let _ = write!(out.csv, "{id},{n},{quantity},{v},");
            values.push((n, v.to_string()));
            out.notes.push(format!("{quantity}({n}) ≈ {v} in [{lo}, {hi}] (floating point)"));
        }
        out.csv.push('\n');
    }
    out.stdout = value_lines(&values);
    Ok(out)
}

fn exact_p(cfg: &Config) -> Result<Outcome, Failure> {
    let budget = cfg.u64_or("budget", exact::DEFAULT_BUDGET)?;
    exact_values(
        cfg,
        "pN",
        |s, n| Ok(exact::exact_persistence_with_budget(s, n, budget)?),
        |s, n| {
            let f = exact::float_persistence_with_budget(s, n, 0.0, budget)?;
            Ok((f.value, f.lower, f.upper))
        },
    )
}

fn exact_bridge(cfg: &Config) -> Result<Outcome, Failure> {
    exact_values(
        cfg,
        "pStarN",
        |s, n| Ok(exact::exact_bridge_persistence(s, n)?),
        |s, _| Err(Failure::config(format!("{} masses are not rational; the bridge needs exact arithmetic", s.name()))),
    )
}

fn enumerate(cfg: &Config) -> Result<Outcome, Failure> {
    let (id, spec) = cfg.spec()?;
    let n = cfg.usize("n")?;
    let v = exact::enumerate_persistence(&spec, n)?;
    Ok(Outcome {
        stdout: format!("{}\n", rational::format(&v)),
        csv: format!("{CSV_HEADER}\n{}\n", exact::csv_row(&id, n, "pN", &v)),
        ..Default::default()
    })
}

fn convention(cfg: &Config) -> Result<Option<CrossingConvention>, Failure> {
    cfg.get("convention").map(|c| c.parse().map_err(Failure::from)).transpose()
}

fn cycle_law(cfg: &Config) -> Result<Outcome, Failure> {
    let (_, spec) = cfg.spec()?;
    let horizon = cfg.usize("horizon")?;
    let conv = convention(cfg)?.unwrap_or(CrossingConvention::WeakUp);
    let law = exact::exact_cycle_law(&spec, horizon, conv)?;
    let mut out = Outcome::same(format!("{}\n{}", exact::CYCLE_LAW_HEADER, exact::cycle_law_csv(&law)));
    out.notes.push(format!("mass beyond horizon {horizon}: {}", rational::format(&law.residual)));
    Ok(out)
}

fn symmetry_audit(cfg: &Config) -> Result<Outcome, Failure> {
    let (_, spec) = cfg.spec()?;
    let horizon = cfg.usize("horizon")?;
    let conventions = match convention(cfg)? {
        Some(c) => vec![c],
        None => CrossingConvention::ALL.to_vec(),
    };
    let mut csv = format!("{}\n", exact::AUDIT_HEADER);
    let mut notes = Vec::new();
    for conv in conventions {
        let law = exact::exact_cycle_law(&spec, horizon, conv)?;
        for (name, dist) in [("first", &law.first), ("hat", &law.hat)] {
            let audit = exact::symmetry_audit(dist);
            csv.push_str(&exact::audit_csv_row(conv, horizon, name, &audit));
            csv.push('\n');
            notes.push(format!("{conv} {name}: max asymmetry {}", exact::describe_audit(&audit)));
        }
    }
    Ok(Outcome { notes, ..Outcome::same(csv) })
}

fn mode(cfg: &Config) -> Result<PositivityMode, Failure> {
    Ok(cfg.get("mode").unwrap_or("strict").parse()?)
}

fn number_pair(r: &Rational) -> String {
    format!("{},{}", r.numer(), r.denom())
}

fn spitzer(cfg: &Config) -> Result<Outcome, Failure> {
    let n = cfg.usize("n")?;
    let mode = mode(cfg)?;
    let constant = |v: Rational| -> Result<_, Failure> {
        if cfg.get("family").is_some() {
            return Err(Failure::config("spec keys are only used with probs = spec"));
        }
        Ok(PositivitySeq::constant(mode, v, n))
    };
    let probs_key = cfg.get("probs").unwrap_or(if cfg.get("family").is_some() { "spec" } else { "half" });
    let seq = match probs_key {
        "half" => constant(ratio(1, 2))?,
        "one" => constant(ratio(1, 1))?,
        "zero" => constant(ratio(0, 1))?,
        "spec" => {
            let (_, spec) = cfg.spec()?;
            if !spec.is_rational() {
                return spitzer_float(&spec, n, mode);
            }
            fluctuation::positivity_probs(&spec, n, mode)?
        }
        other => return Err(Failure::config(format!("unknown probs {other:?}"))),
    };
    let q = fluctuation::sparre_andersen(&seq);
    let mut csv = format!("{POSITIVITY_HEADER}\n");
    for (k, qk) in q.iter().enumerate().skip(1) {
        let _ = writeln!(csv, "{k},{mode},{},{}", number_pair(seq.get(k)), number_pair(qk));
    }
    Ok(Outcome {
        stdout: format!("{}\n", rational::format(&q[n])),
        csv,
        notes: vec![format!("q_{n} = {} ≈ {:.12}", rational::format(&q[n]), rational::to_f64(&q[n]))],
        ..Default::default()
    })
}

fn spitzer_float(spec: &IncrementSpec, n: usize, mode: PositivityMode) -> Result<Outcome, Failure> {
    let seq = fluctuation::positivity_probs_f64(spec, n, mode)?;
    let q = fluctuation::sparre_andersen(&seq);
    let mut csv = format!("{POSITIVITY_HEADER}\n");
    for (k, qk) in q.iter().enumerate().skip(1) {
        let _ = writeln!(csv, "{k},{mode},{},,{qk},", seq.get(k));
    }
    Ok(Outcome { stdout: format!("{}\n", q[n]), csv, ..Default::default() })
}

fn series_diagnostic(cfg: &Config) -> Result<Outcome, Failure> {
    let (_, spec) = cfg.spec()?;
    let n = cfg.usize("n")?;
    let seq = fluctuation::positivity_probs_f64(&spec, n, PositivityMode::Strict)?;
    let sums = fluctuation::series_diagnostic(&seq, spec.alpha());
    let mut csv = format!("{SERIES_HEADER}\n");
    for (i, s) in sums.iter().enumerate() {
        let _ = writeln!(csv, "{},{s}", i + 1);
    }
    Ok(Outcome::same(csv))
}

fn bivariate(cfg: &Config) -> Result<BivariateIncrementSpec, Failure> {
    let b = cfg.require("bspec")?;
    if b.contains('=') {
        Ok(BivariateIncrementSpec::parse("custom", b)?)
    } else {
        Ok(BivariateIncrementSpec::builtin(b)?)
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn prop2(cfg: &Config) -> Result<Outcome, Failure> {
    let b = bivariate(cfg)?;
    let n = cfg.usize("n")?;
    let h = fluctuation::halfplane_measures(&b, n)?;
    let mut out = Outcome { csv: format!("{HALFPLANE_HEADER}\n"), ..Default::default() };
    out.stdout.push_str("x,lhs1,rhs1,indep1,lhs2,rhs2,indep2\n");
    for r in &h.rows {
        out.csv.push_str(&fluctuation::halfplane_csv_row(b.name(), n, r));
        out.csv.push('\n');
        let f = rational::format;
        let _ = writeln!(
            out.stdout,
            "{},{},{},{},{},{},{}",
            r.x,
            f(&r.lhs1),
            f(&r.rhs1),
            verdict(r.indep1_holds()),
            f(&r.lhs2),
            f(&r.rhs2),
            verdict(r.indep2_holds())
        );
    }
    let ok = h.indep1_holds() && h.indep2_holds();
    if b.y_symmetric() {
        let _ = writeln!(out.stdout, "verdict,{}", verdict(ok));
        if !ok {
            out.failed.push(format!("{} violates the half-plane inequalities at n = {n}", b.name()));
        }
    } else {
        let _ = writeln!(out.stdout, "verdict,NOT-ASSERTED");
        out.notes.push(format!(
            "{} is not y-symmetric; inequalities reported, not asserted (indep1 {}, indep2 {})",
            b.name(),
            verdict(h.indep1_holds()),
            verdict(h.indep2_holds())
        ));
    }
    Ok(out)
}

fn corollary_check(cfg: &Config) -> Result<Outcome, Failure> {
    let (id, spec) = cfg.spec()?;
    let (n, samples, seed, shards) = (n_or(cfg, 10)?, samples(cfg)?, cfg.seed()?, cfg.shards()?);
    let c = fluctuation::corollary_independence_check(&spec, n, samples as usize, seed, shards, cap(cfg)?)?;
    let header = "spec_id,n,accepted,attempts,ks_statistic,p_value,censored_conditioned,censored_free,seed,shards";
    let row = format!(
        "{id},{n},{},{},{},{},{},{},{seed},{shards}",
        c.accepted, c.attempts, c.ks.statistic, c.ks.p_value, c.censored_conditioned, c.censored_free
    );
    let mut out = Outcome::same(format!("{header}\n{row}\n"));
    out.notes.push(format!("acceptance rate {:.4}", c.acceptance_rate()));
    if c.ks.p_value <= 0.01 {
        out.failed.push(format!("KS p-value {} <= 0.01", c.ks.p_value));
    }
    Ok(out)
}

fn mc_p(cfg: &Config) -> Result<Outcome, Failure> {
    let (id, spec) = cfg.spec()?;
    let (samples, seed, shards) = (samples(cfg)?, cfg.seed()?, cfg.shards()?);
    let mut csv = format!("{ESTIMATE_HEADER}\n");
    for n in cfg.grid()? {
        let e = estimators::mc_persistence(&spec, n, samples, seed, shards);
        csv.push_str(&estimate_csv_row(&id, "pN", n as u64, &e, seed, shards));
        csv.push('\n');
    }
    Ok(Outcome::same(csv))
}

fn mc_cycle_tail(cfg: &Config) -> Result<Outcome, Failure> {
    let (id, spec) = cfg.spec()?;
    let (samples, seed, shards) = (samples(cfg)?, cfg.seed()?, cfg.shards()?);
    let t = estimators::mc_cycle_tail(&spec, &cfg.grid()?, samples, cap(cfg)?, seed, shards)?;
    let mut csv = String::from(
        "spec_id,n,tail,tail_stderr,rescaled,rescaled_stderr,interval_lo,interval_hi,n_samples,seed,shards\n",
    );
    for p in &t.points {
        let _ = writeln!(
            csv,
            "{id},{},{},{},{},{},{},{},{samples},{seed},{shards}",
            p.n, p.tail.value, p.tail.stderr, p.rescaled.value, p.rescaled.stderr, p.interval.0, p.interval.1
        );
    }
    let mut out = Outcome::same(csv);
    out.notes.push(format!("{} of {samples} cycles censored at {}", t.censored, t.horizon));
    if let Some(f) = &t.slope {
        out.notes.push(format!("log-log tail slope {:.4} [{:.4}, {:.4}]", f.slope, f.slope_ci95.0, f.slope_ci95.1));
    }
    Ok(out)
}

fn eta_scaling(cfg: &Config) -> Result<Outcome, Failure> {
    let (_, spec) = cfg.spec()?;
    let (samples, seed, shards) = (samples(cfg)?, cfg.seed()?, cfg.shards()?);
    let n = cfg.usize("n")?;
    let r = estimators::mc_eta_scaling(&spec, n, samples, seed, shards);
    let mut csv = String::from("index,scaled_eta\n");
    for (i, x) in r.scaled.iter().enumerate() {
        let _ = writeln!(csv, "{i},{x}");
    }
    let mut out = Outcome { csv, ..Default::default() };
    match r.reference() {
        Ok(ks) => {
            out.stdout = format!("ks_statistic,p_value\n{},{}\n", ks.statistic, ks.p_value);
            if ks.p_value <= 0.01 {
                out.failed.push(format!("KS p-value {} <= 0.01", ks.p_value));
            }
        }
        Err(e) => {
            out.stdout = "ks_statistic,p_value\n,\n".into();
            out.notes.push(e.to_string());
        }
    }
    Ok(out)
}

fn key_identity(cfg: &Config) -> Result<Outcome, Failure> {
    let (id, spec) = cfg.spec()?;
    let (samples, seed, shards) = (samples(cfg)?, cfg.seed()?, cfg.shards()?);
    let n = cfg.usize("n")?;
    let k = estimators::check_key_identity(&spec, n, samples, seed, shards, cap(cfg)?)?;
    let header = "spec_id,n,lhs,lhs_stderr,rhs,rhs_stderr,rhs_closed_form,z_score,n_samples,seed,shards";
    let row = format!(
        "{id},{n},{},{},{},{},{},{},{samples},{seed},{shards}",
        k.lhs.value, k.lhs.stderr, k.rhs.value, k.rhs.stderr, k.rhs_closed_form.value, k.z_score
    );
    let mut out = Outcome::same(format!("{header}\n{row}\n"));
    if k.z_score.abs() >= 3.0 {
        out.failed.push(format!("|z| = {} >= 3", k.z_score.abs()));
    }
    Ok(out)
}

fn positivity_limit(cfg: &Config) -> Result<Outcome, Failure> {
    let (id, spec) = cfg.spec()?;
    let (samples, seed, shards) = (samples(cfg)?, cfg.seed()?, cfg.shards()?);
    let n = cfg.usize("n")?;
    let tol = cfg.f64_or("tolerance", 0.02)?;
    let e = estimators::positivity_limit_check(&spec, n, samples, seed, shards);
    let target = 1.0 / spec.alpha();
    let mut out = Outcome::same(format!(
        "{ESTIMATE_HEADER}\n{}\n",
        estimate_csv_row(&id, "positivity", n as u64, &e, seed, shards)
    ));
    out.notes.push(format!("P(S_{n} > 0) = {e}, limit 1/alpha = {target:.6}"));
    if (e.value - target).abs() > tol {
        out.failed.push(format!("|{} - {target}| > {tol}", e.value));
    }
    Ok(out)
}

/// Reads `(n, estimate)` points from an estimate CSV.
fn read_points(cfg: &Config) -> Result<Vec<(u64, Estimate)>, Failure> {
    let path = cfg.require("input")?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("cannot read {path}: {e}")))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> =
        lines.next().ok_or_else(|| Failure::config(format!("{path} is empty")))?.split(',').collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Failure::config(format!("{path}: no column {name:?}")))
    };
    let (cn, cv, cs, cm) = (col("n")?, col("value")?, col("stderr")?, col("n_samples")?);
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let get = |i: usize| f.get(i).map(|s| s.trim()).unwrap_or("");
            let bad = |what: &str| Failure::config(format!("{path}: bad {what} in {line:?}"));
            let n: u64 = get(cn).parse().map_err(|_| bad("n"))?;
            let v: f64 = get(cv).parse().map_err(|_| bad("value"))?;
            let s: f64 = get(cs).parse().map_err(|_| bad("stderr"))?;
            let m: u64 = get(cm).parse().map_err(|_| bad("n_samples"))?;
            Ok((n, Estimate::new(v, s, m)))
        })
        .collect()
}

fn fit_exponent(cfg: &Config) -> Result<Outcome, Failure> {
    let fit = estimators::fit_exponent(&read_points(cfg)?)?;
    Ok(Outcome::same(format!("{FIT_HEADER}\n{}\n", fit.csv_row())))
}

fn estimate_constant(cfg: &Config) -> Result<Outcome, Failure> {
    let alpha = cfg.f64_or("alpha", 2.0)?;
    let tol = cfg.f64_or("slope_tolerance", 0.0)?;
    let c = estimators::estimate_constant(&read_points(cfg)?, alpha, tol)?;
    Ok(Outcome::same(format!(
        "value,stderr,ci_lo,ci_hi,n_samples\n{},{},{},{},{}\n",
        c.value, c.stderr, c.ci95.0, c.ci95.1, c.n_samples
    )))
}

fn scaling_report(cfg: &Config) -> Result<Outcome, Failure> {
    let (id, spec) = cfg.spec()?;
    let (seed, shards) = (cfg.seed()?, cfg.shards()?);
    let exact = cfg.bool_or("exact", false)?;
    let samples = samples(cfg)?;
    let tol = cfg.f64_or("slope_tolerance", 0.03)?;
    let grid = match cfg.get("grid") {
        Some(g) => crate::config::parse_grid(g)?,
        None => return Err(Failure::config("scaling-report: missing key \"grid\"")),
    };
    let r = estimators::scaling_report(&spec, &grid, exact, samples, seed, shards, tol)?;
    let mut out = Outcome { csv: format!("{ESTIMATE_HEADER}\n"), ..Default::default() };
    for (n, e) in &r.points {
        out.csv.push_str(&estimate_csv_row(&id, "pN", *n, e, seed, shards));
        out.csv.push('\n');
    }
    let mut s = String::new();
    let _ = writeln!(s, "slope,{}", r.fit.slope);
    let _ = writeln!(s, "slope_lo,{}", r.fit.slope_ci95.0);
    let _ = writeln!(s, "slope_hi,{}", r.fit.slope_ci95.1);
    let _ = writeln!(s, "r2,{}", r.fit.r2);
    let _ = writeln!(s, "sampled,{}", r.sampled);
    match &r.constant {
        Ok(c) => {
            let _ = writeln!(s, "constant,{}", c.value);
            let _ = writeln!(s, "constant_stderr,{}", c.stderr);
        }
        Err(e) => {
            out.failed.push(e.to_string());
        }
    }
    if let Some((lo, hi)) = r.interval {
        let _ = writeln!(s, "interval_lo,{lo}");
        let _ = writeln!(s, "interval_hi,{hi}");
    }
    match r.verdict {
        Some(v) => {
            let _ = writeln!(s, "verdict,{}", verdict(v));
            if !v {
                out.failed.push("constant outside the reference interval".into());
            }
        }
        None => {
            let _ = writeln!(s, "verdict,NOT-ASSERTED");
        }
    }
    out.stdout = s;
    Ok(out)
}
