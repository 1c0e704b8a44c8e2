use std::path::Path;
use std::time::Instant;

use newton_lab::dwork::{dwork_run_escalating, stability_check, DworkBudget};
use newton_lab::oracle::{torus_table, LOptions, LPolynomial, LaurentCoeffVector, Verifier};
use newton_lab::polygons::LowerPolygon;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::cache::Cache;
use crate::config::{ExperimentConfig, Mode};
use crate::error::{CliError, Result};
use crate::report::{
    polygon_strings, write_json, Aggregates, CampaignReport, Counterexample, CounterexampleKind,
    DworkComparison, InstanceRecord, RunStats,
};
use crate::sampling::VectorSpace;

/// The coefficient vectors a configuration selects, sorted by key.
pub fn select_vectors(config: &ExperimentConfig) -> Result<Vec<LaurentCoeffVector>> {
    let space = VectorSpace::new(config.p, config.b, config.shape)?;
    match &config.mode {
        Mode::Exhaustive => space.exhaustive(),
        Mode::Sample { count, seed } => space.sample(*count, *seed),
        Mode::Single { .. } => Ok(vec![config.single()?]),
    }
}

fn oracle_options(config: &ExperimentConfig) -> LOptions {
    LOptions {
        guard: config.guard,
        ..LOptions::default()
    }
}

/// Fails before any work when the largest character sum exceeds the guard.
fn check_guard(config: &ExperimentConfig) -> Result<()> {
    let total = config.shape.l_degree() + oracle_options(config).extra_checks;
    torus_table(config.p, config.b, total.max(1), config.guard)?;
    Ok(())
}

fn is_spot_checked(index: usize, fraction: f64) -> bool {
    fraction >= 1.0 || ((index + 1) as f64 * fraction).floor() > (index as f64 * fraction).floor()
}

/// Exact L-polynomial, from the cache when present.
struct OracleResult {
    l: LPolynomial,
    fresh: bool,
    spot_checked: bool,
}

fn oracle_l(
    verifier: &Verifier,
    cache: Option<&Cache>,
    f: &LaurentCoeffVector,
    spot_check: bool,
) -> Result<OracleResult> {
    let Some((l, np)) = cache.map(|c| c.lookup(f)).transpose()?.flatten() else {
        return Ok(OracleResult {
            l: verifier.compute_l(f)?,
            fresh: true,
            spot_checked: false,
        });
    };
    let cache = cache.expect("hit implies cache");
    if newton_lab::oracle::newton_polygon(&l, f.b())? != np {
        return Err(cache.mismatch(f));
    }
    if spot_check && verifier.compute_l(f)? != l {
        return Err(cache.mismatch(f));
    }
    Ok(OracleResult {
        l,
        fresh: false,
        spot_checked: spot_check,
    })
}

fn describe(f: &LaurentCoeffVector) -> String {
    f.to_json().to_string()
}

fn checks_to_counterexamples(
    f: &LaurentCoeffVector,
    record: &InstanceRecord,
    out: &mut Vec<Counterexample>,
) {
    let a = describe(f);
    let mut push = |kind, detail: String| {
        out.push(Counterexample {
            a: a.clone(),
            kind,
            detail,
        })
    };
    let c = &record.checks;
    if !c.hodge_bound_ok {
        push(
            CounterexampleKind::HodgeBound,
            format!("NP {:?}", record.np),
        );
    }
    if c.generic_match == Some(false) {
        let detail = if record.hasse_nonzero == Some(true) {
            "H(a) != 0 but NP != arithmetic"
        } else {
            "H(a) = 0 but NP = arithmetic"
        };
        push(CounterexampleKind::GenericMatch, detail.into());
    }
    if c.stickelberger_ok == Some(false) {
        push(
            CounterexampleKind::Stickelberger,
            format!("NP {:?} != Hodge", record.np),
        );
    }
    if !c.above_arithmetic && (!f.shape().is_laurent() || c.threshold_met) {
        push(
            CounterexampleKind::BelowArithmetic,
            format!("NP {:?}", record.np),
        );
    }
    if let Some(d) = &record.dwork {
        if d.polygon_match == Some(false) || d.coefficients_match == Some(false) {
            push(
                CounterexampleKind::DworkMismatch,
                format!("dwork NP {:?}", d.np),
            );
        }
    }
}

struct InstanceOutcome {
    record: InstanceRecord,
    fresh: Option<(LPolynomial, LowerPolygon)>,
    cache_hit: bool,
    spot_checked: bool,
}

fn verify_one(
    config: &ExperimentConfig,
    verifier: &Verifier,
    cache: Option<&Cache>,
    f: &LaurentCoeffVector,
    index: usize,
) -> Result<InstanceOutcome> {
    let budget = DworkBudget::for_shape(&config.shape);
    let run = config
        .engines
        .uses_dwork()
        .then(|| dwork_run_escalating(f, budget))
        .transpose()?;
    let (record_parts, l, cache_hit, spot_checked) = if config.engines.uses_oracle() {
        let o = oracle_l(
            verifier,
            cache,
            f,
            is_spot_checked(index, config.spot_check),
        )?;
        let report = verifier.verify_with_l(f, o.l.clone())?;
        (
            (report.newton, report.hasse_value, report.checks),
            Some((o.l, o.fresh)),
            !o.fresh,
            o.spot_checked,
        )
    } else {
        let newton = run.as_ref().expect("dwork engine ran").polygon.clone();
        let (hasse, checks) = verifier.check_polygon(f, &newton)?;
        ((newton, hasse, checks), None, false, false)
    };
    let (newton, hasse, checks) = record_parts;
    let dwork = match &run {
        Some(run) => Some(DworkComparison {
            np: polygon_strings(&run.polygon),
            polygon_match: l.as_ref().map(|_| run.polygon == newton),
            coefficients_match: l.as_ref().map(|(l, _)| run.matches_oracle(l)).transpose()?,
            k: run.k,
            precision: run.precision,
        }),
        None => None,
    };
    let record = InstanceRecord {
        a: f.to_json(),
        hasse_nonzero: hasse.as_ref().map(|h| h.0.iter().any(|&c| c != 0)),
        hasse: hasse.map(|h| h.0),
        np: polygon_strings(&newton),
        checks,
        dwork,
    };
    let fresh = match l {
        Some((l, true)) => Some((l, newton)),
        _ => None,
    };
    Ok(InstanceOutcome {
        record,
        fresh,
        cache_hit,
        spot_checked,
    })
}

fn open_cache(config: &ExperimentConfig) -> Result<Option<Cache>> {
    config.cache.as_deref().map(Cache::open).transpose()
}

fn finish_cache(
    cache: Option<&mut Cache>,
    fresh: Vec<(LaurentCoeffVector, LPolynomial, LowerPolygon)>,
) -> Result<()> {
    if let Some(cache) = cache {
        for (f, l, np) in &fresh {
            cache.insert(f, l, np);
        }
        cache.flush()?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub report: CampaignReport,
    pub stats: RunStats,
}

impl VerifyOutcome {
    pub fn has_counterexamples(&self) -> bool {
        !self.report.counterexamples.is_empty()
    }
}

/// Runs every selected instance and writes the report when `out` is set.
pub fn run_verify(config: &ExperimentConfig) -> Result<VerifyOutcome> {
    let start = Instant::now();
    if config.engines.uses_oracle() {
        check_guard(config)?;
    }
    let vectors = select_vectors(config)?;
    let verifier =
        Verifier::new(config.p, config.b, config.shape)?.with_options(oracle_options(config));
    let mut cache = open_cache(config)?;
    let outcomes: Vec<InstanceOutcome> = vectors
        .par_iter()
        .enumerate()
        .map(|(i, f)| verify_one(config, &verifier, cache.as_ref(), f, i))
        .collect::<Result<_>>()?;
    let mut stats = RunStats {
        instances: outcomes.len(),
        ..Default::default()
    };
    let mut fresh = Vec::new();
    let mut records = Vec::with_capacity(outcomes.len());
    let mut counterexamples = Vec::new();
    for (f, o) in vectors.iter().zip(outcomes) {
        stats.cache_hits += usize::from(o.cache_hit);
        stats.cache_spot_checks += usize::from(o.spot_checked);
        if let Some((l, np)) = o.fresh {
            fresh.push((f.clone(), l, np));
        }
        checks_to_counterexamples(f, &o.record, &mut counterexamples);
        records.push(o.record);
    }
    finish_cache(cache.as_mut(), fresh)?;
    counterexamples.sort();
    let report = CampaignReport {
        config: config.summary(),
        threshold_met: verifier.threshold_met,
        arithmetic: polygon_strings(&verifier.arithmetic),
        hodge: polygon_strings(&verifier.hodge),
        aggregates: Aggregates::from_records(&records),
        counterexamples,
        instances: records,
    };
    stats.wall_seconds = start.elapsed().as_secs_f64();
    stats.mean_instance_ms = if stats.instances > 0 {
        stats.wall_seconds * 1e3 / stats.instances as f64
    } else {
        0.0
    };
    if let Some(dir) = &config.out {
        report.write(dir)?;
        write_json(&dir.join("run_stats.json"), &stats)?;
    }
    Ok(VerifyOutcome { report, stats })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrosscheckRecord {
    pub a: Value,
    pub oracle_np: Vec<String>,
    pub dwork_np: Vec<String>,
    pub identical: bool,
    pub coefficients_match: bool,
    pub stable: bool,
    pub trace_identity: bool,
    pub k: i64,
    pub precision: u32,
    pub leading_checked: usize,
    pub leading_violations: Vec<i64>,
    pub leading_undecided: usize,
    pub floor_violations: Vec<i64>,
    pub row_floor_violations: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CrosscheckAggregates {
    pub instances: usize,
    pub identical: usize,
    pub coefficients_match: usize,
    pub stable: usize,
    pub leading_terms_clean: usize,
    pub floors_clean: usize,
    pub row_floors_clean: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub config: Value,
    pub aggregates: CrosscheckAggregates,
    pub counterexamples: Vec<Counterexample>,
    pub instances: Vec<CrosscheckRecord>,
}

#[derive(Clone, Debug)]
pub struct CrosscheckOutcome {
    pub report: CrosscheckReport,
    pub stats: RunStats,
}

impl CrosscheckOutcome {
    pub fn has_counterexamples(&self) -> bool {
        !self.report.counterexamples.is_empty()
    }
}

fn diagnostics_name(f: &LaurentCoeffVector) -> String {
    let parts: Vec<String> = f
        .key()
        .iter()
        .map(|c| c.iter().map(u32::to_string).collect::<Vec<_>>().join("."))
        .collect();
    format!("a_{}.json", parts.join("_"))
}

fn crosscheck_one(
    config: &ExperimentConfig,
    verifier: &Verifier,
    cache: Option<&Cache>,
    f: &LaurentCoeffVector,
    index: usize,
) -> Result<(CrosscheckRecord, Option<Value>, InstanceOutcomeLite)> {
    let o = oracle_l(
        verifier,
        cache,
        f,
        is_spot_checked(index, config.spot_check),
    )?;
    let oracle_np = newton_lab::oracle::newton_polygon(&o.l, 1)?;
    let stability = stability_check(f, DworkBudget::for_shape(&config.shape))?;
    let run = &stability.base;
    let lead = run.leading_terms(f)?;
    let record = CrosscheckRecord {
        a: f.to_json(),
        oracle_np: polygon_strings(&oracle_np),
        dwork_np: polygon_strings(&run.polygon),
        identical: run.polygon == oracle_np,
        coefficients_match: run.matches_oracle(&o.l)?,
        stable: stability.stable(),
        trace_identity: run.trace_identity_holds(),
        k: run.k,
        precision: run.precision,
        leading_checked: lead.checked,
        leading_violations: lead.violations,
        leading_undecided: lead.undecided.len(),
        floor_violations: run.corollary_violations(&config.shape)?,
        row_floor_violations: run.row_floor_violations(&config.shape)?,
    };
    let dump = (!record.identical
        || !record.coefficients_match
        || !record.stable
        || !record.trace_identity)
        .then(|| run.diagnostics(f));
    let lite = InstanceOutcomeLite {
        fresh: o.fresh.then_some((o.l, oracle_np)),
        cache_hit: !o.fresh,
        spot_checked: o.spot_checked,
    };
    Ok((record, dump, lite))
}

struct InstanceOutcomeLite {
    fresh: Option<(LPolynomial, LowerPolygon)>,
    cache_hit: bool,
    spot_checked: bool,
}

fn crosscheck_counterexamples(r: &CrosscheckRecord, out: &mut Vec<Counterexample>) {
    let a = r.a.to_string();
    let mut push = |kind, detail: String| {
        out.push(Counterexample {
            a: a.clone(),
            kind,
            detail,
        })
    };
    if !r.identical || !r.coefficients_match || !r.trace_identity {
        push(
            CounterexampleKind::DworkMismatch,
            format!(
                "oracle NP {:?}, dwork NP {:?}, coefficients match {}",
                r.oracle_np, r.dwork_np, r.coefficients_match
            ),
        );
    }
    if !r.stable {
        push(
            CounterexampleKind::Unstable,
            "polygon changed under K -> 2K or M -> M + 2".into(),
        );
    }
    if !r.leading_violations.is_empty() {
        push(
            CounterexampleKind::LeadingTerm,
            format!("gamma indices {:?}", r.leading_violations),
        );
    }
    if !r.floor_violations.is_empty() {
        push(
            CounterexampleKind::CoefficientFloor,
            format!("gamma indices {:?}", r.floor_violations),
        );
    }
    if !r.row_floor_violations.is_empty() {
        push(
            CounterexampleKind::RowFloor,
            format!("series degrees {:?}", r.row_floor_violations),
        );
    }
}

/// Both engines on every selected instance; diagnostics dumped on disagreement.
pub fn run_crosscheck(config: &ExperimentConfig) -> Result<CrosscheckOutcome> {
    let start = Instant::now();
    if config.b != 1 || !config.shape.is_laurent() {
        return Err(CliError::Validation(
            "crosscheck needs b = 1 and e > 0".into(),
        ));
    }
    check_guard(config)?;
    let vectors = select_vectors(config)?;
    let verifier = Verifier::new(config.p, 1, config.shape)?.with_options(oracle_options(config));
    let mut cache = open_cache(config)?;
    let results: Vec<_> = vectors
        .par_iter()
        .enumerate()
        .map(|(i, f)| crosscheck_one(config, &verifier, cache.as_ref(), f, i))
        .collect::<Result<_>>()?;
    let mut stats = RunStats {
        instances: results.len(),
        ..Default::default()
    };
    let mut agg = CrosscheckAggregates {
        instances: results.len(),
        ..Default::default()
    };
    let mut counterexamples = Vec::new();
    let mut records = Vec::with_capacity(results.len());
    let mut fresh = Vec::new();
    for (f, (record, dump, lite)) in vectors.iter().zip(results) {
        stats.cache_hits += usize::from(lite.cache_hit);
        stats.cache_spot_checks += usize::from(lite.spot_checked);
        if let Some((l, np)) = lite.fresh {
            fresh.push((f.clone(), l, np));
        }
        agg.identical += usize::from(record.identical);
        agg.coefficients_match += usize::from(record.coefficients_match);
        agg.stable += usize::from(record.stable);
        agg.leading_terms_clean += usize::from(record.leading_violations.is_empty());
        agg.floors_clean += usize::from(record.floor_violations.is_empty());
        agg.row_floors_clean += usize::from(record.row_floor_violations.is_empty());
        crosscheck_counterexamples(&record, &mut counterexamples);
        if let (Some(dump), Some(dir)) = (dump, &config.out) {
            write_json(&dir.join("diagnostics").join(diagnostics_name(f)), &dump)?;
        }
        records.push(record);
    }
    finish_cache(cache.as_mut(), fresh)?;
    counterexamples.sort();
    let report = CrosscheckReport {
        config: config.summary(),
        aggregates: agg,
        counterexamples,
        instances: records,
    };
    stats.wall_seconds = start.elapsed().as_secs_f64();
    stats.mean_instance_ms = if stats.instances > 0 {
        stats.wall_seconds * 1e3 / stats.instances as f64
    } else {
        0.0
    };
    if let Some(dir) = &config.out {
        write_json(&dir.join("crosscheck.json"), &report)?;
        write_json(&dir.join("run_stats.json"), &stats)?;
    }
    Ok(CrosscheckOutcome { report, stats })
}

/// Writes the diagnostic dump for one instance.
pub fn dump_diagnostics(f: &LaurentCoeffVector, dir: &Path) -> Result<()> {
    let run = dwork_run_escalating(f, DworkBudget::for_shape(&f.shape()))?;
    write_json(&dir.join(diagnostics_name(f)), &run.diagnostics(f))
}
