//! Experiment dispatch and artifact writing.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{Coefficient, Experiment, ExperimentConfig, Sigma2Config};
use super::plotdata::emit_plotdata;
use crate::coupling::{
    gamma_profiles, tau_profile, theta_product_profile, theta_profile, DependenceProfile, ThetaMethod,
};
use crate::error::{domain, Error, Result};
use crate::field::FieldModel;
use crate::limits::{
    clt_check, fclt_fdd_check, rosenthal_ratio, tightness_trend, Statistic, Table, VerificationReport,
};
use crate::ortho::{build_reverse, l2_gap, orthogonality_defect, verify_orthomartingale};
use crate::quantile::{clt_condition, tightness_condition, ConditionReport};
use crate::rng::{json_hash, par_replicates};
use crate::stats::mean_se;
use crate::sums::{sigma2, Sigma2Estimate, Sigma2Method, SumProcess};
use crate::transfer::{check_identities, condmodcont_integral, TorusMap, TorusObservable};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything an experiment produces; serialized as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: String,
    pub passed: bool,
    pub version: String,
    pub seed: u64,
    pub statistics: Vec<Statistic>,
    pub tables: Vec<Table>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profiles: Vec<DependenceProfile>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn new(kind: &str, seed: u64) -> Self {
        RunReport {
            kind: kind.into(),
            passed: true,
            version: VERSION.into(),
            seed,
            statistics: Vec::new(),
            tables: Vec::new(),
            profiles: Vec::new(),
            details: Value::Null,
            notes: Vec::new(),
        }
    }

    fn push(&mut self, s: Statistic) {
        self.passed &= s.passed;
        self.statistics.push(s);
    }

    fn absorb(&mut self, r: VerificationReport) {
        self.passed &= r.passed;
        self.statistics.extend(r.statistics);
        self.tables.extend(r.tables);
        self.notes.extend(r.notes);
    }

    pub fn statistic(&self, name: &str) -> Option<&Statistic> {
        self.statistics.iter().find(|s| s.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

fn stat(name: impl Into<String>, value: f64, stderr: Option<f64>, threshold: Option<f64>, passed: bool) -> Statistic {
    Statistic { name: name.into(), value, stderr, threshold, passed }
}

fn table(name: &str, columns: &[&str]) -> Table {
    Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
}

const DEFAULT_SIGMA2_REPS: usize = 200;

fn resolve_sigma2(model: &FieldModel, cfg: &Sigma2Config, n: &[usize], seed: u64) -> Result<Sigma2Estimate> {
    let shape = if cfg.shape.is_empty() { n.to_vec() } else { cfg.shape.clone() };
    let reps = if cfg.reps == 0 && cfg.method != Sigma2Method::Exact { DEFAULT_SIGMA2_REPS } else { cfg.reps };
    sigma2(model, cfg.method, cfg.radius, &shape, reps, seed)
}

/// The product grid `levels^d`.
pub fn grid_points(d: usize, levels: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * levels.len());
        for p in &out {
            for &l in levels {
                let mut q: Vec<f64> = p.clone();
                q.push(l);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn condition_table(name: &str, r: &ConditionReport) -> Table {
    let mut t = table(name, &["cutoff", "partial_sum"]);
    for (c, s) in r.cutoffs.iter().zip(&r.partial_sums) {
        t.rows.push(vec![*c, *s]);
    }
    t
}

const TRACE_POINTS: usize = 16;
const TRACE_REPLICATES: usize = 8;

struct SimRun {
    values: Vec<f64>,
    total: f64,
    norm: f64,
    max_rect: f64,
    trace: Vec<f64>,
}

fn simulate(model: &FieldModel, n: &[usize], reps: usize, raw: bool, seed: u64, rep: &mut RunReport) -> Result<()> {
    if reps == 0 {
        return domain("at least one replicate is required");
    }
    let hash = format!("{}/simulate", model.hash());
    let runs: Vec<SimRun> = par_replicates(reps, seed, &hash, |_, s| -> Result<SimRun> {
        let values = model.sample_values(n, s)?;
        let sp = SumProcess::new(n, &values)?;
        let trace = (0..=TRACE_POINTS).map(|j| sp.w_at(&vec![j as f64 / TRACE_POINTS as f64; n.len()])).collect();
        Ok(SimRun { total: sp.total(), norm: sp.norm(), max_rect: sp.max_rect(), trace, values })
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut summary = table("replicates", &["replicate", "sum", "normalized_sum", "normalized_max_rect"]);
    for (r, s) in runs.iter().enumerate() {
        summary.rows.push(vec![r as f64, s.total, s.total / s.norm, s.max_rect / s.norm]);
    }
    let shown = reps.min(TRACE_REPLICATES);
    let mut cols = vec!["t".to_string()];
    cols.extend((0..shown).map(|r| format!("w_{r}")));
    let mut trace = Table { name: "w_trace".into(), columns: cols, rows: Vec::new() };
    for j in 0..=TRACE_POINTS {
        let mut row = vec![j as f64 / TRACE_POINTS as f64];
        row.extend(runs.iter().take(shown).map(|s| s.trace[j]));
        trace.rows.push(row);
    }
    let all: Vec<f64> = runs.iter().flat_map(|s| s.values.iter().copied()).collect();
    let (mean, se) = mean_se(&all);
    rep.push(stat("cell_mean", mean, Some(se), None, true));
    rep.tables.push(summary);
    rep.tables.push(trace);
    if raw {
        let mut t = table("raw_0", &["index", "value"]);
        for (i, v) in runs[0].values.iter().enumerate() {
            t.rows.push(vec![i as f64, *v]);
        }
        rep.tables.push(t);
    }
    Ok(())
}

fn tau_check(p: &DependenceProfile, rep: &mut RunReport) {
    let mut worst = f64::NEG_INFINITY;
    for e in &p.entries {
        if let Some(b) = e.bound {
            worst = worst.max(e.estimate - b - 3.0 * e.stderr);
        }
    }
    rep.push(stat("max_excess_over_bound", worst, None, Some(0.0), worst <= 0.0));
}

/// Runs the experiment on the current thread pool.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunReport> {
    let seed = cfg.seed;
    let exp = &cfg.experiment;
    let mut rep = RunReport::new(exp.kind(), seed);
    match exp {
        Experiment::Simulate { model, n, reps, raw } => {
            let model = FieldModel::new(model.clone())?;
            simulate(&model, n, *reps, *raw, seed, &mut rep)?;
        }
        Experiment::Coeffs { model, coefficient, kmax, reps, m, m_grid, method } => {
            let model = FieldModel::new(model.clone())?;
            match coefficient {
                Coefficient::Gamma => rep.profiles = gamma_profiles(&model, *kmax, *reps, seed)?,
                Coefficient::Theta => {
                    let m = m.unwrap_or_else(|| model.sup_bound());
                    let method = method.unwrap_or(match model {
                        FieldModel::Torus(_) => ThetaMethod::Exact,
                        FieldModel::Linear { .. } => ThetaMethod::Coupling,
                    });
                    rep.profiles.push(theta_profile(&model, *kmax, m, method, *reps, seed)?);
                }
                Coefficient::ThetaProduct => {
                    rep.profiles.push(theta_product_profile(&model, *kmax, m_grid, *reps, seed)?);
                }
                Coefficient::Tau => {
                    let Some(spec) = model.as_linear() else {
                        return Err(Error::Capability("tau profiles need a linear field".into()));
                    };
                    let p = tau_profile(spec, *kmax, *kmax, *reps, seed)?;
                    tau_check(&p, &mut rep);
                    rep.profiles.push(p);
                }
            }
        }
        Experiment::Conditions { profile, d, cutoff, gammas, theta, modulus, expect } => {
            let mut reports = BTreeMap::new();
            if let Some(g) = gammas {
                reports.insert("clt", clt_condition(g, profile, *cutoff)?);
            }
            if let Some(t) = theta {
                reports.insert("tightness", tightness_condition(t, profile, *d, *cutoff)?);
            }
            if let Some(w) = modulus {
                reports.insert("modulus", condmodcont_integral(w, *d)?);
            }
            if reports.is_empty() {
                return domain("conditions needs at least one of gammas, theta, modulus");
            }
            for name in expect.keys() {
                if !reports.contains_key(name.as_str()) {
                    return Err(Error::Config {
                        path: format!("experiment.expect.{name}"),
                        message: "no such condition was evaluated".into(),
                    });
                }
            }
            for (name, r) in &reports {
                let ok = expect.get(*name).map_or(true, |v| *v == r.verdict);
                rep.push(stat(format!("{name}_value"), r.value, None, None, ok));
                if let Some(alt) = r.alternate_value {
                    let rel = (alt - r.value).abs() / r.value.abs().max(f64::MIN_POSITIVE);
                    rep.push(stat(format!("{name}_forms_rel_diff"), rel, None, None, true));
                }
                rep.tables.push(condition_table(&format!("{name}_partial_sums"), r));
            }
            rep.details = json!({ "reports": reports });
        }
        Experiment::TransferCheck { a, b, f, g, tol } => {
            let ma = TorusMap::new(a.clone())?;
            let mb = TorusMap::new(b.clone())?;
            let g = g.clone().unwrap_or_else(|| f.clone());
            let r = check_identities(&ma, &mb, f, &g)?;
            for d in &r.identities {
                rep.push(stat(format!("{}_fourier", d.name), d.fourier, None, Some(*tol), d.fourier <= *tol));
                rep.push(stat(format!("{}_pointwise", d.name), d.pointwise, None, Some(*tol), d.pointwise <= *tol));
            }
        }
        Experiment::Decompose { model, orders, gap } => {
            let TorusObservable::Fourier(f) = &model.observable else {
                return Err(Error::Capability("the decomposition needs a Fourier observable".into()));
            };
            let mut t = table("decomposition", &["N", "uk_sup_1", "uk_sup_2", "reassembly_deviation", "orthogonality_defect"]);
            let mut gaps = table("l2_gap", &["N", "gap", "stderr"]);
            let mut decs = Vec::new();
            for &n in orders {
                let dec = build_reverse(model, f, n)?;
                let o = verify_orthomartingale(&dec);
                let defect = orthogonality_defect(&dec, 2);
                rep.push(stat(format!("uk_sup_N{n}"), o.uk_sup[0].max(o.uk_sup[1]), None, Some(o.tolerance), o.passed));
                t.rows.push(vec![n as f64, o.uk_sup[0], o.uk_sup[1], dec.reassembly_deviation, defect]);
                if let Some(gc) = gap {
                    let (g, se) = l2_gap(model, &dec, &gc.n, gc.reps, seed)?;
                    gaps.rows.push(vec![n as f64, g, se]);
                }
                decs.push(dec);
            }
            rep.tables.push(t);
            if gap.is_some() {
                rep.tables.push(gaps);
            }
            rep.details = json!({ "decompositions": decs });
        }
        Experiment::Clt { model, n, reps, sigma2, ks_threshold } => {
            let model = FieldModel::new(model.clone())?;
            let s2 = resolve_sigma2(&model, sigma2, n, seed)?;
            rep.absorb(clt_check(&model, n, *reps, &s2, seed, *ks_threshold)?);
            rep.details = json!({ "sigma2": s2 });
        }
        Experiment::Fclt { model, n, reps, t_grid, sigma2, z_threshold } => {
            let model = FieldModel::new(model.clone())?;
            let s2 = resolve_sigma2(&model, sigma2, n, seed)?;
            let grid = if t_grid.is_empty() { grid_points(n.len(), &[0.25, 0.5, 1.0]) } else { t_grid.clone() };
            rep.absorb(fclt_fdd_check(&model, n, &grid, *reps, &s2, seed, *z_threshold)?);
            rep.details = json!({ "sigma2": s2 });
        }
        Experiment::Tightness { model, n_list, lambda, reps } => {
            let model = FieldModel::new(model.clone())?;
            rep.absorb(tightness_trend(&model, n_list, lambda, *reps, seed)?);
        }
        Experiment::Rosenthal { model, p, n_list, reps } => {
            let model = FieldModel::new(model.clone())?;
            rep.absorb(rosenthal_ratio(&model, *p, n_list, *reps, seed)?);
        }
    }
    Ok(rep)
}

/// Executes on a dedicated pool of `cfg.workers` threads.
pub fn execute_with_workers(cfg: &ExperimentConfig) -> Result<RunReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Domain(format!("cannot build worker pool: {e}")))?;
    pool.install(|| execute(cfg))
}

/// Hash of everything that determines the results (seed and experiment).
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    json_hash(&json!({ "schema_version": cfg.schema_version, "seed": cfg.seed, "experiment": cfg.experiment }))
}

fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Runs `cfg` and writes `report.json`, `config.resolved.json`, the CSV
/// files and `MANIFEST` into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunReport> {
    let report = execute_with_workers(cfg)?;
    write_artifacts(cfg, &report, out)?;
    Ok(report)
}

pub fn write_artifacts(cfg: &ExperimentConfig, report: &RunReport, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    let mut files = emit_plotdata(report, out)?;
    fs::write(out.join("report.json"), serde_json::to_string_pretty(report)? + "\n")?;
    let mut resolved = cfg.clone();
    resolved.out = Some(out.to_path_buf());
    fs::write(out.join("config.resolved.json"), serde_json::to_string_pretty(&resolved)? + "\n")?;
    files.push("report.json".into());
    files.push("config.resolved.json".into());
    files.sort();
    let mut digests = BTreeMap::new();
    for f in &files {
        digests.insert(f.clone(), sha256_file(&out.join(f))?);
    }
    let manifest = json!({
        "schema_version": cfg.schema_version,
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "workers": cfg.workers,
        "versions": { "orthofield": VERSION },
        "files": digests,
    });
    fs::write(out.join("MANIFEST"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

pub const GOLDEN_ATOL: f64 = 1e-12;
pub const GOLDEN_RTOL: f64 = 1e-9;

/// Compares two JSON trees; numbers within `atol + rtol·|expected|`.
/// Returns the first mismatching path.
pub fn compare_json(actual: &Value, expected: &Value, path: &str) -> Option<String> {
    match (actual, expected) {
        (Value::Number(a), Value::Number(e)) => {
            let (a, e) = (a.as_f64().unwrap_or(f64::NAN), e.as_f64().unwrap_or(f64::NAN));
            if (a - e).abs() <= GOLDEN_ATOL + GOLDEN_RTOL * e.abs() {
                None
            } else {
                Some(format!("{path}: {a:?} != {e:?}"))
            }
        }
        (Value::Array(a), Value::Array(e)) => {
            if a.len() != e.len() {
                return Some(format!("{path}: length {} != {}", a.len(), e.len()));
            }
            a.iter().zip(e).enumerate().find_map(|(i, (x, y))| compare_json(x, y, &format!("{path}[{i}]")))
        }
        (Value::Object(a), Value::Object(e)) => {
            for k in a.keys().chain(e.keys()) {
                match (a.get(k), e.get(k)) {
                    (Some(x), Some(y)) => {
                        if let Some(m) = compare_json(x, y, &format!("{path}.{k}")) {
                            return Some(m);
                        }
                    }
                    _ => return Some(format!("{path}.{k}: present on one side only")),
                }
            }
            None
        }
        _ if actual == expected => None,
        _ => Some(format!("{path}: {actual} != {expected}")),
    }
}

/// Golden comparison of a report against a stored `report.json`, ignoring
/// the version string.
pub fn check_golden(report: &RunReport, golden: &Path) -> Result<Option<String>> {
    let expected: Value = serde_json::from_str(&fs::read_to_string(golden)?)?;
    let mut actual = serde_json::to_value(report)?;
    let mut expected = expected;
    for v in [&mut actual, &mut expected] {
        if let Some(o) = v.as_object_mut() {
            o.remove("version");
        }
    }
    Ok(compare_json(&actual, &expected, "report"))
}
