//! Subcommand implementations, generic over the numeric backend.

use std::fmt;

use editwalk_core::edits::Edit;
use editwalk_core::export::{self, Provenance, TvRow};
use editwalk_core::hostgraph::EdgeSet;
use editwalk_core::lattice::SpectrumReport;
use editwalk_core::process::{
    intersection_weights, moran_weights, presets, simple_edit_weights, simulate_chains, IntersectionMode,
    IntersectionModel,
};
use editwalk_core::spectral::{
    brown_bound, build_chain, commute_time_linear, commute_time_simple, compound_spectrum, eigenvalues_simple,
    intersection_mixing_bound, intersection_stationary, mixing_bound_compound, mixing_bound_simple,
    moran_complete_mixing_bound, moran_mixing_bound, recurrent_class, simple_tv_bound, stationary_closed_form,
    stationary_solve, tv_decay, Restrict, TransitionMatrix, DEFAULT_STATE_CAP,
};
use editwalk_core::verify::{verify_compound, verify_simple};
use editwalk_core::{Error, HostGraph, Scalar, WeightedEdits};
use serde::Serialize;

use crate::config::{Format, ModelKind, ModelSpec, OneOrMany, Record, RunConfig, StateSpec};
use crate::output::{BoundRow, ChainSummary, CommuteRow, OutDir, SimulationSummary, Snapshot, StateRow};

/// Longest TV curve the mixing command computes.
const MAX_TV_STEPS: usize = 100_000;
/// Pairs emitted by `commute` when none are configured, at most.
const AUTO_PAIR_STATES: usize = 64;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Cap(String),
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Cap(_) => 2,
            CliError::VerifyFailed(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::VerifyFailed(m) => f.write_str(m),
            CliError::Cap(m) => write!(
                f,
                "{m}; raise --cap-states (values above {DEFAULT_STATE_CAP} also need --override-caps)"
            ),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } | Error::ClosureTooLarge { .. } => CliError::Cap(e.to_string()),
            e => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// A configured process, ready to run.
pub struct Model<S: Scalar> {
    pub kind: ModelKind,
    pub host: HostGraph,
    pub dist: WeightedEdits<S>,
    /// Edge probabilities of the simple process.
    pub p: Option<Vec<S>>,
    pub intersection: Option<IntersectionModel<S>>,
}

fn num<S: Scalar>(n: &crate::config::Num, what: &str) -> Result<S> {
    S::parse(&n.text()).map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

pub fn build_model<S: Scalar>(cfg: &RunConfig) -> Result<Model<S>> {
    let host = match &cfg.host {
        Some(spec) => Some(spec.build().map_err(|e| CliError::Validation(format!("host: {e}")))?),
        None => None,
    };
    let kind = cfg.model.kind();
    match &cfg.model {
        ModelSpec::Simple(params) => {
            let host = host.expect("validated");
            let m = host.edge_count();
            let p: Vec<S> = if let Some(p) = &params.p {
                match p {
                    OneOrMany::One(x) => vec![num(x, "params.p")?; m],
                    OneOrMany::Many(xs) => {
                        if xs.len() != m {
                            return Err(CliError::Validation(format!(
                                "params.p has {} entries but the host has {m} edges",
                                xs.len()
                            )));
                        }
                        xs.iter().map(|x| num(x, "params.p")).collect::<Result<_>>()?
                    }
                }
            } else if let Some(degrees) = &params.degrees {
                let d: Vec<S> = degrees.iter().map(|x| num(x, "params.degrees")).collect::<Result<_>>()?;
                presets::chung_lu(&host, &d)?
            } else {
                let b = params.blocks.as_ref().expect("validated");
                presets::stochastic_block(&host, &b.first, num(&b.p, "params.blocks.p")?, num(&b.q, "params.blocks.q")?)?
            };
            let dist = simple_edit_weights(&host, &p)?;
            Ok(Model { kind, host, dist, p: Some(p), intersection: None })
        }
        ModelSpec::Moran => {
            let host = host.expect("validated");
            let dist = moran_weights(&host)?;
            Ok(Model { kind, host, dist, p: None, intersection: None })
        }
        ModelSpec::Intersection(params) => {
            let mu: Vec<S> = params.mu.iter().map(|x| num(x, "params.mu")).collect::<Result<_>>()?;
            let mode = if params.lazy { IntersectionMode::Lazy } else { IntersectionMode::Explicit };
            let (host, dist) = intersection_weights(params.n, params.attributes, mu.clone(), mode, cfg.cap)?;
            let model = IntersectionModel { ground: params.n, attributes: params.attributes, mu };
            Ok(Model { kind, host, dist, p: None, intersection: Some(model) })
        }
        ModelSpec::Custom(params) => {
            let host = host.expect("validated");
            let m = host.edge_count();
            let items = params
                .edits
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let edit = Edit::parse(m, &e.edit).map_err(|err| CliError::Validation(format!("params.edits[{i}]: {err}")))?;
                    Ok((edit, num(&e.weight, &format!("params.edits[{i}].weight"))?))
                })
                .collect::<Result<Vec<_>>>()?;
            let dist = WeightedEdits::custom(m, items)?;
            Ok(Model { kind, host, dist, p: None, intersection: None })
        }
    }
}

fn resolve_state(spec: &StateSpec, host: &HostGraph) -> Result<EdgeSet> {
    let m = host.edge_count();
    let set = match spec {
        StateSpec::Named(s) if s == "empty" => EdgeSet::empty(m),
        StateSpec::Named(s) if s == "full" => EdgeSet::full(m),
        StateSpec::Named(s) => EdgeSet::from_hex(m, s)?,
        StateSpec::Indices(idx) => EdgeSet::from_indices(m, idx.iter().copied())?,
    };
    Ok(set)
}

fn initial_state(cfg: &RunConfig, host: &HostGraph) -> Result<EdgeSet> {
    match &cfg.initial {
        Some(spec) => resolve_state(spec, host).map_err(|e| CliError::Validation(format!("initial: {e}"))),
        None => Ok(host.empty_set()),
    }
}

fn warn(warnings: &mut Vec<String>, message: String) {
    eprintln!("warning: {message}");
    warnings.push(message);
}

fn warn_frozen<S: Scalar>(report: &SpectrumReport<S>, host: &HostGraph, warnings: &mut Vec<String>) {
    if !report.frozen.is_empty() {
        warn(
            warnings,
            format!("edges {} are in no generator support and stay at their initial value", host.describe(&report.frozen)),
        );
    }
}

fn simple_states<S: Scalar>(model: &Model<S>, cap: usize) -> Result<usize> {
    let m = model.host.edge_count();
    if m >= 64 || (1u128 << m) > cap as u128 {
        return Err(Error::CapExceeded { what: "states", needed: 1u128.checked_shl(m as u32).unwrap_or(u128::MAX), cap: cap as u128 }.into());
    }
    Ok(1 << m)
}

/// Chain on the states the analysis runs over: every state for the simple
/// process, the recurrent class otherwise.
fn chain_for<S: Scalar>(model: &Model<S>, cap: usize) -> Result<TransitionMatrix<S>> {
    let restrict = if model.kind == ModelKind::Simple { Restrict::All } else { Restrict::Recurrent };
    Ok(build_chain(&model.dist, restrict, cap)?)
}

fn stationary_on<S: Scalar>(model: &Model<S>, chain: &TransitionMatrix<S>) -> Result<Vec<S>> {
    let full = match (&model.p, &model.intersection) {
        (Some(p), _) => stationary_closed_form(p)?,
        (None, Some(im)) => intersection_stationary(im)?,
        (None, None) => return Ok(stationary_solve(chain)?),
    };
    Ok(chain.states().iter().map(|&s| full[s as usize].clone()).collect())
}

fn spectrum_report<S: Scalar>(model: &Model<S>, cap: usize, warnings: &mut Vec<String>) -> Result<SpectrumReport<S>> {
    let report = if model.kind == ModelKind::Simple {
        simple_states(model, cap)?;
        eigenvalues_simple(model.host.edge_count())?
    } else {
        compound_spectrum(&model.dist, cap)?.2
    };
    warn_frozen(&report, &model.host, warnings);
    Ok(report)
}

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub out: OutDir,
}

impl Ctx<'_> {
    fn provenance(&self, host: &HostGraph) -> Provenance {
        Provenance::new(host, Some(self.cfg.seed), self.cfg.mode.name())
    }

    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.cfg.format.unwrap_or(default);
        if !allowed.contains(&f) {
            return Err(CliError::Validation(format!("format {f:?} is not available for this command")));
        }
        Ok(f)
    }
}

pub fn simulate<S: Scalar>(ctx: &Ctx, model: &Model<S>) -> Result<()> {
    let cfg = ctx.cfg;
    let host = &model.host;
    let initial = initial_state(cfg, host)?;
    let mut warnings = Vec::new();
    if model.kind != ModelKind::Simple && host.edge_count() < 64 {
        // skip the check silently when the class is too large to enumerate
        if let Ok(class) = recurrent_class(&model.dist, &initial, cfg.cap) {
            if !class.contains(initial.mask()) {
                warn(&mut warnings, "initial state is outside the recurrent class; mixing bounds apply from its first entrance".into());
            }
        }
    }
    let runs = simulate_chains(&model.dist, &initial, cfg.steps, cfg.seed, cfg.chains, cfg.thin)?;
    let prov = ctx.provenance(host);
    let moran = model.kind == ModelKind::Moran;
    let mut chains = Vec::with_capacity(runs.len());
    for (i, run) in runs.iter().enumerate() {
        if cfg.steps > 0 {
            let name = if runs.len() == 1 { "trajectory.jsonl".to_string() } else { format!("trajectory-{i}.jsonl") };
            let mut w = ctx.out.file(&name)?;
            for (t, s) in &run.snapshots {
                let pairs = (cfg.record == Record::Edges).then(|| host.edge_pairs(s));
                let line = Snapshot { t: *t, state: s.to_hex(), edge_count: s.len(), edges: pairs.as_deref() };
                serde_json::to_writer(&mut w, &line).map_err(|e| CliError::Validation(e.to_string()))?;
                std::io::Write::write_all(&mut w, b"\n")?;
            }
            std::io::Write::flush(&mut w)?;
        }
        let acyclic: Option<Vec<bool>> = moran.then(|| run.snapshots.iter().map(|(_, s)| host.is_forest(s)).collect());
        let acyclic_from = acyclic.as_ref().and_then(|flags| {
            let settled = flags.iter().rposition(|&a| !a).map_or(0, |k| k + 1);
            run.snapshots.get(settled).map(|(t, _)| *t)
        });
        chains.push(ChainSummary {
            chain: i as u64,
            final_state: run.final_state.to_hex(),
            final_edge_count: run.final_state.len(),
            edge_counts: run.snapshots.iter().map(|(t, s)| (*t, s.len())).collect(),
            acyclic,
            acyclic_from,
        });
    }
    let summary = SimulationSummary {
        provenance: prov,
        model: format!("{:?}", model.kind).to_lowercase(),
        steps: cfg.steps,
        thin: cfg.thin,
        initial: initial.to_hex(),
        chains,
        warnings,
    };
    ctx.out.json("summary.json", &summary)
}

pub fn spectrum<S: Scalar>(ctx: &Ctx, model: &Model<S>) -> Result<()> {
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let report = spectrum_report(model, ctx.cfg.cap, &mut Vec::new())?;
    let prov = ctx.provenance(&model.host);
    match format {
        Format::Json => {
            let mut w = ctx.out.file("spectrum.json")?;
            export::write_spectrum_json(&mut w, &report, &prov)?;
            std::io::Write::flush(&mut w)?;
        }
        _ => {
            export::write_spectrum_csv(ctx.out.file("spectrum.csv")?, &report, &prov)?;
            export::write_eigenvalues_csv(ctx.out.file("eigenvalues.csv")?, &report, &prov)?;
        }
    }
    println!("{} eigenvalue entries, total multiplicity {}", report.entries.len(), report.total_dimension());
    Ok(())
}

pub fn stationary<S: Scalar>(ctx: &Ctx, model: &Model<S>) -> Result<()> {
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let cap = ctx.cfg.cap;
    let (states, values): (Vec<u64>, Vec<S>) = match (&model.p, &model.intersection) {
        (Some(p), _) => {
            let n = simple_states(model, cap)?;
            ((0..n as u64).collect(), stationary_closed_form(p)?)
        }
        (None, Some(im)) => {
            let n = simple_states(model, cap)?;
            ((0..n as u64).collect(), intersection_stationary(im)?)
        }
        (None, None) => {
            let chain = chain_for(model, cap)?;
            let pi = stationary_solve(&chain)?;
            (chain.states().to_vec(), pi)
        }
    };
    let prov = ctx.provenance(&model.host);
    match format {
        Format::Json => {
            let m = model.host.edge_count();
            let rows = states
                .iter()
                .zip(&values)
                .map(|(&s, v)| {
                    let set = EdgeSet::from_mask(m, s)?;
                    Ok(StateRow { state: set.to_hex(), edges: model.host.describe(&set), probability: v.to_string(), probability_f64: v.to_f64() })
                })
                .collect::<std::result::Result<Vec<_>, Error>>()?;
            ctx.out.json("stationary.json", &Tagged { provenance: prov, rows })
        }
        _ => Ok(export::write_distribution_csv(ctx.out.file("stationary.csv")?, &model.host, &states, &values, &prov)?),
    }
}

#[derive(Serialize)]
struct Tagged<T> {
    provenance: Provenance,
    rows: T,
}

#[derive(Serialize)]
struct MixingJson<'a> {
    provenance: Provenance,
    lambda_star: Option<f64>,
    chambers: Option<u64>,
    bounds: &'a [BoundRow],
    tv_start: Option<String>,
    tv: &'a [TvRow],
    warnings: &'a [String],
}

pub fn mixing<S: Scalar>(ctx: &Ctx, model: &Model<S>) -> Result<()> {
    let cfg = ctx.cfg;
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let host = &model.host;
    let m = host.edge_count();
    let mut warnings = Vec::new();
    let mut bounds = Vec::new();
    let report = spectrum_report(model, cfg.cap, &mut warnings);
    let (lambda_star, chambers) = match (&report, model.kind) {
        (_, ModelKind::Simple) => (None, None),
        (Ok(r), _) => (r.lambda_star().map(|l| l.to_f64()), Some(r.chambers)),
        (Err(_), _) => (None, None),
    };
    for &c in &cfg.cs {
        match model.kind {
            ModelKind::Simple => bounds.push(BoundRow { bound: "simple", c, t: mixing_bound_simple(m, c)? as f64 }),
            _ => {
                if let Some(ls) = lambda_star {
                    bounds.push(BoundRow { bound: "compound", c, t: mixing_bound_compound(ls, m, c, None)? as f64 });
                    bounds.push(BoundRow { bound: "compound_chambers", c, t: mixing_bound_compound(ls, m, c, chambers)? as f64 });
                }
            }
        }
        match model.kind {
            ModelKind::Moran => {
                bounds.push(BoundRow { bound: "moran", c, t: moran_mixing_bound(m, host.min_degree(), c)? });
                let n = host.vertex_count();
                if m == n * (n - 1) / 2 {
                    bounds.push(BoundRow { bound: "moran_complete", c, t: moran_complete_mixing_bound(n, c)? });
                }
            }
            ModelKind::Intersection => {
                let im = model.intersection.as_ref().expect("intersection model");
                bounds.push(BoundRow { bound: "intersection", c, t: intersection_mixing_bound(im.ground, im.attributes, c)? });
            }
            _ => {}
        }
    }
    // a lattice beyond the caps still leaves the family-specific bounds
    let report = match report {
        Ok(r) => Some(r),
        Err(CliError::Cap(msg)) if !bounds.is_empty() => {
            warn(&mut warnings, format!("spectrum skipped: {msg}"));
            None
        }
        Err(e) => return Err(e),
    };

    let mut tv_rows = Vec::new();
    let mut tv_start = None;
    if let Some(report) = &report {
        match tv_curve(ctx, model, report, &bounds, lambda_star, chambers, &mut warnings) {
            Ok((start, rows)) => {
                tv_start = Some(start);
                tv_rows = rows;
            }
            Err(CliError::Cap(msg)) => warn(&mut warnings, format!("TV curve skipped: {msg}")),
            Err(e) => return Err(e),
        }
    }

    let prov = ctx.provenance(host);
    match format {
        Format::Json => ctx.out.json(
            "mixing.json",
            &MixingJson { provenance: prov, lambda_star, chambers, bounds: &bounds, tv_start, tv: &tv_rows, warnings: &warnings },
        )?,
        _ => {
            let mut w = ctx.out.file("mixing.csv")?;
            std::io::Write::write_all(&mut w, prov.header().as_bytes())?;
            let mut csv = csv::Writer::from_writer(w);
            for b in &bounds {
                csv.serialize(b).map_err(csv_err)?;
            }
            csv.flush()?;
            if !tv_rows.is_empty() {
                export::write_tv_csv(ctx.out.file("tv.csv")?, &tv_rows, &prov)?;
            }
        }
    }
    for b in &bounds {
        println!("{} bound at c={}: t = {}", b.bound, b.c, b.t);
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Validation(e.to_string())
}

fn tv_curve<S: Scalar>(
    ctx: &Ctx,
    model: &Model<S>,
    report: &SpectrumReport<S>,
    bounds: &[BoundRow],
    lambda_star: Option<f64>,
    chambers: Option<u64>,
    warnings: &mut Vec<String>,
) -> Result<(String, Vec<TvRow>)> {
    let cfg = ctx.cfg;
    let m = model.host.edge_count();
    let chain = chain_for(model, cfg.cap)?;
    let pi = stationary_on(model, &chain)?;
    let mut start = initial_state(cfg, &model.host)?;
    if chain.index_of(start.mask()).is_none() {
        // every generator applied once lands in the recurrent class
        for (edit, _) in model.dist.explicit_items(cfg.cap)?.iter() {
            edit.apply_in_place(&mut start);
        }
        warn(warnings, format!("initial state is outside the recurrent class; TV curve starts from {}", start.to_hex()));
    }
    let idx = chain.index_of(start.mask()).ok_or_else(|| CliError::Validation("start state not in the chain".into()))?;
    let longest = bounds.iter().map(|b| b.t).fold(0.0, f64::max).ceil() as usize;
    let t_max = cfg.t_max.unwrap_or(longest.max(1)).min(MAX_TV_STEPS);
    let curve = tv_decay(&chain, idx, &pi, t_max)?;
    let mf = m as f64;
    let rows = curve
        .iter()
        .enumerate()
        .map(|(t, tv)| {
            let closed = match (model.kind, lambda_star, chambers) {
                (ModelKind::Simple, _, _) => (t as f64 >= 2.0 * mf * mf.ln()).then(|| simple_tv_bound(m, t)),
                (_, Some(ls), Some(count)) => Some(count as f64 * ls.powi(t as i32)),
                _ => None,
            };
            TvRow { t, tv: tv.to_f64(), brown_bound: Some(brown_bound(report, t)), closed_bound: closed }
        })
        .collect();
    Ok((start.to_hex(), rows))
}

pub fn commute<S: Scalar>(ctx: &Ctx, model: &Model<S>) -> Result<()> {
    let cfg = ctx.cfg;
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let host = &model.host;
    let m = host.edge_count();
    let chain = match &model.p {
        Some(_) => None,
        None => Some(chain_for(model, cfg.cap)?),
    };
    let pairs: Vec<(u64, u64)> = if cfg.pairs.is_empty() {
        let states: Vec<u64> = match &chain {
            Some(c) => c.states().to_vec(),
            None => (0..simple_states(model, cfg.cap)? as u64).collect(),
        };
        if states.len() > AUTO_PAIR_STATES {
            return Err(CliError::Validation(format!(
                "{} states; list the wanted `pairs` in the config",
                states.len()
            )));
        }
        states.iter().enumerate().flat_map(|(i, &a)| states[i + 1..].iter().map(move |&b| (a, b))).collect()
    } else {
        cfg.pairs
            .iter()
            .map(|[a, b]| {
                let a = resolve_state(a, host)?.try_mask()?;
                let b = resolve_state(b, host)?.try_mask()?;
                Ok((a, b))
            })
            .collect::<Result<_>>()?
    };
    let mut rows = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let value: S = match (&model.p, &chain) {
            (Some(p), _) => commute_time_simple(a, b, p)?,
            (None, Some(chain)) => {
                let index = |s: u64| {
                    chain
                        .index_of(s)
                        .ok_or_else(|| CliError::Validation(format!("state {:#x} is not in the recurrent class", s)))
                };
                commute_time_linear(chain, index(a)?, index(b)?)?
            }
            (None, None) => unreachable!(),
        };
        let hex = |s: u64| EdgeSet::from_mask(m, s).map(|e| e.to_hex());
        rows.push((hex(a)?, hex(b)?, value));
    }
    let prov = ctx.provenance(host);
    match format {
        Format::Json => {
            let rows: Vec<CommuteRow> = rows
                .into_iter()
                .map(|(from, to, v)| CommuteRow { from, to, commute_time: v.to_string(), commute_time_f64: v.to_f64() })
                .collect();
            ctx.out.json("commute.json", &Tagged { provenance: prov, rows })
        }
        _ => Ok(export::write_commute_csv(ctx.out.file("commute.csv")?, &rows, &prov)?),
    }
}

pub fn export_dot<S: Scalar>(ctx: &Ctx, model: &Model<S>) -> Result<()> {
    ctx.format(Format::Dot, &[Format::Dot])?;
    let chain = chain_for(model, ctx.cfg.cap)?;
    let dot = export::state_graph_dot(&chain, &model.host, &ctx.provenance(&model.host));
    ctx.out.text("state_graph.dot", &dot)?;
    println!("{} states", chain.len());
    Ok(())
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    provenance: Provenance,
    passed: bool,
    max_residual: f64,
    checks: &'a [editwalk_core::verify::Check],
}

pub fn verify<S: Scalar>(ctx: &Ctx, model: &Model<S>) -> Result<()> {
    let report = match &model.p {
        Some(p) => {
            simple_states(model, ctx.cfg.cap)?;
            verify_simple(&model.host, p)?
        }
        None => verify_compound(&model.dist, ctx.cfg.cap)?,
    };
    for c in &report.checks {
        println!(
            "{} {:<24} residual {:.3e} (tol {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.residual,
            c.tolerance
        );
    }
    ctx.out.json(
        "verify.json",
        &VerifyJson {
            provenance: ctx.provenance(&model.host),
            passed: report.passed(),
            max_residual: report.max_residual(),
            checks: &report.checks,
        },
    )?;
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::VerifyFailed(format!("failed checks: {}", names.join(", "))))
    }
}
