//! The subcommands. Each returns the artifacts to write and a short
//! summary; nothing here touches the file system except reading inputs.

use std::path::PathBuf;

use anyhow::Context;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use roundclique::bounds::closed_form_bound;
use roundclique::certopt::{solve_table1, verify_lemma_c1, Table1Options, VerifyConfig, VerifyStatus};
use roundclique::cliquealg::{run_algorithm, Variant};
use roundclique::matchdecomp::{check_free_edge_lemmas, check_unmatched_edges, LemmaCheck, RoundLabeledClique};
use roundclique::oracle::TranscriptLog;
use roundclique::{EdgeKey, QueryOracle, Schedule, SimpleGraph};
use serde::Serialize;

use crate::config::*;
use crate::report::{json_report, svg_chart, Csv, Series};

pub struct Outcome {
    pub artifacts: Vec<(PathBuf, String)>,
    pub summary: Vec<String>,
    /// Set when the run completed but something it checks did not hold.
    pub failure: Option<String>,
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

struct SimRow {
    variant: Variant,
    seed: u64,
    clique_size: usize,
    target_size: f64,
    success: bool,
    queries: Vec<u64>,
    audit_ok: bool,
}

fn simulate_one(variant: Variant, n: u64, delta: f64, seed: u64) -> anyhow::Result<SimRow> {
    let oracle = QueryOracle::new(n, seed)?;
    let r = run_algorithm(variant, &oracle, delta).with_context(|| format!("{variant} seed {seed}"))?;
    let audit_ok = r.clique_verified() && r.budgets_respected() && r.transcript.audit(Some(&oracle)).ok();
    Ok(SimRow {
        variant,
        seed,
        clique_size: r.clique.len(),
        target_size: r.target_size,
        success: r.success,
        queries: r.queries_per_round,
        audit_ok,
    })
}

pub fn simulate(a: &SimulateArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    a.validate()?;
    let jobs: Vec<(Variant, u64)> =
        a.variant.iter().flat_map(|&v| (0..a.seeds).map(move |i| (v, a.base_seed.wrapping_add(i)))).collect();
    let rows: Vec<SimRow> =
        jobs.par_iter().map(|&(v, s)| simulate_one(v, a.n, a.delta, s)).collect::<anyhow::Result<_>>()?;

    let mut csv = Csv::new(
        cfg,
        &["variant", "n", "delta", "seed", "clique_size", "target_size", "success", "queries_r1", "queries_r2", "queries_r3"],
    );
    for r in &rows {
        let q = |i: usize| r.queries.get(i).map(|x| x.to_string()).unwrap_or_default();
        csv.row(&[
            r.variant.to_string(),
            a.n.to_string(),
            a.delta.to_string(),
            r.seed.to_string(),
            r.clique_size.to_string(),
            r.target_size.to_string(),
            r.success.to_string(),
            q(0),
            q(1),
            q(2),
        ]);
    }

    let mut summary = Vec::new();
    for v in &a.variant {
        let sizes: Vec<f64> = rows.iter().filter(|r| r.variant == *v).map(|r| r.clique_size as f64).collect();
        let ok = rows.iter().filter(|r| r.variant == *v && r.success).count();
        match median(&sizes) {
            Some(m) => summary.push(format!("{v}: {} runs, median clique size {m}, target met {ok}/{}", sizes.len(), sizes.len())),
            None => summary.push(format!("{v}: 0 runs")),
        }
    }
    let bad: Vec<String> = rows.iter().filter(|r| !r.audit_ok).map(|r| format!("{} seed {}", r.variant, r.seed)).collect();
    let failure = (!bad.is_empty()).then(|| format!("transcript audit failed for {}", bad.join(", ")));
    Ok(Outcome { artifacts: vec![(output_path(&a.out, "simulate.csv"), csv.into_string())], summary, failure })
}

pub fn bounds(a: &BoundsArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let deltas = a.deltas()?;
    let kinds = a.kinds();
    let mut csv = Csv::new(cfg, &["delta", "kind", "alpha"]);
    let mut series: Vec<Series> = kinds
        .iter()
        .map(|k| Series {
            name: if k.needs_rounds() { format!("{k} (l={})", a.rounds) } else { k.to_string() },
            points: Vec::new(),
        })
        .collect();
    for &d in &deltas {
        for (k, s) in kinds.iter().zip(series.iter_mut()) {
            if !k.plotted_at(d) {
                continue;
            }
            let l = k.needs_rounds().then_some(a.rounds);
            let v = closed_form_bound(*k, d, l).with_context(|| format!("{k} at delta = {d}"))?;
            csv.row(&[d.to_string(), k.to_string(), v.to_string()]);
            s.points.push((d, v));
        }
    }
    let mut artifacts = vec![(output_path(&a.out, "bounds.csv"), csv.into_string())];
    if let Some(p) = &a.plot {
        artifacts.push((p.clone(), svg_chart(cfg, "Upper and lower bounds on the clique exponent", &series)));
    }
    let summary = vec![format!("bounds: {} deltas x {} kinds", deltas.len(), kinds.len())];
    Ok(Outcome { artifacts, summary, failure: None })
}

fn random_graph(n: usize, seed: u64) -> anyhow::Result<SimpleGraph> {
    let o = QueryOracle::new(n as u64, seed)?;
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            let e = EdgeKey::ordered(u, v);
            if o.answer(e) {
                edges.push(e);
            }
        }
    }
    Ok(SimpleGraph::from_edges(n, edges))
}

struct Instance {
    k: usize,
    l: u8,
    checks: Vec<LemmaCheck>,
}

pub fn verify(a: &VerifyArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    a.validate()?;
    let graphs = matches!(a.battery, Battery::Unmatched | Battery::All);
    let labeled = matches!(a.battery, Battery::FreeEdges | Battery::All);
    let mut jobs: Vec<(bool, u64)> = Vec::new();
    if graphs {
        jobs.extend((0..a.instances).map(|i| (true, i)));
    }
    if labeled {
        jobs.extend((0..a.instances).map(|i| (false, i)));
    }
    let instances: Vec<Instance> = jobs
        .par_iter()
        .map(|&(graph, i)| -> anyhow::Result<Instance> {
            let seed = a.seed.wrapping_add(i);
            if graph {
                let g = random_graph(a.graph_n, seed)?;
                Ok(Instance { k: a.graph_n, l: 0, checks: vec![check_unmatched_edges(&g)?] })
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(1);
                let c = RoundLabeledClique::random(a.k, 3, &mut rng);
                Ok(Instance { k: a.k, l: 3, checks: check_free_edge_lemmas(&c, a.slack_c)? })
            }
        })
        .collect::<anyhow::Result<_>>()?;

    let mut csv = Csv::new(cfg, &["instance_id", "k", "l", "lemma", "holds", "measured_value", "bound_value", "slack_used"]);
    let mut totals: Vec<(String, usize, usize)> = Vec::new();
    for (id, inst) in instances.iter().enumerate() {
        for c in &inst.checks {
            csv.row(&[
                id.to_string(),
                inst.k.to_string(),
                inst.l.to_string(),
                c.lemma.to_string(),
                c.holds.to_string(),
                c.measured.to_string(),
                c.bound.to_string(),
                c.slack.to_string(),
            ]);
            let name = c.lemma.to_string();
            match totals.iter_mut().find(|t| t.0 == name) {
                Some(t) => {
                    t.1 += 1;
                    t.2 += !c.holds as usize;
                }
                None => totals.push((name, 1, !c.holds as usize)),
            }
        }
    }
    let failed: usize = totals.iter().map(|t| t.2).sum();
    let mut summary: Vec<String> = totals.iter().map(|(n, c, f)| format!("{n}: {} of {c} hold", c - f)).collect();
    summary.push(format!("verify: {} instances, {failed} failed checks", instances.len()));
    let failure = (failed > 0).then(|| format!("{failed} lemma checks failed"));
    Ok(Outcome { artifacts: vec![(output_path(&a.out, "verify.csv"), csv.into_string())], summary, failure })
}

pub fn optimize(a: &OptimizeArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    a.validate()?;
    let mut vc = VerifyConfig::desk(a.slack);
    if let Some(e) = a.eps_target {
        vc.eps_target = e;
    }
    vc.eps0 = a.eps0;
    vc.audit_samples = a.audit_samples;
    vc.audit_seed = a.audit_seed;
    vc.probe_deltas = a.probe_deltas.clone();
    vc.probe_edge = a.probe_edge;
    let (report, p1) = verify_lemma_c1(&vc)?;

    let mut csv = Csv::new(cfg, &["level", "i0", "i1", "i2", "i3", "s1", "s2", "d2", "delta"]);
    for (c, y) in p1.survivors.iter().zip(&report.survivor_centers) {
        let mut row: Vec<String> = vec![c.level.to_string()];
        row.extend(c.ix.iter().map(|i| i.to_string()));
        row.extend(y.iter().map(|x| x.to_string()));
        csv.row(&row);
    }
    let s = &report.phase1;
    let summary = vec![
        format!("status: {:?}", report.status),
        format!(
            "phase 1: {} boxes evaluated, {} pruned, {} eliminated, {} survivors",
            s.evaluated,
            s.pruned_infeasible,
            s.eliminated_by_alpha2 + s.eliminated_by_alpha3,
            s.survivors
        ),
        format!(
            "phase 2: {} runs on a locus, {} with no feasible point, {} off locus, {} not converged",
            report.phase2_summary.on_locus,
            report.phase2_summary.no_feasible_point,
            report.phase2_summary.off_locus,
            report.phase2_summary.not_converged
        ),
        format!(
            "probes: {} of {} on a locus",
            report.probe_summary.on_locus,
            report.probes.len()
        ),
        format!("audit: {} samples, {} violations", report.audit.samples, report.audit.violations),
    ];
    let failure = (report.status != VerifyStatus::Certified).then(|| "certificate incomplete".to_string());
    let artifacts = vec![
        (output_path(&a.out, "optimize.json"), json_report(cfg, &report)?),
        (output_path(&a.survivors, "optimize_survivors.csv"), csv.into_string()),
    ];
    Ok(Outcome { artifacts, summary, failure })
}

pub fn table1(a: &Table1Args, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let deltas = a.deltas()?;
    let opt = Table1Options { net_eps: a.net_eps, enforce_cap: a.enforce_cap, refine_top: a.refine_top };
    let results = deltas.iter().map(|&d| solve_table1(d, &opt)).collect::<Result<Vec<_>, _>>()?;
    let mut csv = Csv::new(cfg, &["delta", "alpha_bound", "starts", "best_point"]);
    let mut summary = Vec::new();
    for r in &results {
        let p: Vec<String> = r.best_point.iter().map(|x| x.to_string()).collect();
        csv.row(&[r.delta.to_string(), r.alpha_bound.to_string(), r.starts.to_string(), p.join(";")]);
        summary.push(format!("delta {:.3}: alpha <= {:.6} ({} starts, {} converged)", r.delta, r.alpha_bound, r.starts, r.converged));
    }
    let mut artifacts = vec![(output_path(&a.out, "table1.csv"), csv.into_string())];
    if let Some(p) = &a.json {
        artifacts.push((p.clone(), json_report(cfg, &results)?));
    }
    Ok(Outcome { artifacts, summary, failure: None })
}

#[derive(Serialize)]
struct DumpInfo<'a> {
    variant: Variant,
    n: u64,
    delta: f64,
    seed: u64,
    clique: &'a [u32],
    queries_per_round: &'a [u64],
    budgets: &'a [u64],
    audit: roundclique::oracle::TranscriptAudit,
}

pub fn transcript(a: &TranscriptArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    a.validate()?;
    match a.action {
        TranscriptAction::Dump => {
            let oracle = QueryOracle::new(a.n, a.seed)?;
            let r = run_algorithm(a.variant, &oracle, a.delta)?;
            let audit = r.transcript.audit(Some(&oracle));
            let ok = audit.ok() && r.clique_verified();
            let info = DumpInfo {
                variant: a.variant,
                n: a.n,
                delta: a.delta,
                seed: a.seed,
                clique: &r.clique,
                queries_per_round: &r.queries_per_round,
                budgets: &r.budgets,
                audit,
            };
            let path = output_path(&a.out, "transcript.txt");
            let mut meta = path.clone().into_os_string();
            meta.push(".meta.json");
            let summary = vec![format!(
                "{}: {} rounds, queries {:?}, clique size {}",
                a.variant,
                r.queries_per_round.len(),
                r.queries_per_round,
                r.clique.len()
            )];
            Ok(Outcome {
                artifacts: vec![(path, r.transcript.to_text()), (PathBuf::from(meta), json_report(cfg, &info)?)],
                summary,
                failure: (!ok).then(|| "transcript audit failed".to_string()),
            })
        }
        TranscriptAction::Audit => {
            let input = a.input.as_ref().expect("validated");
            let text = std::fs::read_to_string(input).with_context(|| format!("cannot read {}", input.display()))?;
            let log = TranscriptLog::from_text(&text).with_context(|| format!("{}", input.display()))?;
            let schedule = Schedule::new(log.n, &a.variant.exponents(log.n, a.delta))?;
            let oracle = QueryOracle::new(log.n, log.seed)?;
            let audit = log.audit(schedule.budgets(), Some(&oracle));
            let mut summary = vec![format!(
                "{}: n {} seed {}, {} rounds, budgets ok {}, consistent {}, oracle agrees {:?}",
                input.display(),
                log.n,
                log.seed,
                log.rounds.len(),
                audit.budgets_ok,
                audit.consistent,
                audit.oracle_agrees
            )];
            summary.extend(audit.problems.iter().take(20).cloned());
            let failure = (!audit.ok()).then(|| "transcript audit failed".to_string());
            let artifacts = match &a.out {
                Some(p) => vec![(p.clone(), json_report(cfg, &audit)?)],
                None => Vec::new(),
            };
            Ok(Outcome { artifacts, summary, failure })
        }
    }
}
