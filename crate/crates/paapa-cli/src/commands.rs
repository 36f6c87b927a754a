//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use paapa::io::{self, RunMetadata};
use paapa::replica::{merge_checkpoints, run_replicas_observed, with_worker_count};
use paapa::stats::{self, DegreeHistogram};
use paapa::theory;
use paapa::{AttachmentRule, ModelParams, Variant};

use crate::config::{ensure_out_dir, CommaList, Config};
use crate::{
    AssortativityArgs, CliError, CompareArgs, GrowArgs, ModelFlags, ProbdumpArgs, SweepArgs,
    TheoryArgs, TheoryCommand,
};

fn resolve_params(
    flags: &ModelFlags,
    config: &Config,
    default_replicas: u32,
) -> Result<ModelParams, CliError> {
    let m = config.require(flags.m, "m")?;
    let p = config.require(flags.p, "p")?;
    let horizon = config.require(flags.t, "t")?;
    let variant: String = config.resolve_or(flags.variant.clone(), "variant", "pa-apa".into())?;
    let variant: Variant = variant.parse()?;
    let seed = config.resolve_or(flags.seed, "seed", 0)?;
    let replicas = config.resolve_or(flags.replicas, "replicas", default_replicas)?;
    let params = ModelParams {
        m,
        p,
        variant,
        horizon,
        seed,
        replicas,
    };
    params.validate()?;
    Ok(params)
}

fn resolve_checkpoints(
    flag: Option<CommaList<u64>>,
    config: &Config,
    horizon: u64,
) -> Result<Vec<u64>, CliError> {
    let list = config.resolve(flag, "checkpoints")?.map(|l| l.0).unwrap_or_else(|| vec![horizon]);
    if list.is_empty() {
        return Err(CliError::Usage("checkpoints must not be empty".into()));
    }
    if list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage("checkpoints must be strictly increasing".into()));
    }
    if list[0] == 0 || *list.last().expect("nonempty") > horizon {
        return Err(CliError::Usage(format!("checkpoints must lie within 1..={horizon}")));
    }
    Ok(list)
}

fn maybe_pooled<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => with_worker_count(n, f),
        None => f(),
    }
}

pub fn grow(args: GrowArgs, config: &Config) -> Result<(), CliError> {
    let params = resolve_params(&args.model, config, 1)?;
    let checkpoints = resolve_checkpoints(args.checkpoints, config, params.horizon)?;
    let vertex = config.resolve_or(args.vertex, "vertex", 2)?;
    if vertex == 0 {
        return Err(CliError::Usage("vertex must be >= 1".into()));
    }
    let out = ensure_out_dir(&config.require(args.out, "out")?)?;
    let edge_list = config.resolve_bool(args.edge_list, "edge-list")?;
    let threads = config.resolve(args.threads, "threads")?;

    let runs = maybe_pooled(threads, || run_replicas_observed(&params, &checkpoints, vertex))?;
    let merged = merge_checkpoints(&runs);

    let base_meta = RunMetadata::for_params(&params);
    for slot in &merged {
        let path = out.join(format!("hist_t{}.csv", slot.time));
        io::write_histogram_csv(&path, &slot.histogram)?;
        io::write_metadata(&path, &base_meta.clone().with_checkpoint(slot.time))?;
    }

    let rows: Vec<(u64, f64, u64)> =
        merged.iter().map(|s| (s.time, s.mean_tracked_degree, s.replicas)).collect();
    let trajectory_path = out.join("trajectory.csv");
    io::write_trajectory_csv(&trajectory_path, &rows)?;
    io::write_metadata(
        &trajectory_path,
        &base_meta.clone().with_note(format!("mean degree of vertex {vertex} over replicas")),
    )?;

    if edge_list {
        for run in &runs {
            let path = out.join(format!("edges_r{}.csv", run.replica));
            io::write_edges_csv(&path, &run.state)?;
            io::write_metadata(&path, &base_meta.clone().with_replica(run.replica))?;
        }
    }
    io::write_json(&out.join("run.meta.json"), &base_meta)?;
    println!(
        "grow: {} replicas of T={} written to {}",
        params.replicas,
        params.horizon,
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SweepCell {
    p: f64,
    variant: String,
    r_mean: f64,
    r_per_seed: Vec<f64>,
    spread: f64,
    seeds: Vec<u64>,
}

fn sweep_cell(params: &ModelParams) -> Result<SweepCell, CliError> {
    let runs = run_replicas_observed(params, &[params.horizon], 1)?;
    let mut values = Vec::with_capacity(runs.len());
    let mut seeds = Vec::with_capacity(runs.len());
    for run in &runs {
        values.push(stats::assortativity_of(&run.state).map_err(|e| CliError::Compare(e.to_string()))?);
        seeds.push(run.seed);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let spread = values.iter().fold(0.0f64, |acc, v| acc.max((v - mean).abs()));
    Ok(SweepCell {
        p: params.p,
        variant: params.variant.to_string(),
        r_mean: mean,
        r_per_seed: values,
        spread,
        seeds,
    })
}

pub fn sweep(args: SweepArgs, config: &Config) -> Result<(), CliError> {
    // `variant` may also be `both` here (the default): one column per variant.
    let variant_str: String = config.resolve_or(args.model.variant.clone(), "variant", "both".into())?;
    let variants: Vec<Variant> = match variant_str.to_ascii_lowercase().as_str() {
        "both" => vec![Variant::PaApa2, Variant::PaApa],
        other => vec![other.parse::<Variant>()?],
    };
    let mut flags = args.model.clone();
    flags.variant = Some("pa-apa".into());
    // p comes from the list, one cell at a time.
    flags.p = Some(0.0);
    let base = resolve_params(&flags, config, 3)?;
    let p_list = config
        .resolve(args.p_list, "p-list")?
        .map(|l| l.0)
        .ok_or_else(|| CliError::Usage("missing required option `--p-list`".into()))?;
    if p_list.is_empty() {
        return Err(CliError::Usage("p-list must not be empty".into()));
    }
    let out = ensure_out_dir(&config.require(args.out, "out")?)?;
    let threads = config.resolve(args.threads, "threads")?;

    let mut cells: Vec<SweepCell> = Vec::new();
    let mut rows: Vec<(f64, Option<f64>, Option<f64>)> = Vec::new();
    for &p in &p_list {
        let mut row = (p, None, None);
        for &variant in &variants {
            let mut params = base.clone();
            params.p = p;
            params.variant = variant;
            params.validate()?;
            let cell = maybe_pooled(threads, || sweep_cell(&params))?;
            match variant {
                Variant::PaApa2 => row.1 = Some(cell.r_mean),
                Variant::PaApa => row.2 = Some(cell.r_mean),
            }
            println!("sweep: p={p} {} r={:.4} (spread {:.4})", variant, cell.r_mean, cell.spread);
            cells.push(cell);
        }
        rows.push(row);
    }
    let table_path = out.join("assortativity_sweep.csv");
    io::write_sweep_csv(&table_path, &rows)?;
    #[derive(Serialize)]
    struct SweepMetadata<'a> {
        model: &'static str,
        m: u32,
        #[serde(rename = "T")]
        horizon: u64,
        seed: u64,
        replicas: u32,
        toolkit_version: &'static str,
        rng: &'static str,
        seed_derivation: &'static str,
        cells: &'a [SweepCell],
    }
    io::write_metadata(
        &table_path,
        &SweepMetadata {
            model: "pa-apa",
            m: base.m,
            horizon: base.horizon,
            seed: base.seed,
            replicas: base.replicas,
            toolkit_version: io::TOOLKIT_VERSION,
            rng: paapa::seed::RNG_NAME,
            seed_derivation: paapa::seed::SEED_DERIVATION,
            cells: &cells,
        },
    )?;
    println!("sweep: table written to {}", table_path.display());
    Ok(())
}

#[derive(Serialize)]
struct TheoryMetadata {
    model: &'static str,
    evaluator: &'static str,
    m: u32,
    p: f64,
    variant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertex: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kmax: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncated_mass: Option<f64>,
    toolkit_version: &'static str,
}

fn theory_flags(
    args: &TheoryArgs,
    config: &Config,
    needs_t: bool,
) -> Result<(u32, f64, Option<u64>, Variant), CliError> {
    let m = config.require(args.model.m, "m")?;
    let p = config.require(args.model.p, "p")?;
    let t = if needs_t {
        Some(config.require(args.model.t, "t")?)
    } else {
        config.resolve(args.model.t, "t")?
    };
    let variant: String =
        config.resolve_or(args.model.variant.clone(), "variant", "pa-apa".into())?;
    Ok((m, p, t, variant.parse()?))
}

pub fn theory(command: TheoryCommand, config: &Config) -> Result<(), CliError> {
    match command {
        TheoryCommand::LimitLaw(args) => {
            let (m, p, _, variant) = theory_flags(&args, config, false)?;
            reject_variant2(variant, "limit-law")?;
            let kmax = config.resolve_or(args.kmax, "kmax", 500)?;
            let out = ensure_out_dir(&config.require(args.out, "out")?)?;
            let law = theory::limit_law_table(m, p, kmax)?;
            let path = out.join("limit_law.csv");
            io::write_law_csv(&path, "P_k", &law)?;
            io::write_metadata(
                &path,
                &TheoryMetadata {
                    model: "pa-apa",
                    evaluator: "limit-law",
                    m,
                    p,
                    variant: variant.to_string(),
                    t: None,
                    vertex: None,
                    kmax: Some(kmax),
                    truncated_mass: Some(law.truncated_mass),
                    toolkit_version: io::TOOLKIT_VERSION,
                },
            )?;
            println!("theory limit-law: {}", path.display());
        }
        TheoryCommand::ExpectedDegree(args) => {
            let (m, p, t, variant) = theory_flags(&args, config, true)?;
            reject_variant2(variant, "expected-degree")?;
            let t = t.expect("required");
            let vertex = config.resolve_or(args.vertex, "vertex", 2)?;
            let out = ensure_out_dir(&config.require(args.out, "out")?)?;
            let times = match config.resolve(args.checkpoints, "checkpoints")? {
                Some(list) => list.0,
                None => log_spaced_times(vertex, t),
            };
            let values = theory::expected_degree_trajectory(m, p, vertex, &times)?;
            let rows: Vec<(u64, f64)> = times.into_iter().zip(values).collect();
            let path = out.join("expected_degree.csv");
            io::write_expected_degree_csv(&path, &rows)?;
            io::write_metadata(
                &path,
                &TheoryMetadata {
                    model: "pa-apa",
                    evaluator: "expected-degree",
                    m,
                    p,
                    variant: variant.to_string(),
                    t: Some(t),
                    vertex: Some(vertex),
                    kmax: None,
                    truncated_mass: None,
                    toolkit_version: io::TOOLKIT_VERSION,
                },
            )?;
            println!("theory expected-degree: {}", path.display());
        }
        TheoryCommand::ExactLaw(args) => {
            let (m, p, t, variant) = theory_flags(&args, config, true)?;
            reject_variant2(variant, "exact-law")?;
            let t = t.expect("required");
            let vertex = config.resolve_or(args.vertex, "vertex", 2)?;
            let out = ensure_out_dir(&config.require(args.out, "out")?)?;
            let law = theory::degree_law_dp(m, p, vertex, t)?;
            let table = theory::TruncatedLaw {
                probs: law.iter().collect::<BTreeMap<u64, f64>>(),
                truncated_mass: 0.0,
            };
            let path = out.join("exact_law.csv");
            io::write_law_csv(&path, "prob", &table)?;
            io::write_metadata(
                &path,
                &TheoryMetadata {
                    model: "pa-apa",
                    evaluator: "exact-law",
                    m,
                    p,
                    variant: variant.to_string(),
                    t: Some(t),
                    vertex: Some(vertex),
                    kmax: None,
                    truncated_mass: None,
                    toolkit_version: io::TOOLKIT_VERSION,
                },
            )?;
            println!("theory exact-law: {}", path.display());
        }
        TheoryCommand::MixtureLaw(args) => {
            let (m, p, t, variant) = theory_flags(&args, config, true)?;
            reject_variant2(variant, "mixture-law")?;
            let t = t.expect("required");
            let kmax = config.resolve_or(args.kmax, "kmax", 500)?;
            let out = ensure_out_dir(&config.require(args.out, "out")?)?;
            let law = theory::mixture_pkt(m, p, t, kmax)?;
            let path = out.join("mixture_law.csv");
            io::write_law_csv(&path, "prob", &law)?;
            io::write_metadata(
                &path,
                &TheoryMetadata {
                    model: "pa-apa",
                    evaluator: "mixture-law",
                    m,
                    p,
                    variant: variant.to_string(),
                    t: Some(t),
                    vertex: None,
                    kmax: Some(kmax),
                    truncated_mass: Some(law.truncated_mass),
                    toolkit_version: io::TOOLKIT_VERSION,
                },
            )?;
            println!("theory mixture-law: {}", path.display());
        }
    }
    Ok(())
}

fn reject_variant2(variant: Variant, evaluator: &str) -> Result<(), CliError> {
    if variant == Variant::PaApa2 {
        return Err(CliError::Usage(format!(
            "theory {evaluator} requires variant pa-apa: the pa-apa-2 increment law depends on the random current maximum and has no exact finite-t evaluator"
        )));
    }
    Ok(())
}

fn log_spaced_times(start: u64, end: u64) -> Vec<u64> {
    let lo = start.max(1);
    if end <= lo {
        return vec![end.max(lo)];
    }
    let mut times: Vec<u64> = (0..=48)
        .map(|j| {
            let frac = j as f64 / 48.0;
            ((lo as f64).ln() + frac * ((end as f64).ln() - (lo as f64).ln())).exp().round() as u64
        })
        .collect();
    times.push(end);
    times.sort_unstable();
    times.dedup();
    times
}

#[derive(Serialize)]
struct Verdict {
    metric: &'static str,
    passed: Option<bool>,
    value: f64,
    threshold: f64,
    detail: String,
}

impl Verdict {
    fn line(&self) -> String {
        let status = match self.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        };
        format!("compare {}: {} ({})", self.metric, status, self.detail)
    }
}

pub fn compare(args: CompareArgs, config: &Config) -> Result<(), CliError> {
    let params = resolve_params(&args.model, config, 1)?;
    if params.variant == Variant::PaApa2 {
        return Err(CliError::Usage(
            "compare requires variant pa-apa: no exact law exists for pa-apa-2".into(),
        ));
    }
    let kmax = config.resolve_or(args.kmax, "kmax", 400)?;
    let tv_tol = config.resolve_or(args.tv_tol, "tv-tol", 0.01)?;
    let alpha = config.resolve_or(args.alpha, "alpha", 0.001)?;
    let tail_tol = config.resolve_or(args.tail_tol, "tail-tol", 0.3)?;
    let kmin = config.resolve_or(args.kmin, "kmin", 3 * params.m as u64)?;
    let min_count = config.resolve_or(args.min_count, "min-count", 30)?;
    let out = ensure_out_dir(&config.require(args.out, "out")?)?;
    let threads = config.resolve(args.threads, "threads")?;

    let runs = maybe_pooled(threads, || {
        run_replicas_observed(&params, &[params.horizon], 2)
    })?;
    let mut hist = DegreeHistogram::default();
    for run in &runs {
        hist.merge(&run.checkpoints[0].histogram);
    }

    let law = theory::limit_law_table(params.m, params.p, kmax)?;
    let mut verdicts = Vec::new();

    let tv = stats::tv_distance(&hist, &law)?;
    verdicts.push(Verdict {
        metric: "tv",
        passed: Some(tv <= tv_tol),
        value: tv,
        threshold: tv_tol,
        detail: format!("TV {tv:.5} vs limit law, tolerance {tv_tol}"),
    });

    // Chi-square over m..=kmax plus one pooled beyond-kmax cell.
    let mut observed: Vec<u64> = (params.m as u64..=kmax).map(|k| hist.count(k)).collect();
    let mut probs: Vec<f64> = (params.m as u64..=kmax).map(|k| law.prob(k)).collect();
    observed.push(hist.counts().iter().filter(|(&k, _)| k > kmax).map(|(_, &n)| n).sum());
    probs.push(law.truncated_mass);
    let gof = stats::chi_square_gof(&observed, &probs, 5.0)?;
    verdicts.push(Verdict {
        metric: "chi-square",
        passed: Some(gof.p_value >= alpha),
        value: gof.p_value,
        threshold: alpha,
        detail: format!(
            "stat {:.2} dof {} p-value {:.5}, level {alpha}",
            gof.statistic, gof.dof, gof.p_value
        ),
    });

    if params.p < 1.0 {
        let target = theory::tail_exponent(params.p)?;
        match stats::tail_fit(&hist, kmin, min_count) {
            Ok(fit) => {
                let gap = (fit.pdf_exponent() - target).abs();
                verdicts.push(Verdict {
                    metric: "tail-exponent",
                    passed: Some(gap <= tail_tol),
                    value: fit.pdf_exponent(),
                    threshold: tail_tol,
                    detail: format!(
                        "fitted {:.3} vs {:.3}, gap {gap:.3}, tolerance {tail_tol}",
                        fit.pdf_exponent(),
                        target
                    ),
                });
            }
            Err(err) => verdicts.push(Verdict {
                metric: "tail-exponent",
                passed: Some(false),
                value: f64::NAN,
                threshold: tail_tol,
                detail: format!("fit failed: {err}"),
            }),
        }
    } else {
        verdicts.push(Verdict {
            metric: "tail-exponent",
            passed: None,
            value: f64::NAN,
            threshold: tail_tol,
            detail: "geometric regime (p = 1): no power-law tail".into(),
        });
    }

    for v in &verdicts {
        println!("{}", v.line());
    }
    #[derive(Serialize)]
    struct CompareReport<'a> {
        meta: RunMetadata,
        kmax: u64,
        verdicts: &'a [Verdict],
    }
    let report_path = out.join("compare.json");
    io::write_json(
        &report_path,
        &CompareReport {
            meta: RunMetadata::for_params(&params),
            kmax,
            verdicts: &verdicts,
        },
    )?;

    if verdicts.iter().any(|v| v.passed == Some(false)) {
        return Err(CliError::Compare(format!(
            "comparison failed; report at {}",
            report_path.display()
        )));
    }
    println!("compare: verdict PASS; report at {}", report_path.display());
    Ok(())
}

pub fn assortativity(args: AssortativityArgs, config: &Config) -> Result<(), CliError> {
    let path: PathBuf = config.require(args.edge_list, "edge-list")?;
    let edges = io::read_edges_csv(&path)?;
    if edges.is_empty() {
        return Err(CliError::Io(format!("no edges in {}", path.display())));
    }
    let max_vertex = edges.iter().map(|e| e.source.max(e.target)).max().expect("nonempty");
    let mut degrees = vec![0u32; max_vertex as usize];
    for edge in &edges {
        degrees[(edge.source - 1) as usize] += 1;
        degrees[(edge.target - 1) as usize] += 1;
    }
    let r = stats::assortativity(edges.iter().copied(), &degrees)
        .map_err(|e| CliError::Compare(e.to_string()))?;
    println!("assortativity: r = {r:.6} ({} edges)", edges.len());
    if let Some(out) = config.resolve(args.out, "out")? {
        let out = ensure_out_dir(&out)?;
        #[derive(Serialize)]
        struct AssortReport {
            edge_list: String,
            edges: usize,
            r: f64,
            toolkit_version: &'static str,
        }
        let report_path = out.join("assortativity.json");
        io::write_json(
            &report_path,
            &AssortReport {
                edge_list: path.display().to_string(),
                edges: edges.len(),
                r,
                toolkit_version: io::TOOLKIT_VERSION,
            },
        )?;
        println!("assortativity: report at {}", report_path.display());
    }
    Ok(())
}

fn parse_rule(raw: &str) -> Result<AttachmentRule, CliError> {
    match raw.to_ascii_lowercase().as_str() {
        "preferential" | "pa" => Ok(AttachmentRule::Preferential),
        "anti-preferential" | "apa" => Ok(AttachmentRule::AntiPreferential),
        "anti-preferential-maxdeg" | "apa-maxdeg" => Ok(AttachmentRule::AntiPreferentialMaxDeg),
        other => Err(CliError::Usage(format!(
            "unknown rule `{other}`: expected preferential, anti-preferential or anti-preferential-maxdeg"
        ))),
    }
}

pub fn probdump(args: ProbdumpArgs, config: &Config) -> Result<(), CliError> {
    let params = resolve_params(&args.model, config, 1)?;
    let checkpoints = resolve_checkpoints(args.checkpoints, config, params.horizon)?;
    let rule = match config.resolve(args.rule, "rule")? {
        Some(raw) => parse_rule(&raw)?,
        None => match params.variant {
            Variant::PaApa => AttachmentRule::AntiPreferential,
            Variant::PaApa2 => AttachmentRule::AntiPreferentialMaxDeg,
        },
    };
    if rule == AttachmentRule::AntiPreferentialMaxDeg && params.variant != Variant::PaApa2 {
        return Err(CliError::Usage(
            "rule anti-preferential-maxdeg is only meaningful for variant pa-apa-2".into(),
        ));
    }
    let out = ensure_out_dir(&config.require(args.out, "out")?)?;

    let mut rng = paapa::seed::replica_rng(params.seed, 0);
    let mut dump_error: Option<CliError> = None;
    let base_meta = RunMetadata::for_params(&params).with_replica(0);
    {
        let out = &out;
        let base_meta = &base_meta;
        let dump_error = &mut dump_error;
        let mut observer = paapa::FnObserver::new(checkpoints.clone(), move |state: &paapa::GraphState| {
            if dump_error.is_some() {
                return;
            }
            let rows: Vec<(u32, u32, f64)> = (1..=state.time() as u32)
                .map(|v| {
                    let prob = paapa::attach_probability(state, v, rule).expect("v in range");
                    (v, state.degree(v), prob)
                })
                .collect();
            let path = out.join(format!("probs_t{}.csv", state.time()));
            let written = io::write_prob_dump_csv(&path, &rows).and_then(|_| {
                io::write_metadata(
                    &path,
                    &base_meta
                        .clone()
                        .with_checkpoint(state.time())
                        .with_note(format!("rule {rule:?}")),
                )
                .map(|_| ())
            });
            if let Err(err) = written {
                *dump_error = Some(CliError::Io(err.to_string()));
            }
        });
        let mut hooks: Vec<&mut dyn paapa::Observer> = vec![&mut observer];
        paapa::grow_observed(&params, &mut hooks, &mut rng)?;
    }
    if let Some(err) = dump_error {
        return Err(err);
    }
    println!("probdump: {} checkpoint file(s) in {}", checkpoints.len(), out.display());
    Ok(())
}
