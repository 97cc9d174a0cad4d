use std::fmt::Write as _;
use std::fs;

use dimlab_core::catalog::{make_example, verify_example, ExampleName, ExampleReport, ExampleSpec, Tolerances};
use dimlab_core::estimate::{
    box_dimension_estimate, correlation_dim_gp, local_dimension_profile, log_schedule, modified_correlation_dim,
    DimensionEstimate, PointCloud,
};
use dimlab_core::exact::{concentration_certificate, exact_dims, Mapping};
use dimlab_core::metrics::{setwise_converges, tv_converges, tv_distance_certified, weak_converges, MeasureSequence};
use dimlab_core::{Execution, SymbolicMeasure};
use serde::Serialize;

use crate::args::{
    ConvergeArgs, EstimateArgs, ExactArgs, ExampleParams, MeasureSource, Method, ModeArg, TvArgs, VerifyArgs,
};
use crate::document::MeasureDocument;
use crate::output::{csv_text, loglog_csv, series_csv, Format, Outputs, RunReport};
use crate::CliError;

/// What a command produced: text for stdout, files, and whether every claim passed.
pub struct Outcome {
    pub summary: String,
    pub outputs: Outputs,
    pub passed: bool,
}

fn spec(name: &str, params: &ExampleParams, horizon: Option<u64>) -> Result<ExampleSpec, CliError> {
    let name: ExampleName = name.parse().map_err(CliError::input)?;
    let mut s = ExampleSpec::new(name).with_a(params.a).with_ratios(params.ratios.clone());
    if let Some(h) = horizon {
        s = s.with_horizon(h);
    }
    s.validate().map_err(CliError::input)?;
    Ok(s)
}

fn sequence(spec: &ExampleSpec) -> Result<MeasureSequence, CliError> {
    make_example(spec).map_err(CliError::input)
}

pub fn read_document(path: &std::path::Path) -> Result<SymbolicMeasure, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let doc = MeasureDocument::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    doc.to_measure().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load(source: &MeasureSource) -> Result<(String, SymbolicMeasure), CliError> {
    if let Some(path) = &source.measure {
        return Ok((path.display().to_string(), read_document(path)?));
    }
    let name = source.example.as_deref().expect("clap requires --measure or --example");
    let seq = sequence(&spec(name, &source.params, None)?)?;
    Ok(match source.n {
        Some(n) => (format!("{name} ν_{n}"), seq.term(n).map_err(CliError::input)?),
        None => (format!("{name} limit"), seq.limit().clone()),
    })
}

fn json_file<C: Serialize, R: Serialize>(
    out: &mut Outputs,
    fmt: Format,
    name: &str,
    cmd: &'static str,
    config: &C,
    result: R,
) {
    if fmt.json() {
        out.add(name, RunReport::new(cmd, config, result).to_json());
    }
}

pub fn exact(args: &ExactArgs) -> Result<Outcome, CliError> {
    let (label, mu) = load(&args.source)?;
    let table = exact_dims(&mu);
    let mut summary = format!("{label}: {}\n", table.rule);
    let mut rows = Vec::new();
    for m in Mapping::ALL {
        let v = table.value(m).map_or("unsupported".to_string(), |v| v.to_string());
        let _ = writeln!(summary, "  {:<9} {v}", m.label());
        rows.push([m.label().to_string(), v]);
    }
    let mut outputs = Outputs::default();
    if args.output.format.csv() {
        outputs.add("table.csv", csv_text(&["mapping", "value"], rows));
    }
    json_file(&mut outputs, args.output.format, "table.json", "exact", args, &table);
    Ok(Outcome { summary, outputs, passed: true })
}

#[derive(Serialize)]
struct EstimateResult<'a> {
    measure: &'a str,
    normalized: bool,
    method: Method,
    estimates: Vec<(Option<f64>, DimensionEstimate)>,
    excluded: Option<usize>,
    dropped: Option<usize>,
}

pub fn estimate(args: &EstimateArgs) -> Result<Outcome, CliError> {
    let (label, mu) = load(&args.source)?;
    let rs = log_schedule(args.rmax, args.rmin, args.rsteps).map_err(CliError::input)?;
    let window = args.window_min.zip(args.window_max);
    let normalized = !mu.is_probability();
    let prob = if normalized { mu.normalize().map_err(CliError::input)? } else { mu.clone() };
    let samples = || -> Result<Vec<f64>, CliError> { prob.sample(args.samples, args.seed).map_err(CliError::runtime) };
    let exec = Execution::auto();

    let (mut excluded, mut dropped) = (None, None);
    let estimates: Vec<(Option<f64>, DimensionEstimate)> = match args.method {
        Method::Box => {
            let delta = args.delta.unwrap_or(0.0);
            let got = box_dimension_estimate(&mu, &[delta], &rs).map_err(CliError::runtime)?;
            if got.is_empty() {
                return Err(CliError::Runtime(
                    "δ = 0 box counts need a measure whose boxes can be counted exactly; pass --delta > 0".into(),
                ));
            }
            got.into_iter().map(|(d, e)| (Some(d), e)).collect()
        }
        Method::Gp => {
            let pc: PointCloud = samples()?.into();
            vec![(None, correlation_dim_gp(&pc, &rs, window, exec).map_err(CliError::runtime)?)]
        }
        Method::Mc => {
            let delta = args.delta.unwrap_or(0.05);
            let pc: PointCloud = samples()?.into();
            let m = modified_correlation_dim(&pc, delta, &rs, window, exec).map_err(CliError::runtime)?;
            dropped = Some(m.dropped.len());
            vec![(Some(delta), m.estimate)]
        }
        Method::Local => {
            let xs = samples()?;
            let p = local_dimension_profile(&mu, &xs, &rs, &args.quantiles, window).map_err(CliError::runtime)?;
            excluded = Some(p.excluded);
            p.estimates.into_iter().map(|(q, e)| (Some(q), e)).collect()
        }
    };

    let mut summary = format!("{label}: {:?} estimate\n", args.method);
    let mut outputs = Outputs::default();
    for (param, e) in &estimates {
        let tag = match (args.method, param) {
            (Method::Local, Some(q)) => format!("q = {q}"),
            (_, Some(d)) => format!("δ = {d}"),
            _ => String::new(),
        };
        let _ = writeln!(
            summary,
            "  {tag:<10} slope {:.6} ± {:.6} over [{:e}, {:e}] ({} scales)",
            e.slope, e.stderr, e.window.0, e.window.1, e.used
        );
        if args.output.format.csv() {
            let name = match (args.method, param) {
                (Method::Local, Some(q)) => format!("series_q{q}.csv"),
                _ => "series.csv".to_string(),
            };
            outputs.add(name, loglog_csv(&e.series.points));
        }
    }
    let result = EstimateResult { measure: &label, normalized, method: args.method, estimates, excluded, dropped };
    json_file(&mut outputs, args.output.format, "estimate.json", "estimate", args, &result);
    Ok(Outcome { summary, outputs, passed: true })
}

#[derive(Serialize)]
struct TvResult {
    tv_distance: f64,
    error: f64,
}

pub fn tv(args: &TvArgs) -> Result<Outcome, CliError> {
    let a = read_document(&args.first)?;
    let b = read_document(&args.second)?;
    let d = tv_distance_certified(&a, &b).map_err(CliError::runtime)?;
    let mut outputs = Outputs::default();
    if args.output.format.csv() {
        outputs.add("tv.csv", csv_text(&["tv_distance", "error"], [[d.value.to_string(), d.error.to_string()]]));
    }
    json_file(
        &mut outputs,
        args.output.format,
        "tv.json",
        "tv",
        args,
        TvResult { tv_distance: d.value, error: d.error },
    );
    Ok(Outcome { summary: format!("tv distance {} (± {:e})\n", d.value, d.error), outputs, passed: true })
}

pub fn converge(args: &ConvergeArgs) -> Result<Outcome, CliError> {
    let s = spec(&args.example, &args.params, Some(args.horizon))?;
    let seq = sequence(&s)?;
    let verdict = match args.mode {
        ModeArg::Tv => tv_converges(&seq, args.horizon, args.tol),
        ModeArg::Setwise => setwise_converges(&seq, args.horizon, args.tol),
        ModeArg::Weak => {
            let probabilities = seq.limit().is_probability();
            if probabilities {
                weak_converges(&seq, args.horizon, args.tol)
            } else {
                seq.normalized().and_then(|n| weak_converges(&n, args.horizon, args.tol))
            }
        }
    }
    .map_err(CliError::runtime)?;
    let mut summary = format!("{} {}: {:?}\n  {}\n", args.example, verdict.mode, verdict.status, verdict.certificate);
    if let Some(w) = &verdict.witness {
        let _ = writeln!(summary, "  witness: {} (limit mass {}, gap {})", w.description, w.limit_mass, w.gap);
    }
    let column = match args.mode {
        ModeArg::Tv => "tv_distance",
        ModeArg::Setwise | ModeArg::Weak => "max_gap",
    };
    let mut outputs = Outputs::default();
    if args.output.format.csv() {
        outputs.add("series.csv", series_csv(column, &verdict.series));
    }
    json_file(&mut outputs, args.output.format, "verdict.json", "converge", args, &verdict);
    Ok(Outcome { summary, outputs, passed: true })
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let names: Vec<String> =
        if args.all { ExampleName::ALL.iter().map(|e| e.to_string()).collect() } else { args.names.clone() };
    let specs = names.iter().map(|n| spec(n, &args.params, Some(args.horizon))).collect::<Result<Vec<_>, _>>()?;
    let tol = Tolerances {
        numeric: args.numeric,
        tol: args.tol,
        samples: args.samples,
        seed: args.seed,
        ..Tolerances::default()
    };
    let reports: Vec<ExampleReport> =
        specs.iter().map(|s| verify_example(s, &tol).map_err(CliError::runtime)).collect::<Result<_, _>>()?;

    let mut summary = String::from("example  claims  failed\n");
    let mut rows = Vec::new();
    for r in &reports {
        let failed = r.failures().count();
        let _ = writeln!(summary, "{:<8} {:>6}  {:>6}", r.name.as_str(), r.claims.len(), failed);
        for c in &r.claims {
            if !c.passed {
                let _ = writeln!(
                    summary,
                    "  FAIL {}: {} (expected {}, observed {}) {}",
                    c.id, c.description, c.expected, c.observed, c.detail
                );
            }
            rows.push([
                r.name.to_string(),
                c.id.clone(),
                c.passed.to_string(),
                c.expected.clone(),
                c.observed.clone(),
                c.margin.map_or(String::new(), |m| m.to_string()),
                format!("{:?}", c.citation.source).to_lowercase(),
                c.citation.claim.clone(),
            ]);
        }
    }
    let passed = reports.iter().all(|r| r.passed());
    let _ = writeln!(summary, "{}", if passed { "all claims pass" } else { "some claims FAILED" });

    let mut outputs = Outputs::default();
    if args.output.format.csv() {
        outputs.add(
            "claims.csv",
            csv_text(&["example", "claim", "passed", "expected", "observed", "margin", "source", "citation"], rows),
        );
    }
    for s in specs.iter().filter(|s| s.name == ExampleName::Ex7) {
        let seq = sequence(s)?;
        let n_max = ((690.0 / -s.a.ln()).sqrt().floor() as u64).min(s.horizon).max(1) as u32;
        let cert = concentration_certificate(seq.limit(), s.a, n_max).map_err(CliError::runtime)?;
        let points: Vec<(u64, f64)> = cert.steps.iter().map(|st| (st.n as u64, st.exponent)).collect();
        let _ = writeln!(
            summary,
            "ex7 concentration exponents (expected 2/n): {}",
            points.iter().take(10).map(|(n, e)| format!("n={n}: {e:.6}")).collect::<Vec<_>>().join(", ")
        );
        if args.output.format.csv() {
            outputs.add("ex7_concentration.csv", series_csv("exponent", &points));
        }
    }
    json_file(&mut outputs, args.output.format, "report.json", "verify", args, &reports);
    Ok(Outcome { summary, outputs, passed })
}
