use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use holodet::blockdet::{collapse_shifts, det_block_perm, det_perm_traces, det_trace_formal};
use holodet::euler::{det_euler_finite, EulerOptions};
use holodet::laplacian::{
    build_laplacian, charpoly_laplacian, det_laplacian_cycles, wilson_moment, wilson_monte_carlo, FiniteDistribution,
    TwistedLaplacian,
};
use holodet::linalg::charpoly_oracle;
use holodet::quiver::{gen_example, Example, RandomParams};
use holodet::ring::factorial;
use holodet::vectorfields::{det_vector_fields_with, estimate_terms, Variant, VectorFieldOptions};
use holodet::walks::{enumerate_gcycle_multisets, prime_cycles, prime_finiteness, PrimeSet};
use holodet::{
    det_oracle, Complex64, Error, GaussianRational, IndeterminateSet, Instance, Matrix, MultiPoly, QuiverRep, Scalar,
};
use serde_json::{json, Map, Value};

use crate::scalar::CliScalar;
use crate::{Command, Format, InputArgs, Method, Mode, Model};

const ALL_METHODS: [Method; 8] = [
    Method::Oracle,
    Method::Perm,
    Method::BlockPerm,
    Method::TraceFormal,
    Method::Cycles,
    Method::VectorFields,
    Method::EulerFinite,
    Method::EulerTruncated,
];

macro_rules! by_mode {
    ($args:expr, $f:ident($($extra:expr),*)) => {
        match $args.mode {
            Mode::Float => $f::<Complex64>($args, $($extra),*),
            Mode::Exact => $f::<GaussianRational>($args, $($extra),*),
            Mode::Symbolic => $f::<MultiPoly<GaussianRational>>($args, $($extra),*),
        }
    };
}

pub fn run(cmd: Command) -> anyhow::Result<ExitCode> {
    match cmd {
        Command::Det { input, method, kappa, tol, max_len } => {
            by_mode!(&input, det(method, kappa, EulerOptions { tol, max_len }))
        }
        Command::Charpoly { input } => by_mode!(&input, charpoly()),
        Command::Compare { input } => by_mode!(&input, compare()),
        Command::Primes { input, max_len } => primes(&input, max_len),
        Command::Moments { input, k, model, mc_samples, seed } => {
            by_mode!(&input, moments(k, model, mc_samples, seed))
        }
        Command::Random { seed, p, max_edges, max_rank, max_total_rank, symbolic } => {
            let params = RandomParams { seed, p, max_edges, max_rank, max_total_rank };
            println!("{}", gen_example(&Example::Random(params), 1, symbolic)?.to_json());
            Ok(ExitCode::SUCCESS)
        }
        Command::Example { name, rank, symbolic } => {
            println!("{}", gen_example(&Example::from_name(&name)?, rank, symbolic)?.to_json());
            Ok(ExitCode::SUCCESS)
        }
    }
}

struct Loaded<S> {
    syms: IndeterminateSet,
    lap: TwistedLaplacian<S>,
}

impl<S: CliScalar> Loaded<S> {
    fn rep(&self) -> &QuiverRep<S> {
        self.lap.source()
    }
}

fn instance(args: &InputArgs) -> anyhow::Result<Instance> {
    match (&args.input, &args.example) {
        (Some(path), _) => Ok(Instance::read(path)?),
        (None, Some(name)) => Ok(gen_example(&Example::from_name(name)?, args.rank, args.symbolic)?),
        (None, None) => Err(Error::Parse("either --input or --example is required".into()).into()),
    }
}

fn load<S: CliScalar>(args: &InputArgs) -> anyhow::Result<Loaded<S>> {
    let (rep, syms) = instance(args)?.to_rep::<S>()?;
    let lap = build_laplacian(&rep)?;
    Ok(Loaded { syms, lap })
}

struct Outcome<S> {
    value: S,
    terms: Option<u128>,
    extra: Option<Value>,
    millis: f64,
}

fn factorial_terms(n: usize) -> Option<u128> {
    Some(factorial(n as u64) as u128)
}

fn evaluate<S: CliScalar>(
    ld: &Loaded<S>,
    method: Method,
    args: &InputArgs,
    kappa: &[f64],
    opts: EulerOptions,
) -> holodet::Result<Outcome<S>> {
    let l = &ld.lap;
    let n = l.matrix().size();
    let start = Instant::now();
    let mut extra = None;
    let (value, terms) = match method {
        Method::Oracle => (det_oracle(l.matrix().matrix())?, None),
        Method::Perm => (det_perm_traces(l.matrix().matrix())?, factorial_terms(n)),
        Method::BlockPerm => (det_block_perm(l.matrix())?, factorial_terms(n)),
        Method::TraceFormal => (det_trace_formal(l.matrix())?, factorial_terms(n)),
        Method::Cycles => {
            let v = det_laplacian_cycles(l)?;
            let count = enumerate_gcycle_multisets(&ld.rep().quiver, l.ranks()).count();
            (v, Some(count as u128))
        }
        Method::VectorFields => {
            let vf = VectorFieldOptions { budget: args.budget, parallel: args.parallel };
            (det_vector_fields_with(l, Variant::Standard, vf)?, Some(estimate_terms(l, Variant::Standard)))
        }
        Method::EulerFinite => {
            let v = det_euler_finite(l)?;
            let primes = match prime_finiteness(&ld.rep().quiver) {
                PrimeSet::Finite(p) => p.len(),
                PrimeSet::Infinite => 0,
            };
            (v, Some(primes as u128))
        }
        Method::EulerTruncated => {
            let (v, e) = S::euler_truncated(l, kappa, opts)?;
            let primes = e["primes"].as_u64().map(u128::from);
            extra = Some(e);
            (v, primes)
        }
    };
    let millis = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
    Ok(Outcome { value, terms, extra, millis })
}

fn outcome_json<S: CliScalar>(
    ld: &Loaded<S>,
    method: Method,
    out: &Outcome<S>,
    args: &InputArgs,
) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("method".into(), json!(method.name()));
    m.insert("value".into(), out.value.encode(&ld.syms));
    m.insert("terms".into(), out.terms.map_or(Value::Null, |t| json!(t)));
    if !args.no_timing {
        m.insert("time_ms".into(), json!(out.millis));
    }
    if let Some(Value::Object(extra)) = &out.extra {
        m.extend(extra.clone());
    }
    m
}

fn det<S: CliScalar>(
    args: &InputArgs,
    method: Method,
    kappa: Option<Vec<f64>>,
    opts: EulerOptions,
) -> anyhow::Result<ExitCode> {
    let ld = load::<S>(args)?;
    if kappa.is_some() && method != Method::EulerTruncated {
        return Err(Error::Parse("--kappa only applies to --method euler-truncated".into()).into());
    }
    let kappa = kappa.unwrap_or_else(|| vec![0.0; ld.lap.ranks().len()]);
    let out = evaluate(&ld, method, args, &kappa, opts)?;
    let mut report = Map::new();
    report.insert("mode".into(), json!(S::MODE));
    report.extend(outcome_json(&ld, method, &out, args));
    if args.format == Format::Text {
        // the text value is the canonical string, not the {re, im} pair
        report.insert("value".into(), json!(out.value.text(&ld.syms)));
    }
    emit(args.format, &Value::Object(report));
    Ok(ExitCode::SUCCESS)
}

fn compare<S: CliScalar>(args: &InputArgs) -> anyhow::Result<ExitCode> {
    let ld = load::<S>(args)?;
    let kappa = vec![0.0; ld.lap.ranks().len()];
    let mut done: Vec<(Method, Outcome<S>)> = Vec::new();
    let mut skipped = Vec::new();
    for method in ALL_METHODS {
        match evaluate(&ld, method, args, &kappa, EulerOptions::default()) {
            Ok(out) => done.push((method, out)),
            Err(e) if e.is_refusal() => skipped.push(json!({ "method": method.name(), "reason": e.to_string() })),
            Err(e) => return Err(anyhow::Error::new(e).context(format!("method {}", method.name()))),
        }
    }
    let mut worst = 0.0f64;
    for (i, (_, a)) in done.iter().enumerate() {
        for (_, b) in &done[i + 1..] {
            worst = worst.max(S::discrepancy(&a.value, &b.value));
        }
    }
    let agree = worst <= S::tolerance();
    let methods: Vec<Value> = done
        .iter()
        .map(|(m, out)| {
            let mut j = outcome_json(&ld, *m, out, args);
            if args.format == Format::Text {
                j.insert("value".into(), json!(out.value.text(&ld.syms)));
            }
            Value::Object(j)
        })
        .collect();
    let report = json!({
        "mode": S::MODE,
        "methods": methods,
        "skipped": skipped,
        "max_discrepancy": worst,
        "agree": agree,
    });
    emit(args.format, &report);
    if agree {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "{}",
            json!({ "error": { "kind": "disagreement", "message": format!("methods disagree by {worst:e}") } })
        );
        Ok(ExitCode::from(1))
    }
}

fn charpoly<S: CliScalar>(args: &InputArgs) -> anyhow::Result<ExitCode> {
    let ld = load::<S>(args)?;
    let start = Instant::now();
    let poly = charpoly_laplacian(&ld.lap)?;
    let millis = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
    let p = ld.lap.ranks().len();
    let n = ld.lap.matrix().size();
    let tnames = IndeterminateSet::from_names((1..=p).map(|a| format!("t{a}")))?;
    let text = poly.display(&tnames, |c| c.text(&ld.syms));
    let collapsed = collapse_shifts(&poly, n);
    let oracle = charpoly_oracle(ld.lap.matrix().matrix())?;
    let agrees = collapsed.iter().zip(&oracle).all(|(a, b)| S::discrepancy(a, b) <= S::tolerance());
    if !agrees {
        return Err(
            Error::Invariant("collapsed polynomial differs from the dense characteristic polynomial".into()).into()
        );
    }
    let encode = |c: &S| if args.format == Format::Text { json!(c.text(&ld.syms)) } else { c.encode(&ld.syms) };
    let mut report = Map::new();
    report.insert("mode".into(), json!(S::MODE));
    report.insert("polynomial".into(), json!(text));
    report.insert("collapsed".into(), Value::Array(collapsed.iter().map(encode).collect()));
    report.insert("oracle_agrees".into(), json!(agrees));
    if !args.no_timing {
        report.insert("time_ms".into(), json!(millis));
    }
    emit(args.format, &Value::Object(report));
    Ok(ExitCode::SUCCESS)
}

fn primes(args: &InputArgs, max_len: usize) -> anyhow::Result<ExitCode> {
    let (rep, _) = instance(args)?.to_rep::<MultiPoly<GaussianRational>>()?;
    let q = &rep.quiver;
    let (finite, list) = match prime_finiteness(q) {
        PrimeSet::Finite(list) => (true, list),
        PrimeSet::Infinite => (false, prime_cycles(q, max_len)),
    };
    let cycles: Vec<Value> = list
        .iter()
        .map(|c| {
            if args.format == Format::Text {
                json!(c.display(q))
            } else {
                json!({
                    "edges": c.edges().iter().map(|&e| q.edge(e).id.clone()).collect::<Vec<_>>(),
                    "vertices": c.vertices().iter().map(|v| v + 1).collect::<Vec<_>>(),
                    "length": c.len(),
                })
            }
        })
        .collect();
    let mut report = Map::new();
    report.insert("finite".into(), json!(finite));
    if !finite {
        report.insert("max_len".into(), json!(max_len));
    }
    report.insert("count".into(), json!(cycles.len()));
    report.insert("primes".into(), Value::Array(cycles));
    emit(args.format, &Value::Object(report));
    Ok(ExitCode::SUCCESS)
}

fn flip_matrix<S: Scalar>(n: usize) -> Matrix<S> {
    let mut d = vec![S::one(); n];
    d[n - 1] = -S::one();
    Matrix::diag(&d)
}

fn distribution<S: CliScalar>(rep: &QuiverRep<S>, model: Model) -> holodet::Result<FiniteDistribution<S>> {
    let q = &rep.quiver;
    let choices = (0..q.edge_count())
        .map(|e| match model {
            Model::Sign => Ok(vec![rep.matrix(e).clone(), rep.matrix(e).neg()]),
            Model::Flip => {
                let edge = q.edge(e);
                let (s, t) = (rep.ranks()[edge.src], rep.ranks()[edge.tgt]);
                if s != t {
                    return Err(Error::Dimension(format!("flip model needs equal ranks on edge {}", edge.id)));
                }
                Ok(vec![Matrix::identity(s), flip_matrix(s)])
            }
        })
        .collect::<holodet::Result<Vec<_>>>()?;
    FiniteDistribution::uniform_product(choices)
}

fn moments<S: CliScalar>(
    args: &InputArgs,
    k: usize,
    model: Model,
    mc_samples: Option<usize>,
    seed: u64,
) -> anyhow::Result<ExitCode> {
    let ld = load::<S>(args)?;
    let rep = ld.rep();
    let dist = distribution(rep, model)?;
    let start = Instant::now();
    let m = wilson_moment(rep, &dist, k)?;
    let millis = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
    let discrepancy = S::discrepancy(&m.lhs, &m.rhs);
    if discrepancy > S::tolerance() {
        return Err(Error::Invariant(format!("moment sides differ by {discrepancy:e}")).into());
    }
    let encode = |c: &S| if args.format == Format::Text { json!(c.text(&ld.syms)) } else { c.encode(&ld.syms) };
    let mut report = Map::new();
    report.insert("mode".into(), json!(S::MODE));
    report.insert("k".into(), json!(k));
    report.insert("support".into(), json!(dist.outcomes().len()));
    report.insert("lhs".into(), encode(&m.lhs));
    report.insert("rhs".into(), encode(&m.rhs));
    report.insert("multisets".into(), json!(m.multisets.len()));
    report.insert("terms".into(), json!(m.table.len()));
    report.insert("discrepancy".into(), json!(discrepancy));
    if !args.no_timing {
        report.insert("time_ms".into(), json!(millis));
    }
    if let Some(samples) = mc_samples {
        let numeric = (0..rep.quiver.edge_count()).all(|e| rep.weight(e).to_complex().is_some());
        if !numeric {
            return Err(Error::Unsupported("Monte Carlo moments need numeric edge weights".into()).into());
        }
        // matrices are resampled, so only the weights matter
        let float = rep.map(|s| s.to_complex().unwrap_or_default());
        let mc = wilson_monte_carlo(&float, k, samples, seed).context("Monte Carlo moment")?;
        report.insert(
            "monte_carlo".into(),
            json!({
                "samples": mc.samples,
                "seed": seed,
                "lhs": { "re": mc.lhs.mean.re, "im": mc.lhs.mean.im, "stderr": mc.lhs.stderr },
                "rhs": { "re": mc.rhs.mean.re, "im": mc.rhs.mean.im, "stderr": mc.rhs.stderr },
            }),
        );
    }
    emit(args.format, &Value::Object(report));
    Ok(ExitCode::SUCCESS)
}

fn emit(format: Format, report: &Value) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report).expect("report serializes")),
        Format::Text => print_text(report, 0),
    }
}

fn print_text(v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    let Value::Object(map) = v else {
        println!("{pad}{}", scalar_text(v));
        return;
    };
    for (key, val) in map {
        match val {
            Value::Array(items) if items.iter().any(Value::is_object) => {
                println!("{pad}{key}:");
                for item in items {
                    println!("{pad}  -");
                    print_text(item, indent + 4);
                }
            }
            Value::Array(items) if !items.is_empty() => {
                println!("{pad}{key}:");
                for item in items {
                    println!("{pad}  - {}", scalar_text(item));
                }
            }
            Value::Object(_) => {
                println!("{pad}{key}:");
                print_text(val, indent + 2);
            }
            _ => println!("{pad}{key}: {}", scalar_text(val)),
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
