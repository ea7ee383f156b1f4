//! Subcommand implementations. Each returns a [`Report`]; errors map to exit code 2.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use hec_core::catalog::{
    build_case, find, metric_family, rows, verify_case, CaseRecord, CaseVerdictReport, PaperReport, StepStatus, VerifyConfig,
};
use hec_core::geometry::json::{metric_from_json, space_from_json};
use hec_core::geometry::{
    decompose_isotropy_modules, einstein_residual, invariant_inner_product, ricci_form, ricci_operator, scalar_curvature,
    HomogeneousSpace, InvariantMetric,
};
use hec_core::lie::json::parse_json;
use hec_core::policy::NumericPolicy;
use hec_core::search::{einstein_search, parameter_sweep, parse_grid, SearchProblem, SearchStatus, SweepFamily};
use hec_core::structure::{generalized_einstein, moment_map_residual, nilsoliton_residual, StructureData};
use hec_core::{Error, ExecutionMode, Matrix, Rational, Result, Scalar};

use crate::output::Report;
use crate::{Backend, CheckArgs, Cli, Command, SearchArgs, SpaceInput, SweepArgs, VerifyArgs};

pub fn run(cli: &Cli, policy: &NumericPolicy) -> Result<Report> {
    let mode = if cli.global.sequential { ExecutionMode::Sequential } else { ExecutionMode::Parallel };
    match &cli.command {
        Command::List => Ok(list()),
        Command::Describe { name, params } => describe(name, params, cli.global.seed),
        Command::Ricci(input) => match cli.global.backend {
            Backend::Rational => ricci::<Rational>(input, cli.global.seed),
            Backend::Float => ricci::<f64>(input, cli.global.seed),
        },
        Command::Check(args) => match cli.global.backend {
            Backend::Rational => check::<Rational>(args, policy, cli.global.seed),
            Backend::Float => check::<f64>(args, policy, cli.global.seed),
        },
        Command::Search(args) => search(args, policy, cli.global.seed, mode),
        Command::Sweep(args) => sweep(args, mode),
        Command::VerifyPaper(args) => verify(args, cli, mode),
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_json(&text).map_err(|e| match e {
        Error::Json { line, column, message } => {
            Error::Parse(format!("{}: line {line}, column {column}: {message}", path.display()))
        }
        other => other,
    })
}

fn fmt_scalar<S: Scalar>(x: &S) -> String {
    match x.to_json() {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

fn fmt_matrix<S: Scalar>(tag: &str, m: &Matrix<S>) -> String {
    let cells: Vec<Vec<String>> = (0..m.rows()).map(|i| (0..m.cols()).map(|j| fmt_scalar(&m[(i, j)])).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut s = format!("[{tag}]\n");
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(s, "  {}", line.join("  "));
    }
    s
}

fn verdict_summary(r: &CaseRecord) -> String {
    r.verdicts
        .iter()
        .map(|v| {
            let cited = if v.cited { " (cited)" } else { "" };
            match &v.when {
                Some(w) => format!("{}{cited} if {w}", v.verdict),
                None => format!("{}{cited}", v.verdict),
            }
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn list() -> Report {
    let mut text = String::new();
    let mut csv = String::from("name,dim,section,params,verdicts\n");
    let mut items = Vec::new();
    for r in rows() {
        let params = if r.params.is_empty() { String::new() } else { format!("({})", r.params.join(",")) };
        let verdicts = if r.metadata_only { "metadata only".to_string() } else { verdict_summary(r) };
        let _ = writeln!(text, "{:<28} dim {:>2}  {:<8} {:<10} {verdicts}", r.name, r.dim, r.section, params);
        let _ = writeln!(csv, "{},{},{},\"{}\",\"{}\"", r.name, r.dim, r.section, r.params.join(","), verdicts);
        items.push(json!({
            "name": r.name,
            "dim": r.dim,
            "section": r.section,
            "params": r.params,
            "metadata_only": r.metadata_only,
            "verdicts": r.verdicts,
        }));
    }
    let mut rep = Report::new(json!({"operation": "catalog-list", "rows": items}), text);
    rep.csv = Some(csv);
    rep
}

fn describe(name: &str, params: &[i64], seed: u64) -> Result<Report> {
    let record = find(name)?;
    let mut text = String::new();
    let _ = writeln!(text, "{} (dim {}, section {})", record.name, record.dim, record.section);
    for (label, v) in [
        ("compact", &record.compact),
        ("symmetric dual", &record.symmetric_dual),
        ("non-compact", &record.noncompact),
        ("isotropy", &record.isotropy),
        ("convention", &record.convention),
        ("note", &record.note),
    ] {
        if let Some(v) = v {
            let _ = writeln!(text, "  {label}: {v}");
        }
    }
    if !record.verdicts.is_empty() {
        let _ = writeln!(text, "  verdict: {}", verdict_summary(record));
    }
    let mut out = json!({"operation": "catalog-describe", "row": record});
    if record.metadata_only {
        let _ = writeln!(text, "  metadata only: no structure constants are encoded");
        return Ok(Report::new(out, text));
    }
    let case = build_case(name, params)?;
    let space = &case.space;
    let alg = space.algebra();
    let labels = alg.labels();
    if !case.params.is_empty() {
        let _ = writeln!(text, "  parameters: {:?}", case.params);
    }
    let _ = writeln!(text, "\n[structure-constants] basis {}", labels.join(", "));
    for i in 0..alg.dim() {
        for j in i + 1..alg.dim() {
            let terms: Vec<String> = (0..alg.dim())
                .filter(|&k| !alg.c(i, j, k).negligible(0.0))
                .map(|k| format!("{} {}", fmt_scalar(alg.c(i, j, k)), labels[k]))
                .collect();
            if !terms.is_empty() {
                let _ = writeln!(text, "  [{}, {}] = {}", labels[i], labels[j], terms.join(" + "));
            }
        }
    }
    let iso: Vec<&str> = space.isotropy().iter().map(|&i| labels[i].as_str()).collect();
    let _ = writeln!(text, "\n[reductive-decomposition] h = <{}>, m = <{}>", iso.join(", "), space.complement_labels().join(", "));
    let dec = decompose_isotropy_modules(&space.to_f64(), seed)?;
    let got = dec.signature();
    let want = record.expected_signature(&case.params)?;
    let _ = writeln!(text, "\n[isotropy-module-signature] {got}");
    let _ = writeln!(text, "  table: {want} ({})", if got == want { "agrees" } else { "DISAGREES" });
    for e in &dec.equivalences {
        let _ = writeln!(
            text,
            "  {} ~ {} ({} intertwiners)",
            dec.blocks[e.a].label,
            dec.blocks[e.b].label,
            e.intertwiners.len()
        );
    }
    let _ = writeln!(text, "  invariant forms: {}", dec.schur_form_count());
    let recipe: Vec<&str> = record.recipe_for(&case.params)?.iter().map(|s| s.step.as_str()).collect();
    let _ = writeln!(text, "\n[recipe] {}", recipe.join(" -> "));
    out["params"] = json!(case.params);
    out["space"] = hec_core::geometry::json::space_to_json(space);
    out["modules"] = serde_json::to_value(&dec)?;
    out["signature"] = json!({"computed": got, "table": want, "agrees": got == want});
    Ok(Report::new(out, text))
}

fn load_space<S: Scalar>(input: &SpaceInput) -> Result<(HomogeneousSpace<S>, Option<String>)> {
    match (&input.space, &input.case) {
        (Some(path), _) => Ok((space_from_json(&read_json(path)?)?, None)),
        (None, Some(name)) => {
            let case = build_case(name, &input.params)?;
            let space = case.space.map(|x| S::from_json(&x.to_json()).expect("rational converts"));
            Ok((space, Some(case.record.name.clone())))
        }
        (None, None) => Err(Error::Parse("give --space FILE or --case NAME".into())),
    }
}

fn load_metric<S: Scalar>(space: &HomogeneousSpace<S>, input: &SpaceInput, seed: u64) -> Result<InvariantMetric<S>> {
    if let Some(path) = &input.metric {
        return metric_from_json(space, &read_json(path)?);
    }
    if let Ok(m) = InvariantMetric::new(space, Matrix::identity(space.dim())) {
        return Ok(m);
    }
    if S::EXACT {
        return Err(Error::Parse("the identity is not invariant here; pass --metric or use --backend float".into()));
    }
    let g = invariant_inner_product(&space.to_f64(), seed)?;
    InvariantMetric::new(space, g.map(|x| S::from_f64(*x)))
}

fn ricci<S: Scalar>(input: &SpaceInput, seed: u64) -> Result<Report> {
    let (space, _) = load_space::<S>(input)?;
    let metric = load_metric(&space, input, seed)?;
    let ric = ricci_form(&space, metric.gram())?;
    let op = ricci_operator(&space, metric.gram())?;
    let scal = scalar_curvature(&space, &metric)?;
    let (c, residual) = einstein_residual(&space, &metric)?;
    let mut text = format!("{} with complement basis {}\n", space.name(), space.complement_labels().join(", "));
    text.push_str(&fmt_matrix("ricci-form", &ric));
    text.push_str(&fmt_matrix("ricci-operator", &op));
    let _ = writeln!(text, "[scalar-curvature] {}", fmt_scalar(&scal));
    let _ = writeln!(text, "[einstein-residual] c = {}, residual = {residual:e}", fmt_scalar(&c));
    let json = json!({
        "space": space.name(),
        "ricci-form": ric,
        "ricci-operator": op,
        "scalar-curvature": scal.to_json(),
        "einstein-residual": {"c": c.to_json(), "residual": residual},
    });
    Ok(Report::new(json, text))
}

fn check<S: Scalar>(args: &CheckArgs, policy: &NumericPolicy, seed: u64) -> Result<Report> {
    if !(args.einstein || args.generalized_einstein || args.moment_map || args.nilsoliton) {
        return Err(Error::Parse("select at least one of --einstein, --generalized-einstein, --moment-map, --nilsoliton".into()));
    }
    let tol = if S::EXACT { 0.0 } else { policy.curvature };
    let mut text = String::new();
    let mut out = serde_json::Map::new();
    let mut failed = Vec::new();
    let mut verdict = |name: &str, residual: f64, text: &mut String| {
        let ok = residual <= tol;
        let _ = writeln!(text, "  {}", if ok { "holds" } else { "FAILS" });
        if !ok {
            failed.push(name.to_string());
        }
        ok
    };
    let has_space = args.input.space.is_some() || args.input.case.is_some();
    let structure = match &args.structure {
        Some(p) => Some(StructureData::<S>::from_json(&read_json(p)?)?),
        None => None,
    };
    if args.einstein {
        let (space, _) = load_space::<S>(&args.input)?;
        let metric = load_metric(&space, &args.input, seed)?;
        let (c, residual) = einstein_residual(&space, &metric)?;
        let _ = writeln!(text, "[einstein-residual] c = {}, residual = {residual:e}", fmt_scalar(&c));
        let ok = verdict("einstein", residual, &mut text);
        out.insert("einstein-residual".into(), json!({"c": c.to_json(), "residual": residual, "holds": ok}));
    }
    if let Some(data) = &structure {
        if args.generalized_einstein {
            let rep = generalized_einstein(data)?;
            text.push_str(&fmt_matrix("c-theta-form", &rep.c_theta));
            text.push_str(&fmt_matrix("ricci-theta-operator", &rep.ricci_theta));
            let _ = writeln!(text, "[generalized-einstein] c = {}, residual = {:e}", fmt_scalar(&rep.c_estimate), rep.residual);
            let ok = verdict("generalized-einstein", rep.residual, &mut text);
            let mut v = rep.to_json();
            v["holds"] = json!(ok);
            out.insert("generalized-einstein".into(), v);
        }
        if args.moment_map {
            let mm = moment_map_residual(data)?;
            text.push_str(&fmt_matrix("moment-map", &mm.matrix));
            let _ = writeln!(text, "[moment-map] residual = {:e}, center symmetry defect = {:e}", mm.residual, mm.center_symmetry);
            let ok = verdict("moment-map", mm.residual.max(mm.center_symmetry), &mut text);
            out.insert(
                "moment-map".into(),
                json!({"matrix": mm.matrix, "residual": mm.residual, "center_symmetry": mm.center_symmetry, "holds": ok}),
            );
        }
    }
    if args.nilsoliton {
        let fit = match &structure {
            Some(data) => nilsoliton_residual(&data.product.nil, &data.nil_metric)?,
            None if has_space => {
                let (space, _) = load_space::<S>(&args.input)?;
                if !space.isotropy().is_empty() {
                    return Err(Error::Premise("the nilsoliton audit needs a Lie group (empty isotropy)".into()));
                }
                let metric = load_metric(&space, &args.input, seed)?;
                nilsoliton_residual(space.algebra(), metric.gram())?
            }
            None => return Err(Error::Parse("--nilsoliton needs --structure or a space".into())),
        };
        text.push_str(&fmt_matrix("nilsoliton-derivation", &fit.derivation));
        let _ = writeln!(text, "[nilsoliton] c = {}, residual = {:e}", fmt_scalar(&fit.c), fit.residual);
        let ok = verdict("nilsoliton", fit.residual, &mut text);
        out.insert(
            "nilsoliton".into(),
            json!({"c": fit.c.to_json(), "derivation": fit.derivation, "residual": fit.residual, "holds": ok}),
        );
    }
    let exit = if failed.is_empty() { 0 } else { 1 };
    out.insert("failed".into(), json!(failed));
    let mut rep = Report::new(Value::Object(out), text);
    rep.exit = exit;
    Ok(rep)
}

fn search(args: &SearchArgs, policy: &NumericPolicy, seed: u64, mode: ExecutionMode) -> Result<Report> {
    let (space, case) = load_space::<f64>(&args.input)?;
    let mut problem = if args.family {
        let name = case.ok_or_else(|| Error::Parse("--family needs --case".into()))?;
        SearchProblem::family(space, metric_family(&name)?)
    } else {
        SearchProblem::new(space)?
    };
    problem.seed = seed;
    problem.starts = args.starts;
    problem.max_iter = args.iterations;
    problem.tol = policy.convergence;
    problem.normalization = args.normalization.parse()?;
    problem.mode = mode;
    let results = einstein_search(&problem)?;
    let mut text = format!("[einstein-search] {} distinct minima from {} starts\n", results.len(), args.starts);
    let mut csv = String::from("start,status,c,residual,iterations,parameters\n");
    for r in &results {
        let params: Vec<String> = r.parameters.iter().map(|x| format!("{x:.8}")).collect();
        let _ = writeln!(
            text,
            "  start {:>3}  {:<26} c = {:>12.8}  residual = {:.3e}  iterations {}",
            r.start,
            format!("{:?}", r.status),
            r.c,
            r.residual,
            r.iterations
        );
        let _ = writeln!(csv, "{},{:?},{},{},{},\"{}\"", r.start, r.status, r.c, r.residual, r.iterations, params.join(" "));
    }
    let converged = results.iter().any(|r| r.status == SearchStatus::Converged);
    let _ = writeln!(text, "  converged: {converged}");
    let mut rep = Report::new(json!({"operation": "einstein-search", "results": results, "converged": converged}), text);
    rep.csv = Some(csv);
    Ok(rep)
}

fn sweep(args: &SweepArgs, mode: ExecutionMode) -> Result<Report> {
    let family: SweepFamily = args.family.parse()?;
    let grid = match &args.grid {
        Some(p) => parse_grid(&read_json(p)?)?,
        None => family.default_grid(),
    };
    let report = parameter_sweep(family, &grid, mode)?;
    let mut text = format!("[{}] {} nodes, {} skipped\n", report.operation, report.nodes, report.skipped);
    for (k, v) in &report.tallies {
        let _ = writeln!(text, "  {k}: {v}");
    }
    let mut exit = 0;
    let mut json = report.to_json();
    if let Some(claim) = &args.claim {
        let holds = report.holds(claim)?;
        let _ = writeln!(text, "  claim {claim}: {}", if holds { "holds" } else { "FAILS" });
        json["claim"] = json!({"name": claim, "holds": holds});
        if !holds {
            exit = 1;
        }
    }
    let mut rep = Report::new(json, text);
    rep.csv = Some(report.to_csv());
    rep.exit = exit;
    Ok(rep)
}

fn verify(args: &VerifyArgs, cli: &Cli, mode: ExecutionMode) -> Result<Report> {
    let cfg = VerifyConfig {
        seed: cli.global.seed,
        pmax: cli.global.pmax,
        family_members: args.family_members,
        samples: args.samples,
        search_starts: args.search_starts,
        mode,
        ..VerifyConfig::default()
    };
    let report = match &args.case {
        None => hec_core::catalog::verify_paper(&cfg)?,
        Some(name) => {
            let record = find(name)?;
            let cases: Vec<CaseVerdictReport> = if record.is_family() {
                record
                    .sample_params(cfg.pmax)
                    .into_iter()
                    .take(cfg.family_members)
                    .map(|p| verify_case(&record.name, &p, &cfg))
                    .collect::<Result<_>>()?
            } else {
                vec![verify_case(&record.name, &[], &cfg)?]
            };
            PaperReport { config: cfg.clone(), catalog_version: hec_core::catalog::catalog_version(), cases }
        }
    };
    let mut text = String::new();
    for c in &report.cases {
        let _ = writeln!(text, "{:<36} {:<9} {}", c.case, c.status.as_str(), c.expected_verdict.map_or("-".into(), |v| v.to_string()));
        for s in c.steps.iter().filter(|s| s.status != StepStatus::Match) {
            let _ = writeln!(text, "    step {} {} [{}] {}: {}", s.index, s.step, s.operation, s.status.as_str(), s.observed);
        }
        for d in &c.deviations {
            let _ = writeln!(text, "    deviation: {d}");
        }
    }
    let _ = writeln!(
        text,
        "\n{} cases: {} match, {} cited, {} open, {} metadata, {} mismatch",
        report.cases.len(),
        report.count(StepStatus::Match),
        report.count(StepStatus::Cited),
        report.count(StepStatus::Open),
        report.count(StepStatus::Metadata),
        report.count(StepStatus::Mismatch)
    );
    let mut rep = Report::new(report.to_json(), text);
    rep.markdown = Some(report.to_markdown());
    rep.exit = report.exit_code();
    Ok(rep)
}
