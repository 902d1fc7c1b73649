use std::fs;
use std::path::Path;

use dirichlet_graph::io::{fmt_num, read_function_file, read_graph_file, write_graph};
use dirichlet_graph::{
    ball_with_limits, capacity_sequence, check_green_criterion, check_uniqueness_witness, classify_recurrence,
    classify_stochastic_completeness, energy_bilinear, equilibrium_potential, generate, green_defect, resolvent_limit,
    Error, Evidence, GraphOracle, GreenMode, PotentialOptions, SolverOptions, Vertex, VertexFunction, WeightedGraph,
};

use crate::report::Report;
use crate::{
    CapacityArgs, ClassifyArgs, Common, GenArgs, GreenArgs, QuestionArg, ResolventArgs, Source, ValidateArgs,
    WitnessArgs,
};

pub const THREADS_ENV: &str = "DIRICHLET_GRAPH_THREADS";

pub const EXIT_SEMANTIC: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::UnknownFamily(_) | Error::Parse { .. } | Error::Io { .. } => EXIT_USAGE,
            Error::UnknownVertex(_)
            | Error::SupportEscapes(_)
            | Error::NotInterior { .. }
            | Error::NeighborLimit { .. }
            | Error::VertexLimit { .. }
            | Error::Oracle(_) => EXIT_SEMANTIC,
            Error::Singular { .. } | Error::NonFinite(_) | Error::NotConverged { .. } | Error::Inconsistent(_) => {
                EXIT_NUMERICAL
            }
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

pub fn threads_from_env() -> Result<usize, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Failure::usage(format!(
                "{THREADS_ENV} must be a positive integer, got {s:?}"
            ))),
        },
    }
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn options(common: &Common, threads: usize) -> PotentialOptions {
    let mut opts = PotentialOptions {
        threads,
        ..PotentialOptions::default()
    };
    opts.solver = SolverOptions {
        max_iter: common.max_iter,
        ..opts.solver
    };
    opts
}

fn read_valid_graph(path: &Path) -> Result<WeightedGraph, Failure> {
    let parsed = read_graph_file(path)?;
    let violations = parsed.violations();
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Failure {
            code: EXIT_SEMANTIC,
            message: format!("{}:\n{}", path.display(), lines.join("\n")),
        });
    }
    Ok(parsed.into_valid()?)
}

struct Loaded {
    oracle: Box<dyn GraphOracle>,
    /// The file's own graph, when the source is a file.
    graph: Option<WeightedGraph>,
    label: String,
    origin: Vertex,
}

fn load(source: &Source) -> Result<Loaded, Failure> {
    let (oracle, graph, label): (Box<dyn GraphOracle>, _, _) = match (&source.generator, &source.graph) {
        (Some(spec), None) => (generate(spec)?, None, spec.clone()),
        (None, Some(path)) => {
            let g = read_valid_graph(path)?;
            let label = format!("file:{}", path.display());
            (
                Box::new(dirichlet_graph::FiniteOracle::new(g.clone(), "file")),
                Some(g),
                label,
            )
        }
        _ => return Err(Failure::usage("exactly one of --gen and --graph is required")),
    };
    let origin = match &source.origin {
        Some(s) => s.parse::<Vertex>()?,
        None => oracle.default_origin(),
    };
    if !oracle.contains(&origin) {
        return Err(Error::UnknownVertex(origin).into());
    }
    Ok(Loaded {
        oracle,
        graph,
        label,
        origin,
    })
}

/// The finite graph a pointwise check runs on: the file itself, or a ball
/// of the generated family.
fn realization(loaded: &Loaded, radius: Option<usize>) -> Result<WeightedGraph, Failure> {
    match (&loaded.graph, radius) {
        (Some(g), None) => Ok(g.clone()),
        (_, Some(r)) => {
            Ok(ball_with_limits(loaded.oracle.as_ref(), &loaded.origin, r, Default::default())?.realization)
        }
        (None, None) => Err(Failure::usage("--radius is required with --gen")),
    }
}

fn source_meta(r: &mut Report, loaded: &Loaded) {
    r.meta("source", &loaded.label).meta("origin", &loaded.origin);
}

pub fn validate(args: &ValidateArgs) -> CmdResult {
    let path = args
        .file
        .as_ref()
        .or(args.graph.as_ref())
        .expect("clap requires a file");
    let parsed = read_graph_file(path)?;
    let violations = parsed.violations();
    if violations.is_empty() {
        println!(
            "ok: {} vertices, {} edges",
            parsed.graph.len(),
            parsed.graph.half_edge_count() / 2
        );
        return Ok(());
    }
    for v in &violations {
        println!("{v}");
    }
    Err(Failure {
        code: EXIT_SEMANTIC,
        message: String::new(),
    })
}

pub fn classify(args: &ClassifyArgs, threads: usize) -> CmdResult {
    let loaded = load(&args.source)?;
    let opts = options(&args.common, threads);
    let radii = &args.radii.0;
    let oracle = loaded.oracle.as_ref();
    let report = match args.question {
        QuestionArg::Recurrence => classify_recurrence(oracle, &loaded.origin, radii, args.tol, &opts)?,
        QuestionArg::Sc => {
            classify_stochastic_completeness(oracle, &loaded.origin, args.alpha, radii, args.tol, &opts)?
        }
    };
    let mut r = Report::new("classify");
    r.meta("question", report.question);
    source_meta(&mut r, &loaded);
    if args.question == QuestionArg::Sc {
        r.meta("alpha", fmt_num(args.alpha));
    }
    r.meta("tol", fmt_num(report.thresholds.tol))
        .meta("negative_floor", fmt_num(report.thresholds.negative_floor))
        .meta("monotone_slack", fmt_num(report.thresholds.monotone_slack))
        .meta("solver_tol", fmt_num(opts.solver.tol))
        .meta("connected", report.connected);
    let stabilization = match &report.evidence {
        Evidence::Capacity(c) => c.stabilization,
        Evidence::Deficiency(d) => d.stabilization,
    };
    r.meta("stabilization", format!("{stabilization:?}").to_lowercase());
    for n in &report.notes {
        r.meta("note", n);
    }
    let column = match args.question {
        QuestionArg::Recurrence => "capacity",
        QuestionArg::Sc => "deficiency",
    };
    r.header(&["radius", column]);
    for (radius, value) in report.evidence.radii().iter().zip(report.evidence.values()) {
        r.row(vec![radius.to_string(), fmt_num(value)]);
    }
    r.trailer("verdict", report.verdict);
    emit(&r.render(args.common.format), args.common.out.as_deref())
}

pub fn capacity(args: &CapacityArgs, threads: usize) -> CmdResult {
    let loaded = load(&args.source)?;
    let opts = options(&args.common, threads);
    let oracle = loaded.oracle.as_ref();
    let mut r = Report::new("capacity");
    source_meta(&mut r, &loaded);
    r.meta("solver_tol", fmt_num(opts.solver.tol));
    match (args.radius, &args.radii) {
        (Some(n), None) => {
            let e = equilibrium_potential(oracle, &loaded.origin, n, &opts)?;
            r.meta("radius", n);
            r.row(vec!["capacity".into(), fmt_num(e.capacity)])
                .row(vec!["flux_capacity".into(), fmt_num(e.flux_capacity)])
                .row(vec!["min_laplacian".into(), fmt_num(e.min_laplacian)])
                .row(vec!["ball_size".into(), e.ball_size.to_string()]);
        }
        (None, Some(radii)) => {
            // the stabilization tolerance is irrelevant here; only values are reported
            let s = capacity_sequence(oracle, &loaded.origin, &radii.0, 1e-3, &opts)?;
            r.header(&["radius", "capacity", "flux_capacity", "min_laplacian"]);
            for k in 0..s.radii.len() {
                r.row(vec![
                    s.radii[k].to_string(),
                    fmt_num(s.values[k]),
                    fmt_num(s.flux_values[k]),
                    fmt_num(s.min_laplacians[k]),
                ]);
            }
        }
        _ => return Err(Failure::usage("give exactly one of --radius and --radii")),
    }
    emit(&r.render(args.common.format), args.common.out.as_deref())
}

pub fn resolvent(args: &ResolventArgs, threads: usize) -> CmdResult {
    let loaded = load(&args.source)?;
    let opts = options(&args.common, threads);
    let f = match &args.data {
        Some(p) => read_function_file(p)?,
        None => VertexFunction::indicator(loaded.origin.clone()),
    };
    let probes = [loaded.origin.clone()];
    let t = resolvent_limit(
        loaded.oracle.as_ref(),
        &loaded.origin,
        args.alpha,
        &f,
        &args.radii.0,
        &probes,
        &opts,
    )?;
    let mut r = Report::new("resolvent");
    source_meta(&mut r, &loaded);
    r.meta("alpha", fmt_num(args.alpha))
        .meta(
            "data",
            args.data
                .as_ref()
                .map_or("indicator of origin".to_string(), |p| p.display().to_string()),
        )
        .meta("probe", &loaded.origin)
        .meta("solver_tol", fmt_num(opts.solver.tol));
    r.header(&["radius", "value"]);
    for (radius, row) in t.radii.iter().zip(&t.values) {
        r.row(vec![radius.to_string(), fmt_num(row[0])]);
    }
    emit(&r.render(args.common.format), args.common.out.as_deref())
}

pub fn green(args: &GreenArgs) -> CmdResult {
    let loaded = load(&args.source)?;
    let g = realization(&loaded, args.radius)?;
    let u = read_function_file(&args.u)?;
    let mode = match args.question {
        QuestionArg::Recurrence => GreenMode::Recurrence,
        QuestionArg::Sc => GreenMode::StochasticCompleteness,
    };
    let rep = check_green_criterion(&g, &u, mode, loaded.oracle.meta().condition_a)?;
    let mut r = Report::new("green");
    r.meta("source", &loaded.label)
        .meta("mode", args.question_name())
        .meta("vertices", g.len());
    for n in &rep.notes {
        r.meta("note", n);
    }
    r.row(vec!["boundary_sum".into(), fmt_num(rep.boundary_sum)])
        .row(vec!["l1_u".into(), fmt_num(rep.l1_u)])
        .row(vec!["l1_laplacian".into(), fmt_num(rep.l1_laplacian)])
        .row(vec!["sup_u".into(), fmt_num(rep.sup_u)])
        .row(vec!["interior_supported".into(), rep.interior_supported.to_string()]);
    if let Some(p) = &args.v {
        let v = read_function_file(p)?;
        r.row(vec!["energy_uv".into(), fmt_num(energy_bilinear(&g, &u, &v)?)])
            .row(vec!["green_defect".into(), fmt_num(green_defect(&g, &u, &v)?)]);
    }
    for (x, c) in &rep.contributions {
        r.row(vec!["contribution".into(), x.to_string(), fmt_num(*c)]);
    }
    emit(&r.render(args.common.format), args.common.out.as_deref())
}

impl GreenArgs {
    fn question_name(&self) -> &'static str {
        match self.question {
            QuestionArg::Recurrence => "recurrence",
            QuestionArg::Sc => "sc",
        }
    }
}

pub fn witness(args: &WitnessArgs) -> CmdResult {
    let loaded = load(&args.source)?;
    let g = realization(&loaded, args.radius)?;
    let u = read_function_file(&args.u)?;
    let rep = check_uniqueness_witness(&g, &u)?;
    let mut r = Report::new("witness");
    r.meta("source", &loaded.label).meta("vertices", g.len());
    for n in &rep.notes {
        r.meta("note", n);
    }
    for (name, ok) in &rep.checks {
        r.row(vec![name.to_string(), ok.to_string()]);
    }
    r.row(vec!["boundary_sum".into(), fmt_num(rep.boundary_sum_value)]);
    r.trailer("refuted", !rep.all_pass());
    emit(&r.render(args.common.format), args.common.out.as_deref())
}

pub fn gen(args: &GenArgs) -> CmdResult {
    let oracle = generate(&args.family)?;
    let origin = match &args.origin {
        Some(s) => s.parse::<Vertex>()?,
        None => oracle.default_origin(),
    };
    let b = ball_with_limits(oracle.as_ref(), &origin, args.radius, Default::default())?;
    let text = format!(
        "# {}\n# family={} origin={} radius={}\n{}",
        crate::report::TOOL,
        args.family,
        origin,
        args.radius,
        write_graph(&b.realization)
    );
    emit(&text, args.out.as_deref())
}
