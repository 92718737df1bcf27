//! Subcommands. Every run yields one JSON value on stdout and an exit code:
//! 0 on success, 1 on a domain error, 2 on a usage or input error.

use std::ffi::OsString;
use std::path::PathBuf;

use admgraph_core::bogomolov::{
    classify_nodes, count_invariants, fiber_epsilon, pairing_radicand, r0_bound, BogomolovError, FiberConfiguration,
    InvariantCounts, NodeClass,
};
use admgraph_core::graph::{validate_graph, Divisor, GraphError, GraphIssue, MetrizedGraph};
use admgraph_core::hyperelliptic::{HyperellipticError, HyperellipticGraph};
use admgraph_core::poly::{epsilon_closed_form_fn_capped, lm_polynomials_capped, MultiPoly, PolyError, Strategy};
use admgraph_core::potential::{
    admissible_measure, canonical_measure, effective_resistance, epsilon_numeric, green_function, resistance_matrix,
    GreenKernel, Measure, PotentialError,
};
use admgraph_core::rational::{format_rational, Rational};
use admgraph_core::testkit::{random_fiber, random_hyperelliptic, random_lengths, random_polarization, TestkitError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::document::{parse_divisor_literal, DocumentError, GraphDocument};

/// Overrides the default cap on the number of edge classes enumerated.
pub const MAX_CLASSES_ENV: &str = "ADMGRAPH_MAX_CLASSES";

#[derive(Debug)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
}

#[derive(Parser, Debug)]
#[command(
    name = "admgraph",
    version,
    about = "Admissible invariants of polarized metrized graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a document and report graph, involution and fiber problems.
    Validate(Input),
    /// Effective resistances, all pairs or from one vertex.
    Resistance {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        source: Option<String>,
    },
    /// Canonical measure, and the admissible one when a divisor is known.
    Measure(Input),
    /// Green's function of the admissible measure.
    Green {
        #[command(flatten)]
        input: Input,
        /// Print the piecewise quadratic `y -> g(source, y)` instead of the
        /// vertex matrix.
        #[arg(long)]
        source: Option<String>,
    },
    /// The admissible constant epsilon and the constant c, solved numerically.
    Epsilon(Input),
    /// Epsilon from the closed form in the class lengths.
    EpsilonClosed(PolyInput),
    Lpoly(PolyInput),
    Mpoly(PolyInput),
    ClassifyEdges(Input),
    /// Node types and invariant counts of a fiber document.
    ClassifyNodes(Input),
    /// The lower bound r0 from invariant counts or a fiber document.
    Bound(BoundArgs),
    /// Closed form against the numeric solver.
    Compare(PolyInput),
    /// Emit a seeded random document.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct Input {
    /// Graph document.
    file: Option<PathBuf>,
    #[arg(long = "graph", value_name = "FILE", conflicts_with = "file")]
    graph: Option<PathBuf>,
    /// Inline divisor replacing the document's, e.g. '{"P":"1","Q":"1"}'.
    #[arg(long)]
    divisor: Option<String>,
}

#[derive(Args, Debug)]
struct PolyInput {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = StrategyArg::Symmetric)]
    strategy: StrategyArg,
    /// Largest number of edge classes to enumerate.
    #[arg(long)]
    max_classes: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Definition,
    Symmetric,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Definition => Strategy::Definition,
            StrategyArg::Symmetric => Strategy::Symmetric,
        }
    }
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Fiber document; counts are read off its dual graph.
    file: Option<PathBuf>,
    #[arg(long = "graph", value_name = "FILE", conflicts_with = "file")]
    graph: Option<PathBuf>,
    #[arg(long)]
    genus: Option<u32>,
    #[arg(long, value_name = "N")]
    xi0: Option<u64>,
    /// `j=N`, repeatable.
    #[arg(long, value_parser = parse_count)]
    xi: Vec<(u32, u64)>,
    /// `i=N`, repeatable.
    #[arg(long, value_parser = parse_count)]
    delta: Vec<(u32, u64)>,
    /// Print the per-term breakdown.
    #[arg(long)]
    report: bool,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    min_size: usize,
    #[arg(long, default_value_t = 3)]
    max_size: usize,
    /// Emit a fiber dual graph with component genera instead.
    #[arg(long)]
    fiber: bool,
    /// Keep all class lengths equal to one.
    #[arg(long)]
    unit_lengths: bool,
}

fn parse_count(s: &str) -> Result<(u32, u64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected INDEX=COUNT, got {s:?}"))?;
    let k = k.parse().map_err(|_| format!("bad index {k:?}"))?;
    let v = v.parse().map_err(|_| format!("bad count {v:?}"))?;
    Ok((k, v))
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("bad --divisor: {0}")]
    BadDivisor(String),
    #[error("no divisor in the document and none given with --divisor")]
    MissingDivisor,
    #[error("the document has no involution")]
    MissingInvolution,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hyperelliptic(#[from] HyperellipticError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Bogomolov(#[from] BogomolovError),
    #[error(transparent)]
    Testkit(#[from] TestkitError),
}

fn graph_code(e: &GraphError) -> &'static str {
    match e {
        GraphError::Invalid(_) => "invalid-graph",
        GraphError::UnknownVertex(_) => "unknown-vertex",
        GraphError::UnknownEdge(_) => "unknown-edge",
        GraphError::Disconnected => "disconnected",
        _ => "graph-error",
    }
}

fn hyperelliptic_code(e: &HyperellipticError) -> &'static str {
    match e {
        HyperellipticError::Graph(g) => graph_code(g),
        HyperellipticError::InvolutionMalformed(_) => "malformed-involution",
        HyperellipticError::AxiomViolation { .. } | HyperellipticError::NotHyperellipticConfiguration(_) => {
            "not-hyperelliptic"
        }
        HyperellipticError::NotSimpleRestriction(_) => "not-simple-restriction",
        HyperellipticError::DivisorNotInvariant => "divisor-not-invariant",
        _ => "hyperelliptic-error",
    }
}

fn potential_code(e: &PotentialError) -> &'static str {
    match e {
        PotentialError::Graph(g) => graph_code(g),
        PotentialError::DegreeMinusTwo => "degree-minus-two",
        PotentialError::SelfLoop(_) => "self-loop",
        PotentialError::Disconnected => "disconnected",
        _ => "solver-error",
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_)
            | CliError::FileNotFound(_)
            | CliError::Io { .. }
            | CliError::Document(_)
            | CliError::BadDivisor(_)
            | CliError::MissingDivisor
            | CliError::MissingInvolution => 2,
            _ => 1,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::FileNotFound(_) => "file-not-found",
            CliError::Io { .. } => "io-error",
            CliError::Document(DocumentError::Syntax { .. }) => "malformed-json",
            CliError::Document(DocumentError::Schema(_)) => "schema",
            CliError::BadDivisor(_) => "bad-divisor",
            CliError::MissingDivisor => "missing-divisor",
            CliError::MissingInvolution => "missing-involution",
            CliError::Graph(e) => graph_code(e),
            CliError::Hyperelliptic(e) => hyperelliptic_code(e),
            CliError::Potential(e) => potential_code(e),
            CliError::Poly(e) => match e {
                PolyError::Hyperelliptic(h) => hyperelliptic_code(h),
                PolyError::TooManyClasses { .. } => "too-many-classes",
                PolyError::DegreeMinusTwo => "degree-minus-two",
                PolyError::PolarizationShape => "polarization-shape",
                _ => "polynomial-error",
            },
            CliError::Bogomolov(e) => match e {
                BogomolovError::Graph(g) => graph_code(g),
                BogomolovError::Hyperelliptic(h) => hyperelliptic_code(h),
                BogomolovError::Potential(p) => potential_code(p),
                BogomolovError::GenusBelowThree(_) => "genus-below-three",
                BogomolovError::GenusOutOfRange(_) => "genus-out-of-range",
                BogomolovError::MissingInvolution => "missing-involution",
                BogomolovError::IndexOutOfRange { .. } => "index-out-of-range",
                _ => "fiber-error",
            },
            CliError::Testkit(e) => match e {
                TestkitError::Hyperelliptic(h) => hyperelliptic_code(h),
                _ => "infeasible-bounds",
            },
        }
    }

    fn to_json(&self) -> Value {
        let mut body = Map::new();
        body.insert("code".into(), json!(self.code()));
        body.insert("message".into(), json!(self.to_string()));
        match self {
            CliError::Document(DocumentError::Syntax { line, column, .. }) => {
                body.insert("line".into(), json!(line));
                body.insert("column".into(), json!(column));
            }
            CliError::Document(DocumentError::Schema(issues)) => {
                let list: Vec<Value> = issues
                    .iter()
                    .map(|i| json!({"path": i.path, "kind": i.kind.as_str(), "message": i.message}))
                    .collect();
                body.insert("issues".into(), Value::Array(list));
            }
            _ => {}
        }
        json!({ "error": body })
    }
}

fn line(v: &Value) -> String {
    let mut s = v.to_string();
    s.push('\n');
    s
}

/// Parses `argv` (program name first) and runs one subcommand.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: e.render().to_string(),
                },
                _ => {
                    let err = CliError::Usage(e.render().to_string().trim_end().to_string());
                    Outcome {
                        code: err.exit_code(),
                        stdout: line(&err.to_json()),
                    }
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((code, stdout)) => Outcome { code, stdout },
        Err(err) => Outcome {
            code: err.exit_code(),
            stdout: line(&err.to_json()),
        },
    }
}

type Run = Result<(u8, String), CliError>;

fn ok(v: Value) -> Run {
    Ok((0, line(&v)))
}

fn dispatch(command: Command) -> Run {
    match command {
        Command::Validate(input) => validate(&input),
        Command::Resistance { input, source } => resistance(&input, source.as_deref()),
        Command::Measure(input) => measure(&input),
        Command::Green { input, source } => green(&input, source.as_deref()),
        Command::Epsilon(input) => {
            let loaded = Loaded::read(&input)?;
            let (eps, c) = epsilon_numeric(&loaded.graph, &loaded.divisor()?)?;
            ok(json!({"epsilon": r(&eps), "c": r(&c)}))
        }
        Command::EpsilonClosed(p) => epsilon_closed(&p),
        Command::Lpoly(p) => lm(&p, false),
        Command::Mpoly(p) => lm(&p, true),
        Command::ClassifyEdges(input) => classify_edges(&input),
        Command::ClassifyNodes(input) => nodes(&input),
        Command::Bound(args) => bound(&args),
        Command::Compare(p) => compare(&p),
        Command::Gen(args) => generate(&args),
    }
}

fn r(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn rmap<'a>(m: impl IntoIterator<Item = (&'a String, &'a Rational)>) -> Value {
    Value::Object(m.into_iter().map(|(k, v)| (k.clone(), r(v))).collect())
}

fn poly_terms(p: &MultiPoly) -> Value {
    Value::Array(
        p.terms()
            .map(|(m, c)| json!({"monomial": m.vars(), "coefficient": r(c)}))
            .collect(),
    )
}

fn read_document(path: &PathBuf) -> Result<GraphDocument, CliError> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::FileNotFound(shown.clone()),
        _ => CliError::Io {
            path: shown.clone(),
            message: e.to_string(),
        },
    })?;
    Ok(crate::document::parse_graph_document(&bytes)?)
}

fn document_path(file: &Option<PathBuf>, graph: &Option<PathBuf>) -> Result<PathBuf, CliError> {
    file.clone()
        .or_else(|| graph.clone())
        .ok_or_else(|| CliError::Usage("a graph document is required (positional FILE or --graph)".into()))
}

struct Loaded {
    doc: GraphDocument,
    graph: MetrizedGraph,
    divisor_override: Option<Divisor>,
}

impl Loaded {
    fn read(input: &Input) -> Result<Loaded, CliError> {
        let doc = read_document(&document_path(&input.file, &input.graph)?)?;
        let divisor_override = input
            .divisor
            .as_deref()
            .map(parse_divisor_literal)
            .transpose()
            .map_err(CliError::BadDivisor)?;
        let graph = doc.graph()?;
        Ok(Loaded {
            doc,
            graph,
            divisor_override,
        })
    }

    fn maybe_divisor(&self) -> Result<Option<Divisor>, CliError> {
        let d = self.divisor_override.clone().or_else(|| self.doc.divisor());
        if let Some(d) = &d {
            d.check_supported(&self.graph)?;
        }
        Ok(d)
    }

    fn divisor(&self) -> Result<Divisor, CliError> {
        self.maybe_divisor()?.ok_or(CliError::MissingDivisor)
    }

    fn hyperelliptic(&self) -> Result<HyperellipticGraph, CliError> {
        let inv = self.doc.involution().ok_or(CliError::MissingInvolution)?;
        Ok(HyperellipticGraph::new(self.graph.clone(), inv)?)
    }

    fn fiber(&self) -> Result<FiberConfiguration, CliError> {
        let genera = self.doc.genera().unwrap_or_default();
        Ok(FiberConfiguration::new(
            self.graph.clone(),
            genera,
            self.doc.involution(),
        )?)
    }
}

fn cap(p: &PolyInput) -> Result<usize, CliError> {
    if let Some(n) = p.max_classes {
        return Ok(n);
    }
    match std::env::var(MAX_CLASSES_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_CLASSES_ENV} must be a nonnegative integer, got {s:?}"))),
        Err(_) => Ok(admgraph_core::poly::DEFAULT_MAX_CLASSES),
    }
}

fn validate(input: &Input) -> Run {
    let doc = read_document(&document_path(&input.file, &input.graph)?)?;
    let fiber_doc = doc.genera().is_some();
    let vertices: Vec<String> = doc.vertices.iter().map(|v| v.id.clone()).collect();
    let edges = doc.raw_edges();
    let report = validate_graph(&vertices, &edges);
    let issues: Vec<&GraphIssue> = report
        .issues
        .iter()
        .filter(|i| !(fiber_doc && matches!(i, GraphIssue::SelfLoop(_))))
        .collect();
    let mut valid = issues.is_empty();
    let mut out = Map::new();
    out.insert("vertices".into(), json!(report.vertex_count));
    out.insert("edges".into(), json!(report.edge_count));
    out.insert("connected".into(), json!(report.connected));
    out.insert(
        "issues".into(),
        Value::Array(issues.iter().map(|i| json!(i.to_string())).collect()),
    );
    if valid {
        let loaded = Loaded {
            graph: doc.graph()?,
            doc,
            divisor_override: None,
        };
        out.insert("betti_number".into(), json!(loaded.graph.betti_number()));
        if let Some(d) = loaded.doc.divisor() {
            out.insert("divisor_degree".into(), r(&d.degree()));
        }
        if fiber_doc {
            let fiber = match loaded.fiber() {
                Ok(cfg) => json!({"valid": true, "genus": cfg.genus()}),
                Err(e) => {
                    valid = false;
                    json!({"valid": false, "error": e.to_string()})
                }
            };
            out.insert("fiber".into(), fiber);
        } else if loaded.doc.involution.is_some() {
            let hyper = match loaded.hyperelliptic() {
                Ok(h) => json!({"valid": true, "size": h.size(), "irreducible": h.is_irreducible()}),
                Err(e) => {
                    valid = false;
                    json!({"valid": false, "error": e.to_string()})
                }
            };
            out.insert("hyperelliptic".into(), hyper);
        }
    }
    let mut all = Map::new();
    all.insert("valid".into(), json!(valid));
    all.extend(out);
    Ok((if valid { 0 } else { 1 }, line(&Value::Object(all))))
}

fn resistance(input: &Input, source: Option<&str>) -> Run {
    let loaded = Loaded::read(input)?;
    let g = &loaded.graph;
    match source {
        Some(s) => {
            g.require_vertex(s)?;
            let mut values = Map::new();
            for v in g.vertices() {
                values.insert(v.clone(), r(&effective_resistance(g, s, v)?));
            }
            ok(json!({"source": s, "resistance": values}))
        }
        None => {
            let matrix = resistance_matrix(g)?;
            let rows: Vec<Value> = matrix
                .iter()
                .map(|row| Value::Array(row.iter().map(r).collect()))
                .collect();
            ok(json!({"vertices": g.vertices(), "resistance": rows}))
        }
    }
}

fn measure_json(g: &MetrizedGraph, mu: &Measure) -> Value {
    json!({
        "vertices": rmap(&mu.vertex_masses),
        "edges": rmap(&mu.edge_densities),
        "total": r(&mu.total_mass(g)),
    })
}

fn measure(input: &Input) -> Run {
    let loaded = Loaded::read(input)?;
    let g = &loaded.graph;
    let mut out = Map::new();
    out.insert("canonical".into(), measure_json(g, &canonical_measure(g)?));
    if let Some(d) = loaded.maybe_divisor()? {
        out.insert("admissible".into(), measure_json(g, &admissible_measure(g, &d)?));
    }
    ok(Value::Object(out))
}

fn green(input: &Input, source: Option<&str>) -> Run {
    let loaded = Loaded::read(input)?;
    let g = &loaded.graph;
    let d = loaded.divisor()?;
    match source {
        Some(s) => {
            let pot = green_function(g, &d, s)?;
            let edges: Map<String, Value> = pot
                .edges
                .iter()
                .map(|(e, q)| {
                    (
                        e.clone(),
                        json!({"alpha": r(&q.alpha), "beta": r(&q.beta), "gamma": r(&q.gamma)}),
                    )
                })
                .collect();
            ok(json!({"source": s, "vertices": rmap(&pot.vertex_values), "edges": edges}))
        }
        None => {
            let kernel = GreenKernel::new(g, &d)?;
            let mut rows = Vec::new();
            for p in g.vertices() {
                let row: Result<Vec<Value>, PotentialError> = g
                    .vertices()
                    .iter()
                    .map(|q| kernel.pairing(p, q).map(|x| r(&x)))
                    .collect();
                rows.push(Value::Array(row?));
            }
            ok(json!({"vertices": g.vertices(), "green": rows}))
        }
    }
}

fn epsilon_closed(p: &PolyInput) -> Run {
    let loaded = Loaded::read(&p.input)?;
    let h = loaded.hyperelliptic()?;
    let d = loaded.divisor()?;
    let f = epsilon_closed_form_fn_capped(&h, &d, p.strategy.into(), cap(p)?)?;
    let value = f.evaluate(&h.class_lengths())?;
    ok(json!({
        "epsilon": r(&value),
        "strategy": Strategy::from(p.strategy).as_str(),
        "numerator": poly_terms(&f.numerator),
        "denominator": poly_terms(&f.denominator),
    }))
}

fn lm(p: &PolyInput, want_m: bool) -> Run {
    let loaded = Loaded::read(&p.input)?;
    let h = loaded.hyperelliptic()?;
    let (l, m) = lm_polynomials_capped(&h, p.strategy.into(), cap(p)?)?;
    let poly = if want_m { m } else { l };
    ok(json!({
        "strategy": Strategy::from(p.strategy).as_str(),
        "size": h.size(),
        "text": poly.to_string(),
        "terms": poly_terms(&poly),
    }))
}

fn classify_edges(input: &Input) -> Run {
    let loaded = Loaded::read(input)?;
    let h = loaded.hyperelliptic()?;
    let edges: Map<String, Value> = h
        .classify_edges()
        .iter()
        .map(|(e, k)| (e.clone(), json!(k.as_str())))
        .collect();
    let classes: Vec<Value> = h
        .classes()
        .iter()
        .map(|(c, members)| {
            json!({
                "class": c,
                "kind": h.class_kind(c).map(|k| k.as_str()),
                "members": members,
                "length": h.class_length(c).map(r),
            })
        })
        .collect();
    ok(json!({
        "size": h.size(),
        "irreducible": h.is_irreducible(),
        "edges": edges,
        "classes": classes,
    }))
}

fn counts_json(counts: &InvariantCounts) -> Value {
    json!({
        "xi": counts.xi_slice(),
        "delta": counts.delta_slice(),
        "delta0": counts.delta0(),
    })
}

fn nodes(input: &Input) -> Run {
    let loaded = Loaded::read(input)?;
    let cfg = loaded.fiber()?;
    let classes = classify_nodes(&cfg)?;
    let nodes: Map<String, Value> = classes
        .iter()
        .map(|(e, c)| {
            let v = match c {
                NodeClass::Type(i) => json!({"type": i}),
                NodeClass::Type0 { subtype } => json!({"type": 0, "subtype": subtype}),
            };
            (e.clone(), v)
        })
        .collect();
    let counts = count_invariants(&cfg)?;
    ok(json!({"genus": cfg.genus(), "nodes": nodes, "counts": counts_json(&counts)}))
}

fn bound(args: &BoundArgs) -> Run {
    let has_counts = args.xi0.is_some() || !args.xi.is_empty() || !args.delta.is_empty();
    let (counts, fiber) = match args.file.as_ref().or(args.graph.as_ref()) {
        Some(path) => {
            if has_counts {
                return Err(CliError::Usage(
                    "count flags cannot be combined with a fiber document".into(),
                ));
            }
            let doc = read_document(path)?;
            let loaded = Loaded {
                graph: doc.graph()?,
                doc,
                divisor_override: None,
            };
            let cfg = loaded.fiber()?;
            if let Some(g) = args.genus {
                if g != cfg.genus() {
                    return Err(CliError::Usage(format!(
                        "--genus {g} disagrees with the fiber's genus {}",
                        cfg.genus()
                    )));
                }
            }
            (count_invariants(&cfg)?, Some(cfg))
        }
        None => {
            let genus = args
                .genus
                .ok_or_else(|| CliError::Usage("--genus is required without a fiber document".into()))?;
            let mut counts = InvariantCounts::new(genus);
            if let Some(n) = args.xi0 {
                counts.set_xi(0, n)?;
            }
            for &(j, n) in &args.xi {
                counts.set_xi(j, n)?;
            }
            for &(i, n) in &args.delta {
                counts.set_delta(i, n)?;
            }
            (counts, None)
        }
    };
    let r0 = r0_bound(&counts)?;
    if !args.report {
        return ok(json!({"r0": r(&r0)}));
    }
    let report = pairing_radicand(&counts)?;
    let terms: Vec<Value> = report
        .terms
        .iter()
        .map(|t| {
            json!({
                "name": t.name,
                "count": t.count,
                "omega": r(&t.omega),
                "epsilon_upper": r(&t.epsilon_upper),
                "radicand": r(&t.radicand),
            })
        })
        .collect();
    let mut out = Map::new();
    out.insert("r0".into(), r(&r0));
    out.insert("genus".into(), json!(report.genus));
    out.insert("counts".into(), counts_json(&counts));
    out.insert("omega".into(), r(&report.omega));
    out.insert("epsilon_upper".into(), r(&report.epsilon_upper));
    out.insert("radicand".into(), r(&report.radicand));
    out.insert("terms".into(), Value::Array(terms));
    if let Some(cfg) = fiber {
        let eps = fiber_epsilon(&cfg)?;
        out.insert(
            "epsilon".into(),
            json!({"type0": r(&eps.type0), "separating": r(&eps.separating), "total": r(&eps.total)}),
        );
    }
    if let Some(w) = report.warning {
        out.insert("warning".into(), json!(w));
    }
    ok(Value::Object(out))
}

fn compare(p: &PolyInput) -> Run {
    let loaded = Loaded::read(&p.input)?;
    let h = loaded.hyperelliptic()?;
    let d = loaded.divisor()?;
    let closed = epsilon_closed_form_fn_capped(&h, &d, p.strategy.into(), cap(p)?)?.evaluate(&h.class_lengths())?;
    let (numeric, c) = epsilon_numeric(h.graph(), &d)?;
    let agree = closed == numeric;
    let v = json!({
        "closed_form": r(&closed),
        "numeric": r(&numeric),
        "c": r(&c),
        "agree": agree,
        "strategy": Strategy::from(p.strategy).as_str(),
    });
    Ok((if agree { 0 } else { 1 }, line(&v)))
}

fn generate(args: &GenArgs) -> Run {
    let doc = if args.fiber {
        let cfg = random_fiber(args.seed)?;
        GraphDocument::from_parts(cfg.graph(), cfg.involution(), None, Some(cfg.genera()))
    } else {
        if args.min_size > args.max_size {
            return Err(CliError::Usage("--min-size exceeds --max-size".into()));
        }
        let h = random_hyperelliptic(args.seed, args.min_size..=args.max_size)?;
        let h = if args.unit_lengths {
            h
        } else {
            random_lengths(&h, args.seed)
        };
        let d = random_polarization(&h, args.seed);
        GraphDocument::from_hyperelliptic(&h, Some(&d))
    };
    Ok((0, doc.to_canonical_string()))
}
