//! Batch driver: parse inputs, dispatch computations, emit text or JSON
//! reports, and run the seeded oracle suites.
//!
//! Exit codes: 0 on success, 1 on input or validation failure, 2 on an
//! internal certification failure (a checked certificate or oracle suite
//! reporting a violation).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mtk_core::digraph::GraphJson;
use mtk_core::dynamics;
use mtk_core::ktheory;
use mtk_core::lifttree;
use mtk_core::oracle;
use mtk_core::presentation::{self, GraphOfGroupsJson, PresentationJson, QuotientPresentation};
use mtk_core::setfamily;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "mtk",
    about = "Exact invariants of multitree quotient data: K-theory, dynamics deciders, set-family checks, lift-tree oracles",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Input file (JSON, schema per input kind)
    input: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an input file (graph, presentation, graph-of-groups, or set family)
    Validate(CommonArgs),
    /// K-groups of the boundary crossed product of a presentation
    Ktheory(CommonArgs),
    /// Assembled six-term data: id - alpha_i and the corner groups
    Sixterm(CommonArgs),
    /// All dynamics deciders for a presentation
    Dynamics {
        #[command(flatten)]
        common: CommonArgs,
        /// Emit witnesses (cycles, paths, primes) alongside the verdicts
        #[arg(long)]
        certificate: bool,
    },
    /// Translate graph-of-groups data to the dual quotient presentation
    Dual(CommonArgs),
    /// Run every set-family check on a family file
    Setfamily(CommonArgs),
    /// Build the lift tree over a base vertex
    Lifttree {
        #[command(flatten)]
        common: CommonArgs,
        /// Base vertex (defaults to the first vertex in sorted order)
        #[arg(long)]
        base: Option<String>,
        /// Truncation depth
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Node-count guard
        #[arg(long, default_value_t = lifttree::DEFAULT_MAX_NODES)]
        max_nodes: usize,
        /// Run the structural verification checks
        #[arg(long)]
        verify: bool,
        /// Write a DOT rendering to this path ("-" for stdout)
        #[arg(long)]
        dot: Option<String>,
    },
    /// Run the seeded cross-check suites
    Oracle {
        /// One suite name, or all suites when omitted
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Case count per suite (defaults to each suite's standard size)
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Input-side problems exit 1; failed internal certificates exit 2.
enum CliError {
    Input(String),
    Certification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Certification(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Certification(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap's default usage-error exit code collides with the
            // certification code, so route usage errors to 1
            if err.use_stderr() {
                eprint!("{err}");
                return ExitCode::from(1);
            }
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli) {
        Ok(output) => {
            println!("{output}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Validate(common) => cmd_validate(&common),
        Command::Ktheory(common) => cmd_ktheory(&common),
        Command::Sixterm(common) => cmd_sixterm(&common),
        Command::Dynamics {
            common,
            certificate,
        } => cmd_dynamics(&common, certificate),
        Command::Dual(common) => cmd_dual(&common),
        Command::Setfamily(common) => cmd_setfamily(&common),
        Command::Lifttree {
            common,
            base,
            depth,
            max_nodes,
            verify,
            dot,
        } => cmd_lifttree(
            &common,
            base.as_deref(),
            depth,
            max_nodes,
            verify,
            dot.as_deref(),
        ),
        Command::Oracle {
            suite,
            seed,
            cases,
            format,
        } => cmd_oracle(suite.as_deref(), seed, cases, format),
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn parse_as<T: serde::de::DeserializeOwned>(path: &Path, value: Value) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_presentation(path: &Path) -> Result<QuotientPresentation, CliError> {
    let value = read_json(path)?;
    let raw: PresentationJson = parse_as(path, value)?;
    raw.to_presentation()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn valid_presentation(path: &Path) -> Result<QuotientPresentation, CliError> {
    let p = load_presentation(path)?;
    let report = presentation::validate(&p);
    if report.ok() {
        Ok(p)
    } else {
        Err(CliError::Input(format!(
            "{} failed validation:\n{report}",
            path.display()
        )))
    }
}

fn render(format: Format, command: &str, body: Value, text: String) -> String {
    match format {
        Format::Text => text,
        Format::Json => {
            let envelope = json!({
                "schema": SCHEMA_VERSION,
                "command": command,
                "report": body,
            });
            serde_json::to_string_pretty(&envelope).expect("reports serialize")
        }
    }
}

fn to_value<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("reports serialize")
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

fn cmd_validate(common: &CommonArgs) -> Result<String, CliError> {
    let value = read_json(&common.input)?;
    let kind = detect_kind(&value);
    let (ok, detail) = match kind {
        InputKind::Family => {
            let raw: setfamily::SetFamilyJson = parse_as(&common.input, value)?;
            match raw.to_family() {
                Ok(_) => (true, json!({"violations": []})),
                Err(e) => (false, json!({"violations": [e.to_string()]})),
            }
        }
        InputKind::GraphOfGroups => {
            let raw: GraphOfGroupsJson = parse_as(&common.input, value)?;
            let gog = raw
                .to_gog()
                .map_err(|e| CliError::Input(format!("{}: {e}", common.input.display())))?;
            let report = presentation::validate_gog(&gog);
            (report.ok(), to_value(&report))
        }
        InputKind::Presentation => {
            let raw: PresentationJson = parse_as(&common.input, value)?;
            let p = raw
                .to_presentation()
                .map_err(|e| CliError::Input(format!("{}: {e}", common.input.display())))?;
            let report = presentation::validate(&p);
            (report.ok(), to_value(&report))
        }
        InputKind::Graph => {
            let raw: GraphJson = parse_as(&common.input, value)?;
            if raw.bar.is_some() {
                match raw.to_undirected() {
                    Ok(u) => (
                        true,
                        json!({"violations": [], "nonsingular": u.is_nonsingular()}),
                    ),
                    Err(e) => (false, json!({"violations": [e.to_string()]})),
                }
            } else {
                match raw.to_digraph() {
                    Ok(g) => (
                        true,
                        json!({
                            "violations": [],
                            "multitree": mtk_core::digraph::is_multitree(&g),
                        }),
                    ),
                    Err(e) => (false, json!({"violations": [e.to_string()]})),
                }
            }
        }
    };
    let body = json!({"kind": kind.name(), "ok": ok, "detail": detail});
    let text = if ok {
        format!("{}: ok ({})", common.input.display(), kind.name())
    } else {
        format!(
            "{}: INVALID ({})\n{}",
            common.input.display(),
            kind.name(),
            serde_json::to_string_pretty(&detail).unwrap()
        )
    };
    let rendered = render(common.format, "validate", body, text);
    if ok {
        Ok(rendered)
    } else {
        // print the report, then fail
        println!("{rendered}");
        Err(CliError::Input(format!(
            "{} failed validation",
            common.input.display()
        )))
    }
}

enum InputKind {
    Graph,
    Presentation,
    GraphOfGroups,
    Family,
}

impl InputKind {
    fn name(&self) -> &'static str {
        match self {
            InputKind::Graph => "graph",
            InputKind::Presentation => "presentation",
            InputKind::GraphOfGroups => "graph-of-groups",
            InputKind::Family => "set-family",
        }
    }
}

fn detect_kind(value: &Value) -> InputKind {
    let has = |key: &str| value.get(key).is_some();
    if has("universe") {
        InputKind::Family
    } else if has("alpha") || (has("bar") && has("classes")) {
        InputKind::GraphOfGroups
    } else if has("classes") {
        InputKind::Presentation
    } else {
        InputKind::Graph
    }
}

// ---------------------------------------------------------------------------
// ktheory / sixterm
// ---------------------------------------------------------------------------

fn cmd_ktheory(common: &CommonArgs) -> Result<String, CliError> {
    let p = valid_presentation(&common.input)?;
    let report = ktheory::k_theory(&p)
        .map_err(|e| CliError::Certification(format!("k-theory failed: {e}")))?;
    Ok(render(
        common.format,
        "ktheory",
        to_value(&report),
        report.to_string(),
    ))
}

fn cmd_sixterm(common: &CommonArgs) -> Result<String, CliError> {
    let p = valid_presentation(&common.input)?;
    let report = ktheory::six_term_report(&p)
        .map_err(|e| CliError::Certification(format!("six-term report failed: {e}")))?;
    Ok(render(
        common.format,
        "sixterm",
        to_value(&report),
        report.to_string(),
    ))
}

// ---------------------------------------------------------------------------
// dynamics
// ---------------------------------------------------------------------------

fn cmd_dynamics(common: &CommonArgs, certificate: bool) -> Result<String, CliError> {
    let p = valid_presentation(&common.input)?;
    let g = p.graph();

    let cofinality =
        dynamics::cofinality(g).map_err(|e| CliError::Input(format!("cofinality undefined: {e}")))?;
    let aperiodicity = dynamics::aperiodicity(g);
    let contractivity = dynamics::local_contractivity(&p)
        .map_err(|e| CliError::Certification(format!("local contractivity failed: {e}")))?;
    let freeness = dynamics::topological_freeness(&p)
        .map_err(|e| CliError::Certification(format!("topological freeness failed: {e}")))?;

    let tri = |t: &dynamics::TriState| match t {
        dynamics::TriState::Yes => "yes".to_string(),
        dynamics::TriState::No => "no".to_string(),
        dynamics::TriState::Unknown(reason) => format!("unknown ({reason})"),
    };

    let mut text = String::new();
    let _ = writeln!(
        text,
        "cofinal (minimal boundary action): {}",
        cofinality.cofinal
    );
    let _ = writeln!(text, "aperiodic: {}", aperiodicity.aperiodic);
    let _ = writeln!(text, "locally contractive: {}", tri(&contractivity.verdict));
    let _ = write!(text, "topologically free: {}", tri(&freeness.verdict));
    if certificate {
        if let Some(failure) = &cofinality.failure {
            let _ = write!(
                text,
                "\ncofinality failure: cycle [{}] cannot reach {}",
                failure.cycle.join(" "),
                failure.unreachable_vertex
            );
        }
        if let Some(cycle) = &aperiodicity.entranceless_cycle {
            let _ = write!(text, "\nentranceless cycle: [{}]", cycle.join(" "));
        }
        for component in &freeness.components {
            for (vertex, witness) in &component.witnesses {
                let _ = write!(
                    text,
                    "\nunbounded denominators at {vertex}: prime {}, access [{}], cycle [{}]",
                    witness.prime,
                    witness.access.join(" "),
                    witness.cycle.join(" ")
                );
            }
        }
    }

    let mut body = json!({
        "cofinal": cofinality.cofinal,
        "aperiodic": aperiodicity.aperiodic,
        "locally_contractive": to_value(&contractivity.verdict),
        "topologically_free": to_value(&freeness.verdict),
    });
    if certificate {
        body["certificates"] = json!({
            "cofinality": to_value(&cofinality),
            "aperiodicity": to_value(&aperiodicity),
            "local_contractivity": to_value(&contractivity),
            "topological_freeness": to_value(&freeness),
        });
    }
    Ok(render(common.format, "dynamics", body, text))
}

// ---------------------------------------------------------------------------
// dual
// ---------------------------------------------------------------------------

fn cmd_dual(common: &CommonArgs) -> Result<String, CliError> {
    let value = read_json(&common.input)?;
    let raw: GraphOfGroupsJson = parse_as(&common.input, value)?;
    let gog = raw
        .to_gog()
        .map_err(|e| CliError::Input(format!("{}: {e}", common.input.display())))?;
    let report = presentation::validate_gog(&gog);
    if !report.ok() {
        return Err(CliError::Input(format!(
            "{} failed validation:\n{report}",
            common.input.display()
        )));
    }
    let dual = presentation::dual_quotient(&gog)
        .map_err(|e| CliError::Certification(format!("dual translation failed: {e}")))?;
    if !presentation::validate(&dual).ok() {
        return Err(CliError::Certification(
            "dual quotient failed its own validation".to_string(),
        ));
    }
    // the output is itself a presentation input file
    let out = PresentationJson::from_presentation(&dual);
    serde_json::to_string_pretty(&out)
        .map_err(|e| CliError::Certification(format!("serialization failed: {e}")))
}

// ---------------------------------------------------------------------------
// setfamily
// ---------------------------------------------------------------------------

fn cmd_setfamily(common: &CommonArgs) -> Result<String, CliError> {
    let value = read_json(&common.input)?;
    let raw: setfamily::SetFamilyJson = parse_as(&common.input, value)?;
    let (family, action) = raw
        .to_family()
        .map_err(|e| CliError::Input(format!("{}: {e}", common.input.display())))?;

    let independent = setfamily::is_independent(&family);
    let aligned = setfamily::is_finitely_aligned(&family);
    let (cond_a, cond_b) = setfamily::verify_prop_equivalence(&family)
        .map_err(|e| CliError::Certification(format!("spanning-condition check failed: {e}")))?;
    let primitives = setfamily::primitive_parts(&family);

    let transition = setfamily::transition_matrix(&family);
    let transition_value = match &transition {
        Ok(t) => to_value(t),
        Err(e) => json!({"rejected": e.to_string()}),
    };

    let mut decompositions = serde_json::Map::new();
    for i in family.index_ids() {
        for j in family.index_ids() {
            if i > j {
                continue;
            }
            let entry = match setfamily::decompose_intersection(&family, i, j) {
                Ok(Some(parts)) => json!(parts),
                Ok(None) => json!("no partition"),
                Err(e) => {
                    return Err(CliError::Certification(format!(
                        "decomposition uniqueness violated: {e}"
                    )))
                }
            };
            decompositions.insert(format!("{i} & {j}"), entry);
        }
    }

    let saturation = if independent && aligned {
        let all: BTreeSet<String> = family.index_ids().iter().cloned().collect();
        match setfamily::saturate(&family, &all, &action) {
            Ok(j) => json!(j),
            Err(e) => json!({"rejected": e.to_string()}),
        }
    } else {
        json!({"rejected": "family is not independent and finitely aligned"})
    };

    let body = json!({
        "independent": independent,
        "finitely_aligned": aligned,
        "spanning_conditions": {"primitive_form": cond_a, "intersection_form": cond_b},
        "primitive_parts": primitives,
        "transition_matrix": transition_value,
        "pairwise_decompositions": Value::Object(decompositions),
        "saturate_all": saturation,
    });

    let mut text = String::new();
    let _ = writeln!(text, "independent: {independent}");
    let _ = writeln!(text, "finitely aligned: {aligned}");
    let _ = writeln!(
        text,
        "spanning conditions: primitive form {cond_a}, intersection form {cond_b}"
    );
    match &transition {
        Ok(t) => {
            let _ = writeln!(
                text,
                "transition matrix (index order {:?}, det {}):",
                t.index_ids, t.determinant
            );
            let _ = write!(text, "{}", t.matrix);
        }
        Err(e) => {
            let _ = writeln!(text, "transition matrix rejected: {e}");
        }
    }
    let _ = write!(text, "primitive parts:");
    for (id, atoms) in &primitives {
        let _ = write!(text, "\n  {id}: {{{}}}", atoms.join(", "));
    }
    Ok(render(common.format, "setfamily", body, text))
}

// ---------------------------------------------------------------------------
// lifttree
// ---------------------------------------------------------------------------

fn cmd_lifttree(
    common: &CommonArgs,
    base: Option<&str>,
    depth: usize,
    max_nodes: usize,
    verify: bool,
    dot: Option<&str>,
) -> Result<String, CliError> {
    let p = valid_presentation(&common.input)?;
    let base = base
        .map(str::to_string)
        .or_else(|| p.graph().vertex_ids().first().cloned())
        .ok_or_else(|| CliError::Input("presentation has no vertices".to_string()))?;
    let tree = lifttree::build_lift_tree(&p, &base, depth, max_nodes)
        .map_err(|e| CliError::Input(format!("lift tree build failed: {e}")))?;

    let mut per_depth = vec![0usize; depth + 1];
    for node in tree.nodes() {
        per_depth[tree.node_depth(node).unwrap()] += 1;
    }

    let verification = verify.then(|| lifttree::verify_lift_invariants(&tree));
    if let Some(report) = &verification {
        if !report.ok() {
            let detail = report
                .violations
                .iter()
                .map(|v| format!("[{}] node {}: {}", v.check, v.node, v.message))
                .collect::<Vec<_>>()
                .join("\n");
            return Err(CliError::Certification(format!(
                "lift tree verification failed:\n{detail}"
            )));
        }
    }

    if let Some(path) = dot {
        let rendered = tree.to_dot();
        if path == "-" {
            print!("{rendered}");
        } else {
            std::fs::write(path, rendered).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
        }
    }

    let body = json!({
        "base": tree.base(),
        "depth": tree.depth(),
        "nodes": tree.node_count(),
        "nodes_per_depth": per_depth,
        "verified": verification.as_ref().map(|r| json!({
            "ok": r.ok(),
            "checks_run": r.checks_run,
        })),
    });
    let mut text = format!(
        "lift tree over {} to depth {}: {} nodes ({})",
        tree.base(),
        tree.depth(),
        tree.node_count(),
        per_depth
            .iter()
            .enumerate()
            .map(|(d, n)| format!("{n} at depth {d}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    if let Some(report) = &verification {
        let _ = write!(text, "\nverification: ok ({} checks)", report.checks_run);
    }
    Ok(render(common.format, "lifttree", body, text))
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

fn cmd_oracle(
    suite: Option<&str>,
    seed: u64,
    cases: Option<usize>,
    format: Format,
) -> Result<String, CliError> {
    let suites: Vec<&str> = match suite {
        Some(name) => {
            if !oracle::SUITES.contains(&name) {
                return Err(CliError::Input(format!(
                    "no suite named {name:?}; known suites: {}",
                    oracle::SUITES.join(", ")
                )));
            }
            vec![name]
        }
        None => oracle::SUITES.to_vec(),
    };
    let mut reports = Vec::new();
    for name in suites {
        let count = cases.unwrap_or_else(|| oracle::default_cases(name));
        match oracle::run_suite(name, seed, count) {
            Ok(report) => reports.push(report),
            Err(failure) => return Err(CliError::Certification(failure.to_string())),
        }
    }
    let body = json!({
        "seed": seed,
        "suites": reports.iter().map(|r| json!({
            "suite": r.suite,
            "cases": r.cases,
            "checks": r.checks,
            "notes": r.notes,
        })).collect::<Vec<_>>(),
    });
    let text = reports
        .iter()
        .map(|r| {
            let notes = if r.notes.is_empty() {
                String::new()
            } else {
                format!("  [{}]", r.notes.join("; "))
            };
            format!(
                "{:<10} ok  ({} cases, {} checks){notes}",
                r.suite, r.cases, r.checks
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(render(format, "oracle", body, text))
}
