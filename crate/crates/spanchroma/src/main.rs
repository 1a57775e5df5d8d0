//! Command-line front end. Exit codes: 0 = computed, 1 = verdict-negative
//! (invalid colouring, no homomorphism, failed certificate, ...),
//! 2 = usage or input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use spanchroma::gf;
use spanchroma::graph::{
    chromatic_number, clique_number, find_homomorphism_jobs, parse_graph, two_core, write_graph,
    Graph, HomMode, HomResult,
};
use spanchroma::spancolour::{
    basis_census, build_rep_graph, colouring_from_json, colouring_to_json, convert_colouring,
    count_span_extensions, hom_obstruction, span_chromatic_number, validate_colouring, Variant,
};
use spanchroma::sr::{
    a_n_graph, classify_complex, complex_from_json, complex_to_json, minimal_nonfaces, p_max,
    SimplicialComplex, DEFAULT_TRUNC,
};
use spanchroma::steenrod::{
    action_from_colouring, action_from_json, action_to_json, certificate_to_json, chi_top_bracket,
    classify_two_x, extract_colouring, modp_p1_action, polyzp_to_json, verify_action,
    SteenrodError,
};

#[derive(Parser)]
#[command(name = "spanchroma", version, about = "Span colourings and Steenrod actions")]
struct Cli {
    /// Emit JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker count for the homomorphism search.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Reserved; accepted and ignored (no randomized algorithms).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// The representing graph A_{k^n} over GF(q).
    Repgraph {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chromatic number of a graph.
    Chromatic { graph: PathBuf },
    /// Clique number of a graph.
    Clique { graph: PathBuf },
    /// Least n admitting a span colouring over GF(q).
    SpanChromatic {
        graph: PathBuf,
        #[arg(long)]
        q: u64,
    },
    /// Graph homomorphism search G -> H.
    Hom {
        g: PathBuf,
        h: PathBuf,
        #[arg(long)]
        count: bool,
    },
    /// Iterated removal of degree <= 1 vertices.
    TwoCore { graph: PathBuf },
    /// Check a span colouring against a graph.
    ValidateColouring { graph: PathBuf, colouring: PathBuf },
    /// Convert a colouring between the weak, intermediate, and full variants.
    ConvertColouring {
        colouring: PathBuf,
        #[arg(long)]
        to: String,
        /// Graph used for validity and for the edge-aware conversion steps;
        /// defaults to the edgeless graph on the colouring's vertices.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Number of full extensions of an intermediate colouring.
    CountExtensions { graph: PathBuf, colouring: PathBuf },
    /// Unordered-basis census of A_{k^n} cliques.
    Census {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
    },
    /// Divisibility obstruction to Hom(A_{k^p}, K_p).
    Obstruction {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
    },
    /// Complex constructions.
    Complex {
        #[command(subcommand)]
        cmd: ComplexCmd,
    },
    /// Facet-intersection poset of a complex.
    Pmax { complex: PathBuf },
    /// Minimal non-faces of a complex.
    Nonfaces { complex: PathBuf },
    /// Recognize joins of a simplex with a complex or graph.
    Classify { complex: PathBuf },
    /// Steenrod action construction, verification, and extraction.
    Steenrod {
        #[command(subcommand)]
        cmd: SteenrodCmd,
    },
    /// Realizability test for complexes with two degree-4 vertices.
    ClassifyN2 { complex: PathBuf },
    /// Both computable ends of s_2χ(G) <= χ_Top(G) <= χ(G).
    Bracket { graph: PathBuf },
}

#[derive(Subcommand)]
enum ComplexCmd {
    /// Join of the (n-1)-simplex with a graph complex.
    Join {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    colouring: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TRUNC)]
    max_degree: u32,
}

#[derive(Subcommand)]
enum SteenrodCmd {
    /// Build the action induced by a weak GF(2) span colouring.
    Build(BuildArgs),
    /// Verify an action; prints the four-part certificate.
    Verify { action: PathBuf },
    /// Extract a weak span colouring from an action on A(n, G).
    Extract { action: PathBuf },
    /// Mod-p P^1 generator images from a weak GF(p) span colouring.
    Modp {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        rest: BuildArgs,
    },
}

enum Failure {
    /// Mathematical "no" answers.
    Verdict(String),
    /// Bad input or I/O.
    Input(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_graph(path: &PathBuf) -> Result<Graph, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(parse_graph(&text)?)
}

fn read_json(path: &PathBuf) -> Result<Value, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_complex(path: &PathBuf) -> Result<SimplicialComplex, Failure> {
    Ok(complex_from_json(&read_json(path)?)?)
}

fn emit(json_mode: bool, value: Value, human: String) {
    use std::io::Write;
    let out = if json_mode {
        serde_json::to_string_pretty(&value).expect("serializable")
    } else {
        human
    };
    // tolerate closed pipes (e.g. `spanchroma ... | head`)
    let _ = writeln!(std::io::stdout(), "{out}");
}

fn names_of(k: &SimplicialComplex, set: &[usize]) -> String {
    let parts: Vec<&str> = set.iter().map(|&v| k.names()[v].as_str()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn steenrod_failure(e: SteenrodError) -> Failure {
    match e {
        SteenrodError::InvalidColouring(_)
        | SteenrodError::NotAnG
        | SteenrodError::Sq4NotInPrincipalIdeal(_)
        | SteenrodError::ExtractionInvalid(_) => Failure::Verdict(e.to_string()),
        other => Failure::Input(other.to_string()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let json_mode = cli.json;
    match cli.cmd {
        Cmd::Repgraph { q, n, out } => {
            let field = gf::make_field(q, 1).or_else(|_| {
                // prime powers: factor q as p^e with the smallest prime p
                let p = (2..=q).find(|p| q % p == 0).unwrap_or(q);
                let mut e = 0;
                let mut r = q;
                while r > 1 && r % p == 0 {
                    r /= p;
                    e += 1;
                }
                if r != 1 {
                    return Err(gf::GfError::NotPrime(q));
                }
                gf::make_field(p, e)
            })?;
            let rep = build_rep_graph(field, n)?;
            let text = write_graph(&rep.graph);
            if let Some(path) = out {
                fs::write(&path, &text)
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
            let labels: Vec<String> = rep
                .graph
                .labels()
                .map(|ls| ls.to_vec())
                .unwrap_or_default();
            emit(
                json_mode,
                json!({
                    "q": q,
                    "n": n,
                    "vertices": rep.graph.n_vertices(),
                    "edges": rep.graph.edges(),
                    "labels": labels,
                }),
                format!(
                    "A_{{k^{n}}} over GF({q}): {} vertices, {} edges\n{}",
                    rep.graph.n_vertices(),
                    rep.graph.n_edges(),
                    text.trim_end()
                ),
            );
        }
        Cmd::Chromatic { graph } => {
            let g = read_graph(&graph)?;
            let chi = chromatic_number(&g);
            emit(json_mode, json!({ "chromatic": chi }), format!("chromatic number: {chi}"));
        }
        Cmd::Clique { graph } => {
            let g = read_graph(&graph)?;
            let w = clique_number(&g);
            emit(json_mode, json!({ "clique": w }), format!("clique number: {w}"));
        }
        Cmd::SpanChromatic { graph, q } => {
            let g = read_graph(&graph)?;
            let field = gf::make_field(q, 1)?;
            let (n, witness) = span_chromatic_number(&g, field)?;
            emit(
                json_mode,
                json!({ "span_chromatic": n, "witness": colouring_to_json(&witness) }),
                format!("span chromatic number over GF({q}): {n}"),
            );
        }
        Cmd::Hom { g, h, count } => {
            let g = read_graph(&g)?;
            let h = read_graph(&h)?;
            let mode = if count { HomMode::Count } else { HomMode::First };
            match find_homomorphism_jobs(&g, &h, mode, cli.jobs.max(1)) {
                HomResult::Count(c) => {
                    emit(json_mode, json!({ "count": c }), format!("homomorphisms: {c}"));
                }
                HomResult::First(Some(hom)) => {
                    emit(
                        json_mode,
                        json!({ "found": true, "map": hom.map }),
                        format!("homomorphism: {:?}", hom.map),
                    );
                }
                HomResult::First(None) => {
                    return Err(Failure::Verdict("no homomorphism".into()));
                }
            }
        }
        Cmd::TwoCore { graph } => {
            let g = read_graph(&graph)?;
            let tc = two_core(&g);
            emit(
                json_mode,
                json!({
                    "removed": tc.removed,
                    "kept": tc.kept,
                    "core": { "vertices": tc.graph.n_vertices(), "edges": tc.graph.edges() },
                }),
                format!(
                    "removed (in order): {:?}\nkept: {:?}\n{}",
                    tc.removed,
                    tc.kept,
                    write_graph(&tc.graph).trim_end()
                ),
            );
        }
        Cmd::ValidateColouring { graph, colouring } => {
            let g = read_graph(&graph)?;
            let c = colouring_from_json(&read_json(&colouring)?)?;
            match validate_colouring(&g, &c)? {
                None => emit(json_mode, json!({ "valid": true }), "valid".into()),
                Some(v) => {
                    return Err(Failure::Verdict(format!(
                        "invalid at vertex {}: {}",
                        v.vertex, v.reason
                    )));
                }
            }
        }
        Cmd::ConvertColouring { colouring, to, graph } => {
            let c = colouring_from_json(&read_json(&colouring)?)?;
            let target: Variant =
                to.parse().map_err(|e: String| Failure::Input(e))?;
            let g = match graph {
                Some(p) => read_graph(&p)?,
                None => Graph::empty(c.len()),
            };
            let out = convert_colouring(&g, &c, target)?;
            let v = colouring_to_json(&out);
            emit(
                json_mode,
                v.clone(),
                serde_json::to_string_pretty(&v).expect("serializable"),
            );
        }
        Cmd::CountExtensions { graph, colouring } => {
            let g = read_graph(&graph)?;
            let c = colouring_from_json(&read_json(&colouring)?)?;
            let count = count_span_extensions(&g, &c)?;
            emit(
                json_mode,
                json!({ "extensions": count.to_string() }),
                format!("full extensions: {count}"),
            );
        }
        Cmd::Census { q, n } => {
            let field = gf::make_field(q, 1)?;
            let report = basis_census(field, n)?;
            if !report.matches {
                return Err(Failure::Verdict(format!(
                    "census mismatch: counted {} bases against formula {}",
                    report.basis_count, report.basis_count_formula
                )));
            }
            emit(
                json_mode,
                json!({
                    "q": q,
                    "n": n,
                    "bases": report.basis_count.to_string(),
                    "bases_formula": report.basis_count_formula.to_string(),
                    "scaling_classes": report.quotient_count.to_string(),
                    "fibers": report.fiber_counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "fiber_formula": report.fiber_formula.to_string(),
                    "matches": report.matches,
                }),
                format!(
                    "bases: {} (formula {}), scaling classes: {}, fiber size {} over each vertex: formulas match",
                    report.basis_count,
                    report.basis_count_formula,
                    report.quotient_count,
                    report.fiber_formula
                ),
            );
        }
        Cmd::Obstruction { q, p } => {
            let ob = hom_obstruction(q, p)?;
            let value = json!({
                "q": ob.q,
                "p": ob.p,
                "q_mod_p": ob.q_mod_p,
                "divides": ob.divides,
                "applies": ob.applies,
            });
            if ob.applies {
                emit(
                    json_mode,
                    value,
                    format!("χ(A_{{k^{p}}}) > {p}: obstruction holds"),
                );
            } else {
                emit(json_mode, value, format!("no obstruction for q = {q}, p = {p}"));
                return Err(Failure::Verdict(String::new()));
            }
        }
        Cmd::Complex { cmd: ComplexCmd::Join { n, graph } } => {
            let g = read_graph(&graph)?;
            let k = a_n_graph(n, &g);
            let v = complex_to_json(&k);
            emit(json_mode, v.clone(), serde_json::to_string_pretty(&v).expect("serializable"));
        }
        Cmd::Pmax { complex } => {
            let k = read_complex(&complex)?;
            let pm = p_max(&k);
            let human: Vec<String> = pm.elements.iter().map(|e| names_of(&k, e)).collect();
            emit(
                json_mode,
                json!({ "elements": pm.elements }),
                human.join("\n"),
            );
        }
        Cmd::Nonfaces { complex } => {
            let k = read_complex(&complex)?;
            let nf = minimal_nonfaces(&k);
            let human: Vec<String> = nf.iter().map(|e| names_of(&k, e)).collect();
            emit(json_mode, json!({ "nonfaces": nf }), human.join("\n"));
        }
        Cmd::Classify { complex } => {
            let k = read_complex(&complex)?;
            let cls = classify_complex(&k)?;
            let edges = cls.graph.as_ref().map(|g| g.edges());
            emit(
                json_mode,
                json!({
                    "is_anl": cls.is_anl,
                    "is_ang": cls.is_ang,
                    "n": cls.n,
                    "graph_edges": edges,
                }),
                match (&cls.is_anl, &cls.is_ang) {
                    (false, _) => "not a join of a simplex with a degree-6 complex".into(),
                    (true, false) => format!("A({}, L) for a non-graph L", cls.n),
                    (true, true) => format!(
                        "A({}, G) with G edges {:?}",
                        cls.n,
                        edges.unwrap_or_default()
                    ),
                },
            );
        }
        Cmd::Steenrod { cmd } => return run_steenrod(cmd, json_mode),
        Cmd::ClassifyN2 { complex } => {
            let k = read_complex(&complex)?;
            let report = classify_two_x(&k).map_err(steenrod_failure)?;
            if report.realizable {
                emit(json_mode, json!({ "realizable": true }), "realizable".into());
            } else {
                let c = report.failed_condition.expect("set when unrealizable");
                emit(
                    json_mode,
                    json!({ "realizable": false, "failed_condition": c }),
                    format!("not realizable: condition {c} fails"),
                );
                return Err(Failure::Verdict(String::new()));
            }
        }
        Cmd::Bracket { graph } => {
            let g = read_graph(&graph)?;
            let b = chi_top_bracket(&g).map_err(steenrod_failure)?;
            emit(
                json_mode,
                json!({ "lower": b.lower, "upper": b.upper }),
                format!("{} ≤ χ_Top ≤ {}", b.lower, b.upper),
            );
        }
    }
    Ok(())
}

fn run_steenrod(cmd: SteenrodCmd, json_mode: bool) -> Result<(), Failure> {
    match cmd {
        SteenrodCmd::Build(args) => {
            let g = read_graph(&args.graph)?;
            let c = colouring_from_json(&read_json(&args.colouring)?)?;
            let l = spanchroma::sr::graph_complex(&g);
            let action = action_from_colouring(&l, args.n, &c, args.max_degree)
                .map_err(steenrod_failure)?;
            let v = action_to_json(&action).map_err(steenrod_failure)?;
            emit(json_mode, v.clone(), serde_json::to_string_pretty(&v).expect("serializable"));
        }
        SteenrodCmd::Verify { action } => {
            let a = action_from_json(&read_json(&action)?).map_err(steenrod_failure)?;
            let cert = verify_action(&a);
            let rows = [
                ("unstable", &cert.unstable),
                ("ideal", &cert.ideal),
                ("adem", &cert.adem),
                ("pmax", &cert.pmax),
            ];
            let human: Vec<String> = rows
                .iter()
                .map(|(name, check)| {
                    let mut line = format!(
                        "{name}: {}",
                        if check.pass { "pass" } else { "FAIL" }
                    );
                    if let Some(w) = &check.witness {
                        line.push_str(&format!(" ({w})"));
                    }
                    line
                })
                .collect();
            emit(json_mode, certificate_to_json(&cert), human.join("\n"));
            if !cert.all_pass() {
                return Err(Failure::Verdict(String::new()));
            }
        }
        SteenrodCmd::Extract { action } => {
            let a = action_from_json(&read_json(&action)?).map_err(steenrod_failure)?;
            let complex = a
                .ring()
                .complex()
                .ok_or_else(|| Failure::Input("action ring has no complex".into()))?;
            let cls = classify_complex(complex)?;
            let g = cls.graph.ok_or_else(|| Failure::Verdict("ring is not A(n, G)".into()))?;
            let (c, report) = extract_colouring(&a, &g).map_err(steenrod_failure)?;
            let v = json!({
                "n": report.n,
                "removed": report.removed,
                "core_vertices": report.core_vertices,
                "colouring": colouring_to_json(&c),
            });
            emit(json_mode, v.clone(), serde_json::to_string_pretty(&v).expect("serializable"));
        }
        SteenrodCmd::Modp { p, rest } => {
            let g = read_graph(&rest.graph)?;
            let c = colouring_from_json(&read_json(&rest.colouring)?)?;
            let l = spanchroma::sr::graph_complex(&g);
            let report = modp_p1_action(p, &l, rest.n, &c, rest.max_degree)
                .map_err(steenrod_failure)?;
            let names = |offset: usize, polys: &[spanchroma::steenrod::PolyZp]| -> Value {
                let mut map = serde_json::Map::new();
                for (i, poly) in polys.iter().enumerate() {
                    map.insert(poly.ring.names[offset + i].clone(), polyzp_to_json(poly));
                }
                Value::Object(map)
            };
            let ok = report.all_pass();
            let v = json!({
                "p": report.p,
                "D": report.trunc,
                "p1_x": names(0, &report.p1_x),
                "p1_y": names(report.p1_x.len(), &report.p1_y),
                "degrees": report.degrees.pass,
                "ideal": report.ideal.pass,
            });
            emit(
                json_mode,
                v,
                format!(
                    "P^1 images computed mod {p}; degrees: {}, ideal: {}",
                    if report.degrees.pass { "pass" } else { "FAIL" },
                    if report.ideal.pass { "pass" } else { "FAIL" },
                ),
            );
            if !ok {
                return Err(Failure::Verdict(String::new()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict(msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
