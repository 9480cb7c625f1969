//! `jacstab`: stability of sheaves on marked nodal curves, from JSON files.
//!
//! Results go to stdout as one line of JSON with sorted keys. Exit status
//! is 0 on success, 2 for invalid input and 3 when an input is well formed
//! but an operation's precondition fails.

use clap::{Args, Parser, Subcommand};
use jacstab_core::corpus::{generate_corpus, numbered_markings};
use jacstab_core::io::{
    check_canonical_alpha, parse_json, profile_json, sheaf_json, to_value, verdict_json, vertex_set_json,
    GraphDocument, PhiDocument, PolarizationDocument, SheafDocument,
};
use jacstab_core::lattice::{complexity, invariant_factors, laplacian, multidegrees_equivalent};
use jacstab_core::maps::{
    abel_jacobi, check_star, clutch_irr, clutch_irr_polarization, clutch_sep, clutch_sep_polarization, forget_point,
    forget_polarization, kp_translate,
};
use jacstab_core::stability::{count_components, StabilityContext};
use jacstab_core::{
    Error, ExplicitPolarization, Label, MarkedDualGraph, Mode, Polarization, QProfile, Result, SheafType, Subcurve,
};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "jacstab", version, about = "Exact stability computations for compactified Jacobians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    /// Graph document.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct PolArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Polarization document (explicit, canonical or profile).
    #[arg(long)]
    pol: PathBuf,
}

#[derive(Args)]
#[group(multiple = false)]
struct ModeArg {
    #[arg(long)]
    stable: bool,
    #[arg(long)]
    semistable: bool,
    #[arg(long)]
    quasistable: bool,
}

impl ModeArg {
    fn mode(&self) -> Mode {
        if self.stable {
            Mode::Stable
        } else if self.quasistable {
            Mode::Quasistable
        } else {
            Mode::Semistable
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a graph.
    Validate(GraphArg),
    /// Vertex data and separating nodes, or the invariants of one subcurve.
    Invariants {
        #[command(flatten)]
        graph: GraphArg,
        /// Comma-separated vertex ids.
        #[arg(long, value_delimiter = ',')]
        subcurve: Option<Vec<String>>,
    },
    /// Compile a polarization to per-vertex weights.
    Qprofile(PolArgs),
    /// Stability verdict of one sheaf type.
    Check {
        #[command(flatten)]
        pol: PolArgs,
        #[arg(long)]
        sheaf: PathBuf,
        /// Base vertex for quasistability; defaults to the graph's.
        #[arg(long)]
        base: Option<String>,
    },
    /// All sheaf types passing a stability mode (semistable by default).
    Enumerate {
        #[command(flatten)]
        pol: PolArgs,
        #[command(flatten)]
        mode: ModeArg,
        #[arg(long)]
        base: Option<String>,
        /// Also list sheaves that fail to be locally free at some nodes.
        #[arg(long)]
        include_nonfree: bool,
    },
    /// Number of quasistable line-bundle types for a general profile.
    Count {
        #[command(flatten)]
        pol: PolArgs,
        #[arg(long)]
        base: Option<String>,
    },
    /// Whether the profile is general, with the subcurves where it is not.
    IsGeneral(PolArgs),
    /// A nearby general profile.
    Perturb {
        #[command(flatten)]
        pol: PolArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Glue two markings of one curve.
    ClutchIrr {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        sheaf: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Explicit polarization to carry along.
        #[arg(long)]
        pol: Option<PathBuf>,
    },
    /// Join two curves at a marking of each.
    ClutchSep {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        sheaf: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        graph2: PathBuf,
        #[arg(long)]
        sheaf2: PathBuf,
        #[arg(long)]
        y: String,
        #[arg(long, requires = "pol2")]
        pol: Option<PathBuf>,
        #[arg(long, requires = "pol")]
        pol2: Option<PathBuf>,
    },
    /// Forget a marking: stabilize the curve and push the sheaf forward.
    Forget {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        sheaf: PathBuf,
        #[arg(long)]
        x: String,
        /// Explicit polarization to carry along; must satisfy a_x = 0.
        #[arg(long)]
        pol: Option<PathBuf>,
    },
    /// Abel–Jacobi polarization, sheaf and verdict for integer weights.
    AbelJacobi {
        #[command(flatten)]
        graph: GraphArg,
        /// Weights as `label=value`; missing markings get 0.
        #[arg(long = "d", value_parser = parse_weight)]
        weights: Vec<(String, i64)>,
    },
    /// Polarization reproducing values on two-component curves.
    KpTranslate {
        #[arg(long)]
        phi: PathBuf,
    },
    /// Stable graphs of given genus and number of markings, up to isomorphism.
    Corpus {
        #[arg(long)]
        genus: u32,
        #[arg(long, default_value_t = 0)]
        markings: usize,
        #[arg(long, default_value_t = 5)]
        max_vertices: usize,
    },
    /// Number of spanning trees and Laplacian invariant factors.
    Complexity(GraphArg),
    /// Whether two multidegrees differ by a Laplacian image.
    Equiv {
        #[command(flatten)]
        graph: GraphArg,
        /// Degrees in vertex order, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        d1: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        d2: Vec<i64>,
    },
}

fn parse_weight(s: &str) -> std::result::Result<(String, i64), String> {
    let (l, v) = s.split_once('=').ok_or_else(|| format!("expected label=value, got {s:?}"))?;
    let v = v.trim().parse::<i64>().map_err(|e| format!("{s:?}: {e}"))?;
    Ok((l.trim().to_string(), v))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Document(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<MarkedDualGraph> {
    parse_json::<GraphDocument>(&read(path)?, &path.display().to_string())?.to_graph()
}

fn load_polarization(path: &Path, graph: &MarkedDualGraph) -> Result<Polarization> {
    let pol = parse_json::<PolarizationDocument>(&read(path)?, &path.display().to_string())?.to_polarization()?;
    check_canonical_alpha(&pol, graph)?;
    Ok(pol)
}

fn load_explicit(path: &Path, graph: &MarkedDualGraph) -> Result<ExplicitPolarization> {
    match load_polarization(path, graph)? {
        Polarization::Explicit(e) => Ok(e),
        Polarization::Canonical(c) => c.to_explicit(graph.genus()),
        Polarization::Profile { .. } => {
            Err(Error::Document("this command needs an explicit or canonical polarization".into()))
        }
    }
}

fn load_sheaf(path: &Path, graph: &MarkedDualGraph) -> Result<SheafType> {
    parse_json::<SheafDocument>(&read(path)?, &path.display().to_string())?.to_sheaf(graph)
}

fn load_profile(args: &PolArgs) -> Result<(MarkedDualGraph, QProfile)> {
    let graph = load_graph(&args.graph.graph)?;
    let profile = load_polarization(&args.pol, &graph)?.compile(&graph)?;
    Ok((graph, profile))
}

fn base_index(graph: &MarkedDualGraph, base: &Option<String>) -> Result<Option<usize>> {
    match base {
        Some(id) => graph.vertex_index(id).map(Some),
        None => Ok(graph.base_vertex()),
    }
}

fn required_base(graph: &MarkedDualGraph, base: &Option<String>) -> Result<usize> {
    base_index(graph, base)?.ok_or_else(|| Error::Precondition("a base vertex is required (--base)".into()))
}

fn graph_json(graph: &MarkedDualGraph) -> Value {
    to_value(&GraphDocument::from_graph(graph))
}

/// Integers that fit in 64 bits as JSON numbers, others as strings.
fn big(n: impl std::fmt::Display) -> Value {
    let s = n.to_string();
    s.parse::<u64>().map(|v| json!(v)).unwrap_or(Value::String(s))
}

fn run(cli: Cli) -> Result<Value> {
    Ok(match cli.command {
        Command::Validate(g) => {
            let graph = load_graph(&g.graph)?;
            json!({
                "valid": true,
                "genus": graph.genus(),
                "vertices": graph.vertex_count(),
                "edges": graph.edge_count(),
                "stable": graph.is_stable(),
            })
        }
        Command::Invariants { graph, subcurve } => {
            let graph = load_graph(&graph.graph)?;
            match subcurve {
                Some(ids) => {
                    let inv = graph.subcurve_invariants(Subcurve::from_ids(&graph, &ids)?);
                    json!({
                        "k": inv.k,
                        "w": inv.w,
                        "genus": inv.genus,
                        "components": inv.components.iter().map(|&c| vertex_set_json(&graph, c)).collect::<Vec<_>>(),
                    })
                }
                None => {
                    let vertices: Vec<Value> = (0..graph.vertex_count())
                        .map(|v| {
                            json!({
                                "id": graph.vertex_id(v),
                                "genus": graph.vertex_genus(v),
                                "valence": graph.valence(v),
                                "w": graph.vertex_w(v),
                                "markings": graph.markings_at(v).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    let nodes: Vec<Value> = graph
                        .separating_nodes()
                        .into_iter()
                        .map(|n| {
                            json!({
                                "edge": n.edge,
                                "b": n.label.b,
                                "B": n.label.markings,
                                "side": n.designated_side.map(|s| vertex_set_json(&graph, s)),
                            })
                        })
                        .collect();
                    json!({
                        "genus": graph.genus(),
                        "stable": graph.is_stable(),
                        "vertices": vertices,
                        "separating_nodes": nodes,
                    })
                }
            }
        }
        Command::Qprofile(args) => {
            let (graph, profile) = load_profile(&args)?;
            let mut out = profile_json(&graph, &profile);
            out["general"] = json!(profile.is_general(&graph));
            out
        }
        Command::Check { pol, sheaf, base } => {
            let (graph, profile) = load_profile(&pol)?;
            let sheaf = load_sheaf(&sheaf, &graph)?;
            let base = base_index(&graph, &base)?;
            verdict_json(&graph, &StabilityContext::new(&graph, &profile)?.check(&sheaf, base)?)
        }
        Command::Enumerate { pol, mode, base, include_nonfree } => {
            let (graph, profile) = load_profile(&pol)?;
            let mode = mode.mode();
            let base = if mode == Mode::Quasistable { Some(required_base(&graph, &base)?) } else { base_index(&graph, &base)? };
            let found = StabilityContext::new(&graph, &profile)?.enumerate(mode, base, include_nonfree)?;
            json!({
                "count": found.len(),
                "sheaves": found.iter().map(|s| sheaf_json(&graph, s)).collect::<Vec<_>>(),
            })
        }
        Command::Count { pol, base } => {
            let (graph, profile) = load_profile(&pol)?;
            let base = required_base(&graph, &base)?;
            json!({ "count": count_components(&graph, &profile, base)? })
        }
        Command::IsGeneral(args) => {
            let (graph, profile) = load_profile(&args)?;
            let integral = profile.integral_subcurves(&graph);
            json!({
                "general": integral.is_empty(),
                "integral_subcurves": integral.iter().map(|&y| vertex_set_json(&graph, y)).collect::<Vec<_>>(),
            })
        }
        Command::Perturb { pol, seed } => {
            let (graph, profile) = load_profile(&pol)?;
            to_value(&PolarizationDocument::from_profile(&graph, &profile.perturb_general(&graph, seed)))
        }
        Command::ClutchIrr { graph, sheaf, x, y, pol } => {
            let graph = load_graph(&graph.graph)?;
            let sheaf = load_sheaf(&sheaf, &graph)?;
            let (x, y) = (Label::new(x), Label::new(y));
            let (glued, image) = clutch_irr(&graph, &x, &y, &sheaf)?;
            let mut out = json!({ "graph": graph_json(&glued), "sheaf": sheaf_json(&glued, &image) });
            if let Some(p) = pol {
                let p = clutch_irr_polarization(&load_explicit(&p, &graph)?, &x, &y)?;
                out["polarization"] = to_value(&PolarizationDocument::from_polarization(&Polarization::Explicit(p)));
            }
            out
        }
        Command::ClutchSep { graph, sheaf, x, graph2, sheaf2, y, pol, pol2 } => {
            let g1 = load_graph(&graph.graph)?;
            let g2 = load_graph(&graph2)?;
            let (s1, s2) = (load_sheaf(&sheaf, &g1)?, load_sheaf(&sheaf2, &g2)?);
            let (x, y) = (Label::new(x), Label::new(y));
            let (glued, image) = clutch_sep(&g1, &x, &s1, &g2, &y, &s2)?;
            let mut out = json!({ "graph": graph_json(&glued), "sheaf": sheaf_json(&glued, &image) });
            if let (Some(p1), Some(p2)) = (pol, pol2) {
                let p = clutch_sep_polarization(&load_explicit(&p1, &g1)?, &x, &load_explicit(&p2, &g2)?, &y)?;
                out["polarization"] = to_value(&PolarizationDocument::from_polarization(&Polarization::Explicit(p)));
            }
            out
        }
        Command::Forget { graph, sheaf, x, pol } => {
            let graph = load_graph(&graph.graph)?;
            let sheaf = load_sheaf(&sheaf, &graph)?;
            let x = Label::new(x);
            let (st, image) = forget_point(&graph, &x, &sheaf)?;
            let mut out = json!({
                "graph": graph_json(&st.graph),
                "sheaf": sheaf_json(&st.graph, &image),
                "contraction": st.contraction.kind(),
            });
            if let Some(p) = pol {
                let p = load_explicit(&p, &graph)?;
                out["star"] = json!(check_star(&p, &graph, &x)?);
                let forgotten = forget_polarization(&p, &x, graph.genus(), &graph.marking_labels())?;
                out["polarization"] =
                    to_value(&PolarizationDocument::from_polarization(&Polarization::Explicit(forgotten)));
            }
            out
        }
        Command::AbelJacobi { graph, weights } => {
            let graph = load_graph(&graph.graph)?;
            let mut tuple = BTreeMap::new();
            for (l, v) in weights {
                if tuple.insert(Label::new(l.clone()), v).is_some() {
                    return Err(Error::Document(format!("weight for {l} given twice")));
                }
            }
            let (pol, sheaf, verdict) = abel_jacobi(&graph, &tuple)?;
            let mut out = verdict_json(&graph, &verdict);
            out["polarization"] = to_value(&PolarizationDocument::from_polarization(&Polarization::Explicit(pol)));
            out["sheaf"] = sheaf_json(&graph, &sheaf);
            out
        }
        Command::KpTranslate { phi } => {
            let doc: PhiDocument = parse_json(&read(&phi)?, &phi.display().to_string())?;
            let t = kp_translate(&doc.to_table()?, doc.genus, &doc.markings)?;
            json!({
                "anchor": t.anchor,
                "polarization": to_value(&PolarizationDocument::from_polarization(&Polarization::Explicit(t.polarization))),
            })
        }
        Command::Corpus { genus, markings, max_vertices } => {
            let graphs = generate_corpus(genus, &numbered_markings(markings), max_vertices)?;
            json!({
                "count": graphs.len(),
                "graphs": graphs.iter().map(graph_json).collect::<Vec<_>>(),
            })
        }
        Command::Complexity(g) => {
            let graph = load_graph(&g.graph)?;
            let factors = invariant_factors(laplacian(&graph));
            json!({
                "complexity": big(complexity(&graph)),
                "invariant_factors": factors.into_iter().map(big).collect::<Vec<_>>(),
            })
        }
        Command::Equiv { graph, d1, d2 } => {
            let graph = load_graph(&graph.graph)?;
            json!({ "equivalent": multidegrees_equivalent(&graph, &d1, &d2)? })
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_precondition() { 3 } else { 2 })
        }
    }
}
