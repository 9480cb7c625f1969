//! JSON documents and canonical JSON output.
//!
//! Rationals are always strings (`"p/q"` or `"n"`), vertices are referred
//! to by id and edges by their index in the `edges` array. Output goes
//! through [`serde_json::Value`], whose objects keep keys sorted, so equal
//! results print byte-identically.

use crate::error::{Error, Result};
use crate::graph::{GraphSpec, MarkedDualGraph, NodeTypeLabel, VertexSet};
use crate::label::Label;
use crate::maps::PhiTable;
use crate::polarization::{CanonicalPolarization, ExplicitPolarization, Polarization, QProfile};
use crate::rational::{self, Q};
use crate::sheaf::SheafType;
use crate::stability::StabilityVerdict;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    pub genus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub markings: BTreeMap<Label, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_vertex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_genus: Option<u32>,
    /// Defaults to true.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub require_stable: Option<bool>,
}

impl GraphDocument {
    pub fn to_graph(&self) -> Result<MarkedDualGraph> {
        let index: BTreeMap<&str, usize> =
            self.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let lookup = |id: &str| index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()));
        let edges = self.edges.iter().map(|(a, b)| Ok((lookup(a)?, lookup(b)?))).collect::<Result<Vec<_>>>()?;
        let markings =
            self.markings.iter().map(|(l, v)| Ok((l.clone(), lookup(v)?))).collect::<Result<Vec<_>>>()?;
        let base_vertex = self.base_vertex.as_deref().map(lookup).transpose()?;
        let graph = GraphSpec {
            vertices: self.vertices.iter().map(|v| (v.id.clone(), v.genus)).collect(),
            edges,
            markings,
            base_vertex,
            require_stable: self.require_stable.unwrap_or(true),
        }
        .validate()?;
        if let Some(expected) = self.expected_genus {
            if expected != graph.genus() {
                return Err(Error::Document(format!(
                    "expected_genus is {expected} but the graph has genus {}",
                    graph.genus()
                )));
            }
        }
        Ok(graph)
    }

    pub fn from_graph(graph: &MarkedDualGraph) -> Self {
        let id = |v: usize| graph.vertex_id(v).to_string();
        GraphDocument {
            vertices: (0..graph.vertex_count())
                .map(|v| VertexEntry { id: id(v), genus: graph.vertex_genus(v) })
                .collect(),
            edges: graph.edges().iter().map(|&(a, b)| (id(a), id(b))).collect(),
            markings: graph.markings().iter().map(|(l, &v)| (l.clone(), id(v))).collect(),
            base_vertex: graph.base_vertex().map(id),
            expected_genus: None,
            require_stable: (!graph.require_stable()).then_some(false),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelValue {
    pub b: u32,
    #[serde(rename = "B")]
    pub markings: BTreeSet<Label>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolarizationDocument {
    Explicit {
        s: String,
        r: String,
        #[serde(default)]
        a: BTreeMap<Label, String>,
        #[serde(default)]
        alpha: Vec<LabelValue>,
    },
    Canonical {
        d: i64,
        #[serde(default)]
        a: BTreeMap<Label, String>,
    },
    Profile {
        q: BTreeMap<String, String>,
        d: i64,
    },
}

fn parse_map<K: Ord + Clone>(m: &BTreeMap<K, String>) -> Result<BTreeMap<K, Q>> {
    m.iter().map(|(k, v)| Ok((k.clone(), rational::parse(v)?))).collect()
}

fn format_map<K: Ord + Clone>(m: &BTreeMap<K, Q>) -> BTreeMap<K, String> {
    m.iter().map(|(k, v)| (k.clone(), rational::format(v))).collect()
}

fn parse_labelled(entries: &[LabelValue]) -> Result<BTreeMap<NodeTypeLabel, Q>> {
    let mut out = BTreeMap::new();
    for e in entries {
        let label = NodeTypeLabel { b: e.b, markings: e.markings.clone() };
        if out.insert(label.clone(), rational::parse(&e.value)?).is_some() {
            return Err(Error::Document(format!("label {label} listed twice")));
        }
    }
    Ok(out)
}

fn format_labelled(m: &BTreeMap<NodeTypeLabel, Q>) -> Vec<LabelValue> {
    m.iter()
        .map(|(l, v)| LabelValue { b: l.b, markings: l.markings.clone(), value: rational::format(v) })
        .collect()
}

impl PolarizationDocument {
    pub fn to_polarization(&self) -> Result<Polarization> {
        Ok(match self {
            PolarizationDocument::Explicit { s, r, a, alpha } => {
                let r = rational::parse(r)?;
                if r <= Q::from_integer(0.into()) {
                    return Err(Error::Document("rank r must be positive".into()));
                }
                Polarization::Explicit(ExplicitPolarization {
                    s: rational::parse(s)?,
                    a: parse_map(a)?,
                    alpha: parse_labelled(alpha)?,
                    r,
                })
            }
            PolarizationDocument::Canonical { d, a } => {
                Polarization::Canonical(CanonicalPolarization { d: *d, a: parse_map(a)? })
            }
            PolarizationDocument::Profile { q, d } => Polarization::Profile { q: parse_map(q)?, d: *d },
        })
    }

    pub fn from_polarization(p: &Polarization) -> Self {
        match p {
            Polarization::Explicit(e) => PolarizationDocument::Explicit {
                s: rational::format(&e.s),
                r: rational::format(&e.r),
                a: format_map(&e.a),
                alpha: format_labelled(&e.alpha),
            },
            Polarization::Canonical(c) => PolarizationDocument::Canonical { d: c.d, a: format_map(&c.a) },
            Polarization::Profile { q, d } => PolarizationDocument::Profile { q: format_map(q), d: *d },
        }
    }

    pub fn from_profile(graph: &MarkedDualGraph, profile: &QProfile) -> Self {
        PolarizationDocument::Profile {
            q: (0..graph.vertex_count())
                .map(|v| (graph.vertex_id(v).to_string(), rational::format(profile.q_vertex(v))))
                .collect(),
            d: profile.d(),
        }
    }
}

/// Boundary coefficients in documents must use canonical labels for the
/// graph's genus and marking set.
pub fn check_canonical_alpha(pol: &Polarization, graph: &MarkedDualGraph) -> Result<()> {
    if let Polarization::Explicit(e) = pol {
        let (g, a) = (graph.genus(), graph.marking_labels());
        for label in e.alpha.keys() {
            let (canonical, flipped) = label.canonicalize(g, &a)?;
            if flipped {
                return Err(Error::InadmissibleLabel(format!("{label} is not canonical; write it as {canonical}")));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafDocument {
    #[serde(default)]
    pub nonfree: Vec<usize>,
    pub degrees: BTreeMap<String, i64>,
}

impl SheafDocument {
    pub fn to_sheaf(&self, graph: &MarkedDualGraph) -> Result<SheafType> {
        for id in self.degrees.keys() {
            graph.vertex_index(id)?;
        }
        let degrees = (0..graph.vertex_count())
            .map(|v| {
                self.degrees
                    .get(graph.vertex_id(v))
                    .copied()
                    .ok_or_else(|| Error::Document(format!("sheaf has no degree for vertex {}", graph.vertex_id(v))))
            })
            .collect::<Result<Vec<_>>>()?;
        let nonfree: BTreeSet<usize> = self.nonfree.iter().copied().collect();
        if nonfree.len() != self.nonfree.len() {
            return Err(Error::Document("non-free edge listed twice".into()));
        }
        let sheaf = SheafType { nonfree, degrees };
        sheaf.check_shape(graph)?;
        Ok(sheaf)
    }

    pub fn from_sheaf(graph: &MarkedDualGraph, sheaf: &SheafType) -> Self {
        SheafDocument {
            nonfree: sheaf.nonfree_vec(),
            degrees: sheaf.degrees.iter().enumerate().map(|(v, &d)| (graph.vertex_id(v).to_string(), d)).collect(),
        }
    }
}

/// Input of the two-component parameter translation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiDocument {
    pub genus: u32,
    pub markings: BTreeSet<Label>,
    pub phi: Vec<LabelValue>,
}

impl PhiDocument {
    pub fn to_table(&self) -> Result<PhiTable> {
        Ok(PhiTable(parse_labelled(&self.phi)?))
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(format!("{what}: {e}")))
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("documents serialize")
}

pub fn vertex_set_json(graph: &MarkedDualGraph, set: VertexSet) -> Value {
    Value::Array(set.iter().map(|v| Value::String(graph.vertex_id(v).to_string())).collect())
}

pub fn sheaf_json(graph: &MarkedDualGraph, sheaf: &SheafType) -> Value {
    to_value(&SheafDocument::from_sheaf(graph, sheaf))
}

pub fn profile_json(graph: &MarkedDualGraph, profile: &QProfile) -> Value {
    let PolarizationDocument::Profile { q, d } = PolarizationDocument::from_profile(graph, profile) else {
        unreachable!()
    };
    json!({ "q": q, "d": d })
}

pub fn verdict_json(graph: &MarkedDualGraph, verdict: &StabilityVerdict) -> Value {
    let mut out = json!({
        "status": verdict.status.as_str(),
        "witness": verdict.witness.map(|w| vertex_set_json(graph, w)),
    });
    if let Some(q) = verdict.quasistable_at_base {
        out["quasistable"] = Value::Bool(q);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const BRIDGE: &str = r#"{"vertices":[{"id":"a","genus":1},{"id":"b","genus":2}],"edges":[["a","b"]],"expected_genus":3}"#;

    #[test]
    fn graph_document_round_trip() {
        let doc: GraphDocument = parse_json(BRIDGE, "graph").unwrap();
        let g = doc.to_graph().unwrap();
        assert_eq!(g.genus(), 3);
        let back = GraphDocument::from_graph(&g);
        assert_eq!(back.to_graph().unwrap(), g);
    }

    #[test]
    fn graph_document_errors() {
        let bad: GraphDocument =
            parse_json(r#"{"vertices":[{"id":"a","genus":2}],"edges":[],"expected_genus":3}"#, "graph").unwrap();
        assert!(matches!(bad.to_graph(), Err(Error::Document(_))));
        let empty: GraphDocument = parse_json(r#"{"vertices":[],"edges":[]}"#, "graph").unwrap();
        assert!(empty.to_graph().unwrap_err().to_string().contains("disconnected"));
        let dangling: GraphDocument =
            parse_json(r#"{"vertices":[{"id":"a","genus":2}],"edges":[["a","z"]]}"#, "graph").unwrap();
        assert!(matches!(dangling.to_graph(), Err(Error::UnknownVertex(_))));
        let err = parse_json::<GraphDocument>("{\"vertices\": [}", "graph").unwrap_err();
        assert!(err.to_string().contains("line 1"));
        assert!(parse_json::<GraphDocument>(r#"{"vertices":[],"edges":[],"extra":1}"#, "graph").is_err());
    }

    #[test]
    fn polarization_documents() {
        let text = r#"{"kind":"explicit","s":"0","r":"4","alpha":[{"b":1,"B":[],"value":"1"}]}"#;
        let doc: PolarizationDocument = parse_json(text, "pol").unwrap();
        let pol = doc.to_polarization().unwrap();
        let g = parse_json::<GraphDocument>(BRIDGE, "graph").unwrap().to_graph().unwrap();
        check_canonical_alpha(&pol, &g).unwrap();
        assert_eq!(pol.compile(&g).unwrap().q(), &[rational::q(3, 4), rational::q(5, 4)]);
        assert_eq!(PolarizationDocument::from_polarization(&pol), doc);

        let flipped: PolarizationDocument =
            parse_json(r#"{"kind":"explicit","s":"0","r":"4","alpha":[{"b":2,"B":[],"value":"1"}]}"#, "pol").unwrap();
        assert!(check_canonical_alpha(&flipped.to_polarization().unwrap(), &g).is_err());

        let unreduced: PolarizationDocument = parse_json(r#"{"kind":"explicit","s":"2/4","r":"1"}"#, "pol").unwrap();
        assert!(matches!(unreduced.to_polarization(), Err(Error::MalformedRational(_))));
        let canonical: PolarizationDocument = parse_json(r#"{"kind":"canonical","d":2}"#, "pol").unwrap();
        assert_eq!(canonical.to_polarization().unwrap().compile(&g).unwrap().q()[0], rational::q(1, 2));
        let profile: PolarizationDocument =
            parse_json(r#"{"kind":"profile","q":{"a":"1/2","b":"3/2"},"d":2}"#, "pol").unwrap();
        assert_eq!(profile.to_polarization().unwrap().compile(&g).unwrap().d(), 2);
        let short: PolarizationDocument = parse_json(r#"{"kind":"profile","q":{"a":"1/2"},"d":2}"#, "pol").unwrap();
        assert!(short.to_polarization().unwrap().compile(&g).is_err());
    }

    #[test]
    fn sheaf_documents() {
        let g = parse_json::<GraphDocument>(BRIDGE, "graph").unwrap().to_graph().unwrap();
        let doc: SheafDocument = parse_json(r#"{"nonfree":[],"degrees":{"a":0,"b":2}}"#, "sheaf").unwrap();
        let s = doc.to_sheaf(&g).unwrap();
        assert_eq!(s.degrees, vec![0, 2]);
        assert_eq!(SheafDocument::from_sheaf(&g, &s), doc);
        let missing: SheafDocument = parse_json(r#"{"degrees":{"a":0}}"#, "sheaf").unwrap();
        assert!(missing.to_sheaf(&g).is_err());
        let unknown: SheafDocument = parse_json(r#"{"degrees":{"a":0,"b":1,"c":1}}"#, "sheaf").unwrap();
        assert!(unknown.to_sheaf(&g).is_err());
    }

    #[test]
    fn output_keys_are_sorted() {
        let g = parse_json::<GraphDocument>(BRIDGE, "graph").unwrap().to_graph().unwrap();
        let v = StabilityVerdict {
            status: crate::stability::StabilityStatus::StrictlySemistable,
            quasistable_at_base: None,
            witness: Some(VertexSet::singleton(0)),
        };
        assert_eq!(verdict_json(&g, &v).to_string(), r#"{"status":"strictly_semistable","witness":["a"]}"#);
    }

    fn arb_graph() -> impl Strategy<Value = MarkedDualGraph> {
        (1usize..5)
            .prop_flat_map(|n| {
                (
                    proptest::collection::vec(0u32..3, n),
                    proptest::collection::vec((0..n, 0..n), n - 1..n + 3),
                    proptest::collection::btree_map("[0-9a-z]{1,3}", 0..n, 0..4),
                    proptest::option::of(0..n),
                )
            })
            .prop_filter_map("connected", |(genera, extra, marks, base)| {
                let n = genera.len();
                // a path keeps it connected, the rest are random
                let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
                edges.extend(extra.into_iter().skip(n - 1));
                GraphSpec {
                    vertices: genera.into_iter().enumerate().map(|(i, g)| (format!("u{i}"), g)).collect(),
                    edges,
                    markings: marks.into_iter().map(|(l, v)| (Label::new(l), v)).collect(),
                    base_vertex: base,
                    require_stable: false,
                }
                .validate()
                .ok()
            })
    }

    fn arb_q() -> impl Strategy<Value = Q> {
        (-50i64..50, 1i64..12).prop_map(|(a, b)| rational::q(a, b))
    }

    proptest! {
        #[test]
        fn graph_round_trip(g in arb_graph()) {
            let doc = GraphDocument::from_graph(&g);
            let text = serde_json::to_string(&to_value(&doc)).unwrap();
            let back: GraphDocument = parse_json(&text, "graph").unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(back.to_graph().unwrap(), g);
        }

        #[test]
        fn polarization_round_trip(s in arb_q(), r in (1i64..9, 1i64..5), a in proptest::collection::btree_map("[1-4]", arb_q(), 0..4),
                                   alpha in proptest::collection::btree_map((0u32..3, proptest::collection::btree_set("[1-4]", 0..3)), arb_q(), 0..3)) {
            let pol = Polarization::Explicit(ExplicitPolarization {
                s,
                a: a.into_iter().map(|(k, v)| (Label::new(k), v)).collect(),
                alpha: alpha.into_iter().map(|((b, m), v)| (NodeTypeLabel::new(b, m), v)).collect(),
                r: rational::q(r.0, r.1),
            });
            let doc = PolarizationDocument::from_polarization(&pol);
            let text = serde_json::to_string(&to_value(&doc)).unwrap();
            let back: PolarizationDocument = parse_json(&text, "pol").unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(back.to_polarization().unwrap(), pol);
        }
    }
}
