//! Clutching, forgetting a point, Abel–Jacobi sections and translation of
//! two-component stability parameters.

use crate::error::{Error, Result};
use crate::graph::{Contraction, GraphSpec, MarkedDualGraph, NodeTypeLabel, Stabilization};
use crate::label::Label;
use crate::polarization::ExplicitPolarization;
use crate::rational::{self, half, qi, Q};
use crate::sheaf::SheafType;
use crate::stability::{self, StabilityVerdict};
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};

fn two_markings(graph: &MarkedDualGraph, x: &Label, y: &Label) -> Result<(usize, usize)> {
    if x == y {
        return Err(Error::Precondition(format!("cannot glue marking {x} to itself")));
    }
    Ok((graph.marking_vertex(x)?, graph.marking_vertex(y)?))
}

/// Glues markings `x` and `y` of one curve into a new node. The sheaf
/// becomes non-free at the new node, which is appended as the last edge.
pub fn clutch_irr(
    graph: &MarkedDualGraph,
    x: &Label,
    y: &Label,
    sheaf: &SheafType,
) -> Result<(MarkedDualGraph, SheafType)> {
    let (vx, vy) = two_markings(graph, x, y)?;
    sheaf.validate(graph)?;
    let mut spec = graph.to_spec();
    spec.markings.retain(|(l, _)| l != x && l != y);
    spec.edges.push((vx.min(vy), vx.max(vy)));
    let new_edge = spec.edges.len() - 1;
    let glued = spec.validate()?;
    let mut nonfree = sheaf.nonfree.clone();
    nonfree.insert(new_edge);
    Ok((glued, SheafType { nonfree, degrees: sheaf.degrees.clone() }))
}

fn require_untwisted(pol: &ExplicitPolarization, what: &str) -> Result<()> {
    if pol.alpha.values().any(|v| !v.is_zero()) {
        return Err(Error::Precondition(format!(
            "{what}: boundary coefficients must vanish, node types are not tracked through gluing"
        )));
    }
    Ok(())
}

fn require_a_equals_s(pol: &ExplicitPolarization, label: &Label) -> Result<()> {
    let a = pol.a_of(label);
    if a != pol.s {
        return Err(Error::Precondition(format!(
            "a_{label} = {} must equal s = {}",
            rational::format(&a),
            rational::format(&pol.s)
        )));
    }
    Ok(())
}

/// Polarization on the glued curve: requires `a_x = a_y = s` and no
/// boundary coefficients, then drops `a_x` and `a_y`.
pub fn clutch_irr_polarization(pol: &ExplicitPolarization, x: &Label, y: &Label) -> Result<ExplicitPolarization> {
    require_untwisted(pol, "irreducible clutching")?;
    require_a_equals_s(pol, x)?;
    require_a_equals_s(pol, y)?;
    let mut out = pol.clone();
    out.a.remove(x);
    out.a.remove(y);
    Ok(out)
}

/// Vertex id not in `taken`, derived from `id` by appending `'`.
fn fresh_id(id: &str, taken: &BTreeSet<String>) -> String {
    let mut out = id.to_string();
    while taken.contains(&out) {
        out.push('\'');
    }
    out
}

/// Joins two curves along markings `x` (on the first) and `y` (on the
/// second) by a free node, appended as the last edge. The first sheaf is
/// twisted by the point `x`. Vertices of the second curve follow those of
/// the first; colliding ids get a `'` suffix.
pub fn clutch_sep(
    graph1: &MarkedDualGraph,
    x: &Label,
    sheaf1: &SheafType,
    graph2: &MarkedDualGraph,
    y: &Label,
    sheaf2: &SheafType,
) -> Result<(MarkedDualGraph, SheafType)> {
    let vx = graph1.marking_vertex(x)?;
    let vy = graph2.marking_vertex(y)?;
    sheaf1.validate(graph1)?;
    sheaf2.validate(graph2)?;
    let rest1: BTreeSet<&Label> = graph1.markings().keys().filter(|l| *l != x).collect();
    if let Some(l) = graph2.markings().keys().filter(|l| *l != y).find(|l| rest1.contains(l)) {
        return Err(Error::Precondition(format!("marking {l} occurs on both curves")));
    }
    let n1 = graph1.vertex_count();
    let m1 = graph1.edge_count();
    let mut taken: BTreeSet<String> = graph1.vertex_ids().iter().cloned().collect();
    let mut vertices = graph1.to_spec().vertices;
    for v in 0..graph2.vertex_count() {
        let id = fresh_id(graph2.vertex_id(v), &taken);
        taken.insert(id.clone());
        vertices.push((id, graph2.vertex_genus(v)));
    }
    let mut edges = graph1.edges().to_vec();
    edges.extend(graph2.edges().iter().map(|&(a, b)| (a + n1, b + n1)));
    edges.push((vx, vy + n1));
    let mut markings: Vec<(Label, usize)> =
        graph1.markings().iter().filter(|(l, _)| *l != x).map(|(l, &v)| (l.clone(), v)).collect();
    markings.extend(graph2.markings().iter().filter(|(l, _)| *l != y).map(|(l, &v)| (l.clone(), v + n1)));
    let glued = GraphSpec {
        vertices,
        edges,
        markings,
        base_vertex: graph1.base_vertex().or(graph2.base_vertex().map(|b| b + n1)),
        require_stable: graph1.require_stable() && graph2.require_stable(),
    }
    .validate()?;
    let mut degrees = sheaf1.degrees.clone();
    degrees[vx] += 1;
    degrees.extend(&sheaf2.degrees);
    let nonfree = sheaf1.nonfree.iter().copied().chain(sheaf2.nonfree.iter().map(|e| e + m1)).collect();
    Ok((glued, SheafType { nonfree, degrees }))
}

/// Polarization on the joined curve: same `s` and `r` on both sides,
/// `a_x = a_y = s`, no boundary coefficients.
pub fn clutch_sep_polarization(
    pol1: &ExplicitPolarization,
    x: &Label,
    pol2: &ExplicitPolarization,
    y: &Label,
) -> Result<ExplicitPolarization> {
    require_untwisted(pol1, "separating clutching")?;
    require_untwisted(pol2, "separating clutching")?;
    if pol1.s != pol2.s || pol1.r != pol2.r {
        return Err(Error::Precondition("both polarizations need the same s and r".into()));
    }
    require_a_equals_s(pol1, x)?;
    require_a_equals_s(pol2, y)?;
    let mut a: BTreeMap<Label, Q> = pol1.a.iter().filter(|(l, _)| *l != x).map(|(l, v)| (l.clone(), v.clone())).collect();
    for (l, v) in pol2.a.iter().filter(|(l, _)| *l != y) {
        if a.insert(l.clone(), v.clone()).is_some() {
            return Err(Error::Precondition(format!("marking {l} occurs in both polarizations")));
        }
    }
    Ok(ExplicitPolarization { s: pol1.s.clone(), a, alpha: BTreeMap::new(), r: pol1.r.clone() })
}

/// Whether the component contracted when forgetting `x`, if any, has
/// weight zero, with `a_x = 0`.
pub fn check_star(pol: &ExplicitPolarization, graph: &MarkedDualGraph, x: &Label) -> Result<bool> {
    let Some(v0) = graph.contraction_candidate(x)? else {
        return Ok(true);
    };
    let profile = pol.compile(graph)?;
    Ok(profile.q_vertex(v0).is_zero() && pol.a_of(x).is_zero())
}

/// Pushforward of a sheaf type along the map forgetting `x`.
///
/// A contracted tail must carry degree 0 and a free node. For a contracted
/// bridge `u -e1- v0 -e2- w` with vertex degree `δ` and non-free set `N`
/// among `{e1, e2}`, `t = δ + |N|` must lie in `{-1, 0, 1}` and:
///
/// * `N` empty: the new node is free for `δ = 0`, non-free for `δ = 1`,
///   and non-free with `u` and `w` each lowered by one for `δ = -1`;
/// * `N = {e1}`: the new node is non-free and `w` gains `δ`;
/// * `N = {e2}`: the new node is non-free and `u` gains `δ`.
///
/// A new non-free node that separates the curve once the other non-free
/// nodes are normalized makes the pushforward decomposable; such sheaves
/// are rejected. Total degree is preserved.
pub fn forget_point(graph: &MarkedDualGraph, x: &Label, sheaf: &SheafType) -> Result<(Stabilization, SheafType)> {
    sheaf.validate(graph)?;
    let st = graph.stabilize_forgetting(x)?;
    let remap_vertex = |v: usize| st.vertex_map[v].expect("kept vertex");
    let mut degrees = vec![0i64; st.graph.vertex_count()];
    for (v, &d) in sheaf.degrees.iter().enumerate() {
        if let Some(w) = st.vertex_map[v] {
            degrees[w] = d;
        }
    }
    let mut nonfree: BTreeSet<usize> = BTreeSet::new();
    match &st.contraction {
        Contraction::None => {
            nonfree = sheaf.nonfree.clone();
        }
        Contraction::Tail { vertex, edge, .. } => {
            let delta = sheaf.degrees[*vertex];
            if delta != 0 || sheaf.nonfree.contains(edge) {
                return Err(Error::InadmissiblePushforward(format!(
                    "contracted tail has degree {delta} and {} node; need degree 0 and a free node",
                    if sheaf.nonfree.contains(edge) { "a non-free" } else { "a free" }
                )));
            }
            nonfree.extend(sheaf.nonfree.iter().map(|&e| st.edge_map[e].expect("kept edge")));
        }
        Contraction::Bridge { vertex, edges: [e1, e2], ends: [u, w], new_edge } => {
            let delta = sheaf.degrees[*vertex];
            let n1 = sheaf.nonfree.contains(e1);
            let n2 = sheaf.nonfree.contains(e2);
            if n1 && n2 {
                return Err(Error::InadmissiblePushforward(
                    "both nodes of the contracted component are non-free".into(),
                ));
            }
            let t = delta + n1 as i64 + n2 as i64;
            if !(-1..=1).contains(&t) {
                return Err(Error::InadmissiblePushforward(format!(
                    "d of the contracted component is {t}, outside -1..=1"
                )));
            }
            nonfree.extend(
                sheaf.nonfree.iter().filter(|e| *e != e1 && *e != e2).map(|&e| st.edge_map[e].expect("kept edge")),
            );
            let (u, w) = (remap_vertex(*u), remap_vertex(*w));
            let new_nonfree = match (n1, n2) {
                (false, false) => match delta {
                    0 => false,
                    1 => true,
                    _ => {
                        degrees[u] -= 1;
                        degrees[w] -= 1;
                        true
                    }
                },
                (true, false) => {
                    degrees[w] += delta;
                    true
                }
                (false, true) => {
                    degrees[u] += delta;
                    true
                }
                (true, true) => unreachable!(),
            };
            if new_nonfree {
                nonfree.insert(*new_edge);
            }
        }
    }
    let out = SheafType { nonfree, degrees };
    if !out.is_simple(&st.graph) {
        return Err(Error::InadmissiblePushforward(
            "the new non-free node separates the partial normalization, so the pushforward is not simple".into(),
        ));
    }
    debug_assert_eq!(out.total_degree(), sheaf.total_degree());
    Ok((st, out))
}

/// Polarization on curves without the marking `x`; requires `a_x = 0`.
///
/// A boundary coefficient indexed by `(b, B)` over `A ∪ {x}` moves to
/// `(b, B - {x})` over `A`, keeping its orientation. Images that are not
/// admissible over `A` name nodes that disappear and are dropped. Two
/// coefficients landing on the same divisor must agree.
pub fn forget_polarization(
    pol: &ExplicitPolarization,
    x: &Label,
    g: u32,
    markings: &BTreeSet<Label>,
) -> Result<ExplicitPolarization> {
    if !markings.contains(x) {
        return Err(Error::UnknownMarking(x.clone()));
    }
    if !pol.a_of(x).is_zero() {
        return Err(Error::Precondition(format!("a_{x} = {} must be 0", rational::format(&pol.a_of(x)))));
    }
    let rest: BTreeSet<Label> = markings.iter().filter(|l| *l != x).cloned().collect();
    let mut alpha: BTreeMap<NodeTypeLabel, Q> = BTreeMap::new();
    for (label, value) in &pol.alpha {
        label.check_admissible(g, markings)?;
        let image = NodeTypeLabel { b: label.b, markings: label.markings.iter().filter(|l| *l != x).cloned().collect() };
        if !image.is_admissible(g, &rest) {
            continue;
        }
        if image.is_self_symmetric(g, &rest) {
            if value.is_zero() {
                continue;
            }
            return Err(Error::Precondition(format!(
                "coefficient of {label} lands on the self-symmetric type {image}"
            )));
        }
        let (target, flipped) = image.canonicalize(g, &rest)?;
        let v = if flipped { -value } else { value.clone() };
        match alpha.get(&target) {
            Some(existing) if *existing != v => {
                return Err(Error::Precondition(format!(
                    "coefficients {} and {} both land on {target}",
                    rational::format(existing),
                    rational::format(&v)
                )));
            }
            _ => {
                alpha.insert(target, v);
            }
        }
    }
    alpha.retain(|_, v| !v.is_zero());
    let mut a = pol.a.clone();
    a.remove(x);
    Ok(ExplicitPolarization { s: pol.s.clone(), a, alpha, r: pol.r.clone() })
}

/// Abel–Jacobi polarization `omega^{-1}(sum 2 d_i sigma_i)` in rank 2, the
/// sheaf `O(sum d_i p_i)` and its verdict, which is always stable.
/// Markings missing from `dtuple` get `d_i = 0`.
pub fn abel_jacobi(
    graph: &MarkedDualGraph,
    dtuple: &BTreeMap<Label, i64>,
) -> Result<(ExplicitPolarization, SheafType, StabilityVerdict)> {
    if graph.markings().is_empty() {
        return Err(Error::Precondition("Abel–Jacobi sections need at least one marking".into()));
    }
    if !graph.is_stable() {
        return Err(Error::Precondition("Abel–Jacobi sections need a stable graph".into()));
    }
    for l in dtuple.keys() {
        graph.marking_vertex(l)?;
    }
    let mut pol = ExplicitPolarization::new(qi(-1), qi(2));
    let mut degrees = vec![0i64; graph.vertex_count()];
    for (l, &v) in graph.markings() {
        let d = dtuple.get(l).copied().unwrap_or(0);
        pol.a.insert(l.clone(), qi(2 * d));
        degrees[v] += d;
    }
    let sheaf = SheafType::line_bundle(degrees);
    let profile = pol.compile(graph)?;
    let verdict = stability::check(graph, &profile, &sheaf, graph.base_vertex())?;
    Ok((pol, sheaf, verdict))
}

/// Stability parameters on two-component one-node curves: the value on the
/// side named by each label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhiTable(pub BTreeMap<NodeTypeLabel, Q>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KpTranslation {
    pub polarization: ExplicitPolarization,
    /// Smallest marking; every label in the table contains it.
    pub anchor: Label,
}

/// A `(g-1)`-polarization reproducing `phi` on every two-component curve:
/// `s = 0`, `a = 0`, `r = 1`, `alpha_{b,B} = phi(b, B) - b + 1/2`.
pub fn kp_translate(phi: &PhiTable, g: u32, markings: &BTreeSet<Label>) -> Result<KpTranslation> {
    let Some(anchor) = markings.iter().next().cloned() else {
        return Err(Error::Precondition("translation needs a nonempty marking set".into()));
    };
    let expected = NodeTypeLabel::all_canonical(g, markings);
    for label in phi.0.keys() {
        label.check_admissible(g, markings)?;
        if !label.markings.contains(&anchor) {
            return Err(Error::InadmissibleLabel(format!("{label} does not contain the anchor marking {anchor}")));
        }
    }
    if let Some(missing) = expected.iter().find(|l| !phi.0.contains_key(l)) {
        return Err(Error::Precondition(format!("no value given for {missing}")));
    }
    let mut pol = ExplicitPolarization::new(qi(0), qi(1));
    for (label, value) in &phi.0 {
        let alpha = value - qi(label.b as i64) + half();
        if !alpha.is_zero() {
            pol.alpha.insert(label.clone(), alpha);
        }
    }
    Ok(KpTranslation { polarization: pol, anchor })
}

/// The two-vertex one-edge curve of type `(b, B)`: vertex 0 has genus `b`
/// and markings `B`.
pub fn two_component_curve(label: &NodeTypeLabel, g: u32, markings: &BTreeSet<Label>) -> Result<MarkedDualGraph> {
    label.check_admissible(g, markings)?;
    GraphSpec {
        vertices: vec![("v1".into(), label.b), ("v2".into(), g - label.b)],
        edges: vec![(0, 1)],
        markings: markings.iter().map(|l| (l.clone(), if label.markings.contains(l) { 0 } else { 1 })).collect(),
        base_vertex: None,
        require_stable: true,
    }
    .validate()
}
