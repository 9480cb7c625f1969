//! Dual graphs of marked nodal curves.
//!
//! Vertices are irreducible components weighted by geometric genus, edges are
//! nodes (loops allowed, parallel edges allowed) and markings are legs. A
//! subcurve is a nonempty proper set of vertices, stored as a bitmask.

use crate::error::{Error, GraphViolation, Result};
use crate::label::Label;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Exhaustive subcurve enumeration is exponential in the vertex count, so
/// graphs are capped here.
pub const MAX_VERTICES: usize = 24;

pub type EdgeId = usize;

/// A set of vertex indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSet(u32);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_bits(bits: u32) -> Self {
        VertexSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= 32);
        if n == 32 {
            VertexSet(u32::MAX)
        } else {
            VertexSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1 << v)
    }

    pub fn from_indices(vs: impl IntoIterator<Item = usize>) -> Self {
        VertexSet(vs.into_iter().fold(0, |acc, v| acc | (1 << v)))
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Complement inside a graph with `n` vertices.
    pub fn complement(self, n: usize) -> Self {
        VertexSet(!self.0 & Self::full(n).0)
    }

    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A nonempty proper set of components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subcurve(VertexSet);

impl Subcurve {
    pub fn new(set: VertexSet, graph: &MarkedDualGraph) -> Result<Self> {
        let n = graph.vertex_count();
        if set.is_empty() {
            return Err(Error::InvalidSubcurve("empty vertex set".into()));
        }
        if !set.is_subset(VertexSet::full(n)) {
            return Err(Error::InvalidSubcurve(format!("{set:?} names vertices outside the graph")));
        }
        if set == VertexSet::full(n) {
            return Err(Error::InvalidSubcurve("subcurve is the whole curve".into()));
        }
        Ok(Subcurve(set))
    }

    pub fn from_ids<S: AsRef<str>>(graph: &MarkedDualGraph, ids: &[S]) -> Result<Self> {
        let mut set = VertexSet::EMPTY;
        for id in ids {
            set.insert(graph.vertex_index(id.as_ref())?);
        }
        Self::new(set, graph)
    }

    pub fn vertices(self) -> VertexSet {
        self.0
    }

    pub fn complement(self, graph: &MarkedDualGraph) -> Subcurve {
        Subcurve(self.0.complement(graph.vertex_count()))
    }
}

/// `k`, `w`, arithmetic genus and connected components of a subcurve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubcurveInvariants {
    /// Nodes joining the subcurve to its complement.
    pub k: u32,
    /// Degree of the dualizing sheaf on the subcurve.
    pub w: i64,
    pub genus: i64,
    pub components: Vec<VertexSet>,
}

/// Unvalidated graph data; [`GraphSpec::validate`] turns it into a
/// [`MarkedDualGraph`].
#[derive(Clone, Debug, Default)]
pub struct GraphSpec {
    pub vertices: Vec<(String, u32)>,
    pub edges: Vec<(usize, usize)>,
    pub markings: Vec<(Label, usize)>,
    pub base_vertex: Option<usize>,
    pub require_stable: bool,
}

impl GraphSpec {
    /// Checks every invariant and reports all violations at once.
    pub fn validate(self) -> Result<MarkedDualGraph> {
        let n = self.vertices.len();
        let mut violations = Vec::new();
        if n == 0 {
            return Err(Error::InvalidGraph(vec![GraphViolation::Empty]));
        }
        if n > MAX_VERTICES {
            return Err(Error::InvalidGraph(vec![GraphViolation::TooManyVertices(n)]));
        }
        let mut ids = BTreeSet::new();
        for (id, _) in &self.vertices {
            if !ids.insert(id.as_str()) {
                violations.push(GraphViolation::DuplicateVertexId(id.clone()));
            }
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            for v in [a, b] {
                if v >= n {
                    violations.push(GraphViolation::DanglingEdge { edge: i, vertex: v });
                }
            }
            edges.push((a.min(b), a.max(b)));
        }
        let mut markings = BTreeMap::new();
        for (label, v) in &self.markings {
            if *v >= n {
                violations.push(GraphViolation::DanglingMarking { label: label.clone(), vertex: *v });
            }
            if markings.insert(label.clone(), *v).is_some() {
                violations.push(GraphViolation::DuplicateMarking(label.clone()));
            }
        }
        if let Some(b) = self.base_vertex {
            if b >= n {
                violations.push(GraphViolation::UnknownBaseVertex(b));
            }
        }
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(violations));
        }

        let graph = MarkedDualGraph::assemble(
            self.vertices,
            edges,
            markings,
            self.base_vertex,
            self.require_stable,
        );
        if !graph.is_connected(VertexSet::full(n)) {
            violations.push(GraphViolation::Disconnected);
        }
        if graph.require_stable {
            for v in 0..n {
                let value = graph.stability_value(v);
                if value <= 0 {
                    violations.push(GraphViolation::UnstableVertex {
                        id: graph.vertex_id(v).to_string(),
                        value,
                    });
                }
            }
        }
        if violations.is_empty() {
            Ok(graph)
        } else {
            Err(Error::InvalidGraph(violations))
        }
    }
}

/// A validated dual graph of a marked nodal curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedDualGraph {
    ids: Vec<String>,
    genera: Vec<u32>,
    edges: Vec<(usize, usize)>,
    markings: BTreeMap<Label, usize>,
    base_vertex: Option<usize>,
    require_stable: bool,
    // derived
    valence: Vec<u32>,
    adjacency: Vec<VertexSet>,
}

impl MarkedDualGraph {
    fn assemble(
        vertices: Vec<(String, u32)>,
        edges: Vec<(usize, usize)>,
        markings: BTreeMap<Label, usize>,
        base_vertex: Option<usize>,
        require_stable: bool,
    ) -> Self {
        let n = vertices.len();
        let mut valence = vec![0u32; n];
        let mut adjacency = vec![VertexSet::EMPTY; n];
        for &(a, b) in &edges {
            valence[a] += 1;
            valence[b] += 1;
            if a != b {
                adjacency[a].insert(b);
                adjacency[b].insert(a);
            }
        }
        let (ids, genera) = vertices.into_iter().unzip();
        MarkedDualGraph { ids, genera, edges, markings, base_vertex, require_stable, valence, adjacency }
    }

    /// Stable graph with vertex ids `v1, v2, ...`.
    pub fn stable(genera: &[u32], edges: &[(usize, usize)], markings: &[(&str, usize)]) -> Result<Self> {
        Self::build(genera, edges, markings, true)
    }

    /// Like [`MarkedDualGraph::stable`] but with the stability requirement
    /// chosen by the caller.
    pub fn build(
        genera: &[u32],
        edges: &[(usize, usize)],
        markings: &[(&str, usize)],
        require_stable: bool,
    ) -> Result<Self> {
        GraphSpec {
            vertices: genera.iter().enumerate().map(|(i, &g)| (format!("v{}", i + 1), g)).collect(),
            edges: edges.to_vec(),
            markings: markings.iter().map(|&(l, v)| (Label::from(l), v)).collect(),
            base_vertex: None,
            require_stable,
        }
        .validate()
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.ids.iter().cloned().zip(self.genera.iter().copied()).collect(),
            edges: self.edges.clone(),
            markings: self.markings.iter().map(|(l, &v)| (l.clone(), v)).collect(),
            base_vertex: self.base_vertex,
            require_stable: self.require_stable,
        }
    }

    pub fn with_base_vertex(mut self, base: Option<usize>) -> Result<Self> {
        if let Some(b) = base {
            if b >= self.vertex_count() {
                return Err(Error::InvalidGraph(vec![GraphViolation::UnknownBaseVertex(b)]));
            }
        }
        self.base_vertex = base;
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.genera.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.vertex_count())
    }

    pub fn vertex_genus(&self, v: usize) -> u32 {
        self.genera[v]
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.ids.iter().position(|x| x == id).ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    /// Endpoints `(a, b)` with `a <= b`.
    pub fn edge(&self, e: EdgeId) -> Result<(usize, usize)> {
        self.edges.get(e).copied().ok_or(Error::UnknownEdge(e))
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn markings(&self) -> &BTreeMap<Label, usize> {
        &self.markings
    }

    pub fn marking_labels(&self) -> BTreeSet<Label> {
        self.markings.keys().cloned().collect()
    }

    pub fn marking_vertex(&self, label: &Label) -> Result<usize> {
        self.markings.get(label).copied().ok_or_else(|| Error::UnknownMarking(label.clone()))
    }

    pub fn markings_at(&self, v: usize) -> impl Iterator<Item = &Label> {
        self.markings.iter().filter(move |(_, &w)| w == v).map(|(l, _)| l)
    }

    pub fn markings_in(&self, set: VertexSet) -> BTreeSet<Label> {
        self.markings.iter().filter(|(_, &w)| set.contains(w)).map(|(l, _)| l.clone()).collect()
    }

    pub fn base_vertex(&self) -> Option<usize> {
        self.base_vertex
    }

    pub fn require_stable(&self) -> bool {
        self.require_stable
    }

    /// Loops count twice.
    pub fn valence(&self, v: usize) -> u32 {
        self.valence[v]
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adjacency[v]
    }

    /// Arithmetic genus `sum g_v + |E| - |V| + 1`.
    pub fn genus(&self) -> u32 {
        let total = self.genera.iter().map(|&g| g as i64).sum::<i64>() + self.edges.len() as i64
            - self.vertex_count() as i64
            + 1;
        total as u32
    }

    /// `2 g_v - 2 + valence(v) + #markings(v)`.
    pub fn stability_value(&self, v: usize) -> i64 {
        2 * self.genera[v] as i64 - 2 + self.valence[v] as i64 + self.markings_at(v).count() as i64
    }

    pub fn is_stable(&self) -> bool {
        (0..self.vertex_count()).all(|v| self.stability_value(v) > 0)
    }

    /// Degree of the dualizing sheaf on one component.
    pub fn vertex_w(&self, v: usize) -> i64 {
        2 * self.genera[v] as i64 - 2 + self.valence[v] as i64
    }

    /// Whether the subgraph induced on `set` is connected (false if empty).
    pub fn is_connected(&self, set: VertexSet) -> bool {
        match set.first() {
            None => false,
            Some(v) => self.reach(v, set) == set,
        }
    }

    fn reach(&self, start: usize, within: VertexSet) -> VertexSet {
        let mut seen = VertexSet::singleton(start);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(self.adjacency[v]);
            }
            next = next.intersection(within);
            frontier = VertexSet(next.0 & !seen.0);
            seen = seen.union(frontier);
        }
        seen
    }

    /// Connected components of the induced subgraph, ordered by lowest vertex.
    pub fn components(&self, set: VertexSet) -> Vec<VertexSet> {
        let mut rest = set;
        let mut out = Vec::new();
        while let Some(v) = rest.first() {
            let c = self.reach(v, rest);
            out.push(c);
            rest = VertexSet(rest.0 & !c.0);
        }
        out
    }

    /// Whether the graph stays connected after deleting the given edges.
    pub fn connected_without(&self, removed: &BTreeSet<EdgeId>) -> bool {
        let n = self.vertex_count();
        let mut adj = vec![VertexSet::EMPTY; n];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if a != b && !removed.contains(&e) {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        let full = VertexSet::full(n);
        let mut seen = VertexSet::singleton(0);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(adj[v]);
            }
            frontier = VertexSet(next.0 & !seen.0);
            seen = seen.union(frontier);
        }
        seen == full
    }

    /// Number of nodes with exactly one branch in `set` (loops never count).
    pub fn crossing_count(&self, set: VertexSet) -> u32 {
        self.edges.iter().filter(|&&(a, b)| set.contains(a) != set.contains(b)).count() as u32
    }

    /// `w` of a vertex set; additive over vertices.
    pub fn w_of(&self, set: VertexSet) -> i64 {
        set.iter().map(|v| self.vertex_w(v)).sum()
    }

    /// Arithmetic genus `1 - chi(O_Y)` of the subcurve on `set`.
    pub fn genus_of(&self, set: VertexSet) -> i64 {
        let interior = self.edges.iter().filter(|&&(a, b)| set.contains(a) && set.contains(b)).count();
        set.iter().map(|v| self.genera[v] as i64).sum::<i64>() + interior as i64 - set.len() as i64 + 1
    }

    pub fn subcurve_invariants(&self, y: Subcurve) -> SubcurveInvariants {
        let set = y.vertices();
        SubcurveInvariants {
            k: self.crossing_count(set),
            w: self.w_of(set),
            genus: self.genus_of(set),
            components: self.components(set),
        }
    }

    /// All nonempty proper vertex sets inducing a connected subgraph, in
    /// increasing bitmask order.
    pub fn connected_proper_subcurves(&self) -> Vec<VertexSet> {
        let full = self.all_vertices().bits();
        (1..full).map(VertexSet).filter(|&s| self.is_connected(s)).collect()
    }

    /// All nonempty proper vertex sets in increasing bitmask order.
    pub fn proper_subcurves(&self) -> impl Iterator<Item = VertexSet> {
        (1..self.all_vertices().bits()).map(VertexSet)
    }

    /// Whether deleting edge `e` disconnects the graph.
    pub fn is_bridge(&self, e: EdgeId) -> Result<bool> {
        let (a, b) = self.edge(e)?;
        if a == b {
            return Ok(false);
        }
        Ok(!self.connected_without(&BTreeSet::from([e])))
    }

    /// The two sides of a separating edge: the side containing its first
    /// endpoint, then the other.
    fn sides(&self, e: EdgeId) -> Result<Option<(VertexSet, VertexSet)>> {
        if !self.is_bridge(e)? {
            return Ok(None);
        }
        let (a, _) = self.edges[e];
        let n = self.vertex_count();
        let mut adj = vec![VertexSet::EMPTY; n];
        for (i, &(x, y)) in self.edges.iter().enumerate() {
            if x != y && i != e {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        let mut seen = VertexSet::singleton(a);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(adj[v]);
            }
            frontier = VertexSet(next.0 & !seen.0);
            seen = seen.union(frontier);
        }
        Ok(Some((seen, seen.complement(n))))
    }

    /// Genus and markings of one side of a separating node.
    fn side_type(&self, side: VertexSet) -> NodeTypeLabel {
        // The node itself is not counted: the side's genus is computed on
        // the normalization at the node, so use the induced subgraph.
        NodeTypeLabel { b: self.genus_of(side) as u32, markings: self.markings_in(side) }
    }

    /// The type of a node: `None` for non-separating nodes, otherwise the
    /// canonical label and the designated side.
    pub fn node_type(&self, e: EdgeId) -> Result<Option<SeparatingNode>> {
        let Some((s1, s2)) = self.sides(e)? else {
            return Ok(None);
        };
        let g = self.genus();
        let a = self.marking_labels();
        let t1 = self.side_type(s1);
        let t2 = self.side_type(s2);
        let side = match canonical_side(g, &a, &t1, &t2) {
            Some(true) => Some(s1),
            Some(false) => Some(s2),
            None => None,
        };
        let label = if side == Some(s2) { t2 } else { t1 };
        Ok(Some(SeparatingNode { edge: e, label, designated_side: side }))
    }

    /// All separating nodes in edge order.
    pub fn separating_nodes(&self) -> Vec<SeparatingNode> {
        (0..self.edge_count()).filter_map(|e| self.node_type(e).expect("edge in range")).collect()
    }

    /// Per-vertex degree of the boundary divisor named by `label`, read with
    /// the label's own orientation: `+1` for each node of that type on the
    /// side of genus `b` with markings `B`, `-1` on the other side.
    pub fn vertex_boundary_degrees(&self, label: &NodeTypeLabel) -> Result<Vec<i64>> {
        let g = self.genus();
        let a = self.marking_labels();
        label.check_admissible(g, &a)?;
        if label.is_self_symmetric(g, &a) {
            return Err(Error::InadmissibleLabel(format!(
                "{label} is self-symmetric for genus {g} without markings; its orientation is undetermined"
            )));
        }
        let mut deg = vec![0i64; self.vertex_count()];
        for e in 0..self.edge_count() {
            let Some((s1, s2)) = self.sides(e)? else { continue };
            let (a_end, b_end) = self.edges[e];
            let (in1, in2) = if s1.contains(a_end) { (a_end, b_end) } else { (b_end, a_end) };
            if self.side_type(s1) == *label {
                deg[in1] += 1;
                deg[in2] -= 1;
            } else if self.side_type(s2) == *label {
                deg[in2] += 1;
                deg[in1] -= 1;
            }
        }
        Ok(deg)
    }

    /// Degree of the boundary divisor of type `label` on the subcurve `y`,
    /// summed over its components.
    pub fn boundary_degree(&self, y: VertexSet, label: &NodeTypeLabel) -> Result<i64> {
        let per_vertex = self.vertex_boundary_degrees(label)?;
        Ok(y.iter().map(|v| per_vertex[v]).sum())
    }

    /// The component that becomes unstable when marking `x` is forgotten,
    /// if any.
    pub fn contraction_candidate(&self, x: &Label) -> Result<Option<usize>> {
        let v = self.marking_vertex(x)?;
        Ok((self.stability_value(v) - 1 <= 0).then_some(v))
    }

    /// Removes marking `x` and contracts the component that becomes
    /// unstable, if any.
    pub fn stabilize_forgetting(&self, x: &Label) -> Result<Stabilization> {
        let v0 = self.marking_vertex(x)?;
        if !self.is_stable() {
            return Err(Error::Precondition("stabilization needs a stable input graph".into()));
        }
        let g = self.genus() as i64;
        let n_after = self.markings.len() as i64 - 1;
        if 2 * g - 2 + n_after <= 0 {
            return Err(Error::Infeasible(format!(
                "forgetting {x} leaves genus {g} with {n_after} marking(s), which has no stable model"
            )));
        }
        let mut spec = self.to_spec();
        spec.markings.retain(|(l, _)| l != x);
        let n = self.vertex_count();

        if self.stability_value(v0) - 1 > 0 {
            spec.require_stable = true;
            let graph = spec.validate()?;
            return Ok(Stabilization {
                graph,
                vertex_map: (0..n).map(Some).collect(),
                edge_map: (0..self.edge_count()).map(Some).collect(),
                contraction: Contraction::None,
            });
        }

        let incident: Vec<EdgeId> =
            (0..self.edge_count()).filter(|&e| self.edges[e].0 == v0 || self.edges[e].1 == v0).collect();
        let other = |e: EdgeId| {
            let (a, b) = self.edges[e];
            if a == v0 {
                b
            } else {
                a
            }
        };
        let vertex_map: Vec<Option<usize>> =
            (0..n).map(|v| (v != v0).then(|| if v > v0 { v - 1 } else { v })).collect();
        let mut edge_map = vec![None; self.edge_count()];
        let mut next = 0;
        for (e, slot) in edge_map.iter_mut().enumerate() {
            if !incident.contains(&e) {
                *slot = Some(next);
                next += 1;
            }
        }
        let remap = |v: usize| vertex_map[v].expect("kept vertex");
        let kept_edges: Vec<(usize, usize)> = (0..self.edge_count())
            .filter(|e| !incident.contains(e))
            .map(|e| (remap(self.edges[e].0), remap(self.edges[e].1)))
            .collect();
        let vertices: Vec<(String, u32)> =
            (0..n).filter(|&v| v != v0).map(|v| (self.ids[v].clone(), self.genera[v])).collect();
        let markings: Vec<(Label, usize)> =
            self.markings.iter().filter(|(l, _)| *l != x).map(|(l, &v)| (l.clone(), v)).collect();

        let (edges, markings, contraction) = match (self.valence[v0], incident.as_slice()) {
            (2, &[e1, e2]) => {
                let (u, w) = (other(e1), other(e2));
                let mut edges = kept_edges;
                edges.push((remap(u), remap(w)));
                let new_edge = edges.len() - 1;
                edge_map[e1] = Some(new_edge);
                edge_map[e2] = Some(new_edge);
                let markings = markings.into_iter().map(|(l, v)| (l, remap(v))).collect();
                (edges, markings, Contraction::Bridge { vertex: v0, edges: [e1, e2], ends: [u, w], new_edge })
            }
            (1, &[e]) => {
                let attach = other(e);
                let moved = self
                    .markings_at(v0)
                    .find(|l| *l != x)
                    .cloned()
                    .expect("a contracted tail carries one other marking");
                let markings = markings
                    .into_iter()
                    .map(|(l, v)| if v == v0 { (l, remap(attach)) } else { (l, remap(v)) })
                    .collect();
                (kept_edges, markings, Contraction::Tail { vertex: v0, edge: e, attach, moved })
            }
            _ => unreachable!("an unstable component after forgetting one point has valence 1 or 2"),
        };
        let base_vertex = self.base_vertex.map(|b| match &contraction {
            Contraction::Bridge { ends, .. } if b == v0 => remap(ends[0]),
            Contraction::Tail { attach, .. } if b == v0 => remap(*attach),
            _ => remap(b),
        });
        let graph = GraphSpec { vertices, edges, markings, base_vertex, require_stable: true }.validate()?;
        Ok(Stabilization { graph, vertex_map, edge_map, contraction })
    }
}

/// Which of two side types is designated; `None` when the choice is
/// undetermined (no markings and equal genera).
fn canonical_side(g: u32, a: &BTreeSet<Label>, t1: &NodeTypeLabel, t2: &NodeTypeLabel) -> Option<bool> {
    match a.iter().next() {
        Some(min) => Some(t1.markings.contains(min)),
        None => {
            debug_assert_eq!(t1.b + t2.b, g);
            match t1.b.cmp(&t2.b) {
                std::cmp::Ordering::Less => Some(true),
                std::cmp::Ordering::Greater => Some(false),
                std::cmp::Ordering::Equal => None,
            }
        }
    }
}

/// Result of [`MarkedDualGraph::stabilize_forgetting`].
#[derive(Clone, Debug)]
pub struct Stabilization {
    pub graph: MarkedDualGraph,
    /// Old vertex index to new index; `None` for the contracted component.
    pub vertex_map: Vec<Option<usize>>,
    /// Old edge index to new index. Both edges of a contracted bridge map to
    /// the new edge; the edge of a contracted tail maps to `None`.
    pub edge_map: Vec<Option<EdgeId>>,
    pub contraction: Contraction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contraction {
    None,
    /// A rational component with two nodes and only the forgotten marking;
    /// its two edges are fused. Indices refer to the input graph except
    /// `new_edge`.
    Bridge { vertex: usize, edges: [EdgeId; 2], ends: [usize; 2], new_edge: EdgeId },
    /// A rational tail carrying the forgotten marking and one other marking
    /// that moves to the attachment vertex.
    Tail { vertex: usize, edge: EdgeId, attach: usize, moved: Label },
}

impl Contraction {
    pub fn kind(&self) -> &'static str {
        match self {
            Contraction::None => "none",
            Contraction::Bridge { .. } => "a",
            Contraction::Tail { .. } => "b",
        }
    }
}

/// Type `(b, B)` of a separating node, naming the side of genus `b` that
/// carries the markings `B`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeTypeLabel {
    pub b: u32,
    #[serde(rename = "B")]
    pub markings: BTreeSet<Label>,
}

impl NodeTypeLabel {
    pub fn new<L: Into<Label>>(b: u32, markings: impl IntoIterator<Item = L>) -> Self {
        NodeTypeLabel { b, markings: markings.into_iter().map(Into::into).collect() }
    }

    /// The same node type named from the other side.
    pub fn complement(&self, g: u32, a: &BTreeSet<Label>) -> Self {
        NodeTypeLabel { b: g - self.b, markings: a.difference(&self.markings).cloned().collect() }
    }

    /// Both sides must support a stable pointed configuration once the node
    /// is added as a marking.
    pub fn check_admissible(&self, g: u32, a: &BTreeSet<Label>) -> Result<()> {
        if self.b > g {
            return Err(Error::InadmissibleLabel(format!("{self}: b exceeds genus {g}")));
        }
        if !self.markings.is_subset(a) {
            return Err(Error::InadmissibleLabel(format!("{self}: markings outside the marking set")));
        }
        let rest = a.len() - self.markings.len();
        if !(self.b >= 1 || self.markings.len() >= 2) || !(g - self.b >= 1 || rest >= 2) {
            return Err(Error::InadmissibleLabel(format!("{self}: a side would be unstable")));
        }
        Ok(())
    }

    pub fn is_admissible(&self, g: u32, a: &BTreeSet<Label>) -> bool {
        self.check_admissible(g, a).is_ok()
    }

    pub fn is_self_symmetric(&self, g: u32, a: &BTreeSet<Label>) -> bool {
        a.is_empty() && 2 * self.b == g
    }

    /// Whether this label names the designated side: the side carrying the
    /// smallest marking, or without markings the side of smaller genus.
    pub fn is_canonical(&self, g: u32, a: &BTreeSet<Label>) -> bool {
        match a.iter().next() {
            Some(min) => self.markings.contains(min),
            None => 2 * self.b < g,
        }
    }

    /// Canonical orientation of this node type. The flag is true when the
    /// label was turned around, in which case attached coefficients change
    /// sign. Fails on inadmissible or self-symmetric labels.
    pub fn canonicalize(&self, g: u32, a: &BTreeSet<Label>) -> Result<(NodeTypeLabel, bool)> {
        self.check_admissible(g, a)?;
        if self.is_self_symmetric(g, a) {
            return Err(Error::InadmissibleLabel(format!(
                "{self} is self-symmetric for genus {g} without markings"
            )));
        }
        if self.is_canonical(g, a) {
            Ok((self.clone(), false))
        } else {
            Ok((self.complement(g, a), true))
        }
    }

    /// All canonical, non-self-symmetric admissible labels for `(g, A)`.
    pub fn all_canonical(g: u32, a: &BTreeSet<Label>) -> Vec<NodeTypeLabel> {
        let labels: Vec<&Label> = a.iter().collect();
        let mut out = Vec::new();
        for b in 0..=g {
            for mask in 0u32..(1 << labels.len()) {
                let l = NodeTypeLabel {
                    b,
                    markings: labels
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, l)| (*l).clone())
                        .collect(),
                };
                if l.is_admissible(g, a) && !l.is_self_symmetric(g, a) && l.is_canonical(g, a) {
                    out.push(l);
                }
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for NodeTypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms: Vec<&str> = self.markings.iter().map(Label::as_str).collect();
        write!(f, "({}, {{{}}})", self.b, ms.join(","))
    }
}

/// A separating node with its canonical type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatingNode {
    pub edge: EdgeId,
    pub label: NodeTypeLabel,
    /// Vertices on the side named by `label`; `None` when the label is
    /// self-symmetric.
    pub designated_side: Option<VertexSet>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> MarkedDualGraph {
        MarkedDualGraph::stable(&[0, 0], &[(0, 1), (0, 1), (0, 1)], &[]).unwrap()
    }

    fn chain3() -> MarkedDualGraph {
        MarkedDualGraph::stable(&[1, 1, 1], &[(0, 1), (1, 2)], &[]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let g = MarkedDualGraph::stable(&[1, 1], &[(0, 1)], &[]).unwrap();
        assert_eq!(g.genus(), 2);
        let err = MarkedDualGraph::stable(&[0], &[], &[]).unwrap_err();
        assert!(matches!(err, Error::InvalidGraph(ref v) if v.contains(&GraphViolation::UnstableVertex { id: "v1".into(), value: -2 })));
        let t = theta();
        assert_eq!(t.genus(), 2);
        assert_eq!(t.stability_value(0), 1);
    }

    #[test]
    fn validate_reports_every_violation() {
        let err = GraphSpec {
            vertices: vec![("a".into(), 0), ("b".into(), 0)],
            edges: vec![],
            markings: vec![("1".into(), 0), ("1".into(), 1)],
            base_vertex: None,
            require_stable: true,
        }
        .validate()
        .unwrap_err();
        let Error::InvalidGraph(v) = err else { panic!() };
        assert!(v.contains(&GraphViolation::DuplicateMarking("1".into())));
        let err = GraphSpec {
            vertices: vec![("a".into(), 0), ("b".into(), 0)],
            edges: vec![],
            markings: vec![],
            base_vertex: None,
            require_stable: true,
        }
        .validate()
        .unwrap_err();
        let Error::InvalidGraph(v) = err else { panic!() };
        assert!(v.contains(&GraphViolation::Disconnected));
        assert_eq!(v.iter().filter(|x| matches!(x, GraphViolation::UnstableVertex { .. })).count(), 2);
        assert!(err_is_disconnected(GraphSpec::default().validate().unwrap_err()));
    }

    fn err_is_disconnected(e: Error) -> bool {
        e.to_string().contains("disconnected")
    }

    #[test]
    fn subcurve_invariant_examples() {
        let g = MarkedDualGraph::stable(&[1, 2], &[(0, 1)], &[]).unwrap();
        let inv = g.subcurve_invariants(Subcurve::from_ids(&g, &["v1"]).unwrap());
        assert_eq!((inv.k, inv.w, inv.genus), (1, 1, 1));

        let t = theta();
        let inv = t.subcurve_invariants(Subcurve::from_ids(&t, &["v1"]).unwrap());
        assert_eq!((inv.k, inv.w), (3, 1));

        let c = chain3();
        let inv = c.subcurve_invariants(Subcurve::from_ids(&c, &["v1", "v3"]).unwrap());
        assert_eq!((inv.k, inv.w), (2, 2));
        assert_eq!(inv.components.len(), 2);
        assert_eq!(inv.w, 2 * inv.genus - 2 + inv.k as i64);
    }

    #[test]
    fn subcurve_rejects_empty_and_whole() {
        let t = theta();
        assert!(Subcurve::new(VertexSet::EMPTY, &t).is_err());
        assert!(Subcurve::new(VertexSet::full(2), &t).is_err());
        assert!(Subcurve::new(VertexSet::singleton(5), &t).is_err());
    }

    #[test]
    fn node_type_examples() {
        let t = theta();
        for e in 0..3 {
            assert_eq!(t.node_type(e).unwrap(), None);
        }
        let g = MarkedDualGraph::stable(&[1, 1], &[(0, 1)], &[("1", 0), ("2", 1)]).unwrap();
        let node = g.node_type(0).unwrap().unwrap();
        assert_eq!(node.label, NodeTypeLabel::new(1, ["1"]));
        assert_eq!(node.designated_side, Some(VertexSet::singleton(0)));

        let c = chain3();
        let node = c.node_type(1).unwrap().unwrap();
        assert_eq!(node.label, NodeTypeLabel::new::<&str>(1, []));
        assert_eq!(node.designated_side, Some(VertexSet::singleton(2)));
        assert!(matches!(c.node_type(7), Err(Error::UnknownEdge(7))));
    }

    #[test]
    fn self_symmetric_node_has_no_designated_side() {
        let g = MarkedDualGraph::stable(&[1, 1], &[(0, 1)], &[]).unwrap();
        let node = g.node_type(0).unwrap().unwrap();
        assert_eq!(node.designated_side, None);
        assert!(g.boundary_degree(VertexSet::singleton(0), &NodeTypeLabel::new::<&str>(1, [])).is_err());
    }

    #[test]
    fn boundary_degree_examples() {
        let g = MarkedDualGraph::stable(&[1, 1], &[(0, 1)], &[("1", 0), ("2", 1)]).unwrap();
        let l = NodeTypeLabel::new(1, ["1"]);
        assert_eq!(g.boundary_degree(VertexSet::singleton(0), &l).unwrap(), 1);
        assert_eq!(g.boundary_degree(VertexSet::singleton(1), &l).unwrap(), -1);
        // The same divisor named from the other side reverses the sign.
        let lc = NodeTypeLabel::new(1, ["2"]);
        assert_eq!(g.boundary_degree(VertexSet::singleton(0), &lc).unwrap(), -1);

        let c = chain3();
        let l = NodeTypeLabel::new::<&str>(1, []);
        assert_eq!(c.vertex_boundary_degrees(&l).unwrap(), vec![1, -2, 1]);
        // No node of type (0, {}) exists, and it is inadmissible anyway.
        assert!(c.boundary_degree(VertexSet::singleton(0), &NodeTypeLabel::new::<&str>(0, [])).is_err());

        let t = theta();
        // No separating node at all.
        let tl = NodeTypeLabel::new::<&str>(0, []);
        assert!(t.vertex_boundary_degrees(&tl).is_err());
        let g2 = MarkedDualGraph::stable(&[2], &[], &[("1", 0)]).unwrap();
        assert_eq!(g2.vertex_boundary_degrees(&NodeTypeLabel::new(1, ["1"])).unwrap(), vec![0]);
    }

    #[test]
    fn label_admissibility_and_canonical_form() {
        let a: BTreeSet<Label> = ["1", "2"].into_iter().map(Label::from).collect();
        assert!(NodeTypeLabel::new(0, ["1", "2"]).is_admissible(1, &a));
        assert!(!NodeTypeLabel::new(0, ["1"]).is_admissible(1, &a));
        let (c, flipped) = NodeTypeLabel::new(1, ["2"]).canonicalize(2, &a).unwrap();
        assert_eq!(c, NodeTypeLabel::new(1, ["1"]));
        assert!(flipped);
        let empty = BTreeSet::new();
        let (c, flipped) = NodeTypeLabel::new::<&str>(2, []).canonicalize(3, &empty).unwrap();
        assert_eq!((c.b, flipped), (1, true));
        assert!(NodeTypeLabel::new::<&str>(1, []).canonicalize(2, &empty).is_err());
        assert_eq!(NodeTypeLabel::all_canonical(2, &BTreeSet::from([Label::from("1")])), vec![NodeTypeLabel::new(1, ["1"])]);
    }

    #[test]
    fn stabilize_bridge_case() {
        // v0 (g=0, marking x) between v1 (g=1, marking 1) and v2 (g=1, marking 2)
        let g = MarkedDualGraph::stable(&[0, 1, 1], &[(0, 1), (0, 2)], &[("x", 0), ("1", 1), ("2", 2)]).unwrap();
        let s = g.stabilize_forgetting(&"x".into()).unwrap();
        assert_eq!(s.contraction.kind(), "a");
        assert_eq!(s.graph.vertex_count(), 2);
        assert_eq!(s.graph.edges(), &[(0, 1)]);
        assert_eq!(s.graph.genus(), g.genus());
        assert!(s.graph.is_stable());
        assert_eq!(s.edge_map, vec![Some(0), Some(0)]);
    }

    #[test]
    fn stabilize_bridge_into_loop() {
        // rational component joined twice to the same vertex becomes a loop
        let g = MarkedDualGraph::stable(&[0, 1], &[(0, 1), (0, 1)], &[("x", 0), ("1", 1)]).unwrap();
        let s = g.stabilize_forgetting(&"x".into()).unwrap();
        assert_eq!(s.graph.edges(), &[(0, 0)]);
        assert_eq!(s.graph.genus(), 2);
    }

    #[test]
    fn stabilize_tail_case() {
        let g = MarkedDualGraph::stable(&[0, 2], &[(0, 1)], &[("x", 0), ("1", 0)]).unwrap();
        let s = g.stabilize_forgetting(&"x".into()).unwrap();
        assert_eq!(s.contraction.kind(), "b");
        assert_eq!(s.graph.vertex_count(), 1);
        assert_eq!(s.graph.marking_vertex(&"1".into()).unwrap(), 0);
        assert_eq!(s.graph.vertex_id(0), "v2");
    }

    #[test]
    fn stabilize_without_contraction() {
        let g = MarkedDualGraph::stable(&[1, 1], &[(0, 1)], &[("x", 0), ("1", 1)]).unwrap();
        let s = g.stabilize_forgetting(&"x".into()).unwrap();
        assert_eq!(s.contraction, Contraction::None);
        assert_eq!(s.graph.markings().len(), 1);
        assert!(matches!(g.stabilize_forgetting(&"y".into()), Err(Error::UnknownMarking(_))));
    }

    #[test]
    fn stabilize_infeasible() {
        let g = MarkedDualGraph::stable(&[1], &[], &[("x", 0)]).unwrap();
        assert!(matches!(g.stabilize_forgetting(&"x".into()), Err(Error::Infeasible(_))));
    }
}
