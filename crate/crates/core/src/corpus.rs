//! Exhaustive generation of stable marked dual graphs up to isomorphism.

use crate::error::{Error, Result};
use crate::graph::{GraphSpec, MarkedDualGraph, MAX_VERTICES};
use crate::label::Label;
use std::collections::{BTreeMap, BTreeSet};

/// Isomorphism invariant of a decorated graph: the sorted vertex keys
/// `(genus, markings, loops, valence)` followed by the edge multiplicity
/// matrix, minimized over relabelings that keep the keys sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    keys: Vec<(u32, Vec<Label>, u32, u32)>,
    matrix: Vec<u32>,
}

fn multiplicities(graph: &MarkedDualGraph) -> Vec<Vec<u32>> {
    let n = graph.vertex_count();
    let mut m = vec![vec![0u32; n]; n];
    for &(a, b) in graph.edges() {
        m[a][b] += 1;
        if a != b {
            m[b][a] += 1;
        }
    }
    m
}

fn encode(m: &[Vec<u32>], order: &[usize]) -> Vec<u32> {
    let n = order.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(m[order[i]][order[j]]);
        }
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Canonical form and the vertex order realizing it.
pub fn canonical_form(graph: &MarkedDualGraph) -> (CanonicalForm, Vec<usize>) {
    let n = graph.vertex_count();
    let m = multiplicities(graph);
    let key = |v: usize| {
        (graph.vertex_genus(v), graph.markings_at(v).cloned().collect::<Vec<_>>(), m[v][v], graph.valence(v))
    };
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by_key(|&v| key(v));
    let keys: Vec<_> = sorted.iter().map(|&v| key(v)).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        if i > 0 && keys[i] == keys[i - 1] {
            classes.last_mut().expect("nonempty").push(v);
        } else {
            classes.push(vec![v]);
        }
    }
    let class_perms: Vec<Vec<Vec<usize>>> = classes.iter().map(|c| permutations(c)).collect();
    let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
    let mut idx = vec![0usize; classes.len()];
    loop {
        let order: Vec<usize> = idx.iter().enumerate().flat_map(|(c, &i)| class_perms[c][i].iter().copied()).collect();
        let enc = encode(&m, &order);
        if best.as_ref().is_none_or(|(b, _)| enc < *b) {
            best = Some((enc, order));
        }
        // odometer over the per-class permutations
        let mut c = 0;
        loop {
            if c == idx.len() {
                let (matrix, order) = best.expect("at least one ordering");
                return (CanonicalForm { keys, matrix }, order);
            }
            idx[c] += 1;
            if idx[c] < class_perms[c].len() {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

/// Same graph with vertices renumbered as `v1, v2, ...` in canonical order
/// and edges sorted.
fn relabel(graph: &MarkedDualGraph, order: &[usize]) -> MarkedDualGraph {
    let mut pos = vec![0usize; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut edges: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .map(|&(a, b)| (pos[a].min(pos[b]), pos[a].max(pos[b])))
        .collect();
    edges.sort();
    GraphSpec {
        vertices: order.iter().enumerate().map(|(i, &v)| (format!("v{}", i + 1), graph.vertex_genus(v))).collect(),
        edges,
        markings: graph.markings().iter().map(|(l, &v)| (l.clone(), pos[v])).collect(),
        base_vertex: None,
        require_stable: graph.require_stable(),
    }
    .validate()
    .expect("relabeling preserves validity")
}

pub fn is_isomorphic(a: &MarkedDualGraph, b: &MarkedDualGraph) -> bool {
    canonical_form(a).0 == canonical_form(b).0
}

/// Nonincreasing genus vectors of length `n` with sum at most `g`.
fn genus_vectors(n: usize, g: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, max: u32, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in (0..=max.min(budget)).rev() {
            cur.push(x);
            rec(n, x, budget - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, g, g, &mut Vec::new(), &mut out);
    out
}

/// Multisets of size `k` over `0..types`, as nondecreasing sequences.
fn multisets(types: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(types: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for t in start..types {
            cur.push(t);
            rec(types, k, t, cur, f);
            cur.pop();
        }
    }
    rec(types, k, 0, &mut Vec::new(), &mut f);
}

/// Connected unmarked graphs of genus `g` on `n` vertices whose stability
/// deficit can be covered by `markings` legs, one per isomorphism class.
fn skeletons(n: usize, g: u32, markings: usize) -> Vec<MarkedDualGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut found: BTreeMap<CanonicalForm, MarkedDualGraph> = BTreeMap::new();
    for genera in genus_vectors(n, g) {
        let sum: u32 = genera.iter().sum();
        let edges = g as i64 - sum as i64 + n as i64 - 1;
        if edges < n as i64 - 1 {
            continue;
        }
        multisets(pairs.len(), edges as usize, |choice| {
            let mut val = vec![0i64; n];
            for &t in choice {
                let (a, b) = pairs[t];
                val[a] += 1;
                val[b] += 1;
            }
            let deficit: i64 = (0..n).map(|v| (3 - 2 * genera[v] as i64 - val[v]).max(0)).sum();
            if deficit > markings as i64 {
                return;
            }
            let Ok(graph) = MarkedDualGraph::build(&genera, &choice.iter().map(|&t| pairs[t]).collect::<Vec<_>>(), &[], false)
            else {
                return; // disconnected
            };
            let (form, order) = canonical_form(&graph);
            found.entry(form).or_insert_with(|| relabel(&graph, &order));
        });
    }
    found.into_values().collect()
}

/// All stable graphs of genus `g` with marking set `a` and at most
/// `max_vertices` vertices, one per isomorphism class, ordered by vertex
/// count and then canonical form. Vertex ids are `v1, v2, ...`.
pub fn generate_corpus(g: u32, a: &BTreeSet<Label>, max_vertices: usize) -> Result<Vec<MarkedDualGraph>> {
    if 2 * g as i64 - 2 + a.len() as i64 <= 0 {
        return Err(Error::Infeasible(format!("no stable curves of genus {g} with {} marking(s)", a.len())));
    }
    if max_vertices == 0 || max_vertices > MAX_VERTICES {
        return Err(Error::Precondition(format!("max_vertices must lie in 1..={MAX_VERTICES}")));
    }
    // a stable graph has at most 2g - 2 + |A| vertices
    let cap = max_vertices.min((2 * g as i64 - 2 + a.len() as i64) as usize);
    let labels: Vec<&Label> = a.iter().collect();
    let mut out = Vec::new();
    for n in 1..=cap {
        let mut found: BTreeMap<CanonicalForm, MarkedDualGraph> = BTreeMap::new();
        for skel in skeletons(n, g, labels.len()) {
            let deficit: Vec<usize> =
                (0..n).map(|v| (3 - 2 * skel.vertex_genus(v) as i64 - skel.valence(v) as i64).max(0) as usize).collect();
            let total = n.pow(labels.len() as u32);
            for code in 0..total {
                let mut place = Vec::with_capacity(labels.len());
                let mut c = code;
                let mut count = vec![0usize; n];
                for _ in &labels {
                    place.push(c % n);
                    count[c % n] += 1;
                    c /= n;
                }
                if (0..n).any(|v| count[v] < deficit[v]) {
                    continue;
                }
                let mut spec = skel.to_spec();
                spec.markings = labels.iter().zip(&place).map(|(l, &v)| ((*l).clone(), v)).collect();
                spec.require_stable = true;
                let graph = spec.validate().expect("deficit covered");
                let (form, order) = canonical_form(&graph);
                found.entry(form).or_insert_with(|| relabel(&graph, &order));
            }
        }
        out.extend(found.into_values());
    }
    Ok(out)
}

/// `{"1", ..., "n"}`.
pub fn numbered_markings(n: usize) -> BTreeSet<Label> {
    (1..=n).map(|i| Label::new(i.to_string())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Isomorphism by trying every vertex bijection.
    fn brute_isomorphic(a: &MarkedDualGraph, b: &MarkedDualGraph) -> bool {
        let n = a.vertex_count();
        if n != b.vertex_count() || a.edge_count() != b.edge_count() || a.markings().len() != b.markings().len() {
            return false;
        }
        let (ma, mb) = (multiplicities(a), multiplicities(b));
        permutations(&(0..n).collect::<Vec<_>>()).into_iter().any(|p| {
            (0..n).all(|v| a.vertex_genus(v) == b.vertex_genus(p[v]))
                && a.markings().iter().all(|(l, &v)| b.markings().get(l) == Some(&p[v]))
                && (0..n).all(|i| (0..n).all(|j| ma[i][j] == mb[p[i]][p[j]]))
        })
    }

    /// Independent enumeration: every genus assignment, every edge multiset
    /// and every marking placement, deduplicated by brute-force isomorphism.
    fn brute_corpus(g: u32, a: &BTreeSet<Label>, max_vertices: usize) -> Vec<MarkedDualGraph> {
        let labels: Vec<&str> = a.iter().map(Label::as_str).collect();
        let mut reps: Vec<MarkedDualGraph> = Vec::new();
        for n in 1..=max_vertices {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
            let genus_choices = (g as usize + 1).pow(n as u32);
            for gc in 0..genus_choices {
                let genera: Vec<u32> = (0..n).map(|v| (gc / (g as usize + 1).pow(v as u32) % (g as usize + 1)) as u32).collect();
                let sum: u32 = genera.iter().sum();
                if sum > g {
                    continue;
                }
                let e = (g - sum) as usize + n - 1;
                let mut edge_sets = Vec::new();
                multisets(pairs.len(), e, |c| edge_sets.push(c.iter().map(|&t| pairs[t]).collect::<Vec<_>>()));
                for edges in edge_sets {
                    for code in 0..n.pow(labels.len() as u32) {
                        let marks: Vec<(&str, usize)> = labels
                            .iter()
                            .enumerate()
                            .map(|(i, &l)| (l, code / n.pow(i as u32) % n))
                            .collect();
                        let Ok(graph) = MarkedDualGraph::stable(&genera, &edges, &marks) else { continue };
                        if !reps.iter().any(|r| brute_isomorphic(r, &graph)) {
                            reps.push(graph);
                        }
                    }
                }
            }
        }
        reps
    }

    fn count(g: u32, n: usize, max: usize) -> usize {
        generate_corpus(g, &numbered_markings(n), max).unwrap().len()
    }

    #[test]
    fn small_corpora() {
        assert_eq!(count(1, 1, 1), 2);
        assert_eq!(count(0, 3, 1), 1);
        assert_eq!(count(1, 1, 5), 2);
        assert_eq!(count(2, 0, 5), 7);
        assert_eq!(count(0, 4, 5), 4);
        assert_eq!(count(0, 5, 5), 26);
        assert_eq!(count(1, 2, 5), 5);
    }

    #[test]
    fn genus_three_has_42_stable_graphs() {
        assert_eq!(count(3, 0, 4), 42);
        assert_eq!(count(3, 0, 9), 42);
    }

    #[test]
    fn genus_two_includes_named_graphs() {
        let corpus = generate_corpus(2, &BTreeSet::new(), 2).unwrap();
        let theta = MarkedDualGraph::stable(&[0, 0], &[(0, 1), (0, 1), (0, 1)], &[]).unwrap();
        let dumbbell = MarkedDualGraph::stable(&[0, 0], &[(0, 0), (1, 1), (0, 1)], &[]).unwrap();
        let bridge = MarkedDualGraph::stable(&[1, 1], &[(0, 1)], &[]).unwrap();
        for named in [theta, dumbbell, bridge] {
            assert!(corpus.iter().any(|g| brute_isomorphic(g, &named)));
        }
    }

    #[test]
    fn matches_brute_force_enumeration() {
        for (g, n, max) in [(0, 4, 3), (0, 5, 3), (1, 1, 2), (1, 2, 3), (2, 0, 3), (2, 1, 2), (1, 3, 2), (3, 0, 2)] {
            let a = numbered_markings(n);
            let fast = generate_corpus(g, &a, max).unwrap();
            let slow = brute_corpus(g, &a, max);
            assert_eq!(fast.len(), slow.len(), "g={g} n={n} max={max}");
            for s in &slow {
                assert_eq!(fast.iter().filter(|f| brute_isomorphic(f, s)).count(), 1);
            }
        }
    }

    #[test]
    fn output_is_stable_deterministic_and_isomorph_free() {
        let a = numbered_markings(2);
        let corpus = generate_corpus(2, &a, 4).unwrap();
        assert_eq!(corpus, generate_corpus(2, &a, 4).unwrap());
        for (i, x) in corpus.iter().enumerate() {
            assert!(x.is_stable());
            assert_eq!(x.genus(), 2);
            assert_eq!(x.vertex_id(0), "v1");
            for y in &corpus[i + 1..] {
                assert!(!brute_isomorphic(x, y));
            }
        }
    }

    #[test]
    fn canonical_form_is_invariant() {
        let a = MarkedDualGraph::stable(&[0, 1, 0], &[(0, 1), (1, 2), (0, 2), (2, 2)], &[("1", 0)]).unwrap();
        let b = MarkedDualGraph::stable(&[0, 0, 1], &[(2, 1), (0, 2), (1, 0), (0, 0)], &[("1", 1)]).unwrap();
        assert!(is_isomorphic(&a, &b));
        let c = MarkedDualGraph::stable(&[0, 1, 0], &[(0, 1), (0, 1), (0, 2), (2, 2)], &[("1", 0)]).unwrap();
        assert!(!is_isomorphic(&a, &c));
    }

    #[test]
    fn infeasible_requests() {
        assert!(matches!(generate_corpus(1, &BTreeSet::new(), 3), Err(Error::Infeasible(_))));
        assert!(matches!(generate_corpus(0, &numbered_markings(2), 3), Err(Error::Infeasible(_))));
        assert!(generate_corpus(2, &BTreeSet::new(), 0).is_err());
    }
}
