//! Rank-1 torsion-free sheaf types on a dual graph.
//!
//! A sheaf type records the nodes `S` where the sheaf fails to be locally
//! free and the multidegree of the line bundle it pushes forward from the
//! partial normalization at `S`.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MarkedDualGraph, VertexSet};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SheafType {
    pub nonfree: BTreeSet<EdgeId>,
    /// One entry per vertex, in vertex order.
    pub degrees: Vec<i64>,
}

impl SheafType {
    pub fn line_bundle(degrees: Vec<i64>) -> Self {
        SheafType { nonfree: BTreeSet::new(), degrees }
    }

    pub fn new(nonfree: impl IntoIterator<Item = EdgeId>, degrees: Vec<i64>) -> Self {
        SheafType { nonfree: nonfree.into_iter().collect(), degrees }
    }

    /// Shape checks against `graph`: one degree per vertex and known edges.
    pub fn check_shape(&self, graph: &MarkedDualGraph) -> Result<()> {
        if self.degrees.len() != graph.vertex_count() {
            return Err(Error::InvalidSheaf(format!(
                "{} degrees given for {} vertices",
                self.degrees.len(),
                graph.vertex_count()
            )));
        }
        if let Some(&e) = self.nonfree.iter().find(|&&e| e >= graph.edge_count()) {
            return Err(Error::UnknownEdge(e));
        }
        Ok(())
    }

    /// Shape checks plus simplicity.
    pub fn validate(&self, graph: &MarkedDualGraph) -> Result<()> {
        self.check_shape(graph)?;
        if !self.is_simple(graph) {
            return Err(Error::NonSimpleSheaf);
        }
        Ok(())
    }

    pub fn total_degree(&self) -> i64 {
        self.degrees.iter().sum::<i64>() + self.nonfree.len() as i64
    }

    /// Whether the graph stays connected after removing the non-free edges.
    pub fn is_simple(&self, graph: &MarkedDualGraph) -> bool {
        graph.connected_without(&self.nonfree)
    }

    /// Degree of the maximal torsion-free quotient on `y`: vertex degrees
    /// plus one for each non-free node with both branches in `y`.
    pub fn deg_subcurve(&self, graph: &MarkedDualGraph, y: VertexSet) -> i64 {
        let interior = self
            .nonfree
            .iter()
            .filter(|&&e| {
                let (a, b) = graph.edges()[e];
                y.contains(a) && y.contains(b)
            })
            .count() as i64;
        y.iter().map(|v| self.degrees[v]).sum::<i64>() + interior
    }

    /// Non-free nodes joining `y` to its complement.
    pub fn nonfree_crossing(&self, graph: &MarkedDualGraph, y: VertexSet) -> i64 {
        self.nonfree
            .iter()
            .filter(|&&e| {
                let (a, b) = graph.edges()[e];
                y.contains(a) != y.contains(b)
            })
            .count() as i64
    }

    /// `deg_Y + #(non-free nodes on the boundary of Y)`.
    pub fn d_of(&self, graph: &MarkedDualGraph, y: VertexSet) -> i64 {
        self.deg_subcurve(graph, y) + self.nonfree_crossing(graph, y)
    }

    /// Tensor with a line bundle of multidegree `l`.
    pub fn twist(&self, l: &[i64]) -> SheafType {
        assert_eq!(l.len(), self.degrees.len(), "twist length mismatch");
        SheafType {
            nonfree: self.nonfree.clone(),
            degrees: self.degrees.iter().zip(l).map(|(d, t)| d + t).collect(),
        }
    }

    pub fn nonfree_vec(&self) -> Vec<EdgeId> {
        self.nonfree.iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn theta() -> MarkedDualGraph {
        MarkedDualGraph::stable(&[0, 0], &[(0, 1), (0, 1), (0, 1)], &[]).unwrap()
    }

    #[test]
    fn total_degree_examples() {
        assert_eq!(SheafType::line_bundle(vec![1, 2]).total_degree(), 3);
        assert_eq!(SheafType::new([0], vec![0, 1]).total_degree(), 2);
        assert_eq!(SheafType::new([0, 1], vec![0, 0]).total_degree(), 2);
    }

    #[test]
    fn subcurve_degrees_on_theta() {
        let t = theta();
        let s = SheafType::new([0], vec![0, 1]);
        let v1 = VertexSet::singleton(0);
        assert_eq!(s.deg_subcurve(&t, v1), 0);
        assert_eq!(s.d_of(&t, v1), 1);
        // a non-free loop counts on its vertex
        let g = MarkedDualGraph::stable(&[0], &[(0, 0), (0, 0)], &[]).unwrap();
        let s = SheafType::new([1], vec![3]);
        assert_eq!(s.deg_subcurve(&g, VertexSet::singleton(0)), 4);
    }

    #[test]
    fn simplicity() {
        let bridge = MarkedDualGraph::stable(&[1, 1], &[(0, 1)], &[]).unwrap();
        assert!(!SheafType::new([0], vec![0, 0]).is_simple(&bridge));
        assert!(matches!(SheafType::new([0], vec![0, 0]).validate(&bridge), Err(Error::NonSimpleSheaf)));
        let t = theta();
        for pair in [[0, 1], [0, 2], [1, 2]] {
            assert!(SheafType::new(pair, vec![0, 0]).is_simple(&t));
        }
        assert!(!SheafType::new([0, 1, 2], vec![0, 0]).is_simple(&t));
        assert!(SheafType::line_bundle(vec![0, 0]).is_simple(&t));
    }

    #[test]
    fn shape_errors() {
        let t = theta();
        assert!(matches!(SheafType::line_bundle(vec![0]).validate(&t), Err(Error::InvalidSheaf(_))));
        assert!(matches!(SheafType::new([9], vec![0, 0]).validate(&t), Err(Error::UnknownEdge(9))));
    }

    #[test]
    fn twist_examples() {
        let s = SheafType::line_bundle(vec![0, 1]);
        assert_eq!(s.twist(&[0, 0]), s);
        assert_eq!(s.twist(&[2, -1]).degrees, vec![2, 0]);
        assert_eq!(s.twist(&[2, -1]).twist(&[-2, 1]), s);
    }

    fn chain_with_loops() -> MarkedDualGraph {
        MarkedDualGraph::stable(&[0, 1, 0], &[(0, 1), (1, 2), (0, 0), (2, 2), (0, 1)], &[]).unwrap()
    }

    proptest! {
        #[test]
        fn degree_bookkeeping(mask in 1u32..7, s in proptest::collection::btree_set(0usize..5, 0..3),
                              degs in proptest::collection::vec(-4i64..5, 3), l in proptest::collection::vec(-3i64..4, 3)) {
            let g = chain_with_loops();
            let sheaf = SheafType { nonfree: s, degrees: degs };
            let y = VertexSet::from_bits(mask);
            let yc = y.complement(3);
            let total = sheaf.total_degree();
            prop_assert_eq!(sheaf.deg_subcurve(&g, y) + sheaf.deg_subcurve(&g, yc) + sheaf.nonfree_crossing(&g, y), total);
            prop_assert_eq!(sheaf.d_of(&g, y) + sheaf.deg_subcurve(&g, yc), total);
            let t = sheaf.twist(&l);
            prop_assert_eq!(t.is_simple(&g), sheaf.is_simple(&g));
            prop_assert_eq!(t.total_degree(), total + l.iter().sum::<i64>());
        }
    }
}
