//! Polarizations and their compilation to per-vertex weights.
//!
//! Every polarization used here boils down to a rational weight `q_v` on
//! each component, with `q_Y` of a subcurve the sum over its vertices and
//! `sum q_v = d`. Stability of a sheaf then compares `deg_Y` with
//! `q_Y - k_Y / 2`.

use crate::error::{Error, Result};
use crate::graph::{MarkedDualGraph, NodeTypeLabel, VertexSet};
use crate::label::Label;
use crate::rational::{self, half, qi, Q};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// `(omega^s (sum a_i sigma_i) (sum alpha_{b,B} delta_{b,B}))` in rank `r`,
/// completed by trivial summands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitPolarization {
    pub s: Q,
    /// Missing markings have coefficient zero.
    pub a: BTreeMap<Label, Q>,
    pub alpha: BTreeMap<NodeTypeLabel, Q>,
    pub r: Q,
}

impl ExplicitPolarization {
    pub fn new(s: Q, r: Q) -> Self {
        ExplicitPolarization { s, a: BTreeMap::new(), alpha: BTreeMap::new(), r }
    }

    pub fn with_a(mut self, label: impl Into<Label>, value: Q) -> Self {
        self.a.insert(label.into(), value);
        self
    }

    pub fn with_alpha(mut self, label: NodeTypeLabel, value: Q) -> Self {
        self.alpha.insert(label, value);
        self
    }

    pub fn a_of(&self, label: &Label) -> Q {
        self.a.get(label).cloned().unwrap_or_else(Q::zero)
    }

    pub fn a_sum(&self) -> Q {
        self.a.values().sum()
    }

    /// All coefficients multiplied by `m`; compiles to the same profile.
    pub fn scale(&self, m: &Q) -> Self {
        ExplicitPolarization {
            s: &self.s * m,
            a: self.a.iter().map(|(k, v)| (k.clone(), v * m)).collect(),
            alpha: self.alpha.iter().map(|(k, v)| (k.clone(), v * m)).collect(),
            r: &self.r * m,
        }
    }

    /// `(s (2g - 2) + sum a_i) / r + g - 1`, if it is an integer.
    pub fn degree(&self, g: u32) -> Result<i64> {
        let d = self.rational_degree(g)?;
        rational::to_i64(&d).ok_or_else(|| Error::NonIntegralDegree(rational::format(&d)))
    }

    fn rational_degree(&self, g: u32) -> Result<Q> {
        if !self.r.is_positive() {
            return Err(Error::Document("rank r must be positive".into()));
        }
        let g = g as i64;
        Ok((&self.s * qi(2 * g - 2) + self.a_sum()) / &self.r + qi(g - 1))
    }

    /// Rewrites every alpha label in canonical orientation, negating the
    /// coefficient of flipped labels and merging duplicates.
    pub fn canonicalize_alpha(&self, g: u32, markings: &std::collections::BTreeSet<Label>) -> Result<Self> {
        let mut alpha: BTreeMap<NodeTypeLabel, Q> = BTreeMap::new();
        for (label, value) in &self.alpha {
            let (c, flipped) = label.canonicalize(g, markings)?;
            let v = if flipped { -value } else { value.clone() };
            *alpha.entry(c).or_insert_with(Q::zero) += v;
        }
        alpha.retain(|_, v| !v.is_zero());
        Ok(ExplicitPolarization { alpha, ..self.clone() })
    }

    pub fn compile(&self, graph: &MarkedDualGraph) -> Result<QProfile> {
        for label in self.a.keys() {
            graph.marking_vertex(label)?;
        }
        let d = self.degree(graph.genus())?;
        let n = graph.vertex_count();
        let mut num: Vec<Q> = (0..n).map(|v| &self.s * qi(graph.vertex_w(v))).collect();
        for (label, value) in &self.a {
            num[graph.marking_vertex(label)?] += value;
        }
        for (label, value) in &self.alpha {
            if value.is_zero() {
                // still reject malformed indices
                label.check_admissible(graph.genus(), &graph.marking_labels())?;
            }
            let bdeg = graph.vertex_boundary_degrees(label)?;
            for (v, b) in bdeg.into_iter().enumerate() {
                if b != 0 {
                    num[v] += value * qi(b);
                }
            }
        }
        let q = num
            .into_iter()
            .enumerate()
            .map(|(v, x)| x / &self.r + qi(graph.vertex_w(v)) * half())
            .collect();
        QProfile::new(q, d)
    }
}

/// Canonical polarization of degree `d` with marking weights `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalPolarization {
    pub d: i64,
    pub a: BTreeMap<Label, Q>,
}

impl CanonicalPolarization {
    pub fn new(d: i64) -> Self {
        CanonicalPolarization { d, a: BTreeMap::new() }
    }

    /// The explicit form `s = d - g + 1`, `a_i -> (d - g + 1) a_i`,
    /// `r = 2g - 2 + sum a_i`.
    pub fn to_explicit(&self, g: u32) -> Result<ExplicitPolarization> {
        let sum: Q = self.a.values().sum();
        let r = qi(2 * g as i64 - 2) + sum;
        if !r.is_positive() {
            return Err(Error::Precondition(format!(
                "canonical polarization needs 2g-2+sum(a) > 0, got {}",
                rational::format(&r)
            )));
        }
        let s = qi(self.d - g as i64 + 1);
        Ok(ExplicitPolarization {
            a: self.a.iter().map(|(k, v)| (k.clone(), v * &s)).collect(),
            alpha: BTreeMap::new(),
            s,
            r,
        })
    }

    pub fn compile(&self, graph: &MarkedDualGraph) -> Result<QProfile> {
        self.to_explicit(graph.genus())?.compile(graph)
    }
}

/// Any of the accepted ways to specify a polarization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Polarization {
    Explicit(ExplicitPolarization),
    Canonical(CanonicalPolarization),
    /// Weights given directly, keyed by vertex id.
    Profile { q: BTreeMap<String, Q>, d: i64 },
}

impl Polarization {
    pub fn compile(&self, graph: &MarkedDualGraph) -> Result<QProfile> {
        match self {
            Polarization::Explicit(p) => p.compile(graph),
            Polarization::Canonical(p) => p.compile(graph),
            Polarization::Profile { q, d } => {
                for id in q.keys() {
                    graph.vertex_index(id)?;
                }
                let values = (0..graph.vertex_count())
                    .map(|v| {
                        q.get(graph.vertex_id(v))
                            .cloned()
                            .ok_or_else(|| Error::Document(format!("profile has no weight for vertex {}", graph.vertex_id(v))))
                    })
                    .collect::<Result<Vec<_>>>()?;
                QProfile::new(values, *d)
            }
        }
    }
}

/// Per-vertex weights of a polarization on one graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QProfile {
    q: Vec<Q>,
    d: i64,
}

impl QProfile {
    /// Fails unless the weights sum to `d`.
    pub fn new(q: Vec<Q>, d: i64) -> Result<Self> {
        let sum: Q = q.iter().sum();
        if sum != qi(d) {
            return Err(Error::Document(format!(
                "profile weights sum to {}, not to d = {d}",
                rational::format(&sum)
            )));
        }
        Ok(QProfile { q, d })
    }

    pub fn q(&self) -> &[Q] {
        &self.q
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn q_vertex(&self, v: usize) -> &Q {
        &self.q[v]
    }

    pub fn q_of(&self, y: VertexSet) -> Q {
        y.iter().map(|v| &self.q[v]).sum()
    }

    /// Lower bound `q_Y - k_Y / 2` for the degree on `y`.
    pub fn threshold(&self, graph: &MarkedDualGraph, y: VertexSet) -> Q {
        self.q_of(y) - Q::new(BigInt::from(graph.crossing_count(y)), BigInt::from(2))
    }

    /// `q_Z - k_Z / 2` is an integer on every component `Z` of `y` and of
    /// its complement.
    pub fn is_integral_at(&self, graph: &MarkedDualGraph, y: VertexSet) -> bool {
        let n = graph.vertex_count();
        graph
            .components(y)
            .into_iter()
            .chain(graph.components(y.complement(n)))
            .all(|z| self.threshold(graph, z).is_integer())
    }

    /// Proper subcurves at which the profile is integral, in bitmask order.
    pub fn integral_subcurves(&self, graph: &MarkedDualGraph) -> Vec<VertexSet> {
        let n = graph.vertex_count();
        // integrality of connected pieces, computed once
        let full = graph.all_vertices().bits() as usize;
        let mut connected_integral = vec![None; full + 1];
        for y in graph.connected_proper_subcurves() {
            connected_integral[y.bits() as usize] = Some(self.threshold(graph, y).is_integer());
        }
        let ok = |z: VertexSet| connected_integral[z.bits() as usize].unwrap_or(false);
        graph
            .proper_subcurves()
            .filter(|&y| graph.components(y).into_iter().chain(graph.components(y.complement(n))).all(ok))
            .collect()
    }

    pub fn is_general(&self, graph: &MarkedDualGraph) -> bool {
        self.integral_subcurves(graph).is_empty()
    }

    /// `q + L`, the weights of the polarization tensored with a line bundle
    /// of multidegree `l`.
    pub fn twist(&self, l: &[i64]) -> QProfile {
        assert_eq!(l.len(), self.q.len(), "twist length mismatch");
        QProfile {
            q: self.q.iter().zip(l).map(|(x, &t)| x + qi(t)).collect(),
            d: self.d + l.iter().sum::<i64>(),
        }
    }

    /// A general profile with the same `d`, moved by less than
    /// `1 / (2 n L)` per vertex where `L` is the lcm of 2 and the
    /// denominators of `q`. Returns `self` unchanged when already general.
    ///
    /// The move is smaller than any nonzero gap `deg_Y - q_Y + k_Y / 2`, so
    /// sheaves stable for the input stay stable for the output.
    pub fn perturb_general(&self, graph: &MarkedDualGraph, seed: u64) -> QProfile {
        if self.is_general(graph) {
            return self.clone();
        }
        let n = self.q.len();
        let l = rational::denominator_lcm(self.q.iter().chain(std::iter::once(&half())));
        const K: i64 = 1000;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut m: Vec<i64> = (0..n - 1).map(|_| rng.random_range(-K..=K)).collect();
            m.push(-m.iter().sum::<i64>());
            if m.iter().all(|&x| x == 0) {
                continue;
            }
            let t: i64 = rng.random_range(1..=997);
            let den = BigInt::from(2 * n as i64 * (n as i64 * K + 1) * t) * &l;
            let q: Vec<Q> =
                self.q.iter().zip(&m).map(|(x, &mi)| x + Q::new(BigInt::from(mi), den.clone())).collect();
            let candidate = QProfile { q, d: self.d };
            if candidate.is_general(graph) {
                return candidate;
            }
        }
    }

    /// A profile with the same `d` and uniformly random weights of the form
    /// `k / den` with `|k| <= spread * den` in each coordinate (the last one
    /// absorbs the total). Used by test sweeps and benchmarks.
    pub fn random(n: usize, d: i64, den: i64, spread: i64, rng: &mut impl Rng) -> QProfile {
        let mut nums: Vec<i64> = (0..n).map(|_| rng.random_range(-spread * den..=spread * den)).collect();
        let partial: i64 = nums[..n - 1].iter().sum();
        nums[n - 1] = d * den - partial;
        QProfile { q: nums.into_iter().map(|x| Q::new(BigInt::from(x), BigInt::from(den))).collect(), d }
    }
}
