//! Deciding and enumerating (semi/quasi)stable sheaf types.
//!
//! A sheaf type `I` of degree `d` is semistable for a profile `q` when
//! `deg_Y(I) >= q_Y - k_Y / 2` for every proper subcurve `Y`; stable when
//! all inequalities are strict; quasistable at a base vertex when it is
//! semistable and strict on every `Y` containing the base. Both sides are
//! additive over connected components, so only connected `Y` are checked.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MarkedDualGraph, VertexSet};
use crate::polarization::QProfile;
use crate::rational;
use crate::sheaf::SheafType;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Semistable,
    Stable,
    Quasistable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityStatus {
    Stable,
    StrictlySemistable,
    Unstable,
}

impl StabilityStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            StabilityStatus::Stable => "stable",
            StabilityStatus::StrictlySemistable => "strictly_semistable",
            StabilityStatus::Unstable => "unstable",
        }
    }

    pub fn is_semistable(self) -> bool {
        self != StabilityStatus::Unstable
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub status: StabilityStatus,
    /// Present exactly when a base vertex was given.
    pub quasistable_at_base: Option<bool>,
    /// First violated subcurve if unstable, else first subcurve with
    /// equality if strictly semistable, in increasing bitmask order.
    pub witness: Option<VertexSet>,
}

impl StabilityVerdict {
    pub fn passes(&self, mode: Mode) -> bool {
        match mode {
            Mode::Semistable => self.status.is_semistable(),
            Mode::Stable => self.status == StabilityStatus::Stable,
            Mode::Quasistable => self.quasistable_at_base == Some(true),
        }
    }
}

/// Integer form of the bound on one connected subcurve:
/// `deg_Y >= ceil`, with equality possible only when the bound is integral.
#[derive(Clone, Debug)]
struct Bound {
    set: VertexSet,
    ceil: i64,
    integral: bool,
}

/// Thresholds of a profile on all connected proper subcurves, computed
/// once and reused across sheaf types.
#[derive(Clone, Debug)]
pub struct StabilityContext<'g> {
    graph: &'g MarkedDualGraph,
    d: i64,
    bounds: Vec<Bound>,
}

impl<'g> StabilityContext<'g> {
    pub fn new(graph: &'g MarkedDualGraph, profile: &QProfile) -> Result<Self> {
        if profile.q().len() != graph.vertex_count() {
            return Err(Error::Document(format!(
                "profile has {} weights for {} vertices",
                profile.q().len(),
                graph.vertex_count()
            )));
        }
        let bounds = graph
            .connected_proper_subcurves()
            .into_iter()
            .map(|set| {
                let t = profile.threshold(graph, set);
                Bound { set, ceil: rational::ceil_i64(&t), integral: t.is_integer() }
            })
            .collect();
        Ok(StabilityContext { graph, d: profile.d(), bounds })
    }

    pub fn graph(&self) -> &MarkedDualGraph {
        self.graph
    }

    fn precheck(&self, sheaf: &SheafType) -> Result<()> {
        sheaf.validate(self.graph)?;
        let found = sheaf.total_degree();
        if found != self.d {
            return Err(Error::DegreeMismatch { expected: self.d, found });
        }
        Ok(())
    }

    pub fn check(&self, sheaf: &SheafType, base: Option<usize>) -> Result<StabilityVerdict> {
        self.precheck(sheaf)?;
        if let Some(b) = base {
            if b >= self.graph.vertex_count() {
                return Err(Error::UnknownVertex(format!("index {b}")));
            }
        }
        Ok(self.check_unchecked(sheaf, base))
    }

    fn check_unchecked(&self, sheaf: &SheafType, base: Option<usize>) -> StabilityVerdict {
        let mut first_equality = None;
        let mut strict_at_base = true;
        for bound in &self.bounds {
            let deg = sheaf.deg_subcurve(self.graph, bound.set);
            if deg < bound.ceil {
                return StabilityVerdict {
                    status: StabilityStatus::Unstable,
                    quasistable_at_base: base.map(|_| false),
                    witness: Some(bound.set),
                };
            }
            if bound.integral && deg == bound.ceil {
                first_equality.get_or_insert(bound.set);
                if base.is_some_and(|b| bound.set.contains(b)) {
                    strict_at_base = false;
                }
            }
        }
        StabilityVerdict {
            status: if first_equality.is_some() {
                StabilityStatus::StrictlySemistable
            } else {
                StabilityStatus::Stable
            },
            quasistable_at_base: base.map(|_| strict_at_base),
            witness: first_equality,
        }
    }

    /// All sheaf types of degree `d` passing `mode`, sorted by
    /// `(non-free edges, degrees)`.
    pub fn enumerate(&self, mode: Mode, base: Option<usize>, include_nonfree: bool) -> Result<Vec<SheafType>> {
        if mode == Mode::Quasistable && base.is_none() {
            return Err(Error::Precondition("quasistable enumeration needs a base vertex".into()));
        }
        if let Some(b) = base {
            if b >= self.graph.vertex_count() {
                return Err(Error::UnknownVertex(format!("index {b}")));
            }
        }
        let mut out = Vec::new();
        for s in nonfree_sets(self.graph, include_nonfree) {
            self.enumerate_for(&s, mode, base, &mut out);
        }
        out.sort_by(|a, b| (a.nonfree_vec(), &a.degrees).cmp(&(b.nonfree_vec(), &b.degrees)));
        Ok(out)
    }

    fn enumerate_for(&self, s: &BTreeSet<EdgeId>, mode: Mode, base: Option<usize>, out: &mut Vec<SheafType>) {
        let g = self.graph;
        let n = g.vertex_count();
        let target = self.d - s.len() as i64;
        if n == 1 {
            let sheaf = SheafType { nonfree: s.clone(), degrees: vec![target] };
            if self.check_unchecked(&sheaf, base).passes(mode) {
                out.push(sheaf);
            }
            return;
        }
        // box from the singleton subcurves and their complements
        let mut lo = vec![0i64; n];
        let mut hi = vec![0i64; n];
        let singles: Vec<&Bound> = self.bounds.iter().filter(|b| b.set.len() == 1).collect();
        for v in 0..n {
            let set = VertexSet::singleton(v);
            let mut loops = 0;
            let mut cross = 0;
            for &e in s {
                let (a, b) = g.edges()[e];
                if a == v && b == v {
                    loops += 1;
                } else if a == v || b == v {
                    cross += 1;
                }
            }
            let single = singles.iter().find(|b| b.set == set).expect("singletons are connected");
            // deg_{v} = d_v + loops >= ceil(q_v - k_v/2)
            lo[v] = single.ceil - loops;
            // deg of the complement = d - d_v - loops - cross >= q_{V-v} - k_v/2
            //   <=> d_v <= q_v + k_v/2 - loops - cross
            let k = g.crossing_count(set) as i64;
            hi[v] = self.d - complement_ceil(single.ceil, single.integral, k, self.d) - loops - cross;
        }
        let mut degrees = vec![0i64; n];
        self.fill(0, target, &lo, &hi, &mut degrees, s, mode, base, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &self,
        v: usize,
        remaining: i64,
        lo: &[i64],
        hi: &[i64],
        degrees: &mut Vec<i64>,
        s: &BTreeSet<EdgeId>,
        mode: Mode,
        base: Option<usize>,
        out: &mut Vec<SheafType>,
    ) {
        let n = lo.len();
        if v == n - 1 {
            if remaining < lo[v] || remaining > hi[v] {
                return;
            }
            degrees[v] = remaining;
            let sheaf = SheafType { nonfree: s.clone(), degrees: degrees.clone() };
            if self.check_unchecked(&sheaf, base).passes(mode) {
                out.push(sheaf);
            }
            return;
        }
        let rest_lo: i64 = lo[v + 1..].iter().sum();
        let rest_hi: i64 = hi[v + 1..].iter().sum();
        let from = lo[v].max(remaining - rest_hi);
        let to = hi[v].min(remaining - rest_lo);
        for x in from..=to {
            degrees[v] = x;
            self.fill(v + 1, remaining - x, lo, hi, degrees, s, mode, base, out);
        }
    }
}

/// `ceil(q_{V-v} - k_v/2)` from `ceil(q_v - k_v/2)`: with
/// `t = q_v - k_v/2`, the complement bound is `d - t - k_v`.
fn complement_ceil(ceil_t: i64, t_integral: bool, k: i64, d: i64) -> i64 {
    // ceil(d - k - t) = d - k - floor(t)
    let floor_t = if t_integral { ceil_t } else { ceil_t - 1 };
    d - k - floor_t
}

/// Subsets of edges whose removal keeps the graph connected, in increasing
/// lexicographic order of their sorted element lists; only the empty set
/// unless `include_nonfree`.
pub fn nonfree_sets(graph: &MarkedDualGraph, include_nonfree: bool) -> Vec<BTreeSet<EdgeId>> {
    if !include_nonfree {
        return vec![BTreeSet::new()];
    }
    let m = graph.edge_count();
    assert!(m < 32, "too many edges for non-free enumeration");
    let mut out: Vec<BTreeSet<EdgeId>> = (0u32..(1u32 << m))
        .map(|mask| (0..m).filter(|e| mask >> e & 1 == 1).collect::<BTreeSet<_>>())
        .filter(|s| graph.connected_without(s))
        .collect();
    out.sort_by(|a, b| a.iter().cmp(b.iter()));
    out
}

/// Verdict for one sheaf type.
pub fn check(
    graph: &MarkedDualGraph,
    profile: &QProfile,
    sheaf: &SheafType,
    base: Option<usize>,
) -> Result<StabilityVerdict> {
    StabilityContext::new(graph, profile)?.check(sheaf, base)
}

/// Reference implementation of [`check`]: exact rational comparison over
/// every proper subcurve, connected or not.
pub fn check_all_subsets(
    graph: &MarkedDualGraph,
    profile: &QProfile,
    sheaf: &SheafType,
    base: Option<usize>,
) -> Result<StabilityVerdict> {
    sheaf.validate(graph)?;
    if sheaf.total_degree() != profile.d() {
        return Err(Error::DegreeMismatch { expected: profile.d(), found: sheaf.total_degree() });
    }
    let mut violation = None;
    let mut equality = None;
    let mut strict_at_base = true;
    for y in graph.proper_subcurves() {
        let deg = rational::qi(sheaf.deg_subcurve(graph, y));
        let t = profile.threshold(graph, y);
        if deg < t {
            violation.get_or_insert(y);
        } else if deg == t {
            equality.get_or_insert(y);
            if base.is_some_and(|b| y.contains(b)) {
                strict_at_base = false;
            }
        }
    }
    Ok(match violation {
        Some(w) => StabilityVerdict {
            status: StabilityStatus::Unstable,
            quasistable_at_base: base.map(|_| false),
            witness: Some(w),
        },
        None => StabilityVerdict {
            status: if equality.is_some() { StabilityStatus::StrictlySemistable } else { StabilityStatus::Stable },
            quasistable_at_base: base.map(|_| strict_at_base),
            witness: equality,
        },
    })
}

pub fn enumerate(
    graph: &MarkedDualGraph,
    profile: &QProfile,
    mode: Mode,
    base: Option<usize>,
    include_nonfree: bool,
) -> Result<Vec<SheafType>> {
    StabilityContext::new(graph, profile)?.enumerate(mode, base, include_nonfree)
}

/// Number of quasistable line-bundle types at `base` for a general profile.
pub fn count_components(graph: &MarkedDualGraph, profile: &QProfile, base: usize) -> Result<usize> {
    let integral = profile.integral_subcurves(graph);
    if !integral.is_empty() {
        return Err(Error::NotGeneral(integral.len()));
    }
    Ok(enumerate(graph, profile, Mode::Quasistable, Some(base), false)?.len())
}
