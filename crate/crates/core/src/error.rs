use crate::label::Label;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One violated invariant of a dual graph.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphViolation {
    #[error("disconnected: the underlying graph is not connected")]
    Disconnected,
    #[error("disconnected: the graph has no vertices")]
    Empty,
    #[error("edge {edge} references unknown vertex index {vertex}")]
    DanglingEdge { edge: usize, vertex: usize },
    #[error("marking {label} references unknown vertex index {vertex}")]
    DanglingMarking { label: Label, vertex: usize },
    #[error("duplicate marking label {0}")]
    DuplicateMarking(Label),
    #[error("duplicate vertex id {0}")]
    DuplicateVertexId(String),
    #[error("unstable vertex {id}: 2g-2+valence+markings = {value} <= 0")]
    UnstableVertex { id: String, value: i64 },
    #[error("base vertex index {0} is not a vertex of the graph")]
    UnknownBaseVertex(usize),
    #[error("too many vertices ({0}); at most {max} supported", max = crate::graph::MAX_VERTICES)]
    TooManyVertices(usize),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {}", join(.0))]
    InvalidGraph(Vec<GraphViolation>),
    #[error("invalid subcurve: {0}")]
    InvalidSubcurve(String),
    #[error("unknown edge index {0}")]
    UnknownEdge(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown marking {0}")]
    UnknownMarking(Label),
    #[error("invalid sheaf type: {0}")]
    InvalidSheaf(String),
    #[error("sheaf type is not simple: removing its non-free edges disconnects the graph")]
    NonSimpleSheaf,
    #[error("inadmissible node type label: {0}")]
    InadmissibleLabel(String),
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("malformed document: {0}")]
    Document(String),
    #[error("degree mismatch: sheaf has total degree {found}, polarization expects {expected}")]
    DegreeMismatch { expected: i64, found: i64 },
    #[error("polarization degree {0} is not an integer for this genus and marking set")]
    NonIntegralDegree(String),
    #[error("profile is not general: integral at {0} proper subcurve(s)")]
    NotGeneral(usize),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not admissible for pushforward: {0}")]
    InadmissiblePushforward(String),
}

impl Error {
    /// Errors caused by a violated operation precondition (as opposed to
    /// malformed or invalid input data).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::DegreeMismatch { .. }
                | Error::NonIntegralDegree(_)
                | Error::NotGeneral(_)
                | Error::Infeasible(_)
                | Error::Precondition(_)
                | Error::InadmissiblePushforward(_)
        )
    }
}

fn join(v: &[GraphViolation]) -> String {
    v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}
