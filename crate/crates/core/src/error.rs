use crate::tsn::{GroupRef, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),

    #[error("edge {from} -> {to} has invalid weight {weight}")]
    InvalidWeight { from: NodeId, to: NodeId, weight: f64 },

    #[error("node {0} is not part of the frame")]
    UnknownNode(NodeId),

    #[error("frames {first} and {second} are not consecutive")]
    NonConsecutiveFrames { first: u32, second: u32 },

    #[error("frame indices must run 1, 2, 3, ...; found {found} at position {position}")]
    FrameOrder { position: usize, found: u32 },

    #[error("group {0} has no members")]
    EmptyGroup(GroupRef),

    #[error("duplicate group {0}")]
    DuplicateGroup(GroupRef),

    #[error("grouping references frame {0} which the network does not have")]
    MissingFrame(u32),

    #[error("group {group} contains node {node} which is absent from its frame")]
    MemberOutsideFrame { group: GroupRef, node: NodeId },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("not a partition: {0}")]
    NotAPartition(String),

    #[error("graph has no edge weight (m = 0)")]
    NoEdgeWeight,

    #[error("{measure} needs at least {required} nodes, got {actual}")]
    TooFewNodes { measure: &'static str, required: usize, actual: usize },

    #[error("importance of {0} sums to zero")]
    ZeroImportance(GroupRef),

    #[error("importance vector has no score for node {0}")]
    MissingScore(NodeId),

    #[error("unknown community {0}")]
    UnknownCommunity(usize),
}
