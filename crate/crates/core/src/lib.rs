//! Higher-order hypergraph learning.
//!
//! Hypergraphs are split into skeleton graphs by hyperedge size, skeletons are
//! grouped into scales, and the scales are combined into the operator
//! `M = sum_k lambda_k L_k^{p_k}` used as a regularizer for supervised,
//! semi-supervised and active learning. The same operator can be built from
//! point clouds with a ladder of length scales.

pub mod adjacency;
pub mod consistency;
pub mod data;
pub mod error;
pub mod graph;
pub mod hypergraph;
pub mod laplacian;
pub mod learning;
pub mod linalg;
pub mod seed;
pub mod spectral;

pub use adjacency::{Clique, StorageKind, WeightedAdjacency};
pub use error::{HohlError, Result};
pub use graph::{
    epsilon_graph, knn_selftuning_graph, rescaled_laplacian, sigma_eta, KernelProfile, KnnIndex, Metric, PointCloud,
};
pub use hypergraph::{
    categorical_hypergraph, clique_expand, group_segments, skeleton_decompose, CoefficientRule, Hyperedge, Hypergraph,
    SkeletonGroup,
};
pub use laplacian::{
    apply, materialize_graph, quadratic_form, shared_basis_eigencheck, GraphLaplacian, LinearOperator,
    MultiscaleOperator, ScaleTerm,
};
pub use spectral::{smallest_eigenpairs, truncated_energy, truncated_solve, FidelityTerm, SpectralBasis};
