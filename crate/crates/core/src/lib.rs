//! Belief-propagation rate functions for lower tails of induced edge counts in
//! random vertex subsets of hypergraphs, with exact oracles to check them.

pub mod bp;
pub mod error;
pub mod gauss;
pub mod gibbs;
pub mod hypergraph;
pub mod kap;
pub mod rates;
pub mod weitz;

pub use error::{Error, Result};
pub use hypergraph::{EdgeId, Multihypergraph, Saw, TreeLikeRatios, TreeLikeReport, VertexId, VertexMap};
pub use gibbs::{
    glauber_marginals, glauber_sample, lower_tail_exact, mc_lower_tail, partition_function,
    summarize, verify_identities, Census, ExactOracle, GibbsSummary, GlauberChain,
    IdentityResiduals, ModelParams,
};
pub use weitz::{
    build_tsaw, build_weitz, hypertree_ratio, tree_marginal, tree_ratio, verify_weitz_equality,
    weitz_structure_report, DepthStats, LabeledHypertree, TreeEdge, TreeNode, TreeOptions,
    WeitzOrders,
};
pub use bp::{
    bethe_free_energy, bp_apply, bp_fixed_point, lambert_w0, log_z_bp, rate_lower_tail_bp,
    solve_zeta, solve_zeta_regular, thresholds, x_star_regular, BPParams, BpLogZ, BpOperator,
    BpRate, Thresholds, ZetaMode,
};
pub use rates::{automorphism_count, build_subgraph_hypergraph, chromatic_number, delta_h, pair_index, partite_bound, rate_gnm, rate_gnp, rate_h, subgraph_profile, Model, SimpleGraph, SubgraphProfile, SubgraphRate};
pub use kap::{alpha_k, build_kap_hypergraph, discrete_vs_continuum, functional_apply, kap_degree, kap_fixed_point, kap_marginal_check, kap_rate, kap_rate_bethe, phi_apply, phi_fixed_point, phi_fixed_point_direct, phi_residual, ContinuumGap, GridFunction, KapParams, MarginalMode, MarginalRow, MarginalTable};
