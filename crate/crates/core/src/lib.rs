//! Inter-graph node similarity over k-adjacent trees.
//!
//! A node is summarized by its k-adjacent tree: the breadth-first tree of its
//! neighborhood truncated to `k` levels. Two nodes, possibly in different
//! graphs, are compared with TED*, a tree edit distance restricted to
//! depth-preserving operations, computed one level at a time in polynomial
//! time.

pub mod adjacency_tree;
pub mod assignment;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod metric_index;
pub mod ned;
pub mod oracle;
pub mod ted_star;

pub use adjacency_tree::{extract_k_adjacent_tree, parse_tree_literal, to_tree_literal, LevelTree, TreeExtractor};
pub use assignment::{min_cost_perfect_matching, Assignment, CostMatrix};
pub use error::{ExperimentError, GraphError, NedError, OracleError, ParseError, TedError, WeightError};
pub use graph::{parse_edge_list, Direction, Graph, NodeId};
pub use ted_star::{ted_star, ted_star_distance_only, ted_star_unit, CostBreakdown, Distance, LevelCost, TedStar, WeightScheme};
pub use ned::{hausdorff_graph_distance, ned, ned_breakdown, ned_directed, ned_directed_breakdown, HausdorffResult, HausdorffSample, NodeRef, Signature, SignatureCache};
pub use metric_index::{build_index, QueryResult, VpIndex};
