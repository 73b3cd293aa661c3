//! Graph model and edge-list ingestion.
//!
//! Nodes carry an opaque external label and a dense internal index assigned
//! in order of first appearance. Neighbor lists are sorted by internal index
//! so that every traversal built on top of them is reproducible.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{GraphError, ParseError};

/// Dense internal index of a node within one [`Graph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which edges a traversal follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Undirected graphs only.
    Undirected,
    /// Follow outgoing edges of a directed graph.
    Out,
    /// Follow incoming edges of a directed graph.
    In,
}

#[derive(Clone, Debug)]
pub struct Graph {
    directed: bool,
    /// Undirected: the adjacency. Directed: out-neighbors.
    out_adj: Vec<Vec<u32>>,
    /// Directed only: in-neighbors. Empty for undirected graphs.
    in_adj: Vec<Vec<u32>>,
    labels: Vec<String>,
    index: HashMap<String, u32>,
    colors: OnceLock<Vec<u64>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.directed == other.directed
            && self.out_adj == other.out_adj
            && self.in_adj == other.in_adj
            && self.labels == other.labels
    }
}

impl Eq for Graph {}

#[inline]
pub(crate) fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Graph {
    /// Builds a graph from labelled nodes and index pairs. Self-loops and
    /// duplicate edges are dropped.
    pub fn from_edges<I>(labels: Vec<String>, edges: I, directed: bool) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i as u32).is_some() {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = if directed { vec![Vec::new(); n] } else { Vec::new() };
        for (a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(GraphError::NodeOutOfRange(a.max(b) as usize, n));
            }
            if a == b {
                continue;
            }
            out_adj[a as usize].push(b);
            if directed {
                in_adj[b as usize].push(a);
            } else {
                out_adj[b as usize].push(a);
            }
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph {
            directed,
            out_adj,
            in_adj,
            labels,
            index,
            colors: OnceLock::new(),
        })
    }

    /// Graph with nodes labelled `"0".."n-1"`.
    pub fn with_numeric_labels<I>(n: usize, edges: I, directed: bool) -> Self
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Graph::from_edges(labels, edges, directed).expect("numeric labels are unique and edges in range")
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        let total: usize = self.out_adj.iter().map(Vec::len).sum();
        if self.directed {
            total
        } else {
            total / 2
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count() as u32).map(NodeId)
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied().map(NodeId)
    }

    pub fn node(&self, label: &str) -> Result<NodeId, GraphError> {
        self.node_by_label(label)
            .ok_or_else(|| GraphError::UnknownLabel(label.to_string()))
    }

    /// Sorted neighbor indices of `v` in the requested direction.
    pub fn neighbors(&self, v: NodeId, dir: Direction) -> Result<&[u32], GraphError> {
        if v.index() >= self.node_count() {
            return Err(GraphError::NodeOutOfRange(v.index(), self.node_count()));
        }
        match (dir, self.directed) {
            (Direction::Undirected, false) | (Direction::Out, true) => Ok(&self.out_adj[v.index()]),
            (Direction::In, true) => Ok(&self.in_adj[v.index()]),
            (Direction::Undirected, true) => Err(GraphError::DirectionMismatch {
                requested: dir,
                directed: true,
            }),
            (Direction::Out | Direction::In, false) => Err(GraphError::DirectionMismatch {
                requested: dir,
                directed: false,
            }),
        }
    }

    /// Unchecked adjacency access for hot loops; `dir` must match the graph kind.
    #[inline]
    pub(crate) fn adjacency(&self, v: usize, dir: Direction) -> &[u32] {
        match dir {
            Direction::In => &self.in_adj[v],
            _ => &self.out_adj[v],
        }
    }

    /// Label-independent node colors by neighborhood refinement: each round
    /// hashes a node's color with the sorted colors of its neighbors (in- and
    /// out-neighbors separately when directed), until a round no longer
    /// splits any color class. Isomorphic graphs give corresponding nodes
    /// equal colors. The values only order nodes within one graph. Computed
    /// once, on first use.
    pub fn structural_colors(&self) -> &[u64] {
        self.colors.get_or_init(|| {
            let n = self.node_count();
            let mut cur = vec![mix(0x6e65_6421); n];
            let mut buf: Vec<u64> = Vec::new();
            let mut classes = 1;
            for _ in 0..n {
                let next = (0..n)
                    .map(|v| {
                        let mut h = mix(cur[v]);
                        let lists: &[&Vec<u32>] = if self.directed {
                            &[&self.out_adj[v], &self.in_adj[v]]
                        } else {
                            &[&self.out_adj[v]]
                        };
                        for (tag, list) in lists.iter().enumerate() {
                            buf.clear();
                            buf.extend(list.iter().map(|&w| cur[w as usize]));
                            buf.sort_unstable();
                            h = mix(h ^ (0xa5a5 + tag as u64));
                            for &c in &buf {
                                h = mix(h.wrapping_add(c));
                            }
                        }
                        h
                    })
                    .collect::<Vec<u64>>();
                let mut distinct = next.clone();
                distinct.sort_unstable();
                distinct.dedup();
                cur = next;
                if distinct.len() == classes {
                    break;
                }
                classes = distinct.len();
            }
            cur
        })
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.out_adj[v.index()].len()
    }

    /// Every edge once: `(a, b)` with `a < b` for undirected graphs, `a -> b`
    /// for directed ones. Sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let directed = self.directed;
        self.out_adj.iter().enumerate().flat_map(move |(a, list)| {
            let a = a as u32;
            list.iter()
                .copied()
                .filter(move |&b| directed || a < b)
                .map(move |b| (a, b))
        })
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.out_adj
            .get(a as usize)
            .is_some_and(|l| l.binary_search(&b).is_ok())
    }

    /// Serializes as an edge list with external labels, one edge per line.
    ///
    /// Lines are ordered so that re-parsing assigns the same internal indices
    /// whenever the graph itself came from [`parse_edge_list`]. Isolated nodes
    /// cannot be represented and are lost.
    pub fn to_edge_list(&self) -> String {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut lines: Vec<(u32, u32)> = Vec::with_capacity(self.edge_count());
        let mut intro = std::collections::HashSet::new();
        let oriented = |a: u32, b: u32| -> (u32, u32) {
            if !self.directed || self.has_edge(a, b) {
                (a, b)
            } else {
                (b, a)
            }
        };
        for j in 0..n as u32 {
            if seen[j as usize] {
                continue;
            }
            let mut partners = self.out_adj[j as usize].iter().copied();
            let known = if self.directed {
                partners
                    .chain(self.in_adj[j as usize].iter().copied())
                    .filter(|&x| seen[x as usize])
                    .min()
            } else {
                partners.find(|&x| seen[x as usize])
            };
            let edge = match known {
                Some(x) => oriented(x, j),
                None => {
                    let fresh = if self.directed {
                        self.out_adj[j as usize]
                            .iter()
                            .chain(self.in_adj[j as usize].iter())
                            .copied()
                            .min()
                    } else {
                        self.out_adj[j as usize].first().copied()
                    };
                    match fresh {
                        // Both endpoints are new on this line; list j first.
                        Some(y) if self.has_edge(j, y) || !self.directed => (j, y),
                        Some(y) => (y, j),
                        None => continue,
                    }
                }
            };
            seen[edge.0 as usize] = true;
            seen[edge.1 as usize] = true;
            intro.insert(if self.directed {
                edge
            } else {
                (edge.0.min(edge.1), edge.0.max(edge.1))
            });
            lines.push(edge);
        }
        lines.extend(self.edges().filter(|e| !intro.contains(e)));
        let mut out = String::new();
        for (a, b) in lines {
            out.push_str(&self.labels[a as usize]);
            out.push(' ');
            out.push_str(&self.labels[b as usize]);
            out.push('\n');
        }
        out
    }
}

/// Parses a whitespace-separated edge list. Lines starting with `#` or `%`
/// and blank lines are skipped; every other line must hold exactly two labels.
pub fn parse_edge_list(text: &str, directed: bool) -> Result<Graph, ParseError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(ParseError::EdgeArity {
                    line: lineno + 1,
                    tokens: trimmed.split_whitespace().count(),
                })
            }
        };
        let mut ends = [0u32; 2];
        for (slot, label) in ends.iter_mut().zip([a, b]) {
            *slot = *index.entry(label).or_insert_with(|| {
                labels.push(label.to_string());
                (labels.len() - 1) as u32
            });
        }
        edges.push((ends[0], ends[1]));
    }
    Ok(Graph::from_edges(labels, edges, directed).expect("labels are deduplicated during parsing"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        parse_edge_list("a b\nb c\nc a\n", false).unwrap()
    }

    #[test]
    fn parses_simple_path() {
        let g = parse_edge_list("a b\nb c", false).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && !g.has_edge(0, 2));
        assert_eq!(g.labels(), ["a", "b", "c"]);
    }

    #[test]
    fn drops_self_loops_and_duplicates() {
        let g = parse_edge_list("a a\na b\na b", false).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.neighbors(NodeId(0), Direction::Undirected).unwrap(), &[1]);
    }

    #[test]
    fn reverse_duplicate_is_one_undirected_edge() {
        let g = parse_edge_list("a b\nb a", false).unwrap();
        assert_eq!(g.edge_count(), 1);
        let d = parse_edge_list("a b\nb a", true).unwrap();
        assert_eq!(d.edge_count(), 2);
    }

    #[test]
    fn arity_error_reports_line() {
        let err = parse_edge_list("x y z", false).unwrap_err();
        assert_eq!(err, ParseError::EdgeArity { line: 1, tokens: 3 });
        let err = parse_edge_list("# header\na b\n\nlonely\n", false).unwrap_err();
        assert_eq!(err, ParseError::EdgeArity { line: 4, tokens: 1 });
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let g = parse_edge_list("% konect\n# snap\n\n  \n1 2\n", false).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn triangle_neighbors_sorted() {
        let g = triangle();
        let a = g.node("a").unwrap();
        assert_eq!(g.neighbors(a, Direction::Undirected).unwrap(), &[1, 2]);
    }

    #[test]
    fn directed_in_and_out() {
        let g = parse_edge_list("a b", true).unwrap();
        let b = g.node("b").unwrap();
        assert_eq!(g.neighbors(b, Direction::In).unwrap(), &[0]);
        assert!(g.neighbors(b, Direction::Out).unwrap().is_empty());
    }

    #[test]
    fn direction_mismatch_is_usage_error() {
        let g = triangle();
        assert!(matches!(
            g.neighbors(NodeId(0), Direction::Out),
            Err(GraphError::DirectionMismatch { .. })
        ));
        let d = parse_edge_list("a b", true).unwrap();
        assert!(matches!(
            d.neighbors(NodeId(0), Direction::Undirected),
            Err(GraphError::DirectionMismatch { .. })
        ));
    }

    #[test]
    fn undirected_adjacency_is_symmetric() {
        let text = "1 2\n2 3\n3 1\n4 1\n5 4\n5 2\n6 6\n";
        let g = parse_edge_list(text, false).unwrap();
        let n = g.node_count() as u32;
        for a in 0..n {
            for b in 0..n {
                assert_eq!(g.has_edge(a, b), g.has_edge(b, a));
            }
        }
    }

    #[test]
    fn round_trip_through_edge_list() {
        let g = parse_edge_list("q w\nw e\ne q\nr q\n", false).unwrap();
        let again = parse_edge_list(&g.to_edge_list(), false).unwrap();
        assert_eq!(g, again);
    }
}
