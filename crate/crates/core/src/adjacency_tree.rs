//! Level-structured rooted trees and k-adjacent tree extraction.
//!
//! A [`LevelTree`] stores an unordered rooted tree one level at a time. Level
//! `0` holds the root; every node of level `d > 0` points at its parent in
//! level `d - 1`. Nodes of a level are kept grouped by parent (parent indices
//! are non-decreasing), so the children of any node form a contiguous range
//! of the next level.

use std::fmt;
use std::ops::Range;

use crate::error::{GraphError, ParseError};
use crate::graph::{mix, Direction, Graph, NodeId};

#[derive(Clone, Debug, Default)]
struct Level {
    parents: Vec<u32>,
    /// `child_start[j]..child_start[j + 1]` are the children of node `j` in
    /// the next level. Length is `parents.len() + 1`.
    child_start: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct LevelTree {
    levels: Vec<Level>,
    /// Graph nodes each tree position was extracted from, when known.
    origins: Option<Vec<Vec<NodeId>>>,
    /// Set when sibling groups are known to be in canonical shape order.
    canonical: bool,
}

impl PartialEq for LevelTree {
    fn eq(&self, other: &Self) -> bool {
        self.levels.len() == other.levels.len()
            && self
                .levels
                .iter()
                .zip(&other.levels)
                .all(|(a, b)| a.parents == b.parents)
    }
}

impl Eq for LevelTree {}

impl std::hash::Hash for LevelTree {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.levels.len().hash(state);
        for l in &self.levels {
            l.parents.hash(state);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeShapeError {
    #[error("level {level}: parent index {parent} out of range ({size} nodes above)")]
    BadParent { level: usize, parent: u32, size: usize },
    #[error("level {0} is empty but a deeper level is not")]
    Gap(usize),
}

impl LevelTree {
    /// The one-node tree `()`.
    pub fn leaf() -> Self {
        LevelTree::from_grouped(vec![Vec::new()], None)
    }

    /// Builds a tree from per-level parent arrays. `parents[d]` lists, for
    /// each node at depth `d + 1`, the index of its parent at depth `d`; the
    /// root is implicit. Nodes are regrouped by parent, so any order is
    /// accepted. Trailing empty levels are dropped.
    pub fn from_parents(parents: &[Vec<u32>]) -> Result<Self, TreeShapeError> {
        let mut depth = parents.len();
        while depth > 0 && parents[depth - 1].is_empty() {
            depth -= 1;
        }
        let mut grouped: Vec<Vec<u32>> = vec![Vec::new()];
        // old index -> new index for the level above the one being placed
        let mut remap: Vec<u32> = vec![0];
        for (d, level) in parents[..depth].iter().enumerate() {
            if level.is_empty() {
                return Err(TreeShapeError::Gap(d + 1));
            }
            let above = remap.len();
            let mut order: Vec<(u32, u32)> = Vec::with_capacity(level.len());
            for (old, &p) in level.iter().enumerate() {
                if p as usize >= above {
                    return Err(TreeShapeError::BadParent {
                        level: d + 1,
                        parent: p,
                        size: above,
                    });
                }
                order.push((remap[p as usize], old as u32));
            }
            order.sort_by_key(|&(p, _)| p);
            let mut next_remap = vec![0u32; level.len()];
            for (new, &(_, old)) in order.iter().enumerate() {
                next_remap[old as usize] = new as u32;
            }
            grouped.push(order.into_iter().map(|(p, _)| p).collect());
            remap = next_remap;
        }
        Ok(LevelTree::from_grouped(grouped, None))
    }

    /// `grouped[0]` is the root level (empty parent list, one node).
    fn from_grouped(grouped: Vec<Vec<u32>>, origins: Option<Vec<Vec<NodeId>>>) -> Self {
        let sizes: Vec<usize> = grouped
            .iter()
            .enumerate()
            .map(|(d, p)| if d == 0 { 1 } else { p.len() })
            .collect();
        let levels = (0..grouped.len())
            .map(|d| {
                let mut child_start = vec![0u32; sizes[d] + 1];
                if let Some(below) = grouped.get(d + 1) {
                    for &p in below {
                        child_start[p as usize + 1] += 1;
                    }
                    for j in 0..sizes[d] {
                        child_start[j + 1] += child_start[j];
                    }
                }
                Level {
                    parents: grouped[d].clone(),
                    child_start,
                }
            })
            .collect();
        LevelTree {
            levels,
            origins,
            canonical: false,
        }
    }

    /// Number of materialized levels (at least 1).
    #[inline]
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Number of nodes at depth `d` (0 for levels beyond the tree).
    #[inline]
    pub fn level_size(&self, d: usize) -> usize {
        match self.levels.get(d) {
            Some(l) => l.child_start.len() - 1,
            None => 0,
        }
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        (0..self.level_count()).map(|d| self.level_size(d)).collect()
    }

    pub fn node_count(&self) -> usize {
        (0..self.level_count()).map(|d| self.level_size(d)).sum()
    }

    /// Parent indices of the nodes at depth `d >= 1`.
    pub fn parents(&self, d: usize) -> &[u32] {
        self.levels.get(d).map_or(&[], |l| &l.parents)
    }

    /// Range of child indices (in level `d + 1`) of node `j` at depth `d`.
    #[inline]
    pub fn children(&self, d: usize, j: usize) -> Range<usize> {
        let s = &self.levels[d].child_start;
        s[j] as usize..s[j + 1] as usize
    }

    #[inline]
    /// Graph nodes behind each tree position, for extracted trees.
    pub fn origins(&self) -> Option<&[Vec<NodeId>]> {
        self.origins.as_deref()
    }

    /// The same tree cut down to its top `k` levels.
    pub fn truncated(&self, k: usize) -> LevelTree {
        let keep = k.max(1).min(self.levels.len());
        let grouped = self.levels[..keep].iter().map(|l| l.parents.clone()).collect();
        let origins = self
            .origins
            .as_ref()
            .map(|o| o[..keep].to_vec());
        LevelTree::from_grouped(grouped, origins)
    }

    /// AHU canonical literal: children are emitted in ascending order of
    /// subtree size, then lexicographically (`(` before `)`). Two trees are
    /// isomorphic exactly when their canonical literals are equal.
    pub fn canonical_literal(&self) -> String {
        let mut below: Vec<String> = Vec::new();
        for d in (0..self.levels.len()).rev() {
            let size = self.level_size(d);
            let mut here = Vec::with_capacity(size);
            for j in 0..size {
                let mut kids: Vec<&String> = self.children(d, j).map(|c| &below[c]).collect();
                kids.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                let total: usize = kids.iter().map(|s| s.len()).sum();
                let mut s = String::with_capacity(total + 2);
                s.push('(');
                for k in kids {
                    s.push_str(k);
                }
                s.push(')');
                here.push(s);
            }
            below = here;
        }
        below.pop().expect("root level always has one node")
    }

    /// Same tree with every sibling group sorted by subtree shape. Isomorphic
    /// trees come out with identical parent arrays, so anything computed
    /// from node positions becomes a function of the isomorphism class.
    /// Origins are carried along.
    pub fn canonical_order(&self) -> LevelTree {
        let depth = self.levels.len();
        // ranks[d][j]: dense shape rank of the subtree at (d, j); shapes are
        // ordered by child count, then by sorted child ranks.
        let mut ranks: Vec<Vec<u32>> = vec![Vec::new(); depth];
        for d in (0..depth).rev() {
            let size = self.level_size(d);
            let keys: Vec<Vec<u32>> = (0..size)
                .map(|j| {
                    if d + 1 == depth {
                        return Vec::new();
                    }
                    let mut k: Vec<u32> = self.children(d, j).map(|c| ranks[d + 1][c]).collect();
                    k.sort_unstable();
                    k
                })
                .collect();
            let mut order: Vec<usize> = (0..size).collect();
            order.sort_by(|&a, &b| keys[a].len().cmp(&keys[b].len()).then_with(|| keys[a].cmp(&keys[b])));
            let mut r = vec![0u32; size];
            let mut next = 0u32;
            for w in 0..size {
                if w > 0 && keys[order[w]] != keys[order[w - 1]] {
                    next += 1;
                }
                r[order[w]] = next;
            }
            ranks[d] = r;
        }
        let mut grouped: Vec<Vec<u32>> = vec![Vec::new()];
        let mut placed: Vec<Vec<usize>> = vec![vec![0]];
        for d in 1..depth {
            let mut parents = Vec::with_capacity(self.level_size(d));
            let mut here = Vec::with_capacity(self.level_size(d));
            for (new_p, &old_p) in placed[d - 1].iter().enumerate() {
                let mut kids: Vec<usize> = self.children(d - 1, old_p).collect();
                kids.sort_by_key(|&c| ranks[d][c]);
                for c in kids {
                    parents.push(new_p as u32);
                    here.push(c);
                }
            }
            grouped.push(parents);
            placed.push(here);
        }
        let origins = self.origins.as_ref().map(|o| {
            placed
                .iter()
                .enumerate()
                .map(|(d, ids)| ids.iter().map(|&j| o[d][j]).collect())
                .collect()
        });
        let mut t = LevelTree::from_grouped(grouped, origins);
        t.canonical = true;
        t
    }

    /// Whether the tree is known to be in canonical sibling order.
    pub fn is_canonical_order(&self) -> bool {
        self.canonical
    }

    /// Total order on stored layouts: level sizes first, then parent arrays
    /// level by level. On canonically ordered trees this orders isomorphism
    /// classes.
    pub fn layout_cmp(&self, other: &LevelTree) -> std::cmp::Ordering {
        self.level_sizes()
            .cmp(&other.level_sizes())
            .then_with(|| {
                self.levels
                    .iter()
                    .zip(&other.levels)
                    .map(|(a, b)| a.parents.cmp(&b.parents))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    }

    /// Literal in stored child order (not canonical).
    pub fn stored_literal(&self) -> String {
        let mut out = String::with_capacity(2 * self.node_count());
        // (depth, index, open?) stack
        let mut stack = vec![(0usize, 0usize, true)];
        while let Some((d, j, open)) = stack.pop() {
            if !open {
                out.push(')');
                continue;
            }
            out.push('(');
            stack.push((d, j, false));
            if d + 1 < self.levels.len() {
                for c in self.children(d, j).rev() {
                    stack.push((d + 1, c, true));
                }
            }
        }
        out
    }
}

impl fmt::Display for LevelTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_literal())
    }
}

fn count_distinct(it: impl Iterator<Item = u64>) -> usize {
    let mut v: Vec<u64> = it.collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Parses a balanced-parenthesis literal such as `(()(()))`. Whitespace is
/// ignored.
pub fn parse_tree_literal(s: &str) -> Result<LevelTree, ParseError> {
    let err = |pos, msg| ParseError::TreeLiteral { pos, msg };
    // open nodes as (depth, index within depth)
    let mut stack: Vec<(usize, u32)> = Vec::new();
    let mut parents: Vec<Vec<u32>> = Vec::new();
    let mut closed_root = false;
    let mut seen_any = false;
    for (pos, ch) in s.char_indices() {
        match ch {
            c if c.is_whitespace() => {}
            '(' => {
                if closed_root {
                    return Err(err(pos, "content after the root closes"));
                }
                seen_any = true;
                match stack.last() {
                    None => stack.push((0, 0)),
                    Some(&(d, j)) => {
                        if parents.len() <= d {
                            parents.push(Vec::new());
                        }
                        parents[d].push(j);
                        stack.push((d + 1, parents[d].len() as u32 - 1));
                    }
                }
            }
            ')' => {
                if stack.pop().is_none() {
                    return Err(err(pos, "unmatched ')'"));
                }
                if stack.is_empty() {
                    closed_root = true;
                }
            }
            _ => return Err(err(pos, "unexpected character")),
        }
    }
    if !seen_any {
        return Err(err(0, "empty literal"));
    }
    if !stack.is_empty() {
        return Err(err(s.len(), "unclosed '('"));
    }
    Ok(LevelTree::from_parents(&parents).expect("parser emits valid parent indices"))
}

/// AHU canonical literal of `t`; see [`LevelTree::canonical_literal`].
pub fn to_tree_literal(t: &LevelTree) -> String {
    t.canonical_literal()
}

/// Reusable BFS state for extracting many k-adjacent trees from one graph.
pub struct TreeExtractor<'g> {
    graph: &'g Graph,
    // per-node scratch, valid where `stamp` equals the current epoch
    stamp: Vec<u32>,
    depth: Vec<u32>,
    local: Vec<u64>,
    claimed: Vec<u32>,
    epoch: u32,
}

impl<'g> TreeExtractor<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let n = graph.node_count();
        TreeExtractor {
            graph,
            stamp: vec![0; n],
            depth: vec![0; n],
            local: vec![0; n],
            claimed: vec![0; n],
            epoch: 0,
        }
    }

    /// Breadth-first k-adjacent tree of `root`: level `d` holds the nodes
    /// first reached at BFS depth `d` and each graph node appears once.
    ///
    /// A node adjacent to several nodes of the level above is claimed by the
    /// first of them in expansion order, so that order decides the tree's
    /// shape. It is fixed by colors refined on the layered neighborhood of
    /// the root (BFS layers and the edges between consecutive layers),
    /// starting from [`Graph::structural_colors`] and the layer. The shape
    /// therefore follows the graph's structure rather than how its nodes
    /// are numbered; internal indices only break ties that refinement
    /// cannot resolve.
    pub fn extract(&mut self, root: NodeId, k: usize, dir: Direction) -> Result<LevelTree, GraphError> {
        // validates the index and the direction against the graph kind
        self.graph.neighbors(root, dir)?;
        if k == 0 {
            return Ok(LevelTree::leaf());
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.claimed.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        let g = self.graph;
        let back = match dir {
            Direction::Out => Direction::In,
            Direction::In => Direction::Out,
            Direction::Undirected => Direction::Undirected,
        };

        // layers
        let mut layers: Vec<Vec<u32>> = vec![vec![root.0]];
        self.stamp[root.index()] = epoch;
        self.depth[root.index()] = 0;
        for d in 1..k {
            let mut next = Vec::new();
            for &u in &layers[d - 1] {
                for &w in g.adjacency(u as usize, dir) {
                    if self.stamp[w as usize] != epoch {
                        self.stamp[w as usize] = epoch;
                        self.depth[w as usize] = d as u32;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            layers.push(next);
        }

        // refinement on the layered neighborhood
        let global = g.structural_colors();
        let members: Vec<u32> = layers.iter().flatten().copied().collect();
        for &v in &members {
            self.local[v as usize] = mix(global[v as usize] ^ mix(u64::from(self.depth[v as usize]) + 1));
        }
        let mut classes = count_distinct(members.iter().map(|&v| self.local[v as usize]));
        let mut next = vec![0u64; members.len()];
        let mut buf: Vec<u64> = Vec::new();
        for _ in 0..members.len() {
            for (slot, &v) in next.iter_mut().zip(&members) {
                let dv = self.depth[v as usize];
                let mut h = mix(self.local[v as usize]);
                for (tag, (d2, list)) in [(dv.wrapping_sub(1), g.adjacency(v as usize, back)), (dv + 1, g.adjacency(v as usize, dir))]
                    .into_iter()
                    .enumerate()
                {
                    buf.clear();
                    buf.extend(
                        list.iter()
                            .filter(|&&w| self.stamp[w as usize] == epoch && self.depth[w as usize] == d2)
                            .map(|&w| self.local[w as usize]),
                    );
                    buf.sort_unstable();
                    h = mix(h ^ (0x5a5a + tag as u64));
                    for &c in &buf {
                        h = mix(h.wrapping_add(c));
                    }
                }
                *slot = h;
            }
            for (&v, &c) in members.iter().zip(&next) {
                self.local[v as usize] = c;
            }
            let now = count_distinct(next.iter().copied());
            if now == classes {
                break;
            }
            classes = now;
        }

        // claiming, level by level
        let local = &self.local;
        let key = |v: NodeId| (local[v.index()], v.0);
        self.claimed[root.index()] = epoch;
        let mut grouped: Vec<Vec<u32>> = vec![Vec::new()];
        let mut origins: Vec<Vec<NodeId>> = vec![vec![root]];
        let mut order: Vec<usize> = Vec::new();
        for d in 1..layers.len() {
            let frontier = origins.last().expect("non-empty");
            order.clear();
            order.extend(0..frontier.len());
            order.sort_unstable_by_key(|&j| (local[frontier[j].index()], j));
            let mut claimed: Vec<(u32, NodeId)> = Vec::with_capacity(layers[d].len());
            for &pj in &order {
                for &w in g.adjacency(frontier[pj].index(), dir) {
                    let wi = w as usize;
                    if self.stamp[wi] == epoch && self.depth[wi] == d as u32 && self.claimed[wi] != epoch {
                        self.claimed[wi] = epoch;
                        claimed.push((pj as u32, NodeId(w)));
                    }
                }
            }
            debug_assert_eq!(claimed.len(), layers[d].len());
            claimed.sort_unstable_by_key(|&(p, w)| (p, key(w)));
            grouped.push(claimed.iter().map(|c| c.0).collect());
            origins.push(claimed.into_iter().map(|c| c.1).collect());
        }
        Ok(LevelTree::from_grouped(grouped, Some(origins)))
    }
}

/// One-shot k-adjacent tree extraction. Prefer [`TreeExtractor`] in loops.
pub fn extract_k_adjacent_tree(
    g: &Graph,
    root: NodeId,
    k: usize,
    dir: Direction,
) -> Result<LevelTree, GraphError> {
    TreeExtractor::new(g).extract(root, k, dir)
}
