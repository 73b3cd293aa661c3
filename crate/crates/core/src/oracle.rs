//! Exhaustive ground truth on tiny trees.
//!
//! Everything here works on its own parent-array representation and never
//! calls into the level-by-level distance, so it can be used to check it.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use crate::adjacency_tree::{parse_tree_literal, LevelTree};
use crate::error::OracleError;

/// Largest tree the exact searches accept.
pub const ORACLE_NODE_CAP: usize = 8;

/// AHU canonical literal. Equal forms mean isomorphic rooted trees.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub String);

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Rooted tree as a parent array; node 0 is the root.
#[derive(Clone, Debug)]
struct SmallTree {
    parent: Vec<usize>,
    depth: Vec<usize>,
}

const NO_PARENT: usize = usize::MAX;

impl SmallTree {
    fn from_level_tree(t: &LevelTree) -> Self {
        let mut parent = vec![NO_PARENT];
        let mut depth = vec![0];
        // global id of each node at the previous level
        let mut prev: Vec<usize> = vec![0];
        for d in 1..t.level_count() {
            let mut cur = Vec::with_capacity(t.level_size(d));
            for &p in t.parents(d) {
                cur.push(parent.len());
                parent.push(prev[p as usize]);
                depth.push(d);
            }
            prev = cur;
        }
        SmallTree { parent, depth }
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.len()];
        for (v, &p) in self.parent.iter().enumerate() {
            if p != NO_PARENT {
                ch[p].push(v);
            }
        }
        ch
    }

    fn canonical(&self) -> String {
        fn rec(v: usize, ch: &[Vec<usize>]) -> String {
            let mut kids: Vec<String> = ch[v].iter().map(|&c| rec(c, ch)).collect();
            kids.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            let mut s = String::from("(");
            for k in kids {
                s.push_str(&k);
            }
            s.push(')');
            s
        }
        rec(0, &self.children())
    }

    fn level_sizes(&self, levels: usize) -> Vec<usize> {
        let mut sizes = vec![0; levels];
        for &d in &self.depth {
            sizes[d] += 1;
        }
        sizes
    }

    fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// `anc[a]` has bit `b` set when `a` is a proper ancestor of `b`.
    fn ancestor_bits(&self) -> Vec<u32> {
        let mut anc = vec![0u32; self.len()];
        for v in 0..self.len() {
            let mut p = self.parent[v];
            while p != NO_PARENT {
                anc[p] |= 1 << v;
                p = self.parent[p];
            }
        }
        anc
    }

    fn without(&self, leaf: usize) -> SmallTree {
        let mut parent = Vec::with_capacity(self.len() - 1);
        let mut depth = Vec::with_capacity(self.len() - 1);
        for v in 0..self.len() {
            if v == leaf {
                continue;
            }
            let p = self.parent[v];
            parent.push(if p == NO_PARENT || p < leaf { p } else { p - 1 });
            depth.push(self.depth[v]);
        }
        SmallTree { parent, depth }
    }
}

pub fn ahu_canonical(t: &LevelTree) -> CanonicalForm {
    CanonicalForm(SmallTree::from_level_tree(t).canonical())
}

/// Result of a bounded exact search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Exact(u32),
    /// The budget ran out; the true value is at least this.
    AtLeast(u32),
}

impl SearchOutcome {
    pub fn exact(self) -> Option<u32> {
        match self {
            SearchOutcome::Exact(v) => Some(v),
            SearchOutcome::AtLeast(_) => None,
        }
    }
}

/// Minimum number of insert-leaf, delete-leaf and same-level move operations
/// turning `t1` into a tree isomorphic to `t2`.
///
/// Best-first search over trees keyed by canonical form, with the sum of
/// level-size differences as an admissible, consistent lower bound (each
/// operation changes at most one level size by one). Scripts longer than
/// `budget` are not explored. No tree deeper than the deeper input is ever
/// generated: a node on a new level can only be deleted again.
pub fn exact_ted_star(t1: &LevelTree, t2: &LevelTree, budget: u32) -> Result<SearchOutcome, OracleError> {
    check_cap(t1)?;
    check_cap(t2)?;
    let start = SmallTree::from_level_tree(t1);
    let goal = SmallTree::from_level_tree(t2);
    let levels = start.height().max(goal.height()) + 1;
    let goal_key = goal.canonical();
    let goal_sizes = goal.level_sizes(levels);
    let h = |t: &SmallTree| -> u32 {
        t.level_sizes(levels)
            .iter()
            .zip(&goal_sizes)
            .map(|(a, b)| a.abs_diff(*b) as u32)
            .sum()
    };

    let mut best: HashMap<String, u32> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(u32, u32, usize)>> = BinaryHeap::new();
    let mut states: Vec<SmallTree> = Vec::new();
    best.insert(start.canonical(), 0);
    heap.push(Reverse((h(&start), 0, 0)));
    states.push(start);

    while let Some(Reverse((f, g, id))) = heap.pop() {
        if f > budget {
            return Ok(SearchOutcome::AtLeast(budget + 1));
        }
        let tree = states[id].clone();
        let key = tree.canonical();
        if best.get(&key).is_some_and(|&b| b < g) {
            continue;
        }
        if key == goal_key {
            return Ok(SearchOutcome::Exact(g));
        }
        for next in neighbors(&tree, levels) {
            let k = next.canonical();
            let ng = g + 1;
            if best.get(&k).is_none_or(|&b| ng < b) {
                best.insert(k, ng);
                let nf = ng + h(&next);
                if nf <= budget {
                    heap.push(Reverse((nf, ng, states.len())));
                    states.push(next);
                }
            }
        }
    }
    Ok(SearchOutcome::AtLeast(budget + 1))
}

/// Trees one TED* operation away from `t`, within `levels` levels.
fn neighbors(t: &SmallTree, levels: usize) -> Vec<SmallTree> {
    let n = t.len();
    let ch = t.children();
    let mut out = Vec::new();
    // insert a leaf
    for p in 0..n {
        if t.depth[p] + 1 < levels {
            let mut next = t.clone();
            next.parent.push(p);
            next.depth.push(t.depth[p] + 1);
            out.push(next);
        }
    }
    // delete a leaf
    for v in 1..n {
        if ch[v].is_empty() {
            out.push(t.without(v));
        }
    }
    // move a node (with its subtree) under another node of its parent's level
    for v in 1..n {
        let old = t.parent[v];
        for q in 0..n {
            if q != old && t.depth[q] == t.depth[old] {
                let mut next = t.clone();
                next.parent[v] = q;
                out.push(next);
            }
        }
    }
    out
}

fn check_cap(t: &LevelTree) -> Result<(), OracleError> {
    let size = t.node_count();
    if size > ORACLE_NODE_CAP {
        Err(OracleError::TooLarge {
            size,
            cap: ORACLE_NODE_CAP,
        })
    } else {
        Ok(())
    }
}

/// Classical unordered tree edit distance with unit insert/delete (no
/// renames): `|t1| + |t2| - 2 * M`, where `M` is the largest one-to-one
/// mapping preserving the ancestor relation in both directions and sending
/// root to root.
pub fn exact_unordered_ted(t1: &LevelTree, t2: &LevelTree) -> Result<u32, OracleError> {
    check_cap(t1)?;
    check_cap(t2)?;
    let a = SmallTree::from_level_tree(t1);
    let b = SmallTree::from_level_tree(t2);
    let anc_a = a.ancestor_bits();
    let anc_b = b.ancestor_bits();

    struct Search<'s> {
        anc_a: &'s [u32],
        anc_b: &'s [u32],
        na: usize,
        nb: usize,
        map: Vec<usize>,
        used_b: u32,
        best: usize,
    }
    impl Search<'_> {
        fn go(&mut self, v: usize, size: usize) {
            let remaining = self.na - v;
            if size + remaining.min(self.nb - self.used_b.count_ones() as usize) <= self.best {
                return;
            }
            if v == self.na {
                self.best = size;
                return;
            }
            for w in 1..self.nb {
                if self.used_b & (1 << w) != 0 || !self.compatible(v, w) {
                    continue;
                }
                self.map[v] = w;
                self.used_b |= 1 << w;
                self.go(v + 1, size + 1);
                self.used_b &= !(1 << w);
                self.map[v] = NO_PARENT;
            }
            self.go(v + 1, size);
        }

        fn compatible(&self, v: usize, w: usize) -> bool {
            (0..v).all(|u| {
                let x = self.map[u];
                x == NO_PARENT
                    || ((self.anc_a[u] >> v & 1) == (self.anc_b[x] >> w & 1)
                        && (self.anc_a[v] >> u & 1) == (self.anc_b[w] >> x & 1))
            })
        }
    }

    let mut s = Search {
        anc_a: &anc_a,
        anc_b: &anc_b,
        na: a.len(),
        nb: b.len(),
        map: vec![NO_PARENT; a.len()],
        used_b: 1,
        best: 0,
    };
    s.map[0] = 0;
    s.go(1, 1);
    Ok((a.len() + b.len() - 2 * s.best) as u32)
}

/// Unit-cost graph edit distance between two trees viewed as unlabeled
/// undirected graphs (node insert/delete of isolated nodes, edge
/// insert/delete).
pub fn exact_ged_on_trees(t1: &LevelTree, t2: &LevelTree) -> Result<u32, OracleError> {
    check_cap(t1)?;
    check_cap(t2)?;
    let (a, b) = {
        let a = SmallTree::from_level_tree(t1);
        let b = SmallTree::from_level_tree(t2);
        if a.len() <= b.len() {
            (a, b)
        } else {
            (b, a)
        }
    };
    let adj = |t: &SmallTree| -> Vec<u32> {
        let mut m = vec![0u32; t.len()];
        for (v, &p) in t.parent.iter().enumerate() {
            if p != NO_PARENT {
                m[v] |= 1 << p;
                m[p] |= 1 << v;
            }
        }
        m
    };
    let adj_a = adj(&a);
    let adj_b = adj(&b);
    let (na, nb) = (a.len(), b.len());

    // Mapping every node of the smaller tree never hurts: an extra mapped
    // pair saves two node operations and cannot lose a preserved edge.
    struct Search<'s> {
        adj_a: &'s [u32],
        adj_b: &'s [u32],
        na: usize,
        nb: usize,
        map: Vec<usize>,
        used: u32,
        best: usize,
    }
    impl Search<'_> {
        fn go(&mut self, v: usize, kept: usize) {
            if v == self.na {
                self.best = self.best.max(kept);
                return;
            }
            // edges whose later endpoint is not yet placed
            let open: usize = (v..self.na)
                .map(|u| (self.adj_a[u] & ((1u32 << u) - 1)).count_ones() as usize)
                .sum();
            if kept + open <= self.best {
                return;
            }
            for w in 0..self.nb {
                if self.used & (1 << w) != 0 {
                    continue;
                }
                let gained = (0..v)
                    .filter(|&u| self.adj_a[v] >> u & 1 == 1 && self.adj_b[w] >> self.map[u] & 1 == 1)
                    .count();
                self.map[v] = w;
                self.used |= 1 << w;
                self.go(v + 1, kept + gained);
                self.used &= !(1 << w);
            }
        }
    }
    let mut s = Search {
        adj_a: &adj_a,
        adj_b: &adj_b,
        na,
        nb,
        map: vec![0; na],
        used: 0,
        best: 0,
    };
    s.go(0, 0);
    let edges = (na - 1) + (nb - 1);
    Ok(((nb - na) + edges - 2 * s.best) as u32)
}

/// Every rooted unordered tree with at most `n_max` nodes and height (root
/// depth 0) at most `depth_max`, each exactly once, ordered by size and then
/// canonical literal.
pub fn enumerate_trees(n_max: usize, depth_max: usize) -> Vec<LevelTree> {
    enumerate_canonical(n_max, depth_max)
        .into_iter()
        .map(|s| parse_tree_literal(&s).expect("generated literals are balanced"))
        .collect()
}

/// Canonical literals of the trees [`enumerate_trees`] yields.
pub fn enumerate_canonical(n_max: usize, depth_max: usize) -> Vec<String> {
    if n_max == 0 {
        return Vec::new();
    }
    // trees of height <= h, sorted by (size, literal)
    let mut bounded: Vec<String> = vec!["()".to_string()];
    for _ in 0..depth_max {
        let subtrees = bounded;
        let mut next = Vec::new();
        fn extend(subtrees: &[String], from: usize, budget: usize, acc: &mut Vec<usize>, out: &mut Vec<String>) {
            let mut s = String::from("(");
            for &i in acc.iter() {
                s.push_str(&subtrees[i]);
            }
            s.push(')');
            out.push(s);
            for i in from..subtrees.len() {
                let size = subtrees[i].len() / 2;
                if size > budget {
                    break;
                }
                acc.push(i);
                extend(subtrees, i, budget - size, acc, out);
                acc.pop();
            }
        }
        extend(&subtrees, 0, n_max - 1, &mut Vec::new(), &mut next);
        next.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        bounded = next;
    }
    bounded
}
