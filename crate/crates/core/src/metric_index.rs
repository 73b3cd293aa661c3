//! Vantage-point tree over node signatures for exact k-nearest-neighbor and
//! range queries.
//!
//! Every internal node keeps, for both of its subtrees, the smallest and
//! largest distance from its vantage point to any entry below. A subtree is
//! skipped only when the triangle inequality puts every entry strictly
//! beyond the current search radius, so ties at the radius are still seen
//! and the NodeId tie-break stays exact.

use std::collections::BinaryHeap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GraphError, NedError};
use crate::graph::{Graph, NodeId};
use crate::ned::{Signature, SignatureCache};
use crate::ted_star::{Distance, WeightScheme};

/// Entries per leaf bucket.
pub const LEAF_SIZE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
enum VpNode {
    Leaf(Vec<u32>),
    Inner {
        vantage: u32,
        mu: Distance,
        inner: Option<Box<Child>>,
        outer: Option<Box<Child>>,
    },
}

/// A subtree plus the range of distances from its parent's vantage point.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Child {
    lo: Distance,
    hi: Distance,
    node: VpNode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VpIndex {
    entries: Vec<(NodeId, Signature)>,
    root: Option<VpNode>,
    k: usize,
    weights: WeightScheme,
    seed: u64,
}

/// Answer of a query together with the number of distance evaluations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryResult {
    /// Sorted by distance, then NodeId.
    pub hits: Vec<(NodeId, Distance)>,
    pub evaluations: usize,
}

/// Indexes the signatures of every node of `g`. Directed graphs use the
/// directed node distance.
pub fn build_index(g: &Graph, k: usize, weights: &WeightScheme, seed: u64) -> Result<VpIndex, NedError> {
    if g.node_count() == 0 {
        return Err(GraphError::Empty.into());
    }
    let cache = SignatureCache::new(g, k)?;
    let entries = g.nodes().zip(cache.all().into_iter().cloned()).collect();
    VpIndex::from_entries(entries, k, weights.clone(), seed)
}

impl VpIndex {
    /// Builds an index over arbitrary signatures. `k` is recorded for
    /// reporting only.
    pub fn from_entries(
        entries: Vec<(NodeId, Signature)>,
        k: usize,
        weights: WeightScheme,
        seed: u64,
    ) -> Result<VpIndex, NedError> {
        if entries.is_empty() {
            return Err(GraphError::Empty.into());
        }
        let mut idx = VpIndex {
            entries,
            root: None,
            k,
            weights,
            seed,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<u32> = (0..idx.entries.len() as u32).collect();
        idx.root = Some(idx.build(all, &mut rng)?);
        Ok(idx)
    }

    fn dist(&self, a: u32, b: u32) -> Result<Distance, NedError> {
        self.entries[a as usize].1.distance(&self.entries[b as usize].1, &self.weights)
    }

    fn build(&self, mut items: Vec<u32>, rng: &mut ChaCha8Rng) -> Result<VpNode, NedError> {
        if items.len() <= LEAF_SIZE {
            return Ok(VpNode::Leaf(items));
        }
        let vantage = items.swap_remove(rng.gen_range(0..items.len()));
        let mut scored: Vec<(Distance, u32)> = items
            .iter()
            .map(|&e| Ok((self.dist(vantage, e)?, e)))
            .collect::<Result<_, NedError>>()?;
        scored.sort();
        let mu = scored[(scored.len() - 1) / 2].0;
        let split = scored.partition_point(|(d, _)| *d <= mu);
        let outer_part = scored.split_off(split);
        let child = |part: Vec<(Distance, u32)>, rng: &mut ChaCha8Rng| -> Result<Option<Box<Child>>, NedError> {
            if part.is_empty() {
                return Ok(None);
            }
            let (lo, hi) = (part[0].0, part[part.len() - 1].0);
            let node = self.build(part.into_iter().map(|(_, e)| e).collect(), rng)?;
            Ok(Some(Box::new(Child { lo, hi, node })))
        };
        let inner = child(scored, rng)?;
        let outer = child(outer_part, rng)?;
        Ok(VpNode::Inner {
            vantage,
            mu,
            inner,
            outer,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weights(&self) -> &WeightScheme {
        &self.weights
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn entries(&self) -> &[(NodeId, Signature)] {
        &self.entries
    }

    /// Depth of the vantage-point structure (a single leaf has depth 1).
    pub fn depth(&self) -> usize {
        fn go(n: &VpNode) -> usize {
            match n {
                VpNode::Leaf(_) => 1,
                VpNode::Inner { inner, outer, .. } => {
                    1 + [inner, outer]
                        .iter()
                        .filter_map(|c| c.as_ref().map(|c| go(&c.node)))
                        .max()
                        .unwrap_or(0)
                }
            }
        }
        self.root.as_ref().map_or(0, go)
    }

    /// The `l` entries closest to `q`, ties broken by NodeId. Returns every
    /// entry when `l` exceeds the index size.
    pub fn knn(&self, q: &Signature, l: usize) -> Result<QueryResult, NedError> {
        let mut s = Search {
            idx: self,
            q,
            evaluations: 0,
        };
        let mut heap: BinaryHeap<(Distance, NodeId)> = BinaryHeap::new();
        if l > 0 {
            if let Some(root) = &self.root {
                s.knn(root, l, &mut heap)?;
            }
        }
        let mut hits: Vec<(NodeId, Distance)> = heap.into_iter().map(|(d, id)| (id, d)).collect();
        hits.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        Ok(QueryResult {
            hits,
            evaluations: s.evaluations,
        })
    }

    /// Every entry within distance `r` of `q`.
    pub fn range_query(&self, q: &Signature, r: Distance) -> Result<QueryResult, NedError> {
        let mut s = Search {
            idx: self,
            q,
            evaluations: 0,
        };
        let mut hits = Vec::new();
        if let Some(root) = &self.root {
            s.range(root, r, &mut hits)?;
        }
        hits.sort_by(|a: &(NodeId, Distance), b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        Ok(QueryResult {
            hits,
            evaluations: s.evaluations,
        })
    }

    /// Reference answer for [`VpIndex::knn`]: distance to every entry.
    pub fn linear_knn(&self, q: &Signature, l: usize) -> Result<QueryResult, NedError> {
        let mut all = self.scan(q)?;
        all.truncate(l);
        Ok(QueryResult {
            hits: all,
            evaluations: self.entries.len(),
        })
    }

    /// Reference answer for [`VpIndex::range_query`].
    pub fn linear_range(&self, q: &Signature, r: Distance) -> Result<QueryResult, NedError> {
        let mut all = self.scan(q)?;
        all.retain(|(_, d)| *d <= r);
        Ok(QueryResult {
            hits: all,
            evaluations: self.entries.len(),
        })
    }

    fn scan(&self, q: &Signature) -> Result<Vec<(NodeId, Distance)>, NedError> {
        let mut all: Vec<(NodeId, Distance)> = self
            .entries
            .iter()
            .map(|(id, s)| Ok((*id, q.distance(s, &self.weights)?)))
            .collect::<Result<_, NedError>>()?;
        all.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        Ok(all)
    }
}

struct Search<'a> {
    idx: &'a VpIndex,
    q: &'a Signature,
    evaluations: usize,
}

/// Smallest distance from the query to anything whose distance to the
/// vantage lies in `[lo, hi]`, given the query's distance `dq` to it.
fn lower_bound(dq: Distance, c: &Child) -> Distance {
    let zero = Distance::zero();
    (c.lo - dq).max(dq - c.hi).max(zero)
}

impl Search<'_> {
    fn eval(&mut self, e: u32) -> Result<Distance, NedError> {
        self.evaluations += 1;
        self.q.distance(&self.idx.entries[e as usize].1, &self.idx.weights)
    }

    fn offer(&mut self, e: u32, d: Distance, l: usize, heap: &mut BinaryHeap<(Distance, NodeId)>) {
        let key = (d, self.idx.entries[e as usize].0);
        if heap.len() < l {
            heap.push(key);
        } else if key < *heap.peek().expect("full heap") {
            heap.pop();
            heap.push(key);
        }
    }

    fn knn(&mut self, node: &VpNode, l: usize, heap: &mut BinaryHeap<(Distance, NodeId)>) -> Result<(), NedError> {
        match node {
            VpNode::Leaf(items) => {
                for &e in items {
                    let d = self.eval(e)?;
                    self.offer(e, d, l, heap);
                }
            }
            VpNode::Inner {
                vantage,
                mu,
                inner,
                outer,
            } => {
                let dq = self.eval(*vantage)?;
                self.offer(*vantage, dq, l, heap);
                let order = if dq <= *mu { [inner, outer] } else { [outer, inner] };
                for c in order.into_iter().flatten() {
                    let full = heap.len() == l;
                    if full && lower_bound(dq, c) > heap.peek().expect("full heap").0 {
                        continue;
                    }
                    self.knn(&c.node, l, heap)?;
                }
            }
        }
        Ok(())
    }

    fn range(&mut self, node: &VpNode, r: Distance, hits: &mut Vec<(NodeId, Distance)>) -> Result<(), NedError> {
        match node {
            VpNode::Leaf(items) => {
                for &e in items {
                    let d = self.eval(e)?;
                    if d <= r {
                        hits.push((self.idx.entries[e as usize].0, d));
                    }
                }
            }
            VpNode::Inner {
                vantage, inner, outer, ..
            } => {
                let dq = self.eval(*vantage)?;
                if dq <= r {
                    hits.push((self.idx.entries[*vantage as usize].0, dq));
                }
                for c in [inner, outer].into_iter().flatten() {
                    if lower_bound(dq, c) <= r {
                        self.range(&c.node, r, hits)?;
                    }
                }
            }
        }
        Ok(())
    }
}
