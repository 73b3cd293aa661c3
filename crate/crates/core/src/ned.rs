//! Node-level distances: NED between two nodes (possibly of different
//! graphs), its directed form, and the Hausdorff distance between graphs.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adjacency_tree::{LevelTree, TreeExtractor};
use crate::error::{GraphError, NedError};
use crate::graph::{Direction, Graph, NodeId};
use crate::ted_star::{ted_star, ted_star_distance_only, Distance, TedStar, WeightScheme};

/// A node together with the graph it lives in.
#[derive(Clone, Copy, Debug)]
pub struct NodeRef<'g> {
    pub graph: &'g Graph,
    pub node: NodeId,
}

impl<'g> NodeRef<'g> {
    pub fn new(graph: &'g Graph, node: NodeId) -> Self {
        NodeRef { graph, node }
    }
}

/// The k-adjacent tree signature of a node: one tree for undirected graphs,
/// an (incoming, outgoing) pair for directed ones. Trees are kept in
/// canonical sibling order, so equality is isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    tree: LevelTree,
    incoming: Option<LevelTree>,
}

impl Signature {
    pub fn undirected(tree: LevelTree) -> Self {
        Signature {
            tree: canonical(tree),
            incoming: None,
        }
    }

    pub fn directed(incoming: LevelTree, outgoing: LevelTree) -> Self {
        Signature {
            tree: canonical(outgoing),
            incoming: Some(canonical(incoming)),
        }
    }

    /// Extracts the signature of `v`; the graph kind decides the shape.
    pub fn extract(ex: &mut TreeExtractor<'_>, graph: &Graph, v: NodeId, k: usize) -> Result<Self, NedError> {
        if k == 0 {
            return Err(NedError::ZeroK);
        }
        if graph.is_directed() {
            let inc = ex.extract(v, k, Direction::In)?;
            let out = ex.extract(v, k, Direction::Out)?;
            Ok(Signature::directed(inc, out))
        } else {
            Ok(Signature::undirected(ex.extract(v, k, Direction::Undirected)?))
        }
    }

    /// The undirected tree, or the outgoing tree of a directed signature.
    pub fn tree(&self) -> &LevelTree {
        &self.tree
    }

    pub fn incoming(&self) -> Option<&LevelTree> {
        self.incoming.as_ref()
    }

    pub fn is_directed(&self) -> bool {
        self.incoming.is_some()
    }

    /// TED* between signatures; directed signatures add the in- and
    /// out-tree distances.
    pub fn distance(&self, other: &Signature, weights: &WeightScheme) -> Result<Distance, NedError> {
        let out = ted_star_distance_only(&self.tree, &other.tree, weights)?;
        match (&self.incoming, &other.incoming) {
            (None, None) => Ok(out),
            (Some(a), Some(b)) => Ok(out + ted_star_distance_only(a, b, weights)?),
            _ => Err(GraphError::KindMismatch.into()),
        }
    }
}

fn canonical(t: LevelTree) -> LevelTree {
    if t.is_canonical_order() {
        t
    } else {
        t.canonical_order()
    }
}

fn check_k(k: usize) -> Result<(), NedError> {
    if k == 0 {
        Err(NedError::ZeroK)
    } else {
        Ok(())
    }
}

fn require(u: &NodeRef<'_>, v: &NodeRef<'_>, directed: bool) -> Result<(), NedError> {
    for g in [u.graph, v.graph] {
        match (g.is_directed(), directed) {
            (true, false) => return Err(NedError::NeedsUndirected),
            (false, true) => return Err(NedError::NeedsDirected),
            _ => {}
        }
    }
    Ok(())
}

fn tree_of(r: &NodeRef<'_>, k: usize, dir: Direction) -> Result<LevelTree, NedError> {
    Ok(TreeExtractor::new(r.graph).extract(r.node, k, dir)?)
}

/// NED: TED* between the k-adjacent trees of two nodes of undirected graphs.
pub fn ned(u: NodeRef<'_>, v: NodeRef<'_>, k: usize, weights: &WeightScheme) -> Result<Distance, NedError> {
    Ok(ned_breakdown(u, v, k, weights)?.distance)
}

/// [`ned`] with the per-level cost report.
pub fn ned_breakdown(u: NodeRef<'_>, v: NodeRef<'_>, k: usize, weights: &WeightScheme) -> Result<TedStar, NedError> {
    check_k(k)?;
    require(&u, &v, false)?;
    let a = tree_of(&u, k, Direction::Undirected)?;
    let b = tree_of(&v, k, Direction::Undirected)?;
    Ok(ted_star(&a, &b, weights)?)
}

/// Directed NED: distance of the incoming trees plus distance of the
/// outgoing trees.
pub fn ned_directed(u: NodeRef<'_>, v: NodeRef<'_>, k: usize, weights: &WeightScheme) -> Result<Distance, NedError> {
    let (i, o) = ned_directed_breakdown(u, v, k, weights)?;
    Ok(i.distance + o.distance)
}

/// Per-direction reports of [`ned_directed`]: `(incoming, outgoing)`.
pub fn ned_directed_breakdown(
    u: NodeRef<'_>,
    v: NodeRef<'_>,
    k: usize,
    weights: &WeightScheme,
) -> Result<(TedStar, TedStar), NedError> {
    check_k(k)?;
    require(&u, &v, true)?;
    let inc = ted_star(&tree_of(&u, k, Direction::In)?, &tree_of(&v, k, Direction::In)?, weights)?;
    let out = ted_star(&tree_of(&u, k, Direction::Out)?, &tree_of(&v, k, Direction::Out)?, weights)?;
    Ok((inc, out))
}

/// Lazily extracted signatures of every node of one graph at a fixed k.
/// Each slot is written at most once; the cache never changes a result.
pub struct SignatureCache<'g> {
    graph: &'g Graph,
    k: usize,
    slots: Vec<OnceLock<Signature>>,
}

impl<'g> SignatureCache<'g> {
    pub fn new(graph: &'g Graph, k: usize) -> Result<Self, NedError> {
        check_k(k)?;
        Ok(SignatureCache {
            graph,
            k,
            slots: (0..graph.node_count()).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, v: NodeId) -> Result<&Signature, NedError> {
        let slot = self
            .slots
            .get(v.index())
            .ok_or(GraphError::NodeOutOfRange(v.index(), self.slots.len()))?;
        if let Some(s) = slot.get() {
            return Ok(s);
        }
        let sig = Signature::extract(&mut TreeExtractor::new(self.graph), self.graph, v, self.k)?;
        Ok(slot.get_or_init(|| sig))
    }

    /// Extracts every missing signature, in parallel.
    pub fn fill(&self) {
        self.slots.par_iter().enumerate().for_each_init(
            || TreeExtractor::new(self.graph),
            |ex, (i, slot)| {
                if slot.get().is_none() {
                    let sig = Signature::extract(ex, self.graph, NodeId(i as u32), self.k)
                        .expect("node index and k are valid");
                    let _ = slot.set(sig);
                }
            },
        );
    }

    /// All signatures in node order (fills the cache first).
    pub fn all(&self) -> Vec<&Signature> {
        self.fill();
        self.slots.iter().map(|s| s.get().expect("filled")).collect()
    }
}

/// Distances from one signature to many, evaluated in parallel; the output
/// order follows `targets`.
pub fn distances_to(q: &Signature, targets: &[&Signature], weights: &WeightScheme) -> Result<Vec<Distance>, NedError> {
    targets.par_iter().map(|t| q.distance(t, weights)).collect()
}

/// Node subset used on each side of a sampled Hausdorff computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HausdorffSample {
    pub size: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HausdorffResult {
    pub distance: Distance,
    /// `h(A, B)`: the farthest node of A from its nearest node of B.
    pub forward: Distance,
    /// `h(B, A)`.
    pub backward: Distance,
    /// True when either side was sampled; the value is then approximate.
    pub approximate: bool,
    pub nodes_a: usize,
    pub nodes_b: usize,
}

/// Hausdorff distance between two graphs over the NED of their nodes:
/// `max(h(A, B), h(B, A))` with `h(A, B) = max_a min_b ned(a, b)`.
///
/// Nodes with isomorphic signatures are evaluated once. With `sample`, each
/// side is reduced to a seeded subset of at most `size` nodes and the
/// result is flagged approximate.
pub fn hausdorff_graph_distance(
    a: &Graph,
    b: &Graph,
    k: usize,
    weights: &WeightScheme,
    sample_spec: Option<HausdorffSample>,
) -> Result<HausdorffResult, NedError> {
    check_k(k)?;
    if a.node_count() == 0 || b.node_count() == 0 {
        return Err(GraphError::Empty.into());
    }
    if a.is_directed() != b.is_directed() {
        return Err(GraphError::KindMismatch.into());
    }
    let pick = |g: &Graph, salt: u64| -> Vec<NodeId> {
        match sample_spec {
            Some(s) if s.size < g.node_count() => {
                let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ salt);
                let mut idx: Vec<usize> = sample(&mut rng, g.node_count(), s.size.max(1)).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|i| NodeId(i as u32)).collect()
            }
            _ => g.nodes().collect(),
        }
    };
    let (na, nb) = (pick(a, 0), pick(b, 0x9e37_79b9_7f4a_7c15));
    let approximate = na.len() < a.node_count() || nb.len() < b.node_count();
    let classes_a = signature_classes(a, &na, k)?;
    let classes_b = signature_classes(b, &nb, k)?;

    let d: Vec<Vec<Distance>> = classes_a
        .par_iter()
        .map(|x| classes_b.iter().map(|y| x.distance(y, weights)).collect())
        .collect::<Result<_, _>>()?;
    let forward = d
        .iter()
        .map(|row| *row.iter().min().expect("non-empty"))
        .max()
        .expect("non-empty");
    let backward = (0..classes_b.len())
        .map(|j| d.iter().map(|row| row[j]).min().expect("non-empty"))
        .max()
        .expect("non-empty");
    Ok(HausdorffResult {
        distance: forward.max(backward),
        forward,
        backward,
        approximate,
        nodes_a: na.len(),
        nodes_b: nb.len(),
    })
}

/// Distinct signatures among `nodes`, in first-seen order.
fn signature_classes(g: &Graph, nodes: &[NodeId], k: usize) -> Result<Vec<Signature>, NedError> {
    let mut ex = TreeExtractor::new(g);
    let mut seen: HashMap<Signature, ()> = HashMap::new();
    let mut out = Vec::new();
    for &v in nodes {
        let s = Signature::extract(&mut ex, g, v, k)?;
        if seen.insert(s.clone(), ()).is_none() {
            out.push(s);
        }
    }
    Ok(out)
}
