//! Seeded experiment harnesses: random graph and tree generators, graph
//! anonymization and de-anonymization, and the TED*/TED closeness, scaling
//! and k-effect studies.
//!
//! Every function takes an explicit seed and replays identically.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use num_traits::{ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adjacency_tree::LevelTree;
use crate::error::{ExperimentError, NedError};
use crate::graph::{Graph, NodeId};
use crate::ned::{Signature, SignatureCache};
use crate::oracle::{enumerate_trees, exact_unordered_ted};
use crate::ted_star::{ted_star_distance_only, ted_star_unit, Distance, WeightScheme};

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// `G(n, m)`: `m` distinct undirected edges drawn uniformly (capped at the
/// complete graph).
pub fn erdos_renyi(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = rng_for(seed, 1);
    let cap = n * n.saturating_sub(1) / 2;
    let m = m.min(cap);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let a = rng.gen_range(0..n as u32);
        let b = rng.gen_range(0..n as u32);
        if a != b && seen.insert((a.min(b), a.max(b))) {
            edges.push((a, b));
        }
    }
    Graph::with_numeric_labels(n, edges, false)
}

/// Preferential attachment: each new node links to `m` distinct earlier
/// nodes chosen proportionally to degree (a seed clique of `m + 1` nodes
/// starts the process).
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = rng_for(seed, 2);
    let m = m.max(1);
    let start = (m + 1).min(n);
    let mut edges = Vec::new();
    // every edge endpoint once: sampling from it is degree-proportional
    let mut ends: Vec<u32> = Vec::new();
    for a in 0..start as u32 {
        for b in a + 1..start as u32 {
            edges.push((a, b));
            ends.extend([a, b]);
        }
    }
    for v in start as u32..n as u32 {
        let mut picked = Vec::with_capacity(m);
        while picked.len() < m.min(v as usize) {
            let t = if ends.is_empty() {
                rng.gen_range(0..v)
            } else {
                ends[rng.gen_range(0..ends.len())]
            };
            if !picked.contains(&t) {
                picked.push(t);
            }
        }
        for t in picked {
            edges.push((v, t));
            ends.extend([v, t]);
        }
    }
    Graph::with_numeric_labels(n, edges, false)
}

/// Random rooted tree with `n` nodes and height at most `depth` (root at
/// depth 0): every new node picks a uniformly random parent among nodes that
/// are above the depth limit and have fewer than `max_children` children.
/// Stops early when no parent can accept a child.
pub fn random_tree(n: usize, depth: usize, max_children: usize, seed: u64) -> LevelTree {
    let mut rng = rng_for(seed, 3);
    let mut depth_of = vec![0usize];
    let mut index_in_level = vec![0u32];
    let mut kids = vec![0usize];
    let mut open: Vec<usize> = if depth > 0 && max_children > 0 { vec![0] } else { vec![] };
    let mut parents: Vec<Vec<u32>> = vec![Vec::new(); depth];
    while depth_of.len() < n && !open.is_empty() {
        let slot = rng.gen_range(0..open.len());
        let p = open[slot];
        let d = depth_of[p] + 1;
        let me = depth_of.len();
        parents[d - 1].push(index_in_level[p]);
        index_in_level.push(parents[d - 1].len() as u32 - 1);
        depth_of.push(d);
        kids.push(0);
        kids[p] += 1;
        if kids[p] == max_children {
            open.swap_remove(slot);
        }
        if d < depth && max_children > 0 {
            open.push(me);
        }
    }
    LevelTree::from_parents(&parents).expect("parents always precede children")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnonMethod {
    /// Relabel only.
    Naive,
    /// Relabel and delete a fraction of the edges.
    Sparsify,
    /// Relabel, delete a fraction of the edges and insert as many new ones.
    Perturb,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnonymizationSpec {
    pub method: AnonMethod,
    /// Fraction of edges touched; ignored by [`AnonMethod::Naive`].
    pub ratio: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anonymized {
    pub graph: Graph,
    /// `truth[a]` is the original node behind anonymized node `a`.
    pub truth: Vec<NodeId>,
    pub removed: usize,
    pub added: usize,
    /// Set when fewer non-edges existed than edges to insert.
    pub warning: Option<String>,
}

/// Anonymizes `g`. The node permutation, the order in which edges are
/// deleted and the order in which non-edges are inserted depend only on the
/// seed, so for one seed a larger ratio touches a superset of the edges a
/// smaller ratio touches.
pub fn anonymize(g: &Graph, spec: &AnonymizationSpec) -> Result<Anonymized, ExperimentError> {
    if !(0.0..=1.0).contains(&spec.ratio) {
        return Err(ExperimentError::Ratio(spec.ratio));
    }
    let n = g.node_count();
    let mut perm_rng = rng_for(spec.seed, 10);
    let mut truth: Vec<NodeId> = g.nodes().collect();
    truth.shuffle(&mut perm_rng);
    let mut pos = vec![0u32; n];
    for (a, &o) in truth.iter().enumerate() {
        pos[o.index()] = a as u32;
    }

    let original: Vec<(u32, u32)> = g.edges().collect();
    let touched = match spec.method {
        AnonMethod::Naive => 0,
        _ => ((spec.ratio * original.len() as f64).ceil() as usize).min(original.len()),
    };
    let mut order: Vec<usize> = (0..original.len()).collect();
    order.shuffle(&mut rng_for(spec.seed, 11));
    let mut dropped = vec![false; original.len()];
    for &i in &order[..touched] {
        dropped[i] = true;
    }
    let mut edges: Vec<(u32, u32)> = original
        .iter()
        .zip(&dropped)
        .filter(|(_, &d)| !d)
        .map(|(&e, _)| e)
        .collect();

    let mut added = 0;
    let mut warning = None;
    if spec.method == AnonMethod::Perturb && touched > 0 {
        let total = if g.is_directed() { n * n.saturating_sub(1) } else { n * n.saturating_sub(1) / 2 };
        let free = total - original.len();
        let want = if touched > free {
            warning = Some(format!(
                "only {free} non-edges exist; inserting {free} instead of {touched}"
            ));
            free
        } else {
            touched
        };
        let mut rng = rng_for(spec.seed, 12);
        let mut chosen = HashSet::with_capacity(want);
        if want * 2 > free {
            // dense case: enumerate every non-edge and take a shuffled prefix
            let mut all = Vec::with_capacity(free);
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    let ok = if g.is_directed() { a != b } else { a < b };
                    if ok && !g.has_edge(a, b) {
                        all.push((a, b));
                    }
                }
            }
            all.shuffle(&mut rng);
            all.truncate(want);
            edges.extend(all);
        } else {
            while chosen.len() < want {
                let a = rng.gen_range(0..n as u32);
                let b = rng.gen_range(0..n as u32);
                let e = if g.is_directed() { (a, b) } else { (a.min(b), a.max(b)) };
                if a != b && !g.has_edge(e.0, e.1) && chosen.insert(e) {
                    edges.push(e);
                }
            }
        }
        added = want;
    }

    let labels = (0..n).map(|i| i.to_string()).collect();
    let mapped = edges.into_iter().map(|(a, b)| (pos[a as usize], pos[b as usize]));
    let graph = Graph::from_edges(labels, mapped, g.is_directed()).expect("indices are in range");
    Ok(Anonymized {
        graph,
        truth,
        removed: touched,
        added,
        warning,
    })
}

/// How ties at the top-l cutoff are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TiePolicy {
    /// Every candidate at the l-th smallest distance counts as retrieved.
    Inclusive,
    /// Exactly `l` candidates, ties broken by NodeId.
    Exclusive,
}

/// Node similarity used to rank candidates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ranker {
    Ned(WeightScheme),
    /// Baseline: L1 distance between (own degree, histogram of neighbor
    /// degrees in power-of-two buckets). This is a simple structural
    /// baseline, not ReFeX.
    DegreeHistogram,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeanonRow {
    pub anon: NodeId,
    pub truth: NodeId,
    /// 1-based rank of the true node: competition rank (one plus the number
    /// of strictly closer candidates) under the inclusive policy, position
    /// in the (distance, NodeId) order under the exclusive one.
    pub rank: usize,
    pub hit: bool,
    pub truth_distance: Distance,
    /// The `l` smallest candidate distances.
    pub top: Vec<Distance>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeanonReport {
    pub rows: Vec<DeanonRow>,
    pub hits: usize,
    pub queries: usize,
    pub l: usize,
    pub k: usize,
    pub policy: TiePolicy,
}

impl DeanonReport {
    pub fn precision(&self) -> f64 {
        if self.queries == 0 {
            0.0
        } else {
            self.hits as f64 / self.queries as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeanonConfig {
    pub k: usize,
    pub l: usize,
    /// Number of anonymized nodes queried; `None` queries all of them.
    pub sample_size: Option<usize>,
    pub seed: u64,
    pub policy: TiePolicy,
    pub ranker: Ranker,
}

/// For each sampled anonymized node, ranks every training node by
/// similarity and checks whether the true identity is among the top `l`.
pub fn deanonymize(
    train: &Graph,
    anon: &Graph,
    truth: &[NodeId],
    cfg: &DeanonConfig,
) -> Result<DeanonReport, ExperimentError> {
    if cfg.l == 0 {
        return Err(ExperimentError::ZeroL);
    }
    if truth.len() != anon.node_count() {
        return Err(ExperimentError::TruthSize {
            anon: anon.node_count(),
            truth: truth.len(),
        });
    }
    let mut queries: Vec<NodeId> = match cfg.sample_size {
        Some(s) if s < anon.node_count() => sample(&mut rng_for(cfg.seed, 20), anon.node_count(), s)
            .into_iter()
            .map(|i| NodeId(i as u32))
            .collect(),
        _ => anon.nodes().collect(),
    };
    queries.sort_unstable();

    let score: Box<dyn Fn(NodeId) -> Result<Vec<Distance>, NedError> + Sync> = match &cfg.ranker {
        Ranker::Ned(w) => {
            let train_cache = SignatureCache::new(train, cfg.k)?;
            let anon_cache = SignatureCache::new(anon, cfg.k)?;
            train_cache.fill();
            let (classes, class_of) = group(&train_cache.all());
            let w = w.clone();
            Box::new(move |q: NodeId| {
                let s = anon_cache.get(q)?;
                let per_class: Vec<Distance> =
                    classes.iter().map(|c| s.distance(c, &w)).collect::<Result<_, _>>()?;
                Ok(class_of.iter().map(|&c| per_class[c]).collect())
            })
        }
        Ranker::DegreeHistogram => {
            let tf: Vec<Vec<i64>> = train.nodes().map(|v| degree_features(train, v)).collect();
            let af: Vec<Vec<i64>> = anon.nodes().map(|v| degree_features(anon, v)).collect();
            Box::new(move |q: NodeId| Ok(tf.iter().map(|t| Distance::from_integer(l1(&af[q.index()], t))).collect()))
        }
    };

    let rows: Vec<DeanonRow> = queries
        .par_iter()
        .map(|&q| {
            let d = score(q)?;
            let t = truth[q.index()];
            let mut order: Vec<u32> = (0..d.len() as u32).collect();
            order.sort_by(|&a, &b| d[a as usize].cmp(&d[b as usize]).then(a.cmp(&b)));
            let top: Vec<Distance> = order.iter().take(cfg.l).map(|&i| d[i as usize]).collect();
            let dt = d[t.index()];
            let rank = match cfg.policy {
                TiePolicy::Inclusive => 1 + d.iter().filter(|&&x| x < dt).count(),
                TiePolicy::Exclusive => 1 + order.iter().position(|&i| i == t.0).expect("truth is a training node"),
            };
            Ok(DeanonRow {
                anon: q,
                truth: t,
                rank,
                hit: rank <= cfg.l,
                truth_distance: dt,
                top,
            })
        })
        .collect::<Result<_, NedError>>()?;
    let hits = rows.iter().filter(|r| r.hit).count();
    Ok(DeanonReport {
        queries: rows.len(),
        rows,
        hits,
        l: cfg.l,
        k: cfg.k,
        policy: cfg.policy,
    })
}

/// Distinct signatures and, per input position, the index of its class.
fn group(sigs: &[&Signature]) -> (Vec<Signature>, Vec<usize>) {
    let mut ids: HashMap<&Signature, usize> = HashMap::new();
    let mut classes = Vec::new();
    let class_of = sigs
        .iter()
        .map(|&s| {
            *ids.entry(s).or_insert_with(|| {
                classes.push(s.clone());
                classes.len() - 1
            })
        })
        .collect();
    (classes, class_of)
}

fn degree_features(g: &Graph, v: NodeId) -> Vec<i64> {
    let mut f = vec![0i64; 34];
    f[0] = g.degree(v) as i64;
    for &w in g.neighbors(v, default_direction(g)).expect("valid node") {
        let d = g.degree(NodeId(w)).max(1);
        f[1 + (usize::BITS - d.leading_zeros()) as usize] += 1;
    }
    f
}

fn default_direction(g: &Graph) -> crate::graph::Direction {
    if g.is_directed() {
        crate::graph::Direction::Out
    } else {
        crate::graph::Direction::Undirected
    }
}

fn l1(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Aggregates of `|TED - TED*| / TED` over a corpus of tree pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosenessStats {
    pub pairs: usize,
    /// Pairs with `TED > 0`, over which the relative error is averaged.
    pub compared: usize,
    pub mean_relative_error: f64,
    pub stddev_relative_error: f64,
    /// Fraction of pairs with `TED* == TED` (over all pairs).
    pub equality_ratio: f64,
    /// The same figures per number of levels of the deeper tree.
    pub by_levels: Vec<ClosenessSlice>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosenessSlice {
    pub levels: usize,
    pub pairs: usize,
    pub mean_relative_error: f64,
    pub equality_ratio: f64,
}

/// Every unordered pair of distinct trees with at most `n_max` nodes and
/// height at most `depth_max`.
pub fn exhaustive_pairs(n_max: usize, depth_max: usize) -> Vec<(LevelTree, LevelTree)> {
    let trees = enumerate_trees(n_max, depth_max);
    let mut out = Vec::new();
    for i in 0..trees.len() {
        for j in i + 1..trees.len() {
            out.push((trees[i].clone(), trees[j].clone()));
        }
    }
    out
}

/// Compares unit-cost TED* against the exact unordered tree edit distance.
pub fn ted_closeness_study(corpus: &[(LevelTree, LevelTree)]) -> Result<ClosenessStats, ExperimentError> {
    let measured: Vec<(usize, u64, u64)> = corpus
        .par_iter()
        .map(|(a, b)| {
            let ted = exact_unordered_ted(a, b)? as u64;
            let star = ted_star_unit(a, b).map_err(NedError::from)?;
            Ok((a.level_count().max(b.level_count()), ted, star))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let summarize = |rows: &[&(usize, u64, u64)]| {
        let rel: Vec<f64> = rows
            .iter()
            .filter(|r| r.1 > 0)
            .map(|r| (r.1 as f64 - r.2 as f64).abs() / r.1 as f64)
            .collect();
        let mean = if rel.is_empty() { 0.0 } else { rel.iter().sum::<f64>() / rel.len() as f64 };
        let var = if rel.is_empty() {
            0.0
        } else {
            rel.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / rel.len() as f64
        };
        let eq = if rows.is_empty() {
            1.0
        } else {
            rows.iter().filter(|r| r.1 == r.2).count() as f64 / rows.len() as f64
        };
        (rel.len(), mean, var.sqrt(), eq)
    };
    let all: Vec<&(usize, u64, u64)> = measured.iter().collect();
    let (compared, mean, sd, eq) = summarize(&all);
    let mut levels: Vec<usize> = measured.iter().map(|r| r.0).collect();
    levels.sort_unstable();
    levels.dedup();
    let by_levels = levels
        .into_iter()
        .map(|lv| {
            let rows: Vec<&(usize, u64, u64)> = measured.iter().filter(|r| r.0 == lv).collect();
            let (_, m, _, e) = summarize(&rows);
            ClosenessSlice {
                levels: lv,
                pairs: rows.len(),
                mean_relative_error: m,
                equality_ratio: e,
            }
        })
        .collect();
    Ok(ClosenessStats {
        pairs: measured.len(),
        compared,
        mean_relative_error: mean,
        stddev_relative_error: sd,
        equality_ratio: eq,
        by_levels,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub size: usize,
    pub levels: usize,
    pub reps: usize,
    pub p50_us: f64,
    pub p90_us: f64,
    pub max_us: f64,
}

/// Wall time of unit-cost TED* on seeded random tree pairs of each size
/// with `levels` levels (height `levels - 1`).
pub fn scaling_study(sizes: &[usize], levels: &[usize], reps: usize, seed: u64) -> Vec<ScalingRow> {
    let mut rows = Vec::new();
    for &k in levels {
        for &n in sizes {
            let mut times: Vec<f64> = (0..reps)
                .map(|r| {
                    let s = seed ^ ((n as u64) << 32) ^ ((k as u64) << 16) ^ r as u64;
                    let a = random_tree(n, k.saturating_sub(1), usize::MAX, s);
                    let b = random_tree(n, k.saturating_sub(1), usize::MAX, s ^ 0xabcdef);
                    let t0 = Instant::now();
                    let d = ted_star_unit(&a, &b).expect("unit TED* never violates its invariant here");
                    let el = t0.elapsed();
                    std::hint::black_box(d);
                    el.as_secs_f64() * 1e6
                })
                .collect();
            times.sort_by(|a, b| a.total_cmp(b));
            let pick = |q: f64| times.get(((times.len() as f64 - 1.0) * q).round() as usize).copied().unwrap_or(0.0);
            rows.push(ScalingRow {
                size: n,
                levels: k,
                reps,
                p50_us: pick(0.5),
                p90_us: pick(0.9),
                max_us: times.last().copied().unwrap_or(0.0),
            });
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq)]
pub struct KEffectRow {
    pub k: usize,
    pub queries: usize,
    /// Over all queries: nodes of the second graph at distance 0.
    pub zero_matches: usize,
    /// Mean size of the nearest-neighbor set (all nodes at the minimum
    /// distance).
    pub mean_nn_set: f64,
    /// Over all queries: candidates tied at the l-th distance beyond the
    /// first `l`.
    pub ties_in_top_l: usize,
}

/// How nearest-neighbor sets and top-l ties shrink as k grows, for seeded
/// query nodes of `g1` against every node of `g2`.
pub fn k_effect_study(
    g1: &Graph,
    g2: &Graph,
    queries: usize,
    ks: &[usize],
    l: usize,
    seed: u64,
) -> Result<Vec<KEffectRow>, ExperimentError> {
    if l == 0 {
        return Err(ExperimentError::ZeroL);
    }
    let mut qs: Vec<NodeId> = sample(&mut rng_for(seed, 30), g1.node_count(), queries.min(g1.node_count()))
        .into_iter()
        .map(|i| NodeId(i as u32))
        .collect();
    qs.sort_unstable();
    let mut rows = Vec::new();
    for &k in ks {
        let c1 = SignatureCache::new(g1, k)?;
        let c2 = SignatureCache::new(g2, k)?;
        let (classes, class_of) = group(&c2.all());
        let per_query: Vec<(usize, usize, usize)> = qs
            .par_iter()
            .map(|&q| {
                let s = c1.get(q)?;
                let dc: Vec<Distance> = classes
                    .iter()
                    .map(|c| s.distance(c, &WeightScheme::Unit))
                    .collect::<Result<_, _>>()?;
                let mut d: Vec<Distance> = class_of.iter().map(|&c| dc[c]).collect();
                d.sort_unstable();
                let zero = d.iter().filter(|x| x.is_zero()).count();
                let nn = d.iter().filter(|&&x| x == d[0]).count();
                let cut = d[l.min(d.len()) - 1];
                let ties = d.iter().filter(|&&x| x <= cut).count() - l.min(d.len());
                Ok((zero, nn, ties))
            })
            .collect::<Result<_, NedError>>()?;
        let n = per_query.len().max(1) as f64;
        rows.push(KEffectRow {
            k,
            queries: per_query.len(),
            zero_matches: per_query.iter().map(|r| r.0).sum(),
            mean_nn_set: per_query.iter().map(|r| r.1 as f64).sum::<f64>() / n,
            ties_in_top_l: per_query.iter().map(|r| r.2).sum(),
        });
    }
    Ok(rows)
}

/// Decimal rendering of an exact distance.
pub fn to_f64(d: &Distance) -> f64 {
    d.to_f64().unwrap_or(f64::NAN)
}

/// Weighted TED* as `f64`, for quick reporting.
pub fn ted_star_f64(a: &LevelTree, b: &LevelTree, w: &WeightScheme) -> Result<f64, NedError> {
    Ok(to_f64(&ted_star_distance_only(a, b, w)?))
}
