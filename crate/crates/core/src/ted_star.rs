//! TED*: a tree edit distance whose operations never change a node's depth
//! (insert a leaf, delete a leaf, move a node to another parent on the same
//! level), computed bottom-up one level at a time.
//!
//! For every level the shorter side is padded with parentless leaves, nodes
//! of both sides are canonized from their children's labels, a complete
//! bipartite graph weighted by children-multiset symmetric difference is
//! matched exactly, and the side that needed padding inherits the labels of
//! its matched partners so the level above compares reconciled children.
//!
//! Levels are numbered from 1 (the root) in every public report; storage
//! inside [`LevelTree`] is 0-based.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::adjacency_tree::LevelTree;
use crate::assignment::{min_cost_perfect_matching, CostMatrix};
use crate::error::{ParseError, TedError, WeightError};

/// Exact distance value. Unit-cost distances are always integral.
pub type Distance = Ratio<i64>;

/// Per-level operation weights for weighted TED*.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum WeightScheme {
    /// Every operation costs 1.
    #[default]
    Unit,
    /// Insert/delete cost 1, moves on level `i` cost `4 * i`. Upper-bounds
    /// the classical unordered tree edit distance.
    WPlus,
    /// Explicit `(insert/delete, move)` weights for levels `1..=len`; deeper
    /// levels fall back to unit weights.
    Custom(Vec<(Distance, Distance)>),
}

impl WeightScheme {
    pub fn custom(levels: Vec<(Distance, Distance)>) -> Result<Self, WeightError> {
        for (i, (a, b)) in levels.iter().enumerate() {
            if *a <= Distance::zero() || *b <= Distance::zero() {
                return Err(WeightError::NonPositive { level: i + 1 });
            }
        }
        Ok(WeightScheme::Custom(levels))
    }

    /// Insert/delete weight on 1-based `level`.
    pub fn leaf_weight(&self, level: usize) -> Distance {
        match self {
            WeightScheme::Custom(w) => w.get(level - 1).map_or_else(Distance::one, |p| p.0),
            _ => Distance::one(),
        }
    }

    /// Move weight on 1-based `level`.
    pub fn move_weight(&self, level: usize) -> Distance {
        match self {
            WeightScheme::Unit => Distance::one(),
            WeightScheme::WPlus => Distance::from_integer(4 * level as i64),
            WeightScheme::Custom(w) => w.get(level - 1).map_or_else(Distance::one, |p| p.1),
        }
    }

    /// Parses a weight file: one `level w1 w2` line per listed level
    /// (levels start at 1; weights are integers or `p/q` fractions). Unlisted
    /// levels use unit weights. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut listed: Vec<(usize, Distance, Distance)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ParseError::Weights { line: i + 1, msg };
            let tok: Vec<&str> = line.split_whitespace().collect();
            if tok.len() != 3 {
                return Err(err(format!("expected `level w1 w2`, found {} fields", tok.len())));
            }
            let level: usize = tok[0].parse().map_err(|e| err(format!("level: {e}")))?;
            if level == 0 {
                return Err(err("levels start at 1".into()));
            }
            let w1 = parse_ratio(tok[1]).map_err(&err)?;
            let w2 = parse_ratio(tok[2]).map_err(&err)?;
            if w1 <= Distance::zero() || w2 <= Distance::zero() {
                return Err(err("weights must be strictly positive".into()));
            }
            if listed.iter().any(|(l, _, _)| *l == level) {
                return Err(err(format!("level {level} listed twice")));
            }
            listed.push((level, w1, w2));
        }
        let depth = listed.iter().map(|(l, _, _)| *l).max().unwrap_or(0);
        let mut levels = vec![(Distance::one(), Distance::one()); depth];
        for (l, a, b) in listed {
            levels[l - 1] = (a, b);
        }
        Ok(WeightScheme::Custom(levels))
    }
}

fn parse_ratio(s: &str) -> Result<Distance, String> {
    let parse = |t: &str| t.parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d == 0 {
                return Err("zero denominator".into());
            }
            Ok(Distance::new(parse(n)?, d))
        }
        None => Ok(Distance::from_integer(parse(s)?)),
    }
}

/// Costs of one level pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCost {
    /// 1-based level (1 = root).
    pub level: usize,
    pub size_left: usize,
    pub size_right: usize,
    /// Forced leaf insertions/deletions: the level-size difference.
    pub padding: u64,
    /// Minimum bipartite matching value on this level.
    pub matching_min: u64,
    /// Moves charged on this level: `(matching_min - padding_below) / 2`.
    pub matching: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostBreakdown {
    /// Root level first.
    pub levels: Vec<LevelCost>,
    /// Unweighted operation count.
    pub unit_total: u64,
    /// Weighted total under the scheme the distance was computed with.
    pub total: Distance,
}

impl CostBreakdown {
    /// Recomputes the total from padding and raw matching values only:
    /// half of every non-root padding plus half of every matching value.
    pub fn recomposed_unit_total(&self) -> u64 {
        let pad: u64 = self.levels.iter().skip(1).map(|l| l.padding).sum();
        let mat: u64 = self.levels.iter().map(|l| l.matching_min).sum();
        (pad + mat) / 2
    }
}

impl fmt::Display for CostBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "level\tsize_left\tsize_right\tpadding\tmatching_min\tmatching")?;
        for l in &self.levels {
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}\t{}",
                l.level, l.size_left, l.size_right, l.padding, l.matching_min, l.matching
            )?;
        }
        write!(f, "total\t{}", self.total)
    }
}

/// Assigns canonization labels to a level: collections are ordered by size,
/// then element-wise on their sorted labels, and numbered `0, 1, 2, ...` with
/// equal collections sharing a label.
pub fn canonize_level(collections: &[Vec<u32>]) -> Vec<u32> {
    let mut flat = Vec::new();
    let mut offsets = Vec::with_capacity(collections.len() + 1);
    offsets.push(0u32);
    for c in collections {
        let start = flat.len();
        flat.extend_from_slice(c);
        flat[start..].sort_unstable();
        offsets.push(flat.len() as u32);
    }
    let mut labels = vec![0u32; collections.len()];
    canonize_flat(&flat, &offsets, &mut Vec::new(), &mut labels);
    labels
}

#[inline]
fn collection_order(a: &[u32], b: &[u32]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Core of [`canonize_level`] over pre-sorted collections stored flat.
/// Returns the number of distinct labels.
fn canonize_flat(flat: &[u32], offsets: &[u32], order: &mut Vec<u32>, labels: &mut [u32]) -> usize {
    let n = offsets.len() - 1;
    let slice = |i: u32| &flat[offsets[i as usize] as usize..offsets[i as usize + 1] as usize];
    order.clear();
    order.extend(0..n as u32);
    order.sort_unstable_by(|&a, &b| collection_order(slice(a), slice(b)).then(a.cmp(&b)));
    let mut next = 0u32;
    for w in 0..n {
        if w > 0 && slice(order[w]) != slice(order[w - 1]) {
            next += 1;
        }
        labels[order[w] as usize] = next;
    }
    if n == 0 {
        0
    } else {
        next as usize + 1
    }
}

/// Size of the counted symmetric difference of two sorted label sequences.
#[inline]
fn multiset_symmetric_difference(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut common) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    a.len() as u64 + b.len() as u64 - 2 * common
}

/// Complete bipartite weights between two equally sized levels, given the
/// children-label collections of their nodes (padded nodes: empty).
pub fn build_bipartite_weights(left: &[Vec<u32>], right: &[Vec<u32>]) -> CostMatrix<i64> {
    assert_eq!(left.len(), right.len(), "levels must be padded to equal size");
    let sort = |v: &Vec<u32>| {
        let mut s = v.clone();
        s.sort_unstable();
        s
    };
    let l: Vec<Vec<u32>> = left.iter().map(sort).collect();
    let r: Vec<Vec<u32>> = right.iter().map(sort).collect();
    let n = l.len();
    let data = (0..n * n)
        .map(|i| multiset_symmetric_difference(&l[i / n], &r[i % n]) as i64)
        .collect();
    CostMatrix::from_raw(n, data)
}

/// Full TED* result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TedStar {
    pub distance: Distance,
    pub breakdown: CostBreakdown,
}

/// TED* between two trees with a full per-level breakdown.
pub fn ted_star(t1: &LevelTree, t2: &LevelTree, weights: &WeightScheme) -> Result<TedStar, TedError> {
    let breakdown = run(t1, t2, weights, true)?;
    Ok(TedStar {
        distance: breakdown.total,
        breakdown,
    })
}

/// TED* value only.
pub fn ted_star_distance_only(t1: &LevelTree, t2: &LevelTree, weights: &WeightScheme) -> Result<Distance, TedError> {
    Ok(run(t1, t2, weights, false)?.total)
}

/// Unit-cost TED* as an integer.
pub fn ted_star_unit(t1: &LevelTree, t2: &LevelTree) -> Result<u64, TedError> {
    Ok(run(t1, t2, &WeightScheme::Unit, false)?.unit_total)
}

/// Per-side scratch for one level.
struct Side {
    flat: Vec<u32>,
    offsets: Vec<u32>,
}

impl Side {
    fn new() -> Self {
        Side {
            flat: Vec::new(),
            offsets: Vec::new(),
        }
    }

    /// Fills sorted children-label collections for the `n` (padded) nodes of
    /// depth `d`. `below` holds the current labels of depth `d + 1`.
    fn collect(&mut self, t: &LevelTree, d: usize, n: usize, below: &[u32]) {
        self.flat.clear();
        self.offsets.clear();
        self.offsets.push(0);
        let real = t.level_size(d);
        let has_children = d + 1 < t.level_count();
        for j in 0..n {
            if j < real && has_children {
                let start = self.flat.len();
                self.flat.extend(t.children(d, j).map(|c| below[c]));
                self.flat[start..].sort_unstable();
            }
            self.offsets.push(self.flat.len() as u32);
        }
    }

    #[inline]
    fn get(&self, j: usize) -> &[u32] {
        &self.flat[self.offsets[j] as usize..self.offsets[j + 1] as usize]
    }
}

/// Brings both trees into canonical sibling order and a fixed orientation,
/// so the matching tie-break only ever sees a function of the two
/// isomorphism classes. This keeps the result invariant under child
/// reordering and symmetric in its arguments.
fn run(t1: &LevelTree, t2: &LevelTree, weights: &WeightScheme, keep_levels: bool) -> Result<CostBreakdown, TedError> {
    fn canon(t: &LevelTree) -> Cow<'_, LevelTree> {
        if t.is_canonical_order() {
            Cow::Borrowed(t)
        } else {
            Cow::Owned(t.canonical_order())
        }
    }
    let (a, b) = (canon(t1), canon(t2));
    if a.layout_cmp(&b) == Ordering::Greater {
        let mut r = run_oriented(&b, &a, weights, keep_levels)?;
        for l in &mut r.levels {
            std::mem::swap(&mut l.size_left, &mut l.size_right);
        }
        Ok(r)
    } else {
        run_oriented(&a, &b, weights, keep_levels)
    }
}

fn run_oriented(t1: &LevelTree, t2: &LevelTree, weights: &WeightScheme, keep_levels: bool) -> Result<CostBreakdown, TedError> {
    let depth = t1.level_count().max(t2.level_count());
    let mut left = Side::new();
    let mut right = Side::new();
    let mut below_left: Vec<u32> = Vec::new();
    let mut below_right: Vec<u32> = Vec::new();
    let mut joint_flat: Vec<u32> = Vec::new();
    let mut joint_offsets: Vec<u32> = Vec::new();
    let mut order: Vec<u32> = Vec::new();
    let mut labels: Vec<u32> = Vec::new();
    let mut levels: Vec<LevelCost> = Vec::new();
    let mut padding_below = 0u64;
    let mut unit_total = 0u64;
    let mut total = Distance::zero();

    for d in (0..depth).rev() {
        let nu = t1.level_size(d);
        let nv = t2.level_size(d);
        let n = nu.max(nv);
        let padding = nu.abs_diff(nv) as u64;

        left.collect(t1, d, n, &below_left);
        right.collect(t2, d, n, &below_right);

        // Canonize the union of both padded levels.
        joint_flat.clear();
        joint_offsets.clear();
        joint_offsets.push(0);
        for side in [&left, &right] {
            for j in 0..n {
                joint_flat.extend_from_slice(side.get(j));
                joint_offsets.push(joint_flat.len() as u32);
            }
        }
        labels.clear();
        labels.resize(2 * n, 0);
        let classes = canonize_flat(&joint_flat, &joint_offsets, &mut order, &mut labels);

        // Weights depend only on the pair of labels; fill a class table once.
        let mut rep = vec![usize::MAX; classes];
        for (i, &c) in labels.iter().enumerate() {
            if rep[c as usize] == usize::MAX {
                rep[c as usize] = i;
            }
        }
        let coll = |i: usize| {
            let s = joint_offsets[i] as usize;
            let e = joint_offsets[i + 1] as usize;
            &joint_flat[s..e]
        };
        let mut table = vec![-1i64; classes * classes];
        let mut data = Vec::with_capacity(n * n);
        for x in 0..n {
            let cx = labels[x] as usize;
            for y in 0..n {
                let cy = labels[n + y] as usize;
                let slot = &mut table[cx * classes + cy];
                if *slot < 0 {
                    *slot = multiset_symmetric_difference(coll(rep[cx]), coll(rep[cy])) as i64;
                }
                data.push(*slot);
            }
        }
        let matching = min_cost_perfect_matching(&CostMatrix::from_raw(n, data));
        let m = matching.cost;

        let residual = m - padding_below as i64;
        if residual < 0 || residual % 2 != 0 {
            return Err(TedError::MatchingResidual {
                level: d + 1,
                matching: m,
                padding_below: padding_below as i64,
            });
        }
        let moves = (residual / 2) as u64;

        // The side that was strictly smaller takes its partners' labels; on
        // equal sizes the right side is relabeled from the left.
        below_left.clear();
        below_right.clear();
        if nu < nv {
            below_right.extend_from_slice(&labels[n..]);
            below_left.extend(matching.row_to_col.iter().map(|&y| labels[n + y]));
        } else {
            below_left.extend_from_slice(&labels[..n]);
            below_right.resize(n, 0);
            for (x, &y) in matching.row_to_col.iter().enumerate() {
                below_right[y] = labels[x];
            }
        }

        let level = d + 1;
        unit_total += padding + moves;
        total += weights.leaf_weight(level) * Distance::from_integer(padding as i64)
            + weights.move_weight(level) * Distance::from_integer(moves as i64);
        if keep_levels {
            levels.push(LevelCost {
                level,
                size_left: nu,
                size_right: nv,
                padding,
                matching_min: m as u64,
                matching: moves,
            });
        }
        padding_below = padding;
    }
    levels.reverse();
    Ok(CostBreakdown {
        levels,
        unit_total,
        total,
    })
}

/// Diagnostic: the smallest unit cost the level-by-level procedure reaches
/// when every minimum-cost matching is tried at every level, instead of
/// the single deterministic one. Exponential; returns `None` when a level
/// is wider than `width_cap`.
///
/// The deterministic distance can exceed this value: which optimum is
/// picked decides the labels the level above sees.
pub fn unit_cost_over_all_optima(t1: &LevelTree, t2: &LevelTree, width_cap: usize) -> Option<u64> {
    let (a, b) = (t1.canonical_order(), t2.canonical_order());
    let (a, b) = if a.layout_cmp(&b) == Ordering::Greater { (b, a) } else { (a, b) };
    let depth = a.level_count().max(b.level_count());
    if (0..depth).any(|d| a.level_size(d).max(b.level_size(d)) > width_cap) {
        return None;
    }
    Some(all_optima_from(&a, &b, depth, &[], &[], 0))
}

fn all_optima_from(t1: &LevelTree, t2: &LevelTree, d: usize, below_l: &[u32], below_r: &[u32], pad_below: u64) -> u64 {
    if d == 0 {
        return 0;
    }
    let d = d - 1;
    let (nu, nv) = (t1.level_size(d), t2.level_size(d));
    let n = nu.max(nv);
    let padding = nu.abs_diff(nv) as u64;
    let collect = |t: &LevelTree, below: &[u32]| -> Vec<Vec<u32>> {
        (0..n)
            .map(|j| {
                if j >= t.level_size(d) || d + 1 >= t.level_count() {
                    return Vec::new();
                }
                let mut c: Vec<u32> = t.children(d, j).map(|c| below[c]).collect();
                c.sort_unstable();
                c
            })
            .collect()
    };
    let (cl, cr) = (collect(t1, below_l), collect(t2, below_r));
    let joint: Vec<Vec<u32>> = cl.iter().chain(&cr).cloned().collect();
    let labels = canonize_level(&joint);
    let w: Vec<i64> = (0..n * n)
        .map(|i| multiset_symmetric_difference(&cl[i / n], &cr[i % n]) as i64)
        .collect();
    let best = min_cost_perfect_matching(&CostMatrix::from_raw(n, w.clone())).cost;
    let moves = ((best - pad_below as i64) / 2) as u64;

    // Enumerate every optimal assignment; a row-minimum bound prunes.
    let row_min: Vec<i64> = (0..n).map(|x| (0..n).map(|y| w[x * n + y]).min().unwrap_or(0)).collect();
    let mut suffix = vec![0i64; n + 1];
    for x in (0..n).rev() {
        suffix[x] = suffix[x + 1] + row_min[x];
    }
    let mut optima: Vec<Vec<usize>> = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    enumerate_optima(&w, n, best, &suffix, 0, &mut cur, &mut used, &mut optima);

    let mut seen = std::collections::HashSet::new();
    let mut rest = u64::MAX;
    for f in optima {
        let (nl, nr): (Vec<u32>, Vec<u32>) = if nu < nv {
            ((0..n).map(|x| labels[n + f[x]]).collect(), labels[n..].to_vec())
        } else {
            let mut r = vec![0u32; n];
            for (x, &y) in f.iter().enumerate() {
                r[y] = labels[x];
            }
            (labels[..n].to_vec(), r)
        };
        if seen.insert((nl.clone(), nr.clone())) {
            rest = rest.min(all_optima_from(t1, t2, d, &nl, &nr, padding));
        }
    }
    rest + padding + moves
}

#[allow(clippy::too_many_arguments)]
fn enumerate_optima(
    w: &[i64],
    n: usize,
    target: i64,
    suffix: &[i64],
    spent: i64,
    cur: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let x = cur.len();
    if x == n {
        if spent == target {
            out.push(cur.clone());
        }
        return;
    }
    for y in 0..n {
        if used[y] || spent + w[x * n + y] + suffix[x + 1] > target {
            continue;
        }
        used[y] = true;
        cur.push(y);
        enumerate_optima(w, n, target, suffix, spent + w[x * n + y], cur, used, out);
        cur.pop();
        used[y] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adjacency_tree::parse_tree_literal;

    fn lit(s: &str) -> LevelTree {
        parse_tree_literal(s).unwrap()
    }

    fn unit(a: &str, b: &str) -> u64 {
        ted_star_unit(&lit(a), &lit(b)).unwrap()
    }

    #[test]
    fn canonization_examples() {
        assert_eq!(canonize_level(&[vec![], vec![], vec![]]), vec![0, 0, 0]);
        assert_eq!(canonize_level(&[vec![], vec![0], vec![0], vec![0, 0]]), vec![0, 1, 1, 2]);
        assert_eq!(canonize_level(&[vec![2], vec![0, 0], vec![0, 1]]), vec![0, 1, 2]);
        // order inside a collection is irrelevant
        assert_eq!(canonize_level(&[vec![1, 0, 0], vec![0, 1, 0]]), vec![0, 0]);
    }

    #[test]
    fn bipartite_weight_examples() {
        let m = build_bipartite_weights(&[vec![0, 0, 1], vec![0, 0]], &[vec![0, 2], vec![0, 0]]);
        assert_eq!(m.get(0, 0), 3);
        assert_eq!(m.get(1, 1), 0);
        let m = build_bipartite_weights(&[vec![0, 0]], &[vec![]]);
        assert_eq!(m.get(0, 0), 2);
    }

    #[test]
    fn identity_is_zero() {
        for s in ["()", "(())", "(()(()))", "((()())(()()))"] {
            assert_eq!(unit(s, s), 0);
        }
        assert_eq!(unit("((())())", "(()(()))"), 0);
    }

    #[test]
    fn single_forced_insertion() {
        let r = ted_star(&lit("(()())"), &lit("(()()())"), &WeightScheme::Unit).unwrap();
        assert_eq!(r.distance, Distance::from_integer(1));
        let pads: Vec<u64> = r.breakdown.levels.iter().map(|l| l.padding).collect();
        assert_eq!(pads, vec![0, 1]);
        assert!(r.breakdown.levels.iter().all(|l| l.matching == 0));
    }

    #[test]
    fn single_move() {
        let (a, b) = (lit("((()())())"), lit("((())(()))"));
        let r = ted_star(&a, &b, &WeightScheme::Unit).unwrap();
        assert_eq!(r.breakdown.unit_total, 1);
        let l2 = &r.breakdown.levels[1];
        assert_eq!((l2.padding, l2.matching_min, l2.matching), (0, 2, 1));
        assert!(r.breakdown.levels.iter().all(|l| l.padding == 0));
        let w = ted_star_distance_only(&a, &b, &WeightScheme::WPlus).unwrap();
        assert_eq!(w, Distance::from_integer(8));
    }

    #[test]
    fn breakdown_invariants_hold() {
        let r = ted_star(&lit("(((()))(())())"), &lit("((()()())(()))"), &WeightScheme::Unit).unwrap();
        let b = &r.breakdown;
        assert_eq!(b.levels[0].padding, 0);
        assert_eq!(b.levels.last().unwrap().matching, 0);
        assert_eq!(b.recomposed_unit_total(), b.unit_total);
        let sum: u64 = b.levels.iter().map(|l| l.padding + l.matching).sum();
        assert_eq!(sum, b.unit_total);
    }

    #[test]
    fn shallower_tree_contributes_empty_levels() {
        assert_eq!(unit("()", "((()))"), 2);
        assert_eq!(unit("(())", "()"), 1);
    }

    #[test]
    fn weight_file_parsing() {
        let w = WeightScheme::parse("# w\n1 1 2\n3 1/2 5\n").unwrap();
        assert_eq!(w.move_weight(1), Distance::from_integer(2));
        assert_eq!(w.leaf_weight(2), Distance::one());
        assert_eq!(w.leaf_weight(3), Distance::new(1, 2));
        assert_eq!(w.move_weight(9), Distance::one());
        assert!(WeightScheme::parse("1 0 1").is_err());
        assert!(WeightScheme::parse("0 1 1").is_err());
        assert!(WeightScheme::parse("1 1").is_err());
        assert!(WeightScheme::parse("1 1 1\n1 2 2").is_err());
        assert!(WeightScheme::parse("1 1/0 1").is_err());
        assert!(WeightScheme::custom(vec![(Distance::one(), Distance::zero())]).is_err());
    }

    #[test]
    fn tie_break_can_cost_a_move() {
        // One leaf must be added under each of three levels. The fixed
        // tie-break hangs the new deepest leaf under an existing node and
        // then pays a move; another optimum at the same level avoids it.
        let (a, b) = (lit("((()()))"), lit("(((()))(()()))"));
        assert_eq!(unit("((()()))", "(((()))(()()))"), 4);
        assert_eq!(unit_cost_over_all_optima(&a, &b, 8), Some(3));
        assert_eq!(unit_cost_over_all_optima(&a, &a, 8), Some(0));
        assert_eq!(unit_cost_over_all_optima(&a, &b, 1), None);
    }

    #[test]
    fn symmetric_and_order_invariant() {
        let pairs = [("((()())())", "((())(()))"), ("((()()))", "(((()))(()()))"), ("(()(()))", "((()()()))")];
        for (x, y) in pairs {
            assert_eq!(unit(x, y), unit(y, x));
            let xr = lit(x).canonical_order();
            assert_eq!(unit(x, y), ted_star_unit(&xr, &lit(y)).unwrap());
        }
        let r = ted_star(&lit("(()())"), &lit("(()()())"), &WeightScheme::Unit).unwrap();
        assert_eq!((r.breakdown.levels[1].size_left, r.breakdown.levels[1].size_right), (2, 3));
        let r = ted_star(&lit("(()()())"), &lit("(()())"), &WeightScheme::Unit).unwrap();
        assert_eq!((r.breakdown.levels[1].size_left, r.breakdown.levels[1].size_right), (3, 2));
    }
}
