//! Exact minimum-cost perfect matching on square cost matrices.
//!
//! Kuhn-Munkres with row/column potentials, O(n^3). After the optimum is
//! found, the equality subgraph of the final potentials contains every
//! optimal assignment; a second pass walks it row by row to return the
//! lexicographically smallest one.

use std::collections::VecDeque;
use std::ops::{Add, Sub};

use num_traits::Zero;

use crate::error::ParseError;

/// Number semantics accepted by the solver: exact, totally ordered, closed
/// under addition and subtraction (`i64`, `Ratio<i64>`, ...).
pub trait Cost: Copy + Ord + Zero + Add<Output = Self> + Sub<Output = Self> {}

impl<T> Cost for T where T: Copy + Ord + Zero + Add<Output = T> + Sub<Output = T> {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostMatrix<T> {
    n: usize,
    data: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("negative entry at ({row}, {col})")]
    Negative { row: usize, col: usize },
    #[error("matrix is empty")]
    Empty,
}

impl<T: Cost> CostMatrix<T> {
    /// Row-major `n * n` entries; all must be non-negative.
    pub fn new(n: usize, data: Vec<T>) -> Result<Self, MatrixError> {
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        if data.len() != n * n {
            return Err(MatrixError::NotSquare {
                row: data.len() / n,
                len: data.len() % n,
                n,
            });
        }
        if let Some(pos) = data.iter().position(|w| *w < T::zero()) {
            return Err(MatrixError::Negative {
                row: pos / n,
                col: pos % n,
            });
        }
        Ok(CostMatrix { n, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(MatrixError::NotSquare { row, len: r.len(), n });
            }
            data.extend(r);
        }
        CostMatrix::new(n, data)
    }

    /// Trusted constructor for callers that build valid matrices themselves.
    pub(crate) fn from_raw(n: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        CostMatrix { n, data }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.n + col]
    }

    pub fn into_raw(self) -> Vec<T> {
        self.data
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment<T> {
    pub cost: T,
    /// `row_to_col[x]` is the column assigned to row `x`.
    pub row_to_col: Vec<usize>,
}

impl<T> Assignment<T> {
    pub fn col_to_row(&self) -> Vec<usize> {
        let mut inv = vec![0; self.row_to_col.len()];
        for (x, &y) in self.row_to_col.iter().enumerate() {
            inv[y] = x;
        }
        inv
    }
}

/// Minimum-cost perfect matching. Among optimal assignments, the
/// lexicographically smallest `row_to_col` vector is returned.
pub fn min_cost_perfect_matching<T: Cost>(m: &CostMatrix<T>) -> Assignment<T> {
    let n = m.n;
    let (u, v, row_to_col) = hungarian(m);
    let row_to_col = lexicographic_optimum(m, &u, &v, row_to_col);
    let cost = row_to_col
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (x, &y)| acc + m.get(x, y));
    debug_assert_eq!(row_to_col.len(), n);
    Assignment { cost, row_to_col }
}

/// Returns row potentials, column potentials and an optimal assignment.
fn hungarian<T: Cost>(m: &CostMatrix<T>) -> (Vec<T>, Vec<T>, Vec<usize>) {
    let n = m.n;
    // 1-based internally; index 0 is the virtual source row/column.
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut p = vec![0usize; n + 1]; // column -> row
    let mut way = vec![0usize; n + 1];

    // Warm start: reduce rows then columns, and greedily take tight edges.
    for i in 1..=n {
        let row = &m.data[(i - 1) * n..i * n];
        u[i] = *row.iter().min().expect("n >= 1");
    }
    for j in 1..=n {
        v[j] = (1..=n)
            .map(|i| m.data[(i - 1) * n + j - 1] - u[i])
            .min()
            .expect("n >= 1");
    }
    let mut row_done = vec![false; n + 1];
    for i in 1..=n {
        for j in 1..=n {
            if p[j] == 0 && m.data[(i - 1) * n + j - 1] - u[i] - v[j] == T::zero() {
                p[j] = i;
                row_done[i] = true;
                break;
            }
        }
    }

    let mut minv: Vec<Option<T>> = vec![None; n + 1];
    let mut used = vec![false; n + 1];
    for i in 1..=n {
        if row_done[i] {
            continue;
        }
        p[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|x| *x = None);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let row = &m.data[(i0 - 1) * n..i0 * n];
            let mut delta: Option<T> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if minv[j].is_none_or(|mv| cur < mv) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].expect("just set");
                if delta.is_none_or(|d| mj < d) {
                    delta = Some(mj);
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column always remains");
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else if let Some(mv) = minv[j] {
                    minv[j] = Some(mv - delta);
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    (u[1..].to_vec(), v[1..].to_vec(), row_to_col)
}

/// Rewrites an optimal assignment into the lexicographically smallest one.
///
/// Every optimal assignment is a perfect matching of the equality subgraph
/// `{(x, y) : w[x][y] = u[x] + v[y]}` of optimal potentials. Rows are fixed
/// in order; for each candidate column the current matching is rerouted along
/// an alternating path through unfixed rows.
fn lexicographic_optimum<T: Cost>(m: &CostMatrix<T>, u: &[T], v: &[T], mut row_to_col: Vec<usize>) -> Vec<usize> {
    let n = m.n;
    let tight: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&y| m.get(x, y) - u[x] - v[y] == T::zero()).collect())
        .collect();
    let mut col_to_row = vec![0usize; n];
    for (x, &y) in row_to_col.iter().enumerate() {
        col_to_row[y] = x;
    }
    let mut col_fixed = vec![false; n];
    let mut seen_stamp = vec![0u32; n];
    let mut stamp = 0u32;
    let mut from = vec![usize::MAX; n];
    let mut queue = VecDeque::new();

    for x in 0..n {
        let current = row_to_col[x];
        for &y in &tight[x] {
            if col_fixed[y] {
                continue;
            }
            if y == current {
                break;
            }
            // Give y to x. Its row r must then reach the column x frees.
            let r = col_to_row[y];
            stamp += 1;
            queue.clear();
            queue.push_back(r);
            seen_stamp[y] = stamp;
            let mut found = None;
            'bfs: while let Some(row) = queue.pop_front() {
                for &c in &tight[row] {
                    if col_fixed[c] || seen_stamp[c] == stamp {
                        continue;
                    }
                    seen_stamp[c] = stamp;
                    from[c] = row;
                    if c == current {
                        found = Some(c);
                        break 'bfs;
                    }
                    queue.push_back(col_to_row[c]);
                }
            }
            if let Some(mut c) = found {
                // Walk back: each row on the path takes the column it reached.
                loop {
                    let row = from[c];
                    let prev = row_to_col[row];
                    row_to_col[row] = c;
                    col_to_row[c] = row;
                    if row == r {
                        break;
                    }
                    c = prev;
                }
                row_to_col[x] = y;
                col_to_row[y] = x;
                break;
            }
        }
        col_fixed[row_to_col[x]] = true;
    }
    row_to_col
}

/// Parses whitespace-separated non-negative integers, one matrix row per
/// non-blank line (`#` comments allowed).
pub fn parse_cost_matrix(text: &str) -> Result<CostMatrix<i64>, ParseError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>().map_err(|e| ParseError::Matrix {
                    line: i + 1,
                    msg: format!("{t:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((i + 1, row));
    }
    let n = rows.len();
    for (line, r) in &rows {
        if r.len() != n {
            return Err(ParseError::Matrix {
                line: *line,
                msg: format!("expected {n} entries, found {}", r.len()),
            });
        }
        if let Some(w) = r.iter().find(|w| **w < 0) {
            return Err(ParseError::Matrix {
                line: *line,
                msg: format!("negative entry {w}"),
            });
        }
    }
    if n == 0 {
        return Err(ParseError::Matrix {
            line: 0,
            msg: "empty matrix".into(),
        });
    }
    Ok(CostMatrix::from_raw(n, rows.into_iter().flat_map(|(_, r)| r).collect()))
}
