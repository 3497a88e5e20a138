//! Maximum-weight one-to-one assignment.
//!
//! [`hungarian`] runs the O(n³) shortest-augmenting-path method on a square
//! padded matrix; [`exhaustive`] enumerates every injective partial matching
//! and is meant for tiny instances (≤ 6 per side) where its deterministic
//! tie-breaking matters.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Neg, Sub};

/// An ordered additive group: totals are compared with `partial_cmp`.
pub trait Weight: Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {
    const ZERO: Self;
}

impl Weight for f64 {
    const ZERO: Self = 0.0;
}

impl Weight for i64 {
    const ZERO: Self = 0;
}

/// Lexicographic pair: `primary` decides, `secondary` breaks ties.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lex {
    pub primary: f64,
    pub secondary: i64,
}

impl PartialOrd for Lex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.primary.partial_cmp(&other.primary)? {
            Ordering::Equal => Some(self.secondary.cmp(&other.secondary)),
            o => Some(o),
        }
    }
}

impl Add for Lex {
    type Output = Lex;
    fn add(self, o: Lex) -> Lex {
        Lex { primary: self.primary + o.primary, secondary: self.secondary + o.secondary }
    }
}

impl Sub for Lex {
    type Output = Lex;
    fn sub(self, o: Lex) -> Lex {
        Lex { primary: self.primary - o.primary, secondary: self.secondary - o.secondary }
    }
}

impl Neg for Lex {
    type Output = Lex;
    fn neg(self) -> Lex {
        Lex { primary: -self.primary, secondary: -self.secondary }
    }
}

impl Weight for Lex {
    const ZERO: Self = Lex { primary: 0.0, secondary: 0 };
}

fn lt<W: Weight>(a: W, b: W) -> bool {
    a.partial_cmp(&b) == Some(Ordering::Less)
}

/// Maximum-weight assignment of `rows × cols` with `weight(r, c)`.
///
/// Returns the pairs whose weight is strictly positive; pairs with weight
/// `<= 0` are never reported, so a non-positive entry behaves like
/// "forbidden". Every row and column may stay unmatched.
pub fn hungarian<W: Weight>(rows: usize, cols: usize, weight: impl Fn(usize, usize) -> W) -> Vec<(usize, usize)> {
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    // Square matrix of size rows + cols: row r may take a dummy column
    // cols + r, column c a dummy row rows + c, both with value zero.
    let n = rows + cols;
    let cost = |i: usize, j: usize| -> W {
        if i < rows && j < cols {
            let w = weight(i, j);
            if lt(W::ZERO, w) {
                -w
            } else {
                W::ZERO
            }
        } else {
            W::ZERO
        }
    };
    // 1-based potentials, e-maxx formulation
    let mut u = vec![W::ZERO; n + 1];
    let mut v = vec![W::ZERO; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<W>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<W> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if minv[j].is_none_or(|m| lt(cur, m)) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let m = minv[j].expect("set above");
                if delta.is_none_or(|d| lt(m, d)) {
                    delta = Some(m);
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column remains");
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else if let Some(m) = minv[j] {
                    minv[j] = Some(m - delta);
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
    let mut pairs: Vec<(usize, usize)> = (1..=n)
        .filter_map(|j| {
            let i = p[j];
            (i >= 1 && i <= rows && j <= cols && lt(W::ZERO, weight(i - 1, j - 1))).then_some((i - 1, j - 1))
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Enumerates every injective matching over positive-weight pairs and
/// returns the best. Among equal totals the first one found wins; rows are
/// visited in order and each row tries columns in order before staying
/// unmatched, so earlier rows get the earliest columns.
pub fn exhaustive<W: Weight>(rows: usize, cols: usize, weight: impl Fn(usize, usize) -> W) -> Vec<(usize, usize)> {
    struct Search<'a, W> {
        rows: usize,
        cols: usize,
        weight: &'a dyn Fn(usize, usize) -> W,
        used: Vec<bool>,
        current: Vec<(usize, usize)>,
        best: Vec<(usize, usize)>,
        best_total: Option<W>,
    }
    impl<W: Weight> Search<'_, W> {
        fn go(&mut self, row: usize, total: W) {
            if row == self.rows {
                if self.best_total.is_none_or(|b| lt(b, total)) {
                    self.best_total = Some(total);
                    self.best = self.current.clone();
                }
                return;
            }
            for c in 0..self.cols {
                if self.used[c] {
                    continue;
                }
                let w = (self.weight)(row, c);
                if !lt(W::ZERO, w) {
                    continue;
                }
                self.used[c] = true;
                self.current.push((row, c));
                self.go(row + 1, total + w);
                self.current.pop();
                self.used[c] = false;
            }
            self.go(row + 1, total);
        }
    }
    let mut search = Search {
        rows,
        cols,
        weight: &weight,
        used: vec![false; cols],
        current: Vec::new(),
        best: Vec::new(),
        best_total: None,
    };
    search.go(0, W::ZERO);
    search.best
}

/// Sum of weights over `pairs`.
pub fn total<W: Weight>(pairs: &[(usize, usize)], weight: impl Fn(usize, usize) -> W) -> W {
    pairs.iter().fold(W::ZERO, |acc, &(r, c)| acc + weight(r, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_inputs() {
        assert!(hungarian(0, 3, |_, _| 1.0).is_empty());
        assert!(exhaustive(2, 0, |_, _| 1.0).is_empty());
    }

    #[test]
    fn classic_matrix() {
        let m = [[7.0, 5.0, 11.0], [5.0, 4.0, 1.0], [9.0, 3.0, 2.0]];
        let h = hungarian(3, 3, |i, j| m[i][j]);
        let e = exhaustive(3, 3, |i, j| m[i][j]);
        assert_eq!(total(&h, |i, j| m[i][j]), 24.0);
        assert_eq!(total(&e, |i, j| m[i][j]), 24.0);
    }

    #[test]
    fn forbidden_pairs_stay_unmatched() {
        let m = [[0.0, 0.0], [0.0, 3.0]];
        assert_eq!(hungarian(2, 2, |i, j| m[i][j]), [(1, 1)]);
        assert_eq!(exhaustive(2, 2, |i, j| m[i][j]), [(1, 1)]);
    }

    #[test]
    fn rectangular() {
        let m = [[1.0, 2.0, 3.0]];
        assert_eq!(hungarian(1, 3, |i, j| m[i][j]), [(0, 2)]);
        let t = [[1.0], [5.0], [2.0]];
        assert_eq!(hungarian(3, 1, |i, j| t[i][j]), [(1, 0)]);
    }

    #[test]
    fn lexicographic_secondary_breaks_ties() {
        // equal primary weights, prefer the smaller distance
        let w = |i: usize, j: usize| Lex { primary: 1.0, secondary: -((i as i64 - j as i64).abs()) };
        assert_eq!(hungarian(2, 2, w), [(0, 0), (1, 1)]);
        assert_eq!(exhaustive(2, 2, w), [(0, 0), (1, 1)]);
    }

    #[test]
    fn exhaustive_prefers_earliest_rows_on_ties() {
        assert_eq!(exhaustive(2, 1, |_, _| 1.0), [(0, 0)]);
    }
}
