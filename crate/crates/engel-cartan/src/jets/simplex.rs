//! Index bookkeeping for dense truncated Taylor data in four variables.
//!
//! Coefficients live on the simplex of multi-indices of total degree at most
//! `order`, stored in graded lexicographic order: degree 0 first, then degree
//! 1, and so on, ties within a degree broken lexicographically with the first
//! variable most significant. Tables of ranks and product/derivative plans are
//! built once per order and shared.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub const VARS: usize = 4;

pub type MultiIndex = [u8; VARS];

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - k + 1 + i) / (i + 1);
    }
    acc
}

/// Number of 4-variable monomials of total degree <= `order`.
pub fn simplex_size(order: usize) -> usize {
    binomial(order + VARS, VARS)
}

pub struct SimplexTable {
    pub order: usize,
    pub indices: Vec<MultiIndex>,
    rank: HashMap<MultiIndex, u32>,
    /// (rank a, rank b, rank a+b) for every ordered pair with |a| + |b| <= order.
    mul_plan: Vec<(u32, u32, u32)>,
    /// (src, dst, exponent) per axis: d/dx_axis maps src to dst with the stated factor.
    diff_plan: [Vec<(u32, u32, f64)>; VARS],
    /// (src, dst, 1/(exponent+1)) per axis; sources of top degree are dropped.
    int_plan: [Vec<(u32, u32, f64)>; VARS],
}

impl SimplexTable {
    fn build(order: usize) -> SimplexTable {
        let mut indices = Vec::with_capacity(simplex_size(order));
        for d in 0..=order as u32 {
            for i0 in (0..=d).rev() {
                for i1 in (0..=d - i0).rev() {
                    for i2 in (0..=d - i0 - i1).rev() {
                        let i3 = d - i0 - i1 - i2;
                        indices.push([i0 as u8, i1 as u8, i2 as u8, i3 as u8]);
                    }
                }
            }
        }
        let rank: HashMap<MultiIndex, u32> = indices
            .iter()
            .enumerate()
            .map(|(r, &m)| (m, r as u32))
            .collect();

        let degree = |m: &MultiIndex| m.iter().map(|&e| e as usize).sum::<usize>();
        let mut mul_plan = Vec::new();
        for (ra, a) in indices.iter().enumerate() {
            let da = degree(a);
            for (rb, b) in indices.iter().enumerate() {
                if da + degree(b) > order {
                    continue;
                }
                let sum = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                mul_plan.push((ra as u32, rb as u32, rank[&sum]));
            }
        }

        let mut diff_plan: [Vec<(u32, u32, f64)>; VARS] = Default::default();
        let mut int_plan: [Vec<(u32, u32, f64)>; VARS] = Default::default();
        for axis in 0..VARS {
            for (r, m) in indices.iter().enumerate() {
                if m[axis] > 0 {
                    let mut lower = *m;
                    lower[axis] -= 1;
                    diff_plan[axis].push((r as u32, rank[&lower], m[axis] as f64));
                }
                if degree(m) < order {
                    let mut upper = *m;
                    upper[axis] += 1;
                    int_plan[axis].push((r as u32, rank[&upper], 1.0 / (m[axis] as f64 + 1.0)));
                }
            }
        }

        SimplexTable {
            order,
            indices,
            rank,
            mul_plan,
            diff_plan,
            int_plan,
        }
    }

    pub fn rank_of(&self, m: &MultiIndex) -> u32 {
        self.rank[m]
    }

    pub fn try_rank_of(&self, m: &MultiIndex) -> Option<u32> {
        self.rank.get(m).copied()
    }

    pub fn multiply_into(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        for &(ra, rb, rc) in &self.mul_plan {
            out[rc as usize] += a[ra as usize] * b[rb as usize];
        }
    }

    pub fn differentiate(&self, axis: usize, a: &[f64], out: &mut [f64]) {
        for &(src, dst, factor) in &self.diff_plan[axis] {
            out[dst as usize] += factor * a[src as usize];
        }
    }

    pub fn integrate(&self, axis: usize, a: &[f64], out: &mut [f64]) {
        for &(src, dst, factor) in &self.int_plan[axis] {
            out[dst as usize] += factor * a[src as usize];
        }
    }
}

static TABLES: OnceLock<Mutex<HashMap<usize, Arc<SimplexTable>>>> = OnceLock::new();

pub fn table(order: usize) -> Arc<SimplexTable> {
    let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = tables.lock().expect("simplex table lock poisoned");
    guard
        .entry(order)
        .or_insert_with(|| Arc::new(SimplexTable::build(order)))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_binomial_counts() {
        assert_eq!(simplex_size(0), 1);
        assert_eq!(simplex_size(1), 5);
        assert_eq!(simplex_size(2), 15);
        assert_eq!(simplex_size(6), 210);
    }

    #[test]
    fn ranks_are_consistent_with_enumeration() {
        let t = table(5);
        assert_eq!(t.indices.len(), simplex_size(5));
        for (r, m) in t.indices.iter().enumerate() {
            assert_eq!(t.rank_of(m) as usize, r);
        }
        assert_eq!(t.indices[0], [0, 0, 0, 0]);
        assert_eq!(t.indices[1], [1, 0, 0, 0]);
        assert_eq!(t.indices[4], [0, 0, 0, 1]);
        assert_eq!(t.indices[5], [2, 0, 0, 0]);
    }

    #[test]
    fn degrees_are_nondecreasing() {
        let t = table(7);
        let deg = |m: &MultiIndex| m.iter().map(|&e| e as u32).sum::<u32>();
        for w in t.indices.windows(2) {
            assert!(deg(&w[0]) <= deg(&w[1]));
        }
    }
}
