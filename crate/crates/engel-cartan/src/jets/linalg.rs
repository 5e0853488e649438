//! Linear solves whose entries are jets.
//!
//! Gauss-Jordan elimination works over the jet ring because a jet is
//! invertible exactly when its value at the base point is nonzero. Pivoting
//! therefore selects the largest value at the base point.

use super::Jet;
use crate::error::{Error, Result};

/// Invert a square matrix of jets sharing one order and base point. Fails
/// with [`Error::SingularMatrix`] when no pivot of magnitude above
/// `threshold` is available in some column.
pub fn invert_matrix(a: &[Vec<Jet>], threshold: f64) -> Result<Vec<Vec<Jet>>> {
    let n = a.len();
    let order = a[0][0].order();
    let base = a[0][0].base_point();
    let mut aug: Vec<Vec<Jet>> = a.to_vec();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Jet::constant(if i == j { 1.0 } else { 0.0 }, order, base))
                .collect()
        })
        .collect();

    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, aug[r][col].value().abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("square matrix has rows");
        if pivot <= threshold {
            return Err(Error::SingularMatrix);
        }
        aug.swap(col, pivot_row);
        inv.swap(col, pivot_row);

        let scale = aug[col][col].invert()?;
        for entry in aug[col].iter_mut() {
            *entry = entry.mul(&scale)?;
        }
        for entry in inv[col].iter_mut() {
            *entry = entry.mul(&scale)?;
        }

        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = aug[row][col].clone();
            if factor.norm() == 0.0 {
                continue;
            }
            for c in 0..n {
                let t = factor.mul(&aug[col][c])?;
                aug[row][c] = aug[row][c].sub(&t)?;
                let t = factor.mul(&inv[col][c])?;
                inv[row][c] = inv[row][c].sub(&t)?;
            }
        }
    }
    Ok(inv)
}

/// Determinant of a 4x4 matrix of plain numbers, by cofactor expansion.
pub fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let det3 = |a: [[f64; 3]; 3]| -> f64 {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let minor = |skip: usize| -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (r, row) in m[1..].iter().enumerate() {
            let mut c_out = 0;
            for (c, &v) in row.iter().enumerate() {
                if c == skip {
                    continue;
                }
                out[r][c_out] = v;
                c_out += 1;
            }
        }
        out
    };
    let mut acc = 0.0;
    for c in 0..4 {
        let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * m[0][c] * det3(minor(c));
    }
    acc
}
