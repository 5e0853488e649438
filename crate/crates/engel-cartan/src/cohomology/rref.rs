//! Row reduction over exact rationals. Matrices are dense row vectors;
//! everything here is exact, so ranks and kernels carry no thresholds.

use num_rational::BigRational;
use num_traits::Zero;

/// Reduces `rows` to reduced row echelon form in place and returns the
/// pivot column indices in order.
pub(crate) fn rref(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = if nrows == 0 { 0 } else { rows[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let delta = &f * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    pivots
}

pub(crate) fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut work = rows.to_vec();
    rref(&mut work).len()
}

/// Basis of the right kernel of the matrix, one vector per free column.
pub(crate) fn kernel(rows: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let ncols = if rows.is_empty() { 0 } else { rows[0].len() };
    let mut work = rows.to_vec();
    let pivots = rref(&mut work);
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); ncols];
        v[free] = BigRational::from_integer(1.into());
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -work[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Row-space basis: the nonzero rows of the reduced form.
pub(crate) fn row_space(rows: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let mut work = rows.to_vec();
    let pivots = rref(&mut work);
    work.truncate(pivots.len());
    work
}
