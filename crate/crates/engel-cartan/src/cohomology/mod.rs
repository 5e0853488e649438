//! Exact-rational cochain complex of the flat model's graded symmetry
//! algebra.
//!
//! The algebra is five-dimensional with basis (V_0, V_x, V_y, V_2, V_3),
//! weights (0, 1, 1, 2, 3). Cochains take legs in the weighted part
//! (V_x, V_y, V_2, V_3) and values anywhere; the homogeneity of a slot is
//! the sum of its leg weights minus its target weight. The scaling action
//! here is [V_0, V_j] = -|j| V_j, and the differential is
//!
//!   (d psi)(X, Y)    = [X, psi(Y)] - [Y, psi(X)] - psi([X, Y])
//!   (d Phi)(X, Y, Z) = sum over cyclic ([X, Phi(Y, Z)] - Phi([X, Y], Z))
//!
//! Every rank, kernel and span below is computed over BigRational, so the
//! dimension counts are exact. Floats appear only at the classification
//! entry point, which splits a measured curvature cochain against the
//! exact bases.

mod rref;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::cartan::{CurvatureTable, SLOT_NAMES};
use crate::error::{Error, Result};

const DIM: usize = 5;
const WEIGHTS: [i32; DIM] = [0, 1, 1, 2, 3];

/// Leg pairs in lexicographic order; legs index (V_x, V_y, V_2, V_3) as 1..=4.
pub const PAIRS: [(usize, usize); 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
/// Leg triples in lexicographic order.
pub const TRIPLES: [(usize, usize, usize); 4] = [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)];

pub const C1_DIM: usize = 20;
pub const C2_DIM: usize = 30;
pub const C3_DIM: usize = 20;

/// Homogeneities that occur in degree two.
pub const HOMOGENEITY_RANGE: std::ops::RangeInclusive<i32> = -1..=5;

fn qi(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

/// Structure constants of the graded algebra. `bracket(i, j)` returns the
/// coefficients of [V_i, V_j] in the basis (V_0, V_x, V_y, V_2, V_3).
/// Nonzero brackets: [V_x, V_y] = V_2, [V_x, V_2] = V_3,
/// [V_0, V_j] = -|j| V_j.
pub struct GradedAlgebra {
    table: [[[i64; DIM]; DIM]; DIM],
}

impl GradedAlgebra {
    pub fn new() -> Self {
        let mut t = [[[0i64; DIM]; DIM]; DIM];
        t[1][2][3] = 1;
        t[2][1][3] = -1;
        t[1][3][4] = 1;
        t[3][1][4] = -1;
        for j in 1..DIM {
            t[0][j][j] = -i64::from(WEIGHTS[j]);
            t[j][0][j] = i64::from(WEIGHTS[j]);
        }
        GradedAlgebra { table: t }
    }

    pub fn bracket(&self, i: usize, j: usize) -> [i64; DIM] {
        self.table[i][j]
    }

    pub fn weight(&self, i: usize) -> i32 {
        WEIGHTS[i]
    }

    /// Largest absolute Jacobi sum over all basis triples; zero for a Lie
    /// algebra.
    pub fn jacobi_defect(&self) -> i64 {
        let mut worst = 0;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    let mut acc = [0i64; DIM];
                    for &(a, b, c) in &[(i, j, k), (j, k, i), (k, i, j)] {
                        let inner = self.table[b][c];
                        for (m, &w) in inner.iter().enumerate() {
                            if w != 0 {
                                for s in 0..DIM {
                                    acc[s] += w * self.table[a][m][s];
                                }
                            }
                        }
                    }
                    worst = worst.max(acc.iter().map(|v| v.abs()).max().unwrap());
                }
            }
        }
        worst
    }
}

impl Default for GradedAlgebra {
    fn default() -> Self {
        Self::new()
    }
}

/// Position and orientation of the ordered pair (a, b) among `PAIRS`.
pub fn pair_index(a: usize, b: usize) -> Option<(usize, i64)> {
    if a == b || !(1..DIM).contains(&a) || !(1..DIM).contains(&b) {
        return None;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1) } else { (b, a, -1) };
    PAIRS.iter().position(|&p| p == (lo, hi)).map(|i| (i, sign))
}

pub fn c1_homogeneity(slot: usize) -> i32 {
    WEIGHTS[slot / DIM + 1] - WEIGHTS[slot % DIM]
}

pub fn c2_homogeneity(slot: usize) -> i32 {
    let (a, b) = PAIRS[slot / DIM];
    WEIGHTS[a] + WEIGHTS[b] - WEIGHTS[slot % DIM]
}

pub fn c3_homogeneity(slot: usize) -> i32 {
    let (a, b, c) = TRIPLES[slot / DIM];
    WEIGHTS[a] + WEIGHTS[b] + WEIGHTS[c] - WEIGHTS[slot % DIM]
}

pub fn c2_slot_name(slot: usize) -> String {
    let (a, b) = PAIRS[slot / DIM];
    format!(
        "phi^{}_{{{}{}}}",
        SLOT_NAMES[slot % DIM],
        SLOT_NAMES[a],
        SLOT_NAMES[b]
    )
}

macro_rules! cochain {
    ($name:ident, $len:expr) => {
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            coords: Vec<BigRational>,
        }

        impl $name {
            pub fn zero() -> Self {
                $name {
                    coords: vec![BigRational::zero(); $len],
                }
            }

            pub fn basis(slot: usize) -> Self {
                let mut c = Self::zero();
                c.coords[slot] = qi(1);
                c
            }

            pub fn from_coords(coords: Vec<BigRational>) -> Self {
                assert_eq!(coords.len(), $len);
                $name { coords }
            }

            pub fn coords(&self) -> &[BigRational] {
                &self.coords
            }

            pub fn get(&self, slot: usize) -> &BigRational {
                &self.coords[slot]
            }

            pub fn set(&mut self, slot: usize, value: BigRational) {
                self.coords[slot] = value;
            }

            pub fn is_zero(&self) -> bool {
                self.coords.iter().all(|c| c.is_zero())
            }
        }
    };
}

cochain!(Cochain1, C1_DIM);
cochain!(Cochain2, C2_DIM);
cochain!(Cochain3, C3_DIM);

impl Cochain1 {
    /// Value on leg `a` (1..=4), as coefficients over the full basis.
    fn value_on(&self, a: usize) -> [BigRational; DIM] {
        core::array::from_fn(|t| self.coords[(a - 1) * DIM + t].clone())
    }

    pub fn coboundary(&self, algebra: &GradedAlgebra) -> Cochain2 {
        let mut out = Cochain2::zero();
        for (pi, &(a, b)) in PAIRS.iter().enumerate() {
            let va = self.value_on(a);
            let vb = self.value_on(b);
            let mut acc: [BigRational; DIM] = core::array::from_fn(|_| BigRational::zero());
            for t in 0..DIM {
                if !vb[t].is_zero() {
                    let br = algebra.bracket(a, t);
                    for s in 0..DIM {
                        if br[s] != 0 {
                            acc[s] += qi(br[s]) * &vb[t];
                        }
                    }
                }
                if !va[t].is_zero() {
                    let br = algebra.bracket(b, t);
                    for s in 0..DIM {
                        if br[s] != 0 {
                            acc[s] -= qi(br[s]) * &va[t];
                        }
                    }
                }
            }
            let br_ab = algebra.bracket(a, b);
            for c in 1..DIM {
                if br_ab[c] != 0 {
                    let vc = self.value_on(c);
                    for t in 0..DIM {
                        acc[t] -= qi(br_ab[c]) * &vc[t];
                    }
                }
            }
            for (t, v) in acc.into_iter().enumerate() {
                out.coords[pi * DIM + t] = v;
            }
        }
        out
    }
}

impl Cochain2 {
    /// Signed component on the ordered legs (a, b); zero when a == b.
    pub fn component(&self, target: usize, a: usize, b: usize) -> BigRational {
        match pair_index(a, b) {
            Some((pi, sign)) => qi(sign) * &self.coords[pi * DIM + target],
            None => BigRational::zero(),
        }
    }

    /// Restriction to one homogeneity.
    pub fn homogeneity_part(&self, homogeneity: i32) -> Cochain2 {
        let mut out = Cochain2::zero();
        for (slot, v) in self.coords.iter().enumerate() {
            if c2_homogeneity(slot) == homogeneity {
                out.coords[slot] = v.clone();
            }
        }
        out
    }

    pub fn coboundary(&self, algebra: &GradedAlgebra) -> Cochain3 {
        let mut out = Cochain3::zero();
        for (ti, &(x, y, z)) in TRIPLES.iter().enumerate() {
            let mut acc: [BigRational; DIM] = core::array::from_fn(|_| BigRational::zero());
            for &(a, b, c) in &[(x, y, z), (y, z, x), (z, x, y)] {
                for t in 0..DIM {
                    let comp = self.component(t, b, c);
                    if !comp.is_zero() {
                        let br = algebra.bracket(a, t);
                        for s in 0..DIM {
                            if br[s] != 0 {
                                acc[s] += qi(br[s]) * &comp;
                            }
                        }
                    }
                }
                let br_ab = algebra.bracket(a, b);
                for m in 1..DIM {
                    if br_ab[m] != 0 {
                        for t in 0..DIM {
                            let comp = self.component(t, m, c);
                            if !comp.is_zero() {
                                acc[t] -= qi(br_ab[m]) * &comp;
                            }
                        }
                    }
                }
            }
            for (t, v) in acc.into_iter().enumerate() {
                out.coords[ti * DIM + t] = v;
            }
        }
        out
    }
}

impl fmt::Display for Cochain2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (slot, v) in self.coords.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            if v == &qi(1) {
                write!(f, "{}", c2_slot_name(slot))?;
            } else {
                write!(f, "({}) {}", v, c2_slot_name(slot))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn c2_slots_of_homogeneity(homogeneity: i32) -> Vec<usize> {
    (0..C2_DIM)
        .filter(|&s| c2_homogeneity(s) == homogeneity)
        .collect()
}

/// A set of exact 2-cochains spanning a graded subspace.
pub struct SpaceBasis {
    pub dimension: usize,
    pub by_homogeneity: BTreeMap<i32, Vec<Cochain2>>,
}

impl SpaceBasis {
    pub fn basis(&self) -> Vec<&Cochain2> {
        self.by_homogeneity.values().flatten().collect()
    }

    pub fn dimension_at(&self, homogeneity: i32) -> usize {
        self.by_homogeneity
            .get(&homogeneity)
            .map_or(0, |v| v.len())
    }
}

fn embed(slots: &[usize], coords: &[BigRational]) -> Cochain2 {
    let mut c = Cochain2::zero();
    for (&slot, v) in slots.iter().zip(coords) {
        c.coords[slot] = v.clone();
    }
    c
}

fn collect_space<F>(homogeneity: Option<i32>, mut block: F) -> SpaceBasis
where
    F: FnMut(i32, &[usize]) -> Vec<Cochain2>,
{
    let mut by_homogeneity = BTreeMap::new();
    let mut dimension = 0;
    for h in HOMOGENEITY_RANGE {
        if homogeneity.is_some_and(|want| want != h) {
            continue;
        }
        let slots = c2_slots_of_homogeneity(h);
        if slots.is_empty() {
            continue;
        }
        let basis = block(h, &slots);
        if !basis.is_empty() {
            dimension += basis.len();
            by_homogeneity.insert(h, basis);
        }
    }
    SpaceBasis {
        dimension,
        by_homogeneity,
    }
}

/// Kernel of the degree-two differential, per homogeneity. The grading is
/// preserved by the differential, so each block is solved on its own slots.
pub fn cocycle_space(algebra: &GradedAlgebra, homogeneity: Option<i32>) -> SpaceBasis {
    collect_space(homogeneity, |h, slots| {
        let out_slots: Vec<usize> = (0..C3_DIM).filter(|&s| c3_homogeneity(s) == h).collect();
        let mut rows = vec![vec![BigRational::zero(); slots.len()]; out_slots.len()];
        for (col, &slot) in slots.iter().enumerate() {
            let image = Cochain2::basis(slot).coboundary(algebra);
            for (row, &os) in out_slots.iter().enumerate() {
                rows[row][col] = image.coords[os].clone();
            }
        }
        if out_slots.is_empty() {
            return slots.iter().map(|&s| Cochain2::basis(s)).collect();
        }
        rref::kernel(&rows)
            .into_iter()
            .map(|v| embed(slots, &v))
            .collect()
    })
}

/// Image of the degree-one differential, per homogeneity, in reduced form.
pub fn coboundary_space(algebra: &GradedAlgebra, homogeneity: Option<i32>) -> SpaceBasis {
    collect_space(homogeneity, |h, slots| {
        let mut rows = Vec::new();
        for slot in 0..C1_DIM {
            if c1_homogeneity(slot) != h {
                continue;
            }
            let image = Cochain1::basis(slot).coboundary(algebra);
            rows.push(slots.iter().map(|&s| image.coords[s].clone()).collect());
        }
        rref::row_space(&rows)
            .into_iter()
            .map(|v| embed(slots, &v))
            .collect()
    })
}

/// One pinned cohomology representative.
#[derive(Clone)]
pub struct Representative {
    pub homogeneity: i32,
    pub label: String,
    pub cochain: Cochain2,
}

fn slot_of(target: usize, a: usize, b: usize) -> usize {
    let (pi, sign) = pair_index(a, b).unwrap();
    assert_eq!(sign, 1);
    pi * DIM + target
}

/// The four pinned representatives spanning degree-two cohomology: three of
/// homogeneity two, one of homogeneity three. Their order matches the four
/// essential curvature invariants (R^x_{y2}, R^2_{x3}, R^y_{y2}, R^y_{x3}).
pub fn representatives() -> Vec<Representative> {
    let single = |target: usize, a: usize, b: usize| Cochain2::basis(slot_of(target, a, b));
    let mut sum = single(2, 2, 3);
    sum.coords[slot_of(3, 2, 4)] = qi(1);
    sum.coords[slot_of(4, 3, 4)] = qi(1);
    let items = [
        (2, single(1, 2, 3)),
        (2, single(3, 1, 4)),
        (2, sum),
        (3, single(2, 1, 4)),
    ];
    items
        .into_iter()
        .map(|(homogeneity, cochain)| Representative {
            homogeneity,
            label: cochain.to_string(),
            cochain,
        })
        .collect()
}

/// Dimension counts and pinned representatives for the degree-two complex.
#[derive(Clone)]
pub struct CohomologyReport {
    pub c2_dimension: usize,
    pub cocycle_dimension: usize,
    pub coboundary_dimension: usize,
    pub h2_dimension: usize,
    pub c2_by_homogeneity: BTreeMap<i32, usize>,
    pub cocycles_by_homogeneity: BTreeMap<i32, usize>,
    pub coboundaries_by_homogeneity: BTreeMap<i32, usize>,
    pub h2_by_homogeneity: BTreeMap<i32, usize>,
    /// Homogeneities with slots but no cocycles at all.
    pub injective_homogeneities: Vec<i32>,
    pub representative_labels: Vec<(i32, String)>,
    pub convention: &'static str,
}

pub fn cohomology_report(algebra: &GradedAlgebra) -> CohomologyReport {
    let cocycles = cocycle_space(algebra, None);
    let coboundaries = coboundary_space(algebra, None);
    let mut c2_by_homogeneity = BTreeMap::new();
    for slot in 0..C2_DIM {
        *c2_by_homogeneity.entry(c2_homogeneity(slot)).or_insert(0) += 1;
    }
    let mut h2_by_homogeneity = BTreeMap::new();
    let mut injective_homogeneities = Vec::new();
    for (&h, &n) in &c2_by_homogeneity {
        let z = cocycles.dimension_at(h);
        let b = coboundaries.dimension_at(h);
        if z > b {
            h2_by_homogeneity.insert(h, z - b);
        }
        if n > 0 && z == 0 {
            injective_homogeneities.push(h);
        }
    }
    let cocycles_by_homogeneity = cocycles
        .by_homogeneity
        .iter()
        .map(|(&h, v)| (h, v.len()))
        .collect();
    let coboundaries_by_homogeneity = coboundaries
        .by_homogeneity
        .iter()
        .map(|(&h, v)| (h, v.len()))
        .collect();
    CohomologyReport {
        c2_dimension: C2_DIM,
        cocycle_dimension: cocycles.dimension,
        coboundary_dimension: coboundaries.dimension,
        h2_dimension: cocycles.dimension - coboundaries.dimension,
        c2_by_homogeneity,
        cocycles_by_homogeneity,
        coboundaries_by_homogeneity,
        h2_by_homogeneity,
        injective_homogeneities,
        representative_labels: representatives()
            .into_iter()
            .map(|r| (r.homogeneity, r.label))
            .collect(),
        convention: "[V_0, V_j] = -|j| V_j; d psi(X,Y) = [X, psi(Y)] - [Y, psi(X)] - psi([X,Y])",
    }
}

impl fmt::Display for CohomologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "degree-two cochains {}, cocycles {}, coboundaries {}, cohomology {}",
            self.c2_dimension,
            self.cocycle_dimension,
            self.coboundary_dimension,
            self.h2_dimension
        )?;
        for (h, n) in &self.h2_by_homogeneity {
            writeln!(f, "  homogeneity {h}: dimension {n}")?;
        }
        for (h, label) in &self.representative_labels {
            writeln!(f, "  representative ({h}): {label}")?;
        }
        write!(f, "convention: {}", self.convention)
    }
}

/// Split of a measured homogeneous 2-cochain into a coboundary part, a part
/// along the pinned representatives, and a remainder off the cocycle space.
pub struct Classification {
    pub homogeneity: i32,
    pub exact: [f64; C2_DIM],
    pub closed_non_exact: [f64; C2_DIM],
    pub non_closed: [f64; C2_DIM],
    /// Coefficient on each pinned representative of this homogeneity.
    pub representative_coefficients: Vec<(String, f64)>,
    /// Largest entry found outside this homogeneity's slots.
    pub off_homogeneity: f64,
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().expect("rational fits in f64")
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::SingularMatrix);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    Ok((0..n).map(|i| b[i] / a[i][i]).collect())
}

pub fn classify_curvature_cochain(
    algebra: &GradedAlgebra,
    values: &[f64; C2_DIM],
    homogeneity: i32,
) -> Result<Classification> {
    let slots = c2_slots_of_homogeneity(homogeneity);
    if slots.is_empty() {
        return Err(Error::DomainError(
            "classification homogeneity must lie in -1..=5",
        ));
    }

    let boundary = coboundary_space(algebra, Some(homogeneity));
    let boundary_basis: Vec<&Cochain2> = boundary.basis();
    let reps: Vec<Representative> = representatives()
        .into_iter()
        .filter(|r| r.homogeneity == homogeneity)
        .collect();

    // Complete to a basis of the slot block with coordinate directions,
    // walking the slots from the highest down. The remainder directions
    // then stay clear of the cocycle block wherever the pinned parts
    // already cover it.
    let restrict =
        |c: &Cochain2| -> Vec<BigRational> { slots.iter().map(|&s| c.get(s).clone()).collect() };
    let mut exact_rows: Vec<Vec<BigRational>> = boundary_basis.iter().map(|c| restrict(c)).collect();
    for r in &reps {
        exact_rows.push(restrict(&r.cochain));
    }
    let mut rank = rref::rank(&exact_rows);
    assert_eq!(rank, exact_rows.len(), "pinned parts must be independent");
    let mut remainder_slots = Vec::new();
    for pos in (0..slots.len()).rev() {
        if rank == slots.len() {
            break;
        }
        let mut row = vec![BigRational::zero(); slots.len()];
        row[pos] = qi(1);
        exact_rows.push(row);
        let grown = rref::rank(&exact_rows);
        if grown > rank {
            rank = grown;
            remainder_slots.push(pos);
        } else {
            exact_rows.pop();
        }
    }
    assert_eq!(rank, slots.len(), "completion must reach the full block");

    let n = slots.len();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    for c in &boundary_basis {
        columns.push(restrict(c).iter().map(to_f64).collect());
    }
    for r in &reps {
        columns.push(restrict(&r.cochain).iter().map(to_f64).collect());
    }
    for &pos in &remainder_slots {
        let mut col = vec![0.0; n];
        col[pos] = 1.0;
        columns.push(col);
    }
    let matrix: Vec<Vec<f64>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let rhs: Vec<f64> = slots.iter().map(|&s| values[s]).collect();
    let coeff = solve_dense(matrix, rhs)?;

    let mut exact = [0.0; C2_DIM];
    let mut closed_non_exact = [0.0; C2_DIM];
    let mut non_closed = [0.0; C2_DIM];
    let nb = boundary_basis.len();
    let nr = reps.len();
    for (k, col) in columns.iter().enumerate() {
        let target = if k < nb {
            &mut exact
        } else if k < nb + nr {
            &mut closed_non_exact
        } else {
            &mut non_closed
        };
        for (i, &slot) in slots.iter().enumerate() {
            target[slot] += coeff[k] * col[i];
        }
    }
    let representative_coefficients = reps
        .iter()
        .enumerate()
        .map(|(i, r)| (r.label.clone(), coeff[nb + i]))
        .collect();
    let off_homogeneity = (0..C2_DIM)
        .filter(|s| !slots.contains(s))
        .map(|s| values[s].abs())
        .fold(0.0, f64::max);

    Ok(Classification {
        homogeneity,
        exact,
        closed_non_exact,
        non_closed,
        representative_coefficients,
        off_homogeneity,
    })
}

impl Classification {
    pub fn exact_norm(&self) -> f64 {
        self.exact.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn non_closed_norm(&self) -> f64 {
        self.non_closed.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Flattens a curvature table into cochain coordinates at fiber value `t`.
/// Components the table does not carry (above its homogeneity bound) stay
/// zero.
pub fn curvature_cochain(table: &CurvatureTable, t: f64) -> [f64; C2_DIM] {
    let mut out = [0.0; C2_DIM];
    for entry in &table.entries {
        let (pi, sign) = pair_index(entry.pair.0, entry.pair.1).expect("table pair");
        debug_assert_eq!(sign, 1);
        out[pi * DIM + entry.target] = entry.value.value_at(t);
    }
    out
}
