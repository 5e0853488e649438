//! Scalar and vector fields evaluated lazily as jets.
//!
//! A field is a closure from (point, order) to a jet; combinators build new
//! fields that request whatever order they need from their inputs, so a
//! Lie bracket of brackets automatically samples the underlying data deep
//! enough. Nothing is cached across points: each anchor point is priced at
//! one pass through the closure tree.

use std::sync::Arc;

use crate::error::{Point, Result};
use crate::jets::linalg;
use crate::jets::Jet;
use crate::poly::ChartPolynomial;

#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<dyn Fn(Point, usize) -> Result<Jet> + Send + Sync>,
}

impl ScalarField {
    pub fn new<F>(f: F) -> ScalarField
    where
        F: Fn(Point, usize) -> Result<Jet> + Send + Sync + 'static,
    {
        ScalarField { eval: Arc::new(f) }
    }

    pub fn from_poly(poly: ChartPolynomial) -> ScalarField {
        ScalarField::new(move |p, n| Ok(poly.eval_jet(n, p)))
    }

    pub fn constant(c: f64) -> ScalarField {
        ScalarField::new(move |p, n| Ok(Jet::constant(c, n, p)))
    }

    pub fn zero() -> ScalarField {
        ScalarField::constant(0.0)
    }

    pub fn jet(&self, p: Point, order: usize) -> Result<Jet> {
        (self.eval)(p, order)
    }

    pub fn value(&self, p: Point) -> Result<f64> {
        Ok(self.jet(p, 0)?.value())
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        let (a, b) = (self.clone(), other.clone());
        ScalarField::new(move |p, n| a.jet(p, n)?.add(&b.jet(p, n)?))
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        let (a, b) = (self.clone(), other.clone());
        ScalarField::new(move |p, n| a.jet(p, n)?.sub(&b.jet(p, n)?))
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        let (a, b) = (self.clone(), other.clone());
        ScalarField::new(move |p, n| a.jet(p, n)?.mul(&b.jet(p, n)?))
    }

    pub fn scaled(&self, factor: f64) -> ScalarField {
        let a = self.clone();
        ScalarField::new(move |p, n| Ok(a.jet(p, n)?.scaled(factor)))
    }

    pub fn neg(&self) -> ScalarField {
        self.scaled(-1.0)
    }

    pub fn exp(&self) -> ScalarField {
        let a = self.clone();
        ScalarField::new(move |p, n| Ok(a.jet(p, n)?.exp()))
    }

    /// Partial derivative along a chart axis; samples one order deeper.
    pub fn partial(&self, axis: usize) -> ScalarField {
        let a = self.clone();
        ScalarField::new(move |p, n| a.jet(p, n + 1)?.partial(axis))
    }

    /// Memoize evaluations by (point, order). Worth it for fields whose
    /// closure tree is deep (coframe entries, bracket towers) and which get
    /// re-queried at the same anchors, which is what frame assembly does.
    pub fn cached(&self) -> ScalarField {
        let a = self.clone();
        let memo: std::sync::Mutex<std::collections::HashMap<([u64; 4], usize), Jet>> =
            std::sync::Mutex::new(std::collections::HashMap::new());
        ScalarField::new(move |p, n| {
            let key = (p.map(f64::to_bits), n);
            if let Some(hit) = memo.lock().unwrap().get(&key) {
                return Ok(hit.clone());
            }
            let jet = a.jet(p, n)?;
            memo.lock().unwrap().insert(key, jet.clone());
            Ok(jet)
        })
    }
}

#[derive(Clone)]
pub struct VectorField {
    components: [ScalarField; 4],
}

impl VectorField {
    pub fn new(components: [ScalarField; 4]) -> VectorField {
        VectorField { components }
    }

    pub fn from_polys(components: [ChartPolynomial; 4]) -> VectorField {
        VectorField::new(components.map(ScalarField::from_poly))
    }

    /// The coordinate field along `axis`.
    pub fn coordinate(axis: usize) -> VectorField {
        VectorField::new(std::array::from_fn(|i| {
            ScalarField::constant(if i == axis { 1.0 } else { 0.0 })
        }))
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn jets(&self, p: Point, order: usize) -> Result<[Jet; 4]> {
        Ok([
            self.components[0].jet(p, order)?,
            self.components[1].jet(p, order)?,
            self.components[2].jet(p, order)?,
            self.components[3].jet(p, order)?,
        ])
    }

    pub fn values(&self, p: Point) -> Result<[f64; 4]> {
        Ok([
            self.components[0].value(p)?,
            self.components[1].value(p)?,
            self.components[2].value(p)?,
            self.components[3].value(p)?,
        ])
    }

    /// Derivative of `f` along this field.
    pub fn apply(&self, f: &ScalarField) -> ScalarField {
        let v = self.clone();
        let f = f.clone();
        ScalarField::new(move |p, n| {
            let fj = f.jet(p, n + 1)?;
            let mut acc = Jet::zero(n, p);
            for axis in 0..4 {
                let va = v.components[axis].jet(p, n)?;
                acc = acc.add(&va.mul(&fj.partial(axis)?)?)?;
            }
            Ok(acc)
        })
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField::new(std::array::from_fn(|i| {
            self.components[i].add(&other.components[i])
        }))
    }

    pub fn scaled(&self, factor: f64) -> VectorField {
        VectorField::new(std::array::from_fn(|i| self.components[i].scaled(factor)))
    }

    /// Multiply by a scalar field.
    pub fn scaled_by(&self, f: &ScalarField) -> VectorField {
        VectorField::new(std::array::from_fn(|i| self.components[i].mul(f)))
    }

    pub fn lie_bracket(&self, other: &VectorField) -> VectorField {
        VectorField::new(std::array::from_fn(|i| {
            let a = self.clone();
            let b = other.clone();
            ScalarField::new(move |p, n| {
                let ai = a.components[i].jet(p, n + 1)?;
                let bi = b.components[i].jet(p, n + 1)?;
                let mut acc = Jet::zero(n, p);
                for axis in 0..4 {
                    let aj = a.components[axis].jet(p, n)?;
                    let bj = b.components[axis].jet(p, n)?;
                    acc = acc.add(&aj.mul(&bi.partial(axis)?)?)?;
                    acc = acc.sub(&bj.mul(&ai.partial(axis)?)?)?;
                }
                Ok(acc)
            })
        }))
    }
}

/// Ordered frame of four vector fields.
#[derive(Clone)]
pub struct Frame {
    pub fields: [VectorField; 4],
}

/// The six unordered index pairs (beta, gamma) with beta < gamma, in the
/// order used throughout for structure functions and curvature components.
pub const FRAME_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Position of an ordered pair in [`FRAME_PAIRS`], with the sign of the swap.
pub fn pair_index(beta: usize, gamma: usize) -> Option<(usize, f64)> {
    if beta == gamma {
        return None;
    }
    let (lo, hi, sign) = if beta < gamma {
        (beta, gamma, 1.0)
    } else {
        (gamma, beta, -1.0)
    };
    FRAME_PAIRS
        .iter()
        .position(|&(b, g)| (b, g) == (lo, hi))
        .map(|idx| (idx, sign))
}

impl Frame {
    /// Adapted frame generated by two distribution fields:
    /// `(X, Y, [X, Y], [X, [X, Y]])`.
    pub fn adapted(x: &VectorField, y: &VectorField) -> Frame {
        let t2 = x.lie_bracket(y);
        let t3 = x.lie_bracket(&t2);
        Frame {
            fields: [x.clone(), y.clone(), t2, t3],
        }
    }

    /// Component values at a point, row b = field b.
    pub fn value_matrix(&self, p: Point) -> Result<[[f64; 4]; 4]> {
        Ok([
            self.fields[0].values(p)?,
            self.fields[1].values(p)?,
            self.fields[2].values(p)?,
            self.fields[3].values(p)?,
        ])
    }

    /// Jets of all components, row b = field b.
    pub fn component_jets(&self, p: Point, order: usize) -> Result<[[Jet; 4]; 4]> {
        Ok([
            self.fields[0].jets(p, order)?,
            self.fields[1].jets(p, order)?,
            self.fields[2].jets(p, order)?,
            self.fields[3].jets(p, order)?,
        ])
    }

    /// Rows of the dual coframe as jets: row a applied to field b gives
    /// delta(a, b). Fails when the frame degenerates near the point.
    pub fn dual_coframe(&self, p: Point, order: usize) -> Result<[[Jet; 4]; 4]> {
        let rows = self.component_jets(p, order)?;
        // Columns of `mat` are the frame fields.
        let mat: Vec<Vec<Jet>> = (0..4)
            .map(|c| (0..4).map(|b| rows[b][c].clone()).collect())
            .collect();
        let inv = linalg::invert_matrix(&mat, 1e-8)?;
        Ok(std::array::from_fn(|a| {
            std::array::from_fn(|c| inv[a][c].clone())
        }))
    }

    /// One structure function as a lazy scalar field.
    pub fn structure_function_field(&self, alpha: usize, beta: usize, gamma: usize) -> ScalarField {
        let frame = self.clone();
        ScalarField::new(move |q, n| Ok(frame.structure_functions(q, n)?.phi(alpha, beta, gamma)))
            .cached()
    }

    /// Structure functions at `(p, order)`: table over [`FRAME_PAIRS`] of the
    /// expansion coefficients of each pair bracket in the frame itself.
    pub fn structure_functions(&self, p: Point, order: usize) -> Result<StructureFunctions> {
        let coframe = self.dual_coframe(p, order)?;
        let mut table = Vec::with_capacity(6);
        for &(beta, gamma) in FRAME_PAIRS.iter() {
            let bracket = self.fields[beta].lie_bracket(&self.fields[gamma]);
            let b = bracket.jets(p, order)?;
            let mut coeffs = Vec::with_capacity(4);
            for row in coframe.iter() {
                let mut acc = Jet::zero(order, p);
                for c in 0..4 {
                    acc = acc.add(&row[c].mul(&b[c])?)?;
                }
                coeffs.push(acc);
            }
            table.push(coeffs);
        }
        Ok(StructureFunctions { order, table })
    }

    /// Largest Jacobi defect over frame triples at `p`. Identically zero
    /// for any true frame, so the value measures pure numerics.
    pub fn jacobi_residual(&self, p: Point) -> Result<f64> {
        let sf = self.structure_functions(p, 1)?;
        let jets = self.component_jets(p, 1)?;
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in a + 1..4 {
                for c in b + 1..4 {
                    for d in 0..4 {
                        let mut acc = 0.0;
                        for (i, j, k) in [(a, b, c), (b, c, a), (c, a, b)] {
                            let phi = sf.phi(d, j, k);
                            for ch in 0..4 {
                                let mut idx = [0u8; 4];
                                idx[ch] = 1;
                                acc += jets[i][ch].value() * phi.coefficient(idx);
                            }
                            for eps in 0..4 {
                                acc += sf.phi(eps, j, k).value() * sf.phi(d, i, eps).value();
                            }
                        }
                        worst = worst.max(acc.abs());
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// Expansion coefficients of frame-pair brackets in the frame: entry
/// `(pair, alpha)` holds the coefficient of frame field `alpha` in the
/// bracket of the pair.
pub struct StructureFunctions {
    order: usize,
    table: Vec<Vec<Jet>>,
}

impl StructureFunctions {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of frame field `alpha` in `[T_beta, T_gamma]`; a zero jet
    /// when `beta == gamma`.
    pub fn phi(&self, alpha: usize, beta: usize, gamma: usize) -> Jet {
        match pair_index(beta, gamma) {
            None => {
                let sample = &self.table[0][alpha];
                Jet::zero(sample.order(), sample.base_point())
            }
            Some((idx, sign)) => self.table[idx][alpha].scaled(sign),
        }
    }
}
