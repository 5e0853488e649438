//! Canonical connection data for Engel structures.
//!
//! Everything that lives over the fiber parameter `t` has exact monomial
//! dependence on it, so quantities are stored as a jet on the base chart
//! together with an integer weight; the value over `t` is `t^weight` times
//! the jet. That applies to the connection coefficients, the dual coframe
//! coefficients, the curvature components, and the derivative operators that
//! connect them.

mod geometry;
mod table;

pub use geometry::{
    ConnectionForm, GlobalScale, Integrability, PlanePair, CLOSED_TOL, INTEGRABILITY_TOL,
};
pub use table::{CurvatureComponent, CurvatureTable};

use rayon::prelude::*;

use crate::engel::{self, EngelStructure};
use crate::error::{Error, Point, Result};
use crate::fields::{Frame, StructureFunctions};
use crate::jets::{linalg, Jet};

/// Fiber weights of the five frame slots, index order (0, x, y, 2, 3).
pub(crate) const SLOT_WEIGHTS: [i32; 5] = [0, 1, 1, 2, 3];

/// Display names of the five frame slots.
pub const SLOT_NAMES: [&str; 5] = ["0", "x", "y", "2", "3"];

/// Vanishing threshold for the flatness and umbilicity verdicts.
pub const FLATNESS_TOL: f64 = 1e-7;

/// A quantity with exact monomial fiber dependence: the value over fiber
/// parameter `t` is `t^weight` times the stored jet.
#[derive(Clone, Debug)]
pub struct WeightedJet {
    pub jet: Jet,
    pub weight: i32,
}

impl WeightedJet {
    pub fn new(jet: Jet, weight: i32) -> WeightedJet {
        WeightedJet { jet, weight }
    }

    /// Value at the anchor point for fiber parameter `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        t.powi(self.weight) * self.jet.value()
    }

    /// Value at the anchor point, fiber factor stripped.
    pub fn value(&self) -> f64 {
        self.jet.value()
    }

    pub fn scaled(&self, factor: f64) -> WeightedJet {
        WeightedJet::new(self.jet.scaled(factor), self.weight)
    }

    /// Sum; both terms must carry the same weight.
    pub fn add(&self, other: &WeightedJet) -> Result<WeightedJet> {
        if self.weight != other.weight {
            return Err(Error::DomainError("weight mismatch in graded sum"));
        }
        Ok(WeightedJet::new(jadd(&self.jet, &other.jet)?, self.weight))
    }

    pub fn sub(&self, other: &WeightedJet) -> Result<WeightedJet> {
        self.add(&other.scaled(-1.0))
    }

    /// Product; weights add.
    pub fn mul(&self, other: &WeightedJet) -> Result<WeightedJet> {
        Ok(WeightedJet::new(
            jmul(&self.jet, &other.jet)?,
            self.weight + other.weight,
        ))
    }
}

/// Truncate two jets to their common order so they can be combined. Jets
/// produced at different derivative depths otherwise refuse to mix.
pub(crate) fn align(a: &Jet, b: &Jet) -> Result<(Jet, Jet)> {
    let n = a.order().min(b.order());
    Ok((a.truncated(n)?, b.truncated(n)?))
}

pub(crate) fn jadd(a: &Jet, b: &Jet) -> Result<Jet> {
    let (a, b) = align(a, b)?;
    a.add(&b)
}

pub(crate) fn jsub(a: &Jet, b: &Jet) -> Result<Jet> {
    let (a, b) = align(a, b)?;
    a.sub(&b)
}

pub(crate) fn jmul(a: &Jet, b: &Jet) -> Result<Jet> {
    let (a, b) = align(a, b)?;
    a.mul(&b)
}

/// Evaluation context anchored at one point of a scale-normalized structure.
///
/// Construction validates the structure at the anchor, normalizes the scale
/// there, and samples the adapted frame and its structure functions once at
/// `order`. Every derived quantity spends jet orders from that budget: one
/// order per frame-directional derivative.
pub struct CartanContext {
    structure: EngelStructure,
    frame: Frame,
    anchor: Point,
    order: usize,
    frame_jets: [[Jet; 4]; 4],
    phi: StructureFunctions,
}

impl CartanContext {
    pub fn new(e: &EngelStructure, p: Point, order: usize) -> Result<CartanContext> {
        if order < 2 {
            return Err(Error::InsufficientOrder {
                what: "connection data",
                needed: 2,
                got: order,
            });
        }
        engel::validate(e, &[p])?;
        // The deepest consumer is a structure function of the third frame
        // bracket, which samples the raw fields three orders beyond `order`.
        let structure = engel::normalize_scale(e, p, order + 3)?;
        let frame = structure.frame();
        let frame_jets = frame.component_jets(p, order)?;
        let phi = frame.structure_functions(p, order)?;
        Ok(CartanContext {
            structure,
            frame,
            anchor: p,
            order,
            frame_jets,
            phi,
        })
    }

    pub fn anchor(&self) -> Point {
        self.anchor
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The scale-normalized structure the context evaluates.
    pub fn normalized(&self) -> &EngelStructure {
        &self.structure
    }

    pub(crate) fn frame(&self) -> &Frame {
        &self.frame
    }

    pub(crate) fn frame_jets(&self) -> &[[Jet; 4]; 4] {
        &self.frame_jets
    }

    /// Structure function `phi^alpha_{beta gamma}` as a jet at the anchor.
    pub(crate) fn phi(&self, alpha: usize, beta: usize, gamma: usize) -> Jet {
        self.phi.phi(alpha, beta, gamma)
    }

    /// Derivative of `g` along frame field `leg`; costs one jet order.
    pub(crate) fn t_deriv(&self, leg: usize, g: &Jet) -> Result<Jet> {
        let mut acc = Jet::zero(g.order().saturating_sub(1), self.anchor);
        for c in 0..4 {
            let d = g.partial(c)?;
            acc = acc.add(&jmul(&self.frame_jets[leg][c], &d)?)?;
        }
        Ok(acc)
    }

    /// `phi^3_{x3}` and the derivative tower every coefficient draws on.
    fn towers(&self) -> Result<PhiTowers> {
        let phi = self.phi(3, 0, 3);
        let tx = self.t_deriv(0, &phi)?;
        let ty = self.t_deriv(1, &phi)?;
        let txx = self.t_deriv(0, &tx)?;
        let txy = self.t_deriv(0, &ty)?;
        let tyx = self.t_deriv(1, &tx)?;
        Ok(PhiTowers {
            phi,
            tx,
            ty,
            txx,
            txy,
            tyx,
        })
    }

    /// The eleven connection coefficients at the anchor.
    pub fn connection_coefficients(&self) -> Result<ConnectionCoefficients> {
        let t = self.towers()?;
        let n = self.order;
        let p = self.anchor;
        let phi_sq = t.phi.mul(&t.phi)?;

        let a_x0 = WeightedJet::new(t.phi.scaled(-1.0 / 6.0), 1);
        let a_y0 = WeightedJet::new(Jet::zero(n, p), 1);
        let a_22 = WeightedJet::new(Jet::constant(1.0, n, p), 2);
        let a_2x = WeightedJet::new(Jet::zero(n, p), 2);
        let a_2y = WeightedJet::new(t.phi.scaled(-1.0 / 6.0), 2);
        let a_20 = WeightedJet::new(t.ty.scaled(1.0 / 6.0), 2);
        let a_33 = WeightedJet::new(Jet::constant(1.0, n, p), 3);
        let a_32 = WeightedJet::new(t.phi.scaled(-1.0 / 2.0), 3);
        let a_3x = WeightedJet::new(t.ty.scaled(-1.0 / 6.0), 3);
        let a_3y = WeightedJet::new(
            jsub(&phi_sq.scaled(1.0 / 18.0), &t.tx.scaled(1.0 / 6.0))?,
            3,
        );
        let a_30 = {
            let lead = jsub(&t.txy.scaled(1.0 / 3.0), &t.tyx.scaled(1.0 / 6.0))?;
            WeightedJet::new(
                jsub(&lead, &jmul(&t.phi, &t.ty)?.scaled(1.0 / 18.0))?,
                3,
            )
        };

        // Fiber-stripped frame-change matrix in slot order (0, x, y, 2, 3).
        // Unit lower triangular, so inversion at the common order is benign.
        let m = n - 2;
        let zero = Jet::zero(m, p);
        let one = Jet::constant(1.0, m, p);
        let tr = |w: &WeightedJet| w.jet.truncated(m);
        let mat: Vec<Vec<Jet>> = vec![
            vec![
                one.clone(),
                zero.clone(),
                zero.clone(),
                zero.clone(),
                zero.clone(),
            ],
            vec![
                tr(&a_x0)?,
                one.clone(),
                zero.clone(),
                zero.clone(),
                zero.clone(),
            ],
            vec![
                tr(&a_y0)?,
                zero.clone(),
                one.clone(),
                zero.clone(),
                zero.clone(),
            ],
            vec![tr(&a_20)?, tr(&a_2x)?, tr(&a_2y)?, one.clone(), zero.clone()],
            vec![tr(&a_30)?, tr(&a_3x)?, tr(&a_3y)?, tr(&a_32)?, one.clone()],
        ];
        let inv = linalg::invert_matrix(&mat, 1e-8)?;
        let beta = std::array::from_fn(|i| std::array::from_fn(|j| inv[i][j].clone()));

        Ok(ConnectionCoefficients {
            a_x0,
            a_y0,
            a_22,
            a_2x,
            a_2y,
            a_20,
            a_33,
            a_32,
            a_3x,
            a_3y,
            a_30,
            beta,
        })
    }

    /// The four essential curvature invariants at the anchor, as jets two
    /// orders below the context budget.
    pub fn essential_curvatures(&self) -> Result<EssentialCurvatures> {
        let t = self.towers()?;
        let m = self.order - 2;
        let phi = t.phi.truncated(m)?;
        let tx = t.tx.truncated(m)?;
        let ty = t.ty.truncated(m)?;
        let phi_sq = phi.mul(&phi)?;
        let phi_cube = phi_sq.mul(&phi)?;
        let phi2_x3 = self.phi(2, 0, 3).truncated(m)?;

        let r_x_y2 = self.phi(0, 1, 2).truncated(m)?;
        let r_y_y2 = self.phi(1, 1, 2).truncated(m)?.sub(&ty.scaled(1.0 / 3.0))?;
        let r_2_x3 = phi2_x3
            .add(&phi_sq.scaled(11.0 / 36.0))?
            .sub(&tx.scaled(2.0 / 3.0))?;
        let r_y_x3 = self
            .phi(1, 0, 3)
            .truncated(m)?
            .add(&phi.mul(&tx)?.scaled(1.0 / 12.0))?
            .sub(&t.txx.scaled(1.0 / 6.0))?
            .add(&phi_cube.scaled(5.0 / 216.0))?
            .add(&phi.mul(&phi2_x3)?.scaled(1.0 / 6.0))?;

        Ok(EssentialCurvatures {
            r_x_y2: WeightedJet::new(r_x_y2, 2),
            r_y_y2: WeightedJet::new(r_y_y2, 2),
            r_2_x3: WeightedJet::new(r_2_x3, 2),
            r_y_x3: WeightedJet::new(r_y_x3, 3),
        })
    }

    /// Essential invariants, curvature table, and connection form in one
    /// pass over the context.
    pub fn curvature_report(&self, max_homogeneity: i32) -> Result<CurvatureReport> {
        Ok(CurvatureReport {
            essential: self.essential_curvatures()?,
            full_table: self.curvature_table(max_homogeneity)?,
            varpi: self.connection_form()?,
        })
    }
}

struct PhiTowers {
    phi: Jet,
    /// One derivative along the first frame leg.
    tx: Jet,
    /// One derivative along the second frame leg.
    ty: Jet,
    txx: Jet,
    /// x after y.
    txy: Jet,
    /// y after x.
    tyx: Jet,
}

/// Connection coefficients of the lifted frame at one anchor.
///
/// `a_2x` and `a_y0` vanish identically; `a_22` and `a_33` are the constants
/// fixed by normalizing the top two lifted legs. The dual coefficients are
/// recovered through [`ConnectionCoefficients::b`].
pub struct ConnectionCoefficients {
    pub a_x0: WeightedJet,
    pub a_y0: WeightedJet,
    pub a_22: WeightedJet,
    pub a_2x: WeightedJet,
    pub a_2y: WeightedJet,
    pub a_20: WeightedJet,
    pub a_33: WeightedJet,
    pub a_32: WeightedJet,
    pub a_3x: WeightedJet,
    pub a_3y: WeightedJet,
    pub a_30: WeightedJet,
    /// Inverse of the fiber-stripped frame-change matrix, slot order
    /// (0, x, y, 2, 3).
    beta: [[Jet; 5]; 5],
}

impl ConnectionCoefficients {
    /// Dual-coframe coefficient: the component of lifted coframe row `row`
    /// on base coframe leg `col`, slot order (0, x, y, 2, 3). Satisfies
    /// `b(3,3) = 1/a_22` and `b(4,4) = 1/a_33` through the stored weights.
    pub fn b(&self, row: usize, col: usize) -> WeightedJet {
        WeightedJet::new(self.beta[col][row].clone(), -SLOT_WEIGHTS[row])
    }

    /// Coefficients of the fiber connection form on the base coframe legs
    /// (x, y, 2, 3); the lifted form adds `dt/t` on top. All weight zero.
    pub fn varpi_frame(&self) -> [WeightedJet; 4] {
        std::array::from_fn(|i| self.b(0, i + 1))
    }
}

/// The four essential curvature invariants. The structure is flat near the
/// anchor exactly when all four vanish identically.
#[derive(Clone, Debug)]
pub struct EssentialCurvatures {
    pub r_x_y2: WeightedJet,
    pub r_y_y2: WeightedJet,
    pub r_2_x3: WeightedJet,
    pub r_y_x3: WeightedJet,
}

impl EssentialCurvatures {
    /// Values in order (R^x_{y2}, R^y_{y2}, R^2_{x3}, R^y_{x3}).
    pub fn values_at(&self, t: f64) -> [f64; 4] {
        [
            self.r_x_y2.value_at(t),
            self.r_y_y2.value_at(t),
            self.r_2_x3.value_at(t),
            self.r_y_x3.value_at(t),
        ]
    }

    pub fn max_abs_at(&self, t: f64) -> f64 {
        self.values_at(t).iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Full curvature data at one anchor.
pub struct CurvatureReport {
    pub essential: EssentialCurvatures,
    pub full_table: CurvatureTable,
    pub varpi: ConnectionForm,
}

/// Verdict of the four-invariant vanishing test over a point sample.
#[derive(Clone, Copy, Debug)]
pub struct FlatnessVerdict {
    pub flat: bool,
    pub max_residual: f64,
}

/// Pointwise version of the flatness verdict.
#[derive(Clone, Copy, Debug)]
pub struct UmbilicityVerdict {
    pub umbilic: bool,
    pub residual: f64,
}

/// True exactly when all four essential invariants vanish at every sampled
/// point, to [`FLATNESS_TOL`]. Points are processed in parallel.
pub fn flatness_test(
    e: &EngelStructure,
    points: &[Point],
    order: usize,
) -> Result<FlatnessVerdict> {
    engel::validate(e, points)?;
    let residuals = points
        .par_iter()
        .map(|&p| {
            Ok(CartanContext::new(e, p, order)?
                .essential_curvatures()?
                .max_abs_at(1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_residual = residuals.into_iter().fold(0.0f64, f64::max);
    Ok(FlatnessVerdict {
        flat: max_residual < FLATNESS_TOL,
        max_residual,
    })
}

/// Vanishing of all four essential invariants at one point.
pub fn umbilicity_test(e: &EngelStructure, p: Point, order: usize) -> Result<UmbilicityVerdict> {
    let residual = CartanContext::new(e, p, order)?
        .essential_curvatures()?
        .max_abs_at(1.0);
    Ok(UmbilicityVerdict {
        umbilic: residual < FLATNESS_TOL,
        residual,
    })
}

pub fn connection_coefficients(
    e: &EngelStructure,
    p: Point,
    order: usize,
) -> Result<ConnectionCoefficients> {
    CartanContext::new(e, p, order)?.connection_coefficients()
}

pub fn essential_curvatures(
    e: &EngelStructure,
    p: Point,
    order: usize,
) -> Result<EssentialCurvatures> {
    CartanContext::new(e, p, order)?.essential_curvatures()
}

pub fn curvature_table(
    e: &EngelStructure,
    p: Point,
    order: usize,
    max_homogeneity: i32,
) -> Result<CurvatureTable> {
    CartanContext::new(e, p, order)?.curvature_table(max_homogeneity)
}

pub fn predicted_curvature_table(
    e: &EngelStructure,
    p: Point,
    order: usize,
    max_homogeneity: i32,
) -> Result<CurvatureTable> {
    CartanContext::new(e, p, order)?.predicted_curvature_table(max_homogeneity)
}

pub fn connection_form(e: &EngelStructure, p: Point, order: usize) -> Result<ConnectionForm> {
    CartanContext::new(e, p, order)?.connection_form()
}

pub fn global_scale_test(e: &EngelStructure, p: Point, order: usize) -> Result<GlobalScale> {
    CartanContext::new(e, p, order)?.global_scale_test()
}

pub fn distinguished_frame_at(
    e: &EngelStructure,
    p: Point,
    t: f64,
    order: usize,
) -> Result<[[f64; 4]; 4]> {
    CartanContext::new(e, p, order)?.distinguished_frame_at(t)
}

pub fn integrability_check(
    e: &EngelStructure,
    p: Point,
    which: PlanePair,
    order: usize,
) -> Result<Integrability> {
    CartanContext::new(e, p, order)?.integrability_check(which)
}

pub fn curvature_report(
    e: &EngelStructure,
    p: Point,
    order: usize,
    max_homogeneity: i32,
) -> Result<CurvatureReport> {
    CartanContext::new(e, p, order)?.curvature_report(max_homogeneity)
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::engel::EngelStructure;
    use crate::fields::ScalarField;
    use crate::models;
    use crate::poly::ChartPolynomial;

    /// Second-order ordinary differential equation fixture with right side
    /// q^2, already scale-normalized; all its invariants have closed forms.
    pub fn ode_q2() -> EngelStructure {
        let b = ChartPolynomial::new(vec![([0, 0, 0, 2], 1.0)]);
        models::ode_normal_coordinates(&b, &ScalarField::constant(1.0)).unwrap()
    }

    /// Right side q^3: still normalized, but its fiber connection form is
    /// not closed.
    pub fn ode_q3() -> EngelStructure {
        let b = ChartPolynomial::new(vec![([0, 0, 0, 3], 1.0)]);
        models::ode_normal_coordinates(&b, &ScalarField::constant(1.0)).unwrap()
    }
}
