//! Built-in structures: the cubic model, rigid graphs, the normal-form
//! family, and second-order ODE normal coordinates.
//!
//! Chart conventions: graph-type models live in coordinates
//! `(x, y, u1, u2)`; ODE normal coordinates are `(x, y, p, q)`.

use crate::engel::{self, EngelStructure};
use crate::error::{Error, Result};
use crate::fields::{ScalarField, VectorField};
use crate::jets::compose;
use crate::poly::{complex_monomial_parts, ChartPolynomial};

/// The cubic model: graph of `F1 = |z|^2`, `F2 = Re z^2 conj(z)` over the
/// Engel group chart, already aligned and anchored.
///
/// Its frame brackets close with constant coefficients, so every curvature
/// component vanishes identically.
pub fn cubic() -> EngelStructure {
    let x_ = ChartPolynomial::variable(0);
    let y_ = ChartPolynomial::variable(1);
    let half = ChartPolynomial::constant(0.5);
    let zero = ChartPolynomial::zero;

    // X = (1/2) d/dx + y d/du1 + xy d/du2
    let vx = VectorField::from_polys([half.clone(), zero(), y_.clone(), x_.mul(&y_)]);
    // Y = -(1/2) d/dy + x d/du1 + (3x^2 + y^2)/2 d/du2
    let u2_coeff = x_.mul(&x_).scaled(1.5).add(&y_.mul(&y_).scaled(0.5));
    let vy = VectorField::from_polys([zero(), half.scaled(-1.0), x_, u2_coeff]);
    EngelStructure { x: vx, y: vy }
}

/// A rigid graph `u1 = F1(x, y)`, `u2 = F2(x, y)`.
#[derive(Clone, Debug)]
pub struct GraphSpec {
    pub f1: ChartPolynomial,
    pub f2: ChartPolynomial,
}

impl GraphSpec {
    pub fn new(f1: ChartPolynomial, f2: ChartPolynomial) -> Result<Self> {
        for f in [&f1, &f2] {
            if f.terms().iter().any(|&(m, _)| m[2] != 0 || m[3] != 0) {
                return Err(Error::DomainError("graph data must depend on x, y only"));
            }
        }
        Ok(GraphSpec { f1, f2 })
    }
}

/// CR structure of a rigid graph, aligned and anchored at the origin.
///
/// The holomorphic tangent bundle is framed by `U = dx + F1_y du1 + F2_y du2`
/// and `V = dy - F1_x du1 - F2_x du2`, with the complex structure acting by
/// `JU = V`, `JV = -U`. The degenerate line is located at the origin, `Y` is
/// combined from `(U, V)` along it, `X = JY`, and both are rescaled so the
/// dominant anchor component matches the cubic model's `-(1/2) d/dy`.
pub fn graph_to_engel(spec: &GraphSpec) -> Result<EngelStructure> {
    let zero = ChartPolynomial::zero;
    let one = ChartPolynomial::constant(1.0);
    let u = VectorField::from_polys([one.clone(), zero(), spec.f1.partial(1), spec.f2.partial(1)]);
    let v = VectorField::from_polys([
        zero(),
        one,
        spec.f1.partial(0).scaled(-1.0),
        spec.f2.partial(0).scaled(-1.0),
    ]);

    let origin = [0.0f64; 4];
    let (alpha, beta) = engel::find_d0(&u, &v, origin)?;
    let y = u.scaled_by(&alpha).add(&v.scaled_by(&beta));
    // JY = alpha JU + beta JV = alpha V - beta U
    let x = v.scaled_by(&alpha).add(&u.scaled_by(&beta).scaled(-1.0));

    // Anchor: the larger of X's dx-component and Y's dy-component at the
    // origin is pinned to +-1/2 (ties resolved toward Y).
    let xv = x.values(origin)?;
    let yv = y.values(origin)?;
    let (a, b) = (xv[0], yv[1]);
    if a.abs().max(b.abs()) <= 1e-8 {
        return Err(Error::EngelDegenerate(origin));
    }
    let s = if a.abs() > b.abs() { 1.0 / (2.0 * a) } else { -1.0 / (2.0 * b) };
    Ok(EngelStructure { x: x.scaled(s), y: y.scaled(s) })
}

/// Coefficients of the degree-six normal form.
///
/// `F1 = |z|^2 + a1 Re z^2 conj(z)^3 + a2 Im z^2 conj(z)^3`,
/// `F2 = Re z^2 conj(z) + b1 Re z^4 conj(z) + b2 Re z^2 conj(z)^3
///       + b3 Im z^2 conj(z)^3 + b4 Re z^5 conj(z) + b5 Im z^5 conj(z)
///       + b6 Re z^4 conj(z)^2 + b7 Im z^4 conj(z)^2 + b8 |z|^6`.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalFormCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
    pub b6: f64,
    pub b7: f64,
    pub b8: f64,
}

/// Graph data of the normal form with the given coefficients.
pub fn normal_form_graph(c: &NormalFormCoefficients) -> GraphSpec {
    let part = |a: u32, b: u32, re_w: f64, im_w: f64| {
        let (re, im) = complex_monomial_parts(a, b);
        re.scaled(re_w).add(&im.scaled(im_w))
    };
    let f1 = part(1, 1, 1.0, 0.0).add(&part(2, 3, c.a1, c.a2));
    let f2 = part(2, 1, 1.0, 0.0)
        .add(&part(4, 1, c.b1, 0.0))
        .add(&part(2, 3, c.b2, c.b3))
        .add(&part(5, 1, c.b4, c.b5))
        .add(&part(4, 2, c.b6, c.b7))
        .add(&part(3, 3, c.b8, 0.0));
    GraphSpec { f1, f2 }
}

/// Aligned, anchored structure of the degree-six normal form.
pub fn normal_form_model(c: &NormalFormCoefficients) -> Result<EngelStructure> {
    graph_to_engel(&normal_form_graph(c))
}

/// Structure in ODE normal coordinates `(x, y, p, q)` for `y'' ... = B`:
/// `X = scale (dx + p dy + q dp + B dq)`, `Y = scale dq`.
///
/// Always degenerate-line aligned; the built-in frame has
/// `phi^2_{y2} = 0` identically, so no scale normalization is needed when
/// `scale` is constant.
pub fn ode_normal_coordinates(b: &ChartPolynomial, scale: &ScalarField) -> Result<EngelStructure> {
    let zero = ChartPolynomial::zero;
    let one = || ChartPolynomial::constant(1.0);
    let x_raw = VectorField::from_polys([
        one(),
        ChartPolynomial::variable(2),
        ChartPolynomial::variable(3),
        b.clone(),
    ]);
    let y_raw = VectorField::from_polys([zero(), zero(), zero(), one()]);
    let e = EngelStructure { x: x_raw.scaled_by(scale), y: y_raw.scaled_by(scale) };
    engel::validate(&e, &[[0.0; 4]])?;
    Ok(e)
}

/// Common rescale (X, Y) -> (fX, fY) by a nowhere-zero function.
pub fn rescale_structure(e: &EngelStructure, f: &ScalarField) -> EngelStructure {
    EngelStructure { x: e.x.scaled_by(f), y: e.y.scaled_by(f) }
}

/// Transport a structure through the polynomial chart map `forward`, whose
/// inverse on the region of interest is `inverse` (both exact or exact to
/// the working jet order).
pub fn pushforward_structure(
    e: &EngelStructure,
    forward: &[ChartPolynomial; 4],
    inverse: &[ChartPolynomial; 4],
) -> EngelStructure {
    EngelStructure {
        x: pushforward_field(&e.x, forward, inverse),
        y: pushforward_field(&e.y, forward, inverse),
    }
}

fn pushforward_field(
    v: &VectorField,
    forward: &[ChartPolynomial; 4],
    inverse: &[ChartPolynomial; 4],
) -> VectorField {
    let jac: Vec<[ChartPolynomial; 4]> = (0..4)
        .map(|i| [0, 1, 2, 3].map(|j| forward[i].partial(j)))
        .collect();
    let components: Vec<ScalarField> = (0..4)
        .map(|i| {
            let v = v.clone();
            let row = jac[i].clone();
            let inverse = inverse.clone();
            ScalarField::new(move |p, n| {
                let inv_jets = [0, 1, 2, 3].map(|c| inverse[c].eval_jet(n, p));
                let q = [
                    inv_jets[0].value(),
                    inv_jets[1].value(),
                    inv_jets[2].value(),
                    inv_jets[3].value(),
                ];
                let mut acc = crate::jets::Jet::zero(n, p);
                for j in 0..4 {
                    let vj = v.component(j).jet(q, n)?;
                    let dj = row[j].eval_jet(n, q);
                    let term = vj.mul(&dj)?;
                    acc = acc.add(&compose(&term, &inv_jets)?)?;
                }
                Ok(acc)
            })
            .cached()
        })
        .collect();
    let mut it = components.into_iter();
    VectorField::new([
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
    ])
}
