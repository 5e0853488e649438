//! Flows of vector fields: exact truncated-Taylor transport of jets, and a
//! classical fixed-step integrator for plain points.

use crate::error::{Error, Point, Result};
use crate::fields::VectorField;
use crate::jets::{compose, Jet};

/// Flow the map-jet `start` along `field`, with the flow time being the
/// parameter-space axis `axis`.
///
/// `start` is a 4-component jet map from parameter space into the chart; it
/// must not depend on `axis` (its role is the initial condition at time 0).
/// The result satisfies dF/ds = field(F), F|_{s=0} = start, exactly through
/// the stored order: Picard iteration gains one time degree per pass, so
/// `order` passes saturate the truncation.
pub fn jet_flow(field: &VectorField, start: &[Jet; 4], axis: usize) -> Result<[Jet; 4]> {
    let order = start[0].order();
    let anchor = [
        start[0].value(),
        start[1].value(),
        start[2].value(),
        start[3].value(),
    ];
    let v_jets = field.jets(anchor, order)?;
    let mut f = start.clone();
    for _ in 0..order {
        let mut next: Vec<Jet> = Vec::with_capacity(4);
        for i in 0..4 {
            let rate = compose(&v_jets[i], &f)?;
            next.push(start[i].add(&rate.antiderivative(axis))?);
        }
        f = [
            next.remove(0),
            next.remove(0),
            next.remove(0),
            next.remove(0),
        ];
    }
    Ok(f)
}

/// Classical 4th-order fixed-step integration of dx/ds = field(x) from
/// `start` over `time`. The step count is ceil(|time| / step) so the actual
/// step divides `time` exactly; results are bit-reproducible.
pub fn rk4_flow(field: &VectorField, start: Point, time: f64, step: f64) -> Result<Point> {
    if !(step > 0.0) {
        return Err(Error::DomainError("integration step must be positive"));
    }
    if time == 0.0 {
        return Ok(start);
    }
    let n_steps = (time.abs() / step).ceil().max(1.0) as usize;
    let h = time / n_steps as f64;
    let mut x = start;
    let add = |a: Point, b: Point, s: f64| -> Point {
        [
            a[0] + s * b[0],
            a[1] + s * b[1],
            a[2] + s * b[2],
            a[3] + s * b[3],
        ]
    };
    for _ in 0..n_steps {
        let k1 = field.values(x)?;
        let k2 = field.values(add(x, k1, h / 2.0))?;
        let k3 = field.values(add(x, k2, h / 2.0))?;
        let k4 = field.values(add(x, k3, h))?;
        for i in 0..4 {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ScalarField;
    use crate::poly::ChartPolynomial;

    fn constant_start(p: Point, order: usize) -> [Jet; 4] {
        std::array::from_fn(|i| Jet::constant(p[i], order, [0.0; 4]))
    }

    #[test]
    fn flow_of_a_constant_field_translates() {
        let v = VectorField::coordinate(1).scaled(2.5);
        let p = [1.0, -2.0, 0.0, 3.0];
        let f = jet_flow(&v, &constant_start(p, 4), 0).unwrap();
        // F(s) = p + 2.5 s e_y
        assert!((f[1].coefficient([1, 0, 0, 0]) - 2.5).abs() < 1e-14);
        assert!((f[1].value() + 2.0).abs() < 1e-14);
        assert!(f[0].sub(&Jet::constant(1.0, 4, [0.0; 4])).unwrap().norm() < 1e-14);
        assert!((f[1].coefficient([2, 0, 0, 0])).abs() < 1e-14);
    }

    #[test]
    fn flow_of_a_linear_field_exponentiates() {
        // v = x d/dx: flow x(s) = x0 e^s.
        let v = VectorField::new([
            ScalarField::from_poly(ChartPolynomial::variable(0)),
            ScalarField::zero(),
            ScalarField::zero(),
            ScalarField::zero(),
        ]);
        let p = [2.0, 0.0, 0.0, 0.0];
        let n = 6;
        let f = jet_flow(&v, &constant_start(p, n), 0).unwrap();
        let mut fact = 1.0;
        for k in 0..=n as u8 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!(
                (f[0].coefficient([k, 0, 0, 0]) - 2.0 / fact).abs() < 1e-12,
                "degree {k}"
            );
        }
    }

    #[test]
    fn rotation_flow_matches_trigonometry() {
        // v = -y d/dx + x d/dy.
        let v = VectorField::new([
            ScalarField::from_poly(ChartPolynomial::variable(1)).neg(),
            ScalarField::from_poly(ChartPolynomial::variable(0)),
            ScalarField::zero(),
            ScalarField::zero(),
        ]);
        let p = [1.0, 0.0, 0.0, 0.0];
        let n = 7;
        let f = jet_flow(&v, &constant_start(p, n), 2).unwrap();
        // x(s) = cos s expanded along axis 2.
        assert!((f[0].coefficient([0, 0, 2, 0]) + 0.5).abs() < 1e-12);
        assert!((f[1].coefficient([0, 0, 3, 0]) + 1.0 / 6.0).abs() < 1e-12);

        let end = rk4_flow(&v, p, std::f64::consts::FRAC_PI_2, 1e-2).unwrap();
        assert!((end[0]).abs() < 1e-8 && (end[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn jet_flow_depends_on_parameters_through_start() {
        // Start map (v1, v2) -> p + v1 e_x, flow along d/dy with time axis 0:
        // F = (p_x + v1, p_y + s, ...).
        let v = VectorField::coordinate(1);
        let b = [0.0; 4];
        let n = 3;
        let start = [
            Jet::variable(1, n, b), // p_x + v1 with p_x = 0
            Jet::constant(4.0, n, b),
            Jet::constant(0.0, n, b),
            Jet::constant(0.0, n, b),
        ];
        let f = jet_flow(&v, &start, 0).unwrap();
        assert!((f[0].coefficient([0, 1, 0, 0]) - 1.0).abs() < 1e-14);
        assert!((f[1].coefficient([1, 0, 0, 0]) - 1.0).abs() < 1e-14);
        assert!((f[1].value() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn rk4_rejects_bad_step() {
        let v = VectorField::coordinate(0);
        assert!(rk4_flow(&v, [0.0; 4], 1.0, 0.0).is_err());
    }
}
