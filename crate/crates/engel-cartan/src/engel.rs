//! Engel CR structures: validation, degenerate-line alignment, and scale
//! normalization.
//!
//! A structure is a pair of vector fields (X, Y) spanning the CR plane
//! field, with Y along the degenerate line. The adapted frame is
//! (X, Y, [X, Y], [X, [X, Y]]).

use crate::error::{Error, Point, Result};
use crate::fields::{Frame, ScalarField, VectorField};
use crate::flows::jet_flow;
use crate::jets::linalg::det4;
use crate::jets::{compose, invert_map, Jet};

pub const DEGENERACY_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Clone)]
pub struct EngelStructure {
    pub x: VectorField,
    pub y: VectorField,
}

impl std::fmt::Debug for EngelStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("EngelStructure { .. }")
    }
}

impl EngelStructure {
    /// Adapted frame (X, Y, [X, Y], [X, [X, Y]]).
    pub fn frame(&self) -> Frame {
        Frame::adapted(&self.x, &self.y)
    }
}

/// Pointwise health report from [`validate`].
#[derive(Clone, Copy, Debug)]
pub struct EngelDiagnostics {
    pub point: Point,
    /// det(X, Y, [X, Y], [X, [X, Y]]).
    pub frame_det: f64,
    /// |det with [Y, [X, Y]] in the last slot| relative to the larger of
    /// the two determinants. Zero iff Y spans the degenerate line.
    pub alignment_residual: f64,
}

/// Check the Engel condition and degenerate-line alignment at each point.
pub fn validate(e: &EngelStructure, points: &[Point]) -> Result<Vec<EngelDiagnostics>> {
    let z = e.x.lie_bracket(&e.y);
    let xz = e.x.lie_bracket(&z);
    let yz = e.y.lie_bracket(&z);
    points
        .iter()
        .map(|&p| {
            let rows = [e.x.values(p)?, e.y.values(p)?, z.values(p)?, xz.values(p)?];
            let mut rows_y = rows;
            rows_y[3] = yz.values(p)?;
            let d1 = det4(&rows);
            let d2 = det4(&rows_y);
            let scale = d1.abs().max(d2.abs());
            if scale <= DEGENERACY_TOL {
                return Err(Error::EngelDegenerate(p));
            }
            let alignment_residual = d2.abs() / scale;
            if alignment_residual > DEGENERACY_TOL {
                return Err(Error::NotD0Aligned(p));
            }
            Ok(EngelDiagnostics { point: p, frame_det: d1, alignment_residual })
        })
        .collect()
}

/// Locate the degenerate line inside the plane field spanned by an
/// arbitrary frame (U, V) with V = JU.
///
/// Returns coefficient fields (alpha, beta) with Y = alpha U + beta V
/// spanning the degenerate line near `p`, normalized so that the larger of
/// |alpha|, |beta| at `p` equals one (ties keep beta positive).
pub fn find_d0(u: &VectorField, v: &VectorField, p: Point) -> Result<(ScalarField, ScalarField)> {
    let z = u.lie_bracket(v);
    let uz = u.lie_bracket(&z);
    let vz = v.lie_bracket(&z);

    let base = [u.values(p)?, v.values(p)?, z.values(p)?];
    let mut rows = [base[0], base[1], base[2], uz.values(p)?];
    let du = det4(&rows).abs();
    rows[3] = vz.values(p)?;
    let dv = det4(&rows).abs();
    if du.max(dv) <= DEGENERACY_TOL {
        return Err(Error::EngelDegenerate(p));
    }
    let w4 = if du >= dv { uz.clone() } else { vz.clone() };
    let frame = Frame { fields: [u.clone(), v.clone(), z.clone(), w4] };

    // c_U, c_V: last coframe component applied to [U, Z], [V, Z]. A plane
    // direction alpha U + beta V is degenerate iff alpha c_U + beta c_V = 0.
    let top_coefficient = |target: VectorField| -> ScalarField {
        let frame = frame.clone();
        ScalarField::new(move |q, n| {
            let coframe = frame.dual_coframe(q, n)?;
            let jets = target.jets(q, n)?;
            let mut acc = Jet::zero(n, q);
            for c in 0..4 {
                acc = acc.add(&coframe[3][c].mul(&jets[c])?)?;
            }
            Ok(acc)
        })
    };
    let alpha = top_coefficient(vz).neg();
    let beta = top_coefficient(uz);

    let a0 = alpha.value(p)?;
    let b0 = beta.value(p)?;
    let pivot = if a0.abs() > b0.abs() { a0 } else { b0 };
    Ok((
        alpha.scaled(1.0 / pivot).cached(),
        beta.scaled(1.0 / pivot).cached(),
    ))
}

/// Levi-type brackets of the adapted frame at a point: the coefficient of
/// [X, Y] on the third frame leg and of [X, [X, Y]], [Y, [X, Y]] on the
/// fourth. For a valid aligned structure these are (1, 1, 0).
#[derive(Clone, Copy, Debug)]
pub struct LeviTanakaData {
    pub l1_xy: f64,
    pub l2_x: f64,
    pub l2_y: f64,
}

pub fn levi_tanaka_at(e: &EngelStructure, p: Point) -> Result<LeviTanakaData> {
    let sf = e.frame().structure_functions(p, 0)?;
    Ok(LeviTanakaData {
        l1_xy: sf.phi(2, 0, 1).value(),
        l2_x: sf.phi(3, 0, 2).value(),
        l2_y: sf.phi(3, 1, 2).value(),
    })
}

/// Rescale (X, Y) -> (tau X, tau Y) so that the transversal structure
/// functions phi^2_(y2), phi^3_(y2) of the new adapted frame vanish near
/// `p`, with tau(p) = 1.
///
/// `order`: jet order of the constructed log-scale. The returned fields
/// answer jet queries up to this order and report `InsufficientOrder`
/// above it. Structures already normalized are returned unchanged.
///
/// The log-scale solves T_y(log tau) = -(1/3) phi^2_(y2) with log tau = 0
/// on the transversal flow-box through `p` spanned by (X, [X, Y],
/// [X, [X, Y]]); the solution is assembled as a Taylor series in the
/// Y-flow time and pulled back through the inverted flow-box chart.
pub fn normalize_scale(e: &EngelStructure, p: Point, order: usize) -> Result<EngelStructure> {
    if order < 4 {
        return Err(Error::InsufficientOrder { what: "scale normalization", needed: 4, got: order });
    }
    let frame = e.frame();
    let g22 = frame.structure_function_field(2, 1, 2);
    // Structures carrying an order-capped scale answer the probe at the
    // order they can still serve.
    let probe = match g22.jet(p, order) {
        Ok(jet) => jet,
        Err(Error::InsufficientOrder { got, .. }) if got >= 3 => g22.jet(p, got - 3)?,
        Err(err) => return Err(err),
    };
    if probe.norm() < 1e-10 {
        return Ok(e.clone());
    }

    let param: Point = [0.0; 4];
    let start = [0, 1, 2, 3].map(|i| Jet::constant(p[i], order, param));
    let f0 = jet_flow(&frame.fields[3], &start, 3)?;
    let f0 = jet_flow(&frame.fields[2], &f0, 2)?;
    let f0 = jet_flow(&frame.fields[0], &f0, 1)?;
    let flow = jet_flow(&frame.fields[1], &f0, 0)?;

    // sigma(flow(s, v)) = sum_k s^k/k! (T_y^(k-1) g)(F0(v)), g = -phi^2_(y2)/3.
    // The T_y towers run on jets: each derivative costs one order, and the
    // s^k factor pays for it, so a single order-n sample of g suffices.
    let y_jets = e.y.jets(p, order)?;
    let mut g_cur = g22.jet(p, order)?.scaled(-1.0 / 3.0);
    let s_dev = Jet::deviation(0, order, param);
    let mut s_pow = Jet::constant(1.0, order, param);
    let mut factorial = 1.0;
    let mut sigma_tilde = Jet::zero(order, param);
    for k in 1..=order {
        s_pow = s_pow.mul(&s_dev)?;
        factorial *= k as f64;
        // degrees invented by the promotion die against s^k past the order
        let along = compose(&g_cur.promoted(order)?, &f0)?;
        sigma_tilde = sigma_tilde.add(&along.mul(&s_pow)?.scaled(1.0 / factorial))?;
        if k < order {
            let m = g_cur.order() - 1;
            let mut next = Jet::zero(m, p);
            for c in 0..4 {
                next = next.add(&y_jets[c].truncated(m)?.mul(&g_cur.partial(c)?)?)?;
            }
            g_cur = next;
        }
    }

    let inverse = invert_map(&flow)?;
    let sigma = compose(&sigma_tilde, &inverse)?;
    let sigma_field = ScalarField::new(move |q, m| {
        if m > sigma.order() {
            return Err(Error::InsufficientOrder {
                what: "normalized scale jet",
                needed: m,
                got: sigma.order(),
            });
        }
        sigma.translated(q).truncated(m)
    });
    let tau = sigma_field.exp().cached();
    let result = EngelStructure { x: e.x.scaled_by(&tau), y: e.y.scaled_by(&tau) };

    let sf = result.frame().structure_functions(p, 1)?;
    let r2 = sf.phi(2, 1, 2).norm();
    let r3 = sf.phi(3, 1, 2).norm();
    if r2 > RESIDUAL_TOL || r3 > RESIDUAL_TOL {
        return Err(Error::NormalizationFailed(format!(
            "residual structure functions {r2:.3e}, {r3:.3e} at {p:?}"
        )));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::poly::ChartPolynomial;
    use rand::{Rng, SeedableRng};

    fn seeded_points(n: usize, seed: u64) -> Vec<Point> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| [(); 4].map(|_| rng.gen_range(-1.0..1.0))).collect()
    }

    #[test]
    fn cubic_validates_everywhere() {
        let e = models::cubic();
        let reports = validate(&e, &seeded_points(10, 7)).unwrap();
        for r in reports {
            assert!((r.frame_det + 0.25).abs() < 1e-12);
            assert!(r.alignment_residual < 1e-12);
        }
    }

    #[test]
    fn coordinate_plane_is_degenerate() {
        let e = EngelStructure {
            x: VectorField::coordinate(0),
            y: VectorField::coordinate(1),
        };
        assert!(matches!(
            validate(&e, &[[0.0; 4]]),
            Err(Error::EngelDegenerate(_))
        ));
    }

    #[test]
    fn swapped_cubic_is_misaligned() {
        let e = models::cubic();
        let swapped = EngelStructure { x: e.y.clone(), y: e.x.clone() };
        assert!(matches!(
            validate(&swapped, &[[0.2, -0.1, 0.4, 0.0]]),
            Err(Error::NotD0Aligned(_))
        ));
    }

    #[test]
    fn find_d0_identifies_the_cubic_line() {
        let e = models::cubic();
        let p = [0.3, 0.2, -0.5, 0.1];
        let (alpha, beta) = find_d0(&e.x, &e.y, p).unwrap();
        assert!(alpha.value(p).unwrap().abs() < 1e-10);
        assert!((beta.value(p).unwrap() - 1.0).abs() < 1e-10);
        // swapped arguments: the line is the first slot now
        let (alpha, beta) = find_d0(&e.y, &e.x, p).unwrap();
        assert!((alpha.value(p).unwrap() - 1.0).abs() < 1e-10);
        assert!(beta.value(p).unwrap().abs() < 1e-10);
    }

    #[test]
    fn find_d0_is_frame_independent() {
        let e = models::cubic();
        let p = [0.15, -0.35, 0.6, -0.2];
        // recombined frame of the same plane field
        let u = e.x.scaled(2.0).add(&e.y.scaled(0.3));
        let v = e.x.scaled(1.0).add(&e.y.scaled(-0.5));
        let (alpha, beta) = find_d0(&u, &v, p).unwrap();
        let dir = u.scaled_by(&alpha).add(&v.scaled_by(&beta));
        // the located line must be parallel to Y = the cubic degenerate line
        let d = dir.values(p).unwrap();
        let y = e.y.values(p).unwrap();
        let dot: f64 = d.iter().zip(&y).map(|(a, b)| a * b).sum();
        let yy: f64 = y.iter().map(|a| a * a).sum();
        let residual: f64 = (0..4).map(|i| (d[i] - dot / yy * y[i]).powi(2)).sum::<f64>().sqrt();
        let dnorm = d.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(dnorm > 1e-3, "degenerate direction collapsed");
        assert!(residual < 1e-9 * dnorm.max(1.0), "residual {residual}");
    }

    #[test]
    fn levi_tanaka_of_cubic() {
        let e = models::cubic();
        for p in [[0.0; 4], [0.4, -0.6, 0.2, 0.9]] {
            let lt = levi_tanaka_at(&e, p).unwrap();
            assert!((lt.l1_xy - 1.0).abs() < 1e-10);
            assert!((lt.l2_x - 1.0).abs() < 1e-10);
            assert!(lt.l2_y.abs() < 1e-10);
        }
    }

    #[test]
    fn normalize_leaves_normalized_structures_alone() {
        let e = models::cubic();
        let p = [0.1, 0.2, 0.3, 0.4];
        let n = normalize_scale(&e, p, 5).unwrap();
        let before = e.x.jets(p, 3).unwrap();
        let after = n.x.jets(p, 3).unwrap();
        for c in 0..4 {
            assert!(before[c].sub(&after[c]).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn normalize_recovers_constant_multiple_of_cubic() {
        // e^y-prescale of the cubic: tau must reduce to C e^{-y}, so the
        // normalized structure is a constant multiple of the cubic one.
        let e = models::cubic();
        let f = ScalarField::from_poly(ChartPolynomial::variable(1)).exp();
        let scaled = models::rescale_structure(&e, &f);
        let p = [0.2, -0.3, 0.1, 0.4];
        let n = normalize_scale(&scaled, p, 6).unwrap();
        let c = (p[1]).exp(); // tau(p) = 1 forces the residual constant e^{y_p}
        for (got, reference) in [(&n.x, &e.x), (&n.y, &e.y)] {
            let gj = got.jets(p, 3).unwrap();
            let rj = reference.jets(p, 3).unwrap();
            for k in 0..4 {
                let want = rj[k].scaled(c);
                assert!(
                    gj[k].sub(&want).unwrap().norm() < 1e-8,
                    "component {k} differs by {}",
                    gj[k].sub(&want).unwrap().norm()
                );
            }
        }
    }

    #[test]
    fn normalize_is_idempotent() {
        let e = models::cubic();
        let f = ScalarField::from_poly(ChartPolynomial::variable(1)).exp();
        let scaled = models::rescale_structure(&e, &f);
        let p = [0.0, 0.1, 0.0, 0.0];
        let once = normalize_scale(&scaled, p, 5).unwrap();
        let twice = normalize_scale(&once, p, 5).unwrap();
        let a = once.x.jets(p, 3).unwrap();
        let b = twice.x.jets(p, 3).unwrap();
        for c in 0..4 {
            assert!(a[c].sub(&b[c]).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn normalize_requires_enough_order() {
        let e = models::cubic();
        assert!(matches!(
            normalize_scale(&e, [0.0; 4], 3),
            Err(Error::InsufficientOrder { .. })
        ));
    }

    #[test]
    fn normalized_fields_report_order_exhaustion() {
        let e = models::cubic();
        let f = ScalarField::from_poly(ChartPolynomial::variable(1)).exp();
        let scaled = models::rescale_structure(&e, &f);
        let p = [0.0; 4];
        let n = normalize_scale(&scaled, p, 4).unwrap();
        match n.x.component(0).jet(p, 9) {
            Err(Error::InsufficientOrder { needed, got, .. }) => {
                assert_eq!(needed, 9);
                assert_eq!(got, 4);
            }
            other => panic!("expected order exhaustion, got {other:?}"),
        }
    }
}
