//! The verdicts must not depend on how the structure is presented: chart
//! changes and section rescalings are invisible, while genuinely different
//! structures stay visible.

mod common;

use common::*;
use engel_cartan::cartan::{flatness_test, global_scale_test};
use engel_cartan::models::{cubic, pushforward_structure};
use engel_cartan::{ChartPolynomial, EngelStructure, ScalarField};

#[test]
fn flatness_survives_polynomial_chart_change() {
    let x = ChartPolynomial::variable(0);
    let y = ChartPolynomial::variable(1);
    let u1 = ChartPolynomial::variable(2);
    let u2 = ChartPolynomial::variable(3);
    let forward = [
        x.clone(),
        y.clone(),
        u1.add(&x.mul(&x).scaled(0.3)),
        u2.add(&x.mul(&y).scaled(0.2)),
    ];
    let inverse = [
        x.clone(),
        y.clone(),
        u1.sub(&x.mul(&x).scaled(0.3)),
        u2.sub(&x.mul(&y).scaled(0.2)),
    ];
    let e = pushforward_structure(&cubic(), &forward, &inverse);
    let verdict = flatness_test(&e, &sample_points(31, 5, 0.5), 4).unwrap();
    assert!(verdict.flat);
    assert!(verdict.max_residual < 1e-6, "residual {:.3e}", verdict.max_residual);
}

#[test]
fn flatness_survives_section_rescale() {
    // Re-choosing the degenerate-line section as e^y Y drags the partner
    // field to e^y X; the scale normalization inside the pipeline undoes
    // the common factor.
    let verdict = flatness_test(&rescaled_cubic(), &sample_points(37, 3, 0.4), 4).unwrap();
    assert!(verdict.flat);
    assert!(verdict.max_residual < 1e-6, "residual {:.3e}", verdict.max_residual);
}

#[test]
fn scaling_only_one_field_changes_the_structure() {
    // Multiplying the second field alone leaves the distribution and the
    // degenerate line in place but alters the pairing of the two frame
    // directions, which is a different structure; the invariants must see
    // that rather than normalize it away.
    let c = cubic();
    let ey = ScalarField::from_poly(ChartPolynomial::variable(1)).exp();
    let e = EngelStructure {
        x: c.x.clone(),
        y: c.y.scaled_by(&ey),
    };
    let verdict = flatness_test(&e, &sample_points(41, 3, 0.4), 4).unwrap();
    assert!(!verdict.flat);
    assert!(verdict.max_residual > 1e-3, "residual {:.3e}", verdict.max_residual);
}

#[test]
fn global_scale_recovers_exponential_multiplier() {
    // Cubic rescaled by e^{-0.3 x}: the scaling form is closed and the
    // recovered multiplier is e^{-0.6 (x - x0)} with no transverse drift.
    let g = ScalarField::from_poly(ChartPolynomial::variable(0).scaled(-0.3)).exp();
    let e = engel_cartan::models::rescale_structure(&cubic(), &g);
    let p = [0.1, -0.2, 0.3, 0.05];
    let gs = global_scale_test(&e, p, 4).unwrap();
    assert!(gs.closed);
    assert!(gs.d_varpi_residual < 1e-12);
    assert!(gs.transverse_residual.unwrap() < 1e-12);
    assert!(gs.log_derivative_residual.unwrap() < 1e-12);
    let jet = gs.scale_jet.unwrap();
    assert!((jet.value() - 1.0).abs() < 1e-9);
    let dx = jet.partial(0).unwrap().value();
    assert!((dx - (-0.6)).abs() < 1e-9);
    for axis in 1..4 {
        assert!(jet.partial(axis).unwrap().value().abs() < 1e-9);
    }
}
