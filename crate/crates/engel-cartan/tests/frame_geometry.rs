//! Cross-module frame checks: jets against finite differences, coframe
//! duality at jet level, the Jacobi identity, and pointwise tensoriality of
//! the Levi bracket component.

mod common;

use common::*;
use engel_cartan::models::cubic;
use engel_cartan::{ChartPolynomial, Jet, ScalarField, VectorField};

#[test]
fn frame_jets_match_finite_differences() {
    let e = perturbed_model();
    let frame = e.frame();
    for &p in &sample_points(11, 2, 0.3) {
        let jets = frame.component_jets(p, 1).unwrap();
        for beta in 0..4 {
            for comp in 0..4 {
                for axis in 0..4 {
                    let fd = stencil_partial(
                        |q| frame.component_jets(q, 0).unwrap()[beta][comp].value(),
                        p,
                        axis,
                        0.005,
                    );
                    let mut idx = [0u8; 4];
                    idx[axis] = 1;
                    let exact = jets[beta][comp].coefficient(idx);
                    assert!(
                        (fd - exact).abs() < 1e-7,
                        "frame {beta} component {comp} axis {axis}: fd {fd} vs jet {exact}"
                    );
                }
            }
        }
    }
}

#[test]
fn structure_function_jets_match_finite_differences() {
    let e = perturbed_model();
    let frame = e.frame();
    let p = [0.15, -0.1, 0.2, -0.05];
    let sf = frame.structure_functions(p, 1).unwrap();
    for (alpha, beta, gamma) in [(2, 0, 1), (3, 0, 2), (1, 1, 2), (0, 0, 3), (2, 1, 3), (3, 2, 3)] {
        let field = frame.structure_function_field(alpha, beta, gamma);
        let jet = sf.phi(alpha, beta, gamma);
        for axis in 0..4 {
            let fd = stencil_partial(|q| field.value(q).unwrap(), p, axis, 0.005);
            let mut idx = [0u8; 4];
            idx[axis] = 1;
            assert!(
                (fd - jet.coefficient(idx)).abs() < 1e-7,
                "phi^{alpha}_({beta}{gamma}) axis {axis}"
            );
        }
    }
}

#[test]
fn coframe_duality_holds_at_jet_level() {
    for e in [cubic(), perturbed_model(), ode_model(q_power(2))] {
        for &p in &sample_points(17, 3, 0.4) {
            let frame = e.frame();
            let jets = frame.component_jets(p, 2).unwrap();
            let coframe = frame.dual_coframe(p, 2).unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    let mut acc = Jet::zero(2, p);
                    for c in 0..4 {
                        acc = acc.add(&coframe[a][c].mul(&jets[b][c]).unwrap()).unwrap();
                    }
                    let want = if a == b { 1.0 } else { 0.0 };
                    let dev = acc.sub(&Jet::constant(want, 2, p)).unwrap().norm();
                    assert!(dev < 1e-10, "pairing ({a},{b}) deviates by {dev:.3e}");
                }
            }
        }
    }
}

#[test]
fn jacobi_identity_on_test_frames() {
    let structures: Vec<(&str, engel_cartan::EngelStructure)> = vec![
        ("cubic", cubic()),
        ("perturbed normal form", perturbed_model()),
        ("ode q^2", ode_model(q_power(2))),
        ("ode q^3", ode_model(q_power(3))),
        ("rescaled cubic", rescaled_cubic()),
    ];
    for (name, e) in &structures {
        for &p in &sample_points(23, 3, 0.3) {
            let r = jacobi_residual(e, p);
            assert!(r < 1e-9, "{name}: Jacobi residual {r:.3e} at {p:?}");
        }
    }
}

#[test]
fn levi_bracket_component_is_pointwise_tensorial() {
    // The phi^2 component of a bracket of sections of D, read at p, only
    // sees the section values at p: scalar factors come out pointwise and
    // sections agreeing at p give the same number.
    for e in [cubic(), perturbed_model()] {
        let p = [0.1, 0.2, -0.15, 0.05];
        let frame = e.frame();
        let coframe = frame.dual_coframe(p, 0).unwrap();
        let phi2_of = |v: &VectorField| -> f64 {
            let jets = v.jets(p, 0).unwrap();
            (0..4).map(|c| coframe[2][c].value() * jets[c].value()).sum()
        };
        let poly = |terms: &[([u8; 4], f64)]| ScalarField::from_poly(ChartPolynomial::new(terms.to_vec()));

        let a = poly(&[([0; 4], 1.0), ([1, 0, 0, 0], 0.3), ([0, 0, 1, 0], -0.2)]);
        let b = poly(&[([0, 1, 0, 0], 0.5), ([0, 0, 0, 1], 0.1)]);
        let c = poly(&[([0; 4], -0.4), ([0, 1, 0, 0], 0.25)]);
        let d = poly(&[([0; 4], 1.2), ([1, 1, 0, 0], -0.15)]);
        let xs = e.x.scaled_by(&a).add(&e.y.scaled_by(&b));
        let ys = e.x.scaled_by(&c).add(&e.y.scaled_by(&d));
        let g = poly(&[([0; 4], 0.7), ([0, 1, 0, 0], 0.4), ([0, 0, 0, 1], 0.1)]);

        let base = phi2_of(&xs.lie_bracket(&ys));
        let scaled_first = phi2_of(&xs.scaled_by(&g).lie_bracket(&ys));
        let scaled_second = phi2_of(&xs.lie_bracket(&ys.scaled_by(&g)));
        let gp = g.value(p).unwrap();
        assert!((scaled_first - gp * base).abs() < 1e-9);
        assert!((scaled_second - gp * base).abs() < 1e-9);

        // Modify the first section by a multiple vanishing at p.
        let vanish = poly(&[([1, 0, 0, 0], 1.0), ([0; 4], -p[0])]);
        let moved = xs.add(&e.y.scaled_by(&vanish));
        let same_value = phi2_of(&moved.lie_bracket(&ys));
        assert!((same_value - base).abs() < 1e-9);
    }
}
