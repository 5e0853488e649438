//! Shared fixtures and oracles for the integration suite.
#![allow(dead_code)]

use engel_cartan::models::{
    normal_form_model, ode_normal_coordinates, rescale_structure, NormalFormCoefficients,
};
use engel_cartan::{ChartPolynomial, EngelStructure, Point, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn sample_points(seed: u64, n: usize, half_width: f64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| std::array::from_fn(|_| rng.gen_range(-half_width..half_width)))
        .collect()
}

/// Normal form with every coefficient switched on.
pub fn perturbed_coefficients() -> NormalFormCoefficients {
    NormalFormCoefficients {
        a1: 0.15,
        a2: -0.1,
        b1: 0.12,
        b2: -0.08,
        b3: 0.1,
        b4: 0.07,
        b5: -0.05,
        b6: 0.06,
        b7: -0.04,
        b8: 0.09,
    }
}

pub fn perturbed_model() -> EngelStructure {
    normal_form_model(&perturbed_coefficients()).unwrap()
}

pub fn ode_model(forcing: ChartPolynomial) -> EngelStructure {
    ode_normal_coordinates(&forcing, &ScalarField::constant(1.0)).unwrap()
}

pub fn q_power(k: u8) -> ChartPolynomial {
    ChartPolynomial::monomial([0, 0, 0, k], 1.0)
}

/// Cubic with both fields rescaled by e^y: the same CR structure presented
/// through a different section of the degenerate line.
pub fn rescaled_cubic() -> EngelStructure {
    let ey = ScalarField::from_poly(ChartPolynomial::variable(1)).exp();
    rescale_structure(&engel_cartan::models::cubic(), &ey)
}

/// Derivative along `axis` by the 7-point sixth-order central stencil.
pub fn stencil_partial<F: Fn(Point) -> f64>(f: F, p: Point, axis: usize, h: f64) -> f64 {
    let shift = |d: i32| {
        let mut q = p;
        q[axis] += f64::from(d) * h;
        f(q)
    };
    ((shift(3) - shift(-3)) / 60.0 - 3.0 * (shift(2) - shift(-2)) / 20.0
        + 3.0 * (shift(1) - shift(-1)) / 4.0)
        / h
}

/// Largest Jacobi defect of the adapted frame at `p`: for every triple and
/// every output slot, the cyclic sum of T_i(phi^d_{jk}) plus the quadratic
/// structure-function terms must vanish.
pub fn jacobi_residual(e: &EngelStructure, p: Point) -> f64 {
    let frame = e.frame();
    let sf = frame.structure_functions(p, 1).unwrap();
    let jets = frame.component_jets(p, 1).unwrap();
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
    worst
}
