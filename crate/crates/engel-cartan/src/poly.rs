//! Polynomials in the four chart variables.
//!
//! Model structures are defined by polynomial vector-field components; this
//! representation evaluates them either directly at points or as jets at any
//! order and base point. Term lists are kept sorted and duplicate-free so two
//! equal polynomials compare equal.

use serde::{Deserialize, Serialize};

use crate::error::Point;
use crate::jets::simplex::MultiIndex;
use crate::jets::Jet;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChartPolynomial {
    terms: Vec<(MultiIndex, f64)>,
}

fn degree_of(m: &MultiIndex) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

impl ChartPolynomial {
    pub fn new(terms: Vec<(MultiIndex, f64)>) -> ChartPolynomial {
        let mut poly = ChartPolynomial { terms };
        poly.normalize();
        poly
    }

    pub fn zero() -> ChartPolynomial {
        ChartPolynomial::default()
    }

    pub fn constant(c: f64) -> ChartPolynomial {
        ChartPolynomial::new(vec![([0; 4], c)])
    }

    pub fn variable(axis: usize) -> ChartPolynomial {
        let mut m = [0u8; 4];
        m[axis] = 1;
        ChartPolynomial::new(vec![(m, 1.0)])
    }

    pub fn monomial(m: MultiIndex, c: f64) -> ChartPolynomial {
        ChartPolynomial::new(vec![(m, c)])
    }

    fn normalize(&mut self) {
        self.terms
            .sort_by_key(|(m, _)| (degree_of(m), m.map(|e| u8::MAX - e)));
        let mut merged: Vec<(MultiIndex, f64)> = Vec::with_capacity(self.terms.len());
        for &(m, c) in &self.terms {
            match merged.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => merged.push((m, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        self.terms = merged;
    }

    pub fn terms(&self) -> &[(MultiIndex, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(m, _)| degree_of(m)).max().unwrap_or(0)
    }

    pub fn add(&self, other: &ChartPolynomial) -> ChartPolynomial {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        ChartPolynomial::new(terms)
    }

    pub fn sub(&self, other: &ChartPolynomial) -> ChartPolynomial {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, factor: f64) -> ChartPolynomial {
        ChartPolynomial::new(self.terms.iter().map(|&(m, c)| (m, factor * c)).collect())
    }

    pub fn mul(&self, other: &ChartPolynomial) -> ChartPolynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                let m = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2], ma[3] + mb[3]];
                terms.push((m, ca * cb));
            }
        }
        ChartPolynomial::new(terms)
    }

    pub fn partial(&self, axis: usize) -> ChartPolynomial {
        let mut terms = Vec::new();
        for &(m, c) in &self.terms {
            if m[axis] == 0 {
                continue;
            }
            let mut lower = m;
            lower[axis] -= 1;
            terms.push((lower, c * m[axis] as f64));
        }
        ChartPolynomial::new(terms)
    }

    pub fn eval_f64(&self, x: Point) -> f64 {
        let mut acc = 0.0;
        for &(m, c) in &self.terms {
            let mut term = c;
            for (axis, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    term *= x[axis];
                }
            }
            acc += term;
        }
        acc
    }

    /// Jet of the polynomial at `base`; exact whenever `order >= self.degree()`.
    pub fn eval_jet(&self, order: usize, base: Point) -> Jet {
        let mut max_exp = [0usize; 4];
        for (m, _) in &self.terms {
            for axis in 0..4 {
                max_exp[axis] = max_exp[axis].max(m[axis] as usize);
            }
        }
        let mut powers: Vec<Vec<Jet>> = Vec::with_capacity(4);
        for (axis, &top) in max_exp.iter().enumerate() {
            let x = Jet::variable(axis, order, base);
            let mut list = vec![Jet::constant(1.0, order, base)];
            for e in 1..=top {
                let next = list[e - 1].mul(&x).expect("powers share order and base");
                list.push(next);
            }
            powers.push(list);
        }
        let mut out = Jet::zero(order, base);
        for &(m, c) in &self.terms {
            let mut term = Jet::constant(c, order, base);
            for (axis, &e) in m.iter().enumerate() {
                if e > 0 {
                    term = term
                        .mul(&powers[axis][e as usize])
                        .expect("powers share order and base");
                }
            }
            out = out.add(&term).expect("terms share order and base");
        }
        out
    }
}

/// Real and imaginary parts of `z^a * conj(z)^b` for `z = x + i y`, where `x`
/// and `y` are the first two chart variables. Expanded over the Gaussian
/// integers, so the coefficients are exact.
pub fn complex_monomial_parts(a: u32, b: u32) -> (ChartPolynomial, ChartPolynomial) {
    // acc maps (i, j) exponents of x^i y^j to a Gaussian integer (re, im).
    let mut acc: Vec<(u8, u8, i64, i64)> = vec![(0, 0, 1, 0)];
    let multiply = |acc: &[(u8, u8, i64, i64)], conjugate: bool| {
        let mut next: Vec<(u8, u8, i64, i64)> = Vec::with_capacity(acc.len() * 2);
        let mut push = |i: u8, j: u8, re: i64, im: i64| {
            if let Some(slot) = next.iter_mut().find(|(si, sj, _, _)| *si == i && *sj == j) {
                slot.2 += re;
                slot.3 += im;
            } else {
                next.push((i, j, re, im));
            }
        };
        for &(i, j, re, im) in acc {
            // times x
            push(i + 1, j, re, im);
            // times +/- i y
            if conjugate {
                push(i, j + 1, im, -re);
            } else {
                push(i, j + 1, -im, re);
            }
        }
        next
    };
    for _ in 0..a {
        acc = multiply(&acc, false);
    }
    for _ in 0..b {
        acc = multiply(&acc, true);
    }
    let mut re_terms = Vec::new();
    let mut im_terms = Vec::new();
    for &(i, j, re, im) in &acc {
        let m = [i, j, 0, 0];
        if re != 0 {
            re_terms.push((m, re as f64));
        }
        if im != 0 {
            im_terms.push((m, im as f64));
        }
    }
    (
        ChartPolynomial::new(re_terms),
        ChartPolynomial::new(im_terms),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_evaluation() {
        // x^2 y - 3 u2
        let p = ChartPolynomial::new(vec![([2, 1, 0, 0], 1.0), ([0, 0, 0, 1], -3.0)]);
        assert_eq!(p.eval_f64([2.0, 3.0, 0.0, 1.0]), 12.0 - 3.0);
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn duplicate_terms_merge_and_zeros_drop() {
        let p = ChartPolynomial::new(vec![
            ([1, 0, 0, 0], 2.0),
            ([1, 0, 0, 0], 3.0),
            ([0, 1, 0, 0], 1.0),
            ([0, 1, 0, 0], -1.0),
        ]);
        assert_eq!(p.terms(), &[([1, 0, 0, 0], 5.0)]);
    }

    #[test]
    fn product_and_derivative() {
        let x = ChartPolynomial::variable(0);
        let y = ChartPolynomial::variable(1);
        // (x^2 + y^2), d/dy -> 2y
        let p = x.mul(&x).add(&y.mul(&y));
        assert_eq!(p.partial(1), ChartPolynomial::monomial([0, 1, 0, 0], 2.0));
        assert_eq!(p.partial(2), ChartPolynomial::zero());
        let q = p.mul(&x);
        assert_eq!(q.eval_f64([2.0, 1.0, 0.0, 0.0]), 10.0);
        assert_eq!(p.sub(&p), ChartPolynomial::zero());
    }

    #[test]
    fn jet_evaluation_matches_direct() {
        let p = ChartPolynomial::new(vec![
            ([3, 0, 0, 0], 0.5),
            ([1, 1, 0, 0], -2.0),
            ([0, 0, 2, 1], 1.25),
            ([0, 0, 0, 0], 4.0),
        ]);
        let base = [0.3, -0.7, 1.1, 0.2];
        let jet = p.eval_jet(4, base);
        for probe in [base, [0.5, -0.5, 1.0, 0.0], [-1.0, 2.0, 0.25, 1.5]] {
            assert!((jet.eval(probe) - p.eval_f64(probe)).abs() < 1e-12);
        }
        assert!((jet.value() - p.eval_f64(base)).abs() < 1e-14);
    }

    #[test]
    fn complex_parts_of_low_monomials() {
        let (re, im) = complex_monomial_parts(1, 0);
        assert_eq!(re, ChartPolynomial::variable(0));
        assert_eq!(im, ChartPolynomial::variable(1));

        let (re, im) = complex_monomial_parts(2, 0);
        // z^2 = (x^2 - y^2) + 2ixy
        assert_eq!(
            re,
            ChartPolynomial::new(vec![([2, 0, 0, 0], 1.0), ([0, 2, 0, 0], -1.0)])
        );
        assert_eq!(im, ChartPolynomial::monomial([1, 1, 0, 0], 2.0));

        let (re, im) = complex_monomial_parts(1, 1);
        // |z|^2 is real
        assert_eq!(
            re,
            ChartPolynomial::new(vec![([2, 0, 0, 0], 1.0), ([0, 2, 0, 0], 1.0)])
        );
        assert!(im.is_zero());

        let (re, _) = complex_monomial_parts(2, 1);
        // z^2 conj(z) = z |z|^2, real part x(x^2 + y^2)
        assert_eq!(
            re,
            ChartPolynomial::new(vec![([3, 0, 0, 0], 1.0), ([1, 2, 0, 0], 1.0)])
        );
    }

    #[test]
    fn serde_round_trip() {
        let p = ChartPolynomial::new(vec![([2, 1, 0, 0], 1.5), ([0, 0, 1, 0], -2.0)]);
        let json = serde_json::to_string(&p).unwrap();
        let back: ChartPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }
}
