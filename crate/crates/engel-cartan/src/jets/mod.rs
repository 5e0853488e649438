//! Truncated Taylor expansions ("jets") of smooth functions of four chart
//! variables, with exact arithmetic on the retained coefficients.
//!
//! A [`Jet`] of order `n` at base point `p` stores the coefficients `c_a` of
//! `f(p + h) = sum_a c_a h^a` over all multi-indices `a` with `|a| <= n`.
//! Binary operations demand matching order and base point; nothing is
//! truncated or re-centered implicitly. Use [`Jet::truncated`] and
//! [`Jet::translated`] when that is actually wanted.

pub mod linalg;
pub mod simplex;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Point, Result};
use simplex::{MultiIndex, SimplexTable, VARS};

#[derive(Clone)]
pub struct Jet {
    order: usize,
    base: Point,
    coeffs: Vec<f64>,
    table: Arc<SimplexTable>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("base", &self.base)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Jet) -> bool {
        self.order == other.order && self.base == other.base && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn zero(order: usize, base: Point) -> Jet {
        let table = simplex::table(order);
        let coeffs = vec![0.0; table.indices.len()];
        Jet {
            order,
            base,
            coeffs,
            table,
        }
    }

    pub fn constant(value: f64, order: usize, base: Point) -> Jet {
        let mut jet = Jet::zero(order, base);
        jet.coeffs[0] = value;
        jet
    }

    /// The chart coordinate `x_axis` as a function near `base`: constant term
    /// `base[axis]`, unit linear term.
    pub fn variable(axis: usize, order: usize, base: Point) -> Jet {
        assert!(axis < VARS, "chart axis out of range");
        let mut jet = Jet::constant(base[axis], order, base);
        if order >= 1 {
            jet.coeffs[1 + axis] = 1.0;
        }
        jet
    }

    /// The deviation `x_axis - base[axis]`: zero constant term, unit linear term.
    pub fn deviation(axis: usize, order: usize, base: Point) -> Jet {
        let mut jet = Jet::variable(axis, order, base);
        jet.coeffs[0] = 0.0;
        jet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn base_point(&self) -> Point {
        self.base
    }

    /// Value of the function at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Taylor coefficient for the multi-index `m`. Panics if `|m|` exceeds the
    /// jet order; that is a caller bug, not a data condition.
    pub fn coefficient(&self, m: MultiIndex) -> f64 {
        let rank = self
            .table
            .try_rank_of(&m)
            .unwrap_or_else(|| panic!("multi-index {m:?} exceeds jet order {}", self.order));
        self.coeffs[rank as usize]
    }

    /// Largest coefficient magnitude.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    fn check_compat(&self, other: &Jet) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        if self.base != other.base {
            return Err(Error::BasePointMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c -= o;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compat(other)?;
        let mut out = Jet::zero(self.order, self.base);
        self.table
            .multiply_into(&self.coeffs, &other.coeffs, &mut out.coeffs);
        Ok(out)
    }

    pub fn neg(&self) -> Jet {
        self.scaled(-1.0)
    }

    pub fn scaled(&self, factor: f64) -> Jet {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= factor;
        }
        out
    }

    /// Accumulate `factor * other`; callers guarantee compatibility.
    fn axpy(&mut self, factor: f64, other: &Jet) {
        debug_assert_eq!(self.order, other.order);
        debug_assert_eq!(self.base, other.base);
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += factor * o;
        }
    }

    /// Drop all coefficients of degree above `order`. Lowering the order is
    /// the only direction that makes sense; raising it would invent data.
    pub fn truncated(&self, order: usize) -> Result<Jet> {
        if order > self.order {
            return Err(Error::DomainError(
                "truncation order exceeds the jet's order",
            ));
        }
        let mut out = Jet::zero(order, self.base);
        let n = out.coeffs.len();
        out.coeffs.copy_from_slice(&self.coeffs[..n]);
        Ok(out)
    }

    /// Zero-extend to a higher order. The added coefficients are claims, not
    /// data: only valid when the jet is an exact polynomial or when every
    /// use of the added degrees is provably discarded downstream.
    pub fn promoted(&self, order: usize) -> Result<Jet> {
        if order < self.order {
            return Err(Error::DomainError("promotion must not lower the order"));
        }
        let mut out = Jet::zero(order, self.base);
        out.coeffs[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        Ok(out)
    }

    /// Series of the analytic function with nilpotent-part coefficients `c`:
    /// returns `sum_k c[k] * u^k` where `u` is this jet minus its value.
    fn analytic(&self, c: &[f64]) -> Jet {
        debug_assert_eq!(c.len(), self.order + 1);
        let mut u = self.clone();
        u.coeffs[0] = 0.0;
        let mut out = Jet::constant(c[0], self.order, self.base);
        let mut power = u.clone();
        for &ck in &c[1..] {
            out.axpy(ck, &power);
            power = power.mul(&u).expect("powers share order and base");
        }
        out
    }

    /// Multiplicative inverse. Requires a non-vanishing value at the base point.
    pub fn invert(&self) -> Result<Jet> {
        let a0 = self.value();
        if a0 == 0.0 {
            return Err(Error::SingularJet);
        }
        let mut c = Vec::with_capacity(self.order + 1);
        let mut ck = 1.0 / a0;
        c.push(ck);
        for _ in 0..self.order {
            ck /= -a0;
            c.push(ck);
        }
        Ok(self.analytic(&c))
    }

    pub fn exp(&self) -> Jet {
        let scale = self.value().exp();
        let mut c = Vec::with_capacity(self.order + 1);
        let mut ck = scale;
        c.push(ck);
        for k in 1..=self.order {
            ck /= k as f64;
            c.push(ck);
        }
        self.analytic(&c)
    }

    pub fn ln(&self) -> Result<Jet> {
        let a0 = self.value();
        if a0 <= 0.0 {
            return Err(Error::DomainError(
                "logarithm needs a positive value at the base point",
            ));
        }
        let mut c = Vec::with_capacity(self.order + 1);
        c.push(a0.ln());
        let mut pow = 1.0;
        for k in 1..=self.order {
            pow *= a0;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            c.push(sign / (k as f64 * pow));
        }
        Ok(self.analytic(&c))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.analytic(&circular_series(self.order, [s, c, -s, -c]))
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.analytic(&circular_series(self.order, [c, -s, -c, s]))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a0 = self.value();
        if a0 <= 0.0 {
            return Err(Error::DomainError(
                "square root needs a positive value at the base point",
            ));
        }
        let mut c = Vec::with_capacity(self.order + 1);
        let mut binom = a0.sqrt();
        c.push(binom);
        for k in 1..=self.order {
            binom *= (1.5 - k as f64) / (k as f64 * a0);
            c.push(binom);
        }
        Ok(self.analytic(&c))
    }

    /// Partial derivative along a chart axis. The result has order one lower;
    /// an order-0 jet has no derivative information left.
    pub fn partial(&self, axis: usize) -> Result<Jet> {
        assert!(axis < VARS, "chart axis out of range");
        if self.order == 0 {
            return Err(Error::OrderExhausted);
        }
        let mut buf = vec![0.0; self.coeffs.len()];
        self.table.differentiate(axis, &self.coeffs, &mut buf);
        let mut out = Jet::zero(self.order - 1, self.base);
        let n = out.coeffs.len();
        out.coeffs.copy_from_slice(&buf[..n]);
        Ok(out)
    }

    /// Antiderivative along a chart axis with zero constant term, truncated
    /// back to this jet's order: the top-degree input coefficients integrate
    /// past the truncation and are dropped.
    pub fn antiderivative(&self, axis: usize) -> Jet {
        assert!(axis < VARS, "chart axis out of range");
        let mut out = Jet::zero(self.order, self.base);
        self.table.integrate(axis, &self.coeffs, &mut out.coeffs);
        out
    }

    /// Evaluate the truncated expansion at the chart point `x`.
    pub fn eval(&self, x: Point) -> f64 {
        let h = [
            x[0] - self.base[0],
            x[1] - self.base[1],
            x[2] - self.base[2],
            x[3] - self.base[3],
        ];
        let mut acc = 0.0;
        for (r, m) in self.table.indices.iter().enumerate() {
            let c = self.coeffs[r];
            if c == 0.0 {
                continue;
            }
            let mut term = c;
            for (axis, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    term *= h[axis];
                }
            }
            acc += term;
        }
        acc
    }

    /// Re-expand around `new_base`, treating the stored truncation as the
    /// whole function. Exact for polynomial data of degree within the order;
    /// otherwise correct up to the usual truncation error.
    pub fn translated(&self, new_base: Point) -> Jet {
        let inner = [
            Jet::variable(0, self.order, new_base),
            Jet::variable(1, self.order, new_base),
            Jet::variable(2, self.order, new_base),
            Jet::variable(3, self.order, new_base),
        ];
        compose(self, &inner).expect("translation inputs share order")
    }
}

/// Substitute the four inner jets into `outer`: the result expands
/// `x -> outer(inner_0(x), ..., inner_3(x))` around the inner base point.
///
/// `outer`'s truncation is composed as if it were the whole function. When
/// every `inner_i` takes the value `outer.base[i]` (deviations are nilpotent)
/// this is the exact truncated composition; otherwise discarded high-order
/// terms of `outer` would have fed low-order output terms, and the caller
/// accepts that error.
pub fn compose(outer: &Jet, inner: &[Jet; 4]) -> Result<Jet> {
    for j in &inner[1..] {
        inner[0].check_compat(j)?;
    }
    if outer.order != inner[0].order {
        return Err(Error::OrderMismatch(outer.order, inner[0].order));
    }
    let order = outer.order;
    let base = inner[0].base;

    let mut max_exp = [0usize; VARS];
    for (r, m) in outer.table.indices.iter().enumerate() {
        if outer.coeffs[r] != 0.0 {
            for axis in 0..VARS {
                max_exp[axis] = max_exp[axis].max(m[axis] as usize);
            }
        }
    }

    // powers[axis][e] = (inner_axis - outer.base[axis])^e
    let mut powers: Vec<Vec<Jet>> = Vec::with_capacity(VARS);
    for (axis, inner_jet) in inner.iter().enumerate() {
        let mut dev = inner_jet.clone();
        dev.coeffs[0] -= outer.base[axis];
        let mut list = vec![Jet::constant(1.0, order, base)];
        for e in 1..=max_exp[axis] {
            let next = list[e - 1].mul(&dev)?;
            list.push(next);
        }
        powers.push(list);
    }

    let mut out = Jet::zero(order, base);
    for (r, m) in outer.table.indices.iter().enumerate() {
        let c = outer.coeffs[r];
        if c == 0.0 {
            continue;
        }
        let mut factors = m
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e > 0)
            .map(|(axis, &e)| &powers[axis][e as usize]);
        match factors.next() {
            None => out.coeffs[0] += c,
            Some(first) => {
                let mut term = first.clone();
                for f in factors {
                    term = term.mul(f)?;
                }
                out.axpy(c, &term);
            }
        }
    }
    Ok(out)
}

/// Invert a jet of a chart map `x = F(u)` around its base point: returns the
/// jets of `u = G(x)` at the image point, so that `G(F(u)) = u` to the stored
/// order. Requires an invertible linear part.
pub fn invert_map(map: &[Jet; 4]) -> Result<[Jet; 4]> {
    for j in &map[1..] {
        map[0].check_compat(j)?;
    }
    let order = map[0].order;
    if order == 0 {
        return Err(Error::InsufficientOrder {
            what: "map inversion",
            needed: 1,
            got: 0,
        });
    }
    let source = map[0].base_point();
    let image = [
        map[0].value(),
        map[1].value(),
        map[2].value(),
        map[3].value(),
    ];

    let mut a = [[0.0f64; VARS]; VARS];
    for i in 0..VARS {
        for (j, row) in a.iter_mut().enumerate() {
            let mut e: MultiIndex = [0; VARS];
            e[i] = 1;
            row[i] = map[j].coefficient(e);
        }
    }
    let a_inv = invert_4x4(&a)?;

    // Higher-order remainder of each component: F_j minus value minus linear part.
    let mut remainder: Vec<Jet> = Vec::with_capacity(VARS);
    for (j, component) in map.iter().enumerate() {
        let mut r = component.clone();
        r.coeffs[0] = 0.0;
        for i in 0..VARS {
            r.axpy(-a[j][i], &Jet::deviation(i, order, source));
        }
        remainder.push(r);
    }

    let image_dev: Vec<Jet> = (0..VARS)
        .map(|i| Jet::deviation(i, order, image))
        .collect();
    let linear_guess = |rhs: &[Jet]| -> [Jet; 4] {
        std::array::from_fn(|i| {
            let mut g = Jet::constant(source[i], order, image);
            for (j, r) in rhs.iter().enumerate() {
                g.axpy(a_inv[i][j], r);
            }
            g
        })
    };

    let mut inverse = linear_guess(&image_dev);
    for _ in 0..order {
        let mut rhs = Vec::with_capacity(VARS);
        for (j, r) in remainder.iter().enumerate() {
            let fed = compose(r, &inverse)?;
            rhs.push(image_dev[j].sub(&fed)?);
        }
        inverse = linear_guess(&rhs);
    }
    Ok(inverse)
}

/// Taylor coefficients at the base value of a function whose derivatives
/// cycle through `cycle` with period four.
/// Potential of a closed 1-form given by component jets: returns `psi` with
/// `d psi = form` to the input order and `psi(base) = 0`, built by radial
/// integration from the base point. If the form is not closed the result is
/// still returned; callers detect that by differentiating back.
pub fn radial_potential(form: &[Jet; 4]) -> Result<Jet> {
    for c in 1..4 {
        form[0].check_compat(&form[c])?;
    }
    let order = form[0].order();
    let mut out = Jet::zero(order + 1, form[0].base_point());
    for (axis, component) in form.iter().enumerate() {
        for (r, m) in component.table.indices.iter().enumerate() {
            let coeff = component.coeffs[r];
            if coeff == 0.0 {
                continue;
            }
            let degree: u8 = m.iter().sum();
            let mut target = *m;
            target[axis] += 1;
            let rank = out.table.rank_of(&target) as usize;
            out.coeffs[rank] += coeff / (degree as f64 + 1.0);
        }
    }
    Ok(out)
}

fn circular_series(order: usize, cycle: [f64; 4]) -> Vec<f64> {
    let mut c = Vec::with_capacity(order + 1);
    let mut fact = 1.0;
    for k in 0..=order {
        if k > 0 {
            fact *= k as f64;
        }
        c.push(cycle[k % 4] / fact);
    }
    c
}

fn invert_4x4(a: &[[f64; VARS]; VARS]) -> Result<[[f64; VARS]; VARS]> {
    let mut aug = [[0.0f64; 2 * VARS]; VARS];
    for i in 0..VARS {
        aug[i][..VARS].copy_from_slice(&a[i]);
        aug[i][VARS + i] = 1.0;
    }
    for col in 0..VARS {
        let (pivot_row, pivot) = (col..VARS)
            .map(|r| (r, aug[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty pivot range");
        if pivot < 1e-8 {
            return Err(Error::SingularMatrix);
        }
        aug.swap(col, pivot_row);
        let inv = 1.0 / aug[col][col];
        for entry in aug[col].iter_mut() {
            *entry *= inv;
        }
        for r in 0..VARS {
            if r == col {
                continue;
            }
            let factor = aug[r][col];
            if factor == 0.0 {
                continue;
            }
            for c in 0..2 * VARS {
                aug[r][c] -= factor * aug[col][c];
            }
        }
    }
    let mut out = [[0.0f64; VARS]; VARS];
    for i in 0..VARS {
        out[i].copy_from_slice(&aug[i][VARS..]);
    }
    Ok(out)
}
