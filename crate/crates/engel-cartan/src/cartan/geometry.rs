//! Geometric consequences of the connection: the scaling one-form and its
//! potential, the distinguished frame at a fiber value, and integrability of
//! the three invariant plane fields.

use super::table::lifted_frame;
use super::{jadd, jmul, jsub, CartanContext, WeightedJet};
use crate::error::{Error, Result};
use crate::jets::{self, Jet};

/// Exterior derivative components below this size count as closed.
pub const CLOSED_TOL: f64 = 1e-8;
/// Off-plane bracket components below this size count as integrable.
pub const INTEGRABILITY_TOL: f64 = 1e-7;

/// The scaling one-form, in frame components and in chart components, with
/// its exterior derivative.
pub struct ConnectionForm {
    /// Coefficients against the four coframe forms, all of weight zero.
    pub varpi_frame: [WeightedJet; 4],
    /// Coefficients against the chart differentials.
    pub varpi_chart: [Jet; 4],
    /// Antisymmetrized derivatives over chart pairs (0,1), (0,2), (0,3),
    /// (1,2), (1,3), (2,3).
    pub d_varpi: [Jet; 6],
    pub closed: bool,
    /// Largest coefficient of the exterior derivative.
    pub residual: f64,
}

/// Outcome of testing for a single positive function rescaling the
/// structure into normal form everywhere at once.
pub struct GlobalScale {
    pub closed: bool,
    pub d_varpi_residual: f64,
    /// The candidate scale, present when the form is closed.
    pub scale_jet: Option<Jet>,
    /// Derivative of the scale along the second frame direction.
    pub transverse_residual: Option<f64>,
    /// Defect in the defining derivative relation of the scale.
    pub log_derivative_residual: Option<f64>,
}

/// One of the three bracket-invariant plane fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanePair {
    Y2,
    X3,
    Y3,
}

impl PlanePair {
    pub fn label(&self) -> &'static str {
        match self {
            PlanePair::Y2 => "y2",
            PlanePair::X3 => "x3",
            PlanePair::Y3 => "y3",
        }
    }

    fn legs(&self) -> (usize, usize) {
        match self {
            PlanePair::Y2 => (1, 2),
            PlanePair::X3 => (0, 3),
            PlanePair::Y3 => (1, 3),
        }
    }
}

pub struct Integrability {
    pub pair: PlanePair,
    pub integrable: bool,
    /// Size of the bracket component sticking out of the plane.
    pub residual: f64,
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| a[i] * b[i]).sum()
}

/// Norm of `w` after removing its projection onto span{u, v}.
fn off_plane_norm(u: [f64; 4], v: [f64; 4], w: [f64; 4]) -> Result<f64> {
    let nu = dot(&u, &u).sqrt();
    if nu < 1e-12 {
        return Err(Error::SingularMatrix);
    }
    let e1: [f64; 4] = std::array::from_fn(|i| u[i] / nu);
    let vp = dot(&v, &e1);
    let mut v2: [f64; 4] = std::array::from_fn(|i| v[i] - vp * e1[i]);
    let nv = dot(&v2, &v2).sqrt();
    if nv < 1e-12 {
        return Err(Error::SingularMatrix);
    }
    for x in v2.iter_mut() {
        *x /= nv;
    }
    let wp1 = dot(&w, &e1);
    let wp2 = dot(&w, &v2);
    let perp: [f64; 4] = std::array::from_fn(|i| w[i] - wp1 * e1[i] - wp2 * v2[i]);
    Ok(dot(&perp, &perp).sqrt())
}

impl CartanContext {
    /// The scaling one-form in both frame and chart components.
    pub fn connection_form(&self) -> Result<ConnectionForm> {
        let cc = self.connection_coefficients()?;
        let varpi_frame = cc.varpi_frame();
        let m = self.order() - 2;
        let coframe = self.frame().dual_coframe(self.anchor(), m)?;

        let mut varpi_chart: [Jet; 4] = std::array::from_fn(|_| Jet::zero(m, self.anchor()));
        for (gamma, coefficient) in varpi_frame.iter().enumerate() {
            for c in 0..4 {
                varpi_chart[c] = jadd(
                    &varpi_chart[c],
                    &jmul(&coefficient.jet, &coframe[gamma][c])?,
                )?;
            }
        }

        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut d_varpi: [Jet; 6] = std::array::from_fn(|_| Jet::zero(m - 1, self.anchor()));
        let mut residual = 0.0f64;
        for (slot, (c, d)) in pairs.into_iter().enumerate() {
            let component = jsub(&varpi_chart[c].partial(d)?, &varpi_chart[d].partial(c)?)?;
            residual = residual.max(component.norm());
            d_varpi[slot] = component;
        }

        Ok(ConnectionForm {
            varpi_frame,
            varpi_chart,
            d_varpi,
            closed: residual < CLOSED_TOL,
            residual,
        })
    }

    /// Integrates the scaling one-form when it is closed and checks the
    /// resulting scale against its defining derivative relations.
    pub fn global_scale_test(&self) -> Result<GlobalScale> {
        let form = self.connection_form()?;
        if !form.closed {
            return Ok(GlobalScale {
                closed: false,
                d_varpi_residual: form.residual,
                scale_jet: None,
                transverse_residual: None,
                log_derivative_residual: None,
            });
        }
        let psi = jets::radial_potential(&form.varpi_chart)?;
        let scale = psi.scaled(2.0).exp();
        let transverse = self.t_deriv(1, &scale)?.norm();
        let log_derivative = jsub(
            &self.t_deriv(0, &psi)?.scaled(2.0),
            &self.phi(3, 0, 3).scaled(1.0 / 3.0),
        )?
        .norm();
        Ok(GlobalScale {
            closed: true,
            d_varpi_residual: form.residual,
            scale_jet: Some(scale),
            transverse_residual: Some(transverse),
            log_derivative_residual: Some(log_derivative),
        })
    }

    /// Chart components of the four distinguished frame fields at fiber
    /// value `t`, rows in slot order.
    pub fn distinguished_frame_at(&self, t: f64) -> Result<[[f64; 4]; 4]> {
        let lifted = lifted_frame(self)?;
        Ok(std::array::from_fn(|i| {
            let s = t.powi(lifted[i].weight);
            std::array::from_fn(|c| s * lifted[i].chart[c].value())
        }))
    }

    /// Whether the requested invariant plane field is integrable near the
    /// anchor, measured by the off-plane part of the bracket of its two
    /// spanning fields.
    pub fn integrability_check(&self, which: PlanePair) -> Result<Integrability> {
        if self.order() < 3 {
            return Err(Error::InsufficientOrder {
                what: "integrability check",
                needed: 3,
                got: self.order(),
            });
        }
        let lifted = lifted_frame(self)?;
        let (i, j) = which.legs();
        let a = &lifted[i];
        let b = &lifted[j];
        let mut w = [0.0f64; 4];
        for d in 0..4 {
            let mut acc = 0.0;
            for c in 0..4 {
                acc += a.chart[c].value() * b.chart[d].partial(c)?.value();
                acc -= b.chart[c].value() * a.chart[d].partial(c)?.value();
            }
            w[d] = acc;
        }
        let u: [f64; 4] = std::array::from_fn(|c| a.chart[c].value());
        let v: [f64; 4] = std::array::from_fn(|c| b.chart[c].value());
        let residual = off_plane_norm(u, v, w)?;
        Ok(Integrability {
            pair: which,
            integrable: residual < INTEGRABILITY_TOL,
            residual,
        })
    }
}
