//! The curvature table, assembled two independent ways.
//!
//! The direct pipeline lifts the frame with its connection corrections,
//! brackets the six leg pairs, and reads components off against the lifted
//! frame itself. The closed-form pipeline evaluates each component as a
//! graded expression in the essential invariants and their lifted
//! derivatives. Both store exact fiber weights; agreement between them is a
//! whole-machine consistency check.

use super::{jadd, jmul, jsub, CartanContext, WeightedJet, SLOT_NAMES, SLOT_WEIGHTS};
use crate::error::{Error, Result};
use crate::jets::{linalg, Jet};

/// One curvature component `k^target_{pair}`, slots in order (0, x, y, 2, 3).
#[derive(Clone, Debug)]
pub struct CurvatureComponent {
    pub target: usize,
    pub pair: (usize, usize),
    pub homogeneity: i32,
    pub value: WeightedJet,
}

impl CurvatureComponent {
    pub fn name(&self) -> String {
        format!(
            "k^{}_{{{}{}}}",
            SLOT_NAMES[self.target], SLOT_NAMES[self.pair.0], SLOT_NAMES[self.pair.1]
        )
    }
}

/// Curvature components up to a homogeneity bound. Components of
/// homogeneity one and below must vanish; their measured size is reported
/// separately so the caller can assert it.
pub struct CurvatureTable {
    pub entries: Vec<CurvatureComponent>,
    pub max_homogeneity: i32,
    pub low_homogeneity_residual: f64,
}

impl CurvatureTable {
    pub fn get(&self, target: usize, beta: usize, gamma: usize) -> Option<&CurvatureComponent> {
        self.entries
            .iter()
            .find(|c| c.target == target && c.pair == (beta, gamma))
    }
}

fn required_order(max_homogeneity: i32) -> Result<usize> {
    match max_homogeneity {
        2 | 3 => Ok(4),
        4 => Ok(6),
        5 => Ok(8),
        _ => Err(Error::DomainError(
            "curvature homogeneity bound must lie in 2..=5",
        )),
    }
}

fn gate(ctx: &CartanContext, max_homogeneity: i32) -> Result<()> {
    let needed = required_order(max_homogeneity)?;
    if ctx.order() < needed {
        return Err(Error::InsufficientOrder {
            what: "curvature table",
            needed,
            got: ctx.order(),
        });
    }
    Ok(())
}

/// A lifted frame field in fiber-stripped form: four chart components plus
/// the coefficient of the fiber scaling field, with the field's weight.
#[derive(Clone)]
pub(crate) struct Lifted {
    pub(crate) chart: [Jet; 4],
    pub(crate) fiber: Jet,
    pub(crate) weight: i32,
}

/// The four horizontal lifted fields in slot order (x, y, 2, 3), all
/// components aligned two orders below the context budget.
pub(crate) fn lifted_frame(ctx: &CartanContext) -> Result<[Lifted; 4]> {
    let cc = ctx.connection_coefficients()?;
    let m = ctx.order() - 2;
    let fj = ctx.frame_jets();
    let tr = |row: usize| -> Result<[Jet; 4]> {
        Ok([
            fj[row][0].truncated(m)?,
            fj[row][1].truncated(m)?,
            fj[row][2].truncated(m)?,
            fj[row][3].truncated(m)?,
        ])
    };
    let tx = tr(0)?;
    let ty = tr(1)?;
    let t2 = tr(2)?;
    let t3 = tr(3)?;

    let a_2y = cc.a_2y.jet.truncated(m)?;
    let a_32 = cc.a_32.jet.truncated(m)?;
    let a_3x = cc.a_3x.jet.truncated(m)?;
    let a_3y = cc.a_3y.jet.truncated(m)?;

    let mut v2 = t2.clone();
    for c in 0..4 {
        v2[c] = v2[c].add(&a_2y.mul(&ty[c])?)?;
    }
    let mut v3 = t3;
    for c in 0..4 {
        v3[c] = v3[c]
            .add(&a_32.mul(&t2[c])?)?
            .add(&a_3x.mul(&tx[c])?)?
            .add(&a_3y.mul(&ty[c])?)?;
    }

    Ok([
        Lifted {
            chart: tx,
            fiber: cc.a_x0.jet.truncated(m)?,
            weight: 1,
        },
        Lifted {
            chart: ty,
            fiber: Jet::zero(m, ctx.anchor()),
            weight: 1,
        },
        Lifted {
            chart: v2,
            fiber: cc.a_20.jet.truncated(m)?,
            weight: 2,
        },
        Lifted {
            chart: v3,
            fiber: cc.a_30.jet.truncated(m)?,
            weight: 3,
        },
    ])
}

/// Bracket of two lifted fields. The fiber scaling field acts on a weight-p
/// companion as multiplication by p, which is where the cross terms between
/// fiber coefficients and chart components come from. Costs one jet order;
/// weights add.
pub(crate) fn lifted_bracket(a: &Lifted, b: &Lifted) -> Result<Lifted> {
    let base = a.chart[0].base_point();
    let m = a.chart[0].order().min(b.chart[0].order()) - 1;
    let p = a.weight as f64;
    let q = b.weight as f64;
    let mut chart: [Jet; 4] = std::array::from_fn(|_| Jet::zero(m, base));
    for d in 0..4 {
        let mut acc = Jet::zero(m, base);
        for c in 0..4 {
            acc = jadd(&acc, &jmul(&a.chart[c], &b.chart[d].partial(c)?)?)?;
            acc = jsub(&acc, &jmul(&b.chart[c], &a.chart[d].partial(c)?)?)?;
        }
        acc = jadd(&acc, &jmul(&a.fiber, &b.chart[d])?.scaled(q))?;
        acc = jsub(&acc, &jmul(&b.fiber, &a.chart[d])?.scaled(p))?;
        chart[d] = acc;
    }
    let mut fiber = Jet::zero(m, base);
    for c in 0..4 {
        fiber = jadd(&fiber, &jmul(&a.chart[c], &b.fiber.partial(c)?)?)?;
        fiber = jsub(&fiber, &jmul(&b.chart[c], &a.fiber.partial(c)?)?)?;
    }
    fiber = jadd(&fiber, &jmul(&a.fiber, &b.fiber)?.scaled(q - p))?;
    Ok(Lifted {
        chart,
        fiber,
        weight: a.weight + b.weight,
    })
}

/// Nonzero flat-model brackets among the horizontal legs: the first pair
/// closes onto the third leg, the second onto the fourth.
fn flat_target(bi: usize, gi: usize) -> Option<usize> {
    match (bi, gi) {
        (0, 1) => Some(2),
        (0, 2) => Some(3),
        _ => None,
    }
}

fn finish_table(mut entries: Vec<CurvatureComponent>, max_homogeneity: i32) -> CurvatureTable {
    entries.retain(|e| e.homogeneity <= max_homogeneity);
    entries.sort_by_key(|e| (e.homogeneity, e.pair, e.target));
    let low_homogeneity_residual = entries
        .iter()
        .filter(|e| e.homogeneity <= 1)
        .map(|e| e.value.value().abs())
        .fold(0.0f64, f64::max);
    CurvatureTable {
        entries,
        max_homogeneity,
        low_homogeneity_residual,
    }
}

impl CartanContext {
    /// Curvature components of homogeneity at most `max_homogeneity`, read
    /// off from brackets of the lifted frame.
    pub fn curvature_table(&self, max_homogeneity: i32) -> Result<CurvatureTable> {
        gate(self, max_homogeneity)?;
        let lifted = lifted_frame(self)?;
        let mo = self.order() - 3;
        let mat: Vec<Vec<Jet>> = (0..4)
            .map(|c| {
                (0..4)
                    .map(|alpha| lifted[alpha].chart[c].truncated(mo))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let inv = linalg::invert_matrix(&mat, 1e-8)?;

        let mut entries = Vec::with_capacity(30);
        for bi in 0..4 {
            for gi in (bi + 1)..4 {
                let br = lifted_bracket(&lifted[bi], &lifted[gi])?;
                let mut coeff: Vec<Jet> = Vec::with_capacity(4);
                for alpha in 0..4 {
                    let mut acc = Jet::zero(mo, self.anchor());
                    for c in 0..4 {
                        acc = jadd(&acc, &jmul(&inv[alpha][c], &br.chart[c])?)?;
                    }
                    coeff.push(acc);
                }
                let mut fiber = br.fiber.clone();
                for alpha in 0..4 {
                    fiber = jsub(&fiber, &jmul(&coeff[alpha], &lifted[alpha].fiber)?)?;
                }
                for (alpha, jet) in coeff.into_iter().enumerate() {
                    let jet = if flat_target(bi, gi) == Some(alpha) {
                        jsub(&jet, &Jet::constant(1.0, jet.order(), self.anchor()))?
                    } else {
                        jet
                    };
                    let weight = br.weight - SLOT_WEIGHTS[alpha + 1];
                    entries.push(CurvatureComponent {
                        target: alpha + 1,
                        pair: (bi + 1, gi + 1),
                        homogeneity: weight,
                        value: WeightedJet::new(jet, weight),
                    });
                }
                entries.push(CurvatureComponent {
                    target: 0,
                    pair: (bi + 1, gi + 1),
                    homogeneity: br.weight,
                    value: WeightedJet::new(fiber, br.weight),
                });
            }
        }
        Ok(finish_table(entries, max_homogeneity))
    }

    /// Derivative along the first lifted leg: the frame derivative plus the
    /// equivariance correction weight/6 times `phi^3_{x3}`. Raises weight.
    pub(crate) fn vhat_x(&self, r: &WeightedJet) -> Result<WeightedJet> {
        let d = self.t_deriv(0, &r.jet)?;
        let corr = jmul(&self.phi(3, 0, 3), &r.jet)?.scaled(-(r.weight as f64) / 6.0);
        Ok(WeightedJet::new(jadd(&d, &corr)?, r.weight + 1))
    }

    /// Derivative along the second lifted leg; no correction term.
    pub(crate) fn vhat_y(&self, r: &WeightedJet) -> Result<WeightedJet> {
        Ok(WeightedJet::new(self.t_deriv(1, &r.jet)?, r.weight + 1))
    }

    /// The same table from closed-form expressions in the essential
    /// invariants. Derivative chains apply right to left.
    pub fn predicted_curvature_table(&self, max_homogeneity: i32) -> Result<CurvatureTable> {
        gate(self, max_homogeneity)?;
        let ess = self.essential_curvatures()?;
        let rx = &ess.r_x_y2;
        let ry = &ess.r_y_y2;
        let r2 = &ess.r_2_x3;
        let r3 = &ess.r_y_x3;

        let vx_rx = self.vhat_x(rx)?;
        let vx_ry = self.vhat_x(ry)?;
        let vy_ry = self.vhat_y(ry)?;
        let vx_r2 = self.vhat_x(r2)?;
        let vy_r2 = self.vhat_y(r2)?;
        let vy_r3 = self.vhat_y(r3)?;

        let zero = |target: usize, pair: (usize, usize)| {
            let hom = SLOT_WEIGHTS[pair.0] + SLOT_WEIGHTS[pair.1] - SLOT_WEIGHTS[target];
            (
                target,
                pair,
                WeightedJet::new(Jet::zero(0, self.anchor()), hom),
            )
        };

        let mut list: Vec<(usize, (usize, usize), WeightedJet)> = vec![
            zero(4, (1, 2)),
            zero(3, (1, 2)),
            zero(4, (1, 3)),
            zero(4, (2, 3)),
            zero(1, (1, 2)),
            zero(2, (1, 2)),
            zero(3, (1, 3)),
            zero(3, (2, 3)),
            zero(4, (1, 4)),
            zero(4, (2, 4)),
            zero(0, (1, 2)),
            zero(1, (1, 3)),
            zero(2, (1, 3)),
            zero(0, (1, 3)),
            (1, (2, 3), rx.clone()),
            (2, (2, 3), ry.clone()),
            (3, (1, 4), r2.clone()),
            (3, (2, 4), ry.clone()),
            (4, (3, 4), ry.clone()),
            (0, (2, 3), vx_rx.scaled(0.25).add(&vy_ry.scaled(0.25))?),
            (1, (1, 4), vx_ry.scaled(-1.5).add(&vy_r2.scaled(0.5))?),
            (2, (1, 4), r3.clone()),
            (1, (2, 4), vx_rx.scaled(0.75).sub(&vy_ry.scaled(0.25))?),
            (2, (2, 4), vx_ry.clone()),
            (3, (3, 4), vx_ry.scaled(0.5).sub(&vy_r2.scaled(0.5))?),
        ];

        if max_homogeneity >= 4 {
            let vxx_rx = self.vhat_x(&vx_rx)?;
            let vxx_ry = self.vhat_x(&vx_ry)?;
            let vxy_ry = self.vhat_x(&vy_ry)?;
            let vyx_ry = self.vhat_y(&vx_ry)?;
            let vxy_r2 = self.vhat_x(&vy_r2)?;
            let vyx_r2 = self.vhat_y(&vx_r2)?;
            let vyy_r2 = self.vhat_y(&vy_r2)?;

            list.push((
                0,
                (1, 4),
                vxx_ry
                    .scaled(-0.5)
                    .add(&vyx_r2.scaled(-1.0 / 3.0))?
                    .add(&vxy_r2.scaled(0.5))?
                    .add(&vy_r3.scaled(1.0 / 3.0))?,
            ));
            list.push((
                0,
                (2, 4),
                vxx_rx.scaled(0.25).add(&vxy_ry.scaled(0.25))?,
            ));
            list.push((
                1,
                (3, 4),
                vxy_ry
                    .scaled(-0.5)
                    .add(&vxx_rx.scaled(0.5))?
                    .add(&vyx_ry.scaled(1.5))?
                    .add(&vyy_r2.scaled(-0.5))?
                    .sub(&rx.mul(r2)?)?,
            ));
            list.push((
                2,
                (3, 4),
                vxx_ry
                    .scaled(0.5)
                    .add(&vyx_r2.scaled(-1.0 / 3.0))?
                    .add(&vxy_r2.scaled(0.5))?
                    .add(&vy_r3.scaled(-2.0 / 3.0))?
                    .sub(&ry.mul(r2)?)?,
            ));

            if max_homogeneity >= 5 {
                let vxxx_rx = self.vhat_x(&vxx_rx)?;
                let vx_vy_vx_ry = self.vhat_x(&vyx_ry)?;
                let vy_vxx_ry = self.vhat_y(&vxx_ry)?;
                let vxx_vy_ry = self.vhat_x(&vxy_ry)?;
                let vy_vx_vy_r2 = self.vhat_y(&vxy_r2)?;
                let vx_vyy_r2 = self.vhat_x(&vyy_r2)?;

                list.push((
                    0,
                    (3, 4),
                    vxxx_rx
                        .scaled(0.5)
                        .add(&vx_vy_vx_ry.scaled(3.0))?
                        .add(&vy_vxx_ry.scaled(-1.5))?
                        .add(&vy_vx_vy_r2.scaled(0.5))?
                        .add(&vx_vyy_r2.scaled(-1.0))?
                        .add(&vxx_vy_ry.scaled(-0.5))?
                        .sub(&rx.mul(&vx_r2)?)?
                        .sub(&r2.mul(&vx_rx)?)?
                        .add(&ry.mul(&vy_r2)?.scaled(0.5))?
                        .add(&ry.mul(&vx_ry)?.scaled(-1.5))?
                        .add(&rx.mul(r3)?)?,
                ));
            }
        }

        let entries = list
            .into_iter()
            .map(|(target, pair, value)| {
                let homogeneity =
                    SLOT_WEIGHTS[pair.0] + SLOT_WEIGHTS[pair.1] - SLOT_WEIGHTS[target];
                debug_assert_eq!(homogeneity, value.weight);
                CurvatureComponent {
                    target,
                    pair,
                    homogeneity,
                    value,
                }
            })
            .collect();
        Ok(finish_table(entries, max_homogeneity))
    }
}
