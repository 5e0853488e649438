//! Serializable analysis reports shared by the command-line tool and the
//! C ABI. Every verdict carries the residual it was judged on and the
//! threshold in force; gauge metadata pins the conventions the numbers
//! were produced under, so published values are reproducible.

use crate::cartan::{flatness_test, umbilicity_test, CartanContext, FLATNESS_TOL};
use crate::cohomology::{cohomology_report, Cochain1, GradedAlgebra, C1_DIM};
use crate::engel::DEGENERACY_TOL;
use crate::error::Result;
use crate::fields::Frame;
use crate::jets::Jet;
use crate::{EngelStructure, Point};
use serde::Serialize;
use std::collections::BTreeMap;

/// Names of the four essential curvature components, reporting order.
pub const INVARIANT_NAMES: [&str; 4] = ["R^x_{y2}", "R^y_{y2}", "R^2_{x3}", "R^y_{x3}"];

/// Fiber weights of the four components: values scale as t^weight.
pub const INVARIANT_WEIGHTS: [i32; 4] = [2, 2, 2, 3];

/// Conventions and thresholds behind every reported number.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeMetadata {
    pub jet_order: usize,
    pub fiber_value: f64,
    pub degeneracy_threshold: f64,
    pub flatness_threshold: f64,
    /// Scale gauge: tau = 1 on the transversal through the anchor spanned
    /// by flow-box coordinates of (X, T_2, T_3).
    pub normalization_transversal: &'static str,
    /// Vertical labels of the distinguished frame: u1 is the weight-2
    /// chart direction, u2 the weight-3 one.
    pub fiber_indexing: &'static str,
}

impl GaugeMetadata {
    pub fn new(jet_order: usize, fiber_value: f64) -> GaugeMetadata {
        GaugeMetadata {
            jet_order,
            fiber_value,
            degeneracy_threshold: DEGENERACY_TOL,
            flatness_threshold: FLATNESS_TOL,
            normalization_transversal:
                "tau = 1 on the transversal spanned by flow-box coordinates of (X, T_2, T_3)",
            fiber_indexing: "u1 carries weight 2, u2 carries weight 3",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantEntry {
    pub name: &'static str,
    pub weight: i32,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointInvariants {
    pub point: Point,
    pub invariants: Vec<InvariantEntry>,
    pub max_abs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableEntry {
    pub name: String,
    pub homogeneity: i32,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointTable {
    pub point: Point,
    pub entries: Vec<TableEntry>,
    pub low_homogeneity_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantsReport {
    pub kind: String,
    pub gauge: GaugeMetadata,
    pub points: Vec<PointInvariants>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature_table: Option<Vec<PointTable>>,
}

/// Essential curvatures at each point, with an optional per-point table of
/// every curvature component through `table_homogeneity`.
pub fn invariants_report(
    kind: &str,
    e: &EngelStructure,
    points: &[Point],
    order: usize,
    t: f64,
    table_homogeneity: Option<i32>,
) -> Result<InvariantsReport> {
    let mut per_point = Vec::with_capacity(points.len());
    let mut tables = table_homogeneity.map(|_| Vec::with_capacity(points.len()));
    for &p in points {
        let ctx = CartanContext::new(e, p, order)?;
        let values = ctx.essential_curvatures()?.values_at(t);
        let invariants = (0..4)
            .map(|i| InvariantEntry {
                name: INVARIANT_NAMES[i],
                weight: INVARIANT_WEIGHTS[i],
                value: values[i],
            })
            .collect::<Vec<_>>();
        let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        per_point.push(PointInvariants { point: p, invariants, max_abs });
        if let (Some(tables), Some(h)) = (tables.as_mut(), table_homogeneity) {
            let table = ctx.curvature_table(h)?;
            let entries = table
                .entries
                .iter()
                .map(|c| TableEntry {
                    name: c.name(),
                    homogeneity: c.homogeneity,
                    value: c.value.value_at(t),
                })
                .collect();
            tables.push(PointTable {
                point: p,
                entries,
                low_homogeneity_residual: table.low_homogeneity_residual,
            });
        }
    }
    Ok(InvariantsReport {
        kind: kind.to_string(),
        gauge: GaugeMetadata::new(order, t),
        points: per_point,
        curvature_table: tables,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatnessReport {
    pub kind: String,
    pub gauge: GaugeMetadata,
    pub points: Vec<Point>,
    pub flat: bool,
    pub max_residual: f64,
    pub threshold: f64,
}

/// `threshold` overrides the default flatness tolerance; the verdict is
/// `max_residual < threshold`.
pub fn flatness_report(
    kind: &str,
    e: &EngelStructure,
    points: &[Point],
    order: usize,
    threshold: f64,
) -> Result<FlatnessReport> {
    if !(threshold > 0.0) {
        return Err(crate::error::Error::DomainError("threshold must be positive"));
    }
    let verdict = flatness_test(e, points, order)?;
    Ok(FlatnessReport {
        kind: kind.to_string(),
        gauge: GaugeMetadata::new(order, 1.0),
        points: points.to_vec(),
        flat: verdict.max_residual < threshold,
        max_residual: verdict.max_residual,
        threshold,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PointUmbilicity {
    pub point: Point,
    pub umbilic: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct UmbilicityReport {
    pub kind: String,
    pub gauge: GaugeMetadata,
    pub points: Vec<PointUmbilicity>,
    pub umbilic: bool,
    pub threshold: f64,
}

pub fn umbilicity_report(
    kind: &str,
    e: &EngelStructure,
    points: &[Point],
    order: usize,
    threshold: f64,
) -> Result<UmbilicityReport> {
    if !(threshold > 0.0) {
        return Err(crate::error::Error::DomainError("threshold must be positive"));
    }
    let mut per_point = Vec::with_capacity(points.len());
    for &p in points {
        let v = umbilicity_test(e, p, order)?;
        per_point.push(PointUmbilicity {
            point: p,
            umbilic: v.residual < threshold,
            residual: v.residual,
        });
    }
    let umbilic = per_point.iter().all(|v| v.umbilic);
    Ok(UmbilicityReport {
        kind: kind.to_string(),
        gauge: GaugeMetadata::new(order, 1.0),
        points: per_point,
        umbilic,
        threshold,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RepresentativeEntry {
    pub homogeneity: i32,
    pub label: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyJson {
    pub c2_dimension: usize,
    pub cocycle_dimension: usize,
    pub coboundary_dimension: usize,
    pub h2_dimension: usize,
    pub c2_by_homogeneity: BTreeMap<i32, usize>,
    pub cocycles_by_homogeneity: BTreeMap<i32, usize>,
    pub coboundaries_by_homogeneity: BTreeMap<i32, usize>,
    pub h2_by_homogeneity: BTreeMap<i32, usize>,
    pub injective_homogeneities: Vec<i32>,
    pub representatives: Vec<RepresentativeEntry>,
    pub convention: &'static str,
    pub differential_squares_to_zero: bool,
}

pub fn cohomology_json() -> CohomologyJson {
    let algebra = GradedAlgebra::new();
    let report = cohomology_report(&algebra);
    let squares = (0..C1_DIM)
        .all(|s| Cochain1::basis(s).coboundary(&algebra).coboundary(&algebra).is_zero());
    CohomologyJson {
        c2_dimension: report.c2_dimension,
        cocycle_dimension: report.cocycle_dimension,
        coboundary_dimension: report.coboundary_dimension,
        h2_dimension: report.h2_dimension,
        c2_by_homogeneity: report.c2_by_homogeneity,
        cocycles_by_homogeneity: report.cocycles_by_homogeneity,
        coboundaries_by_homogeneity: report.coboundaries_by_homogeneity,
        h2_by_homogeneity: report.h2_by_homogeneity,
        injective_homogeneities: report.injective_homogeneities,
        representatives: report
            .representative_labels
            .into_iter()
            .map(|(homogeneity, label)| RepresentativeEntry { homogeneity, label })
            .collect(),
        convention: report.convention,
        differential_squares_to_zero: squares,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: &'static str,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub kind: String,
    pub gauge: GaugeMetadata,
    pub point: Point,
    pub max_homogeneity: i32,
    pub checks: Vec<CheckItem>,
    pub pass: bool,
}

fn duality_residual(frame: &Frame, p: Point) -> Result<f64> {
    let coframe = frame.dual_coframe(p, 2)?;
    let jets = frame.component_jets(p, 2)?;
    let mut worst = 0.0f64;
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = Jet::zero(2, p);
            for g in 0..4 {
                acc = acc.add(&coframe[a][g].mul(&jets[b][g])?)?;
            }
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max(acc.sub(&Jet::constant(want, 2, p))?.norm());
        }
    }
    Ok(worst)
}

/// Self-consistency suite at one point: Jacobi identity of the adapted
/// frame, coframe duality, the two bracket-table components the scale
/// normalization is supposed to kill, and agreement of the direct and
/// formula-driven curvature pipelines through `max_homogeneity`.
pub fn check_report(
    kind: &str,
    e: &EngelStructure,
    p: Point,
    order: usize,
    max_homogeneity: i32,
) -> Result<CheckReport> {
    let mut checks = Vec::new();
    let mut push = |name, residual: f64, threshold: f64| {
        checks.push(CheckItem { name, residual, threshold, pass: residual < threshold });
    };

    let frame = e.frame();
    push("jacobi_identity", frame.jacobi_residual(p)?, 1e-9);
    push("coframe_duality", duality_residual(&frame, p)?, 1e-10);

    let ctx = CartanContext::new(e, p, order)?;
    let sf = ctx.normalized().frame().structure_functions(ctx.anchor(), 0)?;
    let bracket = sf.phi(2, 1, 2).value().abs().max(sf.phi(3, 1, 2).value().abs());
    push("normalized_bracket_table", bracket, 1e-6);

    let direct = ctx.curvature_table(max_homogeneity)?;
    let predicted = ctx.predicted_curvature_table(max_homogeneity)?;
    let mut pipelines = 0.0f64;
    for want in &predicted.entries {
        let got = direct
            .get(want.target, want.pair.0, want.pair.1)
            .map_or(0.0, |c| c.value.value_at(1.0));
        let reference = want.value.value_at(1.0);
        pipelines = pipelines.max((got - reference).abs() / reference.abs().max(1.0));
    }
    push("curvature_pipelines", pipelines, 1e-5);

    let pass = checks.iter().all(|c| c.pass);
    Ok(CheckReport {
        kind: kind.to_string(),
        gauge: GaugeMetadata::new(order, 1.0),
        point: p,
        max_homogeneity,
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{cubic, normal_form_model, NormalFormCoefficients};

    #[test]
    fn cubic_reports_are_flat_and_pass_checks() {
        let e = cubic();
        let pts = [[0.0; 4], [0.2, -0.3, 0.45, 0.8]];
        let inv = invariants_report("cubic", &e, &pts, 4, 1.0, None).unwrap();
        assert_eq!(inv.points.len(), 2);
        assert!(inv.points.iter().all(|p| p.max_abs < 1e-9));
        assert_eq!(inv.points[0].invariants[3].name, "R^y_{x3}");
        assert_eq!(inv.points[0].invariants[3].weight, 3);
        assert!(inv.curvature_table.is_none());

        let flat = flatness_report("cubic", &e, &pts, 4, FLATNESS_TOL).unwrap();
        assert!(flat.flat);
        assert!(flat.max_residual < 1e-9);

        let umb = umbilicity_report("cubic", &e, &pts[..1], 6, FLATNESS_TOL).unwrap();
        assert!(umb.umbilic);

        let check = check_report("cubic", &e, [0.0; 4], 6, 4).unwrap();
        assert!(check.pass, "{:?}", check.checks);
        assert_eq!(check.checks.len(), 4);
    }

    #[test]
    fn perturbed_model_reports_nonzero_invariants_with_table() {
        let c = NormalFormCoefficients { b3: 0.05, ..NormalFormCoefficients::default() };
        let e = normal_form_model(&c).unwrap();
        let inv = invariants_report("normal_form", &e, &[[0.0; 4]], 4, 1.0, Some(2)).unwrap();
        let r_y_y2 = inv.points[0].invariants[1].value;
        assert!((r_y_y2 + 0.15).abs() < 1e-10, "R^y_y2 = {r_y_y2}");
        let table = inv.curvature_table.as_ref().unwrap();
        assert!(!table[0].entries.is_empty());
        assert!(table[0].low_homogeneity_residual < 1e-8);

        let flat = flatness_report("normal_form", &e, &[[0.0; 4]], 4, FLATNESS_TOL).unwrap();
        assert!(!flat.flat);
        // A loose threshold flips the verdict; the residual is unchanged.
        let loose = flatness_report("normal_form", &e, &[[0.0; 4]], 4, 10.0).unwrap();
        assert!(loose.flat);
        assert_eq!(loose.max_residual, flat.max_residual);
        assert!(flatness_report("normal_form", &e, &[[0.0; 4]], 4, 0.0).is_err());
    }

    #[test]
    fn insufficient_order_surfaces_from_checks() {
        let err = check_report("cubic", &cubic(), [0.0; 4], 3, 4).unwrap_err();
        assert!(matches!(err, crate::error::Error::InsufficientOrder { .. }));
    }

    #[test]
    fn cohomology_json_has_exact_dimensions() {
        let j = cohomology_json();
        assert_eq!(
            (j.c2_dimension, j.cocycle_dimension, j.coboundary_dimension, j.h2_dimension),
            (30, 17, 13, 4)
        );
        assert_eq!(j.h2_by_homogeneity.get(&2), Some(&3));
        assert_eq!(j.h2_by_homogeneity.get(&3), Some(&1));
        assert_eq!(j.injective_homogeneities, vec![4, 5]);
        assert_eq!(j.representatives.len(), 4);
        assert!(j.differential_squares_to_zero);
    }

    #[test]
    fn reports_serialize_deterministically() {
        let e = cubic();
        let pts = [[0.1, 0.2, -0.3, 0.4]];
        let a = serde_json::to_string_pretty(
            &invariants_report("cubic", &e, &pts, 4, 1.0, Some(2)).unwrap(),
        )
        .unwrap();
        let b = serde_json::to_string_pretty(
            &invariants_report("cubic", &e, &pts, 4, 1.0, Some(2)).unwrap(),
        )
        .unwrap();
        assert_eq!(a, b);
        let c = serde_json::to_string_pretty(&cohomology_json()).unwrap();
        let d = serde_json::to_string_pretty(&cohomology_json()).unwrap();
        assert_eq!(c, d);
    }
}
