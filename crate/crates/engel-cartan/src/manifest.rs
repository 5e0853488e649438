//! Structured-text manifold descriptions.
//!
//! A manifold file is a TOML document with a versioned `format` key and a
//! `kind` selecting one of the built-in constructions. Polynomial payloads
//! are lists of `[[multi-index], coefficient]` pairs in the chart variables
//! (x, y, u1, u2) for graphs and (x, y, p, q) for ODE data.
//!
//! ```toml
//! format = 1
//! kind = "normal_form"
//! points = [[0.0, 0.0, 0.0, 0.0]]
//!
//! [coefficients]
//! b3 = 0.05
//! ```

use crate::error::{Error, Result};
use crate::models::{
    cubic, graph_to_engel, normal_form_model, ode_normal_coordinates, GraphSpec,
    NormalFormCoefficients,
};
use crate::poly::ChartPolynomial;
use crate::{EngelStructure, Point, ScalarField};
use serde::Deserialize;

/// Jet order used when a manifold file does not request one.
pub const DEFAULT_ORDER: usize = 6;

/// Built-in constructions a manifold file can select.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Cubic,
    Graph,
    NormalForm,
    Ode,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::Cubic => "cubic",
            Kind::Graph => "graph",
            Kind::NormalForm => "normal_form",
            Kind::Ode => "ode",
        }
    }
}

/// Polynomial payload: one `([a, b, c, d], coefficient)` entry per monomial.
pub type PolyTerms = Vec<([u8; 4], f64)>;

/// Parsed manifold file. Optional keys fall back to the documented defaults:
/// origin as the only point, order [`DEFAULT_ORDER`], fiber value 1.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldFile {
    pub format: u32,
    pub kind: Kind,
    pub f1: Option<PolyTerms>,
    pub f2: Option<PolyTerms>,
    pub coefficients: Option<NormalFormCoefficients>,
    pub forcing: Option<PolyTerms>,
    pub scale: Option<PolyTerms>,
    pub points: Option<Vec<Point>>,
    pub order: Option<usize>,
    pub t: Option<f64>,
}

fn poly(terms: &PolyTerms) -> ChartPolynomial {
    ChartPolynomial::new(terms.clone())
}

impl ManifoldFile {
    /// Parses and validates a manifold document.
    pub fn parse(text: &str) -> Result<ManifoldFile> {
        let file: ManifoldFile =
            toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    /// Reads and parses the file at `path`.
    pub fn load(path: &std::path::Path) -> Result<ManifoldFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        ManifoldFile::parse(&text)
    }

    fn validate(&self) -> Result<()> {
        if self.format != 1 {
            return Err(Error::Manifest(format!(
                "unsupported format {} (this tool reads format 1)",
                self.format
            )));
        }
        let required: &[(&str, bool)] = match self.kind {
            Kind::Cubic => &[],
            Kind::Graph => &[("f1", true), ("f2", true)],
            Kind::NormalForm => &[("coefficients", true)],
            Kind::Ode => &[("forcing", true), ("scale", false)],
        };
        let present = |key: &str| match key {
            "f1" => self.f1.is_some(),
            "f2" => self.f2.is_some(),
            "coefficients" => self.coefficients.is_some(),
            "forcing" => self.forcing.is_some(),
            "scale" => self.scale.is_some(),
            _ => unreachable!(),
        };
        for &(key, must) in required {
            if must && !present(key) {
                return Err(Error::Manifest(format!(
                    "kind = \"{}\" requires a `{key}` entry",
                    self.kind.label()
                )));
            }
        }
        for key in ["f1", "f2", "coefficients", "forcing", "scale"] {
            if present(key) && !required.iter().any(|&(k, _)| k == key) {
                return Err(Error::Manifest(format!(
                    "`{key}` does not apply to kind = \"{}\"",
                    self.kind.label()
                )));
            }
        }
        for terms in [&self.f1, &self.f2, &self.forcing, &self.scale]
            .into_iter()
            .flatten()
        {
            for &(_, c) in terms {
                if !c.is_finite() {
                    return Err(Error::Manifest("non-finite polynomial coefficient".into()));
                }
            }
        }
        for p in self.points().iter() {
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::Manifest("non-finite evaluation point".into()));
            }
        }
        if !self.t().is_finite() || self.t() <= 0.0 {
            return Err(Error::Manifest("fiber value t must be positive".into()));
        }
        Ok(())
    }

    /// Builds the Engel structure the file describes.
    pub fn structure(&self) -> Result<EngelStructure> {
        match self.kind {
            Kind::Cubic => Ok(cubic()),
            Kind::Graph => {
                let spec = GraphSpec::new(
                    poly(self.f1.as_ref().unwrap()),
                    poly(self.f2.as_ref().unwrap()),
                )?;
                graph_to_engel(&spec)
            }
            Kind::NormalForm => normal_form_model(self.coefficients.as_ref().unwrap()),
            Kind::Ode => {
                let scale = match &self.scale {
                    Some(terms) => ScalarField::from_poly(poly(terms)),
                    None => ScalarField::constant(1.0),
                };
                ode_normal_coordinates(&poly(self.forcing.as_ref().unwrap()), &scale)
            }
        }
    }

    pub fn points(&self) -> Vec<Point> {
        self.points.clone().unwrap_or_else(|| vec![[0.0; 4]])
    }

    pub fn order(&self) -> usize {
        self.order.unwrap_or(DEFAULT_ORDER)
    }

    pub fn t(&self) -> f64 {
        self.t.unwrap_or(1.0)
    }
}
