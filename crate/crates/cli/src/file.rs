//! System files: TOML documents describing an evolution system, its
//! nonlocal variables and named fixtures. Everything is validated at load
//! and errors point at the offending line.

use std::fmt;
use std::ops::Range;
use std::path::Path;

use indexmap::IndexMap;
use serde::Deserialize;
use toml::Spanned;

use jetham_core::algebra::{parse_expr, Parity, Symbol, VarContext};
use jetham_core::calculus::{Dependent, JetSpace};
use jetham_core::covering::{build_lstar, build_lstar_named, Covering};
use jetham_core::error::{AlgebraError, SystemError};
use jetham_core::opforms::parse_matrix;
use jetham_core::schouten::{check_shadow_shape, Shadow};
use jetham_core::{EvolutionSystem, MatrixOperator, Poly, Rational};

/// An error anchored at a position of a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            // no position, as for an unreadable file
            write!(f, "{}: error: {}", self.path, self.message)
        } else {
            write!(f, "{}:{}:{}: error: {}", self.path, self.line, self.col, self.message)
        }
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: Spanned<String>,
    t_weight: Option<Spanned<i64>>,
    antifields: Option<Spanned<Vec<String>>>,
    #[serde(default)]
    parameter: IndexMap<String, Spanned<i64>>,
    dependent: Spanned<Vec<RawDependent>>,
    #[serde(default)]
    nonlocal: IndexMap<String, RawNonlocal>,
    #[serde(default)]
    fixture: IndexMap<String, Spanned<RawFixture>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDependent {
    name: Spanned<String>,
    parity: Spanned<String>,
    grade: Option<Spanned<i64>>,
    rhs: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNonlocal {
    parity: Spanned<String>,
    grade: Option<Spanned<i64>>,
    x_flux: Spanned<String>,
    t_flux: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixture {
    shadow: Option<Spanned<Vec<String>>>,
    operator: Option<Spanned<String>>,
    density: Option<Spanned<String>>,
    vector: Option<Spanned<Vec<String>>>,
}

/// A named object stored in a system file.
#[derive(Clone, Debug)]
pub enum Fixture {
    Shadow(Shadow<Rational>),
    Operator(MatrixOperator),
    Density(Poly),
    Vector(Vec<Poly>),
}

impl Fixture {
    pub fn kind(&self) -> &'static str {
        match self {
            Fixture::Shadow(_) => "shadow",
            Fixture::Operator(_) => "operator",
            Fixture::Density(_) => "density",
            Fixture::Vector(_) => "vector",
        }
    }
}

/// A loaded and validated system file.
#[derive(Clone, Debug)]
pub struct SystemFile {
    pub path: String,
    pub system: EvolutionSystem,
    /// The ℓ*-covering without nonlocal variables.
    pub local: Covering<Rational>,
    /// The ℓ*-covering with every declared nonlocal variable.
    pub covering: Covering<Rational>,
    pub fixtures: IndexMap<String, Fixture>,
}

struct Source<'a> {
    path: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn at(&self, span: Range<usize>, message: impl Into<String>) -> Diagnostic {
        let head = &self.text[..span.start.min(self.text.len())];
        let line = head.matches('\n').count() + 1;
        let col = head.len() - head.rfind('\n').map_or(0, |i| i + 1) + 1;
        Diagnostic { path: self.path.to_string(), line, col, message: message.into() }
    }
}

fn parity(src: &Source, s: &Spanned<String>) -> Result<Parity, Diagnostic> {
    match s.get_ref().as_str() {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        other => Err(src.at(s.span(), format!("parity must be \"even\" or \"odd\", not \"{other}\""))),
    }
}

fn expr(src: &Source, s: &Spanned<String>, ctx: &VarContext) -> Result<Poly, Diagnostic> {
    parse_expr(s.get_ref(), ctx).map_err(|e| {
        let span = s.span();
        // inside a one-line string the offset maps straight to a column
        let raw = &src.text[span.clone()];
        let one_line = raw.starts_with('"') && !raw.starts_with("\"\"\"") && !raw[1..].contains('\\');
        let start = match (&e, one_line) {
            (AlgebraError::Syntax { pos, .. } | AlgebraError::UnknownVariable { pos, .. }, true) => {
                span.start + 1 + pos
            }
            _ => span.start,
        };
        src.at(start..start, e.to_string())
    })
}

impl SystemFile {
    pub fn load(path: &Path) -> Result<SystemFile, Diagnostic> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| Diagnostic {
            path: shown.clone(),
            line: 0,
            col: 0,
            message: e.to_string(),
        })?;
        SystemFile::from_str(&shown, &text)
    }

    pub fn from_str(path: &str, text: &str) -> Result<SystemFile, Diagnostic> {
        let src = Source { path, text };
        let raw: RawFile = toml::from_str(text).map_err(|e| {
            let span = e.span().unwrap_or(0..0);
            src.at(span, e.message().to_string())
        })?;

        let mut deps = Vec::new();
        for d in raw.dependent.get_ref() {
            deps.push(Dependent::new(
                d.name.get_ref(),
                parity(&src, &d.parity)?,
                d.grade.as_ref().map(|g| *g.get_ref()),
            ));
        }
        if deps.is_empty() {
            return Err(src.at(raw.dependent.span(), "at least one dependent variable is required"));
        }
        let params: Vec<(Symbol, Option<i64>)> =
            raw.parameter.iter().map(|(n, g)| (Symbol::new(n), Some(*g.get_ref()))).collect();
        let mut ctx = VarContext::new();
        for d in &deps {
            ctx.add(d.name.as_str(), jetham_core::algebra::VarKind::Jet, d.parity);
        }
        for (p, _) in &params {
            ctx.add_parameter(p.as_str());
        }
        let mut rhs = Vec::new();
        for d in raw.dependent.get_ref() {
            rhs.push(expr(&src, &d.rhs, &ctx)?);
        }
        let t_weight = raw.t_weight.as_ref().map(|t| *t.get_ref());
        let system = EvolutionSystem::new(raw.name.get_ref(), deps, params, t_weight, rhs).map_err(|e| {
            let by_name = |name: &str| raw.dependent.get_ref().iter().find(|d| d.name.get_ref() == name);
            let span = match &e {
                SystemError::Duplicate(n) => by_name(n).map(|d| d.name.span()),
                SystemError::Parse { dependent, .. }
                | SystemError::Undeclared { dependent, .. }
                | SystemError::Parity { dependent, .. }
                | SystemError::Inhomogeneous { dependent }
                | SystemError::Grade { dependent, .. } => by_name(dependent).map(|d| d.rhs.span()),
                SystemError::Count { .. } => None,
            };
            src.at(span.unwrap_or(raw.dependent.span()), e.to_string())
        })?;

        let local = match &raw.antifields {
            None => build_lstar(&system),
            Some(names) => {
                if names.get_ref().len() != system.len() {
                    return Err(src.at(
                        names.span(),
                        format!("expected {} antifield names, got {}", system.len(), names.get_ref().len()),
                    ));
                }
                build_lstar_named(&system, names.get_ref())
            }
        }
        .map_err(|e| {
            let span = raw.antifields.as_ref().map_or(raw.name.span(), |a| a.span());
            src.at(span, e.to_string())
        })?;

        let mut covering = local.clone();
        for (name, r) in &raw.nonlocal {
            let x = expr(&src, &r.x_flux, covering.context())?;
            let t = expr(&src, &r.t_flux, covering.context())?;
            let grade = r.grade.as_ref().map(|g| *g.get_ref());
            covering = covering
                .add_nonlocal(name, parity(&src, &r.parity)?, grade, x, t)
                .map_err(|e| src.at(r.x_flux.span(), e.to_string()))?;
            let residual = covering.check_flux(name).expect("just added");
            if !residual.is_zero() {
                let shown = jetham_core::algebra::print_canonical(&residual, covering.grading());
                return Err(src.at(
                    r.t_flux.span(),
                    format!("fluxes of `{name}` are incompatible: D_t(x_flux) - D_x(t_flux) = {shown}"),
                ));
            }
        }

        let n = system.len();
        let mut fixtures = IndexMap::new();
        for (name, f) in &raw.fixture {
            let fx = f.get_ref();
            let given = [fx.shadow.is_some(), fx.operator.is_some(), fx.density.is_some(), fx.vector.is_some()];
            if given.iter().filter(|g| **g).count() != 1 {
                return Err(src
                    .at(f.span(), format!("fixture `{name}` needs exactly one of shadow, operator, density, vector")));
            }
            let ctx = covering.context();
            let components = |list: &Spanned<Vec<String>>| -> Result<Vec<Poly>, Diagnostic> {
                let polys = list
                    .get_ref()
                    .iter()
                    .map(|t| parse_expr(t, ctx).map_err(|e| src.at(list.span(), e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                if polys.len() != n {
                    return Err(src.at(list.span(), format!("expected {n} components, got {}", polys.len())));
                }
                Ok(polys)
            };
            let fixture = if let Some(s) = &fx.shadow {
                let shadow = Shadow::new(components(s)?);
                check_shadow_shape(&shadow, &covering).map_err(|e| src.at(s.span(), e.to_string()))?;
                Fixture::Shadow(shadow)
            } else if let Some(o) = &fx.operator {
                let m = parse_matrix(o.get_ref(), ctx).map_err(|e| src.at(o.span(), e.to_string()))?;
                if m.rows() != n || m.cols() != n {
                    return Err(src.at(o.span(), format!("expected a {n}x{n} operator, got {}x{}", m.rows(), m.cols())));
                }
                Fixture::Operator(m)
            } else if let Some(d) = &fx.density {
                Fixture::Density(expr(&src, d, ctx)?)
            } else {
                Fixture::Vector(components(fx.vector.as_ref().expect("one field is set"))?)
            };
            fixtures.insert(name.clone(), fixture);
        }

        Ok(SystemFile { path: path.to_string(), system, local, covering, fixtures })
    }

    pub fn fixture(&self, name: &str) -> Option<&Fixture> {
        self.fixtures.get(name)
    }
}
