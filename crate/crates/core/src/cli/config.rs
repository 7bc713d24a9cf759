use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assembly::{CoefficientSet, ScalarFn};
use crate::eigensolver::{Method, SolverConfig};
use crate::error::{Error, Result};
use crate::mesh::MeshKind;
use crate::problem::Problem;

/// Coefficient choices for `a(x)` and `b(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientPreset {
    /// `a = exp(x)`, `b = x`.
    ExpX,
    /// `a = 1`, `b = 0`.
    ConstOne,
    /// Expressions in `x` with `exp`, `sin`, `cos`, `pow`, ...
    Custom { a: String, b: String },
}

impl fmt::Display for CoefficientPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientPreset::ExpX => f.write_str("exp-x"),
            CoefficientPreset::ConstOne => f.write_str("const-one"),
            CoefficientPreset::Custom { a, b } => write!(f, "custom(a = {a}, b = {b})"),
        }
    }
}

impl CoefficientPreset {
    /// Resolves a preset name; `custom` requires both expressions.
    pub fn resolve(name: &str, a_expr: Option<&str>, b_expr: Option<&str>) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "exp-x" | "expx" => Ok(CoefficientPreset::ExpX),
            "const-one" | "constone" => Ok(CoefficientPreset::ConstOne),
            "custom" => match (a_expr, b_expr) {
                (Some(a), Some(b)) => Ok(CoefficientPreset::Custom {
                    a: a.to_string(),
                    b: b.to_string(),
                }),
                _ => Err(Error::Config("preset `custom` needs both a_expr and b_expr".into())),
            },
            other => Err(Error::Config(format!("unknown coefficient preset `{other}`"))),
        }
    }

    pub fn functions(&self) -> Result<(ScalarFn, ScalarFn)> {
        Ok(match self {
            CoefficientPreset::ExpX => (Arc::new(f64::exp), Arc::new(|x| x)),
            CoefficientPreset::ConstOne => (Arc::new(|_| 1.0), Arc::new(|_| 0.0)),
            CoefficientPreset::Custom { a, b } => (parse_expression(a)?, parse_expression(b)?),
        })
    }

    pub fn coefficients(&self, epsilon: f64) -> Result<CoefficientSet> {
        let (a, b) = self.functions()?;
        CoefficientSet::new(epsilon, a, b)
    }
}

/// Compiles an arithmetic expression in the variable `x`. Besides the usual
/// functions (`exp`, `ln`, `sin`, `cos`, `sqrt`, `abs`, ...) and `^`,
/// `pow(u, v)` is available.
pub fn parse_expression(expr: &str) -> Result<ScalarFn> {
    let err = |reason: String| Error::Expression {
        expr: expr.to_string(),
        reason,
    };
    let parsed: meval::Expr = expr.parse().map_err(|e: meval::Error| err(e.to_string()))?;
    // Binding checks for unknown names once; the bound closure itself is not
    // Send, so evaluation goes through a per-thread context instead.
    let _checked = parsed
        .clone()
        .bind_with_context(expression_context(), "x")
        .map_err(|e| err(e.to_string()))?;
    Ok(Arc::new(move |x| {
        EXPR_CONTEXT.with(|ctx| parsed.eval_with_context((("x", x), ctx)).unwrap_or(f64::NAN))
    }))
}

fn expression_context() -> meval::Context<'static> {
    let mut ctx = meval::Context::new();
    ctx.func2("pow", f64::powf);
    ctx
}

thread_local! {
    static EXPR_CONTEXT: meval::Context<'static> = expression_context();
}

/// Everything a command needs. Built from defaults, then an optional flat
/// `key = value` file, then command-line flags (flags win).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub epsilon: f64,
    /// `None` selects `sqrt(min a)`.
    pub beta: Option<f64>,
    pub p: usize,
    pub n: usize,
    pub mesh: MeshKind,
    pub preset: CoefficientPreset,
    pub modes: usize,
    pub solver: SolverConfig,
    pub out: PathBuf,
    pub ref_n: Option<usize>,
    /// Study grids.
    pub n_list: Vec<usize>,
    pub epsilons: Vec<f64>,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            epsilon: 1e-6,
            beta: None,
            p: 3,
            n: 32,
            mesh: MeshKind::Exp,
            preset: CoefficientPreset::ExpX,
            modes: 5,
            solver: SolverConfig::default(),
            out: PathBuf::from("out"),
            ref_n: None,
            n_list: vec![16, 32, 64, 128],
            epsilons: vec![1e-3, 1e-4, 1e-6, 1e-8],
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e: T::Err| Error::Config(format!("bad value `{value}` for `{key}`: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split([',', ' '])
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(key, s))
        .collect()
}

impl ProblemConfig {
    /// Reads a flat `key = value` file on top of the defaults. Blank lines and
    /// `#` comments are ignored; keys may use `-` or `_`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = ProblemConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut a_expr = None;
        let mut b_expr = None;
        let mut preset = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "preset" => preset = Some(value.to_string()),
                "a_expr" => a_expr = Some(value.to_string()),
                "b_expr" => b_expr = Some(value.to_string()),
                _ => self.set(&key, value)?,
            }
        }
        self.set_coefficients(preset.as_deref(), a_expr.as_deref(), b_expr.as_deref())
    }

    /// Applies a preset and/or expressions. Expressions alone imply `custom`.
    pub fn set_coefficients(&mut self, preset: Option<&str>, a_expr: Option<&str>, b_expr: Option<&str>) -> Result<()> {
        let name = match (preset, a_expr.is_some() || b_expr.is_some()) {
            (Some(p), _) => p,
            (None, true) => "custom",
            (None, false) => return Ok(()),
        };
        // Expressions given for only one coefficient keep the other from the
        // current custom preset, if any.
        let (cur_a, cur_b) = match &self.preset {
            CoefficientPreset::Custom { a, b } => (Some(a.as_str()), Some(b.as_str())),
            _ => (None, None),
        };
        self.preset = CoefficientPreset::resolve(name, a_expr.or(cur_a), b_expr.or(cur_b))?;
        Ok(())
    }

    /// Sets one scalar or list field by key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "epsilon" | "eps" => self.epsilon = parse(key, value)?,
            "beta" => self.beta = Some(parse(key, value)?),
            "p" => self.p = parse(key, value)?,
            "n" => self.n = parse(key, value)?,
            "mesh" => self.mesh = parse(key, value)?,
            "modes" | "k" => {
                self.modes = parse(key, value)?;
                self.solver.k = self.modes;
            }
            "tol" => self.solver.tol = parse(key, value)?,
            "max_iter" => self.solver.max_iter = parse(key, value)?,
            "shift" => self.solver.shift = parse(key, value)?,
            "method" => self.solver.method = parse::<Method>(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "ref_n" => self.ref_n = Some(parse(key, value)?),
            "n_list" => self.n_list = parse_list(key, value)?,
            "epsilons" => self.epsilons = parse_list(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            k: self.modes,
            ..self.solver
        }
    }

    pub fn problem(&self) -> Result<Problem> {
        Problem::new(self.preset.coefficients(self.epsilon)?, self.p, self.beta, self.mesh)
    }
}
