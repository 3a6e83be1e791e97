//! Problem files: `n`, `f`, optional `g`, optional tolerances.
//!
//! Linear coefficients follow `f(x) = xᵀAx + 2aᵀx + a0`.

use std::fmt;

use quadsep::{QuadraticFunction, SymMatrix, Tolerances};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSpec {
    #[serde(rename = "A")]
    pub matrix: Vec<Vec<f64>>,
    pub a: Vec<f64>,
    pub a0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub tol_rel: f64,
    pub tol_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub f: QuadraticSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<QuadraticSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub message: String,
    /// `(line, column, source line)` when the error has a location.
    pub location: Option<(usize, usize, String)>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Some((line, col, text)) => write!(
                f,
                "parse error at line {line}, column {col}: {}\n  {line} | {text}",
                self.message
            ),
            None => write!(f, "parse error: {}", self.message),
        }
    }
}

impl ParseError {
    fn plain(message: impl Into<String>) -> Self {
        ParseError {
            message: message.into(),
            location: None,
        }
    }
}

/// A validated problem: symmetrized quadratics and effective tolerances.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub f: QuadraticFunction,
    pub g: Option<QuadraticFunction>,
    pub tolerances: Tolerances,
    pub warnings: Vec<String>,
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    serde_json::from_str(text).map_err(|e| {
        let line = e.line();
        let location = (line > 0).then(|| {
            let src = text.lines().nth(line - 1).unwrap_or("").to_string();
            (line, e.column(), src)
        });
        ParseError {
            message: strip_position(&e.to_string()),
            location,
        }
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn check_finite(name: &str, values: impl IntoIterator<Item = f64>) -> Result<(), ParseError> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(ParseError::plain(format!("{name} contains a non-finite number")))
    }
}

fn build(
    name: &str,
    spec: &QuadraticSpec,
    n: usize,
    t: Tolerances,
    warnings: &mut Vec<String>,
) -> Result<QuadraticFunction, ParseError> {
    if spec.matrix.len() != n {
        return Err(ParseError::plain(format!(
            "{name}.A has {} rows, expected {n}",
            spec.matrix.len()
        )));
    }
    for (i, row) in spec.matrix.iter().enumerate() {
        if row.len() != n {
            return Err(ParseError::plain(format!(
                "{name}.A row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    if spec.a.len() != n {
        return Err(ParseError::plain(format!(
            "{name}.a has {} entries, expected {n}",
            spec.a.len()
        )));
    }
    check_finite(&format!("{name}.A"), spec.matrix.iter().flatten().copied())?;
    check_finite(&format!("{name}.a"), spec.a.iter().copied())?;
    check_finite(&format!("{name}.a0"), [spec.a0])?;

    let mut asym: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            asym = asym.max((spec.matrix[i][j] - spec.matrix[j][i]).abs());
            scale = scale.max(spec.matrix[i][j].abs());
        }
    }
    if asym > t.band(scale) {
        warnings.push(format!(
            "{name}.A is not symmetric (max |A - Aᵀ| = {asym:e}); using (A + Aᵀ)/2"
        ));
    }
    let matrix = SymMatrix::from_rows(&spec.matrix).map_err(|e| ParseError::plain(e.to_string()))?;
    QuadraticFunction::new(matrix, spec.a.clone(), spec.a0)
        .map_err(|e| ParseError::plain(format!("{name}: {e}")))
}

/// Validates dimensions and numbers. Explicit tolerances override the
/// file's.
pub fn validate(file: ProblemFile, overrides: (Option<f64>, Option<f64>)) -> Result<Problem, ParseError> {
    if file.n == 0 {
        return Err(ParseError::plain("n must be at least 1"));
    }
    let base = file.tolerances.map_or_else(Tolerances::default, |t| Tolerances {
        tol_rel: t.tol_rel,
        tol_abs: t.tol_abs,
    });
    let tol_rel = overrides.0.unwrap_or(base.tol_rel);
    let tol_abs = overrides.1.unwrap_or(base.tol_abs);
    let tolerances = Tolerances::new(tol_rel, tol_abs).map_err(|e| ParseError::plain(e.to_string()))?;
    let mut warnings = Vec::new();
    let f = build("f", &file.f, file.n, tolerances, &mut warnings)?;
    let g = file
        .g
        .as_ref()
        .map(|g| build("g", g, file.n, tolerances, &mut warnings))
        .transpose()?;
    Ok(Problem {
        file,
        f,
        g,
        tolerances,
        warnings,
    })
}

fn spec_of(q: &QuadraticFunction) -> QuadraticSpec {
    QuadraticSpec {
        matrix: q.matrix().as_matrix().to_rows(),
        a: q.linear().to_vec(),
        a0: q.constant(),
    }
}

/// Canonicalized problem file: symmetrized matrices, effective tolerances.
pub fn emit(problem: &Problem) -> String {
    let file = ProblemFile {
        n: problem.file.n,
        f: spec_of(&problem.f),
        g: problem.g.as_ref().map(spec_of),
        tolerances: Some(ToleranceSpec {
            tol_rel: problem.tolerances.tol_rel,
            tol_abs: problem.tolerances.tol_abs,
        }),
    };
    serde_json::to_string_pretty(&file).expect("problem files serialize")
}
