//! Primal and dual Benson-type outer approximation loops on the upper image
//! `P = Γ[X] + ℝ^{q+1}₊`.

pub mod dual;
pub mod primal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Halfspace, DEDUP_TOL};
use crate::linalg::{lex_cmp, max_abs_diff};

/// Order in which unchecked vertices are visited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// Oldest vertex first.
    #[default]
    Fifo,
    /// Lexicographically smallest vertex first.
    Lexmin,
}

impl std::str::FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fifo" => Ok(Selection::Fifo),
            "lexmin" => Ok(Selection::Lexmin),
            _ => Err(Error::InvalidInput(format!("unknown selection '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BensonOptions {
    pub selection: Selection,
    /// Cut budget before giving up with `IterationCap`.
    pub max_cuts: usize,
    /// Slack on the cut test: a vertex is cut only if it misses the
    /// tolerance by more than this.
    pub tie_tol: f64,
}

impl Default for BensonOptions {
    fn default() -> Self {
        BensonOptions {
            selection: Selection::Fifo,
            max_cuts: 10_000,
            tie_tol: 1e-9,
        }
    }
}

impl BensonOptions {
    pub fn with_selection(selection: Selection) -> Self {
        BensonOptions {
            selection,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Cut,
    Confirm,
}

/// One visited vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub vertex: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<Halfspace>,
    /// `Γ(x)` for the scalarization solution behind the decision.
    pub support: Vec<f64>,
}

/// Picks the next vertex not yet in `confirmed`.
pub(crate) fn next_vertex<'v>(
    vertices: &'v [Vec<f64>],
    confirmed: &[Vec<f64>],
    selection: Selection,
) -> Option<&'v Vec<f64>> {
    let mut open = vertices
        .iter()
        .filter(|v| !confirmed.iter().any(|c| max_abs_diff(c, v) <= DEDUP_TOL));
    match selection {
        Selection::Fifo => open.next(),
        Selection::Lexmin => open.min_by(|a, b| lex_cmp(a, b, 1e-9)),
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "eps must be positive, got {eps}"
        )))
    }
}
