use clap::Args;
use cusp_core::{Constraint, CuspEngine, CuspQuery, Error};
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::{CliError, Common};

#[derive(Args)]
pub struct TableArgs {
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub d: u32,
    /// Fixed points among the conditions of every cell; the remaining
    /// conditions are codimension-2 subspaces.
    #[arg(long, default_value_t = 0)]
    pub points: u32,
    /// Last tangency row to print (default: all).
    #[arg(long = "max-tangent")]
    pub max_tangent: Option<u32>,
    #[command(flatten)]
    pub common: Common,
}

pub enum Cell {
    /// No query of this shape fits the dimension.
    Blank,
    Value {
        key: String,
        value: BigInt,
    },
    NeedsOracle {
        key: String,
        missing: Vec<String>,
    },
    Failed {
        key: String,
        message: String,
        inconsistent: bool,
    },
}

pub struct Grid {
    pub r: u32,
    pub d: u32,
    pub columns: Vec<String>,
    /// `rows[t][k]`
    pub rows: Vec<Vec<Cell>>,
}

impl Grid {
    pub fn inconsistency(&self) -> Option<String> {
        self.rows.iter().flatten().find_map(|c| match c {
            Cell::Failed {
                key,
                message,
                inconsistent: true,
            } => Some(format!("{key}: {message}")),
            _ => None,
        })
    }
}

/// Column label for a cusp on a subspace of codimension `k` in `P^r`.
pub fn column_name(r: u32, k: u32) -> String {
    if k == 0 {
        return "C".into();
    }
    match r - k {
        0 => "C_p".into(),
        1 => "C_l".into(),
        2 => "C_s".into(),
        3 => "C_b".into(),
        4 => "C_f".into(),
        dim => format!("C_{dim}"),
    }
}

impl TableArgs {
    pub fn evaluate(&self, engine: &CuspEngine) -> Result<Grid, CliError> {
        let (r, d) = (self.r, self.d);
        if r < 2 {
            return Err(CliError::usage(
                "--r",
                "the ambient dimension must be at least 2",
            ));
        }
        if d == 0 {
            return Err(CliError::usage("--d", "a positive degree is required"));
        }
        let total = (r + 1) * d - 2;
        let fixed = self.points * (r - 1);
        if fixed > total {
            return Err(CliError::usage(
                "--points",
                format!(
                    "{} points carry weight {fixed}, more than the {total} available",
                    self.points
                ),
            ));
        }
        let last_row = self.max_tangent.unwrap_or(total).min(total);
        let shapes: Vec<(u32, u32)> = (0..=last_row)
            .flat_map(|t| (0..=r).map(move |k| (t, k)))
            .collect();
        let cells: Vec<Cell> = shapes
            .par_iter()
            .map(|&(t, k)| self.cell(engine, t, k, total, fixed))
            .collect();
        let mut rows = Vec::new();
        let mut it = cells.into_iter();
        for _ in 0..=last_row {
            rows.push(it.by_ref().take(r as usize + 1).collect());
        }
        Ok(Grid {
            r,
            d,
            columns: (0..=r).map(|k| column_name(r, k)).collect(),
            rows,
        })
    }

    fn cell(&self, engine: &CuspEngine, t: u32, k: u32, total: u32, fixed: u32) -> Cell {
        let Some(rest) = total.checked_sub(t + k + fixed) else {
            return Cell::Blank;
        };
        let r = self.r;
        let mut delta = Constraint::new(r).expect("r checked").with_tangency(t);
        if r == 2 {
            delta = delta
                .with_incidence(2, rest + self.points)
                .expect("codim 2");
        } else {
            delta = delta
                .with_incidence(2, rest)
                .and_then(|c| c.with_incidence(r, self.points))
                .expect("codims in range");
        }
        let q = CuspQuery::new(self.d, delta.with_special(Some(k))).expect("degree checked");
        let key = q.family_query().key();
        match engine.count(&q) {
            Ok(value) => Cell::Value { key, value },
            Err(Error::OracleMissing { keys }) => Cell::NeedsOracle { key, missing: keys },
            Err(e) => Cell::Failed {
                key,
                inconsistent: matches!(e, Error::Inconsistent(_)),
                message: e.to_string(),
            },
        }
    }
}
