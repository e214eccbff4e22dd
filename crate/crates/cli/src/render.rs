use cusp_core::FamilyQuery;
use num_bigint::BigInt;
use serde::Serialize;

use crate::table::{Cell, Grid};
use crate::{CliError, Format};

#[derive(Serialize)]
struct ValueJson<'a> {
    key: String,
    family: &'a str,
    r: u32,
    value: String,
}

pub fn value(q: &FamilyQuery, v: &BigInt, fmt: Format) -> String {
    let key = q.key();
    match fmt {
        Format::Plain => format!("{v}\n"),
        Format::Csv => format!("key,value\n\"{key}\",{v}\n"),
        Format::Markdown => format!(
            "| query | value |\n|---|---:|\n| `{}` | {v} |\n",
            key.replace('|', "\\|")
        ),
        Format::Json => {
            let out = ValueJson {
                key,
                family: q.family().label(),
                r: q.r(),
                value: v.to_string(),
            };
            format!("{}\n", serde_json::to_string_pretty(&out).unwrap())
        }
    }
}

#[derive(Serialize)]
struct ErrorJson {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    missing_keys: Vec<String>,
}

pub fn error_json(err: &CliError) -> String {
    use cusp_core::Error as E;
    let (kind, keys) = match err {
        CliError::Usage { .. } | CliError::Engine(E::Validation { .. }) => ("validation", vec![]),
        CliError::Engine(E::OracleMissing { keys }) => ("oracle-missing", keys.clone()),
        CliError::Engine(E::Inconsistent(_)) => ("inconsistent", vec![]),
        CliError::Engine(E::Parse { .. }) => ("parse", vec![]),
        CliError::Engine(_) => ("io", vec![]),
    };
    let message = match err {
        CliError::Engine(E::OracleMissing { keys }) => {
            format!("oracle data missing for {} key(s)", keys.len())
        }
        _ => err.to_string(),
    };
    serde_json::to_string_pretty(&ErrorJson {
        error: kind,
        message,
        missing_keys: keys,
    })
    .unwrap()
}

fn text(cell: &Cell) -> String {
    match cell {
        Cell::Blank => String::new(),
        Cell::Value { value, .. } => value.to_string(),
        Cell::NeedsOracle { .. } => "needs-oracle".into(),
        Cell::Failed {
            inconsistent: true, ..
        } => "inconsistent".into(),
        Cell::Failed { .. } => "error".into(),
    }
}

#[derive(Serialize)]
struct CellJson<'a> {
    tangencies: usize,
    column: &'a str,
    key: &'a str,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    missing_keys: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<&'a str>,
}

#[derive(Serialize)]
struct GridJson<'a> {
    r: u32,
    d: u32,
    columns: &'a [String],
    cells: Vec<CellJson<'a>>,
}

pub fn table(grid: &Grid, fmt: Format) -> String {
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(grid.columns.iter().cloned())
        .collect();
    let body: Vec<Vec<String>> = grid
        .rows
        .iter()
        .enumerate()
        .map(|(t, row)| {
            std::iter::once(t.to_string())
                .chain(row.iter().map(text))
                .collect()
        })
        .collect();
    match fmt {
        Format::Plain => {
            let widths: Vec<usize> = (0..header.len())
                .map(|i| {
                    body.iter()
                        .map(|r| r[i].len())
                        .chain([header[i].len()])
                        .max()
                        .unwrap()
                })
                .collect();
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect();
                format!("{}\n", padded.join("  ").trim_end())
            };
            let mut out = format!(
                "rational cuspidal curves of degree {} in P^{}\n",
                grid.d, grid.r
            );
            out += &line(&header);
            for row in &body {
                out += &line(row);
            }
            out
        }
        Format::Csv => {
            let mut out = format!("{}\n", header.join(","));
            for row in &body {
                out += &format!("{}\n", row.join(","));
            }
            out
        }
        Format::Markdown => {
            let mut out = format!("| {} |\n", header.join(" | "));
            out += &format!("|{}\n", "---:|".repeat(header.len()));
            for row in &body {
                out += &format!("| {} |\n", row.join(" | "));
            }
            out
        }
        Format::Json => {
            let mut cells = Vec::new();
            for (t, row) in grid.rows.iter().enumerate() {
                for (cell, column) in row.iter().zip(&grid.columns) {
                    let (key, status, value, missing, message): (&str, _, _, &[String], _) =
                        match cell {
                            Cell::Blank => continue,
                            Cell::Value { key, value } => {
                                (key, "ok", Some(value.to_string()), &[], None)
                            }
                            Cell::NeedsOracle { key, missing } => {
                                (key, "needs-oracle", None, missing, None)
                            }
                            Cell::Failed {
                                key,
                                message,
                                inconsistent,
                            } => (
                                key,
                                if *inconsistent {
                                    "inconsistent"
                                } else {
                                    "error"
                                },
                                None,
                                &[],
                                Some(message.as_str()),
                            ),
                        };
                    cells.push(CellJson {
                        tangencies: t,
                        column,
                        key,
                        status,
                        value,
                        missing_keys: missing,
                        message,
                    });
                }
            }
            let out = GridJson {
                r: grid.r,
                d: grid.d,
                columns: &grid.columns,
                cells,
            };
            format!("{}\n", serde_json::to_string_pretty(&out).unwrap())
        }
    }
}
