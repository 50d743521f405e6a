//! `{"base": 2, "rank": r, "v": [...], "gamma": {"0": [[...]], "1": [[...]]}, "w": [...]}`
//! with every entry a `"p/q"` (or integer) string.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::matrix::{format_rational, parse_rational, Rational, RationalMatrix};
use super::{LinearRepresentation, LinrepError};

#[derive(Debug, Serialize, Deserialize)]
struct LinrepFile {
    base: u32,
    rank: usize,
    v: Vec<String>,
    gamma: BTreeMap<String, Vec<Vec<String>>>,
    w: Vec<String>,
}

fn parse_all(values: &[String]) -> Result<Vec<Rational>, LinrepError> {
    values.iter().map(|s| parse_rational(s).ok_or_else(|| LinrepError::Json(format!("bad rational {s:?}")))).collect()
}

pub fn linrep_from_json(text: &str) -> Result<LinearRepresentation, LinrepError> {
    let file: LinrepFile = serde_json::from_str(text).map_err(|e| LinrepError::Json(e.to_string()))?;
    let gamma = (0..file.base)
        .map(|d| {
            let rows = file
                .gamma
                .get(&d.to_string())
                .ok_or_else(|| LinrepError::Json(format!("missing gamma for digit {d}")))?;
            let rows = rows.iter().map(|r| parse_all(r)).collect::<Result<Vec<_>, _>>()?;
            if rows.is_empty() {
                return Ok(RationalMatrix::zeros(0, 0));
            }
            RationalMatrix::from_rows(rows).ok_or_else(|| LinrepError::Json(format!("ragged gamma for digit {d}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let lr = LinearRepresentation::new(file.base, parse_all(&file.v)?, gamma, parse_all(&file.w)?)?;
    if lr.rank() != file.rank {
        return Err(LinrepError::Json(format!("declared rank {} but vectors have length {}", file.rank, lr.rank())));
    }
    Ok(lr)
}

pub fn linrep_to_json(lr: &LinearRepresentation) -> String {
    let fmt = |xs: &[Rational]| xs.iter().map(format_rational).collect::<Vec<_>>();
    let file = LinrepFile {
        base: lr.base(),
        rank: lr.rank(),
        v: fmt(lr.v()),
        gamma: lr
            .gamma()
            .iter()
            .enumerate()
            .map(|(d, g)| (d.to_string(), (0..g.rows()).map(|i| fmt(g.row(i))).collect()))
            .collect(),
        w: fmt(lr.w()),
    };
    serde_json::to_string_pretty(&file).expect("representation serializes")
}
