//! Grid-function files.
//!
//! CSV: header `x1[,x2],u1[,u2]`, then one row per node in storage order
//! (first axis fastest): the node coordinates followed by the `d` values.
//! The grid is recovered from the distinct coordinates on each axis.
//!
//! JSON: `{"lower": [..], "upper": [..], "cells": [..], "codomain_dim": d,
//! "values": [..]}` with the flat nodal array.

use orlicz_core::{Grid, GridFunction};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::format::num;

pub fn write_csv(u: &GridFunction) -> String {
    let grid = u.grid();
    let n = grid.dim();
    let d = u.codomain_dim();
    let mut header: Vec<String> = (1..=n).map(|a| format!("x{a}")).collect();
    header.extend((1..=d).map(|k| format!("u{k}")));
    let mut out = header.join(",");
    out.push('\n');
    for node in 0..grid.node_count() {
        let x = grid.node_coords(node);
        let row: Vec<String> = x[..n]
            .iter()
            .chain(u.node_value(node))
            .map(|v| num(*v))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn bad(msg: String) -> CliError {
    CliError::Config(format!("grid function CSV: {msg}"))
}

pub fn read_csv(text: &str) -> Result<GridFunction, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad("empty file".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    let n = header.iter().filter(|h| h.starts_with('x')).count();
    let d = header.iter().filter(|h| h.starts_with('u')).count();
    if n == 0 || d == 0 || n + d != header.len() || !(1..=2).contains(&n) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut coords: Vec<[f64; 2]> = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 2)))?;
        if row.len() != n + d {
            return Err(bad(format!(
                "row {} has {} entries, expected {}",
                i + 2,
                row.len(),
                n + d
            )));
        }
        let mut x = [0.0; 2];
        x[..n].copy_from_slice(&row[..n]);
        coords.push(x);
        values.extend_from_slice(&row[n..]);
    }
    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut cells = vec![0usize; n];
    for a in 0..n {
        let mut axis: Vec<f64> = coords.iter().map(|c| c[a]).collect();
        axis.sort_by(f64::total_cmp);
        axis.dedup();
        if axis.len() < 2 {
            return Err(bad(format!(
                "axis {} has fewer than two distinct coordinates",
                a + 1
            )));
        }
        lower[a] = axis[0];
        upper[a] = axis[axis.len() - 1];
        cells[a] = axis.len() - 1;
    }
    let grid = Grid::new(&lower, &upper, &cells).map_err(|e| bad(e.to_string()))?;
    if coords.len() != grid.node_count() {
        return Err(bad(format!(
            "{} rows for a grid with {} nodes",
            coords.len(),
            grid.node_count()
        )));
    }
    for (node, c) in coords.iter().enumerate() {
        let expect = grid.node_coords(node);
        let scale = 1e-9 * (1.0 + expect[0].abs().max(expect[1].abs()));
        if (0..n).any(|a| (c[a] - expect[a]).abs() > scale) {
            return Err(bad(format!("row {} is not in storage order", node + 2)));
        }
    }
    GridFunction::new(grid, d, values).map_err(|e| bad(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFunctionJson {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cells: Vec<usize>,
    pub codomain_dim: usize,
    pub values: Vec<f64>,
}

pub fn to_json(u: &GridFunction) -> GridFunctionJson {
    let grid = u.grid();
    GridFunctionJson {
        lower: grid.lower().to_vec(),
        upper: grid.upper().to_vec(),
        cells: grid.cells_per_axis().to_vec(),
        codomain_dim: u.codomain_dim(),
        values: u.values().to_vec(),
    }
}

pub fn from_json(j: &GridFunctionJson) -> Result<GridFunction, CliError> {
    let grid = Grid::new(&j.lower, &j.upper, &j.cells).map_err(|e| bad(e.to_string()))?;
    GridFunction::new(grid, j.codomain_dim, j.values.clone()).map_err(|e| bad(e.to_string()))
}
