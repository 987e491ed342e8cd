//! Regression grids for the five ratio tables, with the expected values
//! embedded from `data/`.

use serde::Serialize;

use crate::error::{PcfError, Result};
use crate::poincare::{table_poincare, PoincareTable};
use crate::precision::PrecisionContext;
use crate::report::VariationMode;
use crate::uniform::{tables_uniform, UniformTableKind};

const EXPECTED: [&str; 5] = [
    include_str!("../data/table1.csv"),
    include_str!("../data/table2.csv"),
    include_str!("../data/table3.csv"),
    include_str!("../data/table4.csv"),
    include_str!("../data/table5.csv"),
];

/// Stored with two decimals for tables 1 and 2, five for the rest.
pub fn tolerance(which: u32) -> f64 {
    if which <= 2 {
        1e-2
    } else {
        1e-3
    }
}

/// Column headers of the grid: row parameter, column parameter.
pub fn axes(which: u32) -> (&'static str, &'static str) {
    if which <= 2 {
        ("n", "j")
    } else {
        ("a", "t")
    }
}

fn check_which(which: u32) -> Result<()> {
    if (1..=5).contains(&which) {
        Ok(())
    } else {
        Err(PcfError::Domain(format!("no table {which}; expected 1..5")))
    }
}

/// Stored (row, column, ρ) triples.
pub fn expected(which: u32) -> Result<Vec<(f64, f64, f64)>> {
    check_which(which)?;
    let mut rdr = csv::Reader::from_reader(EXPECTED[which as usize - 1].as_bytes());
    rdr.deserialize()
        .map(|r| r.map_err(|e| PcfError::SelfCheck(format!("embedded table {which}: {e}"))))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TableCell {
    pub row: f64,
    pub col: f64,
    pub rho: f64,
    pub expected: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRun {
    pub which: u32,
    pub tolerance: f64,
    pub digits: u32,
    pub cells: Vec<TableCell>,
}

impl TableRun {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TableCell> {
        self.cells.iter().filter(|c| !c.pass)
    }

    pub fn max_deviation(&self) -> f64 {
        self.cells.iter().filter_map(|c| c.expected.map(|e| (c.rho - e).abs())).fold(0.0, f64::max)
    }
}

fn grid(which: u32, ctx: &PrecisionContext) -> Result<Vec<(f64, f64, f64)>> {
    match which {
        1 | 2 => {
            let mode = if which == 1 { VariationMode::Piecewise } else { VariationMode::Hyp2f1 };
            let PoincareTable { ns, js, ratios, .. } = table_poincare(mode, ctx)?;
            Ok(ns
                .iter()
                .enumerate()
                .flat_map(|(i, &n)| js.iter().enumerate().map(move |(j, &jj)| (n as f64, jj as f64, i, j)))
                .map(|(n, j, i, k)| (n, j, ratios[i][k]))
                .collect())
        }
        _ => {
            let kind = UniformTableKind::from_number(which).expect("checked");
            let t = tables_uniform(kind, ctx)?;
            Ok(t.a_values
                .iter()
                .enumerate()
                .flat_map(|(i, &a)| t.t_values.iter().enumerate().map(move |(j, &tv)| (a, tv, i, j)))
                .map(|(a, tv, i, j)| (a, tv, t.ratios[i][j]))
                .collect())
        }
    }
}

/// Compute table `which` and compare entrywise with the stored values.
/// The uniform tables additionally require every ratio ≤ 1.
pub fn run_table(which: u32, ctx: &PrecisionContext) -> Result<TableRun> {
    check_which(which)?;
    let tol = tolerance(which);
    let want = expected(which)?;
    let cells = grid(which, ctx)?
        .into_iter()
        .map(|(row, col, rho)| {
            let e = want.iter().find(|w| w.0 == row && w.1 == col).map(|w| w.2);
            let close = e.is_some_and(|e| (rho - e).abs() <= tol * (1.0 + 1e-9));
            let sound = which <= 2 || rho <= 1.0;
            TableCell { row, col, rho, expected: e, pass: close && sound && rho.is_finite() }
        })
        .collect();
    Ok(TableRun { which, tolerance: tol, digits: ctx.digits(), cells })
}
