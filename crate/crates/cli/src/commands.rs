//! The three subcommands, writing human-readable reports to a caller-supplied sink.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use pdcnot_core::metrics::{average_parallel, average_sc_parallel, average_single, Averages, ParallelMode, QuadratureSpec};
use pdcnot_core::protocol::{run_parallel_cnot, run_sc_parallel_cnot, run_single_cnot, NodeConfig, QubitInit};
use pdcnot_core::ProtocolOutcome;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{GridPoint, SweepConfig, Variant};
use crate::format::sig12;
use crate::CliError;

pub const CSV_HEADER: [&str; 10] = [
    "c_a",
    "c_b",
    "delta_up_a",
    "delta_down_a",
    "delta_c_a",
    "delta_up_b",
    "delta_down_b",
    "delta_c_b",
    "fidelity",
    "efficiency",
];

/// Deviation allowed from exact unity in ideal mode.
pub const IDEAL_TOLERANCE: f64 = 1e-10;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".into(),
        source,
    }
}

fn quadrature(cfg: &SweepConfig) -> Result<QuadratureSpec, CliError> {
    Ok(QuadratureSpec::new(cfg.nodes)?)
}

/// Average fidelity and efficiency of `variant` at one grid point.
pub fn evaluate(variant: Variant, node: &NodeConfig, quad: &QuadratureSpec) -> Result<Averages, CliError> {
    Ok(match variant {
        Variant::Single => average_single(node, quad)?,
        Variant::Parallel => average_parallel(node, quad, ParallelMode::Factorized)?,
        Variant::ScParallel => average_sc_parallel(node, quad)?,
    })
}

/// A reported quantity with its reference value.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub quantity: &'static str,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(quantity: &'static str, value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            quantity,
            value,
            target,
            tolerance,
            pass: (value - target).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchmarkReport {
    pub ideal: bool,
    pub nodes: usize,
    pub c_a: f64,
    pub c_b: f64,
    pub checks: Vec<Check>,
}

impl BenchmarkReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn value(&self, quantity: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.quantity == quantity).map(|c| c.value)
    }
}

/// Single-gate and parallel-gate averages at the configured point (the
/// benchmark by default) against the published figures.
pub fn benchmark_report(cfg: &SweepConfig) -> Result<BenchmarkReport, CliError> {
    let point = cfg.first_point();
    let node = point.node_config(cfg.ideal)?;
    let quad = quadrature(cfg)?;
    let single = average_single(&node, &quad)?;
    let parallel = average_parallel(&node, &quad, ParallelMode::Factorized)?;
    let checks = if cfg.ideal {
        vec![
            Check::new("single_fidelity", single.fidelity, 1.0, IDEAL_TOLERANCE),
            Check::new("single_efficiency", single.efficiency, 1.0, IDEAL_TOLERANCE),
            Check::new("parallel_fidelity", parallel.fidelity, 1.0, IDEAL_TOLERANCE),
            Check::new("parallel_efficiency", parallel.efficiency, 1.0, IDEAL_TOLERANCE),
        ]
    } else {
        vec![
            Check::new("single_fidelity", single.fidelity, 0.999, 0.003),
            Check::new("single_efficiency", single.efficiency, 0.943, 0.005),
            Check::new("parallel_fidelity", parallel.fidelity, 0.999, 0.003),
            Check::new("parallel_efficiency", parallel.efficiency, 0.890, 0.005),
        ]
    };
    Ok(BenchmarkReport {
        ideal: cfg.ideal,
        nodes: cfg.nodes,
        c_a: point.c_a,
        c_b: point.c_b,
        checks,
    })
}

pub fn reproduce_benchmark(cfg: &SweepConfig, out: &mut impl Write) -> Result<(), CliError> {
    let report = benchmark_report(cfg)?;
    writeln!(
        out,
        "benchmark C_A = {}, C_B = {}, {} nodes{}",
        report.c_a,
        report.c_b,
        report.nodes,
        if report.ideal { ", ideal reflections" } else { "" }
    )
    .map_err(stdout_err)?;
    for c in &report.checks {
        writeln!(
            out,
            "{:<20} {}  target {} ± {:e}  {}",
            c.quantity,
            sig12(c.value),
            c.target,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" }
        )
        .map_err(stdout_err)?;
    }
    if let Some(path) = &cfg.out {
        let file = File::create(path).map_err(io_err(path))?;
        serde_json::to_writer_pretty(file, &report).map_err(|e| CliError::Config(e.to_string()))?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Tolerance("benchmark values outside tolerance".into()))
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// Evaluates every grid point; rows come back in grid order whatever the thread count.
pub fn sweep_rows(cfg: &SweepConfig, threads: Option<usize>) -> Result<Vec<(GridPoint, Averages)>, CliError> {
    let quad = quadrature(cfg)?;
    let grid = cfg.grid();
    pool(threads)?.install(|| {
        grid.par_iter()
            .map(|p| {
                let node = p.node_config(cfg.ideal)?;
                Ok((*p, evaluate(cfg.variant, &node, &quad)?))
            })
            .collect()
    })
}

pub fn write_sweep_csv(rows: &[(GridPoint, Averages)], sink: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for (p, avg) in rows {
        let mut rec: Vec<String> = p.as_array().iter().map(|&x| sig12(x)).collect();
        rec.push(sig12(avg.fidelity));
        rec.push(sig12(avg.efficiency));
        w.write_record(&rec)?;
    }
    w.flush().map_err(stdout_err)
}

pub fn sweep(cfg: &SweepConfig, threads: Option<usize>, out: &mut impl Write) -> Result<(), CliError> {
    let rows = sweep_rows(cfg, threads)?;
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            write_sweep_csv(&rows, io::BufWriter::new(file))?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display()).map_err(stdout_err)
        }
        None => write_sweep_csv(&rows, out),
    }
}

/// Probability and corrected-output fidelity of one herald outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub probability: f64,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthTable {
    pub variant: Variant,
    /// Basis inputs as bit strings, one per row (`0` = `|↑⟩`/`|g⟩`).
    pub inputs: Vec<String>,
    /// Herald labels, `m` or `m,n`.
    pub branches: Vec<String>,
    pub cells: Vec<Vec<Cell>>,
}

impl TruthTable {
    /// Largest deviation from unit fidelity and from uniform branch probability.
    pub fn ideal_deviation(&self) -> f64 {
        let uniform = 1.0 / self.branches.len() as f64;
        self.cells
            .iter()
            .flatten()
            .map(|c| {
                let f = c.fidelity.map_or(f64::INFINITY, |f| (f - 1.0).abs());
                f.max((c.probability - uniform).abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn min_fidelity(&self) -> Option<f64> {
        self.cells
            .iter()
            .flatten()
            .map(|c| c.fidelity)
            .try_fold(f64::INFINITY, |acc, f| f.map(|f| acc.min(f)))
    }
}

fn bits(value: usize, width: usize) -> String {
    (0..width).rev().map(|k| if value >> k & 1 == 1 { '1' } else { '0' }).collect()
}

fn branch_label(o: &ProtocolOutcome) -> String {
    match o.herald.branch_n {
        Some(n) => format!("{},{}", o.herald.branch_m.index(), n.index()),
        None => o.herald.branch_m.index().to_string(),
    }
}

pub fn truth_table(variant: Variant, node: &NodeConfig) -> Result<TruthTable, CliError> {
    let width = if variant == Variant::Single { 2 } else { 4 };
    let mut inputs = Vec::new();
    let mut branches = Vec::new();
    let mut cells = Vec::new();
    for input in 0..1usize << width {
        let q: Vec<QubitInit> = (0..width)
            .map(|k| QubitInit::computational(input >> (width - 1 - k) & 1 == 1))
            .collect();
        let outcomes = match variant {
            Variant::Single => run_single_cnot(q[0], q[1], node)?,
            Variant::Parallel => run_parallel_cnot([q[0], q[1], q[2], q[3]], node)?,
            Variant::ScParallel => run_sc_parallel_cnot([q[0], q[1], q[2], q[3]], node)?,
        };
        if branches.is_empty() {
            branches = outcomes.iter().map(branch_label).collect();
        }
        inputs.push(bits(input, width));
        cells.push(
            outcomes
                .iter()
                .map(|o| Cell {
                    probability: o.branch_probability,
                    fidelity: o.fidelity,
                })
                .collect(),
        );
    }
    Ok(TruthTable {
        variant,
        inputs,
        branches,
        cells,
    })
}

fn write_truth_table_csv(t: &TruthTable, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(io::BufWriter::new(file));
    w.write_record(["input", "branch", "probability", "fidelity"])?;
    for (input, row) in t.inputs.iter().zip(&t.cells) {
        for (branch, c) in t.branches.iter().zip(row) {
            let f = c.fidelity.map_or_else(|| "nan".into(), sig12);
            w.write_record([input.as_str(), branch.as_str(), &sig12(c.probability), &f])?;
        }
    }
    w.flush().map_err(io_err(path))
}

pub fn truthtable(cfg: &SweepConfig, out: &mut impl Write) -> Result<(), CliError> {
    let node = cfg.first_point().node_config(cfg.ideal)?;
    let table = truth_table(cfg.variant, &node)?;
    let col = if cfg.variant == Variant::Single { 8 } else { 9 };
    write!(out, "{:<6}", "in").map_err(stdout_err)?;
    for b in &table.branches {
        write!(out, " {b:>col$}").map_err(stdout_err)?;
    }
    writeln!(out).map_err(stdout_err)?;
    for (input, row) in table.inputs.iter().zip(&table.cells) {
        write!(out, "{input:<6}").map_err(stdout_err)?;
        for c in row {
            match c.fidelity {
                Some(f) => write!(out, " {f:>col$.6}"),
                None => write!(out, " {:>col$}", "-"),
            }
            .map_err(stdout_err)?;
        }
        writeln!(out).map_err(stdout_err)?;
    }
    if let Some(path) = &cfg.out {
        write_truth_table_csv(&table, path)?;
    }
    if cfg.ideal {
        let dev = table.ideal_deviation();
        writeln!(out, "max deviation from ideal: {dev:e}").map_err(stdout_err)?;
        if dev > IDEAL_TOLERANCE {
            return Err(CliError::Tolerance(format!(
                "ideal truth table deviates by {dev:e} (> {IDEAL_TOLERANCE:e})"
            )));
        }
    } else if let Some(f) = table.min_fidelity() {
        writeln!(out, "min fidelity: {}", sig12(f)).map_err(stdout_err)?;
    }
    Ok(())
}
