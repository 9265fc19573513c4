use caputo_core::reference::l2_grid_error;
use caputo_core::{caputo_expansion, successive_consistency};
use rayon::prelude::*;

use super::resolve_problem;
use crate::csv::{emit_text, format_number};
use crate::error::{CliError, CliResult};
use crate::function::{loglog_slope, params, FunctionSpec};
use crate::{ConvergenceArgs, SweepParam};

struct Row {
    value: u32,
    errors: Vec<f64>,
}

/// Plain-text table, tab separated. With `--expr` the rows hold the L² and
/// max grid errors of the expansion; otherwise `E(g_{N-1}, g_N)` of the FDE.
pub fn run(args: ConvergenceArgs) -> CliResult<()> {
    if args.values.is_empty() {
        return Err(CliError::Usage("--values needs at least one entry".into()));
    }
    let (columns, rows, out) = match &args.expr {
        Some(expr) => expression_sweep(&args, expr)?,
        None => problem_sweep(&args)?,
    };

    let label = match args.sweep {
        SweepParam::N => "N",
        SweepParam::M => "m",
    };
    let mut text = format!("{label}\t{}\n", columns.join("\t"));
    for row in &rows {
        text.push_str(&row.value.to_string());
        for e in &row.errors {
            text.push('\t');
            text.push_str(&format_number(*e));
        }
        text.push('\n');
    }
    if args.sweep == SweepParam::N {
        let xs: Vec<f64> = rows.iter().map(|r| f64::from(r.value)).collect();
        for (c, name) in columns.iter().enumerate() {
            let ys: Vec<f64> = rows.iter().map(|r| r.errors[c]).collect();
            if let Some(slope) = loglog_slope(&xs, &ys) {
                text.push_str(&format!("slope({name})\t{}\n", format_number(slope)));
            }
        }
    }
    emit_text(&text, out.as_deref())
}

type Sweep = (Vec<&'static str>, Vec<Row>, Option<std::path::PathBuf>);

fn expression_sweep(args: &ConvergenceArgs, expr: &str) -> CliResult<Sweep> {
    let p = &args.problem;
    if p.config.is_some() || p.forcing.is_some() {
        return Err(CliError::Usage(
            "--expr sweeps take no FDE problem (--config/--forcing)".into(),
        ));
    }
    let alpha = p
        .alpha
        .ok_or_else(|| CliError::Usage("--alpha is required".into()))?;
    let spec = FunctionSpec::new(
        expr,
        alpha,
        p.a.unwrap_or(0.0),
        p.b.unwrap_or(1.0),
        args.side.into(),
        args.exact_beta,
    )?;
    let grid = spec.grid(p.grid.unwrap_or(100))?;
    let reference = spec.reference(&grid)?;
    let (fixed_m, fixed_n) = (p.m.unwrap_or(1), p.n_terms.unwrap_or(50));
    let rows = args
        .values
        .par_iter()
        .map(|&v| {
            let (m, n) = match args.sweep {
                SweepParam::N => (fixed_m, v),
                SweepParam::M => (v, fixed_n),
            };
            let approx = caputo_expansion(
                &spec.expr,
                spec.a,
                spec.b,
                spec.order,
                params(m, n)?,
                spec.side,
                &grid,
            )
            .map_err(CliError::numeric)?;
            let l2 = l2_grid_error(&approx, &reference).map_err(CliError::numeric)?;
            let max = approx
                .values()
                .iter()
                .zip(reference.values())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            Ok(Row {
                value: v,
                errors: vec![l2, max],
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok((vec!["l2_error", "max_error"], rows, p.out.clone()))
}

fn problem_sweep(args: &ConvergenceArgs) -> CliResult<Sweep> {
    if args.sweep == SweepParam::M {
        return Err(CliError::Usage(
            "FDE sweeps run over N; the solver depth m is not a sweep parameter".into(),
        ));
    }
    let cfg = resolve_problem(&args.problem)?;
    let problem = cfg.problem()?;
    let solver = cfg.solver();
    let rows = args
        .values
        .par_iter()
        .map(|&n| {
            let e = successive_consistency(&problem, n, &solver).map_err(CliError::solver)?;
            Ok(Row {
                value: n,
                errors: vec![e],
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok((vec!["successive_error"], rows, cfg.path))
}
