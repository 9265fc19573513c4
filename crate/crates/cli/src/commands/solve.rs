use caputo_core::reference::l2_grid_error;
use caputo_core::{solve_fde, Expr, GridFunction};

use super::resolve_problem;
use crate::csv::{emit_text, format_number, Table};
use crate::error::{CliError, CliResult};
use crate::SolveArgs;

fn derivative_label(j: usize) -> String {
    match j {
        0 => "x".into(),
        _ => format!("x{}", "p".repeat(j)),
    }
}

/// Columns: `t, x` and, with `--derivatives`, `xp, xpp, …`.
pub fn run(args: SolveArgs) -> CliResult<()> {
    let cfg = resolve_problem(&args.problem)?;
    if args.print_config {
        return emit_text(&cfg.render(), None);
    }
    let problem = cfg.problem()?;
    let reference = args
        .reference
        .as_deref()
        .map(Expr::parse)
        .transpose()
        .map_err(CliError::numeric)?;

    let solution = solve_fde(&problem, cfg.n_terms, &cfg.solver()).map_err(CliError::solver)?;
    let columns = if args.derivatives {
        solution.derivative_count()
    } else {
        1
    };
    let mut table = Table::new(std::iter::once("t".to_string()).chain((0..columns).map(derivative_label)));
    for (t, state) in solution.times().iter().zip(solution.states()) {
        let mut row = vec![*t];
        row.extend_from_slice(&state[..columns]);
        table.push(row);
    }
    table.emit(cfg.path.as_deref())?;

    if let Some(exact) = reference {
        let x = solution.x();
        let sampled = GridFunction::sample(x.times().to_vec(), |t| exact.eval(t))
            .map_err(CliError::numeric)?;
        let err = l2_grid_error(&x, &sampled).map_err(CliError::numeric)?;
        eprintln!("l2_error_vs_reference = {}", format_number(err));
    }
    Ok(())
}
