use caputo_core::reference::{l2_grid_error, sousa_scheme};
use caputo_core::{caputo_expansion, GridFunction, Side};

use crate::csv::{format_number, Table};
use crate::error::{CliError, CliResult};
use crate::function::{params, FunctionSpec};
use crate::CompareArgs;

/// Columns: `t, expansion, sousa, [exact]` on the uniform `dt` grid without
/// its last node, which the Sousa scheme cannot reach.
pub fn run(args: CompareArgs) -> CliResult<()> {
    if !(args.alpha > 1.0 && args.alpha < 2.0) {
        return Err(CliError::Usage(format!(
            "the Sousa column needs 1 < alpha < 2, got {}",
            args.alpha
        )));
    }
    let spec = FunctionSpec::new(&args.expr, args.alpha, args.a, args.b, Side::Left, args.exact_beta)?;
    let steps = (spec.b - spec.a) / args.dt;
    let rounded = steps.round();
    if !(args.dt > 0.0) || rounded < 2.0 || (steps - rounded).abs() > 1e-6 * rounded {
        return Err(CliError::Usage(format!(
            "--dt {} must split [{}, {}] into an integer number (at least 2) of steps",
            args.dt, spec.a, spec.b
        )));
    }
    let grid = spec.grid(rounded as usize + 1)?;
    let samples = GridFunction::sample(grid.clone(), |t| spec.expr.eval(t)).map_err(CliError::numeric)?;
    let sousa = sousa_scheme(&samples, args.alpha).map_err(CliError::numeric)?;
    let nodes = sousa.times().to_vec();
    let expansion = caputo_expansion(
        &spec.expr,
        spec.a,
        spec.b,
        spec.order,
        params(args.m, args.n_terms)?,
        spec.side,
        &nodes,
    )
    .map_err(CliError::numeric)?;
    let exact = spec.exact(&nodes)?;

    let mut header = vec!["t", "expansion", "sousa"];
    if exact.is_some() {
        header.push("exact");
    }
    let mut table = Table::new(header);
    for (i, &t) in nodes.iter().enumerate() {
        let mut row = vec![t, expansion.values()[i], sousa.values()[i]];
        if let Some(e) = &exact {
            row.push(e.values()[i]);
        }
        table.push(row);
    }
    table.emit(args.out.as_deref())?;

    if let Some(e) = &exact {
        let exp_err = l2_grid_error(&expansion, e).map_err(CliError::numeric)?;
        let sousa_err = l2_grid_error(&sousa, e).map_err(CliError::numeric)?;
        eprintln!("l2_error_expansion = {}", format_number(exp_err));
        eprintln!("l2_error_sousa = {}", format_number(sousa_err));
    }
    Ok(())
}
