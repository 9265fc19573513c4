use caputo_core::{caputo_expansion, error_bound};

use crate::csv::Table;
use crate::error::{CliError, CliResult};
use crate::function::{params, FunctionSpec};
use crate::DerivArgs;

/// Columns: `t, approx, [exact,] direct_quadrature, abs_error, bound`. The
/// error is measured against the exact column when present.
pub fn run(args: DerivArgs) -> CliResult<()> {
    let spec = FunctionSpec::new(
        &args.expr,
        args.alpha,
        args.a,
        args.b,
        args.side.into(),
        args.exact_beta,
    )?;
    let params = params(args.m, args.n_terms)?;
    let grid = spec.grid(args.grid)?;
    let approx = caputo_expansion(
        &spec.expr,
        spec.a,
        spec.b,
        spec.order,
        params,
        spec.side,
        &grid,
    )
    .map_err(CliError::numeric)?;
    let exact = spec.exact(&grid)?;
    let direct = spec.direct(&grid)?;
    let max_deriv = spec.derivative_bound(params)?;

    let mut header = vec!["t", "approx"];
    if exact.is_some() {
        header.push("exact");
    }
    header.extend(["direct_quadrature", "abs_error", "bound"]);
    let mut table = Table::new(header);
    for (i, &t) in grid.iter().enumerate() {
        let value = approx.values()[i];
        let oracle = direct.values()[i];
        let mut row = vec![t, value];
        let reference = match &exact {
            Some(e) => {
                row.push(e.values()[i]);
                e.values()[i]
            }
            None => oracle,
        };
        row.push(oracle);
        row.push((value - reference).abs());
        row.push(error_bound(spec.order, params, spec.anchor(), t, max_deriv));
        table.push(row);
    }
    table.emit(args.out.as_deref())
}
