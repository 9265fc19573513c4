pub mod compare;
pub mod convergence;
pub mod deriv;
pub mod solve;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::ProblemArgs;

/// Config file (if any) with flag overrides applied.
pub(crate) fn resolve_problem(args: &ProblemArgs) -> CliResult<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.a {
        cfg.a = v;
    }
    if let Some(v) = args.b {
        cfg.b = v;
    }
    if let Some(v) = args.frac_coeff {
        cfg.frac_coeff = v;
    }
    if let Some(v) = &args.coeffs {
        cfg.coeffs = v.clone();
    }
    if let Some(v) = args.damping {
        cfg.damping = Some(v);
    }
    if let Some(v) = &args.forcing {
        cfg.forcing = v.trim().to_string();
    }
    if let Some(v) = &args.ic {
        cfg.ics = v.clone();
    }
    if let Some(v) = args.m {
        cfg.m = v;
    }
    if let Some(v) = args.n_terms {
        cfg.n_terms = v;
    }
    if let Some(v) = args.abs_tol {
        cfg.abs_tol = v;
    }
    if let Some(v) = args.rel_tol {
        cfg.rel_tol = v;
    }
    if let Some(v) = args.epsilon_start {
        cfg.epsilon_start = Some(v);
    }
    if let Some(v) = args.grid {
        cfg.grid = v;
    }
    if let Some(v) = &args.out {
        cfg.path = Some(v.clone());
    }
    cfg.normalize()?;
    Ok(cfg)
}
