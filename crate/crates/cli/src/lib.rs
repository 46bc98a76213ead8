//! Command-line front end for the `zetalab` library.

pub mod args;
pub mod cache;
mod commands;
mod num;
pub mod report;
mod verify;

use std::io::Write;

use clap::Parser;
use serde::de::DeserializeOwned;
use serde::Serialize;

use args::{CfCommand, Cli, Command};
use cache::{Cache, Lookup};
use commands::MomentFamily;
use report::Report;
use zetalab::quadrature::BesselProduct;
use zetalab::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Shared state of one invocation.
pub struct Context<'a> {
    cache: Option<Cache>,
    err: &'a mut dyn Write,
}

impl Context<'_> {
    /// Raw result for `key` at `digits` or better, from the cache when
    /// possible. Unreadable entries are reported and recomputed.
    fn cached<T, F>(&mut self, key: &str, digits: u32, compute: F) -> zetalab::Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> zetalab::Result<T>,
    {
        if let Some(c) = &self.cache {
            match c.get(key, digits) {
                (Some(v), _) => match serde_json::from_value(v) {
                    Ok(t) => return Ok(t),
                    Err(e) => {
                        let _ = writeln!(self.err, "warning: cache entry for '{key}' ignored: {e}");
                    }
                },
                (None, Lookup::Corrupt(msg)) => {
                    let _ = writeln!(self.err, "warning: cache entry ignored: {msg}");
                }
                _ => {}
            }
        }
        let t = compute()?;
        if let Some(c) = &self.cache {
            let stored = serde_json::to_value(&t)
                .map_err(std::io::Error::from)
                .and_then(|v| c.put(key, digits, &v));
            if let Err(e) = stored {
                let _ = writeln!(self.err, "warning: could not write cache entry for '{key}': {e}");
            }
        }
        Ok(t)
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidArgument(_)
            | Error::Domain(_)
            | Error::Divergent { .. }
            | Error::UnsupportedSubfamily(_)
            | Error::Precondition { .. }
            | Error::Structural(_)
    )
}

fn pair(v: Option<Vec<i64>>) -> zetalab::Result<Option<(i64, i64)>> {
    match v.as_deref() {
        None => Ok(None),
        Some(&[a, b]) => Ok(Some((a, b))),
        Some(_) => Err(Error::InvalidArgument("initial data takes two values, as in 0,6".into())),
    }
}

fn dispatch(ctx: &mut Context, cmd: Command) -> zetalab::Result<Report> {
    match cmd {
        Command::Moment {
            kappa,
            n,
            j,
            p,
            a,
            b,
            c,
            d,
            digits,
        } => {
            let fam = match (kappa, p) {
                (Some(kappa), _) => MomentFamily::Normalized {
                    kappa,
                    n: n.ok_or_else(|| Error::InvalidArgument("--n is required with --kappa".into()))?,
                    j: j.unwrap_or(0),
                },
                (None, Some(p)) => MomentFamily::Raw(BesselProduct::new(p, a, b, c, d)),
                (None, None) => return Err(Error::InvalidArgument("give --kappa or --p".into())),
            };
            commands::moment_cmd(ctx, fam, digits.digits)
        }
        Command::Decompose { kappa, n, j } => commands::decompose_cmd(kappa, n, j),
        Command::Cf(CfCommand::List) => commands::cf_list(),
        Command::Cf(CfCommand::Eval { name, depth, digits }) => commands::cf_eval(&name, depth, digits.digits),
        Command::Cf(CfCommand::Convergents {
            name,
            k_max,
            init_num,
            init_den,
            against,
            normalize,
            digits,
        }) => {
            let init = match (pair(init_num)?, pair(init_den)?) {
                (Some(a), Some(b)) => Some((a, b)),
                (None, None) => None,
                _ => {
                    return Err(Error::InvalidArgument(
                        "--init-num and --init-den must be given together".into(),
                    ))
                }
            };
            commands::cf_convergents(&name, k_max, init, against.as_deref(), normalize, digits.digits)
        }
        Command::Cf(CfCommand::Chain { kappa, digits }) => commands::cf_chain(kappa, digits.digits),
        Command::Pslq {
            values,
            labels,
            max_coeff,
            confidence,
            digits,
        } => commands::pslq_cmd(&values, labels, &max_coeff, confidence, digits.digits),
        Command::Verify { suite, digits } => verify::verify_cmd(suite, digits.digits),
        Command::Period {
            n,
            p,
            form,
            digits,
            seed,
            qmc_points,
            force_qmc,
        } => commands::period_cmd(
            ctx,
            &commands::PeriodArgs {
                n,
                p,
                form,
                digits,
                seed,
                qmc_points,
                force_qmc,
            },
        ),
        Command::Limits { n_max, digits } => commands::limits_cmd(ctx, n_max, digits),
    }
}

/// Parse `args` (program name first), run the command and write the report
/// to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let cache = if cli.no_cache {
        None
    } else {
        cli.cache_dir.as_deref().map(Cache::new)
    };
    let format = cli.format;
    let mut ctx = Context { cache, err };
    match dispatch(&mut ctx, cli.command) {
        Ok(rep) => {
            if let Err(e) = rep.write(format, out) {
                let _ = writeln!(ctx.err, "error: {e}");
                return EXIT_FAILED;
            }
            if rep.passed == Some(false) {
                EXIT_FAILED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            if is_usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAILED
            }
        }
    }
}
