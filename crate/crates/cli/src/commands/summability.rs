//! `summability`: builds the sup-norm error sequences of the q-integral
//! operator for the first two monomials and a configured test target, then
//! reports the deferred weighted A-densities of their eps-exceedance sets
//! along a prefix ladder, expecting decay toward 0.
//!
//! Sequence index m corresponds to operator index n = m + 1 (the operator
//! family starts at n = 2). Monomial errors run through the closed-form
//! moment path; identity and square test targets reuse it, anything else
//! goes through the generic numeric evaluator.

use rayon::prelude::*;

use qkorovkin::moments::moment_report;
use qkorovkin::operators::{accept_partial, q_integral_operator};
use qkorovkin::summability::deferred_weighted_a_density;

use crate::commands::{CommandError, CommandOutput, CommandResult};
use crate::config::{Config, TargetName};
use crate::report::{g17, record, Check, Csv};

struct Row {
    n: usize,
    q: f64,
    err_m1: f64,
    err_m2: f64,
    err_target: f64,
    max_tail: f64,
}

pub fn run(config: &Config) -> CommandResult {
    let rules = config.sequence_spec();
    let trunc = config.truncation();
    let r = config.operator.r;
    let target = config.target_function();
    let prefix = config.summability.prefix;
    let grid_points = config.grid.points;
    let scheme = config.scheme();

    let rows: Vec<Row> = (1..=prefix)
        .into_par_iter()
        .map(|m| -> Result<Row, CommandError> {
            let n = m + 1;
            let spec = rules.operator_spec(r, n)?;
            let mut err_m1 = 0.0_f64;
            let mut err_m2 = 0.0_f64;
            let mut err_target = 0.0_f64;
            let mut max_tail = 0.0_f64;
            for i in 0..grid_points {
                let x = i as f64 / (grid_points - 1) as f64;
                let rep = moment_report(&spec, x, trunc)?;
                err_m1 = err_m1.max((rep.moment1 - x).abs());
                err_m2 = err_m2.max((rep.moment2 - x * x).abs());
                max_tail = max_tail.max(rep.tails[1]).max(rep.tails[2]);
                match config.target.function {
                    TargetName::Identity => err_target = err_m1,
                    TargetName::Square => err_target = err_m2,
                    _ => {
                        let res = accept_partial(q_integral_operator(
                            &spec,
                            |s| target.eval(s),
                            x,
                            trunc,
                        ))?;
                        err_target = err_target.max((res.value - target.eval(x)).abs());
                        max_tail = max_tail.max(res.tail_bound);
                    }
                }
            }
            Ok(Row {
                n,
                q: spec.q().get(),
                err_m1,
                err_m2,
                err_target,
                max_tail,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut report = format!(
        "summability: target={} r={r} prefix={prefix} grid={grid_points} scheme={:?}/{:?}/{:?}\n",
        target.name(),
        config.summability.matrix,
        config.summability.weights,
        config.summability.deferral
    );
    report.push_str("sequence index m corresponds to operator index n = m + 1\n");
    let mut csv = Csv::new(&["m", "n", "q", "err_m1", "err_m2", "err_target", "max_tail"]);
    for (i, row) in rows.iter().enumerate() {
        csv.row(&[
            (i + 1).to_string(),
            row.n.to_string(),
            g17(row.q),
            g17(row.err_m1),
            g17(row.err_m2),
            g17(row.err_target),
            g17(row.max_tail),
        ]);
    }

    let mut failures = 0usize;
    let prefixes: Vec<usize> = [prefix / 8, prefix / 4, prefix / 2, prefix]
        .iter()
        .copied()
        .filter(|&p| p >= 1)
        .collect();
    type ErrorSeq<'a> = (&'a str, Box<dyn Fn(usize) -> f64 + 'a>);
    let sequences: [ErrorSeq; 3] = [
        ("m1", Box::new(|m: usize| rows[m - 1].err_m1)),
        ("m2", Box::new(|m: usize| rows[m - 1].err_m2)),
        ("target", Box::new(|m: usize| rows[m - 1].err_target)),
    ];
    for (name, errs) in &sequences {
        for &eps in &config.summability.epsilons {
            let mut values = Vec::new();
            for &p in &prefixes {
                // indices beyond the computed prefix count as non-members
                let density = deferred_weighted_a_density(
                    |k| k <= prefix && errs(k) >= eps,
                    scheme,
                    p,
                )?;
                report.push_str(&format!(
                    "density seq={name} eps={} prefix={p} value={}\n",
                    g17(eps),
                    g17(density)
                ));
                values.push(density);
            }
            failures += record(
                &mut report,
                Check {
                    label: format!("seq={name} eps={} density decays along the prefix ladder", g17(eps)),
                    lhs: *values.last().expect("nonempty ladder"),
                    rhs: values[0],
                    slack: 1e-12,
                },
            );
        }
    }

    report.push_str(&format!("summability: {failures} failure(s)\n"));
    Ok(CommandOutput {
        report,
        csv: csv.finish(),
        failures,
    })
}
