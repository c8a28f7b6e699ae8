//! `counterexample`: the square-index auxiliary operator applied to the
//! constant target. Its error sequence keeps returning to 1 (no classical
//! convergence), yet its Abel transform decays to 0 along the u-ladder.
//!
//! For the constant target the error identity is exact: the operator
//! normalizes constants, so the auxiliary error at index m is precisely the
//! squares indicator. The numeric column re-derives it from truncated
//! evaluations (operator indices start at 2; the transform and prefix
//! checks use the indicator sequence itself, defined from m = 1).

use rayon::prelude::*;

use qkorovkin::operators::{accept_partial, auxiliary_operator};
use qkorovkin::summability::{
    power_series_limit_estimate, power_series_transform, squares_indicator,
};

use crate::commands::{CommandError, CommandOutput, CommandResult};
use crate::config::Config;
use crate::report::{g17, record, Check, Csv};

struct Row {
    m: usize,
    indicator: f64,
    closed: f64,
    numeric: f64,
    tail: f64,
}

pub fn run(config: &Config) -> CommandResult {
    let rules = config.sequence_spec();
    let trunc = config.truncation();
    let r = config.operator.r;
    let m_max = config.counterexample.max_index;
    let grid_points = config.grid.points;
    let mass_tol = config.truncation.mass_tol;

    let rows: Vec<Row> = (2..=m_max)
        .into_par_iter()
        .map(|m| -> Result<Row, CommandError> {
            let spec = rules.operator_spec(r, m)?;
            let mut numeric = 0.0_f64;
            let mut tail = 0.0_f64;
            for i in 0..grid_points {
                let x = i as f64 / (grid_points - 1) as f64;
                let res = accept_partial(auxiliary_operator(&spec, m, |_| 1.0, x, trunc))?;
                numeric = numeric.max((res.value - 1.0).abs());
                tail = tail.max(res.tail_bound);
            }
            let indicator = squares_indicator(m);
            Ok(Row {
                m,
                indicator,
                closed: indicator,
                numeric,
                tail,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut report = format!(
        "counterexample: constant target, r={r} indices 2..={m_max} grid={grid_points}\n"
    );
    let mut csv = Csv::new(&["m", "indicator", "e_closed", "e_numeric", "tail_bound"]);
    let mut failures = 0usize;

    for row in &rows {
        csv.row(&[
            row.m.to_string(),
            g17(row.indicator),
            g17(row.closed),
            g17(row.numeric),
            g17(row.tail),
        ]);
        failures += record(
            &mut report,
            Check {
                label: format!("m={} numeric error matches the closed form", row.m),
                lhs: (row.numeric - row.closed).abs(),
                rhs: 2.0 * mass_tol,
                slack: 1e-12,
            },
        );
    }

    // the sequence never settles classically: its prefix maximum stays 1
    for prefix in [1usize, 5, 10, m_max] {
        let max = (1..=prefix).map(squares_indicator).fold(0.0_f64, f64::max);
        failures += record(
            &mut report,
            Check {
                label: format!("prefix max over m <= {prefix} equals 1"),
                lhs: (max - 1.0).abs(),
                rhs: 0.0,
                slack: 0.0,
            },
        );
    }

    // ...while its power-series transform decays toward 0
    let method = config.power_series_method();
    let mut previous = f64::INFINITY;
    for &u in &config.power_series.u_ladder {
        let t = power_series_transform(squares_indicator, Some(1.0), method, u)?;
        report.push_str(&format!("transform u={} value={}\n", g17(u), g17(t)));
        failures += record(
            &mut report,
            Check {
                label: format!("transform at u={} below the previous ladder point", g17(u)),
                lhs: t,
                rhs: previous,
                slack: -1e-15,
            },
        );
        previous = t;
    }
    let (estimate, trend) = power_series_limit_estimate(squares_indicator, Some(1.0), method)?;
    for (u, value) in &trend {
        report.push_str(&format!("ladder u={} value={}\n", g17(*u), g17(*value)));
    }
    report.push_str(&format!("ladder estimate (no extrapolation) = {}\n", g17(estimate)));
    failures += record(
        &mut report,
        Check {
            label: "ladder trend decreasing toward 0".to_string(),
            lhs: estimate,
            rhs: trend.first().expect("nonempty ladder").1,
            slack: -1e-15,
        },
    );

    report.push_str(&format!("counterexample: {failures} failure(s)\n"));
    Ok(CommandOutput {
        report,
        csv: csv.finish(),
        failures,
    })
}
