//! `verify-moments`: truncated moments against their closed-form bounds on
//! a sample of (n, x) cells, one check line per inequality.

use qkorovkin::moments::moment_report;

use crate::commands::{CommandOutput, CommandResult};
use crate::config::Config;
use crate::report::{g17, record, Check, Csv};

pub fn run(config: &Config) -> CommandResult {
    let rules = config.sequence_spec();
    let trunc = config.truncation();
    let r = config.operator.r;
    let mass_tol = config.truncation.mass_tol;

    let mut report = format!(
        "verify-moments: r={r} mass-tol={} p-max={} x-samples={:?} n-ladder={:?}\n",
        g17(mass_tol),
        config.truncation.p_max,
        config.moments.x_samples,
        config.operator.n_ladder
    );
    let mut csv = Csv::new(&[
        "n", "x", "m0", "m1", "m2", "bound1", "bound2", "central2", "gamma",
    ]);
    let mut failures = 0usize;

    for &n in &config.operator.n_ladder {
        let spec = rules.operator_spec(r, n)?;
        for &x in &config.moments.x_samples {
            let rep = moment_report(&spec, x, trunc)?;
            csv.row(&[
                n.to_string(),
                g17(x),
                g17(rep.moment0),
                g17(rep.moment1),
                g17(rep.moment2),
                g17(rep.bound1),
                g17(rep.bound2),
                g17(rep.central2),
                g17(rep.gamma),
            ]);

            let central_slack = rep.central2_slack(x);
            failures += record(
                &mut report,
                Check {
                    label: format!("n={n} x={} normalization |m0-1|", g17(x)),
                    lhs: (rep.moment0 - 1.0).abs(),
                    rhs: mass_tol,
                    slack: 1e-12,
                },
            );
            failures += record(
                &mut report,
                Check {
                    label: format!("n={n} x={} first-moment |m1-x| <= bound1", g17(x)),
                    lhs: (rep.moment1 - x).abs(),
                    rhs: rep.bound1,
                    slack: rep.tails[1] + 1e-12,
                },
            );
            failures += record(
                &mut report,
                Check {
                    label: format!("n={n} x={} second-moment |m2-x^2| <= bound2", g17(x)),
                    lhs: (rep.moment2 - x * x).abs(),
                    rhs: rep.bound2,
                    slack: rep.tails[2] + 1e-12,
                },
            );
            failures += record(
                &mut report,
                Check {
                    label: format!("n={n} x={} central moment nonnegative", g17(x)),
                    lhs: -rep.central2,
                    rhs: 0.0,
                    slack: central_slack + 1e-12,
                },
            );
            failures += record(
                &mut report,
                Check {
                    label: format!("n={n} x={} central moment <= gamma", g17(x)),
                    lhs: rep.central2,
                    rhs: rep.gamma,
                    slack: central_slack + 1e-12,
                },
            );
        }
    }

    report.push_str(&format!("verify-moments: {failures} failure(s)\n"));
    Ok(CommandOutput {
        report,
        csv: csv.finish(),
        failures,
    })
}
