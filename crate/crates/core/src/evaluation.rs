//! Exact type-II oracle, the percent error metric, summary statistics, and
//! Welch's t-test for method comparison.
//!
//! The oracle inverts the true benchmark function (known to the evaluator,
//! unknown to the learner) by bisection, so learned opposites can be judged
//! against ground truth.

use serde::Serialize;

use crate::benchfn::{eval, eval_unchecked, Dataset, FunctionId};
use crate::error::{Error, Result};
use crate::opposition::{opposite_value, output_stats, OppositionScheme, OutputStats};
use crate::special::student_t_cdf;

/// Sample mean and standard deviation (`n - 1` denominator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Welch's t-test result. `p` is one-sided with alternative "the first
/// sample has the smaller mean".
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelchResult {
    pub t: f64,
    pub dof: f64,
    pub p: f64,
}

/// Ground-truth type-II opposite returned by [`oracle_type2`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub x: Vec<f64>,
    /// Set when the target output was outside the achievable range and the
    /// answer was clamped to the nearest box endpoint.
    pub clamped: bool,
}

/// Ground-truth type-II opposite of `x` for a strictly monotone 1-D function.
///
/// The target output is the opposite (under `scheme`) of `f(x)` with respect
/// to `stats_source`'s output statistics; the returned input achieves that
/// target within `1e-9 * (y_max - y_min)` via bisection on the box.
pub fn oracle_type2(
    fn_id: FunctionId,
    x: &[f64],
    scheme: OppositionScheme,
    stats_source: &Dataset,
) -> Result<OracleSolution> {
    if fn_id.arity() != 1 {
        return Err(Error::UnsupportedFunction(format!(
            "{fn_id} is not a strictly monotone 1-D function; the oracle cannot invert it"
        )));
    }
    let stats = output_stats(stats_source);
    let range = stats.y_max - stats.y_min;
    if range <= 0.0 {
        return Err(Error::Degenerate(
            "output range is empty; the opposite target is undefined".to_string(),
        ));
    }
    let y = eval(fn_id, x)?;
    let target = opposite_value(y, &stats, scheme);

    let bounds = stats_source.bounds();
    let (mut lo, mut hi) = (bounds.lower()[0], bounds.upper()[0]);
    let f_lo = eval_unchecked(fn_id, &[lo]);
    let f_hi = eval_unchecked(fn_id, &[hi]);
    let increasing = f_hi > f_lo;

    // Targets outside the achievable output range clamp to an endpoint.
    let (y_at_lo_end, y_at_hi_end) = if increasing { (f_lo, f_hi) } else { (f_hi, f_lo) };
    if target <= y_at_lo_end {
        let x = if increasing { lo } else { hi };
        return Ok(OracleSolution {
            x: vec![x],
            clamped: target < y_at_lo_end,
        });
    }
    if target >= y_at_hi_end {
        let x = if increasing { hi } else { lo };
        return Ok(OracleSolution {
            x: vec![x],
            clamped: target > y_at_hi_end,
        });
    }

    // Bisect until the bracket collapses to machine precision; the residual
    // then sits far below the 1e-9 * range guarantee.
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval_unchecked(fn_id, &[mid]);
        if (fm < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(OracleSolution {
        x: vec![mid],
        clamped: false,
    })
}

/// Approximation error of a predicted type-II opposite, as a percentage of
/// the output range: `100 * |y_target - f(x_pred)| / (y_max - y_min)`.
pub fn type2_error(
    fn_id: FunctionId,
    x: &[f64],
    x_pred: &[f64],
    scheme: OppositionScheme,
    stats: &OutputStats,
) -> Result<f64> {
    let range = (stats.y_max - stats.y_min).abs();
    if range == 0.0 {
        return Err(Error::Degenerate(
            "output range is zero; the percent error is undefined".to_string(),
        ));
    }
    let y = eval(fn_id, x)?;
    let target = opposite_value(y, stats, scheme);
    let y_pred = eval(fn_id, x_pred)?;
    Ok(100.0 * (target - y_pred).abs() / range)
}

/// Sample mean and `n - 1` standard deviation; a singleton has std 0.
pub fn summarize(errors: &[f64]) -> Result<ErrorSummary> {
    if errors.is_empty() {
        return Err(Error::usage(
            "cannot summarize an empty sequence".to_string(),
        ));
    }
    let n = errors.len();
    let mean = errors.iter().sum::<f64>() / n as f64;
    let std = if n == 1 {
        0.0
    } else {
        let ss: f64 = errors.iter().map(|e| (e - mean) * (e - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    };
    Ok(ErrorSummary { mean, std, n })
}

/// Welch's t-test on two samples. Small `p` means the first sample's mean is
/// significantly smaller.
pub fn welch(a: &[f64], b: &[f64]) -> Result<WelchResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::usage(format!(
            "Welch's test needs at least 2 observations per sample (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    welch_from_summary(&summarize(a)?, &summarize(b)?)
}

/// Welch's t-test from per-sample summary statistics.
pub fn welch_from_summary(a: &ErrorSummary, b: &ErrorSummary) -> Result<WelchResult> {
    if a.n < 2 || b.n < 2 {
        return Err(Error::usage(format!(
            "Welch's test needs at least 2 observations per sample (got {} and {})",
            a.n, b.n
        )));
    }
    let va = a.std * a.std / a.n as f64;
    let vb = b.std * b.std / b.n as f64;
    let se2 = va + vb;
    if se2 == 0.0 {
        return Err(Error::Degenerate(
            "both samples are constant; the t statistic is undefined".to_string(),
        ));
    }
    let t = (a.mean - b.mean) / se2.sqrt();
    let dof = se2 * se2 / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64);
    let p = student_t_cdf(t, dof);
    Ok(WelchResult { t, dof, p })
}

/// Published reference errors (percent of output range) for a benchmark
/// function / scheme pair: the prior evolving-fuzzy baseline and the neural
/// results it was compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub proposed_mean: f64,
    pub proposed_std: f64,
    pub fuzzy_mean: f64,
    pub fuzzy_std: f64,
}

/// Reference constants for the eight 1-D benchmark functions; `None` for the
/// 2-D functions, which have no published approximation-error row.
pub fn reference_row(fn_id: FunctionId, scheme: OppositionScheme) -> Option<ReferenceRow> {
    use FunctionId::*;
    use OppositionScheme::*;
    let (pm, ps, fm, fs) = match (fn_id, scheme) {
        (CubicShift, T1) => (0.76, 0.85, 4.41, 2.44),
        (CubicShift, T2) => (9.53, 12.99, 11.96, 12.82),
        (CubicShift, T3) => (4.65, 9.95, 6.82, 10.62),
        (LogShift, T1) => (18.95, 18.00, 30.05, 20.87),
        (LogShift, T2) => (10.02, 15.73, 11.20, 18.48),
        (LogShift, T3) => (2.98, 9.85, 6.39, 7.87),
        (Linear2x, T1) => (0.19, 0.26, 0.01, 0.01),
        (Linear2x, T2) => (6.24, 11.08, 21.03, 14.31),
        (Linear2x, T3) => (0.30, 0.58, 0.25, 0.65),
        (Square, T1) => (0.49, 0.55, 3.04, 1.72),
        (Square, T2) => (8.46, 12.56, 15.02, 14.31),
        (Square, T3) => (3.61, 7.98, 4.41, 6.38),
        (Sqrt, T1) => (0.60, 1.15, 0.04, 0.13),
        (Sqrt, T2) => (2.91, 7.68, 18.99, 16.33),
        (Sqrt, T3) => (2.70, 5.91, 3.74, 4.22),
        (Pow32, T1) => (0.37, 0.31, 1.68, 1.03),
        (Pow32, T2) => (5.16, 10.52, 17.89, 14.92),
        (Pow32, T3) => (2.15, 4.27, 2.66, 4.12),
        (CubicPoly, T1) => (1.36, 2.84, 4.42, 2.72),
        (CubicPoly, T2) => (9.84, 12.57, 11.82, 12.95),
        (CubicPoly, T3) => (5.13, 10.79, 6.31, 9.99),
        (SqrtShiftThird, T1) => (1.63, 3.50, 0.06, 0.11),
        (SqrtShiftThird, T2) => (4.27, 8.17, 18.20, 16.79),
        (SqrtShiftThird, T3) => (2.11, 5.15, 3.74, 4.61),
        _ => return None,
    };
    Some(ReferenceRow {
        proposed_mean: pm,
        proposed_std: ps,
        fuzzy_mean: fm,
        fuzzy_std: fs,
    })
}
