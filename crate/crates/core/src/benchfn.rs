//! Registry of benchmark functions with domains, sampling, and known optima.
//!
//! Eight 1-D functions (all strictly monotone on their default box `[0, 10]`)
//! feed the opposition-mining and regression pipeline; three 2-D functions
//! (Ackley, Bulkin, Booth) drive the opposition-guided search experiment.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a registered benchmark function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionId {
    /// `f(x) = (2x + 8)^3`
    CubicShift,
    /// `f(x) = ln(x + 3)`
    LogShift,
    /// `f(x) = 2x`
    Linear2x,
    /// `f(x) = x^2`
    Square,
    /// `f(x) = sqrt(x)`
    Sqrt,
    /// `f(x) = x^(3/2)`
    Pow32,
    /// `f(x) = x^3 + x^2 + 1`
    CubicPoly,
    /// `f(x) = sqrt(x + 1) / 3`
    SqrtShiftThird,
    /// 2-D Ackley function on `[-35, 35]^2`, minimum 0 at the origin.
    Ackley,
    /// 2-D Bulkin function on `[-15, -5] x [-3, 3]`, minimum 0 at `(-10, 1)`.
    Bulkin,
    /// 2-D Booth function on `[-10, 10]^2`, minimum 0 at `(1, 3)`.
    Booth,
}

impl FunctionId {
    /// Every registered function, 1-D first.
    pub const ALL: [FunctionId; 11] = [
        FunctionId::CubicShift,
        FunctionId::LogShift,
        FunctionId::Linear2x,
        FunctionId::Square,
        FunctionId::Sqrt,
        FunctionId::Pow32,
        FunctionId::CubicPoly,
        FunctionId::SqrtShiftThird,
        FunctionId::Ackley,
        FunctionId::Bulkin,
        FunctionId::Booth,
    ];

    /// The eight 1-D registry functions.
    pub const ONE_DIMENSIONAL: [FunctionId; 8] = [
        FunctionId::CubicShift,
        FunctionId::LogShift,
        FunctionId::Linear2x,
        FunctionId::Square,
        FunctionId::Sqrt,
        FunctionId::Pow32,
        FunctionId::CubicPoly,
        FunctionId::SqrtShiftThird,
    ];

    /// The three 2-D optimization test functions.
    pub const TWO_DIMENSIONAL: [FunctionId; 3] =
        [FunctionId::Ackley, FunctionId::Bulkin, FunctionId::Booth];

    pub fn name(&self) -> &'static str {
        match self {
            FunctionId::CubicShift => "cubic_shift",
            FunctionId::LogShift => "log_shift",
            FunctionId::Linear2x => "linear2x",
            FunctionId::Square => "square",
            FunctionId::Sqrt => "sqrt",
            FunctionId::Pow32 => "pow32",
            FunctionId::CubicPoly => "cubic_poly",
            FunctionId::SqrtShiftThird => "sqrt_shift_third",
            FunctionId::Ackley => "ackley",
            FunctionId::Bulkin => "bulkin",
            FunctionId::Booth => "booth",
        }
    }

    pub fn parse(name: &str) -> Result<FunctionId> {
        FunctionId::ALL
            .iter()
            .copied()
            .find(|f| f.name() == name)
            .ok_or_else(|| {
                let known: Vec<&str> = FunctionId::ALL.iter().map(|f| f.name()).collect();
                Error::usage(format!(
                    "unknown function `{name}`; known functions: {}",
                    known.join(", ")
                ))
            })
    }

    /// Number of input variables.
    pub fn arity(&self) -> usize {
        match self {
            FunctionId::Ackley | FunctionId::Bulkin | FunctionId::Booth => 2,
            _ => 1,
        }
    }

    /// Default domain box. The 1-D functions share `[0, 10]`, where all of
    /// them are total and strictly monotone.
    pub fn default_box(&self) -> DomainBox {
        let (lower, upper) = match self {
            FunctionId::Ackley => (vec![-35.0, -35.0], vec![35.0, 35.0]),
            FunctionId::Bulkin => (vec![-15.0, -3.0], vec![-5.0, 3.0]),
            FunctionId::Booth => (vec![-10.0, -10.0], vec![10.0, 10.0]),
            _ => (vec![0.0], vec![10.0]),
        };
        DomainBox::new(lower, upper).expect("registry boxes are valid")
    }

    /// Location of the global minimum for the 2-D test functions, where the
    /// function value is exactly 0. The 1-D functions have no registered
    /// minimizer (their extrema sit at the box endpoints).
    pub fn minimizer(&self) -> Option<&'static [f64]> {
        match self {
            FunctionId::Ackley => Some(&[0.0, 0.0]),
            FunctionId::Bulkin => Some(&[-10.0, 1.0]),
            FunctionId::Booth => Some(&[1.0, 3.0]),
            _ => None,
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Axis-aligned input box: componentwise `lower[i] < upper[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<DomainBox> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::usage(format!(
                "box bounds must be nonempty and of equal length (got {} and {})",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::usage(format!(
                    "box dimension {i} requires finite lower < upper (got [{lo}, {hi}])"
                )));
            }
        }
        Ok(DomainBox { lower, upper })
    }

    pub fn arity(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.arity()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| v >= lo && v <= hi)
    }

    /// Clamp a point componentwise into the box.
    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

/// An ordered sample set `{(x, y)}` with its input box.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    bounds: DomainBox,
}

impl Dataset {
    /// Requires at least two parallel samples, all inside `bounds`.
    pub fn new(xs: Vec<Vec<f64>>, ys: Vec<f64>, bounds: DomainBox) -> Result<Dataset> {
        if xs.len() != ys.len() {
            return Err(Error::usage(format!(
                "xs and ys must be parallel (got {} and {})",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::usage(format!(
                "a dataset needs at least 2 samples (got {})",
                xs.len()
            )));
        }
        for (i, x) in xs.iter().enumerate() {
            if !bounds.contains(x) {
                return Err(Error::domain(format!(
                    "sample {i} at {x:?} lies outside the box"
                )));
            }
        }
        Ok(Dataset { xs, ys, bounds })
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.bounds.arity()
    }

    pub fn xs(&self) -> &[Vec<f64>] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn bounds(&self) -> &DomainBox {
        &self.bounds
    }
}

/// How `sample` places its points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    /// Equispaced points including both endpoints (1-D only).
    Grid,
    /// I.i.d. uniform draws from the box.
    Uniform,
}

impl SampleMode {
    pub fn name(&self) -> &'static str {
        match self {
            SampleMode::Grid => "grid",
            SampleMode::Uniform => "uniform",
        }
    }

    pub fn parse(name: &str) -> Result<SampleMode> {
        match name {
            "grid" => Ok(SampleMode::Grid),
            "uniform" => Ok(SampleMode::Uniform),
            other => Err(Error::usage(format!(
                "unknown sampling mode `{other}`; expected grid or uniform"
            ))),
        }
    }
}

impl fmt::Display for SampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Raw formula evaluation without domain checks.
pub(crate) fn eval_unchecked(fn_id: FunctionId, x: &[f64]) -> f64 {
    match fn_id {
        FunctionId::CubicShift => {
            let t = 2.0 * x[0] + 8.0;
            t * t * t
        }
        FunctionId::LogShift => (x[0] + 3.0).ln(),
        FunctionId::Linear2x => 2.0 * x[0],
        FunctionId::Square => x[0] * x[0],
        FunctionId::Sqrt => x[0].sqrt(),
        FunctionId::Pow32 => x[0].powf(1.5),
        FunctionId::CubicPoly => x[0] * x[0] * x[0] + x[0] * x[0] + 1.0,
        FunctionId::SqrtShiftThird => (x[0] + 1.0).sqrt() / 3.0,
        FunctionId::Ackley => {
            use std::f64::consts::{E, PI};
            let (x1, x2) = (x[0], x[1]);
            20.0 * (1.0 - (-0.2 * (0.5 * (x1 * x1 + x2 * x2)).sqrt()).exp())
                - (0.5 * ((2.0 * PI * x1).cos() + (2.0 * PI * x2).cos())).exp()
                + E
        }
        FunctionId::Bulkin => {
            let (x1, x2) = (x[0], x[1]);
            100.0 * (x2 - 0.01 * x1 * x1).abs().sqrt() + 0.01 * (x1 + 10.0).abs()
        }
        FunctionId::Booth => {
            let (x1, x2) = (x[0], x[1]);
            let a = x1 + 2.0 * x2 - 7.0;
            let b = 2.0 * x1 + x2 - 5.0;
            a * a + b * b
        }
    }
}

/// Evaluate a registered function at `x`.
///
/// `x` must match the function's arity and lie inside its default domain box.
pub fn eval(fn_id: FunctionId, x: &[f64]) -> Result<f64> {
    if x.len() != fn_id.arity() {
        return Err(Error::usage(format!(
            "{fn_id} takes {} input(s), got {}",
            fn_id.arity(),
            x.len()
        )));
    }
    if !fn_id.default_box().contains(x) {
        return Err(Error::domain(format!(
            "{x:?} lies outside the domain box of {fn_id}"
        )));
    }
    Ok(eval_unchecked(fn_id, x))
}

/// Sample a function on its default domain box.
pub fn sample(fn_id: FunctionId, n: usize, mode: SampleMode, seed: u64) -> Result<Dataset> {
    sample_in(fn_id, fn_id.default_box(), n, mode, seed)
}

/// Sample a function on an explicit box (ranges are overridable; the caller
/// is responsible for choosing a box on which the formula is defined).
pub fn sample_in(
    fn_id: FunctionId,
    bounds: DomainBox,
    n: usize,
    mode: SampleMode,
    seed: u64,
) -> Result<Dataset> {
    if bounds.arity() != fn_id.arity() {
        return Err(Error::usage(format!(
            "box arity {} does not match {fn_id} (arity {})",
            bounds.arity(),
            fn_id.arity()
        )));
    }
    if n < 2 {
        return Err(Error::usage(format!("need at least 2 samples (got {n})")));
    }

    let xs: Vec<Vec<f64>> = match mode {
        SampleMode::Grid => {
            if bounds.arity() != 1 {
                return Err(Error::usage(
                    "grid sampling is defined for 1-D functions only; use uniform".to_string(),
                ));
            }
            let (lo, hi) = (bounds.lower()[0], bounds.upper()[0]);
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    // Pin the last point to the exact upper bound so output
                    // extrema of monotone functions are present in the sample.
                    let x = if i == n - 1 { hi } else { lo + step * i as f64 };
                    vec![x]
                })
                .collect()
        }
        SampleMode::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| {
                    bounds
                        .lower()
                        .iter()
                        .zip(bounds.upper())
                        .map(|(lo, hi)| rng.random_range(*lo..*hi))
                        .collect()
                })
                .collect()
        }
    };

    let mut ys = Vec::with_capacity(n);
    for x in &xs {
        let y = eval_unchecked(fn_id, x);
        if !y.is_finite() {
            return Err(Error::domain(format!(
                "{fn_id} is not finite at {x:?}; choose a box inside its domain"
            )));
        }
        ys.push(y);
    }
    Dataset::new(xs, ys, bounds)
}

/// Write a dataset as CSV with header `x1[,x2],y`. Values are printed in
/// full-precision decimal notation (parsing them back is lossless).
pub fn write_dataset_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let header: Vec<String> = (1..=dataset.arity()).map(|i| format!("x{i}")).collect();
    writeln!(out, "{},y", header.join(","))?;
    for (x, y) in dataset.xs().iter().zip(dataset.ys()) {
        let row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{},{}", row.join(","), y)?;
    }
    out.flush()?;
    Ok(())
}

/// Read a dataset CSV written by [`write_dataset_csv`].
///
/// The file does not carry the sampling box, so the returned dataset's box is
/// the componentwise extent of the data.
pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    let file = File::open(path)?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(format!("{}: empty file", path.display())))?;
    let header = header?;
    let columns: Vec<&str> = header.trim().split(',').collect();
    let arity = columns.len().saturating_sub(1);
    let expected: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
    let ok = arity >= 1
        && columns.last() == Some(&"y")
        && columns[..arity].iter().zip(&expected).all(|(a, b)| a == b);
    if !ok {
        return Err(Error::format(format!(
            "{}:1: expected header `x1[,x2],y`, got `{header}`",
            path.display()
        )));
    }

    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields = parse_float_row(&line, arity + 1, path, lineno)?;
        xs.push(fields[..arity].to_vec());
        ys.push(fields[arity]);
    }
    if xs.len() < 2 {
        return Err(Error::usage(format!(
            "{}: a dataset needs at least 2 rows (got {})",
            path.display(),
            xs.len()
        )));
    }
    let bounds = extent_box(&xs, path)?;
    Dataset::new(xs, ys, bounds)
}

pub(crate) fn parse_float_row(
    line: &str,
    expected: usize,
    path: &Path,
    lineno: usize,
) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.trim().split(',').collect();
    if fields.len() != expected {
        return Err(Error::format(format!(
            "{}:{lineno}: expected {expected} fields, got {}",
            path.display(),
            fields.len()
        )));
    }
    fields
        .iter()
        .map(|f| {
            f.trim().parse::<f64>().map_err(|_| {
                Error::format(format!(
                    "{}:{lineno}: `{f}` is not a number",
                    path.display()
                ))
            })
        })
        .collect()
}

fn extent_box(xs: &[Vec<f64>], path: &Path) -> Result<DomainBox> {
    let arity = xs[0].len();
    let mut lower = xs[0].clone();
    let mut upper = xs[0].clone();
    for x in xs {
        for d in 0..arity {
            lower[d] = lower[d].min(x[d]);
            upper[d] = upper[d].max(x[d]);
        }
    }
    DomainBox::new(lower, upper).map_err(|_| {
        Error::format(format!(
            "{}: inputs are constant in some dimension; cannot infer a box",
            path.display()
        ))
    })
}
