//! Oppositeness schemes and opposition mining.
//!
//! A type-I opposite reflects an input inside its variable range. A type-II
//! (true) opposite is an input whose *output* is the opposite of the current
//! output; with only sampled data available, mining selects for every sample
//! the dataset point whose output is nearest to the opposite output value.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::benchfn::{parse_float_row, Dataset, DomainBox};
use crate::error::{Error, Result};

/// The three output-space oppositeness schemes.
///
/// * `T1` - range reflection `y_max + y_min - v`
/// * `T2` - modular shift `(v + (y_min + y_max)/2) mod y_max`
/// * `T3` - mean reflection `2*y_mean - v`
///
/// Whenever a `T2` or `T3` result leaves `[y_min, y_max]`, the `T1` value is
/// used instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OppositionScheme {
    T1,
    T2,
    T3,
}

impl OppositionScheme {
    pub const ALL: [OppositionScheme; 3] = [
        OppositionScheme::T1,
        OppositionScheme::T2,
        OppositionScheme::T3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OppositionScheme::T1 => "t1",
            OppositionScheme::T2 => "t2",
            OppositionScheme::T3 => "t3",
        }
    }

    pub fn parse(name: &str) -> Result<OppositionScheme> {
        match name.to_ascii_lowercase().as_str() {
            "t1" => Ok(OppositionScheme::T1),
            "t2" => Ok(OppositionScheme::T2),
            "t3" => Ok(OppositionScheme::T3),
            other => Err(Error::usage(format!(
                "unknown opposition scheme `{other}`; expected t1, t2 or t3"
            ))),
        }
    }
}

impl std::fmt::Display for OppositionScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Observed output-range statistics of a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputStats {
    pub y_min: f64,
    pub y_max: f64,
    pub y_mean: f64,
}

/// Min/max/mean of a dataset's outputs.
pub fn output_stats(dataset: &Dataset) -> OutputStats {
    output_stats_of(dataset.ys()).expect("datasets are nonempty")
}

/// Min/max/mean of a raw output sequence.
pub fn output_stats_of(ys: &[f64]) -> Result<OutputStats> {
    if ys.is_empty() {
        return Err(Error::usage(
            "cannot compute output statistics of an empty sequence".to_string(),
        ));
    }
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &y in ys {
        y_min = y_min.min(y);
        y_max = y_max.max(y);
        sum += y;
    }
    Ok(OutputStats {
        y_min,
        y_max,
        y_mean: sum / ys.len() as f64,
    })
}

/// Opposite of an output value `v` under `scheme`.
///
/// The result always lies in `[y_min, y_max]`: out-of-range `T2`/`T3` results
/// fall back to the `T1` value, and boundary rounding is clamped away.
pub fn opposite_value(v: f64, stats: &OutputStats, scheme: OppositionScheme) -> f64 {
    opposite_value_traced(v, stats, scheme).0
}

/// Like [`opposite_value`], additionally reporting whether the out-of-range
/// guard replaced the scheme's raw result with the `T1` value.
pub fn opposite_value_traced(
    v: f64,
    stats: &OutputStats,
    scheme: OppositionScheme,
) -> (f64, bool) {
    // Tolerate stats with swapped endpoint labels.
    let lo = stats.y_min.min(stats.y_max);
    let hi = stats.y_min.max(stats.y_max);
    let t1 = stats.y_max + stats.y_min - v;

    let (raw, fell_back) = match scheme {
        OppositionScheme::T1 => (t1, false),
        OppositionScheme::T2 => {
            if stats.y_max > 0.0 {
                // Floored modulo keeps the shifted value in [0, y_max).
                let m = (v + (stats.y_min + stats.y_max) / 2.0).rem_euclid(stats.y_max);
                if m >= lo && m <= hi {
                    (m, false)
                } else {
                    (t1, true)
                }
            } else {
                // Degenerate modulus.
                (t1, true)
            }
        }
        OppositionScheme::T3 => {
            let r = 2.0 * stats.y_mean - v;
            if r >= lo && r <= hi {
                (r, false)
            } else {
                (t1, true)
            }
        }
    };
    (raw.clamp(lo, hi), fell_back)
}

/// Type-I opposite of an input: componentwise `lower + upper - x`.
pub fn type1_opposite_input(x: &[f64], bounds: &DomainBox) -> Result<Vec<f64>> {
    if x.len() != bounds.arity() {
        return Err(Error::usage(format!(
            "point has {} component(s), box has {}",
            x.len(),
            bounds.arity()
        )));
    }
    if !bounds.contains(x) {
        return Err(Error::domain(format!("{x:?} lies outside the box")));
    }
    let mut opposite: Vec<f64> = x
        .iter()
        .zip(bounds.lower().iter().zip(bounds.upper()))
        .map(|(v, (lo, hi))| lo + hi - v)
        .collect();
    bounds.clamp(&mut opposite);
    Ok(opposite)
}

/// Index of the element of `ys` closest to `target`; ties break to the
/// smallest index.
pub fn nearest_index(ys: &[f64], target: f64) -> Result<usize> {
    if ys.is_empty() {
        return Err(Error::usage(
            "cannot search an empty sequence".to_string(),
        ));
    }
    let mut best = 0;
    let mut best_dist = (ys[0] - target).abs();
    for (i, &y) in ys.iter().enumerate().skip(1) {
        let dist = (y - target).abs();
        if dist < best_dist {
            best = i;
            best_dist = dist;
        }
    }
    Ok(best)
}

/// Paired training set produced by opposition mining, in input order.
///
/// For every input the mined opposite is one of the dataset's own points:
/// the one whose output is nearest to the target opposite output.
#[derive(Debug, Clone, PartialEq)]
pub struct MinedSet {
    /// The dataset inputs, in original order.
    pub inputs: Vec<Vec<f64>>,
    /// Output of each input (provenance).
    pub input_ys: Vec<f64>,
    /// Selected quasi-opposite input for each input.
    pub opposites: Vec<Vec<f64>>,
    /// Target opposite output each row aimed for.
    pub targets: Vec<f64>,
    /// Output actually achieved by the selected opposite.
    pub achieved: Vec<f64>,
    /// Whether the out-of-range guard fell back to the T1 value.
    pub fallbacks: Vec<bool>,
    pub scheme: OppositionScheme,
    pub stats: OutputStats,
}

impl MinedSet {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }
}

/// Mine (quasi-)opposite pairs from a dataset.
///
/// For each sample `i`: the target is `opposite_value(ys[i])` under `scheme`
/// using the dataset's own output statistics, and the opposite is the dataset
/// point whose output is nearest to that target.
pub fn mine(dataset: &Dataset, scheme: OppositionScheme) -> MinedSet {
    let stats = output_stats(dataset);
    let n = dataset.len();
    let ys = dataset.ys();

    let mut mined = MinedSet {
        inputs: Vec::with_capacity(n),
        input_ys: Vec::with_capacity(n),
        opposites: Vec::with_capacity(n),
        targets: Vec::with_capacity(n),
        achieved: Vec::with_capacity(n),
        fallbacks: Vec::with_capacity(n),
        scheme,
        stats,
    };
    for i in 0..n {
        let (target, fell_back) = opposite_value_traced(ys[i], &stats, scheme);
        let j = nearest_index(ys, target).expect("datasets are nonempty");
        mined.inputs.push(dataset.xs()[i].clone());
        mined.input_ys.push(ys[i]);
        mined.opposites.push(dataset.xs()[j].clone());
        mined.targets.push(target);
        mined.achieved.push(ys[j]);
        mined.fallbacks.push(fell_back);
    }
    mined
}

/// Write a mined set as CSV with header
/// `x1[,x2],ox1[,ox2],y,target_y,achieved_y,fallback`, rows in input order.
pub fn write_mined_csv(mined: &MinedSet, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let arity = mined.arity();
    let xcols: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
    let ocols: Vec<String> = (1..=arity).map(|i| format!("ox{i}")).collect();
    writeln!(
        out,
        "{},{},y,target_y,achieved_y,fallback",
        xcols.join(","),
        ocols.join(",")
    )?;
    for i in 0..mined.len() {
        let x: Vec<String> = mined.inputs[i].iter().map(|v| v.to_string()).collect();
        let o: Vec<String> = mined.opposites[i].iter().map(|v| v.to_string()).collect();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            x.join(","),
            o.join(","),
            mined.input_ys[i],
            mined.targets[i],
            mined.achieved[i],
            if mined.fallbacks[i] { 1 } else { 0 }
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Read a mined set CSV written by [`write_mined_csv`].
///
/// The file does not carry the scheme tag, so the caller supplies it; output
/// statistics are recomputed from the `y` column (mining keeps every dataset
/// row, so they match the source dataset's statistics).
pub fn read_mined_csv(path: &Path, scheme: OppositionScheme) -> Result<MinedSet> {
    let file = File::open(path)?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(format!("{}: empty file", path.display())))?;
    let header = header?;
    let arity = match header.trim() {
        "x1,ox1,y,target_y,achieved_y,fallback" => 1,
        "x1,x2,ox1,ox2,y,target_y,achieved_y,fallback" => 2,
        _ => {
            return Err(Error::format(format!(
                "{}:1: expected header `x1[,x2],ox1[,ox2],y,target_y,achieved_y,fallback`, got `{header}`",
                path.display()
            )))
        }
    };

    let mut inputs = Vec::new();
    let mut input_ys = Vec::new();
    let mut opposites = Vec::new();
    let mut targets = Vec::new();
    let mut achieved = Vec::new();
    let mut fallbacks = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields = parse_float_row(&line, 2 * arity + 4, path, lineno)?;
        inputs.push(fields[..arity].to_vec());
        opposites.push(fields[arity..2 * arity].to_vec());
        input_ys.push(fields[2 * arity]);
        targets.push(fields[2 * arity + 1]);
        achieved.push(fields[2 * arity + 2]);
        fallbacks.push(fields[2 * arity + 3] != 0.0);
    }
    if inputs.is_empty() {
        return Err(Error::usage(format!(
            "{}: mined set has no rows",
            path.display()
        )));
    }
    let stats = output_stats_of(&input_ys)?;
    Ok(MinedSet {
        inputs,
        input_ys,
        opposites,
        targets,
        achieved,
        fallbacks,
        scheme,
        stats,
    })
}
