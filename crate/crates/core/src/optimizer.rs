//! Opposition-guided random search on the 2-D test functions.
//!
//! Each iteration draws a random guess; a strategy may additionally evaluate
//! the guess's opposite (type-I reflection or the learned type-II model) and
//! keeps whichever has the smaller error. All strategies replay the same
//! seeded guess stream, so opposite-using strategies can never do worse than
//! random guessing on the same seed.

use serde::Serialize;

use crate::benchfn::{eval, FunctionId};
use crate::error::{Error, Result};
use crate::evaluation::{summarize, ErrorSummary};
use crate::opposition::type1_opposite_input;
use crate::regressor::{predict, RegressorModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How a search iteration turns a random guess into a candidate.
#[derive(Debug, Clone, Copy)]
pub enum Strategy<'a> {
    /// Keep the random guess.
    RandomOnly,
    /// Also try the type-I reflection of the guess.
    TypeI,
    /// Also try the learned type-II opposite of the guess.
    TypeII(&'a RegressorModel),
}

impl Strategy<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::RandomOnly => "random",
            Strategy::TypeI => "type1",
            Strategy::TypeII(_) => "type2_ann",
        }
    }
}

/// Per-iteration errors of one run, with their summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub per_iteration_errors: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub run_index: usize,
    pub seed: u64,
}

/// Execute one run of `n_iters` iterations.
///
/// The error of a point is its function value (the registered minima are 0).
/// The guess stream depends only on `seed`, never on the strategy.
pub fn run(fn_id: FunctionId, strategy: Strategy, n_iters: usize, seed: u64) -> Result<RunStats> {
    if fn_id.arity() != 2 {
        return Err(Error::usage(format!(
            "the search experiment runs on 2-D functions; {fn_id} has arity {}",
            fn_id.arity()
        )));
    }
    if n_iters == 0 {
        return Err(Error::usage("need at least one iteration".to_string()));
    }
    if let Strategy::TypeII(model) = strategy {
        if model.arch.input_dim != 2 {
            return Err(Error::usage(format!(
                "model has arity {}, function needs 2",
                model.arch.input_dim
            )));
        }
    }

    let bounds = fn_id.default_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = Vec::with_capacity(n_iters);
    for _ in 0..n_iters {
        let guess: Vec<f64> = bounds
            .lower()
            .iter()
            .zip(bounds.upper())
            .map(|(lo, hi)| rng.random_range(*lo..*hi))
            .collect();
        let e_rand = eval(fn_id, &guess)?;
        let e = match strategy {
            Strategy::RandomOnly => e_rand,
            Strategy::TypeI => {
                let opposite = type1_opposite_input(&guess, &bounds)?;
                e_rand.min(eval(fn_id, &opposite)?)
            }
            Strategy::TypeII(model) => {
                let opposite = predict(model, &guess)?;
                e_rand.min(eval(fn_id, &opposite)?)
            }
        };
        errors.push(e);
    }
    let ErrorSummary { mean, std, .. } = summarize(&errors)?;
    Ok(RunStats {
        per_iteration_errors: errors,
        mean,
        std,
        run_index: 0,
        seed,
    })
}

/// One comparison row: the three strategies on a shared guess stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub run_index: usize,
    pub seed: u64,
    pub random: ErrorSummary,
    pub type2_ann: ErrorSummary,
    pub type1: ErrorSummary,
}

/// Multi-run comparison of random guessing, learned type-II opposites, and
/// type-I reflection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub function: String,
    pub n_samples: usize,
    pub n_iters: usize,
    pub n_runs: usize,
    pub master_seed: u64,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    /// Grand mean of the per-iteration errors of one strategy column.
    pub fn overall_mean(&self, pick: impl Fn(&CompareRow) -> &ErrorSummary) -> f64 {
        let total: f64 = self.rows.iter().map(|r| pick(r).mean).sum();
        total / self.rows.len() as f64
    }
}

pub(crate) fn derive_seed(master: u64, index: u64) -> u64 {
    // splitmix64 of a golden-ratio-spaced stream.
    let mut z = master.wrapping_add(index.wrapping_mul(0x9E3779B97F4A7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Run all three strategies for `n_runs` runs of `n_samples / 10` iterations
/// each, on distinct derived seeds.
pub fn compare(
    fn_id: FunctionId,
    model: &RegressorModel,
    n_samples: usize,
    n_runs: usize,
    master_seed: u64,
) -> Result<CompareReport> {
    if n_runs == 0 {
        return Err(Error::usage("need at least one run".to_string()));
    }
    let n_iters = (n_samples / 10).max(1);
    let mut rows = Vec::with_capacity(n_runs);
    for r in 0..n_runs {
        let seed = derive_seed(master_seed, r as u64);
        let random = run(fn_id, Strategy::RandomOnly, n_iters, seed)?;
        let type2 = run(fn_id, Strategy::TypeII(model), n_iters, seed)?;
        let type1 = run(fn_id, Strategy::TypeI, n_iters, seed)?;
        let summary = |s: &RunStats| ErrorSummary {
            mean: s.mean,
            std: s.std,
            n: s.per_iteration_errors.len(),
        };
        rows.push(CompareRow {
            run_index: r,
            seed,
            random: summary(&random),
            type2_ann: summary(&type2),
            type1: summary(&type1),
        });
    }
    Ok(CompareReport {
        function: fn_id.name().to_string(),
        n_samples,
        n_iters,
        n_runs,
        master_seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchfn::{sample, SampleMode};
    use crate::opposition::{mine, OppositionScheme};
    use crate::regressor::{init, train, Architecture, TrainConfig};

    fn trained_model(fn_id: FunctionId, seed: u64) -> RegressorModel {
        let d = sample(fn_id, 300, SampleMode::Uniform, seed).unwrap();
        let m = mine(&d, OppositionScheme::T1);
        let arch = Architecture::for_arity(2, 16).unwrap();
        let mut model = init(&arch, seed).unwrap();
        let cfg = TrainConfig {
            epochs: 300,
            seed,
            ..TrainConfig::default()
        };
        train(&mut model, &m, &cfg).unwrap();
        model
    }

    #[test]
    fn opposite_strategies_dominate_random_guessing_per_iteration() {
        let model = trained_model(FunctionId::Bulkin, 3);
        let random = run(FunctionId::Bulkin, Strategy::RandomOnly, 200, 17).unwrap();
        let type1 = run(FunctionId::Bulkin, Strategy::TypeI, 200, 17).unwrap();
        let type2 = run(FunctionId::Bulkin, Strategy::TypeII(&model), 200, 17).unwrap();
        for t in 0..200 {
            assert!(type1.per_iteration_errors[t] <= random.per_iteration_errors[t]);
            assert!(type2.per_iteration_errors[t] <= random.per_iteration_errors[t]);
        }
        assert!(type1.mean <= random.mean);
        assert!(type2.mean <= random.mean);
    }

    #[test]
    fn recorded_errors_are_the_pairwise_minima() {
        // Replay the guess stream independently and recompute what each
        // iteration should have recorded.
        let n = 50;
        let seed = 23;
        let stats = run(FunctionId::Booth, Strategy::TypeI, n, seed).unwrap();
        let bounds = FunctionId::Booth.default_box();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in 0..n {
            let guess: Vec<f64> = bounds
                .lower()
                .iter()
                .zip(bounds.upper())
                .map(|(lo, hi)| rng.random_range(*lo..*hi))
                .collect();
            let e_rand = eval(FunctionId::Booth, &guess).unwrap();
            let reflected = type1_opposite_input(&guess, &bounds).unwrap();
            let expected = e_rand.min(eval(FunctionId::Booth, &reflected).unwrap());
            assert_eq!(stats.per_iteration_errors[t], expected, "iteration {t}");
        }
    }

    #[test]
    fn errors_are_nonnegative_function_values() {
        let stats = run(FunctionId::Booth, Strategy::RandomOnly, 500, 5).unwrap();
        assert!(stats.per_iteration_errors.iter().all(|&e| e >= 0.0));
        // Consistency of the recorded summary with the raw sequence.
        let s = summarize(&stats.per_iteration_errors).unwrap();
        assert_eq!((s.mean, s.std), (stats.mean, stats.std));
    }

    #[test]
    fn random_bulkin_errors_have_the_expected_magnitude() {
        // The error of a guess is its function value; on this box the mean
        // sits around a hundred.
        let mut means = Vec::new();
        for seed in 0..5 {
            let stats = run(FunctionId::Bulkin, Strategy::RandomOnly, 100, seed).unwrap();
            means.push(stats.mean);
        }
        let overall = means.iter().sum::<f64>() / means.len() as f64;
        assert!(
            (30.0..400.0).contains(&overall),
            "mean error {overall} is out of scale"
        );
    }

    #[test]
    fn one_dimensional_functions_are_rejected() {
        let err = run(FunctionId::Square, Strategy::RandomOnly, 10, 0).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn arity_mismatched_models_are_rejected() {
        let arch = Architecture::for_arity(1, 4).unwrap();
        let model = init(&arch, 0).unwrap();
        let err = run(FunctionId::Booth, Strategy::TypeII(&model), 10, 0).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn compare_produces_the_requested_table_shape() {
        let model = trained_model(FunctionId::Booth, 1);
        let report = compare(FunctionId::Booth, &model, 1000, 5, 42).unwrap();
        assert_eq!(report.rows.len(), 5);
        assert_eq!(report.n_iters, 100);
        for row in &report.rows {
            assert_eq!(row.random.n, 100);
            assert!(row.type1.mean <= row.random.mean);
            assert!(row.type2_ann.mean <= row.random.mean);
        }
        let single = compare(FunctionId::Booth, &model, 1000, 1, 42).unwrap();
        assert_eq!(single.rows.len(), 1);
    }

    #[test]
    fn compare_is_deterministic() {
        let model = trained_model(FunctionId::Ackley, 2);
        let a = compare(FunctionId::Ackley, &model, 500, 3, 9).unwrap();
        let b = compare(FunctionId::Ackley, &model, 500, 3, 9).unwrap();
        assert_eq!(a, b);
    }
}
