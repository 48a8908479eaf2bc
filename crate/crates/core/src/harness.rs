//! Runs algorithms over generated or file inputs, compares them against an
//! optimum estimate, and aggregates the ratios.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::read_input;
use crate::generators::{
    adversary_deterministic, adversary_randomized, adversary_resaug, fixture_greedy_gap,
    gen_nearly_sorted, generate, pairing_schedule, segment_player, GenParams, NearlySortedSpec,
};
use crate::machine::{Direction, InputSource, Key, RunSequence, SliceSource};
use crate::nearly_sorted::ghost_randomized;
use crate::offline::{brute_force_opt, greedy_offline, ptas, PtasConfig, PtasVariant, DEFAULT_NODE_BUDGET};
use crate::online::{
    alternating_updown, alternating_with_capacity, greedy_4m_buffer, greedy_augmented,
    lookahead_3m, randomized_2m, replacement_selection_up, CoinPolicy,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    RsUp,
    Alternating,
    Greedy4m,
    Lookahead3m,
    Rand2m,
    GreedyOffline,
    PtasSimple,
    PtasFib,
    Ghost,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::RsUp,
        Algorithm::Alternating,
        Algorithm::Greedy4m,
        Algorithm::Lookahead3m,
        Algorithm::Rand2m,
        Algorithm::GreedyOffline,
        Algorithm::PtasSimple,
        Algorithm::PtasFib,
        Algorithm::Ghost,
        Algorithm::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RsUp => "rs_up",
            Algorithm::Alternating => "alternating",
            Algorithm::Greedy4m => "greedy4m",
            Algorithm::Lookahead3m => "lookahead3m",
            Algorithm::Rand2m => "rand2m",
            Algorithm::GreedyOffline => "greedy_offline",
            Algorithm::PtasSimple => "ptas_simple",
            Algorithm::PtasFib => "ptas_fib",
            Algorithm::Ghost => "ghost",
            Algorithm::Oracle => "oracle",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::Rand2m | Algorithm::Ghost)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Bruteforce,
    Ptas,
    Construction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleSpec {
    Bruteforce,
    /// Epsilon as `"a/b"` or a decimal.
    Ptas(String),
    Construction,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputSpec {
    Generator(GenParams),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub input: InputSpec,
    pub m: usize,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub seed_base: u64,
    /// Fixes the generated input across trials; otherwise each trial's seed
    /// also seeds its input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_seed: Option<u64>,
    /// Epsilon for the PTAS algorithms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    #[serde(default = "no_oracle")]
    pub oracle: OracleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<u64>,
}

fn one() -> usize {
    1
}

fn no_oracle() -> OracleSpec {
    OracleSpec::None
}

impl ExperimentSpec {
    pub fn new(algorithm: Algorithm, input: InputSpec, m: usize) -> Self {
        Self {
            algorithm,
            input,
            m,
            trials: 1,
            seed_base: 0,
            input_seed: None,
            eps: None,
            oracle: OracleSpec::None,
            node_budget: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::ZeroCapacity);
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if let InputSpec::Generator(g) = &self.input {
            let known = crate::generators::FIXED_GENERATORS
                .iter()
                .chain(crate::generators::ADAPTIVE_GENERATORS)
                .any(|n| *n == g.name);
            if !known {
                return Err(Error::UnknownGenerator(g.name.clone()));
            }
        }
        Ok(())
    }

    fn budget(&self) -> u64 {
        self.node_budget.unwrap_or(DEFAULT_NODE_BUDGET)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub algorithm: Algorithm,
    pub m: usize,
    pub seed: u64,
    pub input_seed: u64,
    pub run_count: usize,
    pub run_lengths: Vec<usize>,
    pub mean_run_length: f64,
    pub opt: Option<usize>,
    pub provenance: Option<Provenance>,
    pub ratio: Option<f64>,
    /// The nearly-sorted algorithm fell back on a run-length comparison.
    pub ambiguous: bool,
    /// The oracle ran out of budget; `opt` is then absent.
    pub incomparable: bool,
    pub input_len: usize,
    pub duration_ms: Option<f64>,
    /// Input produced by an adaptive adversary, for replay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realized_input: Option<Vec<Key>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Record wall-clock durations. Off by default so records are
    /// reproducible.
    pub timing: bool,
}

struct Played {
    output: RunSequence,
    ambiguous: bool,
    input: Vec<Key>,
    construction_opt: Option<usize>,
}

fn ptas_config(spec: &ExperimentSpec, variant: PtasVariant) -> Result<PtasConfig> {
    let eps = spec
        .eps
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("PTAS algorithms need `eps`".into()))?;
    PtasConfig::from_eps(eps, variant)
}

fn play_online(
    alg: Algorithm,
    source: &mut dyn InputSource,
    m: usize,
    seed: u64,
) -> Result<(RunSequence, bool)> {
    Ok(match alg {
        Algorithm::RsUp => (replacement_selection_up(source, m)?, false),
        Algorithm::Alternating => (alternating_updown(source, m, Direction::Up)?, false),
        Algorithm::Greedy4m => (greedy_4m_buffer(source, m)?, false),
        Algorithm::Lookahead3m => (lookahead_3m(source, m)?, false),
        Algorithm::Rand2m => (randomized_2m(source, m, CoinPolicy::Seeded(seed))?.0, false),
        Algorithm::Ghost => {
            let g = ghost_randomized(source, m, CoinPolicy::Seeded(seed))?;
            (g.output, g.ambiguous)
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "`{alg}` is offline and cannot read from a stream"
            )))
        }
    })
}

/// Runs the spec's algorithm once on a fixed input. The flag reports an
/// ambiguous nearly-sorted decision.
pub fn play_input(spec: &ExperimentSpec, input: &[Key], seed: u64) -> Result<(RunSequence, bool)> {
    let m = spec.m;
    match spec.algorithm {
        Algorithm::GreedyOffline => Ok((greedy_offline(input, m)?, false)),
        Algorithm::PtasSimple => Ok((ptas(input, m, ptas_config(spec, PtasVariant::Simple)?)?.0, false)),
        Algorithm::PtasFib => Ok((ptas(input, m, ptas_config(spec, PtasVariant::Fibonacci)?)?.0, false)),
        Algorithm::Oracle => {
            let opt = brute_force_opt(input, m, spec.budget())?;
            Ok((crate::machine::replay(input, m, &opt.witness)?, false))
        }
        alg => play_online(alg, &mut SliceSource::new(input), m, seed),
    }
}

fn required(v: Option<usize>, name: &str, gen: &str) -> Result<usize> {
    v.ok_or_else(|| Error::InvalidParameter(format!("generator `{gen}` needs `{name}`")))
}

fn play(spec: &ExperimentSpec, seed: u64, input_seed: u64) -> Result<Played> {
    let m = spec.m;
    let gen = match &spec.input {
        InputSpec::File(path) => {
            let input = read_input(path)?;
            let (output, ambiguous) = play_input(spec, &input, seed)?;
            return Ok(Played {
                output,
                ambiguous,
                input,
                construction_opt: None,
            });
        }
        InputSpec::Generator(g) => g,
    };
    let name = gen.name.as_str();
    match name {
        "det_adversary" => {
            let t = required(gen.t, "t", name)?;
            let out = adversary_deterministic(m, t, |s| {
                play_online(spec.algorithm, s, m, seed).map(|p| p.0)
            })?;
            let opt = pairing_schedule(&out.input, m)?.cost();
            Ok(Played {
                output: out.output,
                ambiguous: false,
                input: out.input,
                construction_opt: Some(opt),
            })
        }
        "resaug_adversary" => {
            let capacity = 4 * m - 3;
            let out = adversary_resaug(m, |s| match spec.algorithm {
                Algorithm::Greedy4m => greedy_augmented(s, m, capacity),
                Algorithm::Alternating => alternating_with_capacity(s, m, capacity, Direction::Up),
                alg => Err(Error::InvalidParameter(format!(
                    "`{alg}` has no augmented-buffer form for `resaug_adversary`"
                ))),
            })?;
            Ok(Played {
                output: out.output,
                ambiguous: false,
                input: out.input,
                construction_opt: Some(out.claimed_opt),
            })
        }
        _ => {
            let (input, construction_opt) = match name {
                "rand_adversary" => {
                    let adv = adversary_randomized(m, required(gen.t, "t", name)?, input_seed)?;
                    let opt = segment_player(&adv)?.cost();
                    (adv.input, Some(opt))
                }
                "greedy_gap" => {
                    let c = gen.c.unwrap_or(1.0) as usize;
                    (fixture_greedy_gap(gen.m.unwrap_or(m), c)?, Some(2 * c))
                }
                "nearly_sorted" => {
                    let (input, cert) = gen_nearly_sorted(NearlySortedSpec {
                        m: gen.m.unwrap_or(m),
                        c: gen.c.unwrap_or(3.0),
                        runs: required(gen.runs, "runs", name)?,
                        max_displacement: gen.displacement.unwrap_or(0),
                        seed: input_seed,
                    })?;
                    let opt = cert.witness_run_lengths.len();
                    (input, Some(opt))
                }
                "sorted" | "reversed" => {
                    let input = generate(gen, Some(m), input_seed)?;
                    let opt = usize::from(!input.is_empty());
                    (input, Some(opt))
                }
                _ => (generate(gen, Some(m), input_seed)?, None),
            };
            let (output, ambiguous) = play_input(spec, &input, seed)?;
            Ok(Played {
                output,
                ambiguous,
                input,
                construction_opt,
            })
        }
    }
}

fn adaptive(spec: &ExperimentSpec) -> bool {
    matches!(&spec.input, InputSpec::Generator(g)
        if crate::generators::ADAPTIVE_GENERATORS.contains(&g.name.as_str()))
}

fn run_trial(spec: &ExperimentSpec, seed: u64, opts: RunOptions) -> Result<ExperimentRecord> {
    let input_seed = spec.input_seed.unwrap_or(seed);
    let start = Instant::now();
    let played = play(spec, seed, input_seed)?;
    let elapsed = start.elapsed();
    let run_count = played.output.cost();
    let (opt, provenance, incomparable) = match &spec.oracle {
        OracleSpec::None => (None, None, false),
        OracleSpec::Bruteforce => match brute_force_opt(&played.input, spec.m, spec.budget()) {
            Ok(r) => (Some(r.opt_runs), Some(Provenance::Bruteforce), false),
            Err(Error::BudgetExceeded { .. }) => (None, Some(Provenance::Bruteforce), true),
            Err(e) => return Err(e),
        },
        OracleSpec::Ptas(eps) => {
            let cfg = PtasConfig::from_eps(eps, PtasVariant::Fibonacci)?;
            let (out, _) = ptas(&played.input, spec.m, cfg)?;
            (Some(out.cost()), Some(Provenance::Ptas), false)
        }
        OracleSpec::Construction => {
            let opt = played.construction_opt.ok_or_else(|| {
                Error::InvalidParameter("this input has no constructed optimum".into())
            })?;
            (Some(opt), Some(Provenance::Construction), false)
        }
    };
    let total = played.output.total_len();
    Ok(ExperimentRecord {
        algorithm: spec.algorithm,
        m: spec.m,
        seed,
        input_seed,
        run_count,
        run_lengths: played.output.lengths(),
        mean_run_length: if run_count == 0 { 0.0 } else { total as f64 / run_count as f64 },
        ratio: opt.filter(|&o| o > 0).map(|o| run_count as f64 / o as f64),
        opt,
        provenance,
        ambiguous: played.ambiguous,
        incomparable,
        input_len: played.input.len(),
        duration_ms: opts.timing.then(|| elapsed.as_secs_f64() * 1000.0),
        realized_input: adaptive(spec).then_some(played.input),
    })
}

/// Thread count from `RUNSMITH_THREADS`, if set.
pub fn configured_threads() -> Result<Option<usize>> {
    match std::env::var("RUNSMITH_THREADS") {
        Ok(v) => v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Error::InvalidParameter(format!("RUNSMITH_THREADS={v} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

/// Runs trials with seeds `seed_base..seed_base+trials`; records come back
/// in seed order whatever the scheduling.
pub fn run_experiment(spec: &ExperimentSpec, opts: RunOptions) -> Result<Vec<ExperimentRecord>> {
    spec.validate()?;
    let seeds: Vec<u64> = (0..spec.trials as u64)
        .map(|i| spec.seed_base.wrapping_add(i))
        .collect();
    let go = || {
        seeds
            .par_iter()
            .map(|&s| run_trial(spec, s, opts))
            .collect::<Result<Vec<_>>>()
    };
    match configured_threads()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(go),
        None => go(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitiveSummary {
    pub provenance: Provenance,
    pub records: usize,
    pub max_ratio: f64,
    /// Mean over all records.
    pub mean_ratio: f64,
    /// Largest per-input mean; inputs are told apart by their input seed.
    pub worst_input_mean: f64,
    pub histogram: Vec<HistogramBin>,
}

pub const HISTOGRAM_WIDTH: f64 = 0.125;

pub fn competitive_summary(records: &[ExperimentRecord]) -> Result<CompetitiveSummary> {
    let rated: Vec<&ExperimentRecord> = records.iter().filter(|r| r.ratio.is_some()).collect();
    let provenance = rated
        .first()
        .and_then(|r| r.provenance)
        .ok_or_else(|| Error::InvalidParameter("no records carry a ratio".into()))?;
    if records.iter().any(|r| r.provenance.is_some_and(|p| p != provenance)) {
        return Err(Error::MixedProvenance);
    }
    let ratios: Vec<f64> = rated.iter().map(|r| r.ratio.expect("filtered")).collect();
    let mut per_input: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for r in &rated {
        let e = per_input.entry(r.input_seed).or_default();
        e.0 += r.ratio.expect("filtered");
        e.1 += 1;
    }
    let mut histogram: BTreeMap<i64, usize> = BTreeMap::new();
    for &x in &ratios {
        *histogram.entry((x / HISTOGRAM_WIDTH).floor() as i64).or_default() += 1;
    }
    Ok(CompetitiveSummary {
        provenance,
        records: ratios.len(),
        max_ratio: ratios.iter().copied().fold(f64::MIN, f64::max),
        mean_ratio: ratios.iter().sum::<f64>() / ratios.len() as f64,
        worst_input_mean: per_input
            .values()
            .map(|&(s, n)| s / n as f64)
            .fold(f64::MIN, f64::max),
        histogram: histogram
            .into_iter()
            .map(|(b, count)| HistogramBin {
                lower: b as f64 * HISTOGRAM_WIDTH,
                upper: (b + 1) as f64 * HISTOGRAM_WIDTH,
                count,
            })
            .collect(),
    })
}

/// Mean plus three standard errors: the slack allowed when comparing a
/// sample mean against an exact expectation.
pub fn mean_with_slack(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = if samples.len() > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, 3.0 * var.sqrt() / n.sqrt())
}
