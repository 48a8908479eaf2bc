//! Input constructions: arithmetic ranges, fixed fixtures, lower-bound
//! adversaries, random permutations and nearly-sorted instances.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{
    replay, BufferMachine, Direction, InputSource, Key, RunSequence, SliceSource, WriteLog,
};
use crate::offline::brute_force_opt;

/// `(from ↗ to)`: `from, from+1, ..., to`.
pub fn up(from: Key, to: Key) -> Result<Vec<Key>> {
    if from > to {
        return Err(Error::InvalidRange {
            kind: "increasing range",
            from,
            to,
        });
    }
    Ok((from..=to).collect())
}

/// `(from ↘ to)`: `from, from-1, ..., to`.
pub fn down(from: Key, to: Key) -> Result<Vec<Key>> {
    if from < to {
        return Err(Error::InvalidRange {
            kind: "decreasing range",
            from,
            to,
        });
    }
    Ok((to..=from).rev().collect())
}

/// `seq ⊕ x`: adds `x` to every element.
pub fn shift(seq: &[Key], x: Key) -> Result<Vec<Key>> {
    seq.iter()
        .map(|&k| k.checked_add(x).ok_or(Error::ArithmeticOverflow))
        .collect()
}

/// `seq ⊗ x`: multiplies every element by `x`.
pub fn scale(seq: &[Key], x: Key) -> Result<Vec<Key>> {
    seq.iter()
        .map(|&k| k.checked_mul(x).ok_or(Error::ArithmeticOverflow))
        .collect()
}

pub fn concat<I: IntoIterator<Item = Vec<Key>>>(parts: I) -> Vec<Key> {
    parts.into_iter().flatten().collect()
}

fn key(v: usize) -> Result<Key> {
    Key::try_from(v).map_err(|_| Error::ArithmeticOverflow)
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

/// Blocks on which offline greedy writes three runs each while writing only
/// down runs needs two. Block `k` is the base block shifted by `10km`.
pub fn fixture_greedy_gap(m: usize, c: usize) -> Result<Vec<Key>> {
    require(m >= 4, || format!("greedy-gap fixture needs m >= 4, got {m}"))?;
    let mk = key(m)?;
    let base = concat([
        up(4 * mk + 4, 5 * mk + 3)?,
        vec![mk + 2],
        up(5 * mk + 4, 6 * mk + 3)?,
        up(2 * mk + 1, 3 * mk - 1)?,
        down(4 * mk + 3, 3 * mk + 4)?,
        down(2 * mk, mk + 3)?,
        down(mk + 1, 1)?,
    ]);
    let mut out = Vec::with_capacity(base.len() * c);
    for k in 0..c {
        let offset = key(k)?
            .checked_mul(10)
            .and_then(|v| v.checked_mul(mk))
            .ok_or(Error::ArithmeticOverflow)?;
        out.extend(shift(&base, offset)?);
    }
    Ok(out)
}

/// Input whose maximal up run has length exactly `3m` and whose maximal
/// down run has length `3m - 1`.
pub fn fixture_3m_tight(m: usize) -> Result<Vec<Key>> {
    require(m >= 2, || format!("tight fixture needs m >= 2, got {m}"))?;
    let mk = key(m)?;
    let sq = mk.checked_mul(mk).ok_or(Error::ArithmeticOverflow)?;
    Ok(concat([
        scale(&up(1, mk - 1)?, mk)?,
        down(sq, sq - mk + 1)?,
        down(mk - 1, 1)?,
        up(sq + 2, sq + mk + 1)?,
    ]))
}

/// `(8m ↘ 1) ∘ (16m ↘ 8m+1) ∘ ... ∘ (8cm ↘ 8(c-1)m+1)`.
pub fn fixture_chunked_reverse(m: usize, c: usize) -> Result<Vec<Key>> {
    require(m >= 1, || "chunked fixture needs m >= 1".into())?;
    let chunk = key(m)?.checked_mul(8).ok_or(Error::ArithmeticOverflow)?;
    let mut out = Vec::new();
    for j in 0..key(c)? {
        let lo = j.checked_mul(chunk).ok_or(Error::ArithmeticOverflow)? + 1;
        out.extend(down(lo + chunk - 1, lo)?);
    }
    Ok(out)
}

/// Uniform shuffle of `1..=n`.
pub fn gen_random_permutation(n: usize, seed: u64) -> Vec<Key> {
    let mut v: Vec<Key> = (1..=n as Key).collect();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// The run direction that writes a segment of this sign in one go.
    pub fn natural(self) -> Direction {
        match self {
            Sign::Positive => Direction::Up,
            Sign::Negative => Direction::Down,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentChoice {
    /// Zero-based segment index; segment 0 is the fixed `1..=m` prefix.
    pub index: usize,
    pub sign: Sign,
}

fn check_pace(log: &WriteLog, pulled: usize, capacity: usize) -> Result<()> {
    let need = (pulled + 1).saturating_sub(capacity);
    if log.len() < need {
        return Err(Error::Protocol(format!(
            "element {pulled} requested after only {} writes; a {capacity}-slot buffer needs {need}",
            log.len()
        )));
    }
    Ok(())
}

/// Adaptive adversary against deterministic `m`-buffer algorithms.
///
/// Emits `1..=m`, then segments of `m` keys that are either the next block
/// of positive keys in increasing order or the next block of negative keys
/// in decreasing order. Each sign is chosen when the segment's first key is
/// requested: against a down run the segment is positive, against an up
/// run negative. If the current run has a single element so far, the
/// segment is negative exactly when that element was the buffer minimum.
pub struct DeterministicAdversary {
    m: usize,
    segments: usize,
    emitted: Vec<Key>,
    choices: Vec<SegmentChoice>,
    sign: Sign,
}

impl DeterministicAdversary {
    pub fn new(m: usize, segments: usize) -> Result<Self> {
        require(m >= 1, || "adversary needs m >= 1".into())?;
        Ok(Self {
            m,
            segments,
            emitted: Vec::new(),
            choices: Vec::new(),
            sign: Sign::Positive,
        })
    }

    pub fn emitted(&self) -> &[Key] {
        &self.emitted
    }

    pub fn transcript(&self) -> &[SegmentChoice] {
        &self.choices
    }

    fn choose(&self, log: &WriteLog) -> Result<Sign> {
        let (dir, run) = log
            .current_run()
            .ok_or_else(|| Error::Protocol("no run started before the first decision".into()))?;
        match run {
            [] => Err(Error::Protocol("decision point inside an empty run".into())),
            [e] => {
                let written: HashSet<Key> = log.written().iter().copied().collect();
                let smallest = self
                    .emitted
                    .iter()
                    .filter(|k| !written.contains(k))
                    .all(|&k| *e < k);
                Ok(if smallest { Sign::Negative } else { Sign::Positive })
            }
            _ => Ok(match dir {
                Direction::Down => Sign::Positive,
                Direction::Up => Sign::Negative,
            }),
        }
    }
}

impl InputSource for DeterministicAdversary {
    fn pull(&mut self, log: &WriteLog) -> Result<Option<Key>> {
        let i = self.emitted.len();
        if i >= self.m * self.segments {
            return Ok(None);
        }
        check_pace(log, i, self.m)?;
        let (seg, off) = (i / self.m, i % self.m);
        if seg > 0 && off == 0 {
            self.sign = self.choose(log)?;
            self.choices.push(SegmentChoice {
                index: seg,
                sign: self.sign,
            });
        }
        let magnitude = key(i + 1)?;
        let k = if seg == 0 || self.sign == Sign::Positive {
            magnitude
        } else {
            -magnitude
        };
        self.emitted.push(k);
        Ok(Some(k))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryOutcome {
    pub input: Vec<Key>,
    pub transcript: Vec<SegmentChoice>,
    pub output: RunSequence,
}

/// Runs `play` against a [`DeterministicAdversary`] with `segments` segments.
pub fn adversary_deterministic<F>(m: usize, segments: usize, play: F) -> Result<AdversaryOutcome>
where
    F: FnOnce(&mut dyn InputSource) -> Result<RunSequence>,
{
    let mut adv = DeterministicAdversary::new(m, segments)?;
    let output = play(&mut adv)?;
    Ok(AdversaryOutcome {
        input: adv.emitted,
        transcript: adv.choices,
        output,
    })
}

/// Plays `input` with an `m` buffer, choosing each run's direction from the
/// earliest segment still buffered.
fn segment_schedule<S, D>(input: &[Key], m: usize, segment_of: S, decide: D) -> Result<RunSequence>
where
    S: Fn(Key) -> usize,
    D: Fn(usize) -> Direction,
{
    let mut src = SliceSource::new(input);
    let mut machine = BufferMachine::new(m, &mut src)?;
    let mut runs = Vec::new();
    while machine.has_unwritten()? {
        let earliest = machine
            .contents()
            .into_iter()
            .map(&segment_of)
            .min()
            .expect("buffer is nonempty");
        runs.push(machine.write_maximal_run(decide(earliest))?);
    }
    Ok(RunSequence::new(m, runs))
}

/// Offline schedule for a deterministic-adversary input that writes
/// segments in consecutive pairs: the run direction follows the sign of the
/// second segment of the pair.
pub fn pairing_schedule(input: &[Key], m: usize) -> Result<RunSequence> {
    require(m >= 1, || "pairing schedule needs m >= 1".into())?;
    let segment_of = |k: Key| ((k.unsigned_abs() - 1) / m as u64) as usize;
    let segments = input.len().div_ceil(m);
    let mut signs = vec![Sign::Positive; segments];
    for &k in input {
        if k < 0 {
            signs[segment_of(k)] = Sign::Negative;
        }
    }
    segment_schedule(input, m, segment_of, |s| match signs.get(s + 1) {
        Some(next) => next.natural(),
        None => signs[s].natural(),
    })
}

/// Randomized lower-bound input: `t` segments of `4m` keys with fair-coin
/// signs, perturbed to be duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomizedAdversary {
    pub m: usize,
    pub input: Vec<Key>,
    pub signs: Vec<Sign>,
    /// Multiplier applied before adding the 1-based segment index.
    pub factor: Key,
}

impl RandomizedAdversary {
    /// 1-based segment index of a key.
    pub fn segment_of(&self, k: Key) -> usize {
        ((k - 1).rem_euclid(self.factor) + 1) as usize
    }
}

pub fn adversary_randomized(m: usize, t: usize, seed: u64) -> Result<RandomizedAdversary> {
    require(m >= 2, || format!("randomized adversary needs m >= 2, got {m}"))?;
    let mk = key(m)?;
    let n = 4usize
        .checked_mul(m)
        .and_then(|v| v.checked_mul(t))
        .ok_or(Error::ArithmeticOverflow)?;
    let factor = key((n / (4 * m)).max(1))?;
    let positive = concat([
        up(1, mk)?,
        down(2 * mk, mk + 1)?,
        down(3 * mk, 2 * mk + 1)?,
        down(4 * mk, 3 * mk + 1)?,
    ]);
    let negative = concat([
        up(1, mk)?,
        up(-2 * mk, -mk - 1)?,
        up(-3 * mk, -2 * mk - 1)?,
        up(-4 * mk, -3 * mk - 1)?,
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut input = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(t);
    for idx in 1..=t {
        let sign = if rng.next_u64() & 1 == 0 {
            Sign::Positive
        } else {
            Sign::Negative
        };
        let seg = if sign == Sign::Positive { &positive } else { &negative };
        input.extend(shift(&scale(seg, factor)?, key(idx)?)?);
        signs.push(sign);
    }
    Ok(RandomizedAdversary {
        m,
        input,
        signs,
        factor,
    })
}

/// One run per segment: up for positive segments, down for negative ones.
pub fn segment_player(adv: &RandomizedAdversary) -> Result<RunSequence> {
    segment_schedule(&adv.input, adv.m, |k| adv.segment_of(k), |s| adv.signs[s - 1].natural())
}

/// Which branch of the resource-augmentation construction was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResAugCase {
    /// Started at the low end and kept going down.
    LowContinued,
    /// Started at the low end and turned up.
    LowTurned,
    /// Started at the high end and kept going up.
    HighContinued,
    /// Started at the high end and turned down.
    HighTurned,
    /// Started anywhere else.
    Elsewhere,
}

impl ResAugCase {
    /// Optimum the construction claims. Proper algorithms only reach the
    /// turned branches, where this is the m-buffer optimum; the one-run
    /// schedules of the other branches need more than an m buffer.
    pub fn claimed_opt(self) -> usize {
        match self {
            ResAugCase::LowTurned | ResAugCase::HighTurned => 2,
            _ => 1,
        }
    }
}

/// Adversary against algorithms with a `4m - 3` buffer. The whole prefix
/// fits in the buffer, so the algorithm's first two writes are made before
/// the adversary commits to the rest of the input.
pub struct ResAugAdversary {
    m: usize,
    emitted: Vec<Key>,
    plan: Vec<Key>,
    case: Option<ResAugCase>,
}

impl ResAugAdversary {
    pub fn new(m: usize) -> Result<Self> {
        require(m >= 2, || format!("resource-augmentation adversary needs m >= 2, got {m}"))?;
        let mk = key(m)?;
        let prefix = concat([
            up(1, mk - 1)?,
            down(2 * mk - 1, mk)?,
            up(3 * mk, 4 * mk - 2)?,
            down(-mk, -2 * mk + 2)?,
        ]);
        Ok(Self {
            m,
            emitted: Vec::new(),
            plan: prefix,
            case: None,
        })
    }

    pub fn capacity(&self) -> usize {
        4 * self.m - 3
    }

    pub fn case(&self) -> Option<ResAugCase> {
        self.case
    }

    fn extend_plan(&mut self, log: &WriteLog) -> Result<()> {
        let mk = self.m as Key;
        let w = log.written();
        let prefix = self.capacity();
        if self.plan.len() == prefix {
            let first = w[0];
            let e = if first == 4 * mk - 2 { 4 * mk - 1 } else { -2 * mk + 1 };
            self.plan.push(e);
        } else if self.case.is_none() {
            let (first, second) = (w[0], w[1]);
            let (case, tail) = if first == -2 * mk + 2 {
                if second < first {
                    (ResAugCase::LowContinued, down(0, -(mk - 1))?)
                } else {
                    (
                        ResAugCase::LowTurned,
                        concat([down(-2 * mk, -10 * mk)?, up(2 * mk, 3 * mk - 1)?]),
                    )
                }
            } else if first == 4 * mk - 2 {
                if second > first {
                    (ResAugCase::HighContinued, up(2 * mk, 3 * mk - 1)?)
                } else {
                    (
                        ResAugCase::HighTurned,
                        concat([up(4 * mk, 10 * mk)?, down(0, -mk + 1)?]),
                    )
                }
            } else {
                (ResAugCase::Elsewhere, down(0, -(mk - 1))?)
            };
            self.case = Some(case);
            self.plan.extend(tail);
        }
        Ok(())
    }
}

impl InputSource for ResAugAdversary {
    fn pull(&mut self, log: &WriteLog) -> Result<Option<Key>> {
        let i = self.emitted.len();
        check_pace(log, i, self.capacity())?;
        if i == self.plan.len() {
            self.extend_plan(log)?;
        }
        let k = self.plan.get(i).copied();
        if let Some(k) = k {
            self.emitted.push(k);
        }
        Ok(k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResAugOutcome {
    pub input: Vec<Key>,
    pub case: ResAugCase,
    pub claimed_opt: usize,
    pub output: RunSequence,
}

/// Runs `play` (which must use a `4m - 3` buffer) against [`ResAugAdversary`].
pub fn adversary_resaug<F>(m: usize, play: F) -> Result<ResAugOutcome>
where
    F: FnOnce(&mut dyn InputSource) -> Result<RunSequence>,
{
    let mut adv = ResAugAdversary::new(m)?;
    let output = play(&mut adv)?;
    let case = adv
        .case
        .ok_or_else(|| Error::Protocol("algorithm finished before the adversary committed".into()))?;
    Ok(ResAugOutcome {
        input: adv.emitted,
        case,
        claimed_opt: case.claimed_opt(),
        output,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearlySortedSpec {
    pub m: usize,
    /// Every intended run has at least `c * m` elements.
    pub c: f64,
    pub runs: usize,
    /// Largest distance an element moves inside its run; below `m`.
    pub max_displacement: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateSource {
    Construction,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortednessCertificate {
    pub c: f64,
    /// The witness is confirmed optimal by the exhaustive oracle.
    pub witnessed: bool,
    pub source: CertificateSource,
    pub witness_directions: Vec<Direction>,
    pub witness_run_lengths: Vec<usize>,
}

/// Builds an input whose intended output is `runs` alternating runs, each
/// at least `max(ceil(c*m), 2m)` long. Up runs take successively higher
/// bands of positive keys and down runs successively lower bands of
/// negative keys; inside a run, consecutive chunks of `max_displacement+1`
/// keys are shuffled.
pub fn gen_nearly_sorted(spec: NearlySortedSpec) -> Result<(Vec<Key>, SortednessCertificate)> {
    let NearlySortedSpec {
        m,
        c,
        runs,
        max_displacement,
        seed,
    } = spec;
    require(m >= 1, || "nearly-sorted generator needs m >= 1".into())?;
    require(c.is_finite() && c >= 1.0, || format!("c must be at least 1, got {c}"))?;
    require(runs >= 1, || "nearly-sorted generator needs at least one run".into())?;
    require(max_displacement < m, || {
        format!("displacement {max_displacement} must be below m = {m}")
    })?;
    let min_len = ((c * m as f64).ceil() as usize).max(2 * m);
    let band = key(min_len + m + 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flip = rng.gen_bool(0.5);
    let window = max_displacement + 1;
    let mut input = Vec::new();
    let mut directions = Vec::with_capacity(runs);
    for j in 0..runs {
        let len = key(min_len + rng.gen_range(0..=m))?;
        let b = key(j / 2)?.checked_mul(band).ok_or(Error::ArithmeticOverflow)?;
        let (mut run, dir) = if j % 2 == 0 {
            (up(b, b + len - 1)?, Direction::Up)
        } else {
            (down(-(b + 1), -(b + len))?, Direction::Down)
        };
        for chunk in run.chunks_mut(window) {
            chunk.shuffle(&mut rng);
        }
        input.extend(run);
        directions.push(dir);
    }
    if flip {
        for k in &mut input {
            *k = -*k;
        }
        for d in &mut directions {
            *d = d.opposite();
        }
    }
    let lengths = replay(&input, m, &directions)?.lengths();
    Ok((
        input,
        SortednessCertificate {
            c,
            witnessed: false,
            source: CertificateSource::Construction,
            witness_directions: directions,
            witness_run_lengths: lengths,
        },
    ))
}

/// Confirms a construction certificate with the exhaustive oracle. Returns
/// whether the witness is optimal and all its runs meet the length bound.
pub fn certify_with_oracle(
    input: &[Key],
    m: usize,
    cert: &mut SortednessCertificate,
    node_budget: u64,
) -> Result<bool> {
    let opt = brute_force_opt(input, m, node_budget)?.opt_runs;
    let bound = cert.c * m as f64;
    cert.witnessed = opt == cert.witness_run_lengths.len()
        && cert.witness_run_lengths.iter().all(|&l| l as f64 >= bound);
    cert.source = CertificateSource::Oracle;
    Ok(cert.witnessed)
}

/// Parameters for the fixed-input generators, as read from a spec file or
/// the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenParams {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub displacement: Option<usize>,
}

/// Names accepted by [`generate`].
pub const FIXED_GENERATORS: &[&str] = &[
    "sorted",
    "reversed",
    "perm",
    "greedy_gap",
    "tight3m",
    "chunked",
    "rand_adversary",
    "nearly_sorted",
];

/// Names of the adversaries that need the algorithm in the loop.
pub const ADAPTIVE_GENERATORS: &[&str] = &["det_adversary", "resaug_adversary"];

fn param<T: Copy>(v: Option<T>, name: &str, gen: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("generator `{gen}` needs `{name}`")))
}

/// Builds a fixed input by generator name. `m` falls back to `default_m`.
pub fn generate(p: &GenParams, default_m: Option<usize>, seed: u64) -> Result<Vec<Key>> {
    let g = p.name.as_str();
    let m = || param(p.m.or(default_m), "m", g);
    let int_c = || -> Result<usize> {
        let c = param(p.c, "c", g)?;
        require(c >= 0.0 && c.fract() == 0.0, || format!("`c` must be a whole number for `{g}`"))?;
        Ok(c as usize)
    };
    match g {
        "sorted" => {
            let n = key(param(p.n, "n", g)?)?;
            Ok(if n == 0 { Vec::new() } else { up(1, n)? })
        }
        "reversed" => {
            let n = key(param(p.n, "n", g)?)?;
            Ok(if n == 0 { Vec::new() } else { down(n, 1)? })
        }
        "perm" => Ok(gen_random_permutation(param(p.n, "n", g)?, seed)),
        "greedy_gap" => fixture_greedy_gap(m()?, int_c()?),
        "tight3m" => fixture_3m_tight(m()?),
        "chunked" => fixture_chunked_reverse(m()?, int_c()?),
        "rand_adversary" => Ok(adversary_randomized(m()?, param(p.t, "t", g)?, seed)?.input),
        "nearly_sorted" => Ok(gen_nearly_sorted(NearlySortedSpec {
            m: m()?,
            c: param(p.c, "c", g)?,
            runs: param(p.runs, "runs", g)?,
            max_displacement: p.displacement.unwrap_or(0),
            seed,
        })?
        .0),
        _ if ADAPTIVE_GENERATORS.contains(&g) => Err(Error::InvalidParameter(format!(
            "`{g}` adapts to the algorithm and cannot be generated ahead of time"
        ))),
        _ => Err(Error::UnknownGenerator(g.to_string())),
    }
}
