//! Online run-generation algorithms, with and without resource augmentation.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{
    simulate_maximal_run_length, BufferMachine, Direction, DistinctGuard, InputSource, Run,
    RunSequence, UnwrittenView,
};

/// Classic replacement selection: every run goes up.
pub fn replacement_selection_up(source: &mut dyn InputSource, m: usize) -> Result<RunSequence> {
    let mut machine = BufferMachine::new(m, source)?;
    let mut runs = Vec::new();
    while machine.has_unwritten()? {
        runs.push(machine.write_maximal_run(Direction::Up)?);
    }
    Ok(RunSequence::new(m, runs))
}

/// Up-down replacement selection with strictly alternating directions.
pub fn alternating_updown(
    source: &mut dyn InputSource,
    m: usize,
    first: Direction,
) -> Result<RunSequence> {
    alternating_with_capacity(source, m, m, first)
}

/// Alternating runs written with a buffer of `capacity` slots; the result is
/// still reported against `m`.
pub fn alternating_with_capacity(
    source: &mut dyn InputSource,
    m: usize,
    capacity: usize,
    first: Direction,
) -> Result<RunSequence> {
    let mut machine = BufferMachine::new(capacity, source)?;
    let mut runs = Vec::new();
    let mut dir = first;
    while machine.has_unwritten()? {
        runs.push(machine.write_maximal_run(dir)?);
        dir = dir.opposite();
    }
    Ok(RunSequence::new(m, runs))
}

/// Direction an `m`-buffer greedy algorithm would take, judged only from the
/// elements in `view`. Runs are followed for at most `cap` elements; a tie
/// (including both reaching `cap`) goes up.
pub fn capped_greedy_direction(view: &UnwrittenView, m: usize, cap: usize) -> Direction {
    let (up, _) = simulate_maximal_run_length(view, m, Direction::Up, cap);
    let (down, _) = simulate_maximal_run_length(view, m, Direction::Down, cap);
    if up >= down {
        Direction::Up
    } else {
        Direction::Down
    }
}

/// The augmented-buffer greedy: fills a buffer of `capacity` slots, decides
/// which maximal run an `m`-buffer machine would prefer by simulating it on
/// the buffer contents alone, then writes that run with the whole buffer.
pub fn greedy_augmented(
    source: &mut dyn InputSource,
    m: usize,
    capacity: usize,
) -> Result<RunSequence> {
    if m == 0 {
        return Err(Error::ZeroCapacity);
    }
    if capacity < m {
        return Err(Error::InvalidParameter(format!(
            "augmented capacity {capacity} is smaller than m = {m}"
        )));
    }
    let mut guard = DistinctGuard::new(source);
    let mut machine = BufferMachine::new(capacity, &mut guard)?;
    let cap = (capacity - m).max(1);
    let mut runs = Vec::new();
    while machine.has_unwritten()? {
        let view = UnwrittenView::new(machine.contents(), Vec::new());
        let dir = capped_greedy_direction(&view, m, cap);
        runs.push(machine.write_maximal_run(dir)?);
    }
    Ok(RunSequence::new(m, runs))
}

/// Never writes more runs than an optimal `m`-buffer algorithm.
pub fn greedy_4m_buffer(source: &mut dyn InputSource, m: usize) -> Result<RunSequence> {
    greedy_augmented(source, m, 4 * m)
}

/// `m`-buffer algorithm that also sees the next `3m` unread elements.
/// Each partition writes the greedy run, one more run in the same
/// direction and one in the opposite direction.
pub fn lookahead_3m(source: &mut dyn InputSource, m: usize) -> Result<RunSequence> {
    let mut guard = DistinctGuard::new(source);
    let mut machine = BufferMachine::new(m, &mut guard)?.with_lookahead(3 * m);
    let mut runs = Vec::new();
    'partitions: while machine.has_unwritten()? {
        let dir = capped_greedy_direction(&machine.visible_view(), m, 3 * m);
        for d in [dir, dir, dir.opposite()] {
            if !machine.has_unwritten()? {
                break 'partitions;
            }
            runs.push(machine.write_maximal_run(d)?);
        }
    }
    Ok(RunSequence::new(m, runs))
}

/// How a randomized algorithm picks the direction at each decision point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoinPolicy {
    /// Fair coin from ChaCha8 seeded with the value; the low bit of each
    /// 64-bit output decides (0 = up, 1 = down).
    Seeded(u64),
    /// Fixed directions, consumed in order; exhausted scripts fall back to up.
    Scripted(Vec<Direction>),
    /// Always the greedy direction. Needs a source that exposes its remainder.
    Greedy,
    /// Always the non-greedy direction. Same requirement as `Greedy`.
    AntiGreedy,
}

pub(crate) enum Coin {
    Random(ChaCha8Rng),
    Script(std::vec::IntoIter<Direction>),
    Greedy { anti: bool },
}

impl Coin {
    pub(crate) fn new(policy: CoinPolicy) -> Self {
        match policy {
            CoinPolicy::Seeded(seed) => Coin::Random(ChaCha8Rng::seed_from_u64(seed)),
            CoinPolicy::Scripted(v) => Coin::Script(v.into_iter()),
            CoinPolicy::Greedy => Coin::Greedy { anti: false },
            CoinPolicy::AntiGreedy => Coin::Greedy { anti: true },
        }
    }

    /// `view` is only consulted by the greedy policies.
    pub(crate) fn flip(&mut self, view: impl FnOnce() -> Option<UnwrittenView>, m: usize) -> Result<Direction> {
        match self {
            Coin::Random(rng) => Ok(if rng.next_u64() & 1 == 0 {
                Direction::Up
            } else {
                Direction::Down
            }),
            Coin::Script(it) => Ok(it.next().unwrap_or(Direction::Up)),
            Coin::Greedy { anti } => {
                let view = view().ok_or_else(|| {
                    Error::InvalidParameter(
                        "greedy coin policies need an input with a known remainder".into(),
                    )
                })?;
                let dir = capped_greedy_direction(&view, m, 3 * m);
                Ok(if *anti { dir.opposite() } else { dir })
            }
        }
    }
}

/// One entry per partition of a randomized run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinFlip {
    pub direction: Direction,
    pub lucky: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinRecord {
    pub flips: Vec<CoinFlip>,
}

impl CoinRecord {
    pub fn lucky_count(&self) -> usize {
        self.flips.iter().filter(|f| f.lucky).count()
    }
}

/// Randomized algorithm with an `m` buffer plus an `m`-slot shadow buffer.
///
/// Each partition writes a maximal run in a random direction while the
/// shadow follows the opposite run. If the written run is at least as long
/// (lucky) the partition adds a same-direction and an opposite run;
/// otherwise it adds three runs of alternating direction.
pub fn randomized_2m(
    source: &mut dyn InputSource,
    m: usize,
    policy: CoinPolicy,
) -> Result<(RunSequence, CoinRecord)> {
    let mut guard = DistinctGuard::new(source);
    let mut machine = BufferMachine::new(m, &mut guard)?;
    let mut coin = Coin::new(policy);
    let mut record = CoinRecord::default();
    let mut runs: Vec<Run> = Vec::new();
    while machine.has_unwritten()? {
        let start = machine.contents();
        let dir = coin.flip(|| machine.full_view(), m)?;
        let run = machine.write_maximal_run(dir)?;
        let shadow_view = UnwrittenView::new(start, machine.last_run_reads().to_vec());
        let (shadow, _) =
            simulate_maximal_run_length(&shadow_view, m, dir.opposite(), run.len() + 1);
        let lucky = shadow <= run.len();
        record.flips.push(CoinFlip {
            direction: dir,
            lucky,
        });
        runs.push(run);
        let rest: &[Direction] = if lucky {
            &[dir, dir.opposite()]
        } else {
            &[dir.opposite(), dir, dir.opposite()]
        };
        for &d in rest {
            if !machine.has_unwritten()? {
                break;
            }
            runs.push(machine.write_maximal_run(d)?);
        }
    }
    Ok((RunSequence::new(m, runs), record))
}
