//! Algorithms for inputs whose optimal runs are all long.
//!
//! An input is `c`-nearly-sorted when some proper optimal algorithm writes
//! only runs of length at least `c * m`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{
    Direction, DistinctGuard, InputSource, Key, Run, RunSequence, UnwrittenView, WriteLog,
};
use crate::online::{Coin, CoinFlip, CoinPolicy, CoinRecord};

/// What happened in one partition of [`GhostMachine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionReport {
    /// Direction of the run actually started.
    pub guess: Direction,
    /// The guessed run was at least as long as the opposite one.
    pub lucky: bool,
    /// Length of the guessed run, ghost deletions included.
    pub guess_len: usize,
    /// Direction of the run the machine ends up having simulated exactly.
    pub effective: Direction,
    /// Length of that run, ghost deletions included.
    pub effective_len: usize,
    /// Neither run reached `3m` although input remained.
    pub ambiguous: bool,
}

/// The opposite run followed in lockstep with the real one.
struct Shadow {
    bag: BTreeSet<Key>,
    dir: Direction,
    last: Option<Key>,
    len: usize,
}

impl Shadow {
    fn next(&self) -> Option<Key> {
        eligible(&self.bag, self.dir, self.last)
    }
}

fn eligible(set: &BTreeSet<Key>, dir: Direction, last: Option<Key>) -> Option<Key> {
    match (dir, last) {
        (Direction::Up, None) => set.first().copied(),
        (Direction::Down, None) => set.last().copied(),
        (Direction::Up, Some(l)) => set.range(l..).next().copied(),
        (Direction::Down, Some(l)) => set.range(..=l).next_back().copied(),
    }
}

fn eligible_in_map(map: &BTreeMap<Key, bool>, dir: Direction, last: Option<Key>) -> Option<Key> {
    match (dir, last) {
        (Direction::Up, None) => map.keys().next().copied(),
        (Direction::Down, None) => map.keys().next_back().copied(),
        (Direction::Up, Some(l)) => map.range(l..).next().map(|(&k, _)| k),
        (Direction::Down, Some(l)) => map.range(..=l).next_back().map(|(&k, _)| k),
    }
}

/// An `m`-buffer machine with `m` extra slots for a shadow run and ghost
/// markers inside its buffer. Keys must be distinct.
///
/// Each partition starts a run in a guessed direction while the shadow
/// follows the opposite run. If the guess was the shorter run, the machine
/// catches up with the shadow: buffered elements the shadow had already
/// written are written now, and elements only the guessed run wrote come
/// back as ghosts. Ghosts occupy buffer slots and are deleted, not written,
/// when a run reaches them. Afterwards the buffer (ghosts included) and the
/// input position match a machine that wrote the longer run directly.
pub struct GhostMachine<'s> {
    m: usize,
    source: &'s mut dyn InputSource,
    /// key -> is_ghost
    buffer: BTreeMap<Key, bool>,
    source_done: bool,
    consumed: u64,
    steps: u64,
    log: WriteLog,
    peak_aux: usize,
}

impl<'s> GhostMachine<'s> {
    pub fn new(m: usize, source: &'s mut dyn InputSource) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroCapacity);
        }
        Ok(Self {
            m,
            source,
            buffer: BTreeMap::new(),
            source_done: false,
            consumed: 0,
            steps: 0,
            log: WriteLog::default(),
            peak_aux: 0,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    /// Buffer removals so far: writes plus ghost deletions.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Largest shadow buffer seen; the extra space the machine used.
    pub fn peak_aux(&self) -> usize {
        self.peak_aux
    }

    pub fn log(&self) -> &WriteLog {
        &self.log
    }

    /// Buffered keys, live and ghost, in increasing order.
    pub fn virtual_contents(&self) -> Vec<Key> {
        self.buffer.keys().copied().collect()
    }

    pub fn ghosts(&self) -> Vec<Key> {
        self.buffer
            .iter()
            .filter(|(_, &g)| g)
            .map(|(&k, _)| k)
            .collect()
    }

    pub fn has_unwritten(&mut self) -> Result<bool> {
        self.fill()?;
        Ok(!self.buffer.is_empty())
    }

    /// Virtual buffer followed by the source's remainder, when known.
    pub fn full_view(&self) -> Option<UnwrittenView> {
        let rest = self.source.remaining()?;
        Some(UnwrittenView::new(self.virtual_contents(), rest.to_vec()))
    }

    /// The output so far; runs that only deleted ghosts are dropped.
    pub fn output(&self) -> RunSequence {
        let runs = self
            .log
            .runs()
            .filter(|(_, ks)| !ks.is_empty())
            .map(|(d, ks)| Run {
                direction: d,
                elements: ks.to_vec(),
            })
            .collect();
        RunSequence::new(self.m, runs)
    }

    fn fill(&mut self) -> Result<()> {
        while self.buffer.len() < self.m {
            match self.pull()? {
                Some(k) => {
                    self.buffer.insert(k, false);
                }
                None => break,
            }
        }
        Ok(())
    }

    fn pull(&mut self) -> Result<Option<Key>> {
        if self.source_done {
            return Ok(None);
        }
        let k = self.source.pull(&self.log)?;
        match k {
            Some(k) => {
                if self.buffer.contains_key(&k) {
                    return Err(Error::DuplicateKey(k));
                }
                self.consumed += 1;
            }
            None => self.source_done = true,
        }
        Ok(k)
    }

    /// Removes `k` from the buffer, writing it unless it is a ghost.
    fn emit(&mut self, k: Key) {
        let ghost = self.buffer.remove(&k).expect("emitted key is buffered");
        if !ghost {
            self.log.push(k);
        }
        self.steps += 1;
    }

    /// Plays one partition starting with a run in direction `guess`.
    pub fn partition(&mut self, guess: Direction) -> Result<PartitionReport> {
        self.fill()?;
        if self.buffer.is_empty() {
            return Err(Error::InvalidState("cannot start a run from an empty buffer"));
        }
        let mut shadow = Some(Shadow {
            bag: self.buffer.keys().copied().collect(),
            dir: guess.opposite(),
            last: None,
            len: 0,
        });
        let mut shadow_len = 0;
        self.log.begin_run(guess);
        let mut last = None;
        let mut guess_len = 0;
        while let Some(k) = eligible_in_map(&self.buffer, guess, last) {
            self.emit(k);
            last = Some(k);
            guess_len += 1;
            if let Some(sh) = shadow.as_mut() {
                match sh.next() {
                    Some(s) => {
                        sh.bag.remove(&s);
                        sh.last = Some(s);
                        sh.len += 1;
                    }
                    None => {
                        shadow_len = sh.len;
                        shadow = None;
                    }
                }
            }
            if let Some(x) = self.pull()? {
                self.buffer.insert(x, false);
                if let Some(sh) = shadow.as_mut() {
                    sh.bag.insert(x);
                    self.peak_aux = self.peak_aux.max(sh.bag.len());
                }
            }
        }
        let three_m = 3 * self.m;
        let shadow = match shadow {
            Some(sh) if sh.next().is_some() => sh,
            other => {
                if let Some(sh) = other {
                    shadow_len = sh.len;
                }
                debug_assert!(shadow_len <= guess_len);
                let ambiguous = guess_len < three_m && !self.buffer.is_empty();
                return Ok(PartitionReport {
                    guess,
                    lucky: true,
                    guess_len,
                    effective: guess,
                    effective_len: guess_len,
                    ambiguous,
                });
            }
        };

        // Wrong guess: become the machine that wrote the shadow run.
        let dir = shadow.dir;
        let real: BTreeSet<Key> = self.buffer.keys().copied().collect();
        let mut catch_up: Vec<Key> = real.difference(&shadow.bag).copied().collect();
        if dir == Direction::Down {
            catch_up.reverse();
        }
        let revived: Vec<Key> = shadow.bag.difference(&real).copied().collect();
        self.log.begin_run(dir);
        for k in catch_up {
            self.emit(k);
        }
        for k in revived {
            self.buffer.insert(k, true);
        }
        debug_assert!(self.buffer.len() <= self.m);
        let mut effective_len = shadow.len;
        let mut last = shadow.last;
        while let Some(k) = eligible_in_map(&self.buffer, dir, last) {
            self.emit(k);
            last = Some(k);
            effective_len += 1;
            if let Some(x) = self.pull()? {
                self.buffer.insert(x, false);
            }
        }
        let ambiguous = effective_len < three_m && !self.buffer.is_empty();
        Ok(PartitionReport {
            guess,
            lucky: false,
            guess_len,
            effective: dir,
            effective_len,
            ambiguous,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhostOutcome {
    pub output: RunSequence,
    pub coins: CoinRecord,
    pub partitions: Vec<PartitionReport>,
    /// Some partition could not be decided by the `3m` threshold.
    pub ambiguous: bool,
    pub peak_aux: usize,
}

/// Randomized algorithm for 3-nearly-sorted, duplicate-free inputs.
pub fn ghost_randomized(
    source: &mut dyn InputSource,
    m: usize,
    policy: CoinPolicy,
) -> Result<GhostOutcome> {
    let mut guard = DistinctGuard::new(source);
    let mut machine = GhostMachine::new(m, &mut guard)?;
    let mut coin = Coin::new(policy);
    let mut coins = CoinRecord::default();
    let mut partitions = Vec::new();
    while machine.has_unwritten()? {
        let guess = coin.flip(|| machine.full_view(), m)?;
        let report = machine.partition(guess)?;
        coins.flips.push(CoinFlip {
            direction: guess,
            lucky: report.lucky,
        });
        partitions.push(report);
    }
    Ok(GhostOutcome {
        output: machine.output(),
        ambiguous: partitions.iter().any(|p| p.ambiguous),
        coins,
        partitions,
        peak_aux: machine.peak_aux(),
    })
}

/// True when every run has length at least `5m`. For a proper algorithm on
/// a duplicate-free input this certifies the output is optimal.
pub fn check_5m_optimality(output: &RunSequence, m: usize) -> bool {
    output.runs.iter().all(|r| r.len() >= 5 * m)
}
