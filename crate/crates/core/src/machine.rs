//! The bounded-buffer run-generation machine.
//!
//! An algorithm reads elements one at a time into a buffer of `capacity`
//! slots and writes them to an output sequence. Every write frees a slot,
//! which is immediately refilled from the input, so the buffer stays full
//! until the input runs dry. Algorithms differ only in which direction
//! they pick for each run; the machine itself always writes *maximal*
//! runs: it never ends a run while an eligible element is buffered.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Key = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn opposite(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    /// Whether `next` may follow `last` in a run of this direction.
    /// Runs are non-strict: equal keys always continue.
    #[inline]
    pub fn admits(self, last: Key, next: Key) -> bool {
        match self {
            Direction::Up => next >= last,
            Direction::Down => next <= last,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Up => f.write_str("up"),
            Direction::Down => f.write_str("down"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub direction: Direction,
    pub elements: Vec<Key>,
}

impl Run {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_monotone(&self) -> bool {
        self.elements
            .windows(2)
            .all(|w| self.direction.admits(w[0], w[1]))
    }
}

/// Output of a run-generation algorithm: the runs it declared, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSequence {
    pub m: usize,
    pub runs: Vec<Run>,
}

impl RunSequence {
    pub fn new(m: usize, runs: Vec<Run>) -> Self {
        Self { m, runs }
    }

    /// Number of runs the algorithm declared.
    pub fn declared(&self) -> usize {
        self.runs.len()
    }

    /// `R(S)`: the fewest monotone pieces the flattened output splits into.
    pub fn cost(&self) -> usize {
        count_runs(&self.flatten())
    }

    pub fn flatten(&self) -> Vec<Key> {
        let mut out = Vec::with_capacity(self.total_len());
        for r in &self.runs {
            out.extend_from_slice(&r.elements);
        }
        out
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.runs.iter().map(Run::len).collect()
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.runs.iter().map(|r| r.direction).collect()
    }

    pub fn total_len(&self) -> usize {
        self.runs.iter().map(Run::len).sum()
    }

    /// Every run is nonempty and monotone in its declared direction.
    pub fn is_well_formed(&self) -> bool {
        self.runs.iter().all(|r| !r.is_empty() && r.is_monotone())
    }
}

/// True when `output` is a permutation of `input` (multiset equality).
pub fn conserves(input: &[Key], output: &RunSequence) -> bool {
    let mut a = input.to_vec();
    let mut b = output.flatten();
    if a.len() != b.len() {
        return false;
    }
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Minimum number of contiguous monotone segments `seq` splits into.
///
/// Greedy scan: a segment's direction stays open across plateaus of equal
/// keys and is committed at the first strict comparison.
pub fn count_runs(seq: &[Key]) -> usize {
    let Some((&first, rest)) = seq.split_first() else {
        return 0;
    };
    let mut runs = 1;
    let mut dir: Option<Direction> = None;
    let mut prev = first;
    for &x in rest {
        match dir {
            None => {
                if x > prev {
                    dir = Some(Direction::Up);
                } else if x < prev {
                    dir = Some(Direction::Down);
                }
            }
            Some(d) if !d.admits(prev, x) => {
                runs += 1;
                dir = None;
            }
            Some(_) => {}
        }
        prev = x;
    }
    runs
}

/// Buffer contents followed by the not-yet-read input.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnwrittenView {
    /// Buffered elements in arrival order.
    pub buffer: Vec<Key>,
    pub remaining: Vec<Key>,
}

impl UnwrittenView {
    pub fn new(buffer: Vec<Key>, remaining: Vec<Key>) -> Self {
        Self { buffer, remaining }
    }

    pub fn len(&self) -> usize {
        self.buffer.len() + self.remaining.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty() && self.remaining.is_empty()
    }

    pub fn sequence(&self) -> impl Iterator<Item = Key> + '_ {
        self.buffer.iter().chain(self.remaining.iter()).copied()
    }
}

/// Length of the maximal run in `dir` that an `m`-buffer machine would write
/// starting from `view`, without touching any machine.
///
/// The simulated machine holds the first `m` elements of the unwritten
/// sequence; after `t` writes it has seen exactly the first `m + t`. Returns
/// `(cap, false)` as soon as the run reaches `cap` elements ("at least
/// `cap`"), otherwise the exact length with `true`.
pub fn simulate_maximal_run_length(
    view: &UnwrittenView,
    m: usize,
    dir: Direction,
    cap: usize,
) -> (usize, bool) {
    let mut seq = view.sequence();
    let bag = KeyBag::from_keys(seq.by_ref().take(m));
    simulate_from(bag, seq, dir, cap)
}

/// Core of [`simulate_maximal_run_length`]: `bag` is the simulated buffer
/// and `rest` the elements it reads, one per write.
pub(crate) fn simulate_from(
    mut bag: KeyBag,
    mut rest: impl Iterator<Item = Key>,
    dir: Direction,
    cap: usize,
) -> (usize, bool) {
    if cap == 0 {
        return (0, false);
    }
    let mut len = 0;
    let mut last: Option<Key> = None;
    loop {
        let next = match last {
            None => bag.extreme(dir),
            Some(l) => bag.next_eligible(dir, l),
        };
        let Some(k) = next else {
            return (len, true);
        };
        bag.remove_one(k);
        len += 1;
        last = Some(k);
        if len >= cap {
            return (len, false);
        }
        if let Some(x) = rest.next() {
            bag.insert(x);
        }
    }
}

/// Direction of the longer maximal run from `view` for an `m`-buffer
/// machine, ties going up. Uses the whole view.
pub fn greedy_direction(view: &UnwrittenView, m: usize) -> Direction {
    let (up, _) = simulate_maximal_run_length(view, m, Direction::Up, usize::MAX);
    let (down, _) = simulate_maximal_run_length(view, m, Direction::Down, usize::MAX);
    if up >= down {
        Direction::Up
    } else {
        Direction::Down
    }
}

/// A multiset of keys with the two lookups maximal runs need.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub(crate) struct KeyBag {
    counts: BTreeMap<Key, u32>,
    len: usize,
}

impl KeyBag {
    pub(crate) fn from_keys(keys: impl IntoIterator<Item = Key>) -> Self {
        let mut bag = Self::default();
        for k in keys {
            bag.insert(k);
        }
        bag
    }

    pub(crate) fn insert(&mut self, k: Key) {
        *self.counts.entry(k).or_insert(0) += 1;
        self.len += 1;
    }

    pub(crate) fn remove_one(&mut self, k: Key) -> bool {
        match self.counts.get_mut(&k) {
            Some(c) if *c > 1 => *c -= 1,
            Some(_) => {
                self.counts.remove(&k);
            }
            None => return false,
        }
        self.len -= 1;
        true
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// First element of a fresh run: the minimum for up, maximum for down.
    pub(crate) fn extreme(&self, dir: Direction) -> Option<Key> {
        match dir {
            Direction::Up => self.counts.keys().next().copied(),
            Direction::Down => self.counts.keys().next_back().copied(),
        }
    }

    pub(crate) fn next_eligible(&self, dir: Direction, last: Key) -> Option<Key> {
        match dir {
            Direction::Up => self.counts.range(last..).next().map(|(&k, _)| k),
            Direction::Down => self.counts.range(..=last).next_back().map(|(&k, _)| k),
        }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = Key> + '_ {
        self.counts
            .iter()
            .flat_map(|(&k, &c)| std::iter::repeat(k).take(c as usize))
    }
}

/// Start of a declared run inside a [`WriteLog`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunMark {
    pub direction: Direction,
    pub start: usize,
}

/// Everything an algorithm has written so far, with run boundaries.
/// Adaptive adversaries read this before answering a pull.
#[derive(Debug, Clone, Default)]
pub struct WriteLog {
    keys: Vec<Key>,
    marks: Vec<RunMark>,
}

impl WriteLog {
    pub fn written(&self) -> &[Key] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Direction and elements of the run currently being written.
    pub fn current_run(&self) -> Option<(Direction, &[Key])> {
        self.marks
            .last()
            .map(|mark| (mark.direction, &self.keys[mark.start..]))
    }

    pub fn runs(&self) -> impl Iterator<Item = (Direction, &[Key])> + '_ {
        self.marks.iter().enumerate().map(move |(i, mark)| {
            let end = self
                .marks
                .get(i + 1)
                .map_or(self.keys.len(), |next| next.start);
            (mark.direction, &self.keys[mark.start..end])
        })
    }

    pub(crate) fn begin_run(&mut self, direction: Direction) {
        self.marks.push(RunMark {
            direction,
            start: self.keys.len(),
        });
    }

    pub(crate) fn push(&mut self, key: Key) {
        self.keys.push(key);
    }
}

/// A sequential element provider. `pull` sees the caller's writes so far,
/// which lets adversaries adapt to the algorithm under test.
pub trait InputSource {
    fn pull(&mut self, log: &WriteLog) -> Result<Option<Key>>;

    /// The not-yet-pulled elements, when they are fixed in advance.
    fn remaining(&self) -> Option<&[Key]> {
        None
    }
}

/// A static input backed by a slice.
#[derive(Debug, Clone)]
pub struct SliceSource<'a> {
    data: &'a [Key],
    pos: usize,
}

impl<'a> SliceSource<'a> {
    pub fn new(data: &'a [Key]) -> Self {
        Self { data, pos: 0 }
    }
}

impl InputSource for SliceSource<'_> {
    fn pull(&mut self, _log: &WriteLog) -> Result<Option<Key>> {
        let k = self.data.get(self.pos).copied();
        if k.is_some() {
            self.pos += 1;
        }
        Ok(k)
    }

    fn remaining(&self) -> Option<&[Key]> {
        Some(&self.data[self.pos..])
    }
}

/// Rejects the first key that repeats anywhere in the stream.
pub struct DistinctGuard<'a> {
    inner: &'a mut dyn InputSource,
    seen: HashSet<Key>,
}

impl<'a> DistinctGuard<'a> {
    pub fn new(inner: &'a mut dyn InputSource) -> Self {
        Self {
            inner,
            seen: HashSet::new(),
        }
    }
}

impl InputSource for DistinctGuard<'_> {
    fn pull(&mut self, log: &WriteLog) -> Result<Option<Key>> {
        match self.inner.pull(log)? {
            Some(k) if !self.seen.insert(k) => Err(Error::DuplicateKey(k)),
            other => Ok(other),
        }
    }

    fn remaining(&self) -> Option<&[Key]> {
        self.inner.remaining()
    }
}

/// Fails with [`Error::DuplicateKey`] naming the first repeated key.
pub fn ensure_distinct(keys: &[Key]) -> Result<()> {
    let mut seen = HashSet::with_capacity(keys.len());
    for &k in keys {
        if !seen.insert(k) {
            return Err(Error::DuplicateKey(k));
        }
    }
    Ok(())
}

/// Arrival order within the buffer; unique per element.
type Seq = u64;

/// The read-one/write-one machine with a bounded buffer and an optional
/// lookahead window of elements that are visible but not yet buffered.
pub struct BufferMachine<'s> {
    capacity: usize,
    lookahead: usize,
    source: &'s mut dyn InputSource,
    /// (key, arrival) -> time step at which the element was read.
    buffer: BTreeMap<(Key, Seq), u64>,
    ahead: VecDeque<Key>,
    source_done: bool,
    consumed: u64,
    log: WriteLog,
    run_reads: Vec<Key>,
}

impl<'s> BufferMachine<'s> {
    pub fn new(capacity: usize, source: &'s mut dyn InputSource) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::ZeroCapacity);
        }
        Ok(Self {
            capacity,
            lookahead: 0,
            source,
            buffer: BTreeMap::new(),
            ahead: VecDeque::new(),
            source_done: false,
            consumed: 0,
            log: WriteLog::default(),
            run_reads: Vec::new(),
        })
    }

    /// A machine whose buffer already holds `contents` (in arrival order),
    /// as if it had just read them at time 0.
    pub fn preloaded(
        capacity: usize,
        contents: &[Key],
        source: &'s mut dyn InputSource,
    ) -> Result<Self> {
        if contents.len() > capacity {
            return Err(Error::InvalidState("preloaded contents exceed capacity"));
        }
        let mut machine = Self::new(capacity, source)?;
        for &k in contents {
            machine.admit(k);
        }
        Ok(machine)
    }

    /// Makes the next `n` unread elements visible without buffering them.
    pub fn with_lookahead(mut self, n: usize) -> Self {
        self.lookahead = n;
        self
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Elements moved into the buffer so far.
    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    /// Elements written so far (the time step).
    pub fn written(&self) -> usize {
        self.log.len()
    }

    pub fn log(&self) -> &WriteLog {
        &self.log
    }

    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    /// Buffered keys in arrival order.
    pub fn contents(&self) -> Vec<Key> {
        let mut v: Vec<(Seq, Key)> = self.buffer.keys().map(|&(k, s)| (s, k)).collect();
        v.sort_unstable();
        v.into_iter().map(|(_, k)| k).collect()
    }

    pub fn contents_sorted(&self) -> Vec<Key> {
        self.buffer.keys().map(|&(k, _)| k).collect()
    }

    /// `(key, time step when read)` for every buffered element.
    pub fn arrival_stamps(&self) -> Vec<(Key, u64)> {
        self.buffer.iter().map(|(&(k, _), &t)| (k, t)).collect()
    }

    /// Elements read into the buffer while the most recent run was written.
    pub fn last_run_reads(&self) -> &[Key] {
        &self.run_reads
    }

    /// Buffer (arrival order) followed by every unread element the machine
    /// knows of: the lookahead window plus the source's fixed remainder.
    pub fn unwritten_view(&self) -> UnwrittenView {
        let mut remaining: Vec<Key> = self.ahead.iter().copied().collect();
        if let Some(rest) = self.source.remaining() {
            remaining.extend_from_slice(rest);
        }
        UnwrittenView::new(self.contents(), remaining)
    }

    /// Like [`unwritten_view`](Self::unwritten_view), but `None` when the
    /// source cannot tell what comes next.
    pub fn full_view(&self) -> Option<UnwrittenView> {
        let rest = self.source.remaining()?;
        let mut remaining: Vec<Key> = self.ahead.iter().copied().collect();
        remaining.extend_from_slice(rest);
        Some(UnwrittenView::new(self.contents(), remaining))
    }

    /// Buffer plus lookahead window only; what an online algorithm may see.
    pub fn visible_view(&self) -> UnwrittenView {
        UnwrittenView::new(self.contents(), self.ahead.iter().copied().collect())
    }

    /// Reads until the buffer is full (or input ends) and tops up lookahead.
    pub fn fill(&mut self) -> Result<()> {
        while self.buffer.len() < self.capacity {
            match self.next_input()? {
                Some(k) => self.admit(k),
                None => break,
            }
        }
        self.top_up_lookahead()
    }

    /// Whether any element remains to be written.
    pub fn has_unwritten(&mut self) -> Result<bool> {
        self.fill()?;
        Ok(!self.buffer.is_empty())
    }

    /// Writes the maximal run in `dir` and returns it.
    ///
    /// Up starts at the smallest buffered key and keeps writing the smallest
    /// key not below the last one written, refilling after each write; it
    /// stops only when no buffered key can continue. Down mirrors this.
    /// Equal keys leave in arrival order.
    pub fn write_maximal_run(&mut self, dir: Direction) -> Result<Run> {
        self.fill()?;
        let mut next = self.first_of_run(dir);
        if next.is_none() {
            return Err(Error::InvalidState("cannot start a run from an empty buffer"));
        }
        self.run_reads.clear();
        self.log.begin_run(dir);
        let start = self.log.len();
        while let Some(entry) = next {
            self.buffer.remove(&entry);
            self.log.push(entry.0);
            self.refill_one()?;
            next = self.next_in_run(dir, entry.0);
        }
        Ok(Run {
            direction: dir,
            elements: self.log.written()[start..].to_vec(),
        })
    }

    fn first_of_run(&self, dir: Direction) -> Option<(Key, Seq)> {
        match dir {
            Direction::Up => self.buffer.keys().next().copied(),
            Direction::Down => {
                let &(k, _) = self.buffer.keys().next_back()?;
                self.earliest(k)
            }
        }
    }

    fn next_in_run(&self, dir: Direction, last: Key) -> Option<(Key, Seq)> {
        match dir {
            Direction::Up => self.buffer.range((last, 0)..).next().map(|(&e, _)| e),
            Direction::Down => {
                let (&(k, _), _) = self.buffer.range(..=(last, Seq::MAX)).next_back()?;
                self.earliest(k)
            }
        }
    }

    fn earliest(&self, k: Key) -> Option<(Key, Seq)> {
        self.buffer
            .range((k, 0)..=(k, Seq::MAX))
            .next()
            .map(|(&e, _)| e)
    }

    fn admit(&mut self, k: Key) {
        let seq = self.consumed;
        self.consumed += 1;
        self.buffer.insert((k, seq), self.log.len() as u64);
        assert!(
            self.buffer.len() <= self.capacity,
            "buffer exceeded its capacity of {}",
            self.capacity
        );
    }

    fn refill_one(&mut self) -> Result<()> {
        if self.buffer.len() < self.capacity {
            if let Some(k) = self.next_input()? {
                self.admit(k);
                self.run_reads.push(k);
            }
        }
        self.top_up_lookahead()
    }

    fn next_input(&mut self) -> Result<Option<Key>> {
        if let Some(k) = self.ahead.pop_front() {
            return Ok(Some(k));
        }
        self.pull_source()
    }

    fn pull_source(&mut self) -> Result<Option<Key>> {
        if self.source_done {
            return Ok(None);
        }
        let k = self.source.pull(&self.log)?;
        if k.is_none() {
            self.source_done = true;
        }
        Ok(k)
    }

    fn top_up_lookahead(&mut self) -> Result<()> {
        while self.ahead.len() < self.lookahead {
            match self.pull_source()? {
                Some(k) => self.ahead.push_back(k),
                None => break,
            }
        }
        Ok(())
    }
}

/// Writes maximal runs following `directions` until the input is written,
/// cycling nothing: if the directions run out first the remainder is
/// written with alternating runs. Used to replay witnesses and schedules.
pub fn replay(input: &[Key], m: usize, directions: &[Direction]) -> Result<RunSequence> {
    let mut source = SliceSource::new(input);
    let mut machine = BufferMachine::new(m, &mut source)?;
    let mut runs = Vec::new();
    let mut dirs = directions.iter().copied();
    let mut last = Direction::Down;
    while machine.has_unwritten()? {
        let dir = dirs.next().unwrap_or_else(|| last.opposite());
        runs.push(machine.write_maximal_run(dir)?);
        last = dir;
    }
    Ok(RunSequence::new(m, runs))
}
