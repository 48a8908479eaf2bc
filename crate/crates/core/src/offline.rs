//! Offline run generation: the exact oracle, greedy, and the approximation
//! schemes. All of these see the whole input up front.

use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{
    ensure_distinct, simulate_from, Direction, Key, KeyBag, Run, RunSequence, UnwrittenView,
};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// A bare `m`-buffer machine over a slice, cheap to clone for search.
#[derive(Debug, Clone)]
pub(crate) struct RunState<'a> {
    input: &'a [Key],
    cursor: usize,
    bag: KeyBag,
}

impl<'a> RunState<'a> {
    pub(crate) fn new(input: &'a [Key], m: usize) -> Self {
        let take = m.min(input.len());
        Self {
            input,
            cursor: take,
            bag: KeyBag::from_keys(input[..take].iter().copied()),
        }
    }

    pub(crate) fn is_done(&self) -> bool {
        self.bag.is_empty()
    }

    fn rest(&self) -> impl Iterator<Item = Key> + 'a {
        self.input[self.cursor..].iter().copied()
    }

    /// Exact length of the maximal run in `dir` from here.
    pub(crate) fn run_length(&self, dir: Direction) -> usize {
        simulate_from(self.bag.clone(), self.rest(), dir, usize::MAX).0
    }

    /// Longer of the two maximal runs, ties up, with both lengths.
    pub(crate) fn greedy(&self) -> Direction {
        if self.run_length(Direction::Up) >= self.run_length(Direction::Down) {
            Direction::Up
        } else {
            Direction::Down
        }
    }

    /// Writes a maximal run; returns how many elements it wrote.
    pub(crate) fn write_run(&mut self, dir: Direction, out: Option<&mut Vec<Key>>) -> usize {
        let mut out = out;
        let mut written = 0;
        let mut next = self.bag.extreme(dir);
        while let Some(k) = next {
            self.bag.remove_one(k);
            written += 1;
            if let Some(o) = out.as_deref_mut() {
                o.push(k);
            }
            if let Some(&x) = self.input.get(self.cursor) {
                self.bag.insert(x);
                self.cursor += 1;
            }
            next = self.bag.next_eligible(dir, k);
        }
        written
    }

    fn memo_key(&self) -> (usize, Vec<Key>) {
        (self.cursor, self.bag.iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub opt_runs: usize,
    pub witness: Vec<Direction>,
    /// Distinct search states expanded.
    pub nodes: u64,
}

/// Exact minimum run count over all proper algorithms, by memoized
/// depth-first search over the direction of every run.
///
/// Fails with [`Error::BudgetExceeded`] after `node_budget` expanded states;
/// the error then carries the greedy run count as an upper bound.
pub fn brute_force_opt(input: &[Key], m: usize, node_budget: u64) -> Result<OracleResult> {
    if m == 0 {
        return Err(Error::ZeroCapacity);
    }
    let mut search = Search {
        memo: HashMap::new(),
        nodes: 0,
        budget: node_budget,
    };
    let root = RunState::new(input, m);
    let opt = match search.solve(&root) {
        Some(v) => v,
        None => {
            let best_known = greedy_offline(input, m).ok().map(|s| s.declared());
            return Err(Error::BudgetExceeded {
                budget: node_budget,
                best_known,
            });
        }
    };
    let mut witness = Vec::with_capacity(opt);
    let mut state = root;
    while !state.is_done() {
        let (_, dir) = search.memo[&state.memo_key()];
        witness.push(dir);
        state.write_run(dir, None);
    }
    Ok(OracleResult {
        opt_runs: opt,
        witness,
        nodes: search.nodes,
    })
}

struct Search {
    memo: HashMap<(usize, Vec<Key>), (usize, Direction)>,
    nodes: u64,
    budget: u64,
}

impl Search {
    fn solve(&mut self, state: &RunState<'_>) -> Option<usize> {
        if state.is_done() {
            return Some(0);
        }
        let key = state.memo_key();
        if let Some(&(v, _)) = self.memo.get(&key) {
            return Some(v);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let mut best = (usize::MAX, Direction::Up);
        let mut seen_child: Option<(usize, Vec<Key>)> = None;
        for dir in [Direction::Up, Direction::Down] {
            let mut child = state.clone();
            child.write_run(dir, None);
            let child_key = child.memo_key();
            if seen_child.as_ref() == Some(&child_key) {
                continue;
            }
            let v = 1 + self.solve(&child)?;
            if v < best.0 {
                best = (v, dir);
            }
            seen_child = Some(child_key);
        }
        self.memo.insert(key, best);
        Some(best.0)
    }
}

/// Writes the longer of the two maximal runs at every decision point,
/// measured against the true future input. Ties go up.
pub fn greedy_offline(input: &[Key], m: usize) -> Result<RunSequence> {
    if m == 0 {
        return Err(Error::ZeroCapacity);
    }
    let mut state = RunState::new(input, m);
    let mut runs = Vec::new();
    while !state.is_done() {
        let dir = state.greedy();
        let mut elements = Vec::new();
        state.write_run(dir, Some(&mut elements));
        runs.push(Run {
            direction: dir,
            elements,
        });
    }
    Ok(RunSequence::new(m, runs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PtasVariant {
    Simple,
    Fibonacci,
}

/// Approximation parameter `eps = num / den` with `0 < eps <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PtasConfig {
    pub eps_num: u64,
    pub eps_den: u64,
    pub variant: PtasVariant,
}

impl PtasConfig {
    pub fn new(eps_num: u64, eps_den: u64, variant: PtasVariant) -> Result<Self> {
        if eps_num == 0 || eps_den == 0 || eps_num > eps_den {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1], got {eps_num}/{eps_den}"
            )));
        }
        Ok(Self {
            eps_num,
            eps_den,
            variant,
        })
    }

    pub fn from_eps(eps: &str, variant: PtasVariant) -> Result<Self> {
        let Epsilon(num, den) = eps.parse()?;
        Self::new(num, den, variant)
    }

    /// Runs enumerated per partition: `ceil(1/eps)`.
    pub fn block_runs(&self) -> usize {
        self.eps_den.div_ceil(self.eps_num) as usize
    }

    pub fn eps(&self) -> f64 {
        self.eps_num as f64 / self.eps_den as f64
    }
}

/// An epsilon written as `a/b` or as a decimal such as `0.25`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Epsilon(pub u64, pub u64);

impl FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse epsilon `{s}`"));
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Ok(Epsilon(a, b));
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
        Ok(Epsilon(num, den))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionStats {
    /// Runs the block search could still place (`d`).
    pub depth: usize,
    /// Direction sequences evaluated.
    pub leaves: usize,
    /// Runs actually written for this partition.
    pub runs_emitted: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub partitions: Vec<PartitionStats>,
    pub nodes_visited: u64,
}

/// Outcome of enumerating one partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockChoice {
    pub directions: Vec<Direction>,
    pub written: usize,
    /// The chosen sequence writes everything that is left.
    pub exhausts: bool,
    pub leaves: usize,
    pub nodes: u64,
}

struct Leaf {
    dirs: Vec<Direction>,
    written: usize,
    exhausts: bool,
}

/// Enumerates direction sequences of up to `depth` maximal runs from `view`
/// and picks the best: the shortest one that writes everything, if any
/// does, otherwise the one writing the most elements. Ties go to the
/// lexicographically smallest sequence (up before down).
pub fn block_search(
    view: &UnwrittenView,
    m: usize,
    depth: usize,
    variant: PtasVariant,
) -> BlockChoice {
    let seq: Vec<Key> = view.sequence().collect();
    block_search_state(&RunState::new(&seq, m), depth, variant)
}

fn block_search_state(state: &RunState<'_>, depth: usize, variant: PtasVariant) -> BlockChoice {
    let mut leaves = Vec::new();
    let mut nodes = 0;
    let mut prefix = Vec::with_capacity(depth);
    enumerate(state, depth, variant, &mut prefix, 0, &mut leaves, &mut nodes);
    let leaf_count = leaves.len();
    let best = if leaves.iter().any(|l| l.exhausts) {
        leaves
            .into_iter()
            .filter(|l| l.exhausts)
            .min_by(|a, b| a.dirs.len().cmp(&b.dirs.len()).then_with(|| a.dirs.cmp(&b.dirs)))
    } else {
        leaves
            .into_iter()
            .min_by(|a, b| b.written.cmp(&a.written).then_with(|| a.dirs.cmp(&b.dirs)))
    }
    .expect("block search always yields a leaf");
    BlockChoice {
        directions: best.dirs,
        written: best.written,
        exhausts: best.exhausts,
        leaves: leaf_count,
        nodes,
    }
}

fn enumerate(
    state: &RunState<'_>,
    depth: usize,
    variant: PtasVariant,
    prefix: &mut Vec<Direction>,
    written: usize,
    leaves: &mut Vec<Leaf>,
    nodes: &mut u64,
) {
    *nodes += 1;
    if state.is_done() || depth == 0 {
        leaves.push(Leaf {
            dirs: prefix.clone(),
            written,
            exhausts: state.is_done(),
        });
        return;
    }
    match variant {
        PtasVariant::Simple => {
            for dir in [Direction::Up, Direction::Down] {
                let mut child = state.clone();
                let w = child.write_run(dir, None);
                prefix.push(dir);
                enumerate(&child, depth - 1, variant, prefix, written + w, leaves, nodes);
                prefix.pop();
            }
        }
        PtasVariant::Fibonacci => {
            // On a tie the down run counts as the shorter one.
            let greedy = state.greedy();
            let mut child = state.clone();
            let w = child.write_run(greedy, None);
            prefix.push(greedy);
            enumerate(&child, depth - 1, variant, prefix, written + w, leaves, nodes);
            prefix.pop();
            if depth >= 2 {
                let other = greedy.opposite();
                let mut child = state.clone();
                let w1 = child.write_run(other, None);
                prefix.push(other);
                if child.is_done() {
                    *nodes += 1;
                    leaves.push(Leaf {
                        dirs: prefix.clone(),
                        written: written + w1,
                        exhausts: true,
                    });
                } else {
                    // The shorter run is only worth taking if followed by a
                    // run in the same direction.
                    let w2 = child.write_run(other, None);
                    prefix.push(other);
                    enumerate(&child, depth - 2, variant, prefix, written + w1 + w2, leaves, nodes);
                    prefix.pop();
                }
                prefix.pop();
            }
        }
    }
}

/// The approximation scheme: per partition, commit to the best block of
/// `ceil(1/eps)` runs found by [`block_search`], then one more greedy run.
pub fn ptas(input: &[Key], m: usize, cfg: PtasConfig) -> Result<(RunSequence, SearchStats)> {
    if m == 0 {
        return Err(Error::ZeroCapacity);
    }
    if cfg.variant == PtasVariant::Fibonacci {
        ensure_distinct(input)?;
    }
    let depth = cfg.block_runs();
    let mut state = RunState::new(input, m);
    let mut runs = Vec::new();
    let mut stats = SearchStats::default();
    while !state.is_done() {
        let choice = block_search_state(&state, depth, cfg.variant);
        stats.nodes_visited += choice.nodes;
        let mut emitted = 0;
        let mut emit = |state: &mut RunState<'_>, dir: Direction| {
            let mut elements = Vec::new();
            state.write_run(dir, Some(&mut elements));
            runs.push(Run {
                direction: dir,
                elements,
            });
            emitted += 1;
        };
        for &dir in &choice.directions {
            emit(&mut state, dir);
        }
        if !state.is_done() {
            let dir = state.greedy();
            emit(&mut state, dir);
        }
        stats.partitions.push(PartitionStats {
            depth,
            leaves: choice.leaves,
            runs_emitted: emitted,
        });
    }
    Ok((RunSequence::new(m, runs), stats))
}

/// `F_1 = 1, F_2 = 2, F_d = F_{d-1} + F_{d-2}`: the most leaves the pruned
/// block search can produce with `d` runs to place.
pub fn fibonacci_leaf_bound(d: usize) -> u64 {
    let (mut a, mut b) = (1u64, 2u64);
    match d {
        0 | 1 => 1,
        _ => {
            for _ in 2..d {
                let c = a + b;
                a = b;
                b = c;
            }
            b
        }
    }
}
