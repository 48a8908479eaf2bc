//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::fs;
use std::process::{Command, ExitCode, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use runsmith_core::generators::{
    adversary_deterministic, adversary_randomized, adversary_resaug, fixture_3m_tight,
    fixture_chunked_reverse, fixture_greedy_gap, gen_nearly_sorted, gen_random_permutation,
    pairing_schedule, NearlySortedSpec,
};
use runsmith_core::harness::{
    mean_with_slack, run_experiment, Algorithm, ExperimentSpec, InputSpec, RunOptions,
};
use runsmith_core::machine::replay;
use runsmith_core::nearly_sorted::{check_5m_optimality, ghost_randomized, GhostMachine};
use runsmith_core::offline::{
    block_search, brute_force_opt, fibonacci_leaf_bound, greedy_offline, ptas, PtasConfig,
    PtasVariant, DEFAULT_NODE_BUDGET,
};
use runsmith_core::online::{
    alternating_updown, alternating_with_capacity, capped_greedy_direction, greedy_4m_buffer,
    greedy_augmented, lookahead_3m, randomized_2m, replacement_selection_up, CoinPolicy,
};
use runsmith_core::{
    conserves, count_runs, simulate_maximal_run_length, BufferMachine, Direction, Key,
    RunSequence, SliceSource, UnwrittenView,
};

static CONSERVATION_CHECKS: AtomicUsize = AtomicUsize::new(0);
static CONSERVATION_FAILURES: AtomicUsize = AtomicUsize::new(0);

/// Records a conservation check and passes the run count through.
fn checked(input: &[Key], out: &RunSequence) -> usize {
    CONSERVATION_CHECKS.fetch_add(1, Ordering::Relaxed);
    if !conserves(input, out) || !out.is_well_formed() {
        CONSERVATION_FAILURES.fetch_add(1, Ordering::Relaxed);
    }
    out.cost()
}

struct Instance {
    input: Vec<Key>,
    m: usize,
    opt: usize,
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

struct Report {
    failed: usize,
}

impl Report {
    fn run(&mut self, id: u32, name: &str, limit_s: Option<f64>, f: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let v = f();
        let secs = start.elapsed().as_secs_f64();
        let in_time = limit_s.is_none_or(|l| secs < l);
        let pass = v.pass && in_time;
        if !pass {
            self.failed += 1;
        }
        let limit = limit_s.map(|l| format!(" / limit {l} s")).unwrap_or_default();
        println!(
            "[{}] {id:>2} {name}: {} ({secs:.2} s{limit})",
            if pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
}

fn random_instances(count: usize) -> Vec<(Vec<Key>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=60);
            let m = rng.gen_range(2..=5);
            (gen_random_permutation(n, rng.gen()), m)
        })
        .collect()
}

fn src(input: &[Key]) -> SliceSource<'_> {
    SliceSource::new(input)
}

fn c1_oracle(instances: &mut Vec<Instance>) -> Verdict {
    let mut bad = 0;
    let mut nodes = 0;
    for (input, m) in random_instances(500) {
        let r = match brute_force_opt(&input, m, DEFAULT_NODE_BUDGET) {
            Ok(r) => r,
            Err(e) => return verdict(false, format!("oracle error: {e}")),
        };
        nodes = nodes.max(r.nodes);
        let witness = replay(&input, m, &r.witness).unwrap();
        if checked(&input, &witness) != r.opt_runs {
            bad += 1;
        }
        instances.push(Instance { input, m, opt: r.opt_runs });
    }
    verdict(bad == 0, format!("{bad}/500 witnesses disagree; max nodes {nodes}"))
}

fn c2_alternating(instances: &[Instance]) -> Verdict {
    let fixtures: Vec<(Vec<Key>, usize)> = vec![
        (fixture_greedy_gap(10, 1).unwrap(), 10),
        (fixture_greedy_gap(10, 3).unwrap(), 10),
        (fixture_greedy_gap(4, 2).unwrap(), 4),
        (fixture_3m_tight(10).unwrap(), 10),
        (fixture_3m_tight(4).unwrap(), 4),
        (fixture_chunked_reverse(10, 8).unwrap(), 10),
        (fixture_chunked_reverse(3, 4).unwrap(), 3),
    ];
    let mut cases: Vec<(&[Key], usize, usize)> =
        instances.iter().map(|i| (i.input.as_slice(), i.m, i.opt)).collect();
    let mut fixture_opts = Vec::new();
    for (input, m) in &fixtures {
        let opt = brute_force_opt(input, *m, DEFAULT_NODE_BUDGET).unwrap().opt_runs;
        fixture_opts.push(opt);
        cases.push((input.as_slice(), *m, opt));
    }
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for (input, m, opt) in cases {
        let r = checked(input, &alternating_updown(&mut src(input), m, Direction::Up).unwrap());
        if r > 2 * opt {
            violations += 1;
        }
        worst = worst.max(r as f64 / opt as f64);
    }
    verdict(
        violations == 0,
        format!("{violations} violations over {} inputs; worst ratio {worst:.3}; fixture OPTs {fixture_opts:?}", instances.len() + fixtures.len()),
    )
}

fn c3_deterministic_adversary() -> Verdict {
    let (m, t) = (50, 100);
    let mut parts = Vec::new();
    let mut pass = true;
    type Play = fn(&mut dyn runsmith_core::InputSource, usize) -> runsmith_core::Result<RunSequence>;
    let players: [(&str, Play); 2] = [
        ("alternating", |s, m| alternating_updown(s, m, Direction::Up)),
        ("rs_up", |s, m| replacement_selection_up(s, m)),
    ];
    for (name, play) in players {
        let out = adversary_deterministic(m, t, |s| play(s, m)).unwrap();
        let r = checked(&out.input, &out.output);
        let pairing = checked(&out.input, &pairing_schedule(&out.input, m).unwrap());
        let ratio = r as f64 / pairing as f64;
        pass &= r >= t && pairing <= t / 2 && ratio >= 1.9;
        parts.push(format!("{name} {r} runs vs pairing {pairing} (ratio {ratio:.3})"));
    }
    verdict(pass, parts.join("; "))
}

fn c4_randomized_adversary() -> Verdict {
    let (m, t) = (20, 50);
    let counts: Vec<f64> = (0..200u64)
        .map(|seed| {
            let adv = adversary_randomized(m, t, seed).unwrap();
            checked(&adv.input, &alternating_updown(&mut src(&adv.input), m, Direction::Up).unwrap()) as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    verdict(mean >= 1.45 * t as f64, format!("mean {mean:.2} runs vs bound {:.1}", 1.45 * t as f64))
}

fn c5_expected_lengths() -> Verdict {
    let m = 1000;
    let mut means = Vec::new();
    for alg in [Algorithm::RsUp, Algorithm::Alternating] {
        let mut spec = ExperimentSpec::new(
            alg,
            InputSpec::Generator(runsmith_core::generators::GenParams {
                name: "perm".into(),
                n: Some(1_000_000),
                ..Default::default()
            }),
            m,
        );
        spec.trials = 10;
        let recs = run_experiment(&spec, RunOptions::default()).unwrap();
        let total: usize = recs.iter().map(|r| r.input_len).sum();
        let runs: usize = recs.iter().map(|r| r.run_count).sum();
        means.push(total as f64 / runs as f64 / m as f64);
    }
    let (up, alt) = (means[0], means[1]);
    verdict(
        (1.9..=2.1).contains(&up) && (1.4..=1.6).contains(&alt),
        format!("rs_up {up:.3}m, alternating {alt:.3}m"),
    )
}

fn c6_greedy4m(instances: &[Instance]) -> Verdict {
    let violations = instances
        .iter()
        .filter(|i| checked(&i.input, &greedy_4m_buffer(&mut src(&i.input), i.m).unwrap()) > i.opt)
        .count();
    let (m, c) = (10, 8);
    let chunked = fixture_chunked_reverse(m, c).unwrap();
    let g = checked(&chunked, &greedy_4m_buffer(&mut src(&chunked), m).unwrap());
    let a = checked(
        &chunked,
        &alternating_with_capacity(&mut src(&chunked), m, 4 * m, Direction::Up).unwrap(),
    );
    verdict(
        violations == 0 && g == c && a == 2 * c,
        format!("{violations} violations; chunked: greedy4m {g} runs, alternating with 4m buffer {a}"),
    )
}

fn c7_lookahead(instances: &[Instance]) -> Verdict {
    let mut worst: f64 = 0.0;
    let violations = instances
        .iter()
        .filter(|i| {
            let r = checked(&i.input, &lookahead_3m(&mut src(&i.input), i.m).unwrap());
            worst = worst.max(r as f64 / i.opt as f64);
            2 * r > 3 * i.opt
        })
        .count();
    verdict(violations == 0, format!("{violations} violations; worst ratio {worst:.3}"))
}

fn c8_randomized(instances: &[Instance]) -> Verdict {
    let mut mean_violations = 0;
    let mut max_violations = 0;
    let mut worst_mean: f64 = 0.0;
    for inst in &instances[..100] {
        let counts: Vec<f64> = (0..1000u64)
            .map(|seed| {
                let (out, _) = randomized_2m(&mut src(&inst.input), inst.m, CoinPolicy::Seeded(seed)).unwrap();
                checked(&inst.input, &out) as f64
            })
            .collect();
        let (mean, slack) = mean_with_slack(&counts);
        let opt = inst.opt as f64;
        worst_mean = worst_mean.max(mean / opt);
        if mean > 1.75 * opt + slack {
            mean_violations += 1;
        }
        if counts.iter().any(|&c| c > 2.0 * opt) {
            max_violations += 1;
        }
    }
    verdict(
        mean_violations == 0 && max_violations == 0,
        format!("{mean_violations} mean and {max_violations} max violations; worst mean ratio {worst_mean:.3}"),
    )
}

fn c9_resaug() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [4, 10] {
        let out = adversary_resaug(m, |s| greedy_augmented(s, m, 4 * m - 3)).unwrap();
        let r = checked(&out.input, &out.output);
        let ratio = r as f64 / out.claimed_opt as f64;
        pass &= ratio >= 1.5;
        let mut part = format!("m={m}: {:?}, {r} runs vs OPT {} (ratio {ratio:.2})", out.case, out.claimed_opt);
        if m == 4 {
            let opt = brute_force_opt(&out.input, m, DEFAULT_NODE_BUDGET).unwrap().opt_runs;
            pass &= opt == out.claimed_opt;
            part.push_str(&format!(", oracle {opt}"));
        }
        parts.push(part);
    }
    verdict(pass, parts.join("; "))
}

fn c10_greedy() -> Verdict {
    let mut fails = Vec::new();
    let gap = fixture_greedy_gap(10, 5).unwrap();
    let g = checked(&gap, &greedy_offline(&gap, 10).unwrap());
    let down = checked(&gap, &replay(&gap, 10, &[Direction::Down; 20]).unwrap());
    let one = fixture_greedy_gap(10, 1).unwrap();
    let opt1 = brute_force_opt(&one, 10, DEFAULT_NODE_BUDGET).unwrap().opt_runs;
    if g != 15 {
        fails.push(format!("greedy on 5 blocks = {g}, expected 15"));
    }
    if down != 10 {
        fails.push(format!("all-down = {down}, expected 10"));
    }
    if opt1 != 2 {
        fails.push(format!("oracle on 1 block = {opt1}, expected 2"));
    }

    let m: usize = 20;
    let floor = m + (m / 2).div_ceil(2);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut short = 0;
    for _ in 0..200 {
        let input = gen_random_permutation(rng.gen_range(1..=2000), rng.gen());
        let out = greedy_offline(&input, m).unwrap();
        checked(&input, &out);
        let lens = out.lengths();
        short += lens[..lens.len().saturating_sub(2)].iter().filter(|&&l| l < floor).count();
    }
    if short > 0 {
        fails.push(format!("{short} greedy runs shorter than {floor}"));
    }

    let tight = fixture_3m_tight(10).unwrap();
    let view = UnwrittenView::new(Vec::new(), tight);
    let up = simulate_maximal_run_length(&view, 10, Direction::Up, usize::MAX).0;
    let dn = simulate_maximal_run_length(&view, 10, Direction::Down, usize::MAX).0;
    if (up, dn) != (30, 29) {
        fails.push(format!("tight fixture lengths ({up}, {dn}), expected (30, 29)"));
    }

    let mut wide = 0;
    for _ in 0..1000 {
        let m = rng.gen_range(1..=10);
        let seq = gen_random_permutation(rng.gen_range(1..=40 * m), rng.gen());
        let k = m.min(seq.len());
        let view = UnwrittenView::new(seq[..k].to_vec(), seq[k..].to_vec());
        let u = simulate_maximal_run_length(&view, m, Direction::Up, usize::MAX).0;
        let d = simulate_maximal_run_length(&view, m, Direction::Down, usize::MAX).0;
        if u.min(d) >= 3 * m {
            wide += 1;
        }
    }
    if wide > 0 {
        fails.push(format!("{wide} states with both runs >= 3m"));
    }
    let summary = format!(
        "greedy {g} / all-down {down} / oracle(c=1) {opt1}; tight ({up}, {dn}); short runs {short}; wide states {wide}"
    );
    if fails.is_empty() {
        verdict(true, summary)
    } else {
        verdict(false, format!("{summary}; failed: {}", fails.join(", ")))
    }
}

/// Replays a Fibonacci PTAS output and, at every partition start, compares
/// the leaves both variants enumerate from that same state.
fn compare_partitions(input: &[Key], m: usize, cfg: PtasConfig) -> (bool, bool, usize) {
    let (out, stats) = ptas(input, m, cfg).unwrap();
    let mut source = src(input);
    let mut machine = BufferMachine::new(m, &mut source).unwrap();
    let mut runs = out.runs.iter();
    let (mut within_bounds, mut fib_le_simple) = (true, true);
    for p in &stats.partitions {
        machine.fill().unwrap();
        let view = machine.full_view().unwrap();
        let fib = block_search(&view, m, p.depth, PtasVariant::Fibonacci);
        let simple = block_search(&view, m, p.depth, PtasVariant::Simple);
        within_bounds &= fib.leaves as u64 <= fibonacci_leaf_bound(p.depth) && simple.leaves <= 1 << p.depth;
        fib_le_simple &= fib.leaves <= simple.leaves && fib.leaves == p.leaves;
        for run in runs.by_ref().take(p.runs_emitted) {
            machine.write_maximal_run(run.direction).unwrap();
        }
    }
    (within_bounds, fib_le_simple, stats.partitions.len())
}

fn c11_ptas(instances: &[Instance]) -> Verdict {
    let mut violations = 0;
    let mut leaf_problems = 0;
    let mut partitions = 0;
    for den in 1..=3u64 {
        for inst in instances {
            for variant in [PtasVariant::Simple, PtasVariant::Fibonacci] {
                let cfg = PtasConfig::new(1, den, variant).unwrap();
                let (out, _) = ptas(&inst.input, inst.m, cfg).unwrap();
                let r = checked(&inst.input, &out) as u64;
                if r * den > (den + 1) * inst.opt as u64 {
                    violations += 1;
                }
            }
            let cfg = PtasConfig::new(1, den, PtasVariant::Fibonacci).unwrap();
            let (bounds, order, n) = compare_partitions(&inst.input, inst.m, cfg);
            partitions += n;
            leaf_problems += usize::from(!bounds || !order);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut fib_max, mut simple_min) = (0, usize::MAX);
    for _ in 0..20 {
        let input = gen_random_permutation(400, rng.gen());
        let view = UnwrittenView::new(input[..3].to_vec(), input[3..].to_vec());
        fib_max = fib_max.max(block_search(&view, 3, 10, PtasVariant::Fibonacci).leaves);
        simple_min = simple_min.min(block_search(&view, 3, 10, PtasVariant::Simple).leaves);
    }
    verdict(
        violations == 0 && leaf_problems == 0 && fib_max <= 89 && simple_min == 1024,
        format!(
            "{violations} bound violations; {leaf_problems} leaf-count problems over {partitions} partitions; depth 10: fibonacci <= {fib_max}, simple {simple_min}"
        ),
    )
}

fn nearly_sorted(m: usize, c: f64, runs: usize, seed: u64) -> Vec<Key> {
    let d = (seed as usize * 7 + 3) % m;
    gen_nearly_sorted(NearlySortedSpec { m, c, runs, max_displacement: d, seed }).unwrap().0
}

fn c12_nearly_sorted() -> Verdict {
    let mut five_bad = 0;
    for seed in 0..40u64 {
        let (m, runs) = (2 + seed as usize % 4, 1 + seed as usize % 5);
        let input = nearly_sorted(m, 5.0, runs, seed);
        let g = greedy_offline(&input, m).unwrap();
        let opt = brute_force_opt(&input, m, DEFAULT_NODE_BUDGET).unwrap().opt_runs;
        if checked(&input, &g) != opt || !check_5m_optimality(&g, m) {
            five_bad += 1;
        }
    }

    let (mut mean_bad, mut max_bad) = (0, 0);
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let (m, runs) = (2 + seed as usize % 4, 1 + seed as usize % 5);
        let input = nearly_sorted(m, 3.0, runs, 100 + seed);
        let opt = brute_force_opt(&input, m, DEFAULT_NODE_BUDGET).unwrap().opt_runs as f64;
        let counts: Vec<f64> = (0..1000u64)
            .map(|s| {
                let out = ghost_randomized(&mut src(&input), m, CoinPolicy::Seeded(s)).unwrap().output;
                checked(&input, &out) as f64
            })
            .collect();
        let (mean, slack) = mean_with_slack(&counts);
        worst = worst.max(mean / opt);
        mean_bad += usize::from(mean > 1.5 * opt + slack);
        max_bad += usize::from(counts.iter().any(|&c| c > 2.0 * opt));
    }

    let (mut wrong, mut mismatched) = (0, 0);
    let mut seed = 0u64;
    while wrong < 200 && seed < 5000 {
        let (m, runs) = (2 + seed as usize % 4, 2 + seed as usize % 4);
        let input = nearly_sorted(m, 3.0, runs, 1000 + seed);
        let (mut a, mut b) = (src(&input), src(&input));
        let mut ghost = GhostMachine::new(m, &mut a).unwrap();
        let mut reference = BufferMachine::new(m, &mut b).unwrap();
        while ghost.has_unwritten().unwrap() {
            let view = ghost.full_view().unwrap();
            let guess = capped_greedy_direction(&view, m, 3 * m).opposite();
            let rep = ghost.partition(guess).unwrap();
            let run = reference.write_maximal_run(rep.effective).unwrap();
            wrong += usize::from(!rep.lucky);
            let same = run.len() == rep.effective_len
                && ghost.virtual_contents() == reference.contents_sorted()
                && ghost.consumed() == reference.consumed()
                && ghost.peak_aux() <= m;
            mismatched += usize::from(!same);
        }
        checked(&input, &ghost.output());
        seed += 1;
    }
    verdict(
        five_bad == 0 && mean_bad == 0 && max_bad == 0 && wrong >= 200 && mismatched == 0,
        format!(
            "c=5: {five_bad}/40 mismatches; c=3: {mean_bad} mean and {max_bad} max violations, worst mean ratio {worst:.3}; recovery: {mismatched} mismatches over {wrong} wrong-coin partitions"
        ),
    )
}

fn dp_min_runs(seq: &[Key]) -> usize {
    let mut best = vec![usize::MAX; seq.len() + 1];
    best[0] = 0;
    for i in 1..=seq.len() {
        let (mut up, mut down) = (true, true);
        for j in (0..i).rev() {
            if j + 1 < i {
                up &= seq[j] <= seq[j + 1];
                down &= seq[j] >= seq[j + 1];
            }
            if !up && !down {
                break;
            }
            best[i] = best[i].min(best[j] + 1);
        }
    }
    best[seq.len()]
}

fn c13_core() -> Verdict {
    let mut dp_bad = 0;
    let mut sequences = 0;
    for len in 0..=12u32 {
        for code in 0..3usize.pow(len) {
            let mut c = code;
            let seq: Vec<Key> = (0..len)
                .map(|_| {
                    let v = (c % 3) as Key;
                    c /= 3;
                    v
                })
                .collect();
            sequences += 1;
            dp_bad += usize::from(count_runs(&seq) != dp_min_runs(&seq));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut sim_bad = 0;
    for _ in 0..1000 {
        let m = rng.gen_range(1..=8);
        let len = rng.gen_range(1..=60);
        let seq: Vec<Key> = (0..len).map(|_| rng.gen_range(-15..15)).collect();
        let k = m.min(len);
        let view = UnwrittenView::new(seq[..k].to_vec(), seq[k..].to_vec());
        let dir = if rng.gen() { Direction::Up } else { Direction::Down };
        let (sim, _) = simulate_maximal_run_length(&view, m, dir, usize::MAX);
        let mut rest = src(&view.remaining);
        let mut machine = BufferMachine::preloaded(m, &view.buffer, &mut rest).unwrap();
        sim_bad += usize::from(machine.write_maximal_run(dir).unwrap().len() != sim);
    }
    let checks = CONSERVATION_CHECKS.load(Ordering::Relaxed);
    let broken = CONSERVATION_FAILURES.load(Ordering::Relaxed);
    verdict(
        dp_bad == 0 && sim_bad == 0 && broken == 0,
        format!(
            "{dp_bad}/{sequences} count_runs mismatches; {sim_bad}/1000 simulation mismatches; {broken}/{checks} outputs broke conservation"
        ),
    )
}

fn c14_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let specs = [
        r#"{"algorithm":"rand2m","input":{"generator":{"name":"perm","n":40}},"m":3,"trials":20,"seed_base":9,"input_seed":4,"oracle":"bruteforce"}"#,
        r#"{"algorithm":"alternating","input":{"generator":{"name":"det_adversary","t":100}},"m":50,"trials":2,"oracle":"construction"}"#,
        r#"{"algorithm":"alternating","input":{"generator":{"name":"rand_adversary","t":50}},"m":20,"trials":8,"oracle":"construction"}"#,
        r#"{"algorithm":"ghost","input":{"generator":{"name":"nearly_sorted","c":3.0,"runs":4,"displacement":2}},"m":4,"trials":10,"oracle":"bruteforce"}"#,
        r#"{"algorithm":"ptas_fib","input":{"generator":{"name":"perm","n":50}},"m":4,"trials":5,"eps":"1/3","oracle":{"ptas":"1"}}"#,
    ];
    let mut identical = 0;
    let mut notes = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let path = dir.path().join(format!("spec{i}.json"));
        fs::write(&path, spec).unwrap();
        let mut outputs = Vec::new();
        for run in 0..2 {
            let csv = dir.path().join(format!("out{i}_{run}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_runsmith"))
                .args(["bench", "--spec", path.to_str().unwrap(), "--out", csv.to_str().unwrap()])
                .stdout(Stdio::null())
                .status()
                .unwrap();
            if !status.success() {
                notes.push(format!("spec {i} exited with {status}"));
            }
            outputs.push(fs::read(&csv).unwrap_or_default());
        }
        if !outputs[0].is_empty() && outputs[0] == outputs[1] {
            identical += 1;
        }
    }
    let pass = identical == specs.len();
    let mut detail = format!("{identical}/{} specs byte-identical", specs.len());
    if !notes.is_empty() {
        detail.push_str(&format!("; {}", notes.join(", ")));
    }
    verdict(pass, detail)
}

fn main() -> ExitCode {
    let mut report = Report { failed: 0 };
    let mut instances = Vec::new();
    report.run(1, "oracle soundness", Some(60.0), || c1_oracle(&mut instances));
    report.run(2, "alternating within 2 OPT", None, || c2_alternating(&instances));
    report.run(3, "deterministic lower bound", Some(5.0), c3_deterministic_adversary);
    report.run(4, "randomized lower bound", Some(10.0), c4_randomized_adversary);
    report.run(5, "expected run lengths", Some(30.0), c5_expected_lengths);
    report.run(6, "4m buffer matches OPT", None, || c6_greedy4m(&instances));
    report.run(7, "3m lookahead within 3/2 OPT", None, || c7_lookahead(&instances));
    report.run(8, "randomized 2m within 7/4 OPT", Some(120.0), || c8_randomized(&instances));
    report.run(9, "augmentation lower bound", None, c9_resaug);
    report.run(10, "greedy guarantees", None, c10_greedy);
    report.run(11, "approximation schemes", None, || c11_ptas(&instances));
    report.run(12, "nearly sorted inputs", None, c12_nearly_sorted);
    report.run(13, "core oracles and invariants", None, c13_core);
    report.run(14, "bench determinism", None, c14_determinism);
    println!("{} of 14 criteria failed", report.failed);
    if report.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
