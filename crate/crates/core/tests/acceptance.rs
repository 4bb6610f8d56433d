//! Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Every comparison is exact unless stated; time limits are
//! wall-clock and pinned below.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;

use omega_bounds::bounds::{
    hybrid_bound, pow2_bound, ramification_bound, trivial_bound, Pow2Strength, RamificationContext,
};
use omega_bounds::factor::FactorConfig;
use omega_bounds::fixtures;
use omega_bounds::line_problem::{
    bucket_counts, cutoff_table, enumerate_candidates, floor_u, intervals, sieve_cascade, Candidate,
};
use omega_bounds::partition::NFactorization;
use omega_bounds::pipeline::{run_line5, run_sums, run_table1, RunConfig, Stage, LINE_DEGREE};
use omega_bounds::sieves::ModifiedForm;
use omega_bounds::sum_problem::{
    exception_pairs, omega_cutoff_check, trivial_grid, witness_grid, CellStatus, Endpoint, WitnessFilter,
    MAX_OMEGA,
};

const LIMIT_GOLDEN: Duration = Duration::from_secs(1);
const LIMIT_SOUNDNESS: Duration = Duration::from_secs(60);
const LIMIT_LEMMAS: Duration = Duration::from_secs(60);
const LIMIT_TABLE1: Duration = Duration::from_secs(600);
const LIMIT_TABLE2: Duration = Duration::from_secs(60);
const LIMIT_TABLE3: Duration = Duration::from_secs(1800);
const LIMIT_TABLE4: Duration = Duration::from_secs(600);
const LIMIT_SUMS: Duration = Duration::from_secs(1800);
const LIMIT_DETERMINISM: Duration = Duration::from_secs(1800);

const SOUNDNESS_X_MAX: u64 = 300;

/// Reference Table 1: n, trivial cutoff, hybrid cutoff, trivial q-max and
/// hybrid q-max as (two-digit mantissa, exponent) or exact, search percent.
#[derive(Clone, Copy)]
enum Printed {
    Exact(u64),
    Sci(u64, u32),
}
use Printed::{Exact, Sci};

const TABLE1: [(u64, usize, usize, Printed, Printed, u64); 29] = [
    (2, 8, 7, Exact(3712), Exact(2040), 55),
    (3, 13, 13, Exact(142862), Exact(142862), 100),
    (4, 18, 18, Sci(12, 6), Sci(12, 6), 100),
    (5, 23, 20, Sci(61, 6), Sci(33, 6), 54),
    (6, 29, 28, Sci(28, 7), Sci(23, 7), 84),
    (7, 34, 26, Sci(90, 7), Sci(24, 7), 27),
    (8, 39, 38, Sci(21, 8), Sci(19, 8), 90),
    (9, 44, 41, Sci(45, 8), Sci(34, 8), 75),
    (10, 49, 43, Sci(90, 8), Sci(52, 8), 58),
    (11, 54, 39, Sci(17, 9), Sci(44, 8), 26),
    (12, 59, 58, Sci(30, 9), Sci(28, 9), 92),
    (13, 64, 45, Sci(53, 9), Sci(11, 9), 21),
    (14, 69, 57, Sci(89, 9), Sci(36, 9), 41),
    (15, 74, 66, Sci(15, 10), Sci(83, 9), 56),
    (16, 80, 79, Sci(26, 10), Sci(24, 10), 93),
    (17, 85, 56, Sci(41, 10), Sci(51, 9), 12),
    (18, 90, 85, Sci(64, 10), Sci(47, 10), 73),
    (19, 95, 62, Sci(91, 10), Sci(10, 10), 11),
    (20, 101, 91, Sci(13, 11), Sci(84, 10), 64),
    (21, 106, 88, Sci(18, 11), Sci(80, 10), 44),
    (22, 111, 83, Sci(25, 11), Sci(62, 10), 25),
    (23, 116, 75, Sci(34, 11), Sci(39, 10), 12),
    (24, 121, 120, Sci(45, 11), Sci(43, 11), 96),
    (25, 126, 103, Sci(60, 11), Sci(23, 11), 38),
    (26, 132, 96, Sci(83, 11), Sci(18, 11), 22),
    (27, 137, 124, Sci(11, 12), Sci(65, 11), 59),
    (28, 142, 119, Sci(14, 12), Sci(57, 11), 40),
    (29, 148, 93, Sci(20, 12), Sci(20, 11), 10),
    (30, 153, 138, Sci(26, 12), Sci(14, 12), 55),
];

/// Reference Table 2: ω_5, lower, upper.
const TABLE2: [(usize, u64, u64); 20] = [
    (20, 2_160_476, 3_336_768),
    (19, 881_791, 2_689_898),
    (18, 397_068, 2_150_020),
    (17, 132_575, 1_696_702),
    (16, 46_411, 1_327_972),
    (15, 25_794, 1_022_189),
    (14, 9023, 771_455),
    (13, 3190, 571_449),
    (12, 1910, 397_505),
    (11, 701, 260_365),
    (10, 265, 164_401),
    (9, 179, 101_825),
    (8, 72, 59_399),
    (7, 31, 32_641),
    (6, 22, 16_925),
    (5, 10, 7834),
    (4, 7, 3175),
    (3, 4, 1024),
    (2, 3, 256),
    (1, 2, 64),
];

/// Reference Table 3 rows (ω_5, count) and total.
const TABLE3: [(usize, usize); 14] = [
    (14, 1),
    (13, 5),
    (12, 19),
    (11, 72),
    (10, 214),
    (9, 438),
    (8, 683),
    (7, 763),
    (6, 625),
    (5, 303),
    (4, 68),
    (3, 22),
    (2, 2),
    (1, 1),
];
const TABLE3_TOTAL: usize = 3215;

/// Reference Table 4 rows: ω_5, prime, modified, general.
const TABLE4: [(usize, usize, usize, usize); 14] = [
    (14, 0, 0, 0),
    (13, 0, 0, 0),
    (12, 1, 1, 1),
    (11, 10, 10, 10),
    (10, 25, 19, 18),
    (9, 48, 37, 35),
    (8, 143, 112, 111),
    (7, 189, 144, 144),
    (6, 197, 161, 161),
    (5, 136, 115, 115),
    (4, 42, 33, 33),
    (3, 22, 16, 16),
    (2, 2, 2, 2),
    (1, 1, 1, 1),
];
const TABLE4_TOTALS: (usize, usize, usize) = (816, 651, 647);
const E5_LEN: usize = 647;
const E5_MAX: u64 = 62791;

struct Outcome {
    problems: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            problems: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.problems.push(what());
        }
    }
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn nf(n: u64) -> NFactorization {
    NFactorization::of(n).expect("valid n")
}

fn golden() -> Outcome {
    let mut o = Outcome::new();
    let mut eq = |label: &str, got: BigUint, want: u64| {
        o.expect(got == big(want), || format!("{label}: expected {want}, got {got}"));
    };
    let n3 = nf(3);
    eq("trivial(3,10)", trivial_bound(&n3, 10).unwrap().bound, 1864);
    eq("hybrid(3,10)", hybrid_bound(&n3, 10).unwrap().bound, 3032);
    for (divides, want) in [(true, 4387), (false, 5423)] {
        let ctx = RamificationContext::new(&n3, 3, divides).unwrap();
        eq(
            &format!("ram(3,10,3 divides={divides})"),
            ramification_bound(&n3, 10, &ctx).unwrap().bound,
            want,
        );
    }
    eq("trivial(3,6)", trivial_bound(&n3, 6).unwrap().bound, 32);
    eq("hybrid(3,6)", hybrid_bound(&n3, 6).unwrap().bound, 38);
    eq("trivial(8,20)", trivial_bound(&nf(8), 20).unwrap().bound, 2205);
    eq("pow2(8,20)", pow2_bound(3, 20, Pow2Strength::Full).unwrap().bound, 3118);
    for a in 1..=3u32 {
        let n = nf(1 << a);
        for w in 1..=12 {
            let t = trivial_bound(&n, w).unwrap().bound;
            let h = hybrid_bound(&n, w).unwrap().bound;
            o.expect(t == h, || format!("hybrid({}, {w}) = {h} but trivial = {t}", 1u64 << a));
        }
    }
    o
}

fn tally_outcome(o: &mut Outcome, label: &str, t: &common::Tally) {
    o.notes.push(format!("{label}: {} checks", t.checks));
    o.expect(t.ok(), || format!("{label}: {} violations, e.g. {:?}", t.failures, t.examples));
}

fn soundness() -> Outcome {
    let mut o = Outcome::new();
    let t = common::soundness_suite(SOUNDNESS_X_MAX);
    tally_outcome(&mut o, "bound variants", &t);
    o
}

fn lemmas() -> Outcome {
    let mut o = Outcome::new();
    for (label, t) in common::lemma_suite() {
        tally_outcome(&mut o, label, &t);
    }
    o
}

/// Rounds to two significant figures, half up, as (mantissa, exponent).
fn two_figures(v: &BigUint) -> (u64, u32) {
    let digits = v.to_string().len() as u32;
    if digits <= 2 {
        return (v.try_into().unwrap(), 0);
    }
    let scale = big(10).pow(digits - 2);
    let (q, r) = v.div_rem(&scale);
    let mut m: u64 = (&q).try_into().unwrap();
    if r * 2u32 >= scale {
        m += 1;
    }
    let mut e = digits - 1;
    if m == 100 {
        m = 10;
        e += 1;
    }
    (m, e)
}

fn printed_matches(p: Printed, v: &BigUint) -> bool {
    match p {
        Exact(x) => *v == big(x),
        Sci(m, e) => two_figures(v) == (m, e),
    }
}

fn table1() -> Outcome {
    let mut o = Outcome::new();
    let rows = cutoff_table(2..=30).expect("cutoff table");
    o.expect(rows.len() == TABLE1.len(), || format!("{} rows", rows.len()));
    for (row, &(n, tc, hc, tq, hq, pct)) in rows.iter().zip(TABLE1.iter()) {
        o.expect(row.n == n, || format!("row order: got n={}", row.n));
        o.expect(row.trivial_cutoff == tc && row.hybrid_cutoff == hc, || {
            format!("n={n}: cutoffs {} / {}, expected {tc} / {hc}", row.trivial_cutoff, row.hybrid_cutoff)
        });
        let (t, h) = (floor_u(&row.trivial_qmax), floor_u(&row.hybrid_qmax));
        o.expect(printed_matches(tq, &t) && printed_matches(hq, &h), || {
            format!("n={n}: q-max {t} / {h} do not round to the printed values")
        });
        o.expect(row.search_percent() == pct, || {
            format!("n={n}: search space {}%, expected {pct}%", row.search_percent())
        });
    }
    o
}

fn table2() -> Outcome {
    let mut o = Outcome::new();
    let rows = intervals(LINE_DEGREE).expect("intervals");
    let by_omega: BTreeMap<usize, (u64, u64)> = rows.iter().map(|r| (r.omega, (r.lower, r.upper))).collect();
    o.expect(rows.len() == TABLE2.len(), || format!("{} interval rows, expected 20", rows.len()));
    let mut off_by_one = 0;
    for &(w, lo, hi) in &TABLE2 {
        let Some(&(l, u)) = by_omega.get(&w) else {
            o.problems.push(format!("ω={w}: missing"));
            continue;
        };
        if l.abs_diff(lo) == 1 {
            off_by_one += 1;
            o.notes.push(format!("ω={w}: lower endpoint {l} vs printed {lo} (±1)"));
        }
        o.expect(l == lo, || format!("ω={w}: lower {l}, expected {lo}"));
        o.expect(u == hi, || format!("ω={w}: upper {u}, expected {hi}"));
    }
    o.notes.push(format!("±1 lower-endpoint discrepancies: {off_by_one}"));
    o
}

fn candidates() -> Vec<Candidate> {
    let rows = intervals(LINE_DEGREE).expect("intervals");
    enumerate_candidates(LINE_DEGREE, &rows, &FactorConfig::default()).expect("enumeration")
}

fn table3(cands: &[Candidate]) -> Outcome {
    let mut o = Outcome::new();
    let counts: BTreeMap<usize, usize> = bucket_counts(cands, 20).into_iter().collect();
    for &(w, want) in &TABLE3 {
        let got = counts.get(&w).copied().unwrap_or(0);
        o.expect(got == want, || format!("ω={w}: {got} candidates, expected {want}"));
    }
    for w in 15..=20 {
        let got = counts.get(&w).copied().unwrap_or(0);
        o.expect(got == 0, || format!("ω={w}: bucket not empty ({got})"));
    }
    o.expect(cands.len() == TABLE3_TOTAL, || {
        let rows: usize = TABLE3.iter().map(|r| r.1).sum();
        format!(
            "total {} candidates, expected {TABLE3_TOTAL} (the reference rows themselves sum to {rows})",
            cands.len()
        )
    });
    o
}

fn table4(cands: &[Candidate]) -> Outcome {
    let mut o = Outcome::new();
    let cascade = sieve_cascade(LINE_DEGREE, cands, 20, ModifiedForm::default());
    let rows: BTreeMap<usize, (usize, usize, usize)> =
        cascade.rows.iter().map(|r| (r.omega, (r.prime, r.modified, r.general))).collect();
    for &(w, p, m, g) in &TABLE4 {
        let got = rows.get(&w).copied().unwrap_or((0, 0, 0));
        o.expect(got == (p, m, g), || format!("ω={w}: {got:?}, expected {:?}", (p, m, g)));
    }
    let totals = cascade.totals();
    o.expect(totals == TABLE4_TOTALS, || format!("totals {totals:?}, expected {TABLE4_TOTALS:?}"));
    let e5 = cascade.exceptions();
    let fixture = fixtures::e5().expect("e5 fixture");
    o.expect(fixture.len() == E5_LEN && fixture.last() == Some(&E5_MAX), || {
        "E5 fixture is not 647 entries ending at 62791".into()
    });
    o.expect(e5 == fixture.as_slice(), || {
        let extra: Vec<_> = e5.iter().filter(|q| !fixture.contains(q)).collect();
        let missing: Vec<_> = fixture.iter().filter(|q| !e5.contains(q)).collect();
        format!("E5 differs: extra {extra:?}, missing {missing:?}")
    });
    o
}

fn sums() -> Outcome {
    let mut o = Outcome::new();
    o.expect(omega_cutoff_check(15), || "cutoff check false at ω = 15".into());
    o.expect(!omega_cutoff_check(16), || "cutoff check true at ω = 16".into());

    let trivial = trivial_grid().expect("trivial grid");
    let hybrid = witness_grid(Endpoint::Open, &FactorConfig::default()).expect("witness grid");
    let nonempty = |cells: &[omega_bounds::sum_problem::GridCell]| -> Vec<(u64, usize)> {
        cells
            .iter()
            .filter(|c| c.status != CellStatus::Empty)
            .map(|c| (c.n, c.omega))
            .collect()
    };
    let t_cells = nonempty(&trivial);
    let h_cells = nonempty(&hybrid);
    let pairs = exception_pairs(&hybrid, WitnessFilter::Unrestricted);
    o.notes.push(format!(
        "non-empty cells: trivial {}, hybrid {}; exception pairs {}",
        t_cells.len(),
        h_cells.len(),
        pairs.len()
    ));
    o.expect(h_cells.iter().all(|c| t_cells.contains(c)), || "hybrid grid not inside trivial grid".into());
    o.expect(pairs.iter().all(|c| h_cells.contains(c)), || "exception pairs not inside hybrid grid".into());
    o.expect(pairs.iter().all(|&(n, w)| n <= 4 * w as u64 && w <= MAX_OMEGA), || {
        "a pair violates n ≤ 4ω or ω ≤ 15".into()
    });
    let fixture = fixtures::eu_pairs().expect("pair fixture");
    o.expect(pairs == fixture, || {
        let extra: Vec<_> = pairs.iter().filter(|p| !fixture.contains(p)).collect();
        let missing: Vec<_> = fixture.iter().filter(|p| !pairs.contains(p)).collect();
        format!(
            "{} pairs vs {} in the fixture: extra {extra:?}, missing {missing:?}",
            pairs.len(),
            fixture.len()
        )
    });
    o
}

fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Runs line5, the sum pipeline and a short Table 1 into `dir`; returns the
/// names of fixtures that did not match.
fn full_run(dir: &Path) -> Vec<String> {
    let mut cfg = RunConfig::new(dir);
    cfg.checkpoint_dir = dir.join("checkpoints");
    let mut mismatched = Vec::new();
    let line = run_line5(&cfg, Stage::All).expect("line5");
    let sums = run_sums(&cfg, true, true).expect("sums").manifest;
    for m in [&line, &sums] {
        for (name, diff) in &m.fixture_diffs {
            if !diff.is_empty() {
                mismatched.push(name.clone());
            }
        }
    }
    let mut t1 = RunConfig::new(dir.join("table1"));
    t1.checkpoint_dir = dir.join("table1").join("checkpoints");
    run_table1(&t1, 2..=8).expect("table1");
    mismatched
}

fn determinism() -> Outcome {
    let mut o = Outcome::new();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = full_run(a.path());
    let mb = full_run(b.path());
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    o.notes.push(format!("{} files compared", ta.len()));
    o.expect(ta.keys().eq(tb.keys()), || "the runs wrote different file sets".into());
    for (path, bytes) in &ta {
        if let Some(other) = tb.get(path) {
            o.expect(bytes == other, || format!("{} differs between runs", path.display()));
        }
    }
    o.expect(ma.is_empty() && mb.is_empty(), || {
        format!("fixture_diffs not empty: run 1 {ma:?}, run 2 {mb:?}")
    });
    o
}

fn report(id: u32, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if elapsed > limit {
        o.problems.push(format!("took {:.1} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs()));
    }
    let pass = o.problems.is_empty();
    println!(
        "{} [{id}] {title} ({:.2} s, limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    for n in &o.notes {
        println!("       {n}");
    }
    for p in &o.problems {
        println!("     - {p}");
    }
    pass
}

fn main() -> ExitCode {
    // `cargo test -- --list` and similar probes should not run the suite.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    println!("acceptance suite");
    let mut results = Vec::new();
    results.push(report(1, "golden bound values", LIMIT_GOLDEN, golden));
    results.push(report(2, "soundness against brute-force ω", LIMIT_SOUNDNESS, soundness));
    results.push(report(3, "lemma oracles", LIMIT_LEMMAS, lemmas));
    results.push(report(4, "Table 1 cutoffs and q-ranges, n = 2..30", LIMIT_TABLE1, table1));
    results.push(report(5, "Table 2 intervals for n = 5", LIMIT_TABLE2, table2));

    let mut cands = Vec::new();
    results.push(report(6, "Table 3 candidate counts", LIMIT_TABLE3, || {
        cands = candidates();
        table3(&cands)
    }));
    results.push(report(7, "Table 4 sieve cascade and E5", LIMIT_TABLE4, || table4(&cands)));
    results.push(report(8, "primitive-sum exception pairs", LIMIT_SUMS, sums));
    results.push(report(9, "determinism of full pipeline runs", LIMIT_DETERMINISM, determinism));

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
