//! Acceptance run: one line per criterion. Criteria that cannot be met
//! print FAIL with a pointer to the decisions ledger and do not change
//! the exit status; anything else that fails does.

use std::cell::RefCell;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mqmds::tables::{load_rows, TableRow};
use mqmds::text::parse_code;
use mqmds_core::array::{multiply_oa, MixedLevelArray};
use mqmds_core::code::singleton_bound;
use mqmds_core::combin::subsets;
use mqmds_core::construct::{bush, full_factorial_mixed, hyperoval_oa};
use mqmds_core::scheme::{d3_scheme, d_2s, d_sss, DifferenceScheme};
use mqmds_core::theorems::theorem_s1;
use mqmds_core::verify::{cross_validate, verify_code};
use mqmds_core::{Context, Mode, QuantumCode, DEFAULT_BUDGET};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const LEDGER: &str = "decisions ledger";

enum Verdict {
    Pass(String),
    /// Fails for a documented reason.
    KnownRed(String),
    Fail(String),
}

struct Harness {
    ctx: Context,
    emitted: Vec<(String, QuantumCode)>,
    unexpected: usize,
}

impl Harness {
    fn report(&mut self, n: u32, title: &str, limit: Duration, run: impl FnOnce(&mut Self) -> Verdict) {
        let start = Instant::now();
        let verdict = run(self);
        let took = start.elapsed();
        let slow = took > limit;
        let (word, detail) = match verdict {
            Verdict::Pass(d) if !slow => ("PASS", d),
            Verdict::Pass(d) => {
                self.unexpected += 1;
                ("FAIL", format!("{d}; took {took:.1?}, limit {limit:?}"))
            }
            Verdict::KnownRed(d) => ("FAIL", format!("{d} [known, see {LEDGER}]")),
            Verdict::Fail(d) => {
                self.unexpected += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n}: {word} - {title} ({took:.1?}) - {detail}");
    }

    fn keep(&mut self, tag: String, code: &QuantumCode) {
        self.emitted.push((tag, code.clone()));
    }
}

fn rows_where(pred: impl Fn(&TableRow) -> bool) -> Vec<TableRow> {
    load_rows().expect("expectation data loads").into_iter().filter(|r| pred(r)).collect()
}

fn product(xs: &[u32]) -> u128 {
    xs.iter().map(|&x| x as u128).product()
}

fn criterion_1(h: &mut Harness) -> Verdict {
    let set = [2, 3, 4, 5, 8, 9];
    let rows = rows_where(|r| r.table == "I" && set.contains(&r.s));
    let mut problems = Vec::new();
    for r in &rows {
        let code = match r.build(&h.ctx) {
            Ok(c) => c,
            Err(e) => {
                problems.push(format!("{}: {e}", r.inputs()));
                continue;
            }
        };
        let got = code.params.to_string();
        let m_ok = code.params.m == Some(r.s as u128 - 1);
        let verified = verify_code(&code, 2, Mode::Strict).strict_pass;
        if got != r.expected || !m_ok || !verified {
            problems.push(format!("{}: got {got} m={:?} verified={verified}", r.inputs(), code.params.m));
        }
        h.keep(format!("I {}", r.inputs()), &code);
    }
    if problems.is_empty() {
        Verdict::Pass(format!("{} codes match, m = s-1, strict at d=2", rows.len()))
    } else {
        Verdict::Fail(problems.join("; "))
    }
}

/// Index column with 2s levels next to the lift of D(2s,2s,s).
fn saturated_seed(s: u32) -> MixedLevelArray {
    let (d, _) = d_2s(s, None).expect("D(2s,2s,s) for small prime powers");
    d.lift().attach_index_column(s as usize).expect("2s blocks of s rows")
}

fn criterion_2(_: &mut Harness) -> Verdict {
    let mut problems = Vec::new();
    for s in 2..=5u32 {
        let a = saturated_seed(s);
        let r = a.rows() as u64;
        let predicted = mqmds_core::array::saturated_hd_formula(r, 1, 2 * s as u64, 2 * s as u64, s as u64);
        let md = a.distance_profile().map(|p| p.min_distance);
        let want = 2 * s - 1;
        let ok = a.is_orthogonal_array(2)
            && a.saturation_check()
            && md.as_ref().ok() == Some(&want)
            && predicted.iter().next() == Some(&(want as u64));
        if !ok {
            problems.push(format!("s={s}: MD {md:?}, predicted {predicted:?}"));
        }
    }
    if problems.is_empty() {
        Verdict::Pass("MD = 2s-1 for s = 2..5, equal to the smallest predicted distance".into())
    } else {
        Verdict::Fail(problems.join("; "))
    }
}

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn criterion_3(_: &mut Harness) -> Verdict {
    let cases = [
        ("code_4_12_2.kets", 1, "((4,12,2))_{12^3 2^1}"),
        ("code_5_1_3_12.kets", 2, "((5,1,3))_{12^4 2^1}"),
        ("code_5_1_3_9.kets", 2, "((5,1,3))_{9^4 3^1}"),
        ("code_8_8_3.kets", 2, "((8,8,3))_{4^3 2^5}"),
    ];
    let mut problems = Vec::new();
    for (file, d, want) in cases {
        match parse_code(&fixture(file), d + 1) {
            Ok(code) => {
                let rep = verify_code(&code, d, Mode::Strict);
                if !rep.passed() || code.params.to_string() != want {
                    problems.push(format!("{file}: {} passed={}", code.params, rep.passed()));
                }
            }
            Err(e) => problems.push(format!("{file}: {e}")),
        }
    }
    // A copy of the eight-state code with one state repeated must not pass.
    let printed_fails = parse_code(&fixture("code_8_8_3_repeated_state.kets"), 3)
        .map(|c| !verify_code(&c, 2, Mode::Strict).passed())
        .unwrap_or(false);
    if !printed_fails {
        problems.push("the repeated-state fixture unexpectedly passes".into());
    }
    if problems.is_empty() {
        Verdict::Pass("four fixtures certified; the repeated-state copy is rejected".into())
    } else {
        Verdict::Fail(problems.join("; "))
    }
}

fn criterion_4(h: &mut Harness) -> Verdict {
    let cases = [
        (4, 1, 2, "((3,1,2))_{4^1 2^2}", 1u128),
        (8, 2, 2, "((5,1,3))_{8^3 4^1 2^1}", 1),
        (9, 2, 3, "((5,1,3))_{9^3 3^2}", 2),
        (8, 3, 2, "((7,1,4))_{8^5 4^1 2^1}", 1),
    ];
    let mut problems = Vec::new();
    for (s, d, s1, want, m) in cases {
        match theorem_s1(&h.ctx, s, d, s1) {
            Ok(code) => {
                let verified = verify_code(&code, d, Mode::Strict).strict_pass;
                if code.params.to_string() != want || code.params.m != Some(m) || !verified {
                    problems.push(format!("s={s} d={d} s1={s1}: {} m={:?}", code.params, code.params.m));
                }
                h.keep(format!("spot s={s} d={d} s1={s1}"), &code);
            }
            Err(e) => problems.push(format!("s={s} d={d} s1={s1}: {e}")),
        }
    }
    if problems.is_empty() {
        Verdict::Pass("four spot rows reproduced with m = s1-1".into())
    } else {
        Verdict::Fail(problems.join("; "))
    }
}

fn criterion_5(h: &mut Harness) -> Verdict {
    let mut problems = Vec::new();
    let mut unattainable = Vec::new();
    let mut built = 0;
    let mut corrected = 0;

    let iv = rows_where(|r| r.table == "IV" && r.s == 12 && r.d == Some(1) && r.l == Some(1) && r.q_factors.is_none());
    if iv.len() != 9 {
        problems.push(format!("expected nine first-column rows, found {}", iv.len()));
    }
    let vi = rows_where(|r| {
        r.table == "VI" && [4, 8].contains(&r.s) && matches!(r.l, Some(0 | 1)) && matches!(r.d, Some(1 | 2))
    });
    for r in iv.iter().chain(&vi) {
        let factors = r.factors.clone().unwrap_or_default();
        let l = r.l.unwrap_or(0);
        let closed = (product(&factors) - 1) * (r.s as u128).pow(l);
        match r.build(&h.ctx) {
            Ok(code) => {
                built += 1;
                let got = code.params.to_string();
                let d = code.params.d();
                let verified = verify_code(&code, d, Mode::Strict).strict_pass;
                if got != r.expected || code.params.m != Some(closed) || code.params.k != (r.s as u128).pow(l) || !verified {
                    problems.push(format!("{} {}: got {got} m={:?}, closed form {closed}", r.table, r.inputs(), code.params.m));
                }
                corrected += usize::from(r.status == mqmds::tables::RowStatus::Typo);
                h.keep(format!("{} {}", r.table, r.inputs()), &code);
            }
            // OA(4^3, 7, 4, 3) would exceed the s+2 column limit for strength 3 and even s.
            Err(e) if e.is_ingredient() && r.s == 4 && r.d == Some(2) && l == 1 => {
                unattainable.push(r.inputs());
            }
            Err(e) => problems.push(format!("{} {}: {e}", r.table, r.inputs())),
        }
    }
    if !problems.is_empty() {
        Verdict::Fail(problems.join("; "))
    } else if !unattainable.is_empty() {
        Verdict::KnownRed(format!(
            "{built} rows reproduced ({corrected} against corrected cells); {} rows need an OA(64,7,4,3), which cannot exist: {}",
            unattainable.len(),
            unattainable.join(", ")
        ))
    } else {
        Verdict::Pass(format!("{built} rows reproduced ({corrected} against corrected cells)"))
    }
}

fn schemes() -> Vec<DifferenceScheme> {
    let mut out = Vec::new();
    for s in [2, 3, 4, 5, 7, 8, 9] {
        out.push(d_sss(s).unwrap());
        out.push(d_2s(s, None).unwrap().0);
    }
    for s in 2..=9 {
        out.push(d3_scheme(s).unwrap());
    }
    out
}

fn index_unity() -> Vec<(MixedLevelArray, u32)> {
    let mut out = Vec::new();
    for s in [2, 3, 4, 5, 7, 8, 9] {
        for t in [2, 3] {
            out.push((bush(s, t, DEFAULT_BUDGET).unwrap(), t));
        }
    }
    for s in [2, 4, 8] {
        out.push((hyperoval_oa(s, DEFAULT_BUDGET).unwrap(), 3));
    }
    out
}

fn replacement_pool(s: u32) -> Vec<MixedLevelArray> {
    let mut out = vec![full_factorial_mixed(&[s], 1).unwrap()];
    match s {
        4 => out.push(full_factorial_mixed(&[2, 2], 1).unwrap()),
        8 => {
            out.push(full_factorial_mixed(&[2, 2, 2], 1).unwrap());
            out.push(full_factorial_mixed(&[4, 2], 1).unwrap());
        }
        9 => out.push(bush(3, 2, DEFAULT_BUDGET).unwrap()),
        _ => {}
    }
    out
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config { cases, failure_persistence: None, ..Config::default() }, proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha))
}

fn criterion_6(_: &mut Harness) -> Verdict {
    let mut problems = Vec::new();

    let lifts = schemes();
    for d in &lifts {
        if !d.lift().is_orthogonal_array(d.strength()) {
            problems.push(format!("lift of a {}-row scheme over {} lost strength", d.rows(), d.group().order()));
        }
    }

    let unity = index_unity();
    for (a, t) in &unity {
        if a.min_distance() != Some(a.cols() as u32 - t + 1) {
            problems.push(format!("index-unity OA({},{},{t}) has MD {:?}", a.rows(), a.cols(), a.min_distance()));
        }
    }

    let strategy = (prop::sample::select(vec![4u32, 8, 9]), 1u32..=2, any::<prop::sample::Index>(), any::<prop::sample::Index>());
    let replaced = runner(50).run(&strategy, |(s, t, c, b)| {
        let a = bush(s, t, DEFAULT_BUDGET).unwrap();
        let pool = replacement_pool(s);
        let b = &pool[b.index(pool.len())];
        let out = a.expansive_replacement(c.index(a.cols()), b, DEFAULT_BUDGET).unwrap();
        prop_assert!(out.is_orthogonal_array(t));
        prop_assert_eq!(out.cols(), a.cols() + b.cols() - 1);
        Ok(())
    });
    if let Err(e) = replaced {
        problems.push(format!("expansive replacement: {e}"));
    }

    let mut pool: Vec<MixedLevelArray> =
        [2, 3, 4, 5, 7, 8, 9].iter().map(|&s| bush(s, 2, DEFAULT_BUDGET).unwrap().truncate_columns(3).unwrap()).collect();
    pool.push(full_factorial_mixed(&[2, 3, 2], 1).unwrap().certify(2, DEFAULT_BUDGET).unwrap());
    let mut pairs = 0;
    for a in &pool {
        for b in &pool {
            if a.rows() * b.rows() > 10_000 {
                continue;
            }
            pairs += 1;
            let p = multiply_oa(a, b, u64::MAX).unwrap();
            if !p.is_orthogonal_array(2) || p.min_distance() != a.min_distance().min(b.min_distance()) {
                problems.push(format!("product of OA({}) and OA({})", a.rows(), b.rows()));
            }
        }
    }

    let mut derived = 0;
    let arrays = unity.iter().map(|(a, _)| a.clone()).chain(lifts.iter().map(|d| d.lift()));
    for a in arrays.filter(|a| a.rows() <= 10_000) {
        let t = a.strength();
        if t < 2 {
            continue;
        }
        for col in 0..a.cols() {
            let sub = a.derive_subarray(col, 0, u64::MAX).unwrap();
            derived += 1;
            if sub.strength() + 1 < t {
                problems.push(format!("derived subarray of OA({},{}) at column {col}", a.rows(), a.cols()));
            }
        }
    }

    if problems.is_empty() {
        Verdict::Pass(format!(
            "{} lifts, {} index-unity arrays, 50 replacements, {pairs} products, {derived} derived subarrays",
            lifts.len(),
            unity.len()
        ))
    } else {
        Verdict::Fail(problems.join("; "))
    }
}

fn mutate(code: &QuantumCode, row: usize, col: usize, delta: u32) -> QuantumCode {
    let kets = code.kets();
    let n = kets.cols();
    let mut data = kets.data().to_vec();
    let levels = kets.alphabets()[col];
    data[row * n + col] = (data[row * n + col] + delta) % levels;
    code.with_kets(MixedLevelArray::new(kets.alphabets().to_vec(), data).unwrap()).unwrap()
}

fn criterion_7(h: &mut Harness) -> Verdict {
    let mut problems = Vec::new();
    for (tag, code) in &h.emitted {
        match cross_validate(code) {
            Ok(v) if v.agree() && v.quantum => {}
            Ok(v) => problems.push(format!("{tag}: quantum {} combinatorial {}", v.quantum, v.combinatorial)),
            Err(e) => problems.push(format!("{tag}: {e}")),
        }
    }
    let small: Vec<&QuantumCode> = h.emitted.iter().map(|(_, c)| c).filter(|c| c.kets().rows() <= 1024).collect();
    let mutants = RefCell::new(0);
    let strategy = (any::<prop::sample::Index>(), any::<prop::sample::Index>(), any::<prop::sample::Index>(), 1u32..64);
    let result = runner(20).run(&strategy, |(pick, row, col, delta)| {
        let code = small[pick.index(small.len())];
        let col = col.index(code.kets().cols());
        let levels = code.kets().alphabets()[col];
        let delta = 1 + delta % (levels - 1);
        let bad = mutate(code, row.index(code.kets().rows()), col, delta);
        let v = cross_validate(&bad).unwrap();
        *mutants.borrow_mut() += 1;
        prop_assert!(!v.quantum && !v.combinatorial, "mutant of {} passed an oracle", code.params);
        Ok(())
    });
    if let Err(e) = result {
        problems.push(e.to_string());
    }
    let mutants = mutants.into_inner();
    if mutants < 20 {
        problems.push(format!("only {mutants} mutants ran"));
    }
    if problems.is_empty() {
        Verdict::Pass(format!("{} driver codes agree; {mutants} mutants fail both oracles", h.emitted.len()))
    } else {
        Verdict::Fail(problems.join("; "))
    }
}

fn criterion_8(h: &mut Harness) -> Verdict {
    let outside: Vec<String> = h
        .emitted
        .iter()
        .filter(|(_, c)| !c.params.m_admissible())
        .map(|(tag, c)| format!("{tag} m={} > {}", c.params.m.unwrap_or(0), c.params.admissible_upper.unwrap_or(0)))
        .collect();
    if outside.is_empty() {
        Verdict::Pass(format!("{} codes inside the admissible range", h.emitted.len()))
    } else {
        let shown: Vec<&str> = outside.iter().take(3).map(String::as_str).collect();
        Verdict::KnownRed(format!(
            "{} of {} emitted codes have m above the admissible upper end, e.g. {}",
            outside.len(),
            h.emitted.len(),
            shown.join("; ")
        ))
    }
}

fn brute_singleton(n: usize, d: u32, alphabets: &[u32]) -> u128 {
    subsets(n, n - 2 * d as usize)
        .map(|c| c.iter().map(|&j| alphabets[j] as u128).product())
        .min()
        .unwrap_or(1)
}

fn criterion_9(_: &mut Harness) -> Verdict {
    let geometry =
        (2usize..=10).prop_flat_map(|n| (Just(n), 0..=(n as u32 / 2), prop::collection::vec(2u32..=16, n)));
    let count = RefCell::new(0);
    let result = runner(100).run(&geometry, |(n, d, alphabets)| {
        *count.borrow_mut() += 1;
        prop_assert_eq!(singleton_bound(n, d, &alphabets).unwrap(), brute_singleton(n, d, &alphabets));
        Ok(())
    });
    match result {
        Ok(()) => Verdict::Pass(format!("{} geometries agree with the exhaustive minimum", count.into_inner())),
        Err(e) => Verdict::Fail(e.to_string()),
    }
}

fn main() -> ExitCode {
    let loaded = mqmds::assets::load(mqmds::assets::Source::Embedded).expect("embedded assets");
    let mut h = Harness { ctx: Context::new(loaded.registry), emitted: Vec::new(), unexpected: 0 };
    let secs = Duration::from_secs;
    h.report(1, "Table I reproduction", secs(30), criterion_1);
    h.report(2, "saturated array distance", secs(5), criterion_2);
    h.report(3, "fixture certification", secs(60), criterion_3);
    h.report(4, "Table II/III spot rows", secs(60), criterion_4);
    h.report(5, "Table IV/VI dimension-raising rows", secs(120), criterion_5);
    h.report(6, "lemma-level property suites", secs(180), criterion_6);
    h.report(7, "cross-oracle gate", secs(120), criterion_7);
    h.report(8, "admissible m gate", secs(10), criterion_8);
    h.report(9, "Singleton sanity", secs(10), criterion_9);
    if h.unexpected == 0 {
        println!("acceptance: only documented criteria fail");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} unexpected failures", h.unexpected);
        ExitCode::FAILURE
    }
}
