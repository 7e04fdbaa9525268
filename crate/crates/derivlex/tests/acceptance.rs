//! Acceptance criteria 1 to 11. Prints one PASS or FAIL line per criterion
//! and exits non-zero if any fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::rc::Rc;
use std::time::Instant;

use derivlex::bench::{tokenize_counted, Suite};
use derivlex::output::token_tsv;
use derivlex::{load_ir, load_spec, save_ir};
use derivlex_core::oracle::{
    oracle_l_score, oracle_matches, oracle_s_score, random_regexp, random_string, ALPHABET,
};
use derivlex_core::regex::Kind;
use derivlex_core::score::{l_score_fast, prefix, s_score_fast};
use derivlex_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_0000 + criterion)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn spec_text(name: &str) -> String {
    fs::read_to_string(specs().join(name)).unwrap()
}

fn brzozowski() -> Outcome {
    let mut rng = rng(1);
    for i in 0..10_000 {
        let r = random_regexp(&mut rng, 4);
        let s = random_string(&mut rng, 12);
        check(matches(&r, &s) == oracle_matches(&r, &s), || {
            format!("pair {i}: r = {r}, s = {:?}", String::from_utf8_lossy(&s))
        })?;
    }
    Ok("10000 pairs, 0 counterexamples".into())
}

fn l_theorems(r: &Regexp, s: &[u8]) -> Result<(), String> {
    let got = l_score(r, s);
    check(got == oracle_l_score(r, s), || {
        "l_score differs from oracle".into()
    })?;
    match got {
        LScore::Len(n) => {
            check(n <= s.len(), || "L1".into())?;
            check(oracle_matches(r, prefix(s, n)), || "L2".into())?;
            check(
                (n + 1..=s.len()).all(|m| !oracle_matches(r, prefix(s, m))),
                || "L3".into(),
            )
        }
        LScore::NoMatch => check(
            (0..=s.len()).all(|m| !oracle_matches(r, prefix(s, m))),
            || "L4".into(),
        ),
    }
}

fn s_theorems(r: &Regexp, s: &[u8]) -> Result<(), String> {
    let got = s_score(r, s);
    check(got == oracle_s_score(r, s), || {
        "s_score differs from oracle".into()
    })?;
    match got {
        SScore::Len(n) => {
            check(n <= s.len(), || "S1".into())?;
            check(oracle_matches(r, prefix(s, n)), || "S2".into())?;
            check((0..n).all(|m| !oracle_matches(r, prefix(s, m))), || {
                "S3".into()
            })
        }
        SScore::NoMatch => check(
            (0..=s.len()).all(|m| !oracle_matches(r, prefix(s, m))),
            || "S4".into(),
        ),
    }
}

fn score_theorems() -> Outcome {
    let mut rng = rng(2);
    for i in 0..5_000 {
        let r = random_regexp(&mut rng, 4);
        let s = random_string(&mut rng, 12);
        l_theorems(&r, &s).map_err(|law| format!("{law} fails at pair {i}: r = {r}"))?;
    }
    for i in 0..5_000 {
        let r = random_regexp(&mut rng, 4);
        let s = random_string(&mut rng, 12);
        s_theorems(&r, &s).map_err(|law| format!("{law} fails at pair {i}: r = {r}"))?;
    }
    Ok("5000 pairs for each of L1-L4 and S1-S4".into())
}

fn rule_list(rng: &mut ChaCha8Rng) -> Vec<RegexpRule> {
    let n = rng.gen_range(0..=5);
    (0..n)
        .map(|i| RegexpRule {
            pattern: random_regexp(rng, 3),
            action: ActionRef(i),
        })
        .collect()
}

fn prepended(head: Regexp, rules: &[RegexpRule]) -> Vec<RegexpRule> {
    let mut out = vec![RegexpRule {
        pattern: head,
        action: ActionRef(99),
    }];
    out.extend(rules.iter().cloned());
    out
}

fn head_wins(e: Election<'_, '_>, n: usize) -> bool {
    matches!(e, Election::ReChoice { rule, len, .. } if rule.action == ActionRef(99) && len == n)
}

fn elector_laws() -> Outcome {
    let mut rng = rng(3);
    let mut ties = 0;
    for i in 0..2_000 {
        let rules = rule_list(&mut rng);
        let s = random_string(&mut rng, 8);
        let fail = |law: &str| format!("{law} fails at case {i}");
        match elect_longest(&rules, &s) {
            Election::NotSelected => check(
                rules
                    .iter()
                    .all(|r| oracle_l_score(&r.pattern, &s) == LScore::NoMatch),
                || fail("EL1"),
            )?,
            Election::ReChoice { len, .. } => {
                check(
                    rules.iter().all(|r| match oracle_l_score(&r.pattern, &s) {
                        LScore::Len(m) => m <= len,
                        LScore::NoMatch => true,
                    }),
                    || fail("EL2"),
                )?;
                // A literal of the winning prefix scores exactly `len`, and so
                // may a random head.
                let random = random_regexp(&mut rng, 3);
                for head in [Regexp::literal(prefix(&s, len)), random] {
                    if oracle_l_score(&head, &s) == LScore::Len(len) {
                        ties += 1;
                        check(
                            head_wins(elect_longest(&prepended(head, &rules), &s), len),
                            || fail("EL3"),
                        )?;
                    }
                }
            }
            Election::FnChoice(_) => return Err(fail("EL")),
        }
        match elect_shortest(&rules, &s) {
            Election::NotSelected => check(
                rules
                    .iter()
                    .all(|r| oracle_s_score(&r.pattern, &s) == SScore::NoMatch),
                || fail("ES1"),
            )?,
            Election::ReChoice { len, .. } => {
                check(
                    rules.iter().all(|r| match oracle_s_score(&r.pattern, &s) {
                        SScore::Len(m) => m >= len,
                        SScore::NoMatch => true,
                    }),
                    || fail("ES2"),
                )?;
                let random = random_regexp(&mut rng, 3);
                for head in [Regexp::literal(prefix(&s, len)), random] {
                    if oracle_s_score(&head, &s) == SScore::Len(len) {
                        ties += 1;
                        check(
                            head_wins(elect_shortest(&prepended(head, &rules), &s), len),
                            || fail("ES3"),
                        )?;
                    }
                }
            }
            Election::FnChoice(_) => return Err(fail("ES")),
        }
    }
    Ok(format!("2000 rule lists, {ties} prepend-tie checks"))
}

fn optimization_equivalence() -> Outcome {
    let mut rng = rng(4);
    for i in 0..10_000 {
        let r = random_regexp(&mut rng, 4);
        let s = random_string(&mut rng, 12);
        let l = l_score_fast(&r, &s);
        let sh = s_score_fast(&r, &s);
        check(
            l.score == l_score(&r, &s)
                && sh.score == s_score(&r, &s)
                && [l.lexeme, l.remaining].concat() == s
                && [sh.lexeme, sh.remaining].concat() == s
                && l.lexeme.len() == l.score.len().unwrap_or(0)
                && sh.lexeme.len() == sh.score.len().unwrap_or(0),
            || format!("FAST-EQ fails at pair {i}: r = {r}"),
        )?;
    }
    let table = Suite::Json.table();
    for n in [1024, 4096, 16384] {
        let input = Suite::Json.input(n);
        let (fast, fr) = tokenize_counted(&table, &input, ScoreMode::Fast);
        let (naive, nr) = tokenize_counted(&table, &input, ScoreMode::Naive);
        check(fast.halt.is_eof(), || format!("json {n}: {:?}", fast.halt))?;
        check(
            fast.tokens == naive.tokens && fast.halt == naive.halt,
            || format!("json {n}: naive and fast streams differ"),
        )?;
        check(fr <= nr, || {
            format!("json {n}: fast read {fr} > naive {nr}")
        })?;
    }
    Ok("10000 pairs; json 1k/4k/16k streams identical".into())
}

/// Exact languages over all strings of length at most [`MAX_LEN`] on
/// [`ALPHABET`], computed from the set semantics of each constructor.
const MAX_LEN: usize = 8;

struct Strings {
    /// `offset[k]` is the index of the first string of length `k`.
    offset: Vec<usize>,
    total: usize,
    /// Languages of nodes already evaluated, keyed by node identity.
    cache: Vec<(Regexp, Rc<Vec<bool>>)>,
}

impl Strings {
    fn new() -> Self {
        let mut offset = Vec::new();
        let mut total = 0;
        for k in 0..=MAX_LEN {
            offset.push(total);
            total += 4usize.pow(k as u32);
        }
        Strings {
            offset,
            total,
            cache: Vec::new(),
        }
    }

    fn index(&self, len: usize, code: usize) -> usize {
        self.offset[len] + code
    }

    fn eval(&mut self, r: &Regexp) -> Rc<Vec<bool>> {
        if let Some((_, v)) = self.cache.iter().find(|(n, _)| Regexp::ptr_eq(n, r)) {
            return v.clone();
        }
        let v = Rc::new(self.eval_node(r));
        self.cache.push((r.clone(), v.clone()));
        v
    }

    fn eval_node(&mut self, r: &Regexp) -> Vec<bool> {
        let single = |ok: &dyn Fn(u8) -> bool| {
            let mut v = vec![false; self.total];
            for (i, &c) in ALPHABET.iter().enumerate() {
                v[self.index(1, i)] = ok(c);
            }
            v
        };
        match r.kind() {
            Kind::Empty => vec![false; self.total],
            Kind::Epsilon => {
                let mut v = vec![false; self.total];
                v[0] = true;
                v
            }
            Kind::Sym(a) => single(&|c| c == a.0),
            Kind::NotSym(a) => single(&|c| c != a.0),
            Kind::Wildcard => single(&|_| true),
            Kind::Range(lo, hi) => single(&|c| Symbol(c).within(*lo, *hi)),
            Kind::NotRange(lo, hi) => single(&|c| !Symbol(c).within(*lo, *hi)),
            Kind::Alt(a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                a.iter().zip(b.iter()).map(|(x, y)| *x || *y).collect()
            }
            Kind::Diff(a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                a.iter().zip(b.iter()).map(|(x, y)| *x && !*y).collect()
            }
            Kind::Cat(a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                self.concat(&a, &b)
            }
            Kind::Star(e) => {
                let e = self.eval(e);
                let mut v = vec![false; self.total];
                for len in 0..=MAX_LEN {
                    for code in 0..4usize.pow(len as u32) {
                        v[self.index(len, code)] = len == 0
                            || (1..=len).any(|k| {
                                let (head, tail) = self.split(len, code, k);
                                e[head] && v[tail]
                            });
                    }
                }
                v
            }
        }
    }

    fn string(len: usize, code: usize) -> Vec<u8> {
        (0..len)
            .rev()
            .map(|i| ALPHABET[(code >> (2 * i)) & 3])
            .collect()
    }

    /// Indices of the first `k` symbols and of the rest.
    fn split(&self, len: usize, code: usize, k: usize) -> (usize, usize) {
        let rest = len - k;
        let head = code >> (2 * rest);
        let tail = code & ((1 << (2 * rest)) - 1);
        (self.index(k, head), self.index(rest, tail))
    }

    fn concat(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        let mut v = vec![false; self.total];
        for len in 0..=MAX_LEN {
            for code in 0..4usize.pow(len as u32) {
                v[self.index(len, code)] = (0..=len).any(|k| {
                    let (head, tail) = self.split(len, code, k);
                    a[head] && b[tail]
                });
            }
        }
        v
    }
}

fn simplification_soundness() -> Outcome {
    let mut strings = Strings::new();
    let mut rng = rng(5);
    let empty = Regexp::empty;
    let eps = Regexp::epsilon;
    let mut derive_checks = 0;
    for i in 0..1_000 {
        let r = random_regexp(&mut rng, 3);
        let star = Regexp::star(r.clone());
        strings.cache.clear();
        if i < 50 {
            let bits = strings.eval(&r);
            for len in 0..=5 {
                for code in 0..4usize.pow(len as u32) {
                    let w = Strings::string(len, code);
                    check(
                        bits[strings.index(len, code)] == oracle_matches(&r, &w),
                        || format!("set evaluator disagrees with the oracle on r = {r}"),
                    )?;
                }
            }
        }
        // (smart constructor result, plain counterpart, identity right side)
        let identities: [(&str, Regexp, Regexp, Regexp); 12] = [
            (
                "r + ∅",
                simp_alt(r.clone(), empty()),
                Regexp::alt(r.clone(), empty()),
                r.clone(),
            ),
            (
                "∅ + r",
                simp_alt(empty(), r.clone()),
                Regexp::alt(empty(), r.clone()),
                r.clone(),
            ),
            (
                "r · ∅",
                simp_cat(r.clone(), empty()),
                Regexp::cat(r.clone(), empty()),
                empty(),
            ),
            (
                "∅ · r",
                simp_cat(empty(), r.clone()),
                Regexp::cat(empty(), r.clone()),
                empty(),
            ),
            (
                "r · ε",
                simp_cat(r.clone(), eps()),
                Regexp::cat(r.clone(), eps()),
                r.clone(),
            ),
            (
                "ε · r",
                simp_cat(eps(), r.clone()),
                Regexp::cat(eps(), r.clone()),
                r.clone(),
            ),
            (
                "r* · r*",
                simp_cat(star.clone(), star.clone()),
                Regexp::cat(star.clone(), star.clone()),
                star.clone(),
            ),
            ("∅*", simp_star(empty()), Regexp::star(empty()), eps()),
            (
                "(r*)*",
                simp_star(star.clone()),
                Regexp::star(star.clone()),
                star.clone(),
            ),
            ("ε*", simp_star(eps()), Regexp::star(eps()), eps()),
            (
                "r − ∅",
                simp_diff(r.clone(), empty()),
                Regexp::diff(r.clone(), empty()),
                r.clone(),
            ),
            (
                "∅ − r",
                simp_diff(empty(), r.clone()),
                Regexp::diff(empty(), r.clone()),
                empty(),
            ),
        ];
        for (name, smart, plain, rhs) in identities {
            let want = strings.eval(&plain);
            check(
                strings.eval(&rhs) == want && strings.eval(&smart) == want,
                || format!("identity {name} fails for component {i}: r = {r}"),
            )?;
        }
        for &c in ALPHABET {
            let simp = simp_derive(&r, Symbol(c));
            let plain = derive(&r, Symbol(c));
            check(simp.size() <= plain.size(), || {
                format!(
                    "size(simp_derive) > size(derive) for r = {r}, c = {}",
                    c as char
                )
            })?;
            derive_checks += 1;
        }
    }
    Ok(format!(
        "12 identities x 1000 components on {} strings; {derive_checks} size checks",
        strings.total
    ))
}

fn worked_example() -> Outcome {
    let a = Regexp::sym(b'a');
    let got = l_score(&Regexp::star(a.clone()), b"aabaaaa");
    check(got == LScore::Len(2), || {
        format!("l_score(a*, aabaaaa) = {got:?}")
    })?;
    let got = l_score(&a, b"bac");
    check(got == LScore::NoMatch, || {
        format!("l_score(a, bac) = {got:?}")
    })?;
    Ok("l_score(a*, \"aabaaaa\") = Len 2, l_score(a, \"bac\") = NoMatch".into())
}

fn first_kind(table: &LexerTable, input: &[u8], fuel: u64) -> Result<String, String> {
    match Runner::new(table).run_step(LexerId(0), fuel, Lexbuf::new(input), Storage::new()) {
        LexOutcome::Success { token, .. } => Ok(table.kind_name(token.kind).to_string()),
        other => Err(format!("{other:?}")),
    }
}

fn looping_lexer() -> Outcome {
    let start = Instant::now();
    let t = load_spec(&spec_text("looping.vl")).map_err(|e| e.to_string())?;
    check(
        first_kind(&t, b"baab", DEFAULT_FUEL).as_deref() == Ok("0"),
        || "\"baab\" does not give token 0".into(),
    )?;
    check(
        first_kind(&t, b"", DEFAULT_FUEL).as_deref() == Ok("1"),
        || "\"\" does not give token 1".into(),
    )?;
    for input in [&b"c"[..], b"ca", b"xaaa"] {
        for fuel in [1, 10, 1000, 1_000_000] {
            let out =
                Runner::new(&t).run_step(LexerId(0), fuel, Lexbuf::new(input), Storage::new());
            check(matches!(out, LexOutcome::NoFuel(_)), || {
                format!(
                    "{:?} with fuel {fuel}: {out:?}",
                    String::from_utf8_lossy(input)
                )
            })?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 5.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "token 0, token 1 and NoFuel at every fuel ({secs:.2}s)"
    ))
}

fn minical_end_to_end() -> Outcome {
    let t = load_spec(&spec_text("minical.vl")).map_err(|e| e.to_string())?;
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let input = fs::read(golden.join("minical_calc.txt")).unwrap();
    let s = Runner::new(&t).tokenize_all(LexerId(0), &input, DEFAULT_FUEL, Storage::new());
    check(s.halt.is_eof(), || format!("{:?}", s.halt))?;
    let got: String = s.tokens.iter().map(|x| token_tsv(&t, x) + "\n").collect();
    let want = fs::read_to_string(golden.join("minical_calc.tsv")).unwrap();
    check(got == want, || format!("got\n{got}"))?;
    Ok("x+(22*y) matches the golden token stream".into())
}

fn ratios(suite: Suite, mode: ScoreMode, sizes: &[usize]) -> Vec<f64> {
    let table = suite.table();
    let reads: Vec<u64> = sizes
        .iter()
        .map(|&n| tokenize_counted(&table, &suite.input(n), mode).1)
        .collect();
    reads
        .windows(2)
        .map(|w| w[1] as f64 / w[0] as f64)
        .collect()
}

fn scaling_shape() -> Outcome {
    let start = Instant::now();
    let sizes = [8192, 16384, 32768];
    let json = ratios(Suite::Json, ScoreMode::Fast, &sizes);
    let adv_naive = ratios(Suite::Adversarial, ScoreMode::Naive, &sizes);
    let adv_fast = ratios(Suite::Adversarial, ScoreMode::Fast, &sizes);
    let summary =
        format!("json fast {json:.3?}, adversarial naive {adv_naive:.3?}, fast {adv_fast:.3?}");
    check(json.iter().all(|r| (1.8..=2.2).contains(r)), || {
        summary.clone()
    })?;
    check(adv_naive.iter().all(|r| *r >= 3.5), || summary.clone())?;
    check(adv_fast.iter().all(|r| *r <= 2.5), || summary.clone())?;
    let secs = start.elapsed().as_secs_f64();
    check(secs < 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{summary} ({secs:.1}s)"))
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_derivlex"))
        .args(args)
        .output()
        .expect("derivlex runs")
}

fn defaults() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = dir.path().join("chain.vl");
    fs::write(
        &spec,
        "{ %token E %eof E }\nrule m = parse 'a' { m } | eof { ret E }\n",
    )
    .unwrap();
    let spec = spec.to_str().unwrap();
    let input = |n: usize| {
        let p = dir.path().join(format!("a{n}.txt"));
        fs::write(&p, vec![b'a'; n]).unwrap();
        p.display().to_string()
    };
    let (under, over) = (input(999_999), input(1_000_000));
    let o = cli(&["run", spec, &under]);
    check(o.status.code() == Some(0), || {
        "999 999 calls did not fit the default fuel".into()
    })?;
    let o = cli(&["run", spec, &over]);
    check(
        o.status.code() == Some(3) && o.stderr.starts_with(b"ERROR\tNoFuel"),
        || "1 000 000 calls did not exhaust the default fuel".into(),
    )?;
    let calc = dir.path().join("calc.txt");
    fs::write(&calc, "x+1").unwrap();
    let ir = specs().join("minical.ir");
    let o = cli(&[
        "run",
        ir.to_str().unwrap(),
        calc.to_str().unwrap(),
        "-fuel",
        "0",
    ]);
    check(
        o.status.code() == Some(3) && o.stdout.is_empty() && o.stderr.starts_with(b"ERROR\tNoFuel"),
        || "-fuel 0 did not fail immediately".into(),
    )?;
    Ok("default fuel 1000000; -fuel 0 gives NoFuel before any token".into())
}

fn ir_round_trip() -> Outcome {
    let tables = [
        ("minical", load_spec(&spec_text("minical.vl"))),
        ("json", load_spec(&spec_text("json.vl"))),
        ("looping", load_spec(&spec_text("looping.vl"))),
    ];
    for (name, t) in tables {
        let t = t.map_err(|e| format!("{name}: {e}"))?;
        let back = load_ir(&save_ir(&t)).map_err(|e| format!("{name}: {e}"))?;
        check(back == t, || format!("{name}: load_ir(save_ir(t)) != t"))?;
    }
    let vl = specs().join("minical.vl");
    let first = cli(&["gen", vl.to_str().unwrap()]);
    let second = cli(&["gen", vl.to_str().unwrap()]);
    let golden = fs::read(specs().join("minical.ir")).unwrap();
    check(
        first.status.success() && first.stdout == second.stdout,
        || "two gen runs differ".into(),
    )?;
    check(first.stdout == golden, || {
        "gen output differs from the golden IR".into()
    })?;
    Ok("minical, json, looping round-trip; gen is byte-stable".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Brzozowski theorem", brzozowski),
        ("score theorems L1-L4 / S1-S4", score_theorems),
        ("elector laws EL1-EL3 / ES1-ES3", elector_laws),
        ("optimization equivalence", optimization_equivalence),
        ("simplification soundness", simplification_soundness),
        ("worked example", worked_example),
        ("looping lexer", looping_lexer),
        ("mini-cal end-to-end", minical_end_to_end),
        ("scaling shape", scaling_shape),
        ("defaults", defaults),
        ("IR round-trip", ir_round_trip),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
