//! End-to-end acceptance suite. Runs without the libtest harness and prints
//! one PASS/FAIL line per criterion; exits nonzero if any criterion fails.
//!
//! Set `REALIZER_BLESS=1` to rewrite the `.expected` files of the golden corpus.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use realizer::asm::{is_modest, mk_assembly};
use realizer::cli::{parse_workspace, Workspace};
use realizer::combinators::{
    abstract_var, abstract_vars, derived, numeral, pair, predecessor, prim_rec, successor, zero_test, Derived,
};
use realizer::equiv::{backward, check_iso, forward};
use realizer::laws::{gen, per_category, subquotient_laws, LawConfig, LawOutcome};
use realizer::per::{check_tracker_per, mk_per};
use realizer::reduce::{convertible, normalize, reduces_to, step};
use realizer::term::TermKind;
use realizer::{Error, Fuel, Term, TriState};

const FUEL: Fuel = Fuel(10_000);

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    summary: String,
}

fn pass(summary: impl Into<String>) -> Outcome {
    Outcome { ok: true, summary: summary.into() }
}

fn verdict(ok: bool, summary: impl Into<String>) -> Outcome {
    Outcome { ok, summary: summary.into() }
}

// ---------------------------------------------------------------------------
// test-side oracles and generators

/// Uniform random binary tree over `S` and `K` with exactly `leaves` leaves.
fn sk_tree(rng: &mut StdRng, leaves: usize) -> Term {
    if leaves == 1 {
        return if rng.gen_bool(0.5) { Term::s() } else { Term::k() };
    }
    let left = rng.gen_range(1..leaves);
    Term::app(sk_tree(rng, left), sk_tree(rng, leaves - left))
}

/// A closed term with no redex anywhere, of at most `max` leaves.
fn closed_normal(rng: &mut StdRng, max: usize) -> Term {
    loop {
        let leaves = rng.gen_range(1..=max);
        let t = sk_tree(rng, leaves);
        if step(&t).is_none() {
            return t;
        }
    }
}

fn open_tree(rng: &mut StdRng, leaves: usize) -> Term {
    if leaves == 1 {
        return match rng.gen_range(0..3) {
            0 => Term::s(),
            1 => Term::k(),
            _ => Term::var("x"),
        };
    }
    let left = rng.gen_range(1..leaves);
    Term::app(open_tree(rng, left), open_tree(rng, leaves - left))
}

/// `body[x := v]`, by structural recursion over an environment lookup.
fn substitute(body: &Term, env: &[(&str, &Term)]) -> Term {
    match body.kind() {
        TermKind::S => Term::s(),
        TermKind::K => Term::k(),
        TermKind::Var(name) => match env.iter().find(|(x, _)| *x == &**name) {
            Some((_, v)) => (*v).clone(),
            None => body.clone(),
        },
        TermKind::App(f, a) => Term::app(substitute(f, env), substitute(a, env)),
    }
}

/// The integer a numeral denotes, read off by zero tests and predecessors.
fn decode(n: &Term) -> Option<u64> {
    let tt = normalize(&derived(Derived::True), FUEL).normal_form()?.clone();
    let mut cur = normalize(n, FUEL).normal_form()?.clone();
    for k in 0..64 {
        let z = normalize(&Term::app(zero_test(), cur.clone()), FUEL).normal_form()?.clone();
        if z == tt {
            return Some(k);
        }
        cur = normalize(&Term::app(predecessor(), cur), FUEL).normal_form()?.clone();
    }
    None
}

fn tally(outcomes: &[LawOutcome]) -> (usize, usize, usize, Option<String>) {
    let holds = outcomes.iter().filter(|o| o.verdict.holds()).count();
    let fails = outcomes.iter().filter(|o| o.verdict.fails()).count();
    let unknown = outcomes.len() - holds - fails;
    let first = outcomes.iter().find(|o| !o.verdict.holds()).map(|o| format!("{} #{}: {} ({})", o.law, o.sample, o.verdict, o.detail));
    (holds, fails, unknown, first)
}

// ---------------------------------------------------------------------------
// criteria

fn combinator_laws() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let (mut holds, mut bad) = (0, Vec::new());
    for _ in 0..200 {
        let (a, b, c) = (closed_normal(&mut rng, 12), closed_normal(&mut rng, 12), closed_normal(&mut rng, 12));
        let k = convertible(&Term::apply(Term::k(), [a.clone(), b.clone()]), &a, FUEL);
        let s = convertible(
            &Term::apply(Term::s(), [a.clone(), b.clone(), c.clone()]),
            &Term::apply(a.clone(), [c.clone(), Term::app(b.clone(), c.clone())]),
            FUEL,
        );
        for v in [k, s] {
            if v.holds() {
                holds += 1;
            } else {
                bad.push(format!("{v} at a={a} b={b} c={c}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = bad.is_empty() && elapsed < Duration::from_secs(5);
    verdict(ok, format!("{holds}/400 hold in {elapsed:.2?}{}", bad.first().map(|b| format!("; {b}")).unwrap_or_default()))
}

fn derived_laws() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut check = |name: &str, v: TriState| {
        checked += 1;
        if !v.holds() {
            failures.push(format!("{name}: {v}"));
        }
    };
    let ap = |d: Derived, xs: Vec<Term>| Term::apply(derived(d), xs);
    for _ in 0..50 {
        let (a, b) = (closed_normal(&mut rng, 8), closed_normal(&mut rng, 8));
        check("i", convertible(&ap(Derived::I, vec![a.clone()]), &a, FUEL));
        check("pr1", convertible(&ap(Derived::Pr1, vec![pair(a.clone(), b.clone())]), &a, FUEL));
        check("pr2", convertible(&ap(Derived::Pr2, vec![pair(a.clone(), b.clone())]), &b, FUEL));
        let tt = derived(Derived::True);
        let ff = derived(Derived::False);
        check("if true", convertible(&ap(Derived::IfThenElse, vec![tt, a.clone(), b.clone()]), &a, FUEL));
        check("if false", convertible(&ap(Derived::IfThenElse, vec![ff, a.clone(), b.clone()]), &b, FUEL));

        // a normalizing f, possibly not yet in normal form
        let f = loop {
            let leaves = rng.gen_range(1..=8);
            let t = sk_tree(&mut rng, leaves);
            if normalize(&t, Fuel(500)).normal_form().is_some() {
                break t;
            }
        };
        let fix_f = ap(Derived::Fix, vec![f.clone()]);
        check("fix", reduces_to(&fix_f, &Term::app(f, fix_f.clone()), FUEL));
    }
    for n in 0..=10u64 {
        let z = convertible(&Term::app(zero_test(), numeral(n)), &derived(if n == 0 { Derived::True } else { Derived::False }), FUEL);
        check("zero test", z);
        check("pred", TriState::from_bool(decode(&Term::app(predecessor(), numeral(n + 1))) == Some(n)));
        check("succ", TriState::from_bool(decode(&Term::app(successor(), numeral(n))) == Some(n + 1)));
    }
    let step_fn = abstract_vars(&["m", "r"], &pair(Term::var("r"), Term::var("m")));
    for n in 0..=5u64 {
        for c in [Term::k(), Term::s()] {
            check("primRec base", convertible(&prim_rec(c.clone(), step_fn.clone(), numeral(0)), &c, FUEL));
            let lhs = prim_rec(c.clone(), step_fn.clone(), numeral(n + 1));
            let rhs = Term::apply(step_fn.clone(), [numeral(n), prim_rec(c.clone(), step_fn.clone(), numeral(n))]);
            check("primRec step", convertible(&lhs, &rhs, FUEL));
        }
    }
    let succ_step = abstract_vars(&["m", "r"], &Term::app(successor(), Term::var("r")));
    for m in 0..=5u64 {
        for n in 0..=5u64 {
            let sum = prim_rec(numeral(m), succ_step.clone(), numeral(n));
            check("addition", TriState::from_bool(decode(&sum) == Some(m + n)));
        }
    }
    verdict(failures.is_empty(), format!("{}/{checked} hold{}", checked - failures.len(), failures.first().map(|f| format!("; {f}")).unwrap_or_default()))
}

fn abstraction_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let (mut holds, mut fails, mut unknown) = (0, 0, 0);
    let mut first_fail = None;
    let n = 200;
    for _ in 0..n {
        let leaves = rng.gen_range(1..=10);
        let body = open_tree(&mut rng, leaves);
        let arg = loop {
            let leaves = rng.gen_range(1..=8);
            let t = sk_tree(&mut rng, leaves);
            if normalize(&t, Fuel(500)).normal_form().is_some() {
                break t;
            }
        };
        let compiled = Term::app(abstract_var("x", &body), arg.clone());
        match convertible(&compiled, &substitute(&body, &[("x", &arg)]), FUEL) {
            TriState::Holds => holds += 1,
            TriState::Fails => {
                fails += 1;
                first_fail.get_or_insert(format!("body={body} arg={arg}"));
            }
            TriState::Unknown(_) => unknown += 1,
        }
    }
    let rate = unknown as f64 / n as f64;
    verdict(
        fails == 0 && rate < 0.05,
        format!("{holds} hold, {fails} fail, {unknown} unknown ({:.1}%){}", rate * 100.0, first_fail.map(|f| format!("; {f}")).unwrap_or_default()),
    )
}

fn law_family(name: &str, outcomes: Vec<LawOutcome>, min_instances: usize, instances: usize) -> Outcome {
    let (holds, fails, unknown, first) = tally(&outcomes);
    verdict(
        fails == 0 && unknown == 0 && instances >= min_instances,
        format!("{name}: {instances} instances, {holds} hold, {fails} fail, {unknown} unknown{}", first.map(|f| format!("; {f}")).unwrap_or_default()),
    )
}

fn per_laws() -> Outcome {
    let cfg = LawConfig { samples: 120, seed: 4, fuel: FUEL };
    law_family("identity and associativity", per_category(&cfg), 100, cfg.samples)
}

fn subquotient_theorems() -> Outcome {
    let cfg = LawConfig { samples: 120, seed: 5, fuel: FUEL };
    law_family("modesty, functor laws, round trips", subquotient_laws(&cfg), 100, cfg.samples)
}

fn equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(6);
    let i = derived(Derived::I);
    let mut bad = Vec::new();
    let n = 120;
    for k in 0..n {
        let m = gen::modest(&mut rng, "M", 6, 3);
        if m.len() > 6 || m.iter().any(|(_, rs)| rs.len() > 3) {
            bad.push(format!("#{k}: generator out of bounds"));
            continue;
        }
        let rep = check_iso(&m, FUEL);
        let ids = rep.fb_identity.holds() && rep.bf_identity.holds();
        let trackers = match (forward(&m, FUEL), backward(&m, FUEL)) {
            (Ok(f), Ok(b)) => f.tracker() == &i && b.tracker() == &i,
            _ => false,
        };
        if !(rep.verdict.holds() && ids && trackers) {
            bad.push(format!("#{k}: verdict {}, identities {ids}, trackers {trackers}", rep.verdict));
        }
    }
    let elapsed = start.elapsed();
    verdict(
        bad.is_empty() && elapsed < Duration::from_secs(10),
        format!("{}/{n} isomorphic via i in {elapsed:.2?}{}", n - bad.len(), bad.first().map(|b| format!("; {b}")).unwrap_or_default()),
    )
}

fn negative_controls() -> Outcome {
    let kks = Term::apply(Term::k(), [Term::k(), Term::s()]);
    let shared = mk_assembly("M", [("x".to_string(), vec![Term::k()]), ("y".to_string(), vec![kks.clone()])]).unwrap();
    let rep = is_modest(&shared, FUEL);
    let printed = rep.to_string();
    let modesty = rep.verdict == TriState::Fails && rep.counterexample.is_some() && printed.contains("realizes both");

    let overlap = matches!(mk_per("R", vec![vec![Term::k()], vec![kks]], FUEL), Err(Error::OverlappingBlocks { .. }));

    let r = mk_per("R", vec![vec![Term::k(), Term::app(derived(Derived::I), Term::k())], vec![Term::s()]], FUEL).unwrap();
    let s = mk_per("S", vec![vec![Term::k()], vec![Term::s()]], FUEL).unwrap();
    // pr1 sends K and i K to terms that decidedly fall in no block
    let wrong = check_tracker_per(&derived(Derived::Pr1), &r, &s, FUEL).unwrap();
    let swap_s = mk_per("T", vec![vec![Term::s()]], FUEL).unwrap();
    let wrong2 = check_tracker_per(&Term::app(Term::k(), Term::k()), &s, &swap_s, FUEL).unwrap();
    let tracker = wrong.verdict == TriState::Fails && wrong2.verdict == TriState::Fails;
    verdict(
        modesty && overlap && tracker,
        format!("counterexample `{printed}`; overlap rejected: {overlap}; wrong trackers: {}, {}", wrong.verdict, wrong2.verdict),
    )
}

// ---------------------------------------------------------------------------
// CLI

fn realizer(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_realizer")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn golden_round_trip(bless: bool) -> Result<usize, String> {
    let mut files: Vec<_> = std::fs::read_dir(golden_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ws"))
        .collect();
    files.sort();
    for path in &files {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let ws = parse_workspace(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let printed = ws.to_string();
        let again: Workspace = parse_workspace(&printed).map_err(|e| format!("{} reprint: {e}", path.display()))?;
        if again != ws || again.to_string() != printed {
            return Err(format!("{}: round trip changed the workspace", path.display()));
        }
        let expected = path.with_extension("expected");
        if bless {
            std::fs::write(&expected, &printed).map_err(|e| e.to_string())?;
        } else {
            let want = std::fs::read_to_string(&expected).map_err(|e| format!("{}: {e}", expected.display()))?;
            if want != printed {
                return Err(format!("{}: printed form differs from golden", path.display()));
            }
        }
    }
    Ok(files.len())
}

fn json_shape(text: &str) -> Result<(), String> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let obj = v.as_object().ok_or("top level is not an object")?;
    let mut keys: Vec<_> = obj.keys().map(String::as_str).collect();
    keys.sort();
    if keys != ["command", "fuel", "obligations", "verdict"] {
        return Err(format!("top-level fields {keys:?}"));
    }
    let label = |v: &serde_json::Value| matches!(v.as_str(), Some("Holds" | "Fails" | "Unknown"));
    if !obj["command"].is_string() || !label(&obj["verdict"]) || !obj["fuel"].is_u64() {
        return Err("bad field types".into());
    }
    for o in obj["obligations"].as_array().ok_or("obligations is not an array")? {
        let o = o.as_object().ok_or("obligation is not an object")?;
        let mut keys: Vec<_> = o.keys().map(String::as_str).collect();
        keys.sort();
        if keys != ["detail", "subject", "verdict"] || !o["subject"].is_string() || !o["detail"].is_string() || !label(&o["verdict"]) {
            return Err(format!("obligation fields {keys:?}"));
        }
    }
    Ok(())
}

fn cli_contract(bless: bool) -> Outcome {
    let mut problems = Vec::new();
    let dir = tempfile::tempdir().expect("tempdir");
    let ws = dir.path().join("w.ws");
    std::fs::write(
        &ws,
        "assembly M { element x |- [K]; element y |- [S]; }\n\
         assembly Bad { element x |- [K]; element y |- [((K K) S)]; }\n",
    )
    .unwrap();
    let broken = dir.path().join("broken.ws");
    std::fs::write(&broken, "let a = (K;").unwrap();
    let ws = ws.to_str().unwrap();

    let cases: [(&[&str], i32); 8] = [
        (&["normalize", "((K S) K)"], 0),
        (&["-w", ws, "check-iso", "M"], 0),
        (&["-w", ws, "check-modest", "Bad"], 1),
        (&["normalize", "(fix i)", "--fuel", "50"], 2),
        (&["frobnicate"], 3),
        (&["-w", broken.to_str().unwrap(), "check-iso", "M"], 3),
        (&["-w", ws, "check-iso", "Missing"], 3),
        (&["normalize", "((K S"], 3),
    ];
    for (args, want) in cases {
        let (code, _) = realizer(args);
        if code != want {
            problems.push(format!("{args:?} exited {code}, expected {want}"));
        }
    }
    let (_, text) = realizer(&["normalize", "((K S) K)"]);
    if !text.lines().any(|l| l.ends_with(": S")) {
        problems.push("normalize did not print S".into());
    }
    let (_, text) = realizer(&["-w", ws, "check-modest", "Bad"]);
    if !text.contains("counterexample") {
        problems.push("check-modest printed no counterexample".into());
    }

    for args in [
        vec!["normalize", "((K S) K)"],
        vec!["-w", ws, "check-iso", "M"],
        vec!["-w", ws, "check-modest", "Bad"],
        vec!["-w", ws, "check-equivalence", "M"],
        vec!["normalize", "(fix i)", "--fuel", "50"],
    ] {
        let (code, text) = realizer(&args);
        let (json_code, json) = realizer(&[args.as_slice(), &["--format", "json"]].concat());
        if let Err(e) = json_shape(&json) {
            problems.push(format!("{args:?}: {e}"));
            continue;
        }
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let text_verdict = text.lines().find_map(|l| l.strip_prefix("verdict: ")).unwrap_or_default();
        if code != json_code || v["verdict"] != text_verdict {
            problems.push(format!("{args:?}: text and json disagree"));
        }
        for o in v["obligations"].as_array().unwrap() {
            if !o["detail"].as_str().unwrap().is_empty() && !text.contains(o["detail"].as_str().unwrap()) {
                problems.push(format!("{args:?}: detail missing from text output"));
            }
        }
    }

    let golden = golden_round_trip(bless);
    match &golden {
        Ok(n) if *n >= 30 => {}
        Ok(n) => problems.push(format!("golden corpus has {n} files")),
        Err(e) => problems.push(e.clone()),
    }
    if problems.is_empty() {
        pass(format!("exit codes, json fields, {} golden round trips", golden.unwrap_or(0)))
    } else {
        verdict(false, problems.join("; "))
    }
}

fn main() -> ExitCode {
    let bless = std::env::var_os("REALIZER_BLESS").is_some();
    let criteria: [Criterion; 7] = [
        ("combinator laws", combinator_laws),
        ("derived-combinator laws", derived_laws),
        ("bracket abstraction vs substitution oracle", abstraction_oracle),
        ("PER category laws", per_laws),
        ("subquotient theorems", subquotient_theorems),
        ("modest set / subquotient equivalence", equivalence),
        ("negative controls", negative_controls),
    ];
    let mut all_ok = true;
    let mut report = |n: usize, name: &str, o: Outcome| {
        all_ok &= o.ok;
        println!("criterion {n} {}: {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.summary);
    };
    for (n, (name, f)) in criteria.iter().enumerate() {
        report(n + 1, name, f());
    }
    report(8, "CLI contract", cli_contract(bless));
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
