//! Weak reduction, fuel-bounded normalisation and convertibility.
//!
//! Reduction is leftmost-outermost: the head redex of the spine is contracted
//! first; once the head is stuck (a variable, or an atom short of arguments)
//! the arguments are reduced left to right. A normal form therefore contains
//! no `K a b` or `S a b c` subterm anywhere.

use std::collections::HashSet;

use crate::term::{Head, Term};
use crate::tristate::TriState;

/// Budget of contracted redexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fuel(pub u64);

impl Fuel {
    pub const DEFAULT: Fuel = Fuel(10_000);

    pub fn steps(self) -> u64 {
        self.0
    }
}

impl Default for Fuel {
    fn default() -> Fuel {
        Fuel::DEFAULT
    }
}

impl From<u64> for Fuel {
    fn from(n: u64) -> Fuel {
        Fuel(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalizeResult {
    NormalForm { term: Term, steps: u64 },
    FuelExhausted { partial: Term, steps_used: u64 },
}

impl NormalizeResult {
    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            NormalizeResult::NormalForm { term, .. } => Some(term),
            NormalizeResult::FuelExhausted { .. } => None,
        }
    }

    pub fn term(&self) -> &Term {
        match self {
            NormalizeResult::NormalForm { term, .. } => term,
            NormalizeResult::FuelExhausted { partial, .. } => partial,
        }
    }

    pub fn steps(&self) -> u64 {
        match self {
            NormalizeResult::NormalForm { steps, .. } => *steps,
            NormalizeResult::FuelExhausted { steps_used, .. } => *steps_used,
        }
    }
}

/// Contract the redex at the head of the spine, if there is one.
pub fn contract_head(head: &Head, args: &[Term]) -> Option<Term> {
    match head {
        Head::K if args.len() >= 2 => Some(Term::apply(args[0].clone(), args[2..].iter().cloned())),
        Head::S if args.len() >= 3 => {
            let (a, b, c) = (&args[0], &args[1], &args[2]);
            let reduct = Term::app(Term::app(a.clone(), c.clone()), Term::app(b.clone(), c.clone()));
            Some(Term::apply(reduct, args[3..].iter().cloned()))
        }
        _ => None,
    }
}

struct Frame {
    head: Head,
    args: Vec<Term>,
    idx: usize,
}

/// One leftmost-outermost weak reduction step; `None` iff `t` is normal.
pub fn step(t: &Term) -> Option<Term> {
    if t.is_normal() {
        return None;
    }
    let mut frames: Vec<Frame> = Vec::new();
    let mut cur = t.clone();
    loop {
        let (head, args) = cur.unwind();
        if let Some(reduct) = contract_head(&head, &args) {
            let mut out = reduct;
            while let Some(Frame { head, mut args, idx }) = frames.pop() {
                args[idx] = out;
                out = Term::apply(Term::from_head(&head), args);
            }
            return Some(out);
        }
        // Head is stuck, so some argument must hold the redex.
        let idx = args
            .iter()
            .position(|a| !a.is_normal())
            .expect("non-normal term with stuck head has a non-normal argument");
        cur = args[idx].clone();
        frames.push(Frame { head, args, idx });
    }
}

/// Iterate [`step`] until a normal form appears or `fuel` steps are spent.
pub fn normalize(t: &Term, fuel: Fuel) -> NormalizeResult {
    let mut m = Machine::new(t);
    m.run(fuel.0);
    m.finish()
}

/// Leftmost-outermost reducer over an explicit spine stack.
///
/// Produces the same reduction sequence as repeated [`step`], but contracts a
/// head redex in time independent of the spine length; terms are rebuilt only
/// when a subterm is finished or the machine stops.
struct Machine {
    frames: Vec<Frame>,
    head: Head,
    /// Arguments of the focused spine, first argument last.
    stack: Vec<Term>,
    used: u64,
    done: Option<Term>,
}

impl Machine {
    fn new(t: &Term) -> Machine {
        let mut m = Machine { frames: Vec::new(), head: Head::K, stack: Vec::new(), used: 0, done: None };
        if t.is_normal() {
            m.done = Some(t.clone());
        } else {
            m.focus(t.clone());
        }
        m
    }

    /// Push the spine of `t` on top of the current argument stack.
    fn focus(&mut self, t: Term) {
        let (head, args) = t.unwind();
        self.head = head;
        self.stack.extend(args.into_iter().rev());
    }

    fn focused_term(&mut self) -> Term {
        let args = std::mem::take(&mut self.stack);
        Term::apply(Term::from_head(&self.head), args.into_iter().rev())
    }

    fn run(&mut self, fuel: u64) {
        while self.done.is_none() {
            let n = self.stack.len();
            let redex = matches!(self.head, Head::K if n >= 2) || matches!(self.head, Head::S if n >= 3);
            if redex {
                if self.used >= fuel {
                    return;
                }
                self.used += 1;
                let a = self.stack.pop().expect("redex has arguments");
                let b = self.stack.pop().expect("redex has arguments");
                if self.head == Head::S {
                    let c = self.stack.pop().expect("S redex has three arguments");
                    self.stack.push(Term::app(b, c.clone()));
                    self.stack.push(c);
                }
                self.focus(a);
                continue;
            }
            // Stuck head: descend into the first non-normal argument.
            if let Some(pos) = self.stack.iter().rposition(|a| !a.is_normal()) {
                let mut args = std::mem::take(&mut self.stack);
                args.reverse();
                let idx = args.len() - 1 - pos;
                let target = args[idx].clone();
                self.frames.push(Frame { head: self.head.clone(), args, idx });
                self.focus(target);
                continue;
            }
            // Focus is normal: plug it back and resume in the enclosing spine.
            let mut done = self.focused_term();
            loop {
                let Some(Frame { head, mut args, idx }) = self.frames.pop() else {
                    self.done = Some(done);
                    break;
                };
                args[idx] = done;
                if let Some(next) = args[idx + 1..].iter().position(|a| !a.is_normal()) {
                    let next = idx + 1 + next;
                    let target = args[next].clone();
                    self.frames.push(Frame { head, args, idx: next });
                    self.focus(target);
                    break;
                }
                done = Term::apply(Term::from_head(&head), args);
            }
        }
    }

    fn finish(mut self) -> NormalizeResult {
        if let Some(term) = self.done.take() {
            return NormalizeResult::NormalForm { term, steps: self.used };
        }
        let mut out = self.focused_term();
        while let Some(Frame { head, mut args, idx }) = self.frames.pop() {
            args[idx] = out;
            out = Term::apply(Term::from_head(&head), args);
        }
        if out.is_normal() {
            NormalizeResult::NormalForm { term: out, steps: self.used }
        } else {
            NormalizeResult::FuelExhausted { partial: out, steps_used: self.used }
        }
    }
}

struct Trace {
    cur: Term,
    seen: HashSet<Term>,
    used: u64,
    normal: bool,
}

impl Trace {
    fn new(t: &Term) -> Trace {
        let mut seen = HashSet::new();
        seen.insert(t.clone());
        Trace { cur: t.clone(), seen, used: 0, normal: t.is_normal() }
    }

    fn live(&self, fuel: Fuel) -> bool {
        !self.normal && self.used < fuel.0
    }

    fn advance(&mut self) {
        self.cur = step(&self.cur).expect("live trace steps");
        self.used += 1;
        self.normal = self.cur.is_normal();
        self.seen.insert(self.cur.clone());
    }
}

/// Steps per side during which reducts are recorded to detect a common one.
const MEET_WINDOW: u64 = 256;

/// Semi-decide weak convertibility of `a` and `b`.
///
/// Both leftmost-outermost reduction sequences are run in lockstep, each with
/// its own `fuel`. `Holds` as soon as the sequences share a term (a common
/// reduct, looked for during the first few hundred steps), or when one side
/// reduces to the other along some path; `Fails` when both reach distinct
/// normal forms (confluence makes normal forms unique); `Unknown` otherwise.
pub fn convertible(a: &Term, b: &Term, fuel: Fuel) -> TriState {
    if a == b {
        return TriState::Holds;
    }
    let window = Fuel(fuel.0.min(MEET_WINDOW));
    let mut left = Trace::new(a);
    let mut right = Trace::new(b);
    loop {
        let mut moved = false;
        if left.live(window) {
            left.advance();
            moved = true;
            if right.seen.contains(&left.cur) {
                return TriState::Holds;
            }
        }
        if right.live(window) {
            right.advance();
            moved = true;
            if left.seen.contains(&right.cur) {
                return TriState::Holds;
            }
        }
        if !moved {
            break;
        }
    }
    let finish = |t: Trace| {
        let rest = Fuel(fuel.0 - t.used);
        let r = normalize(&t.cur, rest);
        r.normal_form().cloned()
    };
    if let (Some(x), Some(y)) = (finish(left), finish(right)) {
        return TriState::from_bool(x == y);
    }
    // A reduction path in either direction also witnesses convertibility.
    if reduces_to(a, b, fuel).holds() || reduces_to(b, a, fuel).holds() {
        return TriState::Holds;
    }
    TriState::unknown(format!("no common reduct within {} steps", fuel.0))
}

/// Semi-decide whether `from` reduces to `to` in zero or more weak steps,
/// along any reduction path rather than only the leftmost-outermost one.
///
/// Searches standard reductions: head contractions first, then internal
/// reductions of the arguments pairwise. `fuel` bounds the total number of
/// head contractions spent across the whole search.
pub fn reduces_to(from: &Term, to: &Term, fuel: Fuel) -> TriState {
    let mut budget = fuel.0;
    match reach(from, to, &mut budget) {
        Reach::Yes => TriState::Holds,
        Reach::No => TriState::Fails,
        Reach::OutOfFuel => TriState::unknown(format!("no reduction path found within {} steps", fuel.0)),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Reach {
    Yes,
    No,
    OutOfFuel,
}

fn reach(from: &Term, to: &Term, budget: &mut u64) -> Reach {
    let mut cur = from.clone();
    let (to_head, to_args) = to.unwind();
    let mut inconclusive = false;
    loop {
        if cur == *to {
            return Reach::Yes;
        }
        if cur.is_normal() {
            return if inconclusive { Reach::OutOfFuel } else { Reach::No };
        }
        let (head, args) = cur.unwind();
        if head == to_head && args.len() == to_args.len() {
            let mut internal = Reach::Yes;
            for (x, y) in args.iter().zip(&to_args) {
                match reach(x, y, budget) {
                    Reach::Yes => {}
                    Reach::No => {
                        internal = Reach::No;
                        break;
                    }
                    Reach::OutOfFuel => internal = Reach::OutOfFuel,
                }
            }
            match internal {
                Reach::Yes => return Reach::Yes,
                Reach::OutOfFuel => inconclusive = true,
                Reach::No => {}
            }
        }
        let Some(next) = contract_head(&head, &args) else {
            // A stuck head never moves, so only a matching shape could succeed.
            return if inconclusive { Reach::OutOfFuel } else { Reach::No };
        };
        if *budget == 0 {
            return Reach::OutOfFuel;
        }
        *budget -= 1;
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::{derived, Derived};

    fn s() -> Term {
        Term::s()
    }
    fn k() -> Term {
        Term::k()
    }
    fn ap(f: Term, xs: &[Term]) -> Term {
        Term::apply(f, xs.iter().cloned())
    }

    #[test]
    fn k_and_s_rules() {
        assert_eq!(step(&ap(k(), &[s(), k()])), Some(s()));
        let t = ap(s(), &[k(), k(), s()]);
        assert_eq!(step(&t).unwrap().to_string(), "((K S) (K S))");
        assert_eq!(step(&k()), None);
    }

    #[test]
    fn normalize_examples() {
        let r = normalize(&ap(k(), &[s(), k()]), Fuel(10));
        assert_eq!(r, NormalizeResult::NormalForm { term: s(), steps: 1 });
        // S K K K => K K (K K) => K
        let r = normalize(&ap(s(), &[k(), k(), k()]), Fuel(10));
        assert_eq!(r.normal_form(), Some(&k()));
        assert_eq!(r.steps(), 2);
    }

    #[test]
    fn fix_of_identity_exhausts_fuel() {
        let probe = Term::app(derived(Derived::Fix), derived(Derived::I));
        let r = normalize(&probe, Fuel(5));
        assert!(matches!(r, NormalizeResult::FuelExhausted { steps_used: 5, .. }));
        // every intermediate term of the trace is reducible
        let mut cur = probe;
        for _ in 0..5 {
            cur = step(&cur).expect("still reducible");
        }
        assert!(!cur.is_normal());
    }

    #[test]
    fn convertible_examples() {
        assert_eq!(convertible(&ap(k(), &[s(), k()]), &s(), Fuel(10)), TriState::Holds);
        assert_eq!(convertible(&k(), &s(), Fuel(10)), TriState::Fails);
        let probe = Term::app(derived(Derived::Fix), derived(Derived::I));
        assert!(convertible(&probe, &k(), Fuel(5)).is_unknown());
    }

    #[test]
    fn reduction_inside_stuck_spine() {
        // S (K K S) reduces inside its argument
        let t = Term::app(s(), ap(k(), &[k(), s()]));
        assert_eq!(normalize(&t, Fuel(10)).normal_form(), Some(&Term::app(s(), k())));
        // variable heads are stuck but their arguments reduce
        let t = ap(Term::var("x"), &[ap(k(), &[s(), s()]), ap(k(), &[k(), s()])]);
        assert_eq!(normalize(&t, Fuel(10)).term().to_string(), "((x S) K)");
    }

    #[test]
    fn common_reduct_of_diverging_terms() {
        // omega = S I I (S I I) diverges, but S a b c and a c (b c) meet after one step
        let i = derived(Derived::I);
        let sii = ap(s(), &[i.clone(), i.clone()]);
        let lhs = ap(s(), &[sii.clone(), sii.clone(), sii.clone()]);
        let rhs = ap(sii.clone(), &[sii.clone(), Term::app(sii.clone(), sii.clone())]);
        assert_eq!(convertible(&lhs, &rhs, Fuel(100)), TriState::Holds);
        assert!(normalize(&lhs, Fuel(100)).normal_form().is_none());
    }

    #[test]
    fn reduces_to_finds_non_leftmost_paths() {
        let i = derived(Derived::I);
        // S (I K) reduces to S K only by an internal step
        let from = Term::app(s(), Term::app(i.clone(), k()));
        assert_eq!(reduces_to(&from, &Term::app(s(), k()), Fuel(10)), TriState::Holds);
        assert_eq!(reduces_to(&k(), &s(), Fuel(10)), TriState::Fails);
        // K never turns into K K
        assert_eq!(reduces_to(&Term::app(i, k()), &Term::app(k(), k()), Fuel(10)), TriState::Fails);
    }

    #[test]
    fn fixpoint_unfolds_by_reduction() {
        let fix = derived(Derived::Fix);
        let f = Term::var("f");
        let lhs = Term::app(fix.clone(), f.clone());
        let rhs = Term::app(f, lhs.clone());
        assert_eq!(reduces_to(&lhs, &rhs, Fuel(200)), TriState::Holds);
    }
}
