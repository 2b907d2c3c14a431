//! Bracket abstraction and the combinators derived from `S` and `K`.

use std::str::FromStr;
use std::sync::LazyLock;

use crate::term::{Term, TermKind};

/// Eliminate variable `x` from `body`.
///
/// `[x] x = S K K`, `[x] m = K m` when `x` does not occur in `m`, and
/// `[x] (m n) = S ([x] m) ([x] n)`. No eta rule. For every argument `a`,
/// `([x] body) a` weakly reduces to `body[x := a]`.
pub fn abstract_var(x: &str, body: &Term) -> Term {
    if !body.occurs(x) {
        return Term::app(Term::k(), body.clone());
    }
    match body.kind() {
        TermKind::Var(_) => identity(),
        TermKind::App(m, n) => Term::apply(Term::s(), [abstract_var(x, m), abstract_var(x, n)]),
        TermKind::S | TermKind::K => unreachable!("atoms have no free variables"),
    }
}

/// `[x1] ... [xn] body`, innermost binder last.
pub fn abstract_vars(xs: &[&str], body: &Term) -> Term {
    xs.iter().rev().fold(body.clone(), |acc, x| abstract_var(x, &acc))
}

fn identity() -> Term {
    Term::apply(Term::s(), [Term::k(), Term::k()])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Derived {
    I,
    Pair,
    Pr1,
    Pr2,
    True,
    False,
    IfThenElse,
    Fix,
}

impl Derived {
    pub const ALL: [Derived; 8] = [
        Derived::I,
        Derived::Pair,
        Derived::Pr1,
        Derived::Pr2,
        Derived::True,
        Derived::False,
        Derived::IfThenElse,
        Derived::Fix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Derived::I => "i",
            Derived::Pair => "pair",
            Derived::Pr1 => "pr1",
            Derived::Pr2 => "pr2",
            Derived::True => "true",
            Derived::False => "false",
            Derived::IfThenElse => "ifThenElse",
            Derived::Fix => "fix",
        }
    }
}

impl FromStr for Derived {
    type Err = String;

    fn from_str(s: &str) -> Result<Derived, String> {
        Derived::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("no derived combinator named `{s}`"))
    }
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn ap(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
    Term::apply(f, args)
}

struct Table {
    i: Term,
    pair: Term,
    pr1: Term,
    pr2: Term,
    tt: Term,
    ff: Term,
    ite: Term,
    fix: Term,
    prim_rec: Term,
}

static TABLE: LazyLock<Table> = LazyLock::new(|| {
    let i = abstract_var("x", &v("x"));
    let tt = abstract_vars(&["t", "e"], &v("t"));
    let ff = abstract_vars(&["t", "e"], &v("e"));
    let pair = abstract_vars(&["a", "b", "f"], &ap(v("f"), [v("a"), v("b")]));
    let pr1 = abstract_var("p", &Term::app(v("p"), tt.clone()));
    let pr2 = abstract_var("p", &Term::app(v("p"), ff.clone()));
    let ite = abstract_vars(&["c", "t", "e"], &ap(v("c"), [v("t"), v("e")]));
    // Turing's fixpoint: A A with A = [x][f] f (x x f)
    let half = abstract_vars(&["x", "f"], &Term::app(v("f"), ap(v("x"), [v("x"), v("f")])));
    let fix = Term::app(half.clone(), half);
    // primRec = fix ([r][c][f][n] ifThenElse (zero? n) c (f (pred n) (r c f (pred n))))
    let pred_n = Term::app(pr2.clone(), v("n"));
    let body = ap(
        ite.clone(),
        [
            Term::app(pr1.clone(), v("n")),
            v("c"),
            ap(v("f"), [pred_n.clone(), ap(v("r"), [v("c"), v("f"), pred_n])]),
        ],
    );
    let prim_rec = Term::app(fix.clone(), abstract_vars(&["r", "c", "f", "n"], &body));
    Table { i, pair, pr1, pr2, tt, ff, ite, fix, prim_rec }
});

/// The closed term implementing a derived combinator.
///
/// Laws, up to convertibility: `i a = a`, `pr1 (pair a b) = a`,
/// `pr2 (pair a b) = b`, `ifThenElse true t e = t`,
/// `ifThenElse false t e = e`, and `fix f` reduces to `f (fix f)`.
pub fn derived(which: Derived) -> Term {
    let t = &*TABLE;
    match which {
        Derived::I => t.i.clone(),
        Derived::Pair => t.pair.clone(),
        Derived::Pr1 => t.pr1.clone(),
        Derived::Pr2 => t.pr2.clone(),
        Derived::True => t.tt.clone(),
        Derived::False => t.ff.clone(),
        Derived::IfThenElse => t.ite.clone(),
        Derived::Fix => t.fix.clone(),
    }
}

/// `pair a b`
pub fn pair(a: Term, b: Term) -> Term {
    ap(derived(Derived::Pair), [a, b])
}

/// Curry numeral: `0 = pair true i`, `n + 1 = pair false n`.
pub fn numeral(n: u64) -> Term {
    let mut t = pair(derived(Derived::True), derived(Derived::I));
    for _ in 0..n {
        t = pair(derived(Derived::False), t);
    }
    t
}

/// Zero test on numerals; `pr1`.
pub fn zero_test() -> Term {
    derived(Derived::Pr1)
}

/// Predecessor on positive numerals; `pr2`.
pub fn predecessor() -> Term {
    derived(Derived::Pr2)
}

/// Successor on numerals; `pair false`.
pub fn successor() -> Term {
    Term::app(derived(Derived::Pair), derived(Derived::False))
}

/// The primitive recursion combinator, with
/// `primRec c f 0 = c` and `primRec c f (n + 1) = f n (primRec c f n)`.
pub fn prim_rec_combinator() -> Term {
    TABLE.prim_rec.clone()
}

/// `primRec base step n`
pub fn prim_rec(base: Term, step: Term, n: Term) -> Term {
    ap(prim_rec_combinator(), [base, step, n])
}
