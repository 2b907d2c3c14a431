//! Binary applicative terms over the atoms `S` and `K` and named variables.
//!
//! Terms are immutable and reference counted, so subterms are shared freely
//! by reduction. Every node caches its hash, leaf count, closedness and
//! whether it is already in weak normal form, which keeps equality checks
//! and redex search cheap even when sharing makes the unfolded tree huge.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Head symbol of an application spine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    S,
    K,
    Var(Arc<str>),
}

#[derive(Debug)]
pub enum TermKind {
    S,
    K,
    Var(Arc<str>),
    App(Term, Term),
}

#[derive(Debug)]
struct Node {
    kind: TermKind,
    hash: u64,
    leaves: u64,
    closed: bool,
    normal: bool,
    arity: u32,
    head: HeadKind,
}

/// A combinatory term. Cloning is O(1).
#[derive(Clone, Debug)]
pub struct Term(Arc<Node>);

fn mix(tag: u8, parts: &[u64]) -> u64 {
    let mut h = DefaultHasher::new();
    tag.hash(&mut h);
    parts.hash(&mut h);
    h.finish()
}

impl Term {
    pub fn s() -> Term {
        Term::leaf(TermKind::S, mix(0, &[]))
    }

    pub fn k() -> Term {
        Term::leaf(TermKind::K, mix(1, &[]))
    }

    pub fn var(name: impl AsRef<str>) -> Term {
        let name: Arc<str> = Arc::from(name.as_ref());
        let mut h = DefaultHasher::new();
        name.hash(&mut h);
        let hash = mix(2, &[h.finish()]);
        Term(Arc::new(Node {
            kind: TermKind::Var(name),
            hash,
            leaves: 1,
            closed: false,
            normal: true,
            arity: 0,
            head: HeadKind::Var,
        }))
    }

    fn leaf(kind: TermKind, hash: u64) -> Term {
        let head = if matches!(kind, TermKind::S) { HeadKind::S } else { HeadKind::K };
        Term(Arc::new(Node {
            head,
            kind,
            hash,
            leaves: 1,
            closed: true,
            normal: true,
            arity: 0,
        }))
    }

    /// The application node `f a`. No reduction is performed.
    pub fn app(f: Term, a: Term) -> Term {
        let arity = f.0.arity.saturating_add(1);
        let redex_here = match f.0.head {
            HeadKind::K => arity == 2,
            HeadKind::S => arity == 3,
            HeadKind::Var => false,
        };
        let node = Node {
            hash: mix(3, &[f.0.hash, a.0.hash]),
            leaves: f.0.leaves.saturating_add(a.0.leaves),
            closed: f.0.closed && a.0.closed,
            normal: f.0.normal && a.0.normal && !redex_here,
            arity,
            head: f.0.head,
            kind: TermKind::App(f, a),
        };
        Term(Arc::new(node))
    }

    /// Left-nested application `f a1 a2 ... an`.
    pub fn apply<I>(f: Term, args: I) -> Term
    where
        I: IntoIterator<Item = Term>,
    {
        args.into_iter().fold(f, Term::app)
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    /// Number of atom and variable leaves (saturating).
    pub fn size(&self) -> u64 {
        self.0.leaves
    }

    /// True when no variable occurs in the term.
    pub fn is_closed(&self) -> bool {
        self.0.closed
    }

    /// True when the term contains no weak redex anywhere.
    pub fn is_normal(&self) -> bool {
        self.0.normal
    }

    /// Number of arguments on the application spine.
    pub fn arity(&self) -> u32 {
        self.0.arity
    }

    /// Head symbol and arguments of the application spine, first argument first.
    pub fn unwind(&self) -> (Head, Vec<Term>) {
        let mut args = Vec::with_capacity(self.0.arity as usize);
        let mut cur = self;
        let head = loop {
            match &cur.0.kind {
                TermKind::S => break Head::S,
                TermKind::K => break Head::K,
                TermKind::Var(x) => break Head::Var(x.clone()),
                TermKind::App(f, a) => {
                    args.push(a.clone());
                    cur = f;
                }
            }
        };
        args.reverse();
        (head, args)
    }

    pub fn from_head(head: &Head) -> Term {
        match head {
            Head::S => Term::s(),
            Head::K => Term::k(),
            Head::Var(x) => Term::var(x.as_ref()),
        }
    }

    /// Does the variable `x` occur in the term?
    pub fn occurs(&self, x: &str) -> bool {
        if self.0.closed {
            return false;
        }
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match &t.0.kind {
                TermKind::Var(y) if y.as_ref() == x => return true,
                TermKind::App(f, a) => {
                    if !f.0.closed {
                        stack.push(f);
                    }
                    if !a.0.closed {
                        stack.push(a);
                    }
                }
                _ => {}
            }
        }
        false
    }

    /// Names of free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<Arc<str>> {
        let mut out: Vec<Arc<str>> = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match &t.0.kind {
                TermKind::Var(y) => {
                    if !out.iter().any(|z| z == y) {
                        out.push(y.clone());
                    }
                }
                TermKind::App(f, a) if !t.0.closed => {
                    stack.push(a);
                    stack.push(f);
                }
                _ => {}
            }
        }
        out
    }

    /// Replace every occurrence of variable `x` by `value`.
    pub fn substitute(&self, x: &str, value: &Term) -> Term {
        if !self.occurs(x) {
            return self.clone();
        }
        match &self.0.kind {
            TermKind::Var(_) => value.clone(),
            TermKind::App(f, a) => Term::app(f.substitute(x, value), a.substitute(x, value)),
            TermKind::S | TermKind::K => self.clone(),
        }
    }

    fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum HeadKind {
    S,
    K,
    Var,
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        let mut stack = vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            if a.ptr_eq(b) {
                continue;
            }
            if a.0.hash != b.0.hash || a.0.leaves != b.0.leaves || a.0.arity != b.0.arity {
                return false;
            }
            match (&a.0.kind, &b.0.kind) {
                (TermKind::S, TermKind::S) | (TermKind::K, TermKind::K) => {}
                (TermKind::Var(x), TermKind::Var(y)) if x == y => {}
                (TermKind::App(f, x), TermKind::App(g, y)) => {
                    stack.push((f, g));
                    stack.push((x, y));
                }
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

// Deep spines would otherwise drop recursively.
impl Drop for Node {
    fn drop(&mut self) {
        if !matches!(self.kind, TermKind::App(..)) {
            return;
        }
        let mut stack = Vec::new();
        if let TermKind::App(f, a) = std::mem::replace(&mut self.kind, TermKind::K) {
            stack.push(f);
            stack.push(a);
        }
        while let Some(t) = stack.pop() {
            if let Ok(mut node) = Arc::try_unwrap(t.0) {
                if let TermKind::App(f, a) = std::mem::replace(&mut node.kind, TermKind::K) {
                    stack.push(f);
                    stack.push(a);
                }
            }
        }
    }
}

/// Surface syntax: `S`, `K`, identifiers, and fully parenthesised pairs `(f a)`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            TermKind::S => f.write_str("S"),
            TermKind::K => f.write_str("K"),
            TermKind::Var(x) => f.write_str(x),
            TermKind::App(g, a) => write!(f, "({g} {a})"),
        }
    }
}
