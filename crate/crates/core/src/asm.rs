//! Finitely presented assemblies, modest sets and tracked morphisms.
//!
//! Each element carries finitely many generator realizers; a term realizes an
//! element when it is convertible to one of them, so the realizability
//! relation is closed under conversion.

use std::fmt;

use indexmap::IndexMap;

use crate::combinators::{abstract_var, derived, Derived};
use crate::error::{Error, Result};
use crate::reduce::{convertible, Fuel};
use crate::term::Term;
use crate::tristate::TriState;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assembly {
    name: String,
    realizers: IndexMap<String, Vec<Term>>,
}

/// Validate and build an assembly.
pub fn mk_assembly<N, I>(name: N, elements: I) -> Result<Assembly>
where
    N: Into<String>,
    I: IntoIterator<Item = (String, Vec<Term>)>,
{
    let mut realizers = IndexMap::new();
    for (element, terms) in elements {
        if realizers.contains_key(&element) {
            return Err(Error::DuplicateElement(element));
        }
        if terms.is_empty() {
            return Err(Error::EmptyRealizerSet(element));
        }
        if let Some(open) = terms.iter().find(|t| !t.is_closed()) {
            return Err(Error::OpenTerm(open.clone()));
        }
        realizers.insert(element, terms);
    }
    Ok(Assembly { name: name.into(), realizers })
}

impl Assembly {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.realizers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realizers.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = &str> {
        self.realizers.keys().map(String::as_str)
    }

    pub fn element(&self, idx: usize) -> &str {
        self.realizers.get_index(idx).expect("element index in range").0
    }

    pub fn index_of(&self, element: &str) -> Result<usize> {
        self.realizers
            .get_index_of(element)
            .ok_or_else(|| Error::UnknownElement(element.to_string()))
    }

    pub fn realizers_of(&self, element: &str) -> Result<&[Term]> {
        self.realizers
            .get(element)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownElement(element.to_string()))
    }

    pub fn realizers_at(&self, idx: usize) -> &[Term] {
        self.realizers.get_index(idx).expect("element index in range").1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Term])> {
        self.realizers.iter().map(|(e, r)| (e.as_str(), r.as_slice()))
    }
}

fn realizes_at(a: &Assembly, t: &Term, idx: usize, fuel: Fuel) -> TriState {
    TriState::any(a.realizers_at(idx).iter().map(|r| convertible(t, r, fuel)))
}

/// Does `t` realize element `x`?
pub fn realizes(a: &Assembly, t: &Term, x: &str, fuel: Fuel) -> Result<TriState> {
    if !t.is_closed() {
        return Err(Error::OpenTerm(t.clone()));
    }
    let idx = a.index_of(x)?;
    Ok(realizes_at(a, t, idx, fuel))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModestyReport {
    pub verdict: TriState,
    /// `(x, y, r)`: `r` is a listed realizer of `x` that also realizes `y`.
    pub counterexample: Option<(String, String, Term)>,
}

impl fmt::Display for ModestyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            Some((x, y, r)) => write!(f, "{}: `{r}` realizes both {x} and {y}", self.verdict),
            None => write!(f, "{}", self.verdict),
        }
    }
}

/// Do elements `x` and `y` share a realizer? Returns the verdict of
/// "they share one" together with the shared listed realizer of `x`.
pub fn share_realizer(a: &Assembly, x: &str, y: &str, fuel: Fuel) -> Result<(TriState, Option<Term>)> {
    let (ix, iy) = (a.index_of(x)?, a.index_of(y)?);
    Ok(share_at(a, ix, iy, fuel))
}

fn share_at(a: &Assembly, ix: usize, iy: usize, fuel: Fuel) -> (TriState, Option<Term>) {
    let mut verdicts = Vec::new();
    for r in a.realizers_at(ix) {
        for s in a.realizers_at(iy) {
            let v = convertible(r, s, fuel);
            if v.holds() {
                return (TriState::Holds, Some(r.clone()));
            }
            verdicts.push(v);
        }
    }
    (TriState::any(verdicts), None)
}

/// Check that no two distinct elements share a realizer.
pub fn is_modest(a: &Assembly, fuel: Fuel) -> ModestyReport {
    let mut unknown = None;
    for ix in 0..a.len() {
        for iy in ix + 1..a.len() {
            match share_at(a, ix, iy, fuel) {
                (TriState::Holds, Some(r)) => {
                    return ModestyReport {
                        verdict: TriState::Fails,
                        counterexample: Some((a.element(ix).to_string(), a.element(iy).to_string(), r)),
                    };
                }
                (TriState::Unknown(why), _) => {
                    unknown.get_or_insert(format!("{} vs {}: {why}", a.element(ix), a.element(iy)));
                }
                _ => {}
            }
        }
    }
    ModestyReport { verdict: unknown.map_or(TriState::Holds, TriState::Unknown), counterexample: None }
}

/// One proof obligation of a tracker check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub subject: String,
    pub inputs: Vec<Term>,
    pub verdict: TriState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackerReport {
    pub verdict: TriState,
    pub witnesses: Vec<Witness>,
}

impl TrackerReport {
    pub fn from_witnesses(witnesses: Vec<Witness>) -> TrackerReport {
        let verdict = TriState::all(witnesses.iter().map(|w| w.verdict.clone()));
        TrackerReport { verdict, witnesses }
    }
}

impl fmt::Display for TrackerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.verdict)?;
        if let Some(w) = self.witnesses.iter().find(|w| !w.verdict.holds()) {
            write!(f, " at {} ({})", w.subject, w.verdict)?;
        }
        Ok(())
    }
}

/// Element map of an assembly morphism, by element index.
pub type Mapping = Vec<usize>;

fn resolve_mapping(a: &Assembly, b: &Assembly, mapping: &[(String, String)]) -> Result<Mapping> {
    let mut out = vec![None; a.len()];
    for (x, y) in mapping {
        let ix = a.index_of(x)?;
        out[ix] = Some(b.index_of(y)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, m)| m.ok_or_else(|| Error::PartialMapping(a.element(i).to_string())))
        .collect()
}

/// For every element `x` and listed realizer `a` of `x`, `t a` must realize `f(x)`.
pub fn check_tracker_asm(
    a: &Assembly,
    b: &Assembly,
    mapping: &[(String, String)],
    t: &Term,
    fuel: Fuel,
) -> Result<TrackerReport> {
    let mapping = resolve_mapping(a, b, mapping)?;
    check_tracker_indexed(a, b, &mapping, t, fuel)
}

fn check_tracker_indexed(a: &Assembly, b: &Assembly, mapping: &[usize], t: &Term, fuel: Fuel) -> Result<TrackerReport> {
    if !t.is_closed() {
        return Err(Error::OpenTerm(t.clone()));
    }
    let mut witnesses = Vec::new();
    for (ix, (x, rs)) in a.iter().enumerate() {
        let target = mapping[ix];
        for r in rs {
            let probe = Term::app(t.clone(), r.clone());
            witnesses.push(Witness {
                subject: format!("{x} -> {}", b.element(target)),
                inputs: vec![r.clone()],
                verdict: realizes_at(b, &probe, target, fuel),
            });
        }
    }
    Ok(TrackerReport::from_witnesses(witnesses))
}

#[derive(Clone, Debug)]
pub struct AsmMorphism {
    source: Assembly,
    target: Assembly,
    mapping: Mapping,
    tracker: Term,
    verification: TrackerReport,
}

fn require_tracked(report: TrackerReport) -> Result<TrackerReport> {
    match &report.verdict {
        TriState::Holds => Ok(report),
        TriState::Fails => Err(Error::NotTracked(Box::new(report))),
        TriState::Unknown(_) => Err(Error::Undecided(report.to_string())),
    }
}

/// Build a morphism; succeeds only when `t` is verified to track the map.
pub fn mk_asm_morphism(
    a: &Assembly,
    b: &Assembly,
    mapping: &[(String, String)],
    t: &Term,
    fuel: Fuel,
) -> Result<AsmMorphism> {
    let mapping = resolve_mapping(a, b, mapping)?;
    mk_asm_morphism_indexed(a, b, mapping, t, fuel)
}

pub(crate) fn mk_asm_morphism_indexed(
    a: &Assembly,
    b: &Assembly,
    mapping: Mapping,
    t: &Term,
    fuel: Fuel,
) -> Result<AsmMorphism> {
    let verification = require_tracked(check_tracker_indexed(a, b, &mapping, t, fuel)?)?;
    Ok(AsmMorphism { source: a.clone(), target: b.clone(), mapping, tracker: t.clone(), verification })
}

impl AsmMorphism {
    pub fn source(&self) -> &Assembly {
        &self.source
    }

    pub fn target(&self) -> &Assembly {
        &self.target
    }

    pub fn tracker(&self) -> &Term {
        &self.tracker
    }

    pub fn verification(&self) -> &TrackerReport {
        &self.verification
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    /// Image of element `x`.
    pub fn apply(&self, x: &str) -> Result<&str> {
        let ix = self.source.index_of(x)?;
        Ok(self.target.element(self.mapping[ix]))
    }

    pub fn mapping_by_name(&self) -> Vec<(String, String)> {
        self.mapping
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.source.element(i).to_string(), self.target.element(j).to_string()))
            .collect()
    }
}

/// Morphisms are equal when their maps agree pointwise; trackers are ignored.
pub fn asm_morphisms_equal(f: &AsmMorphism, g: &AsmMorphism) -> Result<bool> {
    if f.source != g.source || f.target != g.target {
        return Err(Error::SignatureMismatch(format!(
            "{} -> {} vs {} -> {}",
            f.source.name, f.target.name, g.source.name, g.target.name
        )));
    }
    Ok(f.mapping == g.mapping)
}

pub fn asm_identity(a: &Assembly, fuel: Fuel) -> Result<AsmMorphism> {
    mk_asm_morphism_indexed(a, a, (0..a.len()).collect(), &derived(Derived::I), fuel)
}

/// `g . f`, tracked by `[x] g (f x)`.
pub fn asm_compose(f: &AsmMorphism, g: &AsmMorphism, fuel: Fuel) -> Result<AsmMorphism> {
    if f.target != g.source {
        return Err(Error::SignatureMismatch(format!(
            "cannot compose {} -> {} with {} -> {}",
            f.source.name, f.target.name, g.source.name, g.target.name
        )));
    }
    let mapping = f.mapping.iter().map(|&j| g.mapping[j]).collect();
    mk_asm_morphism_indexed(&f.source, &g.target, mapping, &compose_tracker(&f.tracker, &g.tracker), fuel)
}

/// `[x] g (f x)` for closed trackers `f` and `g`.
pub fn compose_tracker(f: &Term, g: &Term) -> Term {
    let x = Term::var("x");
    abstract_var("x", &Term::app(g.clone(), Term::app(f.clone(), x)))
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
    fn asm(name: &str, els: &[(&str, Vec<Term>)]) -> Result<Assembly> {
        mk_assembly(name, els.iter().map(|(e, r)| (e.to_string(), r.clone())))
    }
    fn map(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }
    const F: Fuel = Fuel(10);

    #[test]
    fn construction_errors() {
        assert!(asm("A", &[("x", vec![k()])]).is_ok());
        assert!(matches!(asm("A", &[("x", vec![])]), Err(Error::EmptyRealizerSet(e)) if e == "x"));
        assert!(matches!(
            asm("A", &[("x", vec![k()]), ("x", vec![s()])]),
            Err(Error::DuplicateElement(_))
        ));
        assert!(matches!(asm("A", &[("x", vec![Term::var("v")])]), Err(Error::OpenTerm(_))));
        // elements may share realizers
        assert!(asm("A", &[("x", vec![k()]), ("y", vec![k()])]).is_ok());
    }

    #[test]
    fn realizes_examples() {
        let a = asm("A", &[("x", vec![k()])]).unwrap();
        let kks = Term::apply(k(), [k(), s()]);
        assert_eq!(realizes(&a, &kks, "x", F).unwrap(), TriState::Holds);
        assert_eq!(realizes(&a, &s(), "x", F).unwrap(), TriState::Fails);
        let probe = Term::app(derived(Derived::Fix), derived(Derived::I));
        assert!(realizes(&a, &probe, "x", Fuel(5)).unwrap().is_unknown());
        assert!(matches!(realizes(&a, &k(), "nope", F), Err(Error::UnknownElement(_))));
    }

    #[test]
    fn modesty_examples() {
        let m = asm("M", &[("x", vec![k()]), ("y", vec![s()])]).unwrap();
        assert_eq!(is_modest(&m, F).verdict, TriState::Holds);
        let kks = Term::apply(k(), [k(), s()]);
        let n = asm("N", &[("x", vec![k()]), ("y", vec![kks])]).unwrap();
        let report = is_modest(&n, F);
        assert_eq!(report.verdict, TriState::Fails);
        assert_eq!(report.counterexample, Some(("x".into(), "y".into(), k())));
        // the reversed pair also shares a realizer
        assert!(share_realizer(&n, "y", "x", F).unwrap().0.holds());
        let one = asm("O", &[("x", vec![k(), s()])]).unwrap();
        assert_eq!(is_modest(&one, F).verdict, TriState::Holds);
    }

    #[test]
    fn tracker_examples() {
        let a = asm("A", &[("x", vec![k()])]).unwrap();
        let i = derived(Derived::I);
        let r = check_tracker_asm(&a, &a, &map(&[("x", "x")]), &i, F).unwrap();
        assert_eq!(r.verdict, TriState::Holds);

        let b = asm("B", &[("y", vec![s()])]).unwrap();
        let ks = Term::app(k(), s());
        let r = check_tracker_asm(&a, &b, &map(&[("x", "y")]), &ks, F).unwrap();
        assert_eq!(r.verdict, TriState::Holds);

        // K a is a normal form distinct from every listed realizer
        let c = asm("C", &[("x", vec![k(), s()])]).unwrap();
        let r = check_tracker_asm(&c, &c, &map(&[("x", "x")]), &k(), F).unwrap();
        assert_eq!(r.verdict, TriState::Fails);
        assert_eq!(r.witnesses.len(), 2);
        assert!(matches!(
            mk_asm_morphism(&c, &c, &map(&[("x", "x")]), &k(), F),
            Err(Error::NotTracked(_))
        ));
        assert!(matches!(
            check_tracker_asm(&c, &c, &[], &i, F),
            Err(Error::PartialMapping(_))
        ));
    }

    #[test]
    fn undecided_tracker() {
        let a = asm("A", &[("x", vec![k()])]).unwrap();
        let loops = Term::app(k(), Term::app(derived(Derived::Fix), derived(Derived::I)));
        assert!(matches!(
            mk_asm_morphism(&a, &a, &map(&[("x", "x")]), &loops, Fuel(5)),
            Err(Error::Undecided(_))
        ));
    }

    #[test]
    fn extensional_equality_ignores_trackers() {
        let a = asm("A", &[("x", vec![k()]), ("y", vec![s()])]).unwrap();
        let i = derived(Derived::I);
        let skk = Term::apply(s(), [k(), k()]);
        let ident = map(&[("x", "x"), ("y", "y")]);
        let f = mk_asm_morphism(&a, &a, &ident, &i, F).unwrap();
        let g = mk_asm_morphism(&a, &a, &ident, &skk, F).unwrap();
        assert!(asm_morphisms_equal(&f, &g).unwrap());
        assert!(asm_morphisms_equal(&f, &f).unwrap());
        let kk = Term::app(k(), k());
        let c1 = mk_asm_morphism(&a, &a, &map(&[("x", "x"), ("y", "x")]), &kk, F).unwrap();
        let c2 = mk_asm_morphism(&a, &a, &map(&[("x", "x"), ("y", "x")]), &kk, F).unwrap();
        assert!(asm_morphisms_equal(&c1, &c2).unwrap());
        assert!(!asm_morphisms_equal(&f, &c1).unwrap());
        let b = asm("B", &[("z", vec![k()])]).unwrap();
        let h = mk_asm_morphism(&a, &b, &map(&[("x", "z"), ("y", "z")]), &kk, F).unwrap();
        assert!(matches!(asm_morphisms_equal(&f, &h), Err(Error::SignatureMismatch(_))));
    }

    #[test]
    fn identity_and_composition() {
        let fuel = Fuel(100);
        let a = asm("A", &[("x", vec![k()]), ("y", vec![s()])]).unwrap();
        let b = asm("B", &[("u", vec![k()])]).unwrap();
        let f = mk_asm_morphism(&a, &b, &map(&[("x", "u"), ("y", "u")]), &Term::app(k(), k()), fuel).unwrap();
        let left = asm_compose(&asm_identity(&a, fuel).unwrap(), &f, fuel).unwrap();
        let right = asm_compose(&f, &asm_identity(&b, fuel).unwrap(), fuel).unwrap();
        assert!(asm_morphisms_equal(&left, &f).unwrap());
        assert!(asm_morphisms_equal(&right, &f).unwrap());
        assert!(matches!(asm_compose(&f, &f, fuel), Err(Error::SignatureMismatch(_))));
        assert_eq!(f.apply("y").unwrap(), "u");
    }
}
