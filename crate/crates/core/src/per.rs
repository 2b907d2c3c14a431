//! Finitely presented partial equivalence relations and the category of
//! PERs with tracker-equivalence classes as morphisms.
//!
//! A `Per` is a list of disjoint blocks of generators. Two terms are related
//! when each is convertible to a generator of the same block. The relation is
//! symmetric and transitive by construction, and its domain is the union of
//! the blocks' conversion classes.

use crate::asm::{compose_tracker, TrackerReport, Witness};
use crate::combinators::{derived, Derived};
use crate::error::{Error, Result};
use crate::reduce::{convertible, Fuel};
use crate::term::Term;
use crate::tristate::TriState;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Per {
    name: String,
    blocks: Vec<Vec<Term>>,
}

/// Validate and build a PER. Blocks must be nonempty, closed, and pairwise
/// non-convertible at `fuel`.
pub fn mk_per(name: impl Into<String>, blocks: Vec<Vec<Term>>, fuel: Fuel) -> Result<Per> {
    for (i, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::EmptyBlock(i));
        }
        if let Some(open) = block.iter().find(|t| !t.is_closed()) {
            return Err(Error::OpenTerm(open.clone()));
        }
    }
    let mut undecided = None;
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            for a in &blocks[i] {
                for b in &blocks[j] {
                    match convertible(a, b, fuel) {
                        TriState::Holds => {
                            return Err(Error::OverlappingBlocks { i, j, left: a.clone(), right: b.clone() });
                        }
                        TriState::Unknown(why) => {
                            undecided.get_or_insert_with(|| format!("blocks {i} and {j}: `{a}` vs `{b}`: {why}"));
                        }
                        TriState::Fails => {}
                    }
                }
            }
        }
    }
    if let Some(why) = undecided {
        return Err(Error::Undecided(why));
    }
    Ok(Per { name: name.into(), blocks })
}

/// A generator together with the block it belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerDomainElement {
    pub term: Term,
    pub block_index: usize,
}

impl Per {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn blocks(&self) -> &[Vec<Term>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Verdict of "`a` is convertible to some generator of block `i`".
    pub fn in_block(&self, a: &Term, i: usize, fuel: Fuel) -> TriState {
        TriState::any(self.blocks[i].iter().map(|g| convertible(a, g, fuel)))
    }

    /// The block containing `a`: `Ok(Some(i))` if decided in, `Ok(None)` if
    /// decidedly outside every block, `Err(reason)` if undecided.
    pub fn block_of(&self, a: &Term, fuel: Fuel) -> std::result::Result<Option<usize>, String> {
        let mut unknown = None;
        for i in 0..self.blocks.len() {
            match self.in_block(a, i, fuel) {
                TriState::Holds => return Ok(Some(i)),
                TriState::Unknown(why) => {
                    unknown.get_or_insert(why);
                }
                TriState::Fails => {}
            }
        }
        match unknown {
            Some(why) => Err(why),
            None => Ok(None),
        }
    }
}

/// `a ≈ b`.
///
/// `Holds` when some block has generators convertible to `a` and to `b`.
/// `Fails` when the two decidedly land in distinct blocks, or when for every
/// block one of the two decidedly misses it.
pub fn related(r: &Per, a: &Term, b: &Term, fuel: Fuel) -> TriState {
    let mut hits_a = None;
    let mut hits_b = None;
    let mut per_block = Vec::with_capacity(r.blocks.len());
    for i in 0..r.blocks.len() {
        let va = r.in_block(a, i, fuel);
        let vb = r.in_block(b, i, fuel);
        if va.holds() && vb.holds() {
            return TriState::Holds;
        }
        if va.holds() {
            hits_a.get_or_insert(i);
        }
        if vb.holds() {
            hits_b.get_or_insert(i);
        }
        per_block.push(va.and(vb));
    }
    if hits_a.is_some() && hits_b.is_some() {
        // distinct blocks, since equal ones returned above
        return TriState::Fails;
    }
    // Fails iff every block's conjunction fails.
    TriState::any(per_block)
}

/// All generators with their block indices.
pub fn per_domain(r: &Per) -> Vec<PerDomainElement> {
    r.blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.iter().map(move |t| PerDomainElement { term: t.clone(), block_index: i }))
        .collect()
}

/// `t` sends related generators of `r` to `s`-related terms: one obligation
/// per unordered pair of generators in the same block, diagonal included.
pub fn check_tracker_per(t: &Term, r: &Per, s: &Per, fuel: Fuel) -> Result<TrackerReport> {
    if !t.is_closed() {
        return Err(Error::OpenTerm(t.clone()));
    }
    let mut witnesses = Vec::new();
    for (i, block) in r.blocks.iter().enumerate() {
        for (p, a) in block.iter().enumerate() {
            for b in &block[p..] {
                let ta = Term::app(t.clone(), a.clone());
                let tb = Term::app(t.clone(), b.clone());
                witnesses.push(Witness {
                    subject: format!("{}[{i}]: t {a} ≈ t {b}", r.name),
                    inputs: vec![a.clone(), b.clone()],
                    verdict: related(s, &ta, &tb, fuel),
                });
            }
        }
    }
    Ok(TrackerReport::from_witnesses(witnesses))
}

/// For every generator `g` of `r`, `t g ≈ u g` in `s`.
pub fn trackers_equivalent(t: &Term, u: &Term, r: &Per, s: &Per, fuel: Fuel) -> TriState {
    TriState::all(per_domain(r).into_iter().map(|d| {
        related(s, &Term::app(t.clone(), d.term.clone()), &Term::app(u.clone(), d.term), fuel)
    }))
}

/// A morphism of PERs: a verified tracker standing for its equivalence class.
#[derive(Clone, Debug)]
pub struct PerMorphism {
    source: Per,
    target: Per,
    tracker: Term,
    verification: TrackerReport,
}

pub fn mk_per_morphism(r: &Per, s: &Per, t: &Term, fuel: Fuel) -> Result<PerMorphism> {
    let report = check_tracker_per(t, r, s, fuel)?;
    match &report.verdict {
        TriState::Holds => Ok(PerMorphism {
            source: r.clone(),
            target: s.clone(),
            tracker: t.clone(),
            verification: report,
        }),
        TriState::Fails => Err(Error::NotTracked(Box::new(report))),
        TriState::Unknown(_) => Err(Error::Undecided(report.to_string())),
    }
}

impl PerMorphism {
    pub fn source(&self) -> &Per {
        &self.source
    }

    pub fn target(&self) -> &Per {
        &self.target
    }

    pub fn tracker(&self) -> &Term {
        &self.tracker
    }

    pub fn verification(&self) -> &TrackerReport {
        &self.verification
    }

    /// Morphism equality: the trackers are equivalent.
    pub fn equivalent(&self, other: &PerMorphism, fuel: Fuel) -> Result<TriState> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::SignatureMismatch(format!(
                "{} -> {} vs {} -> {}",
                self.source.name, self.target.name, other.source.name, other.target.name
            )));
        }
        Ok(trackers_equivalent(&self.tracker, &other.tracker, &self.source, &self.target, fuel))
    }
}

pub fn per_identity(r: &Per, fuel: Fuel) -> Result<PerMorphism> {
    mk_per_morphism(r, r, &derived(Derived::I), fuel)
}

/// `g . f`, tracked by `[x] g (f x)`.
pub fn per_compose(f: &PerMorphism, g: &PerMorphism, fuel: Fuel) -> Result<PerMorphism> {
    if f.target != g.source {
        return Err(Error::SignatureMismatch(format!(
            "cannot compose {} -> {} with {} -> {}",
            f.source.name, f.target.name, g.source.name, g.target.name
        )));
    }
    mk_per_morphism(&f.source, &g.target, &compose_tracker(&f.tracker, &g.tracker), fuel)
}
