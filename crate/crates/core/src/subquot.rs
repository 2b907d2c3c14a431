//! The subquotient functor from PERs to modest sets, and instance checks for
//! its functoriality and full faithfulness.

use crate::asm::{
    asm_morphisms_equal, is_modest, mk_asm_morphism_indexed, mk_assembly, realizes, AsmMorphism, Assembly,
    ModestyReport, Witness,
};
use crate::error::{Error, Result};
use crate::per::{mk_per_morphism, trackers_equivalent, Per, PerMorphism};
use crate::reduce::Fuel;
use crate::term::Term;
use crate::tristate::TriState;

/// The assembly of a PER's blocks, each block realized by its own members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubquotientAssembly {
    pub underlying: Assembly,
    pub source: Per,
}

/// Element label of block `i`.
pub fn block_label(i: usize) -> String {
    format!("c{i}")
}

pub fn subquotient(r: &Per) -> SubquotientAssembly {
    let elements = r.blocks().iter().enumerate().map(|(i, b)| (block_label(i), b.clone()));
    let underlying =
        mk_assembly(format!("subQuot({})", r.name()), elements).expect("validated blocks are nonempty and closed");
    SubquotientAssembly { underlying, source: r.clone() }
}

impl SubquotientAssembly {
    pub fn realizes(&self, a: &Term, block: usize, fuel: Fuel) -> Result<TriState> {
        realizes(&self.underlying, a, &block_label(block), fuel)
    }
}

pub fn check_subquotient_modest(r: &Per, fuel: Fuel) -> ModestyReport {
    is_modest(&subquotient(r).underlying, fuel)
}

/// The assembly morphism induced by a PER morphism: block `i` goes to the
/// block holding `t g`, `g` the first generator of block `i`.
pub fn subquot_morphism(f: &PerMorphism, fuel: Fuel) -> Result<AsmMorphism> {
    let (r, s) = (f.source(), f.target());
    let mut mapping = Vec::with_capacity(r.block_count());
    for (i, block) in r.blocks().iter().enumerate() {
        let image = Term::app(f.tracker().clone(), block[0].clone());
        match s.block_of(&image, fuel) {
            Ok(Some(j)) => mapping.push(j),
            Ok(None) => return Err(Error::TargetBlockNotFound(block_label(i))),
            Err(why) => return Err(Error::Undecided(format!("image of {}: {why}", block_label(i)))),
        }
    }
    mk_asm_morphism_indexed(&subquotient(r).underlying, &subquotient(s).underlying, mapping, f.tracker(), fuel)
}

/// The PER morphism tracked by the tracker of `m : subQuot(R) -> subQuot(S)`.
pub fn perify(
    a: &SubquotientAssembly,
    b: &SubquotientAssembly,
    m: &AsmMorphism,
    fuel: Fuel,
) -> Result<PerMorphism> {
    if *m.source() != a.underlying || *m.target() != b.underlying {
        return Err(Error::SignatureMismatch(format!(
            "morphism {} -> {} is not {} -> {}",
            m.source().name(),
            m.target().name(),
            a.underlying.name(),
            b.underlying.name()
        )));
    }
    mk_per_morphism(&a.source, &b.source, m.tracker(), fuel)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullFaithfulnessReport {
    pub verdict: TriState,
    pub checks: Vec<Witness>,
    pub violations: Vec<String>,
}

/// Instance check of full faithfulness over a finite set of candidate
/// trackers `R -> S`. A clean report certifies only these instances.
pub fn check_fully_faithful(r: &Per, s: &Per, candidates: &[Term], fuel: Fuel) -> FullFaithfulnessReport {
    let mut checks = Vec::new();
    let mut morphisms = Vec::new();
    let (sr, ss) = (subquotient(r), subquotient(s));

    for (n, t) in candidates.iter().enumerate() {
        let subject = format!("candidate {n} `{t}`");
        let built = mk_per_morphism(r, s, t, fuel).and_then(|f| {
            let image = subquot_morphism(&f, fuel)?;
            Ok((f, image))
        });
        match built {
            Ok(pair) => morphisms.push(pair),
            Err(e) => {
                checks.push(Witness { subject: format!("{subject} tracks"), inputs: vec![t.clone()], verdict: err_verdict(&e) });
            }
        }
    }

    // fullness: every image has a preimage that maps back onto it
    for (n, (f, image)) in morphisms.iter().enumerate() {
        let verdict = perify(&sr, &ss, image, fuel).and_then(|p| {
            let back = subquot_morphism(&p, fuel)?;
            let same_image = TriState::from_bool(asm_morphisms_equal(&back, image)?);
            Ok(same_image.and(trackers_equivalent(p.tracker(), f.tracker(), r, s, fuel)))
        });
        let verdict = verdict.unwrap_or_else(|e| err_verdict(&e));
        checks.push(Witness {
            subject: format!("fullness at candidate {n}"),
            inputs: vec![f.tracker().clone()],
            verdict,
        });
    }

    // faithfulness, and well-definedness in the other direction
    for x in 0..morphisms.len() {
        for y in x + 1..morphisms.len() {
            let (fx, ix) = &morphisms[x];
            let (fy, iy) = &morphisms[y];
            let same_image = asm_morphisms_equal(ix, iy).expect("images share a signature");
            let equivalent = trackers_equivalent(fx.tracker(), fy.tracker(), r, s, fuel);
            let verdict = match (&equivalent, same_image) {
                (TriState::Unknown(_), _) => equivalent.clone(),
                (e, same) => TriState::from_bool(e.holds() == same),
            };
            checks.push(Witness {
                subject: format!("faithfulness at candidates {x}, {y} (same image: {same_image}, equivalent: {})", equivalent.label()),
                inputs: vec![fx.tracker().clone(), fy.tracker().clone()],
                verdict,
            });
        }
    }

    let violations = checks.iter().filter(|c| c.verdict.fails()).map(|c| c.subject.clone()).collect();
    FullFaithfulnessReport { verdict: TriState::all(checks.iter().map(|c| c.verdict.clone())), checks, violations }
}

fn err_verdict(e: &Error) -> TriState {
    match e {
        Error::Undecided(why) => TriState::Unknown(why.clone()),
        _ => TriState::Fails,
    }
}
