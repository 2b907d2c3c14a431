//! Modest sets as subquotients: the canonical PER of a modest set and the
//! isomorphism `M ≅ subQuot(canonical_per(M))`.

use crate::asm::{
    asm_compose, asm_identity, asm_morphisms_equal, is_modest, mk_asm_morphism_indexed, AsmMorphism, Assembly,
    ModestyReport, TrackerReport,
};
use crate::combinators::{derived, Derived};
use crate::error::{Error, Result};
use crate::per::{mk_per, Per};
use crate::reduce::Fuel;
use crate::subquot::subquotient;
use crate::tristate::TriState;

/// One block per element, holding that element's realizers.
pub fn canonical_per(m: &Assembly, fuel: Fuel) -> Result<Per> {
    let modesty = is_modest(m, fuel);
    match &modesty.verdict {
        TriState::Holds => {}
        TriState::Fails => return Err(Error::NotModest(Box::new(modesty))),
        TriState::Unknown(why) => return Err(Error::Undecided(why.clone())),
    }
    let blocks = m.iter().map(|(_, rs)| rs.to_vec()).collect();
    mk_per(format!("canonical({})", m.name()), blocks, fuel)
}

/// `M -> subQuot(canonical_per(M))`, tracked by `i`. Element `x` goes to the
/// block made of its own realizers, whichever realizer one looks at.
pub fn forward(m: &Assembly, fuel: Fuel) -> Result<AsmMorphism> {
    let target = subquotient(&canonical_per(m, fuel)?);
    mk_asm_morphism_indexed(m, &target.underlying, (0..m.len()).collect(), &derived(Derived::I), fuel)
}

/// `subQuot(canonical_per(M)) -> M`, tracked by `i`. Block `i` goes to the
/// unique element whose realizer set it is.
pub fn backward(m: &Assembly, fuel: Fuel) -> Result<AsmMorphism> {
    let source = subquotient(&canonical_per(m, fuel)?);
    mk_asm_morphism_indexed(&source.underlying, m, (0..m.len()).collect(), &derived(Derived::I), fuel)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoReport {
    pub modesty: ModestyReport,
    /// `None` when the morphism could not be built.
    pub forward_ok: Option<TrackerReport>,
    pub backward_ok: Option<TrackerReport>,
    /// `forward . backward = id`
    pub fb_identity: TriState,
    /// `backward . forward = id`
    pub bf_identity: TriState,
    pub verdict: TriState,
}

fn report_verdict(r: &Option<TrackerReport>) -> TriState {
    r.as_ref().map_or(TriState::Fails, |r| r.verdict.clone())
}

fn identity_law(f: &AsmMorphism, g: &AsmMorphism, fuel: Fuel) -> TriState {
    let law = asm_compose(f, g, fuel)
        .and_then(|c| Ok((asm_identity(c.source(), fuel)?, c)))
        .and_then(|(id, c)| asm_morphisms_equal(&c, &id));
    match law {
        Ok(b) => TriState::from_bool(b),
        Err(Error::Undecided(why)) => TriState::Unknown(why),
        Err(_) => TriState::Fails,
    }
}

/// Check that `forward` and `backward` are mutually inverse morphisms.
pub fn check_iso(m: &Assembly, fuel: Fuel) -> IsoReport {
    let modesty = is_modest(m, fuel);
    if !modesty.verdict.holds() {
        let verdict = modesty.verdict.clone();
        return IsoReport {
            modesty,
            forward_ok: None,
            backward_ok: None,
            fb_identity: TriState::unknown("not computed"),
            bf_identity: TriState::unknown("not computed"),
            verdict,
        };
    }
    let fwd = forward(m, fuel);
    let bwd = backward(m, fuel);
    let (fb_identity, bf_identity) = match (&fwd, &bwd) {
        (Ok(f), Ok(b)) => (identity_law(b, f, fuel), identity_law(f, b, fuel)),
        (Err(Error::Undecided(why)), _) | (_, Err(Error::Undecided(why))) => {
            (TriState::Unknown(why.clone()), TriState::Unknown(why.clone()))
        }
        _ => (TriState::Fails, TriState::Fails),
    };
    let forward_ok = fwd.ok().map(|f| f.verification().clone());
    let backward_ok = bwd.ok().map(|b| b.verification().clone());
    let verdict = TriState::all([
        modesty.verdict.clone(),
        report_verdict(&forward_ok),
        report_verdict(&backward_ok),
        fb_identity.clone(),
        bf_identity.clone(),
    ]);
    IsoReport { modesty, forward_ok, backward_ok, fb_identity, bf_identity, verdict }
}
