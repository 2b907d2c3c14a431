//! Random instance generators and batch law checks.
//!
//! Each law family draws `samples` independent instances. Sample `n` is
//! generated from its own RNG seeded by `(seed, family, n)`, so results do not
//! depend on evaluation order and samples run in parallel.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::asm::{asm_compose, asm_identity, asm_morphisms_equal, mk_assembly, mk_asm_morphism, Assembly};
use crate::combinators::{abstract_var, derived, numeral, pair, prim_rec, predecessor, zero_test, Derived};
use crate::equiv::{backward, check_iso, forward};
use crate::per::{mk_per, mk_per_morphism, per_compose, per_identity, related, Per, PerMorphism};
use crate::reduce::{convertible, normalize, reduces_to, Fuel};
use crate::subquot::{check_subquotient_modest, perify, subquot_morphism, subquotient};
use crate::term::Term;
use crate::tristate::TriState;

pub mod gen {
    use super::*;

    /// A uniformly split random binary tree with exactly `leaves` leaves
    /// drawn from `atoms`.
    pub fn tree<R: Rng>(rng: &mut R, leaves: usize, atoms: &[Term]) -> Term {
        if leaves <= 1 {
            return atoms.choose(rng).expect("nonempty atom set").clone();
        }
        let left = rng.gen_range(1..leaves);
        Term::app(tree(rng, left, atoms), tree(rng, leaves - left, atoms))
    }

    pub fn sk() -> Vec<Term> {
        vec![Term::s(), Term::k()]
    }

    /// A random closed term in normal form with at most `max_leaves` leaves.
    pub fn closed_normal<R: Rng>(rng: &mut R, max_leaves: usize) -> Term {
        loop {
            let n = rng.gen_range(1..=max_leaves);
            let t = tree(rng, n, &sk());
            if let Some(nf) = normalize(&t, Fuel(200)).normal_form() {
                if nf.size() as usize <= max_leaves {
                    return nf.clone();
                }
            }
        }
    }

    /// A random closed term (not necessarily normal) that normalizes within
    /// a small budget.
    pub fn closed_normalizing<R: Rng>(rng: &mut R, max_leaves: usize) -> Term {
        loop {
            let n = rng.gen_range(1..=max_leaves);
            let t = tree(rng, n, &sk());
            if normalize(&t, Fuel(200)).normal_form().is_some() {
                return t;
            }
        }
    }

    /// A random term over `S`, `K` and `x` with at least one `x`.
    pub fn open_body<R: Rng>(rng: &mut R, x: &str, max_leaves: usize) -> Term {
        let atoms = [Term::s(), Term::k(), Term::var(x)];
        loop {
            let n = rng.gen_range(1..=max_leaves);
            let t = tree(rng, n, &atoms);
            if t.occurs(x) {
                return t;
            }
        }
    }

    /// Every closed normal form with at most `max_leaves` leaves, smallest first.
    /// Distinct entries are pairwise non-convertible.
    pub fn normal_forms(max_leaves: usize) -> Vec<Term> {
        let mut by_size: Vec<Vec<Term>> = vec![Vec::new(), sk()];
        for n in 2..=max_leaves {
            let mut level = Vec::new();
            for left in 1..n {
                for f in &by_size[left] {
                    for a in &by_size[n - left] {
                        let t = Term::app(f.clone(), a.clone());
                        if t.is_normal() {
                            level.push(t);
                        }
                    }
                }
            }
            by_size.push(level);
        }
        by_size.into_iter().flatten().collect()
    }

    /// A term convertible to `g`, sometimes `g` itself.
    pub fn variant<R: Rng>(rng: &mut R, g: &Term) -> Term {
        match rng.gen_range(0..4) {
            0 => Term::app(derived(Derived::I), g.clone()),
            1 => Term::apply(Term::k(), [g.clone(), Term::s()]),
            _ => g.clone(),
        }
    }

    /// `count` distinct normal forms from `pool`.
    pub fn distinct<R: Rng>(rng: &mut R, pool: &[Term], count: usize) -> Vec<Term> {
        pool.choose_multiple(rng, count).cloned().collect()
    }

    /// A PER with up to `max_blocks` blocks of up to `max_gens` generators.
    pub fn per<R: Rng>(rng: &mut R, name: &str, max_blocks: usize, max_gens: usize, fuel: Fuel) -> Per {
        let pool = normal_forms(3);
        let blocks = rng.gen_range(0..=max_blocks);
        let sizes: Vec<usize> = (0..blocks).map(|_| rng.gen_range(1..=max_gens)).collect();
        let mut classes = distinct(rng, &pool, sizes.iter().sum()).into_iter();
        let blocks = sizes
            .iter()
            .map(|&n| (0..n).map(|_| classes.next().expect("pool is large enough")).collect())
            .collect();
        mk_per(name, blocks, fuel).expect("distinct normal forms never overlap")
    }

    /// A tracker drawn from identity, constants, projections and small abstractions.
    pub fn tracker<R: Rng>(rng: &mut R) -> Term {
        let pool = normal_forms(2);
        let g = pool.choose(rng).expect("nonempty pool").clone();
        let x = Term::var("x");
        match rng.gen_range(0..8) {
            0 => derived(Derived::I),
            1 => Term::app(Term::k(), g),
            2 => derived(Derived::Pr1),
            3 => derived(Derived::Pr2),
            4 => abstract_var("x", &pair(x, g)),
            5 => abstract_var("x", &pair(g, x)),
            6 => abstract_var("x", &Term::app(x, g)),
            _ => abstract_var("x", &Term::app(g, x)),
        }
    }

    /// The PER spanned by the images of `r`'s blocks under `t`: images of
    /// blocks that collide are merged, so `t` tracks `r -> result`. May add
    /// one unrelated block. `None` if some image fails to normalize.
    pub fn image_per<R: Rng>(rng: &mut R, name: &str, r: &Per, t: &Term, fuel: Fuel) -> Option<Per> {
        let mut groups: Vec<Vec<Term>> = Vec::new();
        for block in r.blocks() {
            let mut images = Vec::new();
            for g in block {
                let nf = normalize(&Term::app(t.clone(), g.clone()), Fuel(500)).normal_form()?.clone();
                if !images.contains(&nf) {
                    images.push(nf);
                }
            }
            // merge with every existing group sharing an image
            let (touching, rest): (Vec<_>, Vec<_>) =
                groups.into_iter().partition(|grp| grp.iter().any(|x| images.contains(x)));
            groups = rest;
            for grp in touching {
                for x in grp {
                    if !images.contains(&x) {
                        images.push(x);
                    }
                }
            }
            groups.push(images);
        }
        if rng.gen_bool(0.5) {
            let pool = normal_forms(3);
            if let Some(extra) = pool.iter().find(|p| groups.iter().all(|grp| !grp.contains(p))) {
                let at = rng.gen_range(0..=groups.len());
                groups.insert(at, vec![extra.clone()]);
            }
        }
        mk_per(name, groups, fuel).ok()
    }

    /// A random tracked morphism out of `r`, together with its target.
    pub fn per_morphism<R: Rng>(rng: &mut R, name: &str, r: &Per, fuel: Fuel) -> PerMorphism {
        loop {
            let t = tracker(rng);
            if let Some(s) = image_per(rng, name, r, &t, fuel) {
                if let Ok(f) = mk_per_morphism(r, &s, &t, fuel) {
                    return f;
                }
            }
        }
    }

    /// A modest set with up to `max_elems` elements and up to
    /// `max_realizers` realizers each; realizers of distinct elements have
    /// distinct normal forms.
    pub fn modest<R: Rng>(rng: &mut R, name: &str, max_elems: usize, max_realizers: usize) -> Assembly {
        let pool = normal_forms(3);
        let elems = rng.gen_range(1..=max_elems);
        let sizes: Vec<usize> = (0..elems).map(|_| rng.gen_range(1..=max_realizers)).collect();
        let mut classes = distinct(rng, &pool, sizes.iter().sum()).into_iter();
        let elements = sizes.iter().enumerate().map(|(i, &n)| {
            let rs = (0..n).map(|_| variant(rng, &classes.next().expect("pool is large enough"))).collect();
            (format!("x{i}"), rs)
        });
        mk_assembly(name, elements.collect::<Vec<_>>()).expect("generated realizers are closed and nonempty")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LawConfig {
    pub samples: usize,
    pub seed: u64,
    pub fuel: Fuel,
}

impl Default for LawConfig {
    fn default() -> LawConfig {
        LawConfig { samples: 200, seed: 42, fuel: Fuel::DEFAULT }
    }
}

/// Result of one law on one sample.
#[derive(Clone, Debug)]
pub struct LawOutcome {
    pub law: &'static str,
    pub sample: usize,
    pub verdict: TriState,
    pub detail: String,
}

fn rng_for(seed: u64, family: u64, sample: usize) -> StdRng {
    let mix = seed ^ family.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (sample as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    StdRng::seed_from_u64(mix)
}

fn outcome(law: &'static str, sample: usize, verdict: TriState, detail: String) -> LawOutcome {
    LawOutcome { law, sample, verdict, detail }
}

fn err_state(e: crate::Error) -> TriState {
    match e {
        crate::Error::Undecided(why) => TriState::Unknown(why),
        _ => TriState::Fails,
    }
}

/// `K a b ~ a` and `S a b c ~ a c (b c)` for random closed normal forms.
pub fn combinator_rules(cfg: &LawConfig) -> Vec<LawOutcome> {
    run_samples(cfg, 1, |rng, n| {
        let a = gen::closed_normal(rng, 12);
        let b = gen::closed_normal(rng, 12);
        let c = gen::closed_normal(rng, 12);
        let k_rule = convertible(&Term::apply(Term::k(), [a.clone(), b.clone()]), &a, cfg.fuel);
        let lhs = Term::apply(Term::s(), [a.clone(), b.clone(), c.clone()]);
        let rhs = Term::apply(a.clone(), [c.clone(), Term::app(b.clone(), c.clone())]);
        let s_rule = convertible(&lhs, &rhs, cfg.fuel);
        let detail = format!("a = {a}, b = {b}, c = {c}");
        vec![outcome("K rule", n, k_rule, detail.clone()), outcome("S rule", n, s_rule, detail)]
    })
}

/// `([x] body) a ~ body[x := a]`.
pub fn abstraction(cfg: &LawConfig) -> Vec<LawOutcome> {
    run_samples(cfg, 2, |rng, n| {
        let body = gen::open_body(rng, "x", 10);
        let arg = gen::closed_normalizing(rng, 8);
        let compiled = Term::app(abstract_var("x", &body), arg.clone());
        let verdict = convertible(&compiled, &body.substitute("x", &arg), cfg.fuel);
        vec![outcome("bracket abstraction", n, verdict, format!("body = {body}, arg = {arg}"))]
    })
}

/// Identity, pairing, conditional and fixpoint laws on random arguments.
pub fn derived_laws(cfg: &LawConfig) -> Vec<LawOutcome> {
    run_samples(cfg, 3, |rng, n| {
        let a = gen::closed_normal(rng, 8);
        let b = gen::closed_normal(rng, 8);
        let f = gen::closed_normal(rng, 8);
        let fuel = cfg.fuel;
        let ap = |h: Derived, xs: Vec<Term>| Term::apply(derived(h), xs);
        let fix_f = ap(Derived::Fix, vec![f.clone()]);
        let detail = format!("a = {a}, b = {b}, f = {f}");
        vec![
            outcome("i a = a", n, convertible(&ap(Derived::I, vec![a.clone()]), &a, fuel), detail.clone()),
            outcome("pr1 (pair a b) = a", n, convertible(&ap(Derived::Pr1, vec![pair(a.clone(), b.clone())]), &a, fuel), detail.clone()),
            outcome("pr2 (pair a b) = b", n, convertible(&ap(Derived::Pr2, vec![pair(a.clone(), b.clone())]), &b, fuel), detail.clone()),
            outcome(
                "ifThenElse true a b = a",
                n,
                convertible(&ap(Derived::IfThenElse, vec![derived(Derived::True), a.clone(), b.clone()]), &a, fuel),
                detail.clone(),
            ),
            outcome(
                "ifThenElse false a b = b",
                n,
                convertible(&ap(Derived::IfThenElse, vec![derived(Derived::False), a.clone(), b.clone()]), &b, fuel),
                detail.clone(),
            ),
            outcome("fix f ->> f (fix f)", n, reduces_to(&fix_f, &Term::app(f.clone(), fix_f.clone()), fuel), detail),
        ]
    })
}

/// Numeral, zero-test, predecessor and primitive recursion laws for small `n`.
pub fn arithmetic_laws(fuel: Fuel) -> Vec<LawOutcome> {
    let mut out = Vec::new();
    let tt = derived(Derived::True);
    let ff = derived(Derived::False);
    for n in 0..=10u64 {
        let expect = if n == 0 { &tt } else { &ff };
        out.push(outcome("zero test", n as usize, convertible(&Term::app(zero_test(), numeral(n)), expect, fuel), format!("n = {n}")));
        out.push(outcome("pred (n + 1) = n", n as usize, convertible(&Term::app(predecessor(), numeral(n + 1)), &numeral(n), fuel), format!("n = {n}")));
    }
    let step = crate::combinators::abstract_vars(&["m", "r"], &pair(Term::var("m"), Term::var("r")));
    for n in 0..=5u64 {
        let base = prim_rec(Term::k(), step.clone(), numeral(0));
        out.push(outcome("primRec base", n as usize, convertible(&base, &Term::k(), fuel), String::new()));
        let lhs = prim_rec(Term::k(), step.clone(), numeral(n + 1));
        let rhs = Term::apply(step.clone(), [numeral(n), prim_rec(Term::k(), step.clone(), numeral(n))]);
        out.push(outcome("primRec step", n as usize, convertible(&lhs, &rhs, fuel), format!("n = {n}")));
    }
    let succ_step = crate::combinators::abstract_vars(&["m", "r"], &pair(derived(Derived::False), Term::var("r")));
    for m in 0..=5u64 {
        for k in 0..=5u64 {
            let sum = prim_rec(numeral(k), succ_step.clone(), numeral(m));
            out.push(outcome(
                "addition",
                (m * 6 + k) as usize,
                convertible(&sum, &numeral(m + k), fuel),
                format!("{m} + {k}"),
            ));
        }
    }
    out
}

/// Identity and associativity laws of PER morphisms, plus independence of
/// composition from the chosen representatives.
pub fn per_category(cfg: &LawConfig) -> Vec<LawOutcome> {
    run_samples(cfg, 4, |rng, n| {
        let fuel = cfg.fuel;
        let r = gen::per(rng, "R", 3, 2, fuel);
        let f = gen::per_morphism(rng, "S", &r, fuel);
        let g = gen::per_morphism(rng, "T", f.target(), fuel);
        let h = gen::per_morphism(rng, "U", g.target(), fuel);
        let detail = format!("f = {}, g = {}, h = {}", f.tracker(), g.tracker(), h.tracker());
        let law = |v: crate::Result<TriState>| v.unwrap_or_else(err_state);

        let left = law(per_identity(&r, fuel).and_then(|id| per_compose(&id, &f, fuel)).and_then(|c| c.equivalent(&f, fuel)));
        let right = law(per_identity(f.target(), fuel).and_then(|id| per_compose(&f, &id, fuel)).and_then(|c| c.equivalent(&f, fuel)));
        let assoc = law((|| {
            let a = per_compose(&f, &per_compose(&g, &h, fuel)?, fuel)?;
            let b = per_compose(&per_compose(&f, &g, fuel)?, &h, fuel)?;
            a.equivalent(&b, fuel)
        })());
        // f' = id . f and g' = g . id are equivalent representatives
        let independence = law((|| {
            let f2 = per_compose(&per_identity(&r, fuel)?, &f, fuel)?;
            let g2 = per_compose(&g, &per_identity(g.target(), fuel)?, fuel)?;
            per_compose(&f, &g, fuel)?.equivalent(&per_compose(&f2, &g2, fuel)?, fuel)
        })());
        vec![
            outcome("per left identity", n, left, detail.clone()),
            outcome("per right identity", n, right, detail.clone()),
            outcome("per associativity", n, assoc, detail.clone()),
            outcome("per representative independence", n, independence, detail),
        ]
    })
}

/// Modesty of subquotients, functor laws and the perify round trips.
pub fn subquotient_laws(cfg: &LawConfig) -> Vec<LawOutcome> {
    run_samples(cfg, 5, |rng, n| {
        let fuel = cfg.fuel;
        let r = gen::per(rng, "R", 3, 2, fuel);
        let f = gen::per_morphism(rng, "S", &r, fuel);
        let g = gen::per_morphism(rng, "T", f.target(), fuel);
        let detail = format!("R = {:?}, f = {}, g = {}", r.blocks().len(), f.tracker(), g.tracker());
        let law = |v: crate::Result<bool>| v.map(TriState::from_bool).unwrap_or_else(err_state);

        let modest = check_subquotient_modest(&r, fuel).verdict;
        let identity = law((|| {
            let image = subquot_morphism(&per_identity(&r, fuel)?, fuel)?;
            asm_morphisms_equal(&image, &asm_identity(&subquotient(&r).underlying, fuel)?)
        })());
        let composite = law((|| {
            let lhs = subquot_morphism(&per_compose(&f, &g, fuel)?, fuel)?;
            let rhs = asm_compose(&subquot_morphism(&f, fuel)?, &subquot_morphism(&g, fuel)?, fuel)?;
            asm_morphisms_equal(&lhs, &rhs)
        })());
        let (sr, ss) = (subquotient(&r), subquotient(f.target()));
        let asm_round_trip = law((|| {
            let m = mk_asm_morphism(&sr.underlying, &ss.underlying, &subquot_morphism(&f, fuel)?.mapping_by_name(), f.tracker(), fuel)?;
            asm_morphisms_equal(&subquot_morphism(&perify(&sr, &ss, &m, fuel)?, fuel)?, &m)
        })());
        let per_round_trip = (|| {
            let m = subquot_morphism(&f, fuel)?;
            perify(&sr, &ss, &m, fuel)?.equivalent(&f, fuel)
        })()
        .unwrap_or_else(err_state);
        // realizability in the subquotient is relatedness to a block generator
        let probe = gen::closed_normal(rng, 4);
        let coherence = TriState::all((0..r.block_count()).map(|i| {
            let via_asm = sr.realizes(&probe, i, fuel).map_or(TriState::Fails, |v| v);
            TriState::from_bool(via_asm == related(&r, &probe, &r.blocks()[i][0], fuel))
        }));
        vec![
            outcome("subquotient is modest", n, modest, detail.clone()),
            outcome("functor preserves identity", n, identity, detail.clone()),
            outcome("functor preserves composition", n, composite, detail.clone()),
            outcome("subquot (perify m) = m", n, asm_round_trip, detail.clone()),
            outcome("perify (subquot f) ~ f", n, per_round_trip, detail.clone()),
            outcome("realizes = related", n, coherence, detail),
        ]
    })
}

/// Every generated modest set is isomorphic to the subquotient of its
/// canonical PER, via trackers `i`.
pub fn iso_laws(cfg: &LawConfig) -> Vec<LawOutcome> {
    run_samples(cfg, 6, |rng, n| {
        let fuel = cfg.fuel;
        let m = gen::modest(rng, "M", 6, 3);
        let report = check_iso(&m, fuel);
        let detail = format!("{} elements", m.len());
        let trackers = (|| -> crate::Result<bool> {
            let (f, b) = (forward(&m, fuel)?, backward(&m, fuel)?);
            let i = derived(Derived::I);
            let inverse = f.mapping().iter().enumerate().all(|(x, &c)| b.mapping()[c] == x)
                && b.mapping().iter().enumerate().all(|(c, &x)| f.mapping()[x] == c);
            Ok(f.tracker() == &i && b.tracker() == &i && inverse)
        })()
        .map(TriState::from_bool)
        .unwrap_or_else(err_state);
        vec![
            outcome("modest set isomorphic to subquotient", n, report.verdict, detail.clone()),
            outcome("iso trackers are i and maps are inverse", n, trackers, detail),
        ]
    })
}

fn run_samples<F>(cfg: &LawConfig, family: u64, f: F) -> Vec<LawOutcome>
where
    F: Fn(&mut StdRng, usize) -> Vec<LawOutcome> + Sync,
{
    (0..cfg.samples)
        .into_par_iter()
        .map(|n| f(&mut rng_for(cfg.seed, family, n), n))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// All law families.
pub fn run_laws(cfg: &LawConfig) -> Vec<LawOutcome> {
    let mut out = combinator_rules(cfg);
    out.extend(abstraction(cfg));
    out.extend(derived_laws(cfg));
    out.extend(arithmetic_laws(cfg.fuel));
    out.extend(per_category(cfg));
    out.extend(subquotient_laws(cfg));
    out.extend(iso_laws(cfg));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asm::is_modest;

    #[test]
    fn normal_form_pool_is_pairwise_distinct() {
        let pool = gen::normal_forms(3);
        assert!(pool.len() >= 18, "pool has {}", pool.len());
        for (i, a) in pool.iter().enumerate() {
            assert!(a.is_normal());
            for b in &pool[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn generated_instances_are_valid() {
        let mut rng = StdRng::seed_from_u64(7);
        let fuel = Fuel::DEFAULT;
        for _ in 0..30 {
            let m = gen::modest(&mut rng, "M", 6, 3);
            assert!(is_modest(&m, fuel).verdict.holds());
            let r = gen::per(&mut rng, "R", 3, 2, fuel);
            let f = gen::per_morphism(&mut rng, "S", &r, fuel);
            assert!(f.verification().verdict.holds());
        }
    }

    #[test]
    fn laws_are_deterministic_in_the_seed() {
        let cfg = LawConfig { samples: 8, seed: 3, fuel: Fuel::DEFAULT };
        let a: Vec<_> = per_category(&cfg).into_iter().map(|o| o.detail).collect();
        let b: Vec<_> = per_category(&cfg).into_iter().map(|o| o.detail).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn small_batch_passes() {
        let cfg = LawConfig { samples: 10, seed: 1, fuel: Fuel::DEFAULT };
        for o in run_laws(&cfg) {
            assert!(!o.verdict.fails(), "{} #{} failed: {}", o.law, o.sample, o.detail);
        }
    }
}
