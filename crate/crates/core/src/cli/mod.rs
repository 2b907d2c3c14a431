//! The workspace language and the command runner behind the `realizer` binary.

pub mod report;
pub mod syntax;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::asm::{check_tracker_asm, share_realizer, Assembly, TrackerReport};
use crate::combinators::{derived, Derived};
use crate::equiv::{canonical_per, check_iso};
use crate::error::Error;
use crate::laws::{run_laws, LawConfig};
use crate::per::{check_tracker_per, Per};
use crate::reduce::{convertible, normalize, Fuel, NormalizeResult};
use crate::subquot::{check_fully_faithful, check_subquotient_modest, subquotient};
use crate::term::Term;
use crate::tristate::TriState;

pub use report::{Obligation, Report};
pub use syntax::{parse_core_term, parse_term, parse_term_in, parse_workspace, ParseError, Workspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Normalize(String),
    Compile(String),
    CheckModest(String),
    CheckPer(String),
    CheckTracker(String),
    Subquotient(String),
    CanonicalPer(String),
    CheckIso(String),
    CheckEquivalence(Vec<String>),
    Laws,
}

impl Command {
    pub fn describe(&self) -> String {
        match self {
            Command::Normalize(t) => format!("normalize {t}"),
            Command::Compile(t) => format!("compile {t}"),
            Command::CheckModest(x) => format!("check-modest {x}"),
            Command::CheckPer(x) => format!("check-per {x}"),
            Command::CheckTracker(x) => format!("check-tracker {x}"),
            Command::Subquotient(x) => format!("subquotient {x}"),
            Command::CanonicalPer(x) => format!("canonical-per {x}"),
            Command::CheckIso(x) => format!("check-iso {x}"),
            Command::CheckEquivalence(xs) => format!("check-equivalence {}", xs.join(" ")),
            Command::Laws => "laws".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Flags {
    pub fuel: Fuel,
    pub samples: usize,
    pub seed: u64,
}

impl Default for Flags {
    fn default() -> Flags {
        Flags { fuel: Fuel::DEFAULT, samples: 200, seed: 42 }
    }
}

/// Failures that prevent a report from being produced at all.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("no {kind} named `{name}` in the workspace")]
    NameNotFound { kind: &'static str, name: String },
    #[error("check-equivalence needs at least one assembly")]
    NoAssemblies,
}

fn lookup<'a, V>(map: &'a indexmap::IndexMap<String, V>, kind: &'static str, name: &str) -> Result<&'a V, CliError> {
    map.get(name).ok_or_else(|| CliError::NameNotFound { kind, name: name.to_string() })
}

fn terms(ts: &[Term]) -> String {
    format!("[{}]", ts.iter().map(Term::to_string).collect::<Vec<_>>().join(", "))
}

fn error_state(e: &Error) -> TriState {
    match e {
        Error::Undecided(why) => TriState::Unknown(why.clone()),
        _ => TriState::Fails,
    }
}

fn negate(v: TriState) -> TriState {
    match v {
        TriState::Holds => TriState::Fails,
        TriState::Fails => TriState::Holds,
        u => u,
    }
}

/// Validate a declared PER, or explain why it is not one.
fn validated(ws: &Workspace, name: &str, fuel: Fuel) -> Result<Result<Per, Obligation>, CliError> {
    let decl = lookup(&ws.pers, "per", name)?;
    Ok(decl.validate(fuel).map_err(|e| Obligation::new(format!("{name} is a PER"), error_state(&e), e.to_string())))
}

fn tracker_obligations(prefix: &str, report: &TrackerReport) -> Vec<Obligation> {
    report
        .witnesses
        .iter()
        .map(|w| Obligation::new(format!("{prefix}{}", w.subject), w.verdict.clone(), format!("inputs {}", terms(&w.inputs))))
        .collect()
}

pub fn run(command: &Command, ws: &Workspace, flags: &Flags) -> Result<Report, CliError> {
    let fuel = flags.fuel;
    let obligations = match command {
        Command::Normalize(text) => {
            let t = parse_term_in(text, &ws.definitions)?;
            match normalize(&t, fuel) {
                NormalizeResult::NormalForm { term, steps } => {
                    vec![Obligation::new(format!("normal form after {steps} steps"), TriState::Holds, term.to_string())]
                }
                NormalizeResult::FuelExhausted { partial, steps_used } => vec![Obligation::new(
                    "normal form",
                    TriState::unknown(format!("fuel exhausted after {steps_used} steps")),
                    format!("partial {partial}"),
                )],
            }
        }
        Command::Compile(text) => {
            let t = parse_term_in(text, &ws.definitions)?;
            vec![Obligation::new(format!("compiled ({} leaves)", t.size()), TriState::Holds, t.to_string())]
        }
        Command::CheckModest(name) => modesty_obligations(lookup(&ws.assemblies, "assembly", name)?, fuel),
        Command::CheckPer(name) => {
            let decl = lookup(&ws.pers, "per", name)?;
            disjointness_obligations(&decl.blocks, fuel)
        }
        Command::CheckTracker(name) => {
            let decl = lookup(&ws.maps, "map", name)?;
            let t = &decl.tracker;
            match ws.morphism_kind(decl) {
                syntax::MorphismKind::Assembly => {
                    let a = lookup(&ws.assemblies, "assembly", &decl.source)?;
                    let b = lookup(&ws.assemblies, "assembly", &decl.target)?;
                    match check_tracker_asm(a, b, &decl.mapping, t, fuel) {
                        Ok(rep) => tracker_obligations("", &rep),
                        Err(e) => vec![Obligation::new(format!("{name} is well formed"), error_state(&e), e.to_string())],
                    }
                }
                syntax::MorphismKind::Per => {
                    match (validated(ws, &decl.source, fuel)?, validated(ws, &decl.target, fuel)?) {
                        (Ok(r), Ok(s)) => match check_tracker_per(t, &r, &s, fuel) {
                            Ok(rep) => tracker_obligations("", &rep),
                            Err(e) => vec![Obligation::new(format!("{name} is well formed"), error_state(&e), e.to_string())],
                        },
                        (r, s) => [r.err(), s.err()].into_iter().flatten().collect(),
                    }
                }
            }
        }
        Command::Subquotient(name) => match validated(ws, name, fuel)? {
            Err(o) => vec![o],
            Ok(r) => {
                let sq = subquotient(&r);
                let mut out: Vec<_> = sq
                    .underlying
                    .iter()
                    .map(|(x, rs)| Obligation::new(format!("element {x}"), TriState::Holds, terms(rs)))
                    .collect();
                let modest = check_subquotient_modest(&r, fuel);
                out.push(Obligation::new(format!("{} is modest", sq.underlying.name()), modest.verdict.clone(), modest.to_string()));
                out
            }
        },
        Command::CanonicalPer(name) => {
            let m = lookup(&ws.assemblies, "assembly", name)?;
            match canonical_per(m, fuel) {
                Ok(r) => r
                    .blocks()
                    .iter()
                    .enumerate()
                    .map(|(i, b)| Obligation::new(format!("class {i} ({})", m.element(i)), TriState::Holds, terms(b)))
                    .collect(),
                Err(Error::NotModest(rep)) => {
                    vec![Obligation::new(format!("{name} is modest"), TriState::Fails, rep.to_string())]
                }
                Err(e) => vec![Obligation::new(format!("{name} is modest"), error_state(&e), e.to_string())],
            }
        }
        Command::CheckIso(name) => iso_obligations("", lookup(&ws.assemblies, "assembly", name)?, fuel),
        Command::CheckEquivalence(names) => {
            if names.is_empty() {
                return Err(CliError::NoAssemblies);
            }
            let mut out = Vec::new();
            for name in names {
                let m = lookup(&ws.assemblies, "assembly", name)?;
                out.extend(equivalence_obligations(name, m, fuel));
            }
            out
        }
        Command::Laws => law_obligations(&LawConfig { samples: flags.samples, seed: flags.seed, fuel }),
    };
    Ok(Report::new(command.describe(), fuel.0, obligations))
}

fn modesty_obligations(a: &Assembly, fuel: Fuel) -> Vec<Obligation> {
    let mut out = Vec::new();
    for (ix, x) in a.elements().enumerate() {
        for y in a.elements().skip(ix + 1) {
            let (shared, witness) = share_realizer(a, x, y, fuel).expect("elements come from the assembly");
            let detail = match witness {
                Some(r) => format!("counterexample: `{r}` realizes both {x} and {y}"),
                None => String::new(),
            };
            out.push(Obligation::new(format!("{x} and {y} share no realizer"), negate(shared), detail));
        }
    }
    out
}

fn disjointness_obligations(blocks: &[Vec<Term>], fuel: Fuel) -> Vec<Obligation> {
    let mut out = Vec::new();
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let mut verdicts = Vec::new();
            let mut clash = None;
            'scan: for a in &blocks[i] {
                for b in &blocks[j] {
                    let v = convertible(a, b, fuel);
                    if v.holds() {
                        clash = Some(format!("counterexample: `{a}` ~ `{b}`"));
                        verdicts = vec![v];
                        break 'scan;
                    }
                    verdicts.push(v);
                }
            }
            let disjoint = negate(TriState::any(verdicts));
            out.push(Obligation::new(format!("classes {i} and {j} are disjoint"), disjoint, clash.unwrap_or_default()));
        }
    }
    out
}

fn iso_obligations(prefix: &str, m: &Assembly, fuel: Fuel) -> Vec<Obligation> {
    let rep = check_iso(m, fuel);
    let name = m.name();
    let mut out = vec![Obligation::new(format!("{prefix}{name} is modest"), rep.modesty.verdict.clone(), rep.modesty.to_string())];
    if !rep.modesty.verdict.holds() {
        return out;
    }
    let tracked = |r: &Option<TrackerReport>| match r {
        Some(r) => (r.verdict.clone(), r.to_string()),
        None => (TriState::Fails, "morphism could not be built".to_string()),
    };
    let (v, d) = tracked(&rep.forward_ok);
    out.push(Obligation::new(format!("{prefix}forward is tracked by i"), v, d));
    let (v, d) = tracked(&rep.backward_ok);
    out.push(Obligation::new(format!("{prefix}backward is tracked by i"), v, d));
    out.push(Obligation::new(format!("{prefix}forward . backward = id"), rep.fb_identity.clone(), "pointwise"));
    out.push(Obligation::new(format!("{prefix}backward . forward = id"), rep.bf_identity.clone(), "pointwise"));
    out
}

fn equivalence_obligations(name: &str, m: &Assembly, fuel: Fuel) -> Vec<Obligation> {
    let prefix = format!("{name}: ");
    let mut out = iso_obligations(&prefix, m, fuel);
    let Ok(r) = canonical_per(m, fuel) else {
        return out;
    };
    let mut candidates = vec![derived(Derived::I)];
    candidates.extend(r.blocks().iter().map(|b| Term::app(Term::k(), b[0].clone())));
    let rep = check_fully_faithful(&r, &r, &candidates, fuel);
    out.extend(rep.checks.iter().map(|w| {
        Obligation::new(format!("{prefix}{}", w.subject), w.verdict.clone(), format!("trackers {}", terms(&w.inputs)))
    }));
    out
}

fn law_obligations(cfg: &LawConfig) -> Vec<Obligation> {
    let mut by_law: BTreeMap<usize, (&'static str, Vec<_>)> = BTreeMap::new();
    let mut order = Vec::new();
    for o in run_laws(cfg) {
        let idx = match order.iter().position(|l| *l == o.law) {
            Some(i) => i,
            None => {
                order.push(o.law);
                order.len() - 1
            }
        };
        by_law.entry(idx).or_insert_with(|| (o.law, Vec::new())).1.push(o);
    }
    by_law
        .into_values()
        .map(|(law, outcomes)| {
            let holds = outcomes.iter().filter(|o| o.verdict.holds()).count();
            let verdict = TriState::all(outcomes.iter().map(|o| o.verdict.clone()));
            let mut detail = format!("{holds}/{} samples hold", outcomes.len());
            if let Some(bad) = outcomes.iter().find(|o| !o.verdict.holds()) {
                detail.push_str(&format!("; sample {} {}: {}", bad.sample, bad.verdict, bad.detail));
            }
            Obligation::new(law, verdict, detail)
        })
        .collect()
}
