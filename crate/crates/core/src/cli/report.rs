use std::fmt;

use serde::Serialize;

use crate::tristate::TriState;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obligation {
    pub subject: String,
    pub verdict: TriState,
    pub detail: String,
}

impl Obligation {
    pub fn new(subject: impl Into<String>, verdict: TriState, detail: impl Into<String>) -> Obligation {
        let mut detail = detail.into();
        // the structured verdict is a bare label, so keep the reason in the detail
        if let TriState::Unknown(why) = &verdict {
            if !detail.contains(why.as_str()) {
                detail = if detail.is_empty() { why.clone() } else { format!("{detail}; {why}") };
            }
        }
        Obligation { subject: subject.into(), verdict, detail }
    }
}

/// Outcome of one command. The verdict is the aggregate of the obligations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub verdict: TriState,
    pub fuel: u64,
    pub obligations: Vec<Obligation>,
}

impl Report {
    pub fn new(command: impl Into<String>, fuel: u64, obligations: Vec<Obligation>) -> Report {
        let verdict = TriState::all(obligations.iter().map(|o| o.verdict.clone()));
        Report { command: command.into(), verdict, fuel, obligations }
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "command: {}", self.command)?;
        writeln!(f, "verdict: {}", self.verdict.label())?;
        writeln!(f, "fuel: {}", self.fuel)?;
        writeln!(f, "obligations:")?;
        for o in &self.obligations {
            write!(f, "  [{}] {}", o.verdict.label(), o.subject)?;
            if o.detail.is_empty() {
                writeln!(f)?;
            } else {
                writeln!(f, ": {}", o.detail)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_aggregates() {
        let r = Report::new("x", 10, vec![
            Obligation::new("a", TriState::Holds, ""),
            Obligation::new("b", TriState::unknown("fuel"), ""),
        ]);
        assert!(r.verdict.is_unknown());
        assert_eq!(r.obligations[1].detail, "fuel");
        assert_eq!(r.exit_code(), 2);
        assert_eq!(Report::new("x", 10, vec![]).exit_code(), 0);
    }

    #[test]
    fn json_fields() {
        let r = Report::new("normalize K", 5, vec![Obligation::new("normal form", TriState::Holds, "K")]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys.len(), 4);
        assert_eq!(v["verdict"], "Holds");
        assert_eq!(v["obligations"][0]["detail"], "K");
    }
}
