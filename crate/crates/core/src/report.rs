//! Line-oriented check reports.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub cases: u64,
    pub witness: Option<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, pass: bool, cases: u64) -> Self {
        CheckReport {
            name: name.into(),
            pass,
            cases,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }
}

/// `CHECK <name> <pass|fail> cases=<n> [witness=...]`
impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} {} cases={}",
            self.name,
            if self.pass { "pass" } else { "fail" },
            self.cases
        )?;
        if let Some(w) = &self.witness {
            write!(f, " witness={w}")?;
        }
        Ok(())
    }
}

pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

pub(crate) fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_format() {
        assert_eq!(
            CheckReport::new("a.b", true, 3).to_string(),
            "CHECK a.b pass cases=3"
        );
        assert_eq!(
            CheckReport::new("x", false, 0)
                .with_witness("1,2")
                .to_string(),
            "CHECK x fail cases=0 witness=1,2"
        );
    }
}
