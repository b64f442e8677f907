use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Recorded but not part of the verdict.
    Info,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub check: String,
    /// The law being checked, stated in words.
    pub basis: String,
    pub outcome: Outcome,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub findings: Vec<Finding>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: &str, basis: &str, outcome: Outcome, witness: Option<String>) {
        self.findings.push(Finding {
            check: check.to_string(),
            basis: basis.to_string(),
            outcome,
            witness,
        });
    }

    /// Records a pass, or a failure carrying the first witness found.
    pub fn record(&mut self, check: &str, basis: &str, witness: Option<String>) {
        let outcome = if witness.is_none() { Outcome::Pass } else { Outcome::Fail };
        self.push(check, basis, outcome, witness);
    }

    pub fn info(&mut self, check: &str, basis: &str, note: String) {
        self.push(check, basis, Outcome::Info, Some(note));
    }

    pub fn extend(&mut self, prefix: &str, other: Report) {
        for mut f in other.findings {
            if !prefix.is_empty() {
                f.check = format!("{prefix}.{}", f.check);
            }
            self.findings.push(f);
        }
    }

    pub fn passed(&self) -> bool {
        self.findings.iter().all(|f| f.outcome != Outcome::Fail)
    }

    pub fn get(&self, check: &str) -> Option<&Finding> {
        self.findings.iter().find(|f| f.check == check)
    }

    pub fn failures(&self) -> Vec<&Finding> {
        self.findings.iter().filter(|f| f.outcome == Outcome::Fail).collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.findings {
            write!(f, "{:<5} {} [{}]", x.outcome.as_str(), x.check, x.basis)?;
            if let Some(w) = &x.witness {
                write!(f, " witness: {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
