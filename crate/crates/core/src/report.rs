//! Pass/fail ledgers produced by the property suites.

use std::fmt;

/// One property checked over a batch of cases.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Smallest margin seen, counting the allowed slack; negative exactly
    /// when some case failed.
    pub worst_margin: f64,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), cases: 0, failures: 0, worst_margin: f64::INFINITY, detail: String::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    /// Records an inequality `lhs <= rhs + slack`.
    pub fn at_most(&mut self, lhs: f64, rhs: f64, slack: f64) {
        self.record(rhs + slack - lhs);
    }

    /// Records an identity `|a - b| <= tol`.
    pub fn close(&mut self, a: f64, b: f64, tol: f64) {
        self.record(tol - (a - b).abs());
    }

    /// Records a case that passes when `margin >= 0`; NaN fails.
    pub fn record(&mut self, margin: f64) {
        self.cases += 1;
        if !(margin >= 0.0) {
            self.failures += 1;
        }
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        self.worst_margin = self.worst_margin.min(margin);
    }

    pub fn fail(&mut self, detail: impl Into<String>) {
        self.cases += 1;
        self.failures += 1;
        self.worst_margin = f64::NEG_INFINITY;
        self.detail = detail.into();
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {} ({} cases, {} failures, worst margin {:.3e})",
            self.name, self.cases, self.failures, self.worst_margin
        )?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self { title: title.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        for mut c in other.checks {
            if !other.title.is_empty() {
                c.name = format!("{}: {}", other.title, c.name);
            }
            self.checks.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.title.is_empty() {
            writeln!(f, "{}", self.title)?;
        }
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_and_verdicts() {
        let mut c = Check::new("ineq");
        c.at_most(1.0, 1.0, 1e-9);
        assert!(c.passed());
        assert!((c.worst_margin - 1e-9).abs() < 1e-15);
        c.at_most(1.1, 1.0, 1e-9);
        assert!(!c.passed());
        assert!(c.worst_margin < -0.09);

        let mut e = Check::new("eq");
        e.close(1.0, 1.0 + 1e-12, 1e-8);
        assert!(e.passed());
        e.close(f64::NAN, 1.0, 1e-8);
        assert!(!e.passed());
    }

    #[test]
    fn zero_tolerance_rejects_rounding_noise() {
        let mut e = Check::new("eq");
        e.close(0.1 + 0.2, 0.3, 0.0);
        assert!(!e.passed());
    }

    #[test]
    fn empty_check_does_not_pass() {
        assert!(!Check::new("nothing").passed());
        let mut r = Report::new("r");
        r.push(Check::new("nothing"));
        assert!(!r.passed());
    }
}
