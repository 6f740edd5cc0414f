//! Verification reports for the exact checks.

use std::fmt;

use crate::prob::ProbValue;

/// One failed identity: the value the identity predicts and the value observed.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub subject: String,
    pub expected: ProbValue,
    pub observed: ProbValue,
}

impl Failure {
    pub fn new(subject: impl Into<String>, expected: ProbValue, observed: ProbValue) -> Self {
        Self { subject: subject.into(), expected, observed }
    }

    pub fn residual(&self) -> ProbValue {
        &self.observed - &self.expected
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: expected {}, observed {} (residual {})",
            self.subject,
            self.expected,
            self.observed,
            self.residual()
        )
    }
}

/// Outcome of an exact check: how many instances were examined and which failed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<Failure>,
    /// Free-form remarks that are not failures (e.g. alphabet reduction).
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    /// Records one comparison; a failure is stored unless the values match.
    pub fn compare(&mut self, subject: impl FnOnce() -> String, expected: ProbValue, observed: ProbValue) {
        self.checked += 1;
        if !expected.matches(&observed) {
            self.failures.push(Failure::new(subject(), expected, observed));
        }
    }

    pub fn fail(&mut self, failure: Failure) {
        self.checked += 1;
        self.failures.push(failure);
    }

    pub fn pass(&mut self) {
        self.checked += 1;
    }

    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }

    /// Largest |residual| among failures, zero for a clean report.
    pub fn max_residual(&self) -> ProbValue {
        self.failures
            .iter()
            .map(|f| f.residual().abs())
            .fold(ProbValue::zero(), |a, b| if b > a { b } else { a })
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {} checked, {} failed", self.name, self.checked, self.failures.len())?;
        for failure in &self.failures {
            writeln!(f, "  {failure}")?;
        }
        Ok(())
    }
}

/// Outcome of a Monte Carlo comparison against a known value.
#[derive(Clone, Debug, PartialEq)]
pub struct StatisticalReport {
    pub name: String,
    pub expected: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub replicates: usize,
    /// Pass threshold on |z|.
    pub z_limit: f64,
}

impl StatisticalReport {
    pub fn z_score(&self) -> f64 {
        let diff = self.estimate - self.expected;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff.abs() <= crate::prob::FLOAT_TOLERANCE * 1.0_f64.max(self.expected.abs()) {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }

    pub fn passed(&self) -> bool {
        self.z_score().abs() <= self.z_limit
    }
}

/// Sample mean and standard error of the mean, summed in index order.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
