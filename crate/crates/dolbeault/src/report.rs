//! Check records shared by the verifiers and the command-line driver.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        })
    }
}

/// One verified statement. A failing check always carries a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
    pub witness: Option<String>,
    /// Seconds; filled in by the driver.
    pub elapsed: Option<f64>,
}

impl Check {
    pub fn pass(name: impl Into<String>, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        Check { check: name.into(), status: Status::Pass, lhs: lhs.into(), rhs: rhs.into(), witness: None, elapsed: None }
    }

    pub fn fail(name: impl Into<String>, lhs: impl Into<String>, rhs: impl Into<String>, witness: impl Into<String>) -> Self {
        Check { check: name.into(), status: Status::Fail, lhs: lhs.into(), rhs: rhs.into(), witness: Some(witness.into()), elapsed: None }
    }

    pub fn skip(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check { check: name.into(), status: Status::Skip, lhs: String::new(), rhs: String::new(), witness: Some(reason.into()), elapsed: None }
    }

    /// Pass when the two renderings agree; the witness names the mismatch.
    pub fn equal<T: PartialEq>(name: impl Into<String>, lhs: &T, rhs: &T, show: impl Fn(&T) -> String) -> Self {
        let (l, r) = (show(lhs), show(rhs));
        if lhs == rhs {
            Check::pass(name, l, r)
        } else {
            let w = format!("{l} != {r}");
            Check::fail(name, l, r, w)
        }
    }

    /// Wrap a checker that returns its first counterexample.
    pub fn from_result(name: impl Into<String>, statement: impl Into<String>, r: Result<(), String>) -> Self {
        match r {
            Ok(()) => Check::pass(name, statement, "holds"),
            Err(w) => Check::fail(name, statement, "violated", w),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Ordered list of checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub checks: Vec<Check>,
    #[serde(skip)]
    clock: Option<Instant>,
}

impl PartialEq for Report {
    fn eq(&self, o: &Report) -> bool {
        self.version == o.version && self.checks == o.checks
    }
}

impl Default for Report {
    fn default() -> Self {
        Report { version: 1, checks: Vec::new(), clock: Some(Instant::now()) }
    }
}

impl Report {
    /// Append a check; its `elapsed` defaults to the time since the
    /// previous push.
    pub fn push(&mut self, mut c: Check) {
        let now = Instant::now();
        if c.elapsed.is_none() {
            c.elapsed = self.clock.map(|t| now.duration_since(t).as_secs_f64());
        }
        self.clock = Some(now);
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        self.checks.extend(cs);
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failures() == 0
    }
}
