//! Runs named checks, printing one `PASS`/`FAIL` line each.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

pub type CheckResult = Result<String, String>;

#[derive(Default)]
pub struct Report {
    failed: Vec<&'static str>,
    filters: Vec<String>,
}

impl Report {
    /// Positional command-line arguments select checks by substring.
    pub fn from_args() -> Self {
        Self {
            failed: Vec::new(),
            filters: std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect(),
        }
    }

    /// Runs `f`; a panic or an `Err` fails the check, as does exceeding
    /// `budget`.
    pub fn check(&mut self, name: &'static str, budget: Duration, f: impl FnOnce() -> CheckResult) {
        if !self.filters.is_empty() && !self.filters.iter().any(|f| name.contains(f.as_str())) {
            return;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = t.elapsed();
        let outcome = match outcome {
            Ok(d) if took > budget => Err(format!("{d}; took {took:.1?}, budget {budget:?}")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{took:.1?}]"),
            Err(detail) => {
                println!("FAIL {name}: {detail} [{took:.1?}]");
                self.failed.push(name);
            }
        }
    }

    pub fn finish(self) -> ! {
        if self.failed.is_empty() {
            println!("all acceptance criteria passed");
            std::process::exit(0);
        }
        println!("{} criteria failed: {}", self.failed.len(), self.failed.join(", "));
        std::process::exit(1);
    }
}

/// `Err(msg)` unless `cond`.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
