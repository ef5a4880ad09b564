//! Online guessing countermeasures: exponential response delay per login and
//! a hard lock after a run of failed sessions.

use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LockoutPolicy {
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
    /// Consecutive failures that trigger a lock. Zero disables locking.
    pub lock_threshold: u32,
    pub lock_duration_secs: u64,
}

impl Default for LockoutPolicy {
    fn default() -> Self {
        Self {
            base_delay_ms: 100,
            max_delay_ms: 5000,
            lock_threshold: 5,
            lock_duration_secs: 15 * 60,
        }
    }
}

impl LockoutPolicy {
    /// No delays and no locking.
    pub fn disabled() -> Self {
        Self {
            base_delay_ms: 0,
            max_delay_ms: 0,
            lock_threshold: 0,
            lock_duration_secs: 0,
        }
    }

    /// `min(base * 2^failures, cap)`.
    pub fn delay_for(&self, failures: u32) -> Duration {
        let ms = self
            .base_delay_ms
            .checked_shl(failures)
            .filter(|v| v >> failures == self.base_delay_ms)
            .unwrap_or(u64::MAX)
            .min(self.max_delay_ms);
        Duration::from_millis(ms)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LockoutState {
    pub consecutive_failures: u32,
    pub locked_until_ms: Option<u64>,
}

impl LockoutState {
    pub fn next_delay(&self, policy: &LockoutPolicy) -> Duration {
        policy.delay_for(self.consecutive_failures)
    }

    /// Remaining lock time, if locked at `now_ms`.
    pub fn locked_for(&self, now_ms: u64) -> Option<Duration> {
        self.locked_until_ms
            .filter(|&until| until > now_ms)
            .map(|until| Duration::from_millis(until - now_ms))
    }

    pub fn record_failure(&mut self, now_ms: u64, policy: &LockoutPolicy) {
        self.consecutive_failures = self.consecutive_failures.saturating_add(1);
        if policy.lock_threshold > 0 && self.consecutive_failures >= policy.lock_threshold {
            self.locked_until_ms = Some(now_ms + policy.lock_duration_secs * 1000);
        }
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}
