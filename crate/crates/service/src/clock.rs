//! Time source for expiry, lockout and response delays.

use std::future::Future;
use std::pin::Pin;
use std::sync::{Arc, Mutex};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

pub type Sleep = Pin<Box<dyn Future<Output = ()> + Send>>;

pub trait Clock: Send + Sync {
    /// Milliseconds since the Unix epoch.
    fn now_ms(&self) -> u64;
    fn sleep(&self, d: Duration) -> Sleep;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0)
    }

    fn sleep(&self, d: Duration) -> Sleep {
        Box::pin(tokio::time::sleep(d))
    }
}

/// Manually driven clock. `sleep` returns immediately, advances the time and
/// records the requested duration.
#[derive(Debug, Clone, Default)]
pub struct MockClock {
    inner: Arc<Mutex<MockState>>,
}

#[derive(Debug, Default)]
struct MockState {
    now_ms: u64,
    sleeps: Vec<Duration>,
}

impl MockClock {
    pub fn new(start_ms: u64) -> Self {
        let c = Self::default();
        c.inner.lock().unwrap().now_ms = start_ms;
        c
    }

    pub fn advance(&self, d: Duration) {
        self.inner.lock().unwrap().now_ms += d.as_millis() as u64;
    }

    /// Sleeps requested so far, oldest first; clears the log.
    pub fn take_sleeps(&self) -> Vec<Duration> {
        std::mem::take(&mut self.inner.lock().unwrap().sleeps)
    }
}

impl Clock for MockClock {
    fn now_ms(&self) -> u64 {
        self.inner.lock().unwrap().now_ms
    }

    fn sleep(&self, d: Duration) -> Sleep {
        let mut s = self.inner.lock().unwrap();
        s.now_ms += d.as_millis() as u64;
        s.sleeps.push(d);
        Box::pin(std::future::ready(()))
    }
}
