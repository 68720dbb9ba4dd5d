//! Polling "live sync": repeated sync passes until told to stop.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use super::sync::{sync_directory, SyncConfig, SyncReport};
use crate::container::Container;
use crate::error::Result;

/// Cloneable stop flag that also wakes a sleeping watcher.
#[derive(Debug, Clone, Default)]
pub struct StopSignal {
    inner: Arc<(Mutex<bool>, Condvar)>,
}

impl StopSignal {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stop(&self) {
        let (flag, cv) = &*self.inner;
        *flag.lock().unwrap_or_else(|e| e.into_inner()) = true;
        cv.notify_all();
    }

    pub fn is_stopped(&self) -> bool {
        *self.inner.0.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Sleeps up to `timeout`; returns true if the signal was raised.
    pub fn wait(&self, timeout: Duration) -> bool {
        let (flag, cv) = &*self.inner;
        let guard = flag.lock().unwrap_or_else(|e| e.into_inner());
        let (guard, _) = cv
            .wait_timeout_while(guard, timeout, |stopped| !*stopped)
            .unwrap_or_else(|e| e.into_inner());
        *guard
    }
}

/// Iterator of sync reports, one per pass. The first pass runs immediately;
/// later passes run `interval` apart. Passes never overlap.
pub struct Watcher<'c> {
    container: &'c mut Container,
    root: PathBuf,
    config: SyncConfig,
    interval: Duration,
    stop: StopSignal,
    passes: u64,
}

impl Watcher<'_> {
    pub fn passes(&self) -> u64 {
        self.passes
    }
}

impl Iterator for Watcher<'_> {
    type Item = Result<SyncReport>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.stop.is_stopped() {
            return None;
        }
        if self.passes > 0 && self.stop.wait(self.interval) {
            return None;
        }
        self.passes += 1;
        Some(sync_directory(self.container, &self.root, &self.config))
    }
}

pub fn watch_directory<'c>(
    container: &'c mut Container,
    root: &Path,
    config: SyncConfig,
    interval: Duration,
    stop: StopSignal,
) -> Watcher<'c> {
    Watcher {
        container,
        root: root.to_path_buf(),
        config,
        interval,
        stop,
        passes: 0,
    }
}
