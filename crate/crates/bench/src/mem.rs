//! Peak-memory accounting.
//!
//! Binaries that install [`CountingAlloc`] as the global allocator get exact heap peaks. Otherwise
//! the Linux peak resident set (`VmHWM`, reset through `/proc/self/clear_refs`) is used, and as a
//! last resort the state-vector size plus a fixed overhead is reported as an estimate.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);
static INSTALLED: AtomicBool = AtomicBool::new(false);

/// Fixed allowance added to estimated peaks.
pub const ESTIMATE_OVERHEAD_BYTES: u64 = 4 << 20;

/// System allocator wrapper tracking current and peak live heap bytes.
pub struct CountingAlloc;

fn grow(size: usize) {
    if !INSTALLED.load(Ordering::Relaxed) {
        INSTALLED.store(true, Ordering::Relaxed);
    }
    let now = CURRENT.fetch_add(size, Ordering::Relaxed) + size;
    PEAK.fetch_max(now, Ordering::Relaxed);
}

fn shrink(size: usize) {
    CURRENT.fetch_sub(size, Ordering::Relaxed);
}

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            grow(layout.size());
        }
        p
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc_zeroed(layout) };
        if !p.is_null() {
            grow(layout.size());
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        shrink(layout.size());
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = unsafe { System.realloc(ptr, layout, new_size) };
        if !p.is_null() {
            if new_size >= layout.size() {
                grow(new_size - layout.size());
            } else {
                shrink(layout.size() - new_size);
            }
        }
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemorySource {
    /// Live heap bytes counted by [`CountingAlloc`].
    Allocator,
    /// Peak resident set size reported by the kernel.
    Rss,
    Estimated,
}

impl MemorySource {
    pub fn as_str(self) -> &'static str {
        match self {
            MemorySource::Allocator => "allocator",
            MemorySource::Rss => "rss",
            MemorySource::Estimated => "estimated",
        }
    }
}

/// Measures the peak between [`PeakTracker::start`] and [`PeakTracker::finish`].
pub struct PeakTracker {
    rss_reset: bool,
}

impl PeakTracker {
    pub fn start() -> Self {
        if INSTALLED.load(Ordering::Relaxed) {
            PEAK.store(CURRENT.load(Ordering::Relaxed), Ordering::Relaxed);
            return Self { rss_reset: false };
        }
        let rss_reset = std::fs::write("/proc/self/clear_refs", "5").is_ok();
        Self { rss_reset }
    }

    /// Peak bytes and how they were obtained; `estimate` is used when nothing better exists.
    pub fn finish(self, estimate: u64) -> (u64, MemorySource) {
        if INSTALLED.load(Ordering::Relaxed) {
            return (PEAK.load(Ordering::Relaxed) as u64, MemorySource::Allocator);
        }
        if self.rss_reset {
            if let Some(hwm) = read_vm_hwm() {
                return (hwm, MemorySource::Rss);
            }
        }
        (estimate, MemorySource::Estimated)
    }
}

fn read_vm_hwm() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Whether [`CountingAlloc`] is the active global allocator.
pub fn allocator_installed() -> bool {
    INSTALLED.load(Ordering::Relaxed)
}
