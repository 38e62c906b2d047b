use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);
static ACTIVE: AtomicBool = AtomicBool::new(false);

/// System allocator that tracks live bytes and their high-water mark.
///
/// Install it in a binary with `#[global_allocator]` to get exact peak
/// measurements from [`MemoryMeter`].
pub struct PeakAlloc;

unsafe impl GlobalAlloc for PeakAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            grow(layout.size());
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc_zeroed(layout);
        if !p.is_null() {
            grow(layout.size());
        }
        p
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            if new_size >= layout.size() {
                grow(new_size - layout.size());
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        p
    }
}

fn grow(bytes: usize) {
    ACTIVE.store(true, Ordering::Relaxed);
    let now = CURRENT.fetch_add(bytes, Ordering::Relaxed) + bytes;
    PEAK.fetch_max(now, Ordering::Relaxed);
}

/// Peak-memory measurement around a closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryMeter {
    /// High-water mark of live heap bytes, via [`PeakAlloc`].
    Allocator,
    /// Growth of the process's peak resident set size.
    Rss,
}

impl MemoryMeter {
    /// The allocator meter when [`PeakAlloc`] is installed, else RSS.
    pub fn detect() -> Self {
        drop(Box::new(0u64));
        if ACTIVE.load(Ordering::Relaxed) {
            MemoryMeter::Allocator
        } else {
            MemoryMeter::Rss
        }
    }

    /// One-line description for output headers.
    pub fn describe(self) -> &'static str {
        match self {
            MemoryMeter::Allocator => "peak live heap bytes during synthesis minus live bytes before it, in MiB",
            MemoryMeter::Rss => "growth of peak resident set size (VmHWM) during synthesis, in MiB",
        }
    }

    /// Runs `f` and returns its result with the peak increase in bytes.
    pub fn measure<R>(self, f: impl FnOnce() -> R) -> (R, usize) {
        match self {
            MemoryMeter::Allocator => {
                let base = CURRENT.load(Ordering::Relaxed);
                PEAK.store(base, Ordering::Relaxed);
                let r = f();
                (r, PEAK.load(Ordering::Relaxed).saturating_sub(base))
            }
            MemoryMeter::Rss => {
                let before = peak_rss();
                let r = f();
                (r, peak_rss().saturating_sub(before))
            }
        }
    }
}

fn peak_rss() -> usize {
    let Ok(status) = std::fs::read_to_string("/proc/self/status") else { return 0 };
    status
        .lines()
        .find_map(|l| l.strip_prefix("VmHWM:"))
        .and_then(|v| v.trim().trim_end_matches("kB").trim().parse::<usize>().ok())
        .map_or(0, |kb| kb * 1024)
}
