//! Flop-proxy counters for per-iteration cost accounting.
//!
//! Counters are thread-local: a solver running on one thread sees exactly its
//! own work, so per-iteration deltas stay meaningful even when independent
//! solves run concurrently on other threads.

use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::ops::Sub;

/// Cumulative operation counts for the current thread.
///
/// Flop proxies: a complex m·k × k·n multiply counts m·k·n, an m×n SVD counts
/// m·n·min(m,n), a length-n tube transform counts n·ceil(log2 n). Constant
/// factors are deliberately dropped; the counters exist to expose scaling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostSnapshot {
    pub mm_slices: u64,
    pub mm_flops: u64,
    pub svd_slices: u64,
    pub svd_flops: u64,
    pub fft_tubes: u64,
    pub fft_flops: u64,
}

impl Sub for CostSnapshot {
    type Output = CostSnapshot;
    fn sub(self, rhs: CostSnapshot) -> CostSnapshot {
        CostSnapshot {
            mm_slices: self.mm_slices - rhs.mm_slices,
            mm_flops: self.mm_flops - rhs.mm_flops,
            svd_slices: self.svd_slices - rhs.svd_slices,
            svd_flops: self.svd_flops - rhs.svd_flops,
            fft_tubes: self.fft_tubes - rhs.fft_tubes,
            fft_flops: self.fft_flops - rhs.fft_flops,
        }
    }
}

thread_local! {
    static COUNTERS: Cell<CostSnapshot> = const { Cell::new(CostSnapshot {
        mm_slices: 0,
        mm_flops: 0,
        svd_slices: 0,
        svd_flops: 0,
        fft_tubes: 0,
        fft_flops: 0,
    }) };
}

/// Current cumulative counts for this thread.
pub fn snapshot() -> CostSnapshot {
    COUNTERS.with(|c| c.get())
}

/// Difference between now and an earlier snapshot taken on this thread.
pub fn delta_since(earlier: CostSnapshot) -> CostSnapshot {
    snapshot() - earlier
}

fn bump(f: impl FnOnce(&mut CostSnapshot)) {
    COUNTERS.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}

pub(crate) fn record_matmul(m: usize, k: usize, n: usize) {
    bump(|c| {
        c.mm_slices += 1;
        c.mm_flops += (m * k * n) as u64;
    });
}

pub(crate) fn record_svd(m: usize, n: usize) {
    bump(|c| {
        c.svd_slices += 1;
        c.svd_flops += (m * n * m.min(n)) as u64;
    });
}

pub(crate) fn record_fft(len: usize) {
    bump(|c| {
        c.fft_tubes += 1;
        let lg = usize::BITS - len.next_power_of_two().leading_zeros() - 1;
        c.fft_flops += (len as u64) * u64::from(lg.max(1));
    });
}
