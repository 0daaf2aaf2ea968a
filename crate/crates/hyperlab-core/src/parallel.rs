//! Deterministic parallel map over index ranges.
//!
//! Work is split into a segment count that depends only on the problem size —
//! never on the thread count — and per-segment results are returned in segment
//! order for a sequential fold by the caller. Numeric reductions therefore
//! produce bit-identical results whether run on 1 thread or 64.

use std::ops::Range;

use rayon::prelude::*;

/// Segment count for a workload of `total` items. A pure function of the
/// workload size so that reduction trees never depend on thread count.
pub(crate) fn segments_for(total: u64) -> u64 {
    if total < 4096 {
        1
    } else {
        64
    }
}

/// Contiguous ranges covering 0..total, `segments` many, sizes differing by
/// at most one.
pub(crate) fn split_ranges(total: u64, segments: u64) -> Vec<Range<u64>> {
    let segments = segments.max(1).min(total.max(1));
    let base = total / segments;
    let extra = total % segments;
    let mut out = Vec::with_capacity(segments as usize);
    let mut start = 0;
    for s in 0..segments {
        let len = base + u64::from(s < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}

/// Map `f` over fixed segments of 0..total in parallel; results arrive in
/// segment order.
pub(crate) fn map_segments<T: Send>(
    total: u64,
    f: impl Fn(Range<u64>) -> T + Sync + Send,
) -> Vec<T> {
    let ranges = split_ranges(total, segments_for(total));
    if ranges.len() == 1 {
        return ranges.into_iter().map(f).collect();
    }
    ranges.into_par_iter().map(f).collect()
}
