//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) these fan out over rayon; without it
//! they fall back to plain sequential iteration. Both modes produce identical
//! results: every helper is a shape-preserving map, never a reduction, so
//! floating-point results do not depend on scheduling.
//!
//! Each helper carries a size threshold below which it stays sequential even
//! in parallel mode; fork-join overhead swamps the per-element work on the
//! small inner tree levels otherwise.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Per-element work is heavy (a full graph search, a whole property check).
#[cfg(feature = "parallel")]
const HEAVY_ITEM_THRESHOLD: usize = 4;

/// Per-element work is a handful of float ops plus a few logarithms.
#[cfg(feature = "parallel")]
const LIGHT_ITEM_THRESHOLD: usize = 32 * 1024;
#[cfg(feature = "parallel")]
const LIGHT_ITEM_MIN_LEN: usize = 16 * 1024;

/// Map `f` over `0..n`, collecting results in index order. Tuned for cheap
/// `f` (per-node information quantities).
pub(crate) fn map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if n >= LIGHT_ITEM_THRESHOLD {
        return (0..n)
            .into_par_iter()
            .with_min_len(LIGHT_ITEM_MIN_LEN)
            .map(f)
            .collect();
    }
    (0..n).map(f).collect()
}

/// Map `f` over a slice, collecting results in order. Tuned for expensive
/// `f` (per-query planning, per-leaf adjacency probing).
pub(crate) fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if items.len() >= HEAVY_ITEM_THRESHOLD {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// In-place indexed update of a slice: `slot[i] = f(offset + i)`.
///
/// `offset` is the absolute index of `slice[0]` in the enclosing array, so
/// callers can write one tree level while reading another. Tuned for cheap
/// `f` (bottom-up level sweeps).
pub(crate) fn fill_indexed<T, F>(slice: &mut [T], offset: usize, f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if slice.len() >= LIGHT_ITEM_THRESHOLD {
        slice
            .par_iter_mut()
            .with_min_len(LIGHT_ITEM_MIN_LEN)
            .enumerate()
            .for_each(|(i, slot)| *slot = f(offset + i));
        return;
    }
    for (i, slot) in slice.iter_mut().enumerate() {
        *slot = f(offset + i);
    }
}

/// Name of the active execution mode, used to label benchmark groups.
pub fn mode_name() -> &'static str {
    if cfg!(feature = "parallel") {
        "par"
    } else {
        "seq"
    }
}
