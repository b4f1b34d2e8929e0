//! Execution helpers: data-parallel when the `parallel` feature is enabled,
//! plain iteration otherwise. Results are identical either way — callers
//! only use order-preserving or order-free reductions.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `op` over `items`, preserving input order.
#[cfg(feature = "parallel")]
pub fn map_collect<I, O, F>(items: Vec<I>, op: F) -> Vec<O>
where
    I: Send,
    O: Send,
    F: Fn(I) -> O + Sync + Send,
{
    items.into_par_iter().map(op).collect()
}

/// Maps `op` over `items`, preserving input order.
#[cfg(not(feature = "parallel"))]
pub fn map_collect<I, O, F>(items: Vec<I>, op: F) -> Vec<O>
where
    F: Fn(I) -> O,
{
    items.into_iter().map(op).collect()
}

/// The minimum of `op(item)` over all items where it is `Some`. Using the
/// minimum makes the selected witness independent of scheduling.
#[cfg(feature = "parallel")]
pub fn min_filter_map<I, O, F>(items: Vec<I>, op: F) -> Option<O>
where
    I: Send,
    O: Ord + Send,
    F: Fn(I) -> Option<O> + Sync + Send,
{
    items.into_par_iter().filter_map(op).min()
}

/// The minimum of `op(item)` over all items where it is `Some`.
#[cfg(not(feature = "parallel"))]
pub fn min_filter_map<I, O, F>(items: Vec<I>, op: F) -> Option<O>
where
    O: Ord,
    F: Fn(I) -> Option<O>,
{
    items.into_iter().filter_map(op).min()
}

/// Whether `pred` holds for every item.
#[cfg(feature = "parallel")]
pub fn all<I, F>(items: Vec<I>, pred: F) -> bool
where
    I: Send,
    F: Fn(I) -> bool + Sync + Send,
{
    items.into_par_iter().all(pred)
}

/// Whether `pred` holds for every item.
#[cfg(not(feature = "parallel"))]
pub fn all<I, F>(items: Vec<I>, pred: F) -> bool
where
    F: Fn(I) -> bool,
{
    items.into_iter().all(pred)
}
