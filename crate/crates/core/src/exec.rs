//! Execution strategy and enumeration budgets.
//!
//! Every enumeration-heavy routine takes a [`Budget`], which bounds the number
//! of nodes it may visit and picks between the rayon-backed and the sequential
//! code path. Building without the `parallel` feature turns
//! [`Execution::Parallel`] into a synonym for [`Execution::Sequential`].

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Upper limit on enumerated words / visited search nodes.
    pub max_nodes: u64,
    pub execution: Execution,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 10_000_000,
            execution: Execution::default(),
        }
    }
}

impl Budget {
    pub fn sequential() -> Self {
        Budget {
            execution: Execution::Sequential,
            ..Budget::default()
        }
    }

    pub fn with_max_nodes(self, max_nodes: u64) -> Self {
        Budget { max_nodes, ..self }
    }

    pub fn with_execution(self, execution: Execution) -> Self {
        Budget { execution, ..self }
    }

    pub(crate) fn check(&self, what: &'static str, needed: u64) -> Result<()> {
        if needed > self.max_nodes {
            Err(Error::BudgetExceeded {
                what,
                limit: self.max_nodes,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn meter(&self, what: &'static str) -> Meter {
        Meter {
            used: AtomicU64::new(0),
            limit: self.max_nodes,
            what,
        }
    }
}

/// Shared node counter; safe to tick from several worker threads.
pub(crate) struct Meter {
    used: AtomicU64,
    limit: u64,
    what: &'static str,
}

impl Meter {
    pub(crate) fn tick(&self, n: u64) -> Result<()> {
        let used = self.used.fetch_add(n, Ordering::Relaxed) + n;
        if used > self.limit {
            Err(Error::BudgetExceeded {
                what: self.what,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }
}

/// Maps `f` over `items`, in parallel when the budget asks for it.
pub(crate) fn map<T, R, F>(execution: Execution, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if execution.is_parallel() {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = execution;
    items.into_iter().map(f).collect()
}

/// Runs a fallible map and returns the first error, in input order.
pub(crate) fn try_map<T, R, F>(execution: Execution, items: Vec<T>, f: F) -> Result<Vec<R>>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R> + Send + Sync,
{
    map(execution, items, f).into_iter().collect()
}
