//! Memory-budget guard for large table allocations.
//!
//! The cap is read once from GPLAB_BUDGET_MB (default 512) and applies to
//! individual table allocations, not cumulative usage; it exists to turn
//! runaway experiment parameters into clean errors instead of OOM kills.

use crate::error::{Error, Result};
use std::sync::OnceLock;

const DEFAULT_BUDGET_MB: u64 = 512;

fn cap_mb() -> u64 {
    static CAP: OnceLock<u64> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("GPLAB_BUDGET_MB")
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .unwrap_or(DEFAULT_BUDGET_MB)
    })
}

/// Checks that a single allocation of `bytes` fits under the configured cap.
pub fn charge(bytes: u64) -> Result<()> {
    let need_mb = bytes.div_ceil(1 << 20);
    let cap = cap_mb();
    if need_mb > cap {
        return Err(Error::BudgetExceeded {
            need_mb,
            cap_mb: cap,
        });
    }
    Ok(())
}
