//! Safety caps on the number of extension copies `k`.
//!
//! `SYMEXT_MAX_K` overrides both caps when set to a positive integer.

use crate::error::{Error, Result};

pub const ENV_MAX_K: &str = "SYMEXT_MAX_K";

/// Default cap for operations that materialize `2^k`-dimensional objects.
pub const DEFAULT_MAX_K_FULL: usize = 12;

/// Default cap for operations that only touch per-diagram blocks.
pub const DEFAULT_MAX_K_BLOCK: usize = 64;

fn env_override() -> Option<usize> {
    std::env::var(ENV_MAX_K).ok()?.trim().parse().ok().filter(|&k| k > 0)
}

pub fn max_k_full() -> usize {
    env_override().unwrap_or(DEFAULT_MAX_K_FULL)
}

pub fn max_k_block() -> usize {
    env_override().unwrap_or(DEFAULT_MAX_K_BLOCK)
}

pub(crate) fn check_full(k: usize) -> Result<()> {
    let cap = max_k_full();
    if k == 0 || k > cap {
        return Err(Error::OutOfRange(format!("k = {k} outside 1..={cap} for full-space operations")));
    }
    Ok(())
}

pub(crate) fn check_block(k: usize) -> Result<()> {
    let cap = max_k_block();
    if k == 0 || k > cap {
        return Err(Error::OutOfRange(format!("k = {k} outside 1..={cap}")));
    }
    Ok(())
}
