use crate::error::{HackError, Result};

/// Environment variable overriding [`DEFAULT_MAX_ELEMENTS`].
pub const MAX_DIM_ENV: &str = "HACK_MAX_DIM";

/// Default cap on the number of amplitudes (or matrix entries) a single
/// object may hold: 2²².
pub const DEFAULT_MAX_ELEMENTS: usize = 1 << 22;

/// Current cap, honoring `HACK_MAX_DIM` when it parses as a positive integer.
pub fn max_elements() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MAX_ELEMENTS)
}

pub fn check_elements(what: &str, required: u128) -> Result<()> {
    let limit = max_elements();
    if required > limit as u128 {
        return Err(HackError::DimensionLimit { what: what.to_string(), required, limit });
    }
    Ok(())
}
