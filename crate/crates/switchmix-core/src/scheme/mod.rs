//! Hyper-expert schemes: how base-learner runs are laid out over time and
//! how mass moves between them.

pub mod exp;
pub mod log;
pub mod quad;

use crate::error::{Error, Result};

/// Segment starts must begin at one, increase strictly, and fit the horizon.
pub(crate) fn validate_starts(starts: &[usize], horizon: usize) -> Result<()> {
    if starts.first() != Some(&1) {
        return Err(Error::InvalidInput(
            "segment starts must begin at step one".into(),
        ));
    }
    if !starts.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput(
            "segment starts must be strictly increasing".into(),
        ));
    }
    if starts.last().copied().unwrap_or(1) > horizon {
        return Err(Error::InvalidInput(
            "segment start beyond the horizon".into(),
        ));
    }
    Ok(())
}
