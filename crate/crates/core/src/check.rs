//! Shared result record for identity checks.
//!
//! Every suite produces a flat list of `Check` values; a check passes exactly
//! when its residual is zero, and the residual string is kept for reporting.

/// One verified identity: `pass` is true iff the residual vanished.
#[derive(Debug, Clone)]
pub struct Check {
    /// Stable machine-readable identifier, e.g. "matrices/b-yang-baxter".
    pub id: String,
    /// The identity in plain mathematical text.
    pub anchor: String,
    pub pass: bool,
    /// Residual in display form; "0" when the check passes.
    pub residual: String,
}

impl Check {
    pub fn new(
        id: impl Into<String>,
        anchor: impl Into<String>,
        pass: bool,
        residual: impl Into<String>,
    ) -> Check {
        Check {
            id: id.into(),
            anchor: anchor.into(),
            pass,
            residual: residual.into(),
        }
    }

    /// A check whose residual is already known to be zero or nonzero text.
    pub fn from_residual(
        id: impl Into<String>,
        anchor: impl Into<String>,
        residual_text: String,
    ) -> Check {
        let pass = residual_text == "0";
        Check::new(id, anchor, pass, residual_text)
    }
}
