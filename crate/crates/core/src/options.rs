//! Knobs shared by the flat and sphere verifiers.

use crate::diffop::DEFAULT_TERM_CAP;

/// Environment variable that overrides the composition term cap.
pub const TERM_CAP_ENV: &str = "CONFLAP_TERM_CAP";

/// Whether computations may adjoin a square root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RadicalMode {
    /// Use the radical whenever a natural base exists, even if not required.
    On,
    /// Never adjoin a radical; half-integer powers are an error.
    Off,
    /// Adjoin a radical exactly when a half-integer power is requested.
    #[default]
    Auto,
}

impl RadicalMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "on" => Some(RadicalMode::On),
            "off" => Some(RadicalMode::Off),
            "auto" => Some(RadicalMode::Auto),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RadicalMode::On => "on",
            RadicalMode::Off => "off",
            RadicalMode::Auto => "auto",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub term_cap: usize,
    pub radical: RadicalMode,
    /// Perturbs every right-hand side by one unit; exercises the failure path.
    pub inject_bug: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            term_cap: DEFAULT_TERM_CAP,
            radical: RadicalMode::Auto,
            inject_bug: false,
        }
    }
}

impl VerifyOptions {
    /// Defaults, with the term cap taken from the environment when set.
    pub fn from_env() -> Self {
        let mut o = Self::default();
        if let Some(cap) = term_cap_from_env() {
            o.term_cap = cap;
        }
        o
    }
}

pub fn term_cap_from_env() -> Option<usize> {
    std::env::var(TERM_CAP_ENV).ok()?.trim().parse().ok()
}
