//! Process-wide fault injection, used by the CLI selftest to confirm that
//! deliberate sign errors are caught by the verification sweep.
//!
//! Faults are global: only enable one in a dedicated process.

use std::str::FromStr;
use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    None,
    /// Negates the Poincaré pairing.
    EtaSign,
    /// Drops the alternating sign of the interior product.
    ContractionSign,
}

static ACTIVE: AtomicU8 = AtomicU8::new(0);

pub fn inject(fault: Fault) {
    let code = match fault {
        Fault::None => 0,
        Fault::EtaSign => 1,
        Fault::ContractionSign => 2,
    };
    ACTIVE.store(code, Ordering::SeqCst);
}

pub fn active() -> Fault {
    match ACTIVE.load(Ordering::Relaxed) {
        1 => Fault::EtaSign,
        2 => Fault::ContractionSign,
        _ => Fault::None,
    }
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Fault::None),
            "eta-sign" => Ok(Fault::EtaSign),
            "contraction-sign" => Ok(Fault::ContractionSign),
            other => Err(format!("unknown fault {other:?}")),
        }
    }
}
