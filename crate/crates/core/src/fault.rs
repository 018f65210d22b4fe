//! Deliberate faults for exercising the verification harness.

use std::sync::atomic::{AtomicU8, Ordering};

use crate::monoid::AffineMonoid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    None = 0,
    /// `saturate` silently loses its last Hilbert-basis element.
    Saturation = 1,
}

static ACTIVE: AtomicU8 = AtomicU8::new(0);

pub fn inject(fault: Fault) {
    ACTIVE.store(fault as u8, Ordering::SeqCst);
}

pub fn active() -> Fault {
    match ACTIVE.load(Ordering::SeqCst) {
        1 => Fault::Saturation,
        _ => Fault::None,
    }
}

pub(crate) fn maybe_drop_generator(m: AffineMonoid) -> AffineMonoid {
    if active() != Fault::Saturation || m.generators().len() < 2 {
        return m;
    }
    let mut gens = m.generators().to_vec();
    gens.pop();
    AffineMonoid::new(m.ambient().clone(), gens).expect("same ambient")
}
