//! Shared fixtures for the benchmarks.

use triplegear::{maximize_thickness, DesignConfig, SymmetricParams};

/// The optimal symmetric design.
pub fn optimum() -> DesignConfig {
    maximize_thickness(SymmetricParams::new(0.5, 0.0, -0.8), true, 1e-10)
        .expect("optimizer converges from the default seed")
}
