//! Fixtures shared by the benchmarks.

use kdv_core::{CnoidalWeierstrass, Field, Lattice};

/// The square-lattice cnoidal wave sampled at `n` nodes.
pub fn cnoidal_field(n: usize) -> Field {
    let wave = CnoidalWeierstrass::from_half_periods(1.0, 1.0).expect("square lattice");
    let grid = wave.grid(n).expect("power of two");
    wave.field(&grid, 0.0).expect("grid matches the period")
}

pub fn square_lattice() -> Lattice {
    Lattice::new(1.0, 1.0).expect("square lattice")
}
