//! Built-in triangular-lattice registers, each with a unique MIS.

use crate::error::{Error, Result};
use crate::graph::{build_triangular_register, Register};

/// Lattice spacing of the built-in registers. Nearest neighbours sit inside
/// the blockade radius at Ω/2π = 1 MHz (about 7.2 μm); next-nearest
/// neighbours at `a√3` sit outside it.
pub const BENCHMARK_SPACING_UM: f64 = 6.0;

pub const BENCHMARK_SIZES: [usize; 5] = [4, 6, 8, 10, 15];

/// `(row, col)` lattice mask of the built-in register with `n` atoms.
pub fn benchmark_mask(n: usize) -> Result<Vec<(i64, i64)>> {
    let mask: Vec<(i64, i64)> = match n {
        4 => vec![(0, 0), (0, 1), (1, 0), (1, 1)],
        6 => vec![(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)],
        8 => vec![(0, 0), (0, 1), (0, 2), (0, 3), (1, 0), (1, 1), (1, 2), (2, 2)],
        10 => vec![
            (0, 0),
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 0),
            (1, 1),
            (1, 2),
            (2, 0),
            (2, 1),
            (3, 0),
        ],
        15 => (0..5).flat_map(|r| (0..5 - r).map(move |c| (r, c))).collect(),
        _ => {
            return Err(Error::Config(format!(
                "no built-in register with {n} atoms; available sizes are {BENCHMARK_SIZES:?}"
            )))
        }
    };
    Ok(mask)
}

pub fn benchmark_register(n: usize, spacing_um: f64) -> Result<Register> {
    build_triangular_register(&benchmark_mask(n)?, spacing_um)
}
