//! Benchmark fixtures.

use iet_core::{construct_theorem_c, ConstructionSpec, Iet};

/// The 7-interval example with three periodic and two minimal components.
pub fn showcase() -> Iet {
    constructed(7, 3, 2)
}

pub fn constructed(n: usize, k: usize, ell: usize) -> Iet {
    let c = construct_theorem_c(&ConstructionSpec { n, k, ell, seed: 1 }).expect("admissible counts");
    Iet::new(c.lengths, c.perm).expect("valid construction")
}
