//! 64-lane bit-parallel evaluation used by the verification oracles.
//!
//! A batch is one `u64` per variable; lane `k` of every word together forms
//! one input assignment.

use crate::boolfn::{Cube, InputLit, LogicSpec};
use crate::gasket::{Coordinate, Digit};

/// Variable words for the 64 consecutive truth-table indices starting at `block * 64`.
pub fn exhaustive_block(n: usize, block: usize) -> Vec<u64> {
    const LOW: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    (0..n)
        .map(|i| {
            let pos = n - 1 - i;
            if pos < 6 {
                LOW[pos]
            } else if (block >> (pos - 6)) & 1 == 1 {
                !0
            } else {
                0
            }
        })
        .collect()
}

/// Mask of the lanes that hold real indices in a block of a `2^n`-entry table.
pub fn lane_mask(n: usize) -> u64 {
    if n >= 6 {
        !0
    } else {
        (1u64 << (1 << n)) - 1
    }
}

#[inline]
pub fn eval_term(term: &Coordinate, vars: &[u64]) -> u64 {
    let mut acc = !0u64;
    for (d, &w) in term.digits().iter().zip(vars) {
        match d {
            Digit::Absent => {}
            Digit::Neg => acc &= !w,
            Digit::Pos => acc &= w,
        }
        if acc == 0 {
            break;
        }
    }
    acc
}

pub fn eval_terms<'a>(terms: impl IntoIterator<Item = &'a Coordinate>, vars: &[u64]) -> u64 {
    terms.into_iter().fold(0, |acc, t| acc ^ eval_term(t, vars))
}

#[inline]
pub fn eval_cube(cube: &Cube, vars: &[u64]) -> u64 {
    let mut acc = !0u64;
    for (lit, &w) in cube.inputs.iter().zip(vars) {
        match lit {
            InputLit::DontCare => {}
            InputLit::Zero => acc &= !w,
            InputLit::One => acc &= w,
        }
        if acc == 0 {
            break;
        }
    }
    acc
}

/// OR of the ON cubes of `output`.
pub fn eval_spec_output(spec: &LogicSpec, output: usize, vars: &[u64]) -> u64 {
    spec.on_cubes(output)
        .fold(0, |acc, c| acc | eval_cube(c, vars))
}

/// Extracts lane `lane` as an assignment.
pub fn lane_bits(vars: &[u64], lane: u32) -> Vec<bool> {
    vars.iter().map(|w| (w >> lane) & 1 == 1).collect()
}

/// Packs up to 64 assignments into variable words.
pub fn pack(points: &[Vec<bool>], n: usize) -> Vec<u64> {
    debug_assert!(points.len() <= 64);
    let mut vars = vec![0u64; n];
    for (lane, p) in points.iter().enumerate() {
        for (i, &b) in p.iter().enumerate() {
            if b {
                vars[i] |= 1 << lane;
            }
        }
    }
    vars
}
