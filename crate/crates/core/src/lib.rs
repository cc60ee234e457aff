//! Sierpinski-gasket representation of Boolean and 4-valued logic functions.
//!
//! A Boolean function of `n` variables is mapped onto a ternary coordinate
//! space of `3^n` cells, one digit per variable (`1` = variable absent,
//! `2` = complemented, `3` = uncomplemented). Each cell holds the XOR of the
//! function over the subcube it selects, and any set of cells (a *marking*)
//! reads back as an ESOP expression. Minimization works by rewriting the
//! marking with the triangle rule `1 ⊕ 2 ⊕ 3 = 0`.
//!
//! The crate is organised by layer:
//!
//! - [`boolfn`]: truth tables, cofactors, espresso PLA ingestion.
//! - [`gasket`]: spectrum construction, the XOR triangle, structural counts, rendering.
//! - [`esop`]: ESOP expressions, verification, cost and rewrite rules.
//! - [`minimize`]: the iterated rewrite/perturb/backtrack minimizer.
//! - [`gf4`]: GF(4) arithmetic, expansions, fixed-polarity spectra and GFSOP minimization.

pub mod bitsim;
pub mod boolfn;
pub mod error;
pub mod esop;
pub mod gasket;
pub mod gf4;
pub mod minimize;

pub use boolfn::{
    parse_pla, Assignment, Cube, InputLit, LogicSpec, OutputBit, PlaType, TruthTable,
};
pub use error::{Error, Result};
pub use esop::{CostReport, Esop, Polarity, PolarityVector, Reference, Term, Verdict, VerifyMode};
pub use gasket::{Coordinate, Digit, ExpansionKind, Gasket, StructuralCounts, XorTriangle};
pub use gf4::{Gf4, Gf4Literal, Gf4Term, Gfsop, QuaternaryFunction};
pub use minimize::{minimize, CostMetric, InitStrategy, MinimizeConfig, MinimizeResult};
