//! Reference labels attached to every certificate and check row.
//!
//! Each label names the estimate, definition or assumption that the row
//! measures, in the numbering of the underlying analysis.

pub const ZERO_IN_BETA: &str = "§1, 0 ∈ β(0)";
pub const COERCIVITY: &str = "§1 (H1)";
pub const GROWTH: &str = "§1 (H2)";
pub const MONOTONICITY: &str = "§1 (H3)";
pub const GRAPH_MONOTONE: &str = "§1, β maximal monotone";

pub const R1_GRAPH: &str = "Definition 3.2 (R1)";
pub const R2_RENORMALIZED: &str = "Definition 3.2 (R2), Eq. (3.2)";
pub const R3_DECAY: &str = "Definition 3.2 (R3)";

pub const COMPARISON: &str = "(5.2)";
pub const COMPARISON_ORDER: &str = "Remark 5.3";
pub const ENERGY_BOUND: &str = "(5.3)";
pub const LINF_BOUND: &str = "(5.4)";
pub const BAND_ENERGY: &str = "(5.5)";
pub const LEVEL_SET_REG: &str = "(5.7)";

pub const TRUNCATED_ENERGY: &str = "(6.2)";
pub const ORDER_M: &str = "(6.8)";
pub const ORDER_N: &str = "(6.9)";
pub const L1_BOUND: &str = "(6.333)";
pub const LEVEL_SET: &str = "(6.10)";
pub const KATO: &str = "(6.37)";
pub const UNIQUENESS: &str = "Theorem 4.2";
pub const BOUNDEDNESS: &str = "Prop. 4.3";

pub const POINCARE: &str = "(2.1)";
pub const SOBOLEV_GEOMETRIC: &str = "(2.2)";
pub const SOBOLEV_ARITHMETIC: &str = "(2.3)";
