//! Truncated functions `k_Δ`, the regions `S^{σ₂}_{σ₁}` and `R^{σ₂}_{σ₁}`,
//! convergence certificates, and evaluation of `J_Σ(Δ) = ∫ k_Δ` and of the
//! lattice sums `Σ_m k_Δ(m)`.

pub mod convergence;
pub mod examples;
pub mod family;
pub mod kexpr;
pub mod lattice_sum;
pub mod quadrature;
pub mod regions;

pub use convergence::{certify, check_convergence_hypotheses, Certificate, PairCheck, Verdict};
pub use family::{k_delta, k_delta_support, k_pair, KFamily, TruncatedFunction, TruncationTerm};
pub use kexpr::{parse_expr, parse_kexpr, Decay, Expr, Invariance, KExpr};
pub use lattice_sum::{s_lattice_sum, s_lattice_sum_exact, LatticeSum};
pub use quadrature::{
    abs_box_integral, divergence_probe, integrate_region, j_integral, j_integral_report, j_integral_unchecked, j_zero, j_zero_with, Estimate,
    JReport, QuadOptions,
};
pub use regions::{r_region, s_region, verify_double_partition, PartitionReport, Region, RegionKind};
