//! Exact polyhedral combinatorics for combinatorial truncation.
//!
//! Given a complete simplicial fan Σ, a polytope Δ with normal fan Σ, and a
//! family of functions `(K_σ)` indexed by the cones, the crate builds the
//! truncated function
//!
//! ```text
//! k_Δ(x) = Σ_σ (−1)^{dim σ} K_σ(x) 1_{T⁻_{Δ,σ}}(x)
//! ```
//!
//! checks when `∫ k_Δ` and `Σ_{m∈M} k_Δ(m)` converge, evaluates them, and
//! certifies that they are polynomial in the support numbers of Δ.
//!
//! Module map:
//! - [`geometry`]: spaces, cones, fans, polytopes, half-space regions, hulls.
//! - [`chains`]: convex chains, convolution, Brianchon-Gram, Lawrence-Varchenko,
//!   Γ-chains, exact equality by hyperplane arrangements.
//! - [`incidence`]: incidence algebras of face posets and the Langlands lemma.
//! - [`truncation`]: the K-expression grammar, S/R regions, convergence
//!   certificates, quadrature and lattice sums.
//! - [`polynomiality`]: polynomial fits and the structural identity for J.
//!
//! Sign convention: a ray `u_ρ` of the fan is an outward facet normal, and
//! the support number `a_ρ` describes the facet inequality `⟨x, u_ρ⟩ ≤ −a_ρ`,
//! i.e. `⟨x, −u_ρ⟩ ≥ a_ρ`. Outward tangent cones are strict:
//! `T⁻_{Δ,σ} = {⟨x,u_ρ⟩ > −a_ρ, ρ ∈ σ}`.

pub mod chains;
pub mod error;
pub mod geometry;
pub mod incidence;
pub mod lattice;
pub mod linalg;
pub mod lp;
pub mod polynomiality;
pub mod rational;
pub mod truncation;

pub use error::{Error, Result};
pub use rational::{Rat, Vector};
