//! Spaces, cones, fans, polytopes, half-space regions and nearest-face
//! partitions — the exact substrate every other module consumes.

pub mod cone;
pub mod fan;
pub mod hull;
pub mod nearest;
pub mod polytope;
pub mod random;
pub mod region;
pub mod space;

pub use cone::{dual_cone, is_acute, Cone, DualCone};
pub use fan::{Fan, FanCone, QuotientFan};
pub use hull::VPolytope;
pub use nearest::{nearest_face_partition, NearestCell, Polyhedron};
pub use polytope::{minkowski_sum_support, realize_polytope, Direction, Polytope, SupportVector};
pub use region::{Constraint, HalfSpaceRegion};
pub use space::Space;

/// Build the fan of a cone list (alias of [`Fan::from_cones`]).
pub fn build_fan(space: Space, maximal_cones: &[Cone]) -> crate::Result<Fan> {
    Fan::from_cones(space, maximal_cones)
}

/// The quotient fan `Σ/τ` (alias of [`Fan::quotient`]).
pub fn quotient_fan(f: &Fan, tau: usize) -> crate::Result<QuotientFan> {
    f.quotient(tau)
}
