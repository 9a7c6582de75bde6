//! The example families: the 1-D interval example, the rectangle, the
//! obtuse triangle, the non-polynomial `eˣ` family and `K ≡ 1` on the
//! hexagonal fan, together with the polytopes they are evaluated on.

use super::family::KFamily;
use crate::geometry::fan::examples::{a2_fan, coordinate_fan, line_fan, obtuse_fan};
use crate::geometry::{realize_polytope, Fan, Polytope, SupportVector};
use crate::rational::{rat, Rat};
use std::sync::Arc;

fn parse(fan: Fan, default: &str, overrides: &[(&[usize], &str)]) -> KFamily {
    let ov: Vec<(Vec<usize>, String)> = overrides.iter().map(|(r, t)| (r.to_vec(), t.to_string())).collect();
    KFamily::parse(Arc::new(fan), default, &ov).expect("shipped family")
}

/// `K₀ = 1 + e^{−|x|}`, `K_± = 1` on the line fan; `J([a,b]) = 2 + (b − a)`.
pub fn intro_family() -> KFamily {
    parse(line_fan(), "1", &[(&[], "1 + exp(-abs(x1))")])
}

/// The rectangle family with `f = e^{−|x|−|y|}`, `g = e^{−|x|}`,
/// `h = e^{−|y|}`, `k = 1` on the coordinate fan of `ℝ²`.
pub fn rectangle_family() -> KFamily {
    parse(
        coordinate_fan(2),
        "1",
        &[
            (&[], "exp(-abs(x1) - abs(x2)) + exp(-abs(x1)) + exp(-abs(x2)) + 1"),
            (&[0], "exp(-abs(x2)) + 1"),
            (&[1], "exp(-abs(x2)) + 1"),
            (&[2], "exp(-abs(x1)) + 1"),
            (&[3], "exp(-abs(x1)) + 1"),
        ],
    )
}

/// Closed form of `J` for [`rectangle_family`] on `[−T₁′,T₁]×[−T₂′,T₂]`.
pub fn rectangle_closed_form(t1: f64, t1p: f64, t2: f64, t2p: f64) -> f64 {
    (t1 + t1p) * (t2 + t2p) + 2.0 * (t1 + t1p) + 2.0 * (t2 + t2p) + 4.0
}

/// The family on the obtuse fan with rays `x = (1,0)`, `y = (0,1)`,
/// `z = (−1,−1)`, taken literally: `K_x = 1 + e^{−|y|}`, `K_y = 1 + e^{−|x|}`,
/// `K_z = 1 + e^{−|x+y|}`, `K₀ = e^{−|x+y|} + e^{−|x|} + e^{−|y|}`, `1` on 2-cones.
pub fn obtuse_family() -> KFamily {
    parse(
        obtuse_fan(),
        "1",
        &[
            (&[], "exp(-abs(x1 + x2)) + exp(-abs(x1)) + exp(-abs(x2))"),
            (&[0], "1 + exp(-abs(x2))"),
            (&[1], "1 + exp(-abs(x1))"),
            (&[2], "1 + exp(-abs(x1 + x2))"),
        ],
    )
}

/// `K_σ = eˣ` for every cone of the line fan: `J([a,b]) = e^b − e^a`.
pub fn exponential_family() -> KFamily {
    parse(line_fan(), "exp(x1)", &[])
}

/// `K ≡ 1` on the hexagonal A₂ fan.
pub fn hexagon_constant() -> KFamily {
    KFamily::constant(Arc::new(a2_fan()), rat(1))
}

/// The interval `[a, b]` on the line fan.
pub fn interval(fan: &Arc<Fan>, a: Rat, b: Rat) -> Polytope {
    let s = SupportVector::new(fan.clone(), vec![-b, a]).expect("line fan");
    realize_polytope(&s).expect("a < b")
}

/// The rectangle `[−T₁′,T₁]×[−T₂′,T₂]` on the coordinate fan.
pub fn rectangle(fan: &Arc<Fan>, t1: Rat, t1p: Rat, t2: Rat, t2p: Rat) -> Polytope {
    let s = SupportVector::new(fan.clone(), vec![-t1, -t1p, -t2, -t2p]).expect("coordinate fan");
    realize_polytope(&s).expect("positive widths")
}

/// The right triangle `x ≤ 1, y ≤ 1, x + y ≥ 0` on the obtuse fan.
pub fn obtuse_triangle(fan: &Arc<Fan>) -> Polytope {
    let s = SupportVector::new(fan.clone(), vec![rat(-1), rat(-1), rat(0)]).expect("obtuse fan");
    realize_polytope(&s).expect("triangle")
}
