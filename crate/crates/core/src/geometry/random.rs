//! Seeded generators of random test inputs: rational points, simple
//! polytopes and simplicial cones.

use super::cone::Cone;
use super::polytope::Polytope;
use super::space::Space;
use crate::rational::{primitive, rat, ratio, Rat, Vector};
use rand::Rng;

/// Random rational with denominator `den` in `[-radius, radius]`.
pub fn rational<R: Rng>(rng: &mut R, radius: i64, den: i64) -> Rat {
    ratio(rng.gen_range(-radius * den..=radius * den), den)
}

/// Random rational point in the box `[-radius, radius]ⁿ`.
pub fn point<R: Rng>(rng: &mut R, n: usize, radius: i64, den: i64) -> Vector {
    (0..n).map(|_| rational(rng, radius, den)).collect()
}

/// Random primitive integer vector with entries in `[-m, m]`.
pub fn integer_direction<R: Rng>(rng: &mut R, n: usize, m: i64) -> Vector {
    loop {
        let v: Vector = (0..n).map(|_| rat(rng.gen_range(-m..=m))).collect();
        if !crate::rational::is_zero_vec(&v) {
            return primitive(&v);
        }
    }
}

/// A random simple full-dimensional polytope in `ℝⁿ` (Euclidean) with integer
/// normals and positive integer offsets, so that the origin is interior.
pub fn simple_polytope<R: Rng>(rng: &mut R, n: usize) -> Polytope {
    loop {
        let k = match n {
            1 => 2,
            2 => rng.gen_range(3..=7),
            _ => rng.gen_range(n + 1..=n + 4),
        };
        let mut normals: Vec<Vector> = Vec::new();
        while normals.len() < k {
            let d = integer_direction(rng, n, 3);
            if !normals.contains(&d) {
                normals.push(d);
            }
        }
        let offsets: Vec<Rat> = (0..k).map(|_| rat(rng.gen_range(1..=4))).collect();
        if let Ok(p) = Polytope::from_h_representation(Space::euclidean(n), normals, offsets) {
            return p;
        }
    }
}

/// A random simplicial full-dimensional cone. When `acute`, all rays have
/// nonnegative entries, so their pairwise dot products are nonnegative.
pub fn simplicial_cone<R: Rng>(rng: &mut R, n: usize, acute: bool) -> Cone {
    let sp = Space::euclidean(n);
    loop {
        let rays: Vec<Vector> = (0..n)
            .map(|_| {
                if acute {
                    loop {
                        let v: Vector = (0..n).map(|_| rat(rng.gen_range(0..=3))).collect();
                        if !crate::rational::is_zero_vec(&v) {
                            return primitive(&v);
                        }
                    }
                } else {
                    integer_direction(rng, n, 3)
                }
            })
            .collect();
        if crate::linalg::rank_of(&rays) != n {
            continue;
        }
        if let Ok(c) = Cone::new(rays, &sp) {
            if c.simplicial && c.span_dim == n {
                return c;
            }
        }
    }
}
