//! Exact rational scalars and vectors.
//!
//! Everything combinatorial in the crate runs on arbitrary-precision
//! rationals; floating point only appears in the analytic layer
//! (quadrature of the K functions).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The exact scalar type.
pub type Rat = BigRational;

/// A point or vector with exact coordinates.
pub type Vector = Vec<Rat>;

/// Integer-valued rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// The rational `n / d`. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Vector of integer-valued rationals.
pub fn vec_i(v: &[i64]) -> Vector {
    v.iter().map(|&x| rat(x)).collect()
}

/// Zero vector of length `n`.
pub fn zeros(n: usize) -> Vector {
    vec![Rat::zero(); n]
}

/// Unit vector `e_i` in dimension `n`.
pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

/// Parse `"p/q"`, an integer, or a finite decimal like `"-1.25"`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty rational literal".into());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {t:?}"))?;
        let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {t:?}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(Rat::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("bad rational literal {t:?}"));
    }
    let all_digits = |x: &str| x.chars().all(|c| c.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(format!("bad rational literal {t:?}"));
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rat::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Nearest `f64`.
pub fn to_f64(r: &Rat) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => {
            // Huge numerator/denominator: scale down by a common power of two.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Convert a vector to floats.
pub fn vec_f64(v: &[Rat]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn from_f64(x: f64) -> Rat {
    Rat::from_float(x).unwrap_or_else(Rat::zero)
}

/// Render as `p/q`, or `p` when integral.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Render a vector as `(a, b, ...)`.
pub fn fmt_vec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_rat).collect();
    format!("({})", parts.join(", "))
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut s = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn add(a: &[Rat], b: &[Rat]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &Rat, a: &[Rat]) -> Vector {
    a.iter().map(|x| c * x).collect()
}

pub fn neg(a: &[Rat]) -> Vector {
    a.iter().map(|x| -x).collect()
}

/// `a + c * b`.
pub fn axpy(a: &[Rat], c: &Rat, b: &[Rat]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Positive rescaling of `v` to a primitive integer vector.
/// The zero vector is returned unchanged.
pub fn primitive(v: &[Rat]) -> Vector {
    if is_zero_vec(v) {
        return v.to_vec();
    }
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    ints.into_iter().map(|x| Rat::from_integer(x / &g)).collect()
}

/// Primitive rescaling of a (normal, offset) pair, so that the normal is a
/// primitive integer vector. Used to canonicalise hyperplanes.
pub fn primitive_pair(normal: &[Rat], offset: &Rat) -> (Vector, Rat) {
    let p = primitive(normal);
    let idx = normal.iter().position(|x| !x.is_zero()).expect("nonzero normal");
    let factor = &p[idx] / &normal[idx];
    (p, offset * factor)
}

/// True if every coordinate is an integer.
pub fn is_integral(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// Sign of a rational as -1, 0, 1.
pub fn sign(r: &Rat) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// `(-1)^k` as a rational.
pub fn sign_pow(k: usize) -> Rat {
    if k % 2 == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// Floor of a rational as an `i64` (saturating).
pub fn floor_i64(r: &Rat) -> i64 {
    r.floor().to_integer().to_i64().unwrap_or(if r.is_negative() { i64::MIN } else { i64::MAX })
}

/// Ceiling of a rational as an `i64` (saturating).
pub fn ceil_i64(r: &Rat) -> i64 {
    r.ceil().to_integer().to_i64().unwrap_or(if r.is_negative() { i64::MIN } else { i64::MAX })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rat("-2").unwrap(), rat(-2));
        assert_eq!(parse_rat("1.25").unwrap(), ratio(5, 4));
        assert_eq!(parse_rat("-.5").unwrap(), ratio(-1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn primitive_scaling() {
        assert_eq!(primitive(&[ratio(1, 2), ratio(-1, 3)]), vec_i(&[3, -2]));
        assert_eq!(primitive(&vec_i(&[4, 6])), vec_i(&[2, 3]));
        assert_eq!(primitive(&vec_i(&[0, -5])), vec_i(&[0, -1]));
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_rat(&ratio(-6, 4)), "-3/2");
        assert_eq!(fmt_rat(&rat(7)), "7");
    }
}
