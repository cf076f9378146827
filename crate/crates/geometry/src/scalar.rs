//! Exact rational scalars and small vector helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::GeometryError;

/// Arbitrary-precision rational, always stored in lowest terms with a positive denominator.
pub type Scalar = BigRational;

/// A coordinate vector; its length is the ambient dimension.
pub type Vector = Vec<Scalar>;

/// Integer-valued scalar.
pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// The rational `p/q`. Panics when `q == 0`.
pub fn ratio(p: i64, q: i64) -> Scalar {
    assert!(q != 0, "zero denominator");
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

/// Builds a vector from integer coordinates.
pub fn ivec(coords: &[i64]) -> Vector {
    coords.iter().map(|&c| int(c)).collect()
}

/// Builds a vector from `(p, q)` pairs.
pub fn rvec(coords: &[(i64, i64)]) -> Vector {
    coords.iter().map(|&(p, q)| ratio(p, q)).collect()
}

/// The zero vector of length `n`.
pub fn zero_vec(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

/// The `i`-th standard basis vector of length `n`.
pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Scalar::one();
    v
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`; rejects zero denominators.
pub fn parse_scalar(text: &str) -> Result<Scalar, GeometryError> {
    let t = text.trim();
    let bad = || GeometryError::MalformedRational(text.to_string());
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(n, d))
}

/// Exact `"p/q"` rendering (integers render without a denominator).
pub fn format_scalar(s: &Scalar) -> String {
    s.to_string()
}

/// Lossy decimal value, for display and plotting only.
pub fn to_f64(s: &Scalar) -> f64 {
    s.to_f64().unwrap_or(f64::NAN)
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn add(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(s: &Scalar, a: &[Scalar]) -> Vector {
    a.iter().map(|x| s * x).collect()
}

/// `a + s * b`.
pub fn axpy(a: &[Scalar], s: &Scalar, b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn is_zero_vec(a: &[Scalar]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Squared Euclidean norm.
pub fn norm2(a: &[Scalar]) -> Scalar {
    dot(a, a)
}

/// Sum of absolute values.
pub fn norm1(a: &[Scalar]) -> Scalar {
    a.iter().fold(Scalar::zero(), |acc, x| acc + x.abs())
}

/// Least common multiple of all denominators.
pub fn common_denominator(a: &[Scalar]) -> BigInt {
    a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales `a` by a positive factor to coprime integers (zero stays zero).
pub fn primitive_integer(a: &[Scalar]) -> Vec<BigInt> {
    let den = common_denominator(a);
    let ints: Vec<BigInt> = a.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    primitive_bigint(ints)
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive_bigint(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
    v
}

/// Converts an integer vector to scalars.
pub fn from_bigints(v: &[BigInt]) -> Vector {
    v.iter().map(|x| Scalar::from_integer(x.clone())).collect()
}

/// Positive rescaling of `a` to coprime integers, returned as scalars.
pub fn primitive(a: &[Scalar]) -> Vector {
    from_bigints(&primitive_integer(a))
}

/// Lexicographic comparison of two equal-length vectors.
pub fn lex_cmp(a: &[Scalar], b: &[Scalar]) -> std::cmp::Ordering {
    a.cmp(b)
}

/// Renders a vector as `(x1, x2, ...)` with exact rationals.
pub fn format_vec(a: &[Scalar]) -> String {
    let parts: Vec<String> = a.iter().map(format_scalar).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_fractions_and_integers() {
        assert_eq!(parse_scalar("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_scalar("-4").unwrap(), int(-4));
        assert_eq!(parse_scalar(" 2/-4 ").unwrap(), ratio(-1, 2));
    }

    #[test]
    fn parse_rejects_zero_denominator_and_garbage() {
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar("1.5").is_err());
    }

    #[test]
    fn lowest_terms_are_maintained() {
        let s = ratio(6, -8);
        assert_eq!(s.numer(), &BigInt::from(-3));
        assert_eq!(s.denom(), &BigInt::from(4));
        assert_eq!(format_scalar(&s), "-3/4");
        assert_eq!(format_scalar(&int(5)), "5");
    }

    #[test]
    fn primitive_integer_clears_denominators() {
        let v = rvec(&[(1, 2), (-3, 4), (0, 1)]);
        let p = primitive_integer(&v);
        assert_eq!(p, vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]);
    }
}
