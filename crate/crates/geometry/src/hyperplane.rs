//! Hyperplanes and halfspaces in canonical form.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::scalar::{dot, format_scalar, format_vec, from_bigints, is_zero_vec, primitive_integer, Scalar, Vector};
use crate::GeometryError;

/// The hyperplane `{z : z·normal = offset}`, also read as the halfspace `{z : z·normal <= offset}`.
///
/// Stored scaled by a positive factor so that `(normal, offset)` are coprime integers, which makes
/// structural equality coincide with equality of halfspaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hyperplane {
    normal: Vector,
    offset: Scalar,
}

impl Hyperplane {
    /// Creates the halfspace `normal·z <= offset`, canonicalised.
    pub fn new(normal: Vector, offset: Scalar) -> Result<Self, GeometryError> {
        if normal.is_empty() || is_zero_vec(&normal) {
            return Err(GeometryError::ZeroNormal);
        }
        let mut all = normal;
        all.push(offset);
        let ints = from_bigints(&primitive_integer(&all));
        let mut normal = ints;
        let offset = normal.pop().expect("nonempty");
        Ok(Hyperplane { normal, offset })
    }

    /// Canonical form for a hyperplane read as an equality: additionally the first nonzero
    /// normal coordinate is positive.
    pub fn new_equality(normal: Vector, offset: Scalar) -> Result<Self, GeometryError> {
        let h = Self::new(normal, offset)?;
        let first = h.normal.iter().find(|x| !x.is_zero()).expect("nonzero normal");
        if first.is_negative() {
            Ok(h.flipped())
        } else {
            Ok(h)
        }
    }

    pub fn normal(&self) -> &[Scalar] {
        &self.normal
    }

    pub fn offset(&self) -> &Scalar {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `offset - normal·z`, nonnegative exactly on the halfspace.
    pub fn slack(&self, z: &[Scalar]) -> Scalar {
        &self.offset - dot(&self.normal, z)
    }

    pub fn contains(&self, z: &[Scalar]) -> bool {
        !self.slack(z).is_negative()
    }

    pub fn on_boundary(&self, z: &[Scalar]) -> bool {
        self.slack(z).is_zero()
    }

    /// The opposite halfspace `-normal·z <= -offset`.
    pub fn flipped(&self) -> Hyperplane {
        Hyperplane { normal: self.normal.iter().map(|x| -x).collect(), offset: -self.offset.clone() }
    }
}

impl PartialOrd for Hyperplane {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Hyperplane {
    fn cmp(&self, other: &Self) -> Ordering {
        self.normal.cmp(&other.normal).then_with(|| self.offset.cmp(&other.offset))
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.normal.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coef = if c == &Scalar::from_integer(1.into()) {
                String::new()
            } else if c == &Scalar::from_integer((-1).into()) {
                "-".to_string()
            } else {
                format!("{}*", format_scalar(c))
            };
            terms.push(format!("{coef}a{}", i + 1));
        }
        write!(f, "{} <= {}", terms.join(" + "), format_scalar(&self.offset))
    }
}

impl Hyperplane {
    /// Compact rendering `normal . z <= offset` with vectors spelled out.
    pub fn describe(&self) -> String {
        format!("{} . z <= {}", format_vec(&self.normal), format_scalar(&self.offset))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ivec, ratio, rvec};

    #[test]
    fn canonical_form_is_scale_invariant() {
        let a = Hyperplane::new(rvec(&[(1, 2), (1, 2)]), ratio(1, 2)).unwrap();
        let b = Hyperplane::new(ivec(&[3, 3]), int(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.normal(), &ivec(&[1, 1])[..]);
        assert_eq!(a.offset(), &int(1));
    }

    #[test]
    fn halfspace_orientation_is_kept() {
        let a = Hyperplane::new(ivec(&[-2, 0]), int(0)).unwrap();
        assert_eq!(a.normal(), &ivec(&[-1, 0])[..]);
        let e = Hyperplane::new_equality(ivec(&[-2, 0]), int(-4)).unwrap();
        assert_eq!(e.normal(), &ivec(&[1, 0])[..]);
        assert_eq!(e.offset(), &int(2));
    }

    #[test]
    fn zero_normal_rejected() {
        assert!(Hyperplane::new(ivec(&[0, 0]), int(1)).is_err());
    }

    #[test]
    fn display_reads_like_a_constraint() {
        let h = Hyperplane::new(ivec(&[1, 1]), int(1)).unwrap();
        assert_eq!(h.to_string(), "a1 + a2 <= 1");
    }
}
