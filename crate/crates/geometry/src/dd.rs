//! Double description method for homogeneous cones `{x ∈ ℝⁿ : aᵢ·x >= 0}` over the integers.
//!
//! Rows are inserted one at a time; the running cone is kept as a lineality basis plus a
//! minimal set of extreme rays (modulo lineality), all as coprime integer vectors. Adjacency
//! uses the combinatorial zero-set test.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::scalar::primitive_bigint;

/// Generators of a polyhedral cone: `lin(lineality) + cone(rays)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeGenerators {
    pub lineality: Vec<Vec<BigInt>>,
    pub rays: Vec<Vec<BigInt>>,
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| if x.is_zero() || y.is_zero() { acc } else { acc + x * y })
}

/// `alpha * p - beta * q`, made primitive.
fn combine(alpha: &BigInt, p: &[BigInt], beta: &BigInt, q: &[BigInt]) -> Vec<BigInt> {
    let v = p.iter().zip(q).map(|(x, y)| alpha * x - beta * y).collect();
    primitive_bigint(v)
}

struct Ray {
    v: Vec<BigInt>,
    zeros: BTreeSet<usize>,
}

/// Computes generators of `{x : row·x >= 0 for every row}` in dimension `n`.
///
/// Rows are processed in the order given, so the output is deterministic for a fixed input.
pub fn cone_from_inequalities(rows: &[Vec<BigInt>], n: usize) -> ConeGenerators {
    let mut lineality: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::from(1);
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, a) in rows.iter().enumerate() {
        assert_eq!(a.len(), n, "row length mismatch in double description");
        if let Some(pos) = lineality.iter().position(|l| !idot(a, l).is_zero()) {
            let mut l0 = lineality.remove(pos);
            let mut s0 = idot(a, &l0);
            if s0.is_negative() {
                l0.iter_mut().for_each(|x| *x = -x.clone());
                s0 = -s0;
            }
            for l in lineality.iter_mut() {
                let s = idot(a, l);
                if !s.is_zero() {
                    *l = combine(&s0, l, &s, &l0);
                }
            }
            for r in rays.iter_mut() {
                let s = idot(a, &r.v);
                if !s.is_zero() {
                    r.v = combine(&s0, &r.v, &s, &l0);
                }
                r.zeros.insert(k);
            }
            // Every lineality vector satisfies all earlier rows with equality.
            rays.push(Ray { v: primitive_bigint(l0), zeros: (0..k).collect() });
            continue;
        }

        let values: Vec<BigInt> = rays.iter().map(|r| idot(a, &r.v)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        if minus.is_empty() {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.zeros.insert(k);
                }
            }
            continue;
        }
        let need = n.saturating_sub(lineality.len()).saturating_sub(2);
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &plus {
            for &q in &minus {
                let common: BTreeSet<usize> = rays[p].zeros.intersection(&rays[q].zeros).cloned().collect();
                if common.len() < need {
                    continue;
                }
                let blocked = rays.iter().enumerate().any(|(i, r)| i != p && i != q && common.is_subset(&r.zeros));
                if blocked {
                    continue;
                }
                let v = combine(&values[p], &rays[q].v, &values[q], &rays[p].v);
                let mut zeros = common;
                zeros.insert(k);
                fresh.push(Ray { v, zeros });
            }
        }
        let mut kept: Vec<Ray> = Vec::new();
        for (i, mut r) in rays.into_iter().enumerate() {
            if values[i].is_negative() {
                continue;
            }
            if values[i].is_zero() {
                r.zeros.insert(k);
            }
            kept.push(r);
        }
        kept.extend(fresh);
        rays = kept;
    }

    let mut out_rays: Vec<Vec<BigInt>> = rays.into_iter().map(|r| r.v).collect();
    out_rays.sort();
    out_rays.dedup();
    ConeGenerators { lineality, rays: out_rays }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn nonnegative_orthant() {
        let rows = vec![b(&[1, 0, 0]), b(&[0, 1, 0]), b(&[0, 0, 1])];
        let g = cone_from_inequalities(&rows, 3);
        assert!(g.lineality.is_empty());
        assert_eq!(g.rays.len(), 3);
    }

    #[test]
    fn halfspace_keeps_lineality() {
        let g = cone_from_inequalities(&[b(&[1, 0, 0])], 3);
        assert_eq!(g.lineality.len(), 2);
        assert_eq!(g.rays, vec![b(&[1, 0, 0])]);
    }

    #[test]
    fn square_cone_has_four_rays() {
        // x0 >= 0 and 0 <= x1, x2 <= x0: the homogenised unit square.
        let rows = vec![b(&[0, 1, 0]), b(&[1, -1, 0]), b(&[0, 0, 1]), b(&[1, 0, -1])];
        let g = cone_from_inequalities(&rows, 3);
        assert!(g.lineality.is_empty());
        assert_eq!(g.rays.len(), 4);
    }

    #[test]
    fn contradictory_rows_leave_origin() {
        let g = cone_from_inequalities(&[b(&[1]), b(&[-1])], 1);
        assert!(g.lineality.is_empty());
        assert!(g.rays.is_empty());
    }
}
