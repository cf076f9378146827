//! Exact Gaussian elimination: rank, reduced row echelon form, nullspaces and solves.

use num_traits::{One, Zero};

use crate::scalar::{primitive, Scalar, Vector};

/// Reduced row echelon form of `rows` (each of length `ncols`).
///
/// Returns the nonzero rows of the RREF and their pivot columns.
pub fn rref(rows: &[Vector], ncols: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut m: Vec<Vector> = rows.to_vec();
    for r in &m {
        assert_eq!(r.len(), ncols, "row length mismatch in elimination");
    }
    let mut pivots = Vec::new();
    let mut lead = 0usize;
    for col in 0..ncols {
        if lead >= m.len() {
            break;
        }
        let Some(p) = (lead..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(lead, p);
        let inv = Scalar::one() / &m[lead][col];
        for x in m[lead].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[lead].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == lead || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(col);
        lead += 1;
    }
    m.truncate(lead);
    (m, pivots)
}

/// Rank over the rationals; the empty matrix has rank 0.
pub fn rank(rows: &[Vector]) -> usize {
    match rows.first() {
        None => 0,
        Some(r) => rref(rows, r.len()).1.len(),
    }
}

/// Basis of `{x : Mx = 0}` for an `m x ncols` matrix, each vector scaled to coprime integers.
///
/// The basis is empty iff the nullspace is trivial, and `rank + basis.len() == ncols`.
pub fn nullspace_basis(rows: &[Vector], ncols: usize) -> Vec<Vector> {
    let (r, pivots) = rref(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for (row, &p) in r.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(primitive(&v));
    }
    basis
}

/// Solves `Mx = b`, returning one solution (free variables set to zero) or `None` if inconsistent.
pub fn solve(rows: &[Vector], rhs: &[Scalar], ncols: usize) -> Option<Vector> {
    assert_eq!(rows.len(), rhs.len());
    let aug: Vec<Vector> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut a = r.clone();
            a.push(b.clone());
            a
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); ncols];
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// Basis of the orthogonal complement of the row space, in the canonical RREF nullspace form.
pub fn orthogonal_complement(rows: &[Vector], ncols: usize) -> Vec<Vector> {
    nullspace_basis(rows, ncols)
}

/// Orthogonal projection of `v` onto the nullspace of `rows` (exact, via the Gram system).
pub fn project_onto_nullspace(rows: &[Vector], v: &[Scalar]) -> Vector {
    let (basis, _) = match rows.first() {
        None => return v.to_vec(),
        Some(r) => rref(rows, r.len()),
    };
    if basis.is_empty() {
        return v.to_vec();
    }
    let k = basis.len();
    let gram: Vec<Vector> =
        (0..k).map(|i| (0..k).map(|j| crate::scalar::dot(&basis[i], &basis[j])).collect()).collect();
    let rhs: Vector = basis.iter().map(|b| crate::scalar::dot(b, v)).collect();
    let coef = solve(&gram, &rhs, k).expect("Gram matrix of independent rows is invertible");
    let mut out = v.to_vec();
    for (c, b) in coef.iter().zip(&basis) {
        for (o, x) in out.iter_mut().zip(b) {
            *o = &*o - c * x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{dot, ivec, rvec};

    #[test]
    fn identity_has_full_rank() {
        let m = vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[0, 0, 1])];
        assert_eq!(rank(&m), 3);
        assert!(nullspace_basis(&m, 3).is_empty());
    }

    #[test]
    fn dependent_rows() {
        let m = vec![ivec(&[1, 1]), ivec(&[2, 2])];
        assert_eq!(rank(&m), 1);
        let ns = nullspace_basis(&m, 2);
        assert_eq!(ns, vec![ivec(&[-1, 1])]);
    }

    #[test]
    fn square_facet_normals_span_the_plane() {
        let m = vec![ivec(&[-1, 0]), ivec(&[1, 0]), ivec(&[0, -1]), ivec(&[0, 1])];
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn empty_matrix_has_rank_zero() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(nullspace_basis(&[], 3).len(), 3);
    }

    #[test]
    fn solve_and_inconsistency() {
        let m = vec![ivec(&[1, 1]), ivec(&[1, -1])];
        let x = solve(&m, &ivec(&[2, 0]), 2).unwrap();
        assert_eq!(x, ivec(&[1, 1]));
        let m2 = vec![ivec(&[1, 0]), ivec(&[1, 0])];
        assert!(solve(&m2, &ivec(&[0, 1]), 2).is_none());
    }

    #[test]
    fn projection_is_orthogonal() {
        let rows = vec![ivec(&[1, 1, 0])];
        let p = project_onto_nullspace(&rows, &rvec(&[(3, 1), (1, 1), (5, 2)]));
        assert_eq!(dot(&p, &rows[0]), Scalar::zero());
        assert_eq!(p, rvec(&[(1, 1), (-1, 1), (5, 2)]));
    }
}
