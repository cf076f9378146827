//! Exhaustiveness: the span-and-empty-intersection test, minimal exhaustive subsets, and the
//! homothety-polytope cross-check.

use menuex_geometry::scalar::{dot, zero_vec};
use menuex_geometry::{
    lp_solve, nullspace_basis, rank, DualDescription, Hyperplane, LpOutcome, LpRow, Polyhedron, Scalar, Sense, Vector,
};
use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::model::{AllocationSpace, ExtendedMenu};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExhaustivenessCase {
    SingletonAtVertex,
    SpanningAndEmptyIntersection,
    Failure,
}

/// Why a menu is not exhaustive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureWitness {
    /// A direction orthogonal to every binding normal: the menu can be translated along it.
    Translation(Vector),
    /// A point on every binding hyperplane: the menu can be scaled about it.
    DilationCenter(Vector),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustivenessReport {
    pub exhaustive: bool,
    pub case: ExhaustivenessCase,
    pub witness: Option<FailureWitness>,
}

/// Decides exhaustiveness of the extended menu's vertex set.
pub fn is_exhaustive(m: &ExtendedMenu, space: &AllocationSpace) -> Result<ExhaustivenessReport> {
    exhaustiveness_of_points(m.vertices(), space)
}

/// Exhaustiveness of a finite point set in `A` (its facet contacts are what matter).
pub fn exhaustiveness_of_points(points: &[Vector], space: &AllocationSpace) -> Result<ExhaustivenessReport> {
    if points.is_empty() {
        return Err(CoreError::EmptyMenu);
    }
    let d = space.dim();
    let binding = binding_of(points, space);
    let normals: Vec<Vector> = binding.iter().map(|&i| space.facets()[i].normal().to_vec()).collect();
    if points.len() == 1 {
        if space.is_vertex(&points[0]) {
            return Ok(ExhaustivenessReport {
                exhaustive: true,
                case: ExhaustivenessCase::SingletonAtVertex,
                witness: None,
            });
        }
        let t = nullspace_basis(&normals, d).into_iter().next().expect("non-vertex has rank-deficient contacts");
        return Ok(failure(FailureWitness::Translation(t)));
    }
    if rank(&normals) < d {
        let t = nullspace_basis(&normals, d).into_iter().next().expect("rank deficiency");
        return Ok(failure(FailureWitness::Translation(t)));
    }
    let rows: Vec<LpRow> = binding
        .iter()
        .map(|&i| LpRow::eq(space.facets()[i].normal().to_vec(), space.facets()[i].offset().clone()))
        .collect();
    match lp_solve(&rows, &zero_vec(d), Sense::Feasibility)? {
        LpOutcome::Infeasible => Ok(ExhaustivenessReport {
            exhaustive: true,
            case: ExhaustivenessCase::SpanningAndEmptyIntersection,
            witness: None,
        }),
        LpOutcome::Optimal(o) => Ok(failure(FailureWitness::DilationCenter(o.point))),
        LpOutcome::Unbounded { .. } => Err(CoreError::Internal("feasibility LP reported unbounded".into())),
    }
}

fn failure(w: FailureWitness) -> ExhaustivenessReport {
    ExhaustivenessReport { exhaustive: false, case: ExhaustivenessCase::Failure, witness: Some(w) }
}

fn binding_of(points: &[Vector], space: &AllocationSpace) -> Vec<usize> {
    let mut b: Vec<usize> = points.iter().flat_map(|p| space.touched_facets(p)).collect();
    b.sort();
    b.dedup();
    b
}

/// Checks a failure witness independently of how it was produced.
pub fn verify_failure_witness(points: &[Vector], space: &AllocationSpace, witness: &FailureWitness) -> bool {
    let binding = binding_of(points, space);
    match witness {
        FailureWitness::Translation(t) => {
            if t.iter().all(Zero::is_zero) {
                return false;
            }
            if !binding.iter().all(|&i| dot(space.facets()[i].normal(), t).is_zero()) {
                return false;
            }
            // Some ε > 0 keeps every point inside A after moving by ±εt: facets not touched by a
            // point are strict there, and touched ones are parallel to t.
            points.iter().all(|p| space.facets().iter().all(|h| !h.on_boundary(p) || dot(h.normal(), t).is_zero()))
        }
        FailureWitness::DilationCenter(z) => binding.iter().all(|&i| space.facets()[i].on_boundary(z)),
    }
}

/// An inclusion-minimal exhaustive subset of at most `d + 1` points, as indices into `points`.
///
/// Greedy: grow until the binding normals span, add one point touching a facet that misses the
/// common intersection point, then prune.
pub fn minimal_exhaustive_subset(
    points: &[Vector],
    space: &AllocationSpace,
    must_include: Option<&Vector>,
) -> Result<Vec<usize>> {
    let report = exhaustiveness_of_points(points, space)?;
    if !report.exhaustive {
        return Err(CoreError::Precondition("input vertex set is not exhaustive".into()));
    }
    if points.len() == 1 {
        return Ok(vec![0]);
    }
    let d = space.dim();
    let forced = match must_include {
        Some(v) => Some(
            points
                .iter()
                .position(|p| p == v)
                .ok_or_else(|| CoreError::Precondition("required point is not among the vertices".into()))?,
        ),
        None => None,
    };
    let normals_of = |set: &[usize]| -> Vec<Vector> {
        binding_of(&set.iter().map(|&i| points[i].clone()).collect::<Vec<_>>(), space)
            .iter()
            .map(|&h| space.facets()[h].normal().to_vec())
            .collect()
    };
    let mut chosen: Vec<usize> = forced.into_iter().collect();
    while rank(&normals_of(&chosen)) < d {
        let current = rank(&normals_of(&chosen));
        let next = (0..points.len())
            .filter(|i| !chosen.contains(i))
            .max_by_key(|&i| {
                let mut s = chosen.clone();
                s.push(i);
                (rank(&normals_of(&s)) as i64 - current as i64, -(i as i64))
            })
            .ok_or_else(|| CoreError::Internal("spanning set not found".into()))?;
        chosen.push(next);
    }
    if !is_non_constant_exhaustive(points, &chosen, space)? {
        let next = (0..points.len())
            .filter(|i| !chosen.contains(i))
            .find(|&i| {
                let mut s = chosen.clone();
                s.push(i);
                is_non_constant_exhaustive(points, &s, space).unwrap_or(false)
            })
            .ok_or_else(|| CoreError::Internal("no point closes the intersection".into()))?;
        chosen.push(next);
    }
    // Prune to inclusion-minimality, latest additions first.
    let mut i = chosen.len();
    while i > 0 {
        i -= 1;
        if Some(chosen[i]) == forced || chosen.len() <= 2 {
            continue;
        }
        let mut trial = chosen.clone();
        trial.remove(i);
        if is_non_constant_exhaustive(points, &trial, space)? {
            chosen = trial;
        }
    }
    chosen.sort();
    if chosen.len() > d + 1 {
        return Err(CoreError::Internal(format!("minimal exhaustive subset has {} > d + 1 points", chosen.len())));
    }
    Ok(chosen)
}

/// The span-and-empty-intersection condition for the selected points (never the singleton rule).
fn is_non_constant_exhaustive(points: &[Vector], subset: &[usize], space: &AllocationSpace) -> Result<bool> {
    let pts: Vec<Vector> = subset.iter().map(|&i| points[i].clone()).collect();
    let binding = binding_of(&pts, space);
    let normals: Vec<Vector> = binding.iter().map(|&h| space.facets()[h].normal().to_vec()).collect();
    if rank(&normals) < space.dim() {
        return Ok(false);
    }
    let rows: Vec<LpRow> = binding
        .iter()
        .map(|&h| LpRow::eq(space.facets()[h].normal().to_vec(), space.facets()[h].offset().clone()))
        .collect();
    Ok(!lp_solve(&rows, &zero_vec(space.dim()), Sense::Feasibility)?.is_feasible())
}

/// Builds `Hom(M) = {(λ, t) : λ·max_{a ∈ ext M} a·n_H + t·n_H <= c_H, λ >= 0}` by vertex enumeration
/// and reports whether `(1, 0)` is one of its vertices.
pub fn homothety_cross_check(m: &ExtendedMenu, space: &AllocationSpace) -> Result<bool> {
    let verts = m.vertices();
    if verts.len() < 2 {
        return Err(CoreError::Precondition("homothety cross-check needs at least two vertices".into()));
    }
    let d = space.dim();
    let mut hs = Vec::new();
    for h in space.facets() {
        let top = verts.iter().map(|a| dot(a, h.normal())).max().expect("nonempty");
        let mut normal = vec![top];
        normal.extend(h.normal().iter().cloned());
        hs.push(Hyperplane::new(normal, h.offset().clone())?);
    }
    let mut lam = zero_vec(d + 1);
    lam[0] = -Scalar::one();
    hs.push(Hyperplane::new(lam, Scalar::zero())?);
    let hom = match Polyhedron::from_halfspaces(d + 1, &hs, &[])? {
        DualDescription::Empty => return Err(CoreError::Internal("Hom(M) is empty".into())),
        DualDescription::Nonempty(p) => p,
    };
    let mut target = zero_vec(d + 1);
    target[0] = Scalar::one();
    Ok(hom.vertices().contains(&target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{extend_menu, Menu, TypeCone};
    use menuex_geometry::scalar::{ivec, rvec};

    fn ext(space: &AllocationSpace, items: Vec<Vector>) -> ExtendedMenu {
        extend_menu(&Menu::new(items), &TypeCone::unrestricted(space.dim()), space).unwrap()
    }

    #[test]
    fn simplex_touching_all_facets() {
        let s = AllocationSpace::simplex(2).unwrap();
        let m = ext(&s, vec![rvec(&[(0, 1), (1, 2)]), rvec(&[(1, 2), (0, 1)]), rvec(&[(1, 2), (1, 2)])]);
        let r = is_exhaustive(&m, &s).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.case, ExhaustivenessCase::SpanningAndEmptyIntersection);
        assert!(homothety_cross_check(&m, &s).unwrap());
    }

    #[test]
    fn parallel_facets_give_translation() {
        let s = AllocationSpace::cube(2).unwrap();
        let pts = vec![rvec(&[(1, 4), (0, 1)]), rvec(&[(3, 4), (1, 1)])];
        let m = ext(&s, pts.clone());
        let r = is_exhaustive(&m, &s).unwrap();
        assert!(!r.exhaustive);
        assert_eq!(r.witness, Some(FailureWitness::Translation(ivec(&[1, 0]))));
        assert!(verify_failure_witness(&pts, &s, r.witness.as_ref().unwrap()));
        assert!(!homothety_cross_check(&m, &s).unwrap());
    }

    #[test]
    fn singleton_at_vertex() {
        let s = AllocationSpace::simplex(3).unwrap();
        let m = ext(&s, vec![ivec(&[0, 0, 1])]);
        let r = is_exhaustive(&m, &s).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.case, ExhaustivenessCase::SingletonAtVertex);
        assert_eq!(minimal_exhaustive_subset(m.vertices(), &s, None).unwrap(), vec![0]);
    }

    #[test]
    fn minimal_subset_of_simplex_vertices() {
        let s = AllocationSpace::simplex(2).unwrap();
        let pts = vec![ivec(&[0, 0]), ivec(&[0, 1]), ivec(&[1, 0])];
        let sub = minimal_exhaustive_subset(&pts, &s, None).unwrap();
        assert_eq!(sub.len(), 2);
    }

    #[test]
    fn minimal_subset_of_cube_vertices() {
        let s = AllocationSpace::cube(3).unwrap();
        let pts: Vec<Vector> = (0..8i64).map(|m| ivec(&[m & 1, (m >> 1) & 1, (m >> 2) & 1])).collect();
        let sub = minimal_exhaustive_subset(&pts, &s, None).unwrap();
        assert_eq!(sub.len(), 2);
        let chosen: Vec<Vector> = sub.iter().map(|&i| pts[i].clone()).collect();
        assert!(exhaustiveness_of_points(&chosen, &s).unwrap().exhaustive);
    }

    #[test]
    fn must_include_is_respected() {
        let s = AllocationSpace::simplex(2).unwrap();
        let pts = vec![ivec(&[0, 0]), ivec(&[0, 1]), ivec(&[1, 0])];
        let sub = minimal_exhaustive_subset(&pts, &s, Some(&ivec(&[0, 1]))).unwrap();
        assert!(sub.contains(&1));
    }
}
