//! General-position testing and the perturbation of an exhaustive finite menu into a certified
//! extreme one.

use itertools::Itertools;
use menuex_geometry::scalar::{add, dot, norm2, scale, sub};
use menuex_geometry::{nullspace_basis, rank, Scalar, Vector};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::exhaustiveness::{exhaustiveness_of_points, minimal_exhaustive_subset, ExhaustivenessReport};
use crate::extremality::is_extreme_finite;
use crate::model::{extend_menu, AllocationSpace, Menu, TypeCone};

/// Retry budget for fresh sampling rounds.
pub const MAX_RETRIES: usize = 64;
/// Displacement samples tried per item within one round.
pub const SAMPLES_PER_ITEM: usize = 256;
const MAX_NUMERATOR: i64 = 16;

/// A hyperplane `normal·x = offset` containing more than `d` of the points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoplanarWitness {
    pub indices: Vec<usize>,
    pub normal: Vector,
    pub offset: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralPositionReport {
    pub general: bool,
    pub violation: Option<CoplanarWitness>,
}

fn homogenized(points: &[&Vector]) -> Vec<Vector> {
    points
        .iter()
        .map(|p| {
            let mut r = vec![Scalar::one()];
            r.extend(p.iter().cloned());
            r
        })
        .collect()
}

fn affinely_independent(points: &[&Vector]) -> bool {
    rank(&homogenized(points)) == points.len()
}

/// True iff no hyperplane contains `d + 1` of the points, decided by rank tests over all
/// `(d+1)`-subsets.
pub fn is_general_position(points: &[Vector]) -> GeneralPositionReport {
    let Some(d) = points.first().map(|p| p.len()) else {
        return GeneralPositionReport { general: true, violation: None };
    };
    for subset in (0..points.len()).combinations(d + 1) {
        let pts: Vec<&Vector> = subset.iter().map(|&i| &points[i]).collect();
        if affinely_independent(&pts) {
            continue;
        }
        let rows: Vec<Vector> = pts
            .iter()
            .map(|p| {
                let mut r: Vector = p.to_vec();
                r.push(-Scalar::one());
                r
            })
            .collect();
        let mut v = nullspace_basis(&rows, d + 1).into_iter().next().expect("dependent subset has a normal");
        if v[..d].iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            v = v.iter().map(|x| -x.clone()).collect();
        }
        let offset = v[d].clone();
        v.truncate(d);
        return GeneralPositionReport {
            general: false,
            violation: Some(CoplanarWitness { indices: subset, normal: v, offset }),
        };
    }
    GeneralPositionReport { general: true, violation: None }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbationResult {
    /// The perturbed menu, aligned with `original`.
    pub menu: Vec<Vector>,
    /// The menu that was perturbed (`ext M` of the input, or the input itself when unchanged).
    pub original: Vec<Vector>,
    /// Displacement of each item.
    pub moved: Vec<Vector>,
    /// Indices of the minimal exhaustive core kept on its facets.
    pub core: Vec<usize>,
    pub general_position: GeneralPositionReport,
    pub exhaustiveness: ExhaustivenessReport,
    pub extreme: bool,
    pub delta: Scalar,
    /// Sampling rounds used; zero when the input was already extreme.
    pub attempts: usize,
    pub unchanged: bool,
}

impl PerturbationResult {
    /// Largest squared displacement over all items.
    pub fn max_displacement_sq(&self) -> Scalar {
        self.moved.iter().map(|t| norm2(t)).max().unwrap_or_else(Scalar::zero)
    }
}

/// A dyadic combination of `basis` with small integer coefficients, halved until its length is at
/// most `delta`.
fn dyadic_step(rng: &mut ChaCha8Rng, basis: &[Vector], delta: &Scalar) -> Option<Vector> {
    let d = basis.first()?.len();
    let ks: Vec<i64> = basis.iter().map(|_| rng.gen_range(-MAX_NUMERATOR..=MAX_NUMERATOR)).collect();
    if ks.iter().all(|&k| k == 0) {
        return None;
    }
    let mut t = vec![Scalar::zero(); d];
    for (k, b) in ks.iter().zip(basis) {
        t = add(&t, &scale(&Scalar::from_integer((*k).into()), b));
    }
    let half = Scalar::new(1.into(), 2.into());
    let bound = delta * delta;
    while norm2(&t) > bound {
        t = scale(&half, &t);
    }
    Some(t)
}

fn standard_basis(d: usize) -> Vec<Vector> {
    (0..d).map(|i| menuex_geometry::scalar::unit_vec(d, i)).collect()
}

/// True iff `p` lies on no hyperplane spanned by `d` affinely independent points of `fixed`.
fn avoids_spanned_hyperplanes(p: &Vector, fixed: &[Vector]) -> bool {
    let d = p.len();
    fixed.iter().combinations(d).all(|subset| {
        if !affinely_independent(&subset) {
            return true;
        }
        let mut with_p = subset.clone();
        with_p.push(p);
        affinely_independent(&with_p)
    })
}

struct Round {
    points: Vec<Vector>,
}

fn run_round(
    verts: &[Vector],
    core: &[usize],
    space: &AllocationSpace,
    delta: &Scalar,
    rng: &mut ChaCha8Rng,
) -> Option<Round> {
    let d = space.dim();
    let mut points = verts.to_vec();
    // Make the core affinely independent by sliding non-veto core points within their faces of A.
    let mut moved_core = vec![false; core.len()];
    loop {
        let current: Vec<Vector> = core.iter().map(|&i| points[i].clone()).collect();
        let before = rank(&homogenized(&current.iter().collect::<Vec<_>>()));
        if before == current.len() {
            break;
        }
        let mut progressed = false;
        for (slot, &i) in core.iter().enumerate() {
            if moved_core[slot] || space.veto() == Some(&verts[i]) {
                continue;
            }
            let touched = space.touched_facets(&points[i]);
            let normals: Vec<Vector> = touched.iter().map(|&h| space.facets()[h].normal().to_vec()).collect();
            let basis = nullspace_basis(&normals, d);
            if basis.is_empty() {
                continue;
            }
            for _ in 0..SAMPLES_PER_ITEM {
                let Some(t) = dyadic_step(rng, &basis, delta) else { continue };
                let cand = add(&points[i], &t);
                if !space.contains(&cand) || space.touched_facets(&cand) != touched {
                    continue;
                }
                let trial: Vec<&Vector> = core.iter().map(|&j| if j == i { &cand } else { &points[j] }).collect();
                if rank(&homogenized(&trial)) > before {
                    points[i] = cand;
                    moved_core[slot] = true;
                    progressed = true;
                    break;
                }
            }
            if progressed {
                break;
            }
        }
        if !progressed {
            break;
        }
    }
    let mut fixed: Vec<Vector> = core.iter().map(|&i| points[i].clone()).collect();
    let basis = standard_basis(d);
    for i in 0..verts.len() {
        if core.contains(&i) {
            continue;
        }
        let mut placed = None;
        for _ in 0..SAMPLES_PER_ITEM {
            let Some(t) = dyadic_step(rng, &basis, delta) else { continue };
            let cand = add(&verts[i], &t);
            if space.contains(&cand) && avoids_spanned_hyperplanes(&cand, &fixed) {
                placed = Some(cand);
                break;
            }
        }
        let p = placed?;
        fixed.push(p.clone());
        points[i] = p;
    }
    Some(Round { points })
}

/// Perturbs an exhaustive finite menu (with `d >= 3`) into a certified extreme menu whose items
/// each move by at most `delta`. Items absorbed into the extended menu are dropped first.
pub fn perturb_to_extreme(
    menu: &Menu,
    space: &AllocationSpace,
    cone: &TypeCone,
    delta: &Scalar,
    seed: u64,
) -> Result<PerturbationResult> {
    let d = space.dim();
    if d < 3 {
        return Err(CoreError::DimensionTooSmall(d));
    }
    if !delta.is_positive() {
        return Err(CoreError::Precondition("perturbation bound must be positive".into()));
    }
    let m = extend_menu(menu, cone, space)?;
    let verts = m.vertices().to_vec();
    let exh = exhaustiveness_of_points(&verts, space)?;
    if !exh.exhaustive {
        return Err(CoreError::NotExhaustive);
    }
    if is_extreme_finite(&m, space)?.is_extreme() {
        let items = menu.items.clone();
        return Ok(PerturbationResult {
            moved: vec![vec![Scalar::zero(); d]; items.len()],
            general_position: is_general_position(&items),
            menu: items.clone(),
            original: items,
            core: Vec::new(),
            exhaustiveness: exh,
            extreme: true,
            delta: delta.clone(),
            attempts: 0,
            unchanged: true,
        });
    }
    let core = minimal_exhaustive_subset(&verts, space, space.veto())?;
    for attempt in 0..MAX_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let Some(round) = run_round(&verts, &core, space, delta, &mut rng) else { continue };
        let candidate = Menu::new(round.points.clone());
        let Ok(m2) = extend_menu(&candidate, cone, space) else { continue };
        if m2.vertices().len() != round.points.len() || !round.points.iter().all(|p| m2.vertices().contains(p)) {
            continue;
        }
        let exh2 = exhaustiveness_of_points(m2.vertices(), space)?;
        if !exh2.exhaustive {
            continue;
        }
        if !is_extreme_finite(&m2, space)?.is_extreme() {
            continue;
        }
        let moved: Vec<Vector> = round.points.iter().zip(&verts).map(|(p, v)| sub(p, v)).collect();
        if moved.iter().any(|t| norm2(t) > delta * delta) {
            return Err(CoreError::Internal("displacement exceeds the perturbation bound".into()));
        }
        return Ok(PerturbationResult {
            general_position: is_general_position(&round.points),
            menu: round.points,
            original: verts,
            moved,
            core,
            exhaustiveness: exh2,
            extreme: true,
            delta: delta.clone(),
            attempts: attempt + 1,
            unchanged: false,
        });
    }
    Err(CoreError::RetryBudgetExhausted(MAX_RETRIES))
}

/// Whether `p` lies within Euclidean distance `delta` of `q`, decided without square roots.
pub fn within(p: &[Scalar], q: &[Scalar], delta: &Scalar) -> bool {
    let t = sub(p, q);
    dot(&t, &t) <= delta * delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use menuex_geometry::scalar::{int, ivec, ratio, rvec};

    fn pyramid() -> Vec<Vector> {
        vec![
            ivec(&[0, 0, 0]),
            rvec(&[(1, 2), (0, 1), (0, 1)]),
            rvec(&[(1, 2), (1, 2), (0, 1)]),
            rvec(&[(0, 1), (1, 2), (0, 1)]),
            rvec(&[(1, 4), (1, 4), (1, 2)]),
        ]
    }

    fn prism() -> Vec<Vector> {
        let t = [ivec(&[0, 0, 0]), rvec(&[(1, 2), (0, 1), (0, 1)]), rvec(&[(0, 1), (1, 2), (0, 1)])];
        let mut out = t.to_vec();
        out.extend(t.iter().map(|p| add(p, &rvec(&[(0, 1), (0, 1), (1, 2)]))));
        out
    }

    #[test]
    fn general_position_examples() {
        let r = is_general_position(&pyramid());
        assert!(!r.general);
        let w = r.violation.unwrap();
        assert_eq!(w.normal, ivec(&[0, 0, 1]));
        assert_eq!(w.offset, int(0));
        assert!(is_general_position(AllocationSpace::simplex(3).unwrap().vertices()).general);
        assert!(is_general_position(&[ivec(&[0, 0, 0]), ivec(&[0, 0, 0])]).general);
    }

    #[test]
    fn pyramid_is_returned_unchanged() {
        let space = AllocationSpace::simplex(3).unwrap();
        let cone = TypeCone::unrestricted(3);
        let r = perturb_to_extreme(&Menu::new(pyramid()), &space, &cone, &ratio(1, 100), 7).unwrap();
        assert!(r.unchanged);
        assert_eq!(r.menu, pyramid());
    }

    #[test]
    fn prism_is_perturbed_into_an_extreme_menu() {
        let space = AllocationSpace::simplex(3).unwrap();
        let cone = TypeCone::unrestricted(3);
        let delta = ratio(1, 20);
        let r = perturb_to_extreme(&Menu::new(prism()), &space, &cone, &delta, 7).unwrap();
        assert!(!r.unchanged && r.extreme);
        assert_eq!(r.menu.len(), 6);
        for (p, q) in r.menu.iter().zip(&r.original) {
            assert!(within(p, q, &delta));
        }
        let again = perturb_to_extreme(&Menu::new(prism()), &space, &cone, &delta, 7).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn planar_input_is_rejected() {
        let space = AllocationSpace::simplex(2).unwrap();
        let cone = TypeCone::unrestricted(2);
        let menu = Menu::new(vec![rvec(&[(0, 1), (1, 4)]), rvec(&[(1, 4), (0, 1)])]);
        assert_eq!(perturb_to_extreme(&menu, &space, &cone, &ratio(1, 20), 1), Err(CoreError::DimensionTooSmall(2)));
    }
}
