//! Seeded generators for random scenarios and menus. Every instance draws from its own
//! ChaCha stream derived from `(seed, index)`, so results do not depend on evaluation order.

use menuex_geometry::scalar::{add, dot, norm2, scale, sub};
use menuex_geometry::{GeneratorSet, Polyhedron, Scalar, Vector};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exhaustiveness::exhaustiveness_of_points;
use crate::model::{extend_menu, AllocationSpace, Menu, Scenario, TypeCone};
use crate::perturbation::is_general_position;

/// The generator for instance `index` of a run seeded with `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A rational `p/denom` uniform on the grid in `[lo, hi]`.
pub fn grid_rational(rng: &mut ChaCha8Rng, lo: &Scalar, hi: &Scalar, denom: i64) -> Scalar {
    let q = Scalar::from_integer(denom.into());
    let a = (lo * &q).ceil().to_integer();
    let b = (hi * &q).floor().to_integer();
    let a: i64 = a.try_into().expect("small grid");
    let b: i64 = b.try_into().expect("small grid");
    Scalar::new(rng.gen_range(a..=b).into(), denom.into())
}

fn bounding_box(space: &AllocationSpace) -> (Vector, Vector) {
    let d = space.dim();
    let lo = (0..d).map(|j| space.vertices().iter().map(|v| v[j].clone()).min().expect("vertices")).collect();
    let hi = (0..d).map(|j| space.vertices().iter().map(|v| v[j].clone()).max().expect("vertices")).collect();
    (lo, hi)
}

/// A grid point of `A` by rejection sampling from its bounding box. The grid is refined by the
/// common denominator of the vertices of `A`, so thin spaces still contain grid points.
pub fn random_point(space: &AllocationSpace, rng: &mut ChaCha8Rng, denom: i64) -> Vector {
    let (lo, hi) = bounding_box(space);
    let vertex_denom = space.vertices().iter().flatten().fold(1i64, |acc, x| {
        let q: i64 = x.denom().try_into().expect("small denominators");
        num_integer::lcm(acc, q)
    });
    let grid = num_integer::lcm(denom, vertex_denom);
    for _ in 0..256 {
        let p: Vector = lo.iter().zip(&hi).map(|(l, h)| grid_rational(rng, l, h, grid)).collect();
        if space.contains(&p) {
            return p;
        }
    }
    // Fall back to the vertex barycenter, which is always inside.
    let n = Scalar::from_integer((space.vertices().len() as i64).into());
    let mut c = vec![Scalar::zero(); space.dim()];
    for v in space.vertices() {
        c = add(&c, v);
    }
    scale(&(Scalar::one() / n), &c)
}

/// Moves `p` along the normal of facet `h` onto that facet; `None` if the result leaves `A`.
pub fn snap_to_facet(space: &AllocationSpace, p: &[Scalar], h: usize) -> Option<Vector> {
    let f = &space.facets()[h];
    let n = f.normal();
    let t = (f.offset() - dot(n, p)) / norm2(n);
    let q = add(p, &scale(&t, n));
    space.contains(&q).then_some(q)
}

/// Snaps items onto facets no item touches until the item set is exhaustive or no move helps.
/// Items are tried in order; the first `k` items may all be moved.
pub fn force_exhaustive(space: &AllocationSpace, items: &mut [Vector], rng: &mut ChaCha8Rng) -> bool {
    for i in 0..items.len() {
        if exhaustiveness_of_points(items, space).map(|r| r.exhaustive).unwrap_or(false) {
            return true;
        }
        let touched: Vec<usize> = items.iter().flat_map(|p| space.touched_facets(p)).collect();
        let mut untouched: Vec<usize> = (0..space.facets().len()).filter(|h| !touched.contains(h)).collect();
        untouched.shuffle(rng);
        for h in untouched {
            if let Some(q) = snap_to_facet(space, &items[i], h) {
                items[i] = q;
                break;
            }
        }
    }
    exhaustiveness_of_points(items, space).map(|r| r.exhaustive).unwrap_or(false)
}

/// Forced-exhaustive menu of `k` items in convex position (every item a vertex of the extended
/// menu), optionally in general position. Gives up after a fixed number of draws.
pub fn exhaustive_menu(
    space: &AllocationSpace,
    cone: &TypeCone,
    k: usize,
    denom: i64,
    general_position: bool,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vector>> {
    for _ in 0..200 {
        let mut items: Vec<Vector> = (0..k).map(|_| random_point(space, rng, denom)).collect();
        if let Some(v) = space.veto() {
            items[0] = v.clone();
        }
        if !force_exhaustive(space, &mut items, rng) {
            continue;
        }
        if general_position && !is_general_position(&items).general {
            continue;
        }
        let menu = Menu::new(items.clone());
        if menu.items.len() != k {
            continue;
        }
        match extend_menu(&menu, cone, space) {
            Ok(m) if m.vertices().len() == k => return Some(items),
            _ => continue,
        }
    }
    None
}

/// A strike-granting menu of `k` items in `Δ²` in convex position: items touch all three facets.
pub fn strike_menu_2d(k: usize, denom: i64, rng: &mut ChaCha8Rng) -> Option<Vec<Vector>> {
    let space = AllocationSpace::simplex(2).expect("preset");
    let cone = TypeCone::unrestricted(2);
    for _ in 0..500 {
        let mut items: Vec<Vector> = (0..k).map(|_| random_point(&space, rng, denom)).collect();
        let mut facets: Vec<usize> = (0..3).collect();
        facets.shuffle(rng);
        for (slot, h) in facets.into_iter().enumerate().take(k) {
            match snap_to_facet(&space, &items[slot], h) {
                Some(q) => items[slot] = q,
                None => continue,
            }
        }
        let touched: Vec<usize> = items.iter().flat_map(|p| space.touched_facets(p)).collect();
        if (0..3).any(|h| !touched.contains(&h)) {
            continue;
        }
        let menu = Menu::new(items.clone());
        if menu.items.len() != k {
            continue;
        }
        if let Ok(m) = extend_menu(&menu, &cone, &space) {
            if m.vertices().len() == k {
                return Some(items);
            }
        }
    }
    None
}

/// A random convex polygon with small integer vertices, scaled into the unit square.
pub fn random_polygon(rng: &mut ChaCha8Rng) -> AllocationSpace {
    loop {
        let n = rng.gen_range(3..=7);
        let pts: Vec<Vector> = (0..n)
            .map(|_| {
                vec![
                    Scalar::new(rng.gen_range(0..=6).into(), 6.into()),
                    Scalar::new(rng.gen_range(0..=6).into(), 6.into()),
                ]
            })
            .collect();
        let Ok(p) = Polyhedron::from_generators(2, &GeneratorSet::polytope(pts)) else { continue };
        if p.dim() < 2 {
            continue;
        }
        if let Ok(space) = AllocationSpace::from_halfspaces(2, p.halfspaces(), None) {
            return space;
        }
    }
}

/// The unrestricted cone with probability 0.7, otherwise a full-dimensional cone spanned by `d`
/// or `d + 1` small integer rays.
fn random_cone(d: usize, rng: &mut ChaCha8Rng) -> TypeCone {
    if rng.gen_bool(0.7) {
        return TypeCone::unrestricted(d);
    }
    loop {
        let n = d + rng.gen_range(0..=1);
        let rays: Vec<Vector> =
            (0..n).map(|_| (0..d).map(|_| Scalar::from_integer(rng.gen_range(-2i64..=3).into())).collect()).collect();
        if let Ok(c) = TypeCone::from_rays(rays) {
            return c;
        }
    }
}

/// Places an item: at a vertex of `A`, on one or two facets, or anywhere in `A`.
fn random_item(space: &AllocationSpace, rng: &mut ChaCha8Rng, denom: i64) -> Vector {
    let roll: f64 = rng.gen();
    if roll < 0.2 {
        return space.vertices().choose(rng).expect("vertices").clone();
    }
    let mut p = random_point(space, rng, denom);
    if roll < 0.85 {
        let snaps = if roll < 0.35 { 2 } else { 1 };
        for _ in 0..snaps {
            let h = rng.gen_range(0..space.facets().len());
            if let Some(q) = snap_to_facet(space, &p, h) {
                p = q;
            }
        }
    }
    p
}

/// A random scenario for oracle-agreement suites: a preset or random polygon, a random cone,
/// and a menu biased towards the boundary of `A`.
pub fn random_scenario(d: usize, seed: u64, index: u64) -> Result<Scenario> {
    let mut rng = rng_for(seed, index);
    let denom = [4, 6, 8, 12][rng.gen_range(0..4)];
    let kind = rng.gen_range(0..if d == 2 { 4 } else { 3 });
    let (space, cone) = match kind {
        0 => (AllocationSpace::simplex(d)?, random_cone(d, &mut rng)),
        1 => (AllocationSpace::cube(d)?, random_cone(d, &mut rng)),
        2 => {
            let kappa = Scalar::from_integer(rng.gen_range(1i64..=2).into());
            (AllocationSpace::monopoly(d - 1, &kappa)?, TypeCone::monopoly(d - 1)?)
        }
        _ => {
            let space = random_polygon(&mut rng);
            let cone = random_cone(2, &mut rng);
            (space, cone)
        }
    };
    let k = rng.gen_range(1..=d + 3);
    let mut items: Vec<Vector> = (0..k).map(|_| random_item(&space, &mut rng, denom)).collect();
    if let Some(v) = space.veto() {
        items.insert(0, v.clone());
    }
    Scenario::new(&format!("random-d{d}-{seed}-{index}"), space, cone, items)
}

/// Rescales a point set by `λ` about the origin and translates it by `t`.
pub fn affine_image(points: &[Vector], lambda: &Scalar, t: &[Scalar]) -> Vec<Vector> {
    points.iter().map(|p| add(&scale(lambda, p), t)).collect()
}

/// A random Minkowski sum of a triangle and a segment in the plane `a₃ = 0` and along `e₃`,
/// rescaled into `Δ³`; it always touches the four facets and never is extreme.
pub fn random_prism(rng: &mut ChaCha8Rng, denom: i64) -> Vec<Vector> {
    loop {
        let tri: Vec<Vector> = (0..3)
            .map(|_| {
                vec![
                    Scalar::new(rng.gen_range(0..=denom).into(), denom.into()),
                    Scalar::new(rng.gen_range(0..=denom).into(), denom.into()),
                    Scalar::zero(),
                ]
            })
            .collect();
        let seg = [
            vec![Scalar::zero(), Scalar::zero(), Scalar::zero()],
            vec![
                Scalar::new(rng.gen_range(-2..=2).into(), denom.into()),
                Scalar::new(rng.gen_range(-2..=2).into(), denom.into()),
                Scalar::new(rng.gen_range(1..=denom).into(), denom.into()),
            ],
        ];
        let e1 = sub(&tri[1], &tri[0]);
        let e2 = sub(&tri[2], &tri[0]);
        if (&e1[0] * &e2[1] - &e1[1] * &e2[0]).is_zero() {
            continue;
        }
        let mut pts: Vec<Vector> = Vec::new();
        for t in &tri {
            for s in &seg {
                pts.push(add(t, s));
            }
        }
        // Translate so each coordinate's minimum is zero, then scale the largest sum to one.
        let shift: Vector = (0..3).map(|j| -pts.iter().map(|p| p[j].clone()).min().expect("points")).collect();
        let pts: Vec<Vector> = pts.iter().map(|p| add(p, &shift)).collect();
        let max_sum = pts.iter().map(|p| p.iter().sum::<Scalar>()).max().expect("points");
        if max_sum.is_zero() {
            continue;
        }
        let lambda = Scalar::one() / max_sum;
        return pts.iter().map(|p| scale(&lambda, p)).collect();
    }
}
