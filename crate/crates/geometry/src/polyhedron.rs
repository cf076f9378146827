//! Pointed polyhedra with both descriptions, incidence data and face enumeration.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dd::cone_from_inequalities;
use crate::hyperplane::Hyperplane;
use crate::linalg::{rank, rref, solve};
use crate::scalar::{dot, from_bigints, is_zero_vec, primitive, primitive_integer, Scalar, Vector};
use crate::GeometryError;

/// V-representation: `conv(points) + cone(rays)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorSet {
    pub points: Vec<Vector>,
    pub rays: Vec<Vector>,
}

impl GeneratorSet {
    pub fn new(points: Vec<Vector>, rays: Vec<Vector>) -> Self {
        GeneratorSet { points, rays }
    }

    pub fn polytope(points: Vec<Vector>) -> Self {
        GeneratorSet { points, rays: Vec::new() }
    }
}

/// Input to [`dual_description`].
#[derive(Clone, Debug)]
pub enum Description {
    Generators { ambient: usize, generators: GeneratorSet },
    Halfspaces { ambient: usize, inequalities: Vec<Hyperplane>, equalities: Vec<Hyperplane> },
}

/// Result of converting a halfspace description, which may describe the empty set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualDescription {
    Empty,
    Nonempty(Polyhedron),
}

/// A nonempty pointed polyhedron stored with both descriptions.
///
/// `halfspaces` are the facet-defining inequalities (irredundant, normals orthogonal to the
/// affine hull's normal space), `equalities` cut out the affine hull, `generators` are exactly
/// the vertices and extreme rays. All lists are sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    ambient: usize,
    halfspaces: Vec<Hyperplane>,
    equalities: Vec<Hyperplane>,
    generators: GeneratorSet,
    point_incidence: Vec<BTreeSet<usize>>,
    ray_incidence: Vec<BTreeSet<usize>>,
}

/// A face given by its generators and the facet halfspaces it saturates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    pub points: Vec<usize>,
    pub rays: Vec<usize>,
    pub halfspaces: Vec<usize>,
    /// True iff the face has no recession direction.
    pub bounded: bool,
}

/// Converts one description into the other, returning the full dual pair.
pub fn dual_description(input: &Description) -> Result<DualDescription, GeometryError> {
    match input {
        Description::Generators { ambient, generators } => {
            Polyhedron::from_generators(*ambient, generators).map(DualDescription::Nonempty)
        }
        Description::Halfspaces { ambient, inequalities, equalities } => {
            Polyhedron::from_halfspaces(*ambient, inequalities, equalities)
        }
    }
}

fn to_int_row(head: &Scalar, tail: &[Scalar], negate_tail: bool) -> Vec<BigInt> {
    let mut v = Vec::with_capacity(tail.len() + 1);
    v.push(head.clone());
    for x in tail {
        v.push(if negate_tail { -x.clone() } else { x.clone() });
    }
    primitive_integer(&v)
}

fn check_dims(ambient: usize, v: &[Scalar]) -> Result<(), GeometryError> {
    if v.len() != ambient {
        return Err(GeometryError::DimensionMismatch { expected: ambient, found: v.len() });
    }
    Ok(())
}

impl Polyhedron {
    /// Builds `conv(points) + cone(rays)`; duplicate and redundant generators are removed.
    pub fn from_generators(ambient: usize, gens: &GeneratorSet) -> Result<Polyhedron, GeometryError> {
        if ambient == 0 {
            return Err(GeometryError::EmptyInput("ambient dimension must be at least 1".into()));
        }
        if gens.points.is_empty() {
            return Err(GeometryError::EmptyInput("a polyhedron needs at least one point".into()));
        }
        let mut points = gens.points.clone();
        for p in &points {
            check_dims(ambient, p)?;
        }
        points.sort();
        points.dedup();
        let mut rays = Vec::new();
        for r in &gens.rays {
            check_dims(ambient, r)?;
            if is_zero_vec(r) {
                return Err(GeometryError::ZeroRay);
            }
            rays.push(primitive(r));
        }
        rays.sort();
        rays.dedup();

        // Valid inequalities h·x <= beta form the cone {(beta, h) : beta - h·p >= 0, -h·r >= 0}.
        let mut rows: Vec<Vec<BigInt>> = points
            .iter()
            .map(|p| to_int_row(&Scalar::one(), p, true))
            .chain(rays.iter().map(|r| to_int_row(&Scalar::zero(), r, true)))
            .collect();
        rows.sort();
        rows.dedup();
        let cone = cone_from_inequalities(&rows, ambient + 1);

        let eq_rows: Vec<Vector> = cone
            .lineality
            .iter()
            .map(|l| {
                let v = from_bigints(l);
                let mut row = v[1..].to_vec();
                row.push(v[0].clone());
                row
            })
            .collect();
        let (eq_rref, _) = rref(&eq_rows, ambient + 1);
        let mut equalities = Vec::new();
        for row in &eq_rref {
            let normal = row[..ambient].to_vec();
            if is_zero_vec(&normal) {
                return Err(GeometryError::Internal("inconsistent affine hull".into()));
            }
            equalities.push(Hyperplane::new_equality(normal, row[ambient].clone())?);
        }
        equalities.sort();

        let eq_normals: Vec<Vector> = equalities.iter().map(|e| e.normal().to_vec()).collect();
        let mut halfspaces = Vec::new();
        for ray in &cone.rays {
            let v = from_bigints(ray);
            let (normal, offset) = project_modulo(&equalities, &v[1..], &v[0]);
            if is_zero_vec(&normal) {
                continue;
            }
            halfspaces.push(Hyperplane::new(normal, offset)?);
        }
        halfspaces.sort();
        halfspaces.dedup();

        let mut all_normals: Vec<Vector> = halfspaces.iter().map(|h| h.normal().to_vec()).collect();
        all_normals.extend(eq_normals.iter().cloned());
        if rank(&all_normals) < ambient {
            return Err(GeometryError::NotPointed);
        }

        let mut vertices = Vec::new();
        for p in points {
            let mut tight: Vec<Vector> =
                halfspaces.iter().filter(|h| h.on_boundary(&p)).map(|h| h.normal().to_vec()).collect();
            tight.extend(eq_normals.iter().cloned());
            if rank(&tight) == ambient {
                vertices.push(p);
            }
        }
        let mut extreme_rays = Vec::new();
        for r in rays {
            let mut tight: Vec<Vector> =
                halfspaces.iter().filter(|h| dot(h.normal(), &r).is_zero()).map(|h| h.normal().to_vec()).collect();
            tight.extend(eq_normals.iter().cloned());
            if rank(&tight) == ambient - 1 {
                extreme_rays.push(r);
            }
        }
        Ok(Self::assemble(ambient, halfspaces, equalities, GeneratorSet::new(vertices, extreme_rays)))
    }

    /// Builds `{x : ineqs hold, eqs hold with equality}`; returns `Empty` for an empty intersection.
    pub fn from_halfspaces(
        ambient: usize,
        inequalities: &[Hyperplane],
        equalities: &[Hyperplane],
    ) -> Result<DualDescription, GeometryError> {
        for h in inequalities.iter().chain(equalities) {
            check_dims(ambient, h.normal())?;
        }
        let mut x0 = vec![BigInt::zero(); ambient + 1];
        x0[0] = BigInt::one();
        let mut rows = vec![x0];
        for h in inequalities {
            rows.push(to_int_row(h.offset(), h.normal(), true));
        }
        for h in equalities {
            rows.push(to_int_row(h.offset(), h.normal(), true));
            rows.push(to_int_row(&-h.offset().clone(), h.normal(), false));
        }
        rows.sort();
        rows.dedup();
        let cone = cone_from_inequalities(&rows, ambient + 1);
        let mut points = Vec::new();
        let mut rays = Vec::new();
        for ray in &cone.rays {
            let v = from_bigints(ray);
            if v[0].is_positive() {
                points.push(v[1..].iter().map(|x| x / &v[0]).collect());
            } else {
                rays.push(v[1..].to_vec());
            }
        }
        if points.is_empty() {
            return Ok(DualDescription::Empty);
        }
        if !cone.lineality.is_empty() {
            return Err(GeometryError::NotPointed);
        }
        Polyhedron::from_generators(ambient, &GeneratorSet::new(points, rays)).map(DualDescription::Nonempty)
    }

    fn assemble(
        ambient: usize,
        halfspaces: Vec<Hyperplane>,
        equalities: Vec<Hyperplane>,
        generators: GeneratorSet,
    ) -> Polyhedron {
        let point_incidence = generators
            .points
            .iter()
            .map(|p| (0..halfspaces.len()).filter(|&i| halfspaces[i].on_boundary(p)).collect())
            .collect();
        let ray_incidence = generators
            .rays
            .iter()
            .map(|r| (0..halfspaces.len()).filter(|&i| dot(halfspaces[i].normal(), r).is_zero()).collect())
            .collect();
        Polyhedron { ambient, halfspaces, equalities, generators, point_incidence, ray_incidence }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Dimension of the affine hull.
    pub fn dim(&self) -> usize {
        self.ambient - self.equalities.len()
    }

    pub fn halfspaces(&self) -> &[Hyperplane] {
        &self.halfspaces
    }

    pub fn equalities(&self) -> &[Hyperplane] {
        &self.equalities
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.generators.points
    }

    pub fn rays(&self) -> &[Vector] {
        &self.generators.rays
    }

    pub fn is_bounded(&self) -> bool {
        self.generators.rays.is_empty()
    }

    /// Indices of facet halfspaces saturated by vertex `i`.
    pub fn vertex_incidence(&self, i: usize) -> &BTreeSet<usize> {
        &self.point_incidence[i]
    }

    /// Indices of facet halfspaces whose boundary contains the direction of ray `i`.
    pub fn ray_incidence(&self, i: usize) -> &BTreeSet<usize> {
        &self.ray_incidence[i]
    }

    /// Membership test against the halfspace description.
    pub fn contains(&self, x: &[Scalar]) -> bool {
        self.halfspaces.iter().all(|h| h.contains(x)) && self.equalities.iter().all(|e| e.on_boundary(x))
    }

    /// `max over the polyhedron of theta·x`, or `None` when unbounded in that direction.
    pub fn support(&self, theta: &[Scalar]) -> Option<Scalar> {
        if self.generators.rays.iter().any(|r| dot(r, theta).is_positive()) {
            return None;
        }
        self.generators.points.iter().map(|p| dot(p, theta)).max()
    }

    fn face_dim(&self, points: &[usize], rays: &[usize]) -> usize {
        let mut rows: Vec<Vector> = Vec::new();
        for &i in points {
            let mut v = vec![Scalar::one()];
            v.extend(self.generators.points[i].iter().cloned());
            rows.push(v);
        }
        for &i in rays {
            let mut v = vec![Scalar::zero()];
            v.extend(self.generators.rays[i].iter().cloned());
            rows.push(v);
        }
        rank(&rows).saturating_sub(1)
    }

    /// The smallest face containing the given generators, as (points, rays, saturated halfspaces).
    fn closure(&self, points: &[usize], rays: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let mut sat: BTreeSet<usize> = (0..self.halfspaces.len()).collect();
        for &i in points {
            sat = sat.intersection(&self.point_incidence[i]).cloned().collect();
        }
        for &i in rays {
            sat = sat.intersection(&self.ray_incidence[i]).cloned().collect();
        }
        let ps = (0..self.generators.points.len()).filter(|&i| sat.is_subset(&self.point_incidence[i])).collect();
        let rs = (0..self.generators.rays.len()).filter(|&i| sat.is_subset(&self.ray_incidence[i])).collect();
        (ps, rs, sat.into_iter().collect())
    }

    fn make_face(&self, points: Vec<usize>, rays: Vec<usize>, halfspaces: Vec<usize>) -> Face {
        let dim = self.face_dim(&points, &rays);
        let bounded = rays.is_empty();
        Face { dim, points, rays, halfspaces, bounded }
    }

    /// All faces of dimension `k`, in deterministic order.
    pub fn faces(&self, k: usize) -> Result<Vec<Face>, GeometryError> {
        if k > self.ambient {
            return Err(GeometryError::InvalidFaceDimension { requested: k, ambient: self.ambient });
        }
        let top = self.dim();
        if k > top {
            return Ok(Vec::new());
        }
        if k == top {
            let all_p = (0..self.generators.points.len()).collect();
            let all_r = (0..self.generators.rays.len()).collect();
            return Ok(vec![self.make_face(all_p, all_r, Vec::new())]);
        }
        if k == 0 {
            return Ok((0..self.generators.points.len())
                .map(|i| self.make_face(vec![i], Vec::new(), self.point_incidence[i].iter().cloned().collect()))
                .collect());
        }
        if k == 1 {
            let mut out = Vec::new();
            let np = self.generators.points.len();
            for i in 0..np {
                for j in (i + 1)..np {
                    let (ps, rs, sat) = self.closure(&[i, j], &[]);
                    if ps == [i, j] && rs.is_empty() {
                        out.push(self.make_face(ps, rs, sat));
                    }
                }
                for r in 0..self.generators.rays.len() {
                    let (ps, rs, sat) = self.closure(&[i], &[r]);
                    if ps == [i] && rs == [r] {
                        out.push(self.make_face(ps, rs, sat));
                    }
                }
            }
            return Ok(out);
        }
        // Walk down the face lattice from the facets.
        let mut level: Vec<Face> = (0..self.halfspaces.len())
            .map(|h| {
                let ps = (0..self.generators.points.len())
                    .filter(|&i| self.point_incidence[i].contains(&h))
                    .collect::<Vec<_>>();
                let rs =
                    (0..self.generators.rays.len()).filter(|&i| self.ray_incidence[i].contains(&h)).collect::<Vec<_>>();
                let (ps, rs, sat) = self.closure(&ps, &rs);
                self.make_face(ps, rs, sat)
            })
            .collect();
        let mut current = top - 1;
        while current > k {
            let mut next: Vec<Face> = Vec::new();
            for f in &level {
                for h in 0..self.halfspaces.len() {
                    if f.halfspaces.contains(&h) {
                        continue;
                    }
                    let ps: Vec<usize> =
                        f.points.iter().cloned().filter(|&i| self.point_incidence[i].contains(&h)).collect();
                    if ps.is_empty() {
                        continue;
                    }
                    let rs: Vec<usize> =
                        f.rays.iter().cloned().filter(|&i| self.ray_incidence[i].contains(&h)).collect();
                    let (ps, rs, sat) = self.closure(&ps, &rs);
                    let face = self.make_face(ps, rs, sat);
                    if face.dim + 1 == current && !next.iter().any(|g| g.points == face.points && g.rays == face.rays) {
                        next.push(face);
                    }
                }
            }
            level = next;
            current -= 1;
        }
        level.sort_by(|a, b| (&a.points, &a.rays).cmp(&(&b.points, &b.rays)));
        level.dedup_by(|a, b| a.points == b.points && a.rays == b.rays);
        Ok(level)
    }
}

/// Reduces `(normal, offset)` modulo the equalities by orthogonal projection of the normal onto
/// their common nullspace, shifting the offset consistently.
fn project_modulo(equalities: &[Hyperplane], normal: &[Scalar], offset: &Scalar) -> (Vector, Scalar) {
    if equalities.is_empty() {
        return (normal.to_vec(), offset.clone());
    }
    let k = equalities.len();
    let gram: Vec<Vector> =
        (0..k).map(|i| (0..k).map(|j| dot(equalities[i].normal(), equalities[j].normal())).collect()).collect();
    let rhs: Vector = equalities.iter().map(|e| dot(e.normal(), normal)).collect();
    let coef = solve(&gram, &rhs, k).expect("independent equality normals");
    let mut n = normal.to_vec();
    let mut b = offset.clone();
    for (c, e) in coef.iter().zip(equalities) {
        for (x, y) in n.iter_mut().zip(e.normal()) {
            *x = &*x - c * y;
        }
        b -= c * e.offset();
    }
    (n, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ivec, rvec};

    fn square_halfspaces() -> Vec<Hyperplane> {
        vec![
            Hyperplane::new(ivec(&[1, 0]), int(1)).unwrap(),
            Hyperplane::new(ivec(&[-1, 0]), int(0)).unwrap(),
            Hyperplane::new(ivec(&[0, 1]), int(1)).unwrap(),
            Hyperplane::new(ivec(&[0, -1]), int(0)).unwrap(),
        ]
    }

    #[test]
    fn square_from_halfspaces() {
        let DualDescription::Nonempty(p) = Polyhedron::from_halfspaces(2, &square_halfspaces(), &[]).unwrap() else {
            panic!("square is nonempty")
        };
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.halfspaces().len(), 4);
        assert_eq!(p.faces(0).unwrap().len(), 4);
        let edges = p.faces(1).unwrap();
        assert_eq!(edges.len(), 4);
        assert!(edges.iter().all(|e| e.bounded));
    }

    #[test]
    fn simplex_from_points() {
        for d in 1..=4 {
            let mut pts = vec![vec![Scalar::zero(); d]];
            for i in 0..d {
                pts.push(crate::scalar::unit_vec(d, i));
            }
            let p = Polyhedron::from_generators(d, &GeneratorSet::polytope(pts)).unwrap();
            assert_eq!(p.halfspaces().len(), d + 1);
            assert_eq!(p.vertices().len(), d + 1);
        }
    }

    #[test]
    fn one_good_monopoly_extended_menu() {
        let gens = GeneratorSet::new(vec![ivec(&[0, 0]), rvec(&[(1, 1), (1, 2)])], vec![ivec(&[-1, 0]), ivec(&[1, 1])]);
        let p = Polyhedron::from_generators(2, &gens).unwrap();
        assert_eq!(p.halfspaces().len(), 3);
        let edges = p.faces(1).unwrap();
        assert_eq!(edges.len(), 3);
        let bounded: Vec<_> = edges.iter().filter(|e| e.bounded).collect();
        assert_eq!(bounded.len(), 1);
        assert_eq!(bounded[0].points, vec![0, 1]);
    }

    #[test]
    fn interior_and_duplicate_points_are_dropped() {
        let gens = GeneratorSet::polytope(vec![
            ivec(&[0, 0]),
            ivec(&[2, 0]),
            ivec(&[0, 2]),
            ivec(&[0, 0]),
            rvec(&[(1, 2), (1, 2)]),
        ]);
        let p = Polyhedron::from_generators(2, &gens).unwrap();
        assert_eq!(p.vertices().len(), 3);
    }

    #[test]
    fn segment_in_the_plane_has_an_equality() {
        let gens = GeneratorSet::polytope(vec![ivec(&[0, 0]), ivec(&[1, 1])]);
        let p = Polyhedron::from_generators(2, &gens).unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.equalities().len(), 1);
        assert_eq!(p.halfspaces().len(), 2);
        assert_eq!(p.faces(1).unwrap().len(), 1);
        assert_eq!(p.faces(0).unwrap().len(), 2);
    }

    #[test]
    fn empty_intersection_is_reported() {
        let hs = vec![Hyperplane::new(ivec(&[1]), int(0)).unwrap(), Hyperplane::new(ivec(&[-1]), int(-1)).unwrap()];
        assert_eq!(Polyhedron::from_halfspaces(1, &hs, &[]).unwrap(), DualDescription::Empty);
    }

    #[test]
    fn cube_faces_by_dimension() {
        let mut pts = Vec::new();
        for m in 0..8i64 {
            pts.push(ivec(&[m & 1, (m >> 1) & 1, (m >> 2) & 1]));
        }
        let p = Polyhedron::from_generators(3, &GeneratorSet::polytope(pts)).unwrap();
        assert_eq!(p.faces(0).unwrap().len(), 8);
        assert_eq!(p.faces(1).unwrap().len(), 12);
        assert_eq!(p.faces(2).unwrap().len(), 6);
        assert_eq!(p.faces(3).unwrap().len(), 1);
        assert!(p.faces(4).is_err());
    }
}
