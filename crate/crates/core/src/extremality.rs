//! Extremality of finite menus: the deformation system, the lifted deformation-polytope
//! cross-check, decomposition certificates and their verification.

use menuex_geometry::scalar::{add, dot, format_vec, is_zero_vec, scale, sub, zero_vec};
use menuex_geometry::{nullspace_basis, rank, solve, DualDescription, Hyperplane, Polyhedron, Scalar, Vector};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::model::{extend_menu, support_value, AllocationSpace, ExtendedMenu, Menu, SupportValue, TypeCone};

/// Number of seeded probe directions used by certificate verification.
pub const PROBE_COUNT: usize = 256;
const PROBE_SEED: u64 = 0x5eed_0f7e57;

/// An inequality of the deformation system that is strict at the trivial solution:
/// `(a + ψ_a)·n_H <= c_H` for a facet `H` of `A` not containing vertex `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictConstraint {
    pub vertex: usize,
    pub facet: usize,
    pub slack: Scalar,
}

/// The homogeneous system in the unknowns `ψ_a ∈ ℚ^d` (one block per vertex) followed by one
/// `μ_e` per bounded edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationSystem {
    pub d: usize,
    pub vertices: Vec<Vector>,
    pub edges: Vec<(usize, usize)>,
    pub matrix: Vec<Vector>,
    pub ncols: usize,
    pub strict: Vec<StrictConstraint>,
}

/// A nullspace vector of the deformation system, split into its blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction {
    pub psi: Vec<Vector>,
    pub mu: Vec<Scalar>,
}

impl DeformationSystem {
    pub fn split(&self, v: &[Scalar]) -> Direction {
        let n = self.vertices.len();
        let psi = (0..n).map(|a| v[a * self.d..(a + 1) * self.d].to_vec()).collect();
        let mu = v[n * self.d..].to_vec();
        Direction { psi, mu }
    }

    pub fn flatten(&self, dir: &Direction) -> Vector {
        let mut v: Vector = dir.psi.iter().flatten().cloned().collect();
        v.extend(dir.mu.iter().cloned());
        v
    }

    pub fn solves(&self, dir: &Direction) -> bool {
        if dir.psi.len() != self.vertices.len() || dir.mu.len() != self.edges.len() {
            return false;
        }
        if dir.psi.iter().any(|p| p.len() != self.d) {
            return false;
        }
        let v = self.flatten(dir);
        self.matrix.iter().all(|row| dot(row, &v).is_zero())
    }
}

/// Builds the deformation system of `M` at its trivial solution.
pub fn build_deformation_system(m: &ExtendedMenu, space: &AllocationSpace) -> DeformationSystem {
    let d = space.dim();
    let vertices = m.vertices().to_vec();
    let edges = m.edges().to_vec();
    let n = vertices.len();
    let ncols = d * n + edges.len();
    let mut matrix = Vec::new();
    for (e, &(a, b)) in edges.iter().enumerate() {
        for j in 0..d {
            let mut row = zero_vec(ncols);
            row[d * n + e] = &vertices[a][j] - &vertices[b][j];
            row[a * d + j] = -Scalar::one();
            row[b * d + j] = Scalar::one();
            matrix.push(row);
        }
    }
    let mut strict = Vec::new();
    for (a, inc) in m.incidences().iter().enumerate() {
        for &h in inc {
            let mut row = zero_vec(ncols);
            for (j, c) in space.facets()[h].normal().iter().enumerate() {
                row[a * d + j] = c.clone();
            }
            matrix.push(row);
        }
        for (h, facet) in space.facets().iter().enumerate() {
            if !inc.contains(&h) {
                strict.push(StrictConstraint { vertex: a, facet: h, slack: facet.slack(&vertices[a]) });
            }
        }
    }
    DeformationSystem { d, vertices, edges, matrix, ncols, strict }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtremalityVerdict {
    Extreme,
    NotExtreme(Direction),
}

impl ExtremalityVerdict {
    pub fn is_extreme(&self) -> bool {
        matches!(self, ExtremalityVerdict::Extreme)
    }
}

/// Extreme iff the deformation system has only the trivial solution; otherwise returns the first
/// nullspace basis vector.
pub fn is_extreme_finite(m: &ExtendedMenu, space: &AllocationSpace) -> Result<ExtremalityVerdict> {
    let sys = build_deformation_system(m, space);
    if sys.strict.iter().any(|s| !s.slack.is_positive()) {
        return Err(CoreError::Internal("an off-facet inequality is not strict at the trivial solution".into()));
    }
    match nullspace_basis(&sys.matrix, sys.ncols).into_iter().next() {
        None => Ok(ExtremalityVerdict::Extreme),
        Some(v) => {
            let dir = sys.split(&v);
            if dir.psi.iter().all(|p| is_zero_vec(p)) {
                return Err(CoreError::Internal("nullspace vector with zero vertex displacement".into()));
            }
            Ok(ExtremalityVerdict::NotExtreme(dir))
        }
    }
}

/// Dimension of the deformation system's nullspace (0 iff extreme).
pub fn deformation_dimension(m: &ExtendedMenu, space: &AllocationSpace) -> usize {
    let sys = build_deformation_system(m, space);
    sys.ncols - rank(&sys.matrix)
}

/// One support-function check `2·h_M(θ) = h_{M'}(θ) + h_{M''}(θ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeRecord {
    pub direction: Vector,
    pub kind: ProbeKind,
    pub value: Scalar,
    pub value_plus: Scalar,
    pub value_minus: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeKind {
    FacetNormal,
    EdgeNormal,
    Random,
}

/// A verified witness that `M = ½M' + ½M''` with `M' ≠ M''`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionCertificate {
    pub direction: Direction,
    pub epsilon: Scalar,
    /// Vertices of `M'`: `a + εψ_a`, in the order of `ext M`.
    pub menu_plus: Vec<Vector>,
    /// Vertices of `M''`: `a - εψ_a`.
    pub menu_minus: Vec<Vector>,
    pub probes: Vec<ProbeRecord>,
}

/// The largest admissible step for `direction`: at most 1, keeping every off-facet inequality of
/// `A` and every edge multiplier `1 ± εμ_e` nonnegative.
pub fn max_step(m: &ExtendedMenu, space: &AllocationSpace, dir: &Direction) -> Scalar {
    let mut eps = Scalar::one();
    for (a, v) in m.vertices().iter().enumerate() {
        for (h, facet) in space.facets().iter().enumerate() {
            if m.incidences()[a].contains(&h) {
                continue;
            }
            let rate = dot(&dir.psi[a], facet.normal()).abs();
            if !rate.is_zero() {
                let bound = facet.slack(v) / rate;
                if bound < eps {
                    eps = bound;
                }
            }
        }
    }
    for mu in &dir.mu {
        if !mu.is_zero() {
            let bound = Scalar::one() / mu.abs();
            if bound < eps {
                eps = bound;
            }
        }
    }
    eps
}

/// Builds and verifies the decomposition along `direction` with step `max_step / 2`.
pub fn extract_decomposition(
    m: &ExtendedMenu,
    space: &AllocationSpace,
    cone: &TypeCone,
    direction: &Direction,
) -> Result<DecompositionCertificate> {
    let sys = build_deformation_system(m, space);
    if !sys.solves(direction) || direction.psi.iter().all(|p| is_zero_vec(p)) {
        return Err(CoreError::Precondition("direction is not a nonzero nullspace vector".into()));
    }
    let eps = max_step(m, space, direction) / Scalar::from_integer(2.into());
    extract_decomposition_at(m, space, cone, direction, &eps)
}

/// Builds and verifies the decomposition along `direction` with an explicit step.
pub fn extract_decomposition_at(
    m: &ExtendedMenu,
    space: &AllocationSpace,
    cone: &TypeCone,
    direction: &Direction,
    epsilon: &Scalar,
) -> Result<DecompositionCertificate> {
    let sys = build_deformation_system(m, space);
    if !sys.solves(direction) {
        return Err(CoreError::Precondition("direction is not in the nullspace".into()));
    }
    if !epsilon.is_positive() {
        return Err(CoreError::Precondition("step must be positive".into()));
    }
    let menu_plus: Vec<Vector> =
        m.vertices().iter().zip(&direction.psi).map(|(a, p)| add(a, &scale(epsilon, p))).collect();
    let menu_minus: Vec<Vector> =
        m.vertices().iter().zip(&direction.psi).map(|(a, p)| sub(a, &scale(epsilon, p))).collect();
    let mut cert = DecompositionCertificate {
        direction: direction.clone(),
        epsilon: epsilon.clone(),
        menu_plus,
        menu_minus,
        probes: Vec::new(),
    };
    match verify_certificate(&cert, m, space, cone) {
        Ok(probes) => {
            cert.probes = probes;
            Ok(cert)
        }
        Err(rej) => Err(CoreError::Internal(format!("constructed certificate failed verification: {rej}"))),
    }
}

/// Why a certificate was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateRejection {
    pub reason: String,
    pub direction: Option<Vector>,
}

impl std::fmt::Display for CertificateRejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.direction {
            Some(d) => write!(f, "{} (direction {})", self.reason, format_vec(d)),
            None => write!(f, "{}", self.reason),
        }
    }
}

fn reject<T>(reason: impl Into<String>, direction: Option<Vector>) -> std::result::Result<T, CertificateRejection> {
    Err(CertificateRejection { reason: reason.into(), direction })
}

/// Seeded rational directions in `cone Θ`.
pub fn probe_directions(cone: &TypeCone, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = cone.dim();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vector = if cone.is_unrestricted() {
            (0..d).map(|_| Scalar::new(rng.gen_range(-16i64..=16).into(), rng.gen_range(1i64..=16).into())).collect()
        } else {
            let mut acc = zero_vec(d);
            for r in cone.rays() {
                let w = Scalar::new(rng.gen_range(0i64..=8).into(), rng.gen_range(1i64..=8).into());
                acc = add(&acc, &scale(&w, r));
            }
            acc
        };
        if !is_zero_vec(&v) {
            out.push(v);
        }
    }
    out
}

/// Checks a certificate exactly: validity of both summands in `A`, individual rationality,
/// distinctness, deformation structure, and the support identity on facet normals, edge
/// normals and seeded probes. Returns the probe log on success.
pub fn verify_certificate(
    cert: &DecompositionCertificate,
    m: &ExtendedMenu,
    space: &AllocationSpace,
    cone: &TypeCone,
) -> std::result::Result<Vec<ProbeRecord>, CertificateRejection> {
    let d = space.dim();
    for menu in [&cert.menu_plus, &cert.menu_minus] {
        if menu.is_empty() {
            return reject("empty summand menu", None);
        }
        for a in menu {
            if a.len() != d {
                return reject("summand item has the wrong dimension", None);
            }
            if let Some(h) = space.violated_facet(a) {
                return reject(format!("summand item {} violates {h}", format_vec(a)), Some(h.normal().to_vec()));
            }
        }
    }
    let build = |items: &Vec<Vector>| extend_menu(&Menu::new(items.clone()), cone, space);
    let (mp, mm) = match (build(&cert.menu_plus), build(&cert.menu_minus)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return reject("summand extended menu could not be built", None),
    };
    if mp.vertices() == mm.vertices() {
        return reject("summands coincide", None);
    }
    if let Some(v) = space.veto() {
        for (name, s) in [("M'", &mp), ("M''", &mm)] {
            if !s.poly().contains(v) {
                return reject(format!("veto allocation missing from {name}"), None);
            }
        }
    }
    let mut directions: Vec<(Vector, ProbeKind)> = Vec::new();
    for h in m.poly().halfspaces() {
        directions.push((h.normal().to_vec(), ProbeKind::FacetNormal));
    }
    for e in m.poly().equalities() {
        directions.push((e.normal().to_vec(), ProbeKind::FacetNormal));
        directions.push((e.normal().iter().map(|x| -x.clone()).collect(), ProbeKind::FacetNormal));
    }
    for &(a, b) in m.edges() {
        let common: Vec<&Hyperplane> = m
            .poly()
            .halfspaces()
            .iter()
            .enumerate()
            .filter(|(i, _)| m.poly().vertex_incidence(a).contains(i) && m.poly().vertex_incidence(b).contains(i))
            .map(|(_, h)| h)
            .collect();
        let mut sum = zero_vec(d);
        for h in common {
            sum = add(&sum, h.normal());
        }
        if !is_zero_vec(&sum) {
            directions.push((sum, ProbeKind::EdgeNormal));
        }
    }
    for p in probe_directions(cone, PROBE_COUNT, PROBE_SEED) {
        directions.push((p, ProbeKind::Random));
    }
    let mut log = Vec::with_capacity(directions.len());
    let two = Scalar::from_integer(2.into());
    for (theta, kind) in directions {
        let (h, hp, hm) =
            (support_value(m, cone, &theta), support_value(&mp, cone, &theta), support_value(&mm, cone, &theta));
        match (h, hp, hm) {
            (SupportValue::Finite(h), SupportValue::Finite(hp), SupportValue::Finite(hm)) => {
                if &h * &two != &hp + &hm {
                    return reject("support identity fails", Some(theta));
                }
                log.push(ProbeRecord { direction: theta, kind, value: h, value_plus: hp, value_minus: hm });
            }
            (SupportValue::Infinite, SupportValue::Infinite, SupportValue::Infinite) => {}
            _ => return reject("support values disagree on finiteness", Some(theta)),
        }
    }
    for (name, s) in [("M'", &mp), ("M''", &mm)] {
        match is_deformation(m, s) {
            Ok(true) => {}
            Ok(false) => return reject(format!("{name} is not a deformation of M"), None),
            Err(e) => return reject(format!("deformation check failed: {e}"), None),
        }
    }
    Ok(log)
}

/// The facet hyperplanes `𝓗_M` used by the lifted system: facets of `M` plus both orientations of
/// the affine-hull equalities when `M` is lower-dimensional.
fn lifted_hyperplanes(m: &ExtendedMenu) -> Vec<(Vector, Scalar)> {
    let mut out: Vec<(Vector, Scalar)> =
        m.poly().halfspaces().iter().map(|h| (h.normal().to_vec(), h.offset().clone())).collect();
    for e in m.poly().equalities() {
        out.push((e.normal().to_vec(), e.offset().clone()));
        out.push((e.normal().iter().map(|x| -x.clone()).collect(), -e.offset().clone()));
    }
    out
}

/// Index sets `I_a` of lifted hyperplanes through each vertex.
fn lifted_incidence(m: &ExtendedMenu, hs: &[(Vector, Scalar)]) -> Vec<Vec<usize>> {
    m.vertices().iter().map(|a| (0..hs.len()).filter(|&i| dot(&hs[i].0, a) == hs[i].1).collect()).collect()
}

/// Decides extremality through the lifted deformation polytope in the variables `(c', (φ_a))`:
/// the trivial point is a vertex iff its active constraints have full rank.
pub fn def_polytope_cross_check(m: &ExtendedMenu, space: &AllocationSpace) -> Result<bool> {
    let d = space.dim();
    let hs = lifted_hyperplanes(m);
    let inc = lifted_incidence(m, &hs);
    let k = hs.len();
    let n = m.vertices().len();
    let ncols = k + d * n;
    let mut rows = Vec::new();
    for (a, vertex) in m.vertices().iter().enumerate() {
        if rank(&inc[a].iter().map(|&i| hs[i].0.clone()).collect::<Vec<_>>()) != d {
            return Err(CoreError::Internal(format!("vertex {} is not cut out by 𝓗_M", format_vec(vertex))));
        }
        for &i in &inc[a] {
            let mut row = zero_vec(ncols);
            row[i] = -Scalar::one();
            for (j, c) in hs[i].0.iter().enumerate() {
                row[k + a * d + j] = c.clone();
            }
            rows.push(row);
        }
        for (h, facet) in space.facets().iter().enumerate() {
            if facet.on_boundary(vertex) {
                let mut row = zero_vec(ncols);
                for (j, c) in facet.normal().iter().enumerate() {
                    row[k + a * d + j] = c.clone();
                }
                rows.push(row);
            } else if !facet.slack(vertex).is_positive() || m.incidences()[a].contains(&h) {
                return Err(CoreError::Internal("feasibility inequality not strict off its facet".into()));
            }
        }
        for (i, (nrm, c)) in hs.iter().enumerate() {
            if !inc[a].contains(&i) && dot(nrm, vertex) >= *c {
                return Err(CoreError::Internal("incentive inequality not strict off its facet".into()));
            }
        }
    }
    Ok(rank(&rows) == ncols)
}

/// Whether `M'` is a deformation of `M`: translating every facet hyperplane of `M` to support `M'`
/// reproduces `M'`, and every vertex-defining intersection lands on a vertex of `M'`.
pub fn is_deformation(m: &ExtendedMenu, m2: &ExtendedMenu) -> Result<bool> {
    let d = m.dim();
    if m2.dim() != d {
        return Err(CoreError::DimensionMismatch { what: "deformation".into(), expected: d, found: m2.dim() });
    }
    let hs = lifted_hyperplanes(m);
    let inc = lifted_incidence(m, &hs);
    let mut shifted = Vec::with_capacity(hs.len());
    for (n, _) in &hs {
        if m2.poly().rays().iter().any(|r| dot(r, n).is_positive()) {
            return Ok(false);
        }
        let c = m2.vertices().iter().map(|a| dot(a, n)).max().expect("nonempty");
        shifted.push((n.clone(), c));
    }
    for (a, _) in m.vertices().iter().enumerate() {
        let rows: Vec<Vector> = inc[a].iter().map(|&i| shifted[i].0.clone()).collect();
        let rhs: Vec<Scalar> = inc[a].iter().map(|&i| shifted[i].1.clone()).collect();
        let Some(x) = solve(&rows, &rhs, d) else { return Ok(false) };
        if rank(&rows) != d || !m2.vertices().contains(&x) {
            return Ok(false);
        }
    }
    let halfspaces: Vec<Hyperplane> =
        shifted.iter().map(|(n, c)| Hyperplane::new(n.clone(), c.clone())).collect::<std::result::Result<_, _>>()?;
    let p = match Polyhedron::from_halfspaces(d, &halfspaces, &[])? {
        DualDescription::Empty => return Ok(false),
        DualDescription::Nonempty(p) => p,
    };
    Ok(p.vertices() == m2.vertices() && p.rays() == m2.poly().rays())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Menu;
    use menuex_geometry::scalar::{int, ivec, ratio, rvec};

    fn ext(space: &AllocationSpace, cone: &TypeCone, items: Vec<Vector>) -> ExtendedMenu {
        extend_menu(&Menu::new(items), cone, space).unwrap()
    }

    #[test]
    fn posted_price_system_has_full_rank() {
        let space = AllocationSpace::monopoly(1, &int(1)).unwrap();
        let cone = TypeCone::monopoly(1).unwrap();
        let m = ext(&space, &cone, vec![ivec(&[0, 0]), rvec(&[(1, 1), (1, 2)])]);
        let sys = build_deformation_system(&m, &space);
        assert_eq!(sys.ncols, 5);
        assert!(nullspace_basis(&sys.matrix, sys.ncols).is_empty());
        assert!(is_extreme_finite(&m, &space).unwrap().is_extreme());
        assert!(def_polytope_cross_check(&m, &space).unwrap());
    }

    #[test]
    fn interior_triangle_is_extreme() {
        let space = AllocationSpace::simplex(2).unwrap();
        let cone = TypeCone::unrestricted(2);
        let m = ext(&space, &cone, vec![rvec(&[(0, 1), (1, 2)]), rvec(&[(1, 2), (0, 1)]), rvec(&[(1, 2), (1, 2)])]);
        let sys = build_deformation_system(&m, &space);
        assert_eq!(sys.edges.len(), 3);
        assert_eq!(sys.ncols, 9);
        assert!(is_extreme_finite(&m, &space).unwrap().is_extreme());
    }

    #[test]
    fn free_segment_has_all_translations() {
        let space = AllocationSpace::cube(3).unwrap();
        let cone = TypeCone::unrestricted(3);
        let m = ext(&space, &cone, vec![rvec(&[(1, 4), (1, 4), (1, 4)]), rvec(&[(1, 2), (1, 2), (1, 2)])]);
        assert!(deformation_dimension(&m, &space) >= 3);
    }

    #[test]
    fn strike_quadrilateral_decomposes() {
        let space = AllocationSpace::simplex(2).unwrap();
        let cone = TypeCone::unrestricted(2);
        let m = ext(
            &space,
            &cone,
            vec![rvec(&[(0, 1), (1, 4)]), rvec(&[(1, 4), (0, 1)]), rvec(&[(3, 4), (1, 4)]), rvec(&[(1, 4), (3, 4)])],
        );
        let ExtremalityVerdict::NotExtreme(dir) = is_extreme_finite(&m, &space).unwrap() else { panic!() };
        assert!(!def_polytope_cross_check(&m, &space).unwrap());
        let cert = extract_decomposition(&m, &space, &cone, &dir).unwrap();
        assert!(verify_certificate(&cert, &m, &space, &cone).is_ok());
        let mut tampered = cert.clone();
        tampered.menu_plus[0][0] += ratio(1, 1000);
        assert!(verify_certificate(&tampered, &m, &space, &cone).is_err());
    }

    #[test]
    fn deformation_checks() {
        let space = AllocationSpace::cube(2).unwrap();
        let cone = TypeCone::unrestricted(2);
        let sq = ext(
            &space,
            &cone,
            vec![rvec(&[(1, 4), (1, 4)]), rvec(&[(3, 4), (1, 4)]), rvec(&[(3, 4), (3, 4)]), rvec(&[(1, 4), (3, 4)])],
        );
        assert!(is_deformation(&sq, &sq).unwrap());
        let seg = ext(&space, &cone, vec![rvec(&[(1, 4), (1, 4)]), rvec(&[(3, 4), (1, 4)])]);
        assert!(is_deformation(&sq, &seg).unwrap());
        let tri = ext(&space, &cone, vec![ivec(&[0, 0]), rvec(&[(1, 2), (0, 1)]), rvec(&[(0, 1), (1, 2)])]);
        let rotated = ext(&space, &cone, vec![rvec(&[(1, 2), (0, 1)]), rvec(&[(1, 2), (1, 2)]), ivec(&[0, 0])]);
        assert!(!is_deformation(&tri, &rotated).unwrap());
    }
}
