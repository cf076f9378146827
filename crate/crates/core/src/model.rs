//! Scenarios: allocation polytope, type cone, menu, objective, and the extended menu.

use menuex_geometry::scalar::{dot, format_vec, int, is_zero_vec, primitive, primitive_integer, unit_vec, zero_vec};
use menuex_geometry::{
    dd::cone_from_inequalities, lp_solve, lp_solve_halfspaces, rank, DualDescription, GeneratorSet, Hyperplane,
    LpOutcome, LpRow, Polyhedron, Scalar, Sense, Vector,
};
use num_traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};

/// The allocation polytope `A` with its facet list and optional veto allocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllocationSpace {
    poly: Polyhedron,
    veto: Option<Vector>,
}

impl AllocationSpace {
    /// Builds `A = {a : normal·a <= offset}`; the result must be bounded and full-dimensional.
    pub fn from_halfspaces(d: usize, halfspaces: &[Hyperplane], veto: Option<Vector>) -> Result<Self> {
        let poly = match Polyhedron::from_halfspaces(d, halfspaces, &[])? {
            DualDescription::Empty => return Err(CoreError::EmptySpace),
            DualDescription::Nonempty(p) => p,
        };
        if poly.dim() < d {
            return Err(CoreError::LowerDimensionalSpace { expected: d, found: poly.dim() });
        }
        if !poly.is_bounded() {
            return Err(CoreError::UnboundedSpace);
        }
        check_irredundant(&poly)?;
        let space = AllocationSpace { poly, veto: None };
        match veto {
            None => Ok(space),
            Some(v) => space.with_veto(v),
        }
    }

    /// Attaches a veto allocation, which must be a vertex of `A`.
    pub fn with_veto(mut self, veto: Vector) -> Result<Self> {
        self.check_dim("veto", &veto)?;
        if !self.is_vertex(&veto) {
            return Err(CoreError::VetoNotVertex(format_vec(&veto)));
        }
        self.veto = Some(veto);
        Ok(self)
    }

    pub fn without_veto(mut self) -> Self {
        self.veto = None;
        self
    }

    /// The unit simplex `{a >= 0, Σaᵢ <= 1}` in dimension `d`.
    pub fn simplex(d: usize) -> Result<Self> {
        let mut hs: Vec<Hyperplane> = (0..d).map(|i| neg_coordinate(d, i)).collect();
        hs.push(Hyperplane::new(vec![Scalar::one(); d], Scalar::one())?);
        Self::from_halfspaces(d, &hs, None)
    }

    /// The unit cube `[0,1]^d`.
    pub fn cube(d: usize) -> Result<Self> {
        let mut hs: Vec<Hyperplane> = (0..d).map(|i| neg_coordinate(d, i)).collect();
        for i in 0..d {
            hs.push(Hyperplane::new(unit_vec(d, i), Scalar::one())?);
        }
        Self::from_halfspaces(d, &hs, None)
    }

    /// The monopoly space `[0,1]^m × [0,κ]` (last coordinate is the payment) with veto at the origin.
    pub fn monopoly(m: usize, kappa: &Scalar) -> Result<Self> {
        if !kappa.is_positive() {
            return Err(CoreError::Precondition("monopoly price bound must be positive".into()));
        }
        let d = m + 1;
        let mut hs: Vec<Hyperplane> = (0..d).map(|i| neg_coordinate(d, i)).collect();
        for i in 0..m {
            hs.push(Hyperplane::new(unit_vec(d, i), Scalar::one())?);
        }
        hs.push(Hyperplane::new(unit_vec(d, m), kappa.clone())?);
        Self::from_halfspaces(d, &hs, Some(zero_vec(d)))
    }

    pub fn dim(&self) -> usize {
        self.poly.ambient_dim()
    }

    pub fn poly(&self) -> &Polyhedron {
        &self.poly
    }

    /// The facet-defining halfspaces 𝓕 of `A`, in canonical order.
    pub fn facets(&self) -> &[Hyperplane] {
        self.poly.halfspaces()
    }

    pub fn vertices(&self) -> &[Vector] {
        self.poly.vertices()
    }

    pub fn veto(&self) -> Option<&Vector> {
        self.veto.as_ref()
    }

    pub fn contains(&self, a: &[Scalar]) -> bool {
        self.poly.contains(a)
    }

    pub fn is_vertex(&self, a: &[Scalar]) -> bool {
        self.poly.vertices().iter().any(|v| v.as_slice() == a)
    }

    /// Indices of the facets of `A` containing `a`.
    pub fn touched_facets(&self, a: &[Scalar]) -> Vec<usize> {
        self.facets().iter().enumerate().filter(|(_, h)| h.on_boundary(a)).map(|(i, _)| i).collect()
    }

    /// The first facet violated by `a`, if any.
    pub fn violated_facet(&self, a: &[Scalar]) -> Option<&Hyperplane> {
        self.facets().iter().find(|h| !h.contains(a))
    }

    fn check_dim(&self, what: &str, v: &[Scalar]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(CoreError::DimensionMismatch { what: what.into(), expected: self.dim(), found: v.len() });
        }
        Ok(())
    }
}

fn neg_coordinate(d: usize, i: usize) -> Hyperplane {
    let mut n = zero_vec(d);
    n[i] = -Scalar::one();
    Hyperplane::new(n, Scalar::zero()).expect("nonzero normal")
}

/// LP cross-check that no facet is implied by the others.
fn check_irredundant(poly: &Polyhedron) -> Result<()> {
    let hs = poly.halfspaces();
    for (i, h) in hs.iter().enumerate() {
        let others: Vec<Hyperplane> = hs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        let supported = match lp_solve_halfspaces(&others, h.normal(), Sense::Maximize)? {
            LpOutcome::Unbounded { .. } => true,
            LpOutcome::Optimal(o) => o.value > *h.offset(),
            LpOutcome::Infeasible => false,
        };
        if !supported {
            return Err(CoreError::Internal(format!("facet {h} is redundant")));
        }
    }
    Ok(())
}

/// The type cone `cone Θ` with generators of its polar `Θ°`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeCone {
    rays: Vec<Vector>,
    polar_rays: Vec<Vector>,
    unrestricted: bool,
}

impl TypeCone {
    /// `cone Θ = ℝ^d`, generated by `±eᵢ`; its polar is `{0}`.
    pub fn unrestricted(d: usize) -> Self {
        let mut rays = Vec::new();
        for i in 0..d {
            rays.push(unit_vec(d, i));
            let mut n = zero_vec(d);
            n[i] = -Scalar::one();
            rays.push(n);
        }
        TypeCone { rays, polar_rays: Vec::new(), unrestricted: true }
    }

    /// The monopoly type cone generated by `(v, -1)` for `v ∈ {0,1}^m`.
    pub fn monopoly(m: usize) -> Result<Self> {
        let mut rays = Vec::new();
        for mask in 0..(1u64 << m) {
            let mut r: Vector =
                (0..m).map(|i| if mask >> i & 1 == 1 { Scalar::one() } else { Scalar::zero() }).collect();
            r.push(-Scalar::one());
            rays.push(r);
        }
        Self::from_rays(rays)
    }

    /// Builds the cone from generating rays; the cone must be full-dimensional.
    pub fn from_rays(rays: Vec<Vector>) -> Result<Self> {
        let d = rays.first().map(|r| r.len()).ok_or(CoreError::ConeNotFullDimensional { rank: 0, dim: 0 })?;
        for r in &rays {
            if r.len() != d {
                return Err(CoreError::DimensionMismatch { what: "cone ray".into(), expected: d, found: r.len() });
            }
            if is_zero_vec(r) {
                return Err(CoreError::Geometry(menuex_geometry::GeometryError::ZeroRay));
            }
        }
        let rk = rank(&rays);
        if rk < d {
            return Err(CoreError::ConeNotFullDimensional { rank: rk, dim: d });
        }
        let mut rays: Vec<Vector> = rays.iter().map(|r| primitive(r)).collect();
        rays.sort();
        rays.dedup();
        let polar_rays = polar_cone(&rays)?;
        let cone = TypeCone { unrestricted: polar_rays.is_empty(), rays, polar_rays };
        cone.cross_validate()?;
        Ok(cone)
    }

    pub fn dim(&self) -> usize {
        self.rays.first().map_or(0, |r| r.len())
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    pub fn polar_rays(&self) -> &[Vector] {
        &self.polar_rays
    }

    pub fn is_unrestricted(&self) -> bool {
        self.unrestricted
    }

    /// `θ ∈ cone Θ`, tested against the halfspaces `y·θ <= 0` for the polar generators `y`.
    pub fn contains(&self, theta: &[Scalar]) -> bool {
        self.polar_rays.iter().all(|y| !dot(y, theta).is_positive())
    }

    /// Checks polarity pairwise and that the double polar reproduces the cone.
    fn cross_validate(&self) -> Result<()> {
        for y in &self.polar_rays {
            if self.rays.iter().any(|t| dot(y, t).is_positive()) {
                return Err(CoreError::Internal("polar ray has positive product with a cone ray".into()));
            }
        }
        let d = self.dim();
        let double =
            if self.polar_rays.is_empty() { TypeCone::unrestricted(d).rays } else { polar_cone(&self.polar_rays)? };
        for g in &double {
            if !in_cone(&self.rays, g)? {
                return Err(CoreError::Internal("double polar is larger than the cone".into()));
            }
        }
        Ok(())
    }
}

/// Generators of `{y : y·θ <= 0 for every ray θ}`; a lineality direction `l` is listed as `±l`.
pub fn polar_cone(rays: &[Vector]) -> Result<Vec<Vector>> {
    let d = rays.first().map(|r| r.len()).unwrap_or(0);
    if rays.iter().any(|r| is_zero_vec(r)) {
        return Err(CoreError::Geometry(menuex_geometry::GeometryError::ZeroRay));
    }
    let mut rows: Vec<_> =
        rays.iter().map(|r| primitive_integer(&r.iter().map(|x| -x.clone()).collect::<Vec<_>>())).collect();
    rows.sort();
    rows.dedup();
    let g = cone_from_inequalities(&rows, d);
    let mut out: Vec<Vector> = Vec::new();
    for r in &g.rays {
        out.push(menuex_geometry::scalar::from_bigints(r));
    }
    for l in &g.lineality {
        let v = menuex_geometry::scalar::from_bigints(l);
        out.push(v.iter().map(|x| -x.clone()).collect());
        out.push(v);
    }
    let mut out: Vec<Vector> = out.iter().map(|v| primitive(v)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// LP test `g ∈ cone(rays)`.
fn in_cone(rays: &[Vector], g: &[Scalar]) -> Result<bool> {
    let k = rays.len();
    let mut rows = Vec::new();
    for j in 0..g.len() {
        rows.push(LpRow::eq(rays.iter().map(|r| r[j].clone()).collect(), g[j].clone()));
    }
    for i in 0..k {
        rows.push(LpRow::ge(unit_vec(k, i), Scalar::zero()));
    }
    Ok(lp_solve(&rows, &zero_vec(k), Sense::Feasibility)?.is_feasible())
}

/// The principal's objective: a constant vector `v̄` or a table of `(θ, v(θ))` samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    Constant(Vector),
    Table(Vec<(Vector, Vector)>),
}

impl Objective {
    pub fn value_at(&self, theta: &[Scalar]) -> Option<Vector> {
        match self {
            Objective::Constant(v) => Some(v.clone()),
            Objective::Table(rows) => rows.iter().find(|(t, _)| t.as_slice() == theta).map(|(_, v)| v.clone()),
        }
    }
}

/// A finite menu: pairwise distinct items of `A`, in input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Menu {
    pub items: Vec<Vector>,
}

impl Menu {
    /// Deduplicates while keeping first occurrences.
    pub fn new(items: Vec<Vector>) -> Self {
        let mut out: Vec<Vector> = Vec::new();
        for it in items {
            if !out.contains(&it) {
                out.push(it);
            }
        }
        Menu { items: out }
    }
}

/// A validated screening problem instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub label: String,
    pub space: AllocationSpace,
    pub cone: TypeCone,
    pub menu: Menu,
    pub objective: Option<Objective>,
}

/// Allocation-space specification before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceSpec {
    Simplex { d: usize },
    Cube { d: usize },
    Monopoly { m: usize, kappa: Scalar },
    Halfspaces { normals: Vec<Vector>, offsets: Vec<Scalar> },
}

/// Type-cone specification before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeSpec {
    Unrestricted,
    Monopoly,
    Rays(Vec<Vector>),
}

/// An unvalidated scenario as read from input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawScenario {
    pub label: String,
    pub space: SpaceSpec,
    pub cone: ConeSpec,
    pub menu: Vec<Vector>,
    pub veto: Option<Vector>,
    pub objective: Option<Objective>,
}

/// Checks every model invariant and returns the validated scenario.
pub fn validate_scenario(raw: &RawScenario) -> Result<Scenario> {
    let space = match &raw.space {
        SpaceSpec::Simplex { d } => AllocationSpace::simplex(*d)?,
        SpaceSpec::Cube { d } => AllocationSpace::cube(*d)?,
        SpaceSpec::Monopoly { m, kappa } => AllocationSpace::monopoly(*m, kappa)?.without_veto(),
        SpaceSpec::Halfspaces { normals, offsets } => {
            let d = normals.first().map(|n| n.len()).ok_or(CoreError::EmptySpace)?;
            let mut hs = Vec::new();
            for (n, c) in normals.iter().zip(offsets) {
                if n.len() != d {
                    return Err(CoreError::DimensionMismatch {
                        what: "halfspace normal".into(),
                        expected: d,
                        found: n.len(),
                    });
                }
                hs.push(Hyperplane::new(n.clone(), c.clone())?);
            }
            AllocationSpace::from_halfspaces(d, &hs, None)?
        }
    };
    let d = space.dim();
    let space = match &raw.veto {
        Some(v) => space.with_veto(v.clone())?,
        None => space,
    };
    let cone = match &raw.cone {
        ConeSpec::Unrestricted => TypeCone::unrestricted(d),
        ConeSpec::Monopoly => match &raw.space {
            SpaceSpec::Monopoly { m, .. } => TypeCone::monopoly(*m)?,
            _ => TypeCone::monopoly(d - 1)?,
        },
        ConeSpec::Rays(r) => TypeCone::from_rays(r.clone())?,
    };
    if cone.dim() != d {
        return Err(CoreError::DimensionMismatch { what: "type cone".into(), expected: d, found: cone.dim() });
    }
    if raw.menu.is_empty() {
        return Err(CoreError::EmptyMenu);
    }
    for item in &raw.menu {
        if item.len() != d {
            return Err(CoreError::DimensionMismatch { what: "menu item".into(), expected: d, found: item.len() });
        }
        if let Some(h) = space.violated_facet(item) {
            return Err(CoreError::ItemOutsideSpace { item: format_vec(item), facet: h.to_string() });
        }
    }
    let menu = Menu::new(raw.menu.clone());
    if let Some(v) = space.veto() {
        if !menu.items.contains(v) {
            return Err(CoreError::VetoMissing(format_vec(v)));
        }
    }
    if let Some(obj) = &raw.objective {
        let check = |v: &Vector, what: &str| {
            if v.len() != d {
                Err(CoreError::DimensionMismatch { what: what.into(), expected: d, found: v.len() })
            } else {
                Ok(())
            }
        };
        match obj {
            Objective::Constant(v) => check(v, "objective")?,
            Objective::Table(rows) => {
                for (t, v) in rows {
                    check(t, "objective type")?;
                    check(v, "objective value")?;
                }
            }
        }
    }
    Ok(Scenario { label: raw.label.clone(), space, cone, menu, objective: raw.objective.clone() })
}

impl Scenario {
    pub fn new(label: &str, space: AllocationSpace, cone: TypeCone, items: Vec<Vector>) -> Result<Self> {
        let d = space.dim();
        if cone.dim() != d {
            return Err(CoreError::DimensionMismatch { what: "type cone".into(), expected: d, found: cone.dim() });
        }
        if items.is_empty() {
            return Err(CoreError::EmptyMenu);
        }
        for item in &items {
            if item.len() != d {
                return Err(CoreError::DimensionMismatch { what: "menu item".into(), expected: d, found: item.len() });
            }
            if let Some(h) = space.violated_facet(item) {
                return Err(CoreError::ItemOutsideSpace { item: format_vec(item), facet: h.to_string() });
            }
        }
        let menu = Menu::new(items);
        if let Some(v) = space.veto() {
            if !menu.items.contains(v) {
                return Err(CoreError::VetoMissing(format_vec(v)));
            }
        }
        Ok(Scenario { label: label.to_string(), space, cone, menu, objective: None })
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = Some(objective);
        self
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn extended_menu(&self) -> Result<ExtendedMenu> {
        extend_menu(&self.menu, &self.cone, &self.space)
    }

    /// Same space and cone, different items.
    pub fn with_items(&self, label: &str, items: Vec<Vector>) -> Result<Scenario> {
        let mut s = Scenario::new(label, self.space.clone(), self.cone.clone(), items)?;
        s.objective = self.objective.clone();
        Ok(s)
    }
}

/// A menu item that is not a vertex of `M`, with weights exhibiting it as a convex combination of
/// vertices plus a polar-cone direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsorbedItem {
    pub item: Vector,
    pub vertex_weights: Vec<Scalar>,
    pub polar_weights: Vec<Scalar>,
}

/// The extended menu `M = conv(items) + Θ°` with its binding-constraint data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedMenu {
    poly: Polyhedron,
    edges: Vec<(usize, usize)>,
    incidences: Vec<Vec<usize>>,
    binding: Vec<usize>,
    binding_from_items: Vec<usize>,
    absorbed: Vec<AbsorbedItem>,
    polar_rays: Vec<Vector>,
}

impl ExtendedMenu {
    pub fn poly(&self) -> &Polyhedron {
        &self.poly
    }

    /// `ext M`, sorted lexicographically.
    pub fn vertices(&self) -> &[Vector] {
        self.poly.vertices()
    }

    /// Bounded edges as pairs of vertex indices `(i, j)` with `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `𝓕(a)` for each vertex, as indices into the allocation space's facet list.
    pub fn incidences(&self) -> &[Vec<usize>] {
        &self.incidences
    }

    /// `𝓕(x)`: the union of the vertex incidences.
    pub fn binding(&self) -> &[usize] {
        &self.binding
    }

    /// The facets touched by any menu item, including absorbed ones.
    pub fn binding_from_items(&self) -> &[usize] {
        &self.binding_from_items
    }

    /// True when an absorbed item touches a facet no vertex touches.
    pub fn absorbed_items_touch_extra_facets(&self) -> bool {
        self.binding != self.binding_from_items
    }

    pub fn absorbed(&self) -> &[AbsorbedItem] {
        &self.absorbed
    }

    pub fn polar_rays(&self) -> &[Vector] {
        &self.polar_rays
    }

    pub fn dim(&self) -> usize {
        self.poly.ambient_dim()
    }

    pub fn vertex_index(&self, a: &[Scalar]) -> Option<usize> {
        self.vertices().iter().position(|v| v.as_slice() == a)
    }
}

/// Builds the extended menu of `menu` and certifies every absorbed item.
pub fn extend_menu(menu: &Menu, cone: &TypeCone, space: &AllocationSpace) -> Result<ExtendedMenu> {
    let d = space.dim();
    if menu.items.is_empty() {
        return Err(CoreError::EmptyMenu);
    }
    let gens = GeneratorSet::new(menu.items.clone(), cone.polar_rays().to_vec());
    let poly = Polyhedron::from_generators(d, &gens)?;
    let edges: Vec<(usize, usize)> = poly
        .faces(1)?
        .into_iter()
        .filter(|f| f.bounded && f.points.len() == 2)
        .map(|f| (f.points[0], f.points[1]))
        .collect();
    let incidences: Vec<Vec<usize>> = poly.vertices().iter().map(|v| space.touched_facets(v)).collect();
    let mut binding: Vec<usize> = incidences.iter().flatten().cloned().collect();
    binding.sort();
    binding.dedup();
    let mut binding_from_items: Vec<usize> = menu.items.iter().flat_map(|a| space.touched_facets(a)).collect();
    binding_from_items.sort();
    binding_from_items.dedup();
    let mut absorbed = Vec::new();
    for item in &menu.items {
        if poly.vertices().contains(item) {
            continue;
        }
        absorbed.push(absorption_certificate(item, poly.vertices(), cone.polar_rays())?);
    }
    Ok(ExtendedMenu {
        poly,
        edges,
        incidences,
        binding,
        binding_from_items,
        absorbed,
        polar_rays: cone.polar_rays().to_vec(),
    })
}

fn absorption_certificate(item: &[Scalar], vertices: &[Vector], polar: &[Vector]) -> Result<AbsorbedItem> {
    let nv = vertices.len();
    let np = polar.len();
    let n = nv + np;
    let mut rows = Vec::new();
    for j in 0..item.len() {
        let coeffs: Vector = vertices.iter().map(|v| v[j].clone()).chain(polar.iter().map(|y| y[j].clone())).collect();
        rows.push(LpRow::eq(coeffs, item[j].clone()));
    }
    let mut sum = zero_vec(n);
    for s in sum.iter_mut().take(nv) {
        *s = Scalar::one();
    }
    rows.push(LpRow::eq(sum, Scalar::one()));
    for i in 0..n {
        rows.push(LpRow::ge(unit_vec(n, i), Scalar::zero()));
    }
    match lp_solve(&rows, &zero_vec(n), Sense::Feasibility)? {
        LpOutcome::Optimal(o) => Ok(AbsorbedItem {
            item: item.to_vec(),
            vertex_weights: o.point[..nv].to_vec(),
            polar_weights: o.point[nv..].to_vec(),
        }),
        _ => Err(CoreError::Internal(format!("item {} is neither a vertex nor absorbed", format_vec(item)))),
    }
}

/// The agent's choice at type `θ`: the lexicographically smallest maximiser of `a·θ`.
pub fn agent_choice(items: &[Vector], theta: &[Scalar]) -> Result<Vector> {
    if is_zero_vec(theta) {
        return Err(CoreError::ZeroType);
    }
    let mut best: Option<(Scalar, &Vector)> = None;
    for a in items {
        if a.len() != theta.len() {
            return Err(CoreError::DimensionMismatch { what: "type".into(), expected: a.len(), found: theta.len() });
        }
        let u = dot(a, theta);
        best = match best {
            None => Some((u, a)),
            Some((bu, ba)) => {
                if u > bu || (u == bu && a < ba) {
                    Some((u, a))
                } else {
                    Some((bu, ba))
                }
            }
        };
    }
    best.map(|(_, a)| a.clone()).ok_or(CoreError::EmptyMenu)
}

/// The support function value `sup_{y ∈ M} y·θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportValue {
    Finite(Scalar),
    Infinite,
}

pub fn support_value(m: &ExtendedMenu, cone: &TypeCone, theta: &[Scalar]) -> SupportValue {
    if !cone.contains(theta) {
        return SupportValue::Infinite;
    }
    match m.vertices().iter().map(|v| dot(v, theta)).max() {
        Some(v) => SupportValue::Finite(v),
        None => SupportValue::Infinite,
    }
}

/// `max_{a ∈ items} a·θ` without reference to the cone.
pub fn max_over(items: &[Vector], theta: &[Scalar]) -> Scalar {
    items.iter().map(|a| dot(a, theta)).max().unwrap_or_else(|| int(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use menuex_geometry::scalar::{ivec, ratio, rvec};

    #[test]
    fn simplex_preset_is_valid() {
        let raw = RawScenario {
            label: "t".into(),
            space: SpaceSpec::Simplex { d: 2 },
            cone: ConeSpec::Unrestricted,
            menu: vec![ivec(&[0, 0]), ivec(&[1, 0]), ivec(&[0, 1])],
            veto: None,
            objective: None,
        };
        let s = validate_scenario(&raw).unwrap();
        assert_eq!(s.space.facets().len(), 3);
    }

    #[test]
    fn item_outside_simplex_names_the_facet() {
        let raw = RawScenario {
            label: "t".into(),
            space: SpaceSpec::Simplex { d: 2 },
            cone: ConeSpec::Unrestricted,
            menu: vec![ivec(&[2, 0])],
            veto: None,
            objective: None,
        };
        let err = validate_scenario(&raw).unwrap_err();
        assert_eq!(err.to_string(), "item (2, 0) violates facet a1 + a2 <= 1");
    }

    #[test]
    fn monopoly_with_veto_is_valid() {
        let raw = RawScenario {
            label: "t".into(),
            space: SpaceSpec::Monopoly { m: 1, kappa: int(1) },
            cone: ConeSpec::Monopoly,
            menu: vec![ivec(&[0, 0]), rvec(&[(1, 1), (1, 2)])],
            veto: Some(ivec(&[0, 0])),
            objective: None,
        };
        assert!(validate_scenario(&raw).is_ok());
        let mut missing = raw.clone();
        missing.menu = vec![rvec(&[(1, 1), (1, 2)])];
        assert!(matches!(validate_scenario(&missing), Err(CoreError::VetoMissing(_))));
    }

    #[test]
    fn lower_dimensional_space_is_rejected() {
        let raw = RawScenario {
            label: "t".into(),
            space: SpaceSpec::Halfspaces {
                normals: vec![ivec(&[1, 0]), ivec(&[-1, 0]), ivec(&[0, 1]), ivec(&[0, -1])],
                offsets: vec![int(0), int(0), int(1), int(0)],
            },
            cone: ConeSpec::Unrestricted,
            menu: vec![ivec(&[0, 0])],
            veto: None,
            objective: None,
        };
        assert!(matches!(validate_scenario(&raw), Err(CoreError::LowerDimensionalSpace { .. })));
    }

    #[test]
    fn cone_must_be_full_dimensional() {
        assert!(matches!(
            TypeCone::from_rays(vec![ivec(&[1, 0]), ivec(&[2, 0])]),
            Err(CoreError::ConeNotFullDimensional { rank: 1, dim: 2 })
        ));
    }

    #[test]
    fn polar_cones() {
        assert!(TypeCone::unrestricted(3).polar_rays().is_empty());
        let mono = TypeCone::from_rays(vec![ivec(&[0, -1]), ivec(&[1, -1])]).unwrap();
        assert_eq!(mono.polar_rays(), &[ivec(&[-1, 0]), ivec(&[1, 1])]);
        let orthant = TypeCone::from_rays(vec![ivec(&[1, 0]), ivec(&[0, 1])]).unwrap();
        assert_eq!(orthant.polar_rays(), &[ivec(&[-1, 0]), ivec(&[0, -1])]);
        let full = TypeCone::from_rays(vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -1])]).unwrap();
        assert!(full.is_unrestricted());
    }

    #[test]
    fn extended_menu_of_the_simplex() {
        let space = AllocationSpace::simplex(2).unwrap();
        let menu = Menu::new(vec![ivec(&[0, 0]), ivec(&[1, 0]), ivec(&[0, 1])]);
        let m = extend_menu(&menu, &TypeCone::unrestricted(2), &space).unwrap();
        assert_eq!(m.vertices().len(), 3);
        assert_eq!(m.edges().len(), 3);
        assert_eq!(m.binding(), &[0, 1, 2]);
    }

    #[test]
    fn overpriced_item_is_absorbed() {
        let space = AllocationSpace::monopoly(1, &int(1)).unwrap();
        let cone = TypeCone::monopoly(1).unwrap();
        let menu =
            Menu::new(vec![ivec(&[0, 0]), rvec(&[(1, 2), (1, 8)]), rvec(&[(1, 1), (1, 2)]), rvec(&[(1, 4), (1, 2)])]);
        let m = extend_menu(&menu, &cone, &space).unwrap();
        assert_eq!(m.vertices().len(), 3);
        assert_eq!(m.absorbed().len(), 1);
        assert_eq!(m.absorbed()[0].item, rvec(&[(1, 4), (1, 2)]));
        assert!(!m.vertices().contains(&rvec(&[(1, 4), (1, 2)])));
    }

    #[test]
    fn singleton_menu() {
        let space = AllocationSpace::simplex(2).unwrap();
        let m = extend_menu(&Menu::new(vec![ivec(&[0, 0])]), &TypeCone::unrestricted(2), &space).unwrap();
        assert_eq!(m.vertices().len(), 1);
        assert!(m.edges().is_empty());
    }

    #[test]
    fn agent_choice_and_ties() {
        let simplex = vec![ivec(&[0, 0]), ivec(&[1, 0]), ivec(&[0, 1])];
        assert_eq!(agent_choice(&simplex, &ivec(&[1, 0])).unwrap(), ivec(&[1, 0]));
        let posted = vec![ivec(&[0, 0]), rvec(&[(1, 1), (1, 2)])];
        assert_eq!(agent_choice(&posted, &rvec(&[(3, 4), (-1, 1)])).unwrap(), rvec(&[(1, 1), (1, 2)]));
        assert_eq!(agent_choice(&posted, &rvec(&[(1, 2), (-1, 1)])).unwrap(), ivec(&[0, 0]));
        assert!(matches!(agent_choice(&posted, &ivec(&[0, 0])), Err(CoreError::ZeroType)));
    }

    #[test]
    fn support_values() {
        let space = AllocationSpace::simplex(2).unwrap();
        let m = extend_menu(
            &Menu::new(vec![ivec(&[0, 0]), ivec(&[1, 0]), ivec(&[0, 1])]),
            &TypeCone::unrestricted(2),
            &space,
        )
        .unwrap();
        assert_eq!(support_value(&m, &TypeCone::unrestricted(2), &ivec(&[1, 1])), SupportValue::Finite(int(1)));

        let mspace = AllocationSpace::monopoly(1, &int(1)).unwrap();
        let cone = TypeCone::monopoly(1).unwrap();
        let posted = extend_menu(&Menu::new(vec![ivec(&[0, 0]), rvec(&[(1, 1), (1, 2)])]), &cone, &mspace).unwrap();
        assert_eq!(support_value(&posted, &cone, &ivec(&[1, -1])), SupportValue::Finite(ratio(1, 2)));
        assert_eq!(support_value(&posted, &cone, &ivec(&[-1, 0])), SupportValue::Infinite);
    }
}
