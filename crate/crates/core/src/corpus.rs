//! Golden scenarios with hand-derived verdicts: the figure examples re-embedded with exact
//! coordinates, the delegation, monopoly and veto presets, and the three-dimensional pyramid and
//! prism.

use menuex_geometry::scalar::{int, ivec, ratio, rvec};
use menuex_geometry::{GeneratorSet, Polyhedron, Vector};

use crate::error::Result;
use crate::model::{AllocationSpace, Scenario, TypeCone};

/// A scenario together with its expected extremality and exhaustiveness.
#[derive(Clone, Debug)]
pub struct GoldenCase {
    pub scenario: Scenario,
    pub extreme: bool,
    pub exhaustive: bool,
}

fn case(scenario: Scenario, extreme: bool, exhaustive: bool) -> GoldenCase {
    GoldenCase { scenario, extreme, exhaustive }
}

/// The convex polygon with the given vertices as an allocation space.
pub fn polygon(vertices: Vec<Vector>) -> Result<AllocationSpace> {
    let p = Polyhedron::from_generators(2, &GeneratorSet::polytope(vertices))?;
    AllocationSpace::from_halfspaces(2, p.halfspaces(), None)
}

/// The one-good posted price `{(0, 0), (1, p)}` with the no-trade veto.
pub fn posted_price(p: (i64, i64)) -> Result<Scenario> {
    Scenario::new(
        &format!("posted-price-{}-{}", p.0, p.1),
        AllocationSpace::monopoly(1, &int(1))?,
        TypeCone::monopoly(1)?,
        vec![ivec(&[0, 0]), vec![int(1), ratio(p.0, p.1)]],
    )
}

/// The three-item one-good monopoly menu whose upper vertex and unbounded edge form a flexible
/// chain.
pub fn monopoly_three_items() -> Result<Scenario> {
    Scenario::new(
        "monopoly-three-items",
        AllocationSpace::monopoly(1, &int(1))?,
        TypeCone::monopoly(1)?,
        vec![ivec(&[0, 0]), rvec(&[(1, 2), (1, 8)]), rvec(&[(1, 1), (1, 2)])],
    )
}

/// A square pyramid in `Δ³`: base on the facet `a₃ = 0`, apex on the facet `Σa = 1`.
pub fn pyramid() -> Result<Scenario> {
    Scenario::new(
        "pyramid",
        AllocationSpace::simplex(3)?,
        TypeCone::unrestricted(3),
        vec![
            ivec(&[0, 0, 0]),
            rvec(&[(1, 2), (0, 1), (0, 1)]),
            rvec(&[(1, 2), (1, 2), (0, 1)]),
            rvec(&[(0, 1), (1, 2), (0, 1)]),
            rvec(&[(1, 4), (1, 4), (1, 2)]),
        ],
    )
}

/// The triangular prism `T + S` in `Δ³` with `T = conv{0, e₁/2, e₂/2}` and `S = [0, e₃/2]`.
pub fn prism() -> Result<Scenario> {
    let t = [ivec(&[0, 0, 0]), rvec(&[(1, 2), (0, 1), (0, 1)]), rvec(&[(0, 1), (1, 2), (0, 1)])];
    let mut items = t.to_vec();
    items.extend(t.iter().map(|p| vec![p[0].clone(), p[1].clone(), ratio(1, 2)]));
    Scenario::new("prism", AllocationSpace::simplex(3)?, TypeCone::unrestricted(3), items)
}

/// The pentagon of the introductory figure and the vertices of its menus.
fn pentagon() -> Result<AllocationSpace> {
    polygon(vec![ivec(&[-1, 0]), rvec(&[(4, 1), (1, 2)]), ivec(&[3, 4]), ivec(&[-1, 3]), ivec(&[-2, 1])])
}

/// The veto-bargaining scenario on `Δ²` with veto `0` and principal objective `v̄ = (1, 2)`.
pub fn veto_scenario(label: &str, items: Vec<Vector>) -> Result<Scenario> {
    let space = AllocationSpace::simplex(2)?.with_veto(ivec(&[0, 0]))?;
    Ok(Scenario::new(label, space, TypeCone::unrestricted(2), items)?
        .with_objective(crate::model::Objective::Constant(ivec(&[1, 2]))))
}

/// Every golden scenario, in a fixed order.
pub fn golden_corpus() -> Result<Vec<GoldenCase>> {
    let unit_square = AllocationSpace::cube(2)?;
    let free2 = TypeCone::unrestricted(2);
    let square = |label: &str, items: Vec<Vector>| Scenario::new(label, unit_square.clone(), free2.clone(), items);
    let simplex2 = AllocationSpace::simplex(2)?;
    let tri = |label: &str, items: Vec<Vector>| Scenario::new(label, simplex2.clone(), free2.clone(), items);

    let mut out = vec![
        case(posted_price((1, 4))?, true, true),
        case(posted_price((1, 2))?, true, true),
        case(posted_price((3, 4))?, true, true),
        case(monopoly_three_items()?, false, true),
        case(
            Scenario::new(
                "free-good",
                AllocationSpace::monopoly(1, &int(1))?,
                TypeCone::monopoly(1)?,
                vec![ivec(&[0, 0]), ivec(&[1, 0])],
            )?,
            true,
            true,
        ),
        case(
            Scenario::new(
                "restricted-cone-five-items",
                unit_square.clone(),
                TypeCone::from_rays(vec![ivec(&[0, -1]), ivec(&[1, -1])])?,
                vec![
                    ivec(&[0, 0]),
                    rvec(&[(0, 1), (3, 5)]),
                    rvec(&[(2, 5), (1, 1)]),
                    rvec(&[(1, 1), (2, 5)]),
                    rvec(&[(2, 5), (1, 10)]),
                ],
            )?,
            false,
            true,
        ),
        case(
            square(
                "chain-pentagon",
                vec![
                    ivec(&[0, 0]),
                    rvec(&[(0, 1), (3, 5)]),
                    rvec(&[(2, 5), (1, 1)]),
                    rvec(&[(1, 1), (3, 5)]),
                    rvec(&[(4, 5), (1, 5)]),
                ],
            )?,
            false,
            true,
        ),
        case(
            square(
                "skewed-quadrilateral",
                vec![
                    rvec(&[(1, 1), (2, 5)]),
                    rvec(&[(2, 5), (0, 1)]),
                    rvec(&[(0, 1), (3, 5)]),
                    rvec(&[(2, 5), (1, 1)]),
                ],
            )?,
            true,
            true,
        ),
        case(
            square(
                "rotated-square",
                vec![
                    rvec(&[(1, 2), (0, 1)]),
                    rvec(&[(1, 1), (1, 2)]),
                    rvec(&[(1, 2), (1, 1)]),
                    rvec(&[(0, 1), (1, 2)]),
                ],
            )?,
            false,
            true,
        ),
        case(square("square-bottom-edge", vec![ivec(&[0, 0]), ivec(&[1, 0])])?, true, true),
        case(tri("simplex2-vertices", simplex2.vertices().to_vec())?, true, true),
        case(
            tri("strike-triangle", vec![rvec(&[(0, 1), (1, 2)]), rvec(&[(1, 2), (0, 1)]), rvec(&[(1, 2), (1, 2)])])?,
            true,
            true,
        ),
        case(
            tri(
                "strike-quadrilateral",
                vec![
                    rvec(&[(0, 1), (1, 4)]),
                    rvec(&[(1, 4), (0, 1)]),
                    rvec(&[(3, 4), (1, 4)]),
                    rvec(&[(1, 4), (3, 4)]),
                ],
            )?,
            false,
            true,
        ),
        case(tri("dictator", vec![ivec(&[1, 0])])?, true, true),
        case(tri("interior-singleton", vec![rvec(&[(1, 4), (1, 4)])])?, false, false),
        case(tri("segment-on-one-edge", vec![rvec(&[(1, 4), (0, 1)]), rvec(&[(3, 4), (0, 1)])])?, false, false),
        case(
            Scenario::new(
                "pentagon-quadrilateral",
                pentagon()?,
                free2.clone(),
                vec![ivec(&[-1, 0]), ivec(&[-1, 3]), ivec(&[1, 2]), ivec(&[1, 1])],
            )?,
            false,
            true,
        ),
        case(
            Scenario::new(
                "pentagon-triangle",
                pentagon()?,
                free2.clone(),
                vec![ivec(&[-1, 0]), ivec(&[-1, 3]), ivec(&[0, 2])],
            )?,
            true,
            true,
        ),
        case(
            Scenario::new(
                "pentagon-homothetic-triangle",
                pentagon()?,
                free2.clone(),
                vec![rvec(&[(69, 31), (10, 31)]), rvec(&[(69, 31), (118, 31)]), rvec(&[(105, 31), (82, 31)])],
            )?,
            true,
            true,
        ),
        case(veto_scenario("veto-only", vec![ivec(&[0, 0])])?, true, true),
        case(veto_scenario("veto-and-favorite", vec![ivec(&[0, 0]), ivec(&[0, 1])])?, true, true),
        case(pyramid()?, true, true),
        case(prism()?, false, true),
    ];
    let simplex3 = AllocationSpace::simplex(3)?;
    out.push(case(
        Scenario::new("simplex3-vertices", simplex3.clone(), TypeCone::unrestricted(3), simplex3.vertices().to_vec())?,
        true,
        true,
    ));
    let cube3 = AllocationSpace::cube(3)?;
    out.push(case(
        Scenario::new("cube3-vertices", cube3.clone(), TypeCone::unrestricted(3), cube3.vertices().to_vec())?,
        true,
        true,
    ));
    let simplex4 = AllocationSpace::simplex(4)?;
    out.push(case(
        Scenario::new("simplex4-vertices", simplex4.clone(), TypeCone::unrestricted(4), simplex4.vertices().to_vec())?,
        true,
        true,
    ));
    out.push(case(
        Scenario::new(
            "pure-bundling",
            AllocationSpace::monopoly(2, &int(2))?,
            TypeCone::monopoly(2)?,
            vec![ivec(&[0, 0, 0]), ivec(&[1, 1, 1])],
        )?,
        true,
        true,
    ));
    Ok(out)
}
