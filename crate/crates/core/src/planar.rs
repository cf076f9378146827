//! Exact classification of extreme finite menus in the plane through the boundary partition and
//! flexible chains.

use menuex_geometry::scalar::{add, norm2, scale, sub};
use menuex_geometry::{Scalar, Vector};
use num_traits::{Signed, Zero};

use crate::error::{CoreError, Result};
use crate::exhaustiveness::{is_exhaustive, ExhaustivenessReport};
use crate::model::{AllocationSpace, ExtendedMenu};

/// Class of a vertex of `M` relative to the boundary of `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexClass {
    /// A vertex of `A`.
    V,
    /// In the interior of `A`.
    I,
    /// In the relative interior of an edge of `A` and not of class `B2`.
    B1,
    /// In the relative interior of an edge of `A` that also holds an adjacent vertex of `M`.
    B2,
}

/// A position in the clockwise boundary order: a vertex of `M` or the sentinel `*` standing for
/// an unbounded edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryNode {
    Sentinel,
    Vertex(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryPartition {
    /// Clockwise order. Cyclic when the cone is unrestricted, otherwise a linear sequence framed
    /// by sentinels.
    pub order: Vec<BoundaryNode>,
    pub cyclic: bool,
    /// Class of each vertex, indexed like `M.vertices()`.
    pub classes: Vec<VertexClass>,
    /// For boundary vertices off `ext A`, the facet of `A` they lie on.
    pub edge_facet: Vec<Option<usize>>,
    vertices: Vec<Vector>,
    normals: Vec<Vector>,
}

impl BoundaryPartition {
    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn class_of(&self, node: BoundaryNode) -> Option<VertexClass> {
        match node {
            BoundaryNode::Sentinel => None,
            BoundaryNode::Vertex(i) => Some(self.classes[i]),
        }
    }

    /// Indices of the vertices in a class, in clockwise order.
    pub fn members(&self, class: VertexClass) -> Vec<usize> {
        self.order
            .iter()
            .filter_map(|n| match n {
                BoundaryNode::Vertex(i) if self.classes[*i] == class => Some(*i),
                _ => None,
            })
            .collect()
    }
}

/// Why a chain is flexible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainCase {
    /// Both ends lie in `I ∪ B2 ∪ {*}`.
    Endpoints,
    /// The whole boundary is an even cycle of `B1` vertices whose squared-sine products agree.
    SymmetricCycle { sin2_alpha: Vec<Scalar>, sin2_beta: Vec<Scalar>, product: Scalar },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub nodes: Vec<BoundaryNode>,
    pub case: ChainCase,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanarVerdict {
    Extreme,
    NotExtreme(PlanarWitness),
}

impl PlanarVerdict {
    pub fn is_extreme(&self) -> bool {
        matches!(self, PlanarVerdict::Extreme)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanarWitness {
    Chain(Chain),
    NotExhaustive(ExhaustivenessReport),
}

fn cross(u: &[Scalar], v: &[Scalar]) -> Scalar {
    &u[0] * &v[1] - &u[1] * &v[0]
}

/// Squared sine of the angle between two nonzero plane vectors.
pub fn sin2(u: &[Scalar], v: &[Scalar]) -> Scalar {
    let c = cross(u, v);
    &c * &c / (norm2(u) * norm2(v))
}

fn half(v: &[Scalar]) -> u8 {
    // 0 for angles in [0, π), 1 for [π, 2π).
    if v[1].is_positive() || (v[1].is_zero() && v[0].is_positive()) {
        0
    } else {
        1
    }
}

/// Counter-clockwise angular comparison of directions around the origin.
fn angle_cmp(u: &[Scalar], v: &[Scalar]) -> std::cmp::Ordering {
    half(u).cmp(&half(v)).then_with(|| Scalar::zero().cmp(&cross(u, v)))
}

/// Clockwise order of the vertices, starting from the lexicographically smallest one when `M` is
/// bounded, and from the end adjacent to the first unbounded edge otherwise.
fn clockwise_order(m: &ExtendedMenu) -> Vec<usize> {
    let verts = m.vertices();
    let n = verts.len();
    if n <= 1 {
        return (0..n).collect();
    }
    let mut centroid = vec![Scalar::zero(), Scalar::zero()];
    for v in verts {
        centroid = add(&centroid, v);
    }
    centroid = scale(&Scalar::new(1.into(), (n as i64).into()), &centroid);
    if m.poly().is_bounded() {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| angle_cmp(&sub(&verts[b], &centroid), &sub(&verts[a], &centroid)));
        let start = idx.iter().position(|&i| i == 0).expect("vertex 0 present");
        idx.rotate_left(start);
        return idx;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in m.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let ends: Vec<usize> = (0..n).filter(|&i| adj[i].len() == 1).collect();
    let start = *ends.iter().min().expect("unbounded planar polygon has a path of bounded edges");
    let mut path = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(&next) = adj[cur].iter().find(|&&x| x != prev) {
        path.push(next);
        prev = cur;
        cur = next;
    }
    let mut interior = centroid;
    for r in m.poly().rays() {
        interior = add(&interior, r);
    }
    // Clockwise means the interior lies to the right of each directed edge.
    if cross(&sub(&verts[path[1]], &verts[path[0]]), &sub(&interior, &verts[path[0]])).is_positive() {
        path.reverse();
    }
    path
}

/// Partitions `ext M` into `V`, `I`, `B1`, `B2` and orders it clockwise.
pub fn partition_boundary(m: &ExtendedMenu, space: &AllocationSpace) -> Result<BoundaryPartition> {
    if space.dim() != 2 {
        return Err(CoreError::NotPlanar(space.dim()));
    }
    let verts = m.vertices();
    let mut classes = Vec::with_capacity(verts.len());
    let mut edge_facet = Vec::with_capacity(verts.len());
    for (i, v) in verts.iter().enumerate() {
        let inc = &m.incidences()[i];
        if space.is_vertex(v) {
            classes.push(VertexClass::V);
            edge_facet.push(None);
        } else if inc.is_empty() {
            classes.push(VertexClass::I);
            edge_facet.push(None);
        } else {
            let h = inc[0];
            // The partner must be joined to this vertex by an edge of `M`: `M` extends past `A`
            // along the polar cone, so two vertices on one edge of `A` need not be adjacent.
            let shared = m.edges().iter().any(|&(a, b)| {
                let j = if a == i {
                    b
                } else if b == i {
                    a
                } else {
                    return false;
                };
                m.incidences()[j].contains(&h)
            });
            classes.push(if shared { VertexClass::B2 } else { VertexClass::B1 });
            edge_facet.push(Some(h));
        }
    }
    let cyc = clockwise_order(m);
    let cyclic = m.poly().is_bounded();
    let mut order: Vec<BoundaryNode> = cyc.into_iter().map(BoundaryNode::Vertex).collect();
    if !cyclic {
        order.insert(0, BoundaryNode::Sentinel);
        order.push(BoundaryNode::Sentinel);
    }
    let normals = space.facets().iter().map(|h| h.normal().to_vec()).collect();
    Ok(BoundaryPartition { order, cyclic, classes, edge_facet, vertices: verts.to_vec(), normals })
}

fn endpoint_ok(p: &BoundaryPartition, node: BoundaryNode) -> bool {
    matches!(p.class_of(node), None | Some(VertexClass::I) | Some(VertexClass::B2))
}

fn endpoint_chain(p: &BoundaryPartition, nodes: &[BoundaryNode]) -> bool {
    if nodes.iter().any(|&n| p.class_of(n) == Some(VertexClass::V)) {
        return false;
    }
    let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
    if !endpoint_ok(p, first) || !endpoint_ok(p, last) {
        return false;
    }
    if nodes.len() == 2 {
        if let (BoundaryNode::Vertex(a), BoundaryNode::Vertex(b)) = (first, last) {
            // Both in B2 on the same edge of A means the segment lies in the boundary of A.
            if p.edge_facet[a].is_some() && p.edge_facet[a] == p.edge_facet[b] {
                return false;
            }
        }
    }
    true
}

/// Squared sines of the angles each `B1` vertex makes with its edge of `A`, on the preceding and
/// succeeding sides.
fn cycle_angles(p: &BoundaryPartition) -> (Vec<Scalar>, Vec<Scalar>) {
    let k = p.order.len();
    let idx = |t: usize| match p.order[t % k] {
        BoundaryNode::Vertex(i) => i,
        BoundaryNode::Sentinel => unreachable!("cyclic order has no sentinels"),
    };
    let mut alpha = Vec::with_capacity(k);
    let mut beta = Vec::with_capacity(k);
    for t in 0..k {
        let (u, v, w) = (idx(t + k - 1), idx(t), idx(t + 1));
        let nrm = &p.normals[p.edge_facet[v].expect("B1 vertex lies on an edge")];
        // Clockwise direction along the edge of A, from its preceding to its succeeding end.
        let dir = vec![nrm[1].clone(), -nrm[0].clone()];
        let back: Vector = dir.iter().map(|x| -x.clone()).collect();
        alpha.push(sin2(&sub(&p.vertices[u], &p.vertices[v]), &back));
        beta.push(sin2(&sub(&p.vertices[w], &p.vertices[v]), &dir));
    }
    (alpha, beta)
}

/// Searches every contiguous sequence of the clockwise order for a flexible chain; returns the
/// first by start position and then length.
pub fn find_flexible_chain(p: &BoundaryPartition, cone_unrestricted: bool) -> Option<Chain> {
    let k = p.order.len();
    if p.cyclic {
        if k >= 2 {
            for s in 0..k {
                // Length k + 1 closes the loop back onto the start vertex.
                for len in 2..=k + 1 {
                    let nodes: Vec<BoundaryNode> = (0..len).map(|t| p.order[(s + t) % k]).collect();
                    if endpoint_chain(p, &nodes) {
                        return Some(Chain { nodes, case: ChainCase::Endpoints });
                    }
                }
            }
        }
        if cone_unrestricted && k >= 2 && k.is_multiple_of(2) && p.classes.iter().all(|&c| c == VertexClass::B1) {
            let (a, b) = cycle_angles(p);
            let pa: Scalar = a.iter().product();
            let pb: Scalar = b.iter().product();
            if pa == pb {
                return Some(Chain {
                    nodes: p.order.clone(),
                    case: ChainCase::SymmetricCycle { sin2_alpha: a, sin2_beta: b, product: pa },
                });
            }
        }
        None
    } else {
        assert!(k >= 3, "a sentinel-framed order always contains a vertex");
        for s in 0..k {
            for e in s + 1..k {
                let nodes = p.order[s..=e].to_vec();
                if endpoint_chain(p, &nodes) {
                    return Some(Chain { nodes, case: ChainCase::Endpoints });
                }
            }
        }
        None
    }
}

/// Decides extremality of a finite planar extended menu.
pub fn classify_2d(m: &ExtendedMenu, space: &AllocationSpace, cone_unrestricted: bool) -> Result<PlanarVerdict> {
    if space.dim() != 2 {
        return Err(CoreError::NotPlanar(space.dim()));
    }
    if m.vertices().len() <= 2 {
        let rep = is_exhaustive(m, space)?;
        return Ok(if rep.exhaustive {
            PlanarVerdict::Extreme
        } else {
            PlanarVerdict::NotExtreme(PlanarWitness::NotExhaustive(rep))
        });
    }
    let p = partition_boundary(m, space)?;
    Ok(match find_flexible_chain(&p, cone_unrestricted) {
        Some(c) => PlanarVerdict::NotExtreme(PlanarWitness::Chain(c)),
        None => PlanarVerdict::Extreme,
    })
}

/// Checks that a reported chain really is flexible for the given partition.
pub fn verify_chain(p: &BoundaryPartition, chain: &Chain, cone_unrestricted: bool) -> bool {
    let k = p.order.len();
    let n = chain.nodes.len();
    if n < 2 {
        return false;
    }
    let contiguous = (0..k).any(|s| {
        (0..n).all(|t| {
            if p.cyclic {
                p.order[(s + t) % k] == chain.nodes[t]
            } else {
                s + t < k && p.order[s + t] == chain.nodes[t]
            }
        })
    });
    if !contiguous {
        return false;
    }
    match &chain.case {
        ChainCase::Endpoints => endpoint_chain(p, &chain.nodes),
        ChainCase::SymmetricCycle { .. } => {
            if !(p.cyclic && cone_unrestricted && n == k && k.is_multiple_of(2)) {
                return false;
            }
            if !p.classes.iter().all(|&c| c == VertexClass::B1) {
                return false;
            }
            let (a, b) = cycle_angles(p);
            a.iter().product::<Scalar>() == b.iter().product::<Scalar>()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremality::is_extreme_finite;
    use crate::model::{extend_menu, Menu, TypeCone};
    use menuex_geometry::scalar::{int, ivec, rvec};

    fn square_menu(items: Vec<Vector>) -> (AllocationSpace, ExtendedMenu) {
        let space = AllocationSpace::cube(2).unwrap();
        let m = extend_menu(&Menu::new(items), &TypeCone::unrestricted(2), &space).unwrap();
        (space, m)
    }

    #[test]
    fn pentagon_partition_and_chain() {
        let (space, m) = square_menu(vec![
            ivec(&[0, 0]),
            rvec(&[(0, 1), (3, 5)]),
            rvec(&[(2, 5), (1, 1)]),
            rvec(&[(1, 1), (3, 5)]),
            rvec(&[(4, 5), (1, 5)]),
        ]);
        let p = partition_boundary(&m, &space).unwrap();
        let class = |v: Vector| p.classes[m.vertex_index(&v).unwrap()];
        assert_eq!(class(ivec(&[0, 0])), VertexClass::V);
        assert_eq!(class(rvec(&[(0, 1), (3, 5)])), VertexClass::B2);
        assert_eq!(class(rvec(&[(2, 5), (1, 1)])), VertexClass::B1);
        assert_eq!(class(rvec(&[(1, 1), (3, 5)])), VertexClass::B1);
        assert_eq!(class(rvec(&[(4, 5), (1, 5)])), VertexClass::I);
        let chain = find_flexible_chain(&p, true).unwrap();
        let pts: Vec<Vector> = chain
            .nodes
            .iter()
            .map(|n| match n {
                BoundaryNode::Vertex(i) => m.vertices()[*i].clone(),
                BoundaryNode::Sentinel => panic!(),
            })
            .collect();
        assert_eq!(
            pts,
            vec![rvec(&[(0, 1), (3, 5)]), rvec(&[(2, 5), (1, 1)]), rvec(&[(1, 1), (3, 5)]), rvec(&[(4, 5), (1, 5)])]
        );
        assert!(verify_chain(&p, &chain, true));
    }

    #[test]
    fn rotated_square_is_flexible_and_skewed_one_is_not() {
        let (space, m) = square_menu(vec![
            rvec(&[(1, 2), (0, 1)]),
            rvec(&[(1, 1), (1, 2)]),
            rvec(&[(1, 2), (1, 1)]),
            rvec(&[(0, 1), (1, 2)]),
        ]);
        let v = classify_2d(&m, &space, true).unwrap();
        assert!(matches!(
            v,
            PlanarVerdict::NotExtreme(PlanarWitness::Chain(Chain { case: ChainCase::SymmetricCycle { .. }, .. }))
        ));
        assert!(!is_extreme_finite(&m, &space).unwrap().is_extreme());
        let (space, m) = square_menu(vec![
            rvec(&[(1, 1), (2, 5)]),
            rvec(&[(2, 5), (0, 1)]),
            rvec(&[(0, 1), (3, 5)]),
            rvec(&[(2, 5), (1, 1)]),
        ]);
        assert!(classify_2d(&m, &space, true).unwrap().is_extreme());
        assert!(is_extreme_finite(&m, &space).unwrap().is_extreme());
    }

    #[test]
    fn monopoly_chain_starts_at_sentinel() {
        let space = AllocationSpace::monopoly(1, &int(1)).unwrap();
        let cone = TypeCone::monopoly(1).unwrap();
        let m = extend_menu(
            &Menu::new(vec![ivec(&[0, 0]), rvec(&[(1, 2), (1, 8)]), rvec(&[(1, 1), (1, 2)])]),
            &cone,
            &space,
        )
        .unwrap();
        let p = partition_boundary(&m, &space).unwrap();
        assert_eq!(p.order.first(), Some(&BoundaryNode::Sentinel));
        let chain = find_flexible_chain(&p, false).unwrap();
        let idx = |v: Vector| BoundaryNode::Vertex(m.vertex_index(&v).unwrap());
        assert_eq!(
            chain.nodes,
            vec![BoundaryNode::Sentinel, idx(rvec(&[(1, 1), (1, 2)])), idx(rvec(&[(1, 2), (1, 8)]))]
        );
    }

    #[test]
    fn simplex_vertices_are_all_v() {
        let space = AllocationSpace::simplex(2).unwrap();
        let m = extend_menu(&Menu::new(space.vertices().to_vec()), &TypeCone::unrestricted(2), &space).unwrap();
        let p = partition_boundary(&m, &space).unwrap();
        assert!(p.classes.iter().all(|&c| c == VertexClass::V));
        assert!(classify_2d(&m, &space, true).unwrap().is_extreme());
    }

    #[test]
    fn single_interior_vertex_closes_a_loop() {
        let (space, m) = square_menu(vec![rvec(&[(1, 2), (0, 1)]), rvec(&[(1, 1), (1, 2)]), rvec(&[(1, 3), (2, 3)])]);
        assert!(!classify_2d(&m, &space, true).unwrap().is_extreme());
        assert!(!is_extreme_finite(&m, &space).unwrap().is_extreme());
    }

    #[test]
    fn rejects_non_planar() {
        let space = AllocationSpace::simplex(3).unwrap();
        let m = extend_menu(&Menu::new(vec![ivec(&[0, 0, 0])]), &TypeCone::unrestricted(3), &space).unwrap();
        assert_eq!(partition_boundary(&m, &space), Err(CoreError::NotPlanar(3)));
    }
}
