//! Application-level analyses: linear delegation, multi-good monopoly pricing, veto bargaining,
//! principal-utility evaluation, sample-level dominance, and the genericity experiment.

use menuex_geometry::scalar::{dot, format_vec, unit_vec, zero_vec};
use menuex_geometry::{lp_solve, LpOutcome, LpRow, Scalar, Sense, Vector};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::exhaustiveness::is_exhaustive;
use crate::extremality::{def_polytope_cross_check, deformation_dimension, is_extreme_finite};
use crate::model::{agent_choice, AllocationSpace, Menu, Objective, Scenario, TypeCone};
use crate::random::{exhaustive_menu, rng_for, strike_menu_2d};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelegationKind {
    Dictates,
    GrantsStrike,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelegationReport {
    pub kind: DelegationKind,
    pub menu_size: usize,
    pub extreme: bool,
    pub exhaustive: bool,
}

fn require_simplex(s: &Scenario) -> Result<()> {
    let reference = AllocationSpace::simplex(s.dim())?;
    if s.space.facets() != reference.facets() {
        return Err(CoreError::Precondition("the allocation space must be the unit simplex".into()));
    }
    Ok(())
}

/// Classifies a delegation menu on the simplex and decides its extremality, cross-checking the
/// planar size rule or, in higher dimension, the lifted rank oracle.
pub fn delegation_classify(s: &Scenario) -> Result<DelegationReport> {
    require_simplex(s)?;
    if !s.cone.is_unrestricted() {
        return Err(CoreError::Precondition("delegation requires the unrestricted type cone".into()));
    }
    let d = s.dim();
    let m = s.extended_menu()?;
    let verts = m.vertices();
    let dictates = verts.len() == 1 && s.space.is_vertex(&verts[0]);
    let strike = m.binding().len() == d + 1;
    let kind = if dictates {
        DelegationKind::Dictates
    } else if strike {
        DelegationKind::GrantsStrike
    } else {
        DelegationKind::Neither
    };
    let extreme = is_extreme_finite(&m, &s.space)?.is_extreme();
    let exhaustive = is_exhaustive(&m, &s.space)?.exhaustive;
    let expected = if d == 2 {
        dictates || (strike && verts.len() <= 3)
    } else {
        exhaustive && def_polytope_cross_check(&m, &s.space)?
    };
    if expected != extreme {
        return Err(CoreError::Internal(format!("delegation oracles disagree on {}", s.label)));
    }
    Ok(DelegationReport { kind, menu_size: verts.len(), extreme, exhaustive })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PricingAnalysis {
    /// Marginal-price vectors of the lower facets of `M` over `[0,1]^m`, sorted.
    pub gradients: Vec<Vector>,
    /// Largest `δ` with every gradient component in `[δ, 1−δ]`.
    pub margin: Scalar,
    /// True when the margin is positive; a zero margin is inconclusive.
    pub undominated_sufficient: bool,
}

fn monopoly_shape(s: &Scenario) -> Result<(usize, Scalar)> {
    let d = s.dim();
    if d < 2 {
        return Err(CoreError::Precondition("monopoly needs at least one good".into()));
    }
    let m = d - 1;
    let kappa = s.space.vertices().iter().map(|v| v[m].clone()).max().expect("vertices");
    let reference = AllocationSpace::monopoly(m, &kappa)?;
    if s.space.facets() != reference.facets() {
        return Err(CoreError::Precondition("the allocation space must be [0,1]^m × [0,κ]".into()));
    }
    match s.space.veto() {
        Some(v) if v.iter().all(Zero::is_zero) => {}
        _ => return Err(CoreError::VetoMissing(format_vec(&zero_vec(d)))),
    }
    if s.cone != TypeCone::monopoly(m)? {
        return Err(CoreError::Precondition("monopoly requires the monopoly type cone".into()));
    }
    Ok((m, kappa))
}

/// Lower-facet gradients of the price schedule of a monopoly menu and the resulting margin.
pub fn monopoly_pricing_analysis(s: &Scenario) -> Result<PricingAnalysis> {
    let (goods, _) = monopoly_shape(s)?;
    let m = s.extended_menu()?;
    let hs = m.poly().halfspaces();
    let mut gradients = Vec::new();
    for (i, h) in hs.iter().enumerate() {
        let nt = &h.normal()[goods];
        if !nt.is_negative() {
            continue;
        }
        // Variables (a, t, s): on facet i, strictly inside the others and the open cube by s.
        let n = goods + 2;
        let mut rows = Vec::new();
        let lift = |v: &[Scalar], s_coef: Scalar| {
            let mut r = v.to_vec();
            r.push(s_coef);
            r
        };
        rows.push(LpRow::eq(lift(h.normal(), Scalar::zero()), h.offset().clone()));
        for (j, g) in hs.iter().enumerate() {
            if j != i {
                rows.push(LpRow::le(lift(g.normal(), Scalar::one()), g.offset().clone()));
            }
        }
        for e in m.poly().equalities() {
            rows.push(LpRow::eq(lift(e.normal(), Scalar::zero()), e.offset().clone()));
        }
        for k in 0..goods {
            let mut lo = unit_vec(n, k);
            lo[n - 1] = -Scalar::one();
            rows.push(LpRow::ge(lo, Scalar::zero()));
            let mut hi = unit_vec(n, k);
            hi[n - 1] = Scalar::one();
            rows.push(LpRow::le(hi, Scalar::one()));
        }
        rows.push(LpRow::le(unit_vec(n, n - 1), Scalar::one()));
        let full = match lp_solve(&rows, &unit_vec(n, n - 1), Sense::Maximize)? {
            LpOutcome::Optimal(o) => o.value.is_positive(),
            LpOutcome::Infeasible => false,
            LpOutcome::Unbounded { .. } => return Err(CoreError::Internal("bounded slack LP is unbounded".into())),
        };
        if full {
            let g: Vector = h.normal()[..goods].iter().map(|x| x / -nt).collect();
            if g.iter().any(|x| x.is_negative() || *x > Scalar::one()) {
                return Err(CoreError::Internal(format!("marginal price {} outside [0,1]", format_vec(&g))));
            }
            gradients.push(g);
        }
    }
    gradients.sort();
    gradients.dedup();
    let margin = gradients
        .iter()
        .flat_map(|g| g.iter().map(|x| std::cmp::min(x.clone(), Scalar::one() - x)))
        .min()
        .unwrap_or_else(Scalar::zero);
    Ok(PricingAnalysis { undominated_sufficient: margin.is_positive(), gradients, margin })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NudgeResult {
    pub scenario: Scenario,
    pub analysis: PricingAnalysis,
    /// Largest change of any payment.
    pub max_displacement: Scalar,
    /// The bound `ε·κ + δ·m` on that change.
    pub bound: Scalar,
}

/// Rescales payments to `(1−ε)t + δ·Σaᵢ` and checks that the result has a positive margin.
pub fn monopoly_nudge(s: &Scenario, eps: &Scalar, delta: &Scalar) -> Result<NudgeResult> {
    let (goods, kappa) = monopoly_shape(s)?;
    if !(delta.is_positive() && delta < eps && *eps < Scalar::one()) {
        return Err(CoreError::Precondition("nudge needs 0 < δ < ε < 1".into()));
    }
    let mut items = Vec::with_capacity(s.menu.items.len());
    let mut max_displacement = Scalar::zero();
    for a in &s.menu.items {
        let mut b = a.clone();
        let goods_sum: Scalar = a[..goods].iter().sum();
        b[goods] = (Scalar::one() - eps) * &a[goods] + delta * goods_sum;
        let change = (&b[goods] - &a[goods]).abs();
        if change > max_displacement {
            max_displacement = change;
        }
        items.push(b);
    }
    let bound = eps * &kappa + delta * Scalar::from_integer((goods as i64).into());
    if max_displacement > bound {
        return Err(CoreError::Internal("nudge displacement exceeds its bound".into()));
    }
    let nudged = s.with_items(&format!("{}-nudged", s.label), items)?;
    let analysis = monopoly_pricing_analysis(&nudged)?;
    if !analysis.undominated_sufficient {
        let bad = analysis
            .gradients
            .iter()
            .find(|g| g.iter().any(|x| x.is_zero() || *x == Scalar::one()))
            .map(|g| format_vec(g))
            .unwrap_or_default();
        return Err(CoreError::Precondition(format!("nudged menu has a marginal price at 0 or 1: {bad}")));
    }
    Ok(NudgeResult { scenario: nudged, analysis, max_displacement, bound })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VetoReport {
    pub undominated: bool,
    /// Index of the principal's most preferred alternative.
    pub favorite: usize,
}

fn unique_argmax(v: &[Scalar]) -> Result<usize> {
    let best = v.iter().max().ok_or(CoreError::Precondition("empty objective".into()))?;
    let idx: Vec<usize> = (0..v.len()).filter(|&i| v[i] == *best).collect();
    if idx.len() != 1 {
        return Err(CoreError::Precondition("the objective's maximum must be attained at one alternative".into()));
    }
    Ok(idx[0])
}

/// Veto bargaining on the simplex with veto at the origin: undominated iff the menu contains the
/// veto and the principal's favorite alternative.
pub fn veto_undominated(s: &Scenario) -> Result<VetoReport> {
    require_simplex(s)?;
    let d = s.dim();
    if s.space.veto() != Some(&zero_vec(d)) {
        return Err(CoreError::VetoMissing(format_vec(&zero_vec(d))));
    }
    let v = match &s.objective {
        Some(Objective::Constant(v)) => v.clone(),
        _ => return Err(CoreError::Precondition("veto bargaining needs a constant objective".into())),
    };
    if v.iter().any(|x| !x.is_positive()) {
        return Err(CoreError::Precondition("objective entries must be positive".into()));
    }
    let favorite = unique_argmax(&v)?;
    let has = |p: &Vector| s.menu.items.contains(p);
    Ok(VetoReport { undominated: has(&zero_vec(d)) && has(&unit_vec(d, favorite)), favorite })
}

/// A finite belief: types with nonnegative rational weights summing to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSample {
    pub types: Vec<(Vector, Scalar)>,
}

impl TypeSample {
    pub fn new(types: Vec<(Vector, Scalar)>) -> Result<Self> {
        if types.is_empty() {
            return Err(CoreError::Precondition("type sample is empty".into()));
        }
        if types.iter().any(|(_, w)| w.is_negative()) {
            return Err(CoreError::Precondition("type weights must be nonnegative".into()));
        }
        let total: Scalar = types.iter().map(|(_, w)| w.clone()).sum();
        if total != Scalar::one() {
            return Err(CoreError::Precondition(format!("type weights sum to {total}, not 1")));
        }
        Ok(TypeSample { types })
    }

    /// Equal weights on the given types.
    pub fn uniform(types: Vec<Vector>) -> Result<Self> {
        let w = Scalar::new(1.into(), (types.len().max(1) as i64).into());
        Self::new(types.into_iter().map(|t| (t, w.clone())).collect())
    }
}

fn utilities(items: &[Vector], objective: &Objective, cone: &TypeCone, sample: &TypeSample) -> Result<Vec<Scalar>> {
    sample
        .types
        .iter()
        .map(|(theta, _)| {
            if !cone.contains(theta) {
                return Err(CoreError::TypeOutsideCone(format_vec(theta)));
            }
            let v = objective
                .value_at(theta)
                .ok_or_else(|| CoreError::Precondition(format!("objective undefined at {}", format_vec(theta))))?;
            Ok(dot(&agent_choice(items, theta)?, &v))
        })
        .collect()
}

/// `Σ weight · (chosen item · v(θ))` with lexicographic tie-breaking.
pub fn expected_principal_utility(
    menu: &Menu,
    objective: &Objective,
    cone: &TypeCone,
    sample: &TypeSample,
) -> Result<Scalar> {
    let u = utilities(&menu.items, objective, cone, sample)?;
    Ok(u.iter().zip(&sample.types).map(|(x, (_, w))| x * w).sum())
}

/// Sample-level comparison; a necessary condition for domination only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominanceReport {
    pub second_dominates: bool,
    /// Sample indices where the second menu is strictly worse.
    pub counterexamples: Vec<usize>,
    /// Sample indices where the second menu is strictly better.
    pub strict_gains: Vec<usize>,
}

pub fn dominance_check(
    first: &Menu,
    second: &Menu,
    objective: &Objective,
    cone: &TypeCone,
    sample: &TypeSample,
) -> Result<DominanceReport> {
    let u1 = utilities(&first.items, objective, cone, sample)?;
    let u2 = utilities(&second.items, objective, cone, sample)?;
    let counterexamples: Vec<usize> = (0..u1.len()).filter(|&i| u2[i] < u1[i]).collect();
    let strict_gains: Vec<usize> = (0..u1.len()).filter(|&i| u2[i] > u1[i]).collect();
    Ok(DominanceReport {
        second_dominates: counterexamples.is_empty() && !strict_gains.is_empty(),
        counterexamples,
        strict_gains,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentPreset {
    Simplex,
    Cube,
    /// Strike-granting menus in the planar simplex.
    Strike2d,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentSummary {
    pub preset: ExperimentPreset,
    pub d: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    /// Instances for which a forced-exhaustive menu of the requested size was produced.
    pub generated: usize,
    pub exhaustive: usize,
    pub extreme: usize,
    /// Mean dimension of the deformation nullspace over generated instances.
    pub mean_deformation_dimension: Scalar,
}

/// Draws `samples` seeded menus of size `k`, forces them exhaustive, and classifies them.
pub fn genericity_experiment(
    preset: ExperimentPreset,
    d: usize,
    k: usize,
    samples: usize,
    seed: u64,
    general_position: bool,
) -> Result<ExperimentSummary> {
    if d < 2 || k < 1 {
        return Err(CoreError::Precondition("experiment needs d >= 2 and k >= 1".into()));
    }
    let space = match preset {
        ExperimentPreset::Simplex => AllocationSpace::simplex(d)?,
        ExperimentPreset::Cube => AllocationSpace::cube(d)?,
        ExperimentPreset::Strike2d => {
            if d != 2 {
                return Err(CoreError::Precondition("strike experiment is planar".into()));
            }
            AllocationSpace::simplex(2)?
        }
    };
    let cone = TypeCone::unrestricted(d);
    let results: Vec<Option<(bool, bool, usize)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let denom = [8, 12, 16][rng.gen_range(0..3)];
            let items = match preset {
                ExperimentPreset::Strike2d => strike_menu_2d(k, denom, &mut rng),
                _ => exhaustive_menu(&space, &cone, k, denom, general_position, &mut rng),
            }?;
            let m = crate::model::extend_menu(&Menu::new(items), &cone, &space).ok()?;
            let exh = is_exhaustive(&m, &space).ok()?.exhaustive;
            let ext = is_extreme_finite(&m, &space).ok()?.is_extreme();
            Some((exh, ext, deformation_dimension(&m, &space)))
        })
        .collect();
    let done: Vec<(bool, bool, usize)> = results.into_iter().flatten().collect();
    let generated = done.len();
    let dims: usize = done.iter().map(|r| r.2).sum();
    Ok(ExperimentSummary {
        preset,
        d,
        k,
        samples,
        seed,
        generated,
        exhaustive: done.iter().filter(|r| r.0).count(),
        extreme: done.iter().filter(|r| r.1).count(),
        mean_deformation_dimension: if generated == 0 {
            Scalar::zero()
        } else {
            Scalar::new((dims as i64).into(), (generated as i64).into())
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use menuex_geometry::scalar::{int, ivec, ratio, rvec};

    fn monopoly(items: Vec<Vector>) -> Scenario {
        Scenario::new("m", AllocationSpace::monopoly(1, &int(1)).unwrap(), TypeCone::monopoly(1).unwrap(), items)
            .unwrap()
    }

    #[test]
    fn posted_price_gradient() {
        let a = monopoly_pricing_analysis(&monopoly(vec![ivec(&[0, 0]), rvec(&[(1, 1), (1, 2)])])).unwrap();
        assert_eq!(a.gradients, vec![vec![ratio(1, 2)]]);
        assert_eq!(a.margin, ratio(1, 2));
        assert!(a.undominated_sufficient);
    }

    #[test]
    fn three_item_gradients() {
        let a =
            monopoly_pricing_analysis(&monopoly(vec![ivec(&[0, 0]), rvec(&[(1, 2), (1, 8)]), rvec(&[(1, 1), (1, 2)])]))
                .unwrap();
        assert_eq!(a.gradients, vec![vec![ratio(1, 4)], vec![ratio(3, 4)]]);
        assert_eq!(a.margin, ratio(1, 4));
    }

    #[test]
    fn free_good_is_inconclusive_until_nudged() {
        let s = monopoly(vec![ivec(&[0, 0]), ivec(&[1, 0])]);
        let a = monopoly_pricing_analysis(&s).unwrap();
        assert_eq!(a.margin, int(0));
        assert!(!a.undominated_sufficient);
        let n = monopoly_nudge(&s, &ratio(1, 10), &ratio(1, 20)).unwrap();
        assert!(n.scenario.menu.items.contains(&rvec(&[(1, 1), (1, 20)])));
        assert!(n.analysis.margin.is_positive());
    }

    #[test]
    fn nudged_posted_price() {
        let s = monopoly(vec![ivec(&[0, 0]), rvec(&[(1, 1), (1, 2)])]);
        let n = monopoly_nudge(&s, &ratio(1, 10), &ratio(1, 100)).unwrap();
        assert!(n.scenario.menu.items.contains(&rvec(&[(1, 1), (46, 100)])));
        assert!(n.max_displacement <= n.bound);
    }

    #[test]
    fn posted_price_revenue_with_tie_to_no_trade() {
        let s = monopoly(vec![ivec(&[0, 0]), rvec(&[(1, 1), (1, 2)])]);
        let sample = TypeSample::uniform((1..=10).map(|w| rvec(&[(w, 10), (-1, 1)])).collect()).unwrap();
        let rev = expected_principal_utility(&s.menu, &Objective::Constant(ivec(&[0, 1])), &s.cone, &sample).unwrap();
        assert_eq!(rev, ratio(1, 4));
    }

    #[test]
    fn veto_bargaining() {
        let space = AllocationSpace::simplex(2).unwrap().with_veto(ivec(&[0, 0])).unwrap();
        let cone = TypeCone::unrestricted(2);
        let obj = Objective::Constant(ivec(&[1, 2]));
        let mk = |items: Vec<Vector>| {
            Scenario::new("v", space.clone(), cone.clone(), items).unwrap().with_objective(obj.clone())
        };
        assert!(!veto_undominated(&mk(vec![ivec(&[0, 0])])).unwrap().undominated);
        assert!(veto_undominated(&mk(vec![ivec(&[0, 0]), ivec(&[0, 1])])).unwrap().undominated);
        assert!(!veto_undominated(&mk(vec![ivec(&[0, 0]), ivec(&[1, 0])])).unwrap().undominated);
        assert!(Scenario::new("v", space.clone(), cone.clone(), vec![ivec(&[0, 1])]).is_err());
        let tie = mk(vec![ivec(&[0, 0])]).with_objective(Objective::Constant(ivec(&[2, 2])));
        assert!(veto_undominated(&tie).is_err());
    }

    #[test]
    fn delegation_examples() {
        let space = AllocationSpace::simplex(2).unwrap();
        let cone = TypeCone::unrestricted(2);
        let r = delegation_classify(&Scenario::new("e1", space.clone(), cone.clone(), vec![ivec(&[1, 0])]).unwrap())
            .unwrap();
        assert_eq!((r.kind, r.extreme), (DelegationKind::Dictates, true));
        let tri = vec![rvec(&[(0, 1), (1, 2)]), rvec(&[(1, 2), (0, 1)]), rvec(&[(1, 2), (1, 2)])];
        let r = delegation_classify(&Scenario::new("t", space, cone, tri).unwrap()).unwrap();
        assert_eq!((r.kind, r.menu_size, r.extreme), (DelegationKind::GrantsStrike, 3, true));
    }
}
