//! Cohomology with crossed coefficients: H⁰ and H¹ with their functorial
//! maps, the first coboundary, and the H²-level machinery in the submodules.

pub mod cocycle;
pub mod exact;
pub mod h2;

pub use cocycle::{
    apply_coboundary, cocycles_equivalent, compose_coboundary, invert_coboundary,
    neutralizing_coboundary, normalizing_coboundary, restrict_cocycle, unit_coboundary,
    unit_cocycle, validate_cocycle, CoboundaryData, Cocycle2, CoverGeometry,
};
pub use exact::{
    verify_exact_h2, verify_naturality, H2ExactnessReport, NaturalityReport, SquareDiagram,
};
pub use h2::{
    classify, coboundary2, h2_classes, is_neutral, map_coboundary, map_h2, H2Class, H2Set,
};

use crate::action::{
    equivariant_iso, extend_group, inverse_image_of_section, torsor_classes, ActionSheaf,
};
use crate::crossed::{CrossedMorphism, CrossedSequence, CrossedSheaf};
use crate::error::{Budget, Error, Result};
use crate::group::FinGroup;
use crate::presheaf::global_sections_group;
use crate::site::FiniteSite;

/// H⁰: global sections of A with the induced group structure; elements are
/// the section tuples.
pub struct H0 {
    pub group: FinGroup,
    pub sections: Vec<Vec<usize>>,
}

pub fn h0(site: &FiniteSite, phi: &CrossedSheaf) -> H0 {
    let (group, sections) = global_sections_group(site, &phi.a);
    H0 { group, sections }
}

/// The map H⁰(Φ) → H⁰(Φ′) induced by (f, φ): s ↦ f∘s.
pub fn map_h0(
    site: &FiniteSite,
    m: &CrossedMorphism,
    src: &H0,
    dst: &H0,
    index: usize,
) -> Result<usize> {
    let moved: Vec<usize> = site
        .objects()
        .map(|u| m.f.apply(u, src.sections[index][u]))
        .collect();
    dst.sections
        .iter()
        .position(|s| *s == moved)
        .ok_or_else(|| Error::InvalidPresheaf("image is not a global section".into()))
}

/// H¹: isomorphism classes of A-torsors; the class of the trivial torsor is
/// first and serves as the base point.
pub fn h1(site: &FiniteSite, phi: &CrossedSheaf, budget: &Budget) -> Result<Vec<ActionSheaf>> {
    torsor_classes(site, &phi.a, budget)
}

/// Index of a torsor's class among the representatives.
pub fn h1_class_index(
    site: &FiniteSite,
    classes: &[ActionSheaf],
    torsor: &ActionSheaf,
) -> Result<usize> {
    classes
        .iter()
        .position(|rep| equivariant_iso(site, rep, torsor).is_some())
        .ok_or_else(|| Error::InvalidAction("torsor matches no enumerated class".into()))
}

/// The map H¹(Φ) → H¹(Φ′): extension of the structural group along f.
pub fn map_h1(
    site: &FiniteSite,
    m: &CrossedMorphism,
    dst: &CrossedSheaf,
    torsor: &ActionSheaf,
    budget: &Budget,
) -> Result<ActionSheaf> {
    Ok(extend_group(site, torsor, &m.f, &dst.a, budget)?.torsor)
}

/// The first coboundary d: H⁰(Φ″) → H¹(Φ): the fiber of h over a section,
/// an A-torsor because A acts freely on A′.
pub fn coboundary1(
    site: &FiniteSite,
    seq: &CrossedSequence,
    h0_right: &H0,
    index: usize,
    budget: &Budget,
) -> Result<ActionSheaf> {
    let f = &seq.incl.f;
    let h = &seq.proj.f;
    // A′ as a right A-object through f
    let carrier = seq.mid.a.as_set_presheaf();
    let act = site
        .objects()
        .map(|u| {
            (0..seq.mid.a.size(u))
                .map(|x| {
                    (0..seq.left.a.size(u))
                        .map(|g| seq.mid.a.mul(u, x, f.apply(u, g)))
                        .collect()
                })
                .collect()
        })
        .collect();
    let ambient = ActionSheaf {
        carrier,
        group: seq.left.a.clone(),
        side: crate::action::Side::Right,
        act,
    };
    let quotient = seq.right.a.as_set_presheaf();
    let q = crate::presheaf::SetMorphism {
        maps: site
            .objects()
            .map(|u| (0..seq.mid.a.size(u)).map(|x| h.apply(u, x)).collect())
            .collect(),
    };
    let fiber = inverse_image_of_section(
        site,
        &ambient,
        &q,
        &quotient,
        &h0_right.sections[index],
        budget,
    )?;
    Ok(fiber.action)
}

/// Node-by-node exactness verdict for
/// 1 → H⁰(Φ) → H⁰(Φ′) → H⁰(Φ″) → H¹(Φ) → H¹(Φ′) → H¹(Φ″).
#[derive(Debug, Clone)]
pub struct LowExactnessReport {
    pub h0_left_injective: bool,
    pub exact_at_h0_mid: bool,
    pub exact_at_h0_right: bool,
    pub exact_at_h1_left: bool,
    pub exact_at_h1_mid: bool,
    pub witnesses: Vec<String>,
}

impl LowExactnessReport {
    pub fn ok(&self) -> bool {
        self.h0_left_injective
            && self.exact_at_h0_mid
            && self.exact_at_h0_right
            && self.exact_at_h1_left
            && self.exact_at_h1_mid
    }
}

/// Checks the six-term sequence of pointed sets by exhaustive fiber
/// comparison.
pub fn verify_low_exactness(
    site: &FiniteSite,
    seq: &CrossedSequence,
    budget: &Budget,
) -> Result<LowExactnessReport> {
    let mut witnesses = Vec::new();
    let h0_a = h0(site, &seq.left);
    let h0_b = h0(site, &seq.mid);
    let h0_c = h0(site, &seq.right);
    let u0: Vec<usize> = (0..h0_a.sections.len())
        .map(|i| map_h0(site, &seq.incl, &h0_a, &h0_b, i))
        .collect::<Result<_>>()?;
    let v0: Vec<usize> = (0..h0_b.sections.len())
        .map(|i| map_h0(site, &seq.proj, &h0_b, &h0_c, i))
        .collect::<Result<_>>()?;
    // injectivity of H⁰(A) → H⁰(B)
    let mut h0_left_injective = true;
    for i in 0..u0.len() {
        for j in (i + 1)..u0.len() {
            if u0[i] == u0[j] {
                h0_left_injective = false;
                witnesses.push("H⁰(Φ) → H⁰(Φ′) identifies two sections".into());
            }
        }
    }
    // exactness at H⁰(B): im u⁰ = (v⁰)⁻¹(1)
    let one_c = h0_c
        .sections
        .iter()
        .position(|s| site.objects().all(|u| s[u] == seq.right.a.one(u)))
        .expect("identity section exists");
    let mut exact_at_h0_mid = true;
    for x in 0..h0_b.sections.len() {
        let in_image = u0.contains(&x);
        let in_kernel = v0[x] == one_c;
        if in_image != in_kernel {
            exact_at_h0_mid = false;
            witnesses.push(format!("exactness fails at H⁰(Φ′) on section {x}"));
        }
    }
    // classes of H¹ for all three coefficients
    let h1_a = h1(site, &seq.left, budget)?;
    let h1_b = h1(site, &seq.mid, budget)?;
    let h1_c = h1(site, &seq.right, budget)?;
    // d: H⁰(C) → H¹(A)
    let d: Vec<usize> = (0..h0_c.sections.len())
        .map(|i| {
            let fiber = coboundary1(site, seq, &h0_c, i, budget)?;
            h1_class_index(site, &h1_a, &fiber)
        })
        .collect::<Result<_>>()?;
    // exactness at H⁰(C): im v⁰ = d⁻¹(base)
    let mut exact_at_h0_right = true;
    for x in 0..h0_c.sections.len() {
        let in_image = v0.contains(&x);
        let to_base = d[x] == 0;
        if in_image != to_base {
            exact_at_h0_right = false;
            witnesses.push(format!("exactness fails at H⁰(Φ″) on section {x}"));
        }
    }
    // u¹ and v¹ by extension of the structural group
    let u1: Vec<usize> = h1_a
        .iter()
        .map(|p| {
            let moved = map_h1(site, &seq.incl, &seq.mid, p, budget)?;
            h1_class_index(site, &h1_b, &moved)
        })
        .collect::<Result<_>>()?;
    let v1: Vec<usize> = h1_b
        .iter()
        .map(|p| {
            let moved = map_h1(site, &seq.proj, &seq.right, p, budget)?;
            h1_class_index(site, &h1_c, &moved)
        })
        .collect::<Result<_>>()?;
    // exactness at H¹(A): im d = (u¹)⁻¹(base)
    let mut exact_at_h1_left = true;
    for x in 0..h1_a.len() {
        let in_image = d.contains(&x);
        let to_base = u1[x] == 0;
        if in_image != to_base {
            exact_at_h1_left = false;
            witnesses.push(format!("exactness fails at H¹(Φ) on class {x}"));
        }
    }
    // exactness at H¹(B): im u¹ = (v¹)⁻¹(base)
    let mut exact_at_h1_mid = true;
    for x in 0..h1_b.len() {
        let in_image = u1.contains(&x);
        let to_base = v1[x] == 0;
        if in_image != to_base {
            exact_at_h1_mid = false;
            witnesses.push(format!("exactness fails at H¹(Φ′) on class {x}"));
        }
    }
    Ok(LowExactnessReport {
        h0_left_injective,
        exact_at_h0_mid,
        exact_at_h0_right,
        exact_at_h1_left,
        exact_at_h1_mid,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::site::{point_site, pseudo_circle_site};

    #[test]
    fn h0_of_constant_s3_on_connected_site_is_s3() {
        let site = pseudo_circle_site();
        let budget = Budget::default();
        let a =
            crate::presheaf::constant_group_sheaf(&site, &FinGroup::symmetric3(), &budget).unwrap();
        let phi = crate::crossed::int_crossed(&site, &a, &budget).unwrap();
        let h = h0(&site, &phi);
        assert_eq!(h.group.order(), 6);
        assert!(!h.group.is_abelian());
    }

    #[test]
    fn h1_of_the_point_is_a_single_class() {
        let site = point_site();
        let budget = Budget::default();
        let a =
            crate::presheaf::constant_group_sheaf(&site, &FinGroup::cyclic(4), &budget).unwrap();
        let phi = CrossedSheaf::with_trivial_pi(&site, &a);
        assert_eq!(h1(&site, &phi, &budget).unwrap().len(), 1);
    }

    #[test]
    fn coboundary1_sends_liftable_sections_to_the_base_point() {
        // on the point every section lifts, so d is constant at the base
        let site = point_site();
        let budget = Budget::default();
        let seq = fixtures::sequence_z2_z4_z2(&site, &budget).unwrap();
        let h0_c = h0(&site, &seq.right);
        let h1_a = h1(&site, &seq.left, &budget).unwrap();
        for i in 0..h0_c.sections.len() {
            let fiber = coboundary1(&site, &seq, &h0_c, i, &budget).unwrap();
            assert_eq!(h1_class_index(&site, &h1_a, &fiber).unwrap(), 0);
        }
    }

    #[test]
    fn low_exactness_on_point_and_pseudo_circle() {
        let budget = Budget::default();
        for site in [point_site(), pseudo_circle_site()] {
            let seq = fixtures::sequence_z2_z4_z2(&site, &budget).unwrap();
            let report = verify_low_exactness(&site, &seq, &budget).unwrap();
            assert!(report.ok(), "{:?}", report.witnesses);
            let seq = fixtures::sequence_z3_s3_z2(&site, &budget).unwrap();
            let report = verify_low_exactness(&site, &seq, &budget).unwrap();
            assert!(report.ok(), "{:?}", report.witnesses);
        }
    }

    #[test]
    fn coboundary1_is_constant_at_base_for_z2_z4_z2_on_pseudo_circle() {
        // H⁰(Z/4) → H⁰(Z/2) is onto, so every section lifts
        let site = pseudo_circle_site();
        let budget = Budget::default();
        let seq = fixtures::sequence_z2_z4_z2(&site, &budget).unwrap();
        let h0_c = h0(&site, &seq.right);
        let h1_a = h1(&site, &seq.left, &budget).unwrap();
        for i in 0..h0_c.sections.len() {
            let fiber = coboundary1(&site, &seq, &h0_c, i, &budget).unwrap();
            assert_eq!(h1_class_index(&site, &h1_a, &fiber).unwrap(), 0);
        }
    }
}
