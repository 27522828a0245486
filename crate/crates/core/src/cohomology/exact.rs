//! Exactness of the cohomology sequence at the H² level and naturality of
//! the whole ladder, verified element by element.

use super::cocycle::{cocycles_equivalent, unit_cocycle, Cocycle2, CoverGeometry};
use super::h2::{coboundary2, h2_classes, is_neutral, map_h2, H2Set};
use super::{coboundary1, h0, h1, h1_class_index, map_h0, map_h1};
use crate::crossed::{CrossedMorphism, CrossedSequence};
use crate::error::{Budget, Result};
use crate::site::FiniteSite;

/// Verdicts for the three clauses of the H² exactness theorem.
#[derive(Debug, Clone)]
pub struct H2ExactnessReport {
    /// p ∈ Im(h,ψ)¹ ⇔ d(p) neutral, for every p ∈ H¹(Φ″).
    pub clause_i: bool,
    /// x ∈ Im d ⇔ (f,1)²(x) is the unit class, for every x ∈ H²(Φ).
    pub clause_ii: bool,
    /// x ∈ Im(f,1)² ⇔ (h,ψ)²(x) neutral, for every x ∈ H²(Φ′).
    pub clause_iii: bool,
    pub h1_right_classes: usize,
    pub h2_left_classes: usize,
    pub h2_mid_classes: usize,
    pub h2_right_classes: usize,
    pub witnesses: Vec<String>,
}

impl H2ExactnessReport {
    pub fn ok(&self) -> bool {
        self.clause_i && self.clause_ii && self.clause_iii
    }
}

/// Runs all three exactness clauses over the given cover (typically the
/// minimal-basis cover, which trivializes every torsor on a finite space).
pub fn verify_exact_h2(
    site: &FiniteSite,
    seq: &CrossedSequence,
    geom: &CoverGeometry,
    budget: &Budget,
) -> Result<H2ExactnessReport> {
    let mut witnesses = Vec::new();
    let h1_mid = h1(site, &seq.mid, budget)?;
    let h1_right = h1(site, &seq.right, budget)?;
    let h2_left = h2_classes(site, &seq.left, geom, budget)?;
    let h2_mid = h2_classes(site, &seq.mid, geom, budget)?;
    let h2_right = h2_classes(site, &seq.right, geom, budget)?;

    // image of (h, ψ)¹ inside H¹(Φ″)
    let mut image_h1: Vec<usize> = Vec::new();
    for p in &h1_mid {
        let moved = map_h1(site, &seq.proj, &seq.right, p, budget)?;
        image_h1.push(h1_class_index(site, &h1_right, &moved)?);
    }
    // d: H¹(Φ″) → H²(Φ), with the default (first-choice) trivialization
    let mut d_classes: Vec<usize> = Vec::new();
    let mut d_cocycles: Vec<Cocycle2> = Vec::new();
    for p in &h1_right {
        let c = coboundary2(site, seq, p, geom, &mut |_| 0)?;
        let class =
            super::h2::classify(site, &seq.left, geom, &h2_left, &c, budget)?.ok_or_else(|| {
                crate::error::Error::InvalidCocycle(
                    "lifting-gerbe class missing from the enumeration".into(),
                )
            })?;
        d_classes.push(class);
        d_cocycles.push(c);
    }
    // clause (i)
    let mut clause_i = true;
    for (idx, c) in d_cocycles.iter().enumerate() {
        let neutral = is_neutral(site, &seq.left, geom, c, budget)?;
        let in_image = image_h1.contains(&idx);
        if neutral != in_image {
            clause_i = false;
            witnesses.push(format!(
                "clause (i) fails on H¹(Φ″) class {idx}: neutral = {neutral}, lifts = {in_image}"
            ));
        }
    }
    // clause (ii)
    let mut clause_ii = true;
    for (x, class) in h2_left.classes.iter().enumerate() {
        let pushed = map_h2(
            site,
            &seq.left,
            &seq.mid,
            &seq.incl,
            geom,
            &class.representative,
        )?;
        let unit = unit_cocycle(site, &seq.mid, geom);
        let is_unit = cocycles_equivalent(site, &seq.mid, geom, &pushed, &unit, budget)?.is_some();
        let in_image_d = d_classes.contains(&x);
        if is_unit != in_image_d {
            clause_ii = false;
            witnesses.push(format!(
                "clause (ii) fails on H²(Φ) class {x}: unit = {is_unit}, in Im d = {in_image_d}"
            ));
        }
    }
    // clause (iii)
    let mut clause_iii = true;
    let image_f2: Vec<usize> = h2_left
        .classes
        .iter()
        .map(|class| {
            let pushed = map_h2(
                site,
                &seq.left,
                &seq.mid,
                &seq.incl,
                geom,
                &class.representative,
            )?;
            super::h2::classify(site, &seq.mid, geom, &h2_mid, &pushed, budget)?.ok_or_else(|| {
                crate::error::Error::InvalidCocycle(
                    "pushforward class missing from the enumeration".into(),
                )
            })
        })
        .collect::<Result<_>>()?;
    for (x, class) in h2_mid.classes.iter().enumerate() {
        let pushed = map_h2(
            site,
            &seq.mid,
            &seq.right,
            &seq.proj,
            geom,
            &class.representative,
        )?;
        let neutral = is_neutral(site, &seq.right, geom, &pushed, budget)?;
        let in_image = image_f2.contains(&x);
        if neutral != in_image {
            clause_iii = false;
            witnesses.push(format!(
                "clause (iii) fails on H²(Φ′) class {x}: neutral = {neutral}, in Im = {in_image}"
            ));
        }
    }
    Ok(H2ExactnessReport {
        clause_i,
        clause_ii,
        clause_iii,
        h1_right_classes: h1_right.len(),
        h2_left_classes: h2_left.classes.len(),
        h2_mid_classes: h2_mid.classes.len(),
        h2_right_classes: h2_right.classes.len(),
        witnesses,
    })
}

/// A commutative diagram of two short exact sequences with vertical crossed
/// morphisms.
pub struct SquareDiagram {
    pub top: CrossedSequence,
    pub bottom: CrossedSequence,
    pub v_left: CrossedMorphism,
    pub v_mid: CrossedMorphism,
    pub v_right: CrossedMorphism,
}

#[derive(Debug, Clone)]
pub struct NaturalityReport {
    /// (square name, commutes) in ladder order.
    pub squares: Vec<(String, bool)>,
    pub witnesses: Vec<String>,
}

impl NaturalityReport {
    pub fn ok(&self) -> bool {
        self.squares.iter().all(|(_, ok)| *ok)
    }
}

/// Verifies that the diagram commutes at the coefficient level, then that
/// every cohomology square (including both coboundary squares) commutes
/// element by element.
pub fn verify_naturality(
    site: &FiniteSite,
    diagram: &SquareDiagram,
    geom: &CoverGeometry,
    budget: &Budget,
) -> Result<NaturalityReport> {
    let mut squares = Vec::new();
    let mut witnesses = Vec::new();
    let top = &diagram.top;
    let bottom = &diagram.bottom;

    // coefficient-level commutation
    let left_square = diagram.v_left.compose(&bottom.incl);
    let other = top.incl.compose(&diagram.v_mid);
    let coeff_left = left_square.f == other.f && left_square.varphi == other.varphi;
    squares.push(("coefficients left".into(), coeff_left));
    let right_square = diagram.v_mid.compose(&bottom.proj);
    let other = top.proj.compose(&diagram.v_right);
    let coeff_right = right_square.f == other.f && right_square.varphi == other.varphi;
    squares.push(("coefficients right".into(), coeff_right));

    // H⁰ squares
    let h0s = [
        (h0(site, &top.left), h0(site, &bottom.left)),
        (h0(site, &top.mid), h0(site, &bottom.mid)),
        (h0(site, &top.right), h0(site, &bottom.right)),
    ];
    for (pos, (horiz_top, horiz_bottom, vert_a, vert_b, name)) in [
        (
            &top.incl,
            &bottom.incl,
            &diagram.v_left,
            &diagram.v_mid,
            "H⁰ left",
        ),
        (
            &top.proj,
            &bottom.proj,
            &diagram.v_mid,
            &diagram.v_right,
            "H⁰ right",
        ),
    ]
    .into_iter()
    .enumerate()
    {
        let (src_top, src_bot) = (&h0s[pos].0, &h0s[pos].1);
        let (dst_top, dst_bot) = (&h0s[pos + 1].0, &h0s[pos + 1].1);
        let mut ok = true;
        for i in 0..src_top.sections.len() {
            let around_top = map_h0(site, horiz_top, src_top, dst_top, i)?;
            let around_top = map_h0(site, vert_b, dst_top, dst_bot, around_top)?;
            let around_bottom = map_h0(site, vert_a, src_top, src_bot, i)?;
            let around_bottom = map_h0(site, horiz_bottom, src_bot, dst_bot, around_bottom)?;
            if around_top != around_bottom {
                ok = false;
                witnesses.push(format!("{name} square differs on section {i}"));
            }
        }
        squares.push((name.into(), ok));
    }

    // first coboundary square: d∘(v_right)⁰ = (v_left)¹∘d
    let h1_top_left = h1(site, &top.left, budget)?;
    let h1_bot_left = h1(site, &bottom.left, budget)?;
    let h0_top_right = &h0s[2].0;
    let h0_bot_right = &h0s[2].1;
    {
        let mut ok = true;
        for i in 0..h0_top_right.sections.len() {
            let upper = coboundary1(site, top, h0_top_right, i, budget)?;
            let upper = map_h1(site, &diagram.v_left, &bottom.left, &upper, budget)?;
            let upper_class = h1_class_index(site, &h1_bot_left, &upper)?;
            let lower = map_h0(site, &diagram.v_right, h0_top_right, h0_bot_right, i)?;
            let lower = coboundary1(site, bottom, h0_bot_right, lower, budget)?;
            let lower_class = h1_class_index(site, &h1_bot_left, &lower)?;
            if upper_class != lower_class {
                ok = false;
                witnesses.push(format!("first coboundary square differs on section {i}"));
            }
        }
        squares.push(("H⁰ → H¹ coboundary".into(), ok));
    }

    // H¹ squares
    let h1_top_mid = h1(site, &top.mid, budget)?;
    let h1_top_right = h1(site, &top.right, budget)?;
    let h1_bot_mid = h1(site, &bottom.mid, budget)?;
    let h1_bot_right = h1(site, &bottom.right, budget)?;
    {
        let mut ok = true;
        for (i, p) in h1_top_left.iter().enumerate() {
            let upper = map_h1(site, &top.incl, &top.mid, p, budget)?;
            let upper = map_h1(site, &diagram.v_mid, &bottom.mid, &upper, budget)?;
            let lower = map_h1(site, &diagram.v_left, &bottom.left, p, budget)?;
            let lower = map_h1(site, &bottom.incl, &bottom.mid, &lower, budget)?;
            if h1_class_index(site, &h1_bot_mid, &upper)?
                != h1_class_index(site, &h1_bot_mid, &lower)?
            {
                ok = false;
                witnesses.push(format!("H¹ left square differs on class {i}"));
            }
        }
        squares.push(("H¹ left".into(), ok));
        let mut ok = true;
        for (i, p) in h1_top_mid.iter().enumerate() {
            let upper = map_h1(site, &top.proj, &top.right, p, budget)?;
            let upper = map_h1(site, &diagram.v_right, &bottom.right, &upper, budget)?;
            let lower = map_h1(site, &diagram.v_mid, &bottom.mid, p, budget)?;
            let lower = map_h1(site, &bottom.proj, &bottom.right, &lower, budget)?;
            if h1_class_index(site, &h1_bot_right, &upper)?
                != h1_class_index(site, &h1_bot_right, &lower)?
            {
                ok = false;
                witnesses.push(format!("H¹ right square differs on class {i}"));
            }
        }
        squares.push(("H¹ right".into(), ok));
    }

    // second coboundary square: d∘(v_right)¹ = (v_left)²∘d
    let h2_bot_left = h2_classes(site, &bottom.left, geom, budget)?;
    {
        let mut ok = true;
        for (i, p) in h1_top_right.iter().enumerate() {
            let upper = coboundary2(site, top, p, geom, &mut |_| 0)?;
            let upper = map_h2(site, &top.left, &bottom.left, &diagram.v_left, geom, &upper)?;
            let upper_class =
                classify_or_fail(site, &bottom.left, geom, &h2_bot_left, &upper, budget)?;
            let moved = map_h1(site, &diagram.v_right, &bottom.right, p, budget)?;
            let lower = coboundary2(site, bottom, &moved, geom, &mut |_| 0)?;
            let lower_class =
                classify_or_fail(site, &bottom.left, geom, &h2_bot_left, &lower, budget)?;
            if upper_class != lower_class {
                ok = false;
                witnesses.push(format!("second coboundary square differs on class {i}"));
            }
        }
        squares.push(("H¹ → H² coboundary".into(), ok));
    }

    // H² squares
    let h2_top_left = h2_classes(site, &top.left, geom, budget)?;
    let h2_top_mid = h2_classes(site, &top.mid, geom, budget)?;
    let h2_bot_mid = h2_classes(site, &bottom.mid, geom, budget)?;
    let h2_bot_right = h2_classes(site, &bottom.right, geom, budget)?;
    {
        let mut ok = true;
        for (i, class) in h2_top_left.classes.iter().enumerate() {
            let upper = map_h2(
                site,
                &top.left,
                &top.mid,
                &top.incl,
                geom,
                &class.representative,
            )?;
            let upper = map_h2(site, &top.mid, &bottom.mid, &diagram.v_mid, geom, &upper)?;
            let lower = map_h2(
                site,
                &top.left,
                &bottom.left,
                &diagram.v_left,
                geom,
                &class.representative,
            )?;
            let lower = map_h2(site, &bottom.left, &bottom.mid, &bottom.incl, geom, &lower)?;
            if classify_or_fail(site, &bottom.mid, geom, &h2_bot_mid, &upper, budget)?
                != classify_or_fail(site, &bottom.mid, geom, &h2_bot_mid, &lower, budget)?
            {
                ok = false;
                witnesses.push(format!("H² left square differs on class {i}"));
            }
        }
        squares.push(("H² left".into(), ok));
        let mut ok = true;
        for (i, class) in h2_top_mid.classes.iter().enumerate() {
            let upper = map_h2(
                site,
                &top.mid,
                &top.right,
                &top.proj,
                geom,
                &class.representative,
            )?;
            let upper = map_h2(
                site,
                &top.right,
                &bottom.right,
                &diagram.v_right,
                geom,
                &upper,
            )?;
            let lower = map_h2(
                site,
                &top.mid,
                &bottom.mid,
                &diagram.v_mid,
                geom,
                &class.representative,
            )?;
            let lower = map_h2(site, &bottom.mid, &bottom.right, &bottom.proj, geom, &lower)?;
            if classify_or_fail(site, &bottom.right, geom, &h2_bot_right, &upper, budget)?
                != classify_or_fail(site, &bottom.right, geom, &h2_bot_right, &lower, budget)?
            {
                ok = false;
                witnesses.push(format!("H² right square differs on class {i}"));
            }
        }
        squares.push(("H² right".into(), ok));
    }

    Ok(NaturalityReport { squares, witnesses })
}

fn classify_or_fail(
    site: &FiniteSite,
    phi: &crate::crossed::CrossedSheaf,
    geom: &CoverGeometry,
    set: &H2Set,
    c: &Cocycle2,
    budget: &Budget,
) -> Result<usize> {
    super::h2::classify(site, phi, geom, set, c, budget)?.ok_or_else(|| {
        crate::error::Error::InvalidCocycle("class missing from the enumeration".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::site::{point_site, pseudo_circle_site};

    #[test]
    fn exactness_theorem_on_the_point() {
        let site = point_site();
        let budget = Budget::default();
        let top = site.require_top().unwrap();
        let geom = CoverGeometry::new(&site, &site.minimal_cover(top).unwrap()).unwrap();
        for seq in [
            fixtures::sequence_z2_z4_z2(&site, &budget).unwrap(),
            fixtures::sequence_z3_s3_z2(&site, &budget).unwrap(),
        ] {
            let report = verify_exact_h2(&site, &seq, &geom, &budget).unwrap();
            assert!(report.ok(), "{:?}", report.witnesses);
        }
    }

    #[test]
    fn exactness_theorem_on_the_pseudo_circle() {
        let site = pseudo_circle_site();
        let budget = Budget::default();
        let top = site.require_top().unwrap();
        let geom = CoverGeometry::new(&site, &site.minimal_cover(top).unwrap()).unwrap();
        for seq in [
            fixtures::sequence_z2_z4_z2(&site, &budget).unwrap(),
            fixtures::sequence_z3_s3_z2(&site, &budget).unwrap(),
        ] {
            let report = verify_exact_h2(&site, &seq, &geom, &budget).unwrap();
            assert!(report.ok(), "{:?}", report.witnesses);
        }
    }

    #[test]
    fn naturality_with_identity_verticals_is_trivial() {
        let site = point_site();
        let budget = Budget::default();
        let seq = fixtures::sequence_z2_z4_z2(&site, &budget).unwrap();
        let diagram = SquareDiagram {
            top: seq.clone(),
            bottom: seq.clone(),
            v_left: crate::crossed::CrossedMorphism::identity(&site, &seq.left),
            v_mid: crate::crossed::CrossedMorphism::identity(&site, &seq.mid),
            v_right: crate::crossed::CrossedMorphism::identity(&site, &seq.right),
        };
        let top = site.require_top().unwrap();
        let geom = CoverGeometry::new(&site, &site.minimal_cover(top).unwrap()).unwrap();
        let report = verify_naturality(&site, &diagram, &geom, &budget).unwrap();
        assert!(report.ok(), "{:?}", report.witnesses);
    }

    #[test]
    fn naturality_of_the_klein_diagram_on_point_and_pseudo_circle() {
        let budget = Budget::default();
        for site in [point_site(), pseudo_circle_site()] {
            let diagram = fixtures::naturality_diagram(&site, &budget).unwrap();
            let top = site.require_top().unwrap();
            let geom = CoverGeometry::new(&site, &site.minimal_cover(top).unwrap()).unwrap();
            let report = verify_naturality(&site, &diagram, &geom, &budget).unwrap();
            assert!(report.ok(), "{:?}", report.witnesses);
        }
    }
}
