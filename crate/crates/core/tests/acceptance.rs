//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test --release --test acceptance -- --nocapture`.

use crossed_cohom::action::{
    contracted_product_carrying, equivariant_iso, torsor_classes, ActionSheaf, Side,
};
use crossed_cohom::cohomology::{
    classify, coboundary2, cocycles_equivalent, h2_classes, map_h2, verify_exact_h2,
    verify_naturality, CoverGeometry,
};
use crossed_cohom::compare::{abelian_cech_h1, abelian_cech_h2, giraud_correspondence};
use crossed_cohom::crossed::{check_crossed_morphism, int_crossed, CrossedMorphism, CrossedSheaf};
use crossed_cohom::fixtures::{
    constant_sheaf_hom, naturality_diagram, sequence_z2_z4_z2, sequence_z3_s3_z2,
};
use crossed_cohom::group::FinGroup;
use crossed_cohom::presheaf::{constant_group_sheaf, GroupPresheaf, SetMorphism};
use crossed_cohom::site::{
    discrete_two_site, point_site, pseudo_circle_site, sphere_site, Cover, FiniteSite,
};
use crossed_cohom::Budget;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn minimal_geometry(site: &FiniteSite) -> CoverGeometry {
    let top = site.require_top().unwrap();
    CoverGeometry::new(site, &site.minimal_cover(top).unwrap()).unwrap()
}

fn two_member_cover(site: &FiniteSite) -> Cover {
    let top = site.require_top().unwrap();
    Cover {
        target: top,
        members: vec![
            site.object_by_name("a,b,c").unwrap(),
            site.object_by_name("a,b,d").unwrap(),
        ],
    }
}

#[test]
fn criterion_1_abelian_coincidence() {
    let start = Instant::now();
    let budget = Budget::default();
    let sites = [
        ("pt", point_site()),
        ("pseudo-circle", pseudo_circle_site()),
        ("sphere", sphere_site()),
    ];
    for (name, site) in &sites {
        let top = site.require_top().unwrap();
        let cover = site.minimal_cover(top).unwrap();
        let geom = CoverGeometry::new(site, &cover).unwrap();
        for n in [2usize, 3, 4] {
            let sheaf = constant_group_sheaf(site, &FinGroup::cyclic(n), &budget).unwrap();
            let phi = CrossedSheaf::with_trivial_pi(site, &sheaf);
            let descent = h2_classes(site, &phi, &geom, &budget).unwrap();
            let oracle = abelian_cech_h2(site, &sheaf, &cover).unwrap();
            assert_eq!(
                descent.classes.len() as u128,
                oracle,
                "H² cardinalities differ on {name} for Z/{n}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 300,
        "criterion 1 exceeded five minutes: {elapsed:?}"
    );
    println!(
        "criterion 1 (abelian coincidence, |H2| = Cech oracle on pt/pseudo-circle/sphere for \
         Z/2, Z/3, Z/4): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_2_h1_oracle_equivalence() {
    let start = Instant::now();
    let budget = Budget::default();
    let site = pseudo_circle_site();
    let cover = two_member_cover(&site);
    for (n, expected) in [(2usize, 2u128), (4, 4)] {
        let sheaf = constant_group_sheaf(&site, &FinGroup::cyclic(n), &budget).unwrap();
        let classes = torsor_classes(&site, &sheaf, &budget).unwrap();
        let cech = abelian_cech_h1(&site, &sheaf, &cover).unwrap();
        assert_eq!(
            classes.len() as u128,
            cech,
            "torsor classes vs Čech H¹ for Z/{n}"
        );
        assert_eq!(cech, expected, "Čech H¹ value for Z/{n}");
    }
    println!(
        "criterion 2 (H1 oracle equivalence, Z/2 -> 2 and Z/4 -> 4 classes on the two-member \
         pseudo-circle cover): PASS in {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_3_exact_sequence_theorem() {
    let start = Instant::now();
    let budget = Budget::default();
    for (name, site) in [
        ("pt", point_site()),
        ("pseudo-circle", pseudo_circle_site()),
    ] {
        let geom = minimal_geometry(&site);
        for (seq_name, seq) in [
            ("Z/2-Z/4-Z/2", sequence_z2_z4_z2(&site, &budget).unwrap()),
            ("Z/3-S3-Z/2", sequence_z3_s3_z2(&site, &budget).unwrap()),
        ] {
            let report = verify_exact_h2(&site, &seq, &geom, &budget).unwrap();
            assert!(
                report.ok(),
                "exactness fails for {seq_name} on {name}: {:?}",
                report.witnesses
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 600,
        "criterion 3 exceeded ten minutes: {elapsed:?}"
    );
    println!(
        "criterion 3 (H2 exactness clauses (i)-(iii) for both sequences on pt and \
         pseudo-circle): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_4_functoriality_composition() {
    let start = Instant::now();
    let budget = Budget::default();
    for (name, site) in [
        ("pt", point_site()),
        ("pseudo-circle", pseudo_circle_site()),
    ] {
        // chain (Z/3, Int S3) → (S3, Int S3) → (S3, Int S3): the 3-cycle
        // inclusion followed by conjugation by a reflection
        let seq = sequence_z3_s3_z2(&site, &budget).unwrap();
        let phi0 = seq.left.clone();
        let phi1 = seq.mid.clone();
        let first = seq.incl.clone();
        let s3 = FinGroup::symmetric3();
        let s = s3.index_of("s").unwrap();
        let conj_base: Vec<usize> = s3.elements().map(|x| s3.conj(s, x)).collect();
        let f2 = constant_sheaf_hom(&site, &phi1.a, &s3, &phi1.a, &s3, &conj_base).unwrap();
        // φ on Int(S3) induced by the same conjugation through ρ
        let varphi2 = SetMorphism {
            maps: site
                .objects()
                .map(|u| {
                    (0..phi1.pi.size(u))
                        .map(|p| {
                            // transport through a ρ-preimage; Int(S3) = image
                            // of ρ objectwise here
                            let g = (0..phi1.a.size(u))
                                .find(|&g| phi1.rho(u, g) == p)
                                .expect("rho is onto for trivial center");
                            phi1.rho(u, f2.apply(u, g))
                        })
                        .collect()
                })
                .collect(),
        };
        let second = CrossedMorphism {
            f: f2,
            varphi: varphi2,
        };
        assert!(check_crossed_morphism(&site, &phi1, &phi1, &second)
            .unwrap()
            .ok());
        let geoms = {
            let mut g = vec![minimal_geometry(&site)];
            if site.object_count() > 1 {
                g.push(CoverGeometry::new(&site, &two_member_cover(&site)).unwrap());
            }
            g
        };
        for geom in &geoms {
            let set0 = h2_classes(&site, &phi0, geom, &budget).unwrap();
            let set1 = h2_classes(&site, &phi1, geom, &budget).unwrap();
            let composed = first.compose(&second);
            for class in &set0.classes {
                let step1 =
                    map_h2(&site, &phi0, &phi1, &first, geom, &class.representative).unwrap();
                let step2 = map_h2(&site, &phi1, &phi1, &second, geom, &step1).unwrap();
                let direct =
                    map_h2(&site, &phi0, &phi1, &composed, geom, &class.representative).unwrap();
                // the composition law holds on the nose for descent data
                assert_eq!(step2, direct, "composition law fails on {name}");
                // and a fortiori on classes
                let via_steps = classify(&site, &phi1, geom, &set1, &step2, &budget)
                    .unwrap()
                    .expect("class found");
                let via_direct = classify(&site, &phi1, geom, &set1, &direct, &budget)
                    .unwrap()
                    .expect("class found");
                assert_eq!(via_steps, via_direct);
            }
        }
    }
    println!(
        "criterion 4 (functoriality composition law on every enumerated class, pt and \
         pseudo-circle): PASS in {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_5_contracted_product_laws() {
    let start = Instant::now();
    let budget = Budget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let bases = [
        FinGroup::cyclic(2),
        FinGroup::cyclic(3),
        FinGroup::cyclic(4),
        FinGroup::cyclic(5),
        FinGroup::cyclic(6),
        FinGroup::cyclic(8),
        FinGroup::product(&FinGroup::cyclic(2), &FinGroup::cyclic(2)),
        FinGroup::product(&FinGroup::cyclic(2), &FinGroup::cyclic(4)),
        FinGroup::symmetric3(),
        FinGroup::dihedral4(),
        FinGroup::quaternion8(),
    ];
    let sites = [point_site(), discrete_two_site(), pseudo_circle_site()];
    let mut instances = 0;
    while instances < 10 {
        let site = &sites[rng.gen_range(0..sites.len())];
        let base = &bases[rng.gen_range(0..bases.len())];
        let g = constant_group_sheaf(site, base, &budget).unwrap();
        let classes = torsor_classes(site, &g, &budget).unwrap();
        let p = &classes[rng.gen_range(0..classes.len())];
        // P ∧^G G ≅ P, with the right structure carried through the product
        let left = ActionSheaf::translation(site, &g, Side::Left);
        let right = ActionSheaf::translation(site, &g, Side::Right);
        let cp = contracted_product_carrying(site, p, &left, None, Some(&right), &budget).unwrap();
        let back = cp.carried_right.expect("carried structure");
        assert!(
            equivariant_iso(site, p, &back).is_some(),
            "P ∧ G is not isomorphic to P for |G| = {}",
            base.order()
        );
        // associativity: (P ∧ G) ∧ G ≅ P ∧ (G ∧ G), both as right-G sheaves
        let left_translation = ActionSheaf::translation(site, &g, Side::Left);
        let lhs = {
            let first = contracted_product_carrying(
                site,
                p,
                &left_translation,
                None,
                Some(&right),
                &budget,
            )
            .unwrap();
            let outer = contracted_product_carrying(
                site,
                &first.carried_right.unwrap(),
                &left_translation,
                None,
                Some(&right),
                &budget,
            )
            .unwrap();
            outer.carried_right.unwrap()
        };
        let rhs = {
            let inner = contracted_product_carrying(
                site,
                &right,
                &left_translation,
                Some(&left_translation),
                Some(&right),
                &budget,
            )
            .unwrap();
            let inner_left = inner.carried_left.unwrap();
            let inner_right = inner.carried_right.unwrap();
            let outer = contracted_product_carrying(
                site,
                p,
                &inner_left,
                None,
                Some(&inner_right),
                &budget,
            )
            .unwrap();
            outer.carried_right.unwrap()
        };
        assert!(
            equivariant_iso(site, &lhs, &rhs).is_some(),
            "associativity fails for |G| = {}",
            base.order()
        );
        instances += 1;
    }
    println!(
        "criterion 5 (contracted-product unit and associativity isomorphisms on {instances} \
         randomized instances): PASS in {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_6_coboundary_well_definedness() {
    let start = Instant::now();
    let budget = Budget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0b0);
    for site in [point_site(), pseudo_circle_site()] {
        let geom = minimal_geometry(&site);
        for seq in [
            sequence_z2_z4_z2(&site, &budget).unwrap(),
            sequence_z3_s3_z2(&site, &budget).unwrap(),
        ] {
            let torsors = torsor_classes(&site, &seq.right.a, &budget).unwrap();
            for p in &torsors {
                let mut first = None;
                for _run in 0..5 {
                    let c =
                        coboundary2(&site, &seq, p, &geom, &mut |n| rng.gen_range(0..n)).unwrap();
                    match &first {
                        None => first = Some(c),
                        Some(reference) => {
                            let witness = cocycles_equivalent(
                                &site, &seq.left, &geom, reference, &c, &budget,
                            )
                            .unwrap();
                            assert!(
                                witness.is_some(),
                                "second coboundary depends on lift choices"
                            );
                        }
                    }
                }
            }
        }
    }
    println!(
        "criterion 6 (second coboundary invariant under 5 random lift/trivialization choices \
         per fixture): PASS in {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_7_naturality() {
    let start = Instant::now();
    let budget = Budget::default();
    for (name, site) in [
        ("pt", point_site()),
        ("pseudo-circle", pseudo_circle_site()),
    ] {
        let diagram = naturality_diagram(&site, &budget).unwrap();
        let geom = minimal_geometry(&site);
        let report = verify_naturality(&site, &diagram, &geom, &budget).unwrap();
        assert!(
            report.ok(),
            "naturality fails on {name}: {:?}",
            report.witnesses
        );
    }
    println!(
        "criterion 7 (one full naturality diagram commutes element-by-element on pt and \
         pseudo-circle): PASS in {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_8_giraud_roundtrip() {
    let start = Instant::now();
    let budget = Budget::default();
    let s3 = FinGroup::symmetric3();
    for (name, site) in [
        ("pt", point_site()),
        ("pseudo-circle", pseudo_circle_site()),
    ] {
        let sheaf: GroupPresheaf = constant_group_sheaf(&site, &s3, &budget).unwrap();
        // the correspondence coefficients really are (S3, Int S3)
        let phi = int_crossed(&site, &sheaf, &budget).unwrap();
        assert!(crossed_cohom::crossed::check_crossed(&site, &phi, &budget)
            .unwrap()
            .ok());
        let top = site.require_top().unwrap();
        for cover in [site.minimal_cover(top).unwrap()] {
            let report = giraud_correspondence(&site, &sheaf, &cover, &budget).unwrap();
            assert!(
                report.ok(),
                "round-trip fails on {name}: {:?}",
                report.witnesses
            );
        }
        // the two-member cover instance on the circle
        if site.object_count() > 1 {
            let report =
                giraud_correspondence(&site, &sheaf, &two_member_cover(&site), &budget).unwrap();
            assert!(report.ok(), "{:?}", report.witnesses);
        }
    }
    println!(
        "criterion 8 (inner-correspondence round-trip identity on all (S3, Int S3) classes, pt \
         and pseudo-circle): PASS in {:?}",
        start.elapsed()
    );
}
