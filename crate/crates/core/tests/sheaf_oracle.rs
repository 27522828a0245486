//! Independent oracle for sheafification: on the poset of opens of a finite
//! space, sections of the associated sheaf over U are the compatible tuples
//! of germs over the irreducible objects below U (the étale-space
//! description).  The oracle never runs the plus construction.

use crossed_cohom::group::FinGroup;
use crossed_cohom::presheaf::{
    check_sheaf, constant_group_presheaf, local_representatives, sheafify, SetPresheaf,
};
use crossed_cohom::site::{
    discrete_two_site, point_site, pseudo_circle_site, sphere_site, FiniteSite, Obj,
};
use crossed_cohom::Budget;

/// Number of étale sections of `p` over `u`: tuples (t_v) over irreducibles
/// v ≤ u with res(t_v) = t_w whenever w ≤ v.
fn etale_section_count(site: &FiniteSite, p: &SetPresheaf, u: Obj) -> usize {
    let members: Vec<Obj> = site
        .irreducibles()
        .into_iter()
        .filter(|&v| site.leq(v, u))
        .collect();
    let mut count = 0;
    let mut tuple: Vec<usize> = Vec::new();
    fn rec(
        site: &FiniteSite,
        p: &SetPresheaf,
        members: &[Obj],
        tuple: &mut Vec<usize>,
        count: &mut usize,
    ) {
        if tuple.len() == members.len() {
            *count += 1;
            return;
        }
        let v = members[tuple.len()];
        'next: for t in 0..p.size(v) {
            for (i, &w) in members.iter().enumerate().take(tuple.len()) {
                // germs must agree along containments in both directions
                if site.leq(w, v) && p.res(v, w, t) != tuple[i] {
                    continue 'next;
                }
                if site.leq(v, w) && p.res(w, v, tuple[i]) != t {
                    continue 'next;
                }
            }
            tuple.push(t);
            rec(site, p, members, tuple, count);
            tuple.pop();
        }
    }
    rec(site, p, &members, &mut tuple, &mut count);
    count
}

#[test]
fn sheafification_matches_the_etale_oracle_everywhere() {
    let budget = Budget::default();
    for site in [
        point_site(),
        discrete_two_site(),
        pseudo_circle_site(),
        sphere_site(),
    ] {
        for base in [
            FinGroup::cyclic(2),
            FinGroup::cyclic(4),
            FinGroup::symmetric3(),
        ] {
            let p = constant_group_presheaf(&site, &base).as_set_presheaf();
            let s = sheafify(&site, &p, &budget).unwrap();
            for u in site.objects() {
                assert_eq!(
                    s.sheaf.size(u),
                    etale_section_count(&site, &p, u),
                    "stalk size differs at {}",
                    site.name(u)
                );
            }
            assert!(check_sheaf(&site, &s.sheaf, &budget).unwrap().ok);
        }
    }
}

#[test]
fn frozen_values_from_the_etale_oracle() {
    // computed with the oracle above and frozen: the disconnected overlap of
    // the pseudo-circle doubles the constant stalk, the sphere's equator
    // object keeps one component
    let site = pseudo_circle_site();
    let p = constant_group_presheaf(&site, &FinGroup::cyclic(2)).as_set_presheaf();
    let ab = site.object_by_name("a,b").unwrap();
    let top = site.require_top().unwrap();
    assert_eq!(etale_section_count(&site, &p, ab), 4);
    assert_eq!(etale_section_count(&site, &p, top), 2);

    let sphere = sphere_site();
    let p = constant_group_presheaf(&sphere, &FinGroup::cyclic(3)).as_set_presheaf();
    let equator = sphere.object_by_name("a,b,c,d").unwrap();
    let ab = sphere.object_by_name("a,b").unwrap();
    assert_eq!(etale_section_count(&sphere, &p, equator), 3);
    assert_eq!(etale_section_count(&sphere, &p, ab), 9);
}

#[test]
fn local_representatives_recover_sections() {
    let budget = Budget::default();
    let site = pseudo_circle_site();
    let p = constant_group_presheaf(&site, &FinGroup::cyclic(2)).as_set_presheaf();
    let s = sheafify(&site, &p, &budget).unwrap();
    for u in site.objects() {
        for section in 0..s.sheaf.size(u) {
            let (cover, reps) = local_representatives(&site, &p, &s, u, section).unwrap();
            assert_eq!(cover.members.len(), reps.len());
            for (&v, &rep) in cover.members.iter().zip(reps.iter()) {
                // the representative maps back to the restricted section
                assert_eq!(s.unit.apply(v, rep), s.sheaf.res(u, v, section));
            }
        }
    }
}
