//! H² with crossed coefficients relative to a cover: class enumeration, the
//! pushforward along crossed morphisms, and the second coboundary (the class
//! of the gerbe of liftings of a torsor).

use super::cocycle::{
    cocycles_equivalent, neutralizing_coboundary, restrict_pi, unit_cocycle, validate_cocycle,
    Cocycle2, CoverGeometry, RhoFibers,
};
use crate::action::ActionSheaf;
use crate::crossed::{CrossedMorphism, CrossedSequence, CrossedSheaf};
use crate::error::{Budget, Error, Result};
use crate::site::FiniteSite;
use std::collections::BTreeMap;

/// One equivalence class of 2-cocycles.
#[derive(Debug, Clone)]
pub struct H2Class {
    pub representative: Cocycle2,
    pub is_unit: bool,
    pub is_neutral: bool,
}

/// The set of classes over a fixed cover, unit class first.
#[derive(Debug, Clone)]
pub struct H2Set {
    pub classes: Vec<H2Class>,
    /// Cocycles enumerated in the gauge slice before partitioning.
    pub slice_size: usize,
    /// Whether the dominated-cover fast path was used.
    pub used_root_gauge: bool,
}

/// Enumerates H² over the cover: all cocycles of a gauge slice that meets
/// every equivalence class, partitioned by the coboundary search.
///
/// Every class contains a normalized cocycle (π_ii = 1, a_iii = 1): the
/// explicit datum with β_ii = a_iii⁻¹ achieves this, using ρ(a_iii) = π_ii
/// from (C1).  When some member r dominates every pairwise meet
/// (U_i∧U_j ≤ U_r for i ≠ j), further data can be gauged away inside each
/// class: β_ij solves a′_rij = 1 in A(U_i∧U_j) = A(U_r∧U_i∧U_j), β_ir solves
/// a′_rir = 1, and β_ri shifts π_ri across im(ρ)-cosets.  The remaining (C1)
/// and (C2) instances force every other slot, so the slice is exactly the
/// transversal tuples that validate.  Without a dominating member the
/// normalized slice is enumerated by guarded DFS with fiber propagation.
pub fn h2_classes(
    site: &FiniteSite,
    phi: &CrossedSheaf,
    geom: &CoverGeometry,
    budget: &Budget,
) -> Result<H2Set> {
    h2_classes_impl(site, phi, geom, budget, false)
}

pub(crate) fn h2_classes_impl(
    site: &FiniteSite,
    phi: &CrossedSheaf,
    geom: &CoverGeometry,
    budget: &Budget,
    force_dfs: bool,
) -> Result<H2Set> {
    let root = if force_dfs {
        None
    } else {
        dominating_member(site, geom)
    };
    let slice = match root {
        Some(r) => root_gauge_slice(site, phi, geom, r, budget)?,
        None => normalized_slice_dfs(site, phi, geom, budget)?,
    };
    let slice_size = slice.len();
    // partition by the coboundary search
    let mut reps: Vec<Cocycle2> = Vec::new();
    for c in slice {
        let mut known = false;
        for rep in &reps {
            if cocycles_equivalent(site, phi, geom, rep, &c, budget)?.is_some() {
                known = true;
                break;
            }
        }
        if !known {
            reps.push(c);
        }
    }
    // unit class first
    let unit = unit_cocycle(site, phi, geom);
    let mut unit_pos = None;
    for (n, r) in reps.iter().enumerate() {
        if cocycles_equivalent(site, phi, geom, r, &unit, budget)?.is_some() {
            unit_pos = Some(n);
            break;
        }
    }
    let unit_pos = unit_pos
        .ok_or_else(|| Error::InvalidCocycle("unit class missing from the slice".into()))?;
    let first = reps.remove(unit_pos);
    reps.insert(0, first);
    let mut classes = Vec::new();
    for (n, rep) in reps.into_iter().enumerate() {
        let is_unit = n == 0;
        let is_neutral = if is_unit {
            true
        } else {
            neutralizing_coboundary(site, phi, geom, &rep, budget)?.is_some()
        };
        classes.push(H2Class {
            representative: rep,
            is_unit,
            is_neutral,
        });
    }
    Ok(H2Set {
        classes,
        slice_size,
        used_root_gauge: root.is_some(),
    })
}

/// A member whose object dominates every pairwise meet of the other members.
fn dominating_member(site: &FiniteSite, geom: &CoverGeometry) -> Option<usize> {
    (0..geom.len()).find(|&r| {
        (0..geom.len()).all(|i| {
            (0..geom.len()).all(|j| {
                i == j
                    || i == r
                    || j == r
                    || match geom.pair[i][j] {
                        None => true,
                        Some(m) => site.leq(m, geom.member(r)),
                    }
            })
        })
    })
}

/// The root-gauge slice: π_ri ranges over a transversal of im(ρ)-cosets,
/// everything else is pinned; candidates failing validation are dropped.
fn root_gauge_slice(
    site: &FiniteSite,
    phi: &CrossedSheaf,
    geom: &CoverGeometry,
    r: usize,
    budget: &Budget,
) -> Result<Vec<Cocycle2>> {
    let slots: Vec<usize> = (0..geom.len())
        .filter(|&i| i != r && geom.pair[r][i].is_some())
        .collect();
    let mut transversals: Vec<Vec<usize>> = Vec::new();
    for &i in &slots {
        let m = geom.pair[r][i].unwrap();
        let gp = phi.pi.group(m);
        let image: Vec<usize> = {
            let mut im: Vec<usize> = (0..phi.a.size(m)).map(|x| phi.rho(m, x)).collect();
            im.sort();
            im.dedup();
            im
        };
        let mut seen = vec![false; gp.order()];
        let mut reps = Vec::new();
        for x in gp.elements() {
            if seen[x] {
                continue;
            }
            reps.push(x);
            for &g in &image {
                seen[gp.mul(g, x)] = true;
            }
        }
        transversals.push(reps);
    }
    let space: u128 = transversals.iter().map(|t| t.len() as u128).product();
    budget.check("dominated-cover slice", space)?;
    let mut out = Vec::new();
    let mut choice = vec![0usize; slots.len()];
    loop {
        let candidate = build_root_candidate(site, phi, geom, r, &slots, &transversals, &choice);
        if let Some(c) = candidate {
            if validate_cocycle(site, phi, geom, &c)?.is_ok() {
                out.push(c);
            }
        }
        let mut k = 0;
        loop {
            if k == slots.len() {
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < transversals[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn build_root_candidate(
    site: &FiniteSite,
    phi: &CrossedSheaf,
    geom: &CoverGeometry,
    r: usize,
    slots: &[usize],
    transversals: &[Vec<usize>],
    choice: &[usize],
) -> Option<Cocycle2> {
    let mut pi: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (n, &i) in slots.iter().enumerate() {
        let m = geom.pair[r][i].unwrap();
        let value = transversals[n][choice[n]];
        pi.insert((r, i), value);
        pi.insert((i, r), phi.pi.group(m).inv(value));
    }
    for i in 0..geom.len() {
        if geom.pair[i][i].is_some() {
            pi.insert((i, i), phi.pi.one(geom.member(i)));
        }
    }
    for (i, j) in geom.pairs() {
        if pi.contains_key(&(i, j)) {
            continue;
        }
        // forced by (C1) on (r, i, j) with a_rij = 1: π_ij = π_ri⁻¹ π_rj
        let m = geom.pair[i][j]?;
        let gp = phi.pi.group(m);
        let pri = phi.pi.res(geom.pair[r][i]?, m, pi[&(r, i)]);
        let prj = phi.pi.res(geom.pair[r][j]?, m, pi[&(r, j)]);
        pi.insert((i, j), gp.mul(gp.inv(pri), prj));
    }
    let mut a = BTreeMap::new();
    for (i, j, k) in geom.triples() {
        let m = geom.triple[i][j][k].unwrap();
        a.insert((i, j, k), phi.a.one(m));
    }
    let _ = site;
    Some(Cocycle2 {
        cover: geom.cover.clone(),
        pi,
        a,
    })
}

/// Guarded DFS over the normalized slice: diagonal slots pinned, π assigned
/// pair by pair, a-slots drawn from the ρ-fiber prescribed by (C1) and pruned
/// by every fully-assigned (C2) instance.
fn normalized_slice_dfs(
    site: &FiniteSite,
    phi: &CrossedSheaf,
    geom: &CoverGeometry,
    budget: &Budget,
) -> Result<Vec<Cocycle2>> {
    let pairs = geom.pairs();
    let off_diag: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(i, j)| i != j).collect();
    let mut estimate: u128 = 1;
    for &(i, j) in &off_diag {
        estimate = estimate.saturating_mul(phi.pi.size(geom.pair[i][j].unwrap()) as u128);
    }
    let fibers = RhoFibers::new(site, phi);
    let kernel: u128 = geom
        .triples()
        .iter()
        .map(|&(i, j, k)| fibers.kernel_size(geom.triple[i][j][k].unwrap()) as u128)
        .product();
    budget.check("normalized-slice DFS", estimate.saturating_mul(kernel))?;
    let mut out = Vec::new();
    let mut pi: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for i in 0..geom.len() {
        if geom.pair[i][i].is_some() {
            pi.insert((i, i), phi.pi.one(geom.member(i)));
        }
    }
    dfs_pi(site, phi, geom, &off_diag, 0, &mut pi, &fibers, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs_pi(
    site: &FiniteSite,
    phi: &CrossedSheaf,
    geom: &CoverGeometry,
    off_diag: &[(usize, usize)],
    n: usize,
    pi: &mut BTreeMap<(usize, usize), usize>,
    fibers: &RhoFibers,
    out: &mut Vec<Cocycle2>,
) -> Result<()> {
    if n == off_diag.len() {
        // assign a-slots from ρ-fibers with (C2) pruning
        let triples = geom.triples();
        let mut a: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
        // degenerate slots are forced to the identity in the normalized slice
        let mut free: Vec<(usize, usize, usize)> = Vec::new();
        for &(i, j, k) in &triples {
            let m = geom.triple[i][j][k].unwrap();
            if i == j || j == k {
                a.insert((i, j, k), phi.a.one(m));
            } else {
                free.push((i, j, k));
            }
        }
        let candidate = Cocycle2 {
            cover: geom.cover.clone(),
            pi: pi.clone(),
            a: BTreeMap::new(),
        };
        dfs_a(site, phi, geom, &candidate, &free, 0, &mut a, fibers, out);
        return Ok(());
    }
    let (i, j) = off_diag[n];
    let m = geom.pair[i][j].unwrap();
    for value in 0..phi.pi.size(m) {
        pi.insert((i, j), value);
        dfs_pi(site, phi, geom, off_diag, n + 1, pi, fibers, out)?;
    }
    pi.remove(&(i, j));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn dfs_a(
    site: &FiniteSite,
    phi: &CrossedSheaf,
    geom: &CoverGeometry,
    shell: &Cocycle2,
    free: &[(usize, usize, usize)],
    n: usize,
    a: &mut BTreeMap<(usize, usize, usize), usize>,
    fibers: &RhoFibers,
    out: &mut Vec<Cocycle2>,
) {
    if n == free.len() {
        let candidate = Cocycle2 {
            cover: shell.cover.clone(),
            pi: shell.pi.clone(),
            a: a.clone(),
        };
        if let Ok(Ok(())) = validate_cocycle(site, phi, geom, &candidate) {
            out.push(candidate);
        }
        return;
    }
    let (i, j, k) = free[n];
    let m = geom.triple[i][j][k].unwrap();
    let gp = phi.pi.group(m);
    let with_pi = Cocycle2 {
        cover: shell.cover.clone(),
        pi: shell.pi.clone(),
        a: BTreeMap::new(),
    };
    let pij = restrict_pi(site, phi, geom, &with_pi, i, j, m);
    let pjk = restrict_pi(site, phi, geom, &with_pi, j, k, m);
    let pik = restrict_pi(site, phi, geom, &with_pi, i, k, m);
    let target = gp.mul(gp.mul(pij, pjk), gp.inv(pik));
    for &value in fibers.fiber(m, target) {
        a.insert((i, j, k), value);
        if partial_c2_ok(site, phi, geom, shell, a) {
            dfs_a(site, phi, geom, shell, free, n + 1, a, fibers, out);
        }
        a.remove(&(i, j, k));
    }
}

/// Checks every (C2) instance whose four a-slots are assigned.
fn partial_c2_ok(
    site: &FiniteSite,
    phi: &CrossedSheaf,
    geom: &CoverGeometry,
    shell: &Cocycle2,
    a: &BTreeMap<(usize, usize, usize), usize>,
) -> bool {
    let k_len = geom.len();
    let with_pi = Cocycle2 {
        cover: shell.cover.clone(),
        pi: shell.pi.clone(),
        a: BTreeMap::new(),
    };
    for i in 0..k_len {
        for j in 0..k_len {
            for k in 0..k_len {
                for l in 0..k_len {
                    let Some(m) = geom.quad(site, i, j, k, l) else {
                        continue;
                    };
                    let (Some(&aijk), Some(&aikl), Some(&ajkl), Some(&aijl)) = (
                        a.get(&(i, j, k)),
                        a.get(&(i, k, l)),
                        a.get(&(j, k, l)),
                        a.get(&(i, j, l)),
                    ) else {
                        continue;
                    };
                    let ga = phi.a.group(m);
                    let r = |t: (usize, usize, usize), v: usize| {
                        phi.a.res(geom.triple[t.0][t.1][t.2].unwrap(), m, v)
                    };
                    let pij = restrict_pi(site, phi, geom, &with_pi, i, j, m);
                    let lhs = ga.mul(r((i, j, k), aijk), r((i, k, l), aikl));
                    let rhs = ga.mul(phi.act(m, pij, r((j, k, l), ajkl)), r((i, j, l), aijl));
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Finds the class of a cocycle among the set's representatives.
pub fn classify(
    site: &FiniteSite,
    phi: &CrossedSheaf,
    geom: &CoverGeometry,
    set: &H2Set,
    c: &Cocycle2,
    budget: &Budget,
) -> Result<Option<usize>> {
    for (n, class) in set.classes.iter().enumerate() {
        if cocycles_equivalent(site, phi, geom, &class.representative, c, budget)?.is_some() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Whether a cocycle is neutral: some equivalent cocycle has a ≡ 1.
pub fn is_neutral(
    site: &FiniteSite,
    phi: &CrossedSheaf,
    geom: &CoverGeometry,
    c: &Cocycle2,
    budget: &Budget,
) -> Result<bool> {
    Ok(neutralizing_coboundary(site, phi, geom, c, budget)?.is_some())
}

/// Pushforward of a cocycle along a crossed morphism:
/// π′ = φ(π), a′ = f(a); validity is forced by the morphism conditions.
pub fn map_h2(
    site: &FiniteSite,
    src: &CrossedSheaf,
    dst: &CrossedSheaf,
    m: &CrossedMorphism,
    geom: &CoverGeometry,
    c: &Cocycle2,
) -> Result<Cocycle2> {
    let mut pi = BTreeMap::new();
    for (i, j) in geom.pairs() {
        let meet = geom.pair[i][j].unwrap();
        pi.insert((i, j), m.varphi.apply(meet, c.pi[&(i, j)]));
    }
    let mut a = BTreeMap::new();
    for (i, j, k) in geom.triples() {
        let meet = geom.triple[i][j][k].unwrap();
        a.insert((i, j, k), m.f.apply(meet, c.a[&(i, j, k)]));
    }
    let moved = Cocycle2 {
        cover: geom.cover.clone(),
        pi,
        a,
    };
    if let Err(witness) = validate_cocycle(site, dst, geom, &moved)? {
        return Err(Error::InvalidCocycle(format!(
            "pushforward failed validation: {witness}"
        )));
    }
    let _ = src;
    Ok(moved)
}

/// Pushforward of a coboundary datum along a crossed morphism; used to show
/// that map_h2 descends to classes.
pub fn map_coboundary(
    geom: &CoverGeometry,
    m: &CrossedMorphism,
    d: &super::cocycle::CoboundaryData,
) -> super::cocycle::CoboundaryData {
    let b = (0..geom.len())
        .map(|i| m.varphi.apply(geom.member(i), d.b[i]))
        .collect();
    let beta = geom
        .pairs()
        .into_iter()
        .map(|(i, j)| {
            let meet = geom.pair[i][j].unwrap();
            ((i, j), m.f.apply(meet, d.beta[&(i, j)]))
        })
        .collect();
    super::cocycle::CoboundaryData { b, beta }
}

/// The second coboundary: the descent data of the gerbe of liftings of an
/// A″-torsor along a short exact sequence of crossed sheaves.
///
/// The torsor is trivialized over the cover (every member must carry a
/// section), its transition cocycle is lifted through h, and the failure of
/// the lift to be a cocycle is measured in A:
/// π_ij = φ⁻¹(ρ′(a′_ij)), a_ijk = f⁻¹(a′_ij a′_jk a′_ik⁻¹).
/// `chooser` picks among sections and lifts, so independence of all choices
/// can be exercised.
pub fn coboundary2(
    site: &FiniteSite,
    seq: &CrossedSequence,
    torsor: &ActionSheaf,
    geom: &CoverGeometry,
    chooser: &mut dyn FnMut(usize) -> usize,
) -> Result<Cocycle2> {
    if torsor.group.groups != seq.right.a.groups {
        return Err(Error::GroupMismatch(
            "second coboundary expects a torsor under the right-hand sheaf".into(),
        ));
    }
    // sections over every member
    let mut sections = Vec::with_capacity(geom.len());
    for i in 0..geom.len() {
        let u = geom.member(i);
        let size = torsor.carrier.size(u);
        if size == 0 {
            return Err(Error::Unliftable(format!(
                "the torsor has no section over cover member {}",
                site.name(u)
            )));
        }
        sections.push(chooser(size) % size);
    }
    // transition cocycle c_ij ∈ A″(U_ij): res(p_i)·c_ij = res(p_j)
    let mut transitions: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (i, j) in geom.pairs() {
        let m = geom.pair[i][j].unwrap();
        let pi_ = torsor.carrier.res(geom.member(i), m, sections[i]);
        let pj = torsor.carrier.res(geom.member(j), m, sections[j]);
        let g = torsor
            .translator(m, pi_, pj)
            .ok_or_else(|| Error::InvalidAction("torsor action is not transitive".into()))?;
        transitions.insert((i, j), g);
    }
    // lift through h
    let h = &seq.proj.f;
    let mut lifts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (i, j) in geom.pairs() {
        let m = geom.pair[i][j].unwrap();
        let preimages: Vec<usize> = (0..seq.mid.a.size(m))
            .filter(|&x| h.apply(m, x) == transitions[&(i, j)])
            .collect();
        if preimages.is_empty() {
            return Err(Error::Unliftable(format!(
                "transition over {} does not lift through h; a finer trivialization does not \
                 exist on this site",
                site.name(m)
            )));
        }
        let pick = chooser(preimages.len()) % preimages.len();
        lifts.insert((i, j), preimages[pick]);
    }
    // φ is an isomorphism: invert it objectwise
    let varphi_inv: Vec<Vec<usize>> = site
        .objects()
        .map(|u| {
            let mut inv = vec![usize::MAX; seq.mid.pi.size(u)];
            for p in 0..seq.left.pi.size(u) {
                inv[seq.incl.varphi.apply(u, p)] = p;
            }
            inv
        })
        .collect();
    let mut pi = BTreeMap::new();
    for (i, j) in geom.pairs() {
        let m = geom.pair[i][j].unwrap();
        let rho_prime = seq.mid.rho(m, lifts[&(i, j)]);
        let value = varphi_inv[m][rho_prime];
        if value == usize::MAX {
            return Err(Error::InvalidCrossed("φ is not surjective".into()));
        }
        pi.insert((i, j), value);
    }
    // a_ijk = f⁻¹(a′_ij · a′_jk · a′_ik⁻¹) on the triple meet
    let f = &seq.incl.f;
    let mut a = BTreeMap::new();
    for (i, j, k) in geom.triples() {
        let m = geom.triple[i][j][k].unwrap();
        let ga = seq.mid.a.group(m);
        let r = |pair: (usize, usize)| {
            seq.mid
                .a
                .res(geom.pair[pair.0][pair.1].unwrap(), m, lifts[&pair])
        };
        let w = ga.mul(ga.mul(r((i, j)), r((j, k))), ga.inv(r((i, k))));
        let x = (0..seq.left.a.size(m))
            .find(|&x| f.apply(m, x) == w)
            .ok_or_else(|| {
                Error::InvalidCocycle(
                    "lift defect does not lie in the image of f; the sequence is not exact".into(),
                )
            })?;
        a.insert((i, j, k), x);
    }
    let c = Cocycle2 {
        cover: geom.cover.clone(),
        pi,
        a,
    };
    if let Err(witness) = validate_cocycle(site, &seq.left, geom, &c)? {
        return Err(Error::InvalidCocycle(format!(
            "lifting cocycle failed validation: {witness}"
        )));
    }
    Ok(c)
}

/// Product of two cocycles for abelian coefficients with trivial Π; the
/// class set is then a group under this operation.
pub fn pointwise_product(
    site: &FiniteSite,
    phi: &CrossedSheaf,
    geom: &CoverGeometry,
    c1: &Cocycle2,
    c2: &Cocycle2,
) -> Result<Cocycle2> {
    if !phi.a.is_abelian() || site.objects().any(|u| phi.pi.size(u) != 1) {
        return Err(Error::InvalidCocycle(
            "pointwise product needs abelian coefficients with trivial Π".into(),
        ));
    }
    let mut pi = BTreeMap::new();
    for (i, j) in geom.pairs() {
        pi.insert((i, j), 0);
    }
    let mut a = BTreeMap::new();
    for (i, j, k) in geom.triples() {
        let m = geom.triple[i][j][k].unwrap();
        a.insert((i, j, k), phi.a.mul(m, c1.a[&(i, j, k)], c2.a[&(i, j, k)]));
    }
    Ok(Cocycle2 {
        cover: geom.cover.clone(),
        pi,
        a,
    })
}

#[cfg(test)]
mod tests {
    use super::super::cocycle::apply_coboundary_unchecked;
    use super::*;
    use crate::group::FinGroup;
    use crate::presheaf::{constant_group_sheaf, trivial_group_sheaf, GroupPresheaf, SetMorphism};
    use crate::site::Obj;
    use crate::site::{point_site, pseudo_circle_site, Cover};
    use std::collections::BTreeMap as Map;

    fn two_member_geometry(site: &FiniteSite) -> CoverGeometry {
        let top = site.require_top().unwrap();
        let c = site.object_by_name("a,b,c").unwrap();
        let d = site.object_by_name("a,b,d").unwrap();
        CoverGeometry::new(
            site,
            &Cover {
                target: top,
                members: vec![c, d],
            },
        )
        .unwrap()
    }

    #[test]
    fn point_h2_is_a_singleton_for_every_coefficient() {
        let site = point_site();
        let budget = Budget::default();
        for base in [FinGroup::cyclic(2), FinGroup::cyclic(4)] {
            let a = constant_group_sheaf(&site, &base, &budget).unwrap();
            let phi = CrossedSheaf::with_trivial_pi(&site, &a);
            let top = site.require_top().unwrap();
            let geom = CoverGeometry::new(
                &site,
                &Cover {
                    target: top,
                    members: vec![top],
                },
            )
            .unwrap();
            let set = h2_classes(&site, &phi, &geom, &budget).unwrap();
            assert_eq!(set.classes.len(), 1);
            assert!(set.classes[0].is_unit);
            assert!(set.classes[0].is_neutral);
        }
        let a = constant_group_sheaf(&site, &FinGroup::symmetric3(), &budget).unwrap();
        let phi = crate::crossed::int_crossed(&site, &a, &budget).unwrap();
        let top = site.require_top().unwrap();
        let geom = CoverGeometry::new(
            &site,
            &Cover {
                target: top,
                members: vec![top],
            },
        )
        .unwrap();
        let set = h2_classes(&site, &phi, &geom, &budget).unwrap();
        assert_eq!(set.classes.len(), 1);
    }

    #[test]
    fn pseudo_circle_two_member_abelian_h2_is_trivial() {
        let site = pseudo_circle_site();
        let budget = Budget::default();
        for base in [FinGroup::cyclic(2), FinGroup::cyclic(4)] {
            let a = constant_group_sheaf(&site, &base, &budget).unwrap();
            let phi = CrossedSheaf::with_trivial_pi(&site, &a);
            let geom = two_member_geometry(&site);
            let set = h2_classes(&site, &phi, &geom, &budget).unwrap();
            assert_eq!(set.classes.len(), 1);
        }
    }

    /// Crossed sheaf with ρ = 0: A = Z/2 with Π = Z/2 acting trivially.
    fn rho_zero_fixture(site: &FiniteSite, budget: &Budget) -> CrossedSheaf {
        let a = constant_group_sheaf(site, &FinGroup::cyclic(2), budget).unwrap();
        let pi = constant_group_sheaf(site, &FinGroup::cyclic(2), budget).unwrap();
        let rho = SetMorphism {
            maps: site.objects().map(|u| vec![pi.one(u); a.size(u)]).collect(),
        };
        let phi_tables = site
            .objects()
            .map(|u| vec![(0..a.size(u)).collect::<Vec<_>>(); pi.size(u)])
            .collect();
        CrossedSheaf {
            a,
            pi,
            rho,
            phi: phi_tables,
        }
    }

    #[test]
    fn rho_zero_fixture_has_two_classes_and_dfs_agrees_with_root_gauge() {
        // H² here sees Čech H¹ of Π: the two-member cover of the circle
        // carries a nontrivial class, so an over-eager gauge would be caught
        let site = pseudo_circle_site();
        let budget = Budget::default();
        let phi = rho_zero_fixture(&site, &budget);
        assert!(crate::crossed::check_crossed(&site, &phi, &budget)
            .unwrap()
            .ok());
        let geom = two_member_geometry(&site);
        let fast = h2_classes_impl(&site, &phi, &geom, &budget, false).unwrap();
        let slow = h2_classes_impl(&site, &phi, &geom, &budget, true).unwrap();
        assert!(fast.used_root_gauge);
        assert!(!slow.used_root_gauge);
        assert_eq!(fast.classes.len(), 2);
        assert_eq!(slow.classes.len(), 2);
        // representatives pair up under equivalence
        for c in &fast.classes {
            assert_eq!(
                slow.classes
                    .iter()
                    .filter(|d| {
                        cocycles_equivalent(
                            &site,
                            &phi,
                            &geom,
                            &c.representative,
                            &d.representative,
                            &budget,
                        )
                        .unwrap()
                        .is_some()
                    })
                    .count(),
                1
            );
        }
    }

    #[test]
    fn gauge_and_dfs_agree_for_inner_s3_on_the_two_member_cover() {
        let site = pseudo_circle_site();
        let budget = Budget::default();
        let a = constant_group_sheaf(&site, &FinGroup::symmetric3(), &budget).unwrap();
        let phi = crate::crossed::int_crossed(&site, &a, &budget).unwrap();
        let geom = two_member_geometry(&site);
        let fast = h2_classes_impl(&site, &phi, &geom, &budget, false).unwrap();
        let slow = h2_classes_impl(&site, &phi, &geom, &budget, true).unwrap();
        assert_eq!(fast.classes.len(), slow.classes.len());
    }

    #[test]
    fn minimal_cover_of_pseudo_circle_has_a_dominating_member() {
        let site = pseudo_circle_site();
        let top = site.require_top().unwrap();
        let geom = CoverGeometry::new(&site, &site.minimal_cover(top).unwrap()).unwrap();
        let r = dominating_member(&site, &geom).unwrap();
        assert_eq!(site.name(geom.member(r)), "a,b,c");
    }

    #[test]
    fn pushforward_of_unit_is_unit_and_composition_law_holds() {
        let site = pseudo_circle_site();
        let budget = Budget::default();
        let z2 = constant_group_sheaf(&site, &FinGroup::cyclic(2), &budget).unwrap();
        let z4 = constant_group_sheaf(&site, &FinGroup::cyclic(4), &budget).unwrap();
        let phi2 = CrossedSheaf::with_trivial_pi(&site, &z2);
        let phi4 = CrossedSheaf::with_trivial_pi(&site, &z4);
        let geom = two_member_geometry(&site);
        // f: Z/2 → Z/4 doubling, g: Z/4 → Z/4 squaring
        let double = constant_hom(&site, &z2, &z4, &[0, 2]);
        let square = constant_hom(&site, &z4, &z4, &[0, 2, 0, 2]);
        let trivial_pi_map = SetMorphism {
            maps: site.objects().map(|_| vec![0]).collect(),
        };
        let m1 = CrossedMorphism {
            f: double,
            varphi: trivial_pi_map.clone(),
        };
        let m2 = CrossedMorphism {
            f: square,
            varphi: trivial_pi_map,
        };
        let set = h2_classes(&site, &phi2, &geom, &budget).unwrap();
        for class in &set.classes {
            let once = map_h2(&site, &phi2, &phi4, &m1, &geom, &class.representative).unwrap();
            let twice = map_h2(&site, &phi4, &phi4, &m2, &geom, &once).unwrap();
            let composed = m1.compose(&m2);
            let direct =
                map_h2(&site, &phi2, &phi4, &composed, &geom, &class.representative).unwrap();
            assert_eq!(twice, direct);
        }
        // unit maps to unit
        let unit = unit_cocycle(&site, &phi2, &geom);
        let moved = map_h2(&site, &phi2, &phi4, &m1, &geom, &unit).unwrap();
        assert_eq!(moved, unit_cocycle(&site, &phi4, &geom));
    }

    /// Builds a sheaf morphism between constant sheaves from a base-group map
    /// by matching irreducible coordinates through labels.
    pub(crate) fn constant_hom(
        site: &FiniteSite,
        src: &GroupPresheaf,
        dst: &GroupPresheaf,
        base_map: &[usize],
    ) -> SetMorphism {
        let irr = site.irreducibles();
        let maps = site
            .objects()
            .map(|u| {
                let members: Vec<_> = irr.iter().copied().filter(|&v| site.leq(v, u)).collect();
                let dst_index: Map<Vec<usize>, usize> = (0..dst.size(u))
                    .map(|y| {
                        (
                            members
                                .iter()
                                .map(|&v| dst.res(u, v, y))
                                .collect::<Vec<_>>(),
                            y,
                        )
                    })
                    .collect();
                (0..src.size(u))
                    .map(|x| {
                        let image: Vec<usize> = members
                            .iter()
                            .map(|&v| {
                                // at an irreducible the constant sheaf is the
                                // base group up to the label bijection
                                let base_elt = base_label_index(src, v, src.res(u, v, x));
                                dst_elt_with_base(dst, v, base_map[base_elt])
                            })
                            .collect();
                        dst_index[&image]
                    })
                    .collect()
            })
            .collect();
        SetMorphism { maps }
    }

    fn base_label_index(sheaf: &GroupPresheaf, v: Obj, x: usize) -> usize {
        // constant sheaves are relabelled by base labels on irreducibles
        sheaf.group(v).label(x).parse().unwrap()
    }

    fn dst_elt_with_base(sheaf: &GroupPresheaf, v: Obj, base: usize) -> usize {
        sheaf.group(v).index_of(&base.to_string()).unwrap()
    }

    #[test]
    fn map_h2_commutes_with_coboundaries() {
        let site = pseudo_circle_site();
        let budget = Budget::default();
        let z2 = constant_group_sheaf(&site, &FinGroup::cyclic(2), &budget).unwrap();
        let z4 = constant_group_sheaf(&site, &FinGroup::cyclic(4), &budget).unwrap();
        let phi2 = CrossedSheaf::with_trivial_pi(&site, &z2);
        let phi4 = CrossedSheaf::with_trivial_pi(&site, &z4);
        let geom = two_member_geometry(&site);
        let m = CrossedMorphism {
            f: constant_hom(&site, &z2, &z4, &[0, 2]),
            varphi: SetMorphism {
                maps: site.objects().map(|_| vec![0]).collect(),
            },
        };
        let c = unit_cocycle(&site, &phi2, &geom);
        for seed in 0..6usize {
            let mut beta = Map::new();
            for (n, (i, j)) in geom.pairs().into_iter().enumerate() {
                let meet = geom.pair[i][j].unwrap();
                beta.insert((i, j), (seed + n) % phi2.a.size(meet));
            }
            let d = super::super::cocycle::CoboundaryData {
                b: vec![0; geom.len()],
                beta,
            };
            let moved = apply_coboundary_unchecked(&site, &phi2, &geom, &c, &d);
            let push_then = map_h2(&site, &phi2, &phi4, &m, &geom, &moved).unwrap();
            let then_push = apply_coboundary_unchecked(
                &site,
                &phi4,
                &geom,
                &map_h2(&site, &phi2, &phi4, &m, &geom, &c).unwrap(),
                &map_coboundary(&geom, &m, &d),
            );
            assert_eq!(push_then, then_push);
        }
    }

    #[test]
    fn trivial_pi_sheaf_helper_is_consistent() {
        let site = pseudo_circle_site();
        let t = trivial_group_sheaf(&site);
        assert!(site.objects().all(|u| t.size(u) == 1));
    }
}
