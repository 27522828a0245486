//! Presheaves and sheaves of finite sets and groups on a finite site.
//!
//! Values are element tables per object; restriction maps are index maps.
//! Matching families are enumerated by backtracking, and sheafification is the
//! plus construction applied twice.  On a poset-of-opens site the minimal
//! cover of an object refines every covering family, so each plus pass
//! evaluates to the matching families over that cover.

use crate::error::{Budget, Error, Result};
use crate::group::FinGroup;
use crate::site::{Cover, FiniteSite, Obj};
use std::collections::BTreeMap;

/// A presheaf of finite sets: element labels per object plus restriction
/// index maps for every comparable pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetPresheaf {
    pub values: Vec<Vec<String>>,
    /// `res[&(u, v)][x]` for v ≤ u is the restriction of element x.
    pub res: BTreeMap<(Obj, Obj), Vec<usize>>,
}

impl SetPresheaf {
    pub fn size(&self, u: Obj) -> usize {
        self.values[u].len()
    }

    pub fn res(&self, u: Obj, v: Obj, x: usize) -> usize {
        if u == v {
            return x;
        }
        self.res[&(u, v)][x]
    }

    pub fn label(&self, u: Obj, x: usize) -> &str {
        &self.values[u][x]
    }

    /// Functoriality check: identity restrictions and contravariant
    /// composition along ≤.
    pub fn check(&self, site: &FiniteSite) -> Result<()> {
        let n = site.object_count();
        if self.values.len() != n {
            return Err(Error::InvalidPresheaf(format!(
                "value table covers {} of {} objects",
                self.values.len(),
                n
            )));
        }
        for u in site.objects() {
            for v in site.objects() {
                if !site.leq(v, u) {
                    continue;
                }
                let map = self.res.get(&(u, v)).ok_or_else(|| {
                    Error::InvalidPresheaf(format!(
                        "missing restriction {} → {}",
                        site.name(u),
                        site.name(v)
                    ))
                })?;
                if map.len() != self.size(u) || map.iter().any(|&y| y >= self.size(v)) {
                    return Err(Error::InvalidPresheaf(format!(
                        "restriction {} → {} is not a function into the target",
                        site.name(u),
                        site.name(v)
                    )));
                }
                if u == v && map.iter().enumerate().any(|(x, &y)| x != y) {
                    return Err(Error::InvalidPresheaf(format!(
                        "restriction at {} is not the identity",
                        site.name(u)
                    )));
                }
            }
        }
        for u in site.objects() {
            for v in site.objects().filter(|&v| site.leq(v, u)) {
                for w in site.objects().filter(|&w| site.leq(w, v)) {
                    for x in 0..self.size(u) {
                        if self.res(v, w, self.res(u, v, x)) != self.res(u, w, x) {
                            return Err(Error::InvalidPresheaf(format!(
                                "restrictions do not compose along {} ≥ {} ≥ {}",
                                site.name(u),
                                site.name(v),
                                site.name(w)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// All matching families of the presheaf over a cover: tuples
    /// (s_i ∈ P(U_i)) whose restrictions agree on every nonempty pairwise
    /// meet.  Backtracking with early pairwise pruning.
    pub fn matching_families(
        &self,
        site: &FiniteSite,
        cover: &Cover,
        budget: &Budget,
    ) -> Result<Vec<Vec<usize>>> {
        let k = cover.members.len();
        let mut out = Vec::new();
        let mut partial: Vec<usize> = Vec::with_capacity(k);
        let mut nodes: u64 = 0;
        self.match_rec(site, cover, &mut partial, &mut out, &mut nodes, budget)?;
        Ok(out)
    }

    fn match_rec(
        &self,
        site: &FiniteSite,
        cover: &Cover,
        partial: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        nodes: &mut u64,
        budget: &Budget,
    ) -> Result<()> {
        if partial.len() == cover.members.len() {
            out.push(partial.clone());
            return Ok(());
        }
        let i = partial.len();
        let ui = cover.members[i];
        for x in 0..self.size(ui) {
            *nodes += 1;
            if *nodes > budget.max_nodes {
                return Err(Error::BoundExceeded {
                    what: "matching-family enumeration".into(),
                    estimate: *nodes as u128,
                    bound: budget.max_nodes,
                });
            }
            let compatible = (0..i).all(|j| {
                let uj = cover.members[j];
                match site.meet(ui, uj) {
                    None => true,
                    Some(m) => self.res(ui, m, x) == self.res(uj, m, partial[j]),
                }
            });
            if compatible {
                partial.push(x);
                self.match_rec(site, cover, partial, out, nodes, budget)?;
                partial.pop();
            }
        }
        Ok(())
    }
}

/// A presheaf of finite groups: one multiplication table per object, with
/// restriction maps that must be homomorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresheaf {
    pub groups: Vec<FinGroup>,
    pub res: BTreeMap<(Obj, Obj), Vec<usize>>,
}

impl GroupPresheaf {
    pub fn group(&self, u: Obj) -> &FinGroup {
        &self.groups[u]
    }

    pub fn size(&self, u: Obj) -> usize {
        self.groups[u].order()
    }

    pub fn res(&self, u: Obj, v: Obj, x: usize) -> usize {
        if u == v {
            return x;
        }
        self.res[&(u, v)][x]
    }

    pub fn one(&self, u: Obj) -> usize {
        self.groups[u].one
    }

    pub fn mul(&self, u: Obj, x: usize, y: usize) -> usize {
        self.groups[u].mul(x, y)
    }

    pub fn inv(&self, u: Obj, x: usize) -> usize {
        self.groups[u].inv(x)
    }

    pub fn as_set_presheaf(&self) -> SetPresheaf {
        SetPresheaf {
            values: self.groups.iter().map(|g| g.labels.clone()).collect(),
            res: self.res.clone(),
        }
    }

    pub fn check(&self, site: &FiniteSite) -> Result<()> {
        self.as_set_presheaf().check(site)?;
        for (&(u, v), map) in &self.res {
            let src = &self.groups[u];
            let dst = &self.groups[v];
            for x in src.elements() {
                for y in src.elements() {
                    if map[src.mul(x, y)] != dst.mul(map[x], map[y]) {
                        return Err(Error::InvalidPresheaf(format!(
                            "restriction {} → {} is not a homomorphism",
                            site.name(u),
                            site.name(v)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_abelian(&self) -> bool {
        self.groups.iter().all(|g| g.is_abelian())
    }
}

/// A morphism of set presheaves: one map per object, natural in restrictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetMorphism {
    pub maps: Vec<Vec<usize>>,
}

impl SetMorphism {
    pub fn apply(&self, u: Obj, x: usize) -> usize {
        self.maps[u][x]
    }

    pub fn check(&self, site: &FiniteSite, src: &SetPresheaf, dst: &SetPresheaf) -> Result<()> {
        for u in site.objects() {
            if self.maps[u].len() != src.size(u) || self.maps[u].iter().any(|&y| y >= dst.size(u)) {
                return Err(Error::InvalidPresheaf(format!(
                    "morphism component at {} has wrong shape",
                    site.name(u)
                )));
            }
        }
        for u in site.objects() {
            for v in site.objects().filter(|&v| site.leq(v, u)) {
                for x in 0..src.size(u) {
                    if dst.res(u, v, self.apply(u, x)) != self.apply(v, src.res(u, v, x)) {
                        return Err(Error::InvalidPresheaf(format!(
                            "morphism not natural along {} ≥ {}",
                            site.name(u),
                            site.name(v)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_iso(&self, src: &SetPresheaf, dst: &SetPresheaf) -> bool {
        self.maps.iter().enumerate().all(|(u, m)| {
            let mut seen = vec![false; dst.size(u)];
            m.iter().for_each(|&y| seen[y] = true);
            m.len() == dst.size(u) && seen.iter().all(|&b| b) && src.size(u) == dst.size(u)
        })
    }

    /// Checks that each component is a group homomorphism.
    pub fn check_group(
        &self,
        site: &FiniteSite,
        src: &GroupPresheaf,
        dst: &GroupPresheaf,
    ) -> Result<()> {
        self.check(site, &src.as_set_presheaf(), &dst.as_set_presheaf())?;
        for u in site.objects() {
            let gs = src.group(u);
            let gd = dst.group(u);
            for x in gs.elements() {
                for y in gs.elements() {
                    if self.apply(u, gs.mul(x, y)) != gd.mul(self.apply(u, x), self.apply(u, y)) {
                        return Err(Error::InvalidPresheaf(format!(
                            "morphism at {} is not a homomorphism",
                            site.name(u)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, then: &SetMorphism) -> SetMorphism {
        SetMorphism {
            maps: self
                .maps
                .iter()
                .enumerate()
                .map(|(u, m)| m.iter().map(|&x| then.maps[u][x]).collect())
                .collect(),
        }
    }
}

/// Verdict of the sheaf condition over every stored covering family.
#[derive(Debug, Clone)]
pub struct SheafReport {
    pub ok: bool,
    /// (object, family, matching-family count, section count) for failures.
    pub failures: Vec<SheafFailure>,
    pub covers_checked: usize,
}

#[derive(Debug, Clone)]
pub struct SheafFailure {
    pub object: Obj,
    pub family: Vec<Obj>,
    pub matching_count: usize,
    pub section_count: usize,
    /// A matching family with no gluing, or two sections with equal
    /// restrictions, whichever witnessed the failure.
    pub witness: String,
}

/// Verifies that sections biject with matching families over every stored
/// covering family of every object.
pub fn check_sheaf(site: &FiniteSite, p: &SetPresheaf, budget: &Budget) -> Result<SheafReport> {
    p.check(site)?;
    let mut failures = Vec::new();
    let mut covers_checked = 0;
    for u in site.objects() {
        for family in &site.covers[u] {
            covers_checked += 1;
            let cover = Cover {
                target: u,
                members: family.clone(),
            };
            let mfs = p.matching_families(site, &cover, budget)?;
            let restrict =
                |x: usize| -> Vec<usize> { family.iter().map(|&m| p.res(u, m, x)).collect() };
            // injectivity
            let mut images: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            let mut witness = None;
            for x in 0..p.size(u) {
                let img = restrict(x);
                if let Some(&y) = images.get(&img) {
                    witness = Some(format!(
                        "sections {} and {} of {} restrict equally over the cover",
                        p.label(u, y),
                        p.label(u, x),
                        site.name(u)
                    ));
                    break;
                }
                images.insert(img, x);
            }
            // surjectivity
            if witness.is_none() {
                for mf in &mfs {
                    if !images.contains_key(mf) {
                        witness = Some(format!(
                            "matching family ({}) over {} has no gluing",
                            mf.iter()
                                .enumerate()
                                .map(|(i, &x)| p.label(family[i], x).to_string())
                                .collect::<Vec<_>>()
                                .join(", "),
                            site.name(u)
                        ));
                        break;
                    }
                }
            }
            if witness.is_some() || mfs.len() != p.size(u) {
                failures.push(SheafFailure {
                    object: u,
                    family: family.clone(),
                    matching_count: mfs.len(),
                    section_count: p.size(u),
                    witness: witness.unwrap_or_else(|| "cardinality mismatch".into()),
                });
            }
        }
    }
    Ok(SheafReport {
        ok: failures.is_empty(),
        failures,
        covers_checked,
    })
}

/// Result of sheafification: the associated sheaf and the unit morphism.
#[derive(Debug, Clone)]
pub struct Sheafification {
    pub sheaf: SetPresheaf,
    pub unit: SetMorphism,
}

/// One plus-construction pass.  On a poset-of-opens site the minimal cover of
/// an object refines every covering family, so the colimit over covers is the
/// matching-family set over the minimal cover; restriction is projection of
/// tuples because the minimal cover of a smaller object is a subfamily.
fn plus_pass(site: &FiniteSite, p: &SetPresheaf, budget: &Budget) -> Result<Sheafification> {
    let n = site.object_count();
    let minimal: Vec<Cover> = site
        .objects()
        .map(|u| site.minimal_cover(u))
        .collect::<Result<Vec<_>>>()?;
    let mut families: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
    for u in site.objects() {
        let mut mfs = p.matching_families(site, &minimal[u], budget)?;
        mfs.sort();
        families.push(mfs);
    }
    let values: Vec<Vec<String>> = site
        .objects()
        .map(|u| {
            families[u]
                .iter()
                .map(|mf| {
                    let parts: Vec<String> = mf
                        .iter()
                        .enumerate()
                        .map(|(i, &x)| p.label(minimal[u].members[i], x).to_string())
                        .collect();
                    format!("({})", parts.join(";"))
                })
                .collect()
        })
        .collect();
    let mut res: BTreeMap<(Obj, Obj), Vec<usize>> = BTreeMap::new();
    for u in site.objects() {
        for v in site.objects().filter(|&v| site.leq(v, u)) {
            let map = families[u]
                .iter()
                .map(|mf| {
                    let projected: Vec<usize> = minimal[v]
                        .members
                        .iter()
                        .map(|m| {
                            let pos = minimal[u]
                                .members
                                .iter()
                                .position(|x| x == m)
                                .expect("minimal cover members nest");
                            mf[pos]
                        })
                        .collect();
                    families[v]
                        .binary_search(&projected)
                        .expect("projection of a matching family matches")
                })
                .collect();
            res.insert((u, v), map);
        }
    }
    let plus = SetPresheaf { values, res };
    // unit: restrict a section to the minimal cover
    let unit = SetMorphism {
        maps: site
            .objects()
            .map(|u| {
                (0..p.size(u))
                    .map(|x| {
                        let tuple: Vec<usize> =
                            minimal[u].members.iter().map(|&m| p.res(u, m, x)).collect();
                        families[u]
                            .binary_search(&tuple)
                            .expect("restriction tuple is matching")
                    })
                    .collect()
            })
            .collect(),
    };
    Ok(Sheafification { sheaf: plus, unit })
}

/// Sheafification: the plus construction applied twice (separation pass
/// first), with the composite unit morphism.
pub fn sheafify(site: &FiniteSite, p: &SetPresheaf, budget: &Budget) -> Result<Sheafification> {
    let first = plus_pass(site, p, budget)?;
    let second = plus_pass(site, &first.sheaf, budget)?;
    Ok(Sheafification {
        sheaf: second.sheaf,
        unit: first.unit.compose(&second.unit),
    })
}

/// Sheafification of a group presheaf; the group structure is carried through
/// both passes (matching families multiply componentwise).
pub fn sheafify_group(
    site: &FiniteSite,
    p: &GroupPresheaf,
    budget: &Budget,
) -> Result<(GroupPresheaf, SetMorphism)> {
    let s = sheafify(site, &p.as_set_presheaf(), budget)?;
    let groups = group_structure_through(site, p, &s, budget)?;
    Ok((groups, s.unit))
}

/// Reconstructs group tables on the sheafified presheaf by transporting the
/// objectwise multiplication through local data: an element of a(P)(U) is
/// determined by its restrictions to irreducibles, where the unit map is
/// bijective onto matching tuples and multiplication is componentwise.
fn group_structure_through(
    site: &FiniteSite,
    p: &GroupPresheaf,
    s: &Sheafification,
    budget: &Budget,
) -> Result<GroupPresheaf> {
    // The double-plus element at U is a matching family over the minimal
    // cover with values in a(P) of irreducibles; on irreducibles a(P) = P⁺ =
    // ... = P-matching families over the identity-bearing minimal cover.
    // Rather than unwind this, multiply via the irreducible components: the
    // map a(P)(U) → ∏_{irr V ≤ U} a(P)(V) is injective, P(V) → a(P)(V) is a
    // bijection on irreducibles composed twice, and multiplication on each
    // irreducible is P's.
    let irr = site.irreducibles();
    let mut groups: Vec<FinGroup> = Vec::new();
    for u in site.objects() {
        let members: Vec<Obj> = irr.iter().copied().filter(|&v| site.leq(v, u)).collect();
        // bijection P(v) → a(P)(v) on irreducibles via the unit
        let unit_inv: BTreeMap<Obj, Vec<usize>> = members
            .iter()
            .map(|&v| {
                let mut inv = vec![usize::MAX; s.sheaf.size(v)];
                for x in 0..p.size(v) {
                    inv[s.unit.apply(v, x)] = x;
                }
                (v, inv)
            })
            .collect();
        for (&v, inv) in &unit_inv {
            if inv.contains(&usize::MAX) {
                return Err(Error::InvalidPresheaf(format!(
                    "unit is not bijective on irreducible {}",
                    site.name(v)
                )));
            }
        }
        let size = s.sheaf.size(u);
        let coords =
            |x: usize| -> Vec<usize> { members.iter().map(|&v| s.sheaf.res(u, v, x)).collect() };
        let coord_index: BTreeMap<Vec<usize>, usize> = (0..size).map(|x| (coords(x), x)).collect();
        if coord_index.len() != size {
            return Err(Error::InvalidPresheaf(format!(
                "sheaf sections at {} are not determined by irreducibles",
                site.name(u)
            )));
        }
        let mut mul = vec![vec![0usize; size]; size];
        for x in 0..size {
            for y in 0..size {
                let cx = coords(x);
                let cy = coords(y);
                let cz: Vec<usize> = members
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let a = unit_inv[&v][cx[i]];
                        let b = unit_inv[&v][cy[i]];
                        s.unit.apply(v, p.mul(v, a, b))
                    })
                    .collect();
                mul[x][y] = *coord_index.get(&cz).ok_or_else(|| {
                    Error::InvalidPresheaf(format!(
                        "product of sections does not glue at {}",
                        site.name(u)
                    ))
                })?;
            }
        }
        let labels = (0..size).map(|x| s.sheaf.label(u, x).to_string()).collect();
        groups.push(FinGroup::from_table(labels, mul)?);
    }
    let gp = GroupPresheaf {
        groups,
        res: s.sheaf.res.clone(),
    };
    gp.check(site)?;
    let _ = budget;
    Ok(gp)
}

/// Local representatives of a sheafified section: a cover of the object and
/// a preimage of the section in the original presheaf over each member.
/// Restrictions of the sheafification unit are bijective on irreducibles, so
/// the minimal cover always works; this is the shared primitive behind every
/// cocycle extraction.
pub fn local_representatives(
    site: &FiniteSite,
    original: &SetPresheaf,
    sheafification: &Sheafification,
    u: Obj,
    section: usize,
) -> Result<(Cover, Vec<usize>)> {
    let cover = site.minimal_cover(u)?;
    let reps = cover
        .members
        .iter()
        .map(|&v| {
            let target = sheafification.sheaf.res(u, v, section);
            (0..original.size(v))
                .find(|&x| sheafification.unit.apply(v, x) == target)
                .ok_or_else(|| {
                    Error::InvalidPresheaf(format!(
                        "no representative over irreducible {}",
                        site.name(v)
                    ))
                })
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok((cover, reps))
}

/// Quotient of a presheaf by an objectwise partition (classes must be
/// respected by restrictions), then sheafification.  Returns the quotient
/// sheaf and the composite projection X → X/~ → a(X/~).
pub fn quotient_sheaf_by_partition(
    site: &FiniteSite,
    x: &SetPresheaf,
    class_of: &[Vec<usize>],
    budget: &Budget,
) -> Result<(SetPresheaf, SetMorphism)> {
    // quotient presheaf
    let mut values: Vec<Vec<String>> = Vec::new();
    let mut class_count: Vec<usize> = Vec::new();
    for u in site.objects() {
        let k = class_of[u].iter().copied().max().map_or(0, |m| m + 1);
        class_count.push(k);
        let mut labels = vec![String::new(); k];
        for e in 0..x.size(u) {
            let c = class_of[u][e];
            if labels[c].is_empty() {
                labels[c] = format!("[{}]", x.label(u, e));
            }
        }
        values.push(labels);
    }
    let mut res: BTreeMap<(Obj, Obj), Vec<usize>> = BTreeMap::new();
    for u in site.objects() {
        for v in site.objects().filter(|&v| site.leq(v, u)) {
            let mut map = vec![usize::MAX; class_count[u]];
            for e in 0..x.size(u) {
                let c = class_of[u][e];
                let image = class_of[v][x.res(u, v, e)];
                if map[c] == usize::MAX {
                    map[c] = image;
                } else if map[c] != image {
                    return Err(Error::InvalidPresheaf(format!(
                        "partition not respected by restriction {} → {}",
                        site.name(u),
                        site.name(v)
                    )));
                }
            }
            res.insert((u, v), map);
        }
    }
    let quotient = SetPresheaf { values, res };
    let projection = SetMorphism {
        maps: site.objects().map(|u| class_of[u].clone()).collect(),
    };
    let sheafified = sheafify(site, &quotient, budget)?;
    Ok((sheafified.sheaf, projection.compose(&sheafified.unit)))
}

/// Global sections of a set presheaf: families compatible with every
/// restriction.  For a sheaf on a site with a top object this is values(top),
/// but the honest limit is computed.
pub fn global_sections(site: &FiniteSite, p: &SetPresheaf) -> Vec<Vec<usize>> {
    let n = site.object_count();
    let maximal: Vec<Obj> = site
        .objects()
        .filter(|&u| site.objects().all(|v| !site.leq(u, v) || v == u))
        .collect();
    let mut out = Vec::new();
    let mut assignment = vec![usize::MAX; n];
    fn rec(
        site: &FiniteSite,
        p: &SetPresheaf,
        maximal: &[Obj],
        i: usize,
        assignment: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == maximal.len() {
            // propagate to every object from any maximal one above it and
            // check consistency
            let mut full = assignment.clone();
            for u in site.objects() {
                let mut value: Option<usize> = if full[u] != usize::MAX {
                    Some(full[u])
                } else {
                    None
                };
                for &m in maximal.iter() {
                    if site.leq(u, m) {
                        let v = p.res(m, u, full[m]);
                        match value {
                            None => value = Some(v),
                            Some(w) if w != v => return,
                            _ => {}
                        }
                    }
                }
                match value {
                    Some(v) => full[u] = v,
                    None => {
                        if p.size(u) == 1 {
                            full[u] = 0;
                        } else {
                            // an object not under any maximal object cannot
                            // happen in a finite poset
                            return;
                        }
                    }
                }
            }
            // full consistency across all comparable pairs
            for u in site.objects() {
                for v in site.objects().filter(|&v| site.leq(v, u)) {
                    if p.res(u, v, full[u]) != full[v] {
                        return;
                    }
                }
            }
            out.push(full);
            return;
        }
        let m = maximal[i];
        for x in 0..p.size(m) {
            assignment[m] = x;
            rec(site, p, maximal, i + 1, assignment, out);
        }
        assignment[m] = usize::MAX;
    }
    rec(site, p, &maximal, 0, &mut assignment, &mut out);
    out.sort();
    out
}

/// Global sections of a group presheaf with the induced group structure.
pub fn global_sections_group(site: &FiniteSite, p: &GroupPresheaf) -> (FinGroup, Vec<Vec<usize>>) {
    let sections = global_sections(site, &p.as_set_presheaf());
    let index: BTreeMap<&Vec<usize>, usize> = sections.iter().zip(0..).collect();
    let size = sections.len();
    let mut mul = vec![vec![0usize; size]; size];
    for (i, s) in sections.iter().enumerate() {
        for (j, t) in sections.iter().enumerate() {
            let st: Vec<usize> = site.objects().map(|u| p.mul(u, s[u], t[u])).collect();
            mul[i][j] = index[&st];
        }
    }
    let labels = sections
        .iter()
        .map(|s| {
            if let Some(top) = site.top() {
                p.group(top).label(s[top]).to_string()
            } else {
                format!("{s:?}")
            }
        })
        .collect();
    (
        FinGroup::from_table(labels, mul).expect("limit of groups is a group"),
        sections,
    )
}

/// The final sheaf: a singleton at every object.
pub fn final_sheaf(site: &FiniteSite) -> SetPresheaf {
    let values = site.objects().map(|_| vec!["*".to_string()]).collect();
    let mut res = BTreeMap::new();
    for u in site.objects() {
        for v in site.objects().filter(|&v| site.leq(v, u)) {
            res.insert((u, v), vec![0]);
        }
    }
    SetPresheaf { values, res }
}

/// Constant presheaf on a group: every stalk the same group, identity
/// restrictions.  Not a sheaf on disconnected objects.
pub fn constant_group_presheaf(site: &FiniteSite, base: &FinGroup) -> GroupPresheaf {
    let mut res = BTreeMap::new();
    for u in site.objects() {
        for v in site.objects().filter(|&v| site.leq(v, u)) {
            res.insert((u, v), (0..base.order()).collect());
        }
    }
    GroupPresheaf {
        groups: site.objects().map(|_| base.clone()).collect(),
        res,
    }
}

/// The constant sheaf: sheafification of the constant presheaf.  Elements
/// are relabelled by their base-label coordinates over the irreducibles
/// below the object ("x" when constant, "x;y;…" otherwise).
pub fn constant_group_sheaf(
    site: &FiniteSite,
    base: &FinGroup,
    budget: &Budget,
) -> Result<GroupPresheaf> {
    Ok(constant_group_sheaf_with_unit(site, base, budget)?.0)
}

/// As `constant_group_sheaf`, also returning the unit morphism from the
/// constant presheaf (whose stalks are `base` everywhere).
pub fn constant_group_sheaf_with_unit(
    site: &FiniteSite,
    base: &FinGroup,
    budget: &Budget,
) -> Result<(GroupPresheaf, SetMorphism)> {
    let presheaf = constant_group_presheaf(site, base);
    let (mut sheaf, unit) = sheafify_group(site, &presheaf, budget)?;
    let irr = site.irreducibles();
    // at an irreducible the unit from the constant presheaf is a bijection
    let unit_inv: BTreeMap<Obj, Vec<usize>> = irr
        .iter()
        .map(|&v| {
            let mut inv = vec![usize::MAX; sheaf.size(v)];
            for x in 0..base.order() {
                inv[unit.apply(v, x)] = x;
            }
            (v, inv)
        })
        .collect();
    for u in site.objects() {
        let members: Vec<Obj> = irr.iter().copied().filter(|&v| site.leq(v, u)).collect();
        let labels: Vec<String> = (0..sheaf.size(u))
            .map(|x| {
                let coords: Vec<&str> = members
                    .iter()
                    .map(|&v| base.label(unit_inv[&v][sheaf.res(u, v, x)]))
                    .collect();
                if coords.windows(2).all(|w| w[0] == w[1]) && !coords.is_empty() {
                    coords[0].to_string()
                } else {
                    coords.join(";")
                }
            })
            .collect();
        sheaf.groups[u].labels = labels;
    }
    Ok((sheaf, unit))
}

/// The trivial group sheaf.
pub fn trivial_group_sheaf(site: &FiniteSite) -> GroupPresheaf {
    constant_group_presheaf(site, &FinGroup::trivial())
}
