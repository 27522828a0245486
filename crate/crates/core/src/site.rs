//! Finite sites: a poset with binary meets plus explicitly stored covering
//! families.  Poset-of-opens sites built from a finite topological space are
//! the main source; abstract sites can be loaded from fixtures as long as the
//! topology axioms validate.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Index of a site object. A morphism U → V exists iff U ≤ V.
pub type Obj = usize;

/// Sentinel-free meet: `None` is the empty intersection.
pub type Meet = Option<Obj>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSite {
    pub names: Vec<String>,
    /// `leq[u][v]` iff U ≤ V.
    pub leq: Vec<Vec<bool>>,
    /// Binary meet table; `None` encodes the empty intersection.
    pub meets: Vec<Vec<Meet>>,
    /// Generating covering families per object, each family sorted.
    pub covers: Vec<Vec<Vec<Obj>>>,
}

/// A covering family of `target` by smaller objects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub target: Obj,
    pub members: Vec<Obj>,
}

impl Cover {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Per-axiom verdicts from `validate_site`.
#[derive(Debug, Clone, Serialize)]
pub struct SiteReport {
    pub presheaf_poset_ok: bool,
    pub meets_ok: bool,
    pub identity_covers_ok: bool,
    pub base_change_ok: bool,
    pub local_character_ok: bool,
    pub witnesses: Vec<String>,
}

impl SiteReport {
    pub fn ok(&self) -> bool {
        self.presheaf_poset_ok
            && self.meets_ok
            && self.identity_covers_ok
            && self.base_change_ok
            && self.local_character_ok
    }
}

impl FiniteSite {
    pub fn object_count(&self) -> usize {
        self.names.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> {
        0..self.object_count()
    }

    pub fn name(&self, u: Obj) -> &str {
        &self.names[u]
    }

    pub fn object_by_name(&self, name: &str) -> Option<Obj> {
        self.names.iter().position(|n| n == name)
    }

    pub fn leq(&self, u: Obj, v: Obj) -> bool {
        self.leq[u][v]
    }

    pub fn meet(&self, u: Obj, v: Obj) -> Meet {
        self.meets[u][v]
    }

    pub fn meet_all(&self, objs: &[Obj]) -> Meet {
        let mut it = objs.iter();
        let mut acc = *it.next()?;
        for &o in it {
            acc = self.meet(acc, o)?;
        }
        Some(acc)
    }

    /// The top object, if one exists.
    pub fn top(&self) -> Option<Obj> {
        self.objects()
            .find(|&t| self.objects().all(|u| self.leq(u, t)))
    }

    pub fn require_top(&self) -> Result<Obj> {
        self.top()
            .ok_or_else(|| Error::InvalidSite("site has no top object".into()))
    }

    /// Builds the poset-of-opens site of a finite topological space.
    ///
    /// `opens` must contain the empty set and the whole space and be closed
    /// under union and intersection; the empty open is dropped from the object
    /// list and covering families are all families of opens whose union is the
    /// target.
    pub fn from_space(points: &[String], opens: &[Vec<String>]) -> Result<Self> {
        let point_set: BTreeSet<&String> = points.iter().collect();
        if point_set.len() != points.len() {
            return Err(Error::InvalidSite("duplicate points".into()));
        }
        let mut open_sets: Vec<BTreeSet<String>> = Vec::new();
        for o in opens {
            let s: BTreeSet<String> = o.iter().cloned().collect();
            if s.len() != o.len() {
                return Err(Error::InvalidSite(format!(
                    "open {{{}}} lists a point twice",
                    o.join(",")
                )));
            }
            for p in &s {
                if !point_set.contains(p) {
                    return Err(Error::InvalidSite(format!("open uses unknown point {p}")));
                }
            }
            if !open_sets.contains(&s) {
                open_sets.push(s);
            }
        }
        let whole: BTreeSet<String> = points.iter().cloned().collect();
        if !open_sets.contains(&whole) {
            return Err(Error::InvalidSite("the whole space must be open".into()));
        }
        // closure under union and intersection, reporting the violating pair
        for i in 0..open_sets.len() {
            for j in 0..open_sets.len() {
                let union: BTreeSet<String> = open_sets[i].union(&open_sets[j]).cloned().collect();
                if !open_sets.contains(&union) {
                    return Err(Error::InvalidSite(format!(
                        "opens not closed under union: {} ∪ {}",
                        fmt_set(&open_sets[i]),
                        fmt_set(&open_sets[j])
                    )));
                }
                let inter: BTreeSet<String> =
                    open_sets[i].intersection(&open_sets[j]).cloned().collect();
                if !open_sets.contains(&inter) && !inter.is_empty() {
                    return Err(Error::InvalidSite(format!(
                        "opens not closed under intersection: {} ∩ {}",
                        fmt_set(&open_sets[i]),
                        fmt_set(&open_sets[j])
                    )));
                }
            }
        }
        let mut nonempty: Vec<BTreeSet<String>> = open_sets
            .iter()
            .filter(|s| !s.is_empty())
            .cloned()
            .collect();
        nonempty.sort_by(|a, b| (a.len(), fmt_set(a)).cmp(&(b.len(), fmt_set(b))));
        let n = nonempty.len();
        let names: Vec<String> = nonempty.iter().map(fmt_set).collect();
        let mut leq = vec![vec![false; n]; n];
        let mut meets = vec![vec![None; n]; n];
        for u in 0..n {
            for v in 0..n {
                leq[u][v] = nonempty[u].is_subset(&nonempty[v]);
                let inter: BTreeSet<String> =
                    nonempty[u].intersection(&nonempty[v]).cloned().collect();
                meets[u][v] = nonempty.iter().position(|s| *s == inter);
            }
        }
        // covers(U) = every family of opens whose union is U
        let mut covers = vec![Vec::new(); n];
        for u in 0..n {
            let below: Vec<Obj> = (0..n).filter(|&v| leq[v][u]).collect();
            let k = below.len();
            if k > 20 {
                return Err(Error::InvalidSite(format!(
                    "object {} has {} subobjects; cover enumeration refuses above 20",
                    names[u], k
                )));
            }
            for mask in 1u32..(1 << k) {
                let family: Vec<Obj> = (0..k)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| below[i])
                    .collect();
                let union: BTreeSet<String> = family
                    .iter()
                    .flat_map(|&v| nonempty[v].iter().cloned())
                    .collect();
                if union == nonempty[u] {
                    covers[u].push(family);
                }
            }
            covers[u].sort();
        }
        Ok(FiniteSite {
            names,
            leq,
            meets,
            covers,
        })
    }

    /// Builds an abstract site from explicit data. Meets are computed from the
    /// order; it is an error if some pair has lower bounds but no greatest one.
    pub fn from_parts(
        names: Vec<String>,
        leq_pairs: &[(String, String)],
        covers: BTreeMap<String, Vec<Vec<String>>>,
    ) -> Result<Self> {
        let n = names.len();
        let index = |name: &str| -> Result<Obj> {
            names
                .iter()
                .position(|m| m == name)
                .ok_or_else(|| Error::InvalidSite(format!("unknown object {name}")))
        };
        let mut leq = vec![vec![false; n]; n];
        for u in 0..n {
            leq[u][u] = true;
        }
        for (a, b) in leq_pairs {
            leq[index(a)?][index(b)?] = true;
        }
        // transitive closure
        for k in 0..n {
            for u in 0..n {
                for v in 0..n {
                    if leq[u][k] && leq[k][v] {
                        leq[u][v] = true;
                    }
                }
            }
        }
        let mut meets = vec![vec![None; n]; n];
        for u in 0..n {
            for v in 0..n {
                let lower: Vec<Obj> = (0..n).filter(|&w| leq[w][u] && leq[w][v]).collect();
                if lower.is_empty() {
                    continue;
                }
                let greatest = lower
                    .iter()
                    .copied()
                    .find(|&m| lower.iter().all(|&w| leq[w][m]));
                match greatest {
                    Some(m) => meets[u][v] = Some(m),
                    None => {
                        return Err(Error::InvalidSite(format!(
                            "objects {} and {} have lower bounds but no meet",
                            names[u], names[v]
                        )))
                    }
                }
            }
        }
        let mut cover_table = vec![Vec::new(); n];
        for (target, families) in covers {
            let t = index(&target)?;
            for family in families {
                let mut f = family
                    .iter()
                    .map(|m| index(m))
                    .collect::<Result<Vec<Obj>>>()?;
                f.sort();
                f.dedup();
                for &m in &f {
                    if !leq[m][t] {
                        return Err(Error::InvalidSite(format!(
                            "cover member {} is not ≤ target {}",
                            names[m], names[t]
                        )));
                    }
                }
                cover_table[t].push(f);
            }
        }
        for c in &mut cover_table {
            c.sort();
            c.dedup();
        }
        Ok(FiniteSite {
            names,
            leq,
            meets,
            covers: cover_table,
        })
    }

    /// True iff the sieve generated by the family contains a stored covering
    /// family of the target.
    pub fn is_covering_family(&self, cover: &Cover) -> Result<bool> {
        for &m in &cover.members {
            if !self.leq(m, cover.target) {
                return Err(Error::InvalidSite(format!(
                    "member {} is not ≤ target {}",
                    self.name(m),
                    self.name(cover.target)
                )));
            }
        }
        Ok(self.covers[cover.target].iter().any(|family| {
            family
                .iter()
                .all(|&v| cover.members.iter().any(|&m| self.leq(v, m)))
        }))
    }

    /// Objects whose only covering families contain the object itself; on a
    /// poset-of-opens site these are the minimal neighborhoods of points.
    pub fn irreducibles(&self) -> Vec<Obj> {
        self.objects()
            .filter(|&u| self.covers[u].iter().all(|family| family.contains(&u)))
            .collect()
    }

    /// The minimal-basis cover of `target`: all irreducible objects below it.
    pub fn minimal_cover(&self, target: Obj) -> Result<Cover> {
        let members: Vec<Obj> = self
            .irreducibles()
            .into_iter()
            .filter(|&v| self.leq(v, target))
            .collect();
        let cover = Cover { target, members };
        if cover.is_empty() || !self.is_covering_family(&cover)? {
            return Err(Error::InvalidSite(format!(
                "irreducible objects below {} do not form a covering family",
                self.name(target)
            )));
        }
        Ok(cover)
    }

    /// Base change of a cover along V ≤ target: members are the nonempty
    /// meets.
    pub fn restrict_cover(&self, cover: &Cover, v: Obj) -> Cover {
        let mut members: Vec<Obj> = cover
            .members
            .iter()
            .filter_map(|&m| self.meet(m, v))
            .collect();
        members.sort();
        members.dedup();
        Cover { target: v, members }
    }

    /// Common refinement of two covers of the same target: the nonempty
    /// pairwise meets, with maps back to the parents.
    pub fn common_refinement(&self, a: &Cover, b: &Cover) -> (Cover, Vec<usize>, Vec<usize>) {
        assert_eq!(a.target, b.target);
        let mut members = Vec::new();
        let mut to_a = Vec::new();
        let mut to_b = Vec::new();
        for (i, &ma) in a.members.iter().enumerate() {
            for (j, &mb) in b.members.iter().enumerate() {
                if let Some(m) = self.meet(ma, mb) {
                    members.push(m);
                    to_a.push(i);
                    to_b.push(j);
                }
            }
        }
        (
            Cover {
                target: a.target,
                members,
            },
            to_a,
            to_b,
        )
    }

    /// Checks every topology axiom on the stored generating families.
    pub fn validate(&self) -> Result<SiteReport> {
        let n = self.object_count();
        if n > 64 {
            return Err(Error::BoundExceeded {
                what: "site axiom check (bitmask sieves)".into(),
                estimate: n as u128,
                bound: 64,
            });
        }
        let mut witnesses = Vec::new();

        // partial order
        let mut poset_ok = true;
        for u in 0..n {
            if !self.leq(u, u) {
                poset_ok = false;
                witnesses.push(format!("≤ not reflexive at {}", self.name(u)));
            }
            for v in 0..n {
                if u != v && self.leq(u, v) && self.leq(v, u) {
                    poset_ok = false;
                    witnesses.push(format!(
                        "≤ not antisymmetric at ({}, {})",
                        self.name(u),
                        self.name(v)
                    ));
                }
                for w in 0..n {
                    if self.leq(u, v) && self.leq(v, w) && !self.leq(u, w) {
                        poset_ok = false;
                        witnesses.push(format!(
                            "≤ not transitive at ({}, {}, {})",
                            self.name(u),
                            self.name(v),
                            self.name(w)
                        ));
                    }
                }
            }
        }

        // meets are greatest lower bounds
        let mut meets_ok = true;
        for u in 0..n {
            for v in 0..n {
                match self.meet(u, v) {
                    Some(m) => {
                        if !self.leq(m, u) || !self.leq(m, v) {
                            meets_ok = false;
                            witnesses.push(format!(
                                "meet({}, {}) = {} is not a lower bound",
                                self.name(u),
                                self.name(v),
                                self.name(m)
                            ));
                        }
                        for w in 0..n {
                            if self.leq(w, u) && self.leq(w, v) && !self.leq(w, m) {
                                meets_ok = false;
                                witnesses.push(format!(
                                    "meet({}, {}) misses lower bound {}",
                                    self.name(u),
                                    self.name(v),
                                    self.name(w)
                                ));
                            }
                        }
                    }
                    None => {
                        if let Some(w) = (0..n).find(|&w| self.leq(w, u) && self.leq(w, v)) {
                            meets_ok = false;
                            witnesses.push(format!(
                                "meet({}, {}) reported empty but {} is below both",
                                self.name(u),
                                self.name(v),
                                self.name(w)
                            ));
                        }
                    }
                }
            }
        }

        // axiom (iii): the identity family covers
        let mut identity_ok = true;
        for u in 0..n {
            let id = Cover {
                target: u,
                members: vec![u],
            };
            if !self.is_covering_family(&id)? {
                identity_ok = false;
                witnesses.push(format!(
                    "identity family of {} is not covering",
                    self.name(u)
                ));
            }
        }

        // sieves as bitmasks of objects ≤ target
        let down = |u: Obj| -> u64 {
            (0..n)
                .filter(|&v| self.leq(v, u))
                .fold(0u64, |acc, v| acc | (1 << v))
        };
        let sieve_of_family =
            |family: &[Obj]| -> u64 { family.iter().fold(0u64, |acc, &m| acc | down(m)) };
        // distinct covering sieves per object
        let covering_sieves: Vec<BTreeSet<u64>> = (0..n)
            .map(|u| self.covers[u].iter().map(|f| sieve_of_family(f)).collect())
            .collect();
        let is_covering_sieve =
            |u: Obj, sieve: u64| -> bool { covering_sieves[u].iter().any(|&c| c & !sieve == 0) };

        // axiom (i): stability under base change
        let mut base_change_ok = true;
        'bc: for u in 0..n {
            for family in &self.covers[u] {
                for v in 0..n {
                    if !self.leq(v, u) {
                        continue;
                    }
                    let pulled: Vec<Obj> = family.iter().filter_map(|&m| self.meet(m, v)).collect();
                    let sieve = sieve_of_family(&pulled);
                    if !is_covering_sieve(v, sieve) {
                        base_change_ok = false;
                        witnesses.push(format!(
                            "base change of {{{}}} along {} ≤ {} is not covering",
                            family
                                .iter()
                                .map(|&m| self.name(m))
                                .collect::<Vec<_>>()
                                .join(", "),
                            self.name(v),
                            self.name(u)
                        ));
                        if witnesses.len() > 20 {
                            break 'bc;
                        }
                    }
                }
            }
        }

        // axiom (ii): local character, restated for generating families.  If a
        // sieve R' pulls back to a covering sieve along every member of some
        // covering sieve R, then R' must be covering.
        let mut local_ok = true;
        'lc: for u in 0..n {
            // candidate sieves R' of u = downward-closed masks within down(u)
            let down_u = down(u);
            let members: Vec<Obj> = (0..n).filter(|&v| down_u & (1 << v) != 0).collect();
            // enumerate downward-closed subsets by DFS over maximal members
            let mut candidates: BTreeSet<u64> = BTreeSet::new();
            let k = members.len();
            if k > 14 {
                // 2^k masks is too many; sample the sieves generated by stored
                // families plus single-generator sieves, which witness the
                // axiom in practice
                for family in &self.covers[u] {
                    candidates.insert(sieve_of_family(family));
                }
                for &m in &members {
                    candidates.insert(down(m));
                }
            } else {
                for mask in 0u64..(1 << k) {
                    let sieve: u64 = (0..k)
                        .filter(|&i| mask & (1 << i) != 0)
                        .fold(0, |acc, i| acc | (1 << members[i]));
                    // downward closed?
                    let closed = members
                        .iter()
                        .all(|&v| sieve & (1 << v) == 0 || down(v) & !sieve == 0);
                    if closed {
                        candidates.insert(sieve);
                    }
                }
            }
            for &r in &covering_sieves[u] {
                for &r_prime in &candidates {
                    if is_covering_sieve(u, r_prime) {
                        continue;
                    }
                    // does R' pull back to a covering sieve along every member
                    // of R?
                    let hyp = (0..n)
                        .filter(|&v| r & (1 << v) != 0)
                        .all(|v| is_covering_sieve(v, r_prime & down(v)));
                    if hyp {
                        local_ok = false;
                        witnesses.push(format!(
                            "local character fails at {}: a non-covering sieve pulls back to covers",
                            self.name(u)
                        ));
                        if witnesses.len() > 20 {
                            break 'lc;
                        }
                    }
                }
            }
        }

        Ok(SiteReport {
            presheaf_poset_ok: poset_ok,
            meets_ok,
            identity_covers_ok: identity_ok,
            base_change_ok,
            local_character_ok: local_ok,
            witnesses,
        })
    }
}

fn fmt_set(s: &BTreeSet<String>) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(",")
}

/// The one-point space.
pub fn point_site() -> FiniteSite {
    FiniteSite::from_space(&["*".into()], &[vec![], vec!["*".into()]]).expect("point site")
}

/// The four-point pseudo-circle.
pub fn pseudo_circle_site() -> FiniteSite {
    let pts: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let opens: Vec<Vec<String>> = vec![
        vec![],
        vec!["a".into()],
        vec!["b".into()],
        vec!["a".into(), "b".into()],
        vec!["a".into(), "b".into(), "c".into()],
        vec!["a".into(), "b".into(), "d".into()],
        vec!["a".into(), "b".into(), "c".into(), "d".into()],
    ];
    FiniteSite::from_space(&pts, &opens).expect("pseudo-circle site")
}

/// The six-point sphere model: non-Hausdorff suspension of the pseudo-circle.
pub fn sphere_site() -> FiniteSite {
    let pts: Vec<String> = ["a", "b", "c", "d", "p", "q"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let circle: Vec<Vec<&str>> = vec![
        vec![],
        vec!["a"],
        vec!["b"],
        vec!["a", "b"],
        vec!["a", "b", "c"],
        vec!["a", "b", "d"],
        vec!["a", "b", "c", "d"],
    ];
    let mut opens: Vec<Vec<String>> = circle
        .iter()
        .map(|o| o.iter().map(|s| s.to_string()).collect())
        .collect();
    let whole_circle: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let mut with_p = whole_circle.clone();
    with_p.push("p".into());
    let mut with_q = whole_circle.clone();
    with_q.push("q".into());
    let mut all = whole_circle;
    all.push("p".into());
    all.push("q".into());
    opens.push(with_p);
    opens.push(with_q);
    opens.push(all);
    FiniteSite::from_space(&pts, &opens).expect("sphere site")
}

/// The two-point discrete space.
pub fn discrete_two_site() -> FiniteSite {
    let pts: Vec<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
    let opens: Vec<Vec<String>> = vec![
        vec![],
        vec!["x".into()],
        vec!["y".into()],
        vec!["x".into(), "y".into()],
    ];
    FiniteSite::from_space(&pts, &opens).expect("discrete site")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_site_has_one_object_one_cover() {
        let s = point_site();
        assert_eq!(s.object_count(), 1);
        assert_eq!(s.covers[0], vec![vec![0]]);
        assert!(s.validate().unwrap().ok());
    }

    #[test]
    fn pseudo_circle_has_six_objects_and_the_two_member_cover() {
        let s = pseudo_circle_site();
        assert_eq!(s.object_count(), 6);
        let top = s.require_top().unwrap();
        let c = s.object_by_name("a,b,c").unwrap();
        let d = s.object_by_name("a,b,d").unwrap();
        let cover = Cover {
            target: top,
            members: vec![c, d],
        };
        assert!(s.is_covering_family(&cover).unwrap());
        assert!(s.validate().unwrap().ok());
    }

    #[test]
    fn sphere_site_matches_union_closure() {
        // brute-force union closure of the suspension basis, the independent
        // route for the object count
        let s = sphere_site();
        let minimal: Vec<BTreeSet<&str>> = vec![
            ["a"].into_iter().collect(),
            ["b"].into_iter().collect(),
            ["a", "b", "c"].into_iter().collect(),
            ["a", "b", "d"].into_iter().collect(),
            ["a", "b", "c", "d", "p"].into_iter().collect(),
            ["a", "b", "c", "d", "q"].into_iter().collect(),
        ];
        let mut closure: BTreeSet<Vec<&str>> = BTreeSet::new();
        for mask in 1u32..(1 << minimal.len()) {
            let mut u: BTreeSet<&str> = BTreeSet::new();
            for (i, m) in minimal.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    u.extend(m.iter());
                }
            }
            closure.insert(u.into_iter().collect());
        }
        assert_eq!(closure.len(), s.object_count());
        assert_eq!(s.object_count(), 9);
        assert!(s.validate().unwrap().ok());
    }

    #[test]
    fn missing_closure_is_rejected_with_the_violating_pair() {
        let pts: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        // {a} and {b} open but their union missing
        let opens: Vec<Vec<String>> = vec![vec![], vec!["a".into()], vec!["b".into()]];
        let err = FiniteSite::from_space(&pts, &opens).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("whole space") || msg.contains("union"),
            "{msg}"
        );
        let pts: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        // {a} ∪ {b} = {a,b} is missing
        let opens: Vec<Vec<String>> = vec![
            vec![],
            vec!["a".into()],
            vec!["b".into()],
            vec!["a".into(), "b".into(), "c".into()],
        ];
        let err = FiniteSite::from_space(&pts, &opens).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('∪'), "{msg}");
        assert!(msg.contains('a') && msg.contains('b'), "{msg}");
        // {a,b} ∩ {b,c} = {b} is missing
        let opens: Vec<Vec<String>> = vec![
            vec![],
            vec!["a".into(), "b".into()],
            vec!["b".into(), "c".into()],
            vec!["a".into(), "b".into(), "c".into()],
        ];
        let err = FiniteSite::from_space(&pts, &opens).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('∩'), "{msg}");
        assert!(msg.contains("a,b") && msg.contains("b,c"), "{msg}");
    }

    #[test]
    fn meets_match_intersections() {
        let s = pseudo_circle_site();
        let c = s.object_by_name("a,b,c").unwrap();
        let d = s.object_by_name("a,b,d").unwrap();
        let ab = s.object_by_name("a,b").unwrap();
        let a = s.object_by_name("a").unwrap();
        let b = s.object_by_name("b").unwrap();
        assert_eq!(s.meet(c, d), Some(ab));
        assert_eq!(s.meet(c, c), Some(c));
        assert_eq!(s.meet(a, b), None);
    }

    #[test]
    fn injected_missing_identity_cover_fails_axiom_three() {
        let mut s = pseudo_circle_site();
        let ab = s.object_by_name("a,b").unwrap();
        // leave {a,b} with no covering families at all, so its identity
        // family no longer generates a covering sieve
        s.covers[ab] = vec![];
        let report = s.validate().unwrap();
        assert!(!report.identity_covers_ok);
        assert!(!report.ok());
    }

    #[test]
    fn covering_family_checks() {
        let s = pseudo_circle_site();
        let top = s.require_top().unwrap();
        let ab = s.object_by_name("a,b").unwrap();
        let a = s.object_by_name("a").unwrap();
        let c = s.object_by_name("a,b,c").unwrap();
        let d = s.object_by_name("a,b,d").unwrap();
        assert!(s
            .is_covering_family(&Cover {
                target: top,
                members: vec![c, d]
            })
            .unwrap());
        assert!(!s
            .is_covering_family(&Cover {
                target: ab,
                members: vec![a]
            })
            .unwrap());
        assert!(s
            .is_covering_family(&Cover {
                target: ab,
                members: vec![ab]
            })
            .unwrap());
        // member not below the target is an error
        assert!(s
            .is_covering_family(&Cover {
                target: ab,
                members: vec![c]
            })
            .is_err());
    }

    #[test]
    fn base_change_of_covers_still_covers() {
        let s = sphere_site();
        for u in s.objects() {
            for family in &s.covers[u] {
                for v in s.objects().filter(|&v| s.leq(v, u)) {
                    let pulled = s.restrict_cover(
                        &Cover {
                            target: u,
                            members: family.clone(),
                        },
                        v,
                    );
                    assert!(s.is_covering_family(&pulled).unwrap());
                }
            }
        }
    }

    #[test]
    fn minimal_cover_of_pseudo_circle_top_is_the_four_point_basis() {
        let s = pseudo_circle_site();
        let top = s.require_top().unwrap();
        let mc = s.minimal_cover(top).unwrap();
        let names: Vec<&str> = mc.members.iter().map(|&m| s.name(m)).collect();
        assert_eq!(names, vec!["a", "b", "a,b,c", "a,b,d"]);
    }

    #[test]
    fn meet_is_associative_and_commutative() {
        for s in [pseudo_circle_site(), sphere_site(), discrete_two_site()] {
            for u in s.objects() {
                for v in s.objects() {
                    assert_eq!(s.meet(u, v), s.meet(v, u));
                    for w in s.objects() {
                        let left = s.meet(u, v).and_then(|m| s.meet(m, w));
                        let right = s.meet(v, w).and_then(|m| s.meet(u, m));
                        assert_eq!(left, right);
                    }
                }
            }
        }
    }
}
