//! Sheaves of crossed groups (A, ρ, Π, φ), their morphisms, short exact
//! sequences, and the inner-automorphism construction (A, Int(A)).

use crate::action::induced_action_on_sheaf;
use crate::error::{Budget, Error, Result};
use crate::group::FinGroup;
use crate::presheaf::{check_sheaf, sheafify, GroupPresheaf, SetMorphism, SetPresheaf};
use crate::site::{FiniteSite, Obj};
use std::collections::BTreeMap;

/// A sheaf of crossed groups: ρ: A → Π equivariant for the left Π-action φ
/// on A, satisfying the Peiffer identity objectwise.
#[derive(Debug, Clone)]
pub struct CrossedSheaf {
    pub a: GroupPresheaf,
    pub pi: GroupPresheaf,
    /// ρ: A → Π.
    pub rho: SetMorphism,
    /// `phi[u][p][x]` = p · x, the left action of Π(U) on A(U).
    pub phi: Vec<Vec<Vec<usize>>>,
}

impl CrossedSheaf {
    pub fn act(&self, u: Obj, p: usize, x: usize) -> usize {
        self.phi[u][p][x]
    }

    pub fn rho(&self, u: Obj, x: usize) -> usize {
        self.rho.apply(u, x)
    }

    /// Coefficients with trivial Π; the crossed axioms then force A abelian.
    pub fn with_trivial_pi(site: &FiniteSite, a: &GroupPresheaf) -> CrossedSheaf {
        let pi = crate::presheaf::trivial_group_sheaf(site);
        let rho = SetMorphism {
            maps: site.objects().map(|u| vec![0; a.size(u)]).collect(),
        };
        let phi = site
            .objects()
            .map(|u| vec![(0..a.size(u)).collect()])
            .collect();
        CrossedSheaf {
            a: a.clone(),
            pi,
            rho,
            phi,
        }
    }
}

/// Per-axiom verdicts for the crossed structure, with witnesses.
#[derive(Debug, Clone)]
pub struct CrossedReport {
    pub sheaves_ok: bool,
    pub action_ok: bool,
    pub equivariance_ok: bool,
    pub peiffer_ok: bool,
    pub restrictions_ok: bool,
    pub witnesses: Vec<String>,
}

impl CrossedReport {
    pub fn ok(&self) -> bool {
        self.sheaves_ok
            && self.action_ok
            && self.equivariance_ok
            && self.peiffer_ok
            && self.restrictions_ok
    }
}

/// Verifies both crossed axioms objectwise plus all structural requirements:
/// ρ(π·a) = π ρ(a) π⁻¹ and ρ(a)·b = a b a⁻¹, action by automorphisms,
/// restriction compatibility, and both carriers being sheaves.
pub fn check_crossed(
    site: &FiniteSite,
    c: &CrossedSheaf,
    budget: &Budget,
) -> Result<CrossedReport> {
    c.a.check(site)?;
    c.pi.check(site)?;
    c.rho.check_group(site, &c.a, &c.pi)?;
    let mut witnesses = Vec::new();
    let sheaves_ok = check_sheaf(site, &c.a.as_set_presheaf(), budget)?.ok
        && check_sheaf(site, &c.pi.as_set_presheaf(), budget)?.ok;
    if !sheaves_ok {
        witnesses.push("a carrier fails the sheaf condition".into());
    }
    let mut action_ok = true;
    for u in site.objects() {
        let ga = c.a.group(u);
        let gp = c.pi.group(u);
        if c.phi[u].len() != gp.order() || c.phi[u].iter().any(|r| r.len() != ga.order()) {
            return Err(Error::InvalidCrossed(format!(
                "action table at {} has wrong shape",
                site.name(u)
            )));
        }
        for x in ga.elements() {
            if c.act(u, gp.one, x) != x {
                action_ok = false;
                witnesses.push(format!(
                    "identity of Π moves {} at {}",
                    ga.label(x),
                    site.name(u)
                ));
            }
        }
        for p in gp.elements() {
            for q in gp.elements() {
                for x in ga.elements() {
                    if c.act(u, p, c.act(u, q, x)) != c.act(u, gp.mul(p, q), x) {
                        action_ok = false;
                        witnesses.push(format!(
                            "action of Π not associative at {} on ({}, {}, {})",
                            site.name(u),
                            gp.label(p),
                            gp.label(q),
                            ga.label(x)
                        ));
                    }
                }
            }
        }
        for p in gp.elements() {
            for x in ga.elements() {
                for y in ga.elements() {
                    if c.act(u, p, ga.mul(x, y)) != ga.mul(c.act(u, p, x), c.act(u, p, y)) {
                        action_ok = false;
                        witnesses.push(format!(
                            "Π does not act by automorphisms at {} on ({}, {}, {})",
                            site.name(u),
                            gp.label(p),
                            ga.label(x),
                            ga.label(y)
                        ));
                    }
                }
            }
        }
    }
    let mut restrictions_ok = true;
    for u in site.objects() {
        for v in site.objects().filter(|&v| site.leq(v, u) && v != u) {
            for p in 0..c.pi.size(u) {
                for x in 0..c.a.size(u) {
                    if c.a.res(u, v, c.act(u, p, x))
                        != c.act(v, c.pi.res(u, v, p), c.a.res(u, v, x))
                    {
                        restrictions_ok = false;
                        witnesses.push(format!(
                            "action incompatible with restriction {} → {}",
                            site.name(u),
                            site.name(v)
                        ));
                    }
                }
            }
        }
    }
    let mut equivariance_ok = true;
    let mut peiffer_ok = true;
    for u in site.objects() {
        let ga = c.a.group(u);
        let gp = c.pi.group(u);
        for p in gp.elements() {
            for x in ga.elements() {
                if c.rho(u, c.act(u, p, x)) != gp.conj(p, c.rho(u, x)) {
                    equivariance_ok = false;
                    witnesses.push(format!(
                        "ρ(π·a) ≠ π ρ(a) π⁻¹ at {} on (π = {}, a = {})",
                        site.name(u),
                        gp.label(p),
                        ga.label(x)
                    ));
                }
            }
        }
        for x in ga.elements() {
            for y in ga.elements() {
                if c.act(u, c.rho(u, x), y) != ga.conj(x, y) {
                    peiffer_ok = false;
                    witnesses.push(format!(
                        "ρ(a)·b ≠ a b a⁻¹ at {} on (a = {}, b = {})",
                        site.name(u),
                        ga.label(x),
                        ga.label(y)
                    ));
                }
            }
        }
    }
    witnesses.truncate(20);
    Ok(CrossedReport {
        sheaves_ok,
        action_ok,
        equivariance_ok,
        peiffer_ok,
        restrictions_ok,
        witnesses,
    })
}

/// A morphism of sheaves of crossed groups: a pair of group-sheaf morphisms
/// intertwining ρ and the actions.
#[derive(Debug, Clone)]
pub struct CrossedMorphism {
    pub f: SetMorphism,
    pub varphi: SetMorphism,
}

impl CrossedMorphism {
    pub fn identity(site: &FiniteSite, c: &CrossedSheaf) -> CrossedMorphism {
        CrossedMorphism {
            f: SetMorphism {
                maps: site.objects().map(|u| (0..c.a.size(u)).collect()).collect(),
            },
            varphi: SetMorphism {
                maps: site
                    .objects()
                    .map(|u| (0..c.pi.size(u)).collect())
                    .collect(),
            },
        }
    }

    pub fn compose(&self, then: &CrossedMorphism) -> CrossedMorphism {
        CrossedMorphism {
            f: self.f.compose(&then.f),
            varphi: self.varphi.compose(&then.varphi),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CrossedMorphismReport {
    pub group_homs_ok: bool,
    pub rho_square_ok: bool,
    pub action_square_ok: bool,
    pub witnesses: Vec<String>,
}

impl CrossedMorphismReport {
    pub fn ok(&self) -> bool {
        self.group_homs_ok && self.rho_square_ok && self.action_square_ok
    }
}

/// Checks both commuting conditions of a crossed morphism objectwise:
/// ρ′∘f = φ∘ρ and f(π·a) = φ(π)·f(a).
pub fn check_crossed_morphism(
    site: &FiniteSite,
    src: &CrossedSheaf,
    dst: &CrossedSheaf,
    m: &CrossedMorphism,
) -> Result<CrossedMorphismReport> {
    let mut witnesses = Vec::new();
    let group_homs_ok = m.f.check_group(site, &src.a, &dst.a).is_ok()
        && m.varphi.check_group(site, &src.pi, &dst.pi).is_ok();
    if !group_homs_ok {
        witnesses.push("component is not a homomorphism of group sheaves".into());
    }
    let mut rho_square_ok = true;
    let mut action_square_ok = true;
    for u in site.objects() {
        for x in 0..src.a.size(u) {
            if dst.rho(u, m.f.apply(u, x)) != m.varphi.apply(u, src.rho(u, x)) {
                rho_square_ok = false;
                witnesses.push(format!(
                    "ρ′∘f ≠ φ∘ρ at {} on {}",
                    site.name(u),
                    src.a.group(u).label(x)
                ));
            }
        }
        for p in 0..src.pi.size(u) {
            for x in 0..src.a.size(u) {
                if m.f.apply(u, src.act(u, p, x))
                    != dst.act(u, m.varphi.apply(u, p), m.f.apply(u, x))
                {
                    action_square_ok = false;
                    witnesses.push(format!(
                        "f(π·a) ≠ φ(π)·f(a) at {} on (π = {}, a = {})",
                        site.name(u),
                        src.pi.group(u).label(p),
                        src.a.group(u).label(x)
                    ));
                }
            }
        }
    }
    witnesses.truncate(20);
    Ok(CrossedMorphismReport {
        group_homs_ok,
        rho_square_ok,
        action_square_ok,
        witnesses,
    })
}

/// A short exact sequence of sheaves of crossed groups
/// Φ → Φ′ → Φ″ with (f, φ) and (h, ψ).
#[derive(Debug, Clone)]
pub struct CrossedSequence {
    pub left: CrossedSheaf,
    pub mid: CrossedSheaf,
    pub right: CrossedSheaf,
    pub incl: CrossedMorphism,
    pub proj: CrossedMorphism,
}

#[derive(Debug, Clone)]
pub struct ExactnessReport {
    pub morphisms_ok: bool,
    pub f_injective: bool,
    pub exact_objectwise: bool,
    pub exact_as_sheaves: bool,
    pub h_locally_surjective: bool,
    pub varphi_iso: bool,
    pub psi_locally_surjective: bool,
    pub witnesses: Vec<String>,
}

impl ExactnessReport {
    pub fn ok(&self) -> bool {
        self.morphisms_ok
            && self.f_injective
            && self.exact_as_sheaves
            && self.h_locally_surjective
            && self.varphi_iso
            && self.psi_locally_surjective
    }
}

/// A group-sheaf morphism is an epimorphism of sheaves iff it is surjective on
/// every irreducible object: those admit no nontrivial covers, and
/// surjectivity there spreads to local surjectivity everywhere.
fn locally_surjective(
    site: &FiniteSite,
    m: &SetMorphism,
    src: &GroupPresheaf,
    dst: &GroupPresheaf,
) -> bool {
    site.irreducibles().into_iter().all(|v| {
        let mut seen = vec![false; dst.size(v)];
        for x in 0..src.size(v) {
            seen[m.apply(v, x)] = true;
        }
        seen.into_iter().all(|b| b)
    })
}

/// Checks short exactness: the A-row exact objectwise and as sheaves, f
/// injective, h an epimorphism of sheaves, φ an isomorphism and ψ an
/// epimorphism.
pub fn check_short_exact(site: &FiniteSite, seq: &CrossedSequence) -> Result<ExactnessReport> {
    let mut witnesses = Vec::new();
    let morphisms_ok = check_crossed_morphism(site, &seq.left, &seq.mid, &seq.incl)?.ok()
        && check_crossed_morphism(site, &seq.mid, &seq.right, &seq.proj)?.ok();
    if !morphisms_ok {
        witnesses.push("a component is not a morphism of crossed sheaves".into());
    }
    let f = &seq.incl.f;
    let h = &seq.proj.f;
    let mut f_injective = true;
    for u in site.objects() {
        let mut seen = vec![false; seq.mid.a.size(u)];
        for x in 0..seq.left.a.size(u) {
            let y = f.apply(u, x);
            if seen[y] {
                f_injective = false;
                witnesses.push(format!("f not injective at {}", site.name(u)));
                break;
            }
            seen[y] = true;
        }
    }
    // objectwise exactness at A′: ker h = im f
    let mut exact_objectwise = true;
    for u in site.objects() {
        let image: Vec<bool> = {
            let mut im = vec![false; seq.mid.a.size(u)];
            for x in 0..seq.left.a.size(u) {
                im[f.apply(u, x)] = true;
            }
            im
        };
        for y in 0..seq.mid.a.size(u) {
            let in_kernel = h.apply(u, y) == seq.right.a.one(u);
            if in_kernel != image[y] {
                exact_objectwise = false;
                witnesses.push(format!(
                    "ker h ≠ im f at {} on {}",
                    site.name(u),
                    seq.mid.a.group(u).label(y)
                ));
            }
        }
    }
    // sheaf-level exactness: the image sheaf (local membership in the image,
    // checked on irreducibles) must equal the kernel sheaf
    let irr = site.irreducibles();
    let mut exact_as_sheaves = true;
    for u in site.objects() {
        let image_at =
            |v: Obj, y: usize| -> bool { (0..seq.left.a.size(v)).any(|x| f.apply(v, x) == y) };
        for y in 0..seq.mid.a.size(u) {
            let in_kernel = h.apply(u, y) == seq.right.a.one(u);
            let locally_in_image = irr
                .iter()
                .copied()
                .filter(|&v| site.leq(v, u))
                .all(|v| image_at(v, seq.mid.a.res(u, v, y)));
            if in_kernel != locally_in_image {
                exact_as_sheaves = false;
                witnesses.push(format!(
                    "kernel sheaf ≠ image sheaf at {} on {}",
                    site.name(u),
                    seq.mid.a.group(u).label(y)
                ));
            }
        }
    }
    let h_locally_surjective = locally_surjective(site, h, &seq.mid.a, &seq.right.a);
    if !h_locally_surjective {
        witnesses.push("h is not locally surjective".into());
    }
    let varphi_iso = seq.incl.varphi.is_iso(
        &seq.left.pi.as_set_presheaf(),
        &seq.mid.pi.as_set_presheaf(),
    );
    if !varphi_iso {
        witnesses.push("φ is not an isomorphism".into());
    }
    let psi_locally_surjective =
        locally_surjective(site, &seq.proj.varphi, &seq.mid.pi, &seq.right.pi);
    if !psi_locally_surjective {
        witnesses.push("ψ is not locally surjective".into());
    }
    witnesses.truncate(20);
    Ok(ExactnessReport {
        morphisms_ok,
        f_injective,
        exact_objectwise,
        exact_as_sheaves,
        h_locally_surjective,
        varphi_iso,
        psi_locally_surjective,
        witnesses,
    })
}

/// The inner crossed structure (A, Int(A)): Int(A) is the sheafification of
/// U ↦ A(U)/Z(U), where Z is the center subsheaf (sections all of whose
/// restrictions are central), ρ is the projection and φ acts through local
/// representatives.
pub fn int_crossed(site: &FiniteSite, a: &GroupPresheaf, budget: &Budget) -> Result<CrossedSheaf> {
    // center subsheaf
    let central: Vec<Vec<bool>> = site
        .objects()
        .map(|u| {
            (0..a.size(u))
                .map(|x| {
                    site.objects().filter(|&v| site.leq(v, u)).all(|v| {
                        let y = a.res(u, v, x);
                        let g = a.group(v);
                        g.elements().all(|z| g.mul(y, z) == g.mul(z, y))
                    })
                })
                .collect()
        })
        .collect();
    // quotient presheaf A/Z with coset classes
    let mut coset_of: Vec<Vec<usize>> = Vec::new();
    let mut coset_reps: Vec<Vec<usize>> = Vec::new();
    for u in site.objects() {
        let g = a.group(u);
        let center: Vec<usize> = (0..a.size(u)).filter(|&x| central[u][x]).collect();
        let mut class = vec![usize::MAX; a.size(u)];
        let mut reps = Vec::new();
        for x in g.elements() {
            if class[x] != usize::MAX {
                continue;
            }
            let c = reps.len();
            for &z in &center {
                class[g.mul(x, z)] = c;
            }
            reps.push(x);
        }
        coset_of.push(class);
        coset_reps.push(reps);
    }
    let quotient_presheaf = {
        let values: Vec<Vec<String>> = site
            .objects()
            .map(|u| {
                coset_reps[u]
                    .iter()
                    .map(|&r| format!("[{}]", a.group(u).label(r)))
                    .collect()
            })
            .collect();
        let mut res = BTreeMap::new();
        for u in site.objects() {
            for v in site.objects().filter(|&v| site.leq(v, u)) {
                let map = coset_reps[u]
                    .iter()
                    .map(|&r| coset_of[v][a.res(u, v, r)])
                    .collect();
                res.insert((u, v), map);
            }
        }
        SetPresheaf { values, res }
    };
    let sheafified = sheafify(site, &quotient_presheaf, budget)?;
    // group structure through irreducible stalks: there the unit is a
    // bijection and cosets multiply by representatives
    let irr = site.irreducibles();
    let unit_inv: BTreeMap<Obj, Vec<usize>> = irr
        .iter()
        .map(|&v| {
            let mut inv = vec![usize::MAX; sheafified.sheaf.size(v)];
            for x in 0..quotient_presheaf.size(v) {
                inv[sheafified.unit.apply(v, x)] = x;
            }
            (v, inv)
        })
        .collect();
    let mut groups: Vec<FinGroup> = Vec::new();
    for u in site.objects() {
        let members: Vec<Obj> = irr.iter().copied().filter(|&v| site.leq(v, u)).collect();
        let size = sheafified.sheaf.size(u);
        let coords = |x: usize| -> Vec<usize> {
            members
                .iter()
                .map(|&v| sheafified.sheaf.res(u, v, x))
                .collect()
        };
        let index: BTreeMap<Vec<usize>, usize> = (0..size).map(|x| (coords(x), x)).collect();
        let mut mul = vec![vec![0usize; size]; size];
        for x in 0..size {
            for y in 0..size {
                let prod: Vec<usize> = members
                    .iter()
                    .map(|&v| {
                        let g = a.group(v);
                        let cx = coset_reps[v][unit_inv[&v][sheafified.sheaf.res(u, v, x)]];
                        let cy = coset_reps[v][unit_inv[&v][sheafified.sheaf.res(u, v, y)]];
                        sheafified.unit.apply(v, coset_of[v][g.mul(cx, cy)])
                    })
                    .collect();
                mul[x][y] = *index.get(&prod).ok_or_else(|| {
                    Error::InvalidCrossed(format!(
                        "inner quotient product does not glue at {}",
                        site.name(u)
                    ))
                })?;
            }
        }
        let labels = (0..size)
            .map(|x| sheafified.sheaf.label(u, x).to_string())
            .collect();
        groups.push(FinGroup::from_table(labels, mul)?);
    }
    let pi = GroupPresheaf {
        groups,
        res: sheafified.sheaf.res.clone(),
    };
    pi.check(site)?;
    // ρ = projection then unit
    let rho = SetMorphism {
        maps: site
            .objects()
            .map(|u| {
                (0..a.size(u))
                    .map(|x| sheafified.unit.apply(u, coset_of[u][x]))
                    .collect()
            })
            .collect(),
    };
    // φ through local representatives on irreducibles
    let phi = induced_action_on_sheaf(site, &a.as_set_presheaf(), &pi, |v, x, p| {
        let rep = coset_reps[v][unit_inv[&v][p]];
        a.group(v).conj(rep, x)
    })?;
    // induced_action_on_sheaf stores tables indexed carrier-then-group;
    // crossed data wants group-then-carrier
    let phi: Vec<Vec<Vec<usize>>> = site
        .objects()
        .map(|u| {
            (0..pi.size(u))
                .map(|p| (0..a.size(u)).map(|x| phi[u][x][p]).collect())
                .collect()
        })
        .collect();
    Ok(CrossedSheaf {
        a: a.clone(),
        pi,
        rho,
        phi,
    })
}
